use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qlattice::context::{maximal_contexts, verify_model_iso};
use qlattice::geometry::{Geometry, Variant};
use qlattice::ontic::Completion;
use qlattice::quantum::{broadcast_obstruction, BellScenario, LambdaScan, LAMBDA_CANDIDATES};
use qlattice::tensor::NFold;
use qlattice::verify::{self, Options, SUITES};
use qlattice::{Error, RealSpace};
use serde_json::{json, Value};

const CAP_ENV: &str = "QLATTICE_CAP_OVERRIDE";
const DEFAULT_CAP_ELEMENTS: usize = 100_000;
const DEFAULT_CAP_TUPLES: usize = 100_000;

#[derive(Parser)]
#[command(name = "qlattice", version, about = "Finite state spaces, completions, tensor products and their checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Element cap for tensor products and completions [default: 100000, or $QLATTICE_CAP_OVERRIDE].
    #[arg(long, global = true)]
    cap_elements: Option<usize>,
    /// Cap on enumerated tuples (pure tuples of n-fold products, Λ candidates).
    #[arg(long, global = true, default_value_t = DEFAULT_CAP_TUPLES)]
    cap_tuples: usize,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Args, Clone)]
struct SpaceArgs {
    /// Built-in family: bool, simplex (z), zprime (zp).
    #[arg(long, conflicts_with = "input")]
    kind: Option<String>,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// A space in JSON or DOT form.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a space and print it.
    Build(SpaceArgs),
    /// Minimal tensor product of two or more factors, e.g. --factors zprime:2,zprime:2.
    Tensor {
        #[arg(long, value_delimiter = ',', default_value = "zprime:2,zprime:2")]
        factors: Vec<String>,
    },
    /// Ontic completion of a real space.
    Complete(SpaceArgs),
    /// Contexts of the completion and the description/state comparison.
    Contexts(SpaceArgs),
    /// Two-qubit incidence geometry.
    Geometry {
        #[arg(long, default_value_t = 2)]
        na: usize,
        #[arg(long, default_value_t = 2)]
        nb: usize,
        #[arg(long, default_value = "check")]
        variant: String,
    },
    /// Bell scenario on Z'_na ⊗ Z'_nb.
    Bell {
        #[arg(long, default_value_t = 2)]
        na: usize,
        #[arg(long, default_value_t = 2)]
        nb: usize,
    },
    /// Broadcasting verdict for a real space.
    Broadcast(SpaceArgs),
    /// Run verification suites; exit 1 if any check fails.
    Verify {
        /// Suites to run (repeatable); all when omitted.
        #[arg(long)]
        suite: Vec<String>,
    },
    /// Export a space as JSON or as a DOT Hasse diagram.
    Export(SpaceArgs),
}

fn load_space(a: &SpaceArgs) -> Result<RealSpace> {
    if let Some(p) = &a.input {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let rs = if text.trim_start().starts_with("digraph") {
            RealSpace::from_dot(&text)?
        } else {
            let js = serde_json::from_str(&text).map_err(|e| {
                Error::Input(format!("{}:{}:{}: {e}", p.display(), e.line(), e.column()))
            })?;
            RealSpace::from_json(&js)?
        };
        return Ok(rs);
    }
    Ok(RealSpace::make(a.kind.as_deref().unwrap_or("zprime"), a.n)?)
}

fn parse_factor(spec: &str) -> Result<RealSpace> {
    let (kind, n) = match spec.split_once(':') {
        Some((k, n)) => {
            let n = n.parse().map_err(|_| Error::Input(format!("factor {spec:?}: bad size")))?;
            (k, n)
        }
        None => (spec, 2),
    };
    Ok(RealSpace::make(kind, n)?)
}

fn cap_elements(cli: &Cli) -> Result<usize> {
    if let Some(c) = cli.cap_elements {
        return Ok(c);
    }
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("{CAP_ENV}={v:?} is not a number")).into()),
        Err(_) => Ok(DEFAULT_CAP_ELEMENTS),
    }
}

fn check_tuples(count: usize, cap: usize, what: &str) -> Result<()> {
    if count > cap {
        return Err(Error::Cap { what: what.into(), limit: cap, count }.into());
    }
    Ok(())
}

enum Output {
    Json(Value),
    Text(String),
}

/// Returns the artifact and whether every requested check passed.
fn run(cli: &Cli) -> Result<(Output, bool)> {
    let cap = cap_elements(cli)?;
    let dot = cli.format == Format::Dot;
    let out = match &cli.cmd {
        Cmd::Build(a) | Cmd::Export(a) => {
            let rs = load_space(a)?;
            if dot {
                Output::Text(rs.to_dot("space"))
            } else {
                Output::Json(serde_json::to_value(rs.to_json())?)
            }
        }
        Cmd::Tensor { factors } => {
            let fs: Vec<RealSpace> = factors.iter().map(|f| parse_factor(f)).collect::<Result<_>>()?;
            let tuples: usize = fs.iter().map(|f| f.pures().len()).product();
            check_tuples(tuples, cli.cap_tuples, "pure tuples")?;
            let nf = NFold::build(&fs, cap)?;
            let t = &nf.product;
            if dot {
                Output::Text(t.real().to_dot("tensor"))
            } else {
                Output::Json(json!({
                    "factors": factors,
                    "elements": t.n(),
                    "pures": t.pure_pairs().len(),
                    "simplex": t.real().has_unique_pure_decomposition(),
                    "space": t.real().to_json(),
                }))
            }
        }
        Cmd::Complete(a) => {
            let rs = load_space(a)?;
            let c = Completion::enumerate(&rs, cap)?;
            if dot {
                Output::Text(c.space().to_dot("completion"))
            } else {
                let s = c.space();
                let hidden: Vec<Value> = c
                    .hidden()
                    .into_iter()
                    .map(|x| {
                        let theta: Vec<&str> = c.theta(x).iter().map(|&w| rs.label(w)).collect();
                        json!({ "label": s.label(x), "theta": theta })
                    })
                    .collect();
                Output::Json(json!({
                    "elements": c.n(),
                    "real": rs.n(),
                    "hidden": hidden,
                    "linear": c.is_linear(),
                    "space": s.to_json(),
                }))
            }
        }
        Cmd::Contexts(a) => {
            let rs = load_space(a)?;
            let c = Completion::enumerate(&rs, cap)?;
            let emb = c.embedding();
            let ctx = maximal_contexts(emb)?;
            let model = verify_model_iso(emb, &ctx, cap)?;
            let s = c.space();
            let list: Vec<Value> = ctx
                .iter()
                .map(|k| {
                    let effects: Vec<_> = k.effects.iter().map(|e| e.to_json(s)).collect();
                    json!({ "kind": k.kind, "effects": effects, "oracle_ok": k.oracle_ok, "maximal": k.maximal })
                })
                .collect();
            let ok = model.failures.is_empty() && model.bijective && model.meet_homomorphism;
            return Ok((Output::Json(json!({ "contexts": list, "model": model })), ok));
        }
        Cmd::Geometry { na, nb, variant } => {
            let v = Variant::parse(variant).ok_or_else(|| Error::Input(format!("unknown variant {variant:?}; expected check or widecheck")))?;
            let g = Geometry::build(&RealSpace::zprime(*na)?, &RealSpace::zprime(*nb)?, v, cap, cap.max(qlattice::ontic::DEFAULT_CAP))?;
            if dot {
                Output::Text(g.to_dot())
            } else {
                Output::Json(serde_json::to_value(g.incidence())?)
            }
        }
        Cmd::Bell { na, nb } => {
            check_tuples(LAMBDA_CANDIDATES, cli.cap_tuples, "Λ candidates")?;
            let scan = LambdaScan::new();
            let sc = BellScenario::new(*na, *nb, cap)?;
            Output::Json(serde_json::to_value(sc.report(&scan)?)?)
        }
        Cmd::Broadcast(a) => {
            let rs = load_space(a)?;
            Output::Json(serde_json::to_value(broadcast_obstruction(&rs)?)?)
        }
        Cmd::Verify { suite } => {
            let names: Vec<String> = if suite.is_empty() {
                SUITES.iter().map(|s| s.to_string()).collect()
            } else {
                suite.clone()
            };
            if let Some(bad) = names.iter().find(|n| !SUITES.contains(&n.as_str())) {
                return Err(Error::Input(format!("unknown suite {bad:?}; expected one of {}", SUITES.join(", "))).into());
            }
            let opts = Options { tensor_cap: cap, completion_cap: cap.max(qlattice::ontic::DEFAULT_CAP), seed: cli.seed, ..Options::default() };
            let report = verify::run(&names, &opts)?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {} ({} of {} cases): {}", c.name, c.failures, c.cases, c.witnesses.join("; "));
            }
            let ok = report.passed;
            return Ok((Output::Json(serde_json::to_value(report)?), ok));
        }
    };
    Ok((out, true))
}

fn emit(cli: &Cli, out: Output) -> Result<()> {
    let text = match out {
        Output::Json(v) => serde_json::to_string_pretty(&v)? + "\n",
        Output::Text(t) => t,
    };
    match &cli.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Cap { .. }) => 3,
        Some(Error::Input(_) | Error::Order(_) | Error::Json(_)) => 2,
        Some(_) => 1,
        None if e.downcast_ref::<std::io::Error>().is_some() || e.chain().any(|c| c.is::<std::io::Error>()) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let result = run(&cli).and_then(|(out, ok)| {
        emit(&cli, out)?;
        Ok(ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qlattice: verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qlattice: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
