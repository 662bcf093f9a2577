//! Verification suites: each returns a list of named checks.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chu::{B_BOT, B_NO, B_YES};
use crate::context::{maximal_contexts, verify_model_iso};
use crate::error::{input, Result};
use crate::geometry::{verify_covering, Geometry, Variant};
use crate::ontic::{closure, closure_chain, in_k_hat, is_admissible, set_leq, ClosureMode, Completion};
use crate::order::{BoolVal, Id, StateSpace};
use crate::quantum::{bool_pair, broadcast_obstruction, BellScenario, BroadcastWitness, LambdaScan};
use crate::real::{RealSpace, RealStructureEmbedding};
use crate::report::{Check, REPORT_SCHEMA};
use crate::tensor::{Pair, TensorProduct};

pub const SUITES: [&str; 13] = [
    "boolean",
    "closure",
    "idempotency",
    "simplex",
    "completion",
    "tensor",
    "bell",
    "broadcast",
    "contexts",
    "orthoclosure",
    "geometry",
    "covering",
    "noncompleteness",
];

#[derive(Clone, Debug)]
pub struct Options {
    pub tensor_cap: usize,
    pub completion_cap: usize,
    pub seed: u64,
    /// Random subsets drawn per large space in the idempotency suite.
    pub samples: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tensor_cap: crate::tensor::DEFAULT_TENSOR_CAP,
            completion_cap: crate::ontic::DEFAULT_CAP,
            seed: 0,
            samples: 1000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub suites: Vec<String>,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suites: Vec<String>, checks: Vec<Check>) -> Report {
        Report { schema: REPORT_SCHEMA, suites, passed: checks.iter().all(|c| c.passed), checks }
    }
}

pub fn run_suite(name: &str, opts: &Options) -> Result<Vec<Check>> {
    match name {
        "boolean" => Ok(boolean_suite()),
        "closure" => closure_suite(),
        "idempotency" => idempotency_suite(opts),
        "simplex" => simplex_suite(opts),
        "completion" => completion_suite(opts),
        "tensor" => tensor_suite(opts),
        "bell" => bell_suite(opts),
        "broadcast" => broadcast_suite(),
        "contexts" => contexts_suite(opts),
        "orthoclosure" => orthoclosure_suite(opts),
        "geometry" => geometry_suite(opts),
        "covering" => covering_suite(opts),
        "noncompleteness" => noncompleteness_suite(opts),
        other => input(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", "))),
    }
}

pub fn run(names: &[String], opts: &Options) -> Result<Report> {
    let mut checks = Vec::new();
    for n in names {
        checks.extend(run_suite(n, opts)?);
    }
    Ok(Report::new(names.to_vec(), checks))
}

// ---------------------------------------------------------------- boolean

pub fn boolean_suite() -> Vec<Check> {
    use BoolVal::*;
    // Meet: equal arguments survive, anything else drops to bottom.
    let meet = [
        (Yes, Yes, Yes), (Yes, No, Bot), (Yes, Bot, Bot),
        (No, Yes, Bot), (No, No, No), (No, Bot, Bot),
        (Bot, Yes, Bot), (Bot, No, Bot), (Bot, Bot, Bot),
    ];
    // Bullet: Y is the unit, N absorbs, ⊥•⊥ = ⊥.
    let bullet = [
        (Yes, Yes, Yes), (Yes, No, No), (Yes, Bot, Bot),
        (No, Yes, No), (No, No, No), (No, Bot, No),
        (Bot, Yes, Bot), (Bot, No, No), (Bot, Bot, Bot),
    ];
    let bar = [(Yes, No), (No, Yes), (Bot, Bot)];
    let mut m = Check::new("boolean-meet-table", "meet on the boolean domain");
    for (x, y, z) in meet {
        m.case(x.meet(y) == z, || format!("{x:?} ∧ {y:?} = {:?}, expected {z:?}", x.meet(y)));
    }
    let mut b = Check::new("boolean-bullet-table", "monoid product on the boolean domain");
    for (x, y, z) in bullet {
        b.case(x.bullet(y) == z, || format!("{x:?} • {y:?} = {:?}, expected {z:?}", x.bullet(y)));
    }
    let mut i = Check::new("boolean-bar-table", "involution on the boolean domain");
    for (x, z) in bar {
        i.case(x.bar() == z, || format!("bar {x:?} = {:?}, expected {z:?}", x.bar()));
    }
    vec![m, b, i]
}

// ---------------------------------------------------------------- closure

/// The ten-element lattice on which one pre-closure step is not idempotent.
pub fn preclosure_lattice() -> StateSpace {
    let labels = ["⊥", "u1", "u2", "u3", "v1", "v2", "w", "z", "y", "x"];
    let covers = [
        ("⊥", "u1"), ("⊥", "u2"), ("⊥", "u3"), ("⊥", "v1"), ("⊥", "v2"),
        ("u1", "w"), ("v1", "w"), ("u3", "w"),
        ("u2", "z"), ("v2", "z"), ("u3", "z"),
        ("u1", "y"), ("u2", "y"),
        ("v1", "x"), ("v2", "x"),
    ];
    let id = |s: &str| labels.iter().position(|&l| l == s).unwrap();
    let rel: Vec<(Id, Id)> = covers.iter().map(|&(a, b)| (id(a), id(b))).collect();
    StateSpace::from_relation(labels.iter().map(|s| s.to_string()).collect(), &rel)
        .expect("pre-closure lattice")
}

fn starless(space: StateSpace) -> RealSpace {
    let n = space.n();
    RealSpace::unchecked(space, vec![None; n])
}

fn names(s: &StateSpace, ids: &[Id]) -> Vec<String> {
    ids.iter().map(|&x| s.label(x).to_string()).collect()
}

pub fn closure_suite() -> Result<Vec<Check>> {
    let rs = starless(preclosure_lattice());
    let s = rs.space();
    let ids = |v: &[&str]| -> Vec<Id> {
        let mut out: Vec<Id> = v.iter().map(|l| s.id(l).unwrap()).collect();
        out.sort_unstable();
        out
    };
    let u = ids(&["u1", "u2", "u3"]);
    let once = closure(&rs, &u, ClosureMode::Pre)?;
    let twice = closure(&rs, &once, ClosureMode::Pre)?;
    let full = closure(&rs, &u, ClosureMode::Full)?;
    let one = ids(&["w", "z", "y"]);
    let two = ids(&["w", "z", "y", "x"]);
    let distributive = s.is_distributive();
    Ok(vec![
        Check::verdict(
            "preclosure-once",
            "pre-closure of {u1,u2,u3}",
            once == one,
            format!("𝔠(U) = {:?}", names(s, &once)),
        ),
        Check::verdict(
            "preclosure-not-idempotent",
            "second pre-closure step grows",
            twice == two && once != twice,
            format!("𝔠∘𝔠(U) = {:?}", names(s, &twice)),
        ),
        Check::verdict(
            "closure-fixed-point",
            "cl_c as the fixed point of pre-closure",
            full == two,
            format!("cl_c(U) = {:?}", names(s, &full)),
        ),
        Check::verdict(
            "preclosure-lattice-shape",
            "counterexample lattice is generated by maximals and not distributive",
            s.is_generated_by_maximals() && !distributive,
            format!("generated_by_maximals = {}, distributive = {distributive}", s.is_generated_by_maximals()),
        ),
    ])
}

// ---------------------------------------------------------------- idempotency

/// Every small constructed space, by name.
pub fn small_spaces(opts: &Options) -> Result<Vec<(String, RealSpace)>> {
    let mut out = vec![("B".to_string(), RealSpace::boolean())];
    for n in 2..=3 {
        out.push((format!("Z{n}"), RealSpace::simplex(n)?));
    }
    for n in 2..=5 {
        out.push((format!("Z'{n}"), RealSpace::zprime(n)?));
    }
    out.push(("preclosure-lattice".into(), starless(preclosure_lattice())));
    let c = Completion::enumerate(&RealSpace::zprime(2)?, opts.completion_cap)?;
    out.push(("J(Z'2)".into(), starless(c.space().clone())));
    Ok(out)
}

fn large_spaces(opts: &Options) -> Result<Vec<(String, RealSpace)>> {
    let z2 = RealSpace::zprime(2)?;
    let t = TensorProduct::build(&z2, &z2, opts.tensor_cap)?;
    let c3 = Completion::enumerate(&RealSpace::zprime(3)?, opts.completion_cap)?;
    let ct = Completion::enumerate(t.real(), opts.completion_cap)?;
    Ok(vec![
        ("Z4".into(), RealSpace::simplex(4)?),
        ("Z'2⊗Z'2".into(), t.real().clone()),
        ("J(Z'3)".into(), starless(c3.space().clone())),
        ("J(Z'2⊗Z'2)".into(), starless(ct.space().clone())),
    ])
}

fn idempotent(rs: &RealSpace, u: &[Id]) -> Result<bool> {
    let once = closure(rs, u, ClosureMode::Full)?;
    Ok(closure(rs, &once, ClosureMode::Full)? == once)
}

pub fn idempotency_suite(opts: &Options) -> Result<Vec<Check>> {
    let mut exhaustive = Check::new("closure-idempotent-exhaustive", "cl_c∘cl_c = cl_c on every subset of small spaces");
    for (name, rs) in small_spaces(opts)? {
        let s = rs.space();
        if s.n() > 12 {
            continue;
        }
        let bot = s.bottom();
        for mask in 1u32..1 << s.n() {
            let u: Vec<Id> = (0..s.n()).filter(|&i| mask >> i & 1 == 1).collect();
            if u.len() > 1 && u.contains(&bot) {
                continue;
            }
            exhaustive.case(idempotent(&rs, &u)?, || format!("{name}: {:?}", names(s, &u)));
        }
    }
    let mut sampled = Check::new("closure-idempotent-sampled", "cl_c∘cl_c = cl_c on seeded random subsets");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for (name, rs) in large_spaces(opts)? {
        let s = rs.space();
        let pool: Vec<Id> = (0..s.n()).filter(|&x| x != s.bottom()).collect();
        for _ in 0..opts.samples {
            let k = rng.random_range(1..=6.min(pool.len()));
            let mut u: Vec<Id> = (0..k).map(|_| pool[rng.random_range(0..pool.len())]).collect();
            u.sort_unstable();
            u.dedup();
            sampled.case(idempotent(&rs, &u)?, || format!("{name}: {:?}", names(s, &u)));
        }
    }
    Ok(vec![exhaustive, sampled])
}

// ---------------------------------------------------------------- simplex tensor

pub fn simplex_suite(opts: &Options) -> Result<Vec<Check>> {
    let b = RealSpace::boolean();
    let bb = TensorProduct::build(&b, &b, opts.tensor_cap)?;
    let z23 = TensorProduct::build(&RealSpace::simplex(2)?, &RealSpace::simplex(3)?, opts.tensor_cap)?;
    let z23g = TensorProduct::build_general(&RealSpace::simplex(2)?, &RealSpace::simplex(3)?, opts.tensor_cap)?;
    let mut out = vec![
        Check::verdict("simplex-tensor-size", "B⊗B has 15 elements", bb.n() == 15, format!("|B⊗B| = {}", bb.n())),
        Check::verdict(
            "simplex-tensor-bb",
            "B⊗B has unique pure decompositions",
            bb.real().has_unique_pure_decomposition(),
            format!("{} pures", bb.pure_pairs().len()),
        ),
        Check::verdict(
            "simplex-tensor-z2z3",
            "Z2⊗Z3 has unique pure decompositions",
            z23.real().has_unique_pure_decomposition(),
            format!("|Z2⊗Z3| = {}", z23.n()),
        ),
    ];
    out.push(Check::verdict(
        "simplex-fast-path",
        "simplex fast path agrees with the general builder",
        z23.n() == z23g.n() && underline_family(&z23) == underline_family(&z23g),
        format!("{} vs {} elements", z23.n(), z23g.n()),
    ));
    Ok(out)
}

/// Every element as its sorted set of pure pairs, independent of id order.
fn underline_family(t: &TensorProduct) -> Vec<Vec<Pair>> {
    let mut out: Vec<Vec<Pair>> = (0..t.n())
        .map(|x| {
            let mut u = t.underline_pairs(x);
            u.sort_unstable();
            u
        })
        .collect();
    out.sort();
    out
}

// ---------------------------------------------------------------- completion

/// Greatest lower bound by scanning the order, with no lattice operations.
fn brute_meet(s: &StateSpace, x: Id, y: Id) -> Option<Id> {
    let lower: Vec<Id> = (0..s.n()).filter(|&z| s.leq(z, x) && s.leq(z, y)).collect();
    lower.iter().copied().find(|&z| lower.iter().all(|&w| s.leq(w, z)))
}

fn brute_join(s: &StateSpace, x: Id, y: Id) -> Option<Id> {
    let upper: Vec<Id> = (0..s.n()).filter(|&z| s.leq(x, z) && s.leq(y, z)).collect();
    upper.iter().copied().find(|&z| upper.iter().all(|&w| s.leq(z, w)))
}

pub fn completion_suite(opts: &Options) -> Result<Vec<Check>> {
    let z = RealSpace::zprime(2)?;
    let c = Completion::enumerate(&z, opts.completion_cap)?;
    let s = c.space();
    let hidden = c.hidden().len();
    let mut galois = Check::new("completion-galois", "Λ(J) ⊑ σ ⇔ J ⊑ Θ(σ)");
    for j in 0..c.n() {
        let jset = c.theta(j);
        let lam = c.lookup(jset);
        for sigma in 0..c.n() {
            let lhs = lam.is_some_and(|l| s.leq(l, sigma));
            let rhs = set_leq(z.space(), jset, c.theta(sigma));
            galois.case(lhs == rhs, || format!("J = {}, σ = {}", s.label(j), s.label(sigma)));
        }
    }
    let mut meet = Check::new("completion-meet-formula", "meet formula against the order");
    let mut join = Check::new("completion-join-formula", "join formula against the order");
    for x in 0..c.n() {
        for y in 0..c.n() {
            let m = c.lookup(&c.meet_formula(x, y));
            meet.case(m.is_some() && m == brute_meet(s, x, y), || format!("{} ⊓ {}", s.label(x), s.label(y)));
            let j = c.join_formula(x, y).and_then(|v| c.lookup(&v));
            join.case(j == brute_join(s, x, y), || format!("{} ⊔ {}", s.label(x), s.label(y)));
        }
    }
    Ok(vec![
        Check::verdict(
            "completion-size",
            "completion of Z'2 has 9 elements, 4 hidden",
            c.n() == 9 && hidden == 4,
            format!("{} elements, {hidden} hidden", c.n()),
        ),
        galois,
        meet,
        join,
    ])
}

// ---------------------------------------------------------------- tensor oracle

/// All generator sets of size 1 to `k` over the factor element pairs.
pub fn generator_sets(a: &StateSpace, b: &StateSpace, k: usize) -> Vec<Vec<Pair>> {
    let pairs: Vec<Pair> = (0..a.n()).flat_map(|x| (0..b.n()).map(move |y| (x, y))).collect();
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<Pair>)> = vec![(0, Vec::new())];
    while let Some((start, cur)) = stack.pop() {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == k {
            continue;
        }
        for i in start..pairs.len() {
            let mut next = cur.clone();
            next.push(pairs[i]);
            stack.push((i + 1, next));
        }
    }
    out.sort();
    out
}

pub fn tensor_suite(opts: &Options) -> Result<Vec<Check>> {
    let z = RealSpace::zprime(2)?;
    let t = TensorProduct::build(&z, &z, opts.tensor_cap)?;
    let sets = generator_sets(z.space(), z.space(), 3);
    let mut by_norm: HashMap<Id, usize> = HashMap::new();
    let mut by_sig: HashMap<Vec<BoolVal>, usize> = HashMap::new();
    let mut check = Check::new("tensor-normalize-vs-congruence", "normalize equality ⇔ ν-congruence on Z'2⊗Z'2");
    for (k, g) in sets.iter().enumerate() {
        let n = t.normalize(g)?;
        let sig = t.nu_signature(g);
        let a = *by_norm.entry(n).or_insert(k);
        let b = *by_sig.entry(sig).or_insert(k);
        // Same class representative under both relations, so the partitions coincide.
        check.case(a == b, || format!("{:?} vs {:?}", sets[a], sets[b]));
    }
    Ok(vec![
        check,
        Check::verdict("tensor-size", "Z'2⊗Z'2 has 113 elements", t.n() == 113, format!("{} elements", t.n())),
    ])
}

// ---------------------------------------------------------------- Bell

/// The four marginals expected for the standard scenario, in order 13, 14, 23, 24.
pub fn expected_bell_marginals(bb: &TensorProduct) -> Result<[Id; 4]> {
    Ok([
        bb.normalize(&[(B_NO, B_BOT), (B_YES, B_NO)])?,
        bb.normalize(&[(B_YES, B_BOT), (B_NO, B_YES)])?,
        bb.normalize(&[(B_YES, B_NO), (B_BOT, B_YES)])?,
        bb.normalize(&[(B_BOT, B_BOT)])?,
    ])
}

pub fn bell_suite(opts: &Options) -> Result<Vec<Check>> {
    let scan = LambdaScan::new();
    let bb = scan.pair();
    let sc = BellScenario::new(2, 2, opts.tensor_cap)?;
    let t = &sc.tensor;
    let mut out = Vec::new();

    let c = Completion::enumerate(t.real(), opts.completion_cap)?;
    let joined = c.join(c.of_base(sc.parts[0]), c.of_base(sc.parts[1]));
    let theta_expected = {
        let (a, as_, b) = (1, 2, 3);
        let mut v = vec![
            t.normalize(&[(a, a), (b, b)])?,
            t.normalize(&[(a, as_), (as_, b)])?,
            t.normalize(&[(b, as_), (as_, a)])?,
        ];
        v.sort_unstable();
        v
    };
    out.push(Check::verdict(
        "bell-sigma",
        "Σ is hidden, with a three-element Θ",
        sc.is_hidden() && sc.sigma == theta_expected && joined.map(|j| c.theta(j).to_vec()) == Some(sc.sigma.clone()),
        format!("Θ(Σ) = {:?}", sc.sigma.iter().map(|&w| t.label(w)).collect::<Vec<_>>()),
    ));

    let phi = sc.marginals(bb)?;
    let expected = expected_bell_marginals(bb)?;
    let mut m = Check::new("bell-marginals", "Φ13, Φ14, Φ23, Φ24 of Σ");
    for k in 0..4 {
        m.case(phi[k] == expected[k], || {
            format!("Φ{} = {}, expected {}", crate::quantum::MARGINAL_NAMES[k], bb.label(phi[k]), bb.label(expected[k]))
        });
    }
    out.push(m);

    let found = scan.search(&phi);
    let mut nl = Check::new("bell-lambda-absent", "no element of B^⊗4 has the four marginals of Σ");
    nl.cases = crate::quantum::LAMBDA_CANDIDATES as u64;
    if let Some(w) = found {
        nl.fail(format!("Λ = {}", LambdaScan::label(w)));
    }
    out.push(nl);

    let mut real = Check::new("bell-real-states-local", "every real state has a Λ, built from its generators");
    for choice in BellScenario::admissible_choices(t) {
        let s = BellScenario::with_choice(t.clone(), choice)?;
        for x in 0..t.n() {
            let phi = s.marginals_of(&[x], bb)?;
            let w = s.real_witness(x);
            real.case(scan.satisfies(w, &phi) && scan.search(&phi).is_some(), || {
                format!("{choice:?}, state {}", t.label(x))
            });
        }
    }
    out.push(real);

    for n in [2usize, 3] {
        let z = RealSpace::zprime(n)?;
        let tn = TensorProduct::build(&z, &z, opts.tensor_cap)?;
        let mut all = Check::new(&format!("bell-nonlocal-all-choices-{n}"), "Σ is non-local for every admissible choice");
        for choice in BellScenario::admissible_choices(&tn) {
            let s = BellScenario::with_choice(tn.clone(), choice)?;
            let ok = s.is_hidden() && scan.search(&s.marginals(bb)?).is_none();
            all.case(ok, || format!("{choice:?}"));
        }
        out.push(all);
    }
    Ok(out)
}

// ---------------------------------------------------------------- broadcasting

pub fn broadcast_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let bb = bool_pair();
    let clash_bottoms = (bb.space().bottom(), bb.normalize(&[(B_BOT, B_NO), (B_NO, B_BOT)])?);
    for n in [2, 3] {
        let r = broadcast_obstruction(&RealSpace::zprime(n)?)?;
        let ok = match &r.witness {
            BroadcastWitness::Clash { bottom_first, bottom_second, .. } => {
                !r.broadcasts
                    && bottom_first == bb.label(clash_bottoms.0)
                    && bottom_second == bb.label(clash_bottoms.1)
                    && r.joint_found == Some(false)
            }
            _ => false,
        };
        out.push(Check::verdict(
            &format!("broadcast-obstruction-zprime{n}"),
            "forced values clash at bottom",
            ok,
            serde_json::to_string(&r.witness)?,
        ));
    }
    let simplexes = [
        ("B", RealSpace::boolean()),
        ("Z2", RealSpace::simplex(2)?),
        ("Z3", RealSpace::simplex(3)?),
    ];
    for (name, rs) in simplexes {
        let r = broadcast_obstruction(&rs)?;
        let ok = matches!(r.witness, BroadcastWitness::Diagonal { morphism: true, traces: true, .. }) && r.broadcasts;
        out.push(Check::verdict(
            &format!("broadcast-diagonal-{name}"),
            "diagonal broadcast is a morphism with both traces the identity",
            ok,
            serde_json::to_string(&r.witness)?,
        ));
    }
    let mut dich = Check::new("broadcast-iff-simplex", "broadcasting exactly on simplexes");
    let mut family = vec![("B".to_string(), RealSpace::boolean())];
    // Z4⊗Z4 already exceeds the dense table cap.
    for n in 2..=3 {
        family.push((format!("Z{n}"), RealSpace::simplex(n)?));
    }
    for n in 2..=4 {
        family.push((format!("Z'{n}"), RealSpace::zprime(n)?));
    }
    for (name, rs) in family {
        let r = broadcast_obstruction(&rs)?;
        dich.case(r.broadcasts == rs.has_unique_pure_decomposition(), || name.clone());
    }
    out.push(dich);
    Ok(out)
}

// ---------------------------------------------------------------- contexts

pub fn contexts_suite(opts: &Options) -> Result<Vec<Check>> {
    let c = Completion::enumerate(&RealSpace::zprime(2)?, opts.completion_cap)?;
    let emb = c.embedding().clone();
    let ctx = maximal_contexts(&emb)?;
    let r = verify_model_iso(&emb, &ctx, opts.completion_cap)?;
    let z3 = RealSpace::simplex(3)?.embedding();
    let ctx3 = maximal_contexts(&z3)?;
    let r3 = verify_model_iso(&z3, &ctx3, opts.completion_cap)?;
    Ok(vec![
        Check::verdict(
            "descriptions-iso-states",
            "coherent descriptions of J(Z'2) correspond to its states",
            r.bijective && r.meet_homomorphism && r.descriptions == 9 && r.failures.is_empty(),
            format!("{} descriptions, {} states, {} contexts", r.descriptions, r.states, r.contexts),
        ),
        Check::verdict(
            "completion-contextual",
            "J(Z'2) has a state reached only through a non-global description",
            r.contextual,
            format!("non-global: {:?}", r.non_global),
        ),
        Check::verdict(
            "simplex-noncontextual",
            "Z3 has a non-contextual model",
            !r3.contextual && r3.bijective,
            format!("{} descriptions, {} states", r3.descriptions, r3.states),
        ),
    ])
}

// ---------------------------------------------------------------- orthoclosure

fn to_mask(set: &[Id]) -> u64 {
    set.iter().fold(0, |m, &x| m | 1 << x)
}

fn of_mask(n: usize, m: u64) -> Vec<Id> {
    (0..n).filter(|&i| m >> i & 1 == 1).collect()
}

/// The orthoclosed subsets, as bitmasks; the space must have at most 20 elements.
pub fn orthoclosed_family(emb: &RealStructureEmbedding) -> Result<Vec<u64>> {
    let n = emb.ambient.n();
    if n > 20 {
        return input("orthoclosed family is enumerated on at most 20 elements");
    }
    let mut fam: Vec<u64> = (0u64..1 << n).map(|m| to_mask(&emb.ortho(&of_mask(n, m)))).collect();
    fam.sort_unstable();
    fam.dedup();
    Ok(fam)
}

pub fn orthoclosure_suite(opts: &Options) -> Result<Vec<Check>> {
    let c = Completion::enumerate(&RealSpace::zprime(2)?, opts.completion_cap)?;
    let emb = c.embedding();
    let n = emb.ambient.n();
    let fam = orthoclosed_family(emb)?;
    let perp = |m: u64| to_mask(&emb.ortho(&of_mask(n, m)));
    let mut double = Check::new("ortho-double", "H^⊥⊥ = H on orthoclosed sets");
    let mut anti = Check::new("ortho-antitone", "H1 ⊆ H2 ⇒ H2^⊥ ⊆ H1^⊥");
    let mut disjoint = Check::new("ortho-disjoint", "H ∩ H^⊥ = ∅");
    for &h in &fam {
        double.case(perp(perp(h)) == h, || format!("{:?}", names(&emb.ambient, &of_mask(n, h))));
        disjoint.case(h & perp(h) == 0, || format!("{:?}", names(&emb.ambient, &of_mask(n, h))));
        for &g in &fam {
            if h & !g == 0 {
                anti.case(perp(g) & !perp(h) == 0, || format!("{h:#x} ⊆ {g:#x}"));
            }
        }
    }
    let mut out = vec![double, anti, disjoint];
    out.push(Check::verdict(
        "ortho-family-size",
        "orthoclosed sets of J(Z'2)",
        fam.contains(&0) && fam.contains(&((1u64 << n) - 1)),
        format!("{} orthoclosed sets", fam.len()),
    ));
    Ok(out)
}

// ---------------------------------------------------------------- geometry

pub fn geometry_suite(opts: &Options) -> Result<Vec<Check>> {
    let z = RealSpace::zprime(2)?;
    let mut out = Vec::new();
    let g = Geometry::build(&z, &z, Variant::Check, opts.tensor_cap, opts.completion_cap)?;
    out.extend(g.verify_hidden());
    out.push(g.verify_lambda_pattern());
    out.extend(g.verify_consistency());
    out.extend(g.verify_projective());
    let w = Geometry::build(&z, &z, Variant::Widecheck, opts.tensor_cap, opts.completion_cap)?;
    out.extend(w.verify_ortho());
    Ok(out)
}

pub fn covering_suite(opts: &Options) -> Result<Vec<Check>> {
    let z = RealSpace::zprime(2)?;
    let t = TensorProduct::build(&z, &z, opts.tensor_cap)?;
    Ok(verify_covering(&t))
}

// ---------------------------------------------------------------- non-completeness

/// A family together with its pre-closure growth chain.
pub type GrowthChain = (Vec<Id>, Vec<Vec<Id>>);

/// The first `K̂` family of at most three reals whose `cl_c` leaves `𝒦`, with its chain.
pub fn noncomplete_witness(rs: &RealSpace) -> Result<Option<GrowthChain>> {
    let s = rs.space();
    let pool: Vec<Id> = (0..s.n()).filter(|&x| x != s.bottom()).collect();
    for k in 2..=3 {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let u: Vec<Id> = idx.iter().map(|&i| pool[i]).collect();
            if in_k_hat(rs, &u) && !is_admissible(rs, &u)? {
                return Ok(Some((u.clone(), closure_chain(rs, &u)?)));
            }
            let mut i = k;
            while i > 0 && idx[i - 1] == pool.len() - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(None)
}

pub fn noncompleteness_suite(opts: &Options) -> Result<Vec<Check>> {
    let z = RealSpace::zprime(2)?;
    let t = TensorProduct::build(&z, &z, opts.tensor_cap)?;
    let w = noncomplete_witness(t.real())?;
    let s = t.space();
    let witness = match &w {
        Some((u, chain)) => {
            let steps: Vec<String> = chain.iter().map(|c| format!("{:?}", names(s, c))).collect();
            format!("U = {:?}; chain: {}", names(s, u), steps.join(" → "))
        }
        None => "no inadmissible K̂ family of size ≤ 3".into(),
    };
    Ok(vec![Check::verdict(
        "noncomplete-tensor",
        "a K̂ family of the two-qubit reals whose closure leaves 𝒦",
        w.is_some(),
        witness,
    )])
}
