//! Brute-force oracles, written independently of the library algorithms, with
//! their outputs frozen.

use std::collections::BTreeSet;

use qlattice::chu::{measurement, Effect, B_BOT, B_NO, B_YES};
use qlattice::ontic::{closure, ClosureMode, Completion, DEFAULT_CAP};
use qlattice::quantum::{BellScenario, LambdaScan, MARGINALS};
use qlattice::tensor::{TensorProduct, DEFAULT_TENSOR_CAP};
use qlattice::verify::preclosure_lattice;
use qlattice::{Id, RealSpace, StateSpace};

/// A 𝔅⊗𝔅 element as the set of pure outcome pairs (y/n, y/n) above it.
type Outcomes = BTreeSet<(bool, bool)>;

fn vals(b: Id) -> Vec<bool> {
    match b {
        B_YES => vec![true],
        B_NO => vec![false],
        _ => vec![true, false],
    }
}

fn product(x: Id, y: Id) -> Outcomes {
    let mut out = Outcomes::new();
    for a in vals(x) {
        for b in vals(y) {
            out.insert((a, b));
        }
    }
    out
}

fn outcomes_of(bb: &TensorProduct, z: Id) -> Outcomes {
    bb.generators(z).iter().flat_map(|&(x, y)| product(x, y)).collect()
}

fn bb() -> TensorProduct {
    let b = RealSpace::boolean();
    TensorProduct::build(&b, &b, DEFAULT_TENSOR_CAP).unwrap()
}

/// `𝔠` straight from its definition: joins of every bounded family below `U`, maximised.
fn preclosure_by_definition(s: &StateSpace, u: &[Id]) -> Vec<Id> {
    let below: Vec<Id> = (0..s.n()).filter(|&x| u.iter().any(|&y| s.leq(x, y))).collect();
    let mut joins = BTreeSet::new();
    for mask in 1u32..1 << below.len() {
        let v: Vec<Id> = (0..below.len()).filter(|i| mask >> i & 1 == 1).map(|i| below[i]).collect();
        let ub: Vec<Id> = (0..s.n()).filter(|&z| v.iter().all(|&x| s.leq(x, z))).collect();
        if let Some(&j) = ub.iter().find(|&&j| ub.iter().all(|&z| s.leq(j, z))) {
            joins.insert(j);
        }
    }
    let joins: Vec<Id> = joins.into_iter().collect();
    joins.iter().copied().filter(|&x| !joins.iter().any(|&y| y != x && s.leq(x, y))).collect()
}

#[test]
fn preclosure_matches_definition_on_the_ten_element_lattice() {
    let s = preclosure_lattice();
    let rs = RealSpace::unchecked(s.clone(), vec![None; s.n()]);
    let mut checked = 0;
    for mask in 1u32..1 << s.n() {
        let u: Vec<Id> = (0..s.n()).filter(|&i| mask >> i & 1 == 1).collect();
        if u.len() > 1 && u.contains(&s.bottom()) {
            continue;
        }
        let lib = closure(&rs, &u, ClosureMode::Pre).unwrap();
        assert_eq!(lib, preclosure_by_definition(&s, &u), "U = {u:?}");
        checked += 1;
    }
    assert_eq!(checked, 512);
    let id = |l: &str| s.id(l).unwrap();
    let once = preclosure_by_definition(&s, &[id("u1"), id("u2"), id("u3")]);
    let twice = preclosure_by_definition(&s, &once);
    let lab = |v: &[Id]| v.iter().map(|&x| s.label(x)).collect::<BTreeSet<_>>();
    assert_eq!(lab(&once), ["w", "y", "z"].into());
    assert_eq!(lab(&twice), ["w", "x", "y", "z"].into());
}

#[test]
fn bell_marginals_by_outcome_sets() {
    let bb = bb();
    let sc = BellScenario::new(2, 2, DEFAULT_TENSOR_CAP).unwrap();
    let t = &sc.tensor;
    let lib = sc.marginals(&bb).unwrap();
    for (k, &(i, j)) in MARGINALS.iter().enumerate() {
        let (f, g) = (&sc.phi[i], &sc.rho[j - 2]);
        // Image of each real part, then the intersection of the non-trivial ones.
        let mut acc: Option<Outcomes> = None;
        for &w in &sc.sigma {
            let img: Outcomes = t.generators(w).iter().flat_map(|&(s, u)| product(f[s], g[u])).collect();
            if img.len() < 4 {
                acc = Some(match acc {
                    None => img,
                    Some(a) => a.intersection(&img).copied().collect(),
                });
            }
        }
        let expect = acc.unwrap_or_else(|| product(B_BOT, B_BOT));
        assert_eq!(outcomes_of(&bb, lib[k]), expect, "marginal {k}");
    }
    // Frozen: Φ13, Φ14, Φ23, Φ24 as outcome sets.
    let frozen: [&[(bool, bool)]; 4] = [
        &[(false, false), (false, true), (true, false)],
        &[(false, true), (true, false), (true, true)],
        &[(false, true), (true, false), (true, true)],
        &[(false, false), (false, true), (true, false), (true, true)],
    ];
    for k in 0..4 {
        assert_eq!(outcomes_of(&bb, lib[k]), frozen[k].iter().copied().collect::<Outcomes>());
    }
}

/// Scans every nonempty set of pure 4-tuples, comparing projected outcome sets.
fn lambda_by_projection(targets: &[Outcomes; 4]) -> Vec<u16> {
    let mut hits = Vec::new();
    for mask in 1u32..1 << 16 {
        let ok = MARGINALS.iter().enumerate().all(|(k, &(i, j))| {
            let proj: Outcomes = (0..16)
                .filter(|t| mask >> t & 1 == 1)
                .map(|t| (t >> i & 1 == 1, t >> j & 1 == 1))
                .collect();
            proj == targets[k]
        });
        if ok {
            hits.push(mask as u16);
        }
    }
    hits
}

#[test]
fn lambda_scan_agrees_with_projection_oracle() {
    let bb = bb();
    let scan = LambdaScan::new();
    let sc = BellScenario::new(2, 2, DEFAULT_TENSOR_CAP).unwrap();
    let phi = sc.marginals(&bb).unwrap();
    let targets = phi.map(|z| outcomes_of(&bb, z));
    assert!(lambda_by_projection(&targets).is_empty());
    assert_eq!(scan.search(&phi), None);

    // A product state: the oracle's smallest witness is the scan's.
    let t = &sc.tensor;
    let x = t.pure(1, 3).unwrap();
    let phi = sc.marginals_of(&[x], &bb).unwrap();
    let hits = lambda_by_projection(&phi.map(|z| outcomes_of(&bb, z)));
    assert_eq!(hits.len(), 1);
    assert_eq!(scan.search(&phi), Some(hits[0]));
    assert_eq!(sc.real_witness(x), hits[0]);
}

/// All maps `S → 𝔅⊗𝔅` that preserve meets and have the given marginals.
fn joint_maps(s: &StateSpace, bb: &TensorProduct, m1: &[Id], m2: &[Id]) -> usize {
    let outcome: Vec<Outcomes> = (0..bb.n()).map(|z| outcomes_of(bb, z)).collect();
    let marg = |o: &Outcomes, side: usize| -> Id {
        let vs: BTreeSet<bool> = o.iter().map(|p| if side == 0 { p.0 } else { p.1 }).collect();
        match (vs.contains(&true), vs.contains(&false)) {
            (true, false) => B_YES,
            (false, true) => B_NO,
            _ => B_BOT,
        }
    };
    let cands: Vec<Vec<Id>> = (0..s.n())
        .map(|x| (0..bb.n()).filter(|&z| marg(&outcome[z], 0) == m1[x] && marg(&outcome[z], 1) == m2[x]).collect())
        .collect();
    let mut count = 0;
    let mut pick = vec![0usize; s.n()];
    loop {
        let f: Vec<Id> = (0..s.n()).map(|x| cands[x][pick[x]]).collect();
        let meet_ok = (0..s.n()).all(|a| {
            (0..s.n()).all(|b| {
                let m: Outcomes = outcome[f[a]].union(&outcome[f[b]]).copied().collect();
                outcome[f[s.meet(a, b)]] == m
            })
        });
        count += meet_ok as usize;
        let mut i = 0;
        loop {
            if i == s.n() {
                return count;
            }
            pick[i] += 1;
            if pick[i] < cands[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn no_joint_map_for_two_sharp_measurements_on_zprime() {
    let bb = bb();
    for n in [2, 3] {
        let z = RealSpace::zprime(n).unwrap();
        let s = z.space();
        let (a, b) = (s.id("a").unwrap(), s.id("b").unwrap());
        let m1 = measurement(s, &Effect::new(s, Some(a), z.star(a)).unwrap());
        let m2 = measurement(s, &Effect::new(s, Some(b), z.star(b)).unwrap());
        assert_eq!(joint_maps(s, &bb, &m1, &m2), 0, "Z'{n}");
    }
}

#[test]
fn boolean_copy_is_the_only_joint_map_for_identity_marginals() {
    let bb = bb();
    let b = RealSpace::boolean();
    let id: Vec<Id> = (0..3).collect();
    assert_eq!(joint_maps(b.space(), &bb, &id, &id), 1);
}

#[test]
fn frozen_completion_sizes() {
    let z2 = RealSpace::zprime(2).unwrap();
    let z3 = RealSpace::zprime(3).unwrap();
    assert_eq!(Completion::enumerate(&z2, DEFAULT_CAP).unwrap().n(), 9);
    assert_eq!(Completion::enumerate(&z3, DEFAULT_CAP).unwrap().n(), 27);
    let t = TensorProduct::build(&z2, &z2, DEFAULT_TENSOR_CAP).unwrap();
    assert_eq!(t.n(), 113);
    assert_eq!(Completion::enumerate(t.real(), DEFAULT_CAP).unwrap().n(), 217);
    let t3 = TensorProduct::build(&z3, &z3, DEFAULT_TENSOR_CAP).unwrap();
    assert_eq!(t3.n(), 535);
}
