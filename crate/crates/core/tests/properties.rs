//! Invariants as properties over randomly drawn inputs.

use std::sync::OnceLock;

use proptest::prelude::*;
use qlattice::ontic::{closure, in_k, set_leq, ClosureMode};
use qlattice::quantum::LambdaScan;
use qlattice::tensor::{Pair, TensorProduct, DEFAULT_TENSOR_CAP};
use qlattice::{BoolVal, Id, RealSpace};

fn two_qubits() -> &'static TensorProduct {
    static T: OnceLock<TensorProduct> = OnceLock::new();
    T.get_or_init(|| {
        let z = RealSpace::zprime(2).unwrap();
        TensorProduct::build(&z, &z, DEFAULT_TENSOR_CAP).unwrap()
    })
}

fn scan() -> &'static LambdaScan {
    static S: OnceLock<LambdaScan> = OnceLock::new();
    S.get_or_init(LambdaScan::new)
}

fn boolval() -> impl Strategy<Value = BoolVal> {
    prop_oneof![Just(BoolVal::Yes), Just(BoolVal::No), Just(BoolVal::Bot)]
}

fn family(n: usize) -> impl Strategy<Value = Vec<Id>> {
    prop::collection::btree_set(1..n, 1..6).prop_map(|s| s.into_iter().collect())
}

fn gens() -> impl Strategy<Value = Vec<Pair>> {
    prop::collection::vec((0usize..5, 0usize..5), 1..4)
}

proptest! {
    #[test]
    fn bullet_distributes_over_meet(x in boolval(), y in boolval(), z in boolval()) {
        prop_assert_eq!(x.bullet(y.meet(z)), x.bullet(y).meet(x.bullet(z)));
        prop_assert_eq!(x.bullet(y), y.bullet(x));
        prop_assert_eq!(x.bar().bar(), x);
    }

    #[test]
    fn closure_is_extensive_and_idempotent(u in family(113)) {
        let rs = two_qubits().real();
        let c = closure(rs, &u, ClosureMode::Full).unwrap();
        prop_assert!(set_leq(rs.space(), &u, &c));
        prop_assert_eq!(closure(rs, &c, ClosureMode::Full).unwrap(), c);
    }

    #[test]
    fn closure_is_monotone(u in family(113), extra in family(113)) {
        let rs = two_qubits().real();
        let mut v = u.clone();
        v.extend(extra);
        v.sort_unstable();
        v.dedup();
        let cu = closure(rs, &u, ClosureMode::Full).unwrap();
        let cv = closure(rs, &v, ClosureMode::Full).unwrap();
        prop_assert!(set_leq(rs.space(), &cu, &cv));
    }

    #[test]
    fn normalize_agrees_with_congruence(g1 in gens(), g2 in gens()) {
        let t = two_qubits();
        let same = t.normalize(&g1).unwrap() == t.normalize(&g2).unwrap();
        prop_assert_eq!(same, t.congruence_oracle(&g1, &g2));
    }

    #[test]
    fn tensor_meet_is_generator_union(g1 in gens(), g2 in gens()) {
        let t = two_qubits();
        let mut g = g1.clone();
        g.extend(&g2);
        let (x, y) = (t.normalize(&g1).unwrap(), t.normalize(&g2).unwrap());
        prop_assert_eq!(t.meet(x, y), t.normalize(&g).unwrap());
    }

    #[test]
    fn partial_traces_of_pure_tensors(p in 1usize..5, q in 1usize..5) {
        let t = two_qubits();
        let x = t.pure(p, q).unwrap();
        prop_assert_eq!(t.partial_trace(x, 1).unwrap(), p);
        prop_assert_eq!(t.partial_trace(x, 2).unwrap(), q);
    }

    #[test]
    fn lambda_traces_preserve_meets(m1 in 1u16.., m2 in 1u16..) {
        let s = scan();
        let (a, b, ab) = (s.traces(m1), s.traces(m2), s.traces(m1 | m2));
        for k in 0..4 {
            prop_assert_eq!(ab[k], s.pair().meet(a[k], b[k]));
        }
    }

    #[test]
    fn closure_keeps_star_clashes(u in family(113)) {
        let rs = two_qubits().real();
        let c = closure(rs, &u, ClosureMode::Full).unwrap();
        if !in_k(rs, &u) {
            prop_assert!(!in_k(rs, &c));
        }
    }

    #[test]
    fn dot_round_trip(kind in prop_oneof![Just("zprime"), Just("simplex")], n in 2usize..5) {
        let rs = RealSpace::make(kind, n).unwrap();
        let back = RealSpace::from_dot(&rs.to_dot("s")).unwrap();
        prop_assert_eq!(back.to_json(), rs.to_json());
    }
}
