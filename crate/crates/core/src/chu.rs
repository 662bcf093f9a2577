//! Effects, evaluation, measurements and Chu morphisms.

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::order::{BoolVal, Id, StateSpace};
use crate::real::RealStructureEmbedding;

/// Ids of the boolean domain as built by [`crate::real::RealSpace::boolean`].
pub const B_BOT: Id = 0;
pub const B_YES: Id = 1;
pub const B_NO: Id = 2;

pub fn bool_id(v: BoolVal) -> Id {
    match v {
        BoolVal::Bot => B_BOT,
        BoolVal::Yes => B_YES,
        BoolVal::No => B_NO,
    }
}

pub fn bool_of_id(id: Id) -> BoolVal {
    match id {
        B_YES => BoolVal::Yes,
        B_NO => BoolVal::No,
        _ => BoolVal::Bot,
    }
}

/// `l(yes, no)`; `None` is the `·` part, which matches nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Effect {
    pub yes: Option<Id>,
    pub no: Option<Id>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EffectJson {
    pub yes: Option<String>,
    pub no: Option<String>,
}

impl Effect {
    /// `l(·,·)`, bottom of the effect space.
    pub const BOTTOM: Effect = Effect { yes: None, no: None };

    pub fn new(space: &StateSpace, yes: Option<Id>, no: Option<Id>) -> Result<Effect> {
        for x in [yes, no].into_iter().flatten() {
            space.check(x)?;
        }
        if let (Some(y), Some(n)) = (yes, no) {
            if space.bounded(y, n) {
                return input(format!(
                    "effect parts {} and {} have a common upper bound",
                    space.label(y),
                    space.label(n)
                ));
            }
        }
        Ok(Effect { yes, no })
    }

    /// `𝔜 = l(⊥,·)`, constantly YES.
    pub fn unit(space: &StateSpace) -> Effect {
        Effect { yes: Some(space.bottom()), no: None }
    }

    pub fn bar(self) -> Effect {
        Effect { yes: self.no, no: self.yes }
    }

    pub fn eval(&self, space: &StateSpace, x: Id) -> BoolVal {
        if self.yes.is_some_and(|y| space.leq(y, x)) {
            BoolVal::Yes
        } else if self.no.is_some_and(|n| space.leq(n, x)) {
            BoolVal::No
        } else {
            BoolVal::Bot
        }
    }

    pub fn label(&self, space: &StateSpace) -> String {
        let part = |p: Option<Id>| p.map_or("·".to_string(), |x| space.label(x).to_string());
        format!("l({},{})", part(self.yes), part(self.no))
    }

    pub fn to_json(&self, space: &StateSpace) -> EffectJson {
        EffectJson {
            yes: self.yes.map(|x| space.label(x).to_string()),
            no: self.no.map(|x| space.label(x).to_string()),
        }
    }

    pub fn from_json(space: &StateSpace, js: &EffectJson) -> Result<Effect> {
        let part = |p: &Option<String>| p.as_deref().map(|s| space.id_of(s)).transpose();
        Effect::new(space, part(&js.yes)?, part(&js.no)?)
    }
}

pub fn evaluate(space: &StateSpace, l: &Effect, x: Id) -> Result<BoolVal> {
    space.check(x)?;
    Ok(l.eval(space, x))
}

fn join_part(space: &StateSpace, a: Option<Id>, b: Option<Id>) -> Option<Id> {
    match (a, b) {
        (Some(a), Some(b)) => space.join(a, b),
        _ => None,
    }
}

fn meet_part(space: &StateSpace, a: Option<Id>, b: Option<Id>) -> Option<Id> {
    match (a, b) {
        (Some(a), Some(b)) => Some(space.meet(a, b)),
        (x, None) | (None, x) => x,
    }
}

/// Componentwise join where bounded, `·` otherwise.
pub fn effect_meet(space: &StateSpace, l1: &Effect, l2: &Effect) -> Effect {
    Effect {
        yes: join_part(space, l1.yes, l2.yes),
        no: join_part(space, l1.no, l2.no),
    }
}

pub fn effect_meet_all(space: &StateSpace, ls: &[Effect]) -> Effect {
    let mut it = ls.iter();
    let Some(first) = it.next() else {
        return Effect::unit(space);
    };
    it.fold(*first, |acc, l| effect_meet(space, &acc, l))
}

/// `l1 ⊑ l2` in the effect order.
pub fn effect_leq(space: &StateSpace, l1: &Effect, l2: &Effect) -> bool {
    effect_meet(space, l1, l2) == *l1
}

/// Least upper bound of two effects, when it exists.
pub fn effect_sup(space: &StateSpace, l1: &Effect, l2: &Effect) -> Option<Effect> {
    let yes = meet_part(space, l1.yes, l2.yes);
    let no = meet_part(space, l1.no, l2.no);
    if let (Some(y), Some(n)) = (yes, no) {
        if space.bounded(y, n) {
            return None;
        }
    }
    Some(Effect { yes, no })
}

/// The real effects: `l(σ,σ')` with `σ' ⊒ σ*`, the one-sided effects, and `l(·,·)`.
pub fn real_effects(emb: &RealStructureEmbedding) -> Vec<Effect> {
    let s = &emb.ambient;
    let bot = s.bottom();
    let reals = emb.reals();
    let mut out = vec![Effect::BOTTOM];
    for &x in &reals {
        out.push(Effect { yes: Some(x), no: None });
        out.push(Effect { yes: None, no: Some(x) });
        if x == bot {
            continue;
        }
        let st = emb.star[x].expect("star on non-bottom reals");
        for &y in &reals {
            if y != bot && s.leq(st, y) {
                out.push(Effect { yes: Some(x), no: Some(y) });
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Every valid effect of a space.
pub fn all_effects(space: &StateSpace) -> Result<Vec<Effect>> {
    let n = space.n();
    if (n + 1) * (n + 1) > 1 << 12 {
        return Err(Error::Cap {
            what: "effect enumeration".into(),
            limit: 1 << 12,
            count: (n + 1) * (n + 1),
        });
    }
    let parts: Vec<Option<Id>> = std::iter::once(None).chain((0..n).map(Some)).collect();
    let mut out = Vec::new();
    for &y in &parts {
        for &m in &parts {
            if let Ok(l) = Effect::new(space, y, m) {
                out.push(l);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `m_l`: the forward map into the boolean domain.
pub fn measurement(space: &StateSpace, l: &Effect) -> Vec<Id> {
    (0..space.n()).map(|x| bool_id(l.eval(space, x))).collect()
}

/// A forward map together with its derived dual on effects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChuMorphism {
    pub forward: Vec<Id>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismVerdict {
    pub ok: bool,
    pub witness: Option<(Id, Id)>,
}

/// Pairwise meet preservation; the smallest violating pair by id order is reported.
pub fn check_morphism(src: &StateSpace, tgt: &StateSpace, f: &[Id]) -> MorphismVerdict {
    if f.len() != src.n() || f.iter().any(|&y| y >= tgt.n()) {
        return MorphismVerdict { ok: false, witness: None };
    }
    for a in 0..src.n() {
        for b in a..src.n() {
            if f[src.meet(a, b)] != tgt.meet(f[a], f[b]) {
                return MorphismVerdict { ok: false, witness: Some((a, b)) };
            }
        }
    }
    MorphismVerdict { ok: true, witness: None }
}

impl ChuMorphism {
    pub fn dualize(src: &StateSpace, tgt: &StateSpace, f: Vec<Id>) -> Result<ChuMorphism> {
        let v = check_morphism(src, tgt, &f);
        if !v.ok {
            return Err(match v.witness {
                Some((a, b)) => Error::NotHomomorphism(format!(
                    "meet of ({},{}) not preserved",
                    src.label(a),
                    src.label(b)
                )),
                None => Error::NotHomomorphism("map has wrong shape".into()),
            });
        }
        Ok(ChuMorphism { forward: f })
    }

    pub fn identity(space: &StateSpace) -> ChuMorphism {
        ChuMorphism { forward: (0..space.n()).collect() }
    }

    /// The unique effect on the source with `ε_{dual(l)}(σ) = ε_l(f(σ))`.
    pub fn dual(&self, src: &StateSpace, tgt: &StateSpace, l: &Effect) -> Effect {
        let least = |part: Option<Id>| -> Option<Id> {
            let p = part?;
            let pre: Vec<Id> = (0..src.n()).filter(|&x| tgt.leq(p, self.forward[x])).collect();
            src.meet_all(&pre).ok()
        };
        Effect { yes: least(l.yes), no: least(l.no) }
    }

    /// `self` then `g`.
    pub fn then(&self, g: &ChuMorphism) -> ChuMorphism {
        ChuMorphism { forward: self.forward.iter().map(|&x| g.forward[x]).collect() }
    }

    pub fn pointwise_meet(&self, other: &ChuMorphism, tgt: &StateSpace) -> ChuMorphism {
        ChuMorphism {
            forward: self
                .forward
                .iter()
                .zip(&other.forward)
                .map(|(&a, &b)| tgt.meet(a, b))
                .collect(),
        }
    }

    /// Duality on every source state and every listed target effect.
    pub fn duality_holds(&self, src: &StateSpace, tgt: &StateSpace, effects: &[Effect]) -> bool {
        effects.iter().all(|l| {
            let d = self.dual(src, tgt, l);
            (0..src.n()).all(|x| d.eval(src, x) == l.eval(tgt, self.forward[x]))
        })
    }
}

/// Recovers the state whose evaluations reproduce `b` on the real effects.
pub fn state_from_effect_map<F>(emb: &RealStructureEmbedding, b: F) -> Result<Id>
where
    F: Fn(&Effect) -> BoolVal,
{
    let s = &emb.ambient;
    let effects = real_effects(emb);
    let yes: Vec<Effect> = effects.iter().copied().filter(|l| b(l) == BoolVal::Yes).collect();
    let lb = effect_meet_all(s, &yes);
    let Some(sigma) = lb.yes else {
        return Err(Error::NotHomomorphism(
            "YES-effects have no common yes part".into(),
        ));
    };
    for l in &effects {
        if l.eval(s, sigma) != b(l) {
            return Err(Error::NotHomomorphism(format!(
                "value at {} not realised by {}",
                l.label(s),
                s.label(sigma)
            )));
        }
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::RealSpace;

    #[test]
    fn evaluation_basics() {
        let z = RealSpace::zprime(2).unwrap();
        let s = z.space();
        let a = s.id("a").unwrap();
        let b = s.id("b").unwrap();
        let l = Effect::new(s, Some(a), z.star(a)).unwrap();
        assert_eq!(l.eval(s, a), BoolVal::Yes);
        assert_eq!(l.eval(s, b), BoolVal::Bot);
        for x in 0..s.n() {
            assert_eq!(Effect::unit(s).eval(s, x), BoolVal::Yes);
            assert_eq!(l.bar().eval(s, x), l.eval(s, x).bar());
        }
    }

    #[test]
    fn meet_of_unbounded_yes_parts() {
        let z = RealSpace::zprime(2).unwrap();
        let s = z.space();
        let (a, b) = (s.id("a").unwrap(), s.id("b").unwrap());
        let la = Effect { yes: Some(a), no: None };
        let lb = Effect { yes: Some(b), no: None };
        assert_eq!(effect_meet(s, &la, &lb), Effect::BOTTOM);
        assert_eq!(effect_meet(s, &la, &Effect::unit(s)), la);
    }

    #[test]
    fn sup_in_simplex() {
        let z = RealSpace::simplex(3).unwrap();
        let s = z.space();
        let u = |n: &str| s.id(n).unwrap();
        let l1 = Effect::new(s, Some(u("u1")), Some(u("u2"))).unwrap();
        let l2 = Effect::new(s, Some(u("u2")), Some(u("u3"))).unwrap();
        assert_eq!(effect_sup(s, &l1, &l2), None);
        assert_eq!(effect_sup(s, &l1, &l1), Some(l1));
    }

    #[test]
    fn real_effect_count() {
        let z = RealSpace::zprime(2).unwrap();
        assert_eq!(real_effects(&z.embedding()).len(), 15);
    }

    #[test]
    fn measurement_dual() {
        let z = RealSpace::zprime(2).unwrap();
        let b = RealSpace::boolean();
        let s = z.space();
        let a = s.id("a").unwrap();
        let l = Effect::new(s, Some(a), z.star(a)).unwrap();
        let m = ChuMorphism::dualize(s, b.space(), measurement(s, &l)).unwrap();
        let lyn = Effect { yes: Some(B_YES), no: Some(B_NO) };
        assert_eq!(m.dual(s, b.space(), &lyn), l);
        assert!(m.duality_holds(s, b.space(), &all_effects(b.space()).unwrap()));
    }

    #[test]
    fn star_is_not_a_morphism() {
        let z = RealSpace::zprime(2).unwrap();
        let s = z.space();
        let f: Vec<Id> = (0..s.n()).map(|x| z.star(x).unwrap_or(x)).collect();
        // bottom fixed, pures swapped: meets survive, so reverse the order instead
        let v = check_morphism(s, s, &f);
        assert!(v.ok);
        let z3 = RealSpace::simplex(3).unwrap();
        let t = z3.space();
        let g: Vec<Id> = (0..t.n()).map(|x| z3.star(x).unwrap_or(x)).collect();
        assert!(!check_morphism(t, t, &g).ok);
    }

    #[test]
    fn state_recovered_from_evaluations() {
        let z = RealSpace::zprime(2).unwrap();
        let emb = z.embedding();
        let s = z.space();
        for x in 0..s.n() {
            assert_eq!(state_from_effect_map(&emb, |l| l.eval(s, x)).unwrap(), x);
        }
    }
}
