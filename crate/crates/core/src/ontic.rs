//! Ontic completion: pre-closure, closure, admissibility and the completed space.

use std::collections::HashMap;
use std::sync::Mutex;

use fixedbitset::FixedBitSet;

use crate::error::{input, Error, Result};
use crate::order::{Id, StateSpace};
use crate::real::{RealSpace, RealStructureEmbedding};

/// Default cap on antichain candidates visited while enumerating a completion.
pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureMode {
    Pre,
    Full,
}

fn check_set(rs: &RealSpace, u: &[Id]) -> Result<()> {
    if u.is_empty() {
        return input("closure of an empty family");
    }
    for &x in u {
        rs.space().check(x)?;
    }
    if u.len() > 1 && u.contains(&rs.space().bottom()) {
        return input("bottom inside a family of several states");
    }
    Ok(())
}

/// `𝔠(U)`: the maximal joins of bounded families below `U`. Any bounded family is
/// bounded by a pure `p`, and its join then sits below `⊔_u (u ⊓ p)`, so only those
/// per-pure joins need to be formed.
pub fn pre_closure(rs: &RealSpace, u: &[Id]) -> Result<Vec<Id>> {
    check_set(rs, u)?;
    Ok(pre_closure_unchecked(rs.space(), u))
}

pub(crate) fn pre_closure_unchecked(s: &StateSpace, u: &[Id]) -> Vec<Id> {
    let mut cands = Vec::with_capacity(s.maximal().len());
    for &p in s.maximal() {
        let mut j = s.bottom();
        for &x in u {
            j = s.join(j, s.meet(x, p)).expect("bounded by a pure");
        }
        cands.push(j);
    }
    s.max_of(cands)
}

pub(crate) fn closure_unchecked(s: &StateSpace, u: &[Id]) -> Vec<Id> {
    let mut cur = s.max_of(u.iter().copied());
    for _ in 0..=s.n() {
        let next = pre_closure_unchecked(s, &cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
    unreachable!("pre-closure failed to stabilise")
}

/// `𝔠(U)` or its fixed point `cl_c(U)`. Results are sorted antichains.
pub fn closure(rs: &RealSpace, u: &[Id], mode: ClosureMode) -> Result<Vec<Id>> {
    check_set(rs, u)?;
    Ok(match mode {
        ClosureMode::Pre => pre_closure_unchecked(rs.space(), u),
        ClosureMode::Full => closure_unchecked(rs.space(), u),
    })
}

/// The successive pre-closure iterates of `U`, ending at the fixed point.
pub fn closure_chain(rs: &RealSpace, u: &[Id]) -> Result<Vec<Vec<Id>>> {
    check_set(rs, u)?;
    let s = rs.space();
    let mut chain = vec![s.max_of(u.iter().copied())];
    loop {
        let next = pre_closure_unchecked(s, chain.last().unwrap());
        if &next == chain.last().unwrap() {
            return Ok(chain);
        }
        chain.push(next);
    }
}

/// Membership in `𝒦`: no `x, y` in `U` with `x* ⊑ y`.
pub fn in_k(rs: &RealSpace, u: &[Id]) -> bool {
    let s = rs.space();
    !u.iter().any(|&x| {
        rs.star(x)
            .is_some_and(|xs| u.iter().any(|&y| s.leq(xs, y)))
    })
}

/// Membership in `K̂`: non-bottom members, no `x* ⊑ y`, distinct members unbounded.
pub fn in_k_hat(rs: &RealSpace, u: &[Id]) -> bool {
    let s = rs.space();
    !u.contains(&s.bottom())
        && in_k(rs, u)
        && u.iter()
            .all(|&x| u.iter().all(|&y| x == y || !s.bounded(x, y)))
}

pub fn is_admissible(rs: &RealSpace, u: &[Id]) -> Result<bool> {
    let c = closure(rs, u, ClosureMode::Full)?;
    Ok(in_k(rs, &c))
}

/// `U ⊑ V`: every member of `U` sits below some member of `V`.
pub fn set_leq(s: &StateSpace, u: &[Id], v: &[Id]) -> bool {
    u.iter().all(|&x| v.iter().any(|&y| s.leq(x, y)))
}

/// The materialised maximal ontic completion of a real space.
#[derive(Clone, Debug)]
pub struct Completion {
    base: RealSpace,
    sets: Vec<Vec<Id>>,
    index: HashMap<Vec<Id>, Id>,
    emb: RealStructureEmbedding,
    of_base: Vec<Id>,
}

impl Completion {
    /// Breadth-first enumeration from the real singletons: every admissible closed
    /// antichain is reached by adding one real at a time, since admissibility passes
    /// to smaller families.
    pub fn enumerate(rs: &RealSpace, cap: usize) -> Result<Completion> {
        let s = rs.space();
        let bot = s.bottom();
        let reals: Vec<Id> = (0..s.n()).filter(|&x| x != bot).collect();
        let mut found: HashMap<Vec<Id>, ()> = HashMap::new();
        let mut hidden: Vec<Vec<Id>> = Vec::new();
        let mut frontier: Vec<Vec<Id>> = reals.iter().map(|&r| vec![r]).collect();
        let mut visited = 0usize;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for u in &frontier {
                for &r in &reals {
                    if u.iter().any(|&x| s.leq(r, x)) {
                        continue;
                    }
                    visited += 1;
                    if visited > cap {
                        return Err(Error::Cap {
                            what: "completion antichain candidates".into(),
                            limit: cap,
                            count: hidden.len() + s.n(),
                        });
                    }
                    let mut w = u.clone();
                    w.push(r);
                    let c = closure_unchecked(s, &w);
                    if c.len() < 2 || found.contains_key(&c) || !in_k(rs, &c) {
                        continue;
                    }
                    found.insert(c.clone(), ());
                    hidden.push(c.clone());
                    next.push(c);
                }
            }
            frontier = next;
        }
        hidden.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut sets: Vec<Vec<Id>> = vec![vec![bot]];
        sets.extend(reals.iter().map(|&r| vec![r]));
        sets.extend(hidden);
        Completion::from_sets(rs.clone(), sets)
    }

    fn from_sets(base: RealSpace, sets: Vec<Vec<Id>>) -> Result<Completion> {
        let s = base.space();
        let index: HashMap<Vec<Id>, Id> =
            sets.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
        let labels: Vec<String> = sets
            .iter()
            .map(|u| {
                if u.len() == 1 {
                    s.label(u[0]).to_string()
                } else {
                    let names: Vec<&str> = u.iter().map(|&x| s.label(x)).collect();
                    format!("{{{}}}", names.join(","))
                }
            })
            .collect();
        let ambient = StateSpace::from_leq(labels, |i, j| set_leq(s, &sets[i], &sets[j]))?;
        let mut of_base = vec![0; s.n()];
        let mut real = FixedBitSet::with_capacity(sets.len());
        for (i, u) in sets.iter().enumerate() {
            if u.len() == 1 {
                of_base[u[0]] = i;
                real.insert(i);
            }
        }
        let mut star = vec![None; sets.len()];
        for x in 0..s.n() {
            if let Some(y) = base.star(x) {
                star[of_base[x]] = Some(of_base[y]);
            }
        }
        Ok(Completion {
            emb: RealStructureEmbedding { ambient, real, star },
            base,
            sets,
            index,
            of_base,
        })
    }

    pub fn base(&self) -> &RealSpace {
        &self.base
    }

    pub fn space(&self) -> &StateSpace {
        &self.emb.ambient
    }

    pub fn embedding(&self) -> &RealStructureEmbedding {
        &self.emb
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    /// `Θ(x)` as base ids; the canonical antichain of `x`.
    pub fn theta(&self, x: Id) -> &[Id] {
        &self.sets[x]
    }

    /// Completion id of a base element.
    pub fn of_base(&self, b: Id) -> Id {
        self.of_base[b]
    }

    /// Base id of a real completion element.
    pub fn to_base(&self, x: Id) -> Option<Id> {
        (self.sets[x].len() == 1).then(|| self.sets[x][0])
    }

    pub fn is_real(&self, x: Id) -> bool {
        self.sets[x].len() == 1
    }

    pub fn hidden(&self) -> Vec<Id> {
        (0..self.n()).filter(|&x| !self.is_real(x)).collect()
    }

    pub fn lookup(&self, u: &[Id]) -> Option<Id> {
        self.index.get(u).copied()
    }

    /// `Λ(U)`: the element whose antichain is `cl_c(U)`, if admissible.
    pub fn lambda(&self, u: &[Id]) -> Option<Id> {
        let s = self.base.space();
        let nb: Vec<Id> = u.iter().copied().filter(|&x| x != s.bottom()).collect();
        if nb.is_empty() {
            return Some(self.of_base(s.bottom()));
        }
        let c = closure_unchecked(s, &nb);
        if !in_k(&self.base, &c) {
            return None;
        }
        self.lookup(&c)
    }

    /// Meet by the explicit formula: `Max` of the pairwise base meets.
    pub fn meet_formula(&self, x: Id, y: Id) -> Vec<Id> {
        let s = self.base.space();
        let mut m = Vec::new();
        for &u in &self.sets[x] {
            for &v in &self.sets[y] {
                m.push(s.meet(u, v));
            }
        }
        s.max_of(m)
    }

    /// Join by the explicit formula: `cl_c` of the union when admissible.
    pub fn join_formula(&self, x: Id, y: Id) -> Option<Vec<Id>> {
        let s = self.base.space();
        let mut u: Vec<Id> = self.sets[x].iter().chain(&self.sets[y]).copied().collect();
        u.retain(|&z| z != s.bottom());
        if u.is_empty() {
            return Some(vec![s.bottom()]);
        }
        let c = closure_unchecked(s, &u);
        in_k(&self.base, &c).then_some(c)
    }

    pub fn meet(&self, x: Id, y: Id) -> Id {
        self.space().meet(x, y)
    }

    pub fn join(&self, x: Id, y: Id) -> Option<Id> {
        self.space().join(x, y)
    }

    /// Linearity, quantified over the completion.
    pub fn is_linear(&self) -> bool {
        let b = self.base.space();
        let s = self.space();
        let pures = b.maximal();
        for (i, &p1) in pures.iter().enumerate() {
            for &p2 in &pures[i + 1..] {
                let m = b.meet(p1, p2);
                if !(b.covers(m, p1) && b.covers(m, p2)) {
                    continue;
                }
                let (c1, c2, cm) = (self.of_base(p1), self.of_base(p2), self.of_base(m));
                let ok = (0..self.n())
                    .any(|z| !s.leq(c1, z) && !s.leq(c2, z) && s.covers(cm, z));
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// Linearity witness for a pair of pures, for reporting.
    pub fn linear_witness(&self, p1: Id, p2: Id) -> Option<Id> {
        let b = self.base.space();
        let s = self.space();
        let (c1, c2, cm) = (self.of_base(p1), self.of_base(p2), self.of_base(b.meet(p1, p2)));
        (0..self.n()).find(|&z| !s.leq(c1, z) && !s.leq(c2, z) && s.covers(cm, z))
    }
}

/// Lifts a real morphism `f: A → B` (base ids) to the completions.
pub fn lift_morphism(f: &[Id], ca: &Completion, cb: &Completion) -> Result<Vec<Id>> {
    if f.len() != ca.base().n() {
        return input("morphism has the wrong domain size");
    }
    let mut out = Vec::with_capacity(ca.n());
    for x in 0..ca.n() {
        let image: Vec<Id> = ca.theta(x).iter().map(|&w| f[w]).collect();
        let y = lift_image(cb, &image).ok_or_else(|| {
            Error::Lift(format!(
                "image of {} is not admissible in the target",
                ca.space().label(x)
            ))
        })?;
        out.push(y);
    }
    Ok(out)
}

/// `Λ` of an image family, bottoms dropped.
pub fn lift_image(cb: &Completion, image: &[Id]) -> Option<Id> {
    cb.lambda(image)
}

/// Completion queries without materialising the element set.
#[derive(Debug)]
pub struct LazyCompletion<'a> {
    base: &'a RealSpace,
    memo: Mutex<HashMap<Vec<Id>, Option<Vec<Id>>>>,
}

impl<'a> LazyCompletion<'a> {
    pub fn new(base: &'a RealSpace) -> LazyCompletion<'a> {
        LazyCompletion { base, memo: Mutex::new(HashMap::new()) }
    }

    pub fn base(&self) -> &RealSpace {
        self.base
    }

    /// Canonical antichain of `Λ(U)`, or `None` when `U` is not admissible.
    pub fn canonical(&self, u: &[Id]) -> Option<Vec<Id>> {
        let s = self.base.space();
        let mut key: Vec<Id> = u.iter().copied().filter(|&x| x != s.bottom()).collect();
        key.sort_unstable();
        key.dedup();
        if key.is_empty() {
            return Some(vec![s.bottom()]);
        }
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let c = closure_unchecked(s, &key);
        let r = in_k(self.base, &c).then_some(c);
        self.memo.lock().unwrap().insert(key, r.clone());
        r
    }

    pub fn leq(&self, u: &[Id], v: &[Id]) -> bool {
        set_leq(self.base.space(), u, v)
    }

    pub fn meet(&self, u: &[Id], v: &[Id]) -> Vec<Id> {
        let s = self.base.space();
        let mut m = Vec::new();
        for &x in u {
            for &y in v {
                m.push(s.meet(x, y));
            }
        }
        let m = s.max_of(m);
        self.canonical(&m).expect("meets of admissible families stay admissible")
    }

    pub fn join(&self, u: &[Id], v: &[Id]) -> Option<Vec<Id>> {
        let w: Vec<Id> = u.iter().chain(v).copied().collect();
        self.canonical(&w)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zprime_two_completion() {
        let z = RealSpace::zprime(2).unwrap();
        let c = Completion::enumerate(&z, DEFAULT_CAP).unwrap();
        assert_eq!(c.n(), 9);
        assert_eq!(c.hidden().len(), 4);
        let s = c.space();
        let ab = s.id("{a,b}").unwrap();
        let abs = s.id("{a,b*}").unwrap();
        assert_eq!(s.label(c.meet(ab, abs)), "a");
        let (a, b) = (s.id("a").unwrap(), s.id("b").unwrap());
        assert_eq!(c.join(a, b), Some(ab));
        assert!(c.join(a, s.id("a*").unwrap()).is_none());
        assert!(c.is_linear());
    }

    #[test]
    fn simplex_has_no_hidden_states() {
        let z = RealSpace::simplex(3).unwrap();
        let c = Completion::enumerate(&z, DEFAULT_CAP).unwrap();
        assert!(c.hidden().is_empty());
        assert!(!c.is_linear());
    }

    #[test]
    fn zprime_three_hidden_count() {
        let z = RealSpace::zprime(3).unwrap();
        let c = Completion::enumerate(&z, DEFAULT_CAP).unwrap();
        assert_eq!(c.hidden().len(), 20);
    }

    #[test]
    fn star_pair_inadmissible() {
        let z = RealSpace::zprime(2).unwrap();
        let a = z.space().id("a").unwrap();
        assert!(!is_admissible(&z, &[a, z.star(a).unwrap()]).unwrap());
        assert_eq!(closure(&z, &[a], ClosureMode::Full).unwrap(), vec![a]);
    }

    #[test]
    fn lazy_agrees_with_enumeration() {
        let z = RealSpace::zprime(2).unwrap();
        let c = Completion::enumerate(&z, DEFAULT_CAP).unwrap();
        let lazy = LazyCompletion::new(&z);
        for x in 0..c.n() {
            for y in 0..c.n() {
                assert_eq!(lazy.meet(c.theta(x), c.theta(y)), c.theta(c.meet(x, y)));
                assert_eq!(
                    lazy.join(c.theta(x), c.theta(y)),
                    c.join(x, y).map(|j| c.theta(j).to_vec())
                );
            }
        }
    }
}
