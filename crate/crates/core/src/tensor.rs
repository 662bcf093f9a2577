//! Minimal tensor product of real spaces, kept in canonical underline form.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::chu::real_effects;
use crate::error::{input, Error, Result};
use crate::order::{BoolVal, Id, StateSpace};
use crate::real::RealSpace;

/// A generator `σ_A ⊗ σ_B` given by factor ids.
pub type Pair = (Id, Id);

/// Default cap on enumerated tensor elements.
pub const DEFAULT_TENSOR_CAP: usize = 100_000;

/// Expansion-formula test: does `⊓_i gens_i` lie below `t`? Searches for a split
/// `K, I∖K` with both partial meets off target; an empty meet is off target.
pub fn dominates(a: &StateSpace, b: &StateSpace, gens: &[Pair], t: Pair) -> bool {
    fn dfs(
        a: &StateSpace,
        b: &StateSpace,
        gens: &[Pair],
        t: Pair,
        i: usize,
        ma: Option<Id>,
        mb: Option<Id>,
    ) -> bool {
        if ma.is_some_and(|m| a.leq(m, t.0)) || mb.is_some_and(|m| b.leq(m, t.1)) {
            return false;
        }
        if i == gens.len() {
            return true;
        }
        let (ga, gb) = gens[i];
        let na = Some(ma.map_or(ga, |m| a.meet(m, ga)));
        let nb = Some(mb.map_or(gb, |m| b.meet(m, gb)));
        dfs(a, b, gens, t, i + 1, na, mb) || dfs(a, b, gens, t, i + 1, ma, nb)
    }
    !gens.is_empty() && !dfs(a, b, gens, t, 0, None, None)
}

/// Drops duplicates and any generator lying componentwise above another.
pub fn reduce_generators(a: &StateSpace, b: &StateSpace, gens: &[Pair]) -> Vec<Pair> {
    let mut g = gens.to_vec();
    g.sort_unstable();
    g.dedup();
    let keep: Vec<Pair> = g
        .iter()
        .copied()
        .filter(|&(x, y)| {
            !g.iter()
                .any(|&(u, v)| (u, v) != (x, y) && a.leq(u, x) && b.leq(v, y))
        })
        .collect();
    keep
}

/// The minimal tensor product `A ⊗ B` with every element materialised.
#[derive(Clone, Debug)]
pub struct TensorProduct {
    left: RealSpace,
    right: RealSpace,
    pairs: Vec<Pair>,
    pair_index: HashMap<Pair, usize>,
    elems: Vec<FixedBitSet>,
    gens: Vec<Vec<Pair>>,
    index: HashMap<FixedBitSet, Id>,
    pure_elem: Vec<Id>,
    real: RealSpace,
    simplex_path: bool,
}

impl TensorProduct {
    /// Builds the product; simplex factors take the subset fast path.
    pub fn build(left: &RealSpace, right: &RealSpace, cap: usize) -> Result<TensorProduct> {
        let fast = left.has_unique_pure_decomposition() && right.has_unique_pure_decomposition();
        TensorProduct::build_with(left, right, cap, fast)
    }

    /// Always closes the pure tensors under the expansion-formula meet.
    pub fn build_general(left: &RealSpace, right: &RealSpace, cap: usize) -> Result<TensorProduct> {
        TensorProduct::build_with(left, right, cap, false)
    }

    fn build_with(
        left: &RealSpace,
        right: &RealSpace,
        cap: usize,
        fast: bool,
    ) -> Result<TensorProduct> {
        let (a, b) = (left.space(), right.space());
        let mut pairs = Vec::new();
        for &p in a.maximal() {
            for &q in b.maximal() {
                pairs.push((p, q));
            }
        }
        let np = pairs.len();
        let pair_index: HashMap<Pair, usize> =
            pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut elems: Vec<FixedBitSet> = Vec::new();
        let mut gens: Vec<Vec<Pair>> = Vec::new();
        let mut index: HashMap<FixedBitSet, Id> = HashMap::new();
        let mut push = |u: FixedBitSet, g: Vec<Pair>, elems: &mut Vec<FixedBitSet>, gens: &mut Vec<Vec<Pair>>| -> Result<bool> {
            if index.contains_key(&u) {
                return Ok(false);
            }
            if elems.len() >= cap {
                return Err(Error::Cap {
                    what: "tensor elements".into(),
                    limit: cap,
                    count: elems.len(),
                });
            }
            index.insert(u.clone(), elems.len());
            elems.push(u);
            gens.push(g);
            Ok(true)
        };
        if fast {
            if np >= usize::BITS as usize - 1 || (1usize << np) - 1 > cap {
                return Err(Error::Cap {
                    what: "simplex tensor elements".into(),
                    limit: cap,
                    count: if np >= 63 { usize::MAX } else { (1usize << np) - 1 },
                });
            }
            let full = (1usize << np) - 1;
            let mut masks: Vec<usize> = (1..=full).collect();
            masks.sort_by_key(|&m| (m != full, m.count_ones(), m));
            for m in masks {
                let mut u = FixedBitSet::with_capacity(np);
                let mut g = Vec::new();
                for i in 0..np {
                    if m >> i & 1 == 1 {
                        u.insert(i);
                        g.push(pairs[i]);
                    }
                }
                push(u, g, &mut elems, &mut gens)?;
            }
        } else {
            let mut frontier = Vec::new();
            for (i, &p) in pairs.iter().enumerate() {
                let mut u = FixedBitSet::with_capacity(np);
                u.insert(i);
                push(u, vec![p], &mut elems, &mut gens)?;
                frontier.push(i);
            }
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for &e in &frontier {
                    for k in 0..np {
                        if elems[e].contains(k) {
                            continue;
                        }
                        let mut g = gens[e].clone();
                        g.push(pairs[k]);
                        let u = underline_in(a, b, &pairs, &g);
                        if push(u, g, &mut elems, &mut gens)? {
                            next.push(elems.len() - 1);
                        }
                    }
                }
                frontier = next;
            }
            // bottom first, then by underline size
            let mut order: Vec<usize> = (0..elems.len()).collect();
            order.sort_by_key(|&i| (np - elems[i].count_ones(..) != 0, elems[i].count_ones(..), i));
            elems = order.iter().map(|&i| elems[i].clone()).collect();
            gens = order.iter().map(|&i| gens[i].clone()).collect();
            index = elems.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
        }
        let mut pure_elem = vec![0; np];
        for (i, u) in elems.iter().enumerate() {
            if u.count_ones(..) == 1 {
                pure_elem[u.ones().next().unwrap()] = i;
            }
        }
        let mut tp = TensorProduct {
            left: left.clone(),
            right: right.clone(),
            pairs,
            pair_index,
            elems,
            gens,
            index,
            pure_elem,
            real: RealSpace::boolean(),
            simplex_path: fast,
        };
        let labels: Vec<String> = (0..tp.elems.len()).map(|x| tp.rectangle_label(x)).collect();
        let elems_ref = &tp.elems;
        let space = StateSpace::from_leq(labels, |i, j| elems_ref[j].is_subset(&elems_ref[i]))?;
        let mut star = vec![None; tp.elems.len()];
        let bot = space.bottom();
        for (x, slot) in star.iter_mut().enumerate() {
            if x != bot {
                *slot = Some(tp.star_elem(x)?);
            }
        }
        tp.real = RealSpace::new(space, star)?;
        Ok(tp)
    }

    pub fn left(&self) -> &RealSpace {
        &self.left
    }

    pub fn right(&self) -> &RealSpace {
        &self.right
    }

    /// The product as a real space; ids coincide with element ids here.
    pub fn real(&self) -> &RealSpace {
        &self.real
    }

    pub fn space(&self) -> &StateSpace {
        self.real.space()
    }

    pub fn n(&self) -> usize {
        self.elems.len()
    }

    pub fn used_simplex_path(&self) -> bool {
        self.simplex_path
    }

    pub fn pure_pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn underline(&self, x: Id) -> &FixedBitSet {
        &self.elems[x]
    }

    pub fn underline_pairs(&self, x: Id) -> Vec<Pair> {
        self.elems[x].ones().map(|i| self.pairs[i]).collect()
    }

    pub fn generators(&self, x: Id) -> &[Pair] {
        &self.gens[x]
    }

    /// Element id of the pure tensor `p ⊗ q`.
    pub fn pure(&self, p: Id, q: Id) -> Option<Id> {
        self.pair_index.get(&(p, q)).map(|&i| self.pure_elem[i])
    }

    /// Pure pair behind a pure element.
    pub fn pair_of_pure(&self, x: Id) -> Option<Pair> {
        (self.elems[x].count_ones(..) == 1).then(|| self.pairs[self.elems[x].ones().next().unwrap()])
    }

    pub fn underline_of(&self, gens: &[Pair]) -> FixedBitSet {
        underline_in(self.left.space(), self.right.space(), &self.pairs, gens)
    }

    /// Canonical element of `⊓ σ_i ⊗ τ_i`.
    pub fn normalize(&self, gens: &[Pair]) -> Result<Id> {
        if gens.is_empty() {
            return input("normalize needs at least one generator");
        }
        for &(x, y) in gens {
            self.left.space().check(x)?;
            self.right.space().check(y)?;
        }
        let u = self.underline_of(gens);
        self.index
            .get(&u)
            .copied()
            .ok_or_else(|| Error::Order("underline outside the enumerated product".into()))
    }

    /// `σ ⊗ τ` for real factor elements.
    pub fn tensor(&self, s: Id, t: Id) -> Id {
        self.normalize(&[(s, t)]).expect("valid factor ids")
    }

    pub fn lookup_underline(&self, u: &FixedBitSet) -> Option<Id> {
        self.index.get(u).copied()
    }

    pub fn meet(&self, x: Id, y: Id) -> Id {
        let mut g = self.gens[x].clone();
        g.extend_from_slice(&self.gens[y]);
        self.normalize(&g).expect("closed under meets")
    }

    pub fn join(&self, x: Id, y: Id) -> Option<Id> {
        let mut u = self.elems[x].clone();
        u.intersect_with(&self.elems[y]);
        if u.count_ones(..) == 0 {
            return None;
        }
        let g: Vec<Pair> = u.ones().map(|i| self.pairs[i]).collect();
        Some(self.normalize(&g).expect("closed under joins"))
    }

    /// Partial trace onto the left (`side = 1`) or right (`side = 2`) factor.
    pub fn partial_trace(&self, x: Id, side: u8) -> Result<Id> {
        let (sp, pick): (&StateSpace, fn(&Pair) -> Id) = match side {
            1 => (self.left.space(), |p| p.0),
            2 => (self.right.space(), |p| p.1),
            _ => return input(format!("trace side must be 1 or 2, got {side}")),
        };
        let comps: Vec<Id> = self.underline_pairs(x).iter().map(pick).collect();
        sp.meet_all(&comps)
    }

    fn star_elem(&self, x: Id) -> Result<Id> {
        let (a, b) = (self.left.space(), self.right.space());
        let mut acc: Option<FixedBitSet> = None;
        for (p, q) in self.underline_pairs(x) {
            let ps = self.left.star(p).ok_or_else(|| Error::Input("pure without star".into()))?;
            let qs = self.right.star(q).ok_or_else(|| Error::Input("pure without star".into()))?;
            let u = self.underline_of(&[(ps, b.bottom()), (a.bottom(), qs)]);
            acc = Some(match acc {
                None => u,
                Some(mut v) => {
                    v.intersect_with(&u);
                    v
                }
            });
        }
        let u = acc.ok_or_else(|| Error::Input("star of an empty underline".into()))?;
        let g: Vec<Pair> = u.ones().map(|i| self.pairs[i]).collect();
        if g.is_empty() {
            return Err(Error::Order(format!(
                "star of {} has no common upper pure",
                self.rectangle_label(x)
            )));
        }
        self.normalize(&g)
    }

    pub fn tensor_star(&self, x: Id) -> Result<Id> {
        self.real
            .star(x)
            .ok_or_else(|| Error::Input("star of the bottom tensor".into()))
    }

    fn rectangle(&self, s: Id, t: Id) -> FixedBitSet {
        let (a, b) = (self.left.space(), self.right.space());
        let mut u = FixedBitSet::with_capacity(self.pairs.len());
        for (i, &(p, q)) in self.pairs.iter().enumerate() {
            if a.leq(s, p) && b.leq(t, q) {
                u.insert(i);
            }
        }
        u
    }

    /// A short generator list for `x` built from rectangles `↑σ × ↑τ` inside its
    /// underline: the largest one first (left factor pure on ties), then the
    /// smallest rectangles picking up what is still uncovered.
    pub fn rectangle_cover(&self, x: Id) -> Vec<Pair> {
        let (a, b) = (self.left.space(), self.right.space());
        let target = &self.elems[x];
        let mut rects = Vec::new();
        for s in 0..a.n() {
            for t in 0..b.n() {
                let r = self.rectangle(s, t);
                if r.count_ones(..) > 0 && r.is_subset(target) {
                    rects.push(((s, t), r));
                }
            }
        }
        let mut uncovered = target.clone();
        let mut chosen = Vec::new();
        let first = rects
            .iter()
            .max_by(|(p1, r1), (p2, r2)| {
                r1.count_ones(..)
                    .cmp(&r2.count_ones(..))
                    .then(a.is_maximal(p1.0).cmp(&a.is_maximal(p2.0)))
                    .then(p2.cmp(p1))
            })
            .expect("pure rectangles always fit");
        chosen.push(first.0);
        uncovered.difference_with(&first.1);
        while uncovered.count_ones(..) > 0 {
            let best = rects
                .iter()
                .max_by(|(p1, r1), (p2, r2)| {
                    let n1 = r1.intersection(&uncovered).count();
                    let n2 = r2.intersection(&uncovered).count();
                    n1.cmp(&n2)
                        .then(r2.count_ones(..).cmp(&r1.count_ones(..)))
                        .then(a.is_maximal(p1.0).cmp(&a.is_maximal(p2.0)))
                        .then(p2.cmp(p1))
                })
                .unwrap();
            chosen.push(best.0);
            uncovered.difference_with(&best.1);
        }
        chosen
    }

    fn rectangle_label(&self, x: Id) -> String {
        let (a, b) = (self.left.space(), self.right.space());
        self.rectangle_cover(x)
            .iter()
            .map(|&(s, t)| format!("{}⊗{}", wrap(a.label(s)), wrap(b.label(t))))
            .collect::<Vec<_>>()
            .join(" ⊓ ")
    }

    pub fn label(&self, x: Id) -> &str {
        self.space().label(x)
    }

    /// `ν_{lA,lB}(u)` for every pair of real effects, in a fixed order.
    pub fn nu_signature(&self, gens: &[Pair]) -> Vec<BoolVal> {
        let (a, b) = (self.left.space(), self.right.space());
        let ea = real_effects(&self.left.embedding());
        let eb = real_effects(&self.right.embedding());
        let mut out = Vec::with_capacity(ea.len() * eb.len());
        for la in &ea {
            for lb in &eb {
                let mut acc: Option<BoolVal> = None;
                for &(s, t) in gens {
                    let v = la.eval(a, s).bullet(lb.eval(b, t));
                    acc = Some(acc.map_or(v, |w| w.meet(v)));
                }
                out.push(acc.unwrap_or(BoolVal::Yes));
            }
        }
        out
    }

    /// Brute-force indistinguishability under every pair of local real effects.
    pub fn congruence_oracle(&self, u1: &[Pair], u2: &[Pair]) -> bool {
        self.nu_signature(u1) == self.nu_signature(u2)
    }

    /// `(f ⊗ g)` on elements, from factor maps given on real ids.
    pub fn tensor_map(&self, target: &TensorProduct, f: &[Id], g: &[Id]) -> Result<Vec<Id>> {
        if f.len() != self.left.n() || g.len() != self.right.n() {
            return input("factor maps have the wrong domain sizes");
        }
        (0..self.n())
            .map(|x| {
                let img: Vec<Pair> = self.gens[x].iter().map(|&(s, t)| (f[s], g[t])).collect();
                target.normalize(&img)
            })
            .collect()
    }

    /// Atoms `(α⊗⊥) ⊓ (⊥⊗β)` over factor atoms.
    pub fn predicted_atoms(&self) -> Vec<Id> {
        let (a, b) = (self.left.space(), self.right.space());
        let atoms = |s: &StateSpace| -> Vec<Id> {
            (0..s.n()).filter(|&x| s.covers(s.bottom(), x)).collect()
        };
        let mut out: Vec<Id> = Vec::new();
        for &x in &atoms(a) {
            for &y in &atoms(b) {
                out.push(self.normalize(&[(x, b.bottom()), (a.bottom(), y)]).unwrap());
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn wrap(label: &str) -> String {
    if label.contains(" ⊓ ") {
        format!("({label})")
    } else {
        label.to_string()
    }
}

fn underline_in(a: &StateSpace, b: &StateSpace, pairs: &[Pair], gens: &[Pair]) -> FixedBitSet {
    let g = reduce_generators(a, b, gens);
    let mut u = FixedBitSet::with_capacity(pairs.len());
    for (i, &t) in pairs.iter().enumerate() {
        if dominates(a, b, &g, t) {
            u.insert(i);
        }
    }
    u
}

/// A left-folded product of several factors, remembering pure tuples.
#[derive(Clone, Debug)]
pub struct NFold {
    pub factors: Vec<RealSpace>,
    pub product: TensorProduct,
    /// Factor pure ids for each pure pair index of `product`.
    pub tuples: Vec<Vec<Id>>,
}

impl NFold {
    pub fn build(factors: &[RealSpace], cap: usize) -> Result<NFold> {
        if factors.len() < 2 {
            return input("an n-fold product needs at least two factors");
        }
        let mut prod = TensorProduct::build(&factors[0], &factors[1], cap)?;
        let mut tuples: Vec<Vec<Id>> = prod.pairs.iter().map(|&(p, q)| vec![p, q]).collect();
        for f in &factors[2..] {
            let next = TensorProduct::build(prod.real(), f, cap)?;
            let new_tuples = next
                .pairs
                .iter()
                .map(|&(p, q)| {
                    let k = prod.elems[p].ones().next().unwrap();
                    let mut t = tuples[k].clone();
                    t.push(q);
                    t
                })
                .collect();
            tuples = new_tuples;
            prod = next;
        }
        Ok(NFold { factors: factors.to_vec(), product: prod, tuples })
    }

    /// Pure tuples in the underline of `x`.
    pub fn underline_tuples(&self, x: Id) -> Vec<&[Id]> {
        self.product.elems[x].ones().map(|i| self.tuples[i].as_slice()).collect()
    }

    /// `ζ_(i)`: the trace onto factor `i`.
    pub fn trace(&self, x: Id, i: usize) -> Result<Id> {
        let f = self.factors.get(i).ok_or_else(|| Error::Input(format!("no factor {i}")))?;
        let comps: Vec<Id> = self.underline_tuples(x).iter().map(|t| t[i]).collect();
        f.space().meet_all(&comps)
    }

    /// `ζ_(i)(j)`: projection onto factors `i, j`, normalised in `pair`.
    pub fn trace_pair(&self, x: Id, i: usize, j: usize, pair: &TensorProduct) -> Result<Id> {
        let g: Vec<Pair> = self.underline_tuples(x).iter().map(|t| (t[i], t[j])).collect();
        pair.normalize(&g)
    }

    /// The pure element with the given factor tuple.
    pub fn pure_of_tuple(&self, tuple: &[Id]) -> Option<Id> {
        self.tuples
            .iter()
            .position(|t| t == tuple)
            .map(|k| self.product.pure_elem[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zz() -> TensorProduct {
        let z = RealSpace::zprime(2).unwrap();
        TensorProduct::build(&z, &z, DEFAULT_TENSOR_CAP).unwrap()
    }

    #[test]
    fn bool_square_is_fifteen() {
        let b = RealSpace::boolean();
        let t = TensorProduct::build(&b, &b, DEFAULT_TENSOR_CAP).unwrap();
        assert!(t.used_simplex_path());
        assert_eq!(t.n(), 15);
        let g = TensorProduct::build_general(&b, &b, DEFAULT_TENSOR_CAP).unwrap();
        assert_eq!(g.n(), 15);
    }

    #[test]
    fn zprime_square_shape() {
        let t = zz();
        assert_eq!(t.n(), 113);
        assert_eq!(t.space().maximal().len(), 16);
        assert_eq!(t.label(t.space().bottom()), "⊥⊗⊥");
    }

    #[test]
    fn bimorphism_identities() {
        let t = zz();
        let s = t.left().space();
        let (a, astar, b, bstar) = (s.id("a").unwrap(), s.id("a*").unwrap(), s.id("b").unwrap(), s.id("b*").unwrap());
        let bot = s.bottom();
        assert_eq!(t.normalize(&[(a, b), (a, bstar)]).unwrap(), t.tensor(a, bot));
        assert_eq!(t.join(t.tensor(a, bot), t.tensor(bot, b)), Some(t.tensor(a, b)));
        assert_eq!(t.join(t.tensor(a, b), t.tensor(astar, bstar)), None);
        assert!(!dominates(s, s, &[(a, b), (astar, bstar)], (a, bstar)));
        assert!(dominates(s, s, &[(a, bot), (bot, b)], (a, bstar)));
    }

    #[test]
    fn star_of_pure_tensor() {
        let t = zz();
        let s = t.left().space();
        let (a, b) = (s.id("a").unwrap(), s.id("b").unwrap());
        let x = t.tensor(a, b);
        let st = t.tensor_star(x).unwrap();
        assert_eq!(t.label(st), "a*⊗⊥ ⊓ ⊥⊗b*");
        assert_eq!(t.tensor_star(st).unwrap(), x);
    }

    #[test]
    fn trace_of_entangled_meet() {
        let t = zz();
        let s = t.left().space();
        let (a, b, bs) = (s.id("a").unwrap(), s.id("b").unwrap(), s.id("b*").unwrap());
        let x = t.normalize(&[(a, b), (b, bs)]).unwrap();
        assert_eq!(t.partial_trace(x, 1).unwrap(), s.bottom());
        assert_eq!(t.partial_trace(t.tensor(a, b), 2).unwrap(), b);
    }
}
