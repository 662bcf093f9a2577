//! Projective and orthogonality structure of a two-factor indeterministic tensor.
//!
//! Points are the real pures of `S̄ = A ⊗ B` together with the hidden joins
//! `μ* ⊔ (ν ⊓ φ)` of the completion `S`. Every relation is evaluated in `S`.

use std::collections::{BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;
use petgraph::graph::UnGraph;
use serde::Serialize;

use crate::ontic::Completion;
use crate::report::Check;
use crate::tensor::TensorProduct;
use crate::{Id, RealSpace, Result, StateSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `Š`: any pure `μ` with `μ* ⋢ ν ⊓ φ`.
    Check,
    /// `S̆`: `μ ∈ {ν, φ}`.
    Widecheck,
}

impl Variant {
    pub fn parse(s: &str) -> Option<Variant> {
        match s {
            "check" => Some(Variant::Check),
            "widecheck" => Some(Variant::Widecheck),
            _ => None,
        }
    }
}

/// `χ = μ* ⊔ (ν ⊓ φ)`, completion ids.
#[derive(Clone, Copy, Debug)]
struct Generator {
    mu: Id,
    nu: Id,
    phi: Id,
}

#[derive(Clone, Debug, Serialize)]
pub struct IncidenceJson {
    pub variant: Variant,
    pub points: Vec<String>,
    pub hidden: Vec<String>,
    pub lines: Vec<Vec<String>>,
    pub cover: Vec<Vec<String>>,
    pub starred_planes: Vec<Vec<String>>,
}

pub struct Geometry {
    tp: TensorProduct,
    comp: Completion,
    variant: Variant,
    /// All points of `𝔊^Š`: pures first, then hidden members, each in id order.
    pts: Vec<Id>,
    index: HashMap<Id, usize>,
    n_pures: usize,
    wide: FixedBitSet,
    gens: HashMap<Id, Generator>,
    anomalies: Vec<String>,
    cons: Vec<FixedBitSet>,
    orth: Vec<FixedBitSet>,
    meet: Vec<Vec<Id>>,
}

impl Geometry {
    /// Builds `A ⊗̂ B` and collects the hidden points of both shapes.
    pub fn build(
        left: &RealSpace,
        right: &RealSpace,
        variant: Variant,
        tensor_cap: usize,
        completion_cap: usize,
    ) -> Result<Geometry> {
        let tp = TensorProduct::build(left, right, tensor_cap)?;
        let comp = Completion::enumerate(tp.real(), completion_cap)?;
        let t = tp.space();
        let base_pures: Vec<Id> = tp.real().pures().to_vec();
        let mut hidden = BTreeSet::new();
        let mut wide_ids = BTreeSet::new();
        let mut gens: HashMap<Id, Generator> = HashMap::new();
        let mut anomalies = Vec::new();
        for &mu in &base_pures {
            let ms = tp.tensor_star(mu)?;
            for (i, &nu) in base_pures.iter().enumerate() {
                for &phi in &base_pures[i + 1..] {
                    let g = t.meet(nu, phi);
                    if !(t.covers(g, nu) && t.covers(g, phi)) || t.leq(ms, g) {
                        continue;
                    }
                    let Some(chi) = comp.join(comp.of_base(ms), comp.of_base(g)) else {
                        anomalies.push(format!(
                            "({})* ⊔ ({}) does not exist",
                            t.label(mu),
                            t.label(g)
                        ));
                        continue;
                    };
                    if comp.is_real(chi) {
                        let b = comp.to_base(chi).unwrap_or(g);
                        if !t.is_maximal(b) {
                            anomalies.push(format!(
                                "({})* ⊔ ({}) is real but not pure",
                                t.label(mu),
                                t.label(g)
                            ));
                        }
                        continue;
                    }
                    hidden.insert(chi);
                    let (nu_c, phi_c, mu_c) = (comp.of_base(nu), comp.of_base(phi), comp.of_base(mu));
                    let w = mu == nu || mu == phi;
                    let gen = if w {
                        let other = if mu == nu { phi_c } else { nu_c };
                        Generator { mu: mu_c, nu: mu_c, phi: other }
                    } else {
                        Generator { mu: mu_c, nu: nu_c, phi: phi_c }
                    };
                    if w {
                        wide_ids.insert(chi);
                        let prev_wide = gens.get(&chi).is_some_and(|g| g.mu == g.nu);
                        if !prev_wide {
                            gens.insert(chi, gen);
                        }
                    } else {
                        gens.entry(chi).or_insert(gen);
                    }
                }
            }
        }
        let mut pts: Vec<Id> = base_pures.iter().map(|&p| comp.of_base(p)).collect();
        pts.sort_unstable();
        let n_pures = pts.len();
        pts.extend(hidden.iter().copied());
        let index: HashMap<Id, usize> = pts.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let n = pts.len();
        let mut wide = FixedBitSet::with_capacity(n);
        for i in 0..n {
            if i < n_pures || wide_ids.contains(&pts[i]) {
                wide.insert(i);
            }
        }
        let mut geo = Geometry {
            tp,
            comp,
            variant,
            pts,
            index,
            n_pures,
            wide,
            gens,
            anomalies,
            cons: Vec::new(),
            orth: Vec::new(),
            meet: Vec::new(),
        };
        let s = geo.comp.space();
        let emb = geo.comp.embedding();
        let mut meet = vec![vec![0; n]; n];
        let mut cons = vec![FixedBitSet::with_capacity(n); n];
        let mut orth = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (geo.pts[i], geo.pts[j]);
                meet[i][j] = s.meet(a, b);
                if geo.consistent_raw(a, b) {
                    cons[i].insert(j);
                }
                if emb.orthogonal(a, b) {
                    orth[i].insert(j);
                }
            }
        }
        geo.meet = meet;
        geo.cons = cons;
        geo.orth = orth;
        Ok(geo)
    }

    pub fn tensor(&self) -> &TensorProduct {
        &self.tp
    }

    pub fn completion(&self) -> &Completion {
        &self.comp
    }

    pub fn space(&self) -> &StateSpace {
        self.comp.space()
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Points of the selected variant, as completion ids.
    pub fn points(&self) -> Vec<Id> {
        self.active().ones().map(|i| self.pts[i]).collect()
    }

    pub fn pures(&self) -> &[Id] {
        &self.pts[..self.n_pures]
    }

    /// Hidden members of `Š`.
    pub fn check_hidden(&self) -> &[Id] {
        &self.pts[self.n_pures..]
    }

    /// Hidden members of `S̆`.
    pub fn widecheck_hidden(&self) -> Vec<Id> {
        self.wide.ones().filter(|&i| i >= self.n_pures).map(|i| self.pts[i]).collect()
    }

    pub fn is_widecheck(&self, x: Id) -> bool {
        self.index.get(&x).is_some_and(|&i| self.wide.contains(i))
    }

    pub fn contains(&self, x: Id) -> bool {
        self.index.get(&x).is_some_and(|&i| self.active().contains(i))
    }

    /// Joins that the construction expected to exist or to be pure but did not.
    pub fn anomalies(&self) -> &[String] {
        &self.anomalies
    }

    pub fn label(&self, x: Id) -> String {
        self.comp.space().label(x).to_string()
    }

    fn active(&self) -> FixedBitSet {
        match self.variant {
            Variant::Check => {
                let mut all = FixedBitSet::with_capacity(self.pts.len());
                all.insert_range(..);
                all
            }
            Variant::Widecheck => self.wide.clone(),
        }
    }

    fn all_mask(&self) -> FixedBitSet {
        let mut all = FixedBitSet::with_capacity(self.pts.len());
        all.insert_range(..);
        all
    }

    fn is_pure_idx(&self, i: usize) -> bool {
        i < self.n_pures
    }

    /// `Θ(x)` as completion ids.
    pub fn theta(&self, x: Id) -> Vec<Id> {
        self.comp.theta(x).iter().map(|&b| self.comp.of_base(b)).collect()
    }

    /// Factor pures of a pure tensor point.
    pub fn factors(&self, x: Id) -> Option<(Id, Id)> {
        self.comp.to_base(x).and_then(|b| self.tp.pair_of_pure(b))
    }

    /// `≀`: the factor tuples agree outside at most two positions. With two factors
    /// every pair qualifies.
    fn wr(&self, a: Id, b: Id) -> bool {
        match (self.factors(a), self.factors(b)) {
            (Some((a1, a2)), Some((b1, b2))) => {
                let differ = usize::from(a1 != b1) + usize::from(a2 != b2);
                differ <= 2
            }
            _ => false,
        }
    }

    fn consistent_raw(&self, a: Id, b: Id) -> bool {
        if a == b {
            return true;
        }
        let t = self.tp.space();
        match (self.comp.is_real(a), self.comp.is_real(b)) {
            (true, true) => self.wr(a, b),
            (false, true) | (true, false) => {
                let (chi, sigma) = if self.comp.is_real(a) { (b, a) } else { (a, b) };
                let Some(sb) = self.comp.to_base(sigma) else {
                    return false;
                };
                self.comp.theta(chi).iter().any(|&e| t.covers(e, sb))
            }
            (false, false) => {
                let m = self.comp.space().meet(a, b);
                let (ta, tb) = (self.theta(a), self.theta(b));
                ta.contains(&m) && tb.contains(&m)
            }
        }
    }

    /// `a ≍ b`.
    pub fn consistent(&self, a: Id, b: Id) -> bool {
        match (self.index.get(&a), self.index.get(&b)) {
            (Some(&i), Some(&j)) => self.cons[i].contains(j),
            _ => false,
        }
    }

    pub fn orthogonal(&self, a: Id, b: Id) -> bool {
        self.comp.embedding().orthogonal(a, b)
    }

    /// `r(a, b, c)`: `b = c`, or `b ⊓ c` is covered by `a`.
    pub fn colinear(&self, a: Id, b: Id, c: Id) -> bool {
        let s = self.comp.space();
        b == c || s.covers(s.meet(b, c), a)
    }

    fn r(&self, i: usize, j: usize, k: usize) -> bool {
        j == k || self.comp.space().covers(self.meet[j][k], self.pts[i])
    }

    fn o(&self, i: usize, j: usize) -> bool {
        self.orth[i].contains(j)
    }

    fn c(&self, i: usize, j: usize) -> bool {
        self.cons[i].contains(j)
    }

    fn all_cons(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(k, &i)| set[k + 1..].iter().all(|&j| self.c(i, j)))
    }

    fn names(&self, set: &[usize]) -> String {
        let v: Vec<String> = set.iter().map(|&i| self.label(self.pts[i])).collect();
        format!("[{}]", v.join(", "))
    }

    /// Maximal cliques of `≍` over the points of `mask`, sorted.
    fn cliques(&self, mask: &FixedBitSet) -> Vec<Vec<usize>> {
        let idx: Vec<usize> = mask.ones().collect();
        let mut g = UnGraph::<usize, ()>::with_capacity(idx.len(), 0);
        let nodes: Vec<_> = idx.iter().map(|&i| g.add_node(i)).collect();
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                if self.c(idx[a], idx[b]) {
                    g.add_edge(nodes[a], nodes[b], ());
                }
            }
        }
        let mut out: Vec<Vec<usize>> = petgraph::algo::maximal_cliques(&g)
            .into_iter()
            .map(|set| {
                let mut v: Vec<usize> = set.into_iter().map(|n| g[n]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        out.sort();
        out
    }

    /// `𝔈`: every maximal consistent subset of the selected points.
    pub fn consistency_cover(&self) -> Vec<Vec<Id>> {
        self.cliques(&self.active())
            .into_iter()
            .map(|u| u.into_iter().map(|i| self.pts[i]).collect())
            .collect()
    }

    fn in_line(&self, a: usize, b: usize, c: usize) -> bool {
        c == a || c == b || self.comp.space().covers(self.meet[a][b], self.pts[c])
    }

    /// `ℓ(a, b)` among the selected points.
    pub fn line(&self, a: Id, b: Id) -> Vec<Id> {
        let (Some(&i), Some(&j)) = (self.index.get(&a), self.index.get(&b)) else {
            return Vec::new();
        };
        self.active().ones().filter(|&k| self.in_line(i, j, k)).map(|k| self.pts[k]).collect()
    }

    fn plane_idx(&self, s: [usize; 3], mask: &FixedBitSet) -> Option<FixedBitSet> {
        let (a, b, c) = (s[0], s[1], s[2]);
        if a == b || b == c || a == c || self.in_line(b, c, a) || self.in_line(a, c, b) || self.in_line(a, b, c) {
            return None;
        }
        let mut out = FixedBitSet::with_capacity(self.pts.len());
        let perms = [(a, b, c), (b, a, c), (c, a, b)];
        for x in mask.ones() {
            let hit = perms.iter().any(|&(i, j, k)| {
                mask.ones().any(|l| self.in_line(j, k, l) && self.in_line(i, x, l))
            });
            if hit {
                out.insert(x);
            }
        }
        Some(out)
    }

    /// `℘(a, b, c)` among all points of `𝔊^Š`; `None` for a colinear or repeated triple.
    pub fn plane(&self, a: Id, b: Id, c: Id) -> Option<Vec<Id>> {
        let (i, j, k) = (*self.index.get(&a)?, *self.index.get(&b)?, *self.index.get(&c)?);
        self.plane_idx([i, j, k], &self.all_mask())
            .map(|p| p.ones().map(|x| self.pts[x]).collect())
    }

    /// Generating triples `(α⊗β, α*⊗β, α⊗β*)` of the starred planes, point indices.
    fn starred_triples(&self) -> Vec<[usize; 3]> {
        let (l, r) = (self.tp.left(), self.tp.right());
        let mut out = Vec::new();
        for i in 0..self.n_pures {
            let Some((p, q)) = self.factors(self.pts[i]) else {
                continue;
            };
            let (Some(ps), Some(qs)) = (l.star(p), r.star(q)) else {
                continue;
            };
            let find = |x: Id, y: Id| {
                self.tp
                    .pure(x, y)
                    .and_then(|e| self.index.get(&self.comp.of_base(e)).copied())
            };
            if let (Some(j), Some(k)) = (find(ps, q), find(p, qs)) {
                out.push([i, j, k]);
            }
        }
        out
    }

    fn starred_planes_idx(&self) -> Vec<FixedBitSet> {
        let all = self.all_mask();
        self.starred_triples()
            .into_iter()
            .filter_map(|t| self.plane_idx(t, &all))
            .collect()
    }

    pub fn starred_planes(&self) -> Vec<Vec<Id>> {
        self.starred_planes_idx()
            .into_iter()
            .map(|p| p.ones().map(|x| self.pts[x]).collect())
            .collect()
    }

    /// Orthogonal completeness of a consistent family (point indices).
    fn orth_complete(&self, set: &[usize]) -> bool {
        let m = set.len();
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    if x == y || y == z || x == z {
                        continue;
                    }
                    let (a, b, c) = (set[x], set[y], set[z]);
                    if self.r(a, b, c) && !(self.o(a, b) || self.o(a, c) || self.o(b, c)) {
                        return false;
                    }
                }
            }
        }
        if m < 4 {
            return true;
        }
        for q in combinations(m, 4) {
            let qs: Vec<usize> = q.iter().map(|&k| set[k]).collect();
            if self.has_colinear_triple(&qs) {
                continue;
            }
            let parts = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
            let hyp = parts.iter().any(|&((a, b), (c, d))| {
                set.iter()
                    .any(|&l| self.r(l, qs[a], qs[b]) && self.r(l, qs[c], qs[d]))
            });
            if hyp && !self.orth_to_two(&qs) {
                return false;
            }
        }
        true
    }

    fn has_colinear_triple(&self, qs: &[usize]) -> bool {
        let m = qs.len();
        (0..m).any(|x| {
            (0..m).any(|y| {
                (0..m).any(|z| x != y && y != z && x != z && self.r(qs[x], qs[y], qs[z]))
            })
        })
    }

    fn orth_to_two(&self, qs: &[usize]) -> bool {
        qs.iter().enumerate().any(|(k, &a)| {
            qs.iter()
                .enumerate()
                .filter(|&(l, &b)| l != k && self.o(a, b))
                .count()
                >= 2
        })
    }

    /// Is `set` contained in some member of `𝔈_⊥`?
    fn in_ortho_cover(&self, set: &[usize]) -> bool {
        let mut v = set.to_vec();
        v.sort_unstable();
        v.dedup();
        v.iter().all(|&i| self.wide.contains(i)) && self.all_cons(&v) && self.orth_complete(&v)
    }

    /// Pairs `(a, b)`, `a < b`, consistent with each other and with `l`, whose meet is covered by `l`.
    fn covered_pairs(&self, l: usize, mask: &FixedBitSet) -> Vec<(usize, usize)> {
        let pts: Vec<usize> = mask.ones().filter(|&a| a != l && self.c(a, l)).collect();
        let s = self.comp.space();
        let mut out = Vec::new();
        for (x, &a) in pts.iter().enumerate() {
            for &b in &pts[x + 1..] {
                if self.c(a, b) && s.covers(self.meet[a][b], self.pts[l]) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Structure of the hidden points: `|Θ| = 3`, the covering properties of `Θ`,
    /// pairwise joins recovering the point, and the joins used by the construction.
    pub fn verify_hidden(&self) -> Vec<Check> {
        let s = self.comp.space();
        let t = self.tp.space();
        let mut size = Check::new("hidden-theta-size", "two-qubit hidden joins have three real parts");
        let mut cover = Check::new("hidden-theta-covering", "real parts of a hidden join");
        let mut joins = Check::new("hidden-theta-joins", "two real parts join to the hidden point");
        for &chi in self.check_hidden() {
            let th = self.theta(chi);
            size.case(th.len() == 3, || format!("{} has {} real parts", self.label(chi), th.len()));
            let tb = self.comp.theta(chi);
            let mut ok = th.iter().all(|&a| s.covers(a, chi));
            ok &= tb.iter().all(|&a| t.maximal().iter().any(|&k| t.covers(a, k)));
            for (x, &a) in tb.iter().enumerate() {
                for &b in &tb[x + 1..] {
                    let m = t.meet(a, b);
                    ok &= t.covers(m, a) && t.covers(m, b);
                }
            }
            for (x, &a) in tb.iter().enumerate() {
                for (y, &b) in tb.iter().enumerate() {
                    for (z, &d) in tb.iter().enumerate() {
                        if x != y && y != z && x != z {
                            ok &= t.meet(a, b) != t.meet(a, d);
                        }
                    }
                }
            }
            cover.case(ok, || self.label(chi));
            for (x, &a) in th.iter().enumerate() {
                for &b in &th[x + 1..] {
                    joins.case(s.join(a, b) == Some(chi), || format!("{} ⊔ {} ≠ {}", self.label(a), self.label(b), self.label(chi)));
                }
            }
        }
        let mut exist = Check::new("hidden-join-existence", "μ* ⊔ (ν ⊓ φ) exists and is pure when real");
        exist.cases = 1;
        for a in &self.anomalies {
            exist.fail(a.clone());
        }
        let mut sub = Check::new("widecheck-inside-check", "S̆ ⊆ Š");
        sub.case(
            self.widecheck_hidden().iter().all(|x| self.check_hidden().contains(x)),
            || "S̆ point outside Š".into(),
        );
        vec![size, cover, joins, exist, sub]
    }

    /// `Θ(μ* ⊔ (ν ⊓ φ))` against the explicit three-part pattern, over every pure triple.
    pub fn verify_lambda_pattern(&self) -> Check {
        let mut c = Check::new("lambda-pattern", "real parts of μ* ⊔ (ν ⊓ φ) on two factors");
        let t = self.tp.space();
        let (l, r) = (self.tp.left(), self.tp.right());
        let pures = self.pures().to_vec();
        for &mu in &pures {
            let (a, b) = self.factors(mu).expect("pure tensor");
            let (Some(as_), Some(bs)) = (l.star(a), r.star(b)) else {
                continue;
            };
            let ms = self.tp.tensor_star(self.comp.to_base(mu).expect("real")).expect("star");
            for (x, &nu) in pures.iter().enumerate() {
                for &phi in &pures[x + 1..] {
                    let (a1, b1) = self.factors(nu).expect("pure tensor");
                    let (a2, b2) = self.factors(phi).expect("pure tensor");
                    let g = t.meet(self.comp.to_base(nu).unwrap(), self.comp.to_base(phi).unwrap());
                    if t.leq(ms, g) {
                        continue;
                    }
                    let Some(lam) = self.comp.join(self.comp.of_base(ms), self.comp.of_base(g)) else {
                        continue;
                    };
                    if self.comp.is_real(lam) {
                        continue;
                    }
                    let p = |x: Id, y: Id| self.tp.pure(x, y).expect("pure tensor");
                    let mut want = vec![
                        t.meet(p(a2, b2), p(a1, b1)),
                        t.meet(p(a2, bs), p(as_, b1)),
                        t.meet(p(a1, bs), p(as_, b2)),
                    ];
                    want.sort_unstable();
                    want.dedup();
                    let got = self.comp.theta(lam).to_vec();
                    c.case(got == want, || {
                        format!(
                            "μ={} ν={} φ={}: Θ={:?}",
                            self.label(mu),
                            self.label(nu),
                            self.label(phi),
                            got.iter().map(|&x| t.label(x)).collect::<Vec<_>>()
                        )
                    });
                }
            }
        }
        c
    }

    /// `Rek1`, `Rek2`, and `≍` on pures against `≀`.
    pub fn verify_consistency(&self) -> Vec<Check> {
        let s = self.comp.space();
        let n = self.pts.len();
        let mut rek1 = Check::new("consistent-hidden-share-one-part", "distinct consistent hidden points share one real part");
        let mut rek2 = Check::new("consistent-hidden-pure-one-part", "a consistent pure sits above one real part");
        let mut wr = Check::new("pure-consistency-is-wr", "≍ on pures equals ≀");
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (self.pts[i], self.pts[j]);
                match (self.is_pure_idx(i), self.is_pure_idx(j)) {
                    (false, false) if i < j && self.c(i, j) => {
                        let (ta, tb) = (self.theta(a), self.theta(b));
                        let k = ta.iter().filter(|x| tb.contains(x)).count();
                        rek1.case(k == 1, || format!("{} {} share {}", self.label(a), self.label(b), k));
                    }
                    (false, true) if self.c(i, j) => {
                        let k = self.theta(a).iter().filter(|&&e| s.leq(e, b)).count();
                        rek2.case(k == 1, || format!("{} {} share {}", self.label(a), self.label(b), k));
                    }
                    (true, true) => {
                        wr.case(self.c(i, j) == self.wr(a, b), || format!("{} {}", self.label(a), self.label(b)));
                    }
                    _ => {}
                }
            }
        }
        vec![rek1, rek2, wr]
    }

    /// Veblen-Young style checks on the selected points, plus the sheaf-free symmetry
    /// of `r` and the nondegeneracy of covered configurations.
    pub fn verify_projective(&self) -> Vec<Check> {
        let mask = self.active();
        let act: Vec<usize> = mask.ones().collect();
        let mut out = Vec::new();

        let mut sym = Check::new("colinearity-symmetric", "r is invariant under permutations");
        let mut vy1 = Check::new("vy1", "r(a, b, b) on consistent pairs");
        for &a in &act {
            for &b in &act {
                if !self.c(a, b) {
                    continue;
                }
                vy1.case(self.r(a, b, b), || self.names(&[a, b]));
                for &c in &act {
                    if !(self.c(a, c) && self.c(b, c)) {
                        continue;
                    }
                    let v = self.r(a, b, c);
                    let ok = [self.r(a, c, b), self.r(b, a, c), self.r(b, c, a), self.r(c, a, b), self.r(c, b, a)]
                        .iter()
                        .all(|&w| w == v);
                    sym.case(ok, || self.names(&[a, b, c]));
                }
            }
        }
        out.push(vy1);
        out.push(sym);

        // r(σ1,σ3,σ4) and r(σ2,σ3,σ4) give r(σ1,σ2,σ3) when σ3 ≠ σ4.
        let mut vy2 = Check::new("vy2", "two points on the line through σ3 ≠ σ4 are colinear with σ3");
        for &c in &act {
            for &d in &act {
                if c == d || !self.c(c, d) {
                    continue;
                }
                let on: Vec<usize> = act
                    .iter()
                    .copied()
                    .filter(|&x| self.c(x, c) && self.c(x, d) && self.r(x, c, d))
                    .collect();
                for &a in &on {
                    for &b in &on {
                        if self.c(a, b) {
                            vy2.case(self.r(a, b, c), || self.names(&[a, b, c, d]));
                        }
                    }
                }
            }
        }
        out.push(vy2);

        let mut vy3 = Check::new("vy3", "quadrangle axiom on consistent covers");
        let mut nondeg = Check::new("nondegeneracy", "covered configurations consist of pures");
        let mut seen: HashSet<[usize; 4]> = HashSet::new();
        let mut witness_hits = 0u64;
        for &l in &act {
            let pairs = self.covered_pairs(l, &mask);
            for (x, &(a, b)) in pairs.iter().enumerate() {
                for &(c, d) in &pairs[x + 1..] {
                    let q = [a, b, c, d];
                    if !distinct(&q) || !self.all_cons(&q) {
                        continue;
                    }
                    let meets: Vec<Id> = combinations(4, 2).iter().map(|p| self.meet[q[p[0]]][q[p[1]]]).collect();
                    let mut md = meets.clone();
                    md.sort_unstable();
                    md.dedup();
                    if md.len() == 6 {
                        nondeg.case(q.iter().all(|&i| self.is_pure_idx(i)), || self.names(&[l, a, b, c, d]));
                    }
                    if self.has_colinear_triple(&q) || !seen.insert(q) {
                        continue;
                    }
                    for (p1, p2) in [((a, c), (b, d)), ((b, c), (a, d))] {
                        let (found, explicit) = self.quadrangle_witness(p1, p2, &q, &mask, false);
                        witness_hits += u64::from(explicit);
                        vy3.case(found, || format!("λ={} {}", self.label(self.pts[l]), self.names(&q)));
                    }
                }
            }
        }
        let vy3_cases = vy3.cases;
        out.push(vy3.with_note(format!(
            "explicit join witness sufficed in {witness_hits} of {vy3_cases} cases"
        )));
        out.push(nondeg);
        out
    }

    /// A point `μ` with `r(μ, p1)` and `r(μ, p2)` consistent with `q`; tries the
    /// explicit join `(p1₀ ⊓ p1₁) ⊔ (p2₀ ⊓ p2₁)` and pures covering both meets first.
    fn quadrangle_witness(
        &self,
        p1: (usize, usize),
        p2: (usize, usize),
        q: &[usize; 4],
        mask: &FixedBitSet,
        ortho: bool,
    ) -> (bool, bool) {
        let s = self.comp.space();
        let good = |m: usize| {
            mask.contains(m)
                && q.iter().all(|&x| self.c(m, x))
                && self.r(m, p1.0, p1.1)
                && self.r(m, p2.0, p2.1)
                && (!ortho || self.in_ortho_cover(&[q[0], q[1], q[2], q[3], m]))
        };
        let m1 = self.meet[p1.0][p1.1];
        let m2 = self.meet[p2.0][p2.1];
        let mut first: Vec<usize> = Vec::new();
        if let Some(j) = s.join(m1, m2) {
            if let Some(&k) = self.index.get(&j) {
                first.push(k);
            }
        }
        for i in 0..self.n_pures {
            if s.covers(m1, self.pts[i]) && s.covers(m2, self.pts[i]) {
                first.push(i);
            }
        }
        if first.iter().any(|&m| good(m)) {
            return (true, true);
        }
        (mask.ones().any(good), false)
    }

    /// Orthogonality axioms, irreducibility and the restricted quadrangle axiom on `𝔊^S̆`.
    pub fn verify_ortho(&self) -> Vec<Check> {
        let w: Vec<usize> = self.wide.ones().collect();
        let mut out = Vec::new();

        let mut o1 = Check::new("o1", "orthogonal points are distinct");
        let mut o2 = Check::new("o2", "orthogonality is symmetric");
        for &a in &w {
            for &b in &w {
                if self.o(a, b) {
                    o1.case(a != b, || self.names(&[a]));
                }
                o2.case(self.o(a, b) == self.o(b, a), || self.names(&[a, b]));
            }
        }
        out.push(o1);
        out.push(o2);

        let mut o3 = Check::new("o3", "orthogonality passes to points of the line");
        for &a in &w {
            for &b in &w {
                if a == b || !self.c(a, b) {
                    continue;
                }
                for &d in &w {
                    if !(self.c(d, a) && self.c(d, b) && self.r(d, a, b)) {
                        continue;
                    }
                    for &e in &w {
                        if !(self.o(a, e) && self.o(b, e)) {
                            continue;
                        }
                        if !self.in_ortho_cover(&[a, b, d, e]) {
                            continue;
                        }
                        o3.case(self.o(e, d), || self.names(&[a, b, e, d]));
                    }
                }
            }
        }
        out.push(o3);

        let mut o4 = Check::new("o4", "every line holds a point orthogonal to a given one");
        let mut irr = Check::new("irreducibility", "every line has a third point");
        let mut explicit_hits = 0u64;
        let mut rescued = 0u64;
        for &a in &w {
            for &b in &w {
                if a == b || !self.c(a, b) {
                    continue;
                }
                let good = |e: usize| {
                    self.c(e, a) && self.c(e, b) && self.r(e, a, b) && self.o(e, a) && self.in_ortho_cover(&[a, b, e])
                };
                let explicit = self.o4_candidate(a, b).is_some_and(good);
                explicit_hits += u64::from(explicit);
                let found = explicit || w.iter().any(|&e| good(e));
                o4.case(found, || self.names(&[a, b]));
                let third = |k: usize| {
                    k != a && k != b && self.c(k, a) && self.c(k, b) && self.r(k, b, a) && self.orth_complete(&[a, b, k])
                };
                let ok = w.iter().any(|&k| third(k));
                if !ok && (self.n_pures..self.pts.len()).any(third) {
                    rescued += 1;
                }
                irr.case(ok, || self.names(&[a, b]));
            }
        }
        let o4_cases = o4.cases;
        out.push(o4.with_note(format!("explicit witness sufficed in {explicit_hits} of {o4_cases} cases")));
        let irr_fail = irr.failures;
        out.push(irr.with_note(format!(
            "{rescued} of {irr_fail} failing lines gain a third point when it may be taken from Š∖S̆"
        )));

        out.push(self.verify_restricted_vy3());
        out.extend(self.verify_cover_types());
        out
    }

    /// `α* ⊔ (α ⊓ β)` for a pure `α`; for a hidden `α = φ_γ* ⊔ γ`, `φ_γ` or `δ ⊔ γ*`.
    fn o4_candidate(&self, a: usize, b: usize) -> Option<usize> {
        let s = self.comp.space();
        let x = self.pts[a];
        let m = self.meet[a][b];
        let cand = if self.is_pure_idx(a) {
            let xs = self.comp.embedding().star[x]?;
            s.join(xs, m)?
        } else {
            let g = self.gens.get(&x)?;
            let gamma = s.meet(g.nu, g.phi);
            if m == gamma {
                g.mu
            } else {
                let gs = self.comp.of_base(self.tp.tensor_star(self.comp.to_base(gamma)?).ok()?);
                s.join(m, gs)?
            }
        };
        self.index.get(&cand).copied()
    }

    /// Do the five points contain a starred generating triple whose plane holds all of them?
    fn in_starred_plane(&self, five: &[usize; 5], starred: &[([usize; 3], FixedBitSet)]) -> bool {
        starred.iter().any(|(t, p)| {
            t.iter().all(|x| five.contains(x)) && five.iter().all(|&x| p.contains(x))
        })
    }

    fn verify_restricted_vy3(&self) -> Check {
        let mut c = Check::new("vy3-restricted", "quadrangle axiom on orthogonally complete sets off starred planes");
        let all = self.all_mask();
        let starred: Vec<([usize; 3], FixedBitSet)> = self
            .starred_triples()
            .into_iter()
            .filter_map(|t| self.plane_idx(t, &all).map(|p| (t, p)))
            .collect();
        let mut seen: HashSet<[usize; 4]> = HashSet::new();
        let mut explicit_hits = 0u64;
        let mut excluded = 0u64;
        let mut nonpure = 0u64;
        for l in self.wide.ones() {
            let pairs = self.covered_pairs(l, &self.wide);
            for (x, &(a, b)) in pairs.iter().enumerate() {
                for &(cc, d) in &pairs[x + 1..] {
                    let q = [a, b, cc, d];
                    if !distinct(&q) || !self.all_cons(&q) || self.has_colinear_triple(&q) {
                        continue;
                    }
                    if !self.in_ortho_cover(&[l, a, b, cc, d]) {
                        continue;
                    }
                    if self.in_starred_plane(&[l, a, b, cc, d], &starred) {
                        excluded += 1;
                        continue;
                    }
                    if !q.iter().all(|&i| self.is_pure_idx(i)) {
                        nonpure += 1;
                        c.fail(format!("non-pure σ in {}", self.names(&[l, a, b, cc, d])));
                    }
                    if !seen.insert(q) {
                        continue;
                    }
                    for (p1, p2) in [((a, cc), (b, d)), ((b, cc), (a, d))] {
                        let (found, explicit) = self.quadrangle_witness(p1, p2, &q, &self.wide, true);
                        explicit_hits += u64::from(explicit);
                        c.case(found, || format!("λ={} {}", self.label(self.pts[l]), self.names(&q)));
                    }
                }
            }
        }
        let cases = c.cases;
        c.with_note(format!(
            "explicit witness sufficed in {explicit_hits} of {cases} cases; {excluded} starred configurations skipped; {nonpure} with non-pure σ"
        ))
    }

    /// Every maximal consistent set through a hidden `χ` is of type 1 or type 2, and a
    /// type-2 set through a point of `Š∖S̆` is never orthogonally complete.
    fn verify_cover_types(&self) -> Vec<Check> {
        let s = self.comp.space();
        let mut types = Check::new("cover-types", "consistent sets through a hidden point have type 1 or 2");
        let mut narrow = Check::new("type2-forces-widecheck", "orthogonally complete type-2 sets only hold S̆ points");
        for u in self.cliques(&self.all_mask()) {
            for &chi in u.iter().filter(|&&i| !self.is_pure_idx(i)) {
                let x = self.pts[chi];
                let th = self.theta(x);
                let parts: Vec<Id> = u.iter().filter(|&&i| i != chi).map(|&i| self.meet[i][chi]).collect();
                let type1 = !parts.is_empty() && parts.iter().all(|&p| p == parts[0]) && th.contains(&parts[0]);
                let pure_parts: BTreeSet<Id> = u
                    .iter()
                    .filter(|&&i| self.is_pure_idx(i))
                    .map(|&i| s.meet(self.pts[i], x))
                    .filter(|p| th.contains(p))
                    .collect();
                let type2 = pure_parts.len() >= 2;
                types.case(type1 || type2, || format!("{} in {}", self.label(x), self.names(&u)));
                if type2 && !self.wide.contains(chi) {
                    narrow.case(!self.orth_complete(&u), || format!("{} in {}", self.label(x), self.names(&u)));
                }
            }
        }
        let mut line = Check::new("orthogonal-line-forces-widecheck", "a hidden point on a line with a pure and an orthogonal point lies in S̆");
        let n = self.pts.len();
        for x in self.n_pures..n {
            for sg in 0..self.n_pures {
                if !self.c(x, sg) {
                    continue;
                }
                for l in 0..n {
                    if self.c(x, l) && self.c(sg, l) && self.r(x, sg, l) && self.o(x, l) {
                        line.case(self.wide.contains(x), || self.names(&[x, sg, l]));
                    }
                }
            }
        }
        vec![types, narrow, line]
    }

    /// Incidence data for export: points, distinct lines through consistent pairs, the cover
    /// and the starred planes.
    pub fn incidence(&self) -> IncidenceJson {
        let act: Vec<usize> = self.active().ones().collect();
        let mut lines: BTreeSet<Vec<usize>> = BTreeSet::new();
        for (x, &a) in act.iter().enumerate() {
            for &b in &act[x + 1..] {
                if self.c(a, b) {
                    lines.insert(act.iter().copied().filter(|&k| self.in_line(a, b, k)).collect());
                }
            }
        }
        let name = |v: &[usize]| v.iter().map(|&i| self.label(self.pts[i])).collect::<Vec<_>>();
        IncidenceJson {
            variant: self.variant,
            points: name(&act),
            hidden: act.iter().filter(|&&i| !self.is_pure_idx(i)).map(|&i| self.label(self.pts[i])).collect(),
            lines: lines.iter().map(|l| name(l)).collect(),
            cover: self.cliques(&self.active()).iter().map(|u| name(u)).collect(),
            starred_planes: self
                .starred_planes_idx()
                .iter()
                .map(|p| name(&p.ones().collect::<Vec<_>>()))
                .collect(),
        }
    }

    /// DOT rendering of the consistency graph.
    pub fn to_dot(&self) -> String {
        let act: Vec<usize> = self.active().ones().collect();
        let mut out = String::from("graph consistency {\n");
        for &i in &act {
            let shape = if self.is_pure_idx(i) { "ellipse" } else { "box" };
            out.push_str(&format!("  n{i} [label=\"{}\", shape={shape}];\n", self.label(self.pts[i])));
        }
        for (x, &a) in act.iter().enumerate() {
            for &b in &act[x + 1..] {
                if self.c(a, b) {
                    out.push_str(&format!("  n{a} -- n{b};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Both covering properties of pure tensors in `S̄`, checked exhaustively on the
/// factors and on the product.
pub fn verify_covering(tp: &TensorProduct) -> Vec<Check> {
    let mut out = Vec::new();
    for (tag, s) in [("left", tp.left().space()), ("right", tp.right().space()), ("product", tp.space())] {
        let p = s.maximal().to_vec();
        let mut first = Check::new(&format!("covering-pairs-{tag}"), "distinct pures meet just below both");
        for &a in &p {
            for &b in &p {
                if a != b {
                    let m = s.meet(a, b);
                    first.case(s.covers(m, a) && s.covers(m, b), || format!("{} {}", s.label(a), s.label(b)));
                }
            }
        }
        let mut second = Check::new(&format!("covering-quadruples-{tag}"), "two covered meets below one pure meet just below both");
        for &l in &p {
            let below: Vec<(Id, Id)> = p
                .iter()
                .enumerate()
                .flat_map(|(i, &a)| p[i + 1..].iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| a != l && b != l && s.covers(s.meet(a, b), l))
                .collect();
            for &(a, b) in &below {
                for &(c, d) in &below {
                    if !distinct(&[a, b, c, d]) {
                        continue;
                    }
                    let (m1, m2) = (s.meet(a, b), s.meet(c, d));
                    if m1 == m2 {
                        continue;
                    }
                    let m = s.meet(m1, m2);
                    second.case(s.covers(m, m1) && s.covers(m, m2), || {
                        format!("λ={} {} {} {} {}", s.label(l), s.label(a), s.label(b), s.label(c), s.label(d))
                    });
                }
            }
        }
        out.push(first);
        out.push(second);
    }
    out
}

fn distinct(v: &[usize]) -> bool {
    (0..v.len()).all(|i| (i + 1..v.len()).all(|j| v[i] != v[j]))
}

/// All `k`-subsets of `0..m` in lexicographic order.
fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontic::DEFAULT_CAP;
    use crate::tensor::DEFAULT_TENSOR_CAP;

    #[test]
    fn two_qubit_points() {
        let z = RealSpace::zprime(2).unwrap();
        let g = Geometry::build(&z, &z, Variant::Check, DEFAULT_TENSOR_CAP, DEFAULT_CAP).unwrap();
        assert_eq!(g.pures().len(), 16);
        assert!(g.anomalies().is_empty());
        assert!(!g.widecheck_hidden().is_empty());
        assert!(g.widecheck_hidden().len() <= g.check_hidden().len());
    }
}
