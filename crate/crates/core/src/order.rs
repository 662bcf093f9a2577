//! Finite posets with total meets, the boolean domain, and structural predicates.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

pub type Id = usize;

const NONE: u32 = u32::MAX;

/// Dense tables are n*n; beyond this the space is refused rather than thrashing.
pub const MAX_DENSE: usize = 6000;

/// The three-valued boolean domain. `Bot` sits below `Yes` and `No`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoolVal {
    Yes,
    No,
    Bot,
}

impl BoolVal {
    pub const ALL: [BoolVal; 3] = [BoolVal::Yes, BoolVal::No, BoolVal::Bot];

    pub fn meet(self, other: BoolVal) -> BoolVal {
        if self == other {
            self
        } else {
            BoolVal::Bot
        }
    }

    /// Monoid product: `Yes` is the unit and `No` absorbs.
    pub fn bullet(self, other: BoolVal) -> BoolVal {
        use BoolVal::*;
        match (self, other) {
            (No, _) | (_, No) => No,
            (Bot, _) | (_, Bot) => Bot,
            (Yes, Yes) => Yes,
        }
    }

    pub fn bar(self) -> BoolVal {
        match self {
            BoolVal::Yes => BoolVal::No,
            BoolVal::No => BoolVal::Yes,
            BoolVal::Bot => BoolVal::Bot,
        }
    }

    pub fn leq(self, other: BoolVal) -> bool {
        self == BoolVal::Bot || self == other
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BoolVal::Yes => "Y",
            BoolVal::No => "N",
            BoolVal::Bot => "⊥",
        }
    }

    pub fn parse(s: &str) -> Option<BoolVal> {
        match s {
            "Y" | "YES" | "y" => Some(BoolVal::Yes),
            "N" | "NO" | "n" => Some(BoolVal::No),
            "⊥" | "B" | "BOT" | "b" => Some(BoolVal::Bot),
            _ => None,
        }
    }
}

impl fmt::Display for BoolVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `(meet, bullet, bar x)` in one call.
pub fn bool_ops(x: BoolVal, y: BoolVal) -> (BoolVal, BoolVal, BoolVal) {
    (x.meet(y), x.bullet(y), x.bar())
}

/// A finite meet-semilattice with bottom. Immutable once built.
#[derive(Clone, Debug)]
pub struct StateSpace {
    labels: Vec<String>,
    index: HashMap<String, Id>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    meet: Vec<u32>,
    join: Vec<u32>,
    bottom: Id,
    maximal: Vec<Id>,
    cover_up: Vec<FixedBitSet>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpaceJson {
    pub elements: Vec<String>,
    pub leq: Vec<[usize; 2]>,
    pub bottom: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star: Option<Vec<[String; 2]>>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StructureReport {
    pub size: usize,
    pub maximal: Vec<String>,
    pub covering_pairs: Vec<[String; 2]>,
    pub generated_by_maximals: bool,
    pub distributive: bool,
    pub finite_rank: bool,
}

impl StateSpace {
    /// Builds a space from a full order predicate. The predicate must already be a
    /// partial order; violations are reported with the offending pair.
    pub fn from_leq<F>(labels: Vec<String>, leq: F) -> Result<StateSpace>
    where
        F: Fn(Id, Id) -> bool,
    {
        let n = labels.len();
        if n == 0 {
            return input("a space needs at least one element");
        }
        if n > MAX_DENSE {
            return Err(Error::Cap {
                what: "dense order tables".into(),
                limit: MAX_DENSE,
                count: n,
            });
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return input(format!("duplicate element name {l:?}"));
            }
        }
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in 0..n {
                if leq(i, j) {
                    up[i].insert(j);
                    down[j].insert(i);
                }
            }
        }
        Self::from_tables(labels, index, up, down)
    }

    /// Builds a space from generating pairs `i ⊑ j`; the reflexive-transitive
    /// closure is taken first, so Hasse edges suffice.
    pub fn from_relation(labels: Vec<String>, pairs: &[(Id, Id)]) -> Result<StateSpace> {
        let n = labels.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            row.insert(i);
        }
        for &(i, j) in pairs {
            if i >= n || j >= n {
                return input(format!("relation pair ({i},{j}) out of range"));
            }
            up[i].insert(j);
        }
        // Warshall on rows
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        let up_ref = &up;
        StateSpace::from_leq(labels, |i, j| up_ref[i].contains(j))
    }

    fn from_tables(
        labels: Vec<String>,
        index: HashMap<String, Id>,
        up: Vec<FixedBitSet>,
        down: Vec<FixedBitSet>,
    ) -> Result<StateSpace> {
        let n = labels.len();
        for i in 0..n {
            if !up[i].contains(i) {
                return Err(Error::Order(format!("not reflexive at ({0},{0})", labels[i])));
            }
            for j in up[i].ones() {
                if j != i && up[j].contains(i) {
                    return Err(Error::Order(format!(
                        "antisymmetry fails for ({},{})",
                        labels[i], labels[j]
                    )));
                }
                if !up[j].is_subset(&up[i]) {
                    let k = up[j].difference(&up[i]).next().unwrap();
                    return Err(Error::Order(format!(
                        "transitivity fails for ({},{},{})",
                        labels[i], labels[j], labels[k]
                    )));
                }
            }
        }
        let bottom = match (0..n).find(|&i| up[i].count_ones(..) == n) {
            Some(b) => b,
            None => return Err(Error::Order("no bottom element".into())),
        };
        let down_size: Vec<usize> = down.iter().map(|d| d.count_ones(..)).collect();
        let up_size: Vec<usize> = up.iter().map(|u| u.count_ones(..)).collect();
        let mut meet = vec![NONE; n * n];
        let mut join = vec![NONE; n * n];
        for a in 0..n {
            for b in a..n {
                let m = if up[a].contains(b) {
                    a
                } else if up[b].contains(a) {
                    b
                } else {
                    let common = intersect(&down[a], &down[b]);
                    let cand = common.ones().max_by_key(|&z| down_size[z]).unwrap();
                    if !common.is_subset(&down[cand]) {
                        return Err(Error::Order(format!(
                            "no greatest lower bound for ({},{})",
                            labels[a], labels[b]
                        )));
                    }
                    cand
                };
                meet[a * n + b] = m as u32;
                meet[b * n + a] = m as u32;
                let j = if up[a].contains(b) {
                    Some(b)
                } else if up[b].contains(a) {
                    Some(a)
                } else {
                    let common = intersect(&up[a], &up[b]);
                    match common.ones().max_by_key(|&z| up_size[z]) {
                        None => None,
                        Some(cand) => {
                            if !common.is_subset(&up[cand]) {
                                return Err(Error::Order(format!(
                                    "bounded pair ({},{}) has no least upper bound",
                                    labels[a], labels[b]
                                )));
                            }
                            Some(cand)
                        }
                    }
                };
                let j = j.map_or(NONE, |x| x as u32);
                join[a * n + b] = j;
                join[b * n + a] = j;
            }
        }
        let maximal: Vec<Id> = (0..n).filter(|&i| up_size[i] == 1).collect();
        let mut cover_up = vec![FixedBitSet::with_capacity(n); n];
        for x in 0..n {
            for y in up[x].ones() {
                if y != x && intersect(&up[x], &down[y]).count_ones(..) == 2 {
                    cover_up[x].insert(y);
                }
            }
        }
        Ok(StateSpace {
            labels,
            index,
            up,
            down,
            meet,
            join,
            bottom,
            maximal,
            cover_up,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn bottom(&self) -> Id {
        self.bottom
    }

    pub fn label(&self, x: Id) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id(&self, name: &str) -> Option<Id> {
        self.index.get(name).copied()
    }

    /// Like [`StateSpace::id`] but an unknown name is an input error.
    pub fn id_of(&self, name: &str) -> Result<Id> {
        self.id(name)
            .ok_or_else(|| Error::Input(format!("unknown element {name:?}")))
    }

    pub fn leq(&self, a: Id, b: Id) -> bool {
        self.up[a].contains(b)
    }

    pub fn lt(&self, a: Id, b: Id) -> bool {
        a != b && self.up[a].contains(b)
    }

    pub fn meet(&self, a: Id, b: Id) -> Id {
        self.meet[a * self.n() + b] as Id
    }

    pub fn join(&self, a: Id, b: Id) -> Option<Id> {
        let j = self.join[a * self.n() + b];
        (j != NONE).then_some(j as Id)
    }

    pub fn bounded(&self, a: Id, b: Id) -> bool {
        self.join[a * self.n() + b] != NONE
    }

    pub fn meet_all(&self, subset: &[Id]) -> Result<Id> {
        let Some((&first, rest)) = subset.split_first() else {
            return input("meet of an empty subset");
        };
        self.check(first)?;
        let mut acc = first;
        for &x in rest {
            self.check(x)?;
            acc = self.meet(acc, x);
        }
        Ok(acc)
    }

    /// Join of a finite family; the empty family joins to bottom.
    pub fn join_all(&self, subset: &[Id]) -> Option<Id> {
        let mut acc = self.bottom;
        for &x in subset {
            acc = self.join(acc, x)?;
        }
        Some(acc)
    }

    pub fn check(&self, x: Id) -> Result<()> {
        if x < self.n() {
            Ok(())
        } else {
            input(format!("element id {x} out of range (n = {})", self.n()))
        }
    }

    pub fn up(&self, x: Id) -> &FixedBitSet {
        &self.up[x]
    }

    pub fn down(&self, x: Id) -> &FixedBitSet {
        &self.down[x]
    }

    pub fn maximal(&self) -> &[Id] {
        &self.maximal
    }

    pub fn is_maximal(&self, x: Id) -> bool {
        self.up[x].count_ones(..) == 1
    }

    /// `a ⋖ b`: `a` strictly below `b` with nothing in between.
    pub fn covers(&self, a: Id, b: Id) -> bool {
        self.cover_up[a].contains(b)
    }

    pub fn upper_covers(&self, a: Id) -> &FixedBitSet {
        &self.cover_up[a]
    }

    pub fn covering_pairs(&self) -> Vec<(Id, Id)> {
        let mut out = Vec::new();
        for a in 0..self.n() {
            for b in self.cover_up[a].ones() {
                out.push((a, b));
            }
        }
        out
    }

    /// Maximal elements above `x`.
    pub fn pures_above(&self, x: Id) -> Vec<Id> {
        self.maximal
            .iter()
            .copied()
            .filter(|&p| self.leq(x, p))
            .collect()
    }

    /// `Max` of a family: drops anything strictly below another member; sorted, deduplicated.
    pub fn max_of<I: IntoIterator<Item = Id>>(&self, ids: I) -> Vec<Id> {
        let mut v: Vec<Id> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        let keep: Vec<Id> = v
            .iter()
            .copied()
            .filter(|&x| !v.iter().any(|&y| self.lt(x, y)))
            .collect();
        keep
    }

    pub fn is_generated_by_maximals(&self) -> bool {
        (0..self.n()).all(|x| self.meet_all(&self.pures_above(x)).ok() == Some(x))
    }

    /// Distributivity of the meet-semilattice: whenever `s1 ⊓ s2 ⊑ s` with `s` distinct
    /// from both, `s` splits as `s1' ⊓ s2'` with `s1 ⊑ s1'` and `s2 ⊑ s2'`.
    pub fn distributivity_witness(&self) -> Option<(Id, Id, Id)> {
        let n = self.n();
        for s in 0..n {
            for s1 in 0..n {
                if s1 == s {
                    continue;
                }
                for s2 in 0..n {
                    if s2 == s || !self.leq(self.meet(s1, s2), s) {
                        continue;
                    }
                    let c1 = intersect(&self.up[s1], &self.up[s]);
                    let c2 = intersect(&self.up[s2], &self.up[s]);
                    let ok = c1
                        .ones()
                        .any(|a| c2.ones().any(|b| self.meet(a, b) == s));
                    if !ok {
                        return Some((s, s1, s2));
                    }
                }
            }
        }
        None
    }

    pub fn is_distributive(&self) -> bool {
        self.distributivity_witness().is_none()
    }

    /// Finite Rank Condition by definition: every bounded family has a join reached by a
    /// finite subfamily. In a finite space the family itself is finite, so it reduces to
    /// existence of joins of bounded families, built here pairwise.
    pub fn finite_rank(&self) -> bool {
        let n = self.n();
        for a in 0..n {
            for b in 0..n {
                let common = intersect(&self.up[a], &self.up[b]);
                if common.count_ones(..) > 0 && self.join(a, b).is_none() {
                    return false;
                }
            }
        }
        true
    }

    pub fn structure_report(&self) -> StructureReport {
        StructureReport {
            size: self.n(),
            maximal: self.maximal.iter().map(|&m| self.labels[m].clone()).collect(),
            covering_pairs: self
                .covering_pairs()
                .into_iter()
                .map(|(a, b)| [self.labels[a].clone(), self.labels[b].clone()])
                .collect(),
            generated_by_maximals: self.is_generated_by_maximals(),
            distributive: self.is_distributive(),
            finite_rank: self.finite_rank(),
        }
    }

    pub fn to_json(&self) -> SpaceJson {
        let mut leq = Vec::new();
        for a in 0..self.n() {
            for b in self.up[a].ones() {
                if a != b {
                    leq.push([a, b]);
                }
            }
        }
        SpaceJson {
            elements: self.labels.clone(),
            leq,
            bottom: self.labels[self.bottom].clone(),
            star: None,
        }
    }

    pub fn from_json(js: &SpaceJson) -> Result<StateSpace> {
        let pairs: Vec<(Id, Id)> = js.leq.iter().map(|p| (p[0], p[1])).collect();
        let s = StateSpace::from_relation(js.elements.clone(), &pairs)?;
        if s.label(s.bottom()) != js.bottom {
            return input(format!(
                "declared bottom {:?} is not the least element ({:?} is)",
                js.bottom,
                s.label(s.bottom())
            ));
        }
        Ok(s)
    }

    /// Hasse diagram, covering edges only.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {name} {{\n  rankdir=BT;\n");
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("  n{i} [label={:?}];\n", l));
        }
        for (a, b) in self.covering_pairs() {
            out.push_str(&format!("  n{a} -> n{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn intersect(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut c = a.clone();
    c.intersect_with(b);
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> StateSpace {
        // bot < a, b < top
        StateSpace::from_relation(
            vec!["bot".into(), "a".into(), "b".into(), "top".into()],
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
        )
        .unwrap()
    }

    #[test]
    fn bool_tables() {
        use BoolVal::*;
        assert_eq!(bool_ops(Yes, No), (Bot, No, No));
        assert_eq!(bool_ops(Bot, Bot), (Bot, Bot, Bot));
        assert_eq!(bool_ops(No, Yes), (Bot, No, Yes));
        for x in BoolVal::ALL {
            for y in BoolVal::ALL {
                for z in BoolVal::ALL {
                    assert_eq!(x.bullet(y.meet(z)), x.bullet(y).meet(x.bullet(z)));
                }
            }
        }
    }

    #[test]
    fn diamond_meets_joins() {
        let s = diamond();
        assert_eq!(s.bottom(), 0);
        assert_eq!(s.meet(1, 2), 0);
        assert_eq!(s.join(1, 2), Some(3));
        assert_eq!(s.maximal(), &[3]);
        assert!(s.covers(0, 1) && s.covers(1, 3) && !s.covers(0, 3));
    }

    #[test]
    fn rejects_cycles_and_missing_meets() {
        let e = StateSpace::from_relation(vec!["x".into(), "y".into()], &[(0, 1), (1, 0)]);
        assert!(matches!(e, Err(Error::Order(_))));
        // two bottoms-to-be with two tops above both: no glb for the tops
        let e = StateSpace::from_relation(
            vec!["b".into(), "p".into(), "q".into(), "s".into(), "t".into()],
            &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (2, 4)],
        );
        assert!(matches!(e, Err(Error::Order(_))));
    }

    #[test]
    fn json_round_trip() {
        let s = diamond();
        let js = s.to_json();
        let t = StateSpace::from_json(&js).unwrap();
        assert_eq!(t.to_json(), js);
    }
}
