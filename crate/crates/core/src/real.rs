//! Real structures: star involutions, standard spaces, classification, orthogonality.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::order::{Id, SpaceJson, StateSpace};

/// A violated real-structure axiom with a small witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: &'static str,
    pub witness: Vec<String>,
}

/// A space of states in which every element is real, with its star.
#[derive(Clone, Debug)]
pub struct RealSpace {
    space: StateSpace,
    star: Vec<Option<Id>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub deterministic: bool,
    pub completely_indeterministic: bool,
    pub linear: bool,
}

impl RealSpace {
    /// Validated constructor; any axiom violation is an error.
    pub fn new(space: StateSpace, star: Vec<Option<Id>>) -> Result<RealSpace> {
        let rs = RealSpace::unchecked(space, star);
        let v = rs.validate();
        if let Some(first) = v.first() {
            return Err(Error::Order(format!(
                "real structure violates {} at ({})",
                first.axiom,
                first.witness.join(",")
            )));
        }
        Ok(rs)
    }

    /// No validation; for inspecting candidate structures.
    pub fn unchecked(space: StateSpace, mut star: Vec<Option<Id>>) -> RealSpace {
        star.resize(space.n(), None);
        RealSpace { space, star }
    }

    pub fn boolean() -> RealSpace {
        let space = StateSpace::from_relation(
            vec!["⊥".into(), "Y".into(), "N".into()],
            &[(0, 1), (0, 2)],
        )
        .expect("boolean domain");
        RealSpace::unchecked(space, vec![None, Some(2), Some(1)])
    }

    /// `Z'_N`: bottom plus `2N` pures paired by the star.
    pub fn zprime(n: usize) -> Result<RealSpace> {
        if n < 2 {
            return input(format!("Zprime needs n >= 2, got {n}"));
        }
        let mut labels = vec!["⊥".to_string()];
        let mut star = vec![None];
        let mut rel = Vec::new();
        for i in 0..n {
            let base = if n <= 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("s{}", i + 1)
            };
            let k = labels.len();
            labels.push(base.clone());
            labels.push(format!("{base}*"));
            star.push(Some(k + 1));
            star.push(Some(k));
            rel.push((0, k));
            rel.push((0, k + 1));
        }
        RealSpace::new(StateSpace::from_relation(labels, &rel)?, star)
    }

    /// `Z_N`: the simplex on `N` pures, elements indexed by their pure decomposition.
    pub fn simplex(n: usize) -> Result<RealSpace> {
        if n < 2 {
            return input(format!("Z needs n >= 2, got {n}"));
        }
        if n > 12 {
            return Err(Error::Cap {
                what: "simplex pures".into(),
                limit: 12,
                count: n,
            });
        }
        let full = (1u32 << n) - 1;
        let mut masks: Vec<u32> = (1..=full).collect();
        masks.sort_by_key(|&m| {
            let c = m.count_ones();
            (if m == full { 0 } else { c }, m)
        });
        let labels: Vec<String> = masks
            .iter()
            .map(|&m| {
                if m == full {
                    "⊥".to_string()
                } else {
                    (0..n)
                        .filter(|i| m >> i & 1 == 1)
                        .map(|i| format!("u{}", i + 1))
                        .collect::<Vec<_>>()
                        .join("^")
                }
            })
            .collect();
        let space =
            StateSpace::from_leq(labels, |i, j| masks[i] & masks[j] == masks[j])?;
        RealSpace::simplex_from(space)
    }

    /// Installs the simplex star: each element goes to the meet of the pures not above it.
    pub fn simplex_from(space: StateSpace) -> Result<RealSpace> {
        let mut star = vec![None; space.n()];
        for x in 0..space.n() {
            if x == space.bottom() {
                continue;
            }
            let others: Vec<Id> = space
                .maximal()
                .iter()
                .copied()
                .filter(|&p| !space.leq(x, p))
                .collect();
            if others.is_empty() {
                return input(format!(
                    "{} lies below every pure; no simplex star",
                    space.label(x)
                ));
            }
            star[x] = Some(space.meet_all(&others)?);
        }
        RealSpace::new(space, star)
    }

    /// `kind` is one of `bool`, `z`, `zprime`.
    pub fn make(kind: &str, n: usize) -> Result<RealSpace> {
        match kind.to_ascii_lowercase().as_str() {
            "bool" | "b" => Ok(RealSpace::boolean()),
            "z" | "simplex" => RealSpace::simplex(n),
            "zprime" | "zp" => RealSpace::zprime(n),
            other => input(format!("unknown space kind {other:?}")),
        }
    }

    pub fn from_json(js: &SpaceJson) -> Result<RealSpace> {
        let space = StateSpace::from_json(js)?;
        match &js.star {
            None => RealSpace::simplex_from(space),
            Some(pairs) => {
                let mut star = vec![None; space.n()];
                for [x, y] in pairs {
                    let (a, b) = (space.id_of(x)?, space.id_of(y)?);
                    star[a] = Some(b);
                }
                RealSpace::new(space, star)
            }
        }
    }

    pub fn to_json(&self) -> SpaceJson {
        let mut js = self.space.to_json();
        js.star = Some(
            (0..self.space.n())
                .filter_map(|x| {
                    self.star[x].map(|y| {
                        [self.space.label(x).to_string(), self.space.label(y).to_string()]
                    })
                })
                .collect(),
        );
        js
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn star(&self, x: Id) -> Option<Id> {
        self.star[x]
    }

    pub fn star_table(&self) -> &[Option<Id>] {
        &self.star
    }

    pub fn pures(&self) -> &[Id] {
        self.space.maximal()
    }

    pub fn label(&self, x: Id) -> &str {
        self.space.label(x)
    }

    pub fn embedding(&self) -> RealStructureEmbedding {
        let mut real = FixedBitSet::with_capacity(self.n());
        real.insert_range(..);
        RealStructureEmbedding {
            ambient: self.space.clone(),
            real,
            star: self.star.clone(),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        self.embedding().validate()
    }

    /// Deterministic iff every `m_{l(σ,σ*)}` sends pures into `{Y, N}`.
    pub fn is_deterministic(&self) -> bool {
        let s = &self.space;
        self.pures().iter().all(|&sig| match self.star[sig] {
            None => false,
            Some(st) => self
                .pures()
                .iter()
                .all(|&p| s.leq(sig, p) || s.leq(st, p)),
        })
    }

    pub fn is_completely_indeterministic(&self) -> bool {
        let s = &self.space;
        let pures = self.pures();
        for &sig in pures {
            for &lam in pures {
                let (Some(ss), Some(ls)) = (self.star[sig], self.star[lam]) else {
                    return false;
                };
                if !s.leq(ls, sig) {
                    continue;
                }
                if !pures.iter().any(|&k| !s.leq(ss, k) && !s.leq(ls, k)) {
                    return false;
                }
            }
        }
        true
    }

    /// Unique pure decomposition: distinct pure subsets have distinct meets and every
    /// element arises this way.
    pub fn has_unique_pure_decomposition(&self) -> bool {
        let s = &self.space;
        let pures = self.pures();
        if pures.len() > 20 {
            return false;
        }
        let mut seen = FixedBitSet::with_capacity(s.n());
        for mask in 1u32..(1 << pures.len()) {
            let sub: Vec<Id> = (0..pures.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pures[i])
                .collect();
            let m = s.meet_all(&sub).expect("nonempty");
            if seen.contains(m) {
                return false;
            }
            seen.insert(m);
        }
        seen.count_ones(..) == s.n()
    }

    /// Linearity quantifies over the completion, which is built here.
    pub fn classify(&self) -> Result<Classification> {
        let completion = crate::ontic::Completion::enumerate(self, crate::ontic::DEFAULT_CAP)?;
        Ok(Classification {
            deterministic: self.is_deterministic(),
            completely_indeterministic: self.is_completely_indeterministic(),
            linear: completion.is_linear(),
        })
    }

    /// Hasse diagram with covering edges only; the star rides along as a node attribute.
    pub fn to_dot(&self, name: &str) -> String {
        let s = &self.space;
        let mut out = format!("digraph {name} {{\n  rankdir=BT;\n");
        for x in 0..s.n() {
            match self.star[x] {
                Some(y) => out.push_str(&format!("  n{x} [label={:?}, star={:?}];\n", s.label(x), s.label(y))),
                None => out.push_str(&format!("  n{x} [label={:?}];\n", s.label(x))),
            }
        }
        for (a, b) in s.covering_pairs() {
            out.push_str(&format!("  n{a} -> n{b};\n"));
        }
        out.push_str("}\n");
        out
    }

    /// Reads the format written by [`RealSpace::to_dot`].
    pub fn from_dot(text: &str) -> Result<RealSpace> {
        let mut labels: Vec<(usize, String, Option<String>)> = Vec::new();
        let mut edges = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let bad = || Error::Input(format!("dot line {}: cannot parse {line:?}", ln + 1));
            if line.is_empty() || line.starts_with("digraph") || line == "}" || line.starts_with("rankdir") {
                continue;
            }
            let body = line.strip_suffix(';').ok_or_else(bad)?;
            if let Some((a, b)) = body.split_once("->") {
                edges.push((node_index(a.trim()).ok_or_else(bad)?, node_index(b.trim()).ok_or_else(bad)?));
                continue;
            }
            let (node, attrs) = body.split_once('[').ok_or_else(bad)?;
            let idx = node_index(node.trim()).ok_or_else(bad)?;
            let attrs = attrs.strip_suffix(']').ok_or_else(bad)?;
            let mut rest = attrs.trim();
            let (mut label, mut star) = (None, None);
            while !rest.is_empty() {
                let (key, tail) = rest.split_once('=').ok_or_else(bad)?;
                let (val, tail) = read_quoted(tail.trim_start()).ok_or_else(bad)?;
                match key.trim() {
                    "label" => label = Some(val),
                    "star" => star = Some(val),
                    _ => return Err(bad()),
                }
                rest = tail.trim_start().trim_start_matches(',').trim_start();
            }
            labels.push((idx, label.ok_or_else(bad)?, star));
        }
        labels.sort_by_key(|l| l.0);
        if labels.iter().enumerate().any(|(i, l)| l.0 != i) {
            return input("dot nodes must be numbered n0, n1, ... without gaps");
        }
        if edges.iter().any(|&(a, b)| a >= labels.len() || b >= labels.len()) {
            return input("dot edge refers to an undeclared node");
        }
        let space = StateSpace::from_relation(labels.iter().map(|l| l.1.clone()).collect(), &edges)?;
        if labels.iter().all(|l| l.2.is_none()) {
            return RealSpace::simplex_from(space);
        }
        let mut star = vec![None; space.n()];
        for (i, _, st) in &labels {
            if let Some(st) = st {
                star[*i] = Some(space.id_of(st)?);
            }
        }
        RealSpace::new(space, star)
    }
}

fn node_index(tok: &str) -> Option<usize> {
    tok.strip_prefix('n')?.parse().ok()
}

/// A Rust-debug-quoted string at the start of `s`, and the remainder.
fn read_quoted(s: &str) -> Option<(String, &str)> {
    let mut chars = s.strip_prefix('"')?.char_indices();
    let mut out = String::new();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => return Some((out, &s[i + 2..])),
            '\\' => match chars.next()?.1 {
                'n' => out.push('\n'),
                't' => out.push('\t'),
                'r' => out.push('\r'),
                '0' => out.push('\0'),
                c => out.push(c),
            },
            c => out.push(c),
        }
    }
    None
}

/// A space of states with a distinguished real subset carrying a star.
#[derive(Clone, Debug)]
pub struct RealStructureEmbedding {
    pub ambient: StateSpace,
    pub real: FixedBitSet,
    pub star: Vec<Option<Id>>,
}

impl RealStructureEmbedding {
    pub fn is_real(&self, x: Id) -> bool {
        self.real.contains(x)
    }

    pub fn reals(&self) -> Vec<Id> {
        self.real.ones().collect()
    }

    /// Maximal real elements.
    pub fn real_pures(&self) -> Vec<Id> {
        let s = &self.ambient;
        self.real
            .ones()
            .filter(|&x| !self.real.ones().any(|y| s.lt(x, y)))
            .collect()
    }

    /// `Θ(x)`: the maximal real elements below `x`.
    pub fn theta(&self, x: Id) -> Vec<Id> {
        let below: Vec<Id> = self.ambient.down(x).ones().filter(|&y| self.is_real(y)).collect();
        self.ambient.max_of(below)
    }

    /// `x ⊥ y` for non-bottom `x`, `y`: some real `ω ≠ ⊥` has `ω ⊑ x` and `ω* ⊑ y`.
    pub fn orthogonal(&self, x: Id, y: Id) -> bool {
        let s = &self.ambient;
        if x == s.bottom() || y == s.bottom() {
            return false;
        }
        s.down(x).ones().any(|w| {
            w != s.bottom()
                && self.is_real(w)
                && self.star[w].is_some_and(|ws| s.leq(ws, y))
        })
    }

    /// `S^⊥`, as a sorted id list.
    pub fn ortho(&self, set: &[Id]) -> Vec<Id> {
        (0..self.ambient.n())
            .filter(|&x| set.iter().all(|&y| self.orthogonal(x, y)))
            .collect()
    }

    /// `(S^⊥, S^⊥⊥)`.
    pub fn orthoclosure(&self, set: &[Id]) -> (Vec<Id>, Vec<Id>) {
        let o = self.ortho(set);
        let oo = self.ortho(&o);
        (o, oo)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let s = &self.ambient;
        let l = |x: Id| s.label(x).to_string();
        let mut out = Vec::new();
        let bot = s.bottom();
        if !self.is_real(bot) {
            out.push(Violation { axiom: "bottom is real", witness: vec![l(bot)] });
        }
        let reals = self.reals();
        'meets: for (i, &x) in reals.iter().enumerate() {
            for &y in &reals[i + 1..] {
                let m = s.meet(x, y);
                if !self.is_real(m) {
                    out.push(Violation { axiom: "reals closed under meets", witness: vec![l(x), l(y)] });
                    break 'meets;
                }
            }
        }
        let pures = self.real_pures();
        for &x in &reals {
            let above: Vec<Id> = pures.iter().copied().filter(|&p| s.leq(x, p)).collect();
            if s.meet_all(&above).ok() != Some(x) {
                out.push(Violation { axiom: "generated by maximal elements", witness: vec![l(x)] });
                break;
            }
        }
        for &x in &reals {
            if x == bot {
                if self.star[x].is_some() {
                    out.push(Violation { axiom: "star undefined at bottom", witness: vec![l(x)] });
                }
                continue;
            }
            match self.star[x] {
                None => out.push(Violation { axiom: "star defined off bottom", witness: vec![l(x)] }),
                Some(y) if y == bot || !self.is_real(y) => out.push(Violation {
                    axiom: "star maps into non-bottom reals",
                    witness: vec![l(x), l(y)],
                }),
                Some(_) => {}
            }
        }
        if !out.is_empty() {
            return out;
        }
        let st = |x: Id| self.star[x].unwrap();
        for &x in &reals {
            if x != bot && st(st(x)) != x {
                out.push(Violation { axiom: "involutive", witness: vec![l(x)] });
                break;
            }
        }
        'rev: for &x in &reals {
            for &y in &reals {
                if x != bot && y != bot && s.leq(x, y) && !s.leq(st(y), st(x)) {
                    out.push(Violation { axiom: "order-reversing", witness: vec![l(x), l(y)] });
                    break 'rev;
                }
            }
        }
        for &x in &reals {
            if x != bot && s.bounded(x, st(x)) {
                out.push(Violation {
                    axiom: "no common upper bound with star",
                    witness: vec![l(x), l(st(x))],
                });
                break;
            }
        }
        if let Some((a, b)) = self.separation_failure() {
            out.push(Violation { axiom: "real effects separate states", witness: vec![l(a), l(b)] });
        }
        out
    }

    /// A pair of distinct states with equal evaluations on every real effect.
    pub fn separation_failure(&self) -> Option<(Id, Id)> {
        let effects = crate::chu::real_effects(self);
        let s = &self.ambient;
        let sig: Vec<Vec<crate::order::BoolVal>> = (0..s.n())
            .map(|x| effects.iter().map(|l| l.eval(s, x)).collect())
            .collect();
        for a in 0..s.n() {
            for b in a + 1..s.n() {
                if sig[a] == sig[b] {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_round_trip() {
        for rs in [RealSpace::zprime(3).unwrap(), RealSpace::simplex(3).unwrap(), RealSpace::boolean()] {
            let back = RealSpace::from_dot(&rs.to_dot("s")).unwrap();
            assert_eq!(back.to_json(), rs.to_json());
        }
    }

    #[test]
    fn zprime_two() {
        let z = RealSpace::zprime(2).unwrap();
        assert_eq!(z.n(), 5);
        assert_eq!(z.pures().len(), 4);
        let a = z.space().id("a").unwrap();
        assert_eq!(z.label(z.star(a).unwrap()), "a*");
        assert!(z.validate().is_empty());
    }

    #[test]
    fn simplex_three_star() {
        let z = RealSpace::simplex(3).unwrap();
        assert_eq!(z.n(), 7);
        let u1 = z.space().id("u1").unwrap();
        assert_eq!(z.label(z.star(u1).unwrap()), "u2^u3");
        assert!(z.is_deterministic());
        assert!(!z.is_completely_indeterministic());
        assert!(z.has_unique_pure_decomposition());
    }

    #[test]
    fn self_star_rejected() {
        let z = RealSpace::zprime(2).unwrap();
        let mut star = z.star_table().to_vec();
        let a = z.space().id("a").unwrap();
        let b = z.space().id("b").unwrap();
        star[a] = Some(a);
        star[b] = Some(b);
        let bad = RealSpace::unchecked(z.space().clone(), star);
        let v = bad.validate();
        assert!(v.iter().any(|v| v.axiom == "no common upper bound with star"
            && v.witness == vec!["a".to_string(), "a".to_string()]));
    }

    #[test]
    fn boolean_is_z2() {
        let b = RealSpace::boolean();
        assert!(b.validate().is_empty());
        assert!(b.is_deterministic());
        assert_eq!(b.label(b.star(1).unwrap()), "N");
    }
}
