//! Joint morphisms, compatibility contexts, operational descriptions and the
//! description/state correspondence.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::chu::{effect_meet, real_effects, Effect};
use crate::error::{input, Error, Result};
use crate::order::{BoolVal, Id, StateSpace};
use crate::real::RealStructureEmbedding;

/// Widest target `𝔅^⊗k` the search will materialise.
pub const MAX_JOINT_ARITY: usize = 16;
/// Backtracking nodes visited before the search gives up with a cap error.
pub const DEFAULT_SEARCH_CAP: usize = 2_000_000;
/// Contexts up to this size get their local sections by brute force over `𝔅^C`.
pub const BRUTE_SECTION_LIMIT: usize = 10;

/// A joint morphism into `𝔅^⊗k`. Elements of the target are sets of pure tuples;
/// tuple `t` has YES in coordinate `i` iff bit `i` of `t` is set. Larger sets sit lower.
#[derive(Clone, Debug)]
pub struct JointMorphism {
    pub effects: Vec<Effect>,
    pub images: Vec<FixedBitSet>,
}

impl JointMorphism {
    pub fn arity(&self) -> usize {
        self.effects.len()
    }

    /// `ζ_(i)(Ψ(x))`.
    pub fn marginal(&self, x: Id, i: usize) -> BoolVal {
        marginal(&self.images[x], i)
    }

    /// Image written as a meet of pure tensors, e.g. `Y⊗N ⊓ N⊗Y`.
    pub fn label(&self, x: Id) -> String {
        let k = self.arity();
        let parts: Vec<String> = self.images[x]
            .ones()
            .map(|t| {
                (0..k)
                    .map(|i| if t >> i & 1 == 1 { "Y" } else { "N" })
                    .collect::<Vec<_>>()
                    .join("⊗")
            })
            .collect();
        parts.join(" ⊓ ")
    }
}

fn marginal(set: &FixedBitSet, i: usize) -> BoolVal {
    let mut yes = false;
    let mut no = false;
    for t in set.ones() {
        if t >> i & 1 == 1 {
            yes = true;
        } else {
            no = true;
        }
    }
    match (yes, no) {
        (true, false) => BoolVal::Yes,
        (false, true) => BoolVal::No,
        _ => BoolVal::Bot,
    }
}

fn union(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut u = a.clone();
    u.union_with(b);
    u
}

/// Tuples of a pure: coordinates with a definite value are fixed, the rest free.
fn pure_pattern(s: &StateSpace, effects: &[Effect], w: Id) -> (usize, usize, Vec<usize>) {
    let mut fixed_mask = 0;
    let mut fixed_val = 0;
    let mut free = Vec::new();
    for (i, l) in effects.iter().enumerate() {
        match l.eval(s, w) {
            BoolVal::Yes => {
                fixed_mask |= 1 << i;
                fixed_val |= 1 << i;
            }
            BoolVal::No => fixed_mask |= 1 << i,
            BoolVal::Bot => free.push(i),
        }
    }
    (fixed_mask, fixed_val, free)
}

fn spread(fixed_val: usize, free: &[usize], bits: usize) -> usize {
    let mut t = fixed_val;
    for (j, &i) in free.iter().enumerate() {
        if bits >> j & 1 == 1 {
            t |= 1 << i;
        }
    }
    t
}

/// Candidate images of a pure: the full product of allowed values first, then every
/// other tuple set with the right marginals, smallest first.
fn pure_candidates(s: &StateSpace, effects: &[Effect], w: Id, full: bool) -> Vec<FixedBitSet> {
    let width = 1usize << effects.len();
    let (_, fixed_val, free) = pure_pattern(s, effects, w);
    let tuples: Vec<usize> = (0..1usize << free.len()).map(|b| spread(fixed_val, &free, b)).collect();
    let mut product = FixedBitSet::with_capacity(width);
    for &t in &tuples {
        product.insert(t);
    }
    let mut out = vec![product.clone()];
    if !full || tuples.len() > 4 {
        return out;
    }
    let mut subsets: Vec<u32> = (1u32..1 << tuples.len())
        .filter(|&m| {
            free.iter().all(|&i| {
                let vals: Vec<usize> = (0..tuples.len())
                    .filter(|&j| m >> j & 1 == 1)
                    .map(|j| tuples[j] >> i & 1)
                    .collect();
                vals.contains(&0) && vals.contains(&1)
            })
        })
        .collect();
    subsets.sort_by_key(|m| (m.count_ones(), *m));
    for m in subsets {
        let mut set = FixedBitSet::with_capacity(width);
        for (j, &t) in tuples.iter().enumerate() {
            if m >> j & 1 == 1 {
                set.insert(t);
            }
        }
        if set != product {
            out.push(set);
        }
    }
    out
}

/// Checks every clause of the joint-morphism definition; returns the first failure.
pub fn verify_joint(
    emb: &RealStructureEmbedding,
    effects: &[Effect],
    images: &[FixedBitSet],
) -> std::result::Result<(), String> {
    let s = &emb.ambient;
    let n = s.n();
    if images.len() != n || images.iter().any(|x| x.count_ones(..) == 0) {
        return Err("image map has the wrong shape".into());
    }
    for x in 0..n {
        for (i, l) in effects.iter().enumerate() {
            if marginal(&images[x], i) != l.eval(s, x) {
                return Err(format!("marginal {} fails at {}", i, s.label(x)));
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if images[s.meet(a, b)] != union(&images[a], &images[b]) {
                return Err(format!("meet of ({},{}) not preserved", s.label(a), s.label(b)));
            }
        }
    }
    // Pulling back a target element only depends on the largest image inside it.
    let pull: Vec<Id> = (0..n)
        .map(|x| {
            let below: Vec<Id> = (0..n).filter(|&y| images[y].is_subset(&images[x])).collect();
            s.meet_all(&below).expect("x itself qualifies")
        })
        .collect();
    for x in 0..n {
        if !emb.is_real(pull[x]) {
            return Err(format!(
                "pullback of the image of {} is {}, not real",
                s.label(x),
                s.label(pull[x])
            ));
        }
    }
    let bot = s.bottom();
    for a in 0..n {
        for b in 0..n {
            if !images[a].is_disjoint(&images[b]) {
                continue;
            }
            let (p, q) = (pull[a], pull[b]);
            let ok = p != bot
                && q != bot
                && emb.star[p].is_some_and(|ps| s.leq(ps, q));
            if !ok {
                return Err(format!(
                    "pullback l({},{}) is not a real effect",
                    s.label(p),
                    s.label(q)
                ));
            }
        }
    }
    Ok(())
}

fn images_from_pures(s: &StateSpace, pures: &[Id], assign: &[FixedBitSet]) -> Vec<FixedBitSet> {
    (0..s.n())
        .map(|x| {
            let mut u = FixedBitSet::with_capacity(assign[0].len());
            for (j, &p) in pures.iter().enumerate() {
                if s.leq(x, p) {
                    u.union_with(&assign[j]);
                }
            }
            u
        })
        .collect()
}

fn check_effects(emb: &RealStructureEmbedding, effects: &[Effect]) -> Result<()> {
    if effects.is_empty() {
        return input("a joint morphism needs at least one effect");
    }
    if effects.len() > MAX_JOINT_ARITY {
        return Err(Error::Cap {
            what: "joint morphism arity".into(),
            limit: MAX_JOINT_ARITY,
            count: effects.len(),
        });
    }
    let reals = real_effects(emb);
    for l in effects {
        if reals.binary_search(l).is_err() {
            return input(format!("{} is not a real effect", l.label(&emb.ambient)));
        }
    }
    if !emb.ambient.is_generated_by_maximals() {
        return Err(Error::Unsupported(
            "space is not generated by its maximal elements".into(),
        ));
    }
    Ok(())
}

/// The product construction: each pure goes to the product of its allowed values, every
/// other state to the meet over the pures above it. This is the joint morphism of a
/// simplex; elsewhere it is only a first candidate.
pub fn constructive_joint(emb: &RealStructureEmbedding, effects: &[Effect]) -> Result<Option<JointMorphism>> {
    check_effects(emb, effects)?;
    let s = &emb.ambient;
    let pures = s.maximal().to_vec();
    let assign: Vec<FixedBitSet> = pures
        .iter()
        .map(|&w| pure_candidates(s, effects, w, false).remove(0))
        .collect();
    let images = images_from_pures(s, &pures, &assign);
    Ok(verify_joint(emb, effects, &images)
        .is_ok()
        .then(|| JointMorphism { effects: effects.to_vec(), images }))
}

/// Searches for a joint morphism of the given real effects.
pub fn find_joint_morphism(emb: &RealStructureEmbedding, effects: &[Effect]) -> Result<Option<JointMorphism>> {
    find_joint_morphism_capped(emb, effects, DEFAULT_SEARCH_CAP)
}

pub fn find_joint_morphism_capped(
    emb: &RealStructureEmbedding,
    effects: &[Effect],
    cap: usize,
) -> Result<Option<JointMorphism>> {
    if let Some(j) = constructive_joint(emb, effects)? {
        return Ok(Some(j));
    }
    let s = &emb.ambient;
    let pures = s.maximal().to_vec();
    let pos: HashMap<Id, usize> = pures.iter().enumerate().map(|(j, &p)| (p, j)).collect();
    let mut cands = Vec::with_capacity(pures.len());
    for &w in &pures {
        let (_, _, free) = pure_pattern(s, effects, w);
        if free.len() > 2 {
            return Err(Error::Cap {
                what: "free coordinates at a pure state".into(),
                limit: 2,
                count: free.len(),
            });
        }
        cands.push(pure_candidates(s, effects, w, true));
    }
    // Meet preservation between a and b forces every pure above a ⊓ b, but above
    // neither, to land inside the union of the images of a and b.
    let mut constraints: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); pures.len()];
    let mut seen = BTreeSet::new();
    for a in 0..s.n() {
        for b in a + 1..s.n() {
            let pa: Vec<usize> = s.pures_above(a).iter().map(|p| pos[p]).collect();
            let pb: Vec<usize> = s.pures_above(b).iter().map(|p| pos[p]).collect();
            let mut cover: Vec<usize> = pa.iter().chain(&pb).copied().collect();
            cover.sort_unstable();
            cover.dedup();
            for p in s.pures_above(s.meet(a, b)) {
                let j = pos[&p];
                if cover.contains(&j) || !seen.insert((j, cover.clone())) {
                    continue;
                }
                let last = cover.iter().copied().chain([j]).max().unwrap();
                constraints[last].push((j, cover.clone()));
            }
        }
    }
    let mut assign: Vec<FixedBitSet> = Vec::with_capacity(pures.len());
    let mut nodes = 0usize;
    let found = search(
        emb, effects, &pures, &cands, &constraints, &mut assign, &mut nodes, cap,
    )?;
    Ok(found.map(|images| JointMorphism { effects: effects.to_vec(), images }))
}

#[allow(clippy::too_many_arguments)]
fn search(
    emb: &RealStructureEmbedding,
    effects: &[Effect],
    pures: &[Id],
    cands: &[Vec<FixedBitSet>],
    constraints: &[Vec<(usize, Vec<usize>)>],
    assign: &mut Vec<FixedBitSet>,
    nodes: &mut usize,
    cap: usize,
) -> Result<Option<Vec<FixedBitSet>>> {
    let depth = assign.len();
    if depth == pures.len() {
        let images = images_from_pures(&emb.ambient, pures, assign);
        return Ok(verify_joint(emb, effects, &images).is_ok().then_some(images));
    }
    for c in &cands[depth] {
        *nodes += 1;
        if *nodes > cap {
            return Err(Error::Cap { what: "joint morphism search nodes".into(), limit: cap, count: *nodes });
        }
        assign.push(c.clone());
        let ok = constraints[depth].iter().all(|(j, cover)| {
            let mut u = FixedBitSet::with_capacity(c.len());
            for &k in cover {
                u.union_with(&assign[k]);
            }
            assign[*j].is_subset(&u)
        });
        if ok {
            if let Some(r) = search(emb, effects, pures, cands, constraints, assign, nodes, cap)? {
                return Ok(Some(r));
            }
        }
        assign.pop();
    }
    Ok(None)
}

/// `𝔜`, `bar 𝔜` and `⊥_𝔈`.
pub fn constant_effects(s: &StateSpace) -> [Effect; 3] {
    let y = Effect::unit(s);
    [y, y.bar(), Effect::BOTTOM]
}

/// Closure of a family under bar, pairwise effect meet and the three constants.
pub fn context_closure(s: &StateSpace, set: &[Effect]) -> Vec<Effect> {
    let mut out: BTreeSet<Effect> = set.iter().copied().collect();
    out.extend(constant_effects(s));
    loop {
        let cur: Vec<Effect> = out.iter().copied().collect();
        let before = out.len();
        for (i, a) in cur.iter().enumerate() {
            out.insert(a.bar());
            for b in &cur[i + 1..] {
                out.insert(effect_meet(s, a, b));
            }
        }
        if out.len() == before {
            return out.into_iter().collect();
        }
    }
}

/// A subfamily whose closure recovers the closure of `set`. Two-sided effects are
/// tried first since their meets with the constants give the one-sided ones.
pub fn generators(s: &StateSpace, set: &[Effect]) -> Vec<Effect> {
    let mut order = set.to_vec();
    order.sort_by_key(|l| (l.yes.is_none() as u8 + l.no.is_none() as u8, *l));
    let mut kept: Vec<Effect> = Vec::new();
    let mut closed = context_closure(s, &[]);
    for l in &order {
        if closed.binary_search(l).is_ok() {
            continue;
        }
        kept.push(*l);
        closed = context_closure(s, &kept);
    }
    kept
}

/// Joint compatibility of a family. Meets of compatible real effects are real, which
/// rejects most families at once; what remains is decided by a joint-morphism search
/// on the generators, the bar, meet and constant extensions being compatible whenever
/// the generators are.
pub fn is_compatible(emb: &RealStructureEmbedding, set: &[Effect]) -> Result<bool> {
    let s = &emb.ambient;
    let reals = real_effects(emb);
    let closed = context_closure(s, set);
    if closed.iter().any(|l| reals.binary_search(l).is_err()) {
        return Ok(false);
    }
    let gens = generators(s, set);
    if gens.is_empty() {
        return Ok(true);
    }
    Ok(find_joint_morphism(emb, &gens)?.is_some())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ContextKind {
    /// `C¹_ω` for a real pure `ω`.
    Type1(Id),
    /// Grown from a two-sided effect.
    Type2,
    Other,
}

#[derive(Clone, Debug)]
pub struct Context {
    /// Sorted.
    pub effects: Vec<Effect>,
    pub kind: ContextKind,
    /// Accepted by the joint-morphism oracle.
    pub oracle_ok: bool,
    /// No single real effect can be added.
    pub maximal: bool,
}

impl Context {
    pub fn contains(&self, l: &Effect) -> bool {
        self.effects.binary_search(l).is_ok()
    }

    pub fn position(&self, l: &Effect) -> Option<usize> {
        self.effects.binary_search(l).ok()
    }
}

/// `C¹_ω`: the one-sided effects with part below `ω`, and `⊥_𝔈`.
pub fn type1_context(emb: &RealStructureEmbedding, w: Id) -> Vec<Effect> {
    let s = &emb.ambient;
    let mut out = vec![Effect::BOTTOM];
    for x in emb.reals() {
        if s.leq(x, w) {
            out.push(Effect { yes: Some(x), no: None });
            out.push(Effect { yes: None, no: Some(x) });
        }
    }
    out.sort();
    out
}

/// Type-1 contexts for every real pure, then Type-2 contexts grown greedily in id order
/// from each two-sided real effect not yet covered. Every context is re-checked by the
/// joint-morphism oracle and tested for one-effect extensions.
pub fn maximal_contexts(emb: &RealStructureEmbedding) -> Result<Vec<Context>> {
    let s = &emb.ambient;
    let reals = real_effects(emb);
    let mut out: Vec<Context> = Vec::new();
    for w in emb.real_pures() {
        out.push(Context {
            effects: type1_context(emb, w),
            kind: ContextKind::Type1(w),
            oracle_ok: false,
            maximal: false,
        });
    }
    for l in reals.iter().filter(|l| l.yes.is_some() && l.no.is_some()) {
        if out.iter().any(|c| c.kind == ContextKind::Type2 && c.contains(l)) {
            continue;
        }
        let mut cur = context_closure(s, &[*l]);
        for e in &reals {
            if cur.binary_search(e).is_ok() {
                continue;
            }
            let mut grown = cur.clone();
            grown.push(*e);
            let closed = context_closure(s, &grown);
            if is_compatible(emb, &closed)? {
                cur = closed;
            }
        }
        out.push(Context { effects: cur, kind: ContextKind::Type2, oracle_ok: false, maximal: false });
    }
    for c in &mut out {
        c.oracle_ok = is_compatible(emb, &c.effects)?;
        let mut maximal = true;
        for e in &reals {
            if c.contains(e) {
                continue;
            }
            let mut grown = c.effects.clone();
            grown.push(*e);
            if is_compatible(emb, &grown)? {
                maximal = false;
                break;
            }
        }
        c.maximal = maximal;
    }
    Ok(out)
}

/// Checks the unit, bar and meet laws of a local assignment on a closed context.
pub fn check_local_laws(s: &StateSpace, ctx: &Context, values: &[BoolVal]) -> std::result::Result<(), String> {
    let val = |l: &Effect| ctx.position(l).map(|i| values[i]);
    if val(&Effect::unit(s)) != Some(BoolVal::Yes) {
        return Err("unit effect is not YES".into());
    }
    for (i, l) in ctx.effects.iter().enumerate() {
        if let Some(b) = val(&l.bar()) {
            if b != values[i].bar() {
                return Err(format!("bar law fails at {}", l.label(s)));
            }
        }
        for (j, m) in ctx.effects.iter().enumerate().skip(i + 1) {
            if let Some(v) = val(&effect_meet(s, l, m)) {
                if v != values[i].meet(values[j]) {
                    return Err(format!("meet law fails at {} ⊓ {}", l.label(s), m.label(s)));
                }
            }
        }
    }
    Ok(())
}

/// All lawful assignments on a context, by brute force over `𝔅^C`.
pub fn local_sections_brute(s: &StateSpace, ctx: &Context) -> Vec<Vec<BoolVal>> {
    let k = ctx.effects.len();
    let mut out = Vec::new();
    let mut vals = vec![BoolVal::Yes; k];
    let total = 3usize.pow(k as u32);
    for code in 0..total {
        let mut c = code;
        for v in vals.iter_mut() {
            *v = BoolVal::ALL[c % 3];
            c /= 3;
        }
        if check_local_laws(s, ctx, &vals).is_ok() {
            out.push(vals.clone());
        }
    }
    out.sort();
    out
}

/// The assignments induced by the states of the ambient space.
pub fn local_sections_by_states(s: &StateSpace, ctx: &Context) -> Vec<Vec<BoolVal>> {
    let set: BTreeSet<Vec<BoolVal>> = (0..s.n())
        .map(|x| ctx.effects.iter().map(|l| l.eval(s, x)).collect())
        .collect();
    set.into_iter().collect()
}

/// Lawful local assignments: brute force on small contexts, state-induced beyond.
pub fn local_sections(s: &StateSpace, ctx: &Context) -> Vec<Vec<BoolVal>> {
    if ctx.effects.len() <= BRUTE_SECTION_LIMIT {
        local_sections_brute(s, ctx)
    } else {
        local_sections_by_states(s, ctx)
    }
}

/// An operational description: one assignment per context, aligned with its effects.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Description {
    pub values: Vec<Vec<BoolVal>>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DescriptionJson {
    pub context: usize,
    pub values: Vec<(String, String)>,
}

impl Description {
    pub fn of_state(s: &StateSpace, contexts: &[Context], x: Id) -> Description {
        Description {
            values: contexts
                .iter()
                .map(|c| c.effects.iter().map(|l| l.eval(s, x)).collect())
                .collect(),
        }
    }

    /// Pointwise `∧`.
    pub fn meet(&self, other: &Description) -> Description {
        Description {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x.meet(y)).collect())
                .collect(),
        }
    }

    pub fn to_json(&self, s: &StateSpace, contexts: &[Context]) -> Vec<DescriptionJson> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, vals)| DescriptionJson {
                context: i,
                values: contexts[i]
                    .effects
                    .iter()
                    .zip(vals)
                    .map(|(l, v)| {
                        let tag = match v {
                            BoolVal::Yes => "Y",
                            BoolVal::No => "N",
                            BoolVal::Bot => "B",
                        };
                        (l.label(s), tag.to_string())
                    })
                    .collect(),
            })
            .collect()
    }
}

/// First disagreement between two contexts on a shared effect.
fn overlap_clash(contexts: &[Context], d: &Description) -> Option<(usize, usize, Effect)> {
    for (i, ci) in contexts.iter().enumerate() {
        for (j, cj) in contexts.iter().enumerate().skip(i + 1) {
            for (a, l) in ci.effects.iter().enumerate() {
                if let Some(b) = cj.position(l) {
                    if d.values[i][a] != d.values[j][b] {
                        return Some((i, j, *l));
                    }
                }
            }
        }
    }
    None
}

/// Every coherent description over the given cover, by backtracking over local
/// sections with agreement on overlaps.
pub fn coherent_descriptions(s: &StateSpace, contexts: &[Context], cap: usize) -> Result<Vec<Description>> {
    let sections: Vec<Vec<Vec<BoolVal>>> = contexts.iter().map(|c| local_sections(s, c)).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<Vec<BoolVal>> = Vec::new();
    backtrack(contexts, &sections, &mut chosen, &mut out, cap)?;
    out.sort();
    Ok(out)
}

fn backtrack(
    contexts: &[Context],
    sections: &[Vec<Vec<BoolVal>>],
    chosen: &mut Vec<Vec<BoolVal>>,
    out: &mut Vec<Description>,
    cap: usize,
) -> Result<()> {
    let i = chosen.len();
    if i == contexts.len() {
        if out.len() >= cap {
            return Err(Error::Cap { what: "coherent descriptions".into(), limit: cap, count: out.len() + 1 });
        }
        out.push(Description { values: chosen.clone() });
        return Ok(());
    }
    for sec in &sections[i] {
        let agrees = (0..i).all(|j| {
            contexts[i].effects.iter().enumerate().all(|(a, l)| {
                contexts[j].position(l).is_none_or(|b| chosen[j][b] == sec[a])
            })
        });
        if agrees {
            chosen.push(sec.clone());
            backtrack(contexts, sections, chosen, out, cap)?;
            chosen.pop();
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct Resolution {
    /// `Σ^C` per context.
    pub per_context: Vec<Option<Id>>,
    /// `Σ_𝔇`, the join of the Type-1 ontic states.
    pub global: Option<Id>,
    pub coherent: bool,
    /// `Σ_𝔇` exists and reproduces every context value.
    pub admissible: bool,
    /// Some real state reproduces every context value.
    pub globally_defined: bool,
    /// First overlap disagreement: (context, context, effect label).
    pub clash: Option<(usize, usize, String)>,
}

/// The ontic state of a description. Law violations inside a context are errors;
/// overlap disagreements are reported in the result.
pub fn resolve_description(
    emb: &RealStructureEmbedding,
    contexts: &[Context],
    d: &Description,
) -> Result<Resolution> {
    let s = &emb.ambient;
    if d.values.len() != contexts.len() {
        return input("description does not match the cover");
    }
    for (i, c) in contexts.iter().enumerate() {
        if d.values[i].len() != c.effects.len() {
            return input(format!("context {} has the wrong number of values", i));
        }
        check_local_laws(s, c, &d.values[i])
            .map_err(|e| Error::Incoherent(format!("context {}: {}", i, e)))?;
    }
    let clash = overlap_clash(contexts, d).map(|(i, j, l)| (i, j, l.label(s)));
    let per_context: Vec<Option<Id>> = contexts
        .iter()
        .zip(&d.values)
        .map(|(c, vals)| {
            let yes: Vec<Effect> = c
                .effects
                .iter()
                .zip(vals)
                .filter(|(_, v)| **v == BoolVal::Yes)
                .map(|(l, _)| *l)
                .collect();
            let lc = crate::chu::effect_meet_all(s, &yes);
            let states: Vec<Id> = (0..s.n()).filter(|&x| lc.eval(s, x) == BoolVal::Yes).collect();
            s.meet_all(&states).ok()
        })
        .collect();
    let mut global = Some(s.bottom());
    for (c, sc) in contexts.iter().zip(&per_context) {
        if let ContextKind::Type1(_) = c.kind {
            global = match (global, sc) {
                (Some(g), Some(x)) => s.join(g, *x),
                _ => None,
            };
        }
    }
    let reproduces = |x: Id| {
        contexts
            .iter()
            .zip(&d.values)
            .all(|(c, vals)| c.effects.iter().zip(vals).all(|(l, v)| l.eval(s, x) == *v))
    };
    let admissible = global.is_some_and(reproduces);
    let globally_defined = emb.reals().into_iter().any(reproduces);
    Ok(Resolution {
        per_context,
        global,
        coherent: clash.is_none(),
        admissible,
        globally_defined,
        clash,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelIsoReport {
    pub contexts: usize,
    pub descriptions: usize,
    pub states: usize,
    pub bijective: bool,
    pub meet_homomorphism: bool,
    pub contextual: bool,
    /// States reached only by descriptions that are not globally defined.
    pub non_global: Vec<String>,
    pub failures: Vec<String>,
}

/// Enumerates the empirical model over the computed cover and compares it with the
/// state space.
pub fn verify_model_iso(emb: &RealStructureEmbedding, contexts: &[Context], cap: usize) -> Result<ModelIsoReport> {
    let s = &emb.ambient;
    let descs = coherent_descriptions(s, contexts, cap)?;
    let mut failures = Vec::new();
    let mut image: HashMap<&Description, Id> = HashMap::new();
    let mut non_global = Vec::new();
    let mut contextual = false;
    for d in &descs {
        let r = resolve_description(emb, contexts, d)?;
        match (r.admissible, r.global) {
            (true, Some(g)) => {
                image.insert(d, g);
                if !r.globally_defined {
                    contextual = true;
                    non_global.push(s.label(g).to_string());
                }
            }
            _ => failures.push("coherent description without an admissible ontic state".into()),
        }
    }
    let mut hit = vec![0usize; s.n()];
    for &g in image.values() {
        hit[g] += 1;
    }
    for x in 0..s.n() {
        let dx = Description::of_state(s, contexts, x);
        if image.get(&dx) != Some(&x) {
            failures.push(format!("state {} does not round-trip", s.label(x)));
        }
    }
    let bijective = image.len() == descs.len() && hit.iter().all(|&h| h == 1);
    let mut meet_homomorphism = true;
    for d1 in &descs {
        for d2 in &descs {
            let m = d1.meet(d2);
            let ok = match (image.get(&m), image.get(d1), image.get(d2)) {
                (Some(&x), Some(&a), Some(&b)) => x == s.meet(a, b),
                _ => false,
            };
            if !ok {
                meet_homomorphism = false;
            }
        }
    }
    if !meet_homomorphism {
        failures.push("meet of descriptions does not map to the meet of states".into());
    }
    non_global.sort();
    Ok(ModelIsoReport {
        contexts: contexts.len(),
        descriptions: descs.len(),
        states: s.n(),
        bijective,
        meet_homomorphism,
        contextual,
        non_global,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontic::{Completion, DEFAULT_CAP};
    use crate::real::RealSpace;

    fn eff(s: &StateSpace, y: Option<&str>, n: Option<&str>) -> Effect {
        Effect { yes: y.map(|v| s.id(v).unwrap()), no: n.map(|v| s.id(v).unwrap()) }
    }

    #[test]
    fn simplex_pair_is_compatible() {
        let z = RealSpace::simplex(3).unwrap();
        let emb = z.embedding();
        let s = z.space();
        let l1 = eff(s, Some("u1"), Some("u2^u3"));
        let l2 = eff(s, Some("u2"), Some("u1^u3"));
        let j = find_joint_morphism(&emb, &[l1, l2]).unwrap().unwrap();
        assert_eq!(j.label(s.id("u1").unwrap()), "Y⊗N");
    }

    #[test]
    fn completion_pair_is_not_compatible() {
        let c = Completion::enumerate(&RealSpace::zprime(2).unwrap(), DEFAULT_CAP).unwrap();
        let s = c.space();
        let la = eff(s, Some("a"), Some("a*"));
        let lb = eff(s, Some("b"), Some("b*"));
        assert!(find_joint_morphism(c.embedding(), &[la, lb]).unwrap().is_none());
        assert!(find_joint_morphism(c.embedding(), &[la, la]).unwrap().is_some());
    }

    #[test]
    fn type2_context_of_a() {
        let c = Completion::enumerate(&RealSpace::zprime(2).unwrap(), DEFAULT_CAP).unwrap();
        let s = c.space();
        let cl = context_closure(s, &[eff(s, Some("a"), Some("a*"))]);
        assert_eq!(cl.len(), 9);
        assert_eq!(generators(s, &cl).len(), 1);
    }
}
