//! No-broadcasting and Bell non-locality.

use serde::Serialize;

use crate::chu::{check_morphism, measurement, Effect, B_BOT, B_NO, B_YES};
use crate::context::find_joint_morphism_capped;
use crate::error::{input, Error, Result};
use crate::ontic::{closure, in_k, ClosureMode};
use crate::order::Id;
use crate::real::RealSpace;
use crate::tensor::{Pair, TensorProduct, DEFAULT_TENSOR_CAP};

/// Spaces at most this large also get the joint-morphism search as a cross-check.
pub const CONFIRM_LIMIT: usize = 64;
const CONFIRM_SEARCH_CAP: usize = 200_000;

/// Marginal index pairs `(1)(3), (1)(4), (2)(3), (2)(4)` as 0-based coordinates of
/// `𝔅^⊗4` ordered `φ₁, φ₂, ρ₁, ρ₂`.
pub const MARGINALS: [(usize, usize); 4] = [(0, 2), (0, 3), (1, 2), (1, 3)];
pub const MARGINAL_NAMES: [&str; 4] = ["13", "14", "23", "24"];

/// Number of nonempty subsets of the 16 pure tuples of `𝔅^⊗4`.
pub const LAMBDA_CANDIDATES: usize = (1 << 16) - 1;

/// `𝔅 ⊗ 𝔅`, the target of every pairwise marginal.
pub fn bool_pair() -> TensorProduct {
    let b = RealSpace::boolean();
    TensorProduct::build(&b, &b, DEFAULT_TENSOR_CAP).expect("B⊗B is tiny")
}

/// `l(σ, σ*)` on a real space.
pub fn sharp_effect(rs: &RealSpace, sigma: Id) -> Result<Effect> {
    let star = rs
        .star(sigma)
        .ok_or_else(|| Error::Input(format!("{} has no star", rs.label(sigma))))?;
    Effect::new(rs.space(), Some(sigma), Some(star))
}

/// `Θ((f⊗g)(ξ)) = cl_c{(f⊗g)(ω) : ω ∈ Θ(ξ)}`, returned as a closed family of reals
/// in `target`.
pub fn tensor_image(
    src: &TensorProduct,
    theta: &[Id],
    target: &TensorProduct,
    f: &[Id],
    g: &[Id],
) -> Result<Vec<Id>> {
    let bottom = target.space().bottom();
    let mut img = Vec::with_capacity(theta.len());
    for &w in theta {
        let gens: Vec<Pair> = src.generators(w).iter().map(|&(s, t)| (f[s], g[t])).collect();
        let y = target.normalize(&gens)?;
        if y != bottom {
            img.push(y);
        }
    }
    if img.is_empty() {
        return Ok(vec![bottom]);
    }
    img.sort_unstable();
    img.dedup();
    let c = closure(target.real(), &img, ClosureMode::Full)?;
    if !in_k(target.real(), &c) {
        return Err(Error::Lift("tensor image is not admissible".into()));
    }
    Ok(c)
}

// ---------------------------------------------------------------- broadcasting

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BroadcastWitness {
    /// The diagonal map, with its image on every element.
    Diagonal { images: Vec<(String, String)>, morphism: bool, traces: bool },
    /// Forced values and the two incompatible demands on the image of bottom.
    Clash {
        sigma1: String,
        sigma2: String,
        forced: Vec<(String, String)>,
        bottom_first: String,
        bottom_second: String,
    },
    /// Neither a simplex nor a pair of pures the obstruction can use.
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct BroadcastReport {
    pub broadcasts: bool,
    pub simplex: bool,
    pub witness: BroadcastWitness,
    /// `Some(false)` when the joint-morphism search found no morphism with the two
    /// measurements as marginals; `None` when it was not run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint_found: Option<bool>,
}

pub fn broadcast_obstruction(rs: &RealSpace) -> Result<BroadcastReport> {
    if rs.has_unique_pure_decomposition() {
        return diagonal_broadcast(rs);
    }
    let pures = rs.pures();
    let pair = pures.iter().find_map(|&s1| {
        let s1s = rs.star(s1)?;
        pures
            .iter()
            .find(|&&s2| s2 != s1 && s2 != s1s && rs.star(s2).is_some())
            .map(|&s2| (s1, s2))
    });
    let Some((s1, s2)) = pair else {
        return Ok(BroadcastReport {
            broadcasts: false,
            simplex: false,
            witness: BroadcastWitness::Undecided,
            joint_found: None,
        });
    };
    let s = rs.space();
    let (e1, e2) = (sharp_effect(rs, s1)?, sharp_effect(rs, s2)?);
    let (m1, m2) = (measurement(s, &e1), measurement(s, &e2));
    let bb = bool_pair();
    let forced = |x: Id| -> Result<Id> {
        let hits: Vec<Id> = (0..bb.n())
            .filter(|&z| {
                bb.partial_trace(z, 1).ok() == Some(m1[x]) && bb.partial_trace(z, 2).ok() == Some(m2[x])
            })
            .collect();
        match hits.as_slice() {
            [z] => Ok(*z),
            _ => Err(Error::Unsupported(format!("value at {} is not forced", s.label(x)))),
        }
    };
    let (s1s, s2s) = (rs.star(s1).unwrap(), rs.star(s2).unwrap());
    let (p1, p1s, p2s) = (forced(s1)?, forced(s1s)?, forced(s2s)?);
    if s.meet(s1, s1s) != s.meet(s1s, s2s) {
        return input("obstruction needs σ₁ ⊓ σ₁* = σ₁* ⊓ σ₂*");
    }
    let (b1, b2) = (bb.meet(p1, p1s), bb.meet(p1s, p2s));
    let joint_found = if s.n() <= CONFIRM_LIMIT {
        match find_joint_morphism_capped(&rs.embedding(), &[e1, e2], CONFIRM_SEARCH_CAP) {
            Ok(j) => Some(j.is_some()),
            Err(Error::Cap { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let label = |z: Id| bb.label(z).to_string();
    Ok(BroadcastReport {
        broadcasts: b1 == b2 && joint_found != Some(false),
        simplex: false,
        witness: BroadcastWitness::Clash {
            sigma1: rs.label(s1).to_string(),
            sigma2: rs.label(s2).to_string(),
            forced: vec![
                (rs.label(s1).to_string(), label(p1)),
                (rs.label(s1s).to_string(), label(p1s)),
                (rs.label(s2s).to_string(), label(p2s)),
            ],
            bottom_first: label(b1),
            bottom_second: label(b2),
        },
        joint_found,
    })
}

fn diagonal_broadcast(rs: &RealSpace) -> Result<BroadcastReport> {
    let s = rs.space();
    let t = TensorProduct::build(rs, rs, DEFAULT_TENSOR_CAP)?;
    let psi: Vec<Id> = (0..s.n())
        .map(|x| {
            let gens: Vec<Pair> = s.pures_above(x).into_iter().map(|w| (w, w)).collect();
            t.normalize(&gens)
        })
        .collect::<Result<_>>()?;
    let morphism = check_morphism(s, t.space(), &psi).ok;
    let mut traces = true;
    for (x, &y) in psi.iter().enumerate() {
        traces &= t.partial_trace(y, 1)? == x && t.partial_trace(y, 2)? == x;
    }
    let images = psi.iter().enumerate().map(|(x, &y)| (s.label(x).to_string(), t.label(y).to_string())).collect();
    Ok(BroadcastReport {
        broadcasts: morphism && traces,
        simplex: true,
        witness: BroadcastWitness::Diagonal { images, morphism, traces },
        joint_found: None,
    })
}

// ---------------------------------------------------------------- Λ search

/// Precomputed pairwise traces of every element of `𝔅^⊗4`.
///
/// Pure tuple `t ∈ 0..16` has YES in coordinate `i` iff bit `i` of `t` is set. A
/// candidate is a nonempty mask over the 16 tuples (the meet of those pure tensors).
pub struct LambdaScan {
    pair: TensorProduct,
    /// Trace of each candidate, per marginal, as a mask over the pure pairs of `pair`.
    codes: Vec<[u8; 4]>,
    /// `pair` element for each nonempty mask over its pure pairs.
    code_id: [Id; 16],
}

fn coord(t: usize, i: usize) -> Id {
    if t >> i & 1 == 1 {
        B_YES
    } else {
        B_NO
    }
}

impl Default for LambdaScan {
    fn default() -> Self {
        Self::new()
    }
}

impl LambdaScan {
    pub fn new() -> LambdaScan {
        let pair = bool_pair();
        let pp = pair.pure_pairs().to_vec();
        let pos = |p: Pair| pp.iter().position(|&q| q == p).expect("pure pair");
        let mut code_id = [0; 16];
        for (c, slot) in code_id.iter_mut().enumerate().skip(1) {
            let gens: Vec<Pair> = (0..pp.len()).filter(|k| c >> k & 1 == 1).map(|k| pp[k]).collect();
            *slot = pair.normalize(&gens).expect("pure pairs normalise");
        }
        let single: Vec<[u8; 4]> = (0..16)
            .map(|t| MARGINALS.map(|(i, j)| 1u8 << pos((coord(t, i), coord(t, j)))))
            .collect();
        let mut codes = vec![[0u8; 4]; 1 << 16];
        for m in 1usize..1 << 16 {
            let low = m.trailing_zeros() as usize;
            let rest = codes[m & (m - 1)];
            codes[m] = std::array::from_fn(|k| rest[k] | single[low][k]);
        }
        LambdaScan { pair, codes, code_id }
    }

    pub fn pair(&self) -> &TensorProduct {
        &self.pair
    }

    /// `ζ_(i)(j)(Λ)` for the four marginals, as elements of `𝔅⊗𝔅`.
    pub fn traces(&self, mask: u16) -> [Id; 4] {
        self.codes[mask as usize].map(|c| self.code_id[c as usize])
    }

    pub fn satisfies(&self, mask: u16, phi: &[Id; 4]) -> bool {
        mask != 0 && self.traces(mask) == *phi
    }

    /// Smallest mask whose four traces equal `phi`, scanning all candidates.
    pub fn search(&self, phi: &[Id; 4]) -> Option<u16> {
        (1..=LAMBDA_CANDIDATES).map(|m| m as u16).find(|&m| self.satisfies(m, phi))
    }

    /// All pure tuples below a tuple of `𝔅` values (⊥ allows both outcomes).
    pub fn expand(values: [Id; 4]) -> u16 {
        let mut mask = 0u16;
        for t in 0..16 {
            if (0..4).all(|i| values[i] == B_BOT || values[i] == coord(t, i)) {
                mask |= 1 << t;
            }
        }
        mask
    }

    pub fn label(mask: u16) -> String {
        let sym = |v: Id| if v == B_YES { "Y" } else { "N" };
        (0..16)
            .filter(|t| mask >> t & 1 == 1)
            .map(|t| (0..4).map(|i| sym(coord(t, i))).collect::<Vec<_>>().join("⊗"))
            .collect::<Vec<_>>()
            .join(" ⊓ ")
    }
}

// ---------------------------------------------------------------- Bell scenario

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BellChoice {
    pub sigma1: Id,
    pub sigma2: Id,
    pub tau1: Id,
    pub tau2: Id,
}

/// `Σ = (σ₁⊗τ₁ ⊓ σ₂⊗τ₂) ⊔ (σ₁*⊗⊥ ⊓ ⊥⊗τ₁*)` in `Z′_{N_A} ⊗̂ Z′_{N_B}` with the
/// measurements `φᵢ = m_{l(σᵢ,σᵢ*)}`, `ρⱼ = m_{l(τⱼ,τⱼ*)}`.
pub struct BellScenario {
    pub tensor: TensorProduct,
    pub choice: BellChoice,
    /// The two real states whose join is `Σ`.
    pub parts: [Id; 2],
    /// `Θ(Σ)`.
    pub sigma: Vec<Id>,
    /// `φ₁, φ₂` on the left factor, `ρ₁, ρ₂` on the right, as maps into `𝔅`.
    pub phi: [Vec<Id>; 2],
    pub rho: [Vec<Id>; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaJson {
    pub name: String,
    pub theta: Vec<String>,
    pub hidden: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BellReport {
    pub sigma: SigmaJson,
    pub phi: std::collections::BTreeMap<String, String>,
    pub lambda: Option<String>,
    pub nonlocal: bool,
}

impl BellScenario {
    /// Default choice `σ₁ = a, σ₂ = b` on both sides.
    pub fn new(na: usize, nb: usize, cap: usize) -> Result<BellScenario> {
        let (a, b) = (RealSpace::zprime(na)?, RealSpace::zprime(nb)?);
        let tensor = TensorProduct::build(&a, &b, cap)?;
        let choice = BellChoice { sigma1: 1, sigma2: 3, tau1: 1, tau2: 3 };
        BellScenario::with_choice(tensor, choice)
    }

    /// Every admissible choice on an already built tensor product.
    pub fn admissible_choices(tensor: &TensorProduct) -> Vec<BellChoice> {
        let pick = |rs: &RealSpace| -> Vec<(Id, Id)> {
            let p = rs.pures();
            let mut out = Vec::new();
            for &x in p {
                for &y in p {
                    if x != y && Some(y) != rs.star(x) {
                        out.push((x, y));
                    }
                }
            }
            out
        };
        let mut out = Vec::new();
        for (s1, s2) in pick(tensor.left()) {
            for (t1, t2) in pick(tensor.right()) {
                out.push(BellChoice { sigma1: s1, sigma2: s2, tau1: t1, tau2: t2 });
            }
        }
        out
    }

    pub fn with_choice(tensor: TensorProduct, choice: BellChoice) -> Result<BellScenario> {
        let (a, b) = (tensor.left(), tensor.right());
        let BellChoice { sigma1: s1, sigma2: s2, tau1: t1, tau2: t2 } = choice;
        for (rs, x, y) in [(a, s1, s2), (b, t1, t2)] {
            if !rs.pures().contains(&x) || !rs.pures().contains(&y) || x == y || rs.star(x) == Some(y) {
                return input(format!("{} and {} are not an admissible pair", rs.label(x), rs.label(y)));
            }
        }
        let (s1s, t1s) = (a.star(s1).unwrap(), b.star(t1).unwrap());
        let g1 = tensor.normalize(&[(s1, t1), (s2, t2)])?;
        let g2 = tensor.normalize(&[(s1s, b.space().bottom()), (a.space().bottom(), t1s)])?;
        let mut sigma = closure(tensor.real(), &[g1, g2], ClosureMode::Full)?;
        if !in_k(tensor.real(), &sigma) {
            return Err(Error::Lift("the Bell join is not admissible".into()));
        }
        sigma.sort_unstable();
        let m = |rs: &RealSpace, x: Id| -> Result<Vec<Id>> { Ok(measurement(rs.space(), &sharp_effect(rs, x)?)) };
        let phi = [m(a, s1)?, m(a, s2)?];
        let rho = [m(b, t1)?, m(b, t2)?];
        Ok(BellScenario { tensor, choice, parts: [g1, g2], sigma, phi, rho })
    }

    pub fn is_hidden(&self) -> bool {
        self.sigma.len() > 1
    }

    /// `Φ_ab = (φ_a⊗ρ_b)(ξ)` for a closed family `ξ` of reals, in the order 13, 14, 23, 24.
    pub fn marginals_of(&self, theta: &[Id], bb: &TensorProduct) -> Result<[Id; 4]> {
        let mut out = [0; 4];
        for (k, &(i, j)) in MARGINALS.iter().enumerate() {
            let img = tensor_image(&self.tensor, theta, bb, &self.phi[i], &self.rho[j - 2])?;
            match img.as_slice() {
                [z] => out[k] = *z,
                _ => return Err(Error::Lift("marginal is hidden in B⊗B".into())),
            }
        }
        Ok(out)
    }

    pub fn marginals(&self, bb: &TensorProduct) -> Result<[Id; 4]> {
        self.marginals_of(&self.sigma, bb)
    }

    /// `⊓ᵢ φ₁(σᵢ)⊗φ₂(σᵢ)⊗ρ₁(τᵢ)⊗ρ₂(τᵢ)` over the generators of a real state.
    pub fn real_witness(&self, x: Id) -> u16 {
        self.tensor
            .generators(x)
            .iter()
            .map(|&(s, t)| LambdaScan::expand([self.phi[0][s], self.phi[1][s], self.rho[0][t], self.rho[1][t]]))
            .fold(0, |acc, m| acc | m)
    }

    pub fn sigma_name(&self) -> String {
        format!("({}) ⊔ ({})", self.tensor.label(self.parts[0]), self.tensor.label(self.parts[1]))
    }

    pub fn report(&self, scan: &LambdaScan) -> Result<BellReport> {
        let bb = scan.pair();
        let phi = self.marginals(bb)?;
        let lambda = scan.search(&phi);
        Ok(BellReport {
            sigma: SigmaJson {
                name: self.sigma_name(),
                theta: self.sigma.iter().map(|&w| self.tensor.label(w).to_string()).collect(),
                hidden: self.is_hidden(),
            },
            phi: MARGINAL_NAMES
                .iter()
                .zip(phi)
                .map(|(n, z)| (n.to_string(), bb.label(z).to_string()))
                .collect(),
            lambda: lambda.map(LambdaScan::label),
            nonlocal: lambda.is_none(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_bottom_everywhere() {
        assert_eq!(LambdaScan::expand([B_BOT; 4]), u16::MAX);
        assert_eq!(LambdaScan::expand([B_YES; 4]).count_ones(), 1);
        assert_eq!(LambdaScan::expand([B_YES, B_BOT, B_NO, B_BOT]).count_ones(), 4);
    }

    #[test]
    fn full_mask_traces_to_bottom() {
        let scan = LambdaScan::new();
        let bot = scan.pair().space().bottom();
        assert_eq!(scan.traces(u16::MAX), [bot; 4]);
    }
}
