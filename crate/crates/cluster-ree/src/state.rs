//! Cluster-diagonal states and their block-parameter reduction.
//!
//! A cluster-diagonal state is fully described by the 16 probabilities
//! `F[a]` with `a = 8*alpha + 4*beta + 2*gamma + delta`. The four `(alpha,
//! delta)` blocks reduce the state to eight parameters `p0..p7`: block maxima
//! `p0..p3` and block residuals `p4..p7`. Everything downstream (criteria,
//! regions, entanglement values) depends on the state only through these.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::{self, Half, Quad, Region};

/// Number of cluster basis states for four qubits.
pub const BASIS: usize = 16;

/// Rejection budget for region-targeted sampling.
const SAMPLE_BUDGET: u64 = 1_000_000;

/// Flat index of the basis label `(alpha, beta, gamma, delta)`.
#[inline]
pub fn index(alpha: usize, beta: usize, gamma: usize, delta: usize) -> usize {
    8 * alpha + 4 * beta + 2 * gamma + delta
}

/// Inverse of [`index`].
#[inline]
pub fn label(a: usize) -> (usize, usize, usize, usize) {
    ((a >> 3) & 1, (a >> 2) & 1, (a >> 1) & 1, a & 1)
}

/// The four flat indices of block `(alpha, delta)`, in `(beta, gamma)` order.
#[inline]
pub fn block_indices(alpha: usize, delta: usize) -> [usize; 4] {
    [
        index(alpha, 0, 0, delta),
        index(alpha, 0, 1, delta),
        index(alpha, 1, 0, delta),
        index(alpha, 1, 1, delta),
    ]
}

/// `(alpha, delta)` of block id `b = 2*alpha + delta`.
#[inline]
pub fn block_label(b: usize) -> (usize, usize) {
    ((b >> 1) & 1, b & 1)
}

#[derive(Serialize, Deserialize)]
struct FVectorRepr {
    #[serde(rename = "F")]
    f: Vec<f64>,
}

/// The 16 cluster-basis probabilities of a cluster-diagonal state.
///
/// Entries are nonnegative and sum to 1 within 1e-10. Serialized as
/// `{"F": [16 numbers]}` in index order `a = 0..15`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FVectorRepr", into = "FVectorRepr")]
pub struct FVector([f64; BASIS]);

impl TryFrom<FVectorRepr> for FVector {
    type Error = Error;
    fn try_from(repr: FVectorRepr) -> Result<Self> {
        if repr.f.len() != BASIS {
            return Err(Error::DomainError {
                value: repr.f.len() as f64,
                domain: "F must have exactly 16 entries",
            });
        }
        let mut raw = [0.0; BASIS];
        raw.copy_from_slice(&repr.f);
        validate(&raw)
    }
}

impl From<FVector> for FVectorRepr {
    fn from(f: FVector) -> Self {
        FVectorRepr { f: f.0.to_vec() }
    }
}

impl FVector {
    /// Validating constructor; see [`validate`].
    pub fn new(raw: [f64; BASIS]) -> Result<Self> {
        validate(&raw)
    }

    pub(crate) fn from_raw_unchecked(raw: [f64; BASIS]) -> Self {
        FVector(raw)
    }

    pub fn values(&self) -> &[f64; BASIS] {
        &self.0
    }

    /// The maximally mixed state, `F[a] = 1/16` for all `a`.
    pub fn uniform() -> Self {
        FVector([1.0 / BASIS as f64; BASIS])
    }

    /// The pure cluster basis state `|Cl_a><Cl_a|`.
    pub fn basis(a: usize) -> Self {
        assert!(a < BASIS);
        let mut raw = [0.0; BASIS];
        raw[a] = 1.0;
        FVector(raw)
    }
}

impl std::ops::Index<usize> for FVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Checks a raw 16-vector and returns it as a valid [`FVector`].
///
/// Entries in `[-1e-12, 0)` are clamped to 0; anything more negative is
/// rejected. The sum must be within 1e-8 of 1; deviations above 1e-12 are
/// renormalized away, smaller ones are kept bit-for-bit so that generator
/// output round-trips unchanged.
pub fn validate(raw: &[f64; BASIS]) -> Result<FVector> {
    let mut v = *raw;
    for (i, x) in v.iter_mut().enumerate() {
        if !x.is_finite() || *x < -1e-12 {
            return Err(Error::NegativeEntry {
                index: i,
                value: *x,
            });
        }
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { sum });
    }
    if (sum - 1.0).abs() > 1e-12 {
        for x in v.iter_mut() {
            *x /= sum;
        }
    }
    Ok(FVector(v))
}

/// Block maxima `p0..p3` and residuals `p4..p7`, with argmax bookkeeping.
///
/// `p[2*alpha + delta]` is the maximum of block `(alpha, delta)` and
/// `p[4 + 2*alpha + delta]` the rest of that block's mass. `argmax[b]` is the
/// `(beta, gamma)` position that realized the maximum of block `b`, ties
/// broken to the smallest `(beta, gamma)` lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockParams {
    pub p: [f64; 8],
    pub argmax: [(u8, u8); 4],
}

impl BlockParams {
    /// Flat basis index of the entry realizing the maximum of block `b`.
    pub fn argmax_index(&self, b: usize) -> usize {
        let (alpha, delta) = block_label(b);
        let (beta, gamma) = self.argmax[b];
        index(alpha, beta as usize, gamma as usize, delta)
    }
}

/// Reduces a state to its eight block parameters.
pub fn block_params(f: &FVector) -> BlockParams {
    let v = f.values();
    let mut p = [0.0; 8];
    let mut argmax = [(0u8, 0u8); 4];
    for alpha in 0..2 {
        for delta in 0..2 {
            let b = 2 * alpha + delta;
            let mut best = f64::NEG_INFINITY;
            let mut arg = (0u8, 0u8);
            let mut best_at = 0usize;
            for beta in 0..2 {
                for gamma in 0..2 {
                    let x = v[index(alpha, beta, gamma, delta)];
                    if x > best {
                        best = x;
                        arg = (beta as u8, gamma as u8);
                        best_at = index(alpha, beta, gamma, delta);
                    }
                }
            }
            // Residual summed in ascending value order, so the parameters
            // are bit-identical under any permutation within the block.
            let mut rest: Vec<f64> = block_indices(alpha, delta)
                .iter()
                .filter(|&&a| a != best_at)
                .map(|&a| v[a])
                .collect();
            rest.sort_by(|a, b| a.partial_cmp(b).expect("finite entries"));
            p[b] = best;
            p[4 + b] = rest.iter().sum();
            argmax[b] = arg;
        }
    }
    BlockParams { p, argmax }
}

/// Per-qubit phase-flip probabilities.
#[derive(Clone, Copy, Debug)]
pub struct NoiseSpec {
    pub q: [f64; 4],
}

impl NoiseSpec {
    pub fn new(q: [f64; 4]) -> Result<Self> {
        for &qi in &q {
            if !(0.0..=1.0).contains(&qi) {
                return Err(Error::DomainError {
                    value: qi,
                    domain: "phase-flip probability in [0, 1]",
                });
            }
        }
        Ok(NoiseSpec { q })
    }
}

/// State after independent phase flips on `|Cl_0000>`.
///
/// `Z_i` toggles bit `i` of the cluster basis label, so the flip pattern `b`
/// lands on `|Cl_b>` with the product weight of the four channels.
pub fn dephasing_state(spec: &NoiseSpec) -> FVector {
    let mut raw = [0.0; BASIS];
    for (a, slot) in raw.iter_mut().enumerate() {
        let (b1, b2, b3, b4) = label(a);
        let bits = [b1, b2, b3, b4];
        let mut w = 1.0;
        for (i, &bit) in bits.iter().enumerate() {
            w *= if bit == 1 {
                spec.q[i]
            } else {
                1.0 - spec.q[i]
            };
        }
        *slot = w;
    }
    FVector::from_raw_unchecked(raw)
}

/// Applies the index map `(alpha, beta, gamma, delta) -> (!alpha, beta,
/// gamma, !delta)` that exchanges `(p0, p4) <-> (p3, p7)` and
/// `(p1, p5) <-> (p2, p6)`.
pub fn exchange_symmetry(f: &FVector) -> FVector {
    let mut raw = [0.0; BASIS];
    for (a, slot) in raw.iter_mut().enumerate() {
        *slot = f[a ^ 0b1001];
    }
    FVector::from_raw_unchecked(raw)
}

/// Region target for biased sampling.
#[derive(Clone, Copy, Debug)]
pub struct BiasTarget {
    pub region: Region,
    pub half: Half,
}

/// Deterministic random state; flat Dirichlet on the 15-simplex, or
/// rejection-sampled into the requested region when `bias` is given.
pub fn sample_random(seed: u64, bias: Option<&BiasTarget>) -> Result<FVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match bias {
        None => Ok(dirichlet(&mut rng)),
        Some(target) => sample_in_region(&mut rng, target),
    }
}

/// Deterministic corpus stratified over the seven entangled regions, first
/// half, plus a rotating share of second-half-driven states.
pub fn sample_corpus(seed: u64, n: usize) -> Result<Vec<FVector>> {
    const REGIONS: [Region; 7] = [
        Region::APrime,
        Region::ADoublePrime,
        Region::ATriplePrime,
        Region::B,
        Region::C1,
        Region::C2,
        Region::D1Prime,
    ];
    let targets: Vec<(u64, BiasTarget)> = (0..n)
        .map(|k| {
            let slot = k % 8;
            let target = if slot < 7 {
                BiasTarget {
                    region: REGIONS[slot],
                    half: Half::First,
                }
            } else {
                BiasTarget {
                    region: REGIONS[(k / 8) % 7],
                    half: Half::Second,
                }
            };
            (seed.wrapping_add(k as u64), target)
        })
        .collect();
    crate::exec::batch_map(&targets, |(s, t)| sample_random(*s, Some(t)))
        .into_iter()
        .collect()
}

fn dirichlet(rng: &mut ChaCha8Rng) -> FVector {
    loop {
        let mut raw = [0.0; BASIS];
        let mut sum = 0.0;
        for x in raw.iter_mut() {
            let u: f64 = rng.random();
            *x = -(1.0 - u).ln();
            sum += *x;
        }
        if sum > 0.0 {
            for x in raw.iter_mut() {
                *x /= sum;
            }
            if let Ok(f) = validate(&raw) {
                return f;
            }
        }
    }
}

fn sample_in_region(rng: &mut ChaCha8Rng, target: &BiasTarget) -> Result<FVector> {
    let mut attempts: u64 = 0;
    while attempts < SAMPLE_BUDGET {
        attempts += 1;
        let Some(quad) = propose_quad(rng, target.region) else {
            continue;
        };
        let Ok(f) = realize_quad_with_rng(rng, quad, target.half) else {
            continue;
        };
        if let Ok(got) = region::classify(&f, 0.0) {
            let half_ok = match got.half {
                Some(h) => h == target.half,
                None => !target.region.is_entangled(),
            };
            let region_ok = if target.region == Region::Biseparable {
                !got.region.is_entangled()
            } else {
                got.region == target.region
            };
            if region_ok && half_ok {
                return Ok(f);
            }
        }
    }
    Err(Error::RegionUnreachable {
        target: format!("{} ({})", target.region, target.half),
        attempts: SAMPLE_BUDGET,
    })
}

/// One box-shaped proposal for a quad inside `region`; the caller re-checks
/// exact membership, so the boxes only have to be roughly right.
fn propose_quad(rng: &mut ChaCha8Rng, region: Region) -> Option<Quad> {
    let u = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| -> Option<f64> {
        if hi > lo {
            Some(rng.random_range(lo..hi))
        } else {
            None
        }
    };
    let quad = match region {
        Region::APrime | Region::ADoublePrime | Region::ATriplePrime | Region::B | Region::C1 => {
            // Violated first inequality half: p0 + p3 > 1/2.
            let p0 = u(rng, 0.02, 0.95)?;
            let p3 = u(rng, (0.5 - p0).max(0.0), (1.0 - p0).min(0.9))?;
            let th = region::Thresholds::from_pair(p0, p3);
            match region {
                Region::APrime => {
                    let p7 = u(rng, 0.0, th.p_ab.min(3.0 * p3).min(1.0 - p0 - p3))?;
                    let p4 = u(rng, 0.0, th.p_a1a2.min(3.0 * p0).min(1.0 - p0 - p3 - p7))?;
                    Quad::new(p0, p3, p4, p7)
                }
                Region::ADoublePrime => {
                    let p7 = u(rng, 0.0, th.p_ab.min(3.0 * p3).min(1.0 - p0 - p3))?;
                    let p4 = u(rng, th.p_a1a2, p0.min(1.0 - p0 - p3 - p7))?;
                    Quad::new(p0, p3, p4, p7)
                }
                Region::ATriplePrime => {
                    let p7 = u(rng, 0.0, th.p_ab.min(3.0 * p3).min(1.0 - p0 - p3))?;
                    let p4 = u(rng, p0, (3.0 * p0).min(1.0 - p0 - p3 - p7))?;
                    Quad::new(p0, p3, p4, p7)
                }
                Region::B => {
                    let p7 = u(rng, th.p_ab, p3.min(3.0 * p3).min(1.0 - p0 - p3))?;
                    let p4 = u(rng, 0.0, (3.0 * p0).min(1.0 - p0 - p3 - p7))?;
                    Quad::new(p0, p3, p4, p7)
                }
                Region::C1 => {
                    let p7 = u(rng, p3, (3.0 * p3).min(1.0 - p0 - p3))?;
                    let p4 = u(rng, 0.0, (3.0 * p0).min(1.0 - p0 - p3 - p7))?;
                    Quad::new(p0, p3, p4, p7)
                }
                _ => unreachable!(),
            }
        }
        Region::C2 => {
            let p0 = u(rng, 0.05, 0.49)?;
            let p3 = u(rng, 0.001, 0.5 - p0)?;
            let p7 = u(
                rng,
                (1.0 - 2.0 * p0 - p3).max(p3),
                (3.0 * p3).min(1.0 - p0 - p3),
            )?;
            let p4 = u(rng, 0.0, (3.0 * p0).min(1.0 - p0 - p3 - p7))?;
            Quad::new(p0, p3, p4, p7)
        }
        Region::D1Prime => {
            let p0 = u(rng, 0.02, 0.48)?;
            let p3 = u(rng, 0.01, 0.5 - p0)?;
            let p7 = u(rng, 0.0, p3)?;
            let p4 = u(
                rng,
                (1.0 - p0 - 2.0 * p3).max(0.0),
                (3.0 * p0).min(1.0 - p0 - p3 - p7),
            )?;
            Quad::new(p0, p3, p4, p7)
        }
        Region::D1DoublePrime => {
            let p0 = u(rng, 0.02, 0.48)?;
            let p3 = u(rng, 0.01, 0.5 - p0)?;
            let p7 = u(rng, 0.0, p3)?;
            let p4 = u(
                rng,
                0.0,
                (1.0 - p0 - 2.0 * p3).min(3.0 * p0).min(1.0 - p0 - p3 - p7),
            )?;
            Quad::new(p0, p3, p4, p7)
        }
        Region::D2 | Region::Biseparable => {
            let p0 = u(rng, 0.02, 0.48)?;
            let p3 = u(rng, 0.001, 0.5 - p0)?;
            let p7 = u(rng, p3, (1.0 - 2.0 * p0 - p3).min(3.0 * p3))?;
            let p4 = u(rng, 0.0, (3.0 * p0).min(1.0 - p0 - p3 - p7))?;
            Quad::new(p0, p3, p4, p7)
        }
    };
    Some(quad)
}

/// Builds a state realizing the given block-parameter quad on `half`, with
/// deterministic equal splits of the residuals and leftover mass.
///
/// The block maxima sit at `(beta, gamma) = (0, 0)`; the leftover
/// `1 - p0 - p3 - p4 - p7` is spread evenly over the eight entries of the two
/// off-half blocks.
pub fn realize_quad(quad: Quad, half: Half) -> Result<FVector> {
    realize_quad_splits(quad, half, [1.0 / 3.0; 3], [1.0 / 3.0; 3], [0.125; 8])
}

fn realize_quad_with_rng(rng: &mut ChaCha8Rng, quad: Quad, half: Half) -> Result<FVector> {
    let split3 = |rng: &mut ChaCha8Rng, total: f64, cap: f64| -> [f64; 3] {
        for _ in 0..64 {
            let mut w = [0.0; 3];
            let mut s = 0.0;
            for x in w.iter_mut() {
                let u: f64 = rng.random();
                *x = -(1.0 - u).ln();
                s += *x;
            }
            if s <= 0.0 {
                continue;
            }
            for x in w.iter_mut() {
                *x /= s;
            }
            if w.iter().all(|&x| x * total <= cap) {
                return w;
            }
        }
        [1.0 / 3.0; 3]
    };
    let s0 = split3(rng, quad.p4, quad.p0);
    let s3 = split3(rng, quad.p7, quad.p3);
    let mut off = [0.0; 8];
    let mut s = 0.0;
    for x in off.iter_mut() {
        let u: f64 = rng.random();
        *x = -(1.0 - u).ln();
        s += *x;
    }
    if s > 0.0 {
        for x in off.iter_mut() {
            *x /= s;
        }
    } else {
        off = [0.125; 8];
    }
    realize_quad_splits(quad, half, s0, s3, off)
}

fn realize_quad_splits(
    quad: Quad,
    half: Half,
    split0: [f64; 3],
    split3: [f64; 3],
    split_off: [f64; 8],
) -> Result<FVector> {
    if quad.p0 < 0.0 || quad.p3 < 0.0 || quad.p4 < 0.0 || quad.p7 < 0.0 {
        return Err(Error::InvalidQuad {
            p0: quad.p0,
            p3: quad.p3,
            p4: quad.p4,
            p7: quad.p7,
            reason: "negative parameter",
        });
    }
    let leftover = 1.0 - quad.p0 - quad.p3 - quad.p4 - quad.p7;
    if leftover < -1e-12 || quad.p4 > 3.0 * quad.p0 + 1e-12 || quad.p7 > 3.0 * quad.p3 + 1e-12 {
        return Err(Error::InvalidQuad {
            p0: quad.p0,
            p3: quad.p3,
            p4: quad.p4,
            p7: quad.p7,
            reason: "unphysical block parameters",
        });
    }
    let leftover = leftover.max(0.0);
    let (b0, b3) = match half {
        Half::First => ((0, 0), (1, 1)),
        Half::Second => ((0, 1), (1, 0)),
    };
    let mut raw = [0.0; BASIS];
    let idx0 = block_indices(b0.0, b0.1);
    let idx3 = block_indices(b3.0, b3.1);
    raw[idx0[0]] = quad.p0;
    raw[idx3[0]] = quad.p3;
    for k in 0..3 {
        raw[idx0[k + 1]] = quad.p4 * split0[k];
        raw[idx3[k + 1]] = quad.p7 * split3[k];
    }
    let mut k = 0;
    for b in 0..4 {
        let (alpha, delta) = block_label(b);
        if (alpha, delta) == b0 || (alpha, delta) == b3 {
            continue;
        }
        for a in block_indices(alpha, delta) {
            raw[a] = leftover * split_off[k];
            k += 1;
        }
    }
    validate(&raw)
}
