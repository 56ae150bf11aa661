//! Genuine relative entropy of entanglement in closed form.
//!
//! Each entangled region carries an explicit closest biseparable state on
//! the border of the biseparable polytope, in one of five boundary classes;
//! the relative entropy to that state reproduces the dispatched closed-form
//! value to machine precision, which is the main internal consistency check
//! of the whole artifact.

use crate::error::{Error, Result};
use crate::region::{self, Half, Quad, Region, RegionLabel};
use crate::state::{block_indices, block_params, FVector, BASIS};

/// Binary entropy `H2(x) = -x log2 x - (1-x) log2 (1-x)` with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainError {
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(h2(x))
}

fn h2(x: f64) -> f64 {
    let term = |y: f64| if y > 0.0 { -y * y.log2() } else { 0.0 };
    term(x) + term(1.0 - x)
}

/// `H2` with the argument snapped into `[0, 1]`; formula arguments are
/// ratios that can stray by rounding only.
fn h2c(x: f64) -> f64 {
    debug_assert!((-1e-9..=1.0 + 1e-9).contains(&x));
    h2(x.clamp(0.0, 1.0))
}

/// `x * H2(num / x)` with the `x = 0` limit of 0.
fn xh2(x: f64, num: f64) -> f64 {
    if x > 0.0 {
        x * h2c(num / x)
    } else {
        0.0
    }
}

/// Relative entropy `sum F log2(F / L)` in bits; infinite when `L` lacks
/// support somewhere `F` has mass.
pub fn relative_entropy(f: &FVector, l: &FVector) -> f64 {
    let mut acc = 0.0;
    for a in 0..BASIS {
        let x = f[a];
        if x > 0.0 {
            let y = l[a];
            if y <= 0.0 {
                return f64::INFINITY;
            }
            acc += x * (x / y).log2();
        }
    }
    acc
}

/// Value on region A' (class I closest states).
pub fn e_a(q: &Quad) -> f64 {
    1.0 - h2c(q.p0 + q.p3)
}

/// Value on regions C1/C2 (class II).
pub fn e_c(q: &Quad) -> f64 {
    let w = 1.0 - q.p3 - q.p7;
    if w <= 0.0 {
        return 0.0;
    }
    w * (1.0 - h2c(q.p0 / w))
}

/// Value on region B (class III).
pub fn e_b(q: &Quad) -> f64 {
    1.0 - xh2(q.p3 + q.p7, q.p3) - xh2(1.0 - q.p3 - q.p7, q.p0)
}

/// Value on regions A''' and D1' (class IV).
pub fn e_a_triple_prime(q: &Quad) -> f64 {
    let w = 1.0 - q.p0 - q.p4;
    if w <= 0.0 {
        return 0.0;
    }
    w * (1.0 - h2c(q.p3 / w))
}

/// Value on region A'' (class V).
pub fn e_a_double_prime(q: &Quad) -> f64 {
    1.0 - xh2(q.p0 + q.p4, q.p0) - xh2(1.0 - q.p0 - q.p4, q.p3)
}

/// Which closed form a result came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReeFormula {
    EA,
    EB,
    EC,
    EADoublePrime,
    EATriplePrime,
    Zero,
}

impl std::fmt::Display for ReeFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReeFormula::EA => "E_A",
            ReeFormula::EB => "E_B",
            ReeFormula::EC => "E_C",
            ReeFormula::EADoublePrime => "E_A''",
            ReeFormula::EATriplePrime => "E_A'''",
            ReeFormula::Zero => "zero",
        })
    }
}

pub fn formula_of(region: Region) -> ReeFormula {
    match region {
        Region::APrime => ReeFormula::EA,
        Region::B => ReeFormula::EB,
        Region::C1 | Region::C2 => ReeFormula::EC,
        Region::ADoublePrime => ReeFormula::EADoublePrime,
        Region::ATriplePrime | Region::D1Prime => ReeFormula::EATriplePrime,
        Region::D1DoublePrime | Region::D2 | Region::Biseparable => ReeFormula::Zero,
    }
}

/// Dispatches the closed form for `region`, after checking that the quad
/// actually lies in it.
pub fn formula_value(region: Region, quad: &Quad) -> Result<f64> {
    let actual = region::classify_quad(*quad)?;
    if actual != region {
        return Err(Error::RegionMismatch {
            expected: region.to_string(),
        });
    }
    Ok(match formula_of(region) {
        ReeFormula::EA => e_a(quad),
        ReeFormula::EB => e_b(quad),
        ReeFormula::EC => e_c(quad),
        ReeFormula::EADoublePrime => e_a_double_prime(quad),
        ReeFormula::EATriplePrime => e_a_triple_prime(quad),
        ReeFormula::Zero => 0.0,
    })
}

/// Boundary class of a closest biseparable state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryClass {
    I,
    II,
    III,
    IV,
    V,
    /// The input was already biseparable and is its own closest state.
    SelfState,
}

impl std::fmt::Display for BoundaryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundaryClass::I => "I",
            BoundaryClass::II => "II",
            BoundaryClass::III => "III",
            BoundaryClass::IV => "IV",
            BoundaryClass::V => "V",
            BoundaryClass::SelfState => "Self",
        })
    }
}

pub fn class_of(region: Region) -> BoundaryClass {
    match region {
        Region::APrime => BoundaryClass::I,
        Region::C1 | Region::C2 => BoundaryClass::II,
        Region::B => BoundaryClass::III,
        Region::ATriplePrime | Region::D1Prime => BoundaryClass::IV,
        Region::ADoublePrime => BoundaryClass::V,
        Region::D1DoublePrime | Region::D2 | Region::Biseparable => BoundaryClass::SelfState,
    }
}

/// A biseparable state on the polytope border, closest to some input.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosestState {
    pub lambda: FVector,
    pub class_tag: BoundaryClass,
}

/// Full analytic result.
#[derive(Clone, Debug)]
pub struct ReeResult {
    /// Genuine relative entropy of entanglement in bits.
    pub value: f64,
    pub region: RegionLabel,
    pub closest: ClosestState,
    pub formula: ReeFormula,
}

/// Block bookkeeping for one inequality half: the two blocks whose maxima
/// play `p0`/`p3`, and the two off-half blocks.
struct HalfBlocks {
    main: [usize; 4],
    partner: [usize; 4],
    off: [usize; 8],
}

impl HalfBlocks {
    fn new(half: Half) -> Self {
        let (main, partner, off_a, off_b) = match half {
            Half::First => ((0, 0), (1, 1), (0, 1), (1, 0)),
            Half::Second => ((0, 1), (1, 0), (0, 0), (1, 1)),
        };
        let a = block_indices(off_a.0, off_a.1);
        let b = block_indices(off_b.0, off_b.1);
        let mut off = [0usize; 8];
        off[..4].copy_from_slice(&a);
        off[4..].copy_from_slice(&b);
        HalfBlocks {
            main: block_indices(main.0, main.1),
            partner: block_indices(partner.0, partner.1),
            off,
        }
    }
}

/// Scales group entries of `f` to total `target`; when the group carries no
/// mass the placement is free for the divergence, and the residual goes
/// uniformly onto the zero-mass entries of `spread` (the off-half blocks in
/// every degenerate case the regions admit).
fn scale_group(lam: &mut [f64; BASIS], f: &FVector, group: &[usize], target: f64, spread: &[usize]) {
    let mass: f64 = group.iter().map(|&a| f[a]).sum();
    if mass > 0.0 {
        let s = target / mass;
        for &a in group {
            lam[a] = f[a] * s;
        }
    } else if target > 0.0 {
        let zeros: Vec<usize> = spread.iter().copied().filter(|&a| f[a] == 0.0).collect();
        let zeros = if zeros.is_empty() {
            group.to_vec()
        } else {
            zeros
        };
        let share = target / zeros.len() as f64;
        for a in zeros {
            lam[a] += share;
        }
    }
}

/// Constructs the closest biseparable state for a classified input.
pub fn closest_state(f: &FVector, label: &RegionLabel) -> Result<ClosestState> {
    let class = class_of(label.region);
    if class == BoundaryClass::SelfState {
        return Ok(ClosestState {
            lambda: f.clone(),
            class_tag: class,
        });
    }
    let half = label.half.ok_or(Error::RegionMismatch {
        expected: label.region.to_string(),
    })?;
    let p = block_params(f);
    let quad = region::quad_of(&p, half);
    let hb = HalfBlocks::new(half);
    let (b_main, b_partner) = match half {
        Half::First => (0usize, 3usize),
        Half::Second => (1usize, 2usize),
    };
    let m0 = p.argmax_index(b_main);
    let m3 = p.argmax_index(b_partner);
    let nonmax = |block: &[usize; 4], m: usize| -> Vec<usize> {
        block.iter().copied().filter(|&a| a != m).collect()
    };
    let mut others: Vec<usize> = hb.off.to_vec();
    let mut lam = [0.0f64; BASIS];

    match class {
        BoundaryClass::I => {
            let s = quad.p0 + quad.p3;
            lam[m0] = quad.p0 / (2.0 * s);
            lam[m3] = quad.p3 / (2.0 * s);
            others.extend(nonmax(&hb.main, m0));
            others.extend(nonmax(&hb.partner, m3));
            scale_group(&mut lam, f, &others, 0.5, &hb.off);
        }
        BoundaryClass::II => {
            lam[m0] = 0.5 * (1.0 - quad.p3 - quad.p7);
            for &a in &hb.partner {
                lam[a] = f[a];
            }
            others.extend(nonmax(&hb.main, m0));
            scale_group(&mut lam, f, &others, 0.5 * (1.0 - quad.p3 - quad.p7), &hb.off);
        }
        BoundaryClass::III => {
            lam[m0] = 0.5 * (1.0 - quad.p3 - quad.p7);
            lam[m3] = 0.5 * (quad.p3 + quad.p7);
            let partner_rest = nonmax(&hb.partner, m3);
            scale_group(
                &mut lam,
                f,
                &partner_rest,
                0.5 * (quad.p3 + quad.p7),
                &partner_rest,
            );
            others.extend(nonmax(&hb.main, m0));
            scale_group(&mut lam, f, &others, 0.5 * (1.0 - quad.p3 - quad.p7), &hb.off);
        }
        BoundaryClass::IV => {
            lam[m3] = 0.5 * (1.0 - quad.p0 - quad.p4);
            for &a in &hb.main {
                lam[a] = f[a];
            }
            others.extend(nonmax(&hb.partner, m3));
            scale_group(&mut lam, f, &others, 0.5 * (1.0 - quad.p0 - quad.p4), &hb.off);
        }
        BoundaryClass::V => {
            lam[m3] = 0.5 * (1.0 - quad.p0 - quad.p4);
            lam[m0] = 0.5 * (quad.p0 + quad.p4);
            let main_rest = nonmax(&hb.main, m0);
            scale_group(&mut lam, f, &main_rest, 0.5 * (quad.p0 + quad.p4), &main_rest);
            others.extend(nonmax(&hb.partner, m3));
            scale_group(&mut lam, f, &others, 0.5 * (1.0 - quad.p0 - quad.p4), &hb.off);
        }
        BoundaryClass::SelfState => unreachable!(),
    }

    let lambda = FVector::from_raw_unchecked(lam);
    debug_assert!({
        let sum: f64 = lam.iter().sum();
        (sum - 1.0).abs() < 1e-12 && lam.iter().all(|&x| x >= 0.0)
    });
    debug_assert!(matches!(
        crate::criteria::biseparable_verdict(&lambda, 1e-12),
        Ok((true, _))
    ));
    Ok(ClosestState {
        lambda,
        class_tag: class,
    })
}

/// Classifies and assembles the analytic genuine REE.
pub fn genuine_ree(f: &FVector, eps: f64) -> Result<ReeResult> {
    let label = region::classify(f, eps)?;
    if !label.is_entangled() {
        return Ok(ReeResult {
            value: 0.0,
            region: label,
            closest: ClosestState {
                lambda: f.clone(),
                class_tag: BoundaryClass::SelfState,
            },
            formula: ReeFormula::Zero,
        });
    }
    let half = label.half.expect("entangled labels carry a half");
    let quad = region::quad_of(&block_params(f), half);
    let value = formula_value(label.region, &quad)?;
    let closest = closest_state(f, &label)?;
    Ok(ReeResult {
        value,
        region: label,
        closest,
        formula: formula_of(label.region),
    })
}

/// The appendix comparison profile
/// `E(x) = 1 - x H2(q/x) - (1-x) H2(p/(1-x))` on `q <= x <= 1-p`.
pub fn edge_profile(p: f64, q: f64, x: f64) -> Result<f64> {
    if p < 0.0 || q < 0.0 || x < q || x > 1.0 - p {
        return Err(Error::DomainError {
            value: x,
            domain: "q <= x <= 1-p with p, q >= 0",
        });
    }
    Ok(1.0 - xh2(x, q) - xh2(1.0 - x, p))
}

/// The sole extremal point `x* = q/(p+q)` of the profile.
pub fn edge_profile_minimizer(p: f64, q: f64) -> Result<f64> {
    if p < 0.0 || q < 0.0 || p + q <= 0.0 {
        return Err(Error::DomainError {
            value: p + q,
            domain: "p + q > 0",
        });
    }
    Ok(q / (p + q))
}
