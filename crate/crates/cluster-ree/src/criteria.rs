//! Necessary-and-sufficient biseparability criteria.
//!
//! The raw form enumerates every index instance of the two inequality
//! families and is kept deliberately literal: it is the slow oracle against
//! which the six reduced inequalities are tested. Violation of any instance
//! means genuine multipartite entanglement.

use crate::error::{Error, Result};
use crate::state::{block_indices, index, BlockParams, FVector};

pub const REDUCED_NAMES: [&str; 6] = ["v5", "v6", "v7", "v8", "v9", "v10"];

/// One violated instance of the original criteria.
#[derive(Clone, Debug, PartialEq)]
pub enum RawViolation {
    /// `2 F_{abgd} <= sum_{xi,eta} (F_{a xi eta d} + F_{a xi eta !d} + F_{!a xi eta d})`
    Single {
        alpha: u8,
        beta: u8,
        gamma: u8,
        delta: u8,
        margin: f64,
    },
    /// `2 F_{abgd} + 2 F_{!a mu nu !d} <= 1`-family instance.
    Pair {
        alpha: u8,
        beta: u8,
        gamma: u8,
        delta: u8,
        mu: u8,
        nu: u8,
        margin: f64,
    },
}

impl RawViolation {
    pub fn margin(&self) -> f64 {
        match self {
            RawViolation::Single { margin, .. } | RawViolation::Pair { margin, .. } => *margin,
        }
    }
}

/// Evaluates all 16 + 64 original inequality instances and returns those
/// whose left side exceeds the right by more than `eps`.
pub fn raw_criteria(f: &FVector, eps: f64) -> Vec<RawViolation> {
    let v = f.values();
    let block_sum = |alpha: usize, delta: usize| -> f64 {
        block_indices(alpha, delta).iter().map(|&a| v[a]).sum()
    };
    let mut out = Vec::new();
    for alpha in 0..2usize {
        for beta in 0..2usize {
            for gamma in 0..2usize {
                for delta in 0..2usize {
                    let own = v[index(alpha, beta, gamma, delta)];
                    let rhs =
                        block_sum(alpha, delta) + block_sum(alpha, 1 - delta) + block_sum(1 - alpha, delta);
                    let margin = 2.0 * own - rhs;
                    if margin > eps {
                        out.push(RawViolation::Single {
                            alpha: alpha as u8,
                            beta: beta as u8,
                            gamma: gamma as u8,
                            delta: delta as u8,
                            margin,
                        });
                    }
                    let rhs_pair = rhs + block_sum(1 - alpha, 1 - delta);
                    for mu in 0..2usize {
                        for nu in 0..2usize {
                            let partner = v[index(1 - alpha, mu, nu, 1 - delta)];
                            let margin = 2.0 * own + 2.0 * partner - rhs_pair;
                            if margin > eps {
                                out.push(RawViolation::Pair {
                                    alpha: alpha as u8,
                                    beta: beta as u8,
                                    gamma: gamma as u8,
                                    delta: delta as u8,
                                    mu: mu as u8,
                                    nu: nu as u8,
                                    margin,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Outcome of the six reduced inequalities.
///
/// `violated[k]` and `margins[k]` follow the order v5..v10; a flag is set iff
/// its margin exceeds `eps`. The two halves {v5,v6,v7} and {v8,v9,v10} are
/// never violated together for a valid state; both firing is reported as
/// [`Error::MutualExclusionBreach`]. `raw` is filled only where the slow
/// oracle has been run.
#[derive(Clone, Debug, Default)]
pub struct CriteriaReport {
    pub violated: [bool; 6],
    pub margins: [f64; 6],
    pub raw: Vec<RawViolation>,
}

impl CriteriaReport {
    pub fn any(&self) -> bool {
        self.violated.iter().any(|&b| b)
    }

    pub fn first_half(&self) -> bool {
        self.violated[..3].iter().any(|&b| b)
    }

    pub fn second_half(&self) -> bool {
        self.violated[3..].iter().any(|&b| b)
    }

    pub fn violated_names(&self) -> Vec<&'static str> {
        REDUCED_NAMES
            .iter()
            .zip(&self.violated)
            .filter_map(|(&n, &b)| b.then_some(n))
            .collect()
    }

    /// Attaches the slow-oracle violation list for `f`.
    pub fn with_raw(mut self, f: &FVector, eps: f64) -> Self {
        self.raw = raw_criteria(f, eps);
        self
    }
}

/// Evaluates the six reduced inequalities on block parameters.
pub fn reduced_criteria(p: &BlockParams, eps: f64) -> Result<CriteriaReport> {
    let q = &p.p;
    let margins = [
        q[0] + q[3] - 0.5,
        2.0 * q[0] + q[3] + q[7] - 1.0,
        2.0 * q[3] + q[0] + q[4] - 1.0,
        q[1] + q[2] - 0.5,
        2.0 * q[1] + q[2] + q[6] - 1.0,
        2.0 * q[2] + q[1] + q[5] - 1.0,
    ];
    let mut violated = [false; 6];
    for (flag, &m) in violated.iter_mut().zip(&margins) {
        *flag = m > eps;
    }
    let report = CriteriaReport {
        violated,
        margins,
        raw: Vec::new(),
    };
    if report.first_half() && report.second_half() {
        return Err(Error::MutualExclusionBreach);
    }
    Ok(report)
}

/// True iff no reduced inequality is violated; the report rides along.
pub fn biseparable_verdict(f: &FVector, eps: f64) -> Result<(bool, CriteriaReport)> {
    let report = reduced_criteria(&crate::state::block_params(f), eps)?;
    let biseparable = !report.any();
    Ok((biseparable, report))
}
