//! Reduction of the transfer map to a real 3×3 system on the Bloch
//! parameters, and rank/conditioning classification of that system.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::matrix::TransferMatrix;
use crate::density::BlochVector;
use crate::error::{Error, Result};

/// Singular values at or below this are zero regardless of the relative
/// tolerance.
pub const ABSOLUTE_RANK_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `|det A|` below this marks a singular instant.
    pub det: f64,
    /// Relative singular-value cutoff for the numerical rank.
    pub rank: f64,
    /// Max-entry residual for perfect-transfer checks.
    pub pst: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { det: 1e-8, rank: 1e-8, pst: 1e-8 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("det", self.det), ("rank", self.rank), ("pst", self.pst)] {
            if !(value > 0.0) {
                return Err(Error::BadTolerance { name, value });
            }
        }
        Ok(())
    }
}

/// Observables `(Re ρ^R_01, Im ρ^R_01, ρ^R_00) = A x + a₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoSystem {
    pub a: Matrix3<f64>,
    pub offset: Vector3<f64>,
    pub t: f64,
}

impl InfoSystem {
    pub fn apply(&self, x: &BlochVector) -> Vector3<f64> {
        self.apply_raw(&Vector3::from(x.as_array()))
    }

    pub fn apply_raw(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.a * x + self.offset
    }

    pub fn det(&self) -> f64 {
        self.a.determinant()
    }
}

/// Expands `ρ^R = T ρ^S` with `ρ^S_00 = x1`, `ρ^S_01 = x2 + i x3`,
/// `ρ^S_10 = x2 − i x3`, `ρ^S_11 = 1 − x1`.
pub fn compute_info_system(tm: &TransferMatrix) -> InfoSystem {
    let c = |g, d, a, b| tm.get(g, d, a, b);
    let i = num_complex::Complex64::new(0.0, 1.0);

    // coefficient of x1, x2, x3 and the constant, for a receiver pair
    let coeffs = |g, d| {
        [
            c(g, d, 0, 0) - c(g, d, 1, 1),
            c(g, d, 0, 1) + c(g, d, 1, 0),
            i * (c(g, d, 0, 1) - c(g, d, 1, 0)),
            c(g, d, 1, 1),
        ]
    };
    let coh = coeffs(0, 1);
    let pop = coeffs(0, 0);
    let a = Matrix3::new(
        coh[0].re, coh[1].re, coh[2].re, //
        coh[0].im, coh[1].im, coh[2].im, //
        pop[0].re, pop[1].re, pop[2].re,
    );
    let offset = Vector3::new(coh[3].re, coh[3].im, pop[3].re);
    InfoSystem { a, offset, t: tm.t }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Complete,
    Partial,
    None,
}

impl Classification {
    pub fn from_rank(rank: usize) -> Self {
        match rank {
            0 => Classification::None,
            3 => Classification::Complete,
            _ => Classification::Partial,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Complete => "complete",
            Classification::Partial => "partial",
            Classification::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferClass {
    pub rank: usize,
    pub det: f64,
    pub classification: Classification,
    /// `σ_max / σ_min`; infinite when singular.
    pub condition_number: f64,
    /// Nonincreasing.
    pub singular_values: [f64; 3],
    /// `|det| < det_tol`.
    pub near_singular: bool,
}

/// Singular values of a 3×3 matrix, nonincreasing.
pub(crate) fn sorted_singular_values(m: &Matrix3<f64>) -> [f64; 3] {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    [s[0], s[1], s[2]]
}

pub(crate) fn numerical_rank(s: &[f64; 3], rank_tol: f64) -> usize {
    if !(s[0] > ABSOLUTE_RANK_FLOOR) {
        return 0;
    }
    s.iter().filter(|&&v| v >= rank_tol * s[0] && v > ABSOLUTE_RANK_FLOOR).count()
}

pub(crate) fn condition_number(s: &[f64; 3]) -> f64 {
    if s[2] > ABSOLUTE_RANK_FLOOR {
        s[0] / s[2]
    } else {
        f64::INFINITY
    }
}

pub fn classify(info: &InfoSystem, det_tol: f64, rank_tol: f64) -> Result<TransferClass> {
    if !(det_tol > 0.0) {
        return Err(Error::BadTolerance { name: "det", value: det_tol });
    }
    if !(rank_tol > 0.0) {
        return Err(Error::BadTolerance { name: "rank", value: rank_tol });
    }
    let s = sorted_singular_values(&info.a);
    let rank = numerical_rank(&s, rank_tol);
    let det = info.det();
    Ok(TransferClass {
        rank,
        det,
        classification: Classification::from_rank(rank),
        condition_number: condition_number(&s),
        singular_values: s,
        near_singular: det.abs() < det_tol,
    })
}
