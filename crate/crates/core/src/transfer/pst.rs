//! Perfect state transfer: the map is the identity, or the identity up to a
//! diagonal unitary `diag(e^{iφ}, e^{−iφ})` on the receiver.

use num_complex::Complex64 as C64;

use super::matrix::TransferMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PstCheck {
    pub is_pst_exact: bool,
    pub is_pst_up_to_local_unitary: bool,
    /// `‖T − id‖_max`.
    pub exact_residual: f64,
    /// `‖T − M_φ‖_max` at the best phase.
    pub local_residual: f64,
    pub phase: f64,
    /// `U = diag(e^{iφ}, e^{−iφ})` with `ρ^R = U ρ^S U⁺`.
    pub witness: [[C64; 2]; 2],
}

impl PstCheck {
    pub fn any(&self) -> bool {
        self.is_pst_exact || self.is_pst_up_to_local_unitary
    }

    pub fn residual(&self) -> f64 {
        self.exact_residual.min(self.local_residual)
    }
}

/// Conjugation by `diag(e^{iφ}, e^{−iφ})` as a transfer map.
pub fn local_phase_map(phase: f64, t: f64) -> TransferMatrix {
    let mut m = TransferMatrix::identity(t);
    m.entries[1][1] = C64::from_polar(1.0, 2.0 * phase);
    m.entries[2][2] = C64::from_polar(1.0, -2.0 * phase);
    m
}

pub fn pst_check(tm: &TransferMatrix, tol: f64) -> Result<PstCheck> {
    if !(tol > 0.0) {
        return Err(Error::BadTolerance { name: "pst", value: tol });
    }
    let exact_residual = tm.max_abs_diff(&TransferMatrix::identity(tm.t));
    // both coherence entries carry e^{±2iφ}; average them before taking the angle
    let z = tm.get(0, 1, 0, 1) + tm.get(1, 0, 1, 0).conj();
    let phase = if z.norm() > 0.0 { 0.5 * z.arg() } else { 0.0 };
    let local_residual = tm.max_abs_diff(&local_phase_map(phase, tm.t));
    let zero = C64::new(0.0, 0.0);
    Ok(PstCheck {
        is_pst_exact: exact_residual < tol,
        is_pst_up_to_local_unitary: local_residual < tol,
        exact_residual,
        local_residual,
        phase,
        witness: [[C64::from_polar(1.0, phase), zero], [zero, C64::from_polar(1.0, -phase)]],
    })
}
