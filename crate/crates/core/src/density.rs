//! Density matrices, Bloch parameters, tensor products and partial traces.

use faer::MatRef;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::basis::Register;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a physical state.
pub const POSITIVITY_TOL: f64 = -1e-10;
pub const BALL_TOL: f64 = 1e-12;

/// Whether a matrix is held to the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Hermitian, unit trace, positive semidefinite.
    Physical,
    /// Shape only. Used to push matrix units through linear maps.
    Probe,
}

/// Square `2^N × 2^N` complex matrix tagged with its [`Mode`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: CMat,
    mode: Mode,
}

impl DensityMatrix {
    /// Validates every physical invariant before accepting `data`.
    pub fn physical(data: CMat) -> Result<Self> {
        Register::from_dim(linalg::ensure_square(data.as_ref())?)?;
        let rho = DensityMatrix { data, mode: Mode::Physical };
        rho.validate()?;
        Ok(rho)
    }

    pub fn probe(data: CMat) -> Result<Self> {
        Register::from_dim(linalg::ensure_square(data.as_ref())?)?;
        Ok(DensityMatrix { data, mode: Mode::Probe })
    }

    /// For results of maps known to preserve the invariants of `mode`.
    pub(crate) fn with_mode(data: CMat, mode: Mode) -> Self {
        DensityMatrix { data, mode }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> MatRef<'_, C64> {
        self.data.as_ref()
    }

    pub fn into_matrix(self) -> CMat {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(self.data.as_ref())
    }

    /// Checks the physical invariants; probe matrices always pass.
    pub fn validate(&self) -> Result<()> {
        if self.mode == Mode::Probe {
            return Ok(());
        }
        let herm = linalg::hermitian_deviation(self.matrix());
        if herm > HERMITIAN_TOL {
            return Err(Error::InvariantViolation { what: "hermiticity", deviation: herm });
        }
        let tr = (self.trace() - C64::new(1.0, 0.0)).norm();
        if tr > TRACE_TOL {
            return Err(Error::InvariantViolation { what: "unit trace", deviation: tr });
        }
        let min_eig = self.min_eigenvalue()?;
        if min_eig < POSITIVITY_TOL {
            return Err(Error::InvariantViolation { what: "positivity", deviation: -min_eig });
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = linalg::hermitian_eigenvalues(self.matrix())?;
        Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(self.matrix())
    }
}

/// Bloch parameters of a single qubit:
/// `ρ00 = x1`, `ρ01 = x2 + i x3`, `ρ11 = 1 − x1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector {
    x: [f64; 3],
}

impl BlochVector {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let violation = Self::ball_excess([x1, x2, x3]);
        if !(violation <= BALL_TOL) {
            return Err(Error::OutsideBlochBall { violation });
        }
        Ok(BlochVector { x: [x1, x2, x3] })
    }

    /// `(1−2x1)² + (2x2)² + (2x3)² − 1`; non-positive inside the ball.
    pub fn ball_excess(x: [f64; 3]) -> f64 {
        (1.0 - 2.0 * x[0]).powi(2) + (2.0 * x[1]).powi(2) + (2.0 * x[2]).powi(2) - 1.0
    }

    pub fn maximally_mixed() -> Self {
        BlochVector { x: [0.5, 0.0, 0.0] }
    }

    pub fn x1(&self) -> f64 {
        self.x[0]
    }
    pub fn x2(&self) -> f64 {
        self.x[1]
    }
    pub fn x3(&self) -> f64 {
        self.x[2]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.x
    }
}

impl TryFrom<[f64; 3]> for BlochVector {
    type Error = Error;
    fn try_from(x: [f64; 3]) -> Result<Self> {
        BlochVector::new(x[0], x[1], x[2])
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(b: BlochVector) -> Self {
        b.x
    }
}

/// Kronecker product of two square matrices.
pub fn tensor_product(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> Result<CMat> {
    linalg::ensure_square(a)?;
    linalg::ensure_square(b)?;
    Ok(linalg::kron(a, b))
}

/// Product state of two density matrices; probe mode is contagious.
pub fn tensor_states(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    let mode = if a.mode == Mode::Physical && b.mode == Mode::Physical {
        Mode::Physical
    } else {
        Mode::Probe
    };
    DensityMatrix::with_mode(linalg::kron(a.matrix(), b.matrix()), mode)
}

/// Reduces `rho` onto the sites in `keep` (1-based), preserving their order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let reg = Register::from_dim(rho.dim())?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::NothingToKeep);
    }
    for &s in &keep {
        reg.check_site(s)?;
    }
    let traced: Vec<usize> = (1..=reg.qubits()).filter(|s| !keep.contains(s)).collect();
    let traced_mask: usize = traced.iter().map(|&s| reg.mask(s)).sum();
    let kept_idx: Vec<usize> = (0..reg.dim()).map(|b| reg.gather(b, &keep)).collect();

    let dk = 1usize << keep.len();
    let mut out = CMat::zeros(dk, dk);
    let m = rho.matrix();
    for col in 0..reg.dim() {
        let env = col & traced_mask;
        let kc = kept_idx[col];
        // rows sharing the traced bits with `col`: iterate over kept-bit patterns
        for row in 0..reg.dim() {
            if row & traced_mask == env {
                out[(kept_idx[row], kc)] += m[(row, col)];
            }
        }
    }
    Ok(DensityMatrix::with_mode(out, rho.mode))
}

pub fn bloch_to_density(x: &BlochVector) -> DensityMatrix {
    let [x1, x2, x3] = x.x;
    let data = linalg::from_rows(&[
        [C64::new(x1, 0.0), C64::new(x2, x3)],
        [C64::new(x2, -x3), C64::new(1.0 - x1, 0.0)],
    ]);
    DensityMatrix::with_mode(data, Mode::Physical)
}

pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho.dim() });
    }
    if rho.mode == Mode::Probe {
        return Err(Error::InvariantViolation { what: "physical mode", deviation: f64::NAN });
    }
    let herm = linalg::hermitian_deviation(rho.matrix());
    if herm > HERMITIAN_TOL {
        return Err(Error::InvariantViolation { what: "hermiticity", deviation: herm });
    }
    let r01 = rho.get(0, 1);
    BlochVector::new(rho.get(0, 0).re, r01.re, r01.im)
}
