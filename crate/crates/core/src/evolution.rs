//! Exact evolution under a constant Hamiltonian, `ρ(t) = U(t) ρ(0) U⁺(t)`
//! with `U(t) = e^{−iHt}`.

use std::hash::{Hash, Hasher};

use num_complex::Complex64 as C64;

use crate::chain::{build_xy_hamiltonian, ChainSpec};
use crate::density::{partial_trace, DensityMatrix, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::initial::assemble_initial_for;
use crate::density::BlochVector;
use crate::linalg::{self, CMat};

/// Spectral decomposition `H = V diag(E) V⁺` of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: Vec<f64>,
    vectors: CMat,
    fingerprint: u64,
}

/// Hash of the exact bit patterns of a matrix.
pub fn fingerprint(m: &CMat) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    (m.nrows(), m.ncols()).hash(&mut h);
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            m[(i, j)].re.to_bits().hash(&mut h);
            m[(i, j)].im.to_bits().hash(&mut h);
        }
    }
    h.finish()
}

pub fn diagonalize(h: &CMat) -> Result<Propagator> {
    linalg::ensure_square(h.as_ref())?;
    let deviation = linalg::hermitian_deviation(h.as_ref());
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let (energies, vectors) = linalg::eigh(h.as_ref())?;
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    Ok(Propagator { energies, vectors, fingerprint: fingerprint(h) })
}

impl Propagator {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &CMat {
        &self.vectors
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// `e^{−iE_k t}` for every level.
    pub fn phases(&self, t: f64) -> Vec<C64> {
        self.energies.iter().map(|&e| C64::from_polar(1.0, -e * t)).collect()
    }

    /// `V diag(E) V⁺`.
    pub fn reconstruct(&self) -> CMat {
        let e: Vec<C64> = self.energies.iter().map(|&x| C64::new(x, 0.0)).collect();
        &linalg::scale_columns(self.vectors.as_ref(), &e) * self.vectors.adjoint()
    }

    /// `U(t) = V diag(e^{−iE_k t}) V⁺`.
    pub fn unitary_at(&self, t: f64) -> CMat {
        let p = self.phases(t);
        &linalg::scale_columns(self.vectors.as_ref(), &p) * self.vectors.adjoint()
    }

    /// `U(t) ρ U⁺(t)`; the mode of `rho` is carried over.
    pub fn evolve(&self, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        let u = self.unitary_at(t);
        let out = &(&u * rho.matrix()) * u.adjoint();
        Ok(DensityMatrix::with_mode(out, rho.mode()))
    }
}

pub fn unitary_at(p: &Propagator, t: f64) -> CMat {
    p.unitary_at(t)
}

pub fn evolve(rho: &DensityMatrix, p: &Propagator, t: f64) -> Result<DensityMatrix> {
    p.evolve(rho, t)
}

/// Receiver density matrix at time `t` for sender Bloch vector `x`.
pub fn receiver_state(spec: &ChainSpec, x: &BlochVector, rest: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let p = diagonalize(&build_xy_hamiltonian(spec)?)?;
    receiver_state_with(spec, &p, x, rest, t)
}

/// As [`receiver_state`] with a precomputed propagator of `H_XY`.
pub fn receiver_state_with(
    spec: &ChainSpec,
    p: &Propagator,
    x: &BlochVector,
    rest: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    let rho0 = assemble_initial_for(spec, x, rest)?;
    let rho_t = p.evolve(&rho0, t)?;
    partial_trace(&rho_t, &[spec.receiver()])
}
