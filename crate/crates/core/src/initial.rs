//! Initial states of the rest of the chain and full product states.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::basis::Register;
use crate::chain::{rest_hamiltonian_reduced, ChainSpec};
use crate::density::{bloch_to_density, tensor_states, BlochVector, DensityMatrix, Mode, TRACE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// How the non-sender part of the chain is prepared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RestStateKind {
    /// All rest spins up: `diag(1, 0, …, 0)`.
    Ground,
    /// Gibbs state `e^{−βH̃}/Tr e^{−βH̃}` of the rest Hamiltonian.
    Thermal { beta: f64 },
}

/// Initial density matrix on the non-sender sites (register of `N − 1` qubits).
pub fn rest_state(spec: &ChainSpec, kind: RestStateKind) -> Result<DensityMatrix> {
    let d = 1usize << (spec.n() - 1);
    match kind {
        RestStateKind::Ground => {
            let mut m = CMat::zeros(d, d);
            m[(0, 0)] = linalg::ONE;
            Ok(DensityMatrix::with_mode(m, Mode::Physical))
        }
        RestStateKind::Thermal { beta } => {
            if !(beta >= 0.0) {
                return Err(Error::NegativeBeta(beta));
            }
            let h = rest_hamiltonian_reduced(spec)?;
            Ok(DensityMatrix::with_mode(gibbs(&h, beta)?, Mode::Physical))
        }
    }
}

/// `e^{−βH}/Tr e^{−βH}` through the spectral decomposition of `H`.
pub fn gibbs(h: &CMat, beta: f64) -> Result<CMat> {
    let (energies, v) = linalg::eigh(h.as_ref())?;
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let scaled: Vec<C64> = weights.iter().map(|w| C64::new(w / z, 0.0)).collect();
    let vw = linalg::scale_columns(v.as_ref(), &scaled);
    Ok(&vw * v.adjoint())
}

/// `ρ(0) = ρ^S(0) ⊗ ρ̃(0)` with the sender on site 1.
pub fn assemble_initial(x: &BlochVector, rest: &DensityMatrix) -> Result<DensityMatrix> {
    check_rest(rest, None)?;
    Ok(tensor_states(&bloch_to_density(x), rest))
}

/// Product state with a 2×2 `sender` matrix placed on `spec.sender()` and
/// `rest` on the remaining sites in ascending order. Accepts probe matrices.
pub fn place_sender(spec: &ChainSpec, sender: &DensityMatrix, rest: &DensityMatrix) -> Result<DensityMatrix> {
    if sender.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: sender.dim() });
    }
    check_rest(rest, Some(spec.n()))?;
    let reg = spec.register();
    let rest_sites = spec.rest_sites();
    let d = reg.dim();
    let s = spec.sender();
    let sb: Vec<usize> = (0..d).map(|b| reg.bit(b, s)).collect();
    let rb: Vec<usize> = (0..d).map(|b| reg.gather(b, &rest_sites)).collect();
    let (sm, rm) = (sender.matrix(), rest.matrix());
    let data = CMat::from_fn(d, d, |i, j| sm[(sb[i], sb[j])] * rm[(rb[i], rb[j])]);
    let mode = if sender.mode() == Mode::Physical && rest.mode() == Mode::Physical {
        Mode::Physical
    } else {
        Mode::Probe
    };
    Ok(DensityMatrix::with_mode(data, mode))
}

pub fn assemble_initial_for(spec: &ChainSpec, x: &BlochVector, rest: &DensityMatrix) -> Result<DensityMatrix> {
    place_sender(spec, &bloch_to_density(x), rest)
}

fn check_rest(rest: &DensityMatrix, n: Option<usize>) -> Result<()> {
    let reg = Register::from_dim(rest.dim())?;
    if let Some(n) = n {
        if reg.qubits() != n - 1 {
            return Err(Error::DimensionMismatch { expected: 1 << (n - 1), found: rest.dim() });
        }
    }
    if rest.mode() == Mode::Physical {
        let dev = (rest.trace() - linalg::ONE).norm();
        if dev > TRACE_TOL {
            return Err(Error::InvariantViolation { what: "unit trace", deviation: dev });
        }
    }
    Ok(())
}
