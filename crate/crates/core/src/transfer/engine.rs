//! Transfer matrices at many times from one diagonalization.
//!
//! With `H = V diag(E) V⁺`, a probe `P` evolves to `V (Φ(t) ∘ V⁺PV) V⁺`
//! where `Φ_{kl} = e^{−i(E_k − E_l)t}`. Reducing onto the receiver contracts
//! that with `G^{γδ}_{kl} = Σ_c V_{(c,γ),k} conj(V_{(c,δ),l})`, so each
//! time point costs `O(d²)` instead of several dense products.

use num_complex::Complex64 as C64;

use super::matrix::{matrix_unit, TransferMatrix, PAIRS};
use crate::chain::ChainSpec;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::evolution::Propagator;
use crate::initial::place_sender;
use crate::linalg::CMat;

#[derive(Debug, Clone)]
pub struct TransferEngine {
    energies: Vec<f64>,
    /// `V⁺ P_{αβ} V` for the four sender matrix units.
    probes: Vec<CMat>,
    /// Receiver contraction kernels in `PAIRS` order.
    kernels: Vec<CMat>,
    fingerprint: u64,
}

impl TransferEngine {
    pub fn new(spec: &ChainSpec, rest: &DensityMatrix, p: &Propagator) -> Result<Self> {
        let reg = spec.register();
        if p.dim() != reg.dim() {
            return Err(Error::DimensionMismatch { expected: reg.dim(), found: p.dim() });
        }
        let v = p.vectors();
        let mut probes = Vec::with_capacity(4);
        for &(a, b) in &PAIRS {
            let full = place_sender(spec, &matrix_unit(a, b), rest)?;
            let rotated = &(v.adjoint() * full.matrix()) * v;
            probes.push(rotated);
        }

        let recv = spec.receiver();
        let rows: [Vec<usize>; 2] = [
            (0..reg.dim()).filter(|&b| reg.bit(b, recv) == 0).collect(),
            (0..reg.dim()).filter(|&b| reg.bit(b, recv) == 1).collect(),
        ];
        let half = reg.dim() / 2;
        let select = |bit: usize| CMat::from_fn(half, reg.dim(), |i, k| v[(rows[bit][i], k)]);
        let blocks = [select(0), select(1)];
        let kernels = PAIRS
            .iter()
            .map(|&(g, d)| blocks[g].transpose() * blocks[d].conjugate())
            .collect();

        Ok(TransferEngine {
            energies: p.energies().to_vec(),
            probes,
            kernels,
            fingerprint: p.fingerprint(),
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Fingerprint of the Hamiltonian the engine was built from.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn transfer_at(&self, t: f64) -> TransferMatrix {
        let d = self.dim();
        let phases: Vec<C64> = self.energies.iter().map(|&e| C64::from_polar(1.0, -e * t)).collect();
        let mut acc = [[C64::new(0.0, 0.0); 4]; 4];
        for l in 0..d {
            let pl = phases[l].conj();
            let probe_cols: [&[C64]; 4] = std::array::from_fn(|c| self.probes[c].col_as_slice(l));
            let kernel_cols: [&[C64]; 4] = std::array::from_fn(|r| self.kernels[r].col_as_slice(l));
            for k in 0..d {
                let phi = phases[k] * pl;
                let g = [kernel_cols[0][k], kernel_cols[1][k], kernel_cols[2][k], kernel_cols[3][k]];
                for c in 0..4 {
                    let m = phi * probe_cols[c][k];
                    for r in 0..4 {
                        acc[r][c] += m * g[r];
                    }
                }
            }
        }
        TransferMatrix { entries: acc, t }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::build_xy_hamiltonian;
    use crate::evolution::diagonalize;
    use crate::initial::{rest_state, RestStateKind};
    use crate::transfer::compute_transfer_matrix;

    #[test]
    fn agrees_with_probe_evolution() {
        let cases = [
            (ChainSpec::new(3).unwrap(), RestStateKind::Ground),
            (ChainSpec::new(4).unwrap().with_omega(4, 1.0).unwrap(), RestStateKind::Thermal { beta: 1.0 }),
            (ChainSpec::new(5).unwrap().with_sites(2, 4).unwrap(), RestStateKind::Thermal { beta: 0.4 }),
        ];
        for (spec, kind) in cases {
            let rest = rest_state(&spec, kind).unwrap();
            let p = diagonalize(&build_xy_hamiltonian(&spec).unwrap()).unwrap();
            let engine = TransferEngine::new(&spec, &rest, &p).unwrap();
            for t in [0.0, 0.9, 5.5, 31.0] {
                let fast = engine.transfer_at(t);
                let slow = compute_transfer_matrix(&spec, &rest, &p, t).unwrap();
                assert!(fast.max_abs_diff(&slow) < 1e-12, "t={t}");
            }
        }
    }
}
