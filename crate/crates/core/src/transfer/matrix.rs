use num_complex::Complex64 as C64;

use crate::chain::ChainSpec;
use crate::density::{partial_trace, DensityMatrix};
use crate::error::Result;
use crate::evolution::Propagator;
use crate::initial::place_sender;
use crate::linalg::{self, CMat};

/// Single-qubit index pairs in the order `00, 01, 10, 11`.
pub const PAIRS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

#[inline]
pub fn pair_index(a: usize, b: usize) -> usize {
    2 * a + b
}

/// Linear map `ρ^R_{γδ}(t) = Σ_{αβ} T_{γδ;αβ}(t) ρ^S_{αβ}(0)`.
///
/// Rows are receiver pairs `(γ, δ)`, columns sender pairs `(α, β)`, both in
/// [`PAIRS`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub entries: [[C64; 4]; 4],
    pub t: f64,
}

impl TransferMatrix {
    pub fn zeros(t: f64) -> Self {
        TransferMatrix { entries: [[C64::new(0.0, 0.0); 4]; 4], t }
    }

    /// The identity map.
    pub fn identity(t: f64) -> Self {
        let mut m = Self::zeros(t);
        for k in 0..4 {
            m.entries[k][k] = C64::new(1.0, 0.0);
        }
        m
    }

    /// `T_{γδ;αβ}`.
    #[inline]
    pub fn get(&self, g: usize, d: usize, a: usize, b: usize) -> C64 {
        self.entries[pair_index(g, d)][pair_index(a, b)]
    }

    /// Image of a 2×2 sender matrix.
    pub fn apply(&self, sender: &CMat) -> CMat {
        let mut out = CMat::zeros(2, 2);
        for (r, &(g, d)) in PAIRS.iter().enumerate() {
            out[(g, d)] = PAIRS
                .iter()
                .enumerate()
                .map(|(c, &(a, b))| self.entries[r][c] * sender[(a, b)])
                .sum();
        }
        out
    }

    /// Largest violation of `T_{00;αβ} + T_{11;αβ} = δ_{αβ}`.
    pub fn trace_deviation(&self) -> f64 {
        PAIRS
            .iter()
            .map(|&(a, b)| {
                let want = if a == b { 1.0 } else { 0.0 };
                (self.get(0, 0, a, b) + self.get(1, 1, a, b) - C64::new(want, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest violation of `T_{10;βα} = conj(T_{01;αβ})` (and of the
    /// matching reality of the diagonal rows).
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for &(a, b) in &PAIRS {
            dev = dev.max((self.get(1, 0, b, a) - self.get(0, 1, a, b).conj()).norm());
            dev = dev.max((self.get(0, 0, b, a) - self.get(0, 0, a, b).conj()).norm());
            dev = dev.max((self.get(1, 1, b, a) - self.get(1, 1, a, b).conj()).norm());
        }
        dev
    }

    pub fn max_abs_diff(&self, other: &TransferMatrix) -> f64 {
        let mut dev = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                dev = dev.max((self.entries[r][c] - other.entries[r][c]).norm());
            }
        }
        dev
    }
}

/// Sender matrix unit `|α⟩⟨β|` as a probe-mode matrix.
pub(crate) fn matrix_unit(a: usize, b: usize) -> DensityMatrix {
    let mut m = linalg::zeros(2);
    m[(a, b)] = linalg::ONE;
    DensityMatrix::probe(m).expect("2x2 probe")
}

/// Transfer matrix by linearity: each sender matrix unit `E_{αβ}` is placed
/// next to `rest`, evolved with `p`, and reduced onto the receiver.
pub fn compute_transfer_matrix(
    spec: &ChainSpec,
    rest: &DensityMatrix,
    p: &Propagator,
    t: f64,
) -> Result<TransferMatrix> {
    let mut out = TransferMatrix::zeros(t);
    for (c, &(a, b)) in PAIRS.iter().enumerate() {
        let probe = place_sender(spec, &matrix_unit(a, b), rest)?;
        let evolved = p.evolve(&probe, t)?;
        let reduced = partial_trace(&evolved, &[spec.receiver()])?;
        for (r, &(g, d)) in PAIRS.iter().enumerate() {
            out.entries[r][c] = reduced.get(g, d);
        }
    }
    Ok(out)
}
