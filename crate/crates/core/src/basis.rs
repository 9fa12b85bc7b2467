//! Register conventions.
//!
//! Sites are numbered `1..=N`. A computational basis label is
//! `b = Σ α_i 2^(N−i)`, so site 1 is the most significant bit. On a single
//! site `|0⟩ = (1, 0)ᵀ` is spin up (`I_z = +1/2`) and `|1⟩ = (0, 1)ᵀ`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{from_rows, CMat, ONE, ZERO};

/// Largest register the dense representation accepts.
pub const MAX_QUBITS: usize = 12;

/// Single-site spin operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinOp {
    /// `I⁺ = |0⟩⟨1|`
    Plus,
    /// `I⁻ = |1⟩⟨0|`
    Minus,
    X,
    Y,
    Z,
}

impl SpinOp {
    pub fn matrix(self) -> CMat {
        let h = C64::new(0.5, 0.0);
        let ih = C64::new(0.0, 0.5);
        match self {
            SpinOp::Plus => from_rows(&[[ZERO, ONE], [ZERO, ZERO]]),
            SpinOp::Minus => from_rows(&[[ZERO, ZERO], [ONE, ZERO]]),
            SpinOp::X => from_rows(&[[ZERO, h], [h, ZERO]]),
            SpinOp::Y => from_rows(&[[ZERO, -ih], [ih, ZERO]]),
            SpinOp::Z => from_rows(&[[h, ZERO], [ZERO, -h]]),
        }
    }
}

/// Index bookkeeping for an `N`-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Register {
    n: usize,
}

impl Register {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidSpec {
                field: "n",
                reason: format!("register size must be in 1..={MAX_QUBITS}, got {n}"),
            });
        }
        Ok(Register { n })
    }

    /// Register matching a matrix dimension `2^N`.
    pub fn from_dim(dim: usize) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        Register::new(dim.trailing_zeros() as usize)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n {
            return Err(Error::SiteOutOfRange { site, n: self.n });
        }
        Ok(())
    }

    /// Bit mask of `site` inside a basis label.
    #[inline]
    pub fn mask(&self, site: usize) -> usize {
        1 << (self.n - site)
    }

    /// Occupation `α_site` of basis label `b`.
    #[inline]
    pub fn bit(&self, b: usize, site: usize) -> usize {
        (b >> (self.n - site)) & 1
    }

    pub fn index_of(&self, alphas: &[u8]) -> Result<usize> {
        if alphas.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: alphas.len() });
        }
        Ok(alphas.iter().fold(0usize, |acc, &a| (acc << 1) | (a as usize & 1)))
    }

    pub fn alphas_of(&self, b: usize) -> Vec<u8> {
        (1..=self.n).map(|s| self.bit(b, s) as u8).collect()
    }

    /// Label on the sub-register formed by `sites` (ascending), read off `b`.
    pub fn gather(&self, b: usize, sites: &[usize]) -> usize {
        sites.iter().fold(0usize, |acc, &s| (acc << 1) | self.bit(b, s))
    }

    /// Single-site operator embedded with identities on every other site.
    pub fn embed(&self, op: SpinOp, site: usize) -> Result<CMat> {
        self.check_site(site)?;
        let local = op.matrix();
        let d = self.dim();
        let m = self.mask(site);
        let mut out = CMat::zeros(d, d);
        for col in 0..d {
            let cb = self.bit(col, site);
            for rb in 0..2 {
                let v = local[(rb, cb)];
                if v != ZERO {
                    let row = (col & !m) | if rb == 1 { m } else { 0 };
                    out[(row, col)] = v;
                }
            }
        }
        Ok(out)
    }
}
