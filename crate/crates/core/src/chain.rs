//! Open XY chains: parameters, Hamiltonians and site operators.
//!
//! Energies are in units of the coupling `D` and times in units of `1/D`;
//! with the default `D = 1` the closed forms in [`crate::transfer::closed_form`]
//! read literally. For thermal states the physical control parameter is `β·D`.

use serde::{Deserialize, Serialize};

use crate::basis::{Register, SpinOp, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::linalg::CMat;

pub const MIN_SITES: usize = 2;

/// Chain length, coupling, Larmor frequencies, temperature and the
/// sender/receiver assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChainSpecRaw", into = "ChainSpecRaw")]
pub struct ChainSpec {
    n: usize,
    coupling: f64,
    omegas: Vec<f64>,
    beta: Option<f64>,
    sender: usize,
    receiver: usize,
}

/// Serialized form; missing fields take the chain defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpecRaw {
    pub n: usize,
    #[serde(default = "default_coupling")]
    pub coupling: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub omegas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sender: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver: Option<usize>,
}

fn default_coupling() -> f64 {
    1.0
}

impl TryFrom<ChainSpecRaw> for ChainSpec {
    type Error = Error;
    fn try_from(raw: ChainSpecRaw) -> Result<Self> {
        let omegas = if raw.omegas.is_empty() { vec![0.0; raw.n] } else { raw.omegas };
        let spec = ChainSpec {
            n: raw.n,
            coupling: raw.coupling,
            omegas,
            beta: raw.beta,
            sender: raw.sender.unwrap_or(1),
            receiver: raw.receiver.unwrap_or(raw.n),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<ChainSpec> for ChainSpecRaw {
    fn from(s: ChainSpec) -> Self {
        ChainSpecRaw {
            n: s.n,
            coupling: s.coupling,
            omegas: s.omegas,
            beta: s.beta,
            sender: Some(s.sender),
            receiver: Some(s.receiver),
        }
    }
}

impl ChainSpec {
    /// Homogeneous chain with `D = 1`, zero fields, sender 1 and receiver `n`.
    pub fn new(n: usize) -> Result<Self> {
        ChainSpecRaw { n, coupling: 1.0, omegas: vec![], beta: None, sender: None, receiver: None }
            .try_into()
    }

    pub fn with_coupling(mut self, coupling: f64) -> Result<Self> {
        self.coupling = coupling;
        self.validate().map(|_| self)
    }

    pub fn with_omegas(mut self, omegas: Vec<f64>) -> Result<Self> {
        self.omegas = omegas;
        self.validate().map(|_| self)
    }

    /// Sets a single Larmor frequency (1-based site).
    pub fn with_omega(mut self, site: usize, omega: f64) -> Result<Self> {
        if site == 0 || site > self.n {
            return Err(Error::SiteOutOfRange { site, n: self.n });
        }
        self.omegas[site - 1] = omega;
        self.validate().map(|_| self)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = Some(beta);
        self.validate().map(|_| self)
    }

    pub fn with_sites(mut self, sender: usize, receiver: usize) -> Result<Self> {
        self.sender = sender;
        self.receiver = receiver;
        self.validate().map(|_| self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_SITES..=MAX_QUBITS).contains(&self.n) {
            return Err(Error::InvalidSpec {
                field: "n",
                reason: format!("chain length must be in {MIN_SITES}..={MAX_QUBITS}, got {}", self.n),
            });
        }
        if !self.coupling.is_finite() {
            return Err(Error::InvalidSpec { field: "coupling", reason: "must be finite".into() });
        }
        if self.omegas.len() != self.n {
            return Err(Error::InvalidSpec {
                field: "omegas",
                reason: format!("expected {} frequencies, got {}", self.n, self.omegas.len()),
            });
        }
        if self.omegas.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidSpec { field: "omegas", reason: "must be finite".into() });
        }
        if let Some(beta) = self.beta {
            if !(beta >= 0.0) || !beta.is_finite() {
                return Err(Error::InvalidSpec {
                    field: "beta",
                    reason: format!("inverse temperature must be finite and non-negative, got {beta}"),
                });
            }
        }
        if self.sender == 0 || self.sender > self.n {
            return Err(Error::InvalidSpec {
                field: "sender",
                reason: format!("site {} outside 1..={}", self.sender, self.n),
            });
        }
        if self.receiver == 0 || self.receiver > self.n {
            return Err(Error::InvalidSpec {
                field: "receiver",
                reason: format!("site {} outside 1..={}", self.receiver, self.n),
            });
        }
        if self.sender == self.receiver {
            return Err(Error::InvalidSpec {
                field: "receiver",
                reason: format!("receiver must differ from sender (both are site {})", self.sender),
            });
        }
        Ok(())
    }

    /// Non-fatal remarks about the parameters.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let w = self.omegas[self.sender - 1];
        if w != 0.0 {
            out.push(format!(
                "omega on sender site {} is {w} but the rest Hamiltonian ignores it",
                self.sender
            ));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn coupling(&self) -> f64 {
        self.coupling
    }
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }
    pub fn beta(&self) -> Option<f64> {
        self.beta
    }
    pub fn sender(&self) -> usize {
        self.sender
    }
    pub fn receiver(&self) -> usize {
        self.receiver
    }

    pub fn register(&self) -> Register {
        Register::new(self.n).expect("validated chain length")
    }

    /// All sites except the sender, ascending.
    pub fn rest_sites(&self) -> Vec<usize> {
        (1..=self.n).filter(|&s| s != self.sender).collect()
    }

    /// Nearest-neighbour bonds of the full chain.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        (1..self.n).map(|i| (i, i + 1)).collect()
    }

    /// Bonds that do not touch the sender.
    pub fn rest_bonds(&self) -> Vec<(usize, usize)> {
        self.bonds()
            .into_iter()
            .filter(|&(a, b)| a != self.sender && b != self.sender)
            .collect()
    }
}

/// Flip-flop couplings `−(D/2)(I⁺_a I⁻_b + I⁻_a I⁺_b)` on `bonds` plus
/// Zeeman terms `Σ ω_s I_{z,s}`, written directly in the computational basis.
fn xy_with_field(reg: Register, coupling: f64, bonds: &[(usize, usize)], zeeman: &[(usize, f64)]) -> CMat {
    let d = reg.dim();
    let hop = -0.5 * coupling;
    let mut h = CMat::zeros(d, d);
    for b in 0..d {
        for &(s1, s2) in bonds {
            if reg.bit(b, s1) != reg.bit(b, s2) {
                let flipped = b ^ reg.mask(s1) ^ reg.mask(s2);
                h[(flipped, b)].re += hop;
            }
        }
        let diag: f64 = zeeman
            .iter()
            .map(|&(s, w)| if reg.bit(b, s) == 0 { 0.5 * w } else { -0.5 * w })
            .sum();
        h[(b, b)].re += diag;
    }
    h
}

/// `H_XY = −Σ_{i=1}^{N−1} (D/2)(I⁺_i I⁻_{i+1} + I⁻_i I⁺_{i+1})`.
pub fn build_xy_hamiltonian(spec: &ChainSpec) -> Result<CMat> {
    spec.validate()?;
    Ok(xy_with_field(spec.register(), spec.coupling, &spec.bonds(), &[]))
}

/// Rest Hamiltonian on the full register: XY bonds away from the sender and
/// Zeeman terms on every non-sender site. Acts as the identity on the sender.
pub fn build_rest_hamiltonian(spec: &ChainSpec) -> Result<CMat> {
    spec.validate()?;
    let zeeman: Vec<(usize, f64)> = spec.rest_sites().into_iter().map(|s| (s, spec.omegas[s - 1])).collect();
    Ok(xy_with_field(spec.register(), spec.coupling, &spec.rest_bonds(), &zeeman))
}

/// The rest Hamiltonian written on the `(N−1)`-qubit register of the
/// non-sender sites, in their original order.
pub fn rest_hamiltonian_reduced(spec: &ChainSpec) -> Result<CMat> {
    spec.validate()?;
    let rest = spec.rest_sites();
    let pos = |s: usize| rest.iter().position(|&r| r == s).unwrap() + 1;
    let reg = Register::new(spec.n - 1)?;
    let bonds: Vec<(usize, usize)> = spec.rest_bonds().into_iter().map(|(a, b)| (pos(a), pos(b))).collect();
    let zeeman: Vec<(usize, f64)> = rest.iter().map(|&s| (pos(s), spec.omegas[s - 1])).collect();
    Ok(xy_with_field(reg, spec.coupling, &bonds, &zeeman))
}

/// Single-site spin operator on the chain register.
pub fn site_operator(spec: &ChainSpec, site: usize, kind: SpinOp) -> Result<CMat> {
    spec.register().embed(kind, site)
}

/// `Σ_i I_{z,i}` on the chain register.
pub fn total_magnetization(spec: &ChainSpec) -> CMat {
    let reg = spec.register();
    let d = reg.dim();
    let mut m = CMat::zeros(d, d);
    for b in 0..d {
        let ones = b.count_ones() as f64;
        m[(b, b)].re = 0.5 * (reg.qubits() as f64 - 2.0 * ones);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, commutator, eigh, hermitian_deviation, max_abs, max_abs_diff};
    use num_complex::Complex64 as C64;

    /// `H_XY` assembled from embedded ladder operators, independent of the
    /// bit-twiddling builder.
    fn xy_from_operators(spec: &ChainSpec) -> CMat {
        let d = spec.register().dim();
        let mut h = CMat::zeros(d, d);
        for (a, b) in spec.bonds() {
            let pa = site_operator(spec, a, SpinOp::Plus).unwrap();
            let ma = site_operator(spec, a, SpinOp::Minus).unwrap();
            let pb = site_operator(spec, b, SpinOp::Plus).unwrap();
            let mb = site_operator(spec, b, SpinOp::Minus).unwrap();
            let term = &pa * &mb + &ma * &pb;
            h += term * faer::Scale(C64::new(-0.5 * spec.coupling(), 0.0));
        }
        h
    }

    #[test]
    fn two_site_hamiltonian() {
        let h = build_xy_hamiltonian(&ChainSpec::new(2).unwrap()).unwrap();
        let mut expected = CMat::zeros(4, 4);
        expected[(1, 2)] = C64::new(-0.5, 0.0);
        expected[(2, 1)] = C64::new(-0.5, 0.0);
        assert_eq!(h, expected);
    }

    #[test]
    fn builder_matches_operator_sum() {
        for n in 2..=5 {
            let spec = ChainSpec::new(n).unwrap().with_coupling(0.37 * n as f64).unwrap();
            let h = build_xy_hamiltonian(&spec).unwrap();
            assert!(max_abs_diff(h.as_ref(), xy_from_operators(&spec).as_ref()) < 1e-15);
            assert_eq!(hermitian_deviation(h.as_ref()), 0.0);
        }
    }

    #[test]
    fn three_site_single_excitation_spectrum() {
        let h = build_xy_hamiltonian(&ChainSpec::new(3).unwrap()).unwrap();
        // single-excitation labels 100, 010, 001
        let idx = [4usize, 2, 1];
        let block = CMat::from_fn(3, 3, |i, j| h[(idx[i], idx[j])]);
        let (vals, _) = eigh(block.as_ref()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (v, e) in vals.iter().zip([-s, 0.0, s]) {
            assert!((v - e).abs() < 1e-14, "{v} vs {e}");
        }
    }

    #[test]
    fn magnetization_is_conserved() {
        let spec = ChainSpec::new(5).unwrap().with_coupling(1.7).unwrap();
        let h = build_xy_hamiltonian(&spec).unwrap();
        let mut mz = CMat::zeros(32, 32);
        for s in 1..=5 {
            mz += site_operator(&spec, s, SpinOp::Z).unwrap();
        }
        assert!(max_abs_diff(mz.as_ref(), total_magnetization(&spec).as_ref()) < 1e-15);
        assert!(max_abs(commutator(h.as_ref(), mz.as_ref()).as_ref()) < 1e-13);
    }

    #[test]
    fn linear_in_coupling() {
        let s1 = ChainSpec::new(4).unwrap().with_coupling(0.8).unwrap();
        let s2 = s1.clone().with_coupling(1.6).unwrap();
        let h1 = build_xy_hamiltonian(&s1).unwrap();
        let h2 = build_xy_hamiltonian(&s2).unwrap();
        let doubled = CMat::from_fn(16, 16, |i, j| h1[(i, j)] * 2.0);
        assert_eq!(h2, doubled);
    }

    #[test]
    fn rest_hamiltonian_three_sites() {
        let spec = ChainSpec::new(3).unwrap();
        let h = build_rest_hamiltonian(&spec).unwrap();
        let sub = ChainSpec::new(2).unwrap();
        let h23 = build_xy_hamiltonian(&sub).unwrap();
        let embedded = linalg::kron(linalg::identity(2).as_ref(), h23.as_ref());
        assert_eq!(max_abs_diff(h.as_ref(), embedded.as_ref()), 0.0);
        let reduced = rest_hamiltonian_reduced(&spec).unwrap();
        assert_eq!(reduced, h23);
    }

    #[test]
    fn rest_hamiltonian_zeeman_on_last_site() {
        let spec = ChainSpec::new(4).unwrap();
        let h0 = build_rest_hamiltonian(&spec).unwrap();
        for b in 0..16 {
            assert_eq!(h0[(b, b)], C64::new(0.0, 0.0));
        }
        let spec1 = spec.with_omega(4, 1.0).unwrap();
        let h1 = build_rest_hamiltonian(&spec1).unwrap();
        for b in 0..16 {
            let expected = if b & 1 == 0 { 0.5 } else { -0.5 };
            assert_eq!(h1[(b, b)].re, expected);
        }
    }

    #[test]
    fn validation_names_the_field() {
        let err = ChainSpec::new(2).unwrap().with_sites(2, 2).unwrap_err();
        assert!(err.to_string().contains("receiver"));
        assert!(ChainSpec::new(13).is_err());
        assert!(ChainSpec::new(1).is_err());
        assert!(ChainSpec::new(3).unwrap().with_beta(-1.0).is_err());
        assert!(ChainSpec::new(3).unwrap().with_omegas(vec![0.0; 2]).is_err());
        assert!(site_operator(&ChainSpec::new(3).unwrap(), 4, SpinOp::Z).is_err());
    }

    #[test]
    fn sender_field_warning() {
        let spec = ChainSpec::new(3).unwrap();
        assert!(spec.warnings().is_empty());
        assert_eq!(spec.with_omega(1, 0.3).unwrap().warnings().len(), 1);
    }

    #[test]
    fn serde_defaults_and_validation() {
        let spec: ChainSpec = serde_json::from_str(r#"{"n": 4}"#).unwrap();
        assert_eq!(spec.receiver(), 4);
        assert_eq!(spec.sender(), 1);
        assert_eq!(spec.omegas(), &[0.0; 4]);
        let err = serde_json::from_str::<ChainSpec>(r#"{"n": 2, "sender": 2, "receiver": 2}"#).unwrap_err();
        assert!(err.to_string().contains("receiver"));
        let back: ChainSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
