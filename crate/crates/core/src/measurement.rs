//! Three-channel polarization readout on the receiver and linear-inversion
//! reconstruction of the sender's Bloch parameters.

use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::density::{BlochVector, DensityMatrix, BALL_TOL};
use crate::error::{Error, Result};
use crate::evolution::{receiver_state_with, Propagator};
use crate::transfer::info::{condition_number, numerical_rank, sorted_singular_values};
use crate::transfer::{Classification, InfoSystem};

/// `|det|` below which a direction set is rejected.
pub const DIRECTION_DET_TOL: f64 = 1e-10;
/// Unprojected solutions outside the Bloch ball by more than this are flagged.
pub const BALL_PROJECTION_TOL: f64 = 1e-6;
/// Residual above which a reconstruction is reported as inconsistent.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Measurement directions, one row per channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct DirectionSet {
    rows: Matrix3<f64>,
}

impl DirectionSet {
    pub fn new(rows: [[f64; 3]; 3]) -> Result<Self> {
        let m = Matrix3::from_fn(|n, i| rows[n][i]);
        let det = m.determinant();
        if !(det.abs() > DIRECTION_DET_TOL) {
            return Err(Error::SingularDirections { det });
        }
        Ok(DirectionSet { rows: m })
    }

    /// `a_{ni} = δ_{ni}`: polarizations along x, y and z.
    pub fn identity() -> Self {
        DirectionSet { rows: Matrix3::identity() }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.rows
    }

    pub fn row(&self, n: usize) -> [f64; 3] {
        [self.rows[(n, 0)], self.rows[(n, 1)], self.rows[(n, 2)]]
    }

    /// Rows that are not non-negative with unit sum. Advisory only.
    pub fn warnings(&self) -> Vec<String> {
        (0..3)
            .filter_map(|n| {
                let r = self.row(n);
                let sum: f64 = r.iter().sum();
                let negative = r.iter().any(|&v| v < 0.0);
                ((sum - 1.0).abs() > 1e-12 || negative)
                    .then(|| format!("direction {} = {:?} is not a non-negative unit-sum row", n + 1, r))
            })
            .collect()
    }
}

impl TryFrom<[[f64; 3]; 3]> for DirectionSet {
    type Error = Error;
    fn try_from(rows: [[f64; 3]; 3]) -> Result<Self> {
        DirectionSet::new(rows)
    }
}

impl From<DirectionSet> for [[f64; 3]; 3] {
    fn from(d: DirectionSet) -> Self {
        [d.row(0), d.row(1), d.row(2)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationReadout {
    pub j: [f64; 3],
    pub t1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

/// `J = Tr(ρ (a·I)) = a1 Re ρ01 − a2 Im ρ01 + a3 (ρ00 − 1/2)`.
pub fn polarization(rho_r: &DensityMatrix, a: [f64; 3]) -> Result<f64> {
    if rho_r.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho_r.dim() });
    }
    let r01 = rho_r.get(0, 1);
    Ok(a[0] * r01.re - a[1] * r01.im + a[2] * (rho_r.get(0, 0).re - 0.5))
}

/// Linear map from Bloch parameters to the three polarizations,
/// `J = B x + b₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSystem {
    pub b: Matrix3<f64>,
    pub offset: Vector3<f64>,
    pub t: f64,
}

pub fn compute_b(info: &InfoSystem, dirs: &DirectionSet) -> MeasurementSystem {
    // J_n = a_n1 · obs_1 − a_n2 · obs_2 + a_n3 · (obs_3 − 1/2)
    let signed = dirs.rows * Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0));
    let b = signed * info.a;
    let offset = signed * info.offset - dirs.rows.column(2) * 0.5;
    MeasurementSystem { b, offset, t: info.t }
}

impl MeasurementSystem {
    pub fn predict(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.b * x + self.offset
    }
}

/// Simulates the three identical channels: each is evolved independently and
/// read out along its own direction.
pub fn simulate_readout(
    spec: &ChainSpec,
    p: &Propagator,
    x: &BlochVector,
    rest: &DensityMatrix,
    t1: f64,
    dirs: &DirectionSet,
) -> Result<PolarizationReadout> {
    let mut j = [0.0; 3];
    for (n, jn) in j.iter_mut().enumerate() {
        let rho_r = receiver_state_with(spec, p, x, rest, t1)?;
        *jn = polarization(&rho_r, dirs.row(n))?;
    }
    Ok(PolarizationReadout { j, t1, sigma: None })
}

/// Independent Gaussian noise of width `sigma` on every channel.
pub fn add_noise(readout: &PolarizationReadout, sigma: f64, seed: u64) -> Result<PolarizationReadout> {
    if !(sigma >= 0.0) {
        return Err(Error::NegativeSigma(sigma));
    }
    if sigma == 0.0 {
        return Ok(*readout);
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Numerical(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = *readout;
    for v in out.j.iter_mut() {
        *v += normal.sample(&mut rng);
    }
    out.sigma = Some(sigma);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    /// Least-norm solution; unique when the classification is complete.
    pub x: [f64; 3],
    /// Recovered sender state, present only for complete reconstructions
    /// that land in the Bloch ball (after at most a `1e-6` projection).
    pub bloch: Option<BlochVector>,
    pub rank: usize,
    pub classification: Classification,
    /// `‖M x + m₀ − y‖₂` for the system that was solved.
    pub residual: f64,
    pub condition_number: f64,
    /// Orthonormal basis of the unresolved directions in `x`-space.
    pub nullspace: Vec<[f64; 3]>,
    /// Set when the unprojected solution exceeds the ball by more than `1e-6`.
    pub ball_violation: Option<f64>,
    pub consistent: bool,
}

impl ReconstructionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Solves `y = M x + m₀` by truncated SVD.
fn solve_affine(m: &Matrix3<f64>, m0: &Vector3<f64>, y: &Vector3<f64>, rank_tol: f64) -> Result<ReconstructionReport> {
    if !(rank_tol > 0.0) {
        return Err(Error::BadTolerance { name: "rank", value: rank_tol });
    }
    let s_sorted = sorted_singular_values(m);
    let rank = numerical_rank(&s_sorted, rank_tol);
    let cutoff = if rank == 0 { f64::INFINITY } else { s_sorted[rank - 1] };

    let svd = m.svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Numerical("SVD without U".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("SVD without V".into()))?;
    let rhs = y - m0;
    let mut x = Vector3::zeros();
    let mut nullspace = Vec::new();
    for k in 0..3 {
        let s = svd.singular_values[k];
        let v_k = v_t.row(k).transpose();
        if rank > 0 && s >= cutoff {
            x += v_k * (u.column(k).dot(&rhs) / s);
        } else {
            nullspace.push([v_k[0], v_k[1], v_k[2]]);
        }
    }
    let residual = (m * x + m0 - y).norm();
    let classification = Classification::from_rank(rank);
    let xa = [x[0], x[1], x[2]];

    let excess = BlochVector::ball_excess(xa);
    let (bloch, ball_violation) = if excess <= BALL_TOL {
        (BlochVector::new(xa[0], xa[1], xa[2]).ok(), None)
    } else if excess <= BALL_PROJECTION_TOL {
        (Some(project_into_ball(xa)), None)
    } else {
        (None, Some(excess))
    };
    let bloch = if classification == Classification::Complete { bloch } else { None };

    Ok(ReconstructionReport {
        x: xa,
        bloch,
        rank,
        classification,
        residual,
        condition_number: condition_number(&s_sorted),
        nullspace,
        ball_violation,
        consistent: residual <= CONSISTENCY_TOL * (1.0 + y.norm()),
    })
}

fn project_into_ball(x: [f64; 3]) -> BlochVector {
    // Bloch-sphere coordinates (2x2, 2x3, 1 − 2x1) scaled back to radius 1
    let v = [1.0 - 2.0 * x[0], 2.0 * x[1], 2.0 * x[2]];
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let k = if r > 1.0 { (1.0 - 1e-15) / r } else { 1.0 };
    BlochVector::new(0.5 * (1.0 - k * v[0]), 0.5 * k * v[1], 0.5 * k * v[2]).expect("projected into the ball")
}

pub fn reconstruct_from_polarizations(
    readout: &PolarizationReadout,
    system: &MeasurementSystem,
    rank_tol: f64,
) -> Result<ReconstructionReport> {
    solve_affine(&system.b, &system.offset, &Vector3::from(readout.j), rank_tol)
}

pub fn reconstruct_from_receiver(rho_r: &DensityMatrix, info: &InfoSystem, rank_tol: f64) -> Result<ReconstructionReport> {
    if rho_r.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho_r.dim() });
    }
    let r01 = rho_r.get(0, 1);
    let obs = Vector3::new(r01.re, r01.im, rho_r.get(0, 0).re);
    solve_affine(&info.a, &info.offset, &obs, rank_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::bloch_to_density;
    use crate::linalg::real_diag;
    use num_complex::Complex64 as C64;

    #[test]
    fn polarization_examples() {
        let up = DensityMatrix::physical(real_diag(&[1.0, 0.0])).unwrap();
        assert_eq!(polarization(&up, [0.0, 0.0, 1.0]).unwrap(), 0.5);
        let mixed = bloch_to_density(&BlochVector::maximally_mixed());
        assert_eq!(polarization(&mixed, [0.3, -0.7, 0.2]).unwrap(), 0.0);
        let coh = bloch_to_density(&BlochVector::new(0.5, 0.3, 0.0).unwrap());
        assert!((polarization(&coh, [1.0, 0.0, 0.0]).unwrap() - 0.3).abs() < 1e-16);
    }

    #[test]
    fn identity_directions_flip_the_middle_row() {
        let info = InfoSystem {
            a: Matrix3::new(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1.9),
            offset: Vector3::new(0.01, 0.02, 0.03),
            t: 1.0,
        };
        let sys = compute_b(&info, &DirectionSet::identity());
        for i in 0..3 {
            assert_eq!(sys.b[(0, i)], info.a[(0, i)]);
            assert_eq!(sys.b[(1, i)], -info.a[(1, i)]);
            assert_eq!(sys.b[(2, i)], info.a[(2, i)]);
        }
        assert_eq!(sys.offset, Vector3::new(0.01, -0.02, 0.03 - 0.5));
        assert!((sys.b.determinant() + info.a.determinant()).abs() < 1e-15);
    }

    #[test]
    fn zero_system_has_rank_zero() {
        let info = InfoSystem { a: Matrix3::zeros(), offset: Vector3::zeros(), t: 0.0 };
        let sys = compute_b(&info, &DirectionSet::identity());
        assert_eq!(sys.b, Matrix3::zeros());
        let r = reconstruct_from_polarizations(&PolarizationReadout { j: [0.0, 0.0, -0.5], t1: 0.0, sigma: None }, &sys, 1e-8)
            .unwrap();
        assert_eq!(r.rank, 0);
        assert_eq!(r.classification, Classification::None);
        assert_eq!(r.nullspace.len(), 3);
        assert!(r.bloch.is_none());
    }

    #[test]
    fn singular_directions_rejected() {
        let err = DirectionSet::new([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::SingularDirections { .. }));
        assert_eq!(DirectionSet::identity().warnings().len(), 0);
        let skew = DirectionSet::new([[0.5, 0.5, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(skew.warnings().len(), 1);
    }

    #[test]
    fn maximally_mixed_sender_is_recovered() {
        let info = InfoSystem {
            a: Matrix3::new(0.0, 0.6, 0.1, 0.0, -0.1, 0.6, 0.5, 0.0, 0.0),
            offset: Vector3::new(0.0, 0.0, 0.5),
            t: 0.0,
        };
        let dirs = DirectionSet::new([[0.2, 0.3, 0.5], [0.6, 0.1, 0.3], [0.1, 0.1, 0.8]]).unwrap();
        let sys = compute_b(&info, &dirs);
        let x = Vector3::new(0.5, 0.0, 0.0);
        let readout = PolarizationReadout { j: sys.predict(&x).into(), t1: 0.0, sigma: None };
        let r = reconstruct_from_polarizations(&readout, &sys, 1e-8).unwrap();
        assert_eq!(r.classification, Classification::Complete);
        for k in 0..3 {
            assert!((r.x[k] - x[k]).abs() < 1e-14);
        }
        assert!(r.bloch.is_some());
        assert!(r.consistent);
    }

    #[test]
    fn solution_outside_ball_is_flagged() {
        let info = InfoSystem { a: Matrix3::identity(), offset: Vector3::zeros(), t: 0.0 };
        let mut rho = real_diag(&[0.5, 0.5]);
        rho[(0, 1)] = C64::new(0.9, 0.0);
        rho[(1, 0)] = C64::new(0.9, 0.0);
        let r = reconstruct_from_receiver(&DensityMatrix::probe(rho).unwrap(), &info, 1e-8).unwrap();
        assert!(r.bloch.is_none());
        assert!(r.ball_violation.unwrap() > 1e-6);
    }

    #[test]
    fn noise_is_seeded() {
        let j = PolarizationReadout { j: [0.1, -0.2, 0.3], t1: 1.0, sigma: None };
        assert_eq!(add_noise(&j, 0.0, 1).unwrap(), j);
        let a = add_noise(&j, 1e-3, 42).unwrap();
        let b = add_noise(&j, 1e-3, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, add_noise(&j, 1e-3, 43).unwrap());
        assert_eq!(a.sigma, Some(1e-3));
        assert_eq!(add_noise(&j, -1.0, 0), Err(Error::NegativeSigma(-1.0)));
    }

    #[test]
    fn report_json_fields() {
        let info = InfoSystem { a: Matrix3::identity(), offset: Vector3::zeros(), t: 0.0 };
        let rho = bloch_to_density(&BlochVector::new(0.1, 0.2, 0.0).unwrap());
        let r = reconstruct_from_receiver(&rho, &info, 1e-8).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["x", "rank", "classification", "residual", "condition_number", "nullspace"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["classification"], "complete");
    }
}
