//! Time scans of transfer quality with refinement of singular and
//! perfect-transfer instants.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::engine::TransferEngine;
use super::info::{classify, compute_info_system, Tolerances};
use super::pst::pst_check;
use crate::chain::{build_xy_hamiltonian, ChainSpec};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::evolution::diagonalize;
use crate::par::{map_ordered, Parallelism};

pub const TIME_UNIT: &str = "1/D";
pub const CSV_COLUMNS: [&str; 6] = ["t", "detA", "rank", "cond", "pst_exact", "pst_local"];

const GOLDEN_ITERS: usize = 200;
const BISECTION_ITERS: usize = 200;
/// Grid minima of the perfect-transfer residual above this are not refined.
const PST_CANDIDATE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScanOptions {
    pub tolerances: Tolerances,
    pub parallelism: Parallelism,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub t: f64,
    #[serde(rename = "detA")]
    pub det_a: f64,
    pub rank: usize,
    pub cond: f64,
    pub pst_exact: bool,
    pub pst_local: bool,
    #[serde(skip)]
    pub pst_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstantKind {
    /// Refined local minimum of `|det A|`.
    Minimum,
    /// Bisected sign change of `det A`.
    SignChange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularInstant {
    pub t: f64,
    #[serde(rename = "detA")]
    pub det_a: f64,
    pub kind: InstantKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PstInstant {
    pub t: f64,
    pub residual: f64,
    pub exact: bool,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub time_unit: String,
    pub points: Vec<ScanPoint>,
    /// Grid intervals `[t_start, t_end]` on which `|det A| < det_tol`.
    pub singular_intervals: Vec<[f64; 2]>,
    pub singular_instants: Vec<SingularInstant>,
    pub pst_instants: Vec<PstInstant>,
}

impl ScanResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Numerical(format!("write failed: {e}"));
        let mut out = out;
        writeln!(out, "# time unit: {TIME_UNIT}").map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Numerical(format!("write failed: {e}"));
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        for p in &self.points {
            w.write_record([
                // Debug formatting is shortest round-trip and switches to exponents for tiny values
                format!("{:?}", p.t),
                format!("{:?}", p.det_a),
                p.rank.to_string(),
                format!("{:?}", p.cond),
                p.pst_exact.to_string(),
                p.pst_local.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan result serializes")
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (i, w) in grid.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonIncreasingGrid { index: i + 1 });
        }
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Numerical("non-finite time in grid".into()));
    }
    Ok(())
}

/// `points` evenly spaced times covering `[t_min, t_max]`.
pub fn linear_grid(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![t_min];
    }
    let step = (t_max - t_min) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { t_max } else { t_min + step * i as f64 })
        .collect()
}

pub fn scan_time(spec: &ChainSpec, rest: &DensityMatrix, grid: &[f64], opts: &ScanOptions) -> Result<ScanResult> {
    check_grid(grid)?;
    let p = diagonalize(&build_xy_hamiltonian(spec)?)?;
    let engine = TransferEngine::new(spec, rest, &p)?;
    scan_with_engine(&engine, grid, opts)
}

struct Evaluator<'a> {
    engine: &'a TransferEngine,
    tol: Tolerances,
}

impl Evaluator<'_> {
    fn point(&self, t: f64) -> Result<ScanPoint> {
        let tm = self.engine.transfer_at(t);
        let class = classify(&compute_info_system(&tm), self.tol.det, self.tol.rank)?;
        let pst = pst_check(&tm, self.tol.pst)?;
        if !class.det.is_finite() {
            return Err(Error::Numerical(format!("non-finite det A at t = {t}")));
        }
        Ok(ScanPoint {
            t,
            det_a: class.det,
            rank: class.rank,
            cond: class.condition_number,
            pst_exact: pst.is_pst_exact,
            pst_local: pst.is_pst_up_to_local_unitary,
            pst_residual: pst.residual(),
        })
    }

    fn det(&self, t: f64) -> f64 {
        compute_info_system(&self.engine.transfer_at(t)).det()
    }

    fn pst_residual(&self, t: f64) -> f64 {
        pst_check(&self.engine.transfer_at(t), self.tol.pst).map(|c| c.residual()).unwrap_or(f64::INFINITY)
    }
}

pub fn scan_with_engine(engine: &TransferEngine, grid: &[f64], opts: &ScanOptions) -> Result<ScanResult> {
    check_grid(grid)?;
    opts.tolerances.validate()?;
    let eval = Evaluator { engine, tol: opts.tolerances };
    let points = map_ordered(grid, opts.parallelism, |&t| eval.point(t))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let det_tol = opts.tolerances.det;
    let singular_intervals = flagged_runs(&points, |p| p.det_a.abs() < det_tol);

    let minima: Vec<(f64, f64)> = local_minima(&points, |p| p.det_a.abs()).into_iter().map(|i| bracket(&points, i)).collect();
    let crossings: Vec<(f64, f64, f64)> = points
        .windows(2)
        .filter(|w| w[0].det_a != 0.0 && w[1].det_a != 0.0 && w[0].det_a.signum() != w[1].det_a.signum())
        .map(|w| (w[0].t, w[1].t, w[0].det_a))
        .collect();
    // refinements are independent of each other; fan them out like the grid
    let mut singular_instants: Vec<SingularInstant> = map_ordered(&minima, opts.parallelism, |&(lo, hi)| {
        let t = golden_min(|t| eval.det(t).abs(), lo, hi);
        SingularInstant { t, det_a: eval.det(t), kind: InstantKind::Minimum }
    })
    .into_iter()
    .filter(|s| s.det_a.abs() < det_tol)
    .chain(map_ordered(&crossings, opts.parallelism, |&(lo, hi, f_lo)| {
        let t = bisect(|t| eval.det(t), lo, hi, f_lo);
        SingularInstant { t, det_a: eval.det(t), kind: InstantKind::SignChange }
    }))
    .collect();
    singular_instants.sort_by(|a, b| a.t.total_cmp(&b.t));
    let min_gap = min_spacing(grid);
    singular_instants.dedup_by(|b, a| (b.t - a.t).abs() < min_gap);

    let candidates: Vec<(f64, f64)> = local_minima(&points, |p| p.pst_residual)
        .into_iter()
        .filter(|&i| points[i].pst_residual <= PST_CANDIDATE)
        .map(|i| bracket(&points, i))
        .collect();
    let mut pst_instants = Vec::new();
    for refined in map_ordered(&candidates, opts.parallelism, |&(lo, hi)| {
        let t = golden_min(|t| eval.pst_residual(t), lo, hi);
        pst_check(&engine.transfer_at(t), opts.tolerances.pst).map(|check| (t, check))
    }) {
        let (t, check) = refined?;
        if check.any() {
            pst_instants.push(PstInstant {
                t,
                residual: check.residual(),
                exact: check.is_pst_exact,
                phase: check.phase,
            });
        }
    }
    pst_instants.dedup_by(|b, a| (b.t - a.t).abs() < min_gap);

    Ok(ScanResult {
        time_unit: TIME_UNIT.to_string(),
        points,
        singular_intervals,
        singular_instants,
        pst_instants,
    })
}

fn min_spacing(grid: &[f64]) -> f64 {
    grid.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min).min(1e-6)
}

fn flagged_runs(points: &[ScanPoint], flag: impl Fn(&ScanPoint) -> bool) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut last = 0.0;
    for p in points {
        if flag(p) {
            start.get_or_insert(p.t);
            last = p.t;
        } else if let Some(s) = start.take() {
            out.push([s, last]);
        }
    }
    if let Some(s) = start {
        out.push([s, last]);
    }
    out
}

/// Grid indices that are no larger than their neighbours (endpoints
/// compare against their single neighbour). Plateaus report their first
/// index only.
fn local_minima(points: &[ScanPoint], f: impl Fn(&ScanPoint) -> f64) -> Vec<usize> {
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    let v: Vec<f64> = points.iter().map(&f).collect();
    (0..n)
        .filter(|&i| {
            let left_ok = i == 0 || v[i] < v[i - 1];
            let right_ok = i + 1 == n || v[i] <= v[i + 1];
            left_ok && right_ok
        })
        .collect()
}

fn bracket(points: &[ScanPoint], i: usize) -> (f64, f64) {
    let lo = if i == 0 { points[0].t } else { points[i - 1].t };
    let hi = if i + 1 == points.len() { points[i].t } else { points[i + 1].t };
    (lo, hi)
}

/// Golden-section minimization on `[lo, hi]`.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if (hi - lo).abs() <= 1e-13 * (1.0 + lo.abs()) {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    // endpoints can win when the minimum sits on the bracket edge
    let mid = 0.5 * (lo + hi);
    [(f(mid), mid), (f(lo), lo), (f(hi), hi)]
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, t)| t)
        .unwrap()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let sign_lo = f_lo.signum();
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
