//! Independent reference implementations shared by the integration tests.
//! Nothing here calls into the library's numerics: operators are built from
//! Kronecker products, propagators from nalgebra's Padé exponential, and
//! partial traces from explicit index loops.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use std::f64::consts::PI;
use xyinfo::{BlochVector, CMat, C64};

pub type NMat = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn to_na(m: &CMat) -> NMat {
    NMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn from_na(m: &NMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn max_diff(a: &NMat, b: &NMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sp() -> NMat {
    NMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
}

fn sz() -> NMat {
    NMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)])
}

/// `op` on 1-based `site` of an `n`-site register, site 1 leftmost.
pub fn local(op: &NMat, site: usize, n: usize) -> NMat {
    let mut out = NMat::identity(1, 1);
    for s in 1..=n {
        let f = if s == site { op.clone() } else { NMat::identity(2, 2) };
        out = out.kronecker(&f);
    }
    out
}

/// `−(D/2) Σ_bonds (I⁺I⁻ + I⁻I⁺) + Σ ω_i I_z,i` on `n` sites.
pub fn hamiltonian(n: usize, d: f64, bonds: &[(usize, usize)], zeeman: &[(usize, f64)]) -> NMat {
    let dim = 1 << n;
    let mut h = NMat::zeros(dim, dim);
    let plus = sp();
    let minus = sp().adjoint();
    for &(i, j) in bonds {
        let hop = &local(&plus, i, n) * &local(&minus, j, n);
        h += (&hop + hop.adjoint()) * c(-d / 2.0, 0.0);
    }
    for &(i, w) in zeeman {
        h += local(&sz(), i, n) * c(w, 0.0);
    }
    h
}

pub fn chain_bonds(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i, i + 1)).collect()
}

pub fn total_sz(n: usize) -> NMat {
    (1..=n).fold(NMat::zeros(1 << n, 1 << n), |acc, i| acc + local(&sz(), i, n))
}

pub fn propagator(h: &NMat, t: f64) -> NMat {
    (h * c(0.0, -t)).exp()
}

pub fn gibbs(h: &NMat, beta: f64) -> NMat {
    let e = (h * c(-beta, 0.0)).exp();
    let z = e.trace();
    e / z
}

/// Keeps the single 1-based `site` of an `n`-site state.
pub fn reduce_to_site(rho: &NMat, site: usize, n: usize) -> NMat {
    let mut out = NMat::zeros(2, 2);
    let shift = n - site;
    for i in 0..rho.nrows() {
        for j in 0..rho.ncols() {
            let env_i = i & !(1 << shift);
            let env_j = j & !(1 << shift);
            if env_i == env_j {
                out[((i >> shift) & 1, (j >> shift) & 1)] += rho[(i, j)];
            }
        }
    }
    out
}

pub fn sender_matrix(x: [f64; 3]) -> NMat {
    NMat::from_row_slice(2, 2, &[c(x[0], 0.0), c(x[1], x[2]), c(x[1], -x[2]), c(1.0 - x[0], 0.0)])
}

/// `⟨0…01| e^{−iHt} |10…0⟩` for the homogeneous chain from the path-graph
/// spectrum: `E_k = −D cos(kπ/(N+1))`.
pub fn end_to_end_amplitude(n: usize, d: f64, t: f64) -> C64 {
    let m = (n + 1) as f64;
    (1..=n)
        .map(|k| {
            let q = k as f64 * PI / m;
            let w = 2.0 / m * q.sin() * (n as f64 * q).sin();
            C64::from_polar(w, d * q.cos() * t)
        })
        .sum()
}

/// Uniform sample from the Bloch ball.
pub fn random_bloch(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if v.iter().map(|a| a * a).sum::<f64>() <= 1.0 {
            return [0.5 * (1.0 - v[0]), 0.5 * v[1], 0.5 * v[2]];
        }
    }
}

pub fn bloch(x: [f64; 3]) -> BlochVector {
    BlochVector::new(x[0], x[1], x[2]).unwrap()
}

/// `G G⁺ / Tr` for a Gaussian `G`: full rank, generic spectrum.
pub fn random_density(rng: &mut impl Rng, n: usize) -> NMat {
    let dim = 1 << n;
    let g = NMat::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}
