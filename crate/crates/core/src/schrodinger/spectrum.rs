// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::{check_leakage, DiscreteHamiltonian, HamiltonianSpec};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::model::TwoSpeciesParams;
use crate::rng::stream_rng;
use crate::wave::WaveFunction;

/// Lowest eigenpairs, sorted by energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub energies: Vec<f64>,
    pub states: Vec<WaveFunction>,
    /// `|| H psi_n - E_n psi_n ||` in the grid L2 norm.
    pub residuals: Vec<f64>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Largest `|<psi_m, psi_n> - delta_mn|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (m, a) in self.states.iter().enumerate() {
            for (n, b) in self.states.iter().enumerate() {
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }
}

/// Normalised Hermite functions `psi_0..=psi_n_max` of the harmonic
/// approximation, sampled on `grid`.
pub fn hermite_functions(params: &TwoSpeciesParams, grid: &Grid1D, n_max: usize) -> Vec<WaveFunction> {
    let ha = params.harmonic();
    let scale = (ha.effective_mass * ha.frequency / grid.hbar().value()).sqrt();
    let pref = scale.sqrt() * std::f64::consts::PI.powf(-0.25);
    let mut columns = vec![Vec::with_capacity(grid.points()); n_max + 1];
    for q in grid.nodes() {
        let xi = scale * q;
        let mut prev = 0.0;
        let mut cur = pref * (-0.5 * xi * xi).exp();
        for (n, col) in columns.iter_mut().enumerate() {
            col.push(Complex64::new(cur, 0.0));
            let nf = n as f64;
            let next = (2.0 / (nf + 1.0)).sqrt() * xi * cur - (nf / (nf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
    }
    columns.into_iter().map(|c| WaveFunction::new(*grid, c).expect("finite Hermite samples")).collect()
}

/// Closed-form spectrum `E_n = gamma (alpha_1 + alpha_2) + hbar omega (n + 1/2)`
/// with Hermite-function states; residuals use the discrete harmonic operator.
pub fn harmonic_spectrum(params: &TwoSpeciesParams, grid: &Grid1D, n_max: usize) -> Result<SpectrumResult> {
    let ha = params.harmonic();
    let hbar = grid.hbar().value();
    let turning_point = (2.0 * hbar * ha.frequency * (n_max as f64 + 0.5) / ha.spring_constant()).sqrt();
    let quarter = grid.length() / 4.0;
    if turning_point > quarter {
        return Err(Error::GridTooSmall { turning_point, quarter });
    }
    let energies: Vec<f64> =
        (0..=n_max).map(|n| ha.offset + hbar * ha.frequency * (n as f64 + 0.5)).collect();
    let states = hermite_functions(params, grid, n_max);
    let op = DiscreteHamiltonian::new(&HamiltonianSpec::new(super::PotentialKind::Harmonic, *params, *grid));
    let residuals = residuals(&op, &energies, &states);
    Ok(SpectrumResult { energies, states, residuals })
}

fn residuals(op: &DiscreteHamiltonian, energies: &[f64], states: &[WaveFunction]) -> Vec<f64> {
    energies
        .iter()
        .zip(states)
        .map(|(&e, psi)| {
            let hpsi = op.apply(psi.values());
            let s: f64 = hpsi.iter().zip(psi.values()).map(|(a, b)| (a - e * b).norm_sqr()).sum();
            (s * psi.grid().spacing()).sqrt()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Grids with more points than this use the Krylov solver.
    pub dense_threshold: usize,
    /// Relative Ritz residual accepted by the Krylov solver.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { dense_threshold: 2048, tolerance: 1e-11, max_iterations: 4000 }
    }
}

/// Lowest `n_levels` eigenpairs with [`SolverOptions::default`].
pub fn solve_spectrum(spec: &HamiltonianSpec, n_levels: usize) -> Result<SpectrumResult> {
    solve_spectrum_with(spec, n_levels, &SolverOptions::default())
}

pub fn solve_spectrum_with(spec: &HamiltonianSpec, n_levels: usize, options: &SolverOptions) -> Result<SpectrumResult> {
    let m = spec.grid.points();
    if n_levels == 0 || n_levels > m / 4 {
        return Err(Error::InvalidParameter(format!("n_levels must be in 1..={}, got {n_levels}", m / 4)));
    }
    let op = DiscreteHamiltonian::new(spec);
    let (energies, vectors) =
        if m <= options.dense_threshold { dense(&op, n_levels) } else { lanczos(&op, n_levels, options)? };
    let inv_sqrt_dx = 1.0 / spec.grid.spacing().sqrt();
    let states = vectors
        .into_iter()
        .map(|v| {
            let v = gauge_fix(v);
            WaveFunction::new(spec.grid, v.into_iter().map(|z| z * inv_sqrt_dx).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    for psi in &states {
        check_leakage(psi, &op.spectral)?;
    }
    let residuals = residuals(&op, &energies, &states);
    Ok(SpectrumResult { energies, states, residuals })
}

/// Makes the largest component real and positive.
fn gauge_fix(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let pivot = v.iter().copied().fold(Complex64::new(0.0, 0.0), |best, z| if z.norm() > best.norm() { z } else { best });
    if pivot.norm() > 0.0 {
        let phase = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
    v
}

/// `H_jl = c[(j - l) mod M] + delta_jl V(Q_j)` with `c` the inverse DFT of `T`.
fn dense(op: &DiscreteHamiltonian, n_levels: usize) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let m = op.potential.len();
    let mut c: Vec<Complex64> = op.kinetic.iter().map(|&t| Complex64::new(t, 0.0)).collect();
    op.spectral.inverse(&mut c);
    let h = DMatrix::from_fn(m, m, |j, l| {
        let k = c[(j + m - l) % m];
        if j == l {
            k + op.potential[j]
        } else {
            k
        }
    });
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order
        .into_iter()
        .take(n_levels)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
        .unzip()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Lanczos with full reorthogonalisation and a matrix-free operator.
fn lanczos(
    op: &DiscreteHamiltonian,
    n_levels: usize,
    options: &SolverOptions,
) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let m = op.potential.len();
    let max_k = options.max_iterations.min(m);
    let mut rng = stream_rng(0x1a2c, 0);
    let mut v: Vec<Complex64> = (0..m)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let n0 = norm(&v);
    v.iter_mut().for_each(|z| *z /= n0);

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(max_k);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_k);
    let mut beta: Vec<f64> = Vec::with_capacity(max_k);
    let scale = op.kinetic.iter().chain(&op.potential).fold(0.0f64, |s, x| s.max(x.abs()));
    let mut last_residual = f64::INFINITY;

    loop {
        let mut w = op.apply(&v);
        let a = dot(&v, &w).re;
        basis.push(v);
        alpha.push(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b_next = norm(&w);
        let k = basis.len();
        let exhausted = b_next <= 1e-14 * scale || k == max_k;
        if k >= n_levels && (k.is_multiple_of(10) || exhausted) {
            let t = DMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j {
                    beta[i]
                } else if j + 1 == i {
                    beta[j]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
            let wanted = &order[..n_levels];
            last_residual = wanted
                .iter()
                .map(|&i| (b_next * eig.eigenvectors[(k - 1, i)]).abs() / eig.eigenvalues[i].abs().max(1.0))
                .fold(0.0, f64::max);
            if last_residual <= options.tolerance || b_next <= 1e-14 * scale {
                let energies = wanted.iter().map(|&i| eig.eigenvalues[i]).collect();
                let vectors = wanted
                    .iter()
                    .map(|&i| {
                        let s: DVector<f64> = eig.eigenvectors.column(i).into_owned();
                        let mut x = vec![Complex64::new(0.0, 0.0); m];
                        for (coef, b) in s.iter().zip(&basis) {
                            x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += *coef * bi);
                        }
                        let n = norm(&x);
                        x.iter_mut().for_each(|z| *z /= n);
                        x
                    })
                    .collect();
                return Ok((energies, vectors));
            }
        }
        if exhausted {
            return Err(Error::ConvergenceFailure { iterations: k, residual: last_residual });
        }
        beta.push(b_next);
        v = w.into_iter().map(|z| z / b_next).collect();
    }
}
