// SPDX-License-Identifier: Apache-2.0

//! Periodic one-dimensional grid and its Fourier machinery.
//!
//! Nodes sit at `Q_j = -L/2 + j L/M`. Wavenumbers follow the usual FFT
//! ordering with the Nyquist mode assigned to `-pi M / L`; momenta are
//! `p = hbar k`, so the momentum cutoff is `p_max = hbar pi M / L`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::model::MockPlanck;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    length: f64,
    points: usize,
    hbar: MockPlanck,
}

impl Grid1D {
    pub fn new(length: f64, points: usize, hbar: MockPlanck) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid length must be positive, got {length}")));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid points must be a power of two >= 16, got {points}"
            )));
        }
        Ok(Self { length, points, hbar })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn hbar(&self) -> MockPlanck {
        self.hbar
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.node(j)).collect()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        let m = self.points as i64;
        let dk = 2.0 * PI / self.length;
        (0..m).map(|j| if j < m / 2 { j as f64 * dk } else { (j - m) as f64 * dk }).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        let h = self.hbar.value();
        self.wavenumbers().into_iter().map(|k| h * k).collect()
    }

    pub fn p_max(&self) -> f64 {
        self.hbar.value() * PI * self.points as f64 / self.length
    }

    pub fn with_hbar(&self, hbar: MockPlanck) -> Self {
        Self { hbar, ..*self }
    }

    /// Same period and node set up to a change of `hbar`.
    pub fn same_nodes(&self, other: &Grid1D) -> bool {
        self.points == other.points && self.length == other.length
    }

    pub fn check_matches(&self, other: &Grid1D) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// FFT plans for one grid size, shared by every transform on that grid.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid1D,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: &Grid1D) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid: *grid,
            forward: planner.plan_fft_forward(grid.points()),
            inverse: planner.plan_fft_inverse(grid.points()),
            k: grid.wavenumbers(),
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// Unnormalised forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Inverse transform in place, normalised so that it inverts [`Self::forward`].
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let s = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }

    /// Multiplies the spectrum of `values` by `symbol(k)` and transforms back.
    pub fn apply_symbol<F>(&self, values: &[Complex64], symbol: F) -> Vec<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        let mut buf = values.to_vec();
        self.forward(&mut buf);
        for (z, &k) in buf.iter_mut().zip(&self.k) {
            *z *= symbol(k);
        }
        self.inverse(&mut buf);
        buf
    }

    /// `order`-th spectral derivative; odd orders drop the Nyquist mode.
    pub fn derivative(&self, values: &[Complex64], order: u32) -> Vec<Complex64> {
        let nyquist = -PI * self.grid.points() as f64 / self.grid.length();
        self.apply_symbol(values, |k| {
            if order % 2 == 1 && k == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k).powu(order)
            }
        })
    }

    pub fn derivative_real(&self, values: &[f64], order: u32) -> Vec<f64> {
        let c: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.derivative(&c, order).into_iter().map(|z| z.re).collect()
    }

    /// Trigonometric interpolant sampled on a grid `factor` times finer.
    pub fn upsample(&self, values: &[Complex64], factor: usize) -> Vec<Complex64> {
        let m = self.grid.points();
        let fine = m * factor;
        let mut spec = values.to_vec();
        self.forward(&mut spec);
        let mut padded = vec![Complex64::new(0.0, 0.0); fine];
        padded[..m / 2].copy_from_slice(&spec[..m / 2]);
        for j in m / 2 + 1..m {
            padded[fine - (m - j)] = spec[j];
        }
        // Split the Nyquist coefficient symmetrically.
        padded[m / 2] = 0.5 * spec[m / 2];
        padded[fine - m / 2] = 0.5 * spec[m / 2];
        let plan = FftPlanner::new().plan_fft_inverse(fine);
        plan.process(&mut padded);
        let s = 1.0 / m as f64;
        padded.iter_mut().for_each(|z| *z *= s);
        padded
    }

    /// Evaluates the trigonometric interpolant of `values` at `x`.
    pub fn interpolate(&self, spectrum: &[Complex64], x: f64) -> Complex64 {
        let m = self.grid.points();
        let x0 = x - self.grid.node(0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, (&c, &k)) in spectrum.iter().zip(&self.k).enumerate() {
            if j == m / 2 {
                acc += c * (k * x0).cos();
            } else {
                acc += c * Complex64::from_polar(1.0, k * x0);
            }
        }
        acc / m as f64
    }
}
