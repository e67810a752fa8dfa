// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Spectral};

/// Complex field sampled at the nodes of a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.points()
            )));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("WaveFunction::new"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Grid1D, f: F) -> Result<Self> {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `\int |psi|^2 dQ` by the trapezoid (spectrally exact) rule.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::DomainError("cannot normalise a zero wave function".into()));
        }
        self.values.iter_mut().for_each(|z| *z /= n);
        Ok(self)
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `<self, other> = \int conj(self) other dQ`.
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        s * self.grid.spacing()
    }

    /// `|<a, b>| / (|a| |b|)`.
    pub fn overlap(&self, other: &WaveFunction) -> f64 {
        self.inner(other).norm() / (self.norm() * other.norm())
    }

    /// L2 norm of the difference.
    pub fn distance(&self, other: &WaveFunction) -> f64 {
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        (s * self.grid.spacing()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Fraction of the norm carried by momenta with `|p| > fraction * p_max`.
    pub fn momentum_weight_beyond(&self, spectral: &Spectral, fraction: f64) -> f64 {
        let mut spec = self.values.clone();
        spectral.forward(&mut spec);
        let cutoff = fraction * self.grid.p_max();
        let h = self.grid.hbar().value();
        let (mut outside, mut total) = (0.0, 0.0);
        for (z, &k) in spec.iter().zip(spectral.wavenumbers()) {
            let w = z.norm_sqr();
            total += w;
            if (h * k).abs() > cutoff {
                outside += w;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            outside / total
        }
    }

    /// `<P> = \int conj(psi) (-i hbar d/dQ) psi dQ / |psi|^2`.
    pub fn mean_momentum(&self, spectral: &Spectral) -> f64 {
        let h = self.grid.hbar().value();
        let mut spec = self.values.clone();
        spectral.forward(&mut spec);
        let (mut num, mut den) = (0.0, 0.0);
        for (z, &k) in spec.iter().zip(spectral.wavenumbers()) {
            num += h * k * z.norm_sqr();
            den += z.norm_sqr();
        }
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MockPlanck;

    #[test]
    fn norms_and_overlaps() {
        let g = Grid1D::new(20.0, 256, MockPlanck::new(1.0).unwrap()).unwrap();
        let psi = WaveFunction::from_fn(g, |x| Complex64::new((-x * x / 2.0).exp(), 0.0)).unwrap();
        // \int e^{-x^2} dx = sqrt(pi)
        assert!((psi.norm_sqr() - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let n = psi.clone().normalized().unwrap();
        assert!((n.norm() - 1.0).abs() < 1e-14);
        let phased = WaveFunction::new(g, n.values().iter().map(|z| z * Complex64::from_polar(1.0, 0.7)).collect()).unwrap();
        assert!((n.overlap(&phased) - 1.0).abs() < 1e-14);
        assert!(n.distance(&n) == 0.0);
        assert!(WaveFunction::new(g, vec![Complex64::new(0.0, 0.0); 3]).is_err());
    }
}
