// SPDX-License-Identifier: Apache-2.0

//! The polar dictionary `psi = sqrt(rho) exp(i S / hbar)` between a complex
//! field and a (density, action) pair, the density-curvature term it
//! produces and a discrete continuity-equation check.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Spectral};
use crate::wave::WaveFunction;

/// Relative amplitude below which a grid value counts as a node.
pub const NODE_FLOOR: f64 = 1e-8;
/// Fraction of the Nyquist wavenumber kept when differentiating `|psi|`.
pub const DEALIAS_FRACTION: f64 = 2.0 / 3.0;

/// Density and action on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MadelungFields {
    grid: Grid1D,
    rho: Vec<f64>,
    action: Vec<f64>,
}

impl MadelungFields {
    pub fn new(grid: Grid1D, rho: Vec<f64>, action: Vec<f64>) -> Result<Self> {
        if rho.len() != grid.points() || action.len() != grid.points() {
            return Err(Error::GridMismatch("rho and action must match the grid".into()));
        }
        if rho.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
            return Err(Error::InvalidParameter("rho must be finite and non-negative".into()));
        }
        if action.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("MadelungFields::new"));
        }
        Ok(Self { grid, rho, action })
    }

    pub fn from_fn<R, S>(grid: Grid1D, rho: R, action: S) -> Result<Self>
    where
        R: Fn(f64) -> f64,
        S: Fn(f64) -> f64,
    {
        let x = grid.nodes();
        Self::new(grid, x.iter().map(|&q| rho(q)).collect(), x.iter().map(|&q| action(q)).collect())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn action(&self) -> &[f64] {
        &self.action
    }

    /// `\int rho dQ`.
    pub fn mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.grid.spacing()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let m = self.mass();
        if m <= 0.0 {
            return Err(Error::DomainError("density has zero mass".into()));
        }
        self.rho.iter_mut().for_each(|r| *r /= m);
        Ok(self)
    }
}

/// `psi = sqrt(rho) exp(i S / hbar)` on the `+` branch.
pub fn compose_psi(fields: &MadelungFields) -> WaveFunction {
    let h = fields.grid.hbar().value();
    let values = fields
        .rho
        .iter()
        .zip(&fields.action)
        .map(|(&r, &s)| Complex64::from_polar(r.sqrt(), s / h))
        .collect();
    WaveFunction::new(fields.grid, values).expect("finite fields compose to a finite wave function")
}

/// Fails with [`Error::NodeEncountered`] if `min |psi| < NODE_FLOOR max |psi|`.
pub fn check_nodeless(psi: &WaveFunction) -> Result<()> {
    let floor = NODE_FLOOR * psi.max_abs();
    let (index, value) = psi
        .values()
        .iter()
        .map(|z| z.norm())
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, a)| if a < best.1 { (i, a) } else { best });
    if value < floor || psi.max_abs() == 0.0 {
        Err(Error::NodeEncountered { index, value })
    } else {
        Ok(())
    }
}

/// Phase unwrapped along the grid from node 0 by nearest-integer `2 pi` jumps.
pub fn unwrapped_phase(values: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev = 0.0;
    for (j, z) in values.iter().enumerate() {
        let raw = z.arg();
        let phase = if j == 0 { raw } else { raw - TAU * ((raw - prev) / TAU).round() };
        out.push(phase);
        prev = phase;
    }
    out
}

/// Inverse of [`compose_psi`] for nodeless fields.
pub fn decompose_psi(psi: &WaveFunction) -> Result<MadelungFields> {
    check_nodeless(psi)?;
    let h = psi.grid().hbar().value();
    let rho = psi.density();
    let action = unwrapped_phase(psi.values()).into_iter().map(|p| h * p).collect();
    MadelungFields::new(*psi.grid(), rho, action)
}

/// `(hbar^2 / 2m) R'' / R` with `R = |psi|`, using a spectral second derivative.
pub fn quantum_potential(psi: &WaveFunction, effective_mass: f64) -> Result<Vec<f64>> {
    check_nodeless(psi)?;
    let spectral = Spectral::new(psi.grid());
    Ok(quantum_potential_masked(&spectral, psi.values(), effective_mass, 0.0))
}

/// The de Broglie-Bohm quantum potential `-(hbar^2 / 2m) R'' / R`, the
/// negative of [`quantum_potential`].
pub fn bohm_potential(psi: &WaveFunction, effective_mass: f64) -> Result<Vec<f64>> {
    Ok(quantum_potential(psi, effective_mass)?.into_iter().map(|v| -v).collect())
}

/// Density-curvature term with grid points where `|psi| < floor max |psi|`
/// set to zero; `R''` keeps only `|k| <= DEALIAS_FRACTION k_Nyquist`.
pub(crate) fn quantum_potential_masked(
    spectral: &Spectral,
    values: &[Complex64],
    effective_mass: f64,
    floor: f64,
) -> Vec<f64> {
    let h = spectral.grid().hbar().value();
    let amp: Vec<f64> = values.iter().map(|z| z.norm()).collect();
    let cut = floor * amp.iter().fold(0.0f64, |m, &a| m.max(a));
    let kc = DEALIAS_FRACTION * PI * spectral.grid().points() as f64 / spectral.grid().length();
    let c: Vec<Complex64> = amp.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let curvature: Vec<f64> = spectral
        .apply_symbol(&c, |k| Complex64::new(if k.abs() <= kc { -k * k } else { 0.0 }, 0.0))
        .into_iter()
        .map(|z| z.re)
        .collect();
    let pref = h * h / (2.0 * effective_mass);
    amp.iter()
        .zip(&curvature)
        .map(|(&a, &c)| if a > cut && a > 0.0 { pref * c / a } else { 0.0 })
        .collect()
}

/// Probability current `(hbar / m) Im(conj(psi) psi')`.
pub fn probability_current(spectral: &Spectral, psi: &WaveFunction, effective_mass: f64) -> Vec<f64> {
    let h = psi.grid().hbar().value();
    let d = spectral.derivative(psi.values(), 1);
    psi.values()
        .iter()
        .zip(&d)
        .map(|(z, dz)| h / effective_mass * (z.conj() * dz).im)
        .collect()
}

/// L2 norm of `(rho_1 - rho_0) / dt + d/dQ (rho v)` with the flux averaged
/// over both snapshots, i.e. a time difference centred on `t + dt/2`.
pub fn continuity_residual(
    before: &MadelungFields,
    after: &MadelungFields,
    effective_mass: f64,
    dt: f64,
) -> Result<f64> {
    before.grid.check_matches(&after.grid)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter("dt must be positive".into()));
    }
    let spectral = Spectral::new(&before.grid);
    let j0 = probability_current(&spectral, &compose_psi(before), effective_mass);
    let j1 = probability_current(&spectral, &compose_psi(after), effective_mass);
    let flux: Vec<f64> = j0.iter().zip(&j1).map(|(a, b)| 0.5 * (a + b)).collect();
    let div = spectral.derivative_real(&flux, 1);
    let sum: f64 = before
        .rho
        .iter()
        .zip(&after.rho)
        .zip(&div)
        .map(|((r0, r1), d)| {
            let r = (r1 - r0) / dt + d;
            r * r
        })
        .sum();
    Ok((sum * before.grid.spacing()).sqrt())
}


#[cfg(test)]
mod proptests {
    use super::*;
    use crate::model::MockPlanck;
    use proptest::prelude::*;

    fn random_nodeless(coeffs: &[(f64, f64)], hbar: f64) -> WaveFunction {
        let g = Grid1D::new(3.0, 64, MockPlanck::new(hbar).unwrap()).unwrap();
        let k = TAU / g.length();
        WaveFunction::from_fn(g, |q| {
            let mut amp = 1.5;
            let mut phase = 0.0;
            for (n, &(a, b)) in coeffs.iter().enumerate() {
                amp += 0.2 * a * ((n + 1) as f64 * k * q).cos();
                phase += 3.0 * b * ((n + 1) as f64 * k * q).sin();
            }
            Complex64::from_polar(amp, phase + 2.0 * k * q)
        })
        .unwrap()
    }

    proptest! {
        #[test]
        fn decompose_then_compose_is_identity(
            coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5),
            hbar in 0.01f64..1.0,
        ) {
            let psi = random_nodeless(&coeffs, hbar);
            let back = compose_psi(&decompose_psi(&psi).unwrap());
            for (a, b) in psi.values().iter().zip(back.values()) {
                prop_assert!((a - b).norm() <= 1e-9);
            }
        }

        #[test]
        fn quantum_potential_is_scale_free(
            coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5),
            c in 0.01f64..100.0,
        ) {
            let psi = random_nodeless(&coeffs, 0.3);
            let scaled = WaveFunction::new(*psi.grid(), psi.values().iter().map(|z| z * c.sqrt()).collect()).unwrap();
            let a = quantum_potential(&psi, 1.0).unwrap();
            let b = quantum_potential(&scaled, 1.0).unwrap();
            let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-10 * scale);
            }
        }
    }
}
