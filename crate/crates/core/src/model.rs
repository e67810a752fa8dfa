// SPDX-License-Identifier: Apache-2.0

//! Shared domain types: Lotka-Volterra coefficients, the canonical
//! two-species reduction and its harmonic approximation, and the mock
//! Planck constant.
//!
//! The multi-species system is
//!
//! ```text
//! dN_i/dt = eps_i N_i + beta_i^-1 sum_j alpha_ij N_i N_j
//! ```
//!
//! with `alpha` antisymmetric. Its interior fixed point `q` solves
//! `eps_i beta_i + sum_j alpha_ij q_j = 0`, and in logarithmic coordinates
//! `z_i = log(N_i / q_i)` the two-species case is canonical with
//!
//! ```text
//! H(Q, P) = gamma alpha_1 (e^Q - Q) + gamma alpha_2 (e^P - P).
//! ```

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A Hamiltonian of the form `H(Q, P) = V(Q) + T(P)`.
///
/// Every Hamiltonian in this crate is separable, so quantization has no
/// ordering ambiguity and leapfrog splitting is exact in each sub-step.
pub trait Separable: Sync {
    fn potential(&self, q: f64) -> f64;
    fn potential_d1(&self, q: f64) -> f64;
    fn potential_d2(&self, q: f64) -> f64;
    fn kinetic(&self, p: f64) -> f64;
    fn kinetic_d1(&self, p: f64) -> f64;
    fn kinetic_d2(&self, p: f64) -> f64;

    fn energy(&self, q: f64, p: f64) -> f64 {
        self.potential(q) + self.kinetic(p)
    }

    /// Mass of the `P^2 / 2m` kinetic term, if the kinetic term has that form.
    fn canonical_mass(&self) -> Option<f64> {
        None
    }
}

/// Multi-species Lotka-Volterra coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LVParams {
    epsilon: Vec<f64>,
    beta: Vec<f64>,
    alpha: Vec<Vec<f64>>,
}

impl LVParams {
    pub fn new(epsilon: Vec<f64>, beta: Vec<f64>, alpha: Vec<Vec<f64>>) -> Result<Self> {
        let m = epsilon.len();
        if m == 0 {
            return Err(Error::InvalidParameter("species_count must be positive".into()));
        }
        if beta.len() != m || alpha.len() != m || alpha.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidParameter(format!(
                "epsilon, beta and alpha must all have dimension {m}"
            )));
        }
        let finite = epsilon.iter().chain(&beta).chain(alpha.iter().flatten()).all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("coefficients must be finite".into()));
        }
        if let Some(i) = beta.iter().position(|&b| b <= 0.0) {
            return Err(Error::InvalidParameter(format!("beta[{i}] must be positive")));
        }
        for i in 0..m {
            for j in i..m {
                if alpha[i][j] != -alpha[j][i] {
                    return Err(Error::NotAntisymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { epsilon, beta, alpha })
    }

    pub fn species_count(&self) -> usize {
        self.epsilon.len()
    }

    pub fn epsilon(&self) -> &[f64] {
        &self.epsilon
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn alpha(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    /// z-space couplings `gamma_ij = alpha_ij / (beta_i beta_j)`.
    pub fn gamma(&self) -> Vec<Vec<f64>> {
        let m = self.species_count();
        (0..m)
            .map(|i| (0..m).map(|j| self.alpha[i][j] / (self.beta[i] * self.beta[j])).collect())
            .collect()
    }

    /// Right-hand side of the population equations.
    pub fn population_rhs(&self, n: &[f64], out: &mut [f64]) {
        for i in 0..self.species_count() {
            let coupling: f64 = self.alpha[i].iter().zip(n).map(|(a, nj)| a * nj).sum();
            out[i] = n[i] * (self.epsilon[i] + coupling / self.beta[i]);
        }
    }

    /// Right-hand side in logarithmic coordinates,
    /// `dz_i/dt = beta_i^-1 sum_j alpha_ij q_j (e^{z_j} - 1)`.
    pub fn z_rhs(&self, q: &[f64], z: &[f64], out: &mut [f64]) {
        for i in 0..self.species_count() {
            let s: f64 = (0..z.len()).map(|j| self.alpha[i][j] * q[j] * z[j].exp_m1()).sum();
            out[i] = s / self.beta[i];
        }
    }
}

/// Interior fixed point `q` of the population equations.
pub fn fixed_point(params: &LVParams) -> Result<Vec<f64>> {
    let m = params.species_count();
    let a = DMatrix::from_fn(m, m, |i, j| params.alpha[i][j]);
    let rhs = DVector::from_fn(m, |i, _| -params.epsilon[i] * params.beta[i]);
    let lu = a.clone().lu();
    let scale = a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let det = lu.determinant();
    if scale == 0.0 || det.abs() <= f64::EPSILON * scale.powi(m as i32) * m as f64 {
        return Err(Error::SingularInteractionMatrix);
    }
    let q = lu.solve(&rhs).ok_or(Error::SingularInteractionMatrix)?;
    let residual = (&a * &q - &rhs).norm();
    if residual > 1e-10 * rhs.norm().max(f64::MIN_POSITIVE) && residual > 1e-300 {
        return Err(Error::SingularInteractionMatrix);
    }
    let q: Vec<f64> = q.iter().copied().collect();
    if q.iter().any(|&v| v <= 0.0) {
        return Err(Error::NonpositiveFixedPoint { q });
    }
    Ok(q)
}

pub fn to_z_coordinates(params: &LVParams, populations: &[f64]) -> Result<Vec<f64>> {
    let q = fixed_point(params)?;
    if populations.len() != q.len() {
        return Err(Error::DomainError("population vector has wrong dimension".into()));
    }
    if let Some(i) = populations.iter().position(|&n| !(n > 0.0 && n.is_finite())) {
        return Err(Error::DomainError(format!("population {i} must be positive")));
    }
    Ok(populations.iter().zip(&q).map(|(n, qi)| (n / qi).ln()).collect())
}

pub fn from_z_coordinates(params: &LVParams, z: &[f64]) -> Result<Vec<f64>> {
    let q = fixed_point(params)?;
    if z.len() != q.len() {
        return Err(Error::DomainError("z vector has wrong dimension".into()));
    }
    Ok(z.iter().zip(&q).map(|(zi, qi)| qi * zi.exp()).collect())
}

/// The emergent action scale, with units of time squared.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MockPlanck(f64);

impl MockPlanck {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParameter(format!("mock Planck constant must be positive, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A point `(Q, P)` of the canonical two-species phase space at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub q: f64,
    pub p: f64,
    pub t: f64,
}

impl PhaseState {
    pub fn new(q: f64, p: f64, t: f64) -> Self {
        Self { q, p, t }
    }
}

/// Canonical two-species coefficients: `gamma = gamma_12 = -gamma_21` and
/// `alpha_i = q_i beta_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpeciesParams {
    pub gamma: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl TwoSpeciesParams {
    pub fn new(gamma: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        for (name, v) in [("gamma", gamma), ("alpha1", alpha1), ("alpha2", alpha2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { gamma, alpha1, alpha2 })
    }

    /// Minimum of `H`, attained at `Q = P = 0`.
    pub fn minimum_energy(&self) -> f64 {
        self.gamma * (self.alpha1 + self.alpha2)
    }

    pub fn harmonic(&self) -> HarmonicApprox {
        HarmonicApprox {
            offset: self.minimum_energy(),
            frequency: self.gamma * (self.alpha1 * self.alpha2).sqrt(),
            effective_mass: 1.0 / (self.gamma * self.alpha2),
        }
    }

    /// A two-species [`LVParams`] whose canonical reduction is `self`, with
    /// `beta = 1`, species 1 mapped to `Q` and fixed point `q = (alpha1, alpha2)`.
    pub fn to_lv(&self) -> LVParams {
        let (g, a1, a2) = (self.gamma, self.alpha1, self.alpha2);
        LVParams::new(vec![-g * a2, g * a1], vec![1.0, 1.0], vec![vec![0.0, g], vec![-g, 0.0]])
            .expect("positive two-species parameters embed into a valid LV system")
    }
}

impl Separable for TwoSpeciesParams {
    fn potential(&self, q: f64) -> f64 {
        self.gamma * self.alpha1 * (q.exp() - q)
    }
    fn potential_d1(&self, q: f64) -> f64 {
        self.gamma * self.alpha1 * q.exp_m1()
    }
    fn potential_d2(&self, q: f64) -> f64 {
        self.gamma * self.alpha1 * q.exp()
    }
    fn kinetic(&self, p: f64) -> f64 {
        self.gamma * self.alpha2 * (p.exp() - p)
    }
    fn kinetic_d1(&self, p: f64) -> f64 {
        self.gamma * self.alpha2 * p.exp_m1()
    }
    fn kinetic_d2(&self, p: f64) -> f64 {
        self.gamma * self.alpha2 * p.exp()
    }
}

/// `H(Q, P)` of the two-species system.
pub fn lv_hamiltonian(params: &TwoSpeciesParams, state: &PhaseState) -> Result<f64> {
    let h = params.energy(state.q, state.p);
    if h.is_finite() {
        Ok(h)
    } else {
        Err(Error::NonFinite("lv_hamiltonian"))
    }
}

/// Two-species model with its canonical orientation.
///
/// The canonical pair is `(Q, P) = (z_a, z_b)` with `gamma_ab > 0`; when
/// `gamma_12 < 0` the species are swapped so that `Q = z_2`, `P = z_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalModel {
    pub params: TwoSpeciesParams,
    pub fixed_point: [f64; 2],
    /// Index of the species whose log-population is `Q`.
    pub q_species: usize,
}

impl CanonicalModel {
    pub fn from_lv(lv: &LVParams) -> Result<Self> {
        if lv.species_count() != 2 {
            return Err(Error::InvalidParameter(
                "canonical structure requires species_count = 2".into(),
            ));
        }
        let q = fixed_point(lv)?;
        let g12 = lv.gamma()[0][1];
        let (q_species, p_species) = if g12 > 0.0 { (0, 1) } else { (1, 0) };
        let gamma = g12.abs();
        let a = |i: usize| q[i] * lv.beta[i];
        let params = TwoSpeciesParams::new(gamma, a(q_species), a(p_species))?;
        Ok(Self { params, fixed_point: [q[0], q[1]], q_species })
    }

    fn p_species(&self) -> usize {
        1 - self.q_species
    }

    pub fn to_phase(&self, populations: &[f64], t: f64) -> Result<PhaseState> {
        if populations.len() != 2 || populations.iter().any(|&n| !(n > 0.0 && n.is_finite())) {
            return Err(Error::DomainError("two positive populations required".into()));
        }
        let z = |i: usize| (populations[i] / self.fixed_point[i]).ln();
        Ok(PhaseState::new(z(self.q_species), z(self.p_species()), t))
    }

    pub fn to_populations(&self, state: &PhaseState) -> [f64; 2] {
        let mut n = [0.0; 2];
        n[self.q_species] = self.fixed_point[self.q_species] * state.q.exp();
        n[self.p_species()] = self.fixed_point[self.p_species()] * state.p.exp();
        n
    }
}

/// Quadratic expansion of the two-species Hamiltonian about its minimum,
/// `H ~ offset + k Q^2 / 2 + P^2 / 2m` with `k = gamma alpha_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicApprox {
    pub offset: f64,
    pub frequency: f64,
    pub effective_mass: f64,
}

impl HarmonicApprox {
    pub fn spring_constant(&self) -> f64 {
        self.effective_mass * self.frequency * self.frequency
    }

    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.frequency
    }
}

impl Separable for HarmonicApprox {
    fn potential(&self, q: f64) -> f64 {
        self.offset + 0.5 * self.spring_constant() * q * q
    }
    fn potential_d1(&self, q: f64) -> f64 {
        self.spring_constant() * q
    }
    fn potential_d2(&self, _q: f64) -> f64 {
        self.spring_constant()
    }
    fn kinetic(&self, p: f64) -> f64 {
        0.5 * p * p / self.effective_mass
    }
    fn kinetic_d1(&self, p: f64) -> f64 {
        p / self.effective_mass
    }
    fn kinetic_d2(&self, _p: f64) -> f64 {
        1.0 / self.effective_mass
    }
    fn canonical_mass(&self) -> Option<f64> {
        Some(self.effective_mass)
    }
}

/// Force-free motion, `H = P^2 / 2m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParticle {
    pub mass: f64,
}

impl Separable for FreeParticle {
    fn potential(&self, _q: f64) -> f64 {
        0.0
    }
    fn potential_d1(&self, _q: f64) -> f64 {
        0.0
    }
    fn potential_d2(&self, _q: f64) -> f64 {
        0.0
    }
    fn kinetic(&self, p: f64) -> f64 {
        0.5 * p * p / self.mass
    }
    fn kinetic_d1(&self, p: f64) -> f64 {
        p / self.mass
    }
    fn kinetic_d2(&self, _p: f64) -> f64 {
        1.0 / self.mass
    }
    fn canonical_mass(&self) -> Option<f64> {
        Some(self.mass)
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn fixed_point_residual_is_small(
            e1 in 0.1f64..3.0, e2 in -3.0f64..-0.1,
            b1 in 0.2f64..3.0, b2 in 0.2f64..3.0,
            a in 0.1f64..4.0,
        ) {
            let lv = LVParams::new(vec![e1, e2], vec![b1, b2], vec![vec![0.0, -a], vec![a, 0.0]]).unwrap();
            let q = fixed_point(&lv).unwrap();
            let eb = [e1 * b1, e2 * b2];
            let norm = (eb[0] * eb[0] + eb[1] * eb[1]).sqrt();
            for i in 0..2 {
                let r = eb[i] + lv.alpha()[i][0] * q[0] + lv.alpha()[i][1] * q[1];
                prop_assert!(r.abs() <= 1e-10 * norm);
            }
        }

        #[test]
        fn antisymmetry_survives_canonical_embedding(g in 0.1f64..3.0, a1 in 0.1f64..3.0, a2 in 0.1f64..3.0) {
            let lv = TwoSpeciesParams::new(g, a1, a2).unwrap().to_lv();
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert_eq!(lv.alpha()[i][j], -lv.alpha()[j][i]);
                }
            }
            let gm = lv.gamma();
            prop_assert_eq!(gm[0][1], -gm[1][0]);
        }
    }
}
