//! Independent checks of reported dark states.
//!
//! A dark state must (a) have no amplitude driven into the upper subspace by
//! one application of `H`, (b) be an eigenstate of `H`, and (c) never leak
//! population into the upper levels under exact unitary evolution. Evolution
//! uses the Hermitian eigenbasis, `e^{−iHt} = V·e^{−iEt}·V†`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::darkstate::DarkStateReport;
use crate::dressing::{hermitian_eigendecompose, DressingError};
use crate::linalg::{max_abs, CMatrix, CVector};
use crate::par;
use crate::system_model::RotatingHamiltonian;

pub const DEFAULT_TIME_POINTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifierError {
    #[error("dimension mismatch: Hamiltonian is {expected}×{expected}, state has {found} entries")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Eigen(#[from] DressingError),
}

impl VerifierError {
    pub fn kind(&self) -> &'static str {
        match self {
            VerifierError::DimensionMismatch { .. } => "DimensionMismatch",
            VerifierError::Eigen(e) => e.kind(),
        }
    }
}

/// `max_j |(H·state)_j|` over the given (upper) indices.
pub fn decoupling_residual(h: &CMatrix, state: &CVector, upper_indices: &[usize]) -> Result<f64, VerifierError> {
    if state.len() != h.nrows() {
        return Err(VerifierError::DimensionMismatch { expected: h.nrows(), found: state.len() });
    }
    let hs = h * state;
    Ok(upper_indices.iter().fold(0.0f64, |m, &j| m.max(hs[j].norm())))
}

/// `‖H·state − energy·state‖`.
pub fn eigen_residual(h: &CMatrix, state: &CVector, energy: f64) -> f64 {
    (h * state - state * C64::from(energy)).norm()
}

/// Exact propagator of a fixed Hermitian `H`.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: Vec<f64>,
    /// Eigenvectors as columns.
    basis: CMatrix,
}

impl Propagator {
    pub fn new(h: &CMatrix) -> Result<Self, VerifierError> {
        let eig = hermitian_eigendecompose(h)?;
        Ok(Propagator { energies: eig.values, basis: eig.unitary.adjoint() })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn evolve(&self, state0: &CVector, t: f64) -> Result<CVector, VerifierError> {
        if state0.len() != self.dim() {
            return Err(VerifierError::DimensionMismatch { expected: self.dim(), found: state0.len() });
        }
        let mut coeffs = self.basis.adjoint() * state0;
        for (c, e) in coeffs.iter_mut().zip(&self.energies) {
            *c *= C64::from_polar(1.0, -e * t);
        }
        Ok(&self.basis * coeffs)
    }
}

pub fn evolve(h: &CMatrix, state0: &CVector, t: f64) -> Result<CVector, VerifierError> {
    Propagator::new(h)?.evolve(state0, t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSample {
    pub t: f64,
    pub state: CVector,
    pub upper_population: f64,
}

pub fn upper_population(state: &CVector, upper_indices: &[usize]) -> f64 {
    upper_indices.iter().map(|&j| state[j].norm_sqr()).sum()
}

pub fn trajectory(
    prop: &Propagator,
    state0: &CVector,
    upper_indices: &[usize],
    times: &[f64],
) -> Result<Vec<EvolutionSample>, VerifierError> {
    times
        .iter()
        .map(|&t| {
            let state = prop.evolve(state0, t)?;
            let upper_population = upper_population(&state, upper_indices);
            Ok(EvolutionSample { t, state, upper_population })
        })
        .collect()
}

/// 64 points over `[0, 20·2π/ω_scale]`, `ω_scale = max(‖H‖_max, 1e-12)`.
pub fn default_time_grid(h: &CMatrix) -> Vec<f64> {
    let scale = max_abs(h).max(1e-12);
    let t_max = 20.0 * 2.0 * PI / scale;
    let n = DEFAULT_TIME_POINTS;
    (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
}

/// A state to verify, with the energy it should be an eigenstate at.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkCandidate {
    pub state: CVector,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub residuals: Vec<f64>,
    pub eigen_residuals: Vec<f64>,
    pub max_leakage: Vec<f64>,
    pub residual_threshold: f64,
    pub leakage_threshold: f64,
    pub pass: bool,
}

/// Residuals and the worst upper population over `times` for each candidate.
///
/// Residuals are judged against `tol_residual·(1+‖H‖_max)`, leakage (a
/// population, already dimensionless) against `tol_residual`.
pub fn leakage_scan(
    h: &CMatrix,
    candidates: &[DarkCandidate],
    upper_indices: &[usize],
    times: &[f64],
    tol_residual: f64,
) -> Result<VerificationResult, VerifierError> {
    assert!(!times.is_empty(), "leakage scan needs at least one time");
    let prop = Propagator::new(h)?;
    let rows = par::map(candidates, |c| -> Result<(f64, f64, f64), VerifierError> {
        let residual = decoupling_residual(h, &c.state, upper_indices)?;
        let eigen = eigen_residual(h, &c.state, c.energy);
        let mut leak = 0.0f64;
        for &t in times {
            leak = leak.max(upper_population(&prop.evolve(&c.state, t)?, upper_indices));
        }
        Ok((residual, eigen, leak))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let residual_threshold = tol_residual * (1.0 + max_abs(h));
    let leakage_threshold = tol_residual;
    let pass = rows
        .iter()
        .all(|(r, e, l)| *r <= residual_threshold && *e <= residual_threshold && *l <= leakage_threshold);
    Ok(VerificationResult {
        residuals: rows.iter().map(|r| r.0).collect(),
        eigen_residuals: rows.iter().map(|r| r.1).collect(),
        max_leakage: rows.iter().map(|r| r.2).collect(),
        residual_threshold,
        leakage_threshold,
        pass,
    })
}

/// Row/column indices of the report's upper levels in `ham`.
pub fn upper_indices(ham: &RotatingHamiltonian, report: &DarkStateReport) -> Vec<usize> {
    report.upper_levels.iter().map(|id| ham.index_of(*id).expect("level in Hamiltonian")).collect()
}

/// Verifies every dark state of `report` against the full Hamiltonian.
pub fn verify_report(
    ham: &RotatingHamiltonian,
    report: &DarkStateReport,
    times: Option<&[f64]>,
) -> Result<VerificationResult, VerifierError> {
    let h = ham.matrix();
    let grid;
    let times = match times {
        Some(t) => t,
        None => {
            grid = default_time_grid(h);
            &grid
        }
    };
    let candidates: Vec<DarkCandidate> = report
        .dark_states_full()
        .into_iter()
        .zip(report.dark_energies())
        .map(|(state, energy)| DarkCandidate { state, energy })
        .collect();
    leakage_scan(h, &candidates, &upper_indices(ham, report), times, report.tolerances.tol_residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_slice;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    /// Λ system over |3>,|2>,|1> with Ω13 = a, Ω23 = b, zero detunings.
    fn lambda(a: f64, b: f64) -> CMatrix {
        CMatrix::from_row_slice(3, 3, &[r(0.0), r(b), r(a), r(b), r(0.0), r(0.0), r(a), r(0.0), r(0.0)])
    }

    #[test]
    fn dark_and_bright_residuals() {
        let (a, b) = (1.0, 2.0);
        let h = lambda(a, b);
        let n = (a * a + b * b).sqrt();
        // (Ω23|1> − Ω13|2>)/N over |3>,|2>,|1>
        let dark = from_slice(&[r(0.0), r(-a / n), r(b / n)]);
        assert!(decoupling_residual(&h, &dark, &[0]).unwrap() <= 1e-12 * 2.0);
        let bright = from_slice(&[r(0.0), r(b / n), r(a / n)]);
        assert!((decoupling_residual(&h, &bright, &[0]).unwrap() - n).abs() < 1e-12);
        assert!(decoupling_residual(&CMatrix::zeros(3, 3), &bright, &[0]).unwrap() == 0.0);
        assert!(decoupling_residual(&h, &from_slice(&[r(1.0)]), &[0]).is_err());
    }

    #[test]
    fn evolve_identity_and_phase() {
        let h = lambda(1.0, 0.5);
        let s = from_slice(&[r(0.0), r(0.6), C64::new(0.0, 0.8)]);
        assert!((evolve(&h, &s, 0.0).unwrap() - &s).norm() < 1e-10);
        let eig = hermitian_eigendecompose(&h).unwrap();
        let v = eig.vector(2);
        let t = 3.7;
        let expect = &v * C64::from_polar(1.0, -eig.values[2] * t);
        assert!((evolve(&h, &v, t).unwrap() - expect).norm() < 1e-10);
    }

    #[test]
    fn bright_state_rabi_transfer() {
        let h = lambda(1.0, 1.0);
        let s2 = 2f64.sqrt();
        let bright = from_slice(&[r(0.0), r(1.0 / s2), r(1.0 / s2)]);
        let t = PI / (2.0 * s2);
        let out = evolve(&h, &bright, t).unwrap();
        assert!((upper_population(&out, &[0]) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn scan_dark_and_generic() {
        let h = lambda(1.0, 2.0);
        let n = 5f64.sqrt();
        let dark = DarkCandidate { state: from_slice(&[r(0.0), r(-1.0 / n), r(2.0 / n)]), energy: 0.0 };
        let times = default_time_grid(&h);
        let res = leakage_scan(&h, &[dark], &[0], &times, 1e-9).unwrap();
        assert!(res.pass && res.max_leakage[0] <= 1e-10);

        let generic = DarkCandidate { state: from_slice(&[r(0.0), r(1.0), r(0.0)]), energy: 0.0 };
        let res = leakage_scan(&h, &[generic], &[0], &times, 1e-9).unwrap();
        assert!(!res.pass && res.max_leakage[0] > 0.01);
    }

    #[test]
    fn time_grid_shape() {
        let g = default_time_grid(&lambda(2.0, 0.5));
        assert_eq!(g.len(), 64);
        assert_eq!(g[0], 0.0);
        assert!((g[63] - 20.0 * PI).abs() < 1e-12);
    }
}
