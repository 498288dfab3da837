//! Dressed upper/lower bases and the thick arrowhead form.
//!
//! `S_u`, `S_l` diagonalise the upper and lower blocks (`S·M·S† = diag`), and
//! the coupling becomes `C = S_u·c·S_l†`. Dressed lower states whose energies
//! coincide are grouped into degenerate blocks; only inside such a block can
//! couplings interfere destructively.

use std::ops::Range;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{fix_phase, hermitian_asymmetry, max_abs, CMatrix, ZERO};
use crate::partition::BlockHamiltonian;
use crate::system_model::LevelId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DressingError {
    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds guard {guard:e}")]
    NonHermitianInput { asymmetry: f64, guard: f64 },
    #[error("Hermitian eigensolver did not converge on a {0}×{0} matrix")]
    ConvergenceFailure(usize),
    #[error("tolerance `{0}` must be positive and finite, got {1}")]
    InvalidTolerance(&'static str, f64),
}

impl DressingError {
    pub fn kind(&self) -> &'static str {
        match self {
            DressingError::NonHermitianInput { .. } => "NonHermitianInput",
            DressingError::ConvergenceFailure(_) => "ConvergenceFailure",
            DressingError::InvalidTolerance(..) => "ValidationError",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol_degeneracy: f64,
    pub tol_rank: f64,
    pub tol_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tol_degeneracy: 1e-8, tol_rank: 1e-9, tol_residual: 1e-9 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), DressingError> {
        for (name, v) in [
            ("tol_degeneracy", self.tol_degeneracy),
            ("tol_rank", self.tol_rank),
            ("tol_residual", self.tol_residual),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(DressingError::InvalidTolerance(name, v));
            }
        }
        Ok(())
    }
}

/// `unitary · M · unitary† = diag(values)`; row `k` is the conjugated `k`-th
/// eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub unitary: CMatrix,
}

impl EigenDecomposition {
    /// Eigenvector `k` as a column (`unitary†` column `k`).
    pub fn vector(&self, k: usize) -> crate::linalg::CVector {
        self.unitary.row(k).adjoint()
    }
}

pub fn hermitian_eigendecompose(m: &CMatrix) -> Result<EigenDecomposition, DressingError> {
    let n = m.nrows();
    assert!(m.is_square(), "eigendecomposition of a non-square matrix");
    let guard = 1e-12 * max_abs(m);
    let asymmetry = hermitian_asymmetry(m);
    if asymmetry > guard {
        return Err(DressingError::NonHermitianInput { asymmetry, guard });
    }
    if n == 0 {
        return Ok(EigenDecomposition { values: Vec::new(), unitary: CMatrix::zeros(0, 0) });
    }
    let sym = (m + m.adjoint()).unscale(2.0);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or(DressingError::ConvergenceFailure(n))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut unitary = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (row, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let mut v: Vec<_> = eig.eigenvectors.column(k).iter().copied().collect();
        fix_phase(&mut v);
        for (col, z) in v.iter().enumerate() {
            unitary[(row, col)] = z.conj();
        }
    }
    Ok(EigenDecomposition { values, unitary })
}

/// Single-linkage clustering of ascending values: neighbours join a block iff
/// their gap is at most `tol · max(1, |median|)`.
pub fn group_degenerate(values: &[f64], tol_degeneracy: f64) -> Vec<Range<usize>> {
    if values.is_empty() {
        return Vec::new();
    }
    let scale = 1f64.max(median(values).abs());
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..values.len() {
        if values[i] - values[i - 1] > tol_degeneracy * scale {
            blocks.push(start..i);
            start = i;
        }
    }
    blocks.push(start..values.len());
    blocks
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DressedSystem {
    pub s_upper: CMatrix,
    pub s_lower: CMatrix,
    /// Dressed upper energies `Δ_{n_u}`, ascending.
    pub delta: Vec<f64>,
    /// Dressed lower energies `Ω_{n_l}`, ascending.
    pub omega: Vec<f64>,
    /// `C = S_u·c·S_l†`.
    pub coupling: CMatrix,
    pub blocks: Vec<Range<usize>>,
    pub upper_order: Vec<LevelId>,
    pub lower_order: Vec<LevelId>,
}

impl DressedSystem {
    pub fn n_upper(&self) -> usize {
        self.delta.len()
    }

    pub fn n_lower(&self) -> usize {
        self.omega.len()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// `[[diag Δ, C], [C†, diag Ω]]`.
    pub fn arrowhead(&self) -> CMatrix {
        let (nu, nl) = (self.n_upper(), self.n_lower());
        let mut out = CMatrix::from_element(nu + nl, nu + nl, ZERO);
        for (i, d) in self.delta.iter().enumerate() {
            out[(i, i)] = d.into();
        }
        for (i, w) in self.omega.iter().enumerate() {
            out[(nu + i, nu + i)] = w.into();
        }
        out.view_mut((0, nu), (nu, nl)).copy_from(&self.coupling);
        out.view_mut((nu, 0), (nl, nu)).copy_from(&self.coupling.adjoint());
        out
    }
}

pub fn dress(block: &BlockHamiltonian, tol: &Tolerances) -> Result<DressedSystem, DressingError> {
    tol.validate()?;
    let upper = hermitian_eigendecompose(&block.h_upper)?;
    let lower = hermitian_eigendecompose(&block.h_lower)?;
    let coupling = &upper.unitary * &block.coupling * lower.unitary.adjoint();
    let blocks = group_degenerate(&lower.values, tol.tol_degeneracy);
    Ok(DressedSystem {
        s_upper: upper.unitary,
        s_lower: lower.unitary,
        delta: upper.values,
        omega: lower.values,
        coupling,
        blocks,
        upper_order: block.upper_order.clone(),
        lower_order: block.lower_order.clone(),
    })
}
