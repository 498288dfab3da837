//! Bright/dark decomposition of each degenerate dressed-lower block.
//!
//! For a block of dimension `l` with coupling slice `C_[l]` (the `N_u × l`
//! columns of `C`), the number of bright states is the numerical rank of
//! `C_[l]` and the dark states span its right null space. Blocks are
//! independent, so they are analysed in parallel.

use std::ops::Range;

use nalgebra::linalg::SVD;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dressing::{hermitian_eigendecompose, DressedSystem, Tolerances};
use crate::linalg::{fix_phase, from_slice, projector, to_vec, CMatrix, CVector, ZERO};
use crate::par;
use crate::system_model::LevelId;
use crate::verifier::VerificationResult;

/// Floor for the global largest singular value.
pub const SIGMA_FLOOR: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DarkStateError {
    #[error("column {column} is not proportional to the reference column (residual {residual:e})")]
    NotProportional { column: usize, residual: f64 },
    #[error("every column of the block is zero; there is no reference column")]
    ZeroBlock,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl DarkStateError {
    pub fn kind(&self) -> &'static str {
        match self {
            DarkStateError::NotProportional { .. } => "NotProportional",
            DarkStateError::ZeroBlock => "NotProportional",
            DarkStateError::DimensionMismatch { .. } => "DimensionMismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockAnalysis {
    pub block_index: usize,
    /// First dressed lower index of the block.
    pub offset: usize,
    pub omega: f64,
    pub dim: usize,
    pub rank: usize,
    /// Descending, `min(N_u, dim)` values.
    pub singular_values: Vec<f64>,
    /// Over the block's dressed lower states.
    pub bright_states_dressed: Vec<Vec<C64>>,
    pub dark_states_dressed: Vec<Vec<C64>>,
    /// Over the bare lower states, in `lower_levels` order.
    pub dark_states_bare: Vec<Vec<C64>>,
    /// Block-local columns that are numerically zero (uncoupled dressed states).
    pub zero_columns: Vec<usize>,
}

impl BlockAnalysis {
    pub fn n_dark(&self) -> usize {
        self.dark_states_dressed.len()
    }

    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.dim
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DarkStateReport {
    pub n_upper: usize,
    pub n_lower: usize,
    pub upper_levels: Vec<LevelId>,
    pub lower_levels: Vec<LevelId>,
    pub upper_energies: Vec<f64>,
    pub lower_energies: Vec<f64>,
    pub sigma_max: f64,
    pub blocks: Vec<BlockAnalysis>,
    pub total_dark: usize,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerificationResult>,
}

impl DarkStateReport {
    pub fn total_rank(&self) -> usize {
        self.blocks.iter().map(|b| b.rank).sum()
    }

    pub fn n_levels(&self) -> usize {
        self.n_upper + self.n_lower
    }

    /// Dark states over the bare lower basis, all blocks concatenated.
    pub fn dark_states_bare(&self) -> Vec<CVector> {
        self.blocks
            .iter()
            .flat_map(|b| b.dark_states_bare.iter().map(|v| from_slice(v)))
            .collect()
    }

    /// Dark states over the full bare basis `|N⟩, …, |1⟩`; upper amplitudes are 0.
    pub fn dark_states_full(&self) -> Vec<CVector> {
        let n = self.n_levels();
        self.dark_states_bare()
            .into_iter()
            .map(|bare| {
                let mut full = CVector::from_element(n, ZERO);
                for (k, id) in self.lower_levels.iter().enumerate() {
                    full[n - id.0 as usize] = bare[k];
                }
                full
            })
            .collect()
    }

    /// Dark-state energies, one per entry of [`Self::dark_states_full`].
    pub fn dark_energies(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|b| std::iter::repeat_n(b.omega, b.n_dark())).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialisation")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

struct SvdSplit {
    singular_values: Vec<f64>,
    rank: usize,
    bright: Vec<CVector>,
    dark: Vec<CVector>,
}

/// Full right-singular basis of `c` split at `σ > cutoff`.
fn svd_split(c: &CMatrix, cutoff: f64) -> SvdSplit {
    let (nu, l) = c.shape();
    let rows = nu.max(l);
    let mut padded = CMatrix::from_element(rows, l, ZERO);
    padded.view_mut((0, 0), (nu, l)).copy_from(c);
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let rank = sigma.iter().filter(|&&s| s > cutoff).count();

    let vector = |k: usize| {
        let mut v: Vec<C64> = v_t.row(k).iter().map(|z| z.conj()).collect();
        fix_phase(&mut v);
        from_slice(&v)
    };
    let bright = order[..rank].iter().map(|&k| vector(k)).collect();
    let dark = order[rank..].iter().rev().map(|&k| vector(k)).collect();
    SvdSplit { singular_values: sigma[..nu.min(l)].to_vec(), rank, bright, dark }
}

fn largest_singular_value(c: &CMatrix) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    c.singular_values().iter().fold(0.0f64, |a, &s| a.max(s))
}

/// Orthonormal basis of the right null space of `c`, rank cut relative to its
/// own largest singular value.
pub fn null_space(c: &CMatrix, tol_rank: f64) -> Vec<CVector> {
    assert!(c.ncols() >= 1, "null space of a matrix without columns");
    let sigma_max = largest_singular_value(c).max(SIGMA_FLOOR);
    svd_split(c, tol_rank * sigma_max).dark
}

pub fn analyze(dressed: &DressedSystem, tol: &Tolerances) -> DarkStateReport {
    let sigma_max = largest_singular_value(&dressed.coupling).max(SIGMA_FLOOR);
    let cutoff = tol.tol_rank * sigma_max;
    let indexed: Vec<(usize, Range<usize>)> = dressed.blocks.iter().cloned().enumerate().collect();

    let blocks = par::map(&indexed, |(k, range)| {
        let l = range.len();
        let slice = dressed.coupling.columns(range.start, l).into_owned();
        let split = svd_split(&slice, cutoff);
        let zero_columns = (0..l)
            .filter(|&j| slice.column(j).iter().all(|z| z.norm() <= cutoff))
            .collect();
        let dark_states_bare = split
            .dark
            .iter()
            .map(|d| to_vec(&dressed_to_bare(d, range.start, &dressed.s_lower)))
            .collect();
        BlockAnalysis {
            block_index: *k,
            offset: range.start,
            omega: dressed.omega[range.clone()].iter().sum::<f64>() / l as f64,
            dim: l,
            rank: split.rank,
            singular_values: split.singular_values,
            bright_states_dressed: split.bright.iter().map(to_vec).collect(),
            dark_states_dressed: split.dark.iter().map(to_vec).collect(),
            dark_states_bare,
            zero_columns,
        }
    });

    let total_dark = blocks.iter().map(BlockAnalysis::n_dark).sum();
    DarkStateReport {
        n_upper: dressed.n_upper(),
        n_lower: dressed.n_lower(),
        upper_levels: dressed.upper_order.clone(),
        lower_levels: dressed.lower_order.clone(),
        upper_energies: dressed.delta.clone(),
        lower_energies: dressed.omega.clone(),
        sigma_max,
        blocks,
        total_dark,
        tolerances: *tol,
        verify: None,
    }
}

/// `S_l†` applied to a block-local dressed vector zero-padded to `N_l`.
fn dressed_to_bare(local: &CVector, offset: usize, s_lower: &CMatrix) -> CVector {
    let nl = s_lower.nrows();
    let mut padded = CVector::from_element(nl, ZERO);
    padded.rows_mut(offset, local.len()).copy_from(local);
    s_lower.adjoint() * padded
}

/// Recomputes the bare-basis dark states of `report` from its dressed ones.
pub fn to_bare_basis(mut report: DarkStateReport, s_lower: &CMatrix) -> DarkStateReport {
    for block in &mut report.blocks {
        block.dark_states_bare = block
            .dark_states_dressed
            .iter()
            .map(|d| to_vec(&dressed_to_bare(&from_slice(d), block.offset, s_lower)))
            .collect();
    }
    report
}

/// A block whose columns are all multiples of one reference column:
/// `column_{order[j]} = λ_{j+1} · column_{order[0]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionalColumns {
    /// Block-local column index of `L_1`, then of `L_2, L_3, …`.
    pub order: Vec<usize>,
    /// `λ_2 … λ_l`.
    pub ratios: Vec<C64>,
}

impl ProportionalColumns {
    /// Reference column is the first nonzero one.
    pub fn from_block(c: &CMatrix, tol_rank: f64) -> Result<Self, DarkStateError> {
        let l = c.ncols();
        let scale = c.norm();
        if scale == 0.0 || l == 0 {
            return Err(DarkStateError::ZeroBlock);
        }
        let r = (0..l)
            .find(|&j| c.column(j).norm() > tol_rank * scale)
            .ok_or(DarkStateError::ZeroBlock)?;
        let reference = c.column(r);
        let ref_sq = reference.norm_squared();
        let order: Vec<usize> = std::iter::once(r).chain((0..l).filter(|&j| j != r)).collect();
        let mut ratios = Vec::with_capacity(l - 1);
        for &j in &order[1..] {
            let col = c.column(j);
            let lambda = reference.dotc(&col) / ref_sq;
            let residual = (col - reference * lambda).norm();
            if residual > tol_rank * scale {
                return Err(DarkStateError::NotProportional { column: j, residual });
            }
            ratios.push(lambda);
        }
        Ok(ProportionalColumns { order, ratios })
    }

    pub fn from_ratios(ratios: Vec<C64>) -> Self {
        ProportionalColumns { order: (0..=ratios.len()).collect(), ratios }
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }

    /// `𝒩_0 = 1`, `𝒩_{j′} = sqrt(1 + Σ_{i′=2}^{j′+1} |λ_{i′}|²)`.
    pub fn running_norms(&self) -> Vec<f64> {
        let mut acc = 1.0;
        std::iter::once(1.0)
            .chain(self.ratios.iter().map(|lam| {
                acc += lam.norm_sqr();
                acc.sqrt()
            }))
            .collect()
    }
}

/// Bright state and `l − 1` dark states built one column at a time.
///
/// `B_0 = L_1`; for `j′ = 1 … l−1`
/// `B_{j′} = (𝒩_{j′−1} B_{j′−1} + λ*_{j′+1} L_{j′+1}) / 𝒩_{j′}` and
/// `D_{j′} = (λ_{j′+1} B_{j′−1} − 𝒩_{j′−1} L_{j′+1}) / 𝒩_{j′}`.
/// Vectors are over the block-local columns.
pub fn recursive_bright_dark(p: &ProportionalColumns) -> (CVector, Vec<CVector>) {
    let l = p.dim();
    let norms = p.running_norms();
    let unit = |k: usize| {
        let mut v = CVector::from_element(l, ZERO);
        v[p.order[k]] = C64::new(1.0, 0.0);
        v
    };
    let mut bright = unit(0);
    let mut darks = Vec::with_capacity(l - 1);
    for jp in 1..l {
        let lam = p.ratios[jp - 1];
        let next = unit(jp);
        let (prev_n, n) = (norms[jp - 1], norms[jp]);
        let dark = (&bright * lam - &next * C64::from(prev_n)).unscale(n);
        bright = (&bright * C64::from(prev_n) + &next * lam.conj()).unscale(n);
        darks.push(dark);
    }
    (bright, darks)
}

/// Spectral norm of `P_A − P_B`; `0` iff the spans coincide.
pub fn subspace_distance(a: &[CVector], b: &[CVector]) -> Result<f64, DarkStateError> {
    let mut dims = a.iter().chain(b).map(|v| v.len());
    let Some(dim) = dims.next() else { return Ok(0.0) };
    if let Some(found) = dims.find(|&d| d != dim) {
        return Err(DarkStateError::DimensionMismatch { expected: dim, found });
    }
    let diff = projector(a, dim) - projector(b, dim);
    let eig = hermitian_eigendecompose(&((&diff + diff.adjoint()).unscale(2.0)))
        .expect("projector difference is Hermitian");
    Ok(eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}
