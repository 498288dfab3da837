//! Upper/lower split of the rotating-frame Hamiltonian.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::linalg::CMatrix;
use crate::system_model::{LevelId, RotatingHamiltonian};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("the upper set is empty")]
    EmptyUpper,
    #[error("the lower set has {0} level(s); at least 2 are needed for interference")]
    LowerTooSmall(usize),
    #[error("unknown level {0}")]
    UnknownLevel(LevelId),
}

impl PartitionError {
    pub fn kind(&self) -> &'static str {
        match self {
            PartitionError::EmptyUpper => "EmptyUpper",
            PartitionError::LowerTooSmall(_) => "LowerTooSmall",
            PartitionError::UnknownLevel(_) => "UnknownLevel",
        }
    }
}

/// Disjoint upper/lower level sets, each in descending label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    upper: Vec<LevelId>,
    lower: Vec<LevelId>,
}

impl Partition {
    pub fn new(n_levels: usize, upper_ids: &[LevelId]) -> Result<Self, PartitionError> {
        let mut set = BTreeSet::new();
        for id in upper_ids {
            if id.0 == 0 || id.0 as usize > n_levels {
                return Err(PartitionError::UnknownLevel(*id));
            }
            set.insert(*id);
        }
        if set.is_empty() {
            return Err(PartitionError::EmptyUpper);
        }
        let lower: Vec<LevelId> =
            (1..=n_levels as u32).rev().map(LevelId).filter(|id| !set.contains(id)).collect();
        if lower.len() < 2 {
            return Err(PartitionError::LowerTooSmall(lower.len()));
        }
        Ok(Partition { upper: set.into_iter().rev().collect(), lower })
    }

    pub fn upper(&self) -> &[LevelId] {
        &self.upper
    }

    pub fn lower(&self) -> &[LevelId] {
        &self.lower
    }

    pub fn n_levels(&self) -> usize {
        self.upper.len() + self.lower.len()
    }

    /// Uppers then lowers; position `k` of the block matrix is this level.
    pub fn order(&self) -> Vec<LevelId> {
        self.upper.iter().chain(&self.lower).copied().collect()
    }
}

/// `[[H_u, c], [c†, H_l]]` over `(upper…, lower…)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHamiltonian {
    pub h_upper: CMatrix,
    pub h_lower: CMatrix,
    pub coupling: CMatrix,
    pub upper_order: Vec<LevelId>,
    pub lower_order: Vec<LevelId>,
}

impl BlockHamiltonian {
    pub fn n_upper(&self) -> usize {
        self.upper_order.len()
    }

    pub fn n_lower(&self) -> usize {
        self.lower_order.len()
    }
}

pub fn partition(ham: &RotatingHamiltonian, upper_ids: &[LevelId]) -> Result<BlockHamiltonian, PartitionError> {
    let p = Partition::new(ham.dim(), upper_ids)?;
    Ok(split(ham, &p))
}

pub fn split(ham: &RotatingHamiltonian, p: &Partition) -> BlockHamiltonian {
    let m = ham.matrix();
    let idx = |id: &LevelId| ham.index_of(*id).expect("partition matches dimension");
    let up: Vec<usize> = p.upper().iter().map(idx).collect();
    let lo: Vec<usize> = p.lower().iter().map(idx).collect();
    let sub = |rows: &[usize], cols: &[usize]| {
        CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
    };
    BlockHamiltonian {
        h_upper: sub(&up, &up),
        h_lower: sub(&lo, &lo),
        coupling: sub(&up, &lo),
        upper_order: p.upper().to_vec(),
        lower_order: p.lower().to_vec(),
    }
}

/// Reassembles `[[H_u, c], [c†, H_l]]`.
pub fn assemble_full(block: &BlockHamiltonian) -> CMatrix {
    let (nu, nl) = (block.n_upper(), block.n_lower());
    let mut out = CMatrix::zeros(nu + nl, nu + nl);
    out.view_mut((0, 0), (nu, nu)).copy_from(&block.h_upper);
    out.view_mut((nu, nu), (nl, nl)).copy_from(&block.h_lower);
    out.view_mut((0, nu), (nu, nl)).copy_from(&block.coupling);
    out.view_mut((nu, 0), (nl, nu)).copy_from(&block.coupling.adjoint());
    out
}
