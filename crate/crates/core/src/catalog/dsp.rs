//! Dark-state polaritons of `N` Λ atoms sharing a quantised probe field,
//! restricted to the `n`-excitation subspace.
//!
//! Lower states are `|c^i, n−i⟩` (`i` atoms in the storage state, `n−i`
//! photons), uppers `|a c^{m−1}, n−m⟩` for `m = 1..n`. Row `m` of the coupling
//! matrix links upper `m` to lowers `m−1` (probe, `g·√(N−m+1)·√(n−m+1)`) and
//! `m` (control, `√m·Ω`). For `n ≪ N` the probe element is `g·√N·√(n−m+1)`.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::{bad, param_usize, rotating_spec, unit, CatalogEntry, CatalogError, Couplings, ExpectedDark};
use crate::linalg::{CMatrix, CVector};
use crate::system_model::LevelId;

/// Largest excitation number accepted.
pub const MAX_EXCITATIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DspParams {
    pub g: f64,
    pub n_atoms: u64,
    /// Control Rabi frequency at the snapshot.
    pub omega: f64,
    pub n: usize,
    /// Use `g·√N` for every probe element.
    pub large_n: bool,
}

impl DspParams {
    /// `θ = atan2(g·√N, Ω)`.
    pub fn theta(&self) -> f64 {
        (self.g * (self.n_atoms as f64).sqrt()).atan2(self.omega)
    }

    /// `Ω̃ = √(g²N + Ω²)`.
    pub fn omega_eff(&self) -> f64 {
        (self.g * self.g * self.n_atoms as f64 + self.omega * self.omega).sqrt()
    }

    fn check(&self) -> Result<(), CatalogError> {
        if self.n == 0 || self.n > MAX_EXCITATIONS {
            return Err(bad("dsp", format!("excitation number must be in 1..={MAX_EXCITATIONS}, got {}", self.n)));
        }
        if self.n as u64 > self.n_atoms {
            return Err(CatalogError::ExcitationExceedsAtoms { n: self.n, atoms: self.n_atoms });
        }
        if !(self.g.is_finite() && self.omega.is_finite()) {
            return Err(bad("dsp", "g and Ω must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DspLabels {
    /// `|a c^{m−1}, n−m⟩`, `m = 1..n`.
    pub upper: Vec<String>,
    /// `|c^i, n−i⟩`, `i = 0..n`.
    pub lower: Vec<String>,
}

/// `n × (n+1)` coupling matrix over the collective basis.
pub fn dsp_coupling_matrix(p: &DspParams) -> Result<(CMatrix, DspLabels), CatalogError> {
    p.check()?;
    let n = p.n;
    let big_n = p.n_atoms as f64;
    let mut c = CMatrix::zeros(n, n + 1);
    for m in 1..=n {
        let photons = ((n - m + 1) as f64).sqrt();
        let atoms = if p.large_n { big_n.sqrt() } else { (big_n - m as f64 + 1.0).sqrt() };
        c[(m - 1, m - 1)] = C64::from(p.g * atoms * photons);
        c[(m - 1, m)] = C64::from((m as f64).sqrt() * p.omega);
    }
    let labels = DspLabels {
        upper: (1..=n).map(|m| format!("|a c^{}, {}>", m - 1, n - m)).collect(),
        lower: (0..=n).map(|i| format!("|c^{i}, {}>", n - i)).collect(),
    };
    Ok((c, labels))
}

/// `x_i = √C(n,i)·(−cosθ)^{n−i}·sin^iθ`, `i = 0..n`.
pub fn dsp_dark_polariton(n: usize, theta: f64) -> CVector {
    let (s, c) = theta.sin_cos();
    let mut binom = 1.0f64;
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i > 0 {
            binom = binom * (n - i + 1) as f64 / i as f64;
        }
        out.push(C64::from(binom.sqrt() * (-c).powi((n - i) as i32) * s.powi(i as i32)));
    }
    CVector::from_vec(out)
}

/// Catalog entry on `2n+1` levels: row `m` is upper `|2n+2−m⟩`, column `i`
/// is lower `|n+1−i⟩`, all detunings zero.
pub fn gen_dsp(p: &DspParams) -> Result<CatalogEntry, CatalogError> {
    let (matrix, _) = dsp_coupling_matrix(p)?;
    let n = p.n;
    let levels = 2 * n + 1;
    let mut couplings = Couplings::new();
    for m in 1..=n {
        for i in [m - 1, m] {
            couplings.set((n + 1 - i) as u32, (2 * n + 2 - m) as u32, matrix[(m - 1, i)]);
        }
    }
    let upper: Vec<LevelId> = (1..=n).map(|m| LevelId((2 * n + 2 - m) as u32)).collect();
    let expected = if p.g == 0.0 && p.omega == 0.0 {
        ExpectedDark { count: n + 1, vectors: Some((0..=n).map(|i| unit(n + 1, i)).collect()) }
    } else if p.large_n {
        ExpectedDark { count: 1, vectors: Some(vec![dsp_dark_polariton(n, p.theta())]) }
    } else {
        ExpectedDark { count: 1, vectors: None }
    };
    Ok(CatalogEntry {
        name: "dsp".to_string(),
        params: BTreeMap::new(),
        spec: rotating_spec(levels, &couplings, &vec![0.0; levels - 1], &upper)?,
        upper,
        expected: Some(expected),
    })
}

pub(super) fn from_params(p: &BTreeMap<String, f64>) -> Result<CatalogEntry, CatalogError> {
    let atoms = p["atoms"];
    if atoms < 1.0 || atoms.fract() != 0.0 || atoms > u64::MAX as f64 {
        return Err(CatalogError::BadParameter(format!("`atoms` must be a positive integer, got {atoms}")));
    }
    gen_dsp(&DspParams {
        g: p["g"],
        n_atoms: atoms as u64,
        omega: p["omega"],
        n: param_usize(p, "n")?,
        large_n: p["large_n"] != 0.0,
    })
}
