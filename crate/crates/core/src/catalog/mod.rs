//! Generators for the standard coupling configurations, each carrying the
//! dark states predicted in closed form.
//!
//! Entries emit rotating-mode specs. Expected vectors are over the bare lower
//! states in descending label order and are compared as subspaces.

mod dsp;
mod few_level;
mod nlevel;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::darkstate::{subspace_distance, DarkStateReport};
use crate::linalg::{CVector, ZERO};
use crate::partition::{Partition, PartitionError};
use crate::system_model::{LevelId, SystemError, SystemSpec, TransitionSpec};

pub use dsp::{dsp_coupling_matrix, dsp_dark_polariton, gen_dsp, DspLabels, DspParams, MAX_EXCITATIONS};
pub use few_level::{gen_five_level, gen_four_level, gen_three_level, ThreeLevelKind};
pub use nlevel::{analytic_lambda_chain_dark, gen_nlevel, NLevelConfig};

/// Subspace agreement required between an entry's expectation and the analysis.
pub const EXPECTATION_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("bad parameters for {kind}: {reason}")]
    BadKindParameters { kind: String, reason: String },
    #[error("coupling a_{index} of the chain is zero")]
    ZeroDenominatorCoupling { index: usize },
    #[error("{n} excitations exceed {atoms} atoms")]
    ExcitationExceedsAtoms { n: usize, atoms: u64 },
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    System(#[from] SystemError),
}

impl CatalogError {
    pub fn kind(&self) -> &'static str {
        match self {
            CatalogError::BadKindParameters { .. } => "BadKindParameters",
            CatalogError::ZeroDenominatorCoupling { .. } => "ZeroDenominatorCoupling",
            CatalogError::ExcitationExceedsAtoms { .. } => "ExcitationExceedsAtoms",
            CatalogError::UnknownEntry(_) => "UnknownEntry",
            CatalogError::BadParameter(_) => "BadParameter",
            CatalogError::System(e) => e.kind(),
        }
    }
}

pub(crate) fn bad(kind: &str, reason: impl Into<String>) -> CatalogError {
    CatalogError::BadKindParameters { kind: kind.to_string(), reason: reason.into() }
}

/// Transition amplitudes `Ω_{jj′}` keyed by `(j, j′)`, `j < j′`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Couplings(BTreeMap<(u32, u32), C64>);

impl Couplings {
    pub fn new() -> Self {
        Couplings::default()
    }

    pub fn with(mut self, j: u32, k: u32, amp: impl Into<C64>) -> Self {
        self.set(j, k, amp.into());
        self
    }

    pub fn set(&mut self, j: u32, k: u32, amp: C64) {
        let key = if j < k { (j, k) } else { (k, j) };
        self.0.insert(key, amp);
    }

    /// `Ω_{jj′}` regardless of argument order; absent pairs are zero.
    pub fn get(&self, j: u32, k: u32) -> C64 {
        let key = if j < k { (j, k) } else { (k, j) };
        self.0.get(&key).copied().unwrap_or(ZERO)
    }

    /// Entry `c[u][l]` of the upper/lower coupling block: `H[u][l]` for the
    /// descending basis, i.e. `Ω_{lu}` when `l < u`, else `Ω_{ul}*`.
    pub fn block_entry(&self, upper: u32, lower: u32) -> C64 {
        if lower < upper {
            self.get(lower, upper)
        } else {
            self.get(upper, lower).conj()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &C64)> {
        self.0.iter()
    }
}

/// Dark states predicted for an entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedDark {
    pub count: usize,
    /// Over bare lower states (descending labels); `None` when only the count
    /// is predicted.
    pub vectors: Option<Vec<CVector>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub spec: SystemSpec,
    pub upper: Vec<LevelId>,
    pub expected: Option<ExpectedDark>,
}

impl CatalogEntry {
    pub fn partition(&self) -> Result<Partition, PartitionError> {
        Partition::new(self.spec.n_levels(), &self.upper)
    }

    /// Compares a report against the expectation; returns the subspace
    /// distance when vectors are predicted.
    pub fn check(&self, report: &DarkStateReport) -> Result<Option<f64>, String> {
        let Some(expected) = &self.expected else { return Ok(None) };
        if report.total_dark != expected.count {
            return Err(format!(
                "{}: expected {} dark state(s), found {}",
                self.name, expected.count, report.total_dark
            ));
        }
        let Some(vectors) = &expected.vectors else { return Ok(None) };
        let found = report.dark_states_bare();
        let d = subspace_distance(&found, vectors).map_err(|e| e.to_string())?;
        if d > EXPECTATION_TOL {
            return Err(format!("{}: dark subspace differs from expectation by {d:e}", self.name));
        }
        Ok(Some(d))
    }
}

pub(crate) fn rotating_spec(
    n: usize,
    couplings: &Couplings,
    detunings: &[f64],
    upper: &[LevelId],
) -> Result<SystemSpec, CatalogError> {
    if detunings.len() != n - 1 {
        return Err(CatalogError::BadParameter(format!(
            "expected {} detunings, got {}",
            n - 1,
            detunings.len()
        )));
    }
    let transitions = couplings
        .iter()
        .map(|(&(j, k), &amp)| TransitionSpec {
            from: LevelId(j),
            to: LevelId(k),
            amplitude: amp,
            drive_frequency: None,
        })
        .collect();
    let det = detunings.iter().enumerate().map(|(r, d)| (LevelId(r as u32 + 1), *d)).collect();
    Ok(SystemSpec::rotating(det, transitions, Some(upper.to_vec()))?)
}

/// Relative equality used for the symmetry and degeneracy preconditions.
pub(crate) fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * 1f64.max(a.abs()).max(b.abs())
}

pub(crate) fn same_c(a: C64, b: C64) -> bool {
    (a - b).norm() <= 1e-12 * 1f64.max(a.norm()).max(b.norm())
}

pub(crate) fn is_zero(a: C64, scale: f64) -> bool {
    a.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE)
}

pub(crate) fn real_vec(xs: &[f64]) -> CVector {
    CVector::from_iterator(xs.len(), xs.iter().map(|&x| C64::new(x, 0.0)))
}

pub(crate) fn unit(dim: usize, k: usize) -> CVector {
    let mut v = CVector::from_element(dim, ZERO);
    v[k] = C64::new(1.0, 0.0);
    v
}

/// Dark states of one degenerate group whose coupling to a single (dressed)
/// upper state is `cs[k]` for basis vector `basis[k]`.
///
/// Leading zero couplings give dark basis vectors directly; from the first
/// nonzero one onwards each new basis vector either joins the running bright
/// state or splits off a dark state:
/// `D = (C_j·B − 𝒩·L_j)/𝒩′`, `B′ = (𝒩·B + C_j*·L_j)/𝒩′`, `𝒩′ = sqrt(𝒩² + |C_j|²)`.
pub(crate) fn chain_darks(basis: &[CVector], cs: &[C64]) -> Vec<CVector> {
    let scale = cs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let Some(first) = cs.iter().position(|c| !is_zero(*c, scale)) else {
        return basis.to_vec();
    };
    let mut darks: Vec<CVector> = basis[..first].to_vec();
    let c0 = cs[first];
    let mut norm = c0.norm();
    let mut bright = &basis[first] * (c0.conj() / norm);
    for (l, c) in basis.iter().zip(cs).skip(first + 1) {
        let next = (norm * norm + c.norm_sqr()).sqrt();
        darks.push((&bright * *c - l * C64::from(norm)).unscale(next));
        bright = (&bright * C64::from(norm) + l * c.conj()).unscale(next);
        norm = next;
    }
    darks
}

/// Predicted darks for a lower subspace with known dressed basis and
/// energies, coupled through the bare block `rows` (one row per upper state,
/// columns over the bare lowers).
///
/// Groups of equal energy are handled when their coupling columns have rank
/// 0, rank 1 (column recursion on the dominant row), or, for three columns
/// and two rows, rank 2 (cross product). Anything else returns `None`.
pub(crate) fn dressed_expectation(
    basis: &[CVector],
    energies: &[f64],
    rows: &[Vec<C64>],
) -> Option<ExpectedDark> {
    let coupling = |row: &[C64], l: &CVector| -> C64 { row.iter().zip(l.iter()).map(|(a, b)| a * b).sum() };
    let cols: Vec<Vec<C64>> = basis.iter().map(|l| rows.iter().map(|r| coupling(r, l)).collect()).collect();
    let scale = cols.iter().flatten().fold(0.0f64, |m, c| m.max(c.norm()));

    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in order {
        match groups.last_mut() {
            Some(g) if same(energies[g[0]], energies[k]) => g.push(k),
            _ => groups.push(vec![k]),
        }
    }

    let mut darks = Vec::new();
    for g in groups {
        let gb: Vec<CVector> = g.iter().map(|&k| basis[k].clone()).collect();
        let gc: Vec<&Vec<C64>> = g.iter().map(|&k| &cols[k]).collect();
        let n_rows = rows.len();
        let rank1 = (0..gc.len()).all(|a| {
            (0..gc.len()).all(|b| {
                (0..n_rows).all(|i| {
                    (0..n_rows).all(|j| is_zero(gc[a][i] * gc[b][j] - gc[a][j] * gc[b][i], scale * scale))
                })
            })
        });
        if rank1 {
            let dominant = (0..n_rows)
                .max_by(|&i, &j| {
                    let ni: f64 = gc.iter().map(|c| c[i].norm_sqr()).sum();
                    let nj: f64 = gc.iter().map(|c| c[j].norm_sqr()).sum();
                    ni.total_cmp(&nj)
                })
                .unwrap_or(0);
            let cs: Vec<C64> = gc.iter().map(|c| c.get(dominant).copied().unwrap_or(ZERO)).collect();
            darks.extend(chain_darks(&gb, &cs));
        } else if gc.len() == 2 {
            // two independent columns: no dark state in this group
        } else if gc.len() == 3 && n_rows == 2 {
            let (r1, r2): (Vec<C64>, Vec<C64>) = gc.iter().map(|c| (c[0], c[1])).unzip();
            let x = [
                r1[1] * r2[2] - r1[2] * r2[1],
                r1[2] * r2[0] - r1[0] * r2[2],
                r1[0] * r2[1] - r1[1] * r2[0],
            ];
            let v: CVector = gb.iter().zip(x).map(|(l, c)| l * c).sum();
            darks.push(v.normalize());
        } else {
            return None;
        }
    }
    Some(ExpectedDark { count: darks.len(), vectors: Some(darks) })
}

/// Nonzero random amplitudes: modulus in `[0.5, 1.5)`, uniform phase.
pub fn random_amplitudes(len: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// Named entry with default parameters, for the command line.
#[derive(Debug, Clone, Copy)]
pub struct EntryInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub defaults: &'static [(&'static str, f64)],
}

impl fmt::Display for EntryInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<16} {}", self.name, self.description)?;
        if !self.defaults.is_empty() {
            let ps: Vec<String> = self.defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, " [{}]", ps.join(" "))?;
        }
        Ok(())
    }
}

pub const ENTRIES: &[EntryInfo] = &[
    EntryInfo {
        name: "delta",
        description: "three-level Δ loop, upper |3⟩",
        defaults: &[("o13", 1.0), ("o23", 1.0), ("o12", 0.5), ("theta", 0.0), ("d1", 0.3), ("d2", 0.3)],
    },
    EntryInfo {
        name: "lambda",
        description: "three-level Λ, upper |3⟩",
        defaults: &[("o13", 1.0), ("o23", 2.0), ("d1", 0.3), ("d2", 0.3)],
    },
    EntryInfo {
        name: "xi",
        description: "three-level ladder, upper |2⟩",
        defaults: &[("o12", 1.0), ("o23", 0.7), ("d1", 0.0), ("d2", 0.4)],
    },
    EntryInfo {
        name: "vee",
        description: "three-level V, upper |1⟩",
        defaults: &[("o12", 0.8), ("o13", 1.0), ("d1", 0.5), ("d2", 0.0)],
    },
    EntryInfo {
        name: "four1",
        description: "four-level, one upper, symmetric lower couplings Ω",
        defaults: &[("o14", 1.0), ("o24", 2.0), ("o34", 1.0), ("omega", 0.5), ("delta", 0.2)],
    },
    EntryInfo {
        name: "four2",
        description: "four-level, two uppers, two lowers",
        defaults: &[("o13", 1.0), ("o14", 1.0), ("o23", 2.0), ("o24", 2.0), ("o12", 0.0), ("delta", 0.2), ("d3", 0.0)],
    },
    EntryInfo {
        name: "five1",
        description: "five-level, one upper, lower couplings Ω1/Ω2",
        defaults: &[("o15", 1.0), ("o25", 0.4), ("o35", -0.7), ("o45", 1.3), ("omega1", 0.3), ("omega2", 0.8), ("delta", 0.1)],
    },
    EntryInfo {
        name: "five2",
        description: "five-level, two uppers, three lowers",
        defaults: &[("o15", 1.0), ("o25", 0.0), ("o35", 1.0), ("o14", 1.0), ("o24", 1.0), ("o34", 0.0), ("omega", 0.0), ("delta", 0.0), ("d4", 0.0)],
    },
    EntryInfo {
        name: "five3",
        description: "five-level, three uppers, two lowers",
        defaults: &[("o13", 0.5), ("o14", 0.3), ("o15", 0.7), ("o23", 1.0), ("o24", 0.6), ("o25", 1.4), ("o12", 0.0), ("theta", 0.0), ("omega", 0.4), ("delta", 0.0)],
    },
    EntryInfo {
        name: "multipod",
        description: "one upper |N⟩ coupled to N−1 lowers; `degenerate` lowers share the detuning",
        defaults: &[("n", 6.0), ("degenerate", 5.0), ("delta", 0.0), ("amp", 1.0)],
    },
    EntryInfo {
        name: "multi_lambda",
        description: "N−2 uppers sharing two lowers; second column = gamma × first",
        defaults: &[("n", 5.0), ("gamma", 2.0), ("delta", 0.0), ("amp", 1.0)],
    },
    EntryInfo {
        name: "lambda_chain",
        description: "zigzag Λ-chain, N odd",
        defaults: &[("n", 7.0), ("delta", 0.0), ("amp", 1.0)],
    },
    EntryInfo {
        name: "n_chain",
        description: "shared-edge N-chain, N even",
        defaults: &[("n", 8.0), ("delta", 0.0), ("amp", 1.0)],
    },
    EntryInfo {
        name: "v_chain",
        description: "zigzag V-chain, N odd",
        defaults: &[("n", 7.0), ("delta", 0.0), ("amp", 1.0)],
    },
    EntryInfo {
        name: "dsp",
        description: "dark-state polariton ladder with n excitations",
        defaults: &[("g", 0.1), ("atoms", 10000.0), ("omega", 3.0), ("n", 3.0), ("large_n", 1.0)],
    },
];

/// Builds a named entry, overriding defaults with `overrides`. The key `seed`
/// draws random couplings for the chain-type entries.
pub fn build(name: &str, overrides: &BTreeMap<String, f64>) -> Result<CatalogEntry, CatalogError> {
    let info = ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CatalogError::UnknownEntry(name.to_string()))?;
    let mut p: BTreeMap<String, f64> = info.defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in overrides {
        let known = p.contains_key(k)
            || k == "seed"
            || (k.starts_with('o') && k.ends_with("_im"))
            || info.name == "multipod" && k.starts_with('d');
        if !known {
            return Err(CatalogError::BadParameter(format!("`{k}` is not a parameter of {name}")));
        }
        p.insert(k.clone(), *v);
    }
    let mut entry = match name {
        "delta" | "lambda" | "xi" | "vee" => few_level::from_params(name, &p)?,
        "four1" | "four2" | "five1" | "five2" | "five3" => few_level::from_params(name, &p)?,
        "dsp" => dsp::from_params(&p)?,
        _ => nlevel::from_params(name, &p)?,
    };
    entry.params = p;
    Ok(entry)
}

pub(crate) fn param_usize(p: &BTreeMap<String, f64>, key: &str) -> Result<usize, CatalogError> {
    let v = p[key];
    if v < 0.0 || v.fract() != 0.0 {
        return Err(CatalogError::BadParameter(format!("`{key}` must be a non-negative integer, got {v}")));
    }
    Ok(v as usize)
}

/// Complex amplitude from `key` (real part) and `key_im`.
pub(crate) fn param_amp(p: &BTreeMap<String, f64>, key: &str) -> C64 {
    C64::new(p.get(key).copied().unwrap_or(0.0), p.get(&format!("{key}_im")).copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_darks_matches_two_column_form() {
        let basis = vec![unit(2, 0), unit(2, 1)];
        let (c1, c2) = (C64::new(1.0, 0.5), C64::new(-0.3, 2.0));
        let d = chain_darks(&basis, &[c1, c2]);
        assert_eq!(d.len(), 1);
        // C2|L1> − C1|L2>
        let expect = (&basis[0] * c2 - &basis[1] * c1).normalize();
        assert!(subspace_distance(&d, &[expect]).unwrap() < 1e-14);
    }

    #[test]
    fn chain_darks_leading_zero() {
        let basis = vec![unit(3, 0), unit(3, 1), unit(3, 2)];
        let d = chain_darks(&basis, &[ZERO, C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert_eq!(d.len(), 2);
        let expect = vec![unit(3, 0), real_vec(&[0.0, 1.0, -1.0]).normalize()];
        assert!(subspace_distance(&d, &expect).unwrap() < 1e-14);
    }

    #[test]
    fn couplings_block_entry() {
        let c = Couplings::new().with(1, 3, C64::new(0.0, 1.0));
        assert_eq!(c.block_entry(3, 1), C64::new(0.0, 1.0));
        assert_eq!(c.block_entry(1, 3), C64::new(0.0, -1.0));
    }

    #[test]
    fn every_named_entry_builds() {
        for info in ENTRIES {
            build(info.name, &BTreeMap::new()).unwrap_or_else(|e| panic!("{}: {e}", info.name));
        }
    }

    #[test]
    fn unknown_entry_and_parameter() {
        assert!(matches!(build("nope", &BTreeMap::new()), Err(CatalogError::UnknownEntry(_))));
        let p = BTreeMap::from([("zzz".to_string(), 1.0)]);
        assert!(matches!(build("lambda", &p), Err(CatalogError::BadParameter(_))));
    }

    #[test]
    fn random_amplitudes_are_reproducible_and_nonzero() {
        let a = random_amplitudes(10, 7);
        assert_eq!(a, random_amplitudes(10, 7));
        assert!(a.iter().all(|z| z.norm() >= 0.5));
    }
}
