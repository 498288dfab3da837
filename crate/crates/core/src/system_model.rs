//! Lab-frame and rotating-frame system descriptions.
//!
//! A document describes `N` levels labelled `1..=N`, the complex coupling
//! amplitude of every driven pair `(j, j′)` with `j < j′`, and either the bare
//! level energies plus drive frequencies (lab mode) or the detunings of each
//! level relative to `|N⟩` (rotating mode). Units are `ħ = 1` with angular
//! frequencies throughout; nothing is converted.
//!
//! Every matrix produced here is expressed over the descending basis
//! `|N⟩, |N−1⟩, …, |1⟩`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{is_exactly_hermitian, CMatrix};

/// Bare-state label `|j⟩`, `1 ≤ j ≤ N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LevelId(pub u32);

impl fmt::Display for LevelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Lab,
    Rotating,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSpec {
    pub from: LevelId,
    pub to: LevelId,
    pub amplitude: C64,
    /// Lab mode only.
    pub drive_frequency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Frame {
    Lab { energies: BTreeMap<LevelId, f64> },
    Rotating { detunings: BTreeMap<LevelId, f64> },
}

/// A validated system description.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    n_levels: usize,
    frame: Frame,
    transitions: Vec<TransitionSpec>,
    upper: Option<Vec<LevelId>>,
}

/// A detuning loop `(r, r′, N)` that breaks time independence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceViolation {
    pub r: LevelId,
    pub r_prime: LevelId,
    pub n: LevelId,
    /// `Δ_{rN} − Δ_{r′N} − Δ_{rr′}`
    pub residual: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("inconsistent detunings: {} loop violation(s), first ({}, {}, {}) residual {:e}",
        .0.len(), .0[0].r, .0[0].r_prime, .0[0].n, .0[0].residual)]
    InconsistentDetunings(Vec<ResonanceViolation>),
    #[error("inconsistent drive on transition ({from}, {to}): frame mismatch {residual:e}")]
    InconsistentLoop { from: LevelId, to: LevelId, residual: f64 },
    #[error("missing detuning for level {0}")]
    MissingDetuning(LevelId),
}

impl SystemError {
    pub fn kind(&self) -> &'static str {
        match self {
            SystemError::Schema(_) => "SchemaError",
            SystemError::Validation(_) => "ValidationError",
            SystemError::InconsistentDetunings(_) => "InconsistentDetunings",
            SystemError::InconsistentLoop { .. } => "InconsistentDetunings",
            SystemError::MissingDetuning(_) => "MissingDetuning",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    mode: Mode,
    #[serde(default)]
    levels: Option<Vec<RawLevel>>,
    #[serde(default)]
    detunings: Option<BTreeMap<String, f64>>,
    transitions: Vec<RawTransition>,
    #[serde(default)]
    upper: Option<Vec<u32>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevel {
    id: u32,
    energy: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    from: u32,
    to: u32,
    amplitude: [f64; 2],
    #[serde(default)]
    drive_frequency: Option<f64>,
}

#[derive(Serialize)]
struct OutDocument<'a> {
    mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    levels: Option<Vec<OutLevel>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detunings: Option<BTreeMap<String, f64>>,
    transitions: Vec<OutTransition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper: Option<&'a [LevelId]>,
}

#[derive(Serialize)]
struct OutLevel {
    id: u32,
    energy: f64,
}

#[derive(Serialize)]
struct OutTransition {
    from: u32,
    to: u32,
    amplitude: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    drive_frequency: Option<f64>,
}

/// Parses and validates a JSON system document.
pub fn parse_system(document: &str) -> Result<SystemSpec, SystemError> {
    let raw: RawDocument =
        serde_json::from_str(document).map_err(|e| SystemError::Schema(e.to_string()))?;
    let transitions = raw
        .transitions
        .iter()
        .map(|t| TransitionSpec {
            from: LevelId(t.from),
            to: LevelId(t.to),
            amplitude: C64::new(t.amplitude[0], t.amplitude[1]),
            drive_frequency: t.drive_frequency,
        })
        .collect::<Vec<_>>();
    let upper = raw.upper.map(|u| u.into_iter().map(LevelId).collect());
    match raw.mode {
        Mode::Lab => {
            let levels = raw
                .levels
                .ok_or_else(|| SystemError::Schema("lab mode requires `levels`".into()))?;
            if raw.detunings.is_some() {
                return Err(SystemError::Schema("lab mode does not accept `detunings`".into()));
            }
            let mut energies = BTreeMap::new();
            for level in &levels {
                if energies.insert(LevelId(level.id), level.energy).is_some() {
                    return Err(SystemError::Validation(format!("duplicate level id {}", level.id)));
                }
            }
            SystemSpec::lab(energies, transitions, upper)
        }
        Mode::Rotating => {
            if raw.levels.is_some() {
                return Err(SystemError::Schema("rotating mode does not accept `levels`".into()));
            }
            let raw_detunings = raw
                .detunings
                .ok_or_else(|| SystemError::Schema("rotating mode requires `detunings`".into()))?;
            let mut detunings = BTreeMap::new();
            for (key, value) in raw_detunings {
                let id: u32 = key.trim().parse().map_err(|_| {
                    SystemError::Schema(format!("detuning key `{key}` is not a level id"))
                })?;
                if detunings.insert(LevelId(id), value).is_some() {
                    return Err(SystemError::Validation(format!("duplicate detuning for level {id}")));
                }
            }
            SystemSpec::rotating(detunings, transitions, upper)
        }
    }
}

impl SystemSpec {
    /// Lab-frame system; level ids must be exactly `1..=N`.
    pub fn lab(
        energies: BTreeMap<LevelId, f64>,
        transitions: Vec<TransitionSpec>,
        upper: Option<Vec<LevelId>>,
    ) -> Result<Self, SystemError> {
        let n = energies.len();
        if n < 2 {
            return Err(SystemError::Validation(format!("need at least 2 levels, got {n}")));
        }
        for (expected, id) in (1..=n as u32).zip(energies.keys()) {
            if id.0 != expected {
                return Err(SystemError::Validation(format!(
                    "level ids must be 1..={n}; found {id}"
                )));
            }
        }
        if let Some((id, e)) = energies.iter().find(|(_, e)| !e.is_finite()) {
            return Err(SystemError::Validation(format!("energy of level {id} is not finite: {e}")));
        }
        for t in &transitions {
            if t.amplitude.norm() != 0.0 {
                match t.drive_frequency {
                    Some(w) if w.is_finite() => {}
                    Some(w) => {
                        return Err(SystemError::Validation(format!(
                            "drive frequency of ({}, {}) is not finite: {w}",
                            t.from, t.to
                        )))
                    }
                    None => {
                        return Err(SystemError::Validation(format!(
                            "transition ({}, {}) has nonzero amplitude but no drive_frequency",
                            t.from, t.to
                        )))
                    }
                }
            }
        }
        let spec = SystemSpec { n_levels: n, frame: Frame::Lab { energies }, transitions, upper };
        spec.check_transitions()?;
        Ok(spec)
    }

    /// Rotating-frame system. `N` is the largest level id mentioned.
    pub fn rotating(
        detunings: BTreeMap<LevelId, f64>,
        transitions: Vec<TransitionSpec>,
        upper: Option<Vec<LevelId>>,
    ) -> Result<Self, SystemError> {
        let n = detunings
            .keys()
            .map(|id| id.0)
            .chain(transitions.iter().flat_map(|t| [t.from.0, t.to.0]))
            .max()
            .unwrap_or(0) as usize;
        if n < 2 {
            return Err(SystemError::Validation(format!("need at least 2 levels, got {n}")));
        }
        if let Some(id) = detunings.keys().find(|id| id.0 == 0) {
            return Err(SystemError::Validation(format!("unknown level id {id}")));
        }
        if let Some((id, d)) = detunings.iter().find(|(_, d)| !d.is_finite()) {
            return Err(SystemError::Validation(format!("detuning of level {id} is not finite: {d}")));
        }
        if let Some(d) = detunings.get(&LevelId(n as u32)) {
            if *d != 0.0 {
                return Err(SystemError::Validation(format!(
                    "detuning of the reference level {n} is fixed to 0, got {d}"
                )));
            }
        }
        if let Some(t) = transitions.iter().find(|t| t.drive_frequency.is_some()) {
            return Err(SystemError::Validation(format!(
                "transition ({}, {}) carries a drive_frequency in rotating mode",
                t.from, t.to
            )));
        }
        let spec =
            SystemSpec { n_levels: n, frame: Frame::Rotating { detunings }, transitions, upper };
        spec.check_transitions()?;
        Ok(spec)
    }

    fn check_transitions(&self) -> Result<(), SystemError> {
        let n = self.n_levels as u32;
        let mut seen = BTreeSet::new();
        for t in &self.transitions {
            if t.from == t.to {
                return Err(SystemError::Validation(format!("self-transition on level {}", t.from)));
            }
            if t.from > t.to {
                return Err(SystemError::Validation(format!(
                    "transition ({}, {}) must satisfy from < to",
                    t.from, t.to
                )));
            }
            for id in [t.from, t.to] {
                if id.0 == 0 || id.0 > n {
                    return Err(SystemError::Validation(format!("unknown level id {id}")));
                }
            }
            if !t.amplitude.re.is_finite() || !t.amplitude.im.is_finite() {
                return Err(SystemError::Validation(format!(
                    "amplitude of ({}, {}) is not finite",
                    t.from, t.to
                )));
            }
            if !seen.insert((t.from, t.to)) {
                return Err(SystemError::Validation(format!(
                    "duplicate transition ({}, {})",
                    t.from, t.to
                )));
            }
        }
        if let Some(upper) = &self.upper {
            if let Some(id) = upper.iter().find(|id| id.0 == 0 || id.0 > n) {
                return Err(SystemError::Validation(format!("unknown level id {id} in `upper`")));
            }
        }
        Ok(())
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn mode(&self) -> Mode {
        match self.frame {
            Frame::Lab { .. } => Mode::Lab,
            Frame::Rotating { .. } => Mode::Rotating,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn transitions(&self) -> &[TransitionSpec] {
        &self.transitions
    }

    /// Partition hint carried by the document (`"upper": [...]`).
    pub fn upper_hint(&self) -> Option<&[LevelId]> {
        self.upper.as_deref()
    }

    pub fn with_upper_hint(mut self, upper: Option<Vec<LevelId>>) -> Self {
        self.upper = upper;
        self
    }

    pub fn transition(&self, j: LevelId, j_prime: LevelId) -> Option<&TransitionSpec> {
        let (a, b) = if j < j_prime { (j, j_prime) } else { (j_prime, j) };
        self.transitions.iter().find(|t| t.from == a && t.to == b)
    }

    fn active(&self, a: LevelId, b: LevelId) -> Option<&TransitionSpec> {
        self.transition(a, b).filter(|t| t.amplitude.norm() != 0.0)
    }

    /// `Δ_{jj′} = E_{j′} − E_j − ω_{jj′}` for a driven lab-mode transition.
    pub fn transition_detuning(&self, j: LevelId, j_prime: LevelId) -> Option<f64> {
        let Frame::Lab { energies } = &self.frame else { return None };
        let t = self.transition(j, j_prime)?;
        let w = t.drive_frequency?;
        Some(energies[&t.to] - energies[&t.from] - w)
    }

    /// Serialises back to the JSON document format.
    pub fn to_json(&self) -> String {
        let transitions = self
            .transitions
            .iter()
            .map(|t| OutTransition {
                from: t.from.0,
                to: t.to.0,
                amplitude: [t.amplitude.re, t.amplitude.im],
                drive_frequency: t.drive_frequency,
            })
            .collect();
        let doc = match &self.frame {
            Frame::Lab { energies } => OutDocument {
                mode: Mode::Lab,
                levels: Some(energies.iter().map(|(id, e)| OutLevel { id: id.0, energy: *e }).collect()),
                detunings: None,
                transitions,
                upper: self.upper.as_deref(),
            },
            Frame::Rotating { detunings } => OutDocument {
                mode: Mode::Rotating,
                levels: None,
                detunings: Some(detunings.iter().map(|(id, d)| (id.0.to_string(), *d)).collect()),
                transitions,
                upper: self.upper.as_deref(),
            },
        };
        serde_json::to_string_pretty(&doc).expect("document serialisation")
    }
}

/// Default loop-consistency tolerance, `1e-9 · max(1, max |E_j|)`.
pub fn default_consistency_tol(spec: &SystemSpec) -> f64 {
    match spec.frame() {
        Frame::Lab { energies } => {
            1e-9 * energies.values().fold(1.0f64, |acc, e| acc.max(e.abs()))
        }
        Frame::Rotating { .. } => 1e-9,
    }
}

/// Checks `Δ_{rN} − Δ_{r′N} = Δ_{rr′}` on every closed triangle through `|N⟩`.
///
/// Only triples whose three transitions all carry nonzero amplitude constrain
/// the drive frequencies. Rotating-mode specs have nothing to check.
pub fn validate_loop_resonance(spec: &SystemSpec, tol_consistency: f64) -> Vec<ResonanceViolation> {
    if spec.mode() != Mode::Lab {
        return Vec::new();
    }
    let n = LevelId(spec.n_levels() as u32);
    let mut out = Vec::new();
    for r in 1..n.0 {
        for r_prime in (r + 1)..n.0 {
            let (r, r_prime) = (LevelId(r), LevelId(r_prime));
            if spec.active(r, r_prime).is_none()
                || spec.active(r, n).is_none()
                || spec.active(r_prime, n).is_none()
            {
                continue;
            }
            let (Some(d_rn), Some(d_pn), Some(d_rp)) = (
                spec.transition_detuning(r, n),
                spec.transition_detuning(r_prime, n),
                spec.transition_detuning(r, r_prime),
            ) else {
                continue;
            };
            let residual = d_rn - d_pn - d_rp;
            if residual.abs() > tol_consistency {
                out.push(ResonanceViolation { r, r_prime, n, residual });
            }
        }
    }
    out
}

/// Time-independent Hamiltonian over the descending bare basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatingHamiltonian {
    matrix: CMatrix,
    basis_order: Vec<LevelId>,
}

impl RotatingHamiltonian {
    /// Wraps an exactly Hermitian matrix whose row `k` is level `N − k`.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self, SystemError> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(SystemError::Validation("Hamiltonian must be square with N ≥ 2".into()));
        }
        if !is_exactly_hermitian(&matrix) {
            return Err(SystemError::Validation("Hamiltonian is not Hermitian".into()));
        }
        let n = matrix.nrows() as u32;
        Ok(RotatingHamiltonian { basis_order: (1..=n).rev().map(LevelId).collect(), matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn basis_order(&self) -> &[LevelId] {
        &self.basis_order
    }

    /// Row/column index of a level in the descending basis.
    pub fn index_of(&self, id: LevelId) -> Option<usize> {
        let n = self.dim() as u32;
        (id.0 >= 1 && id.0 <= n).then(|| (n - id.0) as usize)
    }

    /// Reads `Δ_{rN} = −H_{rr}` back off the diagonal for `r < N`.
    pub fn detunings(&self) -> BTreeMap<LevelId, f64> {
        self.basis_order
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, id)| (*id, -self.matrix[(k, k)].re))
            .collect()
    }
}

/// Reduces a system to its rotating-frame Hamiltonian.
///
/// In lab mode the frame offsets `x_j` are fixed by `x_N = E_N` and
/// `x_{j′} − x_j = ω_{jj′}` along the driven transitions; levels not connected
/// to `|N⟩` keep their bare energy as offset within their component.
pub fn to_rotating_frame(spec: &SystemSpec) -> Result<RotatingHamiltonian, SystemError> {
    let n = spec.n_levels();
    let detunings = match spec.frame() {
        Frame::Rotating { detunings } => {
            let mut out = BTreeMap::new();
            for r in 1..n as u32 {
                let d = detunings.get(&LevelId(r)).ok_or(SystemError::MissingDetuning(LevelId(r)))?;
                out.insert(LevelId(r), *d);
            }
            out
        }
        Frame::Lab { energies } => {
            let violations = validate_loop_resonance(spec, default_consistency_tol(spec));
            if !violations.is_empty() {
                return Err(SystemError::InconsistentDetunings(violations));
            }
            lab_detunings(spec, energies)?
        }
    };

    let mut matrix = CMatrix::zeros(n, n);
    let idx = |id: LevelId| n - id.0 as usize;
    for (id, d) in &detunings {
        matrix[(idx(*id), idx(*id))] = C64::new(-d, 0.0);
    }
    for t in spec.transitions() {
        matrix[(idx(t.to), idx(t.from))] = t.amplitude;
        matrix[(idx(t.from), idx(t.to))] = t.amplitude.conj();
    }
    let ham = RotatingHamiltonian { matrix, basis_order: (1..=n as u32).rev().map(LevelId).collect() };
    assert!(is_exactly_hermitian(&ham.matrix), "rotating Hamiltonian assembled non-Hermitian");
    Ok(ham)
}

fn lab_detunings(
    spec: &SystemSpec,
    energies: &BTreeMap<LevelId, f64>,
) -> Result<BTreeMap<LevelId, f64>, SystemError> {
    let n = spec.n_levels();
    let top = LevelId(n as u32);
    let driven: Vec<&TransitionSpec> =
        spec.transitions().iter().filter(|t| t.amplitude.norm() != 0.0).collect();
    let mut adjacency: BTreeMap<LevelId, Vec<(LevelId, f64)>> = BTreeMap::new();
    for t in &driven {
        let w = t.drive_frequency.expect("validated drive frequency");
        adjacency.entry(t.from).or_default().push((t.to, w));
        adjacency.entry(t.to).or_default().push((t.from, -w));
    }

    let mut offset: BTreeMap<LevelId, f64> = BTreeMap::new();
    let roots = std::iter::once(top).chain((1..n as u32).rev().map(LevelId));
    for root in roots {
        if offset.contains_key(&root) {
            continue;
        }
        offset.insert(root, energies[&root]);
        let mut queue = VecDeque::from([root]);
        while let Some(k) = queue.pop_front() {
            let xk = offset[&k];
            for (m, w) in adjacency.get(&k).map(Vec::as_slice).unwrap_or(&[]) {
                if !offset.contains_key(m) {
                    offset.insert(*m, xk + w);
                    queue.push_back(*m);
                }
            }
        }
    }

    let tol = default_consistency_tol(spec);
    for t in &driven {
        let w = t.drive_frequency.expect("validated drive frequency");
        let residual = offset[&t.to] - offset[&t.from] - w;
        if residual.abs() > tol {
            return Err(SystemError::InconsistentLoop { from: t.from, to: t.to, residual });
        }
    }

    let e_top = energies[&top];
    Ok((1..n as u32)
        .map(LevelId)
        .map(|r| {
            let direct = spec
                .active(r, top)
                .and_then(|t| t.drive_frequency)
                .map(|w| e_top - energies[&r] - w);
            (r, direct.unwrap_or(offset[&r] - energies[&r]))
        })
        .collect())
}
