//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the crate's SVD or eigen-solver paths: null spaces come
//! from row reduction, random unitaries from Gram–Schmidt, and dark subspaces
//! are read off the bare Hamiltonian at eigenvalues fixed by construction.
#![allow(dead_code)]

use std::collections::BTreeMap;

use darkmap::linalg::{max_abs, CMatrix, CVector};
use darkmap::system_model::TransitionSpec;
use darkmap::{to_rotating_frame, LevelId, SystemSpec, C64};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rvec(xs: &[f64]) -> CVector {
    CVector::from_iterator(xs.len(), xs.iter().map(|&x| c(x, 0.0)))
}

pub fn random_complex(rng: &mut impl Rng) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Nonzero amplitude: modulus in [0.5, 1.5), arbitrary phase.
pub fn random_amplitude(rng: &mut impl Rng) -> C64 {
    C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Modified Gram–Schmidt; vectors that collapse below 1e-10 are dropped.
pub fn orthonormalize(vs: &[CVector]) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let proj = q.dotc(&w);
                w -= q * proj;
            }
        }
        let n = w.norm();
        if n > 1e-10 * v.norm().max(1e-300) {
            out.push(w / c(n, 0.0));
        }
    }
    out
}

pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    loop {
        let cols: Vec<CVector> = (0..n).map(|_| CVector::from_fn(n, |_, _| random_complex(rng))).collect();
        let q = orthonormalize(&cols);
        if q.len() == n {
            return CMatrix::from_columns(&q);
        }
    }
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| random_complex(rng));
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// Right null space by Gauss–Jordan elimination with partial pivoting.
/// Pivots at or below `tol·‖m‖_max` count as zero. Orthonormal output.
pub fn gauss_null_space(m: &CMatrix, tol: f64) -> Vec<CVector> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let cutoff = tol * max_abs(m);
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let (p, best) = (row..rows)
            .map(|i| (i, a[(i, col)].norm()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= cutoff {
            continue;
        }
        a.swap_rows(row, p);
        let inv = c(1.0, 0.0) / a[(row, col)];
        for j in 0..cols {
            a[(row, j)] *= inv;
        }
        for i in 0..rows {
            if i != row {
                let f = a[(i, col)];
                if f != c(0.0, 0.0) {
                    for j in 0..cols {
                        let v = a[(row, j)];
                        a[(i, j)] -= f * v;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|j| !pivots.contains(j)).collect();
    let basis: Vec<CVector> = free
        .iter()
        .map(|&f| {
            let mut v = CVector::zeros(cols);
            v[f] = c(1.0, 0.0);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[(i, f)];
            }
            v
        })
        .collect();
    orthonormalize(&basis)
}

/// Rotating-mode spec whose Hamiltonian is `h` (descending basis,
/// `h[0][0]` must be 0). Lower-triangle entries become the amplitudes.
pub fn spec_from_matrix(h: &CMatrix, upper: &[u32]) -> SystemSpec {
    let n = h.nrows();
    assert_eq!(h[(0, 0)], c(0.0, 0.0), "|N> must sit at zero energy");
    let idx = |label: usize| n - label;
    let mut transitions = Vec::new();
    for j in 1..=n {
        for jp in j + 1..=n {
            let amp = h[(idx(jp), idx(j))];
            if amp != c(0.0, 0.0) {
                transitions.push(TransitionSpec { from: LevelId(j as u32), to: LevelId(jp as u32), amplitude: amp, drive_frequency: None });
            }
        }
    }
    let detunings: BTreeMap<LevelId, f64> = (1..n).map(|r| (LevelId(r as u32), -h[(idx(r), idx(r))].re)).collect();
    SystemSpec::rotating(detunings, transitions, Some(upper.iter().copied().map(LevelId).collect())).unwrap()
}

/// Random system: uppers are the top `n_upper` labels; the lower block has
/// eigenvalue `levels[k].0` with multiplicity `levels[k].1`.
#[derive(Debug, Clone)]
pub struct RandomSystem {
    pub spec: SystemSpec,
    pub upper: Vec<LevelId>,
    pub n_upper: usize,
    pub n_lower: usize,
    /// Exact Hamiltonian as rebuilt from `spec`.
    pub h: CMatrix,
    pub levels: Vec<(f64, usize)>,
}

pub struct SystemShape<'a> {
    pub n_upper: usize,
    pub multiplicities: &'a [usize],
    /// Coupling block of rank one instead of generic.
    pub rank_one: bool,
    /// Every coupling entry multiplied by this.
    pub coupling_scale: C64,
}

pub fn random_system(rng: &mut impl Rng, shape: &SystemShape) -> RandomSystem {
    let mut pool = [-2.0, -1.25, -0.5, 0.25, 1.0, 1.75, 2.5];
    pool.shuffle(rng);
    let n_upper = shape.n_upper;
    let n_lower: usize = shape.multiplicities.iter().sum();
    let n = n_upper + n_lower;
    let mut eigs = Vec::new();
    let mut levels = Vec::new();
    for (k, &m) in shape.multiplicities.iter().enumerate() {
        eigs.extend(std::iter::repeat_n(pool[k], m));
        levels.push((pool[k], m));
    }
    let u = random_unitary(n_lower, rng);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(n_lower, eigs.iter().map(|&e| c(e, 0.0))));
    let h_lower = &u * d * u.adjoint();
    let h_upper = random_hermitian(n_upper, rng);
    let coupling = if shape.rank_one {
        let a = CVector::from_fn(n_upper, |_, _| random_complex(rng));
        let b = CVector::from_fn(n_lower, |_, _| random_complex(rng));
        a * b.adjoint()
    } else {
        CMatrix::from_fn(n_upper, n_lower, |_, _| random_complex(rng))
    } * shape.coupling_scale;

    let mut h = CMatrix::zeros(n, n);
    h.view_mut((0, 0), (n_upper, n_upper)).copy_from(&h_upper);
    h.view_mut((n_upper, n_upper), (n_lower, n_lower)).copy_from(&h_lower);
    h.view_mut((0, n_upper), (n_upper, n_lower)).copy_from(&coupling);
    h.view_mut((n_upper, 0), (n_lower, n_upper)).copy_from(&coupling.adjoint());
    let shift = h[(0, 0)];
    for i in 0..n {
        h[(i, i)] -= shift;
    }
    h[(0, 0)] = c(0.0, 0.0);
    let levels = levels.into_iter().map(|(e, m)| (e - shift.re, m)).collect();

    let upper_labels: Vec<u32> = (0..n_upper).map(|k| (n - k) as u32).collect();
    let spec = spec_from_matrix(&h, &upper_labels);
    let h = to_rotating_frame(&spec).unwrap().matrix().clone();
    RandomSystem { spec, upper: upper_labels.into_iter().map(LevelId).collect(), n_upper, n_lower, h, levels }
}

impl RandomSystem {
    /// Dark subspace over the bare lowers: for each lower eigenvalue `ω`,
    /// vectors with `(H_l − ω)x = 0` and `c·x = 0`.
    pub fn oracle_darks(&self) -> Vec<CVector> {
        let (nu, nl) = (self.n_upper, self.n_lower);
        let h_lower = self.h.view((nu, nu), (nl, nl)).into_owned();
        let coupling = self.h.view((0, nu), (nu, nl)).into_owned();
        let mut out = Vec::new();
        for &(w, _) in &self.levels {
            let mut stacked = CMatrix::zeros(nl + nu, nl);
            let shifted = &h_lower - CMatrix::identity(nl, nl) * c(w, 0.0);
            stacked.view_mut((0, 0), (nl, nl)).copy_from(&shifted);
            stacked.view_mut((nl, 0), (nu, nl)).copy_from(&coupling);
            out.extend(gauss_null_space(&stacked, 1e-9));
        }
        orthonormalize(&out)
    }

    /// Expected dark count for a generic coupling block.
    pub fn generic_dark_count(&self, coupling_rank: usize) -> usize {
        self.levels.iter().map(|&(_, m)| m.saturating_sub(coupling_rank.min(self.n_upper))).sum()
    }
}

/// Random degeneracy pattern over `n_lower` states.
pub fn random_multiplicities(rng: &mut impl Rng, n_lower: usize) -> Vec<usize> {
    let mut left = n_lower;
    let mut out = Vec::new();
    while left > 0 {
        let m = rng.gen_range(1..=left);
        out.push(m);
        left -= m;
    }
    out
}

pub fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture_path(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Rotating-mode spec over `n` levels; unlisted detunings are 0.
pub fn rotating(n: u32, detunings: &[(u32, f64)], amps: &[(u32, u32, C64)], upper: &[u32]) -> SystemSpec {
    let mut det: BTreeMap<LevelId, f64> = detunings.iter().map(|&(r, d)| (LevelId(r), d)).collect();
    for r in 1..n {
        det.entry(LevelId(r)).or_insert(0.0);
    }
    let ts = amps
        .iter()
        .map(|&(j, k, a)| TransitionSpec { from: LevelId(j), to: LevelId(k), amplitude: a, drive_frequency: None })
        .collect();
    SystemSpec::rotating(det, ts, Some(upper.iter().copied().map(LevelId).collect())).unwrap()
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
