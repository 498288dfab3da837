//! N-level topologies: multipod, multi-Λ and the three zigzag chains.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::{
    bad, dressed_expectation, param_usize, random_amplitudes, rotating_spec, same, unit, CatalogEntry,
    CatalogError, Couplings, ExpectedDark,
};
use crate::linalg::CVector;
use crate::system_model::LevelId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NLevelConfig {
    /// One upper `|N⟩` coupled to every lower state.
    Multipod,
    /// Uppers `|N⟩..|3⟩` each coupled to both `|2⟩` and `|1⟩`.
    MultiLambda,
    /// `N` odd: `(N−1)/2` uppers, `(N+1)/2` lowers, open zigzag.
    LambdaChain,
    /// `N` even: `N/2` uppers and lowers, zigzag closed on a shared edge.
    NChain,
    /// `N` odd: `(N+1)/2` uppers, `(N−1)/2` lowers.
    VChain,
}

impl NLevelConfig {
    pub fn name(self) -> &'static str {
        match self {
            NLevelConfig::Multipod => "multipod",
            NLevelConfig::MultiLambda => "multi_lambda",
            NLevelConfig::LambdaChain => "lambda_chain",
            NLevelConfig::NChain => "n_chain",
            NLevelConfig::VChain => "v_chain",
        }
    }

    /// Number of amplitudes `gen_nlevel` expects for `n` levels.
    pub fn amplitude_count(self, n: usize) -> usize {
        match self {
            NLevelConfig::Multipod => n - 1,
            NLevelConfig::MultiLambda => 2 * (n - 2),
            NLevelConfig::LambdaChain | NLevelConfig::NChain | NLevelConfig::VChain => n - 1,
        }
    }
}

/// `(lower, upper)` label pairs of the zigzag, in zigzag order.
fn zigzag_pairs(config: NLevelConfig, n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    match config {
        NLevelConfig::LambdaChain => {
            let m = (n - 1) / 2;
            for i in 0..m {
                out.push((n.div_ceil(2) - i, n - i));
                out.push(((n - 1) / 2 - i, n - i));
            }
        }
        NLevelConfig::NChain | NLevelConfig::VChain => {
            let (lowers, top) = if config == NLevelConfig::NChain { (n / 2, n / 2) } else { ((n - 1) / 2, (n - 1) / 2) };
            for k in 0..lowers {
                out.push((top - k, n - k));
                if out.len() < n as usize - 1 {
                    out.push((top - k, n - k - 1));
                }
            }
        }
        _ => unreachable!("not a chain"),
    }
    out
}

/// Normalised dark state of the Λ-chain over its lowers
/// `|(N+1)/2⟩, …, |1⟩`, from the zigzag `a_0, b_0, a_1, b_1, …` where `a_i`
/// couples upper `|N−i⟩` to `|(N+1)/2−i⟩` and `b_i` to `|(N−1)/2−i⟩`.
///
/// `x_i = (−1)^{M−i} Π_{j=i}^{M−1} b_j/a_j`, `x_M = 1`, `M = (N−1)/2`.
pub fn analytic_lambda_chain_dark(n: usize, zigzag: &[C64]) -> Result<CVector, CatalogError> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(bad("lambda_chain", format!("N must be odd and ≥ 3, got {n}")));
    }
    if zigzag.len() != n - 1 {
        return Err(bad("lambda_chain", format!("expected {} zigzag amplitudes, got {}", n - 1, zigzag.len())));
    }
    let m = (n - 1) / 2;
    if let Some(index) = (0..m).find(|&i| zigzag[2 * i] == C64::new(0.0, 0.0)) {
        return Err(CatalogError::ZeroDenominatorCoupling { index });
    }
    let mut x = vec![C64::new(1.0, 0.0); m + 1];
    for i in (0..m).rev() {
        x[i] = -x[i + 1] * zigzag[2 * i + 1] / zigzag[2 * i];
    }
    Ok(CVector::from_vec(x).normalize())
}

/// Builds an N-level entry; `detunings[r−1] = Δ_{rN}`.
///
/// Amplitudes: multipod `Ω_{jN}` for `j = 1..N−1`; multi-Λ `(Ω_{2j}, Ω_{1j})`
/// for `j = N..3`; chains their zigzag (see [`analytic_lambda_chain_dark`]
/// for the Λ-chain, and `Ω_{(n−k)(N−k)}, Ω_{(n−k)(N−k−1)}, …` with the top
/// lower `n = N/2` or `(N−1)/2` for the N- and V-chains).
pub fn gen_nlevel(config: NLevelConfig, n: usize, amplitudes: &[C64], detunings: &[f64]) -> Result<CatalogEntry, CatalogError> {
    let name = config.name();
    let min = match config {
        NLevelConfig::Multipod | NLevelConfig::LambdaChain | NLevelConfig::VChain => 3,
        NLevelConfig::MultiLambda => 4,
        NLevelConfig::NChain => 4,
    };
    if n < min {
        return Err(bad(name, format!("N must be at least {min}, got {n}")));
    }
    match config {
        NLevelConfig::LambdaChain | NLevelConfig::VChain if n.is_multiple_of(2) => {
            return Err(bad(name, format!("N must be odd, got {n}")))
        }
        NLevelConfig::NChain if n % 2 == 1 => return Err(bad(name, format!("N must be even, got {n}"))),
        _ => {}
    }
    if amplitudes.len() != config.amplitude_count(n) {
        return Err(bad(name, format!("expected {} amplitudes, got {}", config.amplitude_count(n), amplitudes.len())));
    }
    if detunings.len() != n - 1 {
        return Err(bad(name, format!("expected {} detunings, got {}", n - 1, detunings.len())));
    }
    let nn = n as u32;
    let diag = |r: u32| if r == nn { 0.0 } else { -detunings[r as usize - 1] };
    let mut c = Couplings::new();
    let (uppers, lowers): (Vec<u32>, Vec<u32>);
    let expected;
    match config {
        NLevelConfig::Multipod => {
            uppers = vec![nn];
            lowers = (1..nn).rev().collect();
            for (j, a) in (1..nn).zip(amplitudes) {
                c.set(j, nn, *a);
            }
            expected = diagonal_expectation(&c, &uppers, &lowers, diag);
        }
        NLevelConfig::MultiLambda => {
            uppers = (3..=nn).rev().collect();
            lowers = vec![2, 1];
            for (j, pair) in uppers.iter().zip(amplitudes.chunks(2)) {
                c.set(2, *j, pair[0]);
                c.set(1, *j, pair[1]);
            }
            expected = diagonal_expectation(&c, &uppers, &lowers, diag);
        }
        _ => {
            if let Some(k) = amplitudes.iter().position(|a| a.norm() == 0.0) {
                return Err(bad(name, format!("zigzag amplitude {k} must be nonzero")));
            }
            let pairs = zigzag_pairs(config, nn);
            for (&(l, u), a) in pairs.iter().zip(amplitudes) {
                c.set(l, u, *a);
            }
            let mut ls: Vec<u32> = pairs.iter().map(|p| p.0).collect();
            let mut us: Vec<u32> = pairs.iter().map(|p| p.1).collect();
            for v in [&mut ls, &mut us] {
                v.sort_unstable_by(|a, b| b.cmp(a));
                v.dedup();
            }
            uppers = us;
            lowers = ls;
            expected = match config {
                NLevelConfig::LambdaChain if lowers.iter().all(|&l| same(diag(l), diag(lowers[0]))) => {
                    Some(ExpectedDark { count: 1, vectors: Some(vec![analytic_lambda_chain_dark(n, amplitudes)?]) })
                }
                NLevelConfig::LambdaChain => diagonal_expectation(&c, &uppers, &lowers, diag),
                // full column rank for any detunings
                _ => Some(ExpectedDark { count: 0, vectors: Some(Vec::new()) }),
            };
        }
    }
    let upper: Vec<LevelId> = uppers.iter().copied().map(LevelId).collect();
    Ok(CatalogEntry {
        name: name.to_string(),
        params: BTreeMap::new(),
        spec: rotating_spec(n, &c, detunings, &upper)?,
        upper,
        expected,
    })
}

/// Lowers with no couplings among themselves keep their bare states as the
/// dressed basis.
fn diagonal_expectation(c: &Couplings, uppers: &[u32], lowers: &[u32], diag: impl Fn(u32) -> f64) -> Option<ExpectedDark> {
    let basis: Vec<CVector> = (0..lowers.len()).map(|k| unit(lowers.len(), k)).collect();
    let energies: Vec<f64> = lowers.iter().map(|&l| diag(l)).collect();
    let rows: Vec<Vec<C64>> = uppers.iter().map(|&u| lowers.iter().map(|&l| c.block_entry(u, l)).collect()).collect();
    dressed_expectation(&basis, &energies, &rows)
}

pub(super) fn from_params(name: &str, p: &BTreeMap<String, f64>) -> Result<CatalogEntry, CatalogError> {
    let config = match name {
        "multipod" => NLevelConfig::Multipod,
        "multi_lambda" => NLevelConfig::MultiLambda,
        "lambda_chain" => NLevelConfig::LambdaChain,
        "n_chain" => NLevelConfig::NChain,
        "v_chain" => NLevelConfig::VChain,
        _ => return Err(CatalogError::UnknownEntry(name.to_string())),
    };
    let n = param_usize(p, "n")?;
    if n < 3 {
        return Err(bad(name, format!("N must be at least 3, got {n}")));
    }
    let delta = p["delta"];
    let draws = match config {
        NLevelConfig::MultiLambda => n - 2,
        _ => config.amplitude_count(n),
    };
    let base: Vec<C64> = match p.get("seed") {
        Some(&s) => random_amplitudes(draws, s as u64),
        None => vec![C64::new(p["amp"], 0.0); draws],
    };
    let mut detunings = vec![0.0; n - 1];
    let amplitudes = match config {
        NLevelConfig::Multipod => {
            let r = param_usize(p, "degenerate")?;
            if r > n - 1 {
                return Err(bad(name, format!("{r} degenerate lowers exceed N−1 = {}", n - 1)));
            }
            // the top r lowers share `delta`; the rest are spread out
            for (k, d) in detunings.iter_mut().rev().enumerate() {
                *d = if k < r { delta } else { delta + 0.37 * (k + 1 - r) as f64 };
            }
            for (k, v) in p {
                if let Some(j) = k.strip_prefix('d').and_then(|s| s.parse::<usize>().ok()) {
                    if j == 0 || j >= n {
                        return Err(CatalogError::BadParameter(format!("`{k}` is not a lower level of {name}")));
                    }
                    detunings[j - 1] = *v;
                }
            }
            base
        }
        NLevelConfig::MultiLambda => {
            detunings[0] = delta;
            detunings[1] = delta;
            let gamma = p["gamma"];
            base.iter().flat_map(|a| [a * gamma, *a]).collect()
        }
        NLevelConfig::LambdaChain => {
            for l in 1..=n.div_ceil(2) {
                detunings[l - 1] = delta;
            }
            base
        }
        NLevelConfig::NChain => {
            for l in 1..=n / 2 {
                detunings[l - 1] = delta;
            }
            base
        }
        NLevelConfig::VChain => {
            for l in 1..=(n - 1) / 2 {
                detunings[l - 1] = delta;
            }
            base
        }
    };
    gen_nlevel(config, n, &amplitudes, &detunings)
}
