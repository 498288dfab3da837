//! Three-, four- and five-level configurations.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use super::{
    bad, dressed_expectation, param_amp, real_vec, rotating_spec, same, same_c, unit, CatalogEntry,
    CatalogError, Couplings, ExpectedDark,
};
use crate::linalg::CVector;
use crate::system_model::LevelId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeLevelKind {
    Delta,
    Lambda,
    Xi,
    Vee,
}

impl ThreeLevelKind {
    fn name(self) -> &'static str {
        match self {
            ThreeLevelKind::Delta => "delta",
            ThreeLevelKind::Lambda => "lambda",
            ThreeLevelKind::Xi => "xi",
            ThreeLevelKind::Vee => "vee",
        }
    }
}

fn ids(xs: &[u32]) -> Vec<LevelId> {
    xs.iter().copied().map(LevelId).collect()
}

/// Diagonal entry of level `r` in an `n`-level rotating frame.
fn diag(n: u32, r: u32, detunings: &[f64]) -> f64 {
    if r == n {
        0.0
    } else {
        -detunings[r as usize - 1]
    }
}

fn block_rows(amps: &Couplings, uppers: &[u32], lowers: &[u32]) -> Vec<Vec<C64>> {
    uppers.iter().map(|&u| lowers.iter().map(|&l| amps.block_entry(u, l)).collect()).collect()
}

/// Two lower states `l_1 > l_2` with `H_l = [[d_1, h], [h*, d_2]]`.
///
/// Equal diagonals give `|L_1⟩ = (e^{−iθ}|l_2⟩ − |l_1⟩)/√2` at `d − |h|` and
/// `|L_2⟩ = (e^{−iθ}|l_2⟩ + |l_1⟩)/√2` at `d + |h|`, `h = |h|e^{iθ}`. A
/// diagonal `H_l` keeps the bare states. Other lower blocks have no closed
/// form here.
fn two_lower_expectation(amps: &Couplings, n: u32, uppers: &[u32], lowers: [u32; 2], detunings: &[f64]) -> Option<ExpectedDark> {
    let [l1, l2] = lowers;
    let (d1, d2) = (diag(n, l1, detunings), diag(n, l2, detunings));
    let h = amps.get(l2, l1);
    let rows = block_rows(amps, uppers, &lowers);
    if same(d1, d2) {
        let phase = if h.norm() == 0.0 { C64::new(1.0, 0.0) } else { (h / h.norm()).conj() };
        let s = C64::from(FRAC_1_SQRT_2);
        let lo = CVector::from_vec(vec![-s, phase * s]);
        let hi = CVector::from_vec(vec![s, phase * s]);
        dressed_expectation(&[lo, hi], &[d1 - h.norm(), d1 + h.norm()], &rows)
    } else if h.norm() == 0.0 {
        dressed_expectation(&[unit(2, 0), unit(2, 1)], &[d1, d2], &rows)
    } else {
        None
    }
}

fn sl3() -> [CVector; 3] {
    let (s2, s6, s3) = (2f64.sqrt(), 6f64.sqrt(), 3f64.sqrt());
    [
        real_vec(&[-1.0 / s2, 0.0, 1.0 / s2]),
        real_vec(&[-1.0 / s6, 2.0 / s6, -1.0 / s6]),
        real_vec(&[1.0 / s3, 1.0 / s3, 1.0 / s3]),
    ]
}

fn sl4() -> [CVector; 4] {
    let s2 = FRAC_1_SQRT_2;
    [
        real_vec(&[-s2, 0.0, 0.0, s2]),
        real_vec(&[0.0, -s2, s2, 0.0]),
        real_vec(&[0.5, -0.5, -0.5, 0.5]),
        real_vec(&[0.5, 0.5, 0.5, 0.5]),
    ]
}

fn require_zero(kind: &str, amps: &Couplings, j: u32, k: u32) -> Result<(), CatalogError> {
    if amps.get(j, k).norm() != 0.0 {
        return Err(bad(kind, format!("Ω{j}{k} must be 0")));
    }
    Ok(())
}

/// All listed couplings equal one real value, which is returned.
fn require_real_equal(kind: &str, amps: &Couplings, pairs: &[(u32, u32)]) -> Result<f64, CatalogError> {
    let first = amps.get(pairs[0].0, pairs[0].1);
    if first.im != 0.0 {
        return Err(bad(kind, format!("Ω{}{} must be real", pairs[0].0, pairs[0].1)));
    }
    for &(j, k) in &pairs[1..] {
        if !same_c(amps.get(j, k), first) {
            return Err(bad(kind, format!("Ω{j}{k} must equal Ω{}{}", pairs[0].0, pairs[0].1)));
        }
    }
    Ok(first.re)
}

/// `Δ_{rN}` equal for every listed `r`; returns it.
fn require_equal_detunings(kind: &str, detunings: &[f64], levels: &[u32]) -> Result<f64, CatalogError> {
    let d0 = detunings[levels[0] as usize - 1];
    if levels.iter().any(|&r| !same(detunings[r as usize - 1], d0)) {
        let names: Vec<String> = levels.iter().map(|r| format!("Δ{r}")).collect();
        return Err(bad(kind, format!("detunings {} must be equal", names.join(", "))));
    }
    Ok(d0)
}

fn check_detunings(kind: &str, n: usize, detunings: &[f64]) -> Result<(), CatalogError> {
    if detunings.len() != n - 1 {
        return Err(bad(kind, format!("expected {} detunings, got {}", n - 1, detunings.len())));
    }
    Ok(())
}

fn only_pairs(kind: &str, amps: &Couplings, n: u32) -> Result<(), CatalogError> {
    for (&(j, k), _) in amps.iter() {
        if j == 0 || k > n {
            return Err(bad(kind, format!("transition ({j}, {k}) outside 1..={n}")));
        }
    }
    Ok(())
}

/// `detunings[r−1] = Δ_{r3}`.
pub fn gen_three_level(kind: ThreeLevelKind, amps: &Couplings, detunings: &[f64]) -> Result<CatalogEntry, CatalogError> {
    let name = kind.name();
    check_detunings(name, 3, detunings)?;
    only_pairs(name, amps, 3)?;
    let (upper, lowers) = match kind {
        ThreeLevelKind::Delta => (3, [2, 1]),
        ThreeLevelKind::Lambda => {
            require_zero(name, amps, 1, 2)?;
            (3, [2, 1])
        }
        ThreeLevelKind::Xi => {
            require_zero(name, amps, 1, 3)?;
            (2, [3, 1])
        }
        ThreeLevelKind::Vee => {
            require_zero(name, amps, 2, 3)?;
            (1, [3, 2])
        }
    };
    let upper = ids(&[upper]);
    let expected = two_lower_expectation(amps, 3, &[upper[0].0], lowers, detunings);
    Ok(CatalogEntry {
        name: name.to_string(),
        params: BTreeMap::new(),
        spec: rotating_spec(3, amps, detunings, &upper)?,
        upper,
        expected,
    })
}

/// `detunings[r−1] = Δ_{r4}`.
pub fn gen_four_level(config: u8, amps: &Couplings, detunings: &[f64]) -> Result<CatalogEntry, CatalogError> {
    let name = format!("four{config}");
    check_detunings(&name, 4, detunings)?;
    only_pairs(&name, amps, 4)?;
    let (upper, expected) = match config {
        1 => {
            let omega = require_real_equal(&name, amps, &[(1, 2), (1, 3), (2, 3)])?;
            let delta = require_equal_detunings(&name, detunings, &[1, 2, 3])?;
            let rows = block_rows(amps, &[4], &[3, 2, 1]);
            let energies = [-delta - omega, -delta - omega, -delta + 2.0 * omega];
            (ids(&[4]), dressed_expectation(&sl3(), &energies, &rows))
        }
        2 => {
            require_zero(&name, amps, 3, 4)?;
            require_equal_detunings(&name, detunings, &[1, 2])?;
            (ids(&[4, 3]), two_lower_expectation(amps, 4, &[4, 3], [2, 1], detunings))
        }
        _ => return Err(bad(&name, "configuration must be 1 or 2")),
    };
    Ok(CatalogEntry { name, params: BTreeMap::new(), spec: rotating_spec(4, amps, detunings, &upper)?, upper, expected })
}

/// `detunings[r−1] = Δ_{r5}`.
pub fn gen_five_level(config: u8, amps: &Couplings, detunings: &[f64]) -> Result<CatalogEntry, CatalogError> {
    let name = format!("five{config}");
    check_detunings(&name, 5, detunings)?;
    only_pairs(&name, amps, 5)?;
    let (upper, expected) = match config {
        1 => {
            let o1 = require_real_equal(&name, amps, &[(3, 4), (2, 4), (1, 2), (1, 3)])?;
            let o2 = require_real_equal(&name, amps, &[(2, 3), (1, 4)])?;
            let delta = require_equal_detunings(&name, detunings, &[1, 2, 3, 4])?;
            let rows = block_rows(amps, &[5], &[4, 3, 2, 1]);
            let energies = [-delta - o2, -delta - o2, -delta - 2.0 * o1 + o2, -delta + 2.0 * o1 + o2];
            (ids(&[5]), dressed_expectation(&sl4(), &energies, &rows))
        }
        2 => {
            require_zero(&name, amps, 4, 5)?;
            let omega = require_real_equal(&name, amps, &[(2, 3), (1, 2), (1, 3)])?;
            let delta = require_equal_detunings(&name, detunings, &[1, 2, 3])?;
            let rows = block_rows(amps, &[5, 4], &[3, 2, 1]);
            let energies = [-delta - omega, -delta - omega, -delta + 2.0 * omega];
            (ids(&[5, 4]), dressed_expectation(&sl3(), &energies, &rows))
        }
        3 => {
            require_real_equal(&name, amps, &[(4, 5), (3, 5), (3, 4)])?;
            if detunings[3] != 0.0 || detunings[2] != 0.0 {
                return Err(bad(&name, "Δ4 and Δ3 must be 0"));
            }
            require_equal_detunings(&name, detunings, &[1, 2])?;
            (ids(&[5, 4, 3]), two_lower_expectation(amps, 5, &[5, 4, 3], [2, 1], detunings))
        }
        _ => return Err(bad(&name, "configuration must be 1, 2 or 3")),
    };
    Ok(CatalogEntry { name, params: BTreeMap::new(), spec: rotating_spec(5, amps, detunings, &upper)?, upper, expected })
}

pub(super) fn from_params(name: &str, p: &BTreeMap<String, f64>) -> Result<CatalogEntry, CatalogError> {
    let amp = |k: &str| param_amp(p, k);
    let get = |k: &str| p.get(k).copied().unwrap_or(0.0);
    let mut c = Couplings::new();
    let put = |c: &mut Couplings, keys: &[&str]| {
        for k in keys {
            let (j, l) = (k.as_bytes()[1] - b'0', k.as_bytes()[2] - b'0');
            c.set(j as u32, l as u32, amp(k));
        }
    };
    match name {
        "delta" => {
            put(&mut c, &["o13", "o23"]);
            c.set(1, 2, amp("o12") * C64::from_polar(1.0, get("theta")));
            gen_three_level(ThreeLevelKind::Delta, &c, &[get("d1"), get("d2")])
        }
        "lambda" => {
            put(&mut c, &["o13", "o23"]);
            gen_three_level(ThreeLevelKind::Lambda, &c, &[get("d1"), get("d2")])
        }
        "xi" => {
            put(&mut c, &["o12", "o23"]);
            gen_three_level(ThreeLevelKind::Xi, &c, &[get("d1"), get("d2")])
        }
        "vee" => {
            put(&mut c, &["o12", "o13"]);
            gen_three_level(ThreeLevelKind::Vee, &c, &[get("d1"), get("d2")])
        }
        "four1" => {
            put(&mut c, &["o14", "o24", "o34"]);
            for (j, k) in [(1, 2), (1, 3), (2, 3)] {
                c.set(j, k, C64::from(get("omega")));
            }
            let d = get("delta");
            gen_four_level(1, &c, &[d, d, d])
        }
        "four2" => {
            put(&mut c, &["o13", "o14", "o23", "o24"]);
            c.set(1, 2, amp("o12"));
            let d = get("delta");
            gen_four_level(2, &c, &[d, d, get("d3")])
        }
        "five1" => {
            put(&mut c, &["o15", "o25", "o35", "o45"]);
            for (j, k) in [(3, 4), (2, 4), (1, 2), (1, 3)] {
                c.set(j, k, C64::from(get("omega1")));
            }
            for (j, k) in [(2, 3), (1, 4)] {
                c.set(j, k, C64::from(get("omega2")));
            }
            let d = get("delta");
            gen_five_level(1, &c, &[d, d, d, d])
        }
        "five2" => {
            put(&mut c, &["o15", "o25", "o35", "o14", "o24", "o34"]);
            for (j, k) in [(2, 3), (1, 2), (1, 3)] {
                c.set(j, k, C64::from(get("omega")));
            }
            let d = get("delta");
            gen_five_level(2, &c, &[d, d, d, get("d4")])
        }
        "five3" => {
            put(&mut c, &["o13", "o14", "o15", "o23", "o24", "o25"]);
            c.set(1, 2, amp("o12") * C64::from_polar(1.0, get("theta")));
            for (j, k) in [(4, 5), (3, 5), (3, 4)] {
                c.set(j, k, C64::from(get("omega")));
            }
            let d = get("delta");
            gen_five_level(3, &c, &[d, d, 0.0, 0.0])
        }
        _ => Err(CatalogError::UnknownEntry(name.to_string())),
    }
}
