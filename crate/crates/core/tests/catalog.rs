mod common;

use std::collections::BTreeMap;

use common::*;
use darkmap::catalog::{
    self, analytic_lambda_chain_dark, dsp_coupling_matrix, dsp_dark_polariton, gen_dsp, gen_five_level, gen_four_level,
    gen_nlevel, gen_three_level, CatalogEntry, CatalogError, Couplings, DspParams, NLevelConfig, ThreeLevelKind,
};
use darkmap::darkstate::{null_space, subspace_distance};
use darkmap::linalg::{CMatrix, CVector};
use darkmap::pipeline::run;
use darkmap::system_model::{Frame, TransitionSpec};
use darkmap::{DarkStateReport, LevelId, SystemSpec, Tolerances, C64};
use rand::Rng;

fn report(entry: &CatalogEntry) -> DarkStateReport {
    run(&entry.spec, Some(&entry.upper), &Tolerances::default()).unwrap().report
}

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn built(name: &str, kv: &[(&str, f64)]) -> DarkStateReport {
    report(&catalog::build(name, &params(kv)).unwrap())
}

fn dist(found: &[CVector], expect: &[CVector]) -> f64 {
    subspace_distance(found, expect).unwrap()
}

fn r(x: f64) -> C64 {
    c(x, 0.0)
}

#[test]
fn every_entry_meets_its_expectation() {
    for info in catalog::ENTRIES {
        let entry = catalog::build(info.name, &BTreeMap::new()).unwrap();
        entry.check(&report(&entry)).unwrap_or_else(|e| panic!("{}: {e}", info.name));
    }
}

#[test]
fn unknown_entry_and_parameter() {
    assert!(matches!(catalog::build("hexapod", &BTreeMap::new()), Err(CatalogError::UnknownEntry(_))));
    assert!(matches!(catalog::build("lambda", &params(&[("o99", 1.0)])), Err(CatalogError::BadParameter(_))));
}

#[test]
fn lambda_dark_state() {
    let c = Couplings::new().with(1, 3, 1.0).with(2, 3, 2.0);
    let e = gen_three_level(ThreeLevelKind::Lambda, &c, &[0.3, 0.3]).unwrap();
    let rep = report(&e);
    assert_eq!(rep.total_dark, 1);
    // (2|1⟩ − |2⟩)/√5 over (|2⟩, |1⟩)
    assert!(dist(&rep.dark_states_bare(), &[rvec(&[-1.0, 2.0]).normalize()]) <= 1e-10);
}

#[test]
fn delta_dark_only_with_balanced_couplings() {
    let c = Couplings::new().with(1, 3, 1.0).with(2, 3, 1.0).with(1, 2, 0.5);
    let rep = report(&gen_three_level(ThreeLevelKind::Delta, &c, &[0.3, 0.3]).unwrap());
    assert_eq!(rep.total_dark, 1);
    assert!(dist(&rep.dark_states_bare(), &[rvec(&[-1.0, 1.0]).normalize()]) <= 1e-10);

    let c = Couplings::new().with(1, 3, 1.0).with(2, 3, 2.0).with(1, 2, 0.5);
    assert_eq!(report(&gen_three_level(ThreeLevelKind::Delta, &c, &[0.3, 0.3]).unwrap()).total_dark, 0);
}

#[test]
fn kind_guards_reject_extra_couplings() {
    let c = Couplings::new().with(1, 2, 1.0).with(1, 3, 1.0).with(2, 3, 0.2);
    for kind in [ThreeLevelKind::Lambda, ThreeLevelKind::Xi, ThreeLevelKind::Vee] {
        assert!(matches!(gen_three_level(kind, &c, &[0.0, 0.0]), Err(CatalogError::BadKindParameters { .. })));
    }
}

#[test]
fn vee_dark_state() {
    // upper |1⟩; lowers (|3⟩, |2⟩) are degenerate when Δ23 = 0
    let amps = Couplings::new().with(1, 2, 0.8).with(1, 3, c(0.0, 1.0));
    let rep = report(&gen_three_level(ThreeLevelKind::Vee, &amps, &[0.5, 0.0]).unwrap());
    assert_eq!(rep.total_dark, 1);
    let coupling = [c(0.0, 1.0).conj(), r(0.8)];
    let oracle = gauss_null_space(&CMatrix::from_row_slice(1, 2, &coupling), 1e-12);
    assert!(dist(&rep.dark_states_bare(), &oracle) <= 1e-10);
}

/// Paper's bare-state forms for the symmetric four-level system; lowers
/// are ordered (|3⟩, |2⟩, |1⟩).
fn four1_oracle(o14: f64, o24: f64, o34: f64) -> (CVector, CVector) {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let l1 = rvec(&[-1.0, 0.0, 1.0]) / r(s2);
    let l2 = rvec(&[-1.0, 2.0, -1.0]) / r(s6);
    let l3 = rvec(&[1.0, 1.0, 1.0]) / r(s3);
    let c1 = (o14 - o34) / s2;
    let c2 = (2.0 * o24 - o34 - o14) / s6;
    let c3 = (o34 + o14 + o24) / s3;
    let n1 = (c1 * c1 + c2 * c2).sqrt();
    let n2 = (c1 * c1 + c2 * c2 + c3 * c3).sqrt();
    let d1 = rvec(&[o14 - o24, -(o14 - o34), o24 - o34]) / r(s3 * n1);
    let d2 = ((l1 * r(c1) + l2 * r(c2)) * r(c3) - l3 * r(n1 * n1)) / r(n1 * n2);
    (d1, d2)
}

#[test]
fn four_level_symmetric_lowers() {
    let (o14, o24, o34) = (1.0, 2.0, 0.5);
    let (d1, d2) = four1_oracle(o14, o24, o34);
    assert!((d1.norm() - 1.0).abs() < 1e-12 && (d2.norm() - 1.0).abs() < 1e-12);
    assert!(d1.dotc(&d2).norm() < 1e-12);

    let rep = built("four1", &[("o14", o14), ("o24", o24), ("o34", o34), ("omega", 0.7)]);
    assert_eq!(rep.total_dark, 1);
    assert!(dist(&rep.dark_states_bare(), std::slice::from_ref(&d1)) <= 1e-10);

    let rep = built("four1", &[("o14", o14), ("o24", o24), ("o34", o34), ("omega", 0.0)]);
    assert_eq!(rep.total_dark, 2);
    assert!(dist(&rep.dark_states_bare(), &[d1, d2]) <= 1e-10);
}

#[test]
fn four_level_two_uppers() {
    let amps = Couplings::new().with(1, 3, 0.7).with(2, 3, 1.4).with(1, 4, c(0.3, 0.2)).with(2, 4, c(0.6, 0.4));
    let e = gen_four_level(2, &amps, &[0.2, 0.2, 0.9]).unwrap();
    let rep = report(&e);
    assert_eq!(rep.total_dark, 1);
    assert!(dist(&rep.dark_states_bare(), &[rvec(&[-1.0, 2.0]).normalize()]) <= 1e-10);
    assert!(matches!(
        gen_four_level(2, &amps.clone().with(3, 4, 0.1), &[0.2, 0.2, 0.9]),
        Err(CatalogError::BadKindParameters { .. })
    ));
}

#[test]
fn five_level_ladder() {
    let base = [("o15", 1.0), ("o25", 0.4), ("o35", -0.7), ("o45", 1.3)];
    let count = |o1: f64, o2: f64| {
        let mut kv = base.to_vec();
        kv.extend([("omega1", o1), ("omega2", o2)]);
        built("five1", &kv).total_dark
    };
    assert_eq!([count(0.3, 0.8), count(0.0, 0.8), count(0.5, 0.5), count(0.0, 0.0)], [1, 2, 2, 3]);
}

#[test]
fn five_level_proportional_columns() {
    let s3 = 3f64.sqrt();
    let gamma = 0.6;
    let (o15, o35, o14, o34) = (1.0, 0.3, -0.4, 0.9);
    // second dressed column = γ × first
    let o25 = (gamma * s3 * (o15 - o35) + o35 + o15) / 2.0;
    let o24 = (gamma * s3 * (o14 - o34) + o34 + o14) / 2.0;
    let rep = built(
        "five2",
        &[("o15", o15), ("o25", o25), ("o35", o35), ("o14", o14), ("o24", o24), ("o34", o34), ("omega", 0.5)],
    );
    assert_eq!(rep.total_dark, 1);
    let expect = rvec(&[1.0 - s3 * gamma, -2.0, s3 * gamma + 1.0]) / r(6f64.sqrt() * (1.0 + gamma * gamma).sqrt());
    assert!((expect.norm() - 1.0).abs() < 1e-12);
    assert!(dist(&rep.dark_states_bare(), &[expect]) <= 1e-10);
}

#[test]
fn five_level_two_uppers_worked_example() {
    let rep = built("five2", &[]);
    assert_eq!(rep.total_dark, 1);
    assert!(dist(&rep.dark_states_bare(), &[rvec(&[1.0, 1.0, -1.0]).normalize()]) <= 1e-10);
}

#[test]
fn five_level_three_uppers() {
    let c = Couplings::new()
        .with(1, 3, 0.5)
        .with(1, 4, 0.3)
        .with(1, 5, 0.7)
        .with(2, 3, 1.0)
        .with(2, 4, 0.6)
        .with(2, 5, 1.4)
        .with(3, 4, 0.4)
        .with(3, 5, 0.4)
        .with(4, 5, 0.4);
    let rep = report(&gen_five_level(3, &c, &[0.1, 0.1, 0.0, 0.0]).unwrap());
    assert_eq!(rep.total_dark, 1);
    assert!(dist(&rep.dark_states_bare(), &[rvec(&[-1.0, 2.0]).normalize()]) <= 1e-10);
}

#[test]
fn multipod_counts() {
    assert_eq!(built("multipod", &[("n", 6.0), ("degenerate", 5.0)]).total_dark, 4);
    for n in 4..=8 {
        for deg in 1..n {
            let rep = built("multipod", &[("n", n as f64), ("degenerate", deg as f64), ("seed", 11.0)]);
            assert_eq!(rep.total_dark, deg - 1, "N={n}, r={deg}");
        }
    }
}

#[test]
fn multi_lambda_has_one_dark() {
    for n in 4..=7 {
        let rep = built("multi_lambda", &[("n", n as f64), ("gamma", -1.5)]);
        assert_eq!(rep.total_dark, 1);
        // lowers (|2⟩, |1⟩); every upper sees (γΩ, Ω)
        assert!(dist(&rep.dark_states_bare(), &[rvec(&[1.0, 1.5]).normalize()]) <= 1e-10);
    }
}

/// Dark vector of the Λ-chain straight from the product formula.
fn chain_product_formula(n: usize, z: &[C64]) -> CVector {
    let m = (n - 1) / 2;
    let x = (0..=m).map(|i| {
        let sign = if (m - i).is_multiple_of(2) { 1.0 } else { -1.0 };
        (i..m).map(|j| z[2 * j + 1] / z[2 * j]).product::<C64>() * sign
    });
    CVector::from_iterator(m + 1, x).normalize()
}

#[test]
fn lambda_chain_matches_product_formula() {
    let mut g = rng(5);
    for _ in 0..20 {
        let z: Vec<C64> = (0..4).map(|_| random_amplitude(&mut g)).collect();
        let e = gen_nlevel(NLevelConfig::LambdaChain, 5, &z, &[0.2; 4]).unwrap();
        let rep = report(&e);
        assert_eq!(rep.total_dark, 1);
        let oracle = chain_product_formula(5, &z);
        assert!(dist(&rep.dark_states_bare(), std::slice::from_ref(&oracle)) <= 1e-8);
        assert!(dist(&[analytic_lambda_chain_dark(5, &z).unwrap()], &[oracle]) <= 1e-12);
    }
}

#[test]
fn lambda_chain_closed_form_small_cases() {
    // N=3 is the plain Λ: a|3⟩⟨2| + b|3⟩⟨1| → (−b, a)
    let v = analytic_lambda_chain_dark(3, &[r(1.0), r(2.0)]).unwrap();
    assert!(dist(&[v], &[rvec(&[-2.0, 1.0]).normalize()]) < 1e-15);
    let v = analytic_lambda_chain_dark(5, &[r(1.0), r(1.0), r(1.0), r(1.0)]).unwrap();
    assert!(dist(&[v], &[rvec(&[1.0, -1.0, 1.0]).normalize()]) < 1e-15);
    assert!(matches!(
        analytic_lambda_chain_dark(5, &[r(1.0), r(1.0), r(0.0), r(1.0)]),
        Err(CatalogError::ZeroDenominatorCoupling { index: 1 })
    ));
    assert!(analytic_lambda_chain_dark(4, &[r(1.0); 3]).is_err());
}

#[test]
fn zigzag_chains_have_no_dark_state() {
    assert_eq!(built("n_chain", &[("n", 6.0)]).total_dark, 0);
    for n in [4, 6, 8] {
        assert_eq!(built("n_chain", &[("n", n as f64), ("seed", 2.0)]).total_dark, 0);
    }
    for n in [5, 7, 9] {
        assert_eq!(built("v_chain", &[("n", n as f64), ("seed", 2.0)]).total_dark, 0);
    }
    assert!(catalog::build("n_chain", &params(&[("n", 7.0)])).is_err());
    assert!(catalog::build("v_chain", &params(&[("n", 6.0)])).is_err());
}

fn large_n(n: usize, g: f64, omega: f64) -> DspParams {
    DspParams { g, n_atoms: 10_000, omega, n, large_n: true }
}

#[test]
fn dsp_matrix_rows() {
    let p = large_n(1, 0.01, 2.0);
    let (m, labels) = dsp_coupling_matrix(&p).unwrap();
    assert_eq!(m, CMatrix::from_row_slice(1, 2, &[r(1.0), r(2.0)]));
    assert_eq!((labels.upper.len(), labels.lower.len()), (1, 2));

    let (m, _) = dsp_coupling_matrix(&large_n(2, 0.01, 2.0)).unwrap();
    let s2 = 2f64.sqrt();
    let expect = CMatrix::from_row_slice(2, 3, &[r(s2), r(2.0), r(0.0), r(0.0), r(1.0), r(2.0 * s2)]);
    assert!(darkmap::linalg::max_abs(&(m - expect)) < 1e-14);

    // exact probe factor √(N−m+1)
    let exact = DspParams { large_n: false, n_atoms: 5, ..large_n(2, 1.0, 1.0) };
    let (m, _) = dsp_coupling_matrix(&exact).unwrap();
    assert!((m[(0, 0)].re - 5f64.sqrt() * s2).abs() < 1e-14);
    assert!((m[(1, 1)].re - 2.0).abs() < 1e-14);
}

#[test]
fn dsp_polariton_limits() {
    for n in 1..=5 {
        let photon = dsp_dark_polariton(n, 0.0);
        let spin = dsp_dark_polariton(n, std::f64::consts::FRAC_PI_2);
        assert!(dist(&[photon], &[CVector::from_fn(n + 1, |i, _| r((i == 0) as u8 as f64))]) < 1e-15);
        assert!(dist(&[spin], &[CVector::from_fn(n + 1, |i, _| r((i == n) as u8 as f64))]) < 1e-15);
    }
}

#[test]
fn dsp_polariton_is_the_null_space() {
    let mut g = rng(9);
    for n in 1..=6 {
        let p = large_n(n, g.gen_range(0.001..0.05), g.gen_range(0.1..3.0));
        let (m, _) = dsp_coupling_matrix(&p).unwrap();
        let theta = (p.g * 100.0).atan2(p.omega);
        let x = CVector::from_fn(n + 1, |i, _| {
            r(binomial(n, i).sqrt() * (-theta.cos()).powi((n - i) as i32) * theta.sin().powi(i as i32))
        });
        assert!(dist(&[dsp_dark_polariton(n, p.theta())], std::slice::from_ref(&x)) < 1e-12);
        assert!((&m * &x).norm() < 1e-12);
        let oracle = gauss_null_space(&m, 1e-12);
        assert_eq!(oracle.len(), 1);
        assert!(dist(&oracle, &[x]) < 1e-10);
        let rep = report(&gen_dsp(&p).unwrap());
        assert_eq!(rep.total_dark, 1);
    }
}

#[test]
fn dsp_exact_couplings_break_the_binomial_form() {
    let p = DspParams { g: 0.3, n_atoms: 4, omega: 1.0, n: 3, large_n: false };
    let (m, _) = dsp_coupling_matrix(&p).unwrap();
    let residual = (&m * dsp_dark_polariton(3, p.theta())).norm();
    assert!(residual > 1e-3, "residual {residual}");
    let e = gen_dsp(&p).unwrap();
    let rep = report(&e);
    assert_eq!(rep.total_dark, 1);
    assert!(dist(&rep.dark_states_bare(), &null_space(&m, 1e-9)) <= 1e-10);
    assert!(matches!(
        gen_dsp(&DspParams { n: 5, ..p }),
        Err(CatalogError::ExcitationExceedsAtoms { n: 5, atoms: 4 })
    ));
}

#[test]
fn dsp_uncoupled_ladder_is_all_dark() {
    let rep = report(&gen_dsp(&large_n(3, 0.0, 0.0)).unwrap());
    assert_eq!(rep.total_dark, 4);
}

/// Renames lower levels through `perm` (old label → new label), keeping the
/// Hamiltonian the same operator.
fn relabel(spec: &SystemSpec, perm: &BTreeMap<u32, u32>) -> SystemSpec {
    let map = |id: LevelId| LevelId(*perm.get(&id.0).unwrap_or(&id.0));
    let ts = spec
        .transitions()
        .iter()
        .map(|t| {
            let (a, b) = (map(t.from), map(t.to));
            if a < b {
                TransitionSpec { from: a, to: b, amplitude: t.amplitude, drive_frequency: None }
            } else {
                TransitionSpec { from: b, to: a, amplitude: t.amplitude.conj(), drive_frequency: None }
            }
        })
        .collect();
    let Frame::Rotating { detunings } = spec.frame() else { panic!("rotating spec") };
    let det = detunings.iter().map(|(&k, &d)| (map(k), d)).collect();
    SystemSpec::rotating(det, ts, spec.upper_hint().map(|u| u.iter().copied().map(map).collect())).unwrap()
}

#[test]
fn lower_relabeling_permutes_dark_states() {
    use rand::seq::SliceRandom;
    let mut g = rng(21);
    for _ in 0..20 {
        let mults = random_multiplicities(&mut g, 4);
        let shape = SystemShape { n_upper: 2, multiplicities: &mults, rank_one: false, coupling_scale: r(1.0) };
        let sys = random_system(&mut g, &shape);
        let mut targets: Vec<u32> = (1..=4).collect();
        targets.shuffle(&mut g);
        let perm: BTreeMap<u32, u32> = (1..=4).zip(targets).collect();
        let a = report(&CatalogEntry {
            name: "random".into(),
            params: BTreeMap::new(),
            spec: sys.spec.clone(),
            upper: sys.upper.clone(),
            expected: None,
        });
        let relabeled = relabel(&sys.spec, &perm);
        let b = run(&relabeled, None, &Tolerances::default()).unwrap().report;
        assert_eq!(a.total_dark, b.total_dark);
        let n = 6;
        let back: Vec<CVector> = b
            .dark_states_full()
            .iter()
            .map(|v| CVector::from_fn(n, |i, _| {
                let label = (n - i) as u32;
                v[n - *perm.get(&label).unwrap_or(&label) as usize]
            }))
            .collect();
        assert!(dist(&a.dark_states_full(), &back) <= 1e-9);
    }
}
