mod common;

use common::{integrate_sym, permanent};
use pairlab_core::specfun::osc_eigenfunction;
use pairlab_core::states::*;
use proptest::prelude::*;
use std::f64::consts::SQRT_2;

#[test]
fn coefficient_invariants_at_special_points() {
    let free = GroundStateCoefficients::new(0.0, 60).unwrap();
    assert!((free.c[0] - 1.0).abs() < 1e-12);
    assert!(free.c[1..].iter().all(|v| v.abs() < 1e-12));
    assert!(free.c_p.iter().flatten().all(|v| v.abs() < 1e-12));
    assert!(free.norm_defect_bosonic.abs() < 1e-12);

    let hard = GroundStateCoefficients::new(1.0, 60).unwrap();
    let nonzero: Vec<_> = hard.c_s.iter().flatten().filter(|v| v.abs() > 1e-12).collect();
    assert_eq!(nonzero, vec![&1.0]);
    assert_eq!(hard.norm_defect_fermionic, 0.0);
}

#[test]
fn defects_are_nonnegative_and_shrink_with_truncation() {
    for &l in &[-6.0, -2.0, -0.5, 0.3, 0.8, 0.97] {
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for &n in &[10, 30, 60, 120, 200] {
            let gs = GroundStateCoefficients::new(l, n).unwrap();
            assert!(gs.norm_defect_bosonic >= 0.0 && gs.norm_defect_fermionic >= 0.0);
            assert!(gs.norm_defect_bosonic < prev.0 && gs.norm_defect_fermionic < prev.1, "lambda {l} n {n}");
            prev = (gs.norm_defect_bosonic, gs.norm_defect_fermionic);
        }
    }
    // algebraic rates: bosonic ~ N^{-3/2}, fermionic ~ N^{-1/2}
    let a = GroundStateCoefficients::new(-2.0, 50).unwrap();
    let b = GroundStateCoefficients::new(-2.0, 200).unwrap();
    let rb = (a.norm_defect_bosonic / b.norm_defect_bosonic).ln() / 4f64.ln();
    let rf = (a.norm_defect_fermionic / b.norm_defect_fermionic).ln() / 4f64.ln();
    assert!((rb - 1.5).abs() < 0.15, "bosonic rate {rb}");
    assert!((rf - 0.5).abs() < 0.1, "fermionic rate {rf}");
}

#[test]
fn level_weights_match_coefficients_and_close_to_one() {
    let gs = GroundStateCoefficients::new(-2.0, 40).unwrap();
    for n in 0..=40 {
        let mut wb = gs.c[n].powi(2);
        if n > 0 {
            wb += gs.c_p[n - 1].iter().map(|v| v * v).sum::<f64>();
        }
        let wf: f64 = gs.c_s[n].iter().map(|v| v * v).sum();
        assert!((wb - bosonic_level_weight(n, -2.0).unwrap()).abs() <= 1e-12 * wb.max(1e-300));
        let cf = fermionic_level_weight(n, -2.0).unwrap();
        assert!((wf - cf).abs() <= 1e-12 * wf, "level {n}: {wf} vs {cf}");
    }
    for &l in &[-2.0, -0.7, 0.4] {
        let nb: f64 = (0..=100_000).map(|n| bosonic_level_weight(n, l).unwrap()).sum();
        assert!((nb - 1.0).abs() < 1e-6, "lambda {l}: bosonic closure {nb}");
        // the fermionic tail falls like N^{-1/2}; add its integral estimate
        let top = 100_000usize;
        let wt = fermionic_level_weight(top, l).unwrap();
        let nf: f64 = (0..=top).map(|n| fermionic_level_weight(n, l).unwrap()).sum::<f64>() + 2.0 * wt * top as f64;
        assert!((nf - 1.0).abs() < 1e-4, "lambda {l}: fermionic closure {nf}");
    }
}

#[test]
fn permanent_coefficient_matches_quadrature_projection() {
    let psi = ExactState::new(0.5, 0).unwrap();
    let proj = integrate_sym(|a, b| permanent(2, 6, a, b) * psi.eval(a, b).unwrap(), 10.0, 14.0, 24);
    let want = coeff_cp(4, 2, 0.5).unwrap();
    assert!((proj - want).abs() < 1e-7, "projection {proj} vs {want}");
    // opposite total parity projects to zero
    let odd = integrate_sym(|a, b| permanent(1, 4, a, b) * psi.eval(a, b).unwrap(), 10.0, 14.0, 24);
    assert!(odd.abs() < 1e-10, "odd projection {odd}");
}

#[test]
fn exact_state_norm_and_free_limit() {
    let psi = ExactState::new(-2.0, 0).unwrap();
    let norm = integrate_sym(|a, b| psi.eval(a, b).unwrap().powi(2), 10.0, 14.0, 24);
    assert!((norm - 1.0).abs() < 1e-6, "norm {norm}");
    let excited = ExactState::new(-0.4, 3).unwrap();
    let norm = integrate_sym(|a, b| excited.eval(a, b).unwrap().powi(2), 10.0, 14.0, 24);
    assert!((norm - 1.0).abs() < 1e-6, "cm-excited norm {norm}");
    for i in 0..41 {
        for j in 0..41 {
            let (a, b) = (-5.0 + 0.25 * i as f64, -5.0 + 0.25 * j as f64);
            let want = osc_eigenfunction(0, a) * osc_eigenfunction(0, b);
            assert!((eval_psi_exact(a, b, 0.0, 0).unwrap() - want).abs() < 1e-10);
        }
    }
}

#[test]
fn tabulation_matches_pointwise_evaluation() {
    let xs: Vec<f64> = (0..31).map(|i| -3.0 + 0.2 * i as f64).collect();
    let ex = ExactState::new(-1.3, 2).unwrap();
    let rep = RepulsiveState::new(3, 1).unwrap();
    let att = AttractiveState::new(-8.0, 1).unwrap();
    let states: [&dyn Wavefunction; 3] = [&ex, &rep, &att];
    for st in states {
        let t = st.tabulate(&xs).unwrap();
        for (i, &a) in xs.iter().enumerate() {
            for (j, &b) in xs.iter().enumerate() {
                let v = st.eval(a, b).unwrap();
                assert!((t.get(i, j) - v).abs() < 1e-13 * (1.0 + v.abs()));
            }
        }
    }
}

#[test]
fn repulsive_state_properties() {
    let s = RepulsiveState::new(1, 0).unwrap();
    let slater = GroundStateCoefficients::new(1.0, 4).unwrap();
    let exact = ExactState::new(1.0, 0).unwrap();
    for i in 0..41 {
        for j in 0..41 {
            let (a, b) = (-4.0 + 0.2 * i as f64, -4.0 + 0.2 * j as f64);
            let v = s.eval(a, b).unwrap();
            assert!((v - slater.eval_fermionic(a, b)).abs() < 1e-10);
            assert!((v - exact.eval(a, b).unwrap()).abs() < 1e-10);
        }
    }
    for &(l, n) in &[(1, 0), (3, 2), (5, 1)] {
        let st = RepulsiveState::new(l, n).unwrap();
        let norm = integrate_sym(|a, b| st.eval(a, b).unwrap().powi(2), 10.0, 14.0, 16);
        assert!((norm - 1.0).abs() < 1e-7, "({l},{n}) norm {norm}");
    }
}

#[test]
fn attractive_state_properties() {
    let approx = AttractiveState::new(-10.0, 0).unwrap();
    let exact = ExactState::new(-10.0, 0).unwrap();
    let ov = integrate_sym(|a, b| approx.eval(a, b).unwrap() * exact.eval(a, b).unwrap(), 10.0, 6.0, 48);
    assert!(ov * ov > 0.99, "overlap {}", ov * ov);

    let deep = AttractiveState::new(-20.0, 0).unwrap();
    let norm = integrate_sym(|a, b| deep.eval(a, b).unwrap().powi(2), 10.0, 6.0, 48);
    assert!((norm - 1.0).abs() < 1e-4, "norm {norm}");

    let h = 1e-7;
    let p0 = deep.eval(0.0, 0.0).unwrap();
    let slope = (deep.eval(h / 2.0, -h / 2.0).unwrap() - p0) / h;
    assert!((slope / p0 + 20f64.sqrt()).abs() < 1e-6 * 20f64.sqrt() + 1e-5, "cusp {}", slope / p0);
}

#[test]
fn contact_behavior() {
    let gs = GroundStateCoefficients::new(1.0, 10).unwrap();
    for i in 0..20 {
        let x = -3.0 + 0.3 * i as f64;
        assert_eq!(gs.eval_fermionic(x, x), 0.0);
        assert_eq!(eval_psi_repulsive(x, x, 1, 0).unwrap(), 0.0);
        assert!(eval_psi_exact(x, x, -0.5, 0).unwrap() > 0.0);
    }
}

#[test]
fn truncated_sums_converge_away_from_contact() {
    // pointwise the expansions converge only algebraically, slowest on x1 = x2
    for &l in &[-3.0, -1.0, 0.3, 0.8] {
        let ex = ExactState::new(l, 0).unwrap();
        let off_err = |n: usize| {
            let gs = GroundStateCoefficients::new(l, n).unwrap();
            let (mut eb, mut ef) = (0f64, 0f64);
            for i in 0..41 {
                for j in 0..41 {
                    let (a, b) = (-4.0 + 0.2 * i as f64, -4.0 + 0.2 * j as f64);
                    if (a - b).abs() < 0.5 {
                        continue;
                    }
                    let w = ex.eval(a, b).unwrap();
                    eb = eb.max((gs.eval_bosonic(a, b) - w).abs());
                    ef = ef.max((gs.eval_fermionic(a, b) - w).abs());
                }
            }
            (eb, ef)
        };
        let (b60, f60) = off_err(60);
        let (b200, f200) = off_err(200);
        assert!(b200 < 0.5 * b60 && f200 < 0.7 * f60, "lambda {l}: {b60} {b200} {f60} {f200}");
        assert!(b60 < 1e-2, "lambda {l}: bosonic off-contact error {b60}");
    }
}

#[test]
fn policy_escalates_and_flags() {
    let gs = GroundStateCoefficients::with_policy(-2.0, TruncationPolicy::default()).unwrap();
    assert_eq!(gs.n_max, 200);
    assert!(!gs.converged);
    // the Gaussian needs no permanents but many Slater-like terms
    let free = GroundStateCoefficients::with_policy(0.0, TruncationPolicy::default()).unwrap();
    assert_eq!(free.norm_defect_bosonic, 0.0);
    assert!(free.norm_defect_fermionic > 1e-8 && !free.converged);
    let fixed = GroundStateCoefficients::with_policy(-2.0, TruncationPolicy::fixed(30)).unwrap();
    assert_eq!(fixed.n_max, 30);
}

#[test]
fn pair_size_definition() {
    assert!((pair_size(0.0, PairSizeDefinition::Rms).unwrap() - 1.0).abs() < 1e-10);
    let deep = pair_size(-20.0, PairSizeDefinition::Rms).unwrap();
    assert!((deep - 1.0 / 40f64.sqrt()).abs() < 0.02 * deep, "{deep}");
    let mut prev = 0.0;
    for i in 0..20 {
        let l = -20.0 + (0.9 + 20.0) * i as f64 / 19.0;
        let s = pair_size(l, PairSizeDefinition::Rms).unwrap();
        assert!(s > prev, "not increasing at {l}");
        prev = s;
    }
    assert!(pair_size(1.5, PairSizeDefinition::Rms).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exact_state_exchange_symmetry(a in -6.0f64..6.0, b in -6.0f64..6.0, l in -8.0f64..0.99, n in 0usize..4) {
        let s = ExactState::new(l, n).unwrap();
        prop_assert_eq!(s.eval(a, b).unwrap(), s.eval(b, a).unwrap());
    }

    #[test]
    fn expansions_respect_exchange_and_parity(a in -4.0f64..4.0, b in -4.0f64..4.0) {
        let gs = GroundStateCoefficients::new(-0.7, 20).unwrap();
        prop_assert!((gs.eval_bosonic(a, b) - gs.eval_bosonic(b, a)).abs() < 1e-14);
        prop_assert!((gs.eval_fermionic(a, b) - gs.eval_fermionic(b, a)).abs() < 1e-14);
        prop_assert!((gs.eval_bosonic(-a, -b) - gs.eval_bosonic(a, b)).abs() < 1e-13);
        prop_assert!((gs.eval_fermionic(-a, -b) - gs.eval_fermionic(a, b)).abs() < 1e-13);
    }
}

#[test]
fn near_hard_core_limit_is_continuous() {
    let v = coeff_cs(0, 0, 1.0 - 1e-6).unwrap();
    assert!((v - 1.0).abs() < 1e-5);
    let s = SQRT_2 * coeff_cp(1, 0, -1.0).unwrap() / SQRT_2;
    assert!((s + coeff_c(1, -1.0).unwrap()).abs() < 1e-15);
}
