use holeqd::dqd::SweepRow;
use holeqd::gate::*;
use holeqd::linalg::hermitian_eigen;
use holeqd::units::HBAR_UEV_NS;
use holeqd::Exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn operating_point_exchange_and_gate_time() {
    let p = GateParams::default();
    let j = exchange(&p).unwrap();
    assert!((j - 0.293).abs() < 1e-3, "{j}");
    let t = cz_gate_time(&p).unwrap();
    assert!((t.t_cz_ns - 7.05).abs() < 0.02 * 7.05, "{}", t.t_cz_ns);
    assert!((t.conditional_phase_rad - PI).abs() < 0.01 * PI);
    let cal = calibrated_cz_duration(&p).unwrap();
    assert!((cal - t.t_cz_ns).abs() < 0.01 * t.t_cz_ns);
}

#[test]
fn zero_coupling_spectrum_is_the_diagonal() {
    let p = GateParams {
        t_c_uev: 0.0,
        ..GateParams::default()
    };
    let mut want = vec![500.0, 50.0, -50.0, -500.0, 11_000.0, 11_000.0];
    want.sort_by(f64::total_cmp);
    let e = hermitian_eigen(&build_h0(&p).unwrap()).values;
    for (a, b) in e.iter().zip(&want) {
        assert!((a - b).abs() < 1e-9);
    }
    assert_eq!(exchange(&p).unwrap(), 0.0);
}

#[test]
fn middle_levels_shift_down_by_half_j() {
    let p = GateParams::default();
    let j = exchange(&p).unwrap();
    let e = computational_eigenvalues(&p).unwrap();
    let e0 = computational_eigenvalues(&GateParams { t_c_uev: 0.0, ..p }).unwrap();
    for i in [1, 2] {
        let shift = e[i] - e0[i];
        assert!((shift + j / 2.0).abs() < 0.01 * j, "{shift} vs {}", -j / 2.0);
    }
    let h = build_h0(&p).unwrap();
    let tr: f64 = (0..6).map(|i| h[(i, i)].re).sum();
    assert!((tr - 22_000.0).abs() < 1e-9);
}

#[test]
fn inner_block_closed_form() {
    let p = GateParams::default();
    let eff = effective_h(&p).unwrap();
    let (j, dez) = (eff.j_uev, 100.0);
    let e = hermitian_eigen(&eff.matrix).values;
    let r = 0.5 * (dez * dez + j * j).sqrt();
    let mut want = vec![-500.0, 500.0, -j / 2.0 - r, -j / 2.0 + r];
    want.sort_by(f64::total_cmp);
    // spin-resolved denominators differ from the closed form at order J ΔE_z / U
    for (a, b) in e.iter().zip(&want) {
        assert!((a - b).abs() < j * dez / 11_000.0, "{a} vs {b}");
    }
    assert!(eff.warnings.is_empty());
    let strong = effective_h(&GateParams { t_c_uev: 800.0, ..p }).unwrap();
    assert_eq!(strong.warnings.len(), 1);
}

#[test]
fn schrieffer_wolff_matches_exact_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let u1: f64 = rng.random_range(4.0..15.0);
        let u2: f64 = rng.random_range(4.0..15.0);
        let umin = u1.min(u2) * 1e3;
        let p = GateParams {
            t_c_uev: rng.random_range(0.0..0.02) * umin,
            u1_mev: u1,
            u2_mev: u2,
            epsilon_uev: rng.random_range(-0.2..0.2) * umin,
            e_z_mev: rng.random_range(0.5..2.0),
            de_z_mev: rng.random_range(0.05..0.3),
            ..GateParams::default()
        };
        let exact = computational_eigenvalues(&p).unwrap();
        let mut eff = hermitian_eigen(&effective_h(&p).unwrap().matrix).values;
        eff.sort_by(f64::total_cmp);
        let tol = 5.0 * p.t_c_uev.powi(3) / umin.powi(2);
        for (a, b) in exact.iter().zip(&eff) {
            assert!((a - b).abs() <= tol.max(1e-9), "{p:?}: {a} vs {b} (tol {tol})");
        }
    }
    // Operating point discrepancy well under 0.01 μeV.
    let p = GateParams::default();
    let exact = computational_eigenvalues(&p).unwrap();
    let eff = hermitian_eigen(&effective_h(&p).unwrap().matrix).values;
    assert!(exact.iter().zip(&eff).all(|(a, b)| (a - b).abs() < 0.01));
}

#[test]
fn energies_scale_homogeneously() {
    let p = GateParams::default();
    let e = hermitian_eigen(&build_h0(&p).unwrap()).values;
    let t = cz_gate_time(&p).unwrap().t_cz_ns;
    for s in [0.5, 3.0] {
        let q = p.scaled(s);
        let es = hermitian_eigen(&build_h0(&q).unwrap()).values;
        for (a, b) in e.iter().zip(&es) {
            assert!((a * s - b).abs() < 1e-9 * b.abs().max(1.0));
        }
        let ts = cz_gate_time(&q).unwrap().t_cz_ns;
        assert!((t / ts - s).abs() < 1e-12 * s);
    }
}

#[test]
fn wkb_is_log_linear_in_spacing() {
    let m = WkbModel::ge();
    let v = 0.025;
    let l: Vec<f64> = (0..8).map(|i| 10.0 + 4.0 * i as f64).collect();
    let y: Vec<f64> = l.iter().map(|&l| wkb_tc(&m, l, v).unwrap().ln()).collect();
    let fit = holeqd::linalg::linear_fit(&l, &y).unwrap();
    let k = m.kappa(v).unwrap();
    assert!(((fit.slope + k) / k).abs() < 1e-10);
    let ratio = WkbModel::si().kappa(v).unwrap() / k;
    assert!((ratio - (0.24f64 / 0.058).sqrt()).abs() < 1e-12);
}

fn synthetic_rows(m: &WkbModel, ls: &[f64], vs_mv: &[f64]) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for &l in ls {
        for &v in vs_mv {
            rows.push(SweepRow {
                l_s_nm: l,
                v_bg_mv: v,
                t_c_uev: Some(wkb_tc(m, l, v * 1e-3).unwrap()),
                error: None,
            });
        }
    }
    rows
}

#[test]
fn fit_recovers_synthetic_parameters() {
    let truth = WkbModel {
        t0_mev: 9.0,
        e_b0_mev: 43.0,
        beta: 0.42,
        m_star: 0.058,
    };
    let rows = synthetic_rows(&truth, &[20.0, 25.0, 30.0, 35.0, 40.0, 45.0], &[0.0, 20.0, 40.0]);
    let template = WkbModel::ge();
    let f = fit_wkb(&template, &rows, FitWindow::default()).unwrap();
    for (got, want) in [(f.model.t0_mev, 9.0), (f.model.e_b0_mev, 43.0), (f.model.beta, 0.42)] {
        assert!(((got - want) / want).abs() < 0.01, "{got} vs {want}");
    }
    assert!(f.max_abs_ln_residual < 1e-6);
}

#[test]
fn fit_rejects_non_monotone_data() {
    let mut rows = synthetic_rows(&WkbModel::ge(), &[20.0, 25.0, 30.0, 35.0], &[0.0, 20.0]);
    rows[2].t_c_uev = Some(1e4);
    assert!(matches!(
        fit_wkb(&WkbModel::ge(), &rows, FitWindow::default()),
        Err(holeqd::Error::FitRejected(_))
    ));
}

#[test]
fn crossovers_at_forty_millivolts() {
    let p = GateParams::default();
    let ge = crossover_spacing(&WkbModel::ge(), &p, 0.040, 10.0).unwrap();
    let si = crossover_spacing(&WkbModel::si(), &p, 0.040, 10.0).unwrap();
    assert!((ge - 37.0).abs() <= 3.0, "{ge}");
    assert!((si - 13.0).abs() <= 2.0, "{si}");
    assert!(cz_time_at(&WkbModel::ge(), &p, ge - 1.0, 0.040).unwrap() < 10.0);
    assert!(cz_time_at(&WkbModel::ge(), &p, ge + 1.0, 0.040).unwrap() > 10.0);
}

#[test]
fn exchange_slope_steepens_with_spacing() {
    let (m, p) = (WkbModel::ge(), GateParams::default());
    let at30 = exchange_slope(&m, &p, 30.0, (0.0, 0.040)).unwrap();
    assert!((at30.inverse_slope_mv_per_dec - 20.0).abs() <= 6.0, "{}", at30.inverse_slope_mv_per_dec);
    let rel = (at30.midpoint_numeric_dec_per_mv - at30.midpoint_analytic_dec_per_mv) / at30.midpoint_analytic_dec_per_mv;
    assert!(rel.abs() < 0.05);
    let slopes: Vec<f64> = [20.0, 25.0, 30.0, 35.0, 40.0]
        .iter()
        .map(|&l| exchange_slope(&m, &p, l, (0.0, 0.040)).unwrap().log_slope_dec_per_mv)
        .collect();
    assert!(slopes.windows(2).all(|w| w[1] > w[0]), "{slopes:?}");
}

#[test]
fn variability_statistics() {
    let (m, p) = (WkbModel::ge(), GateParams::default());
    let spec = VariabilitySpec::default();
    let a = variability_mc(&m, &p, 35.0, 0.040, &spec, Exec::Parallel).unwrap();
    let b = variability_mc(&m, &p, 35.0, 0.040, &spec, Exec::Sequential).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.n_accepted, 10_000);
    assert!((a.ln_tcz_std / a.ln_tc_std - 2.0).abs() < 0.05 * 2.0);
    assert!((a.ln_tc_std - a.analytic_ln_tc_sensitivity).abs() < 0.05 * a.analytic_ln_tc_sensitivity);
    assert_eq!(a.histogram.iter().map(|h| h.count).sum::<usize>(), 10_000);
    let zero = VariabilitySpec {
        sigma_ls_nm: 0.0,
        ..spec
    };
    let z = variability_mc(&m, &p, 35.0, 0.040, &zero, Exec::Parallel).unwrap();
    assert_eq!(z.t_norm_std, 0.0);
    assert!((z.t_cz_median_ns - z.t_cz_nominal_ns).abs() < 1e-12);
}

#[test]
fn conditional_phase_grows_as_j_t() {
    let p = GateParams::default();
    let j = exchange(&p).unwrap();
    let prop = holeqd::linalg::SpectralPropagator::new(&build_h0(&p).unwrap(), HBAR_UEV_NS);
    let t = 0.25 * PI * HBAR_UEV_NS / j;
    let phi = conditional_phase(&computational_block(&prop.unitary(t)));
    assert!((phi - 0.25 * PI).abs() < 0.01 * PI);
}
