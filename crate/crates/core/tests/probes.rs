mod common;

use common::sech_wave;
use solwave::probes::{
    infimum_from_ansatz, infimum_from_records, interpolation_exponent, probe_commutator_decay,
    probe_gamma_upper, probe_nonlinear_bound, probe_scaling_laws, probe_smoothness,
    probe_subadditivity, tail_mass, Cutoff, SweepRecord,
};
use solwave::solver::{continuation_sweep, solve, suggest_grid, SolveConfig};
use solwave::spectral::{make_grid, Field, Symbol};

#[test]
fn gamma_below_one() {
    assert!((interpolation_exponent(2.0, 0.0).unwrap() - 0.75).abs() < 1e-15);
    for (s, r) in [
        (1.5, 0.2),
        (0.6, -0.6),
        (1.0, -0.5),
        (3.0, 1.5),
        (0.3, -2.0),
    ] {
        let g = interpolation_exponent(s, r).unwrap();
        assert!(g > 0.0 && g < 1.0, "({s}, {r}) -> {g}");
    }
    assert!(interpolation_exponent(0.5, 0.0).is_err());
}

#[test]
fn nonlinear_bound_stable_under_band_doubling() {
    for (s, r) in [(2.0, 0.0), (1.5, 0.2), (0.6, -0.6)] {
        let rep = probe_nonlinear_bound(s, r, 2000, 11).unwrap();
        assert!(rep.stable, "({s}, {r}): {:?} {:?}", rep.base, rep.doubled);
        assert_eq!(rep.base.count, 2000);
    }
    let a = probe_nonlinear_bound(2.0, 0.0, 200, 3).unwrap();
    let b = probe_nonlinear_bound(2.0, 0.0, 200, 3).unwrap();
    assert_eq!(a.base.max, b.base.max);
}

#[test]
fn ansatz_energy_below_mass() {
    let grid = make_grid(2000.0, 2048).unwrap();
    let thetas: Vec<f64> = (1..60)
        .map(|i| 0.01 * 1.08f64.powi(i))
        .filter(|t| *t < 1.0)
        .collect();
    for (s, r) in [(2.0, 0.0), (1.2, 0.1), (0.6, -0.6)] {
        let rep =
            probe_gamma_upper(0.1, &thetas, &grid, &Symbol::bessel(s), &Symbol::bessel(r)).unwrap();
        assert!(rep.below_mu, "({s}, {r})");
    }
}

#[test]
fn infimum_ratio_of_sech_family() {
    let mut cfg = SolveConfig::bessel(2.0, 0.0, 0.05, suggest_grid(2.0, 0.05).unwrap());
    cfg.continuation = vec![0.05, 0.1, 0.2, 0.4];
    let records: Vec<SweepRecord> = continuation_sweep(&cfg)
        .unwrap()
        .iter()
        .filter_map(|e| e.record(&cfg))
        .collect();
    let rep = infimum_from_records(&records).unwrap();
    assert!(rep.passed());
    // E = mu - mu^3 / 12 on the sech branch
    assert!((rep.kappa - 1.0 / 12.0).abs() < 1e-3, "{}", rep.kappa);

    let ans = infimum_from_ansatz(
        &[0.02, 0.05, 0.1, 0.2],
        0.4,
        &Symbol::bessel(2.0),
        &Symbol::bessel(0.0),
    )
    .unwrap();
    assert!(ans.passed());
    assert!(ans.kappa < rep.kappa);
}

#[test]
fn subadditivity_margin() {
    let base = SolveConfig::bessel(2.0, 0.0, 0.4, suggest_grid(2.0, 0.4).unwrap());
    let rows = probe_subadditivity(0.4, &[0.1, 0.2, 0.3], &base).unwrap();
    for row in &rows {
        assert!(row.conclusive);
        assert!(row.defect < -1e-4, "{row:?}");
        // sech branch: G(m) = m - m^3 / 12
        let g = |m: f64| m - m.powi(3) / 12.0;
        assert!((row.defect - (g(0.4) - g(row.lambda) - g(0.4 - row.lambda))).abs() < 1e-6);
    }
    assert!(probe_subadditivity(0.4, &[0.5], &base).is_err());
}

#[test]
fn commutator_decays_for_sech_pair() {
    let g = make_grid(400.0, 4096).unwrap();
    let u = Field::from_fn(&g, |x| 1.0 / x.cosh());
    let v = Field::from_fn(&g, |x| 1.0 / (0.5 * x).cosh());
    let rows =
        probe_commutator_decay(&u, &v, -0.5, &[5.0, 10.0, 20.0, 40.0], Cutoff::Gaussian).unwrap();
    assert!(rows.windows(2).all(|w| w[1].value < w[0].value));
    assert!(rows[3].value < rows[0].value / 10.0);
    // the same-function pair collapses by self-adjointness
    let same = probe_commutator_decay(&u, &u, -0.5, &[5.0, 10.0], Cutoff::Gaussian).unwrap();
    assert!(same.iter().all(|r| r.value <= 1e-15));
    assert!(probe_commutator_decay(&u, &v, -0.5, &[60.0], Cutoff::Gaussian).is_err());
}

#[test]
fn computed_waves_are_smooth() {
    for (s, r, mu) in [(2.0, 0.0, 0.2), (0.6, -0.6, 0.1), (1.2, 0.1, 0.4)] {
        let mut cfg = SolveConfig::bessel(s, r, mu, suggest_grid(s, mu).unwrap());
        cfg.auto_grid = true;
        let sol = solve(&cfg).unwrap();
        assert!(sol.converged());
        let rep = probe_smoothness(&sol.u);
        assert!(!rep.flagged, "({s}, {r}, {mu}): {rep:?}");
        assert!(rep.top_band_ratio <= 1e-10);
        assert!(rep.fit.r_squared >= 0.99);
    }
}

#[test]
fn scaling_needs_enough_records() {
    let recs: Vec<SweepRecord> = [0.01, 0.1]
        .iter()
        .map(|&mu| SweepRecord {
            mu,
            nu: 1.0 - mu * mu / 4.0,
            h_half_s_norm: mu.sqrt(),
            sup_norm: mu,
            nval: mu.powi(3),
            eval: mu,
            residual_l2: 0.0,
            tail_mass: 0.0,
            converged: true,
        })
        .collect();
    let err = probe_scaling_laws(&recs).unwrap_err().to_string();
    assert!(err.contains("at least"));
}

#[test]
fn tail_mass_of_localized_wave() {
    let g = make_grid(200.0, 1024).unwrap();
    assert!(tail_mass(&sech_wave(&g, 1.0)) < 1e-15);
    assert!(tail_mass(&sech_wave(&g, 0.05)) > 1e-4);
}
