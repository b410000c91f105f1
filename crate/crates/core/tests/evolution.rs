mod common;

use common::{sech_speed, sech_wave};
use num_complex::Complex64;
use solwave::evolution::{
    evolve, linear_propagator, stability_ceiling, traveling_frame_error, EvolveConfig,
};
use solwave::solver::{solve, suggest_grid, SolveConfig};
use solwave::spectral::{make_grid, shift, Field, Symbol};

fn bessel(dt: f64, t_final: f64) -> EvolveConfig {
    EvolveConfig {
        dt,
        t_final,
        disp: Symbol::bessel(2.0),
        nl: Symbol::bessel(0.0),
        record_every: usize::MAX,
    }
}

#[test]
fn propagator_factors() {
    let g = make_grid(2.0 * std::f64::consts::PI, 32).unwrap();
    let f = linear_propagator(0.1, &Symbol::bessel(2.0), &g).unwrap();
    assert!(f.iter().all(|z| (z.norm() - 1.0).abs() <= 1e-15));
    assert_eq!(f[0], Complex64::new(1.0, 0.0));
    assert!((f[1] - Complex64::from_polar(1.0, -0.2)).norm() < 1e-15);
    assert!(linear_propagator(0.0, &Symbol::bessel(2.0), &g).is_err());
}

#[test]
fn zero_data_stays_zero() {
    let g = make_grid(40.0, 64).unwrap();
    let mut cfg = bessel(0.05, 1.0);
    cfg.record_every = 5;
    let tr = evolve(&Field::zeros(&g), &cfg).unwrap();
    assert!(tr.snapshots.iter().all(|(_, u)| u.sup_norm() == 0.0));
    let times: Vec<f64> = tr.snapshots.iter().map(|s| s.0).collect();
    assert!(times.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(times[0], 0.0);
    assert!((times.last().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn sech_wave_conserves_mass_and_energy() {
    let g = make_grid(160.0, 256).unwrap();
    let u0 = sech_wave(&g, 0.4);
    let mut cfg = bessel(1e-3, 50.0);
    cfg.record_every = 1000;
    let tr = evolve(&u0, &cfg).unwrap();
    assert_eq!(tr.conservation.len(), 51);
    assert!(tr.mass_drift() <= 1e-10, "{}", tr.mass_drift());
    assert!(tr.energy_drift() <= 1e-8, "{}", tr.energy_drift());
}

#[test]
fn exact_wave_travels_at_its_speed() {
    let g = make_grid(160.0, 256).unwrap();
    let u0 = sech_wave(&g, 0.4);
    let nu = sech_speed(0.4);
    let cfg = bessel(0.01, 25.0);
    let err = traveling_frame_error(&u0, nu, 25.0, &cfg).unwrap();
    assert!(err <= 1e-5, "{err}");
    let wrong = traveling_frame_error(&u0, nu + 0.1, 25.0, &cfg).unwrap();
    assert!(wrong >= 10.0 * err);
    assert_eq!(traveling_frame_error(&u0, nu, 0.0, &cfg).unwrap(), 0.0);
}

#[test]
fn fourth_order_convergence() {
    let grid = suggest_grid(2.0, 0.4).unwrap();
    let mut scfg = SolveConfig::bessel(2.0, 0.0, 0.4, grid);
    scfg.tol_residual = 1e-12;
    scfg.auto_grid = true;
    let sol = solve(&scfg).unwrap();
    let t_final = 10.0;
    let exact = shift(&sol.u, sol.nu * t_final);
    let errors: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
        .iter()
        .map(|&dt| {
            let tr = evolve(&sol.u, &bessel(dt, t_final)).unwrap();
            tr.final_state().sub(&exact).l2_norm()
        })
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((8.0..=32.0).contains(&ratio), "{errors:?}");
    }
}

#[test]
fn default_step_respects_ceiling() {
    let g = make_grid(160.0, 256).unwrap();
    let u0 = sech_wave(&g, 0.4);
    let cfg = EvolveConfig::for_field(&u0, Symbol::bessel(2.0), Symbol::bessel(0.0), 1.0);
    let ceiling = stability_ceiling(&u0, &Symbol::bessel(0.0));
    assert!((cfg.dt - 0.1 * ceiling).abs() <= 1e-15 * ceiling);
    assert!(stability_ceiling(&Field::zeros(&g), &Symbol::bessel(0.0)).is_infinite());
}

#[test]
fn trajectory_files() {
    let g = make_grid(40.0, 64).unwrap();
    let u0 = sech_wave(&g, 1.0);
    let mut cfg = bessel(0.01, 0.5);
    cfg.record_every = 10;
    let tr = evolve(&u0, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    tr.write(dir.path(), serde_json::json!({ "dt": 0.01 }))
        .unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), tr.snapshots.len());
    assert_eq!(manifest["Q_series"].as_array().unwrap().len(), files.len());
    let first = std::fs::read_to_string(dir.path().join(files[0].as_str().unwrap())).unwrap();
    assert_eq!(first.lines().count(), 65);
}
