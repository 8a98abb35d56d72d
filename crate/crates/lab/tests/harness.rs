use std::path::{Path, PathBuf};
use std::process::Command;

use korteweg_core::ek_solver::{Boundary, Sources};
use korteweg_core::{ConservedState, FluidModel};
use korteweg_lab::config::Config;
use korteweg_lab::csv_out::{format_g17, write_table, Cell};
use korteweg_lab::diagnostics::{consistency_error, count_maxima, relative_entropy_series, wave_train, DiagnosticsSeries};
use korteweg_lab::nondim::{liu_gollub_nondimensionalize, NondimInputs};
use korteweg_lab::scenario::{ktest, ktest_scenario, liu_gollub_scenario, DtRule};
use proptest::prelude::*;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn c_format(x: f64) -> String {
    let mut buf = [0u8; 64];
    let fmt = b"%.17g\0";
    // SAFETY: the buffer is large enough for any %.17g rendering and both strings are NUL-terminated
    let n = unsafe { libc::snprintf(buf.as_mut_ptr().cast(), buf.len(), fmt.as_ptr().cast(), x) };
    String::from_utf8(buf[..n as usize].to_vec()).unwrap()
}

#[test]
fn g17_matches_known_renderings() {
    for (x, s) in [
        (0.1, "0.10000000000000001"),
        (1.0, "1"),
        (-2.5, "-2.5"),
        (1e-5, "1.0000000000000001e-05"),
        (1e17, "1e+17"),
        (1e16, "10000000000000000"),
        (0.0001, "0.0001"),
        (0.0, "0"),
        (1.5e300, "1.5000000000000001e+300"),
    ] {
        assert_eq!(format_g17(x), s);
        assert_eq!(c_format(x), s);
    }
}

proptest! {
    #[test]
    fn g17_agrees_with_the_c_library(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        prop_assume!(x.is_finite());
        prop_assert_eq!(format_g17(x), c_format(x));
    }

    #[test]
    fn g17_round_trips(x in any::<f64>()) {
        prop_assume!(x.is_finite());
        prop_assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
    }
}

#[test]
fn csv_has_a_header_and_lf_endings() {
    let mut buf = Vec::new();
    let rows = vec![vec![Cell::from(0.1), Cell::from(3usize), Cell::from("lf")], vec![Cell::from(-1e-20), Cell::from(0usize), Cell::from("a,b")]];
    write_table(&mut buf, &["x", "k", "name"], &rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text, "x,k,name\n0.10000000000000001,3,lf\n-9.9999999999999995e-21,0,\"a,b\"\n");
    assert!(write_table(Vec::new(), &["x"], &[vec![Cell::from(1.0), Cell::from(2.0)]]).is_err());
}

#[test]
fn example_configs_round_trip() {
    let mut seen = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = Config::load(&path).unwrap();
        let again = Config::parse(&cfg.to_text().unwrap()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 4);
}

#[test]
fn unknown_keys_are_rejected() {
    assert!(Config::parse("[scenario]\nkind = \"ktest\"\nbogus = 1\n").is_err());
    assert!(Config::parse("[nonsense]\n").is_err());
}

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["lf", "mlf", "rusanov", "hll", "econs"]).prop_map(String::from)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_configs_round_trip(
        dx in prop::option::of(1e-5f64..1.0),
        dt in prop::option::of(1e-9f64..1.0),
        end in prop::option::of(0.01f64..100.0),
        times in prop::option::of(prop::collection::vec(0.0f64..1.0, 0..5)),
        flux in name(),
        enforce_w in any::<bool>(),
        extra in 0.0f64..3.0,
        every in 1usize..100,
    ) {
        let text = format!("[scenario]\nkind = \"ktest\"\n[solver]\nflux = \"{flux}\"\ntemporal = \"be\"\n");
        let mut cfg = Config::parse(&text).unwrap();
        let s = cfg.scenario.as_mut().unwrap();
        s.dx = dx;
        s.dt = dt;
        s.end_time = end;
        s.snapshot_times = times;
        let solver = cfg.solver.as_mut().unwrap();
        solver.enforce_w = enforce_w;
        solver.extra_viscosity = extra;
        solver.diagnostics_every = every;
        let once = Config::parse(&cfg.to_text().unwrap()).unwrap();
        prop_assert_eq!(&once, &cfg);
        prop_assert_eq!(Config::parse(&once.to_text().unwrap()).unwrap(), once);
    }
}

#[test]
fn nondimensional_numbers() {
    let r = liu_gollub_nondimensionalize(&NondimInputs::reference()).unwrap();
    let close = |a: f64, b: f64, tol: f64| (a - b).abs() <= tol * b.abs();
    assert!(close(r.nusselt.h_n, 1.28e-3, 0.01));
    assert!(close(r.nusselt.froude_sq, 0.723, 0.01));
    assert!(close(r.nusselt.u_n, 9.49e-2, 0.01));
    assert!(close(r.nusselt.t_n, 0.105, 0.01));
    assert!(close(r.nusselt.weber, 1.52, 0.01));
    assert!(close(r.formula.u_n, 0.142, 0.01));
    // the two velocity scales differ by exactly 3/2
    assert!(close(r.formula.u_n / r.nusselt.u_n, 1.5, 1e-12));
    assert!(close(r.nusselt.epsilon, r.nusselt.h_n / 0.01, 1e-15));
    let bad = NondimInputs { nu: -1.0, ..NondimInputs::reference() };
    assert!(liu_gollub_nondimensionalize(&bad).is_err());
}

#[test]
fn ktest_initial_data() {
    let sc = ktest_scenario(ktest::DEFAULT_DX, DtRule::Parabolic(120.0)).unwrap();
    assert_eq!(sc.initial.n_cells(), 3200);
    assert!((sc.dt - 7.5e-6).abs() < 1e-18);
    assert!((ktest::height(0.4) - 1.3e-3).abs() < 1e-15);
    assert!((ktest::height(0.0) - 1e-3).abs() < 1e-15);
    assert!((ktest::kappa() - 0.067 / 1134.0).abs() < 1e-20);
    assert!((sc.model.kappa(1e-3) - 5.908e-5).abs() < 1e-8);
    assert!(sc.initial.mom.iter().all(|m| *m == 0.0));
    let max = sc.initial.rho.iter().fold(0.0_f64, |m, x| m.max(*x));
    // 0.4 is an interface; the nearest centers sit half a cell away
    assert_eq!(max, ktest::height(0.4 + ktest::DEFAULT_DX / 2.0));
    // w starts consistent with h
    let err = consistency_error(&sc.model, &sc.initial).unwrap();
    assert!(!err.degenerate && err.max < 1e-14);
    assert!(sc.snapshot_times.iter().all(|t| (0.0..=sc.end_time).contains(t)));
}

#[test]
fn liu_gollub_initial_data() {
    let r = liu_gollub_nondimensionalize(&NondimInputs::reference()).unwrap();
    let sc = liu_gollub_scenario(&r.nusselt, 1.5, 200.0, 0.05).unwrap();
    assert_eq!(sc.initial.n_cells(), 4000);
    assert!(sc.initial.rho.iter().chain(&sc.initial.mom).all(|x| *x == 1.0));
    let Boundary::InletOutlet(forcing) = sc.initial.boundary else { panic!("inlet-outlet expected") };
    assert_eq!((forcing.freq, forcing.amp), (1.5, 0.03));
    // a quarter forcing period after start the inlet sits at its crest
    let quarter = 0.25 / (1.5 * r.nusselt.t_n);
    assert!((forcing.height(quarter) - 1.03).abs() < 1e-12);
    assert!(matches!(sc.sources, Sources::LiuGollub(_)));
    assert_eq!(sc.end_time, 2000.0);
    assert!(liu_gollub_scenario(&r.nusselt, 1.5, 200.0, -1.0).is_err());
}

#[test]
fn consistency_error_flags_a_flat_profile() {
    let model = FluidModel::shallow_water(9.8, 1e-4);
    let s = ConservedState::new(0.0, 1.0, vec![1.0; 8], vec![0.0; 8], vec![0.0; 8], Boundary::Periodic).unwrap();
    let e = consistency_error(&model, &s).unwrap();
    assert!(e.degenerate);
    assert!(e.per_cell.iter().all(|x| *x == 0.0));
}

#[test]
fn diagnostics_series_is_normalized_and_ordered() {
    let model = FluidModel::shallow_water(9.8, 1e-4);
    let mut s = ConservedState::new(0.0, 1.0, vec![1.0, 1.1, 1.0, 0.9], vec![0.0; 4], vec![0.0; 4], Boundary::Periodic).unwrap();
    let mut d = DiagnosticsSeries::default();
    d.record(&model, &s).unwrap();
    assert!(d.record(&model, &s).is_err());
    s.time = 1.0;
    s.rho[1] = 1.05;
    s.rho[3] = 0.95;
    d.record(&model, &s).unwrap();
    assert_eq!(d.relative_entropy[0], 1.0);
    assert!(d.relative_entropy[1] < 1.0);
    assert!(d.max_entropy_increase() < 0.0);
    let series = relative_entropy_series(&[(0.0, 2.0), (1.0, 1.0)]);
    assert_eq!(series, vec![(0.0, 1.0), (1.0, 0.5)]);
}

#[test]
fn wave_train_of_a_two_hump_profile() {
    use std::f64::consts::TAU;
    let dx = 0.05;
    let profile = |shift: f64| -> Vec<f64> {
        (0..2000)
            .map(|j| {
                let k = TAU * (j as f64 * dx - shift) / 10.0;
                1.0 + 0.2 * k.sin() + 0.15 * (2.0 * k).sin()
            })
            .collect()
    };
    let now = profile(0.0);
    let w = wave_train(&now, &profile(10.0), dx);
    assert!(w.period_distance < 1e-12);
    assert!((w.wavelength - 10.0).abs() <= dx, "{}", w.wavelength);
    assert!((w.maxima_per_wavelength - 2.0).abs() < 0.06, "{}", w.maxima_per_wavelength);
    let half = wave_train(&now, &profile(5.0), dx);
    assert!(half.period_distance > 0.5);
    assert_eq!(count_maxima(&[0.0, 1.0, 1.0, 0.0, 2.0, 0.0], 0.0), 2);
    assert_eq!(count_maxima(&[0.0, 1.0, 1.0 - 1e-12, 2.0], 1e-9), 0);
}

fn korteweg(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_korteweg")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn cli_nondim_prints_both_velocity_scales() {
    let (code, out, _) = korteweg(&["nondim", "--re", "29", "--nu", "6.28e-6", "--theta-deg", "6.4"]);
    assert_eq!(code, 0);
    assert!(out.contains("u_N,0.1423"));
    assert!(out.contains("0.0949"));
    assert!(out.lines().any(|l| l.starts_with("We,") && l.contains(",1.524")));
}

#[test]
fn cli_godunov_is_unstable_with_exit_zero() {
    let (code, out, _) = korteweg(&[
        "stability", "--scheme", "godunov", "--temporal", "fe", "--c-bar", "1", "--u-bar", "0.5", "--sigma-bar", "1", "--dx", "0.01",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("UNSTABLE"));
    let cfg = configs_dir().join("godunov.toml");
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = korteweg(&["stability", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("UNSTABLE"));
    let scan = std::fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert_eq!(scan.lines().count(), 1 + 2049);
}

#[test]
fn cli_usage_errors_exit_one() {
    assert_eq!(korteweg(&["frobnicate"]).0, 1);
    assert_eq!(korteweg(&["stability", "--scheme", "nope", "--temporal", "fe", "--c-bar", "1", "--u-bar", "0", "--sigma-bar", "1", "--dx", "0.1"]).0, 1);
    let cfg = configs_dir().join("ktest.toml");
    assert_eq!(korteweg(&["simulate", cfg.to_str().unwrap(), "--flux", "upwind"]).0, 1);
    assert_eq!(korteweg(&["simulate", "/nonexistent.toml"]).0, 1);
    // HLL has no viscosity form, so the entropy time step is undefined
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("hll.toml");
    std::fs::write(&bad, "[scenario]\nkind = \"ktest\"\ndx = 0.01\nend_time = 0.01\n[solver]\nflux = \"hll\"\ntemporal = \"fe\"\ndt_rule = \"entropy_cfl\"\n").unwrap();
    assert_eq!(korteweg(&["simulate", bad.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]).0, 1);
    assert_eq!(korteweg(&["--help"]).0, 0);
}

#[test]
fn cli_numerical_failure_exits_two() {
    // an explicit centered step far beyond any stability limit
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("blowup.toml");
    std::fs::write(&cfg, "[scenario]\nkind = \"ktest\"\ndx = 0.005\ndt = 0.05\nend_time = 5.0\n[solver]\nflux = \"econs\"\ntemporal = \"fe\"\n").unwrap();
    let (code, _, err) = korteweg(&["simulate", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("density"), "{err}");
}

#[test]
fn cli_simulate_is_deterministic() {
    let cfg = configs_dir().join("ktest.toml");
    let run = |dir: &Path| {
        let (code, out, err) = korteweg(&[
            "simulate", cfg.to_str().unwrap(), "--out-dir", dir.to_str().unwrap(), "--dx", "0.005", "--end-time", "0.05",
        ]);
        assert_eq!(code, 0, "{err}");
        out
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(a.path());
    run(b.path());
    let index = std::fs::read_to_string(a.path().join("snapshots.csv")).unwrap();
    assert_eq!(index, "index,time,file\n0,0.050000000000000003,snapshot_000.csv\n");
    for name in ["snapshots.csv", "snapshot_000.csv", "diagnostics.csv"] {
        let (x, y) = (std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
        assert_eq!(x, y, "{name}");
        assert!(!x.contains(&b'\r'));
    }
    let snapshot = std::fs::read_to_string(a.path().join("snapshot_000.csv")).unwrap();
    assert!(snapshot.starts_with("x,rho,mom,srw,u,w\n"));
    assert_eq!(snapshot.lines().count(), 1 + 160);
}

#[test]
fn cli_original_formulation_and_hamiltonian_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("ktest.toml");
    let (code, _, err) = korteweg(&[
        "simulate", cfg.to_str().unwrap(), "--original", "--flux", "lf", "--dx", "0.005", "--end-time", "0.02", "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let ham = configs_dir().join("ktest_hamiltonian.toml");
    let (code, out, err) = korteweg(&[
        "hamiltonian", ham.to_str().unwrap(), "--dx", "0.01", "--end-time", "0.02", "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("zone_width"));
    let h = std::fs::read_to_string(dir.path().join("hamiltonian.csv")).unwrap();
    assert!(h.starts_with("time,h,h_weighted,momentum\n"));
}

#[test]
fn cli_cfl_table_reports_zero_for_godunov() {
    let (code, out, _) = korteweg(&["cfl", "--c-bar", "1", "--u-bar", "0.5", "--sigma-bar", "1", "--dx", "0.01", "--n-xi", "513"]);
    assert_eq!(code, 0);
    let row = out.lines().find(|l| l.contains(",godunov,")).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!((fields[6], fields[7], fields[8]), ("0", "0", "never_stable"));
    let (code, out, _) = korteweg(&["cfl", "--random-setups", "2", "--seed", "5", "--n-xi", "257"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 2 * 6);
}
