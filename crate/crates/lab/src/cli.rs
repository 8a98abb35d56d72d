//! The `korteweg` command line.
//!
//! Exit codes: 0 success (including an "UNSTABLE" verdict), 1 usage or
//! configuration error, 2 numerical failure (positivity, Newton).

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use korteweg_core::vn_stability::{
    cfl_bound_closed_form, critical_dt_bisection, scan, verdict, CriticalStatus, LinearizedSetup, SpatialScheme,
    TemporalScheme, DEFAULT_SCAN_POINTS,
};
use korteweg_core::Error;
use rand::{Rng, SeedableRng};

use crate::config::{parse_stepper, Config, ScenarioSection, SolverSection, StabilitySection};
use crate::csv_out::{write_table, write_table_file, Cell};
use crate::nondim::{compare_with_quoted, liu_gollub_nondimensionalize, NondimInputs};
use crate::runner::{run, run_hamiltonian, write_hamiltonian, write_run, RunOptions};

#[derive(Parser, Debug)]
#[command(name = "korteweg", version, about = "Euler–Korteweg schemes: stability analysis and simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Von Neumann scan of one linearized scheme.
    Stability(StabilityArgs),
    /// Finite-volume run of a scenario file.
    Simulate(SimulateArgs),
    /// Hamiltonian run of a periodic scenario.
    Hamiltonian(HamiltonianArgs),
    /// Closed-form CFL bounds against bisection on the scan.
    Cfl(CflArgs),
    /// Falling-film scales.
    Nondim(NondimArgs),
}

#[derive(Args, Debug)]
struct SetupArgs {
    #[arg(long)]
    c_bar: Option<f64>,
    #[arg(long)]
    u_bar: Option<f64>,
    #[arg(long)]
    sigma_bar: Option<f64>,
    #[arg(long)]
    dx: Option<f64>,
}

#[derive(Args, Debug)]
struct StabilityArgs {
    #[command(flatten)]
    setup: SetupArgs,
    #[arg(long)]
    config: Option<PathBuf>,
    /// lf, mlf, rusanov, godunov, centered, muscl-lf, muscl-rusanov, muscl-centered
    #[arg(long)]
    scheme: Option<String>,
    /// fe, be, rk2, cn or theta=<x>
    #[arg(long)]
    temporal: Option<String>,
    /// Defaults to δx².
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    n_xi: Option<usize>,
    /// Writes scan.csv here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Scenario file (same as --config).
    file: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    end_time: Option<f64>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    flux: Option<String>,
    #[arg(long)]
    temporal: Option<String>,
    #[arg(long)]
    enforce_w: bool,
    /// Use the original-variable baseline scheme.
    #[arg(long)]
    original: bool,
}

#[derive(Args, Debug)]
struct HamiltonianArgs {
    #[command(flatten)]
    run: RunArgs,
    /// be, cn or avf
    #[arg(long)]
    stepper: Option<String>,
}

#[derive(Args, Debug)]
struct CflArgs {
    #[command(flatten)]
    setup: SetupArgs,
    /// fe, be, rk2, cn or theta=<x>
    #[arg(long, default_value = "fe")]
    temporal: String,
    /// Also evaluate this many random setups.
    #[arg(long, default_value_t = 0)]
    random_setups: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    rel_tol: f64,
    #[arg(long)]
    n_xi: Option<usize>,
    /// Writes cfl.csv here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NondimArgs {
    #[arg(long)]
    re: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    theta_deg: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
}

/// Failure classes mapped to exit codes.
fn exit_code(err: &anyhow::Error) -> i32 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(
            Error::Positivity { .. }
            | Error::NewtonDivergence { .. }
            | Error::SingularMatrix
            | Error::NonPositiveDensity { .. }
            | Error::SegmentVacuum,
        ) => 2,
        _ => 1,
    }
}

/// Runs the command line on `args` (program name first) and returns the exit code.
pub fn main_with(args: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Stability(a) => stability(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Hamiltonian(a) => hamiltonian_cmd(a, out),
        Command::Cfl(a) => cfl(a, out),
        Command::Nondim(a) => nondim(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code(&e)
        }
    }
}

fn parse_scheme(name: &str) -> Result<SpatialScheme> {
    SpatialScheme::parse(name).ok_or_else(|| anyhow!("unknown scheme `{name}`"))
}

fn parse_temporal(name: &str) -> Result<TemporalScheme> {
    TemporalScheme::parse(name).ok_or_else(|| anyhow!("unknown temporal scheme `{name}`"))
}

fn setup_from(args: &SetupArgs, file: Option<&StabilitySection>) -> Result<(LinearizedSetup, f64)> {
    let pick = |flag: Option<f64>, from_file: Option<f64>, name: &str| {
        flag.or(from_file).ok_or_else(|| anyhow!("missing --{name}"))
    };
    let c = pick(args.c_bar, file.map(|f| f.c_bar), "c-bar")?;
    let u = pick(args.u_bar, file.map(|f| f.u_bar), "u-bar")?;
    let s = pick(args.sigma_bar, file.map(|f| f.sigma_bar), "sigma-bar")?;
    let dx = pick(args.dx, file.map(|f| f.dx), "dx")?;
    if !(dx > 0.0) {
        bail!("--dx must be positive");
    }
    Ok((LinearizedSetup::from_parameters(c, u, s)?, dx))
}

fn stability(a: StabilityArgs, out: &mut dyn Write) -> Result<()> {
    let file = match &a.config {
        Some(p) => Config::load(p)?.stability,
        None => None,
    };
    let (setup, dx) = setup_from(&a.setup, file.as_ref())?;
    let scheme_name = a.scheme.or(file.as_ref().map(|f| f.scheme.clone())).ok_or_else(|| anyhow!("missing --scheme"))?;
    let temporal_name =
        a.temporal.or(file.as_ref().map(|f| f.temporal.clone())).ok_or_else(|| anyhow!("missing --temporal"))?;
    let scheme = parse_scheme(&scheme_name)?;
    let temporal = parse_temporal(&temporal_name)?;
    let dt = a.dt.or(file.as_ref().and_then(|f| f.dt)).unwrap_or(dx * dx);
    let n_xi = a.n_xi.or(file.as_ref().and_then(|f| f.n_xi)).unwrap_or(DEFAULT_SCAN_POINTS);
    let rows = scan(&setup, &scheme, &temporal, dx, dt, n_xi)?;
    let v = verdict(&rows);
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir)?;
        let table: Vec<Vec<Cell>> = rows
            .iter()
            .map(|r| {
                let [m, p] = r.eigenvalues;
                vec![r.xi, m.re, m.im, p.re, p.im, r.amplification[0], r.amplification[1]]
                    .into_iter()
                    .map(Cell::from)
                    .collect()
            })
            .collect();
        write_table_file(
            &dir.join("scan.csv"),
            &["xi", "lambda_minus_re", "lambda_minus_im", "lambda_plus_re", "lambda_plus_im", "g_minus", "g_plus"],
            &table,
        )?;
    }
    writeln!(out, "{}", if v.stable { "STABLE" } else { "UNSTABLE" })?;
    writeln!(out, "max_amplification = {}", v.max_amplification)?;
    writeln!(out, "worst_xi = {}", v.worst_xi)?;
    writeln!(out, "necessary_condition = {}", v.necessary_condition)?;
    writeln!(out, "min_xi_imag = {}", v.min_xi_imag)?;
    Ok(())
}

fn load_run_config(args: &RunArgs) -> Result<Config> {
    let path = match (&args.file, &args.config) {
        (Some(_), Some(_)) => bail!("give the scenario file either positionally or with --config"),
        (Some(p), None) | (None, Some(p)) => p,
        (None, None) => bail!("missing scenario file"),
    };
    let mut cfg = Config::load(path)?;
    let section = cfg.scenario.get_or_insert_with(|| ScenarioSection {
        kind: "ktest".into(),
        dx: None,
        dt: None,
        dt_factor: None,
        end_time: None,
        snapshot_times: None,
    });
    if args.dx.is_some() {
        section.dx = args.dx;
    }
    if args.dt.is_some() {
        section.dt = args.dt;
    }
    if args.end_time.is_some() {
        section.end_time = args.end_time;
        if let (Some(t), Some(times)) = (args.end_time, &mut section.snapshot_times) {
            times.retain(|x| *x < t);
            times.push(t);
        }
    }
    Ok(cfg)
}

fn out_dir(args: &RunArgs) -> &Path {
    args.out_dir.as_deref().unwrap_or(Path::new("."))
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg = load_run_config(&a.run)?;
    let mut solver: SolverSection = cfg.solver_section();
    if let Some(f) = a.flux {
        solver.flux = f;
    }
    if let Some(t) = a.temporal {
        solver.temporal = t;
    }
    solver.enforce_w |= a.enforce_w;
    if a.original {
        solver.formulation = "original".into();
    }
    cfg.solver = Some(solver.clone());
    let scenario = cfg.build_scenario()?;
    let options = RunOptions::from_section(&solver, &scenario).context("solver configuration")?;
    let output = run(&scenario, &options, |_, _| {})?;
    let dir = out_dir(&a.run);
    write_run(dir, &output)?;
    let d = &output.diagnostics;
    writeln!(out, "steps = {}", output.steps)?;
    writeln!(out, "final_time = {}", output.final_state.time)?;
    writeln!(out, "relative_entropy = {}", d.relative_entropy.last().copied().unwrap_or(1.0))?;
    writeln!(out, "snapshots = {}", output.snapshots.len())?;
    Ok(())
}

fn hamiltonian_cmd(a: HamiltonianArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = load_run_config(&a.run)?;
    let name = a.stepper.or(cfg.hamiltonian.as_ref().map(|h| h.stepper.clone())).unwrap_or_else(|| "be".into());
    let stepper = parse_stepper(&name)?;
    let solver = cfg.solver_section();
    let newton = korteweg_core::newton::NewtonOptions {
        tol: solver.newton_tol,
        max_iter: solver.newton_max_iter,
        ..Default::default()
    };
    let scenario = cfg.build_scenario()?;
    let result = run_hamiltonian(&scenario, stepper, &newton)?;
    write_hamiltonian(out_dir(&a.run), &result)?;
    writeln!(out, "steps = {}", result.times.len() - 1)?;
    for (t, m) in result.snapshot_times.iter().zip(&result.metrics) {
        writeln!(out, "t = {t}: zone_width = {}, extrema = {}", m.zone_width, m.extrema)?;
    }
    Ok(())
}

const CFL_SCHEMES: [&str; 6] = ["lf", "mlf", "rusanov", "godunov", "muscl-lf", "muscl-rusanov"];

fn cfl(a: CflArgs, out: &mut dyn Write) -> Result<()> {
    let temporal = parse_temporal(&a.temporal)?;
    let n_xi = a.n_xi.unwrap_or(DEFAULT_SCAN_POINTS);
    let mut setups = Vec::new();
    if a.setup.c_bar.is_some() || a.random_setups == 0 {
        setups.push(setup_from(&a.setup, None)?);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    for _ in 0..a.random_setups {
        let setup = LinearizedSetup::from_parameters(
            rng.gen_range(0.2..2.0),
            rng.gen_range(-1.5..1.5),
            rng.gen_range(0.01..2.0),
        )?;
        setups.push((setup, a.setup.dx.unwrap_or(10f64.powf(rng.gen_range(-3.0..-2.0)))));
    }
    let mut rows = Vec::new();
    for (setup, dx) in &setups {
        for name in CFL_SCHEMES {
            let scheme = parse_scheme(name)?;
            let closed = match cfl_bound_closed_form(setup, &scheme, &temporal, *dx) {
                Ok(b) => b,
                Err(Error::InvalidConfig(_)) => f64::NAN,
                Err(e) => return Err(e.into()),
            };
            let crit = critical_dt_bisection(setup, &scheme, &temporal, *dx, a.rel_tol, n_xi)?;
            let status = match crit.status {
                CriticalStatus::Bracketed => "bracketed",
                CriticalStatus::NeverStable => "never_stable",
                CriticalStatus::StableThroughout => "stable_throughout",
            };
            rows.push(vec![
                Cell::from(setup.c_bar),
                Cell::from(setup.u_bar),
                Cell::from(setup.sigma_bar),
                Cell::from(*dx),
                Cell::from(name),
                Cell::from(a.temporal.as_str()),
                Cell::from(closed),
                Cell::from(crit.dt),
                Cell::from(status),
                Cell::from(crit.dt / closed),
            ]);
        }
    }
    let header = ["c_bar", "u_bar", "sigma_bar", "dx", "scheme", "temporal", "closed_form", "bisection", "status", "ratio"];
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir)?;
        write_table_file(&dir.join("cfl.csv"), &header, &rows)?;
    }
    write_table(out, &header, &rows)
}

fn nondim(a: NondimArgs, out: &mut dyn Write) -> Result<()> {
    let r = NondimInputs::reference();
    let inputs = NondimInputs {
        reynolds: a.re.unwrap_or(r.reynolds),
        nu: a.nu.unwrap_or(r.nu),
        g: a.g.unwrap_or(r.g),
        theta: a.theta_deg.map_or(r.theta, f64::to_radians),
        rho: a.rho.unwrap_or(r.rho),
        sigma: a.sigma.unwrap_or(r.sigma),
        lambda: a.lambda.unwrap_or(r.lambda),
    };
    let report = liu_gollub_nondimensionalize(&inputs)?;
    writeln!(out, "quantity,formula_u,nusselt_u,quoted,nusselt_rel_err")?;
    let f = compare_with_quoted(&report.formula);
    let n = compare_with_quoted(&report.nusselt);
    for (a, b) in f.iter().zip(&n) {
        writeln!(out, "{},{},{},{},{:.3e}", a.0, a.1, b.1, b.2, b.3)?;
    }
    writeln!(out, "epsilon,{},{},,", report.formula.epsilon, report.nusselt.epsilon)?;
    writeln!(
        out,
        "# u_N = nu Re / h_N and the Nusselt velocity g sin(theta) h_N^2 / (3 nu) differ by {:.1}%; the quoted u_N, T_N and We follow the Nusselt value",
        100.0 * report.velocity_gap
    )?;
    Ok(())
}
