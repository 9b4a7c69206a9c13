//! `tubewave`: command-line front end for the p-Laplacian tube laboratory.
//!
//! Every subcommand writes its artifacts into one output directory together
//! with a JSON run manifest listing parameters, emitted files and the
//! derived numbers, so a run can be reproduced or diffed from the manifest
//! alone. Exit codes: 0 success, 1 numerical failure, 2 usage error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use tubewave_core::asymptotics;
use tubewave_core::eigen;
use tubewave_core::io as tio;
use tubewave_core::pde::{self, StepControl, SteadyStateCriterion};
use tubewave_core::phaseplane;
use tubewave_core::wavefront;
use tubewave_core::{CrossSection, Params, TubeGrid};

#[derive(Parser)]
#[command(name = "tubewave", version, about = "Slow p-Laplacian diffusion in tubes: profiles, waves, fronts")]
struct Cli {
    /// Flat `key = value` config file; keys mirror the long flag names and
    /// explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory (default ./out/<command>-<unix time>).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-sectional profile Φ by the rescaled flow, shooting, or both.
    Eigen(EigenArgs),
    /// Phase-plane analysis of the Neumann wave ODE: orbit, M_c, Darcy slope.
    Phaseplane(PhaseplaneArgs),
    /// Dirichlet travelling wave and critical speed by bisection.
    Wave(WaveArgs),
    /// Rescaled-equation simulation with snapshot dumps.
    Simulate(SimulateArgs),
    /// Front extraction and front-law fit over a snapshot directory.
    Frontfit(FrontfitArgs),
    /// p = 2 contrast: heat-equation decay and sqrt spreading laws.
    Linear(LinearArgs),
    /// Run a batch of jobs from a sweep spec file.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct EigenArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    #[arg(long, default_value_t = 33)]
    n_z: usize,
    #[arg(long, value_enum, default_value_t = EigenMethod::Both)]
    method: EigenMethod,
    /// Relative residual tolerance of the flow method.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EigenMethod {
    Flow,
    Shooting,
    Both,
}

#[derive(Args)]
struct PhaseplaneArgs {
    #[arg(long)]
    p: f64,
    /// Wave speed; repeatable.
    #[arg(long, required = true)]
    c: Vec<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct WaveArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    /// Truncation half-width j; repeatable for a refinement ladder.
    #[arg(long, required = true)]
    truncation: Vec<f64>,
    #[arg(long, default_value_t = 1e-3)]
    tol_c: f64,
    #[arg(long, default_value_t = 17)]
    n_z: usize,
    #[arg(long, default_value_t = 0.25)]
    dy: f64,
    /// Optional τ ceiling for each steady march (bounds the cost of
    /// near-critical speeds at a bisection bias of ~ j/τ-cap).
    #[arg(long)]
    tau_cap: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    #[arg(long, default_value_t = 6.0)]
    tube_halfwidth: f64,
    #[arg(long, default_value_t = 20.0)]
    tau_final: f64,
    #[arg(long, default_value_t = 0.5)]
    snapshot_every: f64,
    #[arg(long, value_enum, default_value_t = InitKind::Bump)]
    init: InitKind,
    #[arg(long, default_value_t = 17)]
    n_z: usize,
    #[arg(long, default_value_t = 0.125)]
    dy: f64,
    /// Bump amplitude as a fraction of the subsolution ceiling.
    #[arg(long, default_value_t = 0.5)]
    amplitude: f64,
    /// Wave profile CSV (from `wave`) for the sandwich initial data.
    #[arg(long)]
    wave_profile: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InitKind {
    Bump,
    TwoBumps,
    Sandwich,
}

#[derive(Args)]
struct FrontfitArgs {
    /// Directory of snap-*.csv files from `simulate`.
    #[arg(long)]
    run_dir: PathBuf,
    /// Threshold as a fraction of the final-snapshot sup.
    #[arg(long, default_value_t = asymptotics::DEFAULT_ETA_FACTOR)]
    eta_factor: f64,
    #[arg(long, default_value_t = 0.5)]
    tail_fraction: f64,
}

#[derive(Args)]
struct LinearArgs {
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    #[arg(long, default_value_t = 10.0)]
    tube_halfwidth: f64,
    #[arg(long, default_value_t = 6.0)]
    t_final: f64,
    #[arg(long, default_value_t = 17)]
    n_z: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// Job list: one `<subcommand> key=value ...` per line.
    #[arg(long)]
    spec: PathBuf,
}

/// The reproducibility record every subcommand writes.
#[derive(serde::Serialize)]
struct RunManifest {
    command: String,
    parameters: BTreeMap<String, String>,
    git_or_version: String,
    wall_time_seconds: f64,
    outputs: Vec<String>,
    derived_numbers: BTreeMap<String, f64>,
}

struct RunContext {
    dir: PathBuf,
    command: String,
    parameters: BTreeMap<String, String>,
    outputs: Vec<String>,
    derived: BTreeMap<String, f64>,
    started: Instant,
}

impl RunContext {
    fn new(dir: PathBuf, command: &str) -> anyhow::Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(RunContext {
            dir,
            command: command.to_string(),
            parameters: BTreeMap::new(),
            outputs: Vec::new(),
            derived: BTreeMap::new(),
            started: Instant::now(),
        })
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    fn derived(&mut self, key: &str, value: f64) {
        self.derived.insert(key.to_string(), value);
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.dir.join(name)
    }

    fn finish(mut self) -> anyhow::Result<()> {
        let manifest = RunManifest {
            command: self.command.clone(),
            parameters: std::mem::take(&mut self.parameters),
            git_or_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            outputs: {
                let mut o = std::mem::take(&mut self.outputs);
                o.push("manifest.json".to_string());
                o
            },
            derived_numbers: std::mem::take(&mut self.derived),
        };
        tio::write_json(&self.dir.join("manifest.json"), &manifest)?;
        for (k, v) in &manifest.derived_numbers {
            println!("{k} = {v:.12e}");
        }
        println!("wrote {}", self.dir.display());
        Ok(())
    }
}

fn default_out_dir(command: &str) -> PathBuf {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    PathBuf::from("out").join(format!("{command}-{stamp}"))
}

/// Splices `key = value` lines from the config file into argv as `--key value`
/// pairs, skipping keys already given explicitly so flags win.
fn merge_config(argv: Vec<String>) -> anyhow::Result<Vec<String>> {
    let Some(pos) = argv.iter().position(|a| a == "--config") else {
        return Ok(argv);
    };
    let file = argv
        .get(pos + 1)
        .ok_or_else(|| anyhow::anyhow!("--config needs a file argument"))?;
    let text = fs::read_to_string(file)
        .map_err(|e| anyhow::anyhow!("cannot read config {file}: {e}"))?;
    let mut merged = argv.clone();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow::anyhow!("config line {} is not `key = value`", lineno + 1))?;
        let key = key.trim();
        let flag = format!("--{key}");
        if argv.iter().any(|a| *a == flag) {
            continue; // explicit flag overrides the file
        }
        for item in value.split(',') {
            merged.push(flag.clone());
            merged.push(item.trim().to_string());
        }
    }
    Ok(merged)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    let name = match &cli.command {
        Command::Eigen(_) => "eigen",
        Command::Phaseplane(_) => "phaseplane",
        Command::Wave(_) => "wave",
        Command::Simulate(_) => "simulate",
        Command::Frontfit(_) => "frontfit",
        Command::Linear(_) => "linear",
        Command::Sweep(_) => "sweep",
    };
    let out = cli.out.clone().unwrap_or_else(|| default_out_dir(name));
    let result = match cli.command {
        Command::Eigen(args) => run_eigen(&args, out),
        Command::Phaseplane(args) => run_phaseplane(&args, out),
        Command::Wave(args) => run_wave(&args, out),
        Command::Simulate(args) => run_simulate(&args, out),
        Command::Frontfit(args) => run_frontfit(&args, out),
        Command::Linear(args) => run_linear(&args, out),
        Command::Sweep(args) => run_sweep(&args, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run_eigen(args: &EigenArgs, out: PathBuf) -> anyhow::Result<()> {
    let mut ctx = RunContext::new(out, "eigen")?;
    ctx.param("p", args.p);
    ctx.param("length", args.length);
    ctx.param("n_z", args.n_z);
    ctx.param("tol", args.tol);
    let params = Params::new(args.p)?;
    let cs = CrossSection::new(args.length, args.n_z)?;
    let control = StepControl::default();

    let mut flow = None;
    let mut shot = None;
    if args.method != EigenMethod::Shooting {
        let r = eigen::phi_via_rescaled_flow(cs, &params, &control, args.tol)?;
        ctx.derived("flow_amplitude", r.profile.values[cs.mid_index()]);
        ctx.derived("flow_residual_sup", r.residual_sup);
        let path = ctx.path("phi-flow.csv");
        tio::write_profile_csv(&path, &r.profile)?;
        let sidecar = tio::ProfileSidecar {
            p: args.p,
            length: args.length,
            residual_sup: r.residual_sup,
            method_tag: "rescaled_flow".into(),
        };
        let path = ctx.path("phi-flow.json");
        tio::write_json(&path, &sidecar)?;
        flow = Some(r);
    }
    if args.method != EigenMethod::Flow {
        let r = eigen::phi_via_shooting(cs, &params, 4096, 1e-10)?;
        ctx.derived("shooting_amplitude", r.amplitude);
        ctx.derived("shooting_initial_slope", r.initial_slope);
        ctx.derived("shooting_residual_sup", r.profile.residual_sup);
        let path = ctx.path("phi-shooting.csv");
        tio::write_profile_csv(&path, &r.profile.profile)?;
        let sidecar = tio::ProfileSidecar {
            p: args.p,
            length: args.length,
            residual_sup: r.profile.residual_sup,
            method_tag: "shooting".into(),
        };
        let path = ctx.path("phi-shooting.json");
        tio::write_json(&path, &sidecar)?;
        shot = Some(r);
    }
    if let (Some(flow), Some(shot)) = (&flow, &shot) {
        let sup = flow.profile.values.iter().cloned().fold(0.0_f64, f64::max);
        let diff = flow
            .profile
            .values
            .iter()
            .zip(shot.profile.profile.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        ctx.derived("method_agreement_rel", diff / sup);
    }
    ctx.finish()
}

fn run_phaseplane(args: &PhaseplaneArgs, out: PathBuf) -> anyhow::Result<()> {
    let mut ctx = RunContext::new(out, "phaseplane")?;
    ctx.param("p", args.p);
    ctx.param(
        "c",
        args.c.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
    );
    ctx.param("tol", args.tol);
    let params = Params::new(args.p)?;
    for (k, &c) in args.c.iter().enumerate() {
        let orbit = phaseplane::fast_orbit(c, &params, args.tol)?;
        let orbit = phaseplane::reconstruct_profile(orbit, &params)?;
        let tag = format!("c{}", k);
        ctx.derived(&format!("{tag}.c"), c);
        ctx.derived(&format!("{tag}.m_c"), orbit.m_c);
        ctx.derived(&format!("{tag}.x_c"), orbit.vertex.0);
        ctx.derived(&format!("{tag}.z_c"), orbit.vertex.1);
        ctx.derived(&format!("{tag}.darcy_slope"), orbit.darcy_slope);
        ctx.derived(&format!("{tag}.xi0"), orbit.xi0);
        let mut csv = String::from("# X,Z\n");
        for (x, z) in &orbit.samples {
            csv.push_str(&format!("{x:.16e},{z:.16e}\n"));
        }
        let path = ctx.path(&format!("orbit-{tag}.csv"));
        fs::write(path, csv)?;
        let mut csv = String::from("# xi,phi\n");
        for (xi, phi) in &orbit.profile {
            csv.push_str(&format!("{xi:.16e},{phi:.16e}\n"));
        }
        let path = ctx.path(&format!("profile-{tag}.csv"));
        fs::write(path, csv)?;
    }
    ctx.finish()
}

fn run_wave(args: &WaveArgs, out: PathBuf) -> anyhow::Result<()> {
    let mut ctx = RunContext::new(out, "wave")?;
    ctx.param("p", args.p);
    ctx.param("length", args.length);
    ctx.param(
        "truncation",
        args.truncation.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(","),
    );
    ctx.param("tol_c", args.tol_c);
    ctx.param("n_z", args.n_z);
    ctx.param("dy", args.dy);
    if let Some(cap) = args.tau_cap {
        ctx.param("tau_cap", cap);
    }
    let params = Params::new(args.p)?;
    let cs = CrossSection::new(args.length, args.n_z)?;
    let control = StepControl::default();
    let criterion = SteadyStateCriterion {
        tau_cap: args.tau_cap,
        ..SteadyStateCriterion::default()
    };
    let phi = eigen::phi_via_rescaled_flow(cs, &params, &control, 1e-8)?;

    let mut per_j = Vec::new();
    for &j in &args.truncation {
        let bracket = wavefront::find_bracket(j, &phi.profile, &params, args.dy, &control, &criterion)?;
        let wave = wavefront::critical_speed(
            j,
            &phi.profile,
            &params,
            args.dy,
            bracket,
            args.tol_c,
            &control,
            &criterion,
        )?;
        let jtag = format!("j{j}");
        ctx.derived(&format!("c_star_{jtag}"), wave.c_star);
        ctx.derived(&format!("anchor_{jtag}"), wave.anchor_value);
        let path = ctx.path(&format!("wave-{jtag}.csv"));
        tio::write_field_csv(&path, &wave.profile)?;
        let mut csv = String::from("# c,center_value\n");
        for (c, cv) in &wave.trace {
            csv.push_str(&format!("{c:.16e},{cv:.16e}\n"));
        }
        let path = ctx.path(&format!("trace-{jtag}.csv"));
        fs::write(path, csv)?;
        per_j.push((j, wave.c_star));
    }
    if per_j.len() > 1 {
        let n = per_j.len();
        let last_inc = (per_j[n - 1].1 - per_j[n - 2].1).abs();
        ctx.derived("c_star", per_j[n - 1].1);
        ctx.derived("ladder_last_increment", last_inc);
        ctx.derived(
            "ladder_converged",
            if last_inc <= 0.02 * per_j[n - 1].1 { 1.0 } else { 0.0 },
        );
    } else {
        ctx.derived("c_star", per_j[0].1);
    }
    ctx.finish()
}

fn run_simulate(args: &SimulateArgs, out: PathBuf) -> anyhow::Result<()> {
    let mut ctx = RunContext::new(out, "simulate")?;
    ctx.param("p", args.p);
    ctx.param("length", args.length);
    ctx.param("tube_halfwidth", args.tube_halfwidth);
    ctx.param("tau_final", args.tau_final);
    ctx.param("snapshot_every", args.snapshot_every);
    ctx.param("n_z", args.n_z);
    ctx.param("dy", args.dy);
    ctx.param("amplitude", args.amplitude);
    let params = Params::new(args.p)?;
    let cs = CrossSection::new(args.length, args.n_z)?;
    let grid = TubeGrid::symmetric(cs, args.tube_halfwidth, args.dy)?;
    let control = StepControl::default();
    let ceiling = eigen::subsolution_amplitude(&params, args.length)?;
    let amp = args.amplitude * ceiling;

    let initial = match args.init {
        InitKind::Bump => {
            ctx.param("init", "bump");
            asymptotics::bump_initial(grid, amp, 1.0)
        }
        InitKind::TwoBumps => {
            ctx.param("init", "two-bumps");
            asymptotics::two_bump_initial(grid, amp, 1.0, 2.5)?
        }
        InitKind::Sandwich => {
            ctx.param("init", "sandwich");
            let path = args.wave_profile.as_ref().ok_or_else(|| {
                anyhow::anyhow!("--init sandwich needs --wave-profile <csv from a wave run>")
            })?;
            let profile = tio::read_field_csv(path)?;
            let mut v0 = tubewave_core::TubeField::zeros(grid);
            for iy in 0..grid.n_y {
                for iz in 1..cs.n_z - 1 {
                    v0.values[[iy, iz]] =
                        asymptotics::wave_value(&profile, iz, grid.y(iy));
                }
            }
            v0
        }
    };
    let run = pde::run_rescaled(initial, &params, &control, args.tau_final, args.snapshot_every)?;
    ctx.derived("steps", run.steps as f64);
    ctx.derived("min_step_increment", run.min_step_increment);
    ctx.derived("sup_over_run", run.sup_over_run);
    for (k, snap) in run.snapshots.iter().enumerate() {
        let path = ctx.path(&format!("snap-{k:04}.csv"));
        tio::write_field_csv(&path, snap)?;
    }
    ctx.finish()
}

fn load_snapshots(dir: &Path) -> anyhow::Result<Vec<tubewave_core::TubeField>> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("snap-") && n.ends_with(".csv"))
        .collect();
    names.sort();
    if names.is_empty() {
        anyhow::bail!("no snap-*.csv files in {}", dir.display());
    }
    names
        .iter()
        .map(|n| tio::read_field_csv(&dir.join(n)).map_err(Into::into))
        .collect()
}

fn run_frontfit(args: &FrontfitArgs, out: PathBuf) -> anyhow::Result<()> {
    let mut ctx = RunContext::new(out, "frontfit")?;
    ctx.param("run_dir", args.run_dir.display().to_string());
    ctx.param("eta_factor", args.eta_factor);
    ctx.param("tail_fraction", args.tail_fraction);
    let snapshots = load_snapshots(&args.run_dir)?;
    let sup = snapshots.last().unwrap().sup();
    let eta = args.eta_factor * sup;
    ctx.derived("eta", eta);
    let history = asymptotics::front_history(&snapshots, eta)?;
    let mut csv = String::from("# tau,s_plus,s_minus\n");
    for (i, &tau) in history.taus.iter().enumerate() {
        let fmt = |s: Option<f64>| s.map_or("nan".to_string(), |v| format!("{v:.16e}"));
        csv.push_str(&format!(
            "{tau:.16e},{},{}\n",
            fmt(history.s_plus_mid[i]),
            fmt(history.s_minus_mid[i])
        ));
    }
    let path = ctx.path("fronts.csv");
    fs::write(path, csv)?;
    let plus = asymptotics::fit_front_law(&history, args.tail_fraction, asymptotics::Side::Plus)?;
    let minus = asymptotics::fit_front_law(&history, args.tail_fraction, asymptotics::Side::Minus)?;
    ctx.derived("slope_plus", plus.slope);
    ctx.derived("slope_minus", minus.slope);
    ctx.derived("r2_plus", plus.r_squared);
    ctx.derived("r2_minus", minus.r_squared);
    ctx.derived("samples", plus.samples as f64);
    ctx.finish()
}

fn run_linear(args: &LinearArgs, out: PathBuf) -> anyhow::Result<()> {
    let mut ctx = RunContext::new(out, "linear")?;
    ctx.param("length", args.length);
    ctx.param("tube_halfwidth", args.tube_halfwidth);
    ctx.param("t_final", args.t_final);
    ctx.param("n_z", args.n_z);
    let params = Params::new(2.0)?;
    let cs = CrossSection::new(args.length, args.n_z)?;
    let report = asymptotics::linear_case_run(
        &params,
        cs,
        args.tube_halfwidth,
        args.t_final,
        &StepControl::default(),
    )?;
    ctx.derived("lambda1", report.lambda1);
    ctx.derived("decay_rate", report.decay_rate);
    ctx.derived("decay_rate_rel_error", report.decay_rate_rel_error);
    ctx.derived("sqrt_slope", report.sqrt_fit.slope);
    ctx.derived("r2_sqrt", report.sqrt_fit.r_squared);
    ctx.derived("r2_log", report.log_fit.r_squared);
    let mut csv = String::from("# t,level_position\n");
    for (t, s) in &report.history {
        csv.push_str(&format!("{t:.16e},{s:.16e}\n"));
    }
    let path = ctx.path("levels.csv");
    fs::write(path, csv)?;
    ctx.finish()
}

fn run_sweep(args: &SweepArgs, out: PathBuf) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.spec)
        .map_err(|e| anyhow::anyhow!("cannot read sweep spec {}: {e}", args.spec.display()))?;
    fs::create_dir_all(&out)?;
    let mut index = String::from("job,command,status,key,value\n");
    let mut job = 0usize;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut words = line.split_whitespace();
        let sub = words.next().unwrap().to_string();
        let job_dir = out.join(format!("job-{job:03}"));
        let mut argv = vec!["tubewave".to_string(), sub.clone()];
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| anyhow::anyhow!("sweep job {job}: `{w}` is not key=value"))?;
            for item in v.split(',') {
                argv.push(format!("--{k}"));
                argv.push(item.to_string());
            }
        }
        argv.push("--out".into());
        argv.push(job_dir.display().to_string());
        let status = match Cli::try_parse_from(&argv) {
            Ok(cli) => {
                let r = match cli.command {
                    Command::Eigen(a) => run_eigen(&a, job_dir.clone()),
                    Command::Phaseplane(a) => run_phaseplane(&a, job_dir.clone()),
                    Command::Wave(a) => run_wave(&a, job_dir.clone()),
                    Command::Simulate(a) => run_simulate(&a, job_dir.clone()),
                    Command::Frontfit(a) => run_frontfit(&a, job_dir.clone()),
                    Command::Linear(a) => run_linear(&a, job_dir.clone()),
                    Command::Sweep(_) => Err(anyhow::anyhow!("nested sweeps are not supported")),
                };
                match r {
                    Ok(()) => "ok",
                    Err(e) => {
                        eprintln!("job {job} failed: {e:#}");
                        "failed"
                    }
                }
            }
            Err(e) => {
                eprintln!("job {job} rejected: {e}");
                "rejected"
            }
        };
        if status == "ok" {
            let manifest: serde_json::Value = tio::read_json(&job_dir.join("manifest.json"))?;
            if let Some(numbers) = manifest["derived_numbers"].as_object() {
                for (k, v) in numbers {
                    index.push_str(&format!("{job},{sub},{status},{k},{v}\n"));
                }
            }
        } else {
            index.push_str(&format!("{job},{sub},{status},,\n"));
        }
        job += 1;
    }
    fs::write(out.join("index.csv"), &index)?;
    println!("wrote {}", out.join("index.csv").display());
    Ok(())
}
