//! The `rgs` command line.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::equilibria::{compute_equilibria, equilibrium_energy_e2};
use crate::error::{Error, Result};
use crate::harness::audit::{audit_csv, energy_audit, worst_energy_increase};
use crate::harness::config::{ExperimentConfig, SystemKind};
use crate::harness::eps_limit::{run_eps_limit, EpsLimitSetup};
use crate::harness::initial::{preset_state, rng, Preset};
use crate::harness::longterm::{longterm_csv, run_longterm, Limit};
use crate::model::GSParams;
use crate::snapshot::format_snapshot;
use crate::solver::{run, System};
use crate::stability::{
    assemble_linearization_with_limit, boundary_decay_envelope, center_coefficient_check, spectrum,
    CenterManifoldConstants, Which,
};

#[derive(Debug, Parser)]
#[command(name = "rgs", version, about = "Reversible Gray-Scott numerical lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one initial condition and log invariants.
    Simulate(Common),
    /// Print both homogeneous equilibria and their E2 energies.
    Equilibria(Common),
    /// Eigenvalues of both linearizations on the zero-mass subspace.
    Spectrum(Common),
    /// Center coefficient ratios and decay envelopes at the boundary equilibrium.
    Center(Common),
    /// Per-step energy budget and the residual of the energy identity.
    Energy(Common),
    /// Error table for the small-epsilon limit.
    EpsLimit(Common),
    /// Classify the long-time limit of seeded random initial data.
    Longterm(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// `key = value` file applied before any flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generic override, repeatable; applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    d1: Option<String>,
    #[arg(long)]
    d2: Option<String>,
    #[arg(long)]
    d3: Option<String>,
    #[arg(long)]
    d4: Option<String>,
    #[arg(long)]
    k1: Option<String>,
    #[arg(long)]
    k2: Option<String>,
    #[arg(long)]
    k3: Option<String>,
    #[arg(long)]
    k4: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    volume: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    cells: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long = "t-end")]
    t_end: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    count: Option<String>,
    #[arg(long = "eps-list")]
    eps_list: Option<String>,
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    s0: Option<String>,
    #[arg(long = "output-dir")]
    output_dir: Option<String>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.merge_file(path)?;
        }
        let flags = [
            ("d1", &self.d1),
            ("d2", &self.d2),
            ("d3", &self.d3),
            ("d4", &self.d4),
            ("k1", &self.k1),
            ("k2", &self.k2),
            ("k3", &self.k3),
            ("k4", &self.k4),
            ("rho", &self.rho),
            ("volume", &self.volume),
            ("dim", &self.dim),
            ("cells", &self.cells),
            ("dt", &self.dt),
            ("t_end", &self.t_end),
            ("scheme", &self.scheme),
            ("system", &self.system),
            ("preset", &self.preset),
            ("seed", &self.seed),
            ("count", &self.count),
            ("eps_list", &self.eps_list),
            ("profile", &self.profile),
            ("s0", &self.s0),
            ("output_dir", &self.output_dir),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }
}

/// Writes `content` to `output_dir/name` when an output directory is set,
/// otherwise to `out`.
fn emit(cfg: &ExperimentConfig, name: &str, content: &str, out: &mut dyn Write) -> Result<()> {
    match &cfg.output_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(name);
            std::fs::write(&path, content)?;
            writeln!(out, "wrote {}", path.display())?;
        }
        None => {
            write!(out, "{content}")?;
            if !content.ends_with('\n') {
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn f(v: f64) -> String {
    format!("{v:.16e}")
}

fn equilibria(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let pair = compute_equilibria(&cfg.params, cfg.rho, cfg.volume())?;
    let (e_circ, e_b) = equilibrium_energy_e2(&pair, &cfg.params);
    let mut csv = String::from("name,u1,u2,u3,u4,E2\n");
    for (name, e, energy) in [("E_circ", pair.e_circ, e_circ), ("E_b", pair.e_b, e_b)] {
        let _ = writeln!(csv, "{name},{},{}", e.map(f).join(","), f(energy));
    }
    emit(cfg, "equilibria.csv", &csv, out)
}

fn spectra(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let grid = cfg.grid()?;
    let mut summary = String::from("which,gap,kernel_dim,kernel_alignment,k1,k2,k3,k4,max_re,max_abs_im\n");
    let mut eig = String::from("which,index,re,im\n");
    for which in [Which::Circ, Which::B] {
        let op = assemble_linearization_with_limit(&cfg.params, cfg.rho, which, &grid, cfg.dense_limit)?;
        let rep = spectrum(&op)?;
        let kv = rep.kernel_vector.map_or(vec!["nan".to_string(); 4], |v| v.map(f).to_vec());
        let align = rep.kernel_alignment.map_or("nan".to_string(), f);
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{},{}",
            which.name(),
            f(rep.gap),
            rep.kernel_dim,
            align,
            kv.join(","),
            f(rep.max_real()),
            f(rep.max_abs_imag())
        );
        for (i, z) in rep.eigenvalues.iter().enumerate() {
            let _ = writeln!(eig, "{},{i},{},{}", which.name(), f(z.re), f(z.im));
        }
    }
    emit(cfg, "spectrum_summary.csv", &summary, out)?;
    if cfg.output_dir.is_none() {
        writeln!(out)?;
    }
    emit(cfg, "eigenvalues.csv", &eig, out)
}

fn center(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let volume = cfg.volume();
    let consts = CenterManifoldConstants::new(&cfg.params, cfg.rho, volume);
    let ratios = center_coefficient_check(&cfg.params, cfg.rho, volume, &cfg.xi_list)?;
    let mut table = String::from("xi,ratio,lower,upper,limit\n");
    for (xi, r) in cfg.xi_list.iter().zip(&ratios) {
        let _ = writeln!(
            table,
            "{},{},{},{},{}",
            f(*xi),
            f(*r),
            f(-3.0 * consts.k4),
            f(-consts.k4),
            f(-2.0 * consts.k4)
        );
    }
    let t_end = cfg.t_end.unwrap_or(500.0);
    let mut env = String::from("s0,t,s,lower,upper\n");
    for &s0 in &cfg.s0 {
        for pt in boundary_decay_envelope(&cfg.params, cfg.rho, volume, s0, t_end, cfg.samples.max(1))? {
            let _ = writeln!(env, "{},{},{},{},{}", f(s0), f(pt.t), f(pt.s), f(pt.lower), f(pt.upper));
        }
    }
    emit(cfg, "center_ratios.csv", &table, out)?;
    if cfg.output_dir.is_none() {
        writeln!(out)?;
    }
    emit(cfg, "center_envelope.csv", &env, out)
}

fn energy(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let grid = cfg.grid()?;
    let preset: Preset = cfg.preset.as_deref().unwrap_or("generic").parse()?;
    let init = preset_state(&cfg.params, cfg.rho, grid, preset, &mut rng(cfg.seed))?;
    let rows = energy_audit(&cfg.profile, &cfg.params, &init, &cfg.solver(1.0, cfg.dt))?;
    let worst = rows[1..].iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
    let summary = format!(
        "steps = {}\nmax_abs_residual = {}\nworst_relative_energy_increase = {}\n",
        rows.len() - 1,
        f(worst),
        f(worst_energy_increase(&rows))
    );
    emit(cfg, "energy.csv", &audit_csv(&rows), out)?;
    emit(cfg, "energy_summary.txt", &summary, out)
}

fn eps_limit(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let report = run_eps_limit(&EpsLimitSetup::from_config(cfg)?)?;
    emit(cfg, "eps_limit.csv", &report.to_csv(), out)?;
    let mut summary = report.slopes_csv();
    let _ = writeln!(summary, "u4_ratio_spread,{}", f(report.u4_ratio_spread()));
    emit(cfg, "eps_limit_summary.csv", &summary, out)
}

fn longterm(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let grid = cfg.grid()?;
    let presets: Vec<Preset> = match cfg.preset.as_deref().unwrap_or("mixed") {
        "mixed" => Preset::RANDOM.to_vec(),
        name => vec![name.parse()?],
    };
    let solver = cfg.solver(1000.0, 5.0);
    let cases = run_longterm(&cfg.params, cfg.rho, grid, &presets, cfg.count, cfg.seed, &solver)?;
    let agree = cases.iter().filter(|c| c.limit == c.expected).count();
    let unresolved = cases.iter().filter(|c| c.limit == Limit::Unresolved).count();
    emit(cfg, "longterm.csv", &longterm_csv(&cases), out)?;
    let summary = format!("cases = {}\nagree = {agree}\nunresolved = {unresolved}\n", cases.len());
    emit(cfg, "longterm_summary.txt", &summary, out)
}

fn simulate(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let grid = cfg.grid()?;
    let preset: Preset = cfg.preset.as_deref().unwrap_or("generic").parse()?;
    let init = preset_state(&cfg.params, cfg.rho, grid, preset, &mut rng(cfg.seed))?;
    let l = grid.extent()[0];
    let feed = || {
        crate::domain::ScalarField::from_fn(grid, |[x, _]| {
            cfg.feed + cfg.feed_amp * (std::f64::consts::PI * x / l).cos()
        })
    };
    let [u1, u2, u3, u4] = init.into_fields();
    let (system, fields) = match cfg.system {
        SystemKind::Rgs => (System::Rgs(cfg.params), vec![u1, u2, u3, u4]),
        SystemKind::Reduced => (System::Reduced(cfg.params), vec![u1, u4]),
        SystemKind::Gs => {
            let gs = GSParams::new(cfg.params.d[0], cfg.params.d[1], cfg.params.k[0], feed())?;
            (System::Gs(gs), vec![u1, u2])
        }
    };
    let mut solver = cfg.solver(50.0, 1.0);
    solver.keep_snapshots = cfg.output_dir.is_some();
    let log = run(&system, &fields, &solver)?;
    emit(cfg, "trajectory.csv", &log.to_csv(), out)?;
    for (k, (t, fields)) in log.snapshots.iter().enumerate() {
        let text = format_snapshot(*t, &log.species, fields)?;
        emit(cfg, &format!("snapshot_{k:04}.txt"), &text, out)?;
    }
    let steady = log.steady_at.map_or("none".to_string(), f);
    let summary = format!(
        "system = {}\nsteps = {}\nfinal_t = {}\nsteady_at = {steady}\nfinal_dt = {}\n",
        log.system,
        log.steps,
        f(log.final_t),
        f(log.final_dt)
    );
    emit(cfg, "summary.txt", &summary, out)
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `out`.
pub fn run_cli<I, S>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Config(e.to_string()))?;
    match cli.command {
        Command::Simulate(c) => simulate(&c.resolve()?, out),
        Command::Equilibria(c) => equilibria(&c.resolve()?, out),
        Command::Spectrum(c) => spectra(&c.resolve()?, out),
        Command::Center(c) => center(&c.resolve()?, out),
        Command::Energy(c) => energy(&c.resolve()?, out),
        Command::EpsLimit(c) => eps_limit(&c.resolve()?, out),
        Command::Longterm(c) => longterm(&c.resolve()?, out),
    }
}

/// Entry point for the binary: returns the process exit code.
pub fn cli_main<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<S> = args.into_iter().collect();
    // help and version go through clap's own printer
    if let Err(e) = Cli::try_parse_from(args.clone()) {
        if !e.use_stderr() {
            let _ = e.print();
            return 0;
        }
        let msg = e.to_string();
        eprintln!("error: {}", msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: "));
        return 2;
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run_cli(args, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
