//! Time stepping for the four-species system and its relatives.
//!
//! Two schemes are available:
//!
//! * `ImexEuler`: explicit reactions followed by one implicit diffusion
//!   solve per species (Thomas algorithm in 1D, cosine diagonalization in 2D).
//! * `Strang`: exact half-step diffusion, a Heun reaction step, exact
//!   half-step diffusion.
//!
//! Reactions are kept entirely explicit. Every implicit operator is then a
//! pure diffusion, which preserves the integral of each species exactly, and
//! the explicit reaction increment has zero cell sum. The total mass of the
//! four-species system is therefore conserved up to round-off.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::domain::{Grid, NeumannSpectral, ScalarField, State};
use crate::equilibria::{compute_equilibria, EquilibriumPair};
use crate::error::{Error, Result};
use crate::lyapunov::{energy, PhiProfile};
use crate::model::{reaction_point, GSParams, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ImexEuler,
    Strang,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "imex_euler" | "imex" => Ok(Self::ImexEuler),
            "strang" => Ok(Self::Strang),
            other => Err(Error::MalformedValue {
                key: "scheme".into(),
                value: other.into(),
                reason: "expected imex_euler or strang".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Interval between log rows.
    pub output_every: f64,
    /// Stop once `‖u_{n+1} - u_n‖₂ / dt` drops below this.
    pub steady_tol: f64,
    /// Factor applied to `dt` after a failed step.
    pub safety: f64,
    pub max_retries: u32,
    pub stop_on_steady: bool,
    /// Fail the run when non-negative data develops values below
    /// `-1e-10 ‖u‖∞`.
    pub check_positivity: bool,
    pub keep_snapshots: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 50.0,
            scheme: Scheme::ImexEuler,
            output_every: 1.0,
            steady_tol: 1e-9,
            safety: 0.5,
            max_retries: 8,
            stop_on_steady: true,
            check_positivity: true,
            keep_snapshots: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.output_every >= self.dt) {
            return bad(format!("output_every ({}) must be at least dt ({})", self.output_every, self.dt));
        }
        if !(self.steady_tol > 0.0) {
            return bad(format!("steady_tol must be positive, got {}", self.steady_tol));
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return bad(format!("safety must lie in (0, 1), got {}", self.safety));
        }
        Ok(())
    }
}

/// Which equations to integrate.
#[derive(Debug, Clone, PartialEq)]
pub enum System {
    /// The four-species reversible system.
    Rgs(Params),
    /// Classical two-species Gray-Scott with feed.
    Gs(GSParams),
    /// Linear `(u1, u4)` exchange left over when `u2 = u3 = 0`.
    Reduced(Params),
    /// Gray-Scott plus `∂t u3 = d3 Δu3 + u2`.
    LimitU3 { gs: GSParams, d3: f64 },
}

impl System {
    pub fn name(&self) -> &'static str {
        match self {
            System::Rgs(_) => "rgs",
            System::Gs(_) => "gs",
            System::Reduced(_) => "reduced",
            System::LimitU3 { .. } => "limit_u3",
        }
    }

    pub fn species(&self) -> &'static [&'static str] {
        match self {
            System::Rgs(_) => &["u1", "u2", "u3", "u4"],
            System::Gs(_) => &["u1", "u2"],
            System::Reduced(_) => &["u1", "u4"],
            System::LimitU3 { .. } => &["u1", "u2", "u3"],
        }
    }

    fn diffusivities(&self) -> Vec<f64> {
        match self {
            System::Rgs(p) => p.d.to_vec(),
            System::Gs(g) => vec![g.d1, g.d2],
            System::Reduced(p) => vec![p.d[0], p.d[3]],
            System::LimitU3 { gs, d3 } => vec![gs.d1, gs.d2, *d3],
        }
    }

    fn feed_grid(&self) -> Option<&Grid> {
        match self {
            System::Gs(g) | System::LimitU3 { gs: g, .. } => Some(g.a.grid()),
            _ => None,
        }
    }

    #[inline]
    fn react(&self, cell: usize, u: &[f64], out: &mut [f64]) {
        match self {
            System::Rgs(p) => {
                let r = reaction_point(&p.k, [u[0], u[1], u[2], u[3]]);
                out[..4].copy_from_slice(&r);
            }
            System::Gs(g) => {
                let uptake = u[0] * u[1] * u[1];
                out[0] = -uptake - g.k1 * u[0] + g.a.values()[cell];
                out[1] = uptake - u[1];
            }
            System::Reduced(p) => {
                let exchange = p.k[0] * u[0] - p.k[3] * u[1];
                out[0] = -exchange;
                out[1] = exchange;
            }
            System::LimitU3 { gs, .. } => {
                let uptake = u[0] * u[1] * u[1];
                out[0] = -uptake - gs.k1 * u[0] + gs.a.values()[cell];
                out[1] = uptake - u[1];
                out[2] = u[1];
            }
        }
    }
}

/// Precomputed LU sweep of `I - c L` for the 1D Neumann Laplacian `L`
/// (unit spacing; `c = dt d / h²`).
#[derive(Debug, Clone)]
struct Thomas {
    c: f64,
    upper: Vec<f64>,
    inv: Vec<f64>,
}

impl Thomas {
    fn new(n: usize, c: f64) -> Self {
        let mut upper = vec![0.0; n];
        let mut inv = vec![0.0; n];
        for j in 0..n {
            let diag = if j == 0 || j == n - 1 { 1.0 + c } else { 1.0 + 2.0 * c };
            let denom = if j == 0 { diag } else { diag + c * upper[j - 1] };
            inv[j] = 1.0 / denom;
            upper[j] = -c * inv[j];
        }
        Self { c, upper, inv }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        x[0] *= self.inv[0];
        for j in 1..n {
            x[j] = (x[j] + self.c * x[j - 1]) * self.inv[j];
        }
        for j in (0..n - 1).rev() {
            x[j] -= self.upper[j] * x[j + 1];
        }
    }
}

struct Stepper<'a> {
    system: &'a System,
    grid: Grid,
    scheme: Scheme,
    d: Vec<f64>,
    spectral: Option<NeumannSpectral>,
    thomas: Vec<Option<(f64, Thomas)>>,
    rates: Vec<Vec<f64>>,
    stage: Vec<Vec<f64>>,
}

impl<'a> Stepper<'a> {
    fn new(system: &'a System, grid: Grid, scheme: Scheme) -> Result<Self> {
        if let Some(g) = system.feed_grid() {
            if *g != grid {
                return Err(Error::GridMismatch);
            }
        }
        let d = system.diffusivities();
        let ns = d.len();
        let spectral = (grid.dim() == 2 || scheme == Scheme::Strang).then(|| NeumannSpectral::new(grid));
        Ok(Self {
            system,
            grid,
            scheme,
            thomas: vec![None; ns],
            spectral,
            rates: vec![vec![0.0; grid.len()]; ns],
            stage: vec![vec![0.0; grid.len()]; ns],
            d,
        })
    }

    fn reaction_rates(&mut self, u: &[Vec<f64>]) {
        let ns = u.len();
        let mut buf = [0.0; 4];
        let mut out = [0.0; 4];
        for j in 0..self.grid.len() {
            for i in 0..ns {
                buf[i] = u[i][j];
            }
            self.system.react(j, &buf[..ns], &mut out[..ns]);
            for i in 0..ns {
                self.rates[i][j] = out[i];
            }
        }
    }

    fn diffuse_implicit(&mut self, i: usize, h: f64, values: &mut [f64]) {
        let d = self.d[i];
        if self.grid.dim() == 1 {
            let hx = self.grid.spacing(0);
            let c = h * d / (hx * hx);
            let stale = !matches!(&self.thomas[i], Some((cached, _)) if *cached == h);
            if stale {
                self.thomas[i] = Some((h, Thomas::new(values.len(), c)));
            }
            if let Some((_, t)) = &self.thomas[i] {
                t.solve(values);
            }
        } else {
            self.apply_spectral(values, |lam| 1.0 / (1.0 - h * d * lam));
        }
    }

    fn apply_spectral(&self, values: &mut [f64], g: impl Fn(f64) -> f64) {
        let spectral = self.spectral.as_ref().expect("spectral operator is built when needed");
        let mut f = ScalarField::new(self.grid, values.to_vec()).expect("lane length matches grid");
        spectral.apply(&mut f, g);
        values.copy_from_slice(f.values());
    }

    fn step(&mut self, u: &mut [Vec<f64>], h: f64) {
        match self.scheme {
            Scheme::ImexEuler => {
                self.reaction_rates(u);
                for i in 0..u.len() {
                    for (v, r) in u[i].iter_mut().zip(&self.rates[i]) {
                        *v += h * r;
                    }
                    let mut lane = std::mem::take(&mut u[i]);
                    self.diffuse_implicit(i, h, &mut lane);
                    u[i] = lane;
                }
            }
            Scheme::Strang => {
                for i in 0..u.len() {
                    let d = self.d[i];
                    self.apply_spectral(&mut u[i], |lam| (0.5 * h * d * lam).exp());
                }
                // Heun: average of u and an Euler step taken from u + h r(u)
                self.reaction_rates(u);
                let mut stage = std::mem::take(&mut self.stage);
                for i in 0..u.len() {
                    for j in 0..u[i].len() {
                        stage[i][j] = u[i][j] + h * self.rates[i][j];
                    }
                }
                self.reaction_rates(&stage);
                for i in 0..u.len() {
                    for j in 0..u[i].len() {
                        u[i][j] = 0.5 * u[i][j] + 0.5 * (stage[i][j] + h * self.rates[i][j]);
                    }
                }
                self.stage = stage;
                for i in 0..u.len() {
                    let d = self.d[i];
                    self.apply_spectral(&mut u[i], |lam| (0.5 * h * d * lam).exp());
                }
            }
        }
    }
}

fn all_finite(u: &[Vec<f64>]) -> bool {
    u.iter().all(|f| f.iter().all(|v| v.is_finite()))
}

fn fields_to_lanes(fields: &[ScalarField]) -> Result<(Grid, Vec<Vec<f64>>)> {
    let first = fields
        .first()
        .ok_or_else(|| Error::InvalidParameters("no fields supplied".into()))?;
    for f in fields {
        first.check_same_grid(f)?;
    }
    Ok((*first.grid(), fields.iter().map(|f| f.values().to_vec()).collect()))
}

fn lanes_to_fields(grid: Grid, u: &[Vec<f64>]) -> Vec<ScalarField> {
    u.iter()
        .map(|v| ScalarField::new(grid, v.clone()).expect("lane length matches grid"))
        .collect()
}

/// One step of the four-species system with the IMEX Euler scheme.
pub fn step_rgs(p: &Params, s: &State, dt: f64) -> Result<State> {
    step_rgs_with(p, s, dt, Scheme::ImexEuler)
}

pub fn step_rgs_with(p: &Params, s: &State, dt: f64, scheme: Scheme) -> Result<State> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameters(format!("dt must be positive, got {dt}")));
    }
    let system = System::Rgs(*p);
    let (grid, mut u) = fields_to_lanes(s.fields())?;
    Stepper::new(&system, grid, scheme)?.step(&mut u, dt);
    if !all_finite(&u) {
        return Err(Error::Instability { t: s.t, dt });
    }
    let [a, b, c, d]: [ScalarField; 4] = lanes_to_fields(grid, &u).try_into().expect("four species");
    State::new(s.t + dt, [a, b, c, d])
}

/// One IMEX Euler step of classical Gray-Scott.
pub fn step_gs(p: &GSParams, u1: &ScalarField, u2: &ScalarField, dt: f64) -> Result<(ScalarField, ScalarField)> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameters(format!("dt must be positive, got {dt}")));
    }
    let system = System::Gs(p.clone());
    let (grid, mut u) = fields_to_lanes(&[u1.clone(), u2.clone()])?;
    Stepper::new(&system, grid, Scheme::ImexEuler)?.step(&mut u, dt);
    if !all_finite(&u) {
        return Err(Error::Instability { t: 0.0, dt });
    }
    let mut out = lanes_to_fields(grid, &u).into_iter();
    Ok((out.next().unwrap(), out.next().unwrap()))
}

/// `L²` distances of `s` to `(E_circ, E_b)`.
pub fn distance_to_equilibria(s: &State, pair: &EquilibriumPair) -> (f64, f64) {
    let w = s.grid().weight();
    let dist = |e: &[f64; 4]| {
        let sq: f64 = (0..4)
            .map(|i| s.species(i).values().iter().map(|v| (v - e[i]).powi(2)).sum::<f64>())
            .sum();
        (sq * w).sqrt()
    };
    (dist(&pair.e_circ), dist(&pair.e_b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub t: f64,
    pub mass: f64,
    pub l2: Vec<f64>,
    pub linf: Vec<f64>,
    /// `E₂` for the four-species system, the quadratic Liapunov functional of
    /// the reduced system, NaN otherwise.
    pub energy: f64,
    pub dist_circ: f64,
    pub dist_b: f64,
    pub min: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryLog {
    pub system: &'static str,
    pub species: Vec<&'static str>,
    pub grid: Grid,
    pub rows: Vec<LogRow>,
    pub snapshots: Vec<(f64, Vec<ScalarField>)>,
    pub final_t: f64,
    pub final_fields: Vec<ScalarField>,
    pub steady_at: Option<f64>,
    pub steps: usize,
    pub final_dt: f64,
}

impl TrajectoryLog {
    pub fn final_state(&self) -> Result<State> {
        let fields: [ScalarField; 4] = self
            .final_fields
            .clone()
            .try_into()
            .map_err(|_| Error::InvalidParameters(format!("{} run does not carry four species", self.system)))?;
        State::new(self.final_t, fields)
    }

    pub fn header(&self) -> String {
        let mut cols = vec!["t".to_string(), "mass".to_string()];
        cols.extend(self.species.iter().map(|s| format!("l2_{s}")));
        cols.extend(self.species.iter().map(|s| format!("linf_{s}")));
        cols.extend(["E2", "dist_circ", "dist_b", "min"].map(String::from));
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for r in &self.rows {
            let mut vals = vec![r.t, r.mass];
            vals.extend(&r.l2);
            vals.extend(&r.linf);
            vals.extend([r.energy, r.dist_circ, r.dist_b, r.min]);
            let line: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}

struct Monitor<'a> {
    system: &'a System,
    grid: Grid,
    pair: Option<EquilibriumPair>,
}

impl<'a> Monitor<'a> {
    fn new(system: &'a System, grid: Grid, u: &[Vec<f64>]) -> Self {
        let w = grid.weight();
        let rho: f64 = u.iter().map(|f| f.iter().sum::<f64>()).sum::<f64>() * w;
        let pair = match system {
            System::Rgs(p) | System::Reduced(p) => compute_equilibria(p, rho, grid.volume()).ok(),
            _ => None,
        };
        Self { system, grid, pair }
    }

    fn row(&self, t: f64, u: &[Vec<f64>]) -> LogRow {
        let w = self.grid.weight();
        let mass = u.iter().map(|f| f.iter().sum::<f64>()).sum::<f64>() * w;
        let l2 = u.iter().map(|f| (f.iter().map(|v| v * v).sum::<f64>() * w).sqrt()).collect();
        let linf = u.iter().map(|f| f.iter().fold(0.0_f64, |m, v| m.max(v.abs()))).collect();
        let min = u.iter().flat_map(|f| f.iter().copied()).fold(f64::INFINITY, f64::min);
        let sq_dist = |lanes: &[&Vec<f64>], e: &[f64]| {
            let sq: f64 = lanes
                .iter()
                .zip(e)
                .map(|(f, c)| f.iter().map(|v| (v - c).powi(2)).sum::<f64>())
                .sum();
            sq * w
        };
        let (mut energy_value, mut dist_circ, mut dist_b) = (f64::NAN, f64::NAN, f64::NAN);
        match (self.system, &self.pair) {
            (System::Rgs(p), Some(pair)) => {
                let lanes: Vec<&Vec<f64>> = u.iter().collect();
                dist_circ = sq_dist(&lanes, &pair.e_circ).sqrt();
                dist_b = sq_dist(&lanes, &pair.e_b).sqrt();
                if let Ok(s) = State::new(t, lanes_to_fields(self.grid, u).try_into().expect("four species")) {
                    energy_value = energy(&PhiProfile::Power(2.0), p, &s).unwrap_or(f64::NAN);
                }
            }
            (System::Rgs(p), None) => {
                if let Ok(s) = State::new(t, lanes_to_fields(self.grid, u).try_into().expect("four species")) {
                    energy_value = energy(&PhiProfile::Power(2.0), p, &s).unwrap_or(f64::NAN);
                }
            }
            (System::Reduced(p), Some(pair)) => {
                let (e1, e4) = (pair.e_b[0], pair.e_b[3]);
                energy_value = p.k[0] * sq_dist(&[&u[0]], &[e1]) + p.k[3] * sq_dist(&[&u[1]], &[e4]);
                dist_b = sq_dist(&[&u[0], &u[1]], &[e1, e4]).sqrt();
            }
            _ => {}
        }
        LogRow {
            t,
            mass,
            l2,
            linf,
            energy: energy_value,
            dist_circ,
            dist_b,
            min,
        }
    }
}

pub fn run(system: &System, init: &[ScalarField], cfg: &SolverConfig) -> Result<TrajectoryLog> {
    run_observed(system, init, cfg, |_, _| {})
}

/// Like [`run`], calling `observer(t, fields)` after every accepted step
/// (and once for the initial data).
pub fn run_observed(
    system: &System,
    init: &[ScalarField],
    cfg: &SolverConfig,
    mut observer: impl FnMut(f64, &[Vec<f64>]),
) -> Result<TrajectoryLog> {
    cfg.validate()?;
    if init.len() != system.species().len() {
        return Err(Error::InvalidParameters(format!(
            "{} system expects {} fields, got {}",
            system.name(),
            system.species().len(),
            init.len()
        )));
    }
    let (grid, mut u) = fields_to_lanes(init)?;
    let mut stepper = Stepper::new(system, grid, cfg.scheme)?;
    let monitor = Monitor::new(system, grid, &u);
    let started_non_negative = u.iter().all(|f| f.iter().all(|v| *v >= 0.0));
    let w = grid.weight();

    let mut rows = vec![monitor.row(0.0, &u)];
    let mut snapshots = Vec::new();
    if cfg.keep_snapshots {
        snapshots.push((0.0, lanes_to_fields(grid, &u)));
    }
    observer(0.0, &u);

    let mut t = 0.0;
    let mut dt = cfg.dt;
    let mut steps = 0;
    let mut outputs = 1usize;
    let mut steady_at = None;
    let mut trial = u.clone();

    while cfg.t_end - t > 1e-12 * cfg.dt {
        let target = (outputs as f64 * cfg.output_every).min(cfg.t_end);
        let mut retries = 0;
        let h = loop {
            let remaining = target - t;
            let h = if remaining - dt < 1e-9 * dt { remaining } else { dt };
            for (tr, src) in trial.iter_mut().zip(&u) {
                tr.copy_from_slice(src);
            }
            stepper.step(&mut trial, h);
            if all_finite(&trial) {
                break h;
            }
            if retries == cfg.max_retries {
                return Err(Error::Instability { t, dt: h });
            }
            retries += 1;
            dt *= cfg.safety;
        };

        let change: f64 = trial
            .iter()
            .zip(&u)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>())
            .sum::<f64>();
        let rate = (change * w).sqrt() / h;
        std::mem::swap(&mut u, &mut trial);
        t = if (target - t - h).abs() <= 1e-9 * dt { target } else { t + h };
        steps += 1;
        observer(t, &u);

        let steady = rate < cfg.steady_tol;
        let at_output = t >= target;
        if at_output || (steady && cfg.stop_on_steady) {
            let row = monitor.row(t, &u);
            if cfg.check_positivity && started_non_negative {
                let sup = row.linf.iter().copied().fold(0.0, f64::max);
                if row.min < -1e-10 * sup {
                    return Err(Error::PositivityViolation { t, min: row.min });
                }
            }
            rows.push(row);
            if cfg.keep_snapshots {
                snapshots.push((t, lanes_to_fields(grid, &u)));
            }
            if at_output {
                outputs += 1;
            }
        }
        if steady && steady_at.is_none() {
            steady_at = Some(t);
            if cfg.stop_on_steady {
                break;
            }
        }
    }

    Ok(TrajectoryLog {
        system: system.name(),
        species: system.species().to_vec(),
        grid,
        rows,
        snapshots,
        final_t: t,
        final_fields: lanes_to_fields(grid, &u),
        steady_at,
        steps,
        final_dt: dt,
    })
}

/// Runs the four-species system from a [`State`].
pub fn run_rgs(p: &Params, init: &State, cfg: &SolverConfig) -> Result<TrajectoryLog> {
    run(&System::Rgs(*p), init.fields(), cfg)
}
