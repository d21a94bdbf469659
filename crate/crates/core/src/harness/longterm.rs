//! Long-time classification of trajectories and decay toward the interior
//! equilibrium.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::domain::{integrate, Grid, ScalarField, State};
use crate::equilibria::{compute_equilibria, EquilibriumPair};
use crate::error::Result;
use crate::harness::initial::{preset_state, rng, Preset};
use crate::model::Params;
use crate::solver::{distance_to_equilibria, run_rgs, SolverConfig, TrajectoryLog};
use crate::stability::{assemble_linearization_with_limit, assemble_homogeneous, spectrum, Which};

/// Distance below which a non-steady final state still counts as converged.
pub const CLOSE_ENOUGH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    Circ,
    Boundary,
    Unresolved,
}

impl Limit {
    pub fn name(self) -> &'static str {
        match self {
            Limit::Circ => "E_circ",
            Limit::Boundary => "E_b",
            Limit::Unresolved => "UNRESOLVED",
        }
    }
}

/// The limit predicted from the data alone: `E_b` exactly when `u2` and `u3`
/// vanish identically.
pub fn expected_limit(s: &State) -> Limit {
    let catalyst = integrate(s.species(1)) + integrate(s.species(2));
    if catalyst > 0.0 {
        Limit::Circ
    } else {
        Limit::Boundary
    }
}

pub fn classify(log: &TrajectoryLog, pair: &EquilibriumPair) -> Result<Limit> {
    let (dc, db) = distance_to_equilibria(&log.final_state()?, pair);
    if log.steady_at.is_none() && dc.min(db) > CLOSE_ENOUGH {
        return Ok(Limit::Unresolved);
    }
    Ok(if dc <= db { Limit::Circ } else { Limit::Boundary })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongtermCase {
    pub name: String,
    pub preset: Preset,
    pub expected: Limit,
    pub limit: Limit,
    pub dist_circ: f64,
    pub dist_b: f64,
    pub time_to_steady: Option<f64>,
    /// Largest increase rate of `E2` between consecutive log rows.
    pub max_e2_slope: f64,
}

pub fn max_energy_slope(log: &TrajectoryLog) -> f64 {
    log.rows
        .windows(2)
        .map(|w| (w[1].energy - w[0].energy) / (w[1].t - w[0].t))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Runs `count` seeded initial conditions, cycling through `presets`, in
/// parallel. Case `i` uses seed `seed + i`, so results do not depend on
/// scheduling.
pub fn run_longterm(
    p: &Params,
    rho: f64,
    grid: Grid,
    presets: &[Preset],
    count: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<Vec<LongtermCase>> {
    let pair = compute_equilibria(p, rho, grid.volume())?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let preset = presets[i % presets.len()];
            let init = preset_state(p, rho, grid, preset, &mut rng(seed.wrapping_add(i as u64)))?;
            let log = run_rgs(p, &init, cfg)?;
            let (dist_circ, dist_b) = distance_to_equilibria(&log.final_state()?, &pair);
            Ok(LongtermCase {
                name: format!("{}-{i:02}", preset.name()),
                preset,
                expected: expected_limit(&init),
                limit: classify(&log, &pair)?,
                dist_circ,
                dist_b,
                time_to_steady: log.steady_at,
                max_e2_slope: max_energy_slope(&log),
            })
        })
        .collect()
}

pub fn longterm_csv(cases: &[LongtermCase]) -> String {
    let mut out = String::from("ic_name,expected,limit,dist_circ,dist_b,time_to_steady,max_e2_slope\n");
    for c in cases {
        let steady = c.time_to_steady.map_or("nan".to_string(), |t| format!("{t:.16e}"));
        let _ = writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{},{:.16e}",
            c.name,
            c.expected.name(),
            c.limit.name(),
            c.dist_circ,
            c.dist_b,
            steady,
            c.max_e2_slope
        );
    }
    out
}

#[derive(Debug, Clone)]
pub struct DecayReport {
    /// Fitted `-d/dt log ‖u - E_circ‖₂`.
    pub rate: f64,
    /// Spectral gap of the discrete linearization at `E_circ`.
    pub gap: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Zero-mass smooth perturbation with `L²` norm `amplitude`.
pub fn zero_mass_perturbation(grid: Grid, amplitude: f64, rng: &mut impl Rng) -> [ScalarField; 4] {
    let mut fields: [ScalarField; 4] = std::array::from_fn(|_| {
        let m = rng.gen_range(1..=3) as f64;
        let phase = rng.gen_range(0.0..1.0);
        let lx = grid.extent()[0];
        ScalarField::from_fn(grid, move |[x, _]| (m * std::f64::consts::PI * x / lx).cos() + phase - 0.5)
    });
    let total: f64 = fields.iter().map(integrate).sum::<f64>() / (4.0 * grid.volume());
    for f in fields.iter_mut() {
        f.values_mut().iter_mut().for_each(|v| *v -= total);
    }
    let w = grid.weight();
    let norm = fields
        .iter()
        .map(|f| f.values().iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        .sqrt()
        * w.sqrt();
    for f in fields.iter_mut() {
        f.values_mut().iter_mut().for_each(|v| *v *= amplitude / norm);
    }
    fields
}

/// Starts at `E_circ` plus a zero-mass perturbation and fits the decay rate
/// of the distance over `[t_end/4, t_end]`.
pub fn perturbation_decay(
    p: &Params,
    rho: f64,
    grid: Grid,
    amplitude: f64,
    seed: u64,
    cfg: &SolverConfig,
    dense_limit: usize,
) -> Result<DecayReport> {
    let pair = compute_equilibria(p, rho, grid.volume())?;
    let bump = zero_mass_perturbation(grid, amplitude, &mut rng(seed));
    let fields = std::array::from_fn(|i| bump[i].map(|v| v + pair.e_circ[i]));
    let init = State::new(0.0, fields)?;
    let cfg = SolverConfig {
        stop_on_steady: false,
        ..cfg.clone()
    };
    let log = run_rgs(p, &init, &cfg)?;
    let samples: Vec<(f64, f64)> = log.rows.iter().map(|r| (r.t, r.dist_circ)).collect();
    let fit: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(t, d)| *t >= 0.25 * cfg.t_end && *d > 1e-11)
        .map(|(t, d)| (*t, d.ln()))
        .collect();
    let rate = -least_squares_slope(&fit);

    let op = if grid.len() <= dense_limit {
        assemble_linearization_with_limit(p, rho, Which::Circ, &grid, dense_limit)?
    } else {
        // too large for a dense solve; the reaction-only gap bounds the full one from above
        assemble_homogeneous(p, rho, grid.volume(), Which::Circ)?
    };
    let gap = spectrum(&op)?.gap;
    Ok(DecayReport { rate, gap, samples })
}

pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}
