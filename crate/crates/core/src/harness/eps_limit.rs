//! Comparison of the four-species system with `k2 = k3 = k4 = d4 = ε`,
//! `u4(0) = a/ε` against classical Gray-Scott plus the `u3` accumulation
//! equation.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::domain::{norm_p, Grid, ScalarField};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::longterm::least_squares_slope;
use crate::model::{GSParams, Params};
use crate::solver::{run, Scheme, SolverConfig, System};

#[derive(Debug, Clone)]
pub struct EpsLimitSetup {
    pub grid: Grid,
    /// `d1, d2, d3`.
    pub d: [f64; 3],
    pub k1: f64,
    pub a: ScalarField,
    /// `u1, u2, u3` at `t = 0`.
    pub init: [ScalarField; 3],
    pub eps: Vec<f64>,
    pub horizon: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub p_norm: f64,
    pub compare_every: f64,
}

impl EpsLimitSetup {
    /// Default data: `u1 = 1 + 0.2 cos(2πx/L)`, `u2` a Gaussian bump on a
    /// floor of `0.1`, `u3 = 0.1`, `a = feed + feed_amp cos(πx/L)`.
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let grid = cfg.grid()?;
        let l = grid.extent()[0];
        let a = ScalarField::from_fn(grid, |[x, _]| cfg.feed + cfg.feed_amp * (PI * x / l).cos());
        let u1 = ScalarField::from_fn(grid, |[x, _]| 1.0 + 0.2 * (2.0 * PI * x / l).cos());
        let u2 = ScalarField::from_fn(grid, |[x, _]| 0.1 * (1.0 + (-(x / l - 0.5).powi(2) / 0.02).exp()));
        let u3 = ScalarField::constant(grid, 0.1);
        let setup = Self {
            grid,
            d: [cfg.params.d[0], cfg.params.d[1], cfg.params.d[2]],
            k1: cfg.eps_k1,
            a,
            init: [u1, u2, u3],
            eps: cfg.eps_list.clone(),
            horizon: cfg.horizon,
            dt: cfg.dt,
            scheme: cfg.scheme,
            p_norm: cfg.p_norm,
            compare_every: cfg.compare_every,
        };
        setup.validate()?;
        Ok(setup)
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0)) || self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("eps list must be positive and strictly decreasing".into()));
        }
        let negative = |f: &ScalarField| f.min() < 0.0;
        if negative(&self.a) || self.init.iter().any(negative) {
            return Err(Error::Config("eps-limit data (u1, u2, u3, a) must be non-negative".into()));
        }
        for f in &self.init {
            f.check_same_grid(&self.a)?;
        }
        Ok(())
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            dt: self.dt,
            t_end: self.horizon,
            scheme: self.scheme,
            output_every: self.compare_every.max(self.dt),
            stop_on_steady: false,
            keep_snapshots: true,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsRow {
    pub eps: f64,
    /// `sup_t ‖u_i,ε - u_i‖_p` for `i = 1, 2, 3` and `sup_t ‖ε u4,ε - a‖₂`.
    pub errors: Option<[f64; 4]>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsLimitReport {
    pub p_norm: f64,
    pub rows: Vec<EpsRow>,
    /// Least-squares slopes of `log error` against `log ε`, per column.
    pub slopes: [f64; 4],
}

impl EpsLimitReport {
    fn column(&self, i: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.errors.map(|e| (r.eps, e[i])))
            .collect()
    }

    /// Column `i` strictly decreases as `ε` decreases (and no row failed).
    pub fn strictly_decreasing(&self, i: usize) -> bool {
        let col = self.column(i);
        col.len() == self.rows.len() && col.windows(2).all(|w| w[1].1 < w[0].1)
    }

    /// `max/min` of `sup_t ‖ε u4 - a‖₂ / √ε` over the surviving rows.
    pub fn u4_ratio_spread(&self) -> f64 {
        let ratios: Vec<f64> = self.column(3).iter().map(|(e, v)| v / e.sqrt()).collect();
        let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,err_u1,err_u2,err_u3,err_u4,u4_over_sqrt_eps,status\n");
        for r in &self.rows {
            match (&r.errors, &r.failure) {
                (Some(e), _) => {
                    let _ = writeln!(
                        out,
                        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},ok",
                        r.eps,
                        e[0],
                        e[1],
                        e[2],
                        e[3],
                        e[3] / r.eps.sqrt()
                    );
                }
                (None, reason) => {
                    let reason = reason.as_deref().unwrap_or("failed").replace(',', ";");
                    let _ = writeln!(out, "{:.16e},nan,nan,nan,nan,nan,{reason}", r.eps);
                }
            }
        }
        out
    }

    pub fn slopes_csv(&self) -> String {
        let s = self.slopes;
        format!(
            "column,slope\nerr_u1,{:.16e}\nerr_u2,{:.16e}\nerr_u3,{:.16e}\nerr_u4,{:.16e}\n",
            s[0], s[1], s[2], s[3]
        )
    }
}

pub fn run_eps_limit(setup: &EpsLimitSetup) -> Result<EpsLimitReport> {
    setup.validate()?;
    let cfg = setup.solver();
    let gs = GSParams::new(setup.d[0], setup.d[1], setup.k1, setup.a.clone())?;
    // the reference run does not depend on ε
    let reference = run(&System::LimitU3 { gs, d3: setup.d[2] }, &setup.init, &cfg)?;

    let rows = setup
        .eps
        .par_iter()
        .map(|&eps| match eps_errors(setup, &cfg, &reference.snapshots, eps) {
            Ok(errors) => EpsRow {
                eps,
                errors: Some(errors),
                failure: None,
            },
            Err(e) => EpsRow {
                eps,
                errors: None,
                failure: Some(e.to_string()),
            },
        })
        .collect::<Vec<_>>();

    let mut slopes = [f64::NAN; 4];
    for (i, slope) in slopes.iter_mut().enumerate() {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| r.errors.map(|e| (r.eps.ln(), e[i].ln())))
            .filter(|(_, y)| y.is_finite())
            .collect();
        *slope = least_squares_slope(&pts);
    }
    Ok(EpsLimitReport {
        p_norm: setup.p_norm,
        rows,
        slopes,
    })
}

fn eps_errors(
    setup: &EpsLimitSetup,
    cfg: &SolverConfig,
    reference: &[(f64, Vec<ScalarField>)],
    eps: f64,
) -> Result<[f64; 4]> {
    let p = Params::new([setup.d[0], setup.d[1], setup.d[2], eps], [setup.k1, eps, eps, eps])?;
    let u4 = setup.a.map(|v| v / eps);
    let [u1, u2, u3] = setup.init.clone();
    let log = run(&System::Rgs(p), &[u1, u2, u3, u4], cfg)?;
    if log.snapshots.len() != reference.len() {
        return Err(Error::Config(format!(
            "eps = {eps}: {} samples against {} reference samples (time step was reduced)",
            log.snapshots.len(),
            reference.len()
        )));
    }
    let mut errors = [0.0_f64; 4];
    for ((t, fields), (t_ref, ref_fields)) in log.snapshots.iter().zip(reference) {
        if (t - t_ref).abs() > 1e-9 * setup.horizon {
            return Err(Error::Config(format!("sample times diverged at t = {t}")));
        }
        for i in 0..3 {
            let diff = fields[i].zip_map(&ref_fields[i], |x, y| x - y)?;
            errors[i] = errors[i].max(norm_p(&diff, setup.p_norm)?);
        }
        let drift = fields[3].zip_map(&setup.a, |x, a| eps * x - a)?;
        errors[3] = errors[3].max(norm_p(&drift, 2.0)?);
    }
    Ok(errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_setup() -> EpsLimitSetup {
        let cfg = ExperimentConfig {
            cells: 16,
            dt: 1e-2,
            horizon: 2.0,
            compare_every: 0.1,
            eps_list: vec![0.1, 0.05],
            ..ExperimentConfig::default()
        };
        EpsLimitSetup::from_config(&cfg).unwrap()
    }

    #[test]
    fn errors_shrink_with_eps() {
        let report = run_eps_limit(&small_setup()).unwrap();
        assert_eq!(report.rows.len(), 2);
        for i in 0..4 {
            assert!(report.strictly_decreasing(i), "column {i}: {:?}", report.rows);
        }
        assert!(report.to_csv().lines().count() == 3);
    }

    #[test]
    fn no_feed_and_no_catalyst_gives_zero_u2_error() {
        let mut setup = small_setup();
        setup.a = ScalarField::zeros(setup.grid);
        setup.init[1] = ScalarField::zeros(setup.grid);
        // u3 feeds u2 through the reverse channel, so it must vanish too
        setup.init[2] = ScalarField::zeros(setup.grid);
        let report = run_eps_limit(&setup).unwrap();
        for r in &report.rows {
            assert_eq!(r.errors.unwrap()[1], 0.0);
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let setup = small_setup();
        assert_eq!(run_eps_limit(&setup).unwrap(), run_eps_limit(&setup).unwrap());
    }

    #[test]
    fn rejects_bad_lists_and_data() {
        let mut setup = small_setup();
        setup.eps = vec![0.05, 0.1];
        assert!(run_eps_limit(&setup).is_err());
        let mut setup = small_setup();
        setup.init[0] = ScalarField::constant(setup.grid, -1.0);
        assert!(run_eps_limit(&setup).is_err());
    }
}
