//! Step-by-step energy bookkeeping and maximum-principle traces.

use std::fmt::Write as _;

use crate::domain::{ScalarField, State};
use crate::error::{Error, Result};
use crate::lyapunov::{breakdown, energy_identity_residual, scaled_sup, PhiProfile};
use crate::model::Params;
use crate::solver::{run_observed, SolverConfig, System};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub production: f64,
    /// `(E_{n+1} - E_n)/dt + D + R` over the step ending at `t`; NaN on the
    /// first row.
    pub residual: f64,
}

fn to_state(p_t: f64, u: &[Vec<f64>], like: &State) -> Result<State> {
    let grid = *like.grid();
    let fields: [ScalarField; 4] = std::array::from_fn(|i| {
        ScalarField::new(grid, u[i].clone()).expect("solver lanes match the grid")
    });
    State::new(p_t, fields)
}

/// Runs the four-species system and records the energy budget after every
/// step, along with the identity residual.
pub fn energy_audit(phi: &PhiProfile, p: &Params, init: &State, cfg: &SolverConfig) -> Result<Vec<AuditRow>> {
    let cfg = SolverConfig {
        stop_on_steady: false,
        ..cfg.clone()
    };
    let mut rows = Vec::new();
    let mut prev: Option<State> = None;
    let mut failure: Option<Error> = None;
    run_observed(&System::Rgs(*p), init.fields(), &cfg, |t, u| {
        if failure.is_some() {
            return;
        }
        let mut step = || -> Result<AuditRow> {
            let s = to_state(t, u, init)?;
            let b = breakdown(phi, p, &s)?;
            let residual = match &prev {
                Some(q) => energy_identity_residual(phi, p, &[q.clone(), s.clone()])?[0],
                None => f64::NAN,
            };
            prev = Some(s);
            Ok(AuditRow {
                t,
                energy: b.e,
                dissipation: b.d,
                production: b.r,
                residual,
            })
        };
        match step() {
            Ok(row) => rows.push(row),
            Err(e) => failure = Some(e),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(rows),
    }
}

pub fn audit_csv(rows: &[AuditRow]) -> String {
    let mut out = String::from("t,E,D,R,residual\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.t, r.energy, r.dissipation, r.production, r.residual
        );
    }
    out
}

/// Largest relative energy increase between consecutive audit rows.
pub fn worst_energy_increase(rows: &[AuditRow]) -> f64 {
    rows.windows(2)
        .map(|w| (w[1].energy - w[0].energy) / w[0].energy.abs().max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `(t, max{‖u1‖∞, k2‖u2‖∞, k2k3‖u3‖∞, (k4/k1)‖u4‖∞})` after every step.
pub fn max_principle_trace(p: &Params, init: &State, cfg: &SolverConfig) -> Result<Vec<(f64, f64)>> {
    let cfg = SolverConfig {
        stop_on_steady: false,
        ..cfg.clone()
    };
    let mut trace = Vec::new();
    run_observed(&System::Rgs(*p), init.fields(), &cfg, |t, u| {
        if let Ok(s) = to_state(t, u, init) {
            trace.push((t, scaled_sup(p, &s)));
        }
    })?;
    Ok(trace)
}

/// Largest relative excess of the scaled sup-norm over its value at the
/// first traced time `>= t0`.
pub fn max_principle_excess(trace: &[(f64, f64)], t0: f64) -> Option<f64> {
    let start = trace.iter().position(|(t, _)| *t >= t0)?;
    let m0 = trace[start].1;
    Some(
        trace[start..]
            .iter()
            .map(|(_, m)| (m - m0) / m0)
            .fold(f64::NEG_INFINITY, f64::max),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Grid;

    fn setup() -> (Params, State) {
        let p = Params::unit();
        let g = Grid::line(1.0, 32).unwrap();
        let f = |c: f64, s: f64| ScalarField::from_fn(g, move |[x, _]| c + s * (3.0 * x).cos());
        let s = State::new(0.0, [f(0.4, 0.1), f(0.2, 0.05), f(0.1, -0.05), f(0.3, 0.1)]).unwrap();
        (p, s)
    }

    #[test]
    fn audit_energy_decreases_and_residual_is_small() {
        let (p, s) = setup();
        let cfg = SolverConfig {
            t_end: 0.1,
            ..SolverConfig::default()
        };
        let rows = energy_audit(&PhiProfile::Power(2.0), &p, &s, &cfg).unwrap();
        assert_eq!(rows.len(), 101);
        assert!(rows[0].residual.is_nan());
        assert!(worst_energy_increase(&rows) <= 0.0);
        let worst = rows[1..].iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
        assert!(worst < 1e-2, "{worst}");
    }

    #[test]
    fn entropy_audit_rejects_negative_data() {
        let (p, s) = setup();
        let g = *s.grid();
        let bad = State::homogeneous(g, 0.0, [-0.1, 0.2, 0.2, 0.2]);
        let cfg = SolverConfig {
            t_end: 0.01,
            check_positivity: false,
            ..SolverConfig::default()
        };
        assert!(energy_audit(&PhiProfile::Entropy, &p, &bad, &cfg).is_err());
        assert!(energy_audit(&PhiProfile::Entropy, &p, &s, &cfg).is_ok());
    }

    #[test]
    fn scaled_sup_does_not_grow() {
        let (p, s) = setup();
        let cfg = SolverConfig {
            t_end: 2.0,
            ..SolverConfig::default()
        };
        let trace = max_principle_trace(&p, &s, &cfg).unwrap();
        assert!(max_principle_excess(&trace, 0.1).unwrap() <= 1e-12);
        assert!(max_principle_excess(&trace, 5.0).is_none());
    }
}
