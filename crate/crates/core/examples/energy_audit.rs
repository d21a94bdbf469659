//! The energy budget along a short run for several convex profiles, and how
//! the identity residual shrinks with dt. The clipped profile has a kink, so
//! its residual stalls while the energy still falls.

use reversible_gs::domain::Grid;
use reversible_gs::harness::audit::{energy_audit, worst_energy_increase};
use reversible_gs::harness::initial::{preset_state, rng, Preset};
use reversible_gs::lyapunov::PhiProfile;
use reversible_gs::model::Params;
use reversible_gs::solver::SolverConfig;

fn main() -> reversible_gs::Result<()> {
    let p = Params::unit();
    let grid = Grid::line(1.0, 64)?;
    let init = preset_state(&p, 1.0, grid, Preset::Generic, &mut rng(2))?;

    for name in ["power2", "power:3", "entropy", "clip_above:0.2"] {
        let phi = PhiProfile::parse(name)?;
        let mut prev = None;
        for dt in [4e-3, 2e-3, 1e-3] {
            let cfg = SolverConfig { dt, t_end: 0.4, ..SolverConfig::default() };
            let rows = energy_audit(&phi, &p, &init, &cfg)?;
            let res = rows[1..].iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
            let order = prev.map(|r: f64| (r / res).log2());
            println!(
                "{name:13} dt = {dt:.0e}  E(0.4) = {:.8}  max residual {res:.3e}  order {:?}  worst rise {:.1e}",
                rows.last().unwrap().energy,
                order,
                worst_energy_increase(&rows)
            );
            prev = Some(res);
        }
    }
    Ok(())
}
