//! Where do random initial data end up? Interior equilibrium unless the
//! catalyst species start at zero.

use reversible_gs::domain::Grid;
use reversible_gs::harness::initial::Preset;
use reversible_gs::harness::longterm::{longterm_csv, perturbation_decay, run_longterm};
use reversible_gs::model::Params;
use reversible_gs::solver::SolverConfig;

fn main() -> reversible_gs::Result<()> {
    let p = Params::unit();
    let grid = Grid::line(1.0, 64)?;
    let cfg = SolverConfig { dt: 5e-3, t_end: 1000.0, output_every: 5.0, ..SolverConfig::default() };

    let cases = run_longterm(&p, 1.0, grid, &Preset::RANDOM, 8, 7, &cfg)?;
    print!("{}", longterm_csv(&cases));

    let decay_cfg = SolverConfig { dt: 5e-3, t_end: 200.0, output_every: 1.0, ..cfg };
    let d = perturbation_decay(&p, 1.0, grid, 1e-2, 3, &decay_cfg, 128)?;
    println!("\ndecay rate {:.5}  spectral gap {:.5}", d.rate, d.gap);
    Ok(())
}
