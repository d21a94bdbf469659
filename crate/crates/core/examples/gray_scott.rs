//! Classical two-species Gray-Scott with a spatially varying feed (a u2 burst
//! that eats u1 and then washes out), and the reduced linear exchange
//! between u1 and u4.

use reversible_gs::domain::{Grid, ScalarField};
use reversible_gs::model::{GSParams, Params};
use reversible_gs::solver::{run, SolverConfig, System};

fn main() -> reversible_gs::Result<()> {
    let grid = Grid::line(1.0, 128)?;
    let a = ScalarField::from_fn(grid, |[x, _]| 0.3 + 0.05 * (std::f64::consts::PI * x).cos());
    let gs = GSParams::new(1e-2, 5e-3, 0.01, a)?;
    let u1 = ScalarField::constant(grid, 4.0);
    let u2 = ScalarField::from_fn(grid, |[x, _]| 0.05 + (-(x - 0.5f64).powi(2) / 0.01).exp());
    let cfg = SolverConfig { dt: 1e-3, t_end: 20.0, output_every: 2.0, stop_on_steady: false, ..SolverConfig::default() };
    let log = run(&System::Gs(gs), &[u1.clone(), u2], &cfg)?;
    println!("{}", log.header());
    for r in &log.rows {
        println!("t = {:5.1}  l2 = {:.6?}  linf = {:.6?}", r.t, r.l2, r.linf);
    }

    let p = Params::unit();
    let u4 = ScalarField::from_fn(grid, |[x, _]| 0.2 * (1.0 + x));
    let cfg = SolverConfig { t_end: 50.0, output_every: 10.0, ..cfg };
    let log = run(&System::Reduced(p), &[u1, u4], &cfg)?;
    for r in &log.rows {
        println!("reduced t = {:5.1}  k1|u1-Eb1|^2 + k4|u4-Eb4|^2 = {:.6e}", r.t, r.energy);
    }
    Ok(())
}
