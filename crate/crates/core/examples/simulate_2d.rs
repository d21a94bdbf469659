//! A 2D run with the Strang scheme, writing and reading back a snapshot.

use reversible_gs::domain::{mass, Grid};
use reversible_gs::equilibria::compute_equilibria;
use reversible_gs::harness::initial::{preset_state, rng, Preset};
use reversible_gs::model::Params;
use reversible_gs::snapshot::{read_snapshot, write_snapshot};
use reversible_gs::solver::{run_rgs, Scheme, SolverConfig, System};

fn main() -> reversible_gs::Result<()> {
    let p = Params::new([2e-2, 1e-2, 5e-3, 2e-2], [1.0, 0.5, 2.0, 1.0])?;
    let grid = Grid::rect([1.0, 2.0], [32, 64])?;
    let init = preset_state(&p, 2.0, grid, Preset::Generic, &mut rng(5))?;
    let cfg = SolverConfig { dt: 1e-2, t_end: 100.0, output_every: 10.0, scheme: Scheme::Strang, ..SolverConfig::default() };

    let log = run_rgs(&p, &init, &cfg)?;
    for r in &log.rows {
        println!("t = {:6.1}  mass = {:.15}  E2 = {:.8}  dist_circ = {:.3e}", r.t, r.mass, r.energy, r.dist_circ);
    }
    let pair = compute_equilibria(&p, 2.0, grid.volume())?;
    println!("E_circ = {:.6?}", pair.e_circ);

    let path = std::env::temp_dir().join("rgs_simulate_2d.txt");
    let species = System::Rgs(p).species();
    write_snapshot(&path, log.final_t, species, &log.final_fields)?;
    let back = read_snapshot(&path)?;
    println!("snapshot at t = {} with {:?}, round trip exact: {}", back.t, back.species, back.fields == log.final_fields);
    println!("final mass {:.15}", mass(&log.final_state()?));
    Ok(())
}
