//! Both homogeneous equilibria for a few rate sets, with their energies and
//! the brute-force cross-check.

use reversible_gs::equilibria::{compute_equilibria, equilibrium_energy_e2, homogeneous_steady_oracle};
use reversible_gs::model::{reaction_point, Params};

fn main() -> reversible_gs::Result<()> {
    let rate_sets = [[1.0, 1.0, 1.0, 1.0], [2.0, 1.0, 1.0, 1.0], [0.3, 5.0, 0.2, 1.7]];
    for k in rate_sets {
        let p = Params::new([1e-2; 4], k)?;
        let pair = compute_equilibria(&p, 1.0, 1.0)?;
        let (ec, eb) = equilibrium_energy_e2(&pair, &p);
        println!("k = {k:?}  K0 = {}", pair.k0);
        println!("  E_circ = {:.6?}  E2 = {ec:.6}", pair.e_circ);
        println!("  E_b    = {:.6?}  E2 = {eb:.6}", pair.e_b);

        let worst = [pair.e_circ, pair.e_b]
            .iter()
            .flat_map(|e| reaction_point(&p.k, *e))
            .fold(0.0_f64, |m, r| m.max(r.abs()));
        println!("  max |r| at equilibria = {worst:.1e}");
        println!("  oracle: {:.6?}", homogeneous_steady_oracle(&p, 1.0, 1.0)?);
    }
    Ok(())
}
