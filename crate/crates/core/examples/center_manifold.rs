//! Slow algebraic decay toward the boundary equilibrium along the kernel
//! direction, compared with the two envelopes.

use reversible_gs::model::Params;
use reversible_gs::stability::{boundary_decay_envelope, center_coefficient_check, CenterManifoldConstants};

fn main() -> reversible_gs::Result<()> {
    let p = Params::unit();
    let c = CenterManifoldConstants::new(&p, 1.0, 1.0);
    println!("K1 = {}  K2 = {}  K4 = {}  k_vec = {:?}", c.k1, c.k2, c.k4, c.k_vec);

    let xis = [1e-4, 1e-3, 1e-2, 5e-2];
    for (xi, r) in xis.iter().zip(center_coefficient_check(&p, 1.0, 1.0, &xis)?) {
        println!("xi = {xi:.0e}  q(N)/xi^2 = {r:.8}  (limit {})", -2.0 * c.k4);
    }

    println!("\n       t            s        lower        upper");
    for pt in boundary_decay_envelope(&p, 1.0, 1.0, 0.01, 500.0, 10)? {
        println!("{:8.1} {:12.6e} {:12.6e} {:12.6e}", pt.t, pt.s, pt.lower, pt.upper);
    }
    Ok(())
}
