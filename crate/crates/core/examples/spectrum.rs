//! Spectra of the linearizations at both equilibria on refining grids.

use reversible_gs::domain::Grid;
use reversible_gs::model::Params;
use reversible_gs::stability::{assemble_homogeneous, assemble_linearization, spectrum, Which};

fn main() -> reversible_gs::Result<()> {
    let p = Params::unit();

    let single = spectrum(&assemble_homogeneous(&p, 1.0, 1.0, Which::B)?)?;
    println!("single cell, E_b: {:?}", single.eigenvalues);

    for cells in [16, 32, 64, 128] {
        let grid = Grid::line(1.0, cells)?;
        for which in [Which::Circ, Which::B] {
            let rep = spectrum(&assemble_linearization(&p, 1.0, which, &grid)?)?;
            println!(
                "{cells:4} cells {:5}: gap {:.6}  max Re {:+.2e}  max |Im| {:.1e}  kernel {}  alignment {:?}",
                which.name(),
                rep.gap,
                rep.max_real(),
                rep.max_abs_imag(),
                rep.kernel_dim,
                rep.kernel_alignment
            );
        }
    }
    Ok(())
}
