//! Fast-reversible-step limit: the four-species model against classical
//! Gray-Scott as epsilon shrinks. Smaller grid than the CLI default so it
//! finishes in a couple of seconds.

use reversible_gs::harness::eps_limit::{run_eps_limit, EpsLimitSetup};
use reversible_gs::harness::ExperimentConfig;

fn main() -> reversible_gs::Result<()> {
    let cfg = ExperimentConfig { cells: 64, dt: 2e-3, ..ExperimentConfig::default() };
    let report = run_eps_limit(&EpsLimitSetup::from_config(&cfg)?)?;
    print!("{}", report.to_csv());
    print!("{}", report.slopes_csv());
    println!("u4/sqrt(eps) spread: {:.3}", report.u4_ratio_spread());
    Ok(())
}
