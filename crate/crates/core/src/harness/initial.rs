//! Named and seeded random initial data.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{mass, Grid, ScalarField, State};
use crate::equilibria::{compute_equilibria, equilibrium_energy_e2};
use crate::error::{Error, Result};
use crate::lyapunov::{energy, PhiProfile};
use crate::model::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Exactly the interior equilibrium.
    Circ,
    /// `u2 = u3 = 0`, random positive `u1`, `u4`.
    Boundary,
    /// All four species random positive.
    Generic,
    /// Small modulation of the interior equilibrium, `E2` below `E2(E_b)`.
    LowEnergy,
    /// `u2 = 0` but random positive `u3`.
    U3Only,
}

impl Preset {
    pub const RANDOM: [Preset; 4] = [Preset::Boundary, Preset::Generic, Preset::LowEnergy, Preset::U3Only];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Circ => "circ",
            Preset::Boundary => "boundary",
            Preset::Generic => "generic",
            Preset::LowEnergy => "low-energy",
            Preset::U3Only => "u3-only",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "circ" => Preset::Circ,
            "boundary" => Preset::Boundary,
            "generic" => Preset::Generic,
            "low-energy" => Preset::LowEnergy,
            "u3-only" => Preset::U3Only,
            _ => {
                return Err(Error::MalformedValue {
                    key: "preset".into(),
                    value: s.into(),
                    reason: "unknown preset".into(),
                })
            }
        })
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `mean (1 + Σ α_m cos(m π x / Lx) cos(n π y / Ly))` with three random modes
/// and `Σ |α| ≤ rel_amp`, so the field stays positive for `rel_amp < 1`.
pub fn random_smooth(grid: Grid, rng: &mut impl Rng, mean: f64, rel_amp: f64) -> ScalarField {
    let lx = grid.extent()[0];
    let ly = if grid.dim() == 2 { grid.extent()[1] } else { 1.0 };
    let modes: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            let m = rng.gen_range(1..=4) as f64;
            let n = if grid.dim() == 2 { rng.gen_range(0..=3) as f64 } else { 0.0 };
            (m, n, rng.gen_range(-1.0..1.0) * rel_amp / 3.0)
        })
        .collect();
    ScalarField::from_fn(grid, |[x, y]| {
        let wiggle: f64 = modes
            .iter()
            .map(|(m, n, a)| a * (m * PI * x / lx).cos() * (n * PI * y / ly).cos())
            .sum();
        mean * (1.0 + wiggle)
    })
}

fn random_positive(grid: Grid, rng: &mut impl Rng, mean: std::ops::Range<f64>) -> ScalarField {
    let mean = rng.gen_range(mean);
    random_smooth(grid, rng, mean, 0.8)
}

/// Rescales all species by a common factor so that the total mass is `rho`.
pub fn normalize_mass(s: State, rho: f64) -> Result<State> {
    let m = mass(&s);
    if !(m > 0.0) {
        return Err(Error::InvalidParameters("cannot normalize data with non-positive mass".into()));
    }
    let c = rho / m;
    let t = s.t;
    State::new(t, s.into_fields().map(|f| f.map(|v| c * v)))
}

pub fn preset_state(p: &Params, rho: f64, grid: Grid, preset: Preset, rng: &mut impl Rng) -> Result<State> {
    let pair = compute_equilibria(p, rho, grid.volume())?;
    let zero = || ScalarField::zeros(grid);
    let s = match preset {
        Preset::Circ => return Ok(State::homogeneous(grid, 0.0, pair.e_circ)),
        Preset::Boundary => {
            let u1 = random_positive(grid, rng, 0.2..1.0);
            let u4 = random_positive(grid, rng, 0.2..1.0);
            State::new(0.0, [u1, zero(), zero(), u4])?
        }
        Preset::Generic => {
            let fields = std::array::from_fn(|_| random_positive(grid, rng, 0.2..1.0));
            State::new(0.0, fields)?
        }
        Preset::LowEnergy => {
            let fields = std::array::from_fn(|i| random_smooth(grid, rng, pair.e_circ[i], 0.2));
            State::new(0.0, fields)?
        }
        Preset::U3Only => {
            let u1 = random_positive(grid, rng, 0.2..1.0);
            let u3 = random_positive(grid, rng, 0.05..0.5);
            let u4 = random_positive(grid, rng, 0.2..1.0);
            State::new(0.0, [u1, zero(), u3, u4])?
        }
    };
    let s = normalize_mass(s, rho)?;
    if preset == Preset::LowEnergy {
        let e = energy(&PhiProfile::Power(2.0), p, &s)?;
        let (_, e_b) = equilibrium_energy_e2(&pair, p);
        if e >= e_b {
            return Err(Error::InvalidParameters(format!(
                "low-energy preset produced E2 = {e} >= E2(E_b) = {e_b}"
            )));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_carry_the_mass_and_sign_pattern() {
        let p = Params::unit();
        let g = Grid::line(1.0, 64).unwrap();
        let mut r = rng(3);
        for preset in Preset::RANDOM {
            let s = preset_state(&p, 2.0, g, preset, &mut r).unwrap();
            assert!((mass(&s) - 2.0).abs() < 1e-13);
            assert!(s.min() >= 0.0);
            let u2 = s.species(1).max();
            let u3 = s.species(2).max();
            match preset {
                Preset::Boundary => assert!(u2 == 0.0 && u3 == 0.0),
                Preset::U3Only => assert!(u2 == 0.0 && u3 > 0.0),
                _ => assert!(u2 > 0.0 && u3 > 0.0),
            }
        }
    }

    #[test]
    fn seeded_data_is_reproducible() {
        let p = Params::unit();
        let g = Grid::rect([1.0, 1.0], [6, 5]).unwrap();
        let a = preset_state(&p, 1.0, g, Preset::Generic, &mut rng(11)).unwrap();
        let b = preset_state(&p, 1.0, g, Preset::Generic, &mut rng(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parses_names() {
        for preset in [Preset::Circ, Preset::Boundary, Preset::Generic, Preset::LowEnergy, Preset::U3Only] {
            assert_eq!(preset.name().parse::<Preset>().unwrap(), preset);
        }
        assert!("spots".parse::<Preset>().is_err());
    }
}
