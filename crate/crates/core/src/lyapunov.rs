//! Convex-profile energies `E_φ`, their dissipation `D_φ` and reaction
//! production `R_φ`.
//!
//! Species are compared through the rescaled variables
//! `(u1, k2 u2, k2 k3 u3, (k4/k1) u4)`. The discrete dissipation uses the
//! secant `(φ'(a) - φ'(b)) / (a - b)` of the two cells adjacent to a face in
//! place of `φ''`; with the mirror-ghost Laplacian this makes the
//! semi-discrete identity `dE/dt + D + R = 0` exact, so any residual comes
//! from time stepping alone.

use crate::domain::State;
use crate::error::{Error, Result};
use crate::model::Params;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiProfile {
    /// `|r|^p`, `p >= 2`.
    Power(f64),
    /// `r ln r - r + 1` on `r >= 0`.
    Entropy,
    /// `(r - M)_+`.
    ClipAbove(f64),
    /// `(-r - M)_+`.
    ClipBelow(f64),
}

impl PhiProfile {
    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 2.0) {
            return Err(Error::InvalidParameters(format!("power profile needs p >= 2, got {p}")));
        }
        Ok(Self::Power(p))
    }

    /// Parses `power2`, `power3`, `power:2.5`, `entropy`, `clip_above:M`,
    /// `clip_below:M`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::MalformedValue {
            key: "profile".into(),
            value: s.into(),
            reason: reason.into(),
        };
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| bad("missing numeric argument"))?
                .trim()
                .parse::<f64>()
                .map_err(|_| bad("argument is not a number"))
        };
        match name.trim() {
            "entropy" => Ok(Self::Entropy),
            "power" => Self::power(number(arg)?),
            "clip_above" => Ok(Self::ClipAbove(number(arg)?)),
            "clip_below" => Ok(Self::ClipBelow(number(arg)?)),
            other => match other.strip_prefix("power") {
                Some(p) => Self::power(p.parse().map_err(|_| bad("unknown profile"))?),
                None => Err(bad("unknown profile")),
            },
        }
    }

    pub fn phi(&self, r: f64) -> f64 {
        match *self {
            Self::Power(p) => r.abs().powf(p),
            Self::Entropy => {
                if r == 0.0 {
                    1.0
                } else {
                    r * r.ln() - r + 1.0
                }
            }
            Self::ClipAbove(m) => (r - m).max(0.0),
            Self::ClipBelow(m) => (-r - m).max(0.0),
        }
    }

    pub fn dphi(&self, r: f64) -> f64 {
        match *self {
            Self::Power(p) => p * r.abs().powf(p - 1.0) * r.signum(),
            Self::Entropy => r.ln(),
            Self::ClipAbove(m) => {
                if r > m {
                    1.0
                } else {
                    0.0
                }
            }
            Self::ClipBelow(m) => {
                if -r > m {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Second derivative where it exists; zero on both sides of a clip kink.
    pub fn d2phi(&self, r: f64) -> f64 {
        match *self {
            Self::Power(p) => p * (p - 1.0) * r.abs().powf(p - 2.0),
            Self::Entropy => 1.0 / r,
            Self::ClipAbove(_) | Self::ClipBelow(_) => 0.0,
        }
    }

    /// Face value of `φ''` between two neighbouring cell values.
    pub fn secant(&self, a: f64, b: f64) -> f64 {
        match self {
            Self::ClipAbove(_) | Self::ClipBelow(_) => {
                if a == b {
                    0.0
                } else {
                    (self.dphi(a) - self.dphi(b)) / (a - b)
                }
            }
            _ => {
                let scale = a.abs().max(b.abs());
                if (a - b).abs() <= 1e-8 * scale || a == b {
                    self.d2phi(0.5 * (a + b))
                } else {
                    (self.dphi(a) - self.dphi(b)) / (a - b)
                }
            }
        }
    }

    /// `(a - b)(φ'(a) - φ'(b)) >= 0`.
    pub fn pairing(&self, a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b) * (self.dphi(a) - self.dphi(b))
        }
    }

    fn check_domain(&self, s: &State) -> Result<()> {
        if matches!(self, Self::Entropy) && s.min() < 0.0 {
            return Err(Error::Domain(format!(
                "entropy profile needs a non-negative state, min value is {}",
                s.min()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub t: f64,
    pub e: f64,
    pub d: f64,
    pub r: f64,
}

pub fn energy(phi: &PhiProfile, p: &Params, s: &State) -> Result<f64> {
    phi.check_domain(s)?;
    let scales = p.scales();
    let w = s.grid().weight();
    let mut total = 0.0;
    for (i, f) in s.fields().iter().enumerate() {
        let c = scales[i];
        let species: f64 = f.values().iter().map(|&u| phi.phi(c * u)).sum();
        total += species / c;
    }
    Ok(total * w)
}

pub fn dissipation(phi: &PhiProfile, p: &Params, s: &State) -> Result<f64> {
    phi.check_domain(s)?;
    let scales = p.scales();
    let grid = *s.grid();
    let w = grid.weight();
    let mut total = 0.0;
    for (i, f) in s.fields().iter().enumerate() {
        let c = scales[i];
        let v = f.values();
        let mut species = 0.0;
        for face in grid.faces() {
            let (a, b) = (v[face.hi], v[face.lo]);
            if a == b {
                continue;
            }
            let g = (a - b) / face.spacing;
            species += phi.secant(c * a, c * b) * g * g;
        }
        total += p.d[i] * c * species;
    }
    Ok(total * w)
}

/// Reaction production integrand at one cell.
fn reaction_density(phi: &PhiProfile, k: &[f64; 4], u: [f64; 4]) -> f64 {
    let [k1, k2, k3, k4] = *k;
    let [u1, u2, u3, u4] = u;
    let autocatalytic = if u2 == 0.0 {
        0.0
    } else {
        u2 * u2 * phi.pairing(u1, k2 * u2)
    };
    let conversion = phi.pairing(k2 * u2, k2 * k3 * u3) / k2;
    let exchange = k1 * phi.pairing(u1, k4 / k1 * u4);
    autocatalytic + conversion + exchange
}

pub fn reaction_production(phi: &PhiProfile, p: &Params, s: &State) -> Result<f64> {
    phi.check_domain(s)?;
    let n = s.grid().len();
    let sum: f64 = (0..n).map(|j| reaction_density(phi, &p.k, s.at(j))).sum();
    Ok(sum * s.grid().weight())
}

pub fn breakdown(phi: &PhiProfile, p: &Params, s: &State) -> Result<EnergyBreakdown> {
    Ok(EnergyBreakdown {
        t: s.t,
        e: energy(phi, p, s)?,
        d: dissipation(phi, p, s)?,
        r: reaction_production(phi, p, s)?,
    })
}

fn midpoint(a: &State, b: &State) -> Result<State> {
    let fields = std::array::from_fn(|i| {
        a.species(i)
            .zip_map(b.species(i), |x, y| 0.5 * (x + y))
            .expect("consecutive states share a grid")
    });
    State::new(0.5 * (a.t + b.t), fields)
}

/// `(E_{n+1} - E_n)/δt + (D + R)(midpoint state)` for consecutive states.
pub fn energy_identity_residual(phi: &PhiProfile, p: &Params, trajectory: &[State]) -> Result<Vec<f64>> {
    let energies = trajectory
        .iter()
        .map(|s| energy(phi, p, s))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(trajectory.len().saturating_sub(1));
    for (n, pair) in trajectory.windows(2).enumerate() {
        pair[0].species(0).check_same_grid(pair[1].species(0))?;
        let dt = pair[1].t - pair[0].t;
        if !(dt > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "trajectory times must increase, got {} then {}",
                pair[0].t, pair[1].t
            )));
        }
        let mid = midpoint(&pair[0], &pair[1])?;
        let rate = (energies[n + 1] - energies[n]) / dt;
        out.push(rate + dissipation(phi, p, &mid)? + reaction_production(phi, p, &mid)?);
    }
    Ok(out)
}

/// `max{‖u1‖∞, k2‖u2‖∞, k2k3‖u3‖∞, (k4/k1)‖u4‖∞}`.
pub fn scaled_sup(p: &Params, s: &State) -> f64 {
    let scales = p.scales();
    s.fields()
        .iter()
        .zip(scales)
        .map(|(f, c)| c * f.values().iter().fold(0.0_f64, |m, v| m.max(v.abs())))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Grid, ScalarField};
    use crate::equilibria::compute_equilibria;

    fn unit_setup() -> (Params, Grid) {
        (Params::new([1.0; 4], [1.0; 4]).unwrap(), Grid::line(1.0, 32).unwrap())
    }

    fn wavy(g: Grid) -> State {
        let fields = std::array::from_fn(|i| {
            ScalarField::from_fn(g, |x| 0.6 + 0.4 * ((i as f64 + 1.5) * 2.0 * x[0]).cos())
        });
        State::new(0.0, fields).unwrap()
    }

    #[test]
    fn power2_at_equilibria() {
        let (p, g) = unit_setup();
        let pair = compute_equilibria(&p, 1.0, 1.0).unwrap();
        let phi = PhiProfile::power(2.0).unwrap();
        let e = energy(&phi, &p, &State::homogeneous(g, 0.0, pair.e_circ)).unwrap();
        assert!((e - 0.25).abs() < 1e-14);
        let e = energy(&phi, &p, &State::homogeneous(g, 0.0, pair.e_b)).unwrap();
        assert!((e - 0.5).abs() < 1e-14);
    }

    #[test]
    fn entropy_at_circ() {
        let (p, g) = unit_setup();
        let pair = compute_equilibria(&p, 1.0, 1.0).unwrap();
        let e = energy(&PhiProfile::Entropy, &p, &State::homogeneous(g, 0.0, pair.e_circ)).unwrap();
        let expected = 4.0 * (0.25 * 0.25_f64.ln() - 0.25 + 1.0);
        assert!((e - expected).abs() < 1e-13);
        assert!((e - 1.613706).abs() < 1e-6);
    }

    #[test]
    fn entropy_rejects_negative_state() {
        let (p, g) = unit_setup();
        let s = State::homogeneous(g, 0.0, [0.1, -0.01, 0.0, 0.2]);
        assert!(matches!(energy(&PhiProfile::Entropy, &p, &s), Err(Error::Domain(_))));
        assert!(energy(&PhiProfile::power(2.0).unwrap(), &p, &s).is_ok());
    }

    #[test]
    fn clip_above_band_gives_zero() {
        let (p, g) = unit_setup();
        let s = wavy(g);
        let m = scaled_sup(&p, &s);
        let phi = PhiProfile::ClipAbove(m);
        assert_eq!(energy(&phi, &p, &s).unwrap(), 0.0);
        assert_eq!(dissipation(&phi, &p, &s).unwrap(), 0.0);
    }

    #[test]
    fn homogeneous_state_has_no_dissipation() {
        let (p, g) = unit_setup();
        let s = State::homogeneous(g, 0.0, [0.3, 0.1, 0.7, 0.2]);
        for phi in [PhiProfile::Power(2.0), PhiProfile::Power(3.0), PhiProfile::Entropy] {
            assert_eq!(dissipation(&phi, &p, &s).unwrap(), 0.0);
        }
    }

    #[test]
    fn power2_dissipation_matches_weighted_gradients() {
        let g = Grid::line(1.0, 40).unwrap();
        let p = Params::new([0.3, 0.2, 0.5, 0.7], [1.3, 0.6, 2.0, 0.4]).unwrap();
        let s = wavy(g);
        let weights = [p.d[0], p.d[1] * p.k[1], p.d[2] * p.k[1] * p.k[2], p.d[3] * p.k[3] / p.k[0]];
        let expected: f64 = (0..4)
            .map(|i| 2.0 * weights[i] * crate::domain::gradient_inner(s.species(i), s.species(i)).unwrap())
            .sum();
        let d = dissipation(&PhiProfile::Power(2.0), &p, &s).unwrap();
        assert!((d - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn reaction_production_examples() {
        let (p, g) = unit_setup();
        let pair = compute_equilibria(&p, 1.0, 1.0).unwrap();
        for phi in [PhiProfile::Power(2.0), PhiProfile::Power(3.0), PhiProfile::Entropy] {
            let r = reaction_production(&phi, &p, &State::homogeneous(g, 0.0, pair.e_circ)).unwrap();
            assert!(r.abs() < 1e-15);
        }
        for phi in [PhiProfile::Power(2.0), PhiProfile::Power(3.0)] {
            let r = reaction_production(&phi, &p, &State::homogeneous(g, 0.0, pair.e_b)).unwrap();
            assert!(r.abs() < 1e-15);
        }
        let r = reaction_production(&PhiProfile::Power(2.0), &p, &State::homogeneous(g, 0.0, [1.0, 0.0, 0.0, 0.0]))
            .unwrap();
        assert!((r - 2.0).abs() < 1e-14);
    }

    #[test]
    fn stationary_trajectory_has_zero_residual() {
        let (p, g) = unit_setup();
        let pair = compute_equilibria(&p, 1.0, 1.0).unwrap();
        let traj: Vec<State> = (0..5)
            .map(|n| State::homogeneous(g, n as f64 * 0.1, pair.e_circ))
            .collect();
        let res = energy_identity_residual(&PhiProfile::Power(2.0), &p, &traj).unwrap();
        assert_eq!(res.len(), 4);
        assert!(res.iter().all(|r| r.abs() < 1e-14));
    }

    #[test]
    fn profile_parsing() {
        assert_eq!(PhiProfile::parse("power2").unwrap(), PhiProfile::Power(2.0));
        assert_eq!(PhiProfile::parse("power:3").unwrap(), PhiProfile::Power(3.0));
        assert_eq!(PhiProfile::parse("entropy").unwrap(), PhiProfile::Entropy);
        assert_eq!(PhiProfile::parse("clip_above:1.5").unwrap(), PhiProfile::ClipAbove(1.5));
        assert!(PhiProfile::parse("power1").is_err());
        assert!(PhiProfile::parse("cubic").is_err());
        assert!(PhiProfile::parse("clip_below").is_err());
    }

    #[test]
    fn secant_reduces_to_second_derivative() {
        let phi = PhiProfile::Power(3.0);
        assert!((phi.secant(0.5, 0.5) - phi.d2phi(0.5)).abs() < 1e-15);
        let s = phi.secant(0.5, 0.5 + 1e-6);
        assert!((s - phi.d2phi(0.5)).abs() < 1e-5);
        assert_eq!(PhiProfile::ClipAbove(1.0).secant(0.2, 0.4), 0.0);
        assert!((PhiProfile::ClipAbove(1.0).secant(0.5, 1.5) - 1.0).abs() < 1e-15);
    }
}
