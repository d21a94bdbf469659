//! The two spatially homogeneous equilibria and their quadratic energies.

use crate::error::{Error, Result};
use crate::model::Params;

/// Interior (`e_circ`) and boundary (`e_b`) equilibrium at mass `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPair {
    pub e_circ: [f64; 4],
    pub e_b: [f64; 4],
    pub k0: f64,
    pub rho: f64,
    pub volume: f64,
}

/// `K0 = k1 k2 k3 + k2 k3 k4 + k3 k4 + k4`.
pub fn k0(p: &Params) -> f64 {
    let [k1, k2, k3, k4] = p.k;
    k1 * k2 * k3 + k2 * k3 * k4 + k3 * k4 + k4
}

fn check_mass(rho: f64, volume: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidParameters(format!("rho must be positive, got {rho}")));
    }
    if !(volume.is_finite() && volume > 0.0) {
        return Err(Error::InvalidParameters(format!("volume must be positive, got {volume}")));
    }
    Ok(())
}

pub fn compute_equilibria(p: &Params, rho: f64, volume: f64) -> Result<EquilibriumPair> {
    p.validate()?;
    check_mass(rho, volume)?;
    let [k1, k2, k3, k4] = p.k;
    let k0 = k0(p);
    let c = rho / volume;
    let e_circ = [k2 * k3 * k4, k3 * k4, k4, k1 * k2 * k3].map(|v| c * v / k0);
    let e_b = [k4, 0.0, 0.0, k1].map(|v| c * v / (k1 + k4));
    Ok(EquilibriumPair {
        e_circ,
        e_b,
        k0,
        rho,
        volume,
    })
}

/// Closed forms of `E_2` at `(e_circ, e_b)`.
pub fn equilibrium_energy_e2(pair: &EquilibriumPair, p: &Params) -> (f64, f64) {
    let [k1, _, _, k4] = p.k;
    let k2k3k4 = p.k[1] * p.k[2] * p.k[3];
    let scale = pair.rho * pair.rho / pair.volume;
    (scale * k2k3k4 / pair.k0, scale * k4 / (k1 + k4))
}

/// Non-negative homogeneous steady states at mass `rho`, obtained by solving
/// the stationary algebraic system branch by branch:
///
/// * `U2 = 0` forces `U3 = 0` and `U4 = (k1/k4) U1`;
/// * `U1 = k2 U2` with `U3 = U2/k3`, `U4 = (k1/k4) U1`.
///
/// Each branch is linear once the mass constraint
/// `((k1+k4)/k4) U1 + ((1+k3)/k3) U2 = rho/|Ω|` is added.
pub fn homogeneous_steady_oracle(p: &Params, rho: f64, volume: f64) -> Result<Vec<[f64; 4]>> {
    p.validate()?;
    check_mass(rho, volume)?;
    let [k1, k2, k3, k4] = p.k;
    let c = rho / volume;
    let mut out = Vec::with_capacity(2);

    // U2 = 0 branch: ((k1+k4)/k4) U1 = c
    let u1 = c / ((k1 + k4) / k4);
    out.push([u1, 0.0, 0.0, k1 / k4 * u1]);

    // U1 = k2 U2 branch: (k2 (k1+k4)/k4 + (1+k3)/k3) U2 = c
    let u2 = c / (k2 * (k1 + k4) / k4 + (1.0 + k3) / k3);
    let u1 = k2 * u2;
    let candidate = [u1, u2, u2 / k3, k1 / k4 * u1];
    if candidate.iter().all(|v| *v >= 0.0) && u2 != 0.0 {
        out.push(candidate);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reaction_point;

    fn close(a: &[f64; 4], b: &[f64; 4], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn unit_parameters() {
        let p = Params::new([1.0; 4], [1.0; 4]).unwrap();
        let pair = compute_equilibria(&p, 1.0, 1.0).unwrap();
        assert_eq!(pair.k0, 4.0);
        assert!(close(&pair.e_circ, &[0.25; 4], 1e-15));
        assert!(close(&pair.e_b, &[0.5, 0.0, 0.0, 0.5], 1e-15));
        let (a, b) = equilibrium_energy_e2(&pair, &p);
        assert!((a - 0.25).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
    }

    #[test]
    fn k1_equals_two() {
        let p = Params::new([1.0; 4], [2.0, 1.0, 1.0, 1.0]).unwrap();
        let pair = compute_equilibria(&p, 1.0, 1.0).unwrap();
        assert_eq!(pair.k0, 5.0);
        assert!(close(&pair.e_circ, &[0.2, 0.2, 0.2, 0.4], 1e-15));
        assert!(close(&pair.e_b, &[1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0], 1e-15));
        let (a, b) = equilibrium_energy_e2(&pair, &p);
        assert!((a - 0.2).abs() < 1e-15 && (b - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn each_equilibrium_carries_the_mass() {
        let p = Params::new([1.0; 4], [0.3, 2.5, 0.8, 1.7]).unwrap();
        let pair = compute_equilibria(&p, 2.5, 0.5).unwrap();
        for e in [pair.e_circ, pair.e_b] {
            assert!((e.iter().sum::<f64>() * 0.5 - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn oracle_unit_parameters() {
        let p = Params::new([1.0; 4], [1.0; 4]).unwrap();
        let sols = homogeneous_steady_oracle(&p, 1.0, 1.0).unwrap();
        assert_eq!(sols.len(), 2);
        assert!(close(&sols[0], &[0.5, 0.0, 0.0, 0.5], 1e-15));
        assert!(close(&sols[1], &[0.25; 4], 1e-15));
        for s in sols {
            assert!(reaction_point(&p.k, s).iter().all(|r| r.abs() < 1e-15));
        }
    }

    #[test]
    fn rejects_bad_mass() {
        let p = Params::unit();
        assert!(compute_equilibria(&p, 0.0, 1.0).is_err());
        assert!(compute_equilibria(&p, 1.0, -1.0).is_err());
        assert!(homogeneous_steady_oracle(&p, -1.0, 1.0).is_err());
    }
}
