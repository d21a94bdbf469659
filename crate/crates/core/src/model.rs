//! Parameters and right-hand sides for the reversible model and for the
//! simpler systems it gets compared against.

use crate::domain::{laplacian_neumann, ScalarField, State};
use crate::error::{Error, Result};

/// Diffusivities `d1..d4` and reaction rates `k1..k4` of the reversible model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub d: [f64; 4],
    pub k: [f64; 4],
}

impl Params {
    pub fn new(d: [f64; 4], k: [f64; 4]) -> Result<Self> {
        let p = Self { d, k };
        p.validate()?;
        Ok(p)
    }

    /// All rates equal to one, all diffusivities `0.01`.
    pub fn unit() -> Self {
        Self {
            d: [1e-2; 4],
            k: [1.0; 4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in ["d1", "d2", "d3", "d4", "k1", "k2", "k3", "k4"]
            .iter()
            .zip(self.d.iter().chain(&self.k))
        {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidParameters(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Weights `(1, k2, k2 k3, k4/k1)` that rescale the species so that all
    /// reversible pairings compare like with like.
    pub fn scales(&self) -> [f64; 4] {
        let [k1, k2, k3, k4] = self.k;
        [1.0, k2, k2 * k3, k4 / k1]
    }
}

/// Parameters of the classical two-species system.
#[derive(Debug, Clone, PartialEq)]
pub struct GSParams {
    pub d1: f64,
    pub d2: f64,
    pub k1: f64,
    /// Feed, one non-negative value per cell.
    pub a: ScalarField,
}

impl GSParams {
    pub fn new(d1: f64, d2: f64, k1: f64, a: ScalarField) -> Result<Self> {
        for (name, v) in [("d1", d1), ("d2", d2), ("k1", k1)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameters(format!("{name} must be positive, got {v}")));
            }
        }
        if a.values().iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameters("feed a must be non-negative".into()));
        }
        Ok(Self { d1, d2, k1, a })
    }
}

/// Per-cell reaction terms of the four species.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionVector {
    pub r: [Vec<f64>; 4],
}

impl ReactionVector {
    /// Cellwise `r1 + r2 + r3 + r4`.
    pub fn cell_sums(&self) -> Vec<f64> {
        (0..self.r[0].len())
            .map(|j| self.r[0][j] + self.r[1][j] + self.r[2][j] + self.r[3][j])
            .collect()
    }
}

/// Pointwise reaction terms.
///
/// The three net fluxes are evaluated once and `r1` is assembled as
/// `-((r2 + r3) + r4)`, so that summing in that order cancels exactly.
#[inline]
pub fn reaction_point(k: &[f64; 4], u: [f64; 4]) -> [f64; 4] {
    let [k1, k2, k3, k4] = *k;
    let [u1, u2, u3, u4] = u;
    let autocatalytic = u2 * u2 * (u1 - k2 * u2);
    let conversion = u2 - k3 * u3;
    let exchange = k1 * u1 - k4 * u4;
    let r2 = autocatalytic - conversion;
    let r3 = conversion;
    let r4 = exchange;
    let r1 = -((r2 + r3) + r4);
    [r1, r2, r3, r4]
}

pub fn reaction_rgs(p: &Params, s: &State) -> ReactionVector {
    let n = s.grid().len();
    let mut r = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for j in 0..n {
        let rj = reaction_point(&p.k, s.at(j));
        for i in 0..4 {
            r[i][j] = rj[i];
        }
    }
    ReactionVector { r }
}

/// `d_i Δu_i + r_i` for each species.
pub fn rhs_rgs(p: &Params, s: &State) -> [ScalarField; 4] {
    let reactions = reaction_rgs(p, s);
    std::array::from_fn(|i| {
        let mut out = laplacian_neumann(s.species(i)).map(|v| p.d[i] * v);
        for (o, r) in out.values_mut().iter_mut().zip(&reactions.r[i]) {
            *o += r;
        }
        out
    })
}

pub fn reaction_gs(p: &GSParams, u1: &ScalarField, u2: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    u1.check_same_grid(u2)?;
    u1.check_same_grid(&p.a)?;
    let mut r1 = ScalarField::zeros(*u1.grid());
    let mut r2 = ScalarField::zeros(*u1.grid());
    let (a, x, y) = (p.a.values(), u1.values(), u2.values());
    for j in 0..x.len() {
        let uptake = x[j] * y[j] * y[j];
        r1.values_mut()[j] = -uptake - p.k1 * x[j] + a[j];
        r2.values_mut()[j] = uptake - y[j];
    }
    Ok((r1, r2))
}

pub fn rhs_gs(p: &GSParams, u1: &ScalarField, u2: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    let (mut r1, mut r2) = reaction_gs(p, u1, u2)?;
    r1.add_scaled(p.d1, &laplacian_neumann(u1))?;
    r2.add_scaled(p.d2, &laplacian_neumann(u2))?;
    Ok((r1, r2))
}

/// `(d1 Δu1 - k1 u1 + k4 u4, d4 Δu4 + k1 u1 - k4 u4)`.
pub fn rhs_reduced_linear(p: &Params, u1: &ScalarField, u4: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    let exchange = u1.zip_map(u4, |a, b| p.k[0] * a - p.k[3] * b)?;
    let mut r1 = laplacian_neumann(u1).map(|v| p.d[0] * v);
    let mut r4 = laplacian_neumann(u4).map(|v| p.d[3] * v);
    r1.add_scaled(-1.0, &exchange)?;
    r4.add_scaled(1.0, &exchange)?;
    Ok((r1, r4))
}

/// `d3 Δu3 + u2`.
pub fn rhs_limit_u3(d3: f64, u3: &ScalarField, u2: &ScalarField) -> Result<ScalarField> {
    let mut out = laplacian_neumann(u3).map(|v| d3 * v);
    out.add_scaled(1.0, u2)?;
    Ok(out)
}
