//! Linearization at the homogeneous equilibria, spectra on the zero-mass
//! subspace, and the one-dimensional center dynamics at the boundary
//! equilibrium.
//!
//! The discrete linearization acts on the stacked vector
//! `[v1(cells), v2(cells), v3(cells), v4(cells)]`. Its range lies in the
//! zero-mass subspace, so spectra are computed on the compression
//! `Bᵀ L B` where the columns of `B` are an orthonormal basis of that
//! subspace.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::domain::{gradient_inner, integrate, Grid, ScalarField, State};
use crate::equilibria::compute_equilibria;
use crate::error::{Error, Result};
use crate::model::{reaction_point, Params, ReactionVector};
use crate::ode::{self, Tolerance};

/// Largest cell count accepted by [`assemble_linearization`].
pub const DENSE_CELL_LIMIT: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Circ,
    B,
}

impl Which {
    pub fn name(self) -> &'static str {
        match self {
            Which::Circ => "circ",
            Which::B => "b",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinearizedOperator {
    pub which: Which,
    pub params: Params,
    pub rho: f64,
    pub equilibrium: [f64; 4],
    /// `None` for the spatially homogeneous (single-cell) operator.
    pub grid: Option<Grid>,
    pub volume: f64,
    pub matrix: DMatrix<f64>,
    pub zero_mass_basis: DMatrix<f64>,
}

impl LinearizedOperator {
    pub fn cells(&self) -> usize {
        self.grid.map_or(1, |g| g.len())
    }

    fn weight(&self) -> f64 {
        self.grid.map_or(self.volume, |g| g.weight())
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(v)).as_slice().to_vec()
    }
}

/// Jacobian of the reaction terms at an equilibrium, written with
/// `E1 E2 = k2 E2²`.
pub fn reaction_jacobian(p: &Params, e: &[f64; 4]) -> [[f64; 4]; 4] {
    let [k1, k2, k3, k4] = p.k;
    let e2 = e[1] * e[1];
    [
        [-e2 - k1, k2 * e2, 0.0, k4],
        [e2, -k2 * e2 - 1.0, k3, 0.0],
        [0.0, 1.0, -k3, 0.0],
        [k1, 0.0, 0.0, -k4],
    ]
}

fn equilibrium_for(p: &Params, rho: f64, volume: f64, which: Which) -> Result<[f64; 4]> {
    let pair = compute_equilibria(p, rho, volume)?;
    Ok(match which {
        Which::Circ => pair.e_circ,
        Which::B => pair.e_b,
    })
}

/// Orthonormal basis of `{v ∈ ℝ^m : Σ v = 0}` from the Householder
/// reflector that maps `e1` onto `1/√m`.
fn zero_sum_basis(m: usize) -> DMatrix<f64> {
    let inv = 1.0 / (m as f64).sqrt();
    let mut u = DVector::from_element(m, inv);
    u[0] -= 1.0;
    let uu = u.dot(&u);
    DMatrix::from_fn(m, m - 1, |i, j| {
        let col = j + 1;
        let delta = if i == col { 1.0 } else { 0.0 };
        delta - 2.0 * u[i] * u[col] / uu
    })
}

pub fn assemble_linearization(p: &Params, rho: f64, which: Which, grid: &Grid) -> Result<LinearizedOperator> {
    assemble_linearization_with_limit(p, rho, which, grid, DENSE_CELL_LIMIT)
}

pub fn assemble_linearization_with_limit(
    p: &Params,
    rho: f64,
    which: Which,
    grid: &Grid,
    limit: usize,
) -> Result<LinearizedOperator> {
    let n = grid.len();
    if n > limit {
        return Err(Error::GridTooLarge { cells: n, limit });
    }
    let e = equilibrium_for(p, rho, grid.volume(), which)?;
    let jac = reaction_jacobian(p, &e);
    let m = 4 * n;
    let mut a = DMatrix::zeros(m, m);
    for (i, row) in jac.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            if c != 0.0 {
                for j in 0..n {
                    a[(i * n + j, k * n + j)] += c;
                }
            }
        }
    }
    for i in 0..4 {
        let off = i * n;
        for face in grid.faces() {
            let c = p.d[i] / (face.spacing * face.spacing);
            let (lo, hi) = (off + face.lo, off + face.hi);
            a[(lo, lo)] -= c;
            a[(lo, hi)] += c;
            a[(hi, hi)] -= c;
            a[(hi, lo)] += c;
        }
    }
    Ok(LinearizedOperator {
        which,
        params: *p,
        rho,
        equilibrium: e,
        grid: Some(*grid),
        volume: grid.volume(),
        matrix: a,
        zero_mass_basis: zero_sum_basis(m),
    })
}

/// The reaction-only linearization on spatially constant perturbations.
pub fn assemble_homogeneous(p: &Params, rho: f64, volume: f64, which: Which) -> Result<LinearizedOperator> {
    let e = equilibrium_for(p, rho, volume, which)?;
    let jac = reaction_jacobian(p, &e);
    Ok(LinearizedOperator {
        which,
        params: *p,
        rho,
        equilibrium: e,
        grid: None,
        volume,
        matrix: DMatrix::from_fn(4, 4, |i, j| jac[i][j]),
        zero_mass_basis: zero_sum_basis(4),
    })
}

/// `V(v) = (v1, k2 v2, k2 k3 v3, (k4/k1) v4)` pairing of `L v` against `v`,
/// together with the closed-form negative quadratic form.
pub fn weighted_form_check(opr: &LinearizedOperator, v: &[f64]) -> Result<(f64, f64)> {
    let n = opr.cells();
    if v.len() != 4 * n {
        return Err(Error::InvalidParameters(format!("vector has length {}, expected {}", v.len(), 4 * n)));
    }
    let total: f64 = v.iter().sum();
    let scale: f64 = v.iter().map(|x| x.abs()).sum();
    if total.abs() > 1e-10 * scale.max(1e-300) {
        return Err(Error::InvalidParameters("vector is not in the zero-mass subspace".into()));
    }
    let p = &opr.params;
    let [k1, k2, k3, k4] = p.k;
    let scales = p.scales();
    let w = opr.weight();
    let lv = opr.apply(v);
    let lhs: f64 = (0..4)
        .map(|i| (0..n).map(|j| lv[i * n + j] * scales[i] * v[i * n + j]).sum::<f64>())
        .sum::<f64>()
        * w;

    let comp = |i: usize| &v[i * n..(i + 1) * n];
    let mut rhs = 0.0;
    if let Some(grid) = opr.grid {
        for i in 0..4 {
            let f = ScalarField::new(grid, comp(i).to_vec())?;
            rhs -= p.d[i] * scales[i] * gradient_inner(&f, &f)?;
        }
    }
    let sq = |f: &dyn Fn(usize) -> f64| (0..n).map(|j| f(j).powi(2)).sum::<f64>() * w;
    let (v1, v2, v3, v4) = (comp(0), comp(1), comp(2), comp(3));
    let e2 = opr.equilibrium[1] * opr.equilibrium[1];
    rhs -= e2 * sq(&|j| v1[j] - k2 * v2[j]);
    rhs -= k2 * sq(&|j| v2[j] - k3 * v3[j]);
    rhs -= sq(&|j| k1 * v1[j] - k4 * v4[j]) / k1;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub which: Which,
    /// Eigenvalues on the zero-mass subspace, sorted by decreasing real part.
    pub eigenvalues: Vec<Complex64>,
    /// `-max Re λ` over the non-kernel eigenvalues.
    pub gap: f64,
    pub kernel_dim: usize,
    /// Cell-averaged kernel direction, unit length, sign fixed so the first
    /// component is non-negative.
    pub kernel_vector: Option<[f64; 4]>,
    /// Cosine between the full kernel vector and `k_vec` replicated on every cell.
    pub kernel_alignment: Option<f64>,
}

impl SpectrumReport {
    pub fn max_real(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

pub fn spectrum(opr: &LinearizedOperator) -> Result<SpectrumReport> {
    let b = &opr.zero_mass_basis;
    let compressed = b.transpose() * &opr.matrix * b;

    let schur = Schur::try_new(compressed.clone(), 1e-15, 0)
        .ok_or_else(|| Error::Eigensolver("Schur decomposition did not converge".into()))?;
    let mut eigenvalues: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|x, y| y.re.total_cmp(&x.re));

    let svd = compressed.clone().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Eigensolver("SVD did not produce right singular vectors".into()))?;
    let sigma = svd.singular_values;
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let kernel_tol = 1e-9 * sigma_max.max(1.0);
    let kernel_dim = sigma.iter().filter(|&&s| s <= kernel_tol).count();

    let mut by_modulus: Vec<usize> = (0..eigenvalues.len()).collect();
    by_modulus.sort_by(|&i, &j| eigenvalues[i].norm().total_cmp(&eigenvalues[j].norm()));
    let kernel_ids: Vec<usize> = by_modulus.into_iter().take(kernel_dim).collect();
    let gap = -eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| !kernel_ids.contains(i))
        .map(|(_, z)| z.re)
        .fold(f64::NEG_INFINITY, f64::max);

    let (kernel_vector, kernel_alignment) = if kernel_dim >= 1 {
        let (imin, _) = sigma
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty spectrum");
        let coords = v_t.row(imin).transpose();
        let full = b * coords;
        let n = opr.cells();
        let mut dir = [0.0; 4];
        for (i, d) in dir.iter_mut().enumerate() {
            *d = (0..n).map(|j| full[i * n + j]).sum::<f64>() / n as f64;
        }
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sign = if dir[0] < 0.0 { -1.0 } else { 1.0 };
        dir.iter_mut().for_each(|x| *x *= sign / norm);

        let kv = k_vec(&opr.params);
        let dot: f64 = (0..4 * n).map(|idx| full[idx] * kv[idx / n]).sum();
        let kv_norm = (n as f64).sqrt() * kv.iter().map(|x| x * x).sum::<f64>().sqrt();
        (Some(dir), Some((dot / (kv_norm * full.norm())).abs()))
    } else {
        (None, None)
    };

    Ok(SpectrumReport {
        which: opr.which,
        eigenvalues,
        gap,
        kernel_dim,
        kernel_vector,
        kernel_alignment,
    })
}

/// Kernel direction of the boundary linearization:
/// `(k4(1+k3), -k3(k1+k4), -(k1+k4), k1(1+k3))`.
pub fn k_vec(p: &Params) -> [f64; 4] {
    let [k1, _, k3, k4] = p.k;
    [k4 * (1.0 + k3), -k3 * (k1 + k4), -(k1 + k4), k1 * (1.0 + k3)]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterManifoldConstants {
    pub k1: f64,
    pub k2: f64,
    pub k4: f64,
    pub k_vec: [f64; 4],
}

impl CenterManifoldConstants {
    pub fn new(p: &Params, rho: f64, volume: f64) -> Self {
        let [k1, _, k3, k4] = p.k;
        let big_k1 = 1.0 / (volume * (k1 + k4));
        let big_k2 = 1.0 / (2.0 * volume * (k1 + k4) * (1.0 + k3));
        let big_k4 = rho * big_k1 * big_k2 * k3 * k3 * k4 * (k1 + k4).powi(2) * volume;
        Self {
            k1: big_k1,
            k2: big_k2,
            k4: big_k4,
            k_vec: k_vec(p),
        }
    }
}

/// `q(w) = K2 ∫ (w1 + w4 - w2 - w3)`.
pub fn q_functional(p: &Params, w: &State) -> f64 {
    let consts = CenterManifoldConstants::new(p, 1.0, w.grid().volume());
    let f = w.fields();
    consts.k2 * (integrate(&f[0]) + integrate(&f[3]) - integrate(&f[1]) - integrate(&f[2]))
}

/// `q` of a spatially constant perturbation on a domain of measure `volume`.
pub fn q_homogeneous(p: &Params, volume: f64, w: &[f64; 4]) -> f64 {
    let consts = CenterManifoldConstants::new(p, 1.0, volume);
    consts.k2 * volume * (w[0] + w[3] - w[1] - w[2])
}

/// Pointwise `N(w) = w2² (k2 w2 - ρK1k4 - w1, -(…), 0, 0)`.
pub fn nonlinearity_point(p: &Params, rho: f64, volume: f64, w: &[f64; 4]) -> [f64; 4] {
    let consts = CenterManifoldConstants::new(p, rho, volume);
    let [_, k2, _, k4] = p.k;
    let first = w[1] * w[1] * (k2 * w[1] - rho * consts.k1 * k4 - w[0]);
    [first, -first, 0.0, 0.0]
}

pub fn nonlinearity_n(p: &Params, rho: f64, w: &State) -> ReactionVector {
    let n = w.grid().len();
    let volume = w.grid().volume();
    let mut r = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for j in 0..n {
        let nj = nonlinearity_point(p, rho, volume, &w.at(j));
        for i in 0..4 {
            r[i][j] = nj[i];
        }
    }
    ReactionVector { r }
}

/// `q(N(ξ k_vec)) / ξ²` for each `ξ` (center-manifold correction truncated).
pub fn center_coefficient_check(p: &Params, rho: f64, volume: f64, xis: &[f64]) -> Result<Vec<f64>> {
    let kv = k_vec(p);
    xis.iter()
        .map(|&xi| {
            if xi == 0.0 || !xi.is_finite() {
                return Err(Error::InvalidParameters(format!("xi must be finite and non-zero, got {xi}")));
            }
            let w = kv.map(|c| xi * c);
            let nw = nonlinearity_point(p, rho, volume, &w);
            Ok(q_homogeneous(p, volume, &nw) / (xi * xi))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopePoint {
    pub t: f64,
    pub s: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Integrates the homogeneous reaction ODE from `E_b + s0 k_vec` and tracks
/// `s(t) = q(u(t) - E_b)` against `s0/(1 + 3K4 s0 t)` and `s0/(1 + K4 s0 t)`.
pub fn boundary_decay_envelope(
    p: &Params,
    rho: f64,
    volume: f64,
    s0: f64,
    t_end: f64,
    samples: usize,
) -> Result<Vec<EnvelopePoint>> {
    if !(s0.is_finite() && s0 >= 0.0) {
        return Err(Error::InvalidParameters(format!("s0 must be non-negative, got {s0}")));
    }
    if !(t_end.is_finite() && t_end > 0.0) || samples == 0 {
        return Err(Error::InvalidParameters("need t_end > 0 and at least one sample".into()));
    }
    let consts = CenterManifoldConstants::new(p, rho, volume);
    let eb = equilibrium_for(p, rho, volume, Which::B)?;
    let mut u: [f64; 4] = std::array::from_fn(|i| eb[i] + s0 * consts.k_vec[i]);
    let k = p.k;
    let rhs = move |y: &[f64; 4]| reaction_point(&k, *y);
    let mut h = 0.0;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(samples + 1);
    for n in 0..=samples {
        let target = t_end * n as f64 / samples as f64;
        u = ode::integrate(rhs, t, u, target, Tolerance::tight(), &mut h)?;
        t = target;
        let w: [f64; 4] = std::array::from_fn(|i| u[i] - eb[i]);
        out.push(EnvelopePoint {
            t,
            s: q_homogeneous(p, volume, &w),
            lower: s0 / (1.0 + 3.0 * consts.k4 * s0 * t),
            upper: s0 / (1.0 + consts.k4 * s0 * t),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Params {
        Params::new([1e-2; 4], [1.0; 4]).unwrap()
    }

    #[test]
    fn zero_sum_basis_is_orthonormal() {
        let b = zero_sum_basis(12);
        let gram = b.transpose() * &b;
        assert!((gram - DMatrix::identity(11, 11)).abs().max() < 1e-14);
        for j in 0..11 {
            assert!(b.column(j).sum().abs() < 1e-14);
        }
    }

    #[test]
    fn constants_for_unit_params() {
        let c = CenterManifoldConstants::new(&unit(), 1.0, 1.0);
        assert!((c.k1 - 0.5).abs() < 1e-15);
        assert!((c.k2 - 0.125).abs() < 1e-15);
        assert!((c.k4 - 0.25).abs() < 1e-15);
        assert_eq!(c.k_vec, [2.0, -2.0, -2.0, 2.0]);
        assert!((q_homogeneous(&unit(), 1.0, &c.k_vec) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_of_k_vec_is_one() {
        let p = Params::new([1e-2; 4], [2.0, 1.0, 1.0, 1.0]).unwrap();
        let kv = k_vec(&p);
        assert_eq!(kv, [2.0, -3.0, -3.0, 4.0]);
        assert!((q_homogeneous(&p, 1.0, &kv) - 1.0).abs() < 1e-15);
        let g = Grid::line(1.0, 10).unwrap();
        assert!((q_functional(&p, &State::homogeneous(g, 0.0, kv)) - 1.0).abs() < 1e-14);
        assert_eq!(q_functional(&p, &State::homogeneous(g, 0.0, [0.0; 4])), 0.0);
    }

    #[test]
    fn boundary_jacobian_decouples_cubic_terms() {
        let opr = assemble_homogeneous(&unit(), 1.0, 1.0, Which::B).unwrap();
        assert_eq!(opr.matrix[(0, 1)], 0.0);
        assert_eq!(opr.matrix[(1, 0)], 0.0);
        let kv = k_vec(&unit());
        assert!(opr.apply(&kv).iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn single_cell_boundary_spectrum() {
        let opr = assemble_homogeneous(&unit(), 1.0, 1.0, Which::B).unwrap();
        let rep = spectrum(&opr).unwrap();
        assert_eq!(rep.eigenvalues.len(), 3);
        let mut re: Vec<f64> = rep.eigenvalues.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 2.0).abs() < 1e-12 && (re[1] + 2.0).abs() < 1e-12 && re[2].abs() < 1e-12);
        assert_eq!(rep.kernel_dim, 1);
        assert!((rep.gap - 2.0).abs() < 1e-12);
        assert!(rep.kernel_alignment.unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn single_cell_interior_spectrum_is_negative() {
        let opr = assemble_homogeneous(&unit(), 1.0, 1.0, Which::Circ).unwrap();
        let rep = spectrum(&opr).unwrap();
        assert_eq!(rep.kernel_dim, 0);
        assert!(rep.max_real() < 0.0);
        assert!(rep.max_abs_imag() < 1e-12);
    }

    #[test]
    fn too_large_grid_is_rejected() {
        let g = Grid::line(1.0, 200).unwrap();
        let err = assemble_linearization(&unit(), 1.0, Which::B, &g).unwrap_err();
        assert!(matches!(err, Error::GridTooLarge { cells: 200, .. }));
        assert!(err.to_string().contains("reduce the resolution"));
    }

    #[test]
    fn weighted_form_rejects_massive_vector() {
        let opr = assemble_homogeneous(&unit(), 1.0, 1.0, Which::B).unwrap();
        assert!(weighted_form_check(&opr, &[1.0, 0.0, 0.0, 0.0]).is_err());
        assert_eq!(weighted_form_check(&opr, &[0.0; 4]).unwrap(), (0.0, 0.0));
        let (l, r) = weighted_form_check(&opr, &k_vec(&unit())).unwrap();
        assert!(l.abs() < 1e-14 && r.abs() < 1e-14);
    }

    #[test]
    fn center_ratio_closed_form() {
        let r = center_coefficient_check(&unit(), 1.0, 1.0, &[0.01]).unwrap();
        assert!((r[0] + 0.54).abs() < 1e-12, "{}", r[0]);
        assert!(center_coefficient_check(&unit(), 1.0, 1.0, &[0.0]).is_err());
    }

    #[test]
    fn envelope_from_equilibrium_stays_put() {
        let pts = boundary_decay_envelope(&unit(), 1.0, 1.0, 0.0, 10.0, 5).unwrap();
        assert!(pts.iter().all(|p| p.s.abs() < 1e-15));
    }
}
