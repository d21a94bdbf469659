//! Rectangular cell-centered grids with homogeneous Neumann closure.
//!
//! Fields are stored row-major with the x index running fastest. The
//! Laplacian uses mirror ghost cells, which makes it symmetric with respect
//! to the (uniform) quadrature weights and exactly mass-neutral in flux form.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform cell-centered discretization of an interval or a rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    extent: [f64; 2],
    cells: [usize; 2],
}

/// An interior face between two neighbouring cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub lo: usize,
    pub hi: usize,
    pub spacing: f64,
}

impl Grid {
    /// 1D grid on `[0, extent]`.
    pub fn line(extent: f64, cells: usize) -> Result<Self> {
        Self::validate_axis(extent, cells)?;
        Ok(Self {
            dim: 1,
            extent: [extent, 1.0],
            cells: [cells, 1],
        })
    }

    /// 2D grid on `[0, extent[0]] x [0, extent[1]]`.
    pub fn rect(extent: [f64; 2], cells: [usize; 2]) -> Result<Self> {
        Self::validate_axis(extent[0], cells[0])?;
        Self::validate_axis(extent[1], cells[1])?;
        Ok(Self {
            dim: 2,
            extent,
            cells,
        })
    }

    fn validate_axis(extent: f64, cells: usize) -> Result<()> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        if cells < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 cells per axis, got {cells}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent[..self.dim]
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells[..self.dim]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extent[axis] / self.cells[axis] as f64
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// |Ω|.
    pub fn volume(&self) -> f64 {
        self.extent[..self.dim].iter().product()
    }

    /// Quadrature weight of a single cell (identical for all cells).
    pub fn weight(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    /// Cell-center coordinates; the second entry is 0 in 1D.
    pub fn center(&self, index: usize) -> [f64; 2] {
        let i = index % self.cells[0];
        let j = index / self.cells[0];
        let x = (i as f64 + 0.5) * self.spacing(0);
        let y = if self.dim == 2 {
            (j as f64 + 0.5) * self.spacing(1)
        } else {
            0.0
        };
        [x, y]
    }

    /// Iterates over all interior faces. Boundary faces carry zero flux and
    /// are omitted.
    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        let [nx, ny] = self.cells;
        let hx = self.spacing(0);
        let x_faces = (0..ny).flat_map(move |j| {
            (0..nx - 1).map(move |i| Face {
                lo: i + nx * j,
                hi: i + 1 + nx * j,
                spacing: hx,
            })
        });
        let hy = if self.dim == 2 { self.spacing(1) } else { 1.0 };
        let y_rows = if self.dim == 2 { ny - 1 } else { 0 };
        let y_faces = (0..y_rows).flat_map(move |j| {
            (0..nx).map(move |i| Face {
                lo: i + nx * j,
                hi: i + nx * (j + 1),
                spacing: hy,
            })
        });
        x_faces.chain(y_faces)
    }
}

/// One real value per cell of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "field has {} values, grid has {} cells",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f` at cell centers.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.center(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &ScalarField) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// The four species `u1..u4` at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    fields: [ScalarField; 4],
}

impl State {
    pub fn new(t: f64, fields: [ScalarField; 4]) -> Result<Self> {
        let g = fields[0].grid;
        if fields.iter().any(|f| f.grid != g) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { t, fields })
    }

    /// Spatially constant state with the given species values.
    pub fn homogeneous(grid: Grid, t: f64, values: [f64; 4]) -> Self {
        Self {
            t,
            fields: values.map(|v| ScalarField::constant(grid, v)),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.fields[0].grid
    }

    pub fn fields(&self) -> &[ScalarField; 4] {
        &self.fields
    }

    pub fn fields_mut(&mut self) -> &mut [ScalarField; 4] {
        &mut self.fields
    }

    pub fn into_fields(self) -> [ScalarField; 4] {
        self.fields
    }

    pub fn species(&self, i: usize) -> &ScalarField {
        &self.fields[i]
    }

    /// Species values in cell `j`.
    pub fn at(&self, j: usize) -> [f64; 4] {
        [
            self.fields[0].values[j],
            self.fields[1].values[j],
            self.fields[2].values[j],
            self.fields[3].values[j],
        ]
    }

    pub fn min(&self) -> f64 {
        self.fields.iter().map(ScalarField::min).fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.fields
            .iter()
            .map(|f| f.values.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
            .fold(0.0, f64::max)
    }
}

/// Discrete Neumann Laplacian (second-order central stencil, mirror ghosts).
pub fn laplacian_neumann(f: &ScalarField) -> ScalarField {
    let mut out = vec![0.0; f.len()];
    for face in f.grid.faces() {
        let flux = (f.values[face.hi] - f.values[face.lo]) / (face.spacing * face.spacing);
        out[face.lo] += flux;
        out[face.hi] -= flux;
    }
    ScalarField {
        grid: f.grid,
        values: out,
    }
}

/// Midpoint quadrature `Σ f_j w_j`.
pub fn integrate(f: &ScalarField) -> f64 {
    f.values.iter().sum::<f64>() * f.grid.weight()
}

/// Discrete `L_p` norm; pass `f64::INFINITY` for the sup norm.
pub fn norm_p(f: &ScalarField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidNorm(p));
    }
    if p.is_infinite() {
        return Ok(f.values.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
    }
    let w = f.grid.weight();
    let s: f64 = f.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * w;
    Ok(s.powf(1.0 / p))
}

/// Total mass `Σ_i ∫ u_i`.
pub fn mass(s: &State) -> f64 {
    s.fields.iter().map(integrate).sum()
}

/// Discrete `∫ ∇f · ∇g` using face-centered differences.
pub fn gradient_inner(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    f.check_same_grid(g)?;
    let w = f.grid.weight();
    Ok(f.grid
        .faces()
        .map(|face| {
            let df = (f.values[face.hi] - f.values[face.lo]) / face.spacing;
            let dg = (g.values[face.hi] - g.values[face.lo]) / face.spacing;
            df * dg * w
        })
        .sum())
}

/// Orthonormal eigenbasis of the 1D mirror-ghost Neumann Laplacian
/// (a DCT-II stored as a dense matrix).
#[derive(Debug, Clone)]
pub struct CosineBasis {
    n: usize,
    // row k holds the k-th basis vector
    modes: Vec<f64>,
    eigenvalues: Vec<f64>,
}

impl CosineBasis {
    pub fn new(n: usize, spacing: f64) -> Self {
        let mut modes = vec![0.0; n * n];
        let mut eigenvalues = vec![0.0; n];
        for k in 0..n {
            let alpha = if k == 0 {
                (1.0 / n as f64).sqrt()
            } else {
                (2.0 / n as f64).sqrt()
            };
            for j in 0..n {
                modes[k * n + j] = alpha * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
            }
            let s = (PI * k as f64 / (2.0 * n as f64)).sin();
            eigenvalues[k] = -4.0 * s * s / (spacing * spacing);
        }
        Self {
            n,
            modes,
            eigenvalues,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Coefficients `c_k = Σ_j φ_k(j) x_j` for a strided lane.
    fn forward(&self, x: &[f64], out: &mut [f64]) {
        for k in 0..self.n {
            let row = &self.modes[k * self.n..(k + 1) * self.n];
            out[k] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn inverse(&self, c: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..self.n {
            let row = &self.modes[k * self.n..(k + 1) * self.n];
            let ck = c[k];
            for (o, a) in out.iter_mut().zip(row) {
                *o += ck * a;
            }
        }
    }
}

/// Applies functions of the Neumann Laplacian, `g(Δ) f`, by diagonalizing
/// it with tensor-product cosine bases.
#[derive(Debug, Clone)]
pub struct NeumannSpectral {
    grid: Grid,
    bases: Vec<CosineBasis>,
}

impl NeumannSpectral {
    pub fn new(grid: Grid) -> Self {
        let bases = (0..grid.dim())
            .map(|a| CosineBasis::new(grid.cells[a], grid.spacing(a)))
            .collect();
        Self { grid, bases }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Eigenvalue of Δ for mode index `m` (same layout as field storage).
    fn eigenvalue(&self, m: usize) -> f64 {
        let nx = self.grid.cells[0];
        let mut lam = self.bases[0].eigenvalues[m % nx];
        if self.grid.dim == 2 {
            lam += self.bases[1].eigenvalues[m / nx];
        }
        lam
    }

    fn transform(&self, values: &mut [f64], forward: bool) {
        let [nx, ny] = self.grid.cells;
        let mut lane = vec![0.0; nx.max(ny)];
        let mut out = vec![0.0; nx.max(ny)];
        for j in 0..ny {
            let row = &mut values[j * nx..(j + 1) * nx];
            lane[..nx].copy_from_slice(row);
            if forward {
                self.bases[0].forward(&lane[..nx], &mut out[..nx]);
            } else {
                self.bases[0].inverse(&lane[..nx], &mut out[..nx]);
            }
            row.copy_from_slice(&out[..nx]);
        }
        if self.grid.dim == 2 {
            for i in 0..nx {
                for j in 0..ny {
                    lane[j] = values[i + nx * j];
                }
                if forward {
                    self.bases[1].forward(&lane[..ny], &mut out[..ny]);
                } else {
                    self.bases[1].inverse(&lane[..ny], &mut out[..ny]);
                }
                for j in 0..ny {
                    values[i + nx * j] = out[j];
                }
            }
        }
    }

    /// In place `f <- g(Δ) f`.
    pub fn apply(&self, f: &mut ScalarField, g: impl Fn(f64) -> f64) {
        debug_assert_eq!(f.grid, self.grid);
        self.transform(&mut f.values, true);
        for (m, c) in f.values.iter_mut().enumerate() {
            *c *= g(self.eigenvalue(m));
        }
        self.transform(&mut f.values, false);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_line(n: usize) -> Grid {
        Grid::line(1.0, n).unwrap()
    }

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(Grid::line(1.0, 2).is_err());
        assert!(Grid::line(0.0, 8).is_err());
        assert!(Grid::rect([1.0, -1.0], [8, 8]).is_err());
    }

    #[test]
    fn volume_matches_weights() {
        for n in [3, 7, 64, 128, 256] {
            let g = unit_line(n);
            let total: f64 = (0..g.len()).map(|_| g.weight()).sum();
            assert!((total - g.volume()).abs() <= 4.0 * f64::EPSILON);
        }
        let g = Grid::rect([2.0, 1.0], [16, 8]).unwrap();
        assert!((g.weight() * g.len() as f64 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let g = Grid::rect([2.0, 1.0], [10, 7]).unwrap();
        let lap = laplacian_neumann(&ScalarField::constant(g, 3.5));
        assert!(lap.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn laplacian_cosine_eigenfunction() {
        let n = 256;
        let g = unit_line(n);
        let f = ScalarField::from_fn(g, |p| (PI * p[0]).cos());
        let lap = laplacian_neumann(&f);
        let mut worst = 0.0_f64;
        for (l, v) in lap.values().iter().zip(f.values()) {
            if v.abs() > 1e-3 {
                worst = worst.max((l + PI * PI * v).abs() / (PI * PI * v.abs()));
            }
        }
        assert!(worst <= 1e-3, "relative error {worst}");
    }

    #[test]
    fn integrate_examples() {
        assert!((integrate(&ScalarField::constant(unit_line(10), 1.0)) - 1.0).abs() < 1e-15);
        let g = Grid::rect([2.0, 1.0], [12, 5]).unwrap();
        assert!((integrate(&ScalarField::constant(g, 1.0)) - 2.0).abs() < 1e-14);
        for n in [3, 10, 33, 128] {
            let f = ScalarField::from_fn(unit_line(n), |p| p[0]);
            assert!((integrate(&f) - 0.5).abs() < 1e-15, "n = {n}");
        }
    }

    #[test]
    fn norm_examples() {
        let g = unit_line(16);
        assert!((norm_p(&ScalarField::constant(g, 2.0), 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(norm_p(&ScalarField::constant(g, -3.0), f64::INFINITY).unwrap(), 3.0);
        let alt = ScalarField::from_fn(g, |p| if ((p[0] * 16.0) as usize) % 2 == 0 { 1.0 } else { -1.0 });
        assert!((norm_p(&alt, 2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(norm_p(&alt, 0.5), Err(Error::InvalidNorm(_))));
    }

    #[test]
    fn mass_examples() {
        let g = unit_line(8);
        assert_eq!(mass(&State::homogeneous(g, 0.0, [0.0; 4])), 0.0);
        assert!((mass(&State::homogeneous(g, 0.0, [1.0; 4])) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn state_rejects_mixed_grids() {
        let a = ScalarField::zeros(unit_line(8));
        let b = ScalarField::zeros(unit_line(9));
        assert!(matches!(
            State::new(0.0, [a.clone(), a.clone(), a, b]),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn face_count_2d() {
        let g = Grid::rect([1.0, 1.0], [4, 3]).unwrap();
        assert_eq!(g.faces().count(), 3 * 3 + 4 * 2);
    }

    #[test]
    fn spectral_identity_and_laplacian_agree() {
        let g = Grid::rect([1.0, 0.5], [9, 6]).unwrap();
        let f = ScalarField::from_fn(g, |p| (3.0 * p[0]).sin() + p[1] * p[1]);
        let spectral = NeumannSpectral::new(g);
        let mut same = f.clone();
        spectral.apply(&mut same, |_| 1.0);
        let mut lap = f.clone();
        spectral.apply(&mut lap, |l| l);
        let direct = laplacian_neumann(&f);
        for i in 0..f.len() {
            assert!((same.values()[i] - f.values()[i]).abs() < 1e-12);
            assert!((lap.values()[i] - direct.values()[i]).abs() < 1e-9 * (1.0 + direct.values()[i].abs()));
        }
    }
}
