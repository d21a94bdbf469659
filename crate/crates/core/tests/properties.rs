use proptest::prelude::*;

use reversible_gs::domain::{gradient_inner, integrate, laplacian_neumann, mass, Grid, ScalarField, State};
use reversible_gs::equilibria::{compute_equilibria, equilibrium_energy_e2, homogeneous_steady_oracle};
use reversible_gs::lyapunov::{energy, PhiProfile};
use reversible_gs::model::{reaction_point, Params};
use reversible_gs::solver::{step_rgs_with, Scheme};
use reversible_gs::stability::{assemble_linearization, q_functional, Which};

fn grid_strategy() -> impl Strategy<Value = Grid> {
    prop_oneof![
        (3usize..40, 0.5..3.0f64).prop_map(|(n, l)| Grid::line(l, n).unwrap()),
        (3usize..10, 3usize..10, 0.5..2.0f64, 0.5..2.0f64).prop_map(|(nx, ny, lx, ly)| Grid::rect([lx, ly], [nx, ny]).unwrap()),
    ]
}

fn field_on(grid: Grid) -> impl Strategy<Value = ScalarField> {
    prop::collection::vec(-2.0..2.0f64, grid.len()).prop_map(move |v| ScalarField::new(grid, v).unwrap())
}

fn grid_and_fields() -> impl Strategy<Value = (ScalarField, ScalarField)> {
    grid_strategy().prop_flat_map(|g| (field_on(g), field_on(g)))
}

fn rates() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.05..20.0f64)
}

fn params() -> impl Strategy<Value = Params> {
    (prop::array::uniform4(1e-3..0.1f64), rates()).prop_map(|(d, k)| Params::new(d, k).unwrap())
}

fn positive_state(grid: Grid) -> impl Strategy<Value = State> {
    prop::collection::vec(0.0..2.0f64, 4 * grid.len()).prop_map(move |v| {
        let n = grid.len();
        let fields = std::array::from_fn(|i| ScalarField::new(grid, v[i * n..(i + 1) * n].to_vec()).unwrap());
        State::new(0.0, fields).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_is_symmetric_and_summation_by_parts((f, g) in grid_and_fields()) {
        let lf = laplacian_neumann(&f);
        let lg = laplacian_neumann(&g);
        let f_lg = integrate(&f.zip_map(&lg, |a, b| a * b).unwrap());
        let g_lf = integrate(&g.zip_map(&lf, |a, b| a * b).unwrap());
        let grad = gradient_inner(&f, &g).unwrap();
        let scale = 1.0 + grad.abs();
        prop_assert!((f_lg - g_lf).abs() <= 1e-10 * scale);
        prop_assert!((f_lg + grad).abs() <= 1e-10 * scale);
        prop_assert!(integrate(&lf).abs() <= 1e-10 * (1.0 + integrate(&lf.map(f64::abs))));
    }

    #[test]
    fn reactions_sum_to_zero_exactly(k in rates(), u in prop::array::uniform4(-5.0..5.0f64)) {
        let r = reaction_point(&k, u);
        // exact in the assembly order, rounding-level otherwise
        prop_assert_eq!(r[0] + ((r[1] + r[2]) + r[3]), 0.0);
        let size = r.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        prop_assert!((r[0] + r[1] + r[2] + r[3]).abs() <= 1e-14 * size);
    }

    #[test]
    fn reactions_are_quasi_positive(k in rates(), u in prop::array::uniform4(0.0..5.0f64), i in 0usize..4) {
        let mut u = u;
        u[i] = 0.0;
        prop_assert!(reaction_point(&k, u)[i] >= 0.0);
    }

    #[test]
    fn closed_form_equilibria_match_the_oracle(k in rates(), rho in 0.1..10.0f64, vol in 0.5..5.0f64) {
        let p = Params::new([1e-2; 4], k).unwrap();
        let pair = compute_equilibria(&p, rho, vol).unwrap();
        let oracle = homogeneous_steady_oracle(&p, rho, vol).unwrap();
        for eq in [pair.e_circ, pair.e_b] {
            let hit = oracle.iter().any(|o| (0..4).all(|i| (o[i] - eq[i]).abs() <= 1e-12 * o[i].abs().max(1.0)));
            prop_assert!(hit);
            let total: f64 = eq.iter().sum::<f64>() * vol;
            prop_assert!((total - rho).abs() <= 1e-12 * rho);
        }
        let (ec, eb) = equilibrium_energy_e2(&pair, &p);
        prop_assert!(ec < eb);
    }

    #[test]
    fn steps_conserve_mass_and_positivity(
        (p, s) in (params(), grid_strategy()).prop_flat_map(|(p, g)| (Just(p), positive_state(g))),
        strang in any::<bool>(),
    ) {
        let scheme = if strang { Scheme::Strang } else { Scheme::ImexEuler };
        let next = step_rgs_with(&p, &s, 1e-3, scheme).unwrap();
        let m0 = mass(&s);
        prop_assert!((mass(&next) - m0).abs() <= 1e-12 * m0.max(1.0));
        prop_assert!(next.min() >= -1e-10 * s.sup_norm());
    }

    #[test]
    fn quadratic_energy_is_non_negative_and_zero_only_at_zero(
        (p, s) in (params(), grid_strategy()).prop_flat_map(|(p, g)| (Just(p), positive_state(g))),
    ) {
        let e = energy(&PhiProfile::Power(2.0), &p, &s).unwrap();
        prop_assert!(e >= 0.0);
        let zero = State::homogeneous(*s.grid(), 0.0, [0.0; 4]);
        prop_assert_eq!(energy(&PhiProfile::Power(2.0), &p, &zero).unwrap(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn zero_mass_basis_is_orthonormal_and_mass_free(k in rates(), n in 3usize..12) {
        let p = Params::new([1e-2; 4], k).unwrap();
        let g = Grid::line(1.0, n).unwrap();
        let opr = assemble_linearization(&p, 1.0, Which::Circ, &g).unwrap();
        let b = &opr.zero_mass_basis;
        prop_assert_eq!(b.ncols(), 4 * n - 1);
        let gram = b.transpose() * b;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)] - target).abs() <= 1e-12);
            }
            prop_assert!(b.column(i).sum().abs() <= 1e-12);
        }
    }

    #[test]
    fn boundary_linearization_preserves_the_center_coordinate(
        k in rates(),
        v in prop::collection::vec(-1.0..1.0f64, 4 * 10),
    ) {
        let p = Params::new([1e-2, 2e-2, 3e-2, 4e-2], k).unwrap();
        let g = Grid::line(1.0, 10).unwrap();
        let opr = assemble_linearization(&p, 1.0, Which::B, &g).unwrap();
        let lv = opr.apply(&v);
        let fields = std::array::from_fn(|i| ScalarField::new(g, lv[i * 10..(i + 1) * 10].to_vec()).unwrap());
        let q = q_functional(&p, &State::new(0.0, fields).unwrap());
        let size = lv.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        prop_assert!(q.abs() <= 1e-12 * size);
    }
}
