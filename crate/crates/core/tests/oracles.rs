//! Closed-form values worked out by hand for small parameter sets.

use reversible_gs::domain::{laplacian_neumann, Grid, ScalarField, State};
use reversible_gs::equilibria::{compute_equilibria, equilibrium_energy_e2, homogeneous_steady_oracle};
use reversible_gs::lyapunov::{energy, reaction_production, PhiProfile};
use reversible_gs::model::{reaction_point, rhs_rgs, Params};
use reversible_gs::solver::distance_to_equilibria;
use reversible_gs::stability::{
    assemble_linearization, center_coefficient_check, k_vec, nonlinearity_n, q_homogeneous, weighted_form_check,
    Which,
};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn rates(k: [f64; 4]) -> Params {
    Params::new([1e-2; 4], k).unwrap()
}

#[test]
fn neumann_laplacian_of_the_first_cosine_mode() {
    let g = Grid::line(1.0, 256).unwrap();
    let f = ScalarField::from_fn(g, |[x, _]| (std::f64::consts::PI * x).cos());
    let lf = laplacian_neumann(&f);
    let pi2 = std::f64::consts::PI.powi(2);
    let worst = f
        .values()
        .iter()
        .zip(lf.values())
        .map(|(u, l)| (l + pi2 * u).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-3 * pi2, "{worst}");
}

#[test]
fn equilibria_for_two_parameter_sets() {
    let pair = compute_equilibria(&Params::unit(), 1.0, 1.0).unwrap();
    assert_eq!(pair.k0, 4.0);
    assert_eq!(pair.e_circ, [0.25; 4]);
    assert_eq!(pair.e_b, [0.5, 0.0, 0.0, 0.5]);
    assert_eq!(equilibrium_energy_e2(&pair, &Params::unit()), (0.25, 0.5));

    let p = rates([2.0, 1.0, 1.0, 1.0]);
    let pair = compute_equilibria(&p, 1.0, 1.0).unwrap();
    assert_eq!(pair.k0, 5.0);
    for (got, want) in pair.e_circ.iter().zip([0.2, 0.2, 0.2, 0.4]) {
        assert!(close(*got, want, 1e-15));
    }
    for (got, want) in pair.e_b.iter().zip([1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0]) {
        assert!(close(*got, want, 1e-15));
    }
    let (ec, eb) = equilibrium_energy_e2(&pair, &p);
    assert!(close(ec, 0.2, 1e-15) && close(eb, 1.0 / 3.0, 1e-15));

    let oracle = homogeneous_steady_oracle(&Params::unit(), 1.0, 1.0).unwrap();
    assert_eq!(oracle.len(), 2);
    assert!(oracle.contains(&[0.5, 0.0, 0.0, 0.5]) && oracle.contains(&[0.25; 4]));
}

#[test]
fn reactions_at_hand_evaluated_points() {
    assert_eq!(reaction_point(&[1.0; 4], [1.0; 4]), [0.0; 4]);
    let r = reaction_point(&[2.0, 1.0, 1.0, 1.0], [1.0, 0.0, 0.0, 0.0]);
    assert_eq!((r[0], r[3]), (-2.0, 2.0));
}

#[test]
fn energies_at_the_equilibria() {
    let g = Grid::line(1.0, 8).unwrap();
    let p = Params::unit();
    let circ = State::homogeneous(g, 0.0, [0.25; 4]);
    let b = State::homogeneous(g, 0.0, [0.5, 0.0, 0.0, 0.5]);
    assert!(close(energy(&PhiProfile::Power(2.0), &p, &circ).unwrap(), 0.25, 1e-15));
    assert!(close(energy(&PhiProfile::Power(2.0), &p, &b).unwrap(), 0.5, 1e-15));
    let ent = 4.0 * (0.25 * 0.25_f64.ln() - 0.25 + 1.0);
    assert!(close(energy(&PhiProfile::Entropy, &p, &circ).unwrap(), ent, 1e-12));
    assert!(close(ent, 1.613706, 1e-6));

    let s = State::homogeneous(g, 0.0, [1.0, 0.0, 0.0, 0.0]);
    assert!(close(reaction_production(&PhiProfile::Power(2.0), &p, &s).unwrap(), 2.0, 1e-14));
}

#[test]
fn distance_between_the_unit_equilibria() {
    let g = Grid::line(1.0, 8).unwrap();
    let pair = compute_equilibria(&Params::unit(), 1.0, 1.0).unwrap();
    let (dc, db) = distance_to_equilibria(&State::homogeneous(g, 0.0, pair.e_b), &pair);
    assert!(close(dc, 0.5, 1e-15) && db == 0.0);
}

#[test]
fn kernel_vector_and_center_coordinate() {
    let p = rates([2.0, 1.0, 1.0, 1.0]);
    let kv = k_vec(&p);
    assert_eq!(kv, [2.0, -3.0, -3.0, 4.0]);
    assert!(close(q_homogeneous(&p, 1.0, &kv), 1.0, 1e-15));

    let g = Grid::line(1.0, 6).unwrap();
    let opr = assemble_linearization(&p, 1.0, Which::B, &g).unwrap();
    let v: Vec<f64> = kv.iter().flat_map(|c| std::iter::repeat(*c).take(6)).collect();
    assert!(opr.apply(&v).iter().all(|x| x.abs() <= 1e-14));
    let (lhs, rhs) = weighted_form_check(&opr, &v).unwrap();
    assert!(lhs.abs() <= 1e-13 && rhs.abs() <= 1e-13);
}

#[test]
fn center_ratio_closed_form() {
    let p = Params::unit();
    let xis = [1e-4, 1e-3, 1e-2, 5e-2];
    let ratios = center_coefficient_check(&p, 1.0, 1.0, &xis).unwrap();
    for (xi, r) in xis.iter().zip(ratios) {
        assert!(close(r, -0.5 - 4.0 * xi, 1e-12), "{xi}: {r}");
    }
}

#[test]
fn linearization_plus_nonlinearity_recovers_the_right_hand_side() {
    let p = Params::new([1e-2, 2e-2, 5e-3, 3e-2], [1.5, 0.7, 2.0, 0.9]).unwrap();
    let g = Grid::line(1.0, 12).unwrap();
    let pair = compute_equilibria(&p, 1.0, 1.0).unwrap();
    let w: [ScalarField; 4] = std::array::from_fn(|i| {
        ScalarField::from_fn(g, move |[x, _]| 1e-2 * ((i + 1) as f64 * 3.0 * x).cos())
    });
    let u = State::new(0.0, std::array::from_fn(|i| w[i].map(|v| v + pair.e_b[i]))).unwrap();
    let rhs = rhs_rgs(&p, &u);
    let flat: Vec<f64> = w.iter().flat_map(|f| f.values().to_vec()).collect();
    let lw = assemble_linearization(&p, 1.0, Which::B, &g).unwrap().apply(&flat);
    let n = nonlinearity_n(&p, 1.0, &State::new(0.0, w).unwrap());
    for i in 0..4 {
        for j in 0..12 {
            let diff = rhs[i].values()[j] - lw[i * 12 + j] - n.r[i][j];
            assert!(diff.abs() <= 1e-10, "species {i} cell {j}: {diff}");
        }
    }
}
