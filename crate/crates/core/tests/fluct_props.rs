use std::sync::OnceLock;

use gasket_hydro::fluct::{chi, field_apply, martingale_qv_theory, ou_covariance_theory};
use gasket_hydro::linalg::{symmetric_eigen, DenseMatrix};
use gasket_hydro::sim::{BoundarySpec, Exponent};
use gasket_hydro::spectral::{BoundaryCondition, Spectrum};
use gasket_hydro::{calculus, Field, GasketGraph};
use proptest::prelude::*;

fn graph() -> &'static GasketGraph {
    static G: OnceLock<GasketGraph> = OnceLock::new();
    G.get_or_init(|| GasketGraph::build(3).unwrap())
}

fn spectra() -> &'static [Spectrum<f64>; 3] {
    static S: OnceLock<[Spectrum<f64>; 3]> = OnceLock::new();
    S.get_or_init(|| {
        let g = graph();
        [
            Spectrum::compute(g, &BoundaryCondition::dirichlet()).unwrap(),
            Spectrum::compute(g, &BoundaryCondition::robin([2.0; 3]).unwrap()).unwrap(),
            Spectrum::compute(g, &BoundaryCondition::neumann()).unwrap(),
        ]
    })
}

fn field(xs: &[f64]) -> Field<f64> {
    Field::from_fn(graph(), |v| xs[v % xs.len()] * (1.0 + 0.1 * (v as f64).cos()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_is_linear(mask in any::<u64>(), xs in prop::collection::vec(-1.0f64..1.0, 5), ys in prop::collection::vec(-1.0f64..1.0, 7), rho in 0.05f64..0.95) {
        let g = graph();
        let occ: Vec<u8> = (0..g.num_vertices()).map(|v| ((mask >> (v % 64)) & 1) as u8).collect();
        let (f, h) = (field(&xs), field(&ys));
        let sum = field_apply(&occ, &f.add(&h).unwrap(), rho).unwrap();
        let parts = field_apply(&occ, &f, rho).unwrap() + field_apply(&occ, &h, rho).unwrap();
        prop_assert!((sum - parts).abs() < 1e-12);
    }

    #[test]
    fn covariance_kernel_is_psd(which in 0usize..3, k in 2usize..8, t in 0.0f64..0.05) {
        let sp = &spectra()[which];
        let phis: Vec<&Field<f64>> = (1..=k).map(|n| sp.eigenfunction(n).unwrap()).collect();
        let rows: Vec<Vec<f64>> = phis
            .iter()
            .map(|a| phis.iter().map(|b| ou_covariance_theory(sp, a, b, t, 0.5).unwrap()).collect())
            .collect();
        let eig = symmetric_eigen(&DenseMatrix::from_rows(rows)).unwrap();
        prop_assert!(eig.values.iter().all(|l| *l >= -1e-10));
    }

    #[test]
    fn covariance_follows_the_semigroup(which in 0usize..3, xs in prop::collection::vec(-1.0f64..1.0, 6), s in 0.0f64..0.05, t in 0.0f64..0.05) {
        let sp = &spectra()[which];
        let f = field(&xs);
        let direct = ou_covariance_theory(sp, &f, &f, s + t, 0.3).unwrap();
        let moved = sp.semigroup_apply(&f, s).unwrap();
        let composed = ou_covariance_theory(sp, &moved, &f, t, 0.3).unwrap();
        prop_assert!((direct - composed).abs() < 1e-10);
    }

    #[test]
    fn qv_theory_is_a_boundary_augmented_energy(xs in prop::collection::vec(-1.0f64..1.0, 6), t in 0.01f64..1.0, rho in 0.05f64..0.95) {
        let g = graph();
        let f = field(&xs);
        let bs = BoundarySpec::equal_rates(1.0, Exponent::new(2, 1).unwrap()).unwrap();
        let q = martingale_qv_theory(g, &bs, &f, t, rho).unwrap();
        let three_n = 27.0;
        let mut form = calculus::energy_quad(g, &f).unwrap();
        for k in 0..3 {
            form += (5.0f64 / 2.0).powi(3) / three_n * 2.0 * f[k] * f[k];
        }
        let want = three_n / g.num_vertices() as f64 * 2.0 * chi(rho) * t * form;
        prop_assert!((q - want).abs() < 1e-10 * want.abs().max(1.0));
        prop_assert!(q >= 0.0);
    }
}

#[test]
fn neumann_zero_mode_covariance_is_constant() {
    let sp = &spectra()[2];
    let phi = sp.eigenfunction(1).unwrap();
    assert!(sp.eigenvalue(1).unwrap().abs() < 1e-9);
    for t in [0.0, 0.1, 1.0, 10.0] {
        assert!((ou_covariance_theory(sp, phi, phi, t, 0.5).unwrap() - 0.25).abs() < 1e-10);
    }
}

#[test]
fn constant_field_examples() {
    let g = graph();
    let ones = vec![1u8; g.num_vertices()];
    let y = field_apply(&ones, &Field::constant(g, 1.0), 0.3).unwrap();
    assert!((y - 0.7 * (g.num_vertices() as f64).sqrt()).abs() < 1e-12);
}
