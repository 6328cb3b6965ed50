mod common;

use approx::assert_abs_diff_eq;
use cqednet_core::qstate::{
    eigen_hermitian, max_abs, partial_trace, partial_trace_matrix, ComplexMatrix, SubsystemLayout,
};
use num_complex::Complex64;
use proptest::prelude::*;

use common::{density, pure};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_traces_compose(rho in density(12)) {
        let layout = SubsystemLayout::new(vec![2, 3, 2]).unwrap();
        let direct = partial_trace_matrix(rho.matrix(), &layout, &[0]).unwrap();
        let inner = partial_trace_matrix(rho.matrix(), &layout, &[0, 1]).unwrap();
        let two = SubsystemLayout::new(vec![2, 3]).unwrap();
        let staged = partial_trace_matrix(&inner, &two, &[0]).unwrap();
        prop_assert!(max_abs(&(direct - staged)) < 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(rho in density(6)) {
        let e = eigen_hermitian(rho.matrix()).unwrap();
        let d = ComplexMatrix::from_diagonal(&e.values.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>().into());
        let back = &e.vectors * d * e.vectors.adjoint();
        prop_assert!(max_abs(&(back - rho.matrix())) < 1e-12);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn entropy_is_additive(a in density(2), b in density(3)) {
        let joint = a.tensor(&b);
        let sum = a.von_neumann_entropy() + b.von_neumann_entropy();
        prop_assert!((joint.von_neumann_entropy() - sum).abs() < 1e-10);
    }

    #[test]
    fn purity_is_sum_of_squared_eigenvalues(rho in density(5)) {
        let s: f64 = rho.eigenvalues().iter().map(|l| l * l).sum();
        prop_assert!((rho.purity() - s).abs() < 1e-12);
    }

    #[test]
    fn pure_marginals_share_spectrum(psi in pure(6)) {
        let layout = SubsystemLayout::new(vec![2, 3]).unwrap();
        let a = partial_trace(&psi, &layout, &[0]).unwrap();
        let b = partial_trace(&psi, &layout, &[1]).unwrap();
        prop_assert!((a.von_neumann_entropy() - b.von_neumann_entropy()).abs() < 1e-9);
    }
}

#[test]
fn qubit_layout_partial_trace_of_product() {
    let layout = SubsystemLayout::qubits(2);
    let a = common::density_from(2, &[0.3, 0.1, -0.2, 0.4, 0.5, -0.1, 0.2, 0.7]);
    let b = common::density_from(2, &[0.9, 0.0, 0.1, -0.3, 0.2, 0.2, -0.4, 0.1]);
    let r = partial_trace(&a.tensor(&b), &layout, &[1]).unwrap();
    assert_abs_diff_eq!(max_abs(&(r.matrix() - b.matrix())), 0.0, epsilon = 1e-14);
}
