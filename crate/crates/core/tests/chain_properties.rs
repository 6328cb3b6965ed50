use cqednet_core::chains::{
    basis_index, build_single_chain, build_two_chain, initial_state, site_populations, uniform_grid, ChainParams,
    TwoChainInitial,
};
use cqednet_core::mme::{integrate_generator, integrate_observed, IntegratorOptions};
use cqednet_core::multipartite::tangle_pure;
use cqednet_core::qstate::{ComplexVector, DensityOperator, SubsystemLayout, ONE, ZERO};
use proptest::prelude::*;

fn site_state(site: usize, n: usize) -> DensityOperator {
    let mut v = ComplexVector::from_element(1 << n, ZERO);
    v[basis_index(&[site], n).unwrap()] = ONE;
    DensityOperator::from_pure(&v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn single_chain_transfer_is_mirror_symmetric(n in 3usize..6, t in 0.5..4.0f64) {
        let net = build_single_chain(&ChainParams::reference(n, 0.0)).unwrap();
        let opts = IntegratorOptions::default();
        let from_first = integrate_generator(&net, site_state(0, n).matrix(), &[0.0, t], &opts).unwrap();
        let from_last = integrate_generator(&net, site_state(n - 1, n).matrix(), &[0.0, t], &opts).unwrap();
        let a = site_populations(from_first.states[1].matrix());
        let b = site_populations(from_last.states[1].matrix());
        for k in 0..n {
            prop_assert!((a[k] - b[n - 1 - k]).abs() < 1e-9);
        }
    }

    #[test]
    fn excitations_decay_at_the_loss_rate(gamma in 0.0..0.5f64, theta in 0.1..1.5f64) {
        let net = build_two_chain(&ChainParams::reference(3, gamma)).unwrap();
        let rho0 = initial_state(TwoChainInitial::B, theta, 3).unwrap();
        let n0: f64 = site_populations(rho0.matrix()).iter().sum();
        let grid = uniform_grid(4.0, 9);
        integrate_observed(&net, rho0.matrix(), &grid, &IntegratorOptions::default(), |t, rho| {
            let n: f64 = site_populations(rho).iter().sum();
            assert!((n - n0 * (-gamma * t).exp()).abs() < 1e-9, "t={t}: {n}");
            if gamma == 0.0 {
                let p: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
                assert!((p - 1.0).abs() < 1e-9);
            }
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn psi_a_never_carries_tangle(theta in 0.05..1.5f64) {
        let net = build_two_chain(&ChainParams::reference(3, 0.0)).unwrap();
        let rho0 = initial_state(TwoChainInitial::A, theta, 3).unwrap();
        let layout = SubsystemLayout::qubits(6);
        let opts = IntegratorOptions { audit_positivity: false, ..IntegratorOptions::default() };
        integrate_observed(&net, rho0.matrix(), &uniform_grid(6.0, 13), &opts, |_, rho| {
            let state = DensityOperator::from_matrix_unchecked(rho.clone());
            assert!(tangle_pure(&state, 0, &layout).unwrap().abs() < 1e-8);
            Ok(())
        })
        .unwrap();
    }
}
