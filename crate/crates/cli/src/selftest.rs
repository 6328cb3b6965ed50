//! Quick invariant suite behind `cqednet selftest`.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use cqednet_core::chains::{build_two_chain, initial_state, uniform_grid, ChainParams, TwoChainInitial};
use cqednet_core::correlations::{
    classical_correlations_grid, classical_correlations_x, BellDiagonalState, Side,
};
use cqednet_core::mme::{
    integrate_generator, integrate_observed, propagate_exact, temperature_for_occupation, IntegratorOptions,
    RateWeighting, TwoNodeModel,
};
use cqednet_core::multipartite::tangle_pure;
use cqednet_core::network::{basis_dimension, enumerate_basis, InitialState, NetworkParams};
use cqednet_core::qstate::{max_abs, ComplexMatrix, ComplexVector, DensityOperator, SubsystemLayout};

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn check(name: &'static str, f: impl FnOnce() -> anyhow::Result<(bool, String)>) -> Check {
    let start = std::time::Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e:#}")),
    };
    Check {
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn freeze_params(temps: [f64; 3]) -> NetworkParams {
    NetworkParams {
        omega_a: 1.0,
        omega_0: 0.1,
        omega_f: 0.5,
        g1: 0.08,
        g2: 0.08,
        j: 0.08,
        gamma: [0.008; 3],
        temps,
    }
}

/// Random two-qubit X state in the |ee⟩,|eg⟩,|ge⟩,|gg⟩ basis.
pub fn random_x_state(rng: &mut impl Rng) -> ComplexMatrix {
    let mut p: [f64; 4] = std::array::from_fn(|_| rng.gen::<f64>().powi(2) + 1e-3);
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    let mut m = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        m[(i, i)] = Complex64::new(p[i], 0.0);
    }
    for (i, j) in [(0, 3), (1, 2)] {
        let z = Complex64::from_polar(rng.gen::<f64>() * (p[i] * p[j]).sqrt(), rng.gen::<f64>() * std::f64::consts::TAU);
        m[(i, j)] = z;
        m[(j, i)] = z.conj();
    }
    m
}

pub fn random_pure(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let v = ComplexVector::from_fn(dim, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    DensityOperator::from_pure(&v.unscale(v.norm())).expect("normalized")
}

/// Atoms in 0.6|eg⟩ + 0.48|ge⟩ + 0.64|gg⟩, which fits an N=1 basis.
pub fn single_excitation_atoms() -> InitialState {
    let v = ComplexVector::from_vec(
        [0.0, 0.6, 0.48, 0.64].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    );
    InitialState::Atomic(DensityOperator::from_pure(&v).expect("normalized"))
}

pub fn run_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();

    out.push(check("basis_dimensions", || {
        let (a, b) = (enumerate_basis(2).len(), enumerate_basis(6).len());
        Ok((a == 19 && b == 231 && basis_dimension(2) == 19, format!("N=2: {a}, N=6: {b}")))
    }));

    out.push(check("expm_oracle_n1", || {
        let model = TwoNodeModel::new(freeze_params([0.0; 3]), 1, RateWeighting::ChannelOccupation)?;
        let rho0 = model.initial_state(&single_excitation_atoms())?;
        let t = 5.0 / 0.008;
        let opts = IntegratorOptions {
            step_factor: 0.005,
            ..IntegratorOptions::default()
        };
        let traj = integrate_generator(&model.generator, rho0.matrix(), &[0.0, t], &opts)?;
        let exact = propagate_exact(&model.generator, rho0.matrix(), t)?;
        let err = max_abs(&(traj.states[1].matrix() - exact));
        Ok((err <= 1e-8, format!("max |RK4 − expm| = {err:e}")))
    }));

    out.push(check("thermal_fixed_point", || {
        let temp = temperature_for_occupation(0.5, 0.5)?;
        let model = TwoNodeModel::new(freeze_params([temp; 3]), 1, RateWeighting::ChannelOccupation)?;
        let rho0 = model.initial_state(&single_excitation_atoms())?;
        let t = 1000.0 / 0.008;
        let traj = model.integrate(&rho0, &[0.0, t], &IntegratorOptions::default())?;
        let rho = traj.states[1].matrix();
        let e = &model.dressed.energies;
        let mut worst: f64 = 0.0;
        for k in 1..e.len() {
            let want = (-(e[k] - e[0]) / temp).exp();
            let got = rho[(k, k)].re / rho[(0, 0)].re;
            worst = worst.max((got - want).abs());
        }
        Ok((worst <= 1e-3, format!("max |p_k/p_0 − e^(−ω/T)| = {worst:e}")))
    }));

    out.push(check("trace_and_positivity", || {
        let model = TwoNodeModel::new(freeze_params([0.0; 3]), 2, RateWeighting::ChannelOccupation)?;
        let rho0 = model.initial_state(&InitialState::BellDiagonal(BellDiagonalState::new([1.0, -0.9, 0.9])?))?;
        let grid: Vec<f64> = uniform_grid(5.0, 101).iter().map(|t| t / 0.008).collect();
        let a = model.integrate(&rho0, &grid, &IntegratorOptions::default())?.audit;
        Ok((
            a.max_trace_drift <= 1e-8 && a.min_eigenvalue >= -1e-7,
            format!("drift {:e}, min eigenvalue {:e}", a.max_trace_drift, a.min_eigenvalue),
        ))
    }));

    out.push(check("discord_fast_vs_grid", || {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let m = random_x_state(&mut rng);
            let fast = classical_correlations_x(&m, Side::B)?.value;
            let grid = classical_correlations_grid(&m, Side::B)?.value;
            worst = worst.max((fast - grid).abs());
        }
        Ok((worst <= 1e-4, format!("max |fast − grid| over 50 X states = {worst:e}")))
    }));

    out.push(check("ckw_pure_three_qubit", || {
        let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
        let layout = SubsystemLayout::qubits(3);
        let mut min = f64::INFINITY;
        for _ in 0..50 {
            let rho = random_pure(8, &mut rng);
            for site in 0..3 {
                min = min.min(tangle_pure(&rho, site, &layout)?);
            }
        }
        Ok((min >= -1e-9, format!("min τ over 50 states = {min:e}")))
    }));

    out.push(check("lossless_chain_purity", || {
        let net = build_two_chain(&ChainParams::reference(3, 0.0))?;
        let rho0 = initial_state(TwoChainInitial::B, std::f64::consts::FRAC_PI_4, 3)?;
        let mut worst: f64 = 0.0;
        integrate_observed(&net, rho0.matrix(), &uniform_grid(6.0, 61), &IntegratorOptions::default(), |_, rho| {
            let p: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
            worst = worst.max((1.0 - p).abs());
            Ok(())
        })?;
        Ok((worst <= 1e-8, format!("max |1 − tr ρ²| = {worst:e}")))
    }));

    out
}
