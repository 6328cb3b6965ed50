//! Microscopic master equation in the dressed basis.
//!
//! Only transitions between the dressed ground state and each excited state
//! are retained: coherences rotate at Ω_m − Ω_n and decay at (Γ_m + Γ_n)/2,
//! populations exchange with ρ_00 at the downward/upward rates.

use num_complex::Complex64;

use crate::correlations::{CorrelationPoint, CorrelationSeries, Side};
use crate::error::{Error, Result};
use crate::network::{
    build_hamiltonian, dressed_states, enumerate_basis, prepare_initial_state, reduce_to_atoms,
    DressedBasis, ExcitationBasis, InitialState, NetworkParams,
};
use crate::qstate::{eigenvalues_hermitian, trace, ComplexMatrix, DensityOperator};

/// Bose–Einstein occupation 1/(e^{ω/T} − 1); zero at T = 0.
pub fn thermal_occupation(omega: f64, t: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("thermal occupation needs omega > 0, got {omega}")));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("temperature must be finite and >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / t).exp_m1())
}

/// Temperature at which a mode of frequency `omega` holds `nbar` photons.
pub fn temperature_for_occupation(omega: f64, nbar: f64) -> Result<f64> {
    if !(omega > 0.0) || nbar < 0.0 || !nbar.is_finite() {
        return Err(Error::Domain(format!("need omega > 0 and nbar >= 0, got {omega}, {nbar}")));
    }
    if nbar == 0.0 {
        return Ok(0.0);
    }
    Ok(omega / (1.0 / nbar).ln_1p())
}

/// How much each field channel contributes to the decay of a dressed state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateWeighting {
    /// ⟨k̃|a_j†a_j|k̃⟩: photon number of channel j in state k. Couples every
    /// excitation sector to the bath.
    #[default]
    ChannelOccupation,
    /// |⟨0̃|(a_j + a_j†)|k̃⟩|²: matrix element to the ground state. Vanishes
    /// for states with two or more excitations.
    GroundMatrixElement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    /// γ_{k→0}; entry 0 is unused and zero.
    pub gamma_down: Vec<f64>,
    /// γ_{0→k}; entry 0 is unused and zero.
    pub gamma_up: Vec<f64>,
}

impl RateTable {
    pub fn max_rate(&self) -> f64 {
        let up: f64 = self.gamma_up.iter().sum();
        self.gamma_down.iter().cloned().fold(up, f64::max)
    }

    /// Smallest non-zero downward rate.
    pub fn min_decay(&self) -> Option<f64> {
        self.gamma_down[1..]
            .iter()
            .cloned()
            .filter(|&g| g > 0.0)
            .min_by(f64::total_cmp)
    }
}

pub fn channel_weights(
    dressed: &DressedBasis,
    basis: &ExcitationBasis,
    weighting: RateWeighting,
) -> Result<[Vec<f64>; 3]> {
    let n = dressed.dim();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (j, w) in out.iter_mut().enumerate() {
        let a = basis.field_annihilation(j)?;
        match weighting {
            RateWeighting::ChannelOccupation => {
                let av = &a * &dressed.transform;
                for k in 0..n {
                    w[k] = av.column(k).norm_squared();
                }
            }
            RateWeighting::GroundMatrixElement => {
                let x = &a + a.adjoint();
                let m = dressed.transform.adjoint() * x * &dressed.transform;
                for k in 0..n {
                    w[k] = m[(0, k)].norm_sqr();
                }
            }
        }
        w[0] = 0.0;
    }
    Ok(out)
}

pub fn compute_rates(
    dressed: &DressedBasis,
    params: &NetworkParams,
    basis: &ExcitationBasis,
    weighting: RateWeighting,
) -> Result<RateTable> {
    let n = dressed.dim();
    let weights = channel_weights(dressed, basis, weighting)?;
    let mut down = vec![0.0; n];
    let mut up = vec![0.0; n];
    for k in 1..n {
        let w = dressed.energies[k] - dressed.energies[0];
        if !(w > 0.0) {
            return Err(Error::Domain(format!(
                "dressed state {k} lies at or below the ground state (transition frequency {w})"
            )));
        }
        for j in 0..3 {
            let nbar = thermal_occupation(w, params.temps[j])?;
            down[k] += weights[j][k] * params.gamma[j] * (nbar + 1.0);
            up[k] += weights[j][k] * params.gamma[j] * nbar;
        }
    }
    Ok(RateTable {
        gamma_down: down,
        gamma_up: up,
    })
}

/// A linear generator ρ̇ = L(ρ) that the RK4 driver can step.
pub trait Liouvillian {
    fn dim(&self) -> usize;
    /// Upper bound on the generator's spectral radius; sets the step size.
    fn stiffness(&self) -> f64;
    fn apply_into(&self, rho: &ComplexMatrix, out: &mut ComplexMatrix);
}

/// Precomputed generator: ρ̇_mn = z_mn ρ_mn plus population feeding.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    z: ComplexMatrix,
    gamma_down: Vec<f64>,
    gamma_up: Vec<f64>,
    max_rate: f64,
}

impl MasterEquation {
    pub fn new(dressed: &DressedBasis, rates: &RateTable) -> Result<Self> {
        let n = dressed.dim();
        if rates.gamma_down.len() != n || rates.gamma_up.len() != n {
            return Err(Error::Dimension(format!(
                "rate table has {} entries for {n} dressed states",
                rates.gamma_down.len()
            )));
        }
        let mut total = rates.gamma_down.clone();
        total[0] = rates.gamma_up[1..].iter().sum();
        let e = &dressed.energies;
        let z = ComplexMatrix::from_fn(n, n, |m, k| {
            Complex64::new(-(total[m] + total[k]) / 2.0, -(e[m] - e[k]))
        });
        let max_freq = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - e.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_rate = z.iter().fold(max_freq, |acc, v| acc.max(v.re.abs()));
        Ok(Self {
            z,
            gamma_down: rates.gamma_down.clone(),
            gamma_up: rates.gamma_up.clone(),
            max_rate,
        })
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        self.apply_into(rho, &mut out);
        out
    }

    /// Generator acting on row-major vec(ρ), index m·d + n.
    pub fn vectorized(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut l = ComplexMatrix::zeros(n * n, n * n);
        for m in 0..n {
            for k in 0..n {
                l[(m * n + k, m * n + k)] = self.z[(m, k)];
            }
        }
        for k in 1..n {
            l[(0, k * n + k)] += Complex64::new(self.gamma_down[k], 0.0);
            l[(k * n + k, 0)] += Complex64::new(self.gamma_up[k], 0.0);
        }
        l
    }
}

impl Liouvillian for MasterEquation {
    fn dim(&self) -> usize {
        self.z.nrows()
    }

    /// Largest |ω̄| or decay rate; sets the step size.
    fn stiffness(&self) -> f64 {
        self.max_rate
    }

    fn apply_into(&self, rho: &ComplexMatrix, out: &mut ComplexMatrix) {
        out.zip_zip_apply(&self.z, rho, |o, z, r| *o = z * r);
        let n = self.dim();
        let feed: f64 = (1..n).map(|k| self.gamma_down[k] * rho[(k, k)].re).sum();
        out[(0, 0)] += Complex64::new(feed, 0.0);
        let p0 = rho[(0, 0)];
        for k in 1..n {
            out[(k, k)] += p0 * self.gamma_up[k];
        }
    }
}

pub fn rhs(rho: &DensityOperator, dressed: &DressedBasis, rates: &RateTable) -> Result<ComplexMatrix> {
    if rho.dim() != dressed.dim() {
        return Err(Error::Dimension(format!(
            "state has dimension {} but the dressed basis has {}",
            rho.dim(),
            dressed.dim()
        )));
    }
    Ok(MasterEquation::new(dressed, rates)?.apply(rho.matrix()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    /// Upper bound on h·max(|ω̄|, rates).
    pub step_factor: f64,
    /// Trace drift beyond this is reported as an integration-accuracy error.
    pub drift_limit: f64,
    /// Compute the smallest eigenvalue of every sample for the audit.
    pub audit_positivity: bool,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            step_factor: 0.05,
            drift_limit: 1e-6,
            audit_positivity: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Audit {
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
    pub steps: usize,
}

impl Default for Audit {
    fn default() -> Self {
        Self {
            max_trace_drift: 0.0,
            min_eigenvalue: f64::INFINITY,
            steps: 0,
        }
    }
}

impl Audit {
    pub fn merge(&mut self, other: &Audit) {
        self.max_trace_drift = self.max_trace_drift.max(other.max_trace_drift);
        self.min_eigenvalue = self.min_eigenvalue.min(other.min_eigenvalue);
        self.steps += other.steps;
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Dressed-basis states, one per time.
    pub states: Vec<DensityOperator>,
    pub audit: Audit,
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::Input("empty time grid".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Input("time grid must be finite and ascending".into()));
    }
    Ok(())
}

/// Below this, entries are flushed to zero. Long relaxations otherwise decay
/// coherences into subnormals, which are an order of magnitude slower.
const FLUSH: f64 = 1e-200;

fn flush(x: f64) -> f64 {
    if x.abs() < FLUSH {
        0.0
    } else {
        x
    }
}

fn hermitize_in_place(m: &mut ComplexMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = Complex64::new(flush(m[(i, i)].re), 0.0);
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            let avg = Complex64::new(flush(avg.re), flush(avg.im));
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Fixed-step RK4 sampled on `t_grid`, handing each sample to `observe`.
/// Each step is Hermitized; the trace is left alone so that drift shows up in
/// the audit.
pub fn integrate_observed<L, F>(
    generator: &L,
    rho0: &ComplexMatrix,
    t_grid: &[f64],
    opts: &IntegratorOptions,
    mut observe: F,
) -> Result<Audit>
where
    L: Liouvillian + ?Sized,
    F: FnMut(f64, &ComplexMatrix) -> Result<()>,
{
    check_grid(t_grid)?;
    let n = generator.dim();
    if rho0.nrows() != n || rho0.ncols() != n {
        return Err(Error::Dimension(format!(
            "initial state has dimension {} but the generator has {n}",
            rho0.nrows()
        )));
    }
    let h_max = opts.step_factor / generator.stiffness().max(1e-300);
    let mut rho = rho0.clone();
    let tr0 = trace(rho0).re;
    let mut audit = Audit::default();
    let (mut k1, mut k2, mut k3, mut k4) = (
        ComplexMatrix::zeros(n, n),
        ComplexMatrix::zeros(n, n),
        ComplexMatrix::zeros(n, n),
        ComplexMatrix::zeros(n, n),
    );
    let mut tmp = ComplexMatrix::zeros(n, n);
    let mut t = t_grid[0];

    for &target in t_grid {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / h_max).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            let hc = Complex64::new(h, 0.0);
            let half = Complex64::new(h / 2.0, 0.0);
            let sixth = Complex64::new(h / 6.0, 0.0);
            for _ in 0..steps {
                generator.apply_into(&rho, &mut k1);
                tmp.zip_zip_apply(&rho, &k1, |o, r, k| *o = r + half * k);
                generator.apply_into(&tmp, &mut k2);
                tmp.zip_zip_apply(&rho, &k2, |o, r, k| *o = r + half * k);
                generator.apply_into(&tmp, &mut k3);
                tmp.zip_zip_apply(&rho, &k3, |o, r, k| *o = r + hc * k);
                generator.apply_into(&tmp, &mut k4);
                for idx in 0..n * n {
                    rho[idx] += sixth * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx]);
                }
                hermitize_in_place(&mut rho);
            }
            audit.steps += steps;
            t = target;
        }
        let drift = (trace(&rho).re - tr0).abs();
        audit.max_trace_drift = audit.max_trace_drift.max(drift);
        if drift > opts.drift_limit {
            return Err(Error::IntegrationAccuracy { drift, t });
        }
        if opts.audit_positivity {
            let min = eigenvalues_hermitian(&rho)?[0];
            audit.min_eigenvalue = audit.min_eigenvalue.min(min);
        }
        observe(target, &rho)?;
    }
    Ok(audit)
}

/// [`integrate_observed`] keeping every sample.
pub fn integrate_generator<L: Liouvillian + ?Sized>(
    generator: &L,
    rho0: &ComplexMatrix,
    t_grid: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(t_grid.len());
    let audit = integrate_observed(generator, rho0, t_grid, opts, |_, rho| {
        states.push(DensityOperator::from_matrix_unchecked(rho.clone()));
        Ok(())
    })?;
    Ok(Trajectory {
        times: t_grid.to_vec(),
        states,
        audit,
    })
}

pub fn integrate(
    rho0: &DensityOperator,
    dressed: &DressedBasis,
    rates: &RateTable,
    t_grid: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    let generator = MasterEquation::new(dressed, rates)?;
    integrate_generator(&generator, rho0.matrix(), t_grid, opts)
}

/// Largest dimension accepted by the exact propagator.
pub const EXACT_PATH_MAX_DIM: usize = 50;

/// ρ(t) = exp(L t) vec ρ(0) for small systems. Verification path only.
pub fn propagate_exact(generator: &MasterEquation, rho0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let n = generator.dim();
    if n > EXACT_PATH_MAX_DIM {
        return Err(Error::Input(format!(
            "exact propagation limited to dimension {EXACT_PATH_MAX_DIM}, got {n}"
        )));
    }
    let prop = (generator.vectorized() * Complex64::new(t, 0.0)).exp();
    let v = nalgebra::DVector::from_iterator(n * n, (0..n).flat_map(|m| (0..n).map(move |k| (m, k))).map(|(m, k)| rho0[(m, k)]));
    let out = prop * v;
    Ok(ComplexMatrix::from_fn(n, n, |m, k| out[m * n + k]))
}

pub fn correlation_trajectory(
    traj: &Trajectory,
    dressed: &DressedBasis,
    basis: &ExcitationBasis,
    side: Side,
) -> Result<CorrelationSeries> {
    let mut points = Vec::with_capacity(traj.times.len());
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let (atoms, p_vac) = reduce_to_atoms(state.matrix(), dressed, basis)?;
        points.push(CorrelationPoint::evaluate(*t, &atoms, p_vac, side)?);
    }
    Ok(CorrelationSeries { points })
}

/// Steady populations of the two-level exchange between |0̃⟩ and each |k̃⟩.
pub fn stationary_populations(rates: &RateTable) -> Vec<f64> {
    let n = rates.gamma_down.len();
    let mut p = vec![0.0; n];
    p[0] = 1.0;
    for k in 1..n {
        if rates.gamma_down[k] > 0.0 {
            p[k] = rates.gamma_up[k] / rates.gamma_down[k];
        }
    }
    let total: f64 = p.iter().sum();
    p.iter().map(|x| x / total).collect()
}

/// Network Hamiltonian, dressed basis and rates assembled in one place.
#[derive(Debug, Clone)]
pub struct TwoNodeModel {
    pub params: NetworkParams,
    pub basis: ExcitationBasis,
    pub hamiltonian: ComplexMatrix,
    pub dressed: DressedBasis,
    pub rates: RateTable,
    pub generator: MasterEquation,
    pub warnings: Vec<String>,
}

impl TwoNodeModel {
    pub fn new(params: NetworkParams, n_max: u32, weighting: RateWeighting) -> Result<Self> {
        let warnings = params.validate()?;
        let basis = enumerate_basis(n_max);
        let hamiltonian = build_hamiltonian(&params, &basis);
        let dressed = dressed_states(&hamiltonian, &basis)?;
        let rates = compute_rates(&dressed, &params, &basis, weighting)?;
        let generator = MasterEquation::new(&dressed, &rates)?;
        Ok(Self {
            params,
            basis,
            hamiltonian,
            dressed,
            rates,
            generator,
            warnings,
        })
    }

    pub fn initial_state(&self, init: &InitialState) -> Result<DensityOperator> {
        prepare_initial_state(init, &self.basis, &self.dressed)
    }

    pub fn integrate(
        &self,
        rho0: &DensityOperator,
        t_grid: &[f64],
        opts: &IntegratorOptions,
    ) -> Result<Trajectory> {
        integrate_generator(&self.generator, rho0.matrix(), t_grid, opts)
    }

    pub fn correlations(&self, traj: &Trajectory, side: Side) -> Result<CorrelationSeries> {
        correlation_trajectory(traj, &self.dressed, &self.basis, side)
    }

    /// Vacuum-projection probability of each trajectory sample.
    pub fn vacuum_probabilities(&self, traj: &Trajectory) -> Result<Vec<f64>> {
        traj.states
            .iter()
            .map(|s| reduce_to_atoms(s.matrix(), &self.dressed, &self.basis).map(|(_, p)| p))
            .collect()
    }
}

/// |0̃⟩⟨0̃| in a basis of dimension `n`.
pub fn dressed_ground(n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(0, 0)] = Complex64::new(1.0, 0.0);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::BareState;
    use crate::qstate::hermitize;
    use approx::assert_abs_diff_eq;

    fn params(temps: [f64; 3]) -> NetworkParams {
        NetworkParams {
            omega_a: 1.0,
            omega_0: 0.9,
            omega_f: 1.0,
            g1: 0.08,
            g2: 0.08,
            j: 0.08,
            gamma: [0.008; 3],
            temps,
        }
    }

    #[test]
    fn occupation_examples() {
        assert_eq!(thermal_occupation(1.0, 0.0).unwrap(), 0.0);
        let t = 0.7;
        assert_abs_diff_eq!(thermal_occupation(t * 2f64.ln(), t).unwrap(), 1.0, epsilon = 1e-12);
        let n = thermal_occupation(1e-4, 1.0).unwrap();
        assert!((n - 1e4).abs() / 1e4 < 1e-4);
        assert!(matches!(thermal_occupation(0.0, 1.0), Err(Error::Domain(_))));
        let tt = temperature_for_occupation(0.5, 4.0).unwrap();
        assert_abs_diff_eq!(thermal_occupation(0.5, tt).unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_temperature_has_no_upward_rates() {
        let m = TwoNodeModel::new(params([0.0; 3]), 2, RateWeighting::default()).unwrap();
        assert!(m.rates.gamma_up.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn zero_coupling_weights_are_kronecker() {
        let mut p = params([0.3, 0.0, 0.0]);
        p.g1 = 0.0;
        p.g2 = 0.0;
        p.j = 0.0;
        p.gamma = [0.01, 0.02, 0.03];
        for w in [RateWeighting::ChannelOccupation, RateWeighting::GroundMatrixElement] {
            let m = TwoNodeModel::new(p.clone(), 1, w).unwrap();
            let k = (0..m.basis.len())
                .find(|&k| {
                    let col = m.dressed.transform.column(k);
                    let i = m.basis.index_of(&BareState::parse("gg100").unwrap()).unwrap();
                    col[i].norm() > 0.5
                })
                .unwrap();
            let nbar = thermal_occupation(0.9, 0.3).unwrap();
            assert_abs_diff_eq!(m.rates.gamma_down[k], 0.01 * (nbar + 1.0), epsilon = 1e-14);
        }
    }

    #[test]
    fn detailed_balance_with_equal_baths() {
        let t = 0.2;
        let m = TwoNodeModel::new(params([t; 3]), 2, RateWeighting::default()).unwrap();
        for k in 1..m.dressed.dim() {
            if m.rates.gamma_down[k] == 0.0 {
                continue;
            }
            let w = m.dressed.energies[k] - m.dressed.energies[0];
            assert_abs_diff_eq!(
                m.rates.gamma_up[k] / m.rates.gamma_down[k],
                (-w / t).exp(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn rhs_examples() {
        let m = TwoNodeModel::new(params([0.0; 3]), 1, RateWeighting::default()).unwrap();
        let n = m.dressed.dim();
        let ground = DensityOperator::from_matrix_unchecked(dressed_ground(n));
        let d = rhs(&ground, &m.dressed, &m.rates).unwrap();
        assert!(d.iter().all(|z| z.norm() < 1e-15));

        let k = 3;
        let mut pk = ComplexMatrix::zeros(n, n);
        pk[(k, k)] = Complex64::new(1.0, 0.0);
        let d = rhs(&DensityOperator::from_matrix_unchecked(pk), &m.dressed, &m.rates).unwrap();
        assert_abs_diff_eq!(d[(k, k)].re, -m.rates.gamma_down[k], epsilon = 1e-15);
        assert_abs_diff_eq!(d[(0, 0)].re, m.rates.gamma_down[k], epsilon = 1e-15);
    }

    #[test]
    fn coherence_decay_rate() {
        let m = TwoNodeModel::new(params([0.4, 0.2, 0.1]), 1, RateWeighting::default()).unwrap();
        let n = m.dressed.dim();
        let k = 2;
        let mut c = ComplexMatrix::zeros(n, n);
        c[(k, 0)] = Complex64::new(1.0, 0.0);
        let d = m.generator.apply(&c);
        let up: f64 = m.rates.gamma_up[1..].iter().sum();
        let w = m.dressed.energies[k] - m.dressed.energies[0];
        assert_abs_diff_eq!(d[(k, 0)].re, -(m.rates.gamma_down[k] + up) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[(k, 0)].im, -w, epsilon = 1e-15);
    }

    #[test]
    fn pure_phase_evolution_without_rates() {
        let mut p = params([0.0; 3]);
        p.gamma = [0.0; 3];
        let m = TwoNodeModel::new(p, 1, RateWeighting::default()).unwrap();
        let n = m.dressed.dim();
        let mut r = ComplexMatrix::from_element(n, n, Complex64::new(1.0 / n as f64, 0.0));
        r = hermitize(&r);
        let t = 7.3;
        let traj = integrate_generator(&m.generator, &r, &[0.0, t], &IntegratorOptions { step_factor: 0.005, ..Default::default() }).unwrap();
        let out = traj.states[1].matrix();
        for a in 0..n {
            assert_abs_diff_eq!(out[(a, a)].re, r[(a, a)].re, epsilon = 1e-9);
            for b in 0..n {
                let w = m.dressed.energies[a] - m.dressed.energies[b];
                let want = r[(a, b)] * Complex64::new(0.0, -w * t).exp();
                assert!((out[(a, b)] - want).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn stationary_populations_are_fixed_points() {
        let m = TwoNodeModel::new(params([0.3; 3]), 2, RateWeighting::default()).unwrap();
        let p = stationary_populations(&m.rates);
        let n = p.len();
        let rho = ComplexMatrix::from_fn(n, n, |a, b| if a == b { Complex64::new(p[a], 0.0) } else { crate::qstate::ZERO });
        let d = m.generator.apply(&rho);
        assert!(d.iter().all(|z| z.norm() < 1e-12));
    }
}
