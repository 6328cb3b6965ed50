//! Two-qubit correlation measures.
//!
//! Qubit basis order is |e⟩, |g⟩ (σ_z|e⟩ = |e⟩), so the two-qubit basis is
//! |ee⟩, |eg⟩, |ge⟩, |gg⟩. Entropies are in bits.

mod sudden;

pub use sudden::{detect_sudden_changes, detect_kinks, SuddenChangeOptions, SuddenChangeReport};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::optimize::{golden_max, nelder_mead};
use crate::qstate::{
    binary_entropy, eigen_hermitian, hermitize, pauli_x, pauli_y, pauli_z, shannon_bits,
    tensor_product, ComplexMatrix, DensityOperator, ONE, ZERO,
};

/// Off-X entries at or below this size are treated as numerical leakage.
pub const X_LEAKAGE_TOLERANCE: f64 = 1e-8;

const GRID_THETA: usize = 128;
const GRID_PHI: usize = 64;
const REFINE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    A,
    #[default]
    B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagonalState {
    c: [f64; 3],
}

impl BellDiagonalState {
    pub fn new(c: [f64; 3]) -> Result<Self> {
        if c.iter().any(|x| !x.is_finite() || x.abs() > 1.0 + 1e-12) {
            return Err(Error::InvalidState(format!("c-vector {c:?} outside [-1, 1]")));
        }
        let s = Self { c };
        let lam = s.eigenvalues();
        if lam.iter().any(|&l| l < -1e-12) {
            return Err(Error::InvalidState(format!(
                "c-vector {c:?} gives negative eigenvalues {lam:?}"
            )));
        }
        Ok(s)
    }

    pub fn c(&self) -> [f64; 3] {
        self.c
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let [c1, c2, c3] = self.c;
        [
            (1.0 + c3 + (c1 - c2)) / 4.0,
            (1.0 + c3 - (c1 - c2)) / 4.0,
            (1.0 - c3 + (c1 + c2)) / 4.0,
            (1.0 - c3 - (c1 + c2)) / 4.0,
        ]
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let [c1, c2, c3] = self.c;
        let r = |x: f64| Complex64::new(x / 4.0, 0.0);
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = r(1.0 + c3);
        m[(3, 3)] = r(1.0 + c3);
        m[(1, 1)] = r(1.0 - c3);
        m[(2, 2)] = r(1.0 - c3);
        m[(0, 3)] = r(c1 - c2);
        m[(3, 0)] = r(c1 - c2);
        m[(1, 2)] = r(c1 + c2);
        m[(2, 1)] = r(c1 + c2);
        m
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_matrix_unchecked(self.matrix())
    }
}

/// Local Bloch vectors and correlation tensor:
/// ρ = ¼(I⊗I + a·σ⊗I + I⊗b·σ + Σ T_ij σ_i⊗σ_j).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDecomposition {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub t: [[f64; 3]; 3],
}

fn expect(rho: &ComplexMatrix, op: &ComplexMatrix) -> f64 {
    let mut acc = ZERO;
    for i in 0..rho.nrows() {
        for j in 0..rho.ncols() {
            acc += rho[(i, j)] * op[(j, i)];
        }
    }
    acc.re
}

fn check_two_qubit(rho: &ComplexMatrix) -> Result<()> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::Dimension(format!(
            "two-qubit measure needs a 4x4 state, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    Ok(())
}

pub fn bloch_decomposition(rho: &ComplexMatrix) -> Result<BlochDecomposition> {
    check_two_qubit(rho)?;
    let id = ComplexMatrix::identity(2, 2);
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut out = BlochDecomposition {
        a: [0.0; 3],
        b: [0.0; 3],
        t: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        out.a[i] = expect(rho, &tensor_product(&paulis[i], &id));
        out.b[i] = expect(rho, &tensor_product(&id, &paulis[i]));
        for j in 0..3 {
            out.t[i][j] = expect(rho, &tensor_product(&paulis[i], &paulis[j]));
        }
    }
    Ok(out)
}

/// Signed singular values of the correlation tensor. Local unitaries rotate
/// T to diag(c); this is the Bell-diagonal vector of the state's LU class.
pub fn canonical_c(rho: &ComplexMatrix) -> Result<[f64; 3]> {
    let t = bloch_decomposition(rho)?.t;
    let m = nalgebra::Matrix3::from_fn(|i, j| t[i][j]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    if m.determinant() < 0.0 {
        s[2] = -s[2];
    }
    Ok([s[0], s[1], s[2]])
}

fn x_positions() -> [(usize, usize); 8] {
    [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)]
}

/// Largest off-X entry magnitude.
pub fn x_leakage(rho: &ComplexMatrix) -> f64 {
    x_positions()
        .iter()
        .map(|&(i, j)| rho[(i, j)].norm())
        .fold(0.0, f64::max)
}

fn zero_off_x(rho: &ComplexMatrix) -> ComplexMatrix {
    let mut m = rho.clone();
    for (i, j) in x_positions() {
        m[(i, j)] = ZERO;
    }
    m
}

fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eigen_hermitian(&hermitize(m))?;
    let n = m.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let s = e.values[k].max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        let v = e.vectors.column(k);
        out += (v * v.adjoint()).scale(s);
    }
    Ok(out)
}

/// Off-X entries at or below this are treated as zero by the closed forms.
const X_LEAKAGE_TOL: f64 = 1e-14;

/// 2·max(0, |ρ₀₃| − √(ρ₁₁ρ₂₂), |ρ₁₂| − √(ρ₀₀ρ₃₃)) for an X state.
fn concurrence_x(rho: &ComplexMatrix) -> f64 {
    let p = |i: usize| rho[(i, i)].re.max(0.0);
    let a = rho[(0, 3)].norm() - (p(1) * p(2)).sqrt();
    let b = rho[(1, 2)].norm() - (p(0) * p(3)).sqrt();
    (2.0 * a.max(b)).clamp(0.0, 1.0)
}

pub fn concurrence_matrix(rho: &ComplexMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    // the eigenvalue route loses half the digits near degenerate zeros
    if x_leakage(rho) <= X_LEAKAGE_TOL {
        return Ok(concurrence_x(rho));
    }
    let yy = tensor_product(&pauli_y(), &pauli_y());
    let flipped = &yy * rho.map(|z| z.conj()) * &yy;
    // eigenvalues of ρρ̃ equal those of the Hermitian √ρ ρ̃ √ρ
    let s = sqrt_psd(rho)?;
    let r = &s * flipped * &s;
    let mut lam: Vec<f64> = eigen_hermitian(&hermitize(&r))?
        .values
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).clamp(0.0, 1.0))
}

pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    concurrence_matrix(rho.matrix())
}

pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 + (1.0 - c * c).sqrt() / 2.0)
}

pub fn eof(rho: &DensityOperator) -> Result<f64> {
    Ok(eof_from_concurrence(concurrence(rho)?))
}

fn entropy_matrix(m: &ComplexMatrix) -> Result<f64> {
    Ok(shannon_bits(&eigen_hermitian(&hermitize(m))?.values))
}

fn bloch_entropy(v: &[f64; 3]) -> f64 {
    let r = norm3(v).min(1.0);
    binary_entropy((1.0 + r) / 2.0)
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn mutual_information_matrix(rho: &ComplexMatrix) -> Result<f64> {
    let d = bloch_decomposition(rho)?;
    let s = entropy_matrix(rho)?;
    Ok((bloch_entropy(&d.a) + bloch_entropy(&d.b) - s).max(0.0))
}

pub fn mutual_information(rho: &DensityOperator) -> Result<f64> {
    mutual_information_matrix(rho.matrix())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalCorrelation {
    pub value: f64,
    /// Bloch polar angle of the optimal projective measurement.
    pub theta: f64,
    /// Bloch azimuth of the optimal projective measurement.
    pub phi: f64,
}

/// Unmeasured Bloch vector, measured Bloch vector and the correlation tensor
/// oriented so that T·n acts on the measured side.
fn oriented(d: &BlochDecomposition, side: Side) -> ([f64; 3], [f64; 3], [[f64; 3]; 3]) {
    match side {
        Side::B => (d.a, d.b, d.t),
        Side::A => {
            let mut tt = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    tt[i][j] = d.t[j][i];
                }
            }
            (d.b, d.a, tt)
        }
    }
}

fn measured_information(
    unmeasured: &[f64; 3],
    measured: &[f64; 3],
    t: &[[f64; 3]; 3],
    n: &[f64; 3],
) -> f64 {
    let bn = measured[0] * n[0] + measured[1] * n[1] + measured[2] * n[2];
    let mut tn = [0.0; 3];
    for i in 0..3 {
        tn[i] = t[i][0] * n[0] + t[i][1] * n[1] + t[i][2] * n[2];
    }
    let mut conditional = 0.0;
    for s in [1.0, -1.0] {
        let p = (1.0 + s * bn) / 2.0;
        if p <= 1e-15 {
            continue;
        }
        let r = [
            (unmeasured[0] + s * tn[0]) / (2.0 * p),
            (unmeasured[1] + s * tn[1]) / (2.0 * p),
            (unmeasured[2] + s * tn[2]) / (2.0 * p),
        ];
        conditional += p * bloch_entropy(&r);
    }
    bloch_entropy(unmeasured) - conditional
}

fn direction(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Classical correlations by a (θ, φ) grid over the measurement direction
/// followed by simplex refinement. Valid for any two-qubit state.
pub fn classical_correlations_grid(rho: &ComplexMatrix, side: Side) -> Result<ClassicalCorrelation> {
    let d = bloch_decomposition(rho)?;
    let (u, m, t) = oriented(&d, side);
    let j = |th: f64, ph: f64| measured_information(&u, &m, &t, &direction(th, ph));

    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(GRID_THETA * GRID_PHI);
    for it in 0..GRID_THETA {
        let th = std::f64::consts::PI * it as f64 / (GRID_THETA - 1) as f64;
        for ip in 0..GRID_PHI {
            let ph = 2.0 * std::f64::consts::PI * ip as f64 / GRID_PHI as f64;
            grid.push((j(th, ph), th, ph));
        }
    }
    grid.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut best = ClassicalCorrelation {
        value: grid[0].0,
        theta: grid[0].1,
        phi: grid[0].2,
    };
    for &(_, th, ph) in grid.iter().take(4) {
        let m = nelder_mead(|x| -j(x[0], x[1]), &[th, ph], 0.02, 1e-15, REFINE_TOL, 2000);
        if -m.value > best.value {
            best = ClassicalCorrelation {
                value: -m.value,
                theta: m.x[0],
                phi: m.x[1],
            };
        }
    }
    best.value = best.value.max(0.0);
    Ok(best)
}

/// Classical correlations of an X-state. The optimal azimuth follows the
/// leading singular direction of the transverse block of T, leaving a
/// one-dimensional search over θ.
pub fn classical_correlations_x(rho: &ComplexMatrix, side: Side) -> Result<ClassicalCorrelation> {
    check_two_qubit(rho)?;
    let leak = x_leakage(rho);
    if leak > X_LEAKAGE_TOLERANCE {
        return Err(Error::InvalidState(format!("not an X-state (off-X entry {leak:e})")));
    }
    let d = bloch_decomposition(&zero_off_x(rho))?;
    let (u, m, t) = oriented(&d, side);
    let block = Matrix2::new(t[0][0], t[0][1], t[1][0], t[1][1]);
    let svd = block.svd(false, true);
    let (k, s_max) = if svd.singular_values[0] >= svd.singular_values[1] {
        (0, svd.singular_values[0])
    } else {
        (1, svd.singular_values[1])
    };
    let phi = svd
        .v_t
        .map(|vt| vt[(k, 1)].atan2(vt[(k, 0)]))
        .unwrap_or(0.0);
    let (a3, b3, tzz) = (u[2], m[2], t[2][2]);
    let s_u = bloch_entropy(&u);

    let j = |th: f64| -> f64 {
        let (st, ct) = (th.sin(), th.cos());
        let mut cond = 0.0;
        for s in [1.0, -1.0] {
            let p = (1.0 + s * b3 * ct) / 2.0;
            if p <= 1e-15 {
                continue;
            }
            let r = [s_max * st / (2.0 * p), 0.0, (a3 + s * tzz * ct) / (2.0 * p)];
            cond += p * bloch_entropy(&r);
        }
        s_u - cond
    };

    let half_pi = std::f64::consts::FRAC_PI_2;
    let n = 64;
    let mut best_i: usize = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=n {
        let v = j(half_pi * i as f64 / n as f64);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = half_pi * (best_i.saturating_sub(1)) as f64 / n as f64;
    let hi = half_pi * ((best_i + 1).min(n)) as f64 / n as f64;
    let (mut theta, mut value) = golden_max(j, lo, hi, 1e-12);
    for th in [0.0, half_pi] {
        let v = j(th);
        if v > value {
            theta = th;
            value = v;
        }
    }
    Ok(ClassicalCorrelation {
        value: value.max(0.0),
        theta,
        phi,
    })
}

/// Classical correlations, using the X-state path when off-X leakage is
/// below tolerance and the general grid path otherwise.
pub fn classical_correlations(rho: &DensityOperator, side: Side) -> Result<ClassicalCorrelation> {
    let m = rho.matrix();
    check_two_qubit(m)?;
    if x_leakage(m) <= X_LEAKAGE_TOLERANCE {
        classical_correlations_x(m, side)
    } else {
        classical_correlations_grid(m, side)
    }
}

pub fn quantum_discord(rho: &DensityOperator, side: Side) -> Result<f64> {
    let i = mutual_information(rho)?;
    let cc = classical_correlations(rho, side)?.value;
    Ok((i - cc).max(0.0))
}

fn radicand(x: f64) -> Result<f64> {
    if x < -1e-12 {
        return Err(Error::InvalidState(format!("negative radicand {x:e} in b_max")));
    }
    Ok(x.max(0.0).sqrt())
}

/// The three square-root pair sums whose maximum (halved) is b_max.
pub fn bures_b_terms(c: [f64; 3]) -> Result<[f64; 3]> {
    let [c1, c2, c3] = c;
    let pair = |ci: f64, cj: f64, ck: f64| -> Result<f64> {
        Ok(radicand((1.0 + ci).powi(2) - (cj - ck).powi(2))?
            + radicand((1.0 - ci).powi(2) - (cj + ck).powi(2))?)
    };
    Ok([pair(c1, c2, c3)?, pair(c2, c1, c3)?, pair(c3, c1, c2)?])
}

pub fn bures_b_max(c: [f64; 3]) -> Result<f64> {
    let b = bures_b_terms(c)?;
    Ok(0.5 * b[0].max(b[1]).max(b[2]))
}

/// Normalized Bures geometric discord of a Bell-diagonal state.
pub fn bures_gqd_bd(state: &BellDiagonalState) -> Result<f64> {
    bures_gqd_from_c(state.c())
}

pub fn bures_gqd_from_c(c: [f64; 3]) -> Result<f64> {
    let b = bures_b_max(c)?.min(1.0);
    let d = (1.0 - ((1.0 + b) / 2.0).sqrt()) / (1.0 - 1.0 / 2f64.sqrt());
    Ok(d.clamp(0.0, 1.0))
}

/// Bell-diagonal Bures discord evaluated on the state's canonical c-vector.
/// Canonical vectors of physical states may sit a rounding error outside the
/// BD tetrahedron, so radicands are clamped here instead of rejected.
pub fn bures_gqd(rho: &DensityOperator) -> Result<f64> {
    let [c1, c2, c3] = canonical_c(rho.matrix())?;
    let f = |x: f64| x.max(0.0).sqrt();
    let pair = |ci: f64, cj: f64, ck: f64| {
        f((1.0 + ci).powi(2) - (cj - ck).powi(2)) + f((1.0 - ci).powi(2) - (cj + ck).powi(2))
    };
    let b = 0.5 * pair(c1, c2, c3).max(pair(c2, c1, c3)).max(pair(c3, c1, c2));
    let b = b.min(1.0);
    Ok(((1.0 - ((1.0 + b) / 2.0).sqrt()) / (1.0 - 1.0 / 2f64.sqrt())).clamp(0.0, 1.0))
}

pub fn bd_concurrence(state: &BellDiagonalState) -> f64 {
    let [c1, c2, c3] = state.c();
    ((c1 - c2).abs() - 1.0 + c3)
        .max((c1 + c2).abs() - 1.0 - c3)
        .max(0.0)
        / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricEntanglement {
    pub value: f64,
    pub normalized: f64,
}

pub fn geometric_entanglement(concurrence: f64) -> GeometricEntanglement {
    let c = concurrence.clamp(0.0, 1.0);
    let value = 2.0 - 2f64.sqrt() * (1.0 + (1.0 - c * c).sqrt()).sqrt();
    GeometricEntanglement {
        value,
        normalized: value / (2.0 - 2f64.sqrt()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    MutualInfo,
    Cc,
    Qd,
    Eof,
    Concurrence,
    Gqd,
    Ge,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::MutualInfo,
        Measure::Cc,
        Measure::Qd,
        Measure::Gqd,
        Measure::Eof,
        Measure::Concurrence,
        Measure::Ge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::MutualInfo => "mutual_info",
            Measure::Cc => "cc",
            Measure::Qd => "qd",
            Measure::Eof => "eof",
            Measure::Concurrence => "concurrence",
            Measure::Gqd => "gqd",
            Measure::Ge => "ge",
        }
    }

    pub fn from_name(s: &str) -> Option<Measure> {
        Measure::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationPoint {
    pub t: f64,
    pub mutual_info: f64,
    pub cc: f64,
    pub qd: f64,
    pub eof: f64,
    pub concurrence: f64,
    pub gqd_bures: f64,
    pub ge_norm: f64,
    pub p_vac: f64,
    /// The state had off-X leakage above tolerance and went through the grid path.
    pub general_path: bool,
}

impl CorrelationPoint {
    pub fn evaluate(t: f64, rho: &DensityOperator, p_vac: f64, side: Side) -> Result<Self> {
        let raw = rho.matrix();
        check_two_qubit(raw)?;
        let general_path = x_leakage(raw) > X_LEAKAGE_TOLERANCE;
        let m = if general_path { raw.clone() } else { zero_off_x(raw) };
        let mutual_info = mutual_information_matrix(&m)?;
        let cc = if general_path {
            classical_correlations_grid(&m, side)?
        } else {
            classical_correlations_x(&m, side)?
        }
        .value;
        let concurrence = concurrence_matrix(&m)?;
        let state = DensityOperator::from_matrix_unchecked(m);
        Ok(Self {
            t,
            mutual_info,
            cc,
            qd: (mutual_info - cc).max(0.0),
            eof: eof_from_concurrence(concurrence),
            concurrence,
            gqd_bures: bures_gqd(&state)?,
            ge_norm: geometric_entanglement(concurrence).normalized,
            p_vac,
            general_path,
        })
    }

    pub fn get(&self, measure: Measure) -> f64 {
        match measure {
            Measure::MutualInfo => self.mutual_info,
            Measure::Cc => self.cc,
            Measure::Qd => self.qd,
            Measure::Eof => self.eof,
            Measure::Concurrence => self.concurrence,
            Measure::Gqd => self.gqd_bures,
            Measure::Ge => self.ge_norm,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CorrelationSeries {
    pub points: Vec<CorrelationPoint>,
}

impl CorrelationSeries {
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn column(&self, measure: Measure) -> Vec<f64> {
        self.points.iter().map(|p| p.get(measure)).collect()
    }

    pub fn general_path_count(&self) -> usize {
        self.points.iter().filter(|p| p.general_path).count()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Unit-trace projector onto |ψ⟩ = α|ee⟩ + β|gg⟩ style vectors, used by tests
/// and scenario presets.
pub fn two_qubit_pure(amplitudes: [Complex64; 4]) -> Result<DensityOperator> {
    DensityOperator::from_pure(&nalgebra::DVector::from_vec(amplitudes.to_vec()))
}

pub fn bell_phi_plus() -> DensityOperator {
    let s = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    two_qubit_pure([s, ZERO, ZERO, s]).expect("normalized")
}

pub fn product_ground() -> DensityOperator {
    two_qubit_pure([ZERO, ZERO, ZERO, ONE]).expect("normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn werner(a: f64) -> DensityOperator {
        // a|ψ+⟩⟨ψ+| + (1-a) I/4 with |ψ+⟩ = (|eg⟩+|ge⟩)/√2
        let s = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
        let psi = nalgebra::DVector::from_vec(vec![ZERO, s, s, ZERO]);
        let m = ComplexMatrix::identity(4, 4).scale((1.0 - a) / 4.0) + (&psi * psi.adjoint()).scale(a);
        DensityOperator::new(m).unwrap()
    }

    fn product(p: f64, q: f64) -> DensityOperator {
        let a = DensityOperator::new(ComplexMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(p, 0.0), Complex64::new(0.1, 0.05), Complex64::new(0.1, -0.05), Complex64::new(1.0 - p, 0.0)],
        ))
        .unwrap();
        let b = DensityOperator::new(ComplexMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(q, 0.0), ZERO, ZERO, Complex64::new(1.0 - q, 0.0)],
        ))
        .unwrap();
        a.tensor(&b)
    }

    #[test]
    fn concurrence_examples() {
        assert_abs_diff_eq!(concurrence(&bell_phi_plus()).unwrap(), 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(concurrence(&product(0.3, 0.8)).unwrap(), 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(concurrence(&werner(0.6)).unwrap(), 0.4, epsilon = 1e-10);
    }

    #[test]
    fn eof_examples() {
        assert_abs_diff_eq!(eof_from_concurrence(1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(eof_from_concurrence(0.0), 0.0, epsilon = 1e-15);
        let p: f64 = 0.5 + 0.84f64.sqrt() / 2.0;
        let want = -(p * p.log2() + (1.0 - p) * (1.0 - p).log2());
        assert_abs_diff_eq!(eof_from_concurrence(0.4), want, epsilon = 1e-15);
        assert_abs_diff_eq!(want, 0.250225, epsilon = 1e-6);
    }

    #[test]
    fn mutual_information_examples() {
        assert_abs_diff_eq!(mutual_information(&product(0.3, 0.8)).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mutual_information(&bell_phi_plus()).unwrap(), 2.0, epsilon = 1e-12);
        let bd = BellDiagonalState::new([1.0, -0.9, 0.9]).unwrap().density();
        let want = 2.0 - binary_entropy(0.95);
        assert_abs_diff_eq!(mutual_information(&bd).unwrap(), want, epsilon = 1e-12);
        assert_abs_diff_eq!(want, 1.7136, epsilon = 1e-4);
    }

    #[test]
    fn classical_correlation_examples() {
        assert_abs_diff_eq!(
            classical_correlations(&product(0.3, 0.8), Side::B).unwrap().value,
            0.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            classical_correlations(&bell_phi_plus(), Side::B).unwrap().value,
            1.0,
            epsilon = 1e-9
        );
        // Bell-diagonal closed form: CC = 1 - H((1 + c_max)/2)
        let bd = BellDiagonalState::new([0.3, -0.5, 0.2]).unwrap();
        let want = 1.0 - binary_entropy((1.0 + 0.5) / 2.0);
        let fast = classical_correlations(&bd.density(), Side::B).unwrap().value;
        let grid = classical_correlations_grid(&bd.matrix(), Side::B).unwrap().value;
        assert_abs_diff_eq!(fast, want, epsilon = 1e-10);
        assert_abs_diff_eq!(grid, want, epsilon = 1e-8);
    }

    #[test]
    fn discord_examples() {
        let diag = DensityOperator::new(ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            vec![0.1, 0.2, 0.3, 0.4].into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        )))
        .unwrap();
        assert_abs_diff_eq!(quantum_discord(&diag, Side::B).unwrap(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(quantum_discord(&bell_phi_plus(), Side::B).unwrap(), 1.0, epsilon = 1e-9);
        let w = werner(0.6);
        let grid = mutual_information(&w).unwrap()
            - classical_correlations_grid(w.matrix(), Side::B).unwrap().value;
        assert_abs_diff_eq!(quantum_discord(&w, Side::B).unwrap(), grid, epsilon = 1e-8);
    }

    #[test]
    fn bures_examples() {
        let zero = BellDiagonalState::new([0.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(bures_b_max(zero.c()).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bures_gqd_bd(&zero).unwrap(), 0.0, epsilon = 1e-15);
        let bell = BellDiagonalState::new([1.0, -1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(bures_b_max(bell.c()).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bures_gqd_bd(&bell).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bures_rejects_invalid_c() {
        assert!(matches!(bures_b_terms([1.0, 1.0, 1.0]), Err(Error::InvalidState(_))));
    }

    #[test]
    fn double_transition_vector_is_outside_tetrahedron() {
        let c = [0.85, -0.6, 0.36];
        assert!(matches!(BellDiagonalState::new(c), Err(Error::InvalidState(_))));
        assert!(matches!(bures_b_terms(c), Err(Error::InvalidState(_))));
    }

    #[test]
    fn bd_concurrence_examples() {
        let bell = BellDiagonalState::new([1.0, -1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(bd_concurrence(&bell), 1.0, epsilon = 1e-15);
        let zero = BellDiagonalState::new([0.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(bd_concurrence(&zero), 0.0, epsilon = 1e-15);
        let s = BellDiagonalState::new([1.0, -0.9, 0.9]).unwrap();
        assert_abs_diff_eq!(bd_concurrence(&s), 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(concurrence(&s.density()).unwrap(), 0.9, epsilon = 1e-7);
    }

    #[test]
    fn geometric_entanglement_examples() {
        assert_abs_diff_eq!(geometric_entanglement(0.0).value, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(geometric_entanglement(1.0).normalized, 1.0, epsilon = 1e-15);
        let g = geometric_entanglement(0.9);
        let want = 2.0 - 2f64.sqrt() * (1.0 + 0.19f64.sqrt()).sqrt();
        assert_abs_diff_eq!(g.value, want, epsilon = 1e-15);
        assert_abs_diff_eq!(g.value, 0.305367, epsilon = 1e-6);
        assert_abs_diff_eq!(g.normalized, want / (2.0 - 2f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(g.normalized, 0.521295, epsilon = 1e-6);
    }

    #[test]
    fn bd_matrix_layout() {
        let s = BellDiagonalState::new([0.2, -0.3, 0.4]).unwrap();
        let id = ComplexMatrix::identity(2, 2);
        let mut want = tensor_product(&id, &id);
        for (ci, p) in s.c().iter().zip([pauli_x(), pauli_y(), pauli_z()]) {
            want += tensor_product(&p, &p).scale(*ci);
        }
        want = want.unscale(4.0);
        assert!(crate::qstate::max_abs(&(want - s.matrix())) < 1e-15);
    }

    #[test]
    fn canonical_c_recovers_bd_vector() {
        let s = BellDiagonalState::new([0.3, -0.5, 0.2]).unwrap();
        let c = canonical_c(&s.matrix()).unwrap();
        let b1 = bures_b_max(c).unwrap();
        let b2 = bures_b_max(s.c()).unwrap();
        assert_abs_diff_eq!(b1, b2, epsilon = 1e-12);
    }
}
