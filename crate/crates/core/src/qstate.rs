//! Dense quantum-state algebra over complex matrices.
//!
//! Tensor products use the left-major (Kronecker) convention, so subsystem 0
//! is the most significant digit of a composite index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Largest absolute entry; cheap scale for relative tolerances.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column k is the eigenvector of `values[k]`, largest-magnitude component real positive.
    pub vectors: ComplexMatrix,
}

/// Fix the global phase so the largest-magnitude component is real and positive.
/// Ties are broken by the lowest index, which keeps the choice deterministic.
pub fn fix_phase(v: &mut ComplexVector) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        let n = z.norm();
        if n > best_norm + 1e-12 {
            best = i;
            best_norm = n;
        }
    }
    if best_norm <= 0.0 {
        return;
    }
    let phase = v[best].conj() / best_norm;
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[best] = Complex64::new(v[best].re, 0.0);
}

pub fn eigen_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigen_hermitian needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let scale = max_abs(m).max(1.0);
    let defect = hermiticity_defect(m);
    if defect > DEFAULT_TOLERANCE * scale {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let mut v: ComplexVector = eig.eigenvectors.column(k).into_owned();
        fix_phase(&mut v);
        vectors.set_column(col, &v);
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut v: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Shannon entropy in bits with 0·log0 = 0 and small negatives clamped.
pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter()
        .map(|&x| if x > 0.0 { -x * x.log2() } else { 0.0 })
        .sum()
}

pub fn binary_entropy(p: f64) -> f64 {
    shannon_bits(&[p, 1.0 - p])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Dimension(format!("invalid subsystem dims {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn qubits(n: usize) -> Self {
        Self { dims: vec![2; n] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }
}

/// A validated density operator. The tolerance governs Hermiticity, trace
/// and positivity checks at construction.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    tolerance: f64,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tolerance: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "density operator must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > tolerance {
            return Err(Error::InvalidState(format!(
                "not Hermitian: defect {defect:e} > {tolerance:e}"
            )));
        }
        let tr = trace(&matrix);
        if (tr - ONE).norm() > tolerance {
            return Err(Error::InvalidState(format!(
                "trace {tr} differs from 1 by more than {tolerance:e}"
            )));
        }
        let min = eigenvalues_hermitian(&matrix)?[0];
        if min < -tolerance {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:e} below -{tolerance:e}"
            )));
        }
        Ok(Self {
            matrix: hermitize(&matrix),
            tolerance,
        })
    }

    /// Skips validation. Used for integrator samples, whose contract is
    /// audited separately rather than enforced per state.
    pub fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self {
            matrix,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn from_pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let v = psi.unscale(norm);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_matrix_unchecked(ComplexMatrix::identity(dim, dim).unscale(dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues_hermitian(&self.matrix).unwrap_or_default()
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ|ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn von_neumann_entropy(&self) -> f64 {
        shannon_bits(&self.eigenvalues())
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        Self {
            matrix: tensor_product(&self.matrix, &other.matrix),
            tolerance: self.tolerance.max(other.tolerance),
        }
    }
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.von_neumann_entropy()
}

pub fn purity(rho: &DensityOperator) -> f64 {
    rho.purity()
}

/// Reduced matrix over `keep` (ascending subsystem order in the result).
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    layout: &SubsystemLayout,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let dims = layout.dims();
    if m.nrows() != layout.total_dim() || !m.is_square() {
        return Err(Error::Dimension(format!(
            "layout {:?} (total {}) does not match a {}x{} operator",
            dims,
            layout.total_dim(),
            m.nrows(),
            m.ncols()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Dimension(format!(
            "keep set {keep:?} invalid for {} subsystems",
            dims.len()
        )));
    }
    let keep_dim: usize = kept.iter().map(|&k| dims[k]).product();
    let traced_dim = layout.total_dim() / keep_dim;

    // split each composite index into (kept index, traced index)
    let n = layout.total_dim();
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(keep_dim); traced_dim];
    for full in 0..n {
        let mut rem = full;
        let mut digits = vec![0usize; dims.len()];
        for s in (0..dims.len()).rev() {
            digits[s] = rem % dims[s];
            rem /= dims[s];
        }
        let (mut k_idx, mut t_idx) = (0usize, 0usize);
        for (s, &d) in digits.iter().enumerate() {
            if kept.binary_search(&s).is_ok() {
                k_idx = k_idx * dims[s] + d;
            } else {
                t_idx = t_idx * dims[s] + d;
            }
        }
        groups[t_idx].push((full, k_idx));
    }

    let mut out = ComplexMatrix::zeros(keep_dim, keep_dim);
    for group in &groups {
        for &(i, ki) in group {
            for &(j, kj) in group {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

pub fn partial_trace(
    rho: &DensityOperator,
    layout: &SubsystemLayout,
    keep: &[usize],
) -> Result<DensityOperator> {
    let m = partial_trace_matrix(rho.matrix(), layout, keep)?;
    Ok(DensityOperator {
        matrix: hermitize(&m),
        tolerance: rho.tolerance,
    })
}
