//! Residual (tangle-like) entanglement of one qubit against the rest.

use crate::correlations::concurrence_matrix;
use crate::error::{Error, Result};
use crate::qstate::{partial_trace_matrix, DensityOperator, SubsystemLayout};

/// Purity below which the mixed-state bounds are reported as unreliable.
pub const DEFAULT_PURITY_THRESHOLD: f64 = 0.89;

/// Allowed 1 − tr ρ² for inputs treated as pure.
pub const PURE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TangleReport {
    pub reference_site: usize,
    /// (partner site, C²) for every other qubit.
    pub pairwise_c2: Vec<(usize, f64)>,
    /// 2(1 − tr ρ₁²).
    pub one_to_rest_c2: f64,
    pub tau_lower: f64,
    pub tau_upper: f64,
    pub total_purity: f64,
    pub marginal_purity: f64,
    pub valid: bool,
}

impl TangleReport {
    pub fn pairwise_sum(&self) -> f64 {
        self.pairwise_c2.iter().map(|p| p.1).sum()
    }
}

fn check_layout(rho: &DensityOperator, site: usize, layout: &SubsystemLayout) -> Result<()> {
    if layout.dims().iter().any(|&d| d != 2) {
        return Err(Error::Dimension("tangle needs an all-qubit layout".into()));
    }
    if layout.total_dim() != rho.dim() {
        return Err(Error::Dimension(format!(
            "layout of dimension {} for a {}-dimensional state",
            layout.total_dim(),
            rho.dim()
        )));
    }
    if site >= layout.len() {
        return Err(Error::Dimension(format!("site {site} outside {} qubits", layout.len())));
    }
    Ok(())
}

fn marginal_purity(rho: &DensityOperator, site: usize, layout: &SubsystemLayout) -> Result<f64> {
    let r = partial_trace_matrix(rho.matrix(), layout, &[site])?;
    Ok(r.iter().map(|z| z.norm_sqr()).sum())
}

fn require_pure(rho: &DensityOperator) -> Result<()> {
    let p = rho.purity();
    if 1.0 - p > PURE_TOLERANCE {
        return Err(Error::NotPure(1.0 - p));
    }
    Ok(())
}

/// C²_{site|rest} = 2(1 − tr ρ_site²) of a pure state.
pub fn one_to_rest_c2_pure(rho: &DensityOperator, site: usize, layout: &SubsystemLayout) -> Result<f64> {
    check_layout(rho, site, layout)?;
    require_pure(rho)?;
    Ok(2.0 * (1.0 - marginal_purity(rho, site, layout)?))
}

fn pairwise(rho: &DensityOperator, site: usize, layout: &SubsystemLayout) -> Result<Vec<(usize, f64)>> {
    (0..layout.len())
        .filter(|&j| j != site)
        .map(|j| {
            let r = partial_trace_matrix(rho.matrix(), layout, &[site, j])?;
            // correlations order the qubit basis |e⟩ first; reversal is local
            // and leaves the concurrence unchanged
            Ok((j, concurrence_matrix(&r)?.powi(2)))
        })
        .collect()
}

/// τ = C²_{site|rest} − Σ_j C²_{site,j} for a pure state.
pub fn tangle_pure(rho: &DensityOperator, site: usize, layout: &SubsystemLayout) -> Result<f64> {
    let whole = one_to_rest_c2_pure(rho, site, layout)?;
    let pairs: f64 = pairwise(rho, site, layout)?.iter().map(|p| p.1).sum();
    Ok(whole - pairs)
}

/// Purity-based bounds on the tangle of a mixed state.
///
/// The upper bound treats the state as pure, 2(1 − tr ρ₁²); the lower bound
/// uses 2(tr ρ² − tr ρ₁²). Both subtract the same pairwise sum. The report
/// is flagged invalid when the total purity drops below `purity_threshold`
/// or the lower bound turns negative.
pub fn tangle_bounds(
    rho: &DensityOperator,
    site: usize,
    layout: &SubsystemLayout,
    purity_threshold: f64,
) -> Result<TangleReport> {
    check_layout(rho, site, layout)?;
    let total = rho.purity();
    let marginal = marginal_purity(rho, site, layout)?;
    let pairwise_c2 = pairwise(rho, site, layout)?;
    let sum: f64 = pairwise_c2.iter().map(|p| p.1).sum();
    let upper_whole = 2.0 * (1.0 - marginal);
    let lower_whole = 2.0 * (total - marginal);
    let tau_lower = lower_whole - sum;
    let tau_upper = upper_whole - sum;
    Ok(TangleReport {
        reference_site: site,
        pairwise_c2,
        one_to_rest_c2: upper_whole,
        tau_lower,
        tau_upper,
        total_purity: total,
        marginal_purity: marginal,
        valid: total >= purity_threshold && tau_lower >= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::ComplexMatrix;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;
    use num_complex::Complex64;

    fn ket(amps: &[(usize, f64)], dim: usize) -> DensityOperator {
        let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
        for &(i, a) in amps {
            v[i] = Complex64::new(a, 0.0);
        }
        DensityOperator::from_pure(&v).unwrap()
    }

    fn ghz() -> DensityOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ket(&[(0, h), (7, h)], 8)
    }

    fn w() -> DensityOperator {
        let s = 1.0 / 3f64.sqrt();
        ket(&[(1, s), (2, s), (4, s)], 8)
    }

    #[test]
    fn one_to_rest_examples() {
        let l = SubsystemLayout::qubits(3);
        assert_abs_diff_eq!(one_to_rest_c2_pure(&ket(&[(3, 1.0)], 8), 0, &l).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(one_to_rest_c2_pure(&ghz(), 0, &l).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(one_to_rest_c2_pure(&w(), 0, &l).unwrap(), 8.0 / 9.0, epsilon = 1e-14);
        let mixed = DensityOperator::maximally_mixed(8);
        assert!(matches!(one_to_rest_c2_pure(&mixed, 0, &l), Err(Error::NotPure(_))));
    }

    #[test]
    fn tangle_examples() {
        let l = SubsystemLayout::qubits(3);
        assert_abs_diff_eq!(tangle_pure(&ghz(), 0, &l).unwrap(), 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(tangle_pure(&w(), 0, &l).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn pure_bounds_collapse() {
        let l = SubsystemLayout::qubits(3);
        let r = tangle_bounds(&w(), 1, &l, DEFAULT_PURITY_THRESHOLD).unwrap();
        assert_abs_diff_eq!(r.tau_upper, r.tau_lower, epsilon = 1e-10);
        assert!(r.pairwise_c2.iter().all(|p| (p.1 - 4.0 / 9.0).abs() < 1e-9));
    }

    #[test]
    fn mixed_state_is_flagged() {
        let l = SubsystemLayout::qubits(3);
        let m = ComplexMatrix::identity(8, 8).unscale(8.0);
        let r = tangle_bounds(&DensityOperator::new(m).unwrap(), 0, &l, DEFAULT_PURITY_THRESHOLD).unwrap();
        assert!(!r.valid);
    }
}
