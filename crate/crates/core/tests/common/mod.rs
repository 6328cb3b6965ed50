#![allow(dead_code)]

use cqednet_core::qstate::{tensor_product, ComplexMatrix, ComplexVector, DensityOperator};
use num_complex::Complex64;
use proptest::prelude::*;

/// ρ = AA†/tr(AA†) from 2·d² real entries.
pub fn density_from(d: usize, raw: &[f64]) -> DensityOperator {
    let a = ComplexMatrix::from_fn(d, d, |i, j| Complex64::new(raw[2 * (i * d + j)], raw[2 * (i * d + j) + 1]));
    let m = &a * a.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(m.unscale(tr)).unwrap()
}

pub fn pure_from(d: usize, raw: &[f64]) -> DensityOperator {
    let v = ComplexVector::from_fn(d, |i, _| Complex64::new(raw[2 * i], raw[2 * i + 1]));
    DensityOperator::from_pure(&v.unscale(v.norm())).unwrap()
}

pub fn density(d: usize) -> impl Strategy<Value = DensityOperator> {
    prop::collection::vec(-1.0..1.0f64, 2 * d * d)
        .prop_filter("non-degenerate", |v| v.iter().any(|x| x.abs() > 0.1))
        .prop_map(move |v| density_from(d, &v))
}

pub fn pure(d: usize) -> impl Strategy<Value = DensityOperator> {
    prop::collection::vec(-1.0..1.0f64, 2 * d)
        .prop_filter("non-zero", |v| v.iter().any(|x| x.abs() > 0.1))
        .prop_map(move |v| pure_from(d, &v))
}

/// Two-qubit X state in the |ee⟩,|eg⟩,|ge⟩,|gg⟩ basis.
pub fn x_state() -> impl Strategy<Value = ComplexMatrix> {
    (prop::array::uniform4(0.01..1.0f64), 0.0..1.0f64, 0.0..1.0f64, 0.0..6.3f64, 0.0..6.3f64).prop_map(
        |(p, r1, r2, a1, a2)| {
            let s: f64 = p.iter().sum();
            let p = p.map(|x| x / s);
            let mut m = ComplexMatrix::zeros(4, 4);
            for i in 0..4 {
                m[(i, i)] = Complex64::new(p[i], 0.0);
            }
            let z1 = Complex64::from_polar(r1 * (p[0] * p[3]).sqrt(), a1);
            let z2 = Complex64::from_polar(r2 * (p[1] * p[2]).sqrt(), a2);
            m[(0, 3)] = z1;
            m[(3, 0)] = z1.conj();
            m[(1, 2)] = z2;
            m[(2, 1)] = z2.conj();
            m
        },
    )
}

/// Rz(a)·Ry(b)·Rz(c).
pub fn qubit_unitary(a: f64, b: f64, c: f64) -> ComplexMatrix {
    let rz = |t: f64| {
        ComplexMatrix::from_row_slice(
            2,
            2,
            &[Complex64::from_polar(1.0, -t / 2.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, t / 2.0)],
        )
    };
    let (s, co) = (b / 2.0).sin_cos();
    let ry = ComplexMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(co, 0.0), Complex64::new(-s, 0.0), Complex64::new(s, 0.0), Complex64::new(co, 0.0)],
    );
    rz(a) * ry * rz(c)
}

pub fn local_unitary() -> impl Strategy<Value = ComplexMatrix> {
    prop::array::uniform6(0.0..6.3f64).prop_map(|v| {
        tensor_product(&qubit_unitary(v[0], v[1], v[2]), &qubit_unitary(v[3], v[4], v[5]))
    })
}

pub fn conjugate(u: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    u * m * u.adjoint()
}
