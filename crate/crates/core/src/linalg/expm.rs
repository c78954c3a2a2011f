//! Matrix exponential by scaling and squaring around a truncated Taylor kernel.

use num_complex::Complex64 as C64;

use super::{ComplexMatrix, LinalgError};

/// Degree of the Taylor kernel. With the scaled 1-norm at most
/// [`SCALED_NORM`], the truncation remainder is below 0.5^19 / 19! ~ 2e-23.
const TAYLOR_DEGREE: usize = 18;
const SCALED_NORM: f64 = 0.5;

/// `e^a` for a square matrix.
pub fn matexp(a: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Shape {
            op: "matexp",
            detail: format!("{:?} is not square", a.shape()),
        });
    }
    let n = a.rows();
    let norm = a.norm_one();
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));

    // Horner: 1 + X(1 + X/2(1 + X/3(...)))
    let id = ComplexMatrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=TAYLOR_DEGREE).rev() {
        acc = &id + &scaled.mul_unchecked(&acc).scale(C64::new(1.0 / k as f64, 0.0));
    }
    for _ in 0..squarings {
        acc = acc.mul_unchecked(&acc);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, pauli};
    use proptest::prelude::*;
    use std::f64::consts::{E, FRAC_PI_2};

    #[test]
    fn zero_gives_identity() {
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(matexp(&z).unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn pauli_exponential() {
        let a = pauli::sigma_x().scale(c64(0.0, FRAC_PI_2));
        let expected = pauli::sigma_x().scale(c64(0.0, 1.0));
        assert!(matexp(&a).unwrap().distance(&expected) < 1e-14);
    }

    #[test]
    fn diagonal_case() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let e = matexp(&a).unwrap();
        assert!((e[(0, 0)].re - E).abs() < 1e-14 * E);
        assert!((e[(1, 1)].re - E * E).abs() < 1e-14 * E * E);
        assert_eq!(e[(0, 1)], c64(0.0, 0.0));
    }

    #[test]
    fn large_norm_relative_accuracy() {
        // exp(10 sigma_z) = diag(e^10, e^-10)
        let a = pauli::sigma_z().scale_real(10.0);
        let e = matexp(&a).unwrap();
        assert!((e[(0, 0)].re / 10f64.exp() - 1.0).abs() < 1e-12);
        // exp(i 10 sigma_y) = cos(10) + i sin(10) sigma_y
        let a = pauli::sigma_y().scale(c64(0.0, 10.0));
        let expected = &pauli::id2().scale_real(10f64.cos()) + &pauli::sigma_y().scale(c64(0.0, 10f64.sin()));
        assert!(matexp(&a).unwrap().distance(&expected) < 1e-12);
    }

    #[test]
    fn non_square_rejected() {
        assert!(matexp(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    fn random_matrix(n: usize, scale: f64) -> impl Strategy<Value = ComplexMatrix> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
            let m = ComplexMatrix::from_vec(n, n, v.into_iter().map(|(r, i)| c64(r, i)).collect()).unwrap();
            let f = m.norm_fro();
            if f > 0.0 {
                m.scale_real(scale / f)
            } else {
                m
            }
        })
    }

    proptest! {
        #[test]
        fn inverse_pair(a in (1usize..5).prop_flat_map(|n| random_matrix(n, 5.0))) {
            let n = a.rows();
            let prod = matexp(&a).unwrap() * matexp(&-&a).unwrap();
            prop_assert!(prod.distance(&ComplexMatrix::identity(n)) < 1e-10);
        }

        #[test]
        fn anti_hermitian_gives_unitary(a in (1usize..5).prop_flat_map(|n| random_matrix(n, 5.0))) {
            let skew = (&a - &a.dagger()).scale_real(0.5);
            prop_assert!(matexp(&skew).unwrap().is_unitary(1e-10));
        }
    }
}
