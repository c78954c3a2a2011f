//! Cyclic Jacobi eigensolver for hermitian matrices and one-sided Jacobi
//! singular values. Both target the small dimensions used here (<= 16).

use num_complex::Complex64 as C64;

use super::{ComplexMatrix, LinalgError};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Groups indices of numerically equal eigenvalues (absolute gap `tol`).
    pub fn clusters(&self, tol: f64) -> Vec<(f64, Vec<usize>)> {
        let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, &v) in self.values.iter().enumerate() {
            match out.last_mut() {
                Some((_, idx)) if (v - self.values[*idx.last().unwrap()]).abs() <= tol => idx.push(i),
                _ => out.push((v, vec![i])),
            }
        }
        for (mean, idx) in &mut out {
            *mean = idx.iter().map(|&i| self.values[i]).sum::<f64>() / idx.len() as f64;
        }
        out
    }

    /// `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d: Vec<C64> = self.values.iter().map(|&x| C64::new(x, 0.0)).collect();
        &self.vectors * &(&ComplexMatrix::from_diag(&d) * &self.vectors.dagger())
    }
}

/// Hermiticity tolerance accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEigen, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Shape {
            op: "eig_hermitian",
            detail: format!("{:?}", a.shape()),
        });
    }
    let defect = a.distance(&a.dagger());
    if defect > HERMITIAN_TOL * a.norm_fro().max(1.0) {
        return Err(LinalgError::Domain {
            op: "eig_hermitian",
            detail: format!("matrix is not hermitian (|A - A^dagger| = {defect:.3e})"),
        });
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.norm_fro().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

/// One complex Jacobi rotation zeroing `m[p][q]`; accumulates into `v`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // R = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
    let rpp = C64::new(c, 0.0);
    let rpq = C64::new(s, 0.0);
    let rqp = phase.conj() * -s;
    let rqq = phase.conj() * c;
    let n = m.rows();
    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = akp * rpp + akq * rqp;
        m[(k, q)] = akp * rpq + akq * rqq;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = rpp.conj() * apk + rqp.conj() * aqk;
        m[(q, k)] = rpq.conj() * apk + rqq.conj() * aqk;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * rpp + vkq * rqp;
        v[(k, q)] = vkp * rpq + vkq * rqq;
    }
}

/// Singular values in descending order (one-sided Jacobi). Small singular
/// values are resolved to absolute accuracy ~ eps * |A|, unlike sqrt(eig(A^dagger A)).
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    // Work on whichever orientation has fewer columns.
    let mut w = if a.cols() <= a.rows() { a.clone() } else { a.dagger() };
    let (rows, cols) = w.shape();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for k in 0..rows {
                    alpha += w[(k, i)].norm_sqr();
                    beta += w[(k, j)].norm_sqr();
                    gamma += w[(k, i)].conj() * w[(k, j)];
                }
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..rows {
                    let ai = w[(k, i)];
                    let bj = w[(k, j)] * phase.conj();
                    w[(k, i)] = ai * c - bj * s;
                    w[(k, j)] = ai * s + bj * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|k| w[(k, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Pseudo-inverse of a hermitian matrix with relative eigenvalue cutoff.
#[derive(Debug, Clone)]
pub struct HermitianPinv {
    pub inverse: ComplexMatrix,
    pub rank: usize,
}

impl HermitianPinv {
    pub fn is_deficient(&self) -> bool {
        self.rank < self.inverse.rows()
    }
}

pub fn pinv_hermitian(p: &ComplexMatrix, rel_cutoff: f64) -> Result<HermitianPinv, LinalgError> {
    let eig = eig_hermitian(p)?;
    let n = p.rows();
    let max = eig.values.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let cutoff = rel_cutoff * max;
    let mut inv = ComplexMatrix::zeros(n, n);
    let mut rank = 0;
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam.abs() > cutoff && lam != 0.0 {
            rank += 1;
            let col = eig.vectors.column(k);
            inv = &inv + &ComplexMatrix::outer(&col, &col).scale_real(1.0 / lam);
        }
    }
    Ok(HermitianPinv { inverse: inv, rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, pauli};
    use proptest::prelude::*;

    #[test]
    fn pauli_spectra() {
        let e = eig_hermitian(&pauli::sigma_z()).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);

        let e = eig_hermitian(&pauli::sigma_x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // |0> - |1> up to phase for eigenvalue -1
        let v0 = e.vectors.column(0);
        let overlap = (v0[0] * h - v0[1] * h).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_multiplicity() {
        let e = eig_hermitian(&ComplexMatrix::identity(4)).unwrap();
        assert!(e.values.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        assert_eq!(e.clusters(1e-8).len(), 1);
        assert_eq!(e.clusters(1e-8)[0].1.len(), 4);
    }

    #[test]
    fn rejects_non_hermitian() {
        assert!(matches!(
            eig_hermitian(&pauli::sigma_plus()),
            Err(LinalgError::Domain { .. })
        ));
    }

    #[test]
    fn singular_values_rank_one() {
        let s = singular_values(&pauli::sigma_plus());
        assert!((s[0] - 1.0).abs() < 1e-15);
        assert!(s[1] < 1e-15);
        let s = singular_values(&ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[4.0, 0.0], &[0.0, 2.0]]));
        assert!((s[0] - 5.0).abs() < 1e-12 && (s[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pinv_flags_deficiency() {
        let p = ComplexMatrix::from_real_diag(&[2.0, 1e-14]);
        let pinv = pinv_hermitian(&p, 1e-10).unwrap();
        assert_eq!(pinv.rank, 1);
        assert!(pinv.is_deficient());
        assert!((pinv.inverse[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    fn random_hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
            let m = ComplexMatrix::from_vec(n, n, v.into_iter().map(|(r, i)| c64(r, i)).collect()).unwrap();
            m.hermitian_part()
        })
    }

    proptest! {
        #[test]
        fn reconstruction_and_orthonormality(a in (1usize..9).prop_flat_map(random_hermitian)) {
            let e = eig_hermitian(&a).unwrap();
            prop_assert!(e.reconstruct().distance(&a) < 1e-9);
            let gram = e.vectors.dagger() * e.vectors.clone();
            prop_assert!(gram.distance(&ComplexMatrix::identity(a.rows())) < 1e-9);
            for (k, &lam) in e.values.iter().enumerate() {
                let v = e.vectors.column(k);
                let av = a.apply(&v);
                let res: f64 = av.iter().zip(&v).map(|(x, y)| (x - y * lam).norm_sqr()).sum::<f64>().sqrt();
                prop_assert!(res < 1e-9);
            }
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn singular_values_match_spectrum(a in (1usize..7).prop_flat_map(random_hermitian)) {
            let e = eig_hermitian(&a).unwrap();
            let mut abs: Vec<f64> = e.values.iter().map(|x| x.abs()).collect();
            abs.sort_by(|x, y| y.total_cmp(x));
            let sv = singular_values(&a);
            for (x, y) in abs.iter().zip(&sv) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
