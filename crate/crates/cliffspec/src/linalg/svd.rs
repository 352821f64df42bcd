use alloc::vec::Vec;

use super::{Mat, Scalar};

/// Singular values in decreasing order (one-sided Jacobi).
pub fn singular_values<T: Scalar>(a: &Mat<T>) -> Vec<f64> {
    // work on the orientation with fewer columns
    let b = if a.cols() > a.rows() { a.adjoint() } else { a.clone() };
    let (m, n) = (b.rows(), b.cols());
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| b.column(j)).collect();
    let eps = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|x| x.abs_sq()).sum();
                let beta: f64 = cols[q].iter().map(|x| x.abs_sq()).sum();
                let mut gamma = T::zero();
                for i in 0..m {
                    gamma += cols[p][i].conj() * cols[q][i];
                }
                let g = gamma.abs();
                if g < f64::MIN_POSITIVE || g <= eps * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                // rotate the phase of column q so the inner product is real
                // real reciprocal: complex division would square g and underflow
                let phase = gamma.conj() * T::from_real(1.0 / g);
                for x in cols[q].iter_mut() {
                    *x *= phase;
                }
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..m {
                    let xp = cols[p][i];
                    let xq = cols[q][i];
                    cols[p][i] = xp * T::from_real(c) - xq * T::from_real(s);
                    cols[q][i] = xp * T::from_real(s) + xq * T::from_real(c);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| super::vec_norm(c)).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(core::cmp::Ordering::Equal));
    sv
}


/// Eigen-decomposition `a = v diag(l) v^T` of a real symmetric matrix (cyclic Jacobi).
pub fn symmetric_eigen(a: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Mat::<f64>::identity(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let fr = m.frobenius();
        if off <= 1e-30 * (fr * fr).max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(1.0 + theta * theta));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[(i, i)]).collect(), v)
}

#[cfg(test)]
mod eigen_tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn reconstructs_symmetric_matrix() {
        let a = Mat::from_rows(&[vec![2.0, 1.0, 0.5], vec![1.0, -1.0, 0.0], vec![0.5, 0.0, 3.0]]);
        let (l, v) = symmetric_eigen(&a);
        let back = v.matmul(&Mat::diag(&l)).matmul(&v.transpose());
        assert!((&back - &a).max_abs() < 1e-13);
        let tr: f64 = l.iter().sum();
        assert!((tr - 4.0).abs() < 1e-13);
    }
}
