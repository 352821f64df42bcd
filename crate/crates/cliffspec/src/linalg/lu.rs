use alloc::vec::Vec;

use super::{Mat, Scalar};
use crate::{Error, Result};

/// LU factorisation with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Mat<T>,
    perm: Vec<usize>,
    singular: bool,
}

impl<T: Scalar> Lu<T> {
    pub fn new(a: &Mat<T>) -> Self {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let t = lu[(k, j)];
                    lu[(i, j)] -= f * t;
                }
            }
        }
        Lu { lu, perm, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        if self.singular {
            return None;
        }
        let n = self.lu.rows();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[(i, j)] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.lu[(i, j)] * x[j];
                x[i] -= t;
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat<T>> {
        if self.singular {
            return None;
        }
        let n = self.lu.rows();
        let mut inv = Mat::zeros(n, n);
        let mut e = alloc::vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = T::zero());
            e[j] = T::one();
            let col = self.solve(&e)?;
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        Some(inv)
    }
}

/// Inverse together with the 1-norm condition number. Fails when the
/// condition number exceeds `max_condition`.
pub fn inverse_with_condition<T: Scalar>(a: &Mat<T>, max_condition: f64) -> Result<(Mat<T>, f64)> {
    let lu = Lu::new(a);
    let inv = lu.inverse().ok_or(Error::NotInvertible { condition: f64::INFINITY })?;
    let cond = a.norm1() * inv.norm1();
    if !cond.is_finite() || cond > max_condition {
        return Err(Error::NotInvertible { condition: cond });
    }
    Ok((inv, cond))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMat, RMat};
    use alloc::vec;
    use num_complex::Complex64;

    #[test]
    fn solves_and_inverts() {
        let a = RMat::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]);
        let (inv, cond) = inverse_with_condition(&a, 1e12).unwrap();
        let id = a.matmul(&inv);
        assert!((&id - &RMat::identity(3)).max_abs() < 1e-14);
        assert!(cond >= 1.0);
    }

    #[test]
    fn singular_is_rejected() {
        let a = RMat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(inverse_with_condition(&a, 1e12).is_err());
    }

    #[test]
    fn complex_solve() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let a = CMat::from_rows(&[vec![one, i], vec![-i, one + one]]);
        let x = Lu::new(&a).solve(&[one, i]).unwrap();
        let r = a.matvec(&x);
        assert!((r[0] - one).norm() < 1e-14 && (r[1] - i).norm() < 1e-14);
    }
}
