use num_complex::Complex64;

use super::{CMat, Scalar};
use crate::{Error, Result};

/// Complex Schur form `m = q t q^H` with `t` upper triangular.
#[derive(Clone, Debug)]
pub struct Schur {
    pub t: CMat,
    pub q: CMat,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Rotation `[[cs, sn], [-conj(sn), cs]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.abs();
    let nb = b.abs();
    if nb == 0.0 {
        return (1.0, c(0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = libm::hypot(na, nb);
    (na / r, (a / na) * b.conj() / r)
}

fn rotate_rows(t: &mut CMat, k: usize, cs: f64, sn: Complex64, from: usize) {
    for j in from..t.cols() {
        let x = t[(k, j)];
        let y = t[(k + 1, j)];
        t[(k, j)] = x * c(cs) + sn * y;
        t[(k + 1, j)] = -(sn.conj()) * x + y * c(cs);
    }
}

fn rotate_cols(t: &mut CMat, k: usize, cs: f64, sn: Complex64, upto: usize) {
    for i in 0..upto {
        let x = t[(i, k)];
        let y = t[(i, k + 1)];
        t[(i, k)] = x * c(cs) + y * sn.conj();
        t[(i, k + 1)] = -(x * sn) + y * c(cs);
    }
}

fn hessenberg(a: &mut CMat, q: &mut CMat) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k below the diagonal
        let alpha = libm::sqrt((k + 1..n).map(|i| a[(i, k)].abs_sq()).sum::<f64>());
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.abs() == 0.0 { c(1.0) } else { x0 / x0.abs() };
        let mut v: alloc::vec::Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] += phase * c(alpha);
        let vn: f64 = v.iter().map(|x| x.abs_sq()).sum();
        if vn == 0.0 {
            continue;
        }
        // a <- (I - 2vv^H/vn) a (I - 2vv^H/vn)
        for j in 0..n {
            let mut s = c(0.0);
            for (idx, i) in (k + 1..n).enumerate() {
                s += v[idx].conj() * a[(i, j)];
            }
            let s = s * c(2.0 / vn);
            for (idx, i) in (k + 1..n).enumerate() {
                let t = v[idx] * s;
                a[(i, j)] -= t;
            }
        }
        for m in [&mut *a, &mut *q] {
            for i in 0..n {
                let mut s = c(0.0);
                for (idx, j) in (k + 1..n).enumerate() {
                    s += m[(i, j)] * v[idx];
                }
                let s = s * c(2.0 / vn);
                for (idx, j) in (k + 1..n).enumerate() {
                    let t = s * v[idx].conj();
                    m[(i, j)] -= t;
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = c(0.0);
        }
    }
}

fn wilkinson(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> Complex64 {
    // eigenvalue of [[a, b], [cc, d]] closest to d, without forming tr^2/4 - det
    let h = (a - d) * 0.5;
    let disc = (h * h + b * cc).sqrt();
    let den = if (h + disc).norm() >= (h - disc).norm() { h + disc } else { h - disc };
    if den.norm() == 0.0 {
        d
    } else {
        d - b * cc / den
    }
}

fn triangularize_2x2(t: &mut CMat, q: &mut CMat, k: usize) {
    let (a, b, cc, d) = (t[(k, k)], t[(k, k + 1)], t[(k + 1, k)], t[(k + 1, k + 1)]);
    let l = wilkinson(a, b, cc, d);
    let (v1, v2) = ((b, l - a), (l - d, cc));
    let x = if v1.0.norm() + v1.1.norm() >= v2.0.norm() + v2.1.norm() { v1 } else { v2 };
    if x.0.norm() + x.1.norm() == 0.0 {
        // already diagonal up to the subdiagonal entry
        t[(k + 1, k)] = c(0.0);
        return;
    }
    let n = t.rows();
    let (cs, sn) = givens(x.0, x.1);
    rotate_rows(t, k, cs, sn, k);
    rotate_cols(t, k, cs, sn, k + 2);
    rotate_cols(q, k, cs, sn, n);
    t[(k + 1, k)] = c(0.0);
}

/// Complex Schur decomposition by Hessenberg reduction and shifted QR.
pub fn schur(m: &CMat) -> Result<Schur> {
    assert!(m.is_square(), "Schur form of a non-square matrix");
    let n = m.rows();
    let mut t = m.clone();
    let mut q = CMat::identity(n);
    if n <= 1 {
        return Ok(Schur { t, q });
    }
    hessenberg(&mut t, &mut q);
    let scale = t.max_abs().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut rot = alloc::vec::Vec::with_capacity(n);
    while hi > 0 {
        // locate the active unreduced block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let s = t[(lo, lo)].abs() + t[(lo - 1, lo - 1)].abs();
            let s = if s == 0.0 { scale } else { s };
            if t[(lo, lo - 1)].abs() <= eps * s {
                t[(lo, lo - 1)] = c(0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        if hi == lo + 1 {
            // a nearly defective 2x2 block can stall shifted QR; split it directly
            triangularize_2x2(&mut t, &mut q, lo);
            continue;
        }
        iter += 1;
        if iter > 60 * n {
            return Err(Error::NoConvergence("Schur QR iteration".into()));
        }
        let sigma = if iter % 11 == 10 {
            // exceptional shift
            t[(hi, hi)] + c(t[(hi, hi - 1)].abs() * 0.75)
        } else {
            wilkinson(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };
        for i in lo..=hi {
            t[(i, i)] -= sigma;
        }
        rot.clear();
        for k in lo..hi {
            let (cs, sn) = givens(t[(k, k)], t[(k + 1, k)]);
            rotate_rows(&mut t, k, cs, sn, k);
            t[(k + 1, k)] = c(0.0);
            rot.push((k, cs, sn));
        }
        for &(k, cs, sn) in &rot {
            rotate_cols(&mut t, k, cs, sn, (k + 2).min(hi + 1));
            rotate_cols(&mut q, k, cs, sn, n);
        }
        for i in lo..=hi {
            t[(i, i)] += sigma;
        }
    }
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = c(0.0);
        }
    }
    Ok(Schur { t, q })
}

/// Swap diagonal entries `k` and `k + 1` of a Schur form in place.
pub fn swap_schur(s: &mut Schur, k: usize) {
    let n = s.t.rows();
    let t11 = s.t[(k, k)];
    let t22 = s.t[(k + 1, k + 1)];
    let x1 = s.t[(k, k + 1)];
    let x2 = t22 - t11;
    let nx = libm::hypot(x1.abs(), x2.abs());
    if nx == 0.0 {
        return;
    }
    let (g11, g21) = (x1 / nx, x2 / nx);
    let (g12, g22) = (-(g21.conj()), g11.conj());
    // t <- g^H t g on rows/cols k, k+1
    for j in 0..n {
        let a = s.t[(k, j)];
        let b = s.t[(k + 1, j)];
        s.t[(k, j)] = g11.conj() * a + g21.conj() * b;
        s.t[(k + 1, j)] = g12.conj() * a + g22.conj() * b;
    }
    for m in [&mut s.t, &mut s.q] {
        for i in 0..n {
            let a = m[(i, k)];
            let b = m[(i, k + 1)];
            m[(i, k)] = a * g11 + b * g21;
            m[(i, k + 1)] = a * g12 + b * g22;
        }
    }
    s.t[(k + 1, k)] = c(0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    fn check(m: &CMat, s: &Schur) {
        let back = s.q.matmul(&s.t).matmul(&s.q.adjoint());
        assert!((&back - m).max_abs() < 1e-12 * m.max_abs().max(1.0));
        let qq = s.q.adjoint().matmul(&s.q);
        assert!((&qq - &CMat::identity(m.rows())).max_abs() < 1e-13);
    }

    #[test]
    fn random_matrices() {
        let mut seed = 7u64;
        for n in 1..10 {
            let m = CMat::from_fn(n, n, |_, _| Complex64::new(lcg(&mut seed), lcg(&mut seed)));
            let s = schur(&m).unwrap();
            check(&m, &s);
            for i in 0..n {
                for j in 0..i {
                    assert_eq!(s.t[(i, j)], c(0.0));
                }
            }
        }
    }

    #[test]
    fn real_rotation_has_conjugate_pair() {
        let m = CMat::from_fn(2, 2, |i, j| c([[0.0, -1.0], [1.0, 0.0]][i][j]));
        let s = schur(&m).unwrap();
        let mut ev: Vec<f64> = (0..2).map(|i| s.t[(i, i)].im).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn swap_preserves_similarity() {
        let mut seed = 3u64;
        let m = CMat::from_fn(5, 5, |_, _| Complex64::new(lcg(&mut seed), lcg(&mut seed)));
        let mut s = schur(&m).unwrap();
        let (a, b) = (s.t[(1, 1)], s.t[(2, 2)]);
        swap_schur(&mut s, 1);
        check(&m, &s);
        assert!((s.t[(1, 1)] - b).norm() < 1e-12 && (s.t[(2, 2)] - a).norm() < 1e-12);
    }

    #[test]
    fn derogatory_matrices_converge() {
        // a I + b N with N two nilpotent 2-blocks, under random similarities
        let mut seed = 11u64;
        let a = Complex64::new(0.19, 0.21);
        let b = Complex64::new(0.04, -0.02);
        let mut j = CMat::identity(4).scale(a);
        j[(0, 1)] = b;
        j[(2, 3)] = b;
        for _ in 0..300 {
            let p = &CMat::identity(4) + &CMat::from_fn(4, 4, |_, _| Complex64::new(lcg(&mut seed), lcg(&mut seed)));
            let (pinv, _) = crate::linalg::inverse_with_condition(&p, 1e6).unwrap();
            let m = p.matmul(&j).matmul(&pinv);
            let s = schur(&m).unwrap();
            check(&m, &s);
        }
    }

    #[test]
    fn shift_resolves_close_pair() {
        // eigenvalues 0.3 +- 1e-9
        let l = wilkinson(c(0.3), c(1.0), c(1e-18), c(0.3));
        assert!(((l - c(0.3)).norm() - 1e-9).abs() < 1e-15);
    }
}
