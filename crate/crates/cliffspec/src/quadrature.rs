//! Normalised quadrature on the unit sphere `S^{n-1}` for `n = 2, 3`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

/// Nodes and weights with `sum(weights) == 1`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    dim: usize,
    degree: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Trapezoid rule on the circle; exact for trigonometric degree `< n`.
    pub fn circle(n: usize) -> Self {
        assert!(n > 0, "empty rule");
        let nodes = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                alloc::vec![libm::cos(t), libm::sin(t)]
            })
            .collect();
        QuadratureRule { dim: 2, degree: n - 1, nodes, weights: alloc::vec![1.0 / n as f64; n] }
    }

    /// Gauss-Legendre in `cos(theta)` times trapezoid in azimuth,
    /// exact for spherical polynomials of degree `<= degree`.
    pub fn sphere(degree: usize) -> Self {
        let p = degree / 2 + 1;
        let q = degree + 1;
        let (t, w) = gauss_legendre(p);
        let mut nodes = Vec::with_capacity(p * q);
        let mut weights = Vec::with_capacity(p * q);
        for (ti, wi) in t.iter().zip(&w) {
            let s = libm::sqrt((1.0 - ti * ti).max(0.0));
            for k in 0..q {
                let phi = 2.0 * PI * k as f64 / q as f64;
                nodes.push(alloc::vec![s * libm::cos(phi), s * libm::sin(phi), *ti]);
                weights.push(wi / (2.0 * q as f64));
            }
        }
        QuadratureRule { dim: 3, degree, nodes, weights }
    }

    pub fn for_dim(dim: usize, size: usize) -> Result<Self> {
        match dim {
            2 => Ok(Self::circle(size)),
            3 => Ok(Self::sphere(size)),
            _ => Err(Error::UnsupportedDimension(dim)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.nodes.iter().map(|x| x.as_slice()).zip(self.weights.iter().copied())
    }

    /// Largest `|u|` for which a kernel analytic in `|u|` is resolved to `tol`.
    pub fn resolution_radius(&self, tol: f64) -> f64 {
        libm::pow(tol, 1.0 / self.degree.max(1) as f64)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x.push(z);
        w.push(2.0 / ((1.0 - z * z) * dp * dp));
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(q: &QuadratureRule, f: impl Fn(&[f64]) -> f64) -> f64 {
        q.iter().map(|(x, w)| w * f(x)).sum()
    }

    #[test]
    fn weights_sum_to_one() {
        for q in [QuadratureRule::circle(17), QuadratureRule::sphere(29)] {
            assert!((q.weights().iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(5);
        // x^8 integrates to 2/9
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * libm::pow(*x, 8.0)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_moments() {
        let q = QuadratureRule::sphere(29);
        // mean of x^2 over S^2 is 1/3, of x^4 is 1/5, of x^2 y^2 z^2 is 1/105
        assert!((integrate(&q, |x| x[0] * x[0]) - 1.0 / 3.0).abs() < 1e-14);
        assert!((integrate(&q, |x| libm::pow(x[1], 4.0)) - 0.2).abs() < 1e-14);
        let v = integrate(&q, |x| x[0] * x[0] * x[1] * x[1] * x[2] * x[2]);
        assert!((v - 1.0 / 105.0).abs() < 1e-15);
        let v = integrate(&q, |x| libm::pow(x[0], 28.0));
        assert!((v - 1.0 / 29.0).abs() < 1e-14);
    }

    #[test]
    fn circle_moments() {
        let q = QuadratureRule::circle(16);
        assert!((integrate(&q, |x| x[0] * x[0]) - 0.5).abs() < 1e-15);
        assert!(integrate(&q, |x| x[0] * x[1]).abs() < 1e-15);
    }
}
