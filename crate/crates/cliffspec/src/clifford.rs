//! Dense Clifford algebra `Cl_n` with `e_i^2 = -1`.
//!
//! A multivector stores `2^n` coefficients indexed by blade bitmask:
//! bit `i` set means `e_{i+1}` occurs in the blade.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::linalg::{inverse_with_condition, RMat};
use crate::{Error, Result, DEFAULT_TOL};

pub const MAX_DIM: usize = 8;

/// Sign of `e_p e_q` for blade masks `p`, `q`.
pub fn blade_sign(p: usize, q: usize) -> f64 {
    let mut swaps = (p & q).count_ones();
    let mut a = p >> 1;
    while a != 0 {
        swaps += (a & q).count_ones();
        a >>= 1;
    }
    if swaps & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn grade_of(mask: usize) -> u32 {
    mask.count_ones()
}

fn reversion_sign(r: u32) -> f64 {
    if (r * r.saturating_sub(1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn conjugation_sign(r: u32) -> f64 {
    if (r * (r + 1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn involution_sign(r: u32) -> f64 {
    if r.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Precomputed product signs for a fixed dimension.
#[derive(Clone, Debug)]
pub struct BladeSignTable {
    dim: usize,
    signs: Vec<i8>,
}

impl BladeSignTable {
    pub fn new(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let len = 1usize << dim;
        let mut signs = Vec::with_capacity(len * len);
        for p in 0..len {
            for q in 0..len {
                signs.push(blade_sign(p, q) as i8);
            }
        }
        Ok(BladeSignTable { dim, signs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn sign(&self, p: usize, q: usize) -> f64 {
        self.signs[(p << self.dim) | q] as f64
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > MAX_DIM {
        Err(Error::UnsupportedDimension(dim))
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    dim: usize,
    coeffs: Vec<f64>,
}

impl Multivector {
    pub fn new(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if coeffs.len() != 1 << dim {
            return Err(Error::DimensionMismatch { expected: 1 << dim, found: coeffs.len() });
        }
        Ok(Multivector { dim, coeffs })
    }

    /// Panics if `dim > MAX_DIM`.
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Multivector { dim, coeffs: vec![0.0; 1 << dim] }
    }

    pub fn scalar(dim: usize, s: f64) -> Self {
        let mut m = Self::zero(dim);
        m.coeffs[0] = s;
        m
    }

    pub fn one(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn blade(dim: usize, mask: usize, coeff: f64) -> Self {
        let mut m = Self::zero(dim);
        m.coeffs[mask] = coeff;
        m
    }

    /// `e_{i+1}` (zero-based index).
    pub fn basis_vector(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index out of range");
        Self::blade(dim, 1 << i, 1.0)
    }

    pub fn from_vector(x: &[f64]) -> Self {
        let mut m = Self::zero(x.len());
        for (i, &v) in x.iter().enumerate() {
            m.coeffs[1 << i] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn get(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    pub fn set(&mut self, mask: usize, v: f64) {
        self.coeffs[mask] = v;
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn vector_part(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.coeffs[1 << i]).collect()
    }

    pub fn grade_part(&self, r: u32) -> Self {
        self.map_blades(|m, c| if grade_of(m) == r { c } else { 0.0 })
    }

    pub fn even_part(&self) -> Self {
        self.map_blades(|m, c| if grade_of(m).is_multiple_of(2) { c } else { 0.0 })
    }

    pub fn odd_part(&self) -> Self {
        self.map_blades(|m, c| if grade_of(m) % 2 == 1 { c } else { 0.0 })
    }

    fn map_blades(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        Multivector { dim: self.dim, coeffs: self.coeffs.iter().enumerate().map(|(m, &c)| f(m, c)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_blades(|_, c| c * s)
    }

    /// Euclidean norm of the coefficient vector; equals `sqrt(scalar(a * conj(a)))`.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn dist(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.coeffs.iter().zip(&other.coeffs).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn geometric_product(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut out = vec![0.0; self.coeffs.len()];
        for (p, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (q, &b) in other.coeffs.iter().enumerate() {
                if b != 0.0 {
                    out[p ^ q] += blade_sign(p, q) * a * b;
                }
            }
        }
        Ok(Multivector { dim: self.dim, coeffs: out })
    }

    /// Reversion `a*`.
    pub fn reversion(&self) -> Self {
        self.map_blades(|m, c| reversion_sign(grade_of(m)) * c)
    }

    /// Clifford conjugation `conj(a)`.
    pub fn conjugation(&self) -> Self {
        self.map_blades(|m, c| conjugation_sign(grade_of(m)) * c)
    }

    /// Grade involution `a'`.
    pub fn grade_involution(&self) -> Self {
        self.map_blades(|m, c| involution_sign(grade_of(m)) * c)
    }

    fn scale_tol(&self, tol: f64) -> f64 {
        tol * self.norm().max(1.0)
    }

    pub fn is_scalar(&self, tol: f64) -> bool {
        let t = self.scale_tol(tol);
        self.coeffs.iter().skip(1).all(|c| c.abs() <= t)
    }

    pub fn is_vector(&self, tol: f64) -> bool {
        let t = self.scale_tol(tol);
        self.coeffs.iter().enumerate().all(|(m, c)| grade_of(m) == 1 || c.abs() <= t)
    }

    pub fn is_even(&self, tol: f64) -> bool {
        let t = self.scale_tol(tol);
        self.coeffs.iter().enumerate().all(|(m, c)| grade_of(m).is_multiple_of(2) || c.abs() <= t)
    }

    pub fn is_odd(&self, tol: f64) -> bool {
        let t = self.scale_tol(tol);
        self.coeffs.iter().enumerate().all(|(m, c)| grade_of(m) % 2 == 1 || c.abs() <= t)
    }

    /// `x^{-1} = conj(x) / |x|^2` for a nonzero vector.
    pub fn kelvin_inverse(&self, tol: f64) -> Result<Self> {
        if !self.is_vector(tol) {
            return Err(Error::NotAVector);
        }
        let n2 = self.norm_sq();
        if n2 <= tol * tol {
            return Err(Error::NotInvertible { condition: f64::INFINITY });
        }
        Ok(self.conjugation().scale(1.0 / n2))
    }

    /// Matrix of `y -> self * y` on the blade basis.
    pub fn left_regular(&self) -> RMat {
        let len = self.coeffs.len();
        let mut m = RMat::zeros(len, len);
        for (p, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for q in 0..len {
                m[(p ^ q, q)] = blade_sign(p, q) * a;
            }
        }
        m
    }

    /// Two-sided inverse, via the left-regular representation.
    pub fn mv_inverse(&self, tol: f64) -> Result<Self> {
        let l = self.left_regular();
        let (inv, _) = inverse_with_condition(&l, 1.0 / tol)?;
        let y = Multivector { dim: self.dim, coeffs: inv.column(0) };
        let one = Self::one(self.dim);
        let resid = (&(self * &y) - &one).max_abs().max((&(&y * self) - &one).max_abs());
        let bound = 1e3 * tol.max(f64::EPSILON) * self.norm().max(1.0) * y.norm().max(1.0);
        if resid > bound {
            return Err(Error::NotInvertible { condition: f64::INFINITY });
        }
        Ok(y)
    }

    /// `|a| = sqrt(a * conj(a))` for products of vectors.
    pub fn modulus(&self, tol: f64) -> Result<f64> {
        let p = self * &self.conjugation();
        if !p.is_scalar(tol) {
            return Err(Error::NotInT);
        }
        Ok(libm::sqrt(p.scalar_part().max(0.0)))
    }

    /// Inverse of an element of `T(n)` as `conj(a) / |a|^2`.
    pub fn t_inverse(&self, tol: f64) -> Result<Self> {
        let m = self.modulus(tol)?;
        if m <= tol {
            return Err(Error::NotInvertible { condition: f64::INFINITY });
        }
        Ok(self.conjugation().scale(1.0 / (m * m)))
    }

    /// Membership in the Clifford group: invertible and the twisted adjoint
    /// action maps vectors to vectors.
    pub fn in_gamma(&self, tol: f64) -> bool {
        let Ok(inv) = self.mv_inverse(tol) else {
            return false;
        };
        let gi = self.grade_involution();
        (0..self.dim).all(|j| {
            let e = Self::basis_vector(self.dim, j);
            (&(&gi * &e) * &inv).is_vector(tol * 10.0)
        })
    }

    pub fn in_pin(&self, tol: f64) -> bool {
        if !self.in_gamma(tol) {
            return false;
        }
        let p = self * &self.conjugation();
        p.is_scalar(tol) && (p.scalar_part().abs() - 1.0).abs() <= tol * 10.0
    }

    /// Parse text such as `3 + 2*e1 - e13`.
    pub fn parse(dim: usize, s: &str) -> Result<Self> {
        check_dim(dim)?;
        let mut out = Self::zero(dim);
        let bytes = s.as_bytes();
        let mut terms: Vec<(f64, &str)> = Vec::new();
        let mut start = 0usize;
        let mut sign = 1.0;
        let mut i = 0usize;
        let mut pending = false;
        while i < bytes.len() {
            let b = bytes[i];
            let is_exp_sign = i >= 2
                && matches!(bytes[i - 1], b'e' | b'E')
                && (bytes[i - 2].is_ascii_digit() || bytes[i - 2] == b'.');
            if (b == b'+' || b == b'-') && !is_exp_sign {
                let t = s[start..i].trim();
                if !t.is_empty() {
                    terms.push((sign, t));
                } else if pending {
                    return Err(Error::Parse(String::from("dangling sign")));
                }
                sign = if b == b'-' { -1.0 } else { 1.0 };
                pending = true;
                start = i + 1;
            }
            i += 1;
        }
        let t = s[start..].trim();
        if t.is_empty() {
            return Err(Error::Parse(String::from("empty term")));
        }
        terms.push((sign, t));
        for (sign, term) in terms {
            let (coeff, mask) = parse_term(dim, term)?;
            out.coeffs[mask] += sign * coeff;
        }
        Ok(out)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.dist(other) <= tol
    }
}

fn parse_blade(dim: usize, t: &str) -> Result<usize> {
    let digits = t.strip_prefix('e').ok_or_else(|| Error::Parse(t.to_string()))?;
    if digits.is_empty() {
        return Err(Error::Parse(t.to_string()));
    }
    let mut mask = 0usize;
    let mut last = 0u32;
    for ch in digits.chars() {
        let d = ch.to_digit(10).ok_or_else(|| Error::Parse(t.to_string()))?;
        if d == 0 || d as usize > dim || d <= last {
            return Err(Error::Parse(alloc::format!("bad blade `{t}` for dimension {dim}")));
        }
        last = d;
        mask |= 1 << (d - 1);
    }
    Ok(mask)
}

fn parse_num(t: &str) -> Result<f64> {
    t.trim().parse::<f64>().map_err(|_| Error::Parse(alloc::format!("bad number `{t}`")))
}

fn parse_term(dim: usize, t: &str) -> Result<(f64, usize)> {
    match t.split_once('*') {
        Some((c, b)) => Ok((parse_num(c)?, parse_blade(dim, b.trim())?)),
        None if t.starts_with('e') => Ok((1.0, parse_blade(dim, t)?)),
        None => Ok((parse_num(t)?, 0)),
    }
}

fn blade_name(mask: usize) -> String {
    let mut s = String::from("e");
    let mut i = 0;
    while mask >> i != 0 {
        if mask & (1 << i) != 0 {
            s.push(char::from_digit(i as u32 + 1, 10).unwrap_or('?'));
        }
        i += 1;
    }
    s
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut order: Vec<usize> = (0..self.coeffs.len()).collect();
        order.sort_by_key(|&m| (grade_of(m), m));
        let mut first = true;
        for m in order {
            let c = self.coeffs[m];
            if c == 0.0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0.0 { " - " } else { " + " })?;
            }
            first = false;
            if m == 0 {
                write!(f, "{mag}")?;
            } else if mag == 1.0 {
                f.write_str(&blade_name(m))?;
            } else {
                write!(f, "{mag}*{}", blade_name(m))?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Mul for &Multivector {
    type Output = Multivector;
    /// Panics on dimension mismatch; see [`Multivector::geometric_product`].
    fn mul(self, rhs: &Multivector) -> Multivector {
        match self.geometric_product(rhs) {
            Ok(m) => m,
            Err(e) => panic!("{e}"),
        }
    }
}

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Multivector { dim: self.dim, coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl AddAssign<&Multivector> for Multivector {
    fn add_assign(&mut self, rhs: &Multivector) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Multivector { dim: self.dim, coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

/// Default-tolerance shorthands.
impl Multivector {
    pub fn inverse(&self) -> Result<Self> {
        self.mv_inverse(DEFAULT_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(dim: usize, i: usize) -> Multivector {
        Multivector::basis_vector(dim, i - 1)
    }

    #[test]
    fn basis_relations() {
        let (e1, e2) = (e(3, 1), e(3, 2));
        assert_eq!(&e1 * &e1, Multivector::scalar(3, -1.0));
        assert_eq!(&e1 * &e2, Multivector::blade(3, 0b011, 1.0));
        assert_eq!(&e2 * &e1, Multivector::blade(3, 0b011, -1.0));
    }

    #[test]
    fn product_of_bivectors() {
        let e12 = Multivector::blade(3, 0b011, 1.0);
        let e23 = Multivector::blade(3, 0b110, 1.0);
        assert_eq!(&e12 * &e23, Multivector::blade(3, 0b101, -1.0));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let r = e(2, 1).geometric_product(&e(3, 1));
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn involution_signs_per_grade() {
        let a = Multivector::new(3, (1..=8).map(|x| x as f64).collect()).unwrap();
        let rev = [1.0, 1.0, -1.0, -1.0];
        let con = [1.0, -1.0, -1.0, 1.0];
        let inv = [1.0, -1.0, 1.0, -1.0];
        for m in 0..8 {
            let g = grade_of(m) as usize;
            assert_eq!(a.reversion().get(m), rev[g] * a.get(m));
            assert_eq!(a.conjugation().get(m), con[g] * a.get(m));
            assert_eq!(a.grade_involution().get(m), inv[g] * a.get(m));
        }
    }

    #[test]
    fn kelvin_inverse_of_vector() {
        let x = Multivector::from_vector(&[3.0, 4.0]);
        let inv = x.kelvin_inverse(DEFAULT_TOL).unwrap();
        assert_eq!(inv, Multivector::from_vector(&[-0.12, -0.16]));
        assert!((&x * &inv).approx_eq(&Multivector::one(2), 1e-15));
        assert!(Multivector::zero(2).kelvin_inverse(DEFAULT_TOL).is_err());
        assert!(Multivector::one(2).kelvin_inverse(DEFAULT_TOL).is_err());
    }

    #[test]
    fn general_inverse() {
        let a = Multivector::parse(3, "1 + 2*e1 - e23 + 0.5*e123").unwrap();
        let inv = a.mv_inverse(DEFAULT_TOL).unwrap();
        assert!((&a * &inv).approx_eq(&Multivector::one(3), 1e-13));
        assert!((&inv * &a).approx_eq(&Multivector::one(3), 1e-13));
    }

    #[test]
    fn zero_divisor_is_not_invertible() {
        // e123 squares to +1 in Cl_3, so 1 + e123 divides zero
        let a = Multivector::parse(3, "1 + e123").unwrap();
        assert!(a.mv_inverse(DEFAULT_TOL).is_err());
    }

    #[test]
    fn modulus_of_product() {
        let a = &Multivector::from_vector(&[1.0, 2.0, 2.0]) * &Multivector::from_vector(&[0.0, 3.0, 4.0]);
        assert!((a.modulus(DEFAULT_TOL).unwrap() - 15.0).abs() < 1e-12);
        assert!(Multivector::parse(3, "1 + e123").unwrap().modulus(DEFAULT_TOL).is_err());
    }

    #[test]
    fn group_membership() {
        assert!(e(3, 1).in_pin(DEFAULT_TOL));
        assert!(Multivector::one(3).in_pin(DEFAULT_TOL));
        let a = Multivector::parse(3, "1 + e1").unwrap();
        assert!(!a.in_gamma(DEFAULT_TOL));
        let r = Multivector::parse(3, "0.6 + 0.8*e12").unwrap();
        assert!(r.in_pin(DEFAULT_TOL));
        assert!(r.scale(2.0).in_gamma(DEFAULT_TOL) && !r.scale(2.0).in_pin(DEFAULT_TOL));
    }

    #[test]
    fn text_form() {
        let a = Multivector::parse(3, "3 + 2*e1 - e13").unwrap();
        assert_eq!(a.get(0), 3.0);
        assert_eq!(a.get(0b001), 2.0);
        assert_eq!(a.get(0b101), -1.0);
        assert_eq!(a.to_string(), "3 + 2*e1 - e13");
        assert_eq!(Multivector::zero(2).to_string(), "0");
        let b = Multivector::parse(2, "-1.5e-3*e12 + 2e2").unwrap();
        assert_eq!(b.get(3), -1.5e-3);
        assert_eq!(b.get(0), 200.0);
        assert!(Multivector::parse(2, "e3").is_err());
        assert!(Multivector::parse(2, "e21").is_err());
        assert!(Multivector::parse(2, "1 +").is_err());
    }

    #[test]
    fn sign_table_matches() {
        let t = BladeSignTable::new(4).unwrap();
        for p in 0..16 {
            for q in 0..16 {
                assert_eq!(t.sign(p, q), blade_sign(p, q));
            }
        }
        assert!(BladeSignTable::new(9).is_err());
    }
}
