//! Clifford-valued 2x2 matrices, Moebius maps of `R^n` and the group of
//! unit-ball automorphisms written as pairs `(u, w)`.

use alloc::vec::Vec;

use crate::clifford::{grade_of, Multivector};
use crate::quadrature::{gauss_legendre, QuadratureRule};
use crate::{Error, Result, DEFAULT_TOL};

/// `[[a, b], [c, d]]` with Clifford entries.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffMat2 {
    pub a: Multivector,
    pub b: Multivector,
    pub c: Multivector,
    pub d: Multivector,
}

impl CliffMat2 {
    pub fn new(a: Multivector, b: Multivector, c: Multivector, d: Multivector) -> Result<Self> {
        let n = a.dim();
        for m in [&b, &c, &d] {
            if m.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
            }
        }
        Ok(CliffMat2 { a, b, c, d })
    }

    pub fn identity(dim: usize) -> Self {
        CliffMat2 {
            a: Multivector::one(dim),
            b: Multivector::zero(dim),
            c: Multivector::zero(dim),
            d: Multivector::one(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn mul(&self, o: &Self) -> Self {
        CliffMat2 {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        CliffMat2 { a: self.a.scale(s), b: self.b.scale(s), c: self.c.scale(s), d: self.d.scale(s) }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Largest coefficient difference.
    pub fn dist(&self, o: &Self) -> f64 {
        self.a.dist(&o.a).max(self.b.dist(&o.b)).max(self.c.dist(&o.c)).max(self.d.dist(&o.d))
    }

    /// Distance allowing for the sign ambiguity `M ~ -M`.
    pub fn dist_projective(&self, o: &Self) -> f64 {
        self.dist(o).min(self.dist(&o.neg()))
    }

    /// `a d* - b c*`, a real scalar for Vahlen matrices.
    pub fn pseudo_determinant(&self) -> Multivector {
        &(&self.a * &self.d.reversion()) - &(&self.b * &self.c.reversion())
    }

    /// `[[d*, -b*], [-c*, a*]] / (a d* - b c*)`.
    pub fn vahlen_inverse(&self, tol: f64) -> Result<Self> {
        let delta = self.pseudo_determinant();
        if !delta.is_scalar(tol) || delta.scalar_part().abs() <= tol {
            return Err(Error::NotMoebius("pseudo-determinant is not a nonzero scalar".into()));
        }
        let s = 1.0 / delta.scalar_part();
        Ok(CliffMat2 {
            a: self.d.reversion().scale(s),
            b: self.b.reversion().scale(-s),
            c: self.c.reversion().scale(-s),
            d: self.a.reversion().scale(s),
        })
    }

    /// Necessary conditions for a Vahlen matrix.
    pub fn is_vahlen(&self, tol: f64) -> bool {
        let delta = self.pseudo_determinant();
        let entries_ok = [&self.a, &self.b, &self.c, &self.d].iter().all(|m| (*m * &m.conjugation()).is_scalar(tol));
        entries_ok
            && delta.is_scalar(tol)
            && delta.scalar_part().abs() > tol
            && (&self.a.reversion() * &self.b).is_vector(tol)
            && (&self.c.reversion() * &self.d).is_vector(tol)
            && (&self.a * &self.c.reversion()).is_vector(tol)
            && (&self.b * &self.d.reversion()).is_vector(tol)
    }

    /// `[[conj(d), conj(b)], [conj(c), conj(a)]]`, the right factor of the
    /// projective action on sphere matrices.
    pub fn tilde(&self) -> Self {
        CliffMat2 { a: self.d.conjugation(), b: self.b.conjugation(), c: self.c.conjugation(), d: self.a.conjugation() }
    }
}

/// A point of `R^n` or the point at infinity.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Finite(Vec<f64>),
    Infinity,
}

impl Point {
    pub fn finite(x: &[f64]) -> Self {
        Point::Finite(x.to_vec())
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Finite(x) => Some(x),
            Point::Infinity => None,
        }
    }
}

/// `(a x + b)(c x + d)^{-1}`.
pub fn moebius_apply(m: &CliffMat2, x: &Point, tol: f64) -> Result<Point> {
    let n = m.dim();
    let (num, den) = match x {
        Point::Finite(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
            let xv = Multivector::from_vector(v);
            (&(&m.a * &xv) + &m.b, &(&m.c * &xv) + &m.d)
        }
        Point::Infinity => (m.a.clone(), m.c.clone()),
    };
    if den.norm() <= tol * num.norm().max(1.0) {
        return Ok(Point::Infinity);
    }
    let inv = match den.mv_inverse(tol) {
        Ok(i) => i,
        Err(Error::NotInvertible { .. }) => return Ok(Point::Infinity),
        Err(e) => return Err(e),
    };
    let y = &num * &inv;
    if !y.is_vector(tol.max(1e-9)) {
        return Err(Error::NotMoebius("image is not a vector".into()));
    }
    Ok(Point::Finite(y.vector_part()))
}

/// Sphere of centre `m` and squared radius `r2`; `r2 == 0` is a point.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereCoord {
    pub centre: Vec<f64>,
    pub r2: f64,
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `[[m, -m^2 - r^2], [1, -m]]`.
pub fn sphere_to_matrix(s: &SphereCoord) -> CliffMat2 {
    let n = s.centre.len();
    let m = Multivector::from_vector(&s.centre);
    // m^2 = -|m|^2 for a vector
    let top = dot(&s.centre, &s.centre) - s.r2;
    CliffMat2 { a: m.clone(), b: Multivector::scalar(n, top), c: Multivector::one(n), d: m.scale(-1.0) }
}

/// Sphere matrix of the zero-radius sphere at `x`. The lower-right entry is
/// `-x`, matching `sphere_to_matrix` with `r2 = 0`.
pub fn point_to_sphere(x: &[f64]) -> CliffMat2 {
    sphere_to_matrix(&SphereCoord { centre: x.to_vec(), r2: 0.0 })
}

pub fn matrix_to_sphere(m: &CliffMat2, tol: f64) -> Result<SphereCoord> {
    if !m.c.is_scalar(tol) || m.c.scalar_part().abs() <= tol {
        return Err(Error::NotConformable("lower-left entry is not a nonzero scalar".into()));
    }
    let s = 1.0 / m.c.scalar_part();
    let a = m.a.scale(s);
    let d = m.d.scale(s);
    let b = m.b.scale(s);
    let scale_tol = tol * (1.0 + a.norm() + b.norm());
    if !a.is_vector(tol) || (&a + &d).max_abs() > scale_tol || !b.is_scalar(tol) {
        return Err(Error::NotConformable("entries do not describe a sphere".into()));
    }
    let centre = a.vector_part();
    let r2 = dot(&centre, &centre) - b.scalar_part();
    Ok(SphereCoord { centre, r2 })
}

/// `g S tilde(g)` read back as a sphere.
pub fn projective_action(g: &CliffMat2, s: &SphereCoord, tol: f64) -> Result<SphereCoord> {
    let sm = sphere_to_matrix(s);
    matrix_to_sphere(&g.mul(&sm).mul(&g.tilde()), tol)
}

/// Automorphism of the unit ball: `u` in the open ball, `w` in `Pin(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoebElement {
    pub u: Vec<f64>,
    pub w: Multivector,
}

impl MoebElement {
    pub fn new(u: Vec<f64>, w: Multivector) -> Result<Self> {
        if u.len() != w.dim() {
            return Err(Error::DimensionMismatch { expected: w.dim(), found: u.len() });
        }
        let norm = libm::sqrt(dot(&u, &u));
        if norm >= 1.0 {
            return Err(Error::OutsideBall { norm });
        }
        let tol = 1e-9;
        if !w.in_pin(tol) || !(w.is_even(tol) || w.is_odd(tol)) {
            return Err(Error::NotInPin);
        }
        Ok(MoebElement { u, w })
    }

    pub fn identity(dim: usize) -> Self {
        MoebElement { u: alloc::vec![0.0; dim], w: Multivector::one(dim) }
    }

    /// Pure translation part `(u, 1)`.
    pub fn translation(u: Vec<f64>) -> Result<Self> {
        let n = u.len();
        Self::new(u, Multivector::one(n))
    }

    pub fn rotation(w: Multivector) -> Result<Self> {
        let n = w.dim();
        Self::new(alloc::vec![0.0; n], w)
    }

    pub fn dim(&self) -> usize {
        self.w.dim()
    }

    pub fn u_norm(&self) -> f64 {
        libm::sqrt(dot(&self.u, &self.u))
    }

    pub fn matrix(&self) -> CliffMat2 {
        from_uw(self)
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        to_uw(&from_uw(self).mul(&from_uw(other)), 1e-9)
    }

    /// Closed form `(w' u' conj(w), conj(w))`.
    pub fn inverse(&self) -> Self {
        let u = Multivector::from_vector(&self.u).grade_involution();
        let ui = &(&self.w.grade_involution() * &u) * &self.w.conjugation();
        MoebElement { u: ui.vector_part(), w: self.w.conjugation() }
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        moebius_apply(&from_uw(self), x, DEFAULT_TOL)
    }

    /// Distance in `(u, w)` modulo the sign of `w`.
    pub fn dist(&self, o: &Self) -> f64 {
        let du = self.u.iter().zip(&o.u).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        du.max(self.w.dist(&o.w).min(self.w.dist(&o.w.scale(-1.0))))
    }
}

/// `(1 - |u|^2)^{-1/2} [[w, w u'], [w' u, w']]`.
pub fn from_uw(g: &MoebElement) -> CliffMat2 {
    let s = 1.0 / libm::sqrt(1.0 - dot(&g.u, &g.u));
    let u = Multivector::from_vector(&g.u);
    let wp = g.w.grade_involution();
    CliffMat2 { a: g.w.scale(s), b: (&g.w * &u.grade_involution()).scale(s), c: (&wp * &u).scale(s), d: wp.scale(s) }
}

/// Inverse of [`from_uw`]: `w = a/|a|`, `u = a* c / |a|^2`.
pub fn to_uw(m: &CliffMat2, tol: f64) -> Result<MoebElement> {
    let a_mod = m.a.modulus(tol).map_err(|_| Error::NotMoebius("a is not in T(n)".into()))?;
    let c_mod = m.c.modulus(tol).map_err(|_| Error::NotMoebius("c is not in T(n)".into()))?;
    if (a_mod * a_mod - c_mod * c_mod - 1.0).abs() > tol * (1.0 + a_mod * a_mod) {
        return Err(Error::NotMoebius("|a|^2 - |b|^2 != 1".into()));
    }
    if m.d.dist(&m.a.grade_involution()) > tol * a_mod.max(1.0)
        || m.b.dist(&m.c.grade_involution()) > tol * a_mod.max(1.0)
    {
        return Err(Error::NotMoebius("matrix is not of the form [[a, b'], [b, a']]".into()));
    }
    let w = m.a.scale(1.0 / a_mod);
    let u = (&m.a.reversion() * &m.c).scale(1.0 / (a_mod * a_mod));
    if !u.is_vector(tol) {
        return Err(Error::NotMoebius("a* b is not a vector".into()));
    }
    MoebElement::new(u.vector_part(), w)
}

/// Density of the invariant measure in `(u, w)`: `|1 + u^2|^{-n}`.
pub fn haar_density(u: &[f64]) -> f64 {
    let n = u.len() as i32;
    libm::pow((1.0 - dot(u, u)).abs(), -(n as f64))
}

/// Deterministic rule on `Pin(n)` with weights summing to one.
#[derive(Clone, Debug)]
pub struct PinRule {
    pub elements: Vec<Multivector>,
    pub weights: Vec<f64>,
}

impl PinRule {
    /// `size` controls the resolution per angle.
    pub fn new(dim: usize, size: usize) -> Result<Self> {
        let mut elements = Vec::new();
        let mut weights = Vec::new();
        match dim {
            2 => {
                let m = size.max(1);
                for k in 0..m {
                    let t = 2.0 * core::f64::consts::PI * k as f64 / m as f64;
                    let (c, s) = (libm::cos(t), libm::sin(t));
                    let mut r = Multivector::scalar(2, c);
                    r.set(0b11, s);
                    elements.push(r);
                    elements.push(Multivector::from_vector(&[c, s]));
                    weights.push(0.5 / m as f64);
                    weights.push(0.5 / m as f64);
                }
            }
            3 => {
                // Hopf coordinates on unit quaternions; t = sin^2(eta) is uniform
                let p = size / 2 + 1;
                let q = size.max(1);
                let (x, wx) = gauss_legendre(p);
                let e123 = Multivector::blade(3, 0b111, 1.0);
                for (xi, wi) in x.iter().zip(&wx) {
                    let t = 0.5 * (xi + 1.0);
                    let (ce, se) = (libm::sqrt(1.0 - t), libm::sqrt(t));
                    for j in 0..q {
                        for k in 0..q {
                            let a1 = 2.0 * core::f64::consts::PI * j as f64 / q as f64;
                            let a2 = 2.0 * core::f64::consts::PI * k as f64 / q as f64;
                            let mut r = Multivector::zero(3);
                            r.set(0, ce * libm::cos(a1));
                            r.set(0b011, ce * libm::sin(a1));
                            r.set(0b101, se * libm::cos(a2));
                            r.set(0b110, se * libm::sin(a2));
                            let wt = 0.5 * wi / (2.0 * (q * q) as f64);
                            elements.push(&r * &e123);
                            elements.push(r);
                            weights.push(wt);
                            weights.push(wt);
                        }
                    }
                }
            }
            _ => return Err(Error::UnsupportedDimension(dim)),
        }
        Ok(PinRule { elements, weights })
    }
}

/// Settings for the boundary functional on the group.
#[derive(Clone, Debug)]
pub struct HardyConfig {
    pub radii: [f64; 2],
    /// Circle nodes (`n = 2`) or sphere degree (`n = 3`).
    pub u_size: usize,
    pub w_size: usize,
    pub tol: f64,
}

impl Default for HardyConfig {
    fn default() -> Self {
        HardyConfig { radii: [0.9, 0.99], u_size: 64, w_size: 8, tol: 1e-6 }
    }
}

#[derive(Clone, Debug)]
pub struct HardyEstimate {
    pub at_radii: Vec<(f64, Multivector)>,
    /// Linear extrapolation in `r^2` to the boundary.
    pub extrapolated: Multivector,
}

/// `(1 - r^2)^{-(n-1)}` times the mean of `f(r x, w)` over the sphere and Pin.
pub fn hardy_functional_at(
    dim: usize,
    f: &dyn Fn(&MoebElement) -> Multivector,
    r: f64,
    u_rule: &QuadratureRule,
    w_rule: &PinRule,
) -> Result<Multivector> {
    let g = |e: &MoebElement| alloc::vec![f(e)];
    Ok(hardy_many_at(dim, &g, 1, r, u_rule, w_rule)?.remove(0))
}

fn hardy_many_at(
    dim: usize,
    f: &dyn Fn(&MoebElement) -> Vec<Multivector>,
    count: usize,
    r: f64,
    u_rule: &QuadratureRule,
    w_rule: &PinRule,
) -> Result<Vec<Multivector>> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::OutsideBall { norm: r });
    }
    if u_rule.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: u_rule.dim() });
    }
    let mut acc = alloc::vec![Multivector::zero(dim); count];
    for (x, wx) in u_rule.iter() {
        let u: Vec<f64> = x.iter().map(|v| v * r).collect();
        for (w, ww) in w_rule.elements.iter().zip(&w_rule.weights) {
            let g = MoebElement { u: u.clone(), w: w.clone() };
            for (a, v) in acc.iter_mut().zip(f(&g)) {
                *a += &v.scale(wx * ww);
            }
        }
    }
    let s = libm::pow(1.0 - r * r, -((dim - 1) as f64));
    Ok(acc.into_iter().map(|a| a.scale(s)).collect())
}

/// Boundary functional with refinement check and extrapolation in `r^2`.
pub fn hardy_functional(
    dim: usize,
    f: &dyn Fn(&MoebElement) -> Multivector,
    cfg: &HardyConfig,
) -> Result<HardyEstimate> {
    let g = |e: &MoebElement| alloc::vec![f(e)];
    Ok(hardy_functional_many(dim, &g, 1, cfg)?.remove(0))
}

/// [`hardy_functional`] for `count` integrands evaluated together.
pub fn hardy_functional_many(
    dim: usize,
    f: &dyn Fn(&MoebElement) -> Vec<Multivector>,
    count: usize,
    cfg: &HardyConfig,
) -> Result<Vec<HardyEstimate>> {
    let w_rule = PinRule::new(dim, cfg.w_size)?;
    let u_rule = QuadratureRule::for_dim(dim, cfg.u_size)?;
    let inner = hardy_many_at(dim, f, count, cfg.radii[0], &u_rule, &w_rule)?;
    let r_max = cfg.radii[1];
    let coarse = hardy_many_at(dim, f, count, r_max, &u_rule, &w_rule)?;
    let fine = QuadratureRule::for_dim(dim, 2 * cfg.u_size)?;
    let outer = hardy_many_at(dim, f, count, r_max, &fine, &w_rule)?;
    let (s1, s2) = (cfg.radii[0] * cfg.radii[0], r_max * r_max);
    let mut out = Vec::with_capacity(count);
    for ((h1, c), h2) in inner.into_iter().zip(coarse).zip(outer) {
        let diff = h2.dist(&c);
        if diff > 10.0 * cfg.tol * h2.norm().max(1.0) {
            return Err(Error::Unresolved(alloc::format!("refinement changed the value by {diff:e} at r = {r_max}")));
        }
        let extrapolated = (&h2.scale(1.0 - s1) - &h1.scale(1.0 - s2)).scale(1.0 / (s2 - s1));
        out.push(HardyEstimate { at_radii: alloc::vec![(cfg.radii[0], h1), (r_max, h2)], extrapolated });
    }
    Ok(out)
}

/// True when every coefficient of `m` lives in even grades.
pub fn parity_of(m: &Multivector) -> Option<bool> {
    let mut even = false;
    let mut odd = false;
    for (mask, c) in m.coeffs().iter().enumerate() {
        if *c != 0.0 {
            if grade_of(mask).is_multiple_of(2) {
                even = true;
            } else {
                odd = true;
            }
        }
    }
    match (even, odd) {
        (true, false) => Some(true),
        (false, true) => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rot2(t: f64) -> Multivector {
        let mut w = Multivector::scalar(2, libm::cos(t));
        w.set(0b11, libm::sin(t));
        w
    }

    #[test]
    fn identity_fixes_points() {
        let id = CliffMat2::identity(3);
        let x = Point::finite(&[0.3, -1.0, 2.0]);
        assert_eq!(moebius_apply(&id, &x, DEFAULT_TOL).unwrap(), x);
        assert_eq!(moebius_apply(&id, &Point::Infinity, DEFAULT_TOL).unwrap(), Point::Infinity);
    }

    #[test]
    fn inversion_sends_zero_to_infinity() {
        let n = 2;
        let j = CliffMat2 {
            a: Multivector::zero(n),
            b: Multivector::one(n),
            c: Multivector::one(n),
            d: Multivector::zero(n),
        };
        assert_eq!(moebius_apply(&j, &Point::finite(&[0.0, 0.0]), DEFAULT_TOL).unwrap(), Point::Infinity);
        let y = moebius_apply(&j, &Point::finite(&[2.0, 0.0]), DEFAULT_TOL).unwrap();
        // x^{-1} = -x/|x|^2
        assert_eq!(y, Point::finite(&[-0.5, 0.0]));
    }

    #[test]
    fn translation_moves_u_to_zero() {
        let g = MoebElement::translation(vec![0.3, -0.2]).unwrap();
        let y = g.apply(&Point::finite(&[0.3, -0.2])).unwrap();
        let c = y.coords().unwrap();
        assert!(c[0].abs() < 1e-15 && c[1].abs() < 1e-15);
        let y = g.apply(&Point::finite(&[0.0, 0.0])).unwrap();
        let c = y.coords().unwrap();
        assert!((c[0] + 0.3).abs() < 1e-15 && (c[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn round_trip_uw() {
        let g = MoebElement::new(vec![0.1, 0.5], rot2(0.7)).unwrap();
        let back = to_uw(&from_uw(&g), 1e-12).unwrap();
        assert!(back.dist(&g) < 1e-14);
        let refl = MoebElement::new(vec![-0.4, 0.2], Multivector::from_vector(&[0.6, 0.8])).unwrap();
        assert!(to_uw(&from_uw(&refl), 1e-12).unwrap().dist(&refl) < 1e-14);
    }

    #[test]
    fn rejects_bad_elements() {
        assert!(matches!(MoebElement::translation(vec![1.0, 0.0]), Err(Error::OutsideBall { .. })));
        assert!(matches!(MoebElement::new(vec![0.0, 0.0], Multivector::scalar(2, 2.0)), Err(Error::NotInPin)));
    }

    #[test]
    fn closed_form_inverse_matches_matrix_inverse() {
        let g = MoebElement::new(vec![0.2, -0.6], rot2(1.1)).unwrap();
        let prod = from_uw(&g).mul(&from_uw(&g.inverse()));
        assert!(prod.dist_projective(&CliffMat2::identity(2)) < 1e-14);
        let vi = from_uw(&g).vahlen_inverse(1e-12).unwrap();
        assert!(vi.dist_projective(&from_uw(&g.inverse())) < 1e-14);
        let refl = MoebElement::new(vec![0.3, 0.1], Multivector::from_vector(&[0.8, -0.6])).unwrap();
        let prod = from_uw(&refl.inverse()).mul(&from_uw(&refl));
        assert!(prod.dist_projective(&CliffMat2::identity(2)) < 1e-14);
    }

    #[test]
    fn unit_sphere_is_invariant() {
        let g = MoebElement::new(vec![0.5, 0.1], rot2(0.3)).unwrap();
        let s = SphereCoord { centre: vec![0.0, 0.0], r2: 1.0 };
        let t = projective_action(&from_uw(&g), &s, 1e-10).unwrap();
        assert!(t.centre.iter().all(|c| c.abs() < 1e-13) && (t.r2 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn sphere_matrix_round_trip() {
        let s = SphereCoord { centre: vec![0.5, -2.0, 1.0], r2: 0.25 };
        let back = matrix_to_sphere(&sphere_to_matrix(&s).scale(3.0), 1e-12).unwrap();
        assert!((back.r2 - 0.25).abs() < 1e-14);
        assert!(matrix_to_sphere(&CliffMat2::identity(3), 1e-12).is_err());
    }

    #[test]
    fn haar_density_at_origin() {
        assert_eq!(haar_density(&[0.0, 0.0, 0.0]), 1.0);
        assert!((haar_density(&[0.6, 0.0]) - 1.0 / (0.64 * 0.64)).abs() < 1e-12);
    }

    #[test]
    fn pin_rules_are_normalised() {
        for n in [2, 3] {
            let r = PinRule::new(n, 6).unwrap();
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(r.elements.iter().all(|w| w.in_pin(1e-12)));
        }
    }
}
