//! Clifford-valued operators built from tuples of symmetric matrices: the
//! regular representation, resolvents, the induced Moebius action and the
//! polynomial calculus.

use alloc::vec;
use alloc::vec::Vec;

use crate::analysis::{
    coherent_state, distinct_arrangements, sampled_inner_product, token_matrix, MultiIndex, SphereFunction, VBasis,
};
use crate::clifford::{blade_sign, Multivector, MAX_DIM};
use crate::linalg::{inverse_with_condition, symmetric_eigen, RMat};
use crate::moebius::{from_uw, hardy_functional_many, HardyConfig, MoebElement};
use crate::quadrature::QuadratureRule;
use crate::{Error, Result};

/// Default condition-number gate for operator inversion.
pub const DEFAULT_COND_MAX: f64 = 1e12;

/// Relative tolerance for the symmetry check on input matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// `n` real symmetric `d x d` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTuple {
    mats: Vec<RMat>,
}

impl OperatorTuple {
    pub fn new(mats: Vec<RMat>) -> Result<Self> {
        let n = mats.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        let d = mats[0].rows();
        for (i, m) in mats.iter().enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: m.rows().max(m.cols()) });
            }
            let asym = m.asymmetry();
            if asym > SYMMETRY_TOL * m.max_abs().max(1.0) {
                return Err(Error::NotSymmetric { index: i, asymmetry: asym });
            }
        }
        Ok(OperatorTuple { mats })
    }

    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    pub fn size(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn mats(&self) -> &[RMat] {
        &self.mats
    }

    /// Largest spectral norm of a commutator `[A_i, A_j]`.
    pub fn commutator_residual(&self) -> f64 {
        let mut r = 0.0f64;
        for i in 0..self.mats.len() {
            for j in i + 1..self.mats.len() {
                let c = &self.mats[i].matmul(&self.mats[j]) - &self.mats[j].matmul(&self.mats[i]);
                r = r.max(c.spectral_norm());
            }
        }
        r
    }

    pub fn max_norm(&self) -> f64 {
        self.mats.iter().map(|m| m.spectral_norm()).fold(0.0, f64::max)
    }
}

/// An element of `M_n = R^d (x) Cl_n`, stored blade by blade.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffVector {
    dim: usize,
    comps: Vec<Vec<f64>>,
}

impl CliffVector {
    pub fn zero(dim: usize, d: usize) -> Self {
        CliffVector { dim, comps: vec![vec![0.0; d]; 1 << dim] }
    }

    /// `v` placed in the scalar blade.
    pub fn from_real(dim: usize, v: &[f64]) -> Self {
        let mut out = Self::zero(dim, v.len());
        out.comps[0] = v.to_vec();
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.comps[0].len()
    }

    pub fn blade(&self, mask: usize) -> &[f64] {
        &self.comps[mask]
    }

    pub fn blade_mut(&mut self, mask: usize) -> &mut [f64] {
        &mut self.comps[mask]
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&o.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        CliffVector { dim: self.dim, comps: self.comps.iter().map(|c| c.iter().map(|x| x * s).collect()).collect() }
    }

    /// `self * c` for a Clifford constant `c`.
    pub fn right_mul(&self, c: &Multivector) -> Self {
        let mut out = Self::zero(self.dim, self.size());
        for (p, vp) in self.comps.iter().enumerate() {
            for (q, &cq) in c.coeffs().iter().enumerate() {
                if cq == 0.0 {
                    continue;
                }
                let s = blade_sign(p, q) * cq;
                for (o, x) in out.comps[p ^ q].iter_mut().zip(vp) {
                    *o += s * x;
                }
            }
        }
        out
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.comps.iter().flatten().map(|x| x * x).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn dist(&self, o: &Self) -> f64 {
        self.sub(o).max_abs()
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.comps.iter().flatten().copied().collect()
    }
}

/// `sum_p e_p X_p` with real `d x d` blocks `X_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffOperator {
    dim: usize,
    d: usize,
    blades: Vec<RMat>,
}

impl CliffOperator {
    pub fn zero(dim: usize, d: usize) -> Self {
        CliffOperator { dim, d, blades: vec![RMat::zeros(d, d); 1 << dim] }
    }

    pub fn identity(dim: usize, d: usize) -> Self {
        Self::constant(&Multivector::one(dim), d)
    }

    /// `c (x) I`.
    pub fn constant(c: &Multivector, d: usize) -> Self {
        let dim = c.dim();
        let blades = c.coeffs().iter().map(|&x| RMat::identity(d).scale(x)).collect();
        CliffOperator { dim, d, blades }
    }

    pub fn from_blades(dim: usize, blades: Vec<RMat>) -> Result<Self> {
        if blades.len() != 1 << dim {
            return Err(Error::DimensionMismatch { expected: 1 << dim, found: blades.len() });
        }
        let d = blades[0].rows();
        Ok(CliffOperator { dim, d, blades })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.d
    }

    pub fn blade(&self, mask: usize) -> &RMat {
        &self.blades[mask]
    }

    pub fn blade_mut(&mut self, mask: usize) -> &mut RMat {
        &mut self.blades[mask]
    }

    pub fn add(&self, o: &Self) -> Self {
        CliffOperator {
            dim: self.dim,
            d: self.d,
            blades: self.blades.iter().zip(&o.blades).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        CliffOperator {
            dim: self.dim,
            d: self.d,
            blades: self.blades.iter().zip(&o.blades).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        CliffOperator { dim: self.dim, d: self.d, blades: self.blades.iter().map(|b| b.scale(s)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!((self.dim, self.d), (o.dim, o.d), "operator shape mismatch");
        let mut out = Self::zero(self.dim, self.d);
        for (p, xp) in self.blades.iter().enumerate() {
            if xp.max_abs() == 0.0 {
                continue;
            }
            for (q, yq) in o.blades.iter().enumerate() {
                if yq.max_abs() == 0.0 {
                    continue;
                }
                let prod = xp.matmul(yq).scale(blade_sign(p, q));
                out.blades[p ^ q] = &out.blades[p ^ q] + &prod;
            }
        }
        out
    }

    /// `c X` for a Clifford constant.
    pub fn left_mul(&self, c: &Multivector) -> Self {
        Self::constant(c, self.d).mul(self)
    }

    /// `X c` for a Clifford constant.
    pub fn right_mul(&self, c: &Multivector) -> Self {
        self.mul(&Self::constant(c, self.d))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.dim, self.d);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn apply(&self, v: &CliffVector) -> CliffVector {
        let mut out = CliffVector::zero(self.dim, self.d);
        for (p, xp) in self.blades.iter().enumerate() {
            if xp.max_abs() == 0.0 {
                continue;
            }
            for (q, vq) in v.comps.iter().enumerate() {
                let y = xp.matvec(vq);
                let s = blade_sign(p, q);
                for (o, yi) in out.comps[p ^ q].iter_mut().zip(y) {
                    *o += s * yi;
                }
            }
        }
        out
    }

    /// Matrix of left multiplication on `M_n`, of size `d 2^n`.
    pub fn regular_matrix(&self) -> RMat {
        let len = 1usize << self.dim;
        let d = self.d;
        let mut m = RMat::zeros(d * len, d * len);
        for r in 0..len {
            for q in 0..len {
                let p = r ^ q;
                let s = blade_sign(p, q);
                let xp = &self.blades[p];
                for i in 0..d {
                    for j in 0..d {
                        m[(r * d + i, q * d + j)] = s * xp[(i, j)];
                    }
                }
            }
        }
        m
    }

    /// Operator norm on `M_n` with the Euclidean norm.
    pub fn spectral_norm(&self) -> f64 {
        self.regular_matrix().spectral_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.blades.iter().fold(0.0, |m, b| m.max(b.max_abs()))
    }

    pub fn dist(&self, o: &Self) -> f64 {
        self.sub(o).max_abs()
    }

    /// True when only grade-1 blades are nonzero (up to `tol`).
    pub fn is_vector_valued(&self, tol: f64) -> bool {
        self.blades.iter().enumerate().all(|(p, b)| p.count_ones() == 1 || b.max_abs() <= tol)
    }
}

/// `A = sum_j e_j A_j`.
pub fn embed(t: &OperatorTuple) -> CliffOperator {
    let n = t.dim();
    let d = t.size();
    let mut out = CliffOperator::zero(n, d);
    for (j, a) in t.mats.iter().enumerate() {
        out.blades[1 << j] = a.clone();
    }
    out
}

/// The letter `e_j A_j` alone.
fn letter(t: &OperatorTuple, j: usize) -> CliffOperator {
    let mut out = CliffOperator::zero(t.dim(), t.size());
    out.blades[1 << j] = t.mats[j].clone();
    out
}

pub fn op_mul(x: &CliffOperator, y: &CliffOperator) -> Result<CliffOperator> {
    if (x.dim, x.d) != (y.dim, y.d) {
        return Err(Error::DimensionMismatch { expected: x.d, found: y.d });
    }
    Ok(x.mul(y))
}

/// Inverse through the regular representation, with its condition number.
pub fn op_inverse(x: &CliffOperator, cond_max: f64) -> Result<(CliffOperator, f64)> {
    let reg = x.regular_matrix();
    let (inv, cond) = inverse_with_condition(&reg, cond_max)?;
    let d = x.d;
    let blades = (0..1usize << x.dim).map(|r| inv.block(r * d, 0, d, d)).collect();
    let y = CliffOperator { dim: x.dim, d, blades };
    let resid = x.mul(&y).dist(&CliffOperator::identity(x.dim, d));
    if resid > 1e4 * f64::EPSILON * cond.max(1.0) {
        return Err(Error::NotInvertible { condition: cond });
    }
    Ok((y, cond))
}

/// `A - u I` for a vector `u`.
pub fn shift(a: &CliffOperator, u: &[f64]) -> Result<CliffOperator> {
    if u.len() != a.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: u.len() });
    }
    let mut out = a.clone();
    for (j, &uj) in u.iter().enumerate() {
        out.blades[1 << j] = &out.blades[1 << j] - &RMat::identity(a.d).scale(uj);
    }
    Ok(out)
}

/// `u` lies in the resolvent set when `A - u I` inverts within `cond_max`.
pub fn resolvent_membership(u: &[f64], a: &CliffOperator, cond_max: f64) -> Result<bool> {
    let s = shift(a, u)?;
    match op_inverse(&s, cond_max) {
        Ok(_) => Ok(true),
        Err(Error::NotInvertible { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// `(a* I - b* A)^{-1}` with `g = [[a, b'], [b, a']]`.
pub fn resolvent(g: &MoebElement, a: &CliffOperator, cond_max: f64) -> Result<CliffOperator> {
    check_dim(g, a)?;
    let m = from_uw(g);
    let den = CliffOperator::constant(&m.a.reversion(), a.d).sub(&a.left_mul(&m.c.reversion()));
    op_inverse(&den, cond_max).map(|x| x.0).map_err(|_| Error::ResolventViolation)
}

fn check_dim(g: &MoebElement, a: &CliffOperator) -> Result<()> {
    if g.dim() != a.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: g.dim() });
    }
    Ok(())
}

/// `g^{-1} A = (conj(a) A - conj(b) I)(a* I - b* A)^{-1}`.
pub fn moebius_on_operator(g: &MoebElement, a: &CliffOperator, cond_max: f64) -> Result<CliffOperator> {
    let r = resolvent(g, a, cond_max)?;
    let m = from_uw(g);
    let num = a.left_mul(&m.a.conjugation()).sub(&CliffOperator::constant(&m.c.conjugation(), a.d));
    Ok(num.mul(&r))
}

/// Residual of the difference identity
/// `g^{-1}A - g^{-1}x = (a - x b)^{-1} (A - x I) (a* I - b* A)^{-1}`.
pub fn lemma318_residual(g: &MoebElement, a: &CliffOperator, x: &[f64], cond_max: f64) -> Result<f64> {
    check_dim(g, a)?;
    let m = from_uw(g);
    let xv = Multivector::from_vector(x);
    let gx_num = &(&m.a.conjugation() * &xv) - &m.c.conjugation();
    let gx_den = &m.a.reversion() - &(&m.c.reversion() * &xv);
    let gx = &gx_num * &gx_den.mv_inverse(1e-12)?;
    let lhs = moebius_on_operator(g, a, cond_max)?.sub(&CliffOperator::constant(&gx, a.d));
    let left = (&m.a - &(&xv * &m.c)).mv_inverse(1e-12)?;
    let rhs = CliffOperator::constant(&left, a.d).mul(&shift(a, x)?).mul(&resolvent(g, a, cond_max)?);
    Ok(lhs.dist(&rhs))
}

/// `|a* I - b* A|^e` for a commuting tuple, where
/// `|a* I - b* A|^2 = (a* I - b* A)(a' I + A b')`. The product is
/// scalar-valued exactly when the tuple commutes; powers come from its
/// symmetric eigen-decomposition.
pub fn modulus_power(g: &MoebElement, t: &OperatorTuple, e: i32, tol: f64) -> Result<CliffOperator> {
    if g.dim() != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), found: g.dim() });
    }
    let d = t.size();
    if e == 0 {
        return Ok(CliffOperator::identity(t.dim(), d));
    }
    let resid = t.commutator_residual();
    let scale = t.max_norm().max(1.0);
    if resid > tol * scale * scale {
        return Err(Error::NonCommuting { residual: resid });
    }
    let x = modulus_squared(g, &embed(t));
    let (l, v) = symmetric_eigen(x.blade(0));
    if l.iter().any(|&li| li <= 0.0) {
        return Err(Error::ResolventViolation);
    }
    let p = 0.5 * e as f64;
    let lp: Vec<f64> = l.iter().map(|&li| libm::pow(li, p)).collect();
    let xp = v.matmul(&RMat::diag(&lp)).matmul(&v.transpose());
    let mut out = CliffOperator::zero(t.dim(), d);
    out.blades[0] = xp;
    Ok(out)
}

/// `(a* I - b* A)(a' I + A b')`.
pub fn modulus_squared(g: &MoebElement, a: &CliffOperator) -> CliffOperator {
    let m = from_uw(g);
    let left = CliffOperator::constant(&m.a.reversion(), a.d).sub(&a.left_mul(&m.c.reversion()));
    let right = CliffOperator::constant(&m.d, a.d).add(&a.right_mul(&m.b));
    left.mul(&right)
}

/// `[rho(g) f](A) = R(g, A) |a* I - b* A|^{2-n} f(g^{-1} A)` for a commuting tuple.
pub fn rho_commuting(
    g: &MoebElement,
    t: &OperatorTuple,
    f: &dyn Fn(&CliffOperator) -> Result<CliffVector>,
    cond_max: f64,
) -> Result<CliffVector> {
    let a = embed(t);
    let r = resolvent(g, &a, cond_max)?;
    let m = modulus_power(g, t, 2 - t.dim() as i32, 1e-10)?;
    let moved = moebius_on_operator(g, &a, cond_max)?;
    Ok(r.mul(&m).apply(&f(&moved)?))
}

/// Largest word length accepted by [`symmetric_product`].
pub const MAX_WORD: usize = 8;

/// Average over distinct arrangements of the word with `m_j` letters `e_j A_j`.
pub fn symmetric_product(t: &OperatorTuple, m: &MultiIndex) -> Result<CliffOperator> {
    if m.dim() != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), found: m.dim() });
    }
    if m.degree() > MAX_WORD {
        return Err(Error::InvalidInput(alloc::format!("word length exceeds {MAX_WORD}")));
    }
    let letters: Vec<CliffOperator> = (0..t.dim()).map(|j| letter(t, j)).collect();
    Ok(average_words(&letters, m, t.dim(), t.size()))
}

fn average_words(letters: &[CliffOperator], m: &MultiIndex, dim: usize, d: usize) -> CliffOperator {
    let arrangements = distinct_arrangements(&m.word());
    let count = arrangements.len() as f64;
    let mut acc = CliffOperator::zero(dim, d);
    for a in arrangements {
        let mut p = CliffOperator::identity(dim, d);
        for &j in &a {
            p = p.mul(&letters[j]);
        }
        acc = acc.add(&p);
    }
    acc.scale(1.0 / count)
}

/// Operator Fueter variables `A_j + e_1 e_j A_1`; slot 0 is zero.
pub fn operator_fueter_variables(t: &OperatorTuple) -> Vec<CliffOperator> {
    let n = t.dim();
    let d = t.size();
    let mut out = vec![CliffOperator::zero(n, d)];
    for j in 1..n {
        let mut z = CliffOperator::zero(n, d);
        z.blades[0] = t.mats[j].clone();
        z.blades[1 | (1 << j)] = t.mats[0].clone();
        out.push(z);
    }
    out
}

/// Images of the basis `V_m` under substitution of the operator tuple.
pub fn monogenic_images(t: &OperatorTuple, basis: &VBasis) -> Result<Vec<CliffOperator>> {
    if basis.dim() != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), found: basis.dim() });
    }
    let vars = operator_fueter_variables(t);
    let (n, d) = (t.dim(), t.size());
    Ok((0..basis.len())
        .map(|i| {
            let mut acc = CliffOperator::zero(n, d);
            for (m, c) in basis.combination(i) {
                acc = acc.add(&average_words(&vars, m, n, d).right_mul(c));
            }
            acc
        })
        .collect())
}

/// Which operator family a calculus runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductFamily {
    /// Symmetrized words in the letters `e_j A_j`.
    Symmetric,
    /// Images of the monogenic basis `V_m` (first slot of `m` is zero).
    Monogenic,
}

fn family_operator(t: &OperatorTuple, m: &MultiIndex, family: ProductFamily) -> Result<CliffOperator> {
    match family {
        ProductFamily::Symmetric => symmetric_product(t, m),
        ProductFamily::Monogenic => {
            if m.dim() != t.dim() {
                return Err(Error::DimensionMismatch { expected: t.dim(), found: m.dim() });
            }
            if m.0[0] != 0 {
                return Err(Error::InvalidInput("monogenic indices have a zero first slot".into()));
            }
            let basis = VBasis::new(t.dim(), m.degree())?;
            let i = basis.position(m).ok_or_else(|| Error::InvalidInput("unknown index".into()))?;
            let vars = operator_fueter_variables(t);
            let mut acc = CliffOperator::zero(t.dim(), t.size());
            for (mm, c) in basis.combination(i) {
                acc = acc.add(&average_words(&vars, mm, t.dim(), t.size()).right_mul(c));
            }
            Ok(acc)
        }
    }
}

/// `sum_m F_m v c_m` over finitely many coefficients.
pub fn taylor_calculus(
    t: &OperatorTuple,
    v: &[f64],
    coeffs: &[(MultiIndex, Multivector)],
    family: ProductFamily,
) -> Result<CliffVector> {
    if v.len() != t.size() {
        return Err(Error::DimensionMismatch { expected: t.size(), found: v.len() });
    }
    let vv = CliffVector::from_real(t.dim(), v);
    let mut acc = CliffVector::zero(t.dim(), t.size());
    for (m, c) in coeffs {
        let op = family_operator(t, m, family)?;
        acc = acc.add(&op.apply(&vv).right_mul(c));
    }
    Ok(acc)
}

/// Series version of [`taylor_calculus`]: sums degree by degree and fails
/// when the last degree still contributes more than `tol`.
pub fn taylor_series(
    t: &OperatorTuple,
    v: &[f64],
    coeff: &dyn Fn(&MultiIndex) -> Multivector,
    max_degree: usize,
    family: ProductFamily,
    tol: f64,
) -> Result<CliffVector> {
    let n = t.dim();
    let vv = CliffVector::from_real(n, v);
    let mut acc = CliffVector::zero(n, t.size());
    let mut last = 0.0;
    for k in 0..=max_degree {
        let mut part = CliffVector::zero(n, t.size());
        let indices: Vec<MultiIndex> = match family {
            ProductFamily::Symmetric => MultiIndex::of_degree(n, k),
            ProductFamily::Monogenic => MultiIndex::of_degree(n - 1, k)
                .into_iter()
                .map(|m| {
                    let mut x = vec![0];
                    x.extend(m.0);
                    MultiIndex(x)
                })
                .collect(),
        };
        for m in indices {
            let c = coeff(&m);
            if c.max_abs() == 0.0 {
                continue;
            }
            part = part.add(&family_operator(t, &m, family)?.apply(&vv).right_mul(&c));
        }
        last = part.norm();
        acc = acc.add(&part);
    }
    if last > tol * acc.norm().max(1.0) {
        let radii = spectral_radii(t, v, max_degree.clamp(1, MAX_WORD), family)?;
        return Err(Error::Divergence { estimate: radii.r_l });
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct SpectralRadii {
    /// `max_{|m| = K} |F_m|^{1/K}`.
    pub r_s: f64,
    /// `max_{|m| = K} |F_m v|^{1/K}`.
    pub r_l: f64,
    /// `(k, r_s(k), r_l(k))` for `k = 1..=K`.
    pub trace: Vec<(usize, f64, f64)>,
    /// `|F_m v| <= |F_m| |v|` held at every order.
    pub bound_holds: bool,
}

/// Finite-order estimates of the joint spectral radius and its local
/// version at `v`.
pub fn spectral_radii(t: &OperatorTuple, v: &[f64], k_max: usize, family: ProductFamily) -> Result<SpectralRadii> {
    if k_max == 0 || k_max > MAX_WORD {
        return Err(Error::InvalidInput(alloc::format!("order must be in 1..={MAX_WORD}")));
    }
    let n = t.dim();
    let vv = CliffVector::from_real(n, v);
    let vn = vv.norm();
    let basis = match family {
        ProductFamily::Monogenic if n >= 2 => Some(VBasis::new(n, k_max)?),
        _ => None,
    };
    let images = match &basis {
        Some(b) => Some(monogenic_images(t, b)?),
        None => None,
    };
    let mut trace = Vec::with_capacity(k_max);
    let mut bound_holds = true;
    for k in 1..=k_max {
        let mut rs = 0.0f64;
        let mut rl = 0.0f64;
        let ops: Vec<CliffOperator> = match (&basis, &images) {
            (Some(b), Some(im)) => {
                b.indices().iter().zip(im).filter(|(m, _)| m.degree() == k).map(|(_, op)| op.clone()).collect()
            }
            _ => {
                let mut v = Vec::new();
                for m in MultiIndex::of_degree(n, k) {
                    v.push(symmetric_product(t, &m)?);
                }
                v
            }
        };
        for op in ops {
            let on = op.spectral_norm();
            let ln = op.apply(&vv).norm();
            if ln > on * vn * (1.0 + 1e-12) + 1e-14 {
                bound_holds = false;
            }
            rs = rs.max(on);
            rl = rl.max(ln);
        }
        let e = 1.0 / k as f64;
        trace.push((k, libm::pow(rs, e), libm::pow(rl, e)));
    }
    let (_, r_s, r_l) = *trace.last().unwrap_or(&(0, 0.0, 0.0));
    Ok(SpectralRadii { r_s, r_l, trace, bound_holds })
}

/// `sum_m Phi(V_m) v c_m` with `Phi(V_m)` the monogenic images; the
/// coefficient slice follows `basis.indices()`.
pub fn monogenic_calculus(t: &OperatorTuple, v: &[f64], basis: &VBasis, coeffs: &[Multivector]) -> Result<CliffVector> {
    let images = monogenic_images(t, basis)?;
    let vv = CliffVector::from_real(t.dim(), v);
    let mut acc = CliffVector::zero(t.dim(), t.size());
    for (op, c) in images.iter().zip(coeffs) {
        acc = acc.add(&op.apply(&vv).right_mul(c));
    }
    Ok(acc)
}

/// Coefficient action `d = T(g) c` on the truncated basis.
pub fn rho_av_apply(
    g: &MoebElement,
    coeffs: &[Multivector],
    basis: &VBasis,
    quad: &QuadratureRule,
) -> Result<Vec<Multivector>> {
    Ok(token_matrix(basis, g, quad)?.apply(coeffs))
}

/// `sum_m Phi(V_m) v <V_m, f_g>` truncated to the basis.
pub fn coherent_operator_state(
    g: &MoebElement,
    t: &OperatorTuple,
    v: &[f64],
    basis: &VBasis,
    quad: &QuadratureRule,
) -> Result<CliffVector> {
    let tm = token_matrix(basis, g, quad)?;
    let col: Vec<Multivector> = (0..tm.size).map(|m| tm.get(m, 0).clone()).collect();
    monogenic_calculus(t, v, basis, &col)
}

/// Boundary nodes for the wavelet transforms inside [`integral_formula`].
pub const INTEGRAL_NODES: usize = 2048;

/// `H(E(g, A) Wf(g))` over the group, with `E(g, A) = sum_m Phi(V_m) v W_{m,0}(g)`
/// truncated to the basis. For `f` in the span of the basis this reproduces
/// `monogenic_calculus` with coefficients `<V_m, f>`, up to quadrature error.
pub fn integral_formula(
    t: &OperatorTuple,
    v: &[f64],
    basis: &VBasis,
    f: &SphereFunction,
    cfg: &HardyConfig,
) -> Result<CliffVector> {
    let n = t.dim();
    if basis.dim() != n || f.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: basis.dim().min(f.dim()) });
    }
    let quad = QuadratureRule::for_dim(n, INTEGRAL_NODES)?;
    let vm: Vec<Vec<Multivector>> = (0..basis.len()).map(|m| basis.function(m).samples(&quad)).collect();
    let fs = f.samples(&quad);
    let integrand = |g: &MoebElement| {
        let fg = coherent_state(g).samples(&quad);
        let wf = sampled_inner_product(&fg, &fs, &quad);
        vm.iter().map(|s| &sampled_inner_product(s, &fg, &quad) * &wf).collect()
    };
    let coeffs: Vec<Multivector> =
        hardy_functional_many(n, &integrand, basis.len(), cfg)?.into_iter().map(|h| h.extrapolated).collect();
    monogenic_calculus(t, v, basis, &coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::inner_product;
    use alloc::vec;

    fn pauli() -> OperatorTuple {
        OperatorTuple::new(vec![
            RMat::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]),
            RMat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_asymmetric_input() {
        let r = OperatorTuple::new(vec![RMat::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]])]);
        assert!(matches!(r, Err(Error::NotSymmetric { index: 0, .. })));
    }

    #[test]
    fn square_of_embedded_pauli_pair() {
        // (e1 J1 + e2 J2)^2 = -(J1^2 + J2^2) + e12 [J1, J2]
        let a = embed(&pauli());
        let sq = a.mul(&a);
        assert!(sq.blade(0).dist_max(&RMat::identity(2).scale(-2.0)) < 1e-15);
        let comm = RMat::from_rows(&[vec![0.0, 2.0], vec![-2.0, 0.0]]);
        assert!(sq.blade(3).dist_max(&comm) < 1e-15);
    }

    #[test]
    fn origin_is_not_in_resolvent_for_pauli() {
        let a = embed(&pauli());
        assert!(!resolvent_membership(&[0.0, 0.0], &a, DEFAULT_COND_MAX).unwrap());
        assert!(resolvent_membership(&[0.3, 0.1], &a, DEFAULT_COND_MAX).unwrap());
    }

    #[test]
    fn inverse_round_trip() {
        let a = embed(&pauli());
        let x = CliffOperator::identity(2, 2).scale(2.0).sub(&a);
        let (y, cond) = op_inverse(&x, DEFAULT_COND_MAX).unwrap();
        assert!(x.mul(&y).dist(&CliffOperator::identity(2, 2)) < 1e-13);
        assert!(y.mul(&x).dist(&CliffOperator::identity(2, 2)) < 1e-13);
        assert!(cond >= 1.0);
    }

    #[test]
    fn symmetric_product_of_single_letter() {
        let t = pauli();
        let m = MultiIndex(vec![1, 0]);
        let p = symmetric_product(&t, &m).unwrap();
        let mut expect = CliffOperator::zero(2, 2);
        *expect.blade_mut(1) = t.mats()[0].clone();
        assert_eq!(p, expect);
    }

    #[test]
    fn monogenic_images_of_nilpotent_pair_vanish_past_degree_one() {
        let t = pauli();
        let b = VBasis::new(2, 4).unwrap();
        let im = monogenic_images(&t, &b).unwrap();
        assert!(im[1].max_abs() > 0.5);
        for op in &im[2..] {
            assert!(op.max_abs() < 1e-14);
        }
    }

    fn diagonal_triple() -> OperatorTuple {
        OperatorTuple::new(vec![
            RMat::diag(&[0.2, -0.1, 0.3]),
            RMat::diag(&[0.1, 0.25, -0.2]),
            RMat::diag(&[-0.3, 0.05, 0.1]),
        ])
        .unwrap()
    }

    fn sample_g3() -> MoebElement {
        let mut w = Multivector::scalar(3, libm::cos(0.4));
        w.set(0b101, libm::sin(0.4));
        MoebElement::new(vec![0.2, -0.3, 0.1], w).unwrap()
    }

    #[test]
    fn modulus_matches_entrywise_scalar_formula() {
        let t = diagonal_triple();
        let g = sample_g3();
        let m = from_uw(&g);
        let p = modulus_power(&g, &t, -2, 1e-10).unwrap();
        for i in 0..3 {
            let x = Multivector::from_vector(&[t.mats()[0][(i, i)], t.mats()[1][(i, i)], t.mats()[2][(i, i)]]);
            let y = &m.a.reversion() - &(&m.c.reversion() * &x);
            let expect = 1.0 / y.norm_sq();
            assert!((p.blade(0)[(i, i)] - expect).abs() < 1e-13);
        }
        assert!(p.max_abs() - p.blade(0).max_abs() <= 0.0);
        let half = modulus_power(&g, &t, -1, 1e-10).unwrap();
        assert!(half.mul(&half).dist(&p) < 1e-13);
    }

    #[test]
    fn modulus_rejects_non_commuting_tuple() {
        let g = MoebElement::translation(vec![0.1, 0.2]).unwrap();
        assert!(matches!(modulus_power(&g, &pauli(), -2, 1e-10), Err(Error::NonCommuting { .. })));
        // the zero exponent needs no commuting tuple
        assert!(modulus_power(&g, &pauli(), 0, 1e-10).is_ok());
    }

    #[test]
    fn rho_commuting_composes() {
        let t = diagonal_triple();
        let g1 = sample_g3();
        let g2 = MoebElement::translation(vec![-0.1, 0.35, 0.2]).unwrap();
        let v = [1.0, -2.0, 0.5];
        let f = |a: &CliffOperator| -> Result<CliffVector> {
            let sq = a.mul(a);
            Ok(sq.add(a).apply(&CliffVector::from_real(3, &v)))
        };
        let inner = |a: &CliffOperator| -> Result<CliffVector> {
            // evaluate rho(g2) f at a point of the orbit, written through its tuple
            let mats: Vec<RMat> = (0..3).map(|j| a.blade(1 << j).clone()).collect();
            let tt = OperatorTuple::new(mats)?;
            rho_commuting(&g2, &tt, &f, DEFAULT_COND_MAX)
        };
        let lhs = rho_commuting(&g1, &t, &inner, DEFAULT_COND_MAX).unwrap();
        let g12 = g1.compose(&g2).unwrap();
        let rhs = rho_commuting(&g12, &t, &f, DEFAULT_COND_MAX).unwrap();
        assert!(lhs.dist(&rhs) < 1e-12, "{}", lhs.dist(&rhs));
    }

    trait DistMax {
        fn dist_max(&self, o: &RMat) -> f64;
    }

    impl DistMax for RMat {
        fn dist_max(&self, o: &RMat) -> f64 {
            (self - o).max_abs()
        }
    }

    #[test]
    fn integral_formula_on_nilpotent_pair() {
        // complexification [[1, i], [i, -1]] squares to zero
        let t = pauli();
        let v = [1.0, 0.0];
        let basis = VBasis::new(2, 2).unwrap();
        let f = SphereFunction::new(2, |x| {
            let mut m = Multivector::scalar(2, 0.5 + x[0]);
            m.set(0b11, -x[1]);
            m
        });
        let quad = QuadratureRule::circle(64);
        let c: Vec<Multivector> =
            (0..basis.len()).map(|m| inner_product(&basis.function(m), &f, &quad).unwrap()).collect();
        let direct = monogenic_calculus(&t, &v, &basis, &c).unwrap();
        let via = integral_formula(&t, &v, &basis, &f, &HardyConfig::default()).unwrap();
        assert!(via.dist(&direct) < 1e-3, "{}", via.dist(&direct));
    }
}
