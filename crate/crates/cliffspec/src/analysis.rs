//! Clifford-valued functions on the unit sphere, the boundary
//! representation of the ball automorphism group, its coherent states and
//! the monogenic polynomial basis.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::clifford::Multivector;
use crate::moebius::{from_uw, MoebElement};
use crate::quadrature::QuadratureRule;
use crate::{Error, Result};

type Eval = dyn Fn(&[f64]) -> Multivector + Send + Sync;

/// A Clifford-valued function on `S^{n-1}` given by an evaluator.
#[derive(Clone)]
pub struct SphereFunction {
    dim: usize,
    eval: Arc<Eval>,
}

impl fmt::Debug for SphereFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SphereFunction(n = {})", self.dim)
    }
}

impl SphereFunction {
    pub fn new(dim: usize, eval: impl Fn(&[f64]) -> Multivector + Send + Sync + 'static) -> Self {
        SphereFunction { dim, eval: Arc::new(eval) }
    }

    pub fn constant(c: Multivector) -> Self {
        let dim = c.dim();
        Self::new(dim, move |_| c.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> Multivector {
        (self.eval)(x)
    }

    pub fn samples(&self, quad: &QuadratureRule) -> Vec<Multivector> {
        quad.nodes().iter().map(|x| self.eval(x)).collect()
    }

    /// `x -> f(x) * c`.
    pub fn right_mul(&self, c: Multivector) -> Self {
        let f = self.clone();
        Self::new(self.dim, move |x| &f.eval(x) * &c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (f, g) = (self.clone(), other.clone());
        Self::new(self.dim, move |x| &f.eval(x) + &g.eval(x))
    }
}

fn check_dims(dim: usize, quad: &QuadratureRule) -> Result<()> {
    if !(2..=3).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    if quad.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: quad.dim() });
    }
    Ok(())
}

/// `<f1, f2> = mean of conj(f1) f2`.
pub fn inner_product(f1: &SphereFunction, f2: &SphereFunction, quad: &QuadratureRule) -> Result<Multivector> {
    if f1.dim != f2.dim {
        return Err(Error::DimensionMismatch { expected: f1.dim, found: f2.dim });
    }
    check_dims(f1.dim, quad)?;
    let mut acc = Multivector::zero(f1.dim);
    for (x, w) in quad.iter() {
        acc += &(&f1.eval(x).conjugation() * &f2.eval(x)).scale(w);
    }
    Ok(acc)
}

pub fn sampled_inner_product(s1: &[Multivector], s2: &[Multivector], quad: &QuadratureRule) -> Multivector {
    let dim = quad.dim();
    let mut acc = Multivector::zero(dim);
    for ((a, b), w) in s1.iter().zip(s2).zip(quad.weights()) {
        acc += &(&a.conjugation() * b).scale(*w);
    }
    acc
}

pub fn l2_norm(f: &SphereFunction, quad: &QuadratureRule) -> Result<f64> {
    Ok(libm::sqrt(inner_product(f, f, quad)?.scalar_part().max(0.0)))
}

/// Kernel factor and argument of the boundary representation at `x`:
/// `(a' - conj(x) b') / |a' - conj(x) b'|^n` and
/// `(conj(a) x - conj(b)) (a* - b* x)^{-1}` for `g = [[a, b'], [b, a']]`.
pub fn rho1_kernel(g: &MoebElement, x: &[f64]) -> (Multivector, Vec<f64>) {
    let m = from_uw(g);
    let n = g.dim();
    let xv = Multivector::from_vector(x);
    let y = &m.d - &(&xv.conjugation() * &m.b);
    let ny = y.norm();
    assert!(ny > 0.0, "singular boundary kernel");
    let factor = y.scale(libm::pow(ny, -(n as f64)));
    let num = &(&m.a.conjugation() * &xv) - &m.c.conjugation();
    let den = &m.a.reversion() - &(&m.c.reversion() * &xv);
    let den_inv = den.conjugation().scale(1.0 / den.norm_sq());
    let arg = (&num * &den_inv).vector_part();
    (factor, arg)
}

/// `rho_1(g) f`.
pub fn rho1_apply(g: &MoebElement, f: &SphereFunction) -> SphereFunction {
    let g = g.clone();
    let f = f.clone();
    SphereFunction::new(g.dim(), move |x| {
        let (k, arg) = rho1_kernel(&g, x);
        &k * &f.eval(&arg)
    })
}

/// Coherent state `f_g = rho_1(g) 1`.
pub fn coherent_state(g: &MoebElement) -> SphereFunction {
    let g = g.clone();
    SphereFunction::new(g.dim(), move |x| rho1_kernel(&g, x).0)
}

/// `Wf(g) = <f_g, f>`.
pub fn wavelet_transform(f: &SphereFunction, g: &MoebElement, quad: &QuadratureRule) -> Result<Multivector> {
    inner_product(&coherent_state(g), f, quad)
}

/// Closed form of the transform of the constant `1`: `w* (1 - |u|^2)^{(n-1)/2}`.
pub fn vacuum_transform(g: &MoebElement) -> Multivector {
    let n = g.dim() as f64;
    let s = 1.0 - g.u.iter().map(|x| x * x).sum::<f64>();
    g.w.reversion().scale(libm::pow(s, 0.5 * (n - 1.0)))
}

/// `(conj(x) - conj(u)) / |x - u|^n`.
pub fn cauchy_kernel(x: &[f64], u: &[f64]) -> Multivector {
    let n = x.len();
    let d: Vec<f64> = x.iter().zip(u).map(|(a, b)| a - b).collect();
    let r2: f64 = d.iter().map(|v| v * v).sum();
    Multivector::from_vector(&d).conjugation().scale(libm::pow(r2, -0.5 * n as f64))
}

/// Error level below which the quadrature is trusted in `cauchy_integral`.
pub const CAUCHY_RESOLUTION: f64 = 1e-8;

/// `mean over x of (conj(x) - conj(u))/|x - u|^n * x * f(x)`.
pub fn cauchy_integral(f: &SphereFunction, u: &[f64], quad: &QuadratureRule) -> Result<Multivector> {
    check_dims(f.dim, quad)?;
    if u.len() != f.dim {
        return Err(Error::DimensionMismatch { expected: f.dim, found: u.len() });
    }
    let norm = libm::sqrt(u.iter().map(|v| v * v).sum());
    if norm >= 1.0 {
        return Err(Error::OutsideBall { norm });
    }
    let limit = quad.resolution_radius(CAUCHY_RESOLUTION);
    if norm > limit {
        return Err(Error::Unresolved(alloc::format!(
            "|u| = {norm} exceeds {limit:.4} for a rule of degree {}",
            quad.degree()
        )));
    }
    let mut acc = Multivector::zero(f.dim);
    for (x, w) in quad.iter() {
        let k = cauchy_kernel(x, u);
        let t = &(&k * &Multivector::from_vector(x)) * &f.eval(x);
        acc += &t.scale(w);
    }
    Ok(acc)
}

/// Multi-index over `n` slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn create(&self, j: usize) -> Self {
        let mut m = self.clone();
        m.0[j] += 1;
        m
    }

    pub fn annihilate(&self, j: usize) -> Option<Self> {
        if self.0[j] == 0 {
            return None;
        }
        let mut m = self.clone();
        m.0[j] -= 1;
        Some(m)
    }

    /// Annihilation with its weight `m_j`; at `m_j = 0` the weight is zero
    /// and the index is returned unchanged.
    pub fn lower(&self, j: usize) -> (Self, usize) {
        match self.annihilate(j) {
            Some(m) => (m, self.0[j]),
            None => (self.clone(), 0),
        }
    }

    /// `|m|! / m!`.
    pub fn multinomial(&self) -> f64 {
        let mut r = 1.0;
        let mut k = 0usize;
        for &mi in &self.0 {
            for i in 1..=mi {
                k += 1;
                r = r * k as f64 / i as f64;
            }
        }
        r
    }

    /// The word `(j, ..., j, ...)` listing each slot `m_j` times.
    pub fn word(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.degree());
        for (j, &mj) in self.0.iter().enumerate() {
            w.extend(core::iter::repeat_n(j, mj));
        }
        w
    }

    /// All multi-indices of the given degree, lexicographically descending.
    pub fn of_degree(n: usize, k: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = vec![0; n];
        fill(&mut out, &mut cur, 0, k);
        out
    }
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<usize>, slot: usize, left: usize) {
    if slot + 1 == cur.len() {
        cur[slot] = left;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for v in (0..=left).rev() {
        cur[slot] = v;
        fill(out, cur, slot + 1, left - v);
    }
    cur[slot] = 0;
}

/// Distinct arrangements of a multiset word, in lexicographic order.
pub fn distinct_arrangements(word: &[usize]) -> Vec<Vec<usize>> {
    let mut w = word.to_vec();
    w.sort_unstable();
    let mut out = vec![w.clone()];
    // next lexicographic permutation
    while let Some(i) = (0..w.len().saturating_sub(1)).rev().find(|&i| w[i] < w[i + 1]) {
        let j = (i + 1..w.len()).rev().find(|&j| w[j] > w[i]).unwrap_or(i + 1);
        w.swap(i, j);
        w[i + 1..].reverse();
        out.push(w.clone());
    }
    out
}

/// Average of the products over distinct arrangements of `m`'s word, with
/// letter `j` replaced by `vars[j]`.
pub fn symmetrized_product<T: Clone>(
    m: &MultiIndex,
    vars: &[T],
    one: T,
    mul: impl Fn(&T, &T) -> T,
    add: impl Fn(&T, &T) -> T,
    scale: impl Fn(&T, f64) -> T,
) -> T {
    let arrangements = distinct_arrangements(&m.word());
    let count = arrangements.len() as f64;
    let mut acc: Option<T> = None;
    for a in arrangements {
        let mut p = one.clone();
        for &j in &a {
            p = mul(&p, &vars[j]);
        }
        acc = Some(match acc {
            None => p,
            Some(s) => add(&s, &p),
        });
    }
    scale(&acc.unwrap_or(one), 1.0 / count)
}

/// Hypercomplex variables `z_j = x_j + e_1 e_j x_1` for slots `1..n`; slot 0
/// is zero. Each is annihilated by `sum_j e_j d/dx_j`.
pub fn fueter_variables(x: &[f64]) -> Vec<Multivector> {
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    out.push(Multivector::zero(n));
    for j in 1..n {
        let mut z = Multivector::scalar(n, x[j]);
        // e_1 e_{j+1} as a blade with positive orientation
        z.set(1 | (1 << j), x[0]);
        out.push(z);
    }
    out
}

fn fueter_product(m: &MultiIndex, x: &[f64]) -> Multivector {
    let n = x.len();
    let vars = fueter_variables(x);
    symmetrized_product(m, &vars, Multivector::one(n), |a, b| a * b, |a, b| a + b, |a, s| a.scale(s))
}

/// Orthonormal monogenic polynomial basis `V_m` up to a maximal degree.
/// Each `V_m` is a sum of symmetrized Fueter products with right Clifford
/// coefficients.
#[derive(Clone, Debug)]
pub struct VBasis {
    dim: usize,
    max_degree: usize,
    indices: Vec<MultiIndex>,
    combos: Vec<Vec<(MultiIndex, Multivector)>>,
}

/// Highest degree supported by the symmetrized products.
pub const MAX_BASIS_DEGREE: usize = 12;

impl VBasis {
    pub fn new(dim: usize, max_degree: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if max_degree > MAX_BASIS_DEGREE {
            return Err(Error::InvalidInput(alloc::format!("degree {max_degree} exceeds {MAX_BASIS_DEGREE}")));
        }
        let mut indices = Vec::new();
        let mut combos = Vec::new();
        for k in 0..=max_degree {
            let quad = match dim {
                2 => QuadratureRule::circle(2 * k + 4),
                _ => QuadratureRule::sphere(2 * k + 2),
            };
            let degree_indices: Vec<MultiIndex> = MultiIndex::of_degree(dim - 1, k)
                .into_iter()
                .map(|m| {
                    let mut v = vec![0];
                    v.extend(m.0);
                    MultiIndex(v)
                })
                .collect();
            let raw: Vec<Vec<Multivector>> =
                degree_indices.iter().map(|m| quad.nodes().iter().map(|x| fueter_product(m, x)).collect()).collect();
            // Gram-Schmidt with right coefficients
            let mut done: Vec<(Vec<Multivector>, Vec<Multivector>)> = Vec::new();
            for (i, m) in degree_indices.iter().enumerate() {
                let mut coeffs = vec![Multivector::zero(dim); degree_indices.len()];
                coeffs[i] = Multivector::one(dim);
                let mut samples = raw[i].clone();
                for (s_j, c_j) in &done {
                    let p = sampled_inner_product(s_j, &samples, &quad);
                    for (s, t) in samples.iter_mut().zip(s_j) {
                        *s = &*s - &(t * &p);
                    }
                    for (c, t) in coeffs.iter_mut().zip(c_j) {
                        *c = &*c - &(t * &p);
                    }
                }
                let nn = sampled_inner_product(&samples, &samples, &quad).scalar_part();
                if nn <= 1e-24 {
                    return Err(Error::NoConvergence("degenerate monogenic basis".into()));
                }
                let s = 1.0 / libm::sqrt(nn);
                let samples: Vec<Multivector> = samples.iter().map(|v| v.scale(s)).collect();
                let coeffs: Vec<Multivector> = coeffs.iter().map(|v| v.scale(s)).collect();
                done.push((samples, coeffs));
                indices.push(m.clone());
            }
            for (_, c) in done {
                combos.push(degree_indices.iter().cloned().zip(c).filter(|(_, c)| c.max_abs() > 0.0).collect());
            }
        }
        Ok(VBasis { dim, max_degree, indices, combos })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, m: &MultiIndex) -> Option<usize> {
        self.indices.iter().position(|x| x == m)
    }

    /// `V_m` as `sum over m' of P_{m'} c_{m'}` with `P` symmetrized Fueter products.
    pub fn combination(&self, i: usize) -> &[(MultiIndex, Multivector)] {
        &self.combos[i]
    }

    pub fn eval(&self, i: usize, x: &[f64]) -> Multivector {
        let mut acc = Multivector::zero(self.dim);
        for (m, c) in &self.combos[i] {
            acc += &(&fueter_product(m, x) * c);
        }
        acc
    }

    pub fn function(&self, i: usize) -> SphereFunction {
        let b = self.clone();
        SphereFunction::new(self.dim, move |x| b.eval(i, x))
    }
}

fn validate_index(m: &MultiIndex) -> Result<()> {
    let n = m.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    if m.0[0] != 0 {
        return Err(Error::InvalidInput("the first slot of a basis index must be zero".into()));
    }
    if m.degree() > MAX_BASIS_DEGREE {
        return Err(Error::InvalidInput(alloc::format!("degree exceeds {MAX_BASIS_DEGREE}")));
    }
    Ok(())
}

/// The basis function `V_m`.
pub fn v_basis(m: &MultiIndex) -> Result<SphereFunction> {
    validate_index(m)?;
    let basis = VBasis::new(m.dim(), m.degree())?;
    let i = basis.position(m).ok_or_else(|| Error::InvalidInput("unknown index".into()))?;
    Ok(basis.function(i))
}

/// Matrix of `rho_1(g)` on the truncated basis: column `k` holds the
/// coefficients of `rho_1(g) V_k`, so entry `(m, k)` is `<V_m, rho_1(g) V_k>`.
#[derive(Clone, Debug)]
pub struct TokenMatrix {
    pub size: usize,
    pub entries: Vec<Multivector>,
}

impl TokenMatrix {
    pub fn get(&self, m: usize, k: usize) -> &Multivector {
        &self.entries[m * self.size + k]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.size;
        let dim = self.entries[0].dim();
        let mut entries = vec![Multivector::zero(dim); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Multivector::zero(dim);
                for k in 0..n {
                    acc += &(self.get(i, k) * o.get(k, j));
                }
                entries[i * n + j] = acc;
            }
        }
        TokenMatrix { size: n, entries }
    }

    /// `d_m = sum_k T_{m,k} c_k`.
    pub fn apply(&self, c: &[Multivector]) -> Vec<Multivector> {
        let dim = self.entries[0].dim();
        (0..self.size)
            .map(|m| {
                let mut acc = Multivector::zero(dim);
                for (k, ck) in c.iter().enumerate().take(self.size) {
                    acc += &(self.get(m, k) * ck);
                }
                acc
            })
            .collect()
    }
}

/// Tokens of `g` on a truncated basis.
pub fn token_matrix(basis: &VBasis, g: &MoebElement, quad: &QuadratureRule) -> Result<TokenMatrix> {
    check_dims(basis.dim, quad)?;
    if g.dim() != basis.dim {
        return Err(Error::DimensionMismatch { expected: basis.dim, found: g.dim() });
    }
    let n = basis.len();
    let mut vm = Vec::with_capacity(n);
    let mut gk = Vec::with_capacity(n);
    let kernels: Vec<(Multivector, Vec<f64>)> = quad.nodes().iter().map(|x| rho1_kernel(g, x)).collect();
    for i in 0..n {
        vm.push(quad.nodes().iter().map(|x| basis.eval(i, x)).collect::<Vec<_>>());
        gk.push(kernels.iter().map(|(k, arg)| k * &basis.eval(i, arg)).collect::<Vec<_>>());
    }
    let mut entries = Vec::with_capacity(n * n);
    for m in 0..n {
        for k in 0..n {
            entries.push(sampled_inner_product(&vm[m], &gk[k], quad));
        }
    }
    Ok(TokenMatrix { size: n, entries })
}

/// `W_{k,m}(g) = <V_m, rho_1(g) V_k>`.
pub fn token_coeff(k: &MultiIndex, m: &MultiIndex, g: &MoebElement, quad: &QuadratureRule) -> Result<Multivector> {
    validate_index(k)?;
    validate_index(m)?;
    let vk = v_basis(k)?;
    let vm = v_basis(m)?;
    inner_product(&vm, &rho1_apply(g, &vk), quad)
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
    fn coherent_state_at_identity_is_one() {
        let g = MoebElement::identity(3);
        let f = coherent_state(&g);
        assert!(f.eval(&[0.0, 0.6, 0.8]).approx_eq(&Multivector::one(3), 1e-15));
    }

    #[test]
    fn vacuum_matches_quadrature() {
        let quad = QuadratureRule::circle(256);
        let g = MoebElement::new(vec![0.3, -0.4], rot2(0.4)).unwrap();
        let w = wavelet_transform(&SphereFunction::constant(Multivector::one(2)), &g, &quad).unwrap();
        assert!(w.dist(&vacuum_transform(&g)) < 1e-12);
    }

    #[test]
    fn cauchy_reproduces_constants() {
        let quad = QuadratureRule::circle(128);
        let one = SphereFunction::constant(Multivector::one(2));
        let v = cauchy_integral(&one, &[0.2, 0.3], &quad).unwrap();
        assert!(v.approx_eq(&Multivector::one(2), 1e-13));
        assert!(matches!(cauchy_integral(&one, &[0.999, 0.0], &quad), Err(Error::Unresolved(_))));
    }

    #[test]
    fn fueter_variables_are_monogenic() {
        // D z = sum_j e_j dz/dx_j by central differences
        let x = [0.3, -0.2, 0.5];
        let h = 1e-6;
        for j in 1..3 {
            let mut acc = Multivector::zero(3);
            for i in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                let d = (&fueter_variables(&xp)[j] - &fueter_variables(&xm)[j]).scale(0.5 / h);
                acc += &(&Multivector::basis_vector(3, i) * &d);
            }
            assert!(acc.max_abs() < 1e-9);
        }
    }

    #[test]
    fn basis_is_orthonormal_in_three_dimensions() {
        let b = VBasis::new(3, 3).unwrap();
        assert_eq!(b.len(), 1 + 2 + 3 + 4);
        let quad = QuadratureRule::sphere(12);
        for i in 0..b.len() {
            for j in 0..b.len() {
                let p = inner_product(&b.function(i), &b.function(j), &quad).unwrap();
                let expect = if i == j { Multivector::one(3) } else { Multivector::zero(3) };
                assert!(p.dist(&expect) < 1e-12, "({i},{j}) -> {p}");
            }
        }
    }

    #[test]
    fn arrangements_of_multiset() {
        assert_eq!(distinct_arrangements(&[0, 0, 1]).len(), 3);
        assert_eq!(distinct_arrangements(&[2, 1, 0]).len(), 6);
        assert_eq!(distinct_arrangements(&[]).len(), 1);
    }

    #[test]
    fn index_operators() {
        let m = MultiIndex(vec![0, 2, 1]);
        assert_eq!(m.create(2), MultiIndex(vec![0, 2, 2]));
        assert_eq!(m.annihilate(0), None);
        assert_eq!(m.annihilate(1), Some(MultiIndex(vec![0, 1, 1])));
        assert_eq!(m.multinomial(), 3.0);
        assert_eq!(MultiIndex::of_degree(2, 2).len(), 3);
        assert_eq!(m.lower(0), (m.clone(), 0));
        // [a^-, a^+] is the identity on weights
        for j in 0..3 {
            let down_up = m.create(j).lower(j).1;
            let up_down = m.lower(j).1;
            assert_eq!(down_up - up_down, 1);
        }
    }

    #[test]
    fn creation_chain_reaches_basis_indices() {
        let basis = VBasis::new(3, 3).unwrap();
        for m in basis.indices() {
            let mut k = MultiIndex::zero(3);
            for (j, &mj) in m.0.iter().enumerate() {
                for _ in 0..mj {
                    k = k.create(j);
                }
            }
            assert_eq!(&k, m);
        }
    }

    #[test]
    fn rotation_tokens_are_diagonal() {
        let quad = QuadratureRule::circle(64);
        let g = MoebElement::rotation(rot2(0.8)).unwrap();
        let b = VBasis::new(2, 4).unwrap();
        let t = token_matrix(&b, &g, &quad).unwrap();
        for m in 0..t.size {
            for k in 0..t.size {
                let e = t.get(m, k);
                if m == k {
                    assert!((e.norm() - 1.0).abs() < 1e-13);
                } else {
                    assert!(e.norm() < 1e-13);
                }
            }
        }
    }
}
