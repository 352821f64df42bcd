//! Jet-labelled joint spectrum of a pair of symmetric matrices.
//!
//! The pair `(A1, A2)` is studied through its complexification
//! `A1 + i A2`, with `i = e2 e1`. Every Jordan block of length `L` at `u`
//! contributes the points `(u, 0), .., (u, L - 1)`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use core::fmt;

use num_complex::Complex64;

use crate::analysis::{inner_product, token_matrix, SphereFunction, VBasis};
use crate::calculus::{
    embed, moebius_on_operator, monogenic_calculus, resolvent, CliffOperator, CliffVector, OperatorTuple,
    DEFAULT_COND_MAX,
};
use crate::clifford::Multivector;
use crate::linalg::{inverse_with_condition, schur, singular_values, swap_schur, CMat, RMat, Schur};
use crate::moebius::{from_uw, MoebElement};
use crate::quadrature::QuadratureRule;
use crate::{Error, Result};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `A1 + i A2`.
pub fn complexify(t: &OperatorTuple) -> Result<CMat> {
    if t.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: t.dim() });
    }
    let (a1, a2) = (&t.mats()[0], &t.mats()[1]);
    Ok(CMat::from_fn(t.size(), t.size(), |i, j| Complex64::new(a1[(i, j)], a2[(i, j)])))
}

/// Splits a complex matrix into the real and imaginary parts; both are
/// symmetric exactly when the matrix is complex symmetric.
pub fn decomplexify(m: &CMat) -> Result<OperatorTuple> {
    OperatorTuple::new(vec![m.re(), m.im()])
}

/// Tolerances for [`jordan_structure`]. Both are relative to `max(1, |M|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JordanTolerances {
    /// Eigenvalues closer than this are merged into one cluster.
    pub cluster_tol: f64,
    /// Singular values of `N^j` below `rank_tol * max(1, |M|)^j` count as zero.
    pub rank_tol: f64,
    /// Smallest accepted ratio between the closest pair of distinct clusters
    /// and the widest cluster.
    pub gap_ratio: f64,
}

impl Default for JordanTolerances {
    fn default() -> Self {
        JordanTolerances { cluster_tol: 2e-2, rank_tol: 1e-8, gap_ratio: 10.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JordanCluster {
    pub lambda: Complex64,
    /// Block lengths, descending.
    pub sizes: Vec<usize>,
    /// Largest distance between computed eigenvalues of the cluster.
    pub spread: f64,
}

impl JordanCluster {
    pub fn multiplicity(&self) -> usize {
        self.sizes.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JordanStructure {
    pub clusters: Vec<JordanCluster>,
}

impl JordanStructure {
    pub fn dim(&self) -> usize {
        self.clusters.iter().map(JordanCluster::multiplicity).sum()
    }
}

struct Edge {
    a: usize,
    b: usize,
    len: f64,
}

/// Prim's minimum spanning tree on eigenvalues in the plane.
fn spanning_tree(z: &[Complex64]) -> Vec<Edge> {
    let n = z.len();
    let mut inside = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    if n == 0 {
        return edges;
    }
    inside[0] = true;
    for j in 1..n {
        best[j] = ((z[j] - z[0]).norm(), 0);
    }
    for _ in 1..n {
        let mut k = usize::MAX;
        for j in 0..n {
            if !inside[j] && (k == usize::MAX || best[j].0 < best[k].0) {
                k = j;
            }
        }
        inside[k] = true;
        edges.push(Edge { a: best[k].1, b: k, len: best[k].0 });
        for j in 0..n {
            if !inside[j] {
                let d = (z[j] - z[k]).norm();
                if d < best[j].0 {
                    best[j] = (d, k);
                }
            }
        }
    }
    edges
}

fn components(n: usize, edges: &[&Edge]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in edges {
        let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = vec![0; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        out[i] = label[r];
    }
    out
}

/// Reorders the Schur form so that labels appear in ascending order along
/// the diagonal. Only eigenvalues with different labels are swapped.
fn sort_schur(s: &mut Schur, labels: &mut [usize]) {
    let n = labels.len();
    let mut p = 0;
    let max_label = labels.iter().copied().max().unwrap_or(0);
    for l in 0..=max_label {
        while p < n {
            let Some(k) = (p..n).find(|&k| labels[k] == l) else { break };
            for j in (p..k).rev() {
                swap_schur(s, j);
                labels.swap(j, j + 1);
            }
            p += 1;
        }
    }
}

/// `None` when a singular value is not finite.
fn rank(m: &CMat, thr: f64) -> Option<usize> {
    let sv = singular_values(m);
    sv.iter().all(|s| s.is_finite()).then(|| sv.iter().filter(|&&s| s > thr).count())
}

/// Weyr characteristic of `n` (assumed nilpotent up to `thr`): entry `j`
/// is `rank(n^j) - rank(n^{j+1})`.
fn weyr(n: &CMat, scale: f64, rank_tol: f64) -> Option<Vec<usize>> {
    let mu = n.rows();
    let mut ranks = vec![mu];
    let mut p = CMat::identity(mu);
    for j in 1..=mu {
        p = p.matmul(n);
        let r = rank(&p, rank_tol * libm::pow(scale, j as f64))?;
        ranks.push(r);
        if r == 0 {
            break;
        }
    }
    if *ranks.last().unwrap() != 0 {
        return None;
    }
    let w: Vec<usize> = ranks.windows(2).map(|x| x[0].saturating_sub(x[1])).collect();
    if ranks.windows(2).any(|x| x[1] > x[0]) || w.windows(2).any(|x| x[1] > x[0]) {
        return None;
    }
    Some(w)
}

/// Block lengths from a Weyr characteristic: the number of blocks of length
/// at least `j + 1` is `w[j]`.
fn block_sizes(w: &[usize]) -> Vec<usize> {
    let mut sizes = Vec::new();
    for j in 0..w.len() {
        let next = w.get(j + 1).copied().unwrap_or(0);
        for _ in 0..(w[j] - next) {
            sizes.push(j + 1);
        }
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Clustered eigenvalues and the Schur form reordered cluster by cluster.
pub struct ClusteredSchur {
    pub schur: Schur,
    /// Cluster label of each diagonal position of `schur.t`.
    pub labels: Vec<usize>,
    pub structure: JordanStructure,
}

impl ClusteredSchur {
    /// Diagonal ranges `(start, len)` of the clusters, in label order.
    pub fn ranges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (i, &l) in self.labels.iter().enumerate() {
            if l == out.len() {
                out.push((i, 1));
            } else {
                out[l].1 += 1;
            }
        }
        out
    }
}

fn cluster_block(s: &Schur, members: &[usize]) -> CMat {
    let mut s = s.clone();
    let mut flags: Vec<usize> = (0..s.t.rows()).map(|i| if members.contains(&i) { 0 } else { 1 }).collect();
    sort_schur(&mut s, &mut flags);
    let mu = members.len();
    s.t.block(0, 0, mu, mu)
}

/// Clusters the spectrum and recovers the Jordan block lengths of each
/// cluster from the ranks of powers of its nilpotent part.
pub fn clustered_schur(m: &CMat, tol: &JordanTolerances) -> Result<ClusteredSchur> {
    if !m.is_square() {
        return Err(Error::InvalidInput(String::from("matrix is not square")));
    }
    let d = m.rows();
    let s = schur(m)?;
    let z: Vec<Complex64> = (0..d).map(|i| s.t[(i, i)]).collect();
    let scale = m.spectral_norm().max(1.0);
    let tree = spanning_tree(&z);
    let mut cut = vec![false; tree.len()];
    for (i, e) in tree.iter().enumerate() {
        cut[i] = e.len > tol.cluster_tol * scale;
    }
    let mut results: Vec<(Vec<usize>, Vec<usize>)>;
    loop {
        let kept: Vec<&Edge> = tree.iter().zip(&cut).filter(|(_, &c)| !c).map(|(e, _)| e).collect();
        let labels = components(d, &kept);
        let count = labels.iter().copied().max().map_or(0, |x| x + 1);
        results = Vec::with_capacity(count);
        let mut split = None;
        for l in 0..count {
            let members: Vec<usize> = (0..d).filter(|&i| labels[i] == l).collect();
            let block = cluster_block(&s, &members);
            let lambda = members.iter().map(|&i| z[i]).sum::<Complex64>() / c(members.len() as f64);
            let n = &block - &CMat::identity(members.len()).scale(lambda);
            match weyr(&n, scale, tol.rank_tol) {
                Some(w) => results.push((members, w)),
                None => {
                    if members.len() == 1 {
                        return Err(Error::Ambiguity(String::from("singleton cluster failed the rank test")));
                    }
                    // the widest internal edge of this cluster goes first
                    let widest = tree
                        .iter()
                        .enumerate()
                        .filter(|(i, e)| !cut[*i] && labels[e.a] == l)
                        .max_by(|x, y| x.1.len.total_cmp(&y.1.len))
                        .map(|(i, _)| i);
                    split = widest;
                    break;
                }
            }
        }
        match split {
            Some(i) => cut[i] = true,
            None => break,
        }
    }
    let inner = tree.iter().zip(&cut).filter(|(_, &c)| !c).map(|(e, _)| e.len).fold(0.0, f64::max);
    let outer = tree.iter().zip(&cut).filter(|(_, &c)| c).map(|(e, _)| e.len).fold(f64::INFINITY, f64::min);
    if inner > 0.0 && outer < tol.gap_ratio * inner {
        return Err(Error::Ambiguity(format!(
            "clusters of width {inner:.3e} are only {outer:.3e} apart; candidate clusterings: \
             merge at {outer:.3e} or split at {inner:.3e}"
        )));
    }
    // deterministic cluster order: by real part, then imaginary part
    let mut order: Vec<usize> = (0..results.len()).collect();
    let lambdas: Vec<Complex64> =
        results.iter().map(|(mem, _)| mem.iter().map(|&i| z[i]).sum::<Complex64>() / c(mem.len() as f64)).collect();
    order.sort_by(|&a, &b| lambdas[a].re.total_cmp(&lambdas[b].re).then(lambdas[a].im.total_cmp(&lambdas[b].im)));
    let mut labels = vec![0; d];
    let mut clusters = Vec::with_capacity(results.len());
    for (new, &old) in order.iter().enumerate() {
        let (mem, w) = &results[old];
        for &i in mem {
            labels[i] = new;
        }
        let spread = mem
            .iter()
            .flat_map(|&i| mem.iter().map(move |&j| (i, j)))
            .map(|(i, j)| (z[i] - z[j]).norm())
            .fold(0.0, f64::max);
        clusters.push(JordanCluster { lambda: lambdas[old], sizes: block_sizes(w), spread });
    }
    let mut s = s;
    sort_schur(&mut s, &mut labels);
    Ok(ClusteredSchur { schur: s, labels, structure: JordanStructure { clusters } })
}

pub fn jordan_structure(m: &CMat, tol: &JordanTolerances) -> Result<JordanStructure> {
    Ok(clustered_schur(m, tol)?.structure)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint {
    pub u: Complex64,
    pub k: usize,
}

/// Multiset of `(u, k)` pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JointSpectrum {
    pub points: Vec<SpectralPoint>,
}

impl JointSpectrum {
    pub fn from_structure(s: &JordanStructure) -> Self {
        let mut points = Vec::new();
        for cl in &s.clusters {
            for &len in &cl.sizes {
                for k in 0..len {
                    points.push(SpectralPoint { u: cl.lambda, k });
                }
            }
        }
        let mut out = JointSpectrum { points };
        out.sort();
        out
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn sort(&mut self) {
        self.points.sort_by(|a, b| a.u.re.total_cmp(&b.u.re).then(a.u.im.total_cmp(&b.u.im)).then(a.k.cmp(&b.k)));
    }

    /// Distinct eigenvalues with algebraic multiplicities: the projection to
    /// the plane.
    pub fn classical(&self, tol: f64) -> Vec<(Complex64, usize)> {
        let mut out: Vec<(Complex64, usize)> = Vec::new();
        for p in self.points.iter().filter(|p| p.k == 0) {
            match out.iter_mut().find(|(u, _)| (*u - p.u).norm() <= tol) {
                Some(e) => e.1 += 1,
                None => out.push((p.u, 1)),
            }
        }
        // multiplicity counts every jet level below each base point
        for (u, m) in out.iter_mut() {
            *m = self.points.iter().filter(|p| (p.u - *u).norm() <= tol).count();
        }
        out
    }

    /// Heights of the stacks at each distinct site, i.e. `1 + max k`
    /// summed per block; sites follow [`classical`](Self::classical).
    pub fn stack_heights(&self, tol: f64) -> Vec<(Complex64, usize)> {
        self.classical(tol)
            .into_iter()
            .map(|(u, _)| {
                let h = self.points.iter().filter(|p| (p.u - u).norm() <= tol).map(|p| p.k + 1).max().unwrap_or(0);
                (u, h)
            })
            .collect()
    }

    /// Largest point distance of the best matching, or `None` when no
    /// matching within `tol` exists.
    pub fn match_distance(&self, other: &Self, tol: f64) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        let mut used = vec![false; other.len()];
        let mut worst = 0.0f64;
        for p in &self.points {
            let mut best: Option<(usize, f64)> = None;
            for (j, q) in other.points.iter().enumerate() {
                if used[j] || q.k != p.k {
                    continue;
                }
                let d = (q.u - p.u).norm();
                if d <= tol && best.is_none_or(|(_, b)| d < b) {
                    best = Some((j, d));
                }
            }
            let (j, d) = best?;
            used[j] = true;
            worst = worst.max(d);
        }
        Some(worst)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.match_distance(other, tol).is_some()
    }
}

pub fn joint_spectrum_of_matrix(m: &CMat, tol: &JordanTolerances) -> Result<JointSpectrum> {
    Ok(JointSpectrum::from_structure(&jordan_structure(m, tol)?))
}

pub fn joint_spectrum(t: &OperatorTuple, tol: &JordanTolerances) -> Result<JointSpectrum> {
    joint_spectrum_of_matrix(&complexify(t)?, tol)
}

/// `J_L(lambda)`: `lambda` on the diagonal, ones above it.
pub fn jordan_block(len: usize, lambda: Complex64) -> CMat {
    CMat::from_fn(len, len, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            c(1.0)
        } else {
            c(0.0)
        }
    })
}

/// A complex symmetric matrix similar to `J_L(lambda)`, namely
/// `Q J Q^{-1}` with `Q = (I + iK)/sqrt 2` and `K` the reversal.
pub fn symmetric_jordan_block(len: usize, lambda: Complex64) -> CMat {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let q = CMat::from_fn(len, len, |i, j| {
        let mut z = c(0.0);
        if i == j {
            z += c(h);
        }
        if i + j + 1 == len {
            z += Complex64::new(0.0, h);
        }
        z
    });
    // Q is unitary
    q.matmul(&jordan_block(len, lambda)).matmul(&q.adjoint())
}

/// Pair whose complexification is the direct sum of the given blocks,
/// each realised through [`symmetric_jordan_block`].
pub fn jordan_tuple(blocks: &[(usize, Complex64)]) -> Result<OperatorTuple> {
    let parts: Vec<CMat> = blocks.iter().map(|&(l, u)| symmetric_jordan_block(l, u)).collect();
    decomplexify(&CMat::block_diag(&parts))
}

/// `(diag(1, -1), sigma_1)`.
pub fn pauli_pair() -> OperatorTuple {
    OperatorTuple::new(vec![
        RMat::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]),
        RMat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
    ])
    .expect("symmetric")
}

/// Eigenvalues of the four-block example, in block order.
pub fn fig1_eigenvalues() -> [Complex64; 4] {
    use core::f64::consts::PI;
    [
        Complex64::from_polar(0.75, PI / 4.0),
        Complex64::from_polar(2.0 / 3.0, 5.0 * PI / 6.0),
        Complex64::from_polar(0.4, -3.0 * PI / 4.0),
        Complex64::from_polar(0.6, -PI / 3.0),
    ]
}

/// Block lengths of the four-block example.
pub const FIG1_BLOCKS: [usize; 4] = [3, 4, 1, 2];

/// `J3(u1) + J4(u2) + J1(u3) + J2(u4)` as a complex matrix.
pub fn fig1_matrix() -> CMat {
    let u = fig1_eigenvalues();
    let parts: Vec<CMat> = FIG1_BLOCKS.iter().zip(&u).map(|(&l, &z)| jordan_block(l, z)).collect();
    CMat::block_diag(&parts)
}

/// Symmetric pair realising [`fig1_matrix`] up to similarity.
pub fn fig1_tuple() -> OperatorTuple {
    let u = fig1_eigenvalues();
    let blocks: Vec<(usize, Complex64)> = FIG1_BLOCKS.iter().copied().zip(u).collect();
    jordan_tuple(&blocks).expect("symmetric")
}

type TaylorFn = dyn Fn(Complex64, usize) -> Vec<Complex64> + Send + Sync;

/// Holomorphic map of the disk, given through its Taylor data.
#[derive(Clone)]
pub enum HoloMap {
    /// Coefficients in ascending order.
    Polynomial(Vec<Complex64>),
    /// `(a z + b) / (c z + d)`.
    Fractional { a: Complex64, b: Complex64, c: Complex64, d: Complex64 },
    /// Returns the Taylor coefficients `t_0..=t_order` at the given point.
    Custom(Arc<TaylorFn>),
}

impl fmt::Debug for HoloMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HoloMap::Polynomial(p) => f.debug_tuple("Polynomial").field(p).finish(),
            HoloMap::Fractional { a, b, c, d } => {
                f.debug_struct("Fractional").field("a", a).field("b", b).field("c", c).field("d", d).finish()
            }
            HoloMap::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl HoloMap {
    pub fn identity() -> Self {
        HoloMap::Polynomial(vec![c(0.0), c(1.0)])
    }

    pub fn custom(f: impl Fn(Complex64, usize) -> Vec<Complex64> + Send + Sync + 'static) -> Self {
        HoloMap::Custom(Arc::new(f))
    }

    /// Disk automorphism `e^{i theta} (z - p) / (1 - conj(p) z)`.
    pub fn blaschke(p: Complex64, theta: f64) -> Self {
        let rot = Complex64::from_polar(1.0, theta);
        HoloMap::Fractional { a: rot, b: -rot * p, c: -p.conj(), d: c(1.0) }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            HoloMap::Polynomial(p) => p.iter().rev().fold(c(0.0), |acc, &a| acc * z + a),
            HoloMap::Fractional { a, b, c, d } => (a * z + b) / (c * z + d),
            HoloMap::Custom(f) => f(z, 0)[0],
        }
    }

    /// `t_j = phi^(j)(u) / j!` for `j = 0..=order`.
    pub fn taylor(&self, u: Complex64, order: usize) -> Vec<Complex64> {
        match self {
            HoloMap::Polynomial(p) => {
                // repeated synthetic division by (z - u)
                let mut q = p.clone();
                let mut out = Vec::with_capacity(order + 1);
                for _ in 0..=order {
                    if q.is_empty() {
                        out.push(c(0.0));
                        continue;
                    }
                    let mut carry = c(0.0);
                    for a in q.iter_mut().rev() {
                        let next = *a + carry * u;
                        *a = carry;
                        carry = next;
                    }
                    out.push(carry);
                    q.pop();
                }
                out
            }
            HoloMap::Fractional { a, b, c: cc, d } => {
                let den = cc * u + d;
                let det = a * d - b * cc;
                let mut out = vec![(a * u + b) / den];
                let mut pw = c(1.0);
                for _ in 1..=order {
                    out.push(det * pw / (den * den * libm_powc(den, out.len() - 1)));
                    pw *= -cc;
                }
                out
            }
            HoloMap::Custom(f) => {
                let mut t = f(u, order);
                t.resize(order + 1, c(0.0));
                t
            }
        }
    }

    /// `phi^(j)(u)` for `j = 0..=order`.
    pub fn derivatives(&self, u: Complex64, order: usize) -> Vec<Complex64> {
        let mut f = 1.0;
        self.taylor(u, order)
            .into_iter()
            .enumerate()
            .map(|(j, t)| {
                if j > 1 {
                    f *= j as f64;
                }
                t * f
            })
            .collect()
    }

    /// Largest `|phi|` over a polar grid of the closed disk, for the
    /// advisory `phi(D) in D` check.
    pub fn max_on_disk(&self, rings: usize, spokes: usize) -> f64 {
        let mut m = 0.0f64;
        for r in 0..=rings {
            let rad = r as f64 / rings.max(1) as f64;
            for k in 0..spokes.max(1) {
                let t = 2.0 * core::f64::consts::PI * k as f64 / spokes.max(1) as f64;
                m = m.max(self.eval(Complex64::from_polar(rad, t)).norm());
            }
        }
        m
    }
}

fn libm_powc(z: Complex64, k: usize) -> Complex64 {
    (0..k).fold(c(1.0), |acc, _| acc * z)
}

/// Default relative threshold for [`deg_of_zero`].
pub const DERIV_TOL: f64 = 1e-9;
/// Default highest order examined by [`deg_of_zero`].
pub const MAX_ZERO_ORDER: usize = 16;

/// Order of the zero of `phi(z) - phi(u)` at `u`: the first Taylor
/// coefficient above `deriv_tol` times the largest coefficient of orders
/// `0..=max_order`.
pub fn deg_of_zero(phi: &HoloMap, u: Complex64, deriv_tol: f64, max_order: usize) -> Result<usize> {
    let t = phi.taylor(u, max_order);
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let thr = deriv_tol * scale;
    (1..=max_order).find(|&j| t[j].norm() > thr && t[j].norm() > 0.0).ok_or(Error::FlatMap { at: (u.re, u.im) })
}

/// `(u, k) -> (phi(u), floor(k / deg_u phi))`.
pub fn spectral_map(s: &JointSpectrum, phi: &HoloMap, deriv_tol: f64, max_order: usize) -> Result<JointSpectrum> {
    let mut cache: Vec<(Complex64, Complex64, usize)> = Vec::new();
    let mut points = Vec::with_capacity(s.len());
    for p in &s.points {
        let (fu, deg) = match cache.iter().find(|(u, _, _)| *u == p.u) {
            Some(&(_, fu, deg)) => (fu, deg),
            None => {
                let deg = deg_of_zero(phi, p.u, deriv_tol, max_order)?;
                let fu = phi.eval(p.u);
                cache.push((p.u, fu, deg));
                (fu, deg)
            }
        };
        points.push(SpectralPoint { u: fu, k: p.k / deg });
    }
    let mut out = JointSpectrum { points };
    out.sort();
    Ok(out)
}

/// Result of [`matrix_function`].
#[derive(Clone, Debug)]
pub struct MatrixFunction {
    pub value: CMat,
    /// Smallest distance between eigenvalues of different clusters, which
    /// bounds the Sylvester solves from below.
    pub separation: f64,
}

/// Solves `a x - x b = rhs` for upper triangular `a` and `b`.
fn triangular_sylvester(a: &CMat, b: &CMat, rhs: &CMat) -> CMat {
    let (p, q) = (a.rows(), b.rows());
    let mut x = CMat::zeros(p, q);
    for l in 0..q {
        let mut col: Vec<Complex64> = (0..p).map(|i| rhs[(i, l)]).collect();
        for k in 0..l {
            let bkl = b[(k, l)];
            for (i, ci) in col.iter_mut().enumerate() {
                *ci += x[(i, k)] * bkl;
            }
        }
        let shift = b[(l, l)];
        for i in (0..p).rev() {
            let mut s = col[i];
            for j in i + 1..p {
                s -= a[(i, j)] * x[(j, l)];
            }
            x[(i, l)] = s / (a[(i, i)] - shift);
        }
    }
    x
}

/// `phi(M)` by the block Schur-Parlett method on the clustered Schur form:
/// Taylor expansion on each cluster, Sylvester solves between clusters.
pub fn matrix_function(phi: &HoloMap, m: &CMat, tol: &JordanTolerances) -> Result<MatrixFunction> {
    let cs = clustered_schur(m, tol)?;
    let t = &cs.schur.t;
    let ranges = cs.ranges();
    let nb = ranges.len();
    let mut f: Vec<Vec<Option<CMat>>> = vec![vec![None; nb]; nb];
    let blk = |i: usize, j: usize| t.block(ranges[i].0, ranges[j].0, ranges[i].1, ranges[j].1);
    for (i, cl) in cs.structure.clusters.iter().enumerate() {
        let tii = blk(i, i);
        let mu = ranges[i].1;
        let n = &tii - &CMat::identity(mu).scale(cl.lambda);
        let order = match phi {
            HoloMap::Polynomial(p) => p.len().max(1) - 1,
            _ => mu + 8,
        };
        let coeffs = phi.taylor(cl.lambda, order);
        let mut acc = CMat::zeros(mu, mu);
        let mut pw = CMat::identity(mu);
        for (j, tj) in coeffs.iter().enumerate() {
            if j > 0 {
                pw = pw.matmul(&n);
                if pw.max_abs() == 0.0 {
                    break;
                }
            }
            acc = &acc + &pw.scale(*tj);
        }
        f[i][i] = Some(acc);
    }
    for gap in 1..nb {
        for i in 0..nb - gap {
            let j = i + gap;
            let tij = blk(i, j);
            let fii = f[i][i].as_ref().unwrap();
            let fjj = f[j][j].as_ref().unwrap();
            let mut rhs = &fii.matmul(&tij) - &tij.matmul(fjj);
            for k in i + 1..j {
                let fik = f[i][k].as_ref().unwrap();
                let fkj = f[k][j].as_ref().unwrap();
                rhs = &rhs + &(&fik.matmul(&blk(k, j)) - &blk(i, k).matmul(fkj));
            }
            f[i][j] = Some(triangular_sylvester(&blk(i, i), &blk(j, j), &rhs));
        }
    }
    let d = m.rows();
    let mut ft = CMat::zeros(d, d);
    for i in 0..nb {
        for j in i..nb {
            ft.set_block(ranges[i].0, ranges[j].0, f[i][j].as_ref().unwrap());
        }
    }
    let q = &cs.schur.q;
    let mut separation = f64::INFINITY;
    for a in 0..d {
        for b in 0..d {
            if cs.labels[a] != cs.labels[b] {
                separation = separation.min((t[(a, a)] - t[(b, b)]).norm());
            }
        }
    }
    Ok(MatrixFunction { value: q.matmul(&ft).matmul(&q.adjoint()), separation })
}

/// `sum_k p_k M^k` by Horner's rule.
pub fn polynomial_of_matrix(p: &[Complex64], m: &CMat) -> CMat {
    let d = m.rows();
    p.iter().rev().fold(CMat::zeros(d, d), |acc, &a| &acc.matmul(m) + &CMat::identity(d).scale(a))
}

/// Polynomial of least degree with the prescribed derivatives: each entry
/// is a node and the values `phi(z), phi'(z), ..` there.
pub fn hermite_interpolant(conditions: &[(Complex64, Vec<Complex64>)]) -> Result<HoloMap> {
    let n: usize = conditions.iter().map(|(_, v)| v.len()).sum();
    if n == 0 {
        return Err(Error::InvalidInput(String::from("no interpolation conditions")));
    }
    let mut a = CMat::zeros(n, n);
    let mut rhs = Vec::with_capacity(n);
    let mut row = 0;
    for (z, vals) in conditions {
        for (r, v) in vals.iter().enumerate() {
            for k in r..n {
                // d^r/dz^r z^k = k!/(k-r)! z^{k-r}
                let falling: f64 = ((k - r + 1)..=k).map(|x| x as f64).product();
                a[(row, k)] = libm_powc(*z, k - r) * c(falling);
            }
            rhs.push(*v);
            row += 1;
        }
    }
    let (inv, _) = inverse_with_condition(&a, 1e14)?;
    Ok(HoloMap::Polynomial(inv.matvec(&rhs)))
}

/// Orders of the zeros of `phi - phi(u_i)` chosen for the four-block
/// example: 1, exactly 3, at least 2 and (here) 5.
pub const FIG1_ZERO_ORDERS: [usize; 4] = [1, 3, 2, 5];

/// Degree-10 polynomial fixing the four eigenvalues of the example with
/// the zero orders of [`FIG1_ZERO_ORDERS`].
pub fn fig1_phi() -> HoloMap {
    let u = fig1_eigenvalues();
    let conds: Vec<(Complex64, Vec<Complex64>)> = u
        .iter()
        .zip(FIG1_ZERO_ORDERS)
        .map(|(&z, ord)| {
            let mut v = vec![c(0.0); ord];
            v[0] = z;
            (z, v)
        })
        .collect();
    hermite_interpolant(&conds).expect("distinct nodes")
}

/// Both sides of the spectral mapping theorem for one matrix and map.
#[derive(Clone, Debug)]
pub struct MappingCheck {
    pub mapped: JointSpectrum,
    pub direct: JointSpectrum,
    /// Largest point distance of the matching, `None` when the multisets
    /// differ.
    pub distance: Option<f64>,
    pub separation: f64,
}

impl MappingCheck {
    pub fn passed(&self) -> bool {
        self.distance.is_some()
    }
}

/// Compares `spectral_map(sp M, phi)` with `sp phi(M)`.
pub fn check_spectral_mapping(phi: &HoloMap, m: &CMat, tol: &JordanTolerances, point_tol: f64) -> Result<MappingCheck> {
    let sp = joint_spectrum_of_matrix(m, tol)?;
    let mapped = spectral_map(&sp, phi, DERIV_TOL, MAX_ZERO_ORDER)?;
    let fm = matrix_function(phi, m, tol)?;
    let direct = joint_spectrum_of_matrix(&fm.value, tol)?;
    let distance = mapped.match_distance(&direct, point_tol);
    Ok(MappingCheck { mapped, direct, distance, separation: fm.separation })
}

/// Matrix and map for one randomized spectral mapping trial.
#[derive(Clone, Debug)]
pub struct Trial {
    /// Jordan blocks `(length, eigenvalue)` before the similarity.
    pub blocks: Vec<(usize, Complex64)>,
    pub similarity: CMat,
    pub matrix: CMat,
    pub phi: HoloMap,
}

fn disk_point(next: &mut dyn FnMut() -> f64, radius: f64) -> Complex64 {
    let r = radius * libm::sqrt(next());
    Complex64::from_polar(r, 2.0 * core::f64::consts::PI * next())
}

/// `I + s G` with Gaussian-free uniform entries, shrunk until its
/// 1-norm condition number is at most `max_cond`.
pub fn random_similarity(d: usize, max_cond: f64, next: &mut dyn FnMut() -> f64) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| Complex64::new(2.0 * next() - 1.0, 2.0 * next() - 1.0));
    let mut s = 1.0 / libm::sqrt(d as f64);
    loop {
        let p = &CMat::identity(d) + &g.scale(c(s));
        if let Ok((_, cond)) = inverse_with_condition(&p, max_cond) {
            if cond <= max_cond {
                return p;
            }
        }
        s *= 0.5;
    }
}

/// `P (J_1 + .. + J_r) P^{-1}`.
pub fn assemble(blocks: &[(usize, Complex64)], p: &CMat) -> Result<CMat> {
    let parts: Vec<CMat> = blocks.iter().map(|&(l, u)| jordan_block(l, u)).collect();
    let j = CMat::block_diag(&parts);
    let (pinv, _) = inverse_with_condition(p, 1e12)?;
    Ok(p.matmul(&j).matmul(&pinv))
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Random trial: up to 12 dimensions in blocks of length at most 4,
/// distinct eigenvalues at least 0.1 apart in the disk of radius 0.8, a
/// similarity with condition number at most 50, and a polynomial of degree
/// at most 6 mapping the closed disk into itself. Half of the maps are
/// built to have zeros of order 2 or 3 at eigenvalues carrying a block of
/// length at least 2. Maps whose
/// images of distinct eigenvalues fall between 1e-12 and 0.05 apart are
/// redrawn, since such spectra cannot be clustered reliably.
pub fn random_trial(next: &mut dyn FnMut() -> f64) -> Trial {
    let d = 1 + (next() * 12.0) as usize;
    let mut blocks: Vec<(usize, Complex64)> = Vec::new();
    let mut distinct: Vec<Complex64> = Vec::new();
    let mut left = d;
    while left > 0 {
        let len = 1 + (next() * left.min(4) as f64) as usize;
        let u = if !distinct.is_empty() && next() < 0.25 {
            distinct[(next() * distinct.len() as f64) as usize % distinct.len()]
        } else {
            let mut u = disk_point(next, 0.8);
            for _ in 0..200 {
                if distinct.iter().all(|v| (*v - u).norm() >= 0.1) {
                    break;
                }
                u = disk_point(next, 0.8);
            }
            if distinct.iter().any(|v| (*v - u).norm() < 0.1) {
                distinct[0]
            } else {
                distinct.push(u);
                u
            }
        };
        blocks.push((len, u));
        left -= len;
    }
    let p = random_similarity(d, 50.0, next);
    let matrix = assemble(&blocks, &p).expect("well conditioned");
    loop {
        let phi = if next() < 0.5 {
            let deg = 1 + (next() * 6.0) as usize;
            let mut co: Vec<Complex64> = (0..=deg).map(|_| disk_point(next, 1.0)).collect();
            let total: f64 = co.iter().map(|z| z.norm()).sum();
            for z in co.iter_mut() {
                *z /= c(total * (1.0 + next()));
            }
            HoloMap::Polynomial(co)
        } else {
            let mut prod = vec![c(1.0)];
            let mut used = 0;
            for _ in 0..2 {
                let ord = 2 + (next() * 2.0) as usize;
                if used + ord > 6 {
                    break;
                }
                let long: Vec<Complex64> = blocks.iter().filter(|b| b.0 > 1).map(|b| b.1).collect();
                let pool = if long.is_empty() { &distinct } else { &long };
                let u = pool[(next() * pool.len() as f64) as usize % pool.len()];
                for _ in 0..ord {
                    prod = poly_mul(&prod, &[-u, c(1.0)]);
                }
                used += ord;
            }
            let bound: f64 = prod.iter().map(|z| z.norm()).sum();
            let v = disk_point(next, 0.4);
            let k = disk_point(next, 0.5) / c(bound);
            let mut co: Vec<Complex64> = prod.iter().map(|z| z * k).collect();
            co[0] += v;
            HoloMap::Polynomial(co)
        };
        let images: Vec<Complex64> = distinct.iter().map(|&u| phi.eval(u)).collect();
        let separable = images
            .iter()
            .enumerate()
            .all(|(i, a)| images[i + 1..].iter().all(|b| (a - b).norm() <= 1e-12 || (a - b).norm() >= 0.05));
        if separable {
            return Trial { blocks, similarity: p, matrix, phi };
        }
    }
}

/// Highest jet order accepted by the prolongation routines.
pub const MAX_JET_ORDER: usize = 16;

/// Jet of order `n` at `base`: the values `u, u_1, .., u_n` of a function
/// and its first `n` complex derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub base: Complex64,
    pub values: Vec<Complex64>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

impl Jet {
    pub fn new(base: Complex64, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() || values.len() > MAX_JET_ORDER + 1 {
            return Err(Error::InvalidInput(format!("jet order must be in 0..={MAX_JET_ORDER}")));
        }
        Ok(Jet { base, values })
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn of_map(phi: &HoloMap, z: Complex64, order: usize) -> Self {
        Jet { base: z, values: phi.derivatives(z, order) }
    }

    pub fn from_taylor(base: Complex64, t: &[Complex64]) -> Self {
        Jet { base, values: t.iter().enumerate().map(|(k, x)| x * factorial(k)).collect() }
    }

    pub fn taylor(&self) -> Vec<Complex64> {
        self.values.iter().enumerate().map(|(k, x)| x / factorial(k)).collect()
    }

    pub fn dist(&self, o: &Self) -> f64 {
        let mut d = (self.base - o.base).norm();
        for (a, b) in self.values.iter().zip(&o.values) {
            d = d.max((a - b).norm());
        }
        if self.values.len() != o.values.len() {
            d = f64::INFINITY;
        }
        d
    }
}

fn series_mul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![c(0.0); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `sum_j f_j delta^j` truncated at order `n`, for `delta` without constant term.
fn series_compose(f: &[Complex64], delta: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut d = delta.to_vec();
    d.resize(n + 1, c(0.0));
    d[0] = c(0.0);
    let mut out = vec![c(0.0); n + 1];
    for fj in f.iter().rev() {
        out = series_mul(&out, &d, n);
        out[0] += fj;
    }
    out
}

/// `m0 + m12 e12` as `m0 - i m12`, with `i = e2 e1`.
pub fn even_to_complex(m: &Multivector) -> Complex64 {
    Complex64::new(m.get(0), -m.get(0b11))
}

pub fn complex_to_even(z: Complex64) -> Multivector {
    let mut m = Multivector::scalar(2, z.re);
    m.set(0b11, -z.im);
    m
}

/// A disk Moebius element in the variable `zeta = -e1 x`:
/// `[rho_1(g) F](zeta) = F(mu(zeta)) / (alpha + beta zeta)` with
/// `mu(zeta) = (gamma zeta + delta) / (alpha + beta zeta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskAction {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
}

impl DiskAction {
    /// Needs `n = 2` and an even rotation part.
    pub fn from_moeb(g: &MoebElement) -> Result<Self> {
        if g.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: g.dim() });
        }
        let m = from_uw(g);
        if !m.a.is_even(1e-12) {
            return Err(Error::InvalidInput(String::from("the disk action needs an even rotation part")));
        }
        let e1 = Multivector::basis_vector(2, 0);
        let alpha = m.a.reversion();
        let beta = -&(&m.c.reversion() * &e1);
        let gamma = -&(&(&e1 * &m.a.conjugation()) * &e1);
        let delta = &e1 * &m.c.conjugation();
        Ok(DiskAction {
            alpha: even_to_complex(&alpha),
            beta: even_to_complex(&beta),
            gamma: even_to_complex(&gamma),
            delta: even_to_complex(&delta),
        })
    }

    pub fn mu(&self) -> HoloMap {
        HoloMap::Fractional { a: self.gamma, b: self.delta, c: self.beta, d: self.alpha }
    }

    pub fn multiplier(&self) -> HoloMap {
        HoloMap::Fractional { a: c(0.0), b: c(1.0), c: self.beta, d: self.alpha }
    }

    /// `mu^{-1}(p)`.
    pub fn preimage(&self, p: Complex64) -> Complex64 {
        (self.alpha * p - self.delta) / (self.gamma - self.beta * p)
    }
}

/// Maps of functions whose action on jets is computed by [`jet_prolong_at`].
#[derive(Clone, Debug)]
pub enum JetMap {
    /// `f -> f o phi`.
    Precompose(HoloMap),
    /// `F -> r (F o mu)` for a disk element.
    Rho1(DiskAction),
}

impl JetMap {
    fn point_map(&self) -> HoloMap {
        match self {
            JetMap::Precompose(phi) => phi.clone(),
            JetMap::Rho1(a) => a.mu(),
        }
    }

    /// A point `w` with `point_map(w) = p`, when the point map is invertible.
    pub fn preimage(&self, p: Complex64) -> Result<Complex64> {
        match self {
            JetMap::Rho1(a) => Ok(a.preimage(p)),
            JetMap::Precompose(HoloMap::Fractional { a, b, c: cc, d }) => Ok((d * p - b) / (a - cc * p)),
            JetMap::Precompose(HoloMap::Polynomial(q)) if q.len() == 2 && q[1] != c(0.0) => Ok((p - q[0]) / q[1]),
            _ => Err(Error::InvalidInput(String::from("the map has no explicit inverse; pass the base point"))),
        }
    }
}

/// Jet at `w` of the transformed function, from the jet of the function at
/// `point_map(w)`. Faa di Bruno is carried out as power series composition.
pub fn jet_prolong_at(map: &JetMap, j: &Jet, w: Complex64) -> Result<Jet> {
    let n = j.order();
    if n > MAX_JET_ORDER {
        return Err(Error::InvalidInput(format!("jet order exceeds {MAX_JET_ORDER}")));
    }
    let pm = map.point_map();
    let t = pm.taylor(w, n);
    let scale = 1.0 + j.base.norm();
    if (t[0] - j.base).norm() > 1e-9 * scale {
        return Err(Error::InvalidInput(format!("jet base {} is not the image of {}", j.base, w)));
    }
    let mut out = series_compose(&j.taylor(), &t, n);
    if let JetMap::Rho1(a) = map {
        out = series_mul(&a.multiplier().taylor(w, n), &out, n);
    }
    Ok(Jet::from_taylor(w, &out))
}

/// [`jet_prolong_at`] at the preimage of the jet's base.
pub fn jet_prolong_map(map: &JetMap, j: &Jet) -> Result<Jet> {
    let w = map.preimage(j.base)?;
    jet_prolong_at(map, j, w)
}

/// Matrices of one group element acting on the order-`(L-1)` jets at zero,
/// each mapping the jet of `F` at `mu(0)` to the jet of `rho_1(g) F` at 0.
#[derive(Clone, Debug)]
pub struct JetActionMatrices {
    /// Through the token matrix and the monogenic calculus of the pair.
    pub tokens: CMat,
    /// Through the operator resolvent and the Moebius image of the pair.
    pub resolvent: CMat,
    /// Through prolongation of the scalar disk action.
    pub jets: CMat,
}

/// Nilpotent pair whose complexification is similar to `J_L(0)`, with a
/// real vector generating the whole root space.
pub fn nilpotent_pair(len: usize) -> (OperatorTuple, Vec<f64>) {
    let t = jordan_tuple(&[(len, c(0.0))]).expect("symmetric");
    let mut v = vec![0.0; len];
    v[0] = 1.0;
    (t, v)
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Even part of an operator acting on `M + M e12` as a complex matrix, and
/// the size of its odd part.
fn even_operator(x: &CliffOperator) -> (CMat, f64) {
    let d = x.size();
    let a = x.blade(0);
    let b = x.blade(0b11);
    let m = CMat::from_fn(d, d, |i, j| Complex64::new(a[(i, j)], -b[(i, j)]));
    (m, x.blade(0b01).max_abs().max(x.blade(0b10).max_abs()))
}

fn even_vector(x: &CliffVector) -> (Vec<Complex64>, f64) {
    let d = x.size();
    let v = (0..d).map(|i| Complex64::new(x.blade(0)[i], -x.blade(0b11)[i])).collect();
    let odd = x.blade(0b01).iter().chain(x.blade(0b10)).fold(0.0f64, |m, y| m.max(y.abs()));
    (v, odd)
}

/// Compares the three routes for one element `g` of the disk group.
pub fn jordan_zero_matrices(
    len: usize,
    g: &MoebElement,
    basis: &VBasis,
    quad: &QuadratureRule,
) -> Result<JetActionMatrices> {
    if len == 0 || len > 4 {
        return Err(Error::InvalidInput(String::from("block length must be in 1..=4")));
    }
    if basis.dim() != 2 || basis.max_degree() + 1 < len {
        return Err(Error::InvalidInput(String::from("basis must be two-dimensional of degree >= L - 1")));
    }
    let act = DiskAction::from_moeb(g)?;
    let (t, v) = nilpotent_pair(len);
    let s = complexify(&t)?;
    let vc: Vec<Complex64> = v.iter().map(|&x| c(x)).collect();
    let mut roots = CMat::zeros(len, len);
    let mut col = vc.clone();
    for k in 0..len {
        for i in 0..len {
            roots[(i, k)] = col[i];
        }
        col = s.matvec(&col);
    }
    let (roots_inv, _) = inverse_with_condition(&roots, 1e10)
        .map_err(|_| Error::InvalidInput(String::from("root vectors are dependent")))?;
    let to_jet = |y: &[Complex64]| -> Vec<Complex64> {
        roots_inv.matvec(y).into_iter().enumerate().map(|(k, z)| z * factorial(k)).collect()
    };
    let p = act.mu().eval(c(0.0));
    let tm = token_matrix(basis, g, quad)?;
    let a = embed(&t);
    let (rc, odd_r) = even_operator(&resolvent(g, &a, DEFAULT_COND_MAX)?);
    let e1 = Multivector::basis_vector(2, 0);
    let moved = moebius_on_operator(g, &a, DEFAULT_COND_MAX)?.left_mul(&-&e1);
    let (z, odd_z) = even_operator(&moved);
    if odd_r.max(odd_z) > 1e-10 {
        return Err(Error::InvalidInput(String::from("the disk action left the even part")));
    }
    let mut tokens = CMat::zeros(len, len);
    let mut res = CMat::zeros(len, len);
    let mut jets = CMat::zeros(len, len);
    for j in 0..len {
        // F_j(zeta) = (zeta - p)^j / j! has the unit jet e_j at p
        let a_coef: Vec<Complex64> = (0..=j)
            .map(|k| {
                let mut pw = c(1.0);
                for _ in 0..j - k {
                    pw *= -p;
                }
                pw * (binomial(j, k) / factorial(j))
            })
            .collect();
        let poly = HoloMap::Polynomial(a_coef.clone());
        let f = {
            let poly = poly.clone();
            SphereFunction::new(2, move |x| complex_to_even(poly.eval(Complex64::new(x[0], x[1]))))
        };
        let coeffs: Vec<Multivector> =
            (0..basis.len()).map(|m| inner_product(&basis.function(m), &f, quad)).collect::<Result<_>>()?;
        let moved_coeffs = tm.apply(&coeffs);
        let (y, odd) = even_vector(&monogenic_calculus(&t, &v, basis, &moved_coeffs)?);
        if odd > 1e-8 {
            return Err(Error::InvalidInput(String::from("token route left the even part")));
        }
        let y_res = rc.matmul(&polynomial_of_matrix(&a_coef, &z)).matvec(&vc);
        let mut unit = vec![c(0.0); len];
        unit[j] = c(1.0);
        let out = jet_prolong_at(&JetMap::Rho1(act), &Jet { base: p, values: unit }, c(0.0))?;
        for (k, ((x, y), w)) in to_jet(&y).into_iter().zip(to_jet(&y_res)).zip(out.values).enumerate() {
            tokens[(k, j)] = x;
            res[(k, j)] = y;
            jets[(k, j)] = w;
        }
    }
    Ok(JetActionMatrices { tokens, resolvent: res, jets })
}

/// Residuals of the equivalence between the action on the root space of a
/// nilpotent block and the prolonged disk action, maximised over `gs`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EquivalenceResidual {
    pub tokens: f64,
    pub resolvent: f64,
}

/// Requires `K >= L - 1` for the token truncation.
pub fn jordan_zero_equivalence(
    len: usize,
    gs: &[MoebElement],
    k: usize,
    quad: &QuadratureRule,
) -> Result<EquivalenceResidual> {
    let basis = VBasis::new(2, k)?;
    let mut out = EquivalenceResidual::default();
    for g in gs {
        let m = jordan_zero_matrices(len, g, &basis, quad)?;
        out.tokens = out.tokens.max((&m.tokens - &m.jets).max_abs());
        out.resolvent = out.resolvent.max((&m.resolvent - &m.jets).max_abs());
    }
    Ok(out)
}
