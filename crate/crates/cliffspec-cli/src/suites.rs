//! Property batteries shared by `cliffspec check` and the acceptance target.
//! Each suite draws from a seeded ChaCha stream, so results are reproducible.

use std::time::{Duration, Instant};

use cliffspec::analysis::{
    cauchy_integral, inner_product, l2_norm, rho1_apply, vacuum_transform, wavelet_transform, MultiIndex,
    SphereFunction, VBasis,
};
use cliffspec::calculus::{
    embed, integral_formula, lemma318_residual, moebius_on_operator, resolvent, resolvent_membership,
    symmetric_product, taylor_calculus, CliffOperator, OperatorTuple, ProductFamily, DEFAULT_COND_MAX,
};
use cliffspec::clifford::Multivector;
use cliffspec::linalg::RMat;
use cliffspec::moebius::{HardyConfig, MoebElement, Point};
use cliffspec::quadrature::QuadratureRule;
use cliffspec::spectrum::{
    check_spectral_mapping, complex_to_even, fig1_eigenvalues, fig1_matrix, fig1_tuple, joint_spectrum,
    joint_spectrum_of_matrix, jordan_zero_equivalence, pauli_pair, random_trial, FIG1_BLOCKS,
};
use cliffspec::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::meta::{with_pool, Tolerances};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub note: String,
}

impl CheckLine {
    /// Passes when `value < threshold`; NaN fails.
    pub fn below(name: &str, value: f64, threshold: f64) -> Self {
        CheckLine { name: name.into(), value, threshold, passed: value < threshold, note: String::new() }
    }

    /// Passes when `value >= threshold`.
    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        CheckLine { name: name.into(), value, threshold, passed: value >= threshold, note: String::new() }
    }

    pub fn flag(name: &str, passed: bool) -> Self {
        let v = if passed { 1.0 } else { 0.0 };
        CheckLine { name: name.into(), value: v, threshold: 1.0, passed, note: String::new() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    fn error(name: &str, e: impl std::fmt::Display) -> Self {
        CheckLine::flag(name, false).with_note(format!("error: {e}"))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub id: u8,
    pub name: &'static str,
    pub checks: Vec<CheckLine>,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl SuiteReport {
    pub fn within_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.elapsed < b)
    }

    pub fn passed(&self) -> bool {
        self.within_budget() && self.checks.iter().all(|c| c.passed)
    }
}

/// Suite names in criterion order.
pub const SUITES: [&str; 10] = [
    "pauli",
    "example",
    "spectral-mapping",
    "clifford",
    "moebius",
    "representation",
    "cauchy",
    "operators",
    "jordan-zero",
    "integral",
];

const BUDGETS: [Option<u64>; 10] = [Some(1), Some(1), Some(30), Some(5), Some(10), None, None, None, None, None];

pub fn suite_id(name: &str) -> Option<u8> {
    SUITES.iter().position(|s| *s == name).map(|i| i as u8 + 1)
}

/// Runs suite `id` (1-based) with the given seed.
pub fn run(id: u8, seed: u64, tol: &Tolerances) -> SuiteReport {
    let start = Instant::now();
    let checks = match id {
        1 => pauli(tol),
        2 => example(tol),
        3 => spectral_mapping(seed, tol),
        4 => clifford(seed),
        5 => moebius(seed),
        6 => representation(seed),
        7 => cauchy(seed),
        8 => operators(seed),
        9 => jordan_zero(seed),
        10 => integral(),
        _ => vec![CheckLine::flag("unknown suite", false)],
    };
    let i = usize::from(id.clamp(1, 10)) - 1;
    SuiteReport { id, name: SUITES[i], checks, elapsed: start.elapsed(), budget: BUDGETS[i].map(Duration::from_secs) }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn vector(r: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(-scale..scale)).collect()
}

fn unit_vector(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v = vector(r, n, 1.0);
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s > 0.1 {
            return v.iter().map(|x| x / s).collect();
        }
    }
}

fn ball_point(r: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    let t = radius * r.gen::<f64>();
    unit_vector(r, n).iter().map(|x| x * t).collect()
}

fn multivector(r: &mut ChaCha8Rng, n: usize) -> Multivector {
    Multivector::new(n, (0..1usize << n).map(|_| r.gen_range(-1.0..1.0)).collect()).expect("dimension")
}

fn pin(r: &mut ChaCha8Rng, n: usize, k: usize) -> Multivector {
    let mut w = Multivector::one(n);
    for _ in 0..k {
        w = &w * &Multivector::from_vector(&unit_vector(r, n));
    }
    w
}

fn moeb(r: &mut ChaCha8Rng, n: usize, radius: f64) -> MoebElement {
    let k = r.gen_range(0..3);
    let u = ball_point(r, n, radius);
    MoebElement::new(u, pin(r, n, k)).expect("valid element")
}

/// Disk element with an even rotation part.
fn even_moeb(r: &mut ChaCha8Rng, radius: f64) -> MoebElement {
    let t = r.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let mut w = Multivector::scalar(2, t.cos());
    w.set(0b11, t.sin());
    let u = ball_point(r, 2, radius);
    MoebElement::new(u, w).expect("valid element")
}

fn tuple(r: &mut ChaCha8Rng, n: usize, d: usize, norm: f64) -> OperatorTuple {
    let mats = (0..n)
        .map(|_| {
            let a = RMat::from_fn(d, d, |_, _| r.gen_range(-1.0..1.0));
            let s = (&a + &a.transpose()).scale(0.5);
            let k = s.spectral_norm();
            s.scale(norm / k)
        })
        .collect();
    OperatorTuple::new(mats).expect("symmetric")
}

fn finite(p: Point) -> Option<Vec<f64>> {
    match p {
        Point::Finite(x) => Some(x),
        Point::Infinity => None,
    }
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Membership of the grid `x_i = -1 + 2 i / (size - 1)` points inside the
/// open unit disk, in row-major order (`y` outer).
pub fn resolvent_grid(t: &OperatorTuple, size: usize, cond_max: f64) -> Result<Vec<(f64, f64, bool)>, String> {
    if t.dim() != 2 {
        return Err("the resolvent grid needs a pair (n = 2)".into());
    }
    if size < 2 {
        return Err("grid size must be at least 2".into());
    }
    let a = embed(t);
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (size - 1) as f64;
    type Row = Result<Vec<(f64, f64, bool)>, String>;
    let rows: Vec<Row> = with_pool(|| {
        (0..size)
            .into_par_iter()
            .map(|j| {
                let y = coord(j);
                let mut row = Vec::new();
                for i in 0..size {
                    let x = coord(i);
                    if x * x + y * y >= 1.0 {
                        continue;
                    }
                    let m = resolvent_membership(&[x, y], &a, cond_max).map_err(|e| e.to_string())?;
                    row.push((x, y, m));
                }
                Ok(row)
            })
            .collect()
    });
    let mut out = Vec::new();
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

fn pauli(tol: &Tolerances) -> Vec<CheckLine> {
    let mut out = Vec::new();
    match joint_spectrum(&pauli_pair(), &tol.jordan()) {
        Ok(s) => {
            let worst = s.points.iter().fold(0.0f64, |m, p| m.max(p.u.norm()));
            let mut ks: Vec<usize> = s.points.iter().map(|p| p.k).collect();
            ks.sort_unstable();
            out.push(CheckLine::flag("points are (0,0),(0,1)", ks == [0, 1]));
            out.push(CheckLine::below("max |lambda|", worst, 1e-10));
        }
        Err(e) => out.push(CheckLine::error("pauli spectrum", e)),
    }
    match resolvent_grid(&pauli_pair(), 101, DEFAULT_COND_MAX) {
        Ok(grid) => {
            let wrong = grid.iter().filter(|(x, y, m)| *m == (*x == 0.0 && *y == 0.0)).count();
            out.push(
                CheckLine::below("grid cells misclassified", wrong as f64, 0.5)
                    .with_note(format!("{} cells inside the disk", grid.len())),
            );
        }
        Err(e) => out.push(CheckLine::error("resolvent grid", e)),
    }
    out
}

fn example(tol: &Tolerances) -> Vec<CheckLine> {
    let u = fig1_eigenvalues();
    let mut out = Vec::new();
    let cases =
        [("block matrix", Ok(fig1_matrix())), ("symmetric pair", cliffspec::spectrum::complexify(&fig1_tuple()))];
    for (label, m) in cases {
        let s = match m.and_then(|m| joint_spectrum_of_matrix(&m, &tol.jordan())) {
            Ok(s) => s,
            Err(e) => {
                out.push(CheckLine::error(label, e));
                continue;
            }
        };
        out.push(CheckLine::flag(&format!("{label}: 10 points"), s.len() == 10));
        let heights = s.stack_heights(1e-6);
        let mut worst = 0.0f64;
        let mut heights_ok = heights.len() == 4;
        for (z, h) in u.iter().zip(FIG1_BLOCKS) {
            match heights.iter().min_by(|a, b| (a.0 - z).norm().total_cmp(&(b.0 - z).norm())) {
                Some((w, hh)) => {
                    worst = worst.max((w - z).norm());
                    heights_ok &= *hh == h;
                }
                None => heights_ok = false,
            }
        }
        out.push(CheckLine::flag(&format!("{label}: stack heights 3,4,1,2"), heights_ok));
        out.push(CheckLine::below(&format!("{label}: position error"), worst, 1e-8));
    }
    out
}

fn spectral_mapping(seed: u64, tol: &Tolerances) -> Vec<CheckLine> {
    let mut r = rng(seed, 3);
    let mut next = || r.gen::<f64>();
    let trials: Vec<_> = (0..200).map(|_| random_trial(&mut next)).collect();
    let jt = tol.jordan();
    let results: Vec<Result<bool, String>> = with_pool(|| {
        trials
            .par_iter()
            .map(|t| {
                check_spectral_mapping(&t.phi, &t.matrix, &jt, 1e-6).map(|c| c.passed()).map_err(|e| e.to_string())
            })
            .collect()
    });
    let passed = results.iter().filter(|r| matches!(r, Ok(true))).count();
    let failed: Vec<usize> =
        results.iter().enumerate().filter(|(_, r)| matches!(r, Ok(false))).map(|(i, _)| i).collect();
    let rejected: Vec<String> =
        results.iter().enumerate().filter_map(|(i, r)| r.as_ref().err().map(|e| format!("#{i}: {e}"))).collect();
    let mut note = format!("failed {:?}", failed);
    if !rejected.is_empty() {
        note.push_str(&format!("; rejected {}", rejected.join("; ")));
    }
    vec![
        CheckLine::at_least("trials passed of 200", passed as f64, 199.0).with_note(note),
        CheckLine::below("conditioning rejections", rejected.len() as f64, 1.5),
    ]
}

fn clifford(seed: u64) -> Vec<CheckLine> {
    let mut r = rng(seed, 4);
    let mut assoc = 0.0f64;
    let mut anti = 0.0f64;
    let mut norm = 0.0f64;
    let mut kelvin = 0.0f64;
    for n in 2..=5 {
        for _ in 0..1000 {
            let (a, b, c) = (multivector(&mut r, n), multivector(&mut r, n), multivector(&mut r, n));
            let ab = &a * &b;
            assoc = assoc.max((&(&ab * &c) - &(&a * &(&b * &c))).max_abs());
            anti = anti
                .max((&ab.reversion() - &(&b.reversion() * &a.reversion())).max_abs())
                .max((&ab.conjugation() - &(&b.conjugation() * &a.conjugation())).max_abs())
                .max((&ab.grade_involution() - &(&a.grade_involution() * &b.grade_involution())).max_abs());
            let x = Multivector::from_vector(&vector(&mut r, n, 1.0));
            norm = norm.max((&(&x * &x.conjugation()) - &Multivector::scalar(n, x.norm_sq())).max_abs());
            let y = Multivector::from_vector(&unit_vector(&mut r, n)).scale(r.gen_range(0.2..2.0));
            match y.kelvin_inverse(1e-14) {
                Ok(yi) => {
                    let one = Multivector::one(n);
                    kelvin = kelvin.max((&(&y * &yi) - &one).max_abs()).max((&(&yi * &y) - &one).max_abs());
                }
                Err(_) => kelvin = f64::INFINITY,
            }
        }
    }
    vec![
        CheckLine::below("associativity", assoc, 1e-12),
        CheckLine::below("anti-automorphisms", anti, 1e-12),
        CheckLine::below("x conj(x) = |x|^2", norm, 1e-12),
        CheckLine::below("kelvin inverse", kelvin, 1e-12),
    ]
}

fn moebius(seed: u64) -> Vec<CheckLine> {
    let mut r = rng(seed, 5);
    let (mut comp, mut inv, mut lemma, mut sphere) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..500 {
        let n = 2 + i % 2;
        let (g1, g2, g3) = (moeb(&mut r, n, 0.9), moeb(&mut r, n, 0.9), moeb(&mut r, n, 0.9));
        let step = || -> Option<(f64, f64)> {
            let g12 = g1.compose(&g2).ok()?;
            let assoc = g12.compose(&g3).ok()?.dist(&g1.compose(&g2.compose(&g3).ok()?).ok()?);
            let e = MoebElement::identity(n);
            let iv = g1.compose(&g1.inverse()).ok()?.dist(&e).max(g1.inverse().compose(&g1).ok()?.dist(&e));
            Some((assoc, iv))
        };
        let (a, b) = step().unwrap_or((f64::INFINITY, f64::INFINITY));
        comp = comp.max(a);
        inv = inv.max(b);
        let x = ball_point(&mut r, n, 0.95);
        let act = (|| {
            let once = finite(g1.compose(&g2).ok()?.apply(&Point::finite(&x)).ok()?)?;
            let twice = finite(g1.apply(&g2.apply(&Point::finite(&x)).ok()?).ok()?)?;
            Some(max_dist(&once, &twice))
        })();
        comp = comp.max(act.unwrap_or(f64::INFINITY));
        let u1 = ball_point(&mut r, n, 0.9);
        let u2 = ball_point(&mut r, n, 0.9);
        lemma = lemma.max(translation_lemma(&u1, &u2).unwrap_or(f64::INFINITY));
        let s = unit_vector(&mut r, n);
        let on = finite(g1.apply(&Point::finite(&s)).unwrap_or(Point::Infinity))
            .map_or(f64::INFINITY, |y| (y.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs());
        sphere = sphere.max(on);
    }
    vec![
        CheckLine::below("composition", comp, 1e-9),
        CheckLine::below("inverse", inv, 1e-9),
        CheckLine::below("translation lemma (1)-(3)", lemma, 1e-9),
        CheckLine::below("sphere preservation", sphere, 1e-9),
    ]
}

/// Items (1)-(3) for translations by `u1` and `u2`; see the decisions log
/// for the conventions.
fn translation_lemma(u1: &[f64], u2: &[f64]) -> Option<f64> {
    let n = u1.len();
    let t1 = MoebElement::translation(u1.to_vec()).ok()?;
    let t2 = MoebElement::translation(u2.to_vec()).ok()?;
    let minus: Vec<f64> = u1.iter().map(|x| -x).collect();
    let item1 = t1.inverse().dist(&MoebElement::translation(minus).ok()?);
    let item2 = finite(t1.apply(&Point::finite(u1)).ok()?)?.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let u = finite(t1.inverse().apply(&Point::finite(u2)).ok()?)?;
    let p = &Multivector::one(n) - &(&Multivector::from_vector(u1) * &Multivector::from_vector(u2));
    let w = p.scale(1.0 / p.norm()).conjugation();
    let item3 = t1.inverse().compose(&t2.inverse()).ok()?.dist(&MoebElement::new(u, w).ok()?.inverse());
    Some(item1.max(item2).max(item3))
}

fn test_function(n: usize) -> SphereFunction {
    SphereFunction::new(n, move |x| {
        let mut m = Multivector::scalar(n, 0.3 + x[0] * x[1]);
        m.set(0b11, x[n - 1] - 0.2);
        m.set(1, x[0] * x[0]);
        m
    })
}

fn representation(seed: u64) -> Vec<CheckLine> {
    let mut out = Vec::new();
    for (n, size, radius, tol) in [(2usize, 256usize, 0.8, 1e-8), (3, 29, 0.5, 1e-5)] {
        let mut r = rng(seed, 6 + n as u64);
        let quad = QuadratureRule::for_dim(n, size).expect("supported");
        let f = test_function(n);
        let base = l2_norm(&f, &quad).unwrap_or(f64::NAN);
        let draws: Vec<(MoebElement, MoebElement)> =
            (0..50).map(|_| (moeb(&mut r, n, radius), moeb(&mut r, n, radius))).collect();
        let res: Vec<(f64, f64)> = with_pool(|| {
            draws
                .par_iter()
                .map(|(g1, g2)| {
                    let lhs = rho1_apply(g1, &rho1_apply(g2, &f));
                    let rhs = match g1.compose(g2) {
                        Ok(g) => rho1_apply(&g, &f),
                        Err(_) => return (f64::INFINITY, f64::INFINITY),
                    };
                    let hom = quad.nodes().iter().fold(0.0f64, |m, x| m.max(lhs.eval(x).dist(&rhs.eval(x))));
                    let norm = l2_norm(&rho1_apply(g1, &f), &quad).map_or(f64::INFINITY, |v| (v - base).abs());
                    (hom, norm)
                })
                .collect()
        });
        let hom = res.iter().fold(0.0f64, |m, r| m.max(r.0));
        let norm = res.iter().fold(0.0f64, |m, r| m.max(r.1));
        out.push(CheckLine::below(&format!("n={n} homomorphism"), hom, tol));
        out.push(
            CheckLine::below(&format!("n={n} norm preservation"), norm, tol).with_note(format!("|u| <= {radius}")),
        );
    }
    out
}

fn cauchy(seed: u64) -> Vec<CheckLine> {
    let mut r = rng(seed, 7);
    let circle = QuadratureRule::circle(256);
    let mut worst2 = 0.0f64;
    for k in 0..=8u32 {
        let f = SphereFunction::new(2, move |x| complex_to_even(Complex64::new(x[0], x[1]).powu(k)));
        for _ in 0..10 {
            let u = ball_point(&mut r, 2, 0.8);
            let want = complex_to_even(Complex64::new(u[0], u[1]).powu(k));
            worst2 = worst2.max(cauchy_integral(&f, &u, &circle).map_or(f64::INFINITY, |v| v.dist(&want)));
        }
    }
    let sphere = QuadratureRule::sphere(29);
    let mut worst3 = 0.0f64;
    match VBasis::new(3, 1) {
        Ok(basis) => {
            for _ in 0..20 {
                let u = ball_point(&mut r, 3, 0.5);
                let c = multivector(&mut r, 3);
                let got = cauchy_integral(&SphereFunction::constant(c.clone()), &u, &sphere);
                worst3 = worst3.max(got.map_or(f64::INFINITY, |v| v.dist(&c)));
                for i in 0..basis.len() {
                    let got = cauchy_integral(&basis.function(i), &u, &sphere);
                    worst3 = worst3.max(got.map_or(f64::INFINITY, |v| v.dist(&basis.eval(i, &u))));
                }
            }
        }
        Err(_) => worst3 = f64::INFINITY,
    }
    let one = SphereFunction::constant(Multivector::one(2));
    let mut vac = 0.0f64;
    for _ in 0..20 {
        let g = moeb(&mut r, 2, 0.8);
        vac = vac.max(wavelet_transform(&one, &g, &circle).map_or(f64::INFINITY, |v| v.dist(&vacuum_transform(&g))));
    }
    vec![
        CheckLine::below("n=2 powers z^k, k <= 8, |u| <= 0.8", worst2, 1e-8),
        CheckLine::below("n=3 constants and degree-one basis, |u| <= 0.5", worst3, 1e-4),
        CheckLine::below("vacuum closed form", vac, 1e-8),
    ]
}

fn operators(seed: u64) -> Vec<CheckLine> {
    let mut r = rng(seed, 8);
    let cond = DEFAULT_COND_MAX;
    let mut cocycle = 0.0f64;
    let mut lemma = 0.0f64;
    let mut draws = 0usize;
    while draws < 100 {
        let n = 2 + draws % 2;
        let d = r.gen_range(1..=6);
        let a = embed(&tuple(&mut r, n, d, 0.4));
        let g1 = moeb(&mut r, n, 0.8);
        let g2 = moeb(&mut r, n, 0.8);
        let x = vector(&mut r, n, 1.5);
        if !resolvent_membership(&x, &a, 1e8).unwrap_or(false) {
            continue;
        }
        let c = (|| -> cliffspec::Result<f64> {
            let moved = moebius_on_operator(&g1, &a, cond)?;
            let lhs = resolvent(&g1, &a, cond)?.mul(&resolvent(&g2, &moved, cond)?);
            Ok(lhs.dist(&resolvent(&g1.compose(&g2)?, &a, cond)?))
        })();
        cocycle = cocycle.max(c.unwrap_or(f64::INFINITY));
        lemma = lemma.max(lemma318_residual(&g1, &a, &x, cond).unwrap_or(f64::INFINITY));
        draws += 1;
    }
    let mut power = 0.0f64;
    for k in 1..=5usize {
        for n in 2..=3 {
            let t = tuple(&mut r, n, 3, 0.7);
            let lhs = embed(&t).pow(k as u32);
            let mut rhs = CliffOperator::zero(n, 3);
            for m in MultiIndex::of_degree(n, k) {
                match symmetric_product(&t, &m) {
                    Ok(p) => rhs = rhs.add(&p.scale(m.multinomial())),
                    Err(_) => power = f64::INFINITY,
                }
            }
            power = power.max(lhs.dist(&rhs));
        }
    }
    vec![
        CheckLine::below("resolvent cocycle", cocycle, 1e-8),
        CheckLine::below("difference identity", lemma, 1e-8),
        CheckLine::below("power identity, k <= 5", power, 1e-10),
    ]
}

fn jordan_zero(seed: u64) -> Vec<CheckLine> {
    let mut r = rng(seed, 9);
    let quad = QuadratureRule::circle(256);
    let mut out = Vec::new();
    for (len, tol) in [(1usize, 1e-8), (2, 1e-6), (3, 1e-4)] {
        let gs: Vec<MoebElement> = (0..20).map(|_| even_moeb(&mut r, 0.8)).collect();
        let line = match jordan_zero_equivalence(len, &gs, len + 1, &quad) {
            Ok(res) => CheckLine::below(&format!("L={len} token route"), res.tokens, tol)
                .with_note(format!("resolvent route {:.1e}", res.resolvent)),
            Err(e) => CheckLine::error(&format!("L={len}"), e),
        };
        out.push(line);
    }
    out
}

fn integral() -> Vec<CheckLine> {
    let t = pauli_pair();
    let v = [1.0, 0.0];
    let run = || -> cliffspec::Result<f64> {
        let basis = VBasis::new(2, 2)?;
        let f =
            SphereFunction::new(2, |x| complex_to_even(Complex64::new(0.5, 0.1) + Complex64::new(x[0], x[1]) * 0.7));
        let quad = QuadratureRule::circle(64);
        let mut coeffs = Vec::new();
        for (i, m) in basis.indices().iter().enumerate() {
            coeffs.push((m.clone(), inner_product(&basis.function(i), &f, &quad)?));
        }
        let direct = taylor_calculus(&t, &v, &coeffs, ProductFamily::Monogenic)?;
        let via = integral_formula(&t, &v, &basis, &f, &HardyConfig::default())?;
        Ok(via.dist(&direct))
    };
    match run() {
        Ok(d) => vec![CheckLine::below("integral formula vs series", d, 1e-3)],
        Err(e) => vec![CheckLine::error("integral formula", e)],
    }
}
