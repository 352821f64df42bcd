#![allow(dead_code)]

use cliffspec::calculus::OperatorTuple;
use cliffspec::clifford::Multivector;
use cliffspec::linalg::RMat;
use cliffspec::moebius::MoebElement;
pub use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vector(r: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(-scale..scale)).collect()
}

pub fn unit_vector(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v = vector(r, n, 1.0);
        let s: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s > 0.1 {
            return v.iter().map(|x| x / s).collect();
        }
    }
}

pub fn ball_point(r: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    let v = unit_vector(r, n);
    let t = radius * r.gen::<f64>();
    v.iter().map(|x| x * t).collect()
}

pub fn multivector(r: &mut ChaCha8Rng, n: usize) -> Multivector {
    Multivector::new(n, (0..1usize << n).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// Product of `k` random unit vectors.
pub fn pin(r: &mut ChaCha8Rng, n: usize, k: usize) -> Multivector {
    let mut w = Multivector::one(n);
    for _ in 0..k {
        w = &w * &Multivector::from_vector(&unit_vector(r, n));
    }
    w
}

pub fn moeb(r: &mut ChaCha8Rng, n: usize, radius: f64) -> MoebElement {
    let k = r.gen_range(0..3);
    MoebElement::new(ball_point(r, n, radius), pin(r, n, k)).unwrap()
}

pub fn symmetric(r: &mut ChaCha8Rng, d: usize) -> RMat {
    let a = RMat::from_fn(d, d, |_, _| r.gen_range(-1.0..1.0));
    (&a + &a.transpose()).scale(0.5)
}

/// Random symmetric tuple, each entry rescaled to spectral norm `norm`.
pub fn tuple(r: &mut ChaCha8Rng, n: usize, d: usize, norm: f64) -> OperatorTuple {
    let mats = (0..n)
        .map(|_| {
            let a = symmetric(r, d);
            let s = a.spectral_norm();
            a.scale(norm / s)
        })
        .collect();
    OperatorTuple::new(mats).unwrap()
}

/// Diagonal tuple with entries in `(-scale, scale)`.
pub fn diagonal_tuple(r: &mut ChaCha8Rng, n: usize, d: usize, scale: f64) -> OperatorTuple {
    OperatorTuple::new((0..n).map(|_| RMat::diag(&vector(r, d, scale))).collect()).unwrap()
}
