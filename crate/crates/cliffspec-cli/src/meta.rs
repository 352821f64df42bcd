use cliffspec::spectrum::{JordanTolerances, DERIV_TOL};
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable capping worker threads.
pub const THREADS_VAR: &str = "CLIFFSPEC_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub cluster_tol: f64,
    pub rank_tol: f64,
    pub gap_ratio: f64,
    pub deriv_tol: f64,
    pub quad_nodes: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let j = JordanTolerances::default();
        Tolerances {
            cluster_tol: j.cluster_tol,
            rank_tol: j.rank_tol,
            gap_ratio: j.gap_ratio,
            deriv_tol: DERIV_TOL,
            quad_nodes: 256,
        }
    }
}

impl Tolerances {
    pub fn jordan(&self) -> JordanTolerances {
        JordanTolerances { cluster_tol: self.cluster_tol, rank_tol: self.rank_tol, gap_ratio: self.gap_ratio }
    }

    pub fn validate(&self) -> Result<(), String> {
        let all = [self.cluster_tol, self.rank_tol, self.gap_ratio, self.deriv_tol];
        if all.iter().any(|t| !(t.is_finite() && *t > 0.0)) || self.quad_nodes == 0 {
            return Err("tolerances must be positive".into());
        }
        Ok(())
    }
}

/// Provenance block written into every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Meta {
    pub fn new(seed: u64, tolerances: Tolerances) -> Self {
        Meta { tool: "cliffspec".into(), version: VERSION.into(), seed, tolerances }
    }

    /// One-line form for CSV and SVG comments.
    pub fn line(&self) -> String {
        let t = &self.tolerances;
        format!(
            "{} {} seed={} cluster_tol={:e} rank_tol={:e} gap_ratio={} deriv_tol={:e} quad_nodes={}",
            self.tool, self.version, self.seed, t.cluster_tol, t.rank_tol, t.gap_ratio, t.deriv_tol, t.quad_nodes
        )
    }
}

/// Worker count from [`THREADS_VAR`], defaulting to the available cores.
pub fn thread_count() -> usize {
    let avail = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_VAR).ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        Some(n) if n > 0 => n,
        _ => avail,
    }
}

/// Runs `f` on a pool sized by [`thread_count`].
pub fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(thread_count()).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
