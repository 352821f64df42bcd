//! One line per acceptance criterion; exits non-zero if any fails.
//! The seed can be overridden with `CLIFFSPEC_SEED`.

use cliffspec_cli::meta::Tolerances;
use cliffspec_cli::suites::{run, SUITES};

const DEFAULT_SEED: u64 = 7;

fn main() {
    let seed = std::env::var("CLIFFSPEC_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    let tol = Tolerances::default();
    let mut failures = 0;
    println!("acceptance (seed {seed})");
    for id in 1..=SUITES.len() as u8 {
        let rep = run(id, seed, &tol);
        let verdict = if rep.passed() { "PASS" } else { "FAIL" };
        let budget = rep.budget.map_or(String::new(), |b| format!(" / {}s", b.as_secs()));
        println!("{verdict} [{id:>2}] {:<16} {:>8.3}s{budget}", rep.name, rep.elapsed.as_secs_f64());
        for c in &rep.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            let note = if c.note.is_empty() { String::new() } else { format!("  ({})", c.note) };
            println!("       {mark} {:<48} {:>10.3e} vs {:e}{note}", c.name, c.value, c.threshold);
        }
        if !rep.passed() {
            failures += 1;
        }
    }
    println!("{} of {} criteria passed", SUITES.len() - failures, SUITES.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
