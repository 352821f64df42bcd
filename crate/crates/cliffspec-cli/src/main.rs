use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cliffspec::analysis::{cauchy_integral, SphereFunction, VBasis};
use cliffspec::calculus::{OperatorTuple, DEFAULT_COND_MAX};
use cliffspec::clifford::Multivector;
use cliffspec::moebius::Point;
use cliffspec::quadrature::QuadratureRule;
use cliffspec::spectrum::{
    complex_to_even, complexify, even_to_complex, fig1_tuple, joint_spectrum_of_matrix, jordan_structure,
    matrix_function, pauli_pair, spectral_map, HoloMap, MAX_ZERO_ORDER,
};
use cliffspec::Complex64;
use cliffspec_cli::format::{
    parse_moeb, parse_phi, parse_reals, resolvent_csv, MatrixFile, MoebJson, PointJson, SpectrumFile,
};
use cliffspec_cli::meta::{Meta, Tolerances};
use cliffspec_cli::render::{outside_disk, render_spectrum, RenderMode, SITE_TOL};
use cliffspec_cli::suites::{self, resolvent_grid, suite_id, SUITES};
use serde::Serialize;

/// Jet spectra, Moebius maps and monogenic calculus for symmetric operator tuples.
#[derive(Parser)]
#[command(name = "cliffspec", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jet-labelled joint spectrum of a symmetric pair.
    Spectrum {
        #[command(flatten)]
        input: MatrixInput,
        /// Output JSON, `-` for stdout.
        #[arg(long, default_value = "-")]
        out: String,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SvgMode::Jet)]
        svg_mode: SvgMode,
        #[command(flatten)]
        common: Common,
    },
    /// Pushes a spectrum forward along a holomorphic map.
    Specmap {
        #[arg(long)]
        spectrum: PathBuf,
        /// `identity`, `example`, `poly:c0,c1,..` or `blaschke:re,im,theta`.
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "-")]
        out: String,
        /// Matrix file to compare against the spectrum of `phi(M)`.
        #[arg(long)]
        verify: Option<PathBuf>,
        /// Named pair to compare against, instead of a file.
        #[arg(long, value_enum, conflicts_with = "verify")]
        verify_example: Option<Example>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Membership of grid points in the Clifford resolvent set (CSV).
    Resolvent {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_COND_MAX)]
        cond_max: f64,
        #[arg(long, default_value = "-")]
        out: String,
        #[command(flatten)]
        common: Common,
    },
    /// Cauchy integral of a function on the sphere at an interior point.
    Cauchy {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        dim: u8,
        /// `z^k` (dim 2), `const:<multivector>` or `basis:<index>`.
        #[arg(long = "fn")]
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "-")]
        out: String,
        #[command(flatten)]
        common: Common,
    },
    /// Group operations on elements written `u1,..,un;w`.
    Moeb {
        #[command(subcommand)]
        op: MoebOp,
    },
    /// Runs the property suites and prints a pass/fail table.
    Check {
        /// `all` or one of the suite names.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum MoebOp {
    /// Image of a point.
    Apply {
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[command(flatten)]
        common: Common,
    },
    /// Product `g h`.
    Compose {
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[command(flatten)]
        common: Common,
    },
    /// Inverse element.
    Inv {
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct MatrixInput {
    /// Matrix JSON `{"n", "d", "A"}`.
    #[arg(long, required_unless_present = "example", conflicts_with = "example")]
    matrices: Option<PathBuf>,
    #[arg(long, value_enum)]
    example: Option<Example>,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    cluster_tol: Option<f64>,
    #[arg(long)]
    rank_tol: Option<f64>,
    #[arg(long)]
    gap_ratio: Option<f64>,
    #[arg(long)]
    deriv_tol: Option<f64>,
    /// Circle nodes for `n = 2`; for `n = 3` the sphere degree, capped at 61.
    #[arg(long)]
    quad_nodes: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Pauli,
    Fig1,
}

#[derive(Clone, Copy, ValueEnum)]
enum SvgMode {
    Classical,
    Jet,
}

/// Exit-code classes: 1 input, 2 ambiguity, 3 degenerate map.
enum Failure {
    Input(String),
    Ambiguity(String),
    Degenerate(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Ambiguity(_) => 2,
            Failure::Degenerate(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Ambiguity(m) | Failure::Degenerate(m) => m,
        }
    }
}

impl From<cliffspec::Error> for Failure {
    fn from(e: cliffspec::Error) -> Self {
        match e {
            cliffspec::Error::Ambiguity(_) => Failure::Ambiguity(e.to_string()),
            cliffspec::Error::FlatMap { .. } => Failure::Degenerate(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(m: String) -> Self {
        Failure::Input(m)
    }
}

type Outcome = Result<(), Failure>;

impl Common {
    fn tolerances(&self) -> Result<Tolerances, Failure> {
        let d = Tolerances::default();
        let t = Tolerances {
            cluster_tol: self.cluster_tol.unwrap_or(d.cluster_tol),
            rank_tol: self.rank_tol.unwrap_or(d.rank_tol),
            gap_ratio: self.gap_ratio.unwrap_or(d.gap_ratio),
            deriv_tol: self.deriv_tol.unwrap_or(d.deriv_tol),
            quad_nodes: self.quad_nodes.unwrap_or(d.quad_nodes),
        };
        t.validate()?;
        Ok(t)
    }

    fn meta(&self) -> Result<Meta, Failure> {
        Ok(Meta::new(self.seed, self.tolerances()?))
    }
}

fn example_tuple(e: Example) -> OperatorTuple {
    match e {
        Example::Pauli => pauli_pair(),
        Example::Fig1 => fig1_tuple(),
    }
}

fn read_text(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_matrices(path: &PathBuf) -> Result<OperatorTuple, Failure> {
    let f: MatrixFile =
        serde_json::from_str(&read_text(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(f.to_tuple()?)
}

impl MatrixInput {
    fn load(&self) -> Result<OperatorTuple, Failure> {
        match (&self.matrices, self.example) {
            (_, Some(e)) => Ok(example_tuple(e)),
            (Some(p), None) => read_matrices(p),
            (None, None) => Err(Failure::Input("pass --matrices or --example".into())),
        }
    }
}

fn write_out(path: &str, text: &str) -> Outcome {
    if path == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| Failure::Input(format!("{path}: {e}")))
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    meta: &'a Meta,
    error: &'a str,
    message: &'a str,
}

fn cmd_spectrum(input: &MatrixInput, out: &str, svg: Option<&PathBuf>, mode: SvgMode, common: &Common) -> Outcome {
    let meta = common.meta()?;
    let t = input.load()?;
    let m = complexify(&t)?;
    let s = match jordan_structure(&m, &meta.tolerances.jordan()) {
        Ok(s) => s,
        Err(e) => {
            let f = Failure::from(e);
            if let Failure::Ambiguity(msg) = &f {
                write_out(out, &to_json(&Diagnostic { meta: &meta, error: "ambiguity", message: msg }))?;
            }
            return Err(f);
        }
    };
    let file = SpectrumFile::from_structure(&s, meta.clone());
    write_out(out, &to_json(&file))?;
    if let Some(p) = svg {
        let sp = file.spectrum();
        warn_outside(&sp);
        let mode = match mode {
            SvgMode::Classical => RenderMode::Classical,
            SvgMode::Jet => RenderMode::Jet,
        };
        write_out(&p.to_string_lossy(), &render_spectrum(&sp, mode, Some(&meta)))?;
    }
    Ok(())
}

fn warn_outside(s: &cliffspec::spectrum::JointSpectrum) {
    let k = outside_disk(s);
    if k > 0 {
        eprintln!("warning: {k} spectral points lie outside the unit disk");
    }
}

#[derive(Serialize)]
struct Verification {
    passed: bool,
    /// Largest point distance of the matching; null when the multisets differ.
    distance: Option<f64>,
    point_tol: f64,
    direct: Vec<PointJson>,
}

#[derive(Serialize)]
struct MappedFile {
    #[serde(flatten)]
    spectrum: SpectrumFile,
    phi: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    verify: Option<Verification>,
}

const POINT_TOL: f64 = 1e-6;

struct SpecmapArgs<'a> {
    spectrum: &'a PathBuf,
    phi: &'a str,
    out: &'a str,
    verify: Option<&'a PathBuf>,
    verify_example: Option<Example>,
    svg: Option<&'a PathBuf>,
}

fn cmd_specmap(a: SpecmapArgs<'_>, common: &Common) -> Outcome {
    let meta = common.meta()?;
    let src: SpectrumFile = serde_json::from_str(&read_text(a.spectrum)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", a.spectrum.display())))?;
    src.validate()?;
    let phi: HoloMap = parse_phi(a.phi)?;
    let sp = src.spectrum();
    let mapped = spectral_map(&sp, &phi, meta.tolerances.deriv_tol, MAX_ZERO_ORDER)?;
    let tuple = match (a.verify, a.verify_example) {
        (Some(p), _) => Some(read_matrices(p)?),
        (None, Some(e)) => Some(example_tuple(e)),
        (None, None) => None,
    };
    let verify = match tuple {
        Some(t) => {
            let jt = meta.tolerances.jordan();
            let fm = matrix_function(&phi, &complexify(&t)?, &jt)?;
            let direct = joint_spectrum_of_matrix(&fm.value, &jt)?;
            let distance = mapped.match_distance(&direct, POINT_TOL);
            Some(Verification {
                passed: distance.is_some(),
                distance,
                point_tol: POINT_TOL,
                direct: direct.points.iter().map(|p| PointJson { u: [p.u.re, p.u.im], k: p.k }).collect(),
            })
        }
        None => None,
    };
    let failed = verify.as_ref().is_some_and(|v| !v.passed);
    let file = MappedFile {
        spectrum: SpectrumFile::from_spectrum(&mapped, SITE_TOL, meta.clone()),
        phi: a.phi.to_string(),
        verify,
    };
    write_out(a.out, &to_json(&file))?;
    if let Some(p) = a.svg {
        warn_outside(&mapped);
        write_out(&p.to_string_lossy(), &render_spectrum(&sp, RenderMode::MappedPair(&mapped), Some(&meta)))?;
    }
    if failed {
        return Err(Failure::Input("verification failed: spectral_map and the spectrum of phi(M) differ".into()));
    }
    Ok(())
}

fn cmd_resolvent(input: &MatrixInput, grid: usize, cond_max: f64, out: &str, common: &Common) -> Outcome {
    let meta = common.meta()?;
    if !(cond_max.is_finite() && cond_max > 1.0) {
        return Err(Failure::Input("cond-max must exceed 1".into()));
    }
    let t = input.load()?;
    let rows = resolvent_grid(&t, grid, cond_max)?;
    write_out(out, &resolvent_csv(&meta, &rows))
}

#[derive(Serialize)]
struct CauchyOut {
    meta: Meta,
    point: Vec<f64>,
    value: String,
    coeffs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    complex: Option<[f64; 2]>,
    exact: String,
    error: f64,
}

fn cmd_cauchy(dim: usize, function: &str, point: &str, out: &str, common: &Common) -> Outcome {
    let meta = common.meta()?;
    let u = parse_reals(point)?;
    if u.len() != dim {
        return Err(Failure::Input(format!("point needs {dim} coordinates")));
    }
    let (kind, arg) = function.split_once(':').unwrap_or((function, ""));
    let (f, exact): (SphereFunction, Multivector) = if let Some(k) = function.strip_prefix("z^") {
        if dim != 2 {
            return Err(Failure::Input("z^k needs dim 2".into()));
        }
        let k: u32 = k.parse().map_err(|_| Failure::Input(format!("bad power in '{function}'")))?;
        let z = Complex64::new(u[0], u[1]).powu(k);
        (SphereFunction::new(2, move |x| complex_to_even(Complex64::new(x[0], x[1]).powu(k))), complex_to_even(z))
    } else if kind == "const" {
        let c = Multivector::parse(dim, arg)?;
        (SphereFunction::constant(c.clone()), c)
    } else if kind == "basis" {
        let i: usize = arg.parse().map_err(|_| Failure::Input(format!("bad basis index '{arg}'")))?;
        let basis = VBasis::new(dim, 1 + i.min(8))?;
        if i >= basis.len() {
            return Err(Failure::Input(format!("basis index {i} out of range")));
        }
        let want = basis.eval(i, &u);
        (basis.function(i), want)
    } else {
        return Err(Failure::Input(format!("unknown function '{function}'")));
    };
    let nodes = meta.tolerances.quad_nodes;
    let quad = if dim == 2 { QuadratureRule::circle(nodes) } else { QuadratureRule::sphere(nodes.min(61)) };
    let value = cauchy_integral(&f, &u, &quad)?;
    let complex = if dim == 2 && value.odd_part().max_abs() == 0.0 {
        let z = even_to_complex(&value);
        Some([z.re, z.im])
    } else {
        None
    };
    let res = CauchyOut {
        meta,
        point: u,
        value: value.to_string(),
        coeffs: value.coeffs().to_vec(),
        complex,
        exact: exact.to_string(),
        error: value.dist(&exact),
    };
    write_out(out, &to_json(&res))
}

fn cmd_moeb(op: &MoebOp) -> Outcome {
    let body = match op {
        MoebOp::Apply { g, x, common } => {
            let g = parse_moeb(g)?;
            let x = parse_reals(x)?;
            if x.len() != g.dim() {
                return Err(Failure::Input(format!("point needs {} coordinates", g.dim())));
            }
            let point = match g.apply(&Point::finite(&x))? {
                Point::Finite(y) => serde_json::json!(y),
                Point::Infinity => serde_json::json!("infinity"),
            };
            serde_json::json!({ "meta": common.meta()?, "point": point })
        }
        MoebOp::Compose { g, h, common } => {
            let (g, h) = (parse_moeb(g)?, parse_moeb(h)?);
            if g.dim() != h.dim() {
                return Err(Failure::Input("elements have different dimensions".into()));
            }
            serde_json::json!({ "meta": common.meta()?, "element": MoebJson::from(&g.compose(&h)?) })
        }
        MoebOp::Inv { g, common } => {
            serde_json::json!({ "meta": common.meta()?, "element": MoebJson::from(&parse_moeb(g)?.inverse()) })
        }
    };
    write_out("-", &to_json(&body))
}

#[derive(Serialize)]
struct CheckJson {
    suite: &'static str,
    check: String,
    value: f64,
    threshold: f64,
    passed: bool,
    note: String,
}

fn cmd_check(suite: &str, json: bool, common: &Common) -> Outcome {
    let tol = common.tolerances()?;
    let ids: Vec<u8> = if suite == "all" {
        (1..=SUITES.len() as u8).collect()
    } else {
        vec![suite_id(suite)
            .ok_or_else(|| Failure::Input(format!("unknown suite '{suite}'; one of all, {}", SUITES.join(", "))))?]
    };
    let meta = Meta::new(common.seed, tol);
    let mut all_ok = true;
    let mut rows = Vec::new();
    if !json {
        println!("# {}", meta.line());
        println!("suite\tcheck\tvalue\tthreshold\tresult");
    }
    for id in ids {
        // runtimes are left out so the table is reproducible
        let rep = suites::run(id, common.seed, &tol);
        for c in rep.checks {
            all_ok &= c.passed;
            if json {
                rows.push(CheckJson {
                    suite: rep.name,
                    check: c.name,
                    value: c.value,
                    threshold: c.threshold,
                    passed: c.passed,
                    note: c.note,
                });
            } else {
                let r = if c.passed { "pass" } else { "FAIL" };
                println!("{}\t{}\t{:e}\t{:e}\t{r}", rep.name, c.name, c.value, c.threshold);
            }
        }
    }
    if json {
        print!("{}", to_json(&serde_json::json!({ "meta": meta, "checks": rows, "passed": all_ok })));
    }
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Input("some checks failed".into()))
    }
}

fn main() -> ExitCode {
    // clap's own usage code 2 would collide with the ambiguity code
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let res = match &cli.cmd {
        Command::Spectrum { input, out, svg, svg_mode, common } => {
            cmd_spectrum(input, out, svg.as_ref(), *svg_mode, common)
        }
        Command::Specmap { spectrum, phi, out, verify, verify_example, svg, common } => cmd_specmap(
            SpecmapArgs {
                spectrum,
                phi,
                out,
                verify: verify.as_ref(),
                verify_example: *verify_example,
                svg: svg.as_ref(),
            },
            common,
        ),
        Command::Resolvent { input, grid, cond_max, out, common } => {
            cmd_resolvent(input, *grid, *cond_max, out, common)
        }
        Command::Cauchy { dim, function, point, out, common } => {
            cmd_cauchy(usize::from(*dim), function, point, out, common)
        }
        Command::Moeb { op } => cmd_moeb(op),
        Command::Check { suite, json, common } => cmd_check(suite, *json, common),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
