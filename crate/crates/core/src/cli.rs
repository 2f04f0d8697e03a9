//! Command-line front end: `ml`, `solve`, `verify`, `dispersion`, `contour`.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 configuration error,
//! 3 numerical error. A `--config FILE` of `key = value` lines supplies any long flag
//! (and optionally `command`); flags given on the command line win.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::contour_solver::{
    build_contour, degenerate_scenario, diagonal_scenario, initial_limit_check, scalar_scenario, second_order_scenario,
    verify_pde, ContourData, LimitReport, PdeReport, PencilProblem,
};
use crate::degenerate_solver::{solve_modewise, solve_series, ModelSpec, Route};
use crate::physics_models::{build_model, default_formulation, default_grid, dispersion, Formulation};
use crate::report::write_jsonl;
use crate::spectral_calculus::{write_csv, write_snapshot, SpectralField, SpectralGrid};
use crate::special_functions::MittagLeffler;
use crate::symbol_algebra::{CutoffSpec, PolynomialMatrix, RegularizerSpec};
use crate::verify::{all_records, run_suite_with, VerifyOptions};
use crate::{Error, Result, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "degenfrac", version, about = "Degenerate fractional Cauchy problems: solvers and checks")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate E_{β,γ}(z) and print CSV.
    Ml(MlArgs),
    /// Solve a named or JSON model and write DFRC1 and CSV snapshots.
    Solve(SolveArgs),
    /// Run the invariant suite and write a JSON-lines report.
    Verify(VerifyArgs),
    /// Print the per-mode spectrum of M(ξ) as CSV.
    Dispersion(DispersionArgs),
    /// Run a pencil scenario: PDE residual plus the ε-sweep of the initial limit.
    Contour(ContourArgs),
}

#[derive(Args, Debug)]
struct MlArgs {
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Evaluation points such as 1, -2.5, 1+2i, 3i (comma-separated or repeated).
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    z: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Registry name, or path to a JSON problem file.
    #[arg(long)]
    model: String,
    /// Model parameter override, key=value (repeatable).
    #[arg(long = "param")]
    params: Vec<String>,
    /// scalar_alpha2 or matricial_first_order.
    #[arg(long)]
    formulation: Option<String>,
    /// Grid sizes such as 32x32 (period 2π per axis).
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Evaluation points (real times or complex z).
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    times: Vec<String>,
    /// modewise or series.
    #[arg(long, default_value = "modewise")]
    route: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Optional DFRC1 snapshot of the physical-side data x′; random data otherwise.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value = "degenfrac_out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Restrict model-dependent checks to these models (repeatable).
    #[arg(long = "model")]
    models: Vec<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Criterion ids to run, e.g. 1,2,9 (all by default).
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u32>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DispersionArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ContourArgs {
    /// scalar, degenerate, diagonal, second_order, or a pencil JSON file.
    #[arg(long, default_value = "scalar")]
    scenario: String,
    /// JSON data file {"x": [[[re, im], ...], ...], "y": ...} for a pencil file.
    #[arg(long)]
    data: Option<PathBuf>,
    /// ε values of the sweep, strictly decreasing.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
    eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,2")]
    times: Vec<f64>,
    #[arg(long, default_value_t = 32)]
    points: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses argv (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let res = match cli.command {
        Command::Ml(a) => cmd_ml(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Dispersion(a) => cmd_dispersion(a),
        Command::Contour(a) => cmd_contour(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

const COMMANDS: [&str; 5] = ["ml", "solve", "verify", "dispersion", "contour"];

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got '{line}'", i + 1)))?;
        let k = k.trim();
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(Error::Config(format!("line {}: bad key '{k}'", i + 1)));
        }
        out.push((k.replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

/// Splices config-file entries into argv right after the subcommand.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config: Option<String> = None;
    let mut it = args.into_iter();
    let prog = it.next().unwrap_or_else(|| "degenfrac".into());
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(it.next().ok_or_else(|| Error::Config("--config needs a path".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        let mut out = vec![prog];
        out.extend(rest);
        return Ok(out);
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::Config(format!("cannot read config {path}: {e}")))?;
    let entries = parse_config(&text)?;
    let mut command = entries.iter().find(|(k, _)| k == "command").map(|(_, v)| v.clone());
    let cli_command = rest.first().filter(|a| COMMANDS.contains(&a.as_str())).cloned();
    match (&command, &cli_command) {
        (Some(c), Some(d)) if c != d => {
            return Err(Error::Config(format!("config selects '{c}' but the command line selects '{d}'")))
        }
        (_, Some(d)) => {
            command = Some(d.clone());
            rest.remove(0);
        }
        (None, None) => return Err(Error::Config("no command given on the command line or in the config".into())),
        _ => {}
    }
    let mut out = vec![prog, command.expect("set above")];
    for (k, v) in entries.into_iter().filter(|(k, _)| k != "command") {
        out.push(format!("--{k}"));
        out.push(v);
    }
    out.extend(rest);
    Ok(out)
}

/// Parses 1, -2.5, 1+2i, 1-i, 3i, -i, 1e-3+2e1i.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Config(format!("cannot parse complex number '{s}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok(C64::new(body[..k].parse::<f64>().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

pub fn parse_grid(s: &str) -> Result<Vec<usize>> {
    let sizes = s
        .split(['x', 'X'])
        .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad grid '{s}' (expected e.g. 32x32)"))))
        .collect::<Result<Vec<_>>>()?;
    SpectralGrid::new(sizes.clone(), vec![1.0; sizes.len()]).map_err(|e| Error::Config(format!("bad grid '{s}': {e}")))?;
    Ok(sizes)
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_ml(a: MlArgs) -> Result<i32> {
    let points = a.z.iter().map(|s| parse_complex(s)).collect::<Result<Vec<_>>>()?;
    let ml = MittagLeffler::with(a.beta, a.gamma).map_err(|e| Error::Config(e.to_string()))?;
    let mut w = output(&a.out)?;
    writeln!(w, "beta,gamma,z_re,z_im,value_re,value_im")?;
    for z in points {
        let v = ml.eval(z)?;
        writeln!(w, "{},{},{},{},{},{}", a.beta, a.gamma, z.re, z.im, v.re, v.im)?;
    }
    w.flush()?;
    Ok(EXIT_OK)
}

/// JSON problem file for `--model path.json`.
#[derive(Deserialize)]
struct ProblemDoc {
    p1: serde_json::Value,
    p2: serde_json::Value,
    alpha: f64,
    regularizer: RegularizerSpec,
    cutoff: Option<CutoffSpec>,
    #[serde(default)]
    singular_set: String,
    /// Grid sizes; period 2π per axis.
    grid: Option<Vec<usize>>,
}

struct LoadedModel {
    name: String,
    spec: ModelSpec,
    named: Option<crate::physics_models::NamedModel>,
    grid: SpectralGrid,
}

fn load_model(a: &ModelArgs) -> Result<LoadedModel> {
    let grid_override = a.grid.as_deref().map(parse_grid).transpose()?;
    let tau = 2.0 * std::f64::consts::PI;
    let looks_like_file = a.model.ends_with(".json") || Path::new(&a.model).is_file();
    if looks_like_file {
        if !a.params.is_empty() || a.formulation.is_some() {
            return Err(Error::Config("--param and --formulation apply to registry models only".into()));
        }
        let text = fs::read_to_string(&a.model).map_err(|e| Error::Config(format!("cannot read {}: {e}", a.model)))?;
        let doc: ProblemDoc = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", a.model)))?;
        let p1 = PolynomialMatrix::from_json(&doc.p1.to_string()).map_err(|e| Error::Config(format!("p1: {e}")))?;
        let p2 = PolynomialMatrix::from_json(&doc.p2.to_string()).map_err(|e| Error::Config(format!("p2: {e}")))?;
        let reg = RegularizerSpec::new(doc.regularizer.a, doc.regularizer.kprime, doc.regularizer.d)
            .map_err(|e| Error::Config(e.to_string()))?;
        let cutoff = doc.cutoff.map(|c| CutoffSpec::new(c.inner_radius, c.outer_radius)).transpose()
            .map_err(|e| Error::Config(e.to_string()))?;
        let spec = ModelSpec::new(p1, p2, doc.alpha, reg, cutoff, doc.singular_set)?;
        let sizes = grid_override.or(doc.grid).unwrap_or_else(|| vec![16; spec.n()]);
        let grid = SpectralGrid::new(sizes.clone(), vec![tau; sizes.len()])?;
        if grid.n != spec.n() {
            return Err(Error::Config(format!("grid has {} axes, model has {} variables", grid.n, spec.n())));
        }
        return Ok(LoadedModel { name: a.model.clone(), spec, named: None, grid });
    }
    let mut params = BTreeMap::new();
    for kv in &a.params {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("--param expects key=value, got '{kv}'")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Config(format!("parameter {k} is not a number")))?;
        params.insert(k.trim().to_string(), v);
    }
    let formulation = match &a.formulation {
        Some(f) => Formulation::parse(f)?,
        None => default_formulation(&a.model)?,
    };
    let named = build_model(&a.model, &params, formulation)?;
    let grid = match grid_override {
        Some(sizes) => SpectralGrid::new(sizes.clone(), vec![tau; sizes.len()])?,
        None => default_grid(&a.model)?,
    };
    if grid.n != named.spec.n() {
        return Err(Error::Config(format!("grid has {} axes, model '{}' has {} variables", grid.n, a.model, named.spec.n())));
    }
    Ok(LoadedModel { name: a.model.clone(), spec: named.spec.clone(), named: Some(named), grid })
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    model: &'a str,
    grid: &'a [usize],
    route: &'a str,
    seed: u64,
    points: Vec<[f64; 2]>,
    files: Vec<String>,
    series_truncation: Option<usize>,
    series_tail: Option<f64>,
}

fn cmd_solve(a: SolveArgs) -> Result<i32> {
    let model = load_model(&a.model)?;
    let points = a.times.iter().map(|s| parse_complex(s)).collect::<Result<Vec<_>>>()?;
    if a.route != "modewise" && a.route != "series" {
        return Err(Error::Config(format!("unknown route '{}' (modewise or series)", a.route)));
    }
    let x = match &a.data {
        Some(p) => {
            let f = fs::File::open(p).map_err(|e| Error::Config(format!("cannot open {}: {e}", p.display())))?;
            let x = crate::spectral_calculus::read_snapshot(io::BufReader::new(f), model.grid.extent.clone())?;
            if x.grid.sizes != model.grid.sizes || x.m != model.spec.m() {
                return Err(Error::Config("data snapshot does not match the model grid or component count".into()));
            }
            x
        }
        None => SpectralField::random(&model.grid, model.spec.m(), a.seed),
    };
    let bundle = if a.route == "series" {
        solve_series(&model.spec, &x, &points, None)?
    } else {
        solve_modewise(&model.spec, &x, &points)?
    };
    fs::create_dir_all(&a.out)?;
    let mut files = Vec::new();
    for (i, z) in points.iter().enumerate() {
        let phys = bundle.physical(i)?;
        let stem = format!("u_{i:03}");
        let bin = a.out.join(format!("{stem}.dfrc"));
        let csv = a.out.join(format!("{stem}.csv"));
        write_snapshot(&phys, io::BufWriter::new(fs::File::create(&bin)?))?;
        write_csv(&phys, io::BufWriter::new(fs::File::create(&csv)?))?;
        files.push(format!("{stem}.dfrc"));
        files.push(format!("{stem}.csv"));
        eprintln!("z = {z}: wrote {} and {}", bin.display(), csv.display());
    }
    let (trunc, tail) = match bundle.route {
        Route::Series { truncation, tail, tail_warning } => {
            if tail_warning {
                eprintln!("warning: series tail {tail:e} exceeds 1e-10");
            }
            (Some(truncation), Some(tail))
        }
        Route::Modewise => (None, None),
    };
    let summary = SolveSummary {
        model: &model.name,
        grid: &model.grid.sizes,
        route: &a.route,
        seed: a.seed,
        points: points.iter().map(|z| [z.re, z.im]).collect(),
        files,
        series_truncation: trunc,
        series_tail: tail,
    };
    fs::write(a.out.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let mut opts = VerifyOptions { seed: a.seed, ..Default::default() };
    if !a.models.is_empty() {
        opts.models = a.models.clone();
    }
    if !a.criteria.is_empty() {
        opts.criteria = a.criteria.clone();
    }
    opts.grid = a.grid.as_deref().map(parse_grid).transpose()?;
    opts.validate()?;
    let outcomes = run_suite_with(&opts, |o| {
        let status = if o.pass() { "PASS" } else { "FAIL" };
        eprintln!("[{status}] {:>2} {} ({} checks, {:.2}s)", o.id, o.title, o.records.len(), o.seconds);
    });
    let records = all_records(&outcomes);
    let mut w = output(&a.out)?;
    write_jsonl(&records, &mut w)?;
    w.flush()?;
    if records.iter().any(|r| r.numerical_error) {
        return Ok(EXIT_NUMERICAL);
    }
    Ok(if outcomes.iter().all(|o| o.pass()) { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn cmd_dispersion(a: DispersionArgs) -> Result<i32> {
    let model = load_model(&a.model)?;
    let m = model.spec.m();
    let mut w = output(&a.out)?;
    let mut head: Vec<String> = (0..model.grid.n).map(|k| format!("xi{k}")).collect();
    for k in 0..m {
        head.push(format!("lambda{k}_re"));
        head.push(format!("lambda{k}_im"));
    }
    writeln!(w, "{}", head.join(","))?;
    for g in 0..model.grid.total() {
        let xi = model.grid.freq(g);
        // Modes in the cutoff plateau (the singular set) carry no solution.
        if model.spec.weight(&xi) == 0.0 {
            continue;
        }
        let mut ev = match &model.named {
            Some(n) => dispersion(n, &xi)?,
            None => crate::special_functions::complex_eigenvalues(&model.spec.generator(&xi)?),
        };
        ev.sort_by(|p, q| p.im.total_cmp(&q.im).then(p.re.total_cmp(&q.re)));
        let mut row: Vec<String> = xi.iter().map(|v| v.to_string()).collect();
        for z in ev {
            row.push(z.re.to_string());
            row.push(z.im.to_string());
        }
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(EXIT_OK)
}

#[derive(Deserialize)]
struct DataDoc {
    x: Vec<Vec<[f64; 2]>>,
    y: Option<Vec<Vec<[f64; 2]>>>,
}

fn load_scenario(a: &ContourArgs) -> Result<(PencilProblem, ContourData)> {
    let built = match a.scenario.as_str() {
        "scalar" => Some(scalar_scenario()),
        "degenerate" => Some(degenerate_scenario([1.0, 0.0])),
        "diagonal" => Some(diagonal_scenario(a.seed)),
        "second_order" => Some(second_order_scenario()),
        _ => None,
    };
    if let Some(b) = built {
        if a.data.is_some() {
            return Err(Error::Config("--data applies to pencil files only".into()));
        }
        return b;
    }
    let text = fs::read_to_string(&a.scenario).map_err(|e| {
        Error::Config(format!(
            "unknown scenario '{}' (scalar, degenerate, diagonal, second_order, or a pencil JSON file): {e}",
            a.scenario
        ))
    })?;
    let p = PencilProblem::from_json(&text)?;
    let vecs = |v: Vec<Vec<[f64; 2]>>| v.into_iter().map(|r| r.into_iter().map(|c| C64::new(c[0], c[1])).collect()).collect();
    let data = match &a.data {
        Some(path) => {
            let d: DataDoc = serde_json::from_str(&fs::read_to_string(path)?)?;
            ContourData::new(vecs(d.x), d.y.map(vecs))
        }
        None => {
            let ones = vec![vec![C64::new(1.0, 0.0); p.m()]; p.q_n() as usize];
            let y = (p.zeta > 1.0).then(|| ones.clone());
            ContourData::new(ones, y)
        }
    };
    Ok((p, data))
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ContourLine<'a> {
    Pde { scenario: &'a str, seed: u64, pass: bool, #[serde(flatten)] report: PdeReport },
    Limit { scenario: &'a str, seed: u64, pass: bool, #[serde(flatten)] report: LimitReport },
}

fn cmd_contour(a: ContourArgs) -> Result<i32> {
    if a.eps.is_empty() || a.eps.iter().any(|&e| !(e > 0.0)) || a.eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("--eps must be positive and strictly decreasing".into()));
    }
    if a.times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::Config("--times must be non-negative".into()));
    }
    let (p, data) = load_scenario(&a)?;
    let eps_min = *a.eps.last().expect("nonempty");
    let quad = build_contour(&p, a.points, eps_min)?;
    let mut lines = Vec::new();
    let pde = verify_pde(&p, &quad, &data, eps_min, &a.times)?;
    let pde_pass = pde.relative_residual <= 1e-10 && pde.max_doubling_shift <= 1e-8;
    lines.push(ContourLine::Pde { scenario: &a.scenario, seed: a.seed, pass: pde_pass, report: pde });
    let mut all_pass = pde_pass;
    let qn = p.q_n() as usize;
    for omega in 0..qn {
        for l in 0..qn as u32 {
            let rep = initial_limit_check(&p, &quad, &data, &a.eps, l, omega)?;
            let pass = if l as usize == omega {
                rep.monotone && rep.limit_error <= 1e-4 * rep.scale
            } else {
                rep.limit_error <= 1e-4
            };
            all_pass &= pass;
            lines.push(ContourLine::Limit { scenario: &a.scenario, seed: a.seed, pass, report: rep });
        }
    }
    let mut w = output(&a.out)?;
    for line in &lines {
        writeln!(w, "{}", serde_json::to_string(line)?)?;
    }
    w.flush()?;
    Ok(if all_pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1").unwrap(), C64::new(1.0, 0.0));
        assert_eq!(parse_complex("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(parse_complex("-3.5-i").unwrap(), C64::new(-3.5, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e1i").unwrap(), C64::new(1e-3, 20.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("32x32").unwrap(), vec![32, 32]);
        assert!(parse_grid("30x32").is_err());
        assert!(parse_grid("x").is_err());
    }

    #[test]
    fn config_lines() {
        let c = parse_config("# comment\ncommand = verify\nmodel=rossby\n\nseed = 7\n").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c[1], ("model".to_string(), "rossby".to_string()));
        assert!(parse_config("no equals sign").is_err());
    }

    #[test]
    fn config_expands_after_command() {
        let dir = std::env::temp_dir().join(format!("degenfrac-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        fs::write(&path, "command = ml\nbeta = 1\n").unwrap();
        let args = ["degenfrac", "--config", path.to_str().unwrap(), "--z", "1"].map(String::from).to_vec();
        let out = expand_config(args).unwrap();
        assert_eq!(out, ["degenfrac", "ml", "--beta", "1", "--z", "1"]);
        fs::remove_dir_all(&dir).unwrap();
    }
}
