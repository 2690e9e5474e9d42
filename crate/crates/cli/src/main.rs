mod svg;

use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::json;

use tropath::counterexample::{
    build_lp, sublevel_system, trop_path_closed, trop_path_dynamic, upper_box, CexParams, LpInstance,
};
use tropath::curvature::{merged_curvature, right_angle_count, tropical_lower_bound, CurvatureReport};
use tropath::io::{LpDocument, NumTrace, TropTrace};
use tropath::numeric::{instantiate, trace_path};
use tropath::tropical::{TropScalar, TropVector};
use tropath::troppoly::{barycenter, is_sign_generic, sublevel, Genericity};
use tropath::Rational;

#[derive(Parser)]
#[command(name = "tropath", version, about = "Tropical and numeric central paths of linear programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Closed,
    Dynamic,
    Barycenter,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Euclid,
    Tropical,
}

#[derive(Subcommand)]
enum Command {
    /// Write the LP_r document.
    GenCex {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        extended: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the tropical central path on a grid `a:b:n`.
    TropPath {
        #[arg(long)]
        lp: PathBuf,
        #[arg(long)]
        grid: String,
        #[arg(long, value_enum, default_value = "closed")]
        method: Method,
        /// Upper box for the barycenter method, comma separated.
        #[arg(long = "box")]
        upper: Option<String>,
        #[arg(long)]
        with_dual: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace the central path of the LP at parameter `t`.
    NumPath {
        #[arg(long)]
        lp: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        grid: String,
        /// Rescale by the tropical point at λ = 2 before solving.
        #[arg(long)]
        scaling: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest deviation between a tropical trace and a numeric trace.
    Compare {
        #[arg(long)]
        trop: PathBuf,
        #[arg(long)]
        num: PathBuf,
        /// Base for taking logarithms of raw columns without a `_logt` image.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Total curvature of the polygonal curve stored in a trace.
    Curvature {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_enum, default_value = "euclid")]
        mode: Mode,
        /// Keep only the rows at λ = 4k/2^R.
        #[arg(long, value_name = "R")]
        subdivision: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
    },
    /// SVG chart of trace columns against λ or against another column.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        columns: Vec<String>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sign genericity of the extended matrix (A b).
    CheckSignGeneric {
        #[arg(long)]
        lp: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Compute(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Compute(e)
    }
}

type Outcome = Result<(), Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

/// Parses `p/q`, an integer or a decimal exactly.
fn parse_exact(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = if int.is_empty() || int == "-" { format!("{int}0{frac}") } else { format!("{int}{frac}") };
        return format!("{digits}/1{}", "0".repeat(frac.len())).parse().ok();
    }
    s.parse().ok()
}

fn parse_grid(text: &str) -> Result<Vec<Rational>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts[..] else {
        return usage(format!("grid must be a:b:n, got {text:?}"));
    };
    let (Some(a), Some(b)) = (parse_exact(a), parse_exact(b)) else {
        return usage(format!("bad grid endpoints in {text:?}"));
    };
    let n: usize = match n.trim().parse() {
        Ok(n) if n >= 1 => n,
        _ => return usage(format!("bad grid size in {text:?}")),
    };
    if n == 1 {
        return Ok(vec![a]);
    }
    let step = (&b - &a) / Rational::from_integer((n as i64 - 1).into());
    Ok((0..n).map(|k| &a + &step * Rational::from_integer((k as i64).into())).collect())
}

fn load_lp(path: &Path) -> anyhow::Result<LpInstance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = LpDocument::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(doc.to_instance()?)
}

fn open_csv(path: &Path) -> anyhow::Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("reading {}", path.display()))?))
}

fn sink(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(text: &str) {
    let _ = writeln!(io::stdout(), "{text}");
}

fn gen_cex(r: u32, extended: bool, out: &Option<PathBuf>) -> Outcome {
    let p = match CexParams::new(r, extended) {
        Ok(p) => p,
        Err(e) => return usage(e.to_string()),
    };
    let lp = build_lp(p).map_err(anyhow::Error::from)?;
    let doc = LpDocument::from_instance(&lp, Some(format!("lp_{r}"))).map_err(anyhow::Error::from)?;
    let mut w = sink(out)?;
    writeln!(w, "{}", doc.to_json().map_err(anyhow::Error::from)?).map_err(anyhow::Error::from)?;
    Ok(())
}

fn parse_box(text: &str, dim: usize) -> Result<TropVector, Failure> {
    let entries: Option<Vec<TropScalar>> = text
        .split(',')
        .map(|s| if s.trim() == "-inf" { Some(TropScalar::NegInf) } else { parse_exact(s).map(TropScalar::Finite) })
        .collect();
    match entries {
        Some(v) if v.len() == dim => Ok(TropVector::new(v)),
        Some(v) => usage(format!("box has {} entries, expected {dim}", v.len())),
        None => usage(format!("bad box {text:?}")),
    }
}

fn trop_path(
    lp_path: &Path,
    grid: &str,
    method: Method,
    upper: Option<&str>,
    with_dual: bool,
    out: &Option<PathBuf>,
) -> Outcome {
    let grid = parse_grid(grid)?;
    let lp = load_lp(lp_path)?;
    let trace = match (method, lp.family) {
        (Method::Closed | Method::Dynamic, None) => {
            return usage("methods closed and dynamic need a generated LP_r document");
        }
        (Method::Closed, Some(p)) => {
            let pts: Vec<_> = grid.iter().map(|l| trop_path_closed(p, l)).collect();
            TropTrace::from_path(&lp.coordinate_names(), &pts, with_dual)
        }
        (Method::Dynamic, Some(p)) => {
            let pts: Vec<_> = grid.iter().map(|l| trop_path_dynamic(p, l)).collect();
            TropTrace::from_path(&lp.coordinate_names(), &pts, with_dual)
        }
        (Method::Barycenter, family) => barycenter_trace(&lp, family, &grid, upper, with_dual)?,
    };
    let mut w = sink(out)?;
    trace.write(&mut w).map_err(anyhow::Error::from)?;
    Ok(())
}

fn barycenter_trace(
    lp: &LpInstance,
    family: Option<CexParams>,
    grid: &[Rational],
    upper: Option<&str>,
    with_dual: bool,
) -> Result<TropTrace, Failure> {
    let (names, top) = match (family, upper) {
        (None, Some(text)) => (lp.var_names.clone(), parse_box(text, lp.nvars())?),
        (Some(_), Some(text)) => {
            let names = lp.coordinate_names();
            let top = parse_box(text, names.len())?;
            (names, top)
        }
        (Some(p), None) => (lp.coordinate_names(), upper_box(p)),
        (None, None) => return usage("barycenter on a general document needs --box"),
    };
    let base = if family.is_some() { None } else { Some(lp.tropical_inequalities().map_err(anyhow::Error::from)?) };
    let c = lp.objective_valuation(false);
    let mut rows = Vec::with_capacity(grid.len());
    for lam in grid {
        let sys = match &base {
            None => sublevel_system(lp, lam),
            Some(s) => sublevel(s, &c, &TropScalar::Finite(lam.clone())),
        }
        .map_err(anyhow::Error::from)?;
        let x = barycenter(&sys, &top).map_err(|e| anyhow!("barycenter at lambda = {lam}: {e}"))?;
        let mut vals = x.into_inner();
        if with_dual {
            let dual = vals
                .iter()
                .map(|v| match v {
                    TropScalar::Finite(q) => Ok(TropScalar::Finite(lam - q)),
                    TropScalar::NegInf => Err(anyhow!("dual undefined at lambda = {lam}: a coordinate is -inf")),
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            vals.extend(dual);
        }
        rows.push((lam.clone(), vals));
    }
    let mut columns = names.clone();
    if with_dual {
        columns.extend(names.iter().map(|n| format!("{n}_d")));
    }
    Ok(TropTrace { columns, rows })
}

fn num_path(lp_path: &Path, t: f64, grid: &str, scaling: bool, out: &Option<PathBuf>) -> Outcome {
    if !(t > 1.0) {
        return usage(format!("t must exceed 1, got {t}"));
    }
    let grid: Vec<f64> = parse_grid(grid)?.iter().map(to_f64).collect();
    let lp = load_lp(lp_path)?;
    let hint = match (scaling, lp.family) {
        (false, _) => None,
        (true, Some(p)) => Some(trop_path_dynamic(p, &Rational::from_integer(2.into())).primal_vector().to_f64()),
        (true, None) => return usage("--scaling needs a generated LP_r document"),
    };
    let rlp = instantiate(&lp, t).map_err(anyhow::Error::from)?;
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&i, &j| grid[j].total_cmp(&grid[i]));
    let descending: Vec<f64> = order.iter().map(|&i| grid[i]).collect();
    if descending.windows(2).any(|w| w[0] == w[1]) {
        return usage("grid points must be distinct");
    }
    let samples = trace_path(&rlp, &descending, hint.as_deref()).map_err(anyhow::Error::from)?;
    let mut in_order = vec![None; grid.len()];
    for (s, &i) in samples.into_iter().zip(&order) {
        in_order[i] = Some(s);
    }
    let samples: Vec<_> = in_order.into_iter().flatten().collect();
    let trace = NumTrace::from_samples(&lp.coordinate_names(), &samples, t).map_err(anyhow::Error::from)?;
    let mut w = sink(out)?;
    trace.write(&mut w).map_err(anyhow::Error::from)?;
    Ok(())
}

fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn compare(trop: &Path, num: &Path, t: Option<f64>) -> Outcome {
    let tt = TropTrace::read(open_csv(trop)?).map_err(anyhow::Error::from)?;
    let nt = NumTrace::read(open_csv(num)?).map_err(anyhow::Error::from)?;
    if let Some(t) = t {
        if !(t > 1.0) {
            return usage(format!("t must exceed 1, got {t}"));
        }
    }
    let lam_col = nt.column("lambda").map_err(anyhow::Error::from)?;
    if tt.rows.len() != nt.rows.len() {
        return Err(anyhow!("grids differ: {} tropical rows, {} numeric rows", tt.rows.len(), nt.rows.len()).into());
    }
    let mut lookup = Vec::with_capacity(tt.columns.len());
    for c in &tt.columns {
        if let Ok(k) = nt.column(&format!("{c}_logt")) {
            lookup.push((k, None));
        } else if let Ok(k) = nt.column(c) {
            lookup.push((k, t.map(f64::ln)));
        } else {
            return Err(anyhow!("column {c} has no counterpart in {}", num.display()).into());
        }
    }
    let mut per_lambda = Vec::with_capacity(tt.rows.len());
    let mut worst: f64 = 0.0;
    for ((lam, vals), row) in tt.rows.iter().zip(&nt.rows) {
        let l = to_f64(lam);
        if (l - row[lam_col]).abs() > 1e-9 * l.abs().max(1.0) {
            return Err(anyhow!("grids differ at lambda = {lam} (numeric {})", row[lam_col]).into());
        }
        let mut dev: f64 = 0.0;
        for (v, &(k, log)) in vals.iter().zip(&lookup) {
            let y = match log {
                Some(lt) => row[k].ln() / lt,
                None => row[k],
            };
            let x = v.to_f64();
            let d = if x == f64::NEG_INFINITY && y == f64::NEG_INFINITY { 0.0 } else { (x - y).abs() };
            dev = dev.max(if d.is_nan() { f64::INFINITY } else { d });
        }
        worst = worst.max(dev);
        per_lambda.push(json!({ "lambda": l, "max_deviation": dev }));
    }
    let report = json!({ "dinfty": worst, "rows": tt.rows.len(), "per_lambda": per_lambda });
    emit(&serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
    Ok(())
}

fn on_subdivision(lam: f64, r: u32) -> bool {
    let k = lam * (1u64 << r) as f64 / 4.0;
    (0.0..=2.0 + 1e-12).contains(&lam) && (k - k.round()).abs() < 1e-9
}

fn pick_columns(all: &[String], wanted: &[String], default: impl Fn(&str) -> bool) -> anyhow::Result<Vec<usize>> {
    if wanted.is_empty() {
        return Ok((0..all.len()).filter(|&k| default(&all[k])).collect());
    }
    wanted
        .iter()
        .map(|w| all.iter().position(|c| c == w).ok_or_else(|| anyhow!("unknown column {w}")))
        .collect()
}

fn curvature(csv: &Path, mode: Mode, subdivision: Option<u32>, columns: &[String]) -> Outcome {
    if subdivision == Some(0) {
        return usage("--subdivision needs R >= 1");
    }
    let keep = |l: f64| subdivision.is_none_or(|r| on_subdivision(l, r));
    let report = match mode {
        Mode::Euclid => {
            let nt = NumTrace::read(open_csv(csv)?).map_err(anyhow::Error::from)?;
            let lam = nt.column("lambda").map_err(anyhow::Error::from)?;
            let cols = pick_columns(&nt.columns, columns, |c| {
                !matches!(c, "lambda" | "mu") && !c.ends_with("_d") && !c.ends_with("_logt")
            })?;
            let (params, points): (Vec<f64>, Vec<Vec<f64>>) = nt
                .rows
                .iter()
                .filter(|row| keep(row[lam]))
                .map(|row| (row[lam], cols.iter().map(|&k| row[k]).collect()))
                .unzip();
            merged_curvature(&points, &params).map_err(anyhow::Error::from)?
        }
        Mode::Tropical => {
            let tt = TropTrace::read(open_csv(csv)?).map_err(anyhow::Error::from)?;
            let cols = pick_columns(&tt.columns, columns, |_| true)?;
            let (params, points): (Vec<f64>, Vec<TropVector>) = tt
                .rows
                .iter()
                .filter(|(l, _)| keep(to_f64(l)))
                .map(|(l, vals)| (to_f64(l), TropVector::new(cols.iter().map(|&k| vals[k].clone()).collect())))
                .unzip();
            let total = tropical_lower_bound(&points).map_err(anyhow::Error::from)?;
            let angles = points
                .windows(3)
                .map(|w| right_angle_count(w).map(|n| n as f64 * FRAC_PI_2))
                .collect::<Result<Vec<_>, _>>()
                .map_err(anyhow::Error::from)?;
            CurvatureReport { total, angles, subdivision: params }
        }
    };
    emit(&serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
    Ok(())
}

fn plot(csv: &Path, columns: &[String], x: Option<&str>, out: &Path) -> Outcome {
    let nt = NumTrace::read(open_csv(csv)?).map_err(anyhow::Error::from)?;
    if nt.rows.is_empty() {
        return Err(anyhow!("{} has no data rows", csv.display()).into());
    }
    let x_name = x.unwrap_or("lambda");
    let xk = nt.column(x_name).map_err(|_| anyhow!("unknown column {x_name}"))?;
    let ys = pick_columns(&nt.columns, columns, |_| false)?;
    let chart = svg::Chart {
        x_label: x_name.to_string(),
        y_label: if ys.len() == 1 { nt.columns[ys[0]].clone() } else { "value".into() },
        series: ys
            .iter()
            .map(|&k| svg::Series {
                label: nt.columns[k].clone(),
                points: nt.rows.iter().map(|row| (row[xk], row[k])).collect(),
            })
            .collect(),
    };
    let text = chart.render().ok_or_else(|| anyhow!("nothing finite to plot"))?;
    std::fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn check_sign_generic(lp_path: &Path) -> Outcome {
    let lp = load_lp(lp_path)?;
    let w = lp.a.with_column(&lp.b).map_err(anyhow::Error::from)?;
    let rep = is_sign_generic(&w).map_err(anyhow::Error::from)?;
    let verdict = match rep.verdict {
        Genericity::SignGeneric => "sign_generic",
        Genericity::NotGeneric => "not_generic",
    };
    let witness = rep.witness.map(|(rows, cols)| json!({ "rows": rows, "cols": cols }));
    emit(&json!({ "verdict": verdict, "witness": witness }).to_string());
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::GenCex { r, extended, out } => gen_cex(r, extended, &out),
        Command::TropPath { lp, grid, method, upper, with_dual, out } => {
            trop_path(&lp, &grid, method, upper.as_deref(), with_dual, &out)
        }
        Command::NumPath { lp, t, grid, scaling, out } => num_path(&lp, t, &grid, scaling, &out),
        Command::Compare { trop, num, t } => compare(&trop, &num, t),
        Command::Curvature { csv, mode, subdivision, columns } => curvature(&csv, mode, subdivision, &columns),
        Command::Plot { csv, columns, x, out } => plot(&csv, &columns, x.as_deref(), &out),
        Command::CheckSignGeneric { lp } => check_sign_generic(&lp),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tropath::tropical::rat;

    #[test]
    fn exact_numbers() {
        assert_eq!(parse_exact("2.5"), Some(rat(5, 2)));
        assert_eq!(parse_exact("-0.25"), Some(rat(-1, 4)));
        assert_eq!(parse_exact("-.5"), Some(rat(-1, 2)));
        assert_eq!(parse_exact("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_exact("7"), Some(rat(7, 1)));
        assert_eq!(parse_exact("1."), None);
        assert_eq!(parse_exact("x"), None);
    }

    #[test]
    fn grids() {
        let g = parse_grid("0:2:5").ok().unwrap();
        assert_eq!(g, vec![rat(0, 1), rat(1, 2), rat(1, 1), rat(3, 2), rat(2, 1)]);
        assert_eq!(parse_grid("1:0:1").ok().unwrap(), vec![rat(1, 1)]);
        assert!(parse_grid("0:2").is_err());
        assert!(parse_grid("0:2:0").is_err());
    }

    #[test]
    fn subdivision_membership() {
        assert!(on_subdivision(0.5, 3));
        assert!(!on_subdivision(0.25, 3));
        assert!(on_subdivision(2.0, 3));
        assert!(!on_subdivision(2.5, 3));
    }
}
