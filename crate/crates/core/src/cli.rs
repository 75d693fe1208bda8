//! Command-line front end. The `treespace` binary only calls [`main`].

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frechet::{frechet_mean_with, FrechetProblem, Tolerances};
use crate::geodesic::distance;
use crate::newick::{format_number, read_trees, serialize_tree};
use crate::smooth::{fit_smooth, min_rep_sequence, summarize, RegressionData, RepresentativeSequence};
use crate::split::{LabelSet, Split};
use crate::sticky::{classify_t3, perpendicular_diagnostic, stick_time_experiment, t3_mean, StickinessVerdict, T3Sample, Witness};
use crate::tree::TreePoint;

#[derive(Debug, Parser)]
#[command(name = "treespace", version, about = "Geodesics, Frechet means and smoothing for phylogenetic trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Solver tolerances as a JSON file; missing fields keep their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct TreeInput {
    /// Newick file, one tree per line.
    #[arg(long)]
    pub trees: PathBuf,
    /// Largest leaf label; inferred from the first tree if absent.
    #[arg(long)]
    pub r: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Geodesic distances between trees.
    Distance {
        #[command(flatten)]
        input: TreeInput,
        /// Only these pairs, e.g. `0,1`; repeatable. Default: all pairs.
        #[arg(long = "pair", value_parser = parse_pair)]
        pairs: Vec<(usize, usize)>,
    },
    /// Weighted Frechet mean with optimality and stickiness report.
    Mean {
        #[command(flatten)]
        input: TreeInput,
        /// One weight per line.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Kernel smoothing of trees against a scalar predictor.
    Smooth {
        #[command(flatten)]
        input: TreeInput,
        /// One predictor value per line, aligned with the trees.
        #[arg(long)]
        predictors: PathBuf,
        /// Bandwidths, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<f64>,
        /// `data` (the predictor values), `a:b:n`, or a comma list.
        #[arg(long, default_value = "data")]
        grid: String,
    },
    /// Minimum-length representative topology sequence.
    Repseq {
        #[command(flatten)]
        input: TreeInput,
    },
    /// Stickiness of four-leaf samples.
    Sticky {
        /// Sample lines `page length [p0 p1 p2 p3]`.
        #[arg(long, conflicts_with = "trees", required_unless_present = "trees")]
        sample: Option<PathBuf>,
        /// Newick trees on leaves 0..=3.
        #[arg(long)]
        trees: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = StickyMode::Classify)]
        mode: StickyMode,
        #[arg(long, default_value_t = 200)]
        max_n: usize,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StickyMode {
    Classify,
    Experiment,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected i,j")?;
    Ok((a.trim().parse().map_err(|_| "bad index")?, b.trim().parse().map_err(|_| "bad index")?))
}

/// Outcome of a command: text to emit and whether a solver gave up.
struct Output {
    text: String,
    nonconverged: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, nonconverged: false }
    }
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        Error::Syntax { offset, msg } => Error::Syntax { offset, msg: format!("{}: {msg}", path.display()) },
        Error::InvalidTree(m) => Error::InvalidTree(format!("{}: {m}", path.display())),
        Error::InvalidArgument(m) => Error::InvalidArgument(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn load_trees(input: &TreeInput) -> Result<Vec<TreePoint>> {
    let labels = input.r.map(LabelSet::new).transpose()?;
    let trees = read_trees(&input.trees, labels).map_err(|e| with_path(&input.trees, e))?;
    if trees.is_empty() {
        return Err(Error::InvalidArgument(format!("{}: no trees", input.trees.display())));
    }
    Ok(trees)
}

/// Numbers, one per line; blank lines and `#` comments are skipped.
fn read_numbers(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| with_path(path, e.into()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(line.parse().map_err(|_| Error::InvalidArgument(format!("{}:{}: bad number `{line}`", path.display(), i + 1)))?);
    }
    Ok(out)
}

fn parse_grid(spec: &str, xs: &[f64]) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad grid `{spec}`"));
    if spec == "data" {
        let mut g = xs.to_vec();
        g.sort_by(f64::total_cmp);
        g.dedup();
        return Ok(g);
    }
    if let [a, b, n] = spec.split(':').collect::<Vec<_>>()[..] {
        let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        let n: usize = n.parse().map_err(|_| bad())?;
        return match n {
            0 => Err(bad()),
            1 => Ok(vec![a]),
            _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
        };
    }
    let mut g: Vec<f64> = spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
    g.sort_by(f64::total_cmp);
    Ok(g)
}

fn load_tolerances(path: Option<&Path>) -> Result<Tolerances> {
    match path {
        None => Ok(Tolerances::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| with_path(p, e.into()))?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

/// Round every float to 12 significant digits.
fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x: f64 = format_number(n.as_f64().unwrap()).parse().unwrap();
            *v = json!(x);
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_json_text(mut v: Value) -> String {
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn split_name(s: &Split) -> String {
    s.to_string()
}

fn verdict_json(v: &StickinessVerdict) -> Value {
    let witness = match &v.witness {
        Witness::Moments(m) => json!({ "moments": m }),
        Witness::Direction { splits, derivative } => json!({
            "derivative": derivative,
            "direction": splits.iter().map(|(s, q)| json!({ "split": split_name(s), "weight": q })).collect::<Vec<_>>(),
        }),
        Witness::None => Value::Null,
    };
    json!({ "kind": v.kind, "witness": witness })
}

fn repseq_json(seq: &RepresentativeSequence) -> Value {
    json!(seq
        .blocks
        .iter()
        .map(|b| json!({
            "first": b.start + 1,
            "last": b.end + 1,
            "splits": b.topology.splits().iter().map(split_name).collect::<Vec<_>>(),
        }))
        .collect::<Vec<_>>())
}

fn cmd_distance(input: &TreeInput, pairs: &[(usize, usize)], format: Format) -> Result<Output> {
    let trees = load_trees(input)?;
    let n = trees.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two trees".into()));
    }
    let pairs: Vec<(usize, usize)> =
        if pairs.is_empty() { (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect() } else { pairs.to_vec() };
    if let Some((i, j)) = pairs.iter().find(|(i, j)| *i >= n || *j >= n) {
        return Err(Error::InvalidArgument(format!("pair ({i},{j}) out of range for {n} trees")));
    }
    log::info!("{} distances over {n} trees", pairs.len());
    let d: Vec<f64> = pairs.par_iter().map(|&(i, j)| distance(&trees[i], &trees[j])).collect::<Result<_>>()?;
    Ok(Output::ok(match format {
        Format::Csv => {
            let mut s = String::from("i,j,d\n");
            for ((i, j), d) in pairs.iter().zip(&d) {
                s.push_str(&format!("{i},{j},{}\n", format_number(*d)));
            }
            s
        }
        Format::Json => to_json_text(json!(pairs.iter().zip(&d).map(|((i, j), d)| json!({ "i": i, "j": j, "d": d })).collect::<Vec<_>>())),
    }))
}

fn cmd_mean(input: &TreeInput, weights: Option<&Path>, tol: &Tolerances, format: Format) -> Result<Output> {
    let trees = load_trees(input)?;
    let w = weights.map(read_numbers).transpose()?;
    let p = FrechetProblem::new(trees, w)?;
    log::info!("mean of {} trees", p.len());
    let res = frechet_mean_with(&p, None, tol)?;
    let nonconverged = !res.trace.converged();
    if nonconverged {
        log::warn!("solver stopped with {:?}; reporting the best iterate", res.trace.termination);
    }
    let text = match format {
        Format::Csv => {
            let mut s = String::from("iteration,kind,value,num_splits\n");
            for r in &res.trace.records {
                let kind = serde_json::to_value(r.kind)?;
                s.push_str(&format!("{},{},{},{}\n", r.iteration, kind.as_str().unwrap_or(""), format_number(r.value), r.num_splits));
            }
            s
        }
        Format::Json => {
            let sticky = match perpendicular_diagnostic(&res.mean, &p, tol.delta) {
                Ok(v) => verdict_json(&v),
                Err(e) => {
                    log::warn!("stickiness diagnostic skipped: {e}");
                    Value::Null
                }
            };
            to_json_text(json!({
                "mean": serialize_tree(&res.mean),
                "value": res.value,
                "termination": res.trace.termination,
                "optimality": res.report,
                "stickiness": sticky,
                "trace": res.trace.records,
            }))
        }
    };
    Ok(Output { text, nonconverged })
}

fn cmd_smooth(input: &TreeInput, predictors: &Path, hs: &[f64], grid: &str, tol: &Tolerances, format: Format) -> Result<Output> {
    let trees = load_trees(input)?;
    let xs = read_numbers(predictors)?;
    if xs.len() != trees.len() {
        return Err(Error::InvalidArgument(format!(
            "{} has {} values but {} has {} trees",
            predictors.display(),
            xs.len(),
            input.trees.display(),
            trees.len()
        )));
    }
    let d = RegressionData::new(xs, trees)?;
    let grid = parse_grid(grid, d.xs())?;
    log::info!("smoothing {} trees at {} grid points for {} bandwidths", d.len(), grid.len(), hs.len());
    let smooths: Vec<_> = hs.par_iter().map(|&h| fit_smooth(&d, &grid, h, tol)).collect::<Result<_>>()?;
    let nonconverged = smooths.iter().any(|s| !s.failures.is_empty());
    let mut per_h = Vec::new();
    for s in &smooths {
        let fitted: Vec<TreePoint> = s.fits.iter().flatten().cloned().collect();
        let seq = if fitted.is_empty() { None } else { Some(min_rep_sequence(&fitted)?) };
        per_h.push((s, summarize(s), seq));
    }
    let text = match format {
        Format::Csv => {
            let mut out = String::from("h,x,num_edges,total_length,newick\n");
            for (s, rows, _) in &per_h {
                for (row, fit) in rows.iter().zip(&s.fits) {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        format_number(s.h),
                        format_number(row.x),
                        row.num_edges.map(|n| n.to_string()).unwrap_or_default(),
                        row.total_length.map(format_number).unwrap_or_default(),
                        fit.as_ref().map(serialize_tree).unwrap_or_default()
                    ));
                }
            }
            out
        }
        Format::Json => to_json_text(json!(per_h
            .iter()
            .map(|(s, rows, seq)| json!({
                "h": s.h,
                "kernel": s.kernel,
                "summary": rows,
                "fits": s.fits.iter().map(|f| f.as_ref().map(serialize_tree)).collect::<Vec<_>>(),
                "failures": s.failures,
                "repseq": seq.as_ref().map(repseq_json),
            }))
            .collect::<Vec<_>>())),
    };
    Ok(Output { text, nonconverged })
}

fn cmd_repseq(input: &TreeInput, format: Format) -> Result<Output> {
    let trees = load_trees(input)?;
    let seq = min_rep_sequence(&trees)?;
    Ok(Output::ok(match format {
        Format::Csv => {
            let mut s = String::from("block,first,last,splits\n");
            for (k, b) in seq.blocks.iter().enumerate() {
                let names: Vec<String> = b.topology.splits().iter().map(split_name).collect();
                s.push_str(&format!("{},{},{},\"{}\"\n", k + 1, b.start + 1, b.end + 1, names.join(" ")));
            }
            s
        }
        Format::Json => to_json_text(json!({ "blocks": repseq_json(&seq) })),
    }))
}

fn load_sample(sample: Option<&Path>, trees: Option<&Path>) -> Result<T3Sample> {
    match (sample, trees) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).map_err(|e| with_path(p, e.into()))?;
            T3Sample::parse(&text).map_err(|e| with_path(p, e))
        }
        (None, Some(p)) => {
            let t = read_trees(p, Some(LabelSet::new(3)?)).map_err(|e| with_path(p, e))?;
            T3Sample::from_trees(&t)
        }
        (None, None) => Err(Error::InvalidArgument("give --sample or --trees".into())),
    }
}

fn cmd_sticky(
    sample: Option<&Path>,
    trees: Option<&Path>,
    mode: StickyMode,
    (max_n, reps, seed): (usize, usize, u64),
    format: Option<Format>,
) -> Result<Output> {
    let s = load_sample(sample, trees)?;
    match mode {
        StickyMode::Classify => {
            let v = classify_t3(&s);
            let mean = t3_mean(&s);
            let perp = perpendicular_diagnostic(&mean, &s.to_problem()?, 1e-10)?;
            let value = json!({
                "kind": v.kind,
                "moments": match v.witness { Witness::Moments(m) => m, _ => unreachable!() },
                "mean": serialize_tree(&mean),
                "perpendicular": verdict_json(&perp),
            });
            Ok(Output::ok(match format.unwrap_or(Format::Json) {
                Format::Json => to_json_text(value),
                Format::Csv => {
                    let m = &value["moments"];
                    format!(
                        "kind,m1,m2,m3\n{},{},{},{}\n",
                        value["kind"].as_str().unwrap_or(""),
                        format_number(m[0].as_f64().unwrap()),
                        format_number(m[1].as_f64().unwrap()),
                        format_number(m[2].as_f64().unwrap())
                    )
                }
            }))
        }
        StickyMode::Experiment => {
            log::info!("stick-time experiment: {reps} reps up to n = {max_n}, seed {seed}");
            let t = stick_time_experiment(&s, max_n, reps, seed)?;
            Ok(Output::ok(match format.unwrap_or(Format::Csv) {
                Format::Csv => t.histogram_csv(),
                Format::Json => to_json_text(json!({
                    "seed": seed,
                    "target_page": t.target_page,
                    "times": t.times,
                    "fraction_stuck": (1..=max_n).map(|n| t.fraction_stuck(n)).collect::<Vec<_>>(),
                })),
            }))
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let tol = load_tolerances(cli.config.as_deref())?;
    match &cli.command {
        Command::Distance { input, pairs } => cmd_distance(input, pairs, cli.format.unwrap_or(Format::Csv)),
        Command::Mean { input, weights } => cmd_mean(input, weights.as_deref(), &tol, cli.format.unwrap_or(Format::Json)),
        Command::Smooth { input, predictors, h, grid } => {
            cmd_smooth(input, predictors, h, grid, &tol, cli.format.unwrap_or(Format::Csv))
        }
        Command::Repseq { input } => cmd_repseq(input, cli.format.unwrap_or(Format::Json)),
        Command::Sticky { sample, trees, mode, max_n, reps, seed } => {
            cmd_sticky(sample.as_deref(), trees.as_deref(), *mode, (*max_n, *reps, *seed), cli.format)
        }
    }
}

/// Run a parsed command line; returns the process exit status
/// (0 success, 1 input error, 2 non-convergence).
pub fn run(cli: &Cli) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let result = pool.install(|| dispatch(cli));
    let out = match result {
        Ok(o) => o,
        Err(Error::NonConvergence(m)) => {
            eprintln!("error: did not converge: {m}");
            return 2;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let written = match &cli.out {
        Some(p) => std::fs::write(p, &out.text),
        None => std::io::stdout().lock().write_all(out.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    if out.nonconverged {
        eprintln!("warning: solver did not converge; output holds the best iterate");
        return 2;
    }
    0
}

/// Entry point for the binary: logging from `TREESPACE_LOG`, then [`run`].
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::new().filter("TREESPACE_LOG")).init();
    run(&Cli::parse())
}
