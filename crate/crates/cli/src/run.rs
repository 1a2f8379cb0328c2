//! The four commands. Each resolves its config, does the work through the
//! library, and writes self-describing outputs. All fallible paths carry
//! the exit code the failure class maps to.

use crate::config::Resolved;
use crate::{domain, io_failure, Failure};
use bnpmix::datagen::generate;
use bnpmix::gibbs::{gibbs_run_chains, histogram_ratios, GibbsRun};
use bnpmix::posterior::{bound_shape, exact_posterior_with, ExactOptions};
use bnpmix::verify::{run_verification, VerifyOptions};
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

pub fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| io_failure(format!("cannot write {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// Reads a data file: one value per line, '#' comments and blank lines
/// ignored.
pub fn read_data_file(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| io_failure(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        values.push(line.parse::<f64>().map_err(|_| {
            domain(format!(
                "{} line {}: cannot parse {line:?} as a number",
                path.display(),
                idx + 1
            ))
        })?);
    }
    Ok(values)
}

/// Data for inference commands: an input file wins over the generator.
pub fn load_data(input: Option<&PathBuf>, resolved: &Resolved) -> Result<Vec<f64>, Failure> {
    match input {
        Some(path) => read_data_file(path),
        None => Ok(generate(&resolved.generator_spec())
            .map_err(Failure::from)?
            .values),
    }
}

pub fn cmd_generate(resolved: &Resolved, out: Option<&Path>) -> Result<(), Failure> {
    let dataset = generate(&resolved.generator_spec())?;
    let mut text = format!("# bnpmix generate {}\n", resolved.describe_generator());
    for v in &dataset.values {
        writeln!(text, "{v}").unwrap();
    }
    emit(out, &text)
}

pub struct ExactIo {
    pub options: ExactOptions,
    pub input: Option<PathBuf>,
    pub out_dir: PathBuf,
}

pub fn cmd_exact(resolved: &Resolved, args: &ExactIo) -> Result<(), Failure> {
    let model = resolved.model()?;
    let data = load_data(args.input.as_ref(), resolved)?;
    let start = Instant::now();
    let post = exact_posterior_with(&data, &model, &args.options)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut csv =
        String::from("s,log_weight,prob,ratio,ratio_x_s,ratio_x_s2,bound_shape,quotient\n");
    for k in 1..=post.n() {
        let shape = bound_shape(&model, k);
        write!(csv, "{k},{},{},", post.log_weight(k), post.prob(k)).unwrap();
        match post.ratio_opt(k) {
            Some(r) => writeln!(
                csv,
                "{r},{},{},{shape},{}",
                r * k as f64,
                r * (k * k) as f64,
                r / shape
            )
            .unwrap(),
            None => writeln!(csv, ",,,{shape},").unwrap(),
        }
    }
    let csv_path = args.out_dir.join("posterior.csv");
    write_file(&csv_path, &csv)?;

    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "exact",
        "config": resolved.echo_json(args.input.as_deref()),
        "options": {
            "enumeration_limit": args.options.enumeration_limit,
            "allow_outside_support": args.options.allow_outside_support,
        },
        "n": post.n(),
        "mode_k": post.mode(),
        "mean_k": post.mean(),
        "log_evidence": post.log_evidence(),
        "runtime_ms": runtime_ms,
        "outputs": {"posterior_csv": csv_path.display().to_string()},
    });
    write_file(
        &args.out_dir.join("summary.json"),
        &format!("{}\n", serde_json::to_string_pretty(&summary).unwrap()),
    )
}

pub struct GibbsIo {
    pub input: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub chains: usize,
    pub support_floor: u64,
    pub randomize_sweep_order: bool,
}

pub fn cmd_gibbs(resolved: &Resolved, args: &GibbsIo) -> Result<(), Failure> {
    let model = resolved.model()?;
    let data = load_data(args.input.as_ref(), resolved)?;
    let config = resolved.gibbs_config(args.randomize_sweep_order);
    let start = Instant::now();
    let run: GibbsRun = gibbs_run_chains(&data, &model, &config, args.chains)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    let rows = histogram_ratios(&run.histogram, args.support_floor);
    let mut csv = String::from("s,count,prob,ratio,ratio_x_s,ratio_x_s2,stable_flag\n");
    for row in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            row.s,
            row.count,
            row.prob,
            row.ratio,
            row.ratio_times_s,
            row.ratio_times_s2,
            u8::from(row.stable)
        )
        .unwrap();
    }
    let csv_path = args.out_dir.join("histogram.csv");
    write_file(&csv_path, &csv)?;

    let mut trace = format!(
        "# bnpmix gibbs n={} burn_in={} samples={} thin={} chains={} seed={}\n",
        data.len(),
        config.burn_in,
        config.samples,
        config.thin,
        args.chains,
        config.seed
    );
    for k in &run.trace {
        writeln!(trace, "{k}").unwrap();
    }
    let trace_path = args.out_dir.join("trace.txt");
    write_file(&trace_path, &trace)?;

    let stable_rows = rows.iter().filter(|r| r.stable).count();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "gibbs",
        "config": resolved.echo_json(args.input.as_deref()),
        "rng": {"algorithm": "chacha8", "seed": config.seed, "streams": args.chains},
        "n": data.len(),
        "mode_k": run.histogram.mode(),
        "mean_k": run.histogram.mean(),
        "retained": run.histogram.total(),
        "support_floor": args.support_floor,
        "stable_rows": stable_rows,
        "unstable_rows": rows.len() - stable_rows,
        "runtime_ms": runtime_ms,
        "outputs": {
            "histogram_csv": csv_path.display().to_string(),
            "trace": trace_path.display().to_string(),
        },
    });
    write_file(
        &args.out_dir.join("summary.json"),
        &format!("{}\n", serde_json::to_string_pretty(&summary).unwrap()),
    )
}

pub fn cmd_verify(opts: &VerifyOptions, out: Option<&Path>) -> Result<(), Failure> {
    let start = Instant::now();
    let report = run_verification(opts)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let suites: Vec<_> = report
        .suites
        .iter()
        .map(|s| {
            json!({
                "name": s.name,
                "cases": s.cases,
                "failures": s.failures,
                "first_counterexample": s.first_counterexample,
            })
        })
        .collect();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "options": {
            "floor_cases": opts.floor_cases,
            "identity_datasets": opts.identity_datasets,
            "identity_n": opts.identity_n,
            "seed": opts.seed,
            "marginal_bias": opts.marginal_bias,
        },
        "suites": suites,
        "passed": report.passed(),
        "runtime_ms": runtime_ms,
    });
    emit(out, &format!("{}\n", serde_json::to_string_pretty(&summary).unwrap()))?;
    if report.passed() {
        Ok(())
    } else {
        let broken = report.suites.iter().find(|s| !s.passed()).unwrap();
        Err(Failure {
            code: 4,
            message: format!(
                "verification failed in suite {:?}: {}",
                broken.name,
                broken.first_counterexample.as_deref().unwrap_or("no counterexample recorded")
            ),
        })
    }
}
