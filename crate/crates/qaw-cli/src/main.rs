//! `qaw`: verification workbench for truncated q-Fock constructions.
//!
//! Exit codes: 0 all requested checks pass, 1 a suite or check failed,
//! 2 configuration or usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use qaw_cli::config::{Arithmetic, ConfigError, RunConfig, Suite};
use qaw_cli::render::Render;
use qaw_cli::suites::{build_space, run_verify};
use qaw_core::classify::{classify_deformation, describe, lambda_value, ClassifyOptions};
use qaw_core::dualvars::{conjugate_pairing_check, conjugate_series};
use qaw_core::fock::word_from_index;
use qaw_core::wick::{moment, moment_pairings};
use qaw_core::{C64, CRat, FockSpace};

#[derive(Parser)]
#[command(name = "qaw", version, about = "q-Fock verification workbench")]
struct Cli {
    /// JSON configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Select a suite (repeatable); overrides the config's suite list
    #[arg(long = "suite", global = true)]
    suites: Vec<String>,
    /// Scalar ring: "exact" or "float64"
    #[arg(long, global = true)]
    arithmetic: Option<String>,
    /// Truncation level N
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Global residual tolerance
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Seed for the deterministic base-change matrices
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the selected verification suites (default)
    Verify,
    /// Compute a mixed moment by both routes; letters are 1-based
    Moments { letters: Vec<usize> },
    /// Print the conjugate vector and its pairing-check table; i is 1-based
    Conjugate { i: usize },
    /// Classify the factor type from the generator's spectrum
    Classify,
    /// Certify the norm estimates and the majorant series
    Bounds,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(a) = &cli.arithmetic {
        cfg.arithmetic = match a.as_str() {
            "exact" => Arithmetic::Exact,
            "float64" => Arithmetic::Float64,
            other => {
                return Err(ConfigError(format!(
                    "flag --arithmetic: expected \"exact\" or \"float64\", got \"{other}\""
                )))
            }
        };
    }
    if let Some(n) = cli.truncation {
        cfg.truncation = n;
    }
    if let Some(t) = cli.tolerance {
        cfg.tolerance = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if !cli.suites.is_empty() {
        let mut suites = Vec::new();
        for s in &cli.suites {
            let suite = Suite::from_str(s)
                .ok_or_else(|| ConfigError(format!("flag --suite: unknown suite \"{s}\"")))?;
            if !suites.contains(&suite) {
                suites.push(suite);
            }
        }
        suites.sort();
        cfg.suites = suites;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode, ConfigError> {
    let cfg = load_config(&cli)?;
    match cli.cmd.as_ref().unwrap_or(&Cmd::Verify) {
        Cmd::Verify => cmd_verify(&cli, &cfg),
        Cmd::Moments { letters } => with_mode(&cfg, |c| cmd_moments::<CRat>(c, letters), |c| {
            cmd_moments::<C64>(c, letters)
        }),
        Cmd::Conjugate { i } => with_mode(&cfg, |c| cmd_conjugate::<CRat>(c, *i), |c| {
            cmd_conjugate::<C64>(c, *i)
        }),
        Cmd::Classify => cmd_classify(&cfg),
        Cmd::Bounds => cmd_bounds(&cfg),
    }
}

fn with_mode(
    cfg: &RunConfig,
    exact: impl FnOnce(&RunConfig) -> Result<ExitCode, ConfigError>,
    float: impl FnOnce(&RunConfig) -> Result<ExitCode, ConfigError>,
) -> Result<ExitCode, ConfigError> {
    match cfg.arithmetic {
        Arithmetic::Exact => exact(cfg),
        Arithmetic::Float64 => float(cfg),
    }
}

fn emit(fragment: &Value, table: &str) {
    let mut text = serde_json::to_string_pretty(fragment).expect("fragment serialization");
    text.push('\n');
    print!("{text}");
    println!("{table}");
}

fn cmd_verify(cli: &Cli, cfg: &RunConfig) -> Result<ExitCode, ConfigError> {
    let report = run_verify(cfg)?;
    let rendered = report.render_json();
    match &cli.output {
        Some(path) => {
            std::fs::write(path, &rendered)
                .map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))?;
        }
        None => print!("{rendered}"),
    }
    eprint!("{}", report.render_table());
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// 1-based generator letters from the command line, validated.
fn parse_letters(letters: &[usize], d: usize, n: usize) -> Result<Vec<usize>, ConfigError> {
    if letters.is_empty() {
        return Err(ConfigError("moments: need at least one letter".into()));
    }
    if letters.len() > n {
        return Err(ConfigError(format!(
            "word length {} exceeds truncation {n}",
            letters.len()
        )));
    }
    letters
        .iter()
        .map(|&l| {
            if (1..=d).contains(&l) {
                Ok(l - 1)
            } else {
                Err(ConfigError(format!("letter {l} outside 1..={d}")))
            }
        })
        .collect()
}

fn cmd_moments<S: Render>(cfg: &RunConfig, letters: &[usize]) -> Result<ExitCode, ConfigError> {
    let f: FockSpace<S> = build_space(cfg)?;
    let word = parse_letters(letters, f.dim(), f.truncation())?;
    let m1 = moment(&f, &word).map_err(|e| ConfigError(e.to_string()))?;
    let m2 = moment_pairings(&f, &word);
    let fragment = json!({
        "schema": 1,
        "word": letters,
        "matrix_route": m1.to_json(),
        "partition_route": m2.to_json(),
    });
    let table = format!(
        "moment of A_{}\n  matrix route:    {}\n  partition route: {}",
        letters
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" A_"),
        m1.to_display(),
        m2.to_display()
    );
    emit(&fragment, &table);
    Ok(ExitCode::SUCCESS)
}

fn cmd_conjugate<S: Render>(cfg: &RunConfig, i: usize) -> Result<ExitCode, ConfigError> {
    let f: FockSpace<S> = build_space(cfg)?;
    let d = f.dim();
    if !(1..=d).contains(&i) {
        return Err(ConfigError(format!("index {i} outside 1..={d}")));
    }
    let xi = conjugate_series(&f, i - 1).map_err(|e| ConfigError(e.to_string()))?;

    let mut coeff_json = Vec::new();
    let mut table = format!("conjugate vector xi_{i} (nonzero coefficients)\n");
    table.push_str(&format!("{:<10} {:<14} value\n", "level", "word"));
    for n in 0..=f.truncation() {
        for idx in 0..f.level_dim(n) {
            let z = xi.coeff(n, idx);
            if z.is_zero() {
                continue;
            }
            let word: Vec<usize> = f.word_at(n, idx).iter().map(|l| l + 1).collect();
            coeff_json.push(json!({
                "level": n,
                "word": word,
                "value": z.to_json(),
            }));
            let wtxt = word
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join("");
            table.push_str(&format!("{n:<10} {wtxt:<14} {}\n", z.to_display()));
        }
    }

    let mut pairing_json = Vec::new();
    table.push_str(&format!(
        "\npairing check <xi_{i}, A_w O> vs quasi-free sum\n{:<14} {:<28} {:<28} diff\n",
        "word", "lhs", "rhs"
    ));
    let mut max_diff = 0.0f64;
    for len in 1..=f.truncation().min(3) {
        for idx in 0..d.pow(len as u32) {
            let word = word_from_index(d, len, idx);
            let (lhs, rhs) = conjugate_pairing_check(&f, &xi, i - 1, &word)
                .map_err(|e| ConfigError(e.to_string()))?;
            let diff = lhs.sub(&rhs).approx().norm();
            max_diff = max_diff.max(diff);
            let shown: Vec<usize> = word.iter().map(|l| l + 1).collect();
            pairing_json.push(json!({
                "word": shown,
                "lhs": lhs.to_json(),
                "rhs": rhs.to_json(),
                "diff": diff,
            }));
            let wtxt = shown
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join("");
            table.push_str(&format!(
                "{wtxt:<14} {:<28} {:<28} {diff:.3e}\n",
                lhs.to_display(),
                rhs.to_display()
            ));
        }
    }
    let fragment = json!({
        "schema": 1,
        "index": i,
        "coefficients": coeff_json,
        "pairing_checks": pairing_json,
    });
    emit(&fragment, &table);
    Ok(if max_diff <= cfg.tolerance {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_classify(cfg: &RunConfig) -> Result<ExitCode, ConfigError> {
    // classification reads only the spectrum, so float construction serves
    // both arithmetic modes (rationals stay exact inside NumVal)
    let f: FockSpace<C64> = build_space(cfg)?;
    let opts = ClassifyOptions {
        max_denominator: cfg.max_denominator,
        tolerance: cfg.cf_tolerance,
    };
    let label =
        classify_deformation(f.deformation(), opts).map_err(|e| ConfigError(e.to_string()))?;
    let spectrum: Vec<Value> = f
        .deformation()
        .spectrum()
        .iter()
        .map(qaw_cli::config::numval_to_value)
        .collect();
    let mut fragment = json!({
        "schema": 1,
        "type": describe(&label),
        "exact": label.exact,
        "spectrum": spectrum,
    });
    let mut table = format!("factor type: {}", describe(&label));
    if let Some(l) = lambda_value(&label) {
        fragment["generator"] = json!(l);
        table.push_str(&format!("\ndiscrete generator: {l}"));
    }
    emit(&fragment, &table);
    Ok(ExitCode::SUCCESS)
}

fn cmd_bounds(cfg: &RunConfig) -> Result<ExitCode, ConfigError> {
    let f: FockSpace<C64> = build_space(cfg)?;
    let r = qaw_core::bounds::check_bounds(&f, cfg.effective_m_max())
        .map_err(|e| ConfigError(e.to_string()))?;
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "lhs": c.lhs,
                "rhs": c.rhs,
                "slack": c.slack(),
            })
        })
        .collect();
    let fragment = json!({
        "schema": 1,
        "constants": {"c": r.c, "d": r.d_const, "e": r.e, "b": r.b},
        "checks": checks,
        "majorant": {
            "m0": r.majorant_m0,
            "partial_sum": r.majorant_partial_sum,
            "tail_bound": r.majorant_tail_bound,
        },
        "passed": r.passed,
    });
    let mut table = format!(
        "constants: C={:.6} D={:.6} E={:.6} B={:.6}\n{:<28} {:>14} {:>14} {:>12}\n",
        r.c, r.d_const, r.e, r.b, "check", "measured", "bound", "slack"
    );
    for c in &r.checks {
        table.push_str(&format!(
            "{:<28} {:>14.6e} {:>14.6e} {:>12.3e}\n",
            c.name,
            c.lhs,
            c.rhs,
            c.slack()
        ));
    }
    table.push_str(&format!(
        "majorant: first decreasing shell m0={} partial sum={:.6e} tail bound={:.6e}\noverall: {}",
        r.majorant_m0,
        r.majorant_partial_sum,
        r.majorant_tail_bound,
        if r.passed { "pass" } else { "FAIL" }
    ));
    emit(&fragment, &table);
    Ok(if r.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
