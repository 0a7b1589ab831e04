use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use unisum::constraint::Constraint;
use unisum::dgm::dgm_flaw_demo;
use unisum::experiment::{self, AttackKind, BenchReport, FieldKind, ProtocolKind, Report, RunConfig};
use unisum::field::{Field, Goldilocks, F17};
use unisum::poly::Polynomial;

#[derive(Parser)]
#[command(name = "unisum", version, about = "Run, attack and benchmark univariate sumcheck reductions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One honest run; prints costs and verdict.
    Prove(RunArgs),
    /// Seeded trials, optionally under an attack.
    Run(RunArgs),
    /// Prover operation counts over a range of sizes.
    Bench(BenchArgs),
    /// Compares the uncorrected and corrected recombination checks.
    FlawDemo(FlawArgs),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value = "lfkn-adaptor")]
    protocol: String,
    /// Constraint name: identity, square, cube, product2, r1cs-row or power-sum-D.
    #[arg(long = "g", default_value = "square")]
    g: String,
    /// Number of inputs (only for power-sum-D).
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value = "f64")]
    field: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Digit sizes for direct-kappa: sqrt, binary or e.g. 1,2,3.
    #[arg(long)]
    schedule: Option<String>,
    /// Include wall-clock timings (the report is then not reproducible).
    #[arg(long)]
    timings: bool,
    /// Write the JSON report to this file, or `-` for stdout.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 4)]
    m: u32,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// tamper-sum, tamper-oracle or tamper-message.
    #[arg(long)]
    attack: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 12)]
    m_from: u32,
    #[arg(long, default_value_t = 18)]
    m_to: u32,
    #[arg(long, default_value_t = 1.8)]
    low: f64,
    #[arg(long, default_value_t = 2.2)]
    high: f64,
}

#[derive(Args)]
struct FlawArgs {
    /// Random polynomials per size.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: Option<PathBuf>,
}

fn config(common: &Common, m: u32, trials: usize, attack: Option<&str>) -> Result<RunConfig> {
    let protocol: ProtocolKind = common.protocol.parse()?;
    let field: FieldKind = common.field.parse()?;
    let mut cfg = RunConfig::new(protocol, m, &common.g, field);
    cfg.arity = common.q;
    cfg.seed = common.seed;
    cfg.trials = trials;
    cfg.attack = attack.map(str::parse::<AttackKind>).transpose()?;
    cfg.schedule = common.schedule.clone();
    cfg.timings = common.timings;
    Ok(cfg)
}

fn emit_json(path: &Option<PathBuf>, value: &impl serde::Serialize) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let text = serde_json::to_string_pretty(value)? + "\n";
    if path.as_os_str() == "-" {
        print!("{text}");
    } else {
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn print_report(r: &Report) {
    let h = &r.honest;
    println!(
        "{} over {} with m = {}, g = {} (d = {}, q = {})",
        r.protocol,
        r.field.name(),
        r.m,
        r.constraint,
        r.degree,
        r.arity
    );
    if let Some(s) = &r.schedule {
        println!("schedule: {s:?}");
    }
    println!("honest: {}/{} accepted", h.accepted, h.trials);
    if let Some(reason) = h.first_rejection {
        println!("  first rejection: {reason}");
    }
    let m = &h.metrics;
    let e = &h.expected;
    println!(
        "  rounds {} (expected {}), field elements {} ({}), oracles {} ({}), queries {}{}",
        m.rounds,
        e.rounds,
        m.field_elements,
        e.field_elements,
        m.oracles,
        e.oracles,
        m.queries,
        e.queries.map(|q| format!(" ({q})")).unwrap_or_default()
    );
    println!("  prover field ops {}", m.prover_field_ops);
    println!("  costs {}: {}", if h.metrics_match { "match" } else { "DIFFER" }, e.formula);
    if let Some(a) = &r.attack {
        println!(
            "{}: {}/{} accepted (rate {:.5}, bound {:.5}, envelope {:.5}){}",
            a.attack.name(),
            a.accepted,
            a.applicable,
            a.acceptance_rate,
            a.bound,
            a.envelope,
            if a.within_envelope { "" } else { " OUT OF ENVELOPE" }
        );
    }
    if let Some(t) = &r.timings {
        println!("time: prover {:.3} s, verifier {:.3} s", t.prover_secs, t.verifier_secs);
    }
    println!("{}", if r.passed { "PASS" } else { "FAIL" });
}

fn print_bench(b: &BenchReport) {
    println!("{} over {}, g = {}", b.protocol, b.field.name(), b.constraint);
    println!("{:>4} {:>16} {:>8}", "m", "prover ops", "ratio");
    for row in &b.rows {
        let ratio = row.ratio.map(|r| format!("{r:.4}")).unwrap_or_else(|| "-".into());
        let secs = row.prover_secs.map(|s| format!(" {s:.3} s")).unwrap_or_default();
        println!("{:>4} {:>16} {:>8}{secs}", row.m, row.prover_field_ops, ratio);
    }
    println!(
        "ratios in [{}, {}]: {} (max {:.4})",
        b.window.0,
        b.window.1,
        if b.all_in_window { "yes" } else { "no" },
        b.max_ratio
    );
}

#[derive(serde::Serialize)]
struct FlawSummary {
    example_flawed_at_2: u64,
    example_target_at_2: u64,
    example_corrected_everywhere: bool,
    example_flawed_degree: Option<usize>,
    random_flawed_mismatch: f64,
    random_corrected_mismatch: f64,
}

fn flaw_demo(args: &FlawArgs) -> Result<bool> {
    let f17 = F17::from_u64;
    let g = Constraint::<F17>::builtin("square")?;
    let f = Polynomial::from_u64s(&[11, 10, 8, 6]);
    let report = dgm_flaw_demo(&[f], 2, &g)?;
    let all: Vec<F17> = (0..17).map(f17).collect();
    let flawed_at_2 = report.flawed.evaluate(f17(2)).value();
    let target_at_2 = report.target.evaluate(f17(2)).value();
    let corrected_everywhere = report.corrected_mismatch_rate(&all) == 0.0;
    println!("g = square over f17, f = 11 + 10x + 8x^2 + 6x^3");
    println!("  uncorrected recombination at 2: {flawed_at_2}, h(2) = {target_at_2}");
    println!(
        "  uncorrected degree {:?}, corrected identity holds at every point: {corrected_everywhere}",
        report.flawed.degree()
    );

    let g = Constraint::<Goldilocks>::builtin("square")?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (mut flawed, mut corrected, mut total) = (0.0, 0.0, 0usize);
    for m in 2..=6u32 {
        for _ in 0..args.samples {
            let f = Polynomial::random(&mut rng, 1 << m);
            let r = dgm_flaw_demo(&[f], m, &g)?;
            let pts: Vec<Goldilocks> = (0..64).map(|_| Goldilocks::random(&mut rng)).collect();
            flawed += r.flawed_mismatch_rate(&pts);
            corrected += r.corrected_mismatch_rate(&pts);
            total += 1;
        }
    }
    let flawed = flawed / total as f64;
    let corrected = corrected / total as f64;
    println!("random f over f64 (m = 2..6): uncorrected check fails at {:.2}% of points, corrected at {:.2}%", 100.0 * flawed, 100.0 * corrected);
    emit_json(
        &args.json,
        &FlawSummary {
            example_flawed_at_2: flawed_at_2,
            example_target_at_2: target_at_2,
            example_corrected_everywhere: corrected_everywhere,
            example_flawed_degree: report.flawed.degree(),
            random_flawed_mismatch: flawed,
            random_corrected_mismatch: corrected,
        },
    )?;
    Ok(flawed_at_2 != target_at_2 && corrected_everywhere && flawed >= 0.99 && corrected == 0.0)
}

fn main_inner() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Prove(args) | Command::Run(args) => {
            let cfg = config(&args.common, args.m, args.trials, args.attack.as_deref())?;
            let report = experiment::run(&cfg)?;
            if !matches!(&args.common.json, Some(p) if p.as_os_str() == "-") {
                print_report(&report);
            }
            emit_json(&args.common.json, &report)?;
            Ok(report.passed)
        }
        Command::Bench(args) => {
            if args.m_from > args.m_to {
                bail!("empty size range {}..={}", args.m_from, args.m_to);
            }
            let cfg = config(&args.common, args.m_from, 1, None)?;
            let ms: Vec<u32> = (args.m_from..=args.m_to).collect();
            let report = experiment::bench(&cfg, &ms, (args.low, args.high))?;
            if !matches!(&args.common.json, Some(p) if p.as_os_str() == "-") {
                print_bench(&report);
            }
            emit_json(&args.common.json, &report)?;
            Ok(report.all_in_window)
        }
        Command::FlawDemo(args) => flaw_demo(&args),
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
