//! Command-line front end: restore punctuation, evaluate decoders over a
//! corpus, run the speedup analytics, train n-gram models, and probe model
//! servers.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;

use fpod::config::Config;
use fpod::engine::{DecoderKind, Engine, ModelSpec};
use fpod::eval::report::{analytics_for_corpus, build_report};
use fpod::eval::{
    estimate_alpha, evaluate, expected_tokens, improvement_factor, load_corpus,
    reference_texts, simulate_expected_tokens, Strictness,
};
use fpod::model::{serve_check, CausalModel, NGramModel};
use fpod::token::PunctuationSet;
use fpod::window::WindowSpec;

#[derive(Parser)]
#[command(name = "fpod", version, about = "Punctuation restoration via forward-pass-only decoding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Restore punctuation in text or a file.
    Punctuate(PunctuateArgs),
    /// Score a decoder against a punctuated corpus and measure throughput.
    Eval(EvalArgs),
    /// Closed-form speedup model plus its Monte Carlo cross-check.
    Analyze(AnalyzeArgs),
    /// Train and persist an n-gram model from a punctuated corpus.
    Train(TrainArgs),
    /// Probe a model server for wire-protocol conformance.
    ServeCheck(ServeCheckArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Decoding strategy: ar, sd, fpod, or rfpod.
    #[arg(long, default_value = "rfpod")]
    decoder: String,
    /// Main model: oracle:<corpus.jsonl>[,order=N], ngram:<file>, remote:<host:port>.
    #[arg(long)]
    model: String,
    /// Assistant model for speculative decoding (same syntax as --model).
    #[arg(long)]
    assistant: Option<String>,
    /// Config file (TOML); FPOD_CONFIG is honored when the flag is absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Punctuation marks, e.g. ",.?" or ",.?!;:".
    #[arg(long)]
    puncts: Option<String>,
    /// Window core length in tokens.
    #[arg(long)]
    window_core: Option<usize>,
    /// Window pad length per side in tokens.
    #[arg(long)]
    window_pad: Option<usize>,
    /// Recursion cap for rfpod.
    #[arg(long)]
    max_passes: Option<u64>,
    /// Seed echoed into reports and used by randomized analytics.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl CommonArgs {
    fn config(&self) -> Result<Config> {
        let mut config = Config::resolve(self.config.as_deref())?;
        if let Some(spec) = &self.puncts {
            config.puncts = PunctuationSet::parse(spec)?;
        }
        if self.window_core.is_some() || self.window_pad.is_some() {
            config.window = WindowSpec::new(
                self.window_core.unwrap_or(config.window.core_len),
                self.window_pad.unwrap_or(config.window.pad_len),
            );
        }
        if let Some(cap) = self.max_passes {
            config.policy.max_passes = cap.max(1);
        }
        Ok(config)
    }

    fn decoder(&self) -> DecoderKind {
        match DecoderKind::parse(&self.decoder) {
            Some(kind) => kind,
            None => usage_error(&format!(
                "unknown decoder {:?}; expected ar, sd, fpod, or rfpod",
                self.decoder
            )),
        }
    }

    fn build(&self) -> Result<BuiltEngine> {
        let kind = self.decoder();
        let config = self.config()?;
        let model = ModelSpec::parse(&self.model)?.build(&config.puncts)?;
        let assistant = match (&self.assistant, kind) {
            (Some(spec), _) => Some(ModelSpec::parse(spec)?.build(&config.puncts)?),
            (None, DecoderKind::Speculative) => {
                usage_error("--decoder sd requires --assistant")
            }
            (None, _) => None,
        };
        Ok((Engine::new(model, &config), assistant, kind))
    }
}

#[derive(Args)]
struct PunctuateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Text to punctuate; use --file or pipe stdin instead for longer input.
    text: Option<String>,
    /// Read the input text from a file.
    #[arg(long, conflicts_with = "text")]
    file: Option<PathBuf>,
    /// Write the restored text here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON with the decode counters instead of bare text.
    #[arg(long)]
    json: bool,
    /// Print decode counters to stderr.
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Corpus file: one JSON object per line with "reference" and optional "plain".
    #[arg(long)]
    corpus: PathBuf,
    /// Abort on invalid corpus lines instead of skipping them.
    #[arg(long)]
    strict: bool,
    /// Timed repetitions over the corpus.
    #[arg(long, default_value_t = 1)]
    repetitions: u32,
    /// Also decode the corpus with parallel workers and report that rate separately.
    #[arg(long)]
    parallel: bool,
    /// Include wall-clock timing in the JSON report (timing fields are
    /// excluded by default so the report is byte-reproducible).
    #[arg(long)]
    timing: bool,
    /// A previous JSON report (written with --timing) to state speedup against.
    #[arg(long)]
    baseline: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report to stdout instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Acceptance rate; mutually exclusive with --corpus.
    #[arg(long)]
    alpha: Option<f64>,
    /// Estimate the acceptance rate from this punctuated corpus.
    #[arg(long, conflicts_with = "alpha")]
    corpus: Option<PathBuf>,
    /// Time-efficiency factor of one forward pass versus one generation step.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Window length in tokens.
    #[arg(long = "L", default_value_t = 50)]
    window: u32,
    /// Monte Carlo trials for the cross-check.
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long)]
    puncts: Option<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TrainArgs {
    /// Punctuated training corpus (JSON lines, "reference" field).
    #[arg(long)]
    corpus: PathBuf,
    /// Model order n (conditions on n-1 trailing non-space tokens).
    #[arg(long)]
    order: usize,
    /// Add-k smoothing constant.
    #[arg(long, default_value_t = 0.1)]
    k: f64,
    /// Output model file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    puncts: Option<String>,
}

#[derive(Args)]
struct ServeCheckArgs {
    /// Model server address, host:port.
    endpoint: String,
    #[arg(long)]
    puncts: Option<String>,
    #[arg(long)]
    json: bool,
}

type BuiltEngine = (Engine, Option<Box<dyn CausalModel>>, DecoderKind);

fn usage_error(message: &str) -> ! {
    // clap usage errors exit with code 2.
    Cli::command().error(clap::error::ErrorKind::InvalidValue, message).exit()
}

fn puncts_or_default(spec: &Option<String>) -> Result<PunctuationSet> {
    Ok(match spec {
        Some(s) => PunctuationSet::parse(s)?,
        None => PunctuationSet::default(),
    })
}

fn write_or_print(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, body)
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{body}"),
    }
    Ok(())
}

fn cmd_punctuate(args: PunctuateArgs) -> Result<()> {
    let (engine, assistant, kind) = args.common.build()?;
    let text = match (&args.text, &args.file) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?,
        (None, None) => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
            buf
        }
    };

    let (restored, result) = engine.restore(kind, assistant.as_deref(), &text)?;
    if args.verbose {
        eprintln!(
            "passes={} full_forward_calls={} step_calls={} assistant_step_calls={} inserted={} deleted_spaces={}",
            result.passes,
            result.full_forward_calls,
            result.step_calls,
            result.assistant_step_calls,
            result.inserted_puncts,
            result.deleted_spaces
        );
    }
    if args.json {
        #[derive(Serialize)]
        struct PunctuateReport<'a> {
            text: &'a str,
            passes: u64,
            full_forward_calls: u64,
            step_calls: u64,
            assistant_step_calls: u64,
            inserted_puncts: u64,
            deleted_spaces: u64,
        }
        let body = serde_json::to_string_pretty(&PunctuateReport {
            text: &restored,
            passes: result.passes,
            full_forward_calls: result.full_forward_calls,
            step_calls: result.step_calls,
            assistant_step_calls: result.assistant_step_calls,
            inserted_puncts: result.inserted_puncts,
            deleted_spaces: result.deleted_spaces,
        })?;
        write_or_print(&args.out, &body)?;
    } else {
        write_or_print(&args.out, &restored)?;
    }
    Ok(())
}

fn baseline_rate(path: &Path) -> Result<f64> {
    let raw = std::fs::read_to_string(path)
        .with_context(|| format!("reading baseline {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&raw)?;
    value
        .pointer("/timing/tokens_per_second")
        .and_then(serde_json::Value::as_f64)
        .context("baseline report has no timing.tokens_per_second; rerun it with --timing")
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let (engine, assistant, kind) = args.common.build()?;
    let strictness = if args.strict { Strictness::Strict } else { Strictness::Lenient };
    let corpus = load_corpus(&args.corpus, &engine.puncts, strictness)?;
    for (line, reason) in &corpus.skipped {
        eprintln!("warning: {} line {line}: {reason}", args.corpus.display());
    }

    let outcome = evaluate(
        &engine,
        assistant.as_deref(),
        kind,
        &corpus.pairs,
        args.repetitions,
        args.parallel,
    )?;

    let baseline = match &args.baseline {
        Some(path) => Some(baseline_rate(path)?),
        None => None,
    };
    let analytics = analytics_for_corpus(
        &reference_texts(&corpus.pairs),
        &engine.puncts,
        engine.window.core_len as u32,
    );
    let report = build_report(
        kind.name(),
        &args.common.model,
        args.common.assistant.as_deref(),
        args.common.seed,
        corpus.skipped.len(),
        &outcome.report,
        corpus.pairs.len(),
        &outcome.throughput,
        outcome.parallel_throughput.as_ref(),
        baseline,
        args.timing,
        analytics,
    );

    if args.json || args.out.is_some() {
        write_or_print(&args.out, &report.to_json())?;
        if args.out.is_some() && !args.json {
            print!("{}", report.to_table());
        }
    } else {
        print!("{}", report.to_table());
    }
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let puncts = puncts_or_default(&args.puncts)?;
    let (alpha, estimate) = match (args.alpha, &args.corpus) {
        (Some(alpha), None) => (alpha, None),
        (None, Some(path)) => {
            let corpus = load_corpus(path, &puncts, Strictness::Lenient)?;
            let est = estimate_alpha(&reference_texts(&corpus.pairs), &puncts)?;
            if est.degenerate {
                eprintln!(
                    "warning: corpus has no punctuation; acceptance rate clamped to {}",
                    est.alpha
                );
            }
            (est.alpha, Some(est))
        }
        _ => usage_error("provide exactly one of --alpha or --corpus"),
    };

    let expected = expected_tokens(alpha, args.window)?;
    let factor = improvement_factor(alpha, args.eta, args.window)?;
    let simulated = simulate_expected_tokens(alpha, args.window, args.trials, args.seed)?;
    let deviation = (simulated - expected).abs() / expected;

    if args.json {
        #[derive(Serialize)]
        struct AnalyzeReport {
            alpha: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            alpha_source: Option<fpod::eval::AlphaEstimate>,
            eta: f64,
            window: u32,
            expected_tokens: f64,
            improvement_factor: f64,
            monte_carlo: MonteCarloBlock,
        }
        #[derive(Serialize)]
        struct MonteCarloBlock {
            trials: u64,
            seed: u64,
            expected_tokens: f64,
            relative_deviation: f64,
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&AnalyzeReport {
                alpha,
                alpha_source: estimate,
                eta: args.eta,
                window: args.window,
                expected_tokens: expected,
                improvement_factor: factor,
                monte_carlo: MonteCarloBlock {
                    trials: args.trials,
                    seed: args.seed,
                    expected_tokens: simulated,
                    relative_deviation: deviation,
                },
            })?
        );
    } else {
        match estimate {
            Some(est) => println!(
                "alpha {alpha:.6} (estimated: {} marks / {} content tokens)",
                est.punct_tokens, est.content_tokens
            ),
            None => println!("alpha {alpha:.6} (given)"),
        }
        println!("E(#token) {expected:.4} for L={}", args.window);
        println!("improvement factor {factor:.4} (eta {:.4})", args.eta);
        println!(
            "monte carlo {simulated:.4} ({} trials, seed {}): deviation {:.4}%",
            args.trials,
            args.seed,
            deviation * 100.0
        );
    }
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let puncts = puncts_or_default(&args.puncts)?;
    let corpus = load_corpus(&args.corpus, &puncts, Strictness::Lenient)?;
    for (line, reason) in &corpus.skipped {
        eprintln!("warning: {} line {line}: {reason}", args.corpus.display());
    }
    let model = NGramModel::train(&reference_texts(&corpus.pairs), args.order, args.k, &puncts)?;
    model.save(&args.out)?;
    println!(
        "trained order-{} model (k={}) on {} texts; vocabulary {} tokens -> {}",
        model.order(),
        model.smoothing(),
        corpus.pairs.len(),
        model.vocab().len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_serve_check(args: ServeCheckArgs) -> Result<()> {
    let puncts = puncts_or_default(&args.puncts)?;
    let report = serve_check(&args.endpoint, &puncts);
    if args.json {
        #[derive(Serialize)]
        struct CheckLine<'a> {
            check: &'a str,
            passed: bool,
            detail: &'a str,
        }
        let lines: Vec<CheckLine> = report
            .checks
            .iter()
            .map(|(check, outcome)| CheckLine {
                check,
                passed: outcome.is_ok(),
                detail: match outcome {
                    Ok(d) => d,
                    Err(d) => d,
                },
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&lines)?);
    } else {
        for (check, outcome) in &report.checks {
            match outcome {
                Ok(detail) => println!("PASS - {check}: {detail}"),
                Err(detail) => println!("FAIL - {check}: {detail}"),
            }
        }
    }
    if !report.passed() {
        bail!("endpoint {} failed conformance", report.endpoint);
    }
    println!("endpoint {} conforms", report.endpoint);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Punctuate(args) => cmd_punctuate(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Train(args) => cmd_train(args),
        Command::ServeCheck(args) => cmd_serve_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
