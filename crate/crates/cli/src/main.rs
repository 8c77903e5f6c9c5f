//! `ipmbench` command-line front end.

mod settings;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ipmbench::analyzer::{analyze, profile, AnalysisOptions, RatioMethod};
use ipmbench::format::{export_acts, export_pict, parse_ctwedge, print_ctwedge, Dictionary};
use ipmbench::generator::{generate_benchmarks, GenerationFailure, GeneratorConfig, ModelReport};
use ipmbench::model::Ipm;
use ipmbench::ratios::{
    test_validity_ratio_bruteforce, test_validity_ratio_exact, test_validity_ratio_mc_with,
    test_validity_ratio_mdd, tuple_validity_ratio, ExactMethod, ExactRatio, McParams, RatioError,
};

use settings::{Format, Settings};

#[derive(Debug, Parser)]
#[command(name = "ipmbench", version, about = "Benchmark models for combinatorial test generators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate random benchmark models
    Generate(GenerateArgs),
    /// Report the profile and validity ratios of a CTWedge model
    Analyze(AnalyzeArgs),
    /// Compute the tuple and test validity ratios of a CTWedge model
    Ratio(RatioArgs),
    /// Convert a CTWedge model to ACTS or PICT
    Convert(ConvertArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    settings: Settings,
    /// JSON file with the same options; flags take precedence
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print the generation reports as JSON on standard output
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct McArgs {
    /// Expected test ratio used to size the Monte Carlo sample
    #[arg(long, default_value_t = 0.1)]
    target: f64,
    #[arg(long, default_value_t = 0.75)]
    prob: f64,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Sample count, overriding the bound
    #[arg(long)]
    fixed_n: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl McArgs {
    fn params(&self) -> Result<McParams, Failure> {
        McParams::new(self.target, self.prob, self.eps).map_err(|e| Failure::Usage(e.to_string()))
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// CTWedge model file
    model: PathBuf,
    #[arg(long, default_value_t = 2)]
    strength: usize,
    #[command(flatten)]
    mc: McArgs,
    /// Skip the ratio measurements
    #[arg(long)]
    no_ratios: bool,
    /// Print JSON instead of a table
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Exact when possible, Monte Carlo otherwise
    Auto,
    /// Decision diagram, else enumeration
    Exact,
    Mdd,
    Bruteforce,
    #[value(alias = "mc")]
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Tuple,
    Test,
    Both,
}

#[derive(Debug, Args)]
struct RatioArgs {
    /// CTWedge model file
    #[arg(long)]
    model: PathBuf,
    /// Ratios to compute
    #[arg(long, value_enum, default_value_t = Which::Both)]
    ratio: Which,
    /// Test ratio method
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
    #[arg(long, default_value_t = 2)]
    strength: usize,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// CTWedge model file
    model: PathBuf,
    #[arg(long, value_enum)]
    to: Format,
    /// Output file; standard output when absent
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    /// Exit code 1.
    Usage(String),
    /// Exit code 2.
    Run(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Analyze(args) => analyze_cmd(args),
        Command::Ratio(args) => ratio(args),
        Command::Convert(args) => convert(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_model(path: &Path) -> Result<Ipm, String> {
    let text = read(path)?;
    parse_ctwedge(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn generation_config(args: &GenerateArgs) -> Result<(GeneratorConfig, Settings), String> {
    let file = match &args.config {
        Some(path) => serde_json::from_str::<Settings>(&read(path)?)
            .map_err(|e| format!("{}: {e}", path.display()))?,
        None => Settings::default(),
    };
    let settings = file.overlaid(&args.settings);
    let mut config = match &settings.baseline {
        Some(path) => {
            let base = load_model(path)?;
            GeneratorConfig::from_profile(&profile(&base))
        }
        None => GeneratorConfig::default(),
    };
    let category = settings.category.unwrap_or(config.category);
    settings.check_conflicts(category)?;
    settings.apply(&mut config);
    if let Some(path) = &settings.dictionary {
        let dict = Dictionary::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
        config.dictionary = Some(dict);
    }
    config.validate().map_err(|e| e.to_string())?;
    if settings.jobs == Some(0) {
        return Err("--jobs must be at least 1".into());
    }
    Ok((config, settings))
}

#[derive(Serialize)]
struct GenerationJson<'a> {
    config: &'a GeneratorConfig,
    models: Vec<&'a ModelReport>,
    failures: &'a [GenerationFailure],
}

fn describe(report: &ModelReport, ipm: &Ipm) -> String {
    let mut line = format!(
        "{}: {} parameters, {} constraints, {} attempt{}, {:.1} ms",
        report.name,
        ipm.parameters().len(),
        ipm.constraints().len(),
        report.attempts,
        if report.attempts == 1 { "" } else { "s" },
        report.elapsed.as_secs_f64() * 1000.0
    );
    for (label, r) in [("r_tp", &report.tuple_ratio), ("r_ts", &report.test_ratio)] {
        if let Some(r) = r {
            line.push_str(&format!(", {label} = {:.4} ({}", r.value, r.method));
            if let Some(n) = r.samples {
                line.push_str(&format!(", n = {n}"));
            }
            line.push(')');
        }
    }
    if report.clamped > 0 {
        line.push_str(&format!(", {} forbidden tuples clamped", report.clamped));
    }
    line
}

fn generate(args: GenerateArgs) -> Result<(), Failure> {
    let (config, settings) = generation_config(&args).map_err(Failure::Usage)?;
    let formats = settings.formats.clone().unwrap_or_else(|| vec![Format::Ctwedge]);
    let out_dir = settings.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Run(e.to_string()))?;
    let outcome = pool
        .install(|| generate_benchmarks(&config))
        .map_err(|e| Failure::Usage(e.to_string()))?;
    fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Run(format!("cannot create {}: {e}", out_dir.display())))?;
    for m in &outcome.models {
        for &f in &formats {
            let text = match f {
                Format::Ctwedge => print_ctwedge(&m.ipm),
                Format::Acts => export_acts(&m.ipm),
                Format::Pict => export_pict(&m.ipm),
            };
            let path = out_dir.join(format!("{}.{}", m.ipm.name(), f.extension()));
            fs::write(&path, text)
                .map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display())))?;
        }
        eprintln!("{}", describe(&m.report, &m.ipm));
    }
    for f in &outcome.failures {
        eprintln!("{f}");
    }
    if args.json {
        let json = GenerationJson {
            config: &config,
            models: outcome.models.iter().map(|m| &m.report).collect(),
            failures: &outcome.failures,
        };
        println!("{}", serde_json::to_string_pretty(&json).expect("serializable"));
    }
    if outcome.is_complete() {
        eprintln!(
            "generated {} model{} in {}",
            outcome.models.len(),
            if outcome.models.len() == 1 { "" } else { "s" },
            out_dir.display()
        );
        Ok(())
    } else {
        Err(Failure::Run(format!(
            "{} of {} benchmarks could not be generated",
            outcome.failures.len(),
            config.count
        )))
    }
}

fn analyze_cmd(args: AnalyzeArgs) -> Result<(), Failure> {
    let mc = args.mc.params()?;
    let ipm = load_model(&args.model).map_err(Failure::Run)?;
    let options = AnalysisOptions {
        strength: args.strength,
        mc,
        fixed_n: args.mc.fixed_n,
        seed: args.mc.seed,
        skip_ratios: args.no_ratios,
    };
    let report = analyze(&ipm, &options);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        print!("{}", report.to_table());
    }
    Ok(())
}

#[derive(Serialize)]
struct TupleJson {
    value: f64,
    exact: String,
    strength: usize,
}

#[derive(Serialize)]
struct TestJson {
    value: f64,
    method: RatioMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    valid: Option<u64>,
}

#[derive(Serialize, Default)]
struct RatioJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    r_tp: Option<TupleJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_ts: Option<TestJson>,
}

fn exact_json(r: ExactRatio) -> TestJson {
    TestJson {
        value: num_value(&r.value),
        method: match r.method {
            ExactMethod::Mdd => RatioMethod::ExactMdd,
            ExactMethod::BruteForce => RatioMethod::ExactBruteForce,
        },
        exact: Some(format!("{}/{}", r.value.numer(), r.value.denom())),
        samples: None,
        valid: None,
    }
}

fn num_value(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn ratio(args: RatioArgs) -> Result<(), Failure> {
    let mc = args.mc.params()?;
    let ipm = load_model(&args.model).map_err(Failure::Run)?;
    let fail = |e: RatioError| Failure::Run(e.to_string());
    let mut out = RatioJson::default();
    if matches!(args.ratio, Which::Tuple | Which::Both) {
        let r = tuple_validity_ratio(&ipm, args.strength).map_err(fail)?;
        out.r_tp = Some(TupleJson {
            value: num_value(&r),
            exact: format!("{}/{}", r.numer(), r.denom()),
            strength: args.strength,
        });
    }
    if matches!(args.ratio, Which::Test | Which::Both) {
        let sampled = || {
            let n = args.mc.fixed_n.unwrap_or_else(|| mc.sample_size());
            let r = test_validity_ratio_mc_with(&ipm, &mc, n, args.mc.seed);
            TestJson {
                value: r.estimate,
                method: RatioMethod::MonteCarlo,
                exact: None,
                samples: Some(r.samples),
                valid: Some(r.valid),
            }
        };
        out.r_ts = Some(match args.method {
            Method::Auto => match test_validity_ratio_exact(&ipm) {
                Ok(r) => exact_json(r),
                Err(RatioError::MethodUnavailable(_)) => sampled(),
                Err(e) => return Err(fail(e)),
            },
            Method::Exact => exact_json(test_validity_ratio_exact(&ipm).map_err(fail)?),
            Method::Mdd => exact_json(test_validity_ratio_mdd(&ipm).map_err(fail)?),
            Method::Bruteforce => exact_json(test_validity_ratio_bruteforce(&ipm).map_err(fail)?),
            Method::MonteCarlo => sampled(),
        });
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        return Ok(());
    }
    if let Some(r) = &out.r_tp {
        println!("r_tp = {} ({}, t = {})", r.value, r.exact, r.strength);
    }
    if let Some(r) = &out.r_ts {
        match (&r.exact, r.samples, r.valid) {
            (Some(e), _, _) => println!("r_ts = {} ({e}, {})", r.value, r.method),
            (None, Some(n), Some(v)) => {
                println!("r_ts = {} ({}, {v} of {n} samples valid)", r.value, r.method)
            }
            _ => println!("r_ts = {} ({})", r.value, r.method),
        }
    }
    Ok(())
}

fn convert(args: ConvertArgs) -> Result<(), Failure> {
    let ipm = load_model(&args.model).map_err(Failure::Run)?;
    let text = match args.to {
        Format::Ctwedge => print_ctwedge(&ipm),
        Format::Acts => export_acts(&ipm),
        Format::Pict => export_pict(&ipm),
    };
    match args.out {
        Some(path) => fs::write(&path, text)
            .map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
