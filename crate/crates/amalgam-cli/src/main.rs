use std::fs::File;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use amalgam::experiments::{
    atlas_grid, region_atlas, AtlasPair, ExperimentRegistry, Params, SMode,
};
use amalgam::grid::io::{read_binary, read_text, MAGIC};
use amalgam::grid::{GridFunction, GridSpec};
use amalgam::norms::{NormParams, NormRegistry};
use amalgam::report::{write_atlas_csv, write_outputs, RunManifest, MANIFEST_FILE};
use amalgam::stft::Window;
use amalgam::witnesses::{make_atom, make_h_eps, make_h_j, AtomKind, Profile};
use amalgam::{classify, Classification, Family, ReciprocalExponent, SmoothnessIndex, SpaceSpec};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

#[derive(Parser)]
#[command(
    name = "amalgam",
    version,
    about = "Embedding classifier, norm evaluator and probe harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an inclusion between two spaces.
    Classify(ClassifyArgs),
    /// Evaluate one norm of a generated or stored function.
    Norm(NormArgs),
    /// Run a named experiment and write its CSV, JSONL and manifest.
    Probe(ProbeArgs),
    /// Classifier verdicts over a grid of (1/p, 1/q).
    Atlas(AtlasArgs),
    /// Run an experiment again from its manifest.
    Rerun(RerunArgs),
    /// List the registered experiments.
    Experiments,
}

#[derive(Args)]
struct ClassifyArgs {
    /// `source:target`, each one of W, M, B, F, hp, L, seq0 (uniform) or seq1 (dyadic).
    #[arg(long)]
    pair: String,
    #[arg(long, alias = "p1", default_value = "2")]
    p: ReciprocalExponent,
    #[arg(long, alias = "q1", default_value = "2")]
    q: ReciprocalExponent,
    #[arg(long, alias = "s1", default_value = "0", allow_hyphen_values = true)]
    s: SmoothnessIndex,
    #[arg(long)]
    p2: Option<ReciprocalExponent>,
    #[arg(long)]
    q2: Option<ReciprocalExponent>,
    #[arg(long, allow_hyphen_values = true)]
    s2: Option<SmoothnessIndex>,
    #[arg(long, default_value_t = 1)]
    n: u32,
}

#[derive(Args)]
struct NormArgs {
    /// One of L, W, M, B, F, hp.
    #[arg(long)]
    space: String,
    #[arg(long, default_value = "2")]
    p: ReciprocalExponent,
    #[arg(long, default_value = "2")]
    q: ReciprocalExponent,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    s: SmoothnessIndex,
    /// gaussian or bump.
    #[arg(long, default_value = "gaussian")]
    window: String,
    /// Top shell for B and F.
    #[arg(long)]
    jmax: Option<u32>,
    /// Generator: gaussian, zero, hj, heps or atom.
    #[arg(long, conflicts_with = "input")]
    gen: Option<String>,
    /// Grid function file, binary or text.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    j: u32,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Cube side for `--gen atom`.
    #[arg(long, default_value_t = 0.25)]
    side: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64.0)]
    extent: f64,
    #[arg(long, default_value_t = 1 << 14)]
    samples: usize,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    experiment: String,
    /// Flat key=value file; command-line pairs override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Experiment parameters as `--key value` pairs.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    params: Vec<String>,
}

#[derive(Args)]
struct AtlasArgs {
    #[arg(long, default_value = "W:B")]
    pair: AtlasPair,
    /// Nodes are k/resolution for k = 0..=2·resolution.
    #[arg(long, default_value_t = 4)]
    resolution: i64,
    /// Decide at critical + offset instead of at the critical value.
    #[arg(long, allow_hyphen_values = true)]
    offset: Option<SmoothnessIndex>,
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RerunArgs {
    manifest: PathBuf,
    /// Output directory; the manifest's own directory when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn family(label: &str) -> Result<Family, Failure> {
    Ok(match label {
        "W" => Family::WienerAmalgam,
        "M" => Family::Modulation,
        "B" => Family::Besov,
        "F" => Family::TriebelLizorkin,
        "hp" => Family::LocalHardy,
        "L" => Family::Lebesgue,
        "seq0" => Family::SeqUniform,
        "seq1" => Family::SeqDyadic,
        other => return Err(usage(format!("unknown space {other:?}"))),
    })
}

fn cmd_classify(args: ClassifyArgs) -> Result<(), Failure> {
    let (src, dst) = args
        .pair
        .split_once(':')
        .ok_or_else(|| usage("--pair must look like W:B"))?;
    let (src, dst) = (family(src)?, family(dst)?);
    let same = src == dst;
    // The smoothness sits on the amalgam side of a threshold statement.
    let (s_src, s_dst) = match (same, args.s2) {
        (_, Some(s2)) => (args.s, s2),
        (true, None) => (args.s, args.s),
        (false, None) if dst == Family::WienerAmalgam => (SmoothnessIndex::zero(), args.s),
        (false, None) => (args.s, SmoothnessIndex::zero()),
    };
    let p2 = args.p2.unwrap_or(args.p);
    let q2 = args.q2.unwrap_or(args.q);
    let source = SpaceSpec::try_new(src, args.p, args.q, s_src, args.n).map_err(usage)?;
    let target = SpaceSpec::try_new(dst, p2, q2, s_dst, args.n).map_err(usage)?;
    match classify(&source, &target).map_err(usage)? {
        Classification::Threshold(v) => {
            println!(
                "holds={} critical={} strict={}",
                v.holds, v.critical_s, v.strict_required
            )
        }
        Classification::Boolean(holds) => println!("holds={holds}"),
    }
    Ok(())
}

fn read_function(path: &Path) -> Result<GridFunction, Failure> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut bytes))
        .map_err(input)?;
    let parsed = if bytes.starts_with(MAGIC) {
        read_binary(bytes.as_slice())
    } else {
        read_text(bytes.as_slice())
    };
    parsed.map_err(input)
}

fn generate(args: &NormArgs, name: &str) -> Result<GridFunction, Failure> {
    let spec = GridSpec::new(args.extent, args.samples).map_err(usage)?;
    Ok(match name {
        "gaussian" => GridFunction::from_fn(spec, |x| {
            Complex64::new((-std::f64::consts::PI * x * x).exp(), 0.0)
        }),
        "zero" => GridFunction::from_fn(spec, |_| Complex64::new(0.0, 0.0)),
        "hj" => make_h_j(spec, args.j).map_err(usage)?,
        "heps" => {
            make_h_eps(&Profile::Low.sample(spec).map_err(usage)?, args.eps).map_err(usage)?
        }
        "atom" => {
            let kind = if args.side < 1.0 {
                AtomKind::Small
            } else {
                AtomKind::Big
            };
            make_atom(kind, args.p, args.side, args.seed)
                .map_err(usage)?
                .values
        }
        other => return Err(usage(format!("unknown generator {other:?}"))),
    })
}

fn window(label: &str) -> Result<Window, Failure> {
    match label {
        "gaussian" => Ok(Window::GaussianUnit),
        "bump" => Ok(Window::CompactBump),
        other => Err(usage(format!("unknown window {other:?}"))),
    }
}

fn cmd_norm(args: NormArgs) -> Result<(), Failure> {
    let registry = NormRegistry::with_defaults();
    let evaluator = registry.get(&args.space).ok_or_else(|| {
        usage(format!(
            "unknown norm {:?}; expected one of {:?}",
            args.space,
            registry.names().collect::<Vec<_>>()
        ))
    })?;
    let f = match (&args.input, &args.gen) {
        (Some(path), _) => read_function(path)?,
        (None, Some(name)) => generate(&args, name)?,
        (None, None) => return Err(usage("either --gen or --input is required")),
    };
    let params = NormParams {
        window: window(&args.window)?,
        jmax: args.jmax,
        ..NormParams::new(args.p, args.q, args.s)
    };
    let e = evaluator.evaluate(&f, &params).map_err(usage)?;
    println!("value={}", e.value);
    println!("mass_outside_core={:e}", e.mass_outside_core);
    if let Some(m) = e.mass_above_top {
        println!("mass_above_top={m:e}");
    }
    for w in &e.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

/// `--key value` pairs after the named flags.
fn parse_pairs(raw: &[String]) -> Result<Params, Failure> {
    let mut params = Params::new();
    let mut it = raw.iter();
    while let Some(flag) = it.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| usage(format!("expected --key, got {flag:?}")))?;
        let (key, value) = match key.split_once('=') {
            Some((k, v)) => (k, v.to_string()),
            None => (
                key,
                it.next()
                    .ok_or_else(|| usage(format!("--{key} needs a value")))?
                    .clone(),
            ),
        };
        params.set(key, value);
    }
    Ok(params)
}

fn run_experiment(
    command_line: Vec<String>,
    experiment: &str,
    params: &Params,
    out: &Path,
) -> Result<(), Failure> {
    let registry = ExperimentRegistry::with_defaults();
    let mut manifest = RunManifest::new(command_line, experiment, params);
    let start = Instant::now();
    let output = registry.run(experiment, params).map_err(usage)?;
    let outputs = write_outputs(out, experiment, &output).map_err(input)?;
    manifest.finish(start.elapsed(), outputs);
    manifest.write(out).map_err(input)?;
    for r in &output.reports {
        let slope = r
            .fit
            .as_ref()
            .map_or("-".to_string(), |f| format!("{:.4}", f.slope));
        let expected = r
            .expected_slope
            .map_or("-".to_string(), |s| format!("{s:.4}"));
        let growth = r.growth().map_or("-".to_string(), |g| format!("{g:.4}"));
        println!(
            "{} {}: verdict={:?} slope={slope} expected={expected} growth={growth} classifier={}",
            r.experiment,
            r.series,
            r.verdict,
            r.classifier_holds
                .map_or("-".to_string(), |h| h.to_string())
        );
        for note in &r.notes {
            println!("  {note}");
        }
    }
    if !output.atlas.is_empty() {
        println!("{}: {} atlas rows", experiment, output.atlas.len());
    }
    println!("wrote {}", out.join(MANIFEST_FILE).display());
    Ok(())
}

fn cmd_probe(args: ProbeArgs) -> Result<(), Failure> {
    // `--out` and `--config` may also trail the experiment parameters.
    let mut extra = parse_pairs(&args.params)?;
    let out = args.out.or_else(|| extra.remove("out").map(PathBuf::from));
    let config = args
        .config
        .or_else(|| extra.remove("config").map(PathBuf::from));
    let mut params = match &config {
        Some(path) => {
            Params::parse_lines(&std::fs::read_to_string(path).map_err(input)?).map_err(usage)?
        }
        None => Params::new(),
    };
    for (k, v) in extra.iter() {
        params.set(k, v);
    }
    let out = out.unwrap_or_else(|| PathBuf::from("out").join(&args.experiment));
    run_experiment(std::env::args().collect(), &args.experiment, &params, &out)
}

fn cmd_atlas(args: AtlasArgs) -> Result<(), Failure> {
    let mode = args
        .offset
        .map_or(SMode::AtCritical, |o| SMode::Offset(o.0));
    let rows = region_atlas(args.pair, mode, &atlas_grid(args.resolution), args.n);
    match args.out {
        Some(path) => write_atlas_csv(&rows, File::create(path).map_err(input)?).map_err(input),
        None => write_atlas_csv(&rows, std::io::stdout().lock()).map_err(input),
    }
}

fn cmd_rerun(args: RerunArgs) -> Result<(), Failure> {
    let manifest = RunManifest::read(&args.manifest).map_err(input)?;
    if !manifest.is_consistent() {
        return Err(input("manifest parameters do not match its config hash"));
    }
    let out = match args.out {
        Some(dir) => dir,
        None => args
            .manifest
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default(),
    };
    run_experiment(
        std::env::args().collect(),
        &manifest.experiment,
        &manifest.params,
        &out,
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Norm(a) => cmd_norm(a),
        Command::Probe(a) => cmd_probe(a),
        Command::Atlas(a) => cmd_atlas(a),
        Command::Rerun(a) => cmd_rerun(a),
        Command::Experiments => {
            let registry = ExperimentRegistry::with_defaults();
            for name in registry.names() {
                let e = registry.get(name).expect("listed name resolves");
                println!("{name}\t{}\tkeys: {}", e.summary(), e.keys().join(","));
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Input(m) => eprintln!("input error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
