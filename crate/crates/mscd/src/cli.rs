//! Command-line front end.
//!
//! Exit status: 0 on success, 1 for usage errors (bad flags or arguments),
//! 2 for data and domain errors (unreadable or malformed files, scales
//! outside a criterion's domain).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use mscd_core::benchgen::{generate_two_level, BenchSpec};
use mscd_core::global::{detect_global, GlobalOptions};
use mscd_core::metrics::{nmi, nmi_overlapping};
use mscd_core::overlap::{detect_local, LocalOptions, DEFAULT_ETA};
use mscd_core::scales::{afg_floor, sample_scales_between, sweep, SweepOptions};
use mscd_core::walk::{WalkCache, DEFAULT_TAU};
use mscd_core::{Cover, CriterionKind, Graph, ScalePlan};

use crate::io::{format_communities, format_edges, parse_communities, parse_edge_list, NodeNames};
use crate::report::{to_json, to_tsv};

#[derive(Debug, Parser)]
#[command(name = "mscd", version, about = "Multi-scale community detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a planted two-level benchmark graph.
    Generate(GenerateArgs),
    /// Detect communities at a single scale.
    Detect(DetectArgs),
    /// Detect communities over a sampled range of scales.
    Sweep(SweepArgs),
    /// NMI between two community files.
    Nmi(NmiArgs),
    /// Print the sampled scale values, one per line.
    SampleScales(SampleArgs),
    /// Write the random-walk network of a given Markov time.
    Walk(WalkArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Prefix for `<prefix>.edges`, `<prefix>.micro.com` and `<prefix>.macro.com`.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub micro_min: usize,
    #[arg(long, default_value_t = 40)]
    pub micro_max: usize,
    #[arg(long, default_value_t = 100)]
    pub macro_min: usize,
    #[arg(long, default_value_t = 250)]
    pub macro_max: usize,
    #[arg(long, default_value_t = 10.0)]
    pub mean_degree: f64,
    #[arg(long, default_value_t = 50)]
    pub max_degree: usize,
    /// Fraction of a node's edges leaving its macro community.
    #[arg(long, default_value_t = 0.1)]
    pub mu1: f64,
    /// Fraction of a node's edges leaving its micro community.
    #[arg(long, default_value_t = 0.2)]
    pub mu2: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Options shared by `detect` and `sweep`.
#[derive(Debug, Args)]
pub struct DetectionFlags {
    /// Edge list to analyse.
    #[arg(long)]
    pub input: PathBuf,
    /// One of rb, afg, so, rn, lfk, hlslw.
    #[arg(long)]
    pub criterion: CriterionKind,
    /// Walk-network threshold (stability only).
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    /// Overlap ratio at or above which local communities merge.
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Compare internal edge weight instead of node counts when merging.
    #[arg(long)]
    pub weighted_merge: bool,
    /// Include each node in its own neighbourhood for similarity.
    #[arg(long)]
    pub closed: bool,
    /// Keep local communities disjoint.
    #[arg(long)]
    pub no_overlap: bool,
}

impl DetectionFlags {
    fn local_options(&self) -> LocalOptions {
        LocalOptions {
            eta: self.eta,
            weighted: self.weighted_merge,
            closed: self.closed,
            overlap: !self.no_overlap,
            k_max: None,
        }
    }

    fn validate(&self) -> Result<(), Failure> {
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Failure::usage(format!("--tau must be finite and >= 0, got {}", self.tau)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Failure::usage(format!("--eta must be in (0, 1], got {}", self.eta)));
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub flags: DetectionFlags,
    /// Scale parameter: gamma (rb, rn), r (afg), t (so) or alpha (lfk, hlslw).
    #[arg(long, visible_aliases = ["gamma", "r", "t", "alpha"], allow_negative_numbers = true)]
    pub scale: f64,
    /// Community file to write.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub flags: DetectionFlags,
    /// Upper end of the scale range.
    #[arg(long = "A", alias = "a", allow_negative_numbers = true)]
    pub a: f64,
    /// Number of scales.
    #[arg(long = "X", alias = "x")]
    pub x: usize,
    /// Lower end of the range: a number, or `asymptotic` for afg.
    #[arg(long, allow_hyphen_values = true)]
    pub min_value: Option<String>,
    /// Ground-truth community file; repeat for several.
    #[arg(long)]
    pub truth: Vec<PathBuf>,
    /// Directory for report.tsv, report.json and one community file per scale.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NmiArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    /// Use overlapping NMI even when both files are partitions.
    #[arg(long)]
    pub overlapping: bool,
    /// Edge list fixing the node set; otherwise the union of both files.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long = "A", alias = "a", allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long = "X", alias = "x")]
    pub x: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub min_value: f64,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Markov time.
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long)]
    pub output: PathBuf,
}

/// A failed run with its exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl Failure {
    fn usage(msg: String) -> Self {
        Failure::Usage(anyhow::anyhow!(msg))
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<mscd_core::Error>() {
            Some(mscd_core::Error::Argument(_)) => Failure::Usage(e),
            _ => Failure::Data(e),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(e) | Failure::Data(e) => write!(f, "{e:#}"),
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_graph(path: &Path) -> anyhow::Result<(Graph, NodeNames)> {
    parse_edge_list(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_cover(path: &Path, names: &mut NodeNames, extend: bool) -> anyhow::Result<Vec<Vec<usize>>> {
    parse_communities(&read(path)?, names, extend).with_context(|| format!("in {}", path.display()))
}

fn generate(args: &GenerateArgs) -> Result<String, Failure> {
    let spec = BenchSpec {
        n: args.n,
        micro_min: args.micro_min,
        micro_max: args.micro_max,
        macro_min: args.macro_min,
        macro_max: args.macro_max,
        mean_degree: args.mean_degree,
        max_degree: args.max_degree,
        mu1: args.mu1,
        mu2: args.mu2,
        seed: args.seed,
    };
    spec.validate().map_err(|e| Failure::Usage(e.into()))?;
    let bench = generate_two_level(&spec).context("benchmark generation failed")?;
    let names = NodeNames::numeric(spec.n);
    let mut edges = String::new();
    for &(u, v) in &bench.edges {
        edges.push_str(&format!("{u} {v}\n"));
    }
    let prefix = args.output.display().to_string();
    write(Path::new(&format!("{prefix}.edges")), &edges)?;
    write(
        Path::new(&format!("{prefix}.micro.com")),
        &format_communities(&Cover::from_labels(&bench.micro), &names),
    )?;
    write(
        Path::new(&format!("{prefix}.macro.com")),
        &format_communities(&Cover::from_labels(&bench.macro_), &names),
    )?;
    Ok(String::new())
}

fn detect(args: &DetectArgs) -> Result<String, Failure> {
    args.flags.validate()?;
    let (g, names) = load_graph(&args.flags.input)?;
    let kind = args.flags.criterion;
    let (cover, q) = if let Some(global) = kind.global() {
        let rec = detect_global(
            &g,
            global,
            &[args.scale],
            args.flags.tau,
            args.flags.seed,
            &GlobalOptions::default(),
        )
        .with_context(|| format!("--scale {} for {kind}", args.scale))?;
        (Cover::from_partition(&rec[0].partition), rec[0].quality)
    } else {
        let local = kind.local().expect("every kind is global or local");
        let rec = detect_local(&g, local, &[args.scale], &args.flags.local_options())
            .with_context(|| format!("--scale {} for {kind}", args.scale))?;
        (rec[0].cover.clone(), rec[0].quality)
    };
    write(&args.output, &format_communities(&cover, &names))?;
    Ok(format!("{q}\n"))
}

fn parse_min_value(raw: &str, kind: CriterionKind, g: &Graph) -> Result<f64, Failure> {
    if raw.eq_ignore_ascii_case("asymptotic") {
        if kind != CriterionKind::Afg {
            return Err(Failure::usage(format!("--min-value asymptotic only applies to afg, not {kind}")));
        }
        return Ok(afg_floor(g));
    }
    raw.parse::<f64>()
        .map_err(|_| Failure::usage(format!("--min-value `{raw}` is neither a number nor `asymptotic`")))
}

fn run_sweep(args: &SweepArgs) -> Result<String, Failure> {
    args.flags.validate()?;
    let kind = args.flags.criterion;
    let plan = ScalePlan::new(kind, args.a, args.x).context("--A/--X")?;
    let (g, mut names) = load_graph(&args.flags.input)?;
    let plan = match &args.min_value {
        Some(raw) => plan.with_min_value(parse_min_value(raw, kind, &g)?).context("--min-value")?,
        None => plan,
    };
    let mut truths = Vec::with_capacity(args.truth.len());
    for path in &args.truth {
        let comms = load_cover(path, &mut names, false)?;
        truths.push(Cover::new(g.node_count(), comms).with_context(|| format!("in {}", path.display()))?);
    }
    let opts = SweepOptions {
        tau: args.flags.tau,
        seed: args.flags.seed,
        local: args.flags.local_options(),
        truths,
        ..SweepOptions::default()
    };
    let rep = sweep(&g, &plan, &opts).map_err(anyhow::Error::from)?;
    let tsv = to_tsv(&rep);
    if let Some(dir) = &args.out_dir {
        let com_dir = dir.join("communities");
        fs::create_dir_all(&com_dir).with_context(|| format!("cannot create {}", com_dir.display()))?;
        write(&dir.join("report.tsv"), &tsv)?;
        write(&dir.join("report.json"), &to_json(&rep))?;
        let width = rep.records.len().to_string().len();
        for (i, r) in rep.records.iter().enumerate() {
            let file = com_dir.join(format!("scale_{:0width$}.com", i + 1));
            write(&file, &format_communities(&r.cover, &names))?;
        }
    }
    Ok(tsv)
}

fn run_nmi(args: &NmiArgs) -> Result<String, Failure> {
    let (mut names, fixed) = match &args.graph {
        Some(path) => (load_graph(path)?.1, true),
        None => (NodeNames::default(), false),
    };
    let a = load_cover(&args.first, &mut names, !fixed)?;
    let b = load_cover(&args.second, &mut names, !fixed)?;
    let n = names.len();
    let (a, b) = (
        Cover::new(n, a).with_context(|| format!("in {}", args.first.display()))?,
        Cover::new(n, b).with_context(|| format!("in {}", args.second.display()))?,
    );
    let value = if args.overlapping { nmi_overlapping(&a, &b) } else { nmi(&a, &b) }.map_err(anyhow::Error::from)?;
    Ok(format!("{value}\n"))
}

fn sample(args: &SampleArgs) -> Result<String, Failure> {
    let values = sample_scales_between(args.min_value, args.a, args.x).context("--A/--X/--min-value")?;
    Ok(values.iter().map(|v| format!("{v}\n")).collect())
}

fn walk(args: &WalkArgs) -> Result<String, Failure> {
    if !(args.tau >= 0.0 && args.tau.is_finite()) {
        return Err(Failure::usage(format!("--tau must be finite and >= 0, got {}", args.tau)));
    }
    let (g, names) = load_graph(&args.input)?;
    let mut cache = WalkCache::new(&g, args.tau).context("--tau")?;
    let a_t = cache.walk_for_time(args.t).with_context(|| format!("--t {}", args.t))?;
    write(&args.output, &format_edges(&a_t, &names))?;
    Ok(String::new())
}

/// Runs a parsed command and returns what it prints on standard output.
pub fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Detect(a) => detect(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Nmi(a) => run_nmi(a),
        Command::SampleScales(a) => sample(a),
        Command::Walk(a) => walk(a),
    }
}

/// Parses `args`, runs, prints, and maps the outcome to an exit status.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
