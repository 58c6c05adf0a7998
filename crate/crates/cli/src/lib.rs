//! Command-line front end: `synth`, `perturb`, `run` and `report`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use meterbench::dataset::{generate_perturbation_suite, synthesize_base_set, Manifest, ManifestEntry, RenderStyle};
use meterbench::detector::{ExternalDetector, FixtureDetector, TemplateDetector};
use meterbench::evaluation::{
    evaluate_dataset, format_summary_table, parse_result_file_name, read_csv, result_file_name, summarize, write_csv,
    write_summary_csv, EvalRecord, HarnessOptions, SummaryRow,
};
use meterbench::exec::Executor;
use meterbench::imaging::{DatasetTag, Family, PerturbationGrids};
use meterbench::postprocess::{CompareMode, ConfigTable};
use meterbench::{Detector, FilterParams};

/// File name of the manifest written by `synth` and `perturb`.
pub const MANIFEST_FILE: &str = "manifest.tsv";

/// Exit status for malformed invocations.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for failures while doing the work.
pub const EXIT_RUNTIME: i32 = 1;

/// An invocation problem detected after argument parsing, reported with
/// the usage exit status.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Debug, Parser)]
#[command(name = "meterbench", version, about = "Benchmark harness for utility-meter digit readers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a synthetic base set of meter registers.
    Synth(SynthArgs),
    /// Apply perturbation grids to every image of a base manifest.
    Perturb(PerturbArgs),
    /// Run a detector over a manifest and write per-dataset result CSVs.
    Run(RunArgs),
    /// Recompute the summary table from result CSVs.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every stochastic step.
    #[arg(long, env = "METERBENCH_SEED", default_value_t = 7)]
    pub seed: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Meter config table (`id digits decimals` per line); built-in formats otherwise.
    #[arg(long)]
    pub configs: Option<PathBuf>,
}

impl Common {
    fn executor(&self) -> Result<Executor> {
        match self.workers {
            None => Ok(Executor::available()),
            Some(0) => usage("--workers must be at least 1"),
            Some(n) => Ok(Executor::new(n)?),
        }
    }

    fn config_table(&self) -> Result<ConfigTable> {
        match &self.configs {
            None => Ok(ConfigTable::builtin()),
            Some(p) => {
                require_file(p, "--configs")?;
                ConfigTable::load(p).with_context(|| format!("reading config table {}", p.display()))
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of meters to render.
    #[arg(long, default_value_t = 30)]
    pub count: usize,
    /// Output directory for images, sidecars and the manifest.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    /// Base manifest; every entry must be tagged ORIGINAL.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory holding the base images (defaults to the manifest's directory).
    #[arg(long)]
    pub images: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// `all`, `none`, or a comma list of families (scale, blur, gamma, sp)
    /// and explicit tags such as `30BLUR`.
    #[arg(long, default_value = "all")]
    pub grids: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Compare {
    Exact,
    Digits,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory holding the images (defaults to the manifest's directory).
    #[arg(long)]
    pub images: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// `template`, `fixture:<file>` or `external:<command template>`.
    #[arg(long, default_value = "template")]
    pub detector: String,
    /// Name used in result file names (defaults to the detector kind).
    #[arg(long)]
    pub name: Option<String>,
    /// Detections must score strictly above this.
    #[arg(long, default_value_t = 0.10)]
    pub confidence_floor: f64,
    /// Boxes overlapping at or above this IoU are duplicates.
    #[arg(long, default_value_t = 0.5)]
    pub dup_iou: f64,
    /// Per-image limit for external detectors.
    #[arg(long, default_value_t = 30_000)]
    pub timeout_ms: u64,
    #[arg(long, value_enum, default_value_t = Compare::Exact)]
    pub compare: Compare,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory of `<detector>_<TAG>.csv` result files.
    #[arg(long)]
    pub dir: PathBuf,
    /// Also write the summary as CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and maps
/// the outcome to an exit status.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Perturb(a) => cmd_perturb(&a),
        Command::Run(a) => cmd_run(&a),
        Command::Report(a) => cmd_report(&a),
    }
}

fn require_file(path: &Path, flag: &str) -> Result<()> {
    if !path.is_file() {
        return usage(format!("{flag} {} does not exist", path.display()));
    }
    Ok(())
}

fn images_dir(images: &Option<PathBuf>, manifest: &Path) -> Result<PathBuf> {
    let dir = match images {
        Some(d) => d.clone(),
        None => manifest.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let dir = if dir.as_os_str().is_empty() { PathBuf::from(".") } else { dir };
    if !dir.is_dir() {
        return usage(format!("image directory {} does not exist", dir.display()));
    }
    Ok(dir)
}

fn load_manifest(path: &Path) -> Result<Manifest> {
    require_file(path, "--manifest")?;
    Manifest::load(path).with_context(|| format!("reading manifest {}", path.display()))
}

fn save_manifest(manifest: &Manifest, dir: &Path) -> Result<PathBuf> {
    let path = dir.join(MANIFEST_FILE);
    manifest.save(&path).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let exec = a.common.executor()?;
    let configs = a.common.config_table()?;
    let manifest = synthesize_base_set(a.count, &configs, &a.out, a.common.seed, &RenderStyle::default(), &exec)
        .with_context(|| format!("rendering into {}", a.out.display()))?;
    let path = save_manifest(&manifest, &a.out)?;
    println!("wrote {} images and {}", manifest.len(), path.display());
    Ok(())
}

/// Parses the `--grids` value.
pub fn parse_grids(spec: &str) -> Result<PerturbationGrids, String> {
    match spec.trim() {
        "all" => return Ok(PerturbationGrids::default()),
        "none" | "" => return Ok(PerturbationGrids::empty()),
        _ => {}
    }
    let mut points = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Ok(family) = item.parse::<Family>() {
            points.extend(PerturbationGrids::default_points(family));
        } else {
            let tag: DatasetTag = item
                .parse()
                .map_err(|e| format!("{item:?} is neither a family (scale, blur, gamma, sp) nor a tag: {e}"))?;
            points.push(tag);
        }
    }
    Ok(PerturbationGrids::from_points(points))
}

pub fn cmd_perturb(a: &PerturbArgs) -> Result<()> {
    let grids = parse_grids(&a.grids).map_err(UsageError)?;
    let exec = a.common.executor()?;
    let base = load_manifest(&a.manifest)?;
    let images = images_dir(&a.images, &a.manifest)?;
    let suite = generate_perturbation_suite(&base, &images, &a.out, &grids, a.common.seed, &exec)
        .with_context(|| format!("perturbing {}", a.manifest.display()))?;
    let path = save_manifest(&suite, &a.out)?;
    println!("wrote {} images and {}", suite.len(), path.display());
    Ok(())
}

/// Builds the detector named by a `--detector` value.
pub fn build_detector(spec: &str, timeout: Duration) -> Result<Box<dyn Detector>> {
    if spec == "template" {
        return Ok(Box::new(TemplateDetector::new()));
    }
    if let Some(path) = spec.strip_prefix("fixture:") {
        let path = Path::new(path);
        require_file(path, "fixture store")?;
        let det = FixtureDetector::open(path).with_context(|| format!("reading fixture store {}", path.display()))?;
        return Ok(Box::new(det));
    }
    if let Some(cmd) = spec.strip_prefix("external:") {
        let det = ExternalDetector::new(cmd).map_err(UsageError)?.with_timeout(timeout);
        return Ok(Box::new(det));
    }
    usage(format!("unknown detector {spec:?} (expected template, fixture:<file> or external:<command>)"))
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return usage(format!("detector name {name:?} must be non-empty and use only letters, digits, '_' or '-'"));
    }
    Ok(())
}

pub fn cmd_run(a: &RunArgs) -> Result<()> {
    let filter = FilterParams::new(a.confidence_floor, a.dup_iou).map_err(UsageError)?;
    let exec = a.common.executor()?;
    let configs = a.common.config_table()?;
    let detector = build_detector(&a.detector, Duration::from_millis(a.timeout_ms))?;
    let name = a.name.clone().unwrap_or_else(|| detector.name().to_string());
    check_name(&name)?;
    let manifest = load_manifest(&a.manifest)?;
    let images = images_dir(&a.images, &a.manifest)?;
    manifest.validate_readings(&configs)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;

    let mut groups: BTreeMap<DatasetTag, Vec<ManifestEntry>> = BTreeMap::new();
    for e in manifest.entries() {
        groups.entry(e.tag).or_default().push(e.clone());
    }
    let opts = HarnessOptions {
        filter,
        compare: match a.compare {
            Compare::Exact => CompareMode::Exact,
            Compare::Digits => CompareMode::DigitsOnly,
        },
    };

    let notes_path = a.out.join(format!("{name}_notes.tsv"));
    let mut notes = fs::File::create(&notes_path).with_context(|| format!("creating {}", notes_path.display()))?;
    writeln!(notes, "# file\tnote")?;
    let mut scored: Vec<(DatasetTag, EvalRecord)> = Vec::new();
    for (tag, entries) in &groups {
        let outcomes = evaluate_dataset(detector.as_ref(), entries, &images, &configs, &opts, &exec)
            .with_context(|| format!("dataset {tag}"))?;
        let records: Vec<EvalRecord> = outcomes.iter().map(|o| o.record.clone()).collect();
        let csv = a.out.join(result_file_name(&name, *tag));
        write_csv(&records, &csv).with_context(|| format!("writing {}", csv.display()))?;
        for o in &outcomes {
            for n in &o.notes {
                writeln!(notes, "{}\t{}", o.record.file_name, n.replace(['\t', '\n'], " "))?;
            }
        }
        notes.flush()?;
        log::info!("{tag}: {} images", records.len());
        scored.extend(records.into_iter().map(|r| (*tag, r)));
    }

    let rows: Vec<SummaryRow> =
        summarize(&scored).into_iter().map(|summary| SummaryRow { detector: name.clone(), summary }).collect();
    write_summary(&rows, &a.out.join(format!("{name}_summary.csv")))?;
    fs::write(a.out.join(format!("{name}_summary.txt")), format_summary_table(&rows))?;
    print!("{}", format_summary_table(&rows));
    Ok(())
}

fn write_summary(rows: &[SummaryRow], path: &Path) -> Result<()> {
    write_summary_csv(rows, path).with_context(|| format!("writing {}", path.display()))
}

/// Summary rows recomputed from every result CSV in `dir`, ordered by
/// detector and then tag. Files with no records are skipped.
pub fn collect_report(dir: &Path) -> Result<Vec<SummaryRow>> {
    let mut by_detector: BTreeMap<String, Vec<(DatasetTag, EvalRecord)>> = BTreeMap::new();
    let mut names: Vec<(String, PathBuf)> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| (e.file_name().to_string_lossy().into_owned(), e.path()))
        .collect();
    names.sort();
    for (file, path) in names {
        let Some((detector, tag)) = parse_result_file_name(&file) else {
            continue;
        };
        let records = read_csv(&path).with_context(|| format!("reading {}", path.display()))?;
        by_detector.entry(detector).or_default().extend(records.into_iter().map(|r| (tag, r)));
    }
    Ok(by_detector
        .into_iter()
        .flat_map(|(detector, scored)| {
            summarize(&scored).into_iter().map(move |summary| SummaryRow { detector: detector.clone(), summary })
        })
        .collect())
}

pub fn cmd_report(a: &ReportArgs) -> Result<()> {
    if !a.dir.is_dir() {
        bail!(UsageError(format!("--dir {} is not a directory", a.dir.display())));
    }
    let rows = collect_report(&a.dir)?;
    if let Some(out) = &a.out {
        write_summary(&rows, out)?;
    }
    print!("{}", format_summary_table(&rows));
    Ok(())
}
