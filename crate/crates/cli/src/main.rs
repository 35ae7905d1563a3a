mod manifest;

use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use subpareto::ingest::{
    extract_complete_submatrix, load_additive_domain, load_rankings, load_ratings, parse_rankings,
    read_profile_csv, write_profile_csv,
};
use subpareto::subgroup::{run_scan, ScanConfig};
use subpareto::theory::{borda_count, expected_pareto_count, expected_pareto_count_mc, ExpectationQuery};
use subpareto::{pareto_set, Error, Group, ProfileTable};

use manifest::{sidecar_path, RunManifest};

#[derive(Parser)]
#[command(name = "subpareto", version, about = "Pareto-optimal sets for groups and subgroups of agents")]
struct Cli {
    /// Also write a run manifest to this path.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Pareto-optimal outcomes of a group.
    Pareto {
        /// Canonical profile CSV.
        profiles: PathBuf,
        /// Comma-separated agent indices, or "all".
        group: String,
    },
    /// Sample groups and report subgroup ratios, false positives and Pareto fractions.
    Scan {
        /// Canonical profile CSV.
        profiles: PathBuf,
        /// TOML scan configuration; flags below override its fields.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Maximum number of groups per group size [default: 1000].
        #[arg(long)]
        cap: Option<usize>,
        /// [default: 5,7,9]
        #[arg(long, value_delimiter = ',')]
        group_sizes: Option<Vec<usize>>,
        /// Cells with fewer samples are flagged [default: 30].
        #[arg(long)]
        min_samples_flag: Option<usize>,
        /// Write the report here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Expected Pareto-set size for m outcomes and n agents under impartial culture.
    Expected {
        m: usize,
        n: usize,
        /// Also estimate by simulation with this many samples.
        #[arg(long, value_name = "SAMPLES")]
        mc: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Borda totals for a rankings file, highest first.
    Borda { rankings: PathBuf },
    /// Convert rankings, ratings or an additive domain to canonical profile CSV.
    Ingest {
        kind: Kind,
        input: PathBuf,
        output: PathBuf,
        /// Number of users to keep when extracting from ratings.
        #[arg(long, required_if_eq("kind", "ratings"))]
        target_users: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Rankings,
    Ratings,
    Additive,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().unwrap().get_name())
    }
}

/// A diagnostic and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    /// Bad arguments exit with 2, malformed input with 3, anything else with 1.
    fn from_error(context: Option<&Path>, err: Error) -> Self {
        let code = match err {
            Error::InvalidInput(_) => 2,
            Error::Parse { .. } | Error::Csv(_) | Error::Consistency(_) => 3,
            Error::Extraction(_) | Error::Io(_) => 1,
        };
        match context {
            Some(path) => Self::new(code, format!("{}: {err}", path.display())),
            None => Self::new(code, err.to_string()),
        }
    }

    fn io(path: &Path, err: io::Error) -> Self {
        Self::new(1, format!("{}: {err}", path.display()))
    }
}

type CmdResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CmdResult<()> {
    let started = Instant::now();
    let (output, manifest) = match cli.command {
        Command::Pareto { profiles, group } => cmd_pareto(&profiles, &group, started)?,
        Command::Scan {
            profiles,
            config,
            seed,
            cap,
            group_sizes,
            min_samples_flag,
            output,
        } => {
            let mut cfg = match &config {
                Some(path) => read_config(path)?,
                None => ScanConfig::default(),
            };
            if let Some(seed) = seed {
                cfg.rng_seed = seed;
            }
            if let Some(cap) = cap {
                cfg.max_groups_per_size = cap;
            }
            if let Some(sizes) = group_sizes {
                cfg.group_sizes = sizes;
            }
            if let Some(flag) = min_samples_flag {
                cfg.min_samples_flag = flag;
            }
            let (csv, manifest) = cmd_scan(&profiles, config.as_deref(), cfg, started)?;
            (Output { bytes: csv, path: output }, manifest)
        }
        Command::Expected { m, n, mc, seed } => cmd_expected(m, n, mc, seed, started)?,
        Command::Borda { rankings } => cmd_borda(&rankings, started)?,
        Command::Ingest {
            kind,
            input,
            output,
            target_users,
        } => cmd_ingest(kind, &input, output, target_users, started)?,
    };
    output.emit(&manifest, cli.manifest.as_deref())
}

/// Command output, written only once the command has fully succeeded.
struct Output {
    bytes: Vec<u8>,
    /// `None` means standard output.
    path: Option<PathBuf>,
}

impl Output {
    fn stdout(bytes: Vec<u8>) -> Self {
        Self { bytes, path: None }
    }

    fn emit(self, manifest: &RunManifest, manifest_path: Option<&Path>) -> CmdResult<()> {
        match &self.path {
            Some(path) => {
                fs::write(path, &self.bytes).map_err(|e| Failure::io(path, e))?;
                let sidecar = sidecar_path(path);
                manifest.write(&sidecar).map_err(|e| Failure::io(&sidecar, e))?;
            }
            None => {
                let mut out = io::stdout().lock();
                out.write_all(&self.bytes)
                    .and_then(|()| out.flush())
                    .map_err(|e| Failure::new(1, format!("standard output: {e}")))?;
            }
        }
        if let Some(path) = manifest_path {
            manifest.write(path).map_err(|e| Failure::io(path, e))?;
        }
        Ok(())
    }
}

fn open(path: &Path) -> CmdResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Failure::io(path, e))
}

fn read_profiles(path: &Path) -> CmdResult<ProfileTable> {
    read_profile_csv(open(path)?).map_err(|e| Failure::from_error(Some(path), e))
}

fn read_config(path: &Path) -> CmdResult<ScanConfig> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    toml::from_str(&text).map_err(|e| Failure::new(3, format!("{}: {e}", path.display())))
}

fn parse_group(spec: &str, table: &ProfileTable) -> CmdResult<Group> {
    let group = if spec.trim() == "all" {
        Group::all(table.agent_count())
    } else {
        let members = spec
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::new(2, format!("bad agent index {:?} in group {spec:?}", s.trim())))
            })
            .collect::<CmdResult<Vec<_>>>()?;
        Group::new(members)
    }
    .map_err(|e| Failure::from_error(None, e))?;
    table.check_group(&group).map_err(|e| Failure::from_error(None, e))?;
    Ok(group)
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::new(1, e.to_string())
}

fn cmd_pareto(path: &Path, spec: &str, started: Instant) -> CmdResult<(Output, RunManifest)> {
    let table = read_profiles(path)?;
    let group = parse_group(spec, &table)?;
    let result = pareto_set(&group, &table).map_err(|e| Failure::from_error(None, e))?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["outcome".to_string(), "label".to_string()];
    header.extend(group.members().iter().map(|&a| table.profile(a).agent_id().to_string()));
    w.write_record(&header).map_err(csv_failure)?;
    for &o in &result.optimal {
        // unlabelled spaces leave the column empty, as in the canonical CSV
        let label = table.space().labels().map_or("", |l| l[o].as_str());
        let mut row = vec![o.to_string(), label.to_string()];
        row.extend(group.members().iter().map(|&a| table.utility(a, o).to_string()));
        w.write_record(&row).map_err(csv_failure)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::new(1, e.to_string()))?;
    let manifest = RunManifest::new("pareto", &[path], started).option("group", spec);
    Ok((Output::stdout(bytes), manifest))
}

fn cmd_scan(
    path: &Path,
    config_path: Option<&Path>,
    config: ScanConfig,
    started: Instant,
) -> CmdResult<(Vec<u8>, RunManifest)> {
    let table = read_profiles(path)?;
    let report = run_scan(&config, &table).map_err(|e| Failure::from_error(None, e))?;
    let mut bytes = Vec::new();
    report.write_csv(&mut bytes).expect("writing to memory");

    let mut inputs = vec![path];
    inputs.extend(config_path);
    let mut manifest = RunManifest::new("scan", &inputs, started);
    manifest.rng_seed = Some(config.rng_seed);
    manifest.config = Some(config);
    Ok((bytes, manifest))
}

fn cmd_expected(
    m: usize,
    n: usize,
    mc: Option<usize>,
    seed: u64,
    started: Instant,
) -> CmdResult<(Output, RunManifest)> {
    let query = ExpectationQuery::new(m, n).map_err(|e| Failure::from_error(None, e))?;
    let exact = expected_pareto_count(query).map_err(|e| Failure::from_error(None, e))?;

    let mut text = if exact.value().is_integer() {
        format!("{exact}\n")
    } else if exact.is_exact_f64() {
        format!("{exact} = {}\n", exact.to_f64())
    } else {
        format!("{exact} ≈ {}\n", exact.to_f64())
    };
    let mut manifest = RunManifest::new("expected", &[], started)
        .option("m", m)
        .option("n", n);
    if let Some(samples) = mc {
        let est = expected_pareto_count_mc(query, samples, seed).map_err(|e| Failure::from_error(None, e))?;
        text.push_str(&format!(
            "monte carlo: {} ± {} ({} samples)\n",
            est.mean, est.std_error, est.samples
        ));
        manifest = manifest.option("mc", samples);
        manifest.rng_seed = Some(seed);
    }
    manifest.duration_seconds = started.elapsed().as_secs_f64();
    Ok((Output::stdout(text.into_bytes()), manifest))
}

fn cmd_borda(path: &Path, started: Instant) -> CmdResult<(Output, RunManifest)> {
    let data = parse_rankings(open(path)?).map_err(|e| Failure::from_error(Some(path), e))?;
    let tally = borda_count(&data.ballots, &data.space).map_err(|e| Failure::from_error(Some(path), e))?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["item", "score"]).map_err(csv_failure)?;
    for (item, score) in tally.ranking() {
        w.write_record([data.space.label(item).as_ref(), &score.to_string()])
            .map_err(csv_failure)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::new(1, e.to_string()))?;
    Ok((Output::stdout(bytes), RunManifest::new("borda", &[path], started)))
}

fn cmd_ingest(
    kind: Kind,
    input: &Path,
    output: PathBuf,
    target_users: Option<usize>,
    started: Instant,
) -> CmdResult<(Output, RunManifest)> {
    let context = |e| Failure::from_error(Some(input), e);
    let table = match kind {
        Kind::Rankings => load_rankings(open(input)?).map_err(context)?,
        Kind::Additive => load_additive_domain(open(input)?).map_err(context)?,
        Kind::Ratings => {
            let ratings = load_ratings(open(input)?).map_err(context)?;
            let target = target_users.expect("clap enforces --target-users for ratings");
            extract_complete_submatrix(&ratings, target).map_err(context)?
        }
    };
    let mut bytes = Vec::new();
    write_profile_csv(&table, &mut bytes).map_err(|e| Failure::from_error(None, e))?;

    let mut manifest = RunManifest::new("ingest", &[input], started).option("kind", kind);
    if let Some(t) = target_users {
        manifest = manifest.option("target_users", t);
    }
    Ok((Output { bytes, path: Some(output) }, manifest))
}
