//! `meshlift` command-line front end.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    evaluate, write_report_csv, write_report_json, write_trace_csv, EvalOptions, SizeMeasure,
};
use crate::error::{Error, Result};
use crate::estimation::{EstimationConfig, Schedule, DEFAULT_ITERATIONS};
use crate::lifting::{inverse_sequence, transform_sequence, CompConfig, Method, SubbandPair};
use crate::mesh::Topology;
use crate::mvf;
use crate::volume::{
    generate_phantom, read_volume, write_volume, PhantomSpec, TemporalSequence, SUBBAND_OFFSET,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ARGUMENT: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "meshlift",
    version,
    about = "Motion-compensated temporal Haar lifting"
)]
pub struct Cli {
    /// Repeat for more log output (info, debug).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic radially scaling slice sequence.
    Phantom(PhantomArgs),
    /// One temporal lifting level: subband volume plus motion sidecars.
    Transform(TransformArgs),
    /// Invert a transform back to the original slices.
    Reconstruct(ReconstructArgs),
    /// Compare compensation methods and write reports.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    #[arg(long, default_value_t = 128)]
    pub width: usize,
    #[arg(long, default_value_t = 128)]
    pub height: usize,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// One scale factor per step; defaults to alternating 1.0 and 1.05.
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<f64>>,
    #[arg(long, default_value_t = 24)]
    pub blobs: usize,
    #[arg(long, default_value_t = 40.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output `.raw` path; the JSON header goes next to it.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Seq,
    Par,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Seq => Schedule::Sequential,
            ScheduleArg::Par => Schedule::IndependentSets,
        }
    }
}

#[derive(Debug, Args)]
pub struct EstimationArgs {
    #[arg(long, default_value_t = 16)]
    pub grid_size: usize,
    /// Defaults to 7 for grids up to 8 px, 9 otherwise.
    #[arg(long)]
    pub search_range: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    pub iterations: usize,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Seq)]
    pub schedule: ScheduleArg,
    /// Start refinement from zero vectors instead of block matching.
    #[arg(long)]
    pub no_coarse: bool,
}

impl EstimationArgs {
    fn config(&self) -> EstimationConfig {
        let mut cfg = EstimationConfig::for_grid(self.grid_size, Topology::Quadrilateral);
        if let Some(r) = self.search_range {
            cfg.search_range = r;
        }
        cfg.max_iterations = self.iterations;
        cfg.schedule = self.schedule.into();
        cfg.use_coarse = !self.no_coarse;
        cfg
    }
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Input `.raw` volume with JSON header.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Output stem: writes `<stem>.raw`, `<stem>.json`, `<stem>.pair<t>.mvf`.
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, default_value = "quad", value_parser = parse_method)]
    pub method: Method,
    #[command(flatten)]
    pub estimation: EstimationArgs,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Subband `.raw` written by `transform`; sidecars are found by its stem.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Output `.raw` path.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "none,block,tri,quad", value_parser = parse_method)]
    pub methods: Vec<Method>,
    #[command(flatten)]
    pub estimation: EstimationArgs,
    /// Spatial wavelet levels of the size proxy.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// Shell command called as `<cmd> <in.pgm> <out>`; its output size
    /// replaces the proxy.
    #[arg(long)]
    pub external_encoder: Option<String>,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ARGUMENT
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) => EXIT_ARGUMENT,
        _ => EXIT_DATA,
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Phantom(a) => cmd_phantom(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Evaluate(a) => cmd_evaluate(a),
    }
}

fn cmd_phantom(a: &PhantomArgs) -> Result<()> {
    let scale_factors = match &a.scales {
        Some(s) => s.clone(),
        None => (0..a.steps)
            .map(|t| if t % 2 == 0 { 1.0 } else { 1.05 })
            .collect(),
    };
    let spec = PhantomSpec {
        width: a.width,
        height: a.height,
        time_steps: a.steps,
        scale_factors,
        blob_count: a.blobs,
        noise_amplitude: a.noise,
        seed: a.seed,
    };
    let seq = generate_phantom(&spec)?;
    write_volume(&seq, &a.output, 0)
}

fn read_input(path: &Path) -> Result<TemporalSequence> {
    let (seq, header) = read_volume(path)?;
    if header.offset != 0 {
        return Err(Error::format(format!(
            "{} holds subbands, not slices",
            path.display()
        )));
    }
    Ok(seq)
}

fn cmd_transform(a: &TransformArgs) -> Result<()> {
    let seq = read_input(&a.input)?;
    if seq.len() % 2 != 0 {
        return Err(Error::parameter(format!(
            "transform needs an even number of slices, input has {}",
            seq.len()
        )));
    }
    let config = CompConfig::new(a.method, a.estimation.config());
    config.estimation.validate()?;
    let pairs = transform_sequence(&seq, &config)?;

    let mut bands = Vec::with_capacity(seq.len());
    for (t, pair) in pairs.iter().enumerate() {
        mvf::write(&pair.compensator, mvf::pair_path(&a.output, t))?;
        bands.push(pair.lp.clone());
        bands.push(pair.hp.clone());
    }
    let volume = TemporalSequence::new(bands, 0)?;
    write_volume(&volume, a.output.with_extension("raw"), SUBBAND_OFFSET)?;
    log::info!("transformed {} pairs with {}", pairs.len(), a.method);
    Ok(())
}

fn cmd_reconstruct(a: &ReconstructArgs) -> Result<()> {
    let (volume, header) = read_volume(&a.input)?;
    if header.offset != SUBBAND_OFFSET {
        return Err(Error::format(format!(
            "{} is not a subband volume (offset {})",
            a.input.display(),
            header.offset
        )));
    }
    if volume.len() % 2 != 0 {
        return Err(Error::format("subband volume has an odd slice count"));
    }
    let stem = a.input.with_extension("");
    let pairs = volume
        .slices()
        .chunks_exact(2)
        .enumerate()
        .map(|(t, c)| {
            let path = mvf::pair_path(&stem, t);
            let compensator = mvf::read(&path).map_err(|e| match e {
                Error::Io(io) => Error::Sidecar(format!("{}: {io}", path.display())),
                other => other,
            })?;
            compensator.check(header.width, header.height)?;
            Ok(SubbandPair {
                lp: c[0].clone(),
                hp: c[1].clone(),
                compensator,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let seq = inverse_sequence(&pairs)?;
    if let Some(s) = seq.slices().iter().find(|s| !s.is_unsigned_in_range()) {
        return Err(Error::Range(format!(
            "reconstructed samples exceed {} bits (max {})",
            s.bit_depth(),
            s.samples().iter().max().copied().unwrap_or(0)
        )));
    }
    write_volume(&seq, &a.output, 0)
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    let seq = read_input(&a.input)?;
    let estimation = a.estimation.config();
    estimation.validate()?;
    let configs: Vec<CompConfig> = a
        .methods
        .iter()
        .map(|&m| CompConfig::new(m, estimation.clone()))
        .collect();
    let options = EvalOptions {
        levels: a.levels,
        size: match &a.external_encoder {
            Some(cmd) => SizeMeasure::External(cmd.clone()),
            None => SizeMeasure::Proxy,
        },
    };
    let reports = evaluate(&seq, &configs, &options)?;

    fs::create_dir_all(&a.output_dir)?;
    write_report_csv(
        &reports,
        BufWriter::new(File::create(a.output_dir.join("report.csv"))?),
    )?;
    write_report_json(
        &reports,
        BufWriter::new(File::create(a.output_dir.join("report.json"))?),
    )?;
    for (config, report) in configs.iter().zip(&reports) {
        for (t, trace) in report.traces.iter().enumerate() {
            if let Some(trace) = trace {
                let name = format!("trace_{}_pair{t}.csv", config.method.label());
                let file = BufWriter::new(File::create(a.output_dir.join(name))?);
                write_trace_csv(trace, estimation.max_iterations, file)?;
            }
        }
        println!(
            "{:<8} total {:>9} bytes  mean LP PSNR {:.3} dB",
            report.method, report.total_bytes, report.mean_lp_psnr_db
        );
    }
    Ok(())
}
