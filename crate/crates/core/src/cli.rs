//! `radoppler` command line: simulate → spectrogram → ra → track, with files
//! between stages.
//!
//! Every matrix artifact `OUT` gets two sidecars: `OUT.axis` (axes and, for
//! RA output, the corner and filter bank) and `OUT.manifest`. Cubes get
//! `NAME.manifest` next to `NAME.iq` and `NAME.meta`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ndarray::Array2;

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::io::{self, fmt_g17, MatrixFormat};
use crate::kv::{format_list, KvFile};
use crate::linspec::{self, Spectrogram};
use crate::manifest::{sidecar_path, RunManifest};
use crate::preprocess;
use crate::ra::{self, Corner, RaOptions, RaSpectrogram};
use crate::simulator::{self, Preset, Scenario};
use crate::tracker::{self, DEFAULT_MEASUREMENT_NOISE, DEFAULT_PROCESS_NOISE};

pub const LOG_ENV: &str = "RADOPPLER_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "radoppler",
    version,
    about = "Micro-Doppler spectrogram toolkit for FMCW radar"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a radar cube from a scenario file or a built-in preset.
    Simulate(SimulateArgs),
    /// Range FFT, clutter filter and STFT: cube to spectrogram.
    Spectrogram(SpectrogramArgs),
    /// Resolution-adaptive spectrogram from a cube or a spectrogram matrix.
    Ra(RaArgs),
    /// Peak track plus Kalman smoothing over a spectrogram matrix.
    Track(TrackArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    pub scenario: Option<PathBuf>,
    /// fall_like, limp_like or walk_like.
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Output cube; `.iq` and `.meta` are written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrogramArgs {
    #[arg(long)]
    pub cube: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "csv")]
    pub format: MatrixFormat,
}

#[derive(Debug, Args)]
pub struct RaArgs {
    /// Cube (`.iq`/`.meta`) or a csv/bin spectrogram with its `.axis` sidecar.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Number of filters per side; overrides the config.
    #[arg(short = 'M', long = "num-filters")]
    pub num_filters: Option<usize>,
    /// Skip corner detection and use this corner frequency, Hz.
    #[arg(long = "force-fc")]
    pub force_fc: Option<f64>,
    #[arg(long, default_value = "csv")]
    pub format: MatrixFormat,
}

#[derive(Debug, Args)]
pub struct TrackArgs {
    /// csv/bin spectrogram (linear or RA), ideally with its `.axis` sidecar.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PROCESS_NOISE)]
    pub q: f64,
    #[arg(long, default_value_t = DEFAULT_MEASUREMENT_NOISE)]
    pub r: f64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status. Errors go to stderr.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let command_line: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match run(&cli.command, &command_line) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: &Command, command_line: &[String]) -> Result<()> {
    match command {
        Command::Simulate(a) => cmd_simulate(a, command_line),
        Command::Spectrogram(a) => cmd_spectrogram(a, command_line),
        Command::Ra(a) => cmd_ra(a, command_line),
        Command::Track(a) => cmd_track(a, command_line),
    }
}

pub fn cmd_simulate(args: &SimulateArgs, command_line: &[String]) -> Result<()> {
    let mut manifest = RunManifest::new("simulate", command_line);
    let scenario = match (&args.scenario, args.preset) {
        (Some(path), _) => {
            let s = Scenario::load(path)?;
            manifest.input("scenario", path)?;
            s
        }
        (None, Some(p)) => {
            manifest.push("preset", p.name());
            simulator::preset(p)
        }
        (None, None) => {
            return Err(Error::InvalidParameter(
                "need --scenario or --preset".into(),
            ))
        }
    };
    log::info!(
        "synthesizing {} chirps × {} samples, {} scatterers",
        scenario.params.num_chirps,
        scenario.params.num_fast_samples,
        scenario.scatterers.len()
    );
    let cube = simulator::synthesize(&scenario)?;
    let iq = io::write_radar_cube(&cube, &args.out)?;
    let (_, meta) = io::cube_paths(&args.out);
    manifest
        .push_section("scenario", &scenario.to_kv())
        .output("cube", &iq)?
        .output("meta", &meta)?;
    manifest.write(&args.out.with_extension("manifest"))
}

pub fn cmd_spectrogram(args: &SpectrogramArgs, command_line: &[String]) -> Result<()> {
    let mut manifest = RunManifest::new("spectrogram", command_line);
    let cfg = load_config(args.config.as_deref(), &mut manifest)?;
    let spec = spectrogram_from_cube(&args.cube, &cfg, &mut manifest)?;
    manifest.push_section("config", &cfg.to_kv());
    write_image_or_matrix(&spec.power, &args.out, args.format)?;
    linear_axis_kv(&spec).write(&sidecar_path(&args.out, "axis"))?;
    manifest
        .push("output.format", args.format.name())
        .output("matrix", &args.out)?
        .output("axis", &sidecar_path(&args.out, "axis"))?;
    manifest.write(&sidecar_path(&args.out, "manifest"))
}

pub fn cmd_ra(args: &RaArgs, command_line: &[String]) -> Result<()> {
    let mut manifest = RunManifest::new("ra", command_line);
    let mut cfg = load_config(args.config.as_deref(), &mut manifest)?;
    if let Some(m) = args.num_filters {
        cfg.num_filters = m;
        cfg.validate()?;
    }
    let spec = if is_cube_path(&args.input) {
        spectrogram_from_cube(&args.input, &cfg, &mut manifest)?
    } else {
        load_linear_spectrogram(&args.input, &mut manifest)?
    };
    manifest.push_section("config", &cfg.to_kv());
    let opts = RaOptions {
        num_filters: cfg.num_filters,
        log_floor: cfg.log_floor,
        forced_fc_hz: args.force_fc,
    };
    let ra = ra::ra_transform_with(&spec, &opts)?;
    log::info!(
        "corner f_c = {:.3} Hz ({} filters per side)",
        ra.f_c_hz(),
        ra.num_filters()
    );
    write_image_or_matrix(&ra.power, &args.out, args.format)?;
    let axis = ra_axis_kv(&ra);
    axis.write(&sidecar_path(&args.out, "axis"))?;
    manifest.push_section("corner", &corner_kv(&ra));
    manifest
        .push("output.format", args.format.name())
        .output("matrix", &args.out)?
        .output("axis", &sidecar_path(&args.out, "axis"))?;
    manifest.write(&sidecar_path(&args.out, "manifest"))
}

pub fn cmd_track(args: &TrackArgs, command_line: &[String]) -> Result<()> {
    let mut manifest = RunManifest::new("track", command_line);
    let power = load_real_matrix(&args.input)?;
    manifest.input("matrix", &args.input)?;
    let (frames, cols) = power.dim();
    let axis_path = sidecar_path(&args.input, "axis");
    let (freq, times) = if axis_path.exists() {
        manifest.input("axis", &axis_path)?;
        let axis = AxisSidecar::read(&axis_path)?;
        axis.check_dims(frames, cols)?;
        (axis.freq_axis.clone(), axis.time_axis())
    } else {
        log::warn!(
            "{} not found; using column and frame indices as axes",
            axis_path.display()
        );
        (
            (0..cols).map(|c| c as f64).collect(),
            (0..frames).map(|t| t as f64).collect(),
        )
    };
    let track = tracker::track(&power, &freq, &times, args.q, args.r)?;
    let mut csv = String::from("frame_time,raw_peak,smoothed\n");
    for ((t, raw), s) in track
        .frame_times
        .iter()
        .zip(&track.raw_peaks)
        .zip(&track.smoothed)
    {
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt_g17(*t),
            fmt_g17(*raw),
            fmt_g17(*s)
        ));
    }
    std::fs::write(&args.out, csv).map_err(|e| Error::io(&args.out, e))?;
    manifest
        .push("tracker.q", fmt_g17(args.q))
        .push("tracker.r", fmt_g17(args.r))
        .output("track", &args.out)?;
    manifest.write(&sidecar_path(&args.out, "manifest"))
}

fn load_config(path: Option<&Path>, manifest: &mut RunManifest) -> Result<PipelineConfig> {
    match path {
        Some(p) => {
            let cfg = PipelineConfig::load(p)?;
            manifest.input("config", p)?;
            Ok(cfg)
        }
        None => Ok(PipelineConfig::default()),
    }
}

fn spectrogram_from_cube(
    path: &Path,
    cfg: &PipelineConfig,
    manifest: &mut RunManifest,
) -> Result<Spectrogram> {
    let cube = io::load_radar_cube(path)?;
    let (iq, meta) = io::cube_paths(path);
    manifest.input("cube", &iq)?.input("meta", &meta)?;
    log::info!(
        "cube {}: {} chirps × {} samples",
        iq.display(),
        cube.params().num_chirps,
        cube.params().num_fast_samples
    );
    let profiles = preprocess::preprocess(&cube, cfg)?;
    let spec = linspec::stft_spectrogram(&profiles, cfg)?;
    log::info!(
        "spectrogram: {} frames × {} bins",
        spec.num_frames(),
        spec.num_freq_bins()
    );
    Ok(spec)
}

/// A cube path names `.iq`/`.meta` or has no extension and a `.meta` next to it.
fn is_cube_path(path: &Path) -> bool {
    match path.extension().and_then(|e| e.to_str()) {
        Some("iq") | Some("meta") => true,
        None => path.with_extension("meta").exists(),
        _ => false,
    }
}

fn load_real_matrix(path: &Path) -> Result<Array2<f64>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P5") {
        return Err(Error::format(
            path,
            "pgm is a display format; pass the csv or bin matrix instead",
        ));
    }
    io::load_matrix(path)?.into_real()
}

fn load_linear_spectrogram(path: &Path, manifest: &mut RunManifest) -> Result<Spectrogram> {
    let power = load_real_matrix(path)?;
    manifest.input("matrix", path)?;
    let axis_path = sidecar_path(path, "axis");
    let axis = AxisSidecar::read(&axis_path)?;
    manifest.input("axis", &axis_path)?;
    if axis.kind != "linear" {
        return Err(Error::metadata(
            &axis_path,
            format!("expected a linear spectrogram, found kind `{}`", axis.kind),
        ));
    }
    let (frames, cols) = power.dim();
    axis.check_dims(frames, cols)?;
    let mut spec = Spectrogram::from_power(power, 2.0 * axis.f_max, 1, 0)?;
    spec.time_axis = axis.time_axis();
    Ok(spec)
}

/// pgm gets a display layout: one image row per frequency, highest at the
/// top, time running left to right. csv and bin keep `frames × bins`.
fn write_image_or_matrix(power: &Array2<f64>, out: &Path, format: MatrixFormat) -> Result<()> {
    match format {
        MatrixFormat::Pgm => {
            let (frames, cols) = power.dim();
            let image = Array2::from_shape_fn((cols, frames), |(r, t)| power[[t, cols - 1 - r]]);
            io::write_matrix(&image, out, format)
        }
        _ => io::write_matrix(power, out, format),
    }
}

/// Contents of an `.axis` sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSidecar {
    /// `linear` or `ra`.
    pub kind: String,
    pub num_frames: usize,
    pub num_columns: usize,
    pub f_max: f64,
    /// Signed frequency of each matrix column, Hz.
    pub freq_axis: Vec<f64>,
    pub time_start: f64,
    pub time_step: f64,
}

impl AxisSidecar {
    pub fn read(path: &Path) -> Result<Self> {
        let kv = KvFile::read(path)?;
        Ok(Self {
            kind: kv.require("kind")?.to_string(),
            num_frames: kv.require_parsed("num_frames")?,
            num_columns: kv.require_parsed("num_columns")?,
            f_max: kv.require_parsed("f_max")?,
            freq_axis: kv.require_f64_list("freq_axis")?,
            time_start: kv.require_parsed("time_start")?,
            time_step: kv.require_parsed("time_step")?,
        })
    }

    pub fn time_axis(&self) -> Vec<f64> {
        (0..self.num_frames)
            .map(|t| self.time_start + t as f64 * self.time_step)
            .collect()
    }

    fn check_dims(&self, frames: usize, cols: usize) -> Result<()> {
        if (frames, cols) != (self.num_frames, self.num_columns) || self.freq_axis.len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {frames}×{cols} but its axis sidecar describes {}×{} ({} frequencies)",
                self.num_frames,
                self.num_columns,
                self.freq_axis.len()
            )));
        }
        Ok(())
    }
}

fn base_axis_kv(kind: &str, frames: usize, freq: &[f64], f_max: f64, times: &[f64]) -> KvFile {
    let step = if times.len() > 1 {
        times[1] - times[0]
    } else {
        1.0
    };
    let mut kv = KvFile::new();
    kv.push("kind", kind)
        .push("num_frames", frames)
        .push("num_columns", freq.len())
        .push("f_max", fmt_g17(f_max))
        .push("freq_axis", format_list(freq))
        .push("time_start", fmt_g17(times.first().copied().unwrap_or(0.0)))
        .push("time_step", fmt_g17(step));
    kv
}

fn linear_axis_kv(spec: &Spectrogram) -> KvFile {
    base_axis_kv(
        "linear",
        spec.num_frames(),
        &spec.freq_axis,
        spec.f_max,
        &spec.time_axis,
    )
}

fn ra_axis_kv(ra: &RaSpectrogram) -> KvFile {
    let f_max = ra.bank.f_max() as f64 * ra.bin_hz;
    let mut kv = base_axis_kv(
        "ra",
        ra.power.nrows(),
        &ra.freq_axis(),
        f_max,
        &ra.time_axis,
    );
    for (k, v) in corner_kv(ra).entries() {
        kv.push(k.clone(), v);
    }
    kv
}

fn corner_kv(ra: &RaSpectrogram) -> KvFile {
    let mut kv = KvFile::new();
    match ra.corner {
        Corner::Detected(c) => {
            kv.push("source", "detected")
                .push("f_nc", c.f_nc)
                .push("f_pc", c.f_pc)
                .push("f_c", c.f_c)
                .push("objective", fmt_g17(c.objective_value));
        }
        Corner::Forced { f_c_bins } => {
            kv.push("source", "forced").push("f_c", fmt_g17(f_c_bins));
        }
    }
    kv.push("f_c_hz", fmt_g17(ra.f_c_hz()))
        .push("bin_hz", fmt_g17(ra.bin_hz))
        .push("num_filters", ra.num_filters())
        .push("break_points", format_list(ra.bank.break_points()));
    kv
}
