//! The six verbs. Each writes its files under the output directory and
//! returns their paths.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use zapsim_core::quantum::CONVENTION;
use zapsim_core::{
    diagnose, energy_transmission, estimate_eta, eta_curve, find_nulls, gaussian_pulse,
    is_nonclassical, peak_eta, preset, propagate, pulse_area, sample_quadratures, shaped_optimum,
    temperature_presets, to_spectrum, to_time, visibility_curve, wigner, wigner_grid,
    Error as CoreError, EtaCorrelator, GridDiagnostics, GridWarning, HeraldedState, MediumParams,
    TemporalField,
};

use crate::config::{ConfigError, PresetSelection, ScenarioConfig};
use crate::output::{header, num, write_file, Params, Table};

/// Floor applied to the log column of efficiency scans.
pub const LOG_FLOOR: f64 = 1e-12;

/// Environment variable holding the worker count.
pub const THREADS_VAR: &str = "ZAPSIM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Propagate,
    Xcorr,
    EtaScan,
    DepthScan,
    Wigner,
    Sample,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Propagate => "propagate",
            Verb::Xcorr => "xcorr",
            Verb::EtaScan => "eta-scan",
            Verb::DepthScan => "depth-scan",
            Verb::Wigner => "wigner",
            Verb::Sample => "sample",
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    /// A configuration error inside the named file.
    ConfigFile(PathBuf, ConfigError),
    Model(CoreError),
    Threads(String),
    Io(PathBuf, io::Error),
}

impl RunError {
    /// 1 for invalid input, 2 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Io(..) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "invalid configuration: {e}"),
            RunError::ConfigFile(p, e) => write!(f, "invalid configuration: {}: {e}", p.display()),
            RunError::Model(e) => write!(f, "invalid model input: {e}"),
            RunError::Threads(v) => {
                write!(f, "{THREADS_VAR} must be a positive integer, got `{v}`")
            }
            RunError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        RunError::Model(e)
    }
}

impl From<(PathBuf, io::Error)> for RunError {
    fn from((p, e): (PathBuf, io::Error)) -> Self {
        RunError::Io(p, e)
    }
}

#[derive(Debug, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    /// Non-fatal notes, e.g. grid-adequacy warnings.
    pub warnings: Vec<String>,
}

/// Worker count from the environment; `None` means use the machine default.
pub fn threads_from_env() -> Result<Option<usize>, RunError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(RunError::Threads(v)),
        },
    }
}

/// Runs `verb` on a pool of `threads` workers (machine default if `None`).
pub fn run(
    verb: Verb,
    cfg: &ScenarioConfig,
    threads: Option<usize>,
) -> Result<RunReport, RunError> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| RunError::Threads(e.to_string()))?;
    pool.install(|| match verb {
        Verb::Propagate => run_propagate(cfg),
        Verb::Xcorr => run_xcorr(cfg),
        Verb::EtaScan => run_eta_scan(cfg),
        Verb::DepthScan => run_efficiency_vs_depth(cfg),
        Verb::Wigner => run_wigner(cfg),
        Verb::Sample => run_sample(cfg),
    })
}

/// A medium together with the name used in file names and tables.
#[derive(Debug, Clone)]
struct Case {
    label: String,
    /// Preset index, 0 for the configured custom medium.
    index: usize,
    medium: MediumParams,
}

fn cases(cfg: &ScenarioConfig) -> Result<Vec<Case>, RunError> {
    let from_preset = |i: usize| {
        let p = preset(i).ok_or_else(|| ConfigError {
            line: None,
            key: Some("scan.presets".to_owned()),
            message: format!("no preset {i}"),
        })?;
        Ok::<_, RunError>(Case {
            label: p.label,
            index: p.index,
            medium: p.medium,
        })
    };
    match &cfg.scan_presets {
        PresetSelection::All => temperature_presets()
            .iter()
            .map(|p| from_preset(p.index))
            .collect(),
        PresetSelection::List(l) => l.iter().map(|&i| from_preset(i)).collect(),
        PresetSelection::Medium => Ok(vec![Case {
            label: "medium".to_owned(),
            index: 0,
            medium: cfg.medium()?,
        }]),
    }
}

fn input_pulse(cfg: &ScenarioConfig) -> Result<TemporalField, RunError> {
    let grid = cfg.grid()?;
    Ok(gaussian_pulse(
        &grid,
        cfg.pulse_fwhm_fs * 1e-15,
        0.0,
        cfg.pulse_detuning_ghz * 1e9,
    )?)
}

fn describe(w: &GridWarning) -> String {
    match w {
        GridWarning::CoarseLine { samples } => format!(
            "coarse frequency grid: {samples:.2} samples across the line FWHM (want >= {})",
            zapsim_core::medium::MIN_SAMPLES_PER_LINE
        ),
        GridWarning::EdgeAmplitude { ratio } => format!(
            "field reaches the window edge: edge/peak = {ratio:.3e} (want <= {:.0e})",
            zapsim_core::medium::MAX_EDGE_RATIO
        ),
    }
}

fn add_diagnostics(p: &mut Params, d: &GridDiagnostics) {
    p.num("grid.samples_per_line", d.samples_per_line)
        .num("grid.edge_ratio", d.edge_ratio);
    if d.warnings.is_empty() {
        p.add("grid.warnings", "none");
    }
    for w in &d.warnings {
        p.add("grid.warning", describe(w));
    }
}

fn add_medium(p: &mut Params, m: &MediumParams) {
    p.num("medium.depth", m.depth)
        .num("medium.t2_ps", m.t2 * 1e12)
        .num("medium.detuning_ghz", m.detune_a * 1e-9);
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("params.txt")
}

struct Written {
    files: Vec<PathBuf>,
    warnings: Vec<String>,
}

fn emit(
    dir: &Path,
    stem: &str,
    verb: Verb,
    cfg: &ScenarioConfig,
    notes: &[String],
    table: &Table,
    params: &Params,
) -> Result<Vec<PathBuf>, RunError> {
    let csv = dir.join(format!("{stem}.csv"));
    let side = sidecar_path(&csv);
    write_file(&csv, &(header(verb.name(), cfg, notes) + &table.render()))?;
    write_file(&side, &(header(verb.name(), cfg, &[]) + &params.render()))?;
    Ok(vec![csv, side])
}

fn collect(parts: Vec<Result<Written, RunError>>) -> Result<RunReport, RunError> {
    let mut report = RunReport::default();
    for p in parts {
        let w = p?;
        report.files.extend(w.files);
        report.warnings.extend(w.warnings);
    }
    Ok(report)
}

/// Input and transmitted field for one medium.
pub fn run_propagate(cfg: &ScenarioConfig) -> Result<RunReport, RunError> {
    let input = input_pulse(cfg)?;
    let grid = *input.grid();
    let m = cfg.medium()?;
    let spec = to_spectrum(&input);
    let out = to_time(&propagate(&spec, &m)?);
    let diag = diagnose(&out, &m);
    let (t0, t1) = (
        cfg.propagate_t_min_ps * 1e-12,
        cfg.propagate_t_max_ps * 1e-12,
    );
    let mut table = Table::new(vec![
        "time_ps", "in_re", "in_im", "out_re", "out_im", "out_abs",
    ]);
    for (k, t) in grid.times().enumerate() {
        if t < t0 || t > t1 {
            continue;
        }
        let (a, b) = (input.amp()[k], out.amp()[k]);
        table.push(vec![
            num(t * 1e12),
            num(a.re),
            num(a.im),
            num(b.re),
            num(b.im),
            num(b.norm()),
        ]);
    }
    let (area_in, area_out) = (pulse_area(&input), pulse_area(&out));
    let mut p = Params::default();
    add_medium(&mut p, &m);
    p.num("area_in.re", area_in.re)
        .num("area_in.im", area_in.im)
        .num("area_out.re", area_out.re)
        .num("area_out.im", area_out.im)
        .num("area_ratio.abs", area_out.norm() / area_in.norm())
        .num("exp_minus_depth", (-m.depth).exp())
        .num("transmission", energy_transmission(&spec, &m)?);
    add_diagnostics(&mut p, &diag);
    let files = emit(
        &cfg.output_directory,
        "propagate",
        Verb::Propagate,
        cfg,
        &[],
        &table,
        &p,
    )?;
    Ok(RunReport {
        files,
        warnings: diag.warnings.iter().map(describe).collect(),
    })
}

/// Visibility of the transmitted pulse against the input pulse, per medium.
pub fn run_xcorr(cfg: &ScenarioConfig) -> Result<RunReport, RunError> {
    let input = input_pulse(cfg)?;
    let spec = to_spectrum(&input);
    let delays = cfg.delays();
    let parts: Vec<_> = cases(cfg)?
        .par_iter()
        .map(|c| {
            let out = to_time(&propagate(&spec, &c.medium)?);
            let diag = diagnose(&out, &c.medium);
            let curve = visibility_curve(&out, &input, &delays)?;
            let norm = curve.peak_normalized();
            let mut table = Table::new(vec!["delay_ps", "visibility", "visibility_norm"]);
            for ((x, y), yn) in curve.xs().iter().zip(curve.ys()).zip(norm.ys()) {
                table.push(vec![num(x * 1e12), num(*y), num(*yn)]);
            }
            let (tp, vp) = peak_eta(&curve)?;
            let nulls = find_nulls(&curve, NULL_CONTRAST);
            let mut p = Params::default();
            p.add("label", &c.label);
            add_medium(&mut p, &c.medium);
            p.num("peak.delay_ps", tp * 1e12)
                .num("peak.visibility", vp)
                .num("null_contrast", NULL_CONTRAST)
                .add(
                    "nulls_ps",
                    nulls
                        .iter()
                        .map(|t| num(t * 1e12))
                        .collect::<Vec<_>>()
                        .join(" "),
                );
            add_diagnostics(&mut p, &diag);
            let files = emit(
                &cfg.output_directory,
                &format!("xcorr_{}", c.label),
                Verb::Xcorr,
                cfg,
                &[format!("medium: {}", c.label)],
                &table,
                &p,
            )?;
            Ok(Written {
                files,
                warnings: diag
                    .warnings
                    .iter()
                    .map(|w| format!("{}: {}", c.label, describe(w)))
                    .collect(),
            })
        })
        .collect();
    collect(parts)
}

/// Minima below this fraction of the neighbouring maxima count as nulls.
pub const NULL_CONTRAST: f64 = 0.2;

/// Efficiency versus delay with the un-modulated input pulse as oscillator.
pub fn run_eta_scan(cfg: &ScenarioConfig) -> Result<RunReport, RunError> {
    let input = input_pulse(cfg)?;
    let delays = cfg.delays();
    let parts: Vec<_> = cases(cfg)?
        .par_iter()
        .map(|c| {
            let curve = eta_curve(&input, &c.medium, &input, cfg.eta_base, &delays)?;
            let refined = EtaCorrelator::new(&input, &c.medium, &input, cfg.eta_base)?.peak();
            let mut table = Table::new(vec!["delay_ps", "eta", "log10_eta", "log_clamped"]);
            let mut clamped = 0;
            for (x, &y) in curve.xs().iter().zip(curve.ys()) {
                let low = y < LOG_FLOOR;
                clamped += low as usize;
                table.push(vec![
                    num(x * 1e12),
                    num(y),
                    num(y.max(LOG_FLOOR).log10()),
                    (low as u8).to_string(),
                ]);
            }
            let (tp, ep) = peak_eta(&curve)?;
            let transmission = curve
                .meta
                .params
                .iter()
                .find(|(k, _)| k == "transmission")
                .map_or(f64::NAN, |(_, v)| *v);
            let mut p = Params::default();
            p.add("label", &c.label);
            add_medium(&mut p, &c.medium);
            p.num("eta_base", cfg.eta_base)
                .num("transmission", transmission)
                .num("scan_peak.delay_ps", tp * 1e12)
                .num("scan_peak.eta", ep)
                .num("refined_peak.delay_ps", refined.0 * 1e12)
                .num("refined_peak.eta", refined.1)
                .num("log_floor", LOG_FLOOR)
                .add("log_clamped_points", clamped);
            let files = emit(
                &cfg.output_directory,
                &format!("eta_scan_{}", c.label),
                Verb::EtaScan,
                cfg,
                &[
                    format!("medium: {}", c.label),
                    format!(
                        "log10_eta floored at {LOG_FLOOR:e}; log_clamped = 1 marks floored points"
                    ),
                ],
                &table,
                &p,
            )?;
            Ok(Written {
                files,
                warnings: Vec::new(),
            })
        })
        .collect();
    collect(parts)
}

/// Maximum efficiency with and without a shaped oscillator, one row per
/// medium.
pub fn run_efficiency_vs_depth(cfg: &ScenarioConfig) -> Result<RunReport, RunError> {
    let input = input_pulse(cfg)?;
    let shaper = cfg.shaper();
    let rows: Vec<_> = cases(cfg)?
        .par_iter()
        .map(|c| {
            let o = shaped_optimum(&input, &c.medium, &shaper, cfg.eta_base)?;
            Ok::<_, RunError>((c.clone(), o))
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(vec![
        "preset",
        "depth",
        "t2_ps",
        "eta_unshaped",
        "eta_shaped",
        "transmission",
    ]);
    let mut p = Params::default();
    p.num("eta_base", cfg.eta_base)
        .num("shaper.resolution_nm", shaper.resolution_fwhm * 1e9)
        .num("shaper.span_nm", shaper.span * 1e9)
        .add(
            "shaper.pixel_nm",
            shaper
                .pixel_width
                .map_or("none".to_owned(), |w| num(w * 1e9)),
        );
    for (c, o) in &rows {
        table.push(vec![
            c.index.to_string(),
            num(c.medium.depth),
            num(c.medium.t2 * 1e12),
            num(o.eta_unshaped),
            num(o.eta),
            num(o.transmission),
        ]);
        p.num(&format!("{}.shaped_only", c.label), o.eta_shaped)
            .num(
                &format!("{}.window_delay_ps", c.label),
                o.window_delay * 1e12,
            )
            .num(&format!("{}.mode_overlap", c.label), o.mode_overlap);
    }
    let notes = [
        "eta_shaped is the better of the shaped and the un-modulated oscillator".to_owned(),
        format!(
            "shaper resolution: {}",
            if cfg.shaper_enabled {
                "as configured"
            } else {
                "ideal (shaper.enabled = false)"
            }
        ),
    ];
    let files = emit(
        &cfg.output_directory,
        "depth_scan",
        Verb::DepthScan,
        cfg,
        &notes,
        &table,
        &p,
    )?;
    Ok(RunReport {
        files,
        warnings: Vec::new(),
    })
}

/// Wigner function on a square grid, optionally with `η` estimated from
/// synthetic homodyne data first.
pub fn run_wigner(cfg: &ScenarioConfig) -> Result<RunReport, RunError> {
    let mut p = Params::default();
    let eta = if cfg.wigner_from_samples {
        let truth = HeraldedState::new(cfg.sampling_eta)?;
        let q = sample_quadratures(&truth, cfg.n_samples, cfg.seed)?;
        let e = estimate_eta(&q)?;
        p.add("eta.source", "estimated from synthetic quadratures")
            .num("sampling.eta", cfg.sampling_eta)
            .add("sampling.seed", cfg.seed)
            .add("sampling.n_samples", cfg.n_samples)
            .num("estimate.raw", e.raw)
            .num("estimate.stderr", e.stderr)
            .add("estimate.clamped", e.clamped);
        e.eta
    } else {
        p.add("eta.source", "wigner.eta");
        cfg.wigner_eta
    };
    let state = HeraldedState::new(eta)?;
    let grid = wigner_grid(&state, cfg.wigner_half_width, cfg.wigner_n_side)?;
    let w0 = wigner(&state, 0.0, 0.0);
    let flag = is_nonclassical(&state);
    p.num("eta", eta)
        .num("w00", w0)
        .add("nonclassical", flag)
        .add("convention", CONVENTION);
    let mut table = Table::new(vec!["x", "p", "w"]);
    let axis = grid.axis();
    for (i, &x) in axis.iter().enumerate() {
        for (j, &q) in axis.iter().enumerate() {
            table.push(vec![num(x), num(q), num(grid.at(i, j))]);
        }
    }
    let notes = [
        format!("eta = {}", num(eta)),
        format!("W(0,0) = {}", num(w0)),
        format!("nonclassical = {flag}"),
        format!("convention: {CONVENTION}"),
        "state model: vacuum/one-photon mixture, no efficiency correction".to_owned(),
    ];
    let files = emit(
        &cfg.output_directory,
        "wigner",
        Verb::Wigner,
        cfg,
        &notes,
        &table,
        &p,
    )?;
    Ok(RunReport {
        files,
        warnings: Vec::new(),
    })
}

/// Synthetic quadrature data, one value per line.
pub fn run_sample(cfg: &ScenarioConfig) -> Result<RunReport, RunError> {
    let state = HeraldedState::new(cfg.sampling_eta)?;
    let q = sample_quadratures(&state, cfg.n_samples, cfg.seed)?;
    let e = estimate_eta(&q)?;
    let notes = [
        format!("convention: {CONVENTION}"),
        format!("seed: {}", cfg.seed),
        format!("eta: {}", cfg.sampling_eta),
        format!("n: {}", cfg.n_samples),
    ];
    let mut body = header(Verb::Sample.name(), cfg, &notes);
    for v in q.values() {
        body.push_str(&num(*v));
        body.push('\n');
    }
    let path = cfg.output_directory.join("samples.txt");
    write_file(&path, &body)?;
    let mut p = Params::default();
    p.num("sampling.eta", cfg.sampling_eta)
        .add("sampling.seed", cfg.seed)
        .add("sampling.n_samples", cfg.n_samples)
        .num("estimate.eta", e.eta)
        .num("estimate.raw", e.raw)
        .num("estimate.stderr", e.stderr)
        .add("estimate.clamped", e.clamped)
        .add("convention", CONVENTION);
    let side = sidecar_path(&path);
    write_file(
        &side,
        &(header(Verb::Sample.name(), cfg, &[]) + &p.render()),
    )?;
    Ok(RunReport {
        files: vec![path, side],
        warnings: Vec::new(),
    })
}
