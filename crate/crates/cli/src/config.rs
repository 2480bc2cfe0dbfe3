//! Scenario files: flat `section.key = value` lines, `#` starts a comment.

use std::fmt;
use std::path::{Path, PathBuf};

use zapsim_core::{
    make_grid, preset, resolution_kernel, Error as CoreError, Grid, MediumParams, ShaperConfig,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, key: Option<&str>, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            key: key.map(str::to_owned),
            message: message.into(),
        }
    }

    fn key(key: &str, message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            key: Some(key.to_owned()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}: {k}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "{k}: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Which media a per-preset scan covers.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetSelection {
    All,
    /// Only the medium described by the `medium.*` keys.
    Medium,
    List(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub grid_n: usize,
    pub grid_dt_fs: f64,
    pub pulse_fwhm_fs: f64,
    pub pulse_detuning_ghz: f64,
    pub medium_preset: Option<usize>,
    pub medium_depth: Option<f64>,
    pub medium_t2_ps: Option<f64>,
    pub medium_detuning_ghz: f64,
    pub scan_presets: PresetSelection,
    pub delay_min_ps: f64,
    pub delay_max_ps: f64,
    pub delay_steps: usize,
    pub shaper_enabled: bool,
    pub resolution_nm: f64,
    pub pixel_nm: Option<f64>,
    pub span_nm: f64,
    pub center_nm: f64,
    pub eta_base: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub sampling_eta: f64,
    pub wigner_eta: f64,
    pub wigner_half_width: f64,
    pub wigner_n_side: usize,
    pub wigner_from_samples: bool,
    pub propagate_t_min_ps: f64,
    pub propagate_t_max_ps: f64,
    pub output_directory: PathBuf,
    pub output_format: String,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            grid_n: 1 << 19,
            grid_dt_fs: 10.0,
            pulse_fwhm_fs: 100.0,
            pulse_detuning_ghz: 0.0,
            medium_preset: Some(3),
            medium_depth: None,
            medium_t2_ps: None,
            medium_detuning_ghz: 0.0,
            scan_presets: PresetSelection::All,
            delay_min_ps: -1.0,
            delay_max_ps: 8.0,
            delay_steps: 901,
            shaper_enabled: true,
            resolution_nm: 0.6,
            pixel_nm: None,
            span_nm: 60.0,
            center_nm: 780.0,
            eta_base: 0.62,
            n_samples: 100_000,
            seed: 1,
            sampling_eta: 0.62,
            wigner_eta: 0.62,
            wigner_half_width: 4.0,
            wigner_n_side: 81,
            wigner_from_samples: false,
            propagate_t_min_ps: -1.0,
            propagate_t_max_ps: 20.0,
            output_directory: PathBuf::from("out"),
            output_format: "csv".to_owned(),
        }
    }
}

/// `T2` used when no preset supplies one.
const FALLBACK_T2_PS: f64 = 270.0;

fn parse_f64(v: &str) -> Result<f64, String> {
    let x: f64 = v
        .parse()
        .map_err(|_| format!("expected a number, got `{v}`"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a finite number, got `{v}`"))
    }
}

fn parse_usize(v: &str) -> Result<usize, String> {
    v.parse()
        .map_err(|_| format!("expected a non-negative integer, got `{v}`"))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

fn parse_optional<T>(
    v: &str,
    inner: impl Fn(&str) -> Result<T, String>,
) -> Result<Option<T>, String> {
    if v == "none" {
        Ok(None)
    } else {
        inner(v).map(Some)
    }
}

fn parse_selection(v: &str) -> Result<PresetSelection, String> {
    match v {
        "all" => Ok(PresetSelection::All),
        "medium" => Ok(PresetSelection::Medium),
        _ => {
            let list = v
                .split(',')
                .map(|s| parse_usize(s.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PresetSelection::List(list))
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_owned(), |x| x.to_string())
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ScenarioConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::at(
                    line,
                    None,
                    format!("expected `key = value`, got `{content}`"),
                ));
            };
            let key = key.trim();
            cfg.set(key, value.trim())
                .map_err(|m| ConfigError::at(line, Some(key), m))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(path.to_owned(), e))?;
        Self::parse(&text).map_err(LoadError::Invalid)
    }

    /// Applies a `section.key=value` override. Call [`validate`] once all
    /// overrides are in.
    ///
    /// [`validate`]: ScenarioConfig::validate
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let Some((key, value)) = assignment.split_once('=') else {
            return Err(ConfigError::key(assignment, "expected section.key=value"));
        };
        let key = key.trim();
        self.set(key, value.trim())
            .map_err(|m| ConfigError::key(key, m))
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "grid.n" => self.grid_n = parse_usize(v)?,
            "grid.dt_fs" => self.grid_dt_fs = parse_f64(v)?,
            "pulse.fwhm_fs" => self.pulse_fwhm_fs = parse_f64(v)?,
            "pulse.detuning_ghz" => self.pulse_detuning_ghz = parse_f64(v)?,
            "medium.preset" => self.medium_preset = parse_optional(v, parse_usize)?,
            "medium.depth" => self.medium_depth = Some(parse_f64(v)?),
            "medium.t2_ps" => self.medium_t2_ps = Some(parse_f64(v)?),
            "medium.detuning_ghz" => self.medium_detuning_ghz = parse_f64(v)?,
            "scan.presets" => self.scan_presets = parse_selection(v)?,
            "scan.delay_min_ps" => self.delay_min_ps = parse_f64(v)?,
            "scan.delay_max_ps" => self.delay_max_ps = parse_f64(v)?,
            "scan.delay_steps" => self.delay_steps = parse_usize(v)?,
            "shaper.enabled" => self.shaper_enabled = parse_bool(v)?,
            "shaper.resolution_nm" => self.resolution_nm = parse_f64(v)?,
            "shaper.pixel_nm" => self.pixel_nm = parse_optional(v, parse_f64)?,
            "shaper.span_nm" => self.span_nm = parse_f64(v)?,
            "shaper.center_nm" => self.center_nm = parse_f64(v)?,
            "detection.eta_base" => self.eta_base = parse_f64(v)?,
            "sampling.n_samples" => self.n_samples = parse_usize(v)?,
            "sampling.seed" => {
                self.seed = v
                    .parse()
                    .map_err(|_| format!("expected an unsigned 64-bit integer, got `{v}`"))?
            }
            "sampling.eta" => self.sampling_eta = parse_f64(v)?,
            "wigner.eta" => self.wigner_eta = parse_f64(v)?,
            "wigner.half_width" => self.wigner_half_width = parse_f64(v)?,
            "wigner.n_side" => self.wigner_n_side = parse_usize(v)?,
            "wigner.from_samples" => self.wigner_from_samples = parse_bool(v)?,
            "propagate.t_min_ps" => self.propagate_t_min_ps = parse_f64(v)?,
            "propagate.t_max_ps" => self.propagate_t_max_ps = parse_f64(v)?,
            "output.directory" => {
                if v.is_empty() {
                    return Err("directory must not be empty".to_owned());
                }
                self.output_directory = PathBuf::from(v)
            }
            "output.format" => self.output_format = v.to_owned(),
            _ => return Err("unknown key".to_owned()),
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        make_grid(self.grid_n, self.grid_dt_fs * 1e-15).map_err(|e| match e {
            CoreError::GridSize(_) => ConfigError::key("grid.n", e.to_string()),
            _ => ConfigError::key("grid.dt_fs", e.to_string()),
        })
    }

    /// Medium from `medium.preset`, with explicit `medium.depth` and
    /// `medium.t2_ps` taking precedence.
    pub fn medium(&self) -> Result<MediumParams, ConfigError> {
        let base = match self.medium_preset {
            Some(i) => Some(
                preset(i)
                    .ok_or_else(|| {
                        ConfigError::key(
                            "medium.preset",
                            format!("no preset {i}; use 1 to 5 or none"),
                        )
                    })?
                    .medium,
            ),
            None => None,
        };
        let depth = match (self.medium_depth, base) {
            (Some(d), _) => d,
            (None, Some(b)) => b.depth,
            (None, None) => {
                return Err(ConfigError::key(
                    "medium.depth",
                    "required when medium.preset = none",
                ))
            }
        };
        let t2 = self
            .medium_t2_ps
            .map(|t| t * 1e-12)
            .or(base.map(|b| b.t2))
            .unwrap_or(FALLBACK_T2_PS * 1e-12);
        MediumParams::new(depth, t2, self.medium_detuning_ghz * 1e9).map_err(|e| {
            let key = if depth < 0.0 {
                "medium.depth"
            } else {
                "medium.t2_ps"
            };
            ConfigError::key(key, e.to_string())
        })
    }

    pub fn shaper(&self) -> ShaperConfig {
        ShaperConfig {
            resolution_fwhm: if self.shaper_enabled {
                self.resolution_nm / 1e9
            } else {
                0.0
            },
            center_wavelength: self.center_nm / 1e9,
            pixel_width: self.pixel_nm.map(|p| p / 1e9),
            span: self.span_nm / 1e9,
        }
    }

    /// Delay abscissae in seconds.
    pub fn delays(&self) -> Vec<f64> {
        let n = self.delay_steps;
        let (a, b) = (self.delay_min_ps, self.delay_max_ps);
        (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64) * 1e-12)
            .collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let grid = self.grid()?;
        let window_ps = grid.window() * 1e12;
        if !(self.pulse_fwhm_fs > 0.0 && self.pulse_fwhm_fs * 1e-3 < window_ps) {
            return Err(ConfigError::key(
                "pulse.fwhm_fs",
                "must be positive and shorter than the time window",
            ));
        }
        let nyquist_ghz = grid.nyquist() * 1e-9;
        if self.pulse_detuning_ghz.abs() >= nyquist_ghz {
            return Err(ConfigError::key(
                "pulse.detuning_ghz",
                format!("must stay below the Nyquist frequency, {nyquist_ghz} GHz"),
            ));
        }
        if self.medium_detuning_ghz.abs() >= nyquist_ghz {
            return Err(ConfigError::key(
                "medium.detuning_ghz",
                format!("must stay below the Nyquist frequency, {nyquist_ghz} GHz"),
            ));
        }
        if let Some(d) = self.medium_depth {
            if d < 0.0 {
                return Err(ConfigError::key("medium.depth", "must be >= 0"));
            }
        }
        if let Some(t) = self.medium_t2_ps {
            if t <= 0.0 {
                return Err(ConfigError::key("medium.t2_ps", "must be positive"));
            }
        }
        self.medium()?;
        if let PresetSelection::List(list) = &self.scan_presets {
            if list.is_empty() {
                return Err(ConfigError::key("scan.presets", "empty list"));
            }
            if let Some(bad) = list.iter().find(|&&i| preset(i).is_none()) {
                return Err(ConfigError::key("scan.presets", format!("no preset {bad}")));
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ConfigError::key(
                    "scan.presets",
                    "list must be strictly increasing",
                ));
            }
        }
        if self.delay_steps < 2 {
            return Err(ConfigError::key(
                "scan.delay_steps",
                "need at least 2 points",
            ));
        }
        if !(self.delay_min_ps < self.delay_max_ps) {
            return Err(ConfigError::key(
                "scan.delay_max_ps",
                "must exceed scan.delay_min_ps",
            ));
        }
        let limit_ps = zapsim_core::max_delay(&grid) * 1e12;
        for (key, v) in [
            ("scan.delay_min_ps", self.delay_min_ps),
            ("scan.delay_max_ps", self.delay_max_ps),
        ] {
            if v.abs() > limit_ps {
                return Err(ConfigError::key(
                    key,
                    format!("outside the allowed delay range +/-{limit_ps} ps"),
                ));
            }
        }
        if self.shaper_enabled && !(self.resolution_nm > 0.0) {
            return Err(ConfigError::key("shaper.resolution_nm", "must be positive"));
        }
        if !(self.center_nm > 0.0) {
            return Err(ConfigError::key("shaper.center_nm", "must be positive"));
        }
        if !(self.span_nm > self.resolution_nm) {
            return Err(ConfigError::key(
                "shaper.span_nm",
                "must exceed the resolution",
            ));
        }
        if let Some(p) = self.pixel_nm {
            if !(p > 0.0) {
                return Err(ConfigError::key("shaper.pixel_nm", "must be positive"));
            }
        }
        if let Err(e) = resolution_kernel(&grid, &self.shaper()) {
            return Err(ConfigError::key("shaper.resolution_nm", e.to_string()));
        }
        for (key, v) in [
            ("detection.eta_base", self.eta_base),
            ("sampling.eta", self.sampling_eta),
            ("wigner.eta", self.wigner_eta),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::key(
                    key,
                    format!("must lie in [0, 1], got {v}"),
                ));
            }
        }
        if self.n_samples < 2 {
            return Err(ConfigError::key(
                "sampling.n_samples",
                "need at least 2 samples",
            ));
        }
        if !(self.wigner_half_width > 0.0) {
            return Err(ConfigError::key("wigner.half_width", "must be positive"));
        }
        if self.wigner_n_side < 2 {
            return Err(ConfigError::key(
                "wigner.n_side",
                "need at least 2 points per side",
            ));
        }
        let half_ps = 0.5 * window_ps;
        if !(self.propagate_t_min_ps < self.propagate_t_max_ps
            && self.propagate_t_min_ps >= -half_ps
            && self.propagate_t_max_ps < half_ps)
        {
            return Err(ConfigError::key(
                "propagate.t_max_ps",
                "time range must be increasing and inside the window",
            ));
        }
        if self.output_format != "csv" {
            return Err(ConfigError::key("output.format", "only csv is supported"));
        }
        Ok(())
    }

    /// Every key that affects results, with its effective value, in file
    /// syntax. Feeding these lines back reproduces the run; `output.*` is
    /// left out so the same run in another directory echoes identically.
    pub fn echo(&self) -> Vec<String> {
        let medium = self.medium().ok();
        let selection = match &self.scan_presets {
            PresetSelection::All => "all".to_owned(),
            PresetSelection::Medium => "medium".to_owned(),
            PresetSelection::List(l) => l
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(","),
        };
        let kv: Vec<(&str, String)> = vec![
            ("grid.n", self.grid_n.to_string()),
            ("grid.dt_fs", self.grid_dt_fs.to_string()),
            ("pulse.fwhm_fs", self.pulse_fwhm_fs.to_string()),
            ("pulse.detuning_ghz", self.pulse_detuning_ghz.to_string()),
            (
                "medium.preset",
                self.medium_preset
                    .map_or("none".to_owned(), |i| i.to_string()),
            ),
            ("medium.depth", fmt_opt(medium.map(|m| m.depth))),
            ("medium.t2_ps", fmt_opt(medium.map(|m| m.t2 * 1e12))),
            ("medium.detuning_ghz", self.medium_detuning_ghz.to_string()),
            ("scan.presets", selection),
            ("scan.delay_min_ps", self.delay_min_ps.to_string()),
            ("scan.delay_max_ps", self.delay_max_ps.to_string()),
            ("scan.delay_steps", self.delay_steps.to_string()),
            ("shaper.enabled", self.shaper_enabled.to_string()),
            ("shaper.resolution_nm", self.resolution_nm.to_string()),
            ("shaper.pixel_nm", fmt_opt(self.pixel_nm)),
            ("shaper.span_nm", self.span_nm.to_string()),
            ("shaper.center_nm", self.center_nm.to_string()),
            ("detection.eta_base", self.eta_base.to_string()),
            ("sampling.n_samples", self.n_samples.to_string()),
            ("sampling.seed", self.seed.to_string()),
            ("sampling.eta", self.sampling_eta.to_string()),
            ("wigner.eta", self.wigner_eta.to_string()),
            ("wigner.half_width", self.wigner_half_width.to_string()),
            ("wigner.n_side", self.wigner_n_side.to_string()),
            ("wigner.from_samples", self.wigner_from_samples.to_string()),
            ("propagate.t_min_ps", self.propagate_t_min_ps.to_string()),
            ("propagate.t_max_ps", self.propagate_t_max_ps.to_string()),
        ];
        kv.into_iter().map(|(k, v)| format!("{k} = {v}")).collect()
    }
}

#[derive(Debug)]
pub enum LoadError {
    Io(PathBuf, std::io::Error),
    Invalid(ConfigError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            LoadError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LoadError {}
