//! Run configuration: flags, an optional JSON file, and the validated plan.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use holderscope::estimate::{default_scales, AnalysisConfig, Method};
use holderscope::localfit::MAX_DEGREE;
use holderscope::sampled::SampledSignal;
use holderscope::sequences::{is_decreasing_family, SequenceFamily, DEFAULT_EPSILONS};
use holderscope::signals::{generate, SignalSpec, MAX_GRID_EXPONENT};
use holderscope::wavelets::WaveletBasis;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError, Result};
use crate::ingest::{ingest, Format};
use crate::json::F;
use crate::spec::{parse_family, parse_generator, parse_methods, parse_points, SigmaSpec};

pub const DEFAULT_N: u32 = 15;
pub const DEFAULT_METHODS: &str = "leaders,minimax";

/// Where the samples come from.
#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    /// Sample file (CSV or raw little-endian f64).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input format; inferred from the extension when omitted.
    #[arg(long)]
    pub format: Option<Format>,
    /// Synthetic signal, e.g. `cusp:alpha=0.5,x0=0.5`.
    #[arg(long)]
    pub generate: Option<String>,
    /// Grid exponent for generated signals, N = 2^n.
    #[arg(long)]
    pub n: Option<u32>,
}

impl SourceArgs {
    fn merge(self, over: SourceArgs) -> SourceArgs {
        SourceArgs {
            input: over.input.or(self.input),
            format: over.format.or(self.format),
            generate: over.generate.or(self.generate),
            n: over.n.or(self.n),
        }
    }
}

/// Everything a batch run needs. Flags override values read from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunConfig {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Points of analysis: `0.25,0.5` or a grid `start:stop:count`.
    #[arg(long)]
    pub x0: Option<String>,
    /// Comma-separated subset of leaders, minimax, whitney, mollifier.
    #[arg(long)]
    pub methods: Option<String>,
    /// Weight sequence: `power:alpha=..`, `power_log:alpha=..,beta=..` or `csv:<path>`.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Exponent family for the generalized exponent, e.g. `power:0.1..2.0`.
    #[arg(long)]
    pub family: Option<String>,
    /// Polynomial degree M.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Coarsest fitted scale.
    #[arg(long)]
    pub j_min: Option<u32>,
    /// Finest fitted scale.
    #[arg(long)]
    pub j_max: Option<u32>,
    /// Vanishing moments of the Daubechies wavelet used for leaders.
    #[arg(long)]
    pub vanishing_moments: Option<usize>,
    /// Finest smoothing scale of the mollifier method.
    #[arg(long)]
    pub k_max: Option<u32>,
    /// Output directory for JSON and CSV artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with any of the fields above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// The `--config` file layout: the long flag names with `-` replaced by `_`.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    input: Option<PathBuf>,
    format: Option<Format>,
    generate: Option<String>,
    n: Option<u32>,
    x0: Option<String>,
    methods: Option<String>,
    sigma: Option<String>,
    family: Option<String>,
    degree: Option<usize>,
    j_min: Option<u32>,
    j_max: Option<u32>,
    vanishing_moments: Option<usize>,
    k_max: Option<u32>,
    out: Option<PathBuf>,
}

impl From<FileConfig> for RunConfig {
    fn from(f: FileConfig) -> Self {
        RunConfig {
            source: SourceArgs {
                input: f.input,
                format: f.format,
                generate: f.generate,
                n: f.n,
            },
            x0: f.x0,
            methods: f.methods,
            sigma: f.sigma,
            family: f.family,
            degree: f.degree,
            j_min: f.j_min,
            j_max: f.j_max,
            vanishing_moments: f.vanishing_moments,
            k_max: f.k_max,
            out: f.out,
            config: None,
        }
    }
}

impl RunConfig {
    /// Reads `--config` when given and lays the flags over it.
    pub fn resolve(self) -> Result<RunConfig> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let base: FileConfig = serde_json::from_str(&text)
            .map_err(|e| invalid!("{}: {e}", path.display()))?;
        Ok(RunConfig::from(base).merge(self))
    }

    fn merge(self, over: RunConfig) -> RunConfig {
        RunConfig {
            source: self.source.merge(over.source),
            x0: over.x0.or(self.x0),
            methods: over.methods.or(self.methods),
            sigma: over.sigma.or(self.sigma),
            family: over.family.or(self.family),
            degree: over.degree.or(self.degree),
            j_min: over.j_min.or(self.j_min),
            j_max: over.j_max.or(self.j_max),
            vanishing_moments: over.vanishing_moments.or(self.vanishing_moments),
            k_max: over.k_max.or(self.k_max),
            out: over.out.or(self.out),
            config: over.config,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Source {
    File { path: PathBuf, format: Format },
    Generated { text: String, spec: SignalSpec<f64> },
}

impl Source {
    pub fn from_args(args: &SourceArgs) -> Result<Source> {
        match (&args.input, &args.generate) {
            (Some(_), Some(_)) => Err(invalid!("give either --input or --generate, not both")),
            (None, None) => Err(invalid!("no signal: give --input or --generate")),
            (Some(path), None) => {
                if args.n.is_some() {
                    return Err(invalid!("--n applies to generated signals only"));
                }
                Ok(Source::File {
                    path: path.clone(),
                    format: args.format.unwrap_or_else(|| Format::from_path(path)),
                })
            }
            (None, Some(text)) => {
                let n = args.n.unwrap_or(DEFAULT_N);
                if !(1..=MAX_GRID_EXPONENT).contains(&n) {
                    return Err(invalid!("--n {n} outside [1, {MAX_GRID_EXPONENT}]"));
                }
                Ok(Source::Generated {
                    text: text.clone(),
                    spec: parse_generator(text, n)?,
                })
            }
        }
    }

    pub fn load(&self) -> Result<SampledSignal<f64>> {
        match self {
            Source::File { path, format } => ingest(path, *format),
            Source::Generated { spec, .. } => Ok(generate(spec)?.0),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Source::File { path, .. } => path.display().to_string(),
            Source::Generated { text, .. } => text.clone(),
        }
    }
}

/// A validated run.
#[derive(Debug, Clone)]
pub struct Plan {
    pub source: Source,
    pub points: Vec<f64>,
    pub methods: Vec<Method>,
    pub sigma: Option<(String, SigmaSpec)>,
    pub family: Option<(String, SequenceFamily<f64>)>,
    pub degree: Option<usize>,
    pub j_min: Option<u32>,
    pub j_max: Option<u32>,
    pub analysis: AnalysisConfig<f64>,
    pub out: Option<PathBuf>,
}

impl Plan {
    pub fn new(cfg: &RunConfig) -> Result<Plan> {
        let source = Source::from_args(&cfg.source)?;
        let points = parse_points(cfg.x0.as_deref().unwrap_or("0.5"))?;
        if let Some(x) = points.iter().find(|x| !(0.0..1.0).contains(*x)) {
            return Err(invalid!("x0 = {x} outside [0, 1)"));
        }
        let methods = parse_methods(cfg.methods.as_deref().unwrap_or(DEFAULT_METHODS))?;
        let sigma = cfg
            .sigma
            .as_ref()
            .map(|s| SigmaSpec::parse(s).map(|p| (s.clone(), p)))
            .transpose()?;
        let mut analysis = AnalysisConfig::default();
        let family = match &cfg.family {
            Some(s) => {
                let fam = parse_family(s)?;
                let horizon = analysis.family_horizon.unwrap_or(64);
                let report = is_decreasing_family(&fam, horizon, &DEFAULT_EPSILONS)?;
                if !report.verdict {
                    let why = report.witnesses.first().map_or(String::new(), |w| w.detail.clone());
                    return Err(invalid!("family `{s}` is not decreasing: {why}"));
                }
                analysis.family_horizon = None;
                Some((s.clone(), fam))
            }
            None => None,
        };
        if let Some(m) = cfg.degree.filter(|&m| m > MAX_DEGREE) {
            return Err(invalid!("degree {m} exceeds {MAX_DEGREE}"));
        }
        if let Some(v) = cfg.vanishing_moments {
            WaveletBasis::<f64>::daubechies(v)?;
            analysis.vanishing_moments = v;
        }
        analysis.k_max = cfg.k_max;
        Ok(Plan {
            source,
            points,
            methods,
            sigma,
            family,
            degree: cfg.degree,
            j_min: cfg.j_min,
            j_max: cfg.j_max,
            analysis,
            out: cfg.out.clone(),
        })
    }

    /// Fit range for a signal of `2^n` samples: `[4, n - j0 - 3]` unless overridden.
    pub fn scales(&self, n: u32) -> Result<(u32, u32)> {
        let basis = self.analysis.basis(self.degree.unwrap_or(0))?;
        let reliable = n.saturating_sub(basis.j0());
        let lo = self.j_min.unwrap_or(4);
        let hi = match self.j_max {
            Some(hi) => hi,
            None => *default_scales(n, &self.analysis)?.end(),
        };
        if lo < 1 {
            return Err(invalid!("j_min must be at least 1"));
        }
        if hi < lo + 2 {
            return Err(invalid!(
                "fit range [{lo}, {hi}] needs at least 3 scales (signal has n = {n})"
            ));
        }
        if hi > reliable {
            return Err(invalid!(
                "j_max = {hi} exceeds the finest reliable leader scale {reliable} for n = {n}"
            ));
        }
        Ok((lo, hi))
    }

    pub fn record(&self, n: u32, scales: (u32, u32), points: &[f64]) -> ConfigRecord {
        let t = &self.analysis.thresholds;
        ConfigRecord {
            source: self.source.describe(),
            format: match &self.source {
                Source::File { format, .. } => Some(format.as_str()),
                Source::Generated { .. } => None,
            },
            n,
            x0: points.iter().map(|&x| F(x)).collect(),
            methods: self.methods.iter().map(|m| m.as_str()).collect(),
            sigma: self.sigma.as_ref().map(|s| s.0.clone()),
            family: self.family.as_ref().map(|f| f.0.clone()),
            degree: self.degree,
            j_fit: [scales.0, scales.1],
            vanishing_moments: self.analysis.vanishing_moments,
            k_max: self.analysis.k_max.unwrap_or_else(|| holderscope::findiff::default_k_max(n)),
            consistent_slope: F(t.consistent),
            violated_slope: F(t.violated),
            growth_window: t.growth_window,
            exponent_consistent_slope: F(self.analysis.exponent_thresholds.consistent),
            disagreement: F(self.analysis.disagreement),
        }
    }
}

/// The configuration as actually used, defaults filled in.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigRecord {
    pub source: String,
    pub format: Option<&'static str>,
    pub n: u32,
    pub x0: Vec<F>,
    pub methods: Vec<&'static str>,
    pub sigma: Option<String>,
    pub family: Option<String>,
    /// `null` means chosen per point from the leader estimate.
    pub degree: Option<usize>,
    pub j_fit: [u32; 2],
    pub vanishing_moments: usize,
    pub k_max: u32,
    pub consistent_slope: F,
    pub violated_slope: F,
    pub growth_window: usize,
    pub exponent_consistent_slope: F,
    pub disagreement: F,
}

/// Thread count from `HOLDERSCOPE_THREADS`, if set.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var("HOLDERSCOPE_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => Err(invalid!("HOLDERSCOPE_THREADS=`{v}` is not a positive integer")),
        },
        Err(_) => Ok(None),
    }
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}
