//! Command implementations.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use holderscope::estimate::{
    generalized_exponent, holder_exponent, verdict_from_profile, scale_profile, Method, RegularityEstimate,
    ScaleProfile,
};
use holderscope::localfit::MAX_DEGREE;
use holderscope::sampled::SampledSignal;
use holderscope::sequences::{is_decreasing_family, AdmissibleSequence, FamilyCondition, DEFAULT_EPSILONS};
use holderscope::signals::{generate, GroundTruth};
use holderscope::wavelets::{dwt, export, leaders, WaveletBasis};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ensure_dir, thread_cap, Plan, RunConfig, Source, SourceArgs};
use crate::error::{invalid, CliError, Result};
use crate::ingest::{write_samples, Format};
use crate::json::{self, floats, F};
use crate::spec::{parse_family, parse_generator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analyze,
    Membership,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub config: crate::config::ConfigRecord,
    pub points: Vec<PointReport>,
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    pub x0: F,
    pub requested_x0: F,
    pub degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holder: Option<HolderRecord>,
    pub estimates: Vec<EstimateRecord>,
    pub membership: Vec<MembershipRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generalized: Option<GeneralizedRecord>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub table: ScaleTable,
}

#[derive(Debug, Serialize)]
pub struct HolderRecord {
    pub value: F,
    pub polynomial: bool,
    pub confirmation_degree: usize,
    pub minimax_alpha: Option<F>,
    pub flagged: bool,
}

#[derive(Debug, Serialize)]
pub struct EstimateRecord {
    pub x0: F,
    pub method: &'static str,
    pub model: &'static str,
    pub alpha_hat: F,
    pub beta_hat: F,
    pub intercept: F,
    pub rms_residual: F,
    pub j_fit: [u32; 2],
    pub verdict: Option<&'static str>,
    pub inconclusive: bool,
}

#[derive(Debug, Serialize)]
pub struct MembershipRecord {
    pub method: &'static str,
    pub sigma: String,
    pub degree: usize,
    pub sup_ratio: F,
    pub slope: F,
    pub verdict: &'static str,
    pub tau_slope: Option<F>,
    pub ratios: Vec<F>,
}

#[derive(Debug, Serialize)]
pub struct GeneralizedRecord {
    pub family: String,
    pub value: F,
    pub below_range: bool,
    pub clipped: bool,
    pub evaluations: usize,
}

/// Per-scale statistics behind one point, one column per method.
#[derive(Debug, Default)]
pub struct ScaleTable {
    pub scales: Vec<u32>,
    pub minimax: Option<Vec<f64>>,
    pub whitney: Option<Vec<f64>>,
    pub mollifier: Option<Vec<f64>>,
    pub leaders: Option<Vec<f64>>,
    pub sigma: Option<Vec<f64>>,
    /// First requested method's statistic over `sigma`.
    pub ratio: Option<Vec<f64>>,
}

impl ScaleTable {
    fn columns(&self) -> [&Option<Vec<f64>>; 5] {
        [&self.minimax, &self.whitney, &self.mollifier, &self.leaders, &self.sigma]
    }

    pub fn profile_csv(&self) -> String {
        let mut s = String::from("j,E_j,osc_j,deficiency_j,d_j,sigma_j,ratio\n");
        for (i, j) in self.scales.iter().enumerate() {
            write!(s, "{j}").expect("write to string");
            for col in self.columns().into_iter().chain([&self.ratio]) {
                s.push(',');
                if let Some(v) = col {
                    write!(s, "{:.16e}", v[i]).expect("write to string");
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn plot_csv(&self) -> String {
        let mut s = String::from("j,log2_E_j,log2_osc_j,log2_deficiency_j,log2_d_j,log2_sigma_j\n");
        for (i, j) in self.scales.iter().enumerate() {
            write!(s, "{j}").expect("write to string");
            for col in self.columns() {
                s.push(',');
                if let Some(v) = col.as_ref().filter(|v| v[i] > 0.0) {
                    write!(s, "{:.16e}", v[i].log2()).expect("write to string");
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Runs `op` on a pool capped by `HOLDERSCOPE_THREADS`, or on the global pool.
pub fn with_threads<R: Send>(op: impl FnOnce() -> R + Send) -> Result<R> {
    match thread_cap()? {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Numeric(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(op))
        }
        None => Ok(op()),
    }
}

fn snap(f: &SampledSignal<f64>, x: f64) -> f64 {
    let n = f.len() as f64;
    ((x * n).round() % n) / n
}

fn numeric(x0: f64) -> impl Fn(holderscope::Error) -> CliError {
    move |e| CliError::Numeric(format!("x0 = {x0}: {e}"))
}

pub fn analyze(cfg: RunConfig, mode: Mode) -> Result<Report> {
    let cfg = cfg.resolve()?;
    let plan = Plan::new(&cfg)?;
    if mode == Mode::Membership && plan.sigma.is_none() {
        return Err(invalid!("membership needs --sigma"));
    }
    let f = plan.source.load()?;
    let scales = plan.scales(f.n())?;
    let len = scales.1 as usize + 1;
    let sigma = plan
        .sigma
        .as_ref()
        .map(|(text, s)| s.sequence(len).map(|seq| (text.clone(), seq)))
        .transpose()?;
    let points: Vec<f64> = plan.points.iter().map(|&x| snap(&f, x)).collect();
    let reports = with_threads(|| {
        plan.points
            .par_iter()
            .zip(&points)
            .map(|(&requested, &x0)| analyze_point(&f, &plan, mode, scales, sigma.as_ref(), requested, x0))
            .collect::<Vec<_>>()
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let report = Report {
        config: plan.record(f.n(), scales, &points),
        points: reports,
    };
    if let Some(dir) = &plan.out {
        write_report(dir, &report)?;
    }
    Ok(report)
}

fn analyze_point(
    f: &SampledSignal<f64>,
    plan: &Plan,
    mode: Mode,
    scales: (u32, u32),
    sigma: Option<&(String, AdmissibleSequence<f64>)>,
    requested: f64,
    x0: f64,
) -> Result<PointReport> {
    let err = numeric(x0);
    let range = scales.0..=scales.1;
    let cfg = &plan.analysis;
    let mut notes = Vec::new();
    if (requested - x0).abs() > 1e-12 {
        notes.push(format!("x0 = {requested} moved to the nearest sample {x0}"));
    }
    let holder = match mode {
        Mode::Analyze => Some(holder_exponent(f, x0, range.clone(), cfg).map_err(&err)?),
        Mode::Membership => None,
    };
    let degree = match (plan.degree, &holder) {
        (Some(m), _) => m,
        (None, Some(h)) if !h.is_polynomial() => (h.value.max(0.0).floor() as usize).min(MAX_DEGREE),
        _ => 0,
    };
    let mut table = ScaleTable {
        scales: range.clone().collect(),
        ..ScaleTable::default()
    };
    let mut estimates = Vec::new();
    let mut membership = Vec::new();
    let mut first: Option<Vec<f64>> = None;
    for &method in &plan.methods {
        let profile = scale_profile(f, x0, degree, method, range.clone(), cfg).map_err(&err)?;
        let verdict = match sigma {
            Some((text, seq)) => {
                let v = verdict_from_profile(&profile, seq, &cfg.thresholds).map_err(&err)?;
                membership.push(MembershipRecord {
                    method: method.as_str(),
                    sigma: text.clone(),
                    degree,
                    sup_ratio: F(v.sup_ratio),
                    slope: F(v.slope),
                    verdict: v.verdict.as_str(),
                    tau_slope: v.tau_slope.map(F),
                    ratios: floats(&v.ratios),
                });
                Some(v.verdict.as_str())
            }
            None => None,
        };
        if mode == Mode::Analyze {
            if profile.is_zero() {
                notes.push(format!("{method}: statistic vanishes, f is locally a polynomial of degree <= {degree}"));
            } else if profile.values.iter().any(|&v| v.is_nan() || v <= 0.0) {
                notes.push(format!("{method}: statistic is zero at some scales, no fit"));
            } else {
                let fit = profile.fit().map_err(&err)?;
                estimates.push(record(x0, &fit, "power", verdict));
                if table.scales.len() >= 5 {
                    let log = profile.fit_log().map_err(&err)?;
                    estimates.push(record(x0, &log, "power_log", verdict));
                } else {
                    notes.push(format!("{method}: fewer than 5 scales, no power-log fit"));
                }
            }
        }
        if first.is_none() {
            first = Some(profile.values.clone());
        }
        store(&mut table, &profile);
    }
    table.sigma = match (sigma, &holder) {
        (Some((_, seq)), _) => Some(table.scales.iter().map(|&j| seq.values()[j as usize]).collect()),
        (None, Some(h)) if h.value.is_finite() => {
            Some(table.scales.iter().map(|&j| (-(j as f64) * h.value).exp2()).collect())
        }
        _ => None,
    };
    if let (Some(stat), Some(s)) = (&first, &table.sigma) {
        table.ratio = Some(stat.iter().zip(s).map(|(a, b)| a / b).collect());
    }
    let generalized = match (&plan.family, mode) {
        (Some((text, fam)), Mode::Analyze) => {
            let g = generalized_exponent(f, x0, fam, range.clone(), cfg).map_err(&err)?;
            let nearest = g.value.round();
            if nearest >= 1.0 && (g.value - nearest).abs() <= holderscope::estimate::EXPONENT_RESOLUTION {
                notes.push(format!(
                    "generalized exponent sits at the integer {nearest}; the family uses degree floor(alpha) there"
                ));
            }
            Some(GeneralizedRecord {
                family: text.clone(),
                value: F(g.value),
                below_range: g.below_range,
                clipped: g.clipped,
                evaluations: g.evaluations.len(),
            })
        }
        _ => None,
    };
    let holder = holder.map(|h| {
        if h.flagged {
            notes.push("leader and minimax exponents disagree".into());
        }
        HolderRecord {
            value: F(h.value),
            polynomial: h.is_polynomial(),
            confirmation_degree: h.degree,
            minimax_alpha: h.confirmation.as_ref().map(|c| F(c.alpha_hat)),
            flagged: h.flagged,
        }
    });
    Ok(PointReport {
        x0: F(x0),
        requested_x0: F(requested),
        degree,
        holder,
        estimates,
        membership,
        generalized,
        notes,
        table,
    })
}

fn record(x0: f64, e: &RegularityEstimate<f64>, model: &'static str, verdict: Option<&'static str>) -> EstimateRecord {
    EstimateRecord {
        x0: F(x0),
        method: e.method.map_or("", |m| m.as_str()),
        model,
        alpha_hat: F(e.alpha_hat),
        beta_hat: F(e.beta_hat),
        intercept: F(e.intercept),
        rms_residual: F(e.rms_residual),
        j_fit: [*e.j_fit.start(), *e.j_fit.end()],
        verdict,
        inconclusive: e.inconclusive,
    }
}

fn store(table: &mut ScaleTable, p: &ScaleProfile<f64>) {
    let slot = match p.method {
        Method::Minimax => &mut table.minimax,
        Method::Whitney => &mut table.whitney,
        Method::Mollifier => &mut table.mollifier,
        Method::Leaders => &mut table.leaders,
    };
    *slot = Some(p.values.clone());
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn write_report(dir: &Path, report: &Report) -> Result<()> {
    ensure_dir(dir)?;
    write_file(&dir.join("results.json"), &json::to_string(report))?;
    for (i, p) in report.points.iter().enumerate() {
        write_file(&dir.join(format!("profile_{i:03}.csv")), &p.table.profile_csv())?;
        write_file(&dir.join(format!("plot_{i:03}.csv")), &p.table.plot_csv())?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct GenerateReport {
    pub generator: String,
    pub n: u32,
    pub path: String,
    pub format: &'static str,
    pub ground_truth: TruthRecord,
}

#[derive(Debug, Serialize)]
pub struct TruthRecord {
    pub alpha: Option<F>,
    pub beta: Option<F>,
    pub holder: F,
    pub center: Option<F>,
    pub degree: usize,
    pub jet: Option<Vec<F>>,
    pub truncation: Option<F>,
    pub truncation_flagged: bool,
}

impl From<&GroundTruth<f64>> for TruthRecord {
    fn from(t: &GroundTruth<f64>) -> Self {
        TruthRecord {
            alpha: t.model.map(|m| F(m.0)),
            beta: t.model.map(|m| F(m.1)),
            holder: F(t.holder),
            center: t.center.map(F),
            degree: t.degree,
            jet: t.jet.as_deref().map(floats),
            truncation: t.truncation.map(F),
            truncation_flagged: t.truncation_flagged(),
        }
    }
}

pub fn generate_cmd(spec: &str, n: u32, out: &Path, format: Option<Format>) -> Result<GenerateReport> {
    let parsed = parse_generator(spec, n)?;
    let format = format.unwrap_or_else(|| Format::from_path(out));
    let (f, truth) = with_threads(|| generate(&parsed))??;
    write_samples(out, &f, format)?;
    Ok(GenerateReport {
        generator: spec.to_string(),
        n,
        path: out.display().to_string(),
        format: format.as_str(),
        ground_truth: TruthRecord::from(&truth),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Binary,
}

#[derive(Debug, Serialize)]
pub struct LeadersReport {
    pub source: String,
    pub n: u32,
    pub vanishing_moments: usize,
    pub content: &'static str,
    pub j_min: u32,
    pub j_max: u32,
    pub j_reliable: u32,
    pub path: String,
    pub format: &'static str,
}

pub fn leaders_cmd(
    source: &SourceArgs,
    vanishing_moments: usize,
    coefficients: bool,
    out: &Path,
    format: Option<ExportFormat>,
) -> Result<LeadersReport> {
    let src = Source::from_args(source)?;
    let basis = WaveletBasis::<f64>::daubechies(vanishing_moments)?;
    let f = src.load()?;
    let format = format.unwrap_or(match Format::from_path(out) {
        Format::Csv => ExportFormat::Csv,
        Format::Raw => ExportFormat::Binary,
    });
    let pyramid = with_threads(|| dwt(&f, &basis, 0))??;
    let file = File::create(out).map_err(|e| CliError::io(out, e))?;
    let mut w = BufWriter::new(file);
    let written = if coefficients {
        match format {
            ExportFormat::Csv => export::write_coefficients_csv(&pyramid, &mut w),
            ExportFormat::Binary => export::write_coefficients_binary(&pyramid, &mut w),
        }
    } else {
        let lp = leaders(&pyramid);
        match format {
            ExportFormat::Csv => export::write_leaders_csv(&lp, &mut w),
            ExportFormat::Binary => export::write_leaders_binary(&lp, &mut w),
        }
    };
    written.and_then(|_| w.flush()).map_err(|e| CliError::io(out, e))?;
    Ok(LeadersReport {
        source: src.describe(),
        n: f.n(),
        vanishing_moments,
        content: if coefficients { "coefficients" } else { "leaders" },
        j_min: pyramid.j_min(),
        j_max: pyramid.j_max(),
        j_reliable: pyramid.j_reliable(),
        path: out.display().to_string(),
        format: match format {
            ExportFormat::Csv => "csv",
            ExportFormat::Binary => "binary",
        },
    })
}

#[derive(Debug, Serialize)]
pub struct FamilyRecord {
    pub family: String,
    pub horizon: usize,
    pub epsilons: Vec<F>,
    pub decreasing: bool,
    pub checks: usize,
    pub witnesses: Vec<WitnessRecord>,
}

#[derive(Debug, Serialize)]
pub struct WitnessRecord {
    pub condition: &'static str,
    pub alpha: F,
    pub beta: Option<F>,
    pub m: Option<u32>,
    pub epsilon: Option<F>,
    pub j: usize,
    pub ratio: F,
    pub detail: String,
}

pub fn family_check_cmd(spec: &str, horizon: usize, epsilons: Option<&[f64]>) -> Result<FamilyRecord> {
    let fam = parse_family(spec)?;
    let eps = epsilons.map_or_else(|| DEFAULT_EPSILONS.to_vec(), <[f64]>::to_vec);
    let report = is_decreasing_family(&fam, horizon, &eps)?;
    Ok(FamilyRecord {
        family: spec.to_string(),
        horizon,
        epsilons: floats(&eps),
        decreasing: report.verdict,
        checks: report.checks,
        witnesses: report
            .witnesses
            .iter()
            .map(|w| WitnessRecord {
                condition: match w.condition {
                    FamilyCondition::Nested => "nested",
                    FamilyCondition::UpperBranch => "upper_branch",
                    FamilyCondition::LowerBranch => "lower_branch",
                },
                alpha: F(w.alpha),
                beta: w.beta.map(F),
                m: w.m,
                epsilon: w.epsilon.map(F),
                j: w.j,
                ratio: F(w.ratio),
                detail: w.detail.clone(),
            })
            .collect(),
    })
}

/// Runs the invariant suite; returns the printable lines and whether all passed.
pub fn selftest_cmd() -> Result<(String, bool)> {
    let outcomes = with_threads(holderscope::selftest::run)?;
    let mut text = String::new();
    for o in &outcomes {
        writeln!(text, "{} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail)
            .expect("write to string");
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    writeln!(text, "{passed}/{} checks passed", outcomes.len()).expect("write to string");
    Ok((text, passed == outcomes.len()))
}
