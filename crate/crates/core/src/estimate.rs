//! Regressions of per-scale statistics onto `2^(-alpha j) (1 + j)^beta`,
//! membership verdicts, and classical and generalized Holder exponents.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::error::{domain_err, Error, Result};
use crate::findiff::{build_phi, default_k_max, mollifier_profile, order_for_degree, whitney_profile, MollifierKernel};
use crate::linalg::least_squares;
use crate::localfit::{oscillation_profile, LocalPolyFit, MAX_DEGREE};
use crate::real::Real;
use crate::sampled::SampledSignal;
use crate::sequences::{is_decreasing_family, theta_profiles, AdmissibleSequence, SequenceFamily, DEFAULT_EPSILONS};
use crate::wavelets::{dwt, leaders, point_leaders, WaveletBasis};

/// Column-scaled condition number above which a power-log fit is inconclusive.
const COLLINEAR_CONDITION: f64 = 1e6;
/// Statistics below this fraction of `sup |f|` count as exact zeros.
const ZERO_FRACTION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Leaders,
    Minimax,
    Whitney,
    Mollifier,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Leaders, Method::Minimax, Method::Whitney, Method::Mollifier];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Leaders => "leaders",
            Method::Minimax => "minimax",
            Method::Whitney => "whitney",
            Method::Mollifier => "mollifier",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| domain_err!("unknown method `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityEstimate<T> {
    pub alpha_hat: T,
    pub beta_hat: T,
    pub intercept: T,
    pub rms_residual: T,
    pub j_fit: RangeInclusive<u32>,
    pub method: Option<Method>,
    /// Regressors nearly collinear over `j_fit`.
    pub inconclusive: bool,
}

impl<T: Real> RegularityEstimate<T> {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = Some(method);
        self
    }
}

fn log_values<T: Real>(values: &[T], scales: &RangeInclusive<u32>, min_scales: usize) -> Result<(Vec<T>, Vec<T>)> {
    let js: Vec<T> = scales.clone().map(|j| T::from_u32(j).expect("small")).collect();
    if js.len() != values.len() {
        return Err(domain_err!("{} values for {} scales", values.len(), js.len()));
    }
    if js.len() < min_scales {
        return Err(Error::InsufficientData(format!(
            "{} scales, at least {min_scales} required",
            js.len()
        )));
    }
    let y = values
        .iter()
        .zip(scales.clone())
        .map(|(&v, j)| {
            if v > T::zero() && v.is_finite() {
                Ok(v.log2())
            } else {
                Err(domain_err!("value {v} at scale {j} is not positive"))
            }
        })
        .collect::<Result<Vec<T>>>()?;
    Ok((js, y))
}

/// `log2 v_j = intercept - alpha j`.
pub fn fit_power_law<T: Real>(values: &[T], scales: RangeInclusive<u32>) -> Result<RegularityEstimate<T>> {
    let (js, y) = log_values(values, &scales, 3)?;
    let ones = vec![T::one(); js.len()];
    let ls = least_squares(&[ones, js], &y)?;
    Ok(RegularityEstimate {
        alpha_hat: -ls.coeffs[1],
        beta_hat: T::zero(),
        intercept: ls.coeffs[0],
        rms_residual: ls.rms(),
        j_fit: scales,
        method: None,
        inconclusive: false,
    })
}

/// `log2 v_j = intercept - alpha j + beta log2(1 + j)`.
pub fn fit_power_log<T: Real>(values: &[T], scales: RangeInclusive<u32>) -> Result<RegularityEstimate<T>> {
    let (js, y) = log_values(values, &scales, 5)?;
    let ones = vec![T::one(); js.len()];
    let logs: Vec<T> = js.iter().map(|&j| (T::one() + j).log2()).collect();
    let ls = least_squares(&[ones, js, logs], &y)?;
    Ok(RegularityEstimate {
        alpha_hat: -ls.coeffs[1],
        beta_hat: ls.coeffs[2],
        intercept: ls.coeffs[0],
        rms_residual: ls.rms(),
        j_fit: scales,
        method: None,
        inconclusive: !(ls.condition <= T::lit(COLLINEAR_CONDITION)),
    })
}

/// Slope thresholds on `log2(stat_j / sigma_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds<T> {
    pub consistent: T,
    pub violated: T,
    /// Trailing scales over which the ratio must grow for a violation.
    pub growth_window: usize,
}

impl<T: Real> Default for Thresholds<T> {
    fn default() -> Self {
        Self {
            consistent: T::lit(0.05),
            violated: T::lit(0.2),
            growth_window: 4,
        }
    }
}

impl<T: Real> Thresholds<T> {
    /// Zero-slope acceptance, used when bisecting exponents so that the
    /// plain power family reproduces the regression exponent.
    pub fn exponent() -> Self {
        Self {
            consistent: T::zero(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig<T> {
    /// Vanishing moments of the wavelet used for leaders.
    pub vanishing_moments: usize,
    pub thresholds: Thresholds<T>,
    pub exponent_thresholds: Thresholds<T>,
    /// Finest smoothing scale for the mollifier method; `n - 2` when unset.
    pub k_max: Option<u32>,
    /// Leader/minimax disagreement that flags a Holder estimate.
    pub disagreement: T,
    /// Horizon for the decreasing-family check; skipped when `None`.
    pub family_horizon: Option<usize>,
}

impl<T: Real> Default for AnalysisConfig<T> {
    fn default() -> Self {
        Self {
            vanishing_moments: 4,
            thresholds: Thresholds::default(),
            exponent_thresholds: Thresholds::exponent(),
            k_max: None,
            disagreement: T::lit(0.15),
            family_horizon: Some(64),
        }
    }
}

impl<T: Real> AnalysisConfig<T> {
    pub fn basis(&self, degree: usize) -> Result<WaveletBasis<T>> {
        WaveletBasis::daubechies(self.vanishing_moments.max(degree + 1))
    }
}

/// `[4, n - j0 - 3]` for the configured wavelet.
pub fn default_scales<T: Real>(n: u32, config: &AnalysisConfig<T>) -> Result<RangeInclusive<u32>> {
    let j0 = config.basis(0)?.j0();
    let hi = n.saturating_sub(j0 + 3);
    if hi < 6 {
        return Err(Error::InsufficientData(format!("n = {n} leaves no usable scales")));
    }
    Ok(4..=hi)
}

/// Per-scale statistic of one method at `x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleProfile<T> {
    pub method: Method,
    pub degree: usize,
    pub scales: RangeInclusive<u32>,
    pub values: Vec<T>,
    /// Magnitude below which values count as zero.
    pub zero_level: T,
}

impl<T: Real> ScaleProfile<T> {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v <= self.zero_level)
    }

    pub fn fit(&self) -> Result<RegularityEstimate<T>> {
        fit_power_law(&self.values, self.scales.clone()).map(|e| e.with_method(self.method))
    }

    pub fn fit_log(&self) -> Result<RegularityEstimate<T>> {
        fit_power_log(&self.values, self.scales.clone()).map(|e| e.with_method(self.method))
    }
}

pub fn leader_profile<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    scales: RangeInclusive<u32>,
    basis: &WaveletBasis<T>,
) -> Result<Vec<T>> {
    let lp = leaders(&dwt(f, basis, 0)?);
    point_leaders(&lp, x0, scales)
}

pub fn scale_profile<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    degree: usize,
    method: Method,
    scales: RangeInclusive<u32>,
    config: &AnalysisConfig<T>,
) -> Result<ScaleProfile<T>> {
    if degree > MAX_DEGREE {
        return Err(domain_err!("degree {degree} exceeds {MAX_DEGREE}"));
    }
    let values = match method {
        Method::Leaders => leader_profile(f, x0, scales.clone(), &config.basis(degree)?)?,
        Method::Minimax => oscillation_profile(f, x0, degree, scales.clone())?,
        Method::Whitney => whitney_profile(f, x0, degree, scales.clone())?,
        Method::Mollifier => {
            let kernel = build_phi(&MollifierKernel::bump(), order_for_degree(degree))?;
            let k_max = config.k_max.unwrap_or_else(|| default_k_max(f.n()));
            mollifier_profile(f, x0, scales.clone(), &kernel, k_max)?
        }
    };
    Ok(ScaleProfile {
        method,
        degree,
        scales,
        values,
        zero_level: f.sup_norm() * T::lit(ZERO_FRACTION),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Consistent,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVerdict<T> {
    pub method: Method,
    pub degree: usize,
    pub scales: RangeInclusive<u32>,
    /// `stat_j / sigma_j`.
    pub ratios: Vec<T>,
    pub sup_ratio: T,
    pub slope: T,
    pub verdict: Verdict,
    /// Leader verdicts only: slope of `log2(d_j / tau_j)` with
    /// `tau_j = sigma_j |log2 sigma_j|`, the bound the converse direction yields.
    pub tau_slope: Option<T>,
}

fn log_slope<T: Real>(js: &[T], ratios: &[T]) -> T {
    let y: Vec<T> = ratios.iter().map(|r| r.log2()).collect();
    crate::linalg::slope(js, &y).unwrap_or_else(|_| T::zero())
}

/// Applies the slope rule to a precomputed profile.
pub fn verdict_from_profile<T: Real>(
    profile: &ScaleProfile<T>,
    sigma: &AdmissibleSequence<T>,
    thresholds: &Thresholds<T>,
) -> Result<MembershipVerdict<T>> {
    let js: Vec<u32> = profile.scales.clone().collect();
    let sig = js
        .iter()
        .map(|&j| {
            let s = sigma.get(j as usize)?;
            if s > T::zero() {
                Ok(s)
            } else {
                Err(domain_err!("sigma_{j} is zero"))
            }
        })
        .collect::<Result<Vec<T>>>()?;
    let ratios: Vec<T> = profile.values.iter().zip(&sig).map(|(&v, &s)| v / s).collect();
    let sup_ratio = ratios.iter().cloned().fold(T::zero(), T::max);
    let x: Vec<T> = js.iter().map(|&j| T::from_u32(j).expect("small")).collect();
    let tau_slope = (profile.method == Method::Leaders && !profile.is_zero()).then(|| {
        let tau: Vec<T> = ratios
            .iter()
            .zip(&sig)
            .map(|(&r, &s)| {
                let l = s.log2().abs();
                if l > T::zero() {
                    r / l
                } else {
                    r
                }
            })
            .collect();
        log_slope(&x, &tau)
    });
    if profile.is_zero() {
        return Ok(MembershipVerdict {
            method: profile.method,
            degree: profile.degree,
            scales: profile.scales.clone(),
            ratios,
            sup_ratio,
            slope: T::zero(),
            verdict: Verdict::Consistent,
            tau_slope,
        });
    }
    if ratios.iter().any(|&r| !(r > T::zero())) {
        return Err(domain_err!("zero statistic inside a nonzero profile; log-slope undefined"));
    }
    let slope = log_slope(&x, &ratios);
    let w = thresholds.growth_window.min(ratios.len());
    let growing = ratios[ratios.len() - w..].windows(2).all(|p| p[1] >= p[0]);
    let verdict = if slope <= thresholds.consistent {
        Verdict::Consistent
    } else if slope >= thresholds.violated && growing {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };
    Ok(MembershipVerdict {
        method: profile.method,
        degree: profile.degree,
        scales: profile.scales.clone(),
        ratios,
        sup_ratio,
        slope,
        verdict,
        tau_slope,
    })
}

/// Tests `f in Lambda^{sigma, M}(x0)` through one of the four statistics.
pub fn membership_test<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    sigma: &AdmissibleSequence<T>,
    degree: usize,
    method: Method,
    scales: RangeInclusive<u32>,
    config: &AnalysisConfig<T>,
) -> Result<MembershipVerdict<T>> {
    let profile = scale_profile(f, x0, degree, method, scales, config)?;
    verdict_from_profile(&profile, sigma, &config.thresholds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderEstimate<T> {
    /// Leader regression exponent, `+inf` when `f` is locally polynomial.
    pub value: T,
    pub leaders: Option<RegularityEstimate<T>>,
    /// Minimax pass at degree `ceil(alpha_hat)`.
    pub confirmation: Option<RegularityEstimate<T>>,
    pub degree: usize,
    /// Leader and minimax exponents disagree by more than the configured tolerance.
    pub flagged: bool,
}

impl<T: Real> HolderEstimate<T> {
    pub fn is_polynomial(&self) -> bool {
        self.value.is_infinite()
    }
}

pub fn holder_exponent<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    scales: RangeInclusive<u32>,
    config: &AnalysisConfig<T>,
) -> Result<HolderEstimate<T>> {
    let profile = scale_profile(f, x0, 0, Method::Leaders, scales.clone(), config)?;
    if profile.is_zero() {
        return Ok(HolderEstimate {
            value: T::infinity(),
            leaders: None,
            confirmation: None,
            degree: 0,
            flagged: false,
        });
    }
    let lead = profile.fit()?;
    let degree = lead.alpha_hat.max(T::zero()).ceil().to_usize().unwrap_or(MAX_DEGREE).min(MAX_DEGREE);
    let mm = scale_profile(f, x0, degree, Method::Minimax, scales, config)?;
    let confirmation = if mm.is_zero() { None } else { Some(mm.fit()?) };
    let flagged = confirmation
        .as_ref()
        .is_none_or(|c| (c.alpha_hat - lead.alpha_hat).abs() > config.disagreement);
    Ok(HolderEstimate {
        value: lead.alpha_hat,
        leaders: Some(lead),
        confirmation,
        degree,
        flagged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedExponent<T> {
    pub value: T,
    /// `(alpha, consistent)` for every evaluated member, grid first.
    pub evaluations: Vec<(T, bool)>,
    /// No member was consistent; `value` is `alpha_min`.
    pub below_range: bool,
    /// Every member was consistent; `value` is `alpha_max`.
    pub clipped: bool,
}

/// Bisection resolution in `alpha`.
pub const EXPONENT_RESOLUTION: f64 = 0.01;

/// `sup { alpha : f in Lambda^{sigma(alpha), floor alpha}(x0) }` judged by leaders.
pub fn generalized_exponent<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    family: &SequenceFamily<T>,
    scales: RangeInclusive<u32>,
    config: &AnalysisConfig<T>,
) -> Result<GeneralizedExponent<T>> {
    if let Some(h) = config.family_horizon {
        let eps: Vec<T> = DEFAULT_EPSILONS.iter().map(|&e| T::lit(e)).collect();
        let report = is_decreasing_family(family, h, &eps)?;
        if !report.verdict {
            let detail = report
                .witnesses
                .first()
                .map(|w| w.detail.clone())
                .unwrap_or_else(|| "no witness".into());
            return Err(Error::FamilyInconsistent(format!(
                "family `{}` is not decreasing: {detail}",
                family.label()
            )));
        }
    }
    let profile = scale_profile(f, x0, 0, Method::Leaders, scales.clone(), config)?;
    let len = *scales.end() as usize + 1;
    let thresholds = config.exponent_thresholds;
    let consistent = |alpha: T| -> Result<bool> {
        let sigma = family.member(alpha, len);
        Ok(verdict_from_profile(&profile, &sigma, &thresholds)?.verdict == Verdict::Consistent)
    };
    let grid = family.grid();
    let mut evaluations = Vec::with_capacity(grid.len() + 8);
    for &a in &grid {
        evaluations.push((a, consistent(a)?));
    }
    if let Some(i) = evaluations.windows(2).position(|w| !w[0].1 && w[1].1) {
        return Err(Error::FamilyInconsistent(format!(
            "membership is not monotone in alpha: fails at {} but holds at {}",
            evaluations[i].0, evaluations[i + 1].0
        )));
    }
    let last_ok = evaluations.iter().rposition(|e| e.1);
    let (mut lo, mut hi) = match last_ok {
        None => {
            return Ok(GeneralizedExponent {
                value: grid[0],
                evaluations,
                below_range: true,
                clipped: false,
            })
        }
        Some(i) if i + 1 == grid.len() => {
            return Ok(GeneralizedExponent {
                value: grid[i],
                evaluations,
                below_range: false,
                clipped: true,
            })
        }
        Some(i) => (grid[i], grid[i + 1]),
    };
    let resolution = T::lit(EXPONENT_RESOLUTION);
    while hi - lo > resolution {
        let mid = (lo + hi) / T::lit(2.0);
        let ok = consistent(mid)?;
        evaluations.push((mid, ok));
        if ok {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(GeneralizedExponent {
        value: lo,
        evaluations,
        below_range: false,
        clipped: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `2^M Theta_1 < 1`.
    Contracting,
    /// `2^M Theta_1 = 1`.
    Critical,
    /// `2^M Theta_1 > 1`.
    Expanding,
}

impl Regime {
    fn of<T: Real>(q: T) -> Self {
        let tol = T::lit(1e-9);
        if (q - T::one()).abs() <= tol {
            Regime::Critical
        } else if q < T::one() {
            Regime::Contracting
        } else {
            Regime::Expanding
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport<T> {
    pub scales: Vec<u32>,
    /// `|a_j^(M)|`.
    pub top_coeffs: Vec<T>,
    /// `|a_j^(M)| / (sum_{k<j} (2^M Theta_upper_1)^k + 1)`.
    pub upper_ratios: Vec<T>,
    /// `|a_j^(M)| / (sigma_j Theta_lower_1^-j sum_{k<j} (2^M Theta_lower_1)^k + 1)`.
    pub lower_ratios: Vec<T>,
    pub c_upper: T,
    pub c_lower: T,
    pub upper_regime: Regime,
    pub lower_regime: Regime,
}

/// Smallest constants in the two growth bounds on the top-degree coefficient.
pub fn coefficient_growth_check<T: Real>(
    fits: &[LocalPolyFit<T>],
    sigma: &AdmissibleSequence<T>,
    degree: usize,
) -> Result<GrowthReport<T>> {
    if fits.is_empty() {
        return Err(domain_err!("no fits supplied"));
    }
    let theta = theta_profiles(sigma, 1)?;
    let up = theta.upper(1);
    let low = theta.lower(1);
    let scale = T::from_usize_lossy(1usize << degree.min(60));
    let (qu, ql) = (scale * up, scale * low);
    let geometric = |q: T, j: u32| -> T { (1..j).fold(T::zero(), |acc, k| acc + q.powi(k as i32)) };
    let mut scales = Vec::with_capacity(fits.len());
    let mut top = Vec::with_capacity(fits.len());
    let mut upper_ratios = Vec::with_capacity(fits.len());
    let mut lower_ratios = Vec::with_capacity(fits.len());
    for fit in fits {
        let a = fit
            .coeffs
            .get(degree)
            .copied()
            .ok_or_else(|| domain_err!("fit at scale {} has no degree-{degree} coefficient", fit.scale))?
            .abs();
        let j = fit.scale;
        let s = sigma.get(j as usize)?;
        let b1 = geometric(qu, j) + T::one();
        let b2 = s * low.powi(-(j as i32)) * geometric(ql, j) + T::one();
        scales.push(j);
        top.push(a);
        upper_ratios.push(a / b1);
        lower_ratios.push(a / b2);
    }
    let max = |v: &[T]| v.iter().cloned().fold(T::zero(), T::max);
    Ok(GrowthReport {
        c_upper: max(&upper_ratios),
        c_lower: max(&lower_ratios),
        scales,
        top_coeffs: top,
        upper_ratios,
        lower_ratios,
        upper_regime: Regime::of(qu),
        lower_regime: Regime::of(ql),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfit::fits_over;
    use crate::signals::{generate, SignalSpec};

    fn model(alpha: f64, beta: f64, c: f64, scales: RangeInclusive<u32>) -> Vec<f64> {
        scales.map(|j| c * 2f64.powf(-alpha * j as f64) * (1.0 + j as f64).powf(beta)).collect()
    }

    #[test]
    fn exact_power_law() {
        let e = fit_power_law(&model(0.7, 0.0, 1.0, 3..=12), 3..=12).unwrap();
        assert!((e.alpha_hat - 0.7).abs() < 1e-12 && e.rms_residual < 1e-12);
        let e = fit_power_law(&model(0.7, 0.0, 3.0, 3..=12), 3..=12).unwrap();
        assert!((e.alpha_hat - 0.7).abs() < 1e-12 && (e.intercept - 3f64.log2()).abs() < 1e-12);
        assert!(fit_power_law(&[1.0, 0.0, 0.5], 1..=3).is_err());
        assert!(fit_power_law(&[1.0, 0.5], 1..=2).is_err());
    }

    #[test]
    fn exact_power_log() {
        let e = fit_power_log(&model(0.5, 1.0, 1.0, 4..=11), 4..=11).unwrap();
        assert!((e.alpha_hat - 0.5).abs() < 1e-10 && (e.beta_hat - 1.0).abs() < 1e-10);
        assert!(e.rms_residual <= 1e-10 && !e.inconclusive);
        let e = fit_power_log(&model(0.5, 0.0, 1.0, 4..=11), 4..=11).unwrap();
        assert!(e.beta_hat.abs() <= 1e-10);
        assert!(fit_power_log(&model(0.5, 0.0, 1.0, 4..=7), 4..=7).is_err());
    }

    #[test]
    fn cusp_oscillation_fit() {
        let (f, _) = generate(&SignalSpec::<f64>::cusp(0.3, 0.5, 15)).unwrap();
        let e = oscillation_profile(&f, 0.5, 0, 4..=11).unwrap();
        let est = fit_power_law(&e, 4..=11).unwrap();
        assert!((est.alpha_hat - 0.3).abs() <= 0.05);
    }

    #[test]
    fn membership_examples() {
        let cfg = AnalysisConfig::default();
        let (f, _) = generate(&SignalSpec::<f64>::cusp(0.5, 0.5, 14)).unwrap();
        let matched = AdmissibleSequence::power(0.5, 16);
        let strict = AdmissibleSequence::power(0.8, 16);
        for m in Method::ALL {
            let v = membership_test(&f, 0.5, &matched, 0, m, 4..=9, &cfg).unwrap();
            assert_eq!(v.verdict, Verdict::Consistent, "{m}: {v:?}");
            let v = membership_test(&f, 0.5, &strict, 0, m, 4..=9, &cfg).unwrap();
            assert_eq!(v.verdict, Verdict::Violated, "{m}: {v:?}");
        }
        let lead = membership_test(&f, 0.5, &matched, 0, Method::Leaders, 4..=9, &cfg).unwrap();
        assert!(lead.tau_slope.is_some());

        let (p, _) = generate(&SignalSpec::<f64>::polynomial(vec![1.0, -2.0, 0.5], 0.5, 12)).unwrap();
        for m in Method::ALL {
            let v = membership_test(&p, 0.5, &strict, 2, m, 4..=8, &cfg).unwrap();
            assert_eq!(v.verdict, Verdict::Consistent, "{m}");
            assert!(v.sup_ratio < 1e-4, "{m}: {}", v.sup_ratio);
        }
    }

    #[test]
    fn holder_examples() {
        let cfg = AnalysisConfig::default();
        let (f, _) = generate(&SignalSpec::<f64>::cusp(0.8, 0.5, 15)).unwrap();
        let h = holder_exponent(&f, 0.5, 4..=11, &cfg).unwrap();
        assert!((h.value - 0.8).abs() <= 0.05, "{h:?}");
        assert!(!h.flagged && h.degree == 1);

        let (w, truth) = generate(&SignalSpec::<f64>::weierstrass(2f64.powf(-0.5), 2, 30, 15)).unwrap();
        for x0 in [0.25, 0.5, 0.75] {
            let h = holder_exponent(&w, x0, 4..=11, &cfg).unwrap();
            assert!((h.value - truth.holder).abs() <= 0.05, "x0={x0}: {h:?}");
        }

        let (p, _) = generate(&SignalSpec::<f64>::polynomial(vec![0.3, 1.0], 0.5, 12)).unwrap();
        assert!(holder_exponent(&p, 0.5, 4..=8, &cfg).unwrap().is_polynomial());
    }

    #[test]
    fn generalized_examples() {
        let cfg = AnalysisConfig::default();
        let (f, _) = generate(&SignalSpec::<f64>::cusp(0.5, 0.5, 15)).unwrap();
        let plain = SequenceFamily::power(0.1, 2.0).unwrap();
        let g = generalized_exponent(&f, 0.5, &plain, 4..=11, &cfg).unwrap();
        let h = holder_exponent(&f, 0.5, 4..=11, &cfg).unwrap();
        assert!((g.value - 0.5).abs() <= 0.05);
        assert!((g.value - h.value).abs() <= EXPONENT_RESOLUTION + 1e-12, "{} vs {}", g.value, h.value);

        let (c, _) = generate(&SignalSpec::<f64>::cusp_log(0.5, 1.0, 0.5, 15)).unwrap();
        let lenient = SequenceFamily::power_log(0.1, 2.0, 1.0).unwrap();
        let gl = generalized_exponent(&c, 0.5, &lenient, 4..=11, &cfg).unwrap();
        let gp = generalized_exponent(&c, 0.5, &plain, 4..=11, &cfg).unwrap();
        assert!((gl.value - 0.5).abs() <= 0.05, "{}", gl.value);
        assert!(gp.value < gl.value && gp.value < 0.45, "{}", gp.value);

        let (p, _) = generate(&SignalSpec::<f64>::polynomial(vec![1.0, 1.0], 0.5, 12)).unwrap();
        let gp = generalized_exponent(&p, 0.5, &plain, 4..=8, &cfg).unwrap();
        assert!(gp.clipped && gp.value == 2.0);
    }

    #[test]
    fn non_monotone_predicate_is_rejected() {
        let cfg = AnalysisConfig { family_horizon: None, ..AnalysisConfig::default() };
        let (f, _) = generate(&SignalSpec::<f64>::cusp(0.5, 0.5, 12)).unwrap();
        let increasing = SequenceFamily::new("increasing", 0.1, 2.0, |a: f64, len| {
            AdmissibleSequence::power(2.1 - a, len)
        })
        .unwrap();
        assert!(matches!(
            generalized_exponent(&f, 0.5, &increasing, 4..=8, &cfg),
            Err(Error::FamilyInconsistent(_))
        ));
        let checked = AnalysisConfig::<f64>::default();
        assert!(matches!(
            generalized_exponent(&f, 0.5, &increasing, 4..=8, &checked),
            Err(Error::FamilyInconsistent(_))
        ));
    }

    #[test]
    fn growth_check_examples() {
        let (p, _) = generate(&SignalSpec::<f64>::polynomial(vec![1.0, 0.5, -3.0], 0.5, 12)).unwrap();
        let fits = fits_over(&p, 0.5, 2, 3..=8).unwrap();
        let sigma = AdmissibleSequence::power(2.5, 16);
        let r = coefficient_growth_check(&fits, &sigma, 2).unwrap();
        assert!(r.top_coeffs.iter().all(|a| (a - 3.0).abs() <= 1e-6));
        assert!(r.c_upper <= 3.0 + 1e-6 && r.c_lower <= 3.0 + 1e-6);
        assert_eq!(r.upper_regime, Regime::Contracting);

        let (f, _) = generate(&SignalSpec::<f64>::cusp(0.5, 0.5, 12)).unwrap();
        let fits = fits_over(&f, 0.5, 0, 3..=8).unwrap();
        let r = coefficient_growth_check(&fits, &AdmissibleSequence::power(0.5, 16), 0).unwrap();
        assert!(r.c_upper.is_finite() && r.upper_regime == Regime::Contracting);

        let (f, _) = generate(&SignalSpec::<f64>::cusp(1.5, 0.5, 14)).unwrap();
        let fits = fits_over(&f, 0.5, 1, 4..=10).unwrap();
        let r = coefficient_growth_check(&fits, &AdmissibleSequence::power(1.5, 16), 1).unwrap();
        assert!(r.top_coeffs.iter().all(|a| *a <= 1e-6) && r.c_upper <= 1e-6);

        assert!(coefficient_growth_check(&fits, &AdmissibleSequence::power(1.5, 16), 3).is_err());
        assert!(coefficient_growth_check::<f64>(&[], &AdmissibleSequence::power(1.5, 16), 0).is_err());
    }

    #[test]
    fn verdicts_are_scale_invariant() {
        let cfg = AnalysisConfig::default();
        let (f, _) = generate(&SignalSpec::<f64>::cusp(0.5, 0.5, 13)).unwrap();
        let g = f.scaled(7.0);
        let sigma = AdmissibleSequence::power(0.6, 16);
        for m in Method::ALL {
            let a = membership_test(&f, 0.5, &sigma, 0, m, 4..=8, &cfg).unwrap();
            let b = membership_test(&g, 0.5, &sigma, 0, m, 4..=8, &cfg).unwrap();
            assert_eq!(a.verdict, b.verdict);
            assert!((a.slope - b.slope).abs() <= 1e-12);
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("wavelet".parse::<Method>().is_err());
    }
}
