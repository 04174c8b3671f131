//! Admissible sequences: positive per-scale weights `sigma_j` whose consecutive
//! ratios stay bounded, their lag envelopes, Boyd indices and families.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain_err, range_err, Error, Result};
use crate::linalg::slope;
use crate::real::{pow2, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceSource<T> {
    Tabulated,
    /// `sigma_j = 2^(-j alpha) (1 + j)^beta`.
    PowerLog { alpha: T, beta: T },
}

/// A tabulated admissible sequence `sigma_0 .. sigma_J`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleSequence<T> {
    values: Vec<T>,
    source: SequenceSource<T>,
}

impl<T: Real> AdmissibleSequence<T> {
    pub fn tabulated(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain_err!("empty sequence"));
        }
        if let Some(j) = values.iter().position(|v| !(v.is_finite() && *v > T::zero())) {
            return Err(domain_err!("sigma_{j} = {} is not a positive finite value", values[j]));
        }
        Ok(Self {
            values,
            source: SequenceSource::Tabulated,
        })
    }

    /// `2^(-j alpha) (1 + j)^beta` for `j = 0 .. len - 1`.
    pub fn power_log(alpha: T, beta: T, len: usize) -> Self {
        let values = (0..len)
            .map(|j| {
                let jf = T::from_usize_lossy(j);
                pow2(-jf * alpha) * (T::one() + jf).powf(beta)
            })
            .collect();
        Self {
            values,
            source: SequenceSource::PowerLog { alpha, beta },
        }
    }

    pub fn power(alpha: T, len: usize) -> Self {
        Self::power_log(alpha, T::zero(), len)
    }

    /// Tabulates an arbitrary rule `j -> sigma_j`.
    pub fn from_fn(len: usize, rule: impl Fn(usize) -> T) -> Result<Self> {
        Self::tabulated((0..len).map(rule).collect())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn source(&self) -> SequenceSource<T> {
        self.source
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, j: usize) -> Result<T> {
        self.values
            .get(j)
            .copied()
            .ok_or_else(|| range_err!("sigma_{j} not tabulated (length {})", self.len()))
    }

    /// `sigma^{-1}`, the termwise reciprocal.
    pub fn reciprocal(&self) -> Self {
        Self {
            values: self.values.iter().map(|&v| v.recip()).collect(),
            source: match self.source {
                SequenceSource::PowerLog { alpha, beta } => SequenceSource::PowerLog {
                    alpha: -alpha,
                    beta: -beta,
                },
                SequenceSource::Tabulated => SequenceSource::Tabulated,
            },
        }
    }

    /// Every value multiplied by `c > 0`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * c).collect(),
            source: SequenceSource::Tabulated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityReport<T> {
    /// Always true for a finite positive table.
    pub admissible: bool,
    /// Smallest `C` with `C^-1 sigma_j <= sigma_{j+1} <= C sigma_j` on the window.
    pub c_min: T,
}

/// Smallest admissibility constant over `j < horizon`. A `c_min` that grows with
/// the horizon signals a rule that is not admissible.
pub fn check_admissible<T: Real>(
    sigma: &AdmissibleSequence<T>,
    horizon: usize,
) -> Result<AdmissibilityReport<T>> {
    if horizon == 0 {
        return Err(domain_err!("horizon must be at least 1"));
    }
    if horizon >= sigma.len() {
        return Err(range_err!(
            "horizon {horizon} exceeds table of length {}",
            sigma.len()
        ));
    }
    let c_min = sigma.values[..=horizon]
        .windows(2)
        .map(|w| {
            let r = w[1] / w[0];
            r.max(r.recip())
        })
        .fold(T::one(), T::max);
    Ok(AdmissibilityReport {
        admissible: c_min.is_finite(),
        c_min,
    })
}

/// Lag envelopes of `sigma_{j+k} / sigma_k`; entry `i` holds lag `j = i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaProfile<T> {
    pub theta_lower: Vec<T>,
    pub theta_upper: Vec<T>,
}

impl<T: Real> ThetaProfile<T> {
    pub fn horizon(&self) -> usize {
        self.theta_lower.len()
    }

    /// Lower envelope at lag `j >= 1`.
    pub fn lower(&self, j: usize) -> T {
        self.theta_lower[j - 1]
    }

    pub fn upper(&self, j: usize) -> T {
        self.theta_upper[j - 1]
    }
}

/// Inf and sup of `sigma_{j+k}/sigma_k` for lags `1..=horizon`, over every
/// witness `k` the table provides (at least `k = 0..=horizon`).
pub fn theta_profiles<T: Real>(
    sigma: &AdmissibleSequence<T>,
    horizon: usize,
) -> Result<ThetaProfile<T>> {
    if horizon == 0 {
        return Err(domain_err!("horizon must be at least 1"));
    }
    if sigma.len() < 2 * horizon + 1 {
        return Err(range_err!(
            "lag envelopes up to {horizon} need {} values, table has {}",
            2 * horizon + 1,
            sigma.len()
        ));
    }
    let v = &sigma.values;
    let (theta_lower, theta_upper) = (1..=horizon)
        .map(|lag| {
            (0..v.len() - lag)
                .map(|k| v[k + lag] / v[k])
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), r| {
                    (lo.min(r), hi.max(r))
                })
        })
        .unzip();
    Ok(ThetaProfile {
        theta_lower,
        theta_upper,
    })
}

/// Finite-horizon estimates of the lower and upper Boyd indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoydEstimate<T> {
    pub s_lower: T,
    pub s_upper: T,
    pub horizon: usize,
}

/// Slopes of `log2 Theta_j` against `j` over the upper half `[J/2, J]` of the
/// horizon.
pub fn boyd_estimates<T: Real>(
    sigma: &AdmissibleSequence<T>,
    horizon: usize,
) -> Result<BoydEstimate<T>> {
    if horizon < 8 {
        return Err(Error::InsufficientData(format!(
            "Boyd estimates need a horizon of at least 8, got {horizon}"
        )));
    }
    let profile = theta_profiles(sigma, horizon)?;
    let lags: Vec<usize> = (horizon / 2..=horizon).collect();
    let x: Vec<T> = lags.iter().map(|&j| T::from_usize_lossy(j)).collect();
    let lo: Vec<T> = lags.iter().map(|&j| profile.lower(j).log2()).collect();
    let hi: Vec<T> = lags.iter().map(|&j| profile.upper(j).log2()).collect();
    Ok(BoydEstimate {
        s_lower: slope(&x, &lo)?,
        s_upper: slope(&x, &hi)?,
        horizon,
    })
}

/// Largest horizon `J` with `2J + 1` tabulated values.
pub fn max_horizon<T>(sigma: &AdmissibleSequence<T>) -> usize {
    sigma.values.len().saturating_sub(1) / 2
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogCorrection<T> {
    pub sequence: AdmissibleSequence<T>,
    /// Indices where `sigma_j = 1` and the entry was kept unchanged.
    pub flagged: Vec<usize>,
}

/// `tau_j = sigma_j |log2 sigma_j|`, the loss carried by the wavelet-leader
/// converse.
pub fn log_correction<T: Real>(sigma: &AdmissibleSequence<T>) -> LogCorrection<T> {
    let mut flagged = Vec::new();
    let values = sigma
        .values
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let l = s.log2().abs();
            if l == T::zero() {
                flagged.push(j);
                s
            } else {
                s * l
            }
        })
        .collect();
    LogCorrection {
        sequence: AdmissibleSequence {
            values,
            source: SequenceSource::Tabulated,
        },
        flagged,
    }
}

type Generator<T> = Arc<dyn Fn(T, usize) -> AdmissibleSequence<T> + Send + Sync>;

/// An exponent-indexed family `alpha -> sigma^(alpha)` sampled on a grid.
#[derive(Clone)]
pub struct SequenceFamily<T> {
    generator: Generator<T>,
    pub alpha_min: T,
    pub alpha_max: T,
    pub step: T,
    label: String,
}

impl<T: Real> fmt::Debug for SequenceFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceFamily")
            .field("label", &self.label)
            .field("alpha_min", &self.alpha_min)
            .field("alpha_max", &self.alpha_max)
            .field("step", &self.step)
            .finish()
    }
}

impl<T: Real> SequenceFamily<T> {
    pub const DEFAULT_STEP: f64 = 0.1;

    pub fn new(
        label: impl Into<String>,
        alpha_min: T,
        alpha_max: T,
        generator: impl Fn(T, usize) -> AdmissibleSequence<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(alpha_min <= alpha_max) {
            return Err(domain_err!("empty exponent range [{alpha_min}, {alpha_max}]"));
        }
        Ok(Self {
            generator: Arc::new(generator),
            alpha_min,
            alpha_max,
            step: T::lit(Self::DEFAULT_STEP),
            label: label.into(),
        })
    }

    /// `sigma^(alpha)_j = 2^(-j alpha)`.
    pub fn power(alpha_min: T, alpha_max: T) -> Result<Self> {
        Self::new("power", alpha_min, alpha_max, |a, len| {
            AdmissibleSequence::power(a, len)
        })
    }

    /// `sigma^(alpha)_j = 2^(-j alpha) (1 + j)^beta`.
    pub fn power_log(alpha_min: T, alpha_max: T, beta: T) -> Result<Self> {
        Self::new(format!("power_log(beta={beta})"), alpha_min, alpha_max, move |a, len| {
            AdmissibleSequence::power_log(a, beta, len)
        })
    }

    pub fn with_step(mut self, step: T) -> Result<Self> {
        if !(step > T::zero()) {
            return Err(domain_err!("grid step must be positive"));
        }
        self.step = step;
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn member(&self, alpha: T, len: usize) -> AdmissibleSequence<T> {
        (self.generator)(alpha, len)
    }

    /// Sampled exponents from `alpha_min` to `alpha_max` inclusive; values within
    /// `1e-9` of an integer are snapped to it.
    pub fn grid(&self) -> Vec<T> {
        let span = (self.alpha_max - self.alpha_min) / self.step;
        let count = (span + T::lit(1e-9)).floor().to_usize().unwrap_or(0) + 1;
        (0..count)
            .map(|i| snap(self.alpha_min + T::from_usize_lossy(i) * self.step))
            .collect()
    }
}

fn snap<T: Real>(a: T) -> T {
    if (a - a.round()).abs() < T::lit(1e-9) {
        a.round()
    } else {
        a
    }
}

/// Which sufficient condition of the decreasing-family criterion a witness breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyCondition {
    /// `sigma^(beta) <= C sigma^(alpha)` for `m <= alpha < beta < m + 1`.
    Nested,
    /// Branch (a), driven by `2^m Theta_upper^(m)_1`.
    UpperBranch,
    /// Branch (b), driven by `2^m Theta_lower^(m)_1`.
    LowerBranch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyWitness<T> {
    pub condition: FamilyCondition,
    pub alpha: T,
    pub beta: Option<T>,
    pub m: Option<u32>,
    pub epsilon: Option<T>,
    /// Scale where the offending ratio peaks.
    pub j: usize,
    pub ratio: T,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport<T> {
    pub verdict: bool,
    pub checks: usize,
    pub witnesses: Vec<FamilyWitness<T>>,
}

/// Growth allowed for a ratio sequence, in log2 units per scale, before it is
/// declared unbounded on the window.
pub const BOUNDED_SLOPE_TOL: f64 = 1e-3;

/// Default epsilon grid for the "there exists eps_0" clauses.
pub const DEFAULT_EPSILONS: [f64; 3] = [0.25, 0.1, 0.05];

struct RatioTest<T> {
    bounded: bool,
    j: usize,
    ratio: T,
}

/// Bounded-ratio test of `num_j / den_j` over `j in [J/2, J]`.
fn bounded_ratio<T: Real>(horizon: usize, num: impl Fn(usize) -> T, den: impl Fn(usize) -> T) -> RatioTest<T> {
    let js: Vec<usize> = (horizon / 2..=horizon).collect();
    let x: Vec<T> = js.iter().map(|&j| T::from_usize_lossy(j)).collect();
    let logs: Vec<T> = js.iter().map(|&j| (num(j) / den(j)).log2()).collect();
    let s = slope(&x, &logs).unwrap_or(T::infinity());
    let (arg, peak) = logs
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |(ai, am), (i, &v)| if v > am { (i, v) } else { (ai, am) });
    RatioTest {
        bounded: s.is_finite() && s <= T::lit(BOUNDED_SLOPE_TOL),
        j: js[arg],
        ratio: pow2(peak),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    Below,
    Equal,
    Above,
}

fn regime<T: Real>(q: T) -> Regime {
    if (q - T::one()).abs() <= T::lit(1e-9) {
        Regime::Equal
    } else if q < T::one() {
        Regime::Below
    } else {
        Regime::Above
    }
}

/// Samples the sufficient conditions for `fam` to be a decreasing family on
/// scales `[J/2, J]`, for every epsilon in `epsilons`.
pub fn is_decreasing_family<T: Real>(
    fam: &SequenceFamily<T>,
    horizon: usize,
    epsilons: &[T],
) -> Result<FamilyReport<T>> {
    let grid = fam.grid();
    if grid.is_empty() || epsilons.is_empty() {
        return Err(domain_err!("empty exponent or epsilon grid"));
    }
    if let Some(e) = epsilons.iter().find(|e| !(**e > T::zero() && **e < T::one())) {
        return Err(domain_err!("epsilon {e} outside (0, 1)"));
    }
    if horizon < 2 {
        return Err(domain_err!("horizon must be at least 2"));
    }
    let len = 2 * horizon + 1;
    let mut witnesses = Vec::new();
    let mut checks = 0;

    let members: Vec<AdmissibleSequence<T>> = grid.iter().map(|&a| fam.member(a, len)).collect();
    for (ia, &alpha) in grid.iter().enumerate() {
        for (ib, &beta) in grid.iter().enumerate().skip(ia + 1) {
            if beta.floor() != alpha.floor() {
                continue;
            }
            checks += 1;
            let t = bounded_ratio(horizon, |j| members[ib].values[j], |j| members[ia].values[j]);
            if !t.bounded {
                witnesses.push(FamilyWitness {
                    condition: FamilyCondition::Nested,
                    alpha,
                    beta: Some(beta),
                    m: alpha.floor().to_u32(),
                    epsilon: None,
                    j: t.j,
                    ratio: t.ratio,
                    detail: "sigma^(beta)/sigma^(alpha) unbounded".into(),
                });
            }
        }
    }

    let m_lo = (fam.alpha_min.floor().to_i64().unwrap_or(0) + 1).max(1);
    let m_hi = fam.alpha_max.floor().to_i64().unwrap_or(0);
    for m in m_lo..=m_hi {
        let mf = T::from_i64(m).expect("small integer");
        let top = fam.member(mf, len);
        let profile = theta_profiles(&top, 1)?;
        let two_m = pow2(mf);
        let (up1, lo1) = (profile.upper(1), profile.lower(1));
        for &eps in epsilons {
            checks += 1;
            let low = fam.member(mf - eps, len);
            let lowv = |j: usize| low.values[j];
            let topv = |j: usize| top.values[j];
            let dyadic = |j: usize| pow2(-T::from_usize_lossy(j) * mf);

            let mut branch_a = vec![bounded_ratio(horizon, topv, lowv)];
            branch_a.push(match regime(two_m * up1) {
                Regime::Above => bounded_ratio(horizon, |j| up1.powi(j as i32), lowv),
                Regime::Below => bounded_ratio(horizon, dyadic, lowv),
                Regime::Equal => {
                    bounded_ratio(horizon, |j| T::from_usize_lossy(j) * dyadic(j), lowv)
                }
            });
            let q = two_m * lo1;
            let mut branch_b = vec![bounded_ratio(horizon, dyadic, lowv)];
            branch_b.push(match regime(q) {
                Regime::Above => bounded_ratio(horizon, topv, lowv),
                Regime::Below => bounded_ratio(horizon, |j| topv(j) * q.powi(-(j as i32)), lowv),
                Regime::Equal => bounded_ratio(horizon, |j| T::from_usize_lossy(j) * topv(j), lowv),
            });
            let a_ok = branch_a.iter().all(|t| t.bounded);
            let b_ok = branch_b.iter().all(|t| t.bounded);
            if !(a_ok || b_ok) {
                for (condition, tests) in [
                    (FamilyCondition::UpperBranch, &branch_a),
                    (FamilyCondition::LowerBranch, &branch_b),
                ] {
                    if let Some(t) = tests.iter().find(|t| !t.bounded) {
                        witnesses.push(FamilyWitness {
                            condition,
                            alpha: mf,
                            beta: None,
                            m: Some(m as u32),
                            epsilon: Some(eps),
                            j: t.j,
                            ratio: t.ratio,
                            detail: format!("ratio against sigma^(m - {eps}) unbounded"),
                        });
                    }
                }
            }
        }
    }
    Ok(FamilyReport {
        verdict: witnesses.is_empty(),
        checks,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn admissible_dyadic_rule() {
        let s = AdmissibleSequence::power(1.0f64, 33);
        let r = check_admissible(&s, 32).unwrap();
        assert!(r.admissible);
        assert!(close(r.c_min, 2.0, 1e-12));
    }

    #[test]
    fn quadratic_exponent_flags_blow_up() {
        let s = AdmissibleSequence::from_fn(17, |j| 2f64.powi(-((j * j) as i32))).unwrap();
        let r = check_admissible(&s, 16).unwrap();
        assert_eq!(r.c_min, 2f64.powi(31));
    }

    #[test]
    fn admissibility_constant_matches_brute_force() {
        // oracle: closed-form consecutive ratios (j+2)/(j+1) * 2^-1/2 and inverses
        let oracle = (0..64)
            .map(|j| {
                let up = (j as f64 + 2.0) / (j as f64 + 1.0) / 2f64.sqrt();
                up.max(1.0 / up)
            })
            .fold(0.0, f64::max);
        assert!(close(oracle, 2f64.sqrt(), 1e-15));
        let s = AdmissibleSequence::power_log(0.5f64, 1.0, 65);
        let r = check_admissible(&s, 64).unwrap();
        assert!(close(r.c_min, oracle, 1e-12));
    }

    #[test]
    fn admissibility_errors() {
        assert!(AdmissibleSequence::tabulated(vec![1.0, 0.0]).is_err());
        assert!(AdmissibleSequence::tabulated(vec![1.0, -2.0]).is_err());
        let s = AdmissibleSequence::power(1.0f64, 4);
        assert!(matches!(check_admissible(&s, 4), Err(Error::Range(_))));
    }

    #[test]
    fn theta_of_geometric_and_constant() {
        let s = AdmissibleSequence::power(0.5f64, 41);
        let p = theta_profiles(&s, 20).unwrap();
        for j in 1..=20 {
            let expect = 2f64.powf(-0.5 * j as f64);
            assert!(close(p.lower(j), expect, 1e-12 * expect));
            assert!(close(p.upper(j), expect, 1e-12 * expect));
        }
        let c = AdmissibleSequence::tabulated(vec![1.0f64; 41]).unwrap();
        let p = theta_profiles(&c, 20).unwrap();
        assert!(p.theta_lower.iter().chain(&p.theta_upper).all(|&v| v == 1.0));
        assert!(matches!(theta_profiles(&c, 21), Err(Error::Range(_))));
    }

    #[test]
    fn theta_of_linear_times_dyadic() {
        // oracle: brute force over witnesses k of (1+j+k)/(1+k) 2^-j
        for horizon in [16usize, 64, 256] {
            let s = AdmissibleSequence::power_log(1.0f64, 1.0, 2 * horizon + 1);
            let p = theta_profiles(&s, horizon).unwrap();
            let ks = 0..(2 * horizon);
            let brute: Vec<f64> = ks.map(|k| (2.0 + k as f64) / (1.0 + k as f64) / 2.0).collect();
            let hi = brute.iter().cloned().fold(f64::MIN, f64::max);
            let lo = brute.iter().cloned().fold(f64::MAX, f64::min);
            assert!(close(p.upper(1), hi, 1e-12));
            assert!(close(p.lower(1), lo, 1e-12));
            assert!(close(p.upper(1), 1.0, 1e-12));
            assert!(p.lower(1) - 0.5 < 2.0 / horizon as f64);
        }
    }

    #[test]
    fn boyd_indices() {
        let s = AdmissibleSequence::power(0.5f64, 65);
        let b = boyd_estimates(&s, 32).unwrap();
        assert!(close(b.s_lower, -0.5, 1e-12) && close(b.s_upper, -0.5, 1e-12));

        let c = AdmissibleSequence::tabulated(vec![1.0f64; 65]).unwrap();
        let b = boyd_estimates(&c, 32).unwrap();
        assert_eq!((b.s_lower, b.s_upper), (0.0, 0.0));

        let s = AdmissibleSequence::power_log(1.0f64, 1.0, 513);
        let b = boyd_estimates(&s, 256).unwrap();
        assert!(close(b.s_lower, -1.0, 0.05) && close(b.s_upper, -1.0, 0.05));

        assert!(matches!(
            boyd_estimates(&AdmissibleSequence::power(1.0f64, 20), 7),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn log_correction_examples() {
        let s = AdmissibleSequence::power(1.0f64, 20);
        let t = log_correction(&s);
        assert_eq!(t.flagged, vec![0]);
        assert_eq!(t.sequence.values()[0], 1.0);
        for j in 1..20 {
            let expect = j as f64 * 2f64.powi(-(j as i32));
            assert!(close(t.sequence.values()[j], expect, 1e-15 * expect.max(1.0)));
        }
        let s = AdmissibleSequence::power(0.5f64, 20);
        let t = log_correction(&s);
        for j in 1..20 {
            let expect = 0.5 * j as f64 * 2f64.powf(-0.5 * j as f64);
            assert!(close(t.sequence.values()[j], expect, 1e-14));
        }
    }

    #[test]
    fn power_family_is_decreasing() {
        let fam = SequenceFamily::power(0.2f64, 2.5).unwrap();
        let eps: Vec<f64> = DEFAULT_EPSILONS.to_vec();
        let r = is_decreasing_family(&fam, 128, &eps).unwrap();
        assert!(r.verdict, "{:?}", r.witnesses);
        assert!(r.checks > 50);
    }

    #[test]
    fn increasing_family_fails_nesting() {
        let fam = SequenceFamily::new("growing", 0.2f64, 0.9, |a, len| {
            AdmissibleSequence::power(-a, len)
        })
        .unwrap();
        let r = is_decreasing_family(&fam, 128, &[0.1]).unwrap();
        assert!(!r.verdict);
        let w = &r.witnesses[0];
        assert_eq!(w.condition, FamilyCondition::Nested);
        assert!(w.beta.unwrap() > w.alpha);
    }

    #[test]
    fn single_member_family_is_vacuous() {
        let fam = SequenceFamily::power(0.5f64, 0.5).unwrap();
        let r = is_decreasing_family(&fam, 64, &[0.1]).unwrap();
        assert!(r.verdict);
        assert!(r.witnesses.is_empty());
        assert!(is_decreasing_family(&fam, 64, &[]).is_err());
    }

    #[test]
    fn grid_snaps_integers() {
        let fam = SequenceFamily::power(0.2f64, 2.5).unwrap();
        let g = fam.grid();
        assert_eq!(g.len(), 24);
        assert!(g.contains(&1.0) && g.contains(&2.0));
    }

    #[test]
    fn works_in_single_precision() {
        let s = AdmissibleSequence::power(0.5f32, 41);
        let b = boyd_estimates(&s, 20).unwrap();
        assert!((b.s_upper + 0.5).abs() < 1e-4);
    }

    fn arb_sequence() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-2.0f64..2.0, 24..48).prop_map(|steps| {
            let mut acc = 0.0;
            let mut out = vec![1.0];
            for s in steps {
                acc += s;
                out.push(2f64.powf(acc));
            }
            out
        })
    }

    proptest! {
        #[test]
        fn ratios_lie_inside_envelopes(values in arb_sequence()) {
            let s = AdmissibleSequence::tabulated(values.clone()).unwrap();
            let h = max_horizon(&s);
            let p = theta_profiles(&s, h).unwrap();
            for j in 1..=h {
                prop_assert!(p.lower(j) <= p.upper(j));
                for k in 0..values.len() - j {
                    let r = values[j + k] / values[k];
                    prop_assert!(p.lower(j) <= r && r <= p.upper(j));
                }
            }
        }

        #[test]
        fn envelopes_are_submultiplicative(values in arb_sequence()) {
            let s = AdmissibleSequence::tabulated(values).unwrap();
            let h = max_horizon(&s);
            let p = theta_profiles(&s, h).unwrap();
            for i in 1..=h {
                for j in 1..=h - i {
                    prop_assert!(p.upper(i + j) <= p.upper(i) * p.upper(j) * (1.0 + 1e-12));
                    prop_assert!(p.lower(i + j) >= p.lower(i) * p.lower(j) * (1.0 - 1e-12));
                }
            }
        }

        #[test]
        fn power_log_boyd_converges(alpha in 0.1f64..1.5, beta in -2.0f64..2.0) {
            let s = AdmissibleSequence::power_log(alpha, beta, 513);
            let b = boyd_estimates(&s, 256).unwrap();
            prop_assert!((b.s_lower + alpha).abs() <= 0.05);
            prop_assert!((b.s_upper + alpha).abs() <= 0.05);
        }

        #[test]
        fn log_correction_stays_admissible(alpha in 0.5f64..3.0, beta in -1.0f64..1.0) {
            // window starting where sigma_j <= 1/2
            let full = AdmissibleSequence::power_log(alpha, beta, 80);
            let start = full.values().iter().position(|&v| v <= 0.5).unwrap();
            let window = AdmissibleSequence::tabulated(
                full.values()[start..].iter().cloned().take_while(|&v| v <= 0.5).collect()
            ).unwrap();
            prop_assume!(window.len() > 2);
            let c_sigma = check_admissible(&window, window.len() - 1).unwrap().c_min;
            let tau = log_correction(&window);
            prop_assert!(tau.flagged.is_empty());
            let c_tau = check_admissible(&tau.sequence, window.len() - 1).unwrap().c_min;
            // |log2 sigma| >= 1 on the window, so the log factor changes by at most 1 + log2 C
            prop_assert!(c_tau <= c_sigma * (1.0 + c_sigma.log2()) * (1.0 + 1e-12));
            if c_sigma <= 2.0 {
                prop_assert!(c_tau <= 2.0 * c_sigma * (1.0 + 1e-12));
            }
            for (t, s) in tau.sequence.values().iter().zip(window.values()) {
                prop_assert!(t >= s);
            }
        }
    }
}
