//! Best uniform polynomial approximation on the discrete balls `x0 + B_j`.
//!
//! The minimax polynomial is computed exactly on the samples with a single-point
//! exchange (Stiefel's discrete Remez). Monomials on distinct points satisfy the
//! Haar condition, so every reference system is nonsingular and the levelled
//! error increases strictly until the reference equioscillates.

use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{domain_err, range_err, Error, Result};
use crate::linalg::{slope, solve_dense};
use crate::real::{pow2i, Real};
use crate::sampled::{Ball, SampledSignal};
use crate::sequences::{boyd_estimates, max_horizon, AdmissibleSequence};

pub const MAX_DEGREE: usize = 8;
const MAX_EXCHANGES: usize = 20_000;

/// Degree-`<= M` minimax polynomial on `x0 + B_j`, in powers of `(x - x0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPolyFit<T> {
    pub center: T,
    pub scale: u32,
    pub degree: usize,
    /// `coeffs[b]` multiplies `(x - x0)^b`.
    pub coeffs: Vec<T>,
    /// Achieved sup-norm deviation over the sampled ball.
    pub error: T,
    /// Ball-local indices of the final alternation set.
    pub reference: Vec<usize>,
    pub samples: usize,
    pub exchanges: usize,
}

impl<T: Real> LocalPolyFit<T> {
    /// Value at offset `t = x - x0`.
    pub fn eval(&self, t: T) -> T {
        horner(&self.coeffs, t)
    }

    /// `D^b P(x0) = b! a_b`.
    pub fn derivative_at_center(&self, b: usize) -> T {
        self.coeffs
            .get(b)
            .map(|&a| a * factorial::<T>(b))
            .unwrap_or_else(T::zero)
    }
}

pub(crate) fn horner<T: Real>(coeffs: &[T], t: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * t + c)
}

pub(crate) fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_usize_lossy(k))
}

/// Exact discrete minimax fit of degree `<= degree` on `(offsets, values)`;
/// `radius` rescales offsets to `[-1, 1]` for conditioning.
pub(crate) fn minimax_on_points<T: Real>(
    offsets: &[T],
    values: &[T],
    radius: T,
    degree: usize,
) -> Result<(Vec<T>, T, Vec<usize>, usize)> {
    let k = values.len();
    let m = degree + 2;
    if k < m {
        return Err(range_err!(
            "{k} samples cannot support a degree-{degree} minimax fit (need {m})"
        ));
    }
    let scale = values.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    if scale == T::zero() {
        return Ok((vec![T::zero(); degree + 1], T::zero(), (0..m).collect(), 0));
    }
    let u: Vec<T> = offsets.iter().map(|&t| t / radius).collect();
    let cheb = |x: T, out: &mut [T]| {
        out[0] = T::one();
        if out.len() > 1 {
            out[1] = x;
        }
        for i in 2..out.len() {
            out[i] = T::lit(2.0) * x * out[i - 1] - out[i - 2];
        }
    };

    let mut reference = initial_reference(&u, m);
    let tol = T::rel_tol() * scale;
    let mut best_h = T::neg_infinity();
    let mut coeffs = vec![T::zero(); degree + 1];
    let mut basis = vec![T::zero(); degree + 1];
    let mut residuals = vec![T::zero(); k];
    let mut exchanges = 0;
    loop {
        let mut a = vec![T::zero(); m * m];
        let mut b = vec![T::zero(); m];
        for (row, &idx) in reference.iter().enumerate() {
            cheb(u[idx], &mut basis);
            a[row * m..row * m + degree + 1].copy_from_slice(&basis);
            a[row * m + degree + 1] = if row % 2 == 0 { T::one() } else { -T::one() };
            b[row] = values[idx];
        }
        let sol = solve_dense(&mut a, &mut b, m)?;
        let h = sol[degree + 1];
        coeffs.copy_from_slice(&sol[..=degree]);

        let mut worst = (0, T::zero());
        for i in 0..k {
            cheb(u[i], &mut basis);
            let p: T = basis.iter().zip(&coeffs).map(|(&bv, &c)| bv * c).sum();
            residuals[i] = values[i] - p;
            if residuals[i].abs() > worst.1 {
                worst = (i, residuals[i].abs());
            }
        }
        let level = h.abs();
        let converged = worst.1 <= level * (T::one() + T::rel_tol()) + tol;
        // roundoff can stall the strictly increasing levelled error
        let stalled = level <= best_h * (T::one() + T::epsilon());
        if converged || stalled || reference.contains(&worst.0) {
            break;
        }
        best_h = best_h.max(level);
        exchanges += 1;
        if exchanges > MAX_EXCHANGES {
            return Err(Error::Numeric(format!(
                "minimax exchange did not converge after {MAX_EXCHANGES} steps"
            )));
        }
        exchange(&mut reference, worst.0, residuals[worst.0], h);
    }

    let error = residuals.iter().fold(T::zero(), |a, r| a.max(r.abs()));
    Ok((chebyshev_to_monomial(&coeffs, radius), error, reference, exchanges))
}

fn initial_reference<T: Real>(u: &[T], m: usize) -> Vec<usize> {
    let k = u.len();
    let pi = T::lit(std::f64::consts::PI);
    let mut idx: Vec<usize> = (0..m)
        .map(|i| {
            let target = -(pi * T::from_usize_lossy(i) / T::from_usize_lossy(m - 1)).cos();
            u.partition_point(|&v| v < target).min(k - 1)
        })
        .collect();
    for i in 0..m {
        let lo = if i == 0 { 0 } else { idx[i - 1] + 1 };
        let hi = k - (m - i);
        idx[i] = idx[i].clamp(lo, hi);
    }
    idx
}

/// Stiefel single-point exchange keeping residual signs alternating.
fn exchange<T: Real>(reference: &mut Vec<usize>, p: usize, r: T, h: T) {
    let sign_h = if h < T::zero() { -1 } else { 1 };
    let sign_at = |i: usize| if i.is_multiple_of(2) { sign_h } else { -sign_h };
    let s = if r < T::zero() { -1 } else { 1 };
    let last = reference.len() - 1;
    if p < reference[0] {
        if s == sign_at(0) {
            reference[0] = p;
        } else {
            reference.pop();
            reference.insert(0, p);
        }
    } else if p > reference[last] {
        if s == sign_at(last) {
            reference[last] = p;
        } else {
            reference.remove(0);
            reference.push(p);
        }
    } else {
        let i = reference.partition_point(|&q| q < p) - 1;
        if s == sign_at(i) {
            reference[i] = p;
        } else {
            reference[i + 1] = p;
        }
    }
}

fn chebyshev_to_monomial<T: Real>(c: &[T], radius: T) -> Vec<T> {
    let n = c.len();
    let mut polys: Vec<Vec<T>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut p = vec![T::zero(); n];
        match k {
            0 => p[0] = T::one(),
            1 => p[1] = T::one(),
            _ => {
                for i in 0..n {
                    if i > 0 {
                        p[i] += T::lit(2.0) * polys[k - 1][i - 1];
                    }
                    p[i] -= polys[k - 2][i];
                }
            }
        }
        polys.push(p);
    }
    let mut rk = T::one();
    (0..n)
        .map(|i| {
            let v = c.iter().zip(&polys).map(|(&ck, p)| ck * p[i]).sum::<T>() / rk;
            rk *= radius;
            v
        })
        .collect()
}

/// Minimax polynomial of degree `<= degree` on the closed sampled ball
/// `|x - x0| <= 2^-j`.
pub fn minimax_fit<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    j: u32,
    degree: usize,
) -> Result<LocalPolyFit<T>> {
    if degree > MAX_DEGREE {
        return Err(domain_err!("degree {degree} exceeds {MAX_DEGREE}"));
    }
    let ball = f.ball(x0, j)?;
    fit_ball(&ball, x0, j, degree)
}

pub(crate) fn fit_ball<T: Real>(ball: &Ball<T>, x0: T, j: u32, degree: usize) -> Result<LocalPolyFit<T>> {
    let (coeffs, error, reference, exchanges) =
        minimax_on_points(&ball.offsets, &ball.values, ball.radius, degree)?;
    Ok(LocalPolyFit {
        center: x0,
        scale: j,
        degree,
        coeffs,
        error,
        reference,
        samples: ball.len(),
        exchanges,
    })
}

/// Minimax fits for every scale of `scales`, in order.
pub fn fits_over<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    degree: usize,
    scales: RangeInclusive<u32>,
) -> Result<Vec<LocalPolyFit<T>>> {
    let js: Vec<u32> = scales.collect();
    js.par_iter().map(|&j| minimax_fit(f, x0, j, degree)).collect()
}

/// `E_j`, the minimax error on `x0 + B_j`, for each scale.
pub fn oscillation_profile<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    degree: usize,
    scales: RangeInclusive<u32>,
) -> Result<Vec<T>> {
    Ok(fits_over(f, x0, degree, scales)?
        .into_iter()
        .map(|fit| fit.error)
        .collect())
}

/// Peano derivatives `f_b(x0)`, read off the finest fit, with the per-scale
/// sequences `D^b P_j(x0)` they are the limit of.
#[derive(Debug, Clone, PartialEq)]
pub struct PeanoJet<T> {
    pub center: T,
    pub degree: usize,
    pub derivatives: Vec<T>,
    pub scales: Vec<u32>,
    /// `per_scale[s][b] = D^b P_{j_s}(x0)`.
    pub per_scale: Vec<Vec<T>>,
    /// `gaps[b][s] = |D^b P_{j_{s+1}}(x0) - D^b P_{j_s}(x0)|`.
    pub gaps: Vec<Vec<T>>,
    /// Orders whose last gap exceeds ten times the preceding one.
    pub non_convergent: Vec<usize>,
    pub fits: Vec<LocalPolyFit<T>>,
}

impl<T: Real> PeanoJet<T> {
    pub fn converged(&self) -> bool {
        self.non_convergent.is_empty()
    }

    /// Taylor polynomial `sum_b f_b(x0) (x - x0)^b / b!` truncated at `order`.
    pub fn taylor(&self, order: usize) -> Vec<T> {
        self.derivatives
            .iter()
            .take(order + 1)
            .enumerate()
            .map(|(b, &d)| d / factorial::<T>(b))
            .collect()
    }

    /// Cauchy diagnostic `gap_{b,j} / (2^{j b} sigma_j)`; bounded ratios reflect
    /// the scale-to-scale estimate on the fitted polynomials.
    pub fn cauchy_ratios(&self, sigma: &AdmissibleSequence<T>) -> Result<Vec<Vec<T>>> {
        self.gaps
            .iter()
            .enumerate()
            .map(|(b, g)| {
                g.iter()
                    .zip(&self.scales)
                    .map(|(&gap, &j)| Ok(gap / (pow2i::<T>((j as usize * b) as i32) * sigma.get(j as usize)?)))
                    .collect()
            })
            .collect()
    }
}

pub fn peano_jet<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    degree: usize,
    scales: RangeInclusive<u32>,
) -> Result<PeanoJet<T>> {
    let span = scales.clone().count();
    if span < 4 {
        return Err(Error::InsufficientData(format!(
            "Peano jet needs at least 4 scales, got {span}"
        )));
    }
    let fits = fits_over(f, x0, degree, scales.clone())?;
    let per_scale: Vec<Vec<T>> = fits
        .iter()
        .map(|fit| (0..=degree).map(|b| fit.derivative_at_center(b)).collect())
        .collect();
    let derivatives = per_scale.last().cloned().unwrap_or_default();
    let gaps: Vec<Vec<T>> = (0..=degree)
        .map(|b| per_scale.windows(2).map(|w| (w[1][b] - w[0][b]).abs()).collect())
        .collect();
    let floor = T::lit(1e-8);
    let non_convergent = gaps
        .iter()
        .enumerate()
        .filter(|(b, g)| {
            let n = g.len();
            let last = g[n - 1];
            let prev = g[n - 2];
            last > T::lit(10.0) * prev && last > floor * (T::one() + derivatives[*b].abs())
        })
        .map(|(b, _)| b)
        .collect();
    Ok(PeanoJet {
        center: x0,
        degree,
        derivatives,
        scales: scales.collect(),
        per_scale,
        gaps,
        non_convergent,
        fits,
    })
}

/// `max_{x in x0 + B_j} |f(x) - P(x)|` for `P` in powers of `(x - x0)`.
pub fn sup_deviation<T: Real>(f: &SampledSignal<T>, x0: T, j: u32, coeffs: &[T]) -> Result<T> {
    let ball = f.ball(x0, j)?;
    Ok(ball
        .offsets
        .iter()
        .zip(&ball.values)
        .fold(T::zero(), |m, (&t, &v)| m.max((v - horner(coeffs, t)).abs())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndependenceOptions<T> {
    /// Cap on `ratio_sup` as a multiple of the median of `E_j / sigma_j`.
    pub cap_factor: T,
    /// Largest tolerated log2-slope of the ratio sequence.
    pub max_growth_slope: T,
}

impl<T: Real> Default for IndependenceOptions<T> {
    fn default() -> Self {
        Self {
            cap_factor: T::lit(10.0),
            max_growth_slope: T::lit(0.2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport<T> {
    /// The single polynomial built from the Peano jet, in powers of `(x - x0)`.
    pub polynomial: Vec<T>,
    /// `||f - P||_{x0 + B_j} / sigma_j` per scale.
    pub ratios: Vec<T>,
    pub ratio_sup: T,
    pub ratio_cap: T,
    pub growth_slope: T,
    /// Heuristic membership verdict; the constant in the definition is not
    /// observable from finite data.
    pub pass: bool,
}

/// Checks that one scale-independent polynomial keeps `||f - P|| / sigma_j`
/// bounded, under the numerically checked hypothesis `M < s_lower(sigma^-1)`.
pub fn independence_check<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    degree: usize,
    sigma: &AdmissibleSequence<T>,
    scales: RangeInclusive<u32>,
) -> Result<IndependenceReport<T>> {
    independence_check_with(f, x0, degree, sigma, scales, IndependenceOptions::default())
}

pub fn independence_check_with<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    degree: usize,
    sigma: &AdmissibleSequence<T>,
    scales: RangeInclusive<u32>,
    opts: IndependenceOptions<T>,
) -> Result<IndependenceReport<T>> {
    let boyd = boyd_estimates(sigma, max_horizon(sigma))?;
    let lower_inverse = -boyd.s_upper;
    if T::from_usize_lossy(degree) >= lower_inverse {
        return Err(Error::Precondition(format!(
            "degree {degree} is not below the estimated lower Boyd index {lower_inverse} of 1/sigma"
        )));
    }
    let jet = peano_jet(f, x0, degree, scales.clone())?;
    let polynomial = jet.taylor(degree);
    let mut fit_ratios = Vec::new();
    let mut ratios = Vec::new();
    let mut deviations = Vec::new();
    for (fit, j) in jet.fits.iter().zip(scales.clone()) {
        let s = sigma.get(j as usize)?;
        let dev = sup_deviation(f, x0, j, &polynomial)?;
        deviations.push(dev);
        ratios.push(dev / s);
        fit_ratios.push(fit.error / s);
    }
    let ratio_sup = ratios.iter().cloned().fold(T::zero(), T::max);
    let ratio_cap = opts.cap_factor * median(&fit_ratios);
    let js: Vec<T> = scales.map(|j| T::from_usize_lossy(j as usize)).collect();
    let floor = T::lit(1e-9) * f.sup_norm().max(T::min_positive_value());
    let exact = deviations.iter().all(|&d| d <= floor);
    let growth_slope = if exact {
        T::zero()
    } else {
        let logs: Vec<T> = ratios.iter().map(|&r| r.max(T::min_positive_value()).log2()).collect();
        slope(&js, &logs)?
    };
    let pass = exact || (ratio_sup <= ratio_cap && growth_slope <= opts.max_growth_slope);
    Ok(IndependenceReport {
        polynomial,
        ratios,
        ratio_sup,
        ratio_cap,
        growth_slope,
        pass,
    })
}

pub(crate) fn median<T: Real>(v: &[T]) -> T {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = s.len();
    if n == 0 {
        T::zero()
    } else if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / T::lit(2.0)
    }
}

pub const MARKOV_GRID: usize = 4096;

/// `||P'|| / ||P||` over `[x0 - r, x0 + r]`, sup norms on a 4096-point grid.
/// `coeffs` are in powers of `(x - x0)`.
pub fn markov_ratio<T: Real>(coeffs: &[T], _x0: T, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(domain_err!("radius {r} must be positive"));
    }
    let deriv: Vec<T> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * T::from_usize_lossy(k))
        .collect();
    let last = T::from_usize_lossy(MARKOV_GRID - 1);
    let (mut p_max, mut d_max) = (T::zero(), T::zero());
    for i in 0..MARKOV_GRID {
        let t = r * (T::lit(2.0) * T::from_usize_lossy(i) / last - T::one());
        p_max = p_max.max(horner(coeffs, t).abs());
        d_max = d_max.max(horner(&deriv, t).abs());
    }
    if p_max == T::zero() {
        return Ok(T::zero());
    }
    Ok(d_max / p_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampled::BoundaryMode;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn signal(n: u32, f: impl Fn(f64) -> f64) -> SampledSignal<f64> {
        SampledSignal::from_fn(n, f).unwrap()
    }

    #[test]
    fn recovers_polynomials() {
        let p = [0.3, -1.2, 4.0, 2.5];
        let f = signal(12, |x| horner(&p, x - 0.5));
        for j in [3, 5, 7] {
            let fit = minimax_fit(&f, 0.5, j, 3).unwrap();
            assert!(fit.error <= 1e-10, "E = {}", fit.error);
            for (a, b) in fit.coeffs.iter().zip(&p) {
                assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn absolute_value_best_constant_is_midrange() {
        let f = signal(12, |x| (x - 0.5).abs());
        for j in 2..8 {
            let fit = minimax_fit(&f, 0.5, j, 0).unwrap();
            let r = 2f64.powi(-(j as i32));
            assert!((fit.error - r / 2.0).abs() < 1e-14);
            assert!((fit.coeffs[0] - r / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn parabola_linear_fit_matches_grid_search() {
        let f = signal(10, |x| (x - 0.5).powi(2));
        let j = 3;
        let r = 2f64.powi(-3);
        let fit = minimax_fit(&f, 0.5, j, 1).unwrap();
        // oracle: brute-force search over (a0, a1) on the sampled ball
        let ball = f.ball(0.5, j).unwrap();
        let mut best = f64::MAX;
        for ia in 0..=200 {
            let a0 = r * r * ia as f64 / 200.0;
            for ib in -20..=20 {
                let a1 = ib as f64 * 1e-4;
                let e = ball
                    .offsets
                    .iter()
                    .zip(&ball.values)
                    .map(|(&t, &v)| (v - a0 - a1 * t).abs())
                    .fold(0.0, f64::max);
                best = best.min(e);
            }
        }
        assert!((best - r * r / 2.0).abs() < 1e-12);
        assert!((fit.error - r * r / 2.0).abs() < 1e-14);
    }

    #[test]
    fn too_few_samples_is_range_error() {
        let f = signal(4, |x| x);
        assert!(matches!(minimax_fit(&f, 0.5, 5, 1), Err(Error::Range(_))));
        assert!(matches!(minimax_fit(&f, 0.5, 1, 9), Err(Error::Domain(_))));
        let clipped = f.with_mode(BoundaryMode::Clip);
        assert!(minimax_fit(&clipped, 0.0, 2, 2).is_ok());
        assert!(matches!(minimax_fit(&clipped, 0.0, 3, 2), Err(Error::Range(_))));
    }

    #[test]
    fn oscillation_profile_examples() {
        let c = signal(10, |_| 2.5);
        assert!(oscillation_profile(&c, 0.3, 1, 2..=6).unwrap().iter().all(|&e| e == 0.0));

        let f = signal(15, |x| (x - 0.5).abs().sqrt());
        let e = oscillation_profile(&f, 0.5, 0, 4..=10).unwrap();
        for (j, v) in (4..=10).zip(&e) {
            let ratio = v / 2f64.powf(-0.5 * j as f64);
            assert!((0.4..=0.6).contains(&ratio), "j={j} ratio={ratio}");
        }
        assert!(e.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn peano_jet_of_polynomial_plus_cusp() {
        let f = signal(15, |x| {
            let t = x - 0.5;
            1.0 + 2.0 * t + t.abs().powf(1.5)
        });
        let jet = peano_jet(&f, 0.5, 1, 4..=11).unwrap();
        assert!((jet.derivatives[0] - 1.0).abs() <= 1e-3);
        assert!((jet.derivatives[1] - 2.0).abs() <= 1e-2);
        assert!(jet.converged());
    }

    #[test]
    fn peano_jet_of_polynomial_is_exact() {
        let p = [1.0, -3.0, 0.5];
        let f = signal(12, |x| horner(&p, x - 0.25));
        let jet = peano_jet(&f, 0.25, 2, 3..=8).unwrap();
        let truth = [1.0, -3.0, 1.0];
        for (a, b) in jet.derivatives.iter().zip(truth) {
            assert!((a - b).abs() <= 1e-8);
        }
        // the finest ball holds 3 samples; its midrange is 2^(-n/2) / 2
        let sqrt = signal(20, |x| (x - 0.5).abs().sqrt());
        let jet = peano_jet(&sqrt, 0.5, 0, 14..=20).unwrap();
        assert!(jet.derivatives[0].abs() <= 1e-3);
        assert!(peano_jet(&sqrt, 0.5, 0, 6..=8).is_err());
    }

    #[test]
    fn independence_examples() {
        let cusp15 = signal(15, |x| (x - 0.5).abs().powf(1.5));
        let sigma = AdmissibleSequence::power(1.5, 64);
        let rep = independence_check(&cusp15, 0.5, 1, &sigma, 4..=10).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.ratio_sup.is_finite() && rep.growth_slope <= 0.0, "{rep:?}");

        let poly = signal(12, |x| 1.0 + 2.0 * (x - 0.5));
        let rep = independence_check(&poly, 0.5, 1, &AdmissibleSequence::power(1.5, 64), 3..=8).unwrap();
        assert!(rep.pass && rep.ratio_sup < 1e-6);

        let cusp05 = signal(15, |x| (x - 0.5).abs().sqrt());
        let rep = independence_check(&cusp05, 0.5, 1, &sigma, 4..=10).unwrap();
        assert!(!rep.pass, "{rep:?}");

        let slow = AdmissibleSequence::power(0.8, 64);
        assert!(matches!(
            independence_check(&cusp05, 0.5, 1, &slow, 4..=10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn perturbed_top_coefficient_is_not_bounded() {
        let f = signal(15, |x| {
            let t = x - 0.5;
            1.0 + 2.0 * t + t.abs().powf(2.5)
        });
        let sigma = AdmissibleSequence::power(2.5, 64);
        let rep = independence_check(&f, 0.5, 1, &sigma, 4..=10).unwrap();
        assert!(rep.pass);
        let mut p = rep.polynomial.clone();
        p[1] += 1e-2;
        let ratios: Vec<f64> = (4..=10)
            .map(|j| sup_deviation(&f, 0.5, j, &p).unwrap() / sigma.values()[j as usize])
            .collect();
        assert!(ratios[6] >= 10.0 * ratios[0], "{ratios:?}");
    }

    #[test]
    fn embedding_into_classical_space() {
        let f = signal(15, |x| (x - 0.5).abs().powf(1.5));
        let jet = peano_jet(&f, 0.5, 1, 4..=11).unwrap();
        let q = jet.taylor(0);
        let js: Vec<f64> = (4..=11).map(|j| j as f64).collect();
        let logs: Vec<f64> = (4..=11)
            .map(|j| sup_deviation(&f, 0.5, j, &q).unwrap().log2())
            .collect();
        assert!(slope(&js, &logs).unwrap() <= -1.0 + 0.1);
    }

    #[test]
    fn markov_examples() {
        // T_4(u) = 8u^4 - 8u^2 + 1 rescaled to radius r
        let r = 0.125f64;
        let t4 = [1.0, 0.0, -8.0 / (r * r), 0.0, 8.0 / r.powi(4)];
        let ratio = markov_ratio(&t4, 0.5, r).unwrap();
        assert!((ratio - 16.0 / r).abs() <= 1e-3 * 16.0 / r);
        assert_eq!(markov_ratio(&[3.0], 0.5, r).unwrap(), 0.0);
        assert!((markov_ratio(&[0.0f64, 1.0], 0.5, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(markov_ratio(&[0.0, 0.0], 0.5, 1.0).unwrap(), 0.0);
        assert!(markov_ratio(&[1.0], 0.5, 0.0).is_err());
    }

    #[test]
    fn markov_bound_on_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let deg = rng.gen_range(1..=8);
            let r = 2f64.powi(-rng.gen_range(0..12));
            let coeffs: Vec<f64> = (0..=deg)
                .map(|k| rng.gen_range(-1.0..1.0) / r.powi(k))
                .collect();
            let ratio = markov_ratio(&coeffs, 0.5, r).unwrap();
            let d = deg as f64;
            assert!(ratio <= d * d / r * (1.0 + 1e-6), "deg {deg} r {r} ratio {ratio}");
        }
    }

    #[test]
    fn single_precision_fit() {
        let f = SampledSignal::<f32>::from_fn(10, |x| (x - 0.5).abs()).unwrap();
        let fit = minimax_fit(&f, 0.5, 3, 0).unwrap();
        assert!((fit.error - 0.0625).abs() < 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn minimax_equioscillates(seed in any::<u64>(), degree in 0usize..=4, j in 2u32..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = SampledSignal::new(vals, BoundaryMode::Periodic).unwrap();
            let fit = minimax_fit(&f, 0.5, j, degree).unwrap();
            let ball = f.ball(0.5, j).unwrap();
            let res: Vec<f64> = ball.offsets.iter().zip(&ball.values)
                .map(|(&t, &v)| v - fit.eval(t)).collect();
            let tol = 1e-9 * f.sup_norm();
            prop_assert!(fit.reference.len() >= degree + 2);
            for w in fit.reference.windows(2) {
                prop_assert!(w[0] < w[1]);
                prop_assert!(res[w[0]] * res[w[1]] < 0.0);
            }
            for &i in &fit.reference {
                prop_assert!((res[i].abs() - fit.error).abs() <= tol);
            }
        }

        #[test]
        fn minimax_error_is_monotone_in_scale(seed in any::<u64>(), degree in 0usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<f64> = (0..512).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = SampledSignal::new(vals, BoundaryMode::Periodic).unwrap();
            let e = oscillation_profile(&f, 0.25, degree, 2..=6).unwrap();
            for w in e.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
            // fitting never loses to the zero polynomial
            let ball = f.ball(0.25, 2).unwrap();
            prop_assert!(e[0] <= ball.sup_norm());
        }
    }
}
