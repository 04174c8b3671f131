//! Finite differences, the Whitney oscillation on dyadic balls, and the
//! mollifier deficiency `sup_{k >= j} ||f - f * Phi_k||`.

use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{domain_err, range_err, Error, Result};
use crate::real::{pow2i, Real};
use crate::sampled::{BoundaryMode, SampledSignal};

pub const MAX_DIFFERENCE_ORDER: usize = 10;

pub(crate) fn binomial<T: Real>(n: usize, k: usize) -> T {
    (0..k).fold(T::one(), |acc, i| {
        acc * T::from_usize_lossy(n - i) / T::from_usize_lossy(i + 1)
    })
}

/// `(-1)^(n-k) C(n, k)` for `k = 0..=n`.
fn difference_weights<T: Real>(n: usize) -> Vec<T> {
    (0..=n)
        .map(|k| {
            let c = binomial::<T>(n, k);
            if (n - k).is_multiple_of(2) {
                c
            } else {
                -c
            }
        })
        .collect()
}

/// `Delta_h^n f(x) = sum_k (-1)^(n-k) C(n, k) f(x + k h)`; `x` and `h` must be
/// grid multiples.
pub fn finite_difference<T: Real>(f: &SampledSignal<T>, x: T, h: T, n: usize) -> Result<T> {
    if n > MAX_DIFFERENCE_ORDER {
        return Err(domain_err!("difference order {n} exceeds {MAX_DIFFERENCE_ORDER}"));
    }
    let i = f.grid_index(x)?;
    let s = f.grid_steps(h)?;
    difference_weights::<T>(n)
        .iter()
        .enumerate()
        .try_fold(T::zero(), |acc, (k, &w)| Ok(acc + w * f.at(i + k as i64 * s)?))
}

/// Starting points `x` with `[x, x + (M+1) h]` inside the closed ball `x0 + B_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffDomain<T> {
    pub center: T,
    pub scale: u32,
    pub step: T,
    pub order: usize,
    /// Grid indices (unwrapped) of the admissible starting points.
    pub indices: RangeInclusive<i64>,
}

impl<T: Real> DiffDomain<T> {
    pub fn new(f: &SampledSignal<T>, x0: T, j: u32, h: T, order: usize) -> Result<Self> {
        let ball = f.ball(x0, j)?;
        let s = f.grid_steps(h)?;
        if s <= 0 {
            return Err(domain_err!("step {h} must be positive"));
        }
        let span = (order as i64 + 1) * s;
        let first = ball.first_index;
        let last = first + ball.len() as i64 - 1 - span;
        Ok(Self {
            center: x0,
            scale: j,
            step: h,
            order,
            indices: first..=last,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn points(&self, f: &SampledSignal<T>) -> Vec<T> {
        let inv = f.step();
        self.indices
            .clone()
            .map(|i| T::from_i64(i).expect("index fits") * inv)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillation<T> {
    pub value: T,
    /// Number of grid steps `h` with `|h| < 2^-j` that were examined.
    pub steps: usize,
}

impl<T: Real> Oscillation<T> {
    /// True when no grid step fits strictly inside the ball radius.
    pub fn is_empty(&self) -> bool {
        self.steps == 0
    }
}

/// `sup_{h in B_j} sup_x |Delta_h^{M+1} f(x)|` over grid steps `0 < h < 2^-j` and
/// starting points whose whole stencil lies in the closed ball.
pub fn whitney_oscillation<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    j: u32,
    degree: usize,
) -> Result<Oscillation<T>> {
    if degree + 1 > MAX_DIFFERENCE_ORDER {
        return Err(domain_err!("difference order {} exceeds {MAX_DIFFERENCE_ORDER}", degree + 1));
    }
    let ball = f.ball(x0, j)?;
    let k = ball.len();
    if k < degree + 2 {
        return Err(range_err!("{k} samples cannot hold a difference of order {}", degree + 1));
    }
    let nf = T::from_usize_lossy(f.len());
    let radius_steps = ball.radius * nf;
    // largest integer s with s < radius_steps
    let max_step = ((radius_steps - T::lit(1e-9)).ceil().to_usize().unwrap_or(1)).saturating_sub(1);
    let weights = difference_weights::<T>(degree + 1);
    let v = &ball.values;
    let value = (1..=max_step)
        .into_par_iter()
        .map(|s| {
            let span = (degree + 1) * s;
            let mut best = T::zero();
            if span < k {
                for p in 0..k - span {
                    let d: T = weights.iter().enumerate().map(|(q, &w)| w * v[p + q * s]).sum();
                    best = best.max(d.abs());
                }
            }
            best
        })
        .reduce(T::zero, T::max);
    Ok(Oscillation {
        value,
        steps: max_step,
    })
}

pub fn whitney_profile<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    degree: usize,
    scales: RangeInclusive<u32>,
) -> Result<Vec<T>> {
    scales
        .map(|j| whitney_oscillation(f, x0, j, degree).map(|o| o.value))
        .collect()
}

type Profile<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A compactly supported, tabulated kernel with unit integral.
#[derive(Clone)]
pub struct MollifierKernel<T> {
    profile: Profile<T>,
    table: Vec<T>,
    radius: T,
    order: Option<usize>,
}

impl<T: Real> fmt::Debug for MollifierKernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MollifierKernel")
            .field("radius", &self.radius)
            .field("points", &self.table.len())
            .field("order", &self.order)
            .finish()
    }
}

pub const KERNEL_POINTS: usize = 4096;

impl<T: Real> MollifierKernel<T> {
    /// `exp(-1/(1-x^2))` on `(-1, 1)`, normalized to unit trapezoidal integral.
    pub fn bump() -> Self {
        Self::from_profile(T::one(), KERNEL_POINTS, |x: T| {
            let q = T::one() - x * x;
            if q > T::zero() {
                (-q.recip()).exp()
            } else {
                T::zero()
            }
        })
        .expect("bump has positive mass")
    }

    /// Tabulates `profile` on `[-radius, radius]` and rescales it to unit integral.
    pub fn from_profile(
        radius: T,
        points: usize,
        profile: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(radius > T::zero()) || points < 3 {
            return Err(domain_err!("kernel needs a positive radius and at least 3 points"));
        }
        let step = T::lit(2.0) * radius / T::from_usize_lossy(points - 1);
        let raw: Vec<T> = (0..points)
            .map(|i| profile(-radius + T::from_usize_lossy(i) * step))
            .collect();
        let mass = trapezoid(&raw, step);
        if !(mass.abs() > T::zero()) || !mass.is_finite() {
            return Err(domain_err!("kernel integrates to {mass}"));
        }
        let table = raw.iter().map(|&v| v / mass).collect();
        let profile: Profile<T> = Arc::new(move |x| profile(x) / mass);
        Ok(Self {
            profile,
            table,
            radius,
            order: None,
        })
    }

    pub fn eval(&self, x: T) -> T {
        if x.abs() > self.radius {
            T::zero()
        } else {
            (self.profile)(x)
        }
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub fn step(&self) -> T {
        T::lit(2.0) * self.radius / T::from_usize_lossy(self.table.len() - 1)
    }

    /// Order `m` when built by [`build_phi`].
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn integral(&self) -> T {
        trapezoid(&self.table, self.step())
    }

    /// Trapezoidal `int Phi(x) x^p dx`.
    pub fn moment(&self, p: i32) -> T {
        let step = self.step();
        let weighted: Vec<T> = self
            .table
            .iter()
            .enumerate()
            .map(|(i, &v)| v * (-self.radius + T::from_usize_lossy(i) * step).powi(p))
            .collect();
        trapezoid(&weighted, step)
    }

    /// Symmetric discrete weights of `Phi_k = 2^k Phi(2^k .)` on a grid of
    /// `2^n` points, normalized to sum to one; index `i` is offset `i - R`.
    pub fn scale_weights(&self, k: u32, n: u32) -> Vec<T> {
        let dilation = pow2i::<T>(k as i32 - n as i32);
        let reach = (self.radius / dilation).floor().to_usize().unwrap_or(0);
        let raw: Vec<T> = (0..=2 * reach)
            .map(|i| {
                let off = T::from_usize_lossy(i) - T::from_usize_lossy(reach);
                self.eval(off * dilation)
            })
            .collect();
        let total: T = raw.iter().cloned().sum();
        if total == T::zero() {
            let mut w = vec![T::zero(); raw.len()];
            w[reach] = T::one();
            return w;
        }
        raw.into_iter().map(|v| v / total).collect()
    }
}

fn trapezoid<T: Real>(v: &[T], step: T) -> T {
    if v.len() < 2 {
        return T::zero();
    }
    let inner: T = v[1..v.len() - 1].iter().cloned().sum();
    (inner + (v[0] + v[v.len() - 1]) / T::lit(2.0)) * step
}

/// `Phi = Psi / int Psi` with
/// `Psi(x) = sum_{i < m/2} (-1)^i C(m, i) / (2i - m) rho(x / (2i - m))`;
/// the moments of orders `1..m` vanish, so `f - f * Phi_k` annihilates
/// polynomials of degree below `m`.
pub fn build_phi<T: Real>(rho: &MollifierKernel<T>, m: usize) -> Result<MollifierKernel<T>> {
    if m < 2 || m % 2 == 1 {
        return Err(domain_err!("order m = {m} must be even and at least 2"));
    }
    let terms: Vec<(T, T)> = (0..m / 2)
        .map(|i| {
            let d = T::from_i64(2 * i as i64 - m as i64).expect("small");
            let sign = if i % 2 == 0 { T::one() } else { -T::one() };
            (sign * binomial::<T>(m, i) / d, d)
        })
        .collect();
    let base = rho.clone();
    let radius = rho.radius * T::from_usize_lossy(m);
    let points = m * (rho.table.len() - 1) + 1;
    let mut phi = MollifierKernel::from_profile(radius, points, move |x| {
        terms.iter().map(|&(w, d)| w * base.eval(x / d)).sum()
    })?;
    phi.order = Some(m);
    Ok(phi)
}

/// Smallest admissible even order for an analysis degree `M`.
pub fn order_for_degree(degree: usize) -> usize {
    let m = degree + 2;
    m + m % 2
}

/// `max_{k in [j, k_max]} max_{x in x0 + B_j} |f(x) - (f * Phi_k)(x)|`.
pub fn mollifier_deficiency<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    j: u32,
    kernel: &MollifierKernel<T>,
    k_max: u32,
) -> Result<T> {
    if k_max < j {
        return Err(domain_err!("k_max = {k_max} is below the scale {j}"));
    }
    let ball = f.ball(x0, j)?;
    let lo = ball.first_index;
    let count = ball.len() as i64;
    let mut worst = T::zero();
    for k in j..=k_max {
        let w = kernel.scale_weights(k, f.n());
        let reach = (w.len() / 2) as i64;
        if f.mode() == BoundaryMode::Periodic && 2 * reach + 1 > f.len() as i64 {
            return Err(range_err!("kernel at scale {k} is wider than the signal"));
        }
        let window = (lo - reach..lo + count + reach)
            .map(|i| f.at(i))
            .collect::<Result<Vec<T>>>()
            .map_err(|e| match e {
                Error::Range(m) => range_err!("kernel support leaves the domain at scale {k}: {m}"),
                other => other,
            })?;
        let dev = (0..count as usize)
            .into_par_iter()
            .map(|p| {
                let conv: T = w.iter().zip(&window[p..]).map(|(&a, &b)| a * b).sum();
                (window[p + reach as usize] - conv).abs()
            })
            .reduce(T::zero, T::max);
        worst = worst.max(dev);
    }
    Ok(worst)
}

pub fn mollifier_profile<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    scales: RangeInclusive<u32>,
    kernel: &MollifierKernel<T>,
    k_max: u32,
) -> Result<Vec<T>> {
    scales
        .map(|j| mollifier_deficiency(f, x0, j, kernel, k_max))
        .collect()
}

/// Finest meaningful smoothing scale, `n - 2`.
pub fn default_k_max(n: u32) -> u32 {
    n.saturating_sub(2)
}
