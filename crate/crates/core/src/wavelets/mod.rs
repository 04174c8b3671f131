//! Periodic orthogonal wavelet pyramid with `L^inf`-normalized coefficients
//! and wavelet leaders.

pub mod export;
mod filters;

pub use export::{
    read_coefficients_binary, read_leaders_binary, write_coefficients_binary, write_coefficients_csv,
    write_leaders_binary, write_leaders_csv, BINARY_MAGIC, BINARY_VERSION,
};

use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{domain_err, range_err, Result};
use crate::linalg::slope;
use crate::real::{pow2i, Real};
use crate::sampled::{BoundaryMode, SampledSignal};
use crate::sequences::AdmissibleSequence;

/// Levels with at least this many outputs are filtered in parallel.
const PARALLEL_LEVEL: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveletBasis<T> {
    lowpass: Vec<T>,
    highpass: Vec<T>,
    vanishing_moments: usize,
}

impl<T: Real> WaveletBasis<T> {
    /// Daubechies wavelet with `v` vanishing moments, `1 <= v <= 10`.
    pub fn daubechies(v: usize) -> Result<Self> {
        if !(1..=filters::DAUBECHIES.len()).contains(&v) {
            return Err(domain_err!("Daubechies order {v} not available (1..=10)"));
        }
        let lowpass: Vec<T> = filters::DAUBECHIES[v - 1].iter().map(|&c| T::lit(c)).collect();
        let l = lowpass.len();
        let highpass = (0..l)
            .map(|k| {
                let c = lowpass[l - 1 - k];
                if k % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect();
        Ok(Self {
            lowpass,
            highpass,
            vanishing_moments: v,
        })
    }

    /// `V = M + 2` vanishing moments for an analysis degree `M`.
    pub fn for_degree(degree: usize) -> Result<Self> {
        Self::daubechies(degree + 2)
    }

    pub fn lowpass(&self) -> &[T] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[T] {
        &self.highpass
    }

    pub fn vanishing_moments(&self) -> usize {
        self.vanishing_moments
    }

    pub fn support_len(&self) -> usize {
        self.lowpass.len()
    }

    /// `ceil(log2 L)`.
    pub fn j0(&self) -> u32 {
        self.support_len().next_power_of_two().trailing_zeros()
    }

    /// Largest deviation of the filter autocorrelations from `delta`.
    pub fn orthonormality_defect(&self) -> T {
        let l = self.support_len();
        let mut worst = T::zero();
        for shift in (0..l).step_by(2) {
            let target = if shift == 0 { T::one() } else { T::zero() };
            let hh: T = (0..l - shift).map(|m| self.lowpass[m] * self.lowpass[m + shift]).sum();
            let gg: T = (0..l - shift).map(|m| self.highpass[m] * self.highpass[m + shift]).sum();
            worst = worst.max((hh - target).abs()).max((gg - target).abs());
        }
        for shift in (0..l).step_by(2) {
            let hg: T = (0..l - shift).map(|m| self.lowpass[m] * self.highpass[m + shift]).sum();
            let gh: T = (0..l - shift).map(|m| self.highpass[m] * self.lowpass[m + shift]).sum();
            worst = worst.max(hg.abs()).max(gh.abs());
        }
        worst
    }

    /// Circular offset that centers the energy of `psi_{j,k}` on `[k 2^-j, (k+1) 2^-j)`.
    fn shift(&self) -> i64 {
        self.support_len() as i64 / 2 - 1
    }
}

impl<T: Real> Default for WaveletBasis<T> {
    fn default() -> Self {
        Self::daubechies(3).expect("db3 is tabulated")
    }
}

/// `[k 2^-j, (k+1) 2^-j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    pub j: u32,
    pub k: u64,
}

impl DyadicInterval {
    pub fn new(j: u32, k: u64) -> Result<Self> {
        if j >= 63 || k >= 1u64 << j {
            return Err(range_err!("position {k} outside scale {j}"));
        }
        Ok(Self { j, k })
    }

    /// The interval of scale `j` containing `x`, after reduction mod 1.
    pub fn containing<T: Real>(x: T, j: u32) -> Self {
        let x = x - x.floor();
        let count = 1u64 << j;
        let k = (x * pow2i::<T>(j as i32)).floor().to_u64().unwrap_or(0).min(count - 1);
        Self { j, k }
    }

    pub fn left<T: Real>(&self) -> T {
        T::from_u64(self.k).expect("fits") * pow2i(-(self.j as i32))
    }

    pub fn right<T: Real>(&self) -> T {
        T::from_u64(self.k + 1).expect("fits") * pow2i(-(self.j as i32))
    }

    pub fn contains<T: Real>(&self, x: T) -> bool {
        x >= self.left() && x < self.right()
    }

    pub fn children(&self) -> [Self; 2] {
        [
            Self { j: self.j + 1, k: 2 * self.k },
            Self { j: self.j + 1, k: 2 * self.k + 1 },
        ]
    }

    pub fn parent(&self) -> Option<Self> {
        (self.j > 0).then(|| Self { j: self.j - 1, k: self.k / 2 })
    }

    /// True when `self` is contained in `other`.
    pub fn is_within(&self, other: &Self) -> bool {
        self.j >= other.j && self.k >> (self.j - other.j) == other.k
    }

    /// Periodic neighbour at offset `delta`.
    pub fn neighbour(&self, delta: i64) -> Self {
        let count = 1i64 << self.j;
        Self { j: self.j, k: (self.k as i64 + delta).rem_euclid(count) as u64 }
    }
}

/// Coefficients of a periodic pyramid, levels `j_min..=n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffPyramid<T> {
    n: u32,
    j_min: u32,
    j_reliable: u32,
    scaling: Vec<T>,
    details: Vec<Vec<T>>,
}

impl<T: Real> CoeffPyramid<T> {
    pub fn zeros(n: u32, j_min: u32) -> Result<Self> {
        if j_min >= n {
            return Err(domain_err!("j_min = {j_min} must be below n = {n}"));
        }
        Ok(Self {
            n,
            j_min,
            j_reliable: n - 1,
            scaling: vec![T::zero(); 1 << j_min],
            details: (j_min..n).map(|j| vec![T::zero(); 1 << j]).collect(),
        })
    }

    /// Builds a pyramid from explicit levels; `details[i]` must hold `2^(j_min+i)` values.
    pub fn from_levels(j_min: u32, scaling: Vec<T>, details: Vec<Vec<T>>) -> Result<Self> {
        if scaling.len() != 1 << j_min {
            return Err(domain_err!("expected {} scaling coefficients", 1usize << j_min));
        }
        for (i, level) in details.iter().enumerate() {
            if level.len() != 1 << (j_min as usize + i) {
                return Err(domain_err!("level {} has {} coefficients", j_min as usize + i, level.len()));
            }
            if let Some(p) = level.iter().position(|v| !v.is_finite()) {
                return Err(domain_err!("non-finite coefficient at level {}, k = {p}", j_min as usize + i));
            }
        }
        if details.is_empty() {
            return Err(domain_err!("pyramid needs at least one detail level"));
        }
        let n = j_min + details.len() as u32;
        Ok(Self {
            n,
            j_min,
            j_reliable: n - 1,
            scaling,
            details,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn j_min(&self) -> u32 {
        self.j_min
    }

    pub fn j_max(&self) -> u32 {
        self.n - 1
    }

    /// Finest level kept by [`leaders`]; sample quadrature error dominates above it.
    pub fn j_reliable(&self) -> u32 {
        self.j_reliable
    }

    /// Default upper end of fit ranges, two levels below [`Self::j_reliable`].
    pub fn j_fit_max(&self) -> u32 {
        self.j_reliable.saturating_sub(2).max(self.j_min)
    }

    /// True when `j` lies above [`Self::j_reliable`].
    pub fn is_truncated(&self, j: u32) -> bool {
        j > self.j_reliable
    }

    pub fn scaling(&self) -> &[T] {
        &self.scaling
    }

    pub fn scaling_mut(&mut self) -> &mut [T] {
        &mut self.scaling
    }

    pub fn level(&self, j: u32) -> Result<&[T]> {
        self.index(j).map(|i| self.details[i].as_slice())
    }

    pub fn level_mut(&mut self, j: u32) -> Result<&mut [T]> {
        let i = self.index(j)?;
        Ok(&mut self.details[i])
    }

    pub fn get(&self, lambda: DyadicInterval) -> Result<T> {
        let level = self.level(lambda.j)?;
        level
            .get(lambda.k as usize)
            .copied()
            .ok_or_else(|| range_err!("k = {} outside level {}", lambda.k, lambda.j))
    }

    pub fn set(&mut self, lambda: DyadicInterval, value: T) -> Result<()> {
        let level = self.level_mut(lambda.j)?;
        let slot = level
            .get_mut(lambda.k as usize)
            .ok_or_else(|| range_err!("k = {} outside level", lambda.k))?;
        *slot = value;
        Ok(())
    }

    pub fn levels(&self) -> impl Iterator<Item = (u32, &[T])> {
        self.details.iter().enumerate().map(move |(i, v)| (self.j_min + i as u32, v.as_slice()))
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        out.scaling.iter_mut().for_each(|v| *v *= c);
        out.details.iter_mut().flatten().for_each(|v| *v *= c);
        out
    }

    fn index(&self, j: u32) -> Result<usize> {
        if j < self.j_min || j >= self.n {
            return Err(range_err!("scale {j} outside pyramid [{}, {}]", self.j_min, self.n - 1));
        }
        Ok((j - self.j_min) as usize)
    }
}

fn analysis_step<T: Real>(input: &[T], basis: &WaveletBasis<T>) -> (Vec<T>, Vec<T>) {
    let p = input.len() as i64;
    let half = input.len() / 2;
    let shift = basis.shift();
    let filt = |k: usize| {
        let mut a = T::zero();
        let mut d = T::zero();
        for (m, (&h, &g)) in basis.lowpass.iter().zip(&basis.highpass).enumerate() {
            let x = input[(2 * k as i64 + m as i64 - shift).rem_euclid(p) as usize];
            a += h * x;
            d += g * x;
        }
        (a, d)
    };
    if half >= PARALLEL_LEVEL {
        (0..half).into_par_iter().map(filt).unzip()
    } else {
        (0..half).map(filt).unzip()
    }
}

fn synthesis_step<T: Real>(approx: &[T], detail: &[T], basis: &WaveletBasis<T>) -> Vec<T> {
    let half = approx.len();
    let shift = basis.shift();
    let l = basis.support_len() as i64;
    // Output i collects every (k, m) with 2k + m - shift = i (mod p).
    let gather = |i: usize| {
        let mut acc = T::zero();
        let mut m = (i as i64 + shift).rem_euclid(2);
        while m < l {
            let k = (i as i64 - m + shift).div_euclid(2).rem_euclid(half as i64) as usize;
            acc += basis.lowpass[m as usize] * approx[k] + basis.highpass[m as usize] * detail[k];
            m += 2;
        }
        acc
    };
    if half >= PARALLEL_LEVEL {
        (0..2 * half).into_par_iter().map(gather).collect()
    } else {
        (0..2 * half).map(gather).collect()
    }
}

/// Periodic fast wavelet transform down to level `j_min`; level `j` holds
/// `c_{j,k} = 2^(j/2) <f, psi_{j,k}>` with samples weighted by `2^(-n/2)`.
pub fn dwt<T: Real>(f: &SampledSignal<T>, basis: &WaveletBasis<T>, j_min: u32) -> Result<CoeffPyramid<T>> {
    if f.mode() != BoundaryMode::Periodic {
        return Err(domain_err!("the wavelet transform requires periodic boundary handling"));
    }
    let n = f.n();
    if j_min >= n {
        return Err(domain_err!("j_min = {j_min} must be below n = {n}"));
    }
    let quad = pow2i::<T>(-(n as i32)).sqrt();
    let mut approx: Vec<T> = f.values().iter().map(|&v| v * quad).collect();
    let mut details = Vec::with_capacity((n - j_min) as usize);
    for j in (j_min..n).rev() {
        let (a, mut d) = analysis_step(&approx, basis);
        let norm = pow2i::<T>(j as i32).sqrt();
        d.iter_mut().for_each(|v| *v *= norm);
        details.push(d);
        approx = a;
    }
    details.reverse();
    let norm = pow2i::<T>(j_min as i32).sqrt();
    approx.iter_mut().for_each(|v| *v *= norm);
    let j_reliable = (n as i64 - basis.j0() as i64).clamp(j_min as i64, n as i64 - 1) as u32;
    Ok(CoeffPyramid {
        n,
        j_min,
        j_reliable,
        scaling: approx,
        details,
    })
}

/// Inverse of [`dwt`].
pub fn idwt<T: Real>(p: &CoeffPyramid<T>, basis: &WaveletBasis<T>) -> Result<SampledSignal<T>> {
    let denorm = |j: u32| pow2i::<T>(-(j as i32)).sqrt();
    let s = denorm(p.j_min);
    let mut approx: Vec<T> = p.scaling.iter().map(|&v| v * s).collect();
    for (j, level) in p.levels() {
        let s = denorm(j);
        let d: Vec<T> = level.iter().map(|&v| v * s).collect();
        approx = synthesis_step(&approx, &d, basis);
    }
    let quad = pow2i::<T>(p.n as i32).sqrt();
    approx.iter_mut().for_each(|v| *v *= quad);
    SampledSignal::new(approx, BoundaryMode::Periodic)
}

/// `d_lambda = sup_{lambda' within lambda} |c_lambda'|` over tabulated levels.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderPyramid<T> {
    j_min: u32,
    levels: Vec<Vec<T>>,
}

impl<T: Real> LeaderPyramid<T> {
    pub fn j_min(&self) -> u32 {
        self.j_min
    }

    pub fn j_max(&self) -> u32 {
        self.j_min + self.levels.len() as u32 - 1
    }

    pub fn level(&self, j: u32) -> Result<&[T]> {
        if j < self.j_min || j > self.j_max() {
            return Err(range_err!("scale {j} outside leaders [{}, {}]", self.j_min, self.j_max()));
        }
        Ok(&self.levels[(j - self.j_min) as usize])
    }

    pub fn get(&self, lambda: DyadicInterval) -> Result<T> {
        self.level(lambda.j)?
            .get(lambda.k as usize)
            .copied()
            .ok_or_else(|| range_err!("k = {} outside level {}", lambda.k, lambda.j))
    }

    pub fn levels(&self) -> impl Iterator<Item = (u32, &[T])> {
        self.levels.iter().enumerate().map(move |(i, v)| (self.j_min + i as u32, v.as_slice()))
    }
}

/// Bottom-up leaders over levels `j_min..=j_reliable`; finer levels are dropped.
pub fn leaders<T: Real>(p: &CoeffPyramid<T>) -> LeaderPyramid<T> {
    let kept = (p.j_reliable - p.j_min + 1) as usize;
    let mut levels: Vec<Vec<T>> = Vec::with_capacity(kept);
    for level in p.details[..kept].iter().rev() {
        let mut d: Vec<T> = level.iter().map(|c| c.abs()).collect();
        if let Some(finer) = levels.last() {
            for (k, v) in d.iter_mut().enumerate() {
                *v = v.max(finer[2 * k]).max(finer[2 * k + 1]);
            }
        }
        levels.push(d);
    }
    levels.reverse();
    LeaderPyramid { j_min: p.j_min, levels }
}

/// `d_j(x0)`: the largest leader among `lambda_j(x0)` and its two neighbours.
pub fn point_leaders<T: Real>(lp: &LeaderPyramid<T>, x0: T, scales: RangeInclusive<u32>) -> Result<Vec<T>> {
    if !(x0 >= T::zero() && x0 < T::one()) {
        return Err(domain_err!("x0 = {x0} outside [0, 1)"));
    }
    scales
        .map(|j| {
            let level = lp.level(j)?;
            let centre = DyadicInterval::containing(x0, j);
            let best = (-1..=1)
                .map(|d| level[centre.neighbour(d).k as usize])
                .fold(T::zero(), T::max);
            Ok(best)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeaderRatio<T> {
    pub sup_ratio: T,
    /// Least-squares slope of `log2(d_j / sigma_j)` against `j`.
    pub slope: T,
}

/// `dj[i]` is taken at scale `scales.start() + i`.
pub fn leader_ratio<T: Real>(
    dj: &[T],
    sigma: &AdmissibleSequence<T>,
    scales: RangeInclusive<u32>,
) -> Result<LeaderRatio<T>> {
    let js: Vec<u32> = scales.collect();
    if js.len() != dj.len() {
        return Err(domain_err!("{} leaders for {} scales", dj.len(), js.len()));
    }
    let mut ratios = Vec::with_capacity(js.len());
    for (&j, &d) in js.iter().zip(dj) {
        let s = sigma.get(j as usize)?;
        if !(s > T::zero()) {
            return Err(domain_err!("sigma_{j} is zero"));
        }
        ratios.push(d / s);
    }
    let sup_ratio = ratios.iter().cloned().fold(T::zero(), T::max);
    let slope = if js.len() < 2 {
        T::zero()
    } else if ratios.iter().all(|&r| r > T::zero()) {
        let x: Vec<T> = js.iter().map(|&j| T::from_u32(j).expect("small")).collect();
        let y: Vec<T> = ratios.iter().map(|r| r.log2()).collect();
        slope(&x, &y)?
    } else {
        return Err(domain_err!("zero leader: log-slope undefined"));
    };
    Ok(LeaderRatio { sup_ratio, slope })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformRegularity<T> {
    /// `-slope` of `log2 sup_k |c_{j,k}|`.
    pub epsilon: T,
    pub uniform: bool,
}

/// Global coefficient decay `sup_k |c_{j,k}| <= C 2^(-eps j)`.
pub fn uniform_regularity<T: Real>(p: &CoeffPyramid<T>, scales: RangeInclusive<u32>) -> Result<UniformRegularity<T>> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for j in scales {
        let sup = p.level(j)?.iter().fold(T::zero(), |a, c| a.max(c.abs()));
        if sup > T::zero() {
            x.push(T::from_u32(j).expect("small"));
            y.push(sup.log2());
        }
    }
    if x.len() < 2 {
        return Ok(UniformRegularity {
            epsilon: T::infinity(),
            uniform: true,
        });
    }
    let epsilon = -slope(&x, &y)?;
    Ok(UniformRegularity {
        epsilon,
        uniform: epsilon > T::zero(),
    })
}
