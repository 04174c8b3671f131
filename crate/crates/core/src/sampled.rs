//! Uniform samples `f(i/N)` on `[0, 1)` and the discrete balls `x0 + B_j`.

use crate::error::{domain_err, range_err, Result};
use crate::real::{pow2i, Real};

/// How indices outside `[0, N)` are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    /// Samples wrap around: `f(x + 1) = f(x)`.
    #[default]
    Periodic,
    /// Samples outside `[0, 1)` do not exist.
    Clip,
}

/// Samples of a signal on the grid `x_i = i / N`, `N = 2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal<T> {
    values: Vec<T>,
    n: u32,
    mode: BoundaryMode,
}

impl<T: Real> SampledSignal<T> {
    pub fn new(values: Vec<T>, mode: BoundaryMode) -> Result<Self> {
        let len = values.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(domain_err!("length {len} is not a power of two"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(domain_err!("non-finite sample at index {i}"));
        }
        Ok(Self {
            values,
            n: len.trailing_zeros(),
            mode,
        })
    }

    /// Periodic signal from `f` evaluated on the grid.
    pub fn from_fn(n: u32, f: impl Fn(T) -> T) -> Result<Self> {
        let len = 1usize << n;
        let inv = T::one() / T::from_usize_lossy(len);
        let values = (0..len).map(|i| f(T::from_usize_lossy(i) * inv)).collect();
        Self::new(values, BoundaryMode::Periodic)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid exponent `n` with `N = 2^n`.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn with_mode(mut self, mode: BoundaryMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn step(&self) -> T {
        T::one() / T::from_usize_lossy(self.len())
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * c).collect(),
            n: self.n,
            mode: self.mode,
        }
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Value at (possibly out of range) integer index, honoring the boundary mode.
    pub fn at(&self, i: i64) -> Result<T> {
        let len = self.len() as i64;
        match self.mode {
            BoundaryMode::Periodic => Ok(self.values[i.rem_euclid(len) as usize]),
            BoundaryMode::Clip if (0..len).contains(&i) => Ok(self.values[i as usize]),
            BoundaryMode::Clip => Err(range_err!("index {i} outside [0, {len})")),
        }
    }

    /// Grid index of an abscissa that must lie on the grid.
    pub fn grid_index(&self, x: T) -> Result<i64> {
        let scaled = x * T::from_usize_lossy(self.len());
        let nearest = scaled.round();
        if (scaled - nearest).abs() > T::lit(1e-6) {
            return Err(domain_err!("abscissa {x} is not a grid point"));
        }
        Ok(nearest.to_i64().expect("grid index fits i64"))
    }

    /// Grid step count of an increment that must be a multiple of `1/N`.
    pub fn grid_steps(&self, h: T) -> Result<i64> {
        self.grid_index(h)
            .map_err(|_| domain_err!("step {h} is not a multiple of the grid step"))
    }

    /// Samples in the closed ball `|x - x0| <= 2^-j`.
    pub fn ball(&self, x0: T, j: u32) -> Result<Ball<T>> {
        self.ball_radius(x0, pow2i(-(j as i32)))
    }

    pub fn ball_radius(&self, x0: T, radius: T) -> Result<Ball<T>> {
        if !(x0 >= T::zero() && x0 < T::one()) {
            return Err(domain_err!("center {x0} outside [0, 1)"));
        }
        let nf = T::from_usize_lossy(self.len());
        let slack = T::lit(1e-9);
        let mut lo = ((x0 - radius) * nf - slack).ceil().to_i64().unwrap_or(0);
        let mut hi = ((x0 + radius) * nf + slack).floor().to_i64().unwrap_or(0);
        let len = self.len() as i64;
        if self.mode == BoundaryMode::Clip {
            lo = lo.max(0);
            hi = hi.min(len - 1);
        } else if hi - lo + 1 > len {
            return Err(range_err!("ball of radius {radius} wraps the whole period"));
        }
        if hi < lo {
            return Err(range_err!("ball around {x0} is empty"));
        }
        let values = (lo..=hi).map(|i| self.at(i)).collect::<Result<Vec<_>>>()?;
        let offsets = (lo..=hi)
            .map(|i| T::from_i64(i).expect("index fits") / nf - x0)
            .collect();
        Ok(Ball {
            first_index: lo,
            radius,
            offsets,
            values,
        })
    }
}

/// The samples of a signal falling into a closed ball around a center.
#[derive(Debug, Clone)]
pub struct Ball<T> {
    /// Unwrapped grid index of the first sample.
    pub first_index: i64,
    pub radius: T,
    /// `x_i - x0` for each sample, increasing.
    pub offsets: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> Ball<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}
