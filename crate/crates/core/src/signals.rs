//! Ground-truth generators: cusps, log-corrected cusps, Weierstrass sums and
//! polynomials, each with its expected modulus and exponent at `x0`.

use rayon::prelude::*;

use crate::error::{domain_err, Result};
use crate::localfit::{factorial, horner, MAX_DEGREE};
use crate::real::Real;
use crate::sampled::{BoundaryMode, SampledSignal};
use crate::sequences::AdmissibleSequence;

pub const DEFAULT_WEIERSTRASS_TERMS: usize = 30;
/// Tail bounds above this flag a Weierstrass sum as under-resolved.
pub const TRUNCATION_TOLERANCE: f64 = 1e-6;
pub const MAX_GRID_EXPONENT: u32 = 26;

#[derive(Debug, Clone, PartialEq)]
pub enum SignalKind<T> {
    /// `|x - x0|^alpha`.
    Cusp { alpha: T, x0: T },
    /// `|x - x0|^alpha (1 + |log2 |x - x0||)^beta`, zero at `x0`.
    CuspLog { alpha: T, beta: T, x0: T },
    /// `sum_{m < terms} a^m cos(2 pi b^m x)`.
    Weierstrass { a: T, b: u32, terms: usize },
    /// `P(x) + |x - x0|^alpha`; `coeffs[k]` multiplies `(x - x0)^k`.
    PolyPlusCusp { coeffs: Vec<T>, alpha: T, x0: T },
    /// `coeffs[k]` multiplies `(x - x0)^k`.
    Polynomial { coeffs: Vec<T>, x0: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec<T> {
    pub kind: SignalKind<T>,
    /// Grid exponent, `N = 2^n`.
    pub n: u32,
}

/// Expected behaviour of a generated signal at its reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth<T> {
    /// `sigma_j = 2^(-alpha j) (1 + j)^beta`, or `None` when `f` is locally polynomial.
    pub model: Option<(T, T)>,
    /// Pointwise Holder exponent; `+inf` for polynomials.
    pub holder: T,
    pub center: Option<T>,
    /// Smallest polynomial degree `M` for which the model holds.
    pub degree: usize,
    /// Peano derivatives `f_b(x0)`, `b = 0..=degree`, when known.
    pub jet: Option<Vec<T>>,
    /// Weierstrass tail bound `a^terms / (1 - a)`.
    pub truncation: Option<T>,
}

impl<T: Real> GroundTruth<T> {
    pub fn sigma(&self, len: usize) -> Option<AdmissibleSequence<T>> {
        self.model.map(|(a, b)| AdmissibleSequence::power_log(a, b, len))
    }

    pub fn truncation_flagged(&self) -> bool {
        self.truncation.is_some_and(|t| t > T::lit(TRUNCATION_TOLERANCE))
    }
}

impl<T: Real> SignalSpec<T> {
    pub fn cusp(alpha: T, x0: T, n: u32) -> Self {
        Self { kind: SignalKind::Cusp { alpha, x0 }, n }
    }

    pub fn cusp_log(alpha: T, beta: T, x0: T, n: u32) -> Self {
        Self { kind: SignalKind::CuspLog { alpha, beta, x0 }, n }
    }

    pub fn weierstrass(a: T, b: u32, terms: usize, n: u32) -> Self {
        Self { kind: SignalKind::Weierstrass { a, b, terms }, n }
    }

    pub fn poly_plus_cusp(coeffs: Vec<T>, alpha: T, x0: T, n: u32) -> Self {
        Self { kind: SignalKind::PolyPlusCusp { coeffs, alpha, x0 }, n }
    }

    pub fn polynomial(coeffs: Vec<T>, x0: T, n: u32) -> Self {
        Self { kind: SignalKind::Polynomial { coeffs, x0 }, n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_GRID_EXPONENT {
            return Err(domain_err!("grid exponent {} outside 1..={MAX_GRID_EXPONENT}", self.n));
        }
        let check_x0 = |x0: T| {
            if x0 >= T::zero() && x0 < T::one() {
                Ok(())
            } else {
                Err(domain_err!("x0 = {x0} outside [0, 1)"))
            }
        };
        let check_alpha = |alpha: T| {
            if alpha > T::zero() && alpha.is_finite() {
                Ok(())
            } else {
                Err(domain_err!("alpha = {alpha} must be positive"))
            }
        };
        let check_coeffs = |c: &[T]| {
            if c.is_empty() || c.len() > MAX_DEGREE + 1 || c.iter().any(|v| !v.is_finite()) {
                Err(domain_err!("polynomial needs 1..={} finite coefficients", MAX_DEGREE + 1))
            } else {
                Ok(())
            }
        };
        match &self.kind {
            SignalKind::Cusp { alpha, x0 } => {
                check_alpha(*alpha)?;
                check_x0(*x0)
            }
            SignalKind::CuspLog { alpha, beta, x0 } => {
                check_alpha(*alpha)?;
                if !beta.is_finite() {
                    return Err(domain_err!("beta = {beta} must be finite"));
                }
                check_x0(*x0)
            }
            SignalKind::Weierstrass { a, b, terms } => {
                if !(*a > T::zero() && *a < T::one()) {
                    return Err(domain_err!("a = {a} outside (0, 1)"));
                }
                if *b < 2 {
                    return Err(domain_err!("b = {b} must be at least 2"));
                }
                if *terms == 0 {
                    return Err(domain_err!("at least one term is required"));
                }
                Ok(())
            }
            SignalKind::PolyPlusCusp { coeffs, alpha, x0 } => {
                check_alpha(*alpha)?;
                check_x0(*x0)?;
                check_coeffs(coeffs)?;
                let floor = alpha.floor().to_usize().unwrap_or(usize::MAX);
                if coeffs.len() - 1 > floor {
                    return Err(domain_err!(
                        "polynomial degree {} exceeds floor(alpha) = {floor}",
                        coeffs.len() - 1
                    ));
                }
                Ok(())
            }
            SignalKind::Polynomial { coeffs, x0 } => {
                check_x0(*x0)?;
                check_coeffs(coeffs)
            }
        }
    }

    /// Pointwise value at `x`.
    pub fn eval(&self, x: T) -> T {
        match &self.kind {
            SignalKind::Cusp { alpha, x0 } => (x - *x0).abs().powf(*alpha),
            SignalKind::CuspLog { alpha, beta, x0 } => cusp_log(x - *x0, *alpha, *beta),
            SignalKind::Weierstrass { a, b, terms } => {
                let two_pi = T::lit(std::f64::consts::TAU);
                let bf = T::from_u32(*b).expect("small");
                let mut freq = T::one();
                let mut amp = T::one();
                let mut sum = T::zero();
                for _ in 0..*terms {
                    // b^m x is reduced mod 1 before scaling to keep the phase exact
                    let phase = freq * x;
                    sum += amp * (two_pi * (phase - phase.floor())).cos();
                    freq *= bf;
                    amp *= *a;
                }
                sum
            }
            SignalKind::PolyPlusCusp { coeffs, alpha, x0 } => {
                horner(coeffs, x - *x0) + (x - *x0).abs().powf(*alpha)
            }
            SignalKind::Polynomial { coeffs, x0 } => horner(coeffs, x - *x0),
        }
    }

    pub fn ground_truth(&self) -> GroundTruth<T> {
        match &self.kind {
            SignalKind::Cusp { alpha, x0 } => {
                let degree = alpha.floor().to_usize().unwrap_or(0);
                GroundTruth {
                    model: Some((*alpha, T::zero())),
                    holder: *alpha,
                    center: Some(*x0),
                    degree,
                    jet: Some(vec![T::zero(); degree + 1]),
                    truncation: None,
                }
            }
            SignalKind::CuspLog { alpha, beta, x0 } => {
                let degree = alpha.floor().to_usize().unwrap_or(0);
                GroundTruth {
                    model: Some((*alpha, *beta)),
                    holder: *alpha,
                    center: Some(*x0),
                    degree,
                    jet: Some(vec![T::zero(); degree + 1]),
                    truncation: None,
                }
            }
            SignalKind::Weierstrass { a, b, terms } => {
                let h = -a.ln() / T::from_u32(*b).expect("small").ln();
                GroundTruth {
                    model: Some((h, T::zero())),
                    holder: h,
                    center: None,
                    degree: h.floor().to_usize().unwrap_or(0),
                    jet: None,
                    truncation: Some(truncation_error(*a, *terms)),
                }
            }
            SignalKind::PolyPlusCusp { coeffs, alpha, x0 } => {
                let degree = alpha.floor().to_usize().unwrap_or(0);
                let jet = (0..=degree)
                    .map(|b| coeffs.get(b).map_or(T::zero(), |&c| c * factorial::<T>(b)))
                    .collect();
                GroundTruth {
                    model: Some((*alpha, T::zero())),
                    holder: *alpha,
                    center: Some(*x0),
                    degree,
                    jet: Some(jet),
                    truncation: None,
                }
            }
            SignalKind::Polynomial { coeffs, x0 } => GroundTruth {
                model: None,
                holder: T::infinity(),
                center: Some(*x0),
                degree: coeffs.len() - 1,
                jet: Some(
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(b, &c)| c * factorial::<T>(b))
                        .collect(),
                ),
                truncation: None,
            },
        }
    }
}

fn cusp_log<T: Real>(t: T, alpha: T, beta: T) -> T {
    let r = t.abs();
    if r == T::zero() {
        return T::zero();
    }
    r.powf(alpha) * (T::one() + r.log2().abs()).powf(beta)
}

/// Samples `spec` on `x_i = i / 2^n` with periodic boundary handling.
pub fn generate<T: Real>(spec: &SignalSpec<T>) -> Result<(SampledSignal<T>, GroundTruth<T>)> {
    spec.validate()?;
    let len = 1usize << spec.n;
    let step = T::from_usize_lossy(len).recip();
    let values: Vec<T> = (0..len)
        .into_par_iter()
        .map(|i| spec.eval(T::from_usize_lossy(i) * step))
        .collect();
    let signal = SampledSignal::new(values, BoundaryMode::Periodic)?;
    Ok((signal, spec.ground_truth()))
}

/// `sum_{m >= terms} a^m = a^terms / (1 - a)`.
pub fn truncation_error<T: Real>(a: T, terms: usize) -> T {
    a.powi(terms as i32) / (T::one() - a)
}
