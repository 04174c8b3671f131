//! Runtime invariant suite behind `holderscope selftest`.

use crate::estimate::{holder_exponent, membership_test, AnalysisConfig, Method, Verdict};
use crate::findiff::{build_phi, finite_difference, whitney_profile, MollifierKernel};
use crate::localfit::{minimax_fit, oscillation_profile, peano_jet};
use crate::sampled::SampledSignal;
use crate::sequences::{boyd_estimates, is_decreasing_family, AdmissibleSequence, SequenceFamily, DEFAULT_EPSILONS};
use crate::signals::{generate, SignalSpec};
use crate::wavelets::{dwt, idwt, leaders, CoeffPyramid, DyadicInterval, WaveletBasis};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

type Check = (&'static str, fn() -> crate::Result<(bool, String)>);

const CHECKS: &[Check] = &[
    ("filters-orthonormal", filters_orthonormal),
    ("dwt-reconstruction", dwt_reconstruction),
    ("unit-coefficient-round-trip", unit_round_trip),
    ("leaders-hereditary", leaders_hereditary),
    ("differences-annihilate", differences_annihilate),
    ("minimax-reproduces-polynomials", minimax_reproduces),
    ("whitney-two-sided", whitney_two_sided),
    ("phi-moments", phi_moments),
    ("boyd-indices", boyd_indices),
    ("decreasing-family", decreasing_family),
    ("peano-jet", peano),
    ("cusp-exponent", cusp_exponent),
    ("scale-invariance", scale_invariance),
];

/// Runs every check; a check that errors counts as a failure.
pub fn run() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| match check() {
            Ok((pass, detail)) => CheckOutcome { name, pass, detail },
            Err(e) => CheckOutcome {
                name,
                pass: false,
                detail: format!("error: {e}"),
            },
        })
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn filters_orthonormal() -> crate::Result<(bool, String)> {
    let worst = (1..=10)
        .map(|v| WaveletBasis::<f64>::daubechies(v).map(|b| b.orthonormality_defect()))
        .collect::<crate::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((worst <= 1e-10, format!("max defect {worst:.3e}")))
}

fn dwt_reconstruction() -> crate::Result<(bool, String)> {
    let f = SampledSignal::from_fn(12, |x: f64| (9.0 * x).sin() + (x - 0.3).abs().powf(0.4))?;
    let basis = WaveletBasis::default();
    let g = idwt(&dwt(&f, &basis, 0)?, &basis)?;
    let err = max_abs_diff(f.values(), g.values());
    Ok((err <= 1e-10, format!("max error {err:.3e}")))
}

fn unit_round_trip() -> crate::Result<(bool, String)> {
    let basis = WaveletBasis::default();
    let mut p = CoeffPyramid::<f64>::zeros(10, 0)?;
    let lambda = DyadicInterval::new(6, 21)?;
    p.set(lambda, 1.0)?;
    let q = dwt(&idwt(&p, &basis)?, &basis, 0)?;
    let mut err = (q.get(lambda)? - 1.0).abs();
    for (j, level) in q.levels() {
        for (k, c) in level.iter().enumerate() {
            if (j, k as u64) != (lambda.j, lambda.k) {
                err = err.max(c.abs());
            }
        }
    }
    Ok((err <= 1e-10, format!("max deviation {err:.3e}")))
}

fn leaders_hereditary() -> crate::Result<(bool, String)> {
    let f = SampledSignal::from_fn(10, |x: f64| (x - 0.6).abs().sqrt() * (31.0 * x).cos())?;
    let lp = leaders(&dwt(&f, &WaveletBasis::default(), 0)?);
    let mut ok = true;
    for (j, level) in lp.levels().skip(1) {
        let coarser = lp.level(j - 1)?;
        ok &= level.iter().enumerate().all(|(k, &d)| d <= coarser[k / 2]);
    }
    Ok((ok, "child <= parent at every node".into()))
}

fn differences_annihilate() -> crate::Result<(bool, String)> {
    let c = [0.4, -1.0, 2.5, 0.75];
    let f = SampledSignal::from_fn(12, |x: f64| crate::localfit::horner(&c, x - 0.5))?;
    let mut worst = 0.0f64;
    for s in [1.0, 7.0, 33.0] {
        worst = worst.max(finite_difference(&f, 0.25, s / 4096.0, 4)?.abs());
    }
    let rel = worst / f.sup_norm();
    Ok((rel <= 1e-9, format!("relative residual {rel:.3e}")))
}

fn minimax_reproduces() -> crate::Result<(bool, String)> {
    let c = [1.0, -0.5, 3.0];
    let f = SampledSignal::from_fn(12, |x: f64| crate::localfit::horner(&c, x - 0.5))?;
    let fit = minimax_fit(&f, 0.5, 3, 2)?;
    let err = max_abs_diff(&fit.coeffs, &c).max(fit.error);
    Ok((err <= 1e-8, format!("coefficient error {err:.3e}")))
}

fn whitney_two_sided() -> crate::Result<(bool, String)> {
    let f = SampledSignal::from_fn(12, |x: f64| (x - 0.5).abs().powf(0.6) + x * x)?;
    let mut ok = true;
    for m in 0..=2usize {
        let e = oscillation_profile(&f, 0.5, m, 3..=8)?;
        let w = whitney_profile(&f, 0.5, m, 3..=8)?;
        let c = crate::localfit::factorial::<f64>(m + 1) * (m + 2) as f64;
        ok &= e.iter().zip(&w).all(|(e, o)| *o <= c * e * (1.0 + 1e-12) + 1e-15);
    }
    Ok((ok, "osc_j <= (M+1)!(M+2) E_j".into()))
}

fn phi_moments() -> crate::Result<(bool, String)> {
    let phi = build_phi(&MollifierKernel::<f64>::bump(), 4)?;
    let worst = (1..4).map(|p| phi.moment(p).abs()).fold(0.0, f64::max);
    let mass = (phi.integral() - 1.0).abs();
    Ok((worst <= 1e-6 && mass <= 1e-8, format!("moments {worst:.3e}, mass error {mass:.3e}")))
}

fn boyd_indices() -> crate::Result<(bool, String)> {
    let sigma = AdmissibleSequence::<f64>::power_log(0.5, 1.0, 513);
    let b = boyd_estimates(&sigma, 256)?;
    let err = (b.s_lower + 0.5).abs().max((b.s_upper + 0.5).abs());
    Ok((err <= 0.05, format!("max |s + alpha| {err:.3e}")))
}

fn decreasing_family() -> crate::Result<(bool, String)> {
    let fam = SequenceFamily::power(0.2, 2.5)?;
    let report = is_decreasing_family(&fam, 64, &DEFAULT_EPSILONS)?;
    Ok((report.verdict, format!("{} checks", report.checks)))
}

fn peano() -> crate::Result<(bool, String)> {
    let (f, _) = generate(&SignalSpec::<f64>::poly_plus_cusp(vec![1.0, 2.0], 1.5, 0.5, 14))?;
    let jet = peano_jet(&f, 0.5, 1, 4..=12)?;
    let (d0, d1) = ((jet.derivatives[0] - 1.0).abs(), (jet.derivatives[1] - 2.0).abs());
    Ok((d0 <= 1e-3 && d1 <= 1e-2, format!("jet error ({d0:.2e}, {d1:.2e})")))
}

fn cusp_exponent() -> crate::Result<(bool, String)> {
    let (f, _) = generate(&SignalSpec::<f64>::cusp(0.5, 0.5, 14))?;
    let h = holder_exponent(&f, 0.5, 4..=10, &AnalysisConfig::default())?;
    let err = (h.value - 0.5).abs();
    Ok((err <= 0.05, format!("alpha_hat {:.4}", h.value)))
}

fn scale_invariance() -> crate::Result<(bool, String)> {
    let (f, _) = generate(&SignalSpec::<f64>::cusp(0.7, 0.5, 12))?;
    let g = f.scaled(7.0);
    let sigma = AdmissibleSequence::power(0.7, 16);
    let cfg = AnalysisConfig::default();
    let mut worst = 0.0f64;
    let mut same = true;
    for m in [Method::Leaders, Method::Minimax] {
        let a = membership_test(&f, 0.5, &sigma, 0, m, 4..=8, &cfg)?;
        let b = membership_test(&g, 0.5, &sigma, 0, m, 4..=8, &cfg)?;
        same &= a.verdict == b.verdict && a.verdict == Verdict::Consistent;
        worst = worst.max((a.slope - b.slope).abs());
    }
    Ok((same && worst <= 1e-12, format!("slope drift {worst:.3e}")))
}
