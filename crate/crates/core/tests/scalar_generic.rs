use holderscope::estimate::{holder_exponent, AnalysisConfig};
use holderscope::localfit::minimax_fit;
use holderscope::sequences::boyd_estimates;
use holderscope::wavelets::{dwt, idwt, WaveletBasis};
use holderscope::{AdmissibleSequenceF32, SignalF32, SignalF64};
use holderscope::signals::{generate, SignalSpec};

#[test]
fn f32_pipeline_tracks_f64() {
    let (f32s, _) = generate(&SignalSpec::<f32>::cusp(0.5, 0.5, 13)).unwrap();
    let (f64s, _) = generate(&SignalSpec::<f64>::cusp(0.5, 0.5, 13)).unwrap();
    let a: SignalF32 = f32s;
    let b: SignalF64 = f64s;
    let cfg32 = AnalysisConfig::<f32>::default();
    let cfg64 = AnalysisConfig::<f64>::default();
    let h32 = holder_exponent(&a, 0.5, 4..=9, &cfg32).unwrap();
    let h64 = holder_exponent(&b, 0.5, 4..=9, &cfg64).unwrap();
    assert!((h32.value as f64 - h64.value).abs() <= 1e-3, "{} vs {}", h32.value, h64.value);
}

#[test]
fn f32_reconstruction_and_fit() {
    let (f, _) = generate(&SignalSpec::<f32>::cusp(0.7, 0.25, 11)).unwrap();
    let basis = WaveletBasis::<f32>::daubechies(3).unwrap();
    let g = idwt(&dwt(&f, &basis, 0).unwrap(), &basis).unwrap();
    let err = f.values().iter().zip(g.values()).fold(0f32, |m, (x, y)| m.max((x - y).abs()));
    assert!(err <= 1e-5, "{err}");
    let fit = minimax_fit(&f, 0.25, 3, 0).unwrap();
    assert!((fit.error - 0.5 * 0.125f32.powf(0.7)).abs() <= 1e-5);
}

#[test]
fn f32_boyd_indices() {
    let s: AdmissibleSequenceF32 = holderscope::sequences::AdmissibleSequence::power_log(0.5, 1.0, 129);
    let b = boyd_estimates(&s, 64).unwrap();
    assert!((b.s_lower + 0.5).abs() <= 0.05 && (b.s_upper + 0.5).abs() <= 0.05);
}
