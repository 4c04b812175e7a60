use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use sar_rpca::baseband::{demodulate, from_baseband, modulate_and_filter, to_baseband, LowpassFilter, Provenance};
use sar_rpca::linalg::max_abs;
use sar_rpca::presets::Regime;
use sar_rpca::sim::{synthesize_baseband_direct, synthesize_downramped, BandwidthConvention, Pulse, SamplingSpec, Scenario, Target};
use sar_rpca::Error;

fn single(ratio: f64) -> Scenario {
    let b = 19.5e6;
    let pulse = Pulse::new(ratio * b, b, BandwidthConvention::Angular).unwrap();
    Scenario::auto(
        pulse,
        Regime::Scaled.platform(),
        Vector3::zeros(),
        vec![Target::moving(Vector3::new(-3.0, 5.0, 0.0), Vector3::new(2.0, 1.0, 0.0), 1.0)],
    )
    .unwrap()
}

#[test]
fn filtered_matches_direct_model_for_one_target() {
    let sc = single(20.0);
    let filt = to_baseband(&synthesize_downramped(&sc).unwrap(), &LowpassFilter::for_pulse(&sc.pulse)).unwrap();
    let direct = synthesize_baseband_direct(&sc).unwrap();
    assert_eq!(direct.provenance, Provenance::DirectModel);
    let err = max_abs(&(&filt.values - &direct.values)) / max_abs(&direct.values);
    assert!(err <= 1e-3, "{err}");
}

#[test]
fn round_trip_over_carrier_ratios() {
    for ratio in [8.0, 12.0, 20.0, 40.0] {
        let sc = single(ratio);
        let d = synthesize_downramped(&sc).unwrap();
        for filter in [LowpassFilter::for_pulse(&sc.pulse), LowpassFilter::for_pulse(&sc.pulse).with_padding(true)] {
            let back = from_baseband(&to_baseband(&d, &filter).unwrap()).unwrap();
            let err = max_abs(&(&back.values - &d.values)) / max_abs(&d.values);
            assert!(err <= 1e-6, "ratio {ratio}: {err}");
        }
    }
}

#[test]
fn coarse_sampling_of_the_carrier_is_rejected() {
    let sc = single(20.0);
    let step = 4.0 / sc.pulse.carrier();
    let coarse = sc.with_sampling(SamplingSpec { delta_t_seconds: Some(step), gate_seconds: None }).unwrap();
    let err = to_baseband(&synthesize_downramped(&coarse).unwrap(), &LowpassFilter::for_pulse(&coarse.pulse)).unwrap_err();
    assert!(matches!(err, Error::CarrierAliased { .. }));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn on_grid_tone_is_recovered_exactly() {
    // cos(w0 t) cos(w t) shifts to cos(w t) at baseband; both tones sit on FFT bins.
    let n = 256;
    let dt = 1.0 / n as f64;
    let t: Vec<f64> = (0..n).map(|l| l as f64 * dt).collect();
    let tau = 2.0 * std::f64::consts::PI;
    let (carrier, w) = (tau * 64.0, tau * 5.0);
    let row = DMatrix::from_fn(1, n, |_, l| (carrier * t[l]).cos() * (w * t[l]).cos());
    let filter = LowpassFilter { cutoff: tau * 20.0, pad_to_pow2: false };
    let b = modulate_and_filter(&row, &t, dt, carrier, &filter);
    let expected = DMatrix::from_fn(1, n, |_, l| Complex64::new((w * t[l]).cos(), 0.0));
    assert!(max_abs(&(&b - &expected)) < 1e-12);
    assert!(max_abs(&(&demodulate(&b, &t, carrier) - &row)) < 1e-12);
}
