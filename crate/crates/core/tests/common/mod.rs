//! Shared measurement helpers for the behavioural and acceptance tests.
//! These are deliberately independent of the closed-form code paths they
//! check: frequencies come from a windowed DFT scan of simulated samples,
//! growth rates from a log-amplitude fit between thresholds.

// each integration-test target compiles this module separately and uses a
// different subset
#![allow(dead_code)]

/// Angular frequencies of the `n_peaks` strongest spectral peaks of
/// `signal` (uniformly sampled at `times`), found by a Hann-windowed DFT
/// scanned over `[omega_min, omega_max]` with resolution `step` and refined
/// by parabolic interpolation. Peaks closer than `min_separation` to a
/// stronger one are suppressed.
pub fn dominant_frequencies(
    times: &[f64],
    signal: &[f64],
    omega_min: f64,
    omega_max: f64,
    step: f64,
    n_peaks: usize,
    min_separation: f64,
) -> Vec<f64> {
    assert_eq!(times.len(), signal.len());
    let n = signal.len();
    let mean = signal.iter().sum::<f64>() / n as f64;
    let windowed: Vec<f64> = signal
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (n as f64 - 1.0)).cos();
            (s - mean) * w
        })
        .collect();

    let n_freq = ((omega_max - omega_min) / step).ceil() as usize;
    let mut amps = Vec::with_capacity(n_freq);
    let mut omegas = Vec::with_capacity(n_freq);
    for k in 0..n_freq {
        let om = omega_min + k as f64 * step;
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, s) in times.iter().zip(&windowed) {
            let phase = om * t;
            re += s * phase.cos();
            im -= s * phase.sin();
        }
        omegas.push(om);
        amps.push((re * re + im * im).sqrt());
    }

    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for k in 1..n_freq - 1 {
        if amps[k] > amps[k - 1] && amps[k] >= amps[k + 1] {
            // parabolic refinement on the log amplitude
            let (la, lb, lc) = (amps[k - 1].ln(), amps[k].ln(), amps[k + 1].ln());
            let denom = la - 2.0 * lb + lc;
            let delta = if denom.abs() > 1e-300 {
                (0.5 * (la - lc) / denom).clamp(-0.5, 0.5)
            } else {
                0.0
            };
            peaks.push((amps[k], omegas[k] + delta * step));
        }
    }
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut out: Vec<f64> = Vec::new();
    for (_, om) in peaks {
        if out.iter().all(|o| (o - om).abs() > min_separation) {
            out.push(om);
            if out.len() == n_peaks {
                break;
            }
        }
    }
    out
}

/// Exponential growth rate of `|signal|` fitted by linear regression of the
/// log amplitude over the window where the amplitude first rises from
/// `lo_threshold` to `hi_threshold`. Panics when the window is empty.
pub fn fit_growth_rate(times: &[f64], signal: &[f64], lo_threshold: f64, hi_threshold: f64) -> f64 {
    let abs: Vec<f64> = signal.iter().map(|s| s.abs()).collect();
    let start = abs
        .iter()
        .position(|&a| a > lo_threshold)
        .expect("signal reaches the lower threshold");
    let end = abs[start..]
        .iter()
        .position(|&a| a > hi_threshold)
        .map(|k| start + k)
        .expect("signal reaches the upper threshold");
    assert!(end > start + 4, "growth window too short");

    let ts = &times[start..=end];
    let ys: Vec<f64> = abs[start..=end].iter().map(|a| a.ln()).collect();
    let n = ts.len() as f64;
    let mean_t = ts.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (t, y) in ts.iter().zip(&ys) {
        cov += (t - mean_t) * (y - mean_y);
        var += (t - mean_t) * (t - mean_t);
    }
    cov / var
}

/// Half-period measured from the first two sign changes of a sampled
/// component.
pub fn period_from_crossings(crossings: &[f64]) -> f64 {
    assert!(crossings.len() >= 2, "need at least two sign changes");
    2.0 * (crossings[1] - crossings[0])
}
