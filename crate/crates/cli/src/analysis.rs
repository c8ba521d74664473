//! Post-processing of time series: plateau statistics, the early-time
//! Gaussian fit of the ensemble purity, and GE/extent recurrence matching.

use serde::Serialize;

use crate::error::{CliError, Result};

/// Purity values at or below this are outside the Gaussian fit window.
pub const FIT_FLOOR: f64 = 0.05;
/// Peaks must stand out by this fraction of the series range.
pub const PROMINENCE_FRACTION: f64 = 0.1;
/// GE and extent peaks this many kicks apart count as simultaneous.
pub const MATCH_TOLERANCE: usize = 1;
/// Recurrences start once GE reaches this fraction of its plateau.
pub const ONSET_FRACTION: f64 = 0.9;
/// Minimum series length, in kicks, for recurrence analysis.
pub const MIN_RECURRENCE_STEPS: usize = 50;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Rows with `t >= steps - steps / 3` for a series indexed by `t = 0..=steps`;
/// for 300 kicks that is `t` in 200..=300.
pub fn final_third(xs: &[f64]) -> &[f64] {
    let steps = xs.len().saturating_sub(1);
    &xs[steps - steps / 3..]
}

/// Mean and spread of the final third of a series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Plateau {
    pub mean: f64,
    pub std: f64,
    pub max: f64,
}

pub fn plateau(xs: &[f64]) -> Plateau {
    let tail = final_third(xs);
    Plateau {
        mean: mean(tail),
        std: std_dev(tail),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// `P(t) ~ exp(-a t^2)` over `t` in `window`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianFit {
    pub a: f64,
    /// Inclusive `t` range used; always starts at 0.
    pub window: (usize, usize),
    /// RMS of `P(t) - exp(-a t^2)` over the window.
    pub rms_residual: f64,
}

/// Least-squares fit of `ln P(t) = -a t^2` (intercept pinned to `P(0) = 1`)
/// over the leading run of samples with `P(t) > 0.05`. `purity[t]` is the
/// value after `t` kicks.
pub fn fit_gaussian(purity: &[f64]) -> Result<GaussianFit> {
    let len = purity.iter().take_while(|&&p| p > FIT_FLOOR).count();
    if len < 3 {
        return Err(CliError::validation(
            "series",
            format!("only {len} points above {FIT_FLOOR} at the start; need 3"),
        ));
    }
    let window = &purity[..len];
    let (mut num, mut den) = (0.0, 0.0);
    for (t, &p) in window.iter().enumerate() {
        let t2 = (t * t) as f64;
        num -= t2 * p.ln();
        den += t2 * t2;
    }
    let a = (num / den).max(0.0);
    let rms = (window
        .iter()
        .enumerate()
        .map(|(t, &p)| {
            let r = p - (-a * (t * t) as f64).exp();
            r * r
        })
        .sum::<f64>()
        / len as f64)
        .sqrt();
    Ok(GaussianFit {
        a,
        window: (0, len - 1),
        rms_residual: rms,
    })
}

/// Local maxima of `xs` at or after `from` whose topographic prominence is
/// at least `min_prominence`. Flat tops report their first sample.
pub fn prominent_peaks(xs: &[f64], from: usize, min_prominence: f64) -> Vec<usize> {
    let n = xs.len();
    let mut peaks = Vec::new();
    if min_prominence <= 0.0 || n < 3 {
        return peaks;
    }
    let mut i = from.max(1);
    while i + 1 < n {
        if xs[i] > xs[i - 1] {
            // walk across a plateau
            let mut end = i;
            while end + 1 < n && xs[end + 1] == xs[i] {
                end += 1;
            }
            if end + 1 < n && xs[end + 1] < xs[i] && prominence(xs, i, end) >= min_prominence {
                peaks.push(i);
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

fn prominence(xs: &[f64], start: usize, end: usize) -> f64 {
    let h = xs[start];
    let mut left_min = h;
    for &v in xs[..start].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &xs[end + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// GE and squared z-extent peaks after saturation, and how many coincide.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceReport {
    /// First kick with GE at 90% of its final-third mean.
    pub onset: usize,
    pub ge_peaks: Vec<usize>,
    pub extent_peaks: Vec<usize>,
    /// GE peak times that have an extent peak within one kick.
    pub matched: Vec<usize>,
    pub matched_fraction: f64,
    /// Median spacing between matched peaks.
    pub period: Option<usize>,
    pub periodic: bool,
    pub max_ge: f64,
    pub max_ext_z: f64,
}

/// Finds post-saturation recurrences in `ge` and `ext_z^2`.
///
/// A series counts as periodic when at least three GE peaks are found and
/// at least 80% of them coincide with an extent peak.
pub fn run_recurrence_analysis(ge: &[f64], ext_z: &[f64]) -> Result<RecurrenceReport> {
    if ge.len() != ext_z.len() {
        return Err(CliError::validation("series", "ge_su2 and ext_z lengths differ"));
    }
    if ge.len() < MIN_RECURRENCE_STEPS + 1 {
        return Err(CliError::validation(
            "steps",
            format!("recurrence analysis needs at least {MIN_RECURRENCE_STEPS} kicks"),
        ));
    }
    let ez2: Vec<f64> = ext_z.iter().map(|e| e * e).collect();
    let level = plateau(ge).mean;
    let onset = ge
        .iter()
        .position(|&g| g >= ONSET_FRACTION * level)
        .unwrap_or(ge.len());
    let ge_peaks = prominent_peaks(ge, onset, PROMINENCE_FRACTION * range(ge));
    let extent_peaks = prominent_peaks(&ez2, onset, PROMINENCE_FRACTION * range(&ez2));
    let matched: Vec<usize> = ge_peaks
        .iter()
        .copied()
        .filter(|&g| extent_peaks.iter().any(|&e| g.abs_diff(e) <= MATCH_TOLERANCE))
        .collect();
    let matched_fraction = if ge_peaks.is_empty() {
        0.0
    } else {
        matched.len() as f64 / ge_peaks.len() as f64
    };
    let period = {
        let mut gaps: Vec<usize> = matched.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.sort_unstable();
        gaps.get(gaps.len() / 2).copied()
    };
    Ok(RecurrenceReport {
        onset,
        periodic: matched.len() >= 3 && matched_fraction >= 0.8,
        max_ge: ge.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        max_ext_z: ext_z.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ge_peaks,
        extent_peaks,
        matched,
        matched_fraction,
        period,
    })
}

fn range(xs: &[f64]) -> f64 {
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo
}
