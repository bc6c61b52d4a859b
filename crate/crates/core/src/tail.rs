//! Windowed tail diagnostics for depth-indexed sequences.
//!
//! Limits over an infinite tree cannot be read off a truncation. These
//! helpers look at the last `window` depth levels of a sequence and report
//! whether it is consistent with vanishing, with staying away from zero, or
//! with the running supremum having settled. They never claim a limit.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailPolicy {
    /// Number of trailing depth levels inspected.
    pub window: usize,
    /// Relative threshold.
    pub tol: f64,
}

impl Default for TailPolicy {
    fn default() -> Self {
        TailPolicy {
            window: 8,
            tol: 1e-3,
        }
    }
}

impl TailPolicy {
    pub fn new(window: usize, tol: f64) -> Self {
        TailPolicy { window, tol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailClass {
    /// Nonincreasing over the window and below `tol · peak` throughout.
    Vanishing,
    /// Bounded away from zero over the window and not drifting down.
    Persistent,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Growth {
    /// Running supremum moved by at most `tol` (relative) across the window.
    Stable,
    /// Strictly increasing across the window by more than `tol`, with
    /// increments too slow to sum to a finite limit.
    Growing,
    Undetermined,
}

fn window_slice<'a>(values: &'a [f64], policy: &TailPolicy) -> &'a [f64] {
    let w = policy.window.min(values.len());
    &values[values.len() - w..]
}

pub fn peak(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

pub fn classify_tail(values: &[f64], policy: &TailPolicy) -> TailClass {
    if values.is_empty() {
        return TailClass::Undetermined;
    }
    let peak = peak(values);
    let tail = window_slice(values, policy);
    let threshold = policy.tol * peak;
    let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0]);
    if nonincreasing && tail.iter().all(|&x| x <= threshold) {
        return TailClass::Vanishing;
    }
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = peak_of(tail);
    let nondecreasing = tail.windows(2).all(|w| w[1] >= w[0]);
    if lo > threshold && (nondecreasing || hi - lo <= policy.tol * hi) {
        return TailClass::Persistent;
    }
    TailClass::Undetermined
}

fn peak_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Running maxima of `values`.
pub fn running_sup(values: &[f64]) -> Vec<f64> {
    let mut acc = f64::NEG_INFINITY;
    values
        .iter()
        .map(|&x| {
            acc = acc.max(x);
            acc
        })
        .collect()
}

pub fn sup_growth(values: &[f64], policy: &TailPolicy) -> Growth {
    if values.is_empty() {
        return Growth::Undetermined;
    }
    let run = running_sup(values);
    let last = *run.last().expect("nonempty");
    let w = policy.window.min(values.len() - 1);
    let before = run[run.len() - 1 - w];
    let rel = if last > 0.0 { (last - before) / last } else { 0.0 };
    if rel <= policy.tol {
        return Growth::Stable;
    }
    let start = values.len() - 1 - w;
    let tail = &values[start..];
    if tail.windows(2).all(|p| p[1] > p[0]) && !summable_increments(tail, start) {
        Growth::Growing
    } else {
        Growth::Undetermined
    }
}

/// Increments decaying at least like `i^-1.25` (fitted power law) could
/// still add up to a finite limit, so they are no evidence of growth.
pub const DIVERGENCE_EXPONENT: f64 = 1.25;

fn summable_increments(tail: &[f64], offset: usize) -> bool {
    let pts: Vec<(f64, f64)> = tail
        .windows(2)
        .enumerate()
        .map(|(i, p)| (((offset + i + 2) as f64).ln(), (p[1] - p[0]).ln()))
        .collect();
    if pts.len() < 2 {
        return false;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx) * (p.0 - mx)));
    -num / den > DIVERGENCE_EXPONENT
}

/// Serializable summary of one depth-indexed quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailDiagnostic {
    pub name: String,
    pub class: TailClass,
    pub growth: Growth,
    pub peak: f64,
    pub last: f64,
    pub window_values: Vec<f64>,
}

impl TailDiagnostic {
    pub fn of(name: &str, values: &[f64], policy: &TailPolicy) -> Self {
        TailDiagnostic {
            name: name.to_string(),
            class: classify_tail(values, policy),
            growth: sup_growth(values, policy),
            peak: peak(values),
            last: values.last().copied().unwrap_or(0.0),
            window_values: window_slice(values, policy).to_vec(),
        }
    }
}
