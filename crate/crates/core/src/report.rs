//! Verdict-carrying reports emitted by the bound checks.

use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Pass only if every part passes; any fail wins over inconclusive.
    pub fn all<I: IntoIterator<Item = Verdict>>(parts: I) -> Self {
        let mut out = Verdict::Pass;
        for v in parts {
            match v {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                Verdict::Pass => {}
            }
        }
        out
    }
}

/// One evaluated ratio together with the coordinates it was taken at.
#[derive(Debug, Clone, Serialize)]
pub struct Sample {
    pub at: BTreeMap<String, f64>,
    pub ratio: f64,
}

impl Sample {
    pub fn new(coords: &[(&str, f64)], ratio: f64) -> Self {
        Sample {
            at: coords.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            ratio,
        }
    }
}

/// Per-sample ratios, fitted constants and a verdict for one inequality.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub samples: Vec<Sample>,
    pub fitted: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn new(name: impl Into<String>) -> Self {
        BoundReport {
            name: name.into(),
            samples: Vec::new(),
            fitted: BTreeMap::new(),
            verdict: Verdict::Inconclusive,
            notes: Vec::new(),
        }
    }

    pub fn fit(&mut self, key: &str, value: f64) {
        self.fitted.insert(key.to_string(), value);
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    pub fn fitted_value(&self, key: &str) -> Option<f64> {
        self.fitted.get(key).copied()
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// max/min of a set of positive numbers; infinite when any is non-positive.
pub fn spread(values: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &v in values {
        if !(v > 0.0) || !v.is_finite() {
            return f64::INFINITY;
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if values.is_empty() {
        return f64::INFINITY;
    }
    hi / lo
}

/// Least-squares line y ≈ slope·x + intercept.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spread_of_constants_is_one() {
        assert_eq!(spread(&[2.0, 2.0, 2.0]), 1.0);
        assert_eq!(spread(&[1.0, 4.0]), 4.0);
        assert!(spread(&[1.0, 0.0]).is_infinite());
        assert!(spread(&[]).is_infinite());
    }

    #[test]
    fn verdict_combination() {
        use Verdict::*;
        assert_eq!(Verdict::all([Pass, Pass]), Pass);
        assert_eq!(Verdict::all([Pass, Inconclusive]), Inconclusive);
        assert_eq!(Verdict::all([Inconclusive, Fail, Pass]), Fail);
    }
}
