//! Persistence distributions, log-log power-law fits, Pearson correlation
//! and normalized mutual information.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Counts of persistence values, with zeros tracked apart from the rest.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PersistenceHistogram {
    pub counts: BTreeMap<u32, u64>,
    pub zero_count: u64,
    pub total: u64,
}

impl PersistenceHistogram {
    pub fn from_values<I: IntoIterator<Item = u32>>(values: I) -> Self {
        let mut h = Self::default();
        for v in values {
            h.add(v, 1);
        }
        h
    }

    pub fn add(&mut self, value: u32, count: u64) {
        if count == 0 {
            return;
        }
        if value == 0 {
            self.zero_count += count;
        } else {
            *self.counts.entry(value).or_default() += count;
        }
        self.total += count;
    }

    /// Mean persistence, zeros included.
    pub fn mean(&self) -> Option<f64> {
        (self.total > 0).then(|| {
            self.counts
                .iter()
                .map(|(&p, &c)| p as f64 * c as f64)
                .sum::<f64>()
                / self.total as f64
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    /// k in f(x) = a·x^(−k).
    pub exponent: f64,
    /// a in f(x) = a·x^(−k).
    pub prefactor: f64,
    pub r_squared: f64,
    pub points: usize,
    /// All counts equal: the line is flat and R² is reported as 1.
    pub degenerate: bool,
}

/// Least-squares line through `(ln x, ln count)` for every positive
/// persistence value with a nonzero count.
pub fn fit_power_law(h: &PersistenceHistogram) -> Result<PowerLawFit> {
    let points: Vec<(f64, f64)> = h
        .counts
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(&p, &c)| (p as f64, c as f64))
        .collect();
    fit_power_law_points(&points)
}

/// Same as [`fit_power_law`] on explicit `(x, y)` pairs with `x, y > 0`.
pub fn fit_power_law_points(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least 2 distinct persistence values, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Fit("log-log fit needs positive coordinates".into()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all persistence values are equal".into()));
    }
    let degenerate = points.iter().all(|p| p.1 == points[0].1);
    let slope = if degenerate { 0.0 } else { sxy / sxx };
    let intercept = if degenerate { ys[0] } else { my - slope * mx };
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if degenerate {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(PowerLawFit {
        exponent: 0.0 - slope,
        prefactor: intercept.exp(),
        r_squared,
        points: points.len(),
        degenerate,
    })
}

/// Divides each per-size value by the size-2 value. `None` entries stay
/// `None` (reported as "-").
pub fn relative_by_size(values: &[Option<f64>]) -> Result<Vec<Option<f64>>> {
    match values.first().copied().flatten() {
        Some(base) if base != 0.0 && base.is_finite() => {
            Ok(values.iter().map(|v| v.map(|x| x / base)).collect())
        }
        _ => Err(Error::Undefined(
            "size-2 reference value is missing or zero".into(),
        )),
    }
}

/// Sample Pearson correlation coefficient.
pub fn pearson_cc(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Undefined(format!(
            "correlation needs two equal-length samples of at least 2 values ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined(
            "correlation with a constant variable".into(),
        ));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Normalizer of mutual information.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NmiNorm {
    /// sqrt(H(X)·H(Y))
    #[default]
    Sqrt,
    /// min(H(X), H(Y))
    Min,
    /// (H(X) + H(Y)) / 2
    Mean,
}

impl FromStr for NmiNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt" => Ok(Self::Sqrt),
            "min" => Ok(Self::Min),
            "mean" => Ok(Self::Mean),
            other => Err(Error::Config(format!(
                "unknown NMI normalization {other:?} (expected sqrt, min or mean)"
            ))),
        }
    }
}

pub const DEFAULT_NMI_BINS: usize = 20;

/// Discrete labels for `values`: the distinct values themselves when there
/// are at most `bins` of them, otherwise equal-frequency bins over ranks.
/// Tied values always share a label.
pub fn discretize(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut labels = vec![0usize; n];
    let mut distinct = 0usize;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && values[order[j]].total_cmp(&values[order[i]]).is_eq() {
            j += 1;
        }
        for &o in &order[i..j] {
            // provisional: rank of the first tied element
            labels[o] = i;
        }
        distinct += 1;
        i = j;
    }
    if distinct <= bins.max(1) {
        // relabel ranks to 0..distinct
        let mut firsts: Vec<usize> = labels.clone();
        firsts.sort_unstable();
        firsts.dedup();
        labels
            .iter()
            .map(|r| firsts.binary_search(r).unwrap())
            .collect()
    } else {
        labels.iter().map(|&r| r * bins / n).collect()
    }
}

fn entropy_of_labels(labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information between two samples in `[0, 1]`; zero when
/// either variable has zero entropy after discretization.
pub fn normalized_mi(x: &[f64], y: &[f64], bins: usize, norm: NmiNorm) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Undefined(format!(
            "mutual information needs two equal-length samples of at least 2 values ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let lx = discretize(x, bins);
    let ly = discretize(y, bins);
    let hx = entropy_of_labels(&lx);
    let hy = entropy_of_labels(&ly);
    if hx <= 0.0 || hy <= 0.0 {
        return Ok(0.0);
    }
    let n = x.len() as f64;
    let mut joint: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for (&a, &b) in lx.iter().zip(&ly) {
        *joint.entry((a, b)).or_default() += 1;
    }
    let hxy: f64 = joint
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    let mi = (hx + hy - hxy).max(0.0);
    let denom = match norm {
        NmiNorm::Sqrt => (hx * hy).sqrt(),
        NmiNorm::Min => hx.min(hy),
        NmiNorm::Mean => 0.5 * (hx + hy),
    };
    Ok((mi / denom).clamp(0.0, 1.0))
}
