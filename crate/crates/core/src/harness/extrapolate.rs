//! Richardson-type extrapolation of finite sequences to their limit.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtrapolationModel {
    /// `v(p) = c + A p^{-k}` as `p -> inf`, `k` fitted from the last three points.
    PowerInInverseParam,
    /// `v(h) = c + A h^2 + B h^4 + ...` as `h -> 0` (Romberg in `h^2`).
    PowerInParamSquared,
}

impl FromStr for ExtrapolationModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "power_in_inverse_param" | "inverse" => Ok(Self::PowerInInverseParam),
            "power_in_param_squared" | "squared" => Ok(Self::PowerInParamSquared),
            other => Err(Error::Config(format!("unknown extrapolation model `{other}`"))),
        }
    }
}

impl fmt::Display for ExtrapolationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PowerInInverseParam => "power_in_inverse_param",
            Self::PowerInParamSquared => "power_in_param_squared",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationResult {
    pub estimate: f64,
    /// Observed convergence order; `None` when the sequence is flat.
    pub order: Option<f64>,
    /// `value - estimate` at every input point.
    pub residuals: Vec<f64>,
    /// Largest spread between the extrapolants considered (pairwise, and
    /// for the inverse-power model also against the nearest integer order).
    pub confidence_width: f64,
    /// Differences failed to shrink monotonically.
    pub non_monotone: bool,
}

impl ExtrapolationResult {
    /// Gate used by the acceptance suite: `|estimate - truth| <= max(tol, 2 width)`
    /// and `width <= tol`.
    pub fn within(&self, truth: f64, tolerance: f64) -> bool {
        self.confidence_width <= tolerance
            && (self.estimate - truth).abs() <= tolerance.max(2.0 * self.confidence_width)
    }
}

/// Extrapolate `points = [(parameter, value)]` to the limit of the model.
///
/// Parameters must be strictly monotone: increasing for
/// `PowerInInverseParam`, decreasing for `PowerInParamSquared` (either order
/// is accepted and sorted towards the limit).
pub fn extrapolate(points: &[(f64, f64)], model: ExtrapolationModel) -> Result<ExtrapolationResult> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "extrapolation needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(p, v)| !p.is_finite() || !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite extrapolation input".into()));
    }
    let mut pts = points.to_vec();
    // order towards the limit
    match model {
        ExtrapolationModel::PowerInInverseParam => pts.sort_by(|a, b| a.0.total_cmp(&b.0)),
        ExtrapolationModel::PowerInParamSquared => pts.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs())),
    }
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidArgument("extrapolation parameters must be distinct".into()));
    }
    // h such that the error behaves like h^k with h -> 0
    let h: Vec<f64> = pts
        .iter()
        .map(|(p, _)| match model {
            ExtrapolationModel::PowerInInverseParam => 1.0 / p,
            ExtrapolationModel::PowerInParamSquared => p.abs(),
        })
        .collect();
    let v: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let m = v.len();
    let last = v[m - 1];
    let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    let diffs: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();

    if diffs.iter().all(|d| d.abs() <= 64.0 * f64::EPSILON * scale) {
        return Ok(finish(last, None, &v, 0.0, false));
    }

    let shrinking = diffs.windows(2).all(|d| d[1].abs() < d[0].abs());
    let same_sign = diffs.windows(2).all(|d| d[0] * d[1] > 0.0);
    if !(shrinking && same_sign) {
        let width = v.iter().map(|x| (x - last).abs()).fold(0.0, f64::max);
        let order = fitted_order(&h[m - 3..], &v[m - 3..]);
        return Ok(finish(last, order, &v, width, true));
    }

    let order = fitted_order(&h[m - 3..], &v[m - 3..]);
    match model {
        ExtrapolationModel::PowerInInverseParam => {
            let k = order.unwrap_or(1.0);
            // pairwise extrapolants with the fitted order
            let ext: Vec<f64> = (0..m - 1)
                .map(|i| richardson_pair(h[i], v[i], h[i + 1], v[i + 1], k))
                .collect();
            let tail = &ext[ext.len() - 2..];
            // with three points the fitted order makes the pairwise
            // extrapolants agree exactly, so also compare against the
            // nearest integer order
            let nominal = k.round().max(1.0);
            let alt = richardson_pair(h[m - 2], v[m - 2], h[m - 1], v[m - 1], nominal);
            let width = (tail[1] - tail[0]).abs().max((tail[1] - alt).abs());
            Ok(finish(tail[1], order, &v, width, false))
        }
        ExtrapolationModel::PowerInParamSquared => {
            // Neville table in x = h^2
            let x: Vec<f64> = h.iter().map(|h| h * h).collect();
            let mut columns = vec![v.clone()];
            for level in 1..m {
                let prev = columns.last().unwrap();
                let mut next = Vec::with_capacity(m - level);
                for i in 0..m - level {
                    let (xa, xb) = (x[i], x[i + level]);
                    next.push((xa * prev[i + 1] - xb * prev[i]) / (xa - xb));
                }
                columns.push(next);
            }
            let best = columns[m - 1][0];
            let second = *columns[m - 2].last().unwrap();
            let first = *columns[m - 2].first().unwrap();
            let width = (best - second).abs().max((best - first).abs()).max((first - second).abs());
            Ok(finish(best, order, &v, width, false))
        }
    }
}

/// Limit of `c + A h^k` through two points.
fn richardson_pair(h1: f64, v1: f64, h2: f64, v2: f64, k: f64) -> f64 {
    let (a, b) = (h1.powf(k), h2.powf(k));
    (a * v2 - b * v1) / (a - b)
}

/// Order `k` with `(v1 - v2)/(v2 - v3) = (h1^k - h2^k)/(h2^k - h3^k)`.
fn fitted_order(h: &[f64], v: &[f64]) -> Option<f64> {
    let target = (v[0] - v[1]) / (v[1] - v[2]);
    if !(target.is_finite() && target > 1.0) {
        return None;
    }
    let g = |k: f64| {
        let (a, b, c) = (h[0].powf(k), h[1].powf(k), h[2].powf(k));
        (a - b) / (b - c) - target
    };
    let (mut lo, mut hi) = (1e-3, 40.0);
    if g(lo) * g(hi) > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn finish(estimate: f64, order: Option<f64>, v: &[f64], width: f64, non_monotone: bool) -> ExtrapolationResult {
    ExtrapolationResult {
        estimate,
        order,
        residuals: v.iter().map(|x| x - estimate).collect(),
        confidence_width: width,
        non_monotone,
    }
}

/// Lagrange weights at `x = 0` for nodes `h_i^2`: the fieldwise Romberg limit
/// is `sum_i w_i f_i`.
pub fn romberg_weights(h: &[f64]) -> Result<Vec<f64>> {
    let x: Vec<f64> = h.iter().map(|h| h * h).collect();
    for i in 0..x.len() {
        for j in 0..i {
            if x[i] == x[j] {
                return Err(Error::InvalidArgument("Romberg nodes must be distinct".into()));
            }
        }
    }
    Ok((0..x.len())
        .map(|i| {
            (0..x.len())
                .filter(|&j| j != i)
                .map(|j| x[j] / (x[j] - x[i]))
                .product()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_in_h() {
        let pts: Vec<_> = [0.2, 0.1, 0.05].iter().map(|&h: &f64| (h, 1.0 + h * h)).collect();
        let r = extrapolate(&pts, ExtrapolationModel::PowerInParamSquared).unwrap();
        assert!((r.estimate - 1.0).abs() < 1e-10);
        assert!((r.order.unwrap() - 2.0).abs() < 0.01);
        assert!(!r.non_monotone);
    }

    #[test]
    fn inverse_power() {
        let pts: Vec<_> = [2.0, 4.0, 8.0].iter().map(|&l: &f64| (l, 0.7 + l.powf(-3.5))).collect();
        let r = extrapolate(&pts, ExtrapolationModel::PowerInInverseParam).unwrap();
        assert!((r.estimate - 0.7).abs() < 1e-10);
        assert!((r.order.unwrap() - 3.5).abs() < 0.2);
        assert!(r.confidence_width > 0.0 && r.confidence_width < 1e-3);
    }

    #[test]
    fn constant_sequence() {
        let r = extrapolate(&[(1.0, 3.0), (2.0, 3.0), (4.0, 3.0)], ExtrapolationModel::PowerInInverseParam).unwrap();
        assert_eq!(r.estimate, 3.0);
        assert!(r.order.is_none());
    }

    #[test]
    fn oscillating_sequence_is_flagged() {
        let r = extrapolate(&[(1.0, 1.0), (2.0, 2.0), (4.0, 1.5)], ExtrapolationModel::PowerInInverseParam).unwrap();
        assert!(r.non_monotone);
        assert!(r.confidence_width >= 0.5);
    }

    #[test]
    fn weights_reproduce_polynomials() {
        let h = [0.2, 0.1, 0.05];
        let w = romberg_weights(&h).unwrap();
        let f = |h: f64| 2.0 + 3.0 * h * h - h.powi(4);
        let s: f64 = w.iter().zip(h).map(|(w, h)| w * f(h)).sum();
        assert!((s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(extrapolate(&[(1.0, 1.0), (2.0, 2.0)], ExtrapolationModel::PowerInInverseParam).is_err());
    }
}
