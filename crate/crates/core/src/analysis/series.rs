use nalgebra::DMatrix;

use crate::error::{HtmError, Result};
use crate::scalar::Real;

/// Pointwise mean and population standard deviation across repeats.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveStats<T> {
    pub mean: Vec<T>,
    pub std: Vec<T>,
    pub repeats: usize,
}

impl<T: Real> CurveStats<T> {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }
}

/// Mean of the last `min(window, t + 1)` values at every `t`.
pub fn moving_average<T: Real>(series: &[T], window: usize) -> Result<Vec<T>> {
    if window == 0 {
        return Err(HtmError::InvalidInput("moving-average window must be positive".into()));
    }
    let mut out = Vec::with_capacity(series.len());
    let mut sum = T::zero();
    for (t, &x) in series.iter().enumerate() {
        sum = sum + x;
        if t >= window {
            sum = sum - series[t - window];
        }
        // Recompute periodically so long runs do not accumulate drift.
        if t % 4096 == 4095 {
            sum = series[(t + 1).saturating_sub(window)..=t].iter().copied().sum();
        }
        out.push(sum / T::from_count((t + 1).min(window)));
    }
    Ok(out)
}

/// Least-squares polynomial smoothing over a sliding window. The first and
/// last `window_length / 2` points take the value of the polynomial fitted to
/// the first or last full window.
pub fn savgol_smooth<T: Real>(series: &[T], window_length: usize, poly_order: usize) -> Result<Vec<T>> {
    if window_length.is_multiple_of(2) || window_length <= poly_order {
        return Err(HtmError::InvalidInput(format!(
            "window length {window_length} must be odd and exceed order {poly_order}"
        )));
    }
    if series.len() < window_length {
        return Err(HtmError::InvalidInput(format!(
            "series of {} points is shorter than the window {window_length}",
            series.len()
        )));
    }
    let half = window_length / 2;
    let fit = fit_operator(window_length, poly_order)?;
    // weights(x)[i] = sum_j x^j * fit[j, i]: value at offset x of the
    // polynomial fitted to the window.
    let weights = |x: f64| -> Vec<f64> {
        (0..window_length)
            .map(|i| (0..=poly_order).map(|j| x.powi(j as i32) * fit[(j, i)]).sum())
            .collect()
    };
    let apply = |w: &[f64], start: usize| -> T {
        let v: f64 = w
            .iter()
            .zip(&series[start..start + window_length])
            .map(|(wi, &y)| wi * y.to_f64().unwrap_or(f64::NAN))
            .sum();
        T::lit(v)
    };

    let n = series.len();
    let center = weights(0.0);
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let value = if t < half {
            apply(&weights(t as f64 - half as f64), 0)
        } else if t + half >= n {
            apply(&weights((t + window_length - n) as f64 - half as f64), n - window_length)
        } else {
            apply(&center, t - half)
        };
        out.push(value);
    }
    Ok(out)
}

/// `(A^T A)^{-1} A^T` for the Vandermonde matrix on offsets `-half..=half`.
fn fit_operator(window_length: usize, poly_order: usize) -> Result<DMatrix<f64>> {
    let half = (window_length / 2) as f64;
    let a = DMatrix::from_fn(window_length, poly_order + 1, |i, j| (i as f64 - half).powi(j as i32));
    let at = a.transpose();
    let chol = (&at * &a)
        .cholesky()
        .ok_or_else(|| HtmError::InvalidInput("singular smoothing system".into()))?;
    Ok(chol.solve(&at))
}

/// Pointwise statistics across equally long series.
pub fn aggregate_repeats<T: Real>(series: &[Vec<T>]) -> Result<CurveStats<T>> {
    let Some(first) = series.first() else {
        return Err(HtmError::InvalidInput("no repeats to aggregate".into()));
    };
    let len = first.len();
    if let Some(bad) = series.iter().find(|s| s.len() != len) {
        return Err(HtmError::InvalidInput(format!(
            "series lengths differ ({} vs {len})",
            bad.len()
        )));
    }
    let r = T::from_count(series.len());
    let mut mean = Vec::with_capacity(len);
    let mut std = Vec::with_capacity(len);
    for t in 0..len {
        let m = series.iter().map(|s| s[t]).sum::<T>() / r;
        let var = series.iter().map(|s| (s[t] - m) * (s[t] - m)).sum::<T>() / r;
        mean.push(m);
        std.push(var.sqrt());
    }
    Ok(CurveStats {
        mean,
        std,
        repeats: series.len(),
    })
}
