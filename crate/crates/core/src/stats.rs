//! Sample statistics shared by the estimators and checks.

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; `None` with fewer than two samples.
pub fn sample_variance(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs);
    Some(xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64)
}

/// Standard error of the mean, `s / sqrt(N)`.
pub fn standard_error(xs: &[f64]) -> Option<f64> {
    sample_variance(xs).map(|v| (v / xs.len() as f64).sqrt())
}

/// Standard error of the sample variance, from the fourth central moment:
/// `sqrt((m4 - s^4 (N-3)/(N-1)) / N)`.
pub fn variance_standard_error(xs: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 4 {
        return None;
    }
    let m = mean(xs);
    let var = sample_variance(xs)?;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n as f64;
    let nf = n as f64;
    Some(((m4 - var * var * (nf - 3.0) / (nf - 1.0)).max(0.0) / nf).sqrt())
}

/// `|observed - expected| / stderr`, with `0/0` read as an exact match.
pub fn z_score(observed: f64, expected: f64, stderr: f64) -> f64 {
    let diff = (observed - expected).abs();
    if stderr > 0.0 {
        diff / stderr
    } else if diff <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((sample_variance(&xs).unwrap() - 5.0 / 3.0).abs() < 1e-15);
        assert!(sample_variance(&[1.0]).is_none());
    }

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 2.0, 4.0, 6.0];
        let y: Vec<f64> = x.iter().map(|v| 7.0 - v).collect();
        let (slope, intercept) = linear_fit(&x, &y);
        assert!((slope + 1.0).abs() < 1e-12);
        assert!((intercept - 7.0).abs() < 1e-12);
    }

    #[test]
    fn z_score_handles_zero_error() {
        assert_eq!(z_score(1.0, 1.0, 0.0), 0.0);
        assert!(z_score(1.0, 2.0, 0.0).is_infinite());
        assert_eq!(z_score(1.0, 2.0, 0.5), 2.0);
    }
}
