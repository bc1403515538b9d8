//! Sample statistics used by the validation routines.

use alloc::vec::Vec;

/// Critical-value coefficient of the one-sample KS test at α = 0.01.
pub const KS_COEFF_ALPHA_01: f64 = 1.63;

/// One-sample Kolmogorov–Smirnov statistic sup |F_n − F|.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |sup: f64, (i, &x)| {
        let f = cdf(x);
        let lo = f - i as f64 / n;
        let hi = (i + 1) as f64 / n - f;
        sup.max(lo).max(hi)
    })
}

/// Asymptotic α = 0.01 critical value 1.63/√n.
pub fn ks_critical_value(n: usize) -> f64 {
    KS_COEFF_ALPHA_01 / (n as f64).sqrt()
}

/// Sample mean, unbiased variance and the fourth central moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub fourth_central: f64,
}

impl Moments {
    pub fn of(samples: &[f64]) -> Self {
        let count = samples.len();
        let n = count as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let (m2, m4) = samples.iter().fold((0.0, 0.0), |(m2, m4), &x| {
            let d = x - mean;
            let d2 = d * d;
            (m2 + d2, m4 + d2 * d2)
        });
        Moments {
            count,
            mean,
            variance: if count > 1 { m2 / (n - 1.0) } else { 0.0 },
            fourth_central: m4 / n,
        }
    }

    /// Standard error of the mean.
    pub fn mean_stderr(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }

    /// Large-sample standard error of the sample variance, sqrt((m4 − s⁴)/n).
    pub fn variance_stderr(&self) -> f64 {
        ((self.fourth_central - self.variance * self.variance).max(0.0) / self.count as f64).sqrt()
    }
}

/// Monte Carlo estimate of a probability from `successes` out of `trials`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionEstimate {
    pub successes: u64,
    pub trials: u64,
}

impl ProportionEstimate {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Binomial standard error sqrt(p(1−p)/n).
    pub fn stderr(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Least-squares slope and intercept of `y` on `x`; `None` with fewer than two
/// distinct abscissae.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let (sxx, sxy) = x[..n].iter().zip(&y[..n]).fold((0.0, 0.0), |(sxx, sxy), (&a, &b)| {
        (sxx + (a - mx) * (a - mx), sxy + (a - mx) * (b - my))
    });
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
