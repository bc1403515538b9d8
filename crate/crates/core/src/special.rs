//! Scalar special functions: standard normal cdf in linear and log space,
//! the Mills ratio, the scaled exponential integral and the reciprocal gamma
//! series used by the Bessel routines.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

/// ln(sqrt(2 pi))
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Standard normal density.
pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

/// Standard normal cdf Φ(z).
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Upper tail 1 − Φ(z), without cancellation for large z.
pub fn norm_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// ln Φ(z), finite for every finite z.
pub fn norm_logcdf(z: f64) -> f64 {
    if z < -5.0 {
        let x = -z;
        -0.5 * x * x - LN_SQRT_2PI + mills_ratio(x).ln()
    } else if z > 5.0 {
        (-norm_sf(z)).ln_1p()
    } else {
        norm_cdf(z).ln()
    }
}

/// ln(1 − Φ(z)).
pub fn norm_logsf(z: f64) -> f64 {
    norm_logcdf(-z)
}

/// Mills ratio R(x) = (1 − Φ(x)) / φ(x).
///
/// Direct ratio below x = 5; above it a Lentz evaluation of the continued
/// fraction 1/(x + 1/(x + 2/(x + 3/(x + ...)))).
pub fn mills_ratio(x: f64) -> f64 {
    if x < 5.0 {
        return norm_sf(x) / norm_pdf(x);
    }
    if x.is_infinite() {
        return 0.0;
    }
    const TINY: f64 = 1e-300;
    // f = b0 + a1/(b1 + a2/(b2 + ...)) with b_k = x, a_k = k, then R = 1/f.
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// e^x · E₁(x) for x > 0, where E₁ is the exponential integral.
pub fn exp_e1(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x <= 1.0 {
        // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            let kf = k as f64;
            term *= -x / kf;
            let add = term / kf;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        (-EULER_GAMMA - x.ln() - sum) * x.exp()
    } else {
        // Modified Lentz on the even contraction of the continued fraction.
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h
    }
}

// Coefficients of 1/Γ(z) = Σ_{k≥1} c_k z^k (Abramowitz & Stegun 6.1.34).
const RECIP_GAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// Temme's auxiliary gamma quantities for |x| ≤ 1/2:
/// `(gam1, gam2, 1/Γ(1+x), 1/Γ(1−x))` with
/// gam1 = (1/Γ(1−x) − 1/Γ(1+x)) / (2x) and gam2 = (1/Γ(1−x) + 1/Γ(1+x)) / 2.
pub(crate) fn temme_gammas(x: f64) -> (f64, f64, f64, f64) {
    // 1/Γ(1+x) = Σ c_k x^{k-1}; split into even and odd powers of x.
    let x2 = x * x;
    let mut even = 0.0; // c1 + c3 x^2 + c5 x^4 + ...
    let mut odd = 0.0; // c2 + c4 x^2 + ...
    let mut i = RECIP_GAMMA.len();
    while i > 0 {
        i -= 1;
        if i.is_multiple_of(2) {
            even = even * x2 + RECIP_GAMMA[i];
        } else {
            odd = odd * x2 + RECIP_GAMMA[i];
        }
    }
    let gam1 = -odd;
    let gam2 = even;
    let gampl = gam2 - x * gam1;
    let gammi = gam2 + x * gam1;
    (gam1, gam2, gampl, gammi)
}

/// sqrt(pi / (2 z)), the common prefactor of half-integer Bessel K.
pub(crate) fn half_order_prefactor(z: f64) -> f64 {
    (PI / (2.0 * z)).sqrt()
}
