//! Modified Bessel function of the third kind, K_ν(z), for real order and
//! positive argument, together with its derivative in the order.
//!
//! The scaled forms e^z·K_ν(z) are the primitives; ratios of K at one
//! argument (all the entropy formulas need) stay finite even where K itself
//! underflows.

use crate::error::{Error, Result};
use crate::special::{exp_e1, half_order_prefactor, temme_gammas};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 100_000;
/// Step in the order for the Richardson-extrapolated central difference.
const ORDER_STEP: f64 = 1e-3;

/// e^z · K_ν(z).
///
/// Temme's series for z ≤ 2, Steed's continued fraction above, then forward
/// recurrence in the order. K is even in ν, so |ν| is used.
pub fn k_scaled(order: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain("Bessel K requires a finite argument z > 0"));
    }
    if !order.is_finite() {
        return Err(Error::Domain("Bessel K requires a finite order"));
    }
    let nu = order.abs();
    let nl = (nu + 0.5).floor() as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / z;
    let xi2 = 2.0 * xi;

    let (mut rkmu, mut rk1) = if z < 2.0 {
        let x2 = 0.5 * z;
        let pimu = core::f64::consts::PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= dd / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Domain("Bessel K series did not converge"));
        }
        let scale = z.exp();
        (sum * scale, sum1 * xi2 * scale)
    } else {
        let mut b = 2.0 * (1.0 + z);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Domain("Bessel K continued fraction did not converge"));
        }
        let h = a1 * h;
        let rkmu = half_order_prefactor(z) / s;
        (rkmu, rkmu * (xmu + z + 0.5 - h) * xi)
    };

    for i in 1..=nl {
        let next = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = next;
    }
    if !rkmu.is_finite() {
        return Err(Error::Domain("Bessel K overflow (argument too close to 0)"));
    }
    Ok(rkmu)
}

/// K_ν(z).
pub fn k(order: f64, z: f64) -> Result<f64> {
    let value = k_scaled(order, z)? * (-z).exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain("Bessel K overflow (argument too close to 0)"))
    }
}

/// e^z · ∂K_ν(z)/∂ν.
///
/// At ν = ±1/2 this is the closed form ±sqrt(π/2z)·e^{2z}E₁(2z); elsewhere a
/// Richardson-extrapolated central difference in the order.
pub fn k_dorder_scaled(order: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain("Bessel K requires a finite argument z > 0"));
    }
    if (order.abs() - 0.5).abs() == 0.0 {
        let half = half_order_prefactor(z) * exp_e1(2.0 * z);
        return Ok(if order > 0.0 { half } else { -half });
    }
    let central = |h: f64| -> Result<f64> { Ok((k_scaled(order + h, z)? - k_scaled(order - h, z)?) / (2.0 * h)) };
    let coarse = central(ORDER_STEP)?;
    let fine = central(0.5 * ORDER_STEP)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// ∂K_ν(z)/∂ν at ν = `order`.
pub fn k_dorder(order: f64, z: f64) -> Result<f64> {
    let value = k_dorder_scaled(order, z)? * (-z).exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain("Bessel K order derivative overflow"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn half_integer_closed_forms() {
        for &z in &[0.5, 1.0, 5.0, 0.01, 1.999, 2.001, 40.0] {
            let k_half = half_order_prefactor(z) * (-z).exp();
            assert!(rel(k(-0.5, z).unwrap(), k_half) < 1e-10, "z={z}");
            assert!(rel(k(0.5, z).unwrap(), k_half) < 1e-10);
            // K_{3/2}(z) = K_{1/2}(z) (1 + 1/z)
            assert!(rel(k(1.5, z).unwrap(), k_half * (1.0 + 1.0 / z)) < 1e-10);
            assert!(rel(k(-1.5, z).unwrap(), k_half * (1.0 + 1.0 / z)) < 1e-10);
        }
    }

    #[test]
    fn integer_order_reference_values() {
        // K0(1), K1(1), K0(3), K2(0.5)
        assert!(rel(k(0.0, 1.0).unwrap(), 0.421_024_438_240_708_3) < 1e-13);
        assert!(rel(k(1.0, 1.0).unwrap(), 0.601_907_230_197_234_6) < 1e-13);
        assert!(rel(k(0.0, 3.0).unwrap(), 0.034_739_504_386_279_2) < 1e-12);
        assert!(rel(k(2.0, 0.5).unwrap(), 7.550_183_551_240_869) < 1e-13);
    }

    #[test]
    fn agrees_with_integral_representation() {
        // K_ν(z) = ∫_0^∞ exp(-z cosh t) cosh(ν t) dt
        for &(nu, z) in &[
            (0.3_f64, 0.7_f64),
            (2.0, 1.5),
            (0.7, 2.0),
            (1.3, 3.3),
            (4.25, 0.9),
            (0.0, 10.0),
        ] {
            let upper = ((200.0 + 10.0 * nu) / z).ln() + 2.0;
            let integral = quad::integrate(
                |t: f64| (-z * t.cosh()).exp() * (nu * t).cosh(),
                0.0,
                upper,
                1e-15,
                1e-13,
            )
            .unwrap();
            assert!(rel(k(nu, z).unwrap(), integral.value) < 1e-11, "nu={nu} z={z}");
        }
    }

    #[test]
    fn scaled_form_survives_large_arguments() {
        let z = 1e6;
        let s = k_scaled(0.5, z).unwrap();
        assert!(rel(s, half_order_prefactor(z)) < 1e-12);
        assert_eq!(k(0.5, z).unwrap(), 0.0);
    }

    #[test]
    fn order_derivative_is_odd_in_order() {
        for &z in &[0.3, 1.0, 4.0] {
            let plus = k_dorder(0.5, z).unwrap();
            let minus = k_dorder(-0.5, z).unwrap();
            assert_eq!(plus, -minus);
            assert!(k_dorder(0.0, z).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn general_derivative_matches_half_order_closed_form() {
        // the finite-difference path evaluated just off ±1/2 must be continuous with it
        for &z in &[0.5, 1.0, 3.0] {
            let closed = k_dorder(-0.5, z).unwrap();
            let nearby = k_dorder(-0.5 + 1e-9, z).unwrap();
            assert!(rel(nearby, closed) < 1e-6, "z={z}");
        }
    }

    #[test]
    fn rejects_non_positive_argument() {
        assert!(k(0.5, 0.0).is_err());
        assert!(k(0.5, -1.0).is_err());
        assert!(k_dorder(0.3, 0.0).is_err());
        assert!(k(30.0, 1e-300).is_err());
    }
}
