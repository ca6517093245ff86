//! Faddeeva function `w(z) = exp(-z²) erfc(-iz)` and the plasma dispersion
//! function `Z(η) = i√π w(η)`.
//!
//! The first-quadrant evaluation follows Poppe and Wijers (ACM TOMS 680):
//! a Taylor series for small `|z|` and a Laplace continued fraction, with an
//! optional Taylor tail, elsewhere. The other quadrants use
//! `w(-conj z) = conj w(z)` and `w(-z) = 2 exp(-z²) - w(z)`.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest `Re(-z²)` for which `exp(-z²)` stays finite.
const MAX_EXP: f64 = 708.0;

/// `w(z)` for `Re z >= 0`, `Im z >= 0`.
fn faddeeva_first_quadrant(x: f64, y: f64) -> Complex64 {
    let xs = x / 6.3;
    let ys = y / 4.4;
    let mut qrho = xs * xs + ys * ys;
    let xquad = x * x - y * y;
    let yquad = 2.0 * x * y;

    if qrho < 0.085264 {
        // power series of exp(-z²) erfc(-iz) around the origin
        let q = (1.0 - 0.85 * ys) * qrho.sqrt();
        let n = (6.0 + 72.0 * q).round() as i64;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let xaux = (xsum * xquad - ysum * yquad) / i as f64;
            ysum = (xsum * yquad + ysum * xquad) / i as f64;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -FRAC_2_SQRT_PI * (xsum * y + ysum * x) + 1.0;
        let v1 = FRAC_2_SQRT_PI * (xsum * x - ysum * y);
        let daux = (-xquad).exp();
        let u2 = daux * yquad.cos();
        let v2 = -daux * yquad.sin();
        return Complex64::new(u1 * u2 - v1 * v2, u1 * v2 + v1 * u2);
    }

    let (h, kapn, nu) = if qrho > 1.0 {
        qrho = qrho.sqrt();
        (0.0, 0i64, (3.0 + 1442.0 / (26.0 * qrho + 77.0)) as i64)
    } else {
        qrho = (1.0 - ys) * (1.0 - qrho).sqrt();
        (1.88 * qrho, (7.0 + 34.0 * qrho).round() as i64, (16.0 + 26.0 * qrho).round() as i64)
    };
    let h2 = 2.0 * h;
    let tail = h > 0.0;
    let mut qlambda = if tail { h2.powi(kapn as i32) } else { 0.0 };
    let (mut rx, mut ry, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
    for n in (0..=nu).rev() {
        let np1 = (n + 1) as f64;
        let tx = y + h + np1 * rx;
        let ty = x - np1 * ry;
        let c = 0.5 / (tx * tx + ty * ty);
        rx = c * tx;
        ry = c * ty;
        if tail && n <= kapn {
            let tx = qlambda + sx;
            sx = rx * tx - ry * sy;
            sy = ry * tx + rx * sy;
            qlambda /= h2;
        }
    }
    let (mut u, v) = if tail {
        (FRAC_2_SQRT_PI * sx, FRAC_2_SQRT_PI * sy)
    } else {
        (FRAC_2_SQRT_PI * rx, FRAC_2_SQRT_PI * ry)
    };
    if y == 0.0 {
        u = (-x * x).exp();
    }
    Complex64::new(u, v)
}

/// Faddeeva function on the whole plane; errors where `exp(-z²)` overflows.
pub fn faddeeva(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite("Faddeeva argument"));
    }
    let upper = |x: f64, y: f64| {
        let w = faddeeva_first_quadrant(x.abs(), y);
        if x < 0.0 {
            w.conj()
        } else {
            w
        }
    };
    if z.im >= 0.0 {
        return Ok(upper(z.re, z.im));
    }
    let mz2 = -z * z;
    if mz2.re > MAX_EXP {
        return Err(Error::Overflow("Faddeeva function in the lower half-plane"));
    }
    Ok(mz2.exp() * 2.0 - upper(-z.re, -z.im))
}

/// Fried-Conte plasma dispersion function.
pub fn plasma_z(eta: Complex64) -> Result<Complex64> {
    Ok(Complex64::new(0.0, PI.sqrt()) * faddeeva(eta)?)
}

/// `Z'(η) = -2 (1 + η Z(η))`.
pub fn plasma_z_prime(eta: Complex64) -> Result<Complex64> {
    let z = plasma_z(eta)?;
    Ok(-2.0 * (1.0 + eta * z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `w(z) = (i/π) ∫ exp(-t²) / (z - t) dt` for `Im z > 0`, by the trapezoid rule.
    fn w_quadrature(z: Complex64) -> Complex64 {
        let h = 2e-3;
        let n = (12.0 / h) as i64;
        let mut s = c(0.0, 0.0);
        for i in -n..=n {
            let t = i as f64 * h;
            s += (-t * t).exp() / (z - t);
        }
        c(0.0, 1.0 / PI) * s * h
    }

    #[test]
    fn z_at_origin() {
        let z = plasma_z(c(0.0, 0.0)).unwrap();
        assert!(z.re.abs() < 1e-15);
        assert!((z.im - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn w_on_imaginary_axis() {
        // w(i) = e erfc(1)
        let w = faddeeva(c(0.0, 1.0)).unwrap();
        assert!((w.re - 0.427_583_576_155_807).abs() < 1e-14);
        assert!(w.im.abs() < 1e-15);
    }

    #[test]
    fn matches_quadrature_in_upper_half_plane() {
        for &(x, y) in &[
            (0.3, 0.8),
            (1.5, 0.5),
            (-2.0, 1.2),
            (4.0, 0.6),
            (0.05, 3.0),
            (-6.0, 2.0),
            (2.5, 0.3),
        ] {
            let z = c(x, y);
            let a = faddeeva(z).unwrap();
            let b = w_quadrature(z);
            assert!((a - b).norm() < 1e-10 * b.norm().max(1e-3), "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn reflection_formulas() {
        for &(x, y) in &[(0.7, 0.4), (2.0, 1.5), (0.1, 0.05)] {
            let z = c(x, y);
            let w = faddeeva(z).unwrap();
            let wm = faddeeva(c(-x, y)).unwrap();
            assert!((wm - w.conj()).norm() < 1e-14);
            let lower = faddeeva(-z).unwrap();
            let expect = (-z * z).exp() * 2.0 - w;
            assert!((lower - expect).norm() < 1e-13 * expect.norm());
        }
    }

    #[test]
    fn derivative_identity_in_strip() {
        // deterministic pseudo-random points in |Re| <= 6, |Im| <= 10
        let mut s = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let eta = c(12.0 * next() - 6.0, 20.0 * next() - 10.0);
            let h = 1e-5;
            let fd = (plasma_z(eta + h).unwrap() - plasma_z(eta - h).unwrap()) / (2.0 * h);
            let exact = plasma_z_prime(eta).unwrap();
            assert!((fd - exact).norm() < 1e-7 * exact.norm().max(1.0), "{eta}: {fd} vs {exact}");
        }
    }

    #[test]
    fn large_real_argument_asymptote() {
        let eta = c(50.0, 0.0);
        let z = plasma_z(eta).unwrap();
        let asym = -1.0 / eta;
        assert!((z - asym).norm() / asym.norm() < 1e-3);
    }

    #[test]
    fn overflow_is_an_error() {
        assert!(matches!(faddeeva(c(0.0, -40.0)), Err(Error::Overflow(_))));
        assert!(faddeeva(c(f64::NAN, 0.0)).is_err());
    }
}
