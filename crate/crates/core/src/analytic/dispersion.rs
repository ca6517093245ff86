//! Linear Landau damping: dispersion relation, dominant root and residue.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;

use super::plasma_z::plasma_z;
use crate::error::{Error, Result};

/// Dominant root `ω = ω_r + iω_i` of `D(k, ω) = 0` with `ω_r > 0`.
///
/// `r` is the modulus of the residue `N / ∂_ω D` at the root. `φ` is the
/// phase of the mode written as `4αr e^{ω_i t} sin(kx) cos(ω_r t - φ)`;
/// summing the `±ω_r` pair for an initial `α cos(kx)` density perturbation
/// gives `φ = arg(N / ∂_ω D) + π/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRoot {
    pub k: f64,
    pub omega_r: f64,
    pub omega_i: f64,
    pub r: f64,
    pub phi: f64,
}

impl DispersionRoot {
    pub fn omega(&self) -> Complex64 {
        Complex64::new(self.omega_r, self.omega_i)
    }
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("wavenumber must be positive, got {k}")));
    }
    Ok(())
}

/// `Z`, `Z'`, `Z''` at `η = ω / (√2 k)`.
fn z_derivs(k: f64, omega: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
    let eta = omega / (SQRT_2 * k);
    let z = plasma_z(eta)?;
    let z1 = -2.0 * (1.0 + eta * z);
    let z2 = -2.0 * (z + eta * z1);
    Ok((z, z1, z2))
}

/// `D(k, ω) = 1 - Z'(ω / (√2 k)) / (2k²)`.
pub fn dispersion_d(k: f64, omega: Complex64) -> Result<Complex64> {
    check_k(k)?;
    let (_, z1, _) = z_derivs(k, omega)?;
    Ok(1.0 - z1 / (2.0 * k * k))
}

/// `∂D/∂ω = -Z''(η) / (2√2 k³)`.
pub fn dispersion_d_prime(k: f64, omega: Complex64) -> Result<Complex64> {
    check_k(k)?;
    let (_, _, z2) = z_derivs(k, omega)?;
    Ok(-z2 / (2.0 * SQRT_2 * k * k * k))
}

/// `N(k, ω) = i Z(ω / (√2 k)) / (2√2 k²)`.
pub fn dispersion_n(k: f64, omega: Complex64) -> Result<Complex64> {
    check_k(k)?;
    let (z, _, _) = z_derivs(k, omega)?;
    Ok(Complex64::new(0.0, 1.0) * z / (2.0 * SQRT_2 * k * k))
}

fn newton(k: f64, mut omega: Complex64) -> Result<Complex64> {
    for _ in 0..100 {
        let d = dispersion_d(k, omega)?;
        let dp = dispersion_d_prime(k, omega)?;
        if dp.norm() == 0.0 {
            break;
        }
        let step = d / dp;
        omega -= step;
        if !omega.re.is_finite() || !omega.im.is_finite() {
            break;
        }
        if step.norm() < 1e-15 * omega.norm().max(1.0) {
            let d = dispersion_d(k, omega)?;
            if d.norm() < 1e-10 {
                return Ok(omega);
            }
        }
    }
    Err(Error::NoConvergence(format!("Newton on D({k}, ω) from ω = {omega}")))
}

/// Coarse scan of `|D|` over a box in the lower half-plane, used as a
/// Newton restart when the Bohm-Gross guess fails.
fn scan_guess(k: f64) -> Option<Complex64> {
    let mut best: Option<(f64, Complex64)> = None;
    for a in 0..=80 {
        for b in 0..=60 {
            let w = Complex64::new(0.5 + a as f64 * 0.05, -(b as f64) * 0.025);
            if let Ok(d) = dispersion_d(k, w) {
                let m = d.norm();
                if best.is_none_or(|(bm, _)| m < bm) {
                    best = Some((m, w));
                }
            }
        }
    }
    best.map(|(_, w)| w)
}

/// Dominant (least damped) root with `ω_r > 0` and its residue.
pub fn solve_dominant_root(k: f64) -> Result<DispersionRoot> {
    check_k(k)?;
    let guess = Complex64::new((1.0 + 3.0 * k * k).sqrt(), -0.05);
    let omega = match newton(k, guess) {
        Ok(w) if w.re > 0.0 => w,
        _ => {
            let g = scan_guess(k).ok_or_else(|| Error::NoConvergence(format!("no root bracket for k = {k}")))?;
            newton(k, g)?
        }
    };
    let omega = if omega.re < 0.0 { -omega.conj() } else { omega };
    let res = residue(k, omega)?;
    let mut phi = res.arg() + FRAC_PI_2;
    if phi > PI {
        phi -= 2.0 * PI;
    }
    Ok(DispersionRoot {
        k,
        omega_r: omega.re,
        omega_i: omega.im,
        r: res.norm(),
        phi,
    })
}

/// Residue of `N / D` at a simple root of `D`.
pub fn residue(k: f64, omega: Complex64) -> Result<Complex64> {
    Ok(dispersion_n(k, omega)? / dispersion_d_prime(k, omega)?)
}

/// Dominant-mode field `4 α r e^{ω_i t} sin(kx) cos(ω_r t - φ)`.
pub fn landau_reference_e(x: f64, t: f64, root: &DispersionRoot, alpha: f64) -> f64 {
    4.0 * alpha * root.r * (root.omega_i * t).exp() * (root.k * x).sin() * (root.omega_r * t - root.phi).cos()
}

/// Rows `(k, ω_r, ω_i, r, φ)` for each requested wavenumber.
pub fn dispersion_table(ks: &[f64]) -> Result<Vec<DispersionRoot>> {
    ks.iter().map(|&k| solve_dominant_root(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoted_root_is_nearly_a_zero() {
        let d = dispersion_d(0.5, Complex64::new(1.4156, -0.1533)).unwrap();
        assert!(d.norm() < 1e-3);
    }

    #[test]
    fn conjugate_symmetry() {
        for &(wr, wi) in &[(1.2, -0.1), (0.8, -0.4), (2.0, -0.02)] {
            let w = Complex64::new(wr, wi);
            let a = dispersion_d(0.4, -w.conj()).unwrap();
            let b = dispersion_d(0.4, w).unwrap().conj();
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let w = Complex64::new(1.3, -0.2);
        let h = 1e-6;
        let fd = (dispersion_d(0.5, w + h).unwrap() - dispersion_d(0.5, w - h).unwrap()) / (2.0 * h);
        assert!((fd - dispersion_d_prime(0.5, w).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn k_half_root_and_residue() {
        let r = solve_dominant_root(0.5).unwrap();
        assert!(dispersion_d(0.5, r.omega()).unwrap().norm() < 1e-10);
        // quoted digits are truncated, not rounded
        let trunc4 = |v: f64| (v * 1e4).trunc() / 1e4;
        assert_eq!(trunc4(r.omega_r), 1.4156);
        assert_eq!(trunc4(r.omega_i), -0.1533);
        assert_eq!(trunc4(r.r), 0.3677);
        assert!((r.phi - 0.536_245_0).abs() < 5e-8);
    }

    #[test]
    fn residue_matches_contour_integral() {
        // (1 / 2πi) ∮ N / D dω on a small circle around the root
        let r = solve_dominant_root(0.5).unwrap();
        let w0 = r.omega();
        let rad = 0.05;
        let n = 2000;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let th = 2.0 * PI * j as f64 / n as f64;
            let e = Complex64::from_polar(1.0, th);
            let w = w0 + e * rad;
            let f = dispersion_n(0.5, w).unwrap() / dispersion_d(0.5, w).unwrap();
            acc += f * e * rad * Complex64::new(0.0, 2.0 * PI / n as f64);
        }
        let res = acc / Complex64::new(0.0, 2.0 * PI);
        assert!((res - residue(0.5, w0).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn smaller_k_damps_less() {
        let a = solve_dominant_root(0.4).unwrap();
        let b = solve_dominant_root(0.5).unwrap();
        assert!(dispersion_d(0.4, a.omega()).unwrap().norm() < 1e-10);
        assert!(a.omega_i.abs() < b.omega_i.abs());
        assert!(a.omega_r > 0.0 && a.r > 0.0);
    }

    #[test]
    fn rejects_bad_k() {
        assert!(solve_dominant_root(0.0).is_err());
        assert!(dispersion_d(-1.0, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn reference_field_values() {
        let r = solve_dominant_root(0.5).unwrap();
        let x = std::f64::consts::PI; // kx = π/2
        let e = landau_reference_e(x, 0.0, &r, 0.001);
        assert!((e - 4.0 * 0.001 * r.r * r.phi.cos()).abs() < 1e-15);
        assert!((e - 0.0012644).abs() < 1e-7);
        for t in [0.0, 1.0, 7.3] {
            assert_eq!(landau_reference_e(0.0, t, &r, 0.001), 0.0);
        }
    }
}
