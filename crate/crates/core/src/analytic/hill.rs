//! Envelope of Hill's equation `x'' + a(t) x = 0`.
//!
//! Writing a solution as `ω e^{iψ}` gives `ω'' + a ω - 1/ω³ = 0` and
//! `ψ' = 1/ω²`. For an even, `2π`-periodic `a`, the envelope started at rest
//! is periodic exactly when `ω'(π) = 0`; [`periodic_omega0`] shoots on `ω(0)`
//! to find it.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `a(t) = a0 + a1 cos t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillCoefficient {
    pub a0: f64,
    pub a1: f64,
}

impl HillCoefficient {
    pub fn new(a0: f64, a1: f64) -> Result<Self> {
        if !(a0 > 0.0) || !(a1.abs() < a0) {
            return Err(Error::InvalidArgument(format!("need a0 > |a1| >= 0, got a0 = {a0}, a1 = {a1}")));
        }
        Ok(Self { a0, a1 })
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.a0 + self.a1 * t.cos()
    }
}

impl Default for HillCoefficient {
    fn default() -> Self {
        Self { a0: 0.5, a1: 0.2 }
    }
}

#[derive(Debug, Clone)]
pub struct HillEnvelope {
    pub dt_ref: f64,
    pub t: Vec<f64>,
    pub omega: Vec<f64>,
    pub psi: Vec<f64>,
}

impl HillEnvelope {
    /// Linear interpolation of `ω` between stored samples.
    pub fn omega_at(&self, t: f64) -> f64 {
        let s = (t / self.dt_ref).clamp(0.0, (self.t.len() - 1) as f64);
        let i = (s.floor() as usize).min(self.t.len() - 2);
        let f = s - i as f64;
        self.omega[i] * (1.0 - f) + self.omega[i + 1] * f
    }
}

/// State `(ω, ω', ψ)`.
type State = [f64; 3];

fn rhs(a: &dyn Fn(f64) -> f64, t: f64, s: &State) -> Result<State> {
    if !(s[0] > 0.0) || !s[0].is_finite() {
        return Err(Error::NoConvergence(format!("envelope collapsed (ω = {}) at t = {t}", s[0])));
    }
    let w = s[0];
    Ok([s[1], -a(t) * w + 1.0 / (w * w * w), 1.0 / (w * w)])
}

fn rk4_step(a: &dyn Fn(f64) -> f64, t: f64, s: &State, h: f64) -> Result<State> {
    let add = |s: &State, k: &State, c: f64| [s[0] + c * k[0], s[1] + c * k[1], s[2] + c * k[2]];
    let k1 = rhs(a, t, s)?;
    let k2 = rhs(a, t + 0.5 * h, &add(s, &k1, 0.5 * h))?;
    let k3 = rhs(a, t + 0.5 * h, &add(s, &k2, 0.5 * h))?;
    let k4 = rhs(a, t + h, &add(s, &k3, h))?;
    Ok([
        s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        s[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ])
}

/// Integrates the envelope from `ω(0) = omega0`, `ω'(0) = 0`, `ψ(0) = 0` with RK4.
pub fn hill_envelope(a: &dyn Fn(f64) -> f64, omega0: f64, t_end: f64, dt_ref: f64) -> Result<HillEnvelope> {
    if !(dt_ref > 0.0) || !(t_end >= 0.0) || !(omega0 > 0.0) {
        return Err(Error::InvalidArgument("need dt_ref > 0, t_end >= 0, omega0 > 0".into()));
    }
    let steps = (t_end / dt_ref).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let h = if h > 0.0 { h } else { dt_ref };
    let mut s = [omega0, 0.0, 0.0];
    let mut env = HillEnvelope {
        dt_ref: h,
        t: vec![0.0],
        omega: vec![omega0],
        psi: vec![0.0],
    };
    for n in 0..steps {
        s = rk4_step(a, n as f64 * h, &s, h)?;
        env.t.push((n + 1) as f64 * h);
        env.omega.push(s[0]);
        env.psi.push(s[2]);
    }
    Ok(env)
}

fn slope_at_half_period(a: &dyn Fn(f64) -> f64, omega0: f64, dt_ref: f64) -> Result<f64> {
    let steps = (PI / dt_ref).ceil() as usize;
    let h = PI / steps as f64;
    let mut s = [omega0, 0.0, 0.0];
    for n in 0..steps {
        s = rk4_step(a, n as f64 * h, &s, h)?;
    }
    Ok(s[1])
}

/// `ω(0)` of the `2π`-periodic envelope for an even coefficient `a`.
pub fn periodic_omega0(a: &dyn Fn(f64) -> f64, dt_ref: f64) -> Result<f64> {
    // the matched envelope lies between the extreme frozen-coefficient values
    let (mut amin, mut amax) = (f64::INFINITY, 0.0f64);
    for i in 0..=256 {
        let v = a(2.0 * PI * i as f64 / 256.0);
        if !(v > 0.0) {
            return Err(Error::InvalidArgument("coefficient must stay positive".into()));
        }
        amin = amin.min(v);
        amax = amax.max(v);
    }
    let lo0 = 0.5 * amax.powf(-0.25);
    let hi0 = 2.0 * amin.powf(-0.25);
    let n = 200;
    let mut prev = (lo0, slope_at_half_period(a, lo0, dt_ref)?);
    for i in 1..=n {
        let w = lo0 + (hi0 - lo0) * i as f64 / n as f64;
        let g = slope_at_half_period(a, w, dt_ref)?;
        if g == 0.0 {
            return Ok(w);
        }
        if g.signum() != prev.1.signum() {
            let (mut lo, mut glo, mut hi) = (prev.0, prev.1, w);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let gm = slope_at_half_period(a, mid, dt_ref)?;
                if gm.signum() == glo.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 * hi {
                    break;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = (w, g);
    }
    Err(Error::NoConvergence("no periodic envelope found".into()))
}

/// `x_rms` of `A exp(-x²/(2ω²) - ω² v²/2)` transported by the flow:
/// `∫x² f = 2π A ω²`, so `x_rms = ω √(2π A)`.
pub fn hill_reference_xrms(env: &HillEnvelope, amplitude: f64) -> Vec<f64> {
    let c = (2.0 * PI * amplitude).sqrt();
    env.omega.iter().map(|w| w * c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_coefficient_fixed_point() {
        let env = hill_envelope(&|_| 1.0, 1.0, 10.0, 1e-3).unwrap();
        for (i, w) in env.omega.iter().enumerate() {
            assert!((w - 1.0).abs() < 1e-13);
            assert!((env.psi[i] - env.t[i]).abs() < 1e-11);
        }
    }

    #[test]
    fn periodic_envelope_returns() {
        let a = HillCoefficient::default();
        let f = |t: f64| a.eval(t);
        let w0 = periodic_omega0(&f, 1e-3).unwrap();
        let dt = 2.0 * PI * 1e-4;
        let env = hill_envelope(&f, w0, 2.0 * PI, dt).unwrap();
        let last = *env.omega.last().unwrap();
        assert!((last - w0).abs() < 1e-8, "{w0} -> {last}");
        assert!(env.omega.iter().all(|w| *w > 0.0));
        assert!(env.psi.windows(2).all(|p| p[1] > p[0]));
        let coarse = hill_envelope(&f, w0, 2.0 * PI, 2.0 * dt).unwrap();
        assert!((coarse.omega.last().unwrap() - last).abs() < 1e-10);
    }

    #[test]
    fn reference_xrms_scale() {
        let env = hill_envelope(&|_| 1.0, 1.0, 1.0, 0.1).unwrap();
        let x = hill_reference_xrms(&env, 1.0);
        assert!((x[0] - (2.0 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn invalid_inputs() {
        assert!(HillCoefficient::new(0.2, 0.3).is_err());
        assert!(hill_envelope(&|_| 1.0, -1.0, 1.0, 0.1).is_err());
        assert!(hill_envelope(&|_| 1e6, 1.0, 10.0, 0.5).is_err());
    }
}
