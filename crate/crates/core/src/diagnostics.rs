//! Grid functionals and series analysis.
//!
//! Every quadrature is the rectangle rule over the stored nodes, weighted by
//! the cell sizes, so that conservation statements about node sums carry over
//! unchanged. Node arrays use the `[i * n2 + j]` layout.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spline::UniformGrid1D;

fn cell(g1: &UniformGrid1D, g2: &UniformGrid1D) -> f64 {
    g1.spacing() * g2.spacing()
}

fn n2(g2: &UniformGrid1D) -> usize {
    g2.node_count()
}

pub fn mass(f: &[f64], g1: &UniformGrid1D, g2: &UniformGrid1D) -> f64 {
    cell(g1, g2) * f.iter().sum::<f64>()
}

/// `(∫|f|^p)^{1/p}`; `p >= 1`.
pub fn lp_norm(f: &[f64], g1: &UniformGrid1D, g2: &UniformGrid1D, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p must be at least 1, got {p}")));
    }
    let s: f64 = if p == 1.0 {
        f.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        f.iter().map(|v| v * v).sum()
    } else {
        f.iter().map(|v| v.abs().powf(p)).sum()
    };
    Ok((cell(g1, g2) * s).powf(1.0 / p))
}

/// `∫ v f dx dv`.
pub fn momentum(f: &[f64], gx: &UniformGrid1D, gv: &UniformGrid1D) -> f64 {
    let nv = n2(gv);
    let v = gv.nodes();
    cell(gx, gv)
        * f.chunks(nv)
            .map(|row| row.iter().zip(&v).map(|(f, v)| f * v).sum::<f64>())
            .sum::<f64>()
}

/// `½ ∫ v² f dx dv`.
pub fn kinetic_energy(f: &[f64], gx: &UniformGrid1D, gv: &UniformGrid1D) -> f64 {
    let nv = n2(gv);
    let v = gv.nodes();
    0.5 * cell(gx, gv)
        * f.chunks(nv)
            .map(|row| row.iter().zip(&v).map(|(f, v)| f * v * v).sum::<f64>())
            .sum::<f64>()
}

/// `½ ∫ E² dx`.
pub fn electric_energy_1d(e: &[f64], gx: &UniformGrid1D) -> f64 {
    0.5 * gx.spacing() * e.iter().map(|v| v * v).sum::<f64>()
}

/// `½ ∫ v² f + ½ ∫ E²`.
pub fn total_energy_vp(f: &[f64], e: &[f64], gx: &UniformGrid1D, gv: &UniformGrid1D) -> f64 {
    kinetic_energy(f, gx, gv) + electric_energy_1d(e, gx)
}

/// Amplitudes `|Ê_m| / N` of the requested Fourier modes of a periodic sample.
pub fn fourier_mode_amps(e: &[f64], modes: &[usize]) -> Vec<f64> {
    let n = e.len() as f64;
    modes
        .iter()
        .map(|&m| {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, v) in e.iter().enumerate() {
                let th = 2.0 * PI * (m * i) as f64 / n;
                re += v * th.cos();
                im -= v * th.sin();
            }
            (re * re + im * im).sqrt() / n
        })
        .collect()
}

/// `sqrt(∫ x² f dx dv)`.
pub fn xrms(f: &[f64], gx: &UniformGrid1D, gv: &UniformGrid1D) -> f64 {
    let nv = n2(gv);
    let x = gx.nodes();
    let s: f64 = f.chunks(nv).zip(&x).map(|(row, x)| x * x * row.iter().sum::<f64>()).sum();
    (cell(gx, gv) * s).max(0.0).sqrt()
}

/// `F(v_j) = ∫ f(x, v_j) dx`.
pub fn integrated_fv(f: &[f64], gx: &UniformGrid1D, gv: &UniformGrid1D) -> Vec<f64> {
    let nv = n2(gv);
    let mut out = vec![0.0; nv];
    for row in f.chunks(nv) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v;
        }
    }
    for o in out.iter_mut() {
        *o *= gx.spacing();
    }
    out
}

/// `∫ ρ² dx dy`.
pub fn enstrophy(rho: &[f64], gx: &UniformGrid1D, gy: &UniformGrid1D) -> f64 {
    cell(gx, gy) * rho.iter().map(|v| v * v).sum::<f64>()
}

/// Strict local maxima of `y`, refined by a parabola through the three
/// samples around each one. When all three samples are positive the parabola
/// is fitted to `ln y`, which is exact for exponentially modulated peaks.
pub fn find_peaks(t: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if t.len() != y.len() || y.len() < 3 {
        return out;
    }
    for i in 1..y.len() - 1 {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            continue;
        }
        let h = t[i + 1] - t[i];
        let use_log = y[i - 1] > 0.0 && y[i] > 0.0 && y[i + 1] > 0.0;
        let (a, b, c) = if use_log {
            (y[i - 1].ln(), y[i].ln(), y[i + 1].ln())
        } else {
            (y[i - 1], y[i], y[i + 1])
        };
        let denom = a - 2.0 * b + c;
        let (dt, peak) = if denom < 0.0 {
            let s = 0.5 * (a - c) / denom;
            (s * h, b - 0.25 * (a - c) * s)
        } else {
            (0.0, b)
        };
        out.push((t[i] + dt, if use_log { peak.exp() } else { peak }));
    }
    out
}

/// Least-squares slope of `y` against `x`.
pub fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Damping rate and frequency from a squared-norm series such as `½‖E‖²`.
///
/// Peaks inside `window` give `γ` as half the least-squares slope of their
/// logarithms and `ω = π / (mean peak spacing)`.
pub fn fit_damping(t: &[f64], energy: &[f64], window: (f64, f64)) -> Result<(f64, f64)> {
    let peaks: Vec<(f64, f64)> = find_peaks(t, energy)
        .into_iter()
        .filter(|(tp, v)| *tp >= window.0 && *tp <= window.1 && *v > 0.0)
        .collect();
    if peaks.len() < 3 {
        return Err(Error::TooFewPeaks {
            found: peaks.len(),
            needed: 3,
        });
    }
    let tp: Vec<f64> = peaks.iter().map(|p| p.0).collect();
    let lp: Vec<f64> = peaks.iter().map(|p| p.1.ln()).collect();
    let gamma = 0.5 * linear_slope(&tp, &lp);
    let spacing = (tp[tp.len() - 1] - tp[0]) / (tp.len() - 1) as f64;
    Ok((gamma, PI / spacing))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grids() -> (UniformGrid1D, UniformGrid1D) {
        (
            UniformGrid1D::periodic(0.0, 4.0 * PI, 64).unwrap(),
            UniformGrid1D::natural(-6.0, 6.0, 64).unwrap(),
        )
    }

    fn sample(gx: &UniformGrid1D, gv: &UniformGrid1D, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::new();
        for x in gx.nodes() {
            for v in gv.nodes() {
                out.push(f(x, v));
            }
        }
        out
    }

    #[test]
    fn zero_field_zero_everything() {
        let (gx, gv) = grids();
        let f = vec![0.0; gx.node_count() * gv.node_count()];
        assert_eq!(mass(&f, &gx, &gv), 0.0);
        assert_eq!(lp_norm(&f, &gx, &gv, 2.0).unwrap(), 0.0);
        assert_eq!(momentum(&f, &gx, &gv), 0.0);
        assert_eq!(xrms(&f, &gx, &gv), 0.0);
        assert_eq!(enstrophy(&f, &gx, &gv), 0.0);
        assert!(lp_norm(&f, &gx, &gv, 0.5).is_err());
    }

    #[test]
    fn landau_mass_and_symmetry() {
        let (gx, gv) = grids();
        let f = sample(&gx, &gv, |x, v| {
            (-v * v / 2.0).exp() / (2.0 * PI).sqrt() * (1.0 + 0.001 * (0.5 * x).cos())
        });
        assert!((mass(&f, &gx, &gv) / (4.0 * PI) - 1.0).abs() < 1e-6);
        assert!(momentum(&f, &gx, &gv).abs() < 1e-14);
        // ½∫v²M = ½ per unit length
        assert!((kinetic_energy(&f, &gx, &gv) / (2.0 * PI) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn electric_energy_of_sine() {
        let (gx, _) = grids();
        let e: Vec<f64> = gx.nodes().iter().map(|x| 0.002 * (0.5 * x).sin()).collect();
        let expect = 0.5 * 0.002f64.powi(2) * 2.0 * PI;
        assert!((electric_energy_1d(&e, &gx) - expect).abs() < 1e-18);
        let amps = fourier_mode_amps(&e, &[1, 2, 3]);
        assert!((amps[0] - 0.001).abs() < 1e-16);
        assert!(amps[1] < 1e-17 && amps[2] < 1e-17);
    }

    #[test]
    fn norms_are_positive_and_ordered() {
        let (gx, gv) = grids();
        let f = sample(&gx, &gv, |x, v| (x - 2.0).sin() * (-v * v).exp());
        let l1 = lp_norm(&f, &gx, &gv, 1.0).unwrap();
        let l2 = lp_norm(&f, &gx, &gv, 2.0).unwrap();
        let l3 = lp_norm(&f, &gx, &gv, 3.0).unwrap();
        assert!(l1 > 0.0 && l2 > 0.0 && l3 > 0.0);
        assert!((l2 * l2 - enstrophy(&f, &gx, &gv)).abs() < 1e-12);
    }

    #[test]
    fn hill_gaussian_xrms() {
        let g = UniformGrid1D::natural(-12.0, 12.0, 256).unwrap();
        let w = 1.17;
        let f = sample(&g, &g, |x, v| (-x * x / (2.0 * w * w) - w * w * v * v / 2.0).exp());
        assert!((xrms(&f, &g, &g) - w * (2.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn integrated_profile_has_bump() {
        let gx = UniformGrid1D::periodic(0.0, 20.0 * PI, 128).unwrap();
        let gv = UniformGrid1D::natural(-9.0, 9.0, 128).unwrap();
        let np = 9.0 / (10.0 * (2.0 * PI).sqrt());
        let nb = 2.0 / (10.0 * (2.0 * PI).sqrt());
        let f = sample(&gx, &gv, |_, v| np * (-v * v / 2.0).exp() + nb * (-(v - 4.5).powi(2) / 0.5).exp());
        let fv = integrated_fv(&f, &gx, &gv);
        let v = gv.nodes();
        let j = (0..v.len())
            .filter(|&j| v[j] > 3.5 && v[j] < 6.0)
            .max_by(|&a, &b| fv[a].total_cmp(&fv[b]))
            .unwrap();
        assert!(fv[j] > fv[j - 1] && fv[j] > fv[j + 1]);
        assert!((v[j] - 4.5).abs() < 0.2);
    }

    #[test]
    fn fit_recovers_synthetic_damping() {
        let (g, w) = (-0.1533, 1.4156);
        let t: Vec<f64> = (0..=400).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| (2.0 * g * t).exp() * (w * t - 0.53).cos().powi(2)).collect();
        let (gf, wf) = fit_damping(&t, &y, (2.0, 40.0)).unwrap();
        assert!((gf / g - 1.0).abs() < 5e-3, "{gf}");
        assert!((wf / w - 1.0).abs() < 5e-3, "{wf}");
        let scaled: Vec<f64> = y.iter().map(|v| 37.0 * v).collect();
        let (gs, ws) = fit_damping(&t, &scaled, (2.0, 40.0)).unwrap();
        assert!((gs - gf).abs() < 1e-12 && (ws - wf).abs() < 1e-12);
    }

    #[test]
    fn pure_exponential_has_no_peaks() {
        let t: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| (-0.3 * t).exp()).collect();
        assert!(matches!(fit_damping(&t, &y, (0.0, 10.0)), Err(Error::TooFewPeaks { .. })));
    }
}
