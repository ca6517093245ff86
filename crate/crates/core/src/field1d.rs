//! Periodic 1D Poisson solve `dE/dx = rho - rho_i` with zero-mean `E`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{ensure_finite, Error, Result};
use crate::spline::{Fitter1D, Spline1D, UniformGrid1D};

#[derive(Debug, Clone)]
pub struct FieldState1D {
    pub grid: UniformGrid1D,
    pub e: Vec<f64>,
    pub spline: Spline1D,
    pub rho_i: f64,
}

impl FieldState1D {
    /// Field at an arbitrary (wrapped) position.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.spline.eval_clamped(x)
    }
}

/// Reusable spectral solver for one periodic grid.
pub struct Poisson1D {
    grid: UniformGrid1D,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    fitter: Fitter1D,
}

impl std::fmt::Debug for Poisson1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Poisson1D").field("grid", &self.grid).finish()
    }
}

impl Poisson1D {
    pub fn new(grid: UniformGrid1D) -> Result<Self> {
        if !grid.is_periodic() {
            return Err(Error::InvalidGrid("1D Poisson needs a periodic grid".into()));
        }
        let mut planner = FftPlanner::new();
        let n = grid.node_count();
        Ok(Self {
            grid,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            fitter: Fitter1D::new(grid)?,
        })
    }

    pub fn grid(&self) -> &UniformGrid1D {
        &self.grid
    }

    pub fn solve(&self, rho: &[f64]) -> Result<FieldState1D> {
        let n = self.grid.node_count();
        if rho.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rho.len(),
            });
        }
        ensure_finite(rho, "charge density")?;
        let rho_i = rho.iter().sum::<f64>() / n as f64;
        let mut buf: Vec<Complex64> = rho.iter().map(|r| Complex64::new(r - rho_i, 0.0)).collect();
        self.forward.process(&mut buf);
        let l = self.grid.length();
        buf[0] = Complex64::new(0.0, 0.0);
        for (m, c) in buf.iter_mut().enumerate().skip(1) {
            // signed mode number; the Nyquist mode of an even grid has no
            // antiderivative that is real on the nodes, so it is dropped
            let signed = if 2 * m < n {
                m as f64
            } else if 2 * m == n {
                *c = Complex64::new(0.0, 0.0);
                continue;
            } else {
                m as f64 - n as f64
            };
            let kappa = 2.0 * PI * signed / l;
            *c /= Complex64::new(0.0, kappa);
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / n as f64;
        let mut e: Vec<f64> = buf.iter().map(|c| c.re * scale).collect();
        // remove round-off mean so the zero-mean constraint holds to the last bit
        let mean = e.iter().sum::<f64>() / n as f64;
        for v in e.iter_mut() {
            *v -= mean;
        }
        let spline = self.fitter.fit(&e)?;
        Ok(FieldState1D {
            grid: self.grid,
            e,
            spline,
            rho_i,
        })
    }
}

pub fn solve_poisson_1d(rho: &[f64], grid: UniformGrid1D) -> Result<FieldState1D> {
    Poisson1D::new(grid)?.solve(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> UniformGrid1D {
        UniformGrid1D::periodic(0.0, 4.0 * PI, 64).unwrap()
    }

    #[test]
    fn constant_rho_gives_zero_field() {
        let f = solve_poisson_1d(&vec![3.7; 64], grid()).unwrap();
        assert!(f.e.iter().all(|e| e.abs() < 1e-15));
        assert!((f.rho_i - 3.7).abs() < 1e-14);
    }

    #[test]
    fn single_mode_antiderivative() {
        let g = grid();
        let rho: Vec<f64> = g.nodes().iter().map(|x| 1.0 + 0.001 * (0.5 * x).cos()).collect();
        let f = solve_poisson_1d(&rho, g).unwrap();
        for (x, e) in g.nodes().iter().zip(&f.e) {
            assert!((e - 0.002 * (0.5 * x).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn two_mode_antiderivative() {
        let g = grid();
        let k = 0.5;
        let rho: Vec<f64> = g.nodes().iter().map(|x| 1.0 + (k * x).cos() + 0.3 * (2.0 * k * x).cos()).collect();
        let f = solve_poisson_1d(&rho, g).unwrap();
        for (x, e) in g.nodes().iter().zip(&f.e) {
            let exact = (k * x).sin() / k + 0.15 / k * (2.0 * k * x).sin();
            assert!((e - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_mean_and_linearity() {
        let g = grid();
        let r1: Vec<f64> = g.nodes().iter().map(|x| (0.5 * x).sin().powi(3) + 2.0).collect();
        let r2: Vec<f64> = g.nodes().iter().map(|x| (1.5 * x).cos() * (0.5 * x).sin()).collect();
        let p = Poisson1D::new(g).unwrap();
        let e1 = p.solve(&r1).unwrap();
        let e2 = p.solve(&r2).unwrap();
        let mix: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
        let em = p.solve(&mix).unwrap();
        let norm = e1.e.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(e1.e.iter().sum::<f64>().abs() * g.spacing() < 1e-12 * norm.max(1e-300));
        for i in 0..64 {
            assert!((em.e[i] - (2.0 * e1.e[i] - 0.5 * e2.e[i])).abs() < 1e-13);
        }
        for (i, e) in e1.e.iter().enumerate() {
            assert!((e1.eval(g.node(i)) - e).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_round_trip_band_limited() {
        let g = grid();
        // E band-limited, zero mean; rho = dE/dx
        let e_exact: Vec<f64> = g.nodes().iter().map(|x| (0.5 * x).sin() - 0.4 * (2.5 * x).cos()).collect();
        let rho: Vec<f64> = g
            .nodes()
            .iter()
            .map(|x| 0.5 * (0.5 * x).cos() + 0.4 * 2.5 * (2.5 * x).sin())
            .collect();
        let f = solve_poisson_1d(&rho, g).unwrap();
        for (a, b) in f.e.iter().zip(&e_exact) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn natural_grid_rejected() {
        let g = UniformGrid1D::natural(0.0, 1.0, 8).unwrap();
        assert!(Poisson1D::new(g).is_err());
    }
}
