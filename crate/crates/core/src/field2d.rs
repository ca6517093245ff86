//! Guiding-center field solve on a periodic-in-x, bounded-in-y box.
//!
//! The potential solves `-Δφ = ρ` with a discrete Fourier transform in x and
//! a fourth-order compact (Numerov) three-point scheme in y with homogeneous
//! Dirichlet ends. For each x-mode of wavenumber `ξ` the interior rows read
//!
//! ```text
//! (1 - ξ²h²/12) φ[j+1] + (-2 - 10 ξ²h²/12) φ[j] + (1 - ξ²h²/12) φ[j-1]
//!     = -(h²/12) (ρ[j+1] + 10 ρ[j] + ρ[j-1])
//! ```
//!
//! `E = -∇φ` is then recovered by quadrature relations: Simpson's rule over
//! `[x_{i-1}, x_{i+1}]` gives a cyclic system per row, the same rule in y
//! gives the interior rows of a tridiagonal system per column, and the two
//! boundary cells use a trapezoid rule with end corrections
//!
//! ```text
//! φ(y0) - φ(y1) = h/2 (E0 + E1) - h²/12 (ρ1 - ρ0) + (h²/12) ∂xx(φ1 - φ0)
//! ```
//!
//! where `∂xx` is applied spectrally.
//!
//! A fully periodic spectral variant is available for sensitivity checks.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{ensure_finite, Error, Result};
use crate::spline::{BoundaryKind, Fitter2D, Spline2D, UniformGrid1D};
use crate::tridiag::{solve_tridiagonal, CyclicTridiagonal};

/// Forward and inverse plans of one dimension.
type FftPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

/// How the y direction is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YBoundary {
    Dirichlet,
    Periodic,
}

#[derive(Debug, Clone)]
pub struct FieldState2D {
    pub gx: UniformGrid1D,
    pub gy: UniformGrid1D,
    pub phi: Vec<f64>,
    pub ex: Vec<f64>,
    pub ey: Vec<f64>,
    pub ex_spline: Spline2D,
    pub ey_spline: Spline2D,
}

impl FieldState2D {
    /// Advection velocity `E⊥ = (E_y, -E_x)`; y is clamped into a bounded domain.
    #[inline]
    pub fn drift(&self, x: f64, y: f64) -> (f64, f64) {
        (self.ey_spline.eval_clamped(x, y), -self.ex_spline.eval_clamped(x, y))
    }

    /// `∫ (E_x² + E_y²)` by the rectangle rule over the nodes.
    pub fn energy(&self) -> f64 {
        let w = self.gx.spacing() * self.gy.spacing();
        w * self.ex.iter().zip(&self.ey).map(|(a, b)| a * a + b * b).sum::<f64>()
    }

    /// Energy of the x-dependent part of `E` (everything but the x-mean of each row).
    pub fn perturbation_energy(&self) -> f64 {
        let nx = self.gx.node_count();
        let ny = self.gy.node_count();
        let w = self.gx.spacing() * self.gy.spacing();
        let mut total = 0.0;
        for field in [&self.ex, &self.ey] {
            for j in 0..ny {
                let mean = (0..nx).map(|i| field[i * ny + j]).sum::<f64>() / nx as f64;
                total += (0..nx).map(|i| (field[i * ny + j] - mean).powi(2)).sum::<f64>();
            }
        }
        w * total
    }
}

pub struct Poisson2D {
    gx: UniformGrid1D,
    gy: UniformGrid1D,
    ybc: YBoundary,
    fft_x: Arc<dyn Fft<f64>>,
    ifft_x: Arc<dyn Fft<f64>>,
    fft_y: Option<FftPair>,
    ex_rows: CyclicTridiagonal,
    ey_cols: Option<CyclicTridiagonal>,
    fitter: Fitter2D,
}

impl std::fmt::Debug for Poisson2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Poisson2D")
            .field("gx", &self.gx)
            .field("gy", &self.gy)
            .field("ybc", &self.ybc)
            .finish()
    }
}

/// Signed wavenumber of FFT bin `m` on a periodic grid, with bins at and
/// above `n/2` mapped to negative modes.
fn wavenumber(m: usize, n: usize, length: f64) -> f64 {
    let s = if 2 * m < n { m as f64 } else { m as f64 - n as f64 };
    2.0 * PI * s / length
}

impl Poisson2D {
    /// `gx` must be periodic. With `YBoundary::Dirichlet`, `gy` must be
    /// natural (its node set includes both walls); with `Periodic` it must be periodic.
    pub fn new(gx: UniformGrid1D, gy: UniformGrid1D, ybc: YBoundary) -> Result<Self> {
        if !gx.is_periodic() {
            return Err(Error::InvalidGrid("x direction must be periodic".into()));
        }
        match ybc {
            YBoundary::Dirichlet if gy.is_periodic() => return Err(Error::InvalidGrid("Dirichlet y needs a bounded grid".into())),
            YBoundary::Periodic if !gy.is_periodic() => return Err(Error::InvalidGrid("periodic y needs a periodic grid".into())),
            _ => {}
        }
        if ybc == YBoundary::Dirichlet && gy.n_cells() < 5 {
            return Err(Error::InvalidGrid("need at least 4 interior y nodes".into()));
        }
        let mut planner = FftPlanner::new();
        let nx = gx.node_count();
        let fft_y = if ybc == YBoundary::Periodic {
            let ny = gy.node_count();
            Some((planner.plan_fft_forward(ny), planner.plan_fft_inverse(ny)))
        } else {
            None
        };
        let ey_cols = if ybc == YBoundary::Periodic {
            Some(CyclicTridiagonal::new(gy.node_count(), 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0)?)
        } else {
            None
        };
        let spline_gy = if gy.is_periodic() {
            gy
        } else {
            gy.with_bc(BoundaryKind::natural())
        };
        Ok(Self {
            gx,
            gy,
            ybc,
            fft_x: planner.plan_fft_forward(nx),
            ifft_x: planner.plan_fft_inverse(nx),
            fft_y,
            ex_rows: CyclicTridiagonal::new(nx, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0)?,
            ey_cols,
            fitter: Fitter2D::new(gx, spline_gy)?,
        })
    }

    pub fn grids(&self) -> (&UniformGrid1D, &UniformGrid1D) {
        (&self.gx, &self.gy)
    }

    pub fn y_boundary(&self) -> YBoundary {
        self.ybc
    }

    fn shape(&self) -> (usize, usize) {
        (self.gx.node_count(), self.gy.node_count())
    }

    fn check(&self, a: &[f64], what: &'static str) -> Result<()> {
        let (nx, ny) = self.shape();
        if a.len() != nx * ny {
            return Err(Error::DimensionMismatch {
                expected: nx * ny,
                got: a.len(),
            });
        }
        ensure_finite(a, what)
    }

    /// x-transform of every y row: `out[j * nx + m]`.
    fn transform_x(&self, a: &[f64]) -> Vec<Complex64> {
        let (nx, ny) = self.shape();
        let mut out = vec![Complex64::new(0.0, 0.0); nx * ny];
        for j in 0..ny {
            let row = &mut out[j * nx..(j + 1) * nx];
            for (i, c) in row.iter_mut().enumerate() {
                *c = Complex64::new(a[i * ny + j], 0.0);
            }
            self.fft_x.process(row);
        }
        out
    }

    /// Inverse of [`transform_x`], back to the `[i * ny + j]` layout.
    fn inverse_x(&self, mut hat: Vec<Complex64>) -> Vec<f64> {
        let (nx, ny) = self.shape();
        let mut out = vec![0.0; nx * ny];
        let scale = 1.0 / nx as f64;
        for j in 0..ny {
            let row = &mut hat[j * nx..(j + 1) * nx];
            self.ifft_x.process(row);
            for (i, c) in row.iter().enumerate() {
                out[i * ny + j] = c.re * scale;
            }
        }
        out
    }

    /// `∂xx` of one y row, evaluated spectrally.
    fn dxx_row(&self, a: &[f64], j: usize) -> Vec<f64> {
        let (nx, ny) = self.shape();
        let mut row: Vec<Complex64> = (0..nx).map(|i| Complex64::new(a[i * ny + j], 0.0)).collect();
        self.fft_x.process(&mut row);
        for (m, c) in row.iter_mut().enumerate() {
            let xi = wavenumber(m, nx, self.gx.length());
            *c *= -xi * xi;
        }
        self.ifft_x.process(&mut row);
        row.iter().map(|c| c.re / nx as f64).collect()
    }

    pub fn solve_potential(&self, rho: &[f64]) -> Result<Vec<f64>> {
        self.check(rho, "charge density")?;
        match self.ybc {
            YBoundary::Dirichlet => self.potential_numerov(rho),
            YBoundary::Periodic => Ok(self.potential_spectral(rho)),
        }
    }

    fn potential_numerov(&self, rho: &[f64]) -> Result<Vec<f64>> {
        let (nx, ny) = self.shape();
        let h = self.gy.spacing();
        let h2 = h * h / 12.0;
        let rho_hat = self.transform_x(rho);
        let mut phi_hat = vec![Complex64::new(0.0, 0.0); nx * ny];
        let interior = ny - 2;
        let mut lower = vec![0.0; interior];
        let mut diag = vec![0.0; interior];
        let mut upper = vec![0.0; interior];
        let mut re = vec![0.0; interior];
        let mut im = vec![0.0; interior];
        for m in 0..nx {
            let xi = wavenumber(m, nx, self.gx.length());
            let off = 1.0 - xi * xi * h2;
            let d = -2.0 - 10.0 * xi * xi * h2;
            for r in 0..interior {
                lower[r] = if r == 0 { 0.0 } else { off };
                upper[r] = if r + 1 == interior { 0.0 } else { off };
                diag[r] = d;
                let j = r + 1;
                let s = rho_hat[(j + 1) * nx + m] + rho_hat[j * nx + m] * 10.0 + rho_hat[(j - 1) * nx + m];
                let rhs = -s * h2;
                re[r] = rhs.re;
                im[r] = rhs.im;
            }
            solve_tridiagonal(&lower, &diag, &upper, &mut re)?;
            solve_tridiagonal(&lower, &diag, &upper, &mut im)?;
            for r in 0..interior {
                phi_hat[(r + 1) * nx + m] = Complex64::new(re[r], im[r]);
            }
        }
        let mut phi = self.inverse_x(phi_hat);
        for i in 0..nx {
            phi[i * ny] = 0.0;
            phi[i * ny + ny - 1] = 0.0;
        }
        Ok(phi)
    }

    /// Full 2D spectral transform helper for the periodic variant: `[i * ny + j]` layout.
    fn fft2(&self, a: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let (nx, ny) = self.shape();
        let (fy, iy) = self.fft_y.as_ref().expect("periodic y plans");
        let mut buf = a.to_vec();
        for i in 0..nx {
            let row = &mut buf[i * ny..(i + 1) * ny];
            if inverse {
                iy.process(row)
            } else {
                fy.process(row)
            }
        }
        let mut col = vec![Complex64::new(0.0, 0.0); nx];
        for j in 0..ny {
            for i in 0..nx {
                col[i] = buf[i * ny + j];
            }
            if inverse {
                self.ifft_x.process(&mut col)
            } else {
                self.fft_x.process(&mut col)
            }
            for i in 0..nx {
                buf[i * ny + j] = col[i];
            }
        }
        if inverse {
            let s = 1.0 / (nx * ny) as f64;
            for c in buf.iter_mut() {
                *c *= s;
            }
        }
        buf
    }

    fn potential_spectral(&self, rho: &[f64]) -> Vec<f64> {
        let (nx, ny) = self.shape();
        let src: Vec<Complex64> = rho.iter().map(|r| Complex64::new(*r, 0.0)).collect();
        let mut hat = self.fft2(&src, false);
        for i in 0..nx {
            let xi = wavenumber(i, nx, self.gx.length());
            for j in 0..ny {
                let zeta = wavenumber(j, ny, self.gy.length());
                let k2 = xi * xi + zeta * zeta;
                hat[i * ny + j] = if k2 == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    hat[i * ny + j] / k2
                };
            }
        }
        self.fft2(&hat, true).iter().map(|c| c.re).collect()
    }

    /// Simpson relation per row:
    /// `2Δx [E(i-1)/6 + 2E(i)/3 + E(i+1)/6] = φ(i-1) - φ(i+1)`.
    pub fn compute_ex(&self, phi: &[f64]) -> Result<Vec<f64>> {
        self.check(phi, "potential")?;
        let (nx, ny) = self.shape();
        let inv = 1.0 / (2.0 * self.gx.spacing());
        let mut ex = vec![0.0; nx * ny];
        let mut rhs = vec![0.0; nx];
        for j in 0..ny {
            for i in 0..nx {
                let im = (i + nx - 1) % nx;
                let ip = (i + 1) % nx;
                rhs[i] = (phi[im * ny + j] - phi[ip * ny + j]) * inv;
            }
            self.ex_rows.solve(&mut rhs)?;
            for i in 0..nx {
                ex[i * ny + j] = rhs[i];
            }
        }
        Ok(ex)
    }

    pub fn compute_ey(&self, phi: &[f64], rho: &[f64]) -> Result<Vec<f64>> {
        self.check(phi, "potential")?;
        self.check(rho, "charge density")?;
        let (nx, ny) = self.shape();
        let h = self.gy.spacing();
        let mut ey = vec![0.0; nx * ny];
        match self.ybc {
            YBoundary::Periodic => {
                // same Simpson relation, cyclic in y
                let solver = self.ey_cols.as_ref().expect("periodic y solver");
                let mut rhs = vec![0.0; ny];
                for i in 0..nx {
                    for j in 0..ny {
                        let jm = (j + ny - 1) % ny;
                        let jp = (j + 1) % ny;
                        rhs[j] = (phi[i * ny + jm] - phi[i * ny + jp]) / (2.0 * h);
                    }
                    solver.solve(&mut rhs)?;
                    ey[i * ny..(i + 1) * ny].copy_from_slice(&rhs);
                }
            }
            YBoundary::Dirichlet => {
                let last = ny - 1;
                let c = h * h / 12.0;
                // f_φ = (h²/12) [-∂xx(φ(y1) - φ(y0))] per boundary cell
                let d0 = self.dxx_row(phi, 0);
                let d1 = self.dxx_row(phi, 1);
                let dm = self.dxx_row(phi, last - 1);
                let dn = self.dxx_row(phi, last);
                let mut lower = vec![1.0 / 6.0; ny];
                let mut diag = vec![2.0 / 3.0; ny];
                let mut upper = vec![1.0 / 6.0; ny];
                lower[0] = 0.0;
                diag[0] = 0.5;
                upper[0] = 0.5;
                lower[last] = 0.5;
                diag[last] = 0.5;
                upper[last] = 0.0;
                let mut rhs = vec![0.0; ny];
                for i in 0..nx {
                    let p = &phi[i * ny..(i + 1) * ny];
                    let r = &rho[i * ny..(i + 1) * ny];
                    let f_first = c * (-(d1[i] - d0[i]));
                    let f_last = c * (-(dn[i] - dm[i]));
                    rhs[0] = (p[0] - p[1] + c * (r[1] - r[0]) - f_first) / h;
                    for j in 1..last {
                        rhs[j] = (p[j - 1] - p[j + 1]) / (2.0 * h);
                    }
                    rhs[last] = (p[last - 1] - p[last] + c * (r[last] - r[last - 1]) - f_last) / h;
                    solve_tridiagonal(&lower, &diag, &upper, &mut rhs)?;
                    ey[i * ny..(i + 1) * ny].copy_from_slice(&rhs);
                }
            }
        }
        Ok(ey)
    }

    pub fn solve_fields(&self, rho: &[f64]) -> Result<FieldState2D> {
        let phi = self.solve_potential(rho)?;
        let ex = self.compute_ex(&phi)?;
        let ey = self.compute_ey(&phi, rho)?;
        let ex_spline = self.fitter.fit(&ex)?;
        let ey_spline = self.fitter.fit(&ey)?;
        Ok(FieldState2D {
            gx: self.gx,
            gy: self.gy,
            phi,
            ex,
            ey,
            ex_spline,
            ey_spline,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solver(nx: usize, ny: usize, lx: f64) -> Poisson2D {
        let gx = UniformGrid1D::periodic(0.0, lx, nx).unwrap();
        let gy = UniformGrid1D::natural(0.0, 2.0 * PI, ny).unwrap();
        Poisson2D::new(gx, gy, YBoundary::Dirichlet).unwrap()
    }

    fn sample(p: &Poisson2D, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let (gx, gy) = p.grids();
        let mut out = Vec::new();
        for x in gx.nodes() {
            for y in gy.nodes() {
                out.push(f(x, y));
            }
        }
        out
    }

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_source_zero_fields() {
        let p = solver(8, 8, 7.0);
        let f = p.solve_fields(&vec![0.0; 8 * 9]).unwrap();
        assert!(f.phi.iter().chain(&f.ex).chain(&f.ey).all(|v| *v == 0.0));
    }

    #[test]
    fn sin_y_source() {
        let p = solver(16, 64, 10.0);
        let rho = sample(&p, |_, y| y.sin());
        let f = p.solve_fields(&rho).unwrap();
        assert!(max_err(&f.phi, &sample(&p, |_, y| y.sin())) < 1e-5);
        assert!(max_err(&f.ey, &sample(&p, |_, y| -y.cos())) < 1e-5);
        assert!(f.ex.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn potential_vanishes_on_walls() {
        let p = solver(12, 16, 7.0);
        let rho = sample(&p, |x, y| (x * 0.7).cos() * (y * 1.3).exp() + 0.2);
        let phi = p.solve_potential(&rho).unwrap();
        let ny = 17;
        for i in 0..12 {
            assert_eq!(phi[i * ny], 0.0);
            assert_eq!(phi[i * ny + ny - 1], 0.0);
        }
    }

    #[test]
    fn ex_of_cosine_potential() {
        let lx = 10.0;
        let k = 2.0 * PI / lx;
        let err = |n: usize| {
            let p = solver(n, 8, lx);
            let phi = sample(&p, |x, _| (k * x).cos());
            let ex = p.compute_ex(&phi).unwrap();
            max_err(&ex, &sample(&p, |x, _| k * (k * x).sin()))
        };
        let e: Vec<f64> = [16, 32, 64].iter().map(|&n| err(n)).collect();
        for w in e.windows(2) {
            assert!((w[0] / w[1]).log2() >= 2.7, "{e:?}");
        }
        let p = solver(16, 8, lx);
        let flat = sample(&p, |_, y| y * y);
        assert!(p.compute_ex(&flat).unwrap().iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn ex_satisfies_simpson_relation() {
        let p = solver(24, 10, 7.0);
        let phi = sample(&p, |x, y| (0.9 * x).sin() * y.cos() + (1.8 * x).cos() * 0.3);
        let ex = p.compute_ex(&phi).unwrap();
        let (nx, ny, dx) = (24, 11, p.grids().0.spacing());
        for j in 0..ny {
            for i in 0..nx {
                let im = (i + nx - 1) % nx;
                let ip = (i + 1) % nx;
                let lhs = 2.0 * dx * (ex[im * ny + j] / 6.0 + 2.0 * ex[i * ny + j] / 3.0 + ex[ip * ny + j] / 6.0);
                assert!((lhs - (phi[im * ny + j] - phi[ip * ny + j])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ey_of_constant_potential_is_zero() {
        let p = solver(8, 16, 7.0);
        let phi = vec![2.5; 8 * 17];
        let ey = p.compute_ey(&phi, &vec![0.0; 8 * 17]).unwrap();
        assert!(ey.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn periodic_variant_sin_y() {
        let gx = UniformGrid1D::periodic(0.0, 10.0, 16).unwrap();
        let gy = UniformGrid1D::periodic(0.0, 2.0 * PI, 32).unwrap();
        let p = Poisson2D::new(gx, gy, YBoundary::Periodic).unwrap();
        let rho = sample(&p, |x, y| y.sin() + 0.1 * (2.0 * PI * x / 10.0).cos());
        let f = p.solve_fields(&rho).unwrap();
        let k = 2.0 * PI / 10.0;
        assert!(max_err(&f.phi, &sample(&p, |x, y| y.sin() + 0.1 * (k * x).cos() / (k * k))) < 1e-12);
        assert!(max_err(&f.ey, &sample(&p, |_, y| -y.cos())) < 1e-5);
    }

    #[test]
    fn boundary_kind_mismatch_rejected() {
        let gx = UniformGrid1D::periodic(0.0, 1.0, 8).unwrap();
        let gyp = UniformGrid1D::periodic(0.0, 1.0, 8).unwrap();
        let gyn = UniformGrid1D::natural(0.0, 1.0, 8).unwrap();
        assert!(Poisson2D::new(gx, gyp, YBoundary::Dirichlet).is_err());
        assert!(Poisson2D::new(gx, gyn, YBoundary::Periodic).is_err());
        assert!(Poisson2D::new(gyn, gyn, YBoundary::Dirichlet).is_err());
    }
}
