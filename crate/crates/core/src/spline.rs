//! Uniform-grid cubic B-splines.
//!
//! The basis function is the centred cubic B-spline evaluated in grid units,
//! so every knot spans four cells whatever the spacing:
//!
//! ```text
//! 6 S(u) = (2 - |u|)^3              1 <= |u| <= 2
//!          4 - 6 u^2 + 3 |u|^3      0 <= |u| <= 1
//!          0                        otherwise
//! ```
//!
//! Coefficient layout:
//!
//! * periodic grids own `n_cells` nodes and `n_cells` coefficients; coefficient
//!   `k` sits on node `k`.
//! * natural grids own `n_cells + 1` nodes and `n_cells + 3` coefficients; the
//!   first and last are ghost knots one cell outside the domain, so coefficient
//!   `k` sits at `xmin + (k - 1) * dx`. The two extra rows of the fit prescribe
//!   the first derivative at each end.
//!
//! 2D coefficient arrays are row-major with the first dimension slowest:
//! `coeffs[i1 * n2 + i2]`.

use crate::error::{ensure_finite, Error, Result};
use crate::tridiag::{solve_tridiagonal, CyclicTridiagonal};

const SIXTH: f64 = 1.0 / 6.0;
const TWO_THIRDS: f64 = 2.0 / 3.0;

/// Boundary closure of one grid dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    Periodic,
    /// Prescribed first derivatives at the left and right ends.
    Natural {
        left_slope: f64,
        right_slope: f64,
    },
}

impl BoundaryKind {
    pub fn natural() -> Self {
        BoundaryKind::Natural {
            left_slope: 0.0,
            right_slope: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid1D {
    xmin: f64,
    xmax: f64,
    n_cells: usize,
    bc: BoundaryKind,
}

impl UniformGrid1D {
    pub fn new(xmin: f64, xmax: f64, n_cells: usize, bc: BoundaryKind) -> Result<Self> {
        if !(xmin.is_finite() && xmax.is_finite()) || xmax <= xmin {
            return Err(Error::InvalidGrid(format!("need xmax > xmin, got [{xmin}, {xmax}]")));
        }
        let min_cells = if matches!(bc, BoundaryKind::Periodic) { 3 } else { 1 };
        if n_cells < min_cells {
            return Err(Error::InvalidGrid(format!("too few cells: {n_cells}")));
        }
        Ok(Self { xmin, xmax, n_cells, bc })
    }

    pub fn periodic(xmin: f64, xmax: f64, n_cells: usize) -> Result<Self> {
        Self::new(xmin, xmax, n_cells, BoundaryKind::Periodic)
    }

    pub fn natural(xmin: f64, xmax: f64, n_cells: usize) -> Result<Self> {
        Self::new(xmin, xmax, n_cells, BoundaryKind::natural())
    }

    pub fn xmin(&self) -> f64 {
        self.xmin
    }

    pub fn xmax(&self) -> f64 {
        self.xmax
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn bc(&self) -> BoundaryKind {
        self.bc
    }

    pub fn with_bc(&self, bc: BoundaryKind) -> Self {
        Self { bc, ..*self }
    }

    pub fn length(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn spacing(&self) -> f64 {
        (self.xmax - self.xmin) / self.n_cells as f64
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.bc, BoundaryKind::Periodic)
    }

    pub fn node_count(&self) -> usize {
        if self.is_periodic() {
            self.n_cells
        } else {
            self.n_cells + 1
        }
    }

    pub fn coeff_count(&self) -> usize {
        if self.is_periodic() {
            self.n_cells
        } else {
            self.n_cells + 3
        }
    }

    pub fn node(&self, i: usize) -> f64 {
        self.xmin + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.node_count()).map(|i| self.node(i)).collect()
    }

    /// Offset between coefficient index and node index (1 for the natural ghost layer).
    pub(crate) fn ghost_offset(&self) -> usize {
        if self.is_periodic() {
            0
        } else {
            1
        }
    }

    /// Position of the knot carrying coefficient `k`.
    pub fn knot(&self, k: usize) -> f64 {
        self.xmin + (k as f64 - self.ghost_offset() as f64) * self.spacing()
    }

    pub fn knots(&self) -> Vec<f64> {
        (0..self.coeff_count()).map(|k| self.knot(k)).collect()
    }

    /// Wraps a periodic coordinate into `[xmin, xmax)`; identity for natural grids.
    pub fn wrap(&self, x: f64) -> f64 {
        if !self.is_periodic() {
            return x;
        }
        let l = self.length();
        let mut y = (x - self.xmin).rem_euclid(l);
        if y >= l {
            y = 0.0;
        }
        self.xmin + y
    }

    pub fn contains(&self, x: f64) -> bool {
        self.is_periodic() || (x >= self.xmin && x <= self.xmax)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        if self.is_periodic() {
            x
        } else {
            x.clamp(self.xmin, self.xmax)
        }
    }

    /// Position in grid units relative to `xmin`, split into the integer cell
    /// index and the fractional offset in `[0, 1)`.
    #[inline]
    pub(crate) fn locate(&self, x: f64) -> (i64, f64) {
        let u = (x - self.xmin) / self.spacing();
        let cell = u.floor();
        // far outside any grid; keeps the integer arithmetic of callers in range
        const FAR: f64 = (1u64 << 40) as f64;
        if cell.abs() > FAR {
            return ((cell.signum() * FAR) as i64, 0.0);
        }
        (cell as i64, u - cell)
    }
}

/// Cubic B-spline `S(u)` in grid units.
pub fn basis_eval(u: f64) -> f64 {
    let a = u.abs();
    if a >= 2.0 {
        0.0
    } else if a >= 1.0 {
        let t = 2.0 - a;
        t * t * t / 6.0
    } else {
        (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0
    }
}

/// Derivative `S'(u)` in grid units.
pub fn basis_deriv(u: f64) -> f64 {
    let a = u.abs();
    let s = u.signum();
    if a >= 2.0 {
        0.0
    } else if a >= 1.0 {
        let t = 2.0 - a;
        -s * t * t / 2.0
    } else {
        s * (-2.0 * a + 1.5 * a * a)
    }
}

/// Weights of the four knots `cell-1 ..= cell+2` at fractional offset `t`.
/// These equal `S(t+1), S(t), S(1-t), S(2-t)` and sum to one.
#[inline]
pub fn knot_weights(t: f64) -> [f64; 4] {
    let s = 1.0 - t;
    let t2 = t * t;
    let t3 = t2 * t;
    [
        s * s * s * SIXTH,
        (3.0 * t3 - 6.0 * t2 + 4.0) * SIXTH,
        (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) * SIXTH,
        t3 * SIXTH,
    ]
}

/// Covering knots of `x` as (coefficient index, weight) pairs.
///
/// Periodic indices are wrapped. Natural indices are returned unchecked as
/// signed values so that callers can decide what to do outside the range.
#[inline]
pub(crate) fn covering(grid: &UniformGrid1D, x: f64) -> ([i64; 4], [f64; 4]) {
    let (cell, t) = grid.locate(x);
    let w = knot_weights(t);
    let off = grid.ghost_offset() as i64;
    let mut idx = [0i64; 4];
    if grid.is_periodic() {
        let n = grid.n_cells as i64;
        for (m, slot) in idx.iter_mut().enumerate() {
            *slot = (cell - 1 + m as i64).rem_euclid(n);
        }
    } else {
        for (m, slot) in idx.iter_mut().enumerate() {
            *slot = cell - 1 + m as i64 + off;
        }
    }
    (idx, w)
}

/// Natural-grid covering for a point already known to be inside the domain.
#[inline]
fn covering_inside(grid: &UniformGrid1D, x: f64) -> (usize, [f64; 4]) {
    let (mut cell, mut t) = grid.locate(x);
    let last = grid.n_cells as i64 - 1;
    if cell > last {
        t += (cell - last) as f64;
        cell = last;
    }
    if cell < 0 {
        t += cell as f64;
        cell = 0;
    }
    // cell - 1 + ghost offset(1) = cell
    (cell as usize, knot_weights(t))
}

/// Pre-factored 1D fitting operator for one grid.
#[derive(Debug, Clone)]
pub struct Fitter1D {
    grid: UniformGrid1D,
    cyclic: Option<CyclicTridiagonal>,
}

impl Fitter1D {
    pub fn new(grid: UniformGrid1D) -> Result<Self> {
        let cyclic = if grid.is_periodic() {
            Some(CyclicTridiagonal::new(grid.n_cells(), SIXTH, TWO_THIRDS, SIXTH)?)
        } else {
            None
        };
        Ok(Self { grid, cyclic })
    }

    pub fn grid(&self) -> &UniformGrid1D {
        &self.grid
    }

    /// Fits coefficients from node samples read with a stride, writing the
    /// coefficients with another stride. `samples[s0 + i*ss]`, `out[c0 + k*cs]`.
    fn fit_strided(
        &self,
        samples: &[f64],
        s0: usize,
        ss: usize,
        out: &mut [f64],
        c0: usize,
        cs: usize,
        scratch: &mut Vec<f64>,
    ) -> Result<()> {
        let nn = self.grid.node_count();
        match (&self.cyclic, self.grid.bc()) {
            (Some(solver), _) => {
                scratch.clear();
                scratch.extend((0..nn).map(|i| samples[s0 + i * ss]));
                solver.solve(scratch)?;
                for (k, v) in scratch.iter().enumerate() {
                    out[c0 + k * cs] = *v;
                }
            }
            (None, BoundaryKind::Natural { left_slope, right_slope }) => {
                // Eliminate the ghosts using c[-1] = c[1] - 2 h d0 and
                // c[N+1] = c[N-1] + 2 h dN, leaving N+1 unknowns c[0..=N].
                let h = self.grid.spacing();
                let n = nn - 1;
                let mut lower = vec![SIXTH; nn];
                let diag = vec![TWO_THIRDS; nn];
                let mut upper = vec![SIXTH; nn];
                scratch.clear();
                scratch.extend((0..nn).map(|i| samples[s0 + i * ss]));
                if n == 0 {
                    return Err(Error::InvalidGrid("natural grid needs a cell".into()));
                }
                upper[0] = 2.0 * SIXTH;
                scratch[0] += 2.0 * h * left_slope * SIXTH;
                lower[n] = 2.0 * SIXTH;
                scratch[n] -= 2.0 * h * right_slope * SIXTH;
                lower[0] = 0.0;
                upper[n] = 0.0;
                solve_tridiagonal(&lower, &diag, &upper, scratch)?;
                let ghost_left = scratch[1] - 2.0 * h * left_slope;
                let ghost_right = scratch[n - 1] + 2.0 * h * right_slope;
                out[c0] = ghost_left;
                for (i, v) in scratch.iter().enumerate() {
                    out[c0 + (i + 1) * cs] = *v;
                }
                out[c0 + (n + 2) * cs] = ghost_right;
            }
            (None, BoundaryKind::Periodic) => unreachable!("periodic grids carry a cyclic solver"),
        }
        Ok(())
    }

    pub fn fit(&self, samples: &[f64]) -> Result<Spline1D> {
        let nn = self.grid.node_count();
        if samples.len() != nn {
            return Err(Error::DimensionMismatch {
                expected: nn,
                got: samples.len(),
            });
        }
        ensure_finite(samples, "spline samples")?;
        let mut coeffs = vec![0.0; self.grid.coeff_count()];
        let mut scratch = Vec::with_capacity(nn);
        self.fit_strided(samples, 0, 1, &mut coeffs, 0, 1, &mut scratch)?;
        Ok(Spline1D { grid: self.grid, coeffs })
    }
}

/// 1D spline: grid plus coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Spline1D {
    grid: UniformGrid1D,
    coeffs: Vec<f64>,
}

impl Spline1D {
    pub fn from_coeffs(grid: UniformGrid1D, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != grid.coeff_count() {
            return Err(Error::DimensionMismatch {
                expected: grid.coeff_count(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &UniformGrid1D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if self.grid.is_periodic() {
            Ok(self.eval_periodic(x))
        } else if !self.grid.contains(x) {
            Err(Error::OutOfDomain {
                value: x,
                min: self.grid.xmin,
                max: self.grid.xmax,
            })
        } else {
            Ok(self.eval_natural_inside(x))
        }
    }

    /// Evaluates after clamping natural coordinates into the domain.
    pub fn eval_clamped(&self, x: f64) -> f64 {
        if self.grid.is_periodic() {
            self.eval_periodic(x)
        } else {
            self.eval_natural_inside(self.grid.clamp(x))
        }
    }

    #[inline]
    fn eval_periodic(&self, x: f64) -> f64 {
        let (idx, w) = covering(&self.grid, x);
        (0..4).map(|m| w[m] * self.coeffs[idx[m] as usize]).sum()
    }

    #[inline]
    fn eval_natural_inside(&self, x: f64) -> f64 {
        let (k0, w) = covering_inside(&self.grid, x);
        (0..4).map(|m| w[m] * self.coeffs[k0 + m]).sum()
    }

    /// Node values reconstructed from the coefficients.
    pub fn node_values(&self) -> Vec<f64> {
        (0..self.grid.node_count()).map(|i| self.eval_clamped(self.grid.node(i))).collect()
    }
}

pub fn fit_1d(samples: &[f64], grid: UniformGrid1D) -> Result<Spline1D> {
    Fitter1D::new(grid)?.fit(samples)
}

/// Pre-factored tensor-product fitting operator.
#[derive(Debug, Clone)]
pub struct Fitter2D {
    fx: Fitter1D,
    fy: Fitter1D,
}

impl Fitter2D {
    pub fn new(gx: UniformGrid1D, gy: UniformGrid1D) -> Result<Self> {
        Ok(Self {
            fx: Fitter1D::new(gx)?,
            fy: Fitter1D::new(gy)?,
        })
    }

    pub fn grids(&self) -> (&UniformGrid1D, &UniformGrid1D) {
        (self.fx.grid(), self.fy.grid())
    }

    /// Fits node samples laid out as `samples[i * ny_nodes + j]`.
    pub fn fit(&self, samples: &[f64]) -> Result<Spline2D> {
        let gx = *self.fx.grid();
        let gy = *self.fy.grid();
        let (nxn, nyn) = (gx.node_count(), gy.node_count());
        let (nxc, nyc) = (gx.coeff_count(), gy.coeff_count());
        if samples.len() != nxn * nyn {
            return Err(Error::DimensionMismatch {
                expected: nxn * nyn,
                got: samples.len(),
            });
        }
        ensure_finite(samples, "spline samples")?;
        let mut scratch = Vec::new();
        // Along x for every y node: stage[kx * nyn + j].
        let mut stage = vec![0.0; nxc * nyn];
        for j in 0..nyn {
            self.fx.fit_strided(samples, j, nyn, &mut stage, j, nyn, &mut scratch)?;
        }
        // Along y for every x coefficient.
        let mut coeffs = vec![0.0; nxc * nyc];
        for kx in 0..nxc {
            self.fy.fit_strided(&stage, kx * nyn, 1, &mut coeffs, kx * nyc, 1, &mut scratch)?;
        }
        Ok(Spline2D { gx, gy, coeffs })
    }
}

pub fn fit_2d(samples: &[f64], gx: UniformGrid1D, gy: UniformGrid1D) -> Result<Spline2D> {
    Fitter2D::new(gx, gy)?.fit(samples)
}

/// Tensor-product spline on two uniform grids.
#[derive(Debug, Clone, PartialEq)]
pub struct Spline2D {
    gx: UniformGrid1D,
    gy: UniformGrid1D,
    coeffs: Vec<f64>,
}

impl Spline2D {
    pub fn from_coeffs(gx: UniformGrid1D, gy: UniformGrid1D, coeffs: Vec<f64>) -> Result<Self> {
        let n = gx.coeff_count() * gy.coeff_count();
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: coeffs.len(),
            });
        }
        Ok(Self { gx, gy, coeffs })
    }

    pub fn grids(&self) -> (&UniformGrid1D, &UniformGrid1D) {
        (&self.gx, &self.gy)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.gx.coeff_count(), self.gy.coeff_count())
    }

    #[inline]
    fn axis(grid: &UniformGrid1D, x: f64) -> ([usize; 4], [f64; 4]) {
        if grid.is_periodic() {
            let (idx, w) = covering(grid, x);
            ([idx[0] as usize, idx[1] as usize, idx[2] as usize, idx[3] as usize], w)
        } else {
            let (k0, w) = covering_inside(grid, x);
            ([k0, k0 + 1, k0 + 2, k0 + 3], w)
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        for (g, v) in [(&self.gx, x), (&self.gy, y)] {
            if !g.contains(v) {
                return Err(Error::OutOfDomain {
                    value: v,
                    min: g.xmin,
                    max: g.xmax,
                });
            }
        }
        Ok(self.eval_clamped(x, y))
    }

    /// Evaluates after clamping natural coordinates into the domain.
    #[inline]
    pub fn eval_clamped(&self, x: f64, y: f64) -> f64 {
        let (ix, wx) = Self::axis(&self.gx, self.gx.clamp(x));
        let (iy, wy) = Self::axis(&self.gy, self.gy.clamp(y));
        let nyc = self.gy.coeff_count();
        let mut acc = 0.0;
        for a in 0..4 {
            let row = &self.coeffs[ix[a] * nyc..(ix[a] + 1) * nyc];
            let mut s = 0.0;
            for b in 0..4 {
                s += wy[b] * row[iy[b]];
            }
            acc += wx[a] * s;
        }
        acc
    }

    /// Node values reconstructed from the coefficients, `[i * ny_nodes + j]`.
    pub fn node_values(&self) -> Vec<f64> {
        let (nxn, nyn) = (self.gx.node_count(), self.gy.node_count());
        let mut out = Vec::with_capacity(nxn * nyn);
        for i in 0..nxn {
            let x = self.gx.node(i);
            for j in 0..nyn {
                out.push(self.eval_clamped(x, self.gy.node(j)));
            }
        }
        out
    }

    /// Linear combination `a * self + b * other` on identical grids.
    pub fn combine(&self, a: f64, other: &Spline2D, b: f64) -> Result<Spline2D> {
        if self.gx != other.gx || self.gy != other.gy {
            return Err(Error::InvalidArgument("spline grids differ".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(p, q)| a * p + b * q).collect();
        Ok(Spline2D {
            gx: self.gx,
            gy: self.gy,
            coeffs,
        })
    }
}
