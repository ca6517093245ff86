//! Reference computations that do not share code paths with `fsl-core`.
//!
//! Every routine here assembles the defining equations of a core operation
//! as a dense matrix or a brute-force sum and solves it with a general LU
//! factorisation. They are slow on purpose and only meant for small grids.

use std::f64::consts::PI;

use fsl_core::spline::{basis_deriv, basis_eval, BoundaryKind, UniformGrid1D};
use nalgebra::{DMatrix, DVector};

/// Solves a dense square system with partial-pivot LU.
pub fn dense_solve(a: DMatrix<f64>, b: DVector<f64>) -> Vec<f64> {
    a.lu().solve(&b).expect("reference system is singular").iter().copied().collect()
}

/// Value of the basis function of knot `k` at `x`, summing periodic images.
fn basis_at(grid: &UniformGrid1D, k: usize, x: f64) -> f64 {
    let h = grid.spacing();
    if grid.is_periodic() {
        (-3..=3)
            .map(|m| basis_eval((x - grid.knot(k) - m as f64 * grid.length()) / h))
            .sum()
    } else {
        basis_eval((x - grid.knot(k)) / h)
    }
}

/// Spline coefficients from the dense interpolation system: one row per
/// node, plus the two slope rows of a natural grid.
pub fn dense_spline_fit(grid: &UniformGrid1D, samples: &[f64]) -> Vec<f64> {
    let nc = grid.coeff_count();
    let h = grid.spacing();
    let mut a = DMatrix::zeros(nc, nc);
    let mut b = DVector::zeros(nc);
    for (i, s) in samples.iter().enumerate() {
        for k in 0..nc {
            a[(i, k)] = basis_at(grid, k, grid.node(i));
        }
        b[i] = *s;
    }
    if let BoundaryKind::Natural { left_slope, right_slope } = grid.bc() {
        let n = samples.len();
        for (r, (x, d)) in [(grid.xmin(), left_slope), (grid.xmax(), right_slope)].into_iter().enumerate() {
            for k in 0..nc {
                a[(n + r, k)] = basis_deriv((x - grid.knot(k)) / h) / h;
            }
            b[n + r] = d;
        }
    }
    dense_solve(a, b)
}

/// Tensor-product spline coefficients from one dense system over all nodes.
pub fn dense_spline_fit_2d(gx: &UniformGrid1D, gy: &UniformGrid1D, samples: &[f64]) -> Vec<f64> {
    let (nx, ny) = (gx.node_count(), gy.node_count());
    let (cx, cy) = (gx.coeff_count(), gy.coeff_count());
    let ax = interpolation_rows(gx);
    let ay = interpolation_rows(gy);
    // Kronecker product of the two 1D systems; the slope rows carry zero data.
    let a = ax.kronecker(&ay);
    let mut b = DVector::zeros(cx * cy);
    for i in 0..nx {
        for j in 0..ny {
            b[i * cy + j] = samples[i * ny + j];
        }
    }
    dense_solve(a, b)
}

fn interpolation_rows(grid: &UniformGrid1D) -> DMatrix<f64> {
    let nc = grid.coeff_count();
    let n = grid.node_count();
    let h = grid.spacing();
    let mut a = DMatrix::zeros(nc, nc);
    for i in 0..n {
        for k in 0..nc {
            a[(i, k)] = basis_at(grid, k, grid.node(i));
        }
    }
    if !grid.is_periodic() {
        for (r, x) in [grid.xmin(), grid.xmax()].into_iter().enumerate() {
            for k in 0..nc {
                a[(n + r, k)] = basis_deriv((x - grid.knot(k)) / h) / h;
            }
        }
    }
    a
}

/// Brute-force deposition: every marker against every node, with periodic
/// images. Markers are not dropped; callers keep them inside natural ranges.
pub fn direct_deposit(pos1: &[f64], pos2: &[f64], w: &[f64], gx: &UniformGrid1D, gy: &UniformGrid1D) -> Vec<f64> {
    let kernel = |g: &UniformGrid1D, node: f64, p: f64| -> f64 {
        let h = g.spacing();
        if g.is_periodic() {
            (-3..=3).map(|m| basis_eval((node - p - m as f64 * g.length()) / h)).sum()
        } else {
            basis_eval((node - p) / h)
        }
    };
    let (nx, ny) = (gx.node_count(), gy.node_count());
    let mut out = vec![0.0; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            out[i * ny + j] = (0..w.len())
                .map(|k| w[k] * kernel(gx, gx.node(i), pos1[k]) * kernel(gy, gy.node(j), pos2[k]))
                .sum();
        }
    }
    out
}

/// Spectral second derivative on `n` periodic points of period `length`,
/// written out as a real circulant matrix.
pub fn spectral_dxx_matrix(n: usize, length: f64) -> DMatrix<f64> {
    let xi2: Vec<f64> = (0..n)
        .map(|m| {
            let s = if 2 * m < n { m as f64 } else { m as f64 - n as f64 };
            (2.0 * PI * s / length).powi(2)
        })
        .collect();
    DMatrix::from_fn(n, n, |i, l| {
        let d = i as f64 - l as f64;
        -(0..n).map(|m| xi2[m] * (2.0 * PI * m as f64 * d / n as f64).cos()).sum::<f64>() / n as f64
    })
}

/// Potential and fields of the compact 2D solver with zero Dirichlet walls
/// in y, obtained from dense systems. Arrays use the `[i * ny + j]` layout.
#[derive(Debug, Clone)]
pub struct DenseFields {
    pub phi: Vec<f64>,
    pub ex: Vec<f64>,
    pub ey: Vec<f64>,
}

pub fn dense_fields_2d(gx: &UniformGrid1D, gy: &UniformGrid1D, rho: &[f64]) -> DenseFields {
    let (nx, ny) = (gx.node_count(), gy.node_count());
    let h = gy.spacing();
    let c = h * h / 12.0;
    let d2 = spectral_dxx_matrix(nx, gx.length());
    let at = |i: usize, j: usize| i * ny + j;

    // Numerov rows on interior y nodes, coupled across x through d2.
    let ni = ny - 2;
    let unknown = |i: usize, j: usize| i * ni + (j - 1);
    let mut a = DMatrix::zeros(nx * ni, nx * ni);
    let mut b = DVector::zeros(nx * ni);
    for i in 0..nx {
        for j in 1..ny - 1 {
            let r = unknown(i, j);
            for l in 0..nx {
                let id = if l == i { 1.0 } else { 0.0 };
                let off = id + c * d2[(i, l)];
                let mid = -2.0 * id + 10.0 * c * d2[(i, l)];
                a[(r, unknown(l, j))] += mid;
                if j > 1 {
                    a[(r, unknown(l, j - 1))] += off;
                }
                if j + 1 < ny - 1 {
                    a[(r, unknown(l, j + 1))] += off;
                }
            }
            b[r] = -c * (rho[at(i, j + 1)] + 10.0 * rho[at(i, j)] + rho[at(i, j - 1)]);
        }
    }
    let inner = dense_solve(a, b);
    let mut phi = vec![0.0; nx * ny];
    for i in 0..nx {
        for j in 1..ny - 1 {
            phi[at(i, j)] = inner[unknown(i, j)];
        }
    }

    // Simpson rows in x, cyclic.
    let dx = gx.spacing();
    let sx = DMatrix::from_fn(nx, nx, |i, l| {
        if i == l {
            2.0 / 3.0
        } else if (i + 1) % nx == l || (l + 1) % nx == i {
            1.0 / 6.0
        } else {
            0.0
        }
    });
    let mut ex = vec![0.0; nx * ny];
    for j in 0..ny {
        let rhs = DVector::from_fn(nx, |i, _| (phi[at((i + nx - 1) % nx, j)] - phi[at((i + 1) % nx, j)]) / (2.0 * dx));
        for (i, v) in dense_solve(sx.clone(), rhs).into_iter().enumerate() {
            ex[at(i, j)] = v;
        }
    }

    // Simpson rows in y with corrected-midpoint boundary cells.
    let dxx = |j: usize| -> Vec<f64> {
        let row = DVector::from_fn(nx, |i, _| phi[at(i, j)]);
        (&d2 * row).iter().copied().collect()
    };
    let last = ny - 1;
    let (d0, d1, dm, dn) = (dxx(0), dxx(1), dxx(last - 1), dxx(last));
    let sy = DMatrix::from_fn(ny, ny, |j, l| match j {
        0 => [0.5, 0.5].get(l).copied().unwrap_or(0.0),
        _ if j == last => {
            if l + 1 == last || l == last {
                0.5
            } else {
                0.0
            }
        }
        _ if l == j => 2.0 / 3.0,
        _ if l + 1 == j || j + 1 == l => 1.0 / 6.0,
        _ => 0.0,
    });
    let mut ey = vec![0.0; nx * ny];
    for i in 0..nx {
        let p = |j: usize| phi[at(i, j)];
        let r = |j: usize| rho[at(i, j)];
        let rhs = DVector::from_fn(ny, |j, _| {
            if j == 0 {
                (p(0) - p(1) + c * (r(1) - r(0)) + c * (d1[i] - d0[i])) / h
            } else if j == last {
                (p(last - 1) - p(last) + c * (r(last) - r(last - 1)) + c * (dn[i] - dm[i])) / h
            } else {
                (p(j - 1) - p(j + 1)) / (2.0 * h)
            }
        });
        for (j, v) in dense_solve(sy.clone(), rhs).into_iter().enumerate() {
            ey[at(i, j)] = v;
        }
    }
    DenseFields { phi, ex, ey }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
