//! Tridiagonal and cyclic tridiagonal solvers.
//!
//! Both solvers are O(n). The cyclic variant uses a Sherman-Morrison rank-one
//! correction on top of a plain Thomas sweep.

use crate::error::{Error, Result};

/// Solves `A x = rhs` in place for a tridiagonal `A`.
///
/// `lower[i]` multiplies `x[i-1]` in row `i` (`lower[0]` is ignored),
/// `upper[i]` multiplies `x[i+1]` (`upper[n-1]` is ignored).
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if lower.len() != n || upper.len() != n || rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rhs.len().min(lower.len()).min(upper.len()),
        });
    }
    if n == 0 {
        return Ok(());
    }
    let mut gam = vec![0.0; n];
    let mut bet = diag[0];
    if bet == 0.0 {
        return Err(Error::Singular("tridiagonal pivot"));
    }
    rhs[0] /= bet;
    for i in 1..n {
        gam[i] = upper[i - 1] / bet;
        bet = diag[i] - lower[i] * gam[i];
        if bet == 0.0 {
            return Err(Error::Singular("tridiagonal pivot"));
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / bet;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= gam[i + 1] * rhs[i + 1];
    }
    Ok(())
}

/// Pre-factored solver for the constant-stencil circulant system
/// `a x[i-1] + b x[i] + c x[i+1] = rhs[i]` with periodic wrap.
///
/// Factorization is done once; each solve is two Thomas sweeps.
#[derive(Debug, Clone)]
pub struct CyclicTridiagonal {
    n: usize,
    a: f64,
    b: f64,
    c: f64,
    // Thomas factors of the modified matrix.
    gam: Vec<f64>,
    bet: Vec<f64>,
    lower: Vec<f64>,
    // Sherman-Morrison correction vector z = A'^{-1} u and the scalar factor.
    z: Vec<f64>,
    gamma: f64,
}

impl CyclicTridiagonal {
    pub fn new(n: usize, a: f64, b: f64, c: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGrid(format!("cyclic tridiagonal system needs n >= 3, got {n}")));
        }
        // A = A' + u v^T with u = (gamma, 0, .., 0, c), v = (1, 0, .., 0, a / gamma).
        let gamma = -b;
        let mut diag = vec![b; n];
        diag[0] = b - gamma;
        diag[n - 1] = b - a * c / gamma;
        let lower = {
            let mut l = vec![a; n];
            l[0] = 0.0;
            l
        };
        let mut gam = vec![0.0; n];
        let mut bet = vec![0.0; n];
        bet[0] = diag[0];
        if bet[0] == 0.0 {
            return Err(Error::Singular("cyclic tridiagonal pivot"));
        }
        for i in 1..n {
            gam[i] = c / bet[i - 1];
            bet[i] = diag[i] - lower[i] * gam[i];
            if bet[i] == 0.0 {
                return Err(Error::Singular("cyclic tridiagonal pivot"));
            }
        }
        let mut solver = Self {
            n,
            a,
            b,
            c,
            gam,
            bet,
            lower,
            z: Vec::new(),
            gamma,
        };
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = c;
        solver.sweep(&mut u);
        solver.z = u;
        Ok(solver)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn stencil(&self) -> (f64, f64, f64) {
        (self.a, self.b, self.c)
    }

    fn sweep(&self, x: &mut [f64]) {
        let n = self.n;
        x[0] /= self.bet[0];
        for i in 1..n {
            x[i] = (x[i] - self.lower[i] * x[i - 1]) / self.bet[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.gam[i + 1] * x[i + 1];
        }
    }

    /// Solves in place.
    pub fn solve(&self, rhs: &mut [f64]) -> Result<()> {
        if rhs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.len(),
            });
        }
        self.sweep(rhs);
        let n = self.n;
        let vy = rhs[0] + self.a / self.gamma * rhs[n - 1];
        let vz = self.z[0] + self.a / self.gamma * self.z[n - 1];
        let fact = vy / (1.0 + vz);
        for (x, z) in rhs.iter_mut().zip(&self.z) {
            *x -= fact * z;
        }
        Ok(())
    }
}
