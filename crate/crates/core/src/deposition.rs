//! Scatter of spline-weighted markers back onto grid nodes.
//!
//! Every marker carries the spline coefficient it was seeded with and
//! contributes `w * S((x_i - X) / dx) * S((y_j - Y) / dy)` to each covering
//! node. Periodic dimensions wrap; in natural dimensions contributions that
//! land on nodes outside `[0, n_cells]` are not stored and are reported as
//! `lost` instead, so no mass ever piles up at a wall.
//!
//! Accumulation is sequential in marker order, which makes every deposit
//! bit-reproducible.

use crate::error::{ensure_finite, Error, Result};
use crate::spline::{covering, Spline2D, UniformGrid1D};

/// Lagrangian markers seeded on the knots of a 2D spline.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    pub pos1: Vec<f64>,
    pub pos2: Vec<f64>,
    pub weights: Vec<f64>,
    shape: (usize, usize),
}

impl ParticleSet {
    pub fn new(pos1: Vec<f64>, pos2: Vec<f64>, weights: Vec<f64>, shape: (usize, usize)) -> Result<Self> {
        let n = shape.0 * shape.1;
        for len in [pos1.len(), pos2.len(), weights.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        Ok(Self {
            pos1,
            pos2,
            weights,
            shape,
        })
    }

    /// One marker per knot of `spline`, carrying that knot's coefficient.
    pub fn seed(spline: &Spline2D) -> Self {
        let (gx, gy) = spline.grids();
        let (n1, n2) = spline.shape();
        let kx = gx.knots();
        let ky = gy.knots();
        let mut pos1 = Vec::with_capacity(n1 * n2);
        let mut pos2 = Vec::with_capacity(n1 * n2);
        for x in &kx {
            for y in &ky {
                pos1.push(*x);
                pos2.push(*y);
            }
        }
        Self {
            pos1,
            pos2,
            weights: spline.coeffs().to_vec(),
            shape: (n1, n2),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same weights, new positions.
    pub fn with_positions(&self, pos1: Vec<f64>, pos2: Vec<f64>) -> Result<Self> {
        Self::new(pos1, pos2, self.weights.clone(), self.shape)
    }

    pub fn check_finite(&self) -> Result<()> {
        ensure_finite(&self.pos1, "marker positions")?;
        ensure_finite(&self.pos2, "marker positions")?;
        ensure_finite(&self.weights, "marker weights")
    }
}

/// Node values produced by a deposit, plus the weight that fell outside
/// the node range of a natural dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Deposit {
    pub values: Vec<f64>,
    pub lost: f64,
}

#[inline]
fn node_indices(grid: &UniformGrid1D, x: f64) -> ([i64; 4], [f64; 4]) {
    let (mut idx, w) = covering(grid, x);
    if !grid.is_periodic() {
        // covering() returns coefficient indices; shift back to node indices
        for i in idx.iter_mut() {
            *i -= 1;
        }
    }
    (idx, w)
}

fn check_inputs(pos1: &[f64], pos2: &[f64], weights: &[f64]) -> Result<()> {
    if pos1.len() != weights.len() || pos2.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: pos1.len().min(pos2.len()),
        });
    }
    ensure_finite(pos1, "marker positions")?;
    ensure_finite(pos2, "marker positions")?;
    ensure_finite(weights, "marker weights")
}

/// Raw 2D scatter used by both phase-space and guiding-center deposits.
pub fn deposit_2d(pos1: &[f64], pos2: &[f64], weights: &[f64], gx: &UniformGrid1D, gy: &UniformGrid1D) -> Result<Deposit> {
    check_inputs(pos1, pos2, weights)?;
    let nx = gx.node_count() as i64;
    let ny = gy.node_count() as i64;
    let mut values = vec![0.0; (nx * ny) as usize];
    let mut lost = 0.0;
    for ((&x, &y), &w) in pos1.iter().zip(pos2).zip(weights) {
        let (ix, wx) = node_indices(gx, x);
        let (iy, wy) = node_indices(gy, y);
        for a in 0..4 {
            let wa = w * wx[a];
            if ix[a] < 0 || ix[a] >= nx {
                lost += wa;
                continue;
            }
            let base = (ix[a] * ny) as usize;
            for b in 0..4 {
                let c = wa * wy[b];
                if iy[b] < 0 || iy[b] >= ny {
                    lost += c;
                } else {
                    values[base + iy[b] as usize] += c;
                }
            }
        }
    }
    Ok(Deposit { values, lost })
}

/// Weight that [`deposit_2d`] would report as lost, without building the grid.
pub fn off_grid_weight(p: &ParticleSet, gx: &UniformGrid1D, gy: &UniformGrid1D) -> Result<f64> {
    check_inputs(&p.pos1, &p.pos2, &p.weights)?;
    let nx = gx.node_count() as i64;
    let ny = gy.node_count() as i64;
    let mut lost = 0.0;
    for ((&x, &y), &w) in p.pos1.iter().zip(&p.pos2).zip(&p.weights) {
        let (ix, wx) = node_indices(gx, x);
        let (iy, wy) = node_indices(gy, y);
        for a in 0..4 {
            let wa = w * wx[a];
            if ix[a] < 0 || ix[a] >= nx {
                lost += wa;
                continue;
            }
            for b in 0..4 {
                if iy[b] < 0 || iy[b] >= ny {
                    lost += wa * wy[b];
                }
            }
        }
    }
    Ok(lost)
}

/// Phase-space remap sum: `f(x_i, v_j) = sum_k w_k S(x_i - X_k) S(v_j - V_k)`.
pub fn deposit_phase_space(p: &ParticleSet, gx: &UniformGrid1D, gy: &UniformGrid1D) -> Result<Deposit> {
    deposit_2d(&p.pos1, &p.pos2, &p.weights, gx, gy)
}

/// Guiding-center density deposit; same kernel as [`deposit_phase_space`].
pub fn deposit_density_2d(p: &ParticleSet, gx: &UniformGrid1D, gy: &UniformGrid1D) -> Result<Deposit> {
    deposit_2d(&p.pos1, &p.pos2, &p.weights, gx, gy)
}

/// Charge density `rho(x_i) = dv * sum_k w_k S((x_i - X_k) / dx)` on a periodic grid.
pub fn deposit_charge(p: &ParticleSet, gx: &UniformGrid1D, dv: f64) -> Result<Vec<f64>> {
    deposit_charge_raw(&p.pos1, &p.weights, gx, dv)
}

pub fn deposit_charge_raw(pos: &[f64], weights: &[f64], gx: &UniformGrid1D, dv: f64) -> Result<Vec<f64>> {
    if !(dv > 0.0) {
        return Err(Error::InvalidArgument(format!("dv must be positive, got {dv}")));
    }
    if !gx.is_periodic() {
        return Err(Error::InvalidGrid("charge deposition needs a periodic grid".into()));
    }
    if pos.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: pos.len(),
        });
    }
    ensure_finite(pos, "marker positions")?;
    ensure_finite(weights, "marker weights")?;
    let mut rho = vec![0.0; gx.node_count()];
    for (&x, &w) in pos.iter().zip(weights) {
        let (idx, wx) = covering(gx, x);
        for m in 0..4 {
            rho[idx[m] as usize] += w * wx[m];
        }
    }
    for r in rho.iter_mut() {
        *r *= dv;
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::{basis_eval, fit_2d};
    use proptest::prelude::*;

    /// Direct summation over every (marker, node) pair, periodic images included.
    fn direct_sum(p: &ParticleSet, gx: &UniformGrid1D, gy: &UniformGrid1D) -> Vec<f64> {
        let (nx, ny) = (gx.node_count(), gy.node_count());
        let kernel = |g: &UniformGrid1D, node: f64, x: f64| -> f64 {
            let h = g.spacing();
            if g.is_periodic() {
                (-3..=3).map(|m| basis_eval((node - x - m as f64 * g.length()) / h)).sum()
            } else {
                basis_eval((node - x) / h)
            }
        };
        let mut out = vec![0.0; nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                let mut s = 0.0;
                for k in 0..p.len() {
                    s += p.weights[k] * kernel(gx, gx.node(i), p.pos1[k]) * kernel(gy, gy.node(j), p.pos2[k]);
                }
                out[i * ny + j] = s;
            }
        }
        out
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64)
    }

    fn random_particles(n: usize, gx: &UniformGrid1D, gy: &UniformGrid1D, seed: u64) -> ParticleSet {
        let mut s = seed;
        let mut pos1 = Vec::new();
        let mut pos2 = Vec::new();
        let mut w = Vec::new();
        for _ in 0..n {
            pos1.push(gx.xmin() - 0.5 * gx.length() + 2.0 * gx.length() * lcg(&mut s));
            pos2.push(gy.xmin() - 2.0 * gy.spacing() + (gy.length() + 4.0 * gy.spacing()) * lcg(&mut s));
            w.push(lcg(&mut s) * 2.0 - 0.5);
        }
        ParticleSet::new(pos1, pos2, w, (n, 1)).unwrap()
    }

    #[test]
    fn single_marker_at_node() {
        let gx = UniformGrid1D::periodic(0.0, 8.0, 8).unwrap();
        let gy = UniformGrid1D::natural(-4.0, 4.0, 8).unwrap();
        let p = ParticleSet::new(vec![3.0], vec![0.0], vec![2.5], (1, 1)).unwrap();
        let d = deposit_phase_space(&p, &gx, &gy).unwrap();
        let ny = gy.node_count();
        let k = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0];
        for a in 0..3 {
            for b in 0..3 {
                let v = d.values[(2 + a) * ny + (3 + b)];
                assert!((v - 2.5 * k[a] * k[b]).abs() < 1e-15);
            }
        }
        let total: f64 = d.values.iter().sum();
        assert!((total - 2.5).abs() < 1e-14);
        assert_eq!(d.lost, 0.0);
    }

    #[test]
    fn identity_motion_reproduces_samples() {
        let gx = UniformGrid1D::periodic(0.0, 4.0, 16).unwrap();
        let gy = UniformGrid1D::natural(-3.0, 3.0, 12).unwrap();
        let mut f = Vec::new();
        for x in gx.nodes() {
            for y in gy.nodes() {
                f.push((1.0 + 0.3 * (x * 1.5).cos()) * (-y * y / 2.0).exp());
            }
        }
        let s = fit_2d(&f, gx, gy).unwrap();
        let p = ParticleSet::seed(&s);
        let d = deposit_phase_space(&p, &gx, &gy).unwrap();
        for (a, b) in d.values.iter().zip(&f) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_direct_summation() {
        let gx = UniformGrid1D::periodic(0.0, 5.0, 10).unwrap();
        let gy = UniformGrid1D::natural(-2.0, 2.0, 9).unwrap();
        let p = random_particles(200, &gx, &gy, 7);
        let d = deposit_phase_space(&p, &gx, &gy).unwrap();
        let oracle = direct_sum(&p, &gx, &gy);
        for (a, b) in d.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
        let d2 = deposit_density_2d(&p, &gx, &gy).unwrap();
        assert_eq!(d, d2);
    }

    #[test]
    fn charge_matches_direct_summation() {
        let gx = UniformGrid1D::periodic(0.0, 5.0, 10).unwrap();
        let gy = UniformGrid1D::natural(-2.0, 2.0, 9).unwrap();
        let p = random_particles(200, &gx, &gy, 11);
        let dv = 0.37;
        let rho = deposit_charge(&p, &gx, dv).unwrap();
        for (i, r) in rho.iter().enumerate() {
            let xi = gx.node(i);
            let s: f64 = (0..p.len())
                .map(|k| {
                    p.weights[k]
                        * (-3..=3)
                            .map(|m| basis_eval((xi - p.pos1[k] - m as f64 * gx.length()) / gx.spacing()))
                            .sum::<f64>()
                })
                .sum();
            assert!((r - dv * s).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_weights_zero_charge() {
        let gx = UniformGrid1D::periodic(0.0, 1.0, 8).unwrap();
        let p = ParticleSet::new(vec![0.1, 0.5], vec![0.0, 0.0], vec![0.0, 0.0], (2, 1)).unwrap();
        assert!(deposit_charge(&p, &gx, 0.1).unwrap().iter().all(|r| *r == 0.0));
        assert!(deposit_charge(&p, &gx, 0.0).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        let gx = UniformGrid1D::periodic(0.0, 1.0, 8).unwrap();
        let gy = UniformGrid1D::natural(0.0, 1.0, 8).unwrap();
        let p = ParticleSet::new(vec![f64::NAN], vec![0.0], vec![1.0], (1, 1)).unwrap();
        assert!(matches!(deposit_phase_space(&p, &gx, &gy), Err(Error::NonFinite(_))));
    }

    #[test]
    fn far_outside_markers_are_lost_not_clamped() {
        let gx = UniformGrid1D::periodic(0.0, 1.0, 8).unwrap();
        let gy = UniformGrid1D::natural(-1.0, 1.0, 8).unwrap();
        let p = ParticleSet::new(vec![0.3], vec![5.0], vec![1.5], (1, 1)).unwrap();
        let d = deposit_phase_space(&p, &gx, &gy).unwrap();
        assert!(d.values.iter().all(|v| *v == 0.0));
        assert!((d.lost - 1.5).abs() < 1e-15);
    }

    #[test]
    fn off_grid_weight_matches_deposit() {
        let gx = UniformGrid1D::periodic(0.0, 1.0, 8).unwrap();
        let gy = UniformGrid1D::natural(-1.0, 1.0, 8).unwrap();
        let p = ParticleSet::new(vec![0.3, 0.9, 0.1], vec![-1.1, 0.95, 0.2], vec![1.5, -0.5, 2.0], (3, 1)).unwrap();
        let d = deposit_phase_space(&p, &gx, &gy).unwrap();
        assert!(d.lost != 0.0);
        assert_eq!(off_grid_weight(&p, &gx, &gy).unwrap(), d.lost);
    }

    proptest! {
        #[test]
        fn interior_mass_is_conserved(xs in proptest::collection::vec((0.0f64..10.0, 1.0f64..7.0, -1.0f64..1.0), 1..60)) {
            let gx = UniformGrid1D::periodic(0.0, 10.0, 20).unwrap();
            let gy = UniformGrid1D::natural(0.0, 8.0, 16).unwrap();
            let p = ParticleSet::new(
                xs.iter().map(|t| t.0).collect(),
                xs.iter().map(|t| t.1).collect(),
                xs.iter().map(|t| t.2).collect(),
                (xs.len(), 1),
            ).unwrap();
            let d = deposit_phase_space(&p, &gx, &gy).unwrap();
            let total: f64 = d.values.iter().sum();
            let w: f64 = p.weights.iter().map(|w| w.abs()).sum();
            prop_assert!((total - p.total_weight()).abs() <= 1e-12 * w.max(1.0));
            prop_assert_eq!(d.lost, 0.0);
        }

        #[test]
        fn deposit_is_linear_in_weights(a in -2.0f64..2.0, b in -2.0f64..2.0, seed in 0u64..1000) {
            let gx = UniformGrid1D::periodic(0.0, 5.0, 10).unwrap();
            let gy = UniformGrid1D::natural(-2.0, 2.0, 9).unwrap();
            let p1 = random_particles(40, &gx, &gy, seed);
            let mut p2 = p1.clone();
            let mut s = seed + 99;
            for w in p2.weights.iter_mut() { *w = lcg(&mut s); }
            let mut mix = p1.clone();
            for k in 0..mix.len() { mix.weights[k] = a * p1.weights[k] + b * p2.weights[k]; }
            let d1 = deposit_phase_space(&p1, &gx, &gy).unwrap();
            let d2 = deposit_phase_space(&p2, &gx, &gy).unwrap();
            let dm = deposit_phase_space(&mix, &gx, &gy).unwrap();
            for i in 0..dm.values.len() {
                prop_assert!((dm.values[i] - (a * d1.values[i] + b * d2.values[i])).abs() < 1e-12);
            }
        }

        #[test]
        fn periodic_shift_is_equivariant(m in 0usize..16, seed in 0u64..1000) {
            let gx = UniformGrid1D::periodic(0.0, 8.0, 16).unwrap();
            let gy = UniformGrid1D::natural(-2.0, 2.0, 9).unwrap();
            let p = random_particles(30, &gx, &gy, seed);
            let mut shifted = p.clone();
            for x in shifted.pos1.iter_mut() { *x += m as f64 * gx.spacing(); }
            let d = deposit_phase_space(&p, &gx, &gy).unwrap();
            let ds = deposit_phase_space(&shifted, &gx, &gy).unwrap();
            let ny = gy.node_count();
            for i in 0..16 {
                for j in 0..ny {
                    let a = d.values[i * ny + j];
                    let b = ds.values[((i + m) % 16) * ny + j];
                    prop_assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }
}
