//! Forward integration of the characteristics `dX/dt = U(X, t)`.
//!
//! A [`FieldProvider`] turns marker positions into a field (deposit, Poisson
//! solve, spline fit) and evaluates the advection velocity from it. Pushers
//! are explicit Runge-Kutta schemes over a Butcher tableau plus the Verlet
//! scheme for second-order (`x' = v`, `v' = force`) systems.
//!
//! The field at the start of a step is passed in by the caller; each pusher
//! returns the field solved at the final marker positions so that the next
//! step can reuse it.

use std::fmt;
use std::str::FromStr;

use crate::analytic::HillCoefficient;
use crate::deposition::{deposit_2d, deposit_charge_raw, ParticleSet};
use crate::error::{ensure_finite, Error, Result};
use crate::field1d::{FieldState1D, Poisson1D};
use crate::field2d::{FieldState2D, Poisson2D, YBoundary};
use crate::spline::UniformGrid1D;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pusher {
    Euler,
    Rk2,
    Rk3,
    Rk4,
    Verlet,
}

impl Pusher {
    pub fn name(&self) -> &'static str {
        match self {
            Pusher::Euler => "euler",
            Pusher::Rk2 => "rk2",
            Pusher::Rk3 => "rk3",
            Pusher::Rk4 => "rk4",
            Pusher::Verlet => "verlet",
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            Pusher::Euler => 1,
            Pusher::Rk2 | Pusher::Verlet => 2,
            Pusher::Rk3 => 3,
            Pusher::Rk4 => 4,
        }
    }
}

impl fmt::Display for Pusher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pusher {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euler" => Ok(Pusher::Euler),
            "rk2" => Ok(Pusher::Rk2),
            "rk3" => Ok(Pusher::Rk3),
            "rk4" => Ok(Pusher::Rk4),
            "verlet" => Ok(Pusher::Verlet),
            other => Err(format!("unknown pusher '{other}' (euler, rk2, rk3, rk4, verlet)")),
        }
    }
}

/// Explicit Butcher tableau.
#[derive(Debug, Clone, PartialEq)]
pub struct Tableau {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl Tableau {
    pub fn euler() -> Self {
        Self {
            a: vec![vec![]],
            b: vec![1.0],
            c: vec![0.0],
        }
    }

    pub fn midpoint() -> Self {
        Self {
            a: vec![vec![], vec![0.5]],
            b: vec![0.0, 1.0],
            c: vec![0.0, 0.5],
        }
    }

    pub fn heun() -> Self {
        Self {
            a: vec![vec![], vec![1.0]],
            b: vec![0.5, 0.5],
            c: vec![0.0, 1.0],
        }
    }

    /// Kutta's third-order scheme.
    pub fn kutta3() -> Self {
        Self {
            a: vec![vec![], vec![0.5], vec![-1.0, 2.0]],
            b: vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
            c: vec![0.0, 0.5, 1.0],
        }
    }

    pub fn rk4() -> Self {
        Self {
            a: vec![vec![], vec![0.5], vec![0.0, 0.5], vec![0.0, 0.0, 1.0]],
            b: vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            c: vec![0.0, 0.5, 0.5, 1.0],
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }
}

/// Field produced by a provider.
#[derive(Debug, Clone)]
pub enum Fields {
    Vp(FieldState1D),
    Gc(FieldState2D),
    /// Analytic force; nothing to store.
    External,
}

impl Fields {
    pub fn as_vp(&self) -> Option<&FieldState1D> {
        match self {
            Fields::Vp(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_gc(&self) -> Option<&FieldState2D> {
        match self {
            Fields::Gc(f) => Some(f),
            _ => None,
        }
    }
}

/// Source of the advection velocity for a population of markers.
pub trait FieldProvider {
    /// Field generated by markers at the given positions at time `t`.
    fn solve(&mut self, pos1: &[f64], pos2: &[f64], weights: &[f64], t: f64) -> Result<Fields>;

    /// Advection velocity of each marker.
    fn velocity(&self, fields: &Fields, pos1: &[f64], pos2: &[f64], t: f64, u1: &mut [f64], u2: &mut [f64]) -> Result<()>;

    /// Number of `solve` calls so far.
    fn solve_count(&self) -> u64;

    fn grids(&self) -> (UniformGrid1D, UniformGrid1D);

    /// True for `x' = v` systems, where Verlet applies and RK2 is the midpoint rule.
    fn is_second_order(&self) -> bool;
}

fn velocity_shape(pos1: &[f64], pos2: &[f64], u1: &[f64], u2: &[f64]) -> Result<()> {
    let n = pos1.len();
    for len in [pos2.len(), u1.len(), u2.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    Ok(())
}

/// 1D Vlasov-Poisson: `x' = v`, `v' = E(x)`, with `∂x E = ∫ f dv - ρ_i`.
#[derive(Debug)]
pub struct VlasovPoisson {
    gx: UniformGrid1D,
    gv: UniformGrid1D,
    poisson: Poisson1D,
    solves: u64,
}

impl VlasovPoisson {
    pub fn new(gx: UniformGrid1D, gv: UniformGrid1D) -> Result<Self> {
        Ok(Self {
            gx,
            gv,
            poisson: Poisson1D::new(gx)?,
            solves: 0,
        })
    }

    /// Field of a charge density already sampled on the x nodes.
    pub fn field_from_rho(&mut self, rho: &[f64]) -> Result<FieldState1D> {
        self.solves += 1;
        self.poisson.solve(rho)
    }
}

impl FieldProvider for VlasovPoisson {
    fn solve(&mut self, pos1: &[f64], _pos2: &[f64], weights: &[f64], _t: f64) -> Result<Fields> {
        let rho = deposit_charge_raw(pos1, weights, &self.gx, self.gv.spacing())?;
        Ok(Fields::Vp(self.field_from_rho(&rho)?))
    }

    fn velocity(&self, fields: &Fields, pos1: &[f64], pos2: &[f64], _t: f64, u1: &mut [f64], u2: &mut [f64]) -> Result<()> {
        velocity_shape(pos1, pos2, u1, u2)?;
        let e = fields.as_vp().ok_or_else(|| Error::InvalidArgument("expected a 1D field".into()))?;
        for i in 0..pos1.len() {
            u1[i] = pos2[i];
            u2[i] = e.eval(pos1[i]);
        }
        Ok(())
    }

    fn solve_count(&self) -> u64 {
        self.solves
    }

    fn grids(&self) -> (UniformGrid1D, UniformGrid1D) {
        (self.gx, self.gv)
    }

    fn is_second_order(&self) -> bool {
        true
    }
}

/// Guiding-center model: `X' = E⊥ = (E_y, -E_x)`, `-Δφ = ρ`.
#[derive(Debug)]
pub struct GuidingCenter {
    gx: UniformGrid1D,
    gy: UniformGrid1D,
    poisson: Poisson2D,
    solves: u64,
}

impl GuidingCenter {
    pub fn new(gx: UniformGrid1D, gy: UniformGrid1D, ybc: YBoundary) -> Result<Self> {
        Ok(Self {
            gx,
            gy,
            poisson: Poisson2D::new(gx, gy, ybc)?,
            solves: 0,
        })
    }

    pub fn field_from_rho(&mut self, rho: &[f64]) -> Result<FieldState2D> {
        self.solves += 1;
        self.poisson.solve_fields(rho)
    }

    pub fn poisson(&self) -> &Poisson2D {
        &self.poisson
    }
}

impl FieldProvider for GuidingCenter {
    fn solve(&mut self, pos1: &[f64], pos2: &[f64], weights: &[f64], _t: f64) -> Result<Fields> {
        let rho = deposit_2d(pos1, pos2, weights, &self.gx, &self.gy)?.values;
        Ok(Fields::Gc(self.field_from_rho(&rho)?))
    }

    fn velocity(&self, fields: &Fields, pos1: &[f64], pos2: &[f64], _t: f64, u1: &mut [f64], u2: &mut [f64]) -> Result<()> {
        velocity_shape(pos1, pos2, u1, u2)?;
        let e = fields.as_gc().ok_or_else(|| Error::InvalidArgument("expected a 2D field".into()))?;
        for i in 0..pos1.len() {
            let (a, b) = e.drift(pos1[i], pos2[i]);
            u1[i] = a;
            u2[i] = b;
        }
        Ok(())
    }

    fn solve_count(&self) -> u64 {
        self.solves
    }

    fn grids(&self) -> (UniformGrid1D, UniformGrid1D) {
        (self.gx, self.gy)
    }

    fn is_second_order(&self) -> bool {
        false
    }
}

/// External linear force `v' = -a(t) x`.
#[derive(Debug)]
pub struct HillForce {
    gx: UniformGrid1D,
    gv: UniformGrid1D,
    pub coeff: HillCoefficient,
    solves: u64,
}

impl HillForce {
    pub fn new(gx: UniformGrid1D, gv: UniformGrid1D, coeff: HillCoefficient) -> Self {
        Self { gx, gv, coeff, solves: 0 }
    }
}

impl FieldProvider for HillForce {
    fn solve(&mut self, _pos1: &[f64], _pos2: &[f64], _weights: &[f64], _t: f64) -> Result<Fields> {
        self.solves += 1;
        Ok(Fields::External)
    }

    fn velocity(&self, _fields: &Fields, pos1: &[f64], pos2: &[f64], t: f64, u1: &mut [f64], u2: &mut [f64]) -> Result<()> {
        velocity_shape(pos1, pos2, u1, u2)?;
        let a = self.coeff.eval(t);
        for i in 0..pos1.len() {
            u1[i] = pos2[i];
            u2[i] = -a * pos1[i];
        }
        Ok(())
    }

    fn solve_count(&self) -> u64 {
        self.solves
    }

    fn grids(&self) -> (UniformGrid1D, UniformGrid1D) {
        (self.gx, self.gv)
    }

    fn is_second_order(&self) -> bool {
        true
    }
}

/// Tableau used for `pusher` on this provider; `None` for Verlet.
pub fn tableau_for(pusher: Pusher, provider: &dyn FieldProvider) -> Option<Tableau> {
    match pusher {
        Pusher::Euler => Some(Tableau::euler()),
        Pusher::Rk2 if provider.is_second_order() => Some(Tableau::midpoint()),
        Pusher::Rk2 => Some(Tableau::heun()),
        Pusher::Rk3 => Some(Tableau::kutta3()),
        Pusher::Rk4 => Some(Tableau::rk4()),
        Pusher::Verlet => None,
    }
}

fn wrap_all(grid: &UniformGrid1D, pos: &mut [f64]) {
    if grid.is_periodic() {
        for x in pos.iter_mut() {
            *x = grid.wrap(*x);
        }
    }
}

/// Advances markers by one step of an explicit Runge-Kutta scheme.
///
/// `fields_n` must be the field of `p` at time `t`. Returns the pushed markers
/// (periodic coordinates wrapped) and the field solved at their new positions.
pub fn push_rk(
    provider: &mut dyn FieldProvider,
    tab: &Tableau,
    p: &ParticleSet,
    fields_n: &Fields,
    t: f64,
    dt: f64,
) -> Result<(ParticleSet, Fields)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let n = p.len();
    let s = tab.stages();
    let mut k1: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut k2: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut x1 = vec![0.0; n];
    let mut x2 = vec![0.0; n];
    for i in 0..s {
        let field_i;
        let fields = if i == 0 {
            x1.copy_from_slice(&p.pos1);
            x2.copy_from_slice(&p.pos2);
            fields_n
        } else {
            for m in 0..n {
                let (mut a1, mut a2) = (0.0, 0.0);
                for (j, aij) in tab.a[i].iter().enumerate() {
                    if *aij != 0.0 {
                        a1 += aij * k1[j][m];
                        a2 += aij * k2[j][m];
                    }
                }
                x1[m] = p.pos1[m] + dt * a1;
                x2[m] = p.pos2[m] + dt * a2;
            }
            field_i = provider.solve(&x1, &x2, &p.weights, t + tab.c[i] * dt)?;
            &field_i
        };
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        provider.velocity(fields, &x1, &x2, t + tab.c[i] * dt, &mut u1, &mut u2)?;
        k1.push(u1);
        k2.push(u2);
    }
    let (g1, g2) = provider.grids();
    let mut pos1 = p.pos1.clone();
    let mut pos2 = p.pos2.clone();
    for m in 0..n {
        let (mut a1, mut a2) = (0.0, 0.0);
        for (j, bj) in tab.b.iter().enumerate() {
            if *bj != 0.0 {
                a1 += bj * k1[j][m];
                a2 += bj * k2[j][m];
            }
        }
        pos1[m] += dt * a1;
        pos2[m] += dt * a2;
    }
    ensure_finite(&pos1, "pushed marker positions")?;
    ensure_finite(&pos2, "pushed marker positions")?;
    wrap_all(&g1, &mut pos1);
    wrap_all(&g2, &mut pos2);
    let out = p.with_positions(pos1, pos2)?;
    let fields = provider.solve(&out.pos1, &out.pos2, &out.weights, t + dt)?;
    Ok((out, fields))
}

/// Velocity Verlet for `x' = v`, `v' = F(x, t)`: half kick, drift, field
/// solve at the drifted positions, half kick.
pub fn push_verlet(provider: &mut dyn FieldProvider, p: &ParticleSet, fields_n: &Fields, t: f64, dt: f64) -> Result<(ParticleSet, Fields)> {
    if !provider.is_second_order() {
        return Err(Error::InvalidArgument("Verlet needs an x' = v system".into()));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let n = p.len();
    let (g1, g2) = provider.grids();
    let mut u1 = vec![0.0; n];
    let mut f = vec![0.0; n];
    provider.velocity(fields_n, &p.pos1, &p.pos2, t, &mut u1, &mut f)?;
    let mut v: Vec<f64> = p.pos2.iter().zip(&f).map(|(v, f)| v + 0.5 * dt * f).collect();
    let mut x: Vec<f64> = p.pos1.iter().zip(&v).map(|(x, v)| x + dt * v).collect();
    ensure_finite(&x, "pushed marker positions")?;
    wrap_all(&g1, &mut x);
    let fields = provider.solve(&x, &v, &p.weights, t + dt)?;
    provider.velocity(&fields, &x, &v, t + dt, &mut u1, &mut f)?;
    for (vi, fi) in v.iter_mut().zip(&f) {
        *vi += 0.5 * dt * fi;
    }
    ensure_finite(&v, "pushed marker velocities")?;
    wrap_all(&g2, &mut v);
    Ok((p.with_positions(x, v)?, fields))
}

/// Dispatches to the tableau or Verlet pusher.
pub fn push(
    provider: &mut dyn FieldProvider,
    pusher: Pusher,
    p: &ParticleSet,
    fields_n: &Fields,
    t: f64,
    dt: f64,
) -> Result<(ParticleSet, Fields)> {
    match tableau_for(pusher, provider) {
        Some(tab) => push_rk(provider, &tab, p, fields_n, t, dt),
        None => push_verlet(provider, p, fields_n, t, dt),
    }
}
