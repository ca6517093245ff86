//! Time marching for the three schemes.
//!
//! * Forward semi-Lagrangian (FSL): markers seeded on the spline knots with
//!   the coefficients as weights are pushed one step, deposited back onto the
//!   nodes, and the coefficients are refitted (remap).
//! * Hybrid: the same push, but the remap only happens on steps where
//!   `(step_index + 1) % T == 0`; in between the markers keep their weights.
//! * Backward semi-Lagrangian (BSL): the old spline is interpolated at the
//!   feet of the characteristics ending at the nodes. Phase-space models use
//!   Strang splitting (half x, full v, half x); the guiding-center model uses
//!   a backward midpoint rule in a frozen field extrapolated to mid-step,
//!   `1.5 U^n - 0.5 U^{n-1}`.

use std::borrow::Cow;

use crate::analytic::HillCoefficient;
use crate::cases::{case_grids, initial_nodes, Model};
use crate::characteristics::{push, FieldProvider, Fields, GuidingCenter, HillForce, VlasovPoisson};
use crate::config::{CaseConfig, Scheme};
use crate::deposition::{deposit_phase_space, off_grid_weight, ParticleSet};
use crate::diagnostics as diag;
use crate::error::{Error, Result};
use crate::field2d::FieldState2D;
use crate::spline::{Fitter2D, Spline2D, UniformGrid1D};

#[derive(Debug)]
enum Engine {
    Vp(VlasovPoisson),
    Gc(GuidingCenter),
    Hill(HillForce),
}

impl Engine {
    fn provider(&mut self) -> &mut dyn FieldProvider {
        match self {
            Engine::Vp(p) => p,
            Engine::Gc(p) => p,
            Engine::Hill(p) => p,
        }
    }

    fn provider_ref(&self) -> &dyn FieldProvider {
        match self {
            Engine::Vp(p) => p,
            Engine::Gc(p) => p,
            Engine::Hill(p) => p,
        }
    }

    /// Field of a distribution given by its node values.
    fn fields_from_nodes(&mut self, f: &[f64], g2: &UniformGrid1D) -> Result<Fields> {
        match self {
            Engine::Vp(p) => {
                let nv = g2.node_count();
                let dv = g2.spacing();
                let rho: Vec<f64> = f.chunks(nv).map(|row| dv * row.iter().sum::<f64>()).collect();
                Ok(Fields::Vp(p.field_from_rho(&rho)?))
            }
            Engine::Gc(p) => Ok(Fields::Gc(p.field_from_rho(f)?)),
            Engine::Hill(_) => Ok(Fields::External),
        }
    }
}

/// Channel names of the time series, per model.
pub fn channel_names(model: Model) -> &'static [&'static str] {
    match model {
        Model::VlasovPoisson => &[
            "t",
            "mass",
            "l1",
            "l2",
            "momentum",
            "kinetic_energy",
            "electric_energy",
            "total_energy",
            "e1",
            "e2",
            "e3",
            "lost",
        ],
        Model::GuidingCenter => &[
            "t",
            "mass",
            "l1",
            "l2",
            "enstrophy",
            "energy",
            "e_l2",
            "perturbation_energy",
            "lost",
        ],
        Model::Hill => &["t", "mass", "l2", "xrms", "lost"],
    }
}

#[derive(Debug)]
pub struct Simulation {
    cfg: CaseConfig,
    model: Model,
    g1: UniformGrid1D,
    g2: UniformGrid1D,
    fitter: Fitter2D,
    engine: Engine,
    f: Spline2D,
    /// Node values of the current distribution; `None` while hybrid markers are off the grid.
    f_nodes: Option<Vec<f64>>,
    particles: ParticleSet,
    fields: Fields,
    prev_fields: Option<Fields>,
    t: f64,
    step: u64,
    lost: f64,
    /// Off-grid share of the freshly seeded markers; exterior knots of a
    /// natural grid always overhang the nodes, which is not a loss.
    seed_overhang: f64,
}

impl Simulation {
    pub fn new(cfg: &CaseConfig) -> Result<Self> {
        cfg.validate()?;
        let (g1, g2) = case_grids(cfg)?;
        let nodes = initial_nodes(cfg, &g1, &g2)?;
        Self::with_initial_nodes(cfg, nodes)
    }

    /// Starts from arbitrary node values on the case grids.
    pub fn with_initial_nodes(cfg: &CaseConfig, nodes: Vec<f64>) -> Result<Self> {
        cfg.validate()?;
        let (g1, g2) = case_grids(cfg)?;
        let model = cfg.case.model();
        let mut engine = match model {
            Model::VlasovPoisson => Engine::Vp(VlasovPoisson::new(g1, g2)?),
            Model::GuidingCenter => Engine::Gc(GuidingCenter::new(g1, g2, cfg.y_bc)?),
            Model::Hill => Engine::Hill(HillForce::new(g1, g2, HillCoefficient::new(cfg.hill_a0, cfg.hill_a1)?)),
        };
        let fitter = Fitter2D::new(g1, g2)?;
        let f = fitter.fit(&nodes)?;
        let particles = ParticleSet::seed(&f);
        let seed_overhang = off_grid_weight(&particles, &g1, &g2)?;
        let fields = if cfg.scheme == Scheme::Bsl {
            engine.fields_from_nodes(&nodes, &g2)?
        } else {
            engine.provider().solve(&particles.pos1, &particles.pos2, &particles.weights, 0.0)?
        };
        Ok(Self {
            cfg: cfg.clone(),
            model,
            g1,
            g2,
            fitter,
            engine,
            f,
            f_nodes: Some(nodes),
            particles,
            fields,
            prev_fields: None,
            t: 0.0,
            step: 0,
            lost: 0.0,
            seed_overhang,
        })
    }

    pub fn config(&self) -> &CaseConfig {
        &self.cfg
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn grids(&self) -> (&UniformGrid1D, &UniformGrid1D) {
        (&self.g1, &self.g2)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn spline(&self) -> &Spline2D {
        &self.f
    }

    pub fn particles(&self) -> &ParticleSet {
        &self.particles
    }

    pub fn fields(&self) -> &Fields {
        &self.fields
    }

    /// Cumulative mass that left the natural-boundary domain.
    pub fn lost(&self) -> f64 {
        self.lost
    }

    pub fn solve_count(&self) -> u64 {
        self.engine.provider_ref().solve_count()
    }

    /// True when the markers sit on the knots of the current spline.
    pub fn is_remapped(&self) -> bool {
        self.f_nodes.is_some()
    }

    fn cell(&self) -> f64 {
        self.g1.spacing() * self.g2.spacing()
    }

    /// Node values of the distribution. Between hybrid remaps this deposits
    /// the markers without touching the state.
    pub fn f_nodes(&self) -> Result<Cow<'_, [f64]>> {
        match &self.f_nodes {
            Some(v) => Ok(Cow::Borrowed(v)),
            None => Ok(Cow::Owned(deposit_phase_space(&self.particles, &self.g1, &self.g2)?.values)),
        }
    }

    fn abort(&self, e: Error) -> Error {
        match e {
            Error::NonFinite(what) => Error::NumericAbort {
                step: self.step + 1,
                t: self.t + self.cfg.dt,
                what: what.to_string(),
            },
            other => other,
        }
    }

    /// Advances one time step with the configured scheme.
    pub fn step(&mut self) -> Result<()> {
        let r = match self.cfg.scheme {
            Scheme::Fsl => self.forward(true),
            Scheme::Hybrid => {
                let remap = (self.step + 1).is_multiple_of(self.cfg.remap_every as u64);
                self.forward(remap)
            }
            Scheme::Bsl => match self.model {
                Model::GuidingCenter => self.backward_gc(),
                _ => self.backward_split(),
            },
        };
        r.map_err(|e| self.abort(e))?;
        self.step += 1;
        self.t = self.step as f64 * self.cfg.dt;
        self.check_fields()
    }

    fn check_fields(&self) -> Result<()> {
        let ok = match &self.fields {
            Fields::Vp(e) => e.e.iter().all(|v| v.is_finite()),
            Fields::Gc(e) => e.ex.iter().chain(&e.ey).all(|v| v.is_finite()),
            Fields::External => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NumericAbort {
                step: self.step,
                t: self.t,
                what: "field".into(),
            })
        }
    }

    fn forward(&mut self, remap: bool) -> Result<()> {
        let (pushed, fields) = push(
            self.engine.provider(),
            self.cfg.pusher,
            &self.particles,
            &self.fields,
            self.t,
            self.cfg.dt,
        )?;
        if remap {
            let dep = deposit_phase_space(&pushed, &self.g1, &self.g2)?;
            self.lost += self.cell() * (dep.lost - self.seed_overhang);
            self.f = self.fitter.fit(&dep.values)?;
            self.particles = ParticleSet::seed(&self.f);
            self.seed_overhang = off_grid_weight(&self.particles, &self.g1, &self.g2)?;
            self.f_nodes = Some(dep.values);
        } else {
            self.particles = pushed;
            self.f_nodes = None;
        }
        self.fields = fields;
        Ok(())
    }

    /// Evaluates `spline` at every node foot given by `foot(i, j)`, counting
    /// the mass attributed to feet outside a natural-boundary domain.
    fn interpolate_at_feet(&self, spline: &Spline2D, foot: impl Fn(usize, usize) -> (f64, f64)) -> (Vec<f64>, f64) {
        let (n1, n2) = (self.g1.node_count(), self.g2.node_count());
        let mut out = Vec::with_capacity(n1 * n2);
        let mut outside = 0.0;
        for i in 0..n1 {
            for j in 0..n2 {
                let (a, b) = foot(i, j);
                let v = spline.eval_clamped(a, b);
                if !self.g1.contains(a) || !self.g2.contains(b) {
                    outside += v;
                }
                out.push(v);
            }
        }
        (out, outside * self.cell())
    }

    fn advect_x(&mut self, spline: &Spline2D, h: f64) -> Result<(Spline2D, Vec<f64>)> {
        let x = self.g1.nodes();
        let v = self.g2.nodes();
        let (nodes, out) = self.interpolate_at_feet(spline, |i, j| (x[i] - h * v[j], v[j]));
        self.lost += out;
        Ok((self.fitter.fit(&nodes)?, nodes))
    }

    fn backward_split(&mut self) -> Result<()> {
        let dt = self.cfg.dt;
        let f0 = self.f.clone();
        let (f_half, nodes_half) = self.advect_x(&f0, 0.5 * dt)?;
        let x = self.g1.nodes();
        let v = self.g2.nodes();
        let force: Vec<f64> = match &mut self.engine {
            Engine::Hill(h) => {
                let a = h.coeff.eval(self.t + 0.5 * dt);
                x.iter().map(|x| -a * x).collect()
            }
            engine => match engine.fields_from_nodes(&nodes_half, &self.g2)? {
                Fields::Vp(e) => x.iter().map(|x| e.eval(*x)).collect(),
                _ => unreachable!("split scheme runs on phase-space models"),
            },
        };
        let (nodes_v, out) = self.interpolate_at_feet(&f_half, |i, j| (x[i], v[j] - dt * force[i]));
        self.lost += out;
        let f_v = self.fitter.fit(&nodes_v)?;
        let (f_new, nodes) = self.advect_x(&f_v, 0.5 * dt)?;
        self.fields = self.engine.fields_from_nodes(&nodes, &self.g2)?;
        self.f = f_new;
        self.particles = ParticleSet::seed(&self.f);
        self.f_nodes = Some(nodes);
        Ok(())
    }

    fn backward_gc(&mut self) -> Result<()> {
        let dt = self.cfg.dt;
        let cur = self
            .fields
            .as_gc()
            .ok_or_else(|| Error::InvalidArgument("expected a 2D field".into()))?;
        let prev: &FieldState2D = match &self.prev_fields {
            Some(Fields::Gc(p)) => p,
            _ => cur,
        };
        let drift = |x: f64, y: f64| {
            let (a1, b1) = cur.drift(x, y);
            let (a0, b0) = prev.drift(x, y);
            (1.5 * a1 - 0.5 * a0, 1.5 * b1 - 0.5 * b0)
        };
        let x = self.g1.nodes();
        let y = self.g2.nodes();
        let (nodes, out) = self.interpolate_at_feet(&self.f, |i, j| {
            let (k1x, k1y) = drift(x[i], y[j]);
            let (k2x, k2y) = drift(x[i] - 0.5 * dt * k1x, y[j] - 0.5 * dt * k1y);
            (x[i] - dt * k2x, y[j] - dt * k2y)
        });
        self.lost += out;
        self.f = self.fitter.fit(&nodes)?;
        let next = self.engine.fields_from_nodes(&nodes, &self.g2)?;
        self.prev_fields = Some(std::mem::replace(&mut self.fields, next));
        self.particles = ParticleSet::seed(&self.f);
        self.f_nodes = Some(nodes);
        Ok(())
    }

    /// Advances until `t >= t_end` of the configuration.
    pub fn run_to_end(&mut self) -> Result<()> {
        while self.step < self.cfg.n_steps() {
            self.step()?;
        }
        Ok(())
    }

    /// Fourier mode indices of `k`, `2k`, `3k` on the periodic x grid.
    fn mode_indices(&self) -> [usize; 3] {
        let m = (self.cfg.wavenumber() * self.g1.length() / (2.0 * std::f64::consts::PI))
            .round()
            .max(1.0) as usize;
        [m, 2 * m, 3 * m]
    }

    /// One row of the time series, in the order of [`channel_names`].
    pub fn record(&self) -> Result<Vec<f64>> {
        let f = self.f_nodes()?;
        let (g1, g2) = (&self.g1, &self.g2);
        let mass = diag::mass(&f, g1, g2);
        let row = match (&self.fields, self.model) {
            (Fields::Vp(e), Model::VlasovPoisson) => {
                let amps = diag::fourier_mode_amps(&e.e, &self.mode_indices());
                let kin = diag::kinetic_energy(&f, g1, g2);
                let ele = diag::electric_energy_1d(&e.e, g1);
                vec![
                    self.t,
                    mass,
                    diag::lp_norm(&f, g1, g2, 1.0)?,
                    diag::lp_norm(&f, g1, g2, 2.0)?,
                    diag::momentum(&f, g1, g2),
                    kin,
                    ele,
                    kin + ele,
                    amps[0],
                    amps[1],
                    amps[2],
                    self.lost,
                ]
            }
            (Fields::Gc(e), Model::GuidingCenter) => {
                let energy = e.energy();
                vec![
                    self.t,
                    mass,
                    diag::lp_norm(&f, g1, g2, 1.0)?,
                    diag::lp_norm(&f, g1, g2, 2.0)?,
                    diag::enstrophy(&f, g1, g2),
                    energy,
                    energy.sqrt(),
                    e.perturbation_energy(),
                    self.lost,
                ]
            }
            (Fields::External, Model::Hill) => {
                vec![self.t, mass, diag::lp_norm(&f, g1, g2, 2.0)?, diag::xrms(&f, g1, g2), self.lost]
            }
            _ => unreachable!("field kind follows the model"),
        };
        Ok(row)
    }

    pub fn channel_names(&self) -> &'static [&'static str] {
        channel_names(self.model)
    }
}
