//! Grids and initial distributions of the built-in cases.

use std::f64::consts::PI;

use crate::analytic::{periodic_omega0, HillCoefficient};
use crate::config::{CaseConfig, CaseName};
use crate::error::Result;
use crate::field2d::YBoundary;
use crate::spline::{BoundaryKind, UniformGrid1D};

/// Which equation a case advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    VlasovPoisson,
    GuidingCenter,
    Hill,
}

impl CaseName {
    pub fn model(&self) -> Model {
        match self {
            CaseName::Landau | CaseName::TwoStream | CaseName::BumpOnTail => Model::VlasovPoisson,
            CaseName::KelvinHelmholtz => Model::GuidingCenter,
            CaseName::Hill => Model::Hill,
        }
    }
}

/// Maxwellian `exp(-v²/2) / √(2π)`.
#[inline]
pub fn maxwellian(v: f64) -> f64 {
    (-0.5 * v * v).exp() / (2.0 * PI).sqrt()
}

/// Bump-on-tail velocity profile.
pub fn bump_on_tail_profile(v: f64) -> f64 {
    let s = (2.0 * PI).sqrt();
    let np = 9.0 / (10.0 * s);
    let nb = 2.0 / (10.0 * s);
    let (u, vt) = (4.5, 0.5);
    np * (-0.5 * v * v).exp() + nb * (-(v - u) * (v - u) / (2.0 * vt * vt)).exp()
}

/// Grids of a case. Natural dimensions carry the zero-slope closure used for fitting.
pub fn case_grids(cfg: &CaseConfig) -> Result<(UniformGrid1D, UniformGrid1D)> {
    let natural = |a: f64, b: f64, n: usize| UniformGrid1D::new(a, b, n, BoundaryKind::natural());
    match cfg.case.model() {
        Model::VlasovPoisson => Ok((
            UniformGrid1D::periodic(0.0, cfg.domain_length(), cfg.nx)?,
            natural(-cfg.v_max, cfg.v_max, cfg.nv)?,
        )),
        Model::GuidingCenter => {
            let gx = UniformGrid1D::periodic(0.0, cfg.domain_length(), cfg.nx)?;
            let gy = match cfg.y_bc {
                YBoundary::Dirichlet => natural(0.0, 2.0 * PI, cfg.nv)?,
                YBoundary::Periodic => UniformGrid1D::periodic(0.0, 2.0 * PI, cfg.nv)?,
            };
            Ok((gx, gy))
        }
        Model::Hill => Ok((natural(-cfg.v_max, cfg.v_max, cfg.nx)?, natural(-cfg.v_max, cfg.v_max, cfg.nv)?)),
    }
}

/// `ω(0)` of the periodic Hill envelope for the configured coefficient.
pub fn hill_omega0(cfg: &CaseConfig) -> Result<f64> {
    let a = HillCoefficient::new(cfg.hill_a0, cfg.hill_a1)?;
    periodic_omega0(&|t| a.eval(t), 1e-3)
}

/// Initial distribution as a function of the two coordinates.
pub fn initial_distribution(cfg: &CaseConfig) -> Result<Box<dyn Fn(f64, f64) -> f64>> {
    let k = cfg.wavenumber();
    let alpha = cfg.alpha;
    Ok(match cfg.case {
        CaseName::Landau => Box::new(move |x, v| maxwellian(v) * (1.0 + alpha * (k * x).cos())),
        CaseName::TwoStream => Box::new(move |x, v| maxwellian(v) * v * v * (1.0 - alpha * (k * x).cos())),
        CaseName::BumpOnTail => Box::new(move |x, v| bump_on_tail_profile(v) * (1.0 + alpha * (k * x).cos())),
        CaseName::KelvinHelmholtz => Box::new(move |x, y| y.sin() + alpha * (0.5 * y).sin() * (k * x).cos()),
        CaseName::Hill => {
            let w = hill_omega0(cfg)?;
            Box::new(move |x, v| (-x * x / (2.0 * w * w) - w * w * v * v / 2.0).exp())
        }
    })
}

/// Initial distribution sampled on the nodes, `[i * n2 + j]`.
pub fn initial_nodes(cfg: &CaseConfig, gx: &UniformGrid1D, g2: &UniformGrid1D) -> Result<Vec<f64>> {
    let f = initial_distribution(cfg)?;
    let xs = gx.nodes();
    let ys = g2.nodes();
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for x in &xs {
        for y in &ys {
            out.push(f(*x, *y));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn landau_nodes_match_formula() {
        let cfg = CaseConfig::defaults(CaseName::Landau);
        let (gx, gv) = case_grids(&cfg).unwrap();
        assert_eq!((gx.node_count(), gv.node_count()), (64, 65));
        let f = initial_nodes(&cfg, &gx, &gv).unwrap();
        let (i, j) = (5, 40);
        let (x, v) = (gx.node(i), gv.node(j));
        let exact = (-v * v / 2.0).exp() / (2.0 * PI).sqrt() * (1.0 + 0.001 * (0.5 * x).cos());
        assert_eq!(f[i * 65 + j], exact);
    }

    #[test]
    fn two_stream_and_kh_shapes() {
        let ts = CaseConfig::defaults(CaseName::TwoStream);
        let f = initial_distribution(&ts).unwrap();
        assert_eq!(f(1.0, 0.0), 0.0);
        assert!((f(0.0, 1.0) - maxwellian(1.0) * 0.95).abs() < 1e-16);
        let kh = CaseConfig::defaults(CaseName::KelvinHelmholtz);
        let g = initial_distribution(&kh).unwrap();
        let k = 2.0 * PI / 7.0;
        assert!((g(1.3, 0.7) - (0.7f64.sin() + 0.015 * 0.35f64.sin() * (k * 1.3).cos())).abs() < 1e-15);
        let (gx, gy) = case_grids(&kh).unwrap();
        assert_eq!((gx.node_count(), gy.node_count()), (128, 129));
    }

    #[test]
    fn bump_profile_peaks_near_tail_speed() {
        let a = bump_on_tail_profile(4.5);
        assert!(a > bump_on_tail_profile(4.0) && a > bump_on_tail_profile(5.0));
    }

    #[test]
    fn hill_envelope_start() {
        let cfg = CaseConfig::defaults(CaseName::Hill);
        let w = hill_omega0(&cfg).unwrap();
        assert!((w - 0.9487774).abs() < 1e-6, "{w}");
    }
}
