//! Flat `key=value` run configuration.
//!
//! One pair per line, `#` starts a comment, blank lines are ignored. `case`
//! selects the defaults; every other key overrides one of them. The last
//! occurrence of a key wins, so overrides can simply be appended.
//!
//! | key | meaning |
//! |-----|---------|
//! | `case` | `landau`, `two_stream`, `bump_on_tail`, `kelvin_helmholtz`, `hill` |
//! | `nx`, `nv` (alias `ny`) | cells in the first and second dimension |
//! | `dt`, `t_end` | time step and final time |
//! | `v_max` | velocity half-width (Hill: half-width of both dimensions) |
//! | `k`, `alpha` (alias `epsilon`) | perturbation wavenumber and amplitude |
//! | `lx` (alias `Lx`) | length of the periodic x domain |
//! | `scheme` | `fsl`, `bsl`, `hybrid` |
//! | `remap_every` (alias `T`) | remap period of the hybrid scheme |
//! | `pusher` | `euler`, `rk2`, `rk3`, `rk4`, `verlet` |
//! | `output_every`, `snapshot_every` | cadence in steps (`snapshot_every=0` disables) |
//! | `snapshot_format` | `bin` or `csv` |
//! | `y_bc` | guiding-center y closure: `dirichlet` or `periodic` |
//! | `hill_a0`, `hill_a1` | Hill coefficient `a(t) = a0 + a1 cos t` |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::characteristics::Pusher;
use crate::error::{Error, Result};
use crate::field2d::YBoundary;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseName {
    Landau,
    TwoStream,
    BumpOnTail,
    KelvinHelmholtz,
    Hill,
}

impl CaseName {
    pub const ALL: [CaseName; 5] = [
        CaseName::Landau,
        CaseName::TwoStream,
        CaseName::BumpOnTail,
        CaseName::KelvinHelmholtz,
        CaseName::Hill,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CaseName::Landau => "landau",
            CaseName::TwoStream => "two_stream",
            CaseName::BumpOnTail => "bump_on_tail",
            CaseName::KelvinHelmholtz => "kelvin_helmholtz",
            CaseName::Hill => "hill",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            CaseName::Landau => "linear Landau damping, Vlasov-Poisson",
            CaseName::TwoStream => "two-stream instability, Vlasov-Poisson",
            CaseName::BumpOnTail => "bump-on-tail instability, Vlasov-Poisson",
            CaseName::KelvinHelmholtz => "Kelvin-Helmholtz instability, guiding-center model",
            CaseName::Hill => "Vlasov equation with the external force -a(t)x",
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        CaseName::ALL
            .iter()
            .find(|c| c.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown case '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Fsl,
    Bsl,
    Hybrid,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Fsl => "fsl",
            Scheme::Bsl => "bsl",
            Scheme::Hybrid => "hybrid",
        }
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fsl" => Ok(Scheme::Fsl),
            "bsl" => Ok(Scheme::Bsl),
            "hybrid" => Ok(Scheme::Hybrid),
            other => Err(format!("unknown scheme '{other}' (fsl, bsl, hybrid)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotFormat {
    Binary,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseConfig {
    pub case: CaseName,
    pub nx: usize,
    pub nv: usize,
    pub dt: f64,
    pub t_end: f64,
    pub v_max: f64,
    pub k: f64,
    pub alpha: f64,
    /// Periodic domain length; `None` means `2π / k`.
    pub lx: Option<f64>,
    pub scheme: Scheme,
    pub remap_every: usize,
    pub pusher: Pusher,
    pub output_every: usize,
    pub snapshot_every: usize,
    pub snapshot_format: SnapshotFormat,
    pub y_bc: YBoundary,
    pub hill_a0: f64,
    pub hill_a1: f64,
}

impl CaseConfig {
    pub fn defaults(case: CaseName) -> Self {
        let base = CaseConfig {
            case,
            nx: 64,
            nv: 64,
            dt: 0.1,
            t_end: 60.0,
            v_max: 6.0,
            k: 0.5,
            alpha: 0.001,
            lx: None,
            scheme: Scheme::Fsl,
            remap_every: 1,
            pusher: Pusher::Verlet,
            output_every: 1,
            snapshot_every: 50,
            snapshot_format: SnapshotFormat::Binary,
            y_bc: YBoundary::Dirichlet,
            hill_a0: 0.5,
            hill_a1: 0.2,
        };
        match case {
            CaseName::Landau => base,
            CaseName::TwoStream => CaseConfig {
                nx: 128,
                nv: 128,
                dt: 0.5,
                t_end: 100.0,
                v_max: 9.0,
                alpha: 0.05,
                ..base
            },
            CaseName::BumpOnTail => CaseConfig {
                nx: 128,
                nv: 128,
                dt: 0.5,
                t_end: 200.0,
                v_max: 9.0,
                k: 0.3,
                alpha: 0.04,
                lx: Some(20.0 * PI),
                pusher: Pusher::Rk4,
                ..base
            },
            CaseName::KelvinHelmholtz => CaseConfig {
                nx: 128,
                nv: 128,
                dt: 0.5,
                t_end: 100.0,
                alpha: 0.015,
                lx: Some(7.0),
                pusher: Pusher::Rk4,
                ..base
            },
            CaseName::Hill => CaseConfig {
                nx: 256,
                nv: 256,
                dt: 2.0 * PI / 25.0,
                t_end: 20.0 * PI,
                v_max: 12.0,
                pusher: Pusher::Rk4,
                ..base
            },
        }
    }

    /// Length of the periodic x domain.
    pub fn domain_length(&self) -> f64 {
        match self.case {
            CaseName::KelvinHelmholtz => self.lx.unwrap_or(7.0),
            _ => self.lx.unwrap_or(2.0 * PI / self.k),
        }
    }

    /// Perturbation wavenumber actually used (Kelvin-Helmholtz ties it to `lx`).
    pub fn wavenumber(&self) -> f64 {
        match self.case {
            CaseName::KelvinHelmholtz => 2.0 * PI / self.domain_length(),
            _ => self.k,
        }
    }

    /// Number of steps needed to reach `t_end`.
    pub fn n_steps(&self) -> u64 {
        ((self.t_end / self.dt) - 1e-9).ceil().max(0.0) as u64
    }

    fn second_key(&self) -> &'static str {
        if self.case == CaseName::KelvinHelmholtz {
            "ny"
        } else {
            "nv"
        }
    }

    /// Effective configuration as `key=value` text that parses back to `self`.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        };
        put("case", self.case.name().into());
        put("nx", self.nx.to_string());
        put(self.second_key(), self.nv.to_string());
        put("dt", format!("{:?}", self.dt));
        put("t_end", format!("{:?}", self.t_end));
        put("v_max", format!("{:?}", self.v_max));
        put("k", format!("{:?}", self.k));
        put("alpha", format!("{:?}", self.alpha));
        if let Some(lx) = self.lx {
            put("lx", format!("{lx:?}"));
        }
        put("scheme", self.scheme.name().into());
        put("remap_every", self.remap_every.to_string());
        put("pusher", self.pusher.name().into());
        put("output_every", self.output_every.to_string());
        put("snapshot_every", self.snapshot_every.to_string());
        put(
            "snapshot_format",
            match self.snapshot_format {
                SnapshotFormat::Binary => "bin".into(),
                SnapshotFormat::Csv => "csv".into(),
            },
        );
        put(
            "y_bc",
            match self.y_bc {
                YBoundary::Dirichlet => "dirichlet".into(),
                YBoundary::Periodic => "periodic".into(),
            },
        );
        put("hill_a0", format!("{:?}", self.hill_a0));
        put("hill_a1", format!("{:?}", self.hill_a1));
        s
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let range = |msg: String| Error::ConfigRange { key: key.to_string(), msg };
        let num = |v: &str| -> Result<f64> {
            let x: f64 = v.parse().map_err(|_| Error::ConfigParse {
                line,
                msg: format!("{key}: '{v}' is not a number"),
            })?;
            if !x.is_finite() {
                return Err(Error::ConfigRange {
                    key: key.to_string(),
                    msg: "must be finite".into(),
                });
            }
            Ok(x)
        };
        let int = |v: &str| -> Result<usize> {
            v.parse().map_err(|_| Error::ConfigParse {
                line,
                msg: format!("{key}: '{v}' is not a non-negative integer"),
            })
        };
        let positive = |x: f64| {
            if x > 0.0 {
                Ok(x)
            } else {
                Err(range(format!("must be positive, got {x}")))
            }
        };
        match key {
            "nx" => self.nx = int(value)?,
            "nv" => self.nv = int(value)?,
            "dt" => self.dt = positive(num(value)?)?,
            "t_end" => {
                let x = num(value)?;
                if x < 0.0 {
                    return Err(range(format!("must be non-negative, got {x}")));
                }
                self.t_end = x;
            }
            "v_max" => self.v_max = positive(num(value)?)?,
            "k" => self.k = positive(num(value)?)?,
            "alpha" => {
                let x = num(value)?;
                if x < 0.0 {
                    return Err(range(format!("must be non-negative, got {x}")));
                }
                self.alpha = x;
            }
            "lx" => self.lx = Some(positive(num(value)?)?),
            "scheme" => self.scheme = value.parse().map_err(range)?,
            "remap_every" => self.remap_every = int(value)?,
            "pusher" => self.pusher = value.parse().map_err(range)?,
            "output_every" => self.output_every = int(value)?,
            "snapshot_every" => self.snapshot_every = int(value)?,
            "snapshot_format" => {
                self.snapshot_format = match value {
                    "bin" => SnapshotFormat::Binary,
                    "csv" => SnapshotFormat::Csv,
                    other => return Err(range(format!("unknown format '{other}' (bin, csv)"))),
                }
            }
            "y_bc" => {
                self.y_bc = match value {
                    "dirichlet" => YBoundary::Dirichlet,
                    "periodic" => YBoundary::Periodic,
                    other => return Err(range(format!("unknown boundary '{other}' (dirichlet, periodic)"))),
                }
            }
            "hill_a0" => self.hill_a0 = num(value)?,
            "hill_a1" => self.hill_a1 = num(value)?,
            _ => unreachable!("key normalised before set"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let range = |key: &str, msg: String| Err(Error::ConfigRange { key: key.into(), msg });
        let min_cells = if self.case == CaseName::KelvinHelmholtz { 5 } else { 4 };
        if self.nx < 4 {
            return range("nx", format!("need at least 4 cells, got {}", self.nx));
        }
        if self.nv < min_cells {
            return range(self.second_key(), format!("need at least {min_cells} cells, got {}", self.nv));
        }
        if self.remap_every == 0 {
            return range("remap_every", "must be at least 1".into());
        }
        if self.output_every == 0 {
            return range("output_every", "must be at least 1".into());
        }
        if self.pusher == Pusher::Verlet && self.case == CaseName::KelvinHelmholtz {
            return range("pusher", "verlet needs an x' = v system; use euler, rk2, rk3 or rk4".into());
        }
        if self.case == CaseName::Hill && !(self.hill_a0 > 0.0 && self.hill_a1.abs() < self.hill_a0) {
            return range(
                "hill_a1",
                format!("need hill_a0 > |hill_a1|, got {} and {}", self.hill_a0, self.hill_a1),
            );
        }
        if self.case == CaseName::Hill && self.v_max < 6.0 {
            return range("v_max", "the Hill domain must cover the Gaussian; use at least 6".into());
        }
        Ok(())
    }
}

fn canonical_key(key: &str) -> Option<&'static str> {
    const KEYS: [&str; 18] = [
        "case",
        "nx",
        "nv",
        "dt",
        "t_end",
        "v_max",
        "k",
        "alpha",
        "lx",
        "scheme",
        "remap_every",
        "pusher",
        "output_every",
        "snapshot_every",
        "snapshot_format",
        "y_bc",
        "hill_a0",
        "hill_a1",
    ];
    match key {
        "T" => return Some("remap_every"),
        "Lx" => return Some("lx"),
        "ny" => return Some("nv"),
        "epsilon" => return Some("alpha"),
        _ => {}
    }
    KEYS.iter().find(|k| **k == key).copied()
}

/// Splits text into `(line number, key, value)` triples.
fn pairs(text: &str) -> Result<Vec<(usize, &'static str, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content.split_once('=').ok_or_else(|| Error::ConfigParse {
            line,
            msg: format!("expected key=value, got '{content}'"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        let key = canonical_key(k).ok_or_else(|| Error::ConfigParse {
            line,
            msg: format!("unknown key '{k}'"),
        })?;
        if v.is_empty() {
            return Err(Error::ConfigParse {
                line,
                msg: format!("missing value for '{k}'"),
            });
        }
        out.push((line, key, v.to_string()));
    }
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<CaseConfig> {
    let pairs = pairs(text)?;
    let (case_line, case_value) = pairs
        .iter()
        .rfind(|p| p.1 == "case")
        .map(|p| (p.0, p.2.clone()))
        .ok_or_else(|| Error::Config("case required".into()))?;
    let case: CaseName = case_value.parse().map_err(|msg| Error::ConfigParse { line: case_line, msg })?;
    let mut cfg = CaseConfig::defaults(case);
    for (line, key, value) in &pairs {
        if *key != "case" {
            cfg.set(key, value, *line)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
