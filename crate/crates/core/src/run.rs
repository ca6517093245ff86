//! Run orchestration and file outputs.
//!
//! A run directory holds:
//!
//! * `config.echo`: the effective configuration in `key=value` form.
//! * `series.csv`: a header naming the channels, then one row per output
//!   step, every value written with 17 significant digits.
//! * `snapshots/`: node values of the distribution at step 0, every
//!   `snapshot_every` steps and at the last step. The binary layout is two
//!   little-endian `u64` dimensions `(n1, n2)` followed by `n1 * n2`
//!   little-endian `f64` values in row-major order (`[i * n2 + j]`), with a
//!   `.txt` descriptor next to it. The CSV layout writes one grid row per line.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::config::{CaseConfig, SnapshotFormat};
use crate::error::{Error, Result};
use crate::solver::Simulation;

/// What a finished run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: u64,
    pub t: f64,
    pub rows: usize,
    pub snapshots: usize,
    pub lost: f64,
}

fn format_row(row: &[f64]) -> String {
    let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
    cells.join(",")
}

/// Writes a snapshot in the binary layout.
pub fn write_snapshot_bin(path: &Path, n1: usize, n2: usize, values: &[f64]) -> Result<()> {
    if values.len() != n1 * n2 {
        return Err(Error::DimensionMismatch {
            expected: n1 * n2,
            got: values.len(),
        });
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(n1 as u64).to_le_bytes())?;
    w.write_all(&(n2 as u64).to_le_bytes())?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a snapshot in the binary layout, returning `(n1, n2, values)`.
pub fn read_snapshot_bin(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 {
        return Err(Error::InvalidArgument(format!("{}: truncated header", path.display())));
    }
    let word = |k: usize| u64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().expect("8 bytes"));
    let (n1, n2) = (word(0) as usize, word(1) as usize);
    let body = &bytes[16..];
    if n1.checked_mul(n2).and_then(|n| n.checked_mul(8)) != Some(body.len()) {
        return Err(Error::InvalidArgument(format!("{}: size does not match header", path.display())));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((n1, n2, values))
}

struct Writer {
    series: BufWriter<File>,
    snap_dir: PathBuf,
    rows: usize,
    snapshots: usize,
}

impl Writer {
    fn create(dir: &Path, cfg: &CaseConfig, names: &[&str]) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let snap_dir = dir.join("snapshots");
        fs::create_dir_all(&snap_dir)?;
        fs::write(dir.join("config.echo"), cfg.echo())?;
        let mut series = BufWriter::new(File::create(dir.join("series.csv"))?);
        writeln!(series, "{}", names.join(","))?;
        Ok(Self {
            series,
            snap_dir,
            rows: 0,
            snapshots: 0,
        })
    }

    fn row(&mut self, sim: &Simulation) -> Result<()> {
        let row = sim.record()?;
        if let Some(bad) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NumericAbort {
                step: sim.step_index(),
                t: sim.t(),
                what: sim.channel_names()[bad].to_string(),
            });
        }
        writeln!(self.series, "{}", format_row(&row))?;
        self.rows += 1;
        Ok(())
    }

    fn snapshot(&mut self, sim: &Simulation) -> Result<()> {
        let f = sim.f_nodes()?;
        let (g1, g2) = sim.grids();
        let (n1, n2) = (g1.node_count(), g2.node_count());
        let stem = format!("f_{:06}", sim.step_index());
        match sim.config().snapshot_format {
            SnapshotFormat::Binary => {
                write_snapshot_bin(&self.snap_dir.join(format!("{stem}.bin")), n1, n2, &f)?;
                let desc = format!(
                    "file={stem}.bin\nstep={}\nt={:.16e}\nn1={n1}\nn2={n2}\nx1=[{:.16e},{:.16e}]\nx2=[{:.16e},{:.16e}]\n\
                     layout=u64le n1, u64le n2, f64le values row-major [i*n2+j]\n",
                    sim.step_index(),
                    sim.t(),
                    g1.xmin(),
                    g1.xmax(),
                    g2.xmin(),
                    g2.xmax(),
                );
                fs::write(self.snap_dir.join(format!("{stem}.txt")), desc)?;
            }
            SnapshotFormat::Csv => {
                let mut w = BufWriter::new(File::create(self.snap_dir.join(format!("{stem}.csv")))?);
                for r in f.chunks(n2) {
                    writeln!(w, "{}", format_row(r))?;
                }
                w.flush()?;
            }
        }
        self.snapshots += 1;
        Ok(())
    }
}

/// Runs `cfg` to `t_end`, writing outputs under `dir`. On error the rows
/// written so far are flushed before the error is returned.
pub fn run(cfg: &CaseConfig, dir: &Path) -> Result<RunSummary> {
    let mut sim = Simulation::new(cfg)?;
    let mut out = Writer::create(dir, cfg, sim.channel_names())?;
    let result = drive(&mut sim, &mut out);
    out.series.flush()?;
    result?;
    Ok(RunSummary {
        steps: sim.step_index(),
        t: sim.t(),
        rows: out.rows,
        snapshots: out.snapshots,
        lost: sim.lost(),
    })
}

fn drive(sim: &mut Simulation, out: &mut Writer) -> Result<()> {
    let n = sim.config().n_steps();
    let every = sim.config().output_every.max(1) as u64;
    let snap_every = sim.config().snapshot_every.max(1) as u64;
    out.row(sim)?;
    out.snapshot(sim)?;
    while sim.step_index() < n {
        sim.step()?;
        let s = sim.step_index();
        if s.is_multiple_of(every) || s == n {
            out.row(sim)?;
        }
        if s.is_multiple_of(snap_every) || s == n {
            out.snapshot(sim)?;
        }
    }
    Ok(())
}
