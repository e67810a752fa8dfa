// SPDX-License-Identifier: Apache-2.0

//! Self-describing delimited text tables.
//!
//! ```text
//! # mockq <kind>
//! # <key>: <value>
//! # units: <unit>,<unit>,...
//! <name>,<name>,...
//! <value>,<value>,...
//! ```
//!
//! Values are written in the shortest exponent form that parses back to the
//! same `f64`, so a written table round-trips bit for bit.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::classicalizer::DivergenceRecord;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::model::MockPlanck;
use crate::schrodinger::SpectrumResult;
use crate::thooft::ThooftTrajectory;
use crate::wave::WaveFunction;

const MAGIC: &str = "# mockq ";

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self { name: name.into(), unit: unit.into() }
    }
}

/// A kind tag, ordered metadata, named columns and rows of equal width.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub kind: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(kind: &str, columns: Vec<Column>) -> Self {
        Self { kind: kind.into(), meta: Vec::new(), columns, rows: Vec::new() }
    }

    /// Appends or replaces a metadata entry.
    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.set_meta(key, value);
        self
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.meta.push((key.into(), value)),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn meta_f64(&self, key: &str) -> Result<f64> {
        let raw = self.meta(key).ok_or_else(|| Error::Parse(format!("missing metadata `{key}`")))?;
        raw.parse().map_err(|_| Error::Parse(format!("metadata `{key}` is not a number: {raw}")))
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidParameter(format!(
                "row has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{MAGIC}{}", self.kind)?;
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        let units: Vec<&str> = self.columns.iter().map(|c| c.unit.as_str()).collect();
        writeln!(out, "# units: {}", units.join(","))?;
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        writeln!(out, "{}", names.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("tables are ASCII")
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let first = lines.next().ok_or_else(|| Error::Parse("empty table".into()))??;
        let kind = first
            .strip_prefix(MAGIC)
            .ok_or_else(|| Error::Parse(format!("missing `{}` header", MAGIC.trim_end())))?
            .to_string();
        let mut meta = Vec::new();
        let mut units: Option<Vec<String>> = None;
        let mut columns = None;
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line?;
            if let Some(comment) = line.strip_prefix("# ") {
                let (k, v) = comment
                    .split_once(": ")
                    .ok_or_else(|| Error::Parse(format!("malformed header line `{line}`")))?;
                if k == "units" {
                    units = Some(v.split(',').map(str::to_string).collect());
                } else {
                    meta.push((k.to_string(), v.to_string()));
                }
            } else if line.is_empty() {
                continue;
            } else if columns.is_none() {
                let names: Vec<&str> = line.split(',').collect();
                let units = units.take().unwrap_or_default();
                if !units.is_empty() && units.len() != names.len() {
                    return Err(Error::Parse("units and column names differ in length".into()));
                }
                columns = Some(
                    names
                        .iter()
                        .enumerate()
                        .map(|(i, name)| Column::new(name, units.get(i).map_or("", String::as_str)))
                        .collect::<Vec<_>>(),
                );
            } else {
                let width = columns.as_ref().map_or(0, Vec::len);
                let row = line
                    .split(',')
                    .map(|c| c.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", n + 2)))?;
                if row.len() != width {
                    return Err(Error::Parse(format!("line {}: expected {width} values", n + 2)));
                }
                rows.push(row);
            }
        }
        let columns = columns.ok_or_else(|| Error::Parse("missing column names".into()))?;
        Ok(Self { kind, meta, columns, rows })
    }
}

/// `(t, N_1, ..., N_m[, H])`.
pub fn trajectory_table(trajectory: &Trajectory) -> Table {
    let m = trajectory.states.first().map_or(0, Vec::len);
    let mut columns = vec![Column::new("t", "time")];
    columns.extend((1..=m).map(|i| Column::new(&format!("N_{i}"), "population")));
    if trajectory.energy.is_some() {
        columns.push(Column::new("H", "1/time"));
    }
    let mut table = Table::new("trajectory", columns);
    for (j, (t, n)) in trajectory.times.iter().zip(&trajectory.states).enumerate() {
        let mut row = Vec::with_capacity(m + 2);
        row.push(*t);
        row.extend_from_slice(n);
        if let Some(e) = &trajectory.energy {
            row.push(e[j]);
        }
        table.rows.push(row);
    }
    table
}

fn grid_meta(table: Table, grid: &Grid1D) -> Table {
    table
        .with_meta("grid_length", grid.length())
        .with_meta("grid_points", grid.points())
        .with_meta("hbar", grid.hbar().value())
}

/// `(Q, Re psi, Im psi)` with the grid in the metadata.
pub fn wavefunction_table(psi: &WaveFunction) -> Table {
    let columns = vec![Column::new("Q", "1"), Column::new("re_psi", "Q^-1/2"), Column::new("im_psi", "Q^-1/2")];
    let mut table = grid_meta(Table::new("wavefunction", columns), psi.grid()).with_meta("norm", psi.norm());
    for (q, z) in psi.grid().nodes().into_iter().zip(psi.values()) {
        table.rows.push(vec![q, z.re, z.im]);
    }
    table
}

/// Inverse of [`wavefunction_table`].
pub fn wavefunction_from_table(table: &Table) -> Result<WaveFunction> {
    if table.kind != "wavefunction" {
        return Err(Error::Parse(format!("expected a wavefunction table, got `{}`", table.kind)));
    }
    let points = table.meta_f64("grid_points")? as usize;
    let grid = Grid1D::new(table.meta_f64("grid_length")?, points, MockPlanck::new(table.meta_f64("hbar")?)?)?;
    if table.rows.len() != points || table.columns.len() != 3 {
        return Err(Error::Parse("wavefunction table does not match its grid".into()));
    }
    WaveFunction::new(grid, table.rows.iter().map(|r| Complex64::new(r[1], r[2])).collect())
}

/// `(n, E_n, residual)`.
pub fn spectrum_table(spectrum: &SpectrumResult) -> Table {
    let columns = vec![Column::new("n", "1"), Column::new("E_n", "1/time"), Column::new("residual", "1/time")];
    let mut table = Table::new("spectrum", columns);
    for (n, (e, r)) in spectrum.energies.iter().zip(&spectrum.residuals).enumerate() {
        table.rows.push(vec![n as f64, *e, *r]);
    }
    table
}

/// `(t, ||psi_eta - psi_lin||, norm, min rho)`.
pub fn divergence_table(series: &[DivergenceRecord]) -> Table {
    let columns = vec![
        Column::new("t", "time"),
        Column::new("distance", "1"),
        Column::new("norm", "1"),
        Column::new("min_rho", "1/Q"),
    ];
    let mut table = Table::new("divergence", columns);
    for r in series {
        table.rows.push(vec![r.t, r.distance, r.norm, r.min_rho]);
    }
    table
}

/// `(t, phi_wrapped, phi_unwrapped, omega, f^2)`.
pub fn thooft_table(trajectory: &ThooftTrajectory) -> Table {
    let columns = vec![
        Column::new("t", "time"),
        Column::new("phi_wrapped", "rad"),
        Column::new("phi_unwrapped", "rad"),
        Column::new("omega", "1/time"),
        Column::new("f_squared", "1/time^2n"),
    ];
    let mut table = Table::new("thooft", columns).with_meta("near_degenerate_root", trajectory.near_degenerate_root);
    for (s, f2) in trajectory.states.iter().zip(&trajectory.f_squared) {
        table.rows.push(vec![s.t, s.phi, s.phi_unwrapped, s.omega, *f2]);
    }
    table
}
