//! Solution snapshots: node-per-line CSV plus a JSON sidecar.
//!
//! The CSV has header `x,y,u,active` and lists nodes row-major (`y` outer).
//! Every real is printed with 17 significant digits so a reload is bit-exact.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::SnapshotError;
use crate::grid::{Grid2, NodeMask, ScalarField};
use crate::operators::OperatorSpec;
use crate::solver::Solution;

/// Decimal with 17 significant digits; round-trips every finite `f64`.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// JSON formatter printing every float through [`fmt17`], pretty-printed otherwise.
pub struct Fmt17Formatter<'a>(PrettyFormatter<'a>);

impl Default for Fmt17Formatter<'_> {
    fn default() -> Self {
        Self(PrettyFormatter::new())
    }
}

impl Formatter for Fmt17Formatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt17(v).as_bytes())
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17-significant-digit floats and a trailing newline.
pub fn write_json<W: io::Write, T: Serialize + ?Sized>(w: W, value: &T) -> Result<(), SnapshotError> {
    let mut w = BufWriter::new(w);
    let mut ser = serde_json::Serializer::with_formatter(&mut w, Fmt17Formatter::default());
    value.serialize(&mut ser)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub grid: Grid2,
    pub operator: OperatorSpec,
    pub tol: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Writes `<stem>.csv` and `<stem>.json`; returns both paths.
pub fn write_snapshot(
    stem: &Path,
    sol: &Solution,
    operator: &OperatorSpec,
    tol: f64,
) -> Result<(PathBuf, PathBuf), SnapshotError> {
    let csv_path = stem.with_extension("csv");
    let json_path = stem.with_extension("json");
    write_field_csv(&csv_path, &sol.u, Some(&sol.active_mask))?;
    let sidecar = Sidecar {
        grid: *sol.grid(),
        operator: operator.clone(),
        tol,
        iterations: sol.iterations,
        residual: sol.residual,
    };
    write_json(File::create(&json_path)?, &sidecar)?;
    Ok((csv_path, json_path))
}

pub fn write_field_csv(path: &Path, u: &ScalarField, mask: Option<&NodeMask>) -> Result<(), SnapshotError> {
    let mut w = csv::Writer::from_path(path)?;
    if mask.is_some() {
        w.write_record(["x", "y", "u", "active"])?;
    } else {
        w.write_record(["x", "y", "u"])?;
    }
    let grid = u.grid();
    for node in grid.nodes() {
        let p = grid.point(node);
        let mut rec = vec![fmt17(p[0]), fmt17(p[1]), fmt17(u.at(node))];
        if let Some(m) = mask {
            rec.push(if m.at(node) { "1" } else { "0" }.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a snapshot CSV, inferring the grid from the node coordinates.
pub fn read_field_csv(path: &Path) -> Result<(ScalarField, Option<NodeMask>), SnapshotError> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let cols: Vec<&str> = headers.iter().map(str::trim).collect();
    let has_active = match cols.as_slice() {
        ["x", "y", "u"] => false,
        ["x", "y", "u", "active"] => true,
        _ => {
            return Err(SnapshotError::Schema(format!(
                "expected header x,y,u[,active], got {}",
                cols.join(",")
            )))
        }
    };
    let mut xs = Vec::new();
    let mut us = Vec::new();
    let mut actives = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |k: usize| -> Result<f64, SnapshotError> {
            rec.get(k)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| SnapshotError::Schema(format!("bad number in column {k}")))
        };
        xs.push((num(0)?, num(1)?));
        us.push(num(2)?);
        if has_active {
            actives.push(match rec.get(3).map(str::trim) {
                Some("1") | Some("true") => true,
                Some("0") | Some("false") => false,
                _ => return Err(SnapshotError::Schema("bad active flag".into())),
            });
        }
    }
    let side = (us.len() as f64).sqrt().round() as usize;
    if side < 2 || side * side != us.len() {
        return Err(SnapshotError::Schema(format!(
            "{} rows do not form a square grid",
            us.len()
        )));
    }
    let half_width = xs[xs.len() - 1].0;
    let grid = Grid2::new(half_width, side - 1)?;
    for (k, &(x, y)) in xs.iter().enumerate() {
        let p = grid.point(grid.node_of(k));
        let tol = 1e-9 * half_width;
        if (p[0] - x).abs() > tol || (p[1] - y).abs() > tol {
            return Err(SnapshotError::Schema(format!(
                "row {k} at ({x}, {y}) is not the expected row-major node"
            )));
        }
    }
    let field = ScalarField::from_values(grid, us)?;
    let mask = if has_active {
        Some(NodeMask::from_values(grid, actives)?)
    } else {
        None
    };
    Ok((field, mask))
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar, SnapshotError> {
    let f = File::open(path)?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}

/// Reloads a solution from its CSV and sidecar.
pub fn read_snapshot(csv_path: &Path) -> Result<(Solution, Sidecar), SnapshotError> {
    let sidecar = read_sidecar(&csv_path.with_extension("json"))?;
    let (u, mask) = read_field_csv(csv_path)?;
    if *u.grid() != sidecar.grid {
        return Err(SnapshotError::Schema("sidecar grid does not match CSV".into()));
    }
    let mut sol = Solution::from_field(u, sidecar.iterations, sidecar.residual);
    if let Some(mask) = mask {
        sol.active_mask = mask;
    }
    Ok((sol, sidecar))
}
