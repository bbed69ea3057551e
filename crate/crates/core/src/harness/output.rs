//! CSV tables, slice and line extraction, binary field dumps.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::errors::ErrorTriple;
use super::study::ConvergenceTable;
use crate::error::{Error, Result};
use crate::grid::{GridField, SpaceMesh, TimeMesh};

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Config(format!("{}: {other:?}", path.display())),
    }
}

pub const TABLE_COLUMNS: [&str; 12] = [
    "scheme", "k", "N", "M", "e_L2", "e_H1", "e_E", "p_L2", "p_H1", "p_E", "cpu_s", "cpu_rel",
];

/// Shortest representation that parses back to the same `f64`.
fn full(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Writes the tables as CSV. Timing columns stay empty unless `timing` is set,
/// which keeps the file reproducible byte for byte.
pub fn write_table_csv<W: Write>(tables: &[ConvergenceTable], out: W, timing: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE_COLUMNS)?;
    for table in tables {
        for row in &table.rows {
            let e = row.errors.map(|e| e.as_array());
            let p = row.rates;
            let mut rec = vec![
                table.scheme.name().to_string(),
                table.k.to_string(),
                row.n.to_string(),
                row.m.to_string(),
            ];
            rec.extend((0..3).map(|i| full(e.map(|e| e[i]))));
            rec.extend((0..3).map(|i| full(p.map(|p| p[i]))));
            rec.push(full(row.cpu_s.filter(|_| timing)));
            rec.push(full(row.cpu_rel.filter(|_| timing)));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn save_table_csv(tables: &[ConvergenceTable], path: &Path, timing: bool) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_table_csv(tables, BufWriter::new(file), timing).map_err(csv_err(path))
}

/// One parsed row of a table CSV.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TableCsvRow {
    pub scheme: String,
    pub k: u32,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "e_L2")]
    pub e_l2: Option<f64>,
    #[serde(rename = "e_H1")]
    pub e_h1: Option<f64>,
    #[serde(rename = "e_E")]
    pub e_e: Option<f64>,
    #[serde(rename = "p_L2")]
    pub p_l2: Option<f64>,
    #[serde(rename = "p_H1")]
    pub p_h1: Option<f64>,
    #[serde(rename = "p_E")]
    pub p_e: Option<f64>,
    pub cpu_s: Option<f64>,
    pub cpu_rel: Option<f64>,
}

pub fn read_table_csv<R: Read>(input: R) -> csv::Result<Vec<TableCsvRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

fn sci7(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into())
}

fn rate3(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into())
}

/// Human-readable table with 7 significant digits.
pub fn format_table(table: &ConvergenceTable) -> String {
    let mut s = format!(
        "{} {} (k={})\n{:>5} {:>5} {:>14} {:>14} {:>14} {:>7} {:>7} {:>7} {:>8}\n",
        table.scenario,
        table.scheme.name(),
        table.k,
        "N",
        "M",
        "e_L2",
        "e_H1",
        "e_E",
        "p_L2",
        "p_H1",
        "p_E",
        "CPU_rel"
    );
    for row in &table.rows {
        let e = row.errors.map(|e| e.as_array());
        let p = row.rates;
        if let Some(fail) = &row.failure {
            s += &format!("{:>5} {:>5} failed: {fail}\n", row.n, row.m);
            continue;
        }
        s += &format!(
            "{:>5} {:>5} {:>14} {:>14} {:>14} {:>7} {:>7} {:>7} {:>8}\n",
            row.n,
            row.m,
            sci7(e.map(|e| e[0])),
            sci7(e.map(|e| e[1])),
            sci7(e.map(|e| e[2])),
            rate3(p.map(|p| p[0])),
            rate3(p.map(|p| p[1])),
            rate3(p.map(|p| p[2])),
            row.cpu_rel.map(|c| format!("{c:.2}")).unwrap_or_else(|| "-".into()),
        );
    }
    let t = table.theoretical;
    s += &format!(
        "{:>5} {:>5} {:>14} {:>14} {:>14} {:>7.3} {:>7.3} {:>7.3}\n",
        "*", "*", "-", "-", "-", t[0], t[1], t[2]
    );
    s
}

/// Time-series CSV `m,t,e_L2,e_H1,e_E`; the L² column is multiplied by `l2_scale`.
pub fn write_series_csv<W: Write>(rows: &[(usize, ErrorTriple)], out: W, l2_scale: f64) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "t", "e_L2", "e_H1", "e_E"])?;
    for (m, e) in rows {
        w.write_record([
            m.to_string(),
            format!("{:e}", e.time),
            format!("{:e}", e.e_l2 * l2_scale),
            format!("{:e}", e.e_h1),
            format!("{:e}", e.e_e),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_series_csv(rows: &[(usize, ErrorTriple)], path: &Path, l2_scale: f64) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_series_csv(rows, BufWriter::new(file), l2_scale).map_err(csv_err(path))
}

/// Index of the node nearest to `coord` along axis `k`.
fn nearest_node(mesh: &SpaceMesh, k: usize, coord: f64) -> Result<usize> {
    let ax = mesh.axis(k)?;
    let i = ((coord - ax.origin()) / ax.step()).round();
    if i < 0.0 || i > ax.intervals() as f64 {
        return Err(Error::OutOfDomain(coord));
    }
    Ok(i as usize)
}

/// Values on the mesh plane `x_axis = coord` (nearest node plane) of a 3D field.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    /// The two in-plane axes, slower first.
    pub axes: [usize; 2],
    pub shape: [usize; 2],
    pub plane_axis: usize,
    pub plane_coord: f64,
    pub values: Vec<f64>,
}

pub fn extract_slice(field: &GridField, plane_axis: usize, coord: f64) -> Result<Slice> {
    let mesh = field.mesh();
    if mesh.dim() != 3 {
        return Err(Error::InvalidArgument("slices need a 3D field".into()));
    }
    let fixed = nearest_node(mesh, plane_axis, coord)?;
    let axes: Vec<usize> = (0..3).filter(|&k| k != plane_axis).collect();
    let (p, r) = (axes[0], axes[1]);
    let shape = [mesh.shape()[p], mesh.shape()[r]];
    let mut values = Vec::with_capacity(shape[0] * shape[1]);
    let mut idx = [0usize; 3];
    idx[plane_axis] = fixed;
    for i in 0..shape[0] {
        for j in 0..shape[1] {
            idx[p] = i;
            idx[r] = j;
            values.push(field.get(&idx));
        }
    }
    Ok(Slice {
        axes: [p, r],
        shape,
        plane_axis,
        plane_coord: mesh.axes()[plane_axis].node(fixed),
        values,
    })
}

impl Slice {
    /// `sqrt(h_p h_r Σ v²)` over interior plane nodes.
    pub fn norm_l2(&self, mesh: &SpaceMesh) -> f64 {
        let (hp, hr) = (mesh.axes()[self.axes[0]].step(), mesh.axes()[self.axes[1]].step());
        let mut sum = 0.0;
        for i in 1..self.shape[0] - 1 {
            for j in 1..self.shape[1] - 1 {
                sum += self.values[i * self.shape[1] + j].powi(2);
            }
        }
        (hp * hr * sum).sqrt()
    }

    /// Header line, then one CSV line per row of the plane.
    pub fn write<W: Write>(&self, mut out: W, intervals: usize, t: f64) -> std::io::Result<()> {
        const NAMES: [&str; 3] = ["x", "y", "z"];
        writeln!(
            out,
            "# axes={},{} N={intervals} t={t} plane={}={}",
            NAMES[self.axes[0]], NAMES[self.axes[1]], NAMES[self.plane_axis], self.plane_coord
        )?;
        for row in self.values.chunks(self.shape[1]) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path, intervals: usize, t: f64) -> Result<()> {
        let file = File::create(path).map_err(io_err(path))?;
        let mut w = BufWriter::new(file);
        self.write(&mut w, intervals, t).map_err(io_err(path))?;
        w.flush().map_err(io_err(path))
    }
}

/// Values along axis `axis` through the node nearest to `through`; returns
/// `(coordinate, value)` pairs.
pub fn extract_line(field: &GridField, axis: usize, through: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mesh = field.mesh();
    let mut idx = (0..mesh.dim())
        .map(|k| nearest_node(mesh, k, through[k]))
        .collect::<Result<Vec<_>>>()?;
    let ax = mesh.axis(axis)?;
    Ok((0..ax.node_count())
        .map(|i| {
            idx[axis] = i;
            (ax.node(i), field.get(&idx))
        })
        .collect())
}

/// Outermost coordinates where `|v|` reaches `fraction` of the line maximum.
pub fn wavefront(line: &[(f64, f64)], fraction: f64) -> Option<(f64, f64)> {
    let peak = line.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    if peak == 0.0 {
        return None;
    }
    let hit = |p: &&(f64, f64)| p.1.abs() >= fraction * peak;
    let left = line.iter().find(hit)?.0;
    let right = line.iter().rev().find(hit)?.0;
    Some((left, right))
}

const DUMP_MAGIC: &[u8; 8] = b"CWFIELD\0";
const DUMP_VERSION: u32 = 1;

/// Contents of a binary field dump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldDump {
    pub extents: Vec<f64>,
    pub intervals: Vec<usize>,
    pub t_final: f64,
    pub steps: usize,
    pub level: usize,
    pub values: Vec<f64>,
}

/// Magic, version, `n`, per-axis `(X_k, N_k)`, `T`, `M`, level, then the
/// values in axis-major order; all little-endian.
pub fn write_field_dump<W: Write>(field: &GridField, time: &TimeMesh, level: usize, mut out: W) -> std::io::Result<()> {
    let mesh = field.mesh();
    out.write_all(DUMP_MAGIC)?;
    out.write_all(&DUMP_VERSION.to_le_bytes())?;
    out.write_all(&(mesh.dim() as u32).to_le_bytes())?;
    for ax in mesh.axes() {
        out.write_all(&ax.extent().to_le_bytes())?;
        out.write_all(&(ax.intervals() as u64).to_le_bytes())?;
    }
    out.write_all(&time.extent().to_le_bytes())?;
    out.write_all(&(time.steps() as u64).to_le_bytes())?;
    out.write_all(&(level as u64).to_le_bytes())?;
    for v in field.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn save_field_dump(field: &GridField, time: &TimeMesh, level: usize, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    write_field_dump(field, time, level, &mut w).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

fn take<const K: usize>(r: &mut impl Read) -> std::io::Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_field_dump<R: Read>(mut r: R) -> Result<FieldDump> {
    let bad = |msg: &str| Error::InvalidArgument(format!("not a field dump: {msg}"));
    let io = |e: std::io::Error| bad(&e.to_string());
    if &take::<8>(&mut r).map_err(io)? != DUMP_MAGIC {
        return Err(bad("wrong magic"));
    }
    let version = u32::from_le_bytes(take(&mut r).map_err(io)?);
    if version != DUMP_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let dim = u32::from_le_bytes(take(&mut r).map_err(io)?) as usize;
    let mut extents = Vec::with_capacity(dim);
    let mut intervals = Vec::with_capacity(dim);
    for _ in 0..dim {
        extents.push(f64::from_le_bytes(take(&mut r).map_err(io)?));
        intervals.push(u64::from_le_bytes(take(&mut r).map_err(io)?) as usize);
    }
    let t_final = f64::from_le_bytes(take(&mut r).map_err(io)?);
    let steps = u64::from_le_bytes(take(&mut r).map_err(io)?) as usize;
    let level = u64::from_le_bytes(take(&mut r).map_err(io)?) as usize;
    let len: usize = intervals.iter().map(|n| n + 1).product();
    let mut bytes = Vec::with_capacity(len * 8);
    r.read_to_end(&mut bytes).map_err(io)?;
    if bytes.len() != len * 8 {
        return Err(bad(&format!("expected {} value bytes, found {}", len * 8, bytes.len())));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok(FieldDump {
        extents,
        intervals,
        t_final,
        steps,
        level,
        values,
    })
}

pub fn load_field_dump(path: &Path) -> Result<FieldDump> {
    let file = File::open(path).map_err(io_err(path))?;
    read_field_dump(BufReader::new(file))
}
