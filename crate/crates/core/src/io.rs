//! Field and report output: per-node CSV snapshots, legacy-VTK
//! unstructured grids, spalling reports and the diagnostics stream.
//! Floats are written with Rust's shortest round-trip formatting, so
//! reading a file back reproduces the values exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::assembly::NodalState;
use crate::mesh::Mesh;
use crate::solver::StepDiagnostics;
use crate::spalling::SpallingReport;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

fn format_err(path: &Path, message: impl Into<String>) -> IoError {
    IoError::Format { path: path.to_path_buf(), message: message.into() }
}

/// File stem with the time embedded as zero-padded whole seconds.
pub fn stamped_name(prefix: &str, time: f64) -> String {
    format!("{prefix}_{:06}", time.round() as u64)
}

/// Write `snapshot_TTTTTT.csv` and `.vtk` for one state; returns the
/// paths written.
pub fn write_snapshot(
    state: &NodalState,
    mesh: &Mesh,
    time: f64,
    dir: &Path,
) -> Result<Vec<PathBuf>, IoError> {
    let stem = stamped_name("snapshot", time);
    let csv_path = dir.join(format!("{stem}.csv"));
    let mut csv = String::from("x_m,y_m,w_kgm3,theta_K,P_Pa\n");
    for i in 0..mesh.n_nodes() {
        let [x, y] = mesh.coords[i];
        writeln!(csv, "{x},{y},{},{},{}", state.w[i], state.theta[i], state.p[i]).unwrap();
    }
    fs::write(&csv_path, csv).map_err(io_err(&csv_path))?;

    let vtk_path = dir.join(format!("{stem}.vtk"));
    let mut vtk = vtk_header(mesh, "hygrothermal fields");
    writeln!(vtk, "POINT_DATA {}", mesh.n_nodes()).unwrap();
    for (name, values) in
        [("w_kgm3", &state.w), ("theta_K", &state.theta), ("P_Pa", &state.p)]
    {
        writeln!(vtk, "SCALARS {name} double 1").unwrap();
        vtk.push_str("LOOKUP_TABLE default\n");
        for v in values {
            writeln!(vtk, "{v}").unwrap();
        }
    }
    fs::write(&vtk_path, vtk).map_err(io_err(&vtk_path))?;
    Ok(vec![csv_path, vtk_path])
}

/// Read a snapshot CSV back into nodal fields (and coordinates).
pub fn read_snapshot(path: &Path) -> Result<(Vec<[f64; 2]>, NodalState), IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| format_err(path, "empty file"))?;
    if header != "x_m,y_m,w_kgm3,theta_K,P_Pa" {
        return Err(format_err(path, format!("unexpected header {header:?}")));
    }
    let mut coords = Vec::new();
    let mut state = NodalState { w: Vec::new(), theta: Vec::new(), p: Vec::new() };
    for (k, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(format_err(path, format!("row {}: expected 5 fields", k + 2)));
        }
        let mut v = [0.0; 5];
        for (j, f) in fields.iter().enumerate() {
            v[j] = f
                .parse()
                .map_err(|e| format_err(path, format!("row {}: {e}", k + 2)))?;
        }
        coords.push([v[0], v[1]]);
        state.w.push(v[2]);
        state.theta.push(v[3]);
        state.p.push(v[4]);
    }
    Ok((coords, state))
}

/// Write `spalling_TTTTTT.csv` (time_s,element_id,zone,margin_Pa) and a
/// VTK zone map with per-element cell data.
pub fn write_spalling_report(
    report: &SpallingReport,
    mesh: &Mesh,
    dir: &Path,
) -> Result<Vec<PathBuf>, IoError> {
    let stem = stamped_name("spalling", report.time);
    let csv_path = dir.join(format!("{stem}.csv"));
    let mut csv = String::from("time_s,element_id,zone,margin_Pa\n");
    for e in 0..mesh.n_elements() {
        writeln!(csv, "{},{e},{},{}", report.time, report.zones[e].letter(), report.margins[e])
            .unwrap();
    }
    fs::write(&csv_path, csv).map_err(io_err(&csv_path))?;

    let vtk_path = dir.join(format!("{stem}.vtk"));
    let mut vtk = vtk_header(mesh, "spalling zones");
    writeln!(vtk, "CELL_DATA {}", mesh.n_elements()).unwrap();
    vtk.push_str("SCALARS zone int 1\nLOOKUP_TABLE default\n");
    for z in &report.zones {
        // 0 = spalled (a), 1 = unstable (b), 2 = stable (c).
        writeln!(vtk, "{}", (z.letter() as u8 - b'a')).unwrap();
    }
    vtk.push_str("SCALARS margin_Pa double 1\nLOOKUP_TABLE default\n");
    for m in &report.margins {
        writeln!(vtk, "{m}").unwrap();
    }
    fs::write(&vtk_path, vtk).map_err(io_err(&vtk_path))?;
    Ok(vec![csv_path, vtk_path])
}

fn vtk_header(mesh: &Mesh, title: &str) -> String {
    let mut vtk = String::new();
    vtk.push_str("# vtk DataFile Version 3.0\n");
    writeln!(vtk, "{title}").unwrap();
    vtk.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    writeln!(vtk, "POINTS {} double", mesh.n_nodes()).unwrap();
    for [x, y] in &mesh.coords {
        writeln!(vtk, "{x} {y} 0").unwrap();
    }
    writeln!(vtk, "CELLS {} {}", mesh.n_elements(), 5 * mesh.n_elements()).unwrap();
    for conn in &mesh.elements {
        writeln!(vtk, "4 {} {} {} {}", conn[0], conn[1], conn[2], conn[3]).unwrap();
    }
    writeln!(vtk, "CELL_TYPES {}", mesh.n_elements()).unwrap();
    for _ in 0..mesh.n_elements() {
        vtk.push_str("9\n");
    }
    vtk
}

pub const DIAGNOSTICS_HEADER: &str = "step\ttime_s\tnewton_iters\tresidual_norm\tresidual_rel";

pub fn diagnostics_line(d: &StepDiagnostics) -> String {
    format!(
        "{}\t{}\t{}\t{:e}\t{:e}",
        d.step, d.time, d.newton_iters, d.residual_norm, d.residual_rel
    )
}

/// Write the whole diagnostics table as TSV.
pub fn write_diagnostics(diagnostics: &[StepDiagnostics], path: &Path) -> Result<(), IoError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "{DIAGNOSTICS_HEADER}").map_err(io_err(path))?;
    for d in diagnostics {
        writeln!(out, "{}", diagnostics_line(d)).map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}
