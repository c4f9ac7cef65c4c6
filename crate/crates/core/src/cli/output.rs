//! Field and convergence files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::cli::config::OutputConfig;
use crate::cli::run::Results;
use crate::mesh::Mesh;

/// `node_id,x,y,p,theta,h,T_mid` with 17 significant digits.
pub fn surface_csv(r: &Results) -> String {
    let mut s = String::from("node_id,x,y,p,theta,h,T_mid\n");
    for (i, node) in r.surface.nodes.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            i + 1,
            node[0],
            node[1],
            r.p[i],
            r.theta[i],
            r.h[i],
            r.t_mid[i]
        );
    }
    s
}

/// Legacy ASCII VTK unstructured grid with one point scalar per field.
pub fn vtk_unstructured(mesh: &Mesh, title: &str, fields: &[(&str, &[f64])]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID"
    );
    let _ = writeln!(s, "POINTS {} double", mesh.nodes.len());
    for p in &mesh.nodes {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2]);
    }
    let size: usize = mesh.elements.iter().map(|e| e.nodes.len() + 1).sum();
    let _ = writeln!(s, "CELLS {} {}", mesh.elements.len(), size);
    for e in &mesh.elements {
        let _ = write!(s, "{}", e.nodes.len());
        for n in &e.nodes {
            let _ = write!(s, " {n}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {}", mesh.elements.len());
    for e in &mesh.elements {
        let _ = writeln!(s, "{}", e.kind.vtk_cell_type());
    }
    if !fields.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", mesh.nodes.len());
        for (name, values) in fields {
            let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
            for v in *values {
                let _ = writeln!(s, "{v:.16e}");
            }
        }
    }
    s
}

fn history_csv<T: Copy, U: Copy>(header: &str, rows: &[(T, U)], fmt: impl Fn(T, U) -> String) -> String {
    let mut s = format!("{header}\n");
    for (i, &(a, b)) in rows.iter().enumerate() {
        let _ = writeln!(s, "{},{}", i + 1, fmt(a, b));
    }
    s
}

/// Writes the selected outputs into `dir` and returns the written paths.
pub fn write_fields(r: &Results, dir: &Path, select: &OutputConfig) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    if select.csv {
        files.push((dir.join("surface.csv"), surface_csv(r)));
    }
    if select.vtk {
        let theta3: Vec<f64> = r.film.surface_of().iter().map(|&i| r.theta[i]).collect();
        let p3: Vec<f64> = r.film.surface_of().iter().map(|&i| r.p[i]).collect();
        files.push((
            dir.join("film.vtk"),
            vtk_unstructured(
                &r.film.mesh,
                "film temperature",
                &[("T", &r.temperature), ("p", &p3), ("theta", &theta3)],
            ),
        ));
    }
    if select.convergence {
        files.push((
            dir.join("sor.csv"),
            history_csv("iter,e_sor,cavitated_nodes", &r.sor_history, |e, c| {
                format!("{e:.16e},{c}")
            }),
        ));
        files.push((
            dir.join("newton.csv"),
            history_csv("iter,resnorm,lambda", &r.newton_history, |n, l| {
                format!("{n:.16e},{l:.16e}")
            }),
        ));
        let outer: Vec<(f64, ())> = r.outer_history.iter().map(|&c| (c, ())).collect();
        files.push((
            dir.join("outer.csv"),
            history_csv("iter,change", &outer, |c, _| format!("{c:.16e}")),
        ));
    }
    let mut out = Vec::with_capacity(files.len());
    for (path, text) in files {
        fs::write(&path, text)?;
        out.push(path);
    }
    Ok(out)
}
