//! Mesh file formats.
//!
//! Native format: versioned JSON mirroring the in-memory complex. Signed
//! face/cell references are 1-based so the sign is never attached to a
//! zero; plain index lists (edge endpoints, boundary faces) are 0-based.
//! Legacy ASCII VTK with POLYHEDRON (type 42) cells is supported for
//! interoperability; on load, face loops are re-oriented outward from the
//! cell centroid, so cells are assumed star-shaped there.

use super::{validate, Cell, Face, MeshBuilder, MeshError, PolyMesh, Signed};
use crate::V3;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    NativeJson,
    VtkPolyhedral,
}

impl MeshFormat {
    /// Guess from the file extension, defaulting to native JSON.
    pub fn from_path(path: &Path) -> MeshFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("vtk") => MeshFormat::VtkPolyhedral,
            _ => MeshFormat::NativeJson,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MeshJson {
    version: u32,
    vertices: Vec<[f64; 3]>,
    edges: Vec<[usize; 2]>,
    faces: Vec<FaceJson>,
    cells: Vec<CellJson>,
    boundary_faces: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct FaceJson {
    edges: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct CellJson {
    faces: Vec<i64>,
    subdomain: u32,
}

fn to_signed(raw: i64, count: usize, what: &str) -> Result<Signed, MeshError> {
    if raw == 0 {
        return Err(MeshError::Topology(format!("{what} reference 0 is not a valid 1-based index")));
    }
    let idx = raw.unsigned_abs() as usize - 1;
    if idx >= count {
        return Err(MeshError::Topology(format!("{what} reference {raw} out of range")));
    }
    Ok(Signed::new(idx, if raw > 0 { 1 } else { -1 }))
}

pub fn save_mesh(mesh: &PolyMesh, path: &Path, format: MeshFormat) -> Result<(), MeshError> {
    let text = match format {
        MeshFormat::NativeJson => mesh_to_json(mesh)?,
        MeshFormat::VtkPolyhedral => mesh_to_vtk(mesh, &[], &[]),
    };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<PolyMesh, MeshError> {
    let text = std::fs::read_to_string(path)?;
    let mesh = match format {
        MeshFormat::NativeJson => mesh_from_json(&text)?,
        MeshFormat::VtkPolyhedral => mesh_from_vtk(&text)?,
    };
    // loading gates on the full invariant set; validation is report-only
    // everywhere else
    let report = validate(&mesh);
    if let Some(v) = report.violations.first() {
        return Err(MeshError::Topology(v.to_string()));
    }
    Ok(mesh)
}

pub fn mesh_to_json(mesh: &PolyMesh) -> Result<String, MeshError> {
    let doc = MeshJson {
        version: 1,
        vertices: mesh.vertices().iter().map(|v| [v.x, v.y, v.z]).collect(),
        edges: mesh.edges().to_vec(),
        faces: mesh
            .faces()
            .iter()
            .map(|f| FaceJson {
                edges: f.edges.iter().map(|s| (s.idx as i64 + 1) * s.sign as i64).collect(),
            })
            .collect(),
        cells: mesh
            .cells()
            .iter()
            .map(|c| CellJson {
                faces: c.faces.iter().map(|s| (s.idx as i64 + 1) * s.sign as i64).collect(),
                subdomain: c.subdomain,
            })
            .collect(),
        boundary_faces: (0..mesh.n_faces()).filter(|&f| mesh.is_boundary_face(f)).collect(),
    };
    serde_json::to_string(&doc).map_err(|e| MeshError::Topology(e.to_string()))
}

pub fn mesh_from_json(text: &str) -> Result<PolyMesh, MeshError> {
    let doc: MeshJson = serde_json::from_str(text).map_err(|e| MeshError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    if doc.version != 1 {
        return Err(MeshError::Topology(format!("unsupported mesh schema version {}", doc.version)));
    }
    let vertices: Vec<V3> = doc.vertices.iter().map(|v| V3::new(v[0], v[1], v[2])).collect();
    let n_edges = doc.edges.len();
    let n_faces = doc.faces.len();
    let faces = doc
        .faces
        .iter()
        .map(|f| {
            Ok(Face {
                edges: f
                    .edges
                    .iter()
                    .map(|&raw| to_signed(raw, n_edges, "edge"))
                    .collect::<Result<_, _>>()?,
            })
        })
        .collect::<Result<Vec<_>, MeshError>>()?;
    let cells = doc
        .cells
        .iter()
        .map(|c| {
            Ok(Cell {
                faces: c
                    .faces
                    .iter()
                    .map(|&raw| to_signed(raw, n_faces, "face"))
                    .collect::<Result<_, _>>()?,
                subdomain: c.subdomain,
            })
        })
        .collect::<Result<Vec<_>, MeshError>>()?;
    let mesh = PolyMesh::new(vertices, doc.edges, faces, cells)?;
    for &bf in &doc.boundary_faces {
        if bf >= mesh.n_faces() || !mesh.is_boundary_face(bf) {
            return Err(MeshError::Topology(format!(
                "boundary_faces lists face {bf} which is not a boundary face"
            )));
        }
    }
    let listed = doc.boundary_faces.len();
    let actual = mesh.boundary_faces().iter().filter(|&&b| b).count();
    if listed != actual {
        return Err(MeshError::Topology(format!(
            "boundary_faces lists {listed} faces but the complex has {actual}"
        )));
    }
    Ok(mesh)
}

/// Legacy ASCII VTK with POLYHEDRON cells, optional cell data appended.
pub fn mesh_to_vtk(
    mesh: &PolyMesh,
    cell_scalars: &[(&str, Vec<f64>)],
    cell_vectors: &[(&str, Vec<V3>)],
) -> String {
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str("polymag polyhedral mesh\n");
    out.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {} double", mesh.n_vertices());
    for v in mesh.vertices() {
        let _ = writeln!(out, "{:.17e} {:.17e} {:.17e}", v.x, v.y, v.z);
    }
    let mut streams: Vec<Vec<usize>> = Vec::with_capacity(mesh.n_cells());
    for c in 0..mesh.n_cells() {
        let cell = &mesh.cells()[c];
        let mut s = vec![cell.faces.len()];
        for sf in &cell.faces {
            let mut vloop: Vec<usize> = mesh.face_vertex_loop(sf.idx).to_vec();
            if sf.sign < 0 {
                vloop.reverse();
            }
            s.push(vloop.len());
            s.extend(vloop);
        }
        streams.push(s);
    }
    let total: usize = streams.iter().map(|s| s.len() + 1).sum();
    let _ = writeln!(out, "CELLS {} {}", mesh.n_cells(), total);
    for s in &streams {
        let _ = write!(out, "{}", s.len());
        for v in s {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "CELL_TYPES {}", mesh.n_cells());
    for _ in 0..mesh.n_cells() {
        out.push_str("42\n");
    }
    let _ = writeln!(out, "CELL_DATA {}", mesh.n_cells());
    out.push_str("SCALARS subdomain int 1\nLOOKUP_TABLE default\n");
    for c in mesh.cells() {
        let _ = writeln!(out, "{}", c.subdomain);
    }
    for (name, values) in cell_scalars {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in values {
            let _ = writeln!(out, "{v:.17e}");
        }
    }
    for (name, values) in cell_vectors {
        let _ = writeln!(out, "VECTORS {name} double");
        for v in values {
            let _ = writeln!(out, "{:.17e} {:.17e} {:.17e}", v.x, v.y, v.z);
        }
    }
    out
}

struct Tokens<'a> {
    toks: Vec<(&'a str, usize)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut toks = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            for t in line.split_whitespace() {
                toks.push((t, lineno + 1));
            }
        }
        Tokens { toks, pos: 0 }
    }
    fn line(&self) -> usize {
        self.toks.get(self.pos.min(self.toks.len().saturating_sub(1))).map_or(0, |t| t.1)
    }
    fn next(&mut self, what: &str) -> Result<&'a str, MeshError> {
        let t = self.toks.get(self.pos).ok_or_else(|| MeshError::Parse {
            line: self.line(),
            message: format!("unexpected end of file, expected {what}"),
        })?;
        self.pos += 1;
        Ok(t.0)
    }
    fn next_usize(&mut self, what: &str) -> Result<usize, MeshError> {
        let line = self.line();
        self.next(what)?.parse().map_err(|_| MeshError::Parse {
            line,
            message: format!("expected integer {what}"),
        })
    }
    fn next_f64(&mut self, what: &str) -> Result<f64, MeshError> {
        let line = self.line();
        self.next(what)?.parse().map_err(|_| MeshError::Parse {
            line,
            message: format!("expected number {what}"),
        })
    }
    fn skip_until(&mut self, keyword: &str) -> Result<(), MeshError> {
        while self.pos < self.toks.len() {
            if self.toks[self.pos].0.eq_ignore_ascii_case(keyword) {
                self.pos += 1;
                return Ok(());
            }
            self.pos += 1;
        }
        Err(MeshError::Parse { line: 0, message: format!("keyword {keyword} not found") })
    }
}

pub fn mesh_from_vtk(text: &str) -> Result<PolyMesh, MeshError> {
    let mut tk = Tokens::new(text);
    tk.skip_until("ASCII")?;
    tk.skip_until("DATASET")?;
    let kind = tk.next("dataset kind")?;
    if !kind.eq_ignore_ascii_case("UNSTRUCTURED_GRID") {
        return Err(MeshError::Parse {
            line: tk.line(),
            message: format!("unsupported dataset {kind}, need UNSTRUCTURED_GRID"),
        });
    }
    tk.skip_until("POINTS")?;
    let np = tk.next_usize("point count")?;
    let _dtype = tk.next("point type")?;
    let mut vertices = Vec::with_capacity(np);
    for _ in 0..np {
        let x = tk.next_f64("x")?;
        let y = tk.next_f64("y")?;
        let z = tk.next_f64("z")?;
        vertices.push(V3::new(x, y, z));
    }
    tk.skip_until("CELLS")?;
    let nc = tk.next_usize("cell count")?;
    let _total = tk.next_usize("cell list size")?;
    let mut raw_cells: Vec<Vec<Vec<usize>>> = Vec::with_capacity(nc);
    for _ in 0..nc {
        let size = tk.next_usize("cell stream size")?;
        let mut ints = Vec::with_capacity(size);
        for _ in 0..size {
            ints.push(tk.next_usize("cell stream entry")?);
        }
        let mut faces = Vec::new();
        let mut k = 1; // ints[0] is the face count
        let nf = *ints.first().ok_or(MeshError::Parse {
            line: tk.line(),
            message: "empty polyhedron stream".into(),
        })?;
        for _ in 0..nf {
            let m = ints[k];
            k += 1;
            let vloop: Vec<usize> = ints[k..k + m].to_vec();
            k += m;
            faces.push(vloop);
        }
        raw_cells.push(faces);
    }
    tk.skip_until("CELL_TYPES")?;
    let nt = tk.next_usize("cell type count")?;
    for _ in 0..nt {
        let t = tk.next_usize("cell type")?;
        if t != 42 {
            return Err(MeshError::Parse {
                line: tk.line(),
                message: format!("unsupported VTK cell type {t}, only POLYHEDRON (42)"),
            });
        }
    }
    // optional per-cell subdomain scalars
    let mut subdomains = vec![0u32; nc];
    let save = tk.pos;
    if tk.skip_until("CELL_DATA").is_ok() {
        let _n = tk.next_usize("cell data count")?;
        loop {
            let Ok(word) = tk.next("attribute") else { break };
            if word.eq_ignore_ascii_case("SCALARS") {
                let name = tk.next("name")?;
                let _ty = tk.next("type")?;
                let comps: usize = tk.next("components").map_or(1, |s| s.parse().unwrap_or(1));
                let _ = tk.skip_until("default");
                if name == "subdomain" && comps == 1 {
                    for s in subdomains.iter_mut() {
                        *s = tk.next_usize("subdomain value")? as u32;
                    }
                    break;
                } else {
                    for _ in 0..nc * comps {
                        let _ = tk.next_f64("value")?;
                    }
                }
            } else if word.eq_ignore_ascii_case("VECTORS") {
                let _name = tk.next("name")?;
                let _ty = tk.next("type")?;
                for _ in 0..nc * 3 {
                    let _ = tk.next_f64("value")?;
                }
            } else {
                break;
            }
        }
    } else {
        tk.pos = save;
    }

    let mut builder = MeshBuilder::new(vertices.clone());
    for (ci, faces) in raw_cells.into_iter().enumerate() {
        // re-orient each loop outward from the vertex centroid of the cell
        let mut all: Vec<usize> = faces.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        for &v in &all {
            if v >= vertices.len() {
                return Err(MeshError::Parse {
                    line: 0,
                    message: format!("cell {ci} references missing point {v}"),
                });
            }
        }
        let centroid: V3 = all.iter().map(|&v| vertices[v]).sum::<V3>() / all.len() as f64;
        let oriented = faces
            .into_iter()
            .map(|mut vloop| {
                let pts: Vec<V3> = vloop.iter().map(|&v| vertices[v]).collect();
                let n = crate::quadrature::newell_normal(&pts);
                let fc: V3 = pts.iter().sum::<V3>() / pts.len() as f64;
                if n.dot(&(fc - centroid)) < 0.0 {
                    vloop.reverse();
                }
                vloop
            })
            .collect();
        builder.add_cell(oriented, subdomains[ci]);
    }
    builder.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_perturbed_hex, generate_structured_hex};

    #[test]
    fn json_round_trip_preserves_complex() {
        let m = generate_perturbed_hex(
            2,
            [V3::zeros(), V3::new(1.0, 1.0, 1.0)],
            0.15,
            11,
        )
        .unwrap();
        let text = mesh_to_json(&m).unwrap();
        let back = mesh_from_json(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn vtk_round_trip_preserves_counts_and_volume() {
        let m = generate_structured_hex(2, [V3::zeros(), V3::new(1.0, 1.0, 1.0)]).unwrap();
        let text = mesh_to_vtk(&m, &[], &[]);
        let back = mesh_from_vtk(&text).unwrap();
        assert_eq!(m.n_cells(), back.n_cells());
        assert_eq!(m.n_faces(), back.n_faces());
        assert_eq!(m.n_edges(), back.n_edges());
        let va: f64 = m.geometry().cell.iter().map(|c| c.volume).sum();
        let vb: f64 = back.geometry().cell.iter().map(|c| c.volume).sum();
        assert!((va - vb).abs() < 1e-12);
    }

    #[test]
    fn face_used_three_times_is_topology_error() {
        let m = generate_structured_hex(2, [V3::zeros(), V3::new(1.0, 1.0, 1.0)]).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&mesh_to_json(&m).unwrap()).unwrap();
        // append a duplicate of cell 0 so its faces get extra references
        let cells = doc["cells"].as_array_mut().unwrap();
        let dup = cells[0].clone();
        cells.push(dup);
        let err = mesh_from_json(&doc.to_string()).unwrap_err();
        assert!(matches!(err, MeshError::Topology(_)));
    }

    #[test]
    fn malformed_json_reports_line() {
        let err = mesh_from_json("{\n  \"version\": 1,\n  broken\n}").unwrap_err();
        match err {
            MeshError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
