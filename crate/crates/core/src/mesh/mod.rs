//! Oriented polyhedral mesh complexes.
//!
//! Orientation conventions, chosen so the incidence operators are integer
//! matrices:
//! - every edge runs from its lower-index vertex to its higher-index one
//!   (that direction is the edge tangent `t_e`);
//! - a face stores a closed loop of signed edges, sign +1 when the edge's
//!   own direction agrees with the loop; the loop is counterclockwise as
//!   seen from the tip of the face normal `n_f` (Newell);
//! - a cell stores signed faces, sign +1 when `n_f` points out of the cell.

mod builder;
pub mod generate;
pub mod io;
mod validate;

pub use builder::MeshBuilder;
pub use generate::{
    generate_extruded, generate_extruded_graded, generate_perturbed_hex, generate_structured_hex,
    Polygon2D,
};
pub use io::{load_mesh, save_mesh, MeshFormat};
pub use validate::{validate, ValidationReport, Violation};

use crate::quadrature::{CellShape, PolygonShape};
use crate::V3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("topology error: {0}")]
    Topology(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid 2d polygon mesh: {0}")]
    InvalidPolygon2D(String),
    #[error("perturbation rejected: {0}")]
    PerturbationRejected(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Index with an orientation sign (+1 / -1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signed {
    pub idx: usize,
    pub sign: i8,
}

impl Signed {
    pub fn new(idx: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Signed { idx, sign }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// Closed signed-edge loop.
    pub edges: Vec<Signed>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub faces: Vec<Signed>,
    pub subdomain: u32,
}

#[derive(Clone, Debug)]
pub struct EdgeGeom {
    pub length: f64,
    pub tangent: V3,
    pub midpoint: V3,
}

#[derive(Clone, Debug)]
pub struct FaceGeom {
    pub shape: PolygonShape,
    pub diameter: f64,
    /// Vertex loop matching the signed-edge loop (vertex i starts edge i).
    pub vertex_loop: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CellGeom {
    pub volume: f64,
    pub barycenter: V3,
    pub diameter: f64,
}

#[derive(Clone, Debug)]
pub struct MeshGeometry {
    pub edge: Vec<EdgeGeom>,
    pub face: Vec<FaceGeom>,
    pub cell: Vec<CellGeom>,
}

#[derive(Clone, Debug)]
pub struct PolyMesh {
    vertices: Vec<V3>,
    edges: Vec<[usize; 2]>,
    faces: Vec<Face>,
    cells: Vec<Cell>,
    boundary_face: Vec<bool>,
    geom: MeshGeometry,
}

impl PartialEq for PolyMesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.edges == other.edges
            && self.faces == other.faces
            && self.cells == other.cells
            && self.boundary_face == other.boundary_face
    }
}

impl PolyMesh {
    /// Assemble a mesh from raw topology, deriving geometry and the
    /// boundary flags. Fails on structural defects (non-canonical edges,
    /// open face loops, faces used by more than two cells or twice with
    /// the same sign).
    pub fn new(
        vertices: Vec<V3>,
        edges: Vec<[usize; 2]>,
        faces: Vec<Face>,
        cells: Vec<Cell>,
    ) -> Result<Self, MeshError> {
        let nv = vertices.len();
        for (k, v) in vertices.iter().enumerate() {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(MeshError::Topology(format!("vertex {k} has non-finite coordinates")));
            }
        }
        for (k, e) in edges.iter().enumerate() {
            if e[0] >= nv || e[1] >= nv {
                return Err(MeshError::Topology(format!("edge {k} references missing vertex")));
            }
            if e[0] >= e[1] {
                return Err(MeshError::Topology(format!(
                    "edge {k} is not canonically oriented (tail {} >= head {})",
                    e[0], e[1]
                )));
            }
        }
        // face loops must chain tail-to-head cyclically
        let mut vertex_loops = Vec::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            if f.edges.len() < 3 {
                return Err(MeshError::Topology(format!("face {fi} has fewer than 3 edges")));
            }
            let mut vloop = Vec::with_capacity(f.edges.len());
            for s in &f.edges {
                if s.idx >= edges.len() {
                    return Err(MeshError::Topology(format!("face {fi} references missing edge")));
                }
                let [t, h] = edges[s.idx];
                let (start, _end) = if s.sign > 0 { (t, h) } else { (h, t) };
                vloop.push(start);
            }
            for (k, s) in f.edges.iter().enumerate() {
                let [t, h] = edges[s.idx];
                let end = if s.sign > 0 { h } else { t };
                let next_start = vloop[(k + 1) % vloop.len()];
                if end != next_start {
                    return Err(MeshError::Topology(format!(
                        "face {fi} edge loop does not close at position {k}"
                    )));
                }
            }
            vertex_loops.push(vloop);
        }
        // face usage counts and sign pairing
        let mut usage: Vec<Vec<i8>> = vec![Vec::new(); faces.len()];
        for (ci, c) in cells.iter().enumerate() {
            if c.faces.len() < 4 {
                return Err(MeshError::Topology(format!("cell {ci} has fewer than 4 faces")));
            }
            for s in &c.faces {
                if s.idx >= faces.len() {
                    return Err(MeshError::Topology(format!("cell {ci} references missing face")));
                }
                usage[s.idx].push(s.sign);
            }
        }
        let mut boundary_face = vec![false; faces.len()];
        for (fi, u) in usage.iter().enumerate() {
            match u.len() {
                0 => {
                    return Err(MeshError::Topology(format!("face {fi} is not used by any cell")))
                }
                1 => boundary_face[fi] = true,
                2 => {
                    if u[0] == u[1] {
                        return Err(MeshError::Topology(format!(
                            "interior face {fi} carries the same sign in both cells"
                        )));
                    }
                }
                n => {
                    return Err(MeshError::Topology(format!("face {fi} is used by {n} cells")))
                }
            }
        }

        let geom = Self::build_geometry(&vertices, &edges, &faces, &cells, &vertex_loops);
        Ok(PolyMesh { vertices, edges, faces, cells, boundary_face, geom })
    }

    fn build_geometry(
        vertices: &[V3],
        edges: &[[usize; 2]],
        faces: &[Face],
        cells: &[Cell],
        vertex_loops: &[Vec<usize>],
    ) -> MeshGeometry {
        let edge_geom: Vec<EdgeGeom> = edges
            .iter()
            .map(|&[t, h]| {
                let d = vertices[h] - vertices[t];
                let length = d.norm();
                EdgeGeom {
                    length,
                    tangent: d / length,
                    midpoint: 0.5 * (vertices[t] + vertices[h]),
                }
            })
            .collect();
        let face_geom: Vec<FaceGeom> = faces
            .iter()
            .zip(vertex_loops)
            .map(|(_, vloop)| {
                let pts: Vec<V3> = vloop.iter().map(|&v| vertices[v]).collect();
                let shape = PolygonShape::from_loop(pts);
                let diameter = shape.diameter();
                FaceGeom { shape, diameter, vertex_loop: vloop.clone() }
            })
            .collect();
        let cell_geom: Vec<CellGeom> = cells
            .iter()
            .map(|c| {
                let outward: Vec<PolygonShape> = c
                    .faces
                    .iter()
                    .map(|s| oriented_shape(&face_geom[s.idx].shape, s.sign))
                    .collect();
                let shape = CellShape::from_faces(outward);
                CellGeom {
                    volume: shape.volume,
                    barycenter: shape.barycenter,
                    diameter: shape.diameter,
                }
            })
            .collect();
        MeshGeometry { edge: edge_geom, face: face_geom, cell: cell_geom }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn vertices(&self) -> &[V3] {
        &self.vertices
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }
    pub fn geometry(&self) -> &MeshGeometry {
        &self.geom
    }
    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.boundary_face[f]
    }
    pub fn boundary_faces(&self) -> &[bool] {
        &self.boundary_face
    }

    pub fn face_vertex_loop(&self, f: usize) -> &[usize] {
        &self.geom.face[f].vertex_loop
    }

    /// Outward-oriented geometric view of a cell (cached bulk quantities,
    /// face loops flipped according to the cell's face signs).
    pub fn cell_shape(&self, c: usize) -> CellShape {
        let cell = &self.cells[c];
        let faces = cell
            .faces
            .iter()
            .map(|s| oriented_shape(&self.geom.face[s.idx].shape, s.sign))
            .collect();
        let g = &self.geom.cell[c];
        CellShape { faces, volume: g.volume, barycenter: g.barycenter, diameter: g.diameter }
    }

    /// Distinct edges of a cell, ascending.
    pub fn cell_edges(&self, c: usize) -> Vec<usize> {
        let mut e: Vec<usize> = self.cells[c]
            .faces
            .iter()
            .flat_map(|s| self.faces[s.idx].edges.iter().map(|se| se.idx))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Distinct vertices of a cell, ascending.
    pub fn cell_vertices(&self, c: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.cells[c]
            .faces
            .iter()
            .flat_map(|s| self.geom.face[s.idx].vertex_loop.iter().copied())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn boundary_edge_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.edges.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            if self.boundary_face[fi] {
                for s in &f.edges {
                    mask[s.idx] = true;
                }
            }
        }
        mask
    }

    pub fn boundary_vertex_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for (fi, g) in self.geom.face.iter().enumerate() {
            if self.boundary_face[fi] {
                for &v in &g.vertex_loop {
                    mask[v] = true;
                }
            }
        }
        mask
    }

    /// Mean cell diameter, the mesh-size used in convergence reports.
    pub fn mean_diameter(&self) -> f64 {
        self.geom.cell.iter().map(|c| c.diameter).sum::<f64>() / self.cells.len() as f64
    }

    /// True when the edge graph is connected.
    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for &[t, h] in &self.edges {
            adj[t].push(h);
            adj[h].push(t);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.vertices.len()
    }
}

/// Copy of a polygon shape with orientation flipped when sign < 0.
pub(crate) fn oriented_shape(shape: &PolygonShape, sign: i8) -> PolygonShape {
    if sign > 0 {
        shape.clone()
    } else {
        let mut pts = shape.loop_pts.clone();
        pts.reverse();
        PolygonShape {
            loop_pts: pts,
            normal: -shape.normal,
            area: shape.area,
            centroid: shape.centroid,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_hex_counts_and_geometry() {
        let m = generate_structured_hex(1, [V3::zeros(), V3::new(1.0, 1.0, 1.0)]).unwrap();
        assert_eq!(m.n_vertices(), 8);
        assert_eq!(m.n_edges(), 12);
        assert_eq!(m.n_faces(), 6);
        assert_eq!(m.n_cells(), 1);
        assert!(m.boundary_faces().iter().all(|&b| b));
        let g = m.geometry();
        assert!((g.cell[0].volume - 1.0).abs() < 1e-14);
        assert!((g.cell[0].diameter - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn structured_counts_n2() {
        let m = generate_structured_hex(2, [V3::zeros(), V3::new(1.0, 1.0, 1.0)]).unwrap();
        assert_eq!(m.n_vertices(), 27);
        assert_eq!(m.n_edges(), 54);
        assert_eq!(m.n_faces(), 36);
        assert_eq!(m.n_cells(), 8);
        assert!(m.is_connected());
    }

    #[test]
    fn per_cell_euler_single_hex() {
        let m = generate_structured_hex(1, [V3::zeros(), V3::new(1.0, 1.0, 1.0)]).unwrap();
        let nv = m.cell_vertices(0).len() as i64;
        let ne = m.cell_edges(0).len() as i64;
        let nf = m.cells()[0].faces.len() as i64;
        assert_eq!(ne - (nv - 1), nf - 1);
        assert_eq!(ne - (nv - 1), 5);
    }

    #[test]
    fn volume_additivity() {
        let m = generate_structured_hex(3, [V3::zeros(), V3::new(2.0, 1.0, 1.0)]).unwrap();
        let total: f64 = m.geometry().cell.iter().map(|c| c.volume).sum();
        assert!((total - 2.0).abs() < 1e-12 * 2.0);
    }
}
