//! Report-style mesh validation: invariant violations plus the per-cell
//! shape statistics the method's mesh assumptions care about.

use super::PolyMesh;
use crate::V3;

/// Relative face-planarity tolerance (residual <= tol * h_f).
pub const PLANARITY_TOL: f64 = 1e-9;
/// Closed-surface identity tolerance (relative to cell boundary area).
pub const CLOSURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonPlanarFace { face: usize, residual: f64, tol: f64 },
    OpenSurface { cell: usize, residual: f64, tol: f64 },
    EulerMismatch { cell: usize, n_v: usize, n_e: usize, n_f: usize },
    NonPositiveVolume { cell: usize, volume: f64 },
    TangledFace { face: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonPlanarFace { face, residual, tol } => {
                write!(f, "face {face} non-planar: residual {residual:.3e} > tol {tol:.3e}")
            }
            Violation::OpenSurface { cell, residual, tol } => write!(
                f,
                "cell {cell} outward normals do not close: |sum area*n| {residual:.3e} > {tol:.3e}"
            ),
            Violation::EulerMismatch { cell, n_v, n_e, n_f } => write!(
                f,
                "cell {cell} Euler count failed: N_e - (N_v - 1) = {} but N_f - 1 = {}",
                n_e - (n_v - 1),
                n_f - 1
            ),
            Violation::NonPositiveVolume { cell, volume } => {
                write!(f, "cell {cell} has non-positive volume {volume:.3e}")
            }
            Violation::TangledFace { face } => {
                write!(f, "face {face} has near-zero or inverted area")
            }
        }
    }
}

/// Per-cell shape statistics (heuristic quality indicators, not gates).
#[derive(Clone, Debug)]
pub struct CellStats {
    pub h: f64,
    pub min_edge_ratio: f64,
    pub min_face_diameter_ratio: f64,
    pub max_planarity_residual: f64,
    /// Kernel-sampling star-shapedness proxy: min over faces of the signed
    /// distance from the barycenter to the face plane, over h. Positive
    /// means the barycenter sees every face from inside.
    pub star_proxy: f64,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub cell_stats: Vec<CellStats>,
    pub total_volume: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn min_star_proxy(&self) -> f64 {
        self.cell_stats.iter().map(|s| s.star_proxy).fold(f64::INFINITY, f64::min)
    }
}

pub fn validate(mesh: &PolyMesh) -> ValidationReport {
    let mut violations = Vec::new();
    let geom = mesh.geometry();

    for (fi, fg) in geom.face.iter().enumerate() {
        let res = fg.shape.planarity_residual();
        let tol = PLANARITY_TOL * fg.diameter;
        if res > tol {
            violations.push(Violation::NonPlanarFace { face: fi, residual: res, tol });
        }
        if !(fg.shape.area > 0.0) || fg.shape.area < 1e-14 * fg.diameter * fg.diameter {
            violations.push(Violation::TangledFace { face: fi });
        }
    }

    let mut cell_stats = Vec::with_capacity(mesh.n_cells());
    let mut total_volume = 0.0;
    for (ci, cell) in mesh.cells().iter().enumerate() {
        let cg = &geom.cell[ci];
        total_volume += cg.volume;
        if !(cg.volume > 0.0) {
            violations.push(Violation::NonPositiveVolume { cell: ci, volume: cg.volume });
        }

        // closed-surface identity with outward signs
        let mut closure = V3::zeros();
        let mut boundary_area = 0.0;
        for s in &cell.faces {
            let fg = &geom.face[s.idx];
            closure += s.sign as f64 * fg.shape.area * fg.shape.normal;
            boundary_area += fg.shape.area;
        }
        let tol = CLOSURE_TOL * boundary_area;
        if closure.norm() > tol {
            violations.push(Violation::OpenSurface { cell: ci, residual: closure.norm(), tol });
        }

        let n_v = mesh.cell_vertices(ci).len();
        let n_e = mesh.cell_edges(ci).len();
        let n_f = cell.faces.len();
        if n_e + 2 != n_v + n_f {
            violations.push(Violation::EulerMismatch { cell: ci, n_v, n_e, n_f });
        }

        let h = cg.diameter;
        let min_edge = mesh
            .cell_edges(ci)
            .iter()
            .map(|&e| geom.edge[e].length)
            .fold(f64::INFINITY, f64::min);
        let min_fd = cell
            .faces
            .iter()
            .map(|s| geom.face[s.idx].diameter)
            .fold(f64::INFINITY, f64::min);
        let max_planar = cell
            .faces
            .iter()
            .map(|s| geom.face[s.idx].shape.planarity_residual())
            .fold(0.0, f64::max);
        let star = cell
            .faces
            .iter()
            .map(|s| {
                let fg = &geom.face[s.idx];
                let n_out = s.sign as f64 * fg.shape.normal;
                (fg.shape.centroid - cg.barycenter).dot(&n_out)
            })
            .fold(f64::INFINITY, f64::min);
        cell_stats.push(CellStats {
            h,
            min_edge_ratio: min_edge / h,
            min_face_diameter_ratio: min_fd / h,
            max_planarity_residual: max_planar,
            star_proxy: star / h,
        });
    }

    ValidationReport { violations, cell_stats, total_volume }
}
