//! Mesh construction from per-cell outward face loops.

use super::{Cell, Face, MeshError, PolyMesh, Signed};
use crate::V3;
use std::collections::HashMap;

/// Builds a [`PolyMesh`] from cells given as lists of vertex loops, each
/// loop counterclockwise as seen from outside its cell. Shared faces are
/// deduplicated by vertex set; the second cell must present the reversed
/// loop, which becomes sign -1 against the stored face.
pub struct MeshBuilder {
    vertices: Vec<V3>,
    cells: Vec<(Vec<Vec<usize>>, u32)>,
}

impl MeshBuilder {
    pub fn new(vertices: Vec<V3>) -> Self {
        MeshBuilder { vertices, cells: Vec::new() }
    }

    pub fn add_cell(&mut self, face_loops: Vec<Vec<usize>>, subdomain: u32) {
        self.cells.push((face_loops, subdomain));
    }

    pub fn build(self) -> Result<PolyMesh, MeshError> {
        let mut edge_ids: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut face_ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut face_loops: Vec<Vec<usize>> = Vec::new();
        let mut cells: Vec<Cell> = Vec::new();

        for (ci, (loops, subdomain)) in self.cells.iter().enumerate() {
            let mut cell_faces = Vec::with_capacity(loops.len());
            for vloop in loops {
                if vloop.len() < 3 {
                    return Err(MeshError::Topology(format!(
                        "cell {ci} has a face with fewer than 3 vertices"
                    )));
                }
                let mut key = vloop.clone();
                key.sort_unstable();
                key.dedup();
                if key.len() != vloop.len() {
                    return Err(MeshError::Topology(format!(
                        "cell {ci} has a face with repeated vertices"
                    )));
                }
                match face_ids.get(&key) {
                    None => {
                        let idx = face_loops.len();
                        face_ids.insert(key, idx);
                        face_loops.push(vloop.clone());
                        cell_faces.push(Signed::new(idx, 1));
                    }
                    Some(&idx) => {
                        if !is_reversed_rotation(&face_loops[idx], vloop) {
                            return Err(MeshError::Topology(format!(
                                "cell {ci} shares a face whose loop is not the reversal of the stored loop"
                            )));
                        }
                        cell_faces.push(Signed::new(idx, -1));
                    }
                }
            }
            cells.push(Cell { faces: cell_faces, subdomain: *subdomain });
        }

        // signed edge loops per face, creating canonical edges on the fly
        let faces: Vec<Face> = face_loops
            .iter()
            .map(|vloop| {
                let m = vloop.len();
                let edges_signed = (0..m)
                    .map(|k| {
                        let a = vloop[k];
                        let b = vloop[(k + 1) % m];
                        let key = [a.min(b), a.max(b)];
                        let idx = *edge_ids.entry(key).or_insert_with(|| {
                            edges.push(key);
                            edges.len() - 1
                        });
                        Signed::new(idx, if a < b { 1 } else { -1 })
                    })
                    .collect();
                Face { edges: edges_signed }
            })
            .collect();

        PolyMesh::new(self.vertices, edges, faces, cells)
    }
}

/// True when `other` is a cyclic rotation of `stored` reversed.
fn is_reversed_rotation(stored: &[usize], other: &[usize]) -> bool {
    if stored.len() != other.len() {
        return false;
    }
    let n = stored.len();
    let rev: Vec<usize> = other.iter().rev().copied().collect();
    let Some(start) = rev.iter().position(|&v| v == stored[0]) else {
        return false;
    };
    (0..n).all(|k| rev[(start + k) % n] == stored[k])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_tets_share_a_face() {
        // tet 0: vertices 0,1,2,3; tet 1: 1,2,3,4 sharing face (1,2,3)
        let vertices = vec![
            V3::new(0.0, 0.0, 0.0),
            V3::new(1.0, 0.0, 0.0),
            V3::new(0.0, 1.0, 0.0),
            V3::new(0.0, 0.0, 1.0),
            V3::new(1.0, 1.0, 1.0),
        ];
        let mut b = MeshBuilder::new(vertices);
        // outward loops for tet (0,1,2,3)
        b.add_cell(
            vec![vec![0, 2, 1], vec![0, 1, 3], vec![0, 3, 2], vec![1, 2, 3]],
            0,
        );
        // outward loops for tet (1,2,3,4); shared face reversed
        b.add_cell(
            vec![vec![1, 3, 2], vec![1, 2, 4], vec![2, 3, 4], vec![1, 4, 3]],
            0,
        );
        let m = b.build().unwrap();
        assert_eq!(m.n_cells(), 2);
        assert_eq!(m.n_faces(), 7);
        assert_eq!(m.boundary_faces().iter().filter(|&&x| x).count(), 6);
        let vol: f64 = m.geometry().cell.iter().map(|c| c.volume).sum();
        assert!(vol > 0.0);
    }

    #[test]
    fn mismatched_shared_loop_is_rejected() {
        let vertices = vec![
            V3::new(0.0, 0.0, 0.0),
            V3::new(1.0, 0.0, 0.0),
            V3::new(0.0, 1.0, 0.0),
            V3::new(0.0, 0.0, 1.0),
            V3::new(1.0, 1.0, 1.0),
        ];
        let mut b = MeshBuilder::new(vertices);
        b.add_cell(
            vec![vec![0, 2, 1], vec![0, 1, 3], vec![0, 3, 2], vec![1, 2, 3]],
            0,
        );
        // same-orientation shared face: invalid
        b.add_cell(
            vec![vec![1, 2, 3], vec![1, 4, 2], vec![2, 4, 3], vec![1, 3, 4]],
            0,
        );
        assert!(b.build().is_err());
    }
}
