//! Global DOF layouts and the integer incidence operators linking the
//! vertex, edge, and face spaces.
//!
//! DOF values are moments (vertex value, edge tangential moment, face
//! normal flux), which makes the discrete gradient, curl, and divergence
//! pure incidence matrices with entries in {-1, +1}: `(G q)_e = q(head) -
//! q(tail)`, `(C v)_f` the signed edge circulation, `(D psi)_P` the signed
//! face flux sum. The chain identities `C*G = 0` and `D*C = 0` then hold
//! in exact integer arithmetic on every valid mesh.

use crate::mesh::PolyMesh;
use crate::sparse::Csr;

/// Global numbering: vertices, then edges, then faces, each in mesh index
/// order, with boundary masks for the essential-condition variants.
#[derive(Clone, Debug)]
pub struct DofLayout {
    pub n_vertex: usize,
    pub n_edge: usize,
    pub n_face: usize,
    pub boundary_vertex: Vec<bool>,
    pub boundary_edge: Vec<bool>,
    pub boundary_face: Vec<bool>,
}

impl DofLayout {
    pub fn new(mesh: &PolyMesh) -> Self {
        DofLayout {
            n_vertex: mesh.n_vertices(),
            n_edge: mesh.n_edges(),
            n_face: mesh.n_faces(),
            boundary_vertex: mesh.boundary_vertex_mask(),
            boundary_edge: mesh.boundary_edge_mask(),
            boundary_face: mesh.boundary_faces().to_vec(),
        }
    }

    pub fn n_interior_vertices(&self) -> usize {
        self.boundary_vertex.iter().filter(|&&b| !b).count()
    }

    pub fn n_interior_edges(&self) -> usize {
        self.boundary_edge.iter().filter(|&&b| !b).count()
    }
}

/// Vertex-value vector (one value per vertex).
pub type VertexField = Vec<f64>;
/// Edge tangential moments, units field * length.
pub type EdgeField = Vec<f64>;
/// Face normal fluxes, units field * area.
pub type FaceField = Vec<f64>;

/// Discrete gradient: VertexField -> EdgeField.
pub fn grad_op(mesh: &PolyMesh) -> Csr<i64> {
    let mut t = Vec::with_capacity(2 * mesh.n_edges());
    for (e, &[tail, head]) in mesh.edges().iter().enumerate() {
        t.push((e, head, 1i64));
        t.push((e, tail, -1i64));
    }
    Csr::from_triplets(mesh.n_edges(), mesh.n_vertices(), &t)
}

/// Discrete curl: EdgeField -> FaceField.
pub fn curl_op(mesh: &PolyMesh) -> Csr<i64> {
    let mut t = Vec::new();
    for (f, face) in mesh.faces().iter().enumerate() {
        for s in &face.edges {
            t.push((f, s.idx, s.sign as i64));
        }
    }
    Csr::from_triplets(mesh.n_faces(), mesh.n_edges(), &t)
}

/// Discrete (un-normalized) divergence: FaceField -> per-cell flux sums.
pub fn div_op(mesh: &PolyMesh) -> Csr<i64> {
    let mut t = Vec::new();
    for (c, cell) in mesh.cells().iter().enumerate() {
        for s in &cell.faces {
            t.push((c, s.idx, s.sign as i64));
        }
    }
    Csr::from_triplets(mesh.n_cells(), mesh.n_faces(), &t)
}

#[derive(Clone, Debug)]
pub struct SequenceAudit {
    pub curl_grad_nnz: usize,
    pub div_curl_nnz: usize,
    pub euler_failures: Vec<usize>,
    pub connected: bool,
    /// rank(G) and dim ker(C), computed only when `ranks_checked`.
    pub rank_grad: Option<usize>,
    pub kernel_curl_dim: Option<usize>,
    pub n_vertex: usize,
    pub n_edge: usize,
    pub n_face: usize,
    pub n_cell: usize,
}

impl SequenceAudit {
    pub fn passed(&self) -> bool {
        self.curl_grad_nnz == 0
            && self.div_curl_nnz == 0
            && self.euler_failures.is_empty()
            && self.connected
            && self.rank_grad.map_or(true, |r| r == self.n_vertex - 1)
            && self
                .kernel_curl_dim
                .map_or(true, |k| k == self.n_vertex - 1)
    }
}

/// Verify the chain identities C*G = 0 and D*C = 0 exactly, the per-cell
/// Euler counts, and (on small meshes) the rank structure of the sequence.
pub fn exact_sequence_audit(mesh: &PolyMesh) -> SequenceAudit {
    let g = grad_op(mesh);
    let c = curl_op(mesh);
    let d = div_op(mesh);
    let cg = c.mul_csr(&g);
    let dc = d.mul_csr(&c);

    let mut euler_failures = Vec::new();
    for ci in 0..mesh.n_cells() {
        let n_v = mesh.cell_vertices(ci).len();
        let n_e = mesh.cell_edges(ci).len();
        let n_f = mesh.cells()[ci].faces.len();
        if n_e + 2 != n_v + n_f {
            euler_failures.push(ci);
        }
    }

    // dense GF(p) rank checks stay cheap only on small meshes
    let small = mesh.n_edges() <= 400;
    let rank_grad = small.then(|| rank_mod_p(&g));
    let kernel_curl_dim = small.then(|| mesh.n_edges() - rank_mod_p(&c));

    SequenceAudit {
        curl_grad_nnz: cg.nnz(),
        div_curl_nnz: dc.nnz(),
        euler_failures,
        connected: mesh.is_connected(),
        rank_grad,
        kernel_curl_dim,
        n_vertex: mesh.n_vertices(),
        n_edge: mesh.n_edges(),
        n_face: mesh.n_faces(),
        n_cell: mesh.n_cells(),
    }
}

/// Rank over GF(p), p = 2^31 - 1. Incidence matrices of simply connected
/// complexes have unit elementary divisors, so this equals the rational
/// rank.
fn rank_mod_p(m: &Csr<i64>) -> usize {
    const P: i64 = 2_147_483_647;
    let rows = m.nrows;
    let cols = m.ncols;
    let mut a: Vec<Vec<i64>> = vec![vec![0; cols]; rows];
    for r in 0..rows {
        let (cs, vs) = m.row(r);
        for (&c, &v) in cs.iter().zip(vs) {
            a[r][c] = v.rem_euclid(P);
        }
    }
    let inv = |x: i64| -> i64 {
        // Fermat inverse
        let mut base = x.rem_euclid(P);
        let mut exp = P - 2;
        let mut acc = 1i64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % P;
            }
            base = base * base % P;
            exp >>= 1;
        }
        acc
    };
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, p);
        let piv_inv = inv(a[row][col]);
        for r in (row + 1)..rows {
            if a[r][col] != 0 {
                let factor = a[r][col] * piv_inv % P;
                for c in col..cols {
                    a[r][c] = (a[r][c] - factor * a[row][c]).rem_euclid(P);
                }
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_extruded, generate_structured_hex, regular_polygon};
    use crate::V3;
    use rand::{Rng, SeedableRng};

    fn cube(n: usize) -> PolyMesh {
        generate_structured_hex(n, [V3::zeros(), V3::new(1.0, 1.0, 1.0)]).unwrap()
    }

    #[test]
    fn grad_of_linear_matches_differences() {
        let m = cube(2);
        let g = grad_op(&m);
        let q: Vec<f64> = m.vertices().iter().map(|v| v.x).collect();
        let gq: Vec<f64> = (0..m.n_edges())
            .map(|e| {
                let (cols, vals) = g.row(e);
                cols.iter().zip(vals).map(|(&c, &v)| v as f64 * q[c]).sum()
            })
            .collect();
        for (e, &[t, h]) in m.edges().iter().enumerate() {
            let expect = m.vertices()[h].x - m.vertices()[t].x;
            assert!((gq[e] - expect).abs() < 1e-15);
        }
        // constants are in the kernel
        let ones = vec![1i64; m.n_vertices()];
        assert!(g.mul_vec(&ones).iter().all(|&v| v == 0));
    }

    #[test]
    fn curl_of_gradient_vanishes_exactly() {
        let m = cube(2);
        let g = grad_op(&m);
        let c = curl_op(&m);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let q: Vec<i64> = (0..m.n_vertices()).map(|_| rng.gen_range(-1000..1000)).collect();
        let v = g.mul_vec(&q);
        assert!(c.mul_vec(&v).iter().all(|&x| x == 0));
    }

    #[test]
    fn div_of_curl_vanishes_exactly() {
        let m = cube(2);
        let c = curl_op(&m);
        let d = div_op(&m);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let v: Vec<i64> = (0..m.n_edges()).map(|_| rng.gen_range(-1000..1000)).collect();
        assert!(d.mul_vec(&c.mul_vec(&v)).iter().all(|&x| x == 0));
    }

    #[test]
    fn unit_circulation_on_square_face() {
        let m = cube(1);
        let c = curl_op(&m);
        // circulation around face 0 with unit moments along its loop
        let face = &m.faces()[0];
        let mut v = vec![0i64; m.n_edges()];
        for s in &face.edges {
            v[s.idx] = s.sign as i64;
        }
        let cv = c.mul_vec(&v);
        assert_eq!(cv[0], 4);
    }

    #[test]
    fn audit_passes_on_families() {
        for m in [cube(2), cube(3), generate_extruded(&regular_polygon(6, 1.0), 2, 1.0).unwrap()] {
            let audit = exact_sequence_audit(&m);
            assert!(audit.passed(), "{audit:?}");
            if let Some(r) = audit.rank_grad {
                assert_eq!(r, m.n_vertices() - 1);
            }
        }
    }

    #[test]
    fn random_field_matches_signed_sums() {
        let m = cube(2);
        let d = div_op(&m);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let psi: Vec<i64> = (0..m.n_faces()).map(|_| rng.gen_range(-50..50)).collect();
        let dv = d.mul_vec(&psi);
        for (ci, cell) in m.cells().iter().enumerate() {
            let expect: i64 = cell.faces.iter().map(|s| s.sign as i64 * psi[s.idx]).sum();
            assert_eq!(dv[ci], expect);
        }
    }
}
