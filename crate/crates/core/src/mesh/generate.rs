//! Mesh generators: structured and perturbed hexahedral boxes, and prisms
//! extruded from 2D polygonal meshes.

use super::{MeshBuilder, MeshError, PolyMesh};
use crate::V3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Axis-aligned box given as [lo, hi].
pub type Box3 = [V3; 2];

/// n^3 axis-aligned hexahedra over the box.
pub fn generate_structured_hex(n: usize, domain: Box3) -> Result<PolyMesh, MeshError> {
    if n < 1 {
        return Err(MeshError::Topology("subdivision count must be >= 1".into()));
    }
    generate_perturbed_hex(n, domain, 0.0, 0)
}

/// Distorted hexahedral mesh with exactly planar faces.
///
/// Distortion has two parts, both bounded by `amplitude * h` per vertex and
/// deterministic in `seed`: random per-axis plane spacings, and a random
/// tilt of each interior x-plane (an affine-in-(y,z) shear). Only one plane
/// family can carry an independent tilt if all faces are to stay planar,
/// so the y/z grid planes stay axis-aligned while every cell still becomes
/// a general oblique hexahedron. The box boundary is preserved exactly.
pub fn generate_perturbed_hex(
    n: usize,
    domain: Box3,
    amplitude: f64,
    seed: u64,
) -> Result<PolyMesh, MeshError> {
    if n < 1 {
        return Err(MeshError::Topology("subdivision count must be >= 1".into()));
    }
    if !(0.0..=0.3).contains(&amplitude) {
        return Err(MeshError::PerturbationRejected(format!(
            "amplitude {amplitude} outside [0, 0.3]"
        )));
    }
    let [lo, hi] = domain;
    let len = hi - lo;
    if !(len.x > 0.0 && len.y > 0.0 && len.z > 0.0) {
        return Err(MeshError::Topology("domain box is degenerate".into()));
    }
    let h = [len.x / n as f64, len.y / n as f64, len.z / n as f64];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // interior plane positions, jittered by at most amplitude*h/2
    let mut axis = |k: usize| -> Vec<f64> {
        (0..=n)
            .map(|i| {
                let base = lo[k] + i as f64 * h[k];
                if i == 0 || i == n {
                    base
                } else {
                    base + amplitude * h[k] * 0.5 * rng.gen_range(-1.0..1.0)
                }
            })
            .collect()
    };
    let xs = axis(0);
    let ys = axis(1);
    let zs = axis(2);

    // tilt coefficients of interior x-planes, zero on the boundary planes
    let tilt: Vec<[f64; 2]> = (0..=n)
        .map(|i| {
            if i == 0 || i == n || amplitude == 0.0 {
                [0.0, 0.0]
            } else {
                [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
            }
        })
        .collect();
    let cy = 0.5 * (lo.y + hi.y);
    let cz = 0.5 * (lo.z + hi.z);
    let tilt_scale = 0.25 * amplitude * h[0];

    let vid = |i: usize, j: usize, k: usize| i + (n + 1) * (j + (n + 1) * k);
    let mut vertices = Vec::with_capacity((n + 1).pow(3));
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                let x = xs[i]
                    + tilt_scale
                        * (tilt[i][0] * (ys[j] - cy) / (0.5 * len.y)
                            + tilt[i][1] * (zs[k] - cz) / (0.5 * len.z));
                vertices.push(V3::new(x, ys[j], zs[k]));
            }
        }
    }

    let mut b = MeshBuilder::new(vertices);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let faces = vec![
                    vec![vid(i, j, k), vid(i, j, k + 1), vid(i, j + 1, k + 1), vid(i, j + 1, k)],
                    vec![
                        vid(i + 1, j, k),
                        vid(i + 1, j + 1, k),
                        vid(i + 1, j + 1, k + 1),
                        vid(i + 1, j, k + 1),
                    ],
                    vec![vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j, k + 1), vid(i, j, k + 1)],
                    vec![
                        vid(i, j + 1, k),
                        vid(i, j + 1, k + 1),
                        vid(i + 1, j + 1, k + 1),
                        vid(i + 1, j + 1, k),
                    ],
                    vec![vid(i, j, k), vid(i, j + 1, k), vid(i + 1, j + 1, k), vid(i + 1, j, k)],
                    vec![
                        vid(i, j, k + 1),
                        vid(i + 1, j, k + 1),
                        vid(i + 1, j + 1, k + 1),
                        vid(i, j + 1, k + 1),
                    ],
                ];
                b.add_cell(faces, 0);
            }
        }
    }
    b.build()
}

/// Planar polygonal mesh used as an extrusion cross-section. Polygons are
/// counterclockwise vertex loops.
#[derive(Clone, Debug)]
pub struct Polygon2D {
    pub vertices: Vec<[f64; 2]>,
    pub polygons: Vec<Vec<usize>>,
    pub subdomains: Vec<u32>,
}

impl Polygon2D {
    pub fn validate(&self) -> Result<(), MeshError> {
        if self.subdomains.len() != self.polygons.len() {
            return Err(MeshError::InvalidPolygon2D(
                "subdomain list does not match polygon count".into(),
            ));
        }
        for (pi, poly) in self.polygons.iter().enumerate() {
            if poly.len() < 3 {
                return Err(MeshError::InvalidPolygon2D(format!(
                    "polygon {pi} has fewer than 3 vertices"
                )));
            }
            if poly.iter().any(|&v| v >= self.vertices.len()) {
                return Err(MeshError::InvalidPolygon2D(format!(
                    "polygon {pi} references a missing vertex"
                )));
            }
            let area = signed_area(&self.vertices, poly);
            if area <= 0.0 {
                return Err(MeshError::InvalidPolygon2D(format!(
                    "polygon {pi} is not counterclockwise (signed area {area})"
                )));
            }
        }
        Ok(())
    }
}

fn signed_area(vertices: &[[f64; 2]], poly: &[usize]) -> f64 {
    let m = poly.len();
    let mut a = 0.0;
    for k in 0..m {
        let p = vertices[poly[k]];
        let q = vertices[poly[(k + 1) % m]];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

/// Extrude a 2D polygonal mesh into `layers` uniform prism layers of total
/// `height`, starting at z = 0.
pub fn generate_extruded(
    p2d: &Polygon2D,
    layers: usize,
    height: f64,
) -> Result<PolyMesh, MeshError> {
    if layers < 1 || height <= 0.0 {
        return Err(MeshError::InvalidPolygon2D("need layers >= 1 and height > 0".into()));
    }
    let breaks: Vec<f64> = (0..=layers).map(|l| height * l as f64 / layers as f64).collect();
    generate_extruded_graded(p2d, &breaks, |s, _, _| s)
}

/// Extrude with explicit layer breaks; `subdomain_of(polygon_subdomain,
/// z_lo, z_hi)` tags each prism.
pub fn generate_extruded_graded(
    p2d: &Polygon2D,
    z_breaks: &[f64],
    subdomain_of: impl Fn(u32, f64, f64) -> u32,
) -> Result<PolyMesh, MeshError> {
    p2d.validate()?;
    if z_breaks.len() < 2 || z_breaks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(MeshError::InvalidPolygon2D("layer breaks must be increasing".into()));
    }
    let n2 = p2d.vertices.len();
    let layers = z_breaks.len() - 1;
    let mut vertices = Vec::with_capacity(n2 * (layers + 1));
    for &z in z_breaks {
        for v in &p2d.vertices {
            vertices.push(V3::new(v[0], v[1], z));
        }
    }
    let vid = |v: usize, l: usize| v + l * n2;
    let mut b = MeshBuilder::new(vertices);
    for l in 0..layers {
        for (pi, poly) in p2d.polygons.iter().enumerate() {
            let m = poly.len();
            let mut faces = Vec::with_capacity(m + 2);
            // bottom: reversed so the normal points to -z
            faces.push(poly.iter().rev().map(|&v| vid(v, l)).collect());
            faces.push(poly.iter().map(|&v| vid(v, l + 1)).collect());
            for k in 0..m {
                let a = poly[k];
                let c = poly[(k + 1) % m];
                faces.push(vec![vid(a, l), vid(c, l), vid(c, l + 1), vid(a, l + 1)]);
            }
            b.add_cell(faces, subdomain_of(p2d.subdomains[pi], z_breaks[l], z_breaks[l + 1]));
        }
    }
    b.build()
}

/// Regular polygon cross-section (single cell), for small test meshes.
pub fn regular_polygon(n_sides: usize, radius: f64) -> Polygon2D {
    let vertices = (0..n_sides)
        .map(|s| {
            let t = 2.0 * std::f64::consts::PI * s as f64 / n_sides as f64;
            [radius * t.cos(), radius * t.sin()]
        })
        .collect();
    Polygon2D { vertices, polygons: vec![(0..n_sides).collect()], subdomains: vec![0] }
}

/// Concentric disk mesh: an inner `n_theta`-gon plus rings of quads, one
/// ring per gap between consecutive circles. `gap_subdomain[g]` tags the
/// cells between circle g-1 and circle g (gap 0 is the inner disk).
pub fn disk_mesh(
    circle_radii: &[f64],
    gap_subdomain: &[u32],
    n_theta: usize,
) -> Result<Polygon2D, MeshError> {
    if circle_radii.is_empty()
        || gap_subdomain.len() != circle_radii.len()
        || n_theta < 3
        || circle_radii.windows(2).any(|w| w[1] <= w[0])
        || circle_radii[0] <= 0.0
    {
        return Err(MeshError::InvalidPolygon2D("bad disk mesh parameters".into()));
    }
    let nc = circle_radii.len();
    let mut vertices = Vec::with_capacity(nc * n_theta);
    for &r in circle_radii {
        for s in 0..n_theta {
            let t = 2.0 * std::f64::consts::PI * s as f64 / n_theta as f64;
            vertices.push([r * t.cos(), r * t.sin()]);
        }
    }
    let vid = |c: usize, s: usize| c * n_theta + s % n_theta;
    let mut polygons = Vec::new();
    let mut subdomains = Vec::new();
    polygons.push((0..n_theta).map(|s| vid(0, s)).collect::<Vec<_>>());
    subdomains.push(gap_subdomain[0]);
    for c in 1..nc {
        for s in 0..n_theta {
            polygons.push(vec![vid(c - 1, s), vid(c, s), vid(c, s + 1), vid(c - 1, s + 1)]);
            subdomains.push(gap_subdomain[c]);
        }
    }
    Ok(Polygon2D { vertices, polygons, subdomains })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::validate;

    fn unit_box() -> Box3 {
        [V3::zeros(), V3::new(1.0, 1.0, 1.0)]
    }

    #[test]
    fn zero_amplitude_is_structured() {
        let a = generate_structured_hex(3, unit_box()).unwrap();
        let b = generate_perturbed_hex(3, unit_box(), 0.0, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn perturbed_is_deterministic_and_valid() {
        let a = generate_perturbed_hex(4, unit_box(), 0.2, 7).unwrap();
        let b = generate_perturbed_hex(4, unit_box(), 0.2, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_perturbed_hex(4, unit_box(), 0.2, 8).unwrap();
        assert_ne!(a, c);
        let report = validate(&a);
        assert!(report.is_valid(), "violations: {:?}", report.violations);
        let vol: f64 = a.geometry().cell.iter().map(|g| g.volume).sum();
        assert!((vol - 1.0).abs() < 1e-12);
    }

    #[test]
    fn amplitude_out_of_range_rejected() {
        assert!(matches!(
            generate_perturbed_hex(2, unit_box(), 0.5, 0),
            Err(MeshError::PerturbationRejected(_))
        ));
    }

    #[test]
    fn extruded_unit_square_is_one_hex() {
        let p2d = Polygon2D {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            polygons: vec![vec![0, 1, 2, 3]],
            subdomains: vec![0],
        };
        let m = generate_extruded(&p2d, 1, 1.0).unwrap();
        assert_eq!(m.n_cells(), 1);
        assert_eq!(m.n_vertices(), 8);
        assert_eq!(m.n_faces(), 6);
        assert!((m.geometry().cell[0].volume - 1.0).abs() < 1e-14);
    }

    #[test]
    fn extruded_hexagon_euler_and_validity() {
        let m = generate_extruded(&regular_polygon(6, 1.0), 2, 1.0).unwrap();
        assert_eq!(m.n_cells(), 2);
        for c in 0..m.n_cells() {
            let nv = m.cell_vertices(c).len() as i64;
            let ne = m.cell_edges(c).len() as i64;
            let nf = m.cells()[c].faces.len() as i64;
            assert_eq!(ne - (nv - 1), nf - 1);
        }
        assert!(validate(&m).is_valid());
    }

    #[test]
    fn disk_mesh_extrudes_cleanly() {
        let p2d = disk_mesh(&[0.25, 0.5, 1.0, 1.25], &[0, 0, 1, 2], 8).unwrap();
        p2d.validate().unwrap();
        let m = generate_extruded(&p2d, 2, 1.0).unwrap();
        assert!(validate(&m).is_valid());
        let vol: f64 = m.geometry().cell.iter().map(|g| g.volume).sum();
        // polygonal approximation of the disk of radius 1.25: below pi r^2
        assert!(vol > 0.0 && vol < std::f64::consts::PI * 1.25 * 1.25);
        let s2: f64 = m
            .cells()
            .iter()
            .zip(&m.geometry().cell)
            .filter(|(c, _)| c.subdomain == 2)
            .map(|(_, g)| g.volume)
            .sum();
        assert!(s2 > 0.0);
    }
}
