//! Exact integration of polynomials over edges, polygonal faces, and
//! polyhedral cells, plus the sampling rules used for smooth integrands.
//!
//! Everything is built from Gauss rules generated at run time by
//! Golub-Welsch (symmetric tridiagonal eigenproblem), so every rule is
//! testable against closed-form monomial integrals instead of trusting a
//! transcribed point table. Face integrals fan-triangulate from the vertex
//! average with signed triangle areas; cell integrals of monomials are
//! reduced to face integrals by the divergence theorem, which stays exact
//! on non-convex cells as long as faces are planar.

use crate::V3;
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Monomial exponents of degree <= 2 in three variables, fixed order.
pub const MONO3: [[usize; 3]; 10] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [2, 0, 0],
    [1, 1, 0],
    [1, 0, 1],
    [0, 2, 0],
    [0, 1, 1],
    [0, 0, 2],
];

/// Monomial exponents of degree <= 2 in two variables, fixed order.
pub const MONO2: [[usize; 2]; 6] = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];

/// Evaluate the `i`-th centered-scaled 3D monomial at `x`.
pub fn mono3_eval(i: usize, x: &V3, center: &V3, h: f64) -> f64 {
    let s = (x - center) / h;
    let [a, b, c] = MONO3[i];
    s.x.powi(a as i32) * s.y.powi(b as i32) * s.z.powi(c as i32)
}

/// One-dimensional rule on [0, 1]; weights include any Jacobi factor.
#[derive(Clone, Debug)]
pub struct SegmentRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Rule on the reference triangle {u, v >= 0, u + v <= 1}; weights sum to 1/2.
#[derive(Clone, Debug)]
pub struct TriRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

/// Rule on the reference tetrahedron; weights sum to 1/6.
#[derive(Clone, Debug)]
pub struct TetRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// Gauss nodes/weights on [-1, 1] for the weight (1-x)^alpha, monic Jacobi
/// recurrence + Golub-Welsch.
fn gauss_jacobi_sym(n: usize, alpha: u32) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let af = alpha as f64;
    let diag = |k: usize| -> f64 {
        let kf = k as f64;
        if k == 0 && alpha == 0 {
            0.0
        } else {
            -af * af / ((2.0 * kf + af) * (2.0 * kf + af + 2.0))
        }
    };
    let offdiag = |k: usize| -> f64 {
        // b_k for k >= 1
        let kf = k as f64;
        4.0 * kf * kf * (kf + af) * (kf + af)
            / ((2.0 * kf + af).powi(2) * (2.0 * kf + af + 1.0) * (2.0 * kf + af - 1.0))
    };
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jm[(k, k)] = diag(k);
        if k + 1 < n {
            let b = offdiag(k + 1).sqrt();
            jm[(k, k + 1)] = b;
            jm[(k + 1, k)] = b;
        }
    }
    let eig = jm.symmetric_eigen();
    let mu0 = 2f64.powi(alpha as i32 + 1) / (af + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    (
        pairs.iter().map(|p| p.0).collect(),
        pairs.iter().map(|p| p.1).collect(),
    )
}

/// Gauss rule on [0, 1] for the weight (1-t)^alpha; exact for polynomial
/// degree 2n-1.
pub fn gauss_jacobi_01(n: usize, alpha: u32) -> SegmentRule {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<SegmentRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let rule = {
        let mut guard = cache.lock().unwrap();
        guard
            .entry((n, alpha))
            .or_insert_with(|| {
                let (x, w) = gauss_jacobi_sym(n, alpha);
                let scale = 2f64.powi(alpha as i32 + 1);
                Arc::new(SegmentRule {
                    nodes: x.iter().map(|&xi| 0.5 * (xi + 1.0)).collect(),
                    weights: w.iter().map(|&wi| wi / scale).collect(),
                })
            })
            .clone()
    };
    (*rule).clone()
}

/// Plain Gauss-Legendre on [0, 1]; exact for degree 2n-1.
pub fn gauss_legendre_01(n: usize) -> SegmentRule {
    gauss_jacobi_01(n, 0)
}

fn points_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

/// Conical-product triangle rule exact for total degree `degree`.
pub fn triangle_rule(degree: usize) -> TriRule {
    let n = points_for_degree(degree);
    let r1 = gauss_jacobi_01(n, 1);
    let r0 = gauss_legendre_01(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (x1, w1) in r1.nodes.iter().zip(&r1.weights) {
        for (x2, w2) in r0.nodes.iter().zip(&r0.weights) {
            points.push([*x1, x2 * (1.0 - x1)]);
            weights.push(w1 * w2);
        }
    }
    TriRule { points, weights }
}

/// Conical-product tetrahedron rule exact for total degree `degree`.
pub fn tet_rule(degree: usize) -> TetRule {
    let n = points_for_degree(degree);
    let r2 = gauss_jacobi_01(n, 2);
    let r1 = gauss_jacobi_01(n, 1);
    let r0 = gauss_legendre_01(n);
    let mut points = Vec::with_capacity(n * n * n);
    let mut weights = Vec::with_capacity(n * n * n);
    for (x1, w1) in r2.nodes.iter().zip(&r2.weights) {
        for (x2, w2) in r1.nodes.iter().zip(&r1.weights) {
            for (x3, w3) in r0.nodes.iter().zip(&r0.weights) {
                points.push([*x1, x2 * (1.0 - x1), x3 * (1.0 - x1) * (1.0 - x2)]);
                weights.push(w1 * w2 * w3);
            }
        }
    }
    TetRule { points, weights }
}

/// Integrate `g` along the segment from `a` to `b`, rule exact for the
/// given polynomial degree.
pub fn integrate_segment(a: &V3, b: &V3, degree: usize, mut g: impl FnMut(&V3) -> f64) -> f64 {
    let rule = gauss_legendre_01(points_for_degree(degree));
    let len = (b - a).norm();
    let mut acc = 0.0;
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let x = a + (b - a) * *t;
        acc += w * g(&x);
    }
    acc * len
}

/// Oriented planar polygon with precomputed geometry.
///
/// `loop_pts` is the vertex loop, counterclockwise as seen from the side
/// `normal` points to. Area and centroid come from the signed fan around
/// the vertex average, exact for planar polygons of any convexity.
#[derive(Clone, Debug)]
pub struct PolygonShape {
    pub loop_pts: Vec<V3>,
    pub normal: V3,
    pub area: f64,
    pub centroid: V3,
}

/// Newell normal of a closed loop (not normalized).
pub fn newell_normal(loop_pts: &[V3]) -> V3 {
    let mut n = V3::zeros();
    let m = loop_pts.len();
    for i in 0..m {
        let p = &loop_pts[i];
        let q = &loop_pts[(i + 1) % m];
        n.x += (p.y - q.y) * (p.z + q.z);
        n.y += (p.z - q.z) * (p.x + q.x);
        n.z += (p.x - q.x) * (p.y + q.y);
    }
    0.5 * n
}

impl PolygonShape {
    pub fn from_loop(loop_pts: Vec<V3>) -> Self {
        let m = loop_pts.len();
        assert!(m >= 3, "polygon needs at least 3 vertices");
        let normal = newell_normal(&loop_pts);
        let nn = normal.norm();
        let unit_n = if nn > 0.0 { normal / nn } else { V3::z() };
        let avg: V3 = loop_pts.iter().sum::<V3>() / m as f64;
        let mut area = 0.0;
        let mut first_moment = V3::zeros();
        for i in 0..m {
            let a = loop_pts[i] - avg;
            let b = loop_pts[(i + 1) % m] - avg;
            let sa = 0.5 * a.cross(&b).dot(&unit_n);
            area += sa;
            let ctri = (loop_pts[i] + loop_pts[(i + 1) % m] + avg) / 3.0;
            first_moment += sa * ctri;
        }
        let centroid = if area.abs() > 0.0 { first_moment / area } else { avg };
        PolygonShape { loop_pts, normal: unit_n, area, centroid }
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.loop_pts.len() {
            for j in (i + 1)..self.loop_pts.len() {
                d = d.max((self.loop_pts[i] - self.loop_pts[j]).norm());
            }
        }
        d
    }

    /// Max vertex distance to the plane through the centroid with the
    /// Newell normal, i.e. the planarity residual.
    pub fn planarity_residual(&self) -> f64 {
        self.loop_pts
            .iter()
            .map(|p| (p - self.centroid).dot(&self.normal).abs())
            .fold(0.0, f64::max)
    }

    /// Integrate `g` over the polygon; exact for polynomials of the given
    /// degree restricted to the face plane.
    pub fn integrate(&self, degree: usize, mut g: impl FnMut(&V3) -> f64) -> f64 {
        let rule = triangle_rule(degree);
        let m = self.loop_pts.len();
        let avg: V3 = self.loop_pts.iter().sum::<V3>() / m as f64;
        let mut acc = 0.0;
        for i in 0..m {
            let p = self.loop_pts[i];
            let q = self.loop_pts[(i + 1) % m];
            let signed2 = (p - avg).cross(&(q - avg)).dot(&self.normal);
            if signed2 == 0.0 {
                continue;
            }
            for (uv, w) in rule.points.iter().zip(&rule.weights) {
                let x = avg + (p - avg) * uv[0] + (q - avg) * uv[1];
                acc += signed2 * w * g(&x);
            }
        }
        acc
    }

    /// Same but with `levels` of uniform triangle subdivision, for smooth
    /// non-polynomial integrands that need extra accuracy.
    pub fn integrate_refined(
        &self,
        degree: usize,
        levels: usize,
        mut g: impl FnMut(&V3) -> f64,
    ) -> f64 {
        let rule = triangle_rule(degree);
        let m = self.loop_pts.len();
        let avg: V3 = self.loop_pts.iter().sum::<V3>() / m as f64;
        let mut acc = 0.0;
        for i in 0..m {
            let p = self.loop_pts[i];
            let q = self.loop_pts[(i + 1) % m];
            let mut tris = vec![[avg, p, q]];
            for _ in 0..levels {
                let mut next = Vec::with_capacity(tris.len() * 4);
                for t in &tris {
                    let ab = 0.5 * (t[0] + t[1]);
                    let bc = 0.5 * (t[1] + t[2]);
                    let ca = 0.5 * (t[2] + t[0]);
                    next.push([t[0], ab, ca]);
                    next.push([ab, t[1], bc]);
                    next.push([ca, bc, t[2]]);
                    next.push([ab, bc, ca]);
                }
                tris = next;
            }
            for t in &tris {
                let signed2 = (t[1] - t[0]).cross(&(t[2] - t[0])).dot(&self.normal);
                for (uv, w) in rule.points.iter().zip(&rule.weights) {
                    let x = t[0] + (t[1] - t[0]) * uv[0] + (t[2] - t[0]) * uv[1];
                    acc += signed2 * w * g(&x);
                }
            }
        }
        acc
    }
}

/// Geometric view of one cell: outward-oriented faces plus bulk quantities.
#[derive(Clone, Debug)]
pub struct CellShape {
    pub faces: Vec<PolygonShape>,
    pub volume: f64,
    pub barycenter: V3,
    pub diameter: f64,
}

impl CellShape {
    /// Build from outward-oriented face loops. Volume and barycenter come
    /// from the divergence theorem, so only face planarity is assumed.
    pub fn from_faces(faces: Vec<PolygonShape>) -> Self {
        let volume: f64 = faces
            .iter()
            .map(|f| f.area * f.normal.dot(&f.centroid) / 3.0)
            .sum();
        let mut first = V3::zeros();
        for f in &faces {
            // int_P x_i dP = 1/2 sum_f n_i int_f x_i^2
            for k in 0..3 {
                let v = f.integrate(2, |x| x[k] * x[k]);
                first[k] += 0.5 * f.normal[k] * v;
            }
        }
        let barycenter = first / volume;
        let mut diameter: f64 = 0.0;
        let pts: Vec<&V3> = faces.iter().flat_map(|f| f.loop_pts.iter()).collect();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                diameter = diameter.max((pts[i] - pts[j]).norm());
            }
        }
        CellShape { faces, volume, barycenter, diameter }
    }

    /// Moments of the centered-scaled monomials of degree <= 2 over the
    /// cell, via divergence-theorem reduction to face integrals.
    pub fn monomial_moments(&self, h: f64) -> [f64; 10] {
        let b = self.barycenter;
        let mut m = [0.0f64; 10];
        for (i, [a, bb, c]) in MONO3.iter().enumerate() {
            let mut acc = 0.0;
            for f in &self.faces {
                let nf = f.normal.x;
                if nf != 0.0 {
                    acc += nf
                        * f.integrate(a + bb + c + 1, |x| {
                            let s = (x - b) / h;
                            h * s.x.powi(*a as i32 + 1) / (*a as f64 + 1.0)
                                * s.y.powi(*bb as i32)
                                * s.z.powi(*c as i32)
                        });
                }
            }
            m[i] = acc;
        }
        m
    }

    /// Integrate a smooth `g` over the cell by fanning every face into
    /// triangles and coning them to the barycenter (signed volumes).
    pub fn integrate(&self, degree: usize, mut g: impl FnMut(&V3) -> f64) -> f64 {
        let rule = tet_rule(degree);
        let b = self.barycenter;
        let mut acc = 0.0;
        for f in &self.faces {
            let m = f.loop_pts.len();
            let avg: V3 = f.loop_pts.iter().sum::<V3>() / m as f64;
            for i in 0..m {
                let p = f.loop_pts[i];
                let q = f.loop_pts[(i + 1) % m];
                // signed volume factor of tet (b, avg, p, q) times 6
                let e0 = avg - b;
                let e1 = p - b;
                let e2 = q - b;
                let signed6 = e0.dot(&e1.cross(&e2));
                if signed6 == 0.0 {
                    continue;
                }
                for (uvw, w) in rule.points.iter().zip(&rule.weights) {
                    let x = b + e0 * uvw[0] + e1 * uvw[1] + e2 * uvw[2];
                    acc += signed6 * w * g(&x);
                }
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fact(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product::<f64>().max(1.0)
    }

    #[test]
    fn gauss_legendre_monomials() {
        for n in 1..=6 {
            let r = gauss_legendre_01(n);
            for d in 0..=(2 * n - 1) {
                let num: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(x, w)| w * x.powi(d as i32))
                    .sum();
                assert_relative_eq!(num, 1.0 / (d as f64 + 1.0), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn gauss_jacobi_monomials() {
        // int_0^1 (1-t)^alpha t^d dt = d! alpha! / (d + alpha + 1)!
        for alpha in 1..=2u32 {
            for n in 1..=5 {
                let r = gauss_jacobi_01(n, alpha);
                for d in 0..=(2 * n - 1) {
                    let num: f64 = r
                        .nodes
                        .iter()
                        .zip(&r.weights)
                        .map(|(x, w)| w * x.powi(d as i32))
                        .sum();
                    let exact = fact(d) * fact(alpha as usize) / fact(d + alpha as usize + 1);
                    assert_relative_eq!(num, exact, max_relative = 1e-13);
                }
            }
        }
    }

    #[test]
    fn triangle_rule_monomials() {
        // int_T u^a v^b = a! b! / (a+b+2)!
        for deg in 1..=7 {
            let r = triangle_rule(deg);
            for a in 0..=deg {
                for b in 0..=(deg - a) {
                    let num: f64 = r
                        .points
                        .iter()
                        .zip(&r.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = fact(a) * fact(b) / fact(a + b + 2);
                    assert_relative_eq!(num, exact, epsilon = 1e-15, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn tet_rule_monomials() {
        for deg in 1..=7 {
            let r = tet_rule(deg);
            for a in 0..=deg {
                for b in 0..=(deg - a) {
                    for c in 0..=(deg - a - b) {
                        let num: f64 = r
                            .points
                            .iter()
                            .zip(&r.weights)
                            .map(|(p, w)| {
                                w * p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32)
                            })
                            .sum();
                        let exact = fact(a) * fact(b) * fact(c) / fact(a + b + c + 3);
                        assert_relative_eq!(num, exact, epsilon = 1e-15, max_relative = 1e-12);
                    }
                }
            }
        }
    }

    fn unit_square_at_origin() -> PolygonShape {
        PolygonShape::from_loop(vec![
            V3::new(-0.5, -0.5, 0.0),
            V3::new(0.5, -0.5, 0.0),
            V3::new(0.5, 0.5, 0.0),
            V3::new(-0.5, 0.5, 0.0),
        ])
    }

    #[test]
    fn face_constant_and_centered_moment() {
        let f = unit_square_at_origin();
        assert_relative_eq!(f.area, 1.0, max_relative = 1e-14);
        assert_relative_eq!(f.integrate(0, |_| 1.0), 1.0, max_relative = 1e-14);
        // centered first moment vanishes
        let bf = f.centroid;
        for k in 0..3 {
            let v = f.integrate(1, |x| x[k] - bf[k]);
            assert!(v.abs() < 1e-14);
        }
        // int x^2 over unit square centered at origin = 1/12
        assert_relative_eq!(f.integrate(2, |x| x.x * x.x), 1.0 / 12.0, max_relative = 1e-13);
    }

    #[test]
    fn nonconvex_polygon_area() {
        // L-shaped hexagon: area 3/4
        let f = PolygonShape::from_loop(vec![
            V3::new(0.0, 0.0, 1.0),
            V3::new(1.0, 0.0, 1.0),
            V3::new(1.0, 0.5, 1.0),
            V3::new(0.5, 0.5, 1.0),
            V3::new(0.5, 1.0, 1.0),
            V3::new(0.0, 1.0, 1.0),
        ]);
        assert_relative_eq!(f.area, 0.75, max_relative = 1e-14);
        assert_relative_eq!(f.integrate(1, |x| x.x), 0.75 * f.centroid.x, max_relative = 1e-13);
    }

    fn unit_cube_shape(center: V3) -> CellShape {
        let c = center;
        let v = |i: f64, j: f64, k: f64| c + V3::new(i - 0.5, j - 0.5, k - 0.5);
        let faces = vec![
            // outward loops of the unit cube
            vec![v(0., 0., 0.), v(0., 0., 1.), v(0., 1., 1.), v(0., 1., 0.)],
            vec![v(1., 0., 0.), v(1., 1., 0.), v(1., 1., 1.), v(1., 0., 1.)],
            vec![v(0., 0., 0.), v(1., 0., 0.), v(1., 0., 1.), v(0., 0., 1.)],
            vec![v(0., 1., 0.), v(0., 1., 1.), v(1., 1., 1.), v(1., 1., 0.)],
            vec![v(0., 0., 0.), v(0., 1., 0.), v(1., 1., 0.), v(1., 0., 0.)],
            vec![v(0., 0., 1.), v(1., 0., 1.), v(1., 1., 1.), v(0., 1., 1.)],
        ];
        CellShape::from_faces(faces.into_iter().map(PolygonShape::from_loop).collect())
    }

    #[test]
    fn cube_volume_and_moments() {
        let cell = unit_cube_shape(V3::new(0.3, -0.2, 0.7));
        assert_relative_eq!(cell.volume, 1.0, max_relative = 1e-13);
        assert_relative_eq!(cell.barycenter.x, 0.3, epsilon = 1e-13);
        let h = cell.diameter;
        let m = cell.monomial_moments(h);
        assert_relative_eq!(m[0], 1.0, max_relative = 1e-13);
        // centered first moments vanish
        for k in 1..4 {
            assert!(m[k].abs() < 1e-13);
        }
        // int x^2 over unit cube centered at barycenter = 1/12, scaled by h^2
        assert_relative_eq!(m[4], (1.0 / 12.0) / (h * h), max_relative = 1e-12);
    }

    #[test]
    fn cell_smooth_integration_matches_moments() {
        let cell = unit_cube_shape(V3::zeros());
        let v = cell.integrate(2, |x| x.x * x.x + x.y);
        assert_relative_eq!(v, 1.0 / 12.0, max_relative = 1e-12);
    }

    #[test]
    fn divergence_theorem_consistency() {
        // integrate_cell(div q) = sum_f int_f q . n for random degree-2 q
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let cell = unit_cube_shape(V3::new(0.1, 0.2, 0.3));
        for _ in 0..10 {
            let c: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
            // q_k(x) = sum_i c[10k+i] m_i(x) in global coordinates
            let q = |x: &V3, k: usize| -> f64 {
                MONO3
                    .iter()
                    .enumerate()
                    .map(|(i, [a, b, cc])| {
                        c[10 * k + i]
                            * x.x.powi(*a as i32)
                            * x.y.powi(*b as i32)
                            * x.z.powi(*cc as i32)
                    })
                    .sum()
            };
            let divq = |x: &V3| -> f64 {
                let mut d = 0.0;
                for (i, [a, b, cc]) in MONO3.iter().enumerate() {
                    if *a > 0 {
                        d += c[i] * *a as f64 * x.x.powi(*a as i32 - 1) * x.y.powi(*b as i32) * x.z.powi(*cc as i32);
                    }
                    if *b > 0 {
                        d += c[10 + i] * *b as f64 * x.x.powi(*a as i32) * x.y.powi(*b as i32 - 1) * x.z.powi(*cc as i32);
                    }
                    if *cc > 0 {
                        d += c[20 + i] * *cc as f64 * x.x.powi(*a as i32) * x.y.powi(*b as i32) * x.z.powi(*cc as i32 - 1);
                    }
                }
                d
            };
            let lhs = cell.integrate(2, |x| divq(x));
            let rhs: f64 = cell
                .faces
                .iter()
                .map(|f| {
                    f.integrate(2, |x| {
                        q(x, 0) * f.normal.x + q(x, 1) * f.normal.y + q(x, 2) * f.normal.z
                    })
                })
                .sum();
            assert_relative_eq!(lhs, rhs, epsilon = 1e-12, max_relative = 1e-12);
        }
    }
}
