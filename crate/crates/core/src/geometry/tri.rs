//! Triangle/triangle primitives: crossing points, coplanar overlap and closest points.

use crate::{Point3, Vec3};

/// Relative slack used for inclusive barycentric and coplanarity tests.
const REL_EPS: f64 = 1e-12;

/// Sample points for one triangle pair, or `None` when the pair is farther apart
/// than `tolerance`.
///
/// Crossing pairs yield the endpoints and midpoint of the intersection segment;
/// coplanar overlaps yield the overlap polygon corners and their centroid;
/// pairs within `tolerance` that do not cross yield the midpoint of their
/// closest points.
pub fn triangle_pair_points(a: &[Point3; 3], b: &[Point3; 3], tolerance: f64) -> Option<Vec<Point3>> {
    if coplanar(a, b) {
        let overlap = coplanar_overlap(a, b);
        if !overlap.is_empty() {
            return Some(with_centroid(overlap));
        }
    } else {
        let crossings = crossing_points(a, b);
        if !crossings.is_empty() {
            return Some(segment_samples(&crossings));
        }
    }
    let (pa, pb) = closest_points(a, b);
    let d = (pa - pb).norm();
    (d <= tolerance).then(|| vec![nalgebra::center(&pa, &pb)])
}

fn scale(a: &[Point3; 3], b: &[Point3; 3]) -> f64 {
    a.iter()
        .chain(b.iter())
        .flat_map(|p| p.coords.iter().map(|c| c.abs()))
        .fold(1e-300, f64::max)
}

fn normal(t: &[Point3; 3]) -> Vec3 {
    (t[1] - t[0]).cross(&(t[2] - t[0]))
}

fn coplanar(a: &[Point3; 3], b: &[Point3; 3]) -> bool {
    let eps = REL_EPS * scale(a, b);
    let on_plane = |t: &[Point3; 3], others: &[Point3; 3]| {
        let n = normal(t);
        let len = n.norm();
        len > 0.0 && others.iter().all(|p| (n.dot(&(p - t[0])) / len).abs() <= eps)
    };
    on_plane(a, b) && on_plane(b, a)
}

/// Points where an edge of one triangle passes through the other.
fn crossing_points(a: &[Point3; 3], b: &[Point3; 3]) -> Vec<Point3> {
    let mut out = Vec::new();
    for (tri, other) in [(a, b), (b, a)] {
        for k in 0..3 {
            if let Some(p) = segment_triangle(&tri[k], &tri[(k + 1) % 3], other) {
                out.push(p);
            }
        }
    }
    out
}

/// Möller–Trumbore with inclusive bounds on the segment `p`–`q`.
fn segment_triangle(p: &Point3, q: &Point3, t: &[Point3; 3]) -> Option<Point3> {
    let e1 = t[1] - t[0];
    let e2 = t[2] - t[0];
    let d = q - p;
    let h = d.cross(&e2);
    let det = e1.dot(&h);
    if det.abs() <= REL_EPS * e1.norm() * e2.norm() * d.norm() {
        return None;
    }
    let inv = 1.0 / det;
    let s = p - t[0];
    let u = inv * s.dot(&h);
    if !(-REL_EPS..=1.0 + REL_EPS).contains(&u) {
        return None;
    }
    let qv = s.cross(&e1);
    let v = inv * d.dot(&qv);
    if v < -REL_EPS || u + v > 1.0 + REL_EPS {
        return None;
    }
    let along = inv * e2.dot(&qv);
    if !(-REL_EPS..=1.0 + REL_EPS).contains(&along) {
        return None;
    }
    Some(p + d * along.clamp(0.0, 1.0))
}

/// Endpoints of the longest chord through `points` plus its midpoint.
fn segment_samples(points: &[Point3]) -> Vec<Point3> {
    let mut best = (0.0, 0, 0);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (points[i] - points[j]).norm_squared();
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    let (p, q) = (points[best.1], points[best.2]);
    if best.0 == 0.0 {
        vec![p]
    } else {
        vec![p, q, nalgebra::center(&p, &q)]
    }
}

fn with_centroid(mut polygon: Vec<Point3>) -> Vec<Point3> {
    polygon.dedup_by(|x, y| x == y);
    if polygon.len() > 1 && polygon.first() == polygon.last() {
        polygon.pop();
    }
    if polygon.len() > 1 {
        let sum = polygon.iter().fold(Vec3::zeros(), |acc, p| acc + p.coords);
        polygon.push(Point3::from(sum / polygon.len() as f64));
    }
    polygon
}

/// Clips `a` against the edge half-planes of `b`; both triangles share a plane.
fn coplanar_overlap(a: &[Point3; 3], b: &[Point3; 3]) -> Vec<Point3> {
    let n = normal(b);
    let mut poly: Vec<Point3> = a.to_vec();
    for k in 0..3 {
        let p0 = b[k];
        let p1 = b[(k + 1) % 3];
        let mut inward = n.cross(&(p1 - p0));
        if inward.dot(&(b[(k + 2) % 3] - p0)) < 0.0 {
            inward = -inward;
        }
        let inward = inward.normalize();
        let eps = REL_EPS * scale(a, b);
        let side = |p: &Point3| inward.dot(&(p - p0));
        let mut next = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let cur = poly[i];
            let prev = poly[(i + poly.len() - 1) % poly.len()];
            let (sc, sp) = (side(&cur), side(&prev));
            let cur_in = sc >= -eps;
            let prev_in = sp >= -eps;
            if cur_in != prev_in {
                let t = sp / (sp - sc);
                next.push(prev + (cur - prev) * t);
            }
            if cur_in {
                next.push(cur);
            }
        }
        poly = next;
        if poly.is_empty() {
            break;
        }
    }
    poly
}

/// Closest point pair between two triangles that do not cross.
pub fn closest_points(a: &[Point3; 3], b: &[Point3; 3]) -> (Point3, Point3) {
    let mut best = (f64::INFINITY, a[0], b[0]);
    let mut consider = |pa: Point3, pb: Point3| {
        let d = (pa - pb).norm_squared();
        if d < best.0 {
            best = (d, pa, pb);
        }
    };
    for p in a {
        consider(*p, closest_point_on_triangle(p, b));
    }
    for p in b {
        consider(closest_point_on_triangle(p, a), *p);
    }
    for i in 0..3 {
        for j in 0..3 {
            let (pa, pb) = closest_segment_points(&a[i], &a[(i + 1) % 3], &b[j], &b[(j + 1) % 3]);
            consider(pa, pb);
        }
    }
    (best.1, best.2)
}

/// Closest point on triangle `t` to `p` (Voronoi-region walk).
pub fn closest_point_on_triangle(p: &Point3, t: &[Point3; 3]) -> Point3 {
    let (a, b, c) = (t[0], t[1], t[2]);
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

/// Closest points between segments `p1`–`q1` and `p2`–`q2`.
pub fn closest_segment_points(p1: &Point3, q1: &Point3, p2: &Point3, q2: &Point3) -> (Point3, Point3) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= f64::EPSILON * f64::EPSILON && e <= f64::EPSILON * f64::EPSILON {
        return (*p1, *p2);
    }
    if a <= f64::EPSILON * f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::EPSILON * f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    (p1 + d1 * s, p2 + d2 * t)
}
