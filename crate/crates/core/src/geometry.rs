//! Planar geometry shared by the map, planner and simulator.
//!
//! Everything lives on the ground plane in meters. Polygons are plain vertex
//! lists (implicitly closed); predicates treat the boundary as inside.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point2 {
    fn from(a: [f64; 2]) -> Self {
        Point2 { x: a[0], y: a[1] }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    /// Bearing of the vector in radians, CCW from +x.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn from_angle(theta: f64) -> Self {
        Point2::new(theta.cos(), theta.sin())
    }

    /// Left-hand normal (rotated +90°).
    pub fn perp(self) -> Self {
        Point2::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Point2, t: f64) -> Self {
        self + (o - self) * t
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

/// Wraps an angle to (−π, π].
pub fn wrap_pi(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Normalizes a yaw to [−π, π).
pub fn normalize_yaw(theta: f64) -> f64 {
    let t = wrap_pi(theta);
    if t >= PI {
        t - 2.0 * PI
    } else {
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point2,
    pub max: Point2,
}

impl Aabb {
    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Point2>) -> Option<Aabb> {
        let mut it = pts.into_iter();
        let first = *it.next()?;
        let mut bb = Aabb {
            min: first,
            max: first,
        };
        for p in it {
            bb.include(*p);
        }
        Some(bb)
    }

    pub fn include(&mut self, p: Point2) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        let mut bb = *self;
        bb.include(o.min);
        bb.include(o.max);
        bb
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Euclidean distance from `p` to the box (0 when inside).
    pub fn distance_to(&self, p: Point2) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        dx.hypot(dy)
    }

    pub fn intersects_disk(&self, center: Point2, r: f64) -> bool {
        self.distance_to(center) <= r
    }
}

pub fn signed_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += poly[i].cross(poly[(i + 1) % n]);
    }
    0.5 * s
}

pub fn centroid(poly: &[Point2]) -> Point2 {
    let a = signed_area(poly);
    let n = poly.len();
    if a.abs() < EPS {
        let s = poly.iter().fold(Point2::default(), |acc, p| acc + *p);
        return s * (1.0 / n.max(1) as f64);
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let c = p.cross(q);
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    Point2::new(cx / (6.0 * a), cy / (6.0 * a))
}

pub fn point_on_segment(p: Point2, a: Point2, b: Point2) -> bool {
    let ab = b - a;
    let len = ab.norm();
    if len < EPS {
        return p.dist(a) <= EPS;
    }
    let ap = p - a;
    if (ab.cross(ap) / len).abs() > EPS {
        return false;
    }
    let t = ap.dot(ab) / (len * len);
    (-EPS..=1.0 + EPS).contains(&t)
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let l2 = ab.dot(ab);
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / l2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Even-odd point-in-polygon; points on the boundary count as inside.
pub fn point_in_polygon(poly: &[Point2], p: Point2) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        if point_on_segment(p, poly[i], poly[(i + 1) % n]) {
            return true;
        }
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Parameter `t` along `p0→p1` and `u` along `q0→q1` of a proper crossing.
fn segment_params(p0: Point2, p1: Point2, q0: Point2, q1: Point2) -> Option<(f64, f64)> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = r.cross(s);
    if denom.abs() < 1e-15 {
        return None;
    }
    let qp = q0 - p0;
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    Some((t, u))
}

pub fn segments_intersect(p0: Point2, p1: Point2, q0: Point2, q1: Point2) -> bool {
    if let Some((t, u)) = segment_params(p0, p1, q0, q1) {
        return (-EPS..=1.0 + EPS).contains(&t) && (-EPS..=1.0 + EPS).contains(&u);
    }
    // parallel: only collinear overlap counts
    point_on_segment(q0, p0, p1)
        || point_on_segment(q1, p0, p1)
        || point_on_segment(p0, q0, q1)
        || point_on_segment(p1, q0, q1)
}

/// True when no two non-adjacent edges touch and the area is non-zero.
pub fn is_simple_polygon(poly: &[Point2]) -> bool {
    let n = poly.len();
    if n < 3 || signed_area(poly).abs() < EPS {
        return false;
    }
    for i in 0..n {
        let (a0, a1) = (poly[i], poly[(i + 1) % n]);
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let (b0, b1) = (poly[j], poly[(j + 1) % n]);
            if segments_intersect(a0, a1, b0, b1) {
                return false;
            }
        }
    }
    true
}

/// Sub-intervals `[t0, t1]` of the segment `a→b` that lie inside `poly`.
pub fn clip_segment(poly: &[Point2], a: Point2, b: Point2) -> Vec<(f64, f64)> {
    let n = poly.len();
    if n < 3 {
        return Vec::new();
    }
    let mut ts = vec![0.0, 1.0];
    for i in 0..n {
        let (q0, q1) = (poly[i], poly[(i + 1) % n]);
        if let Some((t, u)) = segment_params(a, b, q0, q1) {
            if (-EPS..=1.0 + EPS).contains(&u) && t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        } else {
            // collinear edge endpoints split the segment too
            let ab = b - a;
            let len2 = ab.dot(ab);
            if len2 > 0.0 {
                for q in [q0, q1] {
                    if point_on_segment(q, a, b) {
                        let t = (q - a).dot(ab) / len2;
                        if t > 0.0 && t < 1.0 {
                            ts.push(t);
                        }
                    }
                }
            }
        }
    }
    ts.sort_by(|x, y| x.total_cmp(y));
    ts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let mid = a.lerp(b, 0.5 * (t0 + t1));
        if point_in_polygon(poly, mid) {
            match out.last_mut() {
                Some(last) if (last.1 - t0).abs() < 1e-12 => last.1 = t1,
                _ => out.push((t0, t1)),
            }
        }
    }
    out
}

/// Length of polyline inside `poly`.
pub fn polyline_inside_length(poly: &[Point2], path: &[Point2]) -> f64 {
    path.windows(2)
        .map(|w| {
            let len = w[0].dist(w[1]);
            clip_segment(poly, w[0], w[1])
                .iter()
                .map(|(t0, t1)| (t1 - t0) * len)
                .sum::<f64>()
        })
        .sum()
}

/// True when the two polygons share interior area.
///
/// Boundary-only contact does not count.
pub fn polygons_overlap(a: &[Point2], b: &[Point2]) -> bool {
    let (na, nb) = (a.len(), b.len());
    for i in 0..na {
        let (p0, p1) = (a[i], a[(i + 1) % na]);
        for j in 0..nb {
            let (q0, q1) = (b[j], b[(j + 1) % nb]);
            if let Some((t, u)) = segment_params(p0, p1, q0, q1) {
                if t > EPS && t < 1.0 - EPS && u > EPS && u < 1.0 - EPS {
                    return true;
                }
            }
        }
    }
    let strictly_inside = |poly: &[Point2], p: Point2| {
        point_in_polygon(poly, p)
            && !(0..poly.len()).any(|i| point_on_segment(p, poly[i], poly[(i + 1) % poly.len()]))
    };
    a.iter().any(|p| strictly_inside(b, *p))
        || b.iter().any(|p| strictly_inside(a, *p))
        || strictly_inside(b, centroid(a))
        || strictly_inside(a, centroid(b))
}
