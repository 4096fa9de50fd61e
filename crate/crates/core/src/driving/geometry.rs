//! Planar geometry for vehicle footprints and the drivable area.

pub type Point = [f64; 2];

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Signed area, positive for counter-clockwise vertex order.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| cross(poly[i], poly[(i + 1) % n])).sum::<f64>() / 2.0
}

pub fn area(poly: &[Point]) -> f64 {
    signed_area(poly).abs()
}

/// Corners of a `length` x `width` rectangle centred at `(x, y)`,
/// counter-clockwise.
pub fn rectangle(x: f64, y: f64, heading: f64, length: f64, width: f64) -> [Point; 4] {
    let (s, c) = heading.sin_cos();
    let (hl, hw) = (length / 2.0, width / 2.0);
    let at = |u: f64, v: f64| [x + u * c - v * s, y + u * s + v * c];
    [at(hl, -hw), at(hl, hw), at(-hl, hw), at(-hl, -hw)]
}

/// Sutherland-Hodgman: the part of `subject` inside the convex,
/// counter-clockwise polygon `clip`. The subject may be non-convex; the
/// result can then contain zero-width bridges, which do not change its area.
pub fn clip_polygon(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = subject.to_vec();
    let m = clip.len();
    for e in 0..m {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[e], clip[(e + 1) % m]);
        let edge = sub(b, a);
        let side = |p: Point| cross(edge, sub(p, a));
        let input = std::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let (cur, prev) = (input[i], input[(i + n - 1) % n]);
            let (sc, sp) = (side(cur), side(prev));
            if sc >= 0.0 {
                if sp < 0.0 {
                    out.push(intersect(prev, cur, sp, sc));
                }
                out.push(cur);
            } else if sp >= 0.0 {
                out.push(intersect(prev, cur, sp, sc));
            }
        }
    }
    out
}

fn intersect(p: Point, q: Point, sp: f64, sq: f64) -> Point {
    let t = sp / (sp - sq);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

/// Area of a convex polygon lying outside a set of disjoint polygons.
pub fn area_outside(convex: &[Point], regions: &[Vec<Point>]) -> f64 {
    let inside: f64 = regions.iter().map(|r| area(&clip_polygon(r, convex))).sum();
    (area(convex) - inside).max(0.0)
}

/// Separating-axis test for two convex polygons (touching counts as overlap).
pub fn convex_overlap(a: &[Point], b: &[Point]) -> bool {
    for poly in [a, b] {
        let n = poly.len();
        for i in 0..n {
            let e = sub(poly[(i + 1) % n], poly[i]);
            let axis = [-e[1], e[0]];
            let (amin, amax) = project(a, axis);
            let (bmin, bmax) = project(b, axis);
            if amax < bmin || bmax < amin {
                return false;
            }
        }
    }
    true
}

fn project(poly: &[Point], axis: Point) -> (f64, f64) {
    poly.iter().map(|&p| dot(p, axis)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let t = if len2 == 0.0 { 0.0 } else { (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0) };
    distance(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Distance between two convex polygons, 0 when they overlap.
pub fn convex_distance(a: &[Point], b: &[Point]) -> f64 {
    if convex_overlap(a, b) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (p, q) in [(a, b), (b, a)] {
        let n = q.len();
        for &v in p {
            for i in 0..n {
                best = best.min(point_segment_distance(v, q[i], q[(i + 1) % n]));
            }
        }
    }
    best
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + n - 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(sub(b, a), sub(c, a));
    let d2 = cross(sub(b, a), sub(d, a));
    let d3 = cross(sub(d, c), sub(a, c));
    let d4 = cross(sub(d, c), sub(b, c));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// No two non-adjacent edges cross and the polygon has nonzero area.
pub fn is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 || area(poly) == 0.0 {
        return false;
    }
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let r = a.rem_euclid(t);
    if r > std::f64::consts::PI {
        r - t
    } else {
        r
    }
}

/// Arc-length parametrised polyline.
#[derive(Debug, Clone)]
pub struct Polyline {
    points: Vec<Point>,
    cum: Vec<f64>,
}

/// Closest point of a polyline to a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Arc length of the closest point.
    pub s: f64,
    /// Signed distance, positive to the left of the direction of travel.
    pub lateral: f64,
    /// Tangent direction at the closest point.
    pub heading: f64,
}

impl Polyline {
    /// Consecutive duplicate points are dropped; at least two distinct
    /// points must remain.
    pub fn new(points: &[Point]) -> Option<Self> {
        let mut pts: Vec<Point> = Vec::with_capacity(points.len());
        for &p in points {
            if pts.last().map_or(true, |&q| distance(p, q) > 0.0) {
                pts.push(p);
            }
        }
        if pts.len() < 2 {
            return None;
        }
        let mut cum = vec![0.0];
        for w in pts.windows(2) {
            cum.push(cum.last().unwrap() + distance(w[0], w[1]));
        }
        Some(Polyline { points: pts, cum })
    }

    pub fn length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn segment_heading(&self, i: usize) -> f64 {
        let d = sub(self.points[i + 1], self.points[i]);
        d[1].atan2(d[0])
    }

    /// Point and tangent direction at arc length `s`, extrapolated linearly
    /// beyond either end.
    pub fn at(&self, s: f64) -> (Point, f64) {
        let last = self.points.len() - 2;
        let i = match self.cum.partition_point(|&c| c <= s) {
            0 => 0,
            k => (k - 1).min(last),
        };
        let h = self.segment_heading(i);
        let u = s - self.cum[i];
        ([self.points[i][0] + u * h.cos(), self.points[i][1] + u * h.sin()], h)
    }

    pub fn project(&self, p: Point) -> Projection {
        let mut best = (f64::INFINITY, Projection { s: 0.0, lateral: 0.0, heading: 0.0 });
        for i in 0..self.points.len() - 1 {
            let (a, b) = (self.points[i], self.points[i + 1]);
            let ab = sub(b, a);
            let len = self.cum[i + 1] - self.cum[i];
            let t = (dot(sub(p, a), ab) / (len * len)).clamp(0.0, 1.0);
            let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
            let d = distance(p, q);
            if d < best.0 {
                let side = cross(ab, sub(p, a));
                let lateral = if side < 0.0 { -d } else { d };
                best = (d, Projection { s: self.cum[i] + t * len, lateral, heading: self.segment_heading(i) });
            }
        }
        best.1
    }
}
