use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use robust::{orient2d, Coord};

use super::{Point, MAX_DIM};
use crate::error::{contract, Error, Result};
use crate::montecarlo::RngStreamSpec;

/// A sampleable convex body with a closed-form volume.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexBody {
    /// `[lo, hi]` on the real line.
    Interval { lo: f64, hi: f64 },
    /// Simplex in `R^d` spanned by `d + 1` affinely independent vertices.
    Simplex { dim: usize, vertices: Vec<[f64; MAX_DIM]> },
    /// `[0, side]^d`.
    Cube { dim: usize, side: f64 },
    /// Ball of the given radius centred at the origin.
    Ball { dim: usize, radius: f64 },
    /// Convex polygon, vertices in strictly convex counterclockwise order.
    Polygon { vertices: Vec<[f64; 2]> },
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    orient2d(
        Coord { x: a[0], y: a[1] },
        Coord { x: b[0], y: b[1] },
        Coord { x: c[0], y: c[1] },
    )
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(contract(format!("body dimension {dim} not in 1..=3")))
    }
}

fn check_finite(values: impl IntoIterator<Item = f64>) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(contract("body parameter is not finite"))
    }
}

/// Signed `det[b-a, c-a, …]` for `d + 1` points in `R^d`.
fn simplex_det(dim: usize, v: &[[f64; MAX_DIM]]) -> f64 {
    let e = |i: usize, c: usize| v[i + 1][c] - v[0][c];
    match dim {
        1 => e(0, 0),
        2 => e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0),
        _ => {
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        }
    }
}

fn shoelace(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
}

impl ConvexBody {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        check_finite([lo, hi])?;
        if lo >= hi {
            return Err(contract("interval needs lo < hi"));
        }
        Ok(ConvexBody::Interval { lo, hi })
    }

    pub fn simplex(vertices: &[Vec<f64>]) -> Result<Self> {
        let dim = vertices.len().wrapping_sub(1);
        check_dim(dim)?;
        let mut v = Vec::with_capacity(dim + 1);
        for p in vertices {
            if p.len() != dim {
                return Err(contract("simplex vertex has the wrong dimension"));
            }
            check_finite(p.iter().copied())?;
            let mut c = [0.0; MAX_DIM];
            c[..dim].copy_from_slice(p);
            v.push(c);
        }
        if simplex_det(dim, &v) == 0.0 {
            return Err(contract("simplex vertices are affinely dependent"));
        }
        Ok(ConvexBody::Simplex { dim, vertices: v })
    }

    pub fn cube(dim: usize, side: f64) -> Result<Self> {
        check_dim(dim)?;
        check_finite([side])?;
        if side <= 0.0 {
            return Err(contract("cube side must be positive"));
        }
        Ok(ConvexBody::Cube { dim, side })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        check_finite([radius])?;
        if radius <= 0.0 {
            return Err(contract("ball radius must be positive"));
        }
        Ok(ConvexBody::Ball { dim, radius })
    }

    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(contract("polygon needs at least 3 vertices"));
        }
        check_finite(vertices.iter().flatten().copied())?;
        for i in 0..n {
            if orient(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) <= 0.0 {
                return Err(contract(
                    "polygon vertices must be in strictly convex counterclockwise order",
                ));
            }
        }
        // a star-shaped winding (e.g. a pentagram) turns left everywhere too
        if shoelace(vertices) <= 0.0 || winding_turns(vertices) != 1 {
            return Err(contract("polygon must wind once counterclockwise"));
        }
        Ok(ConvexBody::Polygon {
            vertices: vertices.to_vec(),
        })
    }

    /// Unit triangle `(0,0), (1,0), (0,1)`.
    pub fn triangle() -> Self {
        ConvexBody::Simplex {
            dim: 2,
            vertices: vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        }
    }

    /// Unit square `[0,1]²`.
    pub fn square() -> Self {
        ConvexBody::Cube { dim: 2, side: 1.0 }
    }

    /// Unit cube `[0,1]³`.
    pub fn cube3() -> Self {
        ConvexBody::Cube { dim: 3, side: 1.0 }
    }

    /// Unit interval `[0,1]`.
    pub fn unit_interval() -> Self {
        ConvexBody::Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ConvexBody::Interval { .. } => 1,
            ConvexBody::Simplex { dim, .. }
            | ConvexBody::Cube { dim, .. }
            | ConvexBody::Ball { dim, .. } => *dim,
            ConvexBody::Polygon { .. } => 2,
        }
    }

    /// Closed-form `vol K`.
    pub fn reference_volume(&self) -> f64 {
        match self {
            ConvexBody::Interval { lo, hi } => hi - lo,
            ConvexBody::Simplex { dim, vertices } => {
                let fact: f64 = (1..=*dim).map(|i| i as f64).product();
                simplex_det(*dim, vertices).abs() / fact
            }
            ConvexBody::Cube { dim, side } => side.powi(*dim as i32),
            ConvexBody::Ball { dim, radius } => {
                let unit = match dim {
                    1 => 2.0,
                    2 => PI,
                    _ => 4.0 * PI / 3.0,
                };
                unit * radius.powi(*dim as i32)
            }
            ConvexBody::Polygon { vertices } => shoelace(vertices),
        }
    }

    /// Membership with absolute slack `tol` scaled by the body's size.
    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        if p.dim() != self.dimension() {
            return false;
        }
        let x = p.xyz();
        match self {
            ConvexBody::Interval { lo, hi } => {
                let slack = tol * (hi - lo).max(1.0);
                x[0] >= lo - slack && x[0] <= hi + slack
            }
            ConvexBody::Cube { dim, side } => {
                let slack = tol * side.max(1.0);
                x[..*dim].iter().all(|&c| c >= -slack && c <= side + slack)
            }
            ConvexBody::Ball { dim, radius } => {
                let r2: f64 = x[..*dim].iter().map(|c| c * c).sum();
                r2.sqrt() <= radius * (1.0 + tol)
            }
            ConvexBody::Simplex { dim, vertices } => barycentric(*dim, vertices, &x)
                .iter()
                .all(|&l| l >= -tol),
            ConvexBody::Polygon { vertices } => {
                let n = vertices.len();
                let scale = vertices
                    .iter()
                    .flatten()
                    .fold(1.0f64, |m, c| m.max(c.abs()));
                (0..n).all(|i| {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])
                        >= -tol * scale * scale
                })
            }
        }
    }

    /// Appends `count` uniform points drawn from `rng` to `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, count: usize, out: &mut Vec<Point>) {
        let dim = self.dimension();
        out.reserve(count);
        for _ in 0..count {
            let mut c = [0.0; MAX_DIM];
            match self {
                ConvexBody::Interval { lo, hi } => c[0] = lo + (hi - lo) * rng.gen::<f64>(),
                ConvexBody::Cube { side, .. } => {
                    for v in c.iter_mut().take(dim) {
                        *v = side * rng.gen::<f64>();
                    }
                }
                ConvexBody::Ball { radius, .. } => sample_ball(rng, dim, *radius, &mut c),
                ConvexBody::Simplex { vertices, .. } => {
                    // normalized exponential spacings are uniform on the
                    // standard simplex
                    let mut w = [0.0; MAX_DIM + 1];
                    for v in w.iter_mut().take(dim + 1) {
                        *v = rng.sample::<f64, _>(Exp1);
                    }
                    let total: f64 = w[..=dim].iter().sum();
                    for (wi, vert) in w.iter().zip(vertices) {
                        for (ci, vc) in c.iter_mut().zip(vert).take(dim) {
                            *ci += wi / total * vc;
                        }
                    }
                }
                ConvexBody::Polygon { vertices } => sample_polygon(rng, vertices, &mut c),
            }
            out.push(Point::from_array(c, dim));
        }
    }
}

fn winding_turns(vertices: &[[f64; 2]]) -> i64 {
    let n = vertices.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            let (u, v) = ([b[0] - a[0], b[1] - a[1]], [c[0] - b[0], c[1] - b[1]]);
            (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1])
        })
        .sum();
    (total / (2.0 * PI)).round() as i64
}

fn barycentric(dim: usize, vertices: &[[f64; MAX_DIM]], x: &[f64; MAX_DIM]) -> Vec<f64> {
    let total = simplex_det(dim, vertices);
    let mut out = Vec::with_capacity(dim + 1);
    for i in 0..=dim {
        let mut v = vertices.to_vec();
        v[i] = *x;
        out.push(simplex_det(dim, &v) / total);
    }
    out
}

fn sample_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64, c: &mut [f64; MAX_DIM]) {
    if dim == 1 {
        c[0] = radius * (2.0 * rng.gen::<f64>() - 1.0);
        return;
    }
    let norm = loop {
        for v in c.iter_mut().take(dim) {
            *v = rng.sample(StandardNormal);
        }
        let n2: f64 = c[..dim].iter().map(|v| v * v).sum();
        if n2 > 0.0 {
            break n2.sqrt();
        }
    };
    // radial density proportional to r^{d-1}
    let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
    for v in c.iter_mut().take(dim) {
        *v *= r / norm;
    }
}

fn sample_polygon<R: Rng + ?Sized>(rng: &mut R, vertices: &[[f64; 2]], c: &mut [f64; MAX_DIM]) {
    let a = vertices[0];
    let areas: Vec<f64> = vertices[1..]
        .windows(2)
        .map(|w| 0.5 * ((w[0][0] - a[0]) * (w[1][1] - a[1]) - (w[0][1] - a[1]) * (w[1][0] - a[0])))
        .collect();
    let total: f64 = areas.iter().sum();
    let mut pick = rng.gen::<f64>() * total;
    let mut t = areas.len() - 1;
    for (i, area) in areas.iter().enumerate() {
        if pick < *area {
            t = i;
            break;
        }
        pick -= area;
    }
    let (b, d) = (vertices[t + 1], vertices[t + 2]);
    let (mut u, mut v) = (rng.gen::<f64>(), rng.gen::<f64>());
    if u + v > 1.0 {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    c[0] = a[0] + u * (b[0] - a[0]) + v * (d[0] - a[0]);
    c[1] = a[1] + u * (b[1] - a[1]) + v * (d[1] - a[1]);
}

/// `count` independent uniform points from `body`, deterministic in `stream`.
pub fn sample_uniform(body: &ConvexBody, count: usize, stream: &RngStreamSpec) -> Vec<Point> {
    let mut rng = stream.rng();
    let mut out = Vec::with_capacity(count);
    body.sample_into(&mut rng, count, &mut out);
    out
}

fn parse_floats(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?}")))
        })
        .collect()
}

fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
    text.split(';').map(parse_floats).collect()
}

/// Parses `kind` or `kind:params`.
///
/// Named bodies: `interval`, `triangle`, `square`, `cube3`, `tetrahedron`,
/// `disk`, `ball3`. Parametrized: `interval:lo,hi`, `cube:d,side`,
/// `ball:d,radius`, `simplex:x,y;x,y;x,y`, `polygon:x,y;x,y;…`.
impl FromStr for ConvexBody {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = match s.split_once(':') {
            Some((k, p)) => (k.trim(), Some(p)),
            None => (s.trim(), None),
        };
        let int_param = |v: f64| -> Result<usize> {
            if v.fract() == 0.0 && v >= 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Parse(format!("expected a dimension, got {v}")))
            }
        };
        match (kind, params) {
            ("interval", None) => Ok(Self::unit_interval()),
            ("triangle", None) => Ok(Self::triangle()),
            ("square", None) => Ok(Self::square()),
            ("cube3", None) => Ok(Self::cube3()),
            ("tetrahedron", None) => Self::simplex(&[
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ]),
            ("disk", None) => Self::ball(2, 1.0),
            ("ball3", None) => Self::ball(3, 1.0),
            ("interval", Some(p)) => match parse_floats(p)?[..] {
                [lo, hi] => Self::interval(lo, hi),
                _ => Err(Error::Parse("interval takes lo,hi".into())),
            },
            ("cube", Some(p)) => match parse_floats(p)?[..] {
                [d, side] => Self::cube(int_param(d)?, side),
                _ => Err(Error::Parse("cube takes d,side".into())),
            },
            ("ball", Some(p)) => match parse_floats(p)?[..] {
                [d, r] => Self::ball(int_param(d)?, r),
                _ => Err(Error::Parse("ball takes d,radius".into())),
            },
            ("simplex", Some(p)) => Self::simplex(&parse_points(p)?),
            ("polygon", Some(p)) => {
                let pts = parse_points(p)?;
                let mut v = Vec::with_capacity(pts.len());
                for q in pts {
                    match q[..] {
                        [x, y] => v.push([x, y]),
                        _ => return Err(Error::Parse("polygon vertices are x,y pairs".into())),
                    }
                }
                Self::polygon(&v)
            }
            _ => Err(Error::Parse(format!("unknown body {s:?}"))),
        }
    }
}

/// Canonical parametrized form, accepted back by [`FromStr`].
impl fmt::Display for ConvexBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |pts: Vec<String>| pts.join(";");
        match self {
            ConvexBody::Interval { lo, hi } => write!(f, "interval:{lo},{hi}"),
            ConvexBody::Cube { dim, side } => write!(f, "cube:{dim},{side}"),
            ConvexBody::Ball { dim, radius } => write!(f, "ball:{dim},{radius}"),
            ConvexBody::Simplex { dim, vertices } => {
                let pts = vertices
                    .iter()
                    .map(|v| v[..*dim].iter().map(f64::to_string).collect::<Vec<_>>().join(","))
                    .collect();
                write!(f, "simplex:{}", join(pts))
            }
            ConvexBody::Polygon { vertices } => {
                let pts = vertices.iter().map(|v| format!("{},{}", v[0], v[1])).collect();
                write!(f, "polygon:{}", join(pts))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(i: u64) -> RngStreamSpec {
        RngStreamSpec::new(2024, i)
    }

    #[test]
    fn reference_volumes() {
        assert_eq!(ConvexBody::cube3().reference_volume(), 1.0);
        let ball = ConvexBody::ball(3, 1.0).unwrap();
        assert!((ball.reference_volume() - 4.188_790_204_786_391).abs() < 1e-12);
        assert_eq!(ConvexBody::triangle().reference_volume(), 0.5);
        let tet: ConvexBody = "tetrahedron".parse().unwrap();
        assert!((tet.reference_volume() - 1.0 / 6.0).abs() < 1e-15);
        let hex = ConvexBody::polygon(&[[0.0, 0.0], [2.0, 0.0], [3.0, 1.0], [2.0, 2.0], [0.0, 2.0]]).unwrap();
        assert!((hex.reference_volume() - 5.0).abs() < 1e-12);
        assert_eq!(ConvexBody::ball(1, 2.5).unwrap().reference_volume(), 5.0);
        assert_eq!(ConvexBody::interval(-1.0, 3.0).unwrap().reference_volume(), 4.0);
    }

    #[test]
    fn invalid_bodies_are_rejected() {
        assert!(ConvexBody::interval(1.0, 1.0).is_err());
        assert!(ConvexBody::cube(4, 1.0).is_err());
        assert!(ConvexBody::ball(2, -1.0).is_err());
        assert!(ConvexBody::simplex(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
        // clockwise
        assert!(ConvexBody::polygon(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
        // collinear vertex
        assert!(ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 1.0]]).is_err());
        // pentagram: every turn is a left turn but it winds twice
        let star: Vec<[f64; 2]> = (0..5)
            .map(|i| {
                let t = 2.0 * PI * (2 * i) as f64 / 5.0;
                [t.cos(), t.sin()]
            })
            .collect();
        assert!(ConvexBody::polygon(&star).is_err());
    }

    #[test]
    fn parse_round_trips_through_display() {
        for text in [
            "interval", "triangle", "square", "cube3", "tetrahedron", "disk", "ball3",
            "interval:-1,2", "cube:2,0.5", "ball:3,2", "simplex:0,0;2,0;0,3",
            "polygon:0,0;1,0;1,1;0,1",
        ] {
            let body: ConvexBody = text.parse().unwrap();
            let again: ConvexBody = body.to_string().parse().unwrap();
            assert_eq!(body, again, "{text}");
        }
        assert!("blob".parse::<ConvexBody>().is_err());
        assert!("cube:2.5,1".parse::<ConvexBody>().is_err());
        assert!("polygon:0,0,1;1,1".parse::<ConvexBody>().is_err());
    }

    #[test]
    fn samples_stay_inside() {
        let bodies: Vec<ConvexBody> = [
            "interval:-1,2", "triangle", "square", "cube3", "tetrahedron", "disk", "ball3",
            "ball:1,2", "simplex:0,0;2,0;0,3", "polygon:0,0;2,0;3,1;2,2;0,2",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
        for (i, body) in bodies.iter().enumerate() {
            for p in sample_uniform(body, 2000, &stream(i as u64)) {
                assert_eq!(p.dim(), body.dimension());
                assert!(body.contains(&p, 1e-12), "{body} {p:?}");
            }
        }
    }

    #[test]
    fn simplex_barycentric_coordinates() {
        let body = ConvexBody::triangle();
        for p in sample_uniform(&body, 5000, &stream(7)) {
            let (x, y) = (p.coords()[0], p.coords()[1]);
            assert!(x >= 0.0 && y >= 0.0 && x + y <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let body = ConvexBody::ball(3, 1.0).unwrap();
        assert_eq!(sample_uniform(&body, 50, &stream(3)), sample_uniform(&body, 50, &stream(3)));
        assert_ne!(sample_uniform(&body, 50, &stream(3)), sample_uniform(&body, 50, &stream(4)));
    }

    #[test]
    fn cube_coordinate_means() {
        let body = ConvexBody::cube3();
        let pts = sample_uniform(&body, 1_000_000, &stream(11));
        let bound = 4.0 * (1.0 / 12f64.sqrt()) / 1e3;
        for c in 0..3 {
            let mean = pts.iter().map(|p| p.coords()[c]).sum::<f64>() / pts.len() as f64;
            assert!((mean - 0.5).abs() < bound, "coord {c}: {mean}");
        }
    }

    #[test]
    fn disk_and_polygon_are_uniform_by_region() {
        // fraction of the unit disk inside radius 1/2 is 1/4
        let disk = ConvexBody::ball(2, 1.0).unwrap();
        let pts = sample_uniform(&disk, 200_000, &stream(5));
        let inner = pts.iter().filter(|p| p.coords()[0].hypot(p.coords()[1]) < 0.5).count();
        let frac = inner as f64 / pts.len() as f64;
        let se = (0.25f64 * 0.75 / pts.len() as f64).sqrt();
        assert!((frac - 0.25).abs() < 5.0 * se, "{frac}");

        // pentagon made of a unit square plus a triangle of area 1/2 on top
        let house = ConvexBody::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.5, 2.0], [0.0, 1.0]]).unwrap();
        let pts = sample_uniform(&house, 200_000, &stream(6));
        let roof = pts.iter().filter(|p| p.coords()[1] > 1.0).count() as f64 / pts.len() as f64;
        let p = 0.5 / 1.5;
        let se = (p * (1.0 - p) / pts.len() as f64).sqrt();
        assert!((roof - p).abs() < 5.0 * se, "{roof}");
    }
}
