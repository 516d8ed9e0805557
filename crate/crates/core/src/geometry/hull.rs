//! Convex hulls with exact extreme-point semantics.
//!
//! Orientation signs come from adaptive-precision predicates, which are exact
//! for finite double inputs, so the vertex set is combinatorially exact:
//! a point that lies on an edge or facet of the hull of the others is not a
//! vertex. Volumes are accumulated in floating point; [`exact_hull_volume`]
//! repeats the accumulation over rationals.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;
use robust::{orient2d, orient3d, Coord, Coord3D};

use super::Point;
use crate::error::{contract, Result};
use crate::exactsym::Rational;

/// Volume and vertex set of the convex hull of a point sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct HullSummary {
    pub volume: f64,
    pub vertex_count: usize,
    /// Sorted indices into the input sequence. Duplicated inputs are
    /// represented by their first occurrence.
    pub vertex_indices: Vec<usize>,
}

impl HullSummary {
    pub fn is_vertex(&self, index: usize) -> bool {
        self.vertex_indices.binary_search(&index).is_ok()
    }
}

type P3 = [f64; 3];

/// Boundary of a hull in terms of input indices.
#[derive(Debug)]
enum Boundary {
    /// Fewer than `d + 1` affinely independent points.
    Flat,
    Segment(usize, usize),
    /// Counterclockwise cycle.
    Polygon(Vec<usize>),
    /// Outward-oriented triangles.
    Mesh(Vec<[usize; 3]>),
}

#[derive(Debug)]
struct Hull {
    vertices: Vec<usize>,
    boundary: Boundary,
}

fn o2(a: &P3, b: &P3, c: &P3) -> f64 {
    orient2d(
        Coord { x: a[0], y: a[1] },
        Coord { x: b[0], y: b[1] },
        Coord { x: c[0], y: c[1] },
    )
}

/// Positive when `d` lies on the inner side of the outward triangle `abc`.
fn o3(a: &P3, b: &P3, c: &P3, d: &P3) -> f64 {
    let q = |p: &P3| Coord3D { x: p[0], y: p[1], z: p[2] };
    orient3d(q(a), q(b), q(c), q(d))
}

fn lex(a: &P3, b: &P3) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Input indices sorted lexicographically by coordinates, keeping only the
/// first occurrence of each distinct point.
fn unique_sorted(pts: &[P3]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| lex(&pts[a], &pts[b]).then(a.cmp(&b)));
    idx.dedup_by(|later, first| lex(&pts[*later], &pts[*first]).is_eq());
    idx
}

/// Andrew's monotone chain on lexicographically sorted distinct indices.
/// Collinear boundary points are dropped.
fn monotone_chain(pts: &[P3], sorted: &[usize], proj: impl Fn(&P3) -> P3) -> Vec<usize> {
    if sorted.len() < 3 {
        return sorted.to_vec();
    }
    let q: Vec<P3> = sorted.iter().map(|&i| proj(&pts[i])).collect();
    let mut chain: Vec<usize> = Vec::with_capacity(2 * q.len());
    let build = |order: &mut dyn Iterator<Item = usize>, chain: &mut Vec<usize>| {
        let floor = chain.len();
        for t in order {
            while chain.len() >= floor + 2
                && o2(&q[chain[chain.len() - 2]], &q[chain[chain.len() - 1]], &q[t]) <= 0.0
            {
                chain.pop();
            }
            chain.push(t);
        }
        chain.pop();
    };
    build(&mut (0..q.len()), &mut chain);
    build(&mut (0..q.len()).rev(), &mut chain);
    chain.into_iter().map(|t| sorted[t]).collect()
}

fn hull_1d(pts: &[P3]) -> Hull {
    let sorted = unique_sorted(pts);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if lo == hi {
        return Hull {
            vertices: vec![lo],
            boundary: Boundary::Flat,
        };
    }
    let mut vertices = vec![lo, hi];
    vertices.sort_unstable();
    Hull {
        vertices,
        boundary: Boundary::Segment(lo, hi),
    }
}

fn hull_2d(pts: &[P3]) -> Hull {
    let sorted = unique_sorted(pts);
    let cycle = monotone_chain(pts, &sorted, |p| *p);
    let mut vertices = cycle.clone();
    vertices.sort_unstable();
    let boundary = if cycle.len() >= 3 {
        Boundary::Polygon(cycle)
    } else {
        Boundary::Flat
    };
    Hull { vertices, boundary }
}

fn collinear3(a: &P3, b: &P3, c: &P3) -> bool {
    // the cross product's components are the three projected orientations
    let drop = |p: &P3, skip: usize| -> P3 {
        let mut out = [0.0; 3];
        let mut t = 0;
        for (c, v) in p.iter().enumerate() {
            if c != skip {
                out[t] = *v;
                t += 1;
            }
        }
        out
    };
    (0..3).all(|s| o2(&drop(a, s), &drop(b, s), &drop(c, s)) == 0.0)
}

fn hull_3d(pts: &[P3]) -> Hull {
    let sorted = unique_sorted(pts);
    hull_3d_of(pts, &sorted)
}

/// Hull of `pts[i]` for `i` in `candidates` (distinct points, any order).
fn hull_3d_of(pts: &[P3], candidates: &[usize]) -> Hull {
    let flat = |vertices: Vec<usize>| {
        let mut vertices = vertices;
        vertices.sort_unstable();
        Hull {
            vertices,
            boundary: Boundary::Flat,
        }
    };
    if candidates.len() <= 2 {
        return flat(candidates.to_vec());
    }
    let (a, b) = (candidates[0], candidates[1]);
    let Some(c) = candidates[2..]
        .iter()
        .copied()
        .find(|&c| !collinear3(&pts[a], &pts[b], &pts[c]))
    else {
        // collinear: lexicographic order is the order along the line
        let lo = *candidates.iter().min_by(|&&x, &&y| lex(&pts[x], &pts[y])).unwrap();
        let hi = *candidates.iter().max_by(|&&x, &&y| lex(&pts[x], &pts[y])).unwrap();
        return flat(vec![lo, hi]);
    };
    let Some(d) = candidates
        .iter()
        .copied()
        .find(|&d| o3(&pts[a], &pts[b], &pts[c], &pts[d]) != 0.0)
    else {
        // coplanar: project along an axis the plane is not parallel to
        let skip = (0..3)
            .find(|&s| {
                let proj = |p: &P3| -> P3 {
                    match s {
                        0 => [p[1], p[2], 0.0],
                        1 => [p[0], p[2], 0.0],
                        _ => [p[0], p[1], 0.0],
                    }
                };
                o2(&proj(&pts[a]), &proj(&pts[b]), &proj(&pts[c])) != 0.0
            })
            .expect("non-collinear triple has a non-degenerate projection");
        let proj = move |p: &P3| -> P3 {
            match skip {
                0 => [p[1], p[2], 0.0],
                1 => [p[0], p[2], 0.0],
                _ => [p[0], p[1], 0.0],
            }
        };
        let mut sorted = candidates.to_vec();
        sorted.sort_by(|&x, &y| lex(&proj(&pts[x]), &proj(&pts[y])).then(x.cmp(&y)));
        return flat(monotone_chain(pts, &sorted, proj));
    };

    let mut faces: Vec<[usize; 3]> = Vec::new();
    let tet = [a, b, c, d];
    for (f, opposite) in [([a, b, c], d), ([a, b, d], c), ([a, c, d], b), ([b, c, d], a)] {
        let [x, y, z] = f;
        if o3(&pts[x], &pts[y], &pts[z], &pts[opposite]) > 0.0 {
            faces.push([x, y, z]);
        } else {
            faces.push([x, z, y]);
        }
    }

    let mut visible_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &p in candidates {
        if tet.contains(&p) {
            continue;
        }
        let q = &pts[p];
        let (visible, kept): (Vec<[usize; 3]>, Vec<[usize; 3]>) = faces
            .iter()
            .partition(|f| o3(&pts[f[0]], &pts[f[1]], &pts[f[2]], q) < 0.0);
        if visible.is_empty() {
            continue;
        }
        visible_edges.clear();
        for f in &visible {
            for e in 0..3 {
                visible_edges.insert((f[e], f[(e + 1) % 3]));
            }
        }
        faces = kept;
        for &(u, v) in &visible_edges {
            if !visible_edges.contains(&(v, u)) {
                faces.push([u, v, p]);
            }
        }
    }

    let mut vertices: Vec<usize> = faces.iter().flatten().copied().collect();
    vertices.sort_unstable();
    vertices.dedup();

    // A hull vertex can only fail to be extreme if it sits on an edge or in
    // a facet, which shows up as a pair of coplanar neighbouring triangles.
    let mut opposite: HashMap<(usize, usize), usize> = HashMap::new();
    for f in &faces {
        for e in 0..3 {
            opposite.insert((f[e], f[(e + 1) % 3]), f[(e + 2) % 3]);
        }
    }
    let mut suspects: Vec<usize> = Vec::new();
    for f in &faces {
        for e in 0..3 {
            let (u, v) = (f[e], f[(e + 1) % 3]);
            let x = opposite[&(v, u)];
            if o3(&pts[f[0]], &pts[f[1]], &pts[f[2]], &pts[x]) == 0.0 {
                suspects.push(u);
                suspects.push(v);
            }
        }
    }
    suspects.sort_unstable();
    suspects.dedup();
    for s in suspects {
        let others: Vec<usize> = vertices.iter().copied().filter(|&v| v != s).collect();
        let rest = hull_3d_of(pts, &others);
        let extreme = match &rest.boundary {
            Boundary::Mesh(fs) => fs
                .iter()
                .any(|f| o3(&pts[f[0]], &pts[f[1]], &pts[f[2]], &pts[s]) < 0.0),
            // the others span less than 3 dimensions, so s is off their
            // affine hull
            _ => true,
        };
        if !extreme {
            vertices.retain(|&v| v != s);
        }
    }

    Hull {
        vertices,
        boundary: Boundary::Mesh(faces),
    }
}

fn build(points: &[Point], dim: usize) -> Result<(Vec<P3>, Hull)> {
    if !(1..=3).contains(&dim) {
        return Err(contract(format!("hull dimension {dim} not in 1..=3")));
    }
    if points.is_empty() {
        return Err(contract("hull needs at least one point"));
    }
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(contract(format!(
            "point of dimension {} in a {dim}-dimensional hull",
            p.dim()
        )));
    }
    let pts: Vec<P3> = points.iter().map(Point::xyz).collect();
    let hull = match dim {
        1 => hull_1d(&pts),
        2 => hull_2d(&pts),
        _ => hull_3d(&pts),
    };
    Ok((pts, hull))
}

fn det3(a: &P3, b: &P3, c: &P3) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn volume(pts: &[P3], boundary: &Boundary) -> f64 {
    match boundary {
        Boundary::Flat => 0.0,
        Boundary::Segment(lo, hi) => pts[*hi][0] - pts[*lo][0],
        Boundary::Polygon(cycle) => {
            let o = pts[cycle[0]];
            0.5 * cycle
                .windows(2)
                .map(|w| {
                    let (a, b) = (pts[w[0]], pts[w[1]]);
                    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
                })
                .sum::<f64>()
        }
        Boundary::Mesh(faces) => {
            // reference point inside the hull keeps every term nonnegative
            let mut r = [0.0; 3];
            let used: BTreeSet<usize> = faces.iter().flatten().copied().collect();
            for &i in &used {
                for (rc, pc) in r.iter_mut().zip(&pts[i]) {
                    *rc += pc;
                }
            }
            r.iter_mut().for_each(|c| *c /= used.len() as f64);
            let rel = |p: &P3| [p[0] - r[0], p[1] - r[1], p[2] - r[2]];
            faces
                .iter()
                .map(|f| det3(&rel(&pts[f[0]]), &rel(&pts[f[1]]), &rel(&pts[f[2]])))
                .sum::<f64>()
                / 6.0
        }
    }
}

/// Volume (length, area) and exact vertex set of the hull of `points`.
pub fn convex_hull(points: &[Point], dim: usize) -> Result<HullSummary> {
    let (pts, hull) = build(points, dim)?;
    Ok(HullSummary {
        volume: volume(&pts, &hull.boundary).max(0.0),
        vertex_count: hull.vertices.len(),
        vertex_indices: hull.vertices,
    })
}

/// Hull volume with every input coordinate read as an exact rational.
pub fn exact_hull_volume(points: &[Point], dim: usize) -> Result<Rational> {
    let (pts, hull) = build(points, dim)?;
    let q = |v: f64| Rational::from_float(v).expect("finite coordinate");
    let qp = |i: usize| [q(pts[i][0]), q(pts[i][1]), q(pts[i][2])];
    Ok(match &hull.boundary {
        Boundary::Flat => Rational::zero(),
        Boundary::Segment(lo, hi) => q(pts[*hi][0]) - q(pts[*lo][0]),
        Boundary::Polygon(cycle) => {
            let n = cycle.len();
            let twice: Rational = (0..n)
                .map(|t| {
                    let (a, b) = (qp(cycle[t]), qp(cycle[(t + 1) % n]));
                    &a[0] * &b[1] - &a[1] * &b[0]
                })
                .sum();
            twice / Rational::from_integer(2.into())
        }
        Boundary::Mesh(faces) => {
            let six: Rational = faces
                .iter()
                .map(|f| {
                    let (a, b, c) = (qp(f[0]), qp(f[1]), qp(f[2]));
                    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
                        + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
                })
                .sum();
            six / Rational::from_integer(6.into())
        }
    })
}
