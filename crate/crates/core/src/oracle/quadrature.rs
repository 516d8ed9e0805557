//! Deterministic integration of the expected area of a random triangle in
//! a convex polygon.
//!
//! For fixed `a, b` the inner integral `∫_K |det(b-a, c-a)| dc` is exact:
//! the integrand is linear on each side of the line `ab`, and the integral
//! of a linear function over a polygon is its value at the centroid times
//! the area. The remaining integral over `(a, b) ∈ K²` uses tensor
//! Gauss–Legendre rules on a fan triangulation of `K` (collapsed-square map).

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_{n-1}(x)
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out
}

type V2 = [f64; 2];

fn cross(o: V2, a: V2, b: V2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Area and centroid of a simple polygon (counterclockwise).
fn area_centroid(poly: &[V2]) -> (f64, V2) {
    let n = poly.len();
    if n < 3 {
        return (0.0, [0.0, 0.0]);
    }
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let t = p[0] * q[1] - q[0] * p[1];
        a += t;
        cx += (p[0] + q[0]) * t;
        cy += (p[1] + q[1]) * t;
    }
    if a == 0.0 {
        return (0.0, [0.0, 0.0]);
    }
    (a / 2.0, [cx / (3.0 * a), cy / (3.0 * a)])
}

/// Part of `poly` where `f ≥ 0` for an affine `f`.
fn clip(poly: &[V2], f: impl Fn(V2) -> f64) -> Vec<V2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let (fp, fq) = (f(p), f(q));
        if fp >= 0.0 {
            out.push(p);
        }
        if (fp >= 0.0) != (fq >= 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// `∫_K |det(b-a, c-a)| dc`.
fn abs_det_integral(poly: &[V2], area: f64, centroid: V2, a: V2, b: V2) -> f64 {
    let f = |c: V2| cross(a, b, c);
    let (pos_area, pos_centroid) = area_centroid(&clip(poly, f));
    // ∫|f| = 2∫_{f≥0} f − ∫_K f
    2.0 * pos_area * f(pos_centroid) - area * f(centroid)
}

/// `E[area(abc)] / area(K)` for independent uniform `a, b, c` in the convex
/// polygon `poly` (counterclockwise), using `nodes` Gauss–Legendre points
/// per direction of each fan triangle.
pub fn expected_triangle_area_ratio(poly: &[V2], nodes: usize) -> f64 {
    let (area, centroid) = area_centroid(poly);
    let rule = gauss_legendre(nodes);
    let mut cloud: Vec<(V2, f64)> = Vec::new();
    for t in 1..poly.len() - 1 {
        let (v0, v1, v2) = (poly[0], poly[t], poly[t + 1]);
        let tri_area = cross(v0, v1, v2) / 2.0;
        for &(s, ws) in &rule {
            for &(u, wu) in &rule {
                let p = [
                    v0[0] + s * (v1[0] - v0[0]) + s * u * (v2[0] - v1[0]),
                    v0[1] + s * (v1[1] - v0[1]) + s * u * (v2[1] - v1[1]),
                ];
                cloud.push((p, ws * wu * 2.0 * tri_area * s));
            }
        }
    }
    let mut total = 0.0;
    for (i, &(a, wa)) in cloud.iter().enumerate() {
        // symmetric in (a, b); the diagonal contributes zero
        for &(b, wb) in &cloud[..i] {
            total += 2.0 * wa * wb * abs_det_integral(poly, area, centroid, a, b);
        }
    }
    // area(abc) = |det| / 2; normalize by area^3 for the expectation and
    // once more for the ratio
    total / 2.0 / area.powi(4)
}
