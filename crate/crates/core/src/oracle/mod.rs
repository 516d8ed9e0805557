//! Independent ground truth: closed-form interval moments, exact
//! expectations over discrete laws, and a registry of planar constants that
//! were computed in-repo by two independent methods.

mod quadrature;
mod registry;

use serde::{Deserialize, Serialize};

use crate::duality::DiscreteLaw;
use crate::error::{contract, Result};
use crate::exactsym::{ratio, rational, Rational};

pub use quadrature::{expected_triangle_area_ratio, gauss_legendre};
pub use registry::{
    compute_ev3_ratio, interval_ev2_entry, planar_reference, three_figure_tolerance, DualComputation,
    Registry, REGISTRY_HEADER, REGISTRY_TSV,
};

/// How an oracle value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    BruteForce,
    HighRepSimulation,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::BruteForce => "brute-force",
            Provenance::HighRepSimulation => "high-rep-simulation",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleNumber {
    Exact(Rational),
    Real(f64),
}

impl OracleNumber {
    pub fn as_f64(&self) -> f64 {
        match self {
            OracleNumber::Exact(r) => num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN),
            OracleNumber::Real(x) => *x,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleValue {
    pub label: String,
    pub value: OracleNumber,
    pub provenance: Provenance,
    pub detail: String,
}

impl OracleValue {
    /// Exact-mode comparands must not rest on simulation alone.
    pub fn usable_as_exact(&self) -> bool {
        self.provenance != Provenance::HighRepSimulation && matches!(self.value, OracleNumber::Exact(_))
    }
}

/// `E[(range of n uniforms on [0,1])^k]`.
///
/// The range of `n ≥ 2` uniforms has density `n(n-1) r^{n-2} (1-r)`, a
/// Beta(n-1, 2) law, whose `k`-th moment is `∏_{i<k} (n-1+i)/(n+1+i)`.
pub fn interval_volume_moment(n: u64, k: u64) -> Rational {
    if n < 2 {
        return rational(if k == 0 { 1 } else { 0 });
    }
    (0..k).fold(rational(1), |acc, i| {
        acc * ratio((n - 1 + i) as i64, (n + 1 + i) as i64)
    })
}

/// Law of the vertex count of `m` uniform points on an interval: one vertex
/// for a single point, otherwise the two endpoints.
pub fn interval_vertex_law(m: u64) -> DiscreteLaw {
    DiscreteLaw::point_mass(if m >= 2 { 2 } else { 1 })
}

/// `Σ_v P(N = v) f(v)`, with its own validity check of `law`.
pub fn brute_force_expectation(law: &DiscreteLaw, f: impl Fn(u64) -> Rational) -> Result<Rational> {
    if law.support.len() != law.probabilities.len() || law.support.is_empty() {
        return Err(contract("law support and probabilities differ in length"));
    }
    let mut total = rational(0);
    let mut mass = rational(0);
    for (i, (&v, p)) in law.support.iter().zip(&law.probabilities).enumerate() {
        if *p < rational(0) || (i > 0 && law.support[i - 1] >= v) {
            return Err(contract("law is not a probability distribution on increasing support"));
        }
        mass += p;
        total += p * f(v);
    }
    if mass != rational(1) {
        return Err(contract(format!("law mass is {mass}")));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_moment_examples() {
        assert_eq!(interval_volume_moment(2, 1), ratio(1, 3));
        assert_eq!(interval_volume_moment(1, 5), rational(0));
        assert_eq!(interval_volume_moment(3, 2), ratio(3, 10));
    }

    /// Midpoint rule over `[0,1]^n` of `(max - min)^k`.
    fn grid_range_moment(n: usize, k: i32, cells: usize) -> f64 {
        let h = 1.0 / cells as f64;
        let total = cells.pow(n as u32);
        let mut sum = 0.0;
        for mut idx in 0..total {
            let (mut lo, mut hi) = (f64::MAX, f64::MIN);
            for _ in 0..n {
                let x = ((idx % cells) as f64 + 0.5) * h;
                idx /= cells;
                lo = lo.min(x);
                hi = hi.max(x);
            }
            sum += (hi - lo).powi(k);
        }
        sum / total as f64
    }

    #[test]
    fn interval_moment_matches_numerical_integration() {
        for (n, k, cells) in [(2, 1, 400), (2, 3, 400), (3, 1, 80), (3, 2, 80), (4, 2, 50)] {
            let exact = interval_volume_moment(n as u64, k as u64);
            let exact = num_traits::ToPrimitive::to_f64(&exact).unwrap();
            let grid = grid_range_moment(n, k, cells);
            assert!((grid - exact).abs() < 2e-3 * exact, "n={n} k={k}: {grid} vs {exact}");
        }
    }

    #[test]
    fn interval_vertex_law_examples() {
        assert_eq!(interval_vertex_law(1), DiscreteLaw::point_mass(1));
        assert_eq!(interval_vertex_law(2), DiscreteLaw::point_mass(2));
        assert_eq!(interval_vertex_law(7), DiscreteLaw::point_mass(2));
    }

    #[test]
    fn brute_force_examples() {
        let id = |v: u64| rational(v as i64);
        assert_eq!(brute_force_expectation(&DiscreteLaw::point_mass(2), id).unwrap(), rational(2));
        let law = DiscreteLaw::uniform(&[1, 3]).unwrap();
        assert_eq!(brute_force_expectation(&law, id).unwrap(), rational(2));
        let law = DiscreteLaw::uniform(&[2, 4]).unwrap();
        let ff = |v: u64| rational((v * (v - 1)) as i64);
        assert_eq!(brute_force_expectation(&law, ff).unwrap(), rational(7));
        let bad = DiscreteLaw {
            support: vec![1, 2],
            probabilities: vec![ratio(1, 2), ratio(1, 4)],
        };
        assert!(brute_force_expectation(&bad, id).is_err());
    }

    #[test]
    fn provenance_gate() {
        let sim = OracleValue {
            label: "x".into(),
            value: OracleNumber::Real(0.1),
            provenance: Provenance::HighRepSimulation,
            detail: String::new(),
        };
        assert!(!sim.usable_as_exact());
        let exact = OracleValue {
            value: OracleNumber::Exact(ratio(1, 3)),
            provenance: Provenance::ClosedForm,
            ..sim
        };
        assert!(exact.usable_as_exact());
    }
}
