//! Replication engine and estimators for volume moments, factorial moments
//! of vertex counts, and direct vertex probabilities.
//!
//! Replication `r` of an estimator draws its points from the stream
//! `(master_seed, lane << 40 | r)`. Replications run in parallel but their
//! outputs are reduced in replication order, so every estimate is
//! bit-identical for any worker count.

mod identity;
mod rng;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duality::factorial_ratio_f64;
use crate::error::{contract, Result};
use crate::geometry::{convex_hull, ConvexBody, HullSummary, Point};

pub use identity::{check_identity, IdentityKind, IdentityReport, Mode, Parameters};
pub use rng::RngStreamSpec;

use rng::REPLICATION_BITS;

/// Compensated running sum.
#[derive(Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    fn add(self, x: f64) -> Self {
        let t = self.sum + x;
        let carry = if self.sum.abs() >= x.abs() {
            self.carry + ((self.sum - t) + x)
        } else {
            self.carry + ((x - t) + self.sum)
        };
        Neumaier { sum: t, carry }
    }

    fn total(self) -> f64 {
        self.sum + self.carry
    }
}

/// Monte Carlo estimate of one expectation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub estimand: String,
    pub mean: f64,
    pub stderr: f64,
    #[serde(rename = "reps")]
    pub replications: u64,
    pub master_seed: u64,
}

impl MomentEstimate {
    /// Mean and standard error (`s / √reps`, with the `reps - 1` sample
    /// variance) of `samples`, accumulated in order.
    pub fn from_samples(
        estimand: impl Into<String>,
        master_seed: u64,
        samples: impl Iterator<Item = f64> + Clone,
    ) -> Self {
        let (count, sum) = samples.clone().fold((0u64, Neumaier::default()), |(c, s), x| (c + 1, s.add(x)));
        let mean = if count == 0 { 0.0 } else { sum.total() / count as f64 };
        let ss: f64 = samples.map(|x| (x - mean) * (x - mean)).sum();
        let stderr = if count > 1 {
            (ss / (count - 1) as f64 / count as f64).sqrt()
        } else {
            0.0
        };
        MomentEstimate {
            estimand: estimand.into(),
            mean,
            stderr,
            replications: count,
            master_seed,
        }
    }

    /// `Σ c_i X_i` of independent estimates; standard errors add in
    /// quadrature.
    pub fn linear_combination(
        estimand: impl Into<String>,
        master_seed: u64,
        terms: &[(f64, &MomentEstimate)],
    ) -> Self {
        let mean = terms.iter().map(|(c, e)| c * e.mean).sum();
        let var: f64 = terms.iter().map(|(c, e)| (c * e.stderr).powi(2)).sum();
        MomentEstimate {
            estimand: estimand.into(),
            mean,
            stderr: var.sqrt(),
            replications: terms.iter().map(|(_, e)| e.replications).max().unwrap_or(0),
            master_seed,
        }
    }
}

/// Runs `reps` replications of `f`, each filling `width` statistics, and
/// returns them flattened in replication order. `f` receives the
/// replication index and a reusable point buffer.
pub(crate) fn replicate<F>(reps: u64, width: usize, f: F) -> Vec<f64>
where
    F: Fn(u64, &mut Vec<Point>, &mut [f64]) + Sync,
{
    let mut out = vec![0.0; reps as usize * width];
    out.par_chunks_mut(width)
        .enumerate()
        .for_each_init(Vec::new, |buf, (r, slot)| {
            buf.clear();
            f(r as u64, buf, slot)
        });
    out
}

/// Column `c` of a flattened `width`-wide table.
pub(crate) fn column(table: &[f64], width: usize, c: usize) -> impl Iterator<Item = f64> + Clone + '_ {
    table.iter().skip(c).step_by(width).copied()
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
        .install(f)
}

pub(crate) fn check_reps(reps: u64) -> Result<()> {
    if reps == 0 || reps >= 1 << REPLICATION_BITS {
        return Err(contract(format!("replication count {reps} out of range")));
    }
    Ok(())
}

/// Draws `count` points for replication `rep` of `lane` into `buf`.
pub(crate) fn draw(body: &ConvexBody, count: usize, seed: u64, lane: u64, rep: u64, buf: &mut Vec<Point>) {
    let mut rng = RngStreamSpec::replication(seed, lane, rep).rng();
    body.sample_into(&mut rng, count, buf);
}

pub(crate) fn hull(body: &ConvexBody, pts: &[Point]) -> HullSummary {
    convex_hull(pts, body.dimension()).expect("sampled points match the body dimension")
}

pub(crate) fn volume_moment_lane(
    body: &ConvexBody,
    n: u64,
    k: u64,
    reps: u64,
    seed: u64,
    lane: u64,
) -> Result<MomentEstimate> {
    check_reps(reps)?;
    if n == 0 || k == 0 {
        return Err(contract("volume moment needs n >= 1 and k >= 1"));
    }
    let vol = body.reference_volume();
    let table = replicate(reps, 1, |r, buf, out| {
        draw(body, n as usize, seed, lane, r, buf);
        out[0] = (hull(body, buf).volume / vol).powi(k as i32);
    });
    Ok(MomentEstimate::from_samples(
        format!("E V_{n}^{k} / vol^{k}"),
        seed,
        column(&table, 1, 0),
    ))
}

pub(crate) fn factorial_moment_lane(
    body: &ConvexBody,
    m: u64,
    j: u64,
    reps: u64,
    seed: u64,
    lane: u64,
) -> Result<MomentEstimate> {
    check_reps(reps)?;
    if m == 0 || j > m {
        return Err(contract("factorial moment needs m >= 1 and j <= m"));
    }
    let table = replicate(reps, 1, |r, buf, out| {
        draw(body, m as usize, seed, lane, r, buf);
        out[0] = factorial_ratio_f64(hull(body, buf).vertex_count as u64, m, j);
    });
    Ok(MomentEstimate::from_samples(
        format!("E (N_{m})_({j}) / ({m})_({j})"),
        seed,
        column(&table, 1, 0),
    ))
}

pub(crate) fn vertex_prob_lane(
    body: &ConvexBody,
    m: u64,
    j: u64,
    reps: u64,
    seed: u64,
    lane: u64,
) -> Result<MomentEstimate> {
    check_reps(reps)?;
    if j == 0 {
        return Err(contract("vertex probability needs j >= 1"));
    }
    if m == 0 && j as usize > body.dimension() + 1 {
        return Err(contract("m = 0 is only allowed with j <= d + 1"));
    }
    let table = replicate(reps, 1, |r, buf, out| {
        draw(body, (j + m) as usize, seed, lane, r, buf);
        let h = hull(body, buf);
        out[0] = if (0..j as usize).all(|i| h.is_vertex(i)) { 1.0 } else { 0.0 };
    });
    Ok(MomentEstimate::from_samples(
        format!("P(first {j} of {} points are vertices)", j + m),
        seed,
        column(&table, 1, 0),
    ))
}

/// `E[(V_n / vol K)^k]`: one hull per replication, raised to the `k`-th power.
pub fn estimate_volume_moment(
    body: &ConvexBody,
    n: u64,
    k: u64,
    reps: u64,
    seed: u64,
) -> Result<MomentEstimate> {
    volume_moment_lane(body, n, k, reps, seed, 0)
}

/// `E(N_m)_(j) / (m)_(j)`.
pub fn estimate_factorial_moment(
    body: &ConvexBody,
    m: u64,
    j: u64,
    reps: u64,
    seed: u64,
) -> Result<MomentEstimate> {
    factorial_moment_lane(body, m, j, reps, seed, 0)
}

/// Frequency with which the first `j` of `j + m` points are all vertices.
pub fn estimate_vertex_prob_direct(
    body: &ConvexBody,
    m: u64,
    j: u64,
    reps: u64,
    seed: u64,
) -> Result<MomentEstimate> {
    vertex_prob_lane(body, m, j, reps, seed, 0)
}
