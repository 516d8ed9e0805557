use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{
    check_reps, column, draw, factorial_moment_lane, hull, replicate, vertex_prob_lane,
    volume_moment_lane, MomentEstimate,
};
use crate::duality::{binomial_f64, factorial_form_f64, factorial_ratio, factorial_ratio_f64, product_form_f64};
use crate::error::{contract, Error, Result};
use crate::geometry::ConvexBody;
use crate::oracle;
use crate::ARTIFACT_VERSION;

/// Which identity a report checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IdentityKind {
    /// `EV_n / vol = 1 - EN_{n+1} / (n+1)`.
    #[serde(rename = "efron-eq1")]
    EfronEq1,
    /// `EV_n^k / vol^k = E ∏_{i=1..k} (1 - N_{n+k} / (n+i))`.
    #[serde(rename = "product-eq2")]
    ProductEq2,
    /// `EV_n^k / vol^k = Σ_j (-1)^j C(k,j) E(N_{n+k})_(j) / (n+k)_(j)`.
    #[serde(rename = "factorial-eq3")]
    FactorialEq3,
    /// `E(N_{n+k})_(k) / (n+k)_(k) = Σ_j (-1)^j C(k,j) EV^j_{n+k-j} / vol^j`.
    #[serde(rename = "dual-eq4")]
    DualEq4,
    /// Probability that `j` given points of `m + j` are vertices against
    /// `E(N_{m+j})_(j) / (m+j)_(j)`.
    #[serde(rename = "thm2-direct-vs-ratio")]
    Thm2DirectVsRatio,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 5] = [
        IdentityKind::EfronEq1,
        IdentityKind::ProductEq2,
        IdentityKind::FactorialEq3,
        IdentityKind::DualEq4,
        IdentityKind::Thm2DirectVsRatio,
    ];

    pub fn label(self) -> &'static str {
        match self {
            IdentityKind::EfronEq1 => "efron-eq1",
            IdentityKind::ProductEq2 => "product-eq2",
            IdentityKind::FactorialEq3 => "factorial-eq3",
            IdentityKind::DualEq4 => "dual-eq4",
            IdentityKind::Thm2DirectVsRatio => "thm2-direct-vs-ratio",
        }
    }
}

impl fmt::Display for IdentityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for IdentityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::Parse(format!("unknown identity {s:?}")))
    }
}

/// How the two sides of an identity share randomness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Both sides evaluated on the same draw of points.
    Coupled,
    /// Each side (and each volume moment of the dual form) on its own streams.
    Independent,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coupled" => Ok(Mode::Coupled),
            "independent" => Ok(Mode::Independent),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Coupled => "coupled",
            Mode::Independent => "independent",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub n: Option<u64>,
    pub k: Option<u64>,
    pub m: Option<u64>,
    pub j: Option<u64>,
}

/// Statistical comparison of the two sides of one identity instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: IdentityKind,
    pub body: String,
    pub mode: Mode,
    pub parameters: Parameters,
    pub lhs: MomentEstimate,
    pub rhs: MomentEstimate,
    #[serde(with = "z_score_serde")]
    pub z_score: f64,
    pub tolerance_sigma: f64,
    pub pass: bool,
    pub master_seed: u64,
    pub artifact_version: String,
    /// Closed-form value of both sides, when the body admits one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_target: Option<f64>,
}

/// Absolute round-off allowance: means closer than this count as equal.
/// Sides that are deterministic up to floating evaluation (for instance a
/// factorial form that vanishes for every attainable vertex count) carry
/// noise-level standard errors that would otherwise inflate `z`.
pub const DETERMINISTIC_SLACK: f64 = 1e-12;

/// `|a - b| / √(se_a² + se_b²)`; zero when the means agree within
/// [`DETERMINISTIC_SLACK`], infinite when they differ with no spread.
pub fn z_score(lhs: &MomentEstimate, rhs: &MomentEstimate) -> f64 {
    let diff = (lhs.mean - rhs.mean).abs();
    let scale = lhs.stderr.hypot(rhs.stderr);
    if diff <= DETERMINISTIC_SLACK {
        0.0
    } else if scale > 0.0 {
        diff / scale
    } else {
        f64::INFINITY
    }
}

/// Writes an infinite z-score as the string `"inf"`, since JSON has no
/// infinity literal.
mod z_score_serde {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &f64, s: S) -> Result<S::Ok, S::Error> {
        if z.is_finite() {
            s.serialize_f64(*z)
        } else {
            s.serialize_str("inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(z) => Ok(z),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(D::Error::custom(format!("bad z_score {t:?}"))),
        }
    }
}

fn sign(j: u64) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn exact_target(body: &ConvexBody, kind: IdentityKind, n: u64, k: u64) -> Option<f64> {
    if !matches!(body, ConvexBody::Interval { .. }) {
        return None;
    }
    let value = match kind {
        IdentityKind::EfronEq1 => oracle::interval_volume_moment(n, 1),
        IdentityKind::ProductEq2 | IdentityKind::FactorialEq3 => oracle::interval_volume_moment(n, k),
        IdentityKind::DualEq4 => oracle::interval_vertex_law(n + k)
            .expect(|v| factorial_ratio(v, n + k, k))
            .ok()?,
        IdentityKind::Thm2DirectVsRatio => oracle::interval_vertex_law(n + k)
            .expect(|v| factorial_ratio(v, n + k, k))
            .ok()?,
    };
    value.to_f64()
}

/// Estimates both sides of `kind` at `(n, k)` and compares them.
///
/// For [`IdentityKind::Thm2DirectVsRatio`] the pair `(n, k)` is read as
/// `(m, j)`: `j` specified points among `m + j`.
#[allow(clippy::too_many_arguments)]
pub fn check_identity(
    body: &ConvexBody,
    kind: IdentityKind,
    n: u64,
    k: u64,
    reps: u64,
    seed: u64,
    mode: Mode,
    tolerance_sigma: f64,
) -> Result<IdentityReport> {
    check_reps(reps)?;
    if !(tolerance_sigma.is_finite() && tolerance_sigma > 0.0) {
        return Err(contract("tolerance_sigma must be positive"));
    }
    let parameters = match kind {
        IdentityKind::Thm2DirectVsRatio => {
            if k == 0 {
                return Err(contract("thm2 needs j >= 1"));
            }
            if n == 0 && k as usize > body.dimension() + 1 {
                return Err(contract("thm2 with m = 0 needs j <= d + 1"));
            }
            Parameters {
                m: Some(n),
                j: Some(k),
                ..Parameters::default()
            }
        }
        _ => {
            if n == 0 || k == 0 {
                return Err(contract(format!("{kind} needs n >= 1 and k >= 1")));
            }
            if kind == IdentityKind::EfronEq1 && k != 1 {
                return Err(contract("efron-eq1 is the k = 1 case"));
            }
            Parameters {
                n: Some(n),
                k: Some(k),
                ..Parameters::default()
            }
        }
    };

    let (lhs, rhs) = match mode {
        Mode::Coupled => coupled(body, kind, n, k, reps, seed),
        Mode::Independent => independent(body, kind, n, k, reps, seed)?,
    };
    let z = z_score(&lhs, &rhs);
    Ok(IdentityReport {
        identity: kind,
        body: body.to_string(),
        mode,
        parameters,
        lhs,
        rhs,
        z_score: z,
        tolerance_sigma,
        pass: z <= tolerance_sigma,
        master_seed: seed,
        artifact_version: ARTIFACT_VERSION.to_string(),
        exact_target: exact_target(body, kind, n, k),
    })
}

fn labels(kind: IdentityKind, n: u64, k: u64) -> (String, String) {
    match kind {
        IdentityKind::EfronEq1 => (format!("E V_{n} / vol"), format!("1 - E N_{} / {}", n + 1, n + 1)),
        IdentityKind::ProductEq2 => (
            format!("E V_{n}^{k} / vol^{k}"),
            format!("E prod_(i=1..{k}) (1 - N_{} / ({n} + i))", n + k),
        ),
        IdentityKind::FactorialEq3 => (
            format!("E V_{n}^{k} / vol^{k}"),
            format!("sum_j (-1)^j C({k},j) E (N_{})_(j) / ({})_(j)", n + k, n + k),
        ),
        IdentityKind::DualEq4 => (
            format!("E (N_{})_({k}) / ({})_({k})", n + k, n + k),
            format!("sum_j (-1)^j C({k},j) E V_({} - j)^j / vol^j", n + k),
        ),
        IdentityKind::Thm2DirectVsRatio => (
            format!("P(first {k} of {} points are vertices)", n + k),
            format!("E (N_{})_({k}) / ({})_({k})", n + k, n + k),
        ),
    }
}

/// Both sides from one draw of points per replication.
fn coupled(
    body: &ConvexBody,
    kind: IdentityKind,
    n: u64,
    k: u64,
    reps: u64,
    seed: u64,
) -> (MomentEstimate, MomentEstimate) {
    let vol = body.reference_volume();
    let total = (n + k) as usize;
    let table = replicate(reps, 2, |r, buf, out| {
        draw(body, total, seed, 0, r, buf);
        let full = hull(body, buf);
        let nv = full.vertex_count as u64;
        let vol_of = |count: usize| hull(body, &buf[..count]).volume / vol;
        let (l, rr) = match kind {
            IdentityKind::EfronEq1 => (vol_of(n as usize), 1.0 - nv as f64 / (n + 1) as f64),
            IdentityKind::ProductEq2 => (vol_of(n as usize).powi(k as i32), product_form_f64(nv, n, k)),
            IdentityKind::FactorialEq3 => (vol_of(n as usize).powi(k as i32), factorial_form_f64(nv, n, k)),
            IdentityKind::DualEq4 => {
                let rhs = 1.0
                    + (1..=k)
                        .map(|j| sign(j) * binomial_f64(k, j) * vol_of(total - j as usize).powi(j as i32))
                        .sum::<f64>();
                (factorial_ratio_f64(nv, n + k, k), rhs)
            }
            IdentityKind::Thm2DirectVsRatio => {
                let all = (0..k as usize).all(|i| full.is_vertex(i));
                (if all { 1.0 } else { 0.0 }, factorial_ratio_f64(nv, n + k, k))
            }
        };
        out[0] = l;
        out[1] = rr;
    });
    let (ll, rl) = labels(kind, n, k);
    (
        MomentEstimate::from_samples(ll, seed, column(&table, 2, 0)),
        MomentEstimate::from_samples(rl, seed, column(&table, 2, 1)),
    )
}

/// Each side on disjoint streams: lane 1 for the left side, lanes 2.. for
/// the right.
fn independent(
    body: &ConvexBody,
    kind: IdentityKind,
    n: u64,
    k: u64,
    reps: u64,
    seed: u64,
) -> Result<(MomentEstimate, MomentEstimate)> {
    let (ll, rl) = labels(kind, n, k);
    let relabel = |mut e: MomentEstimate, label: &str| {
        e.estimand = label.to_string();
        e
    };
    let per_rep = |lane: u64, f: &(dyn Fn(u64) -> f64 + Sync)| -> MomentEstimate {
        let total = (n + k) as usize;
        let table = replicate(reps, 1, |r, buf, out| {
            draw(body, total, seed, lane, r, buf);
            out[0] = f(hull(body, buf).vertex_count as u64);
        });
        MomentEstimate::from_samples(String::new(), seed, column(&table, 1, 0))
    };
    Ok(match kind {
        IdentityKind::EfronEq1 => {
            let lhs = volume_moment_lane(body, n, 1, reps, seed, 1)?;
            let en = factorial_moment_lane(body, n + 1, 1, reps, seed, 2)?;
            let rhs = MomentEstimate {
                mean: 1.0 - en.mean,
                ..en
            };
            (relabel(lhs, &ll), relabel(rhs, &rl))
        }
        IdentityKind::ProductEq2 => (
            relabel(volume_moment_lane(body, n, k, reps, seed, 1)?, &ll),
            relabel(per_rep(2, &|nv| product_form_f64(nv, n, k)), &rl),
        ),
        IdentityKind::FactorialEq3 => (
            relabel(volume_moment_lane(body, n, k, reps, seed, 1)?, &ll),
            relabel(per_rep(2, &|nv| factorial_form_f64(nv, n, k)), &rl),
        ),
        IdentityKind::DualEq4 => {
            let lhs = factorial_moment_lane(body, n + k, k, reps, seed, 1)?;
            let mut moments = Vec::with_capacity(k as usize);
            for j in 1..=k {
                moments.push(volume_moment_lane(body, n + k - j, j, reps, seed, 1 + j)?);
            }
            let one = MomentEstimate {
                estimand: "1".into(),
                mean: 1.0,
                stderr: 0.0,
                replications: reps,
                master_seed: seed,
            };
            let mut terms = vec![(1.0, &one)];
            terms.extend((1..=k).zip(&moments).map(|(j, e)| (sign(j) * binomial_f64(k, j), e)));
            let rhs = MomentEstimate::linear_combination(rl, seed, &terms);
            (relabel(lhs, &ll), rhs)
        }
        IdentityKind::Thm2DirectVsRatio => (
            relabel(vertex_prob_lane(body, n, k, reps, seed, 1)?, &ll),
            relabel(factorial_moment_lane(body, n + k, k, reps, seed, 2)?, &rl),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for kind in IdentityKind::ALL {
            assert_eq!(kind.label().parse::<IdentityKind>().unwrap(), kind);
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.label()));
        }
        assert!("eq5".parse::<IdentityKind>().is_err());
    }

    #[test]
    fn z_score_edge_cases() {
        let e = |mean, stderr| MomentEstimate {
            estimand: String::new(),
            mean,
            stderr,
            replications: 10,
            master_seed: 0,
        };
        assert!((z_score(&e(1.0, 0.3), &e(1.6, 0.4)) - 1.2).abs() < 1e-12);
        assert_eq!(z_score(&e(0.0, 0.0), &e(0.0, 0.0)), 0.0);
        assert_eq!(z_score(&e(0.0, 0.0), &e(1.0, 0.0)), f64::INFINITY);
        assert_eq!(z_score(&e(0.0, 0.0), &e(3e-17, 1e-19)), 0.0);
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        let b = ConvexBody::square();
        let run = |kind, n, k| check_identity(&b, kind, n, k, 100, 1, Mode::Coupled, 4.0);
        assert!(run(IdentityKind::ProductEq2, 0, 2).is_err());
        assert!(run(IdentityKind::FactorialEq3, 2, 0).is_err());
        assert!(run(IdentityKind::EfronEq1, 2, 2).is_err());
        assert!(run(IdentityKind::Thm2DirectVsRatio, 0, 4).is_err());
        assert!(run(IdentityKind::Thm2DirectVsRatio, 0, 3).is_ok());
        assert!(check_identity(&b, IdentityKind::EfronEq1, 2, 1, 0, 1, Mode::Coupled, 4.0).is_err());
        assert!(check_identity(&b, IdentityKind::EfronEq1, 2, 1, 10, 1, Mode::Coupled, 0.0).is_err());
    }

    #[test]
    fn infinite_z_survives_json() {
        let mut r = check_identity(&ConvexBody::unit_interval(), IdentityKind::EfronEq1, 1, 1, 10, 1, Mode::Coupled, 4.0).unwrap();
        r.z_score = f64::INFINITY;
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"z_score\":\"inf\""));
        let back: IdentityReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn interval_reports_carry_exact_target() {
        let r = check_identity(&ConvexBody::unit_interval(), IdentityKind::FactorialEq3, 3, 2, 20_000, 7, Mode::Coupled, 4.0).unwrap();
        assert_eq!(r.exact_target, Some(0.3));
        assert!(r.pass);
        assert!((r.lhs.mean - 0.3).abs() < 4.0 * r.lhs.stderr);
        assert!((r.rhs.mean - 0.3).abs() < 1e-12);
    }
}
