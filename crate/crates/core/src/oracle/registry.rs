//! Registry of planar reference constants.
//!
//! Stored as UTF-8 text, one record per line:
//! `key<TAB>value<TAB>provenance<TAB>detail`, where `key` is
//! `body/quantity`. Lines starting with `#` are comments; the first one
//! carries the format version.

use std::sync::OnceLock;

use super::{
    expected_triangle_area_ratio, interval_volume_moment, OracleNumber, OracleValue, Provenance,
};
use crate::error::{Error, Result};
use crate::exactsym::Rational;
use crate::geometry::ConvexBody;
use crate::montecarlo::estimate_volume_moment;

pub const REGISTRY_TSV: &str = include_str!("../../data/planar_reference.tsv");
pub const REGISTRY_HEADER: &str = "# efron-dual planar reference registry, format 1";

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Registry {
    entries: Vec<OracleValue>,
}

fn parse_provenance(s: &str) -> Result<Provenance> {
    match s {
        "closed-form" => Ok(Provenance::ClosedForm),
        "brute-force" => Ok(Provenance::BruteForce),
        "high-rep-simulation" => Ok(Provenance::HighRepSimulation),
        _ => Err(Error::Parse(format!("unknown provenance {s:?}"))),
    }
}

impl Registry {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [key, value, provenance, detail] = fields[..] else {
                return Err(Error::Parse(format!("registry line {}: expected 4 fields", lineno + 1)));
            };
            let provenance = parse_provenance(provenance)?;
            let value = if provenance == Provenance::ClosedForm {
                OracleNumber::Exact(
                    value
                        .parse::<Rational>()
                        .map_err(|_| Error::Parse(format!("bad rational {value:?}")))?,
                )
            } else {
                OracleNumber::Real(
                    value
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number {value:?}")))?,
                )
            };
            entries.push(OracleValue {
                label: key.to_string(),
                value,
                provenance,
                detail: detail.to_string(),
            });
        }
        Ok(Registry { entries })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("{REGISTRY_HEADER}\n");
        for e in &self.entries {
            let value = match &e.value {
                OracleNumber::Exact(r) => r.to_string(),
                OracleNumber::Real(x) => format!("{x:.6}"),
            };
            out.push_str(&format!("{}\t{}\t{}\t{}\n", e.label, value, e.provenance.label(), e.detail));
        }
        out
    }

    pub fn get(&self, body: &str, quantity: &str) -> Result<&OracleValue> {
        let key = format!("{body}/{quantity}");
        self.entries
            .iter()
            .find(|e| e.label == key)
            .ok_or(Error::UnknownKey(key))
    }

    pub fn entries(&self) -> &[OracleValue] {
        &self.entries
    }

    pub fn insert(&mut self, value: OracleValue) {
        self.entries.retain(|e| e.label != value.label);
        self.entries.push(value);
    }

    /// The registry shipped with the crate.
    pub fn builtin() -> &'static Registry {
        static CELL: OnceLock<Registry> = OnceLock::new();
        CELL.get_or_init(|| Registry::parse(REGISTRY_TSV).expect("shipped registry parses"))
    }
}

/// Looks up `(body, quantity)` in the shipped registry.
pub fn planar_reference(body: &str, quantity: &str) -> Result<OracleValue> {
    Registry::builtin().get(body, quantity).cloned()
}

/// Half a unit in the third significant digit of `reference`.
pub fn three_figure_tolerance(reference: f64) -> f64 {
    0.5 * 10f64.powf(reference.abs().log10().floor() - 2.0)
}

/// Result of computing one planar constant two ways.
#[derive(Clone, Debug, PartialEq)]
pub struct DualComputation {
    pub quadrature: f64,
    pub simulation: f64,
    pub simulation_stderr: f64,
    pub agree: bool,
    pub value: OracleValue,
}

/// Computes `E V_3 / vol K` for a planar body by Gauss–Legendre quadrature
/// and by simulation; the value is registrable when both agree to three
/// significant figures.
pub fn compute_ev3_ratio(
    name: &str,
    body: &ConvexBody,
    nodes: usize,
    reps: u64,
    seed: u64,
) -> Result<DualComputation> {
    let polygon: Vec<[f64; 2]> = match body {
        ConvexBody::Polygon { vertices } => vertices.clone(),
        ConvexBody::Simplex { dim: 2, vertices } => vertices.iter().map(|v| [v[0], v[1]]).collect(),
        ConvexBody::Cube { dim: 2, side } => vec![[0.0, 0.0], [*side, 0.0], [*side, *side], [0.0, *side]],
        _ => return Err(Error::Contract(format!("{name} is not a polygonal planar body"))),
    };
    let quadrature = expected_triangle_area_ratio(&polygon, nodes);
    let sim = estimate_volume_moment(body, 3, 1, reps, seed)?;
    let agree = (quadrature - sim.mean).abs() <= three_figure_tolerance(quadrature);
    let value = OracleValue {
        label: format!("{name}/EV3/vol"),
        value: OracleNumber::Real(quadrature),
        provenance: Provenance::BruteForce,
        detail: format!(
            "gauss-legendre {nodes}x{nodes} per fan triangle: {quadrature:.6}; simulation {reps} reps seed {seed}: {:.6} +- {:.6}",
            sim.mean, sim.stderr
        ),
    };
    Ok(DualComputation {
        quadrature,
        simulation: sim.mean,
        simulation_stderr: sim.stderr,
        agree,
        value,
    })
}

/// Closed-form interval entry `E V_2 / vol = 1/3`.
pub fn interval_ev2_entry() -> OracleValue {
    OracleValue {
        label: "interval/EV2/vol".into(),
        value: OracleNumber::Exact(interval_volume_moment(2, 1)),
        provenance: Provenance::ClosedForm,
        detail: "range of 2 uniforms is Beta(1,2)".into(),
    }
}
