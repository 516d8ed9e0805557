//! Convex bodies with closed-form volumes, uniform samplers, and convex
//! hulls in dimensions 1 to 3.

mod body;
mod hull;

pub use body::{sample_uniform, ConvexBody};
pub use hull::{convex_hull, exact_hull_volume, HullSummary};

use crate::error::{contract, Result};

pub const MAX_DIM: usize = 3;

/// A point in `R^d`, `d ≤ 3`. Unused trailing coordinates are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    coords: [f64; MAX_DIM],
    dim: u8,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(contract(format!("point dimension {} not in 1..=3", coords.len())));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(contract("point has a non-finite coordinate"));
        }
        let mut c = [0.0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Point {
            coords: c,
            dim: coords.len() as u8,
        })
    }

    pub(crate) fn from_array(coords: [f64; MAX_DIM], dim: usize) -> Self {
        Point {
            coords,
            dim: dim as u8,
        }
    }

    pub fn d1(x: f64) -> Self {
        Self::from_array([x, 0.0, 0.0], 1)
    }

    pub fn d2(x: f64, y: f64) -> Self {
        Self::from_array([x, y, 0.0], 2)
    }

    pub fn d3(x: f64, y: f64, z: f64) -> Self {
        Self::from_array([x, y, z], 3)
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    pub(crate) fn xyz(&self) -> [f64; MAX_DIM] {
        self.coords
    }
}
