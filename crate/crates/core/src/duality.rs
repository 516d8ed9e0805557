//! The binomial involution `A_k`, falling factorials, and the exact
//! identity engine linking the product form, the factorial-moment form and
//! its dual.
//!
//! With `v = (1, EV_{n+k-1}/vol, EV²_{n+k-2}/vol², …, EV^k_n/vol^k)` and
//! `n = (1, EN_{n+k}/(n+k), …, E(N_{n+k})_(k)/(n+k)_(k))`, the forward
//! identity reads `v = A_k n` and the dual reads `n = A_k v`; both follow
//! from `A_k² = I`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::exactsym::{binomial, rational, Rational};

/// `a (a-1) ⋯ (a-j+1)`; one for `j = 0`, zero for `j > a`.
pub fn falling_factorial(a: u64, j: u64) -> BigInt {
    if j > a {
        return BigInt::zero();
    }
    (a - j + 1..=a).fold(BigInt::one(), |acc, t| acc * t)
}

/// Floating counterpart of [`falling_factorial`].
pub fn falling_factorial_f64(a: u64, j: u64) -> f64 {
    if j > a {
        return 0.0;
    }
    (a - j + 1..=a).fold(1.0, |acc, t| acc * t as f64)
}

/// `(a)_(j) / (m)_(j)`, the probability that `j` specified points among `m`
/// are vertices when the hull has `a` vertices. Requires `j ≤ m`.
pub fn factorial_ratio(a: u64, m: u64, j: u64) -> Rational {
    Rational::new(falling_factorial(a, j), falling_factorial(m, j))
}

/// Floating [`factorial_ratio`], computed as a product of ratios so that
/// `a = m` gives exactly one.
pub fn factorial_ratio_f64(a: u64, m: u64, j: u64) -> f64 {
    if j > a {
        return 0.0;
    }
    (0..j).fold(1.0, |acc, t| acc * ((a - t) as f64 / (m - t) as f64))
}

fn sign(j: usize) -> i64 {
    if j.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Square matrix of big integers, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    order: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> BigInt) -> Self {
        let entries = (0..order * order).map(|t| f(t / order, t % order)).collect();
        IntMatrix { order, entries }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i, j| if i == j { BigInt::one() } else { BigInt::zero() })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.order + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.entries.chunks(self.order.max(1))
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.order != rhs.order {
            return Err(contract(format!(
                "matrix order mismatch: {} vs {}",
                self.order, rhs.order
            )));
        }
        let n = self.order;
        Ok(Self::from_fn(n, |i, l| {
            (0..n).fold(BigInt::zero(), |acc, j| acc + self.get(i, j) * rhs.get(j, l))
        }))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.order)
    }
}

/// `A_k` with entries `(-1)^j C(i, j)`, `0 ≤ i, j ≤ k`.
pub fn matrix_a(k: usize) -> IntMatrix {
    IntMatrix::from_fn(k + 1, |i, j| binomial(i as u64, j as u64) * sign(j))
}

/// Exact check that `A_k · A_k = I`.
pub fn verify_involution(k: usize) -> bool {
    let a = matrix_a(k);
    a.mul(&a).map(|sq| sq.is_identity()).unwrap_or(false)
}

/// Which side of the duality a [`MomentVector`] lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentKind {
    /// Normalized volume moments `EV^i_{n+k-i} / vol^i`.
    VolumeSide,
    /// Factorial-moment ratios `E(N_{n+k})_(i) / (n+k)_(i)`.
    VertexSide,
}

impl MomentKind {
    pub fn flipped(self) -> Self {
        match self {
            MomentKind::VolumeSide => MomentKind::VertexSide,
            MomentKind::VertexSide => MomentKind::VolumeSide,
        }
    }
}

/// Scalars a [`MomentVector`] can carry: exact rationals or floats.
pub trait MomentScalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: &BigInt) -> Self;
    fn mul_add(self, coeff: &Self, x: &Self) -> Self;
}

impl MomentScalar for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as One>::one()
    }
    fn from_int(v: &BigInt) -> Self {
        Rational::from_integer(v.clone())
    }
    fn mul_add(self, coeff: &Self, x: &Self) -> Self {
        self + coeff * x
    }
}

impl MomentScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(if v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
    }
    fn mul_add(self, coeff: &Self, x: &Self) -> Self {
        self + coeff * x
    }
}

/// A `(k+1)`-vector of moments, tagged with its side of the duality.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentVector<T> {
    pub kind: MomentKind,
    pub n: u64,
    pub k: usize,
    pub entries: Vec<T>,
}

impl<T: MomentScalar> MomentVector<T> {
    pub fn new(kind: MomentKind, n: u64, k: usize, entries: Vec<T>) -> Result<Self> {
        let v = MomentVector { kind, n, k, entries };
        v.validate()?;
        Ok(v)
    }

    /// Builds the vector from `f(i)`, `i = 1..=k`; entry 0 is fixed to one.
    pub fn from_fn(kind: MomentKind, n: u64, k: usize, f: impl Fn(usize) -> T) -> Self {
        let entries = std::iter::once(T::one()).chain((1..=k).map(f)).collect();
        MomentVector { kind, n, k, entries }
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.len() != self.k + 1 {
            return Err(contract(format!(
                "moment vector has {} entries, expected k + 1 = {}",
                self.entries.len(),
                self.k + 1
            )));
        }
        if self.entries[0] != T::one() {
            return Err(contract("moment vector entry 0 must be exactly 1"));
        }
        Ok(())
    }

    /// `A_k · self`, with the kind flipped.
    pub fn transform(&self) -> Result<Self> {
        self.validate()?;
        let a = matrix_a(self.k);
        let entries = a
            .rows()
            .map(|row| {
                row.iter()
                    .zip(&self.entries)
                    .filter(|(c, _)| !c.is_zero())
                    .fold(T::zero(), |acc, (c, x)| acc.mul_add(&T::from_int(c), x))
            })
            .collect();
        Ok(MomentVector {
            kind: self.kind.flipped(),
            n: self.n,
            k: self.k,
            entries,
        })
    }
}

/// Finitely supported law of an integer random variable, with exact
/// probabilities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteLaw {
    pub support: Vec<u64>,
    #[serde(with = "crate::exactsym::rational_vec_str")]
    pub probabilities: Vec<Rational>,
}

impl DiscreteLaw {
    pub fn new(support: Vec<u64>, probabilities: Vec<Rational>) -> Result<Self> {
        let law = DiscreteLaw {
            support,
            probabilities,
        };
        law.validate()?;
        Ok(law)
    }

    pub fn point_mass(value: u64) -> Self {
        DiscreteLaw {
            support: vec![value],
            probabilities: vec![rational(1)],
        }
    }

    /// Equal mass on each of `values`, which must be strictly increasing.
    pub fn uniform(values: &[u64]) -> Result<Self> {
        let p = Rational::new(BigInt::one(), BigInt::from(values.len().max(1)));
        Self::new(values.to_vec(), vec![p; values.len()])
    }

    pub fn validate(&self) -> Result<()> {
        if self.support.is_empty() || self.support.len() != self.probabilities.len() {
            return Err(contract("law needs matching, non-empty support and probabilities"));
        }
        if self.support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(contract("law support must be strictly increasing"));
        }
        if self.probabilities.iter().any(Signed::is_negative) {
            return Err(contract("law has a negative probability"));
        }
        let total: Rational = self.probabilities.iter().sum();
        if !total.is_one() {
            return Err(contract(format!("law probabilities sum to {total}, not 1")));
        }
        Ok(())
    }

    /// `E f(N)`, exact.
    pub fn expect(&self, f: impl Fn(u64) -> Rational) -> Result<Rational> {
        self.validate()?;
        Ok(self
            .support
            .iter()
            .zip(&self.probabilities)
            .map(|(&v, p)| p * f(v))
            .sum())
    }
}

/// Both sides of the product form and the factorial-moment form at a fixed
/// value `N` of the vertex count:
/// `∏_{i=1..k} (1 - N/(n+i))` and
/// `Σ_{j=0..k} (-1)^j C(k,j) (N)_(j) / (n+k)_(j)`.
pub fn eq2_eq3_pointwise(vertices: u64, n: u64, k: u64) -> (Rational, Rational) {
    (product_form(vertices, n, k), factorial_form(vertices, n, k))
}

pub(crate) fn product_form(vertices: u64, n: u64, k: u64) -> Rational {
    let nv = rational(vertices as i64);
    (1..=k).fold(rational(1), |acc, i| {
        acc * (rational(1) - &nv / rational((n + i) as i64))
    })
}

pub(crate) fn factorial_form(vertices: u64, n: u64, k: u64) -> Rational {
    (0..=k)
        .map(|j| {
            Rational::from_integer(binomial(k, j) * sign(j as usize))
                * factorial_ratio(vertices, n + k, j)
        })
        .sum()
}

/// Floating product form, one Monte Carlo sample of the product-form RHS.
pub fn product_form_f64(vertices: u64, n: u64, k: u64) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (1.0 - vertices as f64 / (n + i) as f64))
}

/// Floating factorial form, one Monte Carlo sample of the factorial-moment RHS.
pub fn factorial_form_f64(vertices: u64, n: u64, k: u64) -> f64 {
    (0..=k)
        .map(|j| {
            sign(j as usize) as f64
                * binomial_f64(k, j)
                * factorial_ratio_f64(vertices, n + k, j)
        })
        .sum()
}

pub fn binomial_f64(n: u64, r: u64) -> f64 {
    binomial(n, r).to_f64().unwrap_or(f64::INFINITY)
}

/// Outcome of an exact identity evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactIdentityReport {
    pub identity: String,
    pub n: u64,
    pub k: u64,
    #[serde(with = "crate::exactsym::rational_str")]
    pub lhs: Rational,
    #[serde(with = "crate::exactsym::rational_str")]
    pub rhs: Rational,
    pub pass: bool,
}

impl ExactIdentityReport {
    fn new(identity: &str, n: u64, k: u64, lhs: Rational, rhs: Rational) -> Self {
        let pass = lhs == rhs;
        ExactIdentityReport {
            identity: identity.into(),
            n,
            k,
            lhs,
            rhs,
            pass,
        }
    }
}

/// `Σ_j (-1)^j C(k,j) E(N)_(j)/(n+k)_(j)` under `law` (the law of
/// `N_{n+k}`), compared with the supplied `EV^k_n / vol^k`.
pub fn expect_identity_eq3(
    law: &DiscreteLaw,
    n: u64,
    k: u64,
    vmoment: &Rational,
) -> Result<ExactIdentityReport> {
    let rhs = law.expect(|v| factorial_form(v, n, k))?;
    Ok(ExactIdentityReport::new("factorial-eq3", n, k, vmoment.clone(), rhs))
}

/// `E ∏ (1 - N/(n+i))` under `law`, compared with `EV^k_n / vol^k`.
pub fn expect_identity_eq2(
    law: &DiscreteLaw,
    n: u64,
    k: u64,
    vmoment: &Rational,
) -> Result<ExactIdentityReport> {
    let rhs = law.expect(|v| product_form(v, n, k))?;
    Ok(ExactIdentityReport::new("product-eq2", n, k, vmoment.clone(), rhs))
}

/// The dual form: `E(N_{n+k})_(k)/(n+k)_(k)` under `law` against
/// `Σ_j (-1)^j C(k,j) vmoments[j]`, where `vmoments[j] = EV^j_{n+k-j}/vol^j`
/// (so `vmoments[0] = 1`).
pub fn expect_identity_eq4(
    law: &DiscreteLaw,
    n: u64,
    k: u64,
    vmoments: &[Rational],
) -> Result<ExactIdentityReport> {
    if vmoments.len() as u64 != k + 1 {
        return Err(contract(format!(
            "dual identity needs k + 1 = {} volume moments, got {}",
            k + 1,
            vmoments.len()
        )));
    }
    let lhs = law.expect(|v| factorial_ratio(v, n + k, k))?;
    let rhs = vmoments
        .iter()
        .enumerate()
        .map(|(j, v)| Rational::from_integer(binomial(k, j as u64) * sign(j)) * v)
        .sum();
    Ok(ExactIdentityReport::new("dual-eq4", n, k, lhs, rhs))
}

/// Checks that `1 - Σ_{j=1..k} (-1)^{j-1} C(k,j) E(N)_(j)/(n+k)_(j)` (the
/// complement of "at least one of k specified points is a vertex") equals the
/// full alternating sum from `j = 0`.
pub fn inclusion_exclusion_check(law: &DiscreteLaw, n: u64, k: u64) -> Result<bool> {
    let term = |j: u64| -> Result<Rational> {
        let c = Rational::from_integer(binomial(k, j));
        Ok(c * law.expect(|v| factorial_ratio(v, n + k, j))?)
    };
    let mut at_least_one = rational(0);
    for j in 1..=k {
        let t = term(j)?;
        if j % 2 == 1 {
            at_least_one += t;
        } else {
            at_least_one -= t;
        }
    }
    let complement = rational(1) - at_least_one;
    let full = law.expect(|v| factorial_form(v, n, k))?;
    Ok(complement == full)
}
