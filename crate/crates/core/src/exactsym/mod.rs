//! Elementary symmetric polynomials over exact rationals.
//!
//! `σ_j(x_1, …, x_k)` is the sum over all `j`-subsets of the product of the
//! selected values. Out-of-range indices follow the usual conventions:
//! `σ_0 = 1` for every variable count (including the empty sequence), and
//! `σ_j = 0` when `j ≠ 0` and either `j < 0` or `k < j`. The same conventions
//! apply to binomial coefficients, which are `σ_j` of `k` ones.

mod poly;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

pub use poly::Poly;

/// Canonical arbitrary-precision rational (positive denominator, reduced).
pub type Rational = num_rational::BigRational;

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Serde adapter writing a [`Rational`] as the string `"p/q"` (or `"p"`).
pub mod rational_str {
    use super::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(|_| D::Error::custom(format!("bad rational {text:?}")))
    }
}

/// [`rational_str`] for sequences.
pub mod rational_vec_str {
    use super::Rational;
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&r.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|t| t.parse().map_err(|_| D::Error::custom(format!("bad rational {t:?}"))))
            .collect()
    }
}

/// Index pair `(j, k)` of `σ_j` in `k` variables. Either index may be
/// negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymIndex {
    pub j: i64,
    pub k: i64,
}

impl SymIndex {
    pub fn new(j: i64, k: i64) -> Self {
        SymIndex { j, k }
    }

    /// True when the conventions force the value without looking at the
    /// variables: `Some(1)` for `j = 0`, `Some(0)` for `j < 0` or `k < j`.
    fn conventional(&self) -> Option<bool> {
        if self.j == 0 {
            Some(true)
        } else if self.j < 0 || self.k < self.j {
            Some(false)
        } else {
            None
        }
    }

    /// `C(k, j)` under the extended conventions.
    pub fn binomial(&self) -> BigInt {
        match self.conventional() {
            Some(true) => BigInt::one(),
            Some(false) => BigInt::zero(),
            None => binomial(self.k as u64, self.j as u64),
        }
    }

    /// `σ_j(1, 2, …, k)`; for `k ≤ 0` the variable list is empty.
    pub fn sigma_of_first_integers(&self) -> Rational {
        match self.conventional() {
            Some(true) => Rational::one(),
            Some(false) => Rational::zero(),
            None => {
                let values: Vec<Rational> = (1..=self.k).map(rational).collect();
                elem_sym(&values, self.j)
            }
        }
    }
}

/// `C(n, r)` for nonnegative arguments; zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `σ_j(values)`, with the index conventions described at module level.
pub fn elem_sym(values: &[Rational], j: i64) -> Rational {
    if j == 0 {
        return Rational::one();
    }
    if j < 0 || values.len() < j as usize {
        return Rational::zero();
    }
    let j = j as usize;
    // e[t] holds σ_t of the prefix consumed so far.
    let mut e = vec![Rational::zero(); j + 1];
    e[0] = Rational::one();
    for (seen, x) in values.iter().enumerate() {
        for t in (1..=j.min(seen + 1)).rev() {
            let add = x * &e[t - 1];
            e[t] += add;
        }
    }
    e.swap_remove(j)
}

/// All of `σ_0(x+1, …, x+k), …, σ_k(x+1, …, x+k)` as polynomials in `x`,
/// built one variable at a time with
/// `σ_j(…, x+m) = (x+m) σ_{j-1}(…) + σ_j(…)`.
fn shifted_sigma_table(k: usize) -> Vec<Poly> {
    let mut row = vec![Poly::one()];
    for m in 1..=k {
        let factor = Poly::linear(rational(m as i64), Rational::one());
        let mut next = Vec::with_capacity(m + 1);
        next.push(Poly::one());
        for j in 1..=m {
            let carried = &factor * &row[j - 1];
            next.push(match row.get(j) {
                Some(p) => &carried + p,
                None => carried,
            });
        }
        row = next;
    }
    row
}

/// `σ_j(x+1, …, x+k)` expanded as a polynomial in `x`.
pub fn shifted_sigma_poly(k: usize, j: i64) -> Poly {
    match SymIndex::new(j, k as i64).conventional() {
        Some(true) => Poly::one(),
        Some(false) => Poly::zero(),
        None => shifted_sigma_table(k).swap_remove(j as usize),
    }
}

/// The decomposition
/// `Σ_{i=0..j} C(k, i) σ_{j-i}(1, …, k-i-1) σ_i(x+1, …, x+i)`,
/// expanded in `x`. Ranges `1, …, m` with `m ≤ 0` are empty.
pub fn proposition_rhs(k: usize, j: usize) -> Poly {
    let ks = k as i64;
    let mut acc = Poly::zero();
    for i in 0..=j {
        let ii = i as i64;
        let weight = Rational::from_integer(SymIndex::new(ii, ks).binomial())
            * SymIndex::new(j as i64 - ii, ks - ii - 1).sigma_of_first_integers();
        if weight.is_zero() {
            continue;
        }
        let shifted = shifted_sigma_poly(i, ii);
        acc = &acc + &shifted.scale(&weight);
    }
    acc
}

/// `∏ (t - x_i)` as a polynomial in `t`.
pub fn gen_poly(values: &[Rational]) -> Poly {
    values
        .iter()
        .fold(Poly::one(), |acc, x| &acc * &Poly::monic_root(x))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymCheck {
    pub k: usize,
    pub j: usize,
    pub pass: bool,
}

/// Outcome of an exhaustive exact sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymReport {
    pub suite: String,
    pub k_max: usize,
    pub checks: Vec<SymCheck>,
}

impl SymReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SymCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Compares `shifted_sigma_poly(k, j)` with `proposition_rhs(k, j)` for every
/// `0 ≤ j ≤ k ≤ k_max`.
pub fn verify_proposition(k_max: usize) -> Result<SymReport> {
    if k_max == 0 {
        return Err(contract("verify_proposition needs k_max >= 1"));
    }
    let mut checks = Vec::new();
    for k in 0..=k_max {
        let lhs = shifted_sigma_table(k);
        for (j, lhs_j) in lhs.iter().enumerate() {
            checks.push(SymCheck {
                k,
                j,
                pass: *lhs_j == proposition_rhs(k, j),
            });
        }
    }
    Ok(SymReport {
        suite: "proposition".into(),
        k_max,
        checks,
    })
}

/// Deterministic rational test sequence of length `k`: mixed signs,
/// fractions and repeated values, so the recurrence sees cancellation.
pub fn probe_values(k: usize) -> Vec<Rational> {
    (0..k as i64)
        .map(|i| ratio((i * 7 % 11) - 5, (i % 4) + 1))
        .collect()
}

/// Checks `σ_j(x_1..x_k) = x_k σ_{j-1}(x_1..x_{k-1}) + σ_j(x_1..x_{k-1})` on
/// [`probe_values`] for every `0 ≤ j ≤ k ≤ k_max`, including the shifted
/// polynomial form with symbolic `x`.
pub fn verify_recurrence(k_max: usize) -> SymReport {
    let mut checks = Vec::new();
    for k in 1..=k_max {
        let values = probe_values(k);
        let (head, last) = values.split_at(k - 1);
        let xk = &last[0];
        let shifted = shifted_sigma_table(k);
        let shifted_prev = shifted_sigma_table(k - 1);
        let xk_poly = Poly::linear(rational(k as i64), Rational::one());
        for j in 0..=k as i64 {
            let numeric =
                elem_sym(&values, j) == xk * elem_sym(head, j - 1) + elem_sym(head, j);
            let prev = |t: i64| -> Poly {
                if t < 0 {
                    Poly::zero()
                } else {
                    shifted_prev.get(t as usize).cloned().unwrap_or_else(Poly::zero)
                }
            };
            let symbolic = shifted[j as usize] == &(&xk_poly * &prev(j - 1)) + &prev(j);
            checks.push(SymCheck {
                k,
                j: j as usize,
                pass: numeric && symbolic,
            });
        }
    }
    SymReport {
        suite: "recurrence".into(),
        k_max,
        checks,
    }
}

/// Checks that the coefficient of `t^{k-j}` in `gen_poly` equals
/// `(-1)^j σ_j` on [`probe_values`] for every `0 ≤ j ≤ k ≤ k_max`.
pub fn verify_generating_function(k_max: usize) -> SymReport {
    let mut checks = Vec::new();
    for k in 0..=k_max {
        let values = probe_values(k);
        let g = gen_poly(&values);
        for j in 0..=k {
            let sign = if j % 2 == 0 { rational(1) } else { rational(-1) };
            checks.push(SymCheck {
                k,
                j,
                pass: g.coeff(k - j) == sign * elem_sym(&values, j as i64),
            });
        }
    }
    SymReport {
        suite: "generating-function".into(),
        k_max,
        checks,
    }
}
