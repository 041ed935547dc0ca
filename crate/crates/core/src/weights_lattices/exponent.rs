use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::error::{invalid, Error, Result};

/// Relative tolerance used when comparing reciprocal exponents.
pub const RECIP_TOL: f64 = 1e-12;

/// A Lebesgue exponent in `(0, ∞]`. Infinity is an explicit variant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p > 0.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(invalid("exponent", format!("{p} is not in (0, inf]")))
        }
    }

    /// Builds the exponent with reciprocal `r >= 0`; `r = 0` gives infinity.
    pub fn from_recip(r: f64) -> Result<Self> {
        if r == 0.0 {
            Ok(Exponent::Infinity)
        } else if r.is_finite() && r > 0.0 {
            Ok(Exponent::Finite(1.0 / r))
        } else {
            Err(invalid("exponent", format!("reciprocal {r} is negative or not finite")))
        }
    }

    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// Hölder conjugate; every `p <= 1` maps to infinity.
    pub fn conjugate(self) -> Result<Self> {
        conjugate_exponent(self)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Num(p) => p,
            Raw::Text(t) => parse_exponent_value(&t).map_err(serde::de::Error::custom)?,
        };
        Exponent::new(p).map_err(serde::de::Error::custom)
    }
}

fn parse_exponent_value(t: &str) -> Result<f64> {
    let t = t.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => return Ok(f64::INFINITY),
        _ => {}
    }
    if let Some((a, b)) = t.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad exponent `{t}`")))?;
        let b: f64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad exponent `{t}`")))?;
        return Ok(a / b);
    }
    t.parse().map_err(|_| Error::Parse(format!("bad exponent `{t}`")))
}

impl std::str::FromStr for Exponent {
    type Err = Error;
    /// Accepts decimals, fractions such as `3/2`, and `inf`.
    fn from_str(s: &str) -> Result<Self> {
        Exponent::new(parse_exponent_value(s)?)
    }
}

/// Conjugate exponent: `∞ ↦ 1`, `p ↦ p/(p-1)` on `(1, ∞)`, and `(0, 1] ↦ ∞`.
pub fn conjugate_exponent(p: Exponent) -> Result<Exponent> {
    Exponent::from_recip((1.0 - p.recip()).max(0.0))
}

/// `a == b` for reciprocal sums, relative to the largest magnitude involved.
pub(crate) fn recip_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= RECIP_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Ordered exponent tuple together with the order in which axes are reduced.
///
/// `order[k]` is the original axis reduced at step `k`, using exponent `p[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedExponent {
    pub p: Vec<Exponent>,
    pub order: Vec<usize>,
}

impl MixedExponent {
    pub fn new(p: Vec<Exponent>, order: Vec<usize>) -> Result<Self> {
        if p.is_empty() {
            return Err(invalid("p", "empty exponent tuple"));
        }
        if p.len() != order.len() {
            return Err(Error::DimensionMismatch {
                context: "mixed exponent order",
                expected: p.len(),
                found: order.len(),
            });
        }
        let mut seen = vec![false; order.len()];
        for &o in &order {
            if o >= order.len() || seen[o] {
                return Err(invalid("order", format!("{order:?} is not a permutation")));
            }
            seen[o] = true;
        }
        Ok(MixedExponent { p, order })
    }

    /// Reduces axis 0 first, then axis 1, and so on.
    pub fn identity(p: Vec<Exponent>) -> Result<Self> {
        let order = (0..p.len()).collect();
        MixedExponent::new(p, order)
    }

    pub fn uniform(p: Exponent, d: usize) -> Result<Self> {
        MixedExponent::identity(vec![p; d])
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn min(&self) -> Exponent {
        *self
            .p
            .iter()
            .max_by(|a, b| a.recip().total_cmp(&b.recip()))
            .expect("non-empty")
    }

    pub fn max(&self) -> Exponent {
        *self
            .p
            .iter()
            .min_by(|a, b| a.recip().total_cmp(&b.recip()))
            .expect("non-empty")
    }

    pub fn is_identity_order(&self) -> bool {
        self.order.iter().enumerate().all(|(k, &o)| k == o)
    }
}

/// Checks `1/p2_k - 1/p1_k = 1/p + min(0, 1/q - 1)` for every `k` and
/// `q <= min p2 <= max p2 <= p`.
pub fn check_pq_conditions(
    p1: &MixedExponent,
    p2: &MixedExponent,
    p: Exponent,
    q: Exponent,
) -> Result<()> {
    if p1.dim() != p2.dim() {
        return Err(Error::DimensionMismatch {
            context: "exponent tuples",
            expected: p1.dim(),
            found: p2.dim(),
        });
    }
    if p1.order != p2.order {
        return Err(Error::ExponentRelation(
            "both tuples must use the same reduction order".into(),
        ));
    }
    let rhs = p.recip() + (q.recip() - 1.0).min(0.0);
    for (k, (a, b)) in p1.p.iter().zip(&p2.p).enumerate() {
        let lhs = b.recip() - a.recip();
        if !recip_eq(lhs, rhs) {
            return Err(Error::ExponentRelation(format!(
                "component {k}: 1/{b} - 1/{a} = {lhs} but expected {rhs}"
            )));
        }
    }
    let (lo, hi) = (p2.min(), p2.max());
    if q.recip() < lo.recip() - RECIP_TOL || hi.recip() < p.recip() - RECIP_TOL {
        return Err(Error::ExponentRelation(format!(
            "need q <= min p2 <= max p2 <= p, got q={q}, p2 in [{lo}, {hi}], p={p}"
        )));
    }
    Ok(())
}
