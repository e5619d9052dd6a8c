//! Triple order bookkeeping.
//!
//! A symbol family carries three growth exponents `(m, l, k)`: `m` at
//! semiclassical fiber infinity, `l` at the front face, `k` at the parameter
//! boundary (ordering: differential, semiclassical, parameter decay). A plain
//! parameter-dependent family has two exponents `(m, k)`; on the resolved
//! phase space it occupies the triple class `(m, m+k, k)`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Neg, Sub};

/// Triple orders `(m, l, k)` of a combined semiclassical-classical symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orders {
    /// Semiclassical differential order (growth at semiclassical fiber infinity).
    pub m: f64,
    /// Semiclassical growth order (growth at the front face).
    pub l: f64,
    /// Parameter growth order (growth at the parameter boundary).
    pub k: f64,
}

impl Orders {
    pub fn new(m: f64, l: f64, k: f64) -> Self {
        Orders { m, l, k }
    }

    pub const ZERO: Orders = Orders { m: 0.0, l: 0.0, k: 0.0 };

    pub fn is_finite(&self) -> bool {
        self.m.is_finite() && self.l.is_finite() && self.k.is_finite()
    }

    /// Componentwise `<=` with slack on the first two slots only; the
    /// parameter slot is compared with the same slack for symmetry.
    pub fn leq_within(&self, other: Orders, tol: f64) -> bool {
        self.m <= other.m + tol && self.l <= other.l + tol && self.k <= other.k + tol
    }
}

impl Add for Orders {
    type Output = Orders;
    fn add(self, o: Orders) -> Orders {
        Orders::new(self.m + o.m, self.l + o.l, self.k + o.k)
    }
}

impl Sub for Orders {
    type Output = Orders;
    fn sub(self, o: Orders) -> Orders {
        Orders::new(self.m - o.m, self.l - o.l, self.k - o.k)
    }
}

impl Neg for Orders {
    type Output = Orders;
    fn neg(self) -> Orders {
        Orders::new(-self.m, -self.l, -self.k)
    }
}

impl std::fmt::Display for Orders {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.m, self.l, self.k)
    }
}

/// Two-index orders `(m, k)` of a plain parameter-dependent family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalOrders {
    pub m: f64,
    pub k: f64,
}

impl ClassicalOrders {
    pub fn new(m: f64, k: f64) -> Self {
        ClassicalOrders { m, k }
    }
}

/// Lift two-index orders onto the resolved space: `(m, k) -> (m, m+k, k)`.
pub fn resolve_orders(c: ClassicalOrders) -> Orders {
    Orders::new(c.m, c.m + c.k, c.k)
}

/// Minimal classical differential order `m'` such that the triple class
/// `(m, l, k)` embeds into the two-index class `(m', k_target)`:
/// `m' = max(m, l - k_target)`. Requires `k_target >= k`; with
/// `k_target = k` this is the embedding exponent `m + max(l-(m+k), 0)`.
pub fn classical_membership(o: Orders, k_target: f64) -> Result<f64> {
    if k_target < o.k {
        return Err(Error::Order(format!(
            "no embedding of {} into parameter order {} (need k_target >= {})",
            o, k_target, o.k
        )));
    }
    Ok(o.m.max(o.l - k_target))
}
