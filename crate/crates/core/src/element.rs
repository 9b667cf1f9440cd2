//! Arithmetic of the extended bicyclic semigroup.
//!
//! The element `a_ij` is identified with its index pair `(i, j)` in `Z²`.
//! Products never vanish, `a_ij* = a_ji`, and the idempotents are exactly the
//! diagonal elements `a_ii`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{overflow, Error, Result};

/// A lattice point `(i, j)` naming the semigroup element `a_ij`.
///
/// The derived ordering is row-major: first by `i`, then by `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub i: i64,
    pub j: i64,
}

impl Element {
    pub const fn new(i: i64, j: i64) -> Self {
        Element { i, j }
    }

    pub fn adjoint(self) -> Self {
        Element { i: self.j, j: self.i }
    }

    pub fn is_idempotent(self) -> bool {
        self.i == self.j
    }
}

impl From<(i64, i64)> for Element {
    fn from((i, j): (i64, i64)) -> Self {
        Element { i, j }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl FromStr for Element {
    type Err = Error;

    /// Parses `"(i,j)"`; whitespace is allowed anywhere between tokens.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected \"(i,j)\", got {s:?}"));
        let body = s
            .trim()
            .strip_prefix('(')
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = body.split_once(',').ok_or_else(bad)?;
        let i = a.trim().parse::<i64>().map_err(|_| bad())?;
        let j = b.trim().parse::<i64>().map_err(|_| bad())?;
        Ok(Element { i, j })
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.i, self.j].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [i, j] = <[i64; 2]>::deserialize(deserializer)?;
        Ok(Element { i, j })
    }
}

fn add(a: i64, b: i64, what: &str) -> Result<i64> {
    a.checked_add(b).ok_or_else(|| overflow(what))
}

fn sub(a: i64, b: i64, what: &str) -> Result<i64> {
    a.checked_sub(b).ok_or_else(|| overflow(what))
}

/// `a_ij · a_pq = a_{i+p-min(j,p), j+q-min(j,p)}`.
pub fn product(a: Element, b: Element) -> Result<Element> {
    let m = a.j.min(b.i);
    Ok(Element {
        i: sub(add(a.i, b.i, "product")?, m, "product")?,
        j: sub(add(a.j, b.j, "product")?, m, "product")?,
    })
}

pub fn adjoint(a: Element) -> Element {
    a.adjoint()
}

pub fn is_idempotent(a: Element) -> bool {
    a.is_idempotent()
}

/// Natural order on idempotents: `a_ii <= a_jj` iff `j <= i`.
pub fn idempotent_le(a: Element, b: Element) -> Result<bool> {
    for e in [a, b] {
        if !e.is_idempotent() {
            return Err(Error::Domain(format!("{e} is not idempotent")));
        }
    }
    Ok(b.j <= a.i)
}

/// Branch of the closed-form triple product formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TripleCase {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for TripleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TripleCase::I => "I",
            TripleCase::II => "II",
            TripleCase::III => "III",
            TripleCase::IV => "IV",
        };
        f.write_str(s)
    }
}

/// Evaluates one branch of the four-case formula for `a b* c`, returning
/// `None` when the branch condition does not hold.
pub fn triple_branch(
    case: TripleCase,
    a: Element,
    b: Element,
    c: Element,
) -> Result<Option<Element>> {
    let (i, j) = (a.i, a.j);
    let (p, q) = (b.i, b.j);
    let (r, s) = (c.i, c.j);
    const W: &str = "triple";
    let out = match case {
        TripleCase::I | TripleCase::II => {
            if q > j {
                return Ok(None);
            }
            // p + j - q
            let t = sub(add(p, j, W)?, q, W)?;
            if case == TripleCase::I {
                if r > t {
                    return Ok(None);
                }
                Element::new(i, sub(add(s, t, W)?, r, W)?)
            } else {
                if r < t {
                    return Ok(None);
                }
                Element::new(sub(add(i, r, W)?, t, W)?, s)
            }
        }
        TripleCase::III | TripleCase::IV => {
            if q < j {
                return Ok(None);
            }
            let shift = sub(q, j, W)?;
            if case == TripleCase::III {
                if r < p {
                    return Ok(None);
                }
                Element::new(sub(add(add(i, shift, W)?, r, W)?, p, W)?, s)
            } else {
                if r > p {
                    return Ok(None);
                }
                Element::new(add(i, shift, W)?, sub(add(s, p, W)?, r, W)?)
            }
        }
    };
    Ok(Some(out))
}

pub const TRIPLE_CASES: [TripleCase; 4] =
    [TripleCase::I, TripleCase::II, TripleCase::III, TripleCase::IV];

/// `a b* c` by the closed-form four-case formula. On ties the first
/// applicable branch in the order I, II, III, IV is reported.
pub fn triple(a: Element, b: Element, c: Element) -> Result<(Element, TripleCase)> {
    for case in TRIPLE_CASES {
        if let Some(e) = triple_branch(case, a, b, c)? {
            return Ok((e, case));
        }
    }
    unreachable!("the four branch conditions cover Z^6")
}

/// `a b* c` computed as two binary products.
pub fn triple_oracle(a: Element, b: Element, c: Element) -> Result<Element> {
    product(product(a, b.adjoint())?, c)
}

/// Shifts `(i, j)` to `(i + d_alpha, j + d_beta)`.
pub fn translate(a: Element, d_alpha: i64, d_beta: i64) -> Result<Element> {
    Ok(Element::new(
        add(a.i, d_alpha, "translate")?,
        add(a.j, d_beta, "translate")?,
    ))
}

/// Label of an element forced into a subsemiheap by a pair of its members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Derived {
    X1,
    X2,
    X3,
    X4,
    X5,
}

impl fmt::Display for Derived {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            Derived::X1 => 1,
            Derived::X2 => 2,
            Derived::X3 => 3,
            Derived::X4 => 4,
            Derived::X5 => 5,
        };
        write!(f, "x{n}")
    }
}

/// Elements forced by two members `a = (α, β)` and `g = (γ, δ)` with
/// `γ >= α`, `δ >= β` (the pair spans a segment of non-positive slope).
///
/// `x4` is present iff `γ-α <= δ-β` and `x5` iff `γ-α >= δ-β`; on equality
/// both are returned and coincide.
pub fn derived_pair_neg(a: Element, g: Element) -> Result<Vec<(Derived, Element)>> {
    if g.i < a.i || g.j < a.j {
        return Err(Error::Domain(format!(
            "derived_pair_neg needs g >= a componentwise, got a={a}, g={g}"
        )));
    }
    const W: &str = "derived_pair_neg";
    let (alpha, beta, gamma, delta) = (a.i, a.j, g.i, g.j);
    let h = sub(gamma, alpha, W)?;
    let b = sub(delta, beta, W)?;
    let mut out = vec![
        (Derived::X1, Element::new(add(alpha, b, W)?, add(beta, h, W)?)),
        (Derived::X2, Element::new(add(alpha, b, W)?, delta)),
        (Derived::X3, Element::new(gamma, add(beta, h, W)?)),
    ];
    if h <= b {
        out.push((Derived::X4, Element::new(gamma, add(delta, sub(b, h, W)?, W)?)));
    }
    if h >= b {
        out.push((Derived::X5, Element::new(add(gamma, sub(h, b, W)?, W)?, delta)));
    }
    Ok(out)
}

/// Elements forced by two members `a = (α, β)` and `g = (γ, δ)` with
/// `γ >= α`, `δ <= β` (positive slope).
pub fn derived_pair_pos(a: Element, g: Element) -> Result<Vec<(Derived, Element)>> {
    if g.i < a.i || g.j > a.j {
        return Err(Error::Domain(format!(
            "derived_pair_pos needs g.i >= a.i and g.j <= a.j, got a={a}, g={g}"
        )));
    }
    const W: &str = "derived_pair_pos";
    let (alpha, beta, gamma, delta) = (a.i, a.j, g.i, g.j);
    let h = sub(gamma, alpha, W)?;
    let b = sub(beta, delta, W)?;
    Ok(vec![
        (Derived::X1, Element::new(alpha, add(add(beta, h, W)?, b, W)?)),
        (Derived::X2, Element::new(add(gamma, b, W)?, beta)),
        (Derived::X3, Element::new(gamma, add(beta, h, W)?)),
        (Derived::X4, Element::new(add(add(gamma, b, W)?, h, W)?, delta)),
    ])
}
