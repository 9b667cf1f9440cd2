//! Parameter extraction, case labels and family recovery for windowed
//! subsemiheaps.
//!
//! Parameters are read off the set relative to its corner `(α₀, β₀)`, the
//! minimal row and column. A second member on row `α₀` (or column `β₀`)
//! forces both the row and the column to be unbounded, so such sets are
//! labelled `3.3.3` and matched against lattice shapes. A set missing its
//! corner is treated the same way, since a bounded row or column through the
//! corner would force the corner into the set. Otherwise the row
//! and column hold only the corner and the set is a diagonal chain,
//! possibly followed by lattice structure further down the diagonal. Every
//! candidate family is re-materialized and compared cell by cell; a mismatch
//! yields a `nonoccurring` label with the first differing cell as witness.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::element::Element;
use crate::error::{Error, Result};
use crate::family::Family;
use crate::window::{ElementSet, Window};

/// A supremum that is either attained or unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    Finite(i64),
    Inf,
}

impl Bound {
    pub fn is_inf(self) -> bool {
        matches!(self, Bound::Inf)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Inf => f.write_str("INF"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(v) => s.serialize_i64(*v),
            Bound::Inf => s.serialize_str("INF"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Bound::Finite(v)),
            Raw::Str(s) if s == "INF" => Ok(Bound::Inf),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected integer or \"INF\", got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Parameters {
    pub alpha0: i64,
    pub beta0: i64,
    /// Largest column on row `alpha0`.
    pub beta_bar: Bound,
    /// Largest row on column `beta0`.
    pub alpha_bar: Bound,
    /// Largest `k >= 0` with `(alpha0 + k, beta0 + k)` a member; `None` when
    /// no such member exists.
    pub gamma_bar: Option<Bound>,
}

impl Parameters {
    pub fn anchor(&self) -> Element {
        Element::new(self.alpha0, self.beta0)
    }

    /// The three-part scheme label: each of `beta_bar`, `alpha_bar` maps to
    /// 1 (at the corner), 2 (finite beyond it) or 3 (unbounded), and
    /// `gamma_bar` to 1 (zero or absent), 2 (finite positive) or 3.
    pub fn scheme(&self) -> String {
        let side = |b: Bound, base: i64| match b {
            Bound::Finite(v) if v == base => 1,
            Bound::Finite(_) => 2,
            Bound::Inf => 3,
        };
        let diag = match self.gamma_bar {
            None | Some(Bound::Finite(0)) => 1,
            Some(Bound::Finite(_)) => 2,
            Some(Bound::Inf) => 3,
        };
        format!(
            "{}.{}.{}",
            side(self.beta_bar, self.beta0),
            side(self.alpha_bar, self.alpha0),
            diag
        )
    }
}

/// Outcome label of a classification.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    Empty,
    Singleton,
    FiniteChain,
    ChainWithLattice,
    LatticeUnion,
    Lattice,
    /// No family matched; carries the scheme label that was attempted.
    Nonoccurring(String),
}

impl CaseLabel {
    pub fn is_nonoccurring(&self) -> bool {
        matches!(self, CaseLabel::Nonoccurring(_))
    }

    /// The label of the transposed set. Every label that can occur is
    /// symmetric; only a nonoccurring scheme swaps its first two parts.
    pub fn adjoint(&self) -> CaseLabel {
        match self {
            CaseLabel::Nonoccurring(s) => {
                let parts: Vec<&str> = s.split('.').collect();
                if parts.len() == 3 {
                    CaseLabel::Nonoccurring(format!("{}.{}.{}", parts[1], parts[0], parts[2]))
                } else {
                    self.clone()
                }
            }
            other => other.clone(),
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseLabel::Empty => f.write_str("empty"),
            CaseLabel::Singleton => f.write_str("1.1.1"),
            CaseLabel::FiniteChain => f.write_str("1.1.2"),
            CaseLabel::ChainWithLattice => f.write_str("1.1.3"),
            CaseLabel::LatticeUnion => f.write_str("3.3.3-(12)"),
            CaseLabel::Lattice => f.write_str("3.3.3-(13)"),
            CaseLabel::Nonoccurring(s) => write!(f, "nonoccurring({s})"),
        }
    }
}

impl FromStr for CaseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "empty" => CaseLabel::Empty,
            "1.1.1" => CaseLabel::Singleton,
            "1.1.2" => CaseLabel::FiniteChain,
            "1.1.3" => CaseLabel::ChainWithLattice,
            "3.3.3-(12)" => CaseLabel::LatticeUnion,
            "3.3.3-(13)" => CaseLabel::Lattice,
            _ => {
                let inner = s
                    .strip_prefix("nonoccurring(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("unknown case label {s:?}")))?;
                CaseLabel::Nonoccurring(inner.to_string())
            }
        })
    }
}

impl Serialize for CaseLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CaseLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub parameters: Option<Parameters>,
    pub case: CaseLabel,
    pub family: Option<Family>,
    pub witness: Option<Vec<Element>>,
}

/// Members of `s` on row `row`, as column indices in ascending order.
fn row_cols(s: &ElementSet, row: i64) -> Vec<i64> {
    s.iter().filter(|e| e.i == row).map(|e| e.j).collect()
}

fn col_rows(s: &ElementSet, col: i64) -> Vec<i64> {
    s.iter().filter(|e| e.j == col).map(|e| e.i).collect()
}

/// Diagonal offsets `k >= 0` with `anchor + (k, k)` in `s`, ascending.
fn diagonal_offsets(s: &ElementSet, anchor: Element) -> Vec<i64> {
    let mut ks: Vec<i64> = s
        .iter()
        .filter(|e| e.i - anchor.i == e.j - anchor.j && e.i >= anchor.i)
        .map(|e| e.i - anchor.i)
        .collect();
    ks.sort_unstable();
    ks
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// gcd of the gaps from the first entry; `None` for fewer than two entries.
fn gap_gcd(v: &[i64]) -> Option<i64> {
    let first = *v.first()?;
    let g = v[1..].iter().fold(0, |g, &x| gcd(g, x - first));
    (g > 0).then_some(g)
}

pub fn compute_parameters(s: &ElementSet) -> Result<Parameters> {
    let alpha0 = s.iter().map(|e| e.i).min().ok_or_else(|| {
        Error::Domain("parameters are undefined for the empty set".into())
    })?;
    let beta0 = s.iter().map(|e| e.j).min().expect("nonempty");
    let anchor = Element::new(alpha0, beta0);
    let has_anchor = s.contains(anchor);
    // With the corner present, a second member on its row or column forces
    // the row to be unbounded. Without the corner, a bounded row or column
    // would force the corner back into the set.
    let side = |v: &[i64], base: i64| {
        if has_anchor && v.len() == 1 {
            Bound::Finite(base)
        } else {
            Bound::Inf
        }
    };
    let beta_bar = side(&row_cols(s, alpha0), beta0);
    let alpha_bar = side(&col_rows(s, beta0), alpha0);
    let diag = diagonal_offsets(s, anchor);
    let off_diagonal = s.iter().any(|e| e.i - alpha0 != e.j - beta0);
    let gamma_bar = diag.last().map(|&k| {
        if beta_bar.is_inf() || alpha_bar.is_inf() || off_diagonal {
            Bound::Inf
        } else {
            Bound::Finite(k)
        }
    });
    Ok(Parameters { alpha0, beta0, beta_bar, alpha_bar, gamma_bar })
}

/// Period and diagonal offsets of a lattice-shaped set cornered at `anchor`,
/// read from the occupied row and column through the corner.
fn lattice_shape(s: &ElementSet, anchor: Element) -> Option<(i64, Vec<i64>)> {
    let row: Vec<i64> = row_cols(s, anchor.i).into_iter().filter(|&j| j >= anchor.j).collect();
    let col: Vec<i64> = col_rows(s, anchor.j).into_iter().filter(|&i| i >= anchor.i).collect();
    let p = match (gap_gcd(&row), gap_gcd(&col)) {
        (Some(a), Some(b)) if a != b => return None,
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return None,
    };
    let qs: Vec<i64> = diagonal_offsets(s, anchor).into_iter().filter(|&k| k < p).collect();
    Some((p, qs))
}

fn lattice_family(anchor: Element, p: i64, qs: Vec<i64>) -> Family {
    if qs == [0] {
        Family::Lattice { anchor, period: p }
    } else {
        Family::LatticeUnion { anchor, period: p, offsets: qs }
    }
}

/// Labels `s` and recovers the family it restricts from.
pub fn classify(s: &ElementSet) -> ClassificationReport {
    let Ok(params) = compute_parameters(s) else {
        return ClassificationReport {
            parameters: None,
            case: CaseLabel::Empty,
            family: None,
            witness: None,
        };
    };
    let scheme = params.scheme();
    let anchor = params.anchor();
    let fail = |witness: Vec<Element>| ClassificationReport {
        parameters: Some(params),
        case: CaseLabel::Nonoccurring(scheme.clone()),
        family: None,
        witness: Some(witness),
    };
    if !s.contains(anchor) {
        return fail(vec![anchor]);
    }

    let candidate = if params.beta_bar.is_inf() || params.alpha_bar.is_inf() {
        lattice_shape(s, anchor).map(|(p, qs)| {
            let case = if qs == [0] { CaseLabel::Lattice } else { CaseLabel::LatticeUnion };
            (case, lattice_family(anchor, p, qs))
        })
    } else {
        chain_candidate(s, anchor)
    };
    let Some((case, family)) = candidate else {
        return fail(vec![anchor]);
    };
    match s.first_difference(&family.materialize(s.window())) {
        None => ClassificationReport {
            parameters: Some(params),
            case,
            family: Some(family),
            witness: None,
        },
        Some(cell) => fail(vec![cell]),
    }
}

/// The corner's row and column hold only the corner itself.
fn chain_candidate(s: &ElementSet, anchor: Element) -> Option<(CaseLabel, Family)> {
    let rel = |e: Element| (e.i - anchor.i, e.j - anchor.j);
    let diag = diagonal_offsets(s, anchor);
    let start = s
        .iter()
        .map(rel)
        .filter(|(u, v)| u != v)
        .map(|(u, v)| u.min(v))
        .min();
    let Some(start) = start else {
        if diag.len() == 1 {
            return Some((CaseLabel::Singleton, Family::Singleton { p: anchor }));
        }
        let offsets = diag[1..].to_vec();
        return Some((
            CaseLabel::FiniteChain,
            Family::DiagonalChain { anchor, offsets, infinite: false },
        ));
    };
    let chain: Vec<i64> = diag.iter().copied().filter(|&k| k > 0 && k < start).collect();
    let sub_anchor = Element::new(anchor.i + start, anchor.j + start);
    let w = s.window();
    let sub_window = Window::new(
        sub_anchor.i,
        sub_anchor.j,
        (w.alpha + w.height as i64 - sub_anchor.i).max(1) as usize,
        (w.beta + w.width as i64 - sub_anchor.j).max(1) as usize,
    )
    .ok()?;
    let sub = s.restrict(sub_window);
    if !sub.contains(sub_anchor) {
        return None;
    }
    let (sigma, qs) = lattice_shape(&sub, sub_anchor)?;
    let family = if qs == [0] {
        Family::ChainPlusLattice { anchor, chain, start, sigma }
    } else {
        Family::ChainPlusLatticeUnion {
            anchor,
            chain,
            lattice_anchors: qs.iter().map(|q| start + q).collect(),
            sigma,
        }
    };
    Some((CaseLabel::ChainWithLattice, family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::padded_closure;

    fn e(i: i64, j: i64) -> Element {
        Element::new(i, j)
    }

    #[test]
    fn parameter_examples() {
        let w = Window::square(0, 11).unwrap();
        let lat = Family::Lattice { anchor: e(0, 0), period: 3 }.materialize(w);
        let p = compute_parameters(&lat).unwrap();
        assert_eq!((p.alpha0, p.beta0), (0, 0));
        assert_eq!((p.beta_bar, p.alpha_bar, p.gamma_bar), (Bound::Inf, Bound::Inf, Some(Bound::Inf)));

        let w9 = Window::square(0, 9).unwrap();
        let single = ElementSet::from_elements(w9, [e(2, 5)]).unwrap();
        let p = compute_parameters(&single).unwrap();
        assert_eq!((p.alpha0, p.beta0), (2, 5));
        assert_eq!((p.beta_bar, p.alpha_bar, p.gamma_bar), (Bound::Finite(5), Bound::Finite(2), Some(Bound::Finite(0))));

        let chain = ElementSet::from_elements(w9, [e(0, 0), e(1, 1), e(3, 3)]).unwrap();
        let p = compute_parameters(&chain).unwrap();
        assert_eq!((p.beta_bar, p.alpha_bar, p.gamma_bar), (Bound::Finite(0), Bound::Finite(0), Some(Bound::Finite(3))));
        assert_eq!(p.scheme(), "1.1.2");

        assert!(compute_parameters(&ElementSet::empty(w9)).is_err());
    }

    #[test]
    fn classify_examples() {
        let inner = Window::square(0, 11).unwrap();
        let s = padded_closure(&[e(0, 0), e(0, 3)], inner, 3).unwrap();
        let r = classify(&s);
        assert_eq!(r.case, CaseLabel::Lattice);
        assert_eq!(r.family, Some(Family::Lattice { anchor: e(0, 0), period: 3 }));

        let f = Family::LatticeUnion { anchor: e(0, 0), period: 3, offsets: vec![0, 1] };
        let r = classify(&f.materialize(inner));
        assert_eq!(r.case, CaseLabel::LatticeUnion);
        assert_eq!(r.family, Some(f));

        let s = ElementSet::from_elements(inner, [e(0, 0), e(1, 1), e(3, 3)]).unwrap();
        let r = classify(&s);
        assert_eq!(r.case, CaseLabel::FiniteChain);
        assert_eq!(
            r.family,
            Some(Family::DiagonalChain { anchor: e(0, 0), offsets: vec![1, 3], infinite: false })
        );

        let f = Family::ChainPlusLattice { anchor: e(0, 0), chain: vec![1], start: 3, sigma: 2 };
        let s = f.materialize(inner);
        assert_eq!(crate::closure::is_window_semiheap(&s), None);
        let r = classify(&s);
        assert_eq!(r.case, CaseLabel::ChainWithLattice);
        assert_eq!(r.family, Some(f));

        let s = ElementSet::from_elements(inner, [e(4, 4)]).unwrap();
        assert_eq!(classify(&s).case, CaseLabel::Singleton);
    }

    #[test]
    fn empty_and_failures() {
        let w = Window::square(0, 5).unwrap();
        let r = classify(&ElementSet::empty(w));
        assert_eq!(r.case, CaseLabel::Empty);
        assert_eq!(r.parameters, None);

        // Not closed: the corner (0,0) is missing.
        let s = ElementSet::from_elements(w, [e(0, 1), e(1, 0)]).unwrap();
        let r = classify(&s);
        assert!(r.case.is_nonoccurring());
        assert_eq!(r.witness, Some(vec![e(0, 0)]));

        // Row shows period 2 but column shows period 3.
        let s = ElementSet::from_elements(w, [e(0, 0), e(0, 2), e(3, 0)]).unwrap();
        assert!(classify(&s).case.is_nonoccurring());
    }

    #[test]
    fn report_json() {
        let w = Window::square(0, 8).unwrap();
        let s = Family::Lattice { anchor: e(0, 0), period: 3 }.materialize(w);
        let r = classify(&s);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["case"], "3.3.3-(13)");
        assert_eq!(json["parameters"]["beta_bar"], "INF");
        assert_eq!(json["witness"], serde_json::Value::Null);
        let back: ClassificationReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);
        let label: CaseLabel = "nonoccurring(2.1.1)".parse().unwrap();
        assert_eq!(label.to_string(), "nonoccurring(2.1.1)");
        assert_eq!(label.adjoint().to_string(), "nonoccurring(1.2.1)");
    }
}
