//! Symbolic descriptions of (possibly infinite) subsemiheaps.
//!
//! A [`Family`] is never expanded in full. Membership is decided from the
//! defining formulas and [`Family::materialize`] intersects it with a window.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::element::Element;
use crate::error::{Error, Result};
use crate::window::{ElementSet, Window};

/// One shape from the classification of subsemiheaps.
///
/// Offsets are measured along the diagonal from `anchor`: offset `k` names
/// the cell `anchor + (k, k)`. `K^σ` at a cell `c` denotes `{c + (lσ, mσ)}`
/// for `l, m >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum Family {
    Singleton {
        p: Element,
    },
    /// `anchor` together with the diagonal cells at `offsets`. The `infinite`
    /// flag marks a chain known to continue past the listed offsets; it does
    /// not change membership.
    DiagonalChain {
        anchor: Element,
        offsets: Vec<i64>,
        #[serde(default)]
        infinite: bool,
    },
    /// `anchor`, the diagonal cells at `chain`, and `K^sigma` at offset `start`.
    ChainPlusLattice {
        anchor: Element,
        chain: Vec<i64>,
        start: i64,
        sigma: i64,
    },
    /// `anchor`, the diagonal cells at `chain`, and `K^sigma` at each of
    /// `lattice_anchors`.
    ChainPlusLatticeUnion {
        anchor: Element,
        chain: Vec<i64>,
        lattice_anchors: Vec<i64>,
        sigma: i64,
    },
    /// `K^period` at `anchor`.
    Lattice {
        anchor: Element,
        period: i64,
    },
    /// Union of `K^period` at each diagonal offset in `offsets ⊂ [0, period)`.
    LatticeUnion {
        anchor: Element,
        period: i64,
        offsets: Vec<i64>,
    },
    /// The diagonal cells at `offsets`, which need not contain 0.
    DiagonalSubset {
        anchor: Element,
        offsets: Vec<i64>,
    },
    /// `{(p, q) : p >= i, q >= j}`.
    CornerIdeal {
        i: i64,
        j: i64,
    },
}

fn strictly_ascending(v: &[i64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// `(u, v)` lies in `K^sigma` at diagonal offset `k`.
fn in_lattice(u: i128, v: i128, k: i128, sigma: i128) -> bool {
    u >= k && v >= k && (u - k) % sigma == 0 && (v - k) % sigma == 0
}

fn sorted_dedup(v: &[i64]) -> Vec<i64> {
    let mut out = v.to_vec();
    out.sort_unstable();
    out.dedup();
    out
}

impl Family {
    pub fn anchor(&self) -> Element {
        match self {
            Family::Singleton { p } => *p,
            Family::CornerIdeal { i, j } => Element::new(*i, *j),
            Family::DiagonalChain { anchor, .. }
            | Family::ChainPlusLattice { anchor, .. }
            | Family::ChainPlusLatticeUnion { anchor, .. }
            | Family::Lattice { anchor, .. }
            | Family::LatticeUnion { anchor, .. }
            | Family::DiagonalSubset { anchor, .. } => *anchor,
        }
    }

    /// Checks the structural invariants of each variant.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Domain(format!("{}: {msg}", self.name())));
        match self {
            Family::Singleton { .. } | Family::CornerIdeal { .. } => Ok(()),
            Family::DiagonalChain { offsets, .. } => {
                if !strictly_ascending(offsets) || offsets.first().is_some_and(|&k| k < 1) {
                    return fail("offsets must be strictly ascending and positive".into());
                }
                Ok(())
            }
            Family::DiagonalSubset { offsets, .. } => {
                if offsets.iter().any(|&k| k < 0) {
                    return fail("offsets must be non-negative".into());
                }
                Ok(())
            }
            Family::Lattice { period, .. } => {
                if *period < 1 {
                    return fail(format!("period must be >= 1, got {period}"));
                }
                Ok(())
            }
            Family::LatticeUnion { period, offsets, .. } => {
                if *period < 1 {
                    return fail(format!("period must be >= 1, got {period}"));
                }
                if offsets.is_empty()
                    || !strictly_ascending(offsets)
                    || offsets.iter().any(|&q| q < 0 || q >= *period)
                {
                    return fail("offsets must be nonempty, strictly ascending, in [0, period)".into());
                }
                Ok(())
            }
            Family::ChainPlusLattice { chain, start, sigma, .. } => {
                Self::check_chain(chain, *start, *sigma).or_else(fail)
            }
            Family::ChainPlusLatticeUnion { chain, lattice_anchors, sigma, .. } => {
                if lattice_anchors.is_empty() || !strictly_ascending(lattice_anchors) {
                    return fail("lattice anchors must be nonempty and strictly ascending".into());
                }
                Self::check_chain(chain, lattice_anchors[0], *sigma).or_else(fail)
            }
        }
    }

    fn check_chain(chain: &[i64], start: i64, sigma: i64) -> std::result::Result<(), String> {
        if sigma < 1 {
            return Err(format!("sigma must be >= 1, got {sigma}"));
        }
        if start < 1 {
            return Err(format!("lattice start must be >= 1, got {start}"));
        }
        if !strictly_ascending(chain) || chain.first().is_some_and(|&k| k < 1) {
            return Err("chain offsets must be strictly ascending and positive".into());
        }
        if chain.last().is_some_and(|&k| k >= start) {
            return Err("chain offsets must lie below the lattice start".into());
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Singleton { .. } => "Singleton",
            Family::DiagonalChain { .. } => "DiagonalChain",
            Family::ChainPlusLattice { .. } => "ChainPlusLattice",
            Family::ChainPlusLatticeUnion { .. } => "ChainPlusLatticeUnion",
            Family::Lattice { .. } => "Lattice",
            Family::LatticeUnion { .. } => "LatticeUnion",
            Family::DiagonalSubset { .. } => "DiagonalSubset",
            Family::CornerIdeal { .. } => "CornerIdeal",
        }
    }

    pub fn contains(&self, e: Element) -> bool {
        let a = self.anchor();
        let u = e.i as i128 - a.i as i128;
        let v = e.j as i128 - a.j as i128;
        let on_diag = |ks: &[i64]| u == v && ks.iter().any(|&k| k as i128 == u);
        match self {
            Family::Singleton { .. } => u == 0 && v == 0,
            Family::CornerIdeal { .. } => u >= 0 && v >= 0,
            Family::DiagonalChain { offsets, .. } => (u == 0 && v == 0) || on_diag(offsets),
            Family::DiagonalSubset { offsets, .. } => on_diag(offsets),
            Family::Lattice { period, .. } => in_lattice(u, v, 0, *period as i128),
            Family::LatticeUnion { period, offsets, .. } => offsets
                .iter()
                .any(|&q| in_lattice(u, v, q as i128, *period as i128)),
            Family::ChainPlusLattice { chain, start, sigma, .. } => {
                (u == 0 && v == 0)
                    || on_diag(chain)
                    || in_lattice(u, v, *start as i128, *sigma as i128)
            }
            Family::ChainPlusLatticeUnion { chain, lattice_anchors, sigma, .. } => {
                (u == 0 && v == 0)
                    || on_diag(chain)
                    || lattice_anchors
                        .iter()
                        .any(|&k| in_lattice(u, v, k as i128, *sigma as i128))
            }
        }
    }

    /// The members of the family inside `w`.
    pub fn materialize(&self, w: Window) -> ElementSet {
        ElementSet::clipped(w, w.cells().filter(|&e| self.contains(e)))
    }

    fn with_anchor(&self, anchor: Element) -> Family {
        let mut f = self.clone();
        match &mut f {
            Family::Singleton { p } => *p = anchor,
            Family::CornerIdeal { i, j } => {
                *i = anchor.i;
                *j = anchor.j;
            }
            Family::DiagonalChain { anchor: a, .. }
            | Family::ChainPlusLattice { anchor: a, .. }
            | Family::ChainPlusLatticeUnion { anchor: a, .. }
            | Family::Lattice { anchor: a, .. }
            | Family::LatticeUnion { anchor: a, .. }
            | Family::DiagonalSubset { anchor: a, .. } => *a = anchor,
        }
        f
    }

    pub fn translate(&self, d_alpha: i64, d_beta: i64) -> Result<Family> {
        let a = crate::element::translate(self.anchor(), d_alpha, d_beta)?;
        Ok(self.with_anchor(a))
    }

    /// Every variant is symmetric about its anchor, so transposing the set
    /// transposes the anchor and keeps all other parameters.
    pub fn adjoint(&self) -> Family {
        self.with_anchor(self.anchor().adjoint())
    }

    /// A normal form under which equal sets of the same shape compare equal:
    /// corner ideals become period-1 lattices, diagonal subsets and lattice
    /// unions are re-anchored at their first diagonal cell, and degenerate
    /// chains and unions collapse to the simpler variant.
    pub fn canonicalize(&self) -> Family {
        match self {
            Family::CornerIdeal { i, j } => {
                Family::Lattice { anchor: Element::new(*i, *j), period: 1 }
            }
            Family::DiagonalChain { anchor, offsets, infinite } => {
                let offsets: Vec<i64> = sorted_dedup(offsets).into_iter().filter(|&k| k != 0).collect();
                if offsets.is_empty() && !infinite {
                    Family::Singleton { p: *anchor }
                } else {
                    Family::DiagonalChain { anchor: *anchor, offsets, infinite: *infinite }
                }
            }
            Family::DiagonalSubset { anchor, offsets } => {
                let js = sorted_dedup(offsets);
                let Some(&k0) = js.first() else {
                    return self.clone();
                };
                let anchor = Element::new(anchor.i + k0, anchor.j + k0);
                Family::DiagonalChain {
                    anchor,
                    offsets: js[1..].iter().map(|k| k - k0).collect(),
                    infinite: false,
                }
                .canonicalize()
            }
            Family::LatticeUnion { anchor, period, offsets } => {
                let qs = sorted_dedup(offsets);
                let Some(&q0) = qs.first() else {
                    return self.clone();
                };
                let anchor = Element::new(anchor.i + q0, anchor.j + q0);
                if qs.len() == 1 {
                    Family::Lattice { anchor, period: *period }
                } else {
                    Family::LatticeUnion {
                        anchor,
                        period: *period,
                        offsets: qs.iter().map(|q| q - q0).collect(),
                    }
                }
            }
            Family::ChainPlusLatticeUnion { anchor, chain, lattice_anchors, sigma } => {
                let ks = sorted_dedup(lattice_anchors);
                if ks.len() == 1 {
                    Family::ChainPlusLattice {
                        anchor: *anchor,
                        chain: sorted_dedup(chain),
                        start: ks[0],
                        sigma: *sigma,
                    }
                } else {
                    Family::ChainPlusLatticeUnion {
                        anchor: *anchor,
                        chain: sorted_dedup(chain),
                        lattice_anchors: ks,
                        sigma: *sigma,
                    }
                }
            }
            Family::ChainPlusLattice { anchor, chain, start, sigma } => Family::ChainPlusLattice {
                anchor: *anchor,
                chain: sorted_dedup(chain),
                start: *start,
                sigma: *sigma,
            },
            Family::Singleton { .. } | Family::Lattice { .. } => self.clone(),
        }
    }
}

fn list(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("[{}]", parts.join(","))
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Singleton { p } => write!(f, "Singleton {p}"),
            Family::CornerIdeal { i, j } => write!(f, "CornerIdeal ({i},{j})"),
            Family::DiagonalChain { anchor, offsets, infinite } => {
                write!(f, "DiagonalChain at {anchor} offsets={}", list(offsets))?;
                if *infinite {
                    write!(f, " (infinite)")?;
                }
                Ok(())
            }
            Family::DiagonalSubset { anchor, offsets } => {
                write!(f, "DiagonalSubset at {anchor} offsets={}", list(offsets))
            }
            Family::Lattice { anchor, period } => write!(f, "Lattice at {anchor} p={period}"),
            Family::LatticeUnion { anchor, period, offsets } => {
                write!(f, "LatticeUnion at {anchor} p={period} q={}", list(offsets))
            }
            Family::ChainPlusLattice { anchor, chain, start, sigma } => write!(
                f,
                "ChainPlusLattice at {anchor} chain={} start={start} sigma={sigma}",
                list(chain)
            ),
            Family::ChainPlusLatticeUnion { anchor, chain, lattice_anchors, sigma } => write!(
                f,
                "ChainPlusLatticeUnion at {anchor} chain={} lattice_anchors={} sigma={sigma}",
                list(chain),
                list(lattice_anchors)
            ),
        }
    }
}
