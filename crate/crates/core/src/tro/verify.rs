//! Linear combinations of represented elements, the coefficient-dropping
//! projection onto a subsemiheap, and the numerical checks built on them.

use std::collections::HashSet;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{act, rep_matrix, truncated_rep, BasisIndexer, SparseMatrix};
use super::norm::{op_norm, DEFAULT_TOL};
use crate::element::Element;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub re: f64,
    pub im: f64,
    pub element: Element,
}

impl Term {
    pub fn new(coeff: Complex64, element: Element) -> Self {
        Term { re: coeff.re, im: coeff.im, element }
    }

    pub fn coeff(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `Σ λ_k π(x_k)` with distinct `x_k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OperatorCombo {
    terms: Vec<Term>,
}

impl OperatorCombo {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        let mut seen = HashSet::new();
        for t in &terms {
            if !seen.insert(t.element) {
                return Err(Error::Combo(format!("element {} appears twice", t.element)));
            }
        }
        Ok(OperatorCombo { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `Σ λ_k π(x_k)` on the grid of half-width `n`.
pub fn assemble(combo: &OperatorCombo, n: i64) -> Result<SparseMatrix> {
    let dim = BasisIndexer::new(n)?.dim();
    let mut m = SparseMatrix::zeros(dim);
    for t in combo.terms() {
        m.add_scaled(t.coeff(), &rep_matrix(t.element, n)?);
    }
    Ok(m)
}

/// Keeps exactly the terms whose element satisfies `member`.
pub fn phi0(combo: &OperatorCombo, member: impl Fn(Element) -> bool) -> OperatorCombo {
    OperatorCombo { terms: combo.terms.iter().copied().filter(|t| member(t.element)).collect() }
}

pub const CONTRACTION_SLACK: f64 = 1e-6;
const MAX_TERMS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionFailure {
    pub combo: OperatorCombo,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub trials: usize,
    pub passes: usize,
    /// Largest `b / a` over trials with `a > 0`.
    pub max_ratio: f64,
    pub failures: Vec<ContractionFailure>,
    /// Trials where `‖Xξ‖²` differs from `Σ |λ_k|² ‖π(x_k)ξ‖²` for a random
    /// unit vector `ξ`.
    pub sum_identity_mismatches: usize,
    /// Norm estimates that hit the iteration cap.
    pub unconverged: usize,
}

impl ContractionReport {
    pub fn all_passed(&self) -> bool {
        self.passes == self.trials
    }
}

/// Draws the combination used by trial `trial`.
pub fn random_combo(n: i64, seed: u64, trial: u64) -> OperatorCombo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let h = n / 2;
    let cells = ((2 * h + 1) * (2 * h + 1)) as usize;
    let k = rng.gen_range(1..=MAX_TERMS.min(cells));
    let mut seen = HashSet::new();
    let mut terms = Vec::with_capacity(k);
    while terms.len() < k {
        let x = Element::new(rng.gen_range(-h..=h), rng.gen_range(-h..=h));
        if seen.insert(x) {
            let c = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            terms.push(Term::new(c, x));
        }
    }
    OperatorCombo { terms }
}

fn sum_identity_holds(combo: &OperatorCombo, m: &SparseMatrix, n: i64, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi: Vec<Complex64> = (0..m.dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); m.dim];
    m.mul_vec(&xi, &mut out);
    let lhs: f64 = out.iter().map(|v| v.norm_sqr()).sum();
    let mut rhs = 0.0;
    for t in combo.terms() {
        let single = rep_matrix(t.element, n)?.to_matrix();
        single.mul_vec(&xi, &mut out);
        rhs += t.coeff().norm_sqr() * out.iter().map(|v| v.norm_sqr()).sum::<f64>();
    }
    Ok((lhs - rhs).abs() <= 1e-9 * lhs.max(rhs).max(1.0))
}

/// Checks `‖Φ₀ X‖ <= ‖X‖ (1 + 10⁻⁶)` on `trials` random combinations `X`
/// of at most eight distinct elements of `[-n/2, n/2]²` with coefficients in
/// the complex unit box. Trial `t` draws from stream `t` of a ChaCha8
/// generator seeded with `seed`, so results do not depend on scheduling.
pub fn verify_contraction(
    member: impl Fn(Element) -> bool + Sync,
    trials: usize,
    n: i64,
    seed: u64,
) -> Result<ContractionReport> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    BasisIndexer::new(n)?;
    let max_iter = 2000;
    struct Outcome {
        a: f64,
        b: f64,
        combo: OperatorCombo,
        identity: bool,
        unconverged: usize,
    }
    let outcomes: Vec<Outcome> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Outcome> {
            let combo = random_combo(n, seed, t as u64);
            let x = assemble(&combo, n)?;
            let projected = phi0(&combo, &member);
            let px = assemble(&projected, n)?;
            let a = op_norm(&x, DEFAULT_TOL, max_iter);
            let b = op_norm(&px, DEFAULT_TOL, max_iter);
            let identity = sum_identity_holds(&combo, &x, n, seed ^ (t as u64).wrapping_mul(0x9e37_79b9))?;
            Ok(Outcome {
                a: a.value,
                b: b.value,
                combo,
                identity,
                unconverged: usize::from(!a.converged) + usize::from(!b.converged),
            })
        })
        .collect::<Result<_>>()?;

    let mut report = ContractionReport {
        trials,
        passes: 0,
        max_ratio: 0.0,
        failures: Vec::new(),
        sum_identity_mismatches: 0,
        unconverged: 0,
    };
    for o in outcomes {
        if o.a > 0.0 {
            report.max_ratio = report.max_ratio.max(o.b / o.a);
        }
        if o.b <= o.a * (1.0 + CONTRACTION_SLACK) {
            report.passes += 1;
        } else {
            report.failures.push(ContractionFailure { combo: o.combo, a: o.a, b: o.b });
        }
        report.sum_identity_mismatches += usize::from(!o.identity);
        report.unconverged += o.unconverged;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub element: Element,
    pub n: i64,
    /// Columns whose images under `V`, `V*` and `V` all stay on the grid.
    pub safe_columns: usize,
    pub mismatches: usize,
    pub warning: Option<String>,
}

impl IsometryReport {
    pub fn exact(&self) -> bool {
        self.mismatches == 0
    }
}

/// Checks `V V* V = V` for `V = π(x)` on every truncation-safe column.
pub fn verify_partial_isometry(x: Element, n: i64) -> Result<IsometryReport> {
    let ix = BasisIndexer::new(n)?;
    let v = truncated_rep(x, ix);
    let vt = v.transpose();
    let vvv = v.compose(&vt.compose(&v));
    let mut safe = 0;
    let mut mismatches = 0;
    for s in 0..ix.dim() {
        let Some(img) = act(x, ix.label(s)) else {
            continue;
        };
        if !ix.on_grid(img) {
            continue;
        }
        safe += 1;
        if vvv.image(s) != v.image(s) {
            mismatches += 1;
        }
    }
    let warning = (safe == 0).then(|| "0 safe columns; the check is vacuous".to_string());
    Ok(IsometryReport { element: x, n, safe_columns: safe, mismatches, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Family;
    use crate::tro::norm::dense_norm;

    fn e(i: i64, j: i64) -> Element {
        Element::new(i, j)
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn phi0_examples() {
        let corner = Family::CornerIdeal { i: 0, j: 0 };
        let c = OperatorCombo::new(vec![
            Term::new(one(), e(0, 0)),
            Term::new(Complex64::new(2.0, 0.0), e(-1, -1)),
        ])
        .unwrap();
        let p = phi0(&c, |x| corner.contains(x));
        assert_eq!(p.terms(), &[Term::new(one(), e(0, 0))]);
        assert_eq!(phi0(&p, |x| corner.contains(x)), p);
        assert_eq!(phi0(&c, |_| true), c);
        assert!(phi0(&c, |_| false).is_empty());
    }

    #[test]
    fn duplicate_terms_rejected() {
        let r = OperatorCombo::new(vec![Term::new(one(), e(0, 0)), Term::new(one(), e(0, 0))]);
        assert!(matches!(r, Err(Error::Combo(_))));
    }

    #[test]
    fn assemble_projection() {
        let c = OperatorCombo::new(vec![Term::new(one(), e(0, 0))]).unwrap();
        let m = assemble(&c, 1).unwrap();
        assert_eq!(m.nnz(), 6);
        let empty = assemble(&OperatorCombo::default(), 3).unwrap();
        assert_eq!(op_norm(&empty, DEFAULT_TOL, 10).value, 0.0);
    }

    /// Dropping the term outside the corner ideal doubles the norm:
    /// `P_{>=-1} - 2 P_{>=0} + 2 P_{>=1}` acts on rows as `1, -1, 1, ...`,
    /// while `-2 P_{>=0} + 2 P_{>=1}` has the value `-2` on row 0.
    #[test]
    fn projection_can_expand_norm() {
        let n = 4;
        let c = OperatorCombo::new(vec![
            Term::new(one(), e(-1, -1)),
            Term::new(Complex64::new(-2.0, 0.0), e(0, 0)),
            Term::new(Complex64::new(2.0, 0.0), e(1, 1)),
        ])
        .unwrap();
        let corner = Family::CornerIdeal { i: 0, j: 0 };
        let a = dense_norm(&assemble(&c, n).unwrap());
        let b = dense_norm(&assemble(&phi0(&c, |x| corner.contains(x)), n).unwrap());
        assert!((a - 1.0).abs() < 1e-12);
        assert!((b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn contraction_trivial_cases() {
        let single = Family::Singleton { p: e(5, 5) };
        let r = verify_contraction(|x| single.contains(x), 10, 20, 1).unwrap();
        assert!(r.all_passed());
        let all = verify_contraction(|_| true, 5, 10, 3).unwrap();
        assert!(all.all_passed());
        assert!((all.max_ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn trials_are_reproducible() {
        assert_eq!(random_combo(40, 42, 7), random_combo(40, 42, 7));
        assert_ne!(random_combo(40, 42, 7), random_combo(40, 42, 8));
        for t in 0..50 {
            let c = random_combo(40, 1, t);
            assert!((1..=8).contains(&c.len()));
            assert!(c.terms().iter().all(|x| x.element.i.abs() <= 20 && x.element.j.abs() <= 20));
        }
    }

    #[test]
    fn isometry_examples() {
        let r = verify_partial_isometry(e(0, 0), 8).unwrap();
        assert!(r.exact() && r.safe_columns > 0);
        let r = verify_partial_isometry(e(2, 5), 16).unwrap();
        assert!(r.exact());
        assert_eq!(r.safe_columns, 12 * 33);
        let r = verify_partial_isometry(e(9, 0), 4).unwrap();
        assert_eq!(r.safe_columns, 0);
        assert!(r.exact() && r.warning.is_some());
    }
}
