//! Window-clipped saturation under the triple product.
//!
//! Every triple `x y* z` factors as `w z` with `w = x y*`. Left
//! multiplication by `w = (A, B)` acts on a whole row at once: rows `r >= B`
//! are translated to row `r + A - B`, and rows `r < B` collapse onto row `A`
//! shifted right by `B - r`. The saturation loop therefore tracks the set of
//! multipliers `w` seen so far and applies each new one to every member as
//! a handful of word operations per row.

use serde::{Deserialize, Serialize};

use crate::element::{triple, Element};
use crate::error::{Error, Result};
use crate::window::{ElementSet, Window};

/// A triple whose product lands in the window but outside the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub x: Element,
    pub y: Element,
    pub z: Element,
    pub result: Element,
}

struct Engine {
    ws: Window,
    words: usize,
    grid: Vec<u64>,
    members: Vec<Element>,
    // Multipliers x y*, indexed over [alpha, alpha + h + w - 1)² .
    mult_side: usize,
    mult_seen: Vec<bool>,
    mults: Vec<Element>,
}

impl Engine {
    fn new(ws: Window) -> Self {
        let words = ws.width.div_ceil(64);
        let mult_side = ws.height + ws.width - 1;
        Engine {
            ws,
            words,
            grid: vec![0; words * ws.height],
            members: Vec::new(),
            mult_side,
            mult_seen: vec![false; mult_side * mult_side],
            mults: Vec::new(),
        }
    }

    fn insert(&mut self, e: Element) -> bool {
        let Some((r, c)) = self.ws.local(e) else {
            return false;
        };
        let word = &mut self.grid[r * self.words + c / 64];
        let bit = 1u64 << (c % 64);
        if *word & bit != 0 {
            return false;
        }
        *word |= bit;
        self.members.push(e);
        true
    }

    fn note_mult(&mut self, w: Element, fresh: &mut Vec<Element>) {
        let r = (w.i - self.ws.alpha) as usize;
        let c = (w.j - self.ws.alpha) as usize;
        debug_assert!(r < self.mult_side && c < self.mult_side);
        let k = r * self.mult_side + c;
        if !self.mult_seen[k] {
            self.mult_seen[k] = true;
            self.mults.push(w);
            fresh.push(w);
        }
    }

    /// Inserts `w z` for every current member `z`.
    fn apply_to_all(&mut self, w: Element, buf: &mut [u64]) {
        let (a, b) = (w.i, w.j);
        let h = self.ws.height as i64;
        for r in 0..self.ws.height {
            let src = &self.grid[r * self.words..(r + 1) * self.words];
            if src.iter().all(|&x| x == 0) {
                continue;
            }
            let row = self.ws.alpha + r as i64;
            let (target, shift) = if row >= b {
                (row + a - b, 0usize)
            } else {
                (a, (b - row) as usize)
            };
            let t = target - self.ws.alpha;
            if t < 0 || t >= h || shift >= self.ws.width {
                continue;
            }
            shift_left_into(src, shift, self.ws.width, buf);
            let t = t as usize;
            for k in 0..self.words {
                let new = buf[k] & !self.grid[t * self.words + k];
                let mut bits = new;
                while bits != 0 {
                    let bit = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let c = k * 64 + bit;
                    self.members.push(Element::new(target, self.ws.beta + c as i64));
                }
                self.grid[t * self.words + k] |= new;
            }
        }
    }

    fn saturate(&mut self) {
        let mut next = 0;
        let mut fresh = Vec::new();
        let mut buf = vec![0u64; self.words];
        while next < self.members.len() {
            let e = self.members[next];
            next += 1;
            fresh.clear();
            for k in 0..self.members.len() {
                let y = self.members[k];
                self.note_mult(mul(e, y.adjoint()), &mut fresh);
                self.note_mult(mul(y, e.adjoint()), &mut fresh);
            }
            for k in 0..fresh.len() {
                self.apply_to_all(fresh[k], &mut buf);
            }
            for k in 0..self.mults.len() {
                let w = self.mults[k];
                self.insert(mul(w, e));
            }
        }
    }

    fn into_set(self) -> ElementSet {
        ElementSet::clipped(self.ws, self.members)
    }
}

/// Product on cells of a validated window, where overflow cannot occur.
fn mul(a: Element, b: Element) -> Element {
    let m = a.j.min(b.i);
    Element::new(a.i + b.i - m, a.j + b.j - m)
}

/// `out = src << shift` over a row of `width` bits.
fn shift_left_into(src: &[u64], shift: usize, width: usize, out: &mut [u64]) {
    let (ws, bs) = (shift / 64, shift % 64);
    for k in 0..out.len() {
        let lo = k.checked_sub(ws).map_or(0, |i| src[i]);
        let carry = if bs == 0 { 0 } else { k.checked_sub(ws + 1).map_or(0, |i| src[i] >> (64 - bs)) };
        out[k] = if bs == 0 { lo } else { (lo << bs) | carry };
    }
    let tail = width % 64;
    if tail != 0 {
        if let Some(last) = out.last_mut() {
            *last &= (1u64 << tail) - 1;
        }
    }
}

/// Least superset of `generators` closed under `x y* z`, where products
/// leaving `workspace` are discarded.
pub fn closure(generators: &[Element], workspace: Window) -> Result<ElementSet> {
    let mut eng = Engine::new(workspace);
    for &g in generators {
        if !workspace.contains(g) {
            return Err(Error::Range(format!("generator {g} lies outside workspace {workspace}")));
        }
        eng.insert(g);
    }
    eng.saturate();
    Ok(eng.into_set())
}

/// Closure of a set within its own window.
pub fn close_set(s: &ElementSet) -> ElementSet {
    let mut eng = Engine::new(s.window());
    for e in s.iter() {
        eng.insert(e);
    }
    eng.saturate();
    eng.into_set()
}

/// The workspace used by [`padded_closure`]: `inner` grown to the right and
/// downward by `pad_factor × max(height, width)`.
pub fn padded_workspace(inner: Window, pad_factor: usize) -> Result<Window> {
    let pad = pad_factor * inner.height.max(inner.width);
    inner.extend(pad, pad)
}

/// Closure computed in an enlarged workspace, then restricted to `inner`.
///
/// Products never move above or to the left of their factors, so no padding
/// is needed on those sides.
pub fn padded_closure(generators: &[Element], inner: Window, pad_factor: usize) -> Result<ElementSet> {
    if pad_factor == 0 {
        return Err(Error::Domain("pad factor must be positive".into()));
    }
    if let Some(g) = generators.iter().find(|g| !inner.contains(**g)) {
        return Err(Error::Range(format!("generator {g} lies outside inner window {inner}")));
    }
    let ws = padded_workspace(inner, pad_factor)?;
    Ok(closure(generators, ws)?.restrict(inner))
}

/// `None` when `s` is closed under every triple product that lands in its
/// window; otherwise the first violating triple in row-major `(x, y, z)` order.
pub fn is_window_semiheap(s: &ElementSet) -> Option<Violation> {
    if close_set(s) == *s {
        return None;
    }
    first_violation(s)
}

/// Exhaustive row-major scan for the first violating triple.
pub fn first_violation(s: &ElementSet) -> Option<Violation> {
    let members = s.to_vec();
    let w = s.window();
    for &x in &members {
        for &y in &members {
            for &z in &members {
                let Ok((r, _)) = triple(x, y, z) else {
                    continue;
                };
                if w.contains(r) && !s.contains(r) {
                    return Some(Violation { x, y, z, result: r });
                }
            }
        }
    }
    None
}
