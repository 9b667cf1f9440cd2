//! Finite rectangular views of `Z²` and membership sets over them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::element::Element;
use crate::error::{Error, Result};

/// The cells `(alpha..alpha+height) × (beta..beta+width)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub alpha: i64,
    pub beta: i64,
    pub height: usize,
    pub width: usize,
}

impl Window {
    pub fn new(alpha: i64, beta: i64, height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Domain(format!(
                "window dimensions must be positive, got {height}x{width}"
            )));
        }
        let w = Window { alpha, beta, height, width };
        w.alpha
            .checked_add(height as i64)
            .and_then(|_| w.beta.checked_add(width as i64))
            .ok_or_else(|| Error::Range("window exceeds the 64-bit index range".into()))?;
        Ok(w)
    }

    /// The square `[lo, hi]²`.
    pub fn square(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::Domain(format!("empty range [{lo}, {hi}]")));
        }
        let side = (hi - lo + 1) as usize;
        Window::new(lo, lo, side, side)
    }

    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, e: Element) -> bool {
        self.local(e).is_some()
    }

    /// Local `(row, col)` offsets of `e`, if it lies in the window.
    pub fn local(&self, e: Element) -> Option<(usize, usize)> {
        let r = e.i.checked_sub(self.alpha)?;
        let c = e.j.checked_sub(self.beta)?;
        if r < 0 || c < 0 || r as u64 >= self.height as u64 || c as u64 >= self.width as u64 {
            return None;
        }
        Some((r as usize, c as usize))
    }

    /// Row-major cell index of `e`.
    pub fn index(&self, e: Element) -> Option<usize> {
        self.local(e).map(|(r, c)| r * self.width + c)
    }

    pub fn element(&self, idx: usize) -> Element {
        Element::new(
            self.alpha + (idx / self.width) as i64,
            self.beta + (idx % self.width) as i64,
        )
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.len()).map(move |k| self.element(k))
    }

    pub fn translate(&self, d_alpha: i64, d_beta: i64) -> Result<Self> {
        let alpha = self
            .alpha
            .checked_add(d_alpha)
            .ok_or_else(|| Error::Range("window translation overflow".into()))?;
        let beta = self
            .beta
            .checked_add(d_beta)
            .ok_or_else(|| Error::Range("window translation overflow".into()))?;
        Window::new(alpha, beta, self.height, self.width)
    }

    pub fn transpose(&self) -> Self {
        Window { alpha: self.beta, beta: self.alpha, height: self.width, width: self.height }
    }

    /// Grows the window by `down` rows and `right` columns.
    pub fn extend(&self, down: usize, right: usize) -> Result<Self> {
        Window::new(self.alpha, self.beta, self.height + down, self.width + right)
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        other.alpha >= self.alpha
            && other.beta >= self.beta
            && other.alpha + other.height as i64 <= self.alpha + self.height as i64
            && other.beta + other.width as i64 <= self.beta + self.width as i64
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}@({},{})", self.width, self.height, self.alpha, self.beta)
    }
}

impl FromStr for Window {
    type Err = Error;

    /// Parses `"WxH@(a,b)"`: width `W`, height `H`, top-left cell `(a,b)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected \"WxH@(a,b)\", got {s:?}"));
        let (dims, corner) = s.trim().split_once('@').ok_or_else(bad)?;
        let (w, h) = dims.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let width = w.trim().parse::<usize>().map_err(|_| bad())?;
        let height = h.trim().parse::<usize>().map_err(|_| bad())?;
        let corner: Element = corner.parse().map_err(|_| bad())?;
        Window::new(corner.i, corner.j, height, width)
    }
}

/// Glyphs used for text rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Charset {
    #[default]
    Unicode,
    Ascii,
}

impl Charset {
    fn glyphs(self) -> (char, char) {
        match self {
            Charset::Unicode => ('●', '○'),
            Charset::Ascii => ('#', '.'),
        }
    }
}

/// A subset of a window, stored as a row-major bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    window: Window,
    bits: Vec<u64>,
}

impl ElementSet {
    pub fn empty(window: Window) -> Self {
        ElementSet { window, bits: vec![0; window.len().div_ceil(64)] }
    }

    pub fn full(window: Window) -> Self {
        let mut s = Self::empty(window);
        for k in 0..window.len() {
            s.set_index(k);
        }
        s
    }

    /// Collects `elems`; every one must lie in `window`.
    pub fn from_elements<I>(window: Window, elems: I) -> Result<Self>
    where
        I: IntoIterator<Item = Element>,
    {
        let mut s = Self::empty(window);
        for e in elems {
            if !s.insert(e) && !window.contains(e) {
                return Err(Error::Range(format!("{e} lies outside window {window}")));
            }
        }
        Ok(s)
    }

    /// Members of `elems` inside `window`; the rest are dropped.
    pub fn clipped<I>(window: Window, elems: I) -> Self
    where
        I: IntoIterator<Item = Element>,
    {
        let mut s = Self::empty(window);
        for e in elems {
            s.insert(e);
        }
        s
    }

    /// Builds the set whose cell `k` is present iff bit `k` of `mask` is set.
    pub fn from_mask(window: Window, mask: u64) -> Self {
        let mut s = Self::empty(window);
        for k in 0..window.len().min(64) {
            if mask >> k & 1 == 1 {
                s.set_index(k);
            }
        }
        s
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn contains(&self, e: Element) -> bool {
        self.window.index(e).is_some_and(|k| self.has_index(k))
    }

    pub fn has_index(&self, k: usize) -> bool {
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    fn set_index(&mut self, k: usize) {
        self.bits[k / 64] |= 1 << (k % 64);
    }

    /// Adds `e`; returns false when `e` is outside the window or already present.
    pub fn insert(&mut self, e: Element) -> bool {
        match self.window.index(e) {
            Some(k) if !self.has_index(k) => {
                self.set_index(k);
                true
            }
            _ => false,
        }
    }

    pub fn remove(&mut self, e: Element) -> bool {
        match self.window.index(e) {
            Some(k) if self.has_index(k) => {
                self.bits[k / 64] &= !(1 << (k % 64));
                true
            }
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Members in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.bits.iter().enumerate().flat_map(move |(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(self.window.element(wi * 64 + b))
            })
        })
    }

    pub fn to_vec(&self) -> Vec<Element> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.iter().all(|e| other.contains(e))
    }

    /// The same members viewed through `window`, dropping those outside it.
    pub fn restrict(&self, window: Window) -> ElementSet {
        ElementSet::clipped(window, self.iter())
    }

    pub fn translate(&self, d_alpha: i64, d_beta: i64) -> Result<ElementSet> {
        let window = self.window.translate(d_alpha, d_beta)?;
        let mut out = ElementSet::empty(window);
        for e in self.iter() {
            out.insert(Element::new(e.i + d_alpha, e.j + d_beta));
        }
        Ok(out)
    }

    /// Transposes both the members and the window.
    pub fn adjoint(&self) -> ElementSet {
        ElementSet::clipped(self.window.transpose(), self.iter().map(Element::adjoint))
    }

    /// First cell, in row-major order, where the two sets disagree. The sets
    /// are compared over `self`'s window.
    pub fn first_difference(&self, other: &ElementSet) -> Option<Element> {
        self.window.cells().find(|&e| self.contains(e) != other.contains(e))
    }

    pub fn render(&self, charset: Charset) -> String {
        let (on, off) = charset.glyphs();
        let mut out = String::new();
        for r in 0..self.window.height {
            let row: Vec<String> = (0..self.window.width)
                .map(|c| {
                    let g = if self.has_index(r * self.window.width + c) { on } else { off };
                    g.to_string()
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ElementSet")
            .field("window", &self.window)
            .field("members", &self.to_vec())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct ElementSetJson {
    window: Window,
    members: Vec<Element>,
}

impl Serialize for ElementSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementSetJson { window: self.window, members: self.to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ElementSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ElementSetJson::deserialize(d)?;
        let window = Window::new(raw.window.alpha, raw.window.beta, raw.window.height, raw.window.width)
            .map_err(serde::de::Error::custom)?;
        ElementSet::from_elements(window, raw.members).map_err(serde::de::Error::custom)
    }
}

/// Parses a `;`-separated list of `(i,j)` elements.
pub fn parse_elements(s: &str) -> Result<Vec<Element>> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: i64, j: i64) -> Element {
        Element::new(i, j)
    }

    #[test]
    fn window_parse_and_cells() {
        let w: Window = "3x2@(1,-4)".parse().unwrap();
        assert_eq!(w, Window { alpha: 1, beta: -4, height: 2, width: 3 });
        assert_eq!(w.to_string(), "3x2@(1,-4)");
        let cells: Vec<Element> = w.cells().collect();
        assert_eq!(cells, vec![e(1, -4), e(1, -3), e(1, -2), e(2, -4), e(2, -3), e(2, -2)]);
        assert!("0x2@(0,0)".parse::<Window>().is_err());
        assert!("3x2(0,0)".parse::<Window>().is_err());
    }

    #[test]
    fn membership_and_order() {
        let w = Window::square(0, 3).unwrap();
        let s = ElementSet::from_elements(w, [e(2, 1), e(0, 3), e(0, 0)]).unwrap();
        assert_eq!(s.to_vec(), vec![e(0, 0), e(0, 3), e(2, 1)]);
        assert_eq!(s.len(), 3);
        assert!(ElementSet::from_elements(w, [e(4, 0)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let w = Window::new(-1, 2, 2, 3).unwrap();
        let s = ElementSet::from_elements(w, [e(-1, 4), e(0, 2)]).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"window":{"alpha":-1,"beta":2,"height":2,"width":3},"members":[[-1,4],[0,2]]}"#
        );
        assert_eq!(serde_json::from_str::<ElementSet>(&json).unwrap(), s);
    }

    #[test]
    fn render_glyphs() {
        let w = Window::square(0, 1).unwrap();
        let s = ElementSet::from_elements(w, [e(0, 0), e(1, 1)]).unwrap();
        assert_eq!(s.render(Charset::Unicode), "● ○\n○ ●\n");
        assert_eq!(s.render(Charset::Ascii), "# .\n. #\n");
    }

    #[test]
    fn adjoint_and_translate() {
        let w = Window::new(0, 5, 2, 3).unwrap();
        let s = ElementSet::from_elements(w, [e(1, 7)]).unwrap();
        let t = s.adjoint();
        assert_eq!(t.window(), Window::new(5, 0, 3, 2).unwrap());
        assert_eq!(t.to_vec(), vec![e(7, 1)]);
        let u = s.translate(-1, -5).unwrap();
        assert_eq!(u.to_vec(), vec![e(0, 2)]);
    }

    #[test]
    fn element_list_parsing() {
        assert_eq!(parse_elements("(0,0); (0,3)").unwrap(), vec![e(0, 0), e(0, 3)]);
        assert!(parse_elements("(0,0);(x,1)").is_err());
    }
}
