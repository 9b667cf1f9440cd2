//! Exhaustive enumeration of window-semiheaps and cross-validation of their
//! closures against the classifier.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, CaseLabel, ClassificationReport};
use crate::closure::padded_closure;
use crate::element::{triple, Element};
use crate::error::{Error, Result};
use crate::window::{ElementSet, Window};

/// Largest window, in cells, that may be enumerated.
pub const MAX_CELLS: usize = 25;

const CHUNK: usize = 8;

/// For each ordered pair `(x, y)` of cells and each byte of a subset mask,
/// the cells hit by `x y* z` as `z` ranges over that byte.
struct TripleTable {
    cells: usize,
    chunks: usize,
    table: Vec<u32>,
}

impl TripleTable {
    fn new(w: Window) -> Result<Self> {
        let n = w.len();
        let chunks = n.div_ceil(CHUNK);
        let mut single = vec![0u32; n * n * n];
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (r, _) = triple(w.element(x), w.element(y), w.element(z))?;
                    if let Some(k) = w.index(r) {
                        single[(x * n + y) * n + z] = 1 << k;
                    }
                }
            }
        }
        let mut table = vec![0u32; n * n * chunks * 256];
        for xy in 0..n * n {
            for c in 0..chunks {
                let base = (xy * chunks + c) * 256;
                for byte in 1..256usize {
                    let low = byte.trailing_zeros() as usize;
                    let z = c * CHUNK + low;
                    let hit = if z < n { single[xy * n + z] } else { 0 };
                    table[base + byte] = table[base + (byte & (byte - 1))] | hit;
                }
            }
        }
        Ok(TripleTable { cells: n, chunks, table })
    }

    fn is_closed(&self, mask: u32) -> bool {
        let n = self.cells;
        let mut xs = mask;
        while xs != 0 {
            let x = xs.trailing_zeros() as usize;
            xs &= xs - 1;
            let mut ys = mask;
            while ys != 0 {
                let y = ys.trailing_zeros() as usize;
                ys &= ys - 1;
                let base = (x * n + y) * self.chunks;
                let mut hit = 0;
                for c in 0..self.chunks {
                    let byte = (mask >> (c * CHUNK)) as usize & 0xff;
                    hit |= self.table[(base + c) * 256 + byte];
                }
                if hit & !mask != 0 {
                    return false;
                }
            }
        }
        true
    }
}

fn check_size(w: Window) -> Result<()> {
    if w.len() > MAX_CELLS {
        return Err(Error::Range(format!(
            "window {w} has {} cells; enumeration is limited to {MAX_CELLS}",
            w.len()
        )));
    }
    Ok(())
}

fn run_in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Subset masks (bit `k` = row-major cell `k`) of every window-semiheap of
/// `w`, in ascending order. `jobs` caps the worker threads.
pub fn window_semiheap_masks(w: Window, jobs: Option<usize>) -> Result<Vec<u32>> {
    check_size(w)?;
    let table = TripleTable::new(w)?;
    let total: u64 = 1 << w.len();
    const BLOCK: u64 = 1 << 14;
    let blocks = total.div_ceil(BLOCK);
    run_in_pool(jobs, || {
        (0..blocks)
            .into_par_iter()
            .flat_map_iter(|b| {
                let lo = b * BLOCK;
                let hi = (lo + BLOCK).min(total);
                (lo..hi).map(|m| m as u32).filter(|&m| table.is_closed(m)).collect::<Vec<_>>()
            })
            .collect()
    })
}

/// Every window-semiheap of `w`, the empty set first.
pub fn enumerate_window_semiheaps(w: Window) -> Result<Vec<ElementSet>> {
    Ok(window_semiheap_masks(w, None)?
        .into_iter()
        .map(|m| ElementSet::from_mask(w, m as u64))
        .collect())
}

pub fn count_window_semiheaps(w: Window, jobs: Option<usize>) -> Result<u64> {
    Ok(window_semiheap_masks(w, jobs)?.len() as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossFailure {
    pub set: Vec<Element>,
    pub closure: Vec<Element>,
    pub reason: String,
    pub report: ClassificationReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub window: Window,
    pub pad_factor: usize,
    /// Window-semiheaps including the empty set.
    pub count: u64,
    /// Nonempty sets equal to the restriction of their own closure.
    pub exact_matches: u64,
    /// Nonempty sets strictly contained in the restriction of their closure.
    pub proper_extensions: u64,
    /// Closures assigned a nonoccurring label.
    pub nonoccurring: u64,
    pub failures: Vec<CrossFailure>,
    /// Case label of each closure, tallied over the nonempty sets.
    pub labels: BTreeMap<String, u64>,
}

/// Enumerates the window-semiheaps of `w`; for each nonempty `S` the padded
/// closure `S'` must contain `S` and classify to a family materializing to
/// exactly `S'`.
pub fn cross_validate(w: Window, pad_factor: usize, jobs: Option<usize>) -> Result<CrossValidation> {
    let masks = window_semiheap_masks(w, jobs)?;
    let count = masks.len() as u64;
    struct One {
        exact: bool,
        label: CaseLabel,
        failure: Option<CrossFailure>,
    }
    let results: Vec<One> = run_in_pool(jobs, || {
        masks
            .par_iter()
            .filter(|&&m| m != 0)
            .map(|&m| -> Result<One> {
                let s = ElementSet::from_mask(w, m as u64);
                let gens = s.to_vec();
                let closed = padded_closure(&gens, w, pad_factor)?;
                let report = classify(&closed);
                let reason = if !s.is_subset(&closed) {
                    Some("set is not contained in its closure".to_string())
                } else if report.case.is_nonoccurring() {
                    Some(format!("closure classified as {}", report.case))
                } else {
                    match &report.family {
                        Some(f) if f.materialize(w) == closed => None,
                        _ => Some("family does not reproduce the closure".to_string()),
                    }
                };
                Ok(One {
                    exact: closed == s,
                    label: report.case.clone(),
                    failure: reason.map(|reason| CrossFailure {
                        set: gens,
                        closure: closed.to_vec(),
                        reason,
                        report,
                    }),
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let mut out = CrossValidation {
        window: w,
        pad_factor,
        count,
        exact_matches: 0,
        proper_extensions: 0,
        nonoccurring: 0,
        failures: Vec::new(),
        labels: BTreeMap::new(),
    };
    for one in results {
        if one.exact {
            out.exact_matches += 1;
        } else {
            out.proper_extensions += 1;
        }
        if one.label.is_nonoccurring() {
            out.nonoccurring += 1;
        }
        *out.labels.entry(one.label.to_string()).or_default() += 1;
        out.failures.extend(one.failure);
    }
    Ok(out)
}

/// Directory holding the golden count table: `$EBS_GOLDEN_DIR` when set,
/// else the `golden/` directory of this crate.
pub fn golden_dir() -> PathBuf {
    std::env::var_os("EBS_GOLDEN_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("golden"))
}

pub const GOLDEN_FILE: &str = "window_counts.txt";
const GOLDEN_VERSION: &str = "version 1";

/// Reads the versioned table of window-semiheap counts, keyed by
/// `(width, height)`. Counts depend only on the window size.
pub fn load_golden(dir: &Path) -> Result<BTreeMap<(usize, usize), u64>> {
    let path = dir.join(GOLDEN_FILE);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Golden(format!("{}: {e}", path.display())))?;
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some(GOLDEN_VERSION) => {}
        other => {
            return Err(Error::Golden(format!(
                "expected {GOLDEN_VERSION:?} header, found {other:?}"
            )))
        }
    }
    let mut table = BTreeMap::new();
    for line in lines {
        let bad = || Error::Golden(format!("malformed line {line:?}"));
        let (size, count) = line.split_once(char::is_whitespace).ok_or_else(bad)?;
        let (w, h) = size.split_once('x').ok_or_else(bad)?;
        let key = (w.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?);
        table.insert(key, count.trim().parse().map_err(|_| bad())?);
    }
    Ok(table)
}

/// The frozen count for a window of this size, if recorded.
pub fn golden_count(w: Window) -> Result<Option<u64>> {
    Ok(load_golden(&golden_dir())?.get(&(w.width, w.height)).copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::first_violation;

    #[test]
    fn one_cell() {
        let w = Window::square(0, 0).unwrap();
        assert_eq!(count_window_semiheaps(w, None).unwrap(), 2);
    }

    #[test]
    fn table_agrees_with_direct_scan() {
        for w in [
            Window::new(0, 0, 2, 2).unwrap(),
            Window::new(-1, 3, 2, 3).unwrap(),
            Window::new(0, 0, 3, 3).unwrap(),
        ] {
            let table = TripleTable::new(w).unwrap();
            for m in 0..(1u32 << w.len()) {
                let s = ElementSet::from_mask(w, m as u64);
                assert_eq!(table.is_closed(m), first_violation(&s).is_none(), "{w} {m:#b}");
            }
        }
    }

    #[test]
    fn translation_invariant_counts() {
        let a = count_window_semiheaps(Window::new(0, 0, 2, 3).unwrap(), None).unwrap();
        let b = count_window_semiheaps(Window::new(7, -4, 2, 3).unwrap(), None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oversize_rejected() {
        assert!(matches!(
            count_window_semiheaps(Window::new(0, 0, 6, 5).unwrap(), None),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn golden_parse_errors() {
        let dir = std::env::temp_dir().join(format!("ebs-golden-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join(GOLDEN_FILE), "version 9\n1x1 2\n").unwrap();
        assert!(matches!(load_golden(&dir), Err(Error::Golden(_))));
        std::fs::write(dir.join(GOLDEN_FILE), "# c\nversion 1\n2x1 3\n").unwrap();
        assert_eq!(load_golden(&dir).unwrap().get(&(2, 1)), Some(&3));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
