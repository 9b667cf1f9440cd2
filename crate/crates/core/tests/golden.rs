use ebs_core::closure::first_violation;
use ebs_core::enumerate::{count_window_semiheaps, golden_dir, load_golden};
use ebs_core::{ElementSet, Window};

fn naive_count(w: Window) -> u64 {
    (0..1u64 << w.len())
        .filter(|&m| first_violation(&ElementSet::from_mask(w, m)).is_none())
        .count() as u64
}

#[test]
fn table_matches_enumeration() {
    let table = load_golden(&golden_dir()).unwrap();
    assert!(table.contains_key(&(4, 4)));
    for (&(width, height), &count) in &table {
        let w = Window::new(3, -2, height, width).unwrap();
        assert_eq!(count_window_semiheaps(w, Some(2)).unwrap(), count, "{width}x{height}");
    }
}

#[test]
fn small_entries_match_naive_scan() {
    let table = load_golden(&golden_dir()).unwrap();
    for (&(width, height), &count) in table.iter().filter(|(k, _)| k.0 * k.1 <= 12) {
        let w = Window::new(0, 0, height, width).unwrap();
        assert_eq!(naive_count(w), count, "{width}x{height}");
    }
}

#[test]
fn four_by_four_naive() {
    let w = Window::new(0, 0, 4, 4).unwrap();
    assert_eq!(naive_count(w), 172);
}
