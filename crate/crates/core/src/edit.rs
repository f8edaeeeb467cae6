//! Unit-cost Levenshtein distance and edit-path backtrace.
//!
//! Paths are optimal first by edit cost, then by number of identical matches.
//! Remaining ties are broken during backtrace in the order
//! match > substitution > deletion > insertion.

use alloc::vec;
use alloc::vec::Vec;

/// One step of an edit path from a source sequence to a target sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditOp {
    /// `source[i] == target[j]`.
    Match { source: usize, target: usize },
    /// `source[i]` replaced by `target[j]`.
    Substitute { source: usize, target: usize },
    /// `source[i]` has no counterpart in the target.
    Delete { source: usize },
    /// `target[j]` has no counterpart in the source.
    Insert { target: usize },
}

/// Plain Levenshtein distance with a two-row table.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Cell value: edit cost, then matches (maximized) as a tie-breaker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cell {
    cost: u32,
    matches: u32,
}

impl Cell {
    fn better_than(self, other: Cell) -> bool {
        self.cost < other.cost || (self.cost == other.cost && self.matches > other.matches)
    }

    fn step(self, cost: u32, matched: bool) -> Cell {
        Cell {
            cost: self.cost + cost,
            matches: self.matches + u32::from(matched),
        }
    }
}

/// Minimum-cost edit path from `source` to `target`, returned left to right.
///
/// Among minimum-cost paths the one with the most identical matches is chosen.
pub fn edit_path<T: PartialEq>(source: &[T], target: &[T]) -> Vec<EditOp> {
    let (m, n) = (source.len(), target.len());
    let width = n + 1;
    let mut table = vec![
        Cell {
            cost: 0,
            matches: 0
        };
        (m + 1) * width
    ];
    for (j, cell) in table.iter_mut().enumerate().take(width).skip(1) {
        *cell = Cell {
            cost: j as u32,
            matches: 0,
        };
    }
    for i in 1..=m {
        table[i * width] = Cell {
            cost: i as u32,
            matches: 0,
        };
        for j in 1..=n {
            let same = source[i - 1] == target[j - 1];
            let mut best = table[(i - 1) * width + j - 1].step(u32::from(!same), same);
            let del = table[(i - 1) * width + j].step(1, false);
            if del.better_than(best) {
                best = del;
            }
            let ins = table[i * width + j - 1].step(1, false);
            if ins.better_than(best) {
                best = ins;
            }
            table[i * width + j] = best;
        }
    }

    let mut ops = Vec::with_capacity(m.max(n));
    let (mut i, mut j) = (m, n);
    while i > 0 || j > 0 {
        let here = table[i * width + j];
        if i > 0 && j > 0 {
            let diag = table[(i - 1) * width + j - 1];
            let same = source[i - 1] == target[j - 1];
            if same && diag.step(0, true) == here {
                ops.push(EditOp::Match {
                    source: i - 1,
                    target: j - 1,
                });
                i -= 1;
                j -= 1;
                continue;
            }
            if !same && diag.step(1, false) == here {
                ops.push(EditOp::Substitute {
                    source: i - 1,
                    target: j - 1,
                });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && table[(i - 1) * width + j].step(1, false) == here {
            ops.push(EditOp::Delete { source: i - 1 });
            i -= 1;
        } else {
            ops.push(EditOp::Insert { target: j - 1 });
            j -= 1;
        }
    }
    ops.reverse();
    ops
}

/// Counts of substitutions, deletions and insertions on an edit path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EditCounts {
    pub matches: usize,
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
}

impl EditCounts {
    pub fn of(path: &[EditOp]) -> Self {
        let mut counts = Self::default();
        for op in path {
            match op {
                EditOp::Match { .. } => counts.matches += 1,
                EditOp::Substitute { .. } => counts.substitutions += 1,
                EditOp::Delete { .. } => counts.deletions += 1,
                EditOp::Insert { .. } => counts.insertions += 1,
            }
        }
        counts
    }

    pub fn cost(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn distance_basics() {
        assert_eq!(levenshtein(&chars(""), &chars("abc")), 3);
        assert_eq!(levenshtein(&chars("kitten"), &chars("sitting")), 3);
        assert_eq!(levenshtein(&chars("ma1"), &chars("ma2")), 1);
        assert_eq!(levenshtein(&chars("same"), &chars("same")), 0);
    }

    #[test]
    fn path_cost_equals_distance() {
        for (a, b) in [
            ("kitten", "sitting"),
            ("AB", "BC"),
            ("", "xy"),
            ("abc", ""),
            ("旅行困", "旅行团"),
        ] {
            let path = edit_path(&chars(a), &chars(b));
            assert_eq!(
                EditCounts::of(&path).cost(),
                levenshtein(&chars(a), &chars(b)),
                "{a} {b}"
            );
        }
    }

    #[test]
    fn prefers_matches_among_equal_cost_paths() {
        // Two substitutions and del+match+ins both cost 2; the latter keeps B.
        let path = edit_path(&chars("AB"), &chars("BC"));
        assert_eq!(
            path,
            vec![
                EditOp::Delete { source: 0 },
                EditOp::Match {
                    source: 1,
                    target: 0
                },
                EditOp::Insert { target: 1 },
            ]
        );
    }

    #[test]
    fn substitution_beats_indel_on_ties() {
        let path = edit_path(&chars("AB"), &chars("AC"));
        assert_eq!(
            path[1],
            EditOp::Substitute {
                source: 1,
                target: 1
            }
        );
    }
}
