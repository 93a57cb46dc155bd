//! Integer-indexed sequences that are constant on both ends.
//!
//! A [`Tailed`] value stores a left tail, a right tail, a split point `low`
//! and a finite exception map. Indices below `low` read the left tail;
//! indices at or above `low` read an exception if one is stored, otherwise
//! the right tail. Every constructor returns the canonical form:
//!
//! * `low` is the first index whose value differs from the left tail (when
//!   both tails agree, the smallest exception, or `0` when there is none);
//! * no exception equals the right tail;
//! * `high` is one past the largest exception (or `low` when there is none).
//!
//! With this normal form two sequences are equal as values iff they are equal
//! as Rust values.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tailed<T> {
    left: T,
    right: T,
    low: i64,
    high: i64,
    exceptions: BTreeMap<i64, T>,
}

impl<T: Copy + Eq> Tailed<T> {
    pub fn constant(value: T) -> Self {
        Self::from_window(value, value, 0, Vec::new())
    }

    /// Indices `< split` read `left`, the rest read `right`; `exceptions`
    /// override both.
    pub fn from_parts(
        left: T,
        right: T,
        split: i64,
        exceptions: impl IntoIterator<Item = (i64, T)>,
    ) -> Self {
        let overrides: BTreeMap<i64, T> = exceptions.into_iter().collect();
        let start = overrides.keys().next().map_or(split, |&k| k.min(split));
        let end = overrides.keys().next_back().map_or(split, |&k| (k + 1).max(split));
        let values = (start..end)
            .map(|n| match overrides.get(&n) {
                Some(&v) => v,
                None if n < split => left,
                None => right,
            })
            .collect();
        Self::from_window(left, right, start, values)
    }

    /// Indices `< start` read `left`, `values[i]` sits at `start + i`, and
    /// everything after the window reads `right`.
    pub fn from_window(left: T, right: T, start: i64, values: Vec<T>) -> Self {
        let end = start + values.len() as i64;
        let at = |n: i64| values[(n - start) as usize];
        let low = if left == right {
            (start..end).find(|&n| at(n) != left).unwrap_or(0)
        } else {
            (start..end).find(|&n| at(n) != left).unwrap_or(end)
        };
        let exceptions: BTreeMap<i64, T> = (low.max(start)..end)
            .filter(|&n| at(n) != right)
            .map(|n| (n, at(n)))
            .collect();
        let high = exceptions.keys().next_back().map_or(low, |&k| k + 1);
        Tailed {
            left,
            right,
            low,
            high,
            exceptions,
        }
    }

    pub fn value(&self, n: i64) -> T {
        if let Some(&v) = self.exceptions.get(&n) {
            v
        } else if n < self.low {
            self.left
        } else {
            self.right
        }
    }

    pub fn left(&self) -> T {
        self.left
    }

    pub fn right(&self) -> T {
        self.right
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn high(&self) -> i64 {
        self.high
    }

    pub fn exceptions(&self) -> &BTreeMap<i64, T> {
        &self.exceptions
    }

    /// A window `[lo, hi)` outside of which only the tails are read.
    pub fn span(&self) -> (i64, i64) {
        (self.low, self.high.max(self.low))
    }

    pub fn map<U: Copy + Eq>(&self, f: impl Fn(T) -> U) -> Tailed<U> {
        let (lo, hi) = self.span();
        let values = (lo..hi).map(|n| f(self.value(n))).collect();
        Tailed::from_window(f(self.left), f(self.right), lo, values)
    }

    /// Pointwise combination of two sequences.
    pub fn zip_with<U: Copy + Eq, V: Copy + Eq>(
        &self,
        other: &Tailed<U>,
        f: impl Fn(T, U) -> V,
    ) -> Tailed<V> {
        let (lo, hi) = joint_span(self.span(), other.span());
        let values = (lo..hi).map(|n| f(self.value(n), other.value(n))).collect();
        Tailed::from_window(f(self.left, other.left), f(self.right, other.right), lo, values)
    }

    /// Indices where the value differs from the "split at zero" reading of
    /// the tails. This is the textual exception list.
    pub fn exceptions_from_zero(&self) -> BTreeMap<i64, T> {
        let (lo, hi) = joint_span(self.span(), (0, 0));
        (lo..hi)
            .filter_map(|n| {
                let base = if n < 0 { self.left } else { self.right };
                let v = self.value(n);
                (v != base).then_some((n, v))
            })
            .collect()
    }

    /// True when `pred` holds at every index.
    pub fn all(&self, pred: impl Fn(T) -> bool) -> bool {
        let (lo, hi) = self.span();
        pred(self.left) && pred(self.right) && (lo..hi).all(|n| pred(self.value(n)))
    }
}

pub(crate) fn joint_span(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    (a.0.min(b.0), a.1.max(b.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_without_exceptions_keeps_the_split() {
        let t = Tailed::from_parts(1u8, 0u8, 3, []);
        assert_eq!(t.low(), 3);
        assert!(t.exceptions().is_empty());
        assert_eq!(t.value(2), 1);
        assert_eq!(t.value(3), 0);
    }

    #[test]
    fn redundant_exceptions_vanish() {
        let a = Tailed::from_parts(1u8, 0u8, 0, [(-4, 1), (0, 1), (1, 1)]);
        let b = Tailed::from_parts(1u8, 0u8, 2, []);
        assert_eq!(a, b);
    }

    #[test]
    fn equal_tails_window_is_tight() {
        let t = Tailed::from_parts(0u8, 0u8, 17, [(-2, 3), (5, 0), (4, 9)]);
        assert_eq!(t.low(), -2);
        assert_eq!(t.high(), 5);
        assert_eq!(t.exceptions().len(), 2);
        assert_eq!(Tailed::constant(0u8), Tailed::from_parts(0u8, 0u8, -9, []));
    }

    #[test]
    fn zip_is_pointwise() {
        let a = Tailed::from_parts(2u8, 0u8, 0, [(3, 7)]);
        let b = Tailed::from_parts(1u8, 5u8, -2, [(-5, 9)]);
        let m = a.zip_with(&b, |x, y| x.max(y));
        for n in -12..12 {
            assert_eq!(m.value(n), a.value(n).max(b.value(n)), "index {n}");
        }
    }

    #[test]
    fn exceptions_from_zero_rebuild_the_sequence() {
        let a = Tailed::from_parts(2u8, 0u8, 4, [(-3, 7)]);
        let rebuilt = Tailed::from_parts(a.left(), a.right(), 0, a.exceptions_from_zero());
        assert_eq!(a, rebuilt);
    }
}
