//! Canonical multisets of pieces: a sorted sequence of distinct colors with
//! positive counts. Two multisets are equal iff all counts match.

use std::fmt;

use crate::group::{ColorVector, GroupError, GroupParams, Residue};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset<R> {
    items: Vec<(ColorVector<R>, usize)>,
    total: usize,
}

impl<R> Default for Multiset<R> {
    fn default() -> Self {
        Multiset { items: Vec::new(), total: 0 }
    }
}

impl<R: Residue> Multiset<R> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total number of pieces, counting multiplicity.
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Number of distinct colors.
    pub fn distinct(&self) -> usize {
        self.items.len()
    }

    pub fn count(&self, color: &ColorVector<R>) -> usize {
        match self.find(color) {
            Ok(i) => self.items[i].1,
            Err(_) => 0,
        }
    }

    fn find(&self, color: &ColorVector<R>) -> Result<usize, usize> {
        self.items.binary_search_by(|(c, _)| c.cmp(color))
    }

    pub fn insert(&mut self, color: ColorVector<R>) {
        self.insert_n(color, 1);
    }

    pub fn insert_n(&mut self, color: ColorVector<R>, k: usize) {
        if k == 0 {
            return;
        }
        match self.find(&color) {
            Ok(i) => self.items[i].1 += k,
            Err(i) => self.items.insert(i, (color, k)),
        }
        self.total += k;
    }

    /// Removes `k` copies; returns false (leaving the set untouched) when
    /// fewer than `k` are present.
    pub fn remove_n(&mut self, color: &ColorVector<R>, k: usize) -> bool {
        if k == 0 {
            return true;
        }
        match self.find(color) {
            Ok(i) if self.items[i].1 >= k => {
                self.items[i].1 -= k;
                if self.items[i].1 == 0 {
                    self.items.remove(i);
                }
                self.total -= k;
                true
            }
            _ => false,
        }
    }

    pub fn remove_one(&mut self, color: &ColorVector<R>) -> bool {
        self.remove_n(color, 1)
    }

    /// Sub-multiset test, `other ⊆ self`.
    pub fn contains_all(&self, other: &Multiset<R>) -> bool {
        other.items.iter().all(|(c, k)| self.count(c) >= *k)
    }

    pub fn add_all(&mut self, other: &Multiset<R>) {
        for (c, k) in &other.items {
            self.insert_n(c.clone(), *k);
        }
    }

    /// Removes `other` if it is a sub-multiset; otherwise leaves `self`
    /// unchanged and returns false.
    pub fn remove_all(&mut self, other: &Multiset<R>) -> bool {
        if !self.contains_all(other) {
            return false;
        }
        for (c, k) in &other.items {
            self.remove_n(c, *k);
        }
        true
    }

    /// Distinct colors with their counts, ascending.
    pub fn counts(&self) -> impl Iterator<Item = (&ColorVector<R>, usize)> + '_ {
        self.items.iter().map(|(c, k)| (c, *k))
    }

    /// Every piece, repeated by multiplicity, ascending.
    pub fn iter(&self) -> impl Iterator<Item = &ColorVector<R>> + '_ {
        self.items.iter().flat_map(|(c, k)| std::iter::repeat_n(c, *k))
    }

    /// The `index`-th piece in canonical order.
    pub fn nth(&self, mut index: usize) -> Option<&ColorVector<R>> {
        for (c, k) in &self.items {
            if index < *k {
                return Some(c);
            }
            index -= k;
        }
        None
    }

    pub fn sum(&self, params: GroupParams) -> Result<ColorVector<R>, GroupError> {
        let mut acc = params.identity();
        for (c, k) in &self.items {
            acc = acc.checked_add(&c.times(*k as u64))?;
        }
        Ok(acc)
    }

    /// All distinct non-empty sub-multisets with at most `max_size` pieces,
    /// in canonical order.
    pub fn sub_multisets(&self, max_size: usize) -> Vec<Multiset<R>> {
        let mut out = Vec::new();
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        self.collect_subs(0, max_size, &mut chosen, &mut out);
        out.sort();
        out
    }

    fn collect_subs(
        &self,
        start: usize,
        room: usize,
        chosen: &mut Vec<(usize, usize)>,
        out: &mut Vec<Multiset<R>>,
    ) {
        for i in start..self.items.len() {
            let avail = self.items[i].1.min(room);
            for k in 1..=avail {
                chosen.push((i, k));
                out.push(Multiset {
                    items: chosen.iter().map(|&(j, k)| (self.items[j].0.clone(), k)).collect(),
                    total: chosen.iter().map(|&(_, k)| k).sum(),
                });
                self.collect_subs(i + 1, room - k, chosen, out);
                chosen.pop();
            }
        }
    }
}

impl<R: Residue> FromIterator<ColorVector<R>> for Multiset<R> {
    fn from_iter<I: IntoIterator<Item = ColorVector<R>>>(iter: I) -> Self {
        let mut pieces: Vec<ColorVector<R>> = iter.into_iter().collect();
        pieces.sort();
        let total = pieces.len();
        let mut items: Vec<(ColorVector<R>, usize)> = Vec::new();
        for c in pieces {
            match items.last_mut() {
                Some((last, k)) if *last == c => *k += 1,
                _ => items.push((c, 1)),
            }
        }
        Multiset { items, total }
    }
}

impl<R: fmt::Debug> fmt::Debug for Multiset<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for (c, k) in &self.items {
            for _ in 0..*k {
                list.entry(c);
            }
        }
        list.finish()
    }
}
