//! Color arithmetic as the finite abelian group (Z_m)^n.
//!
//! A game piece is a [`ColorVector`]: `n` residues modulo `m`, added
//! componentwise. The all-zero vector is the black/clear piece. The residue
//! storage type is generic so compact (`u8`) and wide (`u32`) builds share the
//! same code; [`crate::Color`] fixes the type used by the engine.

use std::fmt;
use std::hash::Hash;
use std::ops::Add;

use num_traits::{NumCast, PrimInt, Unsigned};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

/// Largest supported group order, `m^n <= 2^20`.
pub const MAX_ORDER: u64 = 1 << 20;

/// Unsigned integer type used to store one coordinate of a [`ColorVector`].
pub trait Residue:
    PrimInt + Unsigned + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Residue for T where
    T: PrimInt + Unsigned + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("invalid group parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: GroupParams, right: GroupParams },
    #[error("expected {expected} entries, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("entry {value} is not a residue modulo {modulus}")]
    EntryOutOfRange { value: u64, modulus: u32 },
    #[error("only defined for {0}")]
    NotApplicable(&'static str),
    #[error("unknown color code {0:?}")]
    UnknownCode(String),
}

/// The pair `(m, n)` selecting the group (Z_m)^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupParams {
    m: u32,
    n: u32,
}

impl GroupParams {
    /// The eight-color game: red, yellow and blue over Z_2.
    pub const STANDARD: GroupParams = GroupParams { m: 2, n: 3 };

    pub fn new(m: u32, n: u32) -> Result<Self, GroupError> {
        if m < 2 {
            return Err(GroupError::InvalidParams(format!("modulus m={m} must be at least 2")));
        }
        if n < 1 {
            return Err(GroupError::InvalidParams("vector length n must be at least 1".into()));
        }
        let order = (m as u64).checked_pow(n).filter(|&o| o <= MAX_ORDER);
        if order.is_none() {
            return Err(GroupError::InvalidParams(format!(
                "group order {m}^{n} exceeds the limit of {MAX_ORDER}"
            )));
        }
        Ok(GroupParams { m, n })
    }

    pub fn m(self) -> u32 {
        self.m
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    /// Number of elements, `m^n`.
    pub fn order(self) -> u64 {
        (self.m as u64).pow(self.n)
    }

    /// Whether residues `0..m` fit in `R`.
    pub fn fits<R: Residue>(self) -> bool {
        <R as NumCast>::from(self.m - 1).is_some()
    }

    pub fn identity<R: Residue>(self) -> ColorVector<R> {
        ColorVector { params: self, entries: SmallVec::from_elem(R::zero(), self.n()) }
    }

    /// The unit vectors `e_1..e_n`, in coordinate order.
    pub fn primaries<R: Residue>(self) -> Vec<ColorVector<R>> {
        (0..self.n())
            .map(|i| {
                let mut v = self.identity::<R>();
                v.entries[i] = R::one();
                v
            })
            .collect()
    }

    /// The all-`(m-1)` vector; white in the standard game.
    pub fn white<R: Residue>(self) -> ColorVector<R> {
        let top = residue::<R>(self.m as u64 - 1);
        ColorVector { params: self, entries: SmallVec::from_elem(top, self.n()) }
    }

    /// The Spectrum set: every primary plus the all-`(m-1)` vector.
    pub fn spectrum<R: Residue>(self) -> Vec<ColorVector<R>> {
        let mut set = self.primaries();
        set.push(self.white());
        set
    }

    /// Element with the given lexicographic rank (base-`m` digits, most
    /// significant first).
    pub fn element_at<R: Residue>(self, mut index: u64) -> ColorVector<R> {
        debug_assert!(index < self.order());
        let m = self.m as u64;
        let mut v = self.identity::<R>();
        for slot in v.entries.iter_mut().rev() {
            *slot = residue(index % m);
            index /= m;
        }
        v
    }

    /// All `m^n` elements in lexicographic order.
    pub fn elements<R: Residue>(self) -> impl Iterator<Item = ColorVector<R>> {
        (0..self.order()).map(move |i| self.element_at(i))
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(Z_{})^{}", self.m, self.n)
    }
}

fn residue<R: Residue>(value: u64) -> R {
    <R as NumCast>::from(value).expect("residue exceeds storage type")
}

/// An element of (Z_m)^n; the color of one game piece.
///
/// Ordering is lexicographic on the entries, which is also the order of
/// [`ColorVector::index`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorVector<R> {
    params: GroupParams,
    entries: SmallVec<[R; 6]>,
}

impl<R: Residue> ColorVector<R> {
    pub fn new(params: GroupParams, entries: &[u64]) -> Result<Self, GroupError> {
        if entries.len() != params.n() {
            return Err(GroupError::WrongLength { expected: params.n(), got: entries.len() });
        }
        if !params.fits::<R>() {
            return Err(GroupError::InvalidParams(format!(
                "modulus {} does not fit the residue type",
                params.m
            )));
        }
        let mut out = SmallVec::with_capacity(entries.len());
        for &value in entries {
            if value >= params.m as u64 {
                return Err(GroupError::EntryOutOfRange { value, modulus: params.m });
            }
            out.push(residue(value));
        }
        Ok(ColorVector { params, entries: out })
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn entries(&self) -> &[R] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> u64 {
        self.entries[i].to_u64().unwrap_or_default()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Lexicographic rank in `0..m^n`.
    pub fn index(&self) -> u64 {
        let m = self.params.m as u64;
        (0..self.entries.len()).fold(0, |acc, i| acc * m + self.entry(i))
    }

    /// Componentwise sum modulo `m`.
    pub fn checked_add(&self, other: &Self) -> Result<Self, GroupError> {
        if self.params != other.params {
            return Err(GroupError::DimensionMismatch { left: self.params, right: other.params });
        }
        let m = self.params.m as u64;
        let entries = (0..self.entries.len())
            .map(|i| residue((self.entry(i) + other.entry(i)) % m))
            .collect();
        Ok(ColorVector { params: self.params, entries })
    }

    /// Componentwise negation modulo `m`.
    pub fn inverse(&self) -> Self {
        let m = self.params.m as u64;
        let entries = (0..self.entries.len()).map(|i| residue((m - self.entry(i)) % m)).collect();
        ColorVector { params: self.params, entries }
    }

    /// `k` copies of this color summed.
    pub fn times(&self, k: u64) -> Self {
        let m = self.params.m as u64;
        let k = k % m;
        let entries = (0..self.entries.len()).map(|i| residue(self.entry(i) * k % m)).collect();
        ColorVector { params: self.params, entries }
    }

    /// Whether the color is one of the unit vectors.
    pub fn is_primary(&self) -> bool {
        let mut ones = 0;
        for e in &self.entries {
            if e.is_one() {
                ones += 1;
            } else if !e.is_zero() {
                return false;
            }
        }
        ones == 1
    }
}

/// Panics if the operands come from different groups; use
/// [`ColorVector::checked_add`] on untrusted input.
impl<R: Residue> Add for &ColorVector<R> {
    type Output = ColorVector<R>;

    fn add(self, rhs: Self) -> ColorVector<R> {
        self.checked_add(rhs).expect("adding colors from different groups")
    }
}

impl<R: fmt::Debug> fmt::Debug for ColorVector<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e:?}")?;
        }
        f.write_str(")")
    }
}

impl<R: fmt::Display> fmt::Display for ColorVector<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// Group sum of a collection of pieces; the empty sum is black/clear.
pub fn sum_colors<'a, R, I>(params: GroupParams, pieces: I) -> Result<ColorVector<R>, GroupError>
where
    R: Residue,
    I: IntoIterator<Item = &'a ColorVector<R>>,
{
    pieces.into_iter().try_fold(params.identity(), |acc, c| acc.checked_add(c))
}

/// The seven lines of the Fano plane: triples `{a, b, a+b}` of non-identity
/// elements of (Z_2)^3, each sorted, listed in lexicographic order.
pub fn fano_lines<R: Residue>(params: GroupParams) -> Result<Vec<[ColorVector<R>; 3]>, GroupError> {
    if params != GroupParams::STANDARD {
        return Err(GroupError::NotApplicable("the (Z_2)^3 color group"));
    }
    let points: Vec<ColorVector<R>> = params.elements().filter(|c| !c.is_identity()).collect();
    let mut lines = Vec::new();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let mut line = [a.clone(), b.clone(), a + b];
            line.sort();
            if !lines.contains(&line) {
                lines.push(line);
            }
        }
    }
    lines.sort();
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(params: GroupParams, e: &[u64]) -> ColorVector<u8> {
        ColorVector::new(params, e).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(GroupParams::new(1, 3).is_err());
        assert!(GroupParams::new(2, 0).is_err());
        assert!(GroupParams::new(2, 21).is_err());
        assert!(GroupParams::new(2, 20).is_ok());
        assert!(GroupParams::new(1 << 20, 1).is_ok());
    }

    #[test]
    fn mod3_addition_and_inverse() {
        let p = GroupParams::new(3, 2).unwrap();
        assert_eq!(&v(p, &[1, 2]) + &v(p, &[2, 2]), v(p, &[0, 1]));
        assert_eq!(v(p, &[1, 2]).inverse(), v(p, &[2, 1]));
        assert_eq!(p.identity::<u8>().inverse(), p.identity());
    }

    #[test]
    fn mismatched_groups_error() {
        let a = v(GroupParams::new(2, 3).unwrap(), &[1, 0, 0]);
        let b = v(GroupParams::new(3, 3).unwrap(), &[1, 0, 0]);
        assert!(matches!(a.checked_add(&b), Err(GroupError::DimensionMismatch { .. })));
        let c = v(GroupParams::new(2, 2).unwrap(), &[1, 0]);
        assert!(a.checked_add(&c).is_err());
    }

    #[test]
    fn entries_are_checked() {
        let p = GroupParams::new(3, 2).unwrap();
        assert!(ColorVector::<u8>::new(p, &[3, 0]).is_err());
        assert!(ColorVector::<u8>::new(p, &[1]).is_err());
        let wide = GroupParams::new(300, 1).unwrap();
        assert!(!wide.fits::<u8>());
        assert!(ColorVector::<u8>::new(wide, &[1]).is_err());
        assert!(ColorVector::<u16>::new(wide, &[299]).is_ok());
    }

    #[test]
    fn element_rank_round_trips() {
        let p = GroupParams::new(3, 3).unwrap();
        for (i, c) in p.elements::<u8>().enumerate() {
            assert_eq!(c.index(), i as u64);
        }
        let all: Vec<_> = p.elements::<u8>().collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn primaries_are_unit_vectors() {
        let p = GroupParams::new(2, 4).unwrap();
        let prim: Vec<Vec<u64>> =
            p.primaries::<u8>().iter().map(|c| (0..4).map(|i| c.entry(i)).collect()).collect();
        assert_eq!(prim, vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
        let q = GroupParams::new(3, 2).unwrap();
        assert_eq!(q.primaries::<u8>(), vec![v(q, &[1, 0]), v(q, &[0, 1])]);
    }

    #[test]
    fn spectrum_sums_to_identity() {
        for (m, n) in [(2, 3), (2, 4), (3, 2), (5, 3), (2, 1)] {
            let p = GroupParams::new(m, n).unwrap();
            let s = sum_colors(p, &p.spectrum::<u16>()).unwrap();
            assert!(s.is_identity(), "{p}");
        }
    }

    #[test]
    fn times_matches_repeated_addition() {
        let p = GroupParams::new(5, 2).unwrap();
        let c = v(p, &[3, 4]);
        let mut acc = p.identity();
        for k in 0..12 {
            assert_eq!(c.times(k), acc);
            acc = &acc + &c;
        }
        assert!(c.times(5).is_identity());
    }

    #[test]
    fn fano_only_for_standard_group() {
        assert!(fano_lines::<u8>(GroupParams::new(2, 4).unwrap()).is_err());
        let lines = fano_lines::<u8>(GroupParams::STANDARD).unwrap();
        assert_eq!(lines.len(), 7);
    }
}
