//! Explicit Boolean function tables.
//!
//! A [`FunTable`] stores the satisfying set of a function as a bitset indexed
//! by the lexicographic rank of assignments under the ordered universe. This
//! makes equality canonical and every transformation bit-exact.

use crate::error::{Error, Result};
use crate::var::{Assignment, Universe, VarId};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunTable {
    universe: Universe,
    words: Vec<u64>,
}

fn words_for(nvars: usize) -> usize {
    (1usize << nvars).div_ceil(64)
}

impl FunTable {
    /// Constant-false over the given universe.
    pub fn constant(universe: Universe, value: bool) -> FunTable {
        let nrows = 1usize << universe.len();
        let mut words = vec![if value { !0u64 } else { 0 }; words_for(universe.len())];
        if value {
            mask_tail(&mut words, nrows);
        }
        FunTable { universe, words }
    }

    pub fn from_sat_ranks(universe: Universe, ranks: impl IntoIterator<Item = usize>) -> FunTable {
        let mut t = FunTable::constant(universe, false);
        for r in ranks {
            t.set_rank(r, true);
        }
        t
    }

    /// Tabulates an arbitrary predicate over all assignments of the universe.
    pub fn tabulate(universe: Universe, mut f: impl FnMut(&Assignment) -> bool) -> FunTable {
        let mut t = FunTable::constant(universe.clone(), false);
        for r in 0..1usize << universe.len() {
            if f(&Assignment::from_rank(universe.clone(), r)) {
                t.set_rank(r, true);
            }
        }
        t
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn rows(&self) -> usize {
        1usize << self.universe.len()
    }

    pub fn get_rank(&self, rank: usize) -> bool {
        self.words[rank / 64] >> (rank % 64) & 1 == 1
    }

    pub fn set_rank(&mut self, rank: usize, b: bool) {
        if b {
            self.words[rank / 64] |= 1 << (rank % 64);
        } else {
            self.words[rank / 64] &= !(1 << (rank % 64));
        }
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        if a.universe() != &self.universe {
            return Err(Error::UniverseMismatch);
        }
        Ok(self.get_rank(a.rank()))
    }

    /// Number of satisfying assignments.
    pub fn sat_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn sat_ranks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.rows()).filter(move |&r| self.get_rank(r))
    }

    pub fn is_constant_false(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_constant_true(&self) -> bool {
        self.sat_count() == self.rows()
    }

    /// Complement within the full assignment space.
    pub fn negate(&self) -> FunTable {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        mask_tail(&mut words, self.rows());
        FunTable {
            universe: self.universe.clone(),
            words,
        }
    }

    pub fn or(&self, other: &FunTable) -> Result<FunTable> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch);
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        Ok(FunTable {
            universe: self.universe.clone(),
            words,
        })
    }

    pub fn and(&self, other: &FunTable) -> Result<FunTable> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch);
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        Ok(FunTable {
            universe: self.universe.clone(),
            words,
        })
    }

    /// Existential quantification: drop `v` and project the satisfying set.
    pub fn exists(&self, v: VarId) -> Result<FunTable> {
        let pos = self
            .universe
            .position(v)
            .ok_or(Error::VarNotInUniverse(v))?;
        let target = self.universe.without(v)?;
        let w = self.universe.len();
        let mut out = FunTable::constant(target, false);
        for rank in self.sat_ranks() {
            out.set_rank(drop_rank_bit(rank, w, pos), true);
        }
        Ok(out)
    }

    /// Conditions the table on `v = value`, removing `v` from the universe.
    pub fn restrict(&self, v: VarId, value: bool) -> Result<FunTable> {
        let pos = self
            .universe
            .position(v)
            .ok_or(Error::VarNotInUniverse(v))?;
        let target = self.universe.without(v)?;
        let w = self.universe.len();
        let mut out = FunTable::constant(target, false);
        for rank in self.sat_ranks() {
            let bit = rank >> (w - 1 - pos) & 1 == 1;
            if bit == value {
                out.set_rank(drop_rank_bit(rank, w, pos), true);
            }
        }
        Ok(out)
    }

    /// The table of the single literal `v` (or its negation) over `universe`.
    pub fn literal(universe: Universe, v: VarId, positive: bool) -> Result<FunTable> {
        let pos = universe.position(v).ok_or(Error::VarNotInUniverse(v))?;
        let w = universe.len();
        Ok(FunTable {
            words: {
                let mut t = FunTable::constant(universe.clone(), false);
                for rank in 0..1usize << w {
                    if (rank >> (w - 1 - pos) & 1 == 1) == positive {
                        t.set_rank(rank, true);
                    }
                }
                t.words
            },
            universe,
        })
    }
}

/// Removes the bit at universe position `pos` from a rank over `w` variables,
/// producing a rank over `w - 1` variables.
fn drop_rank_bit(rank: usize, w: usize, pos: usize) -> usize {
    let shift = w - 1 - pos; // significance of the dropped position
    let high = rank >> (shift + 1) << shift;
    let low = rank & ((1 << shift) - 1);
    high | low
}

fn mask_tail(words: &mut [u64], nrows: usize) {
    let rem = nrows % 64;
    if rem != 0 {
        let last = words.len() - 1;
        words[last] &= (1u64 << rem) - 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(n: u32) -> Universe {
        Universe::range(n)
    }

    #[test]
    fn negate_of_constant_false_is_full() {
        // complement of the empty set over {x}
        let f = FunTable::constant(u(1), false);
        let n = f.negate();
        assert_eq!(n.sat_count(), 2);
        assert!(n.is_constant_true());
    }

    #[test]
    fn negate_of_and_singleton() {
        // sat(x ∧ y) over {x, y} has one row; complement has three
        let x = FunTable::literal(u(2), VarId(1), true).unwrap();
        let y = FunTable::literal(u(2), VarId(2), true).unwrap();
        let f = x.and(&y).unwrap();
        assert_eq!(f.sat_count(), 1);
        assert_eq!(f.negate().sat_count(), 3);
    }

    #[test]
    fn exists_collapses_to_remaining_var() {
        // ∃x (x ∧ a) ≡ a
        let uni = Universe::new(vec![VarId(10), VarId(2)]).unwrap();
        let x = FunTable::literal(uni.clone(), VarId(10), true).unwrap();
        let a = FunTable::literal(uni.clone(), VarId(2), true).unwrap();
        let f = x.and(&a).unwrap();
        let e = f.exists(VarId(10)).unwrap();
        assert_eq!(e.universe().vars(), &[VarId(2)]);
        assert_eq!(e.sat_count(), 1);
        assert!(e.get_rank(1));
    }

    #[test]
    fn exists_of_constant_false() {
        let f = FunTable::constant(u(2), false);
        assert!(f.exists(VarId(1)).unwrap().is_constant_false());
    }

    #[test]
    fn exists_merges_branches() {
        // ∃x ((x∧a) ∨ (¬x∧b)) ≡ a ∨ b, by projecting the 8-row table
        let uni = Universe::new(vec![VarId(1), VarId(2), VarId(3)]).unwrap();
        let x = FunTable::literal(uni.clone(), VarId(1), true).unwrap();
        let a = FunTable::literal(uni.clone(), VarId(2), true).unwrap();
        let b = FunTable::literal(uni.clone(), VarId(3), true).unwrap();
        let f = x.and(&a).unwrap().or(&x.negate().and(&b).unwrap()).unwrap();
        let e = f.exists(VarId(1)).unwrap();
        let sub = uni.without(VarId(1)).unwrap();
        let a2 = FunTable::literal(sub.clone(), VarId(2), true).unwrap();
        let b2 = FunTable::literal(sub, VarId(3), true).unwrap();
        assert_eq!(e, a2.or(&b2).unwrap());
    }

    #[test]
    fn or_identity_and_idempotence() {
        let f = FunTable::literal(u(2), VarId(1), true).unwrap();
        let zero = FunTable::constant(u(2), false);
        assert_eq!(f.or(&zero).unwrap(), f);
        assert_eq!(f.and(&f).unwrap(), f);
    }

    #[test]
    fn or_of_adjacent_cubes() {
        // (x∧y) ∨ (x∧¬y) ≡ x over the 4-row table
        let x = FunTable::literal(u(2), VarId(1), true).unwrap();
        let y = FunTable::literal(u(2), VarId(2), true).unwrap();
        let f = x
            .and(&y)
            .unwrap()
            .or(&x.and(&y.negate()).unwrap())
            .unwrap();
        assert_eq!(f, x);
    }

    #[test]
    fn universe_mismatch_rejected() {
        let f = FunTable::constant(u(2), false);
        let g = FunTable::constant(u(3), false);
        assert!(matches!(f.or(&g), Err(Error::UniverseMismatch)));
    }

    #[test]
    fn empty_universe_constants() {
        let t = FunTable::constant(Universe::range(0), true);
        assert_eq!(t.rows(), 1);
        assert_eq!(t.sat_count(), 1);
        assert!(t.negate().is_constant_false());
    }

    #[test]
    fn exists_equals_or_of_restricts() {
        // spot check of the table-conditioning identity
        let uni = u(3);
        let ranks = [1usize, 3, 4, 6];
        let f = FunTable::from_sat_ranks(uni, ranks);
        let lhs = f.exists(VarId(2)).unwrap();
        let rhs = f
            .restrict(VarId(2), false)
            .unwrap()
            .or(&f.restrict(VarId(2), true).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }
}
