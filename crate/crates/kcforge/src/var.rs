//! Variables, ordered universes, and assignments.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A propositional variable, identified by a positive integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// An ordered set of variables. The order is significant: it fixes the
/// lexicographic rank of assignments and hence the bit layout of tables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Universe(Vec<VarId>);

impl Universe {
    pub fn new(vars: Vec<VarId>) -> Result<Universe> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::VarCollision(*v));
            }
        }
        Ok(Universe(vars))
    }

    /// Universe of variables 1..=n in ascending order.
    pub fn range(n: u32) -> Universe {
        Universe((1..=n).map(VarId).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> &[VarId] {
        &self.0
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.contains(&v)
    }

    pub fn position(&self, v: VarId) -> Option<usize> {
        self.0.iter().position(|&u| u == v)
    }

    /// The universe with `v` removed, preserving order.
    pub fn without(&self, v: VarId) -> Result<Universe> {
        if !self.contains(v) {
            return Err(Error::VarNotInUniverse(v));
        }
        Ok(Universe(self.0.iter().copied().filter(|&u| u != v).collect()))
    }

    pub fn iter(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().copied()
    }
}

/// A total assignment over a universe. Values are stored positionally
/// (bit `i` of the word array is the value of `universe[i]`), so universes
/// larger than 64 variables are supported.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    universe: Universe,
    words: Vec<u64>,
}

impl Assignment {
    pub fn all_false(universe: Universe) -> Assignment {
        let words = vec![0; universe.len().div_ceil(64).max(1)];
        Assignment { universe, words }
    }

    /// Builds an assignment from explicit (variable, value) pairs; every
    /// universe variable must be covered exactly once.
    pub fn from_pairs(universe: Universe, pairs: &[(VarId, bool)]) -> Result<Assignment> {
        let mut a = Assignment::all_false(universe);
        let mut seen = vec![false; a.universe.len()];
        for &(v, b) in pairs {
            let pos = a
                .universe
                .position(v)
                .ok_or(Error::VarNotInUniverse(v))?;
            seen[pos] = true;
            a.set_pos(pos, b);
        }
        debug_assert!(seen.iter().all(|&s| s), "assignment must be total");
        Ok(a)
    }

    /// Decodes the lexicographic rank of an assignment: position 0 of the
    /// universe is the most significant bit, so ranks enumerate assignments
    /// in lexicographic order of their value tuples.
    pub fn from_rank(universe: Universe, rank: usize) -> Assignment {
        let w = universe.len();
        assert!(w < usize::BITS as usize, "rank universe too large");
        let mut a = Assignment::all_false(universe);
        for pos in 0..w {
            a.set_pos(pos, (rank >> (w - 1 - pos)) & 1 == 1);
        }
        a
    }

    pub fn rank(&self) -> usize {
        let w = self.universe.len();
        assert!(w < usize::BITS as usize, "rank universe too large");
        let mut r = 0usize;
        for pos in 0..w {
            r |= (self.get_pos(pos) as usize) << (w - 1 - pos);
        }
        r
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn get(&self, v: VarId) -> Result<bool> {
        let pos = self.universe.position(v).ok_or(Error::VarNotInUniverse(v))?;
        Ok(self.get_pos(pos))
    }

    pub fn set(&mut self, v: VarId, b: bool) -> Result<()> {
        let pos = self.universe.position(v).ok_or(Error::VarNotInUniverse(v))?;
        self.set_pos(pos, b);
        Ok(())
    }

    pub fn get_pos(&self, pos: usize) -> bool {
        self.words[pos / 64] >> (pos % 64) & 1 == 1
    }

    pub fn set_pos(&mut self, pos: usize, b: bool) {
        let (w, s) = (pos / 64, pos % 64);
        if b {
            self.words[w] |= 1 << s;
        } else {
            self.words[w] &= !(1 << s);
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (VarId, bool)> + '_ {
        self.universe
            .vars()
            .iter()
            .enumerate()
            .map(move |(pos, &v)| (v, self.get_pos(pos)))
    }

    /// Projection onto a sub-universe (every target variable must exist here).
    pub fn project(&self, target: &Universe) -> Result<Assignment> {
        let mut out = Assignment::all_false(target.clone());
        for (pos, v) in target.vars().iter().enumerate() {
            let b = self.get(*v)?;
            out.set_pos(pos, b);
        }
        Ok(out)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, b) in self.pairs() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}={}", v, b as u8)?;
        }
        Ok(())
    }
}
