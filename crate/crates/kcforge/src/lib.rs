//! Knowledge-compilation toolkit.
//!
//! The crate provides explicit Boolean function tables, unambiguous DNFs,
//! NNF circuit DAGs with decomposability/determinism/structuredness checks,
//! v-trees, an SDD engine with apply/negate, rectangle cover and partition
//! oracles for communication-complexity measures, a fixed-partition to
//! best-partition lifting construction over GF(2^t), and monotone arithmetic
//! circuits with PSDD validation. Everything is exact and brute-force
//! verifiable at desk scale; guarded operations refuse inputs that would
//! exceed their enumeration budget.

pub mod ac;
pub mod comm;
pub mod dnf;
pub mod error;
pub mod gf2;
pub mod lift;
pub mod nnf;
pub mod sdd;
pub mod table;
pub mod var;
pub mod vtree;

pub use error::{Error, Result};
pub use var::{Assignment, Universe, VarId};

/// Variable-count budget for operations that enumerate all assignments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guard(pub usize);

impl Guard {
    /// Default budget for truth-table construction (2^20 rows).
    pub const TABLE: Guard = Guard(20);
    /// Default budget for exact cover/partition solving.
    pub const COMM: Guard = Guard(12);

    /// Absolute ceiling regardless of user override; 2^28 bits is 32 MiB.
    pub const HARD_MAX: usize = 28;

    pub fn check(self, vars: usize, what: &'static str) -> Result<()> {
        let limit = self.0.min(Self::HARD_MAX);
        if vars > limit {
            Err(Error::GuardExceeded {
                what,
                vars,
                guard: limit,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Guard {
    fn default() -> Self {
        Guard::TABLE
    }
}
