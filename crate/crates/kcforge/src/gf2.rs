//! Arithmetic in GF(2^t) and the affine permutation family x ↦ ax + b.

use crate::error::{Error, Result};

/// Reduction polynomials for GF(2^t), t = 1..=16: the lexicographically
/// least monic irreducible of each degree, encoded with the leading term
/// included (degree-t bit set). Verified against an independent
/// polynomial-factorization oracle in the tests.
pub const IRREDUCIBLE: [u32; 16] = [
    0x00003, // t=1:  z + 1 (degenerate; arithmetic is plain GF(2))
    0x00007, // t=2:  z^2 + z + 1
    0x0000b, // t=3:  z^3 + z + 1
    0x00013, // t=4:  z^4 + z + 1
    0x00025, // t=5:  z^5 + z^2 + 1
    0x00043, // t=6:  z^6 + z + 1
    0x00083, // t=7:  z^7 + z + 1
    0x0011b, // t=8:  z^8 + z^4 + z^3 + z + 1
    0x00203, // t=9:  z^9 + z + 1
    0x00409, // t=10: z^10 + z^3 + 1
    0x00805, // t=11: z^11 + z^2 + 1
    0x01009, // t=12: z^12 + z^3 + 1
    0x0201b, // t=13: z^13 + z^4 + z^3 + z + 1
    0x04021, // t=14: z^14 + z^5 + 1
    0x08003, // t=15: z^15 + z + 1
    0x1002b, // t=16: z^16 + z^5 + z^3 + z + 1
];

pub const MAX_DEGREE: u8 = 16;

/// An element of GF(2^t) under the fixed reduction polynomial for t.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GfElement {
    t: u8,
    bits: u16,
}

impl GfElement {
    pub fn new(t: u8, bits: u16) -> Result<GfElement> {
        if t == 0 || t > MAX_DEGREE {
            return Err(Error::DegreeOutOfRange(t));
        }
        debug_assert!(t == 16 || bits < (1 << t), "element exceeds field size");
        Ok(GfElement { t, bits })
    }

    pub fn zero(t: u8) -> Result<GfElement> {
        GfElement::new(t, 0)
    }

    pub fn one(t: u8) -> Result<GfElement> {
        GfElement::new(t, 1)
    }

    pub fn degree(self) -> u8 {
        self.t
    }

    pub fn bits(self) -> u16 {
        self.bits
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Addition is bitwise XOR (characteristic 2).
    pub fn add(self, other: GfElement) -> Result<GfElement> {
        if self.t != other.t {
            return Err(Error::DegreeMismatch(self.t, other.t));
        }
        Ok(GfElement {
            t: self.t,
            bits: self.bits ^ other.bits,
        })
    }

    /// Carry-less polynomial product reduced by the fixed irreducible.
    pub fn mul(self, other: GfElement) -> Result<GfElement> {
        if self.t != other.t {
            return Err(Error::DegreeMismatch(self.t, other.t));
        }
        let prod = clmul(self.bits as u64, other.bits as u64);
        let reduced = pmod(prod, IRREDUCIBLE[self.t as usize - 1] as u64);
        Ok(GfElement {
            t: self.t,
            bits: reduced as u16,
        })
    }
}

/// Carry-less (XOR) multiplication of polynomials over GF(2).
pub(crate) fn clmul(mut a: u64, mut b: u64) -> u64 {
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        a <<= 1;
        b >>= 1;
    }
    acc
}

/// Remainder of polynomial division over GF(2).
pub(crate) fn pmod(mut a: u64, m: u64) -> u64 {
    let md = 63 - m.leading_zeros();
    while a != 0 {
        let ad = 63 - a.leading_zeros();
        if ad < md {
            break;
        }
        a ^= m << (ad - md);
    }
    a
}

/// An affine map x ↦ a·x + b over GF(2^t) with a ≠ 0; every such map is a
/// permutation of the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AffinePerm {
    pub a: GfElement,
    pub b: GfElement,
}

impl AffinePerm {
    pub fn new(a: GfElement, b: GfElement) -> Result<AffinePerm> {
        if a.t != b.t {
            return Err(Error::DegreeMismatch(a.t, b.t));
        }
        assert!(!a.is_zero(), "affine permutation requires a != 0");
        Ok(AffinePerm { a, b })
    }

    pub fn degree(self) -> u8 {
        self.a.t
    }

    pub fn apply(self, x: GfElement) -> Result<GfElement> {
        self.a.mul(x)?.add(self.b)
    }

    /// Action on 1-based slot indices: slot i corresponds to the field
    /// element with bit pattern i - 1.
    pub fn slot_image(self, slot: usize) -> Result<usize> {
        let n = 1usize << self.degree();
        if slot == 0 || slot > n {
            return Err(Error::SlotOutOfRange(slot, n));
        }
        let x = GfElement::new(self.degree(), (slot - 1) as u16)?;
        Ok(self.apply(x)?.bits as usize + 1)
    }

    /// The 2t-bit encoding carried by the z-variables: the t bits of `a`
    /// followed by the t bits of `b`, most significant bit first. Exactly
    /// when a ≠ 0, the first t bits are not all zero.
    pub fn rep(self) -> Vec<bool> {
        let t = self.degree() as usize;
        let mut out = Vec::with_capacity(2 * t);
        for i in (0..t).rev() {
            out.push(self.a.bits >> i & 1 == 1);
        }
        for i in (0..t).rev() {
            out.push(self.b.bits >> i & 1 == 1);
        }
        out
    }
}

/// All n'(n'-1) affine permutations of GF(2^t), in ascending (a, b) order.
pub fn enumerate_perms(t: u8) -> Result<Vec<AffinePerm>> {
    if t == 0 || t > MAX_DEGREE {
        return Err(Error::DegreeOutOfRange(t));
    }
    let n = 1u32 << t;
    let mut out = Vec::with_capacity((n * (n - 1)) as usize);
    for a in 1..n {
        for b in 0..n {
            out.push(AffinePerm::new(
                GfElement::new(t, a as u16)?,
                GfElement::new(t, b as u16)?,
            )?);
        }
    }
    Ok(out)
}
