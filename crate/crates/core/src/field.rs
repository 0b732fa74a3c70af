//! Exact arithmetic over prime fields GF(p) and binary extension fields GF(2^m).
//!
//! Elements of a [`Field`] are plain `u64` residues: an integer below `p` for
//! prime fields, or the coefficient bit pattern of a polynomial of degree
//! below `m` for binary fields (polynomial basis, bit `i` is the coefficient
//! of `x^i`). Matrices carry the field handle and store raw residues, so
//! arithmetic always goes through the handle.
//!
//! Binary fields default to a fixed reduction polynomial per degree, see
//! [`DEFAULT_BINARY_POLYS`]. Shard files record the polynomial explicitly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported prime modulus.
pub const MAX_PRIME: u64 = 1 << 31;
/// Largest supported binary extension degree.
pub const MAX_BINARY_DEGREE: u32 = 24;

/// Default reduction polynomials for GF(2^m), indexed by `m - 1`.
///
/// Each entry includes the leading `x^m` bit. All are primitive trinomials or
/// pentanomials from the standard tables.
pub const DEFAULT_BINARY_POLYS: [u64; 24] = [
    0x3,        // x + 1
    0x7,        // x^2 + x + 1
    0xB,        // x^3 + x + 1
    0x13,       // x^4 + x + 1
    0x25,       // x^5 + x^2 + 1
    0x43,       // x^6 + x + 1
    0x83,       // x^7 + x + 1
    0x11D,      // x^8 + x^4 + x^3 + x^2 + 1
    0x211,      // x^9 + x^4 + 1
    0x409,      // x^10 + x^3 + 1
    0x805,      // x^11 + x^2 + 1
    0x1053,     // x^12 + x^6 + x^4 + x + 1
    0x201B,     // x^13 + x^4 + x^3 + x + 1
    0x4443,     // x^14 + x^10 + x^6 + x + 1
    0x8003,     // x^15 + x + 1
    0x1100B,    // x^16 + x^12 + x^3 + x + 1
    0x20009,    // x^17 + x^3 + 1
    0x40081,    // x^18 + x^7 + 1
    0x80027,    // x^19 + x^5 + x^2 + x + 1
    0x100009,   // x^20 + x^3 + 1
    0x200005,   // x^21 + x^2 + 1
    0x400003,   // x^22 + x + 1
    0x800021,   // x^23 + x^5 + 1
    0x1000087,  // x^24 + x^7 + x^2 + x + 1
];

/// Operations shared by every field the matrices and codes work over.
pub trait FiniteField: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Number of elements.
    fn order(&self) -> u64;

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Description of a field, as it appears in configs and shard headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    Prime { p: u64 },
    BinaryExtension { m: u32, poly: u64 },
}

impl FieldSpec {
    pub fn prime(p: u64) -> Self {
        FieldSpec::Prime { p }
    }

    /// GF(2^m) with the default reduction polynomial (unchecked if `m` is out of range).
    pub fn binary(m: u32) -> Self {
        let poly = if (1..=MAX_BINARY_DEGREE).contains(&m) {
            DEFAULT_BINARY_POLYS[m as usize - 1]
        } else {
            0
        };
        FieldSpec::BinaryExtension { m, poly }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime { p } => write!(f, "GF({p})"),
            FieldSpec::BinaryExtension { m, poly } => write!(f, "GF(2^{m}) mod {poly:#x}"),
        }
    }
}

/// A validated finite field with a known primitive element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    spec: FieldSpec,
    order: u64,
    primitive: u64,
}

impl Field {
    /// Validates `spec` and builds the field handle.
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let order = match spec {
            FieldSpec::Prime { p } => {
                if p > MAX_PRIME {
                    return Err(Error::UnsupportedField(format!("p = {p} exceeds 2^31")));
                }
                if !is_prime(p) {
                    return Err(Error::NonPrimeModulus(p));
                }
                p
            }
            FieldSpec::BinaryExtension { m, poly } => {
                if !(1..=MAX_BINARY_DEGREE).contains(&m) {
                    return Err(Error::UnsupportedField(format!("m = {m} outside 1..=24")));
                }
                if degree(poly) != Some(m) || !is_irreducible_gf2(poly) {
                    return Err(Error::ReduciblePolynomial { m, poly });
                }
                1u64 << m
            }
        };
        let mut field = Field { spec, order, primitive: 1 };
        field.primitive = field.find_primitive();
        Ok(field)
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(FieldSpec::prime(p))
    }

    pub fn binary(m: u32) -> Result<Self> {
        Self::new(FieldSpec::binary(m))
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_binary(&self) -> bool {
        matches!(self.spec, FieldSpec::BinaryExtension { .. })
    }

    /// Characteristic of the field.
    pub fn characteristic(&self) -> u64 {
        match self.spec {
            FieldSpec::Prime { p } => p,
            FieldSpec::BinaryExtension { .. } => 2,
        }
    }

    /// The smallest element (by residue) generating the multiplicative group.
    pub fn primitive_element(&self) -> u64 {
        self.primitive
    }

    /// Checks that `v` is a canonical residue of this field.
    pub fn element(&self, v: u64) -> Result<u64> {
        if v < self.order {
            Ok(v)
        } else {
            Err(Error::NotAnElement { value: v, order: self.order })
        }
    }

    /// Wraps a residue into a bound [`FieldElem`].
    pub fn elem(&self, v: u64) -> Result<FieldElem> {
        Ok(FieldElem { value: self.element(v)?, field: *self })
    }

    /// Reduces an arbitrary integer into the field (mod p, or by masking to m bits).
    pub fn reduce(&self, v: u64) -> u64 {
        match self.spec {
            FieldSpec::Prime { p } => v % p,
            FieldSpec::BinaryExtension { .. } => v & (self.order - 1),
        }
    }

    /// Multiplicative order of a nonzero element; 0 for zero.
    pub fn element_order(&self, a: u64) -> u64 {
        if a == 0 {
            return 0;
        }
        let group = self.order - 1;
        let mut ord = group;
        for p in prime_factors(group) {
            while ord.is_multiple_of(p) && self.pow(&a, ord / p) == 1 {
                ord /= p;
            }
        }
        ord
    }

    pub fn is_generator(&self, a: u64) -> bool {
        a != 0 && self.element_order(a) == self.order - 1
    }

    fn find_primitive(&self) -> u64 {
        (1..self.order)
            .find(|&a| self.is_generator(a))
            .expect("every finite field has a primitive element")
    }

    /// Bytes needed to store one symbol in little-endian fixed width.
    pub fn symbol_width(&self) -> usize {
        let bits = 64 - (self.order - 1).leading_zeros() as usize;
        bits.div_ceil(8).max(1)
    }

    /// Number of whole data bits one symbol can carry.
    pub fn bits_per_symbol(&self) -> u32 {
        63 - self.order.leading_zeros()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.spec.fmt(f)
    }
}

impl FiniteField for Field {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        match self.spec {
            FieldSpec::Prime { p } => (a + b) % p,
            FieldSpec::BinaryExtension { .. } => a ^ b,
        }
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        match self.spec {
            FieldSpec::Prime { p } => (a + p - b) % p,
            FieldSpec::BinaryExtension { .. } => a ^ b,
        }
    }

    fn neg(&self, a: &u64) -> u64 {
        match self.spec {
            FieldSpec::Prime { p } => (p - a) % p,
            FieldSpec::BinaryExtension { .. } => *a,
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        match self.spec {
            FieldSpec::Prime { p } => a * b % p,
            FieldSpec::BinaryExtension { m, poly } => gf2_mulmod(*a, *b, m, poly),
        }
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(self.pow(a, self.order - 2))
        }
    }

    fn order(&self) -> u64 {
        self.order
    }
}

fn gf2_mulmod(mut a: u64, mut b: u64, m: u32, poly: u64) -> u64 {
    let top = 1u64 << m;
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= poly;
        }
    }
    acc
}

fn degree(poly: u64) -> Option<u32> {
    if poly == 0 {
        None
    } else {
        Some(63 - poly.leading_zeros())
    }
}

/// Remainder of carry-less division over GF(2).
fn gf2_rem(mut a: u64, b: u64) -> u64 {
    let db = degree(b).expect("nonzero divisor");
    while let Some(da) = degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Exhaustive factor search: no polynomial of degree 1..=deg/2 divides `poly`.
pub fn is_irreducible_gf2(poly: u64) -> bool {
    let Some(d) = degree(poly) else { return false };
    if d == 0 {
        return false;
    }
    for fd in 1..=d / 2 {
        for low in 0..(1u64 << fd) {
            let cand = (1u64 << fd) | low;
            if gf2_rem(poly, cand) == 0 {
                return false;
            }
        }
    }
    true
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A field element bound to its field, with operator overloads.
///
/// Operators panic if the operands come from different fields.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    value: u64,
    field: Field,
}

impl FieldElem {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inv(&self) -> Option<FieldElem> {
        self.field.inv(&self.value).map(|value| FieldElem { value, field: self.field })
    }

    pub fn pow(&self, e: u64) -> FieldElem {
        FieldElem { value: self.field.pow(&self.value, e), field: self.field }
    }

    fn check(&self, other: &FieldElem) {
        assert_eq!(self.field, other.field, "mixed-field arithmetic");
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.value, self.field)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl $tr for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                self.check(&rhs);
                FieldElem { value: FiniteField::$method(&self.field, &self.value, &rhs.value), field: self.field }
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { value: FiniteField::neg(&self.field, &self.value), field: self.field }
    }
}
