//! Extension fields GF(q^m) built as polynomial towers over a base [`Field`].
//!
//! An element is the coefficient vector (low degree first) of a polynomial
//! of degree below `m`, reduced modulo a monic irreducible polynomial over
//! the base field. The coefficients are exactly the coordinates with respect
//! to the basis `1, y, ..., y^(m-1)` where `y` is the adjoined root.

use crate::error::{Error, Result};
use crate::field::{prime_factors, Field, FieldSpec, FiniteField};

/// Extension element: `m` base-field coefficients.
pub type ExtElem = Vec<u64>;

/// Published tower moduli, low coefficient first, monic.
///
/// `GF(16)` (reduction `x^4 + x + 1`) extended by degree 6 uses
/// `z^6 + 2z^3 + 2`, where `2` is the class of `x` in `GF(16)`.
const GF16_DEGREE6: [u64; 7] = [2, 0, 0, 2, 0, 0, 1];

#[derive(Debug, Clone, PartialEq)]
pub struct ExtField {
    base: Field,
    degree: usize,
    modulus: Vec<u64>,
    order: u64,
}

impl ExtField {
    /// Tower with an explicit monic modulus of degree `modulus.len() - 1`.
    pub fn new(base: Field, modulus: Vec<u64>) -> Result<Self> {
        let degree = modulus.len().saturating_sub(1);
        if degree == 0 || modulus[degree] != 1 {
            return Err(Error::UnsupportedField("extension modulus must be monic of degree >= 1".into()));
        }
        let order = checked_power(base.order(), degree)
            .ok_or_else(|| Error::UnsupportedField(format!("{}^{degree} overflows", base.order())))?;
        if modulus.iter().any(|&c| c >= base.order()) {
            return Err(Error::UnsupportedField("modulus coefficient outside base field".into()));
        }
        let ext = ExtField { base, degree, modulus, order };
        if !ext.modulus_is_irreducible() {
            return Err(Error::UnsupportedField(format!("tower modulus {:?} is reducible", ext.modulus)));
        }
        Ok(ext)
    }

    /// Tower of the given degree with the published modulus when one exists,
    /// otherwise the first irreducible monic polynomial in lexicographic order
    /// of its coefficient vector (constant term most significant).
    pub fn with_default_modulus(base: Field, degree: usize) -> Result<Self> {
        if base.spec() == FieldSpec::binary(4) && degree == 6 {
            return Self::new(base, GF16_DEGREE6.to_vec());
        }
        let q = base.order();
        checked_power(q, degree).ok_or_else(|| Error::UnsupportedField(format!("{q}^{degree} overflows")))?;
        let total = checked_power(q, degree).unwrap();
        for idx in 0..total {
            let mut modulus = Vec::with_capacity(degree + 1);
            let mut rest = idx;
            let mut coeffs = vec![0u64; degree];
            for c in (0..degree).rev() {
                coeffs[c] = rest % q;
                rest /= q;
            }
            modulus.extend(coeffs);
            modulus.push(1);
            if let Ok(ext) = Self::new(base, modulus) {
                return Ok(ext);
            }
        }
        Err(Error::UnsupportedField(format!("no irreducible polynomial of degree {degree}")))
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Embeds a base-field scalar.
    pub fn embed(&self, a: u64) -> ExtElem {
        let mut v = vec![0; self.degree];
        v[0] = a;
        v
    }

    /// The polynomial basis element `y^i`.
    pub fn basis(&self, i: usize) -> ExtElem {
        let mut v = vec![0; self.degree];
        v[i] = 1;
        v
    }

    /// Base-field scalar times extension element (coordinate-wise).
    pub fn scale(&self, c: u64, a: &ExtElem) -> ExtElem {
        a.iter().map(|x| self.base.mul(&c, x)).collect()
    }

    /// `x^e mod modulus`, computed in the quotient ring (valid even if reducible).
    fn x_power(&self, e: u64) -> ExtElem {
        let x = if self.degree == 1 {
            // x mod (x + c0) = -c0
            vec![self.base.neg(&self.modulus[0])]
        } else {
            self.basis(1)
        };
        self.pow(&x, e)
    }

    /// Rabin's test: `x^(q^m) = x` and `gcd(x^(q^(m/r)) - x, f) = 1` for primes `r | m`.
    fn modulus_is_irreducible(&self) -> bool {
        let q = self.base.order();
        let m = self.degree;
        let x = self.x_power(1);
        let frob = |k: usize| -> ExtElem {
            let mut v = x.clone();
            for _ in 0..k {
                v = self.pow(&v, q);
            }
            v
        };
        if frob(m) != x {
            return false;
        }
        for r in prime_factors(m as u64) {
            let h = self.sub(&frob(m / r as usize), &x);
            let g = poly_gcd(&self.base, &self.modulus, &trim(h));
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

fn checked_power(base: u64, e: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

fn trim(mut p: Vec<u64>) -> Vec<u64> {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

/// Remainder of `a` divided by nonzero `b` (both trimmed, low coefficient first).
fn poly_rem(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = f.inv(&b[db]).expect("trimmed divisor");
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let factor = f.mul(r.last().unwrap(), &lead_inv);
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = f.sub(&r[shift + i], &f.mul(&factor, c));
        }
        r = trim(r);
    }
    r
}

fn poly_gcd(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(f, &a, &b);
        a = b;
        b = r;
    }
    a
}

impl FiniteField for ExtField {
    type Elem = ExtElem;

    fn zero(&self) -> ExtElem {
        vec![0; self.degree]
    }

    fn one(&self) -> ExtElem {
        self.embed(1)
    }

    fn is_zero(&self, a: &ExtElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }

    fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }

    fn neg(&self, a: &ExtElem) -> ExtElem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }

    fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let f = &self.base;
        let m = self.degree;
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = f.add(&prod[i + j], &f.mul(x, y));
            }
        }
        // reduce with the monic modulus from the top down
        for top in (m..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (i, mc) in self.modulus[..m].iter().enumerate() {
                let idx = top - m + i;
                prod[idx] = f.sub(&prod[idx], &f.mul(&c, mc));
            }
        }
        prod.truncate(m);
        prod
    }

    fn inv(&self, a: &ExtElem) -> Option<ExtElem> {
        if self.is_zero(a) {
            None
        } else {
            Some(self.pow(a, self.order - 2))
        }
    }

    fn order(&self) -> u64 {
        self.order
    }
}
