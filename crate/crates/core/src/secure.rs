//! Secure storage on top of a stable code.
//!
//! The `B` message symbols live in the extension `GF(q^B)` of the code's
//! binary field `GF(q)`. A payload `u = (secret ‖ randomness)` is precoded
//! as `x = u · Gab`, where `Gab` is the `B × B` Moore matrix on the
//! polynomial basis `1, y, …, y^(B-1)`, and `x` is stored with the stable
//! code applied to each base-field coordinate of the extension symbols.
//!
//! Secrecy is not assumed from rank-metric theory: [`SecureScheme::verify_secrecy`]
//! writes everything an eavesdropper sees as a `GF(q)`-linear map of the
//! `B²` payload coordinates and checks the ranks directly.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::eavesdropper::{leakage_observations, placements, predicted_secrecy_capacity, EveModel};
use crate::entropy::{conditional_entropy, entropy_symbols, mutual_information, ObservationSet};
use crate::error::{Error, Result};
use crate::ext::{ExtElem, ExtField};
use crate::field::{Field, FiniteField};
use crate::matrix::{moore_matrix, Mat, Matrix};
use crate::params::NodeId;
use crate::stable::{ShardVector, StableCode};

/// A node's `α` extension symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SecureShard {
    pub node_id: NodeId,
    pub symbols: Vec<ExtElem>,
}

#[derive(Debug, Clone)]
pub struct SecureScheme {
    code: StableCode,
    ext: ExtField,
    generator: Matrix<ExtField>,
    generator_inv: Matrix<ExtField>,
    secret_len: usize,
    random_len: usize,
}

/// Rank facts for one eavesdropper placement, in base-field symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SecrecyVerdict {
    pub eve: EveModel,
    /// `H(e)`.
    pub leaked: usize,
    /// `H(r)`.
    pub randomness: usize,
    /// `H(r | s, e)`.
    pub residual_randomness: usize,
    /// `I(s; e)`.
    pub mutual_information: usize,
}

impl SecrecyVerdict {
    pub fn leak_bounded(&self) -> bool {
        self.leaked <= self.randomness
    }

    pub fn passed(&self) -> bool {
        self.leak_bounded() && self.residual_randomness == 0 && self.mutual_information == 0
    }
}

impl SecureScheme {
    /// Stores as many secret symbols as the closed-form capacity allows
    /// against an `(l1, l2)` eavesdropper.
    pub fn new(code: &StableCode, l1: usize, l2: usize) -> Result<Self> {
        let secret = predicted_secrecy_capacity(code.params(), l1, l2)?;
        Self::with_random_len(code, code.params().file_size - secret)
    }

    /// Explicit split: `random_len` random symbols, the rest secret.
    pub fn with_random_len(code: &StableCode, random_len: usize) -> Result<Self> {
        let b = code.params().file_size;
        if !code.field().is_binary() {
            return Err(Error::FieldKindUnsupported);
        }
        if random_len >= b {
            return Err(Error::VacuousScheme);
        }
        let ext = ExtField::with_default_modulus(*code.field(), b)?;
        let basis: Vec<ExtElem> = (0..b).map(|i| ext.basis(i)).collect();
        let generator = moore_matrix(&ext, &basis, b, code.field().order())?;
        let generator_inv = generator.invert()?;
        Ok(SecureScheme { code: code.clone(), ext, generator, generator_inv, secret_len: b - random_len, random_len })
    }

    pub fn code(&self) -> &StableCode {
        &self.code
    }

    pub fn ext_field(&self) -> &ExtField {
        &self.ext
    }

    pub fn generator(&self) -> &Matrix<ExtField> {
        &self.generator
    }

    pub fn secret_len(&self) -> usize {
        self.secret_len
    }

    pub fn random_len(&self) -> usize {
        self.random_len
    }

    fn base(&self) -> &Field {
        self.code.field()
    }

    fn check_elems(&self, v: &[ExtElem], expected: usize) -> Result<()> {
        if v.len() != expected {
            return Err(Error::LengthMismatch { expected, got: v.len() });
        }
        let q = self.base().order();
        if let Some(bad) = v.iter().find(|e| e.len() != self.ext.degree() || e.iter().any(|&c| c >= q)) {
            return Err(Error::DimensionMismatch(format!("{bad:?} is not an element of GF({q}^{})", self.ext.degree())));
        }
        Ok(())
    }

    /// Uniform randomness for one precoding.
    pub fn draw_randomness<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<ExtElem> {
        let q = self.base().order();
        (0..self.random_len).map(|_| (0..self.ext.degree()).map(|_| rng.gen_range(0..q)).collect()).collect()
    }

    /// `x = (secret ‖ randomness) · Gab`.
    pub fn precode(&self, secret: &[ExtElem], randomness: &[ExtElem]) -> Result<Vec<ExtElem>> {
        self.check_elems(secret, self.secret_len)?;
        self.check_elems(randomness, self.random_len)?;
        let u: Vec<ExtElem> = secret.iter().chain(randomness).cloned().collect();
        self.generator.left_mul_vec(&u)
    }

    /// Inverse of [`precode`](Self::precode): returns `(secret, randomness)`.
    pub fn unprecode(&self, message: &[ExtElem]) -> Result<(Vec<ExtElem>, Vec<ExtElem>)> {
        self.check_elems(message, self.code.params().file_size)?;
        let mut u = self.generator_inv.left_mul_vec(message)?;
        let randomness = u.split_off(self.secret_len);
        Ok((u, randomness))
    }

    /// Stores an already precoded message, one base-field coordinate layer at a time.
    pub fn encode_message(&self, message: &[ExtElem]) -> Result<Vec<SecureShard>> {
        self.check_elems(message, self.code.params().file_size)?;
        let m = self.ext.degree();
        let p = self.code.params();
        let mut shards: Vec<SecureShard> = (1..=p.n)
            .map(|node_id| SecureShard { node_id, symbols: vec![vec![0; m]; p.alpha] })
            .collect();
        for c in 0..m {
            let layer: Vec<u64> = message.iter().map(|x| x[c]).collect();
            for (out, s) in shards.iter_mut().zip(self.code.encode_message(&layer)?) {
                for (sym, v) in out.symbols.iter_mut().zip(s.symbols) {
                    sym[c] = v;
                }
            }
        }
        Ok(shards)
    }

    pub fn encode(&self, secret: &[ExtElem], randomness: &[ExtElem]) -> Result<Vec<SecureShard>> {
        self.encode_message(&self.precode(secret, randomness)?)
    }

    /// Recovers the precoded message from any `k` shards.
    pub fn decode_message(&self, shards: &[SecureShard]) -> Result<Vec<ExtElem>> {
        let m = self.ext.degree();
        let b = self.code.params().file_size;
        let mut message = vec![vec![0; m]; b];
        for c in 0..m {
            let layer: Vec<ShardVector> = shards
                .iter()
                .map(|s| ShardVector { node_id: s.node_id, symbols: s.symbols.iter().map(|x| x[c]).collect() })
                .collect();
            let data = self.code.reconstruct(&layer)?;
            for (j, v) in data.row_vecs().concat().into_iter().enumerate() {
                message[j][c] = v;
            }
        }
        Ok(message)
    }

    /// Recovers the secret from any `k` shards.
    pub fn decode(&self, shards: &[SecureShard]) -> Result<Vec<ExtElem>> {
        Ok(self.unprecode(&self.decode_message(shards)?)?.0)
    }

    /// Everything `eve` sees as `GF(q)`-linear functionals of the `B²`
    /// payload coordinates; coordinate `i·B + l` is coefficient `l` of `u_i`.
    pub fn payload_leakage(&self, eve: &EveModel) -> Result<ObservationSet> {
        let rows = leakage_observations(&self.code, eve)?;
        let b = self.code.params().file_size;
        let m = self.ext.degree();
        let base = *self.base();
        // column (i, l): image of the payload with u_i = y^l and all else zero
        let mut columns = Vec::with_capacity(b * m);
        for i in 0..b {
            for l in 0..m {
                let mut u = vec![self.ext.zero(); b];
                u[i] = self.ext.basis(l);
                let x = self.generator.left_mul_vec(&u)?;
                let mut col = Vec::with_capacity(rows.len() * m);
                for r in 0..rows.len() {
                    let e = rows
                        .rows()
                        .row(r)
                        .iter()
                        .zip(&x)
                        .fold(self.ext.zero(), |acc, (a, xj)| self.ext.add(&acc, &self.ext.scale(*a, xj)));
                    col.extend(e);
                }
                columns.push(col);
            }
        }
        let map = Mat::from_fn(&base, rows.len() * m, b * m, |r, c| columns[c][r]);
        let labels = rows.labels().iter().flat_map(|l| (0..m).map(move |c| format!("{l}.{c}"))).collect();
        ObservationSet::with_labels(map, labels)
    }

    fn payload_units(&self, range: std::ops::Range<usize>, prefix: &str) -> ObservationSet {
        let m = self.ext.degree();
        let width = self.code.params().file_size * m;
        let (lo, hi) = (range.start * m, range.end * m);
        let rows = Mat::from_fn(self.base(), hi - lo, width, |r, c| u64::from(c == lo + r));
        ObservationSet::from_mat(rows, prefix)
    }

    /// Checks `H(e) <= H(r)`, `H(r | s, e) = 0` and `I(s; e) = 0`.
    pub fn verify_secrecy(&self, eve: &EveModel) -> Result<SecrecyVerdict> {
        let e = self.payload_leakage(eve)?;
        let s = self.payload_units(0..self.secret_len, "s");
        let r = self.payload_units(self.secret_len..self.code.params().file_size, "r");
        Ok(SecrecyVerdict {
            eve: eve.clone(),
            leaked: entropy_symbols(&e),
            randomness: entropy_symbols(&r),
            residual_randomness: conditional_entropy(&r, &s.union(&e)?)?,
            mutual_information: mutual_information(&s, &e)?,
        })
    }

    /// [`verify_secrecy`](Self::verify_secrecy) over every placement of the given sizes.
    pub fn verify_all(&self, l1: usize, l2: usize) -> Result<Vec<SecrecyVerdict>> {
        placements(self.code.params(), l1, l2)?.par_iter().map(|eve| self.verify_secrecy(eve)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s1_binary() -> StableCode {
        StableCode::new(6, 3, 2, Field::binary(4).unwrap()).unwrap()
    }

    #[test]
    fn sizes_follow_capacity() {
        let code = s1_binary();
        let s = SecureScheme::new(&code, 1, 1).unwrap();
        assert_eq!((s.secret_len(), s.random_len()), (1, 5));
        let open = SecureScheme::new(&code, 0, 0).unwrap();
        assert_eq!((open.secret_len(), open.random_len()), (6, 0));
        assert_eq!(SecureScheme::new(&code, 0, 2).unwrap_err(), Error::VacuousScheme);
        let prime = StableCode::new(6, 3, 2, Field::prime(11).unwrap()).unwrap();
        assert_eq!(SecureScheme::new(&prime, 1, 1).unwrap_err(), Error::FieldKindUnsupported);
    }

    #[test]
    fn precode_round_trips() {
        let code = s1_binary();
        let s = SecureScheme::new(&code, 1, 1).unwrap();
        let zero = s.precode(&[vec![0; 6]], &vec![vec![0; 6]; 5]).unwrap();
        assert!(zero.iter().all(|x| x.iter().all(|&c| c == 0)));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let secret = vec![vec![1, 2, 3, 4, 5, 6]];
        let r1 = s.draw_randomness(&mut rng);
        let r2 = s.draw_randomness(&mut rng);
        let x1 = s.precode(&secret, &r1).unwrap();
        let x2 = s.precode(&secret, &r2).unwrap();
        assert_ne!(x1, x2);
        assert_eq!(s.unprecode(&x1).unwrap(), (secret.clone(), r1));
        assert_eq!(s.unprecode(&x2).unwrap().0, secret);
        assert!(matches!(s.precode(&secret, &r2[..4]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn secret_survives_any_k_nodes() {
        let code = s1_binary();
        let s = SecureScheme::new(&code, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let secret = vec![vec![15, 0, 7, 1, 9, 3]];
        let shards = s.encode(&secret, &s.draw_randomness(&mut rng)).unwrap();
        for pick in shards.iter().cloned().combinations(3) {
            assert_eq!(s.decode(&pick).unwrap(), secret);
        }
    }

    #[test]
    fn gabidulin_generator_is_mrd() {
        let s = SecureScheme::new(&s1_binary(), 1, 1).unwrap();
        let g = s.generator();
        let mut singular_gapped = None;
        for r in 1..=6 {
            for rows in (0..6).combinations(r) {
                let consecutive = rows.windows(2).all(|w| w[1] == w[0] + 1);
                for cols in (0..6).combinations(r) {
                    let invertible = g.select_rows(&rows).select_columns(&cols).is_invertible();
                    if consecutive {
                        assert!(invertible, "rows {rows:?} cols {cols:?}");
                    } else if !invertible && singular_gapped.is_none() {
                        singular_gapped = Some((rows.clone(), cols));
                    }
                }
            }
        }
        // minors on gapped rows may vanish
        assert_eq!(singular_gapped, Some((vec![0, 2], vec![0, 3])));
    }

    #[test]
    fn empty_eve_learns_nothing() {
        let code = s1_binary();
        let s = SecureScheme::new(&code, 1, 1).unwrap();
        let v = s.verify_secrecy(&EveModel::new(code.params(), &[], &[]).unwrap()).unwrap();
        assert_eq!((v.leaked, v.mutual_information), (0, 0));
    }

    #[test]
    fn one_one_eavesdropper_is_blind() {
        let code = s1_binary();
        let s = SecureScheme::new(&code, 1, 1).unwrap();
        let verdicts = s.verify_all(1, 1).unwrap();
        assert_eq!(verdicts.len(), 30);
        for v in &verdicts {
            assert!(v.passed(), "{v:?}");
            assert_eq!(v.leaked, 5 * 6);
        }
    }

    #[test]
    fn short_randomness_leaks() {
        let code = s1_binary();
        let s = SecureScheme::with_random_len(&code, 4).unwrap();
        let eve = EveModel::new(code.params(), &[1], &[2]).unwrap();
        let v = s.verify_secrecy(&eve).unwrap();
        assert!(!v.leak_bounded());
        assert_eq!(v.mutual_information, 6);
        assert!(!v.passed());
    }
}
