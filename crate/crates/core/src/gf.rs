//! Binary extension fields GF(2^8) and GF(2^16), and the systematic MDS
//! base code built on them.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A field element. GF(2^8) elements use the low byte only.
pub type Symbol = u16;

const POLY_8: u32 = 0x11D;
const POLY_16: u32 = 0x1100B;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub bits: u32,
    pub primitive_poly: u32,
}

impl FieldSpec {
    pub const GF256: FieldSpec = FieldSpec { bits: 8, primitive_poly: POLY_8 };
    pub const GF65536: FieldSpec = FieldSpec { bits: 16, primitive_poly: POLY_16 };

    pub fn with_bits(bits: u32) -> Result<Self> {
        match bits {
            8 => Ok(Self::GF256),
            16 => Ok(Self::GF65536),
            other => Err(Error::UnsupportedField(other)),
        }
    }

    pub fn from_order(order: u64) -> Result<Self> {
        match order {
            256 => Ok(Self::GF256),
            65536 => Ok(Self::GF65536),
            other => Err(Error::UnsupportedField(other.trailing_zeros())),
        }
    }

    /// Smallest supported field holding `n` distinct evaluation points.
    pub fn for_length(n: usize) -> Result<Self> {
        if n <= Self::GF256.order() {
            Ok(Self::GF256)
        } else if n <= Self::GF65536.order() {
            Ok(Self::GF65536)
        } else {
            Err(Error::LengthExceedsField { n, order: Self::GF65536.order() })
        }
    }

    pub fn order(&self) -> usize {
        1 << self.bits
    }

    /// Bytes used to carry one symbol on the wire.
    pub fn symbol_bytes(&self) -> usize {
        (self.bits as usize).div_ceil(8)
    }

    pub fn field(&self) -> Result<&'static Field> {
        static GF8: OnceLock<Field> = OnceLock::new();
        static GF16: OnceLock<Field> = OnceLock::new();
        match *self {
            Self::GF256 => Ok(GF8.get_or_init(|| Field::build(Self::GF256))),
            Self::GF65536 => Ok(GF16.get_or_init(|| Field::build(Self::GF65536))),
            other => Err(Error::UnsupportedField(other.bits)),
        }
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self::GF256
    }
}

/// Log/antilog tables for one field.
#[derive(Debug)]
pub struct Field {
    spec: FieldSpec,
    /// `exp[i] = g^i`, doubled so `exp[log x + log y]` needs no reduction.
    exp: Vec<Symbol>,
    log: Vec<u32>,
}

impl Field {
    fn build(spec: FieldSpec) -> Field {
        let order = spec.order();
        let mut exp = vec![0; 2 * order];
        let mut log = vec![0; order];
        let mut x: u32 = 1;
        for (i, slot) in exp.iter_mut().enumerate().take(order - 1) {
            *slot = x as Symbol;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (order as u32) != 0 {
                x ^= spec.primitive_poly;
            }
        }
        assert_eq!(x, 1, "polynomial {:#x} is not primitive", spec.primitive_poly);
        for i in order - 1..2 * order {
            exp[i] = exp[i - (order - 1)];
        }
        Field { spec, exp, log }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    #[inline]
    pub fn add(&self, x: Symbol, y: Symbol) -> Symbol {
        x ^ y
    }

    #[inline]
    pub fn mul(&self, x: Symbol, y: Symbol) -> Symbol {
        if x == 0 || y == 0 {
            return 0;
        }
        self.exp[(self.log[x as usize] + self.log[y as usize]) as usize]
    }

    #[inline]
    pub fn inv(&self, x: Symbol) -> Option<Symbol> {
        if x == 0 {
            return None;
        }
        let group = self.spec.order() as u32 - 1;
        Some(self.exp[((group - self.log[x as usize]) % group) as usize])
    }

    pub fn pow(&self, x: Symbol, e: u32) -> Symbol {
        if e == 0 {
            return 1;
        }
        if x == 0 {
            return 0;
        }
        let group = self.spec.order() as u64 - 1;
        self.exp[((self.log[x as usize] as u64 * e as u64) % group) as usize]
    }

    /// Inverts the `size x size` row-major matrix in place; `None` if singular.
    pub fn invert(&self, mut m: Vec<Symbol>, size: usize) -> Option<Vec<Symbol>> {
        let mut inv = vec![0; size * size];
        for i in 0..size {
            inv[i * size + i] = 1;
        }
        for col in 0..size {
            let pivot = (col..size).find(|&row| m[row * size + col] != 0)?;
            if pivot != col {
                for j in 0..size {
                    m.swap(pivot * size + j, col * size + j);
                    inv.swap(pivot * size + j, col * size + j);
                }
            }
            let scale = self.inv(m[col * size + col])?;
            for j in 0..size {
                m[col * size + j] = self.mul(m[col * size + j], scale);
                inv[col * size + j] = self.mul(inv[col * size + j], scale);
            }
            for row in 0..size {
                let factor = m[row * size + col];
                if row == col || factor == 0 {
                    continue;
                }
                for j in 0..size {
                    m[row * size + j] ^= self.mul(factor, m[col * size + j]);
                    inv[row * size + j] ^= self.mul(factor, inv[col * size + j]);
                }
            }
        }
        Some(inv)
    }
}

/// Systematic `[n, k]` MDS code with generator `[I | P]`.
///
/// The generator is derived from the Vandermonde matrix on evaluation points
/// `0, 1, ..., n-1`; only `(n, k, field)` identify a code.
#[derive(Debug, Clone)]
pub struct MdsCode {
    n: usize,
    k: usize,
    field: &'static Field,
    /// `k x n`, row-major.
    generator: Vec<Symbol>,
}

impl MdsCode {
    pub fn new(n: usize, k: usize, spec: FieldSpec) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidDimensions { n, k });
        }
        if n > spec.order() {
            return Err(Error::LengthExceedsField { n, order: spec.order() });
        }
        let field = spec.field()?;
        let vandermonde: Vec<Symbol> =
            (0..k).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| field.pow(j as Symbol, i as u32)).collect();
        let left: Vec<Symbol> = (0..k).flat_map(|i| vandermonde[i * n..i * n + k].to_vec()).collect();
        let left_inv = field.invert(left, k).ok_or(Error::Singular)?;
        let mut generator = vec![0; k * n];
        for i in 0..k {
            for j in 0..n {
                generator[i * n + j] =
                    (0..k).fold(0, |acc, l| acc ^ field.mul(left_inv[i * k + l], vandermonde[l * n + j]));
            }
        }
        Ok(MdsCode { n, k, field, generator })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &'static Field {
        self.field
    }

    pub fn field_spec(&self) -> FieldSpec {
        self.field.spec()
    }

    pub fn generator(&self) -> &[Symbol] {
        &self.generator
    }

    pub fn encode(&self, message: &[Symbol]) -> Result<Vec<Symbol>> {
        if message.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, actual: message.len() });
        }
        let mut out = message.to_vec();
        out.extend((self.k..self.n).map(|j| {
            message.iter().enumerate().fold(0, |acc, (i, &m)| acc ^ self.field.mul(m, self.generator[i * self.n + j]))
        }));
        Ok(out)
    }

    /// Recovers the message from any `k` surviving symbols (`None` = erased).
    pub fn decode(&self, received: &[Option<Symbol>]) -> Result<Vec<Symbol>> {
        if received.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, actual: received.len() });
        }
        let erased = received.iter().filter(|s| s.is_none()).count();
        if erased > self.n - self.k {
            return Err(Error::TooManyErasures { erased, capability: self.n - self.k });
        }
        if let Some(message) = received[..self.k].iter().copied().collect::<Option<Vec<_>>>() {
            return Ok(message);
        }
        let cols: Vec<usize> = (0..self.n).filter(|&j| received[j].is_some()).take(self.k).collect();
        let sub = self.submatrix(&cols);
        let inv = self.field.invert(sub, self.k).ok_or(Error::Singular)?;
        // message * sub = y  =>  message = y * sub^-1
        let y: Vec<Symbol> = cols.iter().map(|&j| received[j].unwrap()).collect();
        Ok((0..self.k).map(|c| (0..self.k).fold(0, |acc, r| acc ^ self.field.mul(y[r], inv[r * self.k + c]))).collect())
    }

    /// `k x k` matrix formed by generator columns `cols`.
    pub fn submatrix(&self, cols: &[usize]) -> Vec<Symbol> {
        (0..self.k).flat_map(|i| cols.iter().map(move |&j| self.generator[i * self.n + j])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf256_axioms_exhaustive() {
        let f = FieldSpec::GF256.field().unwrap();
        for x in 0..256u16 {
            assert_eq!(f.mul(x, 1), x);
            assert_eq!(f.mul(x, 0), 0);
            if x != 0 {
                assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
            }
            for y in 0..256u16 {
                assert_eq!(f.mul(x, y), f.mul(y, x));
            }
        }
        for x in (0..256u16).step_by(7) {
            for y in (0..256u16).step_by(5) {
                for z in (0..256u16).step_by(3) {
                    assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
                    assert_eq!(f.mul(x, y ^ z), f.mul(x, y) ^ f.mul(x, z));
                }
            }
        }
    }

    /// Carry-less multiply with reduction, independent of the tables.
    fn slow_mul(mut x: u32, mut y: u32, spec: FieldSpec) -> u16 {
        let mut acc = 0u32;
        while y != 0 {
            if y & 1 != 0 {
                acc ^= x;
            }
            y >>= 1;
            x <<= 1;
            if x & spec.order() as u32 != 0 {
                x ^= spec.primitive_poly;
            }
        }
        acc as u16
    }

    #[test]
    fn tables_agree_with_shift_and_add() {
        for spec in [FieldSpec::GF256, FieldSpec::GF65536] {
            let f = spec.field().unwrap();
            let step = if spec.bits == 8 { 1 } else { 251 };
            for x in (0..spec.order() as u32).step_by(step) {
                for y in (0..spec.order() as u32).step_by(step * 3 + 1) {
                    assert_eq!(f.mul(x as u16, y as u16), slow_mul(x, y, spec));
                }
            }
            assert_eq!(f.inv(0), None);
            assert_eq!(f.pow(0, 0), 1);
        }
    }

    #[test]
    fn build_rejects_long_codes() {
        assert_eq!(
            MdsCode::new(300, 3, FieldSpec::GF256).unwrap_err(),
            Error::LengthExceedsField { n: 300, order: 256 }
        );
        assert!(MdsCode::new(300, 3, FieldSpec::GF65536).is_ok());
        assert!(MdsCode::new(4, 5, FieldSpec::GF256).is_err());
        assert!(MdsCode::new(4, 0, FieldSpec::GF256).is_err());
        assert_eq!(FieldSpec::for_length(257).unwrap(), FieldSpec::GF65536);
    }

    #[test]
    fn generator_is_systematic() {
        let code = MdsCode::new(10, 3, FieldSpec::GF256).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(code.generator()[i * 10 + j], u16::from(i == j));
            }
        }
    }

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = combinations(n - 1, k);
        for mut c in combinations(n - 1, k - 1) {
            c.push(n - 1);
            out.push(c);
        }
        out
    }

    #[test]
    fn every_k_subset_is_invertible() {
        for (n, k) in [(10, 3), (12, 4), (8, 5), (4, 1)] {
            let code = MdsCode::new(n, k, FieldSpec::GF256).unwrap();
            let f = code.field();
            for cols in combinations(n, k) {
                assert!(f.invert(code.submatrix(&cols), k).is_some(), "({n},{k}) {cols:?}");
            }
        }
    }

    #[test]
    fn k1_code_is_a_scaled_repetition() {
        let code = MdsCode::new(4, 1, FieldSpec::GF256).unwrap();
        let c = code.encode(&[5]).unwrap();
        assert_eq!(c[0], 5);
        for j in 0..4 {
            let mut rx = vec![None; 4];
            rx[j] = Some(c[j]);
            assert_eq!(code.decode(&rx).unwrap(), vec![5]);
        }
    }

    #[test]
    fn encode_decode_basics() {
        let code = MdsCode::new(10, 3, FieldSpec::GF256).unwrap();
        assert_eq!(code.encode(&[0, 0, 0]).unwrap(), vec![0; 10]);
        assert!(matches!(code.encode(&[1, 2]), Err(Error::LengthMismatch { .. })));
        let c = code.encode(&[7, 8, 9]).unwrap();
        let full: Vec<_> = c.iter().copied().map(Some).collect();
        assert_eq!(code.decode(&full).unwrap(), vec![7, 8, 9]);
        let mut rx = full.clone();
        for slot in rx.iter_mut().take(8) {
            *slot = None;
        }
        assert_eq!(code.decode(&rx).unwrap_err(), Error::TooManyErasures { erased: 8, capability: 7 });
    }

    #[test]
    fn minimum_distance_is_n_minus_k_plus_one() {
        for (n, k) in [(6, 2), (8, 3), (10, 3)] {
            let code = MdsCode::new(n, k, FieldSpec::GF256).unwrap();
            // lower bound over every nonzero message on a sample alphabet
            let alphabet = [0u16, 1, 2, 3, 0x53, 0xca];
            let total = alphabet.len().pow(k as u32);
            for idx in 1..total {
                let mut rest = idx;
                let msg: Vec<u16> = (0..k)
                    .map(|_| {
                        let s = alphabet[rest % alphabet.len()];
                        rest /= alphabet.len();
                        s
                    })
                    .collect();
                let weight = code.encode(&msg).unwrap().iter().filter(|&&s| s != 0).count();
                assert!(weight > n - k, "({n},{k}) {msg:?}");
            }
            // attained: the codeword vanishing on k-1 chosen positions
            let mut rx = vec![None; n];
            for slot in rx.iter_mut().skip(n - k + 1) {
                *slot = Some(0);
            }
            rx[0] = Some(1);
            let msg = code.decode(&rx).unwrap();
            let weight = code.encode(&msg).unwrap().iter().filter(|&&s| s != 0).count();
            assert_eq!(weight, n - k + 1, "({n},{k})");
        }
    }
}
