//! Finite-field and Boolean-function machinery: GF(2^m) arithmetic over a
//! fixed modulus table, the Walsh–Hadamard transform, bentness testing, and
//! the deterministic prime search used by the spectral graph builders.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("no embedded irreducible modulus for extension degree {0}")]
    UnsupportedDegree(u32),
    #[error("element {bits:#x} out of range for GF(2^{m})")]
    ElementOutOfRange { bits: u64, m: u32 },
    #[error("mismatched field contexts: GF(2^{0}) vs GF(2^{1})")]
    MismatchedFields(u32, u32),
    #[error("truth table length {len} is not 2^{arity}")]
    BadTableLength { len: usize, arity: u32 },
    #[error("bentness undefined for odd arity")]
    OddArity,
    #[error("parameters too small: no prime p <= {0} with p = 1 mod 4")]
    ParametersTooSmall(u64),
}

/// Lexicographically smallest irreducible polynomial of each degree over
/// GF(2), written as a bit pattern with the leading term included.
/// Degree 1 is the polynomial x, giving GF(2) itself.
const IRREDUCIBLE: [u64; 12] = [
    0b10,            // 1: x
    0b111,           // 2: x^2+x+1
    0b1011,          // 3: x^3+x+1
    0b10011,         // 4: x^4+x+1
    0b100101,        // 5: x^5+x^2+1
    0b1000011,       // 6: x^6+x+1
    0b10000011,      // 7: x^7+x+1
    0b100011011,     // 8: x^8+x^4+x^3+x+1
    0b1000000011,    // 9: x^9+x+1
    0b10000001001,   // 10: x^10+x^3+1
    0b100000000101,  // 11: x^11+x^2+1
    0b1000000001001, // 12: x^12+x^3+1
];

fn poly_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u64, m: u64) -> u64 {
    let dm = poly_degree(m);
    while a != 0 && poly_degree(a) >= dm {
        a ^= m << (poly_degree(a) - dm);
    }
    a
}

/// Exhaustive divisor check; valid for degrees up to 24.
pub fn poly_is_irreducible(p: u64) -> bool {
    let d = poly_degree(p);
    if d < 1 {
        return false;
    }
    assert!(d <= 24, "exhaustive irreducibility check limited to degree 24");
    for q in 2u64..(1u64 << (d / 2 + 1)) {
        if poly_degree(q) >= 1 && q != p && poly_mod(p, q) == 0 {
            return false;
        }
    }
    true
}

/// Field context for GF(2^m), m <= 12, with the modulus fixed from the
/// embedded table and re-validated at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf2mField {
    m: u32,
    modulus: u64,
}

impl Gf2mField {
    pub fn new(m: u32) -> Result<Self, AlgebraError> {
        if m == 0 || m as usize > IRREDUCIBLE.len() {
            return Err(AlgebraError::UnsupportedDegree(m));
        }
        let modulus = IRREDUCIBLE[m as usize - 1];
        debug_assert!(poly_is_irreducible(modulus));
        Ok(Gf2mField { m, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn element(&self, bits: u64) -> Result<Gf2mElement, AlgebraError> {
        if bits >> self.m != 0 {
            return Err(AlgebraError::ElementOutOfRange { bits, m: self.m });
        }
        Ok(Gf2mElement { bits, field: *self })
    }

    /// Raw carry-less multiply followed by reduction; elements must already
    /// be reduced.
    pub(crate) fn mul_bits(&self, x: u64, y: u64) -> u64 {
        let mut acc = 0u64;
        for i in 0..self.m {
            if (y >> i) & 1 == 1 {
                acc ^= x << i;
            }
        }
        poly_mod(acc, self.modulus)
    }

    /// Absolute trace GF(2^m) -> GF(2): z + z^2 + z^4 + ...
    pub(crate) fn trace_bits(&self, z: u64) -> u64 {
        let mut acc = 0u64;
        let mut w = z;
        for _ in 0..self.m {
            acc ^= w;
            w = self.mul_bits(w, w);
        }
        acc & 1
    }
}

/// An element of GF(2^m) carrying its field context.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf2mElement {
    bits: u64,
    field: Gf2mField,
}

impl Gf2mElement {
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn field(&self) -> Gf2mField {
        self.field
    }
}

/// Product in GF(2^m) under the context modulus.
pub fn gf2m_mul(x: Gf2mElement, y: Gf2mElement) -> Result<Gf2mElement, AlgebraError> {
    if x.field != y.field {
        return Err(AlgebraError::MismatchedFields(x.field.m, y.field.m));
    }
    Ok(Gf2mElement {
        bits: x.field.mul_bits(x.bits, y.bits),
        field: x.field,
    })
}

/// A Boolean function given by its full truth table (values 0/1, indexed by
/// the input written as an integer).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanFunction {
    arity: u32,
    table: Vec<u8>,
}

impl BooleanFunction {
    pub fn from_table(arity: u32, table: Vec<u8>) -> Result<Self, AlgebraError> {
        if table.len() != 1usize << arity {
            return Err(AlgebraError::BadTableLength { len: table.len(), arity });
        }
        debug_assert!(table.iter().all(|&b| b <= 1));
        Ok(BooleanFunction { arity, table })
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn value(&self, x: usize) -> u8 {
        self.table[x]
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    /// Pointwise XOR of two functions of the same arity.
    pub fn xor(&self, other: &BooleanFunction) -> Result<BooleanFunction, AlgebraError> {
        if self.arity != other.arity {
            return Err(AlgebraError::BadTableLength {
                len: other.table.len(),
                arity: self.arity,
            });
        }
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(BooleanFunction { arity: self.arity, table })
    }

    /// Truth-table bits packed into a hex string, 4 table entries per digit,
    /// index 0 in the least significant bit. Used by test fixtures.
    pub fn to_hex(&self) -> String {
        let n = self.table.len();
        let digits = n.div_ceil(4);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in 0..4 {
                let idx = d * 4 + b;
                if idx < n && self.table[idx] == 1 {
                    nibble |= 1 << b;
                }
            }
            s.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        s
    }
}

/// Integer Walsh spectrum: the entry at u equals sum_x (-1)^(f(x) xor u.x).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalshSpectrum {
    arity: u32,
    coefficients: Vec<i64>,
}

impl WalshSpectrum {
    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    /// Parseval identity, exact in integers: sum of squares = 2^(2a).
    pub fn parseval_holds(&self) -> bool {
        let total: i128 = self.coefficients.iter().map(|&c| (c as i128) * (c as i128)).sum();
        total == 1i128 << (2 * self.arity)
    }
}

/// Fast Walsh–Hadamard butterfly, O(a 2^a) exact integer arithmetic.
pub fn walsh_transform(f: &BooleanFunction) -> WalshSpectrum {
    let n = 1usize << f.arity;
    let mut v: Vec<i64> = f.table.iter().map(|&b| 1 - 2 * (b as i64)).collect();
    let mut h = 1usize;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for j in block..block + h {
                let (x, y) = (v[j], v[j + h]);
                v[j] = x + y;
                v[j + h] = x - y;
            }
        }
        h *= 2;
    }
    WalshSpectrum { arity: f.arity, coefficients: v }
}

/// A function on an even number of variables is bent iff every Walsh
/// coefficient has absolute value exactly 2^(a/2).
pub fn is_bent(f: &BooleanFunction) -> Result<bool, AlgebraError> {
    if !f.arity.is_multiple_of(2) {
        return Err(AlgebraError::OddArity);
    }
    let target = 1i64 << (f.arity / 2);
    let spectrum = walsh_transform(f);
    Ok(spectrum.coefficients.iter().all(|&c| c.abs() == target))
}

/// Deterministic trial-division primality; intended for desk-scale inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// Prime pair for the spectral expander: p is the largest prime <= d-1 with
/// p = 1 mod 4; q is the smallest prime with q = 1 mod 4, q != p,
/// q(q^2-1)(p+1)/8 >= N, and q > 2 sqrt(p) (the last so the Cayley-graph
/// construction downstream is well defined).
pub fn find_prime_pq(d: u64, n_target: u64) -> Result<(u64, u64), AlgebraError> {
    let p = (2..d)
        .rev()
        .find(|&x| x % 4 == 1 && is_prime(x))
        .ok_or(AlgebraError::ParametersTooSmall(d.saturating_sub(1)))?;
    let mut q = 5u64;
    loop {
        if q % 4 == 1
            && q != p
            && is_prime(q)
            && q * q > 4 * p
            && (q as u128) * ((q as u128) * (q as u128) - 1) * ((p + 1) as u128) >= 8 * n_target as u128
        {
            return Ok((p, q));
        }
        q += 4; // stay in the 1 mod 4 class
    }
}
