use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use rand_core::RngCore;

use super::{AlgebraError, FieldElement, GroupKind, GroupSpec, PrimeOrderGroup};

/// `(Z_q, +)` with generator `1`. Only useful as a test oracle: the discrete log
/// of a point is the point itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ToyGroup {
    q: u64,
}

/// An element of `Z_q`. Carries its modulus so the operators need no context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ToyScalar {
    v: u64,
    q: u64,
}

/// A point of the toy group, i.e. an integer modulo `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ToyPoint {
    v: u64,
    q: u64,
}

impl ToyGroup {
    /// `2^61 - 1`, the default order for randomized suites.
    pub const MERSENNE_61: u64 = (1 << 61) - 1;

    pub fn new(q: u64) -> Result<Self, AlgebraError> {
        // Below 2^63 so that sums of two reduced values never overflow u64.
        if q >= 1 << 63 || !is_prime_u64(q) {
            return Err(AlgebraError::NotPrime(q));
        }
        Ok(Self { q })
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    fn width(&self) -> usize {
        let bits = 64 - self.q.leading_zeros() as usize;
        bits.div_ceil(8)
    }

    fn encode(&self, v: u64) -> Vec<u8> {
        v.to_be_bytes()[8 - self.width()..].to_vec()
    }

    fn decode(&self, bytes: &[u8]) -> Result<u64, AlgebraError> {
        if bytes.len() != self.width() {
            return Err(AlgebraError::Decode("wrong length for toy element"));
        }
        let v = bytes.iter().fold(0u64, |acc, b| (acc << 8) | u64::from(*b));
        if v >= self.q {
            return Err(AlgebraError::Decode("toy element not reduced"));
        }
        Ok(v)
    }
}

impl ToyScalar {
    pub fn value(&self) -> u64 {
        self.v
    }
}

impl ToyPoint {
    /// The point's discrete log with respect to the generator `1`.
    pub fn value(&self) -> u64 {
        self.v
    }
}

fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(q)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve primes as bases cover all of u64.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl Add for ToyScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.q, rhs.q);
        Self { v: add_mod(self.v, rhs.v, self.q), q: self.q }
    }
}

impl Sub for ToyScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ToyScalar {
    type Output = Self;
    fn neg(self) -> Self {
        let v = if self.v == 0 { 0 } else { self.q - self.v };
        Self { v, q: self.q }
    }
}

impl Mul for ToyScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.q, rhs.q);
        Self { v: mul_mod(self.v, rhs.v, self.q), q: self.q }
    }
}

impl PartialOrd for ToyScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ToyScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.v.cmp(&other.v)
    }
}

impl FieldElement for ToyScalar {
    fn is_zero(&self) -> bool {
        self.v == 0
    }

    fn invert(&self) -> Result<Self, AlgebraError> {
        if self.v == 0 {
            return Err(AlgebraError::ZeroInverse);
        }
        // Fermat: a^(q-2) = a^-1 for prime q.
        Ok(Self { v: pow_mod(self.v, self.q - 2, self.q), q: self.q })
    }
}

impl Add for ToyPoint {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.q, rhs.q);
        Self { v: add_mod(self.v, rhs.v, self.q), q: self.q }
    }
}

impl Neg for ToyPoint {
    type Output = Self;
    fn neg(self) -> Self {
        let v = if self.v == 0 { 0 } else { self.q - self.v };
        Self { v, q: self.q }
    }
}

impl PrimeOrderGroup for ToyGroup {
    type Scalar = ToyScalar;
    type Point = ToyPoint;

    fn spec(&self) -> GroupSpec {
        let order = self.q.to_be_bytes();
        let skip = order.iter().take_while(|b| **b == 0).count();
        GroupSpec { kind: GroupKind::Toy, order: order[skip..].to_vec(), generator: self.encode(1) }
    }

    fn scalar_from_u64(&self, v: u64) -> ToyScalar {
        ToyScalar { v: v % self.q, q: self.q }
    }

    fn random_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> ToyScalar {
        // Rejection sampling over the smallest power-of-two range covering q.
        let mask = u64::MAX >> self.q.leading_zeros();
        loop {
            let v = rng.next_u64() & mask;
            if v < self.q {
                return ToyScalar { v, q: self.q };
            }
        }
    }

    fn scalar_len(&self) -> usize {
        self.width()
    }

    fn encode_scalar(&self, s: &ToyScalar) -> Vec<u8> {
        self.encode(s.v)
    }

    fn decode_scalar(&self, bytes: &[u8]) -> Result<ToyScalar, AlgebraError> {
        Ok(ToyScalar { v: self.decode(bytes)?, q: self.q })
    }

    fn generator(&self) -> ToyPoint {
        ToyPoint { v: 1 % self.q, q: self.q }
    }

    fn identity(&self) -> ToyPoint {
        ToyPoint { v: 0, q: self.q }
    }

    fn mul(&self, s: &ToyScalar, g: &ToyPoint) -> ToyPoint {
        ToyPoint { v: mul_mod(s.v, g.v, self.q), q: self.q }
    }

    fn point_len(&self) -> usize {
        self.width()
    }

    fn encode_point(&self, g: &ToyPoint) -> Vec<u8> {
        self.encode(g.v)
    }

    fn decode_point(&self, bytes: &[u8]) -> Result<ToyPoint, AlgebraError> {
        Ok(ToyPoint { v: self.decode(bytes)?, q: self.q })
    }
}
