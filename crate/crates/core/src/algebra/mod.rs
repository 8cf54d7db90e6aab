//! Prime-field scalars and prime-order groups.
//!
//! Everything above this module is written against [`PrimeOrderGroup`], which has
//! two instantiations:
//!
//! - [`P256Group`]: the NIST P-256 curve, used for anything that needs real
//!   discrete-log hardness.
//! - [`ToyGroup`]: the integers modulo a prime `q` under addition, generator `1`.
//!   Discrete logs are the identity map, so tests can check curve-level results
//!   with plain integer arithmetic.
//!
//! Scalars are always kept reduced, so equality is byte equality of the encoding.

mod p256;
mod toy;

use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Mul, Neg, Sub};

use rand_core::RngCore;

pub use self::p256::{P256Group, P256Point, P256Scalar};
pub use self::toy::{is_prime_u64, ToyGroup, ToyPoint, ToyScalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("malformed encoding: {0}")]
    Decode(&'static str),
    #[error("group order {0} is not prime")]
    NotPrime(u64),
}

/// An element of the scalar field `Z_q`.
pub trait FieldElement:
    Copy + Eq + Ord + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn is_zero(&self) -> bool;

    /// Multiplicative inverse. Fails with [`AlgebraError::ZeroInverse`] on zero.
    fn invert(&self) -> Result<Self, AlgebraError>;
}

/// Which instantiation a group is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    ProductionCurve,
    Toy,
}

/// Public description of a configured group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub kind: GroupKind,
    /// Group order, big-endian, no leading zero bytes.
    pub order: Vec<u8>,
    /// Canonical encoding of the generator.
    pub generator: Vec<u8>,
}

/// A cyclic group of prime order `q` with a distinguished generator `P`.
pub trait PrimeOrderGroup: Copy + Eq + Ord + Debug {
    type Scalar: FieldElement;
    type Point: Copy + Eq + Debug + Add<Output = Self::Point> + Neg<Output = Self::Point>;

    fn spec(&self) -> GroupSpec;

    fn scalar_from_u64(&self, v: u64) -> Self::Scalar;

    fn zero(&self) -> Self::Scalar {
        self.scalar_from_u64(0)
    }

    fn one(&self) -> Self::Scalar {
        self.scalar_from_u64(1)
    }

    /// Uniformly random scalar in `[0, q)`.
    fn random_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self::Scalar;

    /// Width in bytes of a scalar encoding: `ceil(bits(q) / 8)`.
    fn scalar_len(&self) -> usize;

    /// Fixed-width big-endian encoding.
    fn encode_scalar(&self, s: &Self::Scalar) -> Vec<u8>;

    /// Rejects wrong lengths and non-canonical (`>= q`) values.
    fn decode_scalar(&self, bytes: &[u8]) -> Result<Self::Scalar, AlgebraError>;

    fn generator(&self) -> Self::Point;

    fn identity(&self) -> Self::Point;

    /// `s · g`.
    fn mul(&self, s: &Self::Scalar, g: &Self::Point) -> Self::Point;

    /// `s · P` for the generator `P`.
    fn mul_base(&self, s: &Self::Scalar) -> Self::Point {
        self.mul(s, &self.generator())
    }

    fn point_len(&self) -> usize;

    /// Fixed-length canonical encoding. Injective.
    fn encode_point(&self, g: &Self::Point) -> Vec<u8>;

    fn decode_point(&self, bytes: &[u8]) -> Result<Self::Point, AlgebraError>;

    /// A uniformly random group element.
    fn random_point<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self::Point {
        let s = self.random_scalar(rng);
        self.mul_base(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy101() -> ToyGroup {
        ToyGroup::new(101).unwrap()
    }

    fn s(g: &ToyGroup, v: u64) -> ToyScalar {
        g.scalar_from_u64(v)
    }

    #[test]
    fn scalar_add_examples() {
        let g = toy101();
        assert_eq!(s(&g, 100) + s(&g, 2), s(&g, 1));
        assert_eq!(s(&g, 0) + s(&g, 57), s(&g, 57));
        assert_eq!(s(&g, 51) + s(&g, 51), s(&g, (51 + 51) % 101));
    }

    #[test]
    fn scalar_mul_examples() {
        let g = toy101();
        assert_eq!(s(&g, 1) * s(&g, 77), s(&g, 77));
        assert_eq!(s(&g, 2) * s(&g, 51), s(&g, (2 * 51) % 101));
        assert_eq!(s(&g, 0) * s(&g, 99), s(&g, 0));
    }

    /// Extended Euclid over i128, independent of the field code.
    fn egcd_inverse(a: u64, q: u64) -> u64 {
        let (mut r0, mut r1) = (q as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        assert_eq!(r0, 1);
        t0.rem_euclid(q as i128) as u64
    }

    #[test]
    fn scalar_inv_examples() {
        let g = toy101();
        assert_eq!(s(&g, 1).invert().unwrap(), s(&g, 1));
        assert_eq!(egcd_inverse(2, 101), 51);
        assert_eq!(s(&g, 2).invert().unwrap(), s(&g, 51));
        let g13 = ToyGroup::new(13).unwrap();
        assert_eq!(egcd_inverse(5, 13), 8);
        assert_eq!(g13.scalar_from_u64(5).invert().unwrap(), g13.scalar_from_u64(8));
        assert_eq!(s(&g, 0).invert(), Err(AlgebraError::ZeroInverse));
    }

    #[test]
    fn inverse_matches_euclid_for_every_element_mod_101() {
        let g = toy101();
        for a in 1..101 {
            assert_eq!(s(&g, a).invert().unwrap(), s(&g, egcd_inverse(a, 101)));
        }
    }

    #[test]
    fn toy_point_examples() {
        let g = toy101();
        let p = g.generator();
        assert_eq!(g.mul(&s(&g, 5), &p), g.decode_point(&[5]).unwrap());
        assert_eq!(g.mul(&s(&g, 100), &p) + p, g.identity());
        assert_eq!(g.mul(&s(&g, 0), &p), g.identity());
        let pt = |v: u64| g.mul_base(&s(&g, v));
        assert_eq!(pt(40) + pt(61), g.identity());
        assert_eq!(g.identity() + pt(33), pt(33));
        assert_eq!(pt(12) + pt(19), pt(31));
    }

    #[test]
    fn toy_encoding_is_fixed_width_big_endian() {
        let g = toy101();
        assert_eq!(g.encode_point(&g.mul_base(&s(&g, 5))), [5]);
        let big = ToyGroup::new(ToyGroup::MERSENNE_61).unwrap();
        assert_eq!(big.scalar_len(), 8);
        assert_eq!(big.encode_scalar(&big.scalar_from_u64(5)), [0, 0, 0, 0, 0, 0, 0, 5]);
        assert!(g.decode_point(&[101]).is_err());
        assert!(g.decode_point(&[1, 2]).is_err());
        assert!(g.decode_scalar(&[]).is_err());
    }

    #[test]
    fn toy_rejects_composite_order() {
        assert_eq!(ToyGroup::new(100).unwrap_err(), AlgebraError::NotPrime(100));
        assert!(ToyGroup::new(1).is_err());
    }

    #[test]
    fn p256_order_annihilates_and_identity_encodes() {
        let g = P256Group;
        let p = g.generator();
        let minus_one = -g.one();
        assert_eq!(g.mul(&minus_one, &p) + p, g.identity());
        let id = g.encode_point(&g.identity());
        assert_eq!(id.len(), g.point_len());
        assert_eq!(g.decode_point(&id).unwrap(), g.identity());
        assert!(g.decode_point(&[0u8; 5]).is_err());
        let mut bad = g.encode_point(&p);
        bad[0] = 0x05;
        assert!(g.decode_point(&bad).is_err());
        assert_eq!(g.spec().kind, GroupKind::ProductionCurve);
        assert_eq!(g.spec().order.len(), 32);
    }

    #[test]
    fn p256_scalar_order_is_numeric() {
        let g = P256Group;
        assert!(g.scalar_from_u64(2) < g.scalar_from_u64(3));
        assert!(g.scalar_from_u64(300) > g.scalar_from_u64(255));
        assert!(g.zero() < -g.one());
    }

    #[test]
    fn p256_decode_rejects_out_of_range_scalar() {
        let g = P256Group;
        assert!(g.decode_scalar(&[0xff; 32]).is_err());
        assert!(g.decode_scalar(&[0x01; 31]).is_err());
    }

    fn field_laws<G: PrimeOrderGroup>(g: &G, seed: u64) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let a = g.random_scalar(&mut rng);
        let b = g.random_scalar(&mut rng);
        let c = g.random_scalar(&mut rng);
        assert_eq!(a + b, b + a);
        assert_eq!(a * b, b * a);
        assert_eq!((a + b) + c, a + (b + c));
        assert_eq!((a * b) * c, a * (b * c));
        assert_eq!(a * (b + c), a * b + a * c);
        let a2 = a;
        assert_eq!(a - a2, g.zero());
        if !a.is_zero() {
            assert_eq!(a * a.invert().unwrap(), g.one());
        }
    }

    fn group_laws<G: PrimeOrderGroup>(g: &G, seed: u64) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let a = g.random_scalar(&mut rng);
        let b = g.random_scalar(&mut rng);
        let x = g.random_point(&mut rng);
        let y = g.random_point(&mut rng);
        let z = g.random_point(&mut rng);
        assert_eq!(x + y, y + x);
        assert_eq!((x + y) + z, x + (y + z));
        assert_eq!(g.mul(&(a + b), &x), g.mul(&a, &x) + g.mul(&b, &x));
        assert_eq!(g.mul(&a, &g.mul_base(&b)), g.mul_base(&(a * b)));
        assert_eq!(x + g.identity(), x);
        assert_eq!(x + (-x), g.identity());
        assert_eq!(g.decode_point(&g.encode_point(&x)).unwrap(), x);
        assert_eq!(g.decode_scalar(&g.encode_scalar(&a)).unwrap(), a);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn toy_field_and_group_laws(seed in any::<u64>()) {
            let g = ToyGroup::new(ToyGroup::MERSENNE_61).unwrap();
            field_laws(&g, seed);
            group_laws(&g, seed);
        }

        #[test]
        fn p256_field_and_group_laws(seed in any::<u64>()) {
            field_laws(&P256Group, seed);
            group_laws(&P256Group, seed);
        }

        #[test]
        fn toy_mul_base_is_the_identity_map(v in 0u64..ToyGroup::MERSENNE_61) {
            let g = ToyGroup::new(ToyGroup::MERSENNE_61).unwrap();
            let s = g.scalar_from_u64(v);
            prop_assert_eq!(g.encode_point(&g.mul_base(&s)), g.encode_scalar(&s));
        }

        #[test]
        fn toy_ops_match_integer_arithmetic(a in 0u64..101, b in 0u64..101) {
            let g = toy101();
            prop_assert_eq!(s(&g, a) + s(&g, b), s(&g, (a + b) % 101));
            prop_assert_eq!(s(&g, a) * s(&g, b), s(&g, (a * b) % 101));
            prop_assert_eq!(s(&g, a) - s(&g, b), s(&g, (a + 101 - b) % 101));
        }
    }

    #[test]
    fn encoding_round_trip_and_injectivity_over_1000_points() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let g = P256Group;
        let points: Vec<_> = (0..1000).map(|_| g.random_point(&mut rng)).collect();
        let mut encodings = Vec::new();
        for p in &points {
            let e = g.encode_point(p);
            assert_eq!(e.len(), g.point_len());
            assert_eq!(&g.decode_point(&e).unwrap(), p);
            encodings.push(e);
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if encodings[i] == encodings[j] {
                    assert_eq!(points[i], points[j]);
                }
            }
        }
        let t = ToyGroup::new(ToyGroup::MERSENNE_61).unwrap();
        for _ in 0..1000 {
            let p = t.random_point(&mut rng);
            assert_eq!(t.decode_point(&t.encode_point(&p)).unwrap(), p);
        }
    }
}
