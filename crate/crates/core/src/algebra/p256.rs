use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use p256::elliptic_curve::group::Group as _;
use p256::elliptic_curve::sec1::{FromEncodedPoint, ToEncodedPoint};
use p256::elliptic_curve::{Field, PrimeField};
use p256::{EncodedPoint, FieldBytes, ProjectivePoint, Scalar};
use rand_core::RngCore;

use super::{AlgebraError, FieldElement, GroupKind, GroupSpec, PrimeOrderGroup};

/// The P-256 curve group (prime order, ~128-bit security).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct P256Group;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct P256Scalar(pub(crate) Scalar);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P256Point(pub(crate) ProjectivePoint);

impl Eq for P256Point {}

const SCALAR_LEN: usize = 32;
// SEC1 compressed; the identity is written as all zeros to keep the width fixed.
const POINT_LEN: usize = 33;

// n = FFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551
const ORDER_BE: [u8; 32] = [
    0xff, 0xff, 0xff, 0xff, 0x00, 0x00, 0x00, 0x00, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xbc, 0xe6, 0xfa,
    0xad, 0xa7, 0x17, 0x9e, 0x84, 0xf3, 0xb9, 0xca, 0xc2, 0xfc, 0x63, 0x25, 0x51,
];

impl Add for P256Scalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for P256Scalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Mul for P256Scalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl Neg for P256Scalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl PartialOrd for P256Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for P256Scalar {
    // Canonical big-endian bytes compare like the integers they encode.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.to_repr().cmp(&other.0.to_repr())
    }
}

impl FieldElement for P256Scalar {
    fn is_zero(&self) -> bool {
        bool::from(self.0.is_zero())
    }

    fn invert(&self) -> Result<Self, AlgebraError> {
        Option::<Scalar>::from(self.0.invert()).map(Self).ok_or(AlgebraError::ZeroInverse)
    }
}

impl Add for P256Point {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Neg for P256Point {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl PrimeOrderGroup for P256Group {
    type Scalar = P256Scalar;
    type Point = P256Point;

    fn spec(&self) -> GroupSpec {
        GroupSpec {
            kind: GroupKind::ProductionCurve,
            order: ORDER_BE.to_vec(),
            generator: self.encode_point(&self.generator()),
        }
    }

    fn scalar_from_u64(&self, v: u64) -> P256Scalar {
        P256Scalar(Scalar::from(v))
    }

    fn random_scalar<R: RngCore + ?Sized>(&self, rng: &mut R) -> P256Scalar {
        P256Scalar(Scalar::random(rng))
    }

    fn scalar_len(&self) -> usize {
        SCALAR_LEN
    }

    fn encode_scalar(&self, s: &P256Scalar) -> Vec<u8> {
        s.0.to_repr().to_vec()
    }

    fn decode_scalar(&self, bytes: &[u8]) -> Result<P256Scalar, AlgebraError> {
        if bytes.len() != SCALAR_LEN {
            return Err(AlgebraError::Decode("wrong length for P-256 scalar"));
        }
        let repr = FieldBytes::clone_from_slice(bytes);
        Option::<Scalar>::from(Scalar::from_repr(repr))
            .map(P256Scalar)
            .ok_or(AlgebraError::Decode("P-256 scalar not reduced"))
    }

    fn generator(&self) -> P256Point {
        P256Point(ProjectivePoint::GENERATOR)
    }

    fn identity(&self) -> P256Point {
        P256Point(ProjectivePoint::IDENTITY)
    }

    fn mul(&self, s: &P256Scalar, g: &P256Point) -> P256Point {
        P256Point(g.0 * s.0)
    }

    fn point_len(&self) -> usize {
        POINT_LEN
    }

    fn encode_point(&self, g: &P256Point) -> Vec<u8> {
        if bool::from(g.0.is_identity()) {
            return alloc::vec![0u8; POINT_LEN];
        }
        g.0.to_affine().to_encoded_point(true).as_bytes().to_vec()
    }

    fn decode_point(&self, bytes: &[u8]) -> Result<P256Point, AlgebraError> {
        if bytes.len() != POINT_LEN {
            return Err(AlgebraError::Decode("wrong length for P-256 point"));
        }
        if bytes.iter().all(|b| *b == 0) {
            return Ok(self.identity());
        }
        let encoded = EncodedPoint::from_bytes(bytes).map_err(|_| AlgebraError::Decode("bad SEC1 point"))?;
        if !encoded.is_compressed() {
            return Err(AlgebraError::Decode("P-256 point must be compressed"));
        }
        Option::<ProjectivePoint>::from(ProjectivePoint::from_encoded_point(&encoded))
            .map(P256Point)
            .ok_or(AlgebraError::Decode("not a point on P-256"))
    }
}
