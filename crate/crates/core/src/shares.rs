//! The swarm's secret polynomial, share issuance, and the group check.
//!
//! The dealer (the core network) holds `f(x) = a_0 + a_1 x + ... + a_{t-1} x^{t-1}`.
//! Member `i` gets the private share `f(x_i)` and publishes `(x_i, f(x_i)·P)`.
//! Given any `t` public shares, verifiers compute
//!
//! ```text
//! c_i = λ_i · f(x_i)·P,   λ_i = Π_{r≠i} -x_r / (x_i - x_r)
//! ```
//!
//! and accept iff `Σ c_i = Q = a_0·P`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::algebra::{AlgebraError, FieldElement, PrimeOrderGroup};
use crate::codec::{put_lp, FrameError, Reader};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShareError {
    #[error("threshold must be at least 2, got {0}")]
    ThresholdTooSmall(usize),
    #[error("share identifier must be nonzero")]
    InvalidIdentifier,
    #[error("share identifiers must be distinct")]
    DuplicateIdentifier,
    #[error("expected {expected} shares, got {got}")]
    WrongShareCount { expected: usize, got: usize },
    #[error("leading coefficient must be nonzero")]
    DegenerateLeadingCoefficient,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// The secret polynomial `f`. `coeffs[0]` is the group key.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupPolynomial<G: PrimeOrderGroup> {
    coeffs: Vec<G::Scalar>,
}

impl<G: PrimeOrderGroup> core::fmt::Debug for GroupPolynomial<G> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("GroupPolynomial").field("threshold", &self.coeffs.len()).finish_non_exhaustive()
    }
}

/// A member's secret evaluation `y = f(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrivateShare<G: PrimeOrderGroup> {
    pub x: G::Scalar,
    pub y: G::Scalar,
}

/// `(x, f(x)·P)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PublicShare<G: PrimeOrderGroup> {
    pub x: G::Scalar,
    pub point: G::Point,
}

/// `Q = a_0·P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupCommitment<G: PrimeOrderGroup>(pub G::Point);

impl<G: PrimeOrderGroup> GroupPolynomial<G> {
    /// Draws `t` uniform coefficients, resampling the leading one until nonzero.
    pub fn generate<R: RngCore + ?Sized>(group: &G, threshold: usize, rng: &mut R) -> Result<Self, ShareError> {
        if threshold < 2 {
            return Err(ShareError::ThresholdTooSmall(threshold));
        }
        let mut coeffs: Vec<_> = (0..threshold).map(|_| group.random_scalar(rng)).collect();
        while coeffs[threshold - 1].is_zero() {
            coeffs[threshold - 1] = group.random_scalar(rng);
        }
        Ok(Self { coeffs })
    }

    pub fn from_coefficients(coeffs: Vec<G::Scalar>) -> Result<Self, ShareError> {
        if coeffs.len() < 2 {
            return Err(ShareError::ThresholdTooSmall(coeffs.len()));
        }
        if coeffs[coeffs.len() - 1].is_zero() {
            return Err(ShareError::DegenerateLeadingCoefficient);
        }
        Ok(Self { coeffs })
    }

    pub fn threshold(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[G::Scalar] {
        &self.coeffs
    }

    /// `a_0 = f(0)`.
    pub fn group_key(&self) -> G::Scalar {
        self.coeffs[0]
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: G::Scalar) -> G::Scalar {
        let mut iter = self.coeffs.iter().rev();
        let mut acc = *iter.next().expect("polynomial has at least two coefficients");
        for c in iter {
            acc = acc * x + *c;
        }
        acc
    }
}

pub fn issue_share<G: PrimeOrderGroup>(poly: &GroupPolynomial<G>, x: G::Scalar) -> Result<PrivateShare<G>, ShareError> {
    if x.is_zero() {
        return Err(ShareError::InvalidIdentifier);
    }
    Ok(PrivateShare { x, y: poly.evaluate(x) })
}

pub fn public_share<G: PrimeOrderGroup>(group: &G, share: &PrivateShare<G>) -> PublicShare<G> {
    PublicShare { x: share.x, point: group.mul_base(&share.y) }
}

pub fn group_commitment<G: PrimeOrderGroup>(group: &G, poly: &GroupPolynomial<G>) -> GroupCommitment<G> {
    GroupCommitment(group.mul_base(&poly.group_key()))
}

fn check_identifiers<G: PrimeOrderGroup>(xs: &[G::Scalar]) -> Result<(), ShareError> {
    if xs.iter().any(FieldElement::is_zero) {
        return Err(ShareError::InvalidIdentifier);
    }
    let distinct: BTreeSet<_> = xs.iter().collect();
    if distinct.len() != xs.len() {
        return Err(ShareError::DuplicateIdentifier);
    }
    Ok(())
}

/// `λ_i = Π_{r≠i} -x_r / (x_i - x_r)`, the weight of `f(x_i)` in `f(0)`.
pub fn lagrange_coeff_at_zero<G: PrimeOrderGroup>(
    group: &G,
    xs: &[G::Scalar],
    i: usize,
) -> Result<G::Scalar, ShareError> {
    if xs.len() < 2 {
        return Err(ShareError::ThresholdTooSmall(xs.len()));
    }
    check_identifiers::<G>(xs)?;
    lagrange_unchecked(group, xs, i)
}

fn lagrange_unchecked<G: PrimeOrderGroup>(group: &G, xs: &[G::Scalar], i: usize) -> Result<G::Scalar, ShareError> {
    let xi = xs[i];
    let mut num = group.one();
    let mut den = group.one();
    for (r, xr) in xs.iter().enumerate() {
        if r != i {
            num = num * -*xr;
            den = den * (xi - *xr);
        }
    }
    Ok(num * den.invert()?)
}

/// All weights for the identifier set at once.
pub fn lagrange_coeffs_at_zero<G: PrimeOrderGroup>(group: &G, xs: &[G::Scalar]) -> Result<Vec<G::Scalar>, ShareError> {
    if xs.len() < 2 {
        return Err(ShareError::ThresholdTooSmall(xs.len()));
    }
    check_identifiers::<G>(xs)?;
    (0..xs.len()).map(|i| lagrange_unchecked(group, xs, i)).collect()
}

/// `c_i = λ_i · Y_i` for one share of the set `xs`.
pub fn weighted_term<G: PrimeOrderGroup>(
    group: &G,
    xs: &[G::Scalar],
    share: &PublicShare<G>,
) -> Result<G::Point, ShareError> {
    let i = xs.iter().position(|x| *x == share.x).ok_or(ShareError::InvalidIdentifier)?;
    let lambda = lagrange_coeff_at_zero(group, xs, i)?;
    Ok(group.mul(&lambda, &share.point))
}

/// True iff the Lagrange-weighted sum of exactly `threshold` public shares equals `Q`.
pub fn verify_group<G: PrimeOrderGroup>(
    group: &G,
    threshold: usize,
    shares: &[PublicShare<G>],
    commitment: &GroupCommitment<G>,
) -> Result<bool, ShareError> {
    if shares.len() != threshold {
        return Err(ShareError::WrongShareCount { expected: threshold, got: shares.len() });
    }
    let xs: Vec<_> = shares.iter().map(|s| s.x).collect();
    let lambdas = lagrange_coeffs_at_zero(group, &xs)?;
    let sum = shares.iter().zip(&lambdas).fold(group.identity(), |acc, (s, l)| acc + group.mul(l, &s.point));
    Ok(sum == commitment.0)
}

/// `Σ λ_i y_i = f(0)` from exactly `threshold` private shares.
pub fn recover_group_key<G: PrimeOrderGroup>(
    group: &G,
    threshold: usize,
    shares: &[PrivateShare<G>],
) -> Result<G::Scalar, ShareError> {
    if shares.len() != threshold {
        return Err(ShareError::WrongShareCount { expected: threshold, got: shares.len() });
    }
    let xs: Vec<_> = shares.iter().map(|s| s.x).collect();
    let lambdas = lagrange_coeffs_at_zero(group, &xs)?;
    Ok(shares.iter().zip(&lambdas).fold(group.zero(), |acc, (s, l)| acc + *l * s.y))
}

/// The dealer's polynomial plus its identifier registry. Identifiers are handed
/// out sequentially from 1; callers serialize access.
#[derive(Debug, Clone)]
pub struct Dealer<G: PrimeOrderGroup> {
    group: G,
    poly: GroupPolynomial<G>,
    next_x: u64,
    issued: BTreeSet<G::Scalar>,
}

impl<G: PrimeOrderGroup> Dealer<G> {
    pub fn new(group: G, poly: GroupPolynomial<G>) -> Self {
        Self { group, poly, next_x: 1, issued: BTreeSet::new() }
    }

    pub fn polynomial(&self) -> &GroupPolynomial<G> {
        &self.poly
    }

    pub fn commitment(&self) -> GroupCommitment<G> {
        group_commitment(&self.group, &self.poly)
    }

    pub fn issued(&self) -> &BTreeSet<G::Scalar> {
        &self.issued
    }

    /// Issues the share for the next unused sequential identifier.
    pub fn issue_next(&mut self) -> PrivateShare<G> {
        self.issue_next_with_id().1
    }

    /// Like [`Dealer::issue_next`], also returning the identifier as an integer.
    pub fn issue_next_with_id(&mut self) -> (u64, PrivateShare<G>) {
        loop {
            let id = self.next_x;
            self.next_x += 1;
            if let Ok(share) = self.issue_at(self.group.scalar_from_u64(id)) {
                return (id, share);
            }
        }
    }

    /// The identifier [`Dealer::issue_next`] would use, without issuing it.
    pub fn peek_next_id(&self) -> u64 {
        (self.next_x..)
            .find(|id| !self.issued.contains(&self.group.scalar_from_u64(*id)))
            .expect("identifier space exhausted")
    }

    /// Issues the share at a specific identifier, refusing reuse.
    pub fn issue_at(&mut self, x: G::Scalar) -> Result<PrivateShare<G>, ShareError> {
        if self.issued.contains(&x) {
            return Err(ShareError::DuplicateIdentifier);
        }
        let share = issue_share(&self.poly, x)?;
        self.issued.insert(x);
        Ok(share)
    }
}

impl<G: PrimeOrderGroup> PrivateShare<G> {
    pub fn to_bytes(&self, group: &G) -> Vec<u8> {
        let mut out = Vec::new();
        put_lp(&mut out, &group.encode_scalar(&self.x));
        put_lp(&mut out, &group.encode_scalar(&self.y));
        out
    }

    pub fn from_bytes(group: &G, bytes: &[u8]) -> Result<Self, ShareError> {
        let mut r = Reader::new(bytes);
        let x = group.decode_scalar(r.lp()?)?;
        let y = group.decode_scalar(r.lp()?)?;
        r.finish()?;
        if x.is_zero() {
            return Err(ShareError::InvalidIdentifier);
        }
        Ok(Self { x, y })
    }
}

impl<G: PrimeOrderGroup> PublicShare<G> {
    pub fn to_bytes(&self, group: &G) -> Vec<u8> {
        let mut out = Vec::new();
        put_lp(&mut out, &group.encode_scalar(&self.x));
        put_lp(&mut out, &group.encode_point(&self.point));
        out
    }

    pub fn from_bytes(group: &G, bytes: &[u8]) -> Result<Self, ShareError> {
        let mut r = Reader::new(bytes);
        let x = group.decode_scalar(r.lp()?)?;
        let point = group.decode_point(r.lp()?)?;
        r.finish()?;
        if x.is_zero() {
            return Err(ShareError::InvalidIdentifier);
        }
        Ok(Self { x, point })
    }
}

impl<G: PrimeOrderGroup> GroupCommitment<G> {
    pub fn to_bytes(&self, group: &G) -> Vec<u8> {
        let mut out = Vec::new();
        put_lp(&mut out, &group.encode_point(&self.0));
        out
    }

    pub fn from_bytes(group: &G, bytes: &[u8]) -> Result<Self, ShareError> {
        let mut r = Reader::new(bytes);
        let q = group.decode_point(r.lp()?)?;
        r.finish()?;
        Ok(Self(q))
    }
}
