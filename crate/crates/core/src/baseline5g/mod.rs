//! Functional model of the 5G NR UE authentication flow used as a baseline:
//! the UE conceals its SUPI as a SUCI, the UDM decrypts it and draws a
//! challenge, the AUSF hashes the expected response, and the SEAF compares
//! the UE's response against it.
//!
//! Responses are modelled as concatenations, `XRES = RES = RAND ‖ SUCI`, with
//! `HXRES = SHA-256(XRES)`, not as the full key-derivation chain of a real
//! core. The simplification keeps the operation counts that the timing model
//! depends on: one asymmetric encryption, one asymmetric decryption, two
//! hashes, and two UE–core round trips.

mod flow;

pub use flow::{run_nr_flow, Checkpoint, NrFlowResult, NrMessage, NrNode, NrOutcome, TamperField, TamperTap};

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::algebra::PrimeOrderGroup;
use crate::seal::{sha256, SymmetricKey};

/// Default SUPI length in bytes.
pub const DEFAULT_SUPI_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum FlowError {
    #[error("SUPI must be nonempty")]
    EmptySupi,
    #[error("SUCI could not be decrypted")]
    Decrypt,
}

/// Subscription permanent identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Supi(Vec<u8>);

impl Supi {
    pub fn new(bytes: Vec<u8>) -> Result<Self, FlowError> {
        if bytes.is_empty() {
            return Err(FlowError::EmptySupi);
        }
        Ok(Self(bytes))
    }

    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Result<Self, FlowError> {
        let mut bytes = alloc::vec![0u8; len];
        rng.fill_bytes(&mut bytes);
        Self::new(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// Subscription concealed identifier: `E ‖ AEAD_k(SUPI)` with an ephemeral
/// point `E = e·P` and `k = KDF(e · PK_home)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suci(pub Vec<u8>);

impl Suci {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// The home network's long-term key pair.
#[derive(Debug, Clone, Copy)]
pub struct HomeNetworkKey<G: PrimeOrderGroup> {
    secret: G::Scalar,
    pub public: G::Point,
}

impl<G: PrimeOrderGroup> HomeNetworkKey<G> {
    pub fn generate<R: RngCore + ?Sized>(group: &G, rng: &mut R) -> Self {
        let secret = group.random_scalar(rng);
        Self { secret, public: group.mul_base(&secret) }
    }
}

// The KDF key is fresh for every ephemeral point, so a fixed nonce is safe.
const SUCI_NONCE: [u8; 16] = [0; 16];

/// Conceals `supi` under the home network's public key. Randomized.
pub fn compute_suci<G: PrimeOrderGroup, R: RngCore + ?Sized>(
    group: &G,
    supi: &Supi,
    home_public: &G::Point,
    rng: &mut R,
) -> Suci {
    let e = group.random_scalar(rng);
    let ephemeral = group.encode_point(&group.mul_base(&e));
    let key = SymmetricKey::from_point(group, &group.mul(&e, home_public));
    let mut out = ephemeral.clone();
    out.extend_from_slice(&key.seal(&SUCI_NONCE, &ephemeral, supi.as_bytes()));
    Suci(out)
}

/// Recovers the SUPI from a SUCI.
pub fn udm_decrypt<G: PrimeOrderGroup>(group: &G, home: &HomeNetworkKey<G>, suci: &Suci) -> Result<Supi, FlowError> {
    let bytes = suci.as_bytes();
    if bytes.len() < group.point_len() {
        return Err(FlowError::Decrypt);
    }
    let (ephemeral, ct) = bytes.split_at(group.point_len());
    let point = group.decode_point(ephemeral).map_err(|_| FlowError::Decrypt)?;
    let key = SymmetricKey::from_point(group, &group.mul(&home.secret, &point));
    let plain = key.open(&SUCI_NONCE, ephemeral, ct).map_err(|_| FlowError::Decrypt)?;
    Supi::new(plain).map_err(|_| FlowError::Decrypt)
}

/// The UDM's authentication vector for one attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChallengeState {
    pub rand: [u8; 16],
    /// `rand ‖ suci`.
    pub xres: Vec<u8>,
    pub supi: Supi,
}

/// Decrypts the SUCI and draws a fresh challenge.
pub fn udm_challenge<G: PrimeOrderGroup, R: RngCore + ?Sized>(
    group: &G,
    home: &HomeNetworkKey<G>,
    suci: &Suci,
    rng: &mut R,
) -> Result<ChallengeState, FlowError> {
    let supi = udm_decrypt(group, home, suci)?;
    let mut rand = [0u8; 16];
    rng.fill_bytes(&mut rand);
    Ok(ChallengeState { rand, xres: ue_response(suci, &rand), supi })
}

/// `HXRES = H(XRES)`.
pub fn ausf_hxres(state: &ChallengeState) -> [u8; 32] {
    sha256(&state.xres)
}

/// The UE's response, `rand ‖ suci`.
pub fn ue_response(suci: &Suci, rand: &[u8; 16]) -> Vec<u8> {
    let mut res = rand.to_vec();
    res.extend_from_slice(suci.as_bytes());
    res
}

/// SEAF: does `H(res)` match `HXRES`?
pub fn seaf_check(res: &[u8], hxres: &[u8; 32]) -> bool {
    sha256(res) == *hxres
}

/// AUSF: releases the SUPI iff `res = XRES`.
pub fn ausf_confirm(res: &[u8], state: &ChallengeState) -> Option<Supi> {
    (res == state.xres.as_slice()).then(|| state.supi.clone())
}
