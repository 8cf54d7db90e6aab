use core::time::Duration;

use super::engine::{OpCount, Phase};

/// Per-operation costs. Defaults are the measured constants the timing
/// comparison is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatencyModel {
    /// UE to core network and back.
    pub ue_core_round_trip: Duration,
    pub asym_encrypt: Duration,
    pub asym_decrypt: Duration,
    pub hash_op: Duration,
    /// One direct transfer between drones.
    pub drone_to_drone: Duration,
    /// One elliptic-curve scalar multiplication.
    pub ec_point_mul: Duration,
}

impl Default for LatencyModel {
    fn default() -> Self {
        Self {
            ue_core_round_trip: Duration::from_millis(10),
            asym_encrypt: Duration::from_micros(100),
            asym_decrypt: Duration::from_micros(1500),
            hash_op: Duration::ZERO,
            drone_to_drone: Duration::from_micros(600),
            ec_point_mul: Duration::from_micros(612),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown latency field `{0}`")]
pub struct UnknownLatencyField(pub alloc::string::String);

impl LatencyModel {
    pub const FIELDS: [&'static str; 6] =
        ["ue_core_round_trip", "asym_encrypt", "asym_decrypt", "hash_op", "drone_to_drone", "ec_point_mul"];

    pub fn zero() -> Self {
        Self {
            ue_core_round_trip: Duration::ZERO,
            asym_encrypt: Duration::ZERO,
            asym_decrypt: Duration::ZERO,
            hash_op: Duration::ZERO,
            drone_to_drone: Duration::ZERO,
            ec_point_mul: Duration::ZERO,
        }
    }

    pub fn field_mut(&mut self, name: &str) -> Result<&mut Duration, UnknownLatencyField> {
        Ok(match name {
            "ue_core_round_trip" => &mut self.ue_core_round_trip,
            "asym_encrypt" => &mut self.asym_encrypt,
            "asym_decrypt" => &mut self.asym_decrypt,
            "hash_op" => &mut self.hash_op,
            "drone_to_drone" => &mut self.drone_to_drone,
            "ec_point_mul" => &mut self.ec_point_mul,
            other => return Err(UnknownLatencyField(other.into())),
        })
    }

    pub fn set(&mut self, name: &str, value: Duration) -> Result<(), UnknownLatencyField> {
        *self.field_mut(name)? = value;
        Ok(())
    }

    /// One leg of the UE–core round trip.
    pub fn core_leg(&self) -> Duration {
        self.ue_core_round_trip / 2
    }

    pub(crate) fn op_cost(&self, phase: Phase) -> Duration {
        match phase {
            Phase::EcPointMul => self.ec_point_mul,
            Phase::AsymEncrypt => self.asym_encrypt,
            Phase::AsymDecrypt => self.asym_decrypt,
            Phase::Hash => self.hash_op,
            Phase::Radio => self.drone_to_drone,
            Phase::CoreLink => self.core_leg(),
        }
    }

    /// Total local compute time for a batch of operations.
    pub fn compute_time(&self, ops: &OpCount) -> Duration {
        ops.iter().map(|(phase, n)| self.op_cost(phase) * n).sum()
    }
}
