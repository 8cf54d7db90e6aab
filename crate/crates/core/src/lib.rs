//! Threshold group authentication for drone swarms.
//!
//! A swarm's members hold evaluations `f(x_i)` of a secret polynomial whose
//! constant term is the swarm's group key. Guard drones admit a newcomer by
//! checking that the Lagrange-weighted sum of `t` public shares `f(x_i)·P`
//! equals the published commitment `Q = f(0)·P`, then hand over the group key
//! under an ECDH-derived key. Two swarms merge by having the core network issue
//! one guard a share of the other swarm's polynomial.
//!
//! The crate is `no_std` (with `alloc`). Besides the protocol it carries a
//! functional model of the 5G NR UE authentication flow used as a baseline, and
//! a deterministic discrete-event simulator that times both under a latency
//! model.

#![no_std]

extern crate alloc;

pub mod algebra;
pub mod baseline5g;
mod codec;
pub mod protocol;
pub mod seal;
pub mod shares;
pub mod simnet;

pub use algebra::{FieldElement, P256Group, PrimeOrderGroup, ToyGroup};
