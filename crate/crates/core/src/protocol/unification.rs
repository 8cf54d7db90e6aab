//! Two-swarm unification.
//!
//! 1. Swarm A's designated guard `d_a` (its lowest guard) asks the core for a
//!    share of swarm B's polynomial `g`.
//! 2. The core seals a fresh `g`-share for `d_a`.
//! 3. `d_a` opens it and publishes the public half to B's `t_B − 1` guards.
//! 4. B's guards publish their own public shares to one another.
//! 5. Each of B's guards checks the Lagrange sum against `Q_B`.
//! 6. B's deliverer seals `g(0)` for `d_a` under their pairwise key.
//! 7. `d_a` re-seals `g(0)` under A's current key and broadcasts it to A.
//! 8. Every drone of both swarms now holds `g(0)`.
//!
//! With [`RunOptions::mutual`], B's lowest guard `d_b` is also verified by A's
//! guards under `f`, and B releases its key only once `d_b` was accepted.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::algebra::PrimeOrderGroup;
use crate::simnet::engine::Engine;

use super::core_network::CoreNetwork;
use super::drone::{Party, Swarm};
use super::session::{link, MergePlan, NetTap, RoundSpec, RunOptions, RunResult, Session};
use super::ProtocolError;

/// Merges swarm `a` into swarm `b`'s key. Both swarms are updated in place.
pub fn run_unification<G: PrimeOrderGroup>(
    group: &G,
    a: &mut Swarm<G>,
    b: &mut Swarm<G>,
    core: &mut CoreNetwork<G>,
    opts: &RunOptions,
    rng: &mut dyn RngCore,
    tap: &mut NetTap<'_>,
) -> Result<RunResult, ProtocolError> {
    if a.id == b.id {
        return Err(ProtocolError::SameSwarm(a.id));
    }
    let b_guards = b.participating_guards()?;
    let a_guards = a.participating_guards()?;
    let d_a = *a_guards.first().ok_or(ProtocolError::NotEnoughGuards { needed: 1, available: 0 })?;
    let d_b = b_guards[0];

    let drones: BTreeMap<_, _> = a.drones.values().chain(b.drones.values()).map(|d| (d.id, d.clone())).collect();
    let a_members: Vec<_> = a.drones.values().map(|d| d.id).filter(|id| *id != d_a).collect();

    let mut session = Session::new(*group, drones, Some(core), opts.parallel_guards, rng);
    session.add_round(RoundSpec {
        swarm: b.id,
        threshold: b.threshold,
        commitment: b.commitment,
        candidate: d_a,
        guards: b_guards,
        deliver_key: true,
        gate: opts.mutual.then_some(a.id),
    });
    if opts.mutual {
        session.add_round(RoundSpec {
            swarm: a.id,
            threshold: a.threshold,
            commitment: a.commitment,
            candidate: d_b,
            guards: a_guards,
            deliver_key: false,
            gate: None,
        });
    }
    session.set_plan(MergePlan { a: a.id, b: b.id, d_a, a_members });

    let mut starts = alloc::vec![(Party::Drone(d_a), session.cross_request(d_a, b.id))];
    if opts.mutual {
        starts.push((Party::Drone(d_b), session.cross_request(d_b, a.id)));
    }
    let mut net = Engine::new(opts.latency, link, tap);
    session.kickoff(&mut net, starts);
    session.run(&mut net);
    let (result, drones) = session.finish(&net);
    for (id, d) in drones {
        let swarm = if id.swarm == a.id { &mut *a } else { &mut *b };
        swarm.drones.insert(id.x, d);
    }
    Ok(result)
}
