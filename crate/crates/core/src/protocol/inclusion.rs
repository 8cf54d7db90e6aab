//! New-drone inclusion: `t − 1` guards verify a newcomer against `Q`, then one
//! of them hands over the group key.

use alloc::collections::BTreeMap;
use alloc::vec;

use rand_core::RngCore;

use crate::algebra::PrimeOrderGroup;
use crate::simnet::engine::Engine;

use super::drone::{Drone, Party, Swarm};
use super::session::{link, NetTap, RoundSpec, RunOptions, RunResult, Session};
use super::ProtocolError;

/// Result of an inclusion attempt.
#[derive(Debug, Clone)]
pub struct InclusionRun<G: PrimeOrderGroup> {
    pub result: RunResult,
    /// The candidate as it ended up; also inserted into the swarm if accepted.
    pub candidate: Drone<G>,
}

/// Runs inclusion of `candidate` into `swarm` on the simulated network.
///
/// On acceptance the candidate holds the group key, becomes a member, and is
/// added to `swarm`.
pub fn run_inclusion<G: PrimeOrderGroup>(
    group: &G,
    swarm: &mut Swarm<G>,
    candidate: Drone<G>,
    opts: &RunOptions,
    rng: &mut dyn RngCore,
    tap: &mut NetTap<'_>,
) -> Result<InclusionRun<G>, ProtocolError> {
    let guards = swarm.participating_guards()?;
    if candidate.id.swarm != swarm.id {
        return Err(ProtocolError::WrongSwarm(candidate.id));
    }
    let collides = |x: u64| group.scalar_from_u64(x) == candidate.share.x;
    if swarm.drones.contains_key(&candidate.id.x) || guards.iter().any(|g| collides(g.x)) {
        return Err(ProtocolError::DuplicateIdentifier);
    }
    let cid = candidate.id;
    let mut drones: BTreeMap<_, _> = guards.iter().map(|g| (*g, swarm.drones[&g.x].clone())).collect();
    drones.insert(cid, candidate);

    let mut session = Session::new(*group, drones, None, opts.parallel_guards, rng);
    session.add_round(RoundSpec {
        swarm: swarm.id,
        threshold: swarm.threshold,
        commitment: swarm.commitment,
        candidate: cid,
        guards: guards.clone(),
        deliver_key: true,
        gate: None,
    });
    let mut net = Engine::new(opts.latency, link, tap);
    let opening = session.candidate_publish(swarm.id);
    session.kickoff(&mut net, vec![(Party::Drone(cid), opening)]);
    session.run(&mut net);
    let (result, mut drones) = session.finish(&net);

    let candidate = drones.remove(&cid).expect("candidate in session");
    for (id, d) in drones {
        swarm.drones.insert(id.x, d);
    }
    if result.outcome.is_accepted() {
        swarm.drones.insert(cid.x, candidate.clone());
    }
    Ok(InclusionRun { result, candidate })
}
