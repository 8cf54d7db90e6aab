//! The baseline authentication flow on the simulated network.

use std::time::Duration;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use swarmauth_core::baseline5g::{run_nr_flow, Checkpoint, NrOutcome, Supi, TamperField, TamperTap, DEFAULT_SUPI_LEN};
use swarmauth_core::simnet::engine::{PassThrough, Phase};
use swarmauth_core::simnet::LatencyModel;
use swarmauth_core::P256Group;

fn supis(n: usize, seed: u64) -> Vec<Supi> {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    (0..n).map(|_| Supi::random(DEFAULT_SUPI_LEN, &mut r).unwrap()).collect()
}

#[test]
fn single_ue_takes_two_round_trips_plus_crypto() {
    let ids = supis(1, 1);
    let mut r = ChaCha20Rng::seed_from_u64(2);
    let res = run_nr_flow(&P256Group, &ids, LatencyModel::default(), &mut r, &mut PassThrough);
    assert_eq!(res.outcomes, vec![NrOutcome::Authenticated(ids[0].clone())]);
    assert_eq!(res.completed.at, Duration::from_micros(21_600));
    assert_eq!(res.completed.path.get(Phase::CoreLink), Duration::from_millis(20));
    assert_eq!(res.completed.path.total(), res.completed.at);
    assert_eq!((res.ops.asym_encrypt, res.ops.asym_decrypt, res.ops.hash, res.ops.ec_point_mul), (1, 1, 2, 0));
    assert_eq!(res.round_trips, 2);
    assert_eq!(res.core_decryptions, 1);

    let model = LatencyModel { hash_op: Duration::from_micros(200), ..LatencyModel::default() };
    let res = run_nr_flow(&P256Group, &ids, model, &mut r, &mut PassThrough);
    assert_eq!(res.completed.at, Duration::from_micros(22_000));
}

#[test]
fn hundred_random_supis_are_recovered() {
    let ids = supis(100, 3);
    let mut r = ChaCha20Rng::seed_from_u64(4);
    let res = run_nr_flow(&P256Group, &ids, LatencyModel::default(), &mut r, &mut PassThrough);
    assert!(res.all_authenticated());
    for (o, s) in res.outcomes.iter().zip(&ids) {
        assert_eq!(o, &NrOutcome::Authenticated(s.clone()));
    }
    // UEs go one after another.
    assert_eq!(res.completed.at, Duration::from_micros(21_600) * 100);
    assert_eq!(res.round_trips, 200);
    assert_eq!(res.core_decryptions, 100);
    for (i, f) in res.finished.iter().enumerate() {
        assert_eq!(f.unwrap().at, Duration::from_micros(21_600) * (i as u32 + 1));
    }
}

#[test]
fn every_single_field_tamper_is_rejected() {
    let ids = supis(1, 5);
    for field in [TamperField::Suci, TamperField::Rand, TamperField::Res] {
        for occurrence in 0..TamperTap::occurrences(field) {
            for bit in [0usize, 7, 100, 255] {
                let mut tap = TamperTap::new(field, occurrence, bit);
                let mut r = ChaCha20Rng::seed_from_u64(6);
                let res = run_nr_flow(&P256Group, &ids, LatencyModel::default(), &mut r, &mut tap);
                assert!(tap.hit, "{field:?} #{occurrence} never sent");
                let NrOutcome::Rejected(at) = res.outcomes[0] else {
                    panic!("{field:?} #{occurrence} bit {bit} accepted: {:?}", res.outcomes[0]);
                };
                // RES altered between SEAF and AUSF is caught by the AUSF.
                let expected = match (field, occurrence) {
                    (TamperField::Suci, _) => Checkpoint::Udm,
                    (TamperField::Res, 1) => Checkpoint::Ausf,
                    _ => Checkpoint::Seaf,
                };
                assert_eq!(at, expected, "{field:?} #{occurrence}");
                assert!(res.finished[0].is_some());
            }
        }
    }
}

#[test]
fn transcripts_are_deterministic() {
    let run = || {
        let ids = supis(3, 7);
        let mut r = ChaCha20Rng::seed_from_u64(8);
        run_nr_flow(&P256Group, &ids, LatencyModel::default(), &mut r, &mut PassThrough).to_lines()
    };
    let a = run();
    assert_eq!(a, run());
    assert_eq!(a.lines().count(), 3 * 10);
    assert!(a.lines().next().unwrap().starts_with("t_us=5100.000 kind=auth_request from=ue0 to=seaf "));
}

#[test]
fn no_ues_no_time() {
    let mut r = ChaCha20Rng::seed_from_u64(9);
    let res = run_nr_flow(&P256Group, &[], LatencyModel::default(), &mut r, &mut PassThrough);
    assert!(res.outcomes.is_empty());
    assert_eq!(res.completed.at, Duration::ZERO);
}
