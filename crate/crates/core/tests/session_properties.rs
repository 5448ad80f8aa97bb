//! Property tests for the testing-session contract: capped FIFO dispatch,
//! results that match the pre-step world, single-charged edge reveals, and
//! frozen-world permanence.

use std::collections::{BTreeMap, VecDeque};

use epitrace_core::epidemic::{DiseaseVariant, EpidemicParams, EpidemicState};
use epitrace_core::error::Error;
use epitrace_core::network::{ContactNetwork, HouseholdNet, NetworkParams};
use epitrace_core::rng::stream;
use epitrace_core::session::{Session, SessionConfig, TestResult};
use proptest::prelude::*;

fn small_params(p_i: f64, p_a: f64, p_h: f64, no_recovery: bool) -> EpidemicParams {
    EpidemicParams {
        p_i,
        p_a,
        p_h,
        variant: if no_recovery { DiseaseVariant::NoRecovery } else { DiseaseVariant::Full },
        ..EpidemicParams::default()
    }
}

fn generate_net(households: usize, d_c: usize, d_h: usize, seed: u64) -> HouseholdNet {
    let params = NetworkParams { n: households * (d_h + 1), d_c, d_h };
    for salt in 0.. {
        if let Ok(net) = HouseholdNet::generate(params, &mut stream(seed, "prop-net", salt)) {
            return net;
        }
        assert!(salt < 50, "no pairing found for {params:?}");
    }
    unreachable!()
}

/// What `advance_day` must return for `v`, recomputed from the ground-truth
/// snapshot before the world steps.
fn expected_result(state: &EpidemicState, params: &EpidemicParams, v: usize) -> TestResult {
    let day = state.day();
    match state.timeline(v) {
        None => TestResult::Negative,
        Some(tl) if day < tl.infectious_from(params) => TestResult::Negative,
        Some(tl) => match tl.onset_day(params) {
            Some(onset) if day >= onset => TestResult::PositiveOnset(onset),
            _ => TestResult::PositiveNoOnset,
        },
    }
}

fn open_session<'g>(
    net: &'g HouseholdNet,
    params: EpidemicParams,
    config: SessionConfig,
    seed: u64,
) -> Option<Session<'g, HouseholdNet>> {
    let n = net.node_count().unwrap();
    for salt in 0..40u64 {
        let source = (salt as usize * 7 + seed as usize) % n;
        match Session::open(net, params, config, source, stream(seed, "prop-epi", salt)) {
            Ok(s) => return Some(s),
            Err(Error::NoOutbreak) => continue,
            Err(e) => panic!("unexpected open failure: {e}"),
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn dispatch_is_fifo_capped_and_truthful(
        seed in 0u64..10_000,
        households in 2usize..10,
        d_c in 1usize..4,
        d_h in 1usize..3,
        cap in 1usize..5,
        freeze in any::<bool>(),
        no_recovery in any::<bool>(),
        p_a in 0.0f64..0.9,
    ) {
        let net = generate_net(households * 2, d_c, d_h, seed);
        let n = net.node_count().unwrap();
        let params = small_params(0.5, p_a, 0.5, no_recovery);
        let config = SessionConfig { freeze_epidemic: freeze, daily_cap: Some(cap) };
        let Some(mut session) = open_session(&net, params, config, seed) else {
            return Ok(());
        };

        let mut shadow: VecDeque<usize> = VecDeque::new();
        let mut submitted = 0usize;
        let mut dispatched = 0u64;
        let mut by_node: BTreeMap<usize, Vec<TestResult>> = BTreeMap::new();
        for day in 0..12 {
            for _ in 0..(day % 3) + 1 {
                let v = submitted % n;
                session.submit_test(v).unwrap();
                shadow.push_back(v);
                submitted += 1;
            }
            let k = cap.min(shadow.len());
            let expected: Vec<(usize, TestResult)> = shadow
                .iter()
                .take(k)
                .map(|&v| (v, expected_result(session.world_state(), &params, v)))
                .collect();
            let got = session.advance_day();
            prop_assert_eq!(got.len(), k, "cap or queue length violated");
            prop_assert_eq!(&got, &expected, "dispatch order or result mismatch");
            shadow.drain(..k);
            dispatched += k as u64;
            for (v, r) in got {
                by_node.entry(v).or_default().push(r);
            }
        }
        prop_assert_eq!(session.ledger().tests, dispatched);
        prop_assert_eq!(session.pending_tests(), shadow.len());

        if freeze {
            // The frozen snapshot never changes, so retests must agree.
            for (v, results) in &by_node {
                prop_assert!(
                    results.windows(2).all(|w| w[0] == w[1]),
                    "frozen world changed its answer for {}: {:?}", v, results
                );
            }
        }
    }

    #[test]
    fn queries_partition_and_charge_once(
        seed in 0u64..10_000,
        households in 2usize..10,
        d_c in 1usize..4,
        d_h in 1usize..3,
    ) {
        let net = generate_net(households * 2, d_c, d_h, seed);
        let n = net.node_count().unwrap();
        for v in 0..n {
            let mut hh = net.household(v);
            prop_assert!(hh.contains(&v), "household must include its member");
            prop_assert_eq!(hh.len(), d_h + 1);
            hh.sort_unstable();
            for &u in &hh {
                let mut other = net.household(u);
                other.sort_unstable();
                prop_assert_eq!(&other, &hh, "household must be shared by all members");
            }
            let neigh = net.neighbors(v);
            prop_assert!(neigh.len() <= d_c + d_h, "degree bound violated");
            prop_assert!(!neigh.contains(&v), "self loop");
            for &u in &neigh {
                prop_assert!(net.neighbors(u).contains(&v), "asymmetric edge");
            }
        }

        let params = small_params(0.9, 0.2, 0.9, false);
        let config = SessionConfig { freeze_epidemic: true, daily_cap: Some(2) };
        let Some(mut session) = open_session(&net, params, config, seed) else {
            return Ok(());
        };
        let mut total_edges = 0u64;
        for v in 0..n {
            let first = session.query_contacts(v).unwrap();
            let charged = session.ledger().edges_revealed;
            let second = session.query_contacts(v).unwrap();
            prop_assert_eq!(first, second);
            prop_assert_eq!(session.ledger().edges_revealed, charged, "re-query recharged");
            total_edges = charged;
        }
        let edge_count: usize = (0..n).map(|v| net.neighbors(v).len()).sum::<usize>() / 2;
        prop_assert_eq!(total_edges, edge_count as u64, "all edges charged exactly once");
        prop_assert_eq!(session.ledger().household_queries, 0);
        session.query_household(0).unwrap();
        prop_assert_eq!(session.ledger().household_queries, 1);
    }
}
