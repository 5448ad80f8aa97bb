//! Local search source estimators.
//!
//! All variants walk backward from the first hospitalized case, maintaining a
//! current candidate and repeatedly trying to find a tested node whose
//! symptom onset precedes the candidate's. One iteration tests the
//! candidate's household and contacts; the household variant additionally
//! chases leads through asymptomatic household members, which lets the walk
//! cross a household whose bridging member never showed symptoms:
//!
//! - plain: test household(candidate) then contacts(candidate); move to the
//!   earliest-onset positive found, ties to the lowest id.
//! - household rules (`household_rules`): additionally (a) whenever a tested
//!   node comes back positive without onset, test its whole household, and
//!   (b) test the contacts of every known asymptomatic member of the current
//!   candidate's household, both at iteration seed time and as results
//!   arrive.
//! - eager (`eager`): end the iteration at the first improving result and
//!   drop the rest of the local test queue (anything already queued stays
//!   barred from re-testing).
//!
//! A node is enqueued at most once per run: the `visited` set persists
//! across iterations and across eager discards.

use crate::epidemic::EpidemicState;
use crate::error::Result;
use crate::network::ContactNetwork;
use crate::session::{QueryLedger, Session, TestResult};
use crate::NodeId;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LsConfig {
    /// Chase asymptomatic household members (the `+` rules).
    pub household_rules: bool,
    /// Jump to a better candidate at the first improving result instead of
    /// draining the iteration's queue.
    pub eager: bool,
}

impl LsConfig {
    pub fn plain() -> Self {
        LsConfig { household_rules: false, eager: false }
    }

    pub fn household() -> Self {
        LsConfig { household_rules: true, eager: false }
    }

    pub fn household_eager() -> Self {
        LsConfig { household_rules: true, eager: true }
    }
}

/// What a detection run produced and what it cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionOutcome {
    pub estimate: NodeId,
    /// Candidate sequence from the first hospitalized case to the estimate.
    pub candidate_trail: Vec<NodeId>,
    /// Queries spent by this run alone.
    pub ledger: QueryLedger,
    /// Days of investigation after the session opened.
    pub days: i64,
}

/// Runs a local search variant over `session` until no tested node improves
/// on the current candidate, and returns that candidate.
pub fn run_local_search<G: ContactNetwork>(
    session: &mut Session<'_, G>,
    cfg: LsConfig,
) -> Result<DetectionOutcome> {
    let ledger_start = session.ledger();
    let clock_start = session.clock();
    let params = *session.params();
    let h0 = session.patient_zero();
    // Exposure of the hospitalized case is pinned by its hospitalization
    // day, so its onset is known without a test.
    let onset0 = session.t_h() - params.t_e - params.t_h + params.onset_offset();

    let mut candidates = vec![h0];
    let mut onsets: BTreeMap<NodeId, i64> = BTreeMap::from([(h0, onset0)]);
    let mut visited: BTreeSet<NodeId> = BTreeSet::from([h0]);
    let mut asymptomatic: BTreeSet<NodeId> = BTreeSet::new();
    let mut queue: VecDeque<NodeId> = VecDeque::new();

    loop {
        let cand = *candidates.last().expect("trail never empty");
        let mut best = (onsets[&cand], cand);
        // Eager discards may have left entries; they stay visited but are
        // not tested.
        queue.clear();

        let enqueue = |q: &mut VecDeque<NodeId>, visited: &mut BTreeSet<NodeId>, v: NodeId| {
            if visited.insert(v) {
                q.push_back(v);
            }
        };

        let household = session.query_household(cand)?;
        let household_set: BTreeSet<NodeId> = household.iter().copied().collect();
        for &u in &household {
            enqueue(&mut queue, &mut visited, u);
        }
        for u in session.query_contacts(cand)? {
            enqueue(&mut queue, &mut visited, u);
        }
        if cfg.household_rules {
            // Known asymptomatic members of this household may have carried
            // the infection in; their contacts are fresh leads even when the
            // member was discovered in an earlier iteration.
            for &a in household.iter().filter(|a| asymptomatic.contains(a)) {
                for u in session.query_contacts(a)? {
                    enqueue(&mut queue, &mut visited, u);
                }
            }
        }

        let mut cut_short = false;
        while !queue.is_empty() {
            while session.pending_tests() < session.daily_cap() {
                match queue.pop_front() {
                    Some(v) => session.submit_test(v)?,
                    None => break,
                }
            }
            let batch = session.advance_day();
            for (v, res) in batch {
                match res {
                    TestResult::PositiveOnset(t) => {
                        if (t, v) < best {
                            best = (t, v);
                            if cfg.eager {
                                cut_short = true;
                                break;
                            }
                        }
                    }
                    TestResult::PositiveNoOnset => {
                        asymptomatic.insert(v);
                        if cfg.household_rules {
                            for u in session.query_household(v)? {
                                enqueue(&mut queue, &mut visited, u);
                            }
                            if household_set.contains(&v) {
                                for u in session.query_contacts(v)? {
                                    enqueue(&mut queue, &mut visited, u);
                                }
                            }
                        }
                    }
                    TestResult::Negative => {}
                }
            }
            if cut_short {
                break;
            }
        }

        if best.1 == cand {
            let end = session.ledger();
            return Ok(DetectionOutcome {
                estimate: cand,
                candidate_trail: candidates,
                ledger: QueryLedger {
                    tests: end.tests - ledger_start.tests,
                    household_queries: end.household_queries - ledger_start.household_queries,
                    edges_revealed: end.edges_revealed - ledger_start.edges_revealed,
                },
                days: session.clock() - clock_start,
            });
        }
        onsets.insert(best.1, best.0);
        candidates.push(best.1);
    }
}

/// Exact success criterion for the plain walk on tree-like worlds: it
/// reaches the source iff every node on the transmission path to the first
/// hospitalized case ran a symptomatic course.
pub fn ls_success_predicate(state: &EpidemicState, h0: NodeId) -> Result<bool> {
    let path = state.transmission_path(h0)?;
    Ok(path.iter().all(|&v| {
        state
            .timeline(v)
            .expect("path nodes are infected")
            .course
            .is_symptomatic()
    }))
}

/// Sufficient criterion for the household variant: the source is symptomatic
/// and every household the transmission path touches contains at least one
/// symptomatic path node.
pub fn ls_plus_sufficient_predicate<G: ContactNetwork>(
    g: &G,
    state: &EpidemicState,
    h0: NodeId,
) -> Result<bool> {
    let path = state.transmission_path(h0)?;
    let source = path[0];
    if !state
        .timeline(source)
        .expect("source is infected")
        .course
        .is_symptomatic()
    {
        return Ok(false);
    }
    // Households are disjoint, so the minimum member id identifies one.
    let mut household_ok: BTreeMap<NodeId, bool> = BTreeMap::new();
    for &v in &path {
        let key = *g.household(v).iter().min().expect("households are non-empty");
        let sym = state
            .timeline(v)
            .expect("path nodes are infected")
            .course
            .is_symptomatic();
        let entry = household_ok.entry(key).or_insert(false);
        *entry = *entry || sym;
    }
    Ok(household_ok.values().all(|&ok| ok))
}
