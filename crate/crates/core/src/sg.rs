//! Size-Gain baseline: keeps a candidate set of possible sources, prunes it
//! with pairwise delay/distance consistency constraints, and each day places
//! the tests expected to shrink the set the most.
//!
//! Hop distances are scaled into days through the mean per-hop infection
//! delay `mu = T_E - 1 + 1/p_i` (exactly `T_E` when `p_i = 1`), so the
//! constraint compares symptom-onset differences against expected travel
//! times. A candidate `c` survives the ordered observation pair `(x, y)`,
//! where `x` upper-bounds and `y` lower-bounds a symptom onset, iff
//!
//! ```text
//! (t_y - t_x) - mu * (d(y,c) - d(x,c)) < sigma * (d(x,c) + d(y,c))
//! ```
//!
//! Exact onsets enter both orderings, which restores the absolute value of
//! the original two-sided test.

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;

use crate::detect::DetectionOutcome;
use crate::error::{Error, Result};
use crate::network::ContactNetwork;
use crate::session::{QueryLedger, Session, TestResult};
use crate::NodeId;

const UNREACHABLE: u32 = u32::MAX;
/// Keeps exact delay matches alive under a strict inequality when sigma = 0.
const SLACK: f64 = 1e-9;
/// Above this many (hypothesis, sensor) pairs the gain estimator samples.
const EXACT_PAIR_LIMIT: usize = 1_000_000;
/// Hypotheses drawn per scoring round once sampling kicks in.
const GAIN_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug)]
pub struct SgConfig {
    /// Per-hop delay standard deviation (days) in the consistency bound.
    pub sigma: f64,
    /// Investigation days after which an estimate is forced.
    pub deadline_day: i64,
}

impl SgConfig {
    /// Default tuning: sigma of the geometric infection wait,
    /// `sqrt(1 - p_i) / p_i`.
    pub fn for_epidemic(p_i: f64, deadline_day: i64) -> Result<Self> {
        if !(p_i > 0.0 && p_i <= 1.0) {
            return Err(Error::invalid("size-gain needs p_i in (0, 1]"));
        }
        Ok(SgConfig {
            sigma: (1.0 - p_i).sqrt() / p_i,
            deadline_day,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma.is_nan() || self.sigma < 0.0 {
            return Err(Error::invalid("sigma must be nonnegative"));
        }
        if self.deadline_day < 0 {
            return Err(Error::invalid("deadline_day must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgObsKind {
    /// Exact symptom onset day.
    Onset,
    /// Positive without an onset; upper-bounds the onset.
    NoOnset,
    /// Negative test; lower-bounds any eventual onset.
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SgObservation {
    pub node: NodeId,
    pub kind: SgObsKind,
    pub day: i64,
}

/// Candidate set plus everything needed to evaluate the constraints: the
/// revealed adjacency, all-pairs BFS distances, and the day scales.
pub struct SgState {
    dist: Vec<Vec<u32>>,
    /// Shrinks monotonically; never regrows.
    pub candidates: BTreeSet<NodeId>,
    pub observations: Vec<SgObservation>,
    mu: f64,
    sigma: f64,
    /// Days from exposure to onset, used for predicted-onset hypotheses.
    onset_lag: i64,
    /// Days a positive can still precede its onset (T_P in the full model):
    /// a no-onset positive at day t only bounds the onset by t + this.
    presym_days: i64,
}

impl SgState {
    pub fn new(
        adj: Vec<Vec<NodeId>>,
        mu: f64,
        sigma: f64,
        onset_lag: i64,
        presym_days: i64,
    ) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid("mu must be a positive day count"));
        }
        if sigma.is_nan() || sigma < 0.0 {
            return Err(Error::invalid("sigma must be nonnegative"));
        }
        if presym_days < 0 || onset_lag < presym_days {
            return Err(Error::invalid("onset lag must cover the pre-symptomatic days"));
        }
        let n = adj.len();
        for (v, row) in adj.iter().enumerate() {
            if let Some(&w) = row.iter().find(|&&w| w >= n) {
                let _ = v;
                return Err(Error::UnknownNode(w));
            }
        }
        Ok(SgState {
            dist: bfs_all(&adj),
            candidates: (0..n).collect(),
            observations: Vec::new(),
            mu,
            sigma,
            onset_lag,
            presym_days,
        })
    }

    pub fn node_count(&self) -> usize {
        self.dist.len()
    }

    /// Latest day the onset can be, when `o` bounds it from above.
    fn upper_time(&self, o: &SgObservation) -> Option<i64> {
        match o.kind {
            SgObsKind::Onset => Some(o.day),
            SgObsKind::NoOnset => Some(o.day + self.presym_days),
            SgObsKind::Negative => None,
        }
    }

    /// Earliest day the onset can be, when `o` bounds it from below.
    fn lower_time(o: &SgObservation) -> Option<i64> {
        match o.kind {
            SgObsKind::Onset | SgObsKind::Negative => Some(o.day),
            SgObsKind::NoOnset => None,
        }
    }

    fn ordered_ok(&self, tx: f64, dx: u32, ty: f64, dy: u32) -> bool {
        if self.sigma.is_infinite() {
            return true;
        }
        let drift = (ty - tx) - self.mu * (f64::from(dy) - f64::from(dx));
        drift < self.sigma * f64::from(dx + dy) + SLACK
    }

    /// One ordered constraint; vacuous when the kinds do not bound that way
    /// or a distance is infinite (positives are pruned by reachability
    /// separately, negatives in other components say nothing).
    fn pair_ok(&self, x: &SgObservation, y: &SgObservation, c: NodeId) -> bool {
        let (Some(tx), Some(ty)) = (self.upper_time(x), Self::lower_time(y)) else {
            return true;
        };
        let dx = self.dist[x.node][c];
        let dy = self.dist[y.node][c];
        if dx == UNREACHABLE || dy == UNREACHABLE {
            return true;
        }
        self.ordered_ok(tx as f64, dx, ty as f64, dy)
    }

    /// Current candidates surviving both orderings of one observation pair.
    pub fn filter_pair(&self, a: &SgObservation, b: &SgObservation) -> BTreeSet<NodeId> {
        self.candidates
            .iter()
            .copied()
            .filter(|&c| self.pair_ok(a, b, c) && self.pair_ok(b, a, c))
            .collect()
    }

    /// Records `obs` and prunes candidates against every earlier
    /// observation. A positive result also evicts candidates that cannot
    /// reach the tested node at all.
    pub fn add_observation(&mut self, obs: SgObservation) -> Result<()> {
        if obs.node >= self.node_count() {
            return Err(Error::UnknownNode(obs.node));
        }
        let mut cand = std::mem::take(&mut self.candidates);
        if obs.kind != SgObsKind::Negative {
            let row = &self.dist[obs.node];
            cand.retain(|&c| row[c] != UNREACHABLE);
        }
        for prior in &self.observations {
            cand.retain(|&c| self.pair_ok(prior, &obs, c) && self.pair_ok(&obs, prior, c));
        }
        self.candidates = cand;
        self.observations.push(obs);
        Ok(())
    }

    pub fn uniform_candidate<R: Rng>(&self, rng: &mut R) -> Option<NodeId> {
        if self.candidates.is_empty() {
            return None;
        }
        let k = rng.gen_range(0..self.candidates.len());
        self.candidates.iter().copied().nth(k)
    }

    /// Expected number of candidates the new anchor pair would evict if the
    /// source were `s` (exposed on day `e`) and node `u` were tested.
    fn eliminated_by_prediction(&self, u: NodeId, t_pred: f64, anchor: &SgObservation) -> usize {
        let ta = anchor.day as f64;
        let row_u = &self.dist[u];
        let row_a = &self.dist[anchor.node];
        self.candidates
            .iter()
            .filter(|&&c| {
                let du = row_u[c];
                if du == UNREACHABLE {
                    return true;
                }
                let da = row_a[c];
                !(self.ordered_ok(ta, da, t_pred, du) && self.ordered_ok(t_pred, du, ta, da))
            })
            .count()
    }

    fn accumulate_gains(
        &self,
        s: NodeId,
        e: i64,
        untested: &[NodeId],
        anchor: &SgObservation,
        gains: &mut [f64],
    ) {
        let row_s = &self.dist[s];
        for (ui, &u) in untested.iter().enumerate() {
            let d_su = row_s[u];
            if d_su == UNREACHABLE {
                continue;
            }
            let t_pred = e as f64 + self.mu * f64::from(d_su) + self.onset_lag as f64;
            gains[ui] += self.eliminated_by_prediction(u, t_pred, anchor) as f64;
        }
    }

    /// Earliest exposure day of the hypothesis window for source `s`: the
    /// day consistent with the anchor onset at mean per-hop delay, minus
    /// half the window width. None when `s` cannot reach the anchor.
    fn window_start(&self, anchor: &SgObservation, s: NodeId, width: i64) -> Option<i64> {
        let d0 = self.dist[anchor.node][s];
        if d0 == UNREACHABLE {
            return None;
        }
        let center = anchor.day - self.onset_lag - (self.mu * f64::from(d0)).round() as i64;
        Some(center - width / 2)
    }

    /// Untested nodes ranked by expected candidate eviction under a uniform
    /// (source, exposure day) prior; exposure days span a `width`-day window
    /// around each source's anchor-consistent day, and hypotheses are paired
    /// against the anchor onset only. Ties break toward lower ids. Falls
    /// back to sampling when exact enumeration would exceed
    /// [`EXACT_PAIR_LIMIT`].
    pub fn rank_sensors<R: Rng>(
        &self,
        tested: &BTreeSet<NodeId>,
        anchor: &SgObservation,
        width: i64,
        count: usize,
        rng: &mut R,
    ) -> Vec<NodeId> {
        let untested: Vec<NodeId> = (0..self.node_count())
            .filter(|v| !tested.contains(v))
            .collect();
        if untested.is_empty() || count == 0 {
            return Vec::new();
        }
        let width = width.max(1);
        let sources: Vec<NodeId> = self.candidates.iter().copied().collect();
        let hypotheses = sources.len() * width as usize;
        let mut gains = vec![0.0f64; untested.len()];
        if !sources.is_empty() {
            if hypotheses * untested.len() <= EXACT_PAIR_LIMIT {
                for &s in &sources {
                    let Some(start) = self.window_start(anchor, s, width) else {
                        continue;
                    };
                    for e in start..start + width {
                        self.accumulate_gains(s, e, &untested, anchor, &mut gains);
                    }
                }
            } else {
                for _ in 0..GAIN_SAMPLES {
                    let s = sources[rng.gen_range(0..sources.len())];
                    let Some(start) = self.window_start(anchor, s, width) else {
                        continue;
                    };
                    let e = start + rng.gen_range(0..width);
                    self.accumulate_gains(s, e, &untested, anchor, &mut gains);
                }
            }
        }
        let mut order: Vec<usize> = (0..untested.len()).collect();
        order.sort_by(|&a, &b| {
            gains[b]
                .total_cmp(&gains[a])
                .then_with(|| untested[a].cmp(&untested[b]))
        });
        order
            .into_iter()
            .take(count)
            .map(|i| untested[i])
            .collect()
    }

    /// Single best next sensor, if any node is still untested.
    pub fn next_sensor<R: Rng>(
        &self,
        tested: &BTreeSet<NodeId>,
        anchor: &SgObservation,
        width: i64,
        rng: &mut R,
    ) -> Option<NodeId> {
        self.rank_sensors(tested, anchor, width, 1, rng)
            .first()
            .copied()
    }
}

fn bfs_all(adj: &[Vec<NodeId>]) -> Vec<Vec<u32>> {
    let n = adj.len();
    let mut out = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for s in 0..n {
        let mut d = vec![UNREACHABLE; n];
        d[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if d[w] == UNREACHABLE {
                    d[w] = d[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        out.push(d);
    }
    out
}

/// Runs Size-Gain through a session: reveals the whole network, then places
/// up to a daily cap of gain-ranked tests until one candidate remains or the
/// deadline passes. A singleton set is the estimate; at the deadline the
/// estimate is drawn uniformly from the survivors; an emptied set (every
/// candidate contradicted) falls back to the first hospitalized case.
pub fn run_sg<G: ContactNetwork, R: Rng>(
    session: &mut Session<'_, G>,
    cfg: &SgConfig,
    rng: &mut R,
) -> Result<DetectionOutcome> {
    cfg.validate()?;
    let n = session.node_count().ok_or(Error::InfiniteNetwork)?;
    let params = *session.params();
    if params.p_i <= 0.0 {
        return Err(Error::invalid("size-gain needs p_i > 0 to scale distances"));
    }
    let h0 = session.patient_zero();
    let ledger_start = session.ledger();
    let clock_start = session.clock();

    let mut adj = Vec::with_capacity(n);
    for v in 0..n {
        adj.push(session.query_contacts(v)?);
    }

    let mu = params.t_e as f64 - 1.0 + 1.0 / params.p_i;
    let presym = params.onset_offset() - params.t_e;
    let mut state = SgState::new(adj, mu, cfg.sigma, params.onset_offset(), presym)?;

    // The hospitalization pins the anchor onset without spending a test.
    let anchor = SgObservation {
        node: h0,
        kind: SgObsKind::Onset,
        day: session.t_h() - params.t_e - params.t_h + params.onset_offset(),
    };
    state.add_observation(anchor)?;

    let width = params.t_e + params.t_h + params.t_p;
    let per_day = session.daily_cap().max(1);
    let mut tested: BTreeSet<NodeId> = BTreeSet::new();
    tested.insert(h0);

    while state.candidates.len() > 1 && session.clock() - clock_start < cfg.deadline_day {
        let picks = state.rank_sensors(&tested, &anchor, width, per_day, rng);
        if picks.is_empty() {
            break;
        }
        for &u in &picks {
            session.submit_test(u)?;
            tested.insert(u);
        }
        let eval_day = session.world_state().day();
        for (v, r) in session.advance_day() {
            let obs = match r {
                TestResult::Negative => SgObservation {
                    node: v,
                    kind: SgObsKind::Negative,
                    day: eval_day,
                },
                TestResult::PositiveNoOnset => SgObservation {
                    node: v,
                    kind: SgObsKind::NoOnset,
                    day: eval_day,
                },
                TestResult::PositiveOnset(onset) => SgObservation {
                    node: v,
                    kind: SgObsKind::Onset,
                    day: onset,
                },
            };
            state.add_observation(obs)?;
        }
    }

    let trail: Vec<NodeId> = state.candidates.iter().copied().collect();
    let (estimate, trail) = if trail.is_empty() {
        (h0, vec![h0])
    } else if trail.len() == 1 {
        (trail[0], trail)
    } else {
        (state.uniform_candidate(rng).expect("nonempty"), trail)
    };

    let end = session.ledger();
    Ok(DetectionOutcome {
        estimate,
        candidate_trail: trail,
        ledger: QueryLedger {
            tests: end.tests - ledger_start.tests,
            household_queries: end.household_queries - ledger_start.household_queries,
            edges_revealed: end.edges_revealed - ledger_start.edges_revealed,
        },
        days: session.clock() - clock_start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidemic::EpidemicParams;
    use crate::network::{HouseholdNet, NetworkParams};
    use crate::rng::stream;
    use crate::session::{Session, SessionConfig};

    fn chain(len: usize) -> Vec<Vec<NodeId>> {
        (0..len)
            .map(|v| {
                let mut row = Vec::new();
                if v > 0 {
                    row.push(v - 1);
                }
                if v + 1 < len {
                    row.push(v + 1);
                }
                row
            })
            .collect()
    }

    fn on(node: NodeId, day: i64) -> SgObservation {
        SgObservation {
            node,
            kind: SgObsKind::Onset,
            day,
        }
    }

    fn neg(node: NodeId, day: i64) -> SgObservation {
        SgObservation {
            node,
            kind: SgObsKind::Negative,
            day,
        }
    }

    fn pos(node: NodeId, day: i64) -> SgObservation {
        SgObservation {
            node,
            kind: SgObsKind::NoOnset,
            day,
        }
    }

    #[test]
    fn infinite_sigma_removes_nobody() {
        let mut state = SgState::new(chain(5), 12.0, f64::INFINITY, 5, 2).unwrap();
        state.add_observation(on(0, 10)).unwrap();
        state.add_observation(on(4, 999)).unwrap();
        state.add_observation(neg(2, -50)).unwrap();
        state.add_observation(pos(3, 7)).unwrap();
        assert_eq!(state.candidates, (0..5).collect());
    }

    #[test]
    fn deterministic_chain_keeps_only_true_source() {
        // p_i = 1, T_E = 3: every hop takes exactly mu = 3 days, onsets lag
        // exposure by 5. Source 2 exposed on day 0.
        let mut state = SgState::new(chain(7), 3.0, 0.1, 5, 2).unwrap();
        state.add_observation(on(2, 5)).unwrap();
        state.add_observation(on(0, 11)).unwrap();
        state.add_observation(on(4, 11)).unwrap();
        state.add_observation(on(6, 17)).unwrap();
        assert_eq!(state.candidates, [2].into_iter().collect());
    }

    #[test]
    fn zero_sigma_still_accepts_exact_matches() {
        let mut state = SgState::new(chain(7), 3.0, 0.0, 5, 2).unwrap();
        state.add_observation(on(2, 5)).unwrap();
        state.add_observation(on(0, 11)).unwrap();
        state.add_observation(on(6, 17)).unwrap();
        assert!(state.candidates.contains(&2));
        assert!(!state.candidates.contains(&1));
    }

    #[test]
    fn negative_test_evicts_sources_implying_an_early_onset() {
        // Chain 0-1-2 plus isolated node 3 at default scales (mu = 12,
        // sigma ~ 9.49). An onset at 0 on day 10 with 2 still negative on
        // day 30 rules out 1 and 2; the positive onset rules out the
        // disconnected 3 outright.
        let adj = vec![vec![1], vec![0, 2], vec![1], vec![]];
        let sigma = (1.0f64 - 0.1).sqrt() / 0.1;
        let mut state = SgState::new(adj, 12.0, sigma, 5, 2).unwrap();
        state.add_observation(on(0, 10)).unwrap();
        state.add_observation(neg(2, 30)).unwrap();
        assert_eq!(state.candidates, [0].into_iter().collect());
    }

    #[test]
    fn unreachable_negative_constrains_nothing() {
        let adj = vec![vec![1], vec![0], vec![]];
        let mut state = SgState::new(adj, 12.0, 1.0, 5, 2).unwrap();
        state.add_observation(on(0, 10)).unwrap();
        state.add_observation(neg(2, -1000)).unwrap();
        // 2 drops only because it cannot reach the positive at 0.
        assert_eq!(state.candidates, [0, 1].into_iter().collect());
    }

    #[test]
    fn no_onset_upper_bounds_like_a_late_onset() {
        // x = positive-without-onset at day 10 (bounds onset by 12 with two
        // pre-symptomatic days), y = negative at day 50.
        let sigma = (1.0f64 - 0.1).sqrt() / 0.1;
        let mut state = SgState::new(chain(3), 12.0, sigma, 5, 2).unwrap();
        state.add_observation(pos(0, 10)).unwrap();
        state.add_observation(neg(2, 50)).unwrap();
        assert_eq!(state.candidates, [0].into_iter().collect());
    }

    #[test]
    fn two_no_onset_positives_never_eliminate() {
        let mut state = SgState::new(chain(3), 12.0, 0.0, 5, 2).unwrap();
        state.add_observation(pos(0, 10)).unwrap();
        state.add_observation(pos(2, 1000)).unwrap();
        assert_eq!(state.candidates, (0..3).collect());
    }

    #[test]
    fn filter_pair_previews_add_observation() {
        let sigma = (1.0f64 - 0.1).sqrt() / 0.1;
        let mut state = SgState::new(chain(3), 12.0, sigma, 5, 2).unwrap();
        state.add_observation(on(0, 10)).unwrap();
        let preview = state.filter_pair(&on(0, 10), &neg(2, 30));
        state.add_observation(neg(2, 30)).unwrap();
        assert_eq!(preview, state.candidates);
    }

    #[test]
    fn uniform_choice_is_unbiased_over_candidates() {
        let mut state = SgState::new(chain(14), 3.0, 1.0, 5, 2).unwrap();
        state.candidates = [3, 5, 8, 13].into_iter().collect();
        let mut counts = [0u32; 4];
        let members: Vec<NodeId> = state.candidates.iter().copied().collect();
        for seed in 0..4000 {
            let mut rng = stream(7, "sg-uniform", seed);
            let pick = state.uniform_candidate(&mut rng).unwrap();
            let idx = members.iter().position(|&m| m == pick).unwrap();
            counts[idx] += 1;
        }
        // Binomial(4000, 1/4): sd ~ 27, so 1000 +- 150 is a >5 sigma band.
        for &c in &counts {
            assert!((850..=1150).contains(&c), "skewed draw counts {counts:?}");
        }
    }

    #[test]
    fn sensor_ranking_is_symmetric_and_prefers_low_ids() {
        // Path 0-1-2-3-4 with the anchor in the middle: gains are mirror
        // symmetric, so the pick must be the lower id of its mirror pair.
        let state = SgState::new(chain(5), 3.0, 5.0, 5, 2).unwrap();
        let anchor = on(2, 5);
        let tested: BTreeSet<NodeId> = [2].into_iter().collect();
        let mut rng = stream(11, "sg-rank", 0);
        let pick = state.next_sensor(&tested, &anchor, 10, &mut rng).unwrap();
        assert!(pick <= 1, "mirror tie must break low, got {pick}");
        let ranked = state.rank_sensors(&tested, &anchor, 10, 4, &mut rng);
        assert_eq!(ranked.len(), 4);
        assert!(!ranked.contains(&2));
    }

    fn smoke_session(
        p_i: f64,
    ) -> (
        HouseholdNet,
        EpidemicParams,
        SessionConfig,
    ) {
        let net_params = NetworkParams {
            n: 36,
            d_c: 3,
            d_h: 2,
        };
        let mut graph_rng = stream(501, "sg-smoke-net", 0);
        let net = HouseholdNet::generate(net_params, &mut graph_rng).unwrap();
        let params = EpidemicParams {
            p_i,
            ..EpidemicParams::default()
        };
        let config = SessionConfig {
            freeze_epidemic: true,
            daily_cap: None,
        };
        (net, params, config)
    }

    fn open_outbreak<'g>(
        net: &'g HouseholdNet,
        params: EpidemicParams,
        config: SessionConfig,
        label: &str,
    ) -> Session<'g, HouseholdNet> {
        for seed in 0..50 {
            match Session::open(net, params, config, 0, stream(502, label, seed)) {
                Ok(s) => return s,
                Err(Error::NoOutbreak) => continue,
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
        panic!("no outbreak within 50 seeds");
    }

    #[test]
    fn deterministic_world_keeps_the_source_alive() {
        // At p_i = 1 every realized delay equals mu exactly, so the true
        // source can never be evicted and must sit in the final trail.
        let (net, params, config) = smoke_session(1.0);
        let mut session = open_outbreak(&net, params, config, "sg-smoke-world");
        let cfg = SgConfig::for_epidemic(params.p_i, 40).unwrap();
        assert_eq!(cfg.sigma, 0.0);
        let mut rng = stream(503, "sg-smoke-algo", 0);
        let out = run_sg(&mut session, &cfg, &mut rng).unwrap();
        assert!(out.estimate < 36);
        assert!(out.candidate_trail.contains(&0));
        assert!(out.days <= 40);
        assert_eq!(out.ledger.household_queries, 0);
        assert!(out.ledger.edges_revealed > 0);
        assert!(out.ledger.tests <= 40 * session.daily_cap() as u64);
    }

    #[test]
    fn zero_deadline_forces_a_uniform_pick_over_everyone() {
        let (net, params, config) = smoke_session(0.5);
        let mut session = open_outbreak(&net, params, config, "sg-deadline-world");
        let cfg = SgConfig {
            sigma: f64::INFINITY,
            deadline_day: 0,
        };
        let mut rng = stream(504, "sg-deadline-algo", 0);
        let out = run_sg(&mut session, &cfg, &mut rng).unwrap();
        assert_eq!(out.candidate_trail, (0..36).collect::<Vec<_>>());
        assert_eq!(out.ledger.tests, 0);
        assert_eq!(out.days, 0);
        assert!(out.estimate < 36);
    }

    #[test]
    fn rejects_bad_tuning() {
        assert!(SgConfig::for_epidemic(0.0, 5).is_err());
        assert!(SgConfig {
            sigma: -1.0,
            deadline_day: 5
        }
        .validate()
        .is_err());
        assert!(SgConfig {
            sigma: 1.0,
            deadline_day: -1
        }
        .validate()
        .is_err());
        assert!(SgState::new(chain(3), 0.0, 1.0, 5, 2).is_err());
        assert!(SgState::new(chain(3), 3.0, 1.0, 1, 2).is_err());
        assert!(SgState::new(vec![vec![9]], 3.0, 1.0, 5, 2).is_err());
    }
}
