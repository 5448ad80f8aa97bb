//! Source scoring by dynamic message passing.
//!
//! The machinery has three parts. `DmpGraph` holds a directed proxy graph
//! with per-edge transmission probabilities and per-node latency; household
//! cliques are replaced by stars around a virtual center node so the proxy
//! is locally tree-like (`household_proxy`). `dmp_source_marginals` runs
//! cavity recursions for the deterministic-timing disease and returns
//! per-node susceptibility curves; on trees with no removal inside the
//! horizon the curves are exact. `feasible_sources` walks backward from the
//! earliest symptom onsets to propose (source, exposure day) pairs, and
//! `score_pairs` ranks them by the product of observation likelihoods.
//!
//! Cavity state per directed edge `k -> i`: `theta` is the probability that
//! no infection signal has passed, `phi_a`/`phi_s` carry the asymptomatic
//! and symptomatic infectious mass that has not yet fired. A node exposed on
//! day `e` starts transmitting on day `e + T_E`, and a successful attempt
//! exposes the receiver that same day, so the theta update consumes the
//! current day's phi. Removal is handled by the multiplicative
//! `(1 - newly_removed)` factor on phi; with deterministic durations that
//! factor is approximate once cohorts overlap, but it is inert before the
//! first removal day and exact while at most one cohort is live.

use crate::detect::DetectionOutcome;
use crate::epidemic::{DiseaseVariant, EpidemicParams};
use crate::error::{Error, Result};
use crate::network::ContactNetwork;
use crate::session::{QueryLedger, Session, TestResult};
use crate::NodeId;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Edges whose sender-side infection mass stays at or below this are not
/// updated; their theta stays 1. Zero disables the cut-off entirely.
pub const DEFAULT_EPSILON: f64 = 0.01;
/// Earliest symptom onsets used to seed the backward search (k1).
pub const FEASIBLE_SEEDS: usize = 5;
/// Candidate (source, day) pairs kept for scoring (k2).
pub const FEASIBLE_PAIRS: usize = 5;

#[derive(Clone, Copy, Debug)]
struct DmpEdge {
    from: usize,
    to: usize,
    lambda: f64,
}

/// Directed proxy graph the cavity recursions run on.
pub struct DmpGraph {
    node_count: usize,
    t_e: Vec<i64>,
    edges: Vec<DmpEdge>,
    in_edges: Vec<Vec<usize>>,
    /// Per node: outgoing edge id plus the position of its reverse edge in
    /// the sender's in-edge list (excluded from the cavity product).
    out_edges: Vec<Vec<(usize, usize)>>,
}

fn undirected_pairs(adj: &[Vec<usize>]) -> Result<BTreeSet<(usize, usize)>> {
    let n = adj.len();
    let mut pairs = BTreeSet::new();
    for (u, row) in adj.iter().enumerate() {
        for &v in row {
            if v == u {
                return Err(Error::invalid(format!("self loop at node {u}")));
            }
            if v >= n {
                return Err(Error::invalid(format!("neighbor {v} out of range")));
            }
            pairs.insert((u.min(v), u.max(v)));
        }
    }
    Ok(pairs)
}

impl DmpGraph {
    fn from_directed(t_e: Vec<i64>, directed: Vec<(usize, usize, f64)>) -> Result<Self> {
        let node_count = t_e.len();
        for (u, v, lambda) in &directed {
            if *u >= node_count || *v >= node_count || u == v {
                return Err(Error::invalid("bad edge endpoints"));
            }
            if !(0.0..=1.0).contains(lambda) {
                return Err(Error::invalid("edge probability outside [0, 1]"));
            }
        }
        for t in &t_e {
            if *t < 1 {
                return Err(Error::invalid("per-node latency must be at least 1"));
            }
        }
        let mut edges = Vec::with_capacity(directed.len());
        let mut index = BTreeMap::new();
        for (u, v, lambda) in directed {
            if index.insert((u, v), edges.len()).is_some() {
                return Err(Error::invalid(format!("duplicate edge {u} -> {v}")));
            }
            edges.push(DmpEdge {
                from: u,
                to: v,
                lambda,
            });
        }
        let mut in_edges = vec![Vec::new(); node_count];
        let mut in_pos = BTreeMap::new();
        for (id, e) in edges.iter().enumerate() {
            in_pos.insert((e.from, e.to), in_edges[e.to].len());
            in_edges[e.to].push(id);
        }
        let mut out_edges = vec![Vec::new(); node_count];
        for (id, e) in edges.iter().enumerate() {
            let recip = *in_pos
                .get(&(e.to, e.from))
                .ok_or_else(|| Error::invalid(format!("edge {} -> {} has no reverse", e.from, e.to)))?;
            out_edges[e.from].push((id, recip));
        }
        Ok(DmpGraph {
            node_count,
            t_e,
            edges,
            in_edges,
            out_edges,
        })
    }

    /// Proxy equal to the graph itself: every listed contact becomes a
    /// two-way edge with probability `lambda`, every node latency `t_e`.
    pub fn from_adjacency(adj: &[Vec<usize>], lambda: f64, t_e: i64) -> Result<Self> {
        let pairs = undirected_pairs(adj)?;
        let mut directed = Vec::with_capacity(pairs.len() * 2);
        for (u, v) in pairs {
            directed.push((u, v, lambda));
            directed.push((v, u, lambda));
        }
        DmpGraph::from_directed(vec![t_e; adj.len()], directed)
    }

    /// Household-aware proxy: cross-household contacts keep probability
    /// `lambda`; each household of two or more members loses its internal
    /// edges and gains a virtual center (latency 1) that members infect
    /// with probability 1 and that infects members with probability
    /// `lambda`. Center ids start at `adj.len()`.
    pub fn household_proxy(
        adj: &[Vec<usize>],
        household_of: &[usize],
        lambda: f64,
        t_e: i64,
    ) -> Result<Self> {
        let n = adj.len();
        if household_of.len() != n {
            return Err(Error::invalid("household map length mismatch"));
        }
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &h) in household_of.iter().enumerate() {
            members.entry(h).or_default().push(v);
        }
        let mut directed = Vec::new();
        for (u, v) in undirected_pairs(adj)? {
            if household_of[u] != household_of[v] {
                directed.push((u, v, lambda));
                directed.push((v, u, lambda));
            }
        }
        let mut t_e_all = vec![t_e; n];
        let mut next_center = n;
        for group in members.values() {
            if group.len() < 2 {
                continue;
            }
            let center = next_center;
            next_center += 1;
            t_e_all.push(1);
            for &m in group {
                directed.push((m, center, 1.0));
                directed.push((center, m, lambda));
            }
        }
        DmpGraph::from_directed(t_e_all, directed)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }
}

/// Disease constants the recursions need beyond the per-edge probabilities.
#[derive(Clone, Copy, Debug)]
pub struct DmpParams {
    pub p_a: f64,
    /// Days a node stays infectious; `None` means it never recovers.
    pub infectious_days: Option<i64>,
    /// Sender-mass threshold below which an edge is left untouched.
    pub epsilon: f64,
}

impl DmpParams {
    pub fn for_epidemic(params: &EpidemicParams, epsilon: f64) -> Self {
        DmpParams {
            p_a: params.p_a,
            infectious_days: match params.variant {
                DiseaseVariant::Full => Some(params.t_i),
                DiseaseVariant::NoRecovery => None,
            },
            epsilon,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_a) {
            return Err(Error::invalid("p_a must lie in [0, 1]"));
        }
        if let Some(days) = self.infectious_days {
            if days < 1 {
                return Err(Error::invalid("infectious_days must be at least 1"));
            }
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::invalid("epsilon must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Susceptibility curves from one source hypothesis. `ps(v, t)` is the
/// probability that `v` is still unexposed after day `t`; days before the
/// source day return 1.
pub struct Marginals {
    t0: i64,
    p_s: Vec<Vec<f64>>,
}

impl Marginals {
    pub fn ps(&self, node: usize, t: i64) -> f64 {
        if t < self.t0 {
            return 1.0;
        }
        let idx = (t - self.t0) as usize;
        self.p_s[idx][node]
    }

    /// Probability that `node` was exposed exactly on `day`.
    pub fn exposed_exactly(&self, node: usize, day: i64) -> f64 {
        (self.ps(node, day - 1) - self.ps(node, day)).max(0.0)
    }
}

/// Runs the cavity recursions for a single (source, day) hypothesis and
/// returns marginals for days `t0 ..= t_max`.
pub fn dmp_source_marginals(
    g: &DmpGraph,
    params: &DmpParams,
    source: usize,
    t0: i64,
    t_max: i64,
) -> Result<Marginals> {
    params.validate()?;
    if source >= g.node_count {
        return Err(Error::UnknownNode(source));
    }
    if t_max < t0 {
        return Err(Error::invalid("t_max must not precede t0"));
    }
    let steps = (t_max - t0) as usize;
    let m = g.edges.len();

    // ehist[e][t - t0] = cavity susceptibility of the sender of e.
    let mut ehist: Vec<Vec<f64>> = (0..m)
        .map(|e| vec![if g.edges[e].from == source { 0.0 } else { 1.0 }])
        .collect();
    let hist = |ehist: &Vec<Vec<f64>>, e: usize, t: i64| -> f64 {
        if t < t0 {
            1.0
        } else {
            ehist[e][(t - t0) as usize]
        }
    };

    let mut theta = vec![1.0f64; m];
    let mut phi_a = vec![0.0f64; m];
    let mut phi_s = vec![0.0f64; m];
    let mut active = vec![false; m];

    let mut p_s = Vec::with_capacity(steps + 1);
    let mut first_row = vec![1.0; g.node_count];
    first_row[source] = 0.0;
    p_s.push(first_row);

    let mut prefix: Vec<f64> = Vec::new();
    let mut suffix: Vec<f64> = Vec::new();

    for t in t0 + 1..=t_max {
        for e in 0..m {
            if !active[e] && 1.0 - hist(&ehist, e, t - 1) > params.epsilon {
                active[e] = true;
            }
            if !active[e] {
                continue;
            }
            let te = g.t_e[g.edges[e].from];
            let lambda = g.edges[e].lambda;
            let newly = (hist(&ehist, e, t - te - 1) - hist(&ehist, e, t - te)).max(0.0);
            let removed = match params.infectious_days {
                Some(days) => {
                    let lag = te + days;
                    (hist(&ehist, e, t - lag - 1) - hist(&ehist, e, t - lag)).clamp(0.0, 1.0)
                }
                None => 0.0,
            };
            phi_a[e] = (1.0 - lambda) * (1.0 - removed) * phi_a[e] + params.p_a * newly;
            phi_s[e] = (1.0 - lambda) * (1.0 - removed) * phi_s[e] + (1.0 - params.p_a) * newly;
            theta[e] = (theta[e] - lambda * (phi_a[e] + phi_s[e])).clamp(0.0, 1.0);
        }

        let mut row = vec![1.0; g.node_count];
        for (i, row_i) in row.iter_mut().enumerate() {
            let ins = &g.in_edges[i];
            prefix.clear();
            prefix.push(1.0);
            for &e in ins {
                prefix.push(prefix.last().unwrap() * theta[e]);
            }
            suffix.clear();
            suffix.resize(ins.len() + 1, 1.0);
            for p in (0..ins.len()).rev() {
                suffix[p] = suffix[p + 1] * theta[ins[p]];
            }
            let init = if i == source { 0.0 } else { 1.0 };
            *row_i = init * prefix[ins.len()];
            for &(out_id, recip_pos) in &g.out_edges[i] {
                let cavity = init * prefix[recip_pos] * suffix[recip_pos + 1];
                ehist[out_id].push(cavity);
            }
        }
        p_s.push(row);
    }

    Ok(Marginals { t0, p_s })
}

/// One piece of evidence about a node, tied to the day it refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DmpObservation {
    /// Symptom onset seen on exactly this day.
    Onset { node: usize, day: i64 },
    /// Tested positive on `day` without onset information.
    PositiveNoOnset { node: usize, day: i64 },
    /// Tested negative on `day`.
    Negative { node: usize, day: i64 },
}

/// Exposure-day interval for each observed node; unobserved nodes default
/// to `[t_min, horizon]`.
fn exposure_bounds(
    obs: &[DmpObservation],
    params: &EpidemicParams,
    t_min: i64,
    horizon: i64,
) -> BTreeMap<usize, (i64, i64)> {
    let mut bounds: BTreeMap<usize, (i64, i64)> = BTreeMap::new();
    let mut tighten = |node: usize, lo: i64, hi: i64| {
        let entry = bounds.entry(node).or_insert((t_min, horizon));
        entry.0 = entry.0.max(lo);
        entry.1 = entry.1.min(hi);
    };
    for o in obs {
        match *o {
            DmpObservation::Onset { node, day } => {
                let e = day - params.onset_offset();
                tighten(node, e, e);
            }
            DmpObservation::PositiveNoOnset { node, day } => {
                tighten(node, t_min, day - params.t_e);
            }
            DmpObservation::Negative { node, day } => {
                tighten(node, day - params.t_e + 1, horizon);
            }
        }
    }
    bounds
}

/// Backward search for (source, exposure day) pairs that can explain the
/// earliest symptom onsets. Seeds one walk per onset among the `k1`
/// earliest; a pair qualifies once it explains all of them. Returns at most
/// `k2` pairs, preferring the latest exposure days.
pub fn feasible_sources(
    adj: &[Vec<usize>],
    obs: &[DmpObservation],
    params: &EpidemicParams,
    k1: usize,
    k2: usize,
    t_min: i64,
) -> Vec<(usize, i64)> {
    let mut onsets: Vec<(i64, usize)> = obs
        .iter()
        .filter_map(|o| match *o {
            DmpObservation::Onset { node, day } => Some((day, node)),
            _ => None,
        })
        .collect();
    onsets.sort_unstable();
    onsets.dedup();
    onsets.truncate(k1);
    let seeds = onsets;
    let need = seeds.len();
    if need == 0 || k2 == 0 {
        return Vec::new();
    }
    let horizon = obs
        .iter()
        .map(|o| match *o {
            DmpObservation::Onset { day, .. }
            | DmpObservation::PositiveNoOnset { day, .. }
            | DmpObservation::Negative { day, .. } => day,
        })
        .max()
        .unwrap_or(t_min);
    let bounds = exposure_bounds(obs, params, t_min, horizon);
    let bound_of = |node: usize| *bounds.get(&node).unwrap_or(&(t_min, horizon));

    // frontier[t] holds (seed index, node) pairs meaning "this node exposed
    // at t can explain that seed's onset".
    let mut frontier: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
    let mut seen: BTreeSet<(usize, usize, i64)> = BTreeSet::new();
    let mut explained: BTreeMap<(usize, i64), BTreeSet<usize>> = BTreeMap::new();
    let mut done: Vec<(usize, i64)> = Vec::new();

    let record = |seed: usize,
                      node: usize,
                      t: i64,
                      frontier: &mut BTreeMap<i64, Vec<(usize, usize)>>,
                      seen: &mut BTreeSet<(usize, usize, i64)>,
                      explained: &mut BTreeMap<(usize, i64), BTreeSet<usize>>,
                      done: &mut Vec<(usize, i64)>| {
        if t < t_min || !seen.insert((seed, node, t)) {
            return;
        }
        frontier.entry(t).or_default().push((seed, node));
        let set = explained.entry((node, t)).or_default();
        if set.insert(seed) && set.len() == need {
            done.push((node, t));
        }
    };

    for (idx, &(day, node)) in seeds.iter().enumerate() {
        let e = day - params.onset_offset();
        record(
            idx, node, e, &mut frontier, &mut seen, &mut explained, &mut done,
        );
    }

    let mut t = match frontier.keys().next_back() {
        Some(&t) => t,
        None => return Vec::new(),
    };
    while t > t_min {
        if let Some(entries) = frontier.remove(&t) {
            for (seed, w) in entries {
                for &u in &adj[w] {
                    let (f_min, f_max) = bound_of(u);
                    let hi = f_max.min(t - params.t_e);
                    let lo = f_min.max(t_min).max(match params.variant {
                        DiseaseVariant::Full => t - params.t_e - params.t_i + 1,
                        DiseaseVariant::NoRecovery => t_min,
                    });
                    let mut tp = hi;
                    while tp >= lo {
                        record(
                            seed,
                            u,
                            tp,
                            &mut frontier,
                            &mut seen,
                            &mut explained,
                            &mut done,
                        );
                        tp -= 1;
                    }
                }
            }
            done.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            if done.len() >= k2 && done[k2 - 1].1 >= t - params.t_e {
                break;
            }
        }
        t -= 1;
    }
    done.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    done.truncate(k2);
    done
}

/// A ranked source hypothesis; the score is a log-likelihood up to a
/// constant shared by all pairs.
#[derive(Clone, Copy, Debug)]
pub struct ScoredPair {
    pub node: usize,
    pub t0: i64,
    pub log_score: f64,
}

/// Scores each (source, day) pair by the log product of its observation
/// marginals under the cavity recursion run on `g`. Sorted best first; ties
/// prefer later start days, then lower node ids.
pub fn score_pairs(
    g: &DmpGraph,
    dparams: &DmpParams,
    eparams: &EpidemicParams,
    obs: &[DmpObservation],
    pairs: &[(usize, i64)],
) -> Result<Vec<ScoredPair>> {
    let mut needed = i64::MIN;
    for o in obs {
        let upto = match *o {
            DmpObservation::Onset { day, .. } => day - eparams.onset_offset(),
            DmpObservation::PositiveNoOnset { day, .. } | DmpObservation::Negative { day, .. } => {
                day - eparams.t_e
            }
        };
        needed = needed.max(upto);
    }
    let mut scored = Vec::with_capacity(pairs.len());
    for &(node, t0) in pairs {
        let marg = dmp_source_marginals(g, dparams, node, t0, needed.max(t0))?;
        let mut log_score = 0.0f64;
        for o in obs {
            let factor = match *o {
                DmpObservation::Onset { node: v, day } => {
                    marg.exposed_exactly(v, day - eparams.onset_offset())
                }
                DmpObservation::PositiveNoOnset { node: v, day } => {
                    (1.0 - marg.ps(v, day - eparams.t_e)).max(0.0)
                }
                DmpObservation::Negative { node: v, day } => marg.ps(v, day - eparams.t_e),
            };
            log_score += factor.ln();
        }
        scored.push(ScoredPair {
            node,
            t0,
            log_score,
        });
    }
    scored.sort_by(|a, b| {
        b.log_score
            .partial_cmp(&a.log_score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.t0.cmp(&a.t0))
            .then(a.node.cmp(&b.node))
    });
    Ok(scored)
}

/// Full pipeline: test `sensor_count` random nodes, reveal the whole
/// network, propose feasible pairs from the onsets, and return the
/// best-scoring source. Falls back to the first hospitalized patient when
/// no pair explains the observations.
pub fn run_random_dmp<G: ContactNetwork, R: Rng>(
    session: &mut Session<'_, G>,
    sensor_count: usize,
    rng: &mut R,
) -> Result<DetectionOutcome> {
    let n = session
        .node_count()
        .ok_or(Error::InfiniteNetwork)?;
    let h0 = session.patient_zero();
    let params = *session.params();
    let ledger_start = session.ledger();
    let clock_start = session.clock();

    let mut others: Vec<NodeId> = (0..n).filter(|&v| v != h0).collect();
    let want = sensor_count.min(others.len());
    // Partial Fisher-Yates keeps the draw order deterministic in rng.
    for i in 0..want {
        let j = rng.gen_range(i..others.len());
        others.swap(i, j);
    }
    let mut sensors: Vec<NodeId> = others[..want].to_vec();
    sensors.sort_unstable();

    for &v in &sensors {
        session.submit_test(v)?;
    }
    let mut results: Vec<(NodeId, TestResult, i64)> = Vec::new();
    while results.len() < sensors.len() {
        let eval_day = session.world_state().day();
        let batch = session.advance_day();
        if batch.is_empty() && session.pending_tests() == 0 {
            break;
        }
        results.extend(batch.into_iter().map(|(v, r)| (v, r, eval_day)));
    }

    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut rep_of: Vec<usize> = Vec::with_capacity(n);
    for v in 0..n {
        let members = session.query_household(v)?;
        rep_of.push(members.iter().copied().min().unwrap_or(v));
        adj.push(session.query_contacts(v)?);
    }
    let mut dense: BTreeMap<usize, usize> = BTreeMap::new();
    let household_of: Vec<usize> = rep_of
        .iter()
        .map(|&r| {
            let next = dense.len();
            *dense.entry(r).or_insert(next)
        })
        .collect();

    let e0 = session.t_h() - params.t_e - params.t_h;
    let mut obs = vec![DmpObservation::Onset {
        node: h0,
        day: e0 + params.onset_offset(),
    }];
    for (v, r, day) in results {
        obs.push(match r {
            TestResult::Negative => DmpObservation::Negative { node: v, day },
            TestResult::PositiveNoOnset => DmpObservation::PositiveNoOnset { node: v, day },
            TestResult::PositiveOnset(onset) => DmpObservation::Onset {
                node: v,
                day: onset,
            },
        });
    }

    let pairs = feasible_sources(&adj, &obs, &params, FEASIBLE_SEEDS, FEASIBLE_PAIRS, 0);
    let (estimate, trail) = if pairs.is_empty() {
        (h0, vec![h0])
    } else {
        let proxy = DmpGraph::household_proxy(&adj, &household_of, params.p_i, params.t_e)?;
        let dparams = DmpParams::for_epidemic(&params, DEFAULT_EPSILON);
        let scored = score_pairs(&proxy, &dparams, &params, &obs, &pairs)?;
        let mut trail: Vec<NodeId> = Vec::new();
        for s in &scored {
            if !trail.contains(&s.node) {
                trail.push(s.node);
            }
        }
        (scored[0].node, trail)
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
    use approx::assert_abs_diff_eq;

    fn exact_params(epsilon: f64, t_i: Option<i64>) -> DmpParams {
        DmpParams {
            p_a: 0.5,
            infectious_days: t_i,
            epsilon,
        }
    }

    #[test]
    fn two_nodes_exact_including_removal() {
        // Single sender cohort: source infectious on days 1 and 2 only
        // (t_e = 1, t_i = 2), so the neighbor's susceptibility is
        // 1, 0.6, 0.36 and then flat.
        let g = DmpGraph::from_adjacency(&[vec![1], vec![0]], 0.4, 1).unwrap();
        let m = dmp_source_marginals(&g, &exact_params(0.0, Some(2)), 0, 0, 6).unwrap();
        let want = [1.0, 0.6, 0.36, 0.36, 0.36, 0.36, 0.36];
        for (t, w) in want.iter().enumerate() {
            assert_abs_diff_eq!(m.ps(1, t as i64), *w, epsilon = 1e-12);
            assert_abs_diff_eq!(m.ps(0, t as i64), 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(m.ps(1, -3), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn three_node_path_matches_direct_sum() {
        // 0 - 1 - 2 with t_e = 2, no removal. Node 1's exposure day is
        // 2 + j with probability 0.7^j 0.3; node 2 then dodges attempts on
        // days 4 + j ..= t.
        let lambda: f64 = 0.3;
        let g = DmpGraph::from_adjacency(&[vec![1], vec![0, 2], vec![1]], lambda, 2).unwrap();
        let m = dmp_source_marginals(&g, &exact_params(0.0, None), 0, 0, 12).unwrap();
        for t in 0..=12i64 {
            let mut want = if t < 2 {
                1.0
            } else {
                // Tail: node 1 not yet exposed by day t.
                (1.0 - lambda).powi((t - 1) as i32)
            };
            for j in 0..=t - 2 {
                let p_e1 = (1.0 - lambda).powi(j as i32) * lambda;
                let attempts = (t - (4 + j) + 1).max(0);
                want += p_e1 * (1.0 - lambda).powi(attempts as i32);
            }
            assert_abs_diff_eq!(m.ps(2, t), want, epsilon = 1e-12);
            assert_abs_diff_eq!(
                m.ps(1, t),
                (1.0 - lambda).powi((t - 1).max(0) as i32),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn household_proxy_shape() {
        // Household {0, 1, 2} plus singleton {3}; one cross edge 0 - 3.
        let adj = vec![vec![1, 2, 3], vec![0, 2], vec![0, 1], vec![0]];
        let household_of = vec![0, 0, 0, 1];
        let g = DmpGraph::household_proxy(&adj, &household_of, 0.25, 3).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.t_e, vec![3, 3, 3, 3, 1]);
        assert_eq!(g.edges.len(), 8);
        let mut to_center = 0;
        let mut from_center = 0;
        for e in &g.edges {
            if e.to == 4 {
                assert_abs_diff_eq!(e.lambda, 1.0);
                to_center += 1;
            } else if e.from == 4 {
                assert_abs_diff_eq!(e.lambda, 0.25);
                from_center += 1;
            } else {
                assert!((e.from, e.to) == (0, 3) || (e.from, e.to) == (3, 0));
                assert_abs_diff_eq!(e.lambda, 0.25);
            }
        }
        assert_eq!((to_center, from_center), (3, 3));
    }

    #[test]
    fn star_relay_delays_household_infection_by_one_day() {
        // Direct edge: mate exposable from day t_e. Through the star the
        // first possible exposure is one day later.
        let adj = vec![vec![1], vec![0]];
        let g = DmpGraph::household_proxy(&adj, &[0, 0], 0.5, 2).unwrap();
        let m = dmp_source_marginals(&g, &exact_params(0.0, None), 0, 0, 6).unwrap();
        assert_abs_diff_eq!(m.ps(1, 2), 1.0, epsilon = 1e-12);
        assert!(m.ps(1, 3) < 1.0);
    }

    #[test]
    fn epsilon_cutoff_freezes_far_edges() {
        let adj = vec![vec![1], vec![0, 2], vec![1, 3], vec![2]];
        let g = DmpGraph::from_adjacency(&adj, 0.3, 1).unwrap();
        let sharp = dmp_source_marginals(&g, &exact_params(0.0, None), 0, 0, 6).unwrap();
        let lazy = dmp_source_marginals(&g, &exact_params(0.9, None), 0, 0, 6).unwrap();
        assert!(sharp.ps(3, 6) < 1.0);
        // Sender mass along the chain never exceeds 0.9, so nothing fires.
        assert_abs_diff_eq!(lazy.ps(3, 6), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn feasible_pairs_on_a_path() {
        let adj: Vec<Vec<usize>> = vec![vec![1], vec![0, 2], vec![1, 3], vec![2, 4], vec![3]];
        let params = EpidemicParams::default();
        let obs = vec![DmpObservation::Onset { node: 4, day: 11 }];
        let pairs = feasible_sources(&adj, &obs, &params, 5, 5, 0);
        // Ties at a given exposure day resolve toward lower node ids.
        assert_eq!(pairs, vec![(4, 6), (3, 3), (3, 2), (3, 1), (2, 0)]);
    }

    #[test]
    fn feasible_pairs_respect_negative_evidence() {
        let adj: Vec<Vec<usize>> = vec![vec![1], vec![0, 2], vec![1, 3], vec![2, 4], vec![3]];
        let params = EpidemicParams::default();
        // A negative test on node 3 at day 11 forces its exposure past day
        // 8, killing every (3, t <= 8) pair.
        let obs = vec![
            DmpObservation::Onset { node: 4, day: 11 },
            DmpObservation::Negative { node: 3, day: 11 },
        ];
        let pairs = feasible_sources(&adj, &obs, &params, 5, 5, 0);
        assert!(pairs.iter().all(|&(v, _)| v != 3), "{pairs:?}");
        assert!(pairs.contains(&(4, 6)));
    }

    #[test]
    fn scoring_recovers_a_near_deterministic_source() {
        // High infection rate, single-day latency, onsets at exposure + 1.
        let adj: Vec<Vec<usize>> = vec![vec![1], vec![0, 2], vec![1]];
        let params = EpidemicParams {
            t_e: 1,
            t_p: 0,
            p_i: 0.9,
            ..EpidemicParams::default()
        };
        let obs = vec![
            DmpObservation::Onset { node: 0, day: 1 },
            DmpObservation::Onset { node: 1, day: 2 },
            DmpObservation::Onset { node: 2, day: 3 },
        ];
        let pairs = feasible_sources(&adj, &obs, &params, 5, 5, 0);
        assert!(pairs.contains(&(0, 0)), "{pairs:?}");
        let g = DmpGraph::from_adjacency(&adj, params.p_i, params.t_e).unwrap();
        let scored = score_pairs(
            &g,
            &DmpParams::for_epidemic(&params, 0.0),
            &params,
            &obs,
            &pairs,
        )
        .unwrap();
        assert_eq!(scored[0].node, 0);
        assert_eq!(scored[0].t0, 0);
        assert!(scored[0].log_score > f64::NEG_INFINITY);
    }

    #[test]
    fn random_dmp_runs_end_to_end() {
        let net_params = NetworkParams {
            n: 36,
            d_c: 3,
            d_h: 2,
        };
        let mut graph_rng = stream(401, "dmp-smoke-net", 0);
        let net = HouseholdNet::generate(net_params, &mut graph_rng).unwrap();
        let params = EpidemicParams {
            p_i: 0.5,
            ..EpidemicParams::default()
        };
        let config = SessionConfig {
            freeze_epidemic: true,
            daily_cap: None,
        };
        let mut session = None;
        for seed in 0..50 {
            let rng = stream(402, "dmp-smoke-world", seed);
            match Session::open(&net, params, config, 0, rng) {
                Ok(s) => {
                    session = Some(s);
                    break;
                }
                Err(Error::NoOutbreak) => continue,
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
        let mut session = session.expect("an outbreak within 50 seeds");
        let mut rng = stream(403, "dmp-smoke-algo", 0);
        let out = run_random_dmp(&mut session, 6, &mut rng).unwrap();
        assert!(out.estimate < 36);
        assert_eq!(out.ledger.tests, 6);
        assert_eq!(out.ledger.household_queries, 36);
        assert!(out.ledger.edges_revealed > 0);
        assert!(out.days >= 1);
        assert!(!out.candidate_trail.is_empty());
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(DmpGraph::from_adjacency(&[vec![0]], 0.3, 1).is_err());
        assert!(DmpGraph::from_adjacency(&[vec![1], vec![0]], 1.5, 1).is_err());
        assert!(DmpGraph::from_adjacency(&[vec![1], vec![0]], 0.3, 0).is_err());
        assert!(DmpGraph::household_proxy(&[vec![1], vec![0]], &[0], 0.3, 1).is_err());
    }
}
