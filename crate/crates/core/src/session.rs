//! Investigation sessions.
//!
//! A session wraps a running outbreak the moment its first hospitalized case
//! appears and exposes the only surface an investigation may use afterward:
//! household queries, contact queries, and a rate-limited test queue with a
//! one-day turnaround. Every probe is metered in a [`QueryLedger`].
//!
//! The day loop inside [`Session::advance_day`] is: dispatch up to `cap`
//! queued tests and read them against the current state, then (unless the
//! world is frozen) run one day of transmission, then advance the clock and
//! hand back this call's results. Seen from after the call, results always
//! belong to tests dispatched the previous day, and a freshly submitted test
//! is answerable after exactly one call.

use crate::epidemic::{self, EpidemicParams, EpidemicState, FirstHospitalization};
use crate::error::{Error, Result};
use crate::network::ContactNetwork;
use crate::NodeId;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::{BTreeSet, VecDeque};
use std::io::Write;

/// Outcome of one diagnostic test, read on its dispatch day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestResult {
    /// Never exposed, or still within the exposed (undetectable) window.
    Negative,
    /// Infection detectable but no symptom onset to report: asymptomatic
    /// course, or a symptomatic one tested before onset.
    PositiveNoOnset,
    /// Symptomatic past onset; carries the onset day.
    PositiveOnset(i64),
}

/// Running totals of everything an investigation has spent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryLedger {
    /// Tests dispatched (queue submissions are free until dispatch).
    pub tests: u64,
    /// Household queries made (each call counts).
    pub household_queries: u64,
    /// Distinct undirected edges exposed by contact queries.
    pub edges_revealed: u64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SessionConfig {
    /// Stop the disease at its state on the opening day; tests then read
    /// that snapshot forever.
    pub freeze_epidemic: bool,
    /// Tests dispatched per day. Defaults to ceil(n / 100) on finite
    /// networks and unlimited on infinite ones.
    pub daily_cap: Option<usize>,
}

fn default_cap(node_count: Option<usize>) -> usize {
    match node_count {
        Some(n) => n.div_ceil(100),
        None => usize::MAX,
    }
}

pub struct Session<'g, G: ContactNetwork> {
    g: &'g G,
    params: EpidemicParams,
    state: EpidemicState,
    epi_rng: ChaCha8Rng,
    freeze: bool,
    cap: usize,
    clock: i64,
    t_h: i64,
    patient_zero: NodeId,
    pending: VecDeque<NodeId>,
    ledger: QueryLedger,
    seen_edges: BTreeSet<(NodeId, NodeId)>,
    trace: Option<Box<dyn Write>>,
}

impl<'g, G: ContactNetwork> Session<'g, G> {
    /// Runs the outbreak from `source` until its first hospitalization and
    /// opens the investigation at that day. `epi_rng` drives the epidemic
    /// before and after opening, so a given seed fixes the whole world
    /// regardless of how the session is queried.
    pub fn open(
        g: &'g G,
        params: EpidemicParams,
        config: SessionConfig,
        source: NodeId,
        mut epi_rng: ChaCha8Rng,
    ) -> Result<Self> {
        let FirstHospitalization { state, t_h, patient } = epidemic::run_until_first_hospitalization(
            g,
            &params,
            source,
            &mut epi_rng,
            epidemic::DEFAULT_MAX_DAYS,
        )?;
        Ok(Self::assemble(g, params, config, state, t_h, patient, epi_rng))
    }

    /// Opens a session around a prepared state (hand-built worlds, replayed
    /// dumps). `state.day()` must already sit at the hospitalization day.
    pub fn from_state(
        g: &'g G,
        params: EpidemicParams,
        config: SessionConfig,
        state: EpidemicState,
        patient_zero: NodeId,
        epi_rng: ChaCha8Rng,
    ) -> Result<Self> {
        params.validate()?;
        let tl = state
            .timeline(patient_zero)
            .ok_or(Error::NotInfected(patient_zero))?;
        if tl.hospital_day(&params) != Some(state.day()) {
            return Err(Error::invalid(format!(
                "patient {patient_zero} is not hospitalized on day {}",
                state.day()
            )));
        }
        let t_h = state.day();
        Ok(Self::assemble(g, params, config, state, t_h, patient_zero, epi_rng))
    }

    fn assemble(
        g: &'g G,
        params: EpidemicParams,
        config: SessionConfig,
        state: EpidemicState,
        t_h: i64,
        patient_zero: NodeId,
        epi_rng: ChaCha8Rng,
    ) -> Self {
        let cap = config.daily_cap.unwrap_or_else(|| default_cap(g.node_count()));
        Session {
            g,
            params,
            state,
            epi_rng,
            freeze: config.freeze_epidemic,
            cap,
            clock: t_h,
            t_h,
            patient_zero,
            pending: VecDeque::new(),
            ledger: QueryLedger::default(),
            seen_edges: BTreeSet::new(),
            trace: None,
        }
    }

    /// Streams one JSON object per event to `w`.
    pub fn set_trace(&mut self, w: Box<dyn Write>) {
        self.trace = Some(w);
        self.emit(
            "open",
            Some(self.patient_zero),
            json!({ "t_h": self.t_h, "cap": capacity_json(self.cap) }),
        );
    }

    fn emit(&mut self, event: &str, node: Option<NodeId>, payload: serde_json::Value) {
        if let Some(w) = self.trace.as_mut() {
            let line = json!({
                "day": self.clock,
                "event": event,
                "node": node,
                "payload": payload,
            });
            // Trace output is best effort; a full disk should not kill a run.
            let _ = writeln!(w, "{line}");
        }
    }

    pub fn clock(&self) -> i64 {
        self.clock
    }

    /// Day the first hospitalization surfaced (the session opening day).
    pub fn t_h(&self) -> i64 {
        self.t_h
    }

    /// The hospitalized case that started the investigation.
    pub fn patient_zero(&self) -> NodeId {
        self.patient_zero
    }

    pub fn params(&self) -> &EpidemicParams {
        &self.params
    }

    pub fn daily_cap(&self) -> usize {
        self.cap
    }

    pub fn pending_tests(&self) -> usize {
        self.pending.len()
    }

    pub fn ledger(&self) -> QueryLedger {
        self.ledger
    }

    pub fn node_count(&self) -> Option<usize> {
        self.g.node_count()
    }

    /// Ground-truth state, for scoring an investigation after the fact.
    /// Algorithms under evaluation must not read this.
    pub fn world_state(&self) -> &EpidemicState {
        &self.state
    }

    /// The underlying network, same caveat as [`Session::world_state`].
    pub fn network(&self) -> &'g G {
        self.g
    }

    fn check_node(&self, v: NodeId) -> Result<()> {
        if self.g.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownNode(v))
        }
    }

    /// Everyone sharing `v`'s household, `v` included.
    pub fn query_household(&mut self, v: NodeId) -> Result<Vec<NodeId>> {
        self.check_node(v)?;
        let members = self.g.household(v);
        self.ledger.household_queries += 1;
        self.emit("household_query", Some(v), json!({ "members": members }));
        Ok(members)
    }

    /// All contacts of `v`. Each undirected edge is charged to the ledger
    /// the first time any query exposes it.
    pub fn query_contacts(&mut self, v: NodeId) -> Result<Vec<NodeId>> {
        self.check_node(v)?;
        let contacts = self.g.neighbors(v);
        for &u in &contacts {
            let key = (v.min(u), v.max(u));
            if self.seen_edges.insert(key) {
                self.ledger.edges_revealed += 1;
            }
        }
        self.emit("contact_query", Some(v), json!({ "contacts": contacts }));
        Ok(contacts)
    }

    /// Queues a test for `v`; it joins the FIFO dispatch queue and its
    /// result arrives from a later [`Session::advance_day`].
    pub fn submit_test(&mut self, v: NodeId) -> Result<()> {
        self.check_node(v)?;
        self.pending.push_back(v);
        self.emit("test_submitted", Some(v), json!({}));
        Ok(())
    }

    fn evaluate(&self, v: NodeId) -> TestResult {
        let day = self.state.day();
        match self.state.timeline(v) {
            None => TestResult::Negative,
            Some(tl) => {
                if day < tl.infectious_from(&self.params) {
                    TestResult::Negative
                } else {
                    match tl.onset_day(&self.params) {
                        Some(onset) if day >= onset => TestResult::PositiveOnset(onset),
                        _ => TestResult::PositiveNoOnset,
                    }
                }
            }
        }
    }

    /// Runs one day: dispatches up to the daily cap from the queue, reading
    /// each test against today's state, then advances the world (unless
    /// frozen) and the clock. Returns this day's dispatched results in
    /// dispatch order.
    pub fn advance_day(&mut self) -> Vec<(NodeId, TestResult)> {
        let k = self.cap.min(self.pending.len());
        let mut results = Vec::with_capacity(k);
        for _ in 0..k {
            let v = self.pending.pop_front().expect("len checked");
            let res = self.evaluate(v);
            self.ledger.tests += 1;
            self.emit(
                "test_dispatched",
                Some(v),
                json!({ "result": result_json(res) }),
            );
            results.push((v, res));
        }
        if !self.freeze {
            epidemic::step(&mut self.state, self.g, &self.params, &mut self.epi_rng);
        }
        self.clock += 1;
        self.emit("advance", None, json!({ "dispatched": results.len() }));
        results
    }
}

fn capacity_json(cap: usize) -> serde_json::Value {
    if cap == usize::MAX {
        json!("unlimited")
    } else {
        json!(cap)
    }
}

fn result_json(res: TestResult) -> serde_json::Value {
    match res {
        TestResult::Negative => json!("negative"),
        TestResult::PositiveNoOnset => json!("positive"),
        TestResult::PositiveOnset(day) => json!({ "positive_onset": day }),
    }
}
