//! Discrete-time epidemic with asymptomatic courses and hospitalization.
//!
//! Time advances in whole days. A node exposed on day `e` becomes infectious
//! on `e + T_E`. Its course, drawn at exposure, decides everything after
//! that: asymptomatic nodes never show symptoms; symptomatic nodes show
//! onset at `e + T_E + T_P`; hospitalized nodes are symptomatic nodes that
//! additionally enter hospital on `e + T_E + T_H`, which removes them from
//! circulation. Everyone else recovers at `e + T_E + T_I`. The no-recovery
//! variant drops the pre-symptomatic window (onset at `e + T_E`) and lets
//! infectious windows run forever.
//!
//! While infectious on day `t`, a node attempts to infect each susceptible
//! neighbor independently with probability `p_i`; a successful attempt
//! records exposure day `t`. When several attackers succeed on the same day
//! the lowest-id one is recorded as the infector.

use crate::error::{Error, Result};
use crate::network::ContactNetwork;
use crate::NodeId;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiseaseVariant {
    /// Pre-symptomatic window of `T_P` days, recovery after `T_I` infectious days.
    Full,
    /// Onset immediately at the end of exposure, no recovery.
    NoRecovery,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpidemicParams {
    pub t_e: i64,
    pub t_p: i64,
    pub t_i: i64,
    pub t_h: i64,
    pub p_a: f64,
    pub p_h: f64,
    pub p_i: f64,
    pub variant: DiseaseVariant,
}

impl Default for EpidemicParams {
    fn default() -> Self {
        EpidemicParams {
            t_e: 3,
            t_p: 2,
            t_i: 14,
            t_h: 5,
            p_a: 0.5,
            p_h: 0.2,
            p_i: 0.1,
            variant: DiseaseVariant::Full,
        }
    }
}

impl EpidemicParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("T_E", self.t_e), ("T_I", self.t_i), ("T_H", self.t_h)] {
            if v < 1 {
                return Err(Error::invalid(format!("{name} must be at least 1 day")));
            }
        }
        if self.t_p < 0 {
            return Err(Error::invalid("T_P must be nonnegative"));
        }
        if self.t_p > self.t_i {
            return Err(Error::invalid("T_P must not exceed T_I"));
        }
        if self.t_p >= self.t_e + self.t_h {
            return Err(Error::invalid("T_P must come before T_E + T_H"));
        }
        for (name, p) in [("p_a", self.p_a), ("p_h", self.p_h), ("p_i", self.p_i)] {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::invalid(format!("{name} must lie in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Days from exposure to symptom onset for symptomatic courses.
    pub fn onset_offset(&self) -> i64 {
        match self.variant {
            DiseaseVariant::Full => self.t_e + self.t_p,
            DiseaseVariant::NoRecovery => self.t_e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Course {
    Asymptomatic,
    Symptomatic,
    /// Symptomatic and hospitalized `T_H` days after infectiousness starts.
    Hospitalized,
}

impl Course {
    pub fn is_symptomatic(self) -> bool {
        !matches!(self, Course::Asymptomatic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeTimeline {
    pub exposure_day: i64,
    pub course: Course,
    pub infector: Option<NodeId>,
}

impl NodeTimeline {
    pub fn infectious_from(&self, params: &EpidemicParams) -> i64 {
        self.exposure_day + params.t_e
    }

    /// First day the node no longer transmits (hospital entry or recovery).
    /// `i64::MAX` stands in for never.
    pub fn removal_day(&self, params: &EpidemicParams) -> i64 {
        let hosp = self.hospital_day(params).unwrap_or(i64::MAX);
        let recovery = match params.variant {
            DiseaseVariant::Full => self.exposure_day + params.t_e + params.t_i,
            DiseaseVariant::NoRecovery => i64::MAX,
        };
        hosp.min(recovery)
    }

    pub fn infectious_on(&self, day: i64, params: &EpidemicParams) -> bool {
        self.infectious_from(params) <= day && day < self.removal_day(params)
    }

    pub fn onset_day(&self, params: &EpidemicParams) -> Option<i64> {
        self.course
            .is_symptomatic()
            .then(|| self.exposure_day + params.onset_offset())
    }

    pub fn hospital_day(&self, params: &EpidemicParams) -> Option<i64> {
        matches!(self.course, Course::Hospitalized)
            .then(|| self.exposure_day + params.t_e + params.t_h)
    }
}

/// Epidemic snapshot: day counter plus one timeline per ever-exposed node.
#[derive(Debug, Clone, PartialEq)]
pub struct EpidemicState {
    day: i64,
    timelines: BTreeMap<NodeId, NodeTimeline>,
}

fn draw_course(params: &EpidemicParams, rng: &mut impl Rng) -> Course {
    if rng.gen_bool(params.p_a) {
        Course::Asymptomatic
    } else if rng.gen_bool(params.p_h) {
        Course::Hospitalized
    } else {
        Course::Symptomatic
    }
}

impl EpidemicState {
    /// Fresh outbreak: `source` exposed on day 0.
    pub fn new(source: NodeId, params: &EpidemicParams, rng: &mut impl Rng) -> Self {
        let mut timelines = BTreeMap::new();
        timelines.insert(
            source,
            NodeTimeline {
                exposure_day: 0,
                course: draw_course(params, rng),
                infector: None,
            },
        );
        EpidemicState { day: 0, timelines }
    }

    /// Rebuilds a state from explicit timelines; the entry point for replayed
    /// dumps and hand-built test worlds.
    pub fn from_timelines(
        day: i64,
        timelines: impl IntoIterator<Item = (NodeId, NodeTimeline)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (v, tl) in timelines {
            if map.insert(v, tl).is_some() {
                return Err(Error::invalid(format!("node {v} has two timelines")));
            }
        }
        let sources = map.values().filter(|tl| tl.infector.is_none()).count();
        if sources != 1 {
            return Err(Error::invalid(format!(
                "expected exactly one source, found {sources}"
            )));
        }
        Ok(EpidemicState { day, timelines: map })
    }

    pub fn day(&self) -> i64 {
        self.day
    }

    pub fn timeline(&self, v: NodeId) -> Option<&NodeTimeline> {
        self.timelines.get(&v)
    }

    pub fn timelines(&self) -> impl Iterator<Item = (NodeId, &NodeTimeline)> {
        self.timelines.iter().map(|(&v, tl)| (v, tl))
    }

    pub fn infected_count(&self) -> usize {
        self.timelines.len()
    }

    pub fn source(&self) -> NodeId {
        *self
            .timelines
            .iter()
            .find(|(_, tl)| tl.infector.is_none())
            .expect("state always holds the source")
            .0
    }

    /// Earliest-onset symptomatic node, ties to the lowest id.
    pub fn first_symptomatic(&self, params: &EpidemicParams) -> Option<NodeId> {
        self.timelines
            .iter()
            .filter_map(|(&v, tl)| tl.onset_day(params).map(|d| (d, v)))
            .min()
            .map(|(_, v)| v)
    }

    /// Transmission chain from the source to `v`, inclusive.
    pub fn transmission_path(&self, v: NodeId) -> Result<Vec<NodeId>> {
        let mut path = vec![v];
        let mut cur = v;
        loop {
            let tl = self.timelines.get(&cur).ok_or(Error::NotInfected(cur))?;
            match tl.infector {
                Some(parent) => {
                    path.push(parent);
                    cur = parent;
                }
                None => break,
            }
        }
        path.reverse();
        Ok(path)
    }

    fn expose(&mut self, v: NodeId, day: i64, infector: NodeId, params: &EpidemicParams, rng: &mut impl Rng) {
        let prev = self.timelines.insert(
            v,
            NodeTimeline {
                exposure_day: day,
                course: draw_course(params, rng),
                infector: Some(infector),
            },
        );
        debug_assert!(prev.is_none(), "exposed node {v} twice");
    }
}

/// Runs one day of transmission from the state's current day, then advances
/// the day counter. Attempts are independent Bernoulli draws per
/// (infectious node, susceptible neighbor) pair, scanned in ascending id
/// order so the draw sequence is reproducible.
pub fn step(
    state: &mut EpidemicState,
    g: &impl ContactNetwork,
    params: &EpidemicParams,
    rng: &mut impl Rng,
) {
    let day = state.day;
    let mut new_exposures: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    if params.p_i > 0.0 {
        let infectious: Vec<NodeId> = state
            .timelines
            .iter()
            .filter(|(_, tl)| tl.infectious_on(day, params))
            .map(|(&v, _)| v)
            .collect();
        for v in infectious {
            for u in g.neighbors(v) {
                if !state.timelines.contains_key(&u) && rng.gen_bool(params.p_i) {
                    new_exposures.entry(u).or_insert(v);
                }
            }
        }
    }
    for (u, v) in new_exposures {
        state.expose(u, day, v, params, rng);
    }
    state.day += 1;
}

/// Outcome of running an outbreak until its first hospitalized case.
#[derive(Debug, Clone)]
pub struct FirstHospitalization {
    pub state: EpidemicState,
    /// Day the first hospitalization happened; equals `state.day()`.
    pub t_h: i64,
    pub patient: NodeId,
}

/// Upper bound on simulated days before giving up on ever seeing a
/// hospitalization. Generous: outbreaks that can still hospitalize do so
/// within tens of days at any parameters that pass validation.
pub const DEFAULT_MAX_DAYS: i64 = 100_000;

/// Seeds an outbreak at `source` and advances day by day until some node's
/// scheduled hospitalization day arrives. Several candidates on the same day
/// are broken uniformly at random. Errors with [`Error::NoOutbreak`] when the
/// epidemic can no longer produce a hospitalization.
pub fn run_until_first_hospitalization(
    g: &impl ContactNetwork,
    params: &EpidemicParams,
    source: NodeId,
    rng: &mut impl Rng,
    max_days: i64,
) -> Result<FirstHospitalization> {
    params.validate()?;
    if (1.0 - params.p_a) * params.p_h <= 0.0 {
        return Err(Error::NoOutbreak);
    }
    let mut state = EpidemicState::new(source, params, rng);
    loop {
        let day = state.day;
        let todays: Vec<NodeId> = state
            .timelines
            .iter()
            .filter(|(_, tl)| tl.hospital_day(params) == Some(day))
            .map(|(&v, _)| v)
            .collect();
        if !todays.is_empty() {
            let patient = todays[rng.gen_range(0..todays.len())];
            return Ok(FirstHospitalization {
                state,
                t_h: day,
                patient,
            });
        }
        let hosp_scheduled = state
            .timelines
            .values()
            .any(|tl| matches!(tl.course, Course::Hospitalized));
        if !hosp_scheduled && !can_still_spread(&state, g, params) {
            return Err(Error::NoOutbreak);
        }
        if day >= max_days {
            return Err(Error::NoOutbreak);
        }
        step(&mut state, g, params, rng);
    }
}

/// True while some node still has transmission days ahead of it and a
/// susceptible neighbor to use them on.
fn can_still_spread(
    state: &EpidemicState,
    g: &impl ContactNetwork,
    params: &EpidemicParams,
) -> bool {
    if params.p_i <= 0.0 {
        return false;
    }
    state
        .timelines
        .iter()
        .filter(|(_, tl)| tl.removal_day(params) > state.day)
        .any(|(&v, _)| {
            g.neighbors(v)
                .iter()
                .any(|u| !state.timelines.contains_key(u))
        })
}

const TIMELINE_HEADER: &str = "# timelines v1";

/// Writes the per-node timeline table.
pub fn write_timelines(state: &EpidemicState, w: &mut impl Write) -> Result<()> {
    writeln!(w, "{TIMELINE_HEADER}")?;
    writeln!(w, "# day {}", state.day)?;
    writeln!(w, "node,exposure_day,course,infector")?;
    for (v, tl) in state.timelines() {
        let course = match tl.course {
            Course::Asymptomatic => "asymptomatic",
            Course::Symptomatic => "symptomatic",
            Course::Hospitalized => "hospitalized",
        };
        let infector = tl.infector.map(|i| i.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{}", v, tl.exposure_day, course, infector)?;
    }
    Ok(())
}

/// Reads a timeline table written by [`write_timelines`].
pub fn read_timelines(r: impl BufRead) -> Result<EpidemicState> {
    let mut day: Option<i64> = None;
    let mut rows = Vec::new();
    let mut saw_header = false;
    let mut saw_columns = false;
    for (i, line) in r.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if !saw_header {
            if t != TIMELINE_HEADER {
                return Err(Error::parse("timelines", lineno, format!("unrecognized header {t:?}")));
            }
            saw_header = true;
            continue;
        }
        if let Some(rest) = t.strip_prefix("# day ") {
            day = Some(
                rest.trim()
                    .parse()
                    .map_err(|e| Error::parse("timelines", lineno, format!("bad day: {e}")))?,
            );
            continue;
        }
        if t.starts_with('#') {
            continue;
        }
        if !saw_columns {
            if t != "node,exposure_day,course,infector" {
                return Err(Error::parse("timelines", lineno, "unexpected column list"));
            }
            saw_columns = true;
            continue;
        }
        let fields: Vec<&str> = t.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::parse("timelines", lineno, format!("expected 4 fields, got {}", fields.len())));
        }
        let node: NodeId = fields[0]
            .parse()
            .map_err(|e| Error::parse("timelines", lineno, format!("bad node: {e}")))?;
        let exposure_day: i64 = fields[1]
            .parse()
            .map_err(|e| Error::parse("timelines", lineno, format!("bad exposure day: {e}")))?;
        let course = match fields[2] {
            "asymptomatic" => Course::Asymptomatic,
            "symptomatic" => Course::Symptomatic,
            "hospitalized" => Course::Hospitalized,
            other => {
                return Err(Error::parse("timelines", lineno, format!("unknown course {other:?}")));
            }
        };
        let infector = if fields[3].is_empty() {
            None
        } else {
            Some(
                fields[3]
                    .parse()
                    .map_err(|e| Error::parse("timelines", lineno, format!("bad infector: {e}")))?,
            )
        };
        rows.push((
            node,
            NodeTimeline {
                exposure_day,
                course,
                infector,
            },
        ));
    }
    if !saw_columns {
        return Err(Error::parse("timelines", 0, "missing column header"));
    }
    let day = day.ok_or_else(|| Error::parse("timelines", 0, "missing `# day` line"))?;
    EpidemicState::from_timelines(day, rows)
}
