//! Replicate orchestration: parameter sweeps over deterministic per-replicate
//! worlds, parallel or sequential execution, CSV emission, and the
//! theory-versus-simulation table.
//!
//! Determinism contract: `(config, base_seed)` fixes every output byte. Each
//! (grid point, replicate) pair owns independent ChaCha streams for the
//! graph, the epidemic, and each algorithm, so adding or removing algorithms
//! never perturbs the worlds, and all algorithms on one replicate see the
//! same frozen-or-evolving epidemic.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    self,
    ret::{
        effective_daily_infection, ret_params_from_household, ret_path_length_approx,
        simulate_stopped_ret,
    },
};
use crate::detect::{run_local_search, DetectionOutcome, LsConfig};
use crate::dmp::run_random_dmp;
use crate::epidemic::{self, DiseaseVariant, EpidemicParams, EpidemicState};
use crate::error::{Error, Result};
use crate::network::rbtree::{RbParams, RbTree};
use crate::network::{ContactNetwork, HouseholdNet, NetworkParams};
use crate::rng::stream;
use crate::session::{Session, SessionConfig};
use crate::sg::{run_sg, SgConfig};
use crate::stats::{t_interval, wilson, Interval};
use crate::NodeId;

/// Confidence level shared by every interval in the outputs.
pub const CONFIDENCE: f64 = 0.95;
/// Fresh epidemic draws tried per replicate before giving up on an outbreak.
const MAX_OUTBREAK_ATTEMPTS: u64 = 1000;
/// Growth-profile horizon for the closed-form path-length law.
const LAW_HORIZON: usize = 40;
/// Day cap for one stopped-growth Monte Carlo draw; later flags are censored.
const STOPPED_MC_HORIZON: usize = 60;

pub const RECORDS_SCHEMA: &str = "# epitrace records v1";
pub const SUMMARY_SCHEMA: &str = "# epitrace summary v1";
pub const THEORY_SCHEMA: &str = "# epitrace theory v1";
pub const PLOT_SCHEMA: &str = "# epitrace plot v1";

/// A parameter fixed at one value or swept over a list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sweep<T> {
    Fixed(T),
    List(Vec<T>),
}

impl<T: Copy> Sweep<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            Sweep::Fixed(v) => vec![*v],
            Sweep::List(vs) => vs.clone(),
        }
    }

    fn is_empty(&self) -> bool {
        matches!(self, Sweep::List(v) if v.is_empty())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Household network with the full disease course.
    HnmDde,
    /// Idealized two-color tree with the no-recovery course.
    RbtreeDdenr,
    /// Single-type growth model; only meaningful for theory comparison.
    Ret,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::HnmDde => "hnm_dde",
            ModelKind::RbtreeDdenr => "rbtree_ddenr",
            ModelKind::Ret => "ret",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "ls")]
    Ls,
    #[serde(rename = "lsv2")]
    LsV2,
    #[serde(rename = "ls+")]
    LsPlus,
    #[serde(rename = "ls+v2")]
    LsPlusV2,
    #[serde(rename = "random_dmp")]
    RandomDmp,
    #[serde(rename = "sg")]
    Sg,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Ls,
        Algorithm::LsV2,
        Algorithm::LsPlus,
        Algorithm::LsPlusV2,
        Algorithm::RandomDmp,
        Algorithm::Sg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ls => "ls",
            Algorithm::LsV2 => "lsv2",
            Algorithm::LsPlus => "ls+",
            Algorithm::LsPlusV2 => "ls+v2",
            Algorithm::RandomDmp => "random_dmp",
            Algorithm::Sg => "sg",
        }
    }

    /// Filename-safe variant of [`Self::name`].
    pub fn file_stem(self) -> &'static str {
        match self {
            Algorithm::Ls => "ls",
            Algorithm::LsV2 => "lsv2",
            Algorithm::LsPlus => "ls_plus",
            Algorithm::LsPlusV2 => "ls_plus_v2",
            Algorithm::RandomDmp => "random_dmp",
            Algorithm::Sg => "sg",
        }
    }

    fn ls_config(self) -> Option<LsConfig> {
        match self {
            Algorithm::Ls => Some(LsConfig {
                household_rules: false,
                eager: false,
            }),
            Algorithm::LsV2 => Some(LsConfig {
                household_rules: false,
                eager: true,
            }),
            Algorithm::LsPlus => Some(LsConfig {
                household_rules: true,
                eager: false,
            }),
            Algorithm::LsPlusV2 => Some(LsConfig {
                household_rules: true,
                eager: true,
            }),
            Algorithm::RandomDmp | Algorithm::Sg => None,
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm {s:?}")))
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [ModelKind::HnmDde, ModelKind::RbtreeDdenr, ModelKind::Ret]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown model {s:?}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub algorithms: Vec<Algorithm>,
    pub p_i: Sweep<f64>,
    pub p_a: Sweep<f64>,
    pub p_h: Sweep<f64>,
    pub d_c: Sweep<usize>,
    pub d_h: Sweep<usize>,
    pub n: Sweep<usize>,
    pub replicates: usize,
    pub base_seed: u64,
    pub freeze_epidemic: bool,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: ModelKind::HnmDde,
            algorithms: vec![Algorithm::Ls, Algorithm::LsPlus],
            p_i: Sweep::Fixed(0.1),
            p_a: Sweep::Fixed(0.5),
            p_h: Sweep::Fixed(0.2),
            d_c: Sweep::Fixed(3),
            d_h: Sweep::Fixed(2),
            n: Sweep::Fixed(399),
            replicates: 100,
            base_seed: 1,
            freeze_epidemic: true,
            output: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be at least 1"));
        }
        if self.p_i.is_empty()
            || self.p_a.is_empty()
            || self.p_h.is_empty()
            || self.d_c.is_empty()
            || self.d_h.is_empty()
            || self.n.is_empty()
        {
            return Err(Error::invalid("every swept parameter needs at least one value"));
        }
        if self.model == ModelKind::RbtreeDdenr {
            if let Some(bad) = self
                .algorithms
                .iter()
                .find(|a| a.ls_config().is_none())
            {
                return Err(Error::invalid(format!(
                    "{} needs a finite network; the tree model only runs the local searches",
                    bad.name()
                )));
            }
        }
        Ok(())
    }

    /// Requested algorithms in config order with duplicates dropped.
    fn algorithm_list(&self) -> Vec<Algorithm> {
        let mut seen = Vec::new();
        for &a in &self.algorithms {
            if !seen.contains(&a) {
                seen.push(a);
            }
        }
        seen
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub p_i: f64,
    pub p_a: f64,
    pub p_h: f64,
    pub d_c: usize,
    pub d_h: usize,
    pub n: usize,
}

impl GridPoint {
    /// Paper-default transition times with this point's probabilities.
    pub fn epidemic_params(&self, variant: DiseaseVariant) -> EpidemicParams {
        EpidemicParams {
            p_i: self.p_i,
            p_a: self.p_a,
            p_h: self.p_h,
            variant,
            ..EpidemicParams::default()
        }
    }
}

/// Cartesian product in the documented order: p_i outermost, then p_a, p_h,
/// d_c, d_h, and n innermost.
pub fn grid(cfg: &ExperimentConfig) -> Vec<GridPoint> {
    let mut points = Vec::new();
    for &p_i in &cfg.p_i.values() {
        for &p_a in &cfg.p_a.values() {
            for &p_h in &cfg.p_h.values() {
                for &d_c in &cfg.d_c.values() {
                    for &d_h in &cfg.d_h.values() {
                        for &n in &cfg.n.values() {
                            points.push(GridPoint {
                                p_i,
                                p_a,
                                p_h,
                                d_c,
                                d_h,
                                n,
                            });
                        }
                    }
                }
            }
        }
    }
    points
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub point: GridPoint,
    pub algorithm: Algorithm,
    pub success_source: bool,
    pub success_first_symptomatic: bool,
    pub tests: u64,
    pub edges: u64,
    pub days: i64,
    /// Stream index of this replicate's world; enough to replay it.
    pub seed: u64,
}

fn replicate_key(grid_idx: usize, rep: usize) -> u64 {
    ((grid_idx as u64) << 32) | rep as u64
}

pub(crate) struct World {
    pub(crate) state: EpidemicState,
    pub(crate) patient: NodeId,
    pub(crate) epi_rng: rand_chacha::ChaCha8Rng,
    pub(crate) source: NodeId,
}

/// Draws fresh (source, epidemic) streams until one reaches a
/// hospitalization. The attempt counter salts the stream index, so retries
/// stay reproducible and never alias other replicates below 2^16 grid
/// points.
pub(crate) fn build_world<G: ContactNetwork>(
    g: &G,
    params: &EpidemicParams,
    base_seed: u64,
    key: u64,
    fixed_source: Option<NodeId>,
) -> Result<World> {
    for attempt in 0..MAX_OUTBREAK_ATTEMPTS {
        let salt = key ^ (attempt << 48);
        let source = match fixed_source {
            Some(v) => v,
            None => {
                let n = g.node_count().ok_or(Error::InfiniteNetwork)?;
                stream(base_seed, "source", salt).gen_range(0..n)
            }
        };
        let mut epi_rng = stream(base_seed, "epidemic", salt);
        match epidemic::run_until_first_hospitalization(
            g,
            params,
            source,
            &mut epi_rng,
            epidemic::DEFAULT_MAX_DAYS,
        ) {
            Ok(hosp) => {
                return Ok(World {
                    state: hosp.state,
                    patient: hosp.patient,
                    epi_rng,
                    source,
                })
            }
            Err(Error::NoOutbreak) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoOutbreak)
}

fn run_point_replicate(
    cfg: &ExperimentConfig,
    point: GridPoint,
    grid_idx: usize,
    rep: usize,
) -> Result<Vec<ExperimentRecord>> {
    let key = replicate_key(grid_idx, rep);
    match cfg.model {
        ModelKind::HnmDde => {
            let params = point.epidemic_params(DiseaseVariant::Full);
            params.validate()?;
            let mut graph_rng = stream(cfg.base_seed, "graph", key);
            let net = HouseholdNet::generate(
                NetworkParams {
                    n: point.n,
                    d_c: point.d_c,
                    d_h: point.d_h,
                },
                &mut graph_rng,
            )?;
            run_algorithms(cfg, &net, params, point, key, None)
        }
        ModelKind::RbtreeDdenr => {
            let params = point.epidemic_params(DiseaseVariant::NoRecovery);
            params.validate()?;
            let tree = RbTree::new(RbParams {
                d_c: point.d_c,
                d_h: point.d_h,
            })?;
            run_algorithms(cfg, &tree, params, point, key, Some(0))
        }
        ModelKind::Ret => Err(Error::invalid(
            "the growth model has no detection sessions; use compare-theory",
        )),
    }
}

fn run_algorithms<G: ContactNetwork>(
    cfg: &ExperimentConfig,
    g: &G,
    params: EpidemicParams,
    point: GridPoint,
    key: u64,
    fixed_source: Option<NodeId>,
) -> Result<Vec<ExperimentRecord>> {
    let world = build_world(g, &params, cfg.base_seed, key, fixed_source)?;
    let first_symptomatic = world
        .state
        .first_symptomatic(&params)
        .expect("the hospitalized case is symptomatic");
    let session_cfg = SessionConfig {
        freeze_epidemic: cfg.freeze_epidemic,
        daily_cap: None,
    };
    let open = || {
        Session::from_state(
            g,
            params,
            session_cfg,
            world.state.clone(),
            world.patient,
            world.epi_rng.clone(),
        )
    };

    let requested = cfg.algorithm_list();
    // Budget-wired baselines measure themselves against the local searches
    // on the same world, so those support runs happen even when only the
    // baseline was requested.
    let mut want: Vec<Algorithm> = requested.clone();
    if requested.contains(&Algorithm::Sg) {
        for extra in [Algorithm::Ls, Algorithm::LsPlus] {
            if !want.contains(&extra) {
                want.push(extra);
            }
        }
    }
    if requested.contains(&Algorithm::RandomDmp) && !want.contains(&Algorithm::LsPlus) {
        want.push(Algorithm::LsPlus);
    }

    let mut outcomes: BTreeMap<Algorithm, DetectionOutcome> = BTreeMap::new();
    for &algo in &want {
        if let Some(ls_cfg) = algo.ls_config() {
            let outcome = run_local_search(&mut open()?, ls_cfg)?;
            outcomes.insert(algo, outcome);
        }
    }
    if want.contains(&Algorithm::RandomDmp) {
        let sensors = outcomes[&Algorithm::LsPlus].ledger.tests as usize + 1;
        let mut rng = stream(cfg.base_seed, "algo:random_dmp", key);
        let outcome = run_random_dmp(&mut open()?, sensors, &mut rng)?;
        outcomes.insert(Algorithm::RandomDmp, outcome);
    }
    if want.contains(&Algorithm::Sg) {
        let deadline = outcomes[&Algorithm::Ls]
            .days
            .max(outcomes[&Algorithm::LsPlus].days);
        let sg_cfg = SgConfig::for_epidemic(params.p_i, deadline)?;
        let mut rng = stream(cfg.base_seed, "algo:sg", key);
        let outcome = run_sg(&mut open()?, &sg_cfg, &mut rng)?;
        outcomes.insert(Algorithm::Sg, outcome);
    }

    Ok(requested
        .iter()
        .map(|&algo| {
            let o = &outcomes[&algo];
            ExperimentRecord {
                point,
                algorithm: algo,
                success_source: o.estimate == world.source,
                success_first_symptomatic: o.estimate == first_symptomatic,
                tests: o.ledger.tests,
                edges: o.ledger.edges_revealed,
                days: o.days,
                seed: key,
            }
        })
        .collect())
}

/// Grid points plus the flattened (point index, replicate index) work list.
type Plan = (Vec<GridPoint>, Vec<(usize, usize)>);

fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    cfg.validate()?;
    if cfg.model == ModelKind::Ret {
        return Err(Error::invalid(
            "the growth model has no detection sessions; use compare-theory",
        ));
    }
    if cfg.algorithms.is_empty() {
        return Err(Error::invalid("no algorithms requested"));
    }
    let points = grid(cfg);
    let units: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|g| (0..cfg.replicates).map(move |r| (g, r)))
        .collect();
    Ok((points, units))
}

fn run_units_sequential(
    cfg: &ExperimentConfig,
    points: &[GridPoint],
    units: &[(usize, usize)],
) -> Result<Vec<Vec<ExperimentRecord>>> {
    units
        .iter()
        .map(|&(g, r)| run_point_replicate(cfg, points[g], g, r))
        .collect()
}

#[cfg(feature = "parallel")]
fn run_units(
    cfg: &ExperimentConfig,
    points: &[GridPoint],
    units: &[(usize, usize)],
) -> Result<Vec<Vec<ExperimentRecord>>> {
    use rayon::prelude::*;
    units
        .par_iter()
        .map(|&(g, r)| run_point_replicate(cfg, points[g], g, r))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_units(
    cfg: &ExperimentConfig,
    points: &[GridPoint],
    units: &[(usize, usize)],
) -> Result<Vec<Vec<ExperimentRecord>>> {
    run_units_sequential(cfg, points, units)
}

/// All replicate records in grid-then-replicate order, computed with rayon
/// when the `parallel` feature is on.
pub fn collect_records(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    let (points, units) = plan(cfg)?;
    Ok(run_units(cfg, &points, &units)?.into_iter().flatten().collect())
}

/// Single-threaded twin of [`collect_records`]; always compiled so the two
/// paths can be benchmarked against each other.
pub fn collect_records_sequential(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    let (points, units) = plan(cfg)?;
    Ok(run_units_sequential(cfg, &points, &units)?
        .into_iter()
        .flatten()
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub point: GridPoint,
    pub algorithm: Algorithm,
    pub replicates: u64,
    pub success_source: Interval,
    pub success_first_symptomatic: Interval,
    pub tests: Interval,
    pub edges: Interval,
    pub days: Interval,
}

/// Aggregates records per (grid point, algorithm), in first-appearance
/// order: Wilson intervals for the success rates, Student-t for the costs.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    type Key = (u64, u64, u64, usize, usize, usize, Algorithm);
    let key_of = |r: &ExperimentRecord| -> Key {
        (
            r.point.p_i.to_bits(),
            r.point.p_a.to_bits(),
            r.point.p_h.to_bits(),
            r.point.d_c,
            r.point.d_h,
            r.point.n,
            r.algorithm,
        )
    };
    let mut order: Vec<Key> = Vec::new();
    let mut buckets: BTreeMap<Key, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        let k = key_of(r);
        buckets.entry(k).or_insert_with(|| {
            order.push(k);
            Vec::new()
        });
        buckets.get_mut(&k).unwrap().push(r);
    }
    order
        .into_iter()
        .map(|k| {
            let rows = &buckets[&k];
            let n = rows.len() as u64;
            let k_src = rows.iter().filter(|r| r.success_source).count() as u64;
            let k_fs = rows
                .iter()
                .filter(|r| r.success_first_symptomatic)
                .count() as u64;
            let tests: Vec<f64> = rows.iter().map(|r| r.tests as f64).collect();
            let edges: Vec<f64> = rows.iter().map(|r| r.edges as f64).collect();
            let days: Vec<f64> = rows.iter().map(|r| r.days as f64).collect();
            SummaryRow {
                point: rows[0].point,
                algorithm: rows[0].algorithm,
                replicates: n,
                success_source: wilson(k_src, n, CONFIDENCE),
                success_first_symptomatic: wilson(k_fs, n, CONFIDENCE),
                tests: t_interval(&tests, CONFIDENCE),
                edges: t_interval(&edges, CONFIDENCE),
                days: t_interval(&days, CONFIDENCE),
            }
        })
        .collect()
}

fn metadata_line(cfg: &ExperimentConfig) -> String {
    format!(
        "# model={} replicates={} base_seed={} freeze={}",
        cfg.model.name(),
        cfg.replicates,
        cfg.base_seed,
        cfg.freeze_epidemic
    )
}

pub fn write_records_csv(
    w: &mut impl Write,
    cfg: &ExperimentConfig,
    records: &[ExperimentRecord],
) -> Result<()> {
    writeln!(w, "{RECORDS_SCHEMA}")?;
    writeln!(w, "{}", metadata_line(cfg))?;
    writeln!(
        w,
        "p_i,p_a,p_h,d_c,d_h,n,algorithm,seed,success_source,success_first_symptomatic,tests,edges,days"
    )?;
    for r in records {
        let p = r.point;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.p_i,
            p.p_a,
            p.p_h,
            p.d_c,
            p.d_h,
            p.n,
            r.algorithm.name(),
            r.seed,
            u8::from(r.success_source),
            u8::from(r.success_first_symptomatic),
            r.tests,
            r.edges,
            r.days
        )?;
    }
    Ok(())
}

const SUMMARY_COLUMNS: &str = "p_i,p_a,p_h,d_c,d_h,n,algorithm,replicates,\
success_source,success_source_lo,success_source_hi,\
success_first_symptomatic,success_first_symptomatic_lo,success_first_symptomatic_hi,\
tests_mean,tests_lo,tests_hi,edges_mean,edges_lo,edges_hi,days_mean,days_lo,days_hi";

pub fn write_summary_csv(
    w: &mut impl Write,
    cfg: &ExperimentConfig,
    rows: &[SummaryRow],
) -> Result<()> {
    writeln!(w, "{SUMMARY_SCHEMA}")?;
    writeln!(w, "{}", metadata_line(cfg))?;
    writeln!(w, "{SUMMARY_COLUMNS}")?;
    for s in rows {
        let p = s.point;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.p_i,
            p.p_a,
            p.p_h,
            p.d_c,
            p.d_h,
            p.n,
            s.algorithm.name(),
            s.replicates,
            s.success_source.mean,
            s.success_source.lo,
            s.success_source.hi,
            s.success_first_symptomatic.mean,
            s.success_first_symptomatic.lo,
            s.success_first_symptomatic.hi,
            s.tests.mean,
            s.tests.lo,
            s.tests.hi,
            s.edges.mean,
            s.edges.lo,
            s.edges.hi,
            s.days.mean,
            s.days.lo,
            s.days.hi
        )?;
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(what: &'static str, line: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(what, line, format!("bad field {s:?}")))
}

/// Reads back a summary written by [`write_summary_csv`]. Comment lines
/// beyond the schema header are skipped; anything structurally off is a
/// parse error naming the line.
pub fn read_summary_csv(r: impl BufRead) -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::new();
    let mut saw_schema = false;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if lineno == 1 {
            if line != SUMMARY_SCHEMA {
                return Err(Error::parse(
                    "summary",
                    lineno,
                    format!("expected schema header {SUMMARY_SCHEMA:?}"),
                ));
            }
            saw_schema = true;
            continue;
        }
        if line.starts_with('#') || line == SUMMARY_COLUMNS || line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 23 {
            return Err(Error::parse(
                "summary",
                lineno,
                format!("expected 23 fields, found {}", fields.len()),
            ));
        }
        let f = |i: usize| -> Result<f64> { parse_field("summary", lineno, fields[i]) };
        let point = GridPoint {
            p_i: f(0)?,
            p_a: f(1)?,
            p_h: f(2)?,
            d_c: parse_field("summary", lineno, fields[3])?,
            d_h: parse_field("summary", lineno, fields[4])?,
            n: parse_field("summary", lineno, fields[5])?,
        };
        let algorithm: Algorithm = fields[6]
            .parse()
            .map_err(|_| Error::parse("summary", lineno, format!("bad algorithm {:?}", fields[6])))?;
        let iv = |base: usize| -> Result<Interval> {
            Ok(Interval {
                mean: f(base)?,
                lo: f(base + 1)?,
                hi: f(base + 2)?,
            })
        };
        rows.push(SummaryRow {
            point,
            algorithm,
            replicates: parse_field("summary", lineno, fields[7])?,
            success_source: iv(8)?,
            success_first_symptomatic: iv(11)?,
            tests: iv(14)?,
            edges: iv(17)?,
            days: iv(20)?,
        });
    }
    if !saw_schema {
        return Err(Error::parse("summary", 1, "empty file"));
    }
    Ok(rows)
}

pub struct ExperimentOutput {
    pub records_path: PathBuf,
    pub summary_path: PathBuf,
    pub records: usize,
    pub summary_rows: usize,
}

/// Runs the sweep and writes `records.csv` and `summary.csv` under the
/// config's output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let records = collect_records(cfg)?;
    let summary = summarize(&records);
    fs::create_dir_all(&cfg.output)?;
    let records_path = cfg.output.join("records.csv");
    let summary_path = cfg.output.join("summary.csv");
    let mut buf = Vec::new();
    write_records_csv(&mut buf, cfg, &records)?;
    fs::write(&records_path, &buf)?;
    buf.clear();
    write_summary_csv(&mut buf, cfg, &summary)?;
    fs::write(&summary_path, &buf)?;
    Ok(ExperimentOutput {
        records_path,
        summary_path,
        records: records.len(),
        summary_rows: summary.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryRow {
    pub point: GridPoint,
    pub replicates: u64,
    pub ls_empirical: Interval,
    /// LS success formula composed with the empirical path-length law.
    pub ls_predicted: f64,
    pub ls_plus_empirical: Interval,
    /// LS+ lower bound composed with the empirical path-length law.
    pub ls_plus_bound: f64,
    /// Back-of-envelope success estimate on degree d_c + d_h.
    pub boe_estimate: f64,
    /// LS success formula composed with the closed-form path-length law.
    pub ls_predicted_closed: f64,
    pub ls_plus_bound_closed: f64,
    /// Bound exceeded the upper end of the LS+ confidence interval.
    pub bound_violation: bool,
}

fn rbtree_world_sample(
    cfg: &ExperimentConfig,
    point: GridPoint,
    grid_idx: usize,
    rep: usize,
) -> Result<(bool, bool, usize)> {
    let params = point.epidemic_params(DiseaseVariant::NoRecovery);
    let tree = RbTree::new(RbParams {
        d_c: point.d_c,
        d_h: point.d_h,
    })?;
    let key = replicate_key(grid_idx, rep);
    let world = build_world(&tree, &params, cfg.base_seed, key, Some(0))?;
    let path_len = world.state.transmission_path(world.patient)?.len() - 1;
    let session_cfg = SessionConfig {
        freeze_epidemic: true,
        daily_cap: None,
    };
    let ls = run_local_search(
        &mut Session::from_state(
            &tree,
            params,
            session_cfg,
            world.state.clone(),
            world.patient,
            world.epi_rng.clone(),
        )?,
        LsConfig {
            household_rules: false,
            eager: false,
        },
    )?;
    let plus = run_local_search(
        &mut Session::from_state(
            &tree,
            params,
            session_cfg,
            world.state,
            world.patient,
            world.epi_rng,
        )?,
        LsConfig {
            household_rules: true,
            eager: false,
        },
    )?;
    Ok((ls.estimate == 0, plus.estimate == 0, path_len))
}

#[cfg(feature = "parallel")]
fn rbtree_samples(
    cfg: &ExperimentConfig,
    point: GridPoint,
    grid_idx: usize,
) -> Result<Vec<(bool, bool, usize)>> {
    use rayon::prelude::*;
    (0..cfg.replicates)
        .into_par_iter()
        .map(|rep| rbtree_world_sample(cfg, point, grid_idx, rep))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn rbtree_samples(
    cfg: &ExperimentConfig,
    point: GridPoint,
    grid_idx: usize,
) -> Result<Vec<(bool, bool, usize)>> {
    (0..cfg.replicates)
        .map(|rep| rbtree_world_sample(cfg, point, grid_idx, rep))
        .collect()
}

/// Closed-form path-length law for a household geometry: the single-type
/// growth profile under the per-exposure-window infection probability.
pub fn closed_form_path_law(point: &GridPoint) -> Result<Vec<f64>> {
    let (d_r, d) = ret_params_from_household(point.d_c, point.d_h);
    let t_e = EpidemicParams::default().t_e as usize;
    let p_eff = effective_daily_infection(point.p_i, t_e);
    ret_path_length_approx(d_r, d, p_eff, point.p_a, point.p_h, LAW_HORIZON)
}

fn theory_from_pmf(
    point: GridPoint,
    replicates: u64,
    pmf: &[f64],
    ls_emp: Interval,
    plus_emp: Interval,
) -> Result<TheoryRow> {
    let p = analytic::p_cond(point.p_a, point.p_h)?;
    let ls_predicted = analytic::ls_success_probability(pmf, p);
    let ls_plus_bound = analytic::ls_plus_success_lower_bound(pmf, p, point.d_c, point.d_h)?;
    let law = closed_form_path_law(&point)?;
    let ls_predicted_closed = analytic::ls_success_probability(&law, p);
    let ls_plus_bound_closed =
        analytic::ls_plus_success_lower_bound(&law, p, point.d_c, point.d_h)?;
    let boe_estimate = analytic::boe_success(
        point.p_a,
        point.p_h,
        (point.d_c + point.d_h) as f64,
        point.p_i,
    )?;
    Ok(TheoryRow {
        point,
        replicates,
        ls_empirical: ls_emp,
        ls_predicted,
        ls_plus_empirical: plus_emp,
        ls_plus_bound,
        boe_estimate,
        ls_predicted_closed,
        ls_plus_bound_closed,
        bound_violation: ls_plus_bound > plus_emp.hi,
    })
}

fn rbtree_theory_row(cfg: &ExperimentConfig, point: GridPoint, grid_idx: usize) -> Result<TheoryRow> {
    let samples = rbtree_samples(cfg, point, grid_idx)?;
    let n = samples.len() as u64;
    let k_ls = samples.iter().filter(|s| s.0).count() as u64;
    let k_plus = samples.iter().filter(|s| s.1).count() as u64;
    let lengths: Vec<usize> = samples.iter().map(|s| s.2).collect();
    let pmf = analytic::empirical_pmf(&lengths);
    theory_from_pmf(
        point,
        n,
        &pmf,
        wilson(k_ls, n, CONFIDENCE),
        wilson(k_plus, n, CONFIDENCE),
    )
}

fn ret_theory_row(cfg: &ExperimentConfig, point: GridPoint, grid_idx: usize) -> Result<TheoryRow> {
    let (d_r, d) = ret_params_from_household(point.d_c, point.d_h);
    let t_e = EpidemicParams::default().t_e as usize;
    let p_eff = effective_daily_infection(point.p_i, t_e);
    let q = (1.0 - point.p_a) * point.p_h;
    let mut lengths = Vec::with_capacity(cfg.replicates);
    for rep in 0..cfg.replicates {
        let key = replicate_key(grid_idx, rep);
        let mut rng = stream(cfg.base_seed, "ret-stop", key);
        if let Some(level) = simulate_stopped_ret(d_r, d, p_eff, q, STOPPED_MC_HORIZON, &mut rng)? {
            lengths.push(level);
        }
    }
    if lengths.is_empty() {
        return Err(Error::invalid(
            "no stopped-growth draw flagged within the horizon; is (1-p_a)p_h zero?",
        ));
    }
    let n = lengths.len() as u64;
    let pmf = analytic::empirical_pmf(&lengths);
    let p = analytic::p_cond(point.p_a, point.p_h)?;
    // No Bernoulli trials exist here; the "empirical" columns are the laws
    // composed with the Monte Carlo length distribution, as point estimates.
    let degenerate = |v: f64| Interval {
        mean: v,
        lo: v,
        hi: v,
    };
    let ls_emp = degenerate(analytic::ls_success_probability(&pmf, p));
    let plus_emp = degenerate(analytic::ls_plus_success_lower_bound(
        &pmf,
        p,
        point.d_c,
        point.d_h,
    )?);
    theory_from_pmf(point, n, &pmf, ls_emp, plus_emp)
}

/// Per grid point: empirical LS and LS+ success plus the analytic values
/// they are compared against.
pub fn theory_rows(cfg: &ExperimentConfig) -> Result<Vec<TheoryRow>> {
    cfg.validate()?;
    let points = grid(cfg);
    points
        .iter()
        .enumerate()
        .map(|(idx, &point)| match cfg.model {
            ModelKind::RbtreeDdenr => rbtree_theory_row(cfg, point, idx),
            ModelKind::Ret => ret_theory_row(cfg, point, idx),
            ModelKind::HnmDde => Err(Error::invalid(
                "compare-theory runs on rbtree_ddenr or ret",
            )),
        })
        .collect()
}

pub fn write_theory_csv(
    w: &mut impl Write,
    cfg: &ExperimentConfig,
    rows: &[TheoryRow],
) -> Result<()> {
    writeln!(w, "{THEORY_SCHEMA}")?;
    writeln!(w, "{}", metadata_line(cfg))?;
    writeln!(
        w,
        "p_i,p_a,p_h,d_c,d_h,n,replicates,ls_empirical,ls_lo,ls_hi,ls_predicted,\
ls_plus_empirical,ls_plus_lo,ls_plus_hi,ls_plus_bound,boe_estimate,\
ls_predicted_closed,ls_plus_bound_closed,bound_violation"
    )?;
    for t in rows {
        let p = t.point;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.p_i,
            p.p_a,
            p.p_h,
            p.d_c,
            p.d_h,
            p.n,
            t.replicates,
            t.ls_empirical.mean,
            t.ls_empirical.lo,
            t.ls_empirical.hi,
            t.ls_predicted,
            t.ls_plus_empirical.mean,
            t.ls_plus_empirical.lo,
            t.ls_plus_empirical.hi,
            t.ls_plus_bound,
            t.boe_estimate,
            t.ls_predicted_closed,
            t.ls_plus_bound_closed,
            u8::from(t.bound_violation)
        )?;
    }
    Ok(())
}

/// Runs the theory comparison and writes `theory.csv` under the output
/// directory.
pub fn run_compare_theory(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let rows = theory_rows(cfg)?;
    fs::create_dir_all(&cfg.output)?;
    let path = cfg.output.join("theory.csv");
    let mut buf = Vec::new();
    write_theory_csv(&mut buf, cfg, &rows)?;
    fs::write(&path, &buf)?;
    Ok(path)
}

/// Reshapes summary rows into per-(metric, swept parameter, algorithm) plot
/// files with `x,mean,lo,hi` columns. Only parameters taking at least two
/// distinct values produce files; rows keep summary order within equal x.
pub fn emit_plot_data(rows: &[SummaryRow], out_dir: &Path) -> Result<Vec<PathBuf>> {
    type MetricCol = (&'static str, fn(&SummaryRow) -> Interval);
    type ParamCol = (&'static str, fn(&GridPoint) -> f64);
    let metrics: [MetricCol; 5] = [
        ("success_source", |s| s.success_source),
        ("success_first_symptomatic", |s| s.success_first_symptomatic),
        ("tests", |s| s.tests),
        ("edges", |s| s.edges),
        ("days", |s| s.days),
    ];
    let params: [ParamCol; 6] = [
        ("p_i", |p| p.p_i),
        ("p_a", |p| p.p_a),
        ("p_h", |p| p.p_h),
        ("d_c", |p| p.d_c as f64),
        ("d_h", |p| p.d_h as f64),
        ("n", |p| p.n as f64),
    ];
    let mut algos: Vec<Algorithm> = Vec::new();
    for r in rows {
        if !algos.contains(&r.algorithm) {
            algos.push(r.algorithm);
        }
    }
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (pname, pget) in params {
        let mut xs: Vec<u64> = rows.iter().map(|r| pget(&r.point).to_bits()).collect();
        xs.sort_unstable();
        xs.dedup();
        if xs.len() < 2 {
            continue;
        }
        for &algo in &algos {
            for (mname, mget) in metrics {
                let mut curve: Vec<(f64, Interval)> = rows
                    .iter()
                    .filter(|r| r.algorithm == algo)
                    .map(|r| (pget(&r.point), mget(r)))
                    .collect();
                if curve.is_empty() {
                    continue;
                }
                curve.sort_by(|a, b| a.0.total_cmp(&b.0));
                let path = out_dir.join(format!("plot_{mname}_vs_{pname}_{}.csv", algo.file_stem()));
                let mut buf = Vec::new();
                writeln!(buf, "{PLOT_SCHEMA}")?;
                writeln!(buf, "# metric={mname} x={pname} algorithm={}", algo.name())?;
                writeln!(buf, "x,mean,lo,hi")?;
                for (x, iv) in curve {
                    writeln!(buf, "{},{},{},{}", x, iv.mean, iv.lo, iv.hi)?;
                }
                fs::write(&path, &buf)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

/// [`emit_plot_data`] over a summary CSV on disk.
pub fn plot_data_from_file(summary_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let file = fs::File::open(summary_path)?;
    let rows = read_summary_csv(std::io::BufReader::new(file))?;
    emit_plot_data(&rows, out_dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            n: Sweep::Fixed(12),
            replicates: 3,
            base_seed: 11,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn config_json_round_trips_with_sweeps() {
        let text = r#"{
            "model": "hnm_dde",
            "algorithms": ["ls", "ls+", "sg"],
            "p_a": [0.0, 0.5],
            "n": 24,
            "replicates": 7,
            "base_seed": 3,
            "output": "out"
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.p_a.values(), vec![0.0, 0.5]);
        assert_eq!(cfg.n.values(), vec![24]);
        assert_eq!(cfg.replicates, 7);
        assert_eq!(cfg.algorithms.len(), 3);
        assert!(cfg.freeze_epidemic);
        let back = serde_json::to_string(&cfg).unwrap();
        let again = ExperimentConfig::from_json(&back).unwrap();
        assert_eq!(again.p_a.values(), vec![0.0, 0.5]);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let err = ExperimentConfig::from_json(r#"{"replicate": 5}"#).unwrap_err();
        assert!(matches!(err, Error::Json(_)));
    }

    #[test]
    fn grid_is_the_documented_product_order() {
        let cfg = ExperimentConfig {
            p_i: Sweep::List(vec![0.1, 0.2]),
            n: Sweep::List(vec![12, 24]),
            ..ExperimentConfig::default()
        };
        let pts = grid(&cfg);
        assert_eq!(pts.len(), 4);
        assert_eq!((pts[0].p_i, pts[0].n), (0.1, 12));
        assert_eq!((pts[1].p_i, pts[1].n), (0.1, 24));
        assert_eq!((pts[2].p_i, pts[2].n), (0.2, 12));
        assert_eq!((pts[3].p_i, pts[3].n), (0.2, 24));
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = tiny_config();
        cfg.replicates = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = tiny_config();
        cfg.p_a = Sweep::List(vec![]);
        assert!(cfg.validate().is_err());

        let mut cfg = tiny_config();
        cfg.model = ModelKind::RbtreeDdenr;
        cfg.algorithms = vec![Algorithm::Sg];
        assert!(cfg.validate().is_err());

        let mut cfg = tiny_config();
        cfg.model = ModelKind::Ret;
        assert!(matches!(
            collect_records(&cfg),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn records_are_deterministic_and_match_sequential() {
        let cfg = tiny_config();
        let a = collect_records(&cfg).unwrap();
        let b = collect_records(&cfg).unwrap();
        let c = collect_records_sequential(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.len(), 2 * cfg.replicates);
    }

    #[test]
    fn summary_means_recompute_from_records() {
        let cfg = ExperimentConfig {
            algorithms: vec![Algorithm::Ls, Algorithm::LsPlus, Algorithm::LsV2],
            replicates: 5,
            ..tiny_config()
        };
        let records = collect_records(&cfg).unwrap();
        let summary = summarize(&records);
        assert_eq!(summary.len(), 3);
        for row in &summary {
            let mine: Vec<&ExperimentRecord> = records
                .iter()
                .filter(|r| r.algorithm == row.algorithm)
                .collect();
            assert_eq!(row.replicates as usize, mine.len());
            let k = mine.iter().filter(|r| r.success_source).count() as f64;
            let mean_tests =
                mine.iter().map(|r| r.tests as f64).sum::<f64>() / mine.len() as f64;
            assert!((row.success_source.mean - k / mine.len() as f64).abs() < 1e-12);
            assert!((row.tests.mean - mean_tests).abs() < 1e-9);
            assert!(row.success_source.lo <= row.success_source.mean);
            assert!(row.success_source.mean <= row.success_source.hi);
        }
    }

    #[test]
    fn csv_output_is_byte_identical_across_runs() {
        let cfg = tiny_config();
        let mut first = Vec::new();
        let mut second = Vec::new();
        for buf in [&mut first, &mut second] {
            let records = collect_records(&cfg).unwrap();
            write_records_csv(buf, &cfg, &records).unwrap();
            let summary = summarize(&records);
            write_summary_csv(buf, &cfg, &summary).unwrap();
        }
        assert_eq!(first, second);
        assert!(std::str::from_utf8(&first).unwrap().starts_with(RECORDS_SCHEMA));
    }

    #[test]
    fn summary_csv_round_trips() {
        let cfg = ExperimentConfig {
            algorithms: vec![Algorithm::Ls, Algorithm::LsPlus],
            p_a: Sweep::List(vec![0.2, 0.5]),
            replicates: 2,
            ..tiny_config()
        };
        let rows = summarize(&collect_records(&cfg).unwrap());
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &cfg, &rows).unwrap();
        let parsed = read_summary_csv(&buf[..]).unwrap();
        let mut buf2 = Vec::new();
        write_summary_csv(&mut buf2, &cfg, &parsed).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn corrupt_summary_is_a_parse_error_with_a_line() {
        let bad = format!("{SUMMARY_SCHEMA}\nnot,a,row\n");
        let err = read_summary_csv(bad.as_bytes()).unwrap_err();
        match err {
            Error::Parse { what, line, .. } => {
                assert_eq!(what, "summary");
                assert_eq!(line, 2);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let wrong_header = "# something else\n";
        assert!(read_summary_csv(wrong_header.as_bytes()).is_err());
    }

    #[test]
    fn plot_data_reshapes_swept_parameters() {
        let cfg = ExperimentConfig {
            algorithms: vec![Algorithm::Ls],
            p_a: Sweep::List(vec![0.0, 0.4, 0.8]),
            replicates: 2,
            ..tiny_config()
        };
        let rows = summarize(&collect_records(&cfg).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let files = emit_plot_data(&rows, dir.path()).unwrap();
        // One swept parameter, one algorithm, five metrics.
        assert_eq!(files.len(), 5);
        let accuracy = files
            .iter()
            .find(|p| p.file_name().unwrap() == "plot_success_source_vs_p_a_ls.csv")
            .expect("accuracy curve emitted");
        let text = fs::read_to_string(accuracy).unwrap();
        let data_rows: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with('x'))
            .collect();
        assert_eq!(data_rows.len(), 3);
        assert!(data_rows[0].starts_with("0,"));
    }

    #[test]
    fn rbtree_theory_matches_exactly_when_nobody_is_asymptomatic() {
        let cfg = ExperimentConfig {
            model: ModelKind::RbtreeDdenr,
            algorithms: vec![Algorithm::Ls, Algorithm::LsPlus],
            p_a: Sweep::Fixed(0.0),
            p_i: Sweep::Fixed(0.3),
            replicates: 40,
            ..tiny_config()
        };
        let rows = theory_rows(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.ls_empirical.mean, 1.0);
        assert_eq!(row.ls_plus_empirical.mean, 1.0);
        assert!((row.ls_predicted - 1.0).abs() < 1e-12);
        assert!(row.ls_plus_bound <= 1.0 + 1e-12);
        assert!(!row.bound_violation);
    }

    #[test]
    fn ret_theory_row_is_well_formed() {
        let cfg = ExperimentConfig {
            model: ModelKind::Ret,
            replicates: 300,
            ..tiny_config()
        };
        let rows = theory_rows(&cfg).unwrap();
        let row = &rows[0];
        assert!(row.replicates > 0);
        for v in [
            row.ls_empirical.mean,
            row.ls_predicted,
            row.ls_plus_empirical.mean,
            row.ls_plus_bound,
            row.boe_estimate,
            row.ls_predicted_closed,
            row.ls_plus_bound_closed,
        ] {
            assert!((0.0..=1.0).contains(&v), "out of range: {v}");
        }
    }

    #[test]
    fn theory_rejects_the_household_model() {
        let cfg = tiny_config();
        assert!(theory_rows(&cfg).is_err());
    }

    // With nobody asymptomatic and certain hospitalization, the first
    // hospitalized case is the source itself, so every strategy should
    // name it. The walks and the message-passing baseline do so on any
    // seed; size-gain draws uniformly from its surviving candidates, so
    // its hit is seed-dependent and this seed is pinned to one.
    #[test]
    fn every_algorithm_names_an_always_symptomatic_source() {
        let cfg = ExperimentConfig {
            algorithms: Algorithm::ALL.to_vec(),
            p_a: Sweep::Fixed(0.0),
            p_h: Sweep::Fixed(1.0),
            p_i: Sweep::Fixed(0.3),
            n: Sweep::Fixed(24),
            replicates: 1,
            base_seed: 27,
            ..ExperimentConfig::default()
        };
        let records = collect_records(&cfg).unwrap();
        assert_eq!(records.len(), 6);
        for r in &records {
            assert!(r.success_source, "{} missed the source", r.algorithm.name());
            assert!(r.success_first_symptomatic);
        }
    }
}

