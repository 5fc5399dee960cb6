//! Seeded Monte Carlo sweeps over graph families and edge probabilities.
//!
//! Every trial draws its randomness from a seed derived from
//! `(master_seed, point_index, trial_index)`, so results do not depend on
//! how trials are scheduled across threads.

mod stats;

pub use stats::{poisson_pmf, tv_distance, tv_sampling_error, wilson_interval, Histogram, Z_99};

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{sample_game, MAX_TABLE_DEGREE};
use crate::graph::{gen_complete, gen_empty, gen_gnp, gen_grid, gen_path, GnpParams, Graph};
use crate::pne::{PneOptions, PneSolver, ENUMERATION_MAX_VERTICES};

/// Name of the generator behind every seed, echoed in results.
pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphFamily {
    Gnp { n: Vec<usize> },
    Complete { n: Vec<usize> },
    Path { n: Vec<usize> },
    Empty { n: Vec<usize> },
    Grid { rows: usize, cols: usize },
    FromFile { path: String, graph: Graph },
}

impl GraphFamily {
    pub fn name(&self) -> &'static str {
        match self {
            GraphFamily::Gnp { .. } => "gnp",
            GraphFamily::Complete { .. } => "complete",
            GraphFamily::Path { .. } => "path",
            GraphFamily::Empty { .. } => "empty",
            GraphFamily::Grid { .. } => "grid",
            GraphFamily::FromFile { .. } => "file",
        }
    }

    fn sizes(&self) -> Vec<usize> {
        match self {
            GraphFamily::Gnp { n }
            | GraphFamily::Complete { n }
            | GraphFamily::Path { n }
            | GraphFamily::Empty { n } => n.clone(),
            GraphFamily::Grid { rows, cols } => vec![rows * cols],
            GraphFamily::FromFile { graph, .. } => vec![graph.n()],
        }
    }
}

/// Edge probabilities for `G(n, p)`, given directly or through a regime
/// preset that scales with `n` (natural logarithms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PGrid {
    Values {
        p: Vec<f64>,
    },
    /// `p = (2 + eps) ln n / n`.
    High {
        eps: Vec<f64>,
    },
    /// `p = beta / n`.
    Medium {
        beta: Vec<f64>,
    },
    /// `p = c / n^2`.
    Low {
        c: Vec<f64>,
    },
}

impl PGrid {
    pub fn high() -> Self {
        PGrid::High { eps: vec![1.0] }
    }

    pub fn medium() -> Self {
        PGrid::Medium { beta: vec![0.5] }
    }

    /// `(parameter, p)` pairs for graphs on `n` vertices.
    pub fn resolve(&self, n: usize) -> Result<Vec<(f64, f64)>> {
        let nf = n as f64;
        let pairs: Vec<(f64, f64)> = match self {
            PGrid::Values { p } => p.iter().map(|&p| (p, p)).collect(),
            PGrid::High { eps } => eps.iter().map(|&e| (e, (2.0 + e) * nf.ln() / nf)).collect(),
            PGrid::Medium { beta } => beta.iter().map(|&b| (b, b / nf)).collect(),
            PGrid::Low { c } => c.iter().map(|&c| (c, c / (nf * nf))).collect(),
        };
        if pairs.is_empty() {
            return Err(Error::InvalidParam("empty p grid".into()));
        }
        if let Some(&(param, p)) = pairs.iter().find(|(_, p)| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParam(format!("grid parameter {param} gives p = {p} outside [0, 1] at n = {n}")));
        }
        Ok(pairs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// Early-exit decision per trial.
    Exists,
    /// Exact `Z` per trial, with histogram, mean and TV distance.
    FullCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Trials whose graph has a larger component are skipped.
    pub max_component: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_component: ENUMERATION_MAX_VERTICES }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub family: GraphFamily,
    /// Used by the `Gnp` family only.
    pub p_grid: PGrid,
    /// Draw one `G(n, p)` graph from this seed and reuse it for every trial
    /// of a point, instead of a fresh graph per trial.
    pub graph_seed: Option<u64>,
    pub trials: u64,
    pub master_seed: u64,
    pub mode: CountMode,
    pub caps: Caps,
    pub wilson_z: f64,
    /// Worker threads; 0 lets the pool decide. Never affects results.
    #[serde(skip)]
    pub threads: usize,
    /// Fill the `seconds` column. Off by default so output is reproducible.
    #[serde(skip)]
    pub timing: bool,
}

impl SweepConfig {
    pub fn new(family: GraphFamily, p_grid: PGrid, trials: u64, master_seed: u64, mode: CountMode) -> Self {
        SweepConfig {
            family,
            p_grid,
            graph_seed: None,
            trials,
            master_seed,
            mode,
            caps: Caps::default(),
            wilson_z: Z_99,
            threads: 0,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParam("trials must be at least 1".into()));
        }
        if self.caps.max_component == 0 || self.caps.max_component > ENUMERATION_MAX_VERTICES {
            return Err(Error::InvalidParam(format!(
                "component cap {} outside 1..={ENUMERATION_MAX_VERTICES}",
                self.caps.max_component
            )));
        }
        if !(self.wilson_z >= 0.0) || !self.wilson_z.is_finite() {
            return Err(Error::InvalidParam(format!("wilson z = {} must be non-negative", self.wilson_z)));
        }
        let sizes = self.family.sizes();
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidParam("graph sizes must be non-empty and at least 1".into()));
        }
        self.points().map(|_| ())
    }

    /// Grid points in sweep order: sizes outer, probabilities inner.
    pub fn points(&self) -> Result<Vec<GridPoint>> {
        let mut out = Vec::new();
        for n in self.family.sizes() {
            if let GraphFamily::Gnp { .. } = self.family {
                for (param, p) in self.p_grid.resolve(n)? {
                    out.push(GridPoint { index: out.len(), n, p: Some(p), param: Some(param) });
                }
            } else {
                out.push(GridPoint { index: out.len(), n, p: None, param: None });
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub index: usize,
    pub n: usize,
    /// Edge probability, for `G(n, p)` points.
    pub p: Option<f64>,
    /// Preset parameter (`eps`, `beta`, `c`) or `p` itself.
    pub param: Option<f64>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at grid point `point`.
pub fn trial_seed(master_seed: u64, point: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ point) ^ trial)
}

/// `(graph_seed, game_seed)` for a trial seed.
pub fn split_seed(seed: u64) -> (u64, u64) {
    (splitmix64(seed ^ 0x6772_6170_6800), splitmix64(seed ^ 0x6761_6d65_0000))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum SkipReason {
    ComponentCap { size: usize },
    DegreeCap { degree: usize },
    CountOverflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub point: usize,
    pub trial: u64,
    /// Exact count in `FullCount` mode.
    pub z: Option<u64>,
    /// Whether an equilibrium exists; `None` when skipped.
    pub exists: Option<bool>,
    pub skipped: Option<SkipReason>,
    pub nanos: u64,
}

pub fn build_graph(config: &SweepConfig, point: &GridPoint, graph_seed: u64) -> Result<Graph> {
    let n = point.n;
    Ok(match &config.family {
        GraphFamily::Gnp { .. } => {
            let p = point.p.expect("G(n, p) points carry p");
            gen_gnp(&GnpParams::new(n, p, config.graph_seed.unwrap_or(graph_seed))?)?
        }
        GraphFamily::Complete { .. } => gen_complete(n),
        GraphFamily::Path { .. } => gen_path(n),
        GraphFamily::Empty { .. } => gen_empty(n),
        GraphFamily::Grid { rows, cols } => gen_grid(*rows, *cols),
        GraphFamily::FromFile { graph, .. } => graph.clone(),
    })
}

/// One trial: graph (for random families), game, then the count or the
/// existence test. Cap violations are recorded as skips.
pub fn run_trial(config: &SweepConfig, point: &GridPoint, graph_seed: u64, game_seed: u64) -> Result<TrialRecord> {
    let start = config.timing.then(Instant::now);
    let mut record = TrialRecord { point: point.index, trial: 0, z: None, exists: None, skipped: None, nanos: 0 };
    let g = build_graph(config, point, graph_seed)?;
    let solver = PneSolver::new(&g).ok().filter(|s| s.largest_component() <= config.caps.max_component);
    let degree = g.max_degree();
    match solver {
        None => {
            let size = crate::graph::connected_components(&g).iter().map(Vec::len).max().unwrap_or(0);
            record.skipped = Some(SkipReason::ComponentCap { size });
        }
        Some(_) if degree > MAX_TABLE_DEGREE => record.skipped = Some(SkipReason::DegreeCap { degree }),
        Some(solver) => {
            let game = sample_game(&g, game_seed)?;
            match config.mode {
                CountMode::Exists => record.exists = Some(solver.exists(&game)),
                CountMode::FullCount => match solver.count(&game, &PneOptions::count_only()) {
                    Ok(r) => {
                        record.z = Some(r.count);
                        record.exists = Some(r.count > 0);
                    }
                    Err(Error::CountOverflow) => record.skipped = Some(SkipReason::CountOverflow),
                    Err(e) => return Err(e),
                },
            }
        }
    }
    if let Some(t) = start {
        record.nanos = t.elapsed().as_nanos() as u64;
    }
    Ok(record)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub family: String,
    pub n: usize,
    pub p: Option<f64>,
    pub param: Option<f64>,
    pub trials: u64,
    pub skips: u64,
    /// Completed trials with at least one equilibrium.
    pub pne_count: u64,
    /// `pne_count / (trials - skips)`.
    pub p_pne: Option<f64>,
    pub wilson_lo: Option<f64>,
    pub wilson_hi: Option<f64>,
    /// `FullCount` only.
    pub histogram: Option<Histogram>,
    pub mean_z: Option<f64>,
    pub mean_z_std_error: Option<f64>,
    pub tv_poisson1: Option<f64>,
    pub tv_sampling_error: Option<f64>,
    /// Summed trial time, when timing is on.
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rng: String,
    pub master_seed: u64,
    pub config: SweepConfig,
    pub points: Vec<PointResult>,
}

pub const CSV_HEADER: &str = "family,n,p,trials,skips,pne_count,mean_Z,tv_poisson1,wilson_lo,wilson_hi,seconds";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.family,
                r.n,
                opt(r.p),
                r.trials,
                r.skips,
                r.pne_count,
                opt(r.mean_z),
                opt(r.tv_poisson1),
                opt(r.wilson_lo),
                opt(r.wilson_hi),
                opt(r.seconds)
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep results serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }
}

/// Folds one point's trial records, in trial order, into its summary.
pub fn aggregate(config: &SweepConfig, point: &GridPoint, records: &[TrialRecord]) -> Result<PointResult> {
    let skips = records.iter().filter(|r| r.skipped.is_some()).count() as u64;
    let done = records.len() as u64 - skips;
    let pne_count = records.iter().filter(|r| r.exists == Some(true)).count() as u64;
    let (wilson_lo, wilson_hi) = if done > 0 {
        let (lo, hi) = wilson_interval(pne_count, done, config.wilson_z)?;
        (Some(lo), Some(hi))
    } else {
        (None, None)
    };
    let histogram: Option<Histogram> =
        (config.mode == CountMode::FullCount).then(|| records.iter().filter_map(|r| r.z).collect());
    let nonempty = histogram.as_ref().filter(|h| !h.is_empty());
    Ok(PointResult {
        family: config.family.name().to_string(),
        n: point.n,
        p: point.p,
        param: point.param,
        trials: records.len() as u64,
        skips,
        pne_count,
        p_pne: (done > 0).then(|| pne_count as f64 / done as f64),
        wilson_lo,
        wilson_hi,
        mean_z: nonempty.and_then(Histogram::mean),
        mean_z_std_error: nonempty.and_then(Histogram::std_error),
        tv_poisson1: nonempty.map(|h| tv_distance(h, 1.0)).transpose()?,
        tv_sampling_error: nonempty.map(tv_sampling_error),
        histogram,
        seconds: config.timing.then(|| records.iter().map(|r| r.nanos as f64).sum::<f64>() * 1e-9),
    })
}

/// Runs every trial of every grid point and aggregates per point.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let points = config.points()?;
    let jobs: Vec<(usize, u64)> = points.iter().flat_map(|pt| (0..config.trials).map(move |t| (pt.index, t))).collect();
    let run = || -> Result<Vec<TrialRecord>> {
        jobs.par_iter()
            .map(|&(pi, t)| {
                let (gs, ms) = split_seed(trial_seed(config.master_seed, pi as u64, t));
                run_trial(config, &points[pi], gs, ms).map(|r| TrialRecord { trial: t, ..r })
            })
            .collect()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::InvalidParam(format!("thread pool: {e}")))?;
    let records = pool.install(run)?;
    let per_point = config.trials as usize;
    let results = points
        .iter()
        .map(|pt| aggregate(config, pt, &records[pt.index * per_point..(pt.index + 1) * per_point]))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        rng: RNG_NAME.to_string(),
        master_seed: config.master_seed,
        config: config.clone(),
        points: results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn seeds_do_not_collide() {
        let mut seen = HashSet::new();
        for master in [0u64, 1, 0xdead_beef] {
            for point in 0..64 {
                for trial in 0..2000 {
                    assert!(seen.insert(trial_seed(master, point, trial)));
                }
            }
        }
        let (a, b) = split_seed(42);
        assert_ne!(a, b);
    }

    #[test]
    fn preset_grids() {
        let high = PGrid::high().resolve(14).unwrap();
        assert!((high[0].1 - 3.0 * 14f64.ln() / 14.0).abs() < 1e-15);
        assert_eq!(PGrid::medium().resolve(400).unwrap(), vec![(0.5, 0.5 / 400.0)]);
        let low = PGrid::Low { c: vec![2.0, 8.0] }.resolve(50).unwrap();
        assert_eq!(low[1], (8.0, 8.0 / 2500.0));
        assert!(PGrid::High { eps: vec![1.0] }.resolve(2).is_err());
        assert!(PGrid::Values { p: vec![] }.resolve(5).is_err());
    }

    #[test]
    fn trial_examples() {
        let point = GridPoint { index: 0, n: 5, p: Some(0.0), param: Some(0.0) };
        let cfg = SweepConfig::new(
            GraphFamily::Gnp { n: vec![5] },
            PGrid::Values { p: vec![0.0] },
            1,
            0,
            CountMode::FullCount,
        );
        for s in 0..20 {
            assert_eq!(run_trial(&cfg, &point, s, s + 1).unwrap().z, Some(1));
        }

        let k3 = SweepConfig::new(GraphFamily::Complete { n: vec![3] }, PGrid::medium(), 1, 0, CountMode::FullCount);
        let pt = k3.points().unwrap()[0];
        let a = run_trial(&k3, &pt, 1, 77).unwrap();
        assert_eq!(a, run_trial(&k3, &pt, 1, 77).unwrap());
        assert!(a.z.unwrap() <= 8);

        let edge =
            SweepConfig::new(GraphFamily::Gnp { n: vec![2] }, PGrid::Values { p: vec![1.0] }, 1, 0, CountMode::Exists);
        let pt = edge.points().unwrap()[0];
        let zeros = (0..80_000u64).filter(|&s| run_trial(&edge, &pt, 0, s).unwrap().exists == Some(false)).count();
        let sigma = (80_000.0f64 * 0.125 * 0.875).sqrt();
        assert!((zeros as f64 - 10_000.0).abs() < 5.0 * sigma, "{zeros}");
    }

    #[test]
    fn oversize_components_are_skipped() {
        let mut cfg = SweepConfig::new(GraphFamily::Path { n: vec![12] }, PGrid::medium(), 3, 5, CountMode::FullCount);
        cfg.caps.max_component = 10;
        let res = run_sweep(&cfg).unwrap();
        let r = &res.points[0];
        assert_eq!((r.trials, r.skips, r.pne_count), (3, 3, 0));
        assert_eq!(r.histogram.as_ref().unwrap().total(), 0);
        assert_eq!(r.wilson_lo, None);
        cfg.caps.max_component = 31;
        assert!(run_sweep(&cfg).is_err());
    }

    #[test]
    fn single_trial_sweep_matches_record() {
        let cfg = SweepConfig::new(
            GraphFamily::Gnp { n: vec![9] },
            PGrid::Values { p: vec![0.3] },
            1,
            11,
            CountMode::FullCount,
        );
        let res = run_sweep(&cfg).unwrap();
        let pt = cfg.points().unwrap()[0];
        let (gs, ms) = split_seed(trial_seed(11, 0, 0));
        let rec = run_trial(&cfg, &pt, gs, ms).unwrap();
        let r = &res.points[0];
        assert_eq!(r.histogram.as_ref().unwrap().iter().collect::<Vec<_>>(), vec![(rec.z.unwrap(), 1)]);
        assert_eq!(r.pne_count, (rec.z.unwrap() > 0) as u64);
        assert_eq!(r.mean_z, Some(rec.z.unwrap() as f64));
    }

    #[test]
    fn histogram_totals_and_csv_shape() {
        let mut cfg = SweepConfig::new(
            GraphFamily::Gnp { n: vec![6, 8] },
            PGrid::Values { p: vec![0.2, 0.6] },
            300,
            3,
            CountMode::FullCount,
        );
        cfg.caps.max_component = 7;
        let res = run_sweep(&cfg).unwrap();
        assert_eq!(res.points.len(), 4);
        for r in &res.points {
            let h = r.histogram.as_ref().unwrap();
            assert_eq!(h.total(), r.trials - r.skips);
            assert_eq!(r.pne_count, h.total() - h.get(0));
        }
        let csv = res.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.lines().all(|l| l.split(',').count() == 11));
        assert_eq!(SweepResult::from_json(&res.to_json()).unwrap(), res);
    }
}
