//! Exact pure-Nash-equilibrium counting.
//!
//! [`count_pne`] and [`exists_pne`] factor the game over connected
//! components (payoffs only couple neighbours, so the equilibrium set is
//! the product of the component equilibrium sets) and run a backtracking
//! search per component. [`count_pne_exhaustive`] walks every profile in
//! Gray-code order and is kept as the reference.

mod dependence;
mod search;

pub use dependence::{dependence_neighborhood_b0, in_b0, translate_b, ProfileSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GraphicalGame, Profile};
use crate::graph::{connected_components, Graph};
use search::ComponentPlan;

/// Largest component (or whole game, for the exhaustive scan) enumerated.
pub const ENUMERATION_MAX_VERTICES: usize = 30;

/// Default cap on stored equilibrium profiles.
pub const DEFAULT_RETENTION_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PneResult {
    /// Number of pure Nash equilibria, `Z`.
    pub count: u64,
    /// Equilibria in ascending order, when `count` fits the retention cap
    /// and `n <= 64`.
    pub profiles: Option<Vec<Profile>>,
    /// Profiles (exhaustive) or search nodes (factorised) examined.
    pub work: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PneOptions {
    /// `None` disables retention.
    pub retention_cap: Option<usize>,
}

impl Default for PneOptions {
    fn default() -> Self {
        PneOptions { retention_cap: Some(DEFAULT_RETENTION_CAP) }
    }
}

impl PneOptions {
    pub fn count_only() -> Self {
        PneOptions { retention_cap: None }
    }
}

/// Counts equilibria by visiting all `2^n` profiles in Gray-code order.
/// After each single-player flip only the flipped player and its
/// neighbours are re-examined.
pub fn count_pne_exhaustive(game: &GraphicalGame) -> Result<PneResult> {
    count_pne_exhaustive_with(game, &PneOptions::default())
}

pub fn count_pne_exhaustive_with(game: &GraphicalGame, opts: &PneOptions) -> Result<PneResult> {
    let n = game.n();
    if n > ENUMERATION_MAX_VERTICES {
        return Err(Error::size_limit("exhaustive enumeration players", ENUMERATION_MAX_VERTICES, n));
    }
    let g = game.graph();
    // For player k: the (neighbour v, bit of k in v's row) pairs.
    let influence: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|k| g.neighbors(k).iter().map(|&v| (v, g.neighbors(v).binary_search(&k).unwrap())).collect())
        .collect();

    let mut rows = vec![0usize; n];
    let mut ok: Vec<bool> = (0..n).map(|v| game.table(v).reply(0) == 0).collect();
    let mut unsatisfied = ok.iter().filter(|&&b| !b).count();
    let mut profile = 0u64;
    let mut count = 0u64;
    let mut found = Vec::new();
    let mut overflow = false;
    let mut record = |profile: u64, count: &mut u64| {
        *count += 1;
        if let Some(cap) = opts.retention_cap {
            if found.len() < cap {
                found.push(Profile(profile));
            } else {
                overflow = true;
            }
        }
    };
    if unsatisfied == 0 {
        record(profile, &mut count);
    }
    for step in 1u64..(1u64 << n) {
        let k = step.trailing_zeros() as usize;
        profile ^= 1 << k;
        // k's own action flipped with its row unchanged.
        ok[k] = !ok[k];
        if ok[k] {
            unsatisfied -= 1;
        } else {
            unsatisfied += 1;
        }
        for &(v, bit) in &influence[k] {
            rows[v] ^= 1 << bit;
            let now = game.table(v).reply(rows[v]) as u64 == (profile >> v) & 1;
            if now != ok[v] {
                ok[v] = now;
                if now {
                    unsatisfied -= 1;
                } else {
                    unsatisfied += 1;
                }
            }
        }
        if unsatisfied == 0 {
            record(profile, &mut count);
        }
    }
    let profiles = match (opts.retention_cap, overflow) {
        (Some(_), false) => {
            found.sort_unstable();
            Some(found)
        }
        _ => None,
    };
    Ok(PneResult { count, profiles, work: 1u64 << n })
}

/// Per-graph search plans, reusable across every game drawn on the graph.
#[derive(Debug, Clone)]
pub struct PneSolver {
    n: usize,
    /// Singleton components: always exactly one equilibrium.
    isolated: Vec<usize>,
    plans: Vec<ComponentPlan>,
}

impl PneSolver {
    /// Fails with [`Error::SizeLimitExceeded`] naming the first component
    /// larger than [`ENUMERATION_MAX_VERTICES`].
    pub fn new(g: &Graph) -> Result<Self> {
        let mut isolated = Vec::new();
        let mut plans = Vec::new();
        for comp in connected_components(g) {
            if comp.len() > ENUMERATION_MAX_VERTICES {
                return Err(Error::size_limit(
                    format!("component containing player {}", comp[0] + 1),
                    ENUMERATION_MAX_VERTICES,
                    comp.len(),
                ));
            }
            if comp.len() == 1 {
                isolated.push(comp[0]);
            } else {
                plans.push(ComponentPlan::new(g, comp));
            }
        }
        Ok(PneSolver { n: g.n(), isolated, plans })
    }

    pub fn largest_component(&self) -> usize {
        self.plans.iter().map(ComponentPlan::len).max().unwrap_or(1)
    }

    pub fn count(&self, game: &GraphicalGame, opts: &PneOptions) -> Result<PneResult> {
        debug_assert_eq!(game.n(), self.n);
        let retain = opts.retention_cap.filter(|_| self.n <= 64);
        let mut count = 1u64;
        let mut work = self.isolated.len() as u64;
        // Per component: global-bit profiles of its equilibria.
        let mut parts: Option<Vec<Vec<u64>>> = retain.map(|_| Vec::new());
        for plan in &self.plans {
            let out = plan.search(game, u64::MAX, retain);
            work += out.work;
            count = count.checked_mul(out.count).ok_or(Error::CountOverflow)?;
            match (&mut parts, out.found) {
                (Some(parts), Some(local)) => parts.push(
                    local
                        .into_iter()
                        .map(|sigma| {
                            plan.vertices.iter().enumerate().fold(0u64, |acc, (i, &v)| acc | (((sigma >> i) & 1) << v))
                        })
                        .collect(),
                ),
                _ => parts = None,
            }
        }

        let profiles = match (parts, retain) {
            (Some(parts), Some(cap)) if count as u128 <= cap as u128 => {
                let base = self.isolated.iter().fold(0u64, |acc, &v| acc | ((game.table(v).reply(0) as u64) << v));
                let mut all = vec![base];
                for part in parts {
                    all = all.iter().flat_map(|&a| part.iter().map(move |&b| a | b)).collect();
                }
                let mut all: Vec<Profile> = all.into_iter().map(Profile).collect();
                all.sort_unstable();
                Some(all)
            }
            _ => None,
        };
        Ok(PneResult { count, profiles, work })
    }

    /// Stops at the first component without an equilibrium.
    pub fn exists(&self, game: &GraphicalGame) -> bool {
        debug_assert_eq!(game.n(), self.n);
        self.plans.iter().all(|plan| plan.search(game, 1, None).count > 0)
    }
}

/// Equilibrium count as the product of per-component counts.
pub fn count_pne(game: &GraphicalGame) -> Result<PneResult> {
    PneSolver::new(game.graph())?.count(game, &PneOptions::default())
}

pub fn count_pne_with(game: &GraphicalGame, opts: &PneOptions) -> Result<PneResult> {
    PneSolver::new(game.graph())?.count(game, opts)
}

pub fn exists_pne(game: &GraphicalGame) -> Result<bool> {
    Ok(PneSolver::new(game.graph())?.exists(game))
}
