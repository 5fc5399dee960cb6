//! Backtracking search over one connected component.
//!
//! A player whose neighbours are all assigned has exactly one admissible
//! action (its best reply), so it is set rather than branched on. Every
//! branched player is checked as soon as its closed neighbourhood is
//! assigned. The step order is fixed per graph and reused for every game
//! drawn on it.

use crate::game::{BestResponseTable, GraphicalGame};
use crate::graph::Graph;

#[derive(Debug, Clone)]
struct Step {
    vertex: u32,
    forced: bool,
    /// Players whose closed neighbourhood is complete after this step.
    checks: Vec<u32>,
}

#[derive(Debug, Clone)]
pub(crate) struct ComponentPlan {
    /// Global vertex ids, ascending; local id `i` is `vertices[i]`.
    pub(crate) vertices: Vec<usize>,
    nbrs: Vec<Vec<u32>>,
    steps: Vec<Step>,
}

impl ComponentPlan {
    /// `vertices` must be a sorted connected vertex set of at most 64 players.
    pub(crate) fn new(g: &Graph, vertices: Vec<usize>) -> Self {
        let m = vertices.len();
        debug_assert!(m <= 64);
        let local = |w: usize| vertices.binary_search(&w).expect("neighbour outside component") as u32;
        let nbrs: Vec<Vec<u32>> =
            vertices.iter().map(|&v| g.neighbors(v).iter().map(|&w| local(w)).collect()).collect();
        let masks: Vec<u64> = nbrs.iter().map(|ns| ns.iter().fold(0u64, |acc, &w| acc | (1 << w))).collect();
        let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };

        let mut assigned = 0u64;
        let mut settled = 0u64;
        let mut steps = Vec::with_capacity(m);
        while assigned != full {
            let unassigned = full & !assigned;
            let forced = (0..m).find(|&v| unassigned & (1 << v) != 0 && masks[v] & !assigned == 0);
            let (vertex, is_forced) = match forced {
                Some(v) => (v, true),
                None => {
                    // Finish the neighbourhood that is closest to complete.
                    let target = (0..m)
                        .filter(|&t| settled & (1 << t) == 0)
                        .min_by_key(|&t| ((masks[t] & !assigned).count_ones(), t))
                        .expect("an unsettled player remains");
                    let open = masks[target] & !assigned;
                    let v = (0..m)
                        .filter(|&u| open & (1 << u) != 0)
                        .min_by_key(|&u| ((masks[u] & !assigned).count_ones(), u))
                        .expect("target has an unassigned neighbour");
                    (v, false)
                }
            };
            assigned |= 1 << vertex;
            if is_forced {
                settled |= 1 << vertex;
            }
            let mut checks = Vec::new();
            for c in 0..m {
                if settled & (1 << c) == 0 && assigned & (1 << c) != 0 && masks[c] & !assigned == 0 {
                    settled |= 1 << c;
                    checks.push(c as u32);
                }
            }
            steps.push(Step { vertex: vertex as u32, forced: is_forced, checks });
        }
        ComponentPlan { vertices, nbrs, steps }
    }

    pub(crate) fn len(&self) -> usize {
        self.vertices.len()
    }

    #[cfg(test)]
    pub(crate) fn branch_count(&self) -> usize {
        self.steps.iter().filter(|s| !s.forced).count()
    }

    /// Runs the search. `limit` stops after that many equilibria; `retain`
    /// keeps local profiles up to the given cap.
    pub(crate) fn search(&self, game: &GraphicalGame, limit: u64, retain: Option<usize>) -> SearchOutcome {
        let tables: Vec<&BestResponseTable> = self.vertices.iter().map(|&v| game.table(v)).collect();
        let mut state =
            SearchState { plan: self, tables, count: 0, work: 0, limit, retain, found: Vec::new(), overflowed: false };
        state.descend(0, 0);
        SearchOutcome {
            count: state.count,
            work: state.work,
            found: if state.overflowed { None } else { retain.map(|_| state.found) },
        }
    }
}

pub(crate) struct SearchOutcome {
    pub(crate) count: u64,
    pub(crate) work: u64,
    /// Local profiles (bit `i` = local player `i`), when retained.
    pub(crate) found: Option<Vec<u64>>,
}

struct SearchState<'a> {
    plan: &'a ComponentPlan,
    tables: Vec<&'a BestResponseTable>,
    count: u64,
    work: u64,
    limit: u64,
    retain: Option<usize>,
    found: Vec<u64>,
    overflowed: bool,
}

impl SearchState<'_> {
    #[inline]
    fn reply(&self, v: usize, sigma: u64) -> u64 {
        let row =
            self.plan.nbrs[v].iter().enumerate().fold(0usize, |r, (j, &w)| r | ((((sigma >> w) & 1) as usize) << j));
        self.tables[v].reply(row) as u64
    }

    #[inline]
    fn checks_pass(&self, checks: &[u32], sigma: u64) -> bool {
        checks.iter().all(|&c| {
            let c = c as usize;
            self.reply(c, sigma) == (sigma >> c) & 1
        })
    }

    fn descend(&mut self, depth: usize, sigma: u64) {
        if depth == self.plan.steps.len() {
            self.count += 1;
            if let Some(cap) = self.retain {
                if self.found.len() < cap {
                    self.found.push(sigma);
                } else {
                    self.overflowed = true;
                }
            }
            return;
        }
        let step = &self.plan.steps[depth];
        let v = step.vertex as usize;
        if step.forced {
            self.work += 1;
            let next = sigma | (self.reply(v, sigma) << v);
            if self.checks_pass(&step.checks, next) {
                self.descend(depth + 1, next);
            }
        } else {
            for bit in 0..2u64 {
                if self.count >= self.limit {
                    return;
                }
                self.work += 1;
                let next = sigma | (bit << v);
                if self.checks_pass(&step.checks, next) {
                    self.descend(depth + 1, next);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::sample_game;
    use crate::graph::{gen_complete, gen_grid, gen_path};

    #[test]
    fn path_search_is_linear() {
        let g = gen_path(30);
        let plan = ComponentPlan::new(&g, (0..30).collect());
        let mut work = 0;
        for seed in 0..200 {
            let game = sample_game(&g, seed).unwrap();
            work += plan.search(&game, u64::MAX, None).work;
        }
        // each branch keeps one value on average, so about 2 nodes per player
        assert!(work / 200 < 8 * 30, "{}", work / 200);
    }

    #[test]
    fn plans_assign_every_player_once() {
        for g in [gen_complete(7), gen_grid(3, 4), gen_path(9)] {
            let plan = ComponentPlan::new(&g, (0..g.n()).collect());
            let mut seen: Vec<u32> = plan.steps.iter().map(|s| s.vertex).collect();
            seen.sort_unstable();
            assert_eq!(seen, (0..g.n() as u32).collect::<Vec<_>>());
            let checked: usize = plan.steps.iter().map(|s| s.checks.len()).sum();
            let forced = plan.steps.iter().filter(|s| s.forced).count();
            assert_eq!(checked + forced, g.n());
        }
    }

    #[test]
    fn complete_graph_forces_the_last_player() {
        let g = gen_complete(6);
        let plan = ComponentPlan::new(&g, (0..6).collect());
        assert_eq!(plan.branch_count(), 5);
    }
}
