//! Exhaustive search for iterative roots `gⁿ = f` of finite endofunctions.
//!
//! Depth-first assignment of `g` in index order, values tried in increasing
//! order, so the first complete assignment is the lexicographically smallest
//! root. Two propagators prune the tree; both are implied by `gⁿ = f`, so they
//! never discard a root:
//!
//! * commutation: `g(f(x)) = f(g(x))`, so fixing `g(x) = y` forces `g(f(x)) = f(y)`;
//! * chains: once `g^{n-1}(p) = z` is known, `g(z)` is forced to `f(p)`; a
//!   closed chain of length `n` must end at `f(p)`.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::endo::Endofunction;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

const UNSET: usize = usize::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("root order must be at least 2, got {0}")]
    InvalidOrder(u32),
    #[error("search budget of {budget} nodes exceeded after exploring {explored}")]
    BudgetExceeded { explored: u64, budget: u64 },
    #[error("size mismatch: f has {f} points, g has {g}")]
    SizeMismatch { f: usize, g: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    #[default]
    FirstWitness,
    /// Counts every root. Exponential; meant for small inputs.
    CountAll,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootQuery {
    pub f: Endofunction,
    pub order: u32,
    pub mode: SearchMode,
    pub budget: u64,
    /// Split the top-level branching across threads. Preserves the
    /// found/none answer but not which witness is returned.
    pub parallel: bool,
}

impl RootQuery {
    pub fn new(f: Endofunction, order: u32) -> Self {
        RootQuery { f, order, mode: SearchMode::FirstWitness, budget: DEFAULT_BUDGET, parallel: false }
    }

    pub fn count_all(mut self) -> Self {
        self.mode = SearchMode::CountAll;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootStatus {
    Found,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootResult {
    pub status: RootStatus,
    pub witness: Option<Endofunction>,
    /// Search nodes expanded.
    pub explored: u64,
    /// Number of roots, in count-all mode.
    pub count: Option<u64>,
}

/// `true` iff `gⁿ = f` pointwise.
pub fn verify_root(f: &Endofunction, g: &Endofunction, n: u32) -> Result<bool, RootError> {
    if f.len() != g.len() {
        return Err(RootError::SizeMismatch { f: f.len(), g: g.len() });
    }
    Ok(g.iterate(u64::from(n)) == *f)
}

pub fn find_root(q: &RootQuery) -> Result<RootResult, RootError> {
    if q.order < 2 {
        return Err(RootError::InvalidOrder(q.order));
    }
    let shared = Shared { explored: AtomicU64::new(0), stop: AtomicBool::new(false), budget: q.budget };
    let result = if q.parallel && q.f.len() > 1 {
        search_parallel(q, &shared)
    } else {
        let mut s = Search::new(q, &shared);
        s.run().map(|()| s.into_result())
    }?;
    if let Some(w) = &result.witness {
        debug_assert_eq!(w.iterate(u64::from(q.order)), q.f);
    }
    Ok(result)
}

/// Outcome of [`has_root_up_to`] for one order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderReport {
    pub order: u32,
    pub outcome: Result<RootResult, RootError>,
}

/// Runs [`find_root`] for every order in `2..=n_max`.
pub fn has_root_up_to(f: &Endofunction, n_max: u32, budget: u64) -> Result<Vec<OrderReport>, RootError> {
    if n_max < 2 {
        return Err(RootError::InvalidOrder(n_max));
    }
    Ok((2..=n_max)
        .map(|order| OrderReport { order, outcome: find_root(&RootQuery::new(f.clone(), order).with_budget(budget)) })
        .collect())
}

struct Shared {
    explored: AtomicU64,
    stop: AtomicBool,
    budget: u64,
}

struct Search<'a> {
    f: &'a [usize],
    order: usize,
    mode: SearchMode,
    g: Vec<usize>,
    trail: Vec<usize>,
    queue: Vec<(usize, usize)>,
    shared: &'a Shared,
    witness: Option<Vec<usize>>,
    count: u64,
}

enum Flow {
    Continue,
    Stop,
}

impl<'a> Search<'a> {
    fn new(q: &'a RootQuery, shared: &'a Shared) -> Self {
        let n = q.f.len();
        Search {
            f: q.f.table(),
            order: q.order as usize,
            mode: q.mode,
            g: vec![UNSET; n],
            trail: Vec::with_capacity(n),
            queue: Vec::new(),
            shared,
            witness: None,
            count: 0,
        }
    }

    fn run(&mut self) -> Result<(), RootError> {
        self.dfs().map(|_| ())
    }

    fn into_result(self) -> RootResult {
        let explored = self.shared.explored.load(Ordering::Relaxed);
        let found = match self.mode {
            SearchMode::FirstWitness => self.witness.is_some(),
            SearchMode::CountAll => self.count > 0,
        };
        RootResult {
            status: if found { RootStatus::Found } else { RootStatus::None },
            witness: self.witness.map(|t| Endofunction::new(t).expect("search assigns in range")),
            explored,
            count: (self.mode == SearchMode::CountAll).then_some(self.count),
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().expect("trail longer than mark");
            self.g[x] = UNSET;
        }
        self.queue.clear();
    }

    /// Assigns `g(x) = y` and propagates to a fixpoint. `false` on conflict.
    fn assign(&mut self, x: usize, y: usize) -> bool {
        self.queue.push((x, y));
        loop {
            while let Some((x, y)) = self.queue.pop() {
                let cur = self.g[x];
                if cur != UNSET {
                    if cur != y {
                        return false;
                    }
                    continue;
                }
                self.g[x] = y;
                self.trail.push(x);
                self.queue.push((self.f[x], self.f[y]));
            }
            for p in 0..self.g.len() {
                let mut z = p;
                let mut steps = 0;
                while steps < self.order && self.g[z] != UNSET {
                    z = self.g[z];
                    steps += 1;
                }
                if steps == self.order {
                    if z != self.f[p] {
                        return false;
                    }
                } else if steps + 1 == self.order {
                    self.queue.push((z, self.f[p]));
                }
            }
            if self.queue.is_empty() {
                return true;
            }
        }
    }

    fn tick(&self) -> Result<(), RootError> {
        let explored = self.shared.explored.fetch_add(1, Ordering::Relaxed) + 1;
        if explored > self.shared.budget {
            return Err(RootError::BudgetExceeded { explored, budget: self.shared.budget });
        }
        Ok(())
    }

    fn dfs(&mut self) -> Result<Flow, RootError> {
        if self.shared.stop.load(Ordering::Relaxed) {
            return Ok(Flow::Stop);
        }
        let Some(x) = self.g.iter().position(|&v| v == UNSET) else {
            return Ok(self.record_solution());
        };
        for y in 0..self.g.len() {
            self.tick()?;
            let mark = self.trail.len();
            if self.assign(x, y) {
                if let Flow::Stop = self.dfs()? {
                    self.undo_to(mark);
                    return Ok(Flow::Stop);
                }
            }
            self.undo_to(mark);
        }
        Ok(Flow::Continue)
    }

    fn record_solution(&mut self) -> Flow {
        match self.mode {
            SearchMode::FirstWitness => {
                self.witness = Some(self.g.clone());
                Flow::Stop
            }
            SearchMode::CountAll => {
                self.count += 1;
                Flow::Continue
            }
        }
    }
}

/// One worker's witness and root count.
type WorkerOutcome = Result<(Option<Vec<usize>>, u64), RootError>;

fn search_parallel(q: &RootQuery, shared: &Shared) -> Result<RootResult, RootError> {
    let n = q.f.len();
    let workers = std::thread::available_parallelism().map_or(2, |p| p.get()).min(n);
    let outcomes: Vec<WorkerOutcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let mut witness = None;
                    let mut count = 0u64;
                    for y in (w..n).step_by(workers) {
                        let mut s = Search::new(q, shared);
                        s.tick()?;
                        if !s.assign(0, y) {
                            continue;
                        }
                        s.dfs()?;
                        count += s.count;
                        if let Some(t) = s.witness.take() {
                            witness = Some(t);
                            shared.stop.store(true, Ordering::Relaxed);
                            break;
                        }
                    }
                    Ok((witness, count))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
    });

    let mut witness = None;
    let mut count = 0u64;
    let mut budget_error = None;
    for o in outcomes {
        match o {
            Ok((w, c)) => {
                count += c;
                if witness.is_none() {
                    witness = w;
                }
            }
            Err(e) => budget_error = Some(e),
        }
    }
    let found = match q.mode {
        SearchMode::FirstWitness => witness.is_some(),
        SearchMode::CountAll => count > 0,
    };
    if let (Some(e), false) = (budget_error.clone(), found && q.mode == SearchMode::FirstWitness) {
        return Err(e);
    }
    Ok(RootResult {
        status: if found { RootStatus::Found } else { RootStatus::None },
        witness: witness.map(|t| Endofunction::new(t).expect("search assigns in range")),
        explored: shared.explored.load(Ordering::Relaxed),
        count: (q.mode == SearchMode::CountAll).then_some(count),
    })
}
