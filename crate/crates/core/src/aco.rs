//! Ant System and Max-Min Ant System for the station-anchored, turn-aware
//! coverage tour.
//!
//! Ants start at home and pick the next unvisited waypoint with probability
//! proportional to `tau^alpha * eta^beta`, where `eta` is the inverse leg
//! energy including the turn from the previous leg. Ants that get stuck, or
//! cannot fly the closing leg home, keep their partial tour and are marked
//! invalid; they never deposit.
//!
//! Sampling uses ChaCha8 seeded from the 64-bit trial seed and a plain
//! cumulative-weight inversion, so a seed reproduces a run on any platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{heuristic, tour_cost, EnergyModel, Tour};
use crate::error::{Error, Result};
use crate::routegraph::{NodeId, NodeKind, RouteGraph};

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_BETA: f64 = 3.0;
pub const DEFAULT_RHO_AS: f64 = 0.5;
pub const DEFAULT_RHO_MMAS: f64 = 0.05;
pub const DEFAULT_ITERATIONS: usize = 300;
pub const MAX_DEFAULT_ANTS: usize = 50;
/// `tau_min = tau_max / (factor * n_nodes)`.
pub const DEFAULT_TAU_MIN_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "AS")]
    AntSystem,
    #[serde(rename = "MMAS")]
    MaxMin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcoParams {
    pub variant: Variant,
    /// `None`: one ant per waypoint, capped at 50.
    pub n_ants: Option<usize>,
    pub n_iterations: usize,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    /// `None`: the cost of the greedy energy-nearest-neighbor tour.
    pub q_deposit: Option<f64>,
    pub tau_min_factor: f64,
    pub seed: u64,
}

impl AcoParams {
    pub fn new(variant: Variant, seed: u64) -> Self {
        Self {
            variant,
            n_ants: None,
            n_iterations: DEFAULT_ITERATIONS,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            rho: match variant {
                Variant::AntSystem => DEFAULT_RHO_AS,
                Variant::MaxMin => DEFAULT_RHO_MMAS,
            },
            q_deposit: None,
            tau_min_factor: DEFAULT_TAU_MIN_FACTOR,
            seed,
        }
    }

    pub fn ant_system(seed: u64) -> Self {
        Self::new(Variant::AntSystem, seed)
    }

    pub fn max_min(seed: u64) -> Self {
        Self::new(Variant::MaxMin, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ants == Some(0) {
            return Err(Error::param("n_ants", "must be >= 1"));
        }
        if self.n_iterations == 0 {
            return Err(Error::param("n_iterations", "must be >= 1"));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::param("alpha", "must be finite and >= 0"));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::param("beta", "must be finite and >= 0"));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::param("rho", "must lie in (0, 1)"));
        }
        if let Some(q) = self.q_deposit {
            if !(q.is_finite() && q > 0.0) {
                return Err(Error::param("q_deposit", "must be finite and > 0"));
            }
        }
        if !(self.tau_min_factor.is_finite() && self.tau_min_factor > 0.0) {
            return Err(Error::param("tau_min_factor", "must be finite and > 0"));
        }
        Ok(())
    }

    pub fn ants_for(&self, g: &RouteGraph) -> usize {
        self.n_ants
            .unwrap_or_else(|| g.waypoint_count().clamp(1, MAX_DEFAULT_ANTS))
    }
}

/// Symmetric per-edge trail levels over an n x n node grid. Entries for
/// absent edges are kept at zero and never read.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneMatrix {
    n: usize,
    tau: Vec<f64>,
}

impl PheromoneMatrix {
    pub fn uniform(g: &RouteGraph, level: f64) -> Self {
        let n = g.len();
        let mut tau = vec![0.0; n * n];
        for (i, j, _) in g.edges() {
            tau[i * n + j] = level;
            tau[j * n + i] = level;
        }
        Self { n, tau }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.n + j]
    }

    fn add(&mut self, i: usize, j: usize, amount: f64) {
        self.tau[i * self.n + j] += amount;
        self.tau[j * self.n + i] += amount;
    }

    fn scale(&mut self, factor: f64) {
        self.tau.iter_mut().for_each(|t| *t *= factor);
    }

    fn clamp_edges(&mut self, g: &RouteGraph, lo: f64, hi: f64) {
        for (i, j, _) in g.edges() {
            let v = self.get(i, j).clamp(lo, hi);
            self.tau[i * self.n + j] = v;
            self.tau[j * self.n + i] = v;
        }
    }

    /// Trail level on every undirected edge of `g`, in edge order.
    pub fn edge_values<'a>(&'a self, g: &'a RouteGraph) -> impl Iterator<Item = f64> + 'a {
        g.edges().map(move |(i, j, _)| self.get(i, j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvalidReason {
    /// No unvisited waypoint reachable from the current node.
    DeadEnd,
    /// All waypoints visited but the leg back home was pruned.
    MissingReturn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub tour: Tour,
    pub failure: Option<InvalidReason>,
}

#[inline]
fn pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 0.0 {
        1.0
    } else if e.fract() == 0.0 && e.abs() <= 16.0 {
        x.powi(e as i32)
    } else {
        x.powf(e)
    }
}

/// Index into `weights` picked by cumulative-weight inversion; uniform when
/// all weights vanish.
fn roulette(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return rng.gen_range(0..weights.len());
    }
    let r = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = k;
            if r < acc {
                return k;
            }
        }
    }
    last_positive
}

/// One ant's walk from home over unvisited waypoints and back.
pub fn construct_tour(
    g: &RouteGraph,
    model: &EnergyModel,
    tau: &PheromoneMatrix,
    params: &AcoParams,
    rng: &mut ChaCha8Rng,
) -> Construction {
    let home = g.home().index;
    let mut visited = vec![false; g.len()];
    let mut path = Vec::with_capacity(g.len() + 1);
    path.push(home);
    let mut prev: Option<usize> = None;
    let mut cur = home;
    let mut candidates = Vec::with_capacity(g.len());
    let mut weights = Vec::with_capacity(g.len());
    let mut failure = None;

    for _ in 0..g.waypoint_count() {
        candidates.clear();
        weights.clear();
        let here = g.pos(cur);
        let from = prev.map(|h| g.pos(h));
        for &j in g.neighbors(cur) {
            if visited[j] || g.id(j).kind != NodeKind::Waypoint {
                continue;
            }
            let d = g.leg(cur, j).unwrap();
            let eta = heuristic(model, from, here, g.pos(j), d);
            candidates.push(j);
            weights.push(pow(tau.get(cur, j), params.alpha) * pow(eta, params.beta));
        }
        if candidates.is_empty() {
            failure = Some(InvalidReason::DeadEnd);
            break;
        }
        let next = candidates[roulette(&weights, rng)];
        visited[next] = true;
        path.push(next);
        prev = Some(cur);
        cur = next;
    }
    if failure.is_none() {
        if g.has_edge(cur, home) {
            path.push(home);
        } else {
            failure = Some(InvalidReason::MissingReturn);
        }
    }
    let nodes: Vec<NodeId> = path.iter().map(|&i| g.id(i)).collect();
    let tour = if nodes.len() >= 2 {
        tour_cost(g, model, &nodes).expect("ants only walk graph edges")
    } else {
        Tour {
            nodes,
            total_distance_m: 0.0,
            total_turn_deg: 0.0,
            cost_kj: 0.0,
            is_valid: false,
        }
    };
    Construction { tour, failure }
}

/// Deterministic energy-greedy tour from home: always the unvisited
/// neighbor with the best heuristic, ties to the lower index.
pub fn greedy_tour(g: &RouteGraph, model: &EnergyModel) -> Construction {
    let home = g.home().index;
    let mut visited = vec![false; g.len()];
    let mut path = vec![home];
    let mut prev: Option<usize> = None;
    let mut cur = home;
    let mut failure = None;
    for _ in 0..g.waypoint_count() {
        let from = prev.map(|h| g.pos(h));
        let best = g
            .neighbors(cur)
            .iter()
            .copied()
            .filter(|&j| !visited[j] && g.id(j).kind == NodeKind::Waypoint)
            .map(|j| {
                let eta = heuristic(model, from, g.pos(cur), g.pos(j), g.leg(cur, j).unwrap());
                (j, eta)
            })
            .fold(None, |best: Option<(usize, f64)>, (j, eta)| match best {
                Some((_, b)) if b >= eta => best,
                _ => Some((j, eta)),
            });
        match best {
            Some((j, _)) => {
                visited[j] = true;
                path.push(j);
                prev = Some(cur);
                cur = j;
            }
            None => {
                failure = Some(InvalidReason::DeadEnd);
                break;
            }
        }
    }
    if failure.is_none() {
        if g.has_edge(cur, home) {
            path.push(home);
        } else {
            failure = Some(InvalidReason::MissingReturn);
        }
    }
    let nodes: Vec<NodeId> = path.iter().map(|&i| g.id(i)).collect();
    let tour = tour_cost(g, model, &nodes).expect("greedy walks graph edges");
    Construction { tour, failure }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRun {
    pub best_tour: Tour,
    /// Best valid cost found up to and including each iteration; `None`
    /// until the first valid tour appears.
    pub best_cost_history: Vec<Option<f64>>,
    pub valid: bool,
    pub seed: u64,
    pub iterations_executed: usize,
    /// Why the reported tour is invalid, if it is.
    pub failure: Option<InvalidReason>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntOutcome {
    pub cost_kj: f64,
    pub valid: bool,
    pub legs: usize,
}

/// State after one iteration's pheromone update, for instrumentation.
#[derive(Debug)]
pub struct IterationEvent<'a> {
    pub iteration: usize,
    pub ants: &'a [AntOutcome],
    /// Trails before evaporation of this iteration.
    pub previous: &'a PheromoneMatrix,
    pub pheromone: &'a PheromoneMatrix,
    /// Total amount added to undirected edges this iteration.
    pub deposited: f64,
    pub rho: f64,
    /// MMAS trail bounds `(tau_min, tau_max)` in force after the update.
    pub bounds: Option<(f64, f64)>,
}

pub fn solve(g: &RouteGraph, model: &EnergyModel, params: &AcoParams) -> Result<SolverRun> {
    run(g, model, params, None)
}

/// [`solve`] with a callback after every pheromone update.
pub fn solve_observed(
    g: &RouteGraph,
    model: &EnergyModel,
    params: &AcoParams,
    mut observer: impl FnMut(&IterationEvent<'_>),
) -> Result<SolverRun> {
    run(g, model, params, Some(&mut observer))
}

fn better(candidate: &Construction, incumbent: &Option<Construction>) -> bool {
    match incumbent {
        None => true,
        Some(best) => match (candidate.tour.is_valid, best.tour.is_valid) {
            (true, false) => true,
            (false, true) => false,
            _ => candidate.tour.cost_kj < best.tour.cost_kj,
        },
    }
}

fn deposit_tour(tau: &mut PheromoneMatrix, tour: &Tour, amount: f64) -> f64 {
    for w in tour.nodes.windows(2) {
        tau.add(w[0].index, w[1].index, amount);
    }
    amount * (tour.nodes.len() - 1) as f64
}

#[allow(clippy::type_complexity)]
fn run(
    g: &RouteGraph,
    model: &EnergyModel,
    params: &AcoParams,
    mut observer: Option<&mut dyn FnMut(&IterationEvent<'_>)>,
) -> Result<SolverRun> {
    params.validate()?;
    let n_ants = params.ants_for(g);
    let greedy = greedy_tour(g, model);
    let reference_cost = greedy.tour.cost_kj;
    let q = params.q_deposit.unwrap_or(reference_cost);
    let rho = params.rho;

    let mmas_bounds = |best_cost: f64| {
        let hi = q / (rho * best_cost);
        (hi / (params.tau_min_factor * g.len() as f64), hi)
    };
    let mut bounds = match params.variant {
        Variant::AntSystem => None,
        Variant::MaxMin => Some(mmas_bounds(reference_cost)),
    };
    let mut tau = match bounds {
        Some((_, hi)) => PheromoneMatrix::uniform(g, hi),
        None => PheromoneMatrix::uniform(g, n_ants as f64 * q / reference_cost),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<Construction> = None;
    let mut history = Vec::with_capacity(params.n_iterations);
    let mut ants: Vec<Construction> = Vec::with_capacity(n_ants);
    let mut outcomes = Vec::with_capacity(n_ants);

    for iteration in 0..params.n_iterations {
        ants.clear();
        for _ in 0..n_ants {
            ants.push(construct_tour(g, model, &tau, params, &mut rng));
        }
        for ant in &ants {
            if better(ant, &best) {
                best = Some(ant.clone());
            }
        }

        let previous = observer.as_ref().map(|_| tau.clone());
        tau.scale(1.0 - rho);
        let mut deposited = 0.0;
        match params.variant {
            Variant::AntSystem => {
                for ant in ants.iter().filter(|a| a.tour.is_valid) {
                    deposited += deposit_tour(&mut tau, &ant.tour, q / ant.tour.cost_kj);
                }
            }
            Variant::MaxMin => {
                if let Some(b) = best.as_ref().filter(|b| b.tour.is_valid) {
                    bounds = Some(mmas_bounds(b.tour.cost_kj));
                    deposited += deposit_tour(&mut tau, &b.tour, q / b.tour.cost_kj);
                }
                let (lo, hi) = bounds.expect("MMAS always has bounds");
                tau.clamp_edges(g, lo, hi);
            }
        }

        history.push(
            best.as_ref()
                .filter(|b| b.tour.is_valid)
                .map(|b| b.tour.cost_kj),
        );

        if let (Some(obs), Some(previous)) = (observer.as_mut(), previous.as_ref()) {
            outcomes.clear();
            outcomes.extend(ants.iter().map(|a| AntOutcome {
                cost_kj: a.tour.cost_kj,
                valid: a.tour.is_valid,
                legs: a.tour.nodes.len().saturating_sub(1),
            }));
            obs(&IterationEvent {
                iteration,
                ants: &outcomes,
                previous,
                pheromone: &tau,
                deposited,
                rho,
                bounds,
            });
        }
    }

    let best = best.expect("at least one ant ran");
    Ok(SolverRun {
        valid: best.tour.is_valid,
        failure: best.failure,
        best_tour: best.tour,
        best_cost_history: history,
        seed: params.seed,
        iterations_executed: params.n_iterations,
    })
}
