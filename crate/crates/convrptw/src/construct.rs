//! Initial solution construction with a multi-period insertion heuristic.
//!
//! Vehicles are opened one at a time.  Each starts from a seed customer
//! (farthest from the depot, or earliest window close), then repeatedly
//! receives the unrouted customer with the best insertion score until
//! nobody fits, at which point the next vehicle opens.  Earlier vehicles
//! are never revisited.  A customer enters a vehicle only if a feasible
//! slot exists on every day it needs service, so each customer keeps one
//! driver across the horizon by construction.
//!
//! The per-day insertion cost blends a detour term
//! `d(prev,v) + d(v,next) - mu * d(prev,next)` with the push-forward of the
//! successor's service start, weighted `alpha1` / `alpha2`.  The cross-day
//! score subtracts `lambda * d(depot,v)` per day and averages over the days
//! the customer needs service; lower is better.  Scores are recomputed
//! against the current routes after every committed insertion.

use crate::model::{check_insertion, schedule_route, Instance, Solution, DEPOT};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("invalid construction parameters: {0}")]
    BadParams(&'static str),
    #[error("customer {customer} cannot be served alone on day {day}")]
    SingletonInfeasible { customer: usize, day: usize },
}

/// How the first customer of a fresh vehicle is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedRule {
    /// Unrouted customer farthest from the depot (criterion 1).
    #[default]
    Farthest,
    /// Unrouted customer whose time window closes earliest (criterion 2).
    EarliestClose,
}

impl SeedRule {
    /// Maps the conventional criterion codes 1 and 2.
    pub fn from_code(ic: u8) -> Option<SeedRule> {
        match ic {
            1 => Some(SeedRule::Farthest),
            2 => Some(SeedRule::EarliestClose),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            SeedRule::Farthest => 1,
            SeedRule::EarliestClose => 2,
        }
    }
}

/// Tuning knobs of the insertion heuristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstructionParams {
    pub seed_rule: SeedRule,
    /// Weight of the saved direct arc in the detour term.
    pub mu: f64,
    /// Reward per unit of depot distance in the cross-day score.
    pub lambda: f64,
    /// Weight of the detour term; `alpha1 + alpha2 = 1`.
    pub alpha1: f64,
    /// Weight of the push-forward term.
    pub alpha2: f64,
}

impl Default for ConstructionParams {
    fn default() -> Self {
        ConstructionParams {
            seed_rule: SeedRule::Farthest,
            mu: 1.0,
            lambda: 2.0,
            alpha1: 0.5,
            alpha2: 0.5,
        }
    }
}

impl ConstructionParams {
    pub fn check(&self) -> Result<(), ConstructError> {
        let nums = [self.mu, self.lambda, self.alpha1, self.alpha2];
        if nums.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(ConstructError::BadParams(
                "mu, lambda, alpha1 and alpha2 must be finite and nonnegative",
            ));
        }
        if (self.alpha1 + self.alpha2 - 1.0).abs() > 1e-9 {
            return Err(ConstructError::BadParams("alpha1 + alpha2 must equal 1"));
        }
        Ok(())
    }
}

// ---- scoring ----

/// Detour-plus-delay cost of one insertion slot.
fn slot_cost(params: &ConstructionParams, detour: f64, push_forward: f64) -> f64 {
    params.alpha1 * detour + params.alpha2 * push_forward
}

/// Best feasible slot for `v` in vehicle `k`'s route on `day`.
///
/// Returns the position index and its cost, or `None` when every slot
/// breaks a window, the depot return or the day's capacity.  Ties keep the
/// lowest position.
pub fn best_position(
    instance: &Instance,
    solution: &Solution,
    k: usize,
    day: usize,
    v: usize,
    params: &ConstructionParams,
) -> Option<(usize, f64)> {
    let route = solution.vehicle(k).route(day);
    let old = schedule_route(instance, day, route);
    let mut best: Option<(usize, f64)> = None;
    let mut candidate = Vec::with_capacity(route.len() + 1);
    for p in 0..=route.len() {
        candidate.clear();
        candidate.extend_from_slice(&route[..p]);
        candidate.push(v);
        candidate.extend_from_slice(&route[p..]);
        let sched = schedule_route(instance, day, &candidate);
        if !sched.feasible {
            continue;
        }
        let prev = if p == 0 { DEPOT } else { route[p - 1] };
        let succ = if p == route.len() { DEPOT } else { route[p] };
        let detour = instance.distance(prev, v).units() + instance.distance(v, succ).units()
            - params.mu * instance.distance(prev, succ).units();
        let push_forward = if p == route.len() {
            (sched.depot_return_time - old.depot_return_time).minutes()
        } else {
            (sched.visits[p + 1].service_start - old.visits[p].service_start).minutes()
        };
        let cost = slot_cost(params, detour, push_forward);
        if best.is_none_or(|(_, c)| cost < c) {
            best = Some((p, cost));
        }
    }
    best
}

/// A fully scored candidate insertion into one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ScoredInsertion {
    pub customer: usize,
    /// Per-day slot cost averaged over active days, minus the depot-distance
    /// reward.  Lower is better.
    pub score: f64,
    /// One `(day, position)` per active day, ascending.
    pub positions: Vec<(usize, usize)>,
}

/// Scores `v` against vehicle `k`: requires a feasible slot on every day the
/// customer needs service.
pub(crate) fn score_customer(
    instance: &Instance,
    solution: &Solution,
    k: usize,
    v: usize,
    params: &ConstructionParams,
) -> Option<ScoredInsertion> {
    let reward = params.lambda * instance.distance(DEPOT, v).units();
    let mut positions = Vec::new();
    let mut total = 0.0;
    for day in instance.active_days(v) {
        let (p, cost) = best_position(instance, solution, k, day, v, params)?;
        positions.push((day, p));
        total += cost - reward;
    }
    Some(ScoredInsertion {
        customer: v,
        score: total / positions.len() as f64,
        positions,
    })
}

/// Unrouted customer with the lowest cross-day score for vehicle `k`, or
/// `None` when nobody fits on all their days.  Ties keep the lowest id.
pub fn best_customer(
    instance: &Instance,
    solution: &Solution,
    k: usize,
    unrouted: &[usize],
    params: &ConstructionParams,
) -> Option<usize> {
    best_insertion(instance, solution, k, unrouted, params).map(|ins| ins.customer)
}

fn best_insertion(
    instance: &Instance,
    solution: &Solution,
    k: usize,
    unrouted: &[usize],
    params: &ConstructionParams,
) -> Option<ScoredInsertion> {
    let mut ordered = unrouted.to_vec();
    ordered.sort_unstable();
    let mut best: Option<ScoredInsertion> = None;
    for v in ordered {
        if let Some(ins) = score_customer(instance, solution, k, v, params) {
            if best.as_ref().is_none_or(|b| ins.score < b.score) {
                best = Some(ins);
            }
        }
    }
    best
}

/// Picks the seed for a fresh vehicle from the unrouted set.  Ties keep the
/// lowest customer id.
pub fn seed_customer(instance: &Instance, unrouted: &[usize], rule: SeedRule) -> Option<usize> {
    match rule {
        SeedRule::Farthest => unrouted
            .iter()
            .copied()
            .max_by_key(|&v| (instance.distance(DEPOT, v).metres(), std::cmp::Reverse(v))),
        SeedRule::EarliestClose => unrouted
            .iter()
            .copied()
            .min_by_key(|&v| (instance.tw_close(v).deci_minutes(), v)),
    }
}

/// Builds a feasible solution covering every customer.
///
/// Deterministic: the same instance and parameters always yield the same
/// solution.  Fails only when some customer cannot be served alone in an
/// otherwise empty vehicle.
pub fn construct(instance: &Instance, params: &ConstructionParams) -> Result<Solution, ConstructError> {
    params.check()?;
    let mut solution = Solution::new(instance.day_count());
    let mut unrouted: Vec<usize> = instance.customers().collect();
    while !unrouted.is_empty() {
        let seed = seed_customer(instance, &unrouted, params.seed_rule).expect("unrouted non-empty");
        let k = solution.add_vehicle();
        let positions: Vec<(usize, usize)> = instance.active_days(seed).map(|d| (d, 0)).collect();
        let probe = check_insertion(instance, &solution, k, seed, &positions)
            .expect("fresh vehicle accepts any seed");
        if !probe.feasible {
            let (day, _) = probe.days.iter().find(|(_, s)| !s.feasible).expect("some day failed");
            return Err(ConstructError::SingletonInfeasible {
                customer: seed,
                day: *day,
            });
        }
        solution
            .insert_customer(instance, k, seed, &positions)
            .expect("checked insertion");
        unrouted.retain(|&c| c != seed);
        while let Some(ins) = best_insertion(instance, &solution, k, &unrouted, params) {
            solution
                .insert_customer(instance, k, ins.customer, &ins.positions)
                .expect("scored insertion");
            unrouted.retain(|&c| c != ins.customer);
        }
    }
    Ok(solution)
}
