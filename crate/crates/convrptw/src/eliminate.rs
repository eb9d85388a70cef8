//! Ejection-pool route elimination: repeatedly delete one vehicle and
//! squeeze its customers back into the rest of the fleet.
//!
//! One elimination attempt removes the vehicle with the fewest visits and
//! pushes its customers onto a LIFO ejection pool, every penalty counter
//! starting at 1.  Customers pop one at a time through three stages:
//!
//! 1. Best fully feasible insertion across all vehicles, judged by the
//!    construction score.
//! 2. Cheapest infeasible insertion by penalized cost, then a hill-climb to
//!    restore feasibility; on failure the state reverts and the penalty
//!    weight alpha adapts.
//! 3. Insertion into a seeded-random vehicle at penalty-minimizing slots,
//!    then ejection of the penalty-counter-cheapest subset (at most `k_max`
//!    customers, the newcomer included) that restores feasibility.  Ejected
//!    customers return to the pool and a distance descent diversifies the
//!    plan.
//!
//! The pool emptying commits the attempt; the wall clock expiring reverts
//! to the last committed plan.  Deterministic per-attempt budgets (pop cap,
//! consecutive-failure cap) abort hopeless attempts early so that small
//! instances finish far below the wall-clock limit and runs with the same
//! seed produce identical traces.  Externally observed solutions are always
//! feasible and the vehicle count never increases.

use crate::construct::{score_customer, ConstructionParams};
use crate::model::{schedule_route, Instance, Solution};
use crate::search::{
    adapt_alpha, day_stats, penalty, reoptimize, restore_feasibility, PenaltyParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EliminateError {
    #[error("invalid elimination parameters: {0}")]
    BadParams(&'static str),
}

/// Unassigned customers waiting for reinsertion, plus their failure counts.
#[derive(Debug, Clone, Default)]
pub struct EjectionPool {
    stack: Vec<usize>,
    p: BTreeMap<usize, u64>,
}

impl EjectionPool {
    pub fn new() -> EjectionPool {
        EjectionPool::default()
    }

    /// Pushes `v`; a first-time entry gets penalty counter 1.
    pub fn push(&mut self, v: usize) {
        self.p.entry(v).or_insert(1);
        self.stack.push(v);
    }

    pub fn pop(&mut self) -> Option<usize> {
        self.stack.pop()
    }

    pub fn len(&self) -> usize {
        self.stack.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stack.is_empty()
    }

    /// Customers currently in the pool, bottom first.
    pub fn customers(&self) -> &[usize] {
        &self.stack
    }

    /// Failure count of `v`; 1 until the first failed attempt.
    pub fn counter(&self, v: usize) -> u64 {
        self.p.get(&v).copied().unwrap_or(1)
    }

    pub fn bump(&mut self, v: usize) {
        *self.p.entry(v).or_insert(1) += 1;
    }
}

/// Tuning knobs and budgets of the elimination loop.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationParams {
    /// Largest ejection subset size.
    pub k_max: usize,
    /// Wall-clock budget for the whole elimination run.
    pub ct_max: Duration,
    pub rng_seed: u64,
    /// Scoring weights for stage-1 insertion quality.
    pub insertion: ConstructionParams,
    /// Move cap of one stage-2 feasibility hill-climb.
    pub restore_budget: usize,
    /// Pool pops allowed per elimination attempt before it aborts.
    pub pop_budget: usize,
    /// Consecutive aborted attempts before the run gives up early.
    pub max_failed_attempts: usize,
    /// Hard cap on stage-3 executions per attempt.
    pub stage3_cap: usize,
}

impl Default for EliminationParams {
    fn default() -> Self {
        EliminationParams {
            k_max: 3,
            ct_max: Duration::from_secs(60),
            rng_seed: 0,
            insertion: ConstructionParams::default(),
            restore_budget: 64,
            pop_budget: 1_000,
            max_failed_attempts: 8,
            stage3_cap: 1_000_000,
        }
    }
}

impl EliminationParams {
    pub fn check(&self) -> Result<(), EliminateError> {
        if self.k_max == 0 {
            return Err(EliminateError::BadParams("k_max must be at least 1"));
        }
        if self.ct_max.is_zero() {
            return Err(EliminateError::BadParams("ct_max must be positive"));
        }
        if self.pop_budget == 0 || self.max_failed_attempts == 0 || self.stage3_cap == 0 {
            return Err(EliminateError::BadParams("budgets must be at least 1"));
        }
        self.insertion.check().map_err(|_| EliminateError::BadParams("insertion params invalid"))
    }
}

/// One record of the elimination state machine, for verbose logs and tests.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    VictimSelected { vehicle_id: u32, visits: usize },
    Stage1Inserted { customer: usize, vehicle_id: u32 },
    Stage2Restored { customer: usize, vehicle_id: u32 },
    Stage2Reverted { customer: usize, alpha: f64 },
    Stage3Ejected { customer: usize, vehicle_id: u32, ejected: Vec<usize> },
    Stage3Stuck { customer: usize },
    AttemptCommitted { nv: usize },
    AttemptAborted { pops: usize },
    TimedOut,
}

/// Counters of one elimination run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EliminationStats {
    /// Vehicles actually removed (committed attempts).
    pub eliminations: usize,
    pub attempts: usize,
    pub aborted_attempts: usize,
    pub pops: usize,
    pub stage1: usize,
    pub stage2: usize,
    pub stage3: usize,
    pub timed_out: bool,
    pub elapsed: Duration,
}

// ---- victim selection ----

/// Vehicle with the least visits summed over all days; `None` when fewer
/// than two vehicles serve customers.  Ties keep the lowest index.
pub fn select_victim(solution: &Solution) -> Option<usize> {
    if solution.nv() < 2 {
        return None;
    }
    (0..solution.vehicle_count())
        .filter(|&k| !solution.vehicle(k).is_empty())
        .min_by_key(|&k| (solution.vehicle(k).visit_total(), k))
}

// ---- insertion scoring ----

/// Penalty-minimizing insertion of `v` into vehicle `k`: one slot per
/// active day, each chosen by (penalty increase, travel increase, position).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FpInsertion {
    pub positions: Vec<(usize, usize)>,
    pub d_excess: i64,
    pub d_late_dm: i64,
    pub d_dist_m: i64,
}

impl FpInsertion {
    pub fn delta_fp(&self, alpha: f64) -> f64 {
        self.d_excess as f64 + alpha * self.d_late_dm as f64 / 10.0
    }
}

pub(crate) fn fp_insertion(
    instance: &Instance,
    solution: &Solution,
    k: usize,
    v: usize,
    alpha: f64,
) -> FpInsertion {
    let mut total = FpInsertion {
        positions: Vec::new(),
        d_excess: 0,
        d_late_dm: 0,
        d_dist_m: 0,
    };
    for day in instance.active_days(v) {
        let route = solution.vehicle(k).route(day);
        let old = day_stats(instance, day, route);
        let mut best_key: Option<(f64, i64, usize)> = None;
        let mut best_delta = (0i64, 0i64, 0i64);
        let mut candidate = Vec::with_capacity(route.len() + 1);
        for p in 0..=route.len() {
            candidate.clear();
            candidate.extend_from_slice(&route[..p]);
            candidate.push(v);
            candidate.extend_from_slice(&route[p..]);
            let stats = day_stats(instance, day, &candidate);
            let d_excess = stats.excess - old.excess;
            let d_late = stats.late_dm - old.late_dm;
            let d_dist = stats.dist_m - old.dist_m;
            let pen = d_excess as f64 + alpha * d_late as f64 / 10.0;
            let key = (pen, d_dist, p);
            if best_key.as_ref().is_none_or(|b| key < *b) {
                best_key = Some(key);
                best_delta = (d_excess, d_late, d_dist);
            }
        }
        let (_, _, p) = best_key.expect("append slot always exists");
        let (d_excess, d_late, d_dist) = best_delta;
        total.positions.push((day, p));
        total.d_excess += d_excess;
        total.d_late_dm += d_late;
        total.d_dist_m += d_dist;
    }
    total
}

// ---- stages ----

/// Stage 1: commits the best fully feasible insertion, judged by the
/// construction score.  Ties keep the lowest vehicle index.
pub fn stage1_insert(
    instance: &Instance,
    solution: &mut Solution,
    v_in: usize,
    params: &ConstructionParams,
) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    let mut best_positions: Vec<(usize, usize)> = Vec::new();
    for k in 0..solution.vehicle_count() {
        if let Some(scored) = score_customer(instance, solution, k, v_in, params) {
            if best.is_none_or(|(s, _)| scored.score < s) {
                best = Some((scored.score, k));
                best_positions = scored.positions;
            }
        }
    }
    let (_, k) = best?;
    solution
        .insert_customer(instance, k, v_in, &best_positions)
        .expect("scored insertion stays valid");
    Some(k)
}

/// Stage 2: commits the penalty-minimizing insertion, then hill-climbs back
/// to feasibility.  On failure the solution reverts bit-identically and
/// alpha adapts.  Returns the hosting vehicle on success.
pub fn stage2_insert(
    instance: &Instance,
    solution: &mut Solution,
    v_in: usize,
    penalty_state: &mut PenaltyParams,
    restore_budget: usize,
) -> Option<usize> {
    let alpha = penalty_state.alpha;
    let mut best: Option<((f64, i64, usize), FpInsertion)> = None;
    for k in 0..solution.vehicle_count() {
        if solution.vehicle(k).is_empty() {
            continue;
        }
        let ins = fp_insertion(instance, solution, k, v_in, alpha);
        let key = (ins.delta_fp(alpha), ins.d_dist_m, k);
        if best.as_ref().is_none_or(|(b, _)| key < *b) {
            best = Some((key, ins));
        }
    }
    let ((_, _, k), ins) = best?;
    let snapshot = solution.clone();
    solution
        .insert_customer(instance, k, v_in, &ins.positions)
        .expect("penalty-scored insertion stays valid");
    if restore_feasibility(instance, solution, alpha, restore_budget) {
        return Some(k);
    }
    let failed = penalty(instance, solution, alpha);
    penalty_state.alpha = adapt_alpha(&failed, penalty_state);
    *solution = snapshot;
    None
}

/// Outcome of a committed stage-3 ejection.
#[derive(Debug, Clone, PartialEq)]
pub struct Ejection {
    /// Stable id of the vehicle that received `v_in`.
    pub vehicle_id: u32,
    /// Customers removed to make room, ascending ids.
    pub ejected: Vec<usize>,
}

/// Stage 3: forces `v_in` into a random vehicle and ejects the cheapest
/// feasibility-restoring subset (penalty counters, then size, then ids).
/// Ejected customers land back on the pool; a distance descent follows.
pub fn stage3_eject(
    instance: &Instance,
    solution: &mut Solution,
    v_in: usize,
    pool: &mut EjectionPool,
    params: &EliminationParams,
    alpha: f64,
    rng: &mut ChaCha8Rng,
) -> Option<Ejection> {
    pool.bump(v_in);
    let k = rng.gen_range(0..solution.vehicle_count());
    let vehicle_id = solution.vehicle(k).id();
    let ins = fp_insertion(instance, solution, k, v_in, alpha);
    solution
        .insert_customer(instance, k, v_in, &ins.positions)
        .expect("penalty-scored insertion stays valid");

    let members: Vec<usize> = solution.vehicle(k).customers().to_vec();
    let days: Vec<usize> = (0..solution.day_count()).collect();
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut subset: Vec<usize> = Vec::new();
    // depth-first enumeration of all subsets of size 1..=k_max, ascending
    // ids inside each subset
    fn visit(
        members: &[usize],
        from: usize,
        k_max: usize,
        subset: &mut Vec<usize>,
        best: &mut Option<(u64, Vec<usize>)>,
        pool: &EjectionPool,
        feasible: &dyn Fn(&[usize]) -> bool,
    ) {
        for idx in from..members.len() {
            subset.push(members[idx]);
            let p_sum: u64 = subset.iter().map(|&c| pool.counter(c)).sum();
            // counters are >= 1, so supersets cannot beat the incumbent
            let dominated = best.as_ref().is_some_and(|(b, s)| {
                p_sum > *b || (p_sum == *b && (subset.len(), subset.as_slice()) >= (s.len(), s.as_slice()))
            });
            if !dominated && feasible(subset) {
                *best = Some((p_sum, subset.clone()));
            }
            if subset.len() < k_max && !dominated {
                visit(members, idx + 1, k_max, subset, best, pool, feasible);
            }
            subset.pop();
        }
    }
    {
        let feasible = |ejected: &[usize]| -> bool {
            days.iter().all(|&day| {
                let route = solution.vehicle(k).route(day);
                let kept: Vec<usize> =
                    route.iter().copied().filter(|c| !ejected.contains(c)).collect();
                schedule_route(instance, day, &kept).feasible
            })
        };
        visit(&members, 0, params.k_max, &mut subset, &mut best, pool, &feasible);
    }

    match best {
        Some((_, ejected)) => {
            for &c in &ejected {
                solution.remove_customer(c).expect("ejected customer was assigned");
            }
            for &c in &ejected {
                pool.push(c);
            }
            solution.prune_empty_vehicles();
            reoptimize(instance, solution);
            Some(Ejection { vehicle_id, ejected })
        }
        None => {
            // unreachable in practice: ejecting v_in alone restores the
            // pre-insertion routes; kept as a safety net
            solution.remove_customer(v_in).expect("v_in was just inserted");
            pool.push(v_in);
            None
        }
    }
}

// ---- main loop ----

/// Runs route elimination until the wall clock or the failure budgets end
/// it.  The result is always feasible with at most the input's vehicles.
pub fn eliminate_routes(
    instance: &Instance,
    solution: &Solution,
    params: &EliminationParams,
) -> Result<(Solution, EliminationStats), EliminateError> {
    eliminate_routes_traced(instance, solution, params, &mut |_| {})
}

/// [`eliminate_routes`] with a callback receiving every [`TraceEvent`].
pub fn eliminate_routes_traced(
    instance: &Instance,
    solution: &Solution,
    params: &EliminationParams,
    trace: &mut dyn FnMut(TraceEvent),
) -> Result<(Solution, EliminationStats), EliminateError> {
    params.check()?;
    debug_assert!(penalty(instance, solution, 1.0).is_zero(), "input must be feasible");
    let start = Instant::now();
    let mut stats = EliminationStats::default();
    let mut committed = solution.clone();
    committed.prune_empty_vehicles();
    let mut penalty_state = PenaltyParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut failed_attempts = 0usize;

    'attempts: while committed.nv() > 1 && start.elapsed() < params.ct_max {
        let victim = select_victim(&committed).expect("two or more vehicles");
        let mut attempt = committed.clone();
        let removed = attempt.remove_vehicle(victim);
        trace(TraceEvent::VictimSelected {
            vehicle_id: removed.id(),
            visits: removed.visit_total(),
        });
        stats.attempts += 1;
        let mut pool = EjectionPool::new();
        for &c in removed.customers() {
            pool.push(c);
        }
        let mut pops = 0usize;
        let mut stage3_runs = 0usize;

        while let Some(v_in) = pool.pop() {
            if start.elapsed() >= params.ct_max {
                trace(TraceEvent::TimedOut);
                stats.timed_out = true;
                stats.elapsed = start.elapsed();
                return Ok((committed, stats));
            }
            pops += 1;
            stats.pops += 1;
            if pops > params.pop_budget {
                trace(TraceEvent::AttemptAborted { pops });
                stats.aborted_attempts += 1;
                failed_attempts += 1;
                if failed_attempts >= params.max_failed_attempts {
                    break 'attempts;
                }
                continue 'attempts;
            }
            debug_assert!(
                pool.len() + 1 + assigned_count(&attempt) == instance.customer_count(),
                "every customer is assigned or pooled"
            );

            if let Some(k) = stage1_insert(instance, &mut attempt, v_in, &params.insertion) {
                stats.stage1 += 1;
                trace(TraceEvent::Stage1Inserted {
                    customer: v_in,
                    vehicle_id: attempt.vehicle(k).id(),
                });
                continue;
            }
            if let Some(k) = stage2_insert(
                instance,
                &mut attempt,
                v_in,
                &mut penalty_state,
                params.restore_budget,
            ) {
                stats.stage2 += 1;
                trace(TraceEvent::Stage2Restored {
                    customer: v_in,
                    vehicle_id: attempt.vehicle(k).id(),
                });
                continue;
            }
            trace(TraceEvent::Stage2Reverted {
                customer: v_in,
                alpha: penalty_state.alpha,
            });
            stage3_runs += 1;
            stats.stage3 += 1;
            if stage3_runs > params.stage3_cap {
                trace(TraceEvent::AttemptAborted { pops });
                stats.aborted_attempts += 1;
                failed_attempts += 1;
                if failed_attempts >= params.max_failed_attempts {
                    break 'attempts;
                }
                continue 'attempts;
            }
            match stage3_eject(
                instance,
                &mut attempt,
                v_in,
                &mut pool,
                params,
                penalty_state.alpha,
                &mut rng,
            ) {
                Some(ejection) => {
                    trace(TraceEvent::Stage3Ejected {
                        customer: v_in,
                        vehicle_id: ejection.vehicle_id,
                        ejected: ejection.ejected,
                    });
                }
                None => trace(TraceEvent::Stage3Stuck { customer: v_in }),
            }
        }

        attempt.prune_empty_vehicles();
        debug_assert!(penalty(instance, &attempt, 1.0).is_zero());
        committed = attempt;
        failed_attempts = 0;
        stats.eliminations += 1;
        trace(TraceEvent::AttemptCommitted { nv: committed.nv() });
    }

    stats.elapsed = start.elapsed();
    Ok((committed, stats))
}

fn assigned_count(solution: &Solution) -> usize {
    solution.vehicles().iter().map(|v| v.customers().len()).sum()
}
