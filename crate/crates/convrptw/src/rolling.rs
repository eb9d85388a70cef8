//! Rolling-horizon operations: carrying a driver assignment into the next
//! planning period and building one-day plans against a base assignment.
//!
//! [`update`] keeps every customer with its previous vehicle where the new
//! period allows it, pools the rest together with the period's new
//! customers, drains the pool through the three insertion stages (opening a
//! fresh vehicle for a customer the stages cannot place), and finishes with
//! route elimination in the remaining time budget.  Its consistency metric
//! IC is the percentage of retained customers that changed vehicle.
//!
//! [`daily`] restricts an instance to one day, keeps each base vehicle's
//! active group whenever the group is still feasible, and reinserts the
//! rest through the same stages.  Its inconsistency metric is the
//! percentage of the day's visits served off the base assignment.
//!
//! Customers correspond across periods by id: id v in the previous plan and
//! id v in the new instance are the same customer.  Ids past the new
//! instance's range count as dropped; ids without a previous assignment
//! count as fresh.

use crate::construct::{construct, ConstructError};
use crate::eliminate::{
    eliminate_routes, stage1_insert, stage2_insert, stage3_eject, EjectionPool, EliminateError,
    EliminationParams, EliminationStats,
};
use crate::model::{Instance, InstanceData, Solution, DEPOT};
use crate::oracle::feasible_route_order;
use crate::search::{day_stats, penalty, PenaltyParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Largest group repaired by exhaustive removal-subset search; bigger
/// groups fall back to greedily dropping the largest total demand.
const EXHAUSTIVE_GROUP: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RollingError {
    #[error("day {day} is out of range, the instance has {days} days")]
    BadDay { day: usize, days: usize },
    #[error("customer {customer} cannot be served alone within its window")]
    InfeasibleCustomer { customer: usize },
    #[error("invalid parameters: {0}")]
    BadParams(&'static str),
}

fn from_eliminate(e: EliminateError) -> RollingError {
    match e {
        EliminateError::BadParams(s) => RollingError::BadParams(s),
    }
}

fn from_construct(e: ConstructError) -> RollingError {
    match e {
        ConstructError::BadParams(s) => RollingError::BadParams(s),
        ConstructError::SingletonInfeasible { customer, .. } => {
            RollingError::InfeasibleCustomer { customer }
        }
    }
}

// ---- day restriction ----

/// One-day copy of `instance` holding the depot and the customers active on
/// `day`, renumbered contiguously.  The second return maps restricted node
/// ids back to the original ones (`ids[0]` is the depot).
pub fn restrict_to_day(
    instance: &Instance,
    day: usize,
) -> Result<(Instance, Vec<usize>), RollingError> {
    if day >= instance.day_count() {
        return Err(RollingError::BadDay {
            day,
            days: instance.day_count(),
        });
    }
    let mut keep: Vec<usize> = vec![DEPOT];
    keep.extend(instance.customers().filter(|&v| instance.is_active(v, day)));
    let data = InstanceData {
        name: format!("{}-day{}", instance.name(), day),
        source: instance.source().to_string(),
        day_count: 1,
        capacity: instance.capacity(),
        horizon_end: instance.horizon_end(),
        service_time: keep.iter().map(|&v| instance.service_time(v)).collect(),
        tw_open: keep.iter().map(|&v| instance.tw_open(v)).collect(),
        tw_close: keep.iter().map(|&v| instance.tw_close(v)).collect(),
        demand: keep.iter().map(|&v| vec![instance.demand(v, day)]).collect(),
        distance: keep
            .iter()
            .map(|&a| keep.iter().map(|&b| instance.distance(a, b)).collect())
            .collect(),
        travel_time: keep
            .iter()
            .map(|&a| keep.iter().map(|&b| instance.travel_time(a, b)).collect())
            .collect(),
    };
    let restricted = data
        .build()
        .expect("a day slice of a valid instance validates");
    Ok((restricted, keep))
}

// ---- group repair ----

/// A window-feasible visiting order for the members active on `day`, or
/// `None` when capacity or the windows cannot be met.
fn day_order(instance: &Instance, day: usize, active: Vec<usize>) -> Option<Vec<usize>> {
    if active.is_empty() {
        return Some(Vec::new());
    }
    let load: u64 = active.iter().map(|&v| instance.demand(v, day)).sum();
    if load > instance.capacity() {
        return None;
    }
    if active.len() <= 20 {
        feasible_route_order(instance, &active)
    } else {
        // beyond the exact enumeration width: keep id order, best effort
        if day_stats(instance, day, &active).feasible {
            Some(active)
        } else {
            None
        }
    }
}

/// Feasible routes for one vehicle serving `members` on every day, or
/// `None` when some day admits no feasible route.
fn vehicle_routes(instance: &Instance, members: &[usize]) -> Option<Vec<Vec<usize>>> {
    (0..instance.day_count())
        .map(|day| {
            let active: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&v| instance.is_active(v, day))
                .collect();
            day_order(instance, day, active)
        })
        .collect()
}

/// Calls `f` on every size-`size` index combination out of `0..len` in
/// lexicographic order and returns the first `Some`.
fn first_combination<T>(
    len: usize,
    size: usize,
    mut f: impl FnMut(&[usize]) -> Option<T>,
) -> Option<T> {
    debug_assert!(size >= 1 && size <= len);
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if let Some(hit) = f(&idx) {
            return Some(hit);
        }
        let mut i = size;
        while i > 0 && idx[i - 1] == len - size + (i - 1) {
            i -= 1;
        }
        if i == 0 {
            return None;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Splits `members` into a kept set that one vehicle serves feasibly on
/// every day and the pulled rest.  The pulled set is the smallest curing
/// removal (ties: lexicographically first) for small groups; large groups
/// drop the largest total demand until feasible.  Returns the kept routes.
fn split_feasible(
    instance: &Instance,
    members: &[usize],
) -> (Vec<usize>, Vec<usize>, Vec<Vec<usize>>) {
    if let Some(routes) = vehicle_routes(instance, members) {
        return (members.to_vec(), Vec::new(), routes);
    }
    if members.len() <= EXHAUSTIVE_GROUP {
        for size in 1..members.len() {
            let found = first_combination(members.len(), size, |idx| {
                let kept: Vec<usize> = members
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !idx.contains(i))
                    .map(|(_, &v)| v)
                    .collect();
                vehicle_routes(instance, &kept).map(|routes| {
                    let pulled: Vec<usize> = idx.iter().map(|&i| members[i]).collect();
                    (kept, pulled, routes)
                })
            });
            if let Some(split) = found {
                return split;
            }
        }
    } else {
        let mut kept = members.to_vec();
        let mut pulled = Vec::new();
        while kept.len() > 1 {
            let heaviest = (0..kept.len())
                .max_by_key(|&i| {
                    let v = kept[i];
                    let total: u64 = (0..instance.day_count()).map(|d| instance.demand(v, d)).sum();
                    (total, std::cmp::Reverse(v))
                })
                .expect("kept is non-empty");
            pulled.push(kept.remove(heaviest));
            if let Some(routes) = vehicle_routes(instance, &kept) {
                pulled.sort_unstable();
                return (kept, pulled, routes);
            }
        }
    }
    let days = instance.day_count();
    (Vec::new(), members.to_vec(), vec![Vec::new(); days])
}

// ---- pool drain ----

/// Counters of one pool drain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DrainStats {
    pub pops: usize,
    pub stage1: usize,
    pub stage2: usize,
    pub stage3: usize,
    /// Vehicles opened for customers the stages could not place.
    pub opened: usize,
}

/// Opens a fresh vehicle serving `v` alone; errors when even a dedicated
/// vehicle cannot meet the window.
fn open_singleton(
    instance: &Instance,
    solution: &mut Solution,
    v: usize,
) -> Result<(), RollingError> {
    if feasible_route_order(instance, &[v]).is_none() {
        return Err(RollingError::InfeasibleCustomer { customer: v });
    }
    let k = solution.add_vehicle();
    let positions: Vec<(usize, usize)> = instance.active_days(v).map(|d| (d, 0)).collect();
    solution
        .insert_customer(instance, k, v, &positions)
        .expect("a fresh vehicle accepts a feasible singleton");
    Ok(())
}

/// Empties the pool into `solution` through stages 1 to 3.  A customer
/// still unplaced when the pop budget (or the deadline) runs out gets a
/// fresh vehicle, so the drain always terminates with everyone served.
fn drain_pool(
    instance: &Instance,
    solution: &mut Solution,
    pool: &mut EjectionPool,
    params: &EliminationParams,
    penalty_state: &mut PenaltyParams,
    rng: &mut ChaCha8Rng,
    deadline: Instant,
) -> Result<DrainStats, RollingError> {
    let mut stats = DrainStats::default();
    let mut pops_since_open = 0usize;
    while let Some(v) = pool.pop() {
        let out_of_budget = pops_since_open >= params.pop_budget || Instant::now() >= deadline;
        if out_of_budget || solution.vehicle_count() == 0 {
            open_singleton(instance, solution, v)?;
            stats.opened += 1;
            pops_since_open = 0;
            continue;
        }
        stats.pops += 1;
        pops_since_open += 1;
        if stage1_insert(instance, solution, v, &params.insertion).is_some() {
            stats.stage1 += 1;
            continue;
        }
        if stage2_insert(instance, solution, v, penalty_state, params.restore_budget).is_some() {
            stats.stage2 += 1;
            continue;
        }
        match stage3_eject(instance, solution, v, pool, params, penalty_state.alpha, rng) {
            Some(_) => stats.stage3 += 1,
            None => {
                // the safety branch put v back on the pool; serve it alone
                let back = pool.pop().expect("unplaced customer returns to the pool");
                debug_assert_eq!(back, v);
                open_singleton(instance, solution, back)?;
                stats.opened += 1;
                pops_since_open = 0;
            }
        }
    }
    Ok(stats)
}

// ---- periodic update ----

/// Outcome of carrying a previous plan into a new period.
#[derive(Debug, Clone)]
pub struct UpdateOutcome {
    pub solution: Solution,
    /// Customers kept from the previous assignment.
    pub retained: usize,
    /// Retained customers whose final vehicle differs from the previous one.
    pub reassigned: usize,
    /// Customers of the new period with no previous assignment.
    pub fresh: usize,
    /// Previously assigned customers absent from the new period.
    pub dropped: usize,
    /// Vehicles opened for customers the insertion stages could not place.
    pub opened: usize,
    /// True when nothing could be carried over and the plan was built cold.
    pub cold_start: bool,
    /// Percentage of retained customers that changed vehicle.
    pub ic_pct: f64,
    pub elimination: EliminationStats,
}

/// Carries `prev`'s driver assignment into `instance` and returns the new
/// plan.  Vehicle ids are stable across the carry, so the IC percentage
/// compares like with like.  A previous plan sharing no customers with the
/// instance falls back to a cold solve.
pub fn update(
    instance: &Instance,
    prev: &Solution,
    params: &EliminationParams,
) -> Result<UpdateOutcome, RollingError> {
    params.check().map_err(from_eliminate)?;
    let deadline = Instant::now() + params.ct_max;
    let n = instance.customer_count();
    let prev_map = prev.assignment();
    let retained_ids: Vec<usize> = prev_map.keys().copied().filter(|&v| v <= n).collect();
    let dropped = prev_map.len() - retained_ids.len();
    let fresh: Vec<usize> = instance
        .customers()
        .filter(|v| !prev_map.contains_key(v))
        .collect();

    if retained_ids.is_empty() {
        let built = construct(instance, &params.insertion).map_err(from_construct)?;
        let (solution, elimination) =
            eliminate_routes(instance, &built, params).map_err(from_eliminate)?;
        debug_assert!(penalty(instance, &solution, 1.0).is_zero());
        return Ok(UpdateOutcome {
            solution,
            retained: 0,
            reassigned: 0,
            fresh: fresh.len(),
            dropped,
            opened: 0,
            cold_start: true,
            ic_pct: 0.0,
            elimination,
        });
    }

    // carried plan: previous grouping, fresh route orders, stable ids;
    // dissolved groups keep an empty vehicle so ids stay unique
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for &v in &retained_ids {
        groups.entry(prev_map[&v]).or_default().push(v);
    }
    let mut solution = Solution::new(instance.day_count());
    let mut pool = EjectionPool::new();
    for (id, members) in &groups {
        let (kept, pulled, routes) = split_feasible(instance, members);
        for v in pulled {
            pool.push(v);
        }
        solution.push_vehicle_raw(*id, kept, routes);
    }
    for &v in &fresh {
        pool.push(v);
    }

    let mut penalty_state = PenaltyParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    // elimination consumes the seed's default stream; the drain gets its own
    rng.set_stream(1);
    let drained = drain_pool(
        instance,
        &mut solution,
        &mut pool,
        params,
        &mut penalty_state,
        &mut rng,
        deadline,
    )?;
    solution.prune_empty_vehicles();

    let remaining = deadline
        .saturating_duration_since(Instant::now())
        .max(Duration::from_millis(1));
    let elim_params = EliminationParams {
        ct_max: remaining,
        ..params.clone()
    };
    let (solution, elimination) =
        eliminate_routes(instance, &solution, &elim_params).map_err(from_eliminate)?;
    debug_assert!(penalty(instance, &solution, 1.0).is_zero());
    debug_assert!(solution.unassigned(instance).is_empty());

    let final_map = solution.assignment();
    let reassigned = retained_ids
        .iter()
        .filter(|v| final_map.get(v) != prev_map.get(v))
        .count();
    let ic_pct = 100.0 * reassigned as f64 / retained_ids.len() as f64;
    Ok(UpdateOutcome {
        solution,
        retained: retained_ids.len(),
        reassigned,
        fresh: fresh.len(),
        dropped,
        opened: drained.opened,
        cold_start: false,
        ic_pct,
        elimination,
    })
}

// ---- daily routing ----

/// One-day plan built against a base driver assignment.
#[derive(Debug, Clone)]
pub struct DailyOutcome {
    /// The one-day instance the plan is expressed over.
    pub restricted: Instance,
    /// Original id of every restricted node; `ids[0]` is the depot.
    pub ids: Vec<usize>,
    pub plan: Solution,
    /// Visits scheduled for the day, one per active customer.
    pub visits: usize,
    /// Visits served by a vehicle other than the base assignment's.
    pub off_base: usize,
    /// Active customers with no base assignment.
    pub fresh: usize,
    /// Base-assigned customers displaced because their group was infeasible.
    pub pulled: usize,
    /// Vehicles opened beyond the base plan's.
    pub opened: usize,
    /// True when no base assignment applied and the day was built cold.
    pub cold_start: bool,
    /// Percentage of the day's visits breaking the base assignment.
    pub inconsistency_pct: f64,
}

/// Plans `day` of `instance` while respecting `base`'s driver assignment
/// wherever it stays feasible.  Base vehicle ids carry over into the plan,
/// new vehicles get ids above them.
pub fn daily(
    instance: &Instance,
    day: usize,
    base: &Solution,
    params: &EliminationParams,
) -> Result<DailyOutcome, RollingError> {
    params.check().map_err(from_eliminate)?;
    let (restricted, ids) = restrict_to_day(instance, day)?;
    let m = restricted.customer_count();
    let base_map = base.assignment();
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut fresh: Vec<usize> = Vec::new();
    for (local, orig) in ids.iter().enumerate().take(m + 1).skip(1) {
        match base_map.get(orig) {
            Some(&veh) => groups.entry(veh).or_default().push(local),
            None => fresh.push(local),
        }
    }
    let translate = |e: RollingError| match e {
        RollingError::InfeasibleCustomer { customer } => RollingError::InfeasibleCustomer {
            customer: ids[customer],
        },
        other => other,
    };

    let (plan, pulled, opened, cold_start) = if groups.is_empty() {
        let built =
            construct(&restricted, &params.insertion).map_err(|e| translate(from_construct(e)))?;
        (built, 0, 0, true)
    } else {
        let mut plan = Solution::new(1);
        let mut pool = EjectionPool::new();
        let mut pulled = 0usize;
        for (id, members) in &groups {
            let (kept, out, routes) = split_feasible(&restricted, members);
            pulled += out.len();
            for v in out {
                pool.push(v);
            }
            plan.push_vehicle_raw(*id, kept, routes);
        }
        for &v in &fresh {
            pool.push(v);
        }
        let mut penalty_state = PenaltyParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
        rng.set_stream(2);
        let deadline = Instant::now() + params.ct_max;
        let drained = drain_pool(
            &restricted,
            &mut plan,
            &mut pool,
            params,
            &mut penalty_state,
            &mut rng,
            deadline,
        )
        .map_err(translate)?;
        plan.prune_empty_vehicles();
        (plan, pulled, drained.opened, false)
    };
    debug_assert!(penalty(&restricted, &plan, 1.0).is_zero());
    debug_assert!(plan.unassigned(&restricted).is_empty());

    let final_map = plan.assignment();
    let off_base = (1..=m)
        .filter(|local| match base_map.get(&ids[*local]) {
            Some(base_veh) => final_map.get(local) != Some(base_veh),
            None => false,
        })
        .count();
    let inconsistency_pct = if m == 0 {
        0.0
    } else {
        100.0 * off_base as f64 / m as f64
    };
    Ok(DailyOutcome {
        restricted,
        ids,
        plan,
        visits: m,
        off_base,
        fresh: fresh.len(),
        pulled,
        opened,
        cold_start,
        inconsistency_pct,
    })
}

// ---- tests ----

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::evaluate_solution;
    use crate::oracle::{exact_min_vehicles, OracleLimits};
    use crate::testutil::{self, TestInstance};
    use rand::Rng;

    fn quick_params(seed: u64) -> EliminationParams {
        EliminationParams {
            ct_max: Duration::from_secs(10),
            rng_seed: seed,
            ..EliminationParams::default()
        }
    }

    /// Copy of `instance` keeping only customers `1..=n`.
    fn prefix_instance(instance: &Instance, n: usize) -> Instance {
        rebuild(instance, n, None, "prefix")
    }

    /// Copy of `instance` with every customer's per-day demands redrawn.
    fn redraw_demands(instance: &Instance, rng: &mut ChaCha8Rng) -> Instance {
        let days = instance.day_count();
        let mut demand = vec![vec![0u64; days]; instance.node_count()];
        for c in instance.customers() {
            for day_demand in demand[c].iter_mut() {
                if rng.gen_bool(0.7) {
                    *day_demand = rng.gen_range(1..=instance.capacity().min(10));
                }
            }
            if demand[c].iter().all(|&q| q == 0) {
                let d = rng.gen_range(0..days);
                demand[c][d] = rng.gen_range(1..=instance.capacity().min(10));
            }
        }
        rebuild(instance, instance.customer_count(), Some(demand), "redraw")
    }

    fn rebuild(instance: &Instance, n: usize, demand: Option<Vec<Vec<u64>>>, tag: &str) -> Instance {
        let n1 = n + 1;
        let days = instance.day_count();
        let demand = match demand {
            Some(rows) => rows.into_iter().take(n1).collect(),
            None => (0..n1)
                .map(|v| (0..days).map(|d| instance.demand(v, d)).collect())
                .collect(),
        };
        InstanceData {
            name: format!("{}-{tag}", instance.name()),
            source: instance.source().to_string(),
            day_count: days,
            capacity: instance.capacity(),
            horizon_end: instance.horizon_end(),
            service_time: (0..n1).map(|v| instance.service_time(v)).collect(),
            tw_open: (0..n1).map(|v| instance.tw_open(v)).collect(),
            tw_close: (0..n1).map(|v| instance.tw_close(v)).collect(),
            demand,
            distance: (0..n1)
                .map(|a| (0..n1).map(|b| instance.distance(a, b)).collect())
                .collect(),
            travel_time: (0..n1)
                .map(|a| (0..n1).map(|b| instance.travel_time(a, b)).collect())
                .collect(),
        }
        .build()
        .expect("rebuilt instance validates")
    }

    fn solve(instance: &Instance, params: &EliminationParams) -> Solution {
        let built = construct(instance, &params.insertion).unwrap();
        eliminate_routes(instance, &built, params).unwrap().0
    }

    /// Random draws can place a window out of the depot's reach; tests that
    /// scan seeds skip such draws, as every restriction of a serveable
    /// instance stays serveable.
    fn every_singleton_serveable(instance: &Instance) -> bool {
        instance
            .customers()
            .all(|v| feasible_route_order(instance, &[v]).is_some())
    }

    fn assert_feasible(instance: &Instance, solution: &Solution) {
        solution.validate(instance).unwrap();
        assert!(evaluate_solution(instance, solution).unwrap().feasible);
        assert!(solution.unassigned(instance).is_empty());
    }

    // ---- group repair ----

    #[test]
    fn pull_prefers_the_smallest_curing_subset() {
        let inst = TestInstance::new(400, 10)
            .customer(&[9], 0, 400, 5)
            .customer(&[3], 0, 400, 5)
            .customer(&[3], 0, 400, 5)
            .travel(0, 1, 3)
            .travel(0, 2, 3)
            .travel(0, 3, 3)
            .travel(1, 2, 3)
            .travel(1, 3, 3)
            .travel(2, 3, 3)
            .build();
        // load 15 > 10; dropping customer 1 alone cures it
        let (kept, pulled, routes) = split_feasible(&inst, &[1, 2, 3]);
        assert_eq!(kept, vec![2, 3]);
        assert_eq!(pulled, vec![1]);
        assert_eq!(routes.len(), 1);

        // only customer 3's removal cures; lexicographic singles skip 1, 2
        let heavy_tail = TestInstance::new(400, 10)
            .customer(&[3], 0, 400, 5)
            .customer(&[3], 0, 400, 5)
            .customer(&[9], 0, 400, 5)
            .travel(0, 1, 3)
            .travel(0, 2, 3)
            .travel(0, 3, 3)
            .travel(1, 2, 3)
            .travel(1, 3, 3)
            .travel(2, 3, 3)
            .build();
        let (kept, pulled, _) = split_feasible(&heavy_tail, &[1, 2, 3]);
        assert_eq!(kept, vec![1, 2]);
        assert_eq!(pulled, vec![3]);

        // no single removal cures a load of 18; the first pair does
        let uniform = TestInstance::new(400, 10)
            .customer(&[6], 0, 400, 5)
            .customer(&[6], 0, 400, 5)
            .customer(&[6], 0, 400, 5)
            .travel(0, 1, 3)
            .travel(0, 2, 3)
            .travel(0, 3, 3)
            .travel(1, 2, 3)
            .travel(1, 3, 3)
            .travel(2, 3, 3)
            .build();
        let (kept, pulled, _) = split_feasible(&uniform, &[1, 2, 3]);
        assert_eq!(kept, vec![3]);
        assert_eq!(pulled, vec![1, 2]);
    }

    #[test]
    fn pull_handles_window_clashes_not_just_load() {
        // both customers must be first: reaching either via the other
        // arrives after the window closes
        let inst = TestInstance::new(400, 10)
            .customer(&[1], 0, 12, 5)
            .customer(&[1], 0, 12, 5)
            .travel(0, 1, 10)
            .travel(0, 2, 10)
            .travel(1, 2, 10)
            .build();
        let (kept, pulled, _) = split_feasible(&inst, &[1, 2]);
        assert_eq!(kept, vec![2]);
        assert_eq!(pulled, vec![1]);
    }

    // ---- day restriction ----

    #[test]
    fn day_restriction_keeps_active_customers_and_slices_matrices() {
        let mut r = testutil::rng(41);
        let inst = testutil::random_instance(&mut r, 8, 3);
        let day = 1;
        let (restricted, ids) = restrict_to_day(&inst, day).unwrap();
        let want: Vec<usize> = inst.customers().filter(|&v| inst.is_active(v, day)).collect();
        assert_eq!(ids[0], DEPOT);
        assert_eq!(&ids[1..], want.as_slice());
        assert_eq!(restricted.customer_count(), want.len());
        assert_eq!(restricted.day_count(), 1);
        for (local, &orig) in ids.iter().enumerate().skip(1) {
            assert_eq!(restricted.demand(local, 0), inst.demand(orig, day));
            assert_eq!(restricted.tw_close(local), inst.tw_close(orig));
            assert_eq!(restricted.travel_time(0, local), inst.travel_time(0, orig));
            for (other, &orig_other) in ids.iter().enumerate().skip(1) {
                assert_eq!(
                    restricted.distance(local, other),
                    inst.distance(orig, orig_other)
                );
            }
        }

        let err = restrict_to_day(&inst, 3).unwrap_err();
        assert_eq!(err, RollingError::BadDay { day: 3, days: 3 });
    }

    // ---- update ----

    #[test]
    fn update_on_the_same_instance_at_the_optimum_changes_nothing() {
        let params = quick_params(9);
        let (inst, prev) = (0u64..)
            .find_map(|s| {
                let mut r = testutil::rng(s * 13 + 5);
                let inst = testutil::random_instance(&mut r, 6, 2);
                let built = construct(&inst, &params.insertion).ok()?;
                let sol = eliminate_routes(&inst, &built, &params).ok()?.0;
                let opt = exact_min_vehicles(&inst, &OracleLimits::default()).ok()?;
                (sol.nv() == opt.min_vehicles && sol.nv() >= 2).then_some((inst, sol))
            })
            .unwrap();

        let out = update(&inst, &prev, &params).unwrap();
        assert!(!out.cold_start);
        assert_eq!(out.ic_pct, 0.0);
        assert_eq!(out.reassigned, 0);
        assert_eq!(out.fresh, 0);
        assert_eq!(out.dropped, 0);
        assert_eq!(out.retained, inst.customer_count());
        assert_eq!(out.solution.nv(), prev.nv());
        // at the optimum no elimination attempt can commit, so the carried
        // assignment survives exactly
        assert_eq!(out.solution.assignment(), prev.assignment());
        assert_feasible(&inst, &out.solution);
    }

    #[test]
    fn update_slots_an_easy_new_customer_without_reassignments() {
        let mut b = TestInstance::new(1000, 100);
        for _ in 0..5 {
            b = b.customer(&[1, 1], 0, 1000, 5);
        }
        for i in 0..=5usize {
            for j in (i + 1)..=5 {
                b = b.travel(i, j, 2);
            }
        }
        let grown = b.build();
        let old = prefix_instance(&grown, 4);
        let params = quick_params(4);
        let prev = solve(&old, &params);
        assert_eq!(prev.nv(), 1, "all four fit one wide vehicle");

        let out = update(&grown, &prev, &params).unwrap();
        assert_eq!(out.fresh, 1);
        assert_eq!(out.dropped, 0);
        assert_eq!(out.retained, 4);
        assert_eq!(out.opened, 0);
        assert_eq!(out.ic_pct, 0.0);
        assert_eq!(out.solution.nv(), prev.nv());
        let prev_map = prev.assignment();
        let new_map = out.solution.assignment();
        for (v, id) in &prev_map {
            assert_eq!(new_map.get(v), Some(id), "customer {v} kept its vehicle");
        }
        assert_eq!(new_map.get(&5), prev_map.get(&1), "newcomer rides along");
        assert_feasible(&grown, &out.solution);
    }

    #[test]
    fn update_opens_a_vehicle_for_a_customer_nothing_can_host() {
        let mut b = TestInstance::new(1000, 10);
        for _ in 0..4 {
            b = b.customer(&[4], 0, 1000, 5);
        }
        b = b.customer(&[10], 0, 1000, 5);
        for i in 0..=5usize {
            for j in (i + 1)..=5 {
                b = b.travel(i, j, 2);
            }
        }
        let grown = b.build();
        let old = prefix_instance(&grown, 4);
        let mut params = quick_params(3);
        params.pop_budget = 120;
        let prev = solve(&old, &params);
        assert_eq!(prev.nv(), 2, "sixteen demand units need two vehicles");

        let out = update(&grown, &prev, &params).unwrap();
        assert!(out.opened >= 1, "the full-capacity customer forces an opening");
        assert_eq!(out.fresh, 1);
        assert_eq!(out.solution.nv(), 3);
        let k = out.solution.vehicle_of(5).unwrap();
        assert_eq!(out.solution.vehicle(k).customers(), &[5]);
        assert_feasible(&grown, &out.solution);
    }

    #[test]
    fn update_with_a_disjoint_previous_plan_solves_cold() {
        let mut r = testutil::rng(77);
        let inst = testutil::random_instance(&mut r, 6, 2);
        // a plan whose customers all lie outside the new instance
        let mut prev = Solution::new(2);
        prev.push_vehicle_raw(0, vec![11, 12], vec![vec![11, 12], vec![11]]);
        let params = quick_params(8);

        let out = update(&inst, &prev, &params).unwrap();
        assert!(out.cold_start);
        assert_eq!(out.retained, 0);
        assert_eq!(out.dropped, 2);
        assert_eq!(out.fresh, 6);
        assert_eq!(out.ic_pct, 0.0);
        assert_feasible(&inst, &out.solution);
    }

    #[test]
    fn update_ic_matches_the_map_diff_oracle() {
        let mut agreements = 0;
        for seed in 0..10u64 {
            let mut r = testutil::rng(seed * 71 + 11);
            let big = testutil::random_instance(&mut r, 8, 2);
            let small = prefix_instance(&big, 6);
            let params = quick_params(seed);

            // growing period: two fresh customers, redrawn demands
            let prev = solve(&small, &params);
            let next = redraw_demands(&big, &mut r);
            let out = update(&next, &prev, &params).unwrap();
            check_against_map_diff(&next, &prev, &out);
            assert_eq!(out.fresh, 2);
            assert_eq!(out.dropped, 0);

            // shrinking period: two customers dropped
            let prev_big = solve(&big, &params);
            let next_small = redraw_demands(&small, &mut r);
            let out = update(&next_small, &prev_big, &params).unwrap();
            check_against_map_diff(&next_small, &prev_big, &out);
            assert_eq!(out.fresh, 0);
            assert_eq!(out.dropped, 2);
            agreements += 1;
        }
        assert_eq!(agreements, 10);
    }

    fn check_against_map_diff(instance: &Instance, prev: &Solution, out: &UpdateOutcome) {
        assert_feasible(instance, &out.solution);
        let prev_map = prev.assignment();
        let new_map = out.solution.assignment();
        let retained: Vec<usize> = prev_map
            .keys()
            .copied()
            .filter(|&v| v <= instance.customer_count())
            .collect();
        let moved = retained
            .iter()
            .filter(|v| new_map.get(v) != prev_map.get(v))
            .count();
        assert_eq!(out.retained, retained.len());
        assert_eq!(out.reassigned, moved);
        let want_pct = if retained.is_empty() {
            0.0
        } else {
            100.0 * moved as f64 / retained.len() as f64
        };
        assert_eq!(out.ic_pct, want_pct);
        assert!((0.0..=100.0).contains(&out.ic_pct));
        assert_eq!(out.retained + out.fresh, instance.customer_count());
    }

    // ---- daily ----

    #[test]
    fn replaying_a_day_of_a_feasible_plan_is_fully_consistent() {
        let mut days_checked = 0;
        for seed in 0..40u64 {
            if days_checked >= 16 {
                break;
            }
            let mut r = testutil::rng(seed * 53 + 19);
            let inst = testutil::random_instance(&mut r, 9, 3);
            if !every_singleton_serveable(&inst) {
                continue;
            }
            let params = quick_params(seed);
            let base = solve(&inst, &params);
            for day in 0..inst.day_count() {
                let out = daily(&inst, day, &base, &params).unwrap();
                if out.visits == 0 {
                    continue;
                }
                assert!(!out.cold_start);
                assert_eq!(out.inconsistency_pct, 0.0, "seed {seed} day {day}");
                assert_eq!(out.off_base, 0);
                assert_eq!(out.pulled, 0);
                assert_eq!(out.opened, 0);
                assert_eq!(out.fresh, 0);
                assert_feasible(&out.restricted, &out.plan);
                days_checked += 1;
            }
        }
        assert!(days_checked >= 16, "only {days_checked} days exercised");
    }

    #[test]
    fn one_forced_reassignment_among_twenty_visits_is_five_percent() {
        let build = |first_demand: u64| {
            let mut b = TestInstance::new(1000, 12);
            b = b.customer(&[first_demand], 0, 1000, 5);
            for _ in 1..20 {
                b = b.customer(&[2], 0, 1000, 5);
            }
            for i in 0..=20usize {
                for j in (i + 1)..=20 {
                    b = b.travel(i, j, 1);
                }
            }
            b.build()
        };
        let base_inst = build(2);
        let day_inst = build(6);

        // base plan: 5 + 3 + 6 + 6 customers, loads 10, 6, 12, 12
        let mut base = Solution::new(1);
        let groups: [&[usize]; 4] = [&[1, 2, 3, 4, 5], &[6, 7, 8], &[9, 10, 11, 12, 13, 14], &[15, 16, 17, 18, 19, 20]];
        for (id, members) in groups.iter().enumerate() {
            base.push_vehicle_raw(id as u32, members.to_vec(), vec![members.to_vec()]);
        }
        assert_feasible(&base_inst, &base);

        // customer 1 now needs 6 units: vehicle 0 overflows, only vehicle 1
        // has the slack to absorb the displaced customer
        let out = daily(&day_inst, 0, &base, &quick_params(2)).unwrap();
        assert_eq!(out.visits, 20);
        assert_eq!(out.pulled, 1);
        assert_eq!(out.off_base, 1);
        assert_eq!(out.opened, 0);
        assert_eq!(out.inconsistency_pct, 5.0);
        assert_eq!(out.plan.assignment().get(&1), Some(&1u32));
        assert_feasible(&out.restricted, &out.plan);
    }

    #[test]
    fn daily_inconsistency_matches_the_visit_diff_oracle() {
        let mut checked = 0;
        let mut off_base_seen = 0;
        for seed in 0..40u64 {
            if checked >= 12 {
                break;
            }
            let mut r = testutil::rng(seed * 31 + 7);
            let big = testutil::random_instance(&mut r, 10, 1);
            if !every_singleton_serveable(&big) {
                continue;
            }
            let base_inst = prefix_instance(&big, 8);
            let params = quick_params(seed);
            let base = solve(&base_inst, &params);
            let day_inst = redraw_demands(&big, &mut r);

            let out = daily(&day_inst, 0, &base, &params).unwrap();
            assert_feasible(&out.restricted, &out.plan);
            let base_map = base.assignment();
            let plan_map = out.plan.assignment();
            let off = (1..=out.restricted.customer_count())
                .filter(|local| match base_map.get(&out.ids[*local]) {
                    Some(veh) => plan_map.get(local) != Some(veh),
                    None => false,
                })
                .count();
            assert_eq!(out.off_base, off, "seed {seed}");
            let want = 100.0 * off as f64 / out.visits as f64;
            assert_eq!(out.inconsistency_pct, want, "seed {seed}");
            assert!((0.0..=100.0).contains(&out.inconsistency_pct));
            assert_eq!(out.fresh, 2);
            off_base_seen += off;
            checked += 1;
        }
        assert_eq!(checked, 12);
        assert!(off_base_seen >= 1, "no draw exercised a reassignment");
    }

    #[test]
    fn daily_rejects_an_out_of_range_day() {
        let inst = testutil::small_instance(4, 2, 10);
        let base = Solution::new(2);
        let err = daily(&inst, 2, &base, &quick_params(0)).unwrap_err();
        assert_eq!(err, RollingError::BadDay { day: 2, days: 2 });
    }

    #[test]
    fn daily_with_no_applicable_base_solves_cold() {
        let inst = (0u64..)
            .find_map(|s| {
                let mut r = testutil::rng(s);
                let inst = testutil::random_instance(&mut r, 6, 1);
                every_singleton_serveable(&inst).then_some(inst)
            })
            .unwrap();
        // base assignment referencing only ids outside the day instance
        let mut base = Solution::new(1);
        base.push_vehicle_raw(0, vec![9, 10], vec![vec![9, 10]]);
        let out = daily(&inst, 0, &base, &quick_params(1)).unwrap();
        assert!(out.cold_start);
        assert_eq!(out.fresh, 6);
        assert_eq!(out.off_base, 0);
        assert_eq!(out.inconsistency_pct, 0.0);
        assert_feasible(&out.restricted, &out.plan);
    }

    #[test]
    fn same_seed_gives_identical_update_outcomes() {
        let mut r = testutil::rng(303);
        let big = testutil::random_instance(&mut r, 8, 2);
        let small = prefix_instance(&big, 6);
        let params = quick_params(12);
        let prev = solve(&small, &params);
        let next = redraw_demands(&big, &mut r);

        let a = update(&next, &prev, &params).unwrap();
        let b = update(&next, &prev, &params).unwrap();
        assert_eq!(a.solution, b.solution);
        assert_eq!(a.ic_pct, b.ic_pct);
        assert_eq!(a.reassigned, b.reassigned);
        assert_eq!(a.opened, b.opened);
    }
}
