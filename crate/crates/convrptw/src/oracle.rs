//! Exhaustive minimum-vehicle solver for small instances.
//!
//! Branch and bound assigns customers to vehicles one at a time with
//! symmetry breaking (vehicle k opens only after vehicle k-1), pruning on
//! per-day capacity and on route feasibility.  Whether a customer set
//! admits a feasible visiting order is decided by a bitmask dynamic
//! program over (visited set, last stop) keeping the earliest service
//! completion; windows and travel times do not vary by day, so one verdict
//! per set is memoized across the whole search.  The answer is exact: the
//! solver either proves the optimum or refuses (instance too large, node
//! budget spent, or no feasible plan).
//!
//! Set-infeasibility pruning assumes the travel matrix respects the
//! triangle inequality (dropping a stop can then never delay later
//! arrivals).  When the matrix violates it the solver falls back to
//! checking feasibility only at complete assignments, trading speed for
//! unconditional exactness.

use crate::model::{evaluate_solution, Instance, Solution, DEPOT};
use std::collections::HashMap;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Size and effort bounds for the exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_customers: usize,
    pub max_days: usize,
    /// Assignment attempts before the search refuses.
    pub max_nodes: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_customers: 10,
            max_days: 5,
            max_nodes: 10_000_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {customers} customers, {days} days")]
    TooLarge { customers: usize, days: usize },
    #[error("node budget exhausted after {explored} assignment attempts")]
    NodeBudget { explored: u64 },
    #[error("no feasible route exists{}", blocking_note(.customer))]
    NoFeasibleRoute { customer: Option<usize> },
}

fn blocking_note(customer: &Option<usize>) -> String {
    match customer {
        Some(c) => format!(" (customer {c} cannot be served alone)"),
        None => String::new(),
    }
}

/// Proven optimum with one optimal plan as evidence.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub min_vehicles: usize,
    pub witness: Solution,
    pub explored_nodes: u64,
    pub elapsed: Duration,
}

// ---- per-day route feasibility ----

/// A feasible visiting order for `members`, or `None` when no permutation
/// serves every window and returns by the horizon end.  Windows, service
/// times, and travel times do not vary by day, so one verdict covers every
/// day the same set rides together.  Among feasible orders the returned one
/// completes earliest (ties: lowest last stop), so the choice is
/// deterministic.
pub(crate) fn feasible_route_order(instance: &Instance, members: &[usize]) -> Option<Vec<usize>> {
    let k = members.len();
    if k == 0 {
        return Some(Vec::new());
    }
    debug_assert!(k <= 20, "bitmask route search is for tiny routes");
    let full: u32 = (1 << k) - 1;
    let idx = |mask: u32, last: usize| mask as usize * k + last;
    // earliest service completion per (visited set, last stop)
    let mut depart = vec![i64::MAX; (full as usize + 1) * k];
    let mut parent = vec![usize::MAX; (full as usize + 1) * k];
    for (i, &v) in members.iter().enumerate() {
        let arrival = instance.travel_time(DEPOT, v).deci_minutes();
        if arrival <= instance.tw_close(v).deci_minutes() {
            let start = arrival.max(instance.tw_open(v).deci_minutes());
            depart[idx(1 << i, i)] = start + instance.service_time(v).deci_minutes();
        }
    }
    for mask in 1..=full {
        for i in 0..k {
            if mask & (1 << i) == 0 {
                continue;
            }
            let from = depart[idx(mask, i)];
            if from == i64::MAX {
                continue;
            }
            for j in 0..k {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let v = members[j];
                let arrival = from + instance.travel_time(members[i], v).deci_minutes();
                if arrival > instance.tw_close(v).deci_minutes() {
                    continue;
                }
                let start = arrival.max(instance.tw_open(v).deci_minutes());
                let done = start + instance.service_time(v).deci_minutes();
                let slot = idx(mask | (1 << j), j);
                if done < depart[slot] {
                    depart[slot] = done;
                    parent[slot] = i;
                }
            }
        }
    }
    let horizon = instance.horizon_end().deci_minutes();
    let mut best: Option<(i64, usize)> = None;
    for i in 0..k {
        let done = depart[idx(full, i)];
        if done == i64::MAX {
            continue;
        }
        let back = done + instance.travel_time(members[i], DEPOT).deci_minutes();
        if back <= horizon && best.is_none_or(|b| (back, i) < b) {
            best = Some((back, i));
        }
    }
    let (_, mut last) = best?;
    let mut order = vec![0usize; k];
    let mut mask = full;
    for pos in (0..k).rev() {
        order[pos] = members[last];
        let up = parent[idx(mask, last)];
        mask &= !(1 << last);
        last = up;
    }
    Some(order)
}

// ---- branch and bound ----

struct Search<'a> {
    instance: &'a Instance,
    order: Vec<usize>,
    m: usize,
    assign: Vec<usize>,
    day_masks: Vec<Vec<u32>>,
    loads: Vec<Vec<u64>>,
    explored: u64,
    max_nodes: u64,
    memo: &'a mut HashMap<u32, bool>,
    prune_sets: bool,
}

impl<'a> Search<'a> {
    fn set_feasible(&mut self, mask: u32) -> bool {
        if let Some(&known) = self.memo.get(&mask) {
            return known;
        }
        let members: Vec<usize> = (0..self.instance.customer_count())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| i + 1)
            .collect();
        let feasible = feasible_route_order(self.instance, &members).is_some();
        self.memo.insert(mask, feasible);
        feasible
    }

    fn dfs(&mut self, pos: usize, opened: usize) -> Result<Option<Vec<usize>>, OracleError> {
        if pos == self.order.len() {
            if !self.prune_sets {
                for k in 0..opened {
                    for day in 0..self.instance.day_count() {
                        let mask = self.day_masks[k][day];
                        if mask != 0 && !self.set_feasible(mask) {
                            return Ok(None);
                        }
                    }
                }
            }
            return Ok(Some(self.assign.clone()));
        }
        let v = self.order[pos];
        let bit = 1u32 << (v - 1);
        let limit = (opened + 1).min(self.m);
        for j in 0..limit {
            self.explored += 1;
            if self.explored > self.max_nodes {
                return Err(OracleError::NodeBudget {
                    explored: self.explored,
                });
            }
            let mut ok = true;
            for day in self.instance.active_days(v) {
                if self.loads[j][day] + self.instance.demand(v, day) > self.instance.capacity() {
                    ok = false;
                    break;
                }
            }
            if ok && self.prune_sets {
                for day in self.instance.active_days(v) {
                    if !self.set_feasible(self.day_masks[j][day] | bit) {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            for day in self.instance.active_days(v) {
                self.loads[j][day] += self.instance.demand(v, day);
                self.day_masks[j][day] |= bit;
            }
            self.assign[v] = j;
            let found = self.dfs(pos + 1, opened.max(j + 1))?;
            for day in self.instance.active_days(v) {
                self.loads[j][day] -= self.instance.demand(v, day);
                self.day_masks[j][day] &= !bit;
            }
            self.assign[v] = usize::MAX;
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

/// Vehicles needed at minimum, by exhaustion over all active days' demand.
fn capacity_lower_bound(instance: &Instance) -> usize {
    (0..instance.day_count())
        .map(|day| {
            let total: u64 = instance.customers().map(|v| instance.demand(v, day)).sum();
            total.div_ceil(instance.capacity()) as usize
        })
        .max()
        .unwrap_or(0)
        .max(1)
}

/// Proves the minimum vehicle count by branch and bound, or refuses.
pub fn exact_min_vehicles(
    instance: &Instance,
    limits: &OracleLimits,
) -> Result<OracleResult, OracleError> {
    let start = Instant::now();
    let n = instance.customer_count();
    if n > limits.max_customers || instance.day_count() > limits.max_days {
        return Err(OracleError::TooLarge {
            customers: n,
            days: instance.day_count(),
        });
    }
    if n == 0 {
        return Ok(OracleResult {
            min_vehicles: 0,
            witness: Solution::new(instance.day_count()),
            explored_nodes: 0,
            elapsed: start.elapsed(),
        });
    }

    let prune_sets = instance.triangle_violations() == 0;
    if prune_sets {
        // direct arrival is the earliest possible, so a customer failing
        // alone fails in every route
        for v in instance.customers() {
            let overloaded = instance
                .active_days(v)
                .any(|day| instance.demand(v, day) > instance.capacity());
            let unreachable = instance.active_day_count(v) > 0
                && feasible_route_order(instance, &[v]).is_none();
            if overloaded || unreachable {
                return Err(OracleError::NoFeasibleRoute { customer: Some(v) });
            }
        }
    }

    // hardest customers first: more active days, then more demand
    let mut order: Vec<usize> = instance.customers().collect();
    order.sort_by_key(|&v| {
        let total: u64 = (0..instance.day_count()).map(|d| instance.demand(v, d)).sum();
        (
            std::cmp::Reverse(instance.active_day_count(v)),
            std::cmp::Reverse(total),
            v,
        )
    });

    let mut memo: HashMap<u32, bool> = HashMap::new();
    let mut explored = 0u64;
    for m in capacity_lower_bound(instance)..=n {
        let mut search = Search {
            instance,
            order: order.clone(),
            m,
            assign: vec![usize::MAX; n + 1],
            day_masks: vec![vec![0; instance.day_count()]; m],
            loads: vec![vec![0; instance.day_count()]; m],
            explored,
            max_nodes: limits.max_nodes,
            memo: &mut memo,
            prune_sets,
        };
        let found = search.dfs(0, 0)?;
        explored = search.explored;
        if let Some(assign) = found {
            let witness = build_witness(instance, m, &assign);
            debug_assert!(evaluate_solution(instance, &witness).unwrap().feasible);
            debug_assert_eq!(witness.nv(), m);
            return Ok(OracleResult {
                min_vehicles: m,
                witness,
                explored_nodes: explored,
                elapsed: start.elapsed(),
            });
        }
    }

    if prune_sets {
        unreachable!("one vehicle per customer is feasible when every singleton is");
    }
    // infeasibility proven by exhaustion; name a singleton failure as a
    // hint when one exists
    let blocking = instance.customers().find(|&v| {
        instance
            .active_days(v)
            .any(|day| instance.demand(v, day) > instance.capacity())
            || (instance.active_day_count(v) > 0
                && feasible_route_order(instance, &[v]).is_none())
    });
    Err(OracleError::NoFeasibleRoute { customer: blocking })
}

fn build_witness(instance: &Instance, m: usize, assign: &[usize]) -> Solution {
    let mut witness = Solution::new(instance.day_count());
    for k in 0..m {
        let customers: Vec<usize> = instance.customers().filter(|&v| assign[v] == k).collect();
        if customers.is_empty() {
            continue;
        }
        let routes: Vec<Vec<usize>> = (0..instance.day_count())
            .map(|day| {
                let members: Vec<usize> = customers
                    .iter()
                    .copied()
                    .filter(|&v| instance.is_active(v, day))
                    .collect();
                feasible_route_order(instance, &members)
                    .expect("accepted assignment has feasible routes")
            })
            .collect();
        witness.push_vehicle_raw(k as u32, customers, routes);
    }
    witness
}
