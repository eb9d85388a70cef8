//! Domain types and the schedule evaluator.
//!
//! An [`Instance`] is a depot plus customers on a complete directed graph,
//! each customer with a per-day demand profile over a short planning horizon.
//! A [`Solution`] partitions customers over vehicles; a customer stays with
//! its vehicle on every day it is active (person consistency).  Per vehicle
//! and day an ordered route is kept, and [`evaluate_route`] derives the
//! [`Schedule`] for it: service start-times, waits and violation amounts.
//!
//! Late arrivals use the time-warp convention: the excess over the window
//! close is recorded as a violation and propagation continues from the window
//! close.  This keeps penalties additive and bounded, which the elimination
//! heuristic relies on when it walks through infeasible intermediate states.

use crate::units::{Distance, Time};
use std::collections::BTreeMap;
use thiserror::Error;

/// Depot node id; customers are `1..=customer_count`.
pub const DEPOT: usize = 0;

// ---- errors ----

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{what}: expected {expected} entries, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("depot record invalid: {0}")]
    InvalidDepot(&'static str),
    #[error("node {node}: time window closes before it opens")]
    WindowInverted { node: usize },
    #[error("node {node}: time window outside the horizon [0, T]")]
    WindowOutsideHorizon { node: usize },
    #[error("customer {customer} day {day}: demand {demand} exceeds capacity {capacity}")]
    DemandExceedsCapacity {
        customer: usize,
        day: usize,
        demand: u64,
        capacity: u64,
    },
    #[error("customer {customer} has zero demand on every day")]
    NeverActive { customer: usize },
    #[error("matrix entry ({i},{j}) is negative")]
    NegativeEntry { i: usize, j: usize },
    #[error("matrix diagonal entry ({node},{node}) is not zero")]
    NonzeroDiagonal { node: usize },
    #[error("unknown customer id {customer}")]
    UnknownCustomer { customer: usize },
    #[error("unknown vehicle index {vehicle}")]
    UnknownVehicle { vehicle: usize },
    #[error("customer {customer} is inactive on day {day}")]
    InactiveCustomer { customer: usize, day: usize },
    #[error("customer {customer} appears more than once")]
    DuplicateCustomer { customer: usize },
    #[error("customer {customer} is already assigned to a vehicle")]
    CustomerAlreadyAssigned { customer: usize },
    #[error("customer {customer} is not assigned to any vehicle")]
    CustomerNotAssigned { customer: usize },
    #[error("day {day}: position {position} out of range for route of length {len}")]
    PositionOutOfRange {
        day: usize,
        position: usize,
        len: usize,
    },
    #[error("customer {customer}: insertion positions do not cover its active days exactly")]
    PositionsMismatch { customer: usize },
    #[error("vehicle {vehicle} day {day}: route disagrees with the vehicle's active customers near customer {customer}")]
    RouteMismatch {
        vehicle: usize,
        day: usize,
        customer: usize,
    },
}

// ---- instance ----

/// Raw instance fields; `build` validates them into an [`Instance`].
///
/// All vectors are indexed by node id with the depot at index 0, so every
/// per-node vector has `customer_count + 1` entries and both matrices are
/// square of that dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceData {
    pub name: String,
    pub source: String,
    pub day_count: usize,
    pub capacity: u64,
    pub horizon_end: Time,
    pub service_time: Vec<Time>,
    pub tw_open: Vec<Time>,
    pub tw_close: Vec<Time>,
    /// `demand[node][day]`; the depot row must be all zero.
    pub demand: Vec<Vec<u64>>,
    pub distance: Vec<Vec<Distance>>,
    pub travel_time: Vec<Vec<Time>>,
}

impl InstanceData {
    pub fn build(self) -> Result<Instance, ModelError> {
        let n1 = self.service_time.len();
        let check = |what, got| {
            if got != n1 {
                Err(ModelError::LengthMismatch {
                    what,
                    expected: n1,
                    got,
                })
            } else {
                Ok(())
            }
        };
        check("tw_open", self.tw_open.len())?;
        check("tw_close", self.tw_close.len())?;
        check("demand rows", self.demand.len())?;
        check("distance rows", self.distance.len())?;
        check("travel_time rows", self.travel_time.len())?;
        for row in &self.distance {
            check("distance columns", row.len())?;
        }
        for row in &self.travel_time {
            check("travel_time columns", row.len())?;
        }
        for row in &self.demand {
            if row.len() != self.day_count {
                return Err(ModelError::LengthMismatch {
                    what: "demand days",
                    expected: self.day_count,
                    got: row.len(),
                });
            }
        }
        if n1 == 0 {
            return Err(ModelError::InvalidDepot("no depot record"));
        }
        if self.service_time[DEPOT] != Time::ZERO {
            return Err(ModelError::InvalidDepot("depot service time must be 0"));
        }
        if self.tw_open[DEPOT] != Time::ZERO || self.tw_close[DEPOT] != self.horizon_end {
            return Err(ModelError::InvalidDepot("depot window must be [0, T]"));
        }
        if self.demand[DEPOT].iter().any(|&q| q != 0) {
            return Err(ModelError::InvalidDepot("depot demand must be 0"));
        }
        for node in 0..n1 {
            if self.tw_open[node] > self.tw_close[node] {
                return Err(ModelError::WindowInverted { node });
            }
            if self.tw_open[node] < Time::ZERO || self.tw_close[node] > self.horizon_end {
                return Err(ModelError::WindowOutsideHorizon { node });
            }
        }
        for customer in 1..n1 {
            let days = &self.demand[customer];
            if days.iter().all(|&q| q == 0) {
                return Err(ModelError::NeverActive { customer });
            }
            for (day, &q) in days.iter().enumerate() {
                if q > self.capacity {
                    return Err(ModelError::DemandExceedsCapacity {
                        customer,
                        day,
                        demand: q,
                        capacity: self.capacity,
                    });
                }
            }
        }
        for i in 0..n1 {
            if self.distance[i][i] != Distance::ZERO || self.travel_time[i][i] != Time::ZERO {
                return Err(ModelError::NonzeroDiagonal { node: i });
            }
            for j in 0..n1 {
                if self.distance[i][j] < Distance::ZERO || self.travel_time[i][j] < Time::ZERO {
                    return Err(ModelError::NegativeEntry { i, j });
                }
            }
        }
        Ok(Instance { data: self })
    }
}

/// Validated, immutable problem instance.  Safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    data: InstanceData,
}

impl Instance {
    pub fn name(&self) -> &str {
        &self.data.name
    }

    pub fn source(&self) -> &str {
        &self.data.source
    }

    /// Number of nodes including the depot.
    pub fn node_count(&self) -> usize {
        self.data.service_time.len()
    }

    pub fn customer_count(&self) -> usize {
        self.node_count() - 1
    }

    /// Customer ids in ascending order.
    pub fn customers(&self) -> impl Iterator<Item = usize> + '_ {
        1..self.node_count()
    }

    pub fn day_count(&self) -> usize {
        self.data.day_count
    }

    pub fn days(&self) -> impl Iterator<Item = usize> {
        0..self.data.day_count
    }

    pub fn capacity(&self) -> u64 {
        self.data.capacity
    }

    pub fn horizon_end(&self) -> Time {
        self.data.horizon_end
    }

    pub fn service_time(&self, node: usize) -> Time {
        self.data.service_time[node]
    }

    pub fn tw_open(&self, node: usize) -> Time {
        self.data.tw_open[node]
    }

    pub fn tw_close(&self, node: usize) -> Time {
        self.data.tw_close[node]
    }

    pub fn demand(&self, node: usize, day: usize) -> u64 {
        self.data.demand[node][day]
    }

    pub fn is_active(&self, customer: usize, day: usize) -> bool {
        self.data.demand[customer][day] > 0
    }

    pub fn active_days(&self, customer: usize) -> impl Iterator<Item = usize> + '_ {
        self.data.demand[customer]
            .iter()
            .enumerate()
            .filter(|(_, &q)| q > 0)
            .map(|(d, _)| d)
    }

    pub fn active_day_count(&self, customer: usize) -> usize {
        self.active_days(customer).count()
    }

    pub fn distance(&self, i: usize, j: usize) -> Distance {
        self.data.distance[i][j]
    }

    pub fn travel_time(&self, i: usize, j: usize) -> Time {
        self.data.travel_time[i][j]
    }

    /// Replaces both matrices, revalidating the result.
    pub fn with_matrices(
        &self,
        distance: Vec<Vec<Distance>>,
        travel_time: Vec<Vec<Time>>,
    ) -> Result<Instance, ModelError> {
        let mut data = self.data.clone();
        data.distance = distance;
        data.travel_time = travel_time;
        data.build()
    }

    /// Counts ordered triples where going via an intermediate node is
    /// strictly shorter or faster than the direct arc.  Road matrices may
    /// legitimately contain a few of these; callers warn, they do not fail.
    pub fn triangle_violations(&self) -> usize {
        let n = self.node_count();
        let mut count = 0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    if self.distance(i, k) > self.distance(i, j) + self.distance(j, k)
                        || self.travel_time(i, k) > self.travel_time(i, j) + self.travel_time(j, k)
                    {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    fn check_customer(&self, customer: usize) -> Result<(), ModelError> {
        if customer == DEPOT || customer >= self.node_count() {
            Err(ModelError::UnknownCustomer { customer })
        } else {
            Ok(())
        }
    }
}

// ---- schedule ----

/// Timing of one visit within a day's route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Visit {
    pub customer: usize,
    /// Clamped to the window close when the vehicle is late.
    pub service_start: Time,
    pub wait: Time,
    pub tw_violation: Time,
}

/// Evaluated timing of one vehicle-day route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub visits: Vec<Visit>,
    pub load: u64,
    pub depot_return_time: Time,
    pub return_violation: Time,
    /// True iff every window is met, the vehicle returns by the horizon end
    /// and the load fits the capacity.
    pub feasible: bool,
}

impl Schedule {
    /// Window violations of all visits plus the late-return amount.
    pub fn violation_total(&self) -> Time {
        self.visits.iter().map(|v| v.tw_violation).sum::<Time>() + self.return_violation
    }

    pub fn late_visits(&self) -> usize {
        self.visits
            .iter()
            .filter(|v| v.tw_violation.is_positive())
            .count()
    }
}

/// Distance and travel time of a route, excluding service and waiting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RouteCost {
    pub travel_distance: Distance,
    pub travel_time: Time,
}

/// Core schedule recursion; assumes `seq` was validated.
///
/// The vehicle leaves the depot at time 0.  Early arrivals wait until the
/// window opens; late arrivals record the excess and continue from the
/// window close (time warp).
pub(crate) fn schedule_route(instance: &Instance, day: usize, seq: &[usize]) -> Schedule {
    let mut prev = DEPOT;
    let mut prev_start = Time::ZERO;
    let mut load = 0u64;
    let mut all_on_time = true;
    let mut visits = Vec::with_capacity(seq.len());
    for &c in seq {
        let arrival = prev_start + instance.service_time(prev) + instance.travel_time(prev, c);
        let wait = (instance.tw_open(c) - arrival).max(Time::ZERO);
        let raw = arrival + wait;
        let tw_violation = (raw - instance.tw_close(c)).max(Time::ZERO);
        let service_start = if tw_violation.is_positive() {
            all_on_time = false;
            instance.tw_close(c)
        } else {
            raw
        };
        load += instance.demand(c, day);
        visits.push(Visit {
            customer: c,
            service_start,
            wait,
            tw_violation,
        });
        prev = c;
        prev_start = service_start;
    }
    let depot_return_time = prev_start + instance.service_time(prev) + instance.travel_time(prev, DEPOT);
    let return_violation = (depot_return_time - instance.horizon_end()).max(Time::ZERO);
    let feasible = all_on_time && !return_violation.is_positive() && load <= instance.capacity();
    Schedule {
        visits,
        load,
        depot_return_time,
        return_violation,
        feasible,
    }
}

/// Evaluates one day's route sequence into a [`Schedule`].
pub fn evaluate_route(instance: &Instance, day: usize, seq: &[usize]) -> Result<Schedule, ModelError> {
    for (idx, &c) in seq.iter().enumerate() {
        instance.check_customer(c)?;
        if !instance.is_active(c, day) {
            return Err(ModelError::InactiveCustomer { customer: c, day });
        }
        if seq[..idx].contains(&c) {
            return Err(ModelError::DuplicateCustomer { customer: c });
        }
    }
    Ok(schedule_route(instance, day, seq))
}

/// Distance and travel time of the closed tour depot → seq → depot.
pub fn route_cost(instance: &Instance, seq: &[usize]) -> RouteCost {
    if seq.is_empty() {
        return RouteCost::default();
    }
    let mut cost = RouteCost::default();
    let mut prev = DEPOT;
    for &c in seq {
        cost.travel_distance += instance.distance(prev, c);
        cost.travel_time += instance.travel_time(prev, c);
        prev = c;
    }
    cost.travel_distance += instance.distance(prev, DEPOT);
    cost.travel_time += instance.travel_time(prev, DEPOT);
    cost
}

// ---- solution ----

/// One vehicle: its customer set and one ordered route per day.
///
/// The `id` is a stable driver label: it survives route elimination and
/// solution updates, which is what the consistency metrics diff against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vehicle {
    id: u32,
    customers: Vec<usize>,
    routes: Vec<Vec<usize>>,
}

impl Vehicle {
    pub fn id(&self) -> u32 {
        self.id
    }

    /// Assigned customers in ascending id order.
    pub fn customers(&self) -> &[usize] {
        &self.customers
    }

    pub fn route(&self, day: usize) -> &[usize] {
        &self.routes[day]
    }

    pub fn is_empty(&self) -> bool {
        self.customers.is_empty()
    }

    /// Total number of visits over the horizon.
    pub fn visit_total(&self) -> usize {
        self.routes.iter().map(|r| r.len()).sum()
    }
}

/// A (possibly partial) assignment of customers to vehicles with per-day
/// routes.  Customers not present in any vehicle are simply unassigned;
/// completeness is checked where it matters, not here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    day_count: usize,
    vehicles: Vec<Vehicle>,
    next_vehicle_id: u32,
}

impl Solution {
    pub fn new(day_count: usize) -> Solution {
        Solution {
            day_count,
            vehicles: Vec::new(),
            next_vehicle_id: 0,
        }
    }

    pub fn day_count(&self) -> usize {
        self.day_count
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn vehicle(&self, k: usize) -> &Vehicle {
        &self.vehicles[k]
    }

    pub fn vehicle_count(&self) -> usize {
        self.vehicles.len()
    }

    /// Number of vehicles actually serving someone.
    pub fn nv(&self) -> usize {
        self.vehicles.iter().filter(|v| !v.is_empty()).count()
    }

    /// Appends an empty vehicle and returns its index.
    pub fn add_vehicle(&mut self) -> usize {
        let id = self.next_vehicle_id;
        self.next_vehicle_id += 1;
        self.vehicles.push(Vehicle {
            id,
            customers: Vec::new(),
            routes: vec![Vec::new(); self.day_count],
        });
        self.vehicles.len() - 1
    }

    /// Used by the solution reader; ids must be unique.
    pub(crate) fn push_vehicle_raw(&mut self, id: u32, customers: Vec<usize>, routes: Vec<Vec<usize>>) {
        self.next_vehicle_id = self.next_vehicle_id.max(id + 1);
        self.vehicles.push(Vehicle {
            id,
            customers,
            routes,
        });
    }

    pub fn remove_vehicle(&mut self, k: usize) -> Vehicle {
        self.vehicles.remove(k)
    }

    /// Drops vehicles with no customers; returns how many were dropped.
    pub fn prune_empty_vehicles(&mut self) -> usize {
        let before = self.vehicles.len();
        self.vehicles.retain(|v| !v.is_empty());
        before - self.vehicles.len()
    }

    /// Vehicle index currently serving `v`, if any.
    pub fn vehicle_of(&self, v: usize) -> Option<usize> {
        self.vehicles
            .iter()
            .position(|veh| veh.customers.binary_search(&v).is_ok())
    }

    /// Customer id → vehicle id map (the driver assignment).
    pub fn assignment(&self) -> BTreeMap<usize, u32> {
        let mut map = BTreeMap::new();
        for veh in &self.vehicles {
            for &c in &veh.customers {
                map.insert(c, veh.id);
            }
        }
        map
    }

    /// Customers of `instance` not assigned to any vehicle.
    pub fn unassigned(&self, instance: &Instance) -> Vec<usize> {
        let mut assigned = vec![false; instance.node_count()];
        for veh in &self.vehicles {
            for &c in &veh.customers {
                if c < assigned.len() {
                    assigned[c] = true;
                }
            }
        }
        instance.customers().filter(|&c| !assigned[c]).collect()
    }

    /// Inserts `v` into vehicle `k` at one position per active day.
    ///
    /// `positions` must name each active day of `v` exactly once; order is
    /// irrelevant.  Fails without mutating on any contract violation.
    pub fn insert_customer(
        &mut self,
        instance: &Instance,
        k: usize,
        v: usize,
        positions: &[(usize, usize)],
    ) -> Result<(), ModelError> {
        instance.check_customer(v)?;
        if k >= self.vehicles.len() {
            return Err(ModelError::UnknownVehicle { vehicle: k });
        }
        if self.vehicle_of(v).is_some() {
            return Err(ModelError::CustomerAlreadyAssigned { customer: v });
        }
        check_positions_cover(instance, v, positions)?;
        for &(day, pos) in positions {
            let len = self.vehicles[k].routes[day].len();
            if pos > len {
                return Err(ModelError::PositionOutOfRange {
                    day,
                    position: pos,
                    len,
                });
            }
        }
        let veh = &mut self.vehicles[k];
        for &(day, pos) in positions {
            veh.routes[day].insert(pos, v);
        }
        let at = veh.customers.binary_search(&v).unwrap_err();
        veh.customers.insert(at, v);
        Ok(())
    }

    /// Removes `v` from its vehicle on all days; returns where it sat so the
    /// caller can undo the removal exactly.
    pub fn remove_customer(&mut self, v: usize) -> Result<RemovedCustomer, ModelError> {
        let k = self
            .vehicle_of(v)
            .ok_or(ModelError::CustomerNotAssigned { customer: v })?;
        let veh = &mut self.vehicles[k];
        let mut positions = Vec::new();
        for (day, route) in veh.routes.iter_mut().enumerate() {
            if let Some(pos) = route.iter().position(|&c| c == v) {
                route.remove(pos);
                positions.push((day, pos));
            }
        }
        let at = veh.customers.binary_search(&v).unwrap();
        veh.customers.remove(at);
        Ok(RemovedCustomer {
            vehicle: k,
            positions,
        })
    }

    pub(crate) fn route_mut(&mut self, k: usize, day: usize) -> &mut Vec<usize> {
        &mut self.vehicles[k].routes[day]
    }

    /// Schedule of vehicle `k` on `day`, derived from the stored route.
    pub fn schedule(&self, instance: &Instance, k: usize, day: usize) -> Schedule {
        schedule_route(instance, day, self.vehicles[k].route(day))
    }

    /// Summed travel cost over all vehicles and days.
    pub fn total_cost(&self, instance: &Instance) -> RouteCost {
        let mut total = RouteCost::default();
        for veh in &self.vehicles {
            for route in &veh.routes {
                let c = route_cost(instance, route);
                total.travel_distance += c.travel_distance;
                total.travel_time += c.travel_time;
            }
        }
        total
    }

    /// Structural validation: every customer in at most one vehicle, and
    /// each day's route is a permutation of the vehicle's customers active
    /// that day.  Unassigned customers are allowed.
    pub fn validate(&self, instance: &Instance) -> Result<(), ModelError> {
        let mut seen = vec![false; instance.node_count()];
        let mut ids = Vec::new();
        for (k, veh) in self.vehicles.iter().enumerate() {
            if ids.contains(&veh.id) {
                return Err(ModelError::InvalidDepot("duplicate vehicle id"));
            }
            ids.push(veh.id);
            if veh.routes.len() != self.day_count || self.day_count != instance.day_count() {
                return Err(ModelError::LengthMismatch {
                    what: "vehicle routes",
                    expected: instance.day_count(),
                    got: veh.routes.len(),
                });
            }
            for win in veh.customers.windows(2) {
                if win[0] >= win[1] {
                    return Err(ModelError::DuplicateCustomer { customer: win[1] });
                }
            }
            for &c in &veh.customers {
                instance.check_customer(c)?;
                if seen[c] {
                    return Err(ModelError::DuplicateCustomer { customer: c });
                }
                seen[c] = true;
            }
            for (day, route) in veh.routes.iter().enumerate() {
                let mut in_route = vec![false; instance.node_count()];
                for &c in route {
                    instance.check_customer(c)?;
                    if in_route[c] {
                        return Err(ModelError::DuplicateCustomer { customer: c });
                    }
                    in_route[c] = true;
                    if veh.customers.binary_search(&c).is_err() || !instance.is_active(c, day) {
                        return Err(ModelError::RouteMismatch {
                            vehicle: k,
                            day,
                            customer: c,
                        });
                    }
                }
                for &c in &veh.customers {
                    if instance.is_active(c, day) && !in_route[c] {
                        return Err(ModelError::RouteMismatch {
                            vehicle: k,
                            day,
                            customer: c,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Undo record of [`Solution::remove_customer`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovedCustomer {
    pub vehicle: usize,
    /// (day, position) pairs in ascending day order.
    pub positions: Vec<(usize, usize)>,
}

fn check_positions_cover(
    instance: &Instance,
    v: usize,
    positions: &[(usize, usize)],
) -> Result<(), ModelError> {
    let mut days: Vec<usize> = positions.iter().map(|&(d, _)| d).collect();
    days.sort_unstable();
    days.dedup();
    if days.len() != positions.len() {
        return Err(ModelError::PositionsMismatch { customer: v });
    }
    let active: Vec<usize> = instance.active_days(v).collect();
    if days != active {
        return Err(ModelError::PositionsMismatch { customer: v });
    }
    Ok(())
}

// ---- solution metrics ----

/// Aggregate quality and feasibility numbers of a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionMetrics {
    /// Non-empty vehicles.
    pub nv: usize,
    pub travel_time: Time,
    pub total_distance: Distance,
    pub visits: usize,
    pub late_visits: usize,
    /// Percentage of visits arriving after the window close.
    pub ptw_pct: f64,
    /// Total lateness as a percentage of total travel time.
    pub ltw_pct: f64,
    pub feasible: bool,
}

/// Validates `solution` structurally, then computes its metrics.
pub fn evaluate_solution(
    instance: &Instance,
    solution: &Solution,
) -> Result<SolutionMetrics, ModelError> {
    solution.validate(instance)?;
    let mut travel_time = Time::ZERO;
    let mut total_distance = Distance::ZERO;
    let mut visits = 0usize;
    let mut late_visits = 0usize;
    let mut lateness = Time::ZERO;
    let mut feasible = true;
    for k in 0..solution.vehicle_count() {
        for day in instance.days() {
            let route = solution.vehicle(k).route(day);
            let cost = route_cost(instance, route);
            travel_time += cost.travel_time;
            total_distance += cost.travel_distance;
            let sched = solution.schedule(instance, k, day);
            visits += sched.visits.len();
            late_visits += sched.late_visits();
            lateness += sched.violation_total();
            feasible &= sched.feasible;
        }
    }
    let ptw_pct = if visits == 0 {
        0.0
    } else {
        100.0 * late_visits as f64 / visits as f64
    };
    let ltw_pct = if travel_time == Time::ZERO {
        0.0
    } else {
        100.0 * lateness.minutes() / travel_time.minutes()
    };
    Ok(SolutionMetrics {
        nv: solution.nv(),
        travel_time,
        total_distance,
        visits,
        late_visits,
        ptw_pct,
        ltw_pct,
        feasible,
    })
}

// ---- insertion probing ----

/// Simulated schedules for inserting a customer, without mutating anything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionCheck {
    /// (day, schedule of the candidate route) per active day, ascending.
    pub days: Vec<(usize, Schedule)>,
    /// True iff every active day's candidate route stays feasible.
    pub feasible: bool,
}

/// Probes inserting unassigned customer `v` into vehicle `k` at one given
/// position per active day.
pub fn check_insertion(
    instance: &Instance,
    solution: &Solution,
    k: usize,
    v: usize,
    positions: &[(usize, usize)],
) -> Result<InsertionCheck, ModelError> {
    instance.check_customer(v)?;
    if k >= solution.vehicle_count() {
        return Err(ModelError::UnknownVehicle { vehicle: k });
    }
    if solution.vehicle_of(v).is_some() {
        return Err(ModelError::CustomerAlreadyAssigned { customer: v });
    }
    check_positions_cover(instance, v, positions)?;
    let mut ordered: Vec<(usize, usize)> = positions.to_vec();
    ordered.sort_unstable();
    let mut days = Vec::with_capacity(ordered.len());
    let mut feasible = true;
    let mut candidate = Vec::new();
    for (day, pos) in ordered {
        let route = solution.vehicle(k).route(day);
        if pos > route.len() {
            return Err(ModelError::PositionOutOfRange {
                day,
                position: pos,
                len: route.len(),
            });
        }
        candidate.clear();
        candidate.extend_from_slice(&route[..pos]);
        candidate.push(v);
        candidate.extend_from_slice(&route[pos..]);
        let sched = schedule_route(instance, day, &candidate);
        feasible &= sched.feasible;
        days.push((day, sched));
    }
    Ok(InsertionCheck { days, feasible })
}
