//! Shared helpers for the in-crate unit tests: tiny hand-built instances,
//! seeded random instances, random (often infeasible) solutions and a
//! from-scratch schedule oracle.

use crate::model::{Instance, InstanceData, Solution, DEPOT};
use crate::units::{Distance, Time};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Builder for explicit test instances; times in whole minutes, one distance
/// unit per travel minute.  Unset arcs stay at zero.
pub(crate) struct TestInstance {
    horizon: i64,
    capacity: u64,
    // per customer: (demand per day, open, close, service)
    customers: Vec<(Vec<u64>, i64, i64, i64)>,
    arcs: Vec<(usize, usize, i64)>,
}

impl TestInstance {
    pub fn new(horizon_minutes: i64, capacity: u64) -> TestInstance {
        TestInstance {
            horizon: horizon_minutes,
            capacity,
            customers: Vec::new(),
            arcs: Vec::new(),
        }
    }

    pub fn customer(mut self, demand_per_day: &[u64], open: i64, close: i64, service: i64) -> Self {
        self.customers
            .push((demand_per_day.to_vec(), open, close, service));
        self
    }

    /// Sets travel time and distance for both directions of an arc.
    pub fn travel(mut self, i: usize, j: usize, minutes: i64) -> Self {
        self.arcs.push((i, j, minutes));
        self.arcs.push((j, i, minutes));
        self
    }

    pub fn try_build(self) -> Result<Instance, crate::model::ModelError> {
        let n1 = self.customers.len() + 1;
        let day_count = self.customers.first().map_or(1, |c| c.0.len());
        let mut service_time = vec![Time::ZERO; n1];
        let mut tw_open = vec![Time::ZERO; n1];
        let mut tw_close = vec![Time::from_minutes(self.horizon); n1];
        let mut demand = vec![vec![0u64; day_count]; n1];
        for (idx, (q, open, close, service)) in self.customers.iter().enumerate() {
            let node = idx + 1;
            service_time[node] = Time::from_minutes(*service);
            tw_open[node] = Time::from_minutes(*open);
            tw_close[node] = Time::from_minutes(*close);
            demand[node] = q.clone();
        }
        let mut distance = vec![vec![Distance::ZERO; n1]; n1];
        let mut travel_time = vec![vec![Time::ZERO; n1]; n1];
        for (i, j, minutes) in self.arcs {
            distance[i][j] = Distance::from_units_f64(minutes as f64);
            travel_time[i][j] = Time::from_minutes(minutes);
        }
        InstanceData {
            name: "test".into(),
            source: "test".into(),
            day_count,
            capacity: self.capacity,
            horizon_end: Time::from_minutes(self.horizon),
            service_time,
            tw_open,
            tw_close,
            demand,
            distance,
            travel_time,
        }
        .build()
    }

    pub fn build(self) -> Instance {
        self.try_build().expect("test instance must validate")
    }
}

/// Deterministic instance: customers strung out on a line, wide windows,
/// customer `c` active on day `d` iff `(c + d)` is even (all days when
/// `days == 1`).  Singleton routes are always feasible.
pub(crate) fn small_instance(n: usize, days: usize, capacity: u64) -> Instance {
    let mut b = TestInstance::new(400, capacity);
    for c in 1..=n {
        let demand: Vec<u64> = (0..days)
            .map(|d| {
                if days == 1 || (c + d) % 2 == 0 {
                    (c % 3 + 1) as u64
                } else {
                    0
                }
            })
            .collect();
        b = b.customer(&demand, 0, 400, 5);
    }
    for i in 0..=n {
        for j in (i + 1)..=n {
            b = b.travel(i, j, (j - i) as i64 * 7);
        }
    }
    b.build()
}

/// Every customer alone in its own vehicle, routes in id order.
pub(crate) fn one_per_vehicle(instance: &Instance) -> Solution {
    let mut sol = Solution::new(instance.day_count());
    for c in instance.customers() {
        let k = sol.add_vehicle();
        let positions: Vec<(usize, usize)> = instance.active_days(c).map(|d| (d, 0)).collect();
        sol.insert_customer(instance, k, c, &positions).unwrap();
    }
    sol
}

/// Random geometric instance with truncated-to-one-decimal Euclidean travel,
/// random windows (possibly tight) and ~70% per-day activity.
pub(crate) fn random_instance(rng: &mut ChaCha8Rng, n: usize, days: usize) -> Instance {
    let horizon = 400i64;
    let mut coords = vec![(0.0f64, 0.0f64)];
    for _ in 0..n {
        coords.push((rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)));
    }
    let capacity = rng.gen_range(10..=25) as u64;
    let n1 = n + 1;
    let mut service_time = vec![Time::ZERO; n1];
    let mut tw_open = vec![Time::ZERO; n1];
    let mut tw_close = vec![Time::from_minutes(horizon); n1];
    let mut demand = vec![vec![0u64; days]; n1];
    for c in 1..=n {
        service_time[c] = Time::from_minutes(rng.gen_range(3..=12));
        let open = rng.gen_range(0..horizon * 6 / 10);
        let width = rng.gen_range(20..=horizon / 2);
        tw_open[c] = Time::from_minutes(open);
        tw_close[c] = Time::from_minutes((open + width).min(horizon));
        for day_demand in demand[c].iter_mut() {
            if rng.gen_bool(0.7) {
                *day_demand = rng.gen_range(1..=capacity.min(10));
            }
        }
        if demand[c].iter().all(|&q| q == 0) {
            let d = rng.gen_range(0..days);
            demand[c][d] = rng.gen_range(1..=capacity.min(10));
        }
    }
    let mut distance = vec![vec![Distance::ZERO; n1]; n1];
    let mut travel_time = vec![vec![Time::ZERO; n1]; n1];
    for i in 0..n1 {
        for j in 0..n1 {
            if i == j {
                continue;
            }
            let dx = coords[i].0 - coords[j].0;
            let dy = coords[i].1 - coords[j].1;
            let tenths = (dx.hypot(dy) * 10.0).floor() as i64;
            distance[i][j] = Distance::from_metres(tenths * 100);
            travel_time[i][j] = Time::from_deci_minutes(tenths);
        }
    }
    InstanceData {
        name: format!("rand-n{n}-d{days}"),
        source: "random".into(),
        day_count: days,
        capacity,
        horizon_end: Time::from_minutes(horizon),
        service_time,
        tw_open,
        tw_close,
        demand,
        distance,
        travel_time,
    }
    .build()
    .expect("random instance must validate")
}

/// Assigns `count` random customers over `vehicles` vehicles at random
/// positions; the rest stay unassigned.  No feasibility guarantee.
pub(crate) fn random_solution_of(
    rng: &mut ChaCha8Rng,
    instance: &Instance,
    vehicles: usize,
    count: usize,
) -> Solution {
    let mut sol = Solution::new(instance.day_count());
    for _ in 0..vehicles {
        sol.add_vehicle();
    }
    let mut customers: Vec<usize> = instance.customers().collect();
    customers.shuffle(rng);
    for &c in customers.iter().take(count) {
        let k = rng.gen_range(0..vehicles);
        let positions: Vec<(usize, usize)> = instance
            .active_days(c)
            .map(|d| {
                let len = sol.vehicle(k).route(d).len();
                (d, rng.gen_range(0..=len))
            })
            .collect();
        sol.insert_customer(instance, k, c, &positions).unwrap();
    }
    sol
}

/// Random complete assignment of all customers.
pub(crate) fn random_solution(rng: &mut ChaCha8Rng, instance: &Instance, vehicles: usize) -> Solution {
    random_solution_of(rng, instance, vehicles, instance.customer_count())
}

/// Route evaluation rebuilt from scratch in raw i64 deci-minutes, used as an
/// independent oracle against the production schedule code.
pub(crate) struct HandRoute {
    /// Clamped service starts, deci-minutes, one per visit.
    pub starts_dm: Vec<i64>,
    pub return_dm: i64,
    /// Window lateness plus depot-return lateness, deci-minutes.
    pub late_dm: i64,
    pub load: u64,
    pub feasible: bool,
}

pub(crate) fn hand_route(instance: &Instance, day: usize, seq: &[usize]) -> HandRoute {
    let mut prev = DEPOT;
    let mut t = 0i64;
    let mut starts_dm = Vec::new();
    let mut late_dm = 0i64;
    let mut load = 0u64;
    for &c in seq {
        let arrival = t
            + instance.service_time(prev).deci_minutes()
            + instance.travel_time(prev, c).deci_minutes();
        let open = instance.tw_open(c).deci_minutes();
        let close = instance.tw_close(c).deci_minutes();
        let mut b = arrival.max(open);
        if b > close {
            late_dm += b - close;
            b = close;
        }
        starts_dm.push(b);
        load += instance.demand(c, day);
        t = b;
        prev = c;
    }
    let return_dm = t
        + instance.service_time(prev).deci_minutes()
        + instance.travel_time(prev, DEPOT).deci_minutes();
    late_dm += (return_dm - instance.horizon_end().deci_minutes()).max(0);
    HandRoute {
        starts_dm,
        return_dm,
        late_dm,
        load,
        feasible: late_dm == 0 && load <= instance.capacity(),
    }
}
