//! Penalized-cost local search: move operators, feasibility restoration and
//! final route polishing.
//!
//! Over-capacity and late plans are scored by `F_p = P_c + alpha * P_tw`
//! summed over vehicle-days, where `P_c` is capacity excess and `P_tw` is
//! window plus depot-return lateness under time-warp evaluation.  Two move
//! operators drive everything: inter-route relocation (a customer moves to
//! another vehicle on all days it needs service, so the one-driver rule is
//! never broken) and intra-route 2-opt (a segment of one day's route is
//! reversed in place).  Both take best-improvement steps under either plain
//! travel distance or `F_p`.
//!
//! Under the distance objective only feasibility-preserving moves are
//! admitted, and relocation never targets an empty vehicle, so the vehicle
//! count cannot grow.  Move deltas are accumulated in integer metres and
//! deci-minutes, which keeps improvement tests exact and descent loops free
//! of float-noise cycling.

use crate::model::{route_cost, schedule_route, Instance, Solution};
use crate::units::Time;

pub const ALPHA_MIN: f64 = 1e-3;
pub const ALPHA_MAX: f64 = 1e3;

/// State of the penalty weighting used during feasibility restoration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParams {
    /// Weight of time violations relative to capacity violations.
    pub alpha: f64,
    /// Multiplicative step applied after every failed restoration.
    pub adaptation_factor: f64,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        PenaltyParams {
            alpha: 1.0,
            adaptation_factor: 0.99,
        }
    }
}

/// Violation totals of a solution under one alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyBreakdown {
    /// Capacity excess summed over all vehicle-days, demand units.
    pub p_c: u64,
    /// Window and depot-return lateness summed over all vehicle-days.
    pub p_tw: Time,
    /// Combined penalized cost `p_c + alpha * p_tw`, lateness in minutes.
    pub f_p: f64,
}

impl PenaltyBreakdown {
    /// True iff the solution is fully feasible.
    pub fn is_zero(&self) -> bool {
        self.p_c == 0 && !self.p_tw.is_positive()
    }
}

/// Violation totals of `solution` weighted by `alpha`.
pub fn penalty(instance: &Instance, solution: &Solution, alpha: f64) -> PenaltyBreakdown {
    let mut p_c = 0u64;
    let mut p_tw = Time::ZERO;
    for k in 0..solution.vehicle_count() {
        for day in 0..solution.day_count() {
            let sched = solution.schedule(instance, k, day);
            p_c += sched.load.saturating_sub(instance.capacity());
            p_tw += sched.violation_total();
        }
    }
    PenaltyBreakdown {
        p_c,
        p_tw,
        f_p: p_c as f64 + alpha * p_tw.minutes(),
    }
}

/// Next alpha after a failed restoration: when capacity excess is the
/// smaller violation the time weight rises, otherwise it falls.  Clamped to
/// `[ALPHA_MIN, ALPHA_MAX]`.
pub fn adapt_alpha(breakdown: &PenaltyBreakdown, params: &PenaltyParams) -> f64 {
    let alpha = if (breakdown.p_c as f64) < breakdown.p_tw.minutes() {
        params.alpha / params.adaptation_factor
    } else {
        params.alpha * params.adaptation_factor
    };
    alpha.clamp(ALPHA_MIN, ALPHA_MAX)
}

// ---- move machinery ----

/// What a move is judged by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// Total travel distance; only feasibility-preserving moves are admitted.
    Distance,
    /// Penalized cost under the given alpha; infeasible states are allowed.
    Fp { alpha: f64 },
}

/// Integer route measurements on one day.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct DayStats {
    pub excess: i64,
    pub late_dm: i64,
    pub dist_m: i64,
    pub feasible: bool,
}

pub(crate) fn day_stats(instance: &Instance, day: usize, seq: &[usize]) -> DayStats {
    let sched = schedule_route(instance, day, seq);
    DayStats {
        excess: sched.load.saturating_sub(instance.capacity()) as i64,
        late_dm: sched.violation_total().deci_minutes(),
        dist_m: route_cost(instance, seq).travel_distance.metres(),
        feasible: sched.feasible,
    }
}

/// Accumulated change across every route a move touches.
#[derive(Debug, Clone, Copy, Default)]
struct Delta {
    excess: i64,
    late_dm: i64,
    dist_m: i64,
    /// All touched routes feasible after the move.
    feasible: bool,
}

impl Delta {
    fn new() -> Delta {
        Delta {
            feasible: true,
            ..Default::default()
        }
    }

    fn absorb(&mut self, new: DayStats, old: DayStats) {
        self.excess += new.excess - old.excess;
        self.late_dm += new.late_dm - old.late_dm;
        self.dist_m += new.dist_m - old.dist_m;
        self.feasible &= new.feasible;
    }

    fn admissible(&self, objective: Objective) -> bool {
        match objective {
            Objective::Distance => self.feasible,
            Objective::Fp { .. } => true,
        }
    }

    /// Objective change; exact zero for genuinely unchanged quality.
    fn objective(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Distance => self.dist_m as f64 / 1000.0,
            Objective::Fp { alpha } => self.excess as f64 + alpha * self.late_dm as f64 / 10.0,
        }
    }

    /// Sort key: objective first, travel distance as the tiebreak.
    fn key(&self, objective: Objective) -> (f64, i64) {
        (self.objective(objective), self.dist_m)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Move {
    /// Move customer `v` into vehicle `to` at one slot per active day.
    Relocate {
        v: usize,
        to: usize,
        positions: Vec<(usize, usize)>,
    },
    /// Reverse positions `i..=j` of vehicle `k`'s route on `day`.
    Reverse {
        k: usize,
        day: usize,
        i: usize,
        j: usize,
    },
}

fn apply_move(instance: &Instance, solution: &mut Solution, mv: &Move) {
    match mv {
        Move::Relocate { v, to, positions } => {
            solution.remove_customer(*v).expect("move names an assigned customer");
            solution
                .insert_customer(instance, *to, *v, positions)
                .expect("move positions stay valid");
        }
        Move::Reverse { k, day, i, j } => {
            solution.route_mut(*k, *day)[*i..=*j].reverse();
        }
    }
}

/// Best strictly improving relocation, if any.
fn best_relocate(
    instance: &Instance,
    solution: &Solution,
    objective: Objective,
) -> Option<(Move, (f64, i64))> {
    let mut best: Option<(Move, (f64, i64))> = None;
    for a in 0..solution.vehicle_count() {
        for &v in solution.vehicle(a).customers() {
            // removal effect on the source routes, shared by all targets
            let mut removal = Delta::new();
            let mut shortened: Vec<(usize, Vec<usize>)> = Vec::new();
            for day in instance.active_days(v) {
                let route = solution.vehicle(a).route(day);
                let without: Vec<usize> = route.iter().copied().filter(|&c| c != v).collect();
                removal.absorb(day_stats(instance, day, &without), day_stats(instance, day, route));
                shortened.push((day, without));
            }
            for to in 0..solution.vehicle_count() {
                if to == a || solution.vehicle(to).is_empty() {
                    continue;
                }
                let mut delta = removal;
                let mut positions = Vec::with_capacity(shortened.len());
                let mut fits = true;
                for (day, _) in &shortened {
                    let target = solution.vehicle(to).route(*day);
                    let old = day_stats(instance, *day, target);
                    let mut slot: Option<(DayStats, (f64, i64), usize)> = None;
                    let mut candidate = Vec::with_capacity(target.len() + 1);
                    for p in 0..=target.len() {
                        candidate.clear();
                        candidate.extend_from_slice(&target[..p]);
                        candidate.push(v);
                        candidate.extend_from_slice(&target[p..]);
                        let stats = day_stats(instance, *day, &candidate);
                        let mut piece = Delta::new();
                        piece.absorb(stats, old);
                        if !piece.admissible(objective) {
                            continue;
                        }
                        let key = piece.key(objective);
                        if slot.as_ref().is_none_or(|(_, k, _)| key < *k) {
                            slot = Some((stats, key, p));
                        }
                    }
                    match slot {
                        Some((stats, _, p)) => {
                            delta.absorb(stats, old);
                            positions.push((*day, p));
                        }
                        None => {
                            fits = false;
                            break;
                        }
                    }
                }
                if !fits || !delta.admissible(objective) {
                    continue;
                }
                let key = delta.key(objective);
                if key.0 < 0.0 && best.as_ref().is_none_or(|(_, k)| key < *k) {
                    best = Some((Move::Relocate { v, to, positions }, key));
                }
            }
        }
    }
    best
}

/// Best strictly improving segment reversal, if any.
fn best_two_opt(
    instance: &Instance,
    solution: &Solution,
    objective: Objective,
) -> Option<(Move, (f64, i64))> {
    let mut best: Option<(Move, (f64, i64))> = None;
    for k in 0..solution.vehicle_count() {
        for day in 0..solution.day_count() {
            let route = solution.vehicle(k).route(day);
            if route.len() < 2 {
                continue;
            }
            let old = day_stats(instance, day, route);
            for i in 0..route.len() - 1 {
                for j in i + 1..route.len() {
                    let mut candidate = route.to_vec();
                    candidate[i..=j].reverse();
                    let mut delta = Delta::new();
                    delta.absorb(day_stats(instance, day, &candidate), old);
                    if !delta.admissible(objective) {
                        continue;
                    }
                    let key = delta.key(objective);
                    if key.0 < 0.0 && best.as_ref().is_none_or(|(_, b)| key < *b) {
                        best = Some((Move::Reverse { k, day, i, j }, key));
                    }
                }
            }
        }
    }
    best
}

/// Repeated best-improvement relocation until no move improves the
/// objective.  Returns the number of applied moves.
pub fn relocate_inter(instance: &Instance, solution: &mut Solution, objective: Objective) -> usize {
    let mut applied = 0;
    while let Some((mv, _)) = best_relocate(instance, solution, objective) {
        apply_move(instance, solution, &mv);
        applied += 1;
    }
    applied
}

/// Repeated best-improvement segment reversal until no move improves the
/// objective.  Returns the number of applied moves.
pub fn two_opt_intra(instance: &Instance, solution: &mut Solution, objective: Objective) -> usize {
    let mut applied = 0;
    while let Some((mv, _)) = best_two_opt(instance, solution, objective) {
        apply_move(instance, solution, &mv);
        applied += 1;
    }
    applied
}

/// Hill-climbs `F_p` towards zero with both operators, at most `budget`
/// moves.  Returns true iff the solution became fully feasible; on failure
/// the solution is left at the best state reached (never worse than the
/// input).
pub fn restore_feasibility(
    instance: &Instance,
    solution: &mut Solution,
    alpha: f64,
    budget: usize,
) -> bool {
    let objective = Objective::Fp { alpha };
    let mut applied = 0;
    loop {
        if penalty(instance, solution, alpha).is_zero() {
            return true;
        }
        if applied >= budget {
            return false;
        }
        let relocate = best_relocate(instance, solution, objective);
        let reverse = best_two_opt(instance, solution, objective);
        let mv = match (relocate, reverse) {
            (Some((m, a)), Some((_, b))) if a <= b => Some(m),
            (_, Some((m, _))) => Some(m),
            (Some((m, _)), None) => Some(m),
            (None, None) => None,
        };
        match mv {
            Some(mv) => {
                apply_move(instance, solution, &mv);
                applied += 1;
            }
            None => return false,
        }
    }
}

/// Distance descent on a feasible solution: alternates 2-opt and relocation
/// until neither improves.  Never increases distance or the vehicle count.
/// Returns the number of applied moves.
pub fn reoptimize(instance: &Instance, solution: &mut Solution) -> usize {
    let mut total = 0;
    loop {
        let n = two_opt_intra(instance, solution, Objective::Distance)
            + relocate_inter(instance, solution, Objective::Distance);
        if n == 0 {
            return total;
        }
        total += n;
    }
}
