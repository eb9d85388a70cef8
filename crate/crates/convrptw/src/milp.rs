//! Mixed-integer model exporter in the LP text format.
//!
//! The model minimizes the number of vehicles used over the horizon.
//! Variables: `x_i_j_k_d` (vehicle k drives arc i->j on day d, binary),
//! `y_i_k_d` (vehicle k serves customer i on day d, binary), `z_k`
//! (vehicle k is used at all, binary) and `a_i_d` (service start time at
//! node i on day d, continuous minutes; 0 when unserved).
//!
//! Row families, in file order:
//!
//! - `serve_i_d`: each customer is served by exactly one vehicle on each
//!   day they order.
//! - `cap_k_d`: per-day vehicle load stays within capacity (omitted for
//!   days with no orders, which would produce an empty row).
//! - `use_i_k_d`: serving a customer marks the vehicle as used.
//! - `degin_j_k_d`, `degout_j_k_d`: a served customer has exactly one
//!   incoming and one outgoing arc of its vehicle.
//! - `depotflow_k_d`, `depotout_k_d`: depot departures equal returns, and
//!   a used vehicle starts at most one tour per day.  A per-day equality
//!   (exactly one tour on every day for every used vehicle) would make any
//!   plan infeasible whenever a vehicle has a day with no active
//!   customers, so the exporter deliberately allows idle days.
//! - `consist_i_k_a_b`: a customer ordering on two days gets the same
//!   vehicle on both (vacuous unless both days order).
//! - `seq_i_j_k_d`: big-M start-time propagation along chosen arcs,
//!   `a_j >= a_i + s_i + t_ij - (1 - x_ijkd) M_ij`.  Waiting is absorbed
//!   by the inequality together with the window lower bound on `a_j`; the
//!   matching upper-bound row would multiply the decision-dependent
//!   waiting time into the constraint, which no linear row expresses.
//!   The one-sided form also rules out subtours since start times
//!   strictly increase along arcs between distinct customers.  `M_ij` is
//!   per-arc (`u_i + s_i + t_ij`): a single horizon-sized constant would
//!   wrongly constrain unrelated pairs whenever a window closes later
//!   than the horizon minus the arc length.
//! - `return_i_d`: service ends early enough to reach the depot by the
//!   horizon end.
//!
//! Time windows (and `a = 0` for unserved days, depot departure at 0)
//! live in the Bounds section.  All times are minutes with one decimal.
//! Iteration order is fixed (i, then j, then k, then d ascending), so the
//! export is byte-deterministic.

use crate::io::IoError;
use crate::model::{Instance, DEPOT};
use std::fmt::Write as _;
use std::path::Path;

/// Minutes with one decimal; exact for deci-minute quantities.
fn mins(t: crate::units::Time) -> String {
    format!("{:.1}", t.minutes())
}

/// Renders the complete LP document.
pub fn milp_to_string(instance: &Instance) -> String {
    let n = instance.customer_count();
    let vehicles = n;
    let days = instance.day_count();
    let horizon = mins(instance.horizon_end());
    let mut out = String::new();

    let _ = writeln!(out, "\\ minimum-vehicle plan for instance {}", instance.name());
    let _ = writeln!(
        out,
        "\\ {} customers, {} days, capacity {}, horizon {} minutes",
        n,
        days,
        instance.capacity(),
        horizon
    );
    out.push_str("Minimize\n obj:");
    for k in 0..vehicles {
        let _ = write!(out, "{} z_{}", if k == 0 { " " } else { " + " }, k);
    }
    out.push_str("\nSubject To\n");

    // serve_i_d: sum_k y_i_k_d = w_i_d
    for i in instance.customers() {
        for d in 0..days {
            let _ = write!(out, " serve_{i}_{d}:");
            for k in 0..vehicles {
                let _ = write!(out, "{}y_{i}_{k}_{d}", if k == 0 { " " } else { " + " });
            }
            let w = if instance.is_active(i, d) { 1 } else { 0 };
            let _ = writeln!(out, " = {w}");
        }
    }

    // cap_k_d: sum_i q_i_d y_i_k_d <= Q
    for k in 0..vehicles {
        for d in 0..days {
            let active: Vec<usize> = instance.customers().filter(|&i| instance.is_active(i, d)).collect();
            if active.is_empty() {
                continue;
            }
            let _ = write!(out, " cap_{k}_{d}:");
            for (pos, &i) in active.iter().enumerate() {
                let _ = write!(
                    out,
                    "{}{} y_{i}_{k}_{d}",
                    if pos == 0 { " " } else { " + " },
                    instance.demand(i, d)
                );
            }
            let _ = writeln!(out, " <= {}", instance.capacity());
        }
    }

    // use_i_k_d: y_i_k_d - z_k <= 0
    for i in instance.customers() {
        for k in 0..vehicles {
            for d in 0..days {
                let _ = writeln!(out, " use_{i}_{k}_{d}: y_{i}_{k}_{d} - z_{k} <= 0");
            }
        }
    }

    // degin/degout: arc degree of a served customer
    for j in instance.customers() {
        for k in 0..vehicles {
            for d in 0..days {
                let _ = write!(out, " degin_{j}_{k}_{d}:");
                let mut first = true;
                for i in 0..=n {
                    if i == j {
                        continue;
                    }
                    let _ = write!(out, "{}x_{i}_{j}_{k}_{d}", if first { " " } else { " + " });
                    first = false;
                }
                let _ = writeln!(out, " - y_{j}_{k}_{d} = 0");
                let _ = write!(out, " degout_{j}_{k}_{d}:");
                let mut first = true;
                for i in 0..=n {
                    if i == j {
                        continue;
                    }
                    let _ = write!(out, "{}x_{j}_{i}_{k}_{d}", if first { " " } else { " + " });
                    first = false;
                }
                let _ = writeln!(out, " - y_{j}_{k}_{d} = 0");
            }
        }
    }

    // depot flow and tour opening
    for k in 0..vehicles {
        for d in 0..days {
            let _ = write!(out, " depotflow_{k}_{d}:");
            for (pos, j) in instance.customers().enumerate() {
                let _ = write!(out, "{}x_0_{j}_{k}_{d}", if pos == 0 { " " } else { " + " });
            }
            for j in instance.customers() {
                let _ = write!(out, " - x_{j}_0_{k}_{d}");
            }
            let _ = writeln!(out, " = 0");
            let _ = write!(out, " depotout_{k}_{d}:");
            for (pos, j) in instance.customers().enumerate() {
                let _ = write!(out, "{}x_0_{j}_{k}_{d}", if pos == 0 { " " } else { " + " });
            }
            let _ = writeln!(out, " - z_{k} <= 0");
        }
    }

    // consist_i_k_a_b: same vehicle on every ordered pair of days
    for i in instance.customers() {
        for k in 0..vehicles {
            for a in 0..days {
                for b in 0..days {
                    if a == b {
                        continue;
                    }
                    let wa = i64::from(instance.is_active(i, a));
                    let wb = i64::from(instance.is_active(i, b));
                    let _ = writeln!(
                        out,
                        " consist_{i}_{k}_{a}_{b}: y_{i}_{k}_{a} - y_{i}_{k}_{b} >= {}",
                        wa + wb - 2
                    );
                }
            }
        }
    }

    // seq_i_j_k_d: a_i - a_j + M x_ijkd <= M - s_i - t_ij, with the
    // per-arc M = u_i + s_i + t_ij making the row vacuous when x = 0
    for i in 0..=n {
        for j in instance.customers() {
            if i == j {
                continue;
            }
            let big_m = instance.tw_close(i)
                + instance.service_time(i)
                + instance.travel_time(i, j);
            let slack = instance.tw_close(i);
            for k in 0..vehicles {
                for d in 0..days {
                    let _ = writeln!(
                        out,
                        " seq_{i}_{j}_{k}_{d}: a_{i}_{d} - a_{j}_{d} + {} x_{i}_{j}_{k}_{d} <= {}",
                        mins(big_m),
                        mins(slack)
                    );
                }
            }
        }
    }

    // return_i_d: a_i_d <= T - s_i - t_i0
    for i in instance.customers() {
        let latest = instance.horizon_end()
            - instance.service_time(i)
            - instance.travel_time(i, DEPOT);
        for d in 0..days {
            let _ = writeln!(out, " return_{i}_{d}: a_{i}_{d} <= {}", mins(latest));
        }
    }

    // window bounds; unserved days and the depot departure pin to zero
    out.push_str("Bounds\n");
    for d in 0..days {
        let _ = writeln!(out, " a_0_{d} = 0");
    }
    for i in instance.customers() {
        for d in 0..days {
            if instance.is_active(i, d) {
                let _ = writeln!(
                    out,
                    " {} <= a_{i}_{d} <= {}",
                    mins(instance.tw_open(i)),
                    mins(instance.tw_close(i))
                );
            } else {
                let _ = writeln!(out, " a_{i}_{d} = 0");
            }
        }
    }

    out.push_str("Binaries\n");
    let mut on_line = 0;
    let mut push_name = |out: &mut String, name: String| {
        if on_line == 8 {
            out.push('\n');
            on_line = 0;
        }
        let _ = write!(out, " {name}");
        on_line += 1;
    };
    for k in 0..vehicles {
        push_name(&mut out, format!("z_{k}"));
    }
    for i in instance.customers() {
        for k in 0..vehicles {
            for d in 0..days {
                push_name(&mut out, format!("y_{i}_{k}_{d}"));
            }
        }
    }
    for i in 0..=n {
        for j in 0..=n {
            if i == j {
                continue;
            }
            for k in 0..vehicles {
                for d in 0..days {
                    push_name(&mut out, format!("x_{i}_{j}_{k}_{d}"));
                }
            }
        }
    }
    out.push_str("\nEnd\n");
    out
}

/// Writes the LP document to `path`.
pub fn export_milp(instance: &Instance, path: &Path) -> Result<(), IoError> {
    crate::io::write_file(path, &milp_to_string(instance))
}
