//! Native instance and solution files, plus plain-text matrix loading.
//!
//! Both native formats are single self-describing JSON documents with a
//! `format` tag and a `version` number.  All times are stored in tenths of
//! a minute and all distances in metres, exactly as the solver holds them,
//! so a write → read → write cycle is byte-identical.  Field reference:
//!
//! Instance (`convrptw-instance`, version 1): `name`, `source`, `days`,
//! `capacity`, `horizon_end_dmin`, `nodes` (array of `{id, service_dmin,
//! tw_open_dmin, tw_close_dmin, demand[day]}` with node 0 the depot), and
//! the full `distance_m` / `travel_time_dmin` square matrices.
//!
//! Solution (`convrptw-solution`, version 1): `instance` (name), `days`,
//! `vehicles` (array of `{id, customers, routes[day]}`).
//!
//! Matrix files are whitespace-separated numeric rows: distances in
//! benchmark units, travel times in minutes.

use crate::model::{Instance, InstanceData, ModelError, Solution};
use crate::units::{Distance, Time};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const INSTANCE_FORMAT: &str = "convrptw-instance";
pub const SOLUTION_FORMAT: &str = "convrptw-solution";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{field}: {msg}")]
    Schema { field: String, msg: String },
    #[error("invalid document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn schema(field: impl Into<String>, msg: impl Into<String>) -> IoError {
    IoError::Schema {
        field: field.into(),
        msg: msg.into(),
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    fs::write(path, contents).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

// ---- instance document ----

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    format: String,
    version: u32,
    name: String,
    source: String,
    days: usize,
    capacity: u64,
    horizon_end_dmin: i64,
    nodes: Vec<NodeRecord>,
    distance_m: Vec<Vec<i64>>,
    travel_time_dmin: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct NodeRecord {
    id: usize,
    service_dmin: i64,
    tw_open_dmin: i64,
    tw_close_dmin: i64,
    demand: Vec<u64>,
}

pub fn instance_to_string(instance: &Instance) -> String {
    let nodes = (0..instance.node_count())
        .map(|id| NodeRecord {
            id,
            service_dmin: instance.service_time(id).deci_minutes(),
            tw_open_dmin: instance.tw_open(id).deci_minutes(),
            tw_close_dmin: instance.tw_close(id).deci_minutes(),
            demand: (0..instance.day_count())
                .map(|d| instance.demand(id, d))
                .collect(),
        })
        .collect();
    let n = instance.node_count();
    let file = InstanceFile {
        format: INSTANCE_FORMAT.into(),
        version: FORMAT_VERSION,
        name: instance.name().into(),
        source: instance.source().into(),
        days: instance.day_count(),
        capacity: instance.capacity(),
        horizon_end_dmin: instance.horizon_end().deci_minutes(),
        nodes,
        distance_m: (0..n)
            .map(|i| (0..n).map(|j| instance.distance(i, j).metres()).collect())
            .collect(),
        travel_time_dmin: (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| instance.travel_time(i, j).deci_minutes())
                    .collect()
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("instance serializes");
    text.push('\n');
    text
}

pub fn instance_from_str(text: &str) -> Result<Instance, IoError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    if file.format != INSTANCE_FORMAT {
        return Err(schema("format", format!("expected {INSTANCE_FORMAT:?}, got {:?}", file.format)));
    }
    if file.version != FORMAT_VERSION {
        return Err(schema("version", format!("unsupported version {}", file.version)));
    }
    for (idx, node) in file.nodes.iter().enumerate() {
        if node.id != idx {
            return Err(schema(
                format!("nodes[{idx}].id"),
                format!("ids must be ascending from 0, got {}", node.id),
            ));
        }
    }
    let to_time = |v: &[i64]| v.iter().map(|&x| Time::from_deci_minutes(x)).collect::<Vec<_>>();
    let data = InstanceData {
        name: file.name,
        source: file.source,
        day_count: file.days,
        capacity: file.capacity,
        horizon_end: Time::from_deci_minutes(file.horizon_end_dmin),
        service_time: to_time(&file.nodes.iter().map(|n| n.service_dmin).collect::<Vec<_>>()),
        tw_open: to_time(&file.nodes.iter().map(|n| n.tw_open_dmin).collect::<Vec<_>>()),
        tw_close: to_time(&file.nodes.iter().map(|n| n.tw_close_dmin).collect::<Vec<_>>()),
        demand: file.nodes.iter().map(|n| n.demand.clone()).collect(),
        distance: file
            .distance_m
            .iter()
            .map(|row| row.iter().map(|&m| Distance::from_metres(m)).collect())
            .collect(),
        travel_time: file
            .travel_time_dmin
            .iter()
            .map(|row| row.iter().map(|&t| Time::from_deci_minutes(t)).collect())
            .collect(),
    };
    Ok(data.build()?)
}

pub fn write_instance(instance: &Instance, path: &Path) -> Result<(), IoError> {
    write_file(path, &instance_to_string(instance))
}

pub fn read_instance(path: &Path) -> Result<Instance, IoError> {
    instance_from_str(&read_file(path)?)
}

// ---- solution document ----

#[derive(Serialize, Deserialize)]
struct SolutionFile {
    format: String,
    version: u32,
    instance: String,
    days: usize,
    vehicles: Vec<VehicleRecord>,
}

#[derive(Serialize, Deserialize)]
struct VehicleRecord {
    id: u32,
    customers: Vec<usize>,
    routes: Vec<Vec<usize>>,
}

/// A solution document: the assignment plus routes, tagged with the name of
/// the instance it was solved against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionDoc {
    pub instance: String,
    pub solution: Solution,
}

pub fn solution_to_string(doc: &SolutionDoc) -> String {
    let file = SolutionFile {
        format: SOLUTION_FORMAT.into(),
        version: FORMAT_VERSION,
        instance: doc.instance.clone(),
        days: doc.solution.day_count(),
        vehicles: doc
            .solution
            .vehicles()
            .iter()
            .map(|v| VehicleRecord {
                id: v.id(),
                customers: v.customers().to_vec(),
                routes: (0..doc.solution.day_count())
                    .map(|d| v.route(d).to_vec())
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("solution serializes");
    text.push('\n');
    text
}

pub fn solution_from_str(text: &str) -> Result<SolutionDoc, IoError> {
    let file: SolutionFile = serde_json::from_str(text)?;
    if file.format != SOLUTION_FORMAT {
        return Err(schema("format", format!("expected {SOLUTION_FORMAT:?}, got {:?}", file.format)));
    }
    if file.version != FORMAT_VERSION {
        return Err(schema("version", format!("unsupported version {}", file.version)));
    }
    let mut solution = Solution::new(file.days);
    let mut seen_ids = Vec::new();
    for (idx, veh) in file.vehicles.iter().enumerate() {
        if seen_ids.contains(&veh.id) {
            return Err(schema(
                format!("vehicles[{idx}].id"),
                format!("duplicate vehicle id {}", veh.id),
            ));
        }
        seen_ids.push(veh.id);
        if veh.routes.len() != file.days {
            return Err(schema(
                format!("vehicles[{idx}].routes"),
                format!("expected {} day routes, got {}", file.days, veh.routes.len()),
            ));
        }
        if veh.customers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(schema(
                format!("vehicles[{idx}].customers"),
                "customer list must be strictly ascending".to_string(),
            ));
        }
        solution.push_vehicle_raw(veh.id, veh.customers.clone(), veh.routes.clone());
    }
    Ok(SolutionDoc {
        instance: file.instance,
        solution,
    })
}

pub fn write_solution(doc: &SolutionDoc, path: &Path) -> Result<(), IoError> {
    write_file(path, &solution_to_string(doc))
}

pub fn read_solution(path: &Path) -> Result<SolutionDoc, IoError> {
    solution_from_str(&read_file(path)?)
}

// ---- matrix files ----

fn parse_matrix(text: &str, what: &str) -> Result<Vec<Vec<f64>>, IoError> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split_whitespace() {
            let value: f64 = field.parse().map_err(|_| IoError::Parse {
                line: idx + 1,
                msg: format!("{what}: bad number {field:?}"),
            })?;
            if value < 0.0 {
                return Err(IoError::Parse {
                    line: idx + 1,
                    msg: format!("{what}: negative entry {value}"),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(schema(what, "matrix must be square"));
    }
    Ok(rows)
}

/// Loads distance (benchmark units) and travel-time (minutes) matrices and
/// swaps them into `instance`.  Asymmetric matrices are fine; dimensions
/// must match the instance.
pub fn load_matrices(
    instance: &Instance,
    distance_path: &Path,
    time_path: &Path,
) -> Result<Instance, IoError> {
    let dist = parse_matrix(&read_file(distance_path)?, "distance matrix")?;
    let time = parse_matrix(&read_file(time_path)?, "travel time matrix")?;
    let n = instance.node_count();
    if dist.len() != n {
        return Err(schema(
            "distance matrix",
            format!("expected {n}x{n}, got {0}x{0}", dist.len()),
        ));
    }
    if time.len() != n {
        return Err(schema(
            "travel time matrix",
            format!("expected {n}x{n}, got {0}x{0}", time.len()),
        ));
    }
    let distance = dist
        .iter()
        .map(|row| row.iter().map(|&u| Distance::from_units_f64(u)).collect())
        .collect();
    let travel_time = time
        .iter()
        .map(|row| row.iter().map(|&m| Time::from_minutes_f64(m)).collect())
        .collect();
    Ok(instance.with_matrices(distance, travel_time)?)
}
