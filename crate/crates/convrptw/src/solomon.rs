//! Reader for the classic Solomon VRPTW benchmark file layout.
//!
//! The format is a loose fixed-column text file: an instance name, a
//! `VEHICLE` block with fleet size and capacity, and a `CUSTOMER` table
//! whose first row is the depot.  Euclidean distances are deliberately not
//! computed here; the generator owns that convention.

use crate::io::IoError;
use std::path::Path;

/// One row of the customer table.
#[derive(Debug, Clone, PartialEq)]
pub struct SolomonNode {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub demand: u64,
    pub ready_time: f64,
    pub due_date: f64,
    pub service_time: f64,
}

/// A parsed Solomon benchmark file.
#[derive(Debug, Clone, PartialEq)]
pub struct SolomonInstance {
    pub name: String,
    pub vehicle_count: u32,
    pub capacity: u64,
    pub depot: SolomonNode,
    pub customers: Vec<SolomonNode>,
}

/// Parses the standard Solomon layout.
pub fn parse_solomon(text: &str) -> Result<SolomonInstance, IoError> {
    let parse_err = |line: usize, msg: String| IoError::Parse { line, msg };
    let mut lines = text.lines().enumerate();

    let name = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .map(|(_, l)| l.trim().to_string())
        .ok_or_else(|| parse_err(0, "empty file".into()))?;

    // VEHICLE block: the line after the NUMBER/CAPACITY header carries both
    let mut capacity_line = None;
    for (idx, line) in lines.by_ref() {
        if line.to_uppercase().contains("CAPACITY") {
            capacity_line = Some(idx);
            break;
        }
    }
    let header_idx =
        capacity_line.ok_or_else(|| parse_err(0, "missing VEHICLE capacity header".into()))?;
    let (num_idx, numbers_line) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| parse_err(header_idx + 1, "missing vehicle count / capacity".into()))?;
    let fields: Vec<&str> = numbers_line.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(
            num_idx + 1,
            format!("expected vehicle count and capacity, got {:?}", numbers_line.trim()),
        ));
    }
    let vehicle_count: u32 = fields[0]
        .parse()
        .map_err(|_| parse_err(num_idx + 1, format!("bad vehicle count {:?}", fields[0])))?;
    let capacity: u64 = fields[1]
        .parse()
        .map_err(|_| parse_err(num_idx + 1, format!("bad capacity {:?}", fields[1])))?;

    // CUSTOMER table: anchor on the column-header row, which both the
    // `CUSTOMER` marker line and the data rows lack
    let mut found_header = false;
    for (_, line) in lines.by_ref() {
        if line.to_uppercase().contains("CUST NO") {
            found_header = true;
            break;
        }
    }
    if !found_header {
        return Err(parse_err(0, "missing CUSTOMER table header".into()));
    }
    let mut nodes = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 7 {
            return Err(parse_err(
                idx + 1,
                format!("customer row needs 7 fields, got {}", fields.len()),
            ));
        }
        let num =
            |s: &str| -> Result<f64, IoError> {
                s.parse::<f64>()
                    .map_err(|_| parse_err(idx + 1, format!("bad number {s:?}")))
            };
        let id = num(fields[0])? as u32;
        let demand = num(fields[3])?;
        if demand < 0.0 {
            return Err(parse_err(idx + 1, "negative demand".into()));
        }
        nodes.push(SolomonNode {
            id,
            x: num(fields[1])?,
            y: num(fields[2])?,
            demand: demand as u64,
            ready_time: num(fields[4])?,
            due_date: num(fields[5])?,
            service_time: num(fields[6])?,
        });
    }
    if nodes.is_empty() {
        return Err(parse_err(0, "customer table is empty".into()));
    }
    let depot = nodes.remove(0);
    if depot.id != 0 {
        return Err(parse_err(0, format!("first customer row must be the depot (id 0), got {}", depot.id)));
    }
    Ok(SolomonInstance {
        name,
        vehicle_count,
        capacity,
        depot,
        customers: nodes,
    })
}

/// Reads and parses a Solomon file from disk.
pub fn read_solomon(path: &Path) -> Result<SolomonInstance, IoError> {
    let text = crate::io::read_file(path)?;
    parse_solomon(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
TOY3

VEHICLE
NUMBER     CAPACITY
  25         200

CUSTOMER
CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME   DUE DATE   SERVICE TIME

    0      40         50          0          0       1236          0
    1      45         68         10        912        967         90
    2      45         70         30        825        870         90
    3      42         66         10         65        146         90
";

    #[test]
    fn parses_sample_fields() {
        let s = parse_solomon(SAMPLE).unwrap();
        assert_eq!(s.name, "TOY3");
        assert_eq!(s.vehicle_count, 25);
        assert_eq!(s.capacity, 200);
        assert_eq!(s.customers.len(), 3);
        assert_eq!(s.depot.x, 40.0);
        assert_eq!(s.depot.due_date, 1236.0);
        let c2 = &s.customers[1];
        assert_eq!((c2.id, c2.demand, c2.ready_time, c2.service_time), (2, 30, 825.0, 90.0));
    }

    #[test]
    fn truncated_row_names_the_line() {
        let broken = SAMPLE.trim_end().rsplit_once(' ').unwrap().0;
        let err = parse_solomon(broken).unwrap_err();
        match err {
            IoError::Parse { line, msg } => {
                assert_eq!(line, 13, "last customer row");
                assert!(msg.contains("7 fields"), "{msg}");
            }
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn missing_blocks_are_reported() {
        assert!(parse_solomon("").is_err());
        assert!(parse_solomon("NAME\nVEHICLE\nNUMBER CAPACITY\n").is_err());
        let no_customers = "NAME\nVEHICLE\nNUMBER CAPACITY\n 5 100\n";
        assert!(parse_solomon(no_customers).is_err());
    }

    #[test]
    fn depot_must_come_first() {
        let swapped = SAMPLE.replace(
            "    0      40         50          0          0       1236          0",
            "    9      40         50          1          0       1236          0",
        );
        assert!(parse_solomon(&swapped).is_err());
    }
}
