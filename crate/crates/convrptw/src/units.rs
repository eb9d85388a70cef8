//! Fixed-point time and distance quantities.
//!
//! Solution files must be byte-identical across runs and platforms, and the
//! test suites compare schedules for exact equality, so all arithmetic stays
//! in integers: time in tenths of a minute, distance in metres.  In the
//! benchmark convention one distance unit equals one minute of travel, which
//! both representations carry without rounding drift (a distance truncated to
//! one decimal is a whole number of deci-minutes and of hectometres).

use serde::{Deserialize, Serialize};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

/// A point in time or a duration, in tenths of a minute.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Time(i64);

impl Time {
    pub const ZERO: Time = Time(0);

    pub fn from_deci_minutes(dm: i64) -> Time {
        Time(dm)
    }

    pub fn from_minutes(min: i64) -> Time {
        Time(min * 10)
    }

    /// Rounds to the nearest tenth of a minute.
    pub fn from_minutes_f64(min: f64) -> Time {
        Time((min * 10.0).round() as i64)
    }

    pub fn deci_minutes(self) -> i64 {
        self.0
    }

    pub fn minutes(self) -> f64 {
        self.0 as f64 / 10.0
    }

    pub fn hours(self) -> f64 {
        self.0 as f64 / 600.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn max(self, other: Time) -> Time {
        Time(self.0.max(other.0))
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl AddAssign for Time {
    fn add_assign(&mut self, rhs: Time) {
        self.0 += rhs.0;
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

impl SubAssign for Time {
    fn sub_assign(&mut self, rhs: Time) {
        self.0 -= rhs.0;
    }
}

impl Neg for Time {
    type Output = Time;
    fn neg(self) -> Time {
        Time(-self.0)
    }
}

impl Sum for Time {
    fn sum<I: Iterator<Item = Time>>(iter: I) -> Time {
        Time(iter.map(|t| t.0).sum())
    }
}

impl fmt::Debug for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}min", self.minutes())
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.1}", self.minutes())
    }
}

/// A distance in metres; 1000 m is one benchmark distance unit.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Distance(i64);

impl Distance {
    pub const ZERO: Distance = Distance(0);

    pub fn from_metres(m: i64) -> Distance {
        Distance(m)
    }

    /// Rounds to the nearest metre.
    pub fn from_units_f64(units: f64) -> Distance {
        Distance((units * 1000.0).round() as i64)
    }

    pub fn metres(self) -> i64 {
        self.0
    }

    /// Benchmark distance units (coordinate units for generated instances).
    pub fn units(self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

impl Add for Distance {
    type Output = Distance;
    fn add(self, rhs: Distance) -> Distance {
        Distance(self.0 + rhs.0)
    }
}

impl AddAssign for Distance {
    fn add_assign(&mut self, rhs: Distance) {
        self.0 += rhs.0;
    }
}

impl Sub for Distance {
    type Output = Distance;
    fn sub(self, rhs: Distance) -> Distance {
        Distance(self.0 - rhs.0)
    }
}

impl Sum for Distance {
    fn sum<I: Iterator<Item = Distance>>(iter: I) -> Distance {
        Distance(iter.map(|d| d.0).sum())
    }
}

impl fmt::Debug for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}u", self.units())
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3}", self.units())
    }
}
