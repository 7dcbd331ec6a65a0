//! Uniform symmetric frequency grid and its time-domain dual.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` samples at `omega_k = (k - n/2) * domega`, `k = 0..n`.
///
/// Bin `n/2` is DC and bin 0 is `-omega_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRecord", into = "GridRecord")]
pub struct FrequencyGrid {
    n: usize,
    domega: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridRecord {
    n: usize,
    domega: f64,
}

impl TryFrom<GridRecord> for FrequencyGrid {
    type Error = Error;
    fn try_from(r: GridRecord) -> Result<Self> {
        FrequencyGrid::new(r.n, r.domega)
    }
}

impl From<FrequencyGrid> for GridRecord {
    fn from(g: FrequencyGrid) -> Self {
        GridRecord { n: g.n, domega: g.domega }
    }
}

impl FrequencyGrid {
    pub fn new(n: usize, domega: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("grid size must be a power of two >= 16, got {n}")));
        }
        if !(domega.is_finite() && domega > 0.0) {
            return Err(Error::InvalidArgument(format!("domega must be positive, got {domega}")));
        }
        Ok(FrequencyGrid { n, domega })
    }

    /// Grid whose time dual has spacing `dt`.
    pub fn from_dt(n: usize, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        Self::new(n, 2.0 * std::f64::consts::PI / (n as f64 * dt))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domega(&self) -> f64 {
        self.domega
    }

    pub fn omega(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.domega
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.omega(k)).collect()
    }

    pub fn omega_max(&self) -> f64 {
        (self.n / 2) as f64 * self.domega
    }

    pub fn dt(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.n as f64 * self.domega)
    }

    /// Length of the periodic time window.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.domega
    }

    /// Index of the DC bin.
    pub fn zero_index(&self) -> usize {
        self.n / 2
    }
}
