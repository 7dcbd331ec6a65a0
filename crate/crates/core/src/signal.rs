//! Uniformly sampled real signal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples at `t_j = t0 + j dt`. `floor` is the numerical floor attached by the
/// producer (0 when none was estimated).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSignal {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
    #[serde(default)]
    pub floor: f64,
}

impl TimeSignal {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) || !t0.is_finite() {
            return Err(Error::InvalidArgument(format!("bad time axis t0={t0} dt={dt}")));
        }
        if samples.is_empty() {
            return Err(Error::InvalidArgument("empty signal".into()));
        }
        Ok(TimeSignal { t0, dt, samples, floor: 0.0 })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.time(j)).collect()
    }

    /// `sum x_j^2 dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum::<f64>() * self.dt
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Linear interpolation, zero outside the window.
    pub fn value_at(&self, t: f64) -> f64 {
        let u = (t - self.t0) / self.dt;
        if !(u >= 0.0) || u > (self.len() - 1) as f64 {
            return 0.0;
        }
        let j = u.floor() as usize;
        if j + 1 >= self.len() {
            return self.samples[self.len() - 1];
        }
        let f = u - j as f64;
        self.samples[j] * (1.0 - f) + self.samples[j + 1] * f
    }

    pub fn scaled(&self, c: f64) -> TimeSignal {
        TimeSignal {
            t0: self.t0,
            dt: self.dt,
            samples: self.samples.iter().map(|x| x * c).collect(),
            floor: self.floor,
        }
    }

    /// Relative L2 distance `||self - other|| / ||other||` on a shared axis.
    pub fn relative_l2_distance(&self, other: &TimeSignal) -> Result<f64> {
        self.check_same_axis(other)?;
        let num: f64 = self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = other.samples.iter().map(|b| b * b).sum();
        if den == 0.0 {
            return Err(Error::InvalidArgument("reference signal is zero".into()));
        }
        Ok((num / den).sqrt())
    }

    pub fn check_same_axis(&self, other: &TimeSignal) -> Result<()> {
        let tol = 1e-9 * self.dt;
        if self.len() != other.len() || (self.dt - other.dt).abs() > tol || (self.t0 - other.t0).abs() > tol {
            return Err(Error::GridMismatch("signals live on different time axes".into()));
        }
        Ok(())
    }
}
