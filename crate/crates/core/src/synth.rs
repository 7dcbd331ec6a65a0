//! Time-domain Green functions by spectral synthesis.
//!
//! The shell `g(r, t)` is the inverse transform of `exp(-alpha*(omega) r)`; it is
//! the Green function in the retarded time `t - r / v_B`, without the `1/(4 pi r)`
//! factor. Causal models give shells supported in `t >= 0`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::ModelSpec;
use crate::error::{Error, Result};
use crate::fft::{alias_estimate, causal_window_start, hermitize, synthesize};
use crate::grid::FrequencyGrid;
use crate::kk::smooth_taper;
use crate::signal::TimeSignal;

pub const DEFAULT_TAIL_FLOOR: f64 = 1e-10;

/// Precursor window in samples.
pub const DEFAULT_EPS_SAMPLES: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthOptions {
    /// Largest allowed `|exp(-alpha*(omega_max) r)|`.
    pub tail_floor: f64,
    /// Taper the outer 10% of the band instead of failing when the tail is too heavy.
    pub taper: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { tail_floor: DEFAULT_TAIL_FLOOR, taper: false }
    }
}

/// Shell on the causal window of `grid` with default options.
pub fn synth_shell(model: &ModelSpec, r: f64, grid: &FrequencyGrid) -> Result<TimeSignal> {
    synth_shell_with(model, r, grid, &SynthOptions::default())
}

pub fn synth_shell_with(model: &ModelSpec, r: f64, grid: &FrequencyGrid, opts: &SynthOptions) -> Result<TimeSignal> {
    synth_trace(model, r, grid, causal_window_start(grid), 0.0, opts)
}

/// Green function `G(r, t)` in absolute time on the window starting at `t0`.
pub fn synth_green_trace(model: &ModelSpec, r: f64, grid: &FrequencyGrid, t0: f64) -> Result<TimeSignal> {
    let g = synth_trace(model, r, grid, t0, r / model.bound_speed(), &SynthOptions::default())?;
    let floor = g.floor;
    let mut out = g.scaled(1.0 / (4.0 * std::f64::consts::PI * r));
    out.floor = floor;
    Ok(out)
}

/// Synthesize `exp(-alpha* r)` delayed by `delay`.
fn synth_trace(
    model: &ModelSpec,
    r: f64,
    grid: &FrequencyGrid,
    t0: f64,
    delay: f64,
    opts: &SynthOptions,
) -> Result<TimeSignal> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let big = grid.omega_max();
    let tail = (-model.alpha_star_real(big).re * r).exp().max((-model.alpha_star_real(-big).re * r).exp());
    let tapered = tail > opts.tail_floor;
    if tapered && !opts.taper {
        return Err(Error::TailFloor { achieved: tail, required: opts.tail_floor });
    }
    let weight = |w: f64| if tapered { smooth_taper(w, 0.9 * big, big) } else { 1.0 };
    let mut spec: Vec<Complex64> = grid
        .omegas()
        .into_iter()
        .map(|w| (-model.alpha_star_real(w) * r + Complex64::i() * w * delay).exp() * weight(w))
        .collect();
    hermitize(&mut spec);
    let leakage = if tapered {
        let (mut kept, mut all) = (0.0, 0.0);
        for w in grid.omegas() {
            let e = (-2.0 * model.alpha_star_real(w).re * r).exp();
            all += e;
            kept += e * weight(w).powi(2);
        }
        1.0 - kept / all
    } else {
        0.0
    };
    let (samples, _) = synthesize(&spec, grid, t0)?;
    let floor = if tapered { leakage } else { tail * tail } + alias_estimate(&samples);
    Ok(TimeSignal { t0, dt: grid.dt(), samples, floor })
}

/// Fraction of the energy before `-eps`: `sum_{t < -eps} g^2 / sum g^2`.
pub fn precursor_energy(signal: &TimeSignal, eps: f64) -> Result<f64> {
    if !(eps >= signal.dt) {
        return Err(Error::InvalidArgument(format!("eps = {eps} is below dt = {}", signal.dt)));
    }
    let total: f64 = signal.samples.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return Err(Error::InvalidArgument("signal has zero energy".into()));
    }
    let cut = -eps - 1e-9 * signal.dt;
    let pre: f64 = signal.samples.iter().enumerate().filter(|(j, _)| signal.time(*j) < cut).map(|(_, x)| x * x).sum();
    Ok(pre / total)
}

/// Default precursor window `8 dt`.
pub fn default_eps(signal: &TimeSignal) -> f64 {
    DEFAULT_EPS_SAMPLES * signal.dt
}

/// Grid of `n` points whose band edge sits where the shell at radius `r` has
/// decayed to `tail_floor`.
pub fn suggest_grid(model: &ModelSpec, r: f64, n: usize, tail_floor: f64) -> Result<FrequencyGrid> {
    let target = -tail_floor.ln() / r;
    let alpha = |w: f64| model.alpha_star_real(w).re;
    let mut hi = model.characteristic_frequency().max(1e-6);
    while alpha(hi) < target {
        hi *= 2.0;
        if hi > 1e18 {
            return Err(Error::TailFloor { achieved: (-alpha(hi) * r).exp(), required: tail_floor });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if alpha(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    FrequencyGrid::new(n, 2.0 * hi / n as f64)
}

/// Shells over a radius table, scaled by `1 / (4 pi r)`, in retarded time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenField {
    pub radii: Vec<f64>,
    pub shells: Vec<TimeSignal>,
    /// `r / v_B` for each radius.
    pub travel_time: Vec<f64>,
    pub bound_speed: f64,
}

impl GreenField {
    /// `G(r, t)` in absolute time, interpolated linearly between radii.
    pub fn evaluate(&self, r: f64, t: f64) -> Result<f64> {
        let (first, last) = (self.radii[0], self.radii[self.radii.len() - 1]);
        if !(r >= first && r <= last) {
            return Err(Error::InvalidArgument(format!("radius {r} outside [{first}, {last}]")));
        }
        let i = self.radii.partition_point(|&x| x <= r).saturating_sub(1).min(self.radii.len() - 1);
        let tau = t - r / self.bound_speed;
        let raw = |k: usize| self.shells[k].value_at(tau) * 4.0 * std::f64::consts::PI * self.radii[k];
        let g = if i + 1 < self.radii.len() {
            let f = (r - self.radii[i]) / (self.radii[i + 1] - self.radii[i]);
            raw(i) * (1.0 - f) + raw(i + 1) * f
        } else {
            raw(i)
        };
        Ok(g / (4.0 * std::f64::consts::PI * r))
    }
}

pub fn assemble_green(model: &ModelSpec, radii: &[f64], grid: &FrequencyGrid) -> Result<GreenField> {
    assemble_green_with(model, radii, grid, &SynthOptions::default())
}

pub fn assemble_green_with(
    model: &ModelSpec,
    radii: &[f64],
    grid: &FrequencyGrid,
    opts: &SynthOptions,
) -> Result<GreenField> {
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("radii must be non-empty and strictly increasing".into()));
    }
    let v = model.bound_speed();
    let shells = radii
        .par_iter()
        .map(|&r| {
            let g = synth_shell_with(model, r, grid, opts)?;
            let floor = g.floor;
            let mut s = g.scaled(1.0 / (4.0 * std::f64::consts::PI * r));
            s.floor = floor;
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GreenField { radii: radii.to_vec(), shells, travel_time: radii.iter().map(|r| r / v).collect(), bound_speed: v })
}

/// Wave-front speed from threshold arrivals: the first time `|G|` exceeds
/// `threshold * max |G|` at each radius, fitted by `r = a + v t`.
pub fn front_speed_estimate(field: &GreenField, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0 && threshold < 0.5) {
        return Err(Error::InvalidArgument(format!("threshold must be in (0, 0.5), got {threshold}")));
    }
    if field.radii.len() < 2 {
        return Err(Error::InvalidArgument("need at least two radii".into()));
    }
    let mut arrivals = Vec::with_capacity(field.radii.len());
    for (shell, (&r, &tt)) in field.shells.iter().zip(field.radii.iter().zip(&field.travel_time)) {
        let level = threshold * shell.max_abs();
        let j = shell
            .samples
            .iter()
            .position(|x| x.abs() > level)
            .ok_or_else(|| Error::NoCrossing(format!("radius {r}")))?;
        if j == 0 {
            return Err(Error::NoCrossing(format!(
                "radius {r}: above threshold at the window start, the window is too short"
            )));
        }
        let (a, b) = (shell.samples[j - 1].abs(), shell.samples[j].abs());
        let t = shell.time(j - 1) + shell.dt * (level - a) / (b - a);
        arrivals.push(t + tt);
    }
    let n = arrivals.len() as f64;
    let mt = arrivals.iter().sum::<f64>() / n;
    let mr = field.radii.iter().sum::<f64>() / n;
    let stt: f64 = arrivals.iter().map(|t| (t - mt).powi(2)).sum();
    let str: f64 = arrivals.iter().zip(&field.radii).map(|(t, r)| (t - mt) * (r - mr)).sum();
    if stt == 0.0 {
        return Err(Error::NoCrossing("arrival times do not vary with radius".into()));
    }
    Ok(str / stt)
}
