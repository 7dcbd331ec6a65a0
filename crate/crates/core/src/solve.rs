//! Point-source superposition and the generalized Cauchy problem.
//!
//! Everything is evaluated through the exact frequency-domain Green function
//! `exp(-alpha* d + i omega d / v_B) / (4 pi d)`; no time stepping is involved.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::ModelSpec;
use crate::error::{Error, Result};
use crate::fft::{alias_estimate, analyze, hermitize, synthesize};
use crate::grid::FrequencyGrid;
use crate::kernels::{apply_multiplier, Multiplier};
use crate::signal::TimeSignal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSource {
    pub position: [f64; 3],
    pub weight: f64,
    pub waveform: TimeSignal,
}

/// `f(x, t) = sum_i w_i delta(x - x_i) f_i(t)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PointSourceSum {
    pub terms: Vec<PointSource>,
}

/// Frequency-domain Green function at distance `d`, absolute time.
pub fn green_spectrum(model: &ModelSpec, d: f64, omega: f64) -> Complex64 {
    (-model.alpha_star_real(omega) * d + Complex64::i() * omega * d / model.bound_speed()).exp() / (4.0 * PI * d)
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn check_waveform(w: &TimeSignal, grid: &FrequencyGrid, t0: f64) -> Result<()> {
    if w.len() != grid.n() || (w.dt - grid.dt()).abs() > 1e-9 * grid.dt() || (w.t0 - t0).abs() > 1e-9 * grid.dt() {
        return Err(Error::GridMismatch("source waveforms must share the grid's time axis".into()));
    }
    Ok(())
}

/// Pressure traces `p = G * f` at each probe.
///
/// All waveforms must live on the time window dual to `grid` with a common start.
pub fn superpose(
    model: &ModelSpec,
    sources: &PointSourceSum,
    probes: &[[f64; 3]],
    grid: &FrequencyGrid,
) -> Result<Vec<TimeSignal>> {
    let first = sources.terms.first().ok_or_else(|| Error::InvalidArgument("no sources".into()))?;
    let t0 = first.waveform.t0;
    let spectra = sources
        .terms
        .iter()
        .map(|s| {
            check_waveform(&s.waveform, grid, t0)?;
            Ok(analyze(&s.waveform.samples, t0, grid.dt())?.1)
        })
        .collect::<Result<Vec<_>>>()?;
    probes
        .par_iter()
        .map(|probe| {
            let dists: Vec<f64> = sources.terms.iter().map(|s| distance(&s.position, probe)).collect();
            if let Some(d) = dists.iter().find(|d| !(**d > 0.0)) {
                return Err(Error::Domain(format!("probe at distance {d} from a source")));
            }
            let mut spec = vec![Complex64::new(0.0, 0.0); grid.n()];
            for (k, v) in spec.iter_mut().enumerate().skip(1) {
                let w = grid.omega(k);
                for ((s, x), &d) in sources.terms.iter().zip(&spectra).zip(&dists) {
                    *v += x[k] * green_spectrum(model, d, w) * s.weight;
                }
            }
            hermitize(&mut spec);
            let (samples, _) = synthesize(&spec, grid, t0)?;
            let floor = alias_estimate(&samples);
            Ok(TimeSignal { t0, dt: grid.dt(), samples, floor })
        })
        .collect()
}

/// Past of the field at a point: `q` on `t <= 0`, `phi = q(0)`, `psi = q'(0-)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyData {
    pub history: TimeSignal,
    pub phi: f64,
    pub psi: f64,
}

/// Fourth-order one-sided derivative at the last sample.
fn end_derivative(q: &[f64], dt: f64) -> f64 {
    let n = q.len();
    (25.0 * q[n - 1] - 48.0 * q[n - 2] + 36.0 * q[n - 3] - 16.0 * q[n - 4] + 3.0 * q[n - 5]) / (12.0 * dt)
}

impl CauchyData {
    /// Validates that the history ends at `t = 0`, is discretely `C^2`, and
    /// that `phi`, `psi` are its end value and slope.
    pub fn new(history: TimeSignal, phi: f64, psi: f64) -> Result<Self> {
        let q = &history.samples;
        if q.len() < 5 {
            return Err(Error::InvalidCauchyData("history needs at least 5 samples".into()));
        }
        let t_end = history.time(q.len() - 1);
        if t_end.abs() > 1e-9 * history.dt {
            return Err(Error::InvalidCauchyData(format!("history must end at t = 0, ends at {t_end}")));
        }
        let last = q[q.len() - 1];
        if (phi - last).abs() > 1e-12 * (1.0 + last.abs()) {
            return Err(Error::InvalidCauchyData(format!("phi = {phi} but q(0) = {last}")));
        }
        let slope = end_derivative(q, history.dt);
        if (psi - slope).abs() > 1e-6 * (1.0 + slope.abs()) {
            return Err(Error::InvalidCauchyData(format!("psi = {psi} but q'(0) = {slope}")));
        }
        let dt2 = history.dt * history.dt;
        let d2: Vec<f64> = q.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]) / dt2).collect();
        let scale = d2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let jump = d2.windows(2).fold(0.0f64, |m, w| m.max((w[1] - w[0]).abs()));
        if jump > 0.1 * scale + 1e-9 {
            return Err(Error::InvalidCauchyData(format!(
                "history is not C^2: second difference jumps by {jump:e} (scale {scale:e})"
            )));
        }
        Ok(CauchyData { history, phi, psi })
    }

    /// Data read off the history itself.
    pub fn from_history(history: TimeSignal) -> Result<Self> {
        if history.len() < 5 {
            return Err(Error::InvalidCauchyData("history needs at least 5 samples".into()));
        }
        let phi = history.samples[history.len() - 1];
        let psi = end_derivative(&history.samples, history.dt);
        Self::new(history, phi, psi)
    }
}

/// Regularized operator `A_*` with multiplier
/// `(alpha*^2 + 2 s alpha* / v_B) (1 + s/omega_c)^{-6}`, `s = -i omega`.
///
/// The regularizer is itself causal, so supports in `t >= 0` are preserved.
struct MemoryOperator {
    model: ModelSpec,
    wc: f64,
}

const REGULARIZER_ORDER: i32 = 6;

impl MemoryOperator {
    fn regularizer(&self, omega: f64) -> Complex64 {
        Complex64::new(1.0, -omega / self.wc).powi(-REGULARIZER_ORDER)
    }
}

impl Multiplier for MemoryOperator {
    fn eval(&self, omega: f64) -> Complex64 {
        let a = self.model.alpha_star_real(omega);
        let s = Complex64::new(0.0, -omega);
        (a * a + s * a * (2.0 / self.model.bound_speed())) * self.regularizer(omega)
    }

    fn is_growing(&self) -> bool {
        false
    }
}

struct Regularizer<'a>(&'a MemoryOperator);

impl Multiplier for Regularizer<'_> {
    fn eval(&self, omega: f64) -> Complex64 {
        self.0.regularizer(omega)
    }

    fn is_growing(&self) -> bool {
        false
    }
}

/// Equivalent source and its commutator part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchySource {
    pub source: TimeSignal,
    /// `[A_*, M_H] q = A_*(H q) - H A_*(q)`.
    pub commutator: TimeSignal,
}

/// Equivalent source
/// `f = -psi/v_B^2 delta(t) - phi/v_B^2 delta'(t) - [A_*, M_H] q`, smoothed by a
/// causal low-pass with cutoff `omega_max / 16`.
///
/// The window is centered on `t = 0`; the history is clipped to it.
pub fn cauchy_source(data: &CauchyData, model: &ModelSpec, grid: &FrequencyGrid) -> Result<TimeSignal> {
    Ok(cauchy_source_parts(data, model, grid)?.source)
}

pub fn cauchy_source_parts(data: &CauchyData, model: &ModelSpec, grid: &FrequencyGrid) -> Result<CauchySource> {
    let dt = grid.dt();
    if (data.history.dt - dt).abs() > 1e-9 * dt {
        return Err(Error::GridMismatch(format!("history dt {} differs from grid dt {dt}", data.history.dt)));
    }
    let n = grid.n();
    let zero = n / 2;
    let t0 = -(zero as f64) * dt;
    let h = &data.history.samples;
    let mut past = vec![0.0; n];
    for (i, &v) in h.iter().rev().enumerate().take(zero + 1) {
        past[zero - i] = v;
    }
    let mut at_zero = vec![0.0; n];
    at_zero[zero] = data.phi;

    let op = MemoryOperator { model: *model, wc: grid.omega_max() / 16.0 };
    let a_hq = apply_multiplier(&op, &TimeSignal::new(t0, dt, at_zero)?)?;
    let a_q = apply_multiplier(&op, &TimeSignal::new(t0, dt, past)?)?;
    let comm: Vec<f64> = (0..n).map(|j| a_hq.samples[j] - if j >= zero { a_q.samples[j] } else { 0.0 }).collect();

    let v2 = model.bound_speed().powi(2);
    let mut local = vec![0.0; n];
    local[zero] = -data.psi / v2 / dt;
    local[zero - 1] += -data.phi / v2 / (2.0 * dt * dt);
    local[zero + 1] += data.phi / v2 / (2.0 * dt * dt);
    let local = apply_multiplier(&Regularizer(&op), &TimeSignal::new(t0, dt, local)?)?;

    let edge = |m: &dyn Fn(f64) -> f64| {
        let peak = grid.omegas().into_iter().fold(0.0f64, |a, w| a.max(m(w)));
        if peak > 0.0 {
            m(grid.omega_max()) / peak
        } else {
            0.0
        }
    };
    let edge = edge(&|w: f64| op.eval(w).norm());
    let mut commutator = TimeSignal::new(t0, dt, comm)?;
    commutator.floor = alias_estimate(&commutator.samples) + edge * edge;
    let samples: Vec<f64> = local.samples.iter().zip(&commutator.samples).map(|(a, c)| a - c).collect();
    let mut source = TimeSignal::new(t0, dt, samples)?;
    source.floor = commutator.floor;
    Ok(CauchySource { source, commutator })
}

/// Relative residual of the radial wave equation
/// `laplacian p - (alpha* + s/v_B)^2 p = 0` at radius `r` for `p = G * f`, with
/// the Laplacian `(1/r) d^2 (r p) / dr^2` taken by finite differences in `r`.
pub fn verify_cauchy(data: &CauchyData, model: &ModelSpec, grid: &FrequencyGrid, r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let f = cauchy_source(data, model, grid)?;
    let (_, spec) = analyze(&f.samples, f.t0, f.dt)?;
    let big = grid.omega_max();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (k, x) in spec.iter().enumerate() {
        let w = grid.omega(k);
        if w == 0.0 || w.abs() > big / 4.0 {
            continue;
        }
        let kn = model.wavenumber(w).norm();
        let h = (0.05 / kn).min(r / 4.0);
        let u = |rho: f64| green_spectrum(model, rho, w) * x * rho;
        let lap =
            (-u(r + 2.0 * h) + u(r + h) * 16.0 - u(r) * 30.0 + u(r - h) * 16.0 - u(r - 2.0 * h)) / (12.0 * h * h * r);
        let b = model.alpha_star_real(w) + Complex64::new(0.0, -w) / model.bound_speed();
        let rhs = b * b * green_spectrum(model, r, w) * x;
        worst = worst.max((lap - rhs).norm());
        scale = scale.max(rhs.norm());
    }
    Ok(if scale > 0.0 { worst / scale } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{default_eps, precursor_energy};

    fn history(dt: f64, len: usize, q: impl Fn(f64) -> f64) -> TimeSignal {
        let t0 = -((len - 1) as f64) * dt;
        TimeSignal::new(t0, dt, (0..len).map(|j| q(t0 + j as f64 * dt)).collect()).unwrap()
    }

    #[test]
    fn cauchy_data_validation() {
        let dt = 0.01;
        let q = history(dt, 4000, |t| t.exp() * (1.0 + t));
        assert!(CauchyData::new(q.clone(), 1.0, 2.0).is_ok());
        assert!(CauchyData::new(q.clone(), 1.1, 2.0).is_err());
        assert!(CauchyData::new(q.clone(), 1.0, 2.1).is_err());
        let kink = history(dt, 4000, |t| if t < -1.0 { 0.0 } else { (t + 1.0).powi(2) });
        assert!(matches!(CauchyData::from_history(kink), Err(Error::InvalidCauchyData(_))));
        let late = TimeSignal::new(-1.0, dt, vec![0.0; 50]).unwrap();
        assert!(CauchyData::from_history(late).is_err());
    }

    #[test]
    fn zero_attenuation_source_is_a_scaled_impulse() {
        let grid = FrequencyGrid::from_dt(1 << 12, 0.02).unwrap();
        let m = ModelSpec::power_law(0.5, 0.0, 0.0, 2.0).unwrap();
        let data = CauchyData::new(history(0.02, 2000, |t| t * t.exp()), 0.0, 1.0).unwrap();
        let parts = cauchy_source_parts(&data, &m, &grid).unwrap();
        assert!(parts.commutator.max_abs() == 0.0);
        // the regularized impulse keeps its area
        let area: f64 = parts.source.samples.iter().sum::<f64>() * grid.dt();
        assert!((area + 1.0 / 4.0).abs() < 1e-10, "{area}");
    }

    #[test]
    fn commutator_is_supported_after_zero() {
        let dt = 0.01;
        let grid = FrequencyGrid::from_dt(1 << 14, dt).unwrap();
        let m = ModelSpec::kowar_modified(2.0, 0.5, 1.0, 1.5).unwrap();
        let data = CauchyData::from_history(history(dt, 6000, |t| t.exp() * (1.0 + t))).unwrap();
        let c = cauchy_source_parts(&data, &m, &grid).unwrap().commutator;
        let pre = precursor_energy(&c, default_eps(&c)).unwrap();
        assert!(pre <= c.floor.max(1e-14), "{pre} vs floor {}", c.floor);
    }

    #[test]
    fn residual_is_small() {
        let dt = 0.01;
        let grid = FrequencyGrid::from_dt(1 << 13, dt).unwrap();
        let data = CauchyData::from_history(history(dt, 3000, |t| t.exp() * (1.0 + t))).unwrap();
        for m in [
            ModelSpec::kowar_modified(1.5, 0.0, 1.0, 2.0).unwrap(),
            ModelSpec::kowar_modified(2.0, 0.5, 1.0, 1.5).unwrap(),
        ] {
            let r = verify_cauchy(&data, &m, &grid, 1.0).unwrap();
            assert!(r < 1e-6, "{r}");
        }
        let zero = CauchyData::from_history(history(dt, 100, |_| 0.0)).unwrap();
        assert_eq!(
            verify_cauchy(&zero, &ModelSpec::kowar_modified(2.0, 0.5, 1.0, 1.5).unwrap(), &grid, 1.0).unwrap(),
            0.0
        );
    }

    fn pulse(grid: &FrequencyGrid, t0: f64, width: f64) -> TimeSignal {
        let s = (0..grid.n())
            .map(|j| {
                let t = t0 + j as f64 * grid.dt();
                if t > 0.0 && t < width {
                    (PI * t / width).sin().powi(4)
                } else {
                    0.0
                }
            })
            .collect();
        TimeSignal::new(t0, grid.dt(), s).unwrap()
    }

    #[test]
    fn superposition_is_linear_and_translation_covariant() {
        let grid = FrequencyGrid::from_dt(1 << 12, 0.01).unwrap();
        let m = ModelSpec::kowar_modified(1.5, 0.1, 1.0, 2.0).unwrap();
        let t0 = -1.0;
        let w = pulse(&grid, t0, 0.5);
        let src = |p: [f64; 3], a: f64| PointSource { position: p, weight: a, waveform: w.clone() };
        let s1 = PointSourceSum { terms: vec![src([0.0, 0.0, 0.0], 1.0)] };
        let s2 = PointSourceSum { terms: vec![src([1.0, 0.5, 0.0], -2.0)] };
        let both = PointSourceSum { terms: vec![src([0.0, 0.0, 0.0], 1.0), src([1.0, 0.5, 0.0], -2.0)] };
        let probes = [[3.0, 0.0, 0.0], [0.0, 2.0, 1.0]];
        let a = superpose(&m, &s1, &probes, &grid).unwrap();
        let b = superpose(&m, &s2, &probes, &grid).unwrap();
        let c = superpose(&m, &both, &probes, &grid).unwrap();
        for i in 0..2 {
            for j in 0..grid.n() {
                assert!((a[i].samples[j] + b[i].samples[j] - c[i].samples[j]).abs() < 1e-12);
            }
        }
        let shift = [0.3, -1.2, 2.5];
        let moved = PointSourceSum {
            terms: both
                .terms
                .iter()
                .map(|t| PointSource {
                    position: [t.position[0] + shift[0], t.position[1] + shift[1], t.position[2] + shift[2]],
                    ..t.clone()
                })
                .collect(),
        };
        let moved_probes: Vec<[f64; 3]> =
            probes.iter().map(|p| [p[0] + shift[0], p[1] + shift[1], p[2] + shift[2]]).collect();
        let d = superpose(&m, &moved, &moved_probes, &grid).unwrap();
        for i in 0..2 {
            for j in 0..grid.n() {
                assert!((d[i].samples[j] - c[i].samples[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn causal_response_waits_for_the_front() {
        let grid = FrequencyGrid::from_dt(1 << 14, 0.005).unwrap();
        let m = ModelSpec::kowar_modified(1.5, 0.1, 1.0, 2.0).unwrap();
        let t0 = -2.0;
        let w = pulse(&grid, t0, 0.5);
        let sources = PointSourceSum { terms: vec![PointSource { position: [0.0; 3], weight: 1.0, waveform: w }] };
        let p = &superpose(&m, &sources, &[[2.0, 0.0, 0.0]], &grid).unwrap()[0];
        let arrival = 2.0 / m.bound_speed();
        let shifted = TimeSignal { t0: p.t0 - arrival, ..p.clone() };
        assert!(precursor_energy(&shifted, default_eps(&shifted)).unwrap() < 1e-6);
        assert!(superpose(&m, &sources, &[[0.0; 3]], &grid).is_err());
    }
}
