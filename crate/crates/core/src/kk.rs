//! Discrete Hilbert transform and Kramers-Kronig checks on a frequency grid.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dispersion::ModelSpec;
use crate::error::{Error, Result};
pub use crate::grid::FrequencyGrid;
use crate::quad::{gauss_legendre, panel};

/// Lowest trusted bin index for KK-derived speeds.
pub const TRUSTED_MIN_BINS: usize = 8;

const LOW_PASS_ORDER: i32 = 6;

/// `(H f)(x) = (1/pi) p.v. int f(y) / (x - y) dy` sampled on the grid.
///
/// Discrete linear convolution with the odd kernel `2 / (pi m)`, `m` odd.
/// With this sign `Im f = H(Re f)` for boundary values of functions analytic in
/// the upper half plane.
pub fn hilbert_transform(samples: &[f64], grid: &FrequencyGrid) -> Result<Vec<f64>> {
    let n = grid.n();
    if samples.len() != n {
        return Err(Error::GridMismatch(format!("{} samples for a grid of {n}", samples.len())));
    }
    let l = 2 * n;
    let mut kernel = vec![Complex64::new(0.0, 0.0); l];
    for m in (1..n).step_by(2) {
        let h = 2.0 / (std::f64::consts::PI * m as f64);
        kernel[m] = Complex64::new(h, 0.0);
        kernel[l - m] = Complex64::new(-h, 0.0);
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    buf.resize(l, Complex64::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(l);
    fwd.process(&mut kernel);
    fwd.process(&mut buf);
    for (b, k) in buf.iter_mut().zip(&kernel) {
        *b *= k;
    }
    planner.plan_fft_inverse(l).process(&mut buf);
    Ok(buf[..n].iter().map(|v| v.re / l as f64).collect())
}

/// C-infinity step: 1 for `x <= a`, 0 for `x >= b`.
pub fn smooth_taper(x: f64, a: f64, b: f64) -> f64 {
    let x = x.abs();
    if x <= a {
        return 1.0;
    }
    if x >= b {
        return 0.0;
    }
    let f = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() };
    let u = (b - x) / (b - a);
    f(u) / (f(u) + f(1.0 - u))
}

/// Slowness `1/c` reconstructed from the attenuation alone, on the trusted band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KkCurve {
    pub omega: Vec<f64>,
    pub slowness: Vec<f64>,
}

impl KkCurve {
    pub fn phase_speed(&self) -> Vec<f64> {
        self.slowness.iter().map(|s| 1.0 / s).collect()
    }
}

/// Kramers-Kronig phase speed.
///
/// `1/c = S_inf - H(alpha)(omega) / omega`, with `S_inf` the high-frequency
/// slowness. The DC cusp of `alpha` is removed first with a reference function
/// whose transform is known in closed form; the grid then sees a tapered copy of
/// the remainder and the far band beyond the taper is integrated by quadrature.
/// Models whose attenuation grows at least linearly are ill-conditioned here.
pub fn kk_phase_speed(model: &ModelSpec, grid: &FrequencyGrid) -> Result<KkCurve> {
    let s_inf = model.high_frequency_slowness().ok_or_else(|| {
        Error::IllConditioned(format!(
            "{} attenuation grows at least linearly, the dispersion integral diverges",
            model.kind().as_str()
        ))
    })?;
    let big = grid.omega_max();
    let (a, b) = (big / 2.0, big);
    let cusp = CuspReference::fit(model, grid.domega(), big / 64.0);
    let remainder = |w: f64| model.alpha_star_real(w).re - cusp.map_or(0.0, |c| c.eval(w).re);
    let tapered: Vec<f64> = grid.omegas().into_iter().map(|w| smooth_taper(w, a, b) * remainder(w)).collect();
    let h = hilbert_transform(&tapered, grid)?;
    let tail = far_band_nodes(&remainder, a, b)?;

    let lo = TRUSTED_MIN_BINS as f64 * grid.domega();
    let hi = big / 4.0;
    let mut omega = Vec::new();
    let mut slowness = Vec::new();
    for (k, w) in grid.omegas().into_iter().enumerate() {
        if w.abs() < lo * (1.0 - 1e-12) || w.abs() > hi {
            continue;
        }
        let t: f64 = tail.iter().map(|(u, c)| c / (w * w - u * u)).sum();
        let h_cusp = cusp.map_or(0.0, |c| c.eval(w).im);
        omega.push(w);
        slowness.push(s_inf - (h[k] + h_cusp) / w - t);
    }
    Ok(KkCurve { omega, slowness })
}

/// `scale * (-i omega)^p (1 - i omega / ws)^-(p+2)`, analytic in the upper half
/// plane, so the transform of its real part is its imaginary part. Its real part
/// matches `c |omega|^p` at DC.
#[derive(Debug, Clone, Copy)]
struct CuspReference {
    p: f64,
    scale: f64,
    ws: f64,
}

impl CuspReference {
    fn fit(model: &ModelSpec, h: f64, ws: f64) -> Option<Self> {
        let (a1, a2) = (model.alpha_star_real(h).re, model.alpha_star_real(2.0 * h).re);
        if !(a1 > 0.0 && a2 > 0.0) {
            return None;
        }
        let p = (a2 / a1).log2();
        let cosp = (std::f64::consts::PI * p / 2.0).cos();
        if !(p > 0.0 && p < 4.0) || cosp.abs() < 1e-3 || (p - p.round()).abs() < 1e-6 {
            return None;
        }
        let c = a1 / h.powf(p);
        Some(CuspReference { p, scale: c / cosp, ws })
    }

    fn eval(&self, w: f64) -> Complex64 {
        crate::dispersion::neg_i_omega_pow(w, self.p)
            * Complex64::new(1.0, -w / self.ws).powf(-(self.p + 2.0))
            * self.scale
    }
}

/// Nodes `u` and weights `c` with `T(x) = sum c / (x^2 - u^2)` for the part of
/// the dispersion integral beyond the taper start.
fn far_band_nodes(alpha: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    let rule = gauss_legendre(16);
    let mut nodes = Vec::new();
    let scale = 2.0 / std::f64::consts::PI;
    for p in 0..8 {
        let (lo, hi) = (a + (b - a) * p as f64 / 8.0, a + (b - a) * (p + 1) as f64 / 8.0);
        for (u, w) in panel(lo, hi, &rule) {
            nodes.push((u, scale * w * (1.0 - smooth_taper(u, a, b)) * alpha(u)));
        }
    }
    let probe = |ns: &[(f64, f64)]| ns.iter().map(|(u, c)| c / (u * u)).sum::<f64>();
    let mut total = probe(&nodes);
    let mut quiet = 0;
    let dv = 0.5;
    for p in 0..1380 {
        let (v0, v1) = (p as f64 * dv, (p + 1) as f64 * dv);
        let start = nodes.len();
        for (v, w) in panel(v0, v1, &rule) {
            let u = b * v.exp();
            nodes.push((u, scale * w * u * alpha(u)));
        }
        let part = probe(&nodes[start..]);
        if !part.is_finite() {
            break;
        }
        total += part;
        if part.abs() <= 1e-15 * total.abs().max(f64::MIN_POSITIVE) {
            quiet += 1;
            if quiet >= 3 {
                return Ok(nodes);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::IllConditioned("far-band dispersion integral does not converge".into()))
}

/// Normalized KK residual of `alpha*` on the interior band.
///
/// The checked function is `alpha* (1 + s/Omega_c)^-6`, `s = -i omega`, a causal
/// low-pass of `alpha*` that decays fast enough for the discrete transform.
pub fn kk_residual(model: &ModelSpec, grid: &FrequencyGrid) -> Result<f64> {
    let big = grid.omega_max();
    let wc = big / 32.0;
    let beta: Vec<Complex64> = grid
        .omegas()
        .into_iter()
        .map(|w| {
            let lp = Complex64::new(1.0, -w / wc).powi(-LOW_PASS_ORDER);
            model.alpha_star_real(w) * lp * smooth_taper(w, big / 2.0, big)
        })
        .collect();
    let re: Vec<f64> = beta.iter().map(|b| b.re).collect();
    let im: Vec<f64> = beta.iter().map(|b| b.im).collect();
    let h_re = hilbert_transform(&re, grid)?;
    let h_im = hilbert_transform(&im, grid)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let lo = TRUSTED_MIN_BINS as f64 * grid.domega();
    for (k, w) in grid.omegas().into_iter().enumerate() {
        if w.abs() < lo * (1.0 - 1e-12) || w.abs() > big / 4.0 {
            continue;
        }
        scale = scale.max(beta[k].norm());
        worst = worst.max((re[k] + h_im[k]).abs()).max((im[k] - h_re[k]).abs());
    }
    Ok(if scale > 0.0 { worst / scale } else { 0.0 })
}
