//! Transform pair between the symmetric frequency grid and a time window.
//!
//! Synthesis: `g(t) = (1/2pi) sum_k E_k exp(-i omega_k t) domega`.
//! Analysis: `E_k = sum_j g_j exp(i omega_k t_j) dt`. The two are exact inverses.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;

/// Complex synthesis on `t_j = t0 + j dt`.
pub fn synthesize_complex(spectrum: &[Complex64], grid: &FrequencyGrid, t0: f64) -> Result<Vec<Complex64>> {
    let n = grid.n();
    if spectrum.len() != n {
        return Err(Error::GridMismatch(format!("spectrum has {} bins, grid has {n}", spectrum.len())));
    }
    let mut buf: Vec<Complex64> =
        spectrum.iter().enumerate().map(|(k, e)| e * Complex64::from_polar(1.0, -grid.omega(k) * t0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = grid.domega() / (2.0 * std::f64::consts::PI);
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= if j % 2 == 0 { scale } else { -scale };
    }
    Ok(buf)
}

/// Real synthesis. Returns the samples and the largest imaginary residue relative
/// to the largest real sample.
pub fn synthesize(spectrum: &[Complex64], grid: &FrequencyGrid, t0: f64) -> Result<(Vec<f64>, f64)> {
    let c = synthesize_complex(spectrum, grid, t0)?;
    let max_re = c.iter().fold(0.0f64, |m, v| m.max(v.re.abs()));
    let max_im = c.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    let residue = if max_re > 0.0 { max_im / max_re } else { max_im };
    Ok((c.into_iter().map(|v| v.re).collect(), residue))
}

/// Spectrum of real samples on `t_j = t0 + j dt`; the grid is the dual of `dt`.
pub fn analyze(samples: &[f64], t0: f64, dt: f64) -> Result<(FrequencyGrid, Vec<Complex64>)> {
    let n = samples.len();
    let grid = FrequencyGrid::from_dt(n, dt)?;
    let mut buf: Vec<Complex64> =
        samples.iter().enumerate().map(|(j, &x)| Complex64::new(if j % 2 == 0 { x } else { -x }, 0.0)).collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= Complex64::from_polar(dt, grid.omega(k) * t0);
    }
    Ok((grid, buf))
}

/// Number of samples kept before `t = 0` in windows holding causal signals.
pub fn guard_samples(n: usize) -> usize {
    (n / 256).max(16.min(n / 4))
}

/// Start of the time window used for causal signals on `grid`.
pub fn causal_window_start(grid: &FrequencyGrid) -> f64 {
    -(guard_samples(grid.n()) as f64) * grid.dt()
}

/// Energy fraction in the last 5% of the window, scaled to the length of the
/// negative-time guard: an estimate of the energy wrapped around by periodicity.
pub fn alias_estimate(samples: &[f64]) -> f64 {
    let n = samples.len();
    let total: f64 = samples.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return 0.0;
    }
    let tail_len = (n / 20).max(1);
    let tail: f64 = samples[n - tail_len..].iter().map(|x| x * x).sum();
    tail / total * guard_samples(n) as f64 / tail_len as f64
}

/// Make a spectrum exactly Hermitian by mirroring the non-negative half and
/// keeping only the real part of the unpaired `-omega_max` bin.
pub fn hermitize(spectrum: &mut [Complex64]) {
    let n = spectrum.len();
    let h = n / 2;
    spectrum[h].im = 0.0;
    for k in 1..h {
        spectrum[h - k] = spectrum[h + k].conj();
    }
    spectrum[0].im = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let n = 64;
        let dt = 0.1;
        let t0 = -1.23;
        let x: Vec<f64> = (0..n).map(|j| ((j * 7 % 11) as f64 - 5.0) * 0.3).collect();
        let (grid, spec) = analyze(&x, t0, dt).unwrap();
        let (y, res) = synthesize(&spec, &grid, t0).unwrap();
        assert!(res < 1e-12);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        // exp(-t^2/2) <-> sqrt(2 pi) exp(-omega^2/2)
        let n = 256;
        let dt = 0.1;
        let t0 = -(n as f64) / 2.0 * dt;
        let x: Vec<f64> = (0..n).map(|j| (-(t0 + j as f64 * dt).powi(2) / 2.0).exp()).collect();
        let (grid, spec) = analyze(&x, t0, dt).unwrap();
        for (k, v) in spec.iter().enumerate() {
            let w = grid.omega(k);
            let exact = (2.0 * std::f64::consts::PI).sqrt() * (-w * w / 2.0).exp();
            assert!((v - exact).norm() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn delay_is_a_phase() {
        // E = exp(i omega d) synthesizes a unit impulse at t = d
        let grid = FrequencyGrid::new(128, 0.25).unwrap();
        let d = 5.0 * grid.dt();
        let spec: Vec<Complex64> = (0..128).map(|k| Complex64::from_polar(1.0, grid.omega(k) * d)).collect();
        let mut spec = spec;
        hermitize(&mut spec);
        let (y, _) = synthesize(&spec, &grid, 0.0).unwrap();
        let peak = y.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(peak, 5);
    }
}
