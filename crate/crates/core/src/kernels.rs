//! Spectral multipliers of the convolution operators and their kernels.
//!
//! Multipliers act on `E(omega)` in the convention `g(t) = (1/2pi) int e^{-i omega t} E`,
//! so time derivatives become `s = -i omega` and causal kernels are analytic in
//! the upper half `omega` plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma as gamma_fn, gamma_lr};

use crate::dispersion::{neg_i_omega_pow, ModelSpec};
use crate::error::{Error, Result};
use crate::fft::{alias_estimate, analyze, causal_window_start, hermitize, synthesize};
use crate::grid::FrequencyGrid;
use crate::signal::TimeSignal;

/// Anything that can be sampled as a multiplier on the real frequency axis.
pub trait Multiplier: Sync {
    fn eval(&self, omega: f64) -> Complex64;

    /// Whether `|m(omega)|` is unbounded, so that the kernel is a distribution.
    fn is_growing(&self) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "label")]
pub enum SpectralMultiplier {
    /// Riemann-Liouville derivative, `(-i omega)^gamma`.
    FracDeriv { gamma: f64 },
    /// Szabo's loss operator, `-2 alpha0 (-i omega)^{gamma+1} / (cos(pi gamma/2) c0)`.
    SzaboL { gamma: f64, alpha0: f64, c0: f64 },
    /// Attenuation operator `D_*`, multiplier `alpha*(omega)`.
    KStar { model: ModelSpec },
    /// Radial derivative of the attenuation kernel; it vanishes identically.
    KStarRadial,
    /// `T^{1/2}`, `(1 + (-i tau0 omega)^{gamma-1})^{-1/2}`.
    THalf { gamma: f64, tau0: f64 },
    /// `L^{1/2}`, the inverse of `THalf`.
    LHalf { gamma: f64, tau0: f64 },
}

impl SpectralMultiplier {
    pub fn frac_deriv(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("derivative order must be >= 0, got {gamma}")));
        }
        Ok(SpectralMultiplier::FracDeriv { gamma })
    }

    pub fn szabo(gamma: f64, alpha0: f64, c0: f64) -> Result<Self> {
        ModelSpec::szabo(gamma, alpha0, c0)?;
        Ok(SpectralMultiplier::SzaboL { gamma, alpha0, c0 })
    }

    pub fn kstar(model: ModelSpec) -> Self {
        SpectralMultiplier::KStar { model }
    }

    pub fn t_half(gamma: f64, tau0: f64) -> Result<Self> {
        check_t(gamma, tau0)?;
        Ok(SpectralMultiplier::THalf { gamma, tau0 })
    }

    pub fn l_half(gamma: f64, tau0: f64) -> Result<Self> {
        check_t(gamma, tau0)?;
        Ok(SpectralMultiplier::LHalf { gamma, tau0 })
    }

    /// Re-check parameters of a deserialized multiplier.
    pub fn validate(&self) -> Result<()> {
        match *self {
            SpectralMultiplier::FracDeriv { gamma } => Self::frac_deriv(gamma).map(drop),
            SpectralMultiplier::SzaboL { gamma, alpha0, c0 } => Self::szabo(gamma, alpha0, c0).map(drop),
            SpectralMultiplier::KStar { model } => model.validate(),
            SpectralMultiplier::KStarRadial => Ok(()),
            SpectralMultiplier::THalf { gamma, tau0 } | SpectralMultiplier::LHalf { gamma, tau0 } => {
                check_t(gamma, tau0)
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SpectralMultiplier::FracDeriv { .. } => "FracDeriv",
            SpectralMultiplier::SzaboL { .. } => "SzaboL",
            SpectralMultiplier::KStar { .. } => "KStar",
            SpectralMultiplier::KStarRadial => "KStarRadial",
            SpectralMultiplier::THalf { .. } => "THalf",
            SpectralMultiplier::LHalf { .. } => "LHalf",
        }
    }
}

fn check_t(gamma: f64, tau0: f64) -> Result<()> {
    if !(gamma > 1.0 && gamma <= 2.0) {
        return Err(Error::InvalidArgument(format!("gamma must be in (1, 2], got {gamma}")));
    }
    if !(tau0.is_finite() && tau0 > 0.0) {
        return Err(Error::InvalidArgument(format!("tau0 must be positive, got {tau0}")));
    }
    Ok(())
}

/// `szabo_multiplier` under its operator name.
pub fn szabo_multiplier(gamma: f64, alpha0: f64, c0: f64) -> Result<SpectralMultiplier> {
    SpectralMultiplier::szabo(gamma, alpha0, c0)
}

fn t_base(omega: f64, gamma: f64, tau0: f64) -> Complex64 {
    1.0 + neg_i_omega_pow(omega, gamma - 1.0) * tau0.powf(gamma - 1.0)
}

impl Multiplier for SpectralMultiplier {
    fn eval(&self, omega: f64) -> Complex64 {
        match *self {
            SpectralMultiplier::FracDeriv { gamma } => neg_i_omega_pow(omega, gamma),
            SpectralMultiplier::SzaboL { gamma, alpha0, c0 } => {
                -neg_i_omega_pow(omega, gamma + 1.0) * (2.0 * alpha0 / ((PI * gamma / 2.0).cos() * c0))
            }
            SpectralMultiplier::KStar { model } => model.alpha_star_real(omega),
            SpectralMultiplier::KStarRadial => Complex64::new(0.0, 0.0),
            SpectralMultiplier::THalf { gamma, tau0 } => t_base(omega, gamma, tau0).powf(-0.5),
            SpectralMultiplier::LHalf { gamma, tau0 } => t_base(omega, gamma, tau0).sqrt(),
        }
    }

    fn is_growing(&self) -> bool {
        !matches!(self, SpectralMultiplier::THalf { .. } | SpectralMultiplier::KStarRadial)
    }
}

/// Pointwise product of multipliers, i.e. operator composition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Product(pub Vec<SpectralMultiplier>);

impl Multiplier for Product {
    fn eval(&self, omega: f64) -> Complex64 {
        self.0.iter().fold(Complex64::new(1.0, 0.0), |acc, m| acc * m.eval(omega))
    }

    fn is_growing(&self) -> bool {
        self.0.iter().any(Multiplier::is_growing)
    }
}

/// Apply a multiplier to a real signal through the grid dual to its sampling.
///
/// The unpaired `-omega_max` bin is dropped so that compositions stay exact.
pub fn apply_multiplier<M: Multiplier + ?Sized>(m: &M, signal: &TimeSignal) -> Result<TimeSignal> {
    let n = signal.len();
    if n < 16 || !n.is_power_of_two() {
        return Err(Error::GridMismatch(format!("signal length {n} is not a power of two >= 16")));
    }
    let (grid, mut spec) = analyze(&signal.samples, signal.t0, signal.dt)?;
    for (k, v) in spec.iter_mut().enumerate() {
        *v *= m.eval(grid.omega(k));
    }
    spec[0] = Complex64::new(0.0, 0.0);
    hermitize(&mut spec);
    let (samples, _) = synthesize(&spec, &grid, signal.t0)?;
    Ok(TimeSignal { t0: signal.t0, dt: signal.dt, samples, floor: signal.floor })
}

/// Scaling of synthesized kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum KernelNormalization {
    /// `k = (1/2pi) int e^{-i omega t} m(omega) d omega`, so `(k * f)` applies `m`.
    #[default]
    Operator,
    /// `k = int e^{-i omega t} m(omega) d omega`, `2 pi` times the operator kernel.
    Unnormalized,
}

/// Default Gaussian cutoff for growing multipliers.
pub fn default_regularizer(grid: &FrequencyGrid) -> f64 {
    grid.omega_max() / 4.0
}

/// Time-domain kernel of `m` on the causal window of `grid`.
///
/// Growing multipliers need a Gaussian cutoff `omega_c` (`m e^{-(omega/omega_c)^2}`
/// is synthesized). `THalf` without a cutoff is synthesized exactly up to
/// aliasing: its large-`omega` expansion is subtracted in closed form.
pub fn kernel_time_domain(
    m: &SpectralMultiplier,
    grid: &FrequencyGrid,
    regularizer: Option<f64>,
    norm: KernelNormalization,
) -> Result<TimeSignal> {
    if let Some(wc) = regularizer {
        if !(wc.is_finite() && wc > 0.0) {
            return Err(Error::InvalidArgument(format!("regularizer cutoff must be positive, got {wc}")));
        }
    }
    let t0 = causal_window_start(grid);
    let mut out = match (m, regularizer) {
        (SpectralMultiplier::THalf { gamma, tau0 }, None) => t_half_kernel(*gamma, *tau0, grid, t0)?,
        (_, None) if m.is_growing() => return Err(Error::MissingRegularizer(m.label().into())),
        (_, reg) => {
            let mut spec: Vec<Complex64> = grid
                .omegas()
                .into_iter()
                .map(|w| m.eval(w) * reg.map_or(1.0, |wc| (-(w / wc).powi(2)).exp()))
                .collect();
            hermitize(&mut spec);
            let (samples, _) = synthesize(&spec, grid, t0)?;
            let edge = spec[0].norm() / spec.iter().fold(0.0f64, |a, v| a.max(v.norm())).max(f64::MIN_POSITIVE);
            let floor = alias_estimate(&samples) + edge;
            TimeSignal { t0, dt: grid.dt(), samples, floor }
        }
    };
    if norm == KernelNormalization::Unnormalized {
        let f = out.floor;
        out = out.scaled(2.0 * PI);
        out.floor = f;
    }
    Ok(out)
}

/// Terms `c_j s^{-p_j}` of the large-`s` expansion of `(1 + (tau0 s)^{gamma-1})^{-1/2}`
/// with `p_j < 2`.
fn t_half_singular_terms(gamma: f64, tau0: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut binom = 1.0;
    for j in 0.. {
        let p = (gamma - 1.0) * (j as f64 + 0.5);
        if p >= 2.0 {
            break;
        }
        out.push((binom * tau0.powf(-p), p));
        binom *= (-0.5 - j as f64) / (j as f64 + 1.0);
    }
    out
}

fn t_half_kernel(gamma: f64, tau0: f64, grid: &FrequencyGrid, t0: f64) -> Result<TimeSignal> {
    let m = SpectralMultiplier::THalf { gamma, tau0 };
    let terms = t_half_singular_terms(gamma, tau0);
    let b = 2.0 / tau0;
    // c (s + b)^{-p} <-> c t^{p-1} e^{-b t} / Gamma(p)
    let mut spec: Vec<Complex64> = grid
        .omegas()
        .into_iter()
        .map(|w| {
            let sb = Complex64::new(b, -w);
            terms.iter().fold(m.eval(w), |acc, &(c, p)| acc - sb.powf(-p) * c)
        })
        .collect();
    let peak = spec.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let edge = spec[0].norm() / peak.max(f64::MIN_POSITIVE);
    hermitize(&mut spec);
    let (mut samples, _) = synthesize(&spec, grid, t0)?;
    let dt = grid.dt();
    let period = grid.period();
    let analytic = |t: f64| -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        terms
            .iter()
            .map(|&(c, p)| {
                if t == 0.0 {
                    // cell average over [0, dt/2] keeps the integrable singularity finite
                    c * b.powf(-p) * gamma_lr(p, b * dt / 2.0) / dt
                } else {
                    c * t.powf(p - 1.0) * (-b * t).exp() / gamma_fn(p)
                }
            })
            .sum()
    };
    for (j, v) in samples.iter_mut().enumerate() {
        let t = t0 + j as f64 * dt;
        *v += analytic(t) + analytic(t + period);
    }
    let floor = alias_estimate(&samples) + edge;
    Ok(TimeSignal { t0, dt, samples, floor })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn windowed_sine(n: usize, dt: f64) -> TimeSignal {
        let t0 = -(n as f64) / 2.0 * dt;
        let samples = (0..n)
            .map(|j| {
                let t = t0 + j as f64 * dt;
                (-(t / 8.0).powi(2)).exp() * (1.3 * t).sin()
            })
            .collect();
        TimeSignal::new(t0, dt, samples).unwrap()
    }

    #[test]
    fn szabo_value_at_unit_frequency() {
        let m = szabo_multiplier(0.5, 1.0, 1.0).unwrap();
        let expect = -Complex64::from_polar(1.0, -0.75 * PI) * (2.0 / (PI / 4.0).cos());
        assert!((m.eval(1.0) - expect).norm() < 1e-14);
    }

    #[test]
    fn hermitian_and_inverse_pair() {
        let t = SpectralMultiplier::t_half(1.5, 0.3).unwrap();
        let l = SpectralMultiplier::l_half(1.5, 0.3).unwrap();
        for &w in &[0.01, 0.7, 3.0, 250.0] {
            assert!((t.eval(-w) - t.eval(w).conj()).norm() < 1e-15);
            assert!((t.eval(w) * l.eval(w) - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn derivative_of_windowed_sine() {
        let s = windowed_sine(1024, 0.05);
        let d = apply_multiplier(&SpectralMultiplier::frac_deriv(1.0).unwrap(), &s).unwrap();
        let mut worst: f64 = 0.0;
        for j in 0..s.len() {
            let t = s.time(j);
            let g = (-(t / 8.0).powi(2)).exp();
            let exact = g * (1.3 * (1.3 * t).cos() - 2.0 * t / 64.0 * (1.3 * t).sin());
            worst = worst.max((d.samples[j] - exact).abs());
        }
        assert!(worst < 1e-3, "{worst}");
    }

    #[test]
    fn kstar_radial_is_zero() {
        assert_eq!(SpectralMultiplier::KStarRadial.eval(3.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn growing_kernel_needs_regularizer() {
        let g = FrequencyGrid::new(256, 0.1).unwrap();
        let m = SpectralMultiplier::frac_deriv(0.5).unwrap();
        assert!(matches!(
            kernel_time_domain(&m, &g, None, KernelNormalization::Operator),
            Err(Error::MissingRegularizer(_))
        ));
        assert!(kernel_time_domain(&m, &g, Some(default_regularizer(&g)), KernelNormalization::Operator).is_ok());
    }

    #[test]
    fn t_half_kernel_closed_form() {
        let tau0 = 1.0;
        let grid = FrequencyGrid::from_dt(1 << 14, 0.01).unwrap();
        let m = SpectralMultiplier::t_half(2.0, tau0).unwrap();
        let k = kernel_time_domain(&m, &grid, None, KernelNormalization::Operator).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..k.len() {
            let t = k.time(j);
            if t >= 4.0 * k.dt && t <= 10.0 * tau0 {
                let exact = (-t / tau0).exp() / (PI * tau0 * t).sqrt();
                num += (k.samples[j] - exact).powi(2);
                den += exact * exact;
            }
        }
        assert!((num / den).sqrt() < 5e-4, "{}", (num / den).sqrt());
    }

    #[test]
    fn singular_terms() {
        let t = t_half_singular_terms(2.0, 1.0);
        assert_eq!(t.len(), 2);
        assert!((t[0].0 - 1.0).abs() < 1e-15 && (t[0].1 - 0.5).abs() < 1e-15);
        assert!((t[1].0 + 0.5).abs() < 1e-15 && (t[1].1 - 1.5).abs() < 1e-15);
    }
}
