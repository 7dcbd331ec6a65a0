//! Attenuation laws and the complex attenuation `alpha*`.
//!
//! Every model except `PowerLawGamma1` is written through its Laplace symbol
//! `A(s)` with `s = -i omega`, so `alpha*(omega) = A(-i omega)` and the continuation
//! to complex `omega` uses principal powers in `s`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    PowerLaw,
    PowerLawGamma1,
    Szabo,
    ThermoViscous,
    KowarModified,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::PowerLaw => "PowerLaw",
            ModelKind::PowerLawGamma1 => "PowerLawGamma1",
            ModelKind::Szabo => "Szabo",
            ModelKind::ThermoViscous => "ThermoViscous",
            ModelKind::KowarModified => "KowarModified",
        }
    }
}

/// A validated attenuation model.
///
/// `ThermoViscous::c1` is the trial speed used as `v_B`; `KowarModified::c1` is
/// the speed in the modified operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRecord", into = "ModelRecord")]
pub enum ModelSpec {
    PowerLaw { gamma: f64, alpha0: f64, omega0: f64, c0: f64 },
    PowerLawGamma1 { alpha0: f64, omega0: f64, c0: f64 },
    Szabo { gamma: f64, alpha0: f64, c0: f64 },
    ThermoViscous { tau0: f64, c0: f64, c1: f64 },
    KowarModified { gamma: f64, tau0: f64, c0: f64, c1: f64 },
}

/// Flat key/value form; absent keys are unset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelRecord {
    pub kind: Option<ModelKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau0: Option<f64>,
}

impl TryFrom<ModelRecord> for ModelSpec {
    type Error = Error;

    fn try_from(r: ModelRecord) -> Result<Self> {
        let kind = r.kind.ok_or_else(|| Error::InvalidModel("missing kind".into()))?;
        let name = kind.as_str();
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| Error::InvalidModel(format!("{name} requires {key}")));
        let forbid = |v: Option<f64>, key: &str| match v {
            Some(_) => Err(Error::InvalidModel(format!("{name} does not use {key}"))),
            None => Ok(()),
        };
        let m = match kind {
            ModelKind::PowerLaw => {
                forbid(r.c1, "c1")?;
                forbid(r.tau0, "tau0")?;
                ModelSpec::PowerLaw {
                    gamma: need(r.gamma, "gamma")?,
                    alpha0: need(r.alpha0, "alpha0")?,
                    omega0: r.omega0.unwrap_or(0.0),
                    c0: need(r.c0, "c0")?,
                }
            }
            ModelKind::PowerLawGamma1 => {
                if let Some(g) = r.gamma {
                    if g != 1.0 {
                        return Err(Error::InvalidModel("PowerLawGamma1 has gamma = 1".into()));
                    }
                }
                forbid(r.c1, "c1")?;
                forbid(r.tau0, "tau0")?;
                ModelSpec::PowerLawGamma1 {
                    alpha0: need(r.alpha0, "alpha0")?,
                    omega0: need(r.omega0, "omega0")?,
                    c0: need(r.c0, "c0")?,
                }
            }
            ModelKind::Szabo => {
                forbid(r.omega0, "omega0")?;
                forbid(r.c1, "c1")?;
                forbid(r.tau0, "tau0")?;
                ModelSpec::Szabo {
                    gamma: need(r.gamma, "gamma")?,
                    alpha0: need(r.alpha0, "alpha0")?,
                    c0: need(r.c0, "c0")?,
                }
            }
            ModelKind::ThermoViscous => {
                forbid(r.gamma, "gamma")?;
                forbid(r.alpha0, "alpha0")?;
                forbid(r.omega0, "omega0")?;
                let c0 = need(r.c0, "c0")?;
                ModelSpec::ThermoViscous { tau0: need(r.tau0, "tau0")?, c0, c1: r.c1.unwrap_or(c0) }
            }
            ModelKind::KowarModified => {
                forbid(r.alpha0, "alpha0")?;
                forbid(r.omega0, "omega0")?;
                ModelSpec::KowarModified {
                    gamma: need(r.gamma, "gamma")?,
                    tau0: need(r.tau0, "tau0")?,
                    c0: need(r.c0, "c0")?,
                    c1: need(r.c1, "c1")?,
                }
            }
        };
        m.validate()?;
        Ok(m)
    }
}

impl From<ModelSpec> for ModelRecord {
    fn from(m: ModelSpec) -> Self {
        let mut r = ModelRecord { kind: Some(m.kind()), ..Default::default() };
        match m {
            ModelSpec::PowerLaw { gamma, alpha0, omega0, c0 } => {
                r.gamma = Some(gamma);
                r.alpha0 = Some(alpha0);
                r.omega0 = Some(omega0);
                r.c0 = Some(c0);
            }
            ModelSpec::PowerLawGamma1 { alpha0, omega0, c0 } => {
                r.alpha0 = Some(alpha0);
                r.omega0 = Some(omega0);
                r.c0 = Some(c0);
            }
            ModelSpec::Szabo { gamma, alpha0, c0 } => {
                r.gamma = Some(gamma);
                r.alpha0 = Some(alpha0);
                r.c0 = Some(c0);
            }
            ModelSpec::ThermoViscous { tau0, c0, c1 } => {
                r.tau0 = Some(tau0);
                r.c0 = Some(c0);
                r.c1 = Some(c1);
            }
            ModelSpec::KowarModified { gamma, tau0, c0, c1 } => {
                r.gamma = Some(gamma);
                r.tau0 = Some(tau0);
                r.c0 = Some(c0);
                r.c1 = Some(c1);
            }
        }
        r
    }
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-12
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{name} must be positive, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{name} must be non-negative, got {v}")))
    }
}

impl ModelSpec {
    pub fn power_law(gamma: f64, alpha0: f64, omega0: f64, c0: f64) -> Result<Self> {
        let m = ModelSpec::PowerLaw { gamma, alpha0, omega0, c0 };
        m.validate().map(|_| m)
    }

    pub fn power_law_gamma1(alpha0: f64, omega0: f64, c0: f64) -> Result<Self> {
        let m = ModelSpec::PowerLawGamma1 { alpha0, omega0, c0 };
        m.validate().map(|_| m)
    }

    pub fn szabo(gamma: f64, alpha0: f64, c0: f64) -> Result<Self> {
        let m = ModelSpec::Szabo { gamma, alpha0, c0 };
        m.validate().map(|_| m)
    }

    /// Thermo-viscous model with trial speed `c1`.
    pub fn thermo_viscous(tau0: f64, c0: f64, c1: f64) -> Result<Self> {
        let m = ModelSpec::ThermoViscous { tau0, c0, c1 };
        m.validate().map(|_| m)
    }

    pub fn kowar_modified(gamma: f64, tau0: f64, c0: f64, c1: f64) -> Result<Self> {
        let m = ModelSpec::KowarModified { gamma, tau0, c0, c1 };
        m.validate().map(|_| m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::PowerLaw { gamma, alpha0, omega0, c0 } => {
                positive("gamma", gamma)?;
                if is_integer(gamma) {
                    return Err(Error::InvalidModel(format!(
                        "PowerLaw needs a non-integer gamma, got {gamma}; use PowerLawGamma1 for gamma = 1"
                    )));
                }
                non_negative("alpha0", alpha0)?;
                non_negative("omega0", omega0)?;
                positive("c0", c0)
            }
            ModelSpec::PowerLawGamma1 { alpha0, omega0, c0 } => {
                non_negative("alpha0", alpha0)?;
                positive("omega0", omega0)?;
                positive("c0", c0)
            }
            ModelSpec::Szabo { gamma, alpha0, c0 } => {
                positive("gamma", gamma)?;
                if is_integer(gamma) {
                    return Err(Error::InvalidModel(format!("Szabo needs a non-integer gamma, got {gamma}")));
                }
                non_negative("alpha0", alpha0)?;
                positive("c0", c0)
            }
            ModelSpec::ThermoViscous { tau0, c0, c1 } => {
                non_negative("tau0", tau0)?;
                positive("c0", c0)?;
                positive("c1", c1)
            }
            ModelSpec::KowarModified { gamma, tau0, c0, c1 } => {
                if !(gamma > 1.0 && gamma <= 2.0) {
                    return Err(Error::InvalidModel(format!("KowarModified needs gamma in (1, 2], got {gamma}")));
                }
                non_negative("tau0", tau0)?;
                positive("c0", c0)?;
                positive("c1", c1)
            }
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::PowerLaw { .. } => ModelKind::PowerLaw,
            ModelSpec::PowerLawGamma1 { .. } => ModelKind::PowerLawGamma1,
            ModelSpec::Szabo { .. } => ModelKind::Szabo,
            ModelSpec::ThermoViscous { .. } => ModelKind::ThermoViscous,
            ModelSpec::KowarModified { .. } => ModelKind::KowarModified,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            ModelSpec::PowerLaw { gamma, .. }
            | ModelSpec::Szabo { gamma, .. }
            | ModelSpec::KowarModified { gamma, .. } => Some(gamma),
            ModelSpec::PowerLawGamma1 { .. } => Some(1.0),
            ModelSpec::ThermoViscous { .. } => None,
        }
    }

    /// The speed `v_B` that `alpha*` is measured against.
    pub fn bound_speed(&self) -> f64 {
        match *self {
            ModelSpec::PowerLaw { c0, .. }
            | ModelSpec::PowerLawGamma1 { c0, .. }
            | ModelSpec::Szabo { c0, .. }
            | ModelSpec::KowarModified { c0, .. } => c0,
            ModelSpec::ThermoViscous { c1, .. } => c1,
        }
    }

    /// Frequency scale where the model changes character.
    pub fn characteristic_frequency(&self) -> f64 {
        match *self {
            ModelSpec::ThermoViscous { tau0, .. } | ModelSpec::KowarModified { tau0, .. } if tau0 > 0.0 => 1.0 / tau0,
            ModelSpec::PowerLaw { omega0, .. } if omega0 > 0.0 => omega0,
            ModelSpec::PowerLawGamma1 { omega0, .. } => omega0,
            ModelSpec::Szabo { gamma, alpha0, c0 } if alpha0 > 0.0 => {
                let at = alpha0 / (PI * gamma / 2.0).cos();
                (2.0 * at.abs() * c0).powf(-1.0 / (gamma - 1.0))
            }
            _ => 1.0,
        }
    }

    /// Laplace symbol `A(s)`, `alpha*(omega) = A(-i omega)`.
    ///
    /// For `PowerLawGamma1` this is the analytic function `-(2/pi) alpha0 s ln(s/omega0)`,
    /// which agrees with `alpha*` on the real frequency axis only.
    pub fn laplace_symbol(&self, s: Complex64) -> Result<Complex64> {
        if s == Complex64::new(0.0, 0.0) {
            return Ok(s);
        }
        if s.im == 0.0 && s.re < 0.0 {
            return Err(Error::BranchCut(format!("s = {s} lies on the negative real axis")));
        }
        Ok(match *self {
            ModelSpec::PowerLaw { gamma, alpha0, omega0, .. } => {
                let mut a = s.powf(gamma) * (alpha0 / (PI * gamma / 2.0).cos());
                if omega0 > 0.0 {
                    a -= s * (alpha0 * (PI * gamma / 2.0).tan() * omega0.powf(gamma - 1.0));
                }
                a
            }
            ModelSpec::PowerLawGamma1 { alpha0, omega0, .. } => -s * (s / omega0).ln() * (2.0 / PI * alpha0),
            ModelSpec::Szabo { gamma, alpha0, c0 } => {
                let at = alpha0 / (PI * gamma / 2.0).cos();
                let mut w = 1.0 + s.powf(gamma - 1.0) * (2.0 * at * c0);
                if w.re < 0.0 && w.im.abs() <= 1e-12 * w.norm() {
                    w.im = 0.0;
                }
                s / c0 * (w.sqrt() - 1.0)
            }
            ModelSpec::ThermoViscous { tau0, c0, c1 } => s / (c0 * (1.0 + s * tau0).sqrt()) - s / c1,
            ModelSpec::KowarModified { gamma, tau0, c1, .. } => {
                if tau0 == 0.0 {
                    s / c1
                } else {
                    let u = (s * tau0).powf(gamma - 1.0);
                    let r = (1.0 + u).sqrt();
                    s / c1 - s / c1 * u / (r * (1.0 + r))
                }
            }
        })
    }

    /// `alpha*(omega)` for complex `omega`.
    pub fn alpha_star(&self, omega: Complex64) -> Result<Complex64> {
        if omega.re == 0.0 && omega.im == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        match *self {
            ModelSpec::PowerLawGamma1 { alpha0, omega0, .. } => {
                let m = omega.norm();
                Ok(m * alpha0 + Complex64::i() * (2.0 / PI * alpha0) * omega * (m / omega0).ln())
            }
            _ => self.laplace_symbol(Complex64::new(omega.im, -omega.re)),
        }
    }

    /// `alpha*` on the real axis.
    pub fn alpha_star_real(&self, omega: f64) -> Complex64 {
        self.alpha_star(Complex64::new(omega, 0.0)).expect("real frequencies never hit a branch cut")
    }

    /// The reflected function `z -> alpha*(-z)` used for half-plane scans.
    pub fn alpha_star_reflected(&self, z: Complex64) -> Result<Complex64> {
        self.alpha_star(-z)
    }

    /// Wave number `k = i alpha* + omega / v_B`.
    pub fn wavenumber(&self, omega: f64) -> Complex64 {
        Complex64::i() * self.alpha_star_real(omega) + omega / self.bound_speed()
    }

    /// `lim 1/c(omega)` as `|omega| -> inf`, when finite.
    pub fn high_frequency_slowness(&self) -> Option<f64> {
        match *self {
            ModelSpec::PowerLaw { gamma, alpha0, omega0, c0 } => {
                if alpha0 == 0.0 {
                    Some(1.0 / c0)
                } else if gamma < 1.0 {
                    let a2 =
                        if omega0 > 0.0 { alpha0 * (PI * gamma / 2.0).tan() * omega0.powf(gamma - 1.0) } else { 0.0 };
                    Some(1.0 / c0 - a2)
                } else {
                    None
                }
            }
            ModelSpec::PowerLawGamma1 { alpha0, c0, .. } => (alpha0 == 0.0).then_some(1.0 / c0),
            ModelSpec::Szabo { gamma, alpha0, c0 } => (alpha0 == 0.0 || gamma < 1.0).then_some(1.0 / c0),
            ModelSpec::ThermoViscous { .. } => Some(0.0),
            ModelSpec::KowarModified { tau0, c0, c1, .. } => {
                Some(if tau0 > 0.0 { 1.0 / c0 } else { 1.0 / c0 + 1.0 / c1 })
            }
        }
    }

    /// Dispersion-relation residual `max |k^2 - rhs| / (1 + |k|^2)` on the grid,
    /// where `rhs` is the symbol of the model's wave equation evaluated independently.
    pub fn dispersion_residual(&self, grid: &FrequencyGrid) -> f64 {
        grid.omegas()
            .into_iter()
            .map(|w| {
                let k = self.wavenumber(w);
                (k * k - self.wave_equation_symbol(w)).norm() / (1.0 + k.norm_sqr())
            })
            .fold(0.0, f64::max)
    }

    /// `k(omega)^2` as read off the model's wave equation.
    fn wave_equation_symbol(&self, w: f64) -> Complex64 {
        let s = Complex64::new(0.0, -w);
        match *self {
            ModelSpec::PowerLaw { gamma, alpha0, omega0, c0 } => {
                let a2 = if omega0 > 0.0 { alpha0 * (PI * gamma / 2.0).tan() * omega0.powf(gamma - 1.0) } else { 0.0 };
                let b = neg_i_omega_pow(w, gamma) * (alpha0 / (PI * gamma / 2.0).cos()) + s * (1.0 / c0 - a2);
                -b * b
            }
            ModelSpec::PowerLawGamma1 { alpha0, omega0, c0 } => {
                if w == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let lg = Complex64::new((w.abs() / omega0).ln(), -PI / 2.0 * w.signum());
                let b = -s * lg * (2.0 / PI * alpha0) + s / c0;
                -b * b
            }
            ModelSpec::Szabo { gamma, alpha0, c0 } => {
                let m = -neg_i_omega_pow(w, gamma + 1.0) * (2.0 * alpha0 / ((PI * gamma / 2.0).cos() * c0));
                w * w / (c0 * c0) + m
            }
            ModelSpec::ThermoViscous { tau0, c0, .. } => {
                Complex64::new(w * w / (c0 * c0), 0.0) / Complex64::new(1.0, -tau0 * w)
            }
            ModelSpec::KowarModified { gamma, tau0, c0, c1 } => {
                let t = (1.0 + neg_i_omega_pow(w, gamma - 1.0) * tau0.powf(gamma - 1.0)).powf(-0.5);
                let b = t / c1 + 1.0 / c0;
                -s * s * b * b
            }
        }
    }
}

/// `(-i omega)^p` with the principal branch, written in polar form.
pub fn neg_i_omega_pow(omega: f64, p: f64) -> Complex64 {
    if omega == 0.0 {
        return if p == 0.0 {
            Complex64::new(1.0, 0.0)
        } else if p > 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
    }
    Complex64::from_polar(omega.abs().powf(p), -PI / 2.0 * p * omega.signum())
}

/// `alpha*(omega)`.
pub fn alpha_star(model: &ModelSpec, omega: Complex64) -> Result<Complex64> {
    model.alpha_star(omega)
}

/// `alpha(omega) = Re alpha*(omega)` for real `omega`.
pub fn attenuation(model: &ModelSpec, omega: f64) -> f64 {
    model.alpha_star_real(omega).re
}

/// Phase speed from `1/c = 1/v_B - Im alpha*(omega) / omega`, `omega != 0`.
pub fn phase_speed(model: &ModelSpec, omega: f64) -> Result<f64> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::InvalidArgument(
            "phase speed needs a finite nonzero frequency; use phase_speed_zero_limit".into(),
        ));
    }
    let inv = 1.0 / model.bound_speed() - model.alpha_star_real(omega).im / omega;
    if !(inv.is_finite() && inv > 0.0) {
        return Err(Error::Domain(format!("phase speed is not positive at omega = {omega} (1/c = {inv})")));
    }
    Ok(1.0 / inv)
}

/// `lim c(omega)` as `omega -> 0`.
pub fn phase_speed_zero_limit(model: &ModelSpec) -> Result<f64> {
    let singular = || Err(Error::SingularLimit(format!("{} phase speed tends to zero at DC", model.kind().as_str())));
    let inv = match *model {
        ModelSpec::PowerLaw { gamma, alpha0, omega0, c0 } => {
            if alpha0 == 0.0 {
                1.0 / c0
            } else if gamma < 1.0 {
                return singular();
            } else {
                let a2 = if omega0 > 0.0 { alpha0 * (PI * gamma / 2.0).tan() * omega0.powf(gamma - 1.0) } else { 0.0 };
                1.0 / c0 - a2
            }
        }
        ModelSpec::PowerLawGamma1 { alpha0, c0, .. } => {
            if alpha0 > 0.0 {
                return singular();
            }
            1.0 / c0
        }
        ModelSpec::Szabo { gamma, alpha0, c0 } => {
            if alpha0 > 0.0 && gamma < 1.0 {
                return singular();
            }
            1.0 / c0
        }
        ModelSpec::ThermoViscous { c0, .. } => 1.0 / c0,
        ModelSpec::KowarModified { c0, c1, .. } => 1.0 / c0 + 1.0 / c1,
    };
    if inv > 0.0 {
        Ok(1.0 / inv)
    } else {
        Err(Error::Domain("phase speed limit is not positive".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn power_law_half_at_unit_frequency() {
        let m = ModelSpec::power_law(0.5, 1.0, 0.0, 1.0).unwrap();
        let a = m.alpha_star_real(1.0);
        assert!((a - c(1.0, -1.0)).norm() < 1e-12, "{a}");
        assert!((attenuation(&m, 1.0) - 1.0).abs() < 1e-12);
        // 1/c = 1 - (-1) = 2
        assert!((phase_speed(&m, 1.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn attenuation_is_power_law() {
        for &g in &[0.3, 0.5, 1.5, 1.7, 2.5] {
            let m = ModelSpec::power_law(g, 0.7, 0.0, 1.0).unwrap();
            for &w in &[0.1, 1.0, 7.3, -2.0] {
                let a: f64 = 0.7 * f64::abs(w).powf(g);
                assert!((attenuation(&m, w) - a).abs() < 1e-12 * (1.0 + a), "g={g} w={w}");
            }
        }
    }

    #[test]
    fn power_law_reference_speed() {
        let m = ModelSpec::power_law(0.5, 0.3, 2.0, 1.5).unwrap();
        assert!((phase_speed(&m, 2.0).unwrap() - 1.5).abs() < 1e-12);
        let m = ModelSpec::power_law(1.5, 0.3, 2.0, 1.5).unwrap();
        assert!((phase_speed(&m, -2.0).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn gamma1_formula_and_reference_speed() {
        let m = ModelSpec::power_law_gamma1(0.2, 3.0, 2.0).unwrap();
        let a = m.alpha_star_real(6.0);
        let expect = c(0.2 * 6.0, 2.0 / PI * 0.2 * 6.0 * 2f64.ln());
        assert!((a - expect).norm() < 1e-12);
        assert!((phase_speed(&m, 3.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(phase_speed_zero_limit(&m), Err(Error::SingularLimit(_))));
    }

    #[test]
    fn gamma1_real_axis_agrees_with_analytic_symbol() {
        let m = ModelSpec::power_law_gamma1(0.4, 2.0, 1.0).unwrap();
        for &w in &[-5.0, -0.3, 0.7, 9.0] {
            let a = m.alpha_star_real(w);
            let b = m.laplace_symbol(c(0.0, -w)).unwrap();
            assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()), "w={w}");
        }
    }

    #[test]
    fn thermo_viscous_closed_form() {
        let (tau0, c0) = (0.3, 1.7);
        let m = ModelSpec::thermo_viscous(tau0, c0, c0).unwrap();
        for &w in &[0.1, 1.0, 4.0, 30.0] {
            let big_a = 1.0 + (1.0 + (tau0 * w).powi(2)).sqrt();
            let alpha = tau0 * w * w / ((2.0 * big_a).sqrt() * (big_a - 1.0) * c0);
            let speed = 2f64.sqrt() * (big_a - 1.0) * c0 / big_a.sqrt();
            assert!((attenuation(&m, w) - alpha).abs() < 1e-12 * (1.0 + alpha));
            assert!((phase_speed(&m, w).unwrap() - speed).abs() < 1e-10 * speed);
        }
        assert_eq!(phase_speed_zero_limit(&m).unwrap(), c0);
    }

    #[test]
    fn thermo_viscous_speed_is_independent_of_trial_speed() {
        let a = ModelSpec::thermo_viscous(0.2, 1.0, 1.0).unwrap();
        let b = ModelSpec::thermo_viscous(0.2, 1.0, 3.0).unwrap();
        for &w in &[0.5, 2.0, 11.0] {
            assert!((phase_speed(&a, w).unwrap() - phase_speed(&b, w).unwrap()).abs() < 1e-12);
            assert!((attenuation(&a, w) - attenuation(&b, w)).abs() < 1e-12);
        }
    }

    #[test]
    fn kowar_small_frequency_attenuation() {
        let (g, tau0, c1) = (1.5, 0.2, 2.0);
        let m = ModelSpec::kowar_modified(g, tau0, 1.0, c1).unwrap();
        let w: f64 = 1e-6;
        let pref = (PI * (g - 1.0) / 2.0).sin() / (2.0 * tau0 * c1);
        let expect = pref * (tau0 * w).powf(g);
        assert!((attenuation(&m, w) / expect - 1.0).abs() < 1e-3);
        let big = ModelSpec::kowar_modified(g, tau0, 1.0, c1).unwrap();
        let w: f64 = 1e6;
        let expect = (PI * (g - 1.0) / 4.0).sin() / c1 * w.powf((3.0 - g) / 2.0) * tau0.powf((1.0 - g) / 2.0);
        assert!((attenuation(&big, w) / expect - 1.0).abs() < 1e-2);
    }

    #[test]
    fn kowar_pure_delay() {
        let m = ModelSpec::kowar_modified(1.5, 0.0, 1.0, 2.0).unwrap();
        let a = m.alpha_star_real(3.0);
        assert!((a - c(0.0, -1.5)).norm() < 1e-15);
        assert!((phase_speed(&m, 3.0).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((phase_speed_zero_limit(&m).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_frequency_and_branch_cut() {
        let m = ModelSpec::power_law(0.5, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(m.alpha_star(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        // s = -i omega = -1 for omega = -i
        assert!(matches!(m.alpha_star(c(0.0, -1.0)), Err(Error::BranchCut(_))));
        assert!(phase_speed(&m, 0.0).is_err());
        assert!(matches!(phase_speed_zero_limit(&m), Err(Error::SingularLimit(_))));
    }

    #[test]
    fn szabo_positive_attenuation() {
        for &g in &[0.3, 0.5, 0.9, 1.1, 1.5, 1.9, 2.5, 3.5] {
            let m = ModelSpec::szabo(g, 0.5, 1.0).unwrap();
            for i in 0..60 {
                let w = 10f64.powf(-3.0 + i as f64 * 0.1);
                assert!(attenuation(&m, w) >= 0.0, "g={g} w={w}");
            }
        }
    }

    #[test]
    fn szabo_matches_power_law_at_low_frequency() {
        let m = ModelSpec::szabo(1.5, 0.1, 1.0).unwrap();
        let w: f64 = 1e-8;
        assert!((attenuation(&m, w) / (0.1 * w.powf(1.5)) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn dispersion_residual_is_rounding_level() {
        let grid = FrequencyGrid::new(256, 0.1).unwrap();
        let models = [
            ModelSpec::power_law(0.5, 0.3, 0.0, 1.0).unwrap(),
            ModelSpec::power_law(1.5, 0.3, 2.0, 1.0).unwrap(),
            ModelSpec::power_law_gamma1(0.3, 1.0, 1.0).unwrap(),
            ModelSpec::szabo(0.5, 0.3, 1.0).unwrap(),
            ModelSpec::szabo(1.5, 0.3, 1.0).unwrap(),
            ModelSpec::thermo_viscous(0.1, 1.0, 1.3).unwrap(),
            ModelSpec::kowar_modified(1.5, 0.2, 1.0, 2.0).unwrap(),
            ModelSpec::kowar_modified(2.0, 0.2, 1.0, 2.0).unwrap(),
        ];
        for m in &models {
            let r = m.dispersion_residual(&grid);
            assert!(r < 1e-10, "{m:?}: {r}");
        }
    }

    #[test]
    fn validation() {
        assert!(ModelSpec::power_law(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(ModelSpec::power_law(2.0, 1.0, 0.0, 1.0).is_err());
        assert!(ModelSpec::power_law(0.5, -1.0, 0.0, 1.0).is_err());
        assert!(ModelSpec::szabo(3.0, 1.0, 1.0).is_err());
        assert!(ModelSpec::kowar_modified(2.5, 1.0, 1.0, 1.0).is_err());
        assert!(ModelSpec::kowar_modified(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelSpec::power_law_gamma1(1.0, 0.0, 1.0).is_err());
        assert!(ModelSpec::thermo_viscous(0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn record_round_trip_and_rejections() {
        let m = ModelSpec::kowar_modified(1.5, 0.2, 1.0, 2.0).unwrap();
        let j = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<ModelSpec>(&j).unwrap(), m);
        let tv: ModelSpec = serde_json::from_str(r#"{"kind":"ThermoViscous","tau0":0.1,"c0":2.0}"#).unwrap();
        assert_eq!(tv.bound_speed(), 2.0);
        assert!(
            serde_json::from_str::<ModelSpec>(r#"{"kind":"Szabo","gamma":0.5,"alpha0":1,"c0":1,"tau0":1}"#).is_err()
        );
        assert!(
            serde_json::from_str::<ModelSpec>(r#"{"kind":"Szabo","gamma":0.5,"alpha0":1,"c0":1,"bogus":1}"#).is_err()
        );
        assert!(serde_json::from_str::<ModelSpec>(r#"{"kind":"PowerLaw","alpha0":1,"c0":1}"#).is_err());
    }
}
