//! Half-plane causality certification.
//!
//! `alpha*(-z)` is scanned on rays `z = r e^{i phi}` in the lower half plane. A
//! causal model keeps `-Re alpha*(-z)` below `C + N log(1 + |z|)` and is analytic
//! there; power-law growth of the positive part or a Cauchy-Riemann failure
//! refutes causality.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::ModelSpec;
use crate::error::{Error, Result};

/// Default Cauchy-Riemann tolerance.
pub const DEFAULT_CR_TOL: f64 = 1e-4;
/// Growth exponent above which a power fit counts as a violation.
pub const MIN_VIOLATION_EXPONENT: f64 = 0.5;
/// Coefficient of determination a violating power fit must reach.
pub const MIN_VIOLATION_R2: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRay {
    pub phi: f64,
    /// Ray picked analytically as a witness candidate for this model.
    pub constructive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneScan {
    rays: Vec<ScanRay>,
    radii: Vec<f64>,
}

impl HalfPlaneScan {
    /// At least 8 angles in `(-pi, 0)` and at least 16 increasing radii.
    pub fn new(rays: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        Self::from_rays(rays.into_iter().map(|phi| ScanRay { phi, constructive: false }).collect(), radii)
    }

    pub fn from_rays(rays: Vec<ScanRay>, radii: Vec<f64>) -> Result<Self> {
        if rays.len() < 8 {
            return Err(Error::InvalidArgument(format!("need at least 8 rays, got {}", rays.len())));
        }
        if radii.len() < 16 {
            return Err(Error::InvalidArgument(format!("need at least 16 radii, got {}", radii.len())));
        }
        if let Some(r) = rays.iter().find(|r| !(r.phi > -PI && r.phi < 0.0)) {
            return Err(Error::InvalidArgument(format!("ray angle {} is not in (-pi, 0)", r.phi)));
        }
        if !(radii[0] > 0.0) || radii.windows(2).any(|w| !(w[1] > w[0])) || radii.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidArgument("radii must be positive and strictly increasing".into()));
        }
        Ok(HalfPlaneScan { rays, radii })
    }

    /// 16 uniform rays plus the model's constructive rays, 64 radii over six
    /// decades around its characteristic frequency.
    pub fn for_model(model: &ModelSpec) -> Self {
        let scale = model.characteristic_frequency();
        Self::for_model_with_range(model, scale * 1e-2, scale * 1e4, 64)
    }

    pub fn for_model_with_range(model: &ModelSpec, r_min: f64, r_max: f64, count: usize) -> Self {
        let mut rays: Vec<ScanRay> =
            (0..16).map(|i| ScanRay { phi: -PI + 0.05 + (PI - 0.1) * i as f64 / 15.0, constructive: false }).collect();
        rays.extend(constructive_rays(model).into_iter().map(|phi| ScanRay { phi, constructive: true }));
        let radii = log_space(r_min, r_max, count.max(16));
        HalfPlaneScan::from_rays(rays, radii).expect("standard scan is valid")
    }

    /// Scan reaching far enough that a slowness margin `delta` dominates the
    /// sub-linear part of the symbol.
    pub fn for_margin(model: &ModelSpec, delta: f64) -> Self {
        let scale = model.characteristic_frequency();
        let reach = 1e4 * (1.0 / (delta * model.bound_speed()).min(1.0)).powi(2);
        let decades = (reach * 1e2).log10().ceil() as usize;
        Self::for_model_with_range(model, scale * 1e-2, scale * reach, 10 * decades + 1)
    }

    pub fn rays(&self) -> &[ScanRay] {
        &self.rays
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

pub(crate) fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Rays on which growth of `-Re alpha*(-z)` is expected when the model is acausal.
///
/// Always the negative imaginary axis. Power laws whose `cos(pi gamma / 2)` is
/// positive add `phi_delta = (1/gamma - 1) pi/2 + delta/gamma`; Szabo with
/// `gamma > 3` adds `pi/(gamma - 1) - pi/2`, where the root argument turns negative.
pub fn constructive_rays(model: &ModelSpec) -> Vec<f64> {
    let mut out = vec![-PI / 2.0];
    match *model {
        ModelSpec::PowerLaw { gamma, .. } if gamma > 1.0 && (PI * gamma / 2.0).cos() > 0.0 => {
            let delta = 0.5 * (PI / 4.0).min((gamma - 1.0) / (gamma + 1.0) * PI / 2.0);
            out.push((1.0 / gamma - 1.0) * PI / 2.0 + delta / gamma);
        }
        ModelSpec::Szabo { gamma, .. } if gamma > 3.0 => out.push(PI / (gamma - 1.0) - PI / 2.0),
        _ => {}
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    Bounded,
    Logarithmic,
    Power,
}

/// Growth model fitted to the positive part of `-Re alpha*(-z)` on the top
/// decade of a ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayFit {
    pub phi: f64,
    pub fit_kind: FitKind,
    /// Exponent of a power fit, or `N` of a `C + N log(1 + r)` fit.
    #[serde(rename = "slope_or_N")]
    pub slope_or_n: f64,
    pub r2: f64,
}

impl RayFit {
    pub fn violation(&self) -> bool {
        self.fit_kind == FitKind::Power && self.slope_or_n >= MIN_VIOLATION_EXPONENT && self.r2 >= MIN_VIOLATION_R2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "CERTIFIED_CAUSAL")]
    CertifiedCausal,
    #[serde(rename = "REFUTED")]
    Refuted,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::CertifiedCausal => "CERTIFIED_CAUSAL",
            Verdict::Refuted => "REFUTED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Point `z` where the refutation was observed and the offending value: the
/// positive part of `-Re alpha*(-z)` for growth, the residual for CR failures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub re: f64,
    pub im: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityReport {
    pub verdict: Verdict,
    pub cr_max: f64,
    pub bound_speed: f64,
    pub rays: Vec<RayFit>,
    pub witness: Option<Witness>,
}

impl CausalityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn reflected_with_margin(model: &ModelSpec, z: Complex64, delta: f64) -> Result<Complex64> {
    let f = model.alpha_star_reflected(z)?;
    Ok(f - Complex64::i() * z * delta)
}

/// Fit the positive part on every ray. `delta` shifts the tested speed:
/// `alpha*(-z) - delta s` with `s = i z`.
pub fn growth_scan(model: &ModelSpec, scan: &HalfPlaneScan, delta: f64) -> Result<Vec<RayFit>> {
    scan.rays.par_iter().map(|ray| fit_ray(model, ray.phi, &scan.radii, delta)).collect()
}

fn positive_part(model: &ModelSpec, phi: f64, r: f64, delta: f64) -> Result<(f64, f64)> {
    let z = Complex64::from_polar(r, phi);
    let f = reflected_with_margin(model, z, delta)?;
    Ok(((-f.re).max(0.0), f.norm()))
}

fn fit_ray(model: &ModelSpec, phi: f64, radii: &[f64], delta: f64) -> Result<RayFit> {
    let r_top = radii[radii.len() - 1] / 10.0;
    let mut pts = Vec::new();
    for &r in radii.iter().filter(|&&r| r >= r_top * (1.0 - 1e-12)) {
        let (p, mag) = positive_part(model, phi, r, delta)?;
        pts.push((r, p, mag));
    }
    if pts.len() < 3 {
        return Err(Error::InvalidArgument("fewer than 3 radii in the top decade".into()));
    }
    if pts.iter().all(|&(_, p, mag)| p <= 1e-12 * (1.0 + mag)) {
        return Ok(RayFit { phi, fit_kind: FitKind::Bounded, slope_or_n: 0.0, r2: 1.0 });
    }

    let xs: Vec<f64> = pts.iter().map(|p| (1.0 + p.0).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (c, n, r2_log) = linear_fit(&xs, &ys);
    let sse_log: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - c - n * x).powi(2)).sum();

    let pos: Vec<&(f64, f64, f64)> = pts.iter().filter(|p| p.1 > 1e-12 * (1.0 + p.2)).collect();
    if pos.len() < 4 {
        return Ok(RayFit { phi, fit_kind: FitKind::Logarithmic, slope_or_n: n, r2: r2_log });
    }
    let lx: Vec<f64> = pos.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pos.iter().map(|p| p.1.ln()).collect();
    let (a, p, r2_pow) = linear_fit(&lx, &ly);
    let sse_pow: f64 = pts.iter().map(|&(r, y, _)| (y - (a + p * r.ln()).exp()).powi(2)).sum();
    if sse_pow < sse_log {
        Ok(RayFit { phi, fit_kind: FitKind::Power, slope_or_n: p, r2: r2_pow })
    } else {
        Ok(RayFit { phi, fit_kind: FitKind::Logarithmic, slope_or_n: n, r2: r2_log })
    }
}

/// Least squares `y = a + b x`; returns `(a, b, r2)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let sse: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    (a, b, r2)
}

/// Scale-invariant Cauchy-Riemann residual of `alpha*(-z)` by central differences.
///
/// `(|u_x - v_y| + |u_y + v_x|) |z| / (|F(z)| + 1)`; `h` may not exceed `|Im z| / 4`.
pub fn cr_residual(model: &ModelSpec, z: Complex64, h: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let limit = z.im.abs() / 4.0;
    if h > limit {
        return Err(Error::StepTooLarge { h, limit });
    }
    let f = |w: Complex64| model.alpha_star_reflected(w);
    let dx = (f(z + h)? - f(z - h)?) / (2.0 * h);
    let dy = (f(z + Complex64::i() * h)? - f(z - Complex64::i() * h)?) / (2.0 * h);
    let mismatch = (dx.re - dy.im).abs() + (dy.re + dx.im).abs();
    Ok(mismatch * z.norm() / (f(z)?.norm() + 1.0))
}

/// Certify, refute, or give up on the causality of `model`.
pub fn certify(model: &ModelSpec, scan: &HalfPlaneScan, cr_tol: f64) -> Result<CausalityReport> {
    if !(cr_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("cr_tol must be positive, got {cr_tol}")));
    }
    let fits = growth_scan(model, scan, 0.0)?;
    let cr = cr_scan(model, scan, cr_tol)?;
    let r_max = scan.radii[scan.radii.len() - 1];

    let violating: Vec<(usize, &RayFit)> = fits.iter().enumerate().filter(|(_, f)| f.violation()).collect();
    let preferred = violating.iter().find(|(i, _)| scan.rays[*i].constructive).or_else(|| violating.first());
    let (verdict, witness) = if let Some(&(i, _)) = preferred {
        let phi = scan.rays[i].phi;
        let (p, _) = positive_part(model, phi, r_max, 0.0)?;
        let z = Complex64::from_polar(r_max, phi);
        (Verdict::Refuted, Some(Witness { re: z.re, im: z.im, value: p }))
    } else if let Some(w) = cr.witness {
        (Verdict::Refuted, Some(w))
    } else if cr.max < cr_tol && fits.iter().all(|f| f.fit_kind != FitKind::Power) {
        (Verdict::CertifiedCausal, None)
    } else {
        (Verdict::Inconclusive, None)
    };
    Ok(CausalityReport { verdict, cr_max: cr.max, bound_speed: model.bound_speed(), rays: fits, witness })
}

struct CrSummary {
    max: f64,
    witness: Option<Witness>,
}

fn cr_scan(model: &ModelSpec, scan: &HalfPlaneScan, cr_tol: f64) -> Result<CrSummary> {
    let n = scan.radii.len();
    let mut idx: Vec<usize> = (0..n).step_by(4).collect();
    if idx.last() != Some(&(n - 1)) {
        idx.push(n - 1);
    }
    let per_ray: Vec<(f64, Option<(bool, Witness)>)> = scan
        .rays
        .par_iter()
        .map(|ray| -> Result<(f64, Option<(bool, Witness)>)> {
            let mut max: f64 = 0.0;
            let mut hit = None;
            for &i in &idx {
                let z = Complex64::from_polar(scan.radii[i], ray.phi);
                let h = 1e-4 * z.norm();
                if h > z.im.abs() / 4.0 {
                    continue;
                }
                let r1 = cr_residual(model, z, h)?;
                max = max.max(r1);
                if r1 > cr_tol && hit.is_none() {
                    let r2 = cr_residual(model, z, h / 2.0)?;
                    let r4 = cr_residual(model, z, h / 4.0)?;
                    if r2 > cr_tol && r4 > cr_tol && r4 >= 0.5 * r1 {
                        hit = Some((ray.constructive, Witness { re: z.re, im: z.im, value: r1 }));
                    }
                }
            }
            Ok((max, hit))
        })
        .collect::<Result<_>>()?;
    let max = per_ray.iter().fold(0.0f64, |m, r| m.max(r.0));
    let hits: Vec<(bool, Witness)> = per_ray.into_iter().filter_map(|r| r.1).collect();
    let witness = hits.iter().find(|h| h.0).or_else(|| hits.first()).map(|h| h.1);
    Ok(CrSummary { max, witness })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarginVerdict {
    Violated,
    Satisfied,
}

/// Whether `alpha*(-z) - delta s` still satisfies the growth bound, i.e. whether
/// the front can be pushed faster than `v_B` by the margin `delta` in slowness.
pub fn front_speed_margin(model: &ModelSpec, delta: f64, scan: &HalfPlaneScan) -> Result<MarginVerdict> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let fits = growth_scan(model, scan, delta)?;
    Ok(if fits.iter().any(RayFit::violation) { MarginVerdict::Violated } else { MarginVerdict::Satisfied })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(m: &ModelSpec) -> CausalityReport {
        certify(m, &HalfPlaneScan::for_model(m), DEFAULT_CR_TOL).unwrap()
    }

    #[test]
    fn causal_power_law() {
        let m = ModelSpec::power_law(0.5, 1.0, 0.0, 1.0).unwrap();
        let r = verdict(&m);
        assert_eq!(r.verdict, Verdict::CertifiedCausal, "{}", r.to_json());
        assert!(r.cr_max < 1e-6);
        assert!(r.witness.is_none());
    }

    #[test]
    fn power_law_above_one_is_refuted_on_a_constructive_ray() {
        let m = ModelSpec::power_law(1.5, 1.0, 0.0, 1.0).unwrap();
        let r = verdict(&m);
        assert_eq!(r.verdict, Verdict::Refuted);
        let w = r.witness.unwrap();
        let phi = w.im.atan2(w.re);
        assert!(constructive_rays(&m).iter().any(|c| (c - phi).abs() < 1e-12));
        let fit = r.rays.iter().find(|f| (f.phi - phi).abs() < 1e-12).unwrap();
        assert!((fit.slope_or_n - 1.5).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn reference_frequency_term_is_linear_growth() {
        let m = ModelSpec::power_law(0.5, 1.0, 1.0, 1.0).unwrap();
        let r = verdict(&m);
        assert_eq!(r.verdict, Verdict::Refuted);
        let fit = r.rays.iter().find(|f| (f.phi + PI / 2.0).abs() < 1e-12).unwrap();
        assert!((fit.slope_or_n - 1.0).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn modulus_continuation_fails_cauchy_riemann() {
        let m = ModelSpec::power_law_gamma1(1.0, 1.0, 1.0).unwrap();
        let z = Complex64::new(-3.0, -4.0);
        assert!(cr_residual(&m, z, 1e-3).unwrap() > 1e-2);
        assert_eq!(verdict(&m).verdict, Verdict::Refuted);
    }

    #[test]
    fn cr_residual_vanishes_for_analytic_symbols() {
        let m = ModelSpec::kowar_modified(1.5, 0.3, 1.0, 2.0).unwrap();
        for &(x, y) in &[(1.0, -1.0), (-10.0, -0.5), (100.0, -300.0)] {
            let z = Complex64::new(x, y);
            let r = cr_residual(&m, z, 1e-4 * z.norm()).unwrap();
            assert!(r < 1e-6, "{z}: {r}");
        }
    }

    #[test]
    fn cr_step_too_large() {
        let m = ModelSpec::power_law(0.5, 1.0, 0.0, 1.0).unwrap();
        let e = cr_residual(&m, Complex64::new(1.0, -0.1), 0.1).unwrap_err();
        assert!(matches!(e, Error::StepTooLarge { .. }));
    }

    #[test]
    fn affine_symbol_has_rounding_level_residual() {
        // KowarModified with tau0 = 0 is s / c1
        let m = ModelSpec::kowar_modified(1.5, 0.0, 1.0, 2.0).unwrap();
        let z = Complex64::new(3.0, -7.0);
        assert!(cr_residual(&m, z, 1e-3).unwrap() < 1e-10);
    }

    #[test]
    fn power_law_phi_delta_ray_for_positive_cosine() {
        let m = ModelSpec::power_law(3.5, 1.0, 0.0, 1.0).unwrap();
        let rays = constructive_rays(&m);
        assert_eq!(rays.len(), 2);
        let r = verdict(&m);
        let fit = r.rays.iter().find(|f| (f.phi - rays[1]).abs() < 1e-12).unwrap();
        assert!(fit.violation());
        assert!((fit.slope_or_n - 3.5).abs() < 0.05);
    }

    #[test]
    fn szabo_root_turns_negative_on_its_ray() {
        let gamma = 3.5;
        let m = ModelSpec::szabo(gamma, 1.0, 1.0).unwrap();
        let phi = PI / (gamma - 1.0) - PI / 2.0;
        let r = verdict(&m);
        assert_eq!(r.verdict, Verdict::Refuted);
        let w = r.witness.unwrap();
        assert!((w.im.atan2(w.re) - phi).abs() < 1e-12);
        // alpha*(-z) = i z B(z) / c0 with Im B ~ r^{(gamma-1)/2}, so the positive
        // part grows like r^{(gamma+1)/2}
        let fit = r.rays.iter().find(|f| (f.phi - phi).abs() < 1e-12).unwrap();
        assert!((fit.slope_or_n - (gamma + 1.0) / 2.0).abs() < 0.1, "{fit:?}");
        let radii = log_space(1e2, 1e4, 16);
        let ib: Vec<f64> = radii
            .iter()
            .map(|&r| {
                let z = Complex64::from_polar(r, phi);
                (m.alpha_star_reflected(z).unwrap() / (Complex64::i() * z)).im.ln()
            })
            .collect();
        let lr: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let (_, p, _) = linear_fit(&lr, &ib);
        assert!((p - (gamma - 1.0) / 2.0).abs() < 0.1, "{p}");
    }

    #[test]
    fn scan_validation() {
        assert!(HalfPlaneScan::new(vec![-1.0; 7], log_space(1.0, 10.0, 16)).is_err());
        assert!(HalfPlaneScan::new(vec![-1.0; 8], log_space(1.0, 10.0, 15)).is_err());
        assert!(HalfPlaneScan::new(vec![0.1; 8], log_space(1.0, 10.0, 16)).is_err());
        let mut r = log_space(1.0, 10.0, 16);
        r.swap(2, 3);
        assert!(HalfPlaneScan::new(vec![-1.0; 8], r).is_err());
    }

    #[test]
    fn margin() {
        let m = ModelSpec::power_law(0.5, 1.0, 0.0, 1.0).unwrap();
        let scan = HalfPlaneScan::for_margin(&m, 1e-3);
        assert_eq!(front_speed_margin(&m, 1e-3, &scan).unwrap(), MarginVerdict::Violated);
        let scan = HalfPlaneScan::for_model(&m);
        assert_eq!(front_speed_margin(&m, 1e-3, &scan).unwrap(), MarginVerdict::Satisfied);
    }

    #[test]
    fn json_round_trip() {
        let m = ModelSpec::power_law(1.5, 1.0, 0.0, 1.0).unwrap();
        let r = verdict(&m);
        let j = r.to_json();
        let back: CausalityReport = serde_json::from_str(&j).unwrap();
        assert_eq!(back.to_json(), j);
        let keys: Vec<&str> = ["\"verdict\"", "\"cr_max\"", "\"bound_speed\"", "\"rays\"", "\"witness\""].to_vec();
        let pos: Vec<usize> = keys.iter().map(|k| j.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }
}
