//! TOML run configuration shared by the CLI subcommands.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::certify::{HalfPlaneScan, DEFAULT_CR_TOL};
use crate::dispersion::ModelSpec;
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::kernels::{KernelNormalization, SpectralMultiplier};
use crate::signal::TimeSignal;
use crate::synth::{SynthOptions, DEFAULT_TAIL_FLOOR};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub grid: Option<FrequencyGrid>,
    pub certify: Option<CertifyBlock>,
    pub green: Option<GreenBlock>,
    pub kernel: Option<KernelBlock>,
    pub solve: Option<SolveBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyBlock {
    pub cr_tol: Option<f64>,
    /// Radius range; defaults to six decades around the model's frequency scale.
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub radii: Option<usize>,
    /// Explicit ray angles; replaces the standard set when present.
    pub rays: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenBlock {
    pub radii: Vec<f64>,
    pub tail_floor: Option<f64>,
    #[serde(default)]
    pub taper: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelBlock {
    pub multiplier: SpectralMultiplier,
    /// Gaussian cutoff, required for growing multipliers.
    pub regularizer: Option<f64>,
    #[serde(default)]
    pub normalization: KernelNormalization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveBlock {
    /// Start of the shared time window.
    pub t0: f64,
    pub probes: Vec<[f64; 3]>,
    pub sources: Vec<SourceBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceBlock {
    pub position: [f64; 3],
    #[serde(default = "one")]
    pub weight: f64,
    pub waveform: Waveform,
}

fn one() -> f64 {
    1.0
}

/// Source time function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Waveform {
    /// `sin(pi (t - delay) / width)^4` on `(delay, delay + width)`.
    Sin4 {
        width: f64,
        #[serde(default)]
        delay: f64,
    },
    /// Samples starting at the window start, zero padded.
    Samples { values: Vec<f64> },
}

impl Waveform {
    pub fn sample(&self, grid: &FrequencyGrid, t0: f64) -> Result<TimeSignal> {
        let n = grid.n();
        let dt = grid.dt();
        let samples = match self {
            Waveform::Sin4 { width, delay } => {
                if !(width.is_finite() && *width > 0.0 && delay.is_finite()) {
                    return Err(Error::Config(format!("sin4 waveform needs a positive width, got {width}")));
                }
                (0..n)
                    .map(|j| {
                        let x = (t0 + j as f64 * dt - delay) / width;
                        if x > 0.0 && x < 1.0 {
                            (std::f64::consts::PI * x).sin().powi(4)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
            Waveform::Samples { values } => {
                if values.len() > n {
                    return Err(Error::Config(format!("{} waveform samples exceed grid size {n}", values.len())));
                }
                let mut v = values.clone();
                v.resize(n, 0.0);
                v
            }
        };
        TimeSignal::new(t0, dt, samples)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        self.grid.ok_or_else(|| Error::Config("missing [grid] block".into()))
    }

    pub fn scan(&self) -> Result<(HalfPlaneScan, f64)> {
        let Some(b) = &self.certify else {
            return Ok((HalfPlaneScan::for_model(&self.model), DEFAULT_CR_TOL));
        };
        let scale = self.model.characteristic_frequency();
        let r_min = b.r_min.unwrap_or(scale * 1e-2);
        let r_max = b.r_max.unwrap_or(scale * 1e4);
        let count = b.radii.unwrap_or(64);
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::Config(format!("need 0 < r_min < r_max, got {r_min}, {r_max}")));
        }
        if count < 16 {
            return Err(Error::Config(format!("need at least 16 radii, got {count}")));
        }
        let scan = match &b.rays {
            None => HalfPlaneScan::for_model_with_range(&self.model, r_min, r_max, count),
            Some(rays) => {
                let standard = HalfPlaneScan::for_model_with_range(&self.model, r_min, r_max, count);
                HalfPlaneScan::new(rays.clone(), standard.radii().to_vec()).map_err(|e| Error::Config(e.to_string()))?
            }
        };
        let tol = b.cr_tol.unwrap_or(DEFAULT_CR_TOL);
        if !(tol > 0.0) {
            return Err(Error::Config(format!("cr_tol must be positive, got {tol}")));
        }
        Ok((scan, tol))
    }
}

impl GreenBlock {
    pub fn options(&self) -> SynthOptions {
        SynthOptions { tail_floor: self.tail_floor.unwrap_or(DEFAULT_TAIL_FLOOR), taper: self.taper }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[model]
kind = "PowerLaw"
gamma = 0.5
alpha0 = 1.0
c0 = 1.0

[grid]
n = 1024
domega = 0.5
"#;

    #[test]
    fn parses_minimal_config() {
        let c = RunConfig::parse(BASE).unwrap();
        assert_eq!(c.model, ModelSpec::power_law(0.5, 1.0, 0.0, 1.0).unwrap());
        assert_eq!(c.grid().unwrap().n(), 1024);
        assert!(c.scan().is_ok());
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(RunConfig::parse(&format!("{BASE}\nextra = 1\n")).is_err());
        assert!(RunConfig::parse(&BASE.replace("c0 = 1.0", "c0 = 1.0\nspeed = 2.0")).is_err());
        assert!(RunConfig::parse(&format!("{BASE}\n[green]\nradii = [1.0]\nfoo = 2\n")).is_err());
        assert!(RunConfig::parse(&BASE.replace("n = 1024", "n = 1000")).is_err());
    }

    #[test]
    fn solve_block() {
        let text = format!(
            "{BASE}\n[solve]\nt0 = -1.0\nprobes = [[1.0, 0.0, 0.0]]\n\
             [[solve.sources]]\nposition = [0.0, 0.0, 0.0]\nwaveform = {{ kind = \"sin4\", width = 0.5 }}\n\
             [[solve.sources]]\nposition = [0.0, 1.0, 0.0]\nweight = -1.0\nwaveform = {{ kind = \"samples\", values = [0.0, 1.0] }}\n"
        );
        let c = RunConfig::parse(&text).unwrap();
        let s = c.solve.as_ref().unwrap();
        assert_eq!(s.sources[0].weight, 1.0);
        let w = s.sources[1].waveform.sample(&c.grid().unwrap(), -1.0).unwrap();
        assert_eq!(w.samples[1], 1.0);
        assert_eq!(w.len(), 1024);
    }

    #[test]
    fn kernel_block() {
        let text = format!("{BASE}\n[kernel]\nmultiplier = {{ label = \"THalf\", gamma = 2.0, tau0 = 1.0 }}\nnormalization = \"Unnormalized\"\n");
        let c = RunConfig::parse(&text).unwrap();
        let k = c.kernel.unwrap();
        assert_eq!(k.multiplier, SpectralMultiplier::t_half(2.0, 1.0).unwrap());
        assert_eq!(k.normalization, KernelNormalization::Unnormalized);
    }
}
