//! Experiment configuration: TOML file and presets, merged and resolved into
//! validated physical parameters.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use spdc_core::biphoton::{matched_detection_width, PhaseMatchKernel, PumpSpec};
use spdc_core::hermite::{ModePair, ModeWidth};
use spdc_core::C64;

const PAPER: &str = include_str!("../presets/paper.toml");
const PAPER_MEASURED: &str = include_str!("../presets/paper-measured.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// 25 mm crystal, 30 um pump waist at the single-Schmidt-mode point.
    Paper,
    /// Same crystal with the measured 35.1 um pump waist.
    PaperMeasured,
}

impl Preset {
    fn source(self) -> &'static str {
        match self {
            Self::Paper => PAPER,
            Self::PaperMeasured => PAPER_MEASURED,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    #[serde(default)]
    optics: RawOptics,
    #[serde(default)]
    widths: RawWidths,
    #[serde(default)]
    kernel: RawKernel,
    #[serde(default)]
    truncation: RawTruncation,
    #[serde(default)]
    pump: RawPump,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    decompose: RawDecompose,
    #[serde(default)]
    schmidt_curve: RawSchmidtCurve,
    #[serde(default)]
    bell: RawBell,
    #[serde(default)]
    tomography: RawTomography,
    #[serde(default)]
    phi: RawPhi,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptics {
    crystal_length: Option<f64>,
    pump_wavenumber: Option<f64>,
    pump_wavelength: Option<f64>,
    refractive_index: Option<f64>,
    /// Pump waist whose single-Schmidt-mode condition fixes `k_p`.
    single_mode_waist: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWidths {
    pump_waist: Option<f64>,
    detection: Option<String>,
    detection_waist: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    kind: Option<KernelKind>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTruncation {
    n_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpTerm {
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPump {
    terms: Option<Vec<PumpTerm>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDecompose {
    axis: Option<HistogramAxis>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchmidtCurve {
    waist_min: Option<f64>,
    waist_max: Option<f64>,
    points: Option<usize>,
    n_max: Option<usize>,
    alpha: Option<f64>,
    beta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBell {
    source: Option<StateSource>,
    pump_mode: Option<[usize; 2]>,
    points: Option<usize>,
    noise: Option<NoiseKind>,
    pairs: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTomography {
    dim: Option<usize>,
    source: Option<StateSource>,
    pump_mode: Option<[usize; 2]>,
    noise: Option<NoiseKind>,
    total: Option<u64>,
    starts: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhi {
    alpha: Option<toml::Value>,
    target: Option<PhiTarget>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Sinc,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HistogramAxis {
    Auto,
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StateSource {
    /// Ideal Ψ⁺ over {HG00, HG10}.
    Ideal,
    /// State decomposed from the configured optics.
    Engine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    None,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhiTarget {
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Weight {
    Value(f64),
    Optimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Detection {
    Matched,
    Waist(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct SchmidtCurveSettings {
    pub waist_min: f64,
    pub waist_max: f64,
    pub points: usize,
    pub n_max: usize,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BellSettings {
    pub source: StateSource,
    pub pump_mode: [usize; 2],
    pub points: usize,
    pub noise: NoiseKind,
    pub pairs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TomographySettings {
    pub dim: usize,
    pub source: StateSource,
    pub pump_mode: [usize; 2],
    pub noise: NoiseKind,
    pub total: u64,
    pub starts: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiSettings {
    pub alpha: Weight,
    pub target: PhiTarget,
}

/// Validated experiment. Its canonical JSON form is what the config hash
/// covers; the output directory is not part of it.
#[derive(Debug, Clone, Serialize)]
pub struct Experiment {
    pub seed: Option<u64>,
    pub crystal_length: f64,
    pub pump_wavenumber: f64,
    pub pump_waist: f64,
    pub detection: Detection,
    pub kernel: KernelKind,
    pub n_max: usize,
    pub pump: Vec<PumpTerm>,
    pub decompose_axis: HistogramAxis,
    pub schmidt_curve: SchmidtCurveSettings,
    pub bell: BellSettings,
    pub tomography: TomographySettings,
    pub phi: PhiSettings,
    #[serde(skip)]
    pub output: Option<String>,
}

/// Command-line overrides applied after the file and preset.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub pump: Option<(usize, usize)>,
    pub kernel: Option<KernelKind>,
    pub alpha: Option<Weight>,
    pub dim: Option<usize>,
    pub source: Option<StateSource>,
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if !(v.is_finite() && v > 0.0) {
        bail!("{name} must be a positive number, got {v}");
    }
    Ok(v)
}

pub fn parse_weight(s: &str) -> Result<Weight> {
    if s == "optimize" {
        return Ok(Weight::Optimize);
    }
    let a: f64 = s.parse().with_context(|| format!("invalid pump weight {s:?}"))?;
    if !(a.abs() <= 1.0) {
        bail!("pump weight must lie in [-1, 1], got {a}");
    }
    Ok(Weight::Value(a))
}

impl Experiment {
    /// Preset (if any), then the file (if any), then `overrides`.
    pub fn load(preset: Option<Preset>, path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        if preset.is_none() && path.is_none() {
            bail!("no configuration given: pass --config <path> or --preset");
        }
        let mut table = toml::Table::new();
        if let Some(p) = preset {
            merge(&mut table, toml::from_str(p.source()).context("parsing built-in preset")?);
        }
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file: toml::Table = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            merge(&mut table, file);
        }
        let raw: RawConfig = toml::Value::Table(table).try_into().context("invalid configuration")?;
        Self::resolve(raw, overrides)
    }

    fn resolve(raw: RawConfig, ov: &Overrides) -> Result<Self> {
        let o = &raw.optics;
        let crystal_length =
            positive("optics.crystal_length", o.crystal_length.context("optics.crystal_length is required")?)?;
        let styles = [
            o.pump_wavenumber.is_some(),
            o.pump_wavelength.is_some() || o.refractive_index.is_some(),
            o.single_mode_waist.is_some(),
        ];
        if styles.iter().filter(|&&s| s).count() != 1 {
            bail!("specify exactly one of optics.pump_wavenumber, optics.pump_wavelength with optics.refractive_index, or optics.single_mode_waist");
        }
        let pump_wavenumber = if let Some(k) = o.pump_wavenumber {
            positive("optics.pump_wavenumber", k)?
        } else if let Some(w) = o.single_mode_waist {
            let w = positive("optics.single_mode_waist", w)?;
            crystal_length / (w * w)
        } else {
            let lambda = positive(
                "optics.pump_wavelength",
                o.pump_wavelength.context("optics.pump_wavelength is required with refractive_index")?,
            )?;
            let n = positive(
                "optics.refractive_index",
                o.refractive_index.context("optics.refractive_index is required with pump_wavelength")?,
            )?;
            2.0 * std::f64::consts::PI * n / lambda
        };

        let w = &raw.widths;
        let pump_waist = positive("widths.pump_waist", w.pump_waist.context("widths.pump_waist is required")?)?;
        let detection = match (&w.detection, w.detection_waist) {
            (Some(_), Some(_)) => bail!("specify either widths.detection or widths.detection_waist, not both"),
            (Some(s), None) if s == "matched" => Detection::Matched,
            (Some(s), None) => bail!("widths.detection must be \"matched\", got {s:?}"),
            (None, Some(v)) => Detection::Waist(positive("widths.detection_waist", v)?),
            (None, None) => Detection::Matched,
        };

        let kernel = ov.kernel.or(raw.kernel.kind).unwrap_or(KernelKind::Gaussian);
        let n_max = raw.truncation.n_max.unwrap_or(spdc_core::biphoton::DEFAULT_N_MAX);
        if n_max == 0 || n_max > 40 {
            bail!("truncation.n_max must lie in 1..=40, got {n_max}");
        }
        let pump = match ov.pump {
            Some((n, m)) => vec![PumpTerm { n, m, re: 1.0, im: 0.0 }],
            None => raw.pump.terms.unwrap_or_else(|| vec![PumpTerm { n: 0, m: 0, re: 1.0, im: 0.0 }]),
        };
        if pump.is_empty() {
            bail!("pump.terms must not be empty");
        }

        let sc = &raw.schmidt_curve;
        let schmidt_curve = SchmidtCurveSettings {
            waist_min: positive("schmidt_curve.waist_min", sc.waist_min.unwrap_or(10e-6))?,
            waist_max: positive("schmidt_curve.waist_max", sc.waist_max.unwrap_or(60e-6))?,
            points: sc.points.unwrap_or(101),
            n_max: sc.n_max.unwrap_or(match kernel {
                KernelKind::Gaussian => 24,
                KernelKind::Sinc => 8,
            }),
            alpha: positive("schmidt_curve.alpha", sc.alpha.unwrap_or(spdc_core::schmidt::DEFAULT_ALPHA))?,
            beta: positive("schmidt_curve.beta", sc.beta.unwrap_or(spdc_core::schmidt::DEFAULT_BETA))?,
        };
        if schmidt_curve.waist_min > schmidt_curve.waist_max || schmidt_curve.points < 2 {
            bail!("schmidt_curve needs waist_min <= waist_max and at least two points");
        }

        let seed = ov.seed.or(raw.seed);
        let b = &raw.bell;
        let bell = BellSettings {
            source: ov.source.or(b.source).unwrap_or(StateSource::Ideal),
            pump_mode: b.pump_mode.unwrap_or([1, 0]),
            points: b.points.unwrap_or(361),
            noise: b.noise.unwrap_or(NoiseKind::None),
            pairs: positive("bell.pairs", b.pairs.unwrap_or(1e5))?,
        };
        if bell.points < 2 {
            bail!("bell.points must be at least 2");
        }
        let t = &raw.tomography;
        let tomography = TomographySettings {
            dim: ov.dim.or(t.dim).unwrap_or(3),
            source: ov.source.or(t.source).unwrap_or(StateSource::Ideal),
            pump_mode: t.pump_mode.unwrap_or([1, 0]),
            noise: t.noise.unwrap_or(NoiseKind::None),
            total: t.total.unwrap_or(100_000),
            starts: t.starts,
        };
        if tomography.dim < 2 || tomography.total == 0 {
            bail!("tomography needs dim >= 2 and total > 0");
        }
        if seed.is_none() && (bell.noise == NoiseKind::Poisson || tomography.noise == NoiseKind::Poisson) {
            bail!("a seed is required when noise is enabled (set `seed` or pass --seed)");
        }
        let alpha = match (ov.alpha, &raw.phi.alpha) {
            (Some(a), _) => a,
            (None, None) => Weight::Value(0.895),
            (None, Some(toml::Value::String(s))) => parse_weight(s)?,
            (None, Some(toml::Value::Float(a))) => parse_weight(&a.to_string())?,
            (None, Some(toml::Value::Integer(a))) => parse_weight(&a.to_string())?,
            (None, Some(v)) => bail!("phi.alpha must be a number or \"optimize\", got {v}"),
        };
        let phi = PhiSettings { alpha, target: raw.phi.target.unwrap_or(PhiTarget::PhiPlus) };

        let exp = Self {
            seed,
            crystal_length,
            pump_wavenumber,
            pump_waist,
            detection,
            kernel,
            n_max,
            pump,
            decompose_axis: raw.decompose.axis.unwrap_or(HistogramAxis::Auto),
            schmidt_curve,
            bell,
            tomography,
            phi,
            output: raw.output.directory,
        };
        exp.pump_spec()?;
        exp.sigma()?;
        Ok(exp)
    }

    pub fn kernel(&self) -> Result<PhaseMatchKernel> {
        let sinc = PhaseMatchKernel::sinc(self.crystal_length, self.pump_wavenumber)?;
        Ok(match self.kernel {
            KernelKind::Sinc => sinc,
            KernelKind::Gaussian => sinc.to_gaussian(),
        })
    }

    pub fn pump_width(&self) -> Result<ModeWidth> {
        Ok(ModeWidth::from_waist(self.pump_waist)?)
    }

    /// Detection mode width for the configured pump waist.
    pub fn sigma(&self) -> Result<ModeWidth> {
        self.sigma_for(self.pump_width()?)
    }

    pub fn sigma_for(&self, pump: ModeWidth) -> Result<ModeWidth> {
        Ok(match self.detection {
            Detection::Matched => matched_detection_width(pump, self.kernel()?.delta())?,
            Detection::Waist(w) => ModeWidth::from_waist(w)?,
        })
    }

    pub fn pump_spec(&self) -> Result<PumpSpec> {
        let terms = self.pump.iter().map(|t| (ModePair::new(t.n, t.m), C64::new(t.re, t.im))).collect();
        PumpSpec::normalized(terms, self.pump_width()?).context("invalid pump.terms")
    }

    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("configuration serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}
