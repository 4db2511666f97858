//! One module per subcommand. Each writes its files through a [`Writer`]
//! and records warnings there instead of failing.

mod bell;
mod decompose;
mod phi;
mod schmidt_curve;
mod tomography;

pub use bell::run as bell;
pub use decompose::run as decompose;
pub use phi::run as phi;
pub use schmidt_curve::run as schmidt_curve;
pub use tomography::run as tomography;

use anyhow::Result;
use spdc_core::biphoton::{CoefficientTensor, TRUNCATION_THRESHOLD};
use spdc_core::hermite::ModePair;
use spdc_core::pump::PumpModeBasis;
use spdc_core::C64;

use crate::config::Experiment;
use crate::output::Writer;

/// Decomposed two-photon state of the configured pump.
pub(crate) fn pump_tensor(exp: &Experiment) -> Result<CoefficientTensor> {
    let pump = exp.pump_spec()?;
    let modes: Vec<ModePair> = pump.terms().iter().map(|&(m, _)| m).collect();
    let amps: Vec<C64> = pump.terms().iter().map(|&(_, c)| c).collect();
    let basis = PumpModeBasis::new(&modes, pump.width(), &exp.kernel()?, exp.sigma()?, exp.n_max)?;
    Ok(basis.tensor(&amps)?)
}

/// Tensor for a single-mode pump `HG_{n m}` at the configured width.
pub(crate) fn single_mode_tensor(exp: &Experiment, mode: [usize; 2]) -> Result<CoefficientTensor> {
    let basis = PumpModeBasis::new(
        &[ModePair::new(mode[0], mode[1])],
        exp.pump_width()?,
        &exp.kernel()?,
        exp.sigma()?,
        exp.n_max,
    )?;
    Ok(basis.tensor(&[C64::new(1.0, 0.0)])?)
}

pub(crate) fn check_truncation(w: &mut Writer, captured: f64) {
    if captured < TRUNCATION_THRESHOLD {
        w.warn(format!(
            "truncation captures {captured:.4} of the amplitude norm (below {TRUNCATION_THRESHOLD}); raise truncation.n_max"
        ));
    }
}
