use anyhow::Result;
use serde_json::json;
use spdc_core::biphoton::TRUNCATION_THRESHOLD;
use spdc_core::hermite::ModeWidth;
use spdc_core::schmidt::{k_curve, modified_minimum, Detection, KCurveOptions, KMethod};

use crate::config::{self, Experiment, KernelKind};
use crate::output::{ResultTable, Writer};

const METHODS: [KMethod; 4] = [KMethod::ClosedForm, KMethod::Modified, KMethod::Svd, KMethod::DiagonalEstimate];

pub fn run(exp: &Experiment, w: &mut Writer) -> Result<()> {
    let s = &exp.schmidt_curve;
    let waists: Vec<f64> =
        (0..s.points).map(|i| s.waist_min + (s.waist_max - s.waist_min) * i as f64 / (s.points - 1) as f64).collect();
    let kernel = exp.kernel()?;
    let detection = match exp.detection {
        config::Detection::Matched => Detection::Matched,
        config::Detection::Waist(v) => Detection::Fixed(ModeWidth::from_waist(v)?),
    };
    let options = KCurveOptions { detection, n_max: s.n_max, alpha: s.alpha, beta: s.beta };
    let rows = k_curve(&waists, &kernel, &METHODS, &options)?;

    let mut table =
        ResultTable::new(&["waist", "k_closed_form", "k_modified", "k_svd", "k_diagonal", "captured_weight"]);
    let mut min_captured: f64 = 1.0;
    let mut svd_gap: f64 = 0.0;
    let mut closed_min = (f64::NAN, f64::INFINITY);
    for r in &rows {
        let captured = r.captured_weight.unwrap_or(1.0);
        min_captured = min_captured.min(captured);
        if r.k[0] < closed_min.1 {
            closed_min = (r.waist, r.k[0]);
        }
        svd_gap = svd_gap.max((r.k[2] - r.k[0]).abs());
        table.push(vec![r.waist, r.k[0], r.k[1], r.k[2], r.k[3], captured])?;
    }
    w.csv("schmidt_curve.csv", &table)?;
    if min_captured < TRUNCATION_THRESHOLD {
        w.warn(format!(
            "truncation captures as little as {min_captured:.4} of the amplitude norm along the curve; raise schmidt_curve.n_max"
        ));
    }

    let delta = kernel.delta();
    let (w_mod, k_mod) = modified_minimum(delta, s.alpha, s.beta);
    w.json(
        "schmidt_curve_summary.json",
        json!({
            "delta": delta,
            "modified_minimum": { "waist": w_mod, "k": k_mod },
            "closed_form_grid_minimum": { "waist": closed_min.0, "k": closed_min.1 },
            "max_abs_svd_minus_closed_form": if exp.kernel == KernelKind::Gaussian { Some(svd_gap) } else { None },
            "min_captured_weight": min_captured,
        }),
    )
}
