use anyhow::Result;
use serde_json::json;
use spdc_core::biphoton::Axis;
use spdc_core::pump::{correlated_basis, optimize_pump_weight, overlap_curve, weight_grid, TargetState};
use spdc_core::C64;

use super::check_truncation;
use crate::config::{Experiment, PhiTarget, Weight};
use crate::output::{ResultTable, Writer};

pub const LITERATURE_WEIGHT: f64 = 0.895;
pub const LITERATURE_FIDELITY: f64 = 0.67;
/// Gap to the literature value above which the comparison is flagged.
pub const COMPARISON_TOLERANCE: f64 = 0.01;

pub fn run(exp: &Experiment, w: &mut Writer) -> Result<()> {
    let target = match exp.phi.target {
        PhiTarget::PhiPlus => TargetState::PhiPlus,
        PhiTarget::PhiMinus => TargetState::PhiMinus,
    };
    let basis = correlated_basis(exp.pump_width()?, &exp.kernel()?, exp.sigma()?, exp.n_max)?;
    let optimum = optimize_pump_weight(&basis, target)?;
    let a = match exp.phi.alpha {
        Weight::Value(a) => a,
        Weight::Optimize => optimum.weight,
    };
    let amps = [C64::new(a, 0.0), C64::new((1.0 - a * a).max(0.0).sqrt(), 0.0)];
    let overlap = basis.overlap(&amps, target)?;
    check_truncation(w, overlap.captured_weight);

    let d = exp.n_max + 1;
    let mut ideal = ResultTable::new(&["j", "u", "probability"]);
    for j in 0..d {
        for u in 0..d {
            let p = if j == u && j < 2 { 0.5 } else { 0.0 };
            ideal.push(vec![j as f64, u as f64, p])?;
        }
    }
    w.csv("phi_ideal_histogram.csv", &ideal)?;

    let grid = basis.tensor(&amps)?.marginal(Axis::X);
    let total: f64 = grid.iter().sum();
    let mut engineered = ResultTable::new(&["j", "u", "probability"]);
    for j in 0..d {
        for u in 0..d {
            engineered.push(vec![j as f64, u as f64, grid[(j, u)] / total])?;
        }
    }
    w.csv("phi_engineered_histogram.csv", &engineered)?;

    let mut curve = ResultTable::new(&["a", "fidelity"]);
    for (x, f) in overlap_curve(&basis, target, &weight_grid())? {
        curve.push(vec![x, f])?;
    }
    w.csv("phi_overlap.csv", &curve)?;

    let at_literature = overlap_curve(&basis, target, &[LITERATURE_WEIGHT])?[0].1;
    let gap = at_literature - LITERATURE_FIDELITY;
    w.json(
        "phi_summary.json",
        json!({
            "target": exp.phi.target,
            "alpha": a,
            "fidelity": overlap.fidelity,
            "captured_weight": overlap.captured_weight,
            "truncated": overlap.truncated,
            "optimum": { "alpha": optimum.weight, "fidelity": optimum.fidelity },
            "literature_comparison": {
                "alpha": LITERATURE_WEIGHT,
                "computed": at_literature,
                "literature": LITERATURE_FIDELITY,
                "gap": gap,
                "flagged": gap.abs() > COMPARISON_TOLERANCE,
            },
        }),
    )
}
