use anyhow::Result;
use serde_json::json;
use spdc_core::biphoton::Axis;
use spdc_core::schmidt::{schmidt_decompose, schmidt_number};

use super::{check_truncation, pump_tensor};
use crate::config::{Experiment, HistogramAxis};
use crate::output::{ResultTable, Writer};

/// Histogram axis for `auto`: the one carrying the higher pump order.
fn pick_axis(exp: &Experiment) -> Axis {
    match exp.decompose_axis {
        HistogramAxis::X => Axis::X,
        HistogramAxis::Y => Axis::Y,
        HistogramAxis::Auto => {
            let n = exp.pump.iter().map(|t| t.n).max().unwrap_or(0);
            let m = exp.pump.iter().map(|t| t.m).max().unwrap_or(0);
            if m > n {
                Axis::Y
            } else {
                Axis::X
            }
        }
    }
}

pub fn run(exp: &Experiment, w: &mut Writer) -> Result<()> {
    let tensor = pump_tensor(exp)?;
    check_truncation(w, tensor.captured_weight);
    let axis = pick_axis(exp);
    let grid = tensor.marginal(axis);
    let total: f64 = grid.iter().sum();

    let mut table = ResultTable::new(&["j", "u", "probability"]);
    let mut peak = (0, 0, 0.0);
    for j in 0..grid.nrows() {
        for u in 0..grid.ncols() {
            let p = grid[(j, u)] / total;
            if p > peak.2 {
                peak = (j, u, p);
            }
            table.push(vec![j as f64, u as f64, p])?;
        }
    }
    w.csv("decompose_histogram.csv", &table)?;

    let k = schmidt_number(&schmidt_decompose(&tensor)?).k;
    let mut by_order = vec![0.0; 2 * grid.nrows() - 1];
    for j in 0..grid.nrows() {
        for u in 0..grid.ncols() {
            by_order[j + u] += grid[(j, u)] / total;
        }
    }
    w.json(
        "decompose_summary.json",
        json!({
            "pump": exp.pump,
            "axis": match axis { Axis::X => "x", Axis::Y => "y" },
            "captured_weight": tensor.captured_weight,
            "truncated": tensor.is_truncated(),
            "schmidt_number": k,
            "peak": { "j": peak.0, "u": peak.1, "probability": peak.2 },
            "probability_by_order_sum": by_order,
        }),
    )
}
