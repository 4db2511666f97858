use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use anyhow::{Context, Result};
use serde_json::json;
use spdc_core::bell::{
    coincidence_rate, optimize_chsh, project_to_qubit, sample_counts, sampled_correlation, BellState,
    QubitSubspaceState,
};

use super::{check_truncation, single_mode_tensor};
use crate::config::{Experiment, NoiseKind, StateSource};
use crate::output::{ResultTable, Writer};

const IDLER_ANGLES: [f64; 4] = [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4];

pub(crate) fn qubit_state(exp: &Experiment, w: &mut Writer) -> Result<QubitSubspaceState> {
    Ok(match exp.bell.source {
        StateSource::Ideal => QubitSubspaceState::bell(BellState::PsiPlus),
        StateSource::Engine => {
            let t = single_mode_tensor(exp, exp.bell.pump_mode)?;
            check_truncation(w, t.captured_weight);
            project_to_qubit(&t)?
        }
    })
}

pub fn run(exp: &Experiment, w: &mut Writer) -> Result<()> {
    let b = &exp.bell;
    let state = qubit_state(exp, w)?;
    let thetas: Vec<f64> = (0..b.points).map(|i| TAU * i as f64 / (b.points - 1) as f64).collect();
    let settings: Vec<(f64, f64)> =
        IDLER_ANGLES.iter().flat_map(|&ti| thetas.iter().map(move |&ts| (ts, ti))).collect();

    let noisy = b.noise == NoiseKind::Poisson;
    let seed = exp.seed.unwrap_or(0);
    let counts = if noisy { Some(sample_counts(&state, &settings, b.pairs, seed)?) } else { None };
    let mut table = if noisy {
        ResultTable::new(&["theta_i", "theta_s", "rate", "counts"])
    } else {
        ResultTable::new(&["theta_i", "theta_s", "rate"])
    };
    for (idx, &(ts, ti)) in settings.iter().enumerate() {
        let mut row = vec![ti, ts, coincidence_rate(&state, ts, ti)];
        if let Some(c) = &counts {
            row.push(c[idx] as f64);
        }
        table.push(row)?;
    }
    w.csv("bell_fringes.csv", &table)?;

    let best = optimize_chsh(&state)?;
    let [a, a2, bb, b2] = best.settings;
    let sampled = if noisy {
        // one seed per correlation, offset from the fringe stream
        let e = [(a, bb), (a, b2), (a2, bb), (a2, b2)]
            .iter()
            .enumerate()
            .map(|(i, &(s, t))| sampled_correlation(&state, s, t, b.pairs, seed.wrapping_add(1 + i as u64)))
            .collect::<Result<Vec<f64>, _>>()
            .context("sampling correlations")?;
        Some(json!({ "s": e[0] - e[1] + e[2] + e[3], "correlations": e, "pairs": b.pairs }))
    } else {
        None
    };
    let visibility: Vec<f64> = IDLER_ANGLES
        .iter()
        .map(|&ti| {
            let r: Vec<f64> = thetas.iter().map(|&ts| coincidence_rate(&state, ts, ti)).collect();
            let max = r.iter().cloned().fold(f64::MIN, f64::max);
            let min = r.iter().cloned().fold(f64::MAX, f64::min);
            if max + min > 0.0 {
                (max - min) / (max + min)
            } else {
                0.0
            }
        })
        .collect();
    w.json(
        "bell_summary.json",
        json!({
            "source": b.source,
            "chsh": {
                "s": best.s,
                "violates_local_bound": best.s.abs() > 2.0,
                "settings": { "a": a, "a_prime": a2, "b": bb, "b_prime": b2 },
                "correlations": best.correlations,
            },
            "sampled": sampled,
            "tsirelson_bound": 2.0 * 2f64.sqrt(),
            "idler_angles": IDLER_ANGLES,
            "visibility": visibility,
            "in_subspace_weight": state.in_subspace_weight,
        }),
    )
}
