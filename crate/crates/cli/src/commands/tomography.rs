use anyhow::Result;
use serde_json::json;
use spdc_core::bell::BellState;
use spdc_core::tomography::{
    bell_density, fidelity, projector_set, reconstruct, simulate_counts, DensityMatrix, Noise, ReconstructionConfig,
};

use super::{check_truncation, single_mode_tensor};
use crate::config::{Experiment, NoiseKind, StateSource};
use crate::output::{ResultTable, Writer};

pub fn run(exp: &Experiment, w: &mut Writer) -> Result<()> {
    let t = &exp.tomography;
    let target = bell_density(BellState::PsiPlus, t.dim)?;
    let (truth, weight) = match t.source {
        StateSource::Ideal => (target.clone(), 1.0),
        StateSource::Engine => {
            let tensor = single_mode_tensor(exp, t.pump_mode)?;
            check_truncation(w, tensor.captured_weight);
            DensityMatrix::from_tensor(&tensor, t.dim)?
        }
    };
    let seed = exp.seed.unwrap_or(0);
    let noise = match t.noise {
        NoiseKind::None => Noise::None,
        NoiseKind::Poisson => Noise::Poisson { seed },
    };
    let set = projector_set(t.dim)?;
    let records = simulate_counts(&truth, &set, t.total, noise)?;

    let mut table = ResultTable::new(&["signal", "idler", "counts", "probability"]);
    for r in &records {
        table.push(vec![r.signal as f64, r.idler as f64, r.counts, r.probability])?;
    }
    w.csv("tomography_records.csv", &table)?;

    let config = ReconstructionConfig { starts: t.starts, seed, ..Default::default() };
    let fit = reconstruct(&records, &set, &config)?;
    let d = &fit.diagnostics;
    if !d.converged {
        w.warn(format!("reconstruction did not converge after {} iterations", d.iterations));
    }

    let m = fit.rho.matrix();
    let n = m.nrows();
    let labels: Vec<String> = fit.rho.labels().iter().map(|(s, i)| format!("HG{s}|HG{i}")).collect();
    let real: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| m[(r, c)].re).collect()).collect();
    let imag: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| m[(r, c)].im).collect()).collect();
    w.json("tomography_density.json", json!({ "labels": labels, "real": real, "imag": imag }))?;

    let eig = fit.rho.eigenvalues();
    w.json(
        "tomography_summary.json",
        json!({
            "dim": t.dim,
            "source": t.source,
            "noise": t.noise,
            "total": t.total,
            "projectors": set.len(),
            "records": records.len(),
            "chi2": fit.chi2,
            "fidelity_to_psi_plus": fidelity(&fit.rho, &target)?,
            "fidelity_to_true_state": fidelity(&fit.rho, &truth)?,
            "true_state_fidelity_to_psi_plus": fidelity(&truth, &target)?,
            "in_subspace_weight": weight,
            "min_eigenvalue": eig.first(),
            "trace": m.trace().re,
            "diagnostics": {
                "converged": d.converged,
                "iterations": d.iterations,
                "evaluations": d.evaluations,
                "grad_norm": d.grad_norm,
                "starts": d.starts,
                "best_start": d.best_start,
                "start_chi2": d.start_chi2,
            },
        }),
    )
}
