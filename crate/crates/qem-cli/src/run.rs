//! Scenario execution: frequency-major Green scans per backend, rate
//! conversion, and plot-ready CSV outputs plus a JSON run summary.

use std::path::Path;
use std::time::Instant;

use serde_json::json;

use qem::greens::{green_scan, MapSource, Scene};
use qem::qubits::{
    build_lindblad, gate_fidelity, relaxation_rates, t1_from_rate, DensityMatrix, DephasingModel,
    DephasingSpectrum, GateSpec, QubitSpec, RateSet,
};
use qem::{Mat3, Vec3};

use crate::config::{BackendKind, OutputKind, ScanVariable, Scenario};
use crate::output::{write_json, Csv, CsvField};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("compute: {0}")]
    Greens(#[from] qem::greens::GreensError),
    #[error("compute: {0}")]
    Qubits(#[from] qem::qubits::QubitError),
    #[error("output io: {0}")]
    Io(#[from] std::io::Error),
}

struct BackendResults {
    kind: BackendKind,
    /// [scan point][axis] single-qubit rate Gamma_ii.
    gamma_ii: Vec<Vec<f64>>,
    /// [scan point][axis] pair rate Gamma_ij (separation scans).
    gamma_ij: Option<Vec<Vec<f64>>>,
    /// [scan point][axis] dephasing rate at the configured time.
    gamma_phi: Option<Vec<Vec<f64>>>,
    /// [scan point][axis] idle-gate fidelity.
    fidelity: Option<Vec<Vec<f64>>>,
    stats: qem::greens::ScanStats,
}

fn backend_label(kind: BackendKind) -> &'static str {
    match kind {
        BackendKind::Vie => "vie",
        BackendKind::Layered => "layered",
    }
}

fn scan_column(variable: ScanVariable) -> &'static str {
    match variable {
        ScanVariable::Height => "z_m",
        ScanVariable::Separation => "d_m",
        ScanVariable::LineX => "x_m",
    }
}

fn qubit_at(scenario: &Scenario, position: Vec3, axis: Vec3) -> Result<QubitSpec, RunError> {
    Ok(QubitSpec::new(
        position,
        scenario.qubit_omega,
        axis,
        scenario.transverse_moment,
        scenario.longitudinal_moment,
    )?)
}

/// Frequency-major sampling: all scan points at the drive frequency first
/// (one factorization for the VIE backend), then the dephasing grid one
/// frequency at a time.
fn compute_backend(
    scenario: &Scenario,
    kind: BackendKind,
    scene: &Scene,
) -> Result<BackendResults, RunError> {
    let n_points = scenario.scan.values.len();
    let n_axes = scenario.axes.len();
    let want_dephasing = scenario.outputs.contains(&OutputKind::Dephasing)
        || scenario.fidelity.as_ref().map(|f| f.include_dephasing).unwrap_or(false);
    let want_fidelity = scenario.outputs.contains(&OutputKind::Fidelity);

    // pair list per scan point (qubit-position pairs needed by the rates)
    let mut pairs: Vec<(Vec3, Vec3)> = Vec::new();
    for (pt, &p) in scenario.scan.primary.iter().enumerate() {
        pairs.push((p, p));
        if let Some(secondary) = &scenario.scan.secondary {
            let s = secondary[pt];
            pairs.push((p, s));
            pairs.push((s, s));
        }
    }
    pairs.dedup_by(|a, b| a == b);

    let mut table = MapSource::new();
    let (samples, mut stats) = green_scan(scene, &pairs, &[scenario.qubit_omega])?;
    table.extend(samples);

    let dephasing_grid = if want_dephasing {
        let cfg = scenario.dephasing.as_ref().expect("validated in config");
        let omegas = DephasingSpectrum::log_grid(
            scenario.bath.dephasing_cutoff,
            cfg.points_per_decade,
            cfg.decades,
        );
        let (samples, grid_stats) = green_scan(scene, &pairs, &omegas)?;
        table.extend(samples);
        stats.factorizations += grid_stats.factorizations;
        stats.solves += grid_stats.solves;
        Some(omegas)
    } else {
        None
    };

    let mut gamma_ii = vec![vec![0.0; n_axes]; n_points];
    let mut gamma_ij = scenario.scan.secondary.as_ref().map(|_| vec![vec![0.0; n_axes]; n_points]);
    let mut gamma_phi = want_dephasing.then(|| vec![vec![0.0; n_axes]; n_points]);
    let mut fidelity = want_fidelity.then(|| vec![vec![0.0; n_axes]; n_points]);

    for (pt, &primary) in scenario.scan.primary.iter().enumerate() {
        for (ax, (_, axis)) in scenario.axes.iter().enumerate() {
            let mut qubits = vec![qubit_at(scenario, primary, *axis)?];
            if let Some(secondary) = &scenario.scan.secondary {
                qubits.push(qubit_at(scenario, secondary[pt], *axis)?);
            }
            let rates = relaxation_rates(&qubits, &mut table, &scenario.bath)?;
            gamma_ii[pt][ax] = rates.gamma_r[(0, 0)].re;
            if let Some(gij) = gamma_ij.as_mut() {
                gij[pt][ax] = rates.gamma_r[(0, 1)].re;
            }

            let dephasing_model = if let Some(omegas) = &dephasing_grid {
                let n = qubits.len();
                let mut im_g: Vec<Vec<Mat3>> = Vec::with_capacity(omegas.len());
                for &w in omegas {
                    let mut per_pair = Vec::with_capacity(n * n);
                    for qi in &qubits {
                        for qj in &qubits {
                            use qem::greens::GreenSource;
                            let s = table.sample(qi.position, qj.position, w)?;
                            per_pair.push(s.im());
                        }
                    }
                    im_g.push(per_pair);
                }
                let spectrum = DephasingSpectrum { omegas: omegas.clone(), im_g };
                Some(DephasingModel::build(&qubits, &spectrum, &scenario.bath)?)
            } else {
                None
            };

            if let (Some(gphi), Some(model)) = (gamma_phi.as_mut(), dephasing_model.as_ref()) {
                let cfg = scenario.dephasing.as_ref().expect("validated");
                gphi[pt][ax] = model.rates_at(cfg.time)?[(0, 0)];
            }

            if let (Some(fid), Some(cfg)) = (fidelity.as_mut(), scenario.fidelity.as_ref()) {
                let rate_set = RateSet {
                    gamma_r: rates.gamma_r.clone(),
                    dephasing: if cfg.include_dephasing { dephasing_model.clone() } else { None },
                    nbar: rates.nbar,
                };
                let generator = build_lindblad(&rate_set)?;
                let states = if qubits.len() == 1 {
                    DensityMatrix::single_qubit_default_set()
                } else {
                    DensityMatrix::two_qubit_basis_set()
                };
                let gate = GateSpec::idle(1 << qubits.len(), cfg.duration, states);
                fid[pt][ax] = gate_fidelity(&gate, &generator, cfg.duration / cfg.steps as f64)?;
            }
        }
    }
    Ok(BackendResults { kind, gamma_ii, gamma_ij, gamma_phi, fidelity, stats })
}

/// Column name with an optional backend tag before the unit suffix:
/// `gamma_r_per_s` -> `gamma_r_vie_per_s`.
fn tagged(base: &str, unit_suffix: &str, kind: BackendKind, multi: bool) -> String {
    if multi {
        if unit_suffix.is_empty() {
            format!("{base}_{}", backend_label(kind))
        } else {
            format!("{base}_{}_{}", backend_label(kind), unit_suffix)
        }
    } else if unit_suffix.is_empty() {
        base.to_string()
    } else {
        format!("{base}_{unit_suffix}")
    }
}

/// Execute a scenario, writing CSV outputs and `summary.json` into
/// `out_dir`. Returns the list of files written.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<Vec<String>, RunError> {
    let started = Instant::now();
    std::fs::create_dir_all(out_dir)?;
    let mut results = Vec::new();
    for (kind, scene) in &scenario.backends {
        results.push(compute_backend(scenario, *kind, scene)?);
    }

    let scan_col = scan_column(scenario.scan.variable);
    let multi = results.len() > 1;
    let mut written = Vec::new();

    let mut emit = |name: &str,
                    header: Vec<String>,
                    fill: &dyn Fn(usize, usize, &BackendResults, &mut Vec<CsvField>)|
     -> Result<(), RunError> {
        let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
        for (pt, &v) in scenario.scan.values.iter().enumerate() {
            for (ax, (axis_name, _)) in scenario.axes.iter().enumerate() {
                let mut row = vec![CsvField::Num(v), CsvField::Str(axis_name.as_str())];
                for r in &results {
                    fill(pt, ax, r, &mut row);
                }
                csv.row(&row);
            }
        }
        let path = out_dir.join(name);
        csv.write(&path)?;
        written.push(name.to_string());
        Ok(())
    };

    for output in &scenario.outputs {
        match output {
            OutputKind::Relaxation => {
                let mut header = vec![scan_col.to_string(), "axis".into()];
                for r in &results {
                    header.push(tagged("gamma_r", "per_s", r.kind, multi));
                }
                emit("relaxation.csv", header, &|pt, ax, r, row| {
                    row.push(CsvField::Num(r.gamma_ii[pt][ax]));
                })?;
            }
            OutputKind::CorrelationRatio => {
                let mut header = vec![scan_col.to_string(), "axis".into()];
                for r in &results {
                    header.push(tagged("ratio", "", r.kind, multi));
                }
                emit("correlation_ratio.csv", header, &|pt, ax, r, row| {
                    let gij = r.gamma_ij.as_ref().expect("separation scan");
                    row.push(CsvField::Num(gij[pt][ax] / r.gamma_ii[pt][ax]));
                })?;
            }
            OutputKind::T1 => {
                let nbar = scenario.bath.mean_photon_number(scenario.qubit_omega).unwrap_or(0.0);
                let mut header = vec![scan_col.to_string(), "axis".into()];
                for r in &results {
                    header.push(tagged("t1", "s", r.kind, multi));
                }
                // precheck rates so conversion errors surface as compute errors
                for r in &results {
                    for row in &r.gamma_ii {
                        for &g in row {
                            t1_from_rate(g, nbar).map_err(RunError::Qubits)?;
                        }
                    }
                }
                emit("t1.csv", header, &|pt, ax, r, row| {
                    let t1 = t1_from_rate(r.gamma_ii[pt][ax], nbar).expect("prechecked");
                    row.push(CsvField::Num(t1));
                })?;
            }
            OutputKind::Dephasing => {
                let mut header = vec![scan_col.to_string(), "axis".into()];
                for r in &results {
                    header.push(tagged("gamma_phi", "per_s", r.kind, multi));
                }
                emit("dephasing.csv", header, &|pt, ax, r, row| {
                    row.push(CsvField::Num(
                        r.gamma_phi.as_ref().expect("dephasing prerequisites")[pt][ax],
                    ));
                })?;
            }
            OutputKind::Fidelity => {
                let mut header = vec![scan_col.to_string(), "axis".into()];
                for r in &results {
                    header.push(tagged("fidelity", "", r.kind, multi));
                    header.push(tagged("delta_f", "", r.kind, multi));
                }
                emit("fidelity.csv", header, &|pt, ax, r, row| {
                    let f = r.fidelity.as_ref().expect("fidelity prerequisites")[pt][ax];
                    row.push(CsvField::Num(f));
                    // the idle reference gate is exact, so the infidelity from
                    // electromagnetic noise is 1 - F
                    row.push(CsvField::Num(1.0 - f));
                })?;
            }
        }
    }

    let stats = results
        .iter()
        .find(|r| matches!(r.kind, BackendKind::Vie))
        .map(|r| r.stats)
        .unwrap_or_default();
    let summary = json!({
        "config": scenario.config_echo,
        "tetCount": scenario.mesh_stats.map(|(t, _)| t).unwrap_or(0),
        "nodeCount": scenario.mesh_stats.map(|(_, n)| n).unwrap_or(0),
        "unknownCount": stats.unknown_count,
        "factorizationCount": stats.factorizations,
        "solveCount": stats.solves,
        "wallSeconds": started.elapsed().as_secs_f64(),
        "outputs": written,
    });
    write_json(&out_dir.join("summary.json"), &summary)?;
    written.push("summary.json".into());
    Ok(written)
}
