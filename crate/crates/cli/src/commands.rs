//! One function per subcommand. Each writes its CSV/JSON files and returns a
//! one-line summary.

use bandcorr::blockgate::{
    check_hypotheses, ct_bound, norm_bound_2x2, norm_scenario, scenario_generator, suite_params, GateReport,
    NormVerdict,
};
use bandcorr::correlator::{ratio_curve, RunRecord};
use bandcorr::ensemble::{covariance, spectral_params};
use bandcorr::limits::{critical_limit, factorized_limit, ginibre_limit, matrix_exponential_cross_check, a0_matrix};
use bandcorr::transferop::{
    a_star_spectrum_with, schur_orthogonality_check, su2_averages, GaussianKernelSpec, SU2AverageSpec,
};
use log::info;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::config::{bandwidth, CommandKind, ExperimentConfig};
use crate::error::CliError;
use crate::output::{document, Cell, Metadata, OutDir, Table};
use crate::plot::{ratio_plot, Curve, Markers};

/// Runs `command` and returns its summary line.
pub fn run(command: CommandKind, cfg: &ExperimentConfig, out: &mut OutDir) -> Result<String, CliError> {
    cfg.validate(command)?;
    let meta = Metadata::new(cfg)?;
    match command {
        CommandKind::Covariance => run_covariance(cfg, out, &meta),
        CommandKind::Simulate => run_simulate(cfg, out, &meta),
        CommandKind::Limits => run_limits(cfg, out, &meta),
        CommandKind::Spectrum => run_spectrum(cfg, out, &meta),
        CommandKind::Su2 => run_su2(cfg, out, &meta),
        CommandKind::Blockgate => run_blockgate(cfg, out, &meta),
        CommandKind::Verify => crate::verify::run_verify(cfg, out, &meta),
    }
}

pub fn run_covariance(cfg: &ExperimentConfig, out: &mut OutDir, meta: &Metadata) -> Result<String, CliError> {
    let c = &cfg.covariance;
    let profile = bandwidth(c.w, c.kappa, "covariance")?.profile(c.n)?;
    let j = covariance(&profile);
    out.write("covariance.csv", j.to_csv().as_bytes())?;
    let body = json!({
        "N": profile.n(),
        "W": profile.w(),
        "kappa": profile.kappa(),
        "row_sum_defect": j.row_sum_defect(),
        "decay_constant": finite_or_null(j.decay_constant(profile.w())),
        "entries": j.entries.row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>(),
    });
    out.write_json("covariance.json", &document(meta, "covariance", body))?;
    Ok(format!(
        "covariance N = {} W = {}: row-sum defect {:.3e}",
        profile.n(),
        profile.w(),
        j.row_sum_defect()
    ))
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

#[derive(Debug, Clone, Serialize)]
struct SimulateRow {
    #[serde(flatten)]
    record: RunRecord,
    n_excluded: usize,
    kappa_u: f64,
    ginibre: f64,
    factorized: f64,
    critical: f64,
}

pub fn run_simulate(cfg: &ExperimentConfig, out: &mut OutDir, meta: &Metadata) -> Result<String, CliError> {
    let s = &cfg.simulate;
    let bw = bandwidth(s.w, s.kappa, "simulate")?;
    let z = s.z.value();
    let zetas: Vec<Complex64> = s.zeta.iter().map(|c| c.value()).collect();
    let mut table = Table::new(&[
        "N", "W", "kappa", "z_re", "z_im", "zeta_re", "zeta_im", "zeta_abs", "n_samples", "n_excluded", "seed",
        "ratio", "stderr_log", "kappa_u", "ginibre", "factorized", "critical",
    ]);
    let mut rows = Vec::new();
    for &n in &s.n {
        let profile = bw.profile(n)?;
        let kappa_u = spectral_params(z, profile.w())?.kappa_u(n);
        info!("simulate N = {n}, W = {}, {} samples", profile.w(), s.n_samples);
        for (zeta, est) in ratio_curve(&profile, z, &zetas, s.n_samples, cfg.seed)? {
            let row = SimulateRow {
                record: RunRecord::new(&profile, z, zeta, cfg.seed, &est),
                n_excluded: est.n_excluded,
                kappa_u,
                ginibre: ginibre_limit(zeta),
                factorized: factorized_limit(zeta),
                critical: critical_limit(kappa_u, zeta, s.truncation, s.mode)?,
            };
            table.push(vec![
                n.into(),
                profile.w().into(),
                profile.kappa().into(),
                z.re.into(),
                z.im.into(),
                zeta.re.into(),
                zeta.im.into(),
                zeta.norm().into(),
                est.n_samples.into(),
                est.n_excluded.into(),
                cfg.seed.into(),
                est.ratio.into(),
                est.stderr_log.into(),
                kappa_u.into(),
                row.ginibre.into(),
                row.factorized.into(),
                row.critical.into(),
            ]);
            rows.push(row);
        }
    }
    out.write_csv("simulate.csv", &table)?;

    // gap to the critical limit per ζ across the size sweep
    let mut summary = Table::new(&["zeta_re", "zeta_im", "zeta_abs", "N", "ratio", "critical", "gap", "non_increasing"]);
    for (k, zeta) in zetas.iter().enumerate() {
        let mut prev = f64::INFINITY;
        for (i, _) in s.n.iter().enumerate() {
            let r = &rows[i * zetas.len() + k];
            let gap = (r.record.ratio - r.critical).abs();
            summary.push(vec![
                zeta.re.into(),
                zeta.im.into(),
                zeta.norm().into(),
                r.record.n.into(),
                r.record.ratio.into(),
                r.critical.into(),
                gap.into(),
                (gap <= prev).into(),
            ]);
            prev = gap;
        }
    }
    out.write_csv("simulate_summary.csv", &summary)?;
    let body = json!({ "rows": table.to_json(), "summary": summary.to_json() });
    out.write_json("simulate.json", &document(meta, "simulate", body))?;

    if s.plot {
        out.write("simulate.svg", simulate_plot(cfg, &rows)?.as_bytes())?;
    }
    Ok(format!("simulate: {} rows over N = {:?}", rows.len(), s.n))
}

fn simulate_plot(cfg: &ExperimentConfig, rows: &[SimulateRow]) -> Result<String, CliError> {
    let s = &cfg.simulate;
    let r_max = s.zeta.iter().map(|c| c.value().norm()).fold(0.0, f64::max).max(0.1);
    let grid: Vec<f64> = (0..=100).map(|i| r_max * i as f64 / 100.0).collect();
    let curve = |label: String, dashed: bool, f: &dyn Fn(Complex64) -> Result<f64, CliError>| -> Result<Curve, CliError> {
        let points = grid.iter().map(|&r| Ok((r, f(Complex64::new(r, 0.0))?))).collect::<Result<_, CliError>>()?;
        Ok(Curve { label, points, dashed })
    };
    let mut curves = vec![
        curve("ginibre".into(), false, &|z| Ok(ginibre_limit(z)))?,
        curve("factorized".into(), false, &|z| Ok(factorized_limit(z)))?,
    ];
    let mut markers = Vec::new();
    for &n in &s.n {
        let mine: Vec<&SimulateRow> = rows.iter().filter(|r| r.record.n == n).collect();
        let kappa_u = mine[0].kappa_u;
        curves.push(curve(format!("critical, κu = {kappa_u:.3}"), true, &|z| {
            Ok(critical_limit(kappa_u, z, s.truncation, s.mode)?)
        })?);
        let points = mine
            .iter()
            .map(|r| (r.record.zeta.norm(), r.record.ratio, r.record.ratio * r.record.stderr_log))
            .collect();
        markers.push(Markers { label: format!("N = {n}"), points });
    }
    Ok(ratio_plot("correlator ratio vs |ζ|", &curves, &markers))
}

pub fn run_limits(cfg: &ExperimentConfig, out: &mut OutDir, meta: &Metadata) -> Result<String, CliError> {
    let l = &cfg.limits;
    let mut table = Table::new(&[
        "mode", "kappa_u", "zeta_re", "zeta_im", "zeta_abs", "m", "ginibre", "factorized", "critical",
        "critical_2m", "expm_cross_check",
    ]);
    for &mode in &l.modes {
        for &ku in &l.kappa_u {
            for zeta in l.zeta.iter().map(|c| c.value()) {
                let crit = critical_limit(ku, zeta, l.truncation, mode)?;
                let crit2 = critical_limit(ku, zeta, 2 * l.truncation, mode)?;
                let xc = matrix_exponential_cross_check(&a0_matrix(ku, zeta, l.truncation, mode)?.entries)?;
                table.push(vec![
                    mode.to_string().into(),
                    ku.into(),
                    zeta.re.into(),
                    zeta.im.into(),
                    zeta.norm().into(),
                    l.truncation.into(),
                    ginibre_limit(zeta).into(),
                    factorized_limit(zeta).into(),
                    crit.into(),
                    crit2.into(),
                    xc.into(),
                ]);
            }
        }
    }
    out.write_csv("limits.csv", &table)?;
    out.write_json("limits.json", &document(meta, "limits", table.to_json()))?;
    Ok(format!("limits: {} rows", table.rows.len()))
}

pub fn run_spectrum(cfg: &ExperimentConfig, out: &mut OutDir, meta: &Metadata) -> Result<String, CliError> {
    let s = &cfg.spectrum;
    let spec = GaussianKernelSpec::new(s.u_star, s.w, s.normalization)?;
    let r = a_star_spectrum_with(&spec, s.quad_order, s.k_max)?;
    let mut table = Table::new(&["m", "computed", "predicted", "rel_err"]);
    for (m, (&c, &p)) in r.computed.iter().zip(&r.predicted).enumerate() {
        table.push(vec![m.into(), c.into(), p.into(), ((c - p).abs() / p.abs()).into()]);
    }
    out.write_csv("spectrum.csv", &table)?;
    let body = json!({ "rows": table.to_json(), "report": r });
    out.write_json("spectrum.json", &document(meta, "spectrum", body))?;
    Ok(format!(
        "spectrum: λ_* = {:.10}, max relative error {:.3e}, ratio error {:.3e}",
        r.lambda_star, r.max_rel_err, r.max_ratio_err
    ))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// SU(2) averages on a `(W, ℓ)` grid plus the fitted slope per `ℓ`.
pub fn su2_tables(ws: &[f64], ells: &[usize], u_star: f64, tr_s: f64, orders: [usize; 3]) -> Result<(Table, Table), CliError> {
    let mut rows = Table::new(&[
        "W", "ell", "tr_s", "average", "one_minus_average", "lambda_ell", "deviation", "z0", "z0_reference",
        "doubling_change",
    ]);
    let mut dev = vec![Vec::new(); ells.len()];
    for &w in ws {
        let spec = SU2AverageSpec { u_star, w, tr_s, orders, ..SU2AverageSpec::new(0, w, u_star) };
        for (i, r) in su2_averages(&spec, ells)?.into_iter().enumerate() {
            dev[i].push(r.deviation);
            rows.push(vec![
                w.into(),
                r.ell.into(),
                tr_s.into(),
                r.average.into(),
                r.one_minus_average.into(),
                r.lambda_ell.into(),
                r.deviation.into(),
                r.z0.into(),
                r.z0_reference.into(),
                r.doubling_change.into(),
            ]);
        }
    }
    let mut slopes = Table::new(&["ell", "tr_s", "slope"]);
    if ws.len() >= 2 {
        for (i, &l) in ells.iter().enumerate() {
            slopes.push(vec![l.into(), tr_s.into(), loglog_slope(ws, &dev[i]).into()]);
        }
    }
    Ok((rows, slopes))
}

pub fn run_su2(cfg: &ExperimentConfig, out: &mut OutDir, meta: &Metadata) -> Result<String, CliError> {
    let s = &cfg.su2;
    let (rows, slopes) = su2_tables(&s.w, &s.ells, s.u_star, s.tr_s, s.orders)?;
    let schur = schur_orthogonality_check(10, [64, 8, 8])?;
    out.write_csv("su2.csv", &rows)?;
    out.write_csv("su2_slopes.csv", &slopes)?;
    let body = json!({ "rows": rows.to_json(), "slopes": slopes.to_json(), "schur": schur });
    out.write_json("su2.json", &document(meta, "su2", body))?;
    let worst = slopes.rows.iter().map(|r| match r[2] { Cell::Float(x) => x, _ => f64::NAN }).fold(f64::NEG_INFINITY, f64::max);
    Ok(format!("su2: {} averages, shallowest slope {worst:.3}, Schur deviation {:.3e}", rows.rows.len(), schur.max_deviation))
}

#[derive(Debug, Clone, Serialize)]
struct ViolationRow {
    seed: u64,
    violate: usize,
    hypotheses_hold: [bool; 4],
    error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
struct NormRow {
    seed: u64,
    dim: usize,
    split: usize,
    m1: f64,
    m2: f64,
    #[serde(flatten)]
    verdict: NormVerdict,
}

pub fn run_blockgate(cfg: &ExperimentConfig, out: &mut OutDir, meta: &Metadata) -> Result<String, CliError> {
    let b = &cfg.blockgate;
    let seeds = (0..b.scenarios as u64).map(|k| cfg.seed.wrapping_add(k));
    if let Some(v) = b.violate {
        let mut rows = Vec::new();
        for seed in seeds {
            let s = scenario_generator(seed, suite_params(seed), Some(v))?;
            let hypotheses_hold = check_hypotheses(&s)?;
            let error = ct_bound(&s).err().map(|e| e.to_string());
            rows.push(ViolationRow { seed, violate: v, hypotheses_hold, error });
        }
        out.write_jsonl("blockgate_violations.jsonl", &rows)?;
        let rejected = rows.iter().filter(|r| r.error.is_some()).count();
        let body = json!({ "violate": v, "scenarios": rows.len(), "rejected": rejected });
        out.write_json("blockgate.json", &document(meta, "blockgate", body))?;
        return Ok(format!("blockgate: hypothesis {v} broken, {rejected}/{} scenarios rejected", rows.len()));
    }
    let reports: Vec<GateReport> = seeds
        .map(|seed| {
            let s = scenario_generator(seed, suite_params(seed), None)?;
            ct_bound(&s)
        })
        .collect::<Result<_, _>>()?;
    let norms: Vec<NormRow> = (0..b.norm_scenarios as u64)
        .map(|k| {
            let seed = cfg.seed.wrapping_add(k);
            let (m, split, m1, m2) = norm_scenario(seed, b.norm_max_dim);
            let verdict = norm_bound_2x2(&m, split, m1, m2)?;
            Ok(NormRow { seed, dim: m.nrows(), split, m1, m2, verdict })
        })
        .collect::<Result<_, CliError>>()?;
    out.write_jsonl("blockgate.jsonl", &reports)?;
    out.write_jsonl("norm.jsonl", &norms)?;
    let s = crate::verify::gate_summary(&reports, &norms.iter().map(|r| r.verdict).collect::<Vec<_>>());
    out.write_json("blockgate.json", &document(meta, "blockgate", serde_json::to_value(&s)?))?;
    Ok(format!(
        "blockgate: CT.1 {}/{}, CT.2 {}/{}, CT.0 {}/{}, p:n.1 {}/{}",
        s.ct1.holds, s.ct1.total, s.ct2.holds, s.ct2.total, s.ct0.holds, s.ct0.total, s.norm.holds, s.norm.total
    ))
}
