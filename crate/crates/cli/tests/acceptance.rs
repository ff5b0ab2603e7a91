//! Acceptance criteria 1-10, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the summary is always printed.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use cdsvar::causality::{cap_weights, cholesky, granger_test, impulse_response};
use cdsvar::cds::{default_payout, pnl_at_resolution, premium_schedule, CdsContract};
use cdsvar::linalg::min_symmetric_eigenvalue;
use cdsvar::market_data::correlation_matrix;
use cdsvar::report::{run_study_on, Model, StudyConfig, StudyData};
use cdsvar::simulator::{
    business_days, paper_shaped_batch, simulate, simulate_panel, BatchConfig, DgpSpec,
    NormalStream, PAPER_ENTITIES,
};
use cdsvar::stationarity::{adf_test, kpss_test, pp_test, Deterministic};
use cdsvar::var::{build_design, fit_var, VarSpec, DEFAULT_LAG_ORDER};
use cdsvar::{AlignedPanel, Matrix, Variable};
use chrono::NaiveDate;
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn d(y: i32, m: u32, day: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, day).unwrap()
}

fn contract(spread_bp: f64) -> CdsContract<f64> {
    CdsContract {
        reference_entity: "FTE".into(),
        notional: 10_000_000.0,
        spread_bp,
        tenor_years: 5.0,
        payments_per_year: 4,
        recovery_rate: 0.4,
    }
}

fn c1_cds() -> Outcome {
    let t = Instant::now();
    let a = premium_schedule(&contract(23.5)).map_err(|e| e.to_string())?;
    let b = premium_schedule(&contract(730.0)).map_err(|e| e.to_string())?;
    let payout = default_payout(&contract(23.5)).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure(
        a.payments.len() == 20 && a.payments.iter().all(|&(_, x)| x == 5875.0),
        "5,875 per quarter",
    )?;
    ensure(a.total == 117_500.0, format!("2007 total {}", a.total))?;
    ensure(
        b.payments.iter().all(|&(_, x)| x == 182_500.0),
        "182,500 per quarter",
    )?;
    ensure(b.total == 3_650_000.0, format!("2002 total {}", b.total))?;
    ensure(payout == 6_000_000.0, format!("payout {payout}"))?;
    ensure(elapsed.as_secs_f64() < 1e-3, format!("runtime {elapsed:?}"))?;
    Ok(format!(
        "5875/117500, 182500/3650000, payout 6000000 in {elapsed:?}"
    ))
}

fn c2_ols_oracle() -> Outcome {
    let rs = [0.1, -0.2, 0.3, 0.05, -0.1, 0.2];
    let dcds = [1.0, 2.5, -0.5, 0.7, 1.2, -1.1];
    let values = Matrix::from_fn(6, 2, |r, c| if c == 0 { rs[r] } else { dcds[r] });
    let panel = AlignedPanel::<f64>::new(
        "X",
        business_days(d(2007, 1, 1), 6),
        vec![Variable::Rs, Variable::Dcds],
        values,
    )
    .map_err(|e| e.to_string())?;
    let fit = fit_var(&panel, &VarSpec::var2(1)).map_err(|e| e.to_string())?;
    // exact rational solution of the normal equations
    let expected = [
        [16103.0 / 73420.0, -9933.0 / 7342.0, -1929.0 / 14684.0],
        [-15205.0 / 7342.0, 58616.0 / 3671.0, 8061.0 / 3671.0],
    ];
    let mut worst = 0.0f64;
    for (eq, row) in expected.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            worst = worst.max((fit.coefficients[(eq, j)] - b).abs());
        }
    }
    ensure(worst <= 1e-10, format!("max error {worst:e}"))?;
    Ok(format!("max abs error {worst:.2e}"))
}

fn var5_lags() -> Vec<Matrix<f64>> {
    let m = |r: [[f64; 3]; 3]| Matrix::from_rows(&r.map(|x| x.to_vec())).unwrap();
    vec![
        m([[0.30, 0.10, 0.00], [0.05, 0.20, 0.10], [-0.10, 0.00, 0.25]]),
        m([[0.10, 0.00, 0.05], [0.00, -0.10, 0.00], [-0.05, 0.05, 0.10]]),
        m([[-0.05, 0.00, 0.00], [0.05, 0.05, 0.00], [0.00, 0.00, -0.05]]),
        m([[0.05, 0.00, 0.00], [0.00, 0.05, -0.05], [0.05, 0.00, 0.05]]),
        m([[-0.05, 0.05, 0.00], [0.00, 0.00, 0.05], [0.00, -0.05, 0.05]]),
    ]
}

fn c3_var_recovery() -> Outcome {
    let t = Instant::now();
    let lags = var5_lags();
    let cov = Matrix::from_rows(&[
        vec![1.0, 0.3, -0.2],
        vec![0.3, 1.0, 0.1],
        vec![-0.2, 0.1, 1.0],
    ])
    .unwrap();
    let spec = VarSpec::var1(5);
    let (hit, total) = (0..50u64)
        .into_par_iter()
        .map(|s| {
            let dgp = DgpSpec::var_process(lags.clone(), cov.clone(), 1500, 50_000 + s);
            let fit = fit_var(&simulate_panel(&dgp, "SIM", d(2001, 1, 2)).unwrap(), &spec).unwrap();
            let (k, m) = fit.coefficients.shape();
            let mut hit = 0;
            for eq in 0..k {
                for j in 0..m {
                    let truth = if j == 0 {
                        0.0
                    } else {
                        lags[(j - 1) % 5][(eq, (j - 1) / 5)]
                    };
                    if (fit.coefficients[(eq, j)] - truth).abs() <= 3.0 * fit.std_errors[(eq, j)] {
                        hit += 1;
                    }
                }
            }
            (hit, k * m)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let rate = hit as f64 / total as f64;
    let elapsed = t.elapsed();
    ensure(rate >= 0.95, format!("coverage {rate:.4}"))?;
    ensure(elapsed.as_secs_f64() < 10.0, format!("runtime {elapsed:?}"))?;
    Ok(format!(
        "{hit}/{total} = {rate:.4} within 3 SE in {elapsed:.2?}"
    ))
}

fn granger_rate(cross: f64, seed0: u64) -> f64 {
    let a = Matrix::from_rows(&[vec![0.5, 0.0], vec![cross, 0.5]]).unwrap();
    let spec = VarSpec::var2(DEFAULT_LAG_ORDER);
    let hits: usize = (0..1000u64)
        .into_par_iter()
        .map(|s| {
            let dgp = DgpSpec::var_process(vec![a.clone()], Matrix::identity(2), 500, seed0 + s);
            let panel = simulate_panel(&dgp, "G", d(2002, 1, 1)).unwrap();
            usize::from(
                granger_test(&panel, &spec, Variable::Rs, Variable::Dcds)
                    .unwrap()
                    .reject_at_5pct,
            )
        })
        .sum();
    hits as f64 / 1000.0
}

fn c4_granger() -> Outcome {
    let t = Instant::now();
    let size = granger_rate(0.0, 100_000);
    let power = granger_rate(0.3, 200_000);
    let elapsed = t.elapsed();
    ensure((0.03..=0.07).contains(&size), format!("size {size}"))?;
    ensure(power >= 0.95, format!("power {power}"))?;
    ensure(elapsed.as_secs_f64() < 60.0, format!("runtime {elapsed:?}"))?;
    Ok(format!("size {size:.3}, power {power:.3} in {elapsed:.2?}"))
}

fn c5_irf() -> Outcome {
    // any VAR(1) fit as a shell, with A = 0.5 I and unit innovation covariance set exactly
    let dgp = DgpSpec::<f64>::white_noise(2, 400, 5);
    let panel = simulate_panel(&dgp, "I", d(2003, 1, 1)).unwrap();
    let mut fit = fit_var(&panel, &VarSpec::var2(1)).map_err(|e| e.to_string())?;
    fit.coefficients = Matrix::from_rows(&[vec![0.0, 0.5, 0.0], vec![0.0, 0.0, 0.5]]).unwrap();
    fit.residual_covariance = Matrix::identity(2);
    let irf = impulse_response(&fit, 15).map_err(|e| e.to_string())?;
    let a = fit.companion();
    let mut power = Matrix::<f64>::identity(2);
    let mut worst = 0.0f64;
    for m in &irf.responses {
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((m[(i, j)] - power[(i, j)]).abs());
            }
        }
        power = power.matmul(&a).unwrap();
    }
    for (h, m) in irf.responses.iter().enumerate() {
        ensure(
            (m[(0, 0)] - 0.5f64.powi(h as i32)).abs() <= 1e-10,
            format!("h={h}"),
        )?;
    }
    ensure(
        irf.responses.len() == 16 && worst <= 1e-10,
        format!("max error {worst:e}"),
    )?;
    Ok(format!("h=0..15 max abs error {worst:.2e}"))
}

fn c6_unit_root() -> Outcome {
    let t = Instant::now();
    let rate = |gen: &(dyn Fn(u64) -> Vec<f64> + Sync), test: &(dyn Fn(&[f64]) -> bool + Sync)| {
        (0..1000u64)
            .into_par_iter()
            .filter(|&s| test(&gen(s)))
            .count() as f64
            / 1000.0
    };
    let rw = |s: u64| {
        simulate(&DgpSpec::<f64>::random_walk(1, 1000, 10_000 + s))
            .unwrap()
            .column(0)
    };
    let wn = |s: u64| {
        simulate(&DgpSpec::<f64>::white_noise(1, 1000, 20_000 + s))
            .unwrap()
            .column(0)
    };
    let ar = |s: u64| {
        simulate(&DgpSpec::<f64>::ar1(0.5, 1000, 30_000 + s))
            .unwrap()
            .column(0)
    };
    let adf = |x: &[f64]| {
        adf_test(x, Deterministic::ConstantOnly, None)
            .unwrap()
            .reject_at_5pct
    };
    let pp = |x: &[f64]| {
        pp_test(x, Deterministic::ConstantOnly, None)
            .unwrap()
            .reject_at_5pct
    };
    let kpss = |x: &[f64]| {
        kpss_test(x, Deterministic::ConstantOnly, None)
            .unwrap()
            .reject_at_5pct
    };
    let r = [
        rate(&rw, &adf),
        rate(&rw, &pp),
        rate(&wn, &adf),
        rate(&wn, &pp),
        rate(&ar, &adf),
        rate(&ar, &pp),
        rate(&rw, &kpss),
        rate(&wn, &kpss),
        rate(&ar, &kpss),
    ];
    let elapsed = t.elapsed();
    let detail = format!(
        "ADF/PP size {:.3}/{:.3}; power WN {:.3}/{:.3}, AR {:.3}/{:.3}; KPSS RW {:.3}, WN {:.3}, AR {:.3} in {elapsed:.2?}",
        r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8]
    );
    ensure(
        (0.03..=0.07).contains(&r[0]) && (0.03..=0.07).contains(&r[1]),
        detail.clone(),
    )?;
    ensure(r[2..6].iter().all(|&x| x >= 0.90), detail.clone())?;
    ensure(r[6] >= 0.95 && r[7] <= 0.10 && r[8] <= 0.10, detail.clone())?;
    ensure(elapsed.as_secs_f64() < 120.0, detail.clone())?;
    Ok(detail)
}

fn default_batch_run() -> cdsvar::report::StudyOutcome {
    let batch = paper_shaped_batch(&BatchConfig::default()).unwrap();
    let data = StudyData {
        records: batch.records,
        observations: batch
            .observations
            .into_iter()
            .map(|o| (o.entity_id.clone(), o))
            .collect::<BTreeMap<_, _>>(),
    };
    let dir = tempfile::tempdir().unwrap();
    let cfg = StudyConfig {
        output_dir: dir.path().to_path_buf(),
        plots: false,
        ..StudyConfig::default()
    };
    run_study_on(&cfg, &data).unwrap()
}

fn c7_table_pattern(outcome: &cdsvar::report::StudyOutcome) -> Outcome {
    let run = outcome
        .runs
        .iter()
        .find(|r| r.model == Model::Var1 && r.period.label == "whole")
        .unwrap();
    let n = run
        .causality
        .as_ref()
        .unwrap()
        .total(Variable::Rs, Variable::Dcds)
        .unwrap();
    ensure((10..=12).contains(&n), format!("RS cause DCDS total {n}"))?;
    let pct = [
        3.61, 15.28, 13.40, 3.37, 6.82, 5.44, 9.19, 2.74, 0.60, 4.46, 11.73, 1.51, 21.83,
    ];
    let w = cap_weights(&PAPER_ENTITIES.map(|e| e.market_cap)).map_err(|e| e.to_string())?;
    let worst = w
        .iter()
        .zip(pct)
        .map(|(a, b)| (100.0 * a - b).abs())
        .fold(0.0, f64::max);
    ensure(worst <= 0.01, format!("cap weight error {worst}"))?;
    Ok(format!(
        "RS cause DCDS total {n}; cap weights within {worst:.4} pp"
    ))
}

fn c8_sign_pattern(outcome: &cdsvar::report::StudyOutcome) -> Outcome {
    let run = outcome
        .runs
        .iter()
        .find(|r| r.model == Model::Var1 && r.period.label == "whole")
        .unwrap();
    let corr = run.mean_correlation.as_ref().unwrap();
    let (rs_cds, bond_cds) = (corr[(0, 2)], corr[(1, 2)]);
    ensure(
        rs_cds < 0.0 && bond_cds > 0.0,
        format!("corr RS-DCDS {rs_cds}, DBOND-DCDS {bond_cds}"),
    )?;
    let path: Vec<f64> = run
        .irf
        .as_ref()
        .unwrap()
        .path(Variable::Dcds, Variable::Rs)
        .unwrap()
        .iter()
        .map(|x| -x)
        .collect();
    let peak = path.iter().cloned().fold(f64::MIN, f64::max);
    ensure(peak > 0.0, "negative share shock does not raise DCDS")?;
    let below = path
        .iter()
        .position(|x| x.abs() < 0.1 * peak)
        .unwrap_or(usize::MAX);
    ensure(
        path[7..].iter().all(|x| x.abs() < 0.1 * peak),
        format!("path {path:?}"),
    )?;
    Ok(format!(
        "corr RS-DCDS {rs_cds:.3}, DBOND-DCDS {bond_cds:.3}; DCDS peak {peak:.3} below 10% from h={below}"
    ))
}

fn c9_determinism() -> Outcome {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let config = root.join("data/study.json");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut manifests = Vec::new();
    for dir in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_cdsvar"))
            .arg("study")
            .arg("--config")
            .arg(&config)
            .arg("--output-dir")
            .arg(dir.path())
            .output()
            .map_err(|e| e.to_string())?;
        ensure(
            status.status.success(),
            String::from_utf8_lossy(&status.stderr).into_owned(),
        )?;
        manifests.push(std::fs::read(dir.path().join("manifest.json")).map_err(|e| e.to_string())?);
    }
    ensure(manifests[0] == manifests[1], "manifests differ")?;
    Ok(format!("{} byte manifests identical", manifests[0].len()))
}

fn c10_invariants() -> Outcome {
    const CASES: u64 = 200;
    let mut counts = [0usize; 6];
    for case in 0..CASES {
        let mut s = NormalStream::new(900_000 + case);
        let k = 2 + (s.next_u64() % 2) as usize;
        let p = 1 + (s.next_u64() % 3) as usize;
        let t = 80 + (s.next_u64() % 150) as usize;
        let a = Matrix::from_fn(k, k, |i, j| if i == j { 0.4 } else { 0.1 });
        let dgp = DgpSpec::var_process(vec![a], Matrix::identity(k), t, 910_000 + case);
        let panel: AlignedPanel<f64> = simulate_panel(&dgp, "P", d(2003, 3, 3)).unwrap();
        let spec = if k == 2 {
            VarSpec::var2(p)
        } else {
            VarSpec::var1(p)
        };
        let fit = fit_var(&panel, &spec).map_err(|e| e.to_string())?;

        // residual-regressor orthogonality
        let x = build_design(&panel, &spec).unwrap().regressors;
        for eq in 0..k {
            for j in 0..x.cols() {
                let (mut dot, mut xx, mut ee) = (0.0f64, 0.0f64, 0.0f64);
                for r in 0..x.rows() {
                    let e = fit.residuals[(r, eq)];
                    dot += x[(r, j)] * e;
                    xx += x[(r, j)] * x[(r, j)];
                    ee += e * e;
                }
                ensure(
                    dot.abs() <= 1e-9 * (xx * ee).sqrt(),
                    format!("orthogonality case {case}"),
                )?;
            }
        }
        counts[0] += 1;

        // R^2 bounds
        ensure(
            fit.equations
                .iter()
                .all(|e| (0.0..=1.0).contains(&e.r_squared) && e.adj_r_squared <= e.r_squared),
            format!("R2 case {case}"),
        )?;
        counts[1] += 1;

        // correlation PSD
        let corr = correlation_matrix(&panel).unwrap();
        ensure(
            min_symmetric_eigenvalue(&corr) >= -1e-12,
            format!("PSD case {case}"),
        )?;
        counts[2] += 1;

        // zero-sum P&L
        let c = CdsContract {
            spread_bp: 2000.0 * s.uniform(),
            recovery_rate: s.uniform(),
            ..contract(0.0)
        };
        let paid = (s.next_u64() % 21) as usize;
        let event = s.next_u64().is_multiple_of(2);
        let pnl = pnl_at_resolution(&c, event, paid).map_err(|e| e.to_string())?;
        ensure(
            pnl.buyer + pnl.seller == 0.0,
            format!("zero-sum case {case}"),
        )?;
        counts[3] += 1;

        // Cholesky reconstruction
        let n = 1 + (s.next_u64() % 6) as usize;
        let b = Matrix::from_fn(n, n, |_, _| s.standard_normal());
        let spd = Matrix::from_fn(n, n, |i, j| {
            (0..n).map(|l| b[(i, l)] * b[(j, l)]).sum::<f64>() + if i == j { 0.1 } else { 0.0 }
        });
        let l = cholesky(&spd).map_err(|e| e.to_string())?;
        let llt = l.matmul(&l.transpose()).unwrap();
        let err = Matrix::from_fn(n, n, |i, j| llt[(i, j)] - spd[(i, j)]).max_abs();
        ensure(
            err <= 1e-12 * (1.0 + spd.max_abs()),
            format!("Cholesky case {case}"),
        )?;
        counts[4] += 1;

        // scale equivariance with invariant t-statistics
        let which = (s.next_u64() % k as u64) as usize;
        let factor = 10f64.powf(6.0 * s.uniform() - 3.0);
        let scaled = fit_var(
            &panel.scale_column(spec.variables[which], factor).unwrap(),
            &spec,
        )
        .unwrap();
        let (kk, m) = fit.coefficients.shape();
        for eq in 0..kk {
            let c_eq = if eq == which { factor } else { 1.0 };
            for j in 0..m {
                let c_reg = if j == 0 || (j - 1) / p != which {
                    1.0
                } else {
                    factor
                };
                let want = fit.coefficients[(eq, j)] * c_eq / c_reg;
                let got = scaled.coefficients[(eq, j)];
                ensure(
                    (got - want).abs() <= 1e-8 * (1.0 + want.abs()),
                    format!("scale coef case {case}"),
                )?;
                let (ta, tb) = (fit.t_statistics[(eq, j)], scaled.t_statistics[(eq, j)]);
                ensure(
                    (ta - tb).abs() <= 1e-7 * (1.0 + ta.abs()),
                    format!("scale t case {case}"),
                )?;
            }
        }
        counts[5] += 1;
    }
    Ok(format!(
        "orthogonality {}, R2 {}, PSD {}, zero-sum {}, Cholesky {}, scale {} cases",
        counts[0], counts[1], counts[2], counts[3], counts[4], counts[5]
    ))
}

fn report(n: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    match res {
        Ok(detail) => {
            println!("criterion {n:>2} PASS  {name}: {detail}");
            true
        }
        Err(why) => {
            println!("criterion {n:>2} FAIL  {name}: {why}");
            false
        }
    }
}

fn main() -> ExitCode {
    let batch = catch_unwind(default_batch_run).ok();
    let with_batch = |f: fn(&cdsvar::report::StudyOutcome) -> Outcome| {
        let b = batch.as_ref();
        move || b.map_or_else(|| Err("default batch study failed".into()), f)
    };
    let results = [
        report(1, "CDS arithmetic", c1_cds),
        report(2, "OLS oracle", c2_ols_oracle),
        report(3, "VAR recovery", c3_var_recovery),
        report(4, "Granger size and power", c4_granger),
        report(5, "IRF analytic", c5_irf),
        report(6, "unit-root Monte Carlo", c6_unit_root),
        report(7, "table pattern", with_batch(c7_table_pattern)),
        report(8, "sign pattern", with_batch(c8_sign_pattern)),
        report(9, "determinism", c9_determinism),
        report(10, "invariant suite", c10_invariants),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
