//! End-to-end study runs on simulated thirteen-firm batches.

use std::collections::BTreeMap;

use cdsvar::causality::cap_weights;
use cdsvar::report::{run_study_on, Model, RunSummary, StudyConfig, StudyData, StudyOutcome};
use cdsvar::simulator::{paper_shaped_batch, BatchConfig, PAPER_ENTITIES};
use cdsvar::Variable;

fn run(cfg_batch: &BatchConfig) -> StudyOutcome {
    let batch = paper_shaped_batch(cfg_batch).unwrap();
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

fn whole(outcome: &StudyOutcome, model: Model) -> &RunSummary {
    outcome
        .runs
        .iter()
        .find(|r| r.model == model && r.period.label == "whole")
        .unwrap()
}

fn total(r: &RunSummary, cause: Variable, effect: Variable) -> usize {
    r.causality.as_ref().unwrap().total(cause, effect).unwrap()
}

#[test]
fn market_cap_weights_match_firm_table() {
    // percentage column of the firm-characteristics table
    let pct = [
        3.61, 15.28, 13.40, 3.37, 6.82, 5.44, 9.19, 2.74, 0.60, 4.46, 11.73, 1.51, 21.83,
    ];
    let caps: Vec<f64> = PAPER_ENTITIES.iter().map(|e| e.market_cap).collect();
    let w = cap_weights(&caps).unwrap();
    for (i, (&a, &b)) in w.iter().zip(&pct).enumerate() {
        assert!(
            (100.0 * a - b).abs() <= 0.01,
            "{} {} vs {b}",
            PAPER_ENTITIES[i].id,
            100.0 * a
        );
    }
    let sum: f64 = caps.iter().sum();
    assert!((sum - 595_115_228_290.80).abs() < 1.0);
}

#[test]
fn configured_causal_pattern_is_recovered() {
    for seed in [2008, 1, 2, 3] {
        let outcome = run(&BatchConfig {
            seed,
            ..BatchConfig::default()
        });
        let r = whole(&outcome, Model::Var1);
        let rs_dcds = total(r, Variable::Rs, Variable::Dcds);
        assert!((10..=12).contains(&rs_dcds), "seed {seed}: {rs_dcds}");
        let dcds_dbond = total(r, Variable::Dcds, Variable::Dbond);
        assert!((7..=9).contains(&dcds_dbond), "seed {seed}: {dcds_dbond}");
        for (c, e) in [
            (Variable::Dbond, Variable::Rs),
            (Variable::Rs, Variable::Dbond),
            (Variable::Dcds, Variable::Rs),
        ] {
            assert!(total(r, c, e) <= 4, "seed {seed}: {c}->{e}");
        }
    }
}

#[test]
fn uncoupled_batch_rejects_at_nominal_rate() {
    let mut hits = 0;
    let mut tests = 0;
    for seed in [11, 12, 13] {
        let outcome = run(&BatchConfig {
            seed,
            coupling: 0.0,
            ..BatchConfig::default()
        });
        let t = whole(&outcome, Model::Var1).causality.as_ref().unwrap();
        hits += t.totals.iter().sum::<usize>();
        tests += t.totals.len() * t.rows.len();
    }
    let rate = hits as f64 / tests as f64;
    assert!((0.01..=0.12).contains(&rate), "{rate}");
}

#[test]
fn sign_pattern_and_response_decay() {
    let outcome = run(&BatchConfig::default());
    let r = whole(&outcome, Model::Var1);
    let corr = r.mean_correlation.as_ref().unwrap();
    // (RS, DBOND, DCDS)
    assert!(corr[(0, 2)] < 0.0);
    assert!(corr[(1, 2)] > 0.0);
    let irf = r.irf.as_ref().unwrap();
    // a negative share shock is the negated RS-shock path
    let path: Vec<f64> = irf
        .path(Variable::Dcds, Variable::Rs)
        .unwrap()
        .iter()
        .map(|x| -x)
        .collect();
    let peak = path.iter().cloned().fold(f64::MIN, f64::max);
    assert!(peak > 0.0 && path[0] > 0.0);
    let peak_h = path.iter().position(|&x| x == peak).unwrap();
    assert!(path[7..].iter().all(|x| x.abs() < 0.1 * peak), "{path:?}");
    assert!(peak_h < 7);
}

#[test]
fn entity_without_bond_data_skipped_only_in_var1() {
    let outcome = run(&BatchConfig {
        without_bond: vec!["SW".into()],
        ..BatchConfig::default()
    });
    for r in &outcome.runs {
        let listed = r.entities.iter().any(|e| e == "SW");
        let skipped = r.skipped.iter().any(|(e, _)| e == "SW");
        match r.model {
            Model::Var1 => assert!(!listed && skipped, "{} {}", r.model.name(), r.period.label),
            Model::Var2 => assert!(listed && !skipped),
        }
    }
    let runs = outcome.manifest["runs"].as_array().unwrap();
    let var1 = runs.iter().find(|r| r["model"] == "VAR1").unwrap();
    assert!(var1["skipped"].to_string().contains("SW"));
}
