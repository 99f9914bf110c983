use hdivsym::analysis::{convergence_study, solve_problem, LoadSpec, MeshSpec, ProblemConfig, StudyConfig};

#[test]
fn study_config_defaults_and_validation() {
    let c: StudyConfig = serde_json::from_str(r#"{"n": 2, "k": 3, "resolutions": [1, 2]}"#).unwrap();
    assert_eq!((c.mu, c.lambda, c.rate_slack), (1.0, 1.0, 0.3));
    assert!(c.lambda_sweep.is_empty());
    c.validate().unwrap();

    assert!(StudyConfig::new(2, 3, vec![2, 2]).validate().is_err());
    assert!(StudyConfig::new(2, 3, vec![]).validate().is_err());
    assert!(StudyConfig { mu: 0.0, ..StudyConfig::new(2, 3, vec![1]) }.validate().is_err());
    assert!(serde_json::from_str::<StudyConfig>(r#"{"n": 2, "k": 3, "resolutions": [1], "extra": 0}"#).is_err());
}

#[test]
fn sweep_entries_follow_the_finest_level() {
    let config = StudyConfig { lambda_sweep: vec![0.0, 50.0], ..StudyConfig::new(2, 3, vec![1, 2]) };
    let report = convergence_study(&config).unwrap();
    assert_eq!(report.lambda_sweep.len(), 2);
    assert!(report.lambda_sweep.iter().all(|e| e.m == 2));
    // the lambda = 1 study itself is unaffected by the sweep
    let plain = convergence_study(&StudyConfig::new(2, 3, vec![1, 2])).unwrap();
    assert_eq!(plain.rows.last().unwrap().e_u_l2, report.rows.last().unwrap().e_u_l2);
}

#[test]
fn problem_round_trips_through_json() {
    let text = r#"{
        "n": 2, "k": 3,
        "material": {"mu": 2.0, "lambda": 0.5},
        "mesh": {"inline": {"points": [[0,0],[1,0],[0,1],[1,1]], "cells": [[0,1,3],[0,2,3]]}},
        "load": {"manufactured": {"seed": 4}}
    }"#;
    let p: ProblemConfig = serde_json::from_str(text).unwrap();
    assert!(matches!(p.mesh, MeshSpec::Inline(_)));
    assert!(matches!(p.load, LoadSpec::Manufactured { seed: 4 }));
    let again: ProblemConfig = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(again, p);

    let out = solve_problem(&p).unwrap();
    assert!(out.residual < 1e-9);
    assert!(out.errors.is_some());
    assert_eq!(out.samples.len(), 2 * 4);
}
