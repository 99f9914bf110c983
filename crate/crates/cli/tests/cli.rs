use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hdivsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdivsym")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn verify_passes_in_two_dimensions() {
    let o = hdivsym(&["verify", "--dim", "2", "--degree", "3", "--exact-cross-checks"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let claims = report["claims"].as_array().unwrap();
    assert_eq!(claims.len(), 5);
    assert!(claims.iter().all(|c| c["passed"] == true));
}

#[test]
fn verify_reports_divergence_rank_in_three_dimensions() {
    let o = hdivsym(&["verify", "--dim", "3", "--degree", "4", "--simplices", "2"]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let range = report["claims"].as_array().unwrap().iter().find(|c| c["name"] == "div_bubble_range").unwrap().clone();
    assert_eq!(range["measured"]["worst"]["rank"], 54);
}

#[test]
fn invalid_degree_is_a_configuration_error() {
    assert_eq!(code(&hdivsym(&["verify", "--dim", "2", "--degree", "1"])), 2);
    assert_eq!(code(&hdivsym(&["verify", "--dim", "2"])), 2);
    assert_eq!(code(&hdivsym(&["convergence", "--dim", "2", "--degree", "3", "--mu", "-1"])), 2);
    assert_eq!(code(&hdivsym(&["bogus"])), 2);
}

#[test]
fn convergence_writes_csv_json_and_dat() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let o = hdivsym(&["convergence", "--dim", "2", "--degree", "3", "--levels", "3", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "m,h,e_sigma_l2,e_sigma_div,e_sigma_hdiv,e_u_l2,rate_hdiv,rate_u,rate_sigma_l2,beta");
    assert_eq!(lines.count(), 3);
    let report = read_json(&dir.path().join("conv.json"));
    assert_eq!(report["passed"], true);
    assert_eq!(report["config"]["seed"], 7);
    assert!(std::fs::read_to_string(dir.path().join("conv.dat")).unwrap().starts_with("# m h"));
}

#[test]
fn convergence_in_one_dimension_goes_to_stdout() {
    let o = hdivsym(&["convergence", "--dim", "1", "--degree", "2", "--levels", "5"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let last = text.lines().last().unwrap();
    let rate: f64 = last.split(',').nth(6).unwrap().parse().unwrap();
    assert!((rate - 2.0).abs() < 0.3, "{rate}");
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = hdivsym(&[
            "convergence",
            "--dim",
            "2",
            "--degree",
            "3",
            "--resolutions",
            "2,4",
            "--beta",
            "--deterministic-reduction",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        (std::fs::read(&out).unwrap(), std::fs::read(out.with_extension("json")).unwrap())
    };
    let (a_csv, a_json) = run("a.csv");
    let (b_csv, b_json) = run("b.csv");
    assert_eq!(a_csv, b_csv);
    // the config echo differs only in the output path
    let strip = |bytes: Vec<u8>| {
        let mut v: Value = serde_json::from_slice(&bytes).unwrap();
        v["config"].as_object_mut().unwrap().remove("out");
        v
    };
    assert_eq!(strip(a_json), strip(b_json));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"dim": 2, "degree": 3, "levels": 2, "seed": 3}"#).unwrap();
    let o = hdivsym(&["infsup", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 3);
    std::fs::write(&cfg, r#"{"dim": 2, "degre": 3}"#).unwrap();
    assert_eq!(code(&hdivsym(&["infsup", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn infsup_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("beta.csv");
    let o = hdivsym(&["infsup", "--dim", "2", "--degree", "3", "--levels", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let report = read_json(&out.with_extension("json"));
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["beta"].as_f64().unwrap() > 1e-4));
    assert!(report["ratio"].as_f64().unwrap() < 2.0);

    let o = hdivsym(&["infsup", "--dim", "3", "--degree", "4", "--levels", "1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let beta: f64 = text.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap();
    assert!(beta > 0.0);
}

#[test]
fn low_degree_infsup_is_informational() {
    assert_eq!(code(&hdivsym(&["infsup", "--dim", "2", "--degree", "2"])), 2);
    let o = hdivsym(&["infsup", "--dim", "2", "--degree", "2", "--allow-low-degree", "--levels", "2", "--floor", "10"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("informational"));
}

fn write_problem(dir: &Path, body: &str) -> String {
    let p = dir.join("problem.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_zero_load_gives_zero_solution() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        dir.path(),
        r#"{"n": 2, "k": 3, "material": {"mu": 1.0, "lambda": 1.0}, "mesh": {"kuhn": {"m": 2}},
           "load": {"polynomial": {"f": [{"n": 2, "terms": []}, {"n": 2, "terms": []}]}}}"#,
    );
    let out = dir.path().join("sol.json");
    let mmdir = dir.path().join("mm");
    let mesh = dir.path().join("mesh.json");
    let o = hdivsym(&[
        "solve",
        &p,
        "--out",
        out.to_str().unwrap(),
        "--mesh-out",
        mesh.to_str().unwrap(),
        "--matrices-out",
        mmdir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let sol = read_json(&out);
    assert_eq!(sol["sigma"].as_array().unwrap().len(), 163);
    assert!(sol["sigma"].as_array().unwrap().iter().chain(sol["u"].as_array().unwrap()).all(|v| v == 0.0));
    assert_eq!(sol["dofmap"]["num_stress"], 163);
    assert_eq!(read_json(&mesh)["cells"].as_array().unwrap().len(), 8);
    let a = std::fs::read_to_string(mmdir.join("A.mtx")).unwrap();
    assert!(a.starts_with("%%MatrixMarket matrix coordinate real general\n163 163 "));
}

#[test]
fn solve_manufactured_matches_convergence_level() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(
        dir.path(),
        r#"{"n": 2, "k": 3, "material": {"mu": 1.0, "lambda": 1.0}, "mesh": {"kuhn": {"m": 2}},
           "load": {"manufactured": {"seed": 5}}}"#,
    );
    let o = hdivsym(&["solve", &p]);
    assert_eq!(code(&o), 0);
    let sol: Value = serde_json::from_slice(&o.stdout).unwrap();
    let e_solve = sol["errors"]["e_sigma_l2"].as_f64().unwrap();

    let out = dir.path().join("c.csv");
    let o = hdivsym(&["convergence", "--dim", "2", "--degree", "3", "--resolutions", "2", "--seed", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let e_conv = read_json(&out.with_extension("json"))["rows"][0]["e_sigma_l2"].as_f64().unwrap();
    assert!((e_solve - e_conv).abs() <= 1e-12 * e_conv, "{e_solve} vs {e_conv}");
}

#[test]
fn solve_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_problem(dir.path(), r#"{"n": 2, "k": 3, "material": {"mu": 1.0}"#);
    let o = hdivsym(&["solve", &p]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    let p = write_problem(
        dir.path(),
        r#"{"n": 2, "k": 3, "material": {"mu": 1.0, "lambda": 1.0}, "mesh": {"kuhn": {"m": 100000}},
           "load": {"manufactured": {"seed": 0}}}"#,
    );
    let o = hdivsym(&["solve", &p]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
    assert_eq!(code(&hdivsym(&["solve", "/nonexistent/problem.json"])), 2);
}

#[test]
fn thread_count_variable_is_validated() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_hdivsym"))
            .args(["verify", "--dim", "2", "--degree", "3", "--simplices", "2"])
            .env("HDIVSYM_THREADS", v)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("2")), 0);
    assert_eq!(code(&run("zero")), 2);
}

#[test]
fn lambda_sweep_is_reported_without_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = hdivsym(&[
        "convergence", "--dim", "2", "--degree", "3", "--resolutions", "2,4", "--lambda-sweep", "1,1e4", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reported only"));
    let report = read_json(&dir.path().join("sweep.json"));
    let sweep = report["lambda_sweep"].as_array().unwrap();
    assert_eq!(sweep.len(), 2);
    assert_eq!(sweep[1]["lambda"], 1e4);
    assert_eq!(sweep[1]["m"], 4);
    assert!(sweep[1]["errors"]["e_u_l2"].as_f64().unwrap().is_finite());
    assert!(sweep[1].get("passed").is_none());
}

#[test]
fn documented_example_problem_solves() {
    let problem = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/examples/problem.json");
    let o = hdivsym(&["solve", problem]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let run = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/examples/run.json");
    let parsed: Value = read_json(Path::new(run));
    assert_eq!(parsed["dim"], 2);
}

#[test]
fn unknown_problem_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let body = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/examples/problem.json"))
        .unwrap()
        .replace("\"k\": 3,", "\"k\": 3, \"bogus\": 1,");
    let path = write_problem(dir.path(), &body);
    let o = hdivsym(&["solve", &path]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}
