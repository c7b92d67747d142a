use std::fs;
use std::process::Command;

fn lcslab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lcslab"))
}

fn json_lines(out: &[u8]) -> Vec<serde_json::Value> {
    std::str::from_utf8(out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn decompose_emits_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = (dir.path().join("x"), dir.path().join("y"));
    fs::write(&x, "1 2 3 4 5 6\n").unwrap();
    fs::write(&y, "1,2,3,4,5,6").unwrap();
    let out = lcslab().args(["decompose", "--v", "2", "--x"]).arg(&x).arg("--y").arg(&y).output().unwrap();
    assert!(out.status.success());
    let v = json_lines(&out.stdout);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0]["breakpoints"], serde_json::json!([0, 2, 4, 6]));
    assert_eq!(v[0]["block_scores"], serde_json::json!([2, 2, 2]));
    assert_eq!(v[0]["optimal"], true);

    let bad = lcslab().args(["decompose", "--v", "4", "--x"]).arg(&x).arg("--y").arg(&y).output().unwrap();
    assert!(!bad.status.success());
}

#[test]
fn simulate_then_distfit_and_twfit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let rec = dir.path().join("lis.jsonl");
    let summary = dir.path().join("lis.csv");
    let table = dir.path().join("tw.csv");
    fs::write(
        &cfg,
        format!(
            r#"{{"schema":1,"kind":"tw_permutations","n_values":[50,100],"reps":200,"output_path":{:?}}}"#,
            rec
        ),
    )
    .unwrap();
    let out = lcslab().args(["simulate", "--config"]).arg(&cfg).arg("--summary").arg(&summary).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&summary).unwrap();
    assert!(csv.starts_with("n,count,mean,variance,m1,m2,m3,m4,d_k,d_w\n"));
    assert_eq!(csv.lines().count(), 3);

    let out = lcslab().args(["distfit", "--ref", "tw2", "--records"]).arg(&rec).output().unwrap();
    assert!(out.status.success());
    let rows = json_lines(&out.stdout);
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["d_k"].as_f64().unwrap() < 0.5);

    let out = lcslab().args(["twfit", "--records"]).arg(&rec).arg("--table").arg(&table).output().unwrap();
    assert!(out.status.success());
    assert_eq!(json_lines(&out.stdout).len(), 2);
    let t = fs::read_to_string(&table).unwrap();
    assert!(t.starts_with("t,F2,density,err\n"));
    assert_eq!(t.lines().count(), 1602);
}

#[test]
fn simulate_resume_and_force_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let rec = dir.path().join("r.jsonl");
    fs::write(
        &cfg,
        r#"{"schema":1,"kind":"clt_words","dist":{"biased_binary":0.95},"n_values":[20],"reps":30}"#,
    )
    .unwrap();
    let refused = lcslab().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&rec).output().unwrap();
    assert!(!refused.status.success());
    let ok = lcslab().args(["simulate", "--force", "--config"]).arg(&cfg).arg("--out").arg(&rec).output().unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let first = String::from_utf8(ok.stdout).unwrap();
    let again = lcslab().args(["simulate", "--force", "--resume", "--config"]).arg(&cfg).arg("--out").arg(&rec).output().unwrap();
    assert!(again.status.success());
    assert_eq!(first, String::from_utf8(again.stdout).unwrap());
}

#[test]
fn gamma_and_stein_commands() {
    let out = lcslab().args(["gamma", "--m", "2", "--n", "200", "--reps", "50"]).output().unwrap();
    assert!(out.status.success());
    let v = &json_lines(&out.stdout)[0];
    let g = v["gamma_hat"].as_f64().unwrap();
    assert!(g > 0.7 && g < 0.9, "{v}");

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("stein.json");
    fs::write(&cfg, r#"{"schema":1,"kind":"stein_probe","dist":{"uniform":2},"n_values":[8,16],"reps":300}"#).unwrap();
    let out = lcslab().args(["stein", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = json_lines(&out.stdout);
    assert_eq!(rows.len(), 2);
    for key in ["sigma2", "varT", "addend1", "addend2", "rhs", "se"] {
        assert!(rows[0][key].is_number(), "{key}");
    }
}
