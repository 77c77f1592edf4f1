use modsym_lab::cuspform::eta_expansion_11;
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modsym-lab"))
        .current_dir(dir)
        .env("MODSYM_CACHE_DIR", dir.join("cache"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report(dir: &Path, name: &str) -> Value {
    let text = std::fs::read_to_string(dir.join("out").join(format!("{name}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn enumerate_prints_the_count_and_reuses_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(dir.path(), &["enumerate", "--T", "200", "--output-dir", "out"]);
    assert!(first.status.success(), "{first:?}");
    let line = stdout(&first);
    assert!(line.contains("cosets=576") && line.contains("cache=miss"), "{line}");
    let second = run(dir.path(), &["enumerate", "--T", "200", "--output-dir", "out"]);
    assert!(stdout(&second).contains("cache=hit"));
    assert_eq!(report(dir.path(), "enumerate")["result"]["cosets"], 576);
}

#[test]
fn configuration_problems_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = run(dir.path(), &["--config", "nope.json", "enumerate"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad = run(dir.path(), &["enumerate", "--gamma1", "1,2,3"]);
    assert_eq!(bad.status.code(), Some(2));
    std::fs::write(dir.path().join("c.json"), r#"{"level": 11, "colour": 3}"#).unwrap();
    let unknown = run(dir.path(), &["--config", "c.json", "enumerate"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn eisenstein_reports_value_and_tail() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["eisenstein", "--z", "0,2", "--s", "3,0", "--T", "200", "--output-dir", "out"]);
    assert!(o.status.success(), "{o:?}");
    let r = report(dir.path(), "eisenstein");
    assert_eq!(r["result"]["value"]["terms"], 576);
    assert_eq!(r["result"]["tail_estimate_kind"], "heuristic");
    let v = r["result"]["value"]["value"][0].as_f64().unwrap();
    assert!(v > 1.0 && v.is_finite());
    let domain = run(dir.path(), &["eisenstein", "--s", "1,0", "--T", "200", "--output-dir", "out"]);
    assert_eq!(domain.status.code(), Some(3));
}

#[test]
fn moments_report_has_the_fit_fields() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["moments", "--m", "1", "--n", "0", "--Tgrid", "100,200,300,400", "--output-dir", "out"]);
    assert!(o.status.success(), "{o:?}");
    let fit = &report(dir.path(), "moments")["result"]["fit"];
    for key in ["model", "leading_coeff", "paper_coeff", "rel_dev", "sign_match", "T_grid", "residuals", "meta"] {
        assert!(fit.get(key).is_some(), "missing {key}");
    }
    assert_eq!(fit["meta"]["m"], 1);
}

#[test]
fn distribution_writes_a_small_svg_and_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["distribution", "--svg", "--csv", "--Tgrid", "200,400", "--output-dir", "out"];
    assert!(run(dir.path(), &args).status.success());
    let first = std::fs::read(dir.path().join("out/distribution.json")).unwrap();
    let svg = std::fs::read_to_string(dir.path().join("out/distribution_T400.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.len() <= 50 * 1024);
    let csv = std::fs::read_to_string(dir.path().join("out/distribution_T400.csv")).unwrap();
    assert!(csv.starts_with("a,b,c,d,norm,x,y"));
    assert!(run(dir.path(), &args).status.success());
    assert_eq!(std::fs::read(dir.path().join("out/distribution.json")).unwrap(), first);
}

#[test]
fn quick_verification_passes_and_tampered_coefficients_fail() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--quick", "--output-dir", "out"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = report(dir.path(), "verify");
    assert_eq!(v["result"]["hard_failures"], 0);

    let text = eta_expansion_11(2000).unwrap().to_text().replace("\n5 1\n", "\n5 11\n");
    std::fs::write(dir.path().join("tampered.txt"), text).unwrap();
    let bad = run(dir.path(), &["verify", "--quick", "--coeff-file", "tampered.txt", "--output-dir", "out2"]);
    assert_eq!(bad.status.code(), Some(1), "{}", stdout(&bad));
}
