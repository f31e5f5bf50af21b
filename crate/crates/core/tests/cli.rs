use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn speclab<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_speclab"))
        .args(args)
        .env_remove("SPECLAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn check_reports_condition() {
    let out = speclab([
        "check".as_ref(),
        data("t_stable.json").as_os_str(),
        "--condition".as_ref(),
        "t-stable".as_ref(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "holds");
    assert_eq!(v["pair"][0], "A");

    let out = speclab([
        "check".as_ref(),
        data("nilpotent_span.json").as_os_str(),
        "--condition".as_ref(),
        "submultiplicative".as_ref(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "fails");
}

#[test]
fn text_format() {
    let out = speclab([
        "--format".as_ref(),
        "text".as_ref(),
        "check".as_ref(),
        data("t_stable.json").as_os_str(),
        "--condition".as_ref(),
        "t-stable".as_ref(),
    ]);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "t-stable: holds for (A, B)"
    );
}

#[test]
fn closure_dimensions() {
    let out = speclab(["closure".as_ref(), data("nilpotent_span.json").as_os_str()]);
    let v = json(&out);
    assert_eq!(v["dim"], 9);
    assert_eq!(v["full"], true);
    let out = speclab([
        "closure".as_ref(),
        data("nilpotent_span.json").as_os_str(),
        "--kind".as_ref(),
        "lie".as_ref(),
    ]);
    assert_eq!(json(&out)["dim"], 8);
}

#[test]
fn triangularize_and_verdict() {
    let out = speclab(["triangularize".as_ref(), data("triangularizable.json").as_os_str()]);
    assert_eq!(out.status.code(), Some(0));
    let out = speclab(["triangularize".as_ref(), data("nilpotent_span.json").as_os_str()]);
    assert_eq!(out.status.code(), Some(1));

    for file in [
        "nilpotent_span.json",
        "t_stable.json",
        "triangularizable.json",
        "irreducible2.json",
        "block_reducible.json",
    ] {
        for kind in ["lie", "jordan"] {
            let out = speclab([
                "verdict".as_ref(),
                data(file).as_os_str(),
                "--kind".as_ref(),
                kind.as_ref(),
            ]);
            let v = json(&out);
            assert_eq!(v["hard_inconsistency"], false, "{file} {kind}");
        }
    }
}

#[test]
fn out_file_and_seed_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = Command::new(env!("CARGO_BIN_EXE_speclab"))
        .args(["campaign", "--suite", "traces", "--trials", "5", "--out"])
        .arg(&path)
        .env("SPECLAB_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["config"]["seed"], 11);
    assert_eq!(v["summary"]["trials"], 5);
}

#[test]
fn lambda_map_csv() {
    let out = speclab([
        "lambda-map".as_ref(),
        data("t_stable.json").as_os_str(),
        "--grid".as_ref(),
        "-1,1,-1,1".as_ref(),
        "--resolution".as_ref(),
        "3x2".as_ref(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "re,im,spectral_radius");
    assert_eq!(lines.len(), 7);
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(speclab(["--help"]).status.code(), Some(0));
    assert_eq!(speclab(["verdict"]).status.code(), Some(2));
    let out = speclab(["check", "/nonexistent/set.json", "--condition", "sublinear"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/set.json"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"version\": 1,\n\"dim\": 2,\n\"matrices\": [}").unwrap();
    let out = speclab(["closure".as_ref(), bad.as_os_str()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}
