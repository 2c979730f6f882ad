//! End-to-end runs of the `gptkit` binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn gptkit(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gptkit"));
    cmd.args(args).env_remove("GPTKIT_SEED");
    cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr carries an error document")
}

fn temp_file(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("gptkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

const GBIT: &str = r#"{"kind":"polytopic","vertices":[[-1,-1,1],[-1,1,1],[1,1,1],[1,-1,1]],"u":[0,0,1]}"#;

#[test]
fn prbox_piped_into_chsh() {
    for format in ["text", "json"] {
        let table = stdout(&gptkit(&["prbox", "--variant", "000", "--format", format], None));
        let report = stdout(&gptkit(&["chsh", "--table", "-"], Some(&table)));
        assert!(report.contains("CHSH = 4\n"), "{report}");
        assert!(report.contains("classical: no\n"));
        assert!(report.contains("NS: yes\n"));
    }
    let json = stdout(&gptkit(&["prbox", "--variant", "110", "--format", "json"], None));
    let v: Value =
        serde_json::from_str(&stdout(&gptkit(&["chsh", "--table", "-", "--format", "json"], Some(&json))))
            .unwrap();
    assert_eq!(v["nonsignalling"], Value::Bool(true));
    assert_eq!(v["classical"], Value::Bool(false));
}

#[test]
fn chsh_csv_is_the_correlator_grid() {
    let table = stdout(&gptkit(&["prbox"], None));
    let csv = stdout(&gptkit(&["chsh", "--table", "-", "--format", "csv"], Some(&table)));
    assert_eq!(csv, "x,y,E\n0,0,1\n0,1,1\n1,0,1\n1,1,-1\n");
}

#[test]
fn tsirelson_reaches_the_bound() {
    let out = stdout(&gptkit(&["tsirelson", "--seed", "0", "--iters", "200", "--format", "json"], None));
    let v: Value = serde_json::from_str(&out).unwrap();
    let value = v["value"].as_f64().unwrap();
    let bound = 2.0 * 2f64.sqrt();
    assert!((value - bound).abs() <= 1e-6, "{value}");
    assert!(v["operator_norm"].as_f64().unwrap() <= bound + 1e-9);
}

#[test]
fn nspolytope_summary() {
    let out = stdout(&gptkit(&["nspolytope"], None));
    assert_eq!(out.lines().next(), Some("24 vertices: 16 deterministic, 8 PR-type"));
    assert_eq!(out.lines().filter(|l| l.contains("PR box")).count(), 8);
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &["tsirelson", "--seed", "7", "--iters", "50", "--format", "json"][..],
        &["bloch", "--op", "average", "--samples", "2000", "--seed", "3"][..],
        &["bloch", "--op", "rotation", "--samples", "50", "--format", "json"][..],
        &["nspolytope", "--format", "json"][..],
    ] {
        let a = gptkit(args, None);
        let b = gptkit(args, None);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn seed_env_var_sets_the_default() {
    let args = ["bloch", "--op", "average", "--samples", "500"];
    let run_env = |seed: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_gptkit")).args(args).env("GPTKIT_SEED", seed).output().unwrap();
        String::from_utf8(o.stdout).unwrap()
    };
    let default = stdout(&gptkit(&args, None));
    assert_eq!(run_env("0"), default);
    assert_ne!(run_env("5"), default);
    let explicit = stdout(&gptkit(&[&args[..], &["--seed", "5"]].concat(), None));
    assert_eq!(run_env("5"), explicit);
}

#[test]
fn compose_output_feeds_distinguish() {
    let g = temp_file("gbit.json", GBIT);
    let comp = stdout(&gptkit(&["compose", "--a", &g, "--b", &g, "--kind", "max", "--format", "json"], None));
    let doc: Value = serde_json::from_str(&comp).unwrap();
    assert_eq!(doc["kind"], "max");
    assert_eq!(doc["inequalities"].as_array().unwrap().len(), 16);
    let space = temp_file("gg.json", &comp);
    // Products of the diagonal pair with itself.
    let pair = [[-1.0, -1.0, 1.0], [1.0, 1.0, 1.0]];
    let products: Vec<Vec<f64>> = pair
        .iter()
        .flat_map(|a| pair.iter().map(move |b| a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()))
        .collect();
    let states = serde_json::to_string(&products).unwrap();
    let out = stdout(&gptkit(&["distinguish", "--space", &space, "--states", "-"], Some(&states)));
    assert!(out.starts_with("distinguishable: yes"), "{out}");

    let with_vertices = stdout(&gptkit(&["compose", "--a", &g, "--b", &g, "--kind", "max", "--vertices"], None));
    assert!(with_vertices.contains("vertices: 24\n"));
}

#[test]
fn distinguish_reports_none() {
    let g = temp_file("gbit2.json", GBIT);
    let triple = r#"{"states": [[-1,-1,1],[-1,1,1],[1,1,1]]}"#;
    assert_eq!(stdout(&gptkit(&["distinguish", "--space", &g, "--states", "-"], Some(triple))), "none\n");
}

#[test]
fn sorkin_with_and_without_blockers() {
    let s = 1.0 / 3f64.sqrt();
    let psi = format!("[[[{0},0],[{0},0],[{0},0]],[[{0},0],[{0},0],[{0},0]],[[{0},0],[{0},0],[{0},0]]]", s * s);
    let exp = temp_file("exp.json", &format!(r#"{{"rho":{psi},"Q":{psi},"M":3}}"#));
    let v: Value = serde_json::from_str(&stdout(&gptkit(&["sorkin", "--exp", &exp, "--format", "json"], None))).unwrap();
    assert!(v["I3"].as_f64().unwrap().abs() < 1e-12);
    // Blocker {1} rotated toward slit 2 by 0.1, the rest canonical projectors.
    let (cs, sn) = (0.1f64.cos(), 0.1f64.sin());
    let proj = |open: &[usize]| {
        let rows: Vec<String> = (1..=3)
            .map(|i| {
                let cells: Vec<String> = (1..=3)
                    .map(|j| if i == j && open.contains(&i) { "[1,0]".into() } else { "[0,0]".into() })
                    .collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    };
    let rotated = format!(
        "[[[{},0],[{},0],[0,0]],[[{},0],[{},0],[0,0]],[[0,0],[0,0],[0,0]]]",
        cs * cs, cs * sn, cs * sn, sn * sn
    );
    let mut entries = vec![format!(r#"{{"subset":[1],"kraus":[{rotated}]}}"#)];
    for subset in [&[2][..], &[3], &[1, 2], &[1, 3], &[2, 3], &[1, 2, 3]] {
        entries.push(format!(r#"{{"subset":{subset:?},"kraus":[{}]}}"#, proj(subset)));
    }
    let blockers = format!(r#"{{"blockers":[{}]}}"#, entries.join(","));
    let out = stdout(&gptkit(&["sorkin", "--exp", &exp, "--blockers", "-", "--format", "json"], Some(&blockers)));
    let v: Value = serde_json::from_str(&out).unwrap();
    let expected = ((cs + sn).powi(2) / 3.0).powi(2) - 1.0 / 9.0;
    assert!((v["I3_blocked"].as_f64().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn invalid_input_exits_with_one() {
    let unknown = gptkit(&["prbox", "--bogus"], None);
    assert_eq!(unknown.status.code(), Some(1));
    assert_eq!(error_json(&unknown)["error"]["kind"], "usage");

    let bad_variant = gptkit(&["prbox", "--variant", "012"], None);
    assert_eq!(bad_variant.status.code(), Some(1));

    let bad_table = gptkit(&["chsh", "--table", "-"], Some("{\"p\": [1, 2, 3]}"));
    assert_eq!(bad_table.status.code(), Some(1));
    assert_eq!(error_json(&bad_table)["error"]["kind"], "invalid_table");

    let missing = gptkit(&["chsh", "--table", "/nonexistent/table.json"], None);
    assert_eq!(missing.status.code(), Some(1));

    let two_stdin = gptkit(&["compose", "--a", "-", "--b", "-", "--kind", "min"], Some(GBIT));
    assert_eq!(two_stdin.status.code(), Some(1));

    let not_state = gptkit(&["bloch", "--op", "roundtrip", "--r", "1,1,1"], None);
    assert_eq!(not_state.status.code(), Some(1));
    assert_eq!(error_json(&not_state)["error"]["kind"], "not_a_state");
}

#[test]
fn scale_limit_exits_with_two() {
    let c5 = temp_file(
        "c5.json",
        r#"{"kind":"polytopic","vertices":[[1,0,0,0,0],[0,1,0,0,0],[0,0,1,0,0],[0,0,0,1,0],[0,0,0,0,1]],"u":[1,1,1,1,1]}"#,
    );
    let o = gptkit(&["compose", "--a", &c5, "--b", &c5, "--kind", "max", "--vertices"], None);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["kind"], "scale_limit");
}

#[test]
fn output_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("gptkit-out-{}.txt", std::process::id()));
    let p = path.to_string_lossy().into_owned();
    let o = gptkit(&["prbox", "--output", &p], None);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, stdout(&gptkit(&["prbox"], None)));
    std::fs::remove_file(path).unwrap();
}
