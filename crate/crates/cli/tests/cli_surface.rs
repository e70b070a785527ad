//! End-to-end checks of the command-line surface: subcommands, file outputs,
//! determinism and exit codes.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cubic-splitting"))
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("small.toml");
    std::fs::write(
        &p,
        r#"
gamma_cut = 6.0
kmax = 40
zeta_min = 4.0
zeta_max = 10.0
zeta_step = 0.01
torus_resolution = 64
estimate_eps = [1e-6]

[field]
r0 = "1"
r1 = "-1"
r2 = "0"
a0 = "0"
a1 = "0"
a2 = "1"
"#,
    )
    .unwrap();
    p
}

#[test]
fn koch_json_output() {
    let out = bin().args(["koch", "--json"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["T"], serde_json::json!([[1, 0, 1], [1, 0, 0], [0, 1, 0]]));
    assert_eq!(v["U"], serde_json::json!([[0, 0, 1], [1, 0, -1], [0, 1, 0]]));
    assert_eq!(v["lambda"]["coords"], serde_json::json!(["1", "0", "1"]));
    assert!((v["phi"].as_f64().unwrap() - 0.590935).abs() < 1e-5);
    assert!(v["phi_quotients"]
        .as_array()
        .unwrap()
        .starts_with(&[0.into(), 1.into(), 1.into(), 2.into(), 4.into(), 78.into()]));
}

#[test]
fn primitives_table_header() {
    let out = bin()
        .args(["primitives", "--gamma-cut", "6"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "q1,q2,k0_1,k0_2,k0_3,essential,r_q,gamma_minus,gamma_star,gamma_plus,gamma_tilde"
    );
    // the primary row (0,1) -> k0 = (0,0,1) is present
    assert!(text.lines().any(|l| l.starts_with("0,1,0,0,1,true")));
}

#[test]
fn analyze_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    for out in [&out1, &out2] {
        let st = bin()
            .args(["analyze", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    }
    for name in [
        "koch.json",
        "constants.json",
        "primitives.csv",
        "scatter.csv",
        "scan.json",
        "h1.csv",
        "upsilon.csv",
        "estimates.json",
        "manifest.json",
        "plot.py",
    ] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
        assert!(!a.is_empty(), "{name} is empty");
    }
    // h1.csv carries the documented header
    let h1 = std::fs::read_to_string(out1.join("h1.csv")).unwrap();
    assert!(h1.starts_with(
        "zeta,eps,F1,F1_bar,h2,S1_q1,S1_q2,S1_n,is_corner,S2_q1,S2_q2,S2_n,valid"
    ));
    let ups = std::fs::read_to_string(out1.join("upsilon.csv")).unwrap();
    assert!(ups.starts_with("x,y,value,region_n"));
}

#[test]
fn estimate_json_fields() {
    let out = bin()
        .args(["estimate", "--eps", "1e-6", "--mu", "1e-24"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in [
        "estimate",
        "log_estimate",
        "eta21",
        "near_corner",
        "r_condition_met",
        "h1",
        "h2",
    ] {
        assert!(v.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(v["r_exponent"].as_f64().unwrap(), 4.0);
}

#[test]
fn delta0_verify_passes() {
    let out = bin()
        .args(["verify", "--preset", "cubic-golden-delta0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"));
    assert!(text.contains("not applicable"));
}

#[test]
fn invalid_field_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    // x³ = −1 + 3x is totally real: rejected with exit code 2
    std::fs::write(
        &p,
        "[field]\nr0 = \"-1\"\nr1 = \"3\"\nr2 = \"0\"\na0 = \"0\"\na1 = \"0\"\na2 = \"1\"\n",
    )
    .unwrap();
    let out = bin().args(["koch", "--config"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("discriminant"));
}

#[test]
fn unknown_preset_exits_2() {
    let out = bin().args(["koch", "--preset", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_writes_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scatter.csv");
    let out = bin()
        .args(["scan", "--kmax", "20", "--scatter"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("ln_norm,neg_ln_divisor,sequence_id,is_primary,n"));
    assert!(text.lines().count() > 10);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["unclassified"], 0);
}
