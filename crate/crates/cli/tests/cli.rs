use std::path::PathBuf;
use std::process::{Command, Output};

fn isosine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isosine")).args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn write(name: &str, text: &str) -> String {
    let p = tmp(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

const CROSS: &str = "# dim=3\n1,0,0,0.5\n-1,0,0,0.5\n0,1,0,0.5\n0,-1,0,0.5\n0,0,1,0.5\n0,0,-1,0.5\n";

#[test]
fn constants_at_three() {
    let o = isosine(&["constants", "--n", "3"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let gamma: f64 = text.split("gamma=").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    let alpha: f64 = text.split("alpha=").nth(1).unwrap().trim().parse().unwrap();
    assert!((gamma - 3.0 * std::f64::consts::PI / 4.0).abs() < 1e-12);
    assert!((alpha - 192.0 / 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn verify_writes_schema_v1_and_exit_zero() {
    let out = tmp("constants.json");
    let o = isosine(&["verify", "constants", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schemaVersion"], 1);
    assert_eq!(v["suiteName"], "constants");
    assert_eq!(v["pass"], true);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(v["checks"][0].get("errorBar").is_some());
}

#[test]
fn failing_check_gives_exit_one() {
    // a tolerance scale this small makes the asymptotic band too narrow
    let o = isosine(&["verify", "thm4-4", "--nmax", "20", "--tol-scale", "1e-6", "--out", tmp("tight.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));
}

#[test]
fn malformed_measure_gives_exit_two_with_line() {
    let bad = write("bad.csv", "# dim=3\n1,0,0,1\n0,1,0,oops\n");
    let o = isosine(&["verify", "thm1", "--n", "3", "--measure", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&o.stderr));
    let o = isosine(&["verify", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    let o = isosine(&["verify", "thm1", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_reproducible() {
    let run = |name: &str| {
        let p = tmp(name);
        let o = isosine(&["verify", "thm2", "--n", "3", "--measures", "3", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn volume_and_transform_of_cross() {
    let m = write("cross.csv", CROSS);
    let o = isosine(&["volume", "--measure", &m, "--resolution", "16", "--samples", "20000"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let pv = v["polarVolume"]["value"].as_f64().unwrap();
    assert!(pv > 0.2850 && pv < 0.4036, "{pv}");
    let o = isosine(&["transform", "--measure", &m, "--at", "0,0,1", "--at", "1,0,0"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for line in text.lines() {
        let last: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((last - 2.0).abs() < 1e-12, "{line}");
    }
    let o = isosine(&["transform", "--measure", &m, "--kernel", "cosine", "--at", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn position_a_box() {
    let p = write(
        "box.csv",
        "# dim=3\n1,0,0,0.5\n-1,0,0,0.5\n0,1,0,2\n0,-1,0,2\n0,0,1,1\n0,0,-1,1\n",
    );
    let out = tmp("boxed.csv");
    let o = isosine(&["position", "--polytope", &p, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    let areas: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert!(areas.iter().all(|a| (a - 1.0).abs() < 1e-6), "{areas:?}");
}
