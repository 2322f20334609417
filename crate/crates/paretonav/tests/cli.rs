use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_paretonav"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("paretonav-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_points(name: &str, f: &[Vec<f64>]) -> PathBuf {
    let path = scratch(name);
    let points: Vec<Value> = f.iter().map(|f| json!({"f": f, "x": []})).collect();
    std::fs::write(&path, json!({ "points": points }).to_string()).unwrap();
    path
}

fn run(cmd: &mut Command) -> (Option<i32>, Value) {
    let Output { status, stdout, .. } = cmd.output().unwrap();
    let report = serde_json::from_slice(&stdout).unwrap_or(Value::Null);
    (status.code(), report)
}

fn unit(v: [f64; 3]) -> Vec<f64> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.iter().map(|x| x / n).collect()
}

#[test]
fn build_reports_sixteen_simplices_for_fifteen_points() {
    let mut f = Vec::new();
    for axis in 0..3 {
        let mut corner = vec![0.0; 3];
        corner[axis] = 1.0;
        f.push(corner);
        for t in 1..=3 {
            let angle = t as f64 * std::f64::consts::PI / 8.0;
            let mut p = vec![0.0; 3];
            p[axis] = angle.cos();
            p[(axis + 1) % 3] = angle.sin();
            f.push(p);
        }
    }
    f.extend([unit([2.0, 1.0, 1.0]), unit([1.0, 2.0, 1.0]), unit([1.0, 1.0, 2.0])]);
    let input = write_points("fifteen.json", &f);
    let mesh = scratch("fifteen-mesh.json");
    let (code, report) = run(bin().args(["build", "-i"]).arg(&input).arg("-o").arg(&mesh));
    assert_eq!(code, Some(0));
    assert_eq!(report["points"], 15);
    assert_eq!(report["simplices"], 16);
    let mesh: Value = serde_json::from_str(&std::fs::read_to_string(mesh).unwrap()).unwrap();
    assert_eq!(mesh["n"], 3);
    assert_eq!(mesh["simplices"].as_array().unwrap().len(), 16);
}

#[test]
fn minimal_set_gives_one_simplex() {
    let input = write_points("three.json", &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    let (code, report) = run(bin().args(["build", "-i"]).arg(&input).arg("-o").arg(scratch("three-mesh.json")));
    assert_eq!(code, Some(0));
    assert_eq!(report["simplices"], 1);
    assert_eq!(report["ideal"], json!([0.0, 0.0, 0.0]));
    assert_eq!(report["nadir"], json!([1.0, 1.0, 1.0]));
}

#[test]
fn validate_flags_dominated_points() {
    let clean = write_points("clean.json", &[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]);
    let (code, report) = run(bin().args(["validate", "-i"]).arg(&clean));
    assert_eq!(code, Some(0));
    assert_eq!(report["clean"], true);

    let dirty = scratch("dirty.csv");
    std::fs::write(&dirty, "f1,f2,x1\n1,0,0\n0,1,1\n1,1,2\n").unwrap();
    let (code, report) = run(bin().args(["validate", "-i"]).arg(&dirty));
    assert_eq!(code, Some(5));
    assert_eq!(report["dominated_pairs"], json!([[0, 2], [1, 2]]));
}

#[test]
fn failures_have_distinct_exit_codes() {
    let bad = scratch("bad.csv");
    std::fs::write(&bad, "f1,f2\n0,1\nabc,0\n").unwrap();
    let (code, _) = run(bin().args(["build", "-i"]).arg(&bad).arg("-o").arg(scratch("bad-mesh.json")));
    assert_eq!(code, Some(2));

    // Points that differ by a multiple of e project onto one site.
    let fold = write_points("fold.json", &[vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0], vec![2.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]);
    let (code, _) = run(bin().args(["build", "-i"]).arg(&fold).arg("-o").arg(scratch("fold-mesh.json")));
    assert_eq!(code, Some(3));

    let wide = scratch("wide.json");
    let (code, _) = run(bin()
        .args(["gen", "--kind", "random-concave", "-n", "11", "-K", "30", "-o"])
        .arg(&wide));
    assert_eq!(code, Some(0));
    let (code, _) = run(bin().args(["build", "-i"]).arg(&wide).arg("-o").arg(scratch("wide-mesh.json")));
    assert_eq!(code, Some(4));
}

#[test]
fn generated_six_objective_front_builds() {
    let input = scratch("six.json");
    let (code, _) = run(bin().args(["gen", "--kind", "random-concave", "-n", "6", "-K", "100", "--seed", "3", "-o"]).arg(&input));
    assert_eq!(code, Some(0));
    let (code, report) = run(bin().args(["build", "-i"]).arg(&input).arg("-o").arg(scratch("six-mesh.json")));
    assert_eq!(code, Some(0));
    assert_eq!(report["points"], 100);
    assert!(report["build_seconds"].as_f64().unwrap() < 10.0);
}

#[test]
fn generation_is_deterministic() {
    let a = scratch("dtlz-a.json");
    let b = scratch("dtlz-b.json");
    for path in [&a, &b] {
        let (code, _) = run(bin().args(["gen", "--kind", "dtlz2", "-n", "3", "-K", "50", "--seed", "7", "-o"]).arg(path));
        assert_eq!(code, Some(0));
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
