use std::process::{Command, Output};

fn kutzko(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kutzko")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

#[test]
fn inadmissible_q_is_a_config_error() {
    let o = kutzko(&["report", "--q", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not admissible"));
    assert_eq!(kutzko(&["verify", "lattice", "--precision", "8"]).status.code(), Some(2));
    assert_eq!(kutzko(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn small_report_passes() {
    let o = kutzko(&["report", "--window-words", "2", "--window-z", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    let total: usize = lines[0].split(": ").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
    assert_eq!(lines.len(), total + 1);
    assert!(lines[1..].iter().all(|l| l.starts_with('✓')));
}

#[test]
fn json_is_deterministic_and_well_formed() {
    let args = ["verify", "cocycle", "--window-words", "2", "--window-z", "1", "--format", "json", "--seed", "17"];
    let (a, b) = (kutzko(&args), kutzko(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 17);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(v["summary"]["total"], checks.len());
    for c in checks {
        for key in ["id", "module", "paper_anchor", "inputs", "expected", "got", "status"] {
            assert!(c[key].is_string(), "{key} missing in {c}");
        }
        assert!(["pass", "fail", "skipped-out-of-scope"].contains(&c["status"].as_str().unwrap()));
    }
}

#[test]
fn variant_filter() {
    let o = kutzko(&["verify", "epsilon", "--variant", "parahoric", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let st: Vec<(&str, &str)> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["id"].as_str().unwrap(), c["status"].as_str().unwrap()))
        .collect();
    assert_eq!(
        st,
        [("epsilon.fks_trivial[stabilizer]", "skipped-out-of-scope"), ("epsilon.fks_trivial[parahoric]", "pass")]
    );
}

#[test]
fn dump_constants() {
    let o = kutzko(&["dump-constants", "--variant", "stabilizer", "--window-words", "1", "--window-z", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,v,uv,re,im"));
    // Window: {1, s, s'} × {z^-1, 1, z}.
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 81);
    assert!(rows.contains(&"s,s,1,1,0"));
    assert!(rows.contains(&"1,1,1,1,0"));
}
