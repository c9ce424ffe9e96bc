use std::process::Command;

fn qcong(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qcong"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn strip_millis(s: &str) -> String {
    s.lines()
        .map(|l| match l.find("\"millis\":") {
            Some(i) => {
                let rest = &l[i..];
                let end = rest.find([',', '}']).unwrap();
                format!("{}{}", &l[..i], &rest[end..])
            }
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn t1_sweep_reports_one_record_per_odd_n() {
    let (code, out, _) = qcong(&["verify", "--family", "T1", "--n", "1..15", "--format", "json-lines"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 9);
    for line in &lines[..8] {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 8);
        for k in ["family", "n", "ell", "p", "modulus", "passed", "skipped", "millis"] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(v["passed"], true);
    }
    let last: serde_json::Value = serde_json::from_str(lines[8]).unwrap();
    assert_eq!(last["summary"]["total"], 8);
    let v: serde_json::Value = serde_json::from_str(lines[2]).unwrap();
    assert_eq!(v["modulus"], serde_json::json!([[5, 2], [10, 3]]));
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let args = ["verify", "--family", "T3,B2", "--n", "1..9", "--p", "3..29", "--json"];
    let (_, a, _) = qcong(&args);
    let (_, b, _) = qcong(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(strip_millis(&a), strip_millis(&b));
}

#[test]
fn exit_codes() {
    assert_eq!(qcong(&["verify", "--family", "T1", "--n", "4"]).0, 2);
    assert_eq!(qcong(&["verify", "--family", "T1", "--n", "x..3"]).0, 2);
    assert_eq!(qcong(&["frobnicate"]).0, 2);
    assert_eq!(qcong(&["verify", "--family", "B2", "--p", "3..97"]).0, 0);
    // the binomial congruence fails as stated at p ≡ 1 (mod 4)
    let (code, out, err) = qcong(&["verify", "--family", "HAMME0", "--p", "3..13"]);
    assert_eq!(code, 1);
    assert!(out.ends_with("total 5 passed 0 failed 2 skipped 3\n"), "{out}");
    assert!(err.contains("FAIL HAMME0"));
}

#[test]
fn out_file_receives_the_report() {
    let dir = std::env::temp_dir().join(format!("qcong-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.jsonl");
    let (code, out, _) = qcong(&["verify", "--family", "MODFORM", "--p", "3..30", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 10);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn series_and_helpers() {
    let (code, out, _) = qcong(&["series", "QDIXON", "--ell", "1", "--b", "2", "--c", "5/3", "--order", "40"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("QDIXON"));
    let (code, out, _) = qcong(&["cyclotomic", "15"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "q^8 - q^7 + q^5 - q^4 + q^3 - q + 1");
    let (code, out, _) = qcong(&["expand-eta", "--order", "30", "--json"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("{\"a\":1,\"n\":1}\n"));
}
