use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bellcut(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_bellcut"))
        .args(args)
        .env_remove("BELLCUT_TOL")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

/// Runs a command that must succeed and returns its standard output.
fn ok(args: &[&str], stdin: &[u8]) -> Vec<u8> {
    let out = bellcut(args, stdin);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("one JSON document")
}

fn lines(bytes: &[u8]) -> Vec<Value> {
    std::str::from_utf8(bytes).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(out.stderr.trim_ascii_end().rsplit(|&b| b == b'\n').next().unwrap()).unwrap();
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn gisin_4a_is_a_facet_of_k44() {
    let q = ok(&["catalog", "gisin-4a"], b"");
    let r = json(&ok(&["check-facet", "--graph", "K4,4"], &q));
    assert_eq!(r["valid"], true);
    assert_eq!(r["is_facet"], true);
    assert_eq!(r["tight_value"], "10");
}

#[test]
fn i3322_rmet_bound() {
    let q = ok(&["catalog", "i3322"], b"");
    let r = json(&ok(&["sdp-max", "--constraints", "rmet"], &q));
    let v = r["value"].as_f64().unwrap();
    assert!((v - 5.464_101_615).abs() < 1e-4, "{v}");
    assert_eq!(r["active_constraints"].as_array().unwrap().len(), 4);
}

#[test]
fn chsh_elliptope_bound_is_tsirelson() {
    let q = ok(&["catalog", "chsh"], b"");
    let r = json(&ok(&["sdp-max", "--tol", "1e-9"], &q));
    assert!((r["value"].as_f64().unwrap() - 8f64.sqrt()).abs() < 1e-6);
    assert_eq!(r["provenance"]["args"][1], "--tol");
}

#[test]
fn pentagonal_trielim_matches_catalog() {
    let q = ok(&["catalog", "pentagonal"], b"");
    let got = json(&ok(&["trielim"], &q));
    let want = json(&ok(&["catalog", "pentagonal-trielim"], b""));
    for key in ["a", "rhs", "rows", "cols", "space"] {
        assert_eq!(got[key], want[key], "{key}");
    }
    assert_eq!(got["eliminated"].as_array().unwrap().len(), 4);
}

#[test]
fn facet_stream_feeds_classify() {
    let facets = ok(&["enumerate-facets", "--graph", "K2,2"], b"");
    let stream = lines(&facets);
    assert_eq!(stream[0]["stream"], "facets");
    assert_eq!(stream.len(), 17);
    let classes = lines(&ok(&["classify"], &facets));
    assert_eq!(classes[0]["classes"], 2);
    let sizes: Vec<u64> = classes[1..].iter().map(|c| c["orbit_size"].as_u64().unwrap()).collect();
    assert_eq!(sizes, [8, 8]);
    // Classes can be fed back; each representative is its own class.
    let again = lines(&ok(&["classify"], &ok(&["classify"], &facets)));
    assert_eq!(again[0]["classes"], 2);
}

#[test]
fn map_round_trip_is_exact() {
    let p = br#"{"shape":{"m":2,"n":2},"kind":"cor","coords":["1/2","1/3","1/4","1/5","1/8","1/9","1/10","1/11"]}"#;
    let x = ok(&["map", "phi"], p);
    let back = json(&ok(&["map", "phi-inv"], &x));
    let orig: Value = serde_json::from_slice(p).unwrap();
    assert_eq!(back["coords"], orig["coords"]);
    assert_eq!(back["kind"], "cor");
}

#[test]
fn text_formats_round_trip() {
    let v = ok(&["enumerate-vertices", "--rcmet", "K2,2", "--text"], b"");
    assert!(std::str::from_utf8(&v).unwrap().lines().nth(1).unwrap().starts_with("V 8 24"));
    let h = lines(&ok(&["enumerate-facets"], &v));
    assert_eq!(h[0]["count"], 16);
}

#[test]
fn membership_of_tsirelson_point_is_on_the_boundary() {
    let s = 0.5f64.sqrt();
    let x = format!(r#"{{"shape":{{"m":2,"n":2}},"kind":"correlation","coords":[{s},{s},{s},{}]}}"#, -s);
    let r = json(&ok(&["membership"], x.as_bytes()));
    assert_eq!(r["member"], true);
    assert_eq!(r["boundary"], true);
    let c = json(&ok(&["cut-condition"], x.as_bytes()));
    assert_eq!(c["passes"], true);
}

#[test]
fn exit_codes_by_error_class() {
    let cases: [(&[&str], &[u8], i32, &str); 6] = [
        (&["catalog", "no-such-entry"], b"", 1, "validation"),
        (&["map", "pi"], br#"{"shape":{"m":1,"n":1},"kind":"cor","coords":[0,0,0]}"#, 1, "validation"),
        (&["enumerate-facets", "--graph", "K4,4"], b"", 2, "guard"),
        (&["check-valid"], b"{not json", 3, "parse"),
        (&["sdp-max", "--max-iter", "1"], br#"{"rows":2,"cols":2,"a":[[1,1],[1,-1]],"rhs":2}"#, 4, "solver"),
        (&["no-such-command"], b"", 64, "usage"),
    ];
    for (args, stdin, code, kind) in cases {
        let out = bellcut(args, stdin);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        assert_eq!(error_kind(&out), kind, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn force_is_recorded_in_provenance() {
    let d = 17;
    let mut h = format!("H {d} {}\n", d + 1);
    for i in 0..d {
        let row: Vec<&str> = (0..d).map(|j| if i == j { "-1" } else { "0" }).collect();
        h.push_str(&format!("{} <= 0\n", row.join(" ")));
    }
    h.push_str(&format!("{} <= 1\n", vec!["1"; d].join(" ")));
    assert_eq!(bellcut(&["enumerate-vertices"], h.as_bytes()).status.code(), Some(2));
    let out = lines(&ok(&["enumerate-vertices", "--force"], h.as_bytes()));
    assert_eq!(out[0]["count"], 18);
    assert!(out[0]["provenance"]["forced"].as_str().unwrap().contains("dimension 17"));
}

#[test]
fn reruns_are_byte_identical_without_timestamp() {
    let q = ok(&["catalog", "i3322"], b"");
    let a = ok(&["sdp-max", "--constraints", "rmet", "--no-timestamp"], &q);
    let b = ok(&["sdp-max", "--constraints", "rmet", "--no-timestamp"], &q);
    assert_eq!(a, b);
    assert!(json(&a)["provenance"].get("timestamp").is_none());
    let g1 = ok(&["search-gap", "--samples", "5", "--seed", "7", "--no-timestamp"], b"");
    let g2 = ok(&["search-gap", "--samples", "5", "--seed", "7", "--no-timestamp"], b"");
    assert_eq!(g1, g2);
}

#[test]
fn output_flag_and_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("chsh.json");
    let out = dir.path().join("out.json");
    ok(&["catalog", "chsh", "-o", q.to_str().unwrap()], b"");
    let printed = ok(&["check-valid", q.to_str().unwrap(), "--output", out.to_str().unwrap()], b"");
    assert!(printed.is_empty());
    let r = json(&std::fs::read(&out).unwrap());
    assert_eq!(r["valid"], true);
    assert_eq!(r["max"], "2");
}

#[test]
fn env_tolerance_is_the_default() {
    let q = ok(&["catalog", "chsh"], b"");
    let mut child = Command::new(env!("CARGO_BIN_EXE_bellcut"))
        .args(["sdp-max"])
        .env("BELLCUT_TOL", "-1")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&q).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn small_inequality_lifts_onto_a_larger_graph() {
    let q = ok(&["catalog", "chsh"], b"");
    let r = json(&ok(&["check-facet", "--graph", "K3,3"], &q));
    assert_eq!(r["is_facet"], true);
    let lifted = json(&ok(&["zero-lift", "--to", "3,4"], &q));
    assert_eq!(lifted["rows"], 3);
    assert_eq!(lifted["cols"], 4);
}
