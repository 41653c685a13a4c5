use std::process::Command;

use hnpoly_core::{ConcavePolygon, FIsocrystal, FilteredInvariant, NewtonPoint, SubobjectCloud};
use serde_json::Value;

fn run(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut argv = vec!["hnpoly"];
    argv.extend_from_slice(args);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = hnpoly_cli::run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str], stdin: &str) -> Value {
    let (code, out, err) = run(args, stdin);
    assert_eq!(code, 0, "{args:?}: {out} {err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "hnpoly/1");
    v["result"].clone()
}

const GSP4_NONBASIC: &str = r#"{"case":"PEL_C","d":1,"n":4,"mu":[[2,2]],
  "newton":{"slopes":[{"lambda":[1,1],"mult":1},{"lambda":"1/2","mult":2},{"lambda":0,"mult":1}]}}"#;

fn poly(s: &str) -> String {
    // `s` is "slope:width,slope:width".
    let segs: Vec<String> = s
        .split(',')
        .map(|seg| {
            let (a, w) = seg.split_once(':').unwrap();
            format!(r#"{{"slope":"{a}","width":"{w}"}}"#)
        })
        .collect();
    format!(r#"{{"segments":[{}]}}"#, segs.join(","))
}

#[test]
fn detect_matches_documented_output() {
    let (code, out, _) = run(&["hn", "detect"], GSP4_NONBASIC);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), r#"{"result":[{"x":[[1,1],[1,1]],"xhat":[[3,1],[2,1]]}],"schema":"hnpoly/1"}"#);
}

#[test]
fn bgmu_from_flags() {
    let r = ok(&["bgmu", "--case", "PEL_C", "--d", "1", "--n", "4", "--mu", "2,2"], "");
    assert_eq!(r.as_array().unwrap().len(), 3);
    let again = ok(&["bgmu", "enumerate", "--case", "PEL_C", "--n", "4", "--mu", "2,2"], "");
    assert_eq!(r, again);
    let basic = ok(&["bgmu", "basic", "--case", "PEL_C", "--n", "4", "--mu", "2,2"], "");
    assert_eq!(basic.as_array().unwrap().len(), 1);
}

#[test]
fn bgmu_from_input_document() {
    let r = ok(&["bgmu"], r#"{"schema":"hnpoly/1","case":"EL","d":1,"n":2,"mu":[[1,1]]}"#);
    assert_eq!(r.as_array().unwrap().len(), 2);
}

#[test]
fn incomparable_leq_is_false() {
    let doc = format!(r#"{{"p":{},"q":{}}}"#, poly("1:1"), poly("1:2"));
    assert_eq!(ok(&["polygon", "leq"], &doc), Value::Bool(false));
    let doc = format!(r#"{{"p":{},"q":{}}}"#, poly("1/2:2"), poly("1:1,0:1"));
    assert_eq!(ok(&["polygon", "leq"], &doc), Value::Bool(true));
}

#[test]
fn polygon_operations() {
    let p = poly("1:1,1/2:2,0:1");
    let r = ok(&["polygon", "break-points"], &p);
    assert_eq!(r, serde_json::json!([[[1, 1], [1, 1]], [[3, 1], [2, 1]]]));
    let r = ok(&["polygon", "evaluate"], &format!(r#"{{"polygon":{p},"x":"5/2"}}"#));
    assert_eq!(r, serde_json::json!([7, 4]));
    let r = ok(&["polygon", "is-symmetric"], &p);
    assert_eq!(r, Value::Bool(true));
    let r = ok(&["polygon", "symmetric-point"], &format!(r#"{{"polygon":{p},"point":[1,1]}}"#));
    assert_eq!(r, serde_json::json!([[3, 1], [2, 1]]));
    let r = ok(&["polygon", "from-slopes"], r#"{"slopes":[[0,1],["1/2",2],[1,1]]}"#);
    let back: ConcavePolygon = serde_json::from_value(r).unwrap();
    assert_eq!(back, serde_json::from_str(&p).unwrap());
    let r = ok(&["polygon", "normalize"], &format!(r#"{{"polygon":{},"d":2}}"#, poly("1:2")));
    assert_eq!(r, serde_json::from_str::<Value>(&poly("1:1")).map(|v| {
        let p: ConcavePolygon = serde_json::from_value(v).unwrap();
        serde_json::to_value(p).unwrap()
    }).unwrap());
    let r = ok(&["polygon", "envelope"], r#"{"points":[[1,1],[2,1]],"end":[3,2]}"#);
    let env: ConcavePolygon = serde_json::from_value(r).unwrap();
    assert_eq!(env.vertices().len(), 3);
}

#[test]
fn newton_operations() {
    let iso = r#"{"slopes":[{"lambda":"1/2","mult":2},{"lambda":0,"mult":2}],"d":2}"#;
    let r = ok(&["newton", "normalized"], iso);
    let p: ConcavePolygon = serde_json::from_value(r).unwrap();
    assert_eq!(p.width(), hnpoly_core::Rat::int(2));
    assert_eq!(ok(&["newton", "t-n"], iso), serde_json::json!([1, 1]));
    assert_eq!(ok(&["newton", "p-divisible"], iso), Value::Bool(true));
    let dual = ok(&["newton", "dual"], iso);
    let dual: FIsocrystal = serde_json::from_value(dual).unwrap();
    assert_eq!(dual.t_n(), hnpoly_core::Rat::int(3));
}

#[test]
fn ffgs_and_tower_operations() {
    let cloud = r#"{"ht":3,"deg":2,"points":[[1,1],[2,1]]}"#;
    let hn = ok(&["ffgs", "hn"], cloud);
    let hn: ConcavePolygon = serde_json::from_value(hn).unwrap();
    assert_eq!(hn.break_points().len(), 1);
    assert_eq!(ok(&["ffgs", "semistable"], cloud), Value::Bool(false));
    let dual = ok(&["ffgs", "dual-cloud"], cloud);
    let _: SubobjectCloud = serde_json::from_value(dual).unwrap();

    let omega = r#"{"d":1,"ht":2,"per_tau":[[1,"1/2"]]}"#;
    let h = ok(&["ffgs", "fitting-hodge"], omega);
    let h: ConcavePolygon = serde_json::from_value(h).unwrap();
    assert_eq!(h.end_height(), "3/2".parse().unwrap());

    let tower = r#"{"d":1,"clouds":[{"ht":2,"deg":1,"points":[[1,1]]},{"ht":4,"deg":2,"points":[[1,1],[2,2]]}]}"#;
    let lim = ok(&["tower"], tower);
    assert_eq!(lim["levels"], 2);
    let chain = format!(r#"{{"hn":{},"newton":{},"hodge":{}}}"#, poly("1/2:2"), poly("1/2:2"), poly("1:1,0:1"));
    let v = ok(&["ffgs", "chain"], &chain);
    assert_eq!(v["hn_leq_newton"], true);
    assert_eq!(v["newton_leq_hodge"], true);
}

#[test]
fn mu_operations() {
    let flags = ["--case", "PEL_U", "--d", "2", "--n", "3", "--mu", "1,2;2,1"];
    let with = |op: &str| {
        let mut a = vec!["mu", op];
        a.extend_from_slice(&flags);
        ok(&a, "")
    };
    assert_eq!(with("validate")["valid"], true);
    assert_eq!(with("dimension"), serde_json::json!([2, 1]));
    assert_eq!(with("average"), with("hodge-at-p"));
}

#[test]
fn decompose_round_trips_pieces() {
    let dec = ok(&["hn", "decompose"], GSP4_NONBASIC);
    let pieces = dec["pieces"].as_array().unwrap();
    assert_eq!(pieces.len(), 3);
    for p in pieces {
        let inv: FilteredInvariant = serde_json::from_value(p.clone()).unwrap();
        assert_eq!(serde_json::to_value(&inv).unwrap(), *p);
    }
    let explicit = format!(r#"{{"invariant":{GSP4_NONBASIC},"x":[1,1],"xhat":[3,2]}}"#);
    assert_eq!(ok(&["hn", "decompose"], &explicit), dec);
    let report = ok(&["hn", "verify"], GSP4_NONBASIC);
    for k in ["newton_split", "hodge_split", "hn_contacts", "duality", "pieces_admissible"] {
        assert_eq!(report[k], true, "{k}");
    }
}

#[test]
fn output_feeds_back_as_input() {
    let cloud = r#"{"ht":4,"deg":2,"points":[[1,1],[2,1],[3,2]]}"#;
    let (_, dual_out, _) = run(&["ffgs", "dual-cloud"], cloud);
    let (_, twice, _) = run(&["ffgs", "dual-cloud"], &dual_out);
    let orig: SubobjectCloud = serde_json::from_str(cloud).unwrap();
    let back: SubobjectCloud = serde_json::from_value(serde_json::from_str::<Value>(&twice).unwrap()["result"].clone()).unwrap();
    assert_eq!(orig, back);

    let (_, strata, _) = run(&["strata", "--case", "PEL_U", "--d", "2", "--n", "3", "--mu", "1,2;2,1"], "");
    let v: Value = serde_json::from_str(&strata).unwrap();
    for s in v["result"].as_array().unwrap() {
        let nu: NewtonPoint = serde_json::from_value(s["newton"].clone()).unwrap();
        assert_eq!(serde_json::to_value(&nu).unwrap(), s["newton"]);
    }
}

#[test]
fn domain_errors_exit_one() {
    let (code, out, _) = run(&["polygon", "evaluate"], &format!(r#"{{"polygon":{},"x":3}}"#, poly("1:1")));
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"], "OutOfDomain");
    assert!(v["detail"].is_string());

    let (code, out, _) = run(&["bgmu", "--case", "PEL_U", "--d", "3", "--n", "2", "--mu", "1,1;1,1;1,1"], "");
    assert_eq!(code, 1);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["error"], "InvalidMu");

    let (code, out, _) = run(&["polygon", "dual"], r#"{"schema":"hnpoly/2","segments":[]}"#);
    assert_eq!(code, 1);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["error"], "SchemaMismatch");

    let (code, _, _) = run(&["polygon", "dual"], "not json");
    assert_eq!(code, 1);

    let basic = r#"{"case":"PEL_C","d":1,"n":4,"mu":[[2,2]],"newton":{"slopes":[{"lambda":"1/2","mult":4}]}}"#;
    let (code, out, _) = run(&["hn", "decompose"], basic);
    assert_eq!(code, 1);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["error"], "NoContactPoint");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[], "").0, 2);
    assert_eq!(run(&["frobnicate"], "").0, 2);
    assert_eq!(run(&["polygon"], "").0, 2);
    assert_eq!(run(&["polygon", "nope"], "{}").0, 2);
    assert_eq!(run(&["bgmu", "--case", "PEL_C", "--n", "4"], "").0, 2);
    assert_eq!(run(&["bgmu", "--case", "GL", "--n", "4", "--mu", "1,1"], "").0, 2);
    assert_eq!(run(&["bgmu", "--n", "4"], "").0, 2);
    assert_eq!(run(&["polygon", "leq", "--bogus"], "").0, 2);
    assert_eq!(run(&["--help"], "").0, 0);
}

#[test]
fn max_denominator_filters() {
    let all = ok(&["bgmu", "--case", "EL", "--n", "3", "--mu", "1,2"], "");
    let few = ok(&["bgmu", "--case", "EL", "--n", "3", "--mu", "1,2", "--max-denominator", "1"], "");
    assert!(few.as_array().unwrap().len() < all.as_array().unwrap().len());
}

#[test]
fn files_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("gsp4.json");
    let output = dir.path().join("out.json");
    let svg = dir.path().join("out.svg");
    std::fs::write(&input, GSP4_NONBASIC).unwrap();
    let (code, stdout, _) = run(
        &[
            "hn",
            "detect",
            "--in",
            input.to_str().unwrap(),
            "--out",
            output.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let written = std::fs::read_to_string(&output).unwrap();
    assert!(written.contains("xhat"));
    let doc = std::fs::read_to_string(&svg).unwrap();
    assert!(doc.starts_with("<svg"));
    assert_eq!(doc.matches("<polyline").count(), 2);
    assert_eq!(doc.matches("<circle").count(), 2);

    let (code, _, _) = run(&["hn", "detect", "--in", dir.path().join("missing.json").to_str().unwrap()], "");
    assert_eq!(code, 1);

    let svg2 = dir.path().join("t.svg");
    let (code, _, _) = run(&["newton", "t-n", "--svg", svg2.to_str().unwrap()], r#"{"slopes":[{"lambda":0,"mult":1}]}"#);
    assert_eq!(code, 0);
    assert!(std::fs::read_to_string(&svg2).unwrap().contains("no data"));
}

#[test]
fn binary_is_byte_deterministic() {
    let exe = env!("CARGO_BIN_EXE_hnpoly");
    let args = ["strata", "--case", "PEL_U", "--d", "2", "--n", "5", "--mu", "1,4;4,1"];
    let a = Command::new(exe).args(args).output().unwrap();
    let b = Command::new(exe).args(args).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let bad = Command::new(exe).args(["polygon", "nope"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
