use std::path::PathBuf;

use riparian_cli::run;
use serde_json::Value;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("riparian").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = invoke(&full);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("riparian-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn allocate_half_on_the_nile() {
    let v = json(&["allocate", "--rule", "geometric:1/2", "--problem", "nile"]);
    let exact: Vec<&str> = v["columns"][1]["exact"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(
        exact,
        ["42/5", "123/10", "299/20", "263/10", "839/40", "839/40"]
    );
    assert_eq!(v["agents"][3], "Ethiopia");
}

#[test]
fn text_numbers_are_rounded_json_values() {
    let (code, text, _) = invoke(&["compare", "--problem", "nile", "--observed", "scaled"]);
    assert_eq!(code, 0);
    let v = json(&["compare", "--problem", "nile", "--observed", "scaled"]);
    let columns = v["columns"].as_array().unwrap();
    for (i, line) in text.lines().skip(1).enumerate() {
        let cells: Vec<&str> = line.split_whitespace().collect();
        let tail = &cells[cells.len() - columns.len()..];
        for (j, column) in columns.iter().enumerate() {
            assert_eq!(
                tail[j],
                column["rounded"][i].as_str().unwrap(),
                "row {i} column {j}"
            );
        }
    }
}

#[test]
fn rationalize_scaled_nile() {
    let v = json(&["rationalize", "--problem", "nile", "--observed", "scaled"]);
    let rounded: Vec<&str> = v["alpha_rounded"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(rounded, ["0.26", "0.02", "0.01", "0.17", "0.26", "1.00"]);
    assert!(v["flags"].as_array().unwrap().iter().all(|f| f == "exact"));
    let gamma = v["fit"]["gamma"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&gamma));
}

#[test]
fn rationalize_raw_is_a_domain_error() {
    let (code, out, err) = invoke(&["rationalize", "--problem", "nile", "--observed", "raw"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("infeasible"), "{err}");
}

#[test]
fn reproduction_lists_the_known_discrepancies() {
    let v = json(&["reproduce-nile"]);
    let flagged: Vec<(String, String, String)> = v["discrepancies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| {
            (
                d["table"].as_str().unwrap().to_string(),
                d["column"].as_str().unwrap().to_string(),
                d["agent"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    let expect = |t: &str, c: &str, a: &str| (t.to_string(), c.to_string(), a.to_string());
    assert_eq!(
        flagged,
        [
            expect("Example", "γ=2/3 e1", "4"),
            expect("Nile", "z", "Sudan"),
            expect("Nile", "S", "Ethiopia"),
            expect("Nile", "g*", "Sudan"),
        ]
    );
    let (_, text, _) = invoke(&["reproduce-nile"]);
    assert!(text.contains("Discrepancies"));
    assert!(text.contains("printed 11.53, derived 17.53"));
    assert!(text.contains("printed 22, derived 23.00"));
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    for args in [
        &[
            "axioms-search",
            "--rule",
            "multi:1,1/2,1/4,1",
            "--seed",
            "7",
            "--format",
            "json",
        ][..],
        &["reproduce-nile", "--format", "json"],
        &[
            "characterize",
            "--rule",
            "lambda:1/2",
            "--n",
            "4",
            "--seed",
            "3",
            "--format",
            "json",
        ],
        &["generate", "--seed", "11", "--format", "json"],
    ] {
        assert_eq!(invoke(args), invoke(args), "{args:?}");
    }
}

#[test]
fn search_exit_codes() {
    let args = [
        "axioms-search",
        "--rule",
        "no-transfer",
        "--axiom",
        "neutrality",
        "--seed",
        "1",
    ];
    let (code, out, _) = invoke(&args);
    assert_eq!(code, 0);
    assert!(out.contains("witness"));
    let mut failing = args.to_vec();
    failing.push("--fail-on-witness");
    assert_eq!(invoke(&failing).0, 1);
    let clean = [
        "axioms-search",
        "--rule",
        "geometric:1/3",
        "--axiom",
        "si",
        "--budget",
        "50",
        "--fail-on-witness",
    ];
    let (code, out, _) = invoke(&clean);
    assert_eq!(code, 0);
    assert!(out.contains("no violation found"));
}

#[test]
fn search_finds_the_delta_pii_witness() {
    let v = json(&[
        "axioms-search",
        "--rule",
        "delta:1/2,1/2,1/2,1",
        "--axiom",
        "pii",
        "--seed",
        "0",
    ]);
    let witness = &v["searches"][0]["witness"];
    assert_eq!(witness["axiom"], "partial-implementation-invariance");
    assert!(!witness["mismatches"].as_array().unwrap().is_empty());
}

#[test]
fn characterize_serial_and_lambda() {
    let v = json(&[
        "characterize",
        "--rule",
        "serial",
        "--n",
        "4",
        "--budget",
        "100",
    ]);
    assert_eq!(v["verdict"], "member");
    assert_eq!(v["alpha"], serde_json::json!(["1/4", "1/3", "1/2", "1"]));
    let v = json(&[
        "characterize",
        "--rule",
        "lambda:1/2",
        "--n",
        "4",
        "--budget",
        "100",
    ]);
    assert_eq!(v["verdict"], "non-member");
}

#[test]
fn axioms_check_on_a_tree_skips_line_axioms() {
    let v = json(&[
        "axioms-check",
        "--rule",
        "geometric:1/4",
        "--problem",
        "nile",
    ]);
    let statuses: Vec<(&str, &str)> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["axiom"].as_str().unwrap(), r["status"].as_str().unwrap()))
        .collect();
    assert_eq!(
        statuses,
        [
            ("scale-invariance", "pass"),
            ("upstream-invariance", "pass"),
            ("equal-sources", "n/a"),
            ("neutrality", "n/a"),
            ("partial-implementation-invariance", "pass"),
            ("downstream-impartiality", "n/a"),
        ]
    );
}

#[test]
fn generated_problems_feed_other_commands() {
    let (code, csv, _) = invoke(&["generate", "--n", "5", "--seed", "2"]);
    assert_eq!(code, 0);
    let path = scratch("generated.csv", &csv);
    let path = path.to_str().unwrap();
    let (code, out, err) = invoke(&["allocate", "--rule", "serial", "--problem", path]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 6);
    let (code, json_text, _) = invoke(&["generate", "--n", "5", "--seed", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let json_path = scratch("generated.json", &json_text);
    let a = invoke(&[
        "allocate",
        "--rule",
        "serial",
        "--problem",
        path,
        "--format",
        "json",
    ]);
    let b = invoke(&[
        "allocate",
        "--rule",
        "serial",
        "--problem",
        json_path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(a, b);
}

#[test]
fn observed_file_and_check_with_witness() {
    let problem = scratch(
        "line.csv",
        "id,name,successor,inflow\na,A,b,1\nb,B,c,0\nc,C,d,0\nd,D,,0\n",
    );
    let problem = problem.to_str().unwrap();
    let (code, out, err) = invoke(&[
        "axioms-check",
        "--rule",
        "delta:1/2,1/2,1/2,1",
        "--problem",
        problem,
        "--axiom",
        "pii",
        "--fail-on-witness",
    ]);
    assert_eq!(code, 1, "{err}");
    assert!(out.contains("violated"));
    let observed = scratch("z.csv", "id,amount\na,1/2\nb,1/4\nc,1/8\nd,1/8\n");
    let v = json(&[
        "rationalize",
        "--problem",
        problem,
        "--observed",
        observed.to_str().unwrap(),
    ]);
    assert_eq!(v["alpha"], serde_json::json!(["1/2", "1/2", "1/2", "1"]));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["allocate", "--rule", "geometric:3/2", "--problem", "nile"][..],
        &["allocate", "--rule", "bogus", "--problem", "nile"],
        &["allocate", "--problem", "nile"],
        &["axioms-search", "--rule", "serial", "--axiom", "fairness"],
        &["axioms-search", "--rule", "serial", "--budget", "0"],
        &["compare", "--problem", "nile", "--format", "xml"],
        &["frobnicate"],
    ] {
        let (code, out, err) = invoke(args);
        assert_eq!(code, 2, "{args:?}: {out}{err}");
        assert!(!err.is_empty());
    }
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("reproduce-nile"));
}

#[test]
fn domain_errors_exit_one() {
    let missing = invoke(&[
        "allocate",
        "--rule",
        "serial",
        "--problem",
        "/nonexistent/p.csv",
    ]);
    assert_eq!(missing.0, 1);
    let bad = scratch(
        "cycle.csv",
        "id,name,successor,inflow\n1,a,2,1\n2,b,1,1\n3,c,,1\n",
    );
    let (code, _, err) = invoke(&[
        "allocate",
        "--rule",
        "serial",
        "--problem",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("cycle"), "{err}");
    let (code, _, _) = invoke(&["allocate", "--rule", "lambda:1/2", "--problem", "nile"]);
    assert_eq!(code, 1);
}
