use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use chainsemi::cache::{read_set, Cache};
use chainsemi::{Budget, ElementSet, FamilyTag};

fn chainsemi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainsemi"))
        .args(args)
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = chainsemi(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn enumerate_counts() {
    let v = json(&[
        "enumerate",
        "--family",
        "cp",
        "--n",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(v["count"], 2);
    assert_eq!(v["schema"], "chainsemi/1");
    assert_eq!(
        json(&["enumerate", "--family", "p", "--n", "2"])["count"],
        9
    );
    assert_eq!(
        json(&["enumerate", "--family", "orcp", "--n", "3"])["count"],
        46
    );
}

#[test]
fn enumerate_csv() {
    let out = chainsemi(&[
        "enumerate",
        "--family",
        "oct",
        "--n",
        "2",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id");
    assert_eq!(lines.len(), 4);
}

#[test]
fn output_is_independent_of_thread_count() {
    let args = |t: &'static str| ["--threads", t, "enumerate", "--family", "cp", "--n", "5"];
    assert_eq!(chainsemi(&args("1")).stdout, chainsemi(&args("8")).stdout);
}

#[test]
fn classes_metadata() {
    let v = json(&[
        "classes",
        "--family",
        "cp",
        "--n",
        "3",
        "--relation",
        "dstar",
    ]);
    let heights: Vec<u64> = v["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["height"].as_u64().unwrap())
        .collect();
    assert_eq!(heights, vec![0, 1, 2, 3]);

    let v = json(&[
        "classes",
        "--family",
        "cp",
        "--n",
        "4",
        "--relation",
        "rstar",
        "--method",
        "oracle",
    ]);
    let free: Vec<&Value> = v["classes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["has_idempotent"] == false)
        .collect();
    assert_eq!(free.len(), 1);
    assert_eq!(free[0]["size"], 4);

    let v = json(&[
        "classes",
        "--family",
        "ocp",
        "--n",
        "3",
        "--relation",
        "lstar",
        "--method",
        "both",
    ]);
    assert_eq!(v["agree"], true);
    assert!(v["classes"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["has_idempotent"] == true));
}

#[test]
fn jstar_against_dstar() {
    let v = json(&[
        "classes",
        "--family",
        "orcp",
        "--n",
        "3",
        "--relation",
        "jstar",
        "--method",
        "both",
    ]);
    assert_eq!(v["agree"], true);
    assert_eq!(v["count"], 4);
}

fn verify(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["verify", "--out", "-"];
    full.extend_from_slice(args);
    let out = chainsemi(&full);
    (
        out.status.code().unwrap(),
        serde_json::from_slice(&out.stdout).unwrap(),
    )
}

#[test]
fn verify_examples() {
    let (code, v) = verify(&["--claims", "L2.6", "--family", "cp", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["claims"][0]["status"], "pass");
    assert_eq!(v["claims"][0]["witness"].as_array().unwrap().len(), 4);

    let (code, v) = verify(&[
        "--claims", "THM2.1.i", "--family", "orcp", "--n", "3", "--method", "both",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["claims"][0]["method"], "both");

    let (code, v) = verify(&["--claims", "R3.1", "--family", "orcp", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["claims"][0]["witness"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_covers_every_combination_once() {
    let (code, v) = verify(&["--family", "ocp,cp", "--n", "1..2"]);
    assert_eq!(code, 0);
    let claims = v["claims"].as_array().unwrap();
    assert_eq!(claims.len(), 23 * 2 * 2);
    assert!(claims.iter().all(|c| c.get("runtime_ms").is_none()));
    // registry order, then family order, then n
    assert_eq!(claims[0]["claim_id"], "THM2.1.i");
    assert_eq!(claims[0]["family"], "cp");
    assert_eq!(claims[1]["n"], 2);
    assert_eq!(claims[2]["family"], "ocp");
}

#[test]
fn timings_are_opt_in() {
    let (_, v) = verify(&[
        "--claims",
        "closure",
        "--family",
        "cp",
        "--n",
        "2",
        "--timings",
    ]);
    assert!(v["claims"][0]["runtime_ms"].is_u64());
}

#[test]
fn out_of_budget_is_skipped_not_failed() {
    let (code, v) = verify(&["--claims", "C2.4", "--family", "cp", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["claims"][0]["status"], "skipped_budget");
    let (_, v) = verify(&[
        "--claims",
        "C2.4",
        "--family",
        "cp",
        "--n",
        "4",
        "--max-jstar-n",
        "4",
    ]);
    assert_eq!(v["claims"][0]["status"], "pass");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| chainsemi(args).status.code().unwrap();
    assert_eq!(code(&["enumerate", "--family", "cp", "--n", "7"]), 3);
    assert_eq!(
        code(&[
            "classes",
            "--family",
            "cp",
            "--n",
            "5",
            "--relation",
            "lstar",
            "--method",
            "oracle"
        ]),
        3
    );
    assert_eq!(
        code(&[
            "enumerate",
            "--family",
            "cp",
            "--n",
            "2",
            "--out",
            "/nonexistent/dir/x.json"
        ]),
        4
    );
    assert_eq!(
        code(&[
            "classes",
            "--family",
            "ct",
            "--n",
            "2",
            "--relation",
            "lstar"
        ]),
        2
    );
    assert_eq!(code(&["verify", "--claims", "L9.9"]), 2);
    assert_eq!(
        code(&[
            "--max-oracle-n",
            "9",
            "enumerate",
            "--family",
            "cp",
            "--n",
            "2"
        ]),
        2
    );
}

fn cached(dir: &Path, family: &str, n: &str) -> Output {
    let d = dir.to_str().unwrap();
    chainsemi(&["--cache-dir", d, "enumerate", "--family", family, "--n", n])
}

#[test]
fn cache_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = cached(dir.path(), "orcp", "4");
    let file = Cache::new(dir.path()).path(FamilyTag::ORCP, 4);
    let bytes = std::fs::read(&file).unwrap();
    assert_eq!(&bytes[..8], b"CSEMI001");
    assert_eq!(bytes.len(), 18 + 8 * 219);
    let second = cached(dir.path(), "orcp", "4");
    assert_eq!(first.stdout, second.stdout);

    let reloaded = read_set(std::fs::File::open(&file).unwrap()).unwrap();
    assert_eq!(
        reloaded.ids(),
        ElementSet::enumerate(FamilyTag::ORCP, 4).unwrap().ids()
    );

    std::fs::write(&file, b"CSEMI001garbage").unwrap();
    assert_eq!(cached(dir.path(), "orcp", "4").status.code(), Some(4));
}

#[test]
fn cache_load_or_enumerate() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let budget = Budget::default();
    for f in FamilyTag::ALL {
        for n in 1..=4 {
            let fresh = ElementSet::enumerate(f, n).unwrap();
            let stored = cache.load_or_enumerate(f, n, &budget).unwrap();
            let loaded = cache.load_or_enumerate(f, n, &budget).unwrap();
            assert_eq!(fresh.ids(), stored.ids());
            assert_eq!(fresh.ids(), loaded.ids());
        }
    }
    // a file holding the wrong (family, n) is rejected
    std::fs::copy(cache.path(FamilyTag::CP, 3), cache.path(FamilyTag::CP, 2)).unwrap();
    assert!(cache.load_or_enumerate(FamilyTag::CP, 2, &budget).is_err());
}
