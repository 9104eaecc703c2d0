use std::path::Path;
use std::process::{Command, Output};

use gaptile::construct::{homogeneous_base, interval_base};
use gaptile::{read_tiling, write_tiling, HeightTable, TilingFile, Verifier};
use tempfile::TempDir;

fn gaptile(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaptile"))
        .args(args)
        .current_dir(dir)
        .env_remove("GAPTILE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn reverifies(path: &Path) {
    let v = Verifier::default();
    let report = match read_tiling(path).unwrap() {
        f @ TilingFile::Rectangle { .. } => v.rectangle_tiling(&f.into_rectangle().unwrap()),
        f => {
            let t = f.into_interval().unwrap();
            v.interval_tiling(&t, &t.gap_set)
        }
    };
    assert!(report.ok, "{}: {report}", path.display());
}

#[test]
fn construct_writes_verified_files() {
    let dir = TempDir::new().unwrap();
    let o = gaptile(
        dir.path(),
        &["construct", "--gaps", "1:1,9:1", "--split", "2,0"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("N = 54"));
    reverifies(&dir.path().join("tiling.json"));
    for f in ["tiling.trace.json", "tiling.thresholds.json"] {
        let text = std::fs::read_to_string(dir.path().join(f)).unwrap();
        serde_json::from_str::<serde_json::Value>(&text).unwrap();
    }
    let o = gaptile(dir.path(), &["verify", "tiling.json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn growth_violation_exits_two_with_the_bound() {
    let dir = TempDir::new().unwrap();
    let o = gaptile(
        dir.path(),
        &["construct", "--gaps", "1:1,8:1", "--split", "2,0"],
    );
    assert_eq!(code(&o), 2);
    assert!(
        stderr(&o).contains("stage 2 requires d2 ≥ 9"),
        "{}",
        stderr(&o)
    );
    assert!(!dir.path().join("tiling.json").exists());
}

#[test]
fn inadmissible_split_exits_two() {
    let dir = TempDir::new().unwrap();
    let o = gaptile(
        dir.path(),
        &["construct", "--gaps", "1,9,3025", "--split", "3,0"],
    );
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn oversized_construction_exits_two() {
    let dir = TempDir::new().unwrap();
    let o = gaptile(
        dir.path(),
        &[
            "construct",
            "--gaps",
            "1,9,2970",
            "--split",
            "2,1",
            "--max-points",
            "1000",
        ],
    );
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn thresholds_only_reports_next_distance() {
    let dir = TempDir::new().unwrap();
    let o = gaptile(
        dir.path(),
        &[
            "construct",
            "--gaps",
            "1:1,9:1",
            "--thresholds-only",
            "--thresholds",
            "t.json",
        ],
    );
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("required ≥ 3025"), "{out}");
    assert!(out.contains("required ≥ 2970"), "{out}");
    assert!(dir.path().join("t.json").exists());
    assert!(!dir.path().join("tiling.json").exists());
}

#[test]
fn malformed_input_exits_one() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["construct", "--gaps", "1:0,9"][..],
        &["construct", "--gaps", "nine"],
        &["construct", "--gaps", "1,1:2", "--split", "1,0"],
        &["solve", "--gaps", "1"],
        &["verify", "missing.json"],
        &["frobnicate"],
    ] {
        let o = gaptile(dir.path(), args);
        assert_eq!(code(&o), 1, "{args:?}: {}", stderr(&o));
    }
    let o = gaptile(dir.path(), &["--help"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn solve_and_minlen() {
    let dir = TempDir::new().unwrap();
    let o = gaptile(
        dir.path(),
        &["solve", "--gaps", "1:1", "--len", "2", "--out", "w.json"],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l == "0 1"));
    reverifies(&dir.path().join("w.json"));

    let o = gaptile(dir.path(), &["solve", "--gaps", "1:1,2:1", "--len", "4"]);
    assert_eq!(code(&o), 3);

    let o = gaptile(
        dir.path(),
        &[
            "minlen", "--gaps", "1:1,2:1", "--max", "30", "--out", "m.json",
        ],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "6");
    reverifies(&dir.path().join("m.json"));

    let o = gaptile(dir.path(), &["minlen", "--gaps", "1:1,2:1", "--max", "5"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn corrupted_tiling_exits_four() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&gaptile(
            dir.path(),
            &["construct", "--gaps", "1,9", "--split", "2,0"]
        )),
        0
    );
    let path = dir.path().join("tiling.json");
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // shift the last point of the first tile onto its neighbor
    let tile = v["tiles"][0].as_array_mut().unwrap();
    let last = tile.last_mut().unwrap();
    *last = serde_json::json!(last.as_i64().unwrap() + 1);
    std::fs::write(&path, v.to_string()).unwrap();
    let o = gaptile(dir.path(), &["verify", "tiling.json"]);
    assert_eq!(code(&o), 4, "{}", stdout(&o));
    let out = stdout(&o).to_lowercase();
    assert!(out.contains("overlap") || out.contains("hole"), "{out}");
}

#[test]
fn homogeneous_output_verifies() {
    let dir = TempDir::new().unwrap();
    let table = HeightTable::in_memory();
    let st = homogeneous_base(&interval_base(&table, 1, 9, 1, 1).unwrap()).unwrap();
    let path = dir.path().join("h.json");
    write_tiling(&path, &st.tiling.into()).unwrap();
    let o = gaptile(dir.path(), &["verify", "h.json", "--homogeneous"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("homogeneous: ok"));
}

#[test]
fn boundary_flag_is_checked() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&gaptile(
            dir.path(),
            &["construct", "--gaps", "1,9", "--split", "2,0"]
        )),
        0
    );
    let o = gaptile(dir.path(), &["verify", "tiling.json", "--boundary", "1,1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = gaptile(dir.path(), &["verify", "tiling.json", "--boundary", "1,5"]);
    assert_eq!(code(&o), 4, "{}", stdout(&o));
    let o = gaptile(dir.path(), &["verify", "tiling.json", "--boundary", "x"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn patterns_and_fvalues_round_trip() {
    let dir = TempDir::new().unwrap();
    for args in [
        &[
            "pattern", "stair", "--k", "3", "--l", "4", "--out", "a.json",
        ][..],
        &[
            "pattern", "stripe", "--n", "6", "--kv", "2", "--m", "11", "--out", "b.json",
        ],
        &[
            "pattern", "minrect", "--k", "1", "--l", "2", "--m", "3", "--out", "c.json",
        ],
        &[
            "fvalue", "--k", "1", "--l", "1", "--m", "2", "--out", "d.json",
        ],
    ] {
        let o = gaptile(dir.path(), args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    }
    for f in ["a.json", "b.json", "c.json", "d.json"] {
        reverifies(&dir.path().join(f));
    }
    let o = gaptile(dir.path(), &["fvalue", "--k", "1", "--l", "1", "--m", "2"]);
    assert_eq!(stdout(&o).trim(), "f(1,1,2) = 3");
    let o = gaptile(dir.path(), &["fvalue", "--k", "1", "--l", "1", "--m", "5"]);
    assert_eq!(code(&o), 2);
    let o = gaptile(
        dir.path(),
        &["pattern", "stripe", "--n", "6", "--kv", "2", "--m", "12"],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn fvalue_cache_directory_is_reused() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gaptile"))
            .args(["fvalue", "--k", "1", "--l", "2"])
            .env("GAPTILE_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(code(&first), 0);
    assert!(cache.join("heights.json").exists());
    let second = run();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn render_targets() {
    let dir = TempDir::new().unwrap();
    gaptile(
        dir.path(),
        &[
            "pattern", "stair", "--k", "3", "--l", "4", "--out", "s.json",
        ],
    );
    let o = gaptile(
        dir.path(),
        &["render", "s.json", "--out", "s.svg", "--seed", "3"],
    );
    assert_eq!(code(&o), 0);
    let svg = std::fs::read_to_string(dir.path().join("s.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 5);

    let o = gaptile(dir.path(), &["render", "s.json", "--target", "ascii"]);
    assert!(stdout(&o).starts_with("8 x 5, 5 paths"));

    std::fs::write(
        dir.path().join("e.json"),
        r#"{"kind":"rectangle","width":2,"height":1,"step_type":[[[1,0],1]],"paths":[]}"#,
    )
    .unwrap();
    let o = gaptile(dir.path(), &["render", "e.json"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    std::fs::write(dir.path().join("z.json"), "").unwrap();
    assert_eq!(code(&gaptile(dir.path(), &["render", "z.json"])), 1);
}

#[test]
fn long_intervals_render_a_marked_window() {
    let dir = TempDir::new().unwrap();
    gaptile(
        dir.path(),
        &["construct", "--gaps", "1,9,2970", "--split", "2,1"],
    );
    let o = gaptile(dir.path(), &["render", "tiling.json", "--target", "ascii"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("truncated: showing [0, 199]"));
}

const CATALOG: &[&str] = &[
    "catalog",
    "--max-distance",
    "3",
    "--max-size",
    "3",
    "--n-max",
    "40",
];

fn catalog(dir: &Path, extra: &[&str]) -> Output {
    let args: Vec<&str> = CATALOG.iter().chain(extra).copied().collect();
    gaptile(dir, &args)
}

#[test]
fn catalog_records_and_witnesses() {
    let dir = TempDir::new().unwrap();
    let o = gaptile(
        dir.path(),
        &[
            "catalog",
            "--max-distance",
            "3",
            "--max-size",
            "2",
            "--n-max",
            "30",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("catalog.jsonl")).unwrap();
    let recs: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let sets: Vec<&str> = recs
        .iter()
        .map(|r| r["gap_set"].as_str().unwrap())
        .collect();
    assert_eq!(sets, ["1:2", "1:1,2:1", "1:1,3:1", "2:2", "2:1,3:1", "3:2"]);
    assert_eq!(recs[1]["n"], 6);
    for r in &recs {
        assert_eq!(r["outcome"], "found");
        reverifies(&dir.path().join(r["witness"].as_str().unwrap()));
    }
}

#[test]
fn catalog_resume_matches_an_uninterrupted_run() {
    let full = TempDir::new().unwrap();
    assert_eq!(code(&catalog(full.path(), &["--threads", "3"])), 0);
    let expected = std::fs::read(full.path().join("catalog.jsonl")).unwrap();

    let part = TempDir::new().unwrap();
    assert_eq!(code(&catalog(part.path(), &["--limit", "4"])), 0);
    let path = part.path().join("catalog.jsonl");
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 4);
    // a crash mid-write leaves a torn line behind
    let mut torn = std::fs::read(&path).unwrap();
    torn.extend_from_slice(br#"{"config":"0123","ind"#);
    std::fs::write(&path, torn).unwrap();
    assert_eq!(code(&catalog(part.path(), &["--threads", "1"])), 0);
    assert_eq!(std::fs::read(&path).unwrap(), expected);

    // a finished catalog is left alone
    assert_eq!(code(&catalog(part.path(), &[])), 0);
    assert_eq!(std::fs::read(&path).unwrap(), expected);
}

#[test]
fn catalog_refuses_a_different_configuration() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&catalog(dir.path(), &["--limit", "1"])), 0);
    let o = gaptile(
        dir.path(),
        &[
            "catalog",
            "--max-distance",
            "4",
            "--max-size",
            "3",
            "--n-max",
            "40",
        ],
    );
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("configuration"));
}

#[test]
fn catalog_flags_candidates() {
    let dir = TempDir::new().unwrap();
    // N_max below the minimum for {2, 3} leaves it unresolved
    let o = gaptile(
        dir.path(),
        &[
            "catalog",
            "--max-distance",
            "3",
            "--max-size",
            "2",
            "--n-max",
            "12",
        ],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("CANDIDATE 2:1,3:1"), "{}", stdout(&o));
    let text = std::fs::read_to_string(dir.path().join("catalog.jsonl")).unwrap();
    assert!(text.contains(r#""outcome":"not_found""#));
    assert!(text.contains(r#""candidate":true"#));
}

#[test]
fn conditions_report() {
    let dir = TempDir::new().unwrap();
    let o = gaptile(dir.path(), &["conditions", "--gaps", "1,2,63", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let cjk = v
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "cjk")
        .unwrap();
    assert_eq!(cjk["status"], "not_satisfied");
    let o = gaptile(dir.path(), &["conditions", "--gaps", "1,2,252"]);
    assert!(stdout(&o)
        .lines()
        .any(|l| l.starts_with("cjk") && l.contains(" satisfied")));
}
