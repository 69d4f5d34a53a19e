//! End-to-end checks of the command-line surface: file round trips,
//! deterministic output bytes, fixtures, and rendering.

use std::fs;
use std::path::PathBuf;

use hypertess::cli::files::{DualFile, PointSetFile, TessellationFile};
use hypertess::cli::run;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hypertess-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn cli(args: &[&str]) -> i32 {
    let mut argv = vec!["hypertess".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    run(argv)
}

#[test]
fn fixture_bad_example_has_2n_plus_1_points() {
    let dir = scratch("fixture");
    let out = dir.join("bad.json");
    assert_eq!(cli(&["fixture", "bad-example", "--r-inf", "1.25", "--n", "8", "--out", out.to_str().unwrap()]), 0);
    let file: PointSetFile = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file.points.len(), 17);
    assert_eq!(file.model, "halfplane");
    // the float pipeline consumes it
    let tess_out = dir.join("bad-tess.json");
    assert_eq!(
        cli(&["delaunay", "--in", out.to_str().unwrap(), "--float", "--out", tess_out.to_str().unwrap()]),
        0
    );
    let tess: TessellationFile = serde_json::from_str(&fs::read_to_string(&tess_out).unwrap()).unwrap();
    assert_eq!(tess.mode, "float");
    assert_eq!(tess.sites.len(), 17);
}

#[test]
fn delaunay_roundtrip_and_deterministic_bytes() {
    let dir = scratch("delaunay");
    let pts = dir.join("tri.json");
    assert_eq!(cli(&["fixture", "three-point", "--config", "left", "--out", pts.to_str().unwrap()]), 0);
    let t1 = dir.join("t1.json");
    let t2 = dir.join("t2.json");
    assert_eq!(cli(&["delaunay", "--in", pts.to_str().unwrap(), "--exact", "--out", t1.to_str().unwrap()]), 0);
    assert_eq!(cli(&["delaunay", "--in", pts.to_str().unwrap(), "--exact", "--out", t2.to_str().unwrap()]), 0);
    let b1 = fs::read(&t1).unwrap();
    let b2 = fs::read(&t2).unwrap();
    assert_eq!(b1, b2, "same inputs and flags must give identical bytes");

    // file round trip is the identity
    let parsed: TessellationFile = serde_json::from_str(std::str::from_utf8(&b1).unwrap()).unwrap();
    let mut rewritten = serde_json::to_string_pretty(&parsed).unwrap();
    rewritten.push('\n');
    assert_eq!(rewritten.as_bytes(), &b1[..]);

    // one 2-cell for three generic sites
    assert_eq!(parsed.cells.iter().filter(|c| c.dim == 2).count(), 1);
    assert_eq!(parsed.cells.len(), 7);
    assert_eq!(parsed.mode, "exact");
}

#[test]
fn dual_and_voronoi_subcommands() {
    let dir = scratch("dual");
    let pts = dir.join("tri.json");
    assert_eq!(cli(&["fixture", "three-point", "--config", "middle", "--out", pts.to_str().unwrap()]), 0);
    let d = dir.join("dual.json");
    assert_eq!(cli(&["dual", "--in", pts.to_str().unwrap(), "--out", d.to_str().unwrap()]), 0);
    let dual: DualFile = serde_json::from_str(&fs::read_to_string(&d).unwrap()).unwrap();
    // middle configuration: 3 vertices and the two apex edges, no 2-cell
    assert_eq!(dual.cells.len(), 5);
    assert!(dual.cells.iter().all(|c| c.site_ids.len() <= 2));
    // voronoi subcommand emits the same shape of file
    let v = dir.join("vor.json");
    assert_eq!(cli(&["voronoi", "--in", pts.to_str().unwrap(), "--out", v.to_str().unwrap()]), 0);
    let vor: DualFile = serde_json::from_str(&fs::read_to_string(&v).unwrap()).unwrap();
    assert_eq!(vor.cells.len(), dual.cells.len());
    // float mode is rejected for duality
    assert_eq!(cli(&["dual", "--in", pts.to_str().unwrap(), "--float", "--out", v.to_str().unwrap()]), 2);
}

#[test]
fn render_styles_follow_circumsphere_kind() {
    let dir = scratch("render");
    for (config, marker) in [
        ("left", "circ-metric"),
        ("middle", "circ-horo"),
        ("right", "circ-equi"),
    ] {
        let pts = dir.join(format!("{config}.json"));
        let tess = dir.join(format!("{config}-t.json"));
        let svg = dir.join(format!("{config}.svg"));
        assert_eq!(cli(&["fixture", "three-point", "--config", config, "--out", pts.to_str().unwrap()]), 0);
        assert_eq!(cli(&["delaunay", "--in", pts.to_str().unwrap(), "--out", tess.to_str().unwrap()]), 0);
        for model in ["poincare", "halfplane"] {
            assert_eq!(
                cli(&["render", "--in", tess.to_str().unwrap(), "--render-model", model, "--out", svg.to_str().unwrap()]),
                0
            );
            let body = fs::read_to_string(&svg).unwrap();
            assert!(body.contains(marker), "{config}/{model} should draw {marker}");
            assert!(body.contains("<svg"));
            if config == "right" {
                assert!(body.contains("equi-axis"), "equidistant arc needs its axis");
            }
        }
    }
    // deterministic bytes for the same input
    let pts = dir.join("left.json");
    let tess = dir.join("left-t.json");
    let s1 = dir.join("s1.svg");
    let s2 = dir.join("s2.svg");
    let _ = pts;
    assert_eq!(cli(&["render", "--in", tess.to_str().unwrap(), "--render-model", "halfplane", "--out", s1.to_str().unwrap()]), 0);
    assert_eq!(cli(&["render", "--in", tess.to_str().unwrap(), "--render-model", "halfplane", "--out", s2.to_str().unwrap()]), 0);
    assert_eq!(fs::read(&s1).unwrap(), fs::read(&s2).unwrap());
}

#[test]
fn render_voronoi_overlay_and_empty_input() {
    let dir = scratch("overlay");
    // symmetric triple: overlay shows three bisector edges and one vertex
    let pts = dir.join("sym.json");
    fs::write(
        &pts,
        serde_json::to_string_pretty(&PointSetFile {
            model: "hyperboloid".into(),
            dim: 2,
            points: vec![
                vec!["5/4".into(), "3/4".into(), "0".into()],
                vec!["5/4".into(), "-9/20".into(), "3/5".into()],
                vec!["5/4".into(), "-9/20".into(), "-3/5".into()],
            ],
        })
        .unwrap(),
    )
    .unwrap();
    let tess = dir.join("t.json");
    let dual = dir.join("d.json");
    let svg = dir.join("o.svg");
    assert_eq!(cli(&["delaunay", "--in", pts.to_str().unwrap(), "--out", tess.to_str().unwrap()]), 0);
    assert_eq!(cli(&["dual", "--in", pts.to_str().unwrap(), "--out", dual.to_str().unwrap()]), 0);
    assert_eq!(
        cli(&[
            "render", "--in", tess.to_str().unwrap(), "--render-model", "poincare",
            "--overlay", dual.to_str().unwrap(), "--out", svg.to_str().unwrap()
        ]),
        0
    );
    let body = fs::read_to_string(&svg).unwrap();
    assert_eq!(body.matches("voronoi-edge").count(), 3);
    assert_eq!(body.matches("voronoi-vertex").count(), 1);

    // empty site list: boundary only
    let empty = dir.join("empty.json");
    fs::write(
        &empty,
        serde_json::to_string_pretty(&TessellationFile {
            sites: vec![],
            cells: vec![],
            top_dim: 0,
            ambient_dim: 2,
            mode: "exact".into(),
            provenance: hypertess::cli::files::Provenance {
                tool: "test".into(),
                mode: "exact".into(),
                seed: 0,
            },
        })
        .unwrap(),
    )
    .unwrap();
    let svg2 = dir.join("empty.svg");
    assert_eq!(
        cli(&["render", "--in", empty.to_str().unwrap(), "--render-model", "poincare", "--out", svg2.to_str().unwrap()]),
        0
    );
    let body = fs::read_to_string(&svg2).unwrap();
    assert!(body.contains("<circle")); // the boundary circle
    assert!(!body.contains("circ-metric"));
}

#[test]
fn orbit_subcommand_writes_reports() {
    let dir = scratch("orbit");
    let group = dir.join("group.json");
    fs::write(
        &group,
        r#"{
  "generators": [[["1","1"],["1","2"]], [["1","-1"],["-1","2"]]],
  "bases": [["1","0","0"]],
  "max_word_length": 3
}"#,
    )
    .unwrap();
    let out = dir.join("report.json");
    let tess = dir.join("orbit-tess.json");
    assert_eq!(
        cli(&[
            "orbit", "--group", group.to_str().unwrap(),
            "--out", out.to_str().unwrap(),
            "--tess-out", tess.to_str().unwrap()
        ]),
        0
    );
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["point_count"], 53);
    assert_eq!(report["equivariance_violations"], 0);
    let t: TessellationFile = serde_json::from_str(&fs::read_to_string(&tess).unwrap()).unwrap();
    assert_eq!(t.sites.len(), 53);
}

#[test]
fn verify_subcommand_and_error_codes() {
    let dir = scratch("verify");
    assert_eq!(
        cli(&["verify", "--instances", "4", "--min-sites", "4", "--max-sites", "7", "--seed", "11"]),
        0
    );
    // parse failure: missing file
    let missing = dir.join("nope.json");
    let out = dir.join("out.json");
    assert_eq!(cli(&["delaunay", "--in", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]), 2);
    // malformed json
    let bad = dir.join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(cli(&["delaunay", "--in", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]), 2);
    // unknown subcommand
    assert_eq!(cli(&["frobnicate"]), 2);
}
