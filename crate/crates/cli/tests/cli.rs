use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_girthlab"));
    c.env_remove("GIRTHLAB_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn cert_body(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(&fs::read(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("meta");
    v
}

#[test]
fn graph_reports_girth_and_degree() {
    let o = run(&["graph", "--spec", "Z5*Z5", "--girth-rmax", "6"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("girth=5 degree=4"));
}

#[test]
fn graph_exports_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["graph", "--spec", "Z*Z", "--R", "2", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("ball.txt")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# spec=Z*Z R=2 d=4"));
    // 17 vertices, 16 tree edges.
    assert_eq!(lines.count(), 16);
}

#[test]
fn zero_retention_never_crosses() {
    let o = run(&["perc", "--spec", "Z*Z", "--p", "0", "--R", "5", "--trials", "10", "--seed", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("estimate 0 "), "{}", stdout(&o));
}

#[test]
fn tree_certificate_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--config", &data("tree4.cfg"), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let cert = cert_body(&dir.path().join("certificate.json"));
    let entries = cert["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|e| e["status"] == "pass"));
}

#[test]
fn certificate_ignores_worker_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, w) in [(&a, "1"), (&b, "8")] {
        let o = run(&["verify", "--config", &data("mixed.cfg"), "--workers", w, "--out", dir.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", stdout(&o));
    }
    assert_eq!(cert_body(&a.path().join("certificate.json")), cert_body(&b.path().join("certificate.json")));
}

#[test]
fn empty_verify_config_gives_metadata_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--seed", "1", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("certificate.json")).unwrap()).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 0);
    assert!(v["meta"]["version"].is_string());
}

#[test]
fn runs_are_byte_identical() {
    let cfg_dir = tempfile::tempdir().unwrap();
    let cfg = cfg_dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "seed = 77\n[perc]\nspec = Z5*Z5\np_grid = 0.2:0.5:4\nR = 4\ntrials = 300\n[saw]\nspec = Z5*Z5\nnmax = 8\nz_grid = 0.1,0.2\ntrials = 300\nrho_ub = 0.8965\n",
    )
    .unwrap();
    let mut outs: Vec<PathBuf> = Vec::new();
    let keep: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for (i, d) in keep.iter().enumerate() {
        let w = if i == 0 { "1" } else { "4" };
        for sub in ["perc", "saw"] {
            let o = run(&[sub, "--config", cfg.to_str().unwrap(), "--workers", w, "--out", d.path().to_str().unwrap()]);
            assert!(o.status.success(), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
        }
        outs.push(d.path().to_path_buf());
    }
    let (a, b) = (files(&outs[0]), files(&outs[1]));
    assert!(a.iter().any(|(n, _)| n.ends_with(".svg")));
    assert!(a.iter().any(|(n, _)| n == "crossing.csv"));
    assert_eq!(a, b);
}

#[test]
fn chi_ratio_band_on_tree() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "saw", "--spec", "Z*Z", "--nmax", "6", "--N", "400", "--z-grid", "0,0.1,0.2,0.3,0.33", "--trials", "0", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("chi.csv")).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let lo_col = r.headers().unwrap().iter().position(|h| h == "ratio_lo").unwrap();
    for rec in r.records() {
        let v: f64 = rec.unwrap()[lo_col].parse().unwrap();
        assert!(v >= 1.0 / 3.0 - 1e-9 && v <= 4.0 / 9.0 + 1e-9, "{v}");
    }
    assert!(dir.path().join("chi-ratio.svg").exists());
}

#[test]
fn empty_csv_plot_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty.csv");
    fs::write(&csv, "").unwrap();
    let out = dir.path().join("plots");
    let o = run(&["report", "--kind", "tail-loglog", "--input", csv.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(!out.exists());
}

#[test]
fn tail_plot_has_reference_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "perc", "--spec", "Z*Z", "--task", "tail", "--p", "0.3333333333333333", "--nmax", "1000", "--trials", "5000", "--seed",
        "5", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let svg = fs::read_to_string(dir.path().join("tail-loglog.svg")).unwrap();
    assert!(svg.contains("slope -1/2"));
    let o = run(&["report", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("tail-loglog.svg")).unwrap(), svg);
}

#[test]
fn bad_inputs_fail_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = run(&["perc", "--spec", "Z*Z", "--p", "0.3", "--trials", "10", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success(), "missing seed must fail");
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
    let o = run(&["perc", "--spec", "Z*Z", "--p-grid", "0.4,0.3", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    let o = run(&["graph", "--spec", "Z*Z", "--bogus"]);
    assert!(!o.status.success());
    let o = run(&["graph", "--spec", "Q7"]);
    assert!(!o.status.success());
    assert!(!out.exists());
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["graph", "--spec", "Z*Z", "--R", "1"])
        .env("GIRTHLAB_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("spheres.csv").exists());
}
