use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spectral-lab"));
    c.env_remove("SPECTRAL_LAB_THREADS");
    c
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn stderr_record(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("stderr is not json ({e}): {text}"))
}

fn shipped_configs() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn list_names_every_kind() {
    let o = bin().arg("--list").output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for k in [
        "oseen-scaling",
        "picard",
        "continuous-dependence",
        "bb-ratio-2d",
        "bb-ratio-3d",
        "gn-ratio",
        "maxwell-strichartz",
        "wave-fixture",
    ] {
        assert!(text.contains(k), "{k} missing from {text}");
    }
}

#[test]
fn shipped_configs_validate() {
    let configs = shipped_configs();
    assert_eq!(configs.len(), 8);
    for c in configs {
        let o = bin().arg("validate").arg(&c).output().unwrap();
        assert!(o.status.success(), "{}: {}", c.display(), String::from_utf8_lossy(&o.stderr));
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.starts_with("ok\n"));
        assert!(text.contains("[grid]"));
    }
}

#[test]
fn odd_grid_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.toml", "experiment = \"gn-ratio\"\nseed = 1\n[grid]\nn = 7\n");
    let o = bin().arg("validate").arg(&c).output().unwrap();
    assert!(!o.status.success());
    let rec = stderr_record(&o);
    assert_eq!(rec["error"], "precondition");
    assert!(rec["message"].as_str().unwrap().contains("n must be even and >= 8"), "{rec}");
}

#[test]
fn missing_seed_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.toml", "experiment = \"gn-ratio\"\n[grid]\nn = 32\n");
    let o = bin().arg("validate").arg(&c).output().unwrap();
    assert!(!o.status.success());
    let rec = stderr_record(&o);
    assert_eq!(rec["error"], "parse");
    assert!(rec["message"].as_str().unwrap().contains("seed"), "{rec}");
}

#[test]
fn parse_errors_carry_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.toml", "experiment = \"gn-ratio\"\nseed = 1\n[grid]\nn = 32\n[ratio]\nbeta = \n");
    let o = bin().arg("validate").arg(&c).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_record(&o)["line"], 6);
}

#[test]
fn inadmissible_exponents_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "c.toml",
        "experiment = \"maxwell-strichartz\"\nseed = 1\n[grid]\nn = 16\n[strichartz]\nqt = 2.0\nk_max = 4\n",
    );
    let o = bin().arg("run").arg(&c).arg("--out").arg(dir.path()).output().unwrap();
    assert!(!o.status.success());
    let rec = stderr_record(&o);
    assert!(rec["message"].as_str().unwrap().contains("q tilde = 2 outside (2, inf]"), "{rec}");
    assert!(!dir.path().join("maxwell-strichartz-1.csv").exists());
}

fn run_into(config: &Path, out: &Path, threads: &str) -> (Vec<u8>, Vec<u8>, serde_json::Value) {
    let o = bin().arg("run").arg(config).arg("--out").arg(out).arg("--threads").arg(threads).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stem = config.file_stem().unwrap().to_str().unwrap();
    let csv = std::fs::read(out.join(format!("{stem}.csv"))).unwrap();
    let json = std::fs::read(out.join(format!("{stem}.json"))).unwrap();
    let manifest = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    (csv, json, manifest)
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "gn-ratio-11.toml",
        "experiment = \"gn-ratio\"\nseed = 11\n[grid]\nn = 32\n[ratio]\ncount = 12\nk_max = 6\nrefine = [64]\n",
    );
    let a = run_into(&c, &dir.path().join("a"), "1");
    let b = run_into(&c, &dir.path().join("b"), "2");
    let again = run_into(&c, &dir.path().join("c"), "1");
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.0, again.0);
    let csv = String::from_utf8(a.0).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 12);
    assert_eq!(a.2["config"]["seed"], 11);
    assert_eq!(a.2["threads"], 1);
}

#[test]
fn wave_fixture_run_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "wave-fixture-0.toml",
        "experiment = \"wave-fixture\"\nseed = 0\n[grid]\nn = 16\nbox_length = 3.0\n[wave]\nnt = 33\n",
    );
    let (csv, json, _) = run_into(&c, &dir.path().join("out"), "1");
    let json: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert!(json["result"]["max_error"].as_f64().unwrap() < 1e-10, "{json}");
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 34);
}

#[test]
fn thread_count_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "c.toml",
        "experiment = \"bb-ratio-3d\"\nseed = 2\n[grid]\nn = 16\n[ratio]\ncount = 3\nk_max = 4\n",
    );
    let out = dir.path().join("out");
    let o = bin().env("SPECTRAL_LAB_THREADS", "1").arg("run").arg(&c).arg("--out").arg(&out).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["threads"], 1);
    assert!(out.join("bb-ratio-3d-2.csv").exists());
}

#[test]
fn small_picard_run_reports_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(
        dir.path(),
        "picard-3.toml",
        "experiment = \"picard\"\nseed = 3\n[grid]\nn = 32\n[picard]\ndatum = \"two-mode\"\namplitude = 0.1\n\
         t0 = 0.1\nnt = 8\nquad_m = 16\ncompare_stepper = true\n",
    );
    let (csv, json, _) = run_into(&c, &dir.path().join("out"), "1");
    let json: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(json["result"]["trace"]["converged"], true);
    assert!(json["result"]["stepper"]["relative_sup_w11_gap"].as_f64().unwrap() < 5e-3);
    let csv = String::from_utf8(csv).unwrap();
    assert!(csv.starts_with("t,L1,W11,Linf_v,L2_gradv\n"));
    assert_eq!(csv.lines().count(), 9);
}
