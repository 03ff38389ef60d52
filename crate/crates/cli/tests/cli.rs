use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn kvqa(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kvqa"))
        .args(args)
        .arg("--out")
        .arg(out)
        .current_dir(repo_root())
        .output()
        .expect("binary runs")
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn two_site_oracle_solve_matches_the_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = kvqa(
        &["solve-gf", "--config", "configs/solve_gf_2site.json"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/solve_gf_2site");
    for name in ["gf_matsubara.csv", "gf_real.csv", "lanczos.json"] {
        let got = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let want = std::fs::read_to_string(golden.join(name)).unwrap();
        assert!(got == want, "{name} differs from the golden copy");
    }
    let m = manifest(dir.path());
    assert_eq!(m["command"], "solve-gf");
    assert_eq!(m["seed"], 7);
    assert!((m["results"]["spectral_weight"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn missing_model_is_a_config_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{ "backend": "oracle" }"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = kvqa(&["solve-gf", "--config", cfg.to_str().unwrap()], &out_dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model"));
    assert!(!out_dir.exists());
}

#[test]
fn validate_config_accepts_the_shipped_configs() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, file) in [
        ("solve-gf", "solve_gf_2site.json"),
        ("solve-gf", "solve_gf_4site_kvqa.json"),
        ("benchmark-gf", "benchmark_gf.json"),
        ("benchmark-moments", "benchmark_moments.json"),
        ("dmft", "dmft_u0.json"),
        ("dmft", "dmft_u8.json"),
        ("dmft", "dmft_u8_kvqa.json"),
    ] {
        let path = format!("configs/{file}");
        let out = kvqa(
            &["validate-config", "--kind", kind, "--config", &path],
            dir.path(),
        );
        assert!(
            out.status.success(),
            "{file}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = kvqa(
        &[
            "validate-config",
            "--kind",
            "dmft",
            "--config",
            "configs/benchmark_gf.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_benchmark_reports_zero_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.json");
    std::fs::write(
        &cfg,
        r#"{ "n_models": 2, "layers": [2], "n_freq": 20, "backend": "oracle" }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = kvqa(
        &["benchmark-gf", "--config", cfg.to_str().unwrap()],
        &out_dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = manifest(&out_dir);
    let max_mean = m["results"]["max_mean_dG"][0]["max_mean_dG"]
        .as_f64()
        .unwrap();
    assert!(max_mean <= 1e-12);
    let csv = std::fs::read_to_string(out_dir.join("benchmark_gf.csv")).unwrap();
    assert!(csv.starts_with("n_layers,omega_index,mean_dG,std_dG\n"));
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn non_interacting_dmft_converges_and_writes_every_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let out = kvqa(&["dmft", "--config", "configs/dmft_u0.json"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = manifest(dir.path());
    assert_eq!(m["results"]["converged"], true);
    let n = m["results"]["iterations"].as_u64().unwrap();
    assert!(n <= 3);
    for k in 1..=n {
        for f in [
            "gf_matsubara.csv",
            "gf_real.csv",
            "dos.csv",
            "sigma_matsubara.csv",
            "g_loc_matsubara.csv",
            "bath.csv",
        ] {
            assert!(
                dir.path().join(format!("iteration_{k:03}/{f}")).exists(),
                "{k} {f}"
            );
        }
    }
}

#[test]
fn reruns_from_a_manifest_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(
        kvqa(&["solve-gf", "--config", "configs/solve_gf_2site.json"], &a)
            .status
            .success()
    );
    let replay = a.join("manifest.json");
    assert!(
        kvqa(&["solve-gf", "--config", replay.to_str().unwrap()], &b)
            .status
            .success()
    );
    let strip = |mut m: Value| {
        m.as_object_mut().unwrap().remove("duration_s");
        m
    };
    assert_eq!(strip(manifest(&a)), strip(manifest(&b)));
    for name in ["gf_matsubara.csv", "gf_real.csv", "lanczos.json"] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap()
        );
    }
}

#[test]
fn kvqa_solve_reports_its_deviation_from_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = kvqa(
        &[
            "solve-gf",
            "--config",
            "configs/solve_gf_2site.json",
            "--backend",
            "kvqa",
            "--layers",
            "4",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = manifest(dir.path());
    let dev = m["results"]["oracle_max_relative_deviation"]
        .as_f64()
        .unwrap();
    assert!(dev.is_finite() && dev < 1e-3, "{dev}");
    let lanczos: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("lanczos.json")).unwrap())
            .unwrap();
    assert!(lanczos
        .as_array()
        .unwrap()
        .iter()
        .all(|b| b["fidelity"].as_f64().is_some()));
}

#[test]
fn bad_layer_list_is_rejected_by_the_parser() {
    let dir = tempfile::tempdir().unwrap();
    let out = kvqa(&["benchmark-gf", "--layers", "2,x"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
