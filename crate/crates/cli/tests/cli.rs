use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soliton-lab"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("SOLITONLAB_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

/// Checks the manifest against the exit status and that every listed file exists.
fn manifest(dir: &Path) -> Value {
    let m = read_json(&dir.join("manifest.json"));
    assert_eq!(m["schema"], "manifest.v1");
    for r in m["reports"].as_array().unwrap() {
        assert!(dir.join(r["path"].as_str().unwrap()).exists());
    }
    for f in m["data_files"].as_array().unwrap() {
        assert!(dir.join(f.as_str().unwrap()).exists());
    }
    m
}

#[test]
fn catalog_listing() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["catalog"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("sphere n=2 radius 2"));
    let o = run(d.path(), &["catalog", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().any(|e| e["id"]["kind"] == "sphere"));
    let o = run(d.path(), &["catalog", "--n", "7"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("sphere n=7") && text.contains("cylinder k=6 n=7"));
}

#[test]
fn verify_examples() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&run(d.path(), &["verify", "--surface", "sphere", "--n", "2"])), 0);
    assert_eq!(manifest(d.path())["pass"], true);
    let d = TempDir::new().unwrap();
    let o = run(
        d.path(),
        &[
            "verify",
            "--surface",
            "cylinder",
            "--k",
            "1",
            "--n",
            "2",
            "--rtrunc",
            "6",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(d.path());
    assert_eq!(m["reports"].as_array().unwrap().len(), 3);
    let fields = std::fs::read_to_string(d.path().join("fields.csv")).unwrap();
    assert!(fields.starts_with("index,x0,x1,x2,H,normA2,residual\n"));
}

#[test]
fn usage_errors_exit_2_without_manifest() {
    for args in [
        &["verify", "--surface", "sphere", "--n", "1"][..],
        &["spectrum", "--surface", "plane"],
        &["estimates", "ssy", "--surface", "plane", "--R", "6", "--q", "0.9"],
        &[
            "estimates",
            "bootstrap",
            "--surface",
            "plane",
            "--n",
            "7",
            "--R",
            "3",
            "--lambda0",
            "1",
            "--h",
            "1",
        ],
        &["translator", "bowl", "--n", "2", "--rmax", "1", "--step", "1"],
    ] {
        let d = TempDir::new().unwrap();
        assert_eq!(code(&run(d.path(), args)), 2, "{args:?}");
        assert!(!d.path().join("manifest.json").exists(), "{args:?}");
    }
}

#[test]
fn plane_spectrum() {
    let d = TempDir::new().unwrap();
    assert_eq!(
        code(&run(
            d.path(),
            &["spectrum", "--surface", "plane", "--R", "8", "--delta", "0.5"]
        )),
        0
    );
    let s = read_json(&d.path().join("spectrum.json"));
    assert_eq!(s["schema"], "spectrum.v1");
    assert_eq!(s["verdict"], true);
    let l = s["eigenvalues"][0].as_f64().unwrap();
    assert!((-0.501..=-0.45).contains(&l), "{l}");
}

#[test]
fn prop31_on_cylinder_fails() {
    let d = TempDir::new().unwrap();
    let o = run(
        d.path(),
        &[
            "estimates",
            "prop31",
            "--surface",
            "cylinder",
            "--k",
            "1",
            "--n",
            "2",
            "--R",
            "10",
            "--lambda0",
            "1.48",
        ],
    );
    assert_eq!(code(&o), 1);
    assert_eq!(manifest(d.path())["pass"], false);
    let r = read_json(&d.path().join("prop31.json"));
    assert_eq!(r["pass"], false);
    assert!(r["hypothesis_status"].as_str().unwrap().starts_with("not 1/2-stable"));
}

#[test]
fn bowl_command() {
    let d = TempDir::new().unwrap();
    assert_eq!(
        code(&run(
            d.path(),
            &["translator", "bowl", "--n", "2", "--rmax", "10", "--step", "0.01"]
        )),
        0
    );
    let csv = std::fs::read_to_string(d.path().join("bowl_profile.csv")).unwrap();
    assert!(csv.starts_with("r,u,du,normA2\n"));
    let r = read_json(&d.path().join("translator_curvature.json"));
    assert!((r["measurements"]["sup_normA2"].as_f64().unwrap() - 0.5).abs() < 1e-4);
    assert_eq!(r["operator"], "translator");
    manifest(d.path());
}

#[test]
fn reports_are_deterministic() {
    let args = [
        "estimates",
        "ssy",
        "--surface",
        "nearplane",
        "--R",
        "6",
        "--cutoffs",
        "4",
        "--seed",
        "11",
        "--q",
        "0.5",
    ];
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert_eq!(code(&run(a.path(), &args)), 0);
    assert_eq!(code(&run(b.path(), &args)), 0);
    for i in 0..4 {
        let f = format!("ssy-{i:03}.json");
        assert_eq!(
            std::fs::read(a.path().join(&f)).unwrap(),
            std::fs::read(b.path().join(&f)).unwrap()
        );
    }
    assert_eq!(
        std::fs::read(a.path().join("ssy.csv")).unwrap(),
        std::fs::read(b.path().join("ssy.csv")).unwrap()
    );
}

#[test]
fn config_file_precedence() {
    let d = TempDir::new().unwrap();
    let cfg = d.path().join("run.toml");
    std::fs::write(&cfg, "surface = \"plane\"\nR = 6.0\nh = 0.4\ndelta = 0.5\n").unwrap();
    let out = d.path().join("out");
    let o = run(&out, &["--config", cfg.to_str().unwrap(), "spectrum", "--R", "4"]);
    assert_eq!(code(&o), 0);
    let m = manifest(&out);
    assert_eq!(m["config"]["R"], 4.0);
    assert_eq!(m["config"]["h"], 0.4);
    assert_eq!(m["config"]["m"], 4);
    assert_eq!(read_json(&out.join("spectrum.json"))["R"], 4.0);
    std::fs::write(&cfg, "radius = 3\n").unwrap();
    assert_eq!(code(&run(&out, &["--config", cfg.to_str().unwrap(), "spectrum"])), 2);
}

#[test]
fn output_directory_from_environment() {
    let d = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_soliton-lab"))
        .args(["translator", "residual", "--rmax", "2", "--step", "0.02"])
        .env("SOLITONLAB_OUT", d.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(d.path().join("translator_residual.json").exists());
}

#[test]
fn convert_round_trip() {
    let d = TempDir::new().unwrap();
    let args = [
        "estimates",
        "volgrowth",
        "--surface",
        "sphere",
        "--x0",
        "2,0,0",
        "--r",
        "1",
        "--lambda0",
        "1.5",
    ];
    assert_eq!(code(&run(d.path(), &args)), 0);
    let json = d.path().join("volgrowth.json");
    let csv = d.path().join("volgrowth.csv");
    let back = d.path().join("back.json");
    assert_eq!(
        code(&run(
            d.path(),
            &["convert", json.to_str().unwrap(), csv.to_str().unwrap()]
        )),
        0
    );
    assert!(std::fs::read_to_string(&csv)
        .unwrap()
        .starts_with("name,params,lhs,rhs,pass\n"));
    assert_eq!(
        code(&run(
            d.path(),
            &["convert", csv.to_str().unwrap(), back.to_str().unwrap()]
        )),
        0
    );
    let (orig, rows) = (read_json(&json), read_json(&back));
    let row = &rows[0];
    assert_eq!(row["name"], orig["name"]);
    assert_eq!(row["params"], orig["params"]);
    assert_eq!(row["lhs"].as_f64(), orig["lhs"].as_f64());
    assert_eq!(row["pass"], orig["pass"]);
    assert_eq!(
        code(&run(
            d.path(),
            &["convert", json.to_str().unwrap(), back.to_str().unwrap()]
        )),
        2
    );
}
