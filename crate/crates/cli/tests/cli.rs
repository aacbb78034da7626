use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use irbm::checkpoint::load_checkpoint;
use irbm::energy::exact_log_partition_small;

fn irbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irbm")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn gen_data(dir: &Path, dims: usize, n: usize) -> String {
    let path = dir.join("data.gbzd").display().to_string();
    let out = irbm(&["gen-data", "--dims", &dims.to_string(), "--n", &n.to_string(), "--seed", "3", "--out", &path]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    path
}

fn train(data: &str, out: &Path, extra: &[&str]) -> Output {
    let out_s = out.display().to_string();
    let mut args = vec!["train", "--data", data, "--out", &out_s, "--epochs", "3", "--batch", "16", "--lr", "0.05"];
    args.extend_from_slice(extra);
    irbm(&args)
}

#[test]
fn train_writes_checkpoint_history_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_data(dir.path(), 9, 64);
    let ck = dir.path().join("ck");
    let out = train(&data, &ck, &["--model", "irbm", "--hidden", "1", "--beta", "1.01", "--reg", "l1", "--lambda", "1e-4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("final K"));
    for f in ["meta.json", "W.f64", "bv.f64", "bh.f64", "adagrad_W.f64", "adagrad_bv.f64", "adagrad_bh.f64", "pcd_v.u8", "pcd_z.i64", "history.csv", "manifest.json"] {
        assert!(ck.join(f).exists(), "{f} missing");
    }
    let history = fs::read_to_string(ck.join("history.csv")).unwrap();
    assert!(history.starts_with("epoch,mean_free_energy,K,wall_seconds\n"));
    assert_eq!(history.lines().count(), 4);
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(ck.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "train");
    assert_eq!(manifest["datasets"][0]["sha256"].as_str().unwrap().len(), 64);
    let ckpt = load_checkpoint(&ck).unwrap();
    assert_eq!(ckpt.epoch, 3);
    assert!(ckpt.params.num_hidden() >= 1);
}

#[test]
fn training_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_data(dir.path(), 9, 64);
    let args = ["--model", "orbm", "--hidden", "4", "--seed", "11", "--checkpoint-every", "2"];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&train(&data, &a, &args)), 0);
    assert_eq!(code(&train(&data, &b, &args)), 0);
    for f in ["meta.json", "W.f64", "bv.f64", "bh.f64", "adagrad_W.f64", "pcd_v.u8", "pcd_z.i64", "manifest.json", "epoch_00002/W.f64"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn usage_and_validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = irbm(&["train", "--model", "rbm", "--hidden", "3", "--out", "x"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--data"), "{}", stderr(&out));

    let data = gen_data(dir.path(), 4, 16);
    let out = train(&data, &dir.path().join("ck"), &["--model", "irbm", "--hidden", "1", "--beta", "1.0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("beta must exceed 1"), "{}", stderr(&out));

    let missing = dir.path().join("nope").display().to_string();
    let out = irbm(&["eval", "--checkpoint", &missing, "--data", &data, "--exact"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    let out = irbm(&["sample", "--checkpoint", &missing, "--out", "x.pgm"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn eval_exact_and_ais_agree() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_data(dir.path(), 8, 128);
    let ck = dir.path().join("ck");
    assert_eq!(code(&train(&data, &ck, &["--model", "orbm", "--hidden", "3"])), 0);
    let ck_s = ck.display().to_string();
    let csv = dir.path().join("exact.csv");
    let out = irbm(&["eval", "--checkpoint", &ck_s, "--data", &data, "--exact", "--csv", &csv.display().to_string()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "model,size,lnZ,lnZ_lo,lnZ_hi,nll,ci");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..2], &["orbm", "3"]);
    let exact: f64 = row[2].parse().unwrap();
    let params = load_checkpoint(&ck).unwrap().params;
    assert!((exact - exact_log_partition_small(&params).unwrap()).abs() < 1e-12);

    let csv = dir.path().join("ais.csv");
    let out = irbm(&[
        "--threads", "1", "eval", "--checkpoint", &ck_s, "--data", &data, "--ais-inter", "1000", "--ais-chains", "64",
        "--csv", &csv.display().to_string(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').skip(2).map(|x| x.parse().unwrap()).collect();
    assert!(row[1] <= exact && exact <= row[2], "{exact} outside [{}, {}]", row[1], row[2]);
}

#[test]
fn exact_eval_rejects_large_models() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_data(dir.path(), 21, 8);
    let ck = dir.path().join("ck");
    assert_eq!(code(&train(&data, &ck, &["--model", "rbm", "--hidden", "2"])), 0);
    let out = irbm(&["eval", "--checkpoint", &ck.display().to_string(), "--data", &data, "--exact"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("enumeration too large"), "{}", stderr(&out));
}

#[test]
fn sample_grid_and_init_modes() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_data(dir.path(), 9, 64);
    let (rbm, orbm) = (dir.path().join("rbm"), dir.path().join("orbm"));
    assert_eq!(code(&train(&data, &rbm, &["--model", "rbm", "--hidden", "3"])), 0);
    assert_eq!(code(&train(&data, &orbm, &["--model", "orbm", "--hidden", "3"])), 0);

    let pgm = dir.path().join("s.pgm");
    let pgm_s = pgm.display().to_string();
    let rbm_s = rbm.display().to_string();
    let out = irbm(&["sample", "--checkpoint", &rbm_s, "--out", &pgm_s, "--steps", "0", "--count", "4", "--columns", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let bytes = fs::read(&pgm).unwrap();
    // 2×2 tiles of 3×3 pixels with one-pixel borders: 9×9 image
    let header = b"P5\n9 9\n255\n";
    assert!(bytes.starts_with(header));
    assert_eq!(bytes.len(), header.len() + 81);

    // zero steps emits the random initial state itself
    let mut rng = irbm::RngStream::new(0, 0);
    let first: Vec<u8> = (0..9).map(|_| if rng.bernoulli(0.5) == 1.0 { 255 } else { 0 }).collect();
    let pixels = &bytes[header.len()..];
    let tile: Vec<u8> = (0..3).flat_map(|r| pixels[(1 + r) * 9 + 1..(1 + r) * 9 + 4].to_vec()).collect();
    assert_eq!(tile, first);

    let out = irbm(&["sample", "--checkpoint", &rbm_s, "--out", &pgm_s, "--init", "zK", "--steps", "2"]);
    assert_eq!(code(&out), 2);
    let out = irbm(&["sample", "--checkpoint", &orbm.display().to_string(), "--out", &pgm_s, "--init", "zK", "--steps", "20"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn inspect_z_tables() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_data(dir.path(), 9, 40);
    let (rbm, irbm_ck) = (dir.path().join("rbm"), dir.path().join("irbm"));
    assert_eq!(code(&train(&data, &rbm, &["--model", "rbm", "--hidden", "3"])), 0);
    assert_eq!(code(&train(&data, &irbm_ck, &["--model", "irbm", "--hidden", "2"])), 0);
    let out_dir = dir.path().join("inspect");
    let out_s = out_dir.display().to_string();
    let out = irbm(&["inspect-z", "--checkpoint", &rbm.display().to_string(), "--data", &data, "--out", &out_s]);
    assert_eq!(code(&out), 2);

    let out = irbm(&[
        "inspect-z", "--checkpoint", &irbm_ck.display().to_string(), "--data", &data, "--out", &out_s, "--intervals",
        "1:2,2:4", "--top", "5",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let table = fs::read_to_string(out_dir.join("p_z_given_v.csv")).unwrap();
    assert!(table.starts_with("example,z,prob\n") && table.contains(",tail,"));
    let top = fs::read_to_string(out_dir.join("top_intervals.csv")).unwrap();
    assert_eq!(top.lines().count(), 1 + 2 * 5);
    assert!(out_dir.join("top_1_2.pgm").exists());

    let out = irbm(&["inspect-z", "--checkpoint", &irbm_ck.display().to_string(), "--data", &data, "--out", &out_s, "--intervals", "3:1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn gradcheck_fresh_models_pass() {
    for model in ["rbm", "orbm", "irbm"] {
        let out = irbm(&["gradcheck", "--model", model, "--examples", "5", "--seed", "2"]);
        assert_eq!(code(&out), 0, "{model}: {}", stderr(&out));
        assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    }
}
