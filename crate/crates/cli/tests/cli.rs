use std::process::{Command, Output};

fn powerwl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powerwl"))
        .args(args)
        .env_remove("POWERWL_THREADS")
        .output()
        .expect("spawn powerwl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

#[test]
fn density_macro_csv_has_metadata_and_values() {
    let o = powerwl(&["density-macro", "--alpha", "2", "--grid", "0.5:3:6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("# powerwl "));
    assert!(text.contains("# command: powerwl density-macro"));
    assert!(text.contains("# config: {"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|&(_, y)| y.is_finite() && y > 0.0));
}

#[test]
fn sample_reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = ["sample", "--N", "4", "--alpha", "1.5", "--draws", "50", "--seed", "11"];
    let mut args_a: Vec<&str> = base.to_vec();
    args_a.extend(["--threads", "1", "--out", a.to_str().unwrap()]);
    let mut args_b: Vec<&str> = base.to_vec();
    args_b.extend(["--threads", "3", "--out", b.to_str().unwrap()]);
    assert!(powerwl(&args_a).status.success());
    assert!(powerwl(&args_b).status.success());
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!ta.is_empty());
    assert_eq!(ta, tb);
    let parsed = powerwl::sampler::read_csv(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert_eq!(parsed.seed, 11);
    assert_eq!(parsed.draws(), 50);
}

#[test]
fn selfcheck_passes() {
    let o = powerwl(&["selfcheck"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn usage_and_domain_errors_exit_2() {
    // gamma below the integrability bound (β/2)N(N+ν) = 9
    let o = powerwl(&["finite-n", "--N", "3", "--gamma", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma"));
    assert_eq!(powerwl(&["density-macro", "--alpha", "-2"]).status.code(), Some(2));
    assert_eq!(powerwl(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(powerwl(&["sample", "--alpha", "1", "--gamma", "9"]).status.code(), Some(2));
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\nalpha = 4\ngrid = 1:2:2\n").unwrap();
    let from_cfg = stdout(&powerwl(&["density-macro", "--config", cfg.to_str().unwrap()]));
    assert!(from_cfg.contains("\"alpha\":4.0"), "{from_cfg}");
    assert_eq!(data_rows(&from_cfg).len(), 2);
    let overridden = stdout(&powerwl(&["density-macro", "--config", cfg.to_str().unwrap(), "--alpha", "1"]));
    assert!(overridden.contains("\"alpha\":1.0"), "{overridden}");
    assert_ne!(data_rows(&from_cfg), data_rows(&overridden));
}

#[test]
fn fit_reads_an_eigenvalue_list() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("eig.txt");
    let eig = powerwl::specfit::synthetic_spectrum(1.0, 0.5, 20, 400, 3, powerwl::Exec::default()).unwrap();
    let text: String = eig.iter().map(|x| format!("{x}\n")).collect();
    std::fs::write(&input, text).unwrap();
    let o = powerwl(&["fit", "--input", input.to_str().unwrap(), "--c", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let alpha = v["result"]["alpha_hat"].as_f64().unwrap();
    assert!((alpha - 1.0).abs() < 0.4, "alpha_hat = {alpha}");
}
