use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hororatio"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn ratio_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "n_max = 3\nsamples = 4\nu_cylinders = a1=1\n");
    let out = dir.path().join("r.csv");
    let o = run(&["ratio-converge"], &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sample_id,n,sum_u,sum_v,ratio,running_max,reference,abs_deviation");
    assert_eq!(lines.len(), 1 + 4 * 4);
    assert!(!text.contains('\r'));
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[6], "2.5000000000000000e-1");
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "n_max = 2\nsamples = 3\nseed = 1\nu_cylinders = a1=1\n");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    assert!(run(&["ratio-converge"], &cfg, &a).status.success());
    assert!(run(&["ratio-converge", "--seed", "1"], &cfg, &b).status.success());
    assert!(run(&["ratio-converge", "--seed", "2"], &cfg, &c).status.success());
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn exploratory_mode_is_labelled() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "n_max = 2\nsamples = 2\nmode = exploratory-sphere\n");
    let out = dir.path().join("r.csv");
    assert!(run(&["ratio-converge"], &cfg, &out).status.success());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("# no-claim"));
}

#[test]
fn audit_writes_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "n_max = 3\nmodels = 5\n");
    let out = dir.path().join("audit.csv");
    let o = run(&["audit"], &cfg, &out);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("interval_surrogate extreme_besicovich: fail"));
    for f in ["audit.csv", "audit.lp.csv", "audit.properties.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let head = std::fs::read_to_string(&out).unwrap();
    assert!(head.starts_with("model_id,epsilon,lhs_mass,mid_bound,l1_bound,pass\n"));
}

#[test]
fn counterexample_reports_windows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "samples = 5\nmoves = 4\n");
    let out = dir.path().join("j.csv");
    let o = run(&["counterexample-j"], &cfg, &out);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("20/20 moves preserve the window"));
}

#[test]
fn bad_inputs_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let bad = write(dir.path(), "bad.cfg", "v_default = 0\n");
    let o = run(&["ratio-converge"], &bad, &out);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("strictly positive"));
    let unknown = write(dir.path(), "u.cfg", "action = torus\n");
    let o = run(&["ratio-converge"], &unknown, &out);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown action"));
    let o = run(&["audit"], &dir.path().join("missing.cfg"), &out);
    assert!(!o.status.success());
}
