use std::path::Path;
use std::process::{Command, Output};

fn freefit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freefit"))
        .args(args)
        .env_remove("FREEFIT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .and_then(|v| v.split_whitespace().next())
        .unwrap_or_else(|| panic!("{key} missing in\n{out}"))
        .parse()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn dimer_exit_codes() {
    let ok = freefit(&["dimer", "--J", "1", "--U", "0", "--dv", "0"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = freefit(&["dimer", "--J", "0", "--U", "3", "--dv", "0.5"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("J must be nonzero"));
}

#[test]
fn negative_potential_step_is_accepted() {
    let o = freefit(&["dimer", "--J", "1", "--U", "4", "--dv", "-0.5"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn df_of_spectrum_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "a.txt",
        "# three equal levels\n1/3\n1/3\n1/3\n0\n",
    );
    let o = freefit(&["df", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert!((value(&stdout(&o), "DF") - 1.0 / 6.0).abs() < 1e-12);

    let f = write(dir.path(), "free.txt", "0.36\n0.24\n0.24\n0.16\n");
    let o = freefit(&["df", &f]);
    assert!(value(&stdout(&o), "DF") < 1e-8);

    let f = write(dir.path(), "bad.txt", "0.5\nhalf\n");
    assert_eq!(freefit(&["df", &f]).status.code(), Some(2));

    let missing = dir.path().join("none.txt");
    assert_eq!(
        freefit(&["df", missing.to_str().unwrap()]).status.code(),
        Some(3)
    );
}

#[test]
fn df_numeric_with_restart_log() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "eight.txt",
        "0.3\n0.2\n0.15\n0.12\n0.1\n0.07\n0.04\n0.02\n",
    );
    let o = freefit(&["df", &f, "--modes", "3", "--restarts", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("branch = numeric"));
    assert!(out.contains("# restart, value, evaluations, start"));
    let log_lines = out
        .lines()
        .skip_while(|l| !l.starts_with("# restart"))
        .skip(1)
        .count();
    assert_eq!(log_lines, 8);
    let df = value(&out, "DF");
    assert!((0.0..0.5).contains(&df));
}

#[test]
fn df_of_a_model() {
    let o = freefit(&["df", "--J", "1", "--U", "100", "--dv", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((value(&stdout(&o), "DF") / 2e-6 - 1.0).abs() < 0.05);
}

#[test]
fn sweep_errors() {
    let o = freefit(&["sweep", "--U", "1", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
    let o = freefit(&["sweep", "--U", "2,1"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", "{\"J\": 1, \"bogus\": 2}");
    assert_eq!(freefit(&["sweep", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn sweep_config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"J": 1.0, "dv": 0.5, "U_grid": {"min": 1, "max": 3, "count": 3}, "outputs": ["U", "DF", "mu"]}"#,
    );
    let out = dir.path().join("s.csv");
    let plot = dir.path().join("s.gp");
    let o = freefit(&[
        "sweep",
        "--config",
        &cfg,
        "--dv",
        "0.25",
        "--out",
        out.to_str().unwrap(),
        "--plot-script",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.contains("\"dv\":0.25"));
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "U,DF,mu");
    assert_eq!(body.len(), 4);
    let script = std::fs::read_to_string(&plot).unwrap();
    assert!(script.contains("using 'U':'DF'"));
    assert!(!script.contains("S_int"));
}

#[test]
fn seed_from_environment() {
    let run = |seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_freefit"));
        c.args(["sweep", "--U", "1", "--columns", "U"]);
        match seed {
            Some(s) => c.env("FREEFIT_SEED", s),
            None => c.env_remove("FREEFIT_SEED"),
        };
        c.output().unwrap()
    };
    assert!(stdout(&run(Some("17"))).contains("\"seed\":17"));
    assert!(stdout(&run(None)).contains("\"seed\":0"));
    assert_eq!(run(Some("x")).status.code(), Some(2));
}

#[test]
fn ks_and_aux_reports() {
    let o = freefit(&["ks", "--U", "5", "--dv", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(value(&stdout(&o), "residual") < 1e-10);
    let o = freefit(&["ks", "--U", "2", "--L", "4", "--dv", "0.5"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(value(&stdout(&o), "residual") < 1e-8);
    let o = freefit(&["aux", "--J", "1", "--mu", "0"]);
    let out = stdout(&o);
    assert!((value(&out, "S_aux") - 4f64.ln()).abs() < 1e-12);
}

#[test]
fn verify_flags_diverging_ratio_but_passes() {
    let o = freefit(&["verify", "--U", "0,5,50", "--samples", "200"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    let last = out.lines().find(|l| l.starts_with("U=50")).unwrap();
    assert!(last.contains("diverging"), "{last}");
}
