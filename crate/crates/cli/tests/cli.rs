use lowlying::hecke::{build_spaces, eigenforms, write_cache};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lowlying"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lowlying-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Data rows (no header, no metadata) as string fields.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(l.as_bytes());
            r.records().next().unwrap().unwrap().iter().map(String::from).collect()
        })
        .collect()
}

fn verdicts(text: &str) -> Vec<String> {
    let mut v: Vec<String> = rows(text).into_iter().map(|r| r[7].clone()).collect();
    v.dedup();
    v
}

#[test]
fn symplectic_one_level_matches_prediction() {
    let o = run(&["rmt", "--group", "USp", "--N", "40", "--samples", "10000", "--sigma", "0.5"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r[0][0], "USp");
    assert_eq!(r[0][3], "one-level");
    let emp: f64 = r[0][4].parse().unwrap();
    let pred: f64 = r[0][5].parse().unwrap();
    let se: f64 = r[0][6].parse().unwrap();
    assert!((pred - 0.75).abs() < 1e-12);
    assert!((emp - 0.75).abs() < 3.0 * se, "{emp} ± {se}");
}

#[test]
fn unitary_prediction_is_ghat0() {
    let o = run(&["rmt", "--group", "U", "--N", "10", "--samples", "200", "--sigma", "0.5"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][5].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["rmt", "--N", "10"]).status.code(), Some(1));
    assert_eq!(run(&["rmt", "--group", "GL3"]).status.code(), Some(1));
    assert_eq!(run(&["rmt", "--group", "U", "--sigma", "1.5"]).status.code(), Some(1));
    assert_eq!(run(&["rmt", "--group", "U", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["family", "--k", "12"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn orthogonal_tie_at_one_level() {
    let o = run(&["family", "--tag", "phi-sym2f", "--k", "12", "--sigma", "0.125", "--maass", "data/even13.txt"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(verdicts(&stdout(&o)), vec!["orthogonal-tie"]);
}

#[test]
fn phi_f_symplectic_at_k16() {
    let o = run(&["family", "--tag", "phi-f", "--k", "16", "--sigma", "0.125"]);
    assert!(o.status.success());
    assert_eq!(verdicts(&stdout(&o)), vec!["USp"]);
}

#[test]
fn two_level_picks_soeven() {
    let o = run(&["family", "--tag", "phi-sym2f", "--two-level", "--k", "12", "--sigma", "0.125"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(verdicts(&text), vec!["SOeven"]);
    assert!(rows(&text).iter().any(|r| r[4] == "calibrated_d2" && r[3] == "2"));
}

#[test]
fn family_rows_carry_residuals() {
    let o = run(&["family", "--tag", "phi-sym2f", "--k", "12,16", "--sigma", "0.125"]);
    let r = rows(&stdout(&o));
    for k in ["12", "16"] {
        let gamma = r.iter().find(|x| x[1] == k && x[4] == "gamma_term").unwrap();
        assert!(gamma[6].parse::<f64>().unwrap() >= 0.0);
    }
}

#[test]
fn default_checks_pass() {
    let o = run(&["checks"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(!rows(&text).iter().any(|r| r[1] == "fail"));
    assert!(rows(&text).iter().filter(|r| r[0] == "petersson-decay-p2" && r[1] == "pass").count() >= 5);
}

fn cache_fixture(dir: &Path) -> PathBuf {
    let spaces = build_spaces(&[12, 24], 200).unwrap();
    let mut buf = Vec::new();
    for s in &spaces {
        write_cache(&eigenforms(s, 200).unwrap(), 100, &mut buf).unwrap();
    }
    let path = dir.join("cache.txt");
    std::fs::write(&path, buf).unwrap();
    path
}

#[test]
fn hecke_cache_consistency_and_corruption() {
    let dir = scratch("cache");
    let path = cache_fixture(&dir);
    let p = path.to_str().unwrap();
    let ok = run(&["checks", "--weights", "12,24", "--hecke-cache", p]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("hecke-cache,pass"));

    let text = std::fs::read_to_string(&path).unwrap();
    let corrupted: Vec<String> = text
        .lines()
        .map(|l| if l.starts_with("24 97 ") { "24 97 1.5e0".to_string() } else { l.to_string() })
        .collect();
    std::fs::write(&path, corrupted.join("\n")).unwrap();
    let bad = run(&["checks", "--weights", "12,24", "--hecke-cache", p]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(stdout(&bad).contains("hecke-cache,fail"));
}

#[test]
fn maass_bound_violation_fails_checks() {
    let dir = scratch("maass");
    let src = std::fs::read_to_string(lowlying::maass::data_dir().join("even13.txt")).unwrap();
    let patched: Vec<String> = src
        .lines()
        .map(|l| if l.starts_with("31 ") { "31 9.0".to_string() } else { l.to_string() })
        .collect();
    let path = dir.join("phi.txt");
    std::fs::write(&path, patched.join("\n")).unwrap();
    let o = run(&["checks", "--weights", "12", "--maass", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("maass-bounds,fail"));
}

#[test]
fn malformed_data_exits_2() {
    let dir = scratch("malformed");
    let path = dir.join("phi.txt");
    std::fs::write(&path, "maass t=13.78 parity=even\n2 0.5\n4 0.1\n").unwrap();
    let o = run(&["family", "--tag", "phi-f", "--maass", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["family", "--tag", "phi-f", "--maass", "/nonexistent/phi.txt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn data_directory_from_environment() {
    let empty = scratch("emptydata");
    let o = bin()
        .args(["family", "--tag", "phi-sym2f", "--k", "12"])
        .env("LOWLYING_DATA", &empty)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin()
        .args(["family", "--tag", "phi-sym2f", "--k", "12"])
        .env("LOWLYING_DATA", lowlying::maass::data_dir())
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn output_is_deterministic_and_hash_ignores_path() {
    let dir = scratch("det");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    let args = ["rmt", "--group", "SOodd,O", "--N", "12", "--samples", "300", "--seed", "5"];
    for p in [&a, &b] {
        let o = bin().args(args).arg("--output").arg(p).output().unwrap();
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("group,N,samples,statistic,empirical,predicted,stderr\n"));
    assert!(text.lines().any(|l| l.starts_with("# config-sha256 ")));
    assert!(text.lines().last().unwrap().starts_with('#'));
}

#[test]
fn config_file_with_flag_override() {
    let dir = scratch("config");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "command=rmt\ngroups=USp\nn=10\nsamples=100\nsigma=0.4\nseed=3\n").unwrap();
    let from_file = run(&["rmt", "--config", cfg.to_str().unwrap(), "--sigma", "0.3"]);
    let from_flags = run(&["rmt", "--group", "USp", "--N", "10", "--samples", "100", "--sigma", "0.3", "--seed", "3"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, from_flags.stdout);
    assert!(stdout(&from_file).contains("# sigma=0.3"));

    std::fs::write(&cfg, "command=family\n").unwrap();
    assert_eq!(run(&["rmt", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["rmt", "--config", "/nonexistent.cfg"]).status.code(), Some(2));
}

#[test]
fn per_sample_output() {
    let o = run(&["rmt", "--group", "SOeven", "--N", "6", "--samples", "25", "--per-sample"]);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 50);
    assert_eq!(r[49][2], "24");
}

#[test]
fn prime_sums_gamma_root_number() {
    let o = run(&["prime-sums", "--sigma", "0.5", "--R", "1000,1000000"]);
    let r = rows(&stdout(&o));
    let res: Vec<f64> = r.iter().map(|x| x[3].parse().unwrap()).collect();
    assert!(res[1] < res[0]);
    assert!(res[1] <= r[1][6].parse().unwrap());

    let o = run(&["gamma", "--tag", "phi-sym2f", "--k", "12,50"]);
    let r = rows(&stdout(&o));
    assert!(r.iter().all(|x| x[8] == "true"));

    let o = run(&["root-number", "--k", "12..16"]);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 6);
    assert!(r.iter().all(|x| x[2] == "1"));
}
