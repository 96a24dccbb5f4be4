use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hzbound(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hzbound"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn classnum_prints_h_and_caches() {
    let dir = tempfile::tempdir().unwrap();
    let o = hzbound(&["classnum", "-d", "-23"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "3\n");
    let cache = fs::read_to_string(dir.path().join("classnum.tsv")).unwrap();
    assert_eq!(cache, "-23\t3\n");

    let o = hzbound(&["--no-cache", "classnum", "-d", "-52"], dir.path());
    assert_eq!(stdout(&o), "2\n");
    let cache = fs::read_to_string(dir.path().join("classnum.tsv")).unwrap();
    assert_eq!(cache, "-23\t3\n");
}

#[test]
fn invalid_discriminant_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for d in ["-5", "7", "0"] {
        let o = hzbound(&["classnum", "-d", d], dir.path());
        assert_eq!(o.status.code(), Some(2), "d={d}");
        assert!(stderr(&o).starts_with("error:"));
    }
}

#[test]
fn bad_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = hzbound(&["selfint", "-p", "13"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = hzbound(
        &["surface-bound", "--c2", "4", "--ksq", "2", "--delta", "1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selfint_compact_and_certified() {
    let dir = tempfile::tempdir().unwrap();
    let o = hzbound(&["selfint", "-p", "13", "-N", "3"], dir.path());
    assert_eq!(stdout(&o), "-2/3\n");
    let o = hzbound(&["selfint", "-p", "17", "-N", "2"], dir.path());
    assert_eq!(stdout(&o), "-1/2\n");

    let o = hzbound(
        &["selfint", "-p", "13", "-N", "3", "--include-ip"],
        dir.path(),
    );
    assert!(o.status.success());
    let text = stdout(&o);
    let (value, err) = text.trim().split_once(" +- ").unwrap();
    let value: f64 = value.parse().unwrap();
    let err: f64 = err.parse().unwrap();
    assert!(err <= 1e-10);
    assert!(value > -2.0 / 3.0);
}

#[test]
fn selfint_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let o = hzbound(&["selfint", "-p", "7", "-N", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o), "error: p must be a prime ≡ 1 mod 4\n");

    let o = hzbound(&["selfint", "-p", "13", "-N", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let o = hzbound(&["selfint", "-p", "13", "-N", "12"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("squarefree"));
    let o = hzbound(
        &["selfint", "-p", "13", "-N", "12", "--allow-non-squarefree"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn scan_writes_csv_and_sibling_cache() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("out")).unwrap();
    let o = hzbound(
        &["scan", "-p", "13", "--n-max", "60", "-o", "out/s.csv"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("p=13 n_max=60 rows="));
    assert!(stdout(&o).contains("min_tn2=-2/3 argmin=3"));
    let csv = fs::read_to_string(dir.path().join("out/s.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("N,eligible,tn2,sigma_floor,lemma2_statement,lemma2_proof,viol_statement,viol_proof")
    );
    assert!(lines.next().unwrap().starts_with("3,true,-2/3,-2/3,"));
    assert!(dir.path().join("out/classnum.tsv").exists());
    assert!(!dir.path().join("classnum.tsv").exists());
}

#[test]
fn scan_output_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = hzbound(
        &[
            "--no-cache",
            "scan",
            "-p",
            "13",
            "--n-max",
            "60",
            "-o",
            "missing/s.csv",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn corrupt_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.tsv"), "-23\t3\n-23\t4\n").unwrap();
    let o = hzbound(&["--cache", "bad.tsv", "classnum", "-d", "-23"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.tsv"));
}

#[test]
fn verify_writes_claims() {
    let dir = tempfile::tempdir().unwrap();
    let o = hzbound(
        &[
            "verify", "-p", "13", "--n-max", "200", "--d-max", "500", "-o", "v.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("v.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "schema,claim_id,parameters,status,witness");
    assert_eq!(lines.len(), 11);
    assert!(lines.iter().all(|l| l.split(',').count() == 5));
    assert!(csv.contains("f_lemma2_statement,p=13;N<=200,FAIL,N=3 tn2=-2/3"));
    assert!(stdout(&o).contains("g_theorem3"));
}

#[test]
fn chern_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = hzbound(&["chern", "-p", "13"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("zeta_K(-1) = 1/6"));
    assert!(text.contains("sigma0 sum = 6 <= 13.3155879996"));
    assert!(text.contains("explicit C^2 bound = -427.526514254"));
    assert!(text.contains("warning:"));
    let o = hzbound(&["chern", "-p", "601"], dir.path());
    assert!(!stdout(&o).contains("warning:"));
}

#[test]
fn surface_bound_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = hzbound(&["surface-bound", "--c2", "4", "--ksq", "2"], dir.path());
    assert_eq!(
        stdout(&o),
        "d2=10\nnine_d2_bound=-90\nexact_constant_bound=-86.0555127546\n"
    );
    let o = hzbound(
        &[
            "surface-bound",
            "--c2",
            "4",
            "--ksq",
            "2",
            "--delta",
            "0.5",
            "--sc",
            "1",
            "--rho",
            "0.3",
        ],
        dir.path(),
    );
    assert!(stdout(&o).contains("chain_lower="));
}
