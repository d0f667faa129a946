use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bibo-funnel"))
        .args(args)
        .env("BIBO_FUNNEL_OUT", out)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn config(name: &str) -> String {
    format!("{}/configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn certify_writes_a_reproducible_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["certify", "--config", &config("reactor.toml")], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cert = std::fs::read_to_string(dir.path().join("certify/certificate.txt")).unwrap();
    assert!(cert.contains("verdict=true\n"));
    assert!(cert.contains("epsilon=1.0\n") && cert.contains("delta=1.8\n"));

    // The resolved configuration reproduces the run.
    let resolved = dir.path().join("certify/config.resolved.toml");
    let again = tempfile::tempdir().unwrap();
    let o = bin(&["certify", "--config", resolved.to_str().unwrap()], again.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(cert, std::fs::read_to_string(again.path().join("certify/certificate.txt")).unwrap());
}

#[test]
fn rejected_pair_exits_with_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(
        &["certify", "--set", "certificate.epsilon=0.6", "--set", "certificate.delta=2.2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error[infeasible]:"));
    let cert = std::fs::read_to_string(dir.path().join("certify/certificate.txt")).unwrap();
    assert!(cert.starts_with("verdict=false\n"));
}

#[test]
fn config_errors_carry_their_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[reactor]\nd = 0.1\npsi = \"fast\"\n").unwrap();
    let o = bin(&["certify", "--config", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.starts_with("error[config]:") && msg.contains("line 3"), "{msg}");

    let o = bin(&["certify", "--model", "nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["certify", "--set", "reactor.d=-1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hypothesis_violations_leave_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["simulate", "--set", "closed_loop.x_f_init=4.0"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("error[hypothesis]:"));
    assert!(!dir.path().join("simulate").exists());
}

#[test]
fn simulate_writes_trace_profile_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["simulate", "--T", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sim = dir.path().join("simulate");
    let trace = std::fs::read_to_string(sim.join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,y,y_ref,e,funnel_radius,u,gain\n"));
    assert_eq!(trace.lines().count(), 202);
    let grid = std::fs::read_to_string(sim.join("profile.csv")).unwrap();
    assert!(grid.starts_with("zeta,t,value\n"));
    for f in ["funnel.svg", "control.svg", "report.txt", "config.resolved.toml"] {
        assert!(sim.join(f).exists(), "{f}");
    }
    let resolved = std::fs::read_to_string(sim.join("config.resolved.toml")).unwrap();
    assert!(resolved.contains("horizon = 2.0"));
}

#[test]
fn verify_iss_and_cross_validate() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["verify-iss", "--config", &config("heat.toml"), "--T", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("verify-iss/iss.csv")).unwrap();
    assert!(csv.starts_with("t,lhs,envelope,V,W\n"));

    let o = bin(&["verify-iss"], dir.path());
    assert_eq!(o.status.code(), Some(2), "reactor model has no ISS check");

    let o = bin(&["cross-validate", "--set", "cross_validation.modes=40", "--T", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("cross-validate/cross_validation.csv").exists());
}

#[test]
fn sweep_runs_members_into_separate_directories() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["sweep", "certify", "--param", "reactor.psi", "--values", "2.8,5.0"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let root = dir.path().join("sweep/certify");
    assert!(root.join("reactor.psi=2.8/certificate.txt").exists());
    assert!(root.join("reactor.psi=5.0/certificate.txt").exists());
    let summary = std::fs::read_to_string(root.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);

    let first = std::fs::read_to_string(root.join("reactor.psi=5.0/certificate.txt")).unwrap();
    let o = bin(&["sweep", "certify", "--param", "reactor.psi", "--values", "1.0,5.0"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(first, std::fs::read_to_string(root.join("reactor.psi=5.0/certificate.txt")).unwrap());
}

#[test]
fn out_flag_overrides_the_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = bin(&["certify", "--out", flag_dir.path().to_str().unwrap()], env_dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_dir.path().join("certify/certificate.txt").exists());
    assert!(!env_dir.path().join("certify").exists());
}
