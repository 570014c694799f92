use std::process::{Command, Output};

fn orbitprec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitprec"))
        .args(args)
        .env_remove("ORBITPREC_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn last_row(text: &str) -> Vec<String> {
    text.lines().last().unwrap().split(',').map(str::to_string).collect()
}

#[test]
fn run_superstable_orbit() {
    let o = orbitprec(&[
        "run",
        "--mu",
        "2",
        "--x0",
        "0.5",
        "--N",
        "100",
        "--p",
        "6",
        "--form",
        "running-error",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# n fl err\n0 5.00000000e-1 "));
    let row = last_row(&text);
    let sigma: f64 = row[6].parse().unwrap();
    assert!(sigma <= 0.32);
    assert_eq!(row[10], "ok");
}

#[test]
fn run_chaotic_mean_value() {
    let o = orbitprec(&[
        "run",
        "--mu",
        "3.75",
        "--x0",
        "0.5",
        "--form",
        "mean-value",
        "--N",
        "100",
        "--p",
        "6",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        text.lines()
            .filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit()))
            .count(),
        102
    );
    assert!(text.contains("# report\nmu=15/4 form=mean-value"));
}

#[test]
fn run_zero_steps_lists_initial_value() {
    let o = orbitprec(&["run", "--mu", "3", "--x0", "11/50", "--N", "0", "--p", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let listing: Vec<_> = text.lines().take_while(|l| !l.starts_with("# report")).collect();
    assert_eq!(listing.len(), 2);
    assert!(listing[1].starts_with("0 2.19971e-1 "));
    assert!(text.ends_with(",3,11,,,,,ok\n"));
}

#[test]
fn run_without_halt_exits_with_code_two() {
    let o = orbitprec(&[
        "run",
        "--mu",
        "4",
        "--x0",
        "1",
        "--N",
        "5",
        "--form",
        "running-error",
        "--m-cap",
        "128",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no halt"));
}

#[test]
fn invalid_arguments_fail() {
    assert!(!orbitprec(&["run", "--mu", "5", "--x0", "0.5"]).status.success());
    assert!(!orbitprec(&["run", "--mu", "2", "--x0", "1.5"]).status.success());
    assert!(!orbitprec(&["run", "--mu", "2", "--form", "nope"]).status.success());
    assert!(!orbitprec(&["sweep", "--mu-step", "0"]).status.success());
}

#[test]
fn off_grid_sweep_is_header_only() {
    let o = orbitprec(&["sweep", "--mu-start", "5", "--mu-end", "5"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "mu,form,x0,N,p,m_min,sigma_est,bound_lower,bound_upper,lambda_hat,status\n"
    );
}

#[test]
fn sweep_is_byte_identical_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let common = [
        "sweep",
        "--form",
        "form3",
        "--mu-start",
        "0.25",
        "--mu-end",
        "0.5",
        "--mu-step",
        "0.25",
        "--N",
        "200",
    ];
    let mut args_a = common.to_vec();
    args_a.extend(["--jobs", "1", "--out", a.to_str().unwrap()]);
    let mut args_b = common.to_vec();
    args_b.extend(["--out", b.to_str().unwrap()]);
    assert!(orbitprec(&args_a).status.success());
    let ob = Command::new(env!("CARGO_BIN_EXE_orbitprec"))
        .args(&args_b)
        .env("ORBITPREC_JOBS", "4")
        .output()
        .unwrap();
    assert!(ob.status.success());
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let text = String::from_utf8(ta).unwrap();
    assert!(!text.contains('\r'));
    let rows: Vec<_> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for (row, target) in rows.iter().zip([2.0, 1.0]) {
        let sigma: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
        assert!((sigma - target).abs() <= 0.25, "{row}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(
        &cfg,
        "# desk\nform = form2\nmu-start = 1\nmu-end = 2\nmu-step = 1\nN = 500\n",
    )
    .unwrap();
    let o = orbitprec(&["sweep", "--config", cfg.to_str().unwrap(), "--N", "60"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<_> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("1.000000000,form2,0.2200000000,60,6,"));
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert!(!orbitprec(&["sweep", "--config", cfg.to_str().unwrap()])
        .status
        .success());
}

#[test]
fn lyapunov_rows() {
    let o = orbitprec(&[
        "lyapunov",
        "--mu-start",
        "1",
        "--mu-end",
        "4",
        "--mu-step",
        "1.5",
        "--iterations",
        "4000",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("mu,lambda_hat,sigma_lyapunov,half_width,status"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    let lambda = |i: usize| rows[i][1].parse::<f64>().unwrap();
    assert!(lambda(0) <= 0.0);
    assert!((lambda(1) - 0.5f64.ln()).abs() < 0.01);
    assert!((lambda(2) - 2f64.ln()).abs() < 0.05);
    assert_eq!(rows[1][2], "0.000000000");
}
