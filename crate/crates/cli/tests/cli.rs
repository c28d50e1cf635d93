use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qlc(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qlc"));
    cmd.args(args).env_remove("QLC_THREADS");
    if let Some(t) = threads {
        cmd.env("QLC_THREADS", t);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_passes() {
    let o = qlc(&["verify"], None);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn run_writes_one_row_per_layer() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let args = [
        "run",
        "--problem",
        "weighted-maxcut",
        "--n",
        "6",
        "--weights",
        "0,2",
        "--method",
        "gdqlc",
        "--dt",
        "0.05",
        "--layers",
        "12",
        "--gd-iters",
        "3",
        "--seed",
        "4",
        "--out",
        out.to_str().unwrap(),
    ];
    let o = qlc(&args, None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "layer,beta,a_val,b_val,e_p,r_a,p_succ");
    assert_eq!(lines.len(), 13);
    assert!(String::from_utf8_lossy(&o.stderr).contains("expectation evaluations: 48"));

    // Same seed, different thread count: identical trace.
    let o = qlc(&args[..args.len() - 2], Some("1"));
    assert!(o.status.success());
    assert_eq!(stdout(&o), text);
}

#[test]
fn run_reads_graph_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let o = qlc(
        &[
            "gen",
            "--n",
            "8",
            "--generator",
            "ba",
            "--m",
            "2",
            "--seed",
            "3",
            "-o",
            g.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success());
    let o = qlc(
        &[
            "run",
            "--graph-file",
            g.to_str().unwrap(),
            "--problem",
            "mincover",
            "--layers",
            "5",
        ],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn gen_is_deterministic() {
    let args = [
        "gen",
        "--n",
        "10",
        "--generator",
        "er",
        "--p",
        "0.4",
        "--seed",
        "9",
        "--weights",
        "1,3",
    ];
    let a = qlc(&args, None);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&qlc(&args, Some("3"))));
    assert!(stdout(&a).starts_with("10\n"));
}

#[test]
fn bad_input_fails_cleanly() {
    for args in [
        &["run"][..],
        &["run", "--n", "5"],
        &["run", "--n", "4", "--weights", "2,1"],
        &["run", "--n", "4", "--problem", "tsp"],
        &["gen", "--n", "4", "--generator", "ba", "--m", "4"],
    ] {
        let o = qlc(args, None);
        assert!(!o.status.success(), "{args:?} succeeded");
    }
    assert!(!qlc(&["verify"], Some("zero")).status.success());
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("sweep.toml");
    fs::write(
        &path,
        "problem = \"maxcut\"\nn_qubits = 6\nn_instances = 2\nseed = 5\nk_max = 10\n\
         [generator]\nkind = \"regular\"\n\
         [[methods]]\nmethod = \"falqon\"\ndt = [0.05]\n\
         [[methods]]\nmethod = \"gdqlc\"\ndt = [0.05]\ngd_iters = [2]\n",
    )
    .unwrap();
    path
}

#[test]
fn sweep_writes_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = dir.path().join("out");
    let o = qlc(
        &[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for rel in [
        "summary.csv",
        "config.toml",
        "aggregate/falqon_dt0.05.csv",
        "instances/0001/gdqlc_L2_c0.1_dt0.05.csv",
    ] {
        assert!(out.join(rel).is_file(), "missing {rel}");
    }
    assert!(!out.join("INCOMPLETE").exists());
}

#[test]
fn sweep_with_missing_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let missing = dir.path().join("missing.toml");
    let o = qlc(
        &[
            "sweep",
            "--config",
            missing.to_str().unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert!(!o.status.success());
    assert!(!out.exists());
}
