use std::path::PathBuf;
use std::process::{Command, Output};

const M_EX: &str = "\
states 0..3
finals 3
alphabet alpha/0 sigma/2
alpha -> 0
alpha -> 2
sigma(0,0) -> 1
sigma(1,0) -> 1
sigma(1,2) -> 3
sigma(1,3) -> 3
";

fn fta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fta"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn peak_density_display() {
    let o = fta(&["peak-density", "--n", "8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0.0431\n");
    assert_eq!(fta(&["peak-density", "--n", "1"]).status.code(), Some(7));
}

#[test]
fn pipeline_is_replayable() {
    let args = [
        "pipeline", "--n", "4", "--d2", "0.1696", "--d0", "0.5", "--seed", "7",
    ];
    let a = fta(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&fta(&args)));
    assert!(stdout(&a).starts_with("seed=7 "));
}

#[test]
fn example_determinize_then_minimize() {
    let input = scratch("m_ex.fta");
    let det = scratch("m_ex_det.fta");
    std::fs::write(&input, M_EX).unwrap();
    let o = fta(&[
        "determinize",
        "--in",
        input.to_str().unwrap(),
        "--out",
        det.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "det_size=4\n");
    let o = fta(&["minimize", "--in", det.to_str().unwrap()]);
    assert_eq!(stdout(&o), "canonical_size=4\n");
}

#[test]
fn generate_surfaces_the_seed() {
    let out = scratch("gen.fta");
    let o = fta(&[
        "generate",
        "--n",
        "3",
        "--d2",
        "0.3",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed=11"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# seed=11 "));
    let m = fta_lab::io::parse_fta(&text).unwrap();
    assert!(fta_core::is_trim(&m));
    let raw = fta(&[
        "generate",
        "--n",
        "3",
        "--d2",
        "0.3",
        "--seed",
        "11",
        "--no-trim",
    ]);
    assert!(raw.status.success());
}

#[test]
fn distinct_exit_codes() {
    assert_eq!(
        fta(&["determinize", "--in", "/nonexistent/x.fta"])
            .status
            .code(),
        Some(3)
    );
    let bad = scratch("bad.fta");
    std::fs::write(&bad, "states 2\nfinals 1\nalphabet a/0 s/2\ns(1) -> 2\n").unwrap();
    let o = fta(&["minimize", "--in", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4, column 1"));
    let o = fta(&[
        "generate",
        "--n",
        "6",
        "--d2",
        "0.0",
        "--seed",
        "1",
        "--max-attempts",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(5));
    assert_eq!(
        fta(&["sweep", "--n", "4", "--trials", "0"]).status.code(),
        Some(7)
    );
    assert_eq!(fta(&["sweep", "--bogus"]).status.code(), Some(2));
}

#[test]
fn sweep_csv_and_thread_env() {
    let a = scratch("sweep1.csv");
    let b = scratch("sweep3.csv");
    let run = |out: &PathBuf, threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_fta"))
            .args([
                "sweep", "--n", "3", "--steps", "8", "--trials", "4", "--seed", "5",
            ])
            .args(["--out", out.to_str().unwrap()])
            .env("FTA_THREADS", threads)
            .output()
            .unwrap()
    };
    assert!(run(&a, "1").status.success());
    assert!(run(&b, "3").status.success());
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# seed=5 "));
    assert_eq!(
        lines[1],
        "setting,n,x,d2,trials,trim_attempts,mean_det_size,mean_canonical_size"
    );
    assert_eq!(lines.len(), 2 + 9);
}

#[test]
fn check_command() {
    let o = fta(&[
        "check", "--cases", "30", "--max-n", "3", "--height", "3", "--seed", "2",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "checked=30 mismatches=0\n");
}
