use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pgapolar"));
    c.env_remove("PGAPOLAR_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "exit {:?}: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn construct_writes_profile_frozen_set_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("code");
    let o = run(&[
        "construct",
        "--n",
        "8",
        "--k",
        "4",
        "--design-snr-db",
        "1",
        "--method",
        "pga-approx",
        "--out",
        p(&stem),
    ]);
    stdout(&o);
    let csv = fs::read_to_string(dir.path().join("code.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "index,mean_llr,rank");
    assert_eq!(lines.len(), 9);
    let frozen = fs::read_to_string(dir.path().join("code.frozen")).unwrap();
    assert_eq!(frozen, "0\n1\n2\n4\n");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("code.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["config"]["n"], 8);
    assert_eq!(json["config"]["method"], "pga-approx");
    assert_eq!(json["code"]["design_snr_db"], 1.0);
}

#[test]
fn construct_to_stdout() {
    let out = stdout(&run(&["construct", "--n", "16", "--k", "8"]));
    assert_eq!(out.lines().count(), 17);
}

#[test]
fn construct_rejects_bad_length_without_leaving_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "construct",
        "--n",
        "12",
        "--k",
        "4",
        "--out",
        p(&dir.path().join("x")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N must be a power of two"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn construct_into_missing_directory_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "construct",
        "--n",
        "8",
        "--k",
        "4",
        "--out",
        p(&dir.path().join("no/x")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_constructions_at_1024() {
    let args = [
        "compare",
        "--n",
        "1024",
        "--k",
        "512",
        "--method-a",
        "ga-exact",
        "--method-b",
        "pga-approx",
    ];
    assert_eq!(stdout(&run(&args)).trim(), "4");
    let mut sym = args.to_vec();
    sym.extend(["--metric", "symmetric"]);
    assert_eq!(stdout(&run(&sym)).trim(), "8");
}

#[test]
fn compare_files() {
    let dir = tempfile::tempdir().unwrap();
    let ga = dir.path().join("ga");
    let pga = dir.path().join("pga");
    for (stem, method) in [(&ga, "ga-exact"), (&pga, "pga-approx")] {
        stdout(&run(&[
            "construct",
            "--n",
            "1024",
            "--k",
            "512",
            "--method",
            method,
            "--out",
            p(stem),
        ]));
    }
    let a = dir.path().join("ga.frozen");
    let b = dir.path().join("pga.frozen");
    assert_eq!(
        stdout(&run(&["compare", "--a", p(&a), "--b", p(&a)])).trim(),
        "0"
    );
    let out = stdout(&run(&["compare", "--a", p(&a), "--b", p(&b), "--verbose"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "4");
    assert_eq!(lines[1].split_whitespace().count(), 5);
    assert_eq!(lines[2].split_whitespace().count(), 5);
    let with_n = stdout(&run(&[
        "compare",
        "--a",
        p(&a),
        "--b",
        p(&b),
        "--n",
        "1024",
        "--verbose",
    ]));
    assert_eq!(with_n, out);

    let short = dir.path().join("short");
    stdout(&run(&[
        "construct",
        "--n",
        "1024",
        "--k",
        "500",
        "--out",
        p(&short),
    ]));
    let o = run(&[
        "compare",
        "--a",
        p(&a),
        "--b",
        p(&dir.path().join("short.frozen")),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn compare_null_cell() {
    let out = stdout(&run(&[
        "compare",
        "--n",
        "128",
        "--k",
        "42",
        "--method-a",
        "ga-approx",
    ]));
    assert_eq!(out.trim(), "0");
}

#[test]
fn compare_table_grid() {
    let out = stdout(&run(&["compare", "--table1", "--metric", "symmetric"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "rate,128,256,512,1024,2048");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], "1/2,4,2,2,8,18");
    assert!(lines[2].starts_with("1/3,0,"));
}

#[test]
fn phi_examples() {
    let out = stdout(&run(&["phi", "--x", "0", "--kind", "ga-exact"]));
    assert_eq!(out, "input,output,kind\n0,1,ga-exact\n");
    let out = stdout(&run(&["phi", "--y", "0", "--kind", "pga-approx"]));
    assert_eq!(out.lines().nth(1).unwrap(), "0,0,pga-approx");

    let out = stdout(&run(&[
        "phi",
        "--x",
        "9.9999999999,10",
        "--kind",
        "pga-approx",
    ]));
    let vals: Vec<f64> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!((vals[0] - vals[1]).abs() < 1e-3);

    let out = stdout(&run(&["phi", "--x", "1", "--kind", "ga-approx"]));
    let y: f64 = out
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    let out = stdout(&run(&["phi", "--y", &y.to_string(), "--kind", "ga-approx"]));
    let x: f64 = out
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((x - 1.0).abs() < 1e-3);
}

#[test]
fn phi_domain_errors() {
    assert_eq!(run(&["phi", "--x", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["phi", "--y", "1.5"]).status.code(), Some(1));
    assert_eq!(run(&["phi"]).status.code(), Some(1));
    assert_eq!(
        run(&["phi", "--x", "1", "--y", "0.5"]).status.code(),
        Some(1)
    );
}

#[test]
fn encode_decode_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut msgs = String::new();
    let mut state = 12345u32;
    for _ in 0..20 {
        for _ in 0..26 {
            state = state.wrapping_mul(1_103_515_245).wrapping_add(12345);
            msgs.push(if (state >> 16) & 1 == 0 { '0' } else { '1' });
        }
        msgs.push('\n');
    }
    let input = dir.path().join("msgs.txt");
    fs::write(&input, &msgs).unwrap();
    let code = ["--n", "64", "--k", "26", "--method", "ga-exact"];

    let words = dir.path().join("words.txt");
    let mut enc = vec!["encode"];
    enc.extend(code);
    enc.extend(["--input", p(&input), "--output", p(&words)]);
    stdout(&run(&enc));
    assert_eq!(fs::read_to_string(&words).unwrap().lines().count(), 20);

    let mut dec = vec!["decode"];
    dec.extend(code);
    dec.extend(["--input", p(&words)]);
    assert_eq!(stdout(&run(&dec)), msgs);

    // Hex through stdin/stdout.
    let hex_msgs: String = msgs
        .lines()
        .map(|l| {
            let mut s = String::new();
            for chunk in l.as_bytes().chunks(4) {
                let v = (0..4).fold(0u32, |acc, j| {
                    (acc << 1) | u32::from(chunk.get(j) == Some(&b'1'))
                });
                s.push(char::from_digit(v, 16).unwrap());
            }
            s + "\n"
        })
        .collect();
    let mut enc = vec!["encode"];
    enc.extend(code);
    enc.extend(["--format", "hex"]);
    let hex_words = stdout(&run_stdin(&enc, &hex_msgs));
    let mut dec = vec!["decode"];
    dec.extend(code);
    dec.extend(["--format", "hex"]);
    assert_eq!(stdout(&run_stdin(&dec, &hex_words)), hex_msgs);
}

#[test]
fn decode_llr_lines_and_frozen_file() {
    let dir = tempfile::tempdir().unwrap();
    let frozen = dir.path().join("f.frozen");
    fs::write(&frozen, "0\n1\n2\n4\n").unwrap();
    // Codeword of u = (0,0,0,1,0,1,1,1) with message 1011.
    let word = stdout(&run_stdin(
        &["encode", "--n", "8", "--frozen", p(&frozen)],
        "1011\n",
    ));
    let llrs: Vec<String> = word
        .trim()
        .chars()
        .map(|c| if c == '0' { "1.5" } else { "-0.7" }.to_string())
        .collect();
    let out = stdout(&run_stdin(
        &["decode", "--n", "8", "--frozen", p(&frozen), "--llr"],
        &(llrs.join(",") + "\n"),
    ));
    assert_eq!(out, "1011\n");
    let bad = run_stdin(
        &["decode", "--n", "8", "--frozen", p(&frozen), "--k", "5"],
        "00000000\n",
    );
    assert_eq!(bad.status.code(), Some(1));
    let bad = run_stdin(&["encode", "--n", "8", "--k", "4"], "10112\n");
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 1"));
}

#[test]
fn simulate_noiseless_point_is_flagged() {
    let out = stdout(&run(&[
        "simulate",
        "--n",
        "16",
        "--k",
        "8",
        "--ebn0-db",
        "100",
        "--target-frame-errors",
        "1",
        "--max-frames",
        "5000",
        "--workers",
        "2",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "ebn0_db,frames,frame_errors,bit_errors,fer,ber,is_upper_bound"
    );
    assert_eq!(lines[1], "100,5000,0,0,0,0,true");
}

#[test]
fn simulate_is_reproducible_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let args = |path: &str| {
        vec![
            "simulate".to_string(),
            "--n".into(),
            "64".into(),
            "--k".into(),
            "32".into(),
            "--ebn0-db".into(),
            "0,1.5".into(),
            "--target-frame-errors".into(),
            "30".into(),
            "--seed".into(),
            "42".into(),
            "--out".into(),
            path.into(),
        ]
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    stdout(
        &bin()
            .args(args(p(&a)))
            .env("PGAPOLAR_WORKERS", "1")
            .output()
            .unwrap(),
    );
    stdout(
        &bin()
            .args(args(p(&b)))
            .env("PGAPOLAR_WORKERS", "3")
            .output()
            .unwrap(),
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["config"]["workers"], 1);
    assert_eq!(json["config"]["seed"], 42);
    assert_eq!(json["campaign"]["code"]["method"], "pga-approx");
    assert_eq!(json["points"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_unwritable_output_fails_before_running() {
    let o = run(&[
        "simulate",
        "--n",
        "1024",
        "--k",
        "512",
        "--ebn0-db",
        "-5",
        "--max-frames",
        "100000000",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn simulate_validation_errors() {
    let base = ["simulate", "--n", "16", "--k", "8"];
    let mut dec = base.to_vec();
    dec.extend(["--ebn0-db", "2,1"]);
    assert_eq!(run(&dec).status.code(), Some(1));
    let mut both = base.to_vec();
    both.extend([
        "--ebn0-db",
        "1",
        "--design-snr-db",
        "0",
        "--design-ebn0-db",
        "1",
    ]);
    assert_eq!(run(&both).status.code(), Some(1));
    assert_eq!(run(&base).status.code(), Some(1));
}

#[test]
fn fer_does_not_increase_with_snr() {
    let out = stdout(&run(&[
        "simulate",
        "--n",
        "1024",
        "--k",
        "512",
        "--method",
        "pga-approx",
        "--ebn0-db",
        "1.0,1.5,2.0,2.5",
        "--target-frame-errors",
        "100",
        "--seed",
        "7",
    ]));
    let rows: Vec<(f64, f64)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let frames: f64 = f[1].parse().unwrap();
            let fer: f64 = f[4].parse().unwrap();
            (fer, (fer * (1.0 - fer) / frames).sqrt())
        })
        .collect();
    assert_eq!(rows.len(), 4);
    for w in rows.windows(2) {
        let ((f0, s0), (f1, s1)) = (w[0], w[1]);
        assert!(f1 <= f0 + 2.0 * (s0 * s0 + s1 * s1).sqrt(), "{rows:?}");
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "n = 1024\nk = 512\n[compare]\nmethod-a = \"ga-exact\"\nmetric = \"symmetric\"\n",
    )
    .unwrap();
    assert_eq!(stdout(&run(&["compare", "--config", p(&cfg)])).trim(), "8");
    assert_eq!(
        stdout(&run(&[
            "compare",
            "--config",
            p(&cfg),
            "--metric",
            "swapped"
        ]))
        .trim(),
        "4"
    );
    fs::write(&cfg, "bogus-key = 1\n").unwrap();
    assert_eq!(
        run(&["phi", "--x", "1", "--config", p(&cfg)]).status.code(),
        Some(1)
    );
}

#[test]
fn help_and_unknown_commands() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}
