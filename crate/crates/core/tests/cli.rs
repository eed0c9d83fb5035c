use std::path::Path;
use std::process::{Command, Output};

use treecodes::reference;

fn treecodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treecodes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn lines(out: &Output) -> Vec<String> {
    stdout(out).lines().map(str::to_string).collect()
}

#[test]
fn verify_golden_rows() {
    let out = treecodes(&["verify", "--ell-max", "3", "--workers", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        lines(&out),
        [
            "ell,nodes,worst_z_numerator,worst_z_denominator_log2,one_minus_delta",
            "1,1,1,1,-1.00000000",
            "2,1,1,2,-0.50000000",
            "3,3,1,3,-0.09763107",
        ]
    );

    let out = treecodes(&["verify", "--ell-max", "1"]);
    assert_eq!(lines(&out)[1..], ["1,1,1,1,-1.00000000"]);

    let out = treecodes(&["verify", "--ell-max", "40", "--workers", "1"]);
    let last = lines(&out).pop().unwrap();
    assert!(
        last.starts_with("40,") && last.ends_with(",0.70519257"),
        "{last}"
    );
}

#[test]
fn verify_brute_force_agrees() {
    let a = treecodes(&["verify", "--ell-max", "12", "--method", "brute"]);
    let b = treecodes(&["verify", "--ell-max", "12", "--workers", "1"]);
    let value = |o: &Output| -> Vec<String> {
        lines(o)
            .iter()
            .map(|l| l.rsplit(',').next().unwrap().to_string())
            .collect()
    };
    assert_eq!(value(&a), value(&b));
}

#[test]
fn verify_is_deterministic_and_parallel_safe() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    for name in ["a.csv", "b.csv"] {
        let out = treecodes(&[
            "verify",
            "--ell-max",
            "30",
            "--workers",
            "1",
            "-o",
            &path(name),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(path("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(path("b.csv")).unwrap());

    let out = treecodes(&[
        "verify",
        "--ell-max",
        "30",
        "--workers",
        "3",
        "--split-depth",
        "6",
    ]);
    let drop_nodes = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                format!("{},{},{},{}", f[0], f[2], f[3], f[4])
            })
            .collect()
    };
    assert_eq!(
        drop_nodes(&stdout(&out)),
        drop_nodes(&String::from_utf8(a).unwrap())
    );
}

#[test]
fn verify_rejects_bad_parameters() {
    assert_eq!(
        treecodes(&["verify", "--ell-max", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        treecodes(&["verify", "--ell-max", "5", "--workers", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        treecodes(&["verify", "--ell-max", "30", "--method", "brute"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(treecodes(&["verify"]).status.code(), Some(2));
    assert_eq!(treecodes(&["no-such-command"]).status.code(), Some(2));
}

fn polyline_points(svg: &str) -> usize {
    let last = svg.lines().rfind(|l| l.contains("<polyline")).unwrap();
    let start = last.find("points=\"").unwrap() + 8;
    let end = start + last[start..].find('"').unwrap();
    last[start..end].split_whitespace().count()
}

#[test]
fn plotdata_from_bundled_table() {
    let dir = tempfile::tempdir().unwrap();
    let dat = dir.path().join("table.dat");
    let out = treecodes(&["plotdata", "-o", dat.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(dat.with_extension("svg")).unwrap();
    assert!(svg.contains("viewBox") && !svg.contains("<script"));
    assert_eq!(polyline_points(&svg), 145);
    let data = std::fs::read_to_string(&dat).unwrap();
    let rows: Vec<&str> = data.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 145);
    assert_eq!(rows[59], "60 0.71419406");
}

#[test]
fn plotdata_round_trips_verify_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let dat = dir.path().join("run.dat");
    treecodes(&[
        "verify",
        "--ell-max",
        "25",
        "--workers",
        "1",
        "-o",
        csv.to_str().unwrap(),
    ]);
    let out = treecodes(&[
        "plotdata",
        "-i",
        csv.to_str().unwrap(),
        "-o",
        dat.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let written: Vec<String> = std::fs::read_to_string(&csv)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            format!("{} {}", f[0], f[4])
        })
        .collect();
    let plotted: Vec<String> = std::fs::read_to_string(&dat)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    assert_eq!(written, plotted);
    let parsed = reference::parse_delta_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(parsed.len(), 25);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn plotdata_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("o.dat");
    let out_path = out_path.to_str().unwrap();

    let empty = write(dir.path(), "empty.csv", "");
    assert_eq!(
        treecodes(&["plotdata", "-i", &empty, "-o", out_path])
            .status
            .code(),
        Some(2)
    );

    let bad = write(
        dir.path(),
        "bad.csv",
        "ell,one_minus_delta\n1,-1\n2,-0.5\n3,oops\n",
    );
    let out = treecodes(&["plotdata", "-i", &bad, "-o", out_path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let two = write(dir.path(), "two.csv", "ell,one_minus_delta\n1,-1\n2,-0.5\n");
    let svg = dir.path().join("two.svg");
    let out = treecodes(&[
        "plotdata",
        "-i",
        &two,
        "-o",
        out_path,
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(polyline_points(&std::fs::read_to_string(svg).unwrap()), 2);
}

#[test]
fn encode_examples() {
    let out = treecodes(&["encode", "--mode", "tree", "--bits", "1", "--kappa", "4"]);
    assert_eq!(lines(&out), ["2"]);
    let out = treecodes(&["encode", "--mode", "tree", "--bits", "", "--kappa", "8"]);
    assert_eq!((out.status.code(), stdout(&out).as_str()), (Some(0), "\n"));
    let out = treecodes(&[
        "encode",
        "--mode",
        "block",
        "--message",
        "0",
        "--n",
        "4",
        "--c",
        "2",
        "--kappa",
        "5",
    ]);
    assert_eq!(lines(&out), ["0,0,0,0,0,0,0,0"]);

    let out = treecodes(&[
        "encode",
        "--mode",
        "tree",
        "--bits",
        "01",
        "--kappa",
        "8",
        "--verbose",
    ]);
    assert_eq!(lines(&out).len(), 3);
    assert!(lines(&out)[1].contains("/2^"));

    assert_eq!(
        treecodes(&["encode", "--mode", "tree", "--bits", "012", "--kappa", "8"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        treecodes(&["encode", "--mode", "tree", "--bits", "01", "--kappa", "1"])
            .status
            .code(),
        Some(2)
    );
    let out = treecodes(&[
        "encode",
        "--mode",
        "block",
        "--message",
        "16",
        "--n",
        "4",
        "--c",
        "2",
        "--kappa",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_conj1_summary_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("h.csv");
    let out = treecodes(&[
        "scan-conj1",
        "--n",
        "1",
        "--c",
        "2",
        "--histogram",
        hist.to_str().unwrap(),
    ]);
    assert_eq!(lines(&out), ["n=1 c=2 max=-1.00000000 argmax=1"]);
    let text = std::fs::read_to_string(&hist).unwrap();
    assert_eq!(text.lines().next(), Some("bin_lo,bin_hi,count"));
    assert_eq!(text.lines().count(), 201);
    assert_eq!(text.lines().nth(1), Some("-1.00,-0.99,1"));

    let out = treecodes(&["scan-conj1", "--n", "8", "--workers", "2"]);
    let line = stdout(&out);
    let max: f64 = line
        .split("max=")
        .nth(1)
        .unwrap()
        .split(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(max < 1.0);

    assert_eq!(
        treecodes(&["scan-conj1", "--n", "25"]).status.code(),
        Some(2)
    );
}

#[test]
fn base32_modes() {
    let out = treecodes(&["base32", "--ell", "3", "--mode", "trajectory"]);
    let rows = lines(&out);
    assert_eq!(rows[0], "z,coeffs,nonzero_count,eq7_holds");
    assert_eq!(rows[1], "1,\"-1,2\",2,true");
    assert_eq!(rows.len(), 5);

    let out = treecodes(&["base32", "--ell", "1", "--mode", "trajectory"]);
    assert_eq!(
        (out.status.code(), lines(&out)[1].as_str()),
        (Some(0), "1,,0,true")
    );

    let out = treecodes(&["base32", "--ell", "2", "--mode", "search"]);
    assert_eq!(lines(&out), ["ell,min_nonzero,witness", "2,1,1"]);

    assert_eq!(
        treecodes(&["base32", "--ell", "41", "--mode", "search"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        treecodes(&["base32", "--ell", "30", "--mode", "trajectory"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        treecodes(&["base32", "--ell", "4", "--z", "2", "--mode", "trajectory"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn library_entry_point_reports_exit_codes() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = treecodes::cli::run(
        [
            "treecodes",
            "encode",
            "--mode",
            "tree",
            "--bits",
            "11",
            "--kappa",
            "4",
        ],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), "2,1\n");

    let mut out = Vec::new();
    let code = treecodes::cli::run(["treecodes", "--help"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert!(String::from_utf8(out).unwrap().contains("verify"));
}
