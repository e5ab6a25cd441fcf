use std::path::PathBuf;
use std::process::Command;

use qbound_cli::{fmt_float, parse_state_file, run, OUT_DIR_ENV};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn qbound(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qbound").chain(args.iter().copied());
    let code = run(argv, None, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn pair_args<'a>(rho: &'a str, sigma: &'a str) -> [&'a str; 4] {
    ["--rho", rho, "--sigma", sigma]
}

#[test]
fn parses_fixture_states() {
    let zero = parse_state_file(fixture("zero.json").as_ref()).unwrap();
    assert_eq!(zero.state.matrix().diagonal_entries(), vec![1.0, 0.0]);
    let mixed = parse_state_file(fixture("maximally_mixed.json").as_ref()).unwrap();
    assert_eq!(mixed.state.matrix().diagonal_entries(), vec![0.5, 0.5]);
    let off = parse_state_file(fixture("trace_slightly_off.json").as_ref()).unwrap();
    assert_eq!(off.warnings.len(), 1);
}

#[test]
fn oracle_on_zero_versus_plus() {
    let (z, p) = (fixture("zero.json"), fixture("plus.json"));
    let mut args = vec!["oracle"];
    args.extend(pair_args(&z, &p));
    args.extend(["--n", "1", "--a", "0"]);
    let o = qbound(&args);
    assert_eq!(o.code, 0, "{}", o.err);
    let v: serde_json::Value = serde_json::from_str(&o.out).unwrap();
    let e = v["e_n"].as_f64().unwrap();
    assert!((e - (1.0 - std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-12);
    let sum = v["alpha"].as_f64().unwrap() + v["beta"].as_f64().unwrap();
    assert!((sum - e).abs() < 1e-12);
    assert_eq!(v["degenerate_kernel"], false);
}

#[test]
fn divergences_of_identical_states() {
    let m = fixture("maximally_mixed.json");
    let mut args = vec!["divergences"];
    args.extend(pair_args(&m, &m));
    let o = qbound(&args);
    assert_eq!(o.code, 0, "{}", o.err);
    let (json, csv) = o.out.split_at(o.out.find("t,psi").unwrap());
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    assert_eq!(v["relative_entropy"].as_f64().unwrap(), 0.0);
    assert_eq!(v["chernoff"].as_f64().unwrap().abs(), 0.0);
    assert!((v["eta"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    let (header, rows) = csv_rows(csv);
    assert_eq!(header, ["t", "psi", "psi_prime", "psi_second"]);
    assert_eq!(rows.len(), 101);
}

#[test]
fn bits_rescale_entropic_outputs() {
    let (a, b) = (fixture("diag_90_10.json"), fixture("diag_40_60.json"));
    let mut base = vec!["divergences"];
    base.extend(pair_args(&a, &b));
    let nats = qbound(&base);
    base.push("--bits");
    let bits = qbound(&base);
    let parse = |s: &str| -> serde_json::Value { serde_json::from_str(&s[..s.find("t,psi").unwrap()]).unwrap() };
    let (vn, vb) = (parse(&nats.out), parse(&bits.out));
    let d = vn["relative_entropy"].as_f64().unwrap();
    assert!((d - (0.9 * 2.25f64.ln() + 0.1 * (1.0f64 / 6.0).ln())).abs() < 1e-12);
    assert!((vb["relative_entropy"].as_f64().unwrap() - d / 2f64.ln()).abs() < 1e-12);
    assert_eq!(vb["eta"], vn["eta"]);
    assert_eq!(vb["units"], "bits");
}

#[test]
fn binary_reproduces_rate_curve_columns() {
    let o = qbound(&["binary", "--p", "0.001", "--q", "0.5", "--a", "0", "--n-max", "300"]);
    assert_eq!(o.code, 0, "{}", o.err);
    let (header, rows) = csv_rows(&o.out);
    assert_eq!(header.join(","), "n,rate_exact,rate_lower,rate_upper,chernoff");
    assert_eq!(rows.len(), 300);
    for row in &rows {
        let v: Vec<f64> = row[1..].iter().map(|x| x.parse().unwrap()).collect();
        assert!(v[1] <= v[0] * (1.0 + 1e-12) && v[0] <= v[2] * (1.0 + 1e-12));
        assert!(v[0] > v[3]);
    }
}

#[test]
fn csv_round_trips_bit_for_bit() {
    let o = qbound(&["binary", "--p", "0.2", "--q", "0.7", "--a", "-0.1", "--n-max", "40"]);
    let (_, rows) = csv_rows(&o.out);
    for row in rows {
        for cell in &row[1..] {
            let x: f64 = cell.parse().unwrap();
            assert_eq!(&fmt_float(x), cell);
        }
    }
    for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, f64::MAX] {
        assert_eq!(fmt_float(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}

#[test]
fn sweeps_are_deterministic_across_thread_counts() {
    let (a, b) = (fixture("qubit_a.json"), fixture("qubit_b.json"));
    let mut base = vec!["stein"];
    base.extend(pair_args(&a, &b));
    base.extend(["--eps", "0.2", "--n-max", "9"]);
    let mut one = base.clone();
    one.extend(["--threads", "1"]);
    let mut four = base.clone();
    four.extend(["--threads", "4"]);
    let (x, y, z) = (qbound(&one), qbound(&four), qbound(&four));
    assert_eq!(x.code, 0, "{}", x.err);
    assert_eq!(x.out, y.out);
    assert_eq!(y.out, z.out);
    let (header, rows) = csv_rows(&x.out);
    assert_eq!(&header[..5], ["n", "lower", "upper", "exact", "second_order_ref"]);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (i + 1).to_string());
        let lo: f64 = row[1].parse().unwrap();
        let up: f64 = row[2].parse().unwrap();
        let exact: f64 = row[3].parse().unwrap();
        assert!(lo <= exact && exact <= up);
    }
}

#[test]
fn stein_leaves_exact_empty_beyond_cap() {
    let (a, b) = (fixture("qutrit.json"), fixture("qutrit.json"));
    let mut args = vec!["stein"];
    args.extend(pair_args(&a, &b));
    args.extend(["--eps", "0.5", "--n-max", "8"]);
    let o = qbound(&args);
    assert_eq!(o.code, 0, "{}", o.err);
    let (_, rows) = csv_rows(&o.out);
    assert!(!rows[6][3].is_empty());
    assert!(rows[7][3].is_empty());
}

#[test]
fn hoeffding_and_chernoff_tables() {
    let (a, b) = (fixture("diag_90_10.json"), fixture("diag_40_60.json"));
    let mut args = vec!["hoeffding"];
    args.extend(pair_args(&a, &b));
    args.extend(["--r", "0.1", "--n-max", "5"]);
    let o = qbound(&args);
    assert_eq!(o.code, 0, "{}", o.err);
    let (header, rows) = csv_rows(&o.out);
    assert_eq!(header, ["n", "upper", "t_r", "H_r"]);
    assert_eq!(rows.len(), 5);

    let mut args = vec!["chernoff"];
    args.extend(pair_args(&a, &b));
    args.extend(["--n-max", "14"]);
    let o = qbound(&args);
    assert_eq!(o.code, 0, "{}", o.err);
    let (header, rows) = csv_rows(&o.out);
    assert_eq!(header, ["n", "mixed_upper_rate", "mixed_lower_rate", "exact_rate"]);
    assert!(rows[10][2].is_empty());
    let lower: f64 = rows[11][2].parse().unwrap();
    let exact: f64 = rows[11][3].parse().unwrap();
    let upper: f64 = rows[11][1].parse().unwrap();
    assert!(lower <= exact && exact <= upper);
}

#[test]
fn exit_codes() {
    let z = fixture("zero.json");
    let bad = fixture("non_hermitian.json");
    let malformed = fixture("malformed.json");
    let mut args = vec!["oracle"];
    args.extend(pair_args(&z, &bad));
    args.extend(["--n", "1", "--a", "0"]);
    let o = qbound(&args);
    assert_eq!(o.code, 2);
    assert!(o.err.contains("\"code\":\"non_hermitian\""));

    let mut args = vec!["oracle"];
    args.extend(pair_args(&z, &malformed));
    args.extend(["--n", "1", "--a", "0"]);
    assert_eq!(qbound(&args).code, 2);

    let mut args = vec!["oracle"];
    args.extend(pair_args(&z, &z));
    args.extend(["--n", "13", "--a", "0"]);
    let o = qbound(&args);
    assert_eq!(o.code, 3);
    assert!(o.err.contains("resource_limit"));

    assert_eq!(qbound(&["binary", "--p", "1.5", "--q", "0.5", "--a", "0", "--n-max", "3"]).code, 2);
    assert_eq!(qbound(&["binary", "--p", "0.5"]).code, 2);
    assert_eq!(qbound(&["--help"]).code, 0);
}

#[test]
fn trace_warning_goes_to_stderr() {
    let (a, b) = (fixture("trace_slightly_off.json"), fixture("maximally_mixed.json"));
    let mut args = vec!["oracle"];
    args.extend(pair_args(&a, &b));
    args.extend(["--n", "2", "--a", "0"]);
    let o = qbound(&args);
    assert_eq!(o.code, 0);
    assert!(o.err.contains("\"level\":\"warning\""));
}

#[test]
fn binary_writes_into_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_qbound"))
        .args(["binary", "--p", "0.25", "--q", "0.75", "--a", "0", "--n-max", "3"])
        .env(OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("binary.csv")).unwrap();
    let (_, rows) = csv_rows(&text);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 4f64.ln());
}

#[test]
fn binary_process_exit_code_on_bad_input() {
    let status = Command::new(env!("CARGO_BIN_EXE_qbound"))
        .args(["binary", "--p", "0", "--q", "0.75", "--a", "0", "--n-max", "3"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}
