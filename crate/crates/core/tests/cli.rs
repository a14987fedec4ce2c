mod common;

use common::{big, golden, last_digit_units, parse_blocks, parse_csv, rpm};

/// Exact eigenvalues from `J_ν(2i√λ) = 0` solved with an independent
/// arbitrary-precision Bessel implementation, 25 significant digits.
const REFERENCE_EXACT: [(&str, &str, &str); 4] = [
    (
        "0.5",
        "-0.7398591041595960979746931",
        "0.2452751136305201056810721",
    ),
    (
        "2",
        "-0.6669130850682623650128496",
        "1.621183654364752687732333",
    ),
    (
        "100",
        "71.53522985536480114793020",
        "37.76367437431601591611887",
    ),
    (
        "4489",
        "4158.953346846095658045488",
        "530.1860901597955694285121",
    ),
];

#[test]
fn table_2_matches_golden_file_byte_for_byte() {
    let run = rpm(&["table", "2"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout, golden("table2.txt"));
}

#[test]
fn table_1_matches_golden_file() {
    let run = rpm(&["table", "1"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let got = parse_blocks(&run.stdout);
    let want = parse_blocks(&golden("table1.txt"));
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(&want) {
        assert_eq!(g.lambda, w.lambda);
        let labels = |b: &common::Block| b.rows.iter().map(|r| r.label.clone()).collect::<Vec<_>>();
        assert_eq!(labels(g), labels(w));
        for (gr, wr) in g.rows.iter().zip(&w.rows) {
            // the transcribed exact rows carry rounding noise in their last two digits
            let tol = if wr.label == "Exact" { 10.0 } else { 1.0 };
            assert!(
                last_digit_units(&gr.re, &wr.re) <= tol,
                "λ={} {}: {} vs {}",
                g.lambda,
                gr.label,
                gr.re,
                wr.re
            );
            assert!(
                last_digit_units(&gr.im, &wr.im) <= tol,
                "λ={} {}: {} vs {}",
                g.lambda,
                gr.label,
                gr.im,
                wr.im
            );
        }
    }
}

#[test]
fn exact_matches_independent_reference() {
    for (lambda, re, im) in REFERENCE_EXACT {
        let run = rpm(&[
            "exact", "--lambda", lambda, "--digits", "25", "--format", "csv",
        ]);
        assert_eq!(run.code, 0, "{}", run.stderr);
        let (header, rows) = parse_csv(&run.stdout);
        let col = |n: &str| header.iter().position(|h| h == n).unwrap();
        assert_eq!(rows[0][col("re_exact")], re, "λ={lambda}");
        assert_eq!(rows[0][col("im_exact")], im, "λ={lambda}");
        assert_eq!(rows[0][col("status")], "converged");
        assert_eq!(rows[0][col("admissible")], "true");
    }
}

#[test]
fn exact_text_layout() {
    let run = rpm(&["exact", "--lambda", "2"]);
    assert_eq!(run.code, 0);
    assert!(run
        .stdout
        .contains("epsilon    = -0.66691308506826236501 + 1.6211836543647526877i"));
    assert!(run.stdout.contains("status     = converged"));
}

#[test]
fn usage_errors_exit_2_without_output() {
    let cases: &[&[&str]] = &[
        &[
            "sequence", "--lambda", "0.5", "--dmin", "12", "--dmax", "10",
        ],
        &["sequence", "--lambda", "0.5", "--dmin", "1", "--dmax", "10"],
        &["exact", "--lambda", "-1"],
        &["exact", "--lambda", "0"],
        &["exact", "--lambda", "abc"],
        &["exact", "--lambda", "2", "--seed", "1.5,0.2"],
        &["table", "3"],
        &["scan", "--grid", ""],
        &["scan", "--grid", "2,0.5"],
        &[
            "exact",
            "--lambda",
            "2",
            "--precision-bits",
            "128",
            "--digits",
            "40",
        ],
        &["exact", "--lambda", "2", "--digits", "0"],
        &["sequence", "--lambda", "2", "--seed", "1.0"],
        &["frobnicate"],
    ];
    for args in cases {
        let run = rpm(args);
        assert_eq!(run.code, 2, "{args:?}: {}", run.stderr);
        assert!(run.stdout.is_empty(), "{args:?}");
        assert!(!run.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn failed_search_exits_1_with_diagnostic() {
    let run = rpm(&["exact", "--lambda", "2", "--seed=-0.9999999,0"]);
    assert_eq!(run.code, 1);
    assert!(run.stdout.contains("status     = not_converged"));
    assert!(run.stderr.contains("not_converged"));
}

#[test]
fn help_exits_0() {
    let run = rpm(&["--help"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("sequence"));
}

#[test]
fn scan_csv_layout() {
    let run = rpm(&["scan", "--grid", "0.5,2", "--format", "csv", "--dmax", "12"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(!run.stdout.contains('\r'));
    assert!(run.stdout.ends_with('\n'));
    let (header, rows) = parse_csv(&run.stdout);
    assert_eq!(
        header.join(","),
        "lambda,re_rpm,im_rpm,re_exact,im_exact,log10_err_re,log10_err_im"
    );
    assert_eq!(rows.len(), 2);
    for row in &rows {
        assert_eq!(row.len(), header.len());
        for field in row {
            assert!(field.parse::<f64>().is_ok(), "non-numeric field {field}");
        }
    }
}

#[test]
fn json_records_mirror_csv_columns() {
    let args = ["scan", "--grid", "2", "--dmax", "10"];
    let csv = rpm(&[&args[..], &["--format", "csv"]].concat());
    let json = rpm(&[&args[..], &["--format", "json"]].concat());
    assert_eq!(json.code, 0);
    let (header, rows) = parse_csv(&csv.stdout);
    let lines: Vec<&str> = json.stdout.lines().collect();
    assert_eq!(lines.len(), rows.len());
    let record: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(lines[0]).unwrap();
    let keys: Vec<&String> = record.keys().collect();
    assert_eq!(keys, header.iter().collect::<Vec<_>>());
    for (k, v) in header.iter().zip(&rows[0]) {
        assert_eq!(record[k].as_str().unwrap(), v);
    }
}

#[test]
fn sequence_rows_and_exact_footer() {
    let run = rpm(&[
        "sequence", "--lambda", "0.5", "--dmin", "10", "--dmax", "12", "--format", "csv",
    ]);
    assert_eq!(run.code, 0);
    let (header, rows) = parse_csv(&run.stdout);
    assert_eq!(header.join(","), "lambda,D,re_eps,im_eps,converged");
    let labels: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(labels, ["10", "11", "12", "Exact"]);
    assert!(rows.iter().all(|r| r[4] == "true"));
}

#[test]
fn explicit_seed_reaches_the_same_root() {
    let a = rpm(&["sequence", "--lambda", "2", "--dmin", "10", "--dmax", "10"]);
    let b = rpm(&[
        "sequence",
        "--lambda",
        "2",
        "--dmin",
        "10",
        "--dmax",
        "10",
        "--seed=-0.6,1.5",
    ]);
    assert_eq!(a.code, 0);
    assert_eq!(b.code, 0);
    assert_eq!(
        parse_blocks(&a.stdout)[0].rows[0],
        parse_blocks(&b.stdout)[0].rows[0]
    );
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exact.csv");
    let run = rpm(&[
        "exact",
        "--lambda",
        "2",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("lambda,re_nu,im_nu,re_exact,im_exact"));
}

#[test]
fn printed_values_round_trip_within_one_unit() {
    let short = rpm(&[
        "sequence", "--lambda", "100", "--dmin", "5", "--dmax", "9", "--digits", "20",
    ]);
    let long = rpm(&[
        "sequence", "--lambda", "100", "--dmin", "5", "--dmax", "9", "--digits", "60",
    ]);
    let (s, l) = (
        &parse_blocks(&short.stdout)[0],
        &parse_blocks(&long.stdout)[0],
    );
    for (rs, rl) in s.rows.iter().zip(&l.rows) {
        // rounding to nearest keeps the printed value within half a unit
        assert!(
            last_digit_units(&rl.re, &rs.re) <= 0.5,
            "{} vs {}",
            rs.re,
            rl.re
        );
        assert!(
            last_digit_units(&rl.im, &rs.im) <= 0.5,
            "{} vs {}",
            rs.im,
            rl.im
        );
    }
}

#[test]
fn digits_flag_controls_significant_figures() {
    let run = rpm(&[
        "exact", "--lambda", "100", "--digits", "30", "--format", "csv",
    ]);
    let (header, rows) = parse_csv(&run.stdout);
    let re = &rows[0][header.iter().position(|h| h == "re_exact").unwrap()];
    assert_eq!(re.chars().filter(char::is_ascii_digit).count(), 30);
    assert!(big(re) > 71);
}
