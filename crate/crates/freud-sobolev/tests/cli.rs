//! End-to-end tests of the command-line binary: output contents, formats,
//! determinism, file output, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_freud-sobolev"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn data_file(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

/// Parse csv output: skip the header, split rows into raw string fields.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

/// Parse a checked-in reference file: # comments and the header line are
/// skipped; the trailing flag column (if any) is kept as a string.
fn reference_rows(path: &str) -> Vec<(Vec<f64>, Option<bool>)> {
    let text = std::fs::read_to_string(path).expect("reference file");
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields[0].parse::<f64>().is_err() {
            continue;
        }
        let mut nums = Vec::new();
        let mut flag = None;
        for f in fields {
            match f.trim().parse::<f64>() {
                Ok(v) => nums.push(v),
                Err(_) => {
                    flag = Some(f.trim() == "true");
                    break;
                }
            }
        }
        rows.push((nums, flag));
    }
    rows
}

fn table_matches_reference(id: &str, file: &str) {
    let out = run(&["table", "--id", id]);
    assert!(out.status.success(), "table --id {id}: {}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    let reference = reference_rows(&data_file(file));
    assert_eq!(rows.len(), reference.len(), "row count vs {file}");
    for (row, (ref_nums, ref_flag)) in rows.iter().zip(&reference) {
        // Columns: M1, five zero locations, rupture flag.
        assert_eq!(row.len(), 7, "column count");
        for j in 0..6 {
            let got: f64 = row[j].parse().expect("numeric cell");
            assert!(
                (got - ref_nums[j]).abs() <= 1e-5,
                "cell ({}, {j}): {got} vs {}",
                row[0],
                ref_nums[j]
            );
        }
        assert_eq!(
            row[6] == "true",
            ref_flag.expect("flag column"),
            "rupture flag at M1 = {}",
            row[0]
        );
    }
}

#[test]
fn table1_matches_reference_data() {
    table_matches_reference("1", "table1.csv");
}

#[test]
fn table2_matches_reference_data() {
    table_matches_reference("2", "table2.csv");
}

#[test]
fn json_output_matches_csv_cells() {
    let csv = run(&["table", "--id", "3", "--n-odd", "1..9"]);
    let json = run(&["table", "--id", "3", "--n-odd", "1..9", "--emit-json"]);
    assert!(csv.status.success() && json.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&json)).expect("valid json");
    assert_eq!(doc["id"], 3);
    assert_eq!(doc["masses"].as_array().unwrap().len(), 3);
    let json_rows = doc["rows"].as_array().unwrap();
    let csv_rows = csv_rows(&stdout(&csv));
    assert_eq!(json_rows.len(), csv_rows.len());
    for (jr, cr) in json_rows.iter().zip(&csv_rows) {
        assert_eq!(jr["n"].as_u64().unwrap().to_string(), cr[0]);
        let cells = jr["cells"].as_array().unwrap();
        assert_eq!(cells.len(), cr.len() - 1);
        for (jc, cc) in cells.iter().zip(cr.iter().skip(1)) {
            // JSON values are rounded to the printed precision, so the two
            // formats agree bit-for-bit after parsing.
            assert_eq!(jc.as_f64().unwrap(), cc.parse::<f64>().unwrap());
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = run(&["table", "--id", "3", "--n-odd", "1..9"]);
    let b = run(&["table", "--id", "3", "--n-odd", "1..9"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn u_roots_export_matches_reference_column() {
    let out = run(&["export-plot", "--kind", "u_roots", "--M1", "1", "--n-odd", "1..19"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("M1,n,re_root,im_root\n"), "header: {text}");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 10);
    // Reference magnitudes for unit derivative mass at degrees 1 and 9.
    let checks = [(0usize, 0.745497, 0.914759), (4, 0.076318, 1.349456)];
    for (i, re, im) in checks {
        let got_re: f64 = rows[i][2].parse().unwrap();
        let got_im: f64 = rows[i][3].parse().unwrap();
        assert!((got_re - re).abs() <= 1e-5, "row {i} re: {got_re} vs {re}");
        assert!((got_im - im).abs() <= 1e-5, "row {i} im: {got_im} vs {im}");
    }
}

#[test]
fn trajectories_cover_reference_zero_locations() {
    let out = run(&["export-plot", "--kind", "zero_trajectories"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("M1,k,zero\n"), "header: {text}");
    let rows = csv_rows(&text);
    // Default: degree 5 over the mass grid {0, 0.2, 2} gives 15 rows.
    assert_eq!(rows.len(), 15);
    // Second-from-left zero of the degree-5 polynomial at each mass.
    for (m1, expect) in [("0", -0.655248), ("0.2", -0.458455), ("2", -0.192081)] {
        let got: f64 = rows
            .iter()
            .find(|r| r[0] == m1 && r[1] == "2")
            .unwrap_or_else(|| panic!("missing row M1={m1} k=2"))[2]
            .parse()
            .unwrap();
        assert!((got - expect).abs() <= 1e-5, "M1={m1}: {got} vs {expect}");
    }
}

#[test]
fn out_flag_writes_file_and_silences_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.csv");
    let to_file = run(&["table", "--id", "1", "--out", path.to_str().unwrap()]);
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty(), "stdout should be empty with --out");
    let direct = run(&["table", "--id", "1"]);
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn cache_file_is_created_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("coeffs.cache");
    let first = run(&["table", "--id", "1", "--cache", cache.to_str().unwrap()]);
    assert!(first.status.success());
    assert!(cache.exists(), "cache file written on first run");
    let stamp = std::fs::metadata(&cache).unwrap().modified().unwrap();
    let second = run(&["table", "--id", "1", "--cache", cache.to_str().unwrap()]);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
    // The second run read the cache instead of rewriting it.
    assert_eq!(std::fs::metadata(&cache).unwrap().modified().unwrap(), stamp);
}

#[test]
fn tsv_format_uses_tabs() {
    let out = run(&["table", "--id", "1", "--format", "tsv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("M1\teta_5_2\t"), "tsv header: {text}");
}

#[test]
fn full_precision_prints_more_digits() {
    let fixed = run(&["table", "--id", "1", "--M1", "0.2"]);
    let full = run(&["table", "--id", "1", "--M1", "0.2", "--full-precision"]);
    assert!(fixed.status.success() && full.status.success());
    let cell = |o: &Output| csv_rows(&stdout(o))[0][1].clone();
    let (f6, fp) = (cell(&fixed), cell(&full));
    assert_eq!(f6.split('.').nth(1).map(str::len), Some(6));
    assert!(fp.split('.').nth(1).map(str::len).unwrap() > 6, "{fp}");
    assert!((f6.parse::<f64>().unwrap() - fp.parse::<f64>().unwrap()).abs() < 1e-6);
}

#[test]
fn verify_suites_pass_with_exit_zero() {
    for suite in ["coeffs", "freud", "sobolev", "zeros", "holonomic"] {
        let out = run(&["verify", "--suite", suite, "--M0", "1", "--M1", "0.5"]);
        let text = stdout(&out);
        assert!(
            out.status.code() == Some(0) && text.contains("RESULT pass"),
            "suite {suite}: exit {:?}\n{text}{}",
            out.status.code(),
            stderr(&out)
        );
        assert!(!text.contains("FAIL "), "suite {suite}:\n{text}");
    }
}

#[test]
fn verify_json_format_reports_properties() {
    let out = run(&["verify", "--suite", "coeffs", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(doc["result"], "pass");
    let props = doc["properties"].as_array().unwrap();
    assert!(!props.is_empty());
    for p in props {
        assert_eq!(p["status"], "pass");
        assert!(p["measured"].as_f64().unwrap() <= p["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn impossible_tolerance_fails_with_exit_one() {
    let out = run(&[
        "verify",
        "--suite",
        "coeffs",
        "--tol-override",
        "string_residual_scaled=1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL coeffs.string_residual_scaled"), "{text}");
    assert!(text.contains("RESULT fail"), "{text}");
}

#[test]
fn usage_errors_exit_two() {
    // Out-of-range table id (rejected by argument validation).
    assert_eq!(run(&["table", "--id", "5"]).status.code(), Some(2));
    // Missing reference file.
    let out = run(&["table", "--id", "1", "--reference", "/nonexistent/ref.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot read reference file"));
    // Plot export has no JSON rendering.
    let out = run(&["export-plot", "--kind", "polynomials", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    // Malformed tolerance override.
    let out = run(&["verify", "--suite", "coeffs", "--tol-override", "nodelimiter"]);
    assert_eq!(out.status.code(), Some(2));
    // Malformed odd-degree range.
    let out = run(&["table", "--id", "3", "--n-odd", "9..1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reference_flag_reports_small_deltas() {
    let out = run(&["table", "--id", "1", "--reference", &data_file("table1.csv")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().contains("delta_eta_5_2"), "{text}");
    for row in csv_rows(&text) {
        assert_eq!(row.len(), 12);
        for cell in &row[7..] {
            let delta: f64 = cell.parse().expect("delta cell");
            assert!(delta <= 1e-5, "delta {delta} exceeds reference tolerance");
        }
    }
}

#[test]
fn polynomial_export_covers_grid() {
    let out = run(&["export-plot", "--kind", "polynomials", "--n", "4", "--M0", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("x,value\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 201);
    assert_eq!(rows[0][0], "-2.500000");
    assert_eq!(rows[200][0], "2.500000");
    // Even degree and even weight: the sampled values are mirror-symmetric.
    for i in 0..=200usize {
        let a: f64 = rows[i][1].parse().unwrap();
        let b: f64 = rows[200 - i][1].parse().unwrap();
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}

#[test]
fn potential_export_skips_singular_points() {
    let out = run(&["export-plot", "--kind", "potential", "--n", "7", "--M1", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("x,potential\n"));
    let rows = csv_rows(&text);
    // The log term diverges at the origin; the grid point there is dropped.
    assert!(rows.len() >= 195 && rows.len() <= 201, "{} rows", rows.len());
    for r in &rows {
        assert!(r[1].parse::<f64>().unwrap().is_finite());
    }
}
