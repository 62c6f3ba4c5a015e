//! End-to-end checks of the command-line interface: output, exit codes and
//! file round-trips.

use std::io::Write as _;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tilings"))
}

fn write_temp(name: &str, content: &str) -> tempfile::TempPath {
    let mut f = tempfile::Builder::new()
        .suffix(name)
        .tempfile()
        .expect("temp file");
    f.write_all(content.as_bytes()).unwrap();
    f.into_temp_path()
}

const GOLDEN_TERM: &str =
    "(finite-type (forbid (pattern (cell 0 1) (cell 1 1))) (fullshift 1 (alphabet 0 1)))";

const GOLDEN_TILES: &str = "tileset golden\ndim 1\nalphabet 0 1\nforbid\ncell 0 1\ncell 1 1\nend\nend\n";

const SCANNER: &str = "machine scanner\nstates q0 q1 qf\ninitial q0\nfinal qf\ninput 1\ntape 1\nblank _\nrule q0 1 -> q1 1 R\nrule q0 _ -> qf _ S\nrule q1 1 -> q1 1 R\nrule q1 _ -> qf _ S\nend\n";

#[test]
fn lang_exact_counts_golden_mean() {
    let term = write_temp(".term", GOLDEN_TERM);
    let out = bin()
        .args(["lang"])
        .arg(&*term)
        .args(["--n", "4", "--count", "--exact-1d"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "n=4: 8");
}

#[test]
fn lang_exact_mode_needs_dim_one() {
    let term = write_temp(
        ".term",
        "(superpose (basis (1 0)) (basis (0 1)) (fullshift 1 (alphabet 0 1)))",
    );
    let out = bin()
        .args(["lang"])
        .arg(&*term)
        .args(["--n", "2", "--count", "--exact-1d"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exact mode requires dim 1"));
}

#[test]
fn full_shift_window_count() {
    let term = write_temp(".term", "(fullshift 1 (alphabet 0 1))");
    let out = bin()
        .args(["lang"])
        .arg(&*term)
        .args(["--n", "2", "--count"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "n=2: 4");
}

#[test]
fn solve_counts_and_unsat_exit_code() {
    let tiles = write_temp(
        ".tiles",
        "tileset hard\ndim 2\nalphabet 0 1\nforbid\ncell 0 0 1\ncell 1 0 1\nend\nforbid\ncell 0 0 1\ncell 0 1 1\nend\nend\n",
    );
    let out = bin()
        .args(["solve"])
        .arg(&*tiles)
        .args(["--box", "2x2", "--count"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "7");

    // Pinning two adjacent ones is unsatisfiable: exit code 1.
    let out = bin()
        .args(["solve"])
        .arg(&*tiles)
        .args(["--box", "2x2", "--pin", "0,0=1", "--pin", "1,0=1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("no admissible pattern"));
}

#[test]
fn solve_limit_prints_truncation() {
    let tiles = write_temp(".tiles", GOLDEN_TILES);
    let out = bin()
        .args(["solve"])
        .arg(&*tiles)
        .args(["--box", "4", "--limit", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("truncated at 3"));
}

#[test]
fn subst_render_mark_count() {
    let out = bin()
        .args(["subst", "--n", "2", "--letter", "o", "--iters", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 8);
    assert_eq!(text.matches('#').count(), 21);
    // Bad letter: the error lists the valid tokens.
    let out = bin()
        .args(["subst", "--n", "2", "--letter", "x", "--iters", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("o b"));
}

#[test]
fn framework_verify_passes() {
    let out = bin()
        .args(["framework", "--t", "2", "--verify"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("proposition witnessed"));
}

#[test]
fn tm_compile_roundtrips_and_rect_matches() {
    let machine = write_temp(".tm", SCANNER);
    let out = bin().args(["tm", "compile"]).arg(&*machine).output().unwrap();
    assert!(out.status.success());
    let tiles_text = String::from_utf8_lossy(&out.stdout).to_string();
    // The emitted tile set file re-parses: feed it to solve.
    let tiles = write_temp(".tiles", &tiles_text);
    let out = bin()
        .args(["fmt", "tileset"])
        .arg(&*tiles)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), tiles_text);

    let out = bin()
        .args(["tm", "rect"])
        .arg(&*machine)
        .args(["--m", "2", "--p", "2", "--n", "2", "--input", "1 1 1 1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("MATCH (1 filling)"));
}

#[test]
fn tm_order_self_target_has_no_disagreements() {
    let machine = write_temp(
        ".tm",
        "machine querier\nstates q? qloop\ninitial q?\nfinal\ninput a b\ntape a b\nblank _\nrule q? a -> qloop a S\nrule q? b -> qloop b S\nrule q? _ -> qloop _ S\nrule qloop a -> qloop a S\nrule qloop b -> qloop b S\nrule qloop _ -> qloop _ S\noracle_state q?\nend\n",
    );
    let oracle = write_temp(".words", "b\na b\nb a\nb b\na a b\n");
    let out = bin()
        .args(["tm", "order"])
        .arg(&*machine)
        .arg("--oracle-file")
        .arg(&*oracle)
        .args(["--n-max", "3", "--max-steps", "1000"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 disagreements"));
}

#[test]
fn fmt_is_idempotent_on_term_files() {
    let term = write_temp(".term", GOLDEN_TERM);
    let once = bin().args(["fmt", "term"]).arg(&*term).output().unwrap();
    assert!(once.status.success());
    let text = String::from_utf8_lossy(&once.stdout).to_string();
    let canon = write_temp(".term", &text);
    let twice = bin().args(["fmt", "term"]).arg(&*canon).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&twice.stdout), text);
}

#[test]
fn machine_parse_error_reports_line() {
    let machine = write_temp(".tm", "machine m\nstates q0\nbogus directive\nend\n");
    let out = bin()
        .args(["tm", "run"])
        .arg(&*machine)
        .args(["--input", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}
