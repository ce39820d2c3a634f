use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use holonomy::diffop::{DiffOp, RatFunc};
use holonomy::exactalg::{int, Poly, Rational, Series};
use holonomy::lattice::cache::{self, SeriesFile};

fn holonomy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonomy"))
        .args(args)
        .env_remove("HOLONOMY_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_series(dir: &Path, name: &str, s: Series) -> PathBuf {
    let path = dir.join(name);
    cache::write(&path, &SeriesFile { normalization: None, series: s }).unwrap();
    path
}

fn write_op(dir: &Path, name: &str, l: &DiffOp) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, l.to_file_string()).unwrap();
    path
}

/// `w² / ((1 − 4w) √(1 − 16w²))`
fn s2_series(n: usize) -> Series {
    let mut h = vec![Rational::from_integer(1.into())];
    for k in 1..=n / 2 {
        let prev = h[k - 1].clone();
        h.push(prev * int(16 * (2 * k as i64 - 1)) / int(2 * k as i64));
    }
    let mut sq = vec![int(0); n + 1];
    for (k, hk) in h.into_iter().enumerate() {
        sq[2 * k] = hk;
    }
    let geo = Series::from_ratio(&Poly::one(), &Poly::from_ints(&[1, -4]), n);
    (&Series::new(sq) * &geo).shift_up(2).truncate(n)
}

fn picard_fuchs() -> DiffOp {
    let s_sm1_sq = Poly::from_ints(&[0, 1, -2, 1]).scale(&int(144));
    DiffOp::new(vec![Poly::from_ints(&[-4, 31]), s_sm1_sq.clone(), &s_sm1_sq * &Poly::x()])
}

#[test]
fn gen_series_low_order_and_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chi3.txt");
    let o = holonomy(&["gen-series", "--order", "16", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        data,
        ["9 1", "10 0", "11 36", "12 4", "13 884", "14 196", "15 18532", "16 6084"]
    );
    assert!(!out.with_extension("partial").exists());

    let again = holonomy(&["gen-series", "--order", "12", "--out", p(&out)]);
    assert_eq!(code(&again), 0);
    let again = holonomy(&["gen-series", "--order", "16", "--out", p(&out), "--threads", "2"]);
    assert_eq!(code(&again), 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), text);
}

#[test]
fn gen_series_rejections() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.txt");
    assert_eq!(code(&holonomy(&["gen-series", "--order", "8", "--out", p(&out)])), 3);
    assert!(!out.exists());

    let o = holonomy(&["gen-series", "--order", "12", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap().replace("\n11 36\n", "\n11 37\n");
    std::fs::write(&out, text).unwrap();
    let o = holonomy(&["gen-series", "--order", "14", "--out", p(&out)]);
    assert_eq!(code(&o), 3);

    let missing = dir.path().join("no/such/dir/s.txt");
    assert_eq!(code(&holonomy(&["gen-series", "--order", "10", "--out", p(&missing)])), 3);
    assert_eq!(code(&holonomy(&["gen-series", "--bogus"])), 3);
}

#[test]
fn gen_series_default_location() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_holonomy"))
        .args(["gen-series", "--order", "10"])
        .env("HOLONOMY_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("chi3_10.txt").is_file());
}

#[test]
fn guess_algebraic_series() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_series(dir.path(), "s2.txt", s2_series(29));
    let out = dir.path().join("n1.op");
    let o = holonomy(&["guess", "--series", p(&s), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("order: 1"));
    let l = DiffOp::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let n1 = DiffOp::first_order_from_solution(&RatFunc::new(
        Poly::from_ints(&[2, 4]),
        Poly::from_ints(&[0, 1, 0, -16]),
    ));
    assert_eq!(l, n1);
}

#[test]
fn guess_geometric_to_stdout_and_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_series(dir.path(), "g.txt", Series::from_ints(&[1; 30]));
    let o = holonomy(&["guess", "--series", p(&s), "--max-order", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let op_text = &text[text.find("order=").unwrap()..];
    let l = DiffOp::parse(op_text).unwrap();
    assert!(l.same_up_to_content(&DiffOp::from_ints(&[&[-1], &[1, -1]])));

    let f = Series::from_ratio(&Poly::one(), &Poly::from_ints(&[1, -1, 0, -1]), 25);
    let s = write_series(dir.path(), "h.txt", f);
    let o = holonomy(&["guess", "--series", p(&s), "--max-order", "1", "--degrees", "1,1"]);
    assert_eq!(code(&o), 2);
    // one entry is not a schedule; order 3 exceeds max-order 1
    assert_eq!(code(&holonomy(&["guess", "--series", p(&s), "--degrees", "3"])), 3);
    let o = holonomy(&["guess", "--series", p(&s), "--max-order", "1", "--degrees", "1,1,1,1"]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&holonomy(&["guess", "--series", "/nonexistent"])), 3);
}

#[test]
fn config_file_defaults_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let f = Series::from_ratio(&Poly::one(), &Poly::from_ints(&[1, -1, 0, -1]), 25);
    let s = write_series(dir.path(), "h.txt", f);
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, format!("series={}\nmax_order=1\ndegrees=1,1\n", p(&s))).unwrap();
    assert_eq!(code(&holonomy(&["guess", "--config", p(&cfg)])), 2);
    // the flag beats the file
    let o = holonomy(&["guess", "--config", p(&cfg), "--degrees", "3,3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::write(&cfg, "max_order\n").unwrap();
    assert_eq!(code(&holonomy(&["guess", "--config", p(&cfg)])), 3);
}

#[test]
fn analyze_reports_points_and_relation() {
    let dir = tempfile::tempdir().unwrap();
    let op = write_op(dir.path(), "pf.op", &picard_fuchs());
    let o = holonomy(&["analyze", "--op", p(&op)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("point: w = 0"));
    assert!(text.contains("exponents: 1/6, -1/6"));
    assert!(text.contains("exponents: 3/4, 1/4"));
    assert!(text.contains("point: w = infinity"));
    assert!(text.contains("log depth: 1"));
    assert!(text.contains("fuchsian: yes; points 3; exponent sum 1 vs 1 (holds)"));

    // w d³ − d²: solutions 1, w, w³
    let op = write_op(dir.path(), "a.op", &DiffOp::from_ints(&[&[0], &[0], &[-1], &[0, 1]]));
    let text = stdout(&holonomy(&["analyze", "--op", p(&op)]));
    assert!(text.contains("apparent: yes"));
    assert!(text.contains("exponents: 3, 1, 0"));

    let op = write_op(dir.path(), "irr.op", &DiffOp::from_ints(&[&[-1], &[1]]));
    let text = stdout(&holonomy(&["analyze", "--op", p(&op)]));
    assert!(text.contains("kind: irregular"));
    assert!(text.contains("fuchsian: no"));
}

#[test]
fn factor_by_solutions_and_adjoint() {
    let dir = tempfile::tempdir().unwrap();
    // (w d + 2)(w d − 1): solutions w and w⁻²
    let l = DiffOp::from_ints(&[&[-2], &[0, 2], &[0, 0, 1]]);
    let op = write_op(dir.path(), "l.op", &l);
    let q = dir.path().join("q");
    std::fs::create_dir(&q).unwrap();
    let g = write_series(dir.path(), "w.txt", Series::from_ints(&[0, 1, 0, 0, 0, 0]));
    let o = holonomy(&[
        "factor", "--op", p(&op), "--out", p(&q), "--series", p(&g), "1 ; 0 1", "-2 ; 0 1", "1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.matches("remainder: 0").count(), 2);
    assert!(text.contains("remainder: nonzero"));
    // w is killed by the right factor itself, not by the quotient
    assert!(text.contains("right_2 annihilates series: yes"));
    assert!(text.contains("right_1 annihilates series: no"));
    let r1 = DiffOp::parse(&std::fs::read_to_string(q.join("right_1.op")).unwrap()).unwrap();
    assert!(r1.same_up_to_content(&DiffOp::from_ints(&[&[2], &[0, 1]])));

    let o = holonomy(&["factor", "--op", p(&op), "--adjoint", "-2 ; 0 1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("adjoint rational solution"));
    assert!(text.contains("cofactor order: 1"));
    assert!(text.contains("cofactor by solution 1: right factor"));
    assert!(text.contains("remainder: 0"));

    // no rational solution: the adjoint has non-integer exponents everywhere
    let pf = write_op(dir.path(), "pf.op", &picard_fuchs());
    assert_eq!(code(&holonomy(&["factor", "--op", p(&pf), "--adjoint"])), 2);
    // the rational-solution search needs a Fuchsian adjoint
    let op = write_op(dir.path(), "e.op", &DiffOp::from_ints(&[&[-1], &[1]]));
    assert_eq!(code(&holonomy(&["factor", "--op", p(&op), "--adjoint"])), 3);
    assert_eq!(code(&holonomy(&["factor", "--op", p(&op), "1 ;"])), 3);
    assert_eq!(code(&holonomy(&["factor", "--op", p(&op)])), 3);
}

#[test]
fn desingularize_writes_operator_and_system() {
    let dir = tempfile::tempdir().unwrap();
    // solutions √w and √w (w³ + 3w): apparent at w² + 1, exponents 1/2, 3/2 at 0
    let op = write_op(
        dir.path(),
        "sq.op",
        &DiffOp::from_ints(&[&[9, 0, 21], &[0, -12, 0, -36], &[0, 0, 12, 0, 12]]),
    );
    let out = dir.path().join("sqd.op");
    let o = holonomy(&["desingularize", "--op", p(&op), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("order: 2 -> 3"));
    assert!(text.contains("removed: 1 + w^2 = 0"));
    let l = DiffOp::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let lead = l.leading();
    assert_eq!(lead, Poly::from_ints(&[0, 0, 1]).scale(&lead.coeffs()[2]));
    let sys = std::fs::read_to_string(dir.path().join("sqd.op.system")).unwrap();
    assert!(sys.starts_with("dimension=3\n"));

    let a = holonomy(&["analyze", "--op", p(&out)]);
    assert!(!stdout(&a).contains("apparent: yes"));

    let op = write_op(dir.path(), "pf.op", &picard_fuchs());
    let o = holonomy(&["desingularize", "--op", p(&op)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("order: 2 -> 2"));
}

#[test]
fn oracle_matches_partial_sums() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.txt");
    assert_eq!(code(&holonomy(&["gen-series", "--order", "24", "--out", p(&out)])), 0);
    let o = holonomy(&["oracle", "0.05", "--series", p(&out)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rel: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("relative difference: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(rel < 1e-8, "{text}");
    assert_eq!(code(&holonomy(&["oracle", "0.3"])), 3);
    assert_eq!(code(&holonomy(&["oracle", "-0.1"])), 0);
}
