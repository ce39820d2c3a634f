use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context as _};

use holonomy::desing::{self, companion_system, DesingError};
use holonomy::diffop::{DiffOp, RatFunc};
use holonomy::exactalg::{parse_rational, Location, Poly, Series};
use holonomy::frobenius::{self, FrobeniusError};
use holonomy::guesser::{guess_ode, DegreeSchedule, GuessConfig, GuessError};
use holonomy::lattice::{self, cache, LatticeError};

use crate::config::FileConfig;
use crate::Failure;

pub struct Context {
    pub file: FileConfig,
    pub threads: usize,
}

impl Context {
    fn path(&self, flag: Option<PathBuf>, key: &str) -> Result<Option<PathBuf>, Failure> {
        Ok(flag.or_else(|| self.file.get(key).map(PathBuf::from)))
    }

    fn input(&self, flag: Option<PathBuf>, key: &str) -> Result<PathBuf, Failure> {
        let p = self
            .path(flag, key)?
            .ok_or_else(|| anyhow!("--{key} is required"))?;
        if !p.is_file() {
            return Err(anyhow!("{} does not exist", p.display()).into());
        }
        Ok(p)
    }
}

fn check_output(p: &Path) -> Result<(), Failure> {
    match p.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(anyhow!("output directory {} does not exist", dir.display()).into())
        }
        _ => Ok(()),
    }
}

fn write_file(p: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(p, text)
        .with_context(|| format!("writing {}", p.display()))
        .map_err(Failure::Precondition)
}

fn lattice_failure(e: LatticeError) -> Failure {
    match e {
        LatticeError::Reconstruction(_) | LatticeError::NotIntegral => Failure::Internal(e.into()),
        LatticeError::NoConvergence { .. } => Failure::NoResult(e.to_string()),
        _ => Failure::Precondition(e.into()),
    }
}

fn frobenius_failure(e: FrobeniusError) -> Failure {
    match e {
        FrobeniusError::Inconsistent { .. } => Failure::Internal(e.into()),
        _ => Failure::Precondition(e.into()),
    }
}

fn desing_failure(e: DesingError) -> Failure {
    match e {
        DesingError::Local(e) => frobenius_failure(e),
        DesingError::Inconsistent(_) => Failure::Internal(e.into()),
        DesingError::Stuck { .. } => Failure::NoResult(e.to_string()),
        _ => Failure::Precondition(e.into()),
    }
}

fn read_series(p: &Path) -> Result<Series, Failure> {
    Ok(cache::read(p).map_err(lattice_failure)?.series)
}

fn read_op(p: &Path) -> Result<DiffOp, Failure> {
    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    DiffOp::parse(&text).map_err(|e| anyhow!("{}: {e}", p.display()).into())
}

pub fn cache_dir() -> PathBuf {
    std::env::var_os("HOLONOMY_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("holonomy-cache"))
}

pub fn gen_series(ctx: &Context, order: Option<usize>, out: Option<PathBuf>) -> Result<(), Failure> {
    let order = ctx
        .file
        .pick(order, "order")?
        .ok_or_else(|| anyhow!("--order is required"))?;
    if order < 9 {
        return Err(lattice_failure(LatticeError::OrderTooSmall(order)));
    }
    let out = match ctx.path(out, "out")? {
        Some(p) => p,
        None => {
            let dir = cache_dir();
            std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            dir.join(format!("chi3_{order}.txt"))
        }
    };
    check_output(&out)?;
    if out.exists() {
        // a corrupt file is an error, never silently regenerated
        let existing = cache::read(&out).map_err(lattice_failure)?;
        let have = existing.series.order().unwrap_or(0);
        if have >= order {
            println!("{}: already holds coefficients through w^{have}", out.display());
            return Ok(());
        }
    }
    let checkpoint = out.with_extension("partial");
    let s = lattice::chi3_series_resumable(order, ctx.threads, &checkpoint, |done, total| {
        eprintln!("prime {done}/{total}")
    })
    .map_err(lattice_failure)?;
    cache::write(&out, &s.to_file()).map_err(lattice_failure)?;
    let _ = std::fs::remove_file(&checkpoint);
    println!("{}: wrote coefficients through w^{order}", out.display());
    Ok(())
}

/// `"47,46,…,36"`, highest derivative first, as degrees indexed by order.
pub fn parse_degrees(s: &str) -> anyhow::Result<Vec<usize>> {
    let mut d: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| anyhow!("degree {t:?}: {e}")))
        .collect::<anyhow::Result<_>>()?;
    if d.len() < 2 {
        bail!("--degrees needs at least two entries");
    }
    d.reverse();
    Ok(d)
}

pub fn guess(
    ctx: &Context,
    series: Option<PathBuf>,
    max_order: Option<usize>,
    degrees: Option<String>,
    min_surplus: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let path = ctx.input(series, "series")?;
    let out = ctx.path(out, "out")?;
    if let Some(o) = &out {
        check_output(o)?;
    }
    let defaults = GuessConfig::default();
    let max_order = ctx.file.pick(max_order, "max-order")?;
    let degrees = ctx.file.pick(degrees, "degrees")?;
    let schedule = match &degrees {
        Some(s) => {
            let d = parse_degrees(s)?;
            if let Some(m) = max_order {
                if d.len() - 1 > m {
                    return Err(anyhow!("--degrees has order {} above --max-order {m}", d.len() - 1).into());
                }
            }
            DegreeSchedule::Explicit(d)
        }
        None => defaults.degrees.clone(),
    };
    let cfg = GuessConfig {
        max_order: max_order.unwrap_or(defaults.max_order),
        degrees: schedule,
        min_surplus: ctx.file.pick(min_surplus, "min-surplus")?.unwrap_or(defaults.min_surplus),
    };
    let f = read_series(&path)?;
    let result = lattice::with_threads(ctx.threads, || guess_ode(&f, &cfg)).map_err(|e| match e {
        GuessError::InsufficientData { .. } | GuessError::InvalidConfig(_) => Failure::Precondition(e.into()),
    })?;
    let Some(r) = result else {
        return Err(Failure::NoResult("no operator found within the scan".into()));
    };
    if !r.operator.apply(&f).is_zero() {
        return Err(Failure::Internal(anyhow!("accepted operator does not annihilate the series")));
    }
    let degs: Vec<String> = r.degrees.iter().rev().map(|d| d.to_string()).collect();
    println!("order: {}", r.order);
    println!("degrees (highest derivative first): {}", degs.join(","));
    println!("used through: w^{}", r.used_through);
    println!("surplus verified: {}", r.surplus_verified);
    let text = r.operator.to_file_string();
    match out {
        Some(p) => {
            write_file(&p, &text)?;
            println!("operator written to {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn analyze(ctx: &Context, op: Option<PathBuf>) -> Result<(), Failure> {
    let l = read_op(&ctx.input(op, "op")?)?;
    let a = lattice::with_threads(ctx.threads, || frobenius::analyze(&l)).map_err(frobenius_failure)?;
    print!("{}", frobenius::render_report(&a));
    Ok(())
}

/// `"2 4 ; 0 1 0 -16"` → `(2 + 4w) / (w − 16w³)`; the denominator defaults to 1.
pub fn parse_logderiv(s: &str) -> anyhow::Result<RatFunc> {
    let poly = |t: &str| -> anyhow::Result<Poly> {
        let c = t
            .split_whitespace()
            .map(|x| parse_rational(x).ok_or_else(|| anyhow!("bad coefficient {x:?}")))
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok(Poly::new(c))
    };
    let (n, d) = match s.split_once(';') {
        Some((n, d)) => (poly(n)?, poly(d)?),
        None => (poly(s)?, Poly::one()),
    };
    if d.is_zero() {
        bail!("zero denominator in {s:?}");
    }
    Ok(RatFunc::new(n, d))
}

fn logderiv_of(u: &RatFunc) -> RatFunc {
    // (n/d)'/(n/d) = (n'd − nd')/(nd)
    let (n, d) = (u.numerator(), u.denominator());
    RatFunc::new(&(&n.derivative() * d) - &(n * &d.derivative()), n * d)
}

fn factor_line(out: &mut String, label: &str, l: &DiffOp, by: &DiffOp) -> Option<DiffOp> {
    let div = l.right_divide(by);
    let ok = div.remainder.is_zero();
    let _ = writeln!(out, "{label}: right factor {by}");
    let _ = writeln!(out, "  remainder: {}", if ok { "0" } else { "nonzero" });
    if ok {
        // μ·L = Q·B with μ polynomial: the quotient over Q(w) is μ⁻¹Q
        let q = div.quotient.strip_common_factor();
        let _ = writeln!(out, "  quotient order: {}", q.order().unwrap_or(0));
        Some(q)
    } else {
        None
    }
}

pub fn factor(
    ctx: &Context,
    op: Option<PathBuf>,
    adjoint: bool,
    series: Option<PathBuf>,
    out: Option<PathBuf>,
    solutions: &[String],
) -> Result<(), Failure> {
    let l = read_op(&ctx.input(op, "op")?)?;
    let series = match ctx.path(series, "series")? {
        Some(p) => Some(read_series(&p)?),
        None => None,
    };
    let out = ctx.path(out, "out")?;
    if let Some(d) = &out {
        if !d.is_dir() {
            return Err(anyhow!("--out must be an existing directory for factor").into());
        }
    }
    let rights: Vec<DiffOp> = solutions
        .iter()
        .map(|s| parse_logderiv(s).map(|r| DiffOp::first_order_from_solution(&r)))
        .collect::<anyhow::Result<_>>()?;
    if rights.is_empty() && !adjoint {
        return Err(anyhow!("give at least one LOGDERIV or --adjoint").into());
    }
    let mut report = String::new();
    let mut quotients: Vec<(String, DiffOp)> = Vec::new();
    for (i, n1) in rights.iter().enumerate() {
        if let Some(q) = factor_line(&mut report, &format!("solution {}", i + 1), &l, n1) {
            quotients.push((format!("right_{}", i + 1), q));
        }
    }
    if adjoint {
        let sols = lattice::with_threads(ctx.threads, || frobenius::rational_solutions(&l.adjoint()))
            .map_err(frobenius_failure)?;
        let Some(u) = sols.first().cloned() else {
            print!("{report}");
            return Err(Failure::NoResult("the adjoint has no rational solution".into()));
        };
        let shown = |r: &RatFunc| {
            format!("({}) / ({})", r.numerator().normalized_factor(), r.denominator().normalized_factor())
        };
        let _ = writeln!(report, "adjoint rational solution (up to a constant): {}", shown(&u));
        // the same solution for the adjoint of the monic operator d^q + Σ (a_k/a_q) d^k
        let monic = u.mul(&RatFunc::from_poly(l.leading()));
        let _ = writeln!(report, "  for the monic operator: {}", shown(&monic));
        let factors = |p: &Poly| -> String {
            let f: Vec<String> = desing::factor_leading(p)
                .iter()
                .map(|(f, m)| if *m > 1 { format!("({f})^{m}") } else { format!("({f})") })
                .collect();
            if f.is_empty() { "1".into() } else { f.join(" ") }
        };
        let _ = writeln!(report, "  numerator factors: {}", factors(monic.numerator()));
        let _ = writeln!(report, "  denominator factors: {}", factors(monic.denominator()));
        let n = DiffOp::first_order_from_solution(&logderiv_of(&u));
        let m1 = n.adjoint().canonical();
        let div = l.left_divide(&m1);
        let ok = div.remainder.is_zero();
        let _ = writeln!(report, "left factor: {m1}");
        let _ = writeln!(report, "  remainder: {}", if ok { "0" } else { "nonzero" });
        if !ok {
            print!("{report}");
            return Err(Failure::Internal(anyhow!("adjoint solution does not give a left factor")));
        }
        // L·μ = M₁·Q, so the cofactor is Q∘μ⁻¹
        let l6 = div.quotient.right_mul_inverse_poly(&div.multiplier);
        let _ = writeln!(report, "  cofactor order: {}", l6.order().unwrap_or(0));
        for (i, n1) in rights.iter().enumerate() {
            if let Some(q) = factor_line(&mut report, &format!("cofactor by solution {}", i + 1), &l6, n1) {
                quotients.push((format!("cofactor_right_{}", i + 1), q));
            }
        }
        quotients.push(("cofactor".into(), l6));
    }
    if let Some(f) = &series {
        for (name, q) in &quotients {
            let n = f.order().unwrap_or(0);
            let annihilates = q.order().is_some_and(|k| n >= k) && q.apply(f).is_zero();
            let _ = writeln!(report, "{name} annihilates series: {}", if annihilates { "yes" } else { "no" });
        }
    }
    if let Some(dir) = &out {
        for (name, q) in &quotients {
            write_file(&dir.join(format!("{name}.op")), &q.to_file_string())?;
        }
    }
    print!("{report}");
    Ok(())
}

pub fn desingularize(ctx: &Context, op: Option<PathBuf>, out: Option<PathBuf>) -> Result<(), Failure> {
    let l = read_op(&ctx.input(op, "op")?)?;
    let out = ctx.path(out, "out")?;
    if let Some(o) = &out {
        check_output(o)?;
    }
    let a = lattice::with_threads(ctx.threads, || frobenius::analyze(&l)).map_err(frobenius_failure)?;
    let pts: Vec<Location> = a
        .points
        .iter()
        .filter(|p| p.is_apparent)
        .map(|p| p.location.clone())
        .collect();
    let r = lattice::with_threads(ctx.threads, || desing::desingularize(&l, &pts)).map_err(desing_failure)?;
    println!("order: {} -> {}", l.order().unwrap_or(0), r.operator.order().unwrap_or(0));
    for p in &r.removed_points {
        println!("removed: {p}");
    }
    let lead: Vec<String> = r
        .leading_factorization
        .iter()
        .map(|(f, m)| format!("({f})^{m}"))
        .collect();
    println!("leading coefficient: {}", if lead.is_empty() { "constant".into() } else { lead.join(" ") });
    let text = r.operator.to_file_string();
    match &out {
        Some(p) => {
            write_file(p, &text)?;
            println!("operator written to {}", p.display());
        }
        None => print!("{text}"),
    }
    match companion_system(&r.operator) {
        Ok(sys) => {
            println!("system: dimension {}, {} pole factors", sys.dimension(), sys.residue_matrices.len());
            if let Some(p) = &out {
                let sp = PathBuf::from(format!("{}.system", p.display()));
                write_file(&sp, &sys.to_file_string())?;
                println!("system written to {}", sp.display());
            }
        }
        Err(DesingError::NotFuchsian) => println!("system: none (no finite singular point)"),
        Err(e) => return Err(desing_failure(e)),
    }
    Ok(())
}

pub fn oracle(ctx: &Context, w: f64, tol: Option<f64>, series: Option<PathBuf>) -> Result<(), Failure> {
    let tol = ctx.file.pick(tol, "tol")?.unwrap_or(1e-10);
    let series = match ctx.path(series, "series")? {
        Some(p) => Some(read_series(&p)?),
        None => None,
    };
    let v = lattice::chi3_quadrature(w, tol).map_err(lattice_failure)?;
    println!("quadrature: {v:.17e}");
    if let Some(f) = series {
        let sum = f.partial_sum_f64(w);
        let rel = ((sum - v) / v).abs();
        println!("series partial sum: {sum:.17e}");
        println!("relative difference: {rel:.3e}");
    }
    Ok(())
}
