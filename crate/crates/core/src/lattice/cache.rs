//! Plain-text series cache with an integrity trailer, and per-prime
//! checkpoints for resumable generation.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::LatticeError;
use crate::exactalg::{format_rational, parse_rational, Rational, Series};

/// A series as stored on disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesFile {
    pub normalization: Option<String>,
    pub series: Series,
}

fn digest(data: &str) -> String {
    hex::encode(Sha256::digest(data.as_bytes()))
}

/// Renders the cache text. Data lines start at the first nonzero coefficient;
/// anything before it is zero.
pub fn render(file: &SeriesFile) -> String {
    let s = &file.series;
    let order = s.order().expect("nonempty series");
    let first = s.valuation().unwrap_or(order);
    let mut data = String::new();
    for n in first..=order {
        writeln!(data, "{} {}", n, format_rational(s.coeff(n))).unwrap();
    }
    let mut out = String::from("# variable=w\n");
    if let Some(norm) = &file.normalization {
        writeln!(out, "# normalization={norm}").unwrap();
    }
    writeln!(out, "# order={order}").unwrap();
    out.push_str(&data);
    writeln!(out, "# sha256={}", digest(&data)).unwrap();
    out
}

/// Parses cache text, rejecting any checksum mismatch or gap.
pub fn parse(text: &str) -> Result<SeriesFile, LatticeError> {
    let bad = |m: &str| LatticeError::Cache(m.to_string());
    let mut normalization = None;
    let mut order: Option<usize> = None;
    let mut checksum: Option<String> = None;
    let mut data = String::new();
    let mut entries: Vec<(usize, Rational)> = Vec::new();
    for line in text.lines() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let (k, v) = h
                .trim()
                .split_once('=')
                .ok_or_else(|| bad("malformed header line"))?;
            match k.trim() {
                "variable" if v.trim() == "w" => {}
                "variable" => return Err(bad("series variable must be w")),
                "normalization" => normalization = Some(v.trim().to_string()),
                "order" => order = Some(v.trim().parse().map_err(|_| bad("bad order"))?),
                "sha256" => checksum = Some(v.trim().to_string()),
                _ => return Err(bad("unknown header key")),
            }
            continue;
        }
        if checksum.is_some() {
            return Err(bad("data after the checksum line"));
        }
        let (n, c) = line.split_once(' ').ok_or_else(|| bad("malformed data line"))?;
        let n: usize = n.parse().map_err(|_| bad("bad index"))?;
        let c = parse_rational(c).ok_or_else(|| bad("bad coefficient"))?;
        data.push_str(line);
        data.push('\n');
        entries.push((n, c));
    }
    let order = order.ok_or_else(|| bad("missing order header"))?;
    let checksum = checksum.ok_or_else(|| bad("missing checksum line"))?;
    if checksum != digest(&data) {
        return Err(bad("checksum mismatch"));
    }
    let first = entries.first().map_or(order + 1, |e| e.0);
    let mut coeffs = vec![Rational::from_integer(0.into()); order + 1];
    for (i, (n, c)) in entries.into_iter().enumerate() {
        if n != first + i || n > order {
            return Err(bad("data lines must be consecutive and within the order"));
        }
        coeffs[n] = c;
    }
    Ok(SeriesFile {
        normalization,
        series: Series::new(coeffs),
    })
}

pub fn read(path: &Path) -> Result<SeriesFile, LatticeError> {
    let text = std::fs::read_to_string(path).map_err(|e| LatticeError::Io(e.to_string()))?;
    parse(&text)
}

pub fn write(path: &Path, file: &SeriesFile) -> Result<(), LatticeError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, render(file)).map_err(|e| LatticeError::Io(e.to_string()))?;
    std::fs::rename(&tmp, path).map_err(|e| LatticeError::Io(e.to_string()))
}

/// Per-prime residues saved during a modular run, keyed by order and grid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Checkpoint {
    pub order: usize,
    pub grid: u64,
    pub residues: Vec<(u64, Vec<u64>)>,
}

impl Checkpoint {
    pub fn render(&self) -> String {
        let mut out = format!("# order={}\n# grid={}\n", self.order, self.grid);
        for (p, r) in &self.residues {
            write!(out, "{p}").unwrap();
            for v in r {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses a checkpoint; lines that are truncated (an interrupted write) are dropped.
    pub fn parse(text: &str) -> Option<Checkpoint> {
        let mut cp = Checkpoint::default();
        for line in text.lines() {
            if let Some(v) = line.strip_prefix("# order=") {
                cp.order = v.parse().ok()?;
            } else if let Some(v) = line.strip_prefix("# grid=") {
                cp.grid = v.parse().ok()?;
            } else {
                let nums: Option<Vec<u64>> = line.split(' ').map(|t| t.parse().ok()).collect();
                match nums {
                    Some(v) if v.len() == cp.order + 2 => {
                        cp.residues.push((v[0], v[1..].to_vec()));
                    }
                    _ => continue,
                }
            }
        }
        Some(cp)
    }

    pub fn load(path: &Path) -> Option<Checkpoint> {
        Checkpoint::parse(&std::fs::read_to_string(path).ok()?)
    }

    pub fn save(&self, path: &Path) -> Result<(), LatticeError> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.render()).map_err(|e| LatticeError::Io(e.to_string()))?;
        std::fs::rename(&tmp, path).map_err(|e| LatticeError::Io(e.to_string()))
    }
}
