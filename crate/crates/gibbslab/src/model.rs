//! Line-oriented model files.
//!
//! ```text
//! # comment
//! [meta]
//! name = demo
//! eps0 = 0.1
//! param s = 1
//! [A]
//! 11
//! 11
//! [B]
//! 10
//! 01
//! [phi]
//! all : 0
//! 1 1 : log(1 + eps) => 0
//! [psi]
//! block 1 2 : log(eps)
//! 2 1 : s*log(eps)
//! [grid]
//! lo = 1e-9
//! hi = 1e-1
//! per_decade = 4
//! seq = sin+1, sin-1
//! ```
//!
//! States and components are numbered from 1. `block ki kj` expands over the
//! A-edges (phi) or N-pairs (psi) from component ki to component kj of B in
//! decomposition order; `all` covers every A-edge (phi) or N-pair (psi).
//! Later entries override earlier ones.

use std::fmt;

use crate::error::Error;
use crate::matrep::DEFAULT_GRID;
use crate::sft::{scc_decompose, TransitionMatrix};
use crate::weights::{parse_with_params, BlockPotential, EpsExpr, Params, PerturbationFamily, PotentialEntry};

/// An error with the 1-based line it refers to, when there is one.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelError {
    pub line: Option<usize>,
    pub error: Error,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for ModelError {}

fn at(line: usize, error: Error) -> ModelError {
    ModelError { line: Some(line), error }
}

fn syntax(line: usize, msg: impl Into<String>) -> ModelError {
    at(line, Error::Syntax { pos: 0, msg: msg.into() })
}

/// Special ε-sequences along which sin(1/ε) = ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqKind {
    SinPlus,
    SinMinus,
}

impl SeqKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "sin+1" => Some(SeqKind::SinPlus),
            "sin-1" => Some(SeqKind::SinMinus),
            _ => None,
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            SeqKind::SinPlus => 1,
            SeqKind::SinMinus => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SeqKind::SinPlus => "sin+1",
            SeqKind::SinMinus => "sin-1",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub per_decade: usize,
    pub seqs: Vec<SeqKind>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { lo: DEFAULT_GRID.0, hi: DEFAULT_GRID.1, per_decade: DEFAULT_GRID.2, seqs: vec![] }
    }
}

#[derive(Clone, Debug)]
pub struct ModelFile {
    pub name: String,
    pub family: PerturbationFamily,
    pub grid: GridSpec,
}

impl ModelFile {
    pub fn dim(&self) -> usize {
        self.family.dim()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    None,
    Meta,
    A,
    B,
    Phi,
    Psi,
    Grid,
}

enum Target {
    Pair(usize, usize),
    Block(usize, usize),
    All,
}

struct Entry {
    line: usize,
    target: Target,
    expr: EpsExpr,
    limit: Option<EpsExpr>,
}

pub fn parse_model(text: &str) -> Result<ModelFile, ModelError> {
    parse_model_with(text, &[])
}

/// Parse with parameter overrides `(name, value)` applied before validation.
pub fn parse_model_with(text: &str, overrides: &[(String, String)]) -> Result<ModelFile, ModelError> {
    let mut section = Section::None;
    let mut name = String::from("model");
    let mut eps0 = 0.1;
    let mut params = Params::new();
    let mut a_rows: Vec<(usize, String)> = Vec::new();
    let mut b_rows: Vec<(usize, String)> = Vec::new();
    let mut phi: Vec<Entry> = Vec::new();
    let mut psi: Vec<Entry> = Vec::new();
    let mut grid = GridSpec::default();
    let mut phi_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            section = match line {
                "[meta]" => Section::Meta,
                "[A]" => Section::A,
                "[B]" => Section::B,
                "[phi]" => {
                    phi_line = ln;
                    Section::Phi
                }
                "[psi]" => Section::Psi,
                "[grid]" => Section::Grid,
                _ => return Err(syntax(ln, format!("unknown section {line}"))),
            };
            continue;
        }
        match section {
            Section::None => return Err(syntax(ln, "content before the first section")),
            Section::Meta => {
                if let Some(rest) = line.strip_prefix("param ") {
                    let (n, v) = split_eq(rest).ok_or_else(|| syntax(ln, "expected `param name = value`"))?;
                    if !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                        || !n.starts_with(|c: char| c.is_ascii_alphabetic())
                        || ["eps", "log", "exp", "sin"].contains(&n)
                    {
                        return Err(syntax(ln, format!("invalid parameter name `{n}`")));
                    }
                    let e = parse_expr(ln, v, &params)?;
                    if e.mentions_eps() {
                        return Err(at(ln, Error::Domain(format!("parameter {n} may not depend on eps"))));
                    }
                    params.insert(n.to_string(), e);
                } else {
                    let (key, v) = split_eq(line).ok_or_else(|| syntax(ln, "expected `key = value`"))?;
                    match key {
                        "name" => name = v.to_string(),
                        "eps0" => eps0 = parse_f64(ln, v)?,
                        _ => return Err(syntax(ln, format!("unknown meta key `{key}`"))),
                    }
                }
            }
            Section::A => a_rows.push((ln, line.to_string())),
            Section::B => b_rows.push((ln, line.to_string())),
            Section::Phi | Section::Psi => {
                let entry = parse_entry(ln, line, &params)?;
                if section == Section::Psi && entry.limit.is_some() {
                    return Err(syntax(ln, "psi entries take no limit"));
                }
                if section == Section::Phi {
                    phi.push(entry)
                } else {
                    psi.push(entry)
                }
            }
            Section::Grid => {
                let (key, v) = split_eq(line).ok_or_else(|| syntax(ln, "expected `key = value`"))?;
                match key {
                    "lo" => grid.lo = parse_f64(ln, v)?,
                    "hi" => grid.hi = parse_f64(ln, v)?,
                    "per_decade" => {
                        grid.per_decade = v.parse().map_err(|_| syntax(ln, "per_decade must be a positive integer"))?
                    }
                    "seq" => {
                        grid.seqs = v
                            .split(',')
                            .map(|s| {
                                SeqKind::parse(s).ok_or_else(|| syntax(ln, format!("unknown sequence `{}`", s.trim())))
                            })
                            .collect::<Result<_, _>>()?
                    }
                    _ => return Err(syntax(ln, format!("unknown grid key `{key}`"))),
                }
            }
        }
    }
    for (n, v) in overrides {
        if !params.contains_key(n) {
            return Err(ModelError { line: None, error: Error::UnknownIdentifier(n.clone()) });
        }
        let e = parse_with_params(v, &|x| params.contains_key(x)).map_err(|error| ModelError { line: None, error })?;
        if e.mentions_eps() {
            return Err(ModelError {
                line: None,
                error: Error::Domain(format!("parameter {n} may not depend on eps")),
            });
        }
        params.insert(n.clone(), e);
    }
    let a = matrix(&a_rows, "A")?;
    let b = matrix(&b_rows, "B")?;
    let d = a.dim();
    if b.dim() != d {
        return Err(ModelError {
            line: b_rows.first().map(|r| r.0),
            error: Error::Dimension(format!("A is {d}x{d} but B is {0}x{0}", b.dim())),
        });
    }
    if !b.is_contained_in(&a) {
        let (i, j) = b.edges().find(|&(i, j)| !a.get(i, j)).unwrap();
        return Err(ModelError {
            line: b_rows.get(i).map(|r| r.0),
            error: Error::Condition(format!("B({0},{1}) = 1 but A({0},{1}) = 0", i + 1, j + 1)),
        });
    }
    let dec = scc_decompose(&b);
    let n = TransitionMatrix::from_fn(d, |i, j| a.get(i, j) && !b.get(i, j));
    let expand = |e: &Entry, allowed: &TransitionMatrix, what: &str| -> Result<Vec<(usize, usize)>, ModelError> {
        match e.target {
            Target::Pair(i, j) => {
                if i >= d || j >= d {
                    return Err(at(e.line, Error::Domain(format!("state out of range in ({},{})", i + 1, j + 1))));
                }
                if !allowed.get(i, j) {
                    return Err(at(e.line, Error::Domain(format!("({},{}) is not {what}", i + 1, j + 1))));
                }
                Ok(vec![(i, j)])
            }
            Target::Block(ki, kj) => {
                let nb = dec.blocks.len();
                if ki >= nb || kj >= nb {
                    return Err(at(
                        e.line,
                        Error::Domain(format!("B has {nb} components, got block {} {}", ki + 1, kj + 1)),
                    ));
                }
                let mut v = Vec::new();
                for &i in &dec.blocks[ki].states {
                    for &j in &dec.blocks[kj].states {
                        if allowed.get(i, j) {
                            v.push((i, j));
                        }
                    }
                }
                Ok(v)
            }
            Target::All => Ok(allowed.edges().collect()),
        }
    };
    let mut phi_pot = BlockPotential::new(d);
    for e in &phi {
        for (i, j) in expand(e, &a, "an A-edge")? {
            let entry = match &e.limit {
                Some(l) => PotentialEntry::with_limit(e.expr.clone(), l.clone()),
                None => PotentialEntry::new(e.expr.clone()),
            };
            phi_pot.set(i, j, entry);
        }
    }
    let mut psi_pot = BlockPotential::new(d);
    for e in &psi {
        for (i, j) in expand(e, &n, "in N (an A-edge outside B)")? {
            psi_pot.set(i, j, PotentialEntry::new(e.expr.clone()));
        }
    }
    let family = PerturbationFamily::new(a, b, phi_pot, psi_pot, params, eps0).map_err(|error| {
        let line = match error {
            Error::Coverage(_) | Error::Domain(_) => Some(phi_line).filter(|&l| l > 0),
            _ => None,
        };
        ModelError { line, error }
    })?;
    if !(grid.lo > 0.0 && grid.hi >= grid.lo && grid.per_decade >= 1) {
        return Err(ModelError {
            line: None,
            error: Error::Domain("grid needs 0 < lo <= hi and per_decade >= 1".into()),
        });
    }
    Ok(ModelFile { name, family, grid })
}

fn split_eq(s: &str) -> Option<(&str, &str)> {
    let (a, b) = s.split_once('=')?;
    Some((a.trim(), b.trim()))
}

fn parse_f64(ln: usize, v: &str) -> Result<f64, ModelError> {
    v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| syntax(ln, format!("expected a number, got `{v}`")))
}

fn parse_expr(ln: usize, text: &str, params: &Params) -> Result<EpsExpr, ModelError> {
    parse_with_params(text, &|n| params.contains_key(n)).map_err(|e| at(ln, e))
}

fn parse_entry(ln: usize, line: &str, params: &Params) -> Result<Entry, ModelError> {
    let (lhs, rhs) = line.split_once(':').ok_or_else(|| syntax(ln, "expected `i j : expr`"))?;
    let words: Vec<&str> = lhs.split_whitespace().collect();
    let index = |w: &str| -> Result<usize, ModelError> {
        match w.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(syntax(ln, format!("expected a positive index, got `{w}`"))),
        }
    };
    let target = match words.as_slice() {
        ["all"] => Target::All,
        ["block", ki, kj] => Target::Block(index(ki)?, index(kj)?),
        [i, j] => Target::Pair(index(i)?, index(j)?),
        _ => return Err(syntax(ln, "expected `i j`, `block ki kj` or `all` before `:`")),
    };
    let (e, l) = match rhs.split_once("=>") {
        Some((e, l)) => (e, Some(l)),
        None => (rhs, None),
    };
    let expr = parse_expr(ln, e, params)?;
    let limit = match l {
        Some(l) => {
            let le = parse_expr(ln, l, params)?;
            if le.mentions_eps() {
                return Err(at(ln, Error::Domain("a limit may not depend on eps".into())));
            }
            Some(le)
        }
        None => None,
    };
    Ok(Entry { line: ln, target, expr, limit })
}

fn matrix(rows: &[(usize, String)], what: &str) -> Result<TransitionMatrix, ModelError> {
    if rows.is_empty() {
        return Err(ModelError {
            line: None,
            error: Error::Dimension(format!("section [{what}] is missing or empty")),
        });
    }
    let d = rows.len();
    let mut bits = Vec::with_capacity(d * d);
    for (ln, r) in rows {
        let r: String = r.split_whitespace().collect();
        if r.chars().count() != d {
            return Err(at(
                *ln,
                Error::Dimension(format!("row of [{what}] has {} entries, expected {d}", r.chars().count())),
            ));
        }
        for c in r.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(syntax(*ln, format!("matrix entries must be 0 or 1, got `{c}`"))),
            }
        }
    }
    TransitionMatrix::new(d, bits).map_err(|e| ModelError { line: None, error: e })
}

pub const EXAMPLE_5_1: &str = include_str!("../models/example_5_1.model");
pub const EXAMPLE_5_2: &str = include_str!("../models/example_5_2.model");
pub const EXAMPLE_5_3: &str = include_str!("../models/example_5_3.model");

/// Bundled model text by name (`example_5_1`, `example_5_2`, `example_5_3`, with or
/// without the `.model` suffix).
pub fn bundled(name: &str) -> Option<&'static str> {
    match name.trim_end_matches(".model") {
        "example_5_1" => Some(EXAMPLE_5_1),
        "example_5_2" => Some(EXAMPLE_5_2),
        "example_5_3" => Some(EXAMPLE_5_3),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_models_parse() {
        let m = parse_model(EXAMPLE_5_2).unwrap();
        assert_eq!(m.dim(), 6);
        assert_eq!(m.family.a().ones(), 28);
        assert_eq!(m.grid.seqs, vec![SeqKind::SinPlus, SeqKind::SinMinus]);
        let m = parse_model(EXAMPLE_5_3).unwrap();
        assert_eq!(m.dim(), 8);
    }

    #[test]
    fn overrides_replace_parameters() {
        let m = parse_model_with(EXAMPLE_5_2, &[("s".into(), "1.5".into())]).unwrap();
        assert_eq!(m.family.params()["s"], EpsExpr::Num("1.5".into()));
        let e = parse_model_with(EXAMPLE_5_2, &[("t".into(), "1".into())]).unwrap_err();
        assert_eq!(e.error, Error::UnknownIdentifier("t".into()));
    }

    #[test]
    fn psi_on_b_edge_names_the_pair() {
        let text = "[A]\n11\n11\n[B]\n10\n01\n[phi]\nall : 0\n[psi]\nall : log(eps)\n1 1 : log(eps)\n";
        let e = parse_model(text).unwrap_err();
        assert_eq!(e.line, Some(11));
        assert!(matches!(&e.error, Error::Domain(m) if m.contains("(1,1)")), "{e}");
    }

    #[test]
    fn empty_phi_is_a_coverage_error() {
        let text = "[A]\n11\n11\n[B]\n11\n11\n[phi]\n";
        let e = parse_model(text).unwrap_err();
        assert!(matches!(e.error, Error::Coverage(_)), "{e}");
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let e = parse_model("[A]\n12\n21\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = parse_model("[A]\n11\n11\n[B]\n11\n11\n[phi]\nall : log(\n").unwrap_err();
        assert_eq!(e.line, Some(8));
        let e = parse_model("[A]\n11\n11\n[B]\n11\n11\n[phi]\nall : q\n").unwrap_err();
        assert_eq!(e.error, Error::UnknownIdentifier("q".into()));
    }

    #[test]
    fn explicit_limits() {
        let text = "[A]\n1\n[B]\n1\n[phi]\n1 1 : log(2 + eps) => log(2)\n";
        let m = parse_model(text).unwrap();
        let l: f64 = m.family.phi_limit(0, 0).unwrap();
        assert!((l - 2f64.ln()).abs() < 1e-15);
    }
}
