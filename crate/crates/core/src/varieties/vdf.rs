//! Plain-text variety definition files, so new examples can be added without
//! recompiling.
//!
//! Grammar (one entry per `variety` block; `#` starts a comment):
//!
//! ```text
//! variety <id>
//! ambient P4 | P2xP1 | P(1,1,1,4)        # product of straight factors, or one weighted factor
//! names u v x2 x3 x4                     # optional; defaults to x0..xn
//! nodes 125                              # optional
//! bad-primes 2,5                         # optional
//! twist-status proven|conjectural|plumbing
//! clearing-factor 16                     # optional
//! shape projective | pencil | double-cover <coord>
//! equation                               # one block per equation
//!   <coeff> <e0> <e1> ... <en>           # one monomial per line
//! end
//! involution <name>: x0->x1, x1->x0, x2->-x2
//! twist: v^2 -> d^1, v^4 -> d^2
//! change: v                              # coordinates scaled by sqrt(d'/d)
//! chart <i0> <i,j,...>                   # optional residue chart
//! end-variety
//! ```
//!
//! Every monomial line is checked for homogeneity against the first monomial
//! of its equation; violations are rejected with the offending line number.

use crate::error::VarietyError;

use super::poly::{Ambient, MultiHomogPolynomial, ProjectiveFactor};
use super::{
    CatalogEntry, CoordinateChange, CountShape, InvolutionSpec, ResidueChart, TwistFamily,
    TwistPattern, TwistStatus, VarietyMetadata, VarietySpec,
};

fn err(line: usize, message: impl Into<String>) -> VarietyError {
    VarietyError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_ambient(line: usize, text: &str) -> Result<Ambient, VarietyError> {
    let mut factors = Vec::new();
    for part in text.split('x') {
        let part = part.trim();
        if let Some(rest) = part.strip_prefix("P(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| err(line, "unclosed weighted ambient"))?;
            let weights: Vec<u32> = inner
                .split(',')
                .map(|w| w.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|_| err(line, "bad weight list"))?;
            if weights.is_empty() || weights.contains(&0) {
                return Err(err(line, "weights must be positive"));
            }
            factors.push(ProjectiveFactor::weighted(&weights));
        } else if let Some(rest) = part.strip_prefix('P') {
            let dim: usize = rest
                .parse()
                .map_err(|_| err(line, format!("bad ambient factor `{part}`")))?;
            factors.push(ProjectiveFactor::straight(dim));
        } else {
            return Err(err(line, format!("bad ambient factor `{part}`")));
        }
    }
    if factors.is_empty() {
        return Err(err(line, "empty ambient"));
    }
    Ok(Ambient::Projective(factors))
}

struct Builder {
    start_line: usize,
    id: String,
    ambient: Option<Ambient>,
    names: Option<Vec<String>>,
    metadata: VarietyMetadata,
    shape: CountShape,
    equations: Vec<MultiHomogPolynomial>,
    involutions: Vec<InvolutionSpec>,
    patterns: Vec<TwistPattern>,
    change: Option<Vec<usize>>,
    chart: Option<ResidueChart>,
}

impl Builder {
    fn new(start_line: usize, id: &str) -> Self {
        Builder {
            start_line,
            id: id.to_string(),
            ambient: None,
            names: None,
            metadata: VarietyMetadata::default(),
            shape: CountShape::Projective,
            equations: Vec::new(),
            involutions: Vec::new(),
            patterns: Vec::new(),
            change: None,
            chart: None,
        }
    }

    fn coordinates(&self) -> usize {
        self.ambient.as_ref().map_or(0, Ambient::coordinates)
    }

    fn var_names(&self) -> Vec<String> {
        self.names
            .clone()
            .unwrap_or_else(|| (0..self.coordinates()).map(|i| format!("x{i}")).collect())
    }

    fn resolve_var(&self, line: usize, token: &str) -> Result<usize, VarietyError> {
        let names = self.var_names();
        if let Some(i) = names.iter().position(|n| n == token) {
            return Ok(i);
        }
        Err(err(line, format!("unknown coordinate `{token}`")))
    }

    fn finish(self) -> Result<CatalogEntry, VarietyError> {
        let var_names = self.var_names();
        let ambient = self
            .ambient
            .ok_or_else(|| err(self.start_line, format!("variety `{}` has no ambient", self.id)))?;
        if self.equations.is_empty() {
            return Err(err(
                self.start_line,
                format!("variety `{}` has no equations", self.id),
            ));
        }
        let n = ambient.coordinates();
        if var_names.len() != n {
            return Err(err(
                self.start_line,
                format!("expected {n} coordinate names, got {}", var_names.len()),
            ));
        }
        let twist = if self.patterns.is_empty() {
            None
        } else {
            let scaled = self.change.clone().unwrap_or_default();
            Some(TwistFamily {
                base_id: self.id.clone(),
                patterns: self.patterns,
                change: CoordinateChange::diagonal(n, &scaled),
            })
        };
        Ok(CatalogEntry {
            variety: VarietySpec {
                id: self.id,
                ambient,
                equations: self.equations,
                var_names,
                metadata: self.metadata,
            },
            shape: self.shape,
            involutions: self.involutions,
            twist,
            modular: None,
            chart: self.chart,
            companion: None,
        })
    }
}

/// Parse a definition document into catalog entries.
pub fn parse_definition_file(text: &str) -> Result<Vec<CatalogEntry>, VarietyError> {
    let mut entries = Vec::new();
    let mut current: Option<Builder> = None;
    let mut lines = text.lines().enumerate().peekable();

    while let Some((idx, raw)) = lines.next() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };

        if key == "variety" {
            if let Some(b) = current.take() {
                entries.push(b.finish()?);
            }
            if rest.is_empty() {
                return Err(err(lineno, "variety needs an id"));
            }
            current = Some(Builder::new(lineno, rest));
            continue;
        }
        let Some(b) = current.as_mut() else {
            return Err(err(lineno, "content before any `variety` header"));
        };

        match key {
            "ambient" => b.ambient = Some(parse_ambient(lineno, rest)?),
            "names" => b.names = Some(rest.split_whitespace().map(String::from).collect()),
            "nodes" => {
                b.metadata.nodes =
                    Some(rest.parse().map_err(|_| err(lineno, "bad node count"))?)
            }
            "bad-primes" => {
                b.metadata.bad_primes = rest
                    .split(',')
                    .map(|s| s.trim().parse::<u64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| err(lineno, "bad prime list"))?;
            }
            "twist-status" => {
                b.metadata.twist_status = match rest {
                    "proven" => TwistStatus::Proven,
                    "conjectural" => TwistStatus::Conjectural,
                    "plumbing" => TwistStatus::Plumbing,
                    other => return Err(err(lineno, format!("unknown twist-status `{other}`"))),
                }
            }
            "clearing-factor" => {
                b.metadata.clearing_factor =
                    Some(rest.parse().map_err(|_| err(lineno, "bad clearing factor"))?)
            }
            "notes" => b.metadata.notes = rest.to_string(),
            "shape" => {
                b.shape = match rest.split_whitespace().collect::<Vec<_>>().as_slice() {
                    ["projective"] => CountShape::Projective,
                    ["pencil"] => CountShape::PencilFiberProduct,
                    ["double-cover", coord] => CountShape::DoubleCover {
                        cover_coordinate: b.resolve_var(lineno, coord)?,
                    },
                    _ => return Err(err(lineno, format!("unknown shape `{rest}`"))),
                }
            }
            "equation" => {
                let ambient = b
                    .ambient
                    .clone()
                    .ok_or_else(|| err(lineno, "equation before ambient"))?;
                let n = ambient.coordinates();
                let mut raw: Vec<(i64, Vec<u16>)> = Vec::new();
                let mut first_line = None;
                loop {
                    let Some((jdx, jraw)) = lines.next() else {
                        return Err(err(lineno, "unterminated equation block"));
                    };
                    let jlineno = jdx + 1;
                    let jline = jraw.split('#').next().unwrap_or("").trim();
                    if jline.is_empty() {
                        continue;
                    }
                    if jline == "end" {
                        break;
                    }
                    let mut toks = jline.split_whitespace();
                    let coeff: i64 = toks
                        .next()
                        .unwrap()
                        .parse()
                        .map_err(|_| err(jlineno, "bad coefficient"))?;
                    let exps: Vec<u16> = toks
                        .map(|t| t.parse::<u16>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| err(jlineno, "bad exponent"))?;
                    if exps.len() != n {
                        return Err(err(
                            jlineno,
                            format!("expected {n} exponents, got {}", exps.len()),
                        ));
                    }
                    // homogeneity against the first monomial, with a line diagnostic
                    let probe = MultiHomogPolynomial::new(
                        ambient.clone(),
                        &[(1, exps.clone())],
                    )?;
                    let degs = probe.multi_degree().unwrap();
                    match first_line {
                        None => first_line = Some(degs),
                        Some(ref expected) => {
                            if &degs != expected {
                                return Err(err(
                                    jlineno,
                                    format!(
                                        "monomial of multi-degree {degs:?} in an equation of multi-degree {expected:?}"
                                    ),
                                ));
                            }
                        }
                    }
                    raw.push((coeff, exps));
                }
                if raw.is_empty() {
                    return Err(err(lineno, "empty equation block"));
                }
                b.equations.push(MultiHomogPolynomial::new(ambient, &raw)?);
            }
            "involution" => {
                let (name, map) = rest
                    .split_once(':')
                    .ok_or_else(|| err(lineno, "involution needs `name: map`"))?;
                let n = b.coordinates();
                let mut targets: Vec<Option<usize>> = vec![None; n];
                let mut signs = vec![1i8; n];
                for clause in map.split(',') {
                    let clause = clause.trim();
                    if clause.is_empty() {
                        continue;
                    }
                    let (src, dst) = clause
                        .split_once("->")
                        .ok_or_else(|| err(lineno, format!("bad clause `{clause}`")))?;
                    let i = b.resolve_var(lineno, src.trim())?;
                    let dst = dst.trim();
                    let (sign, dst_name) = match dst.strip_prefix('-') {
                        Some(d) => (-1i8, d.trim()),
                        None => (1, dst),
                    };
                    let j = b.resolve_var(lineno, dst_name)?;
                    targets[i] = Some(j);
                    signs[i] = sign;
                }
                let targets: Vec<usize> = targets
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| t.unwrap_or(i))
                    .collect();
                let inv = InvolutionSpec::new(name.trim(), targets, signs)
                    .map_err(|_| err(lineno, "map does not square to the identity"))?;
                b.involutions.push(inv);
            }
            "twist" | "twist:" => {
                let rest = rest.trim_start_matches(':').trim();
                for clause in rest.split(',') {
                    let clause = clause.trim();
                    if clause.is_empty() {
                        continue;
                    }
                    let (mono, dpow) = clause
                        .split_once("->")
                        .ok_or_else(|| err(lineno, format!("bad twist rule `{clause}`")))?;
                    let mono = mono.trim();
                    let (var, deg) = match mono.split_once('^') {
                        Some((v, d)) => (
                            v.trim(),
                            d.trim()
                                .parse::<u16>()
                                .map_err(|_| err(lineno, "bad pattern degree"))?,
                        ),
                        None => (mono, 1),
                    };
                    let coordinate = b.resolve_var(lineno, var)?;
                    let power: u32 = dpow
                        .trim()
                        .strip_prefix("d^")
                        .or_else(|| dpow.trim().strip_prefix('d').map(|_| "1"))
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err(lineno, format!("bad d-power `{}`", dpow.trim())))?;
                    b.patterns.push(TwistPattern {
                        coordinate,
                        degree: deg,
                        power,
                    });
                }
            }
            "change" | "change:" => {
                let rest = rest.trim_start_matches(':').trim();
                let mut scaled = Vec::new();
                for tok in rest.split(|c: char| c == ',' || c.is_whitespace()) {
                    let tok = tok.trim();
                    if !tok.is_empty() {
                        scaled.push(b.resolve_var(lineno, tok)?);
                    }
                }
                b.change = Some(scaled);
            }
            "chart" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 2 {
                    return Err(err(lineno, "chart needs `<i0> <i,j,...>`"));
                }
                let i0 = if toks[0] == "-" {
                    None
                } else {
                    Some(b.resolve_var(lineno, toks[0])?)
                };
                let minor = toks[1]
                    .split(',')
                    .map(|t| b.resolve_var(lineno, t.trim()))
                    .collect::<Result<Vec<_>, _>>()?;
                b.chart = Some(ResidueChart { i0, minor });
            }
            "end-variety" => {
                let b = current.take().unwrap();
                entries.push(b.finish()?);
            }
            other => return Err(err(lineno, format!("unknown key `{other}`"))),
        }
    }
    if let Some(b) = current.take() {
        entries.push(b.finish()?);
    }
    Ok(entries)
}
