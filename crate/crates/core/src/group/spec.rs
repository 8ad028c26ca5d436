//! Group spec files: one TOML document per group.
//!
//! ```toml
//! name = "S3"
//! backend = "finite-permutation"   # finite-table | integer-matrix | formal-cyclic
//! degree = 3
//! generators = ["(1 2)", "(1 2 3)"]
//! names = ["s", "r"]               # optional, default x1, x2, ...
//! relators = ["s^2", "r^3", "(s r)^2"]
//!
//! [abelianization]                  # optional declaration
//! free = []
//! torsion = [{ word = "s", order = 2 }]
//! ```
//!
//! Integer matrices are arrays of rows; `formal-cyclic` takes `order = n` or
//! `order = "infinite"` and has the single generator `u`. Optional
//! `[[decompositions]]` tables (`free_exponents`, `commutators = [["x", "y"]]`)
//! feed the free-abelianization construction and `expressions` lists words in
//! the recovered elements `a1.., u1.., g1_2, ..`.

use std::ops::Range;
use std::sync::Arc;

use serde::Deserialize;
use toml::Spanned;

use super::word::default_symbol;
use super::{eval_word, EffectiveGroup, GroupElement, Presentation, Word};
use crate::embedder::GeneratorDecomposition;
use crate::error::{Error, Result};
use crate::group::AbelianizationData;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: Option<String>,
    backend: Spanned<String>,
    degree: Option<usize>,
    dimension: Option<usize>,
    order: Option<Spanned<toml::Value>>,
    table: Option<Vec<Vec<u32>>>,
    generators: Option<Vec<Spanned<toml::Value>>>,
    names: Option<Vec<String>>,
    relators: Option<Vec<Spanned<String>>>,
    derived_length: Option<usize>,
    abelianization: Option<RawAbelianization>,
    decompositions: Option<Vec<RawDecomposition>>,
    expressions: Option<Vec<Spanned<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAbelianization {
    #[serde(default)]
    free: Vec<Spanned<String>>,
    #[serde(default)]
    torsion: Vec<RawTorsion>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTorsion {
    word: Spanned<String>,
    order: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDecomposition {
    #[serde(default)]
    free_exponents: Vec<i64>,
    #[serde(default)]
    commutators: Vec<(Spanned<String>, Spanned<String>)>,
}

/// A parsed group spec.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub group: Arc<EffectiveGroup>,
    pub names: Vec<String>,
    pub abelianization: Option<AbelianizationData>,
    pub decompositions: Option<Vec<GeneratorDecomposition>>,
    /// Unresolved expression words; they refer to recovered elements.
    pub expressions: Option<Vec<String>>,
    pub derived_length: Option<usize>,
    pub source: String,
}

/// 1-based line and column of a byte offset.
fn locate(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

fn at(text: &str, span: Range<usize>, message: impl Into<String>) -> Error {
    let (line, column) = locate(text, span.start);
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Re-anchors an error raised while reading the value at `span`.
fn relocate(text: &str, span: Range<usize>, err: Error) -> Error {
    match err {
        Error::Parse { column, message, .. } => {
            // the span starts at the opening quote
            let (line, col) = locate(text, span.start);
            Error::Parse {
                line,
                column: col + column,
                message,
            }
        }
        other => at(text, span, other.to_string()),
    }
}

impl GroupSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| locate(text, s.start));
            Error::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        let name = raw.name.clone().unwrap_or_else(|| "G".into());
        let backend_span = raw.backend.span();
        let gens_raw = raw.generators.clone().unwrap_or_default();
        let string_gens = |group_kind: &str| -> Result<Vec<(String, Range<usize>)>> {
            gens_raw
                .iter()
                .map(|g| match g.get_ref() {
                    toml::Value::String(s) => Ok((s.clone(), g.span())),
                    _ => Err(at(text, g.span(), format!("{group_kind} generators are strings"))),
                })
                .collect()
        };
        let mut group = match raw.backend.get_ref().as_str() {
            "finite-permutation" => {
                let degree = raw
                    .degree
                    .ok_or_else(|| at(text, backend_span.clone(), "finite-permutation needs `degree`"))?;
                let gens = string_gens("permutation")?;
                let cycles: Vec<&str> = gens.iter().map(|(s, _)| s.as_str()).collect();
                EffectiveGroup::permutation(&name, degree, &cycles).map_err(|e| {
                    let bad = gens
                        .iter()
                        .find(|(s, _)| super::Permutation::parse_cycles(s, degree).is_err())
                        .map_or(backend_span.clone(), |(_, span)| span.clone());
                    at(text, bad, e.to_string())
                })?
            }
            "integer-matrix" => {
                let dim = raw
                    .dimension
                    .ok_or_else(|| at(text, backend_span.clone(), "integer-matrix needs `dimension`"))?;
                let mut rows = Vec::new();
                for g in &gens_raw {
                    rows.push(matrix_entries(g.get_ref()).ok_or_else(|| {
                        at(text, g.span(), "matrix generators are arrays of integer rows")
                    })?);
                }
                let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
                EffectiveGroup::matrix(&name, dim, &refs).map_err(|e| {
                    let i = rows.iter().position(|r| super::IntMatrix::from_i64_rows(dim, r).is_err());
                    let span = i.map_or(backend_span.clone(), |i| gens_raw[i].span());
                    at(text, span, e.to_string())
                })?
            }
            "formal-cyclic" => {
                let order = match raw.order.as_ref().map(|o| (o.get_ref(), o.span())) {
                    Some((toml::Value::Integer(n), _)) if *n > 0 => Some(*n as u64),
                    Some((toml::Value::String(s), _)) if s == "infinite" => None,
                    Some((_, span)) => return Err(at(text, span, "order must be a positive integer or \"infinite\"")),
                    None => return Err(at(text, backend_span, "formal-cyclic needs `order`")),
                };
                if !gens_raw.is_empty() {
                    return Err(at(text, gens_raw[0].span(), "formal-cyclic has the implicit generator u"));
                }
                EffectiveGroup::cyclic(&name, order)?
            }
            "finite-table" => {
                let table = raw
                    .table
                    .clone()
                    .ok_or_else(|| at(text, backend_span.clone(), "finite-table needs `table`"))?;
                let gens = string_gens("table")?;
                let mut idx = Vec::new();
                for (s, span) in &gens {
                    let i: u32 = s
                        .trim()
                        .trim_start_matches('e')
                        .parse()
                        .map_err(|_| at(text, span.clone(), format!("bad table element {s:?}")))?;
                    idx.push(i);
                }
                EffectiveGroup::table(&name, table, &idx).map_err(|e| at(text, backend_span.clone(), e.to_string()))?
            }
            other => {
                return Err(at(
                    text,
                    backend_span,
                    format!(
                        "unknown backend {other:?} (expected finite-table, finite-permutation, integer-matrix or formal-cyclic)"
                    ),
                ))
            }
        };

        let n = group.generators().len();
        let names = match raw.names {
            Some(names) if names.len() != n => {
                return Err(Error::ArityMismatch {
                    expected: n,
                    got: names.len(),
                });
            }
            Some(names) => names,
            None => (1..=n).map(|i| format!("x{i}")).collect(),
        };
        let resolve = |s: &str| names.iter().position(|n| n == s).or_else(|| default_symbol(s, n));
        let word = |s: &Spanned<String>| -> Result<Word> {
            Word::parse(s.get_ref(), &resolve).map_err(|e| relocate(text, s.span(), e))
        };

        if let Some(relators) = &raw.relators {
            let words = relators.iter().map(word).collect::<Result<Vec<_>>>()?;
            group = group.with_presentation(Presentation::new(n, words)?)?;
        }
        let group = Arc::new(group);
        let value = |s: &Spanned<String>| -> Result<GroupElement> {
            Ok(eval_word(group.as_ref(), &word(s)?, group.generators()))
        };

        let abelianization = match &raw.abelianization {
            Some(ab) => Some(AbelianizationData {
                free_rank: ab.free.len(),
                free_basis: ab.free.iter().map(value).collect::<Result<_>>()?,
                torsion: ab
                    .torsion
                    .iter()
                    .map(|t| Ok((value(&t.word)?, t.order)))
                    .collect::<Result<_>>()?,
            }),
            None => None,
        };
        let decompositions = match &raw.decompositions {
            Some(ds) => Some(
                ds.iter()
                    .map(|d| {
                        Ok(GeneratorDecomposition {
                            free_exponents: d.free_exponents.clone(),
                            commutators: d
                                .commutators
                                .iter()
                                .map(|(u, v)| Ok((value(u)?, value(v)?)))
                                .collect::<Result<_>>()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        Ok(Self {
            group,
            names,
            abelianization,
            decompositions,
            expressions: raw
                .expressions
                .map(|e| e.into_iter().map(Spanned::into_inner).collect()),
            derived_length: raw.derived_length,
            source: text.to_string(),
        })
    }

    /// Resolves `expressions` against the names of recovered elements.
    pub fn expression_words(&self, recovered: &[String]) -> Result<Option<Vec<Word>>> {
        let Some(exprs) = &self.expressions else {
            return Ok(None);
        };
        let resolve = |s: &str| recovered.iter().position(|n| n == s);
        exprs
            .iter()
            .map(|e| Word::parse(e, &resolve))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}

fn matrix_entries(v: &toml::Value) -> Option<Vec<i64>> {
    let rows = v.as_array()?;
    let mut out = Vec::new();
    for row in rows {
        match row {
            toml::Value::Array(r) => {
                for x in r {
                    out.push(x.as_integer()?);
                }
            }
            toml::Value::Integer(x) => out.push(*x),
            _ => return None,
        }
    }
    Some(out)
}
