//! A small language for radial symbols with finitely many patches.
//!
//! ```text
//! expr  = 1/pow(n, 0.5)
//! root  = 0
//! patch 3 = 2-1i
//! tail  = monotone-decreasing-modulus
//! ```
//!
//! Lines are separated by newlines or commas. `n` is the depth `|v| ≥ 1`;
//! the root takes `root` (default 0) and patches override single vertices.
//! `tail` declares what happens past any truncation; it is never inferred.

mod expr;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub use expr::{BinOp, EvalFault, Expr};
pub use parser::{parse, parse_complex, parse_expr, MAX_ELL_INDEX};

use crate::error::{Error, Result};
use crate::func::{Provenance, TreeFunction};
use crate::tree::{Tree, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: expected {expected}, found '{found}'")]
pub struct ParseError {
    /// Byte offset into the source.
    pub position: usize,
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    pub(crate) fn new(src: &str, position: usize, expected: &str, found: &str) -> Self {
        let position = position.min(src.len());
        let before = &src[..floor_char_boundary(src, position)];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError {
            position,
            line,
            column,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

fn floor_char_boundary(s: &str, mut i: usize) -> usize {
    while !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot evaluate symbol at depth {depth} (vertex {vertex}): {fault}")]
pub struct EvalError {
    pub depth: usize,
    pub vertex: VertexId,
    pub fault: EvalFault,
}

/// Declared behaviour of the symbol beyond the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum TailMeta {
    Unknown,
    /// Zero beyond some depth.
    EventuallyZero,
    /// Constant beyond some depth; `None` means "whatever the deepest
    /// evaluated level shows".
    EventuallyConstant { value: Option<Complex64> },
    /// `|ψ - limit|` decreases to 0 along the tail.
    MonotoneDecreasingModulus { limit: Complex64 },
}

impl fmt::Display for TailMeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailMeta::Unknown => f.write_str("unknown"),
            TailMeta::EventuallyZero => f.write_str("eventually-zero"),
            TailMeta::EventuallyConstant { value: None } => f.write_str("eventually-constant"),
            TailMeta::EventuallyConstant { value: Some(c) } => {
                f.write_str("eventually-constant to ")?;
                expr::write_complex(f, *c)
            }
            TailMeta::MonotoneDecreasingModulus { limit } => {
                f.write_str("monotone-decreasing-modulus")?;
                if *limit != Complex64::new(0.0, 0.0) {
                    f.write_str(" to ")?;
                    expr::write_complex(f, *limit)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSpec {
    pub radial_expr: Expr,
    pub value_at_root: Complex64,
    pub patches: BTreeMap<VertexId, Complex64>,
    pub tail_meta: TailMeta,
}

impl std::str::FromStr for SymbolSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

impl fmt::Display for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "expr = {}", self.radial_expr)?;
        f.write_str("root = ")?;
        expr::write_complex(f, self.value_at_root)?;
        writeln!(f)?;
        for (v, c) in &self.patches {
            write!(f, "patch {v} = ")?;
            expr::write_complex(f, *c)?;
            writeln!(f)?;
        }
        writeln!(f, "tail = {}", self.tail_meta)
    }
}

impl SymbolSpec {
    /// A radial symbol with root value 0, no patches and unknown tail.
    pub fn radial(radial_expr: Expr) -> Self {
        SymbolSpec {
            radial_expr,
            value_at_root: Complex64::new(0.0, 0.0),
            patches: BTreeMap::new(),
            tail_meta: TailMeta::Unknown,
        }
    }

    /// Canonical text; parses back to a spec with identical evaluation.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn is_radial(&self) -> bool {
        self.patches.is_empty()
    }

    /// Values of the radial part at depths `0..=max_depth` (slot 0 is the
    /// root value); patches are not applied.
    pub fn radial_values(&self, max_depth: usize) -> Result<Vec<Complex64>, EvalFault> {
        let mut out = Vec::with_capacity(max_depth + 1);
        out.push(self.value_at_root);
        for n in 1..=max_depth {
            out.push(self.radial_expr.eval(n as f64)?);
        }
        Ok(out)
    }

    pub fn evaluate<'t>(&self, tree: &'t Tree) -> Result<TreeFunction<'t>> {
        if let Some((&v, _)) = self.patches.iter().find(|(&v, _)| !tree.contains(v)) {
            return Err(Error::UnknownVertex(v));
        }
        let mut by_depth = Vec::with_capacity(tree.depth_bound() + 1);
        by_depth.push(self.value_at_root);
        for n in 1..=tree.depth_bound() {
            let z = self.radial_expr.eval(n as f64).map_err(|fault| EvalError {
                depth: n,
                vertex: tree.level(n).first().copied().unwrap_or(0),
                fault,
            })?;
            by_depth.push(z);
        }
        let mut values: Vec<Complex64> = tree.vertices().iter().map(|v| by_depth[v.depth]).collect();
        for (&v, &c) in &self.patches {
            values[v] = c;
        }
        TreeFunction::with_provenance(tree, values, Provenance::Dsl(self.to_text()))
    }
}
