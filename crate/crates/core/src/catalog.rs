//! Test functions used by the boundedness, isometry, compactness and
//! essential-norm arguments. Each entry evaluates its exact formula on the
//! truncation.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::func::{Provenance, TreeFunction};
use crate::tree::{Tree, VertexId};
use crate::weights::WeightTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum CatalogEntry {
    /// `χ_v`, the indicator of a single vertex.
    Chi { v: VertexId },
    /// `p_v`, the indicator of the sector of `v`.
    Sector { v: VertexId },
    /// `0` at the root, `ℓ_k(|v|)` elsewhere.
    EllProfile,
    /// `0` at the root, `ℓ_k(|v|)^p` elsewhere, `p ∈ [0.05, 0.95]`.
    PowerProfile { p: f64 },
    /// Radial profile rising like `ℓ_k` up to `|w|` and flat afterwards,
    /// scaled by `1/μ_k(|w|)`; needs `|w| >= 2`.
    RisingPlateau { w: VertexId },
    /// `p_w / μ_k(|w|)`, `|w| >= 1`.
    ScaledSector { w: VertexId },
    /// `χ_{|v| = n} / μ_k(n)`, `n >= 1`.
    Shell { n: usize },
    /// `0` at depths 0 and 1, `ℓ_k(|v|)²/ℓ_k(m)` for `2 <= |v| < m - 1`,
    /// `ℓ_k(m)` from depth `m - 1` on; `m >= 3`.
    SquarePlateau { m: usize },
    /// `0` at the root, `ℓ_k(|v|+1)^{p+1}/ℓ_k(m)^p` for `1 <= |v| < m`,
    /// `ℓ_k(m)` from depth `m` on; `m >= 2`, `0 < p < 1`.
    PowerPlateau { m: usize, p: f64 },
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn bad(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

impl CatalogEntry {
    pub fn label(&self) -> String {
        match *self {
            CatalogEntry::Chi { v } => format!("chi({v})"),
            CatalogEntry::Sector { v } => format!("p({v})"),
            CatalogEntry::EllProfile => "ellk_profile".into(),
            CatalogEntry::PowerProfile { p } => format!("f_p(p={p})"),
            CatalogEntry::RisingPlateau { w } => format!("g_w(w={w})"),
            CatalogEntry::ScaledSector { w } => format!("f_w(w={w})"),
            CatalogEntry::Shell { n } => format!("shell({n})"),
            CatalogEntry::SquarePlateau { m } => format!("g_n(depth={m})"),
            CatalogEntry::PowerPlateau { m, p } => format!("h_n(depth={m},p={p})"),
        }
    }

    /// Vertices where the function can be nonzero, when that set is small
    /// enough to be worth exploiting.
    pub fn support(&self, tree: &Tree) -> Result<Option<Vec<VertexId>>> {
        Ok(match *self {
            CatalogEntry::Chi { v } => {
                tree.vertex(v)?;
                Some(vec![v])
            }
            CatalogEntry::Sector { v } | CatalogEntry::ScaledSector { w: v } => {
                Some(tree.sector(v)?.members)
            }
            CatalogEntry::Shell { n } => Some(tree.level(n).to_vec()),
            _ => None,
        })
    }

    pub fn build<'t>(&self, tree: &'t Tree, table: &WeightTable) -> Result<TreeFunction<'t>> {
        table.ensure_covers(tree.depth_bound())?;
        let mut f = match *self {
            CatalogEntry::Chi { v } => {
                tree.vertex(v)?;
                TreeFunction::from_fn(tree, |u| re((u == v) as u8 as f64))?
            }
            CatalogEntry::Sector { v } => {
                let s = tree.sector(v)?;
                let mut values = vec![re(0.0); tree.len()];
                for &u in &s.members {
                    values[u] = re(1.0);
                }
                TreeFunction::new(tree, values)?
            }
            CatalogEntry::ScaledSector { w } => {
                let depth = tree.vertex(w)?.depth;
                if depth == 0 {
                    return Err(bad("f_w needs |w| >= 1".into()));
                }
                let s = tree.sector(w)?;
                let scale = 1.0 / table.mu_k(depth);
                let mut values = vec![re(0.0); tree.len()];
                for &u in &s.members {
                    values[u] = re(scale);
                }
                TreeFunction::new(tree, values)?
            }
            CatalogEntry::EllProfile => TreeFunction::radial(tree, "ellk_profile", |d| {
                re(if d == 0 { 0.0 } else { table.ell_k(d) })
            })?,
            CatalogEntry::PowerProfile { p } => {
                if !(0.05..=0.95).contains(&p) {
                    return Err(bad(format!("f_p needs p in [0.05, 0.95], got {p}")));
                }
                TreeFunction::radial(tree, "f_p", |d| {
                    re(if d == 0 { 0.0 } else { table.ell_k(d).powf(p) })
                })?
            }
            CatalogEntry::RisingPlateau { w } => {
                let m = tree.vertex(w)?.depth;
                if m < 2 {
                    return Err(bad(format!("g_w needs |w| >= 2, got {m}")));
                }
                let scale = table.mu_k(m);
                TreeFunction::radial(tree, "g_w", |d| {
                    re(match d {
                        0 => 0.0,
                        d if d < m => table.ell_k(d) / scale,
                        _ => table.ell_k(m) / scale,
                    })
                })?
            }
            CatalogEntry::Shell { n } => {
                if n == 0 || n > tree.depth_bound() {
                    return Err(bad(format!(
                        "shell depth must lie in 1..={}, got {n}",
                        tree.depth_bound()
                    )));
                }
                let h = 1.0 / table.mu_k(n);
                TreeFunction::radial(tree, "shell", |d| re(if d == n { h } else { 0.0 }))?
            }
            CatalogEntry::SquarePlateau { m } => {
                if m < 3 || m > table.max_n() {
                    return Err(bad(format!(
                        "g_n needs 3 <= |v_n| <= {}, got {m}",
                        table.max_n()
                    )));
                }
                let top = table.ell_k(m);
                TreeFunction::radial(tree, "g_n", |d| {
                    re(match d {
                        0 | 1 => 0.0,
                        d if d + 1 < m => table.ell_k(d).powi(2) / top,
                        _ => top,
                    })
                })?
            }
            CatalogEntry::PowerPlateau { m, p } => {
                if m < 2 || m > table.max_n() {
                    return Err(bad(format!(
                        "h_n needs 2 <= |v_n| <= {}, got {m}",
                        table.max_n()
                    )));
                }
                if !(p > 0.0 && p < 1.0) {
                    return Err(bad(format!("h_n needs 0 < p < 1, got {p}")));
                }
                let top = table.ell_k(m);
                let denom = top.powf(p);
                TreeFunction::radial(tree, "h_n", |d| {
                    re(match d {
                        0 => 0.0,
                        d if d < m => table.ell_k(d + 1).powf(p + 1.0) / denom,
                        _ => top,
                    })
                })?
            }
        };
        f.set_provenance(Provenance::Catalog(self.label()));
        Ok(f)
    }
}
