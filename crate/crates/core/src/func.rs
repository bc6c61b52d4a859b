//! Complex-valued functions on a tree and the order-`k` Lipschitz norm
//!
//! `‖f‖_k = |f(o)| + sup_{v ≠ o} μ_k(|v|) Df(v)` with `Df(v) = |f(v) - f(v⁻)|`.
//! On a truncation the supremum runs over the represented vertices only;
//! every report keeps the per-depth suprema so the caller can judge how
//! settled the tail is.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tail::{classify_tail, TailClass, TailPolicy};
use crate::tree::{Tree, VertexId};
use crate::weights::WeightTable;

/// Window used by the little-space decay flag.
pub const LITTLE_SPACE_POLICY: TailPolicy = TailPolicy {
    window: 5,
    tol: 1e-3,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "name", rename_all = "kebab-case")]
pub enum Provenance {
    Explicit,
    RadialProfile(String),
    Catalog(String),
    Dsl(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeFunction<'t> {
    tree: &'t Tree,
    values: Vec<Complex64>,
    provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub k: usize,
    pub value: f64,
    /// Vertex achieving the weighted-derivative supremum; `None` when no
    /// non-root vertex exists or every derivative vanishes.
    pub argmax: Option<VertexId>,
    /// Indexed by depth; slot 0 is 0 since the root has no derivative.
    pub per_depth_sup: Vec<f64>,
    pub little_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LittleSpaceProfile {
    pub per_depth_sup: Vec<f64>,
    /// Consistent with membership in the little space at this depth.
    pub decays: bool,
}

impl<'t> TreeFunction<'t> {
    pub fn new(tree: &'t Tree, values: Vec<Complex64>) -> Result<Self> {
        Self::with_provenance(tree, values, Provenance::Explicit)
    }

    pub fn with_provenance(
        tree: &'t Tree,
        values: Vec<Complex64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if values.len() != tree.len() {
            return Err(Error::InvalidParameter(format!(
                "function has {} values for a tree of {} vertices",
                values.len(),
                tree.len()
            )));
        }
        if let Some(v) = values.iter().position(|z| !z.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at vertex {v}")));
        }
        Ok(TreeFunction {
            tree,
            values,
            provenance,
        })
    }

    /// Builds `f` from a closure evaluated at every vertex.
    pub fn from_fn(tree: &'t Tree, f: impl FnMut(VertexId) -> Complex64) -> Result<Self> {
        Self::new(tree, (0..tree.len()).map(f).collect())
    }

    /// A function depending on depth only: `f(v) = profile(|v|)`.
    pub fn radial(
        tree: &'t Tree,
        name: &str,
        mut profile: impl FnMut(usize) -> Complex64,
    ) -> Result<Self> {
        let by_depth: Vec<Complex64> = (0..=tree.depth_bound()).map(&mut profile).collect();
        let values = tree.vertices().iter().map(|v| by_depth[v.depth]).collect();
        Self::with_provenance(tree, values, Provenance::RadialProfile(name.to_string()))
    }

    pub fn constant(tree: &'t Tree, c: Complex64) -> Self {
        TreeFunction {
            tree,
            values: vec![c; tree.len()],
            provenance: Provenance::Explicit,
        }
    }

    pub fn zero(tree: &'t Tree) -> Self {
        Self::constant(tree, Complex64::new(0.0, 0.0))
    }

    pub fn tree(&self) -> &'t Tree {
        self.tree
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, v: VertexId) -> Complex64 {
        self.values[v]
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn set_provenance(&mut self, provenance: Provenance) {
        self.provenance = provenance;
    }

    fn map_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(
            std::ptr::eq(self.tree, other.tree) || self.tree == other.tree,
            "functions live on different trees"
        );
        TreeFunction {
            tree: self.tree,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
            provenance: Provenance::Explicit,
        }
    }

    /// Pointwise product, i.e. `M_ψ f` when `self = ψ`.
    pub fn mul(&self, other: &Self) -> Self {
        self.map_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.map_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.map_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TreeFunction {
            tree: self.tree,
            values: self.values.iter().map(|&a| a * c).collect(),
            provenance: Provenance::Explicit,
        }
    }

    /// `Df(v) = |f(v) - f(v⁻)|`.
    pub fn derivative(&self, v: VertexId) -> Result<f64> {
        let vert = self.tree.vertex(v)?;
        let p = vert
            .parent
            .ok_or_else(|| Error::Domain("the derivative is not defined at the root".into()))?;
        Ok((self.values[v] - self.values[p]).norm())
    }

    /// `sup_{|v| = d} μ_k(d) Df(v)` for every depth `d`, plus the global argmax.
    fn weighted_sups(&self, table: &WeightTable) -> Result<(Vec<f64>, Option<VertexId>)> {
        table.ensure_covers(self.tree.depth_bound())?;
        let mut sups = vec![0.0; self.tree.depth_bound() + 1];
        let mut best = 0.0;
        let mut argmax = None;
        for vert in &self.tree.vertices()[1..] {
            let p = vert.parent.expect("non-root has a parent");
            let w = table.mu_k(vert.depth) * (self.values[vert.id] - self.values[p]).norm();
            if w > sups[vert.depth] {
                sups[vert.depth] = w;
            }
            if w > best {
                best = w;
                argmax = Some(vert.id);
            }
        }
        Ok((sups, argmax))
    }

    pub fn norm_k(&self, table: &WeightTable) -> Result<NormReport> {
        let (per_depth_sup, argmax) = self.weighted_sups(table)?;
        let sup = per_depth_sup.iter().copied().fold(0.0, f64::max);
        let little_flag = decays(&per_depth_sup);
        Ok(NormReport {
            k: table.k(),
            value: self.values[0].norm() + sup,
            argmax,
            per_depth_sup,
            little_flag,
        })
    }

    /// The norm value alone.
    pub fn norm(&self, table: &WeightTable) -> Result<f64> {
        let (sups, _) = self.weighted_sups(table)?;
        Ok(self.values[0].norm() + sups.iter().copied().fold(0.0, f64::max))
    }

    /// `‖f‖_{k,≤d}` for every depth `d`: the norm with the supremum cut at depth `d`.
    pub fn depth_truncated_norms(&self, table: &WeightTable) -> Result<Vec<f64>> {
        let (sups, _) = self.weighted_sups(table)?;
        let root = self.values[0].norm();
        let mut acc: f64 = 0.0;
        Ok(sups
            .iter()
            .map(|&s| {
                acc = acc.max(s);
                root + acc
            })
            .collect())
    }

    /// Smallest `ℓ_k(|v|) ‖f‖_{k,≤|v|} - |f(v)|` over non-root vertices.
    /// Infinite when the tree is only a root.
    pub fn growth_bound_check(&self, table: &WeightTable) -> Result<f64> {
        let trunc = self.depth_truncated_norms(table)?;
        Ok(self.tree.vertices()[1..]
            .iter()
            .map(|v| table.ell_k(v.depth) * trunc[v.depth] - self.values[v.id].norm())
            .fold(f64::INFINITY, f64::min))
    }

    pub fn little_space_profile(&self, table: &WeightTable) -> Result<LittleSpaceProfile> {
        self.little_space_profile_with(table, &LITTLE_SPACE_POLICY)
    }

    pub fn little_space_profile_with(
        &self,
        table: &WeightTable,
        policy: &TailPolicy,
    ) -> Result<LittleSpaceProfile> {
        let (per_depth_sup, _) = self.weighted_sups(table)?;
        let decays = per_depth_sup.len() <= 1
            || classify_tail(&per_depth_sup[1..], policy) == TailClass::Vanishing;
        Ok(LittleSpaceProfile {
            per_depth_sup,
            decays,
        })
    }

    /// `max_{|v| = d} |f(v)| / ℓ_k(d)` by depth; slot 0 is unused and holds 0.
    pub fn decay_ratio_check(&self, table: &WeightTable) -> Result<Vec<f64>> {
        table.ensure_covers(self.tree.depth_bound())?;
        let mut out = vec![0.0; self.tree.depth_bound() + 1];
        for v in &self.tree.vertices()[1..] {
            let r = self.values[v.id].norm() / table.ell_k(v.depth);
            if r > out[v.depth] {
                out[v.depth] = r;
            }
        }
        Ok(out)
    }

    /// `K_n f`: keeps values up to depth `n` and freezes deeper vertices at
    /// the value of their depth-`n` ancestor.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n > self.tree.depth_bound() {
            return Err(Error::InvalidParameter(format!(
                "truncation depth {n} exceeds tree depth {}",
                self.tree.depth_bound()
            )));
        }
        let anc = self.tree.ancestors_at_depth(n);
        Ok(TreeFunction {
            tree: self.tree,
            values: anc.iter().map(|&a| self.values[a]).collect(),
            provenance: Provenance::Explicit,
        })
    }

    /// `Σ_{v ≠ o} weights(v) μ_k(|v|) Df(v)`.
    pub fn weak_pairing(&self, weights: &[Complex64], table: &WeightTable) -> Result<Complex64> {
        if weights.len() != self.tree.len() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for a tree of {} vertices",
                weights.len(),
                self.tree.len()
            )));
        }
        table.ensure_covers(self.tree.depth_bound())?;
        let mut acc = Complex64::new(0.0, 0.0);
        for v in &self.tree.vertices()[1..] {
            let p = v.parent.expect("non-root has a parent");
            let d = (self.values[v.id] - self.values[p]).norm();
            if d != 0.0 {
                acc += weights[v.id] * (table.mu_k(v.depth) * d);
            }
        }
        if !acc.is_finite() {
            return Err(Error::Domain("pairing diverged".into()));
        }
        Ok(acc)
    }
}

fn decays(per_depth_sup: &[f64]) -> bool {
    match per_depth_sup {
        [] | [_] => true,
        [_, rest @ ..] => classify_tail(rest, &LITTLE_SPACE_POLICY) == TailClass::Vanishing,
    }
}

/// Norm of a function that vanishes off `support`. Only vertices of the
/// support and their children can carry a nonzero derivative, so the cost
/// is proportional to the support, not the tree. `value` must return 0 off
/// the support.
pub fn norm_on_support(
    tree: &Tree,
    table: &WeightTable,
    support: impl IntoIterator<Item = VertexId>,
    value: impl Fn(VertexId) -> Complex64,
) -> f64 {
    let mut sup: f64 = 0.0;
    let at = |v: VertexId| -> f64 {
        let p = tree.parent(v).expect("non-root has a parent");
        table.mu_k(tree.depth(v)) * (value(v) - value(p)).norm()
    };
    for u in support {
        if u != 0 {
            sup = sup.max(at(u));
        }
        for &c in tree.children(u) {
            sup = sup.max(at(c));
        }
    }
    value(0).norm() + sup
}

/// `max_u |χ_v(u) - (p_v(u) - Σ_{w child of v} p_w(u))|`.
pub fn chi_decomposition_check(tree: &Tree, v: VertexId) -> Result<f64> {
    tree.vertex(v)?;
    if tree.children(v).is_empty() {
        return Err(Error::InvalidParameter(format!(
            "vertex {v} has no children in the truncation"
        )));
    }
    let indicator = |s: &crate::tree::Sector| {
        let mut m = vec![0.0f64; tree.len()];
        for &u in &s.members {
            m[u] = 1.0;
        }
        m
    };
    let mut rhs = indicator(&tree.sector(v)?);
    for &w in tree.children(v) {
        let pw = indicator(&tree.sector(w)?);
        for (r, x) in rhs.iter_mut().zip(pw) {
            *r -= x;
        }
    }
    Ok(rhs
        .iter()
        .enumerate()
        .map(|(u, &r)| ((if u == v { 1.0 } else { 0.0 }) - r).abs())
        .fold(0.0, f64::max))
}

/// `ℓ_k(|v|) - ℓ_k(|w|) - Σ 1/μ_k(|u|)` over the path from `w` (exclusive)
/// down to `v` (inclusive).
pub fn path_sum_check(tree: &Tree, table: &WeightTable, w: VertexId, v: VertexId) -> Result<f64> {
    tree.vertex(w)?;
    tree.vertex(v)?;
    if tree.depth(w) == 0 {
        return Err(Error::InvalidParameter("the start vertex must not be the root".into()));
    }
    if !tree.is_descendant(v, w) {
        return Err(Error::InvalidParameter(format!(
            "vertex {v} is not a descendant of {w}"
        )));
    }
    table.ensure_covers(tree.depth(v))?;
    let sum: f64 = (tree.depth(w) + 1..=tree.depth(v))
        .map(|d| 1.0 / table.mu_k(d))
        .sum();
    Ok(table.ell_k(tree.depth(v)) - table.ell_k(tree.depth(w)) - sum)
}
