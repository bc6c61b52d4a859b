//! The multiplication operator `M_ψ f = ψ f` on the order-`k` space.
//!
//! Everything reduces to three depth-indexed sequences computed once:
//! `a(d) = sup_{|v|=d} |ψ(v)|`, `b(d) = sup_{|v|=d} μ_{k+1}(d) Dψ(v)` and
//! `inf_{|v|=d} |ψ(v)|`. Boundedness, compactness and the essential norm
//! are limit statements about these; they come back three-valued, with the
//! declared tail class of the symbol deciding when a windowed observation
//! may be promoted to a claim.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::CatalogEntry;
use crate::dsl::{SymbolSpec, TailMeta};
use crate::error::{Error, Result};
use crate::func::{norm_on_support, TreeFunction};
use crate::tail::{classify_tail, sup_growth, Growth, TailClass, TailDiagnostic, TailPolicy};
use crate::tree::{Tree, VertexId};
use crate::weights::{weight, WeightTable};

/// Relative tolerance for the isometry probe equalities.
pub const ISOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

/// What a verdict rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// A finite fact about the truncation (an attained value).
    Exact,
    /// The declared tail class of the symbol.
    Declared,
    /// Tail diagnostics over the last depth window.
    Windowed,
    /// Follows from another verdict.
    Implied,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub basis: Basis,
    /// The witnessing number; its meaning is given in `note`.
    pub quantity: f64,
    pub note: String,
}

impl Classification {
    fn new(verdict: Verdict, basis: Basis, quantity: f64, note: impl Into<String>) -> Self {
        Classification {
            verdict,
            basis,
            quantity,
            note: note.into(),
        }
    }
}

/// Per-depth reductions of the symbol. Slot `d` refers to depth `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthProfile {
    pub sup_abs: Vec<f64>,
    pub inf_abs: Vec<f64>,
    /// `sup_{|v|=d} μ_{k+1}(d) Dψ(v)`; slot 0 is 0.
    pub sup_mu_next_dpsi: Vec<f64>,
    pub argmax_dpsi: Vec<Option<VertexId>>,
    pub first_zero: Option<VertexId>,
}

impl DepthProfile {
    pub fn of(psi: &TreeFunction<'_>, table: &WeightTable) -> Result<Self> {
        let tree = psi.tree();
        let n = tree.depth_bound();
        table.ensure_covers(n)?;
        let mut p = DepthProfile {
            sup_abs: vec![0.0; n + 1],
            inf_abs: vec![f64::INFINITY; n + 1],
            sup_mu_next_dpsi: vec![0.0; n + 1],
            argmax_dpsi: vec![None; n + 1],
            first_zero: None,
        };
        for v in tree.vertices() {
            let z = psi.value(v.id);
            let m = z.norm();
            let d = v.depth;
            p.sup_abs[d] = p.sup_abs[d].max(m);
            p.inf_abs[d] = p.inf_abs[d].min(m);
            if m == 0.0 && p.first_zero.is_none() {
                p.first_zero = Some(v.id);
            }
            if let Some(u) = v.parent {
                let w = table.mu_next(d) * (z - psi.value(u)).norm();
                if p.argmax_dpsi[d].is_none() || w > p.sup_mu_next_dpsi[d] {
                    p.sup_mu_next_dpsi[d] = w;
                    p.argmax_dpsi[d] = Some(v.id);
                }
            }
        }
        // levels that a sparse random tree left empty
        for x in p.inf_abs.iter_mut().filter(|x| x.is_infinite()) {
            *x = 0.0;
        }
        Ok(p)
    }

    pub fn depth(&self) -> usize {
        self.sup_abs.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundedReport {
    pub classification: Classification,
    /// `S∞ = sup_{|v| ≤ N} |ψ(v)|`.
    pub sup_abs: f64,
    /// `S_{k+1} = sup_{1 ≤ |v| ≤ N} μ_{k+1}(|v|) Dψ(v)`.
    pub sup_mu_next_dpsi: f64,
    pub growth_sup_abs: Growth,
    pub growth_mu_next_dpsi: Growth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpnormBounds {
    /// `max{S∞, ‖ψ‖_k}`.
    pub lower: f64,
    /// `S∞ + S_{k+1}`.
    pub upper: f64,
    pub sup_abs: f64,
    pub norm_k: f64,
    pub sup_mu_next_dpsi: f64,
}

/// Which probe families the empirical lower bound searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProbeSet {
    /// `χ_v` for every vertex.
    pub point_masses: bool,
    /// `p_v` for every vertex.
    pub sectors: bool,
    /// Radial catalog functions: constants, `ℓ_k`-profiles, shells, plateaus.
    pub radial: bool,
}

impl Default for ProbeSet {
    fn default() -> Self {
        ProbeSet {
            point_masses: true,
            sectors: true,
            radial: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalLower {
    /// `max ‖ψ f‖_k / ‖f‖_k` over the probes.
    pub value: f64,
    pub witness: String,
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub value: Complex64,
    /// First vertex (in breadth-first order) where ψ takes this value.
    pub witness: VertexId,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub point_spectrum: Vec<SpectralPoint>,
    pub closure_extras: Vec<Complex64>,
    pub sigma: Vec<Complex64>,
    pub sigma_ap: Vec<Complex64>,
    pub basis: Basis,
    pub note: String,
}

impl SpectrumReport {
    pub fn contains(&self, z: Complex64) -> bool {
        self.sigma.iter().any(|&s| key(s) == key(z))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundedBelowReport {
    pub classification: Classification,
    /// `min_{|v| ≤ N} |ψ(v)|`, root included.
    pub inf_abs: f64,
    /// Minimum of `|ψ|` over the last depth window.
    pub inf_abs_window: f64,
    pub zero_witness: Option<VertexId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EssWindow {
    pub end: usize,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssNormReport {
    /// `max{A_N, B_N}`.
    pub lower: f64,
    /// `A_N + B_N`.
    pub upper: f64,
    pub a_n: f64,
    pub b_n: f64,
    pub window_start: usize,
    pub window_end: usize,
    /// `(A, B)` for every window end `1..=N`.
    pub history: Vec<EssWindow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssWitness {
    pub p: f64,
    /// `max_n ‖ψ·shell(n)‖_k / ‖shell(n)‖_k` over the tail window.
    pub a_route: f64,
    /// The same without dividing by `‖shell(n)‖_k = μ_k(n+1)/μ_k(n)`.
    pub a_route_raw: f64,
    pub a_route_depth: Option<usize>,
    /// `max_m μ_{k+1}(m) Dψ(v_m) / ‖h_m‖_k` along the maximizing vertices.
    pub b_route: f64,
    pub b_route_vertex: Option<VertexId>,
    pub plateau_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeComparison {
    pub probe: String,
    pub psi_f_norm: f64,
    pub f_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    /// Every probe satisfied `‖ψ f‖_k = ‖f‖_k` to the tolerance.
    pub consistent: bool,
    pub probes: usize,
    pub max_rel_discrepancy: f64,
    pub witness: Option<ProbeComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsStats {
    pub sup: f64,
    pub inf: f64,
    pub window_sup: f64,
    pub window_inf: f64,
    pub window_start: usize,
    pub window_end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub k: usize,
    pub depth: usize,
    pub policy: TailPolicy,
    pub tail_declared: TailMeta,
    pub tail_effective: TailMeta,
    pub sup_inf_psi: AbsStats,
    pub sup_mu_next_dpsi: f64,
    pub bounded_verdict: Classification,
    pub compact_verdict: Classification,
    pub bounded_below_verdict: Classification,
    pub opnorm_lower: Option<f64>,
    pub opnorm_upper: Option<f64>,
    pub essnorm_lower: Option<f64>,
    pub essnorm_upper: Option<f64>,
    pub convergence: Vec<TailDiagnostic>,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn any_inconclusive(&self) -> bool {
        [
            &self.bounded_verdict,
            &self.compact_verdict,
            &self.bounded_below_verdict,
        ]
        .iter()
        .any(|c| c.verdict == Verdict::Inconclusive)
    }
}

fn key(z: Complex64) -> (u64, u64) {
    ((z.re + 0.0).to_bits(), (z.im + 0.0).to_bits())
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(0.0, f64::max)
}

/// Analysis of one symbol on one truncation for one `k`.
pub struct Analyzer<'a, 't> {
    psi: &'a TreeFunction<'t>,
    table: &'a WeightTable,
    policy: TailPolicy,
    declared: TailMeta,
    tail: TailMeta,
    warnings: Vec<String>,
    profile: DepthProfile,
}

impl<'a, 't> Analyzer<'a, 't> {
    pub fn new(
        psi: &'a TreeFunction<'t>,
        tail: TailMeta,
        table: &'a WeightTable,
        policy: TailPolicy,
    ) -> Result<Self> {
        if policy.window < 1 || !(policy.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "window must be >= 1 and tol > 0, got {} and {}",
                policy.window, policy.tol
            )));
        }
        let profile = DepthProfile::of(psi, table)?;
        let mut a = Analyzer {
            psi,
            table,
            policy,
            declared: tail,
            tail,
            warnings: Vec::new(),
            profile,
        };
        a.check_declared_tail();
        Ok(a)
    }

    pub fn k(&self) -> usize {
        self.table.k()
    }

    pub fn profile(&self) -> &DepthProfile {
        &self.profile
    }

    pub fn effective_tail(&self) -> TailMeta {
        self.tail
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn depth(&self) -> usize {
        self.profile.depth()
    }

    fn tree(&self) -> &'t Tree {
        self.psi.tree()
    }

    fn window_start(&self) -> usize {
        self.depth().saturating_sub(self.policy.window).max(1)
    }

    /// Declarations the truncation already contradicts are dropped to
    /// `unknown`, with a warning.
    fn check_declared_tail(&mut self) {
        let n = self.depth();
        let deepest = self.tree().level(n);
        let contradiction = match self.declared {
            TailMeta::Unknown => None,
            _ if n == 0 => None,
            TailMeta::EventuallyZero => (self.profile.sup_abs[n] != 0.0)
                .then(|| format!("declared eventually-zero but |ψ| reaches {} at depth {n}", self.profile.sup_abs[n])),
            TailMeta::EventuallyConstant { value } => {
                let c = value.unwrap_or_else(|| self.psi.value(deepest[0]));
                match deepest.iter().find(|&&v| key(self.psi.value(v)) != key(c)) {
                    Some(&v) => Some(format!(
                        "declared eventually-constant but ψ({v}) = {} at depth {n}",
                        self.psi.value(v)
                    )),
                    None => {
                        self.tail = TailMeta::EventuallyConstant { value: Some(c) };
                        None
                    }
                }
            }
            TailMeta::MonotoneDecreasingModulus { limit } => {
                let mut dev = vec![0.0f64; n + 1];
                for v in &self.tree().vertices()[1..] {
                    dev[v.depth] = dev[v.depth].max((self.psi.value(v.id) - limit).norm());
                }
                let dev = &dev[1..];
                let w = self.policy.window.min(dev.len());
                let tail = &dev[dev.len() - w..];
                if !tail.windows(2).all(|p| p[1] <= p[0]) {
                    Some(format!("declared monotone-decreasing-modulus but |ψ - {limit}| increases within the last {w} levels"))
                } else if classify_tail(dev, &self.policy) == TailClass::Persistent {
                    Some(format!("declared monotone-decreasing-modulus but |ψ - {limit}| levels off away from 0"))
                } else {
                    None
                }
            }
        };
        if let Some(msg) = contradiction {
            self.warnings.push(format!("{msg}; tail treated as unknown"));
            self.tail = TailMeta::Unknown;
        }
    }

    pub fn classify_bounded(&self) -> BoundedReport {
        let p = &self.profile;
        let s_inf = max_of(&p.sup_abs);
        let s_next = max_of(&p.sup_mu_next_dpsi);
        let ga = sup_growth(&p.sup_abs, &self.policy);
        let gb = if self.depth() == 0 {
            Growth::Stable
        } else {
            sup_growth(&p.sup_mu_next_dpsi[1..], &self.policy)
        };
        let q = s_inf + s_next;
        use Verdict::*;
        let classification = if self.depth() == 0 {
            Classification::new(Yes, Basis::Exact, q, "single vertex")
        } else {
            match self.tail {
                TailMeta::EventuallyZero | TailMeta::EventuallyConstant { .. } => Classification::new(
                    Yes,
                    Basis::Declared,
                    q,
                    "declared tail is eventually constant, so both suprema are attained",
                ),
                TailMeta::MonotoneDecreasingModulus { .. } => match gb {
                    Growth::Stable => Classification::new(
                        Yes,
                        Basis::Windowed,
                        q,
                        "sup|ψ| bounded by the declared tail; sup μ_{k+1}Dψ stable over the window",
                    ),
                    Growth::Growing => Classification::new(
                        No,
                        Basis::Windowed,
                        s_next,
                        "sup μ_{k+1}Dψ grows across the window",
                    ),
                    Growth::Undetermined => Classification::new(
                        Inconclusive,
                        Basis::Windowed,
                        s_next,
                        "sup μ_{k+1}Dψ neither stable nor monotonically growing",
                    ),
                },
                TailMeta::Unknown => match (ga, gb) {
                    (Growth::Growing, _) => {
                        Classification::new(No, Basis::Windowed, s_inf, "sup|ψ| grows across the window")
                    }
                    (_, Growth::Growing) => Classification::new(
                        No,
                        Basis::Windowed,
                        s_next,
                        "sup μ_{k+1}Dψ grows across the window",
                    ),
                    (Growth::Stable, Growth::Stable) => Classification::new(
                        Yes,
                        Basis::Windowed,
                        q,
                        "both suprema stable over the window; quantity is S∞ + S_{k+1}",
                    ),
                    _ => Classification::new(
                        Inconclusive,
                        Basis::Windowed,
                        q,
                        "suprema neither stable nor monotonically growing",
                    ),
                },
            }
        };
        BoundedReport {
            classification,
            sup_abs: s_inf,
            sup_mu_next_dpsi: s_next,
            growth_sup_abs: ga,
            growth_mu_next_dpsi: gb,
        }
    }

    fn require_bounded(&self, what: &str) -> Result<()> {
        if self.classify_bounded().classification.verdict == Verdict::No {
            return Err(Error::Precondition(format!(
                "{what} assumes a bounded operator, but the symbol was classified unbounded"
            )));
        }
        Ok(())
    }

    pub fn opnorm_bounds(&self) -> Result<OpnormBounds> {
        self.require_bounded("the operator-norm bound")?;
        let s_inf = max_of(&self.profile.sup_abs);
        let s_next = max_of(&self.profile.sup_mu_next_dpsi);
        let norm_k = self.psi.norm(self.table)?;
        Ok(OpnormBounds {
            lower: s_inf.max(norm_k),
            upper: s_inf + s_next,
            sup_abs: s_inf,
            norm_k,
            sup_mu_next_dpsi: s_next,
        })
    }

    fn ratio_on_support(&self, support: &[VertexId], f: impl Fn(VertexId) -> Complex64 + Copy) -> (f64, f64) {
        let (tree, table, psi) = (self.tree(), self.table, self.psi);
        let fnorm = norm_on_support(tree, table, support.iter().copied(), f);
        let pnorm = norm_on_support(tree, table, support.iter().copied(), |u| psi.value(u) * f(u));
        (pnorm, fnorm)
    }

    fn radial_probes(&self) -> Vec<CatalogEntry> {
        let n = self.depth();
        let mut out = vec![CatalogEntry::Sector { v: 0 }, CatalogEntry::EllProfile];
        for p in [0.25, 0.5, 0.75] {
            out.push(CatalogEntry::PowerProfile { p });
        }
        let mut plateau_depths: Vec<usize> = vec![2, 3, n / 4, n / 2, n.saturating_sub(1), n];
        plateau_depths.retain(|&m| m >= 2 && m <= n);
        plateau_depths.sort_unstable();
        plateau_depths.dedup();
        for &m in &plateau_depths {
            out.push(CatalogEntry::PowerPlateau { m, p: 0.5 });
            if m >= 3 {
                out.push(CatalogEntry::SquarePlateau { m });
            }
        }
        out
    }

    fn dense_ratio(&self, e: &CatalogEntry) -> Result<(f64, f64)> {
        let f = e.build(self.tree(), self.table)?;
        Ok((self.psi.mul(&f).norm(self.table)?, f.norm(self.table)?))
    }

    /// `max ‖ψf‖_k/‖f‖_k` over the selected probes. Point masses make this
    /// at least `S∞` and the constant 1 makes it at least `‖ψ‖_k`.
    pub fn empirical_opnorm_lower(&self, probes: ProbeSet) -> Result<EmpiricalLower> {
        let tree = self.tree();
        let mut best = (0.0f64, String::from("none"));
        let mut count = 0usize;
        let mut consider = |r: f64, label: &dyn Fn() -> String| {
            if r > best.0 {
                best = (r, label());
            }
        };
        if probes.point_masses {
            let (r, v) = (0..tree.len())
                .into_par_iter()
                .map(|v| {
                    let (pn, fnorm) = self.ratio_on_support(&[v], |u| Complex64::new((u == v) as u8 as f64, 0.0));
                    (pn / fnorm, v)
                })
                .reduce(|| (f64::NEG_INFINITY, usize::MAX), pick_max);
            count += tree.len();
            consider(r, &|| format!("chi({v})"));
        }
        if probes.sectors {
            let (r, v) = (0..tree.len())
                .into_par_iter()
                .map(|v| {
                    let s = tree.sector(v).expect("valid vertex");
                    let (pn, fnorm) =
                        self.ratio_on_support(&s.members, |u| Complex64::new(s.contains(u) as u8 as f64, 0.0));
                    (pn / fnorm, v)
                })
                .reduce(|| (f64::NEG_INFINITY, usize::MAX), pick_max);
            count += tree.len();
            consider(r, &|| format!("p({v})"));
        }
        if probes.radial {
            for e in self.radial_probes() {
                let (pn, fnorm) = self.dense_ratio(&e)?;
                count += 1;
                consider(pn / fnorm, &|| e.label());
            }
            for n in 1..=self.depth() {
                let s = self.shell_ratio(n);
                count += 1;
                if s.1 > 0.0 {
                    consider(s.0 / s.1, &|| format!("shell({n})"));
                }
            }
        }
        Ok(EmpiricalLower {
            value: best.0,
            witness: best.1,
            probes: count,
        })
    }

    /// `(‖ψ·shell(n)‖_k, ‖shell(n)‖_k)`.
    fn shell_ratio(&self, n: usize) -> (f64, f64) {
        let tree = self.tree();
        let scale = 1.0 / self.table.mu_k(n);
        let level = tree.level(n);
        self.ratio_on_support(level, |u| Complex64::new(if tree.depth(u) == n { scale } else { 0.0 }, 0.0))
    }

    pub fn classify_compact(&self) -> Classification {
        use Verdict::*;
        let bounded = self.classify_bounded().classification;
        if bounded.verdict == No {
            return Classification::new(No, Basis::Implied, bounded.quantity, "the operator is not bounded");
        }
        let n = self.depth();
        if n == 0 {
            return Classification::new(Yes, Basis::Exact, 0.0, "single vertex: finite rank");
        }
        let a = &self.profile.sup_abs[1..];
        let b = &self.profile.sup_mu_next_dpsi[1..];
        let tail_q = {
            let w = self.policy.window.min(a.len());
            max_of(&a[a.len() - w..]).max(max_of(&b[b.len() - w..]))
        };
        let declared = match self.tail {
            TailMeta::EventuallyZero => Some(true),
            TailMeta::EventuallyConstant { value: Some(c) } => Some(c == zero()),
            TailMeta::MonotoneDecreasingModulus { limit } if limit != zero() => Some(false),
            _ => None,
        };
        let verdict = match declared {
            Some(true) => Classification::new(Yes, Basis::Declared, tail_q, "declared tail vanishes"),
            Some(false) => Classification::new(No, Basis::Declared, tail_q, "declared tail has a nonzero limit"),
            None => {
                let ta = match self.tail {
                    TailMeta::MonotoneDecreasingModulus { .. } => TailClass::Vanishing,
                    _ => classify_tail(a, &self.policy),
                };
                let tb = classify_tail(b, &self.policy);
                match (ta, tb) {
                    (TailClass::Persistent, _) => {
                        Classification::new(No, Basis::Windowed, tail_q, "sup|ψ| tail stays away from 0")
                    }
                    (_, TailClass::Persistent) => {
                        Classification::new(No, Basis::Windowed, tail_q, "μ_{k+1}Dψ tail stays away from 0")
                    }
                    (TailClass::Vanishing, TailClass::Vanishing) => Classification::new(
                        Yes,
                        Basis::Windowed,
                        tail_q,
                        "both tails vanish over the window; quantity is the largest window value",
                    ),
                    _ => Classification::new(Inconclusive, Basis::Windowed, tail_q, "tails not yet decided"),
                }
            }
        };
        if verdict.verdict == Yes && bounded.verdict != Yes {
            return Classification::new(
                Inconclusive,
                Basis::Implied,
                tail_q,
                "tails vanish but boundedness is undecided",
            );
        }
        verdict
    }

    /// `(n, ‖ψ·shell(n)‖_k)` for shells in the tail window whose children
    /// are still inside the truncation.
    pub fn compact_sequence_check(&self) -> Vec<(usize, f64)> {
        let n = self.depth();
        if n < 2 {
            return Vec::new();
        }
        let start = n.saturating_sub(self.policy.window).max(1);
        (start..n).map(|m| (m, self.shell_ratio(m).0)).collect()
    }

    pub fn spectrum(&self) -> Result<SpectrumReport> {
        self.require_bounded("the spectrum")?;
        let tree = self.tree();
        let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
        let mut points = Vec::new();
        let mut last_new_depth = 0;
        for v in tree.vertices() {
            let z = self.psi.value(v.id) + zero();
            if seen.insert(key(z), points.len()).is_none() {
                points.push(SpectralPoint { value: z, witness: v.id });
                last_new_depth = v.depth;
            }
        }
        let n = self.depth();
        let (extras, basis, note) = match self.tail {
            TailMeta::EventuallyZero => (vec![zero()], Basis::Declared, "declared eventually-zero tail adds 0".to_string()),
            TailMeta::EventuallyConstant { value } => {
                let c = value.unwrap_or_else(|| self.psi.value(tree.level(n)[0]));
                (vec![c], Basis::Declared, format!("declared eventually-constant tail adds {c}"))
            }
            TailMeta::MonotoneDecreasingModulus { limit } => {
                (vec![limit], Basis::Declared, format!("declared decaying tail adds its limit {limit}"))
            }
            TailMeta::Unknown => {
                if last_new_depth + self.policy.window <= n {
                    (
                        Vec::new(),
                        Basis::Windowed,
                        format!("no new values in the last {} levels; range taken as closed", self.policy.window),
                    )
                } else {
                    return Err(Error::Precondition(format!(
                        "tail class is unknown and new values still appear at depth {last_new_depth} of {n}; \
                         declare a tail class to close the range"
                    )));
                }
            }
        };
        let mut sigma: Vec<Complex64> = points.iter().map(|p| p.value).collect();
        for &e in &extras {
            if !seen.contains_key(&key(e)) {
                sigma.push(e + zero());
            }
        }
        Ok(SpectrumReport {
            point_spectrum: points,
            closure_extras: extras,
            sigma_ap: sigma.clone(),
            sigma,
            basis,
            note,
        })
    }

    fn inf_stats(&self) -> (f64, f64) {
        let inf = self.profile.inf_abs.iter().copied().fold(f64::INFINITY, f64::min);
        let lo = if self.depth() == 0 { 0 } else { self.window_start() };
        let win = self.profile.inf_abs[lo..].iter().copied().fold(f64::INFINITY, f64::min);
        (inf, win)
    }

    pub fn bounded_below(&self) -> Result<BoundedBelowReport> {
        self.require_bounded("the bounded-below test")?;
        Ok(self.bounded_below_unchecked())
    }

    fn bounded_below_unchecked(&self) -> BoundedBelowReport {
        use Verdict::*;
        let (inf, win) = self.inf_stats();
        let report = |c| BoundedBelowReport {
            classification: c,
            inf_abs: inf,
            inf_abs_window: win,
            zero_witness: self.profile.first_zero,
        };
        if let Some(v) = self.profile.first_zero {
            return report(Classification::new(No, Basis::Exact, 0.0, format!("ψ({v}) = 0")));
        }
        let spectrum = self.spectrum();
        if let Ok(s) = &spectrum {
            if s.contains(zero()) {
                return report(Classification::new(No, s.basis, 0.0, "0 lies in the closure of the range"));
            }
        }
        if self.depth() > 0 && classify_tail(&self.profile.inf_abs[1..], &self.policy) == TailClass::Vanishing {
            return report(Classification::new(No, Basis::Windowed, win, "inf|ψ| tail decays to 0"));
        }
        match spectrum {
            Ok(s) => {
                let m = s.sigma.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
                report(Classification::new(
                    Yes,
                    s.basis,
                    m,
                    "0 is not in the spectrum; quantity is min |λ| over it",
                ))
            }
            Err(_) => report(Classification::new(
                Inconclusive,
                Basis::Windowed,
                win,
                "spectrum not determined; quantity is the window inf of |ψ|",
            )),
        }
    }

    fn window_sup(values: &[f64], lo: usize, hi: usize) -> f64 {
        max_of(&values[lo..=hi])
    }

    pub fn essential_norm_bounds(&self) -> Result<EssNormReport> {
        self.require_bounded("the essential-norm bound")?;
        let n = self.depth();
        let (a, b) = (&self.profile.sup_abs, &self.profile.sup_mu_next_dpsi);
        let w = self.policy.window;
        let history: Vec<EssWindow> = (1..=n)
            .map(|end| {
                let lo = end.saturating_sub(w).max(1);
                EssWindow {
                    end,
                    a: Self::window_sup(a, lo, end),
                    b: Self::window_sup(b, lo, end),
                }
            })
            .collect();
        let (a_n, b_n, start) = match history.last() {
            Some(h) => (h.a, h.b, self.window_start()),
            None => (0.0, 0.0, 0),
        };
        Ok(EssNormReport {
            lower: a_n.max(b_n),
            upper: a_n + b_n,
            a_n,
            b_n,
            window_start: start,
            window_end: n,
            history,
        })
    }

    pub fn essnorm_lower_witness(&self, p: f64) -> Result<EssWitness> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")));
        }
        self.require_bounded("the essential-norm witness")?;
        let n = self.depth();
        let mut w = EssWitness {
            p,
            a_route: 0.0,
            a_route_raw: 0.0,
            a_route_depth: None,
            b_route: 0.0,
            b_route_vertex: None,
            plateau_norm: None,
        };
        for (m, raw) in self.compact_sequence_check() {
            let ratio = raw / self.shell_ratio(m).1;
            if w.a_route_depth.is_none() || ratio > w.a_route {
                w.a_route = ratio;
                w.a_route_raw = raw;
                w.a_route_depth = Some(m);
            }
        }
        let lo = n.saturating_sub(self.policy.window).max(2);
        for m in lo..=n {
            let Some(v) = self.profile.argmax_dpsi[m] else { continue };
            let ray = Tree::regular(1, m)?;
            let h_norm = CatalogEntry::PowerPlateau { m, p }.build(&ray, self.table)?.norm(self.table)?;
            let val = self.profile.sup_mu_next_dpsi[m] / h_norm;
            if w.b_route_vertex.is_none() || val > w.b_route {
                w.b_route = val;
                w.b_route_vertex = Some(v);
                w.plateau_norm = Some(h_norm);
            }
        }
        Ok(w)
    }

    /// Compares `‖ψf‖_k` with `‖f‖_k` over `½χ_o`, `χ_v/μ_k(|v|+1)` for
    /// every `v`, the constant 1, shallow sectors and radial catalog members.
    pub fn isometry_check(&self) -> Result<IsometryReport> {
        let tree = self.tree();
        let mut cmp: Vec<ProbeComparison> = Vec::new();
        let (pn, fnorm) = self.ratio_on_support(&[0], |u| Complex64::new(if u == 0 { 0.5 } else { 0.0 }, 0.0));
        cmp.push(ProbeComparison {
            probe: "chi(0)/2".into(),
            psi_f_norm: pn,
            f_norm: fnorm,
        });
        for v in 0..tree.len() {
            // μ_k one level below the truncation is outside the table
            let s = 1.0 / weight(self.k(), (tree.depth(v) + 1) as f64)?;
            let (pn, fnorm) = self.ratio_on_support(&[v], |u| Complex64::new(if u == v { s } else { 0.0 }, 0.0));
            cmp.push(ProbeComparison {
                probe: format!("chi({v})/mu_k({})", tree.depth(v) + 1),
                psi_f_norm: pn,
                f_norm: fnorm,
            });
        }
        let mut entries = self.radial_probes();
        for d in 1..=self.depth().min(2) {
            for &v in tree.level(d) {
                entries.push(CatalogEntry::Sector { v });
                entries.push(CatalogEntry::ScaledSector { w: v });
            }
        }
        for e in entries {
            let (pn, fnorm) = self.dense_ratio(&e)?;
            cmp.push(ProbeComparison {
                probe: e.label(),
                psi_f_norm: pn,
                f_norm: fnorm,
            });
        }
        let rel = |c: &ProbeComparison| (c.psi_f_norm - c.f_norm).abs() / c.f_norm;
        let max_rel = cmp.iter().map(rel).fold(0.0, f64::max);
        // the first violated probe, so `½χ_o` wins whenever it qualifies
        let first = cmp.iter().position(|c| rel(c) > ISOMETRY_TOL);
        Ok(IsometryReport {
            consistent: first.is_none(),
            probes: cmp.len(),
            max_rel_discrepancy: max_rel,
            witness: first.map(|i| cmp.swap_remove(i)),
        })
    }

    pub fn analyze(&self) -> Result<AnalysisReport> {
        let bounded = self.classify_bounded();
        let is_bounded = bounded.classification.verdict != Verdict::No;
        let (opnorm, ess) = if is_bounded {
            (Some(self.opnorm_bounds()?), Some(self.essential_norm_bounds()?))
        } else {
            (None, None)
        };
        let bounded_below = if is_bounded {
            self.bounded_below_unchecked().classification
        } else {
            Classification::new(
                Verdict::Inconclusive,
                Basis::Implied,
                f64::NAN,
                "not assessed for an unbounded operator",
            )
        };
        let n = self.depth();
        let (inf, win_inf) = self.inf_stats();
        let lo = if n == 0 { 0 } else { self.window_start() };
        let p = &self.profile;
        let tails = |v: &[f64]| if v.len() > 1 { v[1..].to_vec() } else { Vec::new() };
        let convergence = vec![
            TailDiagnostic::of("sup_abs_psi_by_depth", &tails(&p.sup_abs), &self.policy),
            TailDiagnostic::of("sup_mu_next_dpsi_by_depth", &tails(&p.sup_mu_next_dpsi), &self.policy),
            TailDiagnostic::of("inf_abs_psi_by_depth", &tails(&p.inf_abs), &self.policy),
        ];
        Ok(AnalysisReport {
            k: self.k(),
            depth: n,
            policy: self.policy,
            tail_declared: self.declared,
            tail_effective: self.tail,
            sup_inf_psi: AbsStats {
                sup: bounded.sup_abs,
                inf,
                window_sup: Self::window_sup(&p.sup_abs, lo, n),
                window_inf: win_inf,
                window_start: lo,
                window_end: n,
            },
            sup_mu_next_dpsi: bounded.sup_mu_next_dpsi,
            compact_verdict: self.classify_compact(),
            bounded_verdict: bounded.classification,
            bounded_below_verdict: bounded_below,
            opnorm_lower: opnorm.map(|o| o.lower),
            opnorm_upper: opnorm.map(|o| o.upper),
            essnorm_lower: ess.as_ref().map(|e| e.lower),
            essnorm_upper: ess.as_ref().map(|e| e.upper),
            convergence,
            warnings: self.warnings.clone(),
        })
    }
}

/// Larger value wins; ties go to the smaller index so parallel reduction is
/// deterministic.
fn pick_max(x: (f64, usize), y: (f64, usize)) -> (f64, usize) {
    if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
        y
    } else {
        x
    }
}

/// Evaluates `spec` on `tree` and runs the full analysis.
pub fn analyze(spec: &SymbolSpec, tree: &Tree, table: &WeightTable, policy: TailPolicy) -> Result<AnalysisReport> {
    let psi = spec.evaluate(tree)?;
    Analyzer::new(&psi, spec.tail_meta, table, policy)?.analyze()
}

/// `μ_k(|v|)D(ψf)(v) ≤ μ_{k+1}(|v|)Dψ(v)·‖f‖_{k,≤|v|} + S∞ μ_k(|v|)Df(v)`:
/// smallest relative slack over the non-root vertices.
pub fn product_rule_slack(psi: &TreeFunction<'_>, f: &TreeFunction<'_>, table: &WeightTable) -> Result<f64> {
    let tree = psi.tree();
    let s_inf = psi.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let trunc = f.depth_truncated_norms(table)?;
    let mut worst = f64::INFINITY;
    for v in &tree.vertices()[1..] {
        let u = v.parent.expect("non-root");
        let d = v.depth;
        let lhs = table.mu_k(d) * (psi.value(v.id) * f.value(v.id) - psi.value(u) * f.value(u)).norm();
        let rhs = table.mu_next(d) * (psi.value(v.id) - psi.value(u)).norm() * trunc[d]
            + s_inf * table.mu_k(d) * (f.value(v.id) - f.value(u)).norm();
        let slack = (rhs - lhs) / rhs.max(lhs).max(f64::MIN_POSITIVE);
        worst = worst.min(slack);
    }
    Ok(worst)
}
