//! Invariant suites behind `verify-weights` and `verify-space`.
//!
//! Each check reports the worst residual it saw next to the threshold it
//! was held to, so a pass is never just a boolean.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::CatalogEntry;
use crate::error::{Error, Result};
use crate::func::{chi_decomposition_check, path_sum_check, TreeFunction};
use crate::tree::Tree;
use crate::weights::{alpha_minus_one, ell, ell_derivative_check, gamma, phi, WeightTable};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub range: String,
    pub pass: bool,
    /// Largest residual observed; the check passes when it does not exceed
    /// `threshold`. For strict monotonicity this is the largest step in the
    /// wrong direction, so a passing value is negative.
    pub worst_violation: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, range: String, worst: f64, threshold: f64, strict: bool) {
        let pass = if strict { worst < threshold } else { worst <= threshold };
        self.checks.push(Check {
            name: name.into(),
            range,
            pass: pass && !worst.is_nan(),
            worst_violation: worst,
            threshold,
        });
    }
}

const CHUNK: u64 = 1 << 15;

/// Max of `f(n)` over `lo..=hi`, split across threads.
fn par_max(lo: u64, hi: u64, f: impl Fn(u64) -> f64 + Sync + Send) -> f64 {
    scan_max(lo, hi, |n| n, |_, n| f(*n))
}

/// Max of `step(prev, cur)` over `lo..=hi`, where `cur = eval(n)` and
/// `prev = eval(n - 1)`; each value is computed once per chunk.
fn scan_max<S: Send>(
    lo: u64,
    hi: u64,
    eval: impl Fn(u64) -> S + Sync + Send,
    step: impl Fn(Option<&S>, &S) -> f64 + Sync + Send,
) -> f64 {
    if lo > hi {
        return f64::NEG_INFINITY;
    }
    let chunks = (hi - lo) / CHUNK + 1;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let a = lo + c * CHUNK;
            let b = (a + CHUNK - 1).min(hi);
            let mut prev = (a > lo).then(|| eval(a - 1));
            let mut worst = f64::NEG_INFINITY;
            for n in a..=b {
                let cur = eval(n);
                worst = nan_max(worst, step(prev.as_ref(), &cur));
                prev = Some(cur);
            }
            worst
        })
        .reduce(|| f64::NEG_INFINITY, nan_max)
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

const SLOTS: usize = crate::weights::DEFAULT_MAX_K + 2;

fn per_k(k_max: usize, f: impl Fn(usize) -> f64) -> [f64; SLOTS] {
    let mut out = [0.0; SLOTS];
    for k in 1..=k_max {
        out[k] = f(k);
    }
    out
}

fn check_args(k_max: usize, max_n: u64, min_n: u64) -> Result<()> {
    if k_max == 0 || max_n < min_n {
        return Err(Error::InvalidParameter(format!(
            "need k >= 1 and max_n >= {min_n}, got k = {k_max}, max_n = {max_n}"
        )));
    }
    if k_max > crate::weights::DEFAULT_MAX_K {
        return Err(Error::KTooLarge {
            k: k_max,
            cap: crate::weights::DEFAULT_MAX_K,
        });
    }
    Ok(())
}

/// `ℓ_j` against the inverse relation `exp(ℓ_j - 1) = ℓ_{j-1}` (with
/// `ℓ_0` replaced by `x` for `j = 1`), plus bounds and monotonicity.
pub fn check_ell(k_max: usize, max_n: u64) -> Result<Vec<Check>> {
    check_args(k_max, max_n, 2)?;
    let mut r = CheckReport { checks: Vec::new() };
    let worst = par_max(1, max_n, |n| {
        let x = n as f64;
        let mut prev = x;
        let mut worst: f64 = 0.0;
        for j in 1..=k_max {
            let lj = ell(j, x).expect("x >= 1");
            worst = worst.max(((lj - 1.0).exp() - prev).abs() / prev);
            prev = lj;
        }
        worst
    });
    r.push("ell-recursion", format!("k=1..={k_max}, n=1..={max_n}"), worst, 1e-13, false);
    let worst = scan_max(
        1,
        max_n,
        |n| per_k(k_max, |j| ell(j, n as f64).unwrap()),
        |prev, cur| {
            (1..=k_max)
                .map(|j| (1.0 - cur[j]).max(prev.map_or(f64::NEG_INFINITY, |p| p[j] - cur[j])))
                .fold(f64::NEG_INFINITY, f64::max)
        },
    );
    r.push("ell-bounds", format!("j=1..={k_max}, n=1..={max_n}"), worst, 0.0, false);
    Ok(r.checks)
}

/// Table weights: `μ_k` strictly increasing, `μ_{k+1} = μ_k ℓ_k`, and
/// `μ_k(n)/μ_k(n-1) ≤ 2^k`; also the table's `ℓ_k` against [`ell`].
pub fn check_mu(k_max: usize, max_n: usize) -> Result<Vec<Check>> {
    check_args(k_max, max_n as u64, 2)?;
    let mut mono = f64::NEG_INFINITY;
    let mut factor: f64 = 0.0;
    let mut agree: f64 = 0.0;
    let mut ratio_excess = f64::NEG_INFINITY;
    for k in 1..=k_max {
        let t = WeightTable::new(k, max_n)?;
        if t.mu_k(1) != 1.0 {
            mono = f64::INFINITY;
        }
        for n in 1..=max_n {
            factor = factor.max((t.mu_next(n) - t.mu_k(n) * t.ell_k(n)).abs() / t.mu_next(n));
            agree = agree.max((t.ell_k(n) - ell(k, n as f64)?).abs() / t.ell_k(n));
            if n >= 2 {
                mono = mono.max(t.mu_k(n - 1) - t.mu_k(n));
                ratio_excess = ratio_excess.max(t.mu_k(n) / t.mu_k(n - 1) - 2f64.powi(k as i32));
            }
        }
    }
    let mut r = CheckReport { checks: Vec::new() };
    let range = format!("k=1..={k_max}, n=1..={max_n}");
    r.push("table-ell-agrees", range.clone(), agree, 1e-15, false);
    r.push("mu-strictly-increasing", range.clone(), mono, 0.0, true);
    r.push("mu-next-factor", range.clone(), factor, 1e-15, false);
    r.push("mu-ratio-at-most-2^k", range, ratio_excess, 0.0, false);
    Ok(r.checks)
}

/// `α_k(n)` strictly decreasing on `[3, max_n]` and above 1; at `10^6`
/// also `α_k - 1 < 10^-6` when the range reaches it.
pub fn check_alpha(k_max: usize, max_n: u64) -> Result<Vec<Check>> {
    check_args(k_max, max_n, 3)?;
    let mut r = CheckReport { checks: Vec::new() };
    let ks = format!("k=1..={k_max}");
    let worst = scan_max(
        2,
        max_n,
        |n| per_k(k_max, |k| alpha_minus_one(k, n).unwrap()),
        |prev, cur| match prev {
            Some(p) => (1..=k_max).map(|k| cur[k] - p[k]).fold(f64::NEG_INFINITY, f64::max),
            None => f64::NEG_INFINITY,
        },
    );
    r.push("alpha-strictly-decreasing", format!("{ks}, n=3..={max_n}"), worst, 0.0, true);
    let lowest = (1..=k_max).map(|k| alpha_minus_one(k, max_n).unwrap()).fold(f64::INFINITY, f64::min);
    r.push("alpha-above-one", format!("{ks}, n={max_n}"), -lowest, 0.0, true);
    if max_n >= 1_000_000 {
        let top = (1..=k_max).map(|k| alpha_minus_one(k, 1_000_000).unwrap()).fold(0.0, f64::max);
        r.push("alpha-tail", format!("{ks}, n=10^6"), top, 1e-6, true);
    }
    Ok(r.checks)
}

/// `φ_{k,n} > 0` strictly decreasing, the `γ` identity
/// `φ_{k+1,n} + 1 = (φ_{k,n} + 1)γ_{k,n}` with `γ` formed from the plain
/// ratio `ℓ_k(n)/ℓ_k(n-1)`, and `γ_{k,n} > 1` decreasing.
pub fn check_phi_gamma(k_max: usize, max_n: u64) -> Result<Vec<Check>> {
    check_args(k_max, max_n, 3)?;
    let mut r = CheckReport { checks: Vec::new() };
    let ks = format!("k=1..={k_max}");
    let worst = scan_max(
        2,
        max_n,
        |n| per_k(k_max, |k| phi(k, n).unwrap()),
        |prev, cur| {
            (1..=k_max)
                .map(|k| (-cur[k]).max(prev.map_or(f64::NEG_INFINITY, |p| cur[k] - p[k])))
                .fold(f64::NEG_INFINITY, f64::max)
        },
    );
    r.push("phi-positive-decreasing", format!("{ks}, n=2..={max_n}"), worst, 0.0, true);
    let worst = par_max(2, max_n, |n| {
        let x = n as f64;
        let mut phi_k = phi(1, n).unwrap();
        let mut worst: f64 = 0.0;
        for k in 1..=k_max {
            let a = ell(k, x).unwrap() / ell(k, x - 1.0).unwrap();
            let g = a * a.ln() / (a - 1.0);
            let phi_next = phi(k + 1, n).unwrap();
            let lhs = phi_next + 1.0;
            worst = worst.max((lhs - (phi_k + 1.0) * g).abs() / lhs);
            phi_k = phi_next;
        }
        worst
    });
    r.push("gamma-identity", format!("{ks}, n=2..={max_n}"), worst, 1e-10, false);
    let worst = scan_max(
        2,
        max_n,
        |n| per_k(k_max, |k| gamma(k, n).unwrap()),
        |prev, cur| {
            (1..=k_max)
                .map(|k| (1.0 - cur[k]).max(prev.map_or(f64::NEG_INFINITY, |p| cur[k] - p[k])))
                .fold(f64::NEG_INFINITY, f64::max)
        },
    );
    r.push("gamma-above-one-decreasing", format!("{ks}, n=2..={max_n}"), worst, 0.0, true);
    Ok(r.checks)
}

/// Central differences of `ℓ_k` against `1/μ_k` at `x ∈ {10, …, 10^4}` with
/// `h = 10^-3 x`, and the error ratio under halving `h` (4 for a second
/// order scheme), skipped once the residual reaches the rounding floor.
pub fn check_derivative(k_max: usize) -> Result<Vec<Check>> {
    check_args(k_max, 3, 3)?;
    let kd = k_max.min(4);
    let mut worst_res: f64 = 0.0;
    let mut worst_order = f64::NEG_INFINITY;
    let mut observed = 0;
    for k in 1..=kd {
        for x in [10.0, 1e2, 1e3, 1e4] {
            let h = 1e-3 * x;
            let r1 = ell_derivative_check(k, x, h)?;
            let r2 = ell_derivative_check(k, x, h / 2.0)?;
            worst_res = worst_res.max(r1);
            let floor = 8.0 * f64::EPSILON * ell(k, x)? / (h / 2.0);
            if r2 > floor {
                observed += 1;
                worst_order = worst_order.max((r2 / r1 - 0.25).abs());
            }
        }
    }
    let mut r = CheckReport { checks: Vec::new() };
    r.push("derivative-identity", format!("k=1..={kd}, x=10..1e4, h=1e-3x"), worst_res, 1e-6, true);
    let order = if observed == 0 { f64::INFINITY } else { worst_order };
    r.push(
        "derivative-second-order",
        format!("k=1..={kd}, h -> h/2, {observed} points above the rounding floor"),
        order,
        0.05,
        false,
    );
    Ok(r.checks)
}

/// The weight-chain suite for `1 <= k <= k_max` and `1 <= n <= max_n`.
/// Table-based checks stop at `10^6`.
pub fn verify_weights(k_max: usize, max_n: u64) -> Result<CheckReport> {
    check_args(k_max, max_n, 3)?;
    let mut checks = check_ell(k_max, max_n)?;
    checks.extend(check_mu(k_max, max_n.min(1_000_000) as usize)?);
    checks.extend(check_alpha(k_max, max_n)?);
    checks.extend(check_phi_gamma(k_max, max_n)?);
    checks.extend(check_derivative(k_max)?);
    Ok(CheckReport { checks })
}

/// `(D(ψf) - Dψ|f| - |ψ(v⁻)|Df, Dψ|f| - D(ψf) - |ψ(v⁻)|Df)` scaled by
/// `μ_k(|v|)`, maximized over non-root vertices, each relative to the
/// size of the terms involved.
pub fn product_rule_residuals(psi: &TreeFunction<'_>, f: &TreeFunction<'_>, table: &WeightTable) -> (f64, f64) {
    let tree = psi.tree();
    let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in &tree.vertices()[1..] {
        let u = v.parent.expect("non-root");
        let m = table.mu_k(v.depth);
        let d_prod = (psi.value(v.id) * f.value(v.id) - psi.value(u) * f.value(u)).norm();
        let d_psi_f = (psi.value(v.id) - psi.value(u)).norm() * f.value(v.id).norm();
        let psi_df = psi.value(u).norm() * (f.value(v.id) - f.value(u)).norm();
        let scale = m * (d_prod + d_psi_f + psi_df).max(1.0);
        first = first.max(m * (d_prod - d_psi_f - psi_df) / scale);
        second = second.max(m * (d_psi_f - d_prod - psi_df) / scale);
    }
    (first, second)
}

fn random_function<'t>(tree: &'t Tree, rng: &mut ChaCha8Rng) -> TreeFunction<'t> {
    let values = (0..tree.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    TreeFunction::new(tree, values).expect("finite values")
}

/// The function-space suite on `count` seeded random trees of depth at
/// most `max_depth`.
pub fn verify_space(k: usize, seed: u64, count: usize, max_depth: usize) -> Result<CheckReport> {
    if max_depth < 2 || count == 0 {
        return Err(Error::InvalidParameter("need max_depth >= 2 and count >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = [f64::NEG_INFINITY; 12];
    for i in 0..count {
        let depth = rng.gen_range(2..=max_depth);
        let tree = Tree::random(rng.gen(), 3, depth)?;
        let table = WeightTable::new(k, depth)?;
        let f = random_function(&tree, &mut rng);
        let g = random_function(&tree, &mut rng);
        let (nf, ng) = (f.norm(&table)?, g.norm(&table)?);

        w[0] = w[0].max((f.add(&g).norm(&table)? - nf - ng) / (nf + ng));
        let c = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        w[1] = w[1].max((f.scale(c).norm(&table)? - c.norm() * nf).abs() / (c.norm() * nf));
        let zero_norm = TreeFunction::zero(&tree).norm(&table)?;
        w[2] = w[2].max(zero_norm).max(if nf > 0.0 { 0.0 } else { 1.0 });

        w[3] = w[3].max(-f.growth_bound_check(&table)? / nf);

        let n = rng.gen_range(0..=depth);
        let kn = f.truncate(n)?;
        w[4] = w[4].max(if kn.truncate(n)?.values() == kn.values() { 0.0 } else { 1.0 });
        let rest = f.sub(&kn);
        w[5] = w[5].max((kn.norm(&table)? - nf) / nf).max((rest.norm(&table)? - nf) / nf);

        let inner: Vec<usize> = (0..tree.len()).filter(|&v| tree.depth(v) < depth).collect();
        let v = inner[rng.gen_range(0..inner.len())];
        w[6] = w[6].max(chi_decomposition_check(&tree, v)?);

        let start = rng.gen_range(1..tree.len());
        let sector = tree.sector(start)?;
        let end = sector.members[rng.gen_range(0..sector.len())];
        w[7] = w[7].max(-path_sum_check(&tree, &table, start, end)?);

        let deep = rng.gen_range(1..tree.len());
        for e in [
            CatalogEntry::EllProfile,
            CatalogEntry::PowerProfile { p: 0.5 },
            CatalogEntry::Sector { v: deep },
            CatalogEntry::ScaledSector { w: deep },
            CatalogEntry::Shell { n: tree.depth(deep) },
        ] {
            let h = e.build(&tree, &table)?;
            let (a, b) = product_rule_residuals(&f, &h, &table);
            w[8] = w[8].max(a).max(b);
        }

        let fw = CatalogEntry::ScaledSector { w: deep }.build(&tree, &table)?;
        w[9] = w[9].max((fw.norm(&table)? - 1.0).abs());
        let d = tree.depth(deep);
        if d < depth && tree.level(d).iter().all(|&u| !tree.children(u).is_empty()) {
            let s = CatalogEntry::Shell { n: d }.build(&tree, &table)?.norm(&table)?;
            let expected = table.mu_k(d + 1) / table.mu_k(d);
            w[10] = w[10]
                .max((s - expected).abs() / expected)
                .max(s - 2f64.powi(k as i32));
        }
        let _ = i;
    }

    let ray = Tree::regular(1, 64)?;
    let table = WeightTable::new(k, 64)?;
    let sector = CatalogEntry::Sector { v: 1 }.build(&ray, &table)?.norm_k(&table)?;
    let profile = CatalogEntry::EllProfile.build(&ray, &table)?.norm_k(&table)?;
    let constant = TreeFunction::constant(&ray, Complex64::new(2.0, 0.0)).norm_k(&table)?;
    w[11] = if sector.little_flag && !profile.little_flag && constant.little_flag { 0.0 } else { 1.0 };

    let range = format!("k={k}, {count} random trees, depth<={max_depth}, seed={seed}");
    let mut r = CheckReport { checks: Vec::new() };
    let names: [(&str, f64); 12] = [
        ("norm-triangle", 1e-12),
        ("norm-homogeneity", 1e-12),
        ("norm-definiteness", 0.0),
        ("growth-bound", 1e-10),
        ("truncation-idempotent", 0.0),
        ("truncation-contraction", 1e-12),
        ("chi-decomposition", 0.0),
        ("path-sum", 1e-12),
        ("product-rule", 1e-12),
        ("scaled-sector-unit-norm", 1e-12),
        ("shell-norm-ratio", 1e-12),
        ("little-space-flags", 0.0),
    ];
    for ((name, thr), worst) in names.iter().zip(w) {
        let range = if *name == "little-space-flags" { format!("k={k}, ray depth 64") } else { range.clone() };
        r.push(name, range, worst, *thr, false);
    }
    Ok(r)
}
