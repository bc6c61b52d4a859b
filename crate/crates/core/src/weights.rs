//! The iterated logarithm chain `ℓ_j` and the depth weights built from it.
//!
//! `ℓ_0 ≡ 1`, `ℓ_1(x) = 1 + ln x` and `ℓ_j(x) = 1 + ln ℓ_{j-1}(x)`. The weight
//! of a vertex at depth `n` in the order-`k` space is
//! `μ_k(n) = n · ℓ_0(n) ⋯ ℓ_{k-1}(n)`.
//!
//! Consecutive differences `ℓ_k(n) - ℓ_k(n-1)` are formed without
//! subtracting nearby values: `ℓ_j(n) - ℓ_j(n-1) = ln(1 + Δ_{j-1}/ℓ_{j-1}(n-1))`
//! with `Δ_1 = ln(1 + 1/(n-1))`. The auxiliary sequences `α_k`, `φ_{k,n}` and
//! `γ_{k,n}` are all expressed through these increments, which keeps their
//! strict monotonicity visible in double precision out to `n = 10^6`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest space index accepted unless a caller raises the cap explicitly.
pub const DEFAULT_MAX_K: usize = 8;

/// `ℓ_j(x)` for `x >= 1`.
pub fn ell(j: usize, x: f64) -> Result<f64> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ell({j}, x) needs finite x >= 1, got {x}")));
    }
    Ok(ell_unchecked(j, x))
}

pub(crate) fn ell_unchecked(j: usize, x: f64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let mut value = 1.0 + x.ln();
    for _ in 1..j {
        value = 1.0 + value.ln();
    }
    value
}

/// `ℓ_k(n) - ℓ_k(n-1)` for `n >= 2`, cancellation free.
pub fn ell_increment(k: usize, n: u64) -> Result<f64> {
    check_n(n)?;
    Ok(increment_unchecked(k, n as f64))
}

fn increment_unchecked(k: usize, n: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let prev = n - 1.0;
    let mut delta = (1.0 / prev).ln_1p();
    let mut ell_prev = 1.0 + prev.ln();
    for _ in 1..k {
        delta = (delta / ell_prev).ln_1p();
        ell_prev = 1.0 + ell_prev.ln();
    }
    delta
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("sequence index must be >= 2, got {n}")));
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("space index k must be >= 1".into()));
    }
    Ok(())
}

/// `μ_k(x) = x · ∏_{j<k} ℓ_j(x)`.
pub fn weight(k: usize, x: f64) -> Result<f64> {
    ell(0, x)?;
    Ok(weight_unchecked(k, x))
}

pub(crate) fn weight_unchecked(k: usize, x: f64) -> f64 {
    let mut product = x;
    let mut l = 1.0;
    for j in 1..k {
        l = if j == 1 { 1.0 + x.ln() } else { 1.0 + l.ln() };
        product *= l;
    }
    product
}

/// `α_k(n) - 1 = (ℓ_k(n) - ℓ_k(n-1)) / ℓ_k(n-1)`.
pub fn alpha_minus_one(k: usize, n: u64) -> Result<f64> {
    check_k(k)?;
    check_n(n)?;
    let n = n as f64;
    Ok(increment_unchecked(k, n) / ell_unchecked(k, n - 1.0))
}

/// `α_k(n) = ℓ_k(n) / ℓ_k(n-1)`.
pub fn alpha(k: usize, n: u64) -> Result<f64> {
    alpha_minus_one(k, n).map(|x| 1.0 + x)
}

/// `φ_{k,n} = μ_k(n)(ℓ_k(n) - ℓ_k(n-1)) - 1`.
pub fn phi(k: usize, n: u64) -> Result<f64> {
    check_k(k)?;
    check_n(n)?;
    let x = n as f64;
    Ok(weight_unchecked(k, x) * increment_unchecked(k, x) - 1.0)
}

/// `γ_{k,n} = α ln α / (α - 1)` with `α = α_k(n)`.
pub fn gamma(k: usize, n: u64) -> Result<f64> {
    let x = alpha_minus_one(k, n)?;
    Ok((1.0 + x) * x.ln_1p() / x)
}

/// Central-difference residual of `ℓ_k'(x) = 1/μ_k(x)`.
pub fn ell_derivative_check(k: usize, x: f64, h: f64) -> Result<f64> {
    check_k(k)?;
    if !(h > 0.0) || !(x - h > 1.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "derivative check needs h > 0 and x - h > 1, got x = {x}, h = {h}"
        )));
    }
    let fd = (ell_unchecked(k, x + h) - ell_unchecked(k, x - h)) / (2.0 * h);
    Ok((fd - 1.0 / weight_unchecked(k, x)).abs())
}

/// Which weight of a table to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// `μ_k`
    K,
    /// `μ_{k+1} = μ_k · ℓ_k`
    KPlusOne,
}

/// `ℓ_j(n)` for `j <= k`, `μ_k(n)` and `μ_{k+1}(n)` over `1 <= n <= max_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightTable {
    k: usize,
    max_n: usize,
    /// `ell[j][n - 1]`
    ell: Vec<Vec<f64>>,
    /// Indexed by depth; slot 0 holds 0 so that the root carries no weight.
    mu: Vec<f64>,
    mu_next: Vec<f64>,
}

impl WeightTable {
    pub fn new(k: usize, max_n: usize) -> Result<Self> {
        Self::with_cap(k, max_n, DEFAULT_MAX_K)
    }

    pub fn with_cap(k: usize, max_n: usize, cap: usize) -> Result<Self> {
        check_k(k)?;
        if k > cap {
            return Err(Error::KTooLarge { k, cap });
        }
        if max_n == 0 {
            return Err(Error::InvalidParameter("max_n must be >= 1".into()));
        }
        let mut ell = vec![vec![1.0; max_n]];
        for j in 1..=k {
            let row: Vec<f64> = if j == 1 {
                (1..=max_n).map(|n| 1.0 + (n as f64).ln()).collect()
            } else {
                ell[j - 1].iter().map(|l: &f64| 1.0 + l.ln()).collect()
            };
            ell.push(row);
        }
        let mut mu = Vec::with_capacity(max_n + 1);
        let mut mu_next = Vec::with_capacity(max_n + 1);
        mu.push(0.0);
        mu_next.push(0.0);
        for n in 1..=max_n {
            let m = (0..k).fold(n as f64, |acc, j| acc * ell[j][n - 1]);
            mu.push(m);
            mu_next.push(m * ell[k][n - 1]);
        }
        Ok(WeightTable {
            k,
            max_n,
            ell,
            mu,
            mu_next,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// `ℓ_j(n)`, `j <= k`, `1 <= n <= max_n`. Panics outside that range.
    pub fn ell(&self, j: usize, n: usize) -> f64 {
        self.ell[j][n - 1]
    }

    /// `ℓ_k(n)`.
    pub fn ell_k(&self, n: usize) -> f64 {
        self.ell[self.k][n - 1]
    }

    /// `μ_k(n)`; 0 at `n = 0`.
    pub fn mu_k(&self, n: usize) -> f64 {
        self.mu[n]
    }

    /// `μ_{k+1}(n)`; 0 at `n = 0`.
    pub fn mu_next(&self, n: usize) -> f64 {
        self.mu_next[n]
    }

    pub fn mu(&self, n: usize, order: Order) -> Result<f64> {
        if n == 0 || n > self.max_n {
            return Err(Error::InvalidParameter(format!(
                "depth {n} outside the table range 1..={}",
                self.max_n
            )));
        }
        Ok(match order {
            Order::K => self.mu[n],
            Order::KPlusOne => self.mu_next[n],
        })
    }

    /// Fails unless the table reaches depth `depth`.
    pub fn ensure_covers(&self, depth: usize) -> Result<()> {
        if depth > self.max_n {
            return Err(Error::TableTooSmall {
                max_n: self.max_n,
                needed: depth,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn ell_values() {
        assert_eq!(ell(0, 5.0).unwrap(), 1.0);
        assert_eq!(ell(1, 1.0).unwrap(), 1.0);
        for j in 0..9 {
            assert_eq!(ell(j, 1.0).unwrap(), 1.0);
        }
        let e = std::f64::consts::E;
        assert!((ell(2, e).unwrap() - (1.0 + LN2)).abs() < 1e-15);
        assert!((ell(2, e).unwrap() - 1.693147).abs() < 1e-6);
        assert!(matches!(ell(1, 0.5), Err(Error::Domain(_))));
        assert!(ell(1, f64::NAN).is_err());
    }

    #[test]
    fn table_weights() {
        let t1 = WeightTable::new(1, 10).unwrap();
        assert_eq!(t1.mu(2, Order::K).unwrap(), 2.0);
        let t2 = WeightTable::new(2, 10).unwrap();
        let expected = 2.0 * (1.0 + LN2);
        assert!((t2.mu(2, Order::K).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 3.386294).abs() < 1e-6);
        for k in 1..=8 {
            let t = WeightTable::new(k, 4).unwrap();
            assert_eq!(t.mu(1, Order::K).unwrap(), 1.0);
            assert_eq!(t.mu(1, Order::KPlusOne).unwrap(), 1.0);
        }
        assert!(t2.mu(0, Order::K).is_err());
        assert!(t2.mu(11, Order::K).is_err());
        assert!(matches!(WeightTable::new(9, 4), Err(Error::KTooLarge { .. })));
        assert!(WeightTable::with_cap(9, 4, 9).is_ok());
        assert!(WeightTable::new(0, 4).is_err());
    }

    #[test]
    fn table_matches_free_functions() {
        let t = WeightTable::new(3, 500).unwrap();
        for n in 1..=500 {
            for j in 0..=3 {
                assert_eq!(t.ell(j, n), ell(j, n as f64).unwrap());
            }
            let direct = weight(3, n as f64).unwrap();
            assert!((t.mu_k(n) - direct).abs() <= 1e-14 * direct);
            assert!((t.mu_next(n) - t.mu_k(n) * t.ell_k(n)).abs() <= 1e-14 * t.mu_next(n));
        }
    }

    #[test]
    fn alpha_values() {
        assert!((alpha(1, 2).unwrap() - (1.0 + LN2)).abs() < 1e-15);
        let n = 1_000_000u64;
        let delta = alpha_minus_one(1, n).unwrap();
        let oracle = ((n as f64) / (n as f64 - 1.0)).ln() / (1.0 + (n as f64 - 1.0).ln());
        assert!(delta > 0.0 && delta < 1e-6);
        assert!((delta - oracle).abs() < 1e-9 * oracle);
        let a22 = alpha(2, 2).unwrap();
        assert!((a22 - (1.0 + (1.0 + LN2).ln())).abs() < 1e-15);
        assert!((a22 - 1.526589).abs() < 1e-6);
        assert!(alpha(1, 1).is_err());
        assert!(alpha(0, 3).is_err());
    }

    #[test]
    fn phi_values() {
        assert!((phi(1, 2).unwrap() - (2.0 * LN2 - 1.0)).abs() < 1e-15);
        assert!((phi(1, 2).unwrap() - 0.386294).abs() < 1e-6);
        let p = phi(1, 100_000).unwrap();
        assert!(p > 0.0 && p < 1e-4);
        assert!((p - 1.0 / 200_000.0).abs() < 1e-9);
        for k in 1..=6 {
            assert!(phi(k, 2).unwrap() > 0.0);
        }
        assert!(phi(1, 1).is_err());
    }

    #[test]
    fn gamma_values() {
        // identity against a ratio of φ values
        let lhs = (phi(2, 5).unwrap() + 1.0) / (phi(1, 5).unwrap() + 1.0);
        assert!((lhs - gamma(1, 5).unwrap()).abs() < 1e-12);
        let g = gamma(1, 1_000_000).unwrap();
        assert!(g > 1.0 && g - 1.0 < 1e-6);
        let a = 1.0 + LN2;
        let oracle = a * a.ln() / (a - 1.0);
        assert!((gamma(1, 2).unwrap() - oracle).abs() < 1e-14);
        // the quoted 1.289 is only good to about two decimals
        assert!((gamma(1, 2).unwrap() - 1.289).abs() < 5e-3);
    }

    #[test]
    fn increments_match_direct_differences_at_small_n() {
        for k in 1..=5 {
            for n in 2..50u64 {
                let direct = ell(k, n as f64).unwrap() - ell(k, n as f64 - 1.0).unwrap();
                let inc = ell_increment(k, n).unwrap();
                assert!((direct - inc).abs() < 1e-13, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn derivative_residuals() {
        assert!(ell_derivative_check(1, 10.0, 1e-4).unwrap() < 1e-8);
        assert!(ell_derivative_check(2, 100.0, 1e-3).unwrap() < 1e-6);
        let coarse = ell_derivative_check(1, 10.0, 0.02).unwrap();
        let fine = ell_derivative_check(1, 10.0, 0.01).unwrap();
        let ratio = coarse / fine;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
        assert!(ell_derivative_check(1, 1.5, 1.0).is_err());
    }

    #[test]
    fn mu_ratio_bounded_by_power_of_two() {
        for k in 1..=6 {
            let t = WeightTable::new(k, 2000).unwrap();
            let cap = 2f64.powi(k as i32);
            for n in 1..2000 {
                assert!(t.mu_k(n + 1) > t.mu_k(n));
                assert!(t.mu_k(n + 1) / t.mu_k(n) <= cap);
            }
        }
    }
}
