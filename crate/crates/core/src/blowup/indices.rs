//! Exponent bookkeeping for the blow-up rate argument at regularity
//! `s_r + eps`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// Exponents used on the `eps < 2` branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndexChain {
    /// The chosen value of `2n / r1`.
    pub x: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub r5: f64,
    pub mu: f64,
    pub nu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndexSelection {
    pub n: usize,
    pub eps: f64,
    pub r: f64,
    /// Summability index of the controlled norm: `r` for `eps < 2`, one at `eps = 2`.
    pub r_tilde: f64,
    /// `None` on the `eps = 2` branch, which needs no auxiliary exponents.
    pub chain: Option<IndexChain>,
    /// `(eps - 1/2) / (eps - 1 + n/2)`.
    pub lambda: f64,
}

fn q(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite value")
}

fn qi(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn f(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// The chain in exact rational arithmetic, as reciprocals.
struct Exact {
    lo: BigRational,
    hi: BigRational,
    x: BigRational,
    inv_r: BigRational,
    inv_r1: BigRational,
    inv_r2: BigRational,
    inv_r3: BigRational,
    inv_r4: BigRational,
    inv_r5: BigRational,
    /// `(n + 2(r - 1)) / (r n)`.
    inv_low: BigRational,
    /// `s_r + eps - 1`.
    reg: BigRational,
    mu: BigRational,
    nu: BigRational,
    alpha: BigRational,
    r: BigRational,
}

impl Exact {
    fn new(n: usize, eps: f64, r: f64, x: f64) -> Self {
        let nn = qi(n as i64);
        let (e, rr, x) = (q(eps), q(r), q(x));
        let two = qi(2);
        let one = qi(1);
        let inv_r = one.clone() / rr.clone();
        let lo_a = &two * &nn / &rr - qi(4) / &rr;
        let lo_b = &two * &nn / &rr - &two + &e;
        let hi_a = &two * &nn / &rr;
        let hi_b = &two * &nn / &rr - &two / &rr + &e;
        let lo = if lo_a > lo_b { lo_a } else { lo_b };
        let hi = if hi_a < hi_b { hi_a } else { hi_b };
        let reg = &nn / &rr - &one + &e - &one;
        let inv_r1 = &x / (&two * &nn);
        let inv_r2 = &inv_r1 - &reg / &nn;
        let inv_r3 = &inv_r1 + &inv_r2;
        let inv_r4 = (&one - &inv_r3) / (&rr - &one);
        let inv_r5 = (&nn - &two) / (&rr * &nn);
        let inv_low = (&nn + &two * (&rr - &one)) / (&rr * &nn);
        let half_rn = &rr * &nn / &two;
        let mu = &half_rn * (&inv_r4 - &inv_r5);
        let nu = &half_rn * (&inv_r1 - &inv_r5);
        let alpha = &one + &rr * &e / &two;
        Exact {
            lo,
            hi,
            x,
            inv_r,
            inv_r1,
            inv_r2,
            inv_r3,
            inv_r4,
            inv_r5,
            inv_low,
            reg,
            mu,
            nu,
            alpha,
            r: rr,
        }
    }

    fn residual(&self) -> BigRational {
        (&self.r - qi(1)) * &self.mu + qi(2) * &self.nu - &self.alpha
    }
}

/// The open interval of admissible values of `2n / r1`.
pub fn admissible_interval(n: usize, eps: f64, r: f64) -> (f64, f64) {
    let nf = n as f64;
    let lo = (2.0 * nf / r - 4.0 / r).max(2.0 * nf / r - 2.0 + eps);
    let hi = (2.0 * nf / r).min(2.0 * nf / r - 2.0 / r + eps);
    (lo, hi)
}

/// `s_r = -1 + n / r`.
fn critical(n: usize, r: f64) -> f64 {
    -1.0 + n as f64 / r
}

fn check_branch(n: usize, eps: f64, r: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::param(format!("index selection needs n >= 3, got {n}")));
    }
    if !(1.0..=2.0).contains(&eps) {
        return Err(Error::param(format!("eps must lie in [1, 2], got {eps}")));
    }
    if !(r >= 2.0 && r.is_finite()) {
        return Err(Error::param(format!("r must lie in [2, inf), got {r}")));
    }
    // r < n / (2 - eps), decided exactly
    if eps < 2.0 && q(r) * (qi(2) - q(eps)) >= qi(n as i64) {
        return Err(Error::param(format!(
            "r must be below n / (2 - eps) = {}, got {r}",
            n as f64 / (2.0 - eps)
        )));
    }
    Ok(())
}

/// Selection with `2n / r1` at the midpoint of the admissible interval.
pub fn select_indices(n: usize, eps: f64, r: f64) -> Result<IndexSelection> {
    check_branch(n, eps, r)?;
    if eps == 2.0 {
        return Ok(IndexSelection {
            n,
            eps,
            r,
            r_tilde: 1.0,
            chain: None,
            lambda: lambda(n, eps),
        });
    }
    let (lo, hi) = admissible_interval(n, eps, r);
    select_indices_at(n, eps, r, 0.5 * (lo + hi))
}

/// Selection with `2n / r1 = x`, which must lie inside the admissible interval.
pub fn select_indices_at(n: usize, eps: f64, r: f64, x: f64) -> Result<IndexSelection> {
    check_branch(n, eps, r)?;
    if eps == 2.0 {
        return Err(Error::param("the eps = 2 branch has no r1"));
    }
    let ex = Exact::new(n, eps, r, x);
    if ex.lo >= ex.hi {
        return Err(Error::EmptyInterval(format!(
            "n = {n}, eps = {eps}, r = {r}: ({}, {})",
            f(&ex.lo),
            f(&ex.hi)
        )));
    }
    if !(ex.x > ex.lo && ex.x < ex.hi) {
        return Err(Error::param(format!("2n/r1 = {x} outside ({}, {})", f(&ex.lo), f(&ex.hi))));
    }
    let inv = |v: &BigRational| 1.0 / f(v);
    let chain = IndexChain {
        x,
        r1: inv(&ex.inv_r1),
        r2: inv(&ex.inv_r2),
        r3: inv(&ex.inv_r3),
        r4: inv(&ex.inv_r4),
        r5: inv(&ex.inv_r5),
        mu: f(&ex.mu),
        nu: f(&ex.nu),
    };
    let sel = IndexSelection {
        n,
        eps,
        r,
        r_tilde: r,
        chain: Some(chain),
        lambda: lambda(n, eps),
    };
    let bad = sel.violations_of(&ex);
    if !bad.is_empty() {
        return Err(Error::EmptyInterval(bad.join("; ")));
    }
    Ok(sel)
}

/// `(eps - 1/2) / (eps - 1 + n/2)`.
pub fn lambda(n: usize, eps: f64) -> f64 {
    (eps - 0.5) / (eps - 1.0 + 0.5 * n as f64)
}

/// `(eps - 1) / (eps - 1 + n/2)`, the weight of the variant that controls
/// `L^inf` instead of `B^{-1/2}_{inf,inf}`.
pub fn lambda_linf(n: usize, eps: f64) -> f64 {
    (eps - 1.0) / (eps - 1.0 + 0.5 * n as f64)
}

/// `alpha = 1 + r eps / 2`.
pub fn alpha(r: f64, eps: f64) -> f64 {
    1.0 + 0.5 * r * eps
}

/// `beta = r (2 - eps) / 2`.
pub fn beta(r: f64, eps: f64) -> f64 {
    0.5 * r * (2.0 - eps)
}

impl IndexSelection {
    /// Every violated invariant, described; empty when the selection is
    /// valid. The checks run in exact rational arithmetic.
    pub fn violations(&self) -> Vec<String> {
        match self.chain {
            Some(c) => self.violations_of(&Exact::new(self.n, self.eps, self.r, c.x)),
            None => Vec::new(),
        }
    }

    fn violations_of(&self, ex: &Exact) -> Vec<String> {
        let mut out = Vec::new();
        let Some(c) = self.chain else {
            return out;
        };
        if !(ex.x > ex.lo && ex.x < ex.hi) {
            out.push(format!("2n/r1 = {} outside ({}, {})", c.x, f(&ex.lo), f(&ex.hi)));
        }
        // r n/(n + 2(r-1)) < r3 < r < r1 < r5, in reciprocals
        let chain = [&ex.inv_low, &ex.inv_r3, &ex.inv_r, &ex.inv_r1, &ex.inv_r5];
        if !chain.windows(2).all(|w| w[0] > w[1]) {
            out.push(format!(
                "ordering r n/(n + 2(r-1)) < r3 < r < r1 < r5 fails: {:?}",
                chain.map(|v| 1.0 / f(v))
            ));
        }
        if !(ex.inv_r4 < ex.inv_r && ex.inv_r4 > ex.inv_r5) {
            out.push(format!("r4 = {} outside (r, r5)", c.r4));
        }
        let nn = qi(self.n as i64);
        if -&nn * &ex.inv_r2 != &ex.reg - &nn * &ex.inv_r1 {
            out.push("r2 scaling relation fails".into());
        }
        let (zero, one) = (qi(0), qi(1));
        for (name, v) in [("mu", &ex.mu), ("nu", &ex.nu)] {
            if !(*v > zero && *v < one) {
                out.push(format!("{name} = {} outside (0, 1)", f(v)));
            }
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            out.push(format!("lambda = {} outside (0, 1)", self.lambda));
        }
        let residual = f(&ex.residual()).abs();
        if residual > 1e-12 {
            out.push(format!("exponent identity residual {residual:e}"));
        }
        out
    }

    pub fn alpha(&self) -> f64 {
        alpha(self.r, self.eps)
    }

    pub fn beta(&self) -> f64 {
        beta(self.r, self.eps)
    }

    /// Regularity `s_r + eps - 1` of the vorticity norm.
    pub fn vorticity_regularity(&self) -> f64 {
        critical(self.n, self.r) + self.eps - 1.0
    }

    /// Exponent `gamma` of the differential inequality `X' <= c X^{1 + gamma}`:
    /// `2 / (r eps)` for `X = ||omega||^r`, one at `eps = 2`.
    pub fn gamma(&self) -> f64 {
        if self.chain.is_some() {
            2.0 / (self.r * self.eps)
        } else {
            1.0
        }
    }
}

/// `|(r - 1) mu + 2 nu - 1 - r eps / 2|`, evaluated exactly from the
/// selection's inputs; zero on the `eps = 2` branch.
pub fn exponent_identity_check(sel: &IndexSelection) -> f64 {
    match sel.chain {
        Some(c) => f(&Exact::new(sel.n, sel.eps, sel.r, c.x).residual()).abs(),
        None => 0.0,
    }
}

/// `|(r - 1) mu + 2 nu - 1 - r eps / 2|` with the stored floating-point
/// weights, relative to `1 + r eps / 2`.
pub fn exponent_identity_rounding(sel: &IndexSelection) -> f64 {
    match sel.chain {
        Some(c) => {
            let a = alpha(sel.r, sel.eps);
            ((sel.r - 1.0) * c.mu + 2.0 * c.nu - a).abs() / a
        }
        None => 0.0,
    }
}

/// Which interpolation route bounds `||omega||_{L^{r2}}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NuBranch {
    /// `r2 >= r5`: one geometric interpolation at integrability `r2`, weight `nu`.
    Direct,
    /// `r2 < r5`: geometric interpolation with weight `rho`, then Hölder
    /// between `r` and `r5` with weight `sigma`.
    Split { rho: f64, sigma: f64 },
}

/// Weights `(nu, branch)` for the `L^{r2}` part of the `nu` interpolation.
pub fn nu_branch(sel: &IndexSelection) -> Option<(f64, NuBranch)> {
    let c = sel.chain?;
    if c.r2 >= c.r5 {
        return Some((c.nu, NuBranch::Direct));
    }
    let s = sel.vorticity_regularity();
    let s2 = critical(sel.n, c.r2) + sel.eps - 1.0;
    let rho = s / (s - s2);
    let sigma = (1.0 / c.r2 - 1.0 / c.r5) / (1.0 / sel.r - 1.0 / c.r5);
    Some((c.nu, NuBranch::Split { rho, sigma }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_triple() {
        let sel = select_indices(3, 1.0, 2.0).unwrap();
        let c = sel.chain.unwrap();
        assert!((c.r1 - 2.4).abs() < 1e-14);
        assert!((c.r2 - 4.0).abs() < 1e-13);
        assert!((c.r3 - 1.5).abs() < 1e-14);
        assert!((c.r4 - 3.0).abs() < 1e-13);
        assert!((c.r5 - 6.0).abs() < 1e-14);
        assert!((c.mu - 0.5).abs() < 1e-13);
        assert!((c.nu - 0.75).abs() < 1e-13);
        assert!(exponent_identity_check(&sel) < 1e-14);
        assert_eq!(admissible_interval(3, 1.0, 2.0), (2.0, 3.0));
    }

    #[test]
    fn boundary_of_r_is_rejected() {
        let eps = 2.0 - 1e-9;
        let edge = 3.0 / (2.0 - eps);
        assert!(select_indices(3, eps, edge).is_err());
        let mid = select_indices(3, eps, 0.5 * edge);
        assert!(mid.is_ok(), "{mid:?}");
        assert!(select_indices(2, 1.0, 2.0).is_err());
        assert!(select_indices(3, 1.0, 1.5).is_err());
    }

    #[test]
    fn eps_two_branch() {
        let sel = select_indices(3, 2.0, 7.0).unwrap();
        assert!(sel.chain.is_none());
        assert_eq!(sel.r_tilde, 1.0);
        assert_eq!(sel.beta(), 0.0);
        assert_eq!(sel.gamma(), 1.0);
    }

    #[test]
    fn nu_branches_agree_with_scaling() {
        for (n, eps, r) in [(3, 1.0, 2.0), (3, 1.5, 4.0), (4, 1.2, 3.0), (5, 1.9, 20.0), (3, 1.1, 2.5)] {
            let sel = select_indices(n, eps, r).unwrap();
            let (nu, branch) = nu_branch(&sel).unwrap();
            if let NuBranch::Split { rho, sigma } = branch {
                assert!(rho > 0.0 && rho < 1.0 && sigma > 0.0 && sigma < 1.0);
                assert!((rho + (1.0 - rho) * sigma - nu).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn footnote_exponents_sum() {
        for (r, eps) in [(2.0, 1.0), (3.5, 1.7), (10.0, 2.0)] {
            assert!((alpha(r, eps) + beta(r, eps) - (r + 1.0)).abs() < 1e-14);
        }
        assert!((lambda(3, 1.0) - 1.0 / 3.0).abs() < 1e-15);
    }
}
