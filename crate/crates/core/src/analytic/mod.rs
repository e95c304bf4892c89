//! Limit quantities of sparse random graphs: Poisson tails, core roots and
//! thresholds, the giant deep-component fraction, rank density and the
//! limiting weight of `k` disjoint spanning trees.
//!
//! Every function takes the mean degree `d` of `G(n, d/n)`. The uniform model
//! `G(n, m)` with `m = cn` edges corresponds to `d = 2c`.

mod poisson;
mod quad;

pub use poisson::{pois_pmf, pois_tail, truncated_mean};

use crate::error::{Error, Result};
use poisson::{pmf_unchecked, tail_unchecked};

/// Apéry's constant, the limit weight of a random MST with uniform weights.
pub const ZETA_3: f64 = 1.202_056_903_159_594_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Residual and bracketing tolerance for root finding.
    pub abs_tol: f64,
    pub max_iter: usize,
    /// Relative tolerance of the limit-weight quadrature.
    pub rel_tol: f64,
    /// The integrand is truncated once it drops below this.
    pub eps_tail: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_iter: 200,
            rel_tol: 1e-8,
            eps_tail: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.abs_tol) || !ok(self.rel_tol) || !ok(self.eps_tail) || self.max_iter == 0 {
            return Err(Error::invalid(format!(
                "solver tolerances must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

fn check_degree(d: f64) -> Result<()> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::invalid(format!(
            "mean degree {d} must be finite and >= 0"
        )));
    }
    Ok(())
}

/// Bisection for the sign change of `f` on `[lo, hi]`, where `f < 0` left of
/// the root. Runs until the bracket cannot shrink or `max_iter` is spent and
/// returns the endpoint with the smaller residual.
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, cfg: &SolverConfig) -> f64 {
    for _ in 0..cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Grows `hi` geometrically until `f(hi) >= 0`.
fn expand_upper<F: Fn(f64) -> f64>(f: &F, start: f64, cfg: &SolverConfig) -> Result<f64> {
    let mut hi = start.max(1.0);
    for _ in 0..cfg.max_iter {
        if f(hi) >= 0.0 {
            return Ok(hi);
        }
        hi *= 2.0;
    }
    Err(Error::DegenerateInput("no upper bracket found".into()))
}

/// `γ_k = min_λ λ / π_{k-1}(λ)` and the minimizing `λ`.
///
/// For `k = 2` the infimum is the limit at `λ -> 0`, returned as `(1, 0)`.
pub fn gamma_threshold(k: usize, cfg: &SolverConfig) -> Result<(f64, f64)> {
    let c = CoreCurve::new(k, cfg)?;
    Ok((c.gamma, c.argmin))
}

/// The curve `d = λ / π_{κ-1}(λ)` whose larger root is the `κ`-core
/// parameter, with its minimum precomputed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CoreCurve {
    kappa: usize,
    gamma: f64,
    argmin: f64,
}

impl CoreCurve {
    pub(crate) fn new(kappa: usize, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if kappa < 2 {
            return Err(Error::invalid(format!(
                "core order must be >= 2, got {kappa}"
            )));
        }
        if kappa == 2 {
            return Ok(Self {
                kappa,
                gamma: 1.0,
                argmin: 0.0,
            });
        }
        let phi = |l: f64| l / tail_unchecked(kappa - 1, l);
        // phi blows up at both ends; walk right until it turns upward.
        let step = 0.25;
        let (mut a, mut b) = (step, 2.0 * step);
        while phi(b + step) < phi(b) {
            a = b;
            b += step;
        }
        let mut hi = b + step;
        let mut lo = a;
        let inv = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - inv * (hi - lo);
        let mut x2 = lo + inv * (hi - lo);
        let (mut f1, mut f2) = (phi(x1), phi(x2));
        for _ in 0..cfg.max_iter {
            if hi - lo <= 1e-6 {
                break;
            }
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv * (hi - lo);
                f1 = phi(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv * (hi - lo);
                f2 = phi(x2);
            }
        }
        // Golden section stalls near 1e-8 relative accuracy on a flat
        // minimum; the sign of the derivative, pi - lambda * pmf, does not.
        let slope = |l: f64| l * pmf_unchecked(kappa - 2, l) - tail_unchecked(kappa - 1, l);
        let (lo, hi) = (lo - 1e-5, hi + 1e-5);
        let argmin = if slope(lo) < 0.0 && slope(hi) > 0.0 {
            bisect(slope, lo, hi, cfg)
        } else {
            0.5 * (lo + hi)
        };
        Ok(Self {
            kappa,
            gamma: phi(argmin),
            argmin,
        })
    }

    /// Larger root `λ` of `λ = d π_{κ-1}(λ)`.
    pub(crate) fn root(&self, d: f64, cfg: &SolverConfig) -> Result<f64> {
        check_degree(d)?;
        if d <= self.gamma + cfg.abs_tol {
            return Err(Error::BelowThreshold {
                k: self.kappa,
                d,
                gamma: self.gamma,
            });
        }
        let km1 = self.kappa - 1;
        // h < 0 strictly between the two roots and h(d) >= 0.
        Ok(bisect(
            |l| l - d * tail_unchecked(km1, l),
            self.argmin,
            d,
            cfg,
        ))
    }
}

/// `λ_k(d)`: the larger root of `λ = d π_{k-1}(λ)`. Requires `d > γ_k`.
pub fn lambda_root(k: usize, d: f64, cfg: &SolverConfig) -> Result<f64> {
    CoreCurve::new(k, cfg)?.root(d, cfg)
}

/// Limit size and density of the `κ`-core of `G(n, d/n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreLaw {
    /// `π_κ(λ_κ(d))`, zero below `γ_κ`.
    pub fraction: f64,
    /// `E_κ(λ_κ(d))`, zero below `γ_κ`.
    pub density: f64,
}

pub fn core_law(kappa: usize, d: f64, cfg: &SolverConfig) -> Result<CoreLaw> {
    match CoreCurve::new(kappa, cfg)?.root(d, cfg) {
        Ok(l) if l > 0.0 => Ok(CoreLaw {
            fraction: tail_unchecked(kappa, l),
            density: truncated_mean(kappa, l)?,
        }),
        Ok(_) | Err(Error::BelowThreshold { .. }) => Ok(CoreLaw {
            fraction: 0.0,
            density: 0.0,
        }),
        Err(e) => Err(e),
    }
}

/// The emergence point of the giant `k`-deeply connected component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeepThreshold {
    pub k: usize,
    /// Mean degree at which the `(k+1)`-core reaches density `2k`.
    pub d_star: f64,
    /// `λ_{k+1}(d_star)`.
    pub lambda_star: f64,
    /// `γ_{k+1}`, where the `(k+1)`-core appears.
    pub core_gamma: f64,
    /// Alternative characterisation: the mean degree `d` with
    /// `E_k(d) = 2k`, i.e. `(d/2) π_{k-1}(d) / π_k(d) = k`.
    pub fixed_point_d: f64,
    /// `d_star - fixed_point_d`.
    pub discrepancy: f64,
    /// Set when the core is already denser than `2k` when it appears; then
    /// `d_star = core_gamma`.
    pub degenerate: bool,
}

/// Full threshold report for `k >= 2`.
pub fn deep_threshold_info(k: usize, cfg: &SolverConfig) -> Result<DeepThreshold> {
    if k < 2 {
        return Err(Error::invalid(format!(
            "deep threshold needs k >= 2, got {k}"
        )));
    }
    let core = CoreCurve::new(k + 1, cfg)?;
    let target = 2.0 * k as f64;
    // Core density as a function of λ on the larger branch. It is increasing
    // in λ, and λ_{k+1}(d) is increasing in d, so solving in λ and mapping
    // back with d = λ / π_k(λ) gives the same point as bisecting in d.
    let excess = |l: f64| l * tail_unchecked(k, l) / tail_unchecked(k + 1, l) - target;
    let (lambda_star, degenerate) = if excess(core.argmin) >= 0.0 {
        (core.argmin, true)
    } else {
        let hi = expand_upper(&excess, core.argmin + 1.0, cfg)?;
        (bisect(excess, core.argmin, hi, cfg), false)
    };
    let d_star = if degenerate {
        core.gamma
    } else {
        lambda_star / tail_unchecked(k, lambda_star)
    };

    let alt = |d: f64| d * tail_unchecked(k - 1, d) / tail_unchecked(k, d) - target;
    let hi = expand_upper(&alt, target, cfg)?;
    let fixed_point_d = bisect(alt, 1e-9, hi, cfg);

    Ok(DeepThreshold {
        k,
        d_star,
        lambda_star,
        core_gamma: core.gamma,
        fixed_point_d,
        discrepancy: d_star - fixed_point_d,
        degenerate,
    })
}

/// `d*_k` in mean-degree units (see [`deep_threshold_info`]).
pub fn deep_threshold(k: usize, cfg: &SolverConfig) -> Result<f64> {
    Ok(deep_threshold_info(k, cfg)?.d_star)
}

/// `β_k` as a function of `d`, with the threshold and core curve cached.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BetaCurve {
    k: usize,
    threshold: f64,
    core: CoreCurve,
}

impl BetaCurve {
    pub(crate) fn new(k: usize, cfg: &SolverConfig) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k must be >= 1"));
        }
        let threshold = if k == 1 { 1.0 } else { deep_threshold(k, cfg)? };
        Ok(Self {
            k,
            threshold,
            core: CoreCurve::new(k + 1, cfg)?,
        })
    }

    pub(crate) fn threshold(&self) -> f64 {
        self.threshold
    }

    fn below(&self, d: f64) -> bool {
        if self.k == 1 {
            d <= self.threshold
        } else {
            d < self.threshold
        }
    }

    /// `λ_{k+1}(d)` on the supercritical side, `None` below the threshold.
    pub(crate) fn lambda(&self, d: f64, cfg: &SolverConfig) -> Result<Option<f64>> {
        check_degree(d)?;
        if self.below(d) {
            return Ok(None);
        }
        match self.core.root(d, cfg) {
            Ok(l) => Ok(Some(l)),
            // Only reachable within abs_tol of a degenerate threshold.
            Err(Error::BelowThreshold { .. }) => Ok(Some(self.core.argmin.max(0.0))),
            Err(e) => Err(e),
        }
    }

    pub(crate) fn value(&self, d: f64, cfg: &SolverConfig) -> Result<f64> {
        Ok(match self.lambda(d, cfg)? {
            Some(l) if d > 0.0 => (l / d).clamp(0.0, 1.0),
            _ => 0.0,
        })
    }
}

/// Fraction of vertices in the giant `k`-deeply connected component of
/// `G(n, d/n)`: 0 below the threshold, `λ_{k+1}(d)/d` above it. The value
/// solves `β = π_k(β d)`.
pub fn beta(k: usize, d: f64, cfg: &SolverConfig) -> Result<f64> {
    BetaCurve::new(k, cfg)?.value(d, cfg)
}

fn rank_density_on(curve: &BetaCurve, d: f64, cfg: &SolverConfig) -> Result<f64> {
    let c = d / 2.0;
    Ok(match curve.lambda(d, cfg)? {
        None => c,
        Some(l) => {
            let k = curve.k;
            c - l * tail_unchecked(k, l) / 2.0 + k as f64 * tail_unchecked(k + 1, l)
        }
    })
}

/// Limit of `rank / n` in the union of `k` graphic matroids on `G(n, m)` with
/// mean degree `d = 2m/n`.
pub fn rank_density(k: usize, d: f64, cfg: &SolverConfig) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid(format!(
            "rank density needs k >= 2, got {k}"
        )));
    }
    rank_density_on(&BetaCurve::new(k, cfg)?, d, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitWeight {
    pub k: usize,
    pub a: f64,
    pub value: f64,
    pub error_estimate: f64,
    /// Upper end of the truncated integration range.
    pub x_max: f64,
}

/// Limit weight of the cheapest union of `k` edge-disjoint spanning trees in
/// `K_n` with i.i.d. weights whose density at 0 is `a`:
/// `(1/2a) ∫ x (1 - β_k(x)^2) dx`.
pub fn limit_weight_info(k: usize, a: f64, cfg: &SolverConfig) -> Result<LimitWeight> {
    cfg.validate()?;
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::invalid(format!(
            "density slope {a} must be positive"
        )));
    }
    let curve = BetaCurve::new(k, cfg)?;
    let t = curve.threshold();
    let integrand = |x: f64| {
        let b = curve.value(x, cfg).unwrap_or(0.0);
        x * (1.0 - b * b)
    };

    let cap = (10 * k).max(50) as f64;
    let mut x_max = t.ceil().max(t + 1.0);
    while x_max < cap && integrand(x_max) >= cfg.eps_tail {
        x_max += 1.0;
    }
    let x_max = x_max.min(cap);

    let scale = (t * t / 2.0).max(1.0);
    let left = quad::simpson(&|x: f64| x, 0.0, t, cfg.rel_tol * scale);
    let right = quad::simpson(&integrand, t, x_max, cfg.rel_tol * scale);
    let integral = left.value + right.value;
    let tail_bound = integrand(x_max) * 2.0;
    Ok(LimitWeight {
        k,
        a,
        value: integral / (2.0 * a),
        error_estimate: (left.error + right.error + tail_bound) / (2.0 * a),
        x_max,
    })
}

pub fn limit_weight(k: usize, a: f64, cfg: &SolverConfig) -> Result<f64> {
    Ok(limit_weight_info(k, a, cfg)?.value)
}

/// Every limit quantity at one `(k, d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticTable {
    pub k: usize,
    pub d: f64,
    /// `λ_{k+1}(d)`, absent below `γ_{k+1}`.
    pub lambda: Option<f64>,
    /// `π_k(λ)`; equals `beta` above the deep threshold.
    pub pi_k: f64,
    pub beta: f64,
    /// Absent for `k = 1`.
    pub rank_density: Option<f64>,
    /// `π_{k+1}(λ)`: fraction of vertices in the `(k+1)`-core.
    pub core_fraction: f64,
    /// `E_{k+1}(λ)`: mean degree inside the `(k+1)`-core.
    pub core_density: Option<f64>,
    pub deep_threshold: f64,
    pub core_gamma: f64,
}

pub fn analytic_table(k: usize, d: f64, cfg: &SolverConfig) -> Result<AnalyticTable> {
    check_degree(d)?;
    let curve = BetaCurve::new(k, cfg)?;
    let lambda = match curve.core.root(d, cfg) {
        Ok(l) => Some(l),
        Err(Error::BelowThreshold { .. }) => None,
        Err(e) => return Err(e),
    };
    let (pi_k, core_fraction, core_density) = match lambda {
        Some(l) if l > 0.0 => (
            tail_unchecked(k, l),
            tail_unchecked(k + 1, l),
            truncated_mean(k + 1, l).ok(),
        ),
        _ => (0.0, 0.0, None),
    };
    let rank_density = if k >= 2 {
        Some(rank_density_on(&curve, d, cfg)?)
    } else {
        None
    };
    Ok(AnalyticTable {
        k,
        d,
        lambda,
        pi_k,
        beta: curve.value(d, cfg)?,
        rank_density,
        core_fraction,
        core_density,
        deep_threshold: curve.threshold(),
        core_gamma: curve.core.gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    fn grid_min(k: usize) -> f64 {
        let mut best = f64::INFINITY;
        let mut l = 1e-4;
        while l < 20.0 {
            best = best.min(l / pois_tail(k - 1, l).unwrap());
            l += 1e-4;
        }
        best
    }

    #[test]
    fn gamma_matches_grid_scan() {
        assert_eq!(gamma_threshold(2, &cfg()).unwrap(), (1.0, 0.0));
        let (g3, a3) = gamma_threshold(3, &cfg()).unwrap();
        assert!(g3 > 3.3 && g3 < 3.4, "{g3}");
        assert!((g3 - grid_min(3)).abs() < 1e-7);
        assert!((a3 / pois_tail(2, a3).unwrap() - g3).abs() < 1e-14);
        let (g4, _) = gamma_threshold(4, &cfg()).unwrap();
        assert!((g4 - grid_min(4)).abs() < 1e-7);
        assert!(g4 > g3);
        assert!(gamma_threshold(1, &cfg()).is_err());
    }

    #[test]
    fn lambda_root_residuals_and_scan() {
        let l = lambda_root(3, 5.0, &cfg()).unwrap();
        assert!((l - 5.0 * pois_tail(2, l).unwrap()).abs() <= 1e-12);
        assert!(lambda_root(2, 50.0, &cfg()).unwrap() / 50.0 > 0.999);

        // Largest sign change of λ - 4 π_2(λ) on a 1e-6 grid.
        let f = |x: f64| x - 4.0 * pois_tail(2, x).unwrap();
        let mut x = 4.0;
        while f(x) >= 0.0 {
            x -= 1e-6;
        }
        let ours = lambda_root(3, 4.0, &cfg()).unwrap();
        assert!((ours - x).abs() < 2e-6, "{ours} vs {x}");

        let (g3, _) = gamma_threshold(3, &cfg()).unwrap();
        assert!(matches!(
            lambda_root(3, g3 - 0.1, &cfg()),
            Err(Error::BelowThreshold { .. })
        ));
        assert!(matches!(
            lambda_root(2, 1.0, &cfg()),
            Err(Error::BelowThreshold { .. })
        ));
    }

    #[test]
    fn deep_threshold_properties() {
        let info = deep_threshold_info(2, &cfg()).unwrap();
        assert!(!info.degenerate);
        assert!(info.d_star > info.core_gamma);
        let l = lambda_root(3, info.d_star, &cfg()).unwrap();
        assert!((truncated_mean(3, l).unwrap() - 4.0).abs() < 1e-9);

        // Scan E_3(λ_3(d)) - 4 in d for the first crossing.
        let mut d = info.core_gamma + 1e-5;
        while truncated_mean(3, lambda_root(3, d, &cfg()).unwrap()).unwrap() < 4.0 {
            d += 1e-5;
        }
        assert!((d - info.d_star).abs() < 2e-5, "{d} vs {}", info.d_star);

        let d3 = deep_threshold(3, &cfg()).unwrap();
        assert!(d3 > info.d_star);
        assert!(info.fixed_point_d > 0.0);
        assert!((info.discrepancy - (info.d_star - info.fixed_point_d)).abs() < 1e-15);
        assert!(deep_threshold(1, &cfg()).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta(1, 0.5, &cfg()).unwrap(), 0.0);
        assert_eq!(beta(1, 1.0, &cfg()).unwrap(), 0.0);
        assert!(beta(2, 50.0, &cfg()).unwrap() > 0.999);
        let ds = deep_threshold(2, &cfg()).unwrap();
        let b = beta(2, ds + 1.0, &cfg()).unwrap();
        assert!((b - pois_tail(2, b * (ds + 1.0)).unwrap()).abs() <= 1e-10);
        let jump = beta(2, ds + 1e-6, &cfg()).unwrap() - beta(2, ds - 1e-6, &cfg()).unwrap();
        assert!(jump > 0.1, "{jump}");
        // Giant component of G(n, 2/n): 1 - β = e^{-2β}.
        let b1 = beta(1, 2.0, &cfg()).unwrap();
        assert!((1.0 - b1 - (-2.0 * b1).exp()).abs() < 1e-12);
    }

    #[test]
    fn beta_is_monotone_above_threshold() {
        let ds = deep_threshold(2, &cfg()).unwrap();
        let mut prev = 0.0;
        for i in 0..60 {
            let b = beta(2, ds + 0.2 * i as f64, &cfg()).unwrap();
            assert!(b >= prev);
            assert!((0.0..=1.0).contains(&b));
            prev = b;
        }
    }

    #[test]
    fn rank_density_properties() {
        let c = cfg();
        let ds = deep_threshold(2, &c).unwrap();
        assert_eq!(rank_density(2, 2.0, &c).unwrap(), 1.0);
        assert!((rank_density(2, 100.0, &c).unwrap() - 2.0).abs() < 1e-2);
        let left = rank_density(2, ds - 1e-12, &c).unwrap();
        let right = rank_density(2, ds, &c).unwrap();
        assert!((left - right).abs() < 1e-8, "{left} vs {right}");
        for k in 2..5 {
            for i in 0..80 {
                let d = 0.25 * i as f64;
                let r = rank_density(k, d, &c).unwrap();
                assert!(r <= (d / 2.0).min(k as f64) + 1e-12, "k {k} d {d} r {r}");
            }
        }
        // d r / d c = 1 - β^2 with c = d / 2.
        let d = ds + 2.0;
        let h = 1e-4;
        let fd = (rank_density(2, d + 2.0 * h, &c).unwrap()
            - rank_density(2, d - 2.0 * h, &c).unwrap())
            / (2.0 * h);
        let b = beta(2, d, &c).unwrap();
        assert!((fd - (1.0 - b * b)).abs() < 1e-5);
    }

    #[test]
    fn limit_weight_examples() {
        let c = cfg();
        let w1 = limit_weight_info(1, 1.0, &c).unwrap();
        assert!((w1.value - ZETA_3).abs() < 1e-6, "{}", w1.value);
        assert!(w1.error_estimate < 1e-6);
        for k in 1..4 {
            let one = limit_weight(k, 1.0, &c).unwrap();
            assert_eq!(limit_weight(k, 2.0, &c).unwrap(), one / 2.0);
            assert!(limit_weight(k, 3.0, &c).unwrap() < one);
        }
        let w2 = limit_weight(2, 1.0, &c).unwrap();
        let w3 = limit_weight(3, 1.0, &c).unwrap();
        assert!(w2 > ZETA_3 && w3 > w2);
        assert!(limit_weight(1, 0.0, &c).is_err());
        assert!(limit_weight(0, 1.0, &c).is_err());
    }

    #[test]
    fn table_is_consistent() {
        let c = cfg();
        let ds = deep_threshold(2, &c).unwrap();
        let t = analytic_table(2, ds + 1.0, &c).unwrap();
        assert!((t.pi_k - t.beta).abs() < 1e-12);
        assert!(t.core_fraction <= t.beta);
        assert!(t.core_density.unwrap() > 4.0);
        let below = analytic_table(2, 1.0, &c).unwrap();
        assert_eq!(below.lambda, None);
        assert_eq!(below.beta, 0.0);
        assert_eq!(below.rank_density, Some(0.5));
        assert!(analytic_table(1, 3.0, &c).unwrap().rank_density.is_none());
        assert!(SolverConfig { abs_tol: 0.0, ..c }.validate().is_err());
    }
}
