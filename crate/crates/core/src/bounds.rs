//! Numerical evaluators, in natural-log space, for the size and counting
//! bounds attached to critical sets and partial Latin square censuses,
//! together with the helper inequalities they rest on.
//!
//! Anything that can overflow lives in log space; exact integer counts are
//! converted with [`log_of_biguint`], which keeps the conversion error far
//! below the comparison tolerance [`SLACK_TOL`].

use num_bigint::BigUint;
use thiserror::Error;

use crate::model::Shape;

/// Comparison slack tolerance: a bound "holds" against an oracle when
/// bound - oracle >= -SLACK_TOL in log space.
pub const SLACK_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("log_gamma domain: argument {0} is below 0.5")]
    GammaDomain(f64),
}

// Lanczos coefficients, g = 7, 9 terms; published digits kept verbatim.
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

// ln(2 pi) / 2
#[allow(clippy::excessive_precision)]
const HALF_LOG_TWO_PI: f64 = 0.918_938_533_204_672_741_8;

/// ln Gamma(x) for x >= 0.5 by the Lanczos approximation; absolute error
/// well below 1e-10 over [0.5, 1e7].
pub fn log_gamma(x: f64) -> Result<f64, BoundsError> {
    if x.is_nan() || x < 0.5 {
        return Err(BoundsError::GammaDomain(x));
    }
    Ok(lg(x))
}

/// Internal log-gamma; every in-crate caller passes arguments >= 1.
pub(crate) fn lg(x: f64) -> f64 {
    debug_assert!(x >= 0.5);
    let z = x - 1.0;
    let mut series = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + 7.5;
    HALF_LOG_TWO_PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// ln n! via log-gamma.
pub fn log_factorial(n: u64) -> f64 {
    lg(n as f64 + 1.0)
}

/// n! as an exact integer.
pub fn factorial_big(n: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 2..=n {
        acc *= BigUint::from(i);
    }
    acc
}

/// C(a, b) as an exact integer.
pub fn binomial_big(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::from(0u32);
    }
    let b = b.min(a - b);
    let mut acc = BigUint::from(1u32);
    for i in 0..b {
        acc *= BigUint::from(a - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// Natural log of a positive big integer, from the top 64 bits of the
/// mantissa; relative error around 1e-16, far below every tolerance used
/// here. Returns negative infinity for zero.
pub fn log_of_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 63 {
        let digits = x.to_u64_digits();
        return (digits[0] as f64).ln();
    }
    let shift = (bits - 64) as usize;
    let top = (x >> shift).to_u64_digits()[0];
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// ln C(a, b) computed exactly through big integers.
pub fn exact_log_binomial(a: u64, b: u64) -> f64 {
    log_of_biguint(&binomial_big(a, b))
}

/// Both sides of the Stirling bracket
/// sqrt(2 pi n) (n/e)^n <= n! <= sqrt(2 pi n) (n/e)^n e^(1/(12n)),
/// in log space.
pub fn stirling_log_factorial_bounds(n: u64) -> (f64, f64) {
    assert!(n >= 1);
    let nf = n as f64;
    let lower = 0.5 * (2.0 * std::f64::consts::PI * nf).ln() + nf * (nf.ln() - 1.0);
    (lower, lower + 1.0 / (12.0 * nf))
}

/// log of (e a / b)^b, an upper bound for C(a, b); zero when b = 0.
pub fn log_binomial_upper(a: u64, b: u64) -> f64 {
    assert!(b <= a, "b must lie in 0..=a");
    if b == 0 {
        return 0.0;
    }
    let (a, b) = (a as f64, b as f64);
    b * (1.0 + a.ln() - b.ln())
}

/// Expected size of the uniquely completable set the randomized
/// construction produces: n^2 (1 - (2n-2)!! / (2n-1)!!), the
/// double-factorial ratio being a Wallis-type product.
pub fn expected_uc_size(n: u64) -> f64 {
    let mut ratio = 1.0f64;
    for i in 1..n {
        ratio *= (2 * i) as f64 / (2 * i + 1) as f64;
    }
    let nf = n as f64;
    nf * nf * (1.0 - ratio)
}

/// n^2 - n sqrt(n pi) / 2: every Latin square of order n has a critical
/// set strictly smaller than this.
pub fn scs_upper_bound(n: u64) -> f64 {
    let nf = n as f64;
    nf * nf - nf * (nf * std::f64::consts::PI).sqrt() / 2.0
}

/// Upper bound, in log space, for the number of partial Latin squares of
/// a given shape: a per-row permanent bound times a per-column factorial
/// product.
pub fn shape_count_bound(shape: &Shape) -> f64 {
    let n = shape.order() as f64;
    let log_n_fact = lg(n + 1.0);
    let mut total = 0.0;
    for &r in shape.row_counts() {
        let rf = r as f64;
        total += (n - rf) / n * log_n_fact - lg(n - rf + 1.0);
    }
    for &c in shape.col_counts() {
        for j in 0..c {
            let m = n - j as f64;
            total += lg(m + 1.0) / m;
        }
    }
    total
}

/// Upper bound, in log space, for the number of partial Latin squares of
/// order n and size k:
/// C(n^2, k) * n!^(2n - k/n) * e^(n (3 + ln(2 pi n)^2 / 4)) /
/// ((n - k/n)!^(2n) * e^k).
pub fn size_count_bound(n: u64, k: u64) -> f64 {
    assert!(k <= n * n, "size k must lie in 0..=n^2");
    let nf = n as f64;
    let kf = k as f64;
    let log_n_fact = lg(nf + 1.0);
    let log_2pin = (2.0 * std::f64::consts::PI * nf).ln();
    exact_log_binomial(n * n, k)
        + (2.0 * nf - kf / nf) * log_n_fact
        + nf * (3.0 + log_2pin * log_2pin / 4.0)
        - 2.0 * nf * lg(nf - kf / nf + 1.0)
        - kf
}

/// ln of the van der Waerden consequence (n!)^(2n) / n^(n^2), a lower
/// bound for the number of Latin squares of order n.
pub fn latin_count_log_lower(n: u64) -> f64 {
    let nf = n as f64;
    2.0 * nf * lg(nf + 1.0) - nf * nf * nf.ln()
}

/// Log-gap of the density inequality c^(3c) n^c <= e^(3c) e^(ln(2 pi n)^2 / n)
/// at empty-cell density c: 3c ln c + c ln n - 3c - ln(2 pi n)^2 / n.
/// Nonpositive values mean the inequality holds at (n, c).
pub fn density_inequality_gap(n: u64, c: f64) -> f64 {
    assert!(c > 0.0 && c < 1.0, "density must lie strictly in (0, 1)");
    let nf = n as f64;
    let log_2pin = (2.0 * std::f64::consts::PI * nf).ln();
    3.0 * c * c.ln() + c * nf.ln() - 3.0 * c - log_2pin * log_2pin / nf
}

/// Root of the density inequality and the size lower bound it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundSolution {
    pub n: u64,
    /// Empty-cell density at which the gap crosses zero (or, without a
    /// bracket, the largest feasible density found by scanning).
    pub c: f64,
    /// n^2 (1 - c).
    pub k_lower: f64,
    /// Gap value at `c`.
    pub gap: f64,
    /// True when a sign change bracketed the root; false when the
    /// fallback scan was used.
    pub bracketed: bool,
}

/// Bisection tolerance for [`solve_lower_bound`].
pub const GAP_TOL: f64 = 1e-12;

/// Solves density_inequality_gap(n, c) = 0 for c in [n^(-1/3), 1).
///
/// The gap is negative at c = n^(-1/3) (there it reduces to
/// -3c - ln(2 pi n)^2 / n) and increasing in c on that range, so whenever
/// the gap is positive near 1 the root is bracketed and bisection
/// converges to |gap| <= 1e-12. For small n with no sign change, the
/// fallback scans (0, 1) for the largest feasible density instead.
pub fn solve_lower_bound(n: u64) -> LowerBoundSolution {
    assert!(n >= 2, "order must be at least 2");
    let nf = n as f64;
    let lo0 = nf.powf(-1.0 / 3.0);
    let hi0 = 1.0 - 1e-9;
    let k_lower = |c: f64| nf * nf * (1.0 - c);
    if density_inequality_gap(n, lo0) < 0.0 && density_inequality_gap(n, hi0) > 0.0 {
        let (mut lo, mut hi) = (lo0, hi0);
        let mut mid = 0.5 * (lo + hi);
        let mut gap = density_inequality_gap(n, mid);
        for _ in 0..200 {
            if gap.abs() <= GAP_TOL {
                break;
            }
            if gap < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            mid = 0.5 * (lo + hi);
            gap = density_inequality_gap(n, mid);
        }
        LowerBoundSolution {
            n,
            c: mid,
            k_lower: k_lower(mid),
            gap,
            bracketed: true,
        }
    } else {
        // Outside the asymptotic regime: report the supremum of feasible
        // densities on a fine grid.
        let steps = 1_000_000u32;
        let mut best = lo0.min(hi0);
        for i in (1..steps).rev() {
            let c = i as f64 / steps as f64;
            if density_inequality_gap(n, c) <= 0.0 {
                best = c;
                break;
            }
        }
        LowerBoundSolution {
            n,
            c: best,
            k_lower: k_lower(best),
            gap: density_inequality_gap(n, best),
            bracketed: false,
        }
    }
}

/// Reference lower bound for the size of the largest critical set:
/// n^2 (1 - (2 + ln 2)/ln n) + n (1 + (2 ln 2 + ln 2 pi)/ln n) - ln 2/ln n.
pub fn lcs_lower_bound(n: u64) -> f64 {
    assert!(n >= 2, "order must be at least 2");
    let nf = n as f64;
    let ln_n = nf.ln();
    let ln2 = std::f64::consts::LN_2;
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    nf * nf * (1.0 - (2.0 + ln2) / ln_n) + nf * (1.0 + (2.0 * ln2 + ln_2pi) / ln_n) - ln2 / ln_n
}

/// One labelled value of a bound report.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedValue {
    pub name: String,
    /// Natural-log value for quantities that may overflow; `None` for
    /// plain reals.
    pub log_value: Option<f64>,
    /// Plain value when it fits in f64 range.
    pub value: Option<f64>,
    /// Human-readable formula this value evaluates.
    pub formula: String,
}

/// One bound-versus-oracle verdict, in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub bound: String,
    pub oracle: String,
    pub bound_log: f64,
    pub oracle_log: f64,
    /// bound_log - oracle_log.
    pub slack: f64,
    /// slack >= -[`SLACK_TOL`].
    pub holds: bool,
}

/// Evaluated bound values with provenance labels and verdicts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundReport {
    pub order: u64,
    pub size: Option<u64>,
    pub values: Vec<NamedValue>,
    pub comparisons: Vec<Comparison>,
}

impl BoundReport {
    pub fn new(order: u64, size: Option<u64>) -> Self {
        BoundReport {
            order,
            size,
            ..Default::default()
        }
    }

    pub fn push_real(&mut self, name: &str, value: f64, formula: &str) {
        self.values.push(NamedValue {
            name: name.to_string(),
            log_value: None,
            value: Some(value),
            formula: formula.to_string(),
        });
    }

    /// Records a log-space value, exposing the plain value too when it
    /// does not overflow f64.
    pub fn push_log(&mut self, name: &str, log_value: f64, formula: &str) {
        let plain = if log_value < 700.0 {
            Some(log_value.exp())
        } else {
            None
        };
        self.values.push(NamedValue {
            name: name.to_string(),
            log_value: Some(log_value),
            value: plain,
            formula: formula.to_string(),
        });
    }

    pub fn push_comparison(&mut self, bound: &str, oracle: &str, bound_log: f64, oracle_log: f64) {
        let slack = bound_log - oracle_log;
        self.comparisons.push(Comparison {
            bound: bound.to_string(),
            oracle: oracle.to_string(),
            bound_log,
            oracle_log,
            slack,
            holds: slack >= -SLACK_TOL,
        });
    }

    /// Flat key-value text block.
    pub fn to_kv_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("order = {}\n", self.order));
        if let Some(k) = self.size {
            out.push_str(&format!("size = {k}\n"));
        }
        for v in &self.values {
            if let Some(log) = v.log_value {
                out.push_str(&format!("{}.log = {}\n", v.name, log));
            }
            if let Some(value) = v.value {
                out.push_str(&format!("{} = {}\n", v.name, value));
            }
            out.push_str(&format!("{}.formula = {}\n", v.name, v.formula));
        }
        for c in &self.comparisons {
            out.push_str(&format!(
                "check[{} >= {}].slack = {}\ncheck[{} >= {}].holds = {}\n",
                c.bound, c.oracle, c.slack, c.bound, c.oracle, c.holds
            ));
        }
        out
    }
}
