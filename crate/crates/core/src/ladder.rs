//! The critical exponent `p_c(n)` and the ladder `p_c = p₁ < p₂ < … < p_N` of
//! exponents at which `λ₂ = k·λ₃`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::sobolev_exponent;
use crate::quartic::q4_eval;
use crate::roots::bisect;

/// Largest exponent probed before `p_c = ∞` is declared.
pub const PC_PROBE_LIMIT: f64 = 1e6;

/// Offset above the Sobolev exponent where the `p_c` bracket search starts.
const PC_BRACKET_START: f64 = 1e-3;

/// Points of the geometric grid used to re-verify rung uniqueness.
const UNIQUENESS_GRID: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalLadder {
    pub n: u32,
    pub p_c: f64,
    /// `p₁ = p_c < p₂ < … < p_N`.
    pub rungs: Vec<f64>,
    /// `tail_limits[k-1]` is the limit of `ℛₖ(p)/p⁴` for `k = 1..=N+1`.
    pub tail_limits: Vec<f64>,
}

impl CriticalLadder {
    /// Ladder length `N`.
    pub fn len(&self) -> usize {
        self.rungs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rungs.is_empty()
    }

    /// Rung `p_k` for `1 <= k <= N`.
    pub fn rung(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.rungs.get(i).copied())
    }
}

/// `p·Q₄(4/(p−1)) − Q₄((n−4)/2)`; positive on `((n+4)/(n−4), p_c)`.
pub fn pc_defining_function(n: u32, p: f64) -> f64 {
    let nf = f64::from(n);
    p * q4_eval(n, 4.0 / (p - 1.0)) - q4_eval(n, (nf - 4.0) / 2.0)
}

/// Critical exponent: right end of the maximal interval above the Sobolev
/// exponent on which `p·Q₄(4/(p−1)) > Q₄((n−4)/2)`.
pub fn compute_pc(n: u32) -> Result<f64> {
    if n < 5 {
        return Err(Error::InvalidParams(format!("dimension n = {n} must be at least 5")));
    }
    let sob = sobolev_exponent(n);
    let h = |p: f64| pc_defining_function(n, p);
    let mut lo = sob + PC_BRACKET_START;
    if h(lo) <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "defining function not positive just above the Sobolev exponent for n = {n}"
        )));
    }
    let mut offset = PC_BRACKET_START;
    loop {
        let hi = sob + 2.0 * offset;
        if hi > PC_PROBE_LIMIT {
            return Err(Error::NoPcValue { n });
        }
        if h(hi) < 0.0 {
            return bisect(h, lo, hi);
        }
        lo = hi;
        offset *= 2.0;
    }
}

/// `ℛₖ(p) = (p−1)⁴·[Q₄(((k−1)/(k+1))·4/(p−1) + (n−4)/(k+1)) − p·Q₄(4/(p−1))]`,
/// continued to `p = 1` by its limit `4⁴((k−1)/(k+1))⁴ − 4⁴`.
pub fn rk_eval(n: u32, k: u32, p: f64) -> f64 {
    let nf = f64::from(n);
    let kf = f64::from(k);
    let ratio = (kf - 1.0) / (kf + 1.0);
    if p == 1.0 {
        return 256.0 * ratio.powi(4) - 256.0;
    }
    let m = 4.0 / (p - 1.0);
    (p - 1.0).powi(4) * (q4_eval(n, ratio * m + (nf - 4.0) / (kf + 1.0)) - p * q4_eval(n, m))
}

/// Limit of `ℛₖ(p)/p⁴` as `p → ±∞`: `Q₄((n−4)/(k+1)) − 8(n−2)(n−4)`.
pub fn tail_limit(n: u32, k: u32) -> f64 {
    let nf = f64::from(n);
    q4_eval(n, (nf - 4.0) / (f64::from(k) + 1.0)) - 8.0 * (nf - 2.0) * (nf - 4.0)
}

/// `ℱ(k) = 2(k+1)⁴/(n−4)·[Q₄((n−4)/(k+1)) − 8(n−2)(n−4)]` for real `k`, with the
/// removable singularity at `k = −1` filled in by `2(n−4)³`.
pub fn f_quartic(n: u32, k: f64) -> f64 {
    let nf = f64::from(n);
    if k == -1.0 {
        return 2.0 * (nf - 4.0).powi(3);
    }
    let tail = q4_eval(n, (nf - 4.0) / (k + 1.0)) - 8.0 * (nf - 2.0) * (nf - 4.0);
    2.0 * (k + 1.0).powi(4) / (nf - 4.0) * tail
}

/// Closed-form ladder length.
pub fn ladder_length_formula(n: u32) -> Result<usize> {
    match n {
        0..=12 => Err(Error::InvalidParams(format!(
            "ladder length needs n >= 13, got n = {n}"
        ))),
        13..=19 => Ok(((n - 10) / 2) as usize),
        _ => Ok(((n - 9) / 2) as usize),
    }
}

/// Computes `p_c` and every rung, verifying uniqueness of each rung and the
/// closed-form length.
pub fn compute_ladder(n: u32) -> Result<CriticalLadder> {
    let ladder = compute_ladder_unchecked(n)?;
    let formula = ladder_length_formula(n)?;
    if ladder.len() != formula {
        return Err(Error::LadderMismatch {
            n,
            detail: format!("computed {} rungs, closed formula gives {formula}", ladder.len()),
        });
    }
    Ok(ladder)
}

/// Same as [`compute_ladder`] without the comparison to the closed formula.
pub fn compute_ladder_unchecked(n: u32) -> Result<CriticalLadder> {
    if n < 13 {
        return Err(Error::NoPcValue { n });
    }
    let p_c = compute_pc(n)?;
    let mut rungs = vec![p_c];
    let mut tail_limits = vec![tail_limit(n, 1)];
    let mut k = 2u32;
    loop {
        let tail = tail_limit(n, k);
        tail_limits.push(tail);
        if tail <= 0.0 {
            break;
        }
        let rung = find_rung(n, k, p_c)?;
        if rung <= *rungs.last().unwrap_or(&p_c) {
            return Err(Error::LadderMismatch {
                n,
                detail: format!("rung p_{k} = {rung} does not exceed p_{}", k - 1),
            });
        }
        rungs.push(rung);
        k += 1;
    }
    Ok(CriticalLadder { n, p_c, rungs, tail_limits })
}

fn find_rung(n: u32, k: u32, p_c: f64) -> Result<f64> {
    let r = |p: f64| rk_eval(n, k, p);
    if r(p_c) >= 0.0 {
        return Err(Error::LadderMismatch {
            n,
            detail: format!("R_{k}(p_c) = {} is not negative", r(p_c)),
        });
    }
    let mut hi = 2.0 * p_c;
    while r(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e15 {
            return Err(Error::LadderMismatch {
                n,
                detail: format!("R_{k} stays negative although its tail limit is positive"),
            });
        }
    }
    let root = bisect(r, p_c, hi)?;
    let top = PC_PROBE_LIMIT.max(10.0 * root);
    let changes = count_sign_changes(r, p_c, top, UNIQUENESS_GRID);
    if changes != 1 {
        return Err(Error::LadderMismatch {
            n,
            detail: format!("R_{k} has {changes} sign changes on [p_c, {top:e}], expected 1"),
        });
    }
    Ok(root)
}

/// Number of sign changes of `f` on a geometric grid of `points` nodes in `[lo, hi]`.
pub fn count_sign_changes<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> usize {
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    let mut prev = f(lo).signum();
    let mut changes = 0;
    for i in 1..points {
        let v = f(lo * (ratio * i as f64).exp()).signum();
        if v != prev && v != 0.0 {
            changes += 1;
            prev = v;
        }
    }
    changes
}

/// Both evaluations of `ℱ((n−9)/2)`, the case that decides the odd-`n` ladder length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityBoundaryReport {
    pub n: u32,
    pub k: f64,
    pub direct: f64,
    /// `(n−1)/2·(n³ − 33n² + 312n − 892)`
    pub factored: f64,
    pub relative_difference: f64,
    pub positive: bool,
    pub agree: bool,
    /// Sign is positive exactly when `n >= 20`.
    pub sign_as_expected: bool,
}

impl ParityBoundaryReport {
    pub fn passed(&self) -> bool {
        self.agree && self.sign_as_expected
    }
}

/// Evaluates `ℱ((n−9)/2)` directly and through its factored cubic. The
/// identity is polynomial in `n`, so even `n` are accepted as well.
pub fn parity_boundary_check(n: u32) -> Result<ParityBoundaryReport> {
    if n < 13 {
        return Err(Error::InvalidParams(format!("parity boundary needs n >= 13, got {n}")));
    }
    let nf = f64::from(n);
    let k = (nf - 9.0) / 2.0;
    let direct = f_quartic(n, k);
    let factored = (nf - 1.0) / 2.0 * (nf.powi(3) - 33.0 * nf * nf + 312.0 * nf - 892.0);
    let relative_difference = (direct - factored).abs() / factored.abs().max(f64::MIN_POSITIVE);
    let positive = direct > 0.0;
    Ok(ParityBoundaryReport {
        n,
        k,
        direct,
        factored,
        relative_difference,
        positive,
        agree: relative_difference < 1e-8,
        sign_as_expected: positive == (n >= 20),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ProblemParams;
    use crate::spectrum::compute_spectrum;

    #[test]
    fn no_pc_below_thirteen() {
        for n in 5..=12 {
            assert_eq!(compute_pc(n), Err(Error::NoPcValue { n }));
        }
    }

    #[test]
    fn pc_thirteen_is_a_double_root() {
        let pc = compute_pc(13).unwrap();
        assert!(pc > 17.0 / 9.0);
        // independent bisection oracle on h over a wide bracket
        let (mut a, mut b) = (17.0 / 9.0 + 1e-3, 1e3);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if pc_defining_function(13, mid) > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        assert!((pc - a).abs() < 1e-12 * pc);
        // 𝒫(λ*) = −h(p_c)
        let params = ProblemParams::new(13, pc).unwrap();
        let value = crate::spectrum::eigen_poly_eval(&params, params.lambda_star());
        assert!(value.abs() < 1e-8 * crate::spectrum::eigen_poly_scale(&params));
        assert!(compute_spectrum(&params).unwrap().degenerate);
    }

    #[test]
    fn rk_special_values() {
        for n in [13u32, 17, 24] {
            let nf = f64::from(n);
            for k in 1..6u32 {
                let kf = f64::from(k);
                let at_one = 256.0 * ((kf - 1.0) / (kf + 1.0)).powi(4) - 256.0;
                assert_eq!(rk_eval(n, k, 1.0), at_one);
                assert!(at_one < 0.0);
                let at_minus_one = 16.0 * q4_eval(n, nf / (kf + 1.0) - 2.0);
                assert!((rk_eval(n, k, -1.0) - at_minus_one).abs() < 1e-9 * (1.0 + at_minus_one.abs()));
                let p = nf / (nf - 4.0);
                let expected = (4.0 / (nf - 4.0)).powi(4) * q4_eval(n, kf * (nf - 4.0) / (kf + 1.0));
                assert!((rk_eval(n, k, p) - expected).abs() < 1e-9 * expected.abs());
                assert!(expected > 0.0);
            }
        }
    }

    #[test]
    fn tail_limit_values() {
        assert_eq!(tail_limit(13, 1), 63.5625);
        // Q₄(3) = 3·5·(−8)·(−6) = 720 for n = 13
        assert_eq!(tail_limit(13, 2), 720.0 - 792.0);
        for n in 13..40u32 {
            let nf = f64::from(n);
            assert_eq!(tail_limit(n, 0), -8.0 * (nf - 2.0) * (nf - 4.0));
            for k in 1..30u32 {
                assert_eq!(tail_limit(n, k).signum(), f_quartic(n, f64::from(k)).signum());
            }
        }
    }

    #[test]
    fn f_quartic_closed_forms() {
        for n in 13..=60u32 {
            let nf = f64::from(n);
            assert_eq!(f_quartic(n, -1.0), 2.0 * (nf - 4.0).powi(3));
            let f1 = 2.0 * nf.powi(3) - 8.0 * nf * nf - 256.0 * nf + 512.0;
            assert!((f_quartic(n, 1.0) - f1).abs() < 1e-9 * f1.abs());
            let f5 = 2.0 * nf.powi(4) - 60.0 * nf.powi(3) + 608.0 * nf * nf - 2336.0 * nf + 2432.0;
            assert!((f_quartic(n, nf / 2.0 - 5.0) - f5).abs() < 1e-9 * f5.abs());
            assert!(f5 > 0.0);
            let f4 = -nf.powi(4) + 18.0 * nf.powi(3) - 124.0 * nf * nf + 416.0 * nf - 608.0;
            assert!((f_quartic(n, nf / 2.0 - 4.0) - f4).abs() < 1e-9 * f4.abs());
            assert!(f4 < 0.0);
        }
    }

    #[test]
    fn ladder_length_examples() {
        assert_eq!(ladder_length_formula(13).unwrap(), 1);
        assert_eq!(ladder_length_formula(19).unwrap(), 4);
        assert_eq!(ladder_length_formula(20).unwrap(), 5);
        assert!(ladder_length_formula(12).is_err());
    }

    #[test]
    fn ladder_thirteen_has_one_rung() {
        let ladder = compute_ladder(13).unwrap();
        assert_eq!(ladder.len(), 1);
        assert_eq!(ladder.rungs[0], ladder.p_c);
        assert!(ladder.tail_limits[1] < 0.0);
    }

    #[test]
    fn rungs_satisfy_eigenvalue_relation() {
        for n in [16u32, 20, 27, 40] {
            let ladder = compute_ladder(n).unwrap();
            for k in 2..=ladder.len() {
                let pk = ladder.rung(k).unwrap();
                assert!(rk_eval(n, k as u32, pk).abs() < 1e-8 * pk.powi(4));
                let s = compute_spectrum(&ProblemParams::new(n, pk).unwrap()).unwrap();
                let rel = (s.l2() - k as f64 * s.l3()).abs() / s.l3().abs();
                assert!(rel < 1e-6, "n = {n}, k = {k}: {rel}");
                assert!(rk_eval(n, k as u32, ladder.p_c) < 0.0);
            }
        }
    }

    #[test]
    fn parity_boundary_examples() {
        let r13 = parity_boundary_check(13).unwrap();
        assert_eq!(r13.factored, -1296.0);
        assert!((r13.direct + 1296.0).abs() < 1e-9);
        assert!(!r13.positive && r13.passed());
        let r21 = parity_boundary_check(21).unwrap();
        assert!(r21.positive && r21.passed());
        for n in (13..=61).step_by(2) {
            assert!(parity_boundary_check(n).unwrap().passed(), "n = {n}");
        }
    }
}
