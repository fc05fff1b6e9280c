//! Fixed points, stability and thresholds of H-line maps, plus the two
//! combinatorial sums that decide the `x = 1/2` fixed point for a general
//! codeword set.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bloch;
use crate::codes::{self, CodewordSet, PairWeightTable};
use crate::distill::{self, monomial_exponents, DistillationMap, ErrorMap};
use crate::error::{Error, Result};
use crate::knownmaps;
use crate::poly::{ratio, RationalFunction, RationalPolynomial};

pub const SCAN_POINTS: usize = 10_000;
pub const BISECTION_TOL: f64 = 1e-13;
pub const MARGINAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn from_derivative(d: f64) -> Self {
        if (d.abs() - 1.0).abs() < MARGINAL_TOL {
            Stability::Marginal
        } else if d.abs() < 1.0 {
            Stability::Stable
        } else {
            Stability::Unstable
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "STABLE",
            Stability::Unstable => "UNSTABLE",
            Stability::Marginal => "MARGINAL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub x_star: f64,
    pub stability: Stability,
    pub derivative: f64,
}

impl FixedPoint {
    pub fn p_star(&self) -> f64 {
        bloch::x_to_p_unchecked(self.x_star)
    }
}

/// Exact derivative of the H-line map at a rational point.
pub fn map_derivative_exact(m: &DistillationMap, x: &BigRational) -> Result<BigRational> {
    m.h_map().derivative().eval_exact(x).ok_or_else(|| Error::ZeroDenominator(x.to_f64().unwrap_or(f64::NAN)))
}

/// Exact derivative at `x = 1/sqrt(2)`, available when the derivative only
/// involves even powers of `x` (true for maps with odd numerator and even
/// denominator).
pub fn map_derivative_at_pure(m: &DistillationMap) -> Option<BigRational> {
    let d = m.h_map().derivative();
    let half = ratio(1, 2);
    let num = d.num.eval_even_at_square(&half)?;
    let den = d.den.eval_even_at_square(&half)?;
    if den.is_zero() {
        None
    } else {
        Some(num / den)
    }
}

fn derivative_f64(deriv: &RationalFunction, x: f64) -> f64 {
    match BigRational::from_float(x).and_then(|xr| deriv.eval_exact(&xr)) {
        Some(v) => v.to_f64().unwrap_or(f64::NAN),
        None => f64::NAN,
    }
}

fn fixed_point_polynomial(h: &RationalFunction) -> RationalPolynomial {
    &h.num - &(&RationalPolynomial::x() * &h.den)
}

/// True when the H-line map is exactly `x -> x` (e.g. `S = {000, 101}`).
pub fn map_is_identity(m: &DistillationMap) -> bool {
    fixed_point_polynomial(&m.h_map()).is_zero()
}

/// All fixed points of the H-line map on `[0, 1/sqrt(2)]`. For the identity
/// map every point is fixed; the points `0`, `1/2`, `1/sqrt(2)` are then
/// returned as representatives, all marginal.
pub fn fixed_points(m: &DistillationMap) -> Vec<FixedPoint> {
    let h = m.h_map();
    let g_poly = fixed_point_polynomial(&h);
    if g_poly.is_zero() {
        return [0.0, 0.5, FRAC_1_SQRT_2]
            .into_iter()
            .map(|x| FixedPoint { x_star: x, stability: Stability::Marginal, derivative: 1.0 })
            .collect();
    }
    // tangencies (e.g. a double root at 1/2) never change sign
    let g_poly = g_poly.square_free_part();
    let g = |x: f64| g_poly.eval_f64(x);
    let deriv = h.derivative();
    let end = FRAC_1_SQRT_2;

    let mut roots: Vec<f64> = Vec::new();
    let grid = distill::linear_grid(0.0, end, SCAN_POINTS);
    let values: Vec<f64> = grid.iter().map(|&x| g(x)).collect();
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if i + 1 < grid.len() && values[i + 1] != 0.0 && (values[i] < 0.0) != (values[i + 1] < 0.0) {
            let (mut lo, mut hi) = (grid[i], grid[i + 1]);
            let lo_neg = values[i] < 0.0;
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (gm < 0.0) == lo_neg {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    // the pure state sits on the scan boundary
    if (h.eval_f64(end) - end).abs() < 1e-12 && roots.iter().all(|r| (r - end).abs() > 1e-9) {
        roots.push(end);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    roots
        .into_iter()
        .map(|x| {
            let d = derivative_f64(&deriv, x);
            FixedPoint { x_star: x, stability: Stability::from_derivative(d), derivative: d }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub threshold: FixedPoint,
    pub p_star: f64,
    /// Stable fixed point the iteration reaches from just above threshold.
    pub attractor: Option<FixedPoint>,
}

impl ThresholdReport {
    /// True when the iteration above threshold converges to something other
    /// than the pure magic state.
    pub fn attractor_is_intermediate(&self) -> bool {
        match self.attractor {
            Some(a) => (a.x_star - FRAC_1_SQRT_2).abs() > 1e-9,
            None => true,
        }
    }
}

/// Smallest unstable fixed point strictly inside `(0, 1/sqrt(2))`, or
/// `None` when the map has no threshold.
pub fn threshold_p(m: &DistillationMap) -> Option<ThresholdReport> {
    let fps = fixed_points(m);
    let idx = fps
        .iter()
        .position(|fp| fp.stability == Stability::Unstable && fp.x_star > 1e-12 && fp.x_star < FRAC_1_SQRT_2 - 1e-12)?;
    let threshold = fps[idx];
    let attractor = fps[idx + 1..].iter().find(|fp| fp.stability == Stability::Stable).copied();
    Some(ThresholdReport { threshold, p_star: threshold.p_star(), attractor })
}

/// Threshold of any `p`-space map (used for the closed-form comparators).
pub fn threshold_of_error_map(map: &dyn ErrorMap) -> Result<Option<f64>> {
    knownmaps::p_space_threshold(|p| map.apply(p).map(|v| v.0), 1e-6, 0.5)
}

fn pow3(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(3), e as usize)
}

fn require_valid(s: &CodewordSet) -> Result<PairWeightTable> {
    codes::validate_s(s).into_result()?;
    codes::pair_weight_table(s)
}

/// `sum_{a,b} 2 3^{|a&b|} - 3^{|a&~b|} - 3^{|b&~a|}`; vanishes exactly when
/// `x = 1/2` is a fixed point.
pub fn appendix_a_identity_from_table(table: &PairWeightTable) -> Result<BigRational> {
    let n = table.n() as u32;
    let mut sum = BigInt::zero();
    for ((wa, wb, wc), count) in table.entries() {
        let [_, both, only_b, only_a] = monomial_exponents(n, wa, wb, wc)?;
        let term = BigInt::from(2) * pow3(both) - pow3(only_a) - pow3(only_b);
        sum += term * BigInt::from(count);
    }
    Ok(BigRational::from_integer(sum))
}

pub fn appendix_a_identity(s: &CodewordSet) -> Result<BigRational> {
    appendix_a_identity_from_table(&require_valid(s)?)
}

/// `sum_{a,b} (4n - 1 - 2(|a|+|b|+2|c|)) 3^{|a&b|} - 3^{n - (|a|+|b|+|c|)/2}`;
/// positive exactly when `x = 1/2` is unstable.
pub fn appendix_a_instability_sum(table: &PairWeightTable) -> Result<BigRational> {
    let n = table.n() as u32;
    let mut sum = BigInt::zero();
    for ((wa, wb, wc), count) in table.entries() {
        let [neither, both, _, _] = monomial_exponents(n, wa, wb, wc)?;
        let coeff = BigInt::from(4 * n as i64 - 1 - 2 * (wa + wb + 2 * wc) as i64);
        let term = coeff * pow3(both) - pow3(neither);
        sum += term * BigInt::from(count);
    }
    Ok(BigRational::from_integer(sum))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub identity_sum: BigRational,
    pub instability_sum: BigRational,
    pub derivative_at_half: BigRational,
    pub unstable_by_sum: bool,
    pub unstable_by_derivative: bool,
}

impl StabilityReport {
    pub fn consistent(&self) -> bool {
        self.unstable_by_sum == self.unstable_by_derivative
    }
}

pub fn appendix_a_instability_from_table(table: &PairWeightTable) -> Result<StabilityReport> {
    let identity_sum = appendix_a_identity_from_table(table)?;
    let instability_sum = appendix_a_instability_sum(table)?;
    let m = DistillationMap::from_table(table)?;
    let derivative_at_half = map_derivative_exact(&m, &ratio(1, 2))?;
    Ok(StabilityReport {
        unstable_by_sum: instability_sum.is_positive(),
        unstable_by_derivative: derivative_at_half > BigRational::one(),
        identity_sum,
        instability_sum,
        derivative_at_half,
    })
}

pub fn appendix_a_instability(s: &CodewordSet) -> Result<StabilityReport> {
    appendix_a_instability_from_table(&require_valid(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{golay_s, rm15_s, span_codewords, steane_s, Bitword};
    use crate::distill::distillation_map;
    use crate::knownmaps::KnownMap;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn steane_fixed_points() {
        let m = distillation_map(&steane_s()).unwrap();
        let fps = fixed_points(&m);
        assert_eq!(fps.len(), 3, "{fps:?}");
        assert_eq!(fps[0].x_star, 0.0);
        assert_eq!(fps[0].stability, Stability::Stable);
        assert!(close(fps[1].x_star, 0.5, 1e-10));
        assert_eq!(fps[1].stability, Stability::Unstable);
        assert!(close(fps[1].derivative, 1.4, 1e-9));
        assert!(close(fps[2].x_star, FRAC_1_SQRT_2, 1e-12));
        assert_eq!(fps[2].stability, Stability::Stable);
        assert!(close(fps[2].derivative, 7.0 / 9.0, 1e-9));
        let h = m.h_map();
        for fp in &fps {
            assert!((h.eval_f64(fp.x_star) - fp.x_star).abs() < 1e-12);
        }
    }

    #[test]
    fn steane_exact_derivatives() {
        let m = distillation_map(&steane_s()).unwrap();
        assert_eq!(map_derivative_exact(&m, &ratio(1, 2)).unwrap(), ratio(7, 5));
        assert_eq!(map_derivative_at_pure(&m).unwrap(), ratio(7, 9));
    }

    #[test]
    fn golay_fixed_points() {
        let m = distillation_map(&golay_s()).unwrap();
        let fps = fixed_points(&m);
        let xs: Vec<f64> = fps.iter().map(|f| f.x_star).collect();
        assert_eq!(fps.len(), 4, "{xs:?}");
        assert_eq!(fps[0].stability, Stability::Stable);
        assert!(close(fps[1].x_star, 0.5, 1e-10));
        assert_eq!(fps[1].stability, Stability::Unstable);
        assert!(close(fps[2].x_star, 0.62292, 5e-5));
        assert_eq!(fps[2].stability, Stability::Stable);
        assert!(close(fps[3].x_star, FRAC_1_SQRT_2, 1e-12));
        assert_eq!(fps[3].stability, Stability::Unstable);
    }

    #[test]
    fn thresholds() {
        let m = distillation_map(&steane_s()).unwrap();
        let t = threshold_p(&m).unwrap();
        assert!(close(t.p_star, (1.0 - FRAC_1_SQRT_2) / 2.0, 1e-10));
        assert!(close(t.p_star, 0.146447, 1e-6));
        assert!(!t.attractor_is_intermediate());

        let g = distillation_map(&golay_s()).unwrap();
        let t = threshold_p(&g).unwrap();
        assert!(close(t.threshold.x_star, 0.5, 1e-10));
        assert!(t.attractor_is_intermediate());
        assert!(close(t.attractor.unwrap().x_star, 0.62292, 5e-5));

        let bk = threshold_of_error_map(&KnownMap::Bk15).unwrap().unwrap();
        assert!(close(bk, 0.14148, 5e-5));
    }

    #[test]
    fn single_zero_codeword_has_fixed_point_at_zero() {
        for n in [2usize, 3] {
            let s = span_codewords(&[], n).unwrap();
            let m = distillation_map(&s).unwrap();
            let fps = fixed_points(&m);
            assert_eq!(fps[0].x_star, 0.0);
        }
    }

    #[test]
    fn identity_vanishes() {
        for s in [steane_s(), golay_s(), rm15_s()] {
            assert!(appendix_a_identity(&s).unwrap().is_zero());
        }
        let s = CodewordSet::from_words(4, [Bitword::zero(4), Bitword::parse("0110").unwrap()]).unwrap();
        assert!(appendix_a_identity(&s).unwrap().is_zero());
    }

    #[test]
    fn instability_reports() {
        let r = appendix_a_instability(&steane_s()).unwrap();
        assert!(r.instability_sum.is_positive());
        assert_eq!(r.derivative_at_half, ratio(7, 5));
        assert!(r.consistent());

        let r = appendix_a_instability(&golay_s()).unwrap();
        assert!(r.unstable_by_sum && r.unstable_by_derivative);

        let s = CodewordSet::from_words(4, [Bitword::zero(4), Bitword::parse("0110").unwrap()]).unwrap();
        let r = appendix_a_instability(&s).unwrap();
        assert!(r.consistent());
        let m = distillation_map(&s).unwrap();
        let half = fixed_points(&m).into_iter().find(|f| close(f.x_star, 0.5, 1e-10)).unwrap();
        assert_eq!(half.stability == Stability::Unstable, r.unstable_by_derivative);
    }

    #[test]
    fn identity_map_is_reported_marginal() {
        let s = CodewordSet::from_words(3, [Bitword::zero(3), Bitword::parse("101").unwrap()]).unwrap();
        let m = distillation_map(&s).unwrap();
        assert!(map_is_identity(&m));
        let fps = fixed_points(&m);
        assert_eq!(fps.len(), 3);
        assert!(fps.iter().all(|f| f.stability == Stability::Marginal));
        assert!(threshold_p(&m).is_none());
        assert!(!map_is_identity(&distillation_map(&steane_s()).unwrap()));
    }

    #[test]
    fn tangent_fixed_point_is_found() {
        // h(x) - x = -x (1 - 4x^2)^2 / (2 accept'), touching zero at 1/2
        let gens = [Bitword::parse("0110110").unwrap(), Bitword::parse("1010011").unwrap()];
        let m = distillation_map(&span_codewords(&gens, 7).unwrap()).unwrap();
        let fps = fixed_points(&m);
        assert_eq!(fps.len(), 2, "{fps:?}");
        assert_eq!(fps[0].x_star, 0.0);
        assert!(close(fps[1].x_star, 0.5, 1e-12));
        assert_eq!(fps[1].stability, Stability::Marginal);
    }

    #[test]
    fn invalid_sets_are_rejected() {
        let s = CodewordSet::from_words(3, [Bitword::zero(3), Bitword::parse("100").unwrap()]).unwrap();
        assert!(appendix_a_identity(&s).is_err());
        assert!(appendix_a_instability(&s).is_err());
    }

    #[test]
    fn random_small_sets_are_consistent() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for i in 0..20 {
            let s = codes::random_valid_s(&mut rng, 3 + i % 8, 3);
            assert!(appendix_a_identity(&s).unwrap().is_zero());
            assert!(appendix_a_instability(&s).unwrap().consistent());
        }
    }

    #[test]
    fn stability_margins() {
        assert_eq!(Stability::from_derivative(1.0), Stability::Marginal);
        assert_eq!(Stability::from_derivative(1.0 + 1e-10), Stability::Marginal);
        assert_eq!(Stability::from_derivative(-0.5), Stability::Stable);
        assert_eq!(Stability::from_derivative(-1.5), Stability::Unstable);
    }
}
