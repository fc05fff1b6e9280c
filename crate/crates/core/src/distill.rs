//! Distillation maps derived from a codeword set.
//!
//! For ordered codeword pairs `(a, b)` with `c = a xor b`, the matrix element
//! `<a| rho^{(x) n} |b>` is a monomial in the entries of `rho` whose exponents
//! depend only on `(|a|, |b|, |c|)`. Everything here is therefore computed from
//! the [`PairWeightTable`]; pairs are never re-enumerated per evaluation.
//!
//! `|1_L>` is the uniform superposition of the complements of `S`, so
//! `<1_L|.|1_L>` uses weights `(n-|a|, n-|b|, |c|)` and `<0_L|.|1_L>` uses
//! `(|a|, n-|b|, n-|c|)`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

use crate::bloch::{self, BlochVector, ErrorRate, SingleQubitDensity};
use crate::codes::{self, CodewordSet, PairWeightTable};
use crate::error::{Error, Result};
use crate::poly::{RationalFunction, RationalPolynomial};

/// Exponents of `(rho00, rho11, rho01, rho10)` in `<a|rho^{(x) n}|b>`.
pub fn monomial_exponents(n: u32, wa: u32, wb: u32, wc: u32) -> Result<[u32; 4]> {
    let both = (wa + wb).checked_sub(wc).filter(|v| v % 2 == 0);
    let only_b = (wc + wb).checked_sub(wa).filter(|v| v % 2 == 0);
    let only_a = (wc + wa).checked_sub(wb).filter(|v| v % 2 == 0);
    let neither = n.checked_mul(2).and_then(|v| v.checked_sub(wa + wb + wc)).filter(|v| v % 2 == 0);
    match (neither, both, only_b, only_a) {
        (Some(e00), Some(e11), Some(e01), Some(e10)) => Ok([e00 / 2, e11 / 2, e01 / 2, e10 / 2]),
        _ => Err(Error::Invariant(format!("inconsistent weight triple ({wa}, {wb}, {wc}) for n = {n}"))),
    }
}

/// The three weight triples feeding `A00`, `A11`, `A01` for one table entry.
fn logical_triples(n: u32, wa: u32, wb: u32, wc: u32) -> [(u32, u32, u32); 3] {
    [(wa, wb, wc), (n - wa, n - wb, wc), (wa, n - wb, n - wc)]
}

/// `<0_L|rho|0_L>`, `<1_L|rho|1_L>`, `<0_L|rho|1_L>` on the H line as exact
/// polynomials in `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HLineOverlaps {
    pub p00: RationalPolynomial,
    pub p11: RationalPolynomial,
    pub p01: RationalPolynomial,
}

struct PowerCache {
    plus: Vec<RationalPolynomial>,
    minus: Vec<RationalPolynomial>,
}

impl PowerCache {
    fn new(n: usize) -> Self {
        let one_plus = RationalPolynomial::from_ints(&[1, 1]);
        let one_minus = RationalPolynomial::from_ints(&[1, -1]);
        let mut plus = vec![RationalPolynomial::one()];
        let mut minus = vec![RationalPolynomial::one()];
        for k in 1..=n {
            plus.push(&plus[k - 1] * &one_plus);
            minus.push(&minus[k - 1] * &one_minus);
        }
        Self { plus, minus }
    }

    /// `(1+x)^e00 (1-x)^e11 x^(e01+e10)`, without the `2^-n` factor.
    fn term(&self, e: [u32; 4]) -> RationalPolynomial {
        let base = &self.plus[e[0] as usize] * &self.minus[e[1] as usize];
        let shift = RationalPolynomial::monomial(BigRational::one(), (e[2] + e[3]) as usize);
        &base * &shift
    }
}

pub fn overlaps_h_line_from_table(table: &PairWeightTable) -> Result<HLineOverlaps> {
    let n = table.n() as u32;
    let cache = PowerCache::new(table.n());
    // accumulate integer multiplicities per exponent pattern first
    let mut acc: [BTreeMap<[u32; 4], u64>; 3] = Default::default();
    for ((wa, wb, wc), count) in table.entries() {
        for (slot, (a, b, c)) in logical_triples(n, wa, wb, wc).into_iter().enumerate() {
            let e = monomial_exponents(n, a, b, c)?;
            *acc[slot].entry(e).or_insert(0) += count;
        }
    }
    // rho00 = (1+x)/2, rho11 = (1-x)/2, rho01 = rho10 = x/2: overall 2^-n
    let norm = BigRational::new(BigInt::one(), BigInt::from(table.set_size()) << table.n());
    let build = |m: &BTreeMap<[u32; 4], u64>| {
        let mut sum = RationalPolynomial::zero();
        for (e, count) in m {
            sum = &sum + &cache.term(*e).scale(&BigRational::from_integer(BigInt::from(*count)));
        }
        sum.scale(&norm)
    };
    Ok(HLineOverlaps { p00: build(&acc[0]), p11: build(&acc[1]), p01: build(&acc[2]) })
}

pub fn overlaps_h_line(s: &CodewordSet) -> Result<HLineOverlaps> {
    overlaps_h_line_from_table(&codes::pair_weight_table(s)?)
}

/// Exact map on the H line.
///
/// `accept = P00 + P11` is the projector trace; `x_out = 2 P01 / accept` and
/// `z_out = (P00 - P11) / accept` are the output Bloch coordinates. The
/// iterated H-line map is the H-twirl of the output, `(x_out + z_out) / 2`,
/// which coincides with `x_out` for codes with transversal Hadamard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistillationMap {
    pub n: usize,
    pub accept: RationalPolynomial,
    pub xout_num: RationalPolynomial,
    pub xout_den: RationalPolynomial,
    pub zout_num: RationalPolynomial,
}

impl DistillationMap {
    pub fn from_overlaps(n: usize, ov: &HLineOverlaps) -> Self {
        let accept = &ov.p00 + &ov.p11;
        let two = BigRational::from_integer(BigInt::from(2));
        Self { n, xout_num: ov.p01.scale(&two), xout_den: accept.clone(), zout_num: &ov.p00 - &ov.p11, accept }
    }

    pub fn from_table(table: &PairWeightTable) -> Result<Self> {
        Ok(Self::from_overlaps(table.n(), &overlaps_h_line_from_table(table)?))
    }

    /// `x_out` as an exact rational function.
    pub fn x_out(&self) -> RationalFunction {
        RationalFunction::new(self.xout_num.clone(), self.xout_den.clone())
    }

    pub fn z_out(&self) -> RationalFunction {
        RationalFunction::new(self.zout_num.clone(), self.xout_den.clone())
    }

    /// The H-twirled output coordinate `(x_out + z_out) / 2`, i.e. `u / 2v`
    /// with `u = P00 - P11 + 2 P01` and `v = P00 + P11`.
    pub fn h_map(&self) -> RationalFunction {
        let two = BigRational::from_integer(BigInt::from(2));
        RationalFunction::new(&self.xout_num + &self.zout_num, self.xout_den.scale(&two))
    }

    /// True when `x_out` and `z_out` agree identically, so the output stays on
    /// the H line without twirling.
    pub fn is_h_symmetric(&self) -> bool {
        self.xout_num == self.zout_num
    }
}

pub fn distillation_map(s: &CodewordSet) -> Result<DistillationMap> {
    codes::validate_s(s).into_result()?;
    DistillationMap::from_table(&codes::pair_weight_table(s)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapPoint {
    /// Output coordinate of the H-line map.
    pub x_out: f64,
    pub p_accept: f64,
}

/// Double-precision evaluation of the H-line map and acceptance at `x`.
pub fn evaluate_map(m: &DistillationMap, x: f64) -> Result<MapPoint> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange { value: x, range: "[-1, 1]" });
    }
    let den = m.xout_den.eval_f64(x);
    if den == 0.0 {
        return Err(Error::ZeroDenominator(x));
    }
    let h = m.h_map();
    Ok(MapPoint { x_out: h.num.eval_f64(x) / h.den.eval_f64(x), p_accept: m.accept.eval_f64(x) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub xs: Vec<f64>,
    /// Acceptance probability at each input point (one per round).
    pub accept: Vec<f64>,
    /// Expected raw input copies consumed per output after `k` rounds.
    pub expected_copies: Vec<f64>,
}

pub fn iterate_map(m: &DistillationMap, x0: f64, rounds: usize) -> Result<Trajectory> {
    let mut xs = vec![x0];
    let mut accept = Vec::with_capacity(rounds);
    let mut copies = vec![1.0];
    let mut x = x0;
    for _ in 0..rounds {
        let pt = evaluate_map(m, x)?;
        accept.push(pt.p_accept);
        copies.push(copies.last().unwrap() * m.n as f64 / pt.p_accept);
        x = pt.x_out;
        xs.push(x);
    }
    Ok(Trajectory { xs, accept, expected_copies: copies })
}

/// `<0_L|rho^{(x) n}|0_L>`, `<1_L|..|1_L>`, `<0_L|..|1_L>` for a general qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapTriple {
    pub a00: f64,
    pub a11: f64,
    pub a01: Complex64,
}

impl OverlapTriple {
    pub fn accept(&self) -> f64 {
        self.a00 + self.a11
    }

    /// Bloch vector of the normalized logical output state.
    pub fn output_bloch(&self) -> BlochVector {
        let acc = self.accept();
        BlochVector::new(2.0 * self.a01.re / acc, -2.0 * self.a01.im / acc, (self.a00 - self.a11) / acc)
    }

    pub fn max_abs_diff(&self, other: &OverlapTriple) -> f64 {
        (self.a00 - other.a00).abs().max((self.a11 - other.a11).abs()).max((self.a01 - other.a01).norm())
    }
}

fn monomial_value(rho: &SingleQubitDensity, e: [u32; 4]) -> Complex64 {
    let p = |z: Complex64, k: u32| if k == 0 { Complex64::new(1.0, 0.0) } else { z.powu(k) };
    p(rho.entry(0, 0), e[0]) * p(rho.entry(1, 1), e[1]) * p(rho.rho01, e[2]) * p(rho.rho10, e[3])
}

pub fn overlap_general_from_table(table: &PairWeightTable, rho: &SingleQubitDensity) -> Result<OverlapTriple> {
    let n = table.n() as u32;
    let mut sums = [Complex64::new(0.0, 0.0); 3];
    for ((wa, wb, wc), count) in table.entries() {
        for (slot, (a, b, c)) in logical_triples(n, wa, wb, wc).into_iter().enumerate() {
            let e = monomial_exponents(n, a, b, c)?;
            sums[slot] += monomial_value(rho, e) * count as f64;
        }
    }
    let inv = 1.0 / table.set_size() as f64;
    Ok(OverlapTriple { a00: sums[0].re * inv, a11: sums[1].re * inv, a01: sums[2] * inv })
}

pub fn overlap_general(s: &CodewordSet, rho: &SingleQubitDensity) -> Result<OverlapTriple> {
    overlap_general_from_table(&codes::pair_weight_table(s)?, rho)
}

/// One row of a `p`-space sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub p_out: f64,
    pub delta: f64,
    /// `None` where a map has no acceptance model.
    pub accept: Option<f64>,
}

/// Anything that maps an input error rate to an output error rate.
pub trait ErrorMap {
    fn apply(&self, p: f64) -> Result<(f64, Option<f64>)>;
}

impl ErrorMap for DistillationMap {
    fn apply(&self, p: f64) -> Result<(f64, Option<f64>)> {
        let x = bloch::p_to_x(ErrorRate::new(p)?);
        let pt = evaluate_map(self, x)?;
        let p_out = bloch::x_to_p_unchecked(pt.x_out);
        // rounding at the pure state
        let p_out = if p_out.abs() < 1e-15 { 0.0 } else { p_out };
        Ok((p_out, Some(pt.p_accept)))
    }
}

pub fn sweep(m: &dyn ErrorMap, p_grid: &[f64]) -> Result<Vec<SweepRow>> {
    p_grid
        .iter()
        .map(|&p| {
            let (p_out, accept) = m.apply(p)?;
            Ok(SweepRow { p, p_out, delta: p_out - p, accept })
        })
        .collect()
}

fn sig12(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{:.11e}", v)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("p,p_out,delta,accept\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            sig12(r.p),
            sig12(r.p_out),
            sig12(r.delta),
            sig12(r.accept.unwrap_or(f64::NAN))
        ));
    }
    out
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

/// Bloch vector on the A-type magic axis `(1, 1, 0)/sqrt(2)` with error `p`.
pub fn a_axis_state(p: f64) -> BlochVector {
    let r = (1.0 - 2.0 * p) * FRAC_1_SQRT_2;
    BlochVector::new(r, r, 0.0)
}

/// Pushes an A-axis input with error `p` through a code via the general
/// overlaps and returns the output error along the conjugate axis
/// `(1, -1, 0)/sqrt(2)` together with the acceptance.
pub fn a_axis_error_map(table: &PairWeightTable, p: f64) -> Result<(f64, f64)> {
    let rho = a_axis_state(p).to_density();
    let ov = overlap_general_from_table(table, &rho)?;
    let out = ov.output_bloch();
    let along = (out.x - out.y) * FRAC_1_SQRT_2;
    Ok(((1.0 - along) / 2.0, ov.accept()))
}
