//! Univariate polynomials in `x` with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RationalPolynomial {
    /// `coeffs[i]` multiplies `x^i`; no trailing zeros.
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    pub fn monomial(c: BigRational, power: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); power + 1];
        coeffs[power] = c;
        Self::new(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> BigRational {
        self.coeffs.get(power).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Power of the lowest nonzero term.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * rat(i as i64)).collect())
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect())
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|c| c.is_zero())
    }

    pub fn is_odd(&self) -> bool {
        self.coeffs.iter().step_by(2).all(|c| c.is_zero())
    }

    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Evaluates a polynomial that only has even powers at a point given
    /// through `x^2`; lets `x = 1/sqrt(2)` be evaluated exactly.
    pub fn eval_even_at_square(&self, x_squared: &BigRational) -> Option<BigRational> {
        if !self.is_even() {
            return None;
        }
        Some(self.coeffs.iter().step_by(2).rev().fold(BigRational::zero(), |acc, c| acc * x_squared + c))
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = &d.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = &rem[rem.len() - 1] / lead;
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] -= &c * dc;
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        match a.degree() {
            None => a,
            Some(d) => {
                let lead = a.coeffs[d].clone();
                a.scale(&(BigRational::one() / lead))
            }
        }
    }

    /// Same roots, each with multiplicity one.
    pub fn square_free_part(&self) -> Self {
        if self.degree().is_none_or(|d| d == 0) {
            return self.clone();
        }
        self.div_rem(&self.gcd(&self.derivative())).0
    }

    /// Double-precision Horner evaluation.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Splits `p = c * x^k * q` where `q` has coprime integer coefficients,
    /// a nonzero constant term and a positive lowest coefficient.
    pub fn factor_content(&self) -> Option<(BigRational, usize, Vec<BigInt>)> {
        let k = self.valuation()?;
        let tail = &self.coeffs[k..];
        let lcm_den = tail.iter().fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        let ints: Vec<BigInt> = tail.iter().map(|c| (c * &lcm_den).to_integer()).collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, v| num_integer::Integer::gcd(&acc, v));
        if ints[0].is_negative() {
            g = -g;
        }
        let q: Vec<BigInt> = ints.iter().map(|v| v / &g).collect();
        let content = BigRational::new(g, lcm_den);
        Some((content, k, q))
    }
}

fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_power(power: usize) -> String {
    match power {
        0 => String::new(),
        1 => "x".to_string(),
        _ => format!("x^{power}"),
    }
}

fn fmt_terms<T, F>(terms: &[(T, usize)], abs_str: F, is_neg: impl Fn(&T) -> bool, is_one: impl Fn(&T) -> bool) -> String
where
    F: Fn(&T) -> String,
{
    let mut out = String::new();
    for (i, (c, power)) in terms.iter().enumerate() {
        let neg = is_neg(c);
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = abs_str(c);
        if *power == 0 {
            out.push_str(&mag);
        } else if is_one(c) {
            out.push_str(&fmt_power(*power));
        } else {
            out.push_str(&mag);
            out.push(' ');
            out.push_str(&fmt_power(*power));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn fmt_int_poly(q: &[BigInt], shift: usize) -> String {
    let terms: Vec<(BigInt, usize)> =
        q.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (c.clone(), i + shift)).collect();
    fmt_terms(&terms, |c| c.abs().to_string(), |c| c.is_negative(), |c| c.abs().is_one())
}

impl RationalPolynomial {
    /// Factored rendering `c x^k (q)`, e.g. `(1 + 14 x^4)/64` or
    /// `x^3 (7 + 8 x^4)`.
    pub fn to_factored_string(&self) -> String {
        let Some((content, k, q)) = self.factor_content() else {
            return "0".to_string();
        };
        let inner = fmt_int_poly(&q, 0);
        let single = q.iter().filter(|c| !c.is_zero()).count() == 1;
        let mut body = String::new();
        if k > 0 {
            body.push_str(&fmt_power(k));
        }
        if !(single && q[0].is_one()) {
            if !body.is_empty() {
                body.push(' ');
            }
            if single {
                body.push_str(&inner);
            } else {
                body.push('(');
                body.push_str(&inner);
                body.push(')');
            }
        }
        if body.is_empty() {
            body.push('1');
        }
        let num = content.numer().clone();
        let den = content.denom().clone();
        let mut out = String::new();
        if num.is_negative() {
            out.push('-');
        }
        if !num.abs().is_one() {
            out.push_str(&num.abs().to_string());
            out.push(' ');
        }
        out.push_str(&body);
        if !den.is_one() {
            out = format!("{out}/{den}");
        }
        out
    }
}

impl fmt::Display for RationalPolynomial {
    /// Expanded rendering `c0 + c1 x + c2 x^2 + ...`, zero terms omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(BigRational, usize)> =
            self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (c.clone(), i)).collect();
        f.write_str(&fmt_terms(&terms, |c| fmt_rational(&c.abs()), |c| c.is_negative(), |c| c.abs().is_one()))
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomial::new(out)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalPolynomial {
            type Output = RationalPolynomial;
            fn $m(self, rhs: RationalPolynomial) -> RationalPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// A ratio of two exact polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: RationalPolynomial,
    pub den: RationalPolynomial,
}

impl RationalFunction {
    pub fn new(num: RationalPolynomial, den: RationalPolynomial) -> Self {
        Self { num, den }
    }

    /// Rescales numerator and denominator so the denominator's lowest
    /// nonzero coefficient is 1.
    pub fn normalized(&self) -> Self {
        match self.den.valuation() {
            Some(k) => {
                let s = BigRational::one() / self.den.coeff(k);
                Self { num: self.num.scale(&s), den: self.den.scale(&s) }
            }
            None => self.clone(),
        }
    }

    /// Equality as functions, by cross-multiplication.
    pub fn same_function(&self, other: &RationalFunction) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn derivative(&self) -> Self {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self { num, den: &self.den * &self.den }
    }

    pub fn eval_exact(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval_exact(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_exact(x) / d)
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl RationalFunction {
    /// Factored rendering, e.g. `x^3 (7 + 8 x^4) / (1 + 14 x^4)`.
    pub fn to_factored_string(&self) -> String {
        let n = self.normalized();
        let den = n.den.to_factored_string();
        let num = n.num.to_factored_string();
        if den == "1" {
            num
        } else {
            let den = if den.starts_with('(') && den.ends_with(')') { den } else { format!("({den})") };
            format!("{num} / {den}")
        }
    }
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
