//! Exact scalars: Gaussian rationals `a + b i` and Laurent polynomials in the
//! formal symbol hbar over them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Shorthand for building an exact rational `n / d`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Formats a rational as `a` or `a/b`.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `a` or `a/b` with an optional leading sign.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// An element of Q(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(rat_int(n))
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2`, always an exact rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for GaussianRational {
    /// `a/b`, `c/d*i` or `a/b+c/d*i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}*i", fmt_rational(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}*i", fmt_rational(&self.re), sign, fmt_rational(&self.im.abs()))
            }
        }
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

/// A Laurent polynomial in hbar with Gaussian-rational coefficients,
/// stored sparsely as `hbar power -> value` with no zero values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Coefficient {
    terms: BTreeMap<i32, GaussianRational>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::term(0, c)
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::constant(GaussianRational::real(r))
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(GaussianRational::from_int(n))
    }

    /// `c * hbar^power`.
    pub fn term(power: i32, c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(power, c);
        }
        Self { terms }
    }

    pub fn hbar() -> Self {
        Self::term(1, GaussianRational::one())
    }

    pub fn hbar_pow(power: i32) -> Self {
        Self::term(power, GaussianRational::one())
    }

    pub fn i() -> Self {
        Self::constant(GaussianRational::i())
    }

    /// `i * hbar`, the value of `[q, p]`.
    pub fn i_hbar() -> Self {
        Self::term(1, GaussianRational::i())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(GaussianRational::is_one)
    }

    /// Iterates `(hbar power, value)` in ascending power.
    pub fn iter(&self) -> impl Iterator<Item = (i32, &GaussianRational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn get(&self, power: i32) -> GaussianRational {
        self.terms.get(&power).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_power(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_power(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// True when every component is real (i.e. free of `i`).
    pub fn is_real(&self) -> bool {
        self.terms.values().all(GaussianRational::is_real)
    }

    pub fn add_term(&mut self, power: i32, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(power).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&power);
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        self.scale(&GaussianRational::real(r.clone()))
    }

    /// Multiplies by `hbar^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self { terms: self.terms.iter().map(|(p, v)| (p + k, v.clone())).collect() }
    }

    /// Complex conjugation; hbar is real.
    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v.conj())).collect() }
    }

    /// Substitutes `hbar -> -hbar`.
    pub fn flip_hbar(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, if k.rem_euclid(2) == 1 { -v } else { v.clone() })).collect(),
        }
    }

    /// Keeps only the terms with `hbar` power strictly below `k`.
    pub fn truncate_below(&self, k: i32) -> Self {
        Self { terms: self.terms.range(..k).map(|(p, v)| (*p, v.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates at a rational value of hbar.
    pub fn evaluate(&self, hbar: &BigRational) -> Result<GaussianRational> {
        let mut acc = GaussianRational::zero();
        for (k, v) in &self.terms {
            let factor = if *k >= 0 {
                num_traits::pow::pow(hbar.clone(), *k as usize)
            } else {
                if hbar.is_zero() {
                    return Err(Error::Evaluation(format!("hbar^{k} at hbar = 0")));
                }
                num_traits::pow::pow(hbar.recip(), (-*k) as usize)
            };
            acc += &v.scale(&factor);
        }
        Ok(acc)
    }

    /// Exact division by a unit `c * hbar^k`; fails for anything else.
    pub fn div_unit(&self, unit: &Coefficient) -> Result<Self> {
        if unit.terms.len() != 1 {
            return Err(Error::Precondition("division by a non-unit coefficient".into()));
        }
        let (k, c) = unit.terms.iter().next().unwrap();
        let inv = c.inv().ok_or_else(|| Error::Precondition("division by zero".into()))?;
        Ok(self.scale(&inv).shift(-k))
    }
}

impl From<GaussianRational> for Coefficient {
    fn from(c: GaussianRational) -> Self {
        Coefficient::constant(c)
    }
}

impl<'a> Add<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn add(self, o: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl<'a> Sub<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn sub(self, o: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        out -= o;
        out
    }
}

impl<'a> Mul<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn mul(self, o: &Coefficient) -> Coefficient {
        let mut out = Coefficient::zero();
        for (k1, v1) in &self.terms {
            for (k2, v2) in &o.terms {
                out.add_term(k1 + k2, &(v1 * v2));
            }
        }
        out
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient { terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, o: &Coefficient) {
        for (k, v) in &o.terms {
            self.add_term(*k, v);
        }
    }
}

impl SubAssign<&Coefficient> for Coefficient {
    fn sub_assign(&mut self, o: &Coefficient) {
        for (k, v) in &o.terms {
            self.add_term(*k, &-v);
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| match k {
                0 => format!("({v})"),
                _ => format!("({v})*hbar^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
