//! Exact scalar tower.
//!
//! Everything in this crate is computed over the rationals. Coefficients that
//! depend on the Brauer parameter live in [`RatFunc`], a reduced quotient of
//! univariate polynomials in `omega`; Harish-Chandra images live in [`MPoly`],
//! a sparse polynomial in `u` and the highest-weight coordinates.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational, RingError> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| RingError::Parse(format!("not a rational number: {s:?}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("division by zero in ω-field")]
    DivisionByZero,
    #[error("pole at specialization point omega = {point}: denominator {denominator} vanishes to order {order}")]
    Pole {
        point: String,
        denominator: String,
        order: usize,
    },
    #[error("malformed polynomial data: {0}")]
    Parse(String),
}

/// Minimal commutative-ring interface used by the generic containers
/// (enveloping-algebra elements, tensor operators).
pub trait Ring: Clone + fmt::Debug + PartialEq + Send + Sync + Zero + One {
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add_ref(other);
    }

    fn scale_rational(&self, r: &Rational) -> Self {
        self.mul_ref(&Self::from_rational(r))
    }
}

impl Ring for Rational {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn scale_rational(&self, r: &Rational) -> Self {
        self * r
    }
}

// ---------------------------------------------------------------------------
// Univariate polynomials over Q

/// Dense univariate polynomial over the rationals, coefficients stored from
/// the constant term upwards with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The indeterminate itself.
    pub fn x() -> Self {
        Poly::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    /// `x + c`
    pub fn linear(c: Rational) -> Self {
        Poly::from_coeffs(vec![c, Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn constant_term(&self) -> Rational {
        self.coeffs.first().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn add_scaled_assign(&mut self, other: &Poly, c: &Rational) {
        if other.len() > self.coeffs.len() {
            self.coeffs.resize(other.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *a += b * c;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lc) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        if self.len() < divisor.len() {
            return (Poly::zero(), self.clone());
        }
        let lc_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lc_inv;
            if !c.is_zero() {
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x.monic()
    }

    /// Multiplicity of `root` as a zero of `self`.
    pub fn root_multiplicity(&self, root: &Rational) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Poly::linear(-root.clone());
        let mut p = self.clone();
        let mut k = 0;
        loop {
            let (q, r) = p.div_rem(&lin);
            if !r.is_zero() {
                return k;
            }
            p = q;
            k += 1;
        }
    }

    /// Compose with `x + c`.
    pub fn translate(&self, c: &Rational) -> Poly {
        let lin = Poly::linear(c.clone());
        let mut acc = Poly::zero();
        for a in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(a.clone());
        }
        acc
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn fmt_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            parts.push(join_term(c, &mono));
        }
        join_signed(parts)
    }
}

fn join_term(c: &Rational, mono: &str) -> String {
    if mono.is_empty() {
        return c.to_string();
    }
    if c.is_one() {
        mono.to_string()
    } else if (-c).is_one() {
        format!("-{mono}")
    } else if c.is_integer() {
        format!("{c}*{mono}")
    } else if c.is_negative() {
        format!("-({})*{mono}", -c)
    } else {
        format!("({c})*{mono}")
    }
}

fn join_signed(parts: Vec<String>) -> String {
    let mut out = String::new();
    for (i, p) in parts.into_iter().enumerate() {
        if i == 0 {
            out.push_str(&p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&p);
        }
    }
    out
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_in("omega"))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, other: &Poly) -> Poly {
        let (long, short) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (a, b) in coeffs.iter_mut().zip(short.coeffs.iter()) {
            *a += b;
        }
        Poly::from_coeffs(coeffs)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, other: &Poly) -> Poly {
        self + &(-other)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::from_coeffs(coeffs)
    }
}

// ---------------------------------------------------------------------------
// Rational functions in omega

/// Reduced rational function in `omega`: `gcd(num, den) = 1`, `den` monic,
/// and zero is stored as `0/1`, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, RingError> {
        if den.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        if den.is_constant() {
            let inv = den.constant_term().recip();
            return RatFunc {
                num: num.scale(&inv),
                den: Poly::one(),
            };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lc_inv = den.leading().expect("nonzero").recip();
        RatFunc {
            num: num.scale(&lc_inv),
            den: den.scale(&lc_inv),
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn omega() -> Self {
        RatFunc::from_poly(Poly::x())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.is_constant().then(|| self.num.constant_term())
    }

    pub fn recip(&self) -> Result<Self, RingError> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &RatFunc) -> Result<Self, RingError> {
        if other.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        Ok(RatFunc::reduce(
            &self.num * &other.den,
            &self.den * &other.num,
        ))
    }

    /// Exact value at `omega = point`. Removable singularities never occur
    /// here because the stored form is already reduced.
    pub fn eval(&self, point: &Rational) -> Result<Rational, RingError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(RingError::Pole {
                point: point.to_string(),
                denominator: self.den.fmt_in("omega"),
                order: self.den.root_multiplicity(point),
            });
        }
        Ok(self.num.eval(point) / d)
    }

    pub fn fmt_in(&self, var: &str) -> String {
        if self.den.is_one() {
            self.num.fmt_in(var)
        } else {
            format!("({})/({})", self.num.fmt_in(var), self.den.fmt_in(var))
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_in("omega"))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            if self.den.is_one() {
                return RatFunc::from_poly(&self.num + &other.num);
            }
            return RatFunc::reduce(&self.num + &other.num, self.den.clone());
        }
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        RatFunc::reduce(num, &self.den * &other.den)
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, other: &RatFunc) -> RatFunc {
        self + &(-other)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFunc::from_poly(&self.num * &other.num);
        }
        RatFunc::reduce(&self.num * &other.num, &self.den * &other.den)
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::one()
    }
}

impl Ring for RatFunc {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        RatFunc::constant(r.clone())
    }
    fn scale_rational(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(r),
            den: self.den.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials in u and lambda_1..lambda_n

/// Variables are ordered `u < l1 < l2 < ...`; `Lambda(i)` is the i-th
/// highest-weight coordinate (1-based).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    U,
    Lambda(u8),
}

impl Var {
    pub fn name(&self) -> String {
        match self {
            Var::U => "u".to_string(),
            Var::Lambda(i) => format!("l{i}"),
        }
    }

    pub fn parse(s: &str) -> Result<Var, RingError> {
        if s == "u" {
            return Ok(Var::U);
        }
        s.strip_prefix('l')
            .and_then(|rest| rest.parse::<u8>().ok())
            .filter(|&i| i >= 1)
            .map(Var::Lambda)
            .ok_or_else(|| RingError::Parse(format!("unknown variable {s:?}")))
    }
}

pub type Exponent = Vec<u32>;

/// Sparse polynomial over [`RatFunc`] coefficients. Variables that do not
/// occur are dropped, so two polynomials are equal iff they are structurally
/// equal.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    vars: Vec<Var>,
    terms: BTreeMap<Exponent, RatFunc>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::constant(RatFunc::one())
    }

    pub fn constant(c: RatFunc) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MPoly {
            vars: Vec::new(),
            terms,
        }
    }

    pub fn from_rational(c: Rational) -> Self {
        MPoly::constant(RatFunc::constant(c))
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], RatFunc::one());
        MPoly {
            vars: vec![v],
            terms,
        }
    }

    /// Build from `(exponents over vars, coefficient)` pairs; `vars` must be
    /// sorted and duplicate-free.
    pub fn from_terms(
        vars: Vec<Var>,
        terms: impl IntoIterator<Item = (Exponent, RatFunc)>,
    ) -> Result<Self, RingError> {
        if vars.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RingError::Parse("variables must be sorted and distinct".into()));
        }
        let mut map: BTreeMap<Exponent, RatFunc> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != vars.len() {
                return Err(RingError::Parse(format!(
                    "exponent vector {e:?} does not match {} variables",
                    vars.len()
                )));
            }
            accumulate(&mut map, e, c);
        }
        Ok(MPoly { vars, terms: map }.normalized())
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &RatFunc)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn constant_value(&self) -> Option<RatFunc> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.get(&Vec::new()).cloned().unwrap_or_else(RatFunc::zero))
    }

    /// Coefficient of the monomial given as `(var, power)` pairs.
    pub fn coeff(&self, mono: &[(Var, u32)]) -> RatFunc {
        let mut e = vec![0u32; self.vars.len()];
        for (v, p) in mono {
            match self.vars.iter().position(|x| x == v) {
                Some(i) => e[i] = *p,
                None if *p == 0 => {}
                None => return RatFunc::zero(),
            }
        }
        self.terms.get(&e).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        match self.vars.iter().position(|x| *x == v) {
            None => 0,
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
        }
    }

    /// Homogeneous component of the given total degree.
    pub fn homogeneous_part(&self, degree: u32) -> MPoly {
        MPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        let used: Vec<bool> = (0..self.vars.len())
            .map(|i| self.terms.keys().any(|e| e[i] != 0))
            .collect();
        if used.iter().all(|&u| u) {
            return self;
        }
        let vars = self
            .vars
            .iter()
            .zip(&used)
            .filter(|(_, &u)| u)
            .map(|(v, _)| *v)
            .collect();
        let terms = self
            .terms
            .into_iter()
            .map(|(e, c)| {
                let e2 = e
                    .iter()
                    .zip(&used)
                    .filter(|(_, &u)| u)
                    .map(|(x, _)| *x)
                    .collect();
                (e2, c)
            })
            .collect();
        MPoly { vars, terms }
    }

    fn reindexed(&self, target: &[Var]) -> BTreeMap<Exponent, RatFunc> {
        if self.vars == target {
            return self.terms.clone();
        }
        let pos: Vec<usize> = self
            .vars
            .iter()
            .map(|v| target.iter().position(|t| t == v).expect("variable in union"))
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = vec![0u32; target.len()];
                for (i, &p) in pos.iter().enumerate() {
                    e2[p] = e[i];
                }
                (e2, c.clone())
            })
            .collect()
    }

    fn union_vars(a: &[Var], b: &[Var]) -> Vec<Var> {
        let mut v: Vec<Var> = a.iter().chain(b.iter()).copied().collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn scale(&self, c: &RatFunc) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
        .normalized()
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Replace `v` by `value` everywhere.
    pub fn substitute(&self, v: Var, value: &MPoly) -> MPoly {
        let Some(idx) = self.vars.iter().position(|x| *x == v) else {
            return self.clone();
        };
        let mut rest_vars = self.vars.clone();
        rest_vars.remove(idx);
        let max_pow = self.terms.keys().map(|e| e[idx]).max().unwrap_or(0);
        let mut powers = vec![MPoly::one()];
        for k in 1..=max_pow as usize {
            let next = &powers[k - 1] * value;
            powers.push(next);
        }
        // group by the remaining exponent so each power is multiplied once
        let mut grouped: BTreeMap<u32, BTreeMap<Exponent, RatFunc>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let p = rest.remove(idx);
            accumulate(grouped.entry(p).or_default(), rest, c.clone());
        }
        let mut acc = MPoly::zero();
        for (p, terms) in grouped {
            let part = MPoly {
                vars: rest_vars.clone(),
                terms,
            }
            .normalized();
            acc = &acc + &(&part * &powers[p as usize]);
        }
        acc
    }

    pub fn eval_var(&self, v: Var, value: &Rational) -> MPoly {
        self.substitute(v, &MPoly::from_rational(value.clone()))
    }

    /// Evaluate every coefficient at `omega = point`.
    pub fn specialize_omega(&self, point: &Rational) -> Result<MPoly, RingError> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let v = c.eval(point)?;
            if !v.is_zero() {
                terms.insert(e.clone(), RatFunc::constant(v));
            }
        }
        Ok(MPoly {
            vars: self.vars.clone(),
            terms,
        }
        .normalized())
    }

    /// True when every coefficient is a rational constant.
    pub fn is_omega_free(&self) -> bool {
        self.terms.values().all(|c| c.is_constant())
    }

    /// Coefficients of powers of `v`, as polynomials in the other variables.
    pub fn coefficients_in(&self, v: Var) -> Vec<MPoly> {
        let deg = self.degree_in(v);
        (0..=deg)
            .map(|k| {
                
                self.coefficient_of_power(v, k)
            })
            .collect()
    }

    fn coefficient_of_power(&self, v: Var, k: u32) -> MPoly {
        let Some(idx) = self.vars.iter().position(|x| *x == v) else {
            return if k == 0 { self.clone() } else { MPoly::zero() };
        };
        let mut rest_vars = self.vars.clone();
        rest_vars.remove(idx);
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[idx] == k)
            .map(|(e, c)| {
                let mut r = e.clone();
                r.remove(idx);
                (r, c.clone())
            })
            .collect();
        MPoly {
            vars: rest_vars,
            terms,
        }
        .normalized()
    }

    pub fn render(&self) -> String {
        self.render_with(&|v: Var| v.name())
    }

    /// Graded rendering (highest total degree first) with custom names.
    pub fn render_with(&self, name: &dyn Fn(Var) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<&Exponent> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let mut parts = Vec::new();
        for e in keys {
            let c = &self.terms[e];
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| {
                    let n = name(self.vars[i]);
                    if p == 1 {
                        n
                    } else {
                        format!("{n}^{p}")
                    }
                })
                .collect();
            let mono = mono.join("*");
            match c.as_constant() {
                Some(r) => parts.push(join_term(&r, &mono)),
                None if mono.is_empty() => parts.push(format!("({c})")),
                None => parts.push(format!("({c})*{mono}")),
            }
        }
        join_signed(parts)
    }
}

fn accumulate(map: &mut BTreeMap<Exponent, RatFunc>, e: Exponent, c: RatFunc) {
    if c.is_zero() {
        return;
    }
    match map.entry(e) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get() + &c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn add(self, other: &MPoly) -> MPoly {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let vars = MPoly::union_vars(&self.vars, &other.vars);
        let mut terms = self.reindexed(&vars);
        for (e, c) in other.reindexed(&vars) {
            accumulate(&mut terms, e, c);
        }
        MPoly { vars, terms }.normalized()
    }
}

impl<'a> Sub<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn sub(self, other: &MPoly) -> MPoly {
        self + &(-other)
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn mul(self, other: &MPoly) -> MPoly {
        if self.is_zero() || other.is_zero() {
            return MPoly::zero();
        }
        let vars = MPoly::union_vars(&self.vars, &other.vars);
        let a = self.reindexed(&vars);
        let b = other.reindexed(&vars);
        let mut terms = BTreeMap::new();
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                accumulate(&mut terms, e, ca * cb);
            }
        }
        MPoly { vars, terms }.normalized()
    }
}

macro_rules! forward_owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, other: $t) -> $t {
                &self + &other
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, other: $t) -> $t {
                &self - &other
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, other: $t) -> $t {
                &self * &other
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

forward_owned_ops!(Poly);
forward_owned_ops!(RatFunc);
forward_owned_ops!(MPoly);

impl Zero for MPoly {
    fn zero() -> Self {
        MPoly::zero()
    }
    fn is_zero(&self) -> bool {
        MPoly::is_zero(self)
    }
}

impl One for MPoly {
    fn one() -> Self {
        MPoly::one()
    }
}

impl Ring for MPoly {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        MPoly::from_rational(r.clone())
    }
    fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&RatFunc::constant(r.clone()))
    }
}

/// Lift of a scalar into the polynomial ring; used by the Harish-Chandra
/// projection to attach highest-weight monomials to coefficients.
pub trait ToMPoly {
    fn to_mpoly(&self) -> MPoly;
}

impl ToMPoly for Rational {
    fn to_mpoly(&self) -> MPoly {
        MPoly::from_rational(self.clone())
    }
}

impl ToMPoly for RatFunc {
    fn to_mpoly(&self) -> MPoly {
        MPoly::constant(self.clone())
    }
}

impl ToMPoly for MPoly {
    fn to_mpoly(&self) -> MPoly {
        self.clone()
    }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct RatFuncJson {
    pub num_poly: Vec<String>,
    pub den_poly: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct MPolyTermJson {
    pub exp: Vec<u32>,
    pub coeff: RatFuncJson,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct MPolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<MPolyTermJson>,
}

fn poly_to_strings(p: &Poly) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_string()).collect()
}

fn poly_from_strings(v: &[String]) -> Result<Poly, RingError> {
    Ok(Poly::from_coeffs(
        v.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?,
    ))
}

impl From<&RatFunc> for RatFuncJson {
    fn from(f: &RatFunc) -> Self {
        RatFuncJson {
            num_poly: poly_to_strings(&f.num),
            den_poly: poly_to_strings(&f.den),
        }
    }
}

impl TryFrom<&RatFuncJson> for RatFunc {
    type Error = RingError;
    fn try_from(j: &RatFuncJson) -> Result<Self, RingError> {
        RatFunc::new(poly_from_strings(&j.num_poly)?, poly_from_strings(&j.den_poly)?)
    }
}

impl From<&MPoly> for MPolyJson {
    fn from(p: &MPoly) -> Self {
        MPolyJson {
            vars: p.vars.iter().map(|v| v.name()).collect(),
            terms: p
                .terms
                .iter()
                .map(|(e, c)| MPolyTermJson {
                    exp: e.clone(),
                    coeff: c.into(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&MPolyJson> for MPoly {
    type Error = RingError;
    fn try_from(j: &MPolyJson) -> Result<Self, RingError> {
        let vars = j
            .vars
            .iter()
            .map(|s| Var::parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        let terms = j
            .terms
            .iter()
            .map(|t| Ok((t.exp.clone(), RatFunc::try_from(&t.coeff)?)))
            .collect::<Result<Vec<_>, RingError>>()?;
        MPoly::from_terms(vars, terms)
    }
}

impl Serialize for MPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MPolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = MPolyJson::deserialize(d)?;
        MPoly::try_from(&j).map_err(serde::de::Error::custom)
    }
}

impl Serialize for RatFunc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RatFuncJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = RatFuncJson::deserialize(d)?;
        RatFunc::try_from(&j).map_err(serde::de::Error::custom)
    }
}

/// `binom(top, bottom)`, zero whenever `bottom < 0` or `top < bottom`
/// (including negative `top`).
pub fn binomial(top: i64, bottom: i64) -> Rational {
    if bottom < 0 || top < bottom || top < 0 {
        return Rational::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..bottom {
        acc = acc * BigInt::from(top - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Least common multiple of the denominators of the given rationals.
pub fn denominator_lcm<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(c)
    }

    #[test]
    fn reduce_common_factor() {
        // (ω²−1)/(ω−1) = ω+1
        let f = RatFunc::new(p(&[-1, 0, 1]), p(&[-1, 1])).unwrap();
        assert_eq!(f, RatFunc::from_poly(p(&[1, 1])));
    }

    #[test]
    fn reduce_constant_denominator() {
        let f = RatFunc::new(p(&[0, 2]), p(&[4])).unwrap();
        assert_eq!(f.numer().coeffs(), &[int(0), rat(1, 2)]);
        assert!(f.denom().is_one());
    }

    #[test]
    fn reduce_identity_case() {
        let f = RatFunc::new(p(&[2, 1]), p(&[2, 1])).unwrap();
        assert_eq!(f, RatFunc::one());
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(
            RatFunc::new(p(&[1]), Poly::zero()).unwrap_err(),
            RingError::DivisionByZero
        );
        assert_eq!(
            RingError::DivisionByZero.to_string(),
            "division by zero in ω-field"
        );
    }

    #[test]
    fn eval_removable_singularity() {
        let f = RatFunc::new(p(&[-4, 0, 1]), p(&[-2, 1])).unwrap();
        assert_eq!(f.eval(&int(2)).unwrap(), int(4));
    }

    #[test]
    fn eval_pole() {
        let f = RatFunc::new(p(&[1]), p(&[-2, 1])).unwrap();
        match f.eval(&int(2)) {
            Err(RingError::Pole { order, denominator, .. }) => {
                assert_eq!(order, 1);
                assert_eq!(denominator, "omega - 2");
            }
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn eval_direct() {
        let f = RatFunc::new(p(&[2, 1]), p(&[0, 1])).unwrap();
        assert_eq!(f.eval(&int(3)).unwrap(), rat(5, 3));
    }

    #[test]
    fn mpoly_difference_of_squares() {
        let l = MPoly::var(Var::Lambda(1));
        let one = MPoly::one();
        let prod = &(&l + &one) * &(&l - &one);
        let expected = &l.pow(2) - &one;
        assert_eq!(prod, expected);
    }

    #[test]
    fn mpoly_substitute_constant() {
        let u = MPoly::var(Var::U);
        let f = &u.pow(2) - &u;
        assert_eq!(
            f.eval_var(Var::U, &rat(1, 2)),
            MPoly::from_rational(rat(-1, 4))
        );
    }

    #[test]
    fn mpoly_substitute_shifted_weight() {
        // λ₁ := l − 1/2 in λ₁² + λ₁ gives l² − 1/4 (l stands in as λ₂ here)
        let x = MPoly::var(Var::Lambda(1));
        let l = MPoly::var(Var::Lambda(2));
        let f = &x.pow(2) + &x;
        let shifted = &l - &MPoly::from_rational(rat(1, 2));
        let g = f.substitute(Var::Lambda(1), &shifted);
        assert_eq!(g, &l.pow(2) - &MPoly::from_rational(rat(1, 4)));
    }

    #[test]
    fn unused_vars_dropped() {
        let u = MPoly::var(Var::U);
        let z = &u - &u;
        assert!(z.is_zero());
        assert!(z.vars().is_empty());
        assert_eq!(z, MPoly::zero());
    }

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(2, 3), int(0));
        assert_eq!(binomial(-1, 0), int(0));
        assert_eq!(binomial(3, -1), int(0));
        assert_eq!(binomial(0, 0), int(1));
    }

    #[test]
    fn json_round_trip() {
        let u = MPoly::var(Var::U);
        let l = MPoly::var(Var::Lambda(2));
        let w = RatFunc::new(p(&[1, 1]), p(&[0, 2])).unwrap();
        let f = &(&u * &l).scale(&w) + &MPoly::from_rational(rat(-7, 3));
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"vars\":[\"u\",\"l2\"]"));
        let back: MPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn render_graded() {
        let l = MPoly::var(Var::Lambda(1));
        let f = (&l.pow(2) + &l).scale(&RatFunc::constant(rat(5, 3)));
        assert_eq!(f.render(), "(5/3)*l1^2 + (5/3)*l1");
        let g = &l.pow(2).scale(&RatFunc::constant(rat(5, 3))) - &MPoly::from_rational(rat(5, 12));
        assert_eq!(g.render(), "(5/3)*l1^2 - 5/12");
    }
}
