//! Exact arithmetic in the rational function field ℚ(q).
//!
//! A [`Scalar`] is stored as `q^shift · num(q) / den(q)` where neither
//! polynomial vanishes at zero, the pair is coprime, and `den` has integer
//! coefficients, content one and a positive leading coefficient.  The power
//! of `q` is kept apart so that Laurent monomials such as `q^-3`, which are
//! everywhere in quantum-group structure constants, never touch a gcd.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number.
pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to a negative power")]
    ZeroNegativePower,
    #[error("cannot specialize at q = 0")]
    SpecializeAtZero,
    #[error("pole at q = {0}")]
    Pole(String),
    #[error("gauss binomial needs m >= r (got m = {m}, r = {r})")]
    BinomialRange { m: i64, r: i64 },
    #[error("bracket denominator vanishes")]
    BracketDenominator,
    #[error("parse error: {0}")]
    Parse(String),
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `a` or `a/b` with integer `a`, `b`.
pub fn parse_rat(s: &str) -> Result<Rat, ScalarError> {
    let s = s.trim();
    let bad = || ScalarError::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(ScalarError::DivisionByZero);
            }
            Ok(Rat::new(a, b))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// Dense univariate polynomial over ℚ, coefficients in ascending degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The polynomial `c · q^k`.
    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut v = vec![Rat::zero(); k + 1];
        v[k] = c;
        Poly::from_coeffs(v)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
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

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    /// Number of vanishing low-order coefficients (the q-adic valuation).
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Multiply by `q^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut v = vec![Rat::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    /// Divide by `q^k`; the caller guarantees exactness.
    fn shift_down(&self, k: usize) -> Poly {
        if k == 0 {
            return self.clone();
        }
        Poly { coeffs: self.coeffs[k..].to_vec() }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|k| self.coeff(k) + o.coeff(k)).collect();
        Poly::from_coeffs(v)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|k| self.coeff(k) - o.coeff(k)).collect();
        Poly::from_coeffs(v)
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if self.is_constant() {
            return o.scale(&self.coeffs[0]);
        }
        if o.is_constant() {
            return self.scale(&o.coeffs[0]);
        }
        let mut v = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::from_coeffs(v)
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv_lead = d.lead().recip();
        let mut r = self.coeffs.clone();
        let mut quo = vec![Rat::zero(); r.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = &r[k + dd] * &inv_lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            quo[k] = c;
        }
        r.truncate(dd);
        (Poly::from_coeffs(quo), Poly::from_coeffs(r))
    }

    /// Exact quotient; the caller guarantees divisibility.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.lead().recip())
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * rat(k as i64))
            .collect();
        Poly::from_coeffs(v)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Split into `content · primitive` where the primitive part has integer
    /// coefficients with gcd one and a positive leading coefficient.
    pub fn content_primitive(&self) -> (Rat, Poly) {
        if self.is_zero() {
            return (Rat::one(), Poly::zero());
        }
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| (c * Rat::from_integer(den_lcm.clone())).to_integer()).collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if self.lead().is_negative() {
            g = -g;
        }
        let content = Rat::new(g.clone(), den_lcm);
        let prim = Poly::from_coeffs(ints.into_iter().map(|c| Rat::from_integer(c / &g)).collect());
        (content, prim)
    }

    /// Square-free decomposition of a monic polynomial: returns `a_1, a_2, …`
    /// with `self = ∏ a_i^i` and each `a_i` square-free, monic, pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<Poly> {
        let f = self.monic();
        if f.is_constant() {
            return Vec::new();
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_exact(&a0);
        let mut c = fp.div_exact(&a0);
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        while !b.is_constant() {
            let a = b.gcd(&d);
            b = b.div_exact(&a);
            c = d.div_exact(&a);
            d = c.sub(&b.derivative());
            out.push(a);
        }
        out
    }

    /// Exact `n`-th root of a polynomial when one exists over ℚ.
    pub fn nth_root(&self, n: u32) -> Option<Poly> {
        if n == 1 || self.is_zero() {
            return Some(self.clone());
        }
        let lead = rat_nth_root(&self.lead(), n)?;
        let parts = self.squarefree_decomposition();
        let mut root = Poly::constant(lead);
        for (k, a) in parts.iter().enumerate() {
            let mult = (k + 1) as u32;
            if a.is_constant() {
                continue;
            }
            if mult % n != 0 {
                return None;
            }
            root = root.mul(&a.pow(mult / n));
        }
        Some(root)
    }
}

/// Exact `n`-th root of a rational number if it exists.
pub fn rat_nth_root(x: &Rat, n: u32) -> Option<Rat> {
    if x.is_zero() {
        return Some(Rat::zero());
    }
    if x.is_negative() && n % 2 == 0 {
        return None;
    }
    let root_int = |v: &BigInt| -> Option<BigInt> {
        let r = v.abs().nth_root(n);
        if num_traits::pow(r.clone(), n as usize) == v.abs() {
            Some(if v.is_negative() { -r } else { r })
        } else {
            None
        }
    };
    Some(Rat::new(root_int(x.numer())?, root_int(x.denom())?))
}

fn fmt_int_poly(p: &Poly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    let mut first = true;
    for k in (0..p.coeffs.len()).rev() {
        let c = &p.coeffs[k];
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { "-" } else { "+" })?;
        }
        first = false;
        let unit = a.is_one();
        if k == 0 || !unit {
            write!(f, "{a}")?;
        }
        match k {
            0 => {}
            1 => write!(f, "q")?,
            _ => write!(f, "q^{k}")?,
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_int_poly(self, f)
    }
}

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

/// Element of ℚ(q) in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    shift: i64,
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { shift: 0, num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Scalar::from_rat(Rat::one())
    }

    pub fn q() -> Self {
        Scalar::q_pow(1)
    }

    /// `q^k` for any integer `k`.
    pub fn q_pow(k: i64) -> Self {
        Scalar { shift: k, num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rat(rat(n))
    }

    pub fn from_rat(r: Rat) -> Self {
        if r.is_zero() {
            return Scalar::zero();
        }
        Scalar { shift: 0, num: Poly::constant(r), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar::canon(0, p, Poly::one())
    }

    /// Build `num / den`; errors if `den` is zero.
    pub fn from_fraction(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::canon(0, num, den))
    }

    fn canon(mut shift: i64, num: Poly, den: Poly) -> Scalar {
        if num.is_zero() {
            return Scalar::zero();
        }
        let vn = num.valuation();
        let vd = den.valuation();
        let mut num = num.shift_down(vn);
        let mut den = den.shift_down(vd);
        shift += vn as i64 - vd as i64;
        if !den.is_constant() && !num.is_constant() {
            let g = num.gcd(&den);
            if !g.is_constant() {
                num = num.div_exact(&g);
                den = den.div_exact(&g);
            }
        }
        let (c, prim) = den.content_primitive();
        if !c.is_one() {
            num = num.scale(&c.recip());
        }
        den = prim;
        Scalar { shift, num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num.is_one() && self.den.is_one()
    }

    /// True when the value is `c · q^k` for a rational `c`.
    pub fn is_monomial(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    /// Units of the field: everything except zero.
    pub fn is_unit(&self) -> bool {
        !self.is_zero()
    }

    /// Numerator as a polynomial in `q` (the power of `q` folded in).
    pub fn numer(&self) -> Poly {
        if self.shift > 0 {
            self.num.shift_up(self.shift as usize)
        } else {
            self.num.clone()
        }
    }

    /// Denominator as a polynomial in `q` (the power of `q` folded in).
    pub fn denom(&self) -> Poly {
        if self.shift < 0 {
            self.den.shift_up((-self.shift) as usize)
        } else {
            self.den.clone()
        }
    }

    /// Returns the rational constant if the value does not depend on `q`.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        (self.shift == 0 && self.num.is_constant() && self.den.is_one()).then(|| self.num.coeff(0))
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(o.shift);
        let a = self.num.shift_up((self.shift - s) as usize);
        let b = o.num.shift_up((o.shift - s) as usize);
        if self.den == o.den {
            return Scalar::canon(s, a.add(&b), self.den.clone());
        }
        let num = a.mul(&o.den).add(&b.mul(&self.den));
        Scalar::canon(s, num, self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Scalar {
        Scalar { shift: self.shift, num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        let shift = self.shift + o.shift;
        if self.den.is_one() && o.den.is_one() {
            return Scalar { shift, num: self.num.mul(&o.num), den: Poly::one() };
        }
        // Cross-cancel before multiplying to keep the gcd small.
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1);
        let d2 = o.den.div_exact(&g1);
        let n2 = o.num.div_exact(&g2);
        let d1 = self.den.div_exact(&g2);
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        let (c, prim) = den.content_primitive();
        Scalar { shift, num: num.scale(&c.recip()), den: prim }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::canon(-self.shift, self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn scale_rat(&self, c: &Rat) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar { shift: self.shift, num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, n: i64) -> Result<Scalar, ScalarError> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        if self.is_zero() {
            return Ok(if n == 0 { Scalar::one() } else { Scalar::zero() });
        }
        if self.is_monomial() {
            let c = num_traits::pow(self.num.coeff(0), n as usize);
            return Ok(Scalar { shift: self.shift * n, num: Poly::constant(c), den: Poly::one() });
        }
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Power for values known to be units (panics on zero with negative `n`).
    pub fn upow(&self, n: i64) -> Scalar {
        self.pow(n).expect("negative power of zero")
    }

    /// Evaluate at a nonzero rational `q0`.
    pub fn specialize(&self, q0: &Rat) -> Result<Rat, ScalarError> {
        if q0.is_zero() {
            return Err(ScalarError::SpecializeAtZero);
        }
        let d = self.den.eval(q0);
        if d.is_zero() {
            return Err(ScalarError::Pole(q0.to_string()));
        }
        let qs = num_traits::pow(q0.clone(), self.shift.unsigned_abs() as usize);
        let qs = if self.shift < 0 { qs.recip() } else { qs };
        Ok(self.num.eval(q0) / d * qs)
    }

    /// `n`-th root inside ℚ(q), if the value is an `n`-th power there.
    pub fn nth_root(&self, n: u32) -> Option<Scalar> {
        assert!(n >= 1);
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        if self.shift % n as i64 != 0 {
            return None;
        }
        let (c, prim) = self.num.content_primitive();
        let c_root = rat_nth_root(&c, n)?;
        let num_root = prim.nth_root(n)?;
        let den_root = self.den.nth_root(n)?;
        Some(Scalar::canon(self.shift / n as i64, num_root.scale(&c_root), den_root))
    }

    /// Square-class test in ℚ(q)^×, decided through square-free decomposition.
    pub fn is_square(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        if self.shift % 2 != 0 {
            return false;
        }
        let (c, prim) = self.num.content_primitive();
        if rat_nth_root(&c, 2).is_none() {
            return false;
        }
        let odd_free = |p: &Poly| {
            p.squarefree_decomposition()
                .iter()
                .enumerate()
                .all(|(k, a)| (k + 1) % 2 == 0 || a.is_constant())
        };
        odd_free(&prim) && odd_free(&self.den)
    }

    pub fn sqrt(&self) -> Option<Scalar> {
        self.nth_root(2)
    }

    /// Integer-coefficient numerator and denominator for printing.
    fn integer_fraction(&self) -> (Poly, Poly) {
        let num = self.numer();
        let den = self.denom();
        let mut l = BigInt::one();
        for c in num.coeffs() {
            l = l.lcm(c.denom());
        }
        let l = Rat::from_integer(l);
        (num.scale(&l), den.scale(&l))
    }

    /// Heuristic size measure, used to pick sparse pivots.
    pub fn weight(&self) -> usize {
        self.num.coeffs.len() + self.den.coeffs.len()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.integer_fraction();
        if d.is_one() {
            fmt_int_poly(&n, f)
        } else {
            write!(f, "(")?;
            fmt_int_poly(&n, f)?;
            write!(f, ")/(")?;
            fmt_int_poly(&d, f)?;
            write!(f, ")")
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Arbitrary but fixed total order (used only for deterministic sorting).
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Q,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, ScalarError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => {}
            'q' => out.push(Tok::Q),
            '+' => out.push(Tok::Plus),
            '-' | '−' => out.push(Tok::Minus),
            '*' => out.push(Tok::Star),
            '/' => out.push(Tok::Slash),
            '^' => out.push(Tok::Caret),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            d if d.is_ascii_digit() => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..=i].iter().collect();
                out.push(Tok::Num(text.parse().expect("digits")));
            }
            other => return Err(ScalarError::Parse(format!("unexpected character {other:?}"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc.add(&self.term()?);
            } else if self.eat(&Tok::Minus) {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = acc.mul(&self.unary()?);
            } else if self.eat(&Tok::Slash) {
                acc = acc.div(&self.unary()?)?;
            } else if matches!(self.peek(), Some(Tok::Q) | Some(Tok::LParen) | Some(Tok::Num(_))) {
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, ScalarError> {
        if self.eat(&Tok::Minus) {
            return Ok(self.unary()?.neg());
        }
        if self.eat(&Tok::Plus) {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar, ScalarError> {
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            let e = self.exponent()?;
            return base.pow(e);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64, ScalarError> {
        let paren = self.eat(&Tok::LParen);
        let neg = self.eat(&Tok::Minus);
        let n = match self.toks.get(self.pos) {
            Some(Tok::Num(n)) => {
                let n: i64 = n.try_into().map_err(|_| ScalarError::Parse("exponent too large".into()))?;
                self.pos += 1;
                n
            }
            _ => return Err(ScalarError::Parse("expected integer exponent".into())),
        };
        if paren && !self.eat(&Tok::RParen) {
            return Err(ScalarError::Parse("missing ')' after exponent".into()));
        }
        Ok(if neg { -n } else { n })
    }

    fn atom(&mut self) -> Result<Scalar, ScalarError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Scalar::from_rat(Rat::from_integer(n)))
            }
            Some(Tok::Q) => {
                self.pos += 1;
                Ok(Scalar::q())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return Err(ScalarError::Parse("missing ')'".into()));
                }
                Ok(v)
            }
            other => Err(ScalarError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks = tokenize(s)?;
        if toks.is_empty() {
            return Err(ScalarError::Parse("empty scalar".into()));
        }
        let mut p = Parser { toks, pos: 0 };
        let v = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(ScalarError::Parse(format!("trailing input in {s:?}")));
        }
        Ok(v)
    }
}

// ---------------------------------------------------------------------------
// q-combinatorics
// ---------------------------------------------------------------------------

/// `(l)_t = 1 + t + … + t^{l−1}`.
pub fn q_integer(l: u32, t: &Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    let mut p = Scalar::one();
    for _ in 0..l {
        acc = acc.add(&p);
        p = p.mul(t);
    }
    acc
}

/// Symmetric bracket `[m]_t = (t^m − t^{−m}) / (t − t^{−1})`.
pub fn q_bracket(m: i64, t: &Scalar) -> Result<Scalar, ScalarError> {
    let den = t.sub(&t.inv()?);
    if den.is_zero() {
        return Err(ScalarError::BracketDenominator);
    }
    t.pow(m)?.sub(&t.pow(-m)?).div(&den)
}

/// Gauss binomial `[m r]_t = [m]! / ([r]! [m−r]!)` built from symmetric brackets.
pub fn gauss_binomial(m: i64, r: i64, t: &Scalar) -> Result<Scalar, ScalarError> {
    if r < 0 || m < r {
        return Err(ScalarError::BinomialRange { m, r });
    }
    let mut num = Scalar::one();
    let mut den = Scalar::one();
    for k in 0..r {
        num = num.mul(&q_bracket(m - k, t)?);
        den = den.mul(&q_bracket(k + 1, t)?);
    }
    num.div(&den)
}

// ---------------------------------------------------------------------------
// Coefficient rings
// ---------------------------------------------------------------------------

/// Commutative coefficient rings that are algebras over ℚ(q).
///
/// Implemented by [`Scalar`] itself and by the square-zero extension
/// [`crate::abgroup::KM`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn from_scalar(s: &Scalar) -> Self;
    fn scale(&self, s: &Scalar) -> Self;
    /// Multiplicative inverse, if the value is a unit.
    fn inv(&self) -> Option<Self>;
    /// Image under the augmentation to ℚ(q).
    fn body(&self) -> Scalar;
    /// Coordinates over ℚ(q) in a basis of the ring truncated to `dim`
    /// coordinates (the ring is free of rank `dim` over ℚ(q)).
    fn coords(&self, dim: usize) -> Vec<Scalar>;
    /// The `k`-th basis element of the ring as a ℚ(q)-space.
    fn basis(k: usize) -> Self;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        Scalar::add(self, o)
    }
    fn neg(&self) -> Self {
        Scalar::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        Scalar::mul(self, o)
    }
    fn from_scalar(s: &Scalar) -> Self {
        s.clone()
    }
    fn scale(&self, s: &Scalar) -> Self {
        Scalar::mul(self, s)
    }
    fn inv(&self) -> Option<Self> {
        Scalar::inv(self).ok()
    }
    fn body(&self) -> Scalar {
        self.clone()
    }
    fn coords(&self, _dim: usize) -> Vec<Scalar> {
        vec![self.clone()]
    }
    fn basis(_k: usize) -> Self {
        Scalar::one()
    }
    fn is_one(&self) -> bool {
        Scalar::is_one(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn canonical_reduction() {
        assert_eq!(s("(q^2-1)/(q-1)"), s("q+1"));
        assert_eq!(s("q").add(&s("-q")), Scalar::zero());
        let a = s("(q^2-1)/q");
        let b = s("q/(q^2-1)");
        assert!(a.mul(&b).is_one());
        assert_eq!(s("q^-1"), s("1/q"));
        assert_eq!(s("(2q+2)/(4q^2-4)"), s("1/(2q-2)"));
    }

    #[test]
    fn powers() {
        assert_eq!(Scalar::q().upow(3), s("q^3"));
        assert_eq!(Scalar::q().upow(-2), s("1/q^2"));
        assert_eq!(s("q+1").upow(2), s("q^2+2q+1"));
        assert_eq!(Scalar::zero().pow(-1), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn printing_roundtrip() {
        for text in ["(q^2-1)/(q)", "q^2+1", "-3", "(1)/(2)", "(q^4+q^2+1)/(q^2)", "(2q-3)/(5q^3+1)"] {
            let v = s(text);
            assert_eq!(s(&v.to_string()), v, "{text}");
        }
        assert_eq!(s("q - q^-1").to_string(), "(q^2-1)/(q)");
    }

    #[test]
    fn specialization() {
        assert_eq!(s("q+q^-1").specialize(&rat(2)).unwrap(), rat_frac(5, 2));
        assert_eq!(s("(q^2-1)/(q-1)").specialize(&rat(1)).unwrap(), rat(2));
        assert!(s("1/(q-1)").specialize(&rat(1)).is_err());
        assert_eq!(Scalar::one().specialize(&rat(0)), Err(ScalarError::SpecializeAtZero));
    }

    #[test]
    fn q_numbers() {
        assert!(q_integer(1, &Scalar::q()).is_one());
        assert_eq!(q_integer(2, &Scalar::q()), s("1+q"));
        assert_eq!(q_integer(3, &s("q^2")), s("1+q^2+q^4"));
        assert!(gauss_binomial(5, 0, &Scalar::q()).unwrap().is_one());
        assert_eq!(gauss_binomial(2, 1, &Scalar::q()).unwrap(), s("q+q^-1"));
        assert_eq!(gauss_binomial(3, 1, &Scalar::q()).unwrap(), s("q^2+1+q^-2"));
        assert!(gauss_binomial(1, 2, &Scalar::q()).is_err());
    }

    #[test]
    fn squares() {
        assert!(s("q^2").is_square());
        assert!(!s("q").is_square());
        assert!(s("4(q+1)^2/(q-3)^4").is_square());
        assert!(!s("2(q+1)^2").is_square());
        assert!(!s("-1").is_square());
        assert_eq!(s("9q^2/(q+1)^2").sqrt().unwrap().upow(2), s("9q^2/(q+1)^2"));
        assert_eq!(s("-8q^3").nth_root(3).unwrap(), s("-2q"));
    }
}
