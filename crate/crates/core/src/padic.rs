//! Finite-precision elements of Q_p.
//!
//! A nonzero value is stored as `p^valuation * unit` where the unit is known
//! modulo `p^precision` (the relative precision). Sums of terms with
//! different valuations lose digits explicitly, so the absolute precision
//! `valuation + precision` of every result is a sound claim about the true
//! value. A value with relative precision zero is only known to be
//! `O(p^valuation)`; exact zero is kept separate and has infinite valuation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::{Serialize, SerializeStruct, Serializer};

use dashu_base::UnsignedAbs;

use crate::arith::{is_prime, split_p_power, valuation_int, IBig, RBig, ResidueRing, UBig};
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 40;

/// Extra digits the log/exp series must clear beyond the target precision.
const SERIES_GUARD: i64 = 2;

/// Transcendental results with fewer known digits than this are refused.
pub const MIN_CORRECT_DIGITS: i64 = 3;

static ZERO_UNIT: UBig = UBig::ZERO;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PadicContext {
    p: u64,
    precision: u32,
}

impl PadicContext {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::domain(format!("p must be an odd prime, got {p}")));
        }
        if precision < 2 {
            return Err(Error::domain(format!("precision must be at least 2, got {precision}")));
        }
        Ok(Self { p, precision })
    }

    pub fn with_default_precision(p: u64) -> Result<Self> {
        Self::new(p, DEFAULT_PRECISION)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        Self::new(self.p, precision)
    }

    pub fn p_big(&self) -> UBig {
        UBig::from(self.p)
    }

    pub fn p_pow(&self, e: u32) -> UBig {
        self.p_big().pow(e as usize)
    }

    /// `p^N`.
    pub fn modulus(&self) -> UBig {
        self.p_pow(self.precision)
    }

    /// Residues modulo `p^N`.
    pub fn ring(&self) -> ResidueRing {
        ResidueRing::new(self.modulus())
    }
}

/// A p-adic valuation, `Infinite` only for exact zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn at_least(self, bound: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= bound,
            Valuation::Infinite => true,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Zero,
    /// `precision == 0` means the value is only known to vanish mod
    /// `p^valuation`; `unit` is then 0.
    Approx { valuation: i64, unit: UBig, precision: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicNumber {
    ctx: PadicContext,
    repr: Repr,
}

impl PadicNumber {
    pub fn zero(ctx: PadicContext) -> Self {
        Self { ctx, repr: Repr::Zero }
    }

    pub fn one(ctx: PadicContext) -> Self {
        Self::from_integer(1, ctx)
    }

    /// The value `O(p^abs)`: known to vanish to absolute precision `abs`.
    pub fn inexact_zero(abs: i64, ctx: PadicContext) -> Self {
        Self { ctx, repr: Repr::Approx { valuation: abs, unit: UBig::ZERO, precision: 0 } }
    }

    pub fn from_integer(x: i64, ctx: PadicContext) -> Self {
        Self::from_rational(&RBig::from(IBig::from(x)), ctx)
    }

    /// Embeds a rational with full relative precision `N`.
    pub fn from_rational(r: &RBig, ctx: PadicContext) -> Self {
        if r.is_zero() {
            return Self::zero(ctx);
        }
        let p = ctx.p_big();
        let mut num = r.numerator().unsigned_abs();
        let mut den = r.denominator().clone();
        let a = num.remove(&p).unwrap_or(0) as i64;
        let b = den.remove(&p).unwrap_or(0) as i64;
        let ring = ctx.ring();
        let mut unit = ring.mul(&ring.reduce(&num), &ring.inv(&den).expect("p-free denominator"));
        if r.numerator() < &IBig::ZERO {
            unit = ring.neg(&unit);
        }
        Self { ctx, repr: Repr::Approx { valuation: a - b, unit, precision: ctx.precision } }
    }

    /// An integral value known modulo `p^abs`, given by a residue.
    pub fn from_residue(residue: &UBig, abs: u32, ctx: PadicContext) -> Self {
        let abs = abs.min(ctx.precision);
        let m = ctx.p_pow(abs);
        Self::from_shifted(ctx, 0, residue % &m, abs)
    }

    /// `p^v * s` with `s` known modulo `p^rel`.
    fn from_shifted(ctx: PadicContext, v: i64, s: UBig, rel: u32) -> Self {
        if s == UBig::ZERO {
            return Self::inexact_zero(v + rel as i64, ctx);
        }
        let (e, unit) = split_p_power(&s, ctx.p);
        let precision = rel - e as u32;
        Self { ctx, repr: Repr::Approx { valuation: v + e as i64, unit, precision } }
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p
    }

    /// Stored valuation. For a value with zero relative precision this is
    /// only a lower bound (equal to the absolute precision).
    pub fn valuation(&self) -> Valuation {
        match &self.repr {
            Repr::Zero => Valuation::Infinite,
            Repr::Approx { valuation, .. } => Valuation::Finite(*valuation),
        }
    }

    /// The unit part; 0 for (exact or inexact) zero.
    pub fn unit(&self) -> &UBig {
        match &self.repr {
            Repr::Zero => &ZERO_UNIT,
            Repr::Approx { unit, .. } => unit,
        }
    }

    /// Relative precision; `None` for exact zero.
    pub fn relative_precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Approx { precision, .. } => Some(*precision),
        }
    }

    /// Absolute precision `valuation + precision`; `None` (infinite) for exact zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Approx { valuation, precision, .. } => Some(valuation + *precision as i64),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// Zero to all known digits (exact zero included).
    pub fn is_indistinguishable_from_zero(&self) -> bool {
        match &self.repr {
            Repr::Zero => true,
            Repr::Approx { precision, .. } => *precision == 0,
        }
    }

    /// Drops digits beyond absolute precision `abs`.
    pub fn truncate(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::Zero => Self::inexact_zero(abs, self.ctx),
            Repr::Approx { valuation, unit, precision } => {
                let current = valuation + *precision as i64;
                if abs >= current {
                    return self.clone();
                }
                if abs <= *valuation {
                    return Self::inexact_zero(abs, self.ctx);
                }
                let rel = (abs - valuation) as u32;
                let unit = unit % self.ctx.p_pow(rel);
                Self { ctx: self.ctx, repr: Repr::Approx { valuation: *valuation, unit, precision: rel } }
            }
        }
    }

    /// Moves the value to another context with the same prime, capping the
    /// relative precision at the new working precision.
    pub fn rescale(&self, ctx: PadicContext) -> Result<Self> {
        if ctx.p != self.ctx.p {
            return Err(Error::ContextMismatch);
        }
        let repr = match &self.repr {
            Repr::Zero => Repr::Zero,
            Repr::Approx { valuation, unit, precision } => {
                let precision = (*precision).min(ctx.precision);
                Repr::Approx { valuation: *valuation, unit: unit % ctx.p_pow(precision), precision }
            }
        };
        Ok(Self { ctx, repr })
    }

    /// Residue modulo `p^digits` of an integral value known to at least that
    /// many absolute digits.
    pub fn residue(&self, digits: u32) -> Result<UBig> {
        let m = self.ctx.p_pow(digits);
        match &self.repr {
            Repr::Zero => Ok(UBig::ZERO),
            Repr::Approx { valuation, unit, precision } => {
                if (digits as i64) > valuation + *precision as i64 {
                    return Err(Error::InsufficientPrecision(format!(
                        "{digits} digits requested from a value known to {} digits",
                        valuation + *precision as i64
                    )));
                }
                if *valuation < 0 {
                    return Err(Error::domain("residue of a non-integral p-adic number"));
                }
                if *valuation >= digits as i64 {
                    return Ok(UBig::ZERO);
                }
                Ok((unit * self.ctx.p_pow(*valuation as u32)) % m)
            }
        }
    }

    /// True when `self` and `other` agree modulo `p^abs`, i.e. their
    /// difference is known to have valuation at least `abs`.
    pub fn agrees_with(&self, other: &Self, abs: i64) -> bool {
        let diff = self - other;
        diff.valuation().at_least(abs)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        let (v1, u1, r1, v2, u2, r2) = match (&self.repr, &other.repr) {
            (Repr::Zero, _) => return Ok(other.clone()),
            (_, Repr::Zero) => return Ok(self.clone()),
            (
                Repr::Approx { valuation: v1, unit: u1, precision: r1 },
                Repr::Approx { valuation: v2, unit: u2, precision: r2 },
            ) => (*v1, u1, *r1, *v2, u2, *r2),
        };
        let abs = (v1 + r1 as i64).min(v2 + r2 as i64);
        let v = v1.min(v2);
        if abs <= v {
            return Ok(Self::inexact_zero(abs, self.ctx));
        }
        let rel = (abs - v) as u32;
        let m = self.ctx.p_pow(rel);
        let shift = |u: &UBig, w: i64| u * self.ctx.p_pow((w - v) as u32);
        let s = (shift(u1, v1) + shift(u2, v2)) % m;
        Ok(Self::from_shifted(self.ctx, v, s, rel))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => Ok(Self::zero(self.ctx)),
            (
                Repr::Approx { valuation: v1, unit: u1, precision: r1 },
                Repr::Approx { valuation: v2, unit: u2, precision: r2 },
            ) => {
                let precision = (*r1).min(*r2);
                let v = v1 + v2;
                if precision == 0 {
                    return Ok(Self::inexact_zero(v, self.ctx));
                }
                let unit = (u1 * u2) % self.ctx.p_pow(precision);
                Ok(Self { ctx: self.ctx, repr: Repr::Approx { valuation: v, unit, precision } })
            }
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        match &self.repr {
            Repr::Zero => Err(Error::domain("division by zero")),
            Repr::Approx { precision: 0, .. } => Err(Error::InsufficientPrecision(
                "division by a value indistinguishable from zero".into(),
            )),
            Repr::Approx { valuation, unit, precision } => {
                let ring = ResidueRing::new(self.ctx.p_pow(*precision));
                let unit = ring.inv(unit).expect("units are invertible");
                Ok(Self {
                    ctx: self.ctx,
                    repr: Repr::Approx { valuation: -valuation, unit, precision: *precision },
                })
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inverse()?)
    }

    /// Integer power by repeated squaring; negative exponents invert first.
    pub fn pow_int(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = Self::one(self.ctx);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }
}

impl Neg for &PadicNumber {
    type Output = PadicNumber;

    fn neg(self) -> PadicNumber {
        match &self.repr {
            Repr::Approx { valuation, unit, precision } if *precision > 0 => {
                let m = self.ctx.p_pow(*precision);
                let unit = (&m - unit) % &m;
                PadicNumber {
                    ctx: self.ctx,
                    repr: Repr::Approx { valuation: *valuation, unit, precision: *precision },
                }
            }
            _ => self.clone(),
        }
    }
}

impl Neg for PadicNumber {
    type Output = PadicNumber;

    fn neg(self) -> PadicNumber {
        -&self
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&PadicNumber> for &PadicNumber {
            type Output = PadicNumber;

            fn $method(self, rhs: &PadicNumber) -> PadicNumber {
                #[allow(clippy::redundant_closure_call)]
                ($body)(self, rhs).expect("p-adic operands live in different contexts")
            }
        }

        impl $trait<PadicNumber> for PadicNumber {
            type Output = PadicNumber;

            fn $method(self, rhs: PadicNumber) -> PadicNumber {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &PadicNumber, b: &PadicNumber| a.checked_add(b));
forward_binop!(Sub, sub, |a: &PadicNumber, b: &PadicNumber| a.checked_add(&-b));
forward_binop!(Mul, mul, |a: &PadicNumber, b: &PadicNumber| a.checked_mul(b));

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.ctx.p;
        match &self.repr {
            Repr::Zero => f.write_str("0"),
            Repr::Approx { valuation, precision: 0, .. } => write!(f, "O({p}^{valuation})"),
            Repr::Approx { valuation, unit, precision } => {
                let abs = valuation + *precision as i64;
                if *valuation == 0 {
                    write!(f, "{unit} + O({p}^{abs})")
                } else {
                    write!(f, "{unit}*{p}^{valuation} + O({p}^{abs})")
                }
            }
        }
    }
}

/// `{"p": "3", "val": "1", "unit": "...", "prec": "40"}`; exact zero has
/// `val` and `prec` equal to `"inf"`.
impl Serialize for PadicNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PadicNumber", 4)?;
        s.serialize_field("p", &self.ctx.p.to_string())?;
        s.serialize_field("val", &self.valuation().to_string())?;
        s.serialize_field("unit", &self.unit().to_string())?;
        let prec = match self.relative_precision() {
            Some(r) => r.to_string(),
            None => "inf".to_string(),
        };
        s.serialize_field("prec", &prec)?;
        s.end()
    }
}

/// The Teichmüller representative of `a`: the unique `(p-1)`-th root of
/// unity congruent to `a` mod `p`, found as the fixed point of `x -> x^p`.
pub fn teichmuller(a: i64, ctx: PadicContext) -> Result<PadicNumber> {
    let p = ctx.p as i64;
    if a.rem_euclid(p) == 0 {
        return Err(Error::domain(format!("teichmuller({a}) undefined: {p} divides {a}")));
    }
    let ring = ctx.ring();
    let mut x = ring.reduce_signed(&IBig::from(a));
    for _ in 0..=ctx.precision {
        let next = ring.pow(&x, ctx.p);
        if next == x {
            break;
        }
        x = next;
    }
    Ok(PadicNumber::from_residue(&x, ctx.precision, ctx))
}

fn ensure_enough_digits(x: PadicNumber, what: &str) -> Result<PadicNumber> {
    match x.absolute_precision() {
        Some(abs) if abs < MIN_CORRECT_DIGITS => Err(Error::InsufficientPrecision(format!(
            "{what} would carry only {abs} correct digits"
        ))),
        _ => Ok(x),
    }
}

/// p-adic logarithm on `1 + pZ_p`.
pub fn plog(x: &PadicNumber) -> Result<PadicNumber> {
    let ctx = x.ctx;
    let outside = || Error::OutsideDisc(format!("log_p needs v_p(x - 1) >= 1, got x = {x}"));
    let (unit, abs) = match &x.repr {
        Repr::Approx { valuation: 0, unit, precision } if *precision > 0 => (unit, *precision),
        _ => return Err(outside()),
    };
    let y = unit + ctx.p_pow(abs) - UBig::ONE;
    let y = y % ctx.p_pow(abs);
    if y == UBig::ZERO {
        return ensure_enough_digits(PadicNumber::inexact_zero(abs as i64, ctx), "log_p");
    }
    let (v, _) = split_p_power(&y, ctx.p);
    if v == 0 {
        return Err(outside());
    }
    let target = abs as i64;
    // smallest K with K*v - floor(log_p K) >= target + guard; later terms only grow
    let mut last = 1i64;
    while last * v as i64 - ilog(last as u64, ctx.p) as i64 <= target + SERIES_GUARD {
        last += 1;
    }
    let extra = ilog(last as u64, ctx.p);
    let wide = ResidueRing::new(ctx.p_pow(abs + extra));
    let narrow = ResidueRing::new(ctx.p_pow(abs));
    let mut power = UBig::ONE;
    let mut sum = UBig::ZERO;
    for k in 1..=last {
        power = wide.mul(&power, &y);
        let (e, cofactor) = split_p_power(&UBig::from(k as u64), ctx.p);
        let shifted = &power / ctx.p_pow(e as u32);
        let term = narrow.mul(&narrow.reduce(&shifted), &narrow.inv(&cofactor).expect("p-free"));
        sum = if k % 2 == 1 { narrow.add(&sum, &term) } else { narrow.sub(&sum, &term) };
    }
    ensure_enough_digits(PadicNumber::from_residue(&sum, abs, ctx), "log_p")
}

/// p-adic exponential on `pZ_p`.
pub fn pexp(z: &PadicNumber) -> Result<PadicNumber> {
    let ctx = z.ctx;
    let target = match z.absolute_precision() {
        None => ctx.precision,
        Some(abs) => abs.min(ctx.precision as i64).max(0) as u32,
    };
    let (v, unit) = match &z.repr {
        Repr::Zero => return Ok(PadicNumber::one(ctx)),
        Repr::Approx { precision: 0, valuation, .. } if *valuation >= 1 => {
            return ensure_enough_digits(PadicNumber::one(ctx).truncate(target as i64), "exp_p");
        }
        Repr::Approx { valuation, unit, .. } if *valuation >= 1 => (*valuation as u64, unit),
        _ => {
            return Err(Error::OutsideDisc(format!("exp_p needs v_p(z) >= 1, got z = {z}")));
        }
    };
    let p = ctx.p as i64;
    // v_p(k!) <= (k-1)/(p-1); stop once k*v - (k-1)/(p-1) clears the target
    let bound = |k: i64| k * v as i64 * (p - 1) - (k - 1);
    let mut last = 1i64;
    while bound(last) < (target as i64 + SERIES_GUARD) * (p - 1) {
        last += 1;
    }
    let extra = factorial_valuation(last as u64, ctx.p) as u32;
    let wide = ResidueRing::new(ctx.p_pow(target + extra));
    let narrow = ResidueRing::new(ctx.p_pow(target));
    let zr = wide.reduce(&(unit * ctx.p_pow(v as u32)));
    let mut power = UBig::ONE;
    let mut fact_cofactor = UBig::ONE;
    let mut fact_val = 0u32;
    let mut sum = UBig::ONE % narrow.modulus();
    for k in 1..=last as u64 {
        power = wide.mul(&power, &zr);
        let (e, c) = split_p_power(&UBig::from(k), ctx.p);
        fact_val += e as u32;
        fact_cofactor = narrow.mul(&fact_cofactor, &c);
        let shifted = &power / ctx.p_pow(fact_val);
        let term = narrow.mul(&narrow.reduce(&shifted), &narrow.inv(&fact_cofactor).expect("p-free"));
        sum = narrow.add(&sum, &term);
    }
    ensure_enough_digits(PadicNumber::from_residue(&sum, target, ctx), "exp_p")
}

/// `x^s = exp(s log x)` for `v_p(x - 1) >= 1` and `s` in Z_p.
pub fn ppow(x: &PadicNumber, s: &PadicNumber) -> Result<PadicNumber> {
    if !s.valuation().at_least(0) && !s.is_indistinguishable_from_zero() {
        return Err(Error::domain(format!("exponent must lie in Z_p, got {s}")));
    }
    let log = plog(x)?;
    pexp(&s.checked_mul(&log)?)
}

/// floor(log_p n) for n >= 1.
fn ilog(n: u64, p: u64) -> u32 {
    let mut e = 0;
    let mut m = n;
    while m >= p {
        m /= p;
        e += 1;
    }
    e
}

fn factorial_valuation(k: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut q = k;
    while q > 0 {
        q /= p;
        total += q;
    }
    total
}

/// `v_p` of an integer, `Valuation::Infinite` for zero.
pub fn valuation_of_int(x: &IBig, p: u64) -> Valuation {
    match valuation_int(x, p) {
        Some(v) => Valuation::Finite(v as i64),
        None => Valuation::Infinite,
    }
}
