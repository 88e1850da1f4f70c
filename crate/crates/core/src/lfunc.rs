//! Generalized q-Euler numbers attached to a character and the p-adic
//! q-L-function built from them.

use std::fmt;

use serde::Serialize;

use crate::arith::{lcm_u64, parse_rational, rat_int, rat_pow, valuation_rat, RBig, UBig};
use crate::chars::{materialize, CharacterValue, DirichletCharacter};
use crate::error::{Error, Result};
use crate::padic::{plog, pexp, teichmuller, PadicContext, PadicNumber, Valuation, MIN_CORRECT_DIGITS};
use crate::qnum::{check_disc, q_bracket, q_euler_polynomial_with, q_residue, EulerCache};

/// Default number of ladder levels tried by [`l_value`].
pub const DEFAULT_RHO_MAX: u32 = 8;

/// Default certified precision [`l_value`] stops at.
pub const DEFAULT_TARGET: u32 = 6;

/// A generalized q-Euler number: exact when the character is rational-valued,
/// otherwise embedded in `Z_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenValue {
    Rational(RBig),
    Padic(PadicNumber),
}

impl GenValue {
    pub fn as_rational(&self) -> Option<&RBig> {
        match self {
            GenValue::Rational(r) => Some(r),
            GenValue::Padic(_) => None,
        }
    }

    pub fn to_padic(&self, ctx: PadicContext) -> Result<PadicNumber> {
        match self {
            GenValue::Rational(r) => Ok(PadicNumber::from_rational(r, ctx)),
            GenValue::Padic(x) => x.rescale(ctx),
        }
    }

    fn scale(&self, r: &RBig) -> Self {
        match self {
            GenValue::Rational(v) => GenValue::Rational(v * r),
            GenValue::Padic(x) => GenValue::Padic(x * &PadicNumber::from_rational(r, x.context())),
        }
    }

    /// Difference, exact when both sides are rational.
    pub fn sub(&self, other: &Self, ctx: PadicContext) -> Result<Self> {
        match (self, other) {
            (GenValue::Rational(a), GenValue::Rational(b)) => Ok(GenValue::Rational(a - b)),
            _ => Ok(GenValue::Padic(&self.to_padic(ctx)? - &other.to_padic(ctx)?)),
        }
    }
}

impl fmt::Display for GenValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenValue::Rational(r) => write!(f, "{r}"),
            GenValue::Padic(x) => write!(f, "{x}"),
        }
    }
}

fn combine_classes(sums: &[RBig], chi: &DirichletCharacter, ctx: Option<PadicContext>) -> Result<GenValue> {
    match sums.len() {
        1 => Ok(GenValue::Rational(sums[0].clone())),
        2 => Ok(GenValue::Rational(&sums[0] - &sums[1])),
        m => {
            let ctx = ctx.ok_or_else(|| {
                Error::Usage(format!("character {chi} of order {m} needs a prime to embed its values"))
            })?;
            let mat = materialize(chi, ctx)?;
            let mut acc = PadicNumber::zero(ctx);
            for (j, s) in sums.iter().enumerate() {
                if *s == RBig::ZERO {
                    continue;
                }
                let zeta = PadicNumber::from_residue(mat.root_residue(j), ctx.precision(), ctx);
                acc = &acc + &(&zeta * &PadicNumber::from_rational(s, ctx));
            }
            Ok(GenValue::Padic(acc))
        }
    }
}

/// Index of `zeta_m^j` among the `m`-th roots, for a value of a character of order `m`.
fn class_of(v: CharacterValue, m: u64) -> Option<usize> {
    match v {
        CharacterValue::Zero => None,
        CharacterValue::Root { exponent, order } => Some((exponent * (m / order)) as usize),
    }
}

/// `sum_{a < count} chi(a) term(a)` for rational terms, exact when `chi` is
/// rational-valued.
pub fn character_sum<F>(chi: &DirichletCharacter, count: u64, term: F, ctx: Option<PadicContext>) -> Result<GenValue>
where
    F: Fn(u64) -> Result<RBig>,
{
    let m = chi.order();
    let mut sums = vec![RBig::ZERO; m as usize];
    for a in 0..count {
        if let Some(j) = class_of(chi.eval(a as i64), m) {
            sums[j] += term(a)?;
        }
    }
    combine_classes(&sums, chi, ctx)
}

/// `E_{n,chi,q} = [d]_q^n ([2]_q/[2]_{q^d}) sum_{a<d} chi(a) (-1)^a E_{n,q^d}(a/d)`.
///
/// `ctx` is only needed for characters of order above 2.
pub fn gen_q_euler(n: usize, chi: &DirichletCharacter, q: &RBig, ctx: Option<PadicContext>) -> Result<GenValue> {
    gen_q_euler_with(&EulerCache::new(), n, chi, q, ctx)
}

pub fn gen_q_euler_with(
    cache: &EulerCache,
    n: usize,
    chi: &DirichletCharacter,
    q: &RBig,
    ctx: Option<PadicContext>,
) -> Result<GenValue> {
    if *q == -RBig::ONE {
        return Err(Error::domain("q-Euler numbers are undefined at q = -1"));
    }
    let d = chi.modulus();
    let base = rat_pow(q, d as i64)?;
    let table = cache.table(&base, n)?;
    let m = chi.order();
    let mut sums = vec![RBig::ZERO; m as usize];
    for a in 0..d {
        let Some(j) = class_of(chi.eval(a as i64), m) else { continue };
        let e = q_euler_polynomial_with(&table, n, q, a, d)?;
        if a % 2 == 0 {
            sums[j] += e;
        } else {
            sums[j] -= e;
        }
    }
    let factor = rat_pow(&q_bracket(d as i64, q)?, n as i64)? * (RBig::ONE + q) / (RBig::ONE + &base);
    for s in &mut sums {
        *s *= &factor;
    }
    combine_classes(&sums, chi, ctx)
}

/// `(2/[2]_q) E_{n,chi,q}`, the normalization the Riemann sums converge to.
pub fn normalized_gen_q_euler(
    cache: &EulerCache,
    n: usize,
    chi: &DirichletCharacter,
    q: &RBig,
    ctx: Option<PadicContext>,
) -> Result<GenValue> {
    let e = gen_q_euler_with(cache, n, chi, q, ctx)?;
    Ok(e.scale(&(rat_int(2) / (RBig::ONE + q))))
}

/// `sum_{x < d p^level} chi(x) (-1)^x [x]_q^n` modulo `p^N`.
///
/// The finite sum itself is known to the full working precision; it
/// approximates `(2/[2]_q) E_{n,chi,q}` to about `level` digits.
pub fn gen_q_euler_riemann(
    n: usize,
    chi: &DirichletCharacter,
    q: &RBig,
    ctx: PadicContext,
    level: u32,
) -> Result<PadicNumber> {
    Ok(gen_q_euler_riemann_sums(n, chi, q, ctx, level)?.swap_remove(n))
}

/// The Riemann sums for every exponent `0..=n_max` in one pass.
pub fn gen_q_euler_riemann_sums(
    n_max: usize,
    chi: &DirichletCharacter,
    q: &RBig,
    ctx: PadicContext,
    level: u32,
) -> Result<Vec<PadicNumber>> {
    check_disc(q, ctx.p())?;
    if level == 0 {
        return Err(Error::domain("level must be positive"));
    }
    let mat = materialize(chi, ctx)?;
    let ring = ctx.ring();
    let qr = q_residue(q, ctx)?;
    let terms = chi.modulus() * crate::arith::pow_u64(ctx.p(), level);
    let mut sums = vec![UBig::ZERO; n_max + 1];
    let mut bracket = UBig::ZERO;
    for x in 0..terms {
        let c = mat.eval_residue(x as i64);
        if c != UBig::ZERO {
            let mut power = if x % 2 == 0 { c } else { ring.neg(&c) };
            for s in sums.iter_mut() {
                *s = ring.add(s, &power);
                power = ring.mul(&power, &bracket);
            }
        }
        bracket = ring.add(&ring.mul(&bracket, &qr), &UBig::ONE);
    }
    Ok(sums.iter().map(|s| PadicNumber::from_residue(s, ctx.precision(), ctx)).collect())
}

/// `<x> = [x]_q / omega(x)`, a principal unit for `p` not dividing `x`.
pub fn angle(x: i64, q: &RBig, ctx: PadicContext) -> Result<PadicNumber> {
    check_disc(q, ctx.p())?;
    if x.rem_euclid(ctx.p() as i64) == 0 {
        return Err(Error::domain(format!("<x> needs x prime to p, got x = {x}")));
    }
    let bracket = PadicNumber::from_rational(&q_bracket(x, q)?, ctx);
    bracket.checked_div(&teichmuller(x, ctx)?)
}

/// The argument of the L-function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SArg {
    Integer(i64),
    Padic(PadicNumber),
}

impl SArg {
    /// Parses `"a"` or `"a/b"`; non-integers must be p-integral.
    pub fn parse(text: &str, ctx: PadicContext) -> Result<Self> {
        let r = parse_rational(text)?;
        if r.denominator() == &UBig::ONE {
            let v: i64 = r
                .numerator()
                .try_into()
                .map_err(|_| Error::Usage(format!("s = {text} is out of range")))?;
            return Ok(SArg::Integer(v));
        }
        match valuation_rat(&r, ctx.p()) {
            Some(v) if v < 0 => Err(Error::OutsideDisc(format!("s = {text} is not {}-integral", ctx.p()))),
            _ => Ok(SArg::Padic(PadicNumber::from_rational(&r, ctx))),
        }
    }
}

impl fmt::Display for SArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SArg::Integer(k) => write!(f, "{k}"),
            SArg::Padic(x) => write!(f, "{x}"),
        }
    }
}

/// `L(s, chi)` at one point.
#[derive(Clone, Debug)]
pub struct LSeriesQuery {
    pub s: SArg,
    pub chi: DirichletCharacter,
    pub q: RBig,
    pub ctx: PadicContext,
    /// Stop once this many digits are certified.
    pub target: u32,
    pub rho_max: u32,
}

impl LSeriesQuery {
    pub fn new(s: SArg, chi: DirichletCharacter, q: RBig, ctx: PadicContext) -> Self {
        Self { s, chi, q, ctx, target: DEFAULT_TARGET.min(ctx.precision()), rho_max: DEFAULT_RHO_MAX }
    }
}

/// An L-value with the precision its level ladder supports.
#[derive(Clone, Debug, Serialize)]
pub struct LValue {
    pub s: String,
    pub chi: String,
    pub q: String,
    pub p: String,
    pub rho_used: String,
    pub certified_abs_precision: String,
    pub certified: bool,
    pub value: PadicNumber,
}

impl LValue {
    pub fn certified_digits(&self) -> u32 {
        self.certified_abs_precision.parse().unwrap_or(0)
    }

    pub fn rho(&self) -> u32 {
        self.rho_used.parse().unwrap_or(0)
    }
}

/// `L(s, chi) = lim sum_{1 <= x <= dbar p^rho, p !| x} chi(x) (-1)^x <x>^{-s}`
/// with `dbar = lcm(d, p)`.
///
/// The partial sums are nested, so one pass produces every level. The
/// certified precision at level `rho` is `v_p(S_rho - S_{rho-1})`; the
/// ladder stops when it reaches the target or at `rho_max`, and the value
/// is truncated to what is certified. Fewer than three certified digits is
/// reported as uncertified whatever the target.
pub fn l_value(query: &LSeriesQuery) -> Result<LValue> {
    let ctx = query.ctx;
    let p = ctx.p();
    check_disc(&query.q, p)?;
    if query.target > ctx.precision() {
        return Err(Error::Usage(format!(
            "target precision {} exceeds working precision {}",
            query.target,
            ctx.precision()
        )));
    }
    if query.rho_max < 2 {
        return Err(Error::Usage("rho_max must be at least 2".into()));
    }
    let mat = materialize(&query.chi, ctx)?;
    let ring = ctx.ring();
    let qr = q_residue(&query.q, ctx)?;
    let dbar = lcm_u64(query.chi.modulus(), p);

    let mut inv_teich = vec![UBig::ZERO; p as usize];
    for (a, slot) in inv_teich.iter_mut().enumerate().skip(1) {
        let w = teichmuller(a as i64, ctx)?.residue(ctx.precision())?;
        *slot = ring.inv(&w).expect("unit");
    }
    let power = |angle: &UBig| -> Result<UBig> {
        match &query.s {
            SArg::Integer(s) => {
                let e = s.unsigned_abs();
                if *s <= 0 {
                    Ok(ring.pow(angle, e))
                } else {
                    Ok(ring.pow(&ring.inv(angle).expect("unit"), e))
                }
            }
            SArg::Padic(s) => {
                let a = PadicNumber::from_residue(angle, ctx.precision(), ctx);
                let z = plog(&a)? * -s.clone();
                pexp(&z)?.residue(ctx.precision())
            }
        }
    };

    let mut sum = UBig::ZERO;
    let mut bracket = UBig::ONE; // [1]_q
    let mut previous: Option<UBig> = None;
    let mut x: u64 = 1;
    let mut best = (0u32, 0u32, UBig::ZERO);
    for rho in 1..=query.rho_max {
        let end = dbar * crate::arith::pow_u64(p, rho);
        while x <= end {
            if x % p != 0 {
                let c = mat.eval_residue(x as i64);
                if c != UBig::ZERO {
                    let angle = ring.mul(&bracket, &inv_teich[(x % p) as usize]);
                    let term = ring.mul(&c, &power(&angle)?);
                    sum = if x % 2 == 0 { ring.add(&sum, &term) } else { ring.sub(&sum, &term) };
                }
            }
            bracket = ring.add(&ring.mul(&bracket, &qr), &UBig::ONE);
            x += 1;
        }
        if let Some(prev) = &previous {
            let diff = ring.sub(&sum, prev);
            let agreed = if diff == UBig::ZERO {
                ctx.precision()
            } else {
                crate::arith::split_p_power(&diff, p).0 as u32
            };
            best = (rho, agreed, sum.clone());
            if agreed >= query.target {
                break;
            }
        }
        previous = Some(sum.clone());
    }
    let (rho, agreed, value) = best;
    let value = PadicNumber::from_residue(&value, ctx.precision(), ctx).truncate(agreed as i64);
    Ok(LValue {
        s: query.s.to_string(),
        chi: query.chi.id(),
        q: query.q.to_string(),
        p: p.to_string(),
        rho_used: rho.to_string(),
        certified_abs_precision: agreed.to_string(),
        certified: agreed >= query.target && agreed as i64 >= MIN_CORRECT_DIGITS,
        value,
    })
}

/// `(2/[2]_q) E_{k,chi,q} - chi(p) [p]_q^k (2/[2]_{q^p}) E_{k,chi,q^p}`, the
/// value of `L(-k, chi omega^k)`.
pub fn interpolation_rhs(
    cache: &EulerCache,
    k: usize,
    chi: &DirichletCharacter,
    q: &RBig,
    ctx: PadicContext,
) -> Result<GenValue> {
    check_disc(q, ctx.p())?;
    let p = ctx.p();
    let first = normalized_gen_q_euler(cache, k, chi, q, Some(ctx))?;
    let chi_p = chi.eval(p as i64);
    if chi_p.is_zero() {
        return Ok(first);
    }
    let qp = rat_pow(q, p as i64)?;
    let euler_factor = rat_pow(&q_bracket(p as i64, q)?, k as i64)?;
    let second = normalized_gen_q_euler(cache, k, chi, &qp, Some(ctx))?.scale(&euler_factor);
    let second = match chi_p.to_rational() {
        Some(r) => second.scale(&r),
        None => {
            let mat = materialize(chi, ctx)?;
            GenValue::Padic(&second.to_padic(ctx)? * &mat.eval(p as i64))
        }
    };
    first.sub(&second, ctx)
}

/// `v_p` of a value, `Infinite` for exact zero.
pub fn gen_valuation(v: &GenValue, p: u64) -> Valuation {
    match v {
        GenValue::Rational(r) => match valuation_rat(r, p) {
            Some(v) => Valuation::Finite(v),
            None => Valuation::Infinite,
        },
        GenValue::Padic(x) => x.valuation(),
    }
}
