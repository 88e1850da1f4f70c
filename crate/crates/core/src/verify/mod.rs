//! Congruence checks. Each check embeds both sides in `Q_p`, measures the
//! valuation of their difference and issues a [`CongruenceReport`].
//!
//! "mod `[m]_q`" is read as a valuation threshold `v_p([m]_q)`, computed
//! from the exact bracket rather than assumed.

mod grid;
mod report;

use std::sync::Arc;

pub use grid::{run_grid, GridItem, GridSpec};
pub use report::{
    write_csv, write_json_lines, ClaimId, CongruenceReport, ParamValue, Params, ReportValue, Verdict, MAX_EXACT_LEN,
};

use crate::arith::{pow_u64, rat_int, rat_pow, valuation_rat, RBig};
use crate::chars::{twist, DirichletCharacter};
use crate::error::{Error, Result};
use crate::lfunc::{
    character_sum, gen_q_euler_with, gen_valuation, interpolation_rhs, l_value, normalized_gen_q_euler, GenValue,
    LSeriesQuery, SArg, DEFAULT_RHO_MAX, DEFAULT_TARGET,
};
use crate::padic::{PadicContext, PadicNumber, DEFAULT_PRECISION};
use crate::qnum::{alternating_bracket_sum, check_disc, fermionic_integral, q_bracket, q_bracket_residue, t_sums, EulerCache};

/// Label attached to runs whose `q` lies outside the convergence disc.
pub const OUT_OF_HYPOTHESIS: &str = "out-of-hypothesis, informational";

/// Runs congruence checks at a fixed working precision, sharing q-Euler
/// tables between checks.
#[derive(Clone, Debug)]
pub struct Verifier {
    precision: u32,
    cache: Arc<EulerCache>,
    out_of_hypothesis: bool,
    rho_max: u32,
    lvalue_target: u32,
}

impl Default for Verifier {
    fn default() -> Self {
        Self::new(DEFAULT_PRECISION)
    }
}

fn valuation_threshold(bracket: &RBig, p: u64) -> i64 {
    valuation_rat(bracket, p).unwrap_or(i64::MAX)
}

impl Verifier {
    pub fn new(precision: u32) -> Self {
        Self {
            precision,
            cache: Arc::new(EulerCache::new()),
            out_of_hypothesis: false,
            rho_max: DEFAULT_RHO_MAX,
            lvalue_target: DEFAULT_TARGET,
        }
    }

    pub fn with_cache(mut self, cache: Arc<EulerCache>) -> Self {
        self.cache = cache;
        self
    }

    /// Lets exact checks run for `q` outside the disc; such reports are
    /// labeled informational.
    pub fn allow_out_of_hypothesis(mut self, allow: bool) -> Self {
        self.out_of_hypothesis = allow;
        self
    }

    pub fn with_rho_max(mut self, rho_max: u32) -> Self {
        self.rho_max = rho_max;
        self
    }

    pub fn with_lvalue_target(mut self, target: u32) -> Self {
        self.lvalue_target = target;
        self
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn rho_max(&self) -> u32 {
        self.rho_max
    }

    pub fn cache(&self) -> &Arc<EulerCache> {
        &self.cache
    }

    /// The working context, or why the query is unusable. `exact_only`
    /// checks may run outside the disc when allowed; the returned flag says
    /// whether that happened.
    fn gate(&self, p: u64, q: &RBig, exact_only: bool) -> std::result::Result<(PadicContext, bool), String> {
        let ctx = PadicContext::new(p, self.precision).map_err(|e| e.to_string())?;
        if *q == -RBig::ONE {
            return Err("q = -1 is excluded".into());
        }
        match check_disc(q, p) {
            Ok(()) => Ok((ctx, false)),
            Err(_) if exact_only && self.out_of_hypothesis => Ok((ctx, true)),
            Err(e) => Err(e.to_string()),
        }
    }

    fn open(&self, claim: ClaimId, params: Params, p: u64, q: &RBig, exact_only: bool) -> std::result::Result<(PadicContext, Params), CongruenceReport> {
        match self.gate(p, q, exact_only) {
            Ok((ctx, false)) => Ok((ctx, params)),
            Ok((ctx, true)) => Ok((ctx, params.with("hypothesis", OUT_OF_HYPOTHESIS))),
            Err(e) => Err(CongruenceReport::usage(claim, params, &e)),
        }
    }

    /// `sum_{j<p} (-1)^j [j]_q^n = (2/[2]_q) E_{n,q} mod [p]_q`.
    pub fn check_theorem1(&self, p: u64, q: &RBig, n: usize) -> CongruenceReport {
        let claim = ClaimId::Thm1;
        let params = Params::new().with("p", p).with("q", q.to_string()).with("n", n);
        let (ctx, params) = match self.open(claim, params, p, q, true) {
            Ok(v) => v,
            Err(r) => return r,
        };
        let run = || -> Result<CongruenceReport> {
            let lhs = alternating_bracket_sum(n, p, q)?;
            let rhs = normalized_gen_q_euler(&self.cache, n, &DirichletCharacter::principal(1)?, q, None)?;
            let required = valuation_threshold(&q_bracket(p as i64, q)?, p);
            Ok(CongruenceReport::decide(claim, params.clone(), &GenValue::Rational(lhs), &rhs, required, ctx))
        };
        run().unwrap_or_else(|e| error_report(claim, params.clone(), e))
    }

    /// Integrality of `(2/[2]_q) E_{n,q}` (COR3), of its difference from
    /// the `p`-term sum (COR2), and of the `p`-term sum itself (EQ13).
    pub fn check_integrality(&self, p: u64, q: &RBig, n: usize) -> Vec<CongruenceReport> {
        let base = Params::new().with("p", p).with("q", q.to_string()).with("n", n);
        let claims = [ClaimId::Cor3, ClaimId::Cor2, ClaimId::Eq13];
        let (ctx, params) = match self.gate(p, q, true) {
            Ok((ctx, false)) => (ctx, base),
            Ok((ctx, true)) => (ctx, base.with("hypothesis", OUT_OF_HYPOTHESIS)),
            Err(e) => return claims.into_iter().map(|c| CongruenceReport::usage(c, base.clone(), &e)).collect(),
        };
        let run = || -> Result<Vec<CongruenceReport>> {
            let value = normalized_gen_q_euler(&self.cache, n, &DirichletCharacter::principal(1)?, q, None)?;
            let value = value.as_rational().expect("principal character is rational").clone();
            let sum = alternating_bracket_sum(n, p, q)?;
            let zero = GenValue::Rational(RBig::ZERO);
            Ok(vec![
                CongruenceReport::decide(ClaimId::Cor3, params.clone(), &GenValue::Rational(value.clone()), &zero, 0, ctx),
                CongruenceReport::decide(ClaimId::Cor2, params.clone(), &GenValue::Rational(value - &sum), &zero, 0, ctx),
                CongruenceReport::decide(ClaimId::Eq13, params.clone(), &GenValue::Rational(sum), &zero, 0, ctx),
            ])
        };
        run().unwrap_or_else(|e| claims.into_iter().map(|c| error_report(c, params.clone(), e.clone())).collect())
    }

    /// `T_n(k+1) = T_n(k) mod [p^k]_q` (EQ16) and
    /// `T_n(k+1) = sum_{j<p} (-1)^j [j]_q^n mod [p]_q` (EQ18).
    pub fn check_stability(&self, p: u64, q: &RBig, n: usize, k: u32) -> Vec<CongruenceReport> {
        self.stability_range(p, q, n, n, k)
    }

    pub(crate) fn stability_range(&self, p: u64, q: &RBig, n_min: usize, n_max: usize, k: u32) -> Vec<CongruenceReport> {
        let params_for = |n: usize| Params::new().with("p", p).with("q", q.to_string()).with("n", n).with("k", k);
        let fail_all = |e: &Error| -> Vec<CongruenceReport> {
            (n_min..=n_max)
                .flat_map(|n| [ClaimId::Eq16, ClaimId::Eq18].map(|c| error_report(c, params_for(n), e.clone())))
                .collect()
        };
        let ctx = match self.gate(p, q, false) {
            Ok((ctx, _)) => ctx,
            Err(e) => return fail_all(&Error::Usage(e)),
        };
        let run = || -> Result<Vec<CongruenceReport>> {
            if k == 0 {
                return Err(Error::Usage("k must be positive".into()));
            }
            let upper = t_sums(n_max, k + 1, q, ctx)?;
            let lower = t_sums(n_max, k, q, ctx)?;
            let first = t_sums(n_max, 1, q, ctx)?;
            let req16 = valuation_threshold(&q_bracket(pow_u64(p, k) as i64, q)?, p);
            let req18 = valuation_threshold(&q_bracket(p as i64, q)?, p);
            let mut out = Vec::new();
            for n in n_min..=n_max {
                let up = GenValue::Padic(upper[n].clone());
                out.push(CongruenceReport::decide(ClaimId::Eq16, params_for(n), &up, &GenValue::Padic(lower[n].clone()), req16, ctx));
                out.push(CongruenceReport::decide(ClaimId::Eq18, params_for(n), &up, &GenValue::Padic(first[n].clone()), req18, ctx));
            }
            Ok(out)
        };
        run().unwrap_or_else(|e| fail_all(&e))
    }

    /// `T_n(k) = (2/[2]_q) E_{n,q} mod p^k`.
    pub fn check_witt(&self, p: u64, q: &RBig, n: usize, k: u32) -> CongruenceReport {
        self.witt_range(p, q, n, n, k).pop().expect("one report")
    }

    pub(crate) fn witt_range(&self, p: u64, q: &RBig, n_min: usize, n_max: usize, k: u32) -> Vec<CongruenceReport> {
        let claim = ClaimId::Witt;
        let params_for = |n: usize| Params::new().with("p", p).with("q", q.to_string()).with("n", n).with("k", k);
        let ctx = match self.gate(p, q, false) {
            Ok((ctx, _)) => ctx,
            Err(e) => return (n_min..=n_max).map(|n| CongruenceReport::usage(claim, params_for(n), &e)).collect(),
        };
        let run = || -> Result<Vec<CongruenceReport>> {
            if k == 0 {
                return Err(Error::Usage("k must be positive".into()));
            }
            let sums = t_sums(n_max, k, q, ctx)?;
            let principal = DirichletCharacter::principal(1)?;
            (n_min..=n_max)
                .map(|n| {
                    let rhs = normalized_gen_q_euler(&self.cache, n, &principal, q, None)?;
                    Ok(CongruenceReport::decide(claim, params_for(n), &GenValue::Padic(sums[n].clone()), &rhs, k as i64, ctx))
                })
                .collect()
        };
        run().unwrap_or_else(|e| (n_min..=n_max).map(|n| error_report(claim, params_for(n), e.clone())).collect())
    }

    /// `F(k) = F(k') mod p^n` for `k = k' mod p^n (p-1)`, where
    /// `F(k) = (2/[2]_q) E_{k,chi,q} - (2/[2]_{q^p}) E_{k,chi,q^p}`.
    ///
    /// The same difference of the L-values `L(-k, chi omega^k)` (which carry
    /// the Euler factor `chi(p) [p]_q^k`) is recorded as `l_form_val`.
    pub fn check_kummer(&self, p: u64, q: &RBig, chi: &DirichletCharacter, k: usize, k_prime: usize, n: u32) -> CongruenceReport {
        let claim = ClaimId::Kummer;
        let params = Params::new()
            .with("p", p)
            .with("q", q.to_string())
            .with("chi", chi.id())
            .with("k", k)
            .with("k_prime", k_prime)
            .with("n", n);
        let (ctx, params) = match self.open(claim, params, p, q, true) {
            Ok(v) => v,
            Err(r) => return r,
        };
        let modulus = pow_u64(p, n) * (p - 1);
        if n == 0 || (k as u64) % modulus != (k_prime as u64) % modulus {
            return CongruenceReport::usage(claim, params, &format!("need n >= 1 and k = k' mod {modulus}"));
        }
        let run = || -> Result<CongruenceReport> {
            let qp = rat_pow(q, p as i64)?;
            let f = |k: usize| -> Result<GenValue> {
                let a = normalized_gen_q_euler(&self.cache, k, chi, q, Some(ctx))?;
                let b = normalized_gen_q_euler(&self.cache, k, chi, &qp, Some(ctx))?;
                a.sub(&b, ctx)
            };
            let (lhs, rhs) = (f(k)?, f(k_prime)?);
            let mut params = params.clone();
            let l_form = interpolation_rhs(&self.cache, k, chi, q, ctx)?.sub(&interpolation_rhs(&self.cache, k_prime, chi, q, ctx)?, ctx)?;
            params.set("l_form_val", gen_valuation(&l_form, p).to_string());
            Ok(CongruenceReport::decide(claim, params, &lhs, &rhs, n as i64, ctx))
        };
        run().unwrap_or_else(|e| error_report(claim, params.clone(), e))
    }

    /// `(2/[2]_q) E_{n,chi,q} = sum_{a<p} chi(a) (-1)^a [a]_q^n mod [p]_q` for
    /// `chi` primitive of conductor `p`.
    pub fn check_eq26(&self, p: u64, q: &RBig, chi: &DirichletCharacter, n: usize) -> CongruenceReport {
        let claim = ClaimId::Eq26;
        let params = Params::new().with("p", p).with("q", q.to_string()).with("chi", chi.id()).with("n", n);
        let (ctx, params) = match self.open(claim, params, p, q, true) {
            Ok(v) => v,
            Err(r) => return r,
        };
        if chi.modulus() != p || !chi.is_primitive() {
            return CongruenceReport::usage(claim, params, &format!("{chi} is not primitive of conductor {p}"));
        }
        let run = || -> Result<CongruenceReport> {
            let lhs = normalized_gen_q_euler(&self.cache, n, chi, q, Some(ctx))?;
            let rhs = character_sum(
                chi,
                p,
                |a| {
                    let t = rat_pow(&q_bracket(a as i64, q)?, n as i64)?;
                    Ok(if a % 2 == 0 { t } else { -t })
                },
                Some(ctx),
            )?;
            let required = valuation_threshold(&q_bracket(p as i64, q)?, p);
            Ok(CongruenceReport::decide(claim, params.clone(), &lhs, &rhs, required, ctx))
        };
        run().unwrap_or_else(|e| error_report(claim, params.clone(), e))
    }

    /// `E_{n,chi} = sum_{a<p} chi(a) (-1)^a a^n mod p`, the `q = 1` case.
    pub fn check_eq26_classical(&self, p: u64, chi: &DirichletCharacter, n: usize) -> CongruenceReport {
        let claim = ClaimId::Eq26Classical;
        let params = Params::new().with("p", p).with("q", "1").with("chi", chi.id()).with("n", n);
        let (ctx, params) = match self.open(claim, params, p, &RBig::ONE, true) {
            Ok(v) => v,
            Err(r) => return r,
        };
        if chi.modulus() != p || !chi.is_primitive() {
            return CongruenceReport::usage(claim, params, &format!("{chi} is not primitive of conductor {p}"));
        }
        let run = || -> Result<CongruenceReport> {
            let lhs = gen_q_euler_with(&self.cache, n, chi, &RBig::ONE, Some(ctx))?;
            let rhs = character_sum(
                chi,
                p,
                |a| {
                    let t = rat_pow(&rat_int(a as i64), n as i64)?;
                    Ok(if a % 2 == 0 { t } else { -t })
                },
                Some(ctx),
            )?;
            Ok(CongruenceReport::decide(claim, params.clone(), &lhs, &rhs, 1, ctx))
        };
        run().unwrap_or_else(|e| error_report(claim, params.clone(), e))
    }

    /// `L(-k, chi omega^k)` from the L-series against the closed form
    /// `(2/[2]_q) E_{k,chi,q} - chi(p) [p]_q^k (2/[2]_{q^p}) E_{k,chi,q^p}`,
    /// required to agree to one digit less than the series certifies.
    pub fn check_interpolation(&self, p: u64, q: &RBig, chi: &DirichletCharacter, k: usize) -> CongruenceReport {
        let claim = ClaimId::Eq25;
        let params = Params::new().with("p", p).with("q", q.to_string()).with("chi", chi.id()).with("k", k);
        let (ctx, mut params) = match self.open(claim, params, p, q, false) {
            Ok(v) => v,
            Err(r) => return r,
        };
        params.set("chi_p", chi.eval(p as i64).to_string());
        let run = || -> Result<CongruenceReport> {
            let twisted = twist(chi, k as i64, ctx)?;
            let mut query = LSeriesQuery::new(SArg::Integer(-(k as i64)), twisted.clone(), q.clone(), ctx);
            query.rho_max = self.rho_max;
            query.target = self.lvalue_target.min(ctx.precision());
            let rhs = interpolation_rhs(&self.cache, k, chi, q, ctx)?;
            let lv = l_value(&query)?;
            let mut params = params.clone();
            params.set("twisted_chi", twisted.id());
            params.set("rho_used", lv.rho_used.clone());
            params.set("certified_abs_precision", lv.certified_abs_precision.clone());
            let lhs = GenValue::Padic(lv.value.clone());
            if !lv.certified {
                params.set("error", "convergence not certified");
                return Ok(CongruenceReport::insufficient(
                    claim,
                    params,
                    ReportValue::Padic(lv.value.clone()),
                    ReportValue::from_gen(&rhs, ctx),
                    lv.certified_digits() as i64 - 1,
                    lv.certified_digits(),
                ));
            }
            Ok(CongruenceReport::decide(claim, params, &lhs, &rhs, lv.certified_digits() as i64 - 1, ctx))
        };
        run().unwrap_or_else(|e| error_report(claim, params.clone(), e))
    }

    /// The level-`L` Riemann sums of the fermionic integral satisfy
    /// `q I(f_1) + I(f) = [2]_q f(0)` mod `p^L` for `f(x) = [x]_q^m`.
    pub fn check_functional_equation(&self, p: u64, q: &RBig, m: u32, level: u32) -> CongruenceReport {
        let claim = ClaimId::Eq4;
        let params = Params::new().with("p", p).with("q", q.to_string()).with("m", m).with("level", level);
        let (ctx, params) = match self.open(claim, params, p, q, false) {
            Ok(v) => v,
            Err(r) => return r,
        };
        let run = || -> Result<CongruenceReport> {
            let f = |x: u64| -> PadicNumber {
                let b = q_bracket_residue(x, q, ctx).expect("q checked");
                PadicNumber::from_residue(&b, ctx.precision(), ctx).pow_int(m as i64).expect("non-negative power")
            };
            let shifted = fermionic_integral(|x| f(x + 1), level, q, ctx)?;
            let plain = fermionic_integral(f, level, q, ctx)?;
            let lhs = &(&PadicNumber::from_rational(q, ctx) * &shifted) + &plain;
            let f0 = if m == 0 { RBig::ONE } else { RBig::ZERO };
            let rhs = (RBig::ONE + q) * f0;
            Ok(CongruenceReport::decide(claim, params.clone(), &GenValue::Padic(lhs), &GenValue::Rational(rhs), level as i64, ctx))
        };
        run().unwrap_or_else(|e| error_report(claim, params.clone(), e))
    }
}

fn error_report(claim: ClaimId, params: Params, e: Error) -> CongruenceReport {
    if e.is_usage() {
        CongruenceReport::usage(claim, params, &e.to_string())
    } else {
        CongruenceReport::insufficient(claim, params.with("error", e.to_string()), ReportValue::Missing, ReportValue::Missing, 0, 0)
    }
}
