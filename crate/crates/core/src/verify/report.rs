use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::arith::{valuation_rat, RBig};
use crate::lfunc::GenValue;
use crate::padic::{PadicContext, PadicNumber, Valuation};

/// Exact values longer than this are reported through their p-adic image.
pub const MAX_EXACT_LEN: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClaimId {
    Thm1,
    Cor2,
    Cor3,
    Eq13,
    Eq16,
    Eq18,
    Eq4,
    Witt,
    Kummer,
    Eq25,
    Eq26,
    Eq26Classical,
}

impl ClaimId {
    pub fn as_str(self) -> &'static str {
        match self {
            ClaimId::Thm1 => "THM1",
            ClaimId::Cor2 => "COR2",
            ClaimId::Cor3 => "COR3",
            ClaimId::Eq13 => "EQ13",
            ClaimId::Eq16 => "EQ16",
            ClaimId::Eq18 => "EQ18",
            ClaimId::Eq4 => "EQ4",
            ClaimId::Witt => "WITT",
            ClaimId::Kummer => "KUMMER",
            ClaimId::Eq25 => "EQ25",
            ClaimId::Eq26 => "EQ26",
            ClaimId::Eq26Classical => "EQ26_CLASSICAL",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ClaimId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Fail,
    InsufficientPrecision,
    /// The query broke a precondition; says nothing about the mathematics.
    UsageError,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::InsufficientPrecision => "INSUFFICIENT_PRECISION",
            Verdict::UsageError => "USAGE_ERROR",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// A parameter value; integers order numerically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ParamValue {
    Int(i64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Text(t) => f.write_str(t),
        }
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<u32> for ParamValue {
    fn from(v: u32) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}

/// Named parameters of a check, kept sorted by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Params(BTreeMap<String, ParamValue>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<ParamValue>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&ParamValue> {
        self.0.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ParamValue)> {
        self.0.iter()
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.0 {
            if !first {
                f.write_str(";")?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, &v.to_string())?;
        }
        map.end()
    }
}

/// One side of a reported comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReportValue {
    Exact(RBig),
    Padic(PadicNumber),
    Missing,
}

impl ReportValue {
    /// Keeps short rationals exact and embeds long ones.
    pub fn from_gen(v: &GenValue, ctx: PadicContext) -> Self {
        match v {
            GenValue::Rational(r) => Self::from_rational(r, ctx),
            GenValue::Padic(x) => ReportValue::Padic(x.clone()),
        }
    }

    pub fn from_rational(r: &RBig, ctx: PadicContext) -> Self {
        if r.numerator().to_string().len() + r.denominator().to_string().len() < MAX_EXACT_LEN {
            ReportValue::Exact(r.clone())
        } else {
            ReportValue::Padic(PadicNumber::from_rational(r, ctx))
        }
    }
}

impl fmt::Display for ReportValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportValue::Exact(r) => write!(f, "{r}"),
            ReportValue::Padic(x) => write!(f, "{x}"),
            ReportValue::Missing => Ok(()),
        }
    }
}

impl Serialize for ReportValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ReportValue::Exact(r) => s.serialize_str(&r.to_string()),
            ReportValue::Padic(x) => x.serialize(s),
            ReportValue::Missing => s.serialize_none(),
        }
    }
}

/// The outcome of checking one congruence `lhs = rhs mod p^required_val`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub claim: ClaimId,
    pub params: Params,
    pub lhs: ReportValue,
    pub rhs: ReportValue,
    pub required_val: i64,
    pub achieved_val: Valuation,
    pub verdict: Verdict,
    /// Absolute precision the verdict was decided at.
    pub prec: u32,
}

impl CongruenceReport {
    /// Decides `lhs = rhs mod p^required`.
    ///
    /// An exact difference is judged exactly. Otherwise PASS needs the
    /// difference known beyond `required` digits, and FAIL needs it known
    /// nonzero below `required`; anything else is insufficient precision.
    pub fn decide(
        claim: ClaimId,
        params: Params,
        lhs: &GenValue,
        rhs: &GenValue,
        required: i64,
        ctx: PadicContext,
    ) -> Self {
        let n = ctx.precision();
        let (achieved, prec) = match lhs.sub(rhs, ctx) {
            Ok(GenValue::Rational(d)) => {
                let v = valuation_rat(&d, ctx.p()).map_or(Valuation::Infinite, Valuation::Finite);
                (v, n)
            }
            Ok(GenValue::Padic(d)) => {
                let abs = d.absolute_precision().map_or(n as i64, |a| a.min(n as i64));
                (d.valuation(), abs.max(0) as u32)
            }
            Err(e) => return Self::usage(claim, params, &e.to_string()),
        };
        let verdict = if (prec as i64) <= required {
            Verdict::InsufficientPrecision
        } else if achieved.at_least(required) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            claim,
            params,
            lhs: ReportValue::from_gen(lhs, ctx),
            rhs: ReportValue::from_gen(rhs, ctx),
            required_val: required,
            achieved_val: achieved,
            verdict,
            prec,
        }
    }

    pub fn usage(claim: ClaimId, params: Params, error: &str) -> Self {
        Self {
            claim,
            params: params.with("error", error),
            lhs: ReportValue::Missing,
            rhs: ReportValue::Missing,
            required_val: 0,
            achieved_val: Valuation::Finite(0),
            verdict: Verdict::UsageError,
            prec: 0,
        }
    }

    pub fn insufficient(claim: ClaimId, params: Params, lhs: ReportValue, rhs: ReportValue, required: i64, prec: u32) -> Self {
        Self {
            claim,
            params,
            lhs,
            rhs,
            required_val: required,
            achieved_val: Valuation::Finite(prec as i64),
            verdict: Verdict::InsufficientPrecision,
            prec,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    pub fn csv_header() -> [&'static str; 8] {
        ["claim", "params", "lhs", "rhs", "required_val", "achieved_val", "verdict", "prec"]
    }

    pub fn csv_record(&self) -> [String; 8] {
        [
            self.claim.to_string(),
            self.params.to_string(),
            self.lhs.to_string(),
            self.rhs.to_string(),
            self.required_val.to_string(),
            self.achieved_val.to_string(),
            self.verdict.to_string(),
            self.prec.to_string(),
        ]
    }
}

impl Serialize for CongruenceReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(8))?;
        map.serialize_entry("claim", &self.claim)?;
        map.serialize_entry("params", &self.params)?;
        map.serialize_entry("lhs", &self.lhs)?;
        map.serialize_entry("rhs", &self.rhs)?;
        map.serialize_entry("required_val", &self.required_val.to_string())?;
        map.serialize_entry("achieved_val", &self.achieved_val.to_string())?;
        map.serialize_entry("verdict", &self.verdict)?;
        map.serialize_entry("prec", &self.prec.to_string())?;
        map.end()
    }
}

/// Writes reports as JSON lines.
pub fn write_json_lines<W: std::io::Write + ?Sized>(out: &mut W, reports: &[CongruenceReport]) -> std::io::Result<()> {
    for r in reports {
        writeln!(out, "{}", r.to_json())?;
    }
    Ok(())
}

/// Writes reports as CSV with a header row.
pub fn write_csv<W: std::io::Write>(out: W, reports: &[CongruenceReport]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CongruenceReport::csv_header())?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}
