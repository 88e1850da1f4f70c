//! Dirichlet characters of odd modulus.
//!
//! A character is an exponent vector on the CRT generators of `(Z/dZ)*`
//! (smallest primitive root of each odd prime-power factor). Values are kept
//! abstract as roots of unity `zeta_m^j` and only embedded into `Z_p` on
//! request, which needs `m | p - 1`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::arith::{factorize, gcd_u64, lcm_u64, rat_int, RBig, UBig};
use crate::error::{Error, Result};
use crate::padic::{teichmuller, PadicContext, PadicNumber};

/// Moduli at or above this are rejected; log tables are built eagerly.
pub const MAX_MODULUS: u64 = 1_000_000;

const NOT_A_UNIT: u32 = u32::MAX;

#[derive(Debug)]
struct Component {
    prime: u64,
    exp: u32,
    modulus: u64,
    phi: u64,
    generator: u64,
    log: Vec<u32>,
}

impl Component {
    fn new(prime: u64, exp: u32) -> Self {
        let modulus = prime.pow(exp);
        let phi = modulus / prime * (prime - 1);
        let generator = primitive_root(prime, modulus, phi);
        let mut log = vec![NOT_A_UNIT; modulus as usize];
        let mut x = 1u64;
        for i in 0..phi {
            log[x as usize] = i as u32;
            x = x * generator % modulus;
        }
        Self { prime, exp, modulus, phi, generator, log }
    }

    fn log_of(&self, x: i64) -> Option<u64> {
        let r = x.rem_euclid(self.modulus as i64) as usize;
        match self.log[r] {
            NOT_A_UNIT => None,
            l => Some(l as u64),
        }
    }

    /// `p^c` for the least `c` with the component trivial on `1 + p^c Z`.
    fn conductor(&self, a: u64) -> u64 {
        if a == 0 {
            return 1;
        }
        let mut f = self.prime;
        let mut kernel_gen = self.prime - 1;
        loop {
            // exponent of the generator of ker((Z/p^e)* -> (Z/f)*)
            if (a as u128 * kernel_gen as u128) % self.phi as u128 == 0 {
                return f;
            }
            f *= self.prime;
            kernel_gen *= self.prime;
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn primitive_root(prime: u64, modulus: u64, phi: u64) -> u64 {
    let factors = factorize(phi);
    (2..modulus)
        .find(|&g| g % prime != 0 && factors.iter().all(|&(r, _)| pow_mod(g, phi / r, modulus) != 1))
        .unwrap_or(1)
}

/// The smallest primitive root modulo the odd prime `p`.
pub fn smallest_primitive_root(p: u64) -> u64 {
    primitive_root(p, p, p - 1)
}

/// `(Z/dZ)*` with its CRT generators and discrete-log tables.
#[derive(Debug)]
pub struct DirichletGroup {
    modulus: u64,
    components: Vec<Component>,
    exponent: u64,
}

impl DirichletGroup {
    /// The group for odd `d`, shared between callers.
    pub fn new(d: u64) -> Result<Arc<Self>> {
        if d == 0 || d % 2 == 0 {
            return Err(Error::domain(format!("modulus must be odd and positive, got {d}")));
        }
        if d >= MAX_MODULUS {
            return Err(Error::domain(format!("modulus {d} is too large (limit {MAX_MODULUS})")));
        }
        static GROUPS: OnceLock<Mutex<HashMap<u64, Arc<DirichletGroup>>>> = OnceLock::new();
        let groups = GROUPS.get_or_init(Default::default);
        if let Some(g) = groups.lock().expect("group cache poisoned").get(&d) {
            return Ok(g.clone());
        }
        let components: Vec<_> = factorize(d).into_iter().map(|(p, e)| Component::new(p, e)).collect();
        let exponent = components.iter().fold(1, |m, c| lcm_u64(m, c.phi));
        let group = Arc::new(Self { modulus: d, components, exponent });
        Ok(groups.lock().expect("group cache poisoned").entry(d).or_insert(group).clone())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `phi(d)`.
    pub fn order(&self) -> u64 {
        self.components.iter().map(|c| c.phi).product()
    }

    /// `(p^e, generator)` per CRT factor, in increasing prime order.
    pub fn generators(&self) -> Vec<(u64, u64)> {
        self.components.iter().map(|c| (c.modulus, c.generator)).collect()
    }

    /// The character at position `index` of the enumeration.
    pub fn character(self: &Arc<Self>, index: u64) -> Result<DirichletCharacter> {
        if index >= self.order() {
            return Err(Error::Usage(format!(
                "character index {index} out of range: modulus {} has {} characters",
                self.modulus,
                self.order()
            )));
        }
        let mut rest = index;
        let mut exponents = vec![0; self.components.len()];
        for (slot, c) in exponents.iter_mut().zip(&self.components).rev() {
            *slot = rest % c.phi;
            rest /= c.phi;
        }
        Ok(DirichletCharacter::from_exponents(self.clone(), exponents))
    }

    pub fn characters(self: &Arc<Self>) -> Vec<DirichletCharacter> {
        (0..self.order()).map(|i| self.character(i).expect("index in range")).collect()
    }
}

/// `zeta_m^j` in lowest terms, or zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CharacterValue {
    Zero,
    Root { exponent: u64, order: u64 },
}

impl CharacterValue {
    fn root(exponent: u64, order: u64) -> Self {
        let exponent = exponent % order;
        let g = gcd_u64(exponent, order);
        if exponent == 0 {
            return CharacterValue::Root { exponent: 0, order: 1 };
        }
        CharacterValue::Root { exponent: exponent / g, order: order / g }
    }

    pub fn one() -> Self {
        CharacterValue::Root { exponent: 0, order: 1 }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CharacterValue::Zero)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (CharacterValue::Root { exponent: a, order: m }, CharacterValue::Root { exponent: b, order: n }) => {
                let l = lcm_u64(*m, *n);
                Self::root(a * (l / m) + b * (l / n), l)
            }
            _ => CharacterValue::Zero,
        }
    }

    /// The value as a rational when it is `0` or `+-1`.
    pub fn to_rational(&self) -> Option<RBig> {
        match self {
            CharacterValue::Zero => Some(RBig::ZERO),
            CharacterValue::Root { order: 1, .. } => Some(RBig::ONE),
            CharacterValue::Root { order: 2, .. } => Some(rat_int(-1)),
            _ => None,
        }
    }
}

impl fmt::Display for CharacterValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharacterValue::Zero => write!(f, "0"),
            CharacterValue::Root { order: 1, .. } => write!(f, "1"),
            CharacterValue::Root { order: 2, .. } => write!(f, "-1"),
            CharacterValue::Root { exponent, order } => write!(f, "zeta_{order}^{exponent}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    group: Arc<DirichletGroup>,
    exponents: Vec<u64>,
    order: u64,
    conductor: u64,
    parity: i8,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.modulus == other.group.modulus && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    fn from_exponents(group: Arc<DirichletGroup>, exponents: Vec<u64>) -> Self {
        let order = group
            .components
            .iter()
            .zip(&exponents)
            .fold(1, |m, (c, &a)| lcm_u64(m, c.phi / gcd_u64(c.phi, a)));
        let conductor = group.components.iter().zip(&exponents).map(|(c, &a)| c.conductor(a)).product();
        let mut chi = Self { group, exponents, order, conductor, parity: 1 };
        chi.parity = if chi.eval(-1).is_one() { 1 } else { -1 };
        chi
    }

    /// The principal character modulo `d`.
    pub fn principal(d: u64) -> Result<Self> {
        DirichletGroup::new(d)?.character(0)
    }

    pub fn group(&self) -> &Arc<DirichletGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    /// Exponents on the CRT generators, each reduced mod that factor's `phi`.
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// `chi(-1)`.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    /// Position in the enumeration of characters of this modulus.
    pub fn index(&self) -> u64 {
        self.group
            .components
            .iter()
            .zip(&self.exponents)
            .fold(0, |acc, (c, &a)| acc * c.phi + a)
    }

    /// `"d:index"`.
    pub fn id(&self) -> String {
        format!("{}:{}", self.modulus(), self.index())
    }

    pub fn eval(&self, x: i64) -> CharacterValue {
        let m = self.group.exponent;
        let mut total = 0u64;
        for (c, &a) in self.group.components.iter().zip(&self.exponents) {
            let Some(l) = c.log_of(x) else {
                return CharacterValue::Zero;
            };
            total = (total + (a * l % c.phi) * (m / c.phi)) % m;
        }
        CharacterValue::root(total, m)
    }

    /// The character of modulus `new_modulus` (a multiple of the current
    /// one) induced from this one.
    pub fn lift(&self, new_modulus: u64) -> Result<Self> {
        if new_modulus % self.modulus() != 0 {
            return Err(Error::domain(format!("{new_modulus} is not a multiple of {}", self.modulus())));
        }
        let target = DirichletGroup::new(new_modulus)?;
        let exponents = target
            .components
            .iter()
            .map(|c| {
                let old = self.group.components.iter().position(|o| o.prime == c.prime);
                match old {
                    None => 0,
                    Some(i) => {
                        let o = &self.group.components[i];
                        let l = o.log_of(c.generator as i64).expect("generator is a unit");
                        let scaled = self.exponents[i] as u128 * l as u128 % o.phi as u128;
                        (scaled as u64 * (c.phi / o.phi)) % c.phi
                    }
                }
            })
            .collect();
        Ok(Self::from_exponents(target, exponents))
    }

    /// Product of characters with the same modulus.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.modulus() != other.modulus() {
            return Err(Error::domain("characters have different moduli"));
        }
        let exponents = self
            .group
            .components
            .iter()
            .zip(self.exponents.iter().zip(&other.exponents))
            .map(|(c, (a, b))| (a + b) % c.phi)
            .collect();
        Ok(Self::from_exponents(self.group.clone(), exponents))
    }

    /// `chi^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Self {
        let exponents = self
            .group
            .components
            .iter()
            .zip(&self.exponents)
            .map(|(c, &a)| {
                let k = k.rem_euclid(c.phi as i64) as u128;
                (a as u128 * k % c.phi as u128) as u64
            })
            .collect();
        Self::from_exponents(self.group.clone(), exponents)
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// All `phi(d)` characters mod `d`; index 0 is principal.
pub fn enumerate_characters(d: u64) -> Result<Vec<DirichletCharacter>> {
    Ok(DirichletGroup::new(d)?.characters())
}

pub fn char_eval(chi: &DirichletCharacter, x: i64) -> CharacterValue {
    chi.eval(x)
}

pub fn conductor_of(chi: &DirichletCharacter) -> u64 {
    chi.conductor()
}

/// Parses `"d:index"`.
pub fn parse_character_id(text: &str) -> Result<DirichletCharacter> {
    let bad = || Error::Usage(format!("character id {text:?} must look like \"d:index\""));
    let (d, i) = text.trim().split_once(':').ok_or_else(bad)?;
    let d: u64 = d.parse().map_err(|_| bad())?;
    let i: u64 = i.parse().map_err(|_| bad())?;
    DirichletGroup::new(d).map_err(|e| Error::Usage(e.to_string()))?.character(i)
}

/// The Teichmuller character `omega` as an abstract character mod `p`.
pub fn omega(p: u64) -> Result<DirichletCharacter> {
    // the generator mod p is the primitive root c used by `materialize`, and
    // omega(c) = teichmuller(c) = zeta_{p-1}
    let group = DirichletGroup::new(p)?;
    if group.components.len() != 1 || group.components[0].exp != 1 {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(DirichletCharacter::from_exponents(group, vec![1]))
}

/// `omega` viewed modulo `m`, a multiple of `p`.
fn omega_mod(p: u64, m: u64) -> Result<DirichletCharacter> {
    let group = DirichletGroup::new(m)?;
    let base = DirichletGroup::new(p)?;
    let exponents = group
        .components
        .iter()
        .map(|comp| {
            if comp.prime != p {
                return 0;
            }
            // omega(g) = zeta_{p-1}^{log_c(g mod p)} = zeta_phi^{p^(e-1) log_c(g mod p)}
            let l = base.components[0].log_of(comp.generator as i64).expect("unit");
            (l * (comp.phi / (p - 1))) % comp.phi
        })
        .collect();
    Ok(DirichletCharacter::from_exponents(group, exponents))
}

/// `chi * omega^k` on modulus `lcm(d, p)`.
pub fn twist(chi: &DirichletCharacter, k: i64, ctx: PadicContext) -> Result<DirichletCharacter> {
    let m = lcm_u64(chi.modulus(), ctx.p());
    let base = chi.lift(m)?;
    base.mul(&omega_mod(ctx.p(), m)?.pow(k))
}

/// A character with values embedded in `Z_p` (mod `p^N`).
#[derive(Clone, Debug)]
pub struct MaterializedCharacter {
    chi: DirichletCharacter,
    ctx: PadicContext,
    roots: Vec<UBig>,
}

impl MaterializedCharacter {
    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    /// `chi(x) mod p^N`; zero off the units.
    pub fn eval_residue(&self, x: i64) -> UBig {
        match self.chi.eval(x) {
            CharacterValue::Zero => UBig::ZERO,
            CharacterValue::Root { exponent, order } => {
                self.roots[(exponent * (self.chi.order / order)) as usize].clone()
            }
        }
    }

    /// `zeta_m^j mod p^N` for the order `m` of the character.
    pub fn root_residue(&self, j: usize) -> &UBig {
        &self.roots[j % self.roots.len()]
    }

    pub fn eval(&self, x: i64) -> PadicNumber {
        let v = self.chi.eval(x);
        match v.to_rational() {
            Some(r) => PadicNumber::from_rational(&r, self.ctx),
            None => PadicNumber::from_residue(&self.eval_residue(x), self.ctx.precision(), self.ctx),
        }
    }
}

/// Embeds the values of `chi` into `Z_p`, sending `zeta_m` to
/// `teichmuller(c)^((p-1)/m)` for the smallest primitive root `c` mod `p`.
pub fn materialize(chi: &DirichletCharacter, ctx: PadicContext) -> Result<MaterializedCharacter> {
    let p = ctx.p();
    let m = chi.order();
    if (p - 1) % m != 0 {
        return Err(Error::UnsupportedEmbedding { order: m, p });
    }
    let ring = ctx.ring();
    let c = smallest_primitive_root(p);
    let zeta = teichmuller(c as i64, ctx)?.pow_int(((p - 1) / m) as i64)?;
    let zeta = zeta.residue(ctx.precision())?;
    let mut roots = vec![ring.reduce(&UBig::ONE)];
    for _ in 1..m {
        let next = ring.mul(roots.last().unwrap(), &zeta);
        roots.push(next);
    }
    if m == 2 {
        roots[1] = ring.neg(&UBig::ONE);
    }
    Ok(MaterializedCharacter { chi: chi.clone(), ctx, roots })
}

/// `omega` with values in `Z_p`.
pub fn teichmuller_character(ctx: PadicContext) -> Result<MaterializedCharacter> {
    materialize(&omega(ctx.p())?, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(p: u64) -> PadicContext {
        PadicContext::with_default_precision(p).unwrap()
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(enumerate_characters(4).is_err());
        assert!(enumerate_characters(0).is_err());
        assert!(enumerate_characters(1_000_001).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let one = enumerate_characters(1).unwrap();
        assert_eq!(one.len(), 1);
        for x in [-7i64, 0, 1, 2, 10] {
            assert!(one[0].eval(x).is_one());
        }
        let five = enumerate_characters(5).unwrap();
        assert_eq!(five.iter().map(|c| c.order()).collect::<Vec<_>>(), vec![1, 4, 2, 4]);
        assert_eq!(enumerate_characters(9).unwrap().len(), 6);
        for d in [1u64, 3, 5, 7, 9, 15, 21, 25, 27, 45, 105] {
            let chars = enumerate_characters(d).unwrap();
            assert_eq!(chars.len() as u64, crate::arith::totient(d));
            assert!(chars[0].is_principal());
            for (i, c) in chars.iter().enumerate() {
                assert_eq!(c.index(), i as u64);
                assert_eq!(parse_character_id(&c.id()).unwrap(), *c);
                for other in &chars[..i] {
                    assert_ne!(c, other);
                }
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let quad = parse_character_id("5:2").unwrap();
        assert_eq!(quad.eval(2).to_rational(), Some(rat_int(-1)));
        assert_eq!(quad.eval(4).to_rational(), Some(RBig::ONE));
        assert!(quad.eval(10).is_zero());
        assert!(enumerate_characters(9).unwrap()[0].eval(2).is_one());
        assert!(enumerate_characters(9).unwrap()[0].eval(3).is_zero());
        assert!(parse_character_id("5:9").is_err());
        assert!(parse_character_id("5").is_err());
        assert!(parse_character_id("6:0").is_err());
    }

    fn gcd_i(x: i64, d: u64) -> u64 {
        gcd_u64(x.rem_euclid(d as i64) as u64, d)
    }

    #[test]
    fn zero_exactly_off_units() {
        for d in [1u64, 9, 15, 45] {
            for chi in enumerate_characters(d).unwrap() {
                for x in -50i64..50 {
                    assert_eq!(chi.eval(x).is_zero(), gcd_i(x, d) > 1, "{chi} x={x}");
                }
            }
        }
    }

    #[test]
    fn multiplicative_on_random_pairs() {
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed % 10_000) as i64 - 5000
        };
        for d in [5u64, 9, 15, 21, 63] {
            for chi in enumerate_characters(d).unwrap() {
                for _ in 0..200 {
                    let (x, y) = (next(), next());
                    assert_eq!(chi.eval(x).mul(&chi.eval(y)), chi.eval(x * y), "{chi} {x} {y}");
                }
            }
        }
    }

    #[test]
    fn orthogonality() {
        for d in [3u64, 5, 9, 15, 25, 35] {
            for chi in enumerate_characters(d).unwrap().iter().skip(1) {
                // values of a nontrivial character are equidistributed over
                // the m-th roots of unity, so they sum to zero
                let mut counts = HashMap::new();
                for x in 0..d as i64 {
                    if let CharacterValue::Root { exponent, order } = chi.eval(x) {
                        *counts.entry(exponent * (chi.order() / order)).or_insert(0u64) += 1;
                    }
                }
                assert_eq!(counts.len() as u64, chi.order(), "{chi}");
                let first = counts.values().next().copied();
                assert!(counts.values().all(|&c| Some(c) == first), "{chi}");
            }
        }
    }

    #[test]
    fn parity_matches_value_at_minus_one() {
        for d in [3u64, 5, 7, 9, 15, 21] {
            for chi in enumerate_characters(d).unwrap() {
                let v = chi.eval(-1).to_rational().unwrap();
                assert_eq!(v, rat_int(chi.parity() as i64));
            }
        }
        assert_eq!(parse_character_id("5:2").unwrap().parity(), 1);
        assert_eq!(parse_character_id("3:1").unwrap().parity(), -1);
    }

    /// Smallest f | d such that chi(x) = 1 whenever x is a unit with x = 1 mod f.
    fn brute_conductor(chi: &DirichletCharacter) -> u64 {
        let d = chi.modulus();
        (1..=d)
            .filter(|f| d % f == 0)
            .find(|&f| (0..d as i64).all(|x| gcd_i(x, d) > 1 || x as u64 % f != 1 % f || chi.eval(x).is_one()))
            .unwrap()
    }

    #[test]
    fn conductor_examples_and_brute_force() {
        assert_eq!(conductor_of(&DirichletCharacter::principal(45).unwrap()), 1);
        let quad = parse_character_id("5:2").unwrap();
        assert_eq!(conductor_of(&quad), 5);
        assert!(quad.is_primitive());
        let induced = quad.lift(15).unwrap();
        assert_eq!(conductor_of(&induced), 5);
        assert!(!induced.is_primitive());
        for d in [9u64, 15, 25, 27, 45, 63, 75, 125] {
            for chi in enumerate_characters(d).unwrap() {
                assert_eq!(chi.conductor(), brute_conductor(&chi), "{chi}");
            }
        }
    }

    #[test]
    fn lift_agrees_on_units() {
        for (d, m) in [(5u64, 15u64), (3, 45), (9, 27), (1, 7), (15, 75)] {
            for chi in enumerate_characters(d).unwrap() {
                let up = chi.lift(m).unwrap();
                assert_eq!(up.order(), chi.order());
                assert_eq!(up.conductor(), chi.conductor());
                for x in 0..m as i64 {
                    if gcd_i(x, m) == 1 {
                        assert_eq!(up.eval(x), chi.eval(x), "{chi} -> {m}, x={x}");
                    }
                }
            }
        }
        assert!(parse_character_id("5:1").unwrap().lift(21).is_err());
    }

    #[test]
    fn teichmuller_character_examples() {
        for p in [3u64, 5, 7, 11, 13] {
            let c = ctx(p);
            let w = teichmuller_character(c).unwrap();
            assert_eq!(w.character().order(), p - 1);
            assert!(w.eval(1).agrees_with(&PadicNumber::one(c), 40));
            assert!(w.eval(p as i64 - 1).agrees_with(&PadicNumber::from_integer(-1, c), 40));
            for x in 1..3 * p as i64 {
                let expect = if x as u64 % p == 0 { PadicNumber::zero(c) } else { teichmuller(x, c).unwrap() };
                assert!(w.eval(x).agrees_with(&expect, 40), "p={p} x={x}");
            }
        }
        let w5 = teichmuller_character(PadicContext::new(5, 2).unwrap()).unwrap();
        assert_eq!(w5.eval_residue(2), UBig::from(7u8));
    }

    #[test]
    fn twist_examples() {
        for p in [3u64, 5, 7] {
            let c = ctx(p);
            let principal = DirichletCharacter::principal(1).unwrap();
            assert_eq!(twist(&principal, 1, c).unwrap(), omega(p).unwrap());
            for d in [1u64, 3, 5, 15] {
                for chi in enumerate_characters(d).unwrap() {
                    let m = lcm_u64(d, p);
                    assert_eq!(twist(&chi, (p - 1) as i64, c).unwrap(), chi.lift(m).unwrap());
                    let back = twist(&twist(&chi, 1, c).unwrap(), -1, c).unwrap();
                    for x in 0..m as i64 {
                        if gcd_i(x, m) == 1 {
                            assert_eq!(back.eval(x), chi.eval(x));
                        }
                    }
                }
            }
        }
        // omega on a modulus with p^2 still reduces to teichmuller(x mod p)
        let c = ctx(3);
        let w9 = materialize(&twist(&DirichletCharacter::principal(9).unwrap(), 1, c).unwrap(), c).unwrap();
        for x in 1..27i64 {
            if x % 3 != 0 {
                assert!(w9.eval(x).agrees_with(&teichmuller(x, c).unwrap(), 40));
            }
        }
    }

    #[test]
    fn materialize_examples() {
        let c5 = ctx(5);
        let quad = materialize(&parse_character_id("5:2").unwrap(), c5).unwrap();
        assert_eq!(quad.eval(2), PadicNumber::from_integer(-1, c5));
        assert_eq!(quad.eval(4), PadicNumber::one(c5));
        assert!(quad.eval(5).is_exact_zero());
        let principal = materialize(&DirichletCharacter::principal(7).unwrap(), c5).unwrap();
        assert_eq!(principal.eval(3), PadicNumber::one(c5));
        let quartic = parse_character_id("5:1").unwrap();
        assert!(matches!(materialize(&quartic, ctx(3)), Err(Error::UnsupportedEmbedding { order: 4, p: 3 })));
        assert!(materialize(&quartic, ctx(13)).is_ok());
    }

    #[test]
    fn materialized_values_are_multiplicative() {
        for (d, p) in [(5u64, 5u64), (5, 13), (7, 7), (9, 7), (15, 13)] {
            let c = ctx(p);
            for chi in enumerate_characters(d).unwrap() {
                let Ok(mat) = materialize(&chi, c) else { continue };
                let ring = c.ring();
                for x in 0..40i64 {
                    for y in [1i64, 2, 7, 11, 38] {
                        let lhs = ring.mul(&mat.eval_residue(x), &mat.eval_residue(y));
                        assert_eq!(lhs, mat.eval_residue(x * y), "{chi} p={p}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn multiplicativity_property(d in (1u64..60).prop_map(|d| 2 * d + 1), idx in 0u64..1000, x in -2000i64..2000, y in -2000i64..2000) {
            let chars = enumerate_characters(d).unwrap();
            let chi = &chars[(idx % chars.len() as u64) as usize];
            prop_assert_eq!(chi.eval(x).mul(&chi.eval(y)), chi.eval(x * y));
            prop_assert_eq!(chi.eval(x).is_zero(), gcd_i(x, d) > 1);
            prop_assert!(chi.conductor() >= 1 && d % chi.conductor() == 0);
        }
    }
}
