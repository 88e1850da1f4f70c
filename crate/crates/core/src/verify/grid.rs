use rayon::prelude::*;

use crate::arith::{pow_u64, rat_int, RBig};
use crate::chars::DirichletCharacter;

use super::{CongruenceReport, Verifier};

/// One unit of work for [`run_grid`]; range items expand to several reports.
#[derive(Clone, Debug)]
pub enum GridItem {
    Theorem1 { p: u64, q: RBig, n: usize },
    Integrality { p: u64, q: RBig, n: usize },
    Stability { p: u64, q: RBig, n_max: usize, k: u32 },
    Witt { p: u64, q: RBig, n_max: usize, k: u32 },
    Kummer { p: u64, q: RBig, chi: DirichletCharacter, k: usize, k_prime: usize, n: u32 },
    Eq26 { p: u64, q: RBig, chi: DirichletCharacter, n: usize },
    Eq26Classical { p: u64, chi: DirichletCharacter, n: usize },
    Interpolation { p: u64, q: RBig, chi: DirichletCharacter, k: usize },
    FunctionalEquation { p: u64, q: RBig, m: u32, level: u32 },
}

impl GridItem {
    pub fn run(&self, v: &Verifier) -> Vec<CongruenceReport> {
        match self {
            GridItem::Theorem1 { p, q, n } => vec![v.check_theorem1(*p, q, *n)],
            GridItem::Integrality { p, q, n } => v.check_integrality(*p, q, *n),
            GridItem::Stability { p, q, n_max, k } => v.stability_range(*p, q, 0, *n_max, *k),
            GridItem::Witt { p, q, n_max, k } => v.witt_range(*p, q, 0, *n_max, *k),
            GridItem::Kummer { p, q, chi, k, k_prime, n } => vec![v.check_kummer(*p, q, chi, *k, *k_prime, *n)],
            GridItem::Eq26 { p, q, chi, n } => vec![v.check_eq26(*p, q, chi, *n)],
            GridItem::Eq26Classical { p, chi, n } => vec![v.check_eq26_classical(*p, chi, *n)],
            GridItem::Interpolation { p, q, chi, k } => vec![v.check_interpolation(*p, q, chi, *k)],
            GridItem::FunctionalEquation { p, q, m, level } => vec![v.check_functional_equation(*p, q, *m, *level)],
        }
    }
}

/// A list of grid items.
#[derive(Clone, Debug, Default)]
pub struct GridSpec {
    pub items: Vec<GridItem>,
}

fn one_plus(p: u64, m: u64) -> RBig {
    rat_int(1 + (m * p) as i64)
}

fn quadratic(p: u64) -> DirichletCharacter {
    DirichletCharacter::principal(p)
        .and_then(|c| c.group().character((p - 1) / 2))
        .expect("odd prime modulus")
}

impl GridSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, item: GridItem) {
        self.items.push(item);
    }

    pub fn extend(&mut self, other: GridSpec) {
        self.items.extend(other.items);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `T_n(k)` against the closed form: `p` in {3,5,7}, `q = 1+p`, `n <= 10`, `k <= 5`.
    pub fn witt() -> Self {
        let mut g = Self::new();
        for p in [3, 5, 7] {
            for k in 1..=5 {
                g.push(GridItem::Witt { p, q: one_plus(p, 1), n_max: 10, k });
            }
        }
        g
    }

    fn three_q_grid(n_max: usize, make: impl Fn(u64, RBig, usize) -> GridItem) -> Self {
        let mut g = Self::new();
        for p in [3, 5, 7] {
            for q in [one_plus(p, 1), one_plus(p, 2), one_plus(p, p)] {
                for n in 0..=n_max {
                    g.push(make(p, q.clone(), n));
                }
            }
        }
        g
    }

    /// `p` in {3,5,7}, `q` in {1+p, 1+2p, 1+p^2}, `n <= 30`.
    pub fn theorem1() -> Self {
        Self::three_q_grid(30, |p, q, n| GridItem::Theorem1 { p, q, n })
    }

    /// The same `p` and `q` as [`GridSpec::theorem1`], `n <= 50`.
    pub fn integrality() -> Self {
        Self::three_q_grid(50, |p, q, n| GridItem::Integrality { p, q, n })
    }

    /// `p` in {3,5}, `q = 1+p`, `n <= 8`, `k <= 4`.
    pub fn stability() -> Self {
        let mut g = Self::new();
        for p in [3, 5] {
            for k in 1..=4 {
                g.push(GridItem::Stability { p, q: one_plus(p, 1), n_max: 8, k });
            }
        }
        g
    }

    /// `p` in {3,5}, `q = 1+p`, principal and quadratic characters,
    /// `n` in {1,2}, `k <= 4`, `k' = k + p^n (p-1)`.
    pub fn kummer() -> Self {
        let mut g = Self::new();
        for p in [3, 5] {
            for chi in [DirichletCharacter::principal(1).expect("modulus 1"), quadratic(p)] {
                for n in 1..=2u32 {
                    for k in 0..=4usize {
                        let k_prime = k + (pow_u64(p, n) * (p - 1)) as usize;
                        g.push(GridItem::Kummer { p, q: one_plus(p, 1), chi: chi.clone(), k, k_prime, n });
                    }
                }
            }
        }
        g
    }

    /// `k` in {0,1,2}, `p` in {3,5}, `q = 1+p`, principal and quadratic characters.
    pub fn interpolation() -> Self {
        let mut g = Self::new();
        for p in [3, 5] {
            for chi in [DirichletCharacter::principal(1).expect("modulus 1"), quadratic(p)] {
                for k in 0..=2 {
                    g.push(GridItem::Interpolation { p, q: one_plus(p, 1), chi: chi.clone(), k });
                }
            }
        }
        g
    }

    /// `p = 5`, quadratic character, `n <= 10`, `q` in {6, 11} and the `q = 1` case.
    pub fn eq26() -> Self {
        let mut g = Self::new();
        let chi = quadratic(5);
        for n in 0..=10 {
            for q in [6, 11] {
                g.push(GridItem::Eq26 { p: 5, q: rat_int(q), chi: chi.clone(), n });
            }
            g.push(GridItem::Eq26Classical { p: 5, chi: chi.clone(), n });
        }
        g
    }

    /// `f(x) = [x]_q^m`, `m <= 4`, levels `<= 4`, `p` in {3,5}, `q = 1+p`.
    pub fn functional_equation() -> Self {
        let mut g = Self::new();
        for p in [3, 5] {
            for m in 0..=4 {
                for level in 1..=4 {
                    g.push(GridItem::FunctionalEquation { p, q: one_plus(p, 1), m, level });
                }
            }
        }
        g
    }

    /// Every grid above.
    pub fn acceptance() -> Self {
        let mut g = Self::new();
        for part in [
            Self::witt(),
            Self::theorem1(),
            Self::integrality(),
            Self::stability(),
            Self::kummer(),
            Self::interpolation(),
            Self::eq26(),
            Self::functional_equation(),
        ] {
            g.extend(part);
        }
        g
    }
}

/// Runs every item (in parallel) and returns the reports sorted by claim
/// and parameters. Failures are captured per report; the run never stops
/// early.
pub fn run_grid(verifier: &Verifier, spec: &GridSpec) -> Vec<CongruenceReport> {
    let mut reports: Vec<CongruenceReport> = spec.items.par_iter().flat_map_iter(|item| item.run(verifier)).collect();
    reports.sort_by(|a, b| (a.claim, &a.params).cmp(&(b.claim, &b.params)));
    reports
}
