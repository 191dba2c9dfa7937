//! Function-field front end: genus-1 point counts, Frobenius polynomials,
//! class numbers along constant towers, and the supersingular/CM criteria
//! for the limit being 1.

use num_bigint::BigUint;
use num_traits::One;

use crate::intpoly::{self, parse_poly, IntPoly};
use crate::limits::{self, limit_total, tower_table, TowerOptions, TowerRow};
use crate::localfactor::FpPoly;
use crate::padic::pow_p;

const Q_GUARD: u64 = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("polynomial error: {0}")]
    Poly(#[from] intpoly::Error),
    #[error("limit error: {0}")]
    Limits(#[from] limits::Error),
    #[error("q = {0} must be a prime power <= 10^6")]
    BadFieldSize(u64),
    #[error("Weierstrass models require odd prime q; use the (q, a1) trace form for q = {0}")]
    ModelNeedsOddPrime(u64),
    #[error("singular model: the cubic has a repeated root mod {0}")]
    Singular(u64),
    #[error("Hasse violation: |a1| = {0} is not below 2*sqrt({1})")]
    Hasse(u64, u64),
    #[error("cannot parse Weierstrass equation {0:?} (expected y^2 = cubic in x)")]
    BadEquation(String),
    #[error("the supersingular criterion excludes q = {0} in {{2, 3}}")]
    SmallQ(u64),
    #[error("trace and CM routes disagree: a1 = {a1}, (D/q) = {symbol} for D = {d}")]
    CmDisagreement { a1: i64, d: i64, symbol: i64 },
    #[error("criterion/limit mismatch for q = {q}: flag {flag} but limit residue {residue}")]
    LimitMismatch { q: u64, flag: bool, residue: BigUint },
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn is_prime_power(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut m = n;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            while m % d == 0 {
                m /= d;
            }
            return m == 1;
        }
        d += 1;
    }
    true
}

fn hasse_ok(a1: i64, q: u64) -> bool {
    (a1 as i128) * (a1 as i128) < 4 * q as i128
}

/// A genus-1 curve, either as an affine model y^2 = cubic over a prime
/// field of odd characteristic, or directly by its Frobenius trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveSpec {
    Model { q: u64, rhs: IntPoly },
    Trace { q: u64, a1: i64 },
}

impl CurveSpec {
    pub fn model(q: u64, rhs: IntPoly) -> Result<Self, Error> {
        if q > Q_GUARD || !is_prime(q) || q == 2 {
            if !is_prime(q) || q > Q_GUARD {
                return Err(Error::BadFieldSize(q));
            }
            return Err(Error::ModelNeedsOddPrime(q));
        }
        if rhs.degree() != Some(3) || !rhs.is_monic() {
            return Err(Error::BadEquation(rhs.to_string()));
        }
        let fbar = FpPoly::from_int_poly(&rhs, q);
        let g = fbar.gcd(&fbar.derivative());
        if g.degree().unwrap_or(0) > 0 {
            return Err(Error::Singular(q));
        }
        Ok(CurveSpec::Model { q, rhs })
    }

    pub fn trace(q: u64, a1: i64) -> Result<Self, Error> {
        if q > Q_GUARD || !is_prime_power(q) {
            return Err(Error::BadFieldSize(q));
        }
        if !hasse_ok(a1, q) {
            return Err(Error::Hasse(a1.unsigned_abs(), q));
        }
        Ok(CurveSpec::Trace { q, a1 })
    }

    /// Parses `y^2=x^3-1` style equations over F_q.
    pub fn parse_weierstrass(q: u64, text: &str) -> Result<Self, Error> {
        let bad = || Error::BadEquation(text.to_string());
        let (lhs, rhs) = text.split_once('=').ok_or_else(bad)?;
        let lhs: String = lhs.chars().filter(|c| !c.is_whitespace()).collect();
        if lhs != "y^2" {
            return Err(bad());
        }
        let rhs = parse_poly(rhs).map_err(|_| bad())?;
        CurveSpec::model(q, rhs)
    }

    pub fn q(&self) -> u64 {
        match self {
            CurveSpec::Model { q, .. } | CurveSpec::Trace { q, .. } => *q,
        }
    }

    /// Frobenius trace a1 = q + 1 - h.
    pub fn a1(&self) -> Result<i64, Error> {
        match self {
            CurveSpec::Trace { a1, .. } => Ok(*a1),
            CurveSpec::Model { q, .. } => {
                let h = count_points(self)? as i64;
                Ok(*q as i64 + 1 - h)
            }
        }
    }
}

/// Number of projective points, the class number h(k) of the function
/// field. Models are counted by enumeration with an Euler-criterion
/// quadratic character solve for y.
pub fn count_points(curve: &CurveSpec) -> Result<u64, Error> {
    match curve {
        CurveSpec::Trace { q, a1 } => Ok((*q as i64 + 1 - a1) as u64),
        CurveSpec::Model { q, rhs } => {
            let q = *q;
            let fbar = FpPoly::from_int_poly(rhs, q);
            let mut count = 1u64; // point at infinity
            let e = (q - 1) / 2;
            for x in 0..q {
                let fx = fbar.eval(x);
                if fx == 0 {
                    count += 1;
                } else if powmod(fx, e, q) == 1 {
                    count += 2;
                }
            }
            Ok(count)
        }
    }
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * a as u128 % m as u128) as u64;
        }
        a = (a as u128 * a as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Frobenius polynomial F_k(t) = t^2 - a1 t + q with a1 = q + 1 - h.
pub fn frobenius_poly(q: u64, h: u64) -> Result<IntPoly, Error> {
    let a1 = q as i64 + 1 - h as i64;
    if !hasse_ok(a1, q) {
        return Err(Error::Hasse(a1.unsigned_abs(), q));
    }
    Ok(IntPoly::from_i64(&[q as i64, -a1, 1]))
}

/// Class numbers h(k_{p^n}) = |r_{p^n}(F)| along the constant Z_p-tower,
/// as tower rows.
pub fn class_number_tower(
    f: &IntPoly,
    p: u64,
    n_max: u32,
    options: &TowerOptions,
) -> Result<Vec<TowerRow>, Error> {
    Ok(tower_table(f, p, n_max, options)?)
}

/// Verdict of the supersingular / CM criterion for lim h(k_{q^n}) = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupersingularVerdict {
    pub limit_is_one: bool,
    pub supersingular: bool,
    /// Legendre symbol (D/q) when a CM discriminant was supplied
    pub legendre: Option<i64>,
    pub reason: &'static str,
}

/// Legendre symbol (a/q) for odd prime q.
pub fn legendre_symbol(a: i64, q: u64) -> i64 {
    let r = a.rem_euclid(q as i64) as u64;
    if r == 0 {
        return 0;
    }
    if powmod(r, (q - 1) / 2, q) == 1 {
        1
    } else {
        -1
    }
}

/// lim h(k_{q^n}) = 1 iff q is supersingular for the curve (a1 = 0 under
/// Hasse), equivalently (D/q) != 1 for a CM discriminant D. Both routes are
/// required to agree when D is supplied, and the verdict is checked against
/// limit_total of the Frobenius polynomial.
pub fn supersingular_limit_check(
    curve: &CurveSpec,
    d: Option<i64>,
) -> Result<SupersingularVerdict, Error> {
    let q = curve.q();
    if q == 2 || q == 3 {
        return Err(Error::SmallQ(q));
    }
    if !is_prime(q) {
        return Err(Error::BadFieldSize(q));
    }
    let a1 = curve.a1()?;
    let supersingular = a1.rem_euclid(q as i64) == 0;
    debug_assert!(!supersingular || a1 == 0, "Hasse forces a1 = 0");
    let legendre = d.map(|d| legendre_symbol(d, q));
    if let Some(sym) = legendre {
        if (sym != 1) != supersingular {
            return Err(Error::CmDisagreement { a1, d: d.unwrap(), symbol: sym });
        }
    }
    let h = (q as i64 + 1 - a1) as u64;
    let f = frobenius_poly(q, h)?;
    let lim = limit_total(&f, q, 12)?;
    let residue = lim.value() % pow_p(q, 12);
    let limit_is_one = !lim.is_exact_zero() && residue.is_one();
    if limit_is_one != supersingular {
        return Err(Error::LimitMismatch { q, flag: supersingular, residue });
    }
    Ok(SupersingularVerdict {
        limit_is_one,
        supersingular,
        legendre,
        reason: if supersingular { "a1 = 0: supersingular" } else { "a1 != 0: ordinary" },
    })
}
