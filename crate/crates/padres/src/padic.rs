//! Finite-precision arithmetic in the p-adic integers.
//!
//! A [`PadicScalar`] is a value of Z_p known modulo `p^prec` (absolute
//! precision). Exact zero is a distinguished value, kept apart from "all
//! digits zero at this precision": a vanishing limit is a theorem outcome,
//! an indistinct small value is a precision statement.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is divisible by p = {1}; Teichmueller lift needs a unit")]
    NotAUnit(BigUint, u64),
    #[error("p-adic log needs an argument congruent to 1 mod p")]
    LogDomain,
    #[error("operands live over different primes ({0} vs {1})")]
    PrimeMismatch(u64, u64),
    #[error("precision request {0} exceeds limit {1}")]
    PrecisionRange(u32, u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    /// Certified zero (infinite valuation).
    ExactZero,
    /// All digits vanish modulo p^prec; not certified zero.
    ZeroToPrec,
    /// value = p^val * unit with unit coprime to p, stored mod p^(prec-val).
    Unit { val: u32, unit: BigUint },
}

/// Element of Z_p known modulo `p^prec`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicScalar {
    p: u64,
    prec: u32,
    repr: Repr,
}

pub(crate) fn pow_p(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// v_p of a nonzero big integer.
pub(crate) fn valuation_uint(x: &BigUint, p: u64) -> u32 {
    debug_assert!(!x.is_zero());
    let bp = BigUint::from(p);
    let mut v = 0u32;
    let mut x = x.clone();
    loop {
        let (q, r) = x.div_rem(&bp);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

pub(crate) fn valuation_int(x: &BigInt, p: u64) -> u32 {
    valuation_uint(&x.abs().to_biguint().unwrap(), p)
}

/// Inverse of `a` modulo `m` (requires gcd(a, m) = 1).
pub(crate) fn modinv(a: &BigUint, m: &BigUint) -> BigUint {
    let a = BigInt::from(a.clone());
    let m_int = BigInt::from(m.clone());
    let e = a.extended_gcd(&m_int);
    assert!(e.gcd.is_one(), "modinv of a non-unit");
    e.x.mod_floor(&m_int).to_biguint().unwrap()
}

impl PadicScalar {
    pub fn exact_zero(p: u64, prec: u32) -> Self {
        PadicScalar { p, prec, repr: Repr::ExactZero }
    }

    pub fn zero_to_prec(p: u64, prec: u32) -> Self {
        PadicScalar { p, prec, repr: Repr::ZeroToPrec }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        PadicScalar::from_biguint(p, prec, &BigUint::one())
    }

    /// Interpret `x mod p^prec` as an element of Z_p at absolute precision `prec`.
    pub fn from_biguint(p: u64, prec: u32, x: &BigUint) -> Self {
        let m = pow_p(p, prec);
        let r = x % &m;
        if r.is_zero() {
            return PadicScalar::zero_to_prec(p, prec);
        }
        let val = valuation_uint(&r, p);
        let unit = &r / pow_p(p, val);
        PadicScalar { p, prec, repr: Repr::Unit { val, unit } }
    }

    pub fn from_bigint(p: u64, prec: u32, x: &BigInt) -> Self {
        if x.is_zero() {
            return PadicScalar::exact_zero(p, prec);
        }
        let m = BigInt::from(pow_p(p, prec));
        let r = x.mod_floor(&m).to_biguint().unwrap();
        let mut s = PadicScalar::from_biguint(p, prec, &r);
        // nonzero integer input: zero residue means the value is p^prec-divisible,
        // still only "zero to precision"
        if matches!(s.repr, Repr::ZeroToPrec) && valuation_int(x, p) >= prec {
            s.repr = Repr::ZeroToPrec;
        }
        s
    }

    pub fn from_i64(p: u64, prec: u32, x: i64) -> Self {
        PadicScalar::from_bigint(p, prec, &BigInt::from(x))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::ExactZero)
    }

    pub fn is_zero_at_prec(&self) -> bool {
        matches!(self.repr, Repr::ExactZero | Repr::ZeroToPrec)
    }

    /// Valuation; `None` encodes infinite valuation (exact zero) and values
    /// indistinguishable from zero at this precision.
    pub fn valuation(&self) -> Option<u32> {
        match &self.repr {
            Repr::ExactZero | Repr::ZeroToPrec => None,
            Repr::Unit { val, .. } => Some(*val),
        }
    }

    /// Unit part, when the value is nonzero at this precision.
    pub fn unit_part(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// Canonical representative in `[0, p^prec)`.
    pub fn value(&self) -> BigUint {
        match &self.repr {
            Repr::ExactZero | Repr::ZeroToPrec => BigUint::zero(),
            Repr::Unit { val, unit } => (pow_p(self.p, *val) * unit) % pow_p(self.p, self.prec),
        }
    }

    /// Reduce the stated precision (never increases it).
    pub fn truncate(&self, prec: u32) -> Self {
        let prec = prec.min(self.prec);
        match &self.repr {
            Repr::ExactZero => PadicScalar::exact_zero(self.p, prec),
            _ => {
                let mut s = PadicScalar::from_biguint(self.p, prec, &self.value());
                if s.is_zero_at_prec() && self.is_exact_zero() {
                    s.repr = Repr::ExactZero;
                }
                s
            }
        }
    }

    fn check_prime(&self, other: &Self) -> Result<(), Error> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        self.check_prime(other)?;
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        let prec = self.prec.min(other.prec);
        let m = pow_p(self.p, prec);
        Ok(PadicScalar::from_biguint(self.p, prec, &((self.value() + other.value()) % m)))
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::ExactZero | Repr::ZeroToPrec => self.clone(),
            Repr::Unit { .. } => {
                let m = pow_p(self.p, self.prec);
                let v = self.value();
                PadicScalar::from_biguint(self.p, self.prec, &(&m - v))
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        self.check_prime(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(PadicScalar::exact_zero(self.p, self.prec.min(other.prec)));
        }
        // product precision: min over operands of (own valuation + other's precision)
        let va = self.valuation().unwrap_or(self.prec);
        let vb = other.valuation().unwrap_or(other.prec);
        let prec = (va + other.prec).min(vb + self.prec).min(self.prec + other.prec);
        if self.is_zero_at_prec() || other.is_zero_at_prec() {
            return Ok(PadicScalar::zero_to_prec(self.p, prec));
        }
        let m = pow_p(self.p, prec);
        Ok(PadicScalar::from_biguint(self.p, prec, &((self.value() * other.value()) % m)))
    }

    /// Inverse of a unit (valuation 0) at this precision.
    pub fn inv(&self) -> Result<Self, Error> {
        match &self.repr {
            Repr::Unit { val: 0, unit } => {
                let m = pow_p(self.p, self.prec);
                Ok(PadicScalar::from_biguint(self.p, self.prec, &modinv(unit, &m)))
            }
            _ => Err(Error::NotAUnit(self.value(), self.p)),
        }
    }

    /// Base-p digit expansion rendered as
    /// `d0 + d1*p + d2*p^2 + ... + O(p^N)` with zero digits omitted and
    /// coefficient 1 elided.
    pub fn digits(&self) -> String {
        if self.is_exact_zero() {
            return "0".to_string();
        }
        let mut v = self.value();
        let p = BigUint::from(self.p);
        let mut parts: Vec<String> = Vec::new();
        for i in 0..self.prec {
            let (q, d) = v.div_rem(&p);
            v = q;
            if d.is_zero() {
                continue;
            }
            let one = d.is_one();
            let part = match (i, one) {
                (0, _) => format!("{d}"),
                (1, true) => format!("{}", self.p),
                (1, false) => format!("{d}*{}", self.p),
                (_, true) => format!("{}^{i}", self.p),
                (_, false) => format!("{d}*{}^{i}", self.p),
            };
            parts.push(part);
        }
        parts.push(format!("O({}^{})", self.p, self.prec));
        parts.join(" + ")
    }
}

/// Maximum precision accepted by [`teichmuller`].
pub const MAX_TEICHMULLER_PREC: u32 = 1000;

/// Teichmueller lift: the unique root of unity of p-prime order congruent to
/// `u` mod p, to absolute precision `prec`. Computed by iterating `x -> x^p`
/// mod `p^prec` to its fixpoint.
pub fn teichmuller(u: &BigUint, p: u64, prec: u32) -> Result<PadicScalar, Error> {
    if prec > MAX_TEICHMULLER_PREC {
        return Err(Error::PrecisionRange(prec, MAX_TEICHMULLER_PREC));
    }
    if (u % p).is_zero() {
        return Err(Error::NotAUnit(u.clone(), p));
    }
    let m = pow_p(p, prec);
    let mut x = u % &m;
    for _ in 0..prec {
        let next = x.modpow(&BigUint::from(p), &m);
        if next == x {
            break;
        }
        x = next;
    }
    Ok(PadicScalar::from_biguint(p, prec, &x))
}

/// Truncation length for the log series: least T with
/// `T*v - floor(log_p T) >= prec`, for argument valuation `v >= 1`.
fn log_series_length(v: u32, p: u64, prec: u32) -> u64 {
    let mut t = 1u64;
    loop {
        let drop = (t as f64).log(p as f64).floor() as u64;
        if (t as u64) * (v as u64) >= prec as u64 + drop {
            return t;
        }
        t += 1;
    }
}

/// p-adic logarithm of `u` with `u = 1 mod p`, to absolute precision `prec`:
/// the truncated series `sum_{k>=1} (-1)^(k+1) (u-1)^k / k`.
pub fn padic_log(u: &PadicScalar, prec: u32) -> Result<PadicScalar, Error> {
    let p = u.p();
    let one = PadicScalar::one(p, u.prec());
    let x = u.sub(&one).map_err(|_| Error::LogDomain)?;
    if x.is_exact_zero() || u.value().is_one() {
        return Ok(PadicScalar::exact_zero(p, prec));
    }
    if x.is_zero_at_prec() {
        // u = 1 to the input's precision: log is zero to (at least) that precision
        return Ok(PadicScalar::zero_to_prec(p, prec.min(x.prec())));
    }
    let v = x.valuation().unwrap();
    if v < 1 {
        return Err(Error::LogDomain);
    }
    let t_max = log_series_length(v, p, prec);
    // buffer covers every division by p^(v_p(k))
    let buffer = (t_max as f64).log(p as f64).floor() as u32 + 1;
    let w = prec + buffer;
    let m = pow_p(p, w);
    let xv = x.value() % &m;
    let mut pow = BigUint::one();
    let mut sum = BigInt::zero();
    let m_int = BigInt::from(m.clone());
    for k in 1..=t_max {
        pow = (pow * &xv) % &m;
        let e = valuation_uint(&BigUint::from(k), p);
        let kk = BigUint::from(k) / pow_p(p, e);
        // representative of x^k is divisible by p^e because v_p(x^k) >= k >= e
        let reduced = &pow / pow_p(p, e);
        let term = (reduced * modinv(&kk, &m)) % &m;
        let term = BigInt::from(term);
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        sum = sum.mod_floor(&m_int);
    }
    let sum = sum.to_biguint().unwrap() % pow_p(p, prec);
    Ok(PadicScalar::from_biguint(p, prec, &sum))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teichmuller_fixed_points() {
        // u = 1 stays 1
        let t = teichmuller(&BigUint::from(1u32), 7, 6).unwrap();
        assert_eq!(t.value(), BigUint::one());
        // u = p-1 maps to -1 for odd p
        let t = teichmuller(&BigUint::from(6u32), 7, 6).unwrap();
        let m = pow_p(7, 6);
        assert_eq!(t.value(), &m - BigUint::one());
        // p | u rejected
        assert!(teichmuller(&BigUint::from(14u32), 7, 6).is_err());
    }

    #[test]
    fn teichmuller_omega2_mod_7() {
        // independent oracle: iterate x -> x^7 mod 7^6 from 2 until stable
        let m = pow_p(7, 6);
        let mut x = BigUint::from(2u32);
        for _ in 0..20 {
            x = x.modpow(&BigUint::from(7u32), &m);
        }
        let t = teichmuller(&BigUint::from(2u32), 7, 6).unwrap();
        assert_eq!(t.value(), x);
        // omega(2)^6 = 1 mod 7^6
        assert_eq!(t.value().modpow(&BigUint::from(6u32), &m), BigUint::one());
        // omega(2) = 2 mod 7
        assert_eq!(t.value() % 7u64, BigUint::from(2u32));
    }

    #[test]
    fn teichmuller_multiplicative() {
        let p = 13u64;
        let n = 20u32;
        let m = pow_p(p, n);
        for (u, v) in [(2u64, 3u64), (5, 7), (11, 12), (4, 9)] {
            let a = teichmuller(&BigUint::from(u), p, n).unwrap();
            let b = teichmuller(&BigUint::from(v), p, n).unwrap();
            let w = teichmuller(&BigUint::from(u * v % p), p, n).unwrap();
            assert_eq!((a.value() * b.value()) % &m, w.value());
        }
    }

    #[test]
    fn log_of_one_is_exact_zero() {
        let one = PadicScalar::one(5, 10);
        let l = padic_log(&one, 8).unwrap();
        assert!(l.is_exact_zero());
    }

    #[test]
    fn log_homomorphism() {
        // log(u^2) = 2 log(u) for u = 1 + 5, p = 5, N = 8
        let p = 5u64;
        let n = 8u32;
        let u = PadicScalar::from_i64(p, n + 4, 6);
        let u2 = u.mul(&u).unwrap();
        let lu = padic_log(&u, n).unwrap();
        let lu2 = padic_log(&u2, n).unwrap();
        let two = PadicScalar::from_i64(p, n, 2);
        assert_eq!(lu2.value(), two.mul(&lu).unwrap().truncate(n).value());
    }

    #[test]
    fn log_homomorphism_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for p in [2u64, 3, 7] {
            let n = 12u32;
            let m = pow_p(p, n + 6);
            for _ in 0..30 {
                let a: u64 = rng.gen_range(0..1000);
                let b: u64 = rng.gen_range(0..1000);
                let u = PadicScalar::from_biguint(p, n + 6, &((BigUint::from(a) * p + 1u32) % &m));
                let v = PadicScalar::from_biguint(p, n + 6, &((BigUint::from(b) * p + 1u32) % &m));
                let uv = u.mul(&v).unwrap();
                let sum = padic_log(&u, n).unwrap().add(&padic_log(&v, n).unwrap()).unwrap();
                let luv = padic_log(&uv, n).unwrap();
                assert_eq!(luv.truncate(n).value(), sum.truncate(n).value(), "p={p} a={a} b={b}");
            }
        }
    }

    #[test]
    fn log_direct_series_oracle() {
        // u = 1 + 7, p = 7, N = 5: 7 - 7^2/2 + 7^3/3 - 7^4/4 (+ negligible tail)
        let p = 7u64;
        let n = 5u32;
        let m = pow_p(p, n);
        let mi = BigInt::from(m.clone());
        let mut expect = BigInt::zero();
        for k in 1..=4u32 {
            let term = BigInt::from(7u64).pow(k) * BigInt::from(modinv(&BigUint::from(k), &m));
            if k % 2 == 1 {
                expect += term;
            } else {
                expect -= term;
            }
            expect = expect.mod_floor(&mi);
        }
        let u = PadicScalar::from_i64(p, n + 2, 8);
        let l = padic_log(&u, n).unwrap();
        assert_eq!(l.value(), expect.to_biguint().unwrap());
        assert_eq!(l.valuation(), Some(1));
    }

    #[test]
    fn digit_rendering() {
        let x = PadicScalar::from_i64(7, 3, 3);
        assert_eq!(x.digits(), "3 + O(7^3)");
        // digits (1,4,1,4,0,6) base 7
        let v = BigUint::from(1u64 + 4 * 7 + 49 + 4 * 343 + 6 * 16807u64);
        let x = PadicScalar::from_biguint(7, 6, &v);
        assert_eq!(x.digits(), "1 + 4*7 + 7^2 + 4*7^3 + 6*7^5 + O(7^6)");
        let x = PadicScalar::from_i64(5, 3, -1);
        assert_eq!(x.digits(), "4 + 4*5 + 4*5^2 + O(5^3)");
        assert_eq!(PadicScalar::exact_zero(5, 3).digits(), "0");
        assert_eq!(PadicScalar::zero_to_prec(5, 3).digits(), "O(5^3)");
    }

    #[test]
    fn digits_value_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = *[2u64, 3, 5, 7, 13].iter().nth(rng.gen_range(0..5)).unwrap();
            let n = rng.gen_range(1..=12u32);
            let m = pow_p(p, n);
            let v = BigUint::from(rng.gen::<u64>()) % &m;
            let x = PadicScalar::from_biguint(p, n, &v);
            // re-parse the digit string
            let s = x.digits();
            let mut total = BigUint::zero();
            for part in s.split(" + ") {
                if part.starts_with("O(") {
                    continue;
                }
                let (coeff, pw) = if let Some((c, rest)) = part.split_once('*') {
                    (c.parse::<u64>().unwrap(), rest.to_string())
                } else if part.contains('^') || part == p.to_string().as_str() {
                    (1, part.to_string())
                } else {
                    (part.parse::<u64>().unwrap(), String::new())
                };
                let power: u32 = if pw.is_empty() {
                    0
                } else if let Some((_, e)) = pw.split_once('^') {
                    e.parse().unwrap()
                } else {
                    1
                };
                total += BigUint::from(coeff) * pow_p(p, power);
            }
            assert_eq!(total % &m, v, "p={p} N={n} s={s}");
        }
    }

    #[test]
    fn arithmetic_precision_rules() {
        let p = 3u64;
        let a = PadicScalar::from_i64(p, 10, 9 * 2); // val 2
        let b = PadicScalar::from_i64(p, 6, 5);
        let prod = a.mul(&b).unwrap();
        // min(2 + 6, 0 + 10) = 8
        assert_eq!(prod.prec(), 8);
        assert_eq!(prod.valuation(), Some(2));
        let z = PadicScalar::exact_zero(p, 10);
        assert!(z.mul(&b).unwrap().is_exact_zero());
        assert_eq!(z.add(&b).unwrap().value(), b.value());
    }
}
