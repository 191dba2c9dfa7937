//! Exact and modular arithmetic on integer polynomials.
//!
//! Provides the universal input type [`IntPoly`] together with resultants,
//! cyclotomic polynomials, cyclic resultants (circulant determinant and
//! cyclotomic-product routes) and the p-power Graeffe transform that makes
//! cyclic resultants computable at astronomically large indices through
//! modular arithmetic.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

/// Largest exponent accepted by the polynomial parser.
pub const MAX_PARSE_EXPONENT: u64 = 1_000_000;
/// Guard for the exact cyclic-resultant path: `n * deg f` must stay below this.
pub const EXACT_CYCLIC_GUARD: u64 = 100_000;
/// Cutoff below which the circulant determinant is used directly.
const CIRCULANT_CUTOFF: u64 = 64;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("exponent {0} exceeds limit {MAX_PARSE_EXPONENT}")]
    ExponentOverflow(u64),
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("cyclotomic index {0} out of range [1, 100000]")]
    CyclotomicRange(u64),
    #[error("invalid cyclotomic pair (m, n) = ({0}, {1}): need m > n > 1 and gcd(m, n) > 1")]
    CyclotomicPair(u64, u64),
    #[error("exact cyclic resultant guard exceeded: n * deg f = {0} > {EXACT_CYCLIC_GUARD}; use the modular path")]
    SizeGuard(u64),
    #[error("inexact polynomial division")]
    InexactDivision,
}

/// Integer polynomial, coefficients stored by ascending power of `t`.
///
/// The zero polynomial is the empty coefficient vector; otherwise the
/// highest-index coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPoly::from_coeffs(vec![BigInt::one()])
    }

    /// Build from ascending coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `t^n - 1`.
    pub fn t_pow_minus_one(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[0] = -BigInt::one();
        c[n] = BigInt::one();
        IntPoly::from_coeffs(c)
    }

    /// Monomial `c * t^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        IntPoly::from_coeffs(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `t^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    pub fn neg(&self) -> Self {
        IntPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        IntPoly::from_coeffs(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        IntPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact division over the integers; errors if the quotient is not
    /// an integer polynomial.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, Error> {
        if divisor.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.is_zero() {
            return Ok(IntPoly::zero());
        }
        let dd = divisor.degree().unwrap();
        let nd = self.degree().unwrap();
        if nd < dd {
            return Err(Error::InexactDivision);
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        let lc = divisor.lc();
        for k in (0..=nd - dd).rev() {
            let top = rem[k + dd].clone();
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&lc);
            if !r.is_zero() {
                return Err(Error::InexactDivision);
            }
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &q * c;
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(Error::InexactDivision);
        }
        Ok(IntPoly::from_coeffs(quot))
    }

    /// gcd of all coefficients (positive); zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Substitute `t -> t^k`.
    pub fn inflate(&self, k: usize) -> Self {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k] = c.clone();
        }
        IntPoly::from_coeffs(out)
    }

    /// Substitute `t -> t + a`.
    pub fn shift(&self, a: &BigInt) -> Self {
        // Horner: f(t + a) built from the top coefficient down.
        let mut acc = IntPoly::zero();
        let shift = IntPoly::from_coeffs(vec![a.clone(), BigInt::one()]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&shift).add(&IntPoly::from_coeffs(vec![c.clone()]));
        }
        acc
    }
}

impl fmt::Display for IntPoly {
    /// Canonical printer: descending powers, explicit signs, coefficient 1
    /// elided on non-constant terms (`3t^2-5t+3`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let unit = mag.is_one();
            if i == 0 || !unit {
                write!(f, "{mag}")?;
            }
            if i >= 1 {
                write!(f, "t")?;
                if i >= 2 {
                    write!(f, "^{i}")?;
                }
            }
        }
        Ok(())
    }
}

/// Polynomial with coefficients reduced modulo an explicit modulus `m >= 2`.
///
/// Every stored residue lies in `[0, m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPoly {
    coeffs: Vec<BigUint>,
    modulus: BigUint,
}

impl ModPoly {
    pub fn new(coeffs: Vec<BigUint>, modulus: BigUint) -> Self {
        assert!(modulus >= BigUint::from(2u32), "modulus must be >= 2");
        let mut coeffs: Vec<BigUint> = coeffs.into_iter().map(|c| c % &modulus).collect();
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ModPoly { coeffs, modulus }
    }

    pub fn from_int_poly(f: &IntPoly, modulus: &BigUint) -> Self {
        let m = BigInt::from(modulus.clone());
        let coeffs = f
            .coeffs()
            .iter()
            .map(|c| {
                let r = c.mod_floor(&m);
                r.to_biguint().unwrap()
            })
            .collect();
        ModPoly::new(coeffs, modulus.clone())
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigUint {
        self.coeffs.get(i).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn eval(&self, x: &BigUint) -> BigUint {
        let mut acc = BigUint::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc * x + c) % &self.modulus;
        }
        acc
    }

    /// Value at `t = 1`.
    pub fn eval_one(&self) -> BigUint {
        let mut acc = BigUint::zero();
        for c in &self.coeffs {
            acc = (acc + c) % &self.modulus;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.modulus, other.modulus);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigUint::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        ModPoly::new(out, self.modulus.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.modulus, other.modulus);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigUint::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += &self.modulus - c;
        }
        ModPoly::new(out, self.modulus.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.modulus, other.modulus);
        if self.is_zero() || other.is_zero() {
            return ModPoly::new(vec![], self.modulus.clone());
        }
        let mut out = vec![BigUint::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = (&out[i + j] + a * b) % &self.modulus;
            }
        }
        ModPoly::new(out, self.modulus.clone())
    }

    /// Division with remainder by a monic divisor.
    pub fn divmod_by_monic(&self, divisor: &Self) -> (Self, Self) {
        assert_eq!(self.modulus, divisor.modulus);
        let dd = divisor.degree().expect("divisor must be nonzero");
        assert!(divisor.coeffs[dd].is_one(), "divisor must be monic");
        if self.degree().map_or(true, |d| d < dd) {
            return (ModPoly::new(vec![], self.modulus.clone()), self.clone());
        }
        let nd = self.degree().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigUint::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let q = rem[k + dd].clone();
            if q.is_zero() {
                continue;
            }
            for (i, c) in divisor.coeffs.iter().enumerate() {
                let sub = (&q * c) % &self.modulus;
                rem[k + i] = (&rem[k + i] + &self.modulus - sub) % &self.modulus;
            }
            quot[k] = q;
        }
        (
            ModPoly::new(quot, self.modulus.clone()),
            ModPoly::new(rem, self.modulus.clone()),
        )
    }
}

/// Parse the polynomial grammar: signed integer coefficients, variable `t`,
/// `^` exponents, `+`/`-` separators, e.g. `3t^2-5t+3`.
pub fn parse_poly(text: &str) -> Result<IntPoly, Error> {
    let bytes: Vec<char> = text.chars().collect();
    let mut pos = 0usize;
    let n = bytes.len();
    let skip_ws = |pos: &mut usize| {
        while *pos < n && bytes[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    let mut terms: Vec<(BigInt, u64)> = Vec::new();
    skip_ws(&mut pos);
    if pos == n {
        return Err(Error::Syntax {
            pos,
            msg: "empty input".into(),
        });
    }
    let mut first = true;
    while pos < n {
        skip_ws(&mut pos);
        // sign
        let mut neg = false;
        if pos < n && (bytes[pos] == '+' || bytes[pos] == '-') {
            neg = bytes[pos] == '-';
            pos += 1;
        } else if !first {
            return Err(Error::Syntax {
                pos,
                msg: format!("expected '+' or '-', found '{}'", bytes[pos]),
            });
        }
        first = false;
        skip_ws(&mut pos);
        // coefficient digits
        let digit_start = pos;
        while pos < n && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        let mut coeff = if pos > digit_start {
            bytes[digit_start..pos]
                .iter()
                .collect::<String>()
                .parse::<BigInt>()
                .unwrap()
        } else {
            BigInt::one()
        };
        skip_ws(&mut pos);
        if pos < n && bytes[pos] == '*' {
            pos += 1;
            skip_ws(&mut pos);
        }
        // variable part
        let mut exp: u64 = 0;
        if pos < n && (bytes[pos] == 't' || bytes[pos] == 'x') {
            pos += 1;
            exp = 1;
            skip_ws(&mut pos);
            if pos < n && bytes[pos] == '^' {
                pos += 1;
                skip_ws(&mut pos);
                let estart = pos;
                while pos < n && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos == estart {
                    return Err(Error::Syntax {
                        pos,
                        msg: "expected exponent digits after '^'".into(),
                    });
                }
                let raw: String = bytes[estart..pos].iter().collect();
                exp = raw.parse::<u64>().map_err(|_| Error::ExponentOverflow(u64::MAX))?;
                if exp > MAX_PARSE_EXPONENT {
                    return Err(Error::ExponentOverflow(exp));
                }
            }
        } else if pos == digit_start {
            return Err(Error::Syntax {
                pos,
                msg: if pos < n {
                    format!("unexpected character '{}'", bytes[pos])
                } else {
                    "unexpected end of input".into()
                },
            });
        }
        if neg {
            coeff = -coeff;
        }
        terms.push((coeff, exp));
        skip_ws(&mut pos);
    }
    let max_exp = terms.iter().map(|(_, e)| *e).max().unwrap_or(0) as usize;
    let mut coeffs = vec![BigInt::zero(); max_exp + 1];
    for (c, e) in terms {
        coeffs[e as usize] += c;
    }
    Ok(IntPoly::from_coeffs(coeffs))
}

fn divisors(n: u64) -> Vec<u64> {
    let mut divs = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            divs.push(i);
            if i != n / i {
                divs.push(n / i);
            }
        }
        i += 1;
    }
    divs.sort_unstable();
    divs
}

/// Euler's totient.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut phi = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut pk = 1;
            while n % p == 0 {
                n /= p;
                pk *= p;
            }
            phi *= pk - pk / p;
        }
        p += 1;
    }
    if n > 1 {
        phi *= n - 1;
    }
    phi
}

static CYCLOTOMIC_CACHE: Lazy<Mutex<HashMap<u64, IntPoly>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// The m-th cyclotomic polynomial, computed by exact division of `t^m - 1`
/// by the product of `Phi_d` over proper divisors `d | m`. Cached by `m`.
pub fn cyclotomic(m: u64) -> Result<IntPoly, Error> {
    if m == 0 || m > 100_000 {
        return Err(Error::CyclotomicRange(m));
    }
    if let Some(f) = CYCLOTOMIC_CACHE.lock().unwrap().get(&m) {
        return Ok(f.clone());
    }
    let mut quot = IntPoly::t_pow_minus_one(m as usize);
    for d in divisors(m) {
        if d == m {
            continue;
        }
        let phi_d = cyclotomic(d)?;
        quot = quot.div_exact(&phi_d)?;
    }
    CYCLOTOMIC_CACHE.lock().unwrap().insert(m, quot.clone());
    Ok(quot)
}

/// Pseudo-remainder of `f` by `g` (`lc(g)^(deg f - deg g + 1) * f mod g`).
fn pseudo_rem(f: &IntPoly, g: &IntPoly) -> IntPoly {
    let df = f.degree().unwrap();
    let dg = g.degree().unwrap();
    debug_assert!(df >= dg && dg >= 1);
    let lc = g.lc();
    let mut rem = f.coeffs.clone();
    for k in (dg..=df).rev() {
        let top = rem[k].clone();
        for c in rem[..k].iter_mut() {
            *c *= &lc;
        }
        // rem = lc*rem - top * t^(k-dg) * g  (kills the t^k term)
        rem[k] = BigInt::zero();
        for (i, gc) in g.coeffs.iter().take(dg).enumerate() {
            rem[k - dg + i] -= &top * gc;
        }
    }
    rem.truncate(dg);
    IntPoly::from_coeffs(rem)
}

/// Resultant under the convention `Res(f, g) = lc(f)^(deg g) * prod_{f(a)=0} g(a)`
/// (the Sylvester determinant). Computed by a content-stripped pseudo-remainder
/// sequence with an exact rational cofactor, so no rational coefficients ever
/// appear in the remainders.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> Result<BigInt, Error> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut a = f.clone();
    let mut b = g.clone();
    // acc holds the rational multiplier accumulated by the reduction identities.
    let mut acc = BigRational::one();
    let mut sign = 1i32;
    loop {
        let m = a.degree().unwrap();
        let n = b.degree().unwrap();
        if m == 0 {
            // Res(c, b) = c^n
            let v = a.lc().pow(n as u32);
            return finish(sign, acc, v);
        }
        if n == 0 {
            let v = b.lc().pow(m as u32);
            return finish(sign, acc, v);
        }
        if m < n {
            if (m * n) % 2 == 1 {
                sign = -sign;
            }
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        // Pseudo-divide: lc(b)^(m-n+1) * a = q*b + r.
        let r = pseudo_rem(&a, &b);
        if r.is_zero() {
            return Ok(BigInt::zero());
        }
        let c = b.lc();
        let delta = (m - n) as i64;
        let d = r.degree().unwrap();
        // Res(a, b) = (-1)^(mn) * c^(m - d - (delta+1)*n) * Res(b, r)
        if (m * n) % 2 == 1 {
            sign = -sign;
        }
        let e = m as i64 - d as i64 - (delta + 1) * n as i64;
        acc = acc * rational_pow(&c, e);
        // Strip the content of r: Res(b, cont*r') = cont^(deg b) * Res(b, r').
        let cont = r.content();
        let r = if cont.is_one() {
            r
        } else {
            acc *= BigRational::from(cont.pow(n as u32));
            IntPoly::from_coeffs(r.coeffs.iter().map(|x| x / &cont).collect())
        };
        a = b;
        b = r;
    }

    fn rational_pow(c: &BigInt, e: i64) -> BigRational {
        let p = c.pow(e.unsigned_abs() as u32);
        if e >= 0 {
            BigRational::from(p)
        } else {
            BigRational::new(BigInt::one(), p)
        }
    }

    fn finish(sign: i32, acc: BigRational, v: BigInt) -> Result<BigInt, Error> {
        let total = acc * BigRational::from(v) * BigRational::from(BigInt::from(sign));
        debug_assert!(total.is_integer(), "resultant accumulator must be integral");
        Ok(total.to_integer())
    }
}

/// `Res(Phi_m, Phi_n)` by Apostol's closed form: `p^phi(n)` when `m/n` is a
/// power of the prime `p`, otherwise `1`. Requires `m > n > 1`, `gcd(m,n) > 1`.
pub fn res_cyclotomic_pair(m: u64, n: u64) -> Result<BigInt, Error> {
    if !(m > n && n > 1 && m.gcd(&n) > 1) {
        return Err(Error::CyclotomicPair(m, n));
    }
    if m % n != 0 {
        return Ok(BigInt::one());
    }
    let mut q = m / n;
    if q == 1 {
        return Ok(BigInt::one());
    }
    // smallest prime factor of q
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    while q % p == 0 {
        q /= p;
    }
    if q != 1 {
        return Ok(BigInt::one());
    }
    Ok(BigInt::from(p).pow(euler_phi(n) as u32))
}

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub(crate) fn bareiss_det(mat: &[Vec<BigInt>]) -> BigInt {
    let n = mat.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = mat.to_vec();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero());
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Exact cyclic resultant `r_n(f) = Res(t^n - 1, f) = prod_{zeta^n = 1} f(zeta)`.
///
/// Small `n` goes through the determinant of the `n x n` circulant whose symbol
/// is `f`; larger `n` within the guard uses `prod_{d | n} Res(Phi_d, f)`.
pub fn cyclic_resultant(f: &IntPoly, n: u64) -> Result<BigInt, Error> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if n == 0 {
        return Err(Error::SizeGuard(0));
    }
    let deg = f.degree().unwrap() as u64;
    if n.saturating_mul(deg.max(1)) > EXACT_CYCLIC_GUARD {
        return Err(Error::SizeGuard(n * deg.max(1)));
    }
    if n <= CIRCULANT_CUTOFF {
        Ok(circulant_det(f, n as usize))
    } else {
        let mut acc = BigInt::one();
        for d in divisors(n) {
            acc *= resultant(&cyclotomic(d)?, f)?;
        }
        Ok(acc)
    }
}

/// Determinant of the n x n circulant with the coefficient of `t^i` on the
/// i-th cyclic diagonal (folded mod n when `deg f >= n`).
pub(crate) fn circulant_det(f: &IntPoly, n: usize) -> BigInt {
    let mut row = vec![BigInt::zero(); n];
    for (i, c) in f.coeffs().iter().enumerate() {
        row[i % n] += c;
    }
    let mat: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| row[(j + n - i) % n].clone()).collect())
        .collect();
    bareiss_det(&mat)
}

/// Graeffe p-transform over the integers: the unique `f_[p]` with
/// `f_[p](t^p) = prod_{w^p = 1} f(w t)`; `deg f_[p] = deg f` and
/// `r_{pn}(f) = r_n(f_[p])`.
///
/// Computed in `Z[x]/(x^p - 1)`: a coefficient of the product is
/// `c_0 + c_1 x + ... + c_{p-1} x^{p-1}` with `c_1 = ... = c_{p-1}`, and its
/// value at a primitive p-th root of unity is `c_0 - c_1`.
pub fn graeffe_p(f: &IntPoly, p: u64) -> IntPoly {
    if f.is_zero() {
        return IntPoly::zero();
    }
    let p = p as usize;
    let d = f.degree().unwrap();
    // acc: polynomial in t with coefficients in Z[x]/(x^p - 1)
    let mut acc: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); p]];
    acc[0][0] = BigInt::one();
    for j in 0..p {
        let mut next: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); p]; acc.len() + d];
        for (i, a) in acc.iter().enumerate() {
            for (k, c) in f.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                // factor term: c * x^(k*j) * t^k
                let rot = (k * j) % p;
                let tgt = &mut next[i + k];
                for (r, av) in a.iter().enumerate() {
                    if !av.is_zero() {
                        tgt[(r + rot) % p] += av * c;
                    }
                }
            }
        }
        acc = next;
    }
    let mut out = vec![BigInt::zero(); d + 1];
    for (k, slot) in out.iter_mut().enumerate() {
        let cell = &acc[k * p];
        *slot = &cell[0] - &cell[1];
    }
    IntPoly::from_coeffs(out)
}

/// Graeffe p-transform with all coefficient arithmetic reduced mod the modulus.
pub fn graeffe_p_mod(f: &ModPoly, p: u64) -> ModPoly {
    if f.is_zero() {
        return f.clone();
    }
    let p = p as usize;
    let m = f.modulus().clone();
    let d = f.degree().unwrap();
    let mut acc: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); p]];
    acc[0][0] = BigUint::one();
    for j in 0..p {
        let mut next: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); p]; acc.len() + d];
        for (i, a) in acc.iter().enumerate() {
            for (k, c) in f.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let rot = (k * j) % p;
                let tgt = &mut next[i + k];
                for (r, av) in a.iter().enumerate() {
                    if !av.is_zero() {
                        let idx = (r + rot) % p;
                        tgt[idx] = (&tgt[idx] + av * c) % &m;
                    }
                }
            }
        }
        acc = next;
    }
    let mut out = vec![BigUint::zero(); d + 1];
    for (k, slot) in out.iter_mut().enumerate() {
        let cell = &acc[k * p];
        *slot = (&cell[0] + (&m - &cell[1] % &m)) % &m;
    }
    ModPoly::new(out, m)
}

/// `r_{p^n}(f) mod modulus` via n Graeffe steps followed by evaluation at 1.
/// Never materializes any object of size `p^n`.
pub fn cyclic_resultant_mod(f: &IntPoly, p: u64, n: u32, modulus: &BigUint) -> Result<BigUint, Error> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    assert!(n <= 64, "modular cyclic resultant level capped at 64");
    let mut g = ModPoly::from_int_poly(f, modulus);
    if g.is_zero() {
        // f vanishes mod the modulus; every cyclic resultant does too.
        return Ok(BigUint::zero());
    }
    for _ in 0..n {
        g = graeffe_p_mod(&g, p);
        if g.is_zero() {
            return Ok(BigUint::zero());
        }
    }
    Ok(g.eval_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> IntPoly {
        parse_poly(s).unwrap()
    }

    /// Sylvester-matrix oracle, independent of the PRS path.
    fn sylvester_resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
        let m = f.degree().unwrap();
        let n = g.degree().unwrap();
        if m == 0 && n == 0 {
            return BigInt::one();
        }
        let size = m + n;
        let mut mat = vec![vec![BigInt::zero(); size]; size];
        for i in 0..n {
            for (k, c) in f.coeffs().iter().enumerate() {
                mat[i][i + m - k] = c.clone();
            }
        }
        for i in 0..m {
            for (k, c) in g.coeffs().iter().enumerate() {
                mat[n + i][i + n - k] = c.clone();
            }
        }
        bareiss_det(&mat)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(poly("3t^2-5t+3"), IntPoly::from_i64(&[3, -5, 3]));
        assert_eq!(poly("1"), IntPoly::from_i64(&[1]));
        assert_eq!(poly("t^2-t+1"), IntPoly::from_i64(&[1, -1, 1]));
        assert_eq!(poly("-t^2+3t-1"), IntPoly::from_i64(&[-1, 3, -1]));
        assert_eq!(poly("t"), IntPoly::from_i64(&[0, 1]));
        assert_eq!(poly("-t"), IntPoly::from_i64(&[0, -1]));
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_poly("3t^2 % 1") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(parse_poly("t^2000000"), Err(Error::ExponentOverflow(_))));
        assert!(parse_poly("").is_err());
    }

    #[test]
    fn printer_round_trips() {
        for s in ["3t^2-5t+3", "t^2-t+1", "-t^2+3t-1", "1", "0", "t-1", "t^4-t^2+1"] {
            let f = poly(s);
            assert_eq!(format!("{f}"), s);
            assert_eq!(parse_poly(&format!("{f}")).unwrap(), f);
        }
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1).unwrap(), poly("t-1"));
        assert_eq!(cyclotomic(6).unwrap(), poly("t^2-t+1"));
        assert_eq!(cyclotomic(12).unwrap(), poly("t^4-t^2+1"));
        assert_eq!(cyclotomic(2).unwrap(), poly("t+1"));
        assert_eq!(cyclotomic(8).unwrap(), poly("t^4+1"));
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&poly("t-1"), &poly("t+1")).unwrap(), BigInt::from(2));
        let phi4 = cyclotomic(4).unwrap();
        let phi2 = cyclotomic(2).unwrap();
        assert_eq!(resultant(&phi4, &phi2).unwrap(), BigInt::from(2));
        let phi6 = cyclotomic(6).unwrap();
        assert_eq!(resultant(&phi6, &phi2).unwrap(), BigInt::from(3));
    }

    #[test]
    fn resultant_matches_sylvester_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let df = rng.gen_range(1..=5);
            let dg = rng.gen_range(1..=5);
            let f = IntPoly::from_coeffs(
                (0..=df)
                    .map(|i| BigInt::from(if i == df { rng.gen_range(1..=9) } else { rng.gen_range(-9..=9) }))
                    .collect(),
            );
            let g = IntPoly::from_coeffs(
                (0..=dg)
                    .map(|i| BigInt::from(if i == dg { rng.gen_range(1..=9) } else { rng.gen_range(-9..=9) }))
                    .collect(),
            );
            let r_fg = resultant(&f, &g).unwrap();
            assert_eq!(r_fg, sylvester_resultant(&f, &g), "f={f} g={g}");
            // sign law
            let r_gf = resultant(&g, &f).unwrap();
            let sgn = if (f.degree().unwrap() * g.degree().unwrap()) % 2 == 1 {
                -BigInt::one()
            } else {
                BigInt::one()
            };
            assert_eq!(r_fg, sgn * r_gf);
        }
    }

    #[test]
    fn apostol_pairs() {
        assert_eq!(res_cyclotomic_pair(4, 2).unwrap(), BigInt::from(2));
        assert_eq!(res_cyclotomic_pair(18, 6).unwrap(), BigInt::from(9));
        assert_eq!(res_cyclotomic_pair(12, 4).unwrap(), BigInt::from(9));
        assert_eq!(res_cyclotomic_pair(20, 4).unwrap(), BigInt::from(25));
        assert_eq!(res_cyclotomic_pair(12, 6).unwrap(), BigInt::from(4));
        assert!(res_cyclotomic_pair(2, 4).is_err());
        // direct verification against the resultant engine
        for (m, n) in [(4u64, 2u64), (18, 6), (12, 4), (20, 4), (12, 6), (9, 3), (15, 3)] {
            let direct = resultant(&cyclotomic(m).unwrap(), &cyclotomic(n).unwrap()).unwrap();
            assert_eq!(res_cyclotomic_pair(m, n).unwrap(), direct.abs(), "(m,n)=({m},{n})");
        }
    }

    #[test]
    fn cyclic_resultant_examples() {
        assert_eq!(cyclic_resultant(&poly("t^2-t+1"), 4).unwrap(), BigInt::from(3));
        let f = poly("3t^2-5t+3");
        assert_eq!(cyclic_resultant(&f, 1).unwrap(), f.eval_i64(1));
        assert_eq!(cyclic_resultant(&poly("t^2+5"), 2).unwrap(), BigInt::from(36));
    }

    #[test]
    fn cyclic_resultant_large_path_agrees() {
        // force the cyclotomic-product branch and compare with the circulant
        let f = poly("t^2-t+1");
        let via_circ = circulant_det(&f, 72);
        let via_prod = cyclic_resultant(&f, 72).unwrap_or_else(|_| unreachable!());
        // n = 72 > cutoff, so cyclic_resultant used the product path
        assert_eq!(via_circ, via_prod);
    }

    #[test]
    fn graeffe_examples() {
        // (t-2)(-t-2) = 4 - t^2
        assert_eq!(graeffe_p(&poly("t-2"), 2), poly("-t+4"));
        // r_2(t-2) = f_[2](1) = 3
        assert_eq!(graeffe_p(&poly("t-2"), 2).eval_i64(1), BigInt::from(3));
        // f = t-1: r_p(t-1) = 0 so f_[p](1) = 0
        for p in [2u64, 3, 5] {
            assert_eq!(graeffe_p(&poly("t-1"), p).eval_i64(1), BigInt::zero());
        }
        // (t^2-t+1)(t^2+t+1) = t^4+t^2+1
        assert_eq!(graeffe_p(&poly("t^2-t+1"), 2), poly("t^2+t+1"));
        assert_eq!(
            cyclic_resultant(&graeffe_p(&poly("t^2-t+1"), 2), 2).unwrap(),
            cyclic_resultant(&poly("t^2-t+1"), 4).unwrap()
        );
    }

    #[test]
    fn graeffe_identity_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let d = rng.gen_range(1..=4);
            let f = IntPoly::from_coeffs(
                (0..=d)
                    .map(|i| BigInt::from(if i == d { rng.gen_range(1..=8) } else { rng.gen_range(-8..=8) }))
                    .collect(),
            );
            for p in [2u64, 3, 5] {
                let fp = graeffe_p(&f, p);
                assert_eq!(fp.degree(), f.degree());
                for n in 1..=3u64 {
                    assert_eq!(
                        cyclic_resultant(&f, p * n).unwrap(),
                        cyclic_resultant(&fp, n).unwrap(),
                        "f={f} p={p} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn modular_path_agrees_with_exact() {
        let f = poly("3t^2-5t+3");
        let modulus = BigUint::from(1_000_003u64);
        for (p, n) in [(2u64, 3u32), (3, 2), (5, 2), (7, 1)] {
            let exact = cyclic_resultant(&f, p.pow(n)).unwrap();
            let exact_mod = exact.mod_floor(&BigInt::from(modulus.clone())).to_biguint().unwrap();
            assert_eq!(cyclic_resultant_mod(&f, p, n, &modulus).unwrap(), exact_mod);
        }
        // n = 0 gives f(1) mod m
        assert_eq!(
            cyclic_resultant_mod(&f, 7, 0, &modulus).unwrap(),
            BigUint::from(1u32)
        );
    }

    #[test]
    fn stable_small_value_deep_in_tower() {
        // Res(t^{2^n}-1, t^2-t+1) = 3 for all n >= 1
        let f = poly("t^2-t+1");
        let modulus = BigUint::from(1_000_000u64);
        assert_eq!(cyclic_resultant_mod(&f, 2, 10, &modulus).unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn seven_adic_digits_of_seven_two_knot() {
        // |H_1(X_{7^6})| begins 1 + 4*7 + 7^2 + 4*7^3 + 0 + 6*7^5 + 6*7^6 + 2*7^7 + 2*7^8
        let f = poly("3t^2-5t+3");
        let m = BigUint::from(7u64).pow(9);
        let r = cyclic_resultant_mod(&f, 7, 6, &m).unwrap();
        let mut digits = Vec::new();
        let mut v = r;
        for _ in 0..9 {
            digits.push((&v % 7u64).to_string());
            v /= 7u64;
        }
        assert_eq!(digits, ["1", "4", "1", "4", "0", "6", "6", "2", "2"]);
    }
}
