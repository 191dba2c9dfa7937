//! Exact arithmetic in the layers B_n of the cyclotomic Z_2-tower over Q:
//! B_n = Q(X_n) with X_n = 2cos(2pi/2^{n+2}), ring of integers Z[X_n].
//! Units, Pell decompositions, the continued-fraction identity, the Galois
//! action, norms and traces, and the trace-bound evaluation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::intpoly::IntPoly;

/// Level ceiling for tower contexts.
pub const MAX_LEVEL: u32 = 10;

/// Level ceiling for the unit/Pell/CF certificates.
pub const MAX_CERT_LEVEL: u32 = 8;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("level {0} outside the supported range 1..={1}")]
    LevelGuard(u32, u32),
    #[error("elements live at different levels: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("not a unit: inverse has denominator {0}")]
    NonUnit(String),
    #[error("cannot invert zero")]
    ZeroInverse,
    #[error("relative norm failed to descend: odd coordinate {0} nonzero")]
    DescentFailed(usize),
    #[error("candidate is not in the relative-norm-one group")]
    NotNormOne,
    #[error("candidate {0} is excluded (the conjecture excludes -1 and 1)")]
    ExcludedCandidate(String),
    #[error("no (j, sign) with epsilon = +-(1+X) sigma^j(1+X)^(-1); search exhausted")]
    SearchFailed,
}

/// Minimal polynomial Psi_n of X_n: Psi_1 = x^2 - 2, Psi_n(x) =
/// Psi_{n-1}(x^2 - 2); degree 2^n.
pub fn weber_min_poly(n: u32) -> Result<IntPoly, Error> {
    if n < 1 || n > MAX_LEVEL {
        return Err(Error::LevelGuard(n, MAX_LEVEL));
    }
    let mut psi = IntPoly::from_i64(&[-2, 0, 1]);
    let inner = IntPoly::from_i64(&[-2, 0, 1]);
    for _ in 1..n {
        psi = compose(&psi, &inner);
    }
    Ok(psi)
}

fn compose(f: &IntPoly, g: &IntPoly) -> IntPoly {
    let mut acc = IntPoly::zero();
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(g).add(&IntPoly::from_coeffs(vec![c.clone()]));
    }
    acc
}

/// Shared per-level data: Psi_n, Newton power sums, and the sigma images of
/// the power basis.
#[derive(Debug)]
pub struct WeberTowerCtx {
    pub n: u32,
    pub dim: usize,
    pub psi: IntPoly,
    /// power_sums[k] = Tr(X_n^k) for k < dim
    pub power_sums: Vec<BigInt>,
    /// sigma_images[i] = coordinates of sigma(X_n^i)
    sigma_images: Vec<Vec<BigInt>>,
}

static CTX_CACHE: Lazy<Mutex<HashMap<u32, Arc<WeberTowerCtx>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

pub fn tower_ctx(n: u32) -> Result<Arc<WeberTowerCtx>, Error> {
    if n < 1 || n > MAX_LEVEL {
        return Err(Error::LevelGuard(n, MAX_LEVEL));
    }
    if let Some(ctx) = CTX_CACHE.lock().unwrap().get(&n) {
        return Ok(ctx.clone());
    }
    let ctx = Arc::new(WeberTowerCtx::build(n)?);
    CTX_CACHE.lock().unwrap().insert(n, ctx.clone());
    Ok(ctx)
}

impl WeberTowerCtx {
    fn build(n: u32) -> Result<Self, Error> {
        let psi = weber_min_poly(n)?;
        let dim = 1usize << n;
        // Newton identities: p_k + a_{d-1} p_{k-1} + ... + k a_{d-k} = 0
        let mut power_sums = vec![BigInt::from(dim as i64)];
        for k in 1..dim {
            let mut s = BigInt::from(k as i64) * psi.coeff(dim - k);
            for i in 1..k {
                s += psi.coeff(dim - i) * &power_sums[k - i];
            }
            power_sums.push(-s);
        }
        // sigma(X) = X^3 - 3X mod Psi; images of the power basis
        let sx = reduce_mod(vec![BigInt::zero(), BigInt::from(-3), BigInt::zero(), BigInt::one()], &psi, dim);
        let mut sigma_images: Vec<Vec<BigInt>> = Vec::with_capacity(dim);
        let mut cur = {
            let mut one = vec![BigInt::zero(); dim];
            one[0] = BigInt::one();
            one
        };
        sigma_images.push(cur.clone());
        for _ in 1..dim {
            cur = mul_coords(&cur, &sx, &psi, dim);
            sigma_images.push(cur.clone());
        }
        Ok(WeberTowerCtx { n, dim, psi, power_sums, sigma_images })
    }
}

fn reduce_mod(mut coeffs: Vec<BigInt>, psi: &IntPoly, dim: usize) -> Vec<BigInt> {
    while coeffs.len() > dim {
        let lead = coeffs.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = coeffs.len() - dim;
        for (i, c) in psi.coeffs()[..dim].iter().enumerate() {
            coeffs[shift + i] -= &lead * c;
        }
    }
    coeffs.resize(dim, BigInt::zero());
    coeffs
}

fn mul_coords(a: &[BigInt], b: &[BigInt], psi: &IntPoly, dim: usize) -> Vec<BigInt> {
    let mut prod = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    reduce_mod(prod, psi, dim)
}

/// An element of Z[X_n] in the power basis {1, X_n, ..., X_n^{2^n - 1}};
/// level 0 is Z itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeberElem {
    pub n: u32,
    pub coords: Vec<BigInt>,
}

impl WeberElem {
    pub fn new(n: u32, mut coords: Vec<BigInt>) -> Self {
        let dim = 1usize << n;
        coords.resize(dim, BigInt::zero());
        WeberElem { n, coords }
    }

    pub fn from_i64(n: u32, coords: &[i64]) -> Self {
        WeberElem::new(n, coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(n: u32) -> Self {
        WeberElem::new(n, vec![])
    }

    pub fn one(n: u32) -> Self {
        WeberElem::new(n, vec![BigInt::one()])
    }

    pub fn integer(n: u32, v: i64) -> Self {
        WeberElem::new(n, vec![BigInt::from(v)])
    }

    /// The generator X_n itself.
    pub fn x(n: u32) -> Self {
        assert!(n >= 1);
        WeberElem::new(n, vec![BigInt::zero(), BigInt::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_integer(&self) -> bool {
        self.coords[1..].iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.n != other.n {
            return Err(Error::LevelMismatch(self.n, other.n));
        }
        Ok(WeberElem::new(
            self.n,
            self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        if self.n != other.n {
            return Err(Error::LevelMismatch(self.n, other.n));
        }
        Ok(WeberElem::new(
            self.n,
            self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn neg(&self) -> Self {
        WeberElem::new(self.n, self.coords.iter().map(|c| -c).collect())
    }
}

/// Product in Z[X_n], reduced mod Psi_n.
pub fn welem_mul(u: &WeberElem, v: &WeberElem) -> Result<WeberElem, Error> {
    if u.n != v.n {
        return Err(Error::LevelMismatch(u.n, v.n));
    }
    if u.n == 0 {
        return Ok(WeberElem::new(0, vec![&u.coords[0] * &v.coords[0]]));
    }
    let ctx = tower_ctx(u.n)?;
    Ok(WeberElem::new(u.n, mul_coords(&u.coords, &v.coords, &ctx.psi, ctx.dim)))
}

/// Inverse in Z[X_n] via extended gcd over Q with an integrality check.
pub fn welem_inv(u: &WeberElem) -> Result<WeberElem, Error> {
    if u.is_zero() {
        return Err(Error::ZeroInverse);
    }
    if u.n == 0 {
        let c = &u.coords[0];
        if c.magnitude().is_one() {
            return Ok(WeberElem::new(0, vec![c.clone()]));
        }
        return Err(Error::NonUnit(c.to_string()));
    }
    let ctx = tower_ctx(u.n)?;
    let psi: Vec<BigRational> =
        ctx.psi.coeffs().iter().map(|c| BigRational::from(c.clone())).collect();
    let a: Vec<BigRational> = u.coords.iter().map(|c| BigRational::from(c.clone())).collect();
    let inv = rat_poly_invert(&a, &psi).ok_or(Error::ZeroInverse)?;
    let mut coords = Vec::with_capacity(ctx.dim);
    for c in &inv {
        if !c.is_integer() {
            return Err(Error::NonUnit(c.denom().to_string()));
        }
        coords.push(c.to_integer());
    }
    Ok(WeberElem::new(u.n, coords))
}

fn rat_trim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn rat_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    rat_trim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let coef = r.last().unwrap() / &b[db];
        q[k] = coef.clone();
        for (i, bc) in b.iter().enumerate() {
            let sub = &coef * bc;
            r[k + i] -= sub;
        }
        rat_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    (q, r)
}

/// Inverse of `a` mod the monic polynomial `m` over Q, by extended Euclid.
fn rat_poly_invert(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    rat_trim(&mut r0);
    rat_trim(&mut r1);
    let mut s0: Vec<BigRational> = vec![];
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while !r1.is_empty() {
        let (q, r) = rat_divmod(&r0, &r1);
        // s = s0 - q * s1
        let mut qs = vec![BigRational::zero(); q.len() + s1.len()];
        for (i, qc) in q.iter().enumerate() {
            for (j, sc) in s1.iter().enumerate() {
                qs[i + j] += qc * sc;
            }
        }
        let len = qs.len().max(s0.len());
        let mut s = vec![BigRational::zero(); len];
        for (i, c) in s0.iter().enumerate() {
            s[i] += c;
        }
        for (i, c) in qs.iter().enumerate() {
            s[i] -= c;
        }
        rat_trim(&mut s);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    if r0.len() != 1 {
        return None; // gcd not constant: a shares a factor with m
    }
    let c = r0[0].clone();
    let mut out: Vec<BigRational> = s0.into_iter().map(|x| x / &c).collect();
    let deg = m.len() - 1;
    out.resize(deg, BigRational::zero());
    Some(out)
}

/// sigma^j with sigma induced by zeta -> zeta^3: X_n -> X_n^3 - 3 X_n.
/// sigma generates the cyclic Galois group of order 2^n.
pub fn galois_sigma(u: &WeberElem, j: u64) -> Result<WeberElem, Error> {
    if u.n == 0 {
        return Ok(u.clone());
    }
    let ctx = tower_ctx(u.n)?;
    let j = (j % (1u64 << u.n)) as u32;
    let mut cur = u.clone();
    for _ in 0..j {
        let mut out = vec![BigInt::zero(); ctx.dim];
        for (i, c) in cur.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, s) in ctx.sigma_images[i].iter().enumerate() {
                out[k] += c * s;
            }
        }
        cur = WeberElem::new(u.n, out);
    }
    Ok(cur)
}

/// tau = sigma^{2^{n-1}}: the level-(n-1)-fixing involution X_n -> -X_n.
pub fn galois_tau(u: &WeberElem) -> Result<WeberElem, Error> {
    assert!(u.n >= 1);
    Ok(WeberElem::new(
        u.n,
        u.coords
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
            .collect(),
    ))
}

/// Relative norm N_{n/n-1}(u) = u * tau(u), re-expressed at level n-1 via
/// X_n^2 = 2 + X_{n-1}.
pub fn rel_norm(u: &WeberElem) -> Result<WeberElem, Error> {
    assert!(u.n >= 1);
    let v = welem_mul(u, &galois_tau(u)?)?;
    for (i, c) in v.coords.iter().enumerate() {
        if i % 2 == 1 && !c.is_zero() {
            return Err(Error::DescentFailed(i));
        }
    }
    // sum c_{2i} X_n^{2i} = P(X_{n-1} + 2) with P(z) = sum c_{2i} z^i
    let p = IntPoly::from_coeffs(v.coords.iter().step_by(2).cloned().collect());
    let shifted = p.shift(&BigInt::from(2));
    let mut coords: Vec<BigInt> = shifted.coeffs().to_vec();
    coords.resize(1usize << (u.n - 1), BigInt::zero());
    Ok(WeberElem::new(u.n - 1, coords))
}

/// Absolute trace Tr_{B_n/Q}(u) via the Newton power sums of Psi_n.
pub fn abs_trace(u: &WeberElem) -> Result<BigInt, Error> {
    if u.n == 0 {
        return Ok(u.coords[0].clone());
    }
    let ctx = tower_ctx(u.n)?;
    let mut tr = BigInt::zero();
    for (i, c) in u.coords.iter().enumerate() {
        tr += c * &ctx.power_sums[i];
    }
    Ok(tr)
}

/// Trace computed independently by summing the sigma-orbit; used as an
/// oracle for [`abs_trace`].
pub fn abs_trace_orbit(u: &WeberElem) -> Result<BigInt, Error> {
    if u.n == 0 {
        return Ok(u.coords[0].clone());
    }
    let mut sum = WeberElem::zero(u.n);
    let mut cur = u.clone();
    for _ in 0..(1u64 << u.n) {
        sum = sum.add(&cur)?;
        cur = galois_sigma(&cur, 1)?;
    }
    if !sum.is_integer() {
        return Err(Error::DescentFailed(1));
    }
    Ok(sum.coords[0].clone())
}

/// Lift an element of B_{n-1} into B_n via X_{n-1} = X_n^2 - 2.
pub fn lift(u: &WeberElem) -> Result<WeberElem, Error> {
    let n = u.n + 1;
    let ctx = tower_ctx(n)?;
    let img = WeberElem::new(n, vec![BigInt::from(-2), BigInt::zero(), BigInt::one()]);
    let mut acc = WeberElem::zero(n);
    for c in u.coords.iter().rev() {
        acc = welem_mul(&acc, &img)?;
        acc.coords[0] += c;
        acc = WeberElem::new(n, reduce_mod(acc.coords, &ctx.psi, ctx.dim));
    }
    Ok(acc)
}

/// The fundamental-style unit epsilon_n = (X_n + 1)/(X_n - 1) and its Pell
/// decomposition epsilon_n = a + X_n b with a, b at level n-1 satisfying
/// a^2 - (2 + X_{n-1}) b^2 = 1.
#[derive(Debug, Clone)]
pub struct PellData {
    pub epsilon: WeberElem,
    pub a: WeberElem,
    pub b: WeberElem,
    pub pell_ok: bool,
}

pub fn epsilon_unit(n: u32) -> Result<WeberElem, Error> {
    if n < 1 || n > MAX_CERT_LEVEL {
        return Err(Error::LevelGuard(n, MAX_CERT_LEVEL));
    }
    let x = WeberElem::x(n);
    let num = x.add(&WeberElem::one(n))?;
    let den = x.sub(&WeberElem::one(n))?;
    welem_mul(&num, &welem_inv(&den)?)
}

pub fn epsilon_and_pell(n: u32) -> Result<PellData, Error> {
    let epsilon = epsilon_unit(n)?;
    // split even/odd coordinates: epsilon = A(X^2) + X B(X^2)
    let even = IntPoly::from_coeffs(epsilon.coords.iter().step_by(2).cloned().collect());
    let odd = IntPoly::from_coeffs(epsilon.coords.iter().skip(1).step_by(2).cloned().collect());
    let dim = 1usize << (n - 1);
    let descend = |p: &IntPoly| -> WeberElem {
        let mut coords: Vec<BigInt> = p.shift(&BigInt::from(2)).coeffs().to_vec();
        coords.resize(dim, BigInt::zero());
        WeberElem::new(n - 1, coords)
    };
    let a = descend(&even);
    let b = descend(&odd);
    // a^2 - (2 + X_{n-1}) b^2 = 1
    let m = if n == 1 {
        WeberElem::integer(0, 2)
    } else {
        WeberElem::x(n - 1).add(&WeberElem::integer(n - 1, 2))?
    };
    let lhs = welem_mul(&a, &a)?.sub(&welem_mul(&m, &welem_mul(&b, &b)?)?)?;
    let pell_ok = lhs == WeberElem::one(n - 1);
    Ok(PellData { epsilon, a, b, pell_ok })
}

/// Certificate for the period-2 continued fraction of X_n.
#[derive(Debug, Clone)]
pub struct CfCertificate {
    pub n: u32,
    /// 2 Z^2 - 2 c Z - c = 0 holds exactly in B_n, with c = 2(1+X_{n-1})^{-1}
    /// and Z = (X_n - 1)^{-1}
    pub exact_ok: bool,
    /// fixed-point convergents of [1; c, 2, c, 2, ...] approach X_n
    pub float_ok: bool,
}

pub fn cf_identity_check(n: u32) -> Result<CfCertificate, Error> {
    if n < 1 || n > MAX_CERT_LEVEL {
        return Err(Error::LevelGuard(n, MAX_CERT_LEVEL));
    }
    let c = if n == 1 {
        WeberElem::integer(1, 2)
    } else {
        let below = WeberElem::x(n - 1).add(&WeberElem::one(n - 1))?;
        lift(&welem_mul(&WeberElem::integer(n - 1, 2), &welem_inv(&below)?)?)?
    };
    let z = welem_inv(&WeberElem::x(n).sub(&WeberElem::one(n))?)?;
    let two = WeberElem::integer(n, 2);
    let lhs = welem_mul(&two, &welem_mul(&z, &z)?)?
        .sub(&welem_mul(&two, &welem_mul(&c, &z)?)?)?
        .sub(&c)?;
    let exact_ok = lhs.is_zero();
    let float_ok = cf_float_check(n);
    Ok(CfCertificate { n, exact_ok, float_ok })
}

const SCALE: u32 = 256;

/// X_n at fixed-point scale 2^SCALE, via X_n = sqrt(2 + X_{n-1}), X_0 = 0.
pub fn xn_fixed(n: u32) -> BigInt {
    let two = BigInt::from(2) << SCALE;
    let mut x = BigInt::zero();
    for _ in 0..n {
        let arg: BigUint = ((&two + &x) << SCALE).to_biguint().unwrap();
        x = BigInt::from(arg.sqrt());
    }
    x
}

/// Evaluate a Weber element at the fixed-point X_n (scale 2^SCALE).
pub fn eval_fixed(u: &WeberElem) -> BigInt {
    let x = xn_fixed(u.n);
    let mut acc = BigInt::zero();
    for c in u.coords.iter().rev() {
        acc = (acc * &x) >> SCALE;
        acc += c << SCALE;
    }
    acc
}

fn cf_float_check(n: u32) -> bool {
    let xn = xn_fixed(n);
    let one = BigInt::one() << SCALE;
    // c = 2 / (1 + X_{n-1}) numerically
    let c = (BigInt::from(2) << (2 * SCALE)) / (&one + xn_fixed(n - 1));
    let two = BigInt::from(2) << SCALE;
    // convergents h_k / k_k of [1; c, 2, c, 2, ...], fixed point
    let mut h0 = one.clone();
    let mut k0 = BigInt::zero();
    let mut h1 = one.clone(); // a_0 = 1
    let mut k1 = one.clone();
    for step in 0..120 {
        let a = if step % 2 == 0 { &c } else { &two };
        let h2 = ((a * &h1) >> SCALE) + &h0;
        let k2 = ((a * &k1) >> SCALE) + &k0;
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
    }
    if k1.is_zero() {
        return false;
    }
    let approx = (&h1 << SCALE) / &k1;
    let diff = (&approx - &xn).abs();
    diff < (BigInt::one() << (SCALE - 100))
}

/// Certificate that epsilon_n is a cyclotomic unit:
/// epsilon_n = sign * (1 + X_n) * sigma^j(1 + X_n)^{-1}.
#[derive(Debug, Clone)]
pub struct CycloCertificate {
    pub n: u32,
    pub j: u32,
    /// +1 or -1
    pub sign: i8,
}

pub fn cyclo_unit_relation(n: u32) -> Result<CycloCertificate, Error> {
    if n < 1 || n > 6 {
        return Err(Error::LevelGuard(n, 6));
    }
    let w = WeberElem::x(n).add(&WeberElem::one(n))?;
    // 1 + X_n is a unit: Psi_n(-1) = -1
    let winv = welem_inv(&w)?;
    debug_assert!(!winv.is_zero());
    let eps = epsilon_unit(n)?;
    let mut s = w.clone();
    for j in 0..(1u32 << n) {
        let cand = welem_mul(&w, &welem_inv(&s)?)?;
        if cand == eps {
            return Ok(CycloCertificate { n, j, sign: 1 });
        }
        if cand.neg() == eps {
            return Ok(CycloCertificate { n, j, sign: -1 });
        }
        s = galois_sigma(&s, 1)?;
    }
    Err(Error::SearchFailed)
}

/// One candidate evaluation against the conjectured trace bound.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub trace: BigInt,
    pub meets_bound: bool,
}

#[derive(Debug, Clone)]
pub struct TraceReport {
    pub n: u32,
    pub c_n: u64,
    pub bound: BigInt,
    pub entries: Vec<TraceEntry>,
}

/// The conjectured bound constant: c_1 = 2, c_n = 2 round(2^n / 5).
pub fn trace_bound_constant(n: u32) -> u64 {
    if n == 1 {
        return 2;
    }
    let p = 1u64 << n;
    2 * ((2 * p + 5) / 10)
}

/// Evaluates Tr_n(eps^2) for candidates in the relative-norm-one group
/// against the bound 2^n (1 + 8 c_n). No minimality claim is made.
pub fn trace_conjecture_eval(n: u32, candidates: &[WeberElem]) -> Result<TraceReport, Error> {
    if n < 1 || n > MAX_CERT_LEVEL {
        return Err(Error::LevelGuard(n, MAX_CERT_LEVEL));
    }
    let c_n = trace_bound_constant(n);
    let bound = BigInt::from(1u64 << n) * BigInt::from(1 + 8 * c_n);
    let mut entries = Vec::new();
    for cand in candidates {
        if cand.n != n {
            return Err(Error::LevelMismatch(cand.n, n));
        }
        if cand == &WeberElem::one(n) || cand == &WeberElem::one(n).neg() {
            return Err(Error::ExcludedCandidate(format!("{:?}", cand.coords[0])));
        }
        if rel_norm(cand)? != WeberElem::one(n - 1) {
            return Err(Error::NotNormOne);
        }
        let sq = welem_mul(cand, cand)?;
        let trace = abs_trace(&sq)?;
        entries.push(TraceEntry { meets_bound: trace >= bound, trace });
    }
    Ok(TraceReport { n, c_n, bound, entries })
}
