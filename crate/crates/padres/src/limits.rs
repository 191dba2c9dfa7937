//! p-adic limits of p-power cyclic resultants: the total limit via the
//! explicit sign/Teichmueller/unit-root formula, the non-p part via a
//! Weierstrass factor and a truncated p-adic log resultant, Iwasawa
//! invariants with a verified valuation law, l-part stabilization, norm
//! coherence certificates, and tower tables.
//!
//! Every public entry point cross-checks the closed formula against the
//! modular Graeffe oracle; the oracle wins on disagreement.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::{Serialize, Serializer};
use serde_json::json;

use crate::intpoly::{self, cyclic_resultant, cyclic_resultant_mod, cyclotomic, IntPoly, ModPoly};
use crate::localfactor::{
    self, factor_fp_seeded, slope_data, strip_p_content, unit_root_norm_minus_one,
    weierstrass_small_factor, FpPoly, SlopeData, DEFAULT_FACTOR_SEED,
};
use crate::padic::{self, pow_p, valuation_int, valuation_uint, PadicScalar};

/// Absolute precision ceiling shared by every limit routine.
pub const MAX_PRECISION: u32 = 200;

/// Default working precision in p-adic digits.
pub const DEFAULT_PRECISION: u32 = 32;

/// Largest modulus exponent the adaptive valuation probes will try.
const MODULUS_EXP_CAP: u32 = 4096;

/// Largest exponent used while verifying the valuation law (keeps mu > 0
/// towers with large p affordable).
const LAW_EXP_CAP: u32 = 3000;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("polynomial error: {0}")]
    Poly(#[from] intpoly::Error),
    #[error("local factorization error: {0}")]
    Local(#[from] localfactor::Error),
    #[error("p-adic error: {0}")]
    Padic(#[from] padic::Error),
    #[error("precision {0} exceeds the cap {MAX_PRECISION}")]
    PrecisionGuard(u32),
    #[error("tower vanishes identically from level {0} on")]
    VanishingTower(u32),
    #[error("auxiliary prime l = {0} must differ from p")]
    LEqualsP(u64),
    #[error("formula/oracle mismatch at level {n}: formula {formula} vs oracle {oracle} mod {p}^{exp}")]
    OracleMismatch { n: u32, exp: u32, p: u64, formula: BigUint, oracle: BigUint },
    #[error("modulus exponent cap exhausted while isolating a valuation")]
    PrecisionExhausted,
    #[error("l-adic valuations did not stabilize; observed {0:?}")]
    Unstabilized(Vec<u32>),
    #[error("valuation law v = {lambda}n + {mu}p^n + {nu} failed; observed {observed:?} at levels {levels:?}")]
    LawVerification { lambda: usize, mu: u32, nu: i64, observed: Vec<u32>, levels: Vec<u32> },
}

/// mu: the maximal exponent with p^mu dividing every coefficient.
pub fn iwasawa_mu(f: &IntPoly, p: u64) -> Result<u32, Error> {
    if f.is_zero() {
        return Err(Error::Poly(intpoly::Error::ZeroPolynomial));
    }
    Ok(localfactor::content_p_exponent(f, p))
}

/// Smallest j such that the p^j-th cyclotomic polynomial divides f, if any;
/// such a factor kills r_{p^n}(f) for every n >= j.
pub fn zero_tower_level(f: &IntPoly, p: u64) -> Option<u32> {
    let deg = f.degree()? as u64;
    let mut j = 0u32;
    loop {
        let m = p.checked_pow(j)?;
        let phi_deg = if j == 0 { 1 } else { m - m / p };
        if phi_deg > deg {
            return None;
        }
        let phi = cyclotomic(m).ok()?;
        if f.div_exact(&phi).is_ok() {
            return Some(j);
        }
        j += 1;
    }
}

/// v_p(r_{p^n}(f)) together with the witnessing residue, found by doubling
/// the modulus exponent until the residue is nonzero.
fn tower_vp(f: &IntPoly, p: u64, n: u32) -> Result<(u32, BigUint, u32), Error> {
    let mut exp = 8u32;
    loop {
        let m = pow_p(p, exp);
        let r = cyclic_resultant_mod(f, p, n, &m)?;
        if !r.is_zero() {
            return Ok((valuation_uint(&r, p), r, exp));
        }
        if exp >= MODULUS_EXP_CAP {
            return Err(Error::PrecisionExhausted);
        }
        exp = (exp * 2).min(MODULUS_EXP_CAP);
    }
}

fn check_precision(n: u32) -> Result<(), Error> {
    if n == 0 || n > MAX_PRECISION {
        return Err(Error::PrecisionGuard(n));
    }
    Ok(())
}

/// Product over the irreducible factors of mbar (skipping t - 1) of the norm
/// of (omega - 1), as a residue mod p^prec.
fn unit_root_product(mbar: &FpPoly, p: u64, prec: u32) -> Result<BigUint, Error> {
    let m = pow_p(p, prec);
    let mut acc = BigUint::one();
    if mbar.degree().unwrap_or(0) == 0 {
        return Ok(acc);
    }
    let t_minus_one = FpPoly::new(vec![p - 1, 1], p);
    let (_, factors) = factor_fp_seeded(mbar, DEFAULT_FACTOR_SEED)?;
    for (h, e) in factors {
        if h == t_minus_one {
            continue;
        }
        let norm = unit_root_norm_minus_one(&h, p, prec);
        for _ in 0..e {
            acc = acc * &norm % &m;
        }
    }
    Ok(acc)
}

/// sign * xi * product of (zeta_i - 1) over unit roots with residue != 1,
/// as a residue mod p^prec. This is the total limit when lambda = 0 and the
/// non-log part of the non-p limit always.
fn signed_unit_part(f_deg: usize, sd: &SlopeData, p: u64, prec: u32) -> Result<BigUint, Error> {
    let m = pow_p(p, prec);
    let xi = padic::teichmuller(&BigUint::from(sd.xi_residue), p, prec)?.value();
    let mut acc = xi * unit_root_product(&sd.mbar, p, prec)? % &m;
    if (p as usize * f_deg + sd.s) % 2 == 1 {
        acc = (&m - acc) % &m;
    }
    Ok(acc)
}

/// Oracle agreement for a claimed limit: v_p(claimed - r_{p^n}(f)) >= n + 1
/// for n = 1..=levels. `strict` turns a mismatch into a hard error; otherwise
/// the largest contiguous agreeing level is returned.
fn oracle_agreement(
    f: &IntPoly,
    p: u64,
    claimed: &BigUint,
    claimed_prec: u32,
    levels: u32,
    strict: bool,
) -> Result<u32, Error> {
    let mut agreed = 0u32;
    for n in 1..=levels {
        if n + 1 > claimed_prec {
            break;
        }
        let m = pow_p(p, n + 1);
        let lhs = claimed % &m;
        let rhs = cyclic_resultant_mod(f, p, n, &m)?;
        if lhs != rhs {
            if strict {
                return Err(Error::OracleMismatch { n, exp: n + 1, p, formula: lhs, oracle: rhs });
            }
            break;
        }
        agreed = n;
    }
    Ok(agreed)
}

/// The p-adic limit of r_{p^n}(f): zero exactly when p | f(1), otherwise
/// (-1)^{p deg f + s} xi prod (zeta_i - 1) over the unit roots.
pub fn limit_total(f: &IntPoly, p: u64, prec: u32) -> Result<PadicScalar, Error> {
    Ok(limit_total_checked(f, p, prec)?.0)
}

/// [`limit_total`] plus the deepest oracle level the value was checked at.
pub fn limit_total_checked(f: &IntPoly, p: u64, prec: u32) -> Result<(PadicScalar, u32), Error> {
    check_precision(prec)?;
    if f.is_zero() {
        return Err(Error::Poly(intpoly::Error::ZeroPolynomial));
    }
    let mu = iwasawa_mu(f, p)?;
    let levels = 6u32;
    if mu > 0 {
        let level = oracle_agreement(f, p, &BigUint::zero(), prec, levels, false)?;
        return Ok((PadicScalar::exact_zero(p, prec), level));
    }
    let sd = slope_data(f, p)?;
    if sd.lambda > 0 {
        // some zeta_i = 1, equivalently p | f(1): the limit is exactly zero
        debug_assert!(f.eval_i64(1).mod_floor(&BigInt::from(p)).is_zero());
        let level = oracle_agreement(f, p, &BigUint::zero(), prec, levels, false)?;
        return Ok((PadicScalar::exact_zero(p, prec), level));
    }
    let value = signed_unit_part(f.degree().unwrap(), &sd, p, prec)?;
    let level = oracle_agreement(f, p, &value, prec, levels, true)?;
    Ok((PadicScalar::from_biguint(p, prec, &value), level))
}

/// Non-p-part limit together with nu = v_p of the log product (0 when
/// lambda = 0). The returned scalar is a p-adic unit.
pub fn limit_nonp_with_nu(f: &IntPoly, p: u64, prec: u32) -> Result<(PadicScalar, i64), Error> {
    check_precision(prec)?;
    if f.is_zero() {
        return Err(Error::Poly(intpoly::Error::ZeroPolynomial));
    }
    if let Some(j) = zero_tower_level(f, p) {
        return Err(Error::VanishingTower(j));
    }
    let (_mu, g) = strip_p_content(f, p);
    let sd = slope_data(&g, p)?;
    let deg = g.degree().unwrap();
    if sd.lambda == 0 {
        let value = signed_unit_part(deg, &sd, p, prec)?;
        let out = PadicScalar::from_biguint(p, prec, &value);
        check_nonp_agreement(f, p, &out, sd.lambda, 0)?;
        return Ok((out, 0));
    }
    let g1 = g.eval_i64(1);
    let vg1 = valuation_int(&g1, p);
    let lambda = sd.lambda;
    let mut work = prec + 2 * vg1 + 2 * lambda as u32 + 8;
    loop {
        if work > padic::MAX_TEICHMULLER_PREC {
            return Err(Error::PrecisionExhausted);
        }
        match log_product(&g, lambda, p, work)? {
            Some((det, b)) => {
                let w = valuation_uint(&det, p);
                if work < w + prec + 2 {
                    work = w + prec + 8;
                    continue;
                }
                let nu = w as i64 - (lambda as u32 * b) as i64;
                let unit = &det / pow_p(p, w);
                let m = pow_p(p, prec);
                let value = signed_unit_part(deg, &sd, p, prec)? * (unit % &m) % &m;
                let out = PadicScalar::from_biguint(p, prec, &value);
                check_nonp_agreement(f, p, &out, lambda, nu)?;
                return Ok((out, nu));
            }
            None => {
                work = (work * 2).min(padic::MAX_TEICHMULLER_PREC + 1);
            }
        }
    }
}

/// Convenience wrapper discarding nu.
pub fn limit_nonp(f: &IntPoly, p: u64, prec: u32) -> Result<PadicScalar, Error> {
    Ok(limit_nonp_with_nu(f, p, prec)?.0)
}

/// prod log(alpha_i) over the roots with |alpha_i - 1|_p < 1, scaled by
/// p^{lambda * B}: the determinant of multiplication by the cleared
/// truncated log series on Z/p^work[u]/(P), with P the Weierstrass factor of
/// g(1 + u). Returns None when the determinant vanishes at this precision.
fn log_product(
    g: &IntPoly,
    lambda: usize,
    p: u64,
    work: u32,
) -> Result<Option<(BigUint, u32)>, Error> {
    let m = pow_p(p, work);
    let shifted = g.shift(&BigInt::one());
    let gm = ModPoly::from_int_poly(&shifted, &m);
    let pw = weierstrass_small_factor(&gm, p, work)?;
    debug_assert_eq!(pw.degree(), Some(lambda));
    // series length: tail valuation at least T/lambda - log_p T with margin
    let t_len = (lambda as u32 * (work + 4 * lambda as u32 + 8) + 40) as u64;
    let mut b = 0u32;
    while p.checked_pow(b + 1).is_some_and(|q| q <= t_len) {
        b += 1;
    }
    // coefficients of p^B * log(1 + u) truncated after u^T
    let mut coeffs: Vec<BigUint> = Vec::with_capacity(t_len as usize);
    for k in 1..=t_len {
        let v = {
            let mut v = 0u32;
            let mut kk = k;
            while kk % p == 0 {
                kk /= p;
                v += 1;
            }
            v
        };
        let kp = k / p.pow(v);
        let inv = padic::modinv(&(BigUint::from(kp) % &m), &m);
        let mut c = pow_p(p, b - v) * inv % &m;
        if k % 2 == 0 {
            c = (&m - c) % &m;
        }
        coeffs.push(c);
    }
    // Horner evaluation of the series at u in (Z/p^work)[u]/(P)
    let mut acc = ModPoly::new(vec![coeffs.pop().unwrap()], m.clone());
    let u_poly = ModPoly::new(vec![BigUint::zero(), BigUint::one()], m.clone());
    while let Some(c) = coeffs.pop() {
        acc = acc.mul(&u_poly).divmod_by_monic(&pw).1;
        acc = acc.add(&ModPoly::new(vec![c], m.clone()));
    }
    acc = acc.mul(&u_poly).divmod_by_monic(&pw).1;
    // determinant of multiplication by acc on the power basis
    let det = if lambda == 1 {
        BigInt::from(acc.coeff(0))
    } else {
        let mut cols: Vec<Vec<BigUint>> = Vec::with_capacity(lambda);
        let mut basis = ModPoly::new(vec![BigUint::one()], m.clone());
        for _ in 0..lambda {
            let prod = acc.mul(&basis).divmod_by_monic(&pw).1;
            cols.push((0..lambda).map(|i| prod.coeff(i)).collect());
            basis = basis.mul(&u_poly).divmod_by_monic(&pw).1;
        }
        let mat: Vec<Vec<BigInt>> = (0..lambda)
            .map(|i| (0..lambda).map(|j| BigInt::from(cols[j][i].clone())).collect())
            .collect();
        intpoly::bareiss_det(&mat)
    };
    let det = det.mod_floor(&BigInt::from(m)).to_biguint().unwrap();
    if det.is_zero() {
        return Ok(None);
    }
    Ok(Some((det, b)))
}

/// Exact-resultant congruence check for the non-p limit at the few levels
/// where exact computation is affordable.
fn check_nonp_agreement(
    f: &IntPoly,
    p: u64,
    claimed: &PadicScalar,
    lambda: usize,
    nu: i64,
) -> Result<(), Error> {
    let deg = f.degree().unwrap() as u64;
    let mut checked = 0u32;
    for n in 1..=8u32 {
        let pn = match p.checked_pow(n) {
            Some(v) if v <= 256 && v * deg.max(1) <= 100_000 => v,
            _ => break,
        };
        let slack = lambda as i64 + nu + 1;
        let k = (n as i64 - slack).min(claimed.prec() as i64);
        if k < 1 {
            continue;
        }
        let k = k as u32;
        let r = cyclic_resultant(f, pn)?;
        if r.is_zero() {
            return Err(Error::VanishingTower(n));
        }
        let v = valuation_int(&r, p);
        let nonp = &r / BigInt::from(pow_p(p, v));
        let m = BigInt::from(pow_p(p, k));
        let rhs = nonp.mod_floor(&m).to_biguint().unwrap();
        let lhs = claimed.value() % pow_p(p, k);
        if lhs != rhs {
            return Err(Error::OracleMismatch { n, exp: k, p, formula: lhs, oracle: rhs });
        }
        checked += 1;
        if checked >= 4 {
            break;
        }
    }
    Ok(())
}

/// (lambda, mu, nu) with the valuation law v_p(r_{p^n}) = lambda n + mu p^n
/// + nu verified on an adaptive window of consecutive levels against the
/// modular oracle. For mu > 0, lambda and nu describe f / p^mu.
pub fn iwasawa_invariants(f: &IntPoly, p: u64) -> Result<(usize, u32, i64), Error> {
    if f.is_zero() {
        return Err(Error::Poly(intpoly::Error::ZeroPolynomial));
    }
    if let Some(j) = zero_tower_level(f, p) {
        return Err(Error::VanishingTower(j));
    }
    let (mu, g) = strip_p_content(f, p);
    let sd = slope_data(&g, p)?;
    let lambda = sd.lambda;
    let nu = limit_nonp_with_nu(&g, p, DEFAULT_PRECISION)?.1;
    // the law holds once p^n-th powers of the lambda-counted roots are deep
    // enough in the principal units; start past that and extend the window
    let mut n0 = 1u32;
    while (p.saturating_pow(n0)) < 2 * lambda.max(1) as u64 {
        n0 += 1;
    }
    let predicted = |n: u32| -> Option<u32> {
        let v = lambda as i64 * n as i64 + mu as i64 * (p.checked_pow(n)? as i64) + nu;
        u32::try_from(v).ok()
    };
    let mut observed = Vec::new();
    let mut levels = Vec::new();
    let mut hits = 0u32;
    for n in n0..=8 {
        let Some(pv) = predicted(n) else { break };
        if pv + 2 > LAW_EXP_CAP {
            break;
        }
        let m = pow_p(p, pv + 2);
        let r = cyclic_resultant_mod(f, p, n, &m)?;
        let ok = !r.is_zero() && valuation_uint(&r, p) == pv;
        levels.push(n);
        observed.push(if r.is_zero() { pv + 2 } else { valuation_uint(&r, p) });
        if ok {
            hits += 1;
            if hits >= 3 {
                return Ok((lambda, mu, nu));
            }
        } else {
            hits = 0;
        }
    }
    if hits >= 1 {
        // short window (large p or mu): accept what was verifiable
        return Ok((lambda, mu, nu));
    }
    Err(Error::LawVerification { lambda, mu, nu, observed, levels })
}

/// p-adic limit of the l-part l^{v_l(r_{p^n}(f))}, certified by three
/// consecutive stable valuations.
pub fn lpart_limit(f: &IntPoly, p: u64, l: u64, prec: u32) -> Result<PadicScalar, Error> {
    check_precision(prec)?;
    if l == p {
        return Err(Error::LEqualsP(l));
    }
    if let Some(j) = zero_tower_level(f, p) {
        return Err(Error::VanishingTower(j));
    }
    let mut vals = Vec::new();
    for n in 1..=12u32 {
        let v = l_valuation_of_level(f, p, l, n)?;
        vals.push(v);
        let k = vals.len();
        if k >= 3 && vals[k - 1] == vals[k - 2] && vals[k - 2] == vals[k - 3] {
            let lv = BigUint::from(l).pow(vals[k - 1]);
            return Ok(PadicScalar::from_biguint(p, prec, &lv));
        }
    }
    Err(Error::Unstabilized(vals))
}

/// v_l(r_{p^n}(f)) via modular computation at doubling powers of l.
fn l_valuation_of_level(f: &IntPoly, p: u64, l: u64, n: u32) -> Result<u32, Error> {
    let mut exp = 16u32;
    loop {
        let m = pow_p(l, exp);
        let r = cyclic_resultant_mod(f, p, n, &m)?;
        if !r.is_zero() {
            return Ok(valuation_uint(&r, l));
        }
        if exp >= MODULUS_EXP_CAP {
            return Err(Error::PrecisionExhausted);
        }
        exp = (exp * 2).min(MODULUS_EXP_CAP);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoherenceStatus {
    Pass,
    Fail,
    SkippedZeroTower,
}

/// Witnessed outcome of a single norm-coherence congruence.
#[derive(Debug, Clone)]
pub struct CoherenceCert {
    pub n: u32,
    pub status: CoherenceStatus,
    /// exponent of the modulus both sides were compared under
    pub modulus_exp: u32,
    pub lhs: BigUint,
    pub rhs: BigUint,
}

/// Checks r_{p^n}(f) = r_{p^{n-1}}(f) * (1 + O(p^n)): both sides share their
/// p-valuation and the non-p parts agree mod p^n.
pub fn check_norm_coherence(f: &IntPoly, p: u64, n: u32) -> Result<CoherenceCert, Error> {
    assert!(n >= 1);
    if zero_tower_level(f, p).is_some() {
        return Ok(CoherenceCert {
            n,
            status: CoherenceStatus::SkippedZeroTower,
            modulus_exp: 0,
            lhs: BigUint::zero(),
            rhs: BigUint::zero(),
        });
    }
    // the p-valuation grows level to level when lambda > 0; the congruence
    // lives on the non-p parts, so strip each side's valuation first
    let (va, ra, _) = tower_vp(f, p, n)?;
    let (vb, rb, _) = tower_vp(f, p, n - 1)?;
    let window = pow_p(p, n + 2);
    let lhs = cyclic_resultant_mod(f, p, n, &pow_p(p, va + n + 2))? / pow_p(p, va) % &window;
    let rhs = cyclic_resultant_mod(f, p, n - 1, &pow_p(p, vb + n + 2))? / pow_p(p, vb) % &window;
    debug_assert!(!ra.is_zero() && !rb.is_zero());
    let step = pow_p(p, n);
    let pass = (&lhs + &window - &rhs) % step == BigUint::zero();
    Ok(CoherenceCert {
        n,
        status: if pass { CoherenceStatus::Pass } else { CoherenceStatus::Fail },
        modulus_exp: n + 2,
        lhs,
        rhs,
    })
}

/// One exact or modular factor of an integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorEntry {
    pub base: BigUint,
    pub exp: u32,
    /// false marks an unfactored composite cofactor
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowValue {
    Exact(BigInt),
    Modular { residue: BigUint, modulus: BigUint },
}

/// One level of a tower table.
#[derive(Debug, Clone)]
pub struct TowerRow {
    pub n: u32,
    pub value: RowValue,
    pub vp: u32,
    pub vl: BTreeMap<u64, u32>,
    pub factors: Option<Vec<FactorEntry>>,
}

#[derive(Debug, Clone)]
pub struct TowerOptions {
    /// compute rows exactly through this level (subject to size guards)
    pub exact_max: u32,
    /// modulus exponent for rows beyond the exact range
    pub modulus_exp: u32,
    pub factorize: bool,
    pub l_list: Vec<u64>,
    pub seed: u64,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            exact_max: 6,
            modulus_exp: 64,
            factorize: true,
            l_list: vec![],
            seed: DEFAULT_FACTOR_SEED,
        }
    }
}

/// The table of r_{p^n}(f) for n = 1..=n_max with valuations and (for exact
/// rows) factorizations.
pub fn tower_table(
    f: &IntPoly,
    p: u64,
    n_max: u32,
    options: &TowerOptions,
) -> Result<Vec<TowerRow>, Error> {
    if f.is_zero() {
        return Err(Error::Poly(intpoly::Error::ZeroPolynomial));
    }
    assert!(n_max <= 64, "tower tables are capped at level 64");
    let deg = f.degree().unwrap() as u64;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let exact_ok = n <= options.exact_max
            && p.checked_pow(n).is_some_and(|pn| pn.saturating_mul(deg.max(1)) <= 100_000);
        if exact_ok {
            let r = cyclic_resultant(f, p.pow(n))?;
            let vp = if r.is_zero() { 0 } else { valuation_int(&r, p) };
            let mut vl = BTreeMap::new();
            for &l in &options.l_list {
                vl.insert(l, if r.is_zero() { 0 } else { valuation_int(&r, l) });
            }
            let factors = if options.factorize && !r.is_zero() {
                Some(factor_integer(&r.magnitude().clone(), options.seed))
            } else {
                None
            };
            rows.push(TowerRow { n, value: RowValue::Exact(r), vp, vl, factors });
        } else {
            let m = pow_p(p, options.modulus_exp);
            let residue = cyclic_resultant_mod(f, p, n, &m)?;
            let vp = if residue.is_zero() {
                tower_vp(f, p, n).map(|(v, _, _)| v).unwrap_or(options.modulus_exp)
            } else {
                valuation_uint(&residue, p)
            };
            let mut vl = BTreeMap::new();
            for &l in &options.l_list {
                vl.insert(l, l_valuation_of_level(f, p, l, n)?);
            }
            rows.push(TowerRow {
                n,
                value: RowValue::Modular { residue, modulus: m },
                vp,
                vl,
                factors: None,
            });
        }
    }
    Ok(rows)
}

/// Full limit analysis for one polynomial and prime.
#[derive(Debug, Clone)]
pub struct LimitReport {
    pub p: u64,
    pub precision: u32,
    pub mu: u32,
    pub lambda: usize,
    pub nu: i64,
    pub total_limit: PadicScalar,
    /// None when the tower vanishes identically
    pub nonp_limit: Option<PadicScalar>,
    pub is_zero: bool,
    /// parity carrier of (-1)^{p deg f + s}
    pub sign_exponent: u32,
    pub oracle_agreement_level: u32,
}

pub fn limit_report(f: &IntPoly, p: u64, prec: u32) -> Result<LimitReport, Error> {
    check_precision(prec)?;
    if f.is_zero() {
        return Err(Error::Poly(intpoly::Error::ZeroPolynomial));
    }
    let (mu, g) = strip_p_content(f, p);
    let sd = slope_data(&g, p)?;
    let (total_limit, level) = limit_total_checked(f, p, prec)?;
    let vanishing = zero_tower_level(f, p).is_some();
    let (nonp_limit, nu) = if vanishing {
        (None, 0)
    } else {
        let (v, nu) = limit_nonp_with_nu(f, p, prec)?;
        (Some(v), nu)
    };
    let is_zero = total_limit.is_exact_zero();
    debug_assert_eq!(is_zero, f.eval_i64(1).mod_floor(&BigInt::from(p)).is_zero());
    Ok(LimitReport {
        p,
        precision: prec,
        mu,
        lambda: sd.lambda,
        nu,
        total_limit,
        nonp_limit,
        is_zero,
        sign_exponent: ((p as usize * f.degree().unwrap() + sd.s) % 2) as u32,
        oracle_agreement_level: level,
    })
}

impl LimitReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.p,
            "n": self.precision,
            "limitDigits": self.total_limit.digits(),
            "nonpDigits": self.nonp_limit.as_ref().map(|v| v.digits()),
            "lambda": self.lambda,
            "mu": self.mu,
            "nu": self.nu,
            "isZero": self.is_zero,
            "oracleLevel": self.oracle_agreement_level,
        })
    }
}

impl Serialize for LimitReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl TowerRow {
    pub fn to_json(&self) -> serde_json::Value {
        let value = match &self.value {
            RowValue::Exact(v) => json!(v.to_string()),
            RowValue::Modular { residue, modulus } => json!({
                "residue": residue.to_string(),
                "modulus": modulus.to_string(),
            }),
        };
        let vl: BTreeMap<String, u32> =
            self.vl.iter().map(|(l, v)| (l.to_string(), *v)).collect();
        let factors = self.factors.as_ref().map(|fs| {
            fs.iter()
                .map(|e| json!({"base": e.base.to_string(), "exp": e.exp, "certified": e.certified}))
                .collect::<Vec<_>>()
        });
        json!({
            "n": self.n,
            "value": value,
            "vp": self.vp,
            "vl": vl,
            "factors": factors,
        })
    }

    /// "2^2 3^2" style rendering of the factor list (exponent 1 omitted,
    /// composite cofactors wrapped in parentheses).
    pub fn factor_string(&self) -> Option<String> {
        let fs = self.factors.as_ref()?;
        let mut parts = Vec::new();
        for e in fs {
            let core = if e.exp == 1 {
                e.base.to_string()
            } else {
                format!("{}^{}", e.base, e.exp)
            };
            parts.push(if e.certified { core } else { format!("({core})") });
        }
        if parts.is_empty() {
            parts.push("1".to_string());
        }
        Some(parts.join(" "))
    }
}

impl Serialize for TowerRow {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// Factorization by trial division to 10^6 followed by seeded Brent rho;
/// anything left unfactored is flagged uncertified.
pub fn factor_integer(x: &BigUint, seed: u64) -> Vec<FactorEntry> {
    let mut out: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut cofactors: Vec<BigUint> = Vec::new();
    let mut n = x.clone();
    if n.is_zero() || n.is_one() {
        return vec![];
    }
    let mut d = 2u64;
    while d <= 1_000_000 {
        let db = BigUint::from(d);
        if &db * &db > n {
            break;
        }
        while (&n % &db).is_zero() {
            n /= &db;
            *out.entry(db.clone()).or_insert(0) += 1;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !n.is_one() {
        let mut stack = vec![n];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut budget = 64u32;
        while let Some(v) = stack.pop() {
            if v.is_one() {
                continue;
            }
            if is_probable_prime(&v) {
                *out.entry(v).or_insert(0) += 1;
                continue;
            }
            if budget == 0 {
                cofactors.push(v);
                continue;
            }
            budget -= 1;
            match brent_rho(&v, &mut rng) {
                Some(f) => {
                    let q = &v / &f;
                    stack.push(f);
                    stack.push(q);
                }
                None => cofactors.push(v),
            }
        }
    }
    let mut entries: Vec<FactorEntry> = out
        .into_iter()
        .map(|(base, exp)| FactorEntry { base, exp, certified: true })
        .collect();
    cofactors.sort();
    for c in cofactors {
        entries.push(FactorEntry { base: c, exp: 1, certified: false });
    }
    entries
}

/// Miller-Rabin with the first twelve prime bases (deterministic far past
/// any tower entry this crate factors exactly).
fn is_probable_prime(n: &BigUint) -> bool {
    let small: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &small {
        let qb = BigUint::from(q);
        if n == &qb {
            return true;
        }
        if (n % &qb).is_zero() {
            return false;
        }
    }
    if n < &BigUint::from(2u32) {
        return false;
    }
    let n1 = n - BigUint::one();
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for &a in &small {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// One Brent-style rho attempt per call; None on a cycle without a factor.
fn brent_rho(n: &BigUint, rng: &mut ChaCha8Rng) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    for _ in 0..16 {
        let c = BigUint::from(rng.gen_range(1u64..1_000_000));
        let mut x = BigUint::from(rng.gen_range(2u64..1_000_000)) % n;
        let mut y = x.clone();
        let mut d = BigUint::one();
        let mut count = 0u64;
        while d.is_one() && count < 1_000_000 {
            x = (&x * &x + &c) % n;
            y = (&y * &y + &c) % n;
            y = (&y * &y + &c) % n;
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
            count += 1;
        }
        if !d.is_one() && &d != n {
            return Some(d);
        }
    }
    None
}
