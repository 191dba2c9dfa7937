//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padres::ffields;
use padres::intpoly::{
    cyclic_resultant, cyclic_resultant_mod, cyclotomic, parse_poly, resultant,
    res_cyclotomic_pair, IntPoly,
};
use padres::knots;
use padres::limits::{
    check_norm_coherence, iwasawa_invariants, limit_total, limit_total_checked,
    tower_table, CoherenceStatus, TowerOptions,
};
use padres::padic::PadicScalar;
use padres::weber;

fn criterion(id: u32, name: &str, run: impl FnOnce() -> Result<(), String>) {
    match run() {
        Ok(()) => println!("criterion {id}: PASS - {name}"),
        Err(e) => {
            println!("criterion {id}: FAIL - {name}: {e}");
            panic!("criterion {id} failed: {e}");
        }
    }
}

fn pow_big(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

#[test]
fn criterion_1_trefoil_towers() {
    criterion(1, "trefoil towers 3 / 4 / 1, exact and modular", || {
        let f = parse_poly("t^2-t+1").map_err(|e| e.to_string())?;
        let expected = |p: u64| -> i64 {
            match p {
                2 => 3,
                3 => 4,
                _ => 1,
            }
        };
        for p in [2u64, 3, 5, 7, 11] {
            let want = BigInt::from(expected(p));
            for n in 1..=3u32 {
                if p.pow(n) * 2 <= 100_000 {
                    let r = cyclic_resultant(&f, p.pow(n)).map_err(|e| e.to_string())?;
                    if r != want {
                        return Err(format!("exact p={p} n={n}: {r} != {want}"));
                    }
                }
            }
            let m = pow_big(p, 24);
            for n in 1..=10u32 {
                let r = cyclic_resultant_mod(&f, p, n, &m).map_err(|e| e.to_string())?;
                if BigInt::from(r) != want.mod_floor(&BigInt::from(m.clone())) {
                    return Err(format!("modular p={p} n={n}"));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_2_seven_adic_digits() {
    criterion(2, "seven-adic expansion of the 3t^2-5t+3 limit and level-6 value", || {
        let f = parse_poly("3t^2-5t+3").map_err(|e| e.to_string())?;
        let lim = limit_total(&f, 7, 9).map_err(|e| e.to_string())?;
        let want = "1 + 4*7 + 7^2 + 4*7^3 + 6*7^5 + 6*7^6 + 6*7^7 + 7^8 + O(7^9)";
        if lim.digits() != want {
            return Err(format!("limit digits: {}", lim.digits()));
        }
        // the level-6 tower value agrees through the 7^6 digit and then
        // diverges: ... + 2*7^7 + 2*7^8 against the limit's 6*7^7 + 7^8
        let m9 = pow_big(7, 9);
        let level6 = cyclic_resultant_mod(&f, 7, 6, &m9).map_err(|e| e.to_string())?;
        let level6_digits = PadicScalar::from_biguint(7, 9, &level6).digits();
        let want6 = "1 + 4*7 + 7^2 + 4*7^3 + 6*7^5 + 6*7^6 + 2*7^7 + 2*7^8 + O(7^9)";
        if level6_digits != want6 {
            return Err(format!("level-6 digits: {level6_digits}"));
        }
        let m7 = pow_big(7, 7);
        if &level6 % &m7 != lim.value() % &m7 {
            return Err("level-6 value disagrees below 7^7".into());
        }
        let m8 = pow_big(7, 8);
        if &level6 % &m8 == lim.value() % &m8 {
            return Err("level-6 value should diverge at the 7^7 digit".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_3_twist_classification_grid() {
    criterion(3, "twist-knot limit classification grid |m| <= 30, p <= 13", || {
        let v = knots::twist_limit_classification(3, 2).map_err(|e| e.to_string())?;
        if v.value != Some(3) {
            return Err(format!("m=3 p=2: {:?}", v.value));
        }
        let v = knots::twist_limit_classification(3, 3).map_err(|e| e.to_string())?;
        if v.value != Some(1) {
            return Err(format!("m=3 p=3: {:?}", v.value));
        }
        let v = knots::twist_limit_classification(3, 5).map_err(|e| e.to_string())?;
        if v.in_z {
            return Err("m=3 p=5 should not lie in Z".into());
        }
        // every integer verdict is cross-checked against limit_total inside
        // the classification; any mismatch surfaces as an error here
        for m in -30i64..=30 {
            if m == 0 {
                continue;
            }
            for p in [2u64, 3, 5, 7, 11, 13] {
                knots::twist_limit_classification(m, p)
                    .map_err(|e| format!("m={m} p={p}: {e}"))?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_4_function_field_table() {
    criterion(4, "t^2+5 class-number tower rows, nu values, and the F_5 limit", || {
        let f = parse_poly("t^2+5").map_err(|e| e.to_string())?;
        let opts = TowerOptions::default();
        let rows2 = tower_table(&f, 2, 3, &opts).map_err(|e| e.to_string())?;
        let got2: Vec<String> = rows2.iter().filter_map(|r| r.factor_string()).collect();
        if got2.join(" | ") != "2^2 3^2 | 2^6 3^2 | 2^8 3^2 13^2" {
            return Err(format!("p=2 rows: {}", got2.join(" | ")));
        }
        let rows3 = tower_table(&f, 3, 3, &opts).map_err(|e| e.to_string())?;
        let got3: Vec<String> = rows3.iter().filter_map(|r| r.factor_string()).collect();
        if got3.join(" | ") != "2 3^2 7 | 2 3^3 7 5167 | 2 3^4 7 163 487 5167 16018507" {
            return Err(format!("p=3 rows: {}", got3.join(" | ")));
        }
        let (_, _, nu2) = iwasawa_invariants(&f, 2).map_err(|e| e.to_string())?;
        if nu2 != 2 {
            return Err(format!("nu at p=2: {nu2}"));
        }
        let (_, _, nu3) = iwasawa_invariants(&f, 3).map_err(|e| e.to_string())?;
        if nu3 != 1 {
            return Err(format!("nu at p=3: {nu3}"));
        }
        let lim5 = limit_total(&f, 5, 12).map_err(|e| e.to_string())?;
        if !(lim5.value() % pow_big(5, 12)).is_one() {
            return Err("lim h(k_{5^n}) != 1".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_5_property_suite() {
    criterion(5, "property suite on 500 random polynomials", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA1EC5);
        for case in 0..500usize {
            let p = [2u64, 3, 5, 7, 13][case % 5];
            let d = rng.gen_range(1..=6);
            let mut coeffs: Vec<i64> = (0..=d).map(|_| rng.gen_range(-50..=50)).collect();
            if coeffs[d] == 0 {
                coeffs[d] = 1;
            }
            let f = IntPoly::from_i64(&coeffs);
            // (a) the explicit formula agrees with r_{p^6} mod p^7; the
            // internal oracle loop re-verifies every nonzero value
            let (v, _) = limit_total_checked(&f, p, 10).map_err(|e| e.to_string())?;
            if !v.is_exact_zero() {
                let m = pow_big(p, 7);
                let oracle = cyclic_resultant_mod(&f, p, 6, &m).map_err(|e| e.to_string())?;
                if v.value() % &m != oracle {
                    return Err(format!("(a) p={p} f={f}"));
                }
            }
            // (b) the limit vanishes exactly when p | f(1)
            let divides = f.eval_i64(1).mod_floor(&BigInt::from(p)).is_zero();
            if v.is_exact_zero() != divides {
                return Err(format!("(b) p={p} f={f}"));
            }
            // (c) norm coherence on the first levels
            for n in 1..=3u32 {
                let cert = check_norm_coherence(&f, p, n).map_err(|e| e.to_string())?;
                if cert.status == CoherenceStatus::Fail {
                    return Err(format!("(c) p={p} n={n} f={f}"));
                }
            }
            // (d) the valuation law v_p = lambda n + mu p^n + nu verifies
            // over a window (checked internally by iwasawa_invariants)
            if case % 5 == 0 {
                iwasawa_invariants(&f, p).map_err(|e| format!("(d) p={p} f={f}: {e}"))?;
            }
            // (e) Graeffe chain = circulant determinant = cyclotomic product
            if case % 25 == 0 {
                let m = BigUint::one() << 128;
                for n in 1..=24u64 {
                    let exact = cyclic_resultant(&f, n).map_err(|e| e.to_string())?;
                    let mut prod = BigInt::one();
                    for dd in 1..=n {
                        if n % dd == 0 {
                            prod *= resultant(&cyclotomic(dd).unwrap(), &f)
                                .map_err(|e| e.to_string())?;
                        }
                    }
                    if exact != prod {
                        return Err(format!("(e) circulant vs product, n={n} f={f}"));
                    }
                    if n.is_power_of_two() {
                        let k = n.trailing_zeros();
                        let chain =
                            cyclic_resultant_mod(&f, 2, k, &m).map_err(|e| e.to_string())?;
                        if BigInt::from(chain) != exact.mod_floor(&BigInt::from(m.clone())) {
                            return Err(format!("(e) graeffe chain, n={n} f={f}"));
                        }
                    }
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_6_apostol_grid() {
    criterion(6, "Apostol closed form matches resultants for m <= 60", || {
        for m in 2u64..=60 {
            for n in 2..m {
                if m.gcd(&n) <= 1 {
                    continue;
                }
                let closed = res_cyclotomic_pair(m, n).map_err(|e| e.to_string())?;
                let direct = resultant(&cyclotomic(m).unwrap(), &cyclotomic(n).unwrap())
                    .map_err(|e| e.to_string())?;
                if closed != direct.abs() {
                    return Err(format!("m={m} n={n}: {closed} vs {direct}"));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_7_torus_closed_form() {
    criterion(7, "torus closed form b^(p^min(n,r)-1) equals direct resultants", || {
        for (a, b) in [(2u64, 3u64), (2, 5), (3, 4), (9, 2), (2, 7)] {
            let delta = knots::alexander_torus(a, b).map_err(|e| e.to_string())?;
            for p in [2u64, 3, 5, 7] {
                if b % p == 0 {
                    // outside the proposition's hypothesis
                    if knots::torus_tower_closed_form(a, b, p, 1).is_ok() {
                        return Err(format!("p={p} | b={b} must be rejected"));
                    }
                    continue;
                }
                for n in 1..=2u32 {
                    let closed =
                        knots::torus_tower_closed_form(a, b, p, n).map_err(|e| e.to_string())?;
                    let direct = knots::branched_cover_order(&delta, p.pow(n))
                        .map_err(|e| e.to_string())?;
                    if closed != direct {
                        return Err(format!("(a,b)=({a},{b}) p={p} n={n}: {closed} vs {direct}"));
                    }
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_8_weber_certificates() {
    criterion(8, "Weber unit certificates for levels up to 6", || {
        for n in 1..=6u32 {
            let d = weber::epsilon_and_pell(n).map_err(|e| e.to_string())?;
            if !d.pell_ok {
                return Err(format!("Pell identity failed at n={n}"));
            }
            let norm = weber::rel_norm(&d.epsilon).map_err(|e| e.to_string())?;
            if norm != weber::WeberElem::one(n - 1) {
                return Err(format!("rel_norm(eps) != 1 at n={n}"));
            }
            let cf = weber::cf_identity_check(n).map_err(|e| e.to_string())?;
            if !cf.exact_ok || !cf.float_ok {
                return Err(format!("CF identity failed at n={n}"));
            }
            weber::cyclo_unit_relation(n).map_err(|e| format!("cyclo at n={n}: {e}"))?;
        }
        let eps1 = weber::epsilon_unit(1).map_err(|e| e.to_string())?;
        let rep = weber::trace_conjecture_eval(1, &[eps1]).map_err(|e| e.to_string())?;
        if rep.bound != BigInt::from(34) || rep.entries[0].trace != BigInt::from(34) {
            return Err(format!(
                "Tr(eps_1^2) = {} against bound {}",
                rep.entries[0].trace, rep.bound
            ));
        }
        Ok(())
    });
}

#[test]
fn criterion_9_supersingular_criterion() {
    criterion(9, "supersingular towers and the CM cross-check", || {
        for q in [5u64, 7, 11, 13] {
            let curve = ffields::CurveSpec::trace(q, 0).map_err(|e| e.to_string())?;
            let verdict =
                ffields::supersingular_limit_check(&curve, None).map_err(|e| e.to_string())?;
            if !verdict.limit_is_one {
                return Err(format!("q={q}: a1=0 tower must have limit 1"));
            }
        }
        // 20 (D, q) pairs: both routes must agree (the check errors out on
        // any disagreement)
        let mut pairs = 0;
        for d in [-3i64, -4, -7, -8, -11] {
            for q in [5u64, 7, 11, 13] {
                let a1 = if ffields::legendre_symbol(d, q) != 1 { 0 } else { 1 };
                let curve = ffields::CurveSpec::trace(q, a1).map_err(|e| e.to_string())?;
                ffields::supersingular_limit_check(&curve, Some(d))
                    .map_err(|e| format!("D={d} q={q}: {e}"))?;
                pairs += 1;
            }
        }
        if pairs != 20 {
            return Err(format!("expected 20 CM pairs, ran {pairs}"));
        }
        Ok(())
    });
}
