use std::collections::BTreeSet;

use lucasv::theorem::index_class_to_p_class;
use lucasv::{
    check_theorem, coverage, discover, find_period, v_exact, v_mod, w_exact, w_mod, ComboParams,
    DiscoverOptions, FamilySpec, SeqParams,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

fn nonzero(bound: i64) -> impl Strategy<Value = i64> {
    (-bound..=bound).prop_filter("nonzero", |x| *x != 0)
}

fn params(bound: i64) -> impl Strategy<Value = SeqParams> {
    (nonzero(bound), nonzero(bound)).prop_map(|(p, q)| SeqParams::new(p, q).unwrap())
}

/// V_n mod m by stepping the recurrence, independent of the doubling code.
fn step_mod(params: SeqParams, n: u64, m: u64) -> u64 {
    let m = m as i128;
    let (p, q) = (params.p() as i128, params.q() as i128);
    let (mut a, mut b) = (2i128.rem_euclid(m), p.rem_euclid(m));
    for _ in 0..n {
        (a, b) = (b, (p * b - q * a).rem_euclid(m));
    }
    a as u64
}

fn step_exact(params: SeqParams, upto: usize) -> Vec<BigInt> {
    let (p, q) = (BigInt::from(params.p()), BigInt::from(params.q()));
    let mut out = vec![BigInt::from(2), p.clone()];
    while out.len() <= upto {
        let n = out.len();
        let next = &p * &out[n - 1] - &q * &out[n - 2];
        out.push(next);
    }
    out.truncate(upto + 1);
    out
}

fn residue(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    u64::try_from(r).unwrap()
}

/// `n` with a uniformly random bit length in 0..=20.
fn log_uniform_index() -> impl Strategy<Value = u64> {
    (0u32..=20).prop_flat_map(|bits| 0u64..(1u64 << bits).max(1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_values_satisfy_recurrence(params in params(10)) {
        let v: Vec<BigInt> = (0..=1000).map(|n| v_exact(params, n)).collect();
        prop_assert_eq!(&v[0], &BigInt::from(2));
        prop_assert_eq!(&v[1], &BigInt::from(params.p()));
        for n in 2..=1000 {
            prop_assert_eq!(&v[n], &(params.p() * &v[n - 1] - params.q() * &v[n - 2]));
        }
    }

    #[test]
    fn combinations_satisfy_recurrence(params in params(10), t0 in nonzero(20), t1 in nonzero(20)) {
        let combo = ComboParams::new(params, t0, t1).unwrap();
        let w: Vec<BigInt> = (1..=500).map(|n| w_exact(combo, n).unwrap()).collect();
        // w[i] = W_{i+1}
        for n in 3..=500usize {
            let i = n - 1;
            prop_assert_eq!(&w[i], &(params.p() * &w[i - 1] - params.q() * &w[i - 2]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fast_doubling_matches_stepping(
        params in params(10),
        n in log_uniform_index(),
        m in 2u64..=1_000_000,
    ) {
        prop_assert_eq!(v_mod(params, n, m).unwrap(), step_mod(params, n, m));
    }

    #[test]
    fn doubling_identity(params in params(10), n in 0u64..100_000, m in 2u64..=1_000_000) {
        let vn = v_mod(params, n, m).unwrap() as u128;
        let qn = BigInt::from(params.q()).modpow(&BigInt::from(n), &BigInt::from(m));
        let qn = residue(&qn, m) as u128;
        let m128 = m as u128;
        let expect = (vn * vn % m128 + 2 * (m128 - qn)) % m128;
        prop_assert_eq!(v_mod(params, 2 * n, m).unwrap() as u128, expect);
    }

    #[test]
    fn w_mod_matches_exact(
        params in params(10),
        t0 in nonzero(50),
        t1 in nonzero(50),
        n in 1u64..400,
        m in 2u64..=100_000,
    ) {
        let combo = ComboParams::new(params, t0, t1).unwrap();
        prop_assert_eq!(w_mod(combo, n, m).unwrap(), residue(&w_exact(combo, n).unwrap(), m));
    }

    #[test]
    fn numerator_mod_is_d_times_value(p in 1u64..=200, m in 2u64..=10_000, use_t in any::<bool>()) {
        let fam = if use_t { FamilySpec::t() } else { FamilySpec::y() };
        let scaled = fam.value(p).unwrap() * fam.d();
        prop_assert_eq!(fam.numerator_mod(p, m).unwrap(), residue(&scaled, m));
    }

    #[test]
    fn period_record_matches_v_mod(params in params(10), m in 2u64..=400) {
        prop_assume!(num_integer::gcd(params.q().unsigned_abs(), m) == 1);
        let rec = find_period(params, m).unwrap();
        let period = rec.period();
        for n in 0..=4 * period {
            prop_assert_eq!(rec.residue_at(n), v_mod(params, n, m).unwrap());
        }
        // second strategy: first n > 0 where the pair state returns to (V_0, V_1)
        let start = lucasv::lucas::v_pair_mod(params, 0, m).unwrap();
        let first_return = (1..).find(|&n| lucasv::lucas::v_pair_mod(params, n, m).unwrap() == start);
        prop_assert_eq!(first_return, Some(period));
    }
}

#[test]
fn naive_exact_values_agree_for_small_indices() {
    for (p, q) in [(3, 1), (4, 1), (-7, 3), (1, -1), (10, -10)] {
        let params = SeqParams::new(p, q).unwrap();
        let naive = step_exact(params, 300);
        for (n, v) in naive.iter().enumerate() {
            assert_eq!(&v_exact(params, n as u64), v);
            for m in [2, 9, 97, 1_000_003] {
                assert_eq!(v_mod(params, n as u64, m).unwrap(), residue(v, m));
            }
        }
    }
}

#[test]
fn integrality_of_builtin_families() {
    for fam in [FamilySpec::t(), FamilySpec::y()] {
        for p in 1..=2000 {
            assert_eq!(
                fam.numerator_mod(p, fam.d()).unwrap(),
                0,
                "{} p={p}",
                fam.name()
            );
        }
        for p in 1..=300 {
            assert!(fam
                .numerator(p)
                .unwrap()
                .is_multiple_of(&BigInt::from(fam.d())));
        }
    }
}

#[test]
fn known_divisors_divide_values() {
    for fam in [FamilySpec::t(), FamilySpec::y()] {
        for p in 1..=5000u64 {
            let Some(q) = fam.known_divisor(p) else {
                continue;
            };
            if p <= 800 {
                assert!(
                    fam.value(p).unwrap().is_multiple_of(&BigInt::from(q)),
                    "p={p} q={q}"
                );
            } else {
                assert_eq!(fam.numerator_mod(p, q * fam.d()).unwrap(), 0, "p={p} q={q}");
            }
        }
    }
}

#[test]
fn t_grows() {
    let t = FamilySpec::t();
    let values: Vec<BigInt> = (1..=300).map(|p| t.value(p).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn digit_count_grows_linearly() {
    let t = FamilySpec::t();
    let slope_expect = 2.0 * ((3.0 + 5f64.sqrt()) / 2.0).log10();
    let digits = |p| t.value(p).unwrap().to_string().len() as f64;
    for (a, b) in [(50, 150), (100, 400), (300, 809)] {
        let slope = (digits(b) - digits(a)) / (b - a) as f64;
        assert!(
            (slope / slope_expect - 1.0).abs() < 0.05,
            "slope {slope} on [{a}, {b}]"
        );
    }
}

#[test]
fn periods_of_known_moduli_are_minimal() {
    for (p, m, expect) in [
        (4, 9, 6),
        (4, 13, 12),
        (3, 25, 10),
        (3, 11, 5),
        (3, 31, 15),
        (3, 131, 65),
        (3, 71, 35),
    ] {
        let params = SeqParams::new(p, 1).unwrap();
        let rec = find_period(params, m).unwrap();
        assert_eq!(rec.period(), expect);
        for d in (1..expect).filter(|d| expect % d == 0) {
            let closes = v_mod(params, d, m).unwrap() == 2 % m
                && v_mod(params, d + 1, m).unwrap() == p as u64 % m;
            assert!(!closes, "m={m}: divisor {d} closes the cycle");
        }
    }
}

#[test]
fn discovered_theorems_are_sound() {
    for fam in [FamilySpec::t(), FamilySpec::y()] {
        let found = discover(&fam, 200, DiscoverOptions::default()).unwrap();
        assert!(!found.theorems.is_empty());
        for thm in &found.theorems {
            assert!(check_theorem(&fam, thm).is_valid(), "{thm}");
            for p in thm.members().take(200) {
                if p <= 600 {
                    assert!(
                        fam.value(p).unwrap().is_multiple_of(&BigInt::from(thm.q)),
                        "{thm} p={p}"
                    );
                } else {
                    assert_eq!(
                        fam.numerator_mod(p, thm.q * fam.d()).unwrap(),
                        0,
                        "{thm} p={p}"
                    );
                }
            }
            // the class pins k*p mod π to the stored index residue
            for p in thm.members().take_while(|&p| p <= 10_000) {
                assert_eq!(fam.k() * p % thm.proof.period, thm.proof.index_residue);
            }
        }
    }
}

#[test]
fn discovery_is_complete_against_brute_force() {
    // T(p) exactly, by stepping V with P=3, Q=1
    let v = step_exact(SeqParams::new(3, 1).unwrap(), 4000);
    let t: Vec<BigInt> = (1..=2000usize)
        .map(|p| (4 * &v[2 * p] - 2 * &v[2 * p - 1] + 3) / 5)
        .collect();
    let fam = FamilySpec::t();
    let found = discover(&fam, 31, DiscoverOptions::default()).unwrap();
    for q in lucasv::arith::primes_up_to(31) {
        let brute: BTreeSet<u64> = (1..=2000u64)
            .filter(|&p| (&t[p as usize - 1] % q).is_zero())
            .collect();
        let predicted: BTreeSet<u64> = (1..=2000u64)
            .filter(|&p| found.theorems.iter().any(|th| th.q == q && th.contains(p)))
            .collect();
        assert_eq!(brute, predicted, "q={q}");
        // cluster the brute-force hits by the smallest period of the indicator
        let indicator: Vec<bool> = (1..=2000u64).map(|p| brute.contains(&p)).collect();
        if let Some(period) =
            (1..=200).find(|&d| (d..2000).all(|i| indicator[i] == indicator[i - d]))
        {
            let classes: BTreeSet<u64> = brute.iter().map(|p| p % period as u64).collect();
            for th in found.theorems.iter().filter(|th| th.q == q) {
                assert_eq!(period as u64 % th.class_modulus, 0, "q={q}");
                assert!(classes
                    .iter()
                    .any(|r| r % th.class_modulus == th.class_residue));
            }
        } else {
            assert!(brute.is_empty(), "q={q} has no short period");
        }
    }
}

#[test]
fn class_translation_solves_the_congruence() {
    for k in 1..=6u64 {
        for period in 1..=60u64 {
            for s in 0..period {
                let brute: Vec<u64> = (0..period).filter(|p| k * p % period == s).collect();
                match index_class_to_p_class(k, period, s) {
                    None => assert!(brute.is_empty()),
                    Some((r, m)) => {
                        let from_class: Vec<u64> = (0..period).filter(|p| p % m == r).collect();
                        assert_eq!(brute, from_class, "k={k} π={period} s={s}");
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coverage_is_monotone(mask in any::<u64>(), extra in any::<u64>(), modulus in prop::sample::select(vec![6u64, 30, 60, 210, 390, 2310])) {
        let fam = FamilySpec::t();
        let all = discover(&fam, 150, DiscoverOptions::default()).unwrap().theorems;
        let small: Vec<_> = all.iter().enumerate().filter(|(i, _)| mask >> (i % 64) & 1 == 1).map(|(_, t)| t.clone()).collect();
        let large: Vec<_> = all.iter().enumerate().filter(|(i, _)| (mask | extra) >> (i % 64) & 1 == 1).map(|(_, t)| t.clone()).collect();
        let a = coverage(&fam, &small, modulus).unwrap();
        let b = coverage(&fam, &large, modulus).unwrap();
        for r in a.covered.keys() {
            prop_assert!(b.covered.contains_key(r));
        }
        let total = a.covered.len() + a.uncovered.len();
        prop_assert_eq!(total as u64, (0..modulus).filter(|&r| num_integer::gcd(r, modulus) == 1).count() as u64);
    }
}

#[test]
fn negative_values_are_handled() {
    // a family whose values change sign
    let base = SeqParams::new(-3, 2).unwrap();
    let combo = ComboParams::new(base, 1, -1).unwrap();
    let fam = FamilySpec::new("N", combo, 0, 1, 1).unwrap();
    for p in 1..50 {
        let v = fam.value(p).unwrap();
        for m in [7, 10, 1_000_000_007] {
            assert_eq!(fam.numerator_mod(p, m).unwrap(), residue(&v, m));
        }
    }
}
