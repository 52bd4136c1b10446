//! Primality classification.
//!
//! Trial division by the primes below [`TRIAL_BOUND`] proves primality of
//! anything below `TRIAL_BOUND^2`. Other 64-bit inputs get a deterministic
//! Miller-Rabin test. Larger inputs get the Baillie-PSW combination: a
//! strong probable-prime test to base 2 followed by a strong Lucas test
//! with Selfridge's parameter choice.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{is_prime_u64, primes_up_to};
use crate::error::{Error, Result};

pub const TRIAL_BOUND: u64 = 1000;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_BOUND - 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `n = 1`, not prime by convention.
    Unit,
    CompositeWithFactor(BigUint),
    CompositeByTest(String),
    ProbablePrime,
    ProvenPrimeSmall,
}

impl Verdict {
    pub fn is_prime(&self) -> bool {
        matches!(self, Verdict::ProbablePrime | Verdict::ProvenPrimeSmall)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Unit => "composite-by-convention",
            Verdict::CompositeWithFactor(_) => "composite-with-factor",
            Verdict::CompositeByTest(_) => "composite-by-test",
            Verdict::ProbablePrime => "probable-prime",
            Verdict::ProvenPrimeSmall => "proven-prime-small",
        }
    }

    pub fn witness(&self) -> Option<String> {
        match self {
            Verdict::Unit => Some("unit".into()),
            Verdict::CompositeWithFactor(f) => Some(f.to_string()),
            Verdict::CompositeByTest(t) => Some(t.clone()),
            Verdict::ProbablePrime => Some("bpsw".into()),
            Verdict::ProvenPrimeSmall => None,
        }
    }

    /// Parses a `(label, witness)` pair as written by [`Verdict::label`]
    /// and [`Verdict::witness`].
    pub fn from_parts(label: &str, witness: Option<&str>) -> Option<Verdict> {
        Some(match (label, witness) {
            ("composite-by-convention", _) => Verdict::Unit,
            ("composite-with-factor", Some(w)) => Verdict::CompositeWithFactor(w.parse().ok()?),
            ("composite-by-test", Some(w)) => Verdict::CompositeByTest(w.to_string()),
            ("probable-prime", _) => Verdict::ProbablePrime,
            ("proven-prime-small", _) => Verdict::ProvenPrimeSmall,
            _ => return None,
        })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())?;
        if let Some(w) = self.witness() {
            write!(f, " witness={w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimalityVerdict {
    pub n: BigUint,
    pub verdict: Verdict,
}

pub fn classify(n: &BigUint) -> Result<PrimalityVerdict> {
    let verdict = match n.to_u64() {
        Some(0) => return Err(Error::Precondition("cannot classify 0".into())),
        Some(small) => classify_u64(small),
        None => classify_big(n),
    };
    Ok(PrimalityVerdict {
        n: n.clone(),
        verdict,
    })
}

fn trial_factor_u64(n: u64) -> Option<u64> {
    small_primes()
        .iter()
        .take_while(|&&p| p * p <= n)
        .find(|&&p| n.is_multiple_of(p))
        .copied()
}

fn classify_u64(n: u64) -> Verdict {
    if n == 1 {
        return Verdict::Unit;
    }
    if let Some(f) = trial_factor_u64(n) {
        return if f == n {
            Verdict::ProvenPrimeSmall
        } else {
            Verdict::CompositeWithFactor(f.into())
        };
    }
    if n < TRIAL_BOUND * TRIAL_BOUND || is_prime_u64(n) {
        Verdict::ProvenPrimeSmall
    } else {
        Verdict::CompositeByTest("miller-rabin".into())
    }
}

fn classify_big(n: &BigUint) -> Verdict {
    for &p in small_primes() {
        if (n % p).is_zero() {
            return Verdict::CompositeWithFactor(p.into());
        }
    }
    if !strong_probable_prime(n, &BigUint::from(2u32)) {
        return Verdict::CompositeByTest("strong-fermat-base-2".into());
    }
    match strong_lucas_probable_prime(n) {
        LucasOutcome::ProbablePrime => Verdict::ProbablePrime,
        LucasOutcome::Square => Verdict::CompositeWithFactor(n.sqrt()),
        LucasOutcome::Factor(f) => Verdict::CompositeWithFactor(f),
        LucasOutcome::Composite => Verdict::CompositeByTest("strong-lucas".into()),
    }
}

/// Strong probable-prime test of odd `n > 2` to base `a`.
pub fn strong_probable_prime(n: &BigUint, a: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = a.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let mut n = n.clone();
    let modulus = BigInt::from_biguint(Sign::Plus, n.clone());
    let mut a = a.mod_floor(&modulus).magnitude().clone();
    let mut result = 1;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n_mod_8 = (&n % 8u32).to_u32().unwrap_or(0);
        if tz % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32) == BigUint::from(3u32) && (&n % 4u32) == BigUint::from(3u32) {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

enum LucasOutcome {
    ProbablePrime,
    Composite,
    Square,
    Factor(BigUint),
}

fn half_mod(x: BigUint, n: &BigUint) -> BigUint {
    if x.is_even() {
        x >> 1
    } else {
        (x + n) >> 1
    }
}

/// Strong Lucas probable-prime test for odd `n` with no small factors.
///
/// Selfridge's method: the first `D` in 5, -7, 9, -11, ... with
/// `(D/n) = -1`, then `P = 1`, `Q = (1 - D) / 4`.
fn strong_lucas_probable_prime(n: &BigUint) -> LucasOutcome {
    let mut d: i64 = 5;
    let mut attempts = 0;
    loop {
        match jacobi(&BigInt::from(d), n) {
            -1 => break,
            0 => {
                let g = BigUint::from(d.unsigned_abs()).gcd(n);
                if &g != n {
                    return LucasOutcome::Factor(g);
                }
            }
            _ => {}
        }
        attempts += 1;
        if attempts == 10 {
            let r = n.sqrt();
            if &(&r * &r) == n {
                return LucasOutcome::Square;
            }
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }

    let to_res = |x: i64| -> BigUint {
        let m = BigInt::from_biguint(Sign::Plus, n.clone());
        BigInt::from(x).mod_floor(&m).magnitude().clone()
    };
    let p = BigUint::one();
    let q = to_res((1 - d) / 4);
    let d_res = to_res(d);

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let k = &n_plus_1 >> s;

    // U_1 = 1, V_1 = P, Q^1 = Q; left-to-right ladder over the bits of k
    let mut u = BigUint::one();
    let mut v = p.clone();
    let mut qk = q.clone();
    for bit in (0..k.bits() - 1).rev() {
        u = (&u * &v) % n;
        v = (&v * &v + n * 2u32 - (&qk << 1u32) % n) % n;
        qk = (&qk * &qk) % n;
        if k.bit(bit) {
            let u_next = half_mod((&p * &u + &v) % n, n);
            let v_next = half_mod((&d_res * &u + &p * &v) % n, n);
            u = u_next;
            v = v_next;
            qk = (&qk * &q) % n;
        }
    }

    if u.is_zero() || v.is_zero() {
        return LucasOutcome::ProbablePrime;
    }
    for _ in 1..s {
        v = (&v * &v + n * 2u32 - (&qk << 1u32) % n) % n;
        if v.is_zero() {
            return LucasOutcome::ProbablePrime;
        }
        qk = (&qk * &qk) % n;
    }
    LucasOutcome::Composite
}
