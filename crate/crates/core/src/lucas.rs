//! Lucas V-sequences `V_n(P, Q)` and their two-term combinations.
//!
//! `V_0 = 2`, `V_1 = P` and `V_n = P*V_{n-1} - Q*V_{n-2}`. Exact values are
//! arbitrary precision; modular values use the fast-doubling identities
//!
//! ```text
//! V_{2j}   = V_j^2 - 2 Q^j
//! V_{2j+1} = V_j V_{j+1} - P Q^j
//! ```
//!
//! which need no division, so they work for every modulus `m >= 2`.

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::{mul_mod, reduce_signed, sub_mod};
use crate::error::{Error, Result};

/// The pair `(P, Q)` defining a V-sequence. Both are nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeqParams {
    p: i64,
    q: i64,
}

impl SeqParams {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParams(format!(
                "P and Q must be nonzero (P={p}, Q={q})"
            )));
        }
        Ok(SeqParams { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }
}

/// A base sequence together with the coefficients `t0`, `t1` of the
/// combination `W_n = t1*V_n - Q*t0*V_{n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ComboParams {
    base: SeqParams,
    t0: i64,
    t1: i64,
}

impl ComboParams {
    pub fn new(base: SeqParams, t0: i64, t1: i64) -> Result<Self> {
        if t0 == 0 || t1 == 0 {
            return Err(Error::InvalidParams(format!(
                "t0 and t1 must be nonzero (t0={t0}, t1={t1})"
            )));
        }
        Ok(ComboParams { base, t0, t1 })
    }

    pub fn base(&self) -> SeqParams {
        self.base
    }

    pub fn t0(&self) -> i64 {
        self.t0
    }

    pub fn t1(&self) -> i64 {
        self.t1
    }
}

fn check_modulus(m: u64) -> Result<()> {
    if m < 2 {
        Err(Error::ModulusTooSmall(m))
    } else {
        Ok(())
    }
}

/// `(V_n, V_{n+1})` exactly.
pub fn v_pair_exact(params: SeqParams, n: u64) -> (BigInt, BigInt) {
    let p = BigInt::from(params.p);
    let q = BigInt::from(params.q);
    let mut v0 = BigInt::from(2);
    let mut v1 = p.clone();
    let mut qj = BigInt::one();
    if n == 0 {
        return (v0, v1);
    }
    for bit in (0..64 - n.leading_zeros()).rev() {
        // state (V_j, V_{j+1}, Q^j) -> (V_{2j}, V_{2j+1}, Q^{2j})
        let v2j = &v0 * &v0 - 2 * &qj;
        let v2j1 = &v0 * &v1 - &p * &qj;
        if (n >> bit) & 1 == 1 {
            // V_{2j+2} = V_{j+1}^2 - 2 Q^{j+1}
            let v2j2 = &v1 * &v1 - 2 * &qj * &q;
            qj = &qj * &qj * &q;
            v0 = v2j1;
            v1 = v2j2;
        } else {
            qj = &qj * &qj;
            v0 = v2j;
            v1 = v2j1;
        }
    }
    (v0, v1)
}

/// `V_n(P, Q)` as an exact integer.
pub fn v_exact(params: SeqParams, n: u64) -> BigInt {
    v_pair_exact(params, n).0
}

/// `(V_n mod m, V_{n+1} mod m)` in O(log n) multiplications.
pub fn v_pair_mod(params: SeqParams, n: u64, m: u64) -> Result<(u64, u64)> {
    check_modulus(m)?;
    let p = reduce_signed(params.p, m);
    let q = reduce_signed(params.q, m);
    let two = 2 % m;
    let (mut v0, mut v1, mut qj) = (two, p, 1 % m);
    if n == 0 {
        return Ok((v0, v1));
    }
    for bit in (0..64 - n.leading_zeros()).rev() {
        let v2j = sub_mod(mul_mod(v0, v0, m), mul_mod(two, qj, m), m);
        let v2j1 = sub_mod(mul_mod(v0, v1, m), mul_mod(p, qj, m), m);
        if (n >> bit) & 1 == 1 {
            let qj1 = mul_mod(qj, q, m);
            v0 = v2j1;
            v1 = sub_mod(mul_mod(v1, v1, m), mul_mod(two, qj1, m), m);
            qj = mul_mod(qj, qj1, m);
        } else {
            qj = mul_mod(qj, qj, m);
            v0 = v2j;
            v1 = v2j1;
        }
    }
    Ok((v0, v1))
}

/// `V_n(P, Q) mod m`, canonical in `[0, m)`.
pub fn v_mod(params: SeqParams, n: u64, m: u64) -> Result<u64> {
    Ok(v_pair_mod(params, n, m)?.0)
}

/// `W_n = t1*V_n - Q*t0*V_{n-1}` exactly. Requires `n >= 1`.
pub fn w_exact(combo: ComboParams, n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::IndexOutOfRange(n, "W_n needs n >= 1"));
    }
    let (prev, cur) = v_pair_exact(combo.base, n - 1);
    Ok(combo.t1 * cur - combo.base.q as i128 * combo.t0 as i128 * prev)
}

/// `W_n mod m` from the adjacent pair `(V_{n-1}, V_n) mod m`.
pub fn w_mod(combo: ComboParams, n: u64, m: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::IndexOutOfRange(n, "W_n needs n >= 1"));
    }
    let (prev, cur) = v_pair_mod(combo.base, n - 1, m)?;
    Ok(combine_mod(combo, prev, cur, m))
}

/// `t1*cur - Q*t0*prev mod m` for residues `prev`, `cur`.
pub(crate) fn combine_mod(combo: ComboParams, prev: u64, cur: u64, m: u64) -> u64 {
    let t1 = reduce_signed(combo.t1, m);
    let qt0 = mul_mod(
        reduce_signed(combo.base.q, m),
        reduce_signed(combo.t0, m),
        m,
    );
    sub_mod(mul_mod(t1, cur, m), mul_mod(qt0, prev, m), m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(p: i64, q: i64) -> SeqParams {
        SeqParams::new(p, q).unwrap()
    }

    #[test]
    fn rejects_zero_parameters() {
        assert!(SeqParams::new(0, 1).is_err());
        assert!(SeqParams::new(3, 0).is_err());
        assert!(ComboParams::new(sp(3, 1), 0, 4).is_err());
        assert!(ComboParams::new(sp(3, 1), 2, 0).is_err());
    }

    #[test]
    fn exact_examples() {
        assert_eq!(v_exact(sp(4, 1), 0), BigInt::from(2));
        assert_eq!(v_exact(sp(4, 1), 1), BigInt::from(4));
        assert_eq!(v_exact(sp(3, 1), 4), BigInt::from(47));
        // negative Q: V(1,-1) are the Lucas numbers
        assert_eq!(v_exact(sp(1, -1), 10), BigInt::from(123));
    }

    #[test]
    fn modular_examples() {
        assert_eq!(v_mod(sp(4, 1), 3, 9).unwrap(), 7);
        assert_eq!(v_mod(sp(3, 1), 5, 25).unwrap(), 23);
        assert_eq!(v_mod(sp(3, 1), 4, 31).unwrap(), 16);
        assert_eq!(v_mod(sp(-3, -7), 0, 5).unwrap(), 2);
        assert!(matches!(
            v_mod(sp(3, 1), 4, 1),
            Err(Error::ModulusTooSmall(1))
        ));
        assert!(v_mod(sp(3, 1), 4, 0).is_err());
    }

    #[test]
    fn modular_result_is_canonical_for_negative_params() {
        let (mut a, mut b) = (BigInt::from(2), BigInt::from(-5));
        for n in 0..60 {
            let r = v_mod(sp(-5, -3), n, 17).unwrap();
            assert!(r < 17);
            assert_eq!(v_exact(sp(-5, -3), n), a, "n={n}");
            let expect = ((&a % 17) + 17) % 17;
            assert_eq!(BigInt::from(r), expect, "n={n}");
            (a, b) = (b.clone(), -5 * &b + 3 * &a);
        }
    }

    #[test]
    fn combination_examples() {
        let y = ComboParams::new(sp(4, 1), 1, 3).unwrap();
        let t = ComboParams::new(sp(3, 1), 2, 4).unwrap();
        assert_eq!(w_exact(y, 2).unwrap(), BigInt::from(38));
        assert_eq!(w_exact(t, 1).unwrap(), BigInt::from(8));
        assert_eq!(w_exact(t, 4).unwrap(), BigInt::from(152));
        assert_eq!(w_mod(y, 4, 9).unwrap(), 8);
        assert_eq!(w_mod(t, 1, 11).unwrap(), 8);
        assert_eq!(w_mod(t, 2, 25).unwrap(), 22);
    }

    #[test]
    fn combination_rejects_index_zero() {
        let t = ComboParams::new(sp(3, 1), 2, 4).unwrap();
        assert!(w_exact(t, 0).is_err());
        assert!(w_mod(t, 0, 7).is_err());
        assert!(w_mod(t, 3, 1).is_err());
    }

    #[test]
    fn large_modulus_does_not_overflow() {
        let m = u64::MAX - 58; // largest 64-bit prime
        let params = sp(i64::MAX, i64::MIN);
        let mut a = 2 % m;
        let mut b = reduce_signed(params.p, m);
        let qm = reduce_signed(params.q, m);
        let pm = b;
        for _ in 0..200 {
            (a, b) = (b, sub_mod(mul_mod(pm, b, m), mul_mod(qm, a, m), m));
        }
        assert_eq!(v_mod(params, 200, m).unwrap(), a);
    }
}
