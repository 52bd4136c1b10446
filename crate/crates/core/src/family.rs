//! Special-integer families `F(p) = (t1*V_{kp} - Q*t0*V_{kp-1} + c) / d`.
//!
//! The two built-in instances are
//!
//! ```text
//! T(p) = (4 V_{2p} - 2 V_{2p-1} + 3) / 5    with (P, Q) = (3, 1)
//! Y(p) = (3 V_{2p} -   V_{2p-1} + 1) / 3    with (P, Q) = (4, 1)
//! ```
//!
//! `p` may be any positive integer; restricting to prime `p` is left to
//! callers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{add_mod, reduce_signed};
use crate::error::{Error, Result};
use crate::lucas::{combine_mod, v_pair_exact, v_pair_mod, ComboParams, SeqParams};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamilySpec {
    name: String,
    combo: ComboParams,
    c: i64,
    d: u64,
    k: u64,
}

impl FamilySpec {
    pub fn new(
        name: impl Into<String>,
        combo: ComboParams,
        c: i64,
        d: u64,
        k: u64,
    ) -> Result<Self> {
        let name = name.into();
        if d == 0 || k == 0 {
            return Err(Error::InvalidParams(format!(
                "family {name}: d and k must be positive (d={d}, k={k})"
            )));
        }
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '=') {
            return Err(Error::InvalidParams(format!(
                "family name `{name}` must be non-empty without whitespace or '='"
            )));
        }
        Ok(FamilySpec {
            name,
            combo,
            c,
            d,
            k,
        })
    }

    /// `T(p)`: P=3, Q=1, t0=2, t1=4, c=3, d=5, k=2.
    pub fn t() -> Self {
        let base = SeqParams::new(3, 1).expect("constant");
        let combo = ComboParams::new(base, 2, 4).expect("constant");
        FamilySpec::new("T", combo, 3, 5, 2).expect("constant")
    }

    /// `Y(p)`: P=4, Q=1, t0=1, t1=3, c=1, d=3, k=2.
    pub fn y() -> Self {
        let base = SeqParams::new(4, 1).expect("constant");
        let combo = ComboParams::new(base, 1, 3).expect("constant");
        FamilySpec::new("Y", combo, 1, 3, 2).expect("constant")
    }

    /// Built-in family by name.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "T" => Ok(Self::t()),
            "Y" => Ok(Self::y()),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn combo(&self) -> ComboParams {
        self.combo
    }

    pub fn base(&self) -> SeqParams {
        self.combo.base()
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Same recurrence and constants as `other`, ignoring the label.
    pub fn same_parameters(&self, other: &FamilySpec) -> bool {
        self.combo == other.combo && self.c == other.c && self.d == other.d && self.k == other.k
    }

    fn index(&self, p: u64) -> Result<u64> {
        if p == 0 {
            return Err(Error::IndexOutOfRange(p, "family index p must be >= 1"));
        }
        self.k
            .checked_mul(p)
            .ok_or(Error::IndexOverflow { k: self.k, p })
    }

    /// The exact numerator `t1*V_{kp} - Q*t0*V_{kp-1} + c`.
    pub fn numerator(&self, p: u64) -> Result<BigInt> {
        let n = self.index(p)?;
        let (prev, cur) = v_pair_exact(self.base(), n - 1);
        let qt0 = self.base().q() as i128 * self.combo.t0() as i128;
        Ok(self.combo.t1() * cur - qt0 * prev + self.c)
    }

    /// `F(p)` exactly; fails if `d` does not divide the numerator.
    pub fn value(&self, p: u64) -> Result<BigInt> {
        let (quot, rem) = self.numerator(p)?.div_rem(&BigInt::from(self.d));
        if !rem.is_zero() {
            return Err(Error::IntegralityViolation {
                family: self.name.clone(),
                p,
                d: self.d,
            });
        }
        Ok(quot)
    }

    /// The numerator reduced mod `m`, computed without exact values.
    pub fn numerator_mod(&self, p: u64, m: u64) -> Result<u64> {
        let n = self.index(p)?;
        let (prev, cur) = v_pair_mod(self.base(), n - 1, m)?;
        Ok(add_mod(
            combine_mod(self.combo, prev, cur, m),
            reduce_signed(self.c, m),
            m,
        ))
    }

    /// Smallest listed prime divisor of `F(p)` for `p`'s residue class.
    ///
    /// Only the two built-in families carry rule tables.
    pub fn known_divisor(&self, p: u64) -> Option<u64> {
        divisor_rules(self)
            .iter()
            .filter(|rule| p % rule.modulus == rule.residue)
            .map(|rule| rule.q)
            .min()
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// A built-in name (`T`, `Y`) or `NAME:P:Q:t0:t1:c:d:k`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() == 1 {
            return Self::builtin(s);
        }
        if parts.len() != 8 {
            return Err(Error::InvalidParams(format!(
                "custom family `{s}` must be NAME:P:Q:t0:t1:c:d:k"
            )));
        }
        let bad = |field: &str| Error::InvalidParams(format!("custom family `{s}`: bad {field}"));
        let int = |i: usize, field: &str| parts[i].parse::<i64>().map_err(|_| bad(field));
        let nat = |i: usize, field: &str| parts[i].parse::<u64>().map_err(|_| bad(field));
        let base = SeqParams::new(int(1, "P")?, int(2, "Q")?)?;
        let combo = ComboParams::new(base, int(3, "t0")?, int(4, "t1")?)?;
        FamilySpec::new(parts[0], combo, int(5, "c")?, nat(6, "d")?, nat(7, "k")?)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: P={} Q={} t0={} t1={} c={} d={} k={}",
            self.name,
            self.base().p(),
            self.base().q(),
            self.combo.t0(),
            self.combo.t1(),
            self.c,
            self.d,
            self.k
        )
    }
}

/// `q | F(p)` whenever `p ≡ residue (mod modulus)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivisorRule {
    pub q: u64,
    pub residue: u64,
    pub modulus: u64,
}

const fn rule(q: u64, residue: u64, modulus: u64) -> DivisorRule {
    DivisorRule {
        q,
        residue,
        modulus,
    }
}

const T_RULES: [DivisorRule; 5] = [
    rule(5, 1, 5),
    rule(11, 3, 5),
    rule(31, 2, 15),
    rule(131, 7, 65),
    rule(71, 29, 35),
];

const Y_RULES: [DivisorRule; 2] = [rule(3, 5, 6), rule(13, 1, 6)];

pub fn divisor_rules(fam: &FamilySpec) -> &'static [DivisorRule] {
    if fam.same_parameters(&FamilySpec::t()) {
        &T_RULES
    } else if fam.same_parameters(&FamilySpec::y()) {
        &Y_RULES
    } else {
        &[]
    }
}
