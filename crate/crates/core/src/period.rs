//! Period detection for `V_n mod m`.
//!
//! When `gcd(Q, m) = 1` the step map `(a, b) -> (b, P*b - Q*a)` is a
//! bijection on pairs mod `m`, so the orbit of `(2, P)` is a pure cycle and
//! the period is found by stepping until the start state recurs.

use std::fmt;

use crate::arith::{gcd, mul_mod, reduce_signed, sub_mod};
use crate::error::{Error, Result};
use crate::lucas::SeqParams;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodRecord {
    pub params: SeqParams,
    pub modulus: u64,
    /// `[V_0 mod m, ..., V_{period-1} mod m]`.
    pub residues: Vec<u64>,
}

impl PeriodRecord {
    pub fn period(&self) -> u64 {
        self.residues.len() as u64
    }

    /// `V_n mod m` read off the cycle.
    pub fn residue_at(&self, n: u64) -> u64 {
        self.residues[(n % self.period()) as usize]
    }

    /// Rows `0..=upto` of the residue table.
    pub fn table(&self, upto: u64) -> Vec<u64> {
        (0..=upto).map(|n| self.residue_at(n)).collect()
    }
}

impl fmt::Display for PeriodRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={} Q={} m={} period={} residues=",
            self.params.p(),
            self.params.q(),
            self.modulus,
            self.period()
        )?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

pub fn find_period(params: SeqParams, m: u64) -> Result<PeriodRecord> {
    if m < 2 {
        return Err(Error::ModulusTooSmall(m));
    }
    let p = reduce_signed(params.p(), m);
    let q = reduce_signed(params.q(), m);
    let g = gcd(q, m);
    if g != 1 {
        return Err(Error::NotPurelyPeriodic { modulus: m, gcd: g });
    }
    let start = (2 % m, p);
    let cap = (m as u128) * (m as u128) + 1;
    let mut residues = Vec::new();
    let (mut a, mut b) = start;
    let mut steps: u128 = 0;
    loop {
        residues.push(a);
        (a, b) = (b, sub_mod(mul_mod(p, b, m), mul_mod(q, a, m), m));
        steps += 1;
        if (a, b) == start {
            break;
        }
        if steps >= cap {
            return Err(Error::PeriodCapExceeded(m));
        }
    }
    Ok(PeriodRecord {
        params,
        modulus: m,
        residues,
    })
}

/// Rows `0..=upto` of `V_n mod m`, cycling the stored period.
pub fn residue_table(record: &PeriodRecord, upto: u64) -> Vec<u64> {
    record.table(upto)
}
