//! Divisibility theorems of the form "q | F(p) for every p ≡ r (mod m)".
//!
//! A theorem is proved by reducing the numerator `d*F(p)` modulo a check
//! modulus `M` (`q*d` when `q | d`, else `q`). `V_n mod M` has period `π`,
//! so the numerator only depends on `k*p mod π`; if every `p` in the class
//! maps to one index residue `s` and the numerator vanishes at `s`, the
//! divisibility holds for the whole class.
//!
//! Theorems serialize one per line:
//!
//! ```text
//! family=T q=31 r=2 m=15 M=31 period=15 s=4
//! ```
//!
//! Blank lines and lines starting with `#` are ignored by the parser.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;

use crate::arith::{add_mod, gcd, inv_mod, is_prime_u64, primes_up_to, reduce_signed};
use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::lucas::combine_mod;
use crate::period::find_period;

/// Members of a class checked directly by [`check_theorem`].
pub const SPOT_CHECKS: usize = 50;

/// Members scanned when looking for a counterexample to an invalid theorem.
const COUNTEREXAMPLE_SCAN: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TheoremProof {
    pub check_modulus: u64,
    pub period: u64,
    pub index_residue: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisibilityTheorem {
    pub family: String,
    pub q: u64,
    pub class_modulus: u64,
    pub class_residue: u64,
    pub proof: TheoremProof,
}

impl DivisibilityTheorem {
    pub fn contains(&self, p: u64) -> bool {
        p % self.class_modulus == self.class_residue
    }

    /// The class holds infinitely many primes (its residue is coprime to its
    /// modulus). Other classes still yield valid theorems for composite `p`.
    pub fn is_prime_relevant(&self) -> bool {
        gcd(self.class_residue, self.class_modulus) == 1
    }

    /// Members `p >= 1` of the class in increasing order.
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        let first = if self.class_residue == 0 {
            self.class_modulus
        } else {
            self.class_residue
        };
        (0u64..).map_while(move |j| {
            j.checked_mul(self.class_modulus)
                .and_then(|x| x.checked_add(first))
        })
    }

    fn sort_key(&self) -> (u64, u64, u64, &str, TheoremProof) {
        (
            self.q,
            self.class_modulus,
            self.class_residue,
            self.family.as_str(),
            self.proof,
        )
    }
}

impl fmt::Display for DivisibilityTheorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "family={} q={} r={} m={} M={} period={} s={}",
            self.family,
            self.q,
            self.class_residue,
            self.class_modulus,
            self.proof.check_modulus,
            self.proof.period,
            self.proof.index_residue
        )
    }
}

impl FromStr for DivisibilityTheorem {
    type Err = String;

    fn from_str(line: &str) -> std::result::Result<Self, String> {
        const KEYS: [&str; 7] = ["family", "q", "r", "m", "M", "period", "s"];
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != KEYS.len() {
            return Err(format!(
                "expected {} fields, found {}",
                KEYS.len(),
                fields.len()
            ));
        }
        let mut values = Vec::with_capacity(KEYS.len());
        for (field, key) in fields.iter().zip(KEYS) {
            let value = field
                .strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .ok_or_else(|| format!("expected `{key}=...`, found `{field}`"))?;
            values.push(value);
        }
        let num = |i: usize| -> std::result::Result<u64, String> {
            values[i]
                .parse::<u64>()
                .map_err(|e| format!("{}: {e}", KEYS[i]))
        };
        if values[0].is_empty() {
            return Err("empty family name".into());
        }
        Ok(DivisibilityTheorem {
            family: values[0].to_string(),
            q: num(1)?,
            class_residue: num(2)?,
            class_modulus: num(3)?,
            proof: TheoremProof {
                check_modulus: num(4)?,
                period: num(5)?,
                index_residue: num(6)?,
            },
        })
    }
}

/// Parses a theorem list, skipping blank and `#` lines.
pub fn parse_theorems(text: &str) -> Result<Vec<DivisibilityTheorem>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.trim().parse().map_err(|reason| Error::TheoremParse {
                line: i + 1,
                reason,
            })
        })
        .collect()
}

pub fn format_theorems(theorems: &[DivisibilityTheorem]) -> String {
    theorems.iter().map(|t| format!("{t}\n")).collect()
}

/// `q*d` when `q | d`, else `q`. `None` on overflow.
pub fn check_modulus(q: u64, d: u64) -> Option<u64> {
    if q != 0 && d.is_multiple_of(q) {
        q.checked_mul(d)
    } else {
        Some(q)
    }
}

/// Solves `k*p ≡ s (mod period)` for `p`, returning `(residue, modulus)`.
///
/// With `g = gcd(k, period)` a solution exists iff `g | s`, and then it is
/// a single class modulo `period / g`.
pub fn index_class_to_p_class(k: u64, period: u64, s: u64) -> Option<(u64, u64)> {
    let g = gcd(k % period, period);
    if !s.is_multiple_of(g) {
        return None;
    }
    let modulus = period / g;
    let inv = inv_mod((k / g) % modulus, modulus)?;
    let residue = ((s / g) as u128 * inv as u128 % modulus as u128) as u64;
    Some((residue, modulus))
}

/// The built-in theorems for `Y` (divisors 3, 13) and `T` (5, 11, 31, 131, 71).
pub fn builtin_theorems() -> Vec<DivisibilityTheorem> {
    let thm = |family: &str, q, r, m, big_m, period, s| DivisibilityTheorem {
        family: family.to_string(),
        q,
        class_residue: r,
        class_modulus: m,
        proof: TheoremProof {
            check_modulus: big_m,
            period,
            index_residue: s,
        },
    };
    vec![
        thm("Y", 3, 5, 6, 9, 6, 4),
        thm("Y", 13, 1, 6, 13, 12, 2),
        thm("T", 5, 1, 5, 25, 10, 2),
        thm("T", 11, 3, 5, 11, 5, 1),
        thm("T", 31, 2, 15, 31, 15, 4),
        thm("T", 131, 7, 65, 131, 65, 14),
        thm("T", 71, 29, 35, 71, 35, 23),
    ]
}

/// Why a theorem failed to verify.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Defect {
    FamilyMismatch { expected: String },
    Malformed(String),
    NotPrime,
    CheckModulus { expected: Option<u64> },
    NotPeriodic,
    Period { found: u64 },
    IndexResidue { found: Vec<u64> },
    NonzeroResidue { residue: u64 },
    SpotCheck { p: u64 },
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::FamilyMismatch { expected } => {
                write!(f, "family-mismatch(expected {expected})")
            }
            Defect::Malformed(why) => write!(f, "malformed({why})"),
            Defect::NotPrime => f.write_str("q-not-prime"),
            Defect::CheckModulus { expected: Some(m) } => write!(f, "check-modulus(expected {m})"),
            Defect::CheckModulus { expected: None } => f.write_str("check-modulus(overflow)"),
            Defect::NotPeriodic => f.write_str("not-purely-periodic"),
            Defect::Period { found } => write!(f, "period(found {found})"),
            Defect::IndexResidue { found } => {
                let list: Vec<String> = found.iter().map(u64::to_string).collect();
                write!(f, "index-residue(class maps to {})", list.join(","))
            }
            Defect::NonzeroResidue { residue } => write!(f, "nonzero-residue({residue})"),
            Defect::SpotCheck { p } => write!(f, "spot-check(p={p})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoremVerdict {
    Valid,
    Invalid {
        defect: Defect,
        counterexample: Option<u64>,
    },
}

impl TheoremVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, TheoremVerdict::Valid)
    }
}

impl fmt::Display for TheoremVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoremVerdict::Valid => f.write_str("valid"),
            TheoremVerdict::Invalid {
                defect,
                counterexample,
            } => {
                write!(f, "invalid reason={defect}")?;
                match counterexample {
                    Some(p) => write!(f, " counterexample={p}"),
                    None => f.write_str(" counterexample=none"),
                }
            }
        }
    }
}

/// Does `q` divide `F(p)`? Decided on the numerator mod `q*d`.
fn divides_value(fam: &FamilySpec, q: u64, p: u64) -> Option<bool> {
    let m = q.checked_mul(fam.d())?;
    if m < 2 {
        return Some(true);
    }
    fam.numerator_mod(p, m).ok().map(|r| r == 0)
}

/// Smallest prime member of the class that `q` fails to divide, or the
/// smallest failing member when no prime member fails within the scan.
fn find_counterexample(fam: &FamilySpec, thm: &DivisibilityTheorem) -> Option<u64> {
    let mut first = None;
    for p in thm.members().take(COUNTEREXAMPLE_SCAN) {
        if divides_value(fam, thm.q, p) == Some(false) {
            if is_prime_u64(p) {
                return Some(p);
            }
            first.get_or_insert(p);
        }
    }
    first
}

pub fn check_theorem(fam: &FamilySpec, thm: &DivisibilityTheorem) -> TheoremVerdict {
    match structural_defect(fam, thm) {
        None => TheoremVerdict::Valid,
        Some(defect) => {
            let counterexample = match defect {
                Defect::SpotCheck { p } => Some(p),
                Defect::FamilyMismatch { .. } | Defect::Malformed(_) => None,
                _ => find_counterexample(fam, thm),
            };
            TheoremVerdict::Invalid {
                defect,
                counterexample,
            }
        }
    }
}

fn structural_defect(fam: &FamilySpec, thm: &DivisibilityTheorem) -> Option<Defect> {
    if thm.family != fam.name() {
        return Some(Defect::FamilyMismatch {
            expected: fam.name().to_string(),
        });
    }
    if thm.class_modulus == 0 || thm.class_residue >= thm.class_modulus {
        return Some(Defect::Malformed(format!(
            "residue {} not in [0, {})",
            thm.class_residue, thm.class_modulus
        )));
    }
    if !is_prime_u64(thm.q) {
        return Some(Defect::NotPrime);
    }
    let expected_m = check_modulus(thm.q, fam.d());
    if expected_m != Some(thm.proof.check_modulus) {
        return Some(Defect::CheckModulus {
            expected: expected_m,
        });
    }
    let big_m = thm.proof.check_modulus;
    let record = match find_period(fam.base(), big_m) {
        Ok(r) => r,
        Err(_) => return Some(Defect::NotPeriodic),
    };
    let period = record.period();
    if period != thm.proof.period {
        return Some(Defect::Period { found: period });
    }

    // k*(r + m*j) mod π over one full cycle of j
    let k = fam.k() as u128 % period as u128;
    let indices: BTreeSet<u64> = (0..period)
        .map(|j| {
            let p = thm.class_residue as u128 + thm.class_modulus as u128 * j as u128;
            (k * (p % period as u128) % period as u128) as u64
        })
        .collect();
    if indices.len() != 1 || !indices.contains(&thm.proof.index_residue) {
        return Some(Defect::IndexResidue {
            found: indices.into_iter().collect(),
        });
    }

    let s = thm.proof.index_residue;
    let residue = numerator_at_index(fam, &record.residues, big_m, s);
    if residue != 0 {
        return Some(Defect::NonzeroResidue { residue });
    }

    for p in thm.members().take(SPOT_CHECKS) {
        if fam.numerator_mod(p, big_m).ok() != Some(0) {
            return Some(Defect::SpotCheck { p });
        }
    }
    None
}

/// `t1*V_s - Q*t0*V_{s-1} + c mod M` read from one period of residues.
fn numerator_at_index(fam: &FamilySpec, residues: &[u64], m: u64, s: u64) -> u64 {
    let period = residues.len() as u64;
    let cur = residues[s as usize];
    let prev = residues[((s + period - 1) % period) as usize];
    add_mod(
        combine_mod(fam.combo(), prev, cur, m),
        reduce_signed(fam.c(), m),
        m,
    )
}

/// Checks `q | F(p)` for every class member `p <= p_max`, returning the
/// first failure.
pub fn audit_theorem(fam: &FamilySpec, thm: &DivisibilityTheorem, p_max: u64) -> Option<u64> {
    thm.members()
        .take_while(|&p| p <= p_max)
        .find(|&p| divides_value(fam, thm.q, p) != Some(true))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkipNotice {
    pub q: u64,
    pub reason: String,
}

impl fmt::Display for SkipNotice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "# skipped q={} reason={}", self.q, self.reason)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discovery {
    pub theorems: Vec<DivisibilityTheorem>,
    pub skipped: Vec<SkipNotice>,
}

#[derive(Clone, Copy, Debug)]
pub struct DiscoverOptions {
    pub parallel: bool,
}

impl Default for DiscoverOptions {
    fn default() -> Self {
        DiscoverOptions { parallel: true }
    }
}

fn discover_for_prime(
    fam: &FamilySpec,
    q: u64,
) -> std::result::Result<Vec<DivisibilityTheorem>, SkipNotice> {
    let skip = |reason: String| SkipNotice { q, reason };
    let big_m = check_modulus(q, fam.d()).ok_or_else(|| skip("check modulus overflows".into()))?;
    let record = find_period(fam.base(), big_m).map_err(|e| skip(e.to_string()))?;
    let period = record.period();
    let mut found = Vec::new();
    for s in 0..period {
        if numerator_at_index(fam, &record.residues, big_m, s) != 0 {
            continue;
        }
        if let Some((r, m)) = index_class_to_p_class(fam.k(), period, s) {
            found.push(DivisibilityTheorem {
                family: fam.name().to_string(),
                q,
                class_modulus: m,
                class_residue: r,
                proof: TheoremProof {
                    check_modulus: big_m,
                    period,
                    index_residue: s,
                },
            });
        }
    }
    Ok(found)
}

/// Finds every theorem with prime `q <= q_max` provable over one period.
///
/// Output is sorted by `(q, class modulus, class residue)` and identical
/// whether or not candidates are processed in parallel.
pub fn discover(fam: &FamilySpec, q_max: u64, options: DiscoverOptions) -> Result<Discovery> {
    if q_max < 2 {
        return Err(Error::Precondition(format!(
            "q_max must be >= 2, got {q_max}"
        )));
    }
    let primes = primes_up_to(q_max);
    let results: Vec<_> = if options.parallel {
        primes
            .par_iter()
            .map(|&q| discover_for_prime(fam, q))
            .collect()
    } else {
        primes.iter().map(|&q| discover_for_prime(fam, q)).collect()
    };
    let mut theorems = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(found) => theorems.extend(found),
            Err(notice) => skipped.push(notice),
        }
    }
    theorems.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    // same (q, class) from several index residues: keep the smallest proof
    theorems.dedup_by(|later, earlier| {
        later.q == earlier.q
            && later.class_modulus == earlier.class_modulus
            && later.class_residue == earlier.class_residue
    });
    Ok(Discovery { theorems, skipped })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport {
    pub modulus: u64,
    pub covered: BTreeMap<u64, DivisibilityTheorem>,
    pub uncovered: Vec<u64>,
}

fn join(xs: impl Iterator<Item = u64>) -> String {
    xs.map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for CoverageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "modulus={} covered={} uncovered={}",
            self.modulus,
            join(self.covered.keys().copied()),
            join(self.uncovered.iter().copied())
        )?;
        for (r, thm) in &self.covered {
            writeln!(f, "covered r={r} by {thm}")?;
        }
        Ok(())
    }
}

/// Which residues coprime to `modulus` lie entirely inside a theorem's
/// class. `r (mod N)` is inside `r' (mod m')` iff `m' | N` and
/// `r ≡ r' (mod m')`.
pub fn coverage(
    fam: &FamilySpec,
    theorems: &[DivisibilityTheorem],
    modulus: u64,
) -> Result<CoverageReport> {
    if modulus < 2 {
        return Err(Error::ModulusTooSmall(modulus));
    }
    let mut relevant: Vec<&DivisibilityTheorem> = theorems
        .iter()
        .filter(|t| {
            t.family == fam.name()
                && t.class_modulus != 0
                && modulus.is_multiple_of(t.class_modulus)
        })
        .collect();
    relevant.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let mut covered = BTreeMap::new();
    let mut uncovered = Vec::new();
    for r in (0..modulus).filter(|&r| gcd(r, modulus) == 1) {
        match relevant.iter().find(|t| t.contains(r)) {
            Some(t) => {
                covered.insert(r, (*t).clone());
            }
            None => uncovered.push(r),
        }
    }
    Ok(CoverageReport {
        modulus,
        covered,
        uncovered,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdWitness {
    pub family: String,
    pub residue: u64,
    pub modulus: u64,
    pub p1: u64,
    pub p2: u64,
    pub gcd_value: BigInt,
}

impl fmt::Display for GcdWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "family={} r={} m={} p1={} p2={} gcd={}",
            self.family, self.residue, self.modulus, self.p1, self.p2, self.gcd_value
        )
    }
}

/// `gcd(F(p1), F(p2))` for two members of the class `r (mod m)`.
///
/// A value of 1 shows that no single prime divides every member's value.
pub fn gcd_witness(fam: &FamilySpec, r: u64, m: u64, p1: u64, p2: u64) -> Result<GcdWitness> {
    if m == 0 {
        return Err(Error::Precondition("class modulus must be positive".into()));
    }
    if p1 == p2 {
        return Err(Error::Precondition(format!(
            "p1 and p2 must differ (both {p1})"
        )));
    }
    if p1 % m != r % m || p2 % m != r % m {
        return Err(Error::Precondition(format!(
            "p1={p1} and p2={p2} must both be ≡ {r} (mod {m})"
        )));
    }
    let gcd_value = fam.value(p1)?.gcd(&fam.value(p2)?);
    Ok(GcdWitness {
        family: fam.name().to_string(),
        residue: r % m,
        modulus: m,
        p1,
        p2,
        gcd_value,
    })
}
