//! Lucas V-sequences and the special integers built from them.
//!
//! * [`lucas`]: exact and modular evaluation of `V_n(P, Q)` and of the
//!   combinations `t1*V_n - Q*t0*V_{n-1}`.
//! * [`family`]: families `F(p) = (t1*V_{kp} - Q*t0*V_{kp-1} + c) / d`,
//!   with the built-in `T` and `Y`.
//! * [`period`]: periods and residue tables of `V_n mod m`.
//! * [`theorem`]: checking, discovering and combining divisibility
//!   theorems "q | F(p) whenever p ≡ r (mod m)".
//! * [`primality`] and [`search`]: probable-prime classification and a
//!   checkpointed search for prime values of a family.

pub mod arith;
pub mod error;
pub mod family;
pub mod lucas;
pub mod period;
pub mod primality;
pub mod report;
pub mod search;
pub mod theorem;

pub use error::{Error, Result};
pub use family::FamilySpec;
pub use lucas::{v_exact, v_mod, w_exact, w_mod, ComboParams, SeqParams};
pub use period::{find_period, residue_table, PeriodRecord};
pub use primality::{classify, PrimalityVerdict, Verdict};
pub use search::{search, SearchCheckpoint, SearchOptions};
pub use theorem::{
    builtin_theorems, check_theorem, coverage, discover, gcd_witness, CoverageReport,
    DiscoverOptions, DivisibilityTheorem, GcdWitness, TheoremVerdict,
};
