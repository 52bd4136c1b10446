//! Resumable probable-prime search over a family.
//!
//! Each candidate `p` is either skipped, because a supplied divisibility
//! theorem covers it and `F(p)` is a proper multiple of that theorem's `q`,
//! or its value is classified. Progress is appended to a checkpoint file
//! (JSON lines) after every candidate:
//!
//! ```text
//! {"action":"header","format":"lucasv-search/1","family":"T: P=3 ...","p_from":2,"p_to":809,"primes_only":true,"filters":["family=T q=5 ..."]}
//! {"action":"hit","p":2,"digits":2,"verdict":"proven-prime-small","witness":null}
//! {"action":"test","p":7,"digits":6,"verdict":"composite-with-factor","witness":"131"}
//! {"action":"skip","p":11,"q":5}
//! {"action":"summary","next_p":810,"tested":3,"skipped":{"divisor-5":1},"hits":[2,5]}
//! ```
//!
//! A run resumed from a checkpoint writes exactly the bytes an
//! uninterrupted run would have written.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::primality::{classify, Verdict};
use crate::theorem::{check_theorem, DivisibilityTheorem};

pub const CHECKPOINT_FORMAT: &str = "lucasv-search/1";

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Visit prime `p` only; otherwise every integer in the range.
    pub primes_only: bool,
    /// Candidates evaluated concurrently; 0 uses the rayon pool size.
    pub workers: usize,
    /// Stop after this many candidates have been recorded in this call.
    pub stop_after: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            primes_only: true,
            workers: 0,
            stop_after: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestOutcome {
    pub p: u64,
    pub digits: u64,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Skip {
    pub p: u64,
    pub q: u64,
}

/// State of a search, as reconstructed from or written to a checkpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchCheckpoint {
    pub family: String,
    pub p_from: u64,
    pub p_to: u64,
    pub primes_only: bool,
    pub filters: Vec<DivisibilityTheorem>,
    /// Smallest `p` not yet processed.
    pub next_p: u64,
    pub hits: Vec<TestOutcome>,
    /// Tested candidates whose value is not prime.
    pub composites: Vec<TestOutcome>,
    pub skips: Vec<Skip>,
    pub complete: bool,
}

impl SearchCheckpoint {
    pub fn tested(&self) -> u64 {
        (self.hits.len() + self.composites.len()) as u64
    }

    /// Skip counts keyed by `divisor-<q>`.
    pub fn skipped_by_reason(&self) -> BTreeMap<String, u64> {
        let mut out = BTreeMap::new();
        for s in &self.skips {
            *out.entry(format!("divisor-{}", s.q)).or_insert(0) += 1;
        }
        out
    }

    pub fn hit_indices(&self) -> Vec<u64> {
        self.hits.iter().map(|h| h.p).collect()
    }

    fn header(&self) -> Record {
        Record::Header {
            format: CHECKPOINT_FORMAT.to_string(),
            family: self.family.clone(),
            p_from: self.p_from,
            p_to: self.p_to,
            primes_only: self.primes_only,
            filters: self.filters.iter().map(|t| t.to_string()).collect(),
        }
    }

    fn summary(&self) -> Record {
        Record::Summary {
            next_p: self.next_p,
            tested: self.tested(),
            skipped: self.skipped_by_reason(),
            hits: self.hit_indices(),
        }
    }

    fn apply(&mut self, event: &Event) {
        match event {
            Event::Skip(s) => self.skips.push(*s),
            Event::Test(t) if t.verdict.is_prime() => self.hits.push(t.clone()),
            Event::Test(t) => self.composites.push(t.clone()),
        }
        self.next_p = event.p() + 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case", deny_unknown_fields)]
enum Record {
    Header {
        format: String,
        family: String,
        p_from: u64,
        p_to: u64,
        primes_only: bool,
        filters: Vec<String>,
    },
    Hit {
        p: u64,
        digits: u64,
        verdict: String,
        witness: Option<String>,
    },
    Test {
        p: u64,
        digits: u64,
        verdict: String,
        witness: Option<String>,
    },
    Skip {
        p: u64,
        q: u64,
    },
    Summary {
        next_p: u64,
        tested: u64,
        skipped: BTreeMap<String, u64>,
        hits: Vec<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Event {
    Skip(Skip),
    Test(TestOutcome),
}

impl Event {
    fn p(&self) -> u64 {
        match self {
            Event::Skip(s) => s.p,
            Event::Test(t) => t.p,
        }
    }

    fn record(&self) -> Record {
        match self {
            Event::Skip(s) => Record::Skip { p: s.p, q: s.q },
            Event::Test(t) => {
                let (p, digits) = (t.p, t.digits);
                let verdict = t.verdict.label().to_string();
                let witness = t.verdict.witness();
                if t.verdict.is_prime() {
                    Record::Hit {
                        p,
                        digits,
                        verdict,
                        witness,
                    }
                } else {
                    Record::Test {
                        p,
                        digits,
                        verdict,
                        witness,
                    }
                }
            }
        }
    }
}

fn next_candidate(from: u64, to: u64, primes_only: bool) -> Option<u64> {
    (from..=to).find(|&p| !primes_only || is_prime_u64(p))
}

fn evaluate(fam: &FamilySpec, p: u64, filters: &[DivisibilityTheorem]) -> Result<Event> {
    let value = fam.value(p)?;
    let magnitude = value.magnitude();
    if let Some(thm) = filters.iter().find(|t| t.contains(p)) {
        let q = BigUint::from(thm.q);
        // F(p) = ±q is covered by the class but not composite
        if magnitude != &q {
            if !magnitude.is_multiple_of(&q) {
                return Err(Error::FilterUnsound { p, q: thm.q });
            }
            return Ok(Event::Skip(Skip { p, q: thm.q }));
        }
    }
    let (digits, verdict) = if magnitude.is_zero() {
        (1, Verdict::CompositeByTest("zero".into()))
    } else {
        (
            magnitude.to_str_radix(10).len() as u64,
            classify(magnitude)?.verdict,
        )
    };
    Ok(Event::Test(TestOutcome { p, digits, verdict }))
}

struct CheckpointWriter {
    out: BufWriter<File>,
}

impl CheckpointWriter {
    fn write(&mut self, record: &Record) -> Result<()> {
        let line = serde_json::to_string(record).expect("records serialize");
        self.out.write_all(line.as_bytes())?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok(())
    }
}

/// Searches `p_from..=p_to` for prime values of `fam`.
///
/// With a checkpoint path, an existing checkpoint for the same search is
/// resumed and every recorded candidate is skipped without re-testing.
pub fn search(
    fam: &FamilySpec,
    p_from: u64,
    p_to: u64,
    filters: &[DivisibilityTheorem],
    checkpoint: Option<&Path>,
    options: SearchOptions,
) -> Result<SearchCheckpoint> {
    if p_from == 0 {
        return Err(Error::Precondition("p_from must be >= 1".into()));
    }
    if p_from > p_to {
        return Err(Error::RangeInverted {
            from: p_from,
            to: p_to,
        });
    }
    let mut filters: Vec<DivisibilityTheorem> = filters
        .iter()
        .filter(|t| t.family == fam.name())
        .cloned()
        .collect();
    filters.sort_by_key(|t| (t.q, t.class_modulus, t.class_residue));
    for thm in &filters {
        let verdict = check_theorem(fam, thm);
        if !verdict.is_valid() {
            return Err(Error::Precondition(format!("filter `{thm}` is {verdict}")));
        }
    }

    let mut state = SearchCheckpoint {
        family: fam.to_string(),
        p_from,
        p_to,
        primes_only: options.primes_only,
        filters,
        next_p: p_from,
        hits: Vec::new(),
        composites: Vec::new(),
        skips: Vec::new(),
        complete: false,
    };

    let mut writer = match checkpoint {
        Some(path) => {
            let existing = match std::fs::read_to_string(path) {
                Ok(text) => text,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
                Err(e) => return Err(e.into()),
            };
            if !existing.is_empty() {
                replay(&mut state, path, &existing)?;
            }
            let file = OpenOptions::new().create(true).append(true).open(path)?;
            let mut w = CheckpointWriter {
                out: BufWriter::new(file),
            };
            if existing.is_empty() {
                w.write(&state.header())?;
            }
            Some(w)
        }
        None => None,
    };
    if state.complete {
        return Ok(state);
    }

    let batch_size = match options.workers {
        0 => rayon::current_num_threads().max(1),
        n => n,
    };
    let mut budget = options.stop_after.unwrap_or(usize::MAX);
    let mut cursor = state.next_p;
    loop {
        let mut batch = Vec::with_capacity(batch_size);
        while batch.len() < batch_size.min(budget) {
            match next_candidate(cursor, p_to, state.primes_only) {
                Some(p) => {
                    batch.push(p);
                    cursor = p + 1;
                }
                None => break,
            }
        }
        if batch.is_empty() {
            break;
        }
        let events: Vec<Event> = batch
            .par_iter()
            .map(|&p| evaluate(fam, p, &state.filters))
            .collect::<Result<_>>()?;
        for event in &events {
            if let Some(w) = writer.as_mut() {
                w.write(&event.record())?;
            }
            state.apply(event);
        }
        budget -= events.len();
        if budget == 0 {
            return Ok(state);
        }
    }

    state.next_p = p_to + 1;
    state.complete = true;
    if let Some(w) = writer.as_mut() {
        w.write(&state.summary())?;
    }
    Ok(state)
}

/// Rebuilds `state` from checkpoint text, validating every record against
/// the search it claims to belong to.
fn replay(state: &mut SearchCheckpoint, path: &Path, text: &str) -> Result<()> {
    let corrupt = |line: usize, reason: String| Error::CorruptCheckpoint {
        path: PathBuf::from(path),
        line,
        reason,
    };
    if !text.ends_with('\n') {
        return Err(corrupt(text.lines().count(), "truncated final line".into()));
    }
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, first) = lines.next().expect("non-empty text");
    let header: Record =
        serde_json::from_str(first).map_err(|e| corrupt(1, format!("bad header: {e}")))?;
    if !matches!(header, Record::Header { .. }) {
        return Err(corrupt(1, "first record is not a header".into()));
    }
    if header != state.header() {
        return Err(Error::CheckpointMismatch {
            path: PathBuf::from(path),
            reason: format!(
                "header differs; expected {}",
                serde_json::to_string(&state.header()).expect("records serialize")
            ),
        });
    }

    for (n, line) in lines {
        if state.complete {
            return Err(corrupt(n, "record after summary".into()));
        }
        let record: Record = serde_json::from_str(line).map_err(|e| corrupt(n, e.to_string()))?;
        if let Record::Summary { .. } = record {
            let mut done = state.clone();
            done.next_p = state.p_to + 1;
            if next_candidate(state.next_p, state.p_to, state.primes_only).is_some() {
                return Err(corrupt(n, "summary before the range is exhausted".into()));
            }
            if record != done.summary() {
                return Err(corrupt(n, "summary disagrees with recorded events".into()));
            }
            done.complete = true;
            *state = done;
            continue;
        }
        let expected = next_candidate(state.next_p, state.p_to, state.primes_only);
        let event = match record {
            Record::Skip { p, q } => {
                let filter = state.filters.iter().find(|t| t.contains(p));
                if filter.map(|t| t.q) != Some(q) {
                    return Err(corrupt(n, format!("no filter with q={q} covers p={p}")));
                }
                Event::Skip(Skip { p, q })
            }
            Record::Hit {
                p,
                digits,
                ref verdict,
                ref witness,
            }
            | Record::Test {
                p,
                digits,
                ref verdict,
                ref witness,
            } => {
                let verdict = Verdict::from_parts(verdict, witness.as_deref())
                    .ok_or_else(|| corrupt(n, format!("unknown verdict `{verdict}`")))?;
                if verdict.is_prime() != matches!(record, Record::Hit { .. }) {
                    return Err(corrupt(n, "action does not match verdict".into()));
                }
                Event::Test(TestOutcome { p, digits, verdict })
            }
            Record::Header { .. } => return Err(corrupt(n, "duplicate header".into())),
            Record::Summary { .. } => unreachable!(),
        };
        if Some(event.p()) != expected {
            return Err(corrupt(
                n,
                format!("p={} out of sequence (expected {:?})", event.p(), expected),
            ));
        }
        state.apply(&event);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theorem::builtin_theorems;

    fn t_filters() -> Vec<DivisibilityTheorem> {
        builtin_theorems()
            .into_iter()
            .filter(|t| [5, 11, 31].contains(&t.q))
            .collect()
    }

    #[test]
    fn small_t_range() {
        let st = search(
            &FamilySpec::t(),
            2,
            10,
            &t_filters(),
            None,
            SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(st.hit_indices(), vec![2, 5]);
        assert_eq!(st.hits[1].digits, 4);
        let seven = st.composites.iter().find(|t| t.p == 7).unwrap();
        assert_eq!(seven.verdict, Verdict::CompositeWithFactor(131u32.into()));
        // p = 3 is covered by the 11-rule
        assert_eq!(st.skips, vec![Skip { p: 3, q: 11 }]);
        assert!(st.complete);
        assert_eq!(st.next_p, 11);
    }

    #[test]
    fn value_equal_to_divisor_is_tested() {
        // T(2) = 31 lies in the 31-rule's class but is itself prime
        let st = search(
            &FamilySpec::t(),
            1,
            2,
            &t_filters(),
            None,
            SearchOptions {
                primes_only: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(st.hit_indices(), vec![1, 2]);
        assert!(st.skips.is_empty());
    }

    #[test]
    fn rejects_bad_ranges_and_filters() {
        let t = FamilySpec::t();
        assert!(matches!(
            search(&t, 10, 2, &[], None, SearchOptions::default()),
            Err(Error::RangeInverted { from: 10, to: 2 })
        ));
        assert!(search(&t, 0, 2, &[], None, SearchOptions::default()).is_err());
        let mut bad = t_filters();
        bad[0].class_residue = 2;
        assert!(search(&t, 2, 10, &bad, None, SearchOptions::default()).is_err());
    }
}
