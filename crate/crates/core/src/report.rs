//! Text renderings of results shared by the command-line front end.

use std::fmt::Write;

use crate::error::Result;
use crate::family::FamilySpec;
use crate::period::PeriodRecord;
use crate::search::SearchCheckpoint;
use crate::theorem::{audit_theorem, check_theorem, DivisibilityTheorem};

/// `family=Y p=2 digits=3 value=177`
pub fn value_line(fam: &FamilySpec, p: u64) -> Result<String> {
    let value = fam.value(p)?;
    let digits = value.magnitude().to_str_radix(10).len();
    Ok(format!(
        "family={} p={p} digits={digits} value={value}",
        fam.name()
    ))
}

/// `n | V_n mod m` rows `0..=upto`.
pub fn period_table(record: &PeriodRecord, upto: u64) -> String {
    let width = upto.to_string().len().max(1);
    let mut out = format!("{:>width$} | V_n mod {}\n", "n", record.modulus);
    for n in 0..=upto {
        let _ = writeln!(out, "{n:>width$} | {}", record.residue_at(n));
    }
    out
}

/// One line per row: `n=3 v=7`.
pub fn period_rows(record: &PeriodRecord, upto: u64) -> String {
    (0..=upto)
        .map(|n| format!("n={n} v={}\n", record.residue_at(n)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub lines: Vec<String>,
    pub failures: usize,
}

impl VerifyReport {
    pub fn render(&self) -> String {
        let mut out: String = self.lines.iter().map(|l| format!("{l}\n")).collect();
        let _ = writeln!(out, "checked={} failed={}", self.lines.len(), self.failures);
        out
    }
}

/// Checks each theorem against the family returned by `resolve`, with an
/// optional exhaustive audit of class members `p <= deep`.
pub fn verify(
    theorems: &[DivisibilityTheorem],
    resolve: impl Fn(&str) -> Result<FamilySpec>,
    deep: Option<u64>,
) -> Result<VerifyReport> {
    let mut lines = Vec::with_capacity(theorems.len());
    let mut failures = 0;
    for thm in theorems {
        let fam = resolve(&thm.family)?;
        let verdict = check_theorem(&fam, thm);
        let mut ok = verdict.is_valid();
        let mut line = format!("{thm} verdict={verdict}");
        if let Some(p_max) = deep {
            match audit_theorem(&fam, thm, p_max) {
                None => {
                    let _ = write!(line, " audit=ok p_max={p_max}");
                }
                Some(p) => {
                    ok = false;
                    let _ = write!(line, " audit=fail p={p}");
                }
            }
        }
        if !ok {
            failures += 1;
        }
        lines.push(line);
    }
    Ok(VerifyReport { lines, failures })
}

/// Hit lines followed by a summary line.
pub fn search_summary(state: &SearchCheckpoint) -> String {
    let mut out = String::new();
    for h in &state.hits {
        let _ = writeln!(
            out,
            "hit p={} digits={} verdict={}",
            h.p, h.digits, h.verdict
        );
    }
    let skipped: Vec<String> = state
        .skipped_by_reason()
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect();
    let hits: Vec<String> = state.hit_indices().iter().map(u64::to_string).collect();
    let _ = writeln!(
        out,
        "summary next_p={} tested={} skipped={} hits={} complete={}",
        state.next_p,
        state.tested(),
        skipped.join(","),
        hits.join(","),
        state.complete
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lucas::SeqParams;
    use crate::period::find_period;
    use crate::theorem::builtin_theorems;

    #[test]
    fn value_line_format() {
        assert_eq!(
            value_line(&FamilySpec::y(), 2).unwrap(),
            "family=Y p=2 digits=3 value=177"
        );
    }

    #[test]
    fn table_layout() {
        let rec = find_period(SeqParams::new(3, 1).unwrap(), 11).unwrap();
        assert_eq!(
            period_table(&rec, 2),
            "n | V_n mod 11\n0 | 2\n1 | 3\n2 | 7\n"
        );
        assert_eq!(period_rows(&rec, 1), "n=0 v=2\nn=1 v=3\n");
    }

    #[test]
    fn verify_counts_failures() {
        let mut thms = builtin_theorems();
        thms[3].class_residue = 4;
        let rep = verify(&thms, FamilySpec::builtin, Some(500)).unwrap();
        assert_eq!(rep.failures, 1);
        assert!(rep.lines[3].contains("verdict=invalid"));
        assert!(rep.render().ends_with("checked=7 failed=1\n"));
    }
}
