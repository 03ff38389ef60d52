//! Verdict bookkeeping for the acceptance target in `tests/acceptance.rs`.

use std::time::Instant;

pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, detail: String) -> Self {
        Verdict { pass, detail }
    }

    pub fn error(e: impl std::fmt::Display) -> Self {
        Verdict::new(false, format!("error: {e}"))
    }
}

/// Criteria picked by `KVQA_ACCEPTANCE=1,4,5`; all ten when unset or empty.
pub fn selection() -> Vec<usize> {
    parse_selection(std::env::var("KVQA_ACCEPTANCE").ok().as_deref())
}

fn parse_selection(raw: Option<&str>) -> Vec<usize> {
    match raw {
        Some(s) if !s.trim().is_empty() => {
            s.split(',').filter_map(|t| t.trim().parse().ok()).collect()
        }
        _ => (1..=10).collect(),
    }
}

#[derive(Default)]
pub struct Report {
    verdicts: Vec<(usize, Verdict)>,
}

impl Report {
    pub fn push(&mut self, n: usize, v: Verdict) {
        self.verdicts.push((n, v));
    }

    /// Runs `f`, logs its wall time to stderr and records the verdict.
    pub fn timed(&mut self, n: usize, f: impl FnOnce() -> Verdict) {
        let start = Instant::now();
        let v = f();
        eprintln!(
            "  [criterion {n} finished in {:.0} s]",
            start.elapsed().as_secs_f64()
        );
        self.push(n, v);
    }

    /// One `criterion N: PASS|FAIL detail` line per selected criterion, in
    /// order. Returns whether every line passed.
    pub fn lines(&mut self, wanted: &[usize]) -> (Vec<String>, bool) {
        self.verdicts.retain(|(n, _)| wanted.contains(n));
        self.verdicts.sort_by_key(|(n, _)| *n);
        let lines = self
            .verdicts
            .iter()
            .map(|(n, v)| {
                format!(
                    "criterion {n}: {} {}",
                    if v.pass { "PASS" } else { "FAIL" },
                    v.detail
                )
            })
            .collect();
        (lines, self.verdicts.iter().all(|(_, v)| v.pass))
    }
}
