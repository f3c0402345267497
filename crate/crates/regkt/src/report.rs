//! Verification reports: verdicts, replayable certificates, and the
//! deterministic text and structured renderings shared by the test battery
//! and the command-line front end.
//!
//! A [`Report`] is the outcome of one verification suite run.  Its
//! certificates embed the exact data the suite checked — words in the
//! round-trippable [`crate::Word`] grammar, integer vectors, matrices — so
//! every verdict can be replayed from the report alone.  Rendering is
//! deterministic: reports are merged by sorting on suite name, and the
//! `timing` field is fixed to zero so that identical inputs and seeds
//! produce byte-identical structured output.

use serde::Serialize;

/// Format version line carried by every structured document and fixture
/// file this crate reads or writes.
pub const FORMAT_LINE: &str = "regkt-format 1";

/// Outcome of a verification suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Verdict {
    /// Every check in the suite succeeded.
    Pass,
    /// At least one check failed; the certificates name the failure.
    Fail,
    /// The suite did not run to a verdict; never counted as a pass.
    Skipped {
        /// Why the suite could not run (unmet hypothesis, cap, scope).
        reason: String,
    },
}

impl Verdict {
    /// Whether this verdict is a failure.
    #[must_use]
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail)
    }

    /// Whether this verdict is a pass.
    #[must_use]
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "Pass"),
            Verdict::Fail => write!(f, "Fail"),
            Verdict::Skipped { reason } => write!(f, "Skipped ({reason})"),
        }
    }
}

/// One replayable piece of evidence inside a report.
///
/// `data` holds the payload lines: words in the [`crate::Word`] grammar,
/// whitespace-separated integer vectors, or labelled scalars.  The `kind`
/// tag says how to interpret them (`words`, `vector`, `matrix`, `value`,
/// `note`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// What this certificate witnesses, e.g. `basis-words` or `failing-word`.
    pub label: String,
    /// Payload interpretation tag.
    pub kind: String,
    /// Payload lines.
    pub data: Vec<String>,
}

impl Certificate {
    /// A certificate holding replayable words.
    #[must_use]
    pub fn words<I, W>(label: &str, words: I) -> Certificate
    where
        I: IntoIterator<Item = W>,
        W: std::fmt::Display,
    {
        Certificate {
            label: label.to_string(),
            kind: "words".to_string(),
            data: words.into_iter().map(|w| w.to_string()).collect(),
        }
    }

    /// A certificate holding one labelled value.
    #[must_use]
    pub fn value(label: &str, value: impl std::fmt::Display) -> Certificate {
        Certificate {
            label: label.to_string(),
            kind: "value".to_string(),
            data: vec![value.to_string()],
        }
    }

    /// A certificate holding integer rows (one whitespace-separated line
    /// per row).
    #[must_use]
    pub fn matrix<R, E>(label: &str, rows: R) -> Certificate
    where
        R: IntoIterator,
        R::Item: IntoIterator<Item = E>,
        E: std::fmt::Display,
    {
        Certificate {
            label: label.to_string(),
            kind: "matrix".to_string(),
            data: rows
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect(),
        }
    }

    /// A free-form explanatory certificate.
    #[must_use]
    pub fn note(label: &str, text: impl Into<String>) -> Certificate {
        Certificate {
            label: label.to_string(),
            kind: "note".to_string(),
            data: vec![text.into()],
        }
    }
}

/// The outcome of one verification suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    /// Suite name, unique within a run (e.g. `lemma2[c4]`).
    pub name: String,
    /// Verdict of the suite.
    pub verdict: Verdict,
    /// Replayable evidence.
    pub certificates: Vec<Certificate>,
    /// Seed all sampling in the suite flowed from.
    pub seed: u64,
    /// Reserved timing slot; fixed to zero so structured reports are
    /// byte-identical across runs with identical inputs and seed.
    pub timing: u64,
}

impl Report {
    /// A passing report.
    #[must_use]
    pub fn pass(name: &str, seed: u64) -> Report {
        Report {
            name: name.to_string(),
            verdict: Verdict::Pass,
            certificates: Vec::new(),
            seed,
            timing: 0,
        }
    }

    /// A failing report.
    #[must_use]
    pub fn fail(name: &str, seed: u64) -> Report {
        Report {
            name: name.to_string(),
            verdict: Verdict::Fail,
            certificates: Vec::new(),
            seed,
            timing: 0,
        }
    }

    /// A skipped report with its reason.
    #[must_use]
    pub fn skipped(name: &str, seed: u64, reason: impl Into<String>) -> Report {
        Report {
            name: name.to_string(),
            verdict: Verdict::Skipped {
                reason: reason.into(),
            },
            certificates: Vec::new(),
            seed,
            timing: 0,
        }
    }

    /// Appends a certificate, builder style.
    #[must_use]
    pub fn with(mut self, cert: Certificate) -> Report {
        self.certificates.push(cert);
        self
    }

    /// Appends a certificate in place.
    pub fn push(&mut self, cert: Certificate) {
        self.certificates.push(cert);
    }

    /// Renders the report as deterministic line-oriented text.
    #[must_use]
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "suite {} verdict={} seed={}\n",
            self.name, self.verdict, self.seed
        ));
        for cert in &self.certificates {
            out.push_str(&format!("  cert {} kind={}\n", cert.label, cert.kind));
            for line in &cert.data {
                out.push_str(&format!("    {line}\n"));
            }
        }
        out
    }
}

/// Merges suite reports deterministically: sorted by suite name, with ties
/// (which a well-formed run never produces) kept in submission order.
#[must_use]
pub fn merge_reports(mut reports: Vec<Report>) -> Vec<Report> {
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    reports
}

/// Whether a merged run is free of failures (skips are not failures, but
/// they are never promoted to passes either).
#[must_use]
pub fn all_clear(reports: &[Report]) -> bool {
    reports.iter().all(|r| !r.verdict.is_fail())
}

/// Renders a whole run as line-oriented text: a format line, one block per
/// suite, and a final tally.
#[must_use]
pub fn render_run_text(reports: &[Report]) -> String {
    let mut out = String::new();
    out.push_str(FORMAT_LINE);
    out.push('\n');
    let mut pass = 0usize;
    let mut fail = 0usize;
    let mut skip = 0usize;
    for r in reports {
        out.push_str(&r.render_text());
        match r.verdict {
            Verdict::Pass => pass += 1,
            Verdict::Fail => fail += 1,
            Verdict::Skipped { .. } => skip += 1,
        }
    }
    out.push_str(&format!("total pass={pass} fail={fail} skipped={skip}\n"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_is_deterministic_and_sorted() {
        let reports = vec![
            Report::pass("b-suite", 1),
            Report::fail("a-suite", 1),
            Report::skipped("c-suite", 1, "out of scope"),
        ];
        let merged = merge_reports(reports);
        let names: Vec<&str> = merged.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["a-suite", "b-suite", "c-suite"]);
        assert!(!all_clear(&merged));
        let merged = merge_reports(vec![Report::pass("x", 0), Report::skipped("y", 0, "n/a")]);
        assert!(all_clear(&merged));
    }

    #[test]
    fn text_rendering_is_line_oriented() {
        let r = Report::pass("lemma2[c4]", 7)
            .with(Certificate::value("basis-count", 9))
            .with(Certificate::words("basis-words", ["g0:1 g0:2 g0:3'"]));
        let text = r.render_text();
        assert!(text.starts_with("suite lemma2[c4] verdict=Pass seed=7\n"));
        assert!(text.contains("  cert basis-count kind=value\n    9\n"));
        assert!(text.contains("  cert basis-words kind=words\n    g0:1 g0:2 g0:3'\n"));
        let run = render_run_text(&[r]);
        assert!(run.starts_with("regkt-format 1\n"));
        assert!(run.ends_with("total pass=1 fail=0 skipped=0\n"));
    }

    #[test]
    fn structured_form_serializes_stably() {
        let r = Report::skipped("hopf[a5]", 3, "no presentation file");
        let json = serde_json::to_string(&r).expect("serializable");
        assert!(json.contains("\"kind\":\"skipped\""));
        assert!(json.contains("\"reason\":\"no presentation file\""));
        assert!(json.contains("\"timing\":0"));
    }
}
