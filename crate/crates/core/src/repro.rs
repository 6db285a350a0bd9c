//! Reproducer files: self-contained, replayable SQL with a structured
//! sidecar.
//!
//! Layout: comment header, one semicolon-terminated statement per line,
//! the final (failing) statement annotated with an expected-vs-actual
//! comment, and a single `-- meta:` line holding machine-readable JSON so
//! `replay` and `reduce` need no SQL parsing.

use serde::{Deserialize, Serialize};

use crate::engine::Engine;
use crate::interp::PivotBinding;
use crate::oracle::{check_containment, SynthesizedQuery, Verdict};

use crate::state::{ExpectedErrorSet, StatementTrace};
use crate::value::Value;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReproMeta {
    ContainmentViolation {
        query: SynthesizedQuery,
        binding: PivotBinding,
        like_case_sensitive: bool,
    },
    UnexpectedError {
        error: String,
        statement_kind: String,
    },
    Crash {
        detail: String,
    },
}

#[derive(Debug, Clone)]
pub struct Reproducer {
    /// Statements to replay before the final one, in order.
    pub setup: Vec<String>,
    /// The failing statement.
    pub final_sql: String,
    pub meta: ReproMeta,
}

fn render_expected_row(values: &[Value]) -> String {
    let items: Vec<String> = values.iter().map(Value::render_literal).collect();
    format!("({})", items.join(", "))
}

impl Reproducer {
    /// Serialize to the on-disk format.
    pub fn render(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            out.push_str("-- ");
            out.push_str(h);
            out.push('\n');
        }
        for s in &self.setup {
            out.push_str(s);
            if !s.ends_with(';') {
                out.push(';');
            }
            out.push('\n');
        }
        out.push_str(&self.final_sql);
        if !self.final_sql.ends_with(';') {
            out.push(';');
        }
        match &self.meta {
            ReproMeta::ContainmentViolation { query, .. } => {
                out.push_str(&format!(
                    " -- expected: row {} contained, actual: row is missing",
                    render_expected_row(&query.expected_row)
                ));
            }
            ReproMeta::UnexpectedError { error, .. } => {
                out.push_str(&format!(" -- error: {error}"));
            }
            ReproMeta::Crash { detail } => {
                out.push_str(&format!(" -- crash: {detail}"));
            }
        }
        out.push('\n');
        out.push_str("-- meta: ");
        out.push_str(&serde_json::to_string(&self.meta).expect("meta serializes"));
        out.push('\n');
        out
    }

    /// Parse the on-disk format back.
    pub fn parse(text: &str) -> Result<Reproducer, String> {
        let mut statements: Vec<String> = Vec::new();
        let mut meta: Option<ReproMeta> = None;
        for line in text.lines() {
            let line = line.trim_end();
            if let Some(rest) = line.strip_prefix("-- meta: ") {
                meta = Some(
                    serde_json::from_str(rest).map_err(|e| format!("bad meta line: {e}"))?,
                );
                continue;
            }
            if line.starts_with("--") || line.is_empty() {
                continue;
            }
            // Strip a trailing annotation after the statement terminator.
            let sql = match line.find("; --") {
                Some(idx) => &line[..=idx],
                None => line,
            };
            statements.push(sql.trim_end().to_owned());
        }
        let meta = meta.ok_or("missing -- meta: line")?;
        let final_sql = statements.pop().ok_or("no statements in file")?;
        Ok(Reproducer {
            setup: statements,
            final_sql,
            meta,
        })
    }
}

/// Outcome of replaying a reproducer in this process. Crash findings must
/// be replayed in a supervised subprocess instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayOutcome {
    Reproduces(String),
    DoesNotReproduce(String),
    /// A setup statement failed that originally succeeded.
    Flaky(String),
}

impl ReplayOutcome {
    pub fn reproduces(&self) -> bool {
        matches!(self, ReplayOutcome::Reproduces(_))
    }
}

/// Replay setup plus the final statement on a fresh in-memory database and
/// decide whether the original finding still shows.
pub fn replay_in_process(repro: &Reproducer) -> ReplayOutcome {
    let engine = match Engine::open_in_memory() {
        Ok(e) => e,
        Err(e) => return ReplayOutcome::Flaky(format!("cannot open engine: {e}")),
    };
    let mut like_cs = false;
    for sql in &repro.setup {
        if let Err(e) = engine.execute(sql, 10_000) {
            return ReplayOutcome::Flaky(format!("setup `{sql}` failed: {e}"));
        }
        if let Some(v) = sql
            .strip_prefix("PRAGMA case_sensitive_like=")
            .and_then(|v| v.strip_suffix(';'))
        {
            like_cs = v == "true" || v == "1";
        }
    }
    match &repro.meta {
        ReproMeta::ContainmentViolation { query, .. } => {
            let _ = like_cs;
            let trace = StatementTrace::default();
            let verdict = check_containment(
                query,
                &engine,
                10_000,
                &ExpectedErrorSet::default(),
                &trace,
            );
            match verdict {
                Verdict::ContainmentViolation { sql, .. } => ReplayOutcome::Reproduces(format!(
                    "expected row still missing from `{sql}`"
                )),
                Verdict::Pass => {
                    ReplayOutcome::DoesNotReproduce("expected row is fetched".to_owned())
                }
                Verdict::Skipped { error, .. } | Verdict::UnexpectedError { error, .. } => {
                    ReplayOutcome::Flaky(format!("query now errors: {error}"))
                }
                Verdict::Crash { .. } => unreachable!(),
            }
        }
        ReproMeta::UnexpectedError { error, .. } => match engine.execute(&repro.final_sql, 10_000)
        {
            Err(e) if e.message.contains(error.as_str()) || error.contains(&e.message) => {
                ReplayOutcome::Reproduces(format!("same error: {e}"))
            }
            Err(e) => ReplayOutcome::DoesNotReproduce(format!("different error: {e}")),
            Ok(()) => ReplayOutcome::DoesNotReproduce("statement now succeeds".to_owned()),
        },
        ReproMeta::Crash { .. } => match engine.execute(&repro.final_sql, 10_000) {
            // If we get here the process survived, so the crash is gone.
            _ => ReplayOutcome::DoesNotReproduce("no crash in this process".to_owned()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_the_format() {
        let meta = ReproMeta::UnexpectedError {
            error: "UNIQUE constraint failed: t0.c0".to_owned(),
            statement_kind: "reindex".to_owned(),
        };
        let r = Reproducer {
            setup: vec![
                "CREATE TABLE t0(c0 UNIQUE);".to_owned(),
                "INSERT INTO t0(c0) VALUES (1);".to_owned(),
            ],
            final_sql: "REINDEX;".to_owned(),
            meta,
        };
        let text = r.render(&["finding: unexpected-error".to_owned()]);
        let parsed = Reproducer::parse(&text).unwrap();
        assert_eq!(parsed.setup, r.setup);
        assert_eq!(parsed.final_sql, "REINDEX;");
        match parsed.meta {
            ReproMeta::UnexpectedError { error, .. } => {
                assert_eq!(error, "UNIQUE constraint failed: t0.c0")
            }
            other => panic!("wrong meta: {other:?}"),
        }
    }

    #[test]
    fn replay_reports_fixed_findings() {
        // A containment "finding" that the current engine does not have:
        // replay must say it does not reproduce.
        let engine_check = Reproducer {
            setup: vec!["CREATE TABLE t0(c0);".into(), "INSERT INTO t0(c0) VALUES (2);".into()],
            final_sql: "SELECT t0.c0 FROM t0 WHERE (t0.c0 = 2);".into(),
            meta: ReproMeta::ContainmentViolation {
                query: SynthesizedQuery {
                    select: crate::ast::SelectStatement {
                        distinct: false,
                        fetch: vec![crate::ast::Expr::column("t0", "c0")],
                        from: vec![("t0".into(), None)],
                        where_clause: Some(crate::ast::Expr::Binary(
                            crate::ast::BinaryOp::Eq,
                            Box::new(crate::ast::Expr::column("t0", "c0")),
                            Box::new(crate::ast::Expr::Literal(Value::Integer(2))),
                        )),
                    },
                    fetch_exprs: vec![crate::ast::Expr::column("t0", "c0")],
                    expected_row: vec![Value::Integer(2)],
                    fetch_collations: vec![crate::value::Collation::Binary],
                    mode: crate::oracle::ContainmentMode::Client,
                },
                binding: PivotBinding::new(),
                like_case_sensitive: false,
            },
        };
        let out = replay_in_process(&engine_check);
        assert_eq!(
            out,
            ReplayOutcome::DoesNotReproduce("expected row is fetched".to_owned())
        );
    }
}
