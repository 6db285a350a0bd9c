//! The two test oracles: containment (a synthesized query must fetch the
//! pivot row or the expected expression values) and error classification
//! (engine errors outside a statement's expected list are findings).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ast::{Expr, SelectStatement};
use crate::engine::Engine;
use crate::gen::{generate_expression, GenContext, Weights};
use crate::interp::{evaluate, BoundColumn, EvalContext, Fault, PivotBinding};
use crate::rectify::rectify;
use crate::schema::TableInfo;
use crate::state::{ExpectedErrorSet, StatementTrace};
use crate::value::{mem_compare, Collation, Value};

/// Corruption indicators that override every expected-error list.
const ALWAYS_BUG: &[&str] = &["malformed", "database disk image"];

/// True when an engine error message signals corruption and must be
/// reported no matter which statement produced it.
pub fn is_always_bug(error_text: &str) -> bool {
    ALWAYS_BUG.iter().any(|s| error_text.contains(s))
}

/// How containment is checked: CLIENT compares fetched rows in process,
/// INTERSECT wraps the query in the engine's own set operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContainmentMode {
    Client,
    Intersect,
}

/// Outcome of one oracle round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    /// Expected error (or watchdog timeout); the round is discarded.
    Skipped { sql: String, error: String },
    ContainmentViolation {
        sql: String,
        expected: Vec<Value>,
        fetched_rows: usize,
        trace: StatementTrace,
    },
    UnexpectedError {
        sql: String,
        error: String,
        trace: StatementTrace,
    },
    Crash {
        detail: String,
        trace: StatementTrace,
    },
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Skipped { .. } => "skipped",
            Verdict::ContainmentViolation { .. } => "containment-violation",
            Verdict::UnexpectedError { .. } => "unexpected-error",
            Verdict::Crash { .. } => "crash",
        }
    }

    /// Findings produce reproducers and flip the campaign exit code.
    pub fn is_finding(&self) -> bool {
        matches!(
            self,
            Verdict::ContainmentViolation { .. }
                | Verdict::UnexpectedError { .. }
                | Verdict::Crash { .. }
        )
    }
}

/// Classify an engine error against a statement's expected set. The
/// corruption deny-list always wins.
pub fn classify_error(
    sql: &str,
    error_text: &str,
    expected: &ExpectedErrorSet,
    trace: &StatementTrace,
) -> Verdict {
    if !is_always_bug(error_text) && expected.tolerates(error_text) {
        Verdict::Skipped {
            sql: sql.to_owned(),
            error: error_text.to_owned(),
        }
    } else {
        Verdict::UnexpectedError {
            sql: sql.to_owned(),
            error: error_text.to_owned(),
            trace: trace.clone(),
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum PivotError {
    #[error("table {table} is unexpectedly empty (state generator broke its guarantee)")]
    EmptyTable { table: String },
    #[error("pivot selection failed on `{sql}`: {error}")]
    Engine { sql: String, error: String },
}

/// Select one uniformly random row per table and bind its values with the
/// columns' schema metadata.
pub fn select_pivot(
    tables: &[TableInfo],
    engine: &Engine,
    rng: &mut ChaCha8Rng,
) -> Result<PivotBinding, PivotError> {
    let mut binding = PivotBinding::new();
    for t in tables {
        let count_sql = format!("SELECT COUNT(*) FROM {}", t.name);
        let count = match engine.query_row(&count_sql) {
            Ok(row) => match row.first() {
                Some(Value::Integer(n)) => *n,
                _ => 0,
            },
            Err(e) => {
                return Err(PivotError::Engine {
                    sql: count_sql,
                    error: e.message,
                })
            }
        };
        if count <= 0 {
            return Err(PivotError::EmptyTable {
                table: t.name.clone(),
            });
        }
        let offset = rng.gen_range(0..count);
        let cols: Vec<String> = t.columns.iter().map(|c| c.name.clone()).collect();
        let sql = format!(
            "SELECT {} FROM {} LIMIT 1 OFFSET {}",
            cols.join(", "),
            t.name,
            offset
        );
        let row = engine.query_row(&sql).map_err(|e| PivotError::Engine {
            sql: sql.clone(),
            error: e.message,
        })?;
        for (col, value) in t.columns.iter().zip(row) {
            binding.bind(
                &t.name,
                &col.name,
                BoundColumn {
                    value,
                    affinity: col.affinity,
                    collation: col.collation,
                },
            );
        }
    }
    Ok(binding)
}

/// A query built around the pivot row: every condition evaluates TRUE on
/// the binding and the expected row is the fetch expressions' values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizedQuery {
    pub select: SelectStatement,
    pub fetch_exprs: Vec<Expr>,
    pub expected_row: Vec<Value>,
    /// Collation each fetch expression carries, used for the relaxed
    /// row comparison under DISTINCT.
    pub fetch_collations: Vec<Collation>,
    pub mode: ContainmentMode,
}

#[derive(Debug, Clone, Copy)]
pub struct SynthesisConfig {
    pub max_expr_depth: u32,
    /// Probability that the fetch list is random expressions rather than
    /// the plain column list.
    pub expression_fetch_probability: f64,
    pub distinct_probability: f64,
    pub mode: ContainmentMode,
    pub like_case_sensitive: bool,
    pub fault: Option<Fault>,
    /// Regenerate limit when candidate expressions error out.
    pub max_retries: u32,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            max_expr_depth: 3,
            expression_fetch_probability: 0.5,
            distinct_probability: 0.3,
            mode: ContainmentMode::Client,
            like_case_sensitive: false,
            fault: None,
            max_retries: 10,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("query synthesis gave up after repeated evaluation errors")]
pub struct SynthesisGaveUp;

/// Step 5: build a targeted query guaranteed to fetch the pivot row.
pub fn synthesize_query(
    binding: &PivotBinding,
    tables: &[TableInfo],
    rng: &mut ChaCha8Rng,
    weights: &Weights,
    config: &SynthesisConfig,
) -> Result<SynthesizedQuery, SynthesisGaveUp> {
    let ctx = EvalContext {
        binding,
        like_case_sensitive: config.like_case_sensitive,
        fault: config.fault,
    };

    let mut rectified = |rng: &mut ChaCha8Rng,
                         allowed: &[TableInfo]|
     -> Result<Expr, SynthesisGaveUp> {
        for _ in 0..config.max_retries.max(1) {
            let mut gctx = GenContext {
                tables: allowed,
                rng,
                max_depth: config.max_expr_depth,
                weights,
            };
            let e = generate_expression(&mut gctx, 0);
            match rectify(e, &ctx) {
                Ok(r) => return Ok(r),
                Err(_) => continue,
            }
        }
        Err(SynthesisGaveUp)
    };

    // FROM: all pivot tables; each join step may carry a rectified ON
    // condition over the tables joined so far.
    let mut from: Vec<(String, Option<Expr>)> = Vec::new();
    for (i, t) in tables.iter().enumerate() {
        let on = if i > 0 && rng.gen_bool(0.5) {
            Some(rectified(rng, &tables[..=i])?)
        } else {
            None
        };
        from.push((t.name.clone(), on));
    }

    let nconds = match rng.gen_range(0..10) {
        0 => 0,
        1..=6 => 1,
        _ => 2,
    };
    let mut where_clause: Option<Expr> = None;
    for _ in 0..nconds {
        let cond = rectified(rng, tables)?;
        where_clause = Some(match where_clause {
            None => cond,
            Some(prev) => Expr::Binary(
                crate::ast::BinaryOp::And,
                Box::new(prev),
                Box::new(cond),
            ),
        });
    }

    // Fetch list: plain column references, or random expressions whose
    // expected values come from the interpreter.
    let mut fetch_exprs: Vec<Expr> = Vec::new();
    if rng.gen_bool(config.expression_fetch_probability) {
        let n = rng.gen_range(1..=3);
        'outer: for _ in 0..n {
            for _ in 0..config.max_retries.max(1) {
                let mut gctx = GenContext {
                    tables,
                    rng,
                    max_depth: config.max_expr_depth,
                    weights,
                };
                let e = generate_expression(&mut gctx, 0);
                if evaluate(&e, &ctx).is_ok() {
                    fetch_exprs.push(e);
                    continue 'outer;
                }
            }
            return Err(SynthesisGaveUp);
        }
    } else {
        for t in tables {
            for c in &t.columns {
                fetch_exprs.push(Expr::column(&t.name, &c.name));
            }
        }
    }

    let expected_row: Vec<Value> = fetch_exprs
        .iter()
        .map(|e| evaluate(e, &ctx).expect("fetch expressions were vetted"))
        .collect();
    let fetch_collations: Vec<Collation> = fetch_exprs
        .iter()
        .map(|e| crate::interp::expr_collation(e, binding).unwrap_or(Collation::Binary))
        .collect();

    let distinct = rng.gen_bool(config.distinct_probability);
    Ok(SynthesizedQuery {
        select: SelectStatement {
            distinct,
            fetch: fetch_exprs.clone(),
            from,
            where_clause,
        },
        fetch_exprs,
        expected_row,
        fetch_collations,
        mode: config.mode,
    })
}

/// Steps 6 and 7: run the query and check that the expected row is in the
/// result set.
pub fn check_containment(
    query: &SynthesizedQuery,
    engine: &Engine,
    timeout_ms: u64,
    select_expected: &ExpectedErrorSet,
    trace: &StatementTrace,
) -> Verdict {
    match query.mode {
        ContainmentMode::Client => {
            let sql = query.select.render();
            let rows = match engine.query_rows(&sql, timeout_ms) {
                Ok(rows) => rows,
                Err(e) => return classify_error(&sql, &e.message, select_expected, trace),
            };
            let found = rows.iter().any(|row| row_matches(query, row));
            if found {
                Verdict::Pass
            } else {
                Verdict::ContainmentViolation {
                    sql,
                    expected: query.expected_row.clone(),
                    fetched_rows: rows.len(),
                    trace: trace.clone(),
                }
            }
        }
        ContainmentMode::Intersect => {
            let literals: Vec<String> = query
                .expected_row
                .iter()
                .map(Value::render_literal)
                .collect();
            let sql = format!(
                "SELECT {} INTERSECT {}",
                literals.join(", "),
                query.select.render()
            );
            let rows = match engine.query_rows(&sql, timeout_ms) {
                Ok(rows) => rows,
                Err(e) => return classify_error(&sql, &e.message, select_expected, trace),
            };
            if rows.is_empty() {
                Verdict::ContainmentViolation {
                    sql,
                    expected: query.expected_row.clone(),
                    fetched_rows: 0,
                    trace: trace.clone(),
                }
            } else {
                Verdict::Pass
            }
        }
    }
}

/// Row comparison for CLIENT containment: strict value identity, except
/// under DISTINCT where the engine may have merged rows that compare
/// equal, so the match relaxes to collation-aware SQL equality with NULLs
/// equal to each other.
fn row_matches(query: &SynthesizedQuery, row: &[Value]) -> bool {
    if row.len() != query.expected_row.len() {
        return false;
    }
    if query.select.distinct {
        row.iter()
            .zip(&query.expected_row)
            .zip(&query.fetch_collations)
            .all(|((got, want), coll)| {
                mem_compare(got, want, *coll) == std::cmp::Ordering::Equal
            })
    } else {
        row.iter()
            .zip(&query.expected_row)
            .all(|(got, want)| got.identical(want))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::ExpectedErrors;

    #[test]
    fn corruption_overrides_expected_sets() {
        let table = ExpectedErrors::builtin();
        let set = table.for_kind("select");
        let trace = StatementTrace::default();
        let v = classify_error("SELECT 1", "database disk image is malformed", &set, &trace);
        assert!(matches!(v, Verdict::UnexpectedError { .. }));

        let v = classify_error("SELECT 1", "interrupted", &set, &trace);
        assert!(matches!(v, Verdict::Skipped { .. }));

        let empty = ExpectedErrorSet::default();
        let v = classify_error("REINDEX;", "UNIQUE constraint failed: t0.c0", &empty, &trace);
        assert!(matches!(v, Verdict::UnexpectedError { .. }));
    }
}
