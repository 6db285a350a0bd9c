//! Thin wrapper around the embedded engine: statement execution, row
//! extraction into [`Value`]s, and a wall-clock query timeout.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Instant;

use rusqlite::types::ValueRef;
use rusqlite::Connection;

use crate::value::Value;

/// Error text reported by the engine for a failed statement.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{message}")]
pub struct EngineError {
    pub message: String,
}

impl EngineError {
    /// True when the statement was aborted by the query timeout.
    pub fn is_interrupt(&self) -> bool {
        self.message.contains("interrupted")
    }
}

/// One connection to the engine under test.
pub struct Engine {
    conn: Connection,
    started: Instant,
    /// Deadline in micros since `started`; 0 disables the timeout.
    deadline_us: Arc<AtomicU64>,
}

impl Engine {
    pub fn open_in_memory() -> Result<Engine, EngineError> {
        Connection::open_in_memory()
            .map_err(to_engine_error)
            .map(Engine::new)
    }

    pub fn open_file(path: &std::path::Path) -> Result<Engine, EngineError> {
        Connection::open(path)
            .map_err(to_engine_error)
            .map(Engine::new)
    }

    fn new(conn: Connection) -> Engine {
        let engine = Engine {
            conn,
            started: Instant::now(),
            deadline_us: Arc::new(AtomicU64::new(0)),
        };
        let deadline = Arc::clone(&engine.deadline_us);
        let started = engine.started;
        let _ = engine.conn.progress_handler(
            4000,
            Some(move || {
                let d = deadline.load(Ordering::Relaxed);
                d != 0 && started.elapsed().as_micros() as u64 > d
            }),
        );
        engine
    }

    /// Version string of the engine under test.
    pub fn version() -> &'static str {
        rusqlite::version()
    }

    fn arm_deadline(&self, timeout_ms: u64) {
        if timeout_ms > 0 {
            let d = self.started.elapsed().as_micros() as u64 + timeout_ms * 1000;
            self.deadline_us.store(d, Ordering::Relaxed);
        } else {
            self.deadline_us.store(0, Ordering::Relaxed);
        }
    }

    /// Run one statement, discarding any rows it returns.
    pub fn execute(&self, sql: &str, timeout_ms: u64) -> Result<(), EngineError> {
        self.arm_deadline(timeout_ms);
        let r = self.run(sql, false).map(|_| ());
        self.deadline_us.store(0, Ordering::Relaxed);
        r
    }

    /// Run one statement and collect every returned row.
    pub fn query_rows(&self, sql: &str, timeout_ms: u64) -> Result<Vec<Vec<Value>>, EngineError> {
        self.arm_deadline(timeout_ms);
        let r = self.run(sql, true);
        self.deadline_us.store(0, Ordering::Relaxed);
        r
    }

    /// Run a statement that must return exactly one row.
    pub fn query_row(&self, sql: &str) -> Result<Vec<Value>, EngineError> {
        let rows = self.query_rows(sql, 0)?;
        match rows.len() {
            1 => Ok(rows.into_iter().next().unwrap()),
            n => Err(EngineError {
                message: format!("expected 1 row from `{sql}`, got {n}"),
            }),
        }
    }

    fn run(&self, sql: &str, collect: bool) -> Result<Vec<Vec<Value>>, EngineError> {
        let mut stmt = self.conn.prepare(sql).map_err(to_engine_error)?;
        let ncol = stmt.column_count();
        let mut out = Vec::new();
        let mut rows = stmt.raw_query();
        loop {
            match rows.next() {
                Ok(Some(row)) => {
                    if collect {
                        let mut vals = Vec::with_capacity(ncol);
                        for i in 0..ncol {
                            vals.push(from_ref(row.get_ref(i).map_err(to_engine_error)?));
                        }
                        out.push(vals);
                    }
                }
                Ok(None) => break,
                Err(e) => return Err(to_engine_error(e)),
            }
        }
        Ok(out)
    }
}

fn from_ref(v: ValueRef<'_>) -> Value {
    match v {
        ValueRef::Null => Value::Null,
        ValueRef::Integer(i) => Value::Integer(i),
        ValueRef::Real(r) => Value::real(r),
        ValueRef::Text(t) => Value::Text(t.to_vec()),
        ValueRef::Blob(b) => Value::Blob(b.to_vec()),
    }
}

fn to_engine_error(e: rusqlite::Error) -> EngineError {
    let message = match &e {
        rusqlite::Error::SqliteFailure(err, Some(msg)) => {
            let _ = err;
            msg.clone()
        }
        other => other.to_string(),
    };
    EngineError { message }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn executes_and_queries() {
        let e = Engine::open_in_memory().unwrap();
        e.execute("CREATE TABLE t0(c0)", 0).unwrap();
        e.execute("INSERT INTO t0(c0) VALUES (1), (NULL)", 0).unwrap();
        let rows = e.query_rows("SELECT c0 FROM t0", 0).unwrap();
        assert_eq!(rows, vec![vec![Value::Integer(1)], vec![Value::Null]]);
    }

    #[test]
    fn reports_error_text() {
        let e = Engine::open_in_memory().unwrap();
        e.execute("CREATE TABLE t0(c0 UNIQUE)", 0).unwrap();
        e.execute("INSERT INTO t0(c0) VALUES (1)", 0).unwrap();
        let err = e.execute("INSERT INTO t0(c0) VALUES (1)", 0).unwrap_err();
        assert!(err.message.contains("UNIQUE constraint failed"), "{err}");
    }

    #[test]
    fn timeout_interrupts() {
        let e = Engine::open_in_memory().unwrap();
        e.execute("CREATE TABLE t0(c0)", 0).unwrap();
        e.execute(
            "INSERT INTO t0(c0) VALUES (1),(2),(3),(4),(5),(6),(7),(8),(9),(10)",
            0,
        )
        .unwrap();
        // A 6-way cross join over 10 rows spins long enough to trip a 10ms deadline.
        let err = e
            .query_rows(
                "SELECT count(*) FROM t0 a, t0 b, t0 c, t0 d, t0 e, t0 f, t0 g",
                10,
            )
            .unwrap_err();
        assert!(err.is_interrupt(), "{err}");
    }
}
