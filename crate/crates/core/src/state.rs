//! Random database state generation: CREATE TABLE plus INSERTs until every
//! table holds at least one row, then a burst of DDL/DML noise, all with
//! per-statement expected-error tolerance. The schema is re-queried from
//! the engine after every DDL statement rather than tracked by hand.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ast::{BinaryOp, ColumnDef, ConflictClause, Expr, IndexPart, Statement};
use crate::engine::Engine;
use crate::gen::{
    generate_expression, random_column_def, random_index_part, random_literal, GenContext,
    Weights,
};
use crate::schema::{refresh_schema, TableInfo};
use crate::value::Value;

/// Error-message substrings tolerated for one statement instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpectedErrorSet {
    substrings: Vec<String>,
}

impl ExpectedErrorSet {
    pub fn new(substrings: Vec<String>) -> Self {
        ExpectedErrorSet { substrings }
    }

    pub fn tolerates(&self, error_text: &str) -> bool {
        self.substrings.iter().any(|s| error_text.contains(s))
    }
}

/// The versioned expected-error table, loaded from `expected_errors.txt`.
#[derive(Debug, Clone)]
pub struct ExpectedErrors {
    entries: Vec<(String, String)>,
}

pub const DEFAULT_EXPECTED_ERRORS: &str = include_str!("../data/expected_errors.txt");

impl ExpectedErrors {
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_EXPECTED_ERRORS).expect("builtin expected-error table parses")
    }

    /// Parse the `<statement-kind>[:<keyword>] <error-substring>` format.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, substring) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| format!("line {}: expected `<kind> <substring>`", no + 1))?;
            entries.push((key.to_owned(), substring.trim().to_owned()));
        }
        Ok(ExpectedErrors { entries })
    }

    fn lookup(&self, key: &str) -> Vec<String> {
        self.entries
            .iter()
            .filter(|(k, _)| k == key)
            .map(|(_, s)| s.clone())
            .collect()
    }

    /// Tolerated substrings for a statement: the keyword-specific lines
    /// when present, otherwise the plain statement-kind lines.
    pub fn for_statement(&self, stmt: &Statement) -> ExpectedErrorSet {
        let kind = stmt.kind();
        if let Some(keyword) = statement_keyword(stmt) {
            let keyed = self.lookup(&format!("{kind}:{keyword}"));
            if !keyed.is_empty() {
                return ExpectedErrorSet::new(keyed);
            }
        }
        ExpectedErrorSet::new(self.lookup(kind))
    }

    /// Tolerated substrings for a statement kind given as a bare label
    /// (used when replaying raw SQL text).
    pub fn for_kind(&self, kind: &str) -> ExpectedErrorSet {
        ExpectedErrorSet::new(self.lookup(kind))
    }
}

fn statement_keyword(stmt: &Statement) -> Option<&'static str> {
    let conflict = match stmt {
        Statement::Insert { conflict, .. } | Statement::Update { conflict, .. } => conflict,
        _ => return None,
    };
    match conflict {
        ConflictClause::Abort => None,
        ConflictClause::Ignore => Some("or-ignore"),
        ConflictClause::Replace => Some("or-replace"),
    }
}

/// Outcome of one issued statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatementOutcome {
    Ok,
    ExpectedError(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub sql: String,
    pub outcome: StatementOutcome,
}

/// Ordered record of every statement issued against a database, including
/// the ones that failed with tolerated errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatementTrace {
    pub entries: Vec<TraceEntry>,
}

impl StatementTrace {
    pub fn push_ok(&mut self, sql: String) {
        self.entries.push(TraceEntry {
            sql,
            outcome: StatementOutcome::Ok,
        });
    }

    pub fn push_expected_error(&mut self, sql: String, error: String) {
        self.entries.push(TraceEntry {
            sql,
            outcome: StatementOutcome::ExpectedError(error),
        });
    }

    /// The statements that executed successfully, in order; replaying
    /// them on a fresh database reproduces the same state.
    pub fn ok_statements(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().filter_map(|e| match e.outcome {
            StatementOutcome::Ok => Some(e.sql.as_str()),
            _ => None,
        })
    }
}

/// Statement that failed outside its expected-error set; the error
/// oracle turns this into a verdict.
#[derive(Debug, Clone, thiserror::Error)]
#[error("unexpected engine error for `{sql}`: {error}")]
pub struct UnexpectedStatementError {
    pub sql: String,
    pub error: String,
    pub kind: &'static str,
}

#[derive(Debug, Clone)]
pub struct StateGenConfig {
    pub max_tables: u32,
    pub max_columns: u32,
    /// Row budget bounds, inclusive; the per-table budget is drawn
    /// uniformly from this range.
    pub min_rows: u32,
    pub max_rows: u32,
    /// Upper bound on extra DDL/DML noise statements.
    pub max_extra_statements: u32,
    pub timeout_ms: u64,
}

impl Default for StateGenConfig {
    fn default() -> Self {
        StateGenConfig {
            max_tables: 3,
            max_columns: 5,
            min_rows: 10,
            max_rows: 30,
            max_extra_statements: 10,
            timeout_ms: 5_000,
        }
    }
}

/// Database state after generation: the trace and the bits of engine
/// session state the interpreter must mirror.
#[derive(Debug, Clone, Default)]
pub struct GeneratedState {
    pub trace: StatementTrace,
    pub like_case_sensitive: bool,
}

/// Fresh-name counters for tables, columns, and indexes.
#[derive(Debug, Default)]
pub struct NameCounter {
    table: u32,
    column: u32,
    index: u32,
}

impl NameCounter {
    pub fn table(&mut self) -> String {
        let n = self.table;
        self.table += 1;
        format!("t{n}")
    }
    pub fn column(&mut self) -> String {
        let n = self.column;
        self.column += 1;
        format!("c{n}")
    }
    pub fn index(&mut self) -> String {
        let n = self.index;
        self.index += 1;
        format!("i{n}")
    }
}

pub struct StateGenerator<'a> {
    pub engine: &'a Engine,
    pub rng: &'a mut ChaCha8Rng,
    pub config: &'a StateGenConfig,
    pub expected: &'a ExpectedErrors,
    pub weights: &'a Weights,
    pub names: NameCounter,
}

impl<'a> StateGenerator<'a> {
    pub fn new(
        engine: &'a Engine,
        rng: &'a mut ChaCha8Rng,
        config: &'a StateGenConfig,
        expected: &'a ExpectedErrors,
        weights: &'a Weights,
    ) -> Self {
        StateGenerator {
            engine,
            rng,
            config,
            expected,
            weights,
            names: NameCounter::default(),
        }
    }

    /// Issue one statement. Tolerated failures are recorded in the trace;
    /// anything else is an error-oracle finding.
    fn issue(
        &mut self,
        stmt: &Statement,
        state: &mut GeneratedState,
    ) -> Result<bool, UnexpectedStatementError> {
        let sql = stmt.render();
        match self.engine.execute(&sql, self.config.timeout_ms) {
            Ok(()) => {
                if let Statement::Pragma { name, value } = stmt {
                    if name == "case_sensitive_like" {
                        state.like_case_sensitive = value == "true" || value == "1";
                    }
                }
                state.trace.push_ok(sql);
                Ok(true)
            }
            Err(e) => {
                let expected = self.expected.for_statement(stmt);
                if crate::oracle::is_always_bug(&e.message) || !expected.tolerates(&e.message) {
                    return Err(UnexpectedStatementError {
                        sql,
                        error: e.message,
                        kind: stmt.kind(),
                    });
                }
                state.trace.push_expected_error(sql, e.message);
                Ok(false)
            }
        }
    }

    /// Step 1 of a round: build a random database. Returns the trace and
    /// the session flags. The engine connection is expected to be fresh.
    pub fn generate_database(&mut self) -> Result<GeneratedState, UnexpectedStatementError> {
        let mut state = GeneratedState::default();

        let ntables = self.rng.gen_range(1..=self.config.max_tables.max(1));
        for _ in 0..ntables {
            let stmt = self.random_create_table();
            self.issue(&stmt, &mut state)?;
        }

        let mut schema = self.snapshot()?;
        for table in schema.clone() {
            self.insert_rows(&table, &mut state)?;
        }

        let extra = self.rng.gen_range(0..=self.config.max_extra_statements);
        for _ in 0..extra {
            schema = self.snapshot()?;
            if let Some(stmt) = self.random_noise_statement(&schema) {
                let is_ddl = matches!(
                    stmt,
                    Statement::AlterRenameTable { .. }
                        | Statement::AlterRenameColumn { .. }
                        | Statement::AlterAddColumn { .. }
                        | Statement::CreateIndex { .. }
                );
                self.issue(&stmt, &mut state)?;
                if is_ddl {
                    schema = self.snapshot()?;
                }
            }
        }

        // The pivot guarantee: DML noise may have emptied a table.
        schema = self.snapshot()?;
        for table in schema {
            if table.row_count_estimate == 0 {
                self.insert_rows(&table, &mut state)?;
            }
        }
        Ok(state)
    }

    fn snapshot(&self) -> Result<Vec<TableInfo>, UnexpectedStatementError> {
        refresh_schema(self.engine).map_err(|e| UnexpectedStatementError {
            sql: "<schema introspection>".to_owned(),
            error: e.message,
            kind: "select",
        })
    }

    fn random_create_table(&mut self) -> Statement {
        let name = self.names.table();
        let ncols = self.rng.gen_range(1..=self.config.max_columns.max(1));
        let mut columns: Vec<ColumnDef> = (0..ncols)
            .map(|_| {
                let col = self.names.column();
                random_column_def(self.rng, &col)
            })
            .collect();

        // At most one PRIMARY KEY declaration, column- or table-level.
        let mut table_pk = None;
        match self.rng.gen_range(0..4) {
            0 => {
                let i = self.rng.gen_range(0..columns.len());
                columns[i].primary_key = true;
            }
            1 => {
                let mut cols: Vec<String> = columns.iter().map(|c| c.name.clone()).collect();
                for i in (1..cols.len()).rev() {
                    let j = self.rng.gen_range(0..=i);
                    cols.swap(i, j);
                }
                cols.truncate(self.rng.gen_range(1..=cols.len()));
                table_pk = Some(cols);
            }
            _ => {}
        }
        let has_pk = table_pk.is_some() || columns.iter().any(|c| c.primary_key);
        let without_rowid = has_pk && self.rng.gen_bool(0.3);
        Statement::CreateTable {
            name,
            columns,
            table_pk,
            without_rowid,
        }
    }

    /// Fill one table with up to a sampled row budget, tolerating
    /// constraint failures, and guaranteeing at least one stored row.
    pub fn insert_rows(
        &mut self,
        table: &TableInfo,
        state: &mut GeneratedState,
    ) -> Result<(), UnexpectedStatementError> {
        let budget = self
            .rng
            .gen_range(self.config.min_rows.max(1)..=self.config.max_rows.max(1));
        let target = self.rng.gen_range(1..=budget);
        let mut attempts = 0u32;
        while attempts < budget * 3 {
            attempts += 1;
            let count = self.row_count(&table.name)?;
            if count >= target as u64 {
                break;
            }
            let stmt = self.random_insert(table);
            self.issue(&stmt, state)?;
        }
        // At least one row, even if every random attempt above collided.
        let mut guard = 0;
        while self.row_count(&table.name)? == 0 {
            let stmt = self.random_insert(table);
            self.issue(&stmt, state)?;
            guard += 1;
            if guard > 50 {
                return Err(UnexpectedStatementError {
                    sql: format!("<populate {}>", table.name),
                    error: "could not satisfy the at-least-one-row guarantee".to_owned(),
                    kind: "insert",
                });
            }
        }
        Ok(())
    }

    fn row_count(&self, table: &str) -> Result<u64, UnexpectedStatementError> {
        match self
            .engine
            .query_row(&format!("SELECT COUNT(*) FROM {table}"))
        {
            Ok(row) => match row.first() {
                Some(Value::Integer(n)) => Ok(*n as u64),
                _ => Ok(0),
            },
            Err(e) => Err(UnexpectedStatementError {
                sql: format!("SELECT COUNT(*) FROM {table}"),
                error: e.message,
                kind: "select",
            }),
        }
    }

    fn random_insert(&mut self, table: &TableInfo) -> Statement {
        let conflict = match self.rng.gen_range(0..10) {
            0..=6 => ConflictClause::Abort,
            7 | 8 => ConflictClause::Ignore,
            _ => ConflictClause::Replace,
        };
        let mut columns: Vec<String> = table.columns.iter().map(|c| c.name.clone()).collect();
        if columns.len() > 1 && self.rng.gen_bool(0.3) {
            for i in (1..columns.len()).rev() {
                let j = self.rng.gen_range(0..=i);
                columns.swap(i, j);
            }
            let keep = self.rng.gen_range(1..=columns.len());
            columns.truncate(keep);
        }
        let nrows = self.rng.gen_range(1..=4);
        let rows = (0..nrows)
            .map(|_| (0..columns.len()).map(|_| random_literal(self.rng)).collect())
            .collect();
        Statement::Insert {
            table: table.name.clone(),
            conflict,
            columns,
            rows,
        }
    }

    fn random_noise_statement(&mut self, schema: &[TableInfo]) -> Option<Statement> {
        if schema.is_empty() {
            return None;
        }
        let table = &schema[self.rng.gen_range(0..schema.len())];
        // Low-CPU statements get a reduced draw.
        let choice = self.rng.gen_range(0..100);
        Some(match choice {
            0..=19 => self.random_insert(table),
            20..=39 => self.random_update(schema, table),
            40..=49 => self.random_delete(schema, table),
            50..=69 => self.random_create_index(schema, table),
            70..=79 => self.random_pragma(),
            80..=89 => self.random_alter(schema, table),
            90..=93 => Statement::Vacuum,
            94..=97 => Statement::Analyze,
            _ => Statement::Reindex,
        })
    }

    fn shallow_expr(&mut self, schema: &[TableInfo], table: &TableInfo) -> Expr {
        let solo = std::slice::from_ref(table);
        let _ = schema;
        let mut ctx = GenContext {
            tables: solo,
            rng: self.rng,
            max_depth: 2,
            weights: self.weights,
        };
        generate_expression(&mut ctx, 0)
    }

    fn random_update(&mut self, schema: &[TableInfo], table: &TableInfo) -> Statement {
        let conflict = match self.rng.gen_range(0..10) {
            0..=6 => ConflictClause::Abort,
            7 | 8 => ConflictClause::Ignore,
            _ => ConflictClause::Replace,
        };
        let nsets = self.rng.gen_range(1..=table.columns.len().max(1));
        let mut cols: Vec<&str> = table.columns.iter().map(|c| c.name.as_str()).collect();
        for i in (1..cols.len()).rev() {
            let j = self.rng.gen_range(0..=i);
            cols.swap(i, j);
        }
        let sets = cols
            .into_iter()
            .take(nsets)
            .map(|c| {
                let e = if self.rng.gen_bool(0.6) {
                    Expr::Literal(random_literal(self.rng))
                } else {
                    self.shallow_expr(schema, table)
                };
                (c.to_owned(), e)
            })
            .collect();
        Statement::Update {
            table: table.name.clone(),
            conflict,
            sets,
            where_clause: self.maybe_where(schema, table),
        }
    }

    fn maybe_where(&mut self, schema: &[TableInfo], table: &TableInfo) -> Option<Expr> {
        if self.rng.gen_bool(0.7) {
            Some(self.shallow_expr(schema, table))
        } else {
            None
        }
    }

    fn random_delete(&mut self, schema: &[TableInfo], table: &TableInfo) -> Statement {
        Statement::Delete {
            table: table.name.clone(),
            where_clause: self.maybe_where(schema, table),
        }
    }

    fn random_create_index(&mut self, schema: &[TableInfo], table: &TableInfo) -> Statement {
        let nparts = self.rng.gen_range(1..=2);
        let parts: Vec<IndexPart> = (0..nparts)
            .map(|_| {
                let mut ctx = GenContext {
                    tables: schema,
                    rng: self.rng,
                    max_depth: 2,
                    weights: self.weights,
                };
                random_index_part(&mut ctx, table)
            })
            .collect();
        let where_clause = if self.rng.gen_bool(0.4) {
            // Partial index predicate over this table only.
            Some(match self.rng.gen_range(0..3) {
                0 => {
                    let c = &table.columns[self.rng.gen_range(0..table.columns.len())];
                    Expr::NullTest {
                        expr: Box::new(Expr::column(&table.name, &c.name)),
                        negated: true,
                    }
                }
                1 => {
                    let c = &table.columns[self.rng.gen_range(0..table.columns.len())];
                    Expr::Binary(
                        BinaryOp::IsNot,
                        Box::new(Expr::column(&table.name, &c.name)),
                        Box::new(Expr::Literal(random_literal(self.rng))),
                    )
                }
                _ => self.shallow_expr(schema, table),
            })
        } else {
            None
        };
        // Index expressions must not carry table qualifiers.
        let parts = parts
            .into_iter()
            .map(|mut p| {
                strip_qualifiers(&mut p.expr);
                p
            })
            .collect();
        let where_clause = where_clause.map(|mut w| {
            strip_qualifiers(&mut w);
            w
        });
        Statement::CreateIndex {
            name: self.names.index(),
            table: table.name.clone(),
            unique: self.rng.gen_bool(0.3),
            parts,
            where_clause,
        }
    }

    fn random_pragma(&mut self) -> Statement {
        let (name, value) = match self.rng.gen_range(0..5) {
            0 => (
                "case_sensitive_like",
                if self.rng.gen_bool(0.5) { "true" } else { "false" },
            ),
            1 => (
                "reverse_unordered_selects",
                if self.rng.gen_bool(0.5) { "true" } else { "false" },
            ),
            2 => (
                "legacy_file_format",
                if self.rng.gen_bool(0.5) { "true" } else { "false" },
            ),
            3 => (
                "automatic_index",
                if self.rng.gen_bool(0.5) { "true" } else { "false" },
            ),
            _ => ("cache_size", if self.rng.gen_bool(0.5) { "100" } else { "-2000" }),
        };
        Statement::Pragma {
            name: name.to_owned(),
            value: value.to_owned(),
        }
    }

    fn random_alter(&mut self, schema: &[TableInfo], table: &TableInfo) -> Statement {
        let _ = schema;
        match self.rng.gen_range(0..3) {
            0 => Statement::AlterRenameTable {
                table: table.name.clone(),
                new_name: self.names.table(),
            },
            1 => {
                let c = &table.columns[self.rng.gen_range(0..table.columns.len())];
                Statement::AlterRenameColumn {
                    table: table.name.clone(),
                    column: c.name.clone(),
                    new_name: self.names.column(),
                }
            }
            _ => {
                let name = self.names.column();
                let mut def = random_column_def(self.rng, &name);
                // ADD COLUMN restrictions: no PRIMARY KEY, no UNIQUE, and
                // NOT NULL would need a default.
                def.primary_key = false;
                def.unique = false;
                def.not_null = false;
                Statement::AlterAddColumn {
                    table: table.name.clone(),
                    def,
                }
            }
        }
    }
}

/// Rewrite `t.c` column references to bare `c` (CREATE INDEX bodies must
/// not qualify columns of the indexed table).
fn strip_qualifiers(e: &mut Expr) {
    if let Expr::Column(r) = e {
        r.table = String::new();
    }
    match e {
        Expr::Literal(_) | Expr::Column(_) => {}
        Expr::Unary(_, x) | Expr::Cast { expr: x, .. } | Expr::Collate(x, _) => {
            strip_qualifiers(x)
        }
        Expr::NullTest { expr, .. } => strip_qualifiers(expr),
        Expr::Binary(_, l, r) => {
            strip_qualifiers(l);
            strip_qualifiers(r);
        }
        Expr::Between {
            subject, lo, hi, ..
        } => {
            strip_qualifiers(subject);
            strip_qualifiers(lo);
            strip_qualifiers(hi);
        }
        Expr::InList { subject, items, .. } => {
            strip_qualifiers(subject);
            for i in items {
                strip_qualifiers(i);
            }
        }
        Expr::Case {
            branches,
            otherwise,
        } => {
            for (c, v) in branches {
                strip_qualifiers(c);
                strip_qualifiers(v);
            }
            if let Some(o) = otherwise {
                strip_qualifiers(o);
            }
        }
        Expr::Func(_, args) => {
            for a in args {
                strip_qualifiers(a);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn expected_error_sets_key_on_modifiers() {
        let table = ExpectedErrors::builtin();
        let plain = Statement::Insert {
            table: "t0".into(),
            conflict: ConflictClause::Abort,
            columns: vec!["c0".into()],
            rows: vec![vec![Value::Integer(1)]],
        };
        let set = table.for_statement(&plain);
        assert!(set.tolerates("UNIQUE constraint failed: t0.c0"));

        let ignore = Statement::Insert {
            table: "t0".into(),
            conflict: ConflictClause::Ignore,
            columns: vec!["c0".into()],
            rows: vec![vec![Value::Integer(1)]],
        };
        let set = table.for_statement(&ignore);
        assert!(!set.tolerates("UNIQUE constraint failed: t0.c0"));
        assert!(set.tolerates("datatype mismatch"));
    }

    #[test]
    fn generates_state_with_rows_everywhere() {
        let expected = ExpectedErrors::builtin();
        let config = StateGenConfig::default();
        let weights = Weights::uniform();
        for seed in 0..30u64 {
            let engine = Engine::open_in_memory().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sg = StateGenerator::new(&engine, &mut rng, &config, &expected, &weights);
            let state = sg.generate_database().unwrap_or_else(|e| {
                panic!("seed {seed}: unexpected engine error: {e}");
            });
            assert!(!state.trace.entries.is_empty());
            let schema = refresh_schema(&engine).unwrap();
            assert!(!schema.is_empty());
            for t in &schema {
                assert!(
                    t.row_count_estimate >= 1,
                    "seed {seed}: table {} is empty",
                    t.name
                );
                assert!(t.row_count_estimate <= config.max_rows as u64 * 4);
            }
        }
    }

    #[test]
    fn replaying_ok_statements_reproduces_contents() {
        let expected = ExpectedErrors::builtin();
        let config = StateGenConfig::default();
        let weights = Weights::uniform();
        for seed in 100..110u64 {
            let engine = Engine::open_in_memory().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sg = StateGenerator::new(&engine, &mut rng, &config, &expected, &weights);
            let state = match sg.generate_database() {
                Ok(s) => s,
                Err(e) => panic!("seed {seed}: {e}"),
            };

            let replica = Engine::open_in_memory().unwrap();
            for sql in state.trace.ok_statements() {
                replica.execute(sql, 0).unwrap_or_else(|e| {
                    panic!("seed {seed}: replay failed on `{sql}`: {e}");
                });
            }
            for t in refresh_schema(&engine).unwrap() {
                let sql = format!("SELECT * FROM {}", t.name);
                let mut a = engine.query_rows(&sql, 0).unwrap();
                let mut b = replica.query_rows(&sql, 0).unwrap();
                let key = |r: &Vec<Value>| format!("{r:?}");
                a.sort_by_key(key);
                b.sort_by_key(key);
                assert_eq!(a, b, "seed {seed}: contents diverge for {}", t.name);
            }
        }
    }
}
