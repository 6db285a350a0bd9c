//! Immutable expression and statement ASTs with deterministic rendering
//! to SQL text.
//!
//! Rendering parenthesizes every composite node so the output never
//! depends on operator-precedence assumptions, and renders literals in
//! engine-accepted syntax (single-quoted text with quote doubling, blobs
//! as X'..' hex). Re-rendering the same tree is byte-identical.

use serde::{Deserialize, Serialize};

use crate::value::{Collation, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnaryOp {
    Not,
    Neg,
    Plus,
    BitNot,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Not => "NOT",
            UnaryOp::Neg => "-",
            UnaryOp::Plus => "+",
            UnaryOp::BitNot => "~",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinaryOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Is,
    IsNot,
    And,
    Or,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Concat,
    BitAnd,
    BitOr,
    Shl,
    Shr,
    Like,
    Glob,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Is => "IS",
            BinaryOp::IsNot => "IS NOT",
            BinaryOp::And => "AND",
            BinaryOp::Or => "OR",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Concat => "||",
            BinaryOp::BitAnd => "&",
            BinaryOp::BitOr => "|",
            BinaryOp::Shl => "<<",
            BinaryOp::Shr => ">>",
            BinaryOp::Like => "LIKE",
            BinaryOp::Glob => "GLOB",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Eq
                | BinaryOp::Ne
                | BinaryOp::Lt
                | BinaryOp::Le
                | BinaryOp::Gt
                | BinaryOp::Ge
                | BinaryOp::Is
                | BinaryOp::IsNot
        )
    }
}

/// Built-in scalar functions the generator may emit. `Min2`/`Max2` are the
/// two-argument scalar forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Function {
    Abs,
    Length,
    Lower,
    Upper,
    IfNull,
    Min2,
    Max2,
    TypeOf,
    Hex,
}

impl Function {
    pub fn name(self) -> &'static str {
        match self {
            Function::Abs => "ABS",
            Function::Length => "LENGTH",
            Function::Lower => "LOWER",
            Function::Upper => "UPPER",
            Function::IfNull => "IFNULL",
            Function::Min2 => "MIN",
            Function::Max2 => "MAX",
            Function::TypeOf => "TYPEOF",
            Function::Hex => "HEX",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Function::IfNull | Function::Min2 | Function::Max2 => 2,
            _ => 1,
        }
    }
}

/// A qualified column reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnRef {
    pub table: String,
    pub column: String,
}

/// Random expression tree over literals, column references, and operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Literal(Value),
    Column(ColumnRef),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Between {
        subject: Box<Expr>,
        lo: Box<Expr>,
        hi: Box<Expr>,
        negated: bool,
    },
    InList {
        subject: Box<Expr>,
        items: Vec<Expr>,
        negated: bool,
    },
    Case {
        branches: Vec<(Expr, Expr)>,
        otherwise: Option<Box<Expr>>,
    },
    Cast {
        expr: Box<Expr>,
        type_name: String,
    },
    Collate(Box<Expr>, Collation),
    /// IS NULL / IS NOT NULL postfix test.
    NullTest {
        expr: Box<Expr>,
        negated: bool,
    },
    Func(Function, Vec<Expr>),
}

impl Expr {
    pub fn literal(v: Value) -> Expr {
        Expr::Literal(v)
    }

    pub fn column(table: &str, column: &str) -> Expr {
        Expr::Column(ColumnRef {
            table: table.to_owned(),
            column: column.to_owned(),
        })
    }

    pub fn not(self) -> Expr {
        Expr::Unary(UnaryOp::Not, Box::new(self))
    }

    pub fn is_null(self) -> Expr {
        Expr::NullTest {
            expr: Box::new(self),
            negated: false,
        }
    }

    /// Height of the tree, leaves counting as 1.
    pub fn depth(&self) -> usize {
        1 + match self {
            Expr::Literal(_) | Expr::Column(_) => 0,
            Expr::Unary(_, e) | Expr::Cast { expr: e, .. } | Expr::Collate(e, _) => e.depth(),
            Expr::NullTest { expr, .. } => expr.depth(),
            Expr::Binary(_, l, r) => l.depth().max(r.depth()),
            Expr::Between {
                subject, lo, hi, ..
            } => subject.depth().max(lo.depth()).max(hi.depth()),
            Expr::InList { subject, items, .. } => items
                .iter()
                .map(Expr::depth)
                .max()
                .unwrap_or(0)
                .max(subject.depth()),
            Expr::Case {
                branches,
                otherwise,
            } => branches
                .iter()
                .flat_map(|(c, v)| [c.depth(), v.depth()])
                .chain(otherwise.iter().map(|e| e.depth()))
                .max()
                .unwrap_or(0),
            Expr::Func(_, args) => args.iter().map(Expr::depth).max().unwrap_or(0),
        }
    }

    /// Immediate children, in evaluation order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Literal(_) | Expr::Column(_) => vec![],
            Expr::Unary(_, e) | Expr::Cast { expr: e, .. } | Expr::Collate(e, _) => vec![e],
            Expr::NullTest { expr, .. } => vec![expr],
            Expr::Binary(_, l, r) => vec![l, r],
            Expr::Between {
                subject, lo, hi, ..
            } => vec![subject, lo, hi],
            Expr::InList { subject, items, .. } => {
                let mut v: Vec<&Expr> = vec![subject];
                v.extend(items.iter());
                v
            }
            Expr::Case {
                branches,
                otherwise,
            } => {
                let mut v: Vec<&Expr> = Vec::new();
                for (c, val) in branches {
                    v.push(c);
                    v.push(val);
                }
                if let Some(e) = otherwise {
                    v.push(e);
                }
                v
            }
            Expr::Func(_, args) => args.iter().collect(),
        }
    }

    /// Render to SQL text. Deterministic and fully parenthesized.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out);
        out
    }

    fn render_into(&self, out: &mut String) {
        match self {
            Expr::Literal(v) => out.push_str(&v.render_literal()),
            Expr::Column(c) => {
                if !c.table.is_empty() {
                    out.push_str(&c.table);
                    out.push('.');
                }
                out.push_str(&c.column);
            }
            Expr::Unary(op, e) => {
                out.push('(');
                out.push_str(op.symbol());
                // A space keeps "- -1" from forming a comment token.
                out.push(' ');
                e.render_into(out);
                out.push(')');
            }
            Expr::Binary(op, l, r) => {
                out.push('(');
                l.render_into(out);
                out.push(' ');
                out.push_str(op.symbol());
                out.push(' ');
                r.render_into(out);
                out.push(')');
            }
            Expr::Between {
                subject,
                lo,
                hi,
                negated,
            } => {
                out.push('(');
                subject.render_into(out);
                out.push_str(if *negated { " NOT BETWEEN " } else { " BETWEEN " });
                lo.render_into(out);
                out.push_str(" AND ");
                hi.render_into(out);
                out.push(')');
            }
            Expr::InList {
                subject,
                items,
                negated,
            } => {
                out.push('(');
                subject.render_into(out);
                out.push_str(if *negated { " NOT IN (" } else { " IN (" });
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    item.render_into(out);
                }
                out.push_str("))");
            }
            Expr::Case {
                branches,
                otherwise,
            } => {
                out.push_str("(CASE");
                for (cond, val) in branches {
                    out.push_str(" WHEN ");
                    cond.render_into(out);
                    out.push_str(" THEN ");
                    val.render_into(out);
                }
                if let Some(e) = otherwise {
                    out.push_str(" ELSE ");
                    e.render_into(out);
                }
                out.push_str(" END)");
            }
            Expr::Cast { expr, type_name } => {
                out.push_str("CAST(");
                expr.render_into(out);
                out.push_str(" AS ");
                out.push_str(type_name);
                out.push(')');
            }
            Expr::Collate(e, coll) => {
                out.push('(');
                e.render_into(out);
                out.push_str(" COLLATE ");
                out.push_str(coll.name());
                out.push(')');
            }
            Expr::NullTest { expr, negated } => {
                out.push('(');
                expr.render_into(out);
                out.push_str(if *negated { " IS NOT NULL" } else { " IS NULL" });
                out.push(')');
            }
            Expr::Func(f, args) => {
                out.push_str(f.name());
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    a.render_into(out);
                }
                out.push(')');
            }
        }
    }
}

/// Column definition inside CREATE TABLE / ALTER TABLE ADD COLUMN.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnDef {
    pub name: String,
    pub decl_type: Option<String>,
    pub collation: Option<Collation>,
    pub primary_key: bool,
    pub unique: bool,
    pub not_null: bool,
}

impl ColumnDef {
    pub fn untyped(name: &str) -> ColumnDef {
        ColumnDef {
            name: name.to_owned(),
            decl_type: None,
            collation: None,
            primary_key: false,
            unique: false,
            not_null: false,
        }
    }

    fn render(&self, out: &mut String) {
        out.push_str(&self.name);
        if let Some(t) = &self.decl_type {
            out.push(' ');
            out.push_str(t);
        }
        if let Some(c) = self.collation {
            out.push_str(" COLLATE ");
            out.push_str(c.name());
        }
        if self.primary_key {
            out.push_str(" PRIMARY KEY");
        }
        if self.unique {
            out.push_str(" UNIQUE");
        }
        if self.not_null {
            out.push_str(" NOT NULL");
        }
    }
}

/// One column (or expression) of a CREATE INDEX statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexPart {
    pub expr: Expr,
    pub collation: Option<Collation>,
    pub descending: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConflictClause {
    Abort,
    Ignore,
    Replace,
}

impl ConflictClause {
    fn render(self) -> &'static str {
        match self {
            ConflictClause::Abort => "",
            ConflictClause::Ignore => " OR IGNORE",
            ConflictClause::Replace => " OR REPLACE",
        }
    }
}

/// A statement the state generator can issue, with enough structure for
/// deterministic rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Statement {
    CreateTable {
        name: String,
        columns: Vec<ColumnDef>,
        /// Table-level PRIMARY KEY (column names); mutually exclusive with
        /// a column-level PRIMARY KEY flag.
        table_pk: Option<Vec<String>>,
        without_rowid: bool,
    },
    CreateIndex {
        name: String,
        table: String,
        unique: bool,
        parts: Vec<IndexPart>,
        where_clause: Option<Expr>,
    },
    Insert {
        table: String,
        conflict: ConflictClause,
        columns: Vec<String>,
        rows: Vec<Vec<Value>>,
    },
    Update {
        table: String,
        conflict: ConflictClause,
        sets: Vec<(String, Expr)>,
        where_clause: Option<Expr>,
    },
    Delete {
        table: String,
        where_clause: Option<Expr>,
    },
    AlterRenameTable {
        table: String,
        new_name: String,
    },
    AlterRenameColumn {
        table: String,
        column: String,
        new_name: String,
    },
    AlterAddColumn {
        table: String,
        def: ColumnDef,
    },
    Pragma {
        name: String,
        value: String,
    },
    Vacuum,
    Reindex,
    Analyze,
    Select(SelectStatement),
}

/// The synthesized SELECT shape used by the containment oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectStatement {
    pub distinct: bool,
    pub fetch: Vec<Expr>,
    /// FROM tables joined left to right; each entry after the first may
    /// carry an ON condition.
    pub from: Vec<(String, Option<Expr>)>,
    pub where_clause: Option<Expr>,
}

impl SelectStatement {
    pub fn render(&self) -> String {
        let mut out = String::from("SELECT ");
        if self.distinct {
            out.push_str("DISTINCT ");
        }
        for (i, e) in self.fetch.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&e.render());
        }
        if !self.from.is_empty() {
            out.push_str(" FROM ");
            for (i, (table, on)) in self.from.iter().enumerate() {
                if i > 0 {
                    out.push_str(if on.is_some() { " JOIN " } else { ", " });
                }
                out.push_str(table);
                if let Some(cond) = on {
                    out.push_str(" ON ");
                    out.push_str(&cond.render());
                }
            }
        }
        if let Some(w) = &self.where_clause {
            out.push_str(" WHERE ");
            out.push_str(&w.render());
        }
        out
    }
}

impl Statement {
    /// Render to one semicolon-terminated SQL statement.
    pub fn render(&self) -> String {
        let mut out = String::new();
        match self {
            Statement::CreateTable {
                name,
                columns,
                table_pk,
                without_rowid,
            } => {
                out.push_str("CREATE TABLE ");
                out.push_str(name);
                out.push('(');
                for (i, c) in columns.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    c.render(&mut out);
                }
                if let Some(pk) = table_pk {
                    out.push_str(", PRIMARY KEY (");
                    out.push_str(&pk.join(", "));
                    out.push(')');
                }
                out.push(')');
                if *without_rowid {
                    out.push_str(" WITHOUT ROWID");
                }
            }
            Statement::CreateIndex {
                name,
                table,
                unique,
                parts,
                where_clause,
            } => {
                out.push_str("CREATE ");
                if *unique {
                    out.push_str("UNIQUE ");
                }
                out.push_str("INDEX ");
                out.push_str(name);
                out.push_str(" ON ");
                out.push_str(table);
                out.push('(');
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    // Inside an index column list a bare column name must
                    // stay unqualified.
                    match &p.expr {
                        Expr::Column(c) => out.push_str(&c.column),
                        e => out.push_str(&e.render()),
                    }
                    if let Some(c) = p.collation {
                        out.push_str(" COLLATE ");
                        out.push_str(c.name());
                    }
                    if p.descending {
                        out.push_str(" DESC");
                    }
                }
                out.push(')');
                if let Some(w) = where_clause {
                    out.push_str(" WHERE ");
                    out.push_str(&w.render());
                }
            }
            Statement::Insert {
                table,
                conflict,
                columns,
                rows,
            } => {
                out.push_str("INSERT");
                out.push_str(conflict.render());
                out.push_str(" INTO ");
                out.push_str(table);
                out.push('(');
                out.push_str(&columns.join(", "));
                out.push_str(") VALUES ");
                for (i, row) in rows.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push('(');
                    for (j, v) in row.iter().enumerate() {
                        if j > 0 {
                            out.push_str(", ");
                        }
                        out.push_str(&v.render_literal());
                    }
                    out.push(')');
                }
            }
            Statement::Update {
                table,
                conflict,
                sets,
                where_clause,
            } => {
                out.push_str("UPDATE");
                out.push_str(conflict.render());
                out.push(' ');
                out.push_str(table);
                out.push_str(" SET ");
                for (i, (col, e)) in sets.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(col);
                    out.push_str(" = ");
                    out.push_str(&e.render());
                }
                if let Some(w) = where_clause {
                    out.push_str(" WHERE ");
                    out.push_str(&w.render());
                }
            }
            Statement::Delete {
                table,
                where_clause,
            } => {
                out.push_str("DELETE FROM ");
                out.push_str(table);
                if let Some(w) = where_clause {
                    out.push_str(" WHERE ");
                    out.push_str(&w.render());
                }
            }
            Statement::AlterRenameTable { table, new_name } => {
                out.push_str("ALTER TABLE ");
                out.push_str(table);
                out.push_str(" RENAME TO ");
                out.push_str(new_name);
            }
            Statement::AlterRenameColumn {
                table,
                column,
                new_name,
            } => {
                out.push_str("ALTER TABLE ");
                out.push_str(table);
                out.push_str(" RENAME COLUMN ");
                out.push_str(column);
                out.push_str(" TO ");
                out.push_str(new_name);
            }
            Statement::AlterAddColumn { table, def } => {
                out.push_str("ALTER TABLE ");
                out.push_str(table);
                out.push_str(" ADD COLUMN ");
                def.render(&mut out);
            }
            Statement::Pragma { name, value } => {
                out.push_str("PRAGMA ");
                out.push_str(name);
                out.push('=');
                out.push_str(value);
            }
            Statement::Vacuum => out.push_str("VACUUM"),
            Statement::Reindex => out.push_str("REINDEX"),
            Statement::Analyze => out.push_str("ANALYZE"),
            Statement::Select(sel) => out.push_str(&sel.render()),
        }
        out.push(';');
        out
    }

    /// Statement kind label used to key expected-error lists.
    pub fn kind(&self) -> &'static str {
        match self {
            Statement::CreateTable { .. } => "create-table",
            Statement::CreateIndex { .. } => "create-index",
            Statement::Insert { .. } => "insert",
            Statement::Update { .. } => "update",
            Statement::Delete { .. } => "delete",
            Statement::AlterRenameTable { .. }
            | Statement::AlterRenameColumn { .. }
            | Statement::AlterAddColumn { .. } => "alter-table",
            Statement::Pragma { .. } => "pragma",
            Statement::Vacuum => "vacuum",
            Statement::Reindex => "reindex",
            Statement::Analyze => "analyze",
            Statement::Select(_) => "select",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_paper_shapes() {
        let e = Expr::Binary(
            BinaryOp::IsNot,
            Box::new(Expr::column("t0", "c0")),
            Box::new(Expr::Literal(Value::Integer(1))),
        );
        assert_eq!(e.render(), "(t0.c0 IS NOT 1)");

        let x = Expr::column("t0", "c1");
        let nn = x.clone().not().not();
        assert_eq!(nn.render(), "(NOT (NOT t0.c1))");

        assert_eq!(
            Expr::Literal(Value::text("a'b")).render(),
            "'a''b'"
        );
    }

    #[test]
    fn renders_statements() {
        let ct = Statement::CreateTable {
            name: "t0".into(),
            columns: vec![ColumnDef::untyped("c0")],
            table_pk: None,
            without_rowid: false,
        };
        assert_eq!(ct.render(), "CREATE TABLE t0(c0);");

        let ins = Statement::Insert {
            table: "t0".into(),
            conflict: ConflictClause::Abort,
            columns: vec!["c0".into()],
            rows: vec![vec![Value::Integer(0)], vec![Value::Integer(1)]],
        };
        assert_eq!(ins.render(), "INSERT INTO t0(c0) VALUES (0), (1);");

        let pragma = Statement::Pragma {
            name: "case_sensitive_like".into(),
            value: "false".into(),
        };
        assert_eq!(pragma.render(), "PRAGMA case_sensitive_like=false;");
    }

    #[test]
    fn rendering_is_deterministic() {
        let e = Expr::Between {
            subject: Box::new(Expr::column("t0", "c0")),
            lo: Box::new(Expr::Literal(Value::Real(1.5))),
            hi: Box::new(Expr::Literal(Value::text("x"))),
            negated: true,
        };
        assert_eq!(e.render(), e.render());
        assert_eq!(e.render(), "(t0.c0 NOT BETWEEN 1.5 AND 'x')");
    }

    #[test]
    fn negative_literal_inside_unary_keeps_tokens_apart() {
        let e = Expr::Unary(
            UnaryOp::Neg,
            Box::new(Expr::Literal(Value::Integer(i64::MIN))),
        );
        assert_eq!(e.render(), "(- -9223372036854775808)");
    }
}
