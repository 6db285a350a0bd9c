//! Random expression synthesis: seeded, weighted, schema-driven AST
//! generation with a bounded depth. Leaves are literals or column
//! references; inner levels draw from every registered node kind.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::ast::{BinaryOp, ColumnDef, Expr, Function, IndexPart, UnaryOp};
use crate::schema::TableInfo;
use crate::value::{Collation, Value};

const BINARY_OPS: &[BinaryOp] = &[
    BinaryOp::Eq,
    BinaryOp::Ne,
    BinaryOp::Lt,
    BinaryOp::Le,
    BinaryOp::Gt,
    BinaryOp::Ge,
    BinaryOp::Is,
    BinaryOp::IsNot,
    BinaryOp::And,
    BinaryOp::Or,
    BinaryOp::Add,
    BinaryOp::Sub,
    BinaryOp::Mul,
    BinaryOp::Div,
    BinaryOp::Rem,
    BinaryOp::Concat,
    BinaryOp::BitAnd,
    BinaryOp::BitOr,
    BinaryOp::Shl,
    BinaryOp::Shr,
    BinaryOp::Like,
    BinaryOp::Glob,
];

const UNARY_OPS: &[UnaryOp] = &[UnaryOp::Not, UnaryOp::Neg, UnaryOp::Plus, UnaryOp::BitNot];

const FUNCTIONS: &[Function] = &[
    Function::Abs,
    Function::Length,
    Function::Lower,
    Function::Upper,
    Function::IfNull,
    Function::Min2,
    Function::Max2,
    Function::TypeOf,
    Function::Hex,
];

const CAST_TYPES: &[&str] = &[
    "INT",
    "INTEGER",
    "TEXT",
    "REAL",
    "NUMERIC",
    "BLOB",
    "VARCHAR(10)",
    "DOUBLE",
    "FLOAT",
    "BOOLEAN",
    "CLOB",
];

const COLLATIONS: &[Collation] = &[Collation::Binary, Collation::NoCase, Collation::Rtrim];

/// Text literals draw from a charset rich in pattern metacharacters and
/// numeric shapes, while staying single-line and semicolon-free so
/// reproducer files stay line-parseable.
const TEXT_CHARSET: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 \t.%_*?[]^'\"+-=eE/";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeKind {
    Literal,
    Column,
    Unary,
    Binary,
    Between,
    In,
    Case,
    Cast,
    Collate,
    NullTest,
    Function,
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Literal => "literal",
            NodeKind::Column => "column",
            NodeKind::Unary => "unary",
            NodeKind::Binary => "binary",
            NodeKind::Between => "between",
            NodeKind::In => "in",
            NodeKind::Case => "case",
            NodeKind::Cast => "cast",
            NodeKind::Collate => "collate",
            NodeKind::NullTest => "nulltest",
            NodeKind::Function => "function",
        }
    }

    const ALL: &'static [NodeKind] = &[
        NodeKind::Literal,
        NodeKind::Column,
        NodeKind::Unary,
        NodeKind::Binary,
        NodeKind::Between,
        NodeKind::In,
        NodeKind::Case,
        NodeKind::Cast,
        NodeKind::Collate,
        NodeKind::NullTest,
        NodeKind::Function,
    ];
}

/// Weight table for node kinds and individual operators. Keys:
/// `kind.<name>`, `binop.<SYMBOLIC-NAME>`, `unop.<name>`, `func.<name>`.
/// Unlisted entries default to 1.0.
#[derive(Debug, Clone, Default)]
pub struct Weights {
    entries: BTreeMap<String, f64>,
}

impl Weights {
    pub fn uniform() -> Weights {
        Weights::default()
    }

    pub fn set(&mut self, key: &str, w: f64) {
        self.entries.insert(key.to_owned(), w.max(0.0));
    }

    pub fn get(&self, key: &str) -> f64 {
        self.entries.get(key).copied().unwrap_or(1.0)
    }

    /// Parse the simple `key=value` text format, one entry per line.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Weights, String> {
        let mut w = Weights::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, val) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", no + 1))?;
            let parsed: f64 = val
                .trim()
                .parse()
                .map_err(|_| format!("line {}: bad weight {val:?}", no + 1))?;
            if !parsed.is_finite() || parsed < 0.0 {
                return Err(format!("line {}: weight must be finite and >= 0", no + 1));
            }
            w.set(key.trim(), parsed);
        }
        Ok(w)
    }
}

/// Everything expression generation needs: the schema snapshot, a seeded
/// PRNG, the depth bound, and the weight table.
pub struct GenContext<'a> {
    pub tables: &'a [TableInfo],
    pub rng: &'a mut ChaCha8Rng,
    pub max_depth: u32,
    pub weights: &'a Weights,
}

impl<'a> GenContext<'a> {
    pub fn new(tables: &'a [TableInfo], rng: &'a mut ChaCha8Rng, weights: &'a Weights) -> Self {
        GenContext {
            tables,
            rng,
            max_depth: 3,
            weights,
        }
    }

    fn has_columns(&self) -> bool {
        self.tables.iter().any(|t| !t.columns.is_empty())
    }
}

fn pick_weighted<'t, T>(rng: &mut ChaCha8Rng, items: &'t [T], weight: impl Fn(&T) -> f64) -> &'t T {
    let total: f64 = items.iter().map(&weight).sum();
    if total <= 0.0 {
        return &items[rng.gen_range(0..items.len())];
    }
    let mut x = rng.gen_range(0.0..total);
    for item in items {
        let w = weight(item);
        if x < w {
            return item;
        }
        x -= w;
    }
    items.last().unwrap()
}

/// Generate a random expression. At `depth == max_depth` only leaves are
/// produced; above that, any registered node kind.
pub fn generate_expression(ctx: &mut GenContext, depth: u32) -> Expr {
    debug_assert!(depth <= ctx.max_depth);
    let leaf_only = depth >= ctx.max_depth;
    let kinds: Vec<NodeKind> = if leaf_only {
        vec![NodeKind::Literal, NodeKind::Column]
    } else {
        NodeKind::ALL.to_vec()
    };
    let kinds: Vec<NodeKind> = if ctx.has_columns() {
        kinds
    } else {
        kinds.into_iter().filter(|k| *k != NodeKind::Column).collect()
    };

    let weights = ctx.weights;
    let kind = *pick_weighted(ctx.rng, &kinds, |k| {
        weights.get(&format!("kind.{}", k.name()))
    });
    match kind {
        NodeKind::Literal => Expr::Literal(random_literal(ctx.rng)),
        NodeKind::Column => {
            let with_cols: Vec<&TableInfo> =
                ctx.tables.iter().filter(|t| !t.columns.is_empty()).collect();
            let t = with_cols[ctx.rng.gen_range(0..with_cols.len())];
            let c = &t.columns[ctx.rng.gen_range(0..t.columns.len())];
            Expr::column(&t.name, &c.name)
        }
        NodeKind::Unary => {
            let op = *pick_weighted(ctx.rng, UNARY_OPS, |o| {
                weights.get(&format!("unop.{}", unop_key(*o)))
            });
            Expr::Unary(op, Box::new(generate_expression(ctx, depth + 1)))
        }
        NodeKind::Binary => {
            let op = *pick_weighted(ctx.rng, BINARY_OPS, |o| {
                weights.get(&format!("binop.{}", binop_key(*o)))
            });
            Expr::Binary(
                op,
                Box::new(generate_expression(ctx, depth + 1)),
                Box::new(generate_expression(ctx, depth + 1)),
            )
        }
        NodeKind::Between => Expr::Between {
            subject: Box::new(generate_expression(ctx, depth + 1)),
            lo: Box::new(generate_expression(ctx, depth + 1)),
            hi: Box::new(generate_expression(ctx, depth + 1)),
            negated: ctx.rng.gen_bool(0.5),
        },
        NodeKind::In => {
            let n = *pick_weighted(ctx.rng, &[0usize, 1, 2, 3], |n| match n {
                0 => 0.1,
                _ => 1.0,
            });
            Expr::InList {
                subject: Box::new(generate_expression(ctx, depth + 1)),
                items: (0..n).map(|_| generate_expression(ctx, depth + 1)).collect(),
                negated: ctx.rng.gen_bool(0.5),
            }
        }
        NodeKind::Case => {
            let n = ctx.rng.gen_range(1..=2);
            Expr::Case {
                branches: (0..n)
                    .map(|_| {
                        (
                            generate_expression(ctx, depth + 1),
                            generate_expression(ctx, depth + 1),
                        )
                    })
                    .collect(),
                otherwise: if ctx.rng.gen_bool(0.5) {
                    Some(Box::new(generate_expression(ctx, depth + 1)))
                } else {
                    None
                },
            }
        }
        NodeKind::Cast => Expr::Cast {
            expr: Box::new(generate_expression(ctx, depth + 1)),
            type_name: CAST_TYPES[ctx.rng.gen_range(0..CAST_TYPES.len())].to_owned(),
        },
        NodeKind::Collate => Expr::Collate(
            Box::new(generate_expression(ctx, depth + 1)),
            COLLATIONS[ctx.rng.gen_range(0..COLLATIONS.len())],
        ),
        NodeKind::NullTest => Expr::NullTest {
            expr: Box::new(generate_expression(ctx, depth + 1)),
            negated: ctx.rng.gen_bool(0.5),
        },
        NodeKind::Function => {
            let f = *pick_weighted(ctx.rng, FUNCTIONS, |f| {
                weights.get(&format!("func.{}", f.name().to_ascii_lowercase()))
            });
            Expr::Func(
                f,
                (0..f.arity())
                    .map(|_| generate_expression(ctx, depth + 1))
                    .collect(),
            )
        }
    }
}

fn binop_key(op: BinaryOp) -> &'static str {
    match op {
        BinaryOp::Eq => "eq",
        BinaryOp::Ne => "ne",
        BinaryOp::Lt => "lt",
        BinaryOp::Le => "le",
        BinaryOp::Gt => "gt",
        BinaryOp::Ge => "ge",
        BinaryOp::Is => "is",
        BinaryOp::IsNot => "isnot",
        BinaryOp::And => "and",
        BinaryOp::Or => "or",
        BinaryOp::Add => "add",
        BinaryOp::Sub => "sub",
        BinaryOp::Mul => "mul",
        BinaryOp::Div => "div",
        BinaryOp::Rem => "rem",
        BinaryOp::Concat => "concat",
        BinaryOp::BitAnd => "bitand",
        BinaryOp::BitOr => "bitor",
        BinaryOp::Shl => "shl",
        BinaryOp::Shr => "shr",
        BinaryOp::Like => "like",
        BinaryOp::Glob => "glob",
    }
}

fn unop_key(op: UnaryOp) -> &'static str {
    match op {
        UnaryOp::Not => "not",
        UnaryOp::Neg => "neg",
        UnaryOp::Plus => "plus",
        UnaryOp::BitNot => "bitnot",
    }
}

/// Special values get half the draws; the rest are uniform 64-bit
/// integers and finite doubles. Boundary integers stay prominent because
/// magnitude-dependent bugs are a known engine weak spot.
pub fn random_literal(rng: &mut ChaCha8Rng) -> Value {
    if rng.gen_bool(0.5) {
        match rng.gen_range(0..14) {
            0 => Value::Null,
            1 => Value::Integer(0),
            2 => Value::Integer(1),
            3 => Value::Integer(-1),
            4 => Value::Integer(i64::MAX),
            5 => Value::Integer(i64::MIN),
            6 => Value::Real(0.0),
            7 => Value::Real(-0.0),
            8 => Value::text(""),
            9 => Value::text(" "),
            10 => Value::text("123"),
            11 => Value::text("-2.5e3"),
            12 => Value::text("9223372036854775808"),
            13 => Value::Blob(Vec::new()),
            _ => unreachable!(),
        }
    } else {
        match rng.gen_range(0..4) {
            0 => Value::Integer(rng.gen()),
            1 => {
                // finite doubles only; NaN is not a value and infinities
                // have no literal form
                loop {
                    let r = f64::from_bits(rng.gen());
                    if r.is_finite() {
                        break Value::Real(r);
                    }
                }
            }
            2 => {
                let n = rng.gen_range(0..=8);
                Value::Text(
                    (0..n)
                        .map(|_| TEXT_CHARSET[rng.gen_range(0..TEXT_CHARSET.len())])
                        .collect(),
                )
            }
            3 => {
                let n = rng.gen_range(0..=8);
                Value::Blob((0..n).map(|_| rng.gen()).collect())
            }
            _ => unreachable!(),
        }
    }
}

/// Random column definition for CREATE TABLE / ADD COLUMN.
pub fn random_column_def(rng: &mut ChaCha8Rng, name: &str) -> ColumnDef {
    const DECL_TYPES: &[Option<&str>] = &[
        None,
        None,
        Some("INT"),
        Some("INTEGER"),
        Some("TEXT"),
        Some("REAL"),
        Some("NUMERIC"),
        Some("BLOB"),
        Some("VARCHAR(10)"),
        Some("DOUBLE"),
        Some("BOOLEAN"),
    ];
    ColumnDef {
        name: name.to_owned(),
        decl_type: DECL_TYPES[rng.gen_range(0..DECL_TYPES.len())].map(str::to_owned),
        collation: match rng.gen_range(0..6) {
            0 => Some(Collation::NoCase),
            1 => Some(Collation::Rtrim),
            2 => Some(Collation::Binary),
            _ => None,
        },
        primary_key: false,
        unique: rng.gen_bool(0.2),
        not_null: rng.gen_bool(0.15),
    }
}

/// Random indexed column or expression over one table.
pub fn random_index_part(ctx: &mut GenContext, table: &TableInfo) -> IndexPart {
    let expr = if ctx.rng.gen_bool(0.7) && !table.columns.is_empty() {
        let c = &table.columns[ctx.rng.gen_range(0..table.columns.len())];
        Expr::column(&table.name, &c.name)
    } else {
        // Expression index over just this table's columns.
        let solo = std::slice::from_ref(table);
        let mut sub = GenContext {
            tables: solo,
            rng: ctx.rng,
            max_depth: 2,
            weights: ctx.weights,
        };
        generate_expression(&mut sub, 1)
    };
    IndexPart {
        expr,
        collation: match ctx.rng.gen_range(0..6) {
            0 => Some(Collation::NoCase),
            1 => Some(Collation::Rtrim),
            _ => None,
        },
        descending: ctx.rng.gen_bool(0.3),
    }
}
