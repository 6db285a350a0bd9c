//! Expression evaluation against a pivot binding, modeling the engine's
//! expression semantics exactly: affinity conversions at comparisons,
//! collation resolution, three-valued logic, text/blob numeric coercion,
//! and the engine's own float codec for every text conversion.
//!
//! Integer overflow is surfaced as an error and the candidate expression
//! is discarded by callers; the engine's overflow fallback paths are never
//! exercised because such expressions are never emitted.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ast::{BinaryOp, ColumnRef, Expr, Function, UnaryOp};
use crate::pattern::{pattern_match, GLOB_INFO, LIKE_INFO, LIKE_INFO_CASE};
use crate::value::numeric::Numeric;
use crate::value::{mem_compare, Collation, TriBool, TypeAffinity, Value};

/// A column of the pivot row: the stored value plus the schema properties
/// the evaluator needs for affinity and collation resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundColumn {
    pub value: Value,
    pub affinity: TypeAffinity,
    pub collation: Option<Collation>,
}

/// One chosen row per table: a map from (table, column) to its value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PivotBinding {
    columns: BTreeMap<(String, String), BoundColumn>,
}

impl PivotBinding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, table: &str, column: &str, bound: BoundColumn) {
        self.columns
            .insert((table.to_owned(), column.to_owned()), bound);
    }

    pub fn get(&self, r: &ColumnRef) -> Option<&BoundColumn> {
        self.columns
            .get(&(r.table.clone(), r.column.clone()))
            .or_else(|| self.lookup_slow(r))
    }

    fn lookup_slow(&self, r: &ColumnRef) -> Option<&BoundColumn> {
        self.columns
            .iter()
            .find(|((t, c), _)| t == &r.table && c == &r.column)
            .map(|(_, b)| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &BoundColumn)> {
        self.columns.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

/// Deliberate single-rule mis-implementations for oracle self-testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fault {
    /// Make LIKE case-sensitive regardless of the engine's pragma state.
    LikeCase,
}

impl Fault {
    pub fn from_name(name: &str) -> Option<Fault> {
        match name {
            "like-case" => Some(Fault::LikeCase),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Fault::LikeCase => "like-case",
        }
    }
}

/// Everything evaluation depends on besides the expression itself.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub binding: &'a PivotBinding,
    /// Mirrors PRAGMA case_sensitive_like.
    pub like_case_sensitive: bool,
    pub fault: Option<Fault>,
}

impl<'a> EvalContext<'a> {
    pub fn new(binding: &'a PivotBinding) -> Self {
        EvalContext {
            binding,
            like_case_sensitive: false,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    /// 64-bit exact arithmetic overflowed; the candidate is discarded.
    IntegerOverflow,
    /// A column reference missing from the binding; an internal bug.
    UnboundColumn,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("{kind:?}")]
pub struct EvalError {
    pub kind: EvalErrorKind,
}

impl EvalError {
    fn overflow() -> EvalError {
        EvalError {
            kind: EvalErrorKind::IntegerOverflow,
        }
    }
}

pub type EvalOutcome = Result<Value, EvalError>;

/// Static affinity of an expression (`None` for bare literals and
/// operator results). Explicit COLLATE is transparent; CAST contributes
/// its target affinity; unary `+` strips the affinity of its operand
/// while leaving value and collation alone.
pub fn expr_affinity(e: &Expr, binding: &PivotBinding) -> Option<TypeAffinity> {
    match e {
        Expr::Column(r) => Some(
            binding
                .get(r)
                .map(|b| b.affinity)
                .unwrap_or(TypeAffinity::Blob),
        ),
        Expr::Cast { type_name, .. } => {
            Some(TypeAffinity::from_decl_type(Some(type_name)))
        }
        Expr::Collate(inner, _) => expr_affinity(inner, binding),
        _ => None,
    }
}

fn has_explicit_collate(e: &Expr) -> bool {
    match e {
        Expr::Collate(..) => true,
        _ => e.children().iter().any(|c| has_explicit_collate(c)),
    }
}

/// Collating sequence of an expression, mirroring the engine's resolution
/// walk: explicit COLLATE wins; column references contribute their
/// (possibly default) collation; CAST and unary `+` are transparent;
/// other operators forward only explicit collations from their children.
pub fn expr_collation(e: &Expr, binding: &PivotBinding) -> Option<Collation> {
    match e {
        Expr::Column(r) => Some(
            binding
                .get(r)
                .and_then(|b| b.collation)
                .unwrap_or(Collation::Binary),
        ),
        Expr::Cast { expr, .. } => expr_collation(expr, binding),
        Expr::Unary(UnaryOp::Plus, inner) => expr_collation(inner, binding),
        Expr::Collate(_, c) => Some(*c),
        other if has_explicit_collate(other) => other
            .children()
            .into_iter()
            .find(|c| has_explicit_collate(c))
            .and_then(|c| expr_collation(c, binding)),
        _ => None,
    }
}

/// Collation for a binary comparison: left explicit, right explicit,
/// left implicit, right implicit, BINARY.
fn comparison_collation(l: &Expr, r: &Expr, binding: &PivotBinding) -> Collation {
    if has_explicit_collate(l) {
        expr_collation(l, binding)
    } else if has_explicit_collate(r) {
        expr_collation(r, binding)
    } else {
        expr_collation(l, binding).or_else(|| expr_collation(r, binding))
    }
    .unwrap_or(Collation::Binary)
}

/// Affinity applied to both operands of a comparison.
fn comparison_affinity(
    l: Option<TypeAffinity>,
    r: Option<TypeAffinity>,
) -> Option<TypeAffinity> {
    match (l, r) {
        (Some(a), Some(b)) => {
            if a.is_numeric() || b.is_numeric() {
                Some(TypeAffinity::Numeric)
            } else {
                None
            }
        }
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    }
}

fn apply_cmp_affinity(v: Value, aff: Option<TypeAffinity>) -> Value {
    match aff {
        None | Some(TypeAffinity::Blob) => v,
        Some(a) => v.apply_affinity(a),
    }
}

/// Evaluate an expression against the pivot binding.
pub fn evaluate(e: &Expr, ctx: &EvalContext) -> EvalOutcome {
    match e {
        Expr::Literal(v) => Ok(v.clone()),
        Expr::Column(r) => match ctx.binding.get(r) {
            Some(b) => Ok(b.value.clone()),
            None => Err(EvalError {
                kind: EvalErrorKind::UnboundColumn,
            }),
        },
        Expr::Unary(op, inner) => eval_unary(*op, inner, ctx),
        Expr::Binary(op, l, r) => eval_binary(*op, l, r, ctx),
        Expr::Between {
            subject,
            lo,
            hi,
            negated,
        } => {
            let ge = compare_exprs(BinaryOp::Ge, subject, lo, ctx)?;
            let le = compare_exprs(BinaryOp::Le, subject, hi, ctx)?;
            let mut tri = ge.and(le);
            if *negated {
                tri = tri.negate();
            }
            Ok(tri.into_value())
        }
        Expr::InList {
            subject,
            items,
            negated,
        } => {
            let tri = eval_in_list(subject, items, ctx)?;
            Ok(if *negated { tri.negate() } else { tri }.into_value())
        }
        Expr::Case {
            branches,
            otherwise,
        } => {
            for (cond, val) in branches {
                if evaluate(cond, ctx)?.as_boolean() == TriBool::True {
                    return evaluate(val, ctx);
                }
            }
            match otherwise {
                Some(e) => evaluate(e, ctx),
                None => Ok(Value::Null),
            }
        }
        Expr::Cast { expr, type_name } => {
            let v = evaluate(expr, ctx)?;
            Ok(v.cast_to(TypeAffinity::from_decl_type(Some(type_name))))
        }
        Expr::Collate(inner, _) => evaluate(inner, ctx),
        Expr::NullTest { expr, negated } => {
            let v = evaluate(expr, ctx)?;
            Ok(Value::Integer((v.is_null() != *negated) as i64))
        }
        Expr::Func(f, args) => eval_func(*f, args, ctx),
    }
}

fn eval_unary(op: UnaryOp, inner: &Expr, ctx: &EvalContext) -> EvalOutcome {
    match op {
        UnaryOp::Plus => evaluate(inner, ctx),
        UnaryOp::Not => {
            let v = evaluate(inner, ctx)?;
            Ok(v.as_boolean().negate().into_value())
        }
        UnaryOp::BitNot => {
            let v = evaluate(inner, ctx)?;
            if v.is_null() {
                Ok(Value::Null)
            } else {
                Ok(Value::Integer(!v.int_value()))
            }
        }
        UnaryOp::Neg => {
            // The engine compiles unary minus on a non-literal as 0 - x;
            // on a literal it folds, which is observably the same.
            let v = evaluate(inner, ctx)?;
            arith(BinaryOp::Sub, Value::Integer(0), v)
        }
    }
}

fn eval_binary(op: BinaryOp, l: &Expr, r: &Expr, ctx: &EvalContext) -> EvalOutcome {
    match op {
        BinaryOp::And | BinaryOp::Or => {
            let a = evaluate(l, ctx)?.as_boolean();
            let b = evaluate(r, ctx)?.as_boolean();
            let tri = if op == BinaryOp::And { a.and(b) } else { a.or(b) };
            Ok(tri.into_value())
        }
        BinaryOp::Eq
        | BinaryOp::Ne
        | BinaryOp::Lt
        | BinaryOp::Le
        | BinaryOp::Gt
        | BinaryOp::Ge => Ok(compare_exprs(op, l, r, ctx)?.into_value()),
        BinaryOp::Is | BinaryOp::IsNot => {
            // An empty IN list folds to a TRUE/FALSE keyword during name
            // resolution, and IS with a TRUE/FALSE right operand is the
            // IS TRUE operator family, not an equality.
            if let Some(truth) = truth_keyword(r) {
                let lv = evaluate(l, ctx)?;
                let is_op = op == BinaryOp::Is;
                let res = match lv.as_boolean() {
                    TriBool::Null => !is_op,
                    b => {
                        let b = b == TriBool::True;
                        if is_op {
                            b == truth
                        } else {
                            b != truth
                        }
                    }
                };
                return Ok(Value::Integer(res as i64));
            }
            let lv = evaluate(l, ctx)?;
            let rv = evaluate(r, ctx)?;
            let eq = if lv.is_null() || rv.is_null() {
                lv.is_null() && rv.is_null()
            } else {
                compare_values(l, r, lv, rv, ctx) == Ordering::Equal
            };
            let res = if op == BinaryOp::Is { eq } else { !eq };
            Ok(Value::Integer(res as i64))
        }
        BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => {
            let lv = evaluate(l, ctx)?;
            let rv = evaluate(r, ctx)?;
            arith(op, lv, rv)
        }
        BinaryOp::Concat => {
            let lv = evaluate(l, ctx)?;
            let rv = evaluate(r, ctx)?;
            match (lv.text_bytes(), rv.text_bytes()) {
                (Some(mut a), Some(b)) => {
                    a.extend_from_slice(&b);
                    Ok(Value::Text(a))
                }
                _ => Ok(Value::Null),
            }
        }
        BinaryOp::BitAnd | BinaryOp::BitOr | BinaryOp::Shl | BinaryOp::Shr => {
            let lv = evaluate(l, ctx)?;
            let rv = evaluate(r, ctx)?;
            if lv.is_null() || rv.is_null() {
                return Ok(Value::Null);
            }
            let a = lv.int_value();
            let b = rv.int_value();
            Ok(Value::Integer(match op {
                BinaryOp::BitAnd => a & b,
                BinaryOp::BitOr => a | b,
                _ => shift(a, b, op == BinaryOp::Shl),
            }))
        }
        BinaryOp::Like => {
            let subject = evaluate(l, ctx)?;
            let pattern = evaluate(r, ctx)?;
            let case_sensitive =
                ctx.like_case_sensitive || ctx.fault == Some(Fault::LikeCase);
            Ok(evaluate_like(&subject, &pattern, case_sensitive).into_value())
        }
        BinaryOp::Glob => {
            let subject = evaluate(l, ctx)?;
            let pattern = evaluate(r, ctx)?;
            match (pattern.text_bytes(), subject.text_bytes()) {
                (Some(p), Some(s)) => Ok(TriBool::from_bool(pattern_match(
                    &p,
                    &s,
                    &GLOB_INFO,
                    b'[' as u32,
                ))
                .into_value()),
                _ => Ok(Value::Null),
            }
        }
    }
}

/// The LIKE operator: `%` matches any run, `_` one character,
/// ASCII-case-insensitive unless `case_sensitive`.
pub fn evaluate_like(subject: &Value, pattern: &Value, case_sensitive: bool) -> TriBool {
    match (pattern.text_bytes(), subject.text_bytes()) {
        (Some(p), Some(s)) => {
            let info = if case_sensitive { LIKE_INFO_CASE } else { LIKE_INFO };
            TriBool::from_bool(pattern_match(&p, &s, &info, 0))
        }
        _ => TriBool::Null,
    }
}

/// Three-valued comparison of two expressions with affinity conversion
/// and collation resolution.
fn compare_exprs(
    op: BinaryOp,
    l: &Expr,
    r: &Expr,
    ctx: &EvalContext,
) -> Result<TriBool, EvalError> {
    let lv = evaluate(l, ctx)?;
    let rv = evaluate(r, ctx)?;
    if lv.is_null() || rv.is_null() {
        return Ok(TriBool::Null);
    }
    let ord = compare_values(l, r, lv, rv, ctx);
    Ok(TriBool::from_bool(match op {
        BinaryOp::Eq => ord == Ordering::Equal,
        BinaryOp::Ne => ord != Ordering::Equal,
        BinaryOp::Lt => ord == Ordering::Less,
        BinaryOp::Le => ord != Ordering::Greater,
        BinaryOp::Gt => ord == Ordering::Greater,
        BinaryOp::Ge => ord != Ordering::Less,
        _ => unreachable!("not a comparison: {op:?}"),
    }))
}

fn compare_values(
    l: &Expr,
    r: &Expr,
    lv: Value,
    rv: Value,
    ctx: &EvalContext,
) -> Ordering {
    let aff = comparison_affinity(
        expr_affinity(l, ctx.binding),
        expr_affinity(r, ctx.binding),
    );
    let la = apply_cmp_affinity(lv, aff);
    let ra = apply_cmp_affinity(rv, aff);
    let coll = comparison_collation(l, r, ctx.binding);
    mem_compare(&la, &ra, coll)
}

fn arith(op: BinaryOp, lv: Value, rv: Value) -> EvalOutcome {
    if lv.is_null() || rv.is_null() {
        return Ok(Value::Null);
    }
    let ln = lv.numeric_operand().expect("non-null operand");
    let rn = rv.numeric_operand().expect("non-null operand");
    if let (Numeric::Int(a), Numeric::Int(b)) = (ln, rn) {
        return int_math(op, a, b);
    }
    fp_math(op, &lv, &rv)
}

fn int_math(op: BinaryOp, a: i64, b: i64) -> EvalOutcome {
    let out = match op {
        BinaryOp::Add => a.checked_add(b),
        BinaryOp::Sub => a.checked_sub(b),
        BinaryOp::Mul => a.checked_mul(b),
        BinaryOp::Div => {
            if b == 0 {
                return Ok(Value::Null);
            }
            if b == -1 && a == i64::MIN {
                None
            } else {
                Some(a / b)
            }
        }
        BinaryOp::Rem => {
            if b == 0 {
                return Ok(Value::Null);
            }
            let b = if b == -1 { 1 } else { b };
            Some(a % b)
        }
        _ => unreachable!(),
    };
    match out {
        Some(i) => Ok(Value::Integer(i)),
        // The engine falls back to floats here; this artifact discards the
        // candidate instead of modeling that path.
        None => Err(EvalError::overflow()),
    }
}

fn fp_math(op: BinaryOp, lv: &Value, rv: &Value) -> EvalOutcome {
    let ra = lv.real_value();
    let rb = rv.real_value();
    let out = match op {
        BinaryOp::Add => ra + rb,
        BinaryOp::Sub => ra - rb,
        BinaryOp::Mul => ra * rb,
        BinaryOp::Div => {
            if rb == 0.0 {
                return Ok(Value::Null);
            }
            ra / rb
        }
        BinaryOp::Rem => {
            let ia = lv.int_value();
            let ib = rv.int_value();
            if ib == 0 {
                return Ok(Value::Null);
            }
            let ib = if ib == -1 { 1 } else { ib };
            (ia % ib) as f64
        }
        _ => unreachable!(),
    };
    // NaN results collapse to NULL.
    Ok(Value::real(out))
}

fn shift(a: i64, b: i64, left: bool) -> i64 {
    if b == 0 {
        return a;
    }
    let (amount, left) = if b < 0 {
        (if b > -64 { -b } else { 64 }, !left)
    } else {
        (b, left)
    };
    if amount >= 64 {
        return if a >= 0 || left { 0 } else { -1 };
    }
    let ua = a as u64;
    let res = if left {
        ua << amount
    } else {
        let mut r = ua >> amount;
        if a < 0 {
            r |= u64::MAX << (64 - amount);
        }
        r
    };
    res as i64
}

/// The constant the resolver folds an empty IN list into, looking through
/// COLLATE wrappers the way the engine's skip helper does.
fn truth_keyword(e: &Expr) -> Option<bool> {
    match e {
        Expr::Collate(inner, _) => truth_keyword(inner),
        Expr::InList { items, negated, .. } if items.is_empty() => Some(*negated),
        _ => None,
    }
}

fn eval_in_list(subject: &Expr, items: &[Expr], ctx: &EvalContext) -> Result<TriBool, EvalError> {
    // An empty RHS folds away at resolve time: constant false, with the
    // subject never evaluated at all.
    if items.is_empty() {
        return Ok(TriBool::False);
    }
    if items.len() == 1 {
        // The engine rewrites x IN (y) as x == +y: the element's affinity
        // is stripped but its collation survives.
        let plus = Expr::Unary(UnaryOp::Plus, Box::new(items[0].clone()));
        return compare_exprs(BinaryOp::Eq, subject, &plus, ctx);
    }
    let sv = evaluate(subject, ctx)?;
    let aff = expr_affinity(subject, ctx.binding).filter(|a| *a != TypeAffinity::Blob);
    let coll = expr_collation(subject, ctx.binding).unwrap_or(Collation::Binary);
    let sa = apply_cmp_affinity(sv, aff);
    let mut saw_null = sa.is_null();
    let mut found = false;
    for item in items {
        let iv = evaluate(item, ctx)?;
        if iv.is_null() {
            saw_null = true;
            continue;
        }
        if sa.is_null() {
            continue;
        }
        let ia = apply_cmp_affinity(iv, aff);
        if mem_compare(&sa, &ia, coll) == Ordering::Equal {
            found = true;
        }
    }
    Ok(if found {
        TriBool::True
    } else if saw_null {
        TriBool::Null
    } else {
        TriBool::False
    })
}

fn eval_func(f: Function, args: &[Expr], ctx: &EvalContext) -> EvalOutcome {
    match f {
        Function::Abs => {
            let v = evaluate(&args[0], ctx)?;
            match v {
                Value::Null => Ok(Value::Null),
                Value::Integer(i) => {
                    if i == i64::MIN {
                        Err(EvalError::overflow())
                    } else {
                        Ok(Value::Integer(i.abs()))
                    }
                }
                other => Ok(Value::real(other.real_value().abs())),
            }
        }
        Function::Length => {
            let v = evaluate(&args[0], ctx)?;
            Ok(match &v {
                Value::Null => Value::Null,
                Value::Text(z) => Value::Integer(utf8_char_count(z)),
                Value::Blob(b) => Value::Integer(b.len() as i64),
                other => Value::Integer(other.text_bytes().unwrap().len() as i64),
            })
        }
        Function::Lower | Function::Upper => {
            let v = evaluate(&args[0], ctx)?;
            Ok(match v.text_bytes() {
                None => Value::Null,
                Some(mut z) => {
                    for b in &mut z {
                        *b = if f == Function::Lower {
                            b.to_ascii_lowercase()
                        } else {
                            b.to_ascii_uppercase()
                        };
                    }
                    Value::Text(z)
                }
            })
        }
        Function::IfNull => {
            let a = evaluate(&args[0], ctx)?;
            if !a.is_null() {
                Ok(a)
            } else {
                evaluate(&args[1], ctx)
            }
        }
        Function::Min2 | Function::Max2 => {
            let coll = args
                .iter()
                .find_map(|a| expr_collation(a, ctx.binding))
                .unwrap_or(Collation::Binary);
            let a = evaluate(&args[0], ctx)?;
            let b = evaluate(&args[1], ctx)?;
            if a.is_null() || b.is_null() {
                return Ok(Value::Null);
            }
            let cmp = mem_compare(&a, &b, coll);
            Ok(match f {
                Function::Min2 => {
                    if cmp != Ordering::Less {
                        b
                    } else {
                        a
                    }
                }
                _ => {
                    if cmp == Ordering::Less {
                        b
                    } else {
                        a
                    }
                }
            })
        }
        Function::TypeOf => {
            let v = evaluate(&args[0], ctx)?;
            Ok(Value::text(v.type_name()))
        }
        Function::Hex => {
            let v = evaluate(&args[0], ctx)?;
            let bytes = v.text_bytes().unwrap_or_default();
            let mut out = Vec::with_capacity(bytes.len() * 2);
            for b in bytes {
                out.push(HEX_DIGITS[(b >> 4) as usize]);
                out.push(HEX_DIGITS[(b & 0xf) as usize]);
            }
            Ok(Value::Text(out))
        }
    }
}

static HEX_DIGITS: [u8; 16] = *b"0123456789ABCDEF";

/// Character count of a text payload: UTF-8 lead bytes up to the first NUL.
fn utf8_char_count(z: &[u8]) -> i64 {
    let mut n: i64 = 0;
    let mut i = 0;
    while i < z.len() && z[i] != 0 {
        let c = z[i];
        i += 1;
        if c >= 0xc0 {
            while i < z.len() && (z[i] & 0xc0) == 0x80 {
                i += 1;
            }
        }
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_const(e: &Expr) -> EvalOutcome {
        let binding = PivotBinding::new();
        let ctx = EvalContext::new(&binding);
        evaluate(e, &ctx)
    }

    fn lit(v: Value) -> Expr {
        Expr::Literal(v)
    }

    #[test]
    fn null_is_not_one_is_true() {
        let e = Expr::Binary(
            BinaryOp::IsNot,
            Box::new(lit(Value::Null)),
            Box::new(lit(Value::Integer(1))),
        );
        assert_eq!(eval_const(&e).unwrap(), Value::Integer(1));
    }

    #[test]
    fn not_follows_three_cases() {
        let t = lit(Value::Integer(1)).not();
        assert_eq!(eval_const(&t).unwrap(), Value::Integer(0));
        let f = lit(Value::Integer(0)).not();
        assert_eq!(eval_const(&f).unwrap(), Value::Integer(1));
        let n = lit(Value::Null).not();
        assert_eq!(eval_const(&n).unwrap(), Value::Null);
    }

    #[test]
    fn empty_text_minus_big_integer() {
        let e = Expr::Binary(
            BinaryOp::Sub,
            Box::new(lit(Value::text(""))),
            Box::new(lit(Value::Integer(2851427734582196970))),
        );
        assert_eq!(
            eval_const(&e).unwrap(),
            Value::Integer(-2851427734582196970)
        );
    }

    #[test]
    fn overflow_is_an_error() {
        let e = Expr::Binary(
            BinaryOp::Add,
            Box::new(lit(Value::Integer(i64::MAX))),
            Box::new(lit(Value::Integer(1))),
        );
        assert_eq!(
            eval_const(&e).unwrap_err().kind,
            EvalErrorKind::IntegerOverflow
        );
        let neg = Expr::Unary(UnaryOp::Neg, Box::new(lit(Value::Integer(i64::MIN))));
        assert_eq!(
            eval_const(&neg).unwrap_err().kind,
            EvalErrorKind::IntegerOverflow
        );
    }

    #[test]
    fn division_by_zero_is_null() {
        let e = Expr::Binary(
            BinaryOp::Div,
            Box::new(lit(Value::Integer(5))),
            Box::new(lit(Value::Integer(0))),
        );
        assert_eq!(eval_const(&e).unwrap(), Value::Null);
    }

    #[test]
    fn like_cases() {
        assert_eq!(
            evaluate_like(&Value::text("./"), &Value::text("./"), false),
            TriBool::True
        );
        assert_eq!(
            evaluate_like(&Value::Null, &Value::text("a"), false),
            TriBool::Null
        );
        assert_eq!(
            evaluate_like(&Value::text("abc"), &Value::text("a_c"), false),
            TriBool::True
        );
        assert_eq!(
            evaluate_like(&Value::text("A"), &Value::text("a"), true),
            TriBool::False
        );
        // numeric subject goes through text rendering
        assert_eq!(
            evaluate_like(&Value::Integer(12), &Value::text("1_"), false),
            TriBool::True
        );
    }

    #[test]
    fn in_list_semantics() {
        let sub = lit(Value::Integer(1));
        let empty = Expr::InList {
            subject: Box::new(lit(Value::Null)),
            items: vec![],
            negated: false,
        };
        assert_eq!(eval_const(&empty).unwrap(), Value::Integer(0));

        let with_null = Expr::InList {
            subject: Box::new(sub.clone()),
            items: vec![lit(Value::Integer(2)), lit(Value::Null)],
            negated: false,
        };
        assert_eq!(eval_const(&with_null).unwrap(), Value::Null);

        let hit = Expr::InList {
            subject: Box::new(sub),
            items: vec![lit(Value::Integer(2)), lit(Value::Integer(1))],
            negated: true,
        };
        assert_eq!(eval_const(&hit).unwrap(), Value::Integer(0));

        // single element: collation of the element is honored
        let single = Expr::InList {
            subject: Box::new(lit(Value::text("a"))),
            items: vec![Expr::Collate(
                Box::new(lit(Value::text("A"))),
                Collation::NoCase,
            )],
            negated: false,
        };
        assert_eq!(eval_const(&single).unwrap(), Value::Integer(1));

        // two elements: element collation is ignored
        let double = Expr::InList {
            subject: Box::new(lit(Value::text("a"))),
            items: vec![
                lit(Value::text("x")),
                Expr::Collate(Box::new(lit(Value::text("A"))), Collation::NoCase),
            ],
            negated: false,
        };
        assert_eq!(eval_const(&double).unwrap(), Value::Integer(0));
    }

    #[test]
    fn cast_affinity_changes_comparison() {
        // CAST('1' AS INT) = '1' converts the text operand
        let e = Expr::Binary(
            BinaryOp::Eq,
            Box::new(Expr::Cast {
                expr: Box::new(lit(Value::text("1"))),
                type_name: "INT".into(),
            }),
            Box::new(lit(Value::text("1"))),
        );
        assert_eq!(eval_const(&e).unwrap(), Value::Integer(1));
        // 1 = '1' does not
        let e2 = Expr::Binary(
            BinaryOp::Eq,
            Box::new(lit(Value::Integer(1))),
            Box::new(lit(Value::text("1"))),
        );
        assert_eq!(eval_const(&e2).unwrap(), Value::Integer(0));
    }

    #[test]
    fn fault_injection_flips_like() {
        let binding = PivotBinding::new();
        let mut ctx = EvalContext::new(&binding);
        let e = Expr::Binary(
            BinaryOp::Like,
            Box::new(lit(Value::text("A"))),
            Box::new(lit(Value::text("a"))),
        );
        assert_eq!(evaluate(&e, &ctx).unwrap(), Value::Integer(1));
        ctx.fault = Some(Fault::LikeCase);
        assert_eq!(evaluate(&e, &ctx).unwrap(), Value::Integer(0));
    }
}
