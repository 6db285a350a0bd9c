//! Expression rectification: wrap a random expression so it evaluates to
//! TRUE on the pivot row. TRUE stays as is, FALSE gains a preceding NOT,
//! NULL gains an IS NULL test. At most one node is added.

use crate::ast::Expr;
use crate::interp::{evaluate, EvalContext, EvalError};
use crate::value::TriBool;

/// Transform `e` into an expression that is TRUE for the pivot binding in
/// `ctx`. Evaluation errors propagate so the caller can regenerate.
pub fn rectify(e: Expr, ctx: &EvalContext) -> Result<Expr, EvalError> {
    let value = evaluate(&e, ctx)?;
    Ok(match value.as_boolean() {
        TriBool::True => e,
        TriBool::False => e.not(),
        TriBool::Null => e.is_null(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::BinaryOp;
    use crate::interp::{BoundColumn, PivotBinding};
    use crate::value::{Collation, TypeAffinity, Value};

    fn binding() -> PivotBinding {
        let mut b = PivotBinding::new();
        b.bind(
            "t0",
            "c1",
            BoundColumn {
                value: Value::Integer(1),
                affinity: TypeAffinity::Blob,
                collation: None,
            },
        );
        b.bind(
            "t1",
            "c0",
            BoundColumn {
                value: Value::Integer(-5),
                affinity: TypeAffinity::Blob,
                collation: None,
            },
        );
        let _ = Collation::Binary;
        b
    }

    #[test]
    fn true_stays_unchanged() {
        let b = binding();
        let ctx = EvalContext::new(&b);
        let e = Expr::Literal(Value::Integer(7));
        let r = rectify(e.clone(), &ctx).unwrap();
        assert_eq!(r, e);
    }

    #[test]
    fn false_gains_not() {
        // NOT(t0.c1 OR (t1.c0 > 3)) is FALSE for c1=1, c0=-5; the
        // rectifier adds one more preceding NOT.
        let b = binding();
        let ctx = EvalContext::new(&b);
        let inner = Expr::Binary(
            BinaryOp::Or,
            Box::new(Expr::column("t0", "c1")),
            Box::new(Expr::Binary(
                BinaryOp::Gt,
                Box::new(Expr::column("t1", "c0")),
                Box::new(Expr::Literal(Value::Integer(3))),
            )),
        )
        .not();
        let r = rectify(inner.clone(), &ctx).unwrap();
        assert_eq!(r, inner.not());
        assert_eq!(
            evaluate(&r, &ctx).unwrap().as_boolean(),
            TriBool::True
        );
    }

    #[test]
    fn null_gains_is_null() {
        let b = binding();
        let ctx = EvalContext::new(&b);
        let e = Expr::Literal(Value::Null);
        let r = rectify(e.clone(), &ctx).unwrap();
        assert_eq!(r, e.is_null());
        assert_eq!(evaluate(&r, &ctx).unwrap().as_boolean(), TriBool::True);
    }
}
