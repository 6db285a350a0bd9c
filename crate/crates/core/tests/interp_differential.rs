//! The interpreter's master property: on literal-only expressions, the
//! engine's `SELECT <expr>` and our evaluation agree exactly (storage
//! class and value). Candidates whose evaluation reports integer overflow
//! are discarded, mirroring the generator's policy.

use pqs_core::ast::Expr;
use pqs_core::engine::Engine;
use pqs_core::gen::{generate_expression, GenContext, Weights};
use pqs_core::interp::{evaluate, EvalContext, EvalErrorKind, PivotBinding};
use pqs_core::value::Value;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn identical(a: &Value, b: &Value) -> bool {
    a.identical(b)
}

fn run_differential(seed: u64, count: usize) {
    let engine = Engine::open_in_memory().unwrap();
    let binding = PivotBinding::new();
    let ctx = EvalContext::new(&binding);
    let weights = Weights::uniform();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut checked = 0usize;
    let mut discarded = 0usize;
    let mut mismatches = Vec::new();
    while checked < count {
        let mut gctx = GenContext::new(&[], &mut rng, &weights);
        let e: Expr = generate_expression(&mut gctx, 0);
        let ours = match evaluate(&e, &ctx) {
            Ok(v) => v,
            Err(err) => {
                assert_eq!(err.kind, EvalErrorKind::IntegerOverflow);
                discarded += 1;
                continue;
            }
        };
        let sql = format!("SELECT {}", e.render());
        let row = match engine.query_row(&sql) {
            Ok(r) => r,
            Err(err) => {
                mismatches.push(format!("engine error for {sql}: {err}"));
                checked += 1;
                continue;
            }
        };
        if !identical(&row[0], &ours) {
            mismatches.push(format!(
                "{sql}\n  engine: {:?}\n  ours:   {ours:?}",
                row[0]
            ));
        }
        checked += 1;
        if mismatches.len() > 10 {
            break;
        }
    }
    assert!(
        mismatches.is_empty(),
        "{} mismatches in {} checked ({} discarded):\n{}",
        mismatches.len(),
        checked,
        discarded,
        mismatches.join("\n---\n")
    );
    // The discard policy must not eat the stream.
    assert!(discarded < count / 2, "too many discards: {discarded}");
}

#[test]
fn constants_match_engine() {
    run_differential(0x5eed_0001, 20_000);
}

#[test]
fn constants_match_engine_alt_seed() {
    run_differential(0x5eed_0002, 20_000);
}
