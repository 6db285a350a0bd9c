//! Differential checks of the value codec against the live engine.
//!
//! These bind values as parameters (no SQL literal parsing in the way) and
//! compare the engine's conversions against ours bit for bit.

use pqs_core::value::fp::{format_double, sqlite_atof};
use pqs_core::value::Value;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_doubles(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![
        0.0,
        -0.0,
        1.0,
        -1.0,
        0.5,
        1.5,
        f64::MIN_POSITIVE,
        5e-324,
        f64::MAX,
        9.223372036854776e18,
        -9.223372036854776e18,
        0.1 + 0.2,
        1e15,
        1e16,
        123456789.123456789,
    ];
    while out.len() < n {
        let r = f64::from_bits(rng.gen::<u64>());
        if r.is_finite() {
            out.push(r);
        }
    }
    out
}

#[test]
fn real_to_text_matches_engine() {
    let conn = rusqlite::Connection::open_in_memory().unwrap();
    let mut stmt = conn.prepare("SELECT CAST(? AS TEXT)").unwrap();
    for r in random_doubles(60_000, 0xfee1) {
        let engine_text: String = stmt.query_row([r], |row| row.get(0)).unwrap();
        let ours = String::from_utf8(format_double(r)).unwrap();
        assert_eq!(engine_text, ours, "real->text mismatch for {} ({:x})", r, r.to_bits());
    }
}

#[test]
fn text_to_real_matches_engine() {
    let conn = rusqlite::Connection::open_in_memory().unwrap();
    let mut stmt = conn.prepare("SELECT CAST(? AS REAL)").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);

    let mut check = |text: &str| {
        let engine_val: f64 = stmt.query_row([text], |row| row.get(0)).unwrap();
        let (ours, _) = sqlite_atof(text.as_bytes());
        assert_eq!(
            engine_val.to_bits(),
            ours.to_bits(),
            "text->real mismatch for {text:?}: engine {engine_val:?} ours {ours:?}"
        );
    };

    for fixed in [
        "0", "-0.0", "1", ".5", "5.", "1e999", "-1e999", "9223372036854775807",
        "9223372036854775808", "3500000000000000.2500001", "abc", "5e", "0x10",
        " 12 ", "1.7976931348623157e308", "5e-324", "2.2250738585072014e-308",
        "99999999999999999999999999999999999999", "1e-999",
    ] {
        check(fixed);
    }
    // Round-trip of our own renderings plus randomized digit strings,
    // including >19 significant digits to hit the mantissa saturation path.
    for r in random_doubles(20_000, 0xfee2) {
        check(&String::from_utf8(format_double(r)).unwrap());
    }
    for _ in 0..20_000 {
        let ndig = rng.gen_range(1..=26);
        let mut s = String::new();
        if rng.gen_bool(0.3) {
            s.push('-');
        }
        for _ in 0..ndig {
            s.push(char::from(b'0' + rng.gen_range(0..10)));
        }
        if rng.gen_bool(0.7) {
            let dp = rng.gen_range(0..=s.len());
            s.insert(dp, '.');
        }
        if rng.gen_bool(0.4) {
            s.push('e');
            if rng.gen_bool(0.5) {
                s.push(if rng.gen_bool(0.5) { '+' } else { '-' });
            }
            for _ in 0..rng.gen_range(1..=3) {
                s.push(char::from(b'0' + rng.gen_range(0..10)));
            }
        }
        check(&s);
    }
}

#[test]
fn cast_and_affinity_match_engine() {
    let conn = rusqlite::Connection::open_in_memory().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xcafe);

    let mut texts: Vec<String> = vec![
        "".into(), "0".into(), "-0".into(), "0.0".into(), "abc".into(), "123".into(),
        "123abc".into(), "1.5".into(), "48.00".into(), "3.0e+5".into(), " 42 ".into(),
        "9223372036854775807".into(), "9223372036854775808".into(),
        "-9223372036854775808".into(), "-9223372036854775809".into(),
        "99999999999999999999".into(), "1e999".into(), "-1e999".into(),
        ".".into(), "+5".into(), "-".into(), "5e".into(), "2.5e3x".into(), "0x10".into(),
    ];
    for _ in 0..2000 {
        let n = rng.gen_range(0..12);
        let charset = b"0123456789.eE+- aZ";
        let s: String = (0..n)
            .map(|_| char::from(charset[rng.gen_range(0..charset.len())]))
            .collect();
        texts.push(s);
    }

    for target in ["TEXT", "INTEGER", "REAL", "NUMERIC", "BLOB"] {
        let aff = pqs_core::TypeAffinity::from_decl_type(Some(target));
        let sql = format!("SELECT CAST(? AS {target}), typeof(CAST(? AS {target}))");
        let mut stmt = conn.prepare(&sql).unwrap();
        for t in &texts {
            let (engine_val, engine_ty): (rusqlite::types::Value, String) = stmt
                .query_row(rusqlite::params![t, t], |row| {
                    Ok((row.get(0)?, row.get(1)?))
                })
                .unwrap();
            let ours = Value::text(t).cast_to(aff);
            assert_eq!(ours.type_name(), engine_ty, "CAST('{t}' AS {target}) class");
            assert!(
                engine_matches(&engine_val, &ours),
                "CAST('{t}' AS {target}): engine {engine_val:?} ours {ours:?}"
            );
        }
    }

    // Column affinity application: insert text into a typed column, read back.
    for (decl, aff) in [
        ("TEXT", pqs_core::TypeAffinity::Text),
        ("NUMERIC", pqs_core::TypeAffinity::Numeric),
        ("INT", pqs_core::TypeAffinity::Integer),
        ("REAL", pqs_core::TypeAffinity::Real),
        ("", pqs_core::TypeAffinity::Blob),
    ] {
        conn.execute_batch(&format!("DROP TABLE IF EXISTS t; CREATE TABLE t(x {decl})"))
            .unwrap();
        let mut ins = conn.prepare("INSERT INTO t(x) VALUES (?)").unwrap();
        let mut sel = conn.prepare("SELECT x, typeof(x) FROM t").unwrap();
        for t in &texts {
            ins.execute([t]).unwrap();
            let (engine_val, engine_ty): (rusqlite::types::Value, String) =
                sel.query_row([], |row| Ok((row.get(0)?, row.get(1)?))).unwrap();
            let ours = Value::text(t).apply_affinity(aff);
            assert_eq!(
                ours.type_name(),
                engine_ty,
                "affinity {decl:?} on {t:?}: engine {engine_val:?} ours {ours:?}"
            );
            assert!(
                engine_matches(&engine_val, &ours),
                "affinity {decl:?} on {t:?}: engine {engine_val:?} ours {ours:?}"
            );
            conn.execute("DELETE FROM t", []).unwrap();
        }
        // Doubles through the same column.
        for r in random_doubles(300, 0xd0d0) {
            ins.execute([r]).unwrap();
            let (engine_val, engine_ty): (rusqlite::types::Value, String) =
                sel.query_row([], |row| Ok((row.get(0)?, row.get(1)?))).unwrap();
            let ours = Value::Real(r).apply_affinity(aff);
            assert_eq!(ours.type_name(), engine_ty, "affinity {decl:?} on {r:?}");
            assert!(
                engine_matches(&engine_val, &ours),
                "affinity {decl:?} on {r:?}: engine {engine_val:?} ours {ours:?}"
            );
            conn.execute("DELETE FROM t", []).unwrap();
        }
    }
}

fn engine_matches(engine: &rusqlite::types::Value, ours: &Value) -> bool {
    use rusqlite::types::Value as E;
    match (engine, ours) {
        (E::Null, Value::Null) => true,
        (E::Integer(a), Value::Integer(b)) => a == b,
        (E::Real(a), Value::Real(b)) => a == b || a.to_bits() == b.to_bits(),
        (E::Text(a), Value::Text(b)) => a.as_bytes() == &b[..],
        (E::Blob(a), Value::Blob(b)) => a == b,
        _ => false,
    }
}
