//! Byte-level numeric coercion helpers shared by affinity application,
//! CAST, boolean coercion, and arithmetic operand typing.
//!
//! All of them defer to the tokenizers in [`super::fp`] so that the one
//! place deciding "does this text look like a number, and which number"
//! agrees with the engine byte for byte.

use super::fp::{double_to_i64, real_same_as_int, sqlite_atof, sqlite_atoi64};

/// Numeric interpretation of a text or blob payload.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Numeric {
    Int(i64),
    Real(f64),
}

/// Best-effort integer value of raw bytes (engine `sqlite3VdbeIntValue`
/// on a string): integer prefix, clamped when out of range.
pub fn bytes_to_i64(z: &[u8]) -> i64 {
    sqlite_atoi64(z).0
}

/// Best-effort real value of raw bytes (engine `sqlite3VdbeRealValue` on
/// a string): longest valid prefix, 0.0 when nothing parses.
pub fn bytes_to_f64(z: &[u8]) -> f64 {
    sqlite_atof(z).0
}

/// Numeric type and value of text/blob bytes used as an arithmetic
/// operand (engine `computeNumericType`).
pub fn compute_numeric(z: &[u8]) -> Numeric {
    let (r, rc) = sqlite_atof(z);
    if !rc.fully_valid() {
        if rc.integer_form() {
            let (ix, irc) = sqlite_atoi64(z);
            if irc <= 1 {
                return Numeric::Int(ix);
            }
        }
        Numeric::Real(r)
    } else {
        if rc.integer_form() {
            let (ix, irc) = sqlite_atoi64(z);
            if irc == 0 {
                return Numeric::Int(ix);
            }
        }
        Numeric::Real(r)
    }
}

/// Lossless text-to-number conversion (engine `applyNumericAffinity`).
/// Returns None when the text does not look like a number at all.
/// `try_for_int` additionally converts fractionless reals to integers.
pub fn text_to_numeric(z: &[u8], try_for_int: bool) -> Option<Numeric> {
    let (r, rc) = sqlite_atof(z);
    if rc.rc <= 0 {
        return None;
    }
    if rc.integer_form() {
        if let Some(i) = also_an_int(z, r) {
            return Some(Numeric::Int(i));
        }
    }
    if try_for_int {
        if let Some(i) = integer_affinity(r) {
            return Some(Numeric::Int(i));
        }
    }
    Some(Numeric::Real(r))
}

/// Engine `alsoAnInt`: the text is integer-shaped; give back the i64 if it
/// is in range.
fn also_an_int(z: &[u8], r: f64) -> Option<i64> {
    let i = double_to_i64(r);
    if real_same_as_int(r, i) {
        return Some(i);
    }
    let (v, rc) = sqlite_atoi64(z);
    if rc == 0 {
        Some(v)
    } else {
        None
    }
}

/// Engine `sqlite3VdbeIntegerAffinity` on a real: integer when the
/// round-trip is exact and strictly inside the i64 range.
pub fn integer_affinity(r: f64) -> Option<i64> {
    let ix = double_to_i64(r);
    if r == ix as f64 && ix > i64::MIN && ix < i64::MAX {
        Some(ix)
    } else {
        None
    }
}

/// Engine `sqlite3VdbeMemNumerify` for text/blob bytes (CAST AS NUMERIC).
pub fn numerify(z: &[u8]) -> Numeric {
    let (r, rc) = sqlite_atof(z);
    if rc.integer_form() {
        let (ix, irc) = sqlite_atoi64(z);
        if irc < 2 {
            return Numeric::Int(ix);
        }
    }
    let ix = double_to_i64(r);
    if real_same_as_int(r, ix) {
        Numeric::Int(ix)
    } else {
        Numeric::Real(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_operand_typing() {
        assert_eq!(compute_numeric(b"5"), Numeric::Int(5));
        assert_eq!(compute_numeric(b"5abc"), Numeric::Int(5));
        assert_eq!(compute_numeric(b"abc"), Numeric::Int(0));
        assert_eq!(compute_numeric(b"5.5"), Numeric::Real(5.5));
        assert_eq!(compute_numeric(b"5.5abc"), Numeric::Real(5.5));
        assert_eq!(compute_numeric(b""), Numeric::Int(0));
        assert_eq!(
            compute_numeric(b"9223372036854775808"),
            Numeric::Real(9223372036854775808.0)
        );
    }

    #[test]
    fn affinity_conversion() {
        assert_eq!(text_to_numeric(b"123", true), Some(Numeric::Int(123)));
        assert_eq!(text_to_numeric(b"abc", true), None);
        assert_eq!(text_to_numeric(b"123abc", true), None);
        assert_eq!(text_to_numeric(b"3.0e+5", true), Some(Numeric::Int(300000)));
        assert_eq!(text_to_numeric(b"3.0e+5", false), Some(Numeric::Real(3.0e5)));
        assert_eq!(
            text_to_numeric(b"9223372036854775807", true),
            Some(Numeric::Int(i64::MAX))
        );
        assert_eq!(
            text_to_numeric(b"9223372036854775808", true),
            Some(Numeric::Real(9223372036854775808.0))
        );
        assert_eq!(text_to_numeric(b" 48.00 ", false), Some(Numeric::Real(48.0)));
    }

    #[test]
    fn numerify_cast() {
        assert_eq!(numerify(b"abc"), Numeric::Int(0));
        assert_eq!(numerify(b"5.5xyz"), Numeric::Real(5.5));
        assert_eq!(numerify(b"3.0e5"), Numeric::Int(300000));
        assert_eq!(numerify(b"9223372036854775808"), Numeric::Real(9223372036854775808.0));
    }
}
