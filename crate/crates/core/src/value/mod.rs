//! Engine-faithful scalar value semantics: storage classes, type affinity,
//! collations, three-valued comparison, and boolean coercion.

pub mod fp;
pub mod numeric;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use fp::{bytes_from_i64, double_to_i64, format_double};
use numeric::{bytes_to_f64, bytes_to_i64, integer_affinity, numerify, text_to_numeric, Numeric};

/// Runtime type of a stored value, distinct from any declared column type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StorageClass {
    Null,
    Integer,
    Real,
    Text,
    Blob,
}

/// SQL three-valued logic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriBool {
    True,
    False,
    Null,
}

impl TriBool {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TriBool::True
        } else {
            TriBool::False
        }
    }

    pub fn negate(self) -> Self {
        match self {
            TriBool::True => TriBool::False,
            TriBool::False => TriBool::True,
            TriBool::Null => TriBool::Null,
        }
    }

    pub fn and(self, other: Self) -> Self {
        match (self, other) {
            (TriBool::False, _) | (_, TriBool::False) => TriBool::False,
            (TriBool::True, TriBool::True) => TriBool::True,
            _ => TriBool::Null,
        }
    }

    pub fn or(self, other: Self) -> Self {
        match (self, other) {
            (TriBool::True, _) | (_, TriBool::True) => TriBool::True,
            (TriBool::False, TriBool::False) => TriBool::False,
            _ => TriBool::Null,
        }
    }

    /// The integer-or-NULL value the engine produces for boolean results.
    pub fn into_value(self) -> Value {
        match self {
            TriBool::True => Value::Integer(1),
            TriBool::False => Value::Integer(0),
            TriBool::Null => Value::Null,
        }
    }
}

/// Text comparison rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Collation {
    Binary,
    NoCase,
    Rtrim,
}

impl Collation {
    pub fn name(self) -> &'static str {
        match self {
            Collation::Binary => "BINARY",
            Collation::NoCase => "NOCASE",
            Collation::Rtrim => "RTRIM",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        if name.eq_ignore_ascii_case("BINARY") {
            Some(Collation::Binary)
        } else if name.eq_ignore_ascii_case("NOCASE") {
            Some(Collation::NoCase)
        } else if name.eq_ignore_ascii_case("RTRIM") {
            Some(Collation::Rtrim)
        } else {
            None
        }
    }

    /// Compare two text payloads under this collation.
    pub fn compare(self, a: &[u8], b: &[u8]) -> Ordering {
        match self {
            Collation::Binary => a.cmp(b),
            Collation::NoCase => {
                let fold = |c: &u8| c.to_ascii_lowercase();
                a.iter().map(fold).cmp(b.iter().map(fold))
            }
            Collation::Rtrim => {
                let trim = |z: &[u8]| {
                    let mut n = z.len();
                    while n > 0 && z[n - 1] == b' ' {
                        n -= 1;
                    }
                    n
                };
                a[..trim(a)].cmp(&b[..trim(b)])
            }
        }
    }
}

/// A column's preferred storage class. `Blob` doubles as "no affinity",
/// which is what columns with an omitted type get.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeAffinity {
    Text,
    Numeric,
    Integer,
    Real,
    Blob,
}

impl TypeAffinity {
    pub fn is_numeric(self) -> bool {
        matches!(
            self,
            TypeAffinity::Numeric | TypeAffinity::Integer | TypeAffinity::Real
        )
    }

    /// Affinity of a declared type name, per the engine's substring rules.
    /// `None` (omitted type) maps to `Blob`.
    pub fn from_decl_type(decl: Option<&str>) -> Self {
        let decl = match decl {
            None => return TypeAffinity::Blob,
            Some(d) => d,
        };
        let mut h: u32 = 0;
        let mut aff = TypeAffinity::Numeric;
        const fn w(a: u8, b: u8, c: u8, d: u8) -> u32 {
            ((a as u32) << 24) + ((b as u32) << 16) + ((c as u32) << 8) + d as u32
        }
        for &raw in decl.as_bytes() {
            h = (h << 8).wrapping_add(raw.to_ascii_lowercase() as u32);
            if h == w(b'c', b'h', b'a', b'r') || h == w(b'c', b'l', b'o', b'b') || h == w(b't', b'e', b'x', b't') {
                aff = TypeAffinity::Text;
            } else if h == w(b'b', b'l', b'o', b'b')
                && matches!(aff, TypeAffinity::Numeric | TypeAffinity::Real)
            {
                aff = TypeAffinity::Blob;
            } else if (h == w(b'r', b'e', b'a', b'l')
                || h == w(b'f', b'l', b'o', b'a')
                || h == w(b'd', b'o', b'u', b'b'))
                && aff == TypeAffinity::Numeric
            {
                aff = TypeAffinity::Real;
            } else if (h & 0x00ff_ffff) == ((b'i' as u32) << 16) + ((b'n' as u32) << 8) + b't' as u32 {
                aff = TypeAffinity::Integer;
                break;
            }
        }
        aff
    }
}

/// A dynamically-typed SQL scalar. Text is kept as raw bytes because
/// blob-to-text casts can produce arbitrary byte sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Null,
    Integer(i64),
    Real(f64),
    Text(Vec<u8>),
    Blob(Vec<u8>),
}

impl Value {
    /// Real constructor that normalizes NaN to NULL, matching the engine.
    pub fn real(r: f64) -> Value {
        if r.is_nan() {
            Value::Null
        } else {
            Value::Real(r)
        }
    }

    pub fn text(s: &str) -> Value {
        Value::Text(s.as_bytes().to_vec())
    }

    pub fn storage_class(&self) -> StorageClass {
        match self {
            Value::Null => StorageClass::Null,
            Value::Integer(_) => StorageClass::Integer,
            Value::Real(_) => StorageClass::Real,
            Value::Text(_) => StorageClass::Text,
            Value::Blob(_) => StorageClass::Blob,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// `typeof()` result.
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Integer(_) => "integer",
            Value::Real(_) => "real",
            Value::Text(_) => "text",
            Value::Blob(_) => "blob",
        }
    }

    /// Text rendering of a numeric value; identity bytes for text/blob.
    /// This is the engine's `sqlite3_value_text` view of the value.
    pub fn text_bytes(&self) -> Option<Vec<u8>> {
        match self {
            Value::Null => None,
            Value::Integer(i) => Some(bytes_from_i64(*i)),
            Value::Real(r) => Some(format_double(*r)),
            Value::Text(z) | Value::Blob(z) => Some(z.clone()),
        }
    }

    /// Engine `sqlite3VdbeIntValue`.
    pub fn int_value(&self) -> i64 {
        match self {
            Value::Null => 0,
            Value::Integer(i) => *i,
            Value::Real(r) => double_to_i64(*r),
            Value::Text(z) | Value::Blob(z) => bytes_to_i64(z),
        }
    }

    /// Engine `sqlite3VdbeRealValue`.
    pub fn real_value(&self) -> f64 {
        match self {
            Value::Null => 0.0,
            Value::Integer(i) => *i as f64,
            Value::Real(r) => *r,
            Value::Text(z) | Value::Blob(z) => bytes_to_f64(z),
        }
    }

    /// Numeric view of an arithmetic operand (engine `numericType`).
    /// NULL has no numeric view.
    pub fn numeric_operand(&self) -> Option<Numeric> {
        match self {
            Value::Null => None,
            Value::Integer(i) => Some(Numeric::Int(*i)),
            Value::Real(r) => Some(Numeric::Real(*r)),
            Value::Text(z) | Value::Blob(z) => Some(numeric::compute_numeric(z)),
        }
    }

    /// Boolean coercion: NULL stays NULL, integers test nonzero, everything
    /// else goes through the real-value view.
    pub fn as_boolean(&self) -> TriBool {
        match self {
            Value::Null => TriBool::Null,
            Value::Integer(i) => TriBool::from_bool(*i != 0),
            other => TriBool::from_bool(other.real_value() != 0.0),
        }
    }

    /// Column-storage conversion for an insert into a column with the given
    /// affinity. Models the value as later presented by a SELECT, so REAL
    /// affinity shows integers as reals.
    pub fn apply_affinity(self, affinity: TypeAffinity) -> Value {
        match affinity {
            TypeAffinity::Blob => self,
            TypeAffinity::Text => match self {
                Value::Integer(i) => Value::Text(bytes_from_i64(i)),
                Value::Real(r) => Value::Text(format_double(r)),
                other => other,
            },
            TypeAffinity::Numeric | TypeAffinity::Integer | TypeAffinity::Real => {
                let v = match self {
                    Value::Integer(_) => self,
                    Value::Real(r) => match integer_affinity(r) {
                        Some(i) => Value::Integer(i),
                        None => Value::Real(r),
                    },
                    Value::Text(z) => match text_to_numeric(&z, true) {
                        Some(Numeric::Int(i)) => Value::Integer(i),
                        Some(Numeric::Real(r)) => Value::Real(r),
                        None => Value::Text(z),
                    },
                    other => other,
                };
                if affinity == TypeAffinity::Real {
                    if let Value::Integer(i) = v {
                        return Value::Real(i as f64);
                    }
                }
                v
            }
        }
    }

    /// Explicit CAST to the affinity of a type name. Forced, lossy.
    pub fn cast_to(self, affinity: TypeAffinity) -> Value {
        if self.is_null() {
            return Value::Null;
        }
        match affinity {
            TypeAffinity::Blob => match self {
                Value::Blob(_) => self,
                Value::Text(z) => Value::Blob(z),
                other => Value::Blob(other.text_bytes().unwrap()),
            },
            TypeAffinity::Text => match self {
                Value::Text(_) => self,
                Value::Blob(z) => Value::Text(z),
                other => Value::Text(other.text_bytes().unwrap()),
            },
            TypeAffinity::Numeric => match self {
                Value::Integer(_) | Value::Real(_) => self,
                Value::Text(z) | Value::Blob(z) => match numerify(&z) {
                    Numeric::Int(i) => Value::Integer(i),
                    Numeric::Real(r) => Value::real(r),
                },
                Value::Null => unreachable!(),
            },
            TypeAffinity::Integer => Value::Integer(self.int_value()),
            TypeAffinity::Real => Value::real(self.real_value()),
        }
    }

    /// Strict identity used by the containment oracle: same storage class
    /// and same content. Reals compare by exact numeric value, so the two
    /// zero signs coincide; NaN never occurs in a [`Value`].
    pub fn identical(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Null, Value::Null) => true,
            (Value::Integer(a), Value::Integer(b)) => a == b,
            (Value::Real(a), Value::Real(b)) => a == b,
            (Value::Text(a), Value::Text(b)) => a == b,
            (Value::Blob(a), Value::Blob(b)) => a == b,
            _ => false,
        }
    }

    /// Render as a SQL literal accepted by the engine's parser.
    pub fn render_literal(&self) -> String {
        match self {
            Value::Null => "NULL".to_owned(),
            Value::Integer(i) => i.to_string(),
            Value::Real(r) => render_real_literal(*r),
            Value::Text(z) => {
                let mut out = String::with_capacity(z.len() + 2);
                out.push('\'');
                for &b in z {
                    if b == b'\'' {
                        out.push_str("''");
                    } else {
                        out.push(b as char);
                    }
                }
                out.push('\'');
                out
            }
            Value::Blob(z) => {
                let mut out = String::with_capacity(z.len() * 2 + 3);
                out.push_str("X'");
                for &b in z {
                    out.push_str(&format!("{b:02X}"));
                }
                out.push('\'');
                out
            }
        }
    }
}

/// A real literal in engine-accepted syntax that parses back to the same
/// bits. Uses the engine's own text rendering, which always contains a
/// decimal point or exponent, so the token stays a float.
fn render_real_literal(r: f64) -> String {
    if r.is_infinite() {
        return if r < 0.0 { "-9.0e999" } else { "9.0e999" }.to_owned();
    }
    String::from_utf8(format_double(r)).expect("real rendering is ASCII")
}

/// Exact i64-vs-double ordering, careful at the 2^63 boundaries.
pub fn int_float_compare(i: i64, r: f64) -> Ordering {
    if r.is_nan() {
        // NaN acts like NULL: every integer is greater.
        return Ordering::Greater;
    }
    if r < -9223372036854775808.0 {
        return Ordering::Greater;
    }
    if r >= 9223372036854775808.0 {
        return Ordering::Less;
    }
    let y = r as i64;
    match i.cmp(&y) {
        Ordering::Equal => {
            let s = i as f64;
            if s < r {
                Ordering::Less
            } else if s > r {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        }
        ord => ord,
    }
}

/// Total cross-class ordering (engine `sqlite3MemCompare`): NULLs first,
/// then numerics, text under `collation`, blobs by memcmp. Two NULLs are
/// equal here; use [`sql_compare`] for three-valued operator semantics.
pub fn mem_compare(a: &Value, b: &Value, collation: Collation) -> Ordering {
    use Value::*;
    match (a, b) {
        (Null, Null) => Ordering::Equal,
        (Null, _) => Ordering::Less,
        (_, Null) => Ordering::Greater,
        (Integer(x), Integer(y)) => x.cmp(y),
        (Real(x), Real(y)) => x.partial_cmp(y).unwrap_or(Ordering::Equal),
        (Integer(x), Real(y)) => int_float_compare(*x, *y),
        (Real(x), Integer(y)) => int_float_compare(*y, *x).reverse(),
        (Integer(_) | Real(_), _) => Ordering::Less,
        (_, Integer(_) | Real(_)) => Ordering::Greater,
        (Text(x), Text(y)) => collation.compare(x, y),
        (Text(_), Blob(_)) => Ordering::Less,
        (Blob(_), Text(_)) => Ordering::Greater,
        (Blob(x), Blob(y)) => x.cmp(y),
    }
}

/// Three-valued comparison for SQL operators: NULL when either operand is
/// NULL, otherwise the cross-class ordering.
pub fn sql_compare(a: &Value, b: &Value, collation: Collation) -> Option<Ordering> {
    if a.is_null() || b.is_null() {
        return None;
    }
    Some(mem_compare(a, b, collation))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_cross_class() {
        let coll = Collation::Binary;
        // numerics < text < blob
        assert_eq!(
            sql_compare(&Value::Integer(99), &Value::text(""), coll),
            Some(Ordering::Less)
        );
        assert_eq!(
            sql_compare(&Value::text("zzz"), &Value::Blob(vec![]), coll),
            Some(Ordering::Less)
        );
        // int vs real exact
        assert_eq!(
            sql_compare(&Value::Integer(2), &Value::Real(2.0), coll),
            Some(Ordering::Equal)
        );
        assert_eq!(
            sql_compare(&Value::Integer(i64::MAX), &Value::Real(9.223372036854776e18), coll),
            Some(Ordering::Less)
        );
        assert_eq!(sql_compare(&Value::Null, &Value::Integer(5), coll), None);
    }

    #[test]
    fn collations() {
        assert_eq!(
            sql_compare(&Value::text("a"), &Value::text("A"), Collation::NoCase),
            Some(Ordering::Equal)
        );
        assert_eq!(
            sql_compare(&Value::text("a "), &Value::text("a"), Collation::Rtrim),
            Some(Ordering::Equal)
        );
        assert_eq!(
            sql_compare(&Value::text("a\t"), &Value::text("a"), Collation::Rtrim),
            Some(Ordering::Greater)
        );
        assert_eq!(
            sql_compare(&Value::text("a"), &Value::text("A"), Collation::Binary),
            Some(Ordering::Greater)
        );
    }

    #[test]
    fn boolean_coercion() {
        assert_eq!(Value::Integer(0).as_boolean(), TriBool::False);
        assert_eq!(Value::Integer(-3).as_boolean(), TriBool::True);
        assert_eq!(Value::Null.as_boolean(), TriBool::Null);
        assert_eq!(Value::text("0.5").as_boolean(), TriBool::True);
        assert_eq!(Value::text("abc").as_boolean(), TriBool::False);
        assert_eq!(Value::text("-0.0").as_boolean(), TriBool::False);
        assert_eq!(Value::Real(0.0).as_boolean(), TriBool::False);
    }

    #[test]
    fn affinity_application() {
        use TypeAffinity::*;
        assert_eq!(
            Value::text("123").apply_affinity(Numeric),
            Value::Integer(123)
        );
        assert_eq!(
            Value::text("abc").apply_affinity(Numeric),
            Value::text("abc")
        );
        assert_eq!(Value::Integer(7).apply_affinity(Blob), Value::Integer(7));
        assert_eq!(Value::Integer(5).apply_affinity(Real), Value::Real(5.0));
        assert_eq!(Value::Real(4.0).apply_affinity(Integer), Value::Integer(4));
        assert_eq!(
            Value::Real(1.5).apply_affinity(Integer),
            Value::Real(1.5)
        );
        assert_eq!(
            Value::Integer(123).apply_affinity(Text),
            Value::text("123")
        );
        assert_eq!(
            Value::Real(1.5).apply_affinity(Text),
            Value::text("1.5")
        );
    }

    #[test]
    fn casts() {
        use TypeAffinity::*;
        assert_eq!(Value::text("").cast_to(Integer), Value::Integer(0));
        assert_eq!(Value::Real(1.9).cast_to(Integer), Value::Integer(1));
        assert_eq!(Value::Real(-1.9).cast_to(Integer), Value::Integer(-1));
        assert_eq!(Value::Null.cast_to(Text), Value::Null);
        assert_eq!(Value::text("1.5xyz").cast_to(Real), Value::Real(1.5));
        assert_eq!(Value::text("123abc").cast_to(Integer), Value::Integer(123));
        assert_eq!(
            Value::text("99999999999999999999").cast_to(Integer),
            Value::Integer(i64::MAX)
        );
        assert_eq!(Value::Real(3.0).cast_to(Numeric), Value::Real(3.0));
        assert_eq!(Value::text("3.0e5").cast_to(Numeric), Value::Integer(300000));
        assert_eq!(
            Value::Integer(12).cast_to(Blob),
            Value::Blob(b"12".to_vec())
        );
        assert_eq!(
            Value::Real(9.5e18).cast_to(Integer),
            Value::Integer(i64::MAX)
        );
    }

    #[test]
    fn type_name_affinity() {
        use TypeAffinity::*;
        assert_eq!(TypeAffinity::from_decl_type(None), Blob);
        assert_eq!(TypeAffinity::from_decl_type(Some("INT")), Integer);
        assert_eq!(TypeAffinity::from_decl_type(Some("INTEGER")), Integer);
        assert_eq!(TypeAffinity::from_decl_type(Some("TINYINT")), Integer);
        assert_eq!(TypeAffinity::from_decl_type(Some("VARCHAR(10)")), Text);
        assert_eq!(TypeAffinity::from_decl_type(Some("BLOB")), Blob);
        assert_eq!(TypeAffinity::from_decl_type(Some("REAL")), Real);
        assert_eq!(TypeAffinity::from_decl_type(Some("DOUBLE")), Real);
        assert_eq!(TypeAffinity::from_decl_type(Some("FLOATING POINT")), Integer);
        assert_eq!(TypeAffinity::from_decl_type(Some("BOOLEAN")), Numeric);
        assert_eq!(TypeAffinity::from_decl_type(Some("STRING")), Numeric);
    }

    #[test]
    fn literal_rendering() {
        assert_eq!(Value::text("a'b").render_literal(), "'a''b'");
        assert_eq!(Value::Blob(vec![0xab, 0x01]).render_literal(), "X'AB01'");
        assert_eq!(Value::Integer(i64::MIN).render_literal(), "-9223372036854775808");
        assert_eq!(Value::Real(1.0).render_literal(), "1.0");
    }
}
