//! Schema snapshots queried dynamically from the engine, never tracked
//! by hand: table and column metadata drive both the generators and the
//! interpreter's affinity/collation resolution.

use crate::engine::{Engine, EngineError};
use crate::value::{Collation, TypeAffinity, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnInfo {
    pub name: String,
    pub decl_type: Option<String>,
    pub affinity: TypeAffinity,
    pub collation: Option<Collation>,
    pub primary_key: bool,
    pub unique: bool,
    pub not_null: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableInfo {
    pub name: String,
    pub columns: Vec<ColumnInfo>,
    pub without_rowid: bool,
    pub row_count_estimate: u64,
}

impl TableInfo {
    pub fn column(&self, name: &str) -> Option<&ColumnInfo> {
        self.columns.iter().find(|c| c.name == name)
    }
}

/// Snapshot every user table: names and types from the engine's catalog
/// pragmas, collations from the stored CREATE TABLE text (which the engine
/// rewrites on ALTER), row counts from COUNT(*).
pub fn refresh_schema(engine: &Engine) -> Result<Vec<TableInfo>, EngineError> {
    let mut out = Vec::new();
    let tables = engine.query_rows(
        "SELECT name, wr FROM pragma_table_list \
         WHERE schema='main' AND type='table' AND name NOT LIKE 'sqlite_%' \
         ORDER BY name",
        0,
    )?;
    for row in tables {
        let name = match &row[0] {
            Value::Text(z) => String::from_utf8_lossy(z).into_owned(),
            other => {
                return Err(EngineError {
                    message: format!("unexpected table name value {other:?}"),
                })
            }
        };
        let without_rowid = matches!(row[1], Value::Integer(i) if i != 0);

        let create_sql = engine
            .query_row(&format!(
                "SELECT sql FROM sqlite_master WHERE type='table' AND name='{name}'"
            ))?
            .into_iter()
            .next();
        let decorations = match create_sql {
            Some(Value::Text(z)) => parse_column_decorations(&String::from_utf8_lossy(&z)),
            _ => Vec::new(),
        };

        let mut columns = Vec::new();
        let info = engine.query_rows(
            &format!("SELECT name, type, \"notnull\", pk FROM pragma_table_info('{name}')"),
            0,
        )?;
        for col in info {
            let col_name = match &col[0] {
                Value::Text(z) => String::from_utf8_lossy(z).into_owned(),
                _ => continue,
            };
            let decl_type = match &col[1] {
                Value::Text(z) if !z.is_empty() => {
                    Some(String::from_utf8_lossy(z).into_owned())
                }
                _ => None,
            };
            let not_null = matches!(col[2], Value::Integer(i) if i != 0);
            let primary_key = matches!(col[3], Value::Integer(i) if i != 0);
            let deco = decorations
                .iter()
                .find(|d| d.name == col_name)
                .cloned()
                .unwrap_or_default();
            columns.push(ColumnInfo {
                affinity: TypeAffinity::from_decl_type(decl_type.as_deref()),
                name: col_name,
                decl_type,
                collation: deco.collation,
                primary_key,
                unique: deco.unique,
                not_null,
            });
        }

        let row_count_estimate = match engine
            .query_row(&format!("SELECT COUNT(*) FROM {name}"))?
            .first()
        {
            Some(Value::Integer(n)) => *n as u64,
            _ => 0,
        };

        out.push(TableInfo {
            name,
            columns,
            without_rowid,
            row_count_estimate,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
struct ColumnDecoration {
    name: String,
    collation: Option<Collation>,
    unique: bool,
}

/// Extract per-column COLLATE and UNIQUE decorations from the stored
/// CREATE TABLE text. The statement is always one this tool rendered, so
/// the shape is fixed: defs separated by top-level commas, each starting
/// with the column name.
fn parse_column_decorations(sql: &str) -> Vec<ColumnDecoration> {
    let open = match sql.find('(') {
        Some(i) => i,
        None => return Vec::new(),
    };
    let close = match sql.rfind(')') {
        Some(i) if i > open => i,
        _ => return Vec::new(),
    };
    let body = &sql[open + 1..close];

    let mut defs = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                defs.push(body[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    defs.push(body[start..].trim());

    let mut out = Vec::new();
    for def in defs {
        let mut words = def.split_whitespace();
        let name = match words.next() {
            Some(w) => w,
            None => continue,
        };
        if name.eq_ignore_ascii_case("PRIMARY")
            || name.eq_ignore_ascii_case("UNIQUE")
            || name.eq_ignore_ascii_case("CHECK")
            || name.eq_ignore_ascii_case("FOREIGN")
        {
            continue; // table-level constraint
        }
        let rest: Vec<&str> = words.collect();
        let mut deco = ColumnDecoration {
            name: name.trim_matches('"').to_owned(),
            ..Default::default()
        };
        let mut i = 0;
        while i < rest.len() {
            if rest[i].eq_ignore_ascii_case("COLLATE") && i + 1 < rest.len() {
                deco.collation = Collation::from_name(rest[i + 1].trim_end_matches(','));
                i += 2;
                continue;
            }
            if rest[i].eq_ignore_ascii_case("UNIQUE") {
                deco.unique = true;
            }
            i += 1;
        }
        out.push(deco);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_reflects_ddl() {
        let e = Engine::open_in_memory().unwrap();
        e.execute(
            "CREATE TABLE t0(c0 TEXT COLLATE NOCASE UNIQUE, c1 INT, c2)",
            0,
        )
        .unwrap();
        e.execute("CREATE TABLE t1(c0 REAL PRIMARY KEY, c1 BLOB) WITHOUT ROWID", 0)
            .unwrap();
        e.execute("INSERT INTO t0(c1) VALUES (1), (2)", 0).unwrap();

        let schema = refresh_schema(&e).unwrap();
        assert_eq!(schema.len(), 2);
        let t0 = &schema[0];
        assert_eq!(t0.name, "t0");
        assert_eq!(t0.row_count_estimate, 2);
        assert!(!t0.without_rowid);
        assert_eq!(t0.columns[0].collation, Some(Collation::NoCase));
        assert!(t0.columns[0].unique);
        assert_eq!(t0.columns[0].affinity, TypeAffinity::Text);
        assert_eq!(t0.columns[1].affinity, TypeAffinity::Integer);
        assert_eq!(t0.columns[2].affinity, TypeAffinity::Blob);
        assert_eq!(t0.columns[2].decl_type, None);

        let t1 = &schema[1];
        assert!(t1.without_rowid);
        assert!(t1.columns[0].primary_key);
        assert_eq!(t1.columns[0].affinity, TypeAffinity::Real);
    }

    #[test]
    fn snapshot_tracks_renames() {
        let e = Engine::open_in_memory().unwrap();
        e.execute("CREATE TABLE t0(c0, c1 TEXT COLLATE RTRIM)", 0).unwrap();
        e.execute("ALTER TABLE t0 RENAME COLUMN c1 TO c3", 0).unwrap();
        let schema = refresh_schema(&e).unwrap();
        assert_eq!(schema[0].columns[1].name, "c3");
        assert_eq!(schema[0].columns[1].collation, Some(Collation::Rtrim));
    }
}
