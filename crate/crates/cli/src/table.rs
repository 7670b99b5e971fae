//! Row tables and their CSV and JSON encodings.

use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<String>) -> Self {
        Self {
            command,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema_version={SCHEMA_VERSION} command={}\n", self.command);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(csv_field).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.clone(), json_value(c)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table values serialize");
        s.push('\n');
        s
    }
}

fn csv_field(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        // 12 significant digits
        Cell::Float(v) => format!("{v:.11e}"),
        Cell::Bool(v) => v.to_string(),
        Cell::Missing => String::new(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn json_value(c: &Cell) -> Value {
    match c {
        Cell::Int(v) => json!(v),
        Cell::Float(v) => json!(v),
        Cell::Bool(v) => json!(v),
        Cell::Text(s) => json!(s),
        Cell::Missing => Value::Null,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", vec!["a".into(), "b".into(), "c".into()]);
        t.push(vec![Cell::Int(3), Cell::Float(0.5), "x, y".into()]);
        t.push(vec![Cell::Missing, Cell::Float(-1.25e-7), Cell::Bool(true)]);
        assert_eq!(
            t.to_csv(),
            "# schema_version=1 command=demo\na,b,c\n3,5.00000000000e-1,\"x, y\"\n,-1.25000000000e-7,true\n"
        );
    }

    #[test]
    fn json_keeps_column_order_and_exact_floats() {
        let mut t = Table::new("demo", vec!["z".into(), "a".into()]);
        let v = 0.1 + 0.2;
        t.push(vec![Cell::Float(v), Cell::Missing]);
        let doc: Value = serde_json::from_str(&t.to_json()).unwrap();
        let row = doc["rows"][0].as_object().unwrap();
        assert_eq!(row.keys().collect::<Vec<_>>(), ["z", "a"]);
        assert_eq!(row["z"].as_f64().unwrap(), v);
        assert!(row["a"].is_null());
        assert_eq!(doc["schema_version"], 1);
    }
}
