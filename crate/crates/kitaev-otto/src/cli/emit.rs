//! Tabular output: CSV with an embedded configuration block, and a JSON
//! mirror of the same records. Rendering is bit-stable: fixed significant
//! digits, LF line endings, and row order supplied by the caller.

use crate::sweep::SweepRow;

#[derive(Debug, Clone)]
pub enum Field {
    Float(f64),
    Int(i64),
    Text(String),
    Missing,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Field>>,
}

/// Canonical column set shared by the cycle, map, and curve commands.
pub const CANONICAL_COLUMNS: [&str; 14] = [
    "alpha",
    "h_i",
    "h_f",
    "N",
    "T_c",
    "T_h",
    "Q_h",
    "Q_c",
    "W",
    "eta",
    "eta_R",
    "mode",
    "pi_per_spin",
    "piR_per_spin",
];

/// Format a float with the given number of significant digits (scientific
/// notation, locale-independent).
pub fn format_float(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), x)
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn field_to_csv(f: &Field, digits: usize) -> String {
    match f {
        Field::Float(x) => format_float(*x, digits),
        Field::Int(i) => i.to_string(),
        Field::Text(s) => csv_quote(s),
        Field::Missing => String::new(),
    }
}

/// Canonical row for one evaluated sweep point.
pub fn canonical_row(row: &SweepRow) -> Vec<Field> {
    let o = &row.outcome;
    let opt = |v: Option<f64>| v.map(Field::Float).unwrap_or(Field::Missing);
    vec![
        Field::Float(row.alpha),
        Field::Float(row.h_i),
        Field::Float(row.h_f),
        Field::Int(row.n as i64),
        Field::Float(row.t_c),
        Field::Float(row.t_h),
        Field::Float(o.q_h),
        Field::Float(o.q_c),
        Field::Float(o.w),
        opt(o.eta),
        opt(o.eta_r),
        Field::Text(o.mode.letter().to_string()),
        opt(o.pi_per_spin),
        opt(o.pi_r_per_spin),
    ]
}

/// CSV: `# config:` block, optional extra comment lines, header row, data.
pub fn render_csv(
    table: &Table,
    config: &[(String, String)],
    extra_comments: &[String],
    digits: usize,
) -> String {
    let mut out = String::new();
    out.push_str("# config:\n");
    for (key, value) in config {
        out.push_str(&format!("#   {key} = {value}\n"));
    }
    for line in extra_comments {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|f| field_to_csv(f, digits)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// JSON mirror: resolved configuration plus one object per record.
/// Missing observables serialize as `null`.
pub fn render_json(table: &Table, config: &[(String, String)]) -> String {
    use serde_json::{Map, Number, Value};
    let mut cfg = Map::new();
    for (key, value) in config {
        cfg.insert(key.clone(), Value::String(value.clone()));
    }
    let mut records = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let mut obj = Map::new();
        for (col, field) in table.columns.iter().zip(row) {
            let v = match field {
                Field::Float(x) => Number::from_f64(*x)
                    .map(Value::Number)
                    .unwrap_or(Value::Null),
                Field::Int(i) => Value::Number((*i).into()),
                Field::Text(s) => Value::String(s.clone()),
                Field::Missing => Value::Null,
            };
            obj.insert((*col).to_string(), v);
        }
        records.push(Value::Object(obj));
    }
    let doc = Value::Object(Map::from_iter([
        ("config".to_string(), Value::Object(cfg)),
        ("records".to_string(), Value::Array(records)),
    ]));
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    s.push('\n');
    s
}
