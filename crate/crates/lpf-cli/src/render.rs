//! Output assembly: every command produces a [`Rendered`] table, which the
//! three formats serialize deterministically (identical invocations give
//! byte-identical output; no timestamps, no map iteration order).

use serde_json::{json, Value};

/// One command's output: an echo of the parameters plus a list of rows.
/// Row objects hold a value for every column; columns fix the CSV/text
/// ordering (JSON objects sort keys alphabetically, which is fine).
pub struct Rendered {
    pub command: &'static str,
    pub parameters: Value,
    pub columns: &'static [&'static str],
    pub rows: Vec<Value>,
    /// Extra human-facing lines appended in text format only.
    pub notes: Vec<String>,
}

impl Rendered {
    pub fn to_json(&self) -> String {
        let envelope = json!({
            "command": self.command,
            "parameters": self.parameters,
            "conventions": { "n_1_2_in_A_q": true },
            "version": env!("CARGO_PKG_VERSION"),
            "results": self.rows,
        });
        let mut s = serde_json::to_string_pretty(&envelope).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = self
                .columns
                .iter()
                .map(|c| csv_cell(row.get(*c).unwrap_or(&Value::Null)))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.rows.len() == 1 {
            // single-record commands read best as a key/value block
            let width = self.columns.iter().map(|c| c.len()).max().unwrap_or(0);
            for c in self.columns {
                let v = text_cell(self.rows[0].get(*c).unwrap_or(&Value::Null));
                out.push_str(&format!("{c:width$}  {v}\n"));
            }
        } else {
            let mut widths: Vec<usize> =
                self.columns.iter().map(|c| c.len()).collect();
            let table: Vec<Vec<String>> = self
                .rows
                .iter()
                .map(|row| {
                    self.columns
                        .iter()
                        .enumerate()
                        .map(|(i, c)| {
                            let s = text_cell(row.get(*c).unwrap_or(&Value::Null));
                            widths[i] = widths[i].max(s.len());
                            s
                        })
                        .collect()
                })
                .collect();
            for (i, c) in self.columns.iter().enumerate() {
                out.push_str(&format!("{:1$}  ", c, widths[i]));
            }
            out.push('\n');
            for cells in &table {
                for (i, s) in cells.iter().enumerate() {
                    out.push_str(&format!("{:1$}  ", s, widths[i]));
                }
                out.push('\n');
            }
        }
        for n in &self.notes {
            out.push_str(n);
            out.push('\n');
        }
        out
    }
}

/// CSV cells: arrays join with ';' so rows stay one-line; strings are
/// quoted only when they contain a delimiter.
fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => {
            if s.contains(',') || s.contains('"') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
        Value::Array(items) => items
            .iter()
            .map(csv_cell)
            .collect::<Vec<_>>()
            .join(";"),
        other => other.to_string(),
    }
}

fn text_cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) => format!(
            "[{}]",
            items.iter().map(text_cell).collect::<Vec<_>>().join(", ")
        ),
        other => other.to_string(),
    }
}
