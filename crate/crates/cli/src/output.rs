use serde_json::Value;

use crate::Format;

/// Result of a command: a JSON value and, for tabular data, a dedicated TSV form.
pub struct Output {
    pub value: Value,
    pub tsv: Option<String>,
}

impl Output {
    pub fn json(value: Value) -> Self {
        Self { value, tsv: None }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => format!("{}\n", self.value),
            Format::Pretty => tensorank::io::to_pretty(&self.value),
            Format::Tsv => self.tsv.clone().unwrap_or_else(|| leaf_rows(&self.value)),
        }
    }
}

/// `path<TAB>value` for every leaf, with dotted paths and array positions.
fn leaf_rows(v: &Value) -> String {
    fn walk(v: &Value, path: &mut Vec<String>, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    path.push(k.clone());
                    walk(x, path, out);
                    path.pop();
                }
            }
            Value::Array(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    path.push(i.to_string());
                    walk(x, path, out);
                    path.pop();
                }
            }
            Value::String(s) => out.push_str(&format!("{}\t{s}\n", path.join("."))),
            leaf => out.push_str(&format!("{}\t{leaf}\n", path.join("."))),
        }
    }
    let mut out = String::new();
    walk(v, &mut Vec::new(), &mut out);
    out
}
