use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

/// One command result in all three renderings.
pub struct Report {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub human: String,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            // serde_json maps are ordered by key, so equal inputs print equal bytes.
            Format::Json => serde_json::to_string(&self.json).expect("JSON values serialise") + "\n",
            Format::Csv => {
                let mut out = self.header.join(",") + "\n";
                for row in &self.rows {
                    let fields: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
                    out.push_str(&fields.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Human => {
                let mut out = self.human.clone();
                if !out.ends_with('\n') {
                    out.push('\n');
                }
                out
            }
        }
    }
}

pub fn write(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

pub fn set_string(elements: &[usize]) -> String {
    let parts: Vec<String> = elements.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_only_when_needed() {
        let report = Report {
            json: Value::Null,
            header: vec!["a", "b"],
            rows: vec![vec!["1 2".into(), "x,y".into()]],
            human: String::new(),
        };
        assert_eq!(report.render(Format::Csv), "a,b\n1 2,\"x,y\"\n");
        assert_eq!(set_string(&[1, 3]), "{1,3}");
    }
}
