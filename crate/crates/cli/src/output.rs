use std::io::Write;

use serde_json::{json, Map, Value};

/// The invocation with the program path reduced to its name.
fn command_echo(argv: &[String]) -> String {
    let mut words = vec![env!("CARGO_BIN_NAME").to_string()];
    words.extend(argv.iter().skip(1).cloned());
    words.join(" ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Csv,
    Json,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, columns: &[&str]) -> Self {
        Table {
            title: title.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(title: &str, columns: Vec<String>) -> Self {
        Table {
            title: title.to_string(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let object: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(|v| Value::String(v.clone())))
                        .collect();
                    Value::Object(object)
                })
                .collect(),
        )
    }
}

/// Everything a subcommand prints. `result` replaces the table-derived JSON
/// body when the command has a richer structured form.
#[derive(Debug, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub result: Option<Value>,
    pub seed: Option<u64>,
    /// Preformatted CSV, used instead of the tables for file formats that
    /// other subcommands read back.
    pub csv: Option<String>,
}

impl Report {
    pub fn from_tables(tables: Vec<Table>) -> Self {
        Report {
            tables,
            ..Report::default()
        }
    }

    pub fn render(&self, format: Format, argv: &[String]) -> String {
        match format {
            Format::Human => self.human(),
            Format::Csv => self.csv.clone().unwrap_or_else(|| self.csv_tables()),
            Format::Json => {
                let result = self.result.clone().unwrap_or_else(|| {
                    let map: Map<String, Value> = self
                        .tables
                        .iter()
                        .map(|t| (t.title.clone(), t.to_json()))
                        .collect();
                    Value::Object(map)
                });
                let doc = json!({
                    "metadata": {
                        "command": command_echo(argv),
                        "version": env!("CARGO_PKG_VERSION"),
                        "seed": self.seed,
                    },
                    "result": result,
                });
                serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n"
            }
        }
    }

    fn human(&self) -> String {
        let mut out = String::new();
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            if self.tables.len() > 1 {
                out.push_str(&format!("{}:\n", table.title));
            }
            let mut widths: Vec<usize> = table.columns.iter().map(|c| c.chars().count()).collect();
            for row in &table.rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                    .collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            out.push_str(&line(&table.columns));
            for row in &table.rows {
                out.push_str(&line(row));
            }
        }
        out
    }

    fn csv_tables(&self) -> String {
        let mut out = Vec::new();
        for (i, table) in self.tables.iter().enumerate() {
            if self.tables.len() > 1 {
                if i > 0 {
                    out.push(b'\n');
                }
                writeln!(out, "# {}", table.title).expect("writing to memory");
            }
            let mut writer = csv::Writer::from_writer(&mut out);
            writer
                .write_record(&table.columns)
                .expect("writing to memory");
            for row in &table.rows {
                writer.write_record(row).expect("writing to memory");
            }
            writer.flush().expect("writing to memory");
        }
        String::from_utf8(out).expect("CSV of UTF-8 cells")
    }
}
