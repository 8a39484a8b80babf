//! Report model shared by all subcommands and its three renderings.

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// CSV form: floats carry 17 significant digits.
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn table(&self) -> String {
        match self {
            Cell::Float(x) => short_float(*x),
            other => other.csv(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => Value::from(*x),
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::from(*b),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

fn short_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    let a = x.abs();
    if (1e-4..1e6).contains(&a) {
        let s = format!("{x:.12}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".to_owned() } else { s.to_owned() }
    } else {
        format!("{x:.6e}")
    }
}

#[derive(Debug, Clone)]
pub struct Section {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Section {
    pub fn new(name: &'static str, header: Vec<&'static str>) -> Self {
        Self { name, header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Everything a subcommand emits. `pass` decides the exit status.
#[derive(Debug, Clone)]
pub struct Report {
    pub sections: Vec<Section>,
    /// Extra top-level JSON fields that have no tabular form.
    pub extra: Map<String, Value>,
    /// Free text shown under the table and stored in JSON as `notes`.
    pub notes: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(sections: Vec<Section>) -> Self {
        Self { sections, extra: Map::new(), notes: Vec::new(), pass: true }
    }

    /// One CSV table. With several sections the rows share the union of
    /// their columns behind a leading `record` column naming the section;
    /// cells a section does not have stay empty.
    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if let [only] = self.sections.as_slice() {
            w.write_record(&only.header)?;
            for row in &only.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
        } else {
            let mut columns: Vec<&str> = Vec::new();
            for s in &self.sections {
                for h in &s.header {
                    if !columns.contains(h) {
                        columns.push(h);
                    }
                }
            }
            let mut head = vec!["record"];
            head.extend(&columns);
            w.write_record(&head)?;
            for s in &self.sections {
                for row in &s.rows {
                    let mut out = vec![s.name.to_owned()];
                    out.extend(columns.iter().map(|c| {
                        s.header
                            .iter()
                            .position(|h| h == c)
                            .map(|k| row[k].csv())
                            .unwrap_or_default()
                    }));
                    w.write_record(&out)?;
                }
            }
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_json(&self) -> anyhow::Result<String> {
        let mut root = Map::new();
        for s in &self.sections {
            let records = s
                .rows
                .iter()
                .map(|row| {
                    Value::Object(
                        s.header.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect(),
                    )
                })
                .collect();
            root.insert(s.name.to_owned(), Value::Array(records));
        }
        root.extend(self.extra.clone());
        if !self.notes.is_empty() {
            root.insert("notes".into(), Value::from(self.notes.clone()));
        }
        root.insert("pass".into(), Value::from(self.pass));
        let mut text = serde_json::to_string_pretty(&Value::Object(root))?;
        text.push('\n');
        Ok(text)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            out.push_str(&format!("# {}\n", s.name));
            let cells: Vec<Vec<String>> =
                s.rows.iter().map(|r| r.iter().map(Cell::table).collect()).collect();
            if let [row] = cells.as_slice() {
                let w = s.header.iter().map(|h| h.len()).max().unwrap_or(0);
                for (h, v) in s.header.iter().zip(row) {
                    out.push_str(&format!("{h:<w$}  {v}\n"));
                }
            } else {
                let widths: Vec<usize> = (0..s.header.len())
                    .map(|k| cells.iter().map(|r| r[k].len()).chain([s.header[k].len()]).max().unwrap())
                    .collect();
                let line = |items: Vec<&str>| {
                    items
                        .iter()
                        .zip(&widths)
                        .map(|(v, w)| format!("{v:>w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                };
                out.push_str(&line(s.header.clone()));
                out.push('\n');
                for r in &cells {
                    out.push_str(&line(r.iter().map(String::as_str).collect()));
                    out.push('\n');
                }
            }
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out.push_str(if self.pass { "status: ok\n" } else { "status: FAILED\n" });
        out
    }
}
