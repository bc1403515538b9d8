//! CSV rendering: `#` header block, RFC-4180 body, `#` footer block.

use std::fmt::Write as _;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Blank,
}

impl Cell {
    pub fn opt(value: Option<f64>) -> Self {
        value.map_or(Cell::Blank, Cell::Num)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Blank => String::new(),
        }
    }
}

/// Shortest round-trip decimal; scientific below 1e-4 in magnitude.
pub fn format_number(x: f64) -> String {
    if x != 0.0 && x.is_finite() && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Experiment output: named columns, rows of equal width, free-text footer.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub footer: Vec<String>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    /// Values of a column by name (`None` for blank or text cells).
    pub fn column(&self, name: &str) -> Vec<Option<f64>> {
        let k = self
            .columns
            .iter()
            .position(|&c| c == name)
            .unwrap_or_else(|| panic!("no column `{name}`"));
        self.rows.iter().map(|r| r[k].as_f64()).collect()
    }
}

/// Full output document. `config` is the resolved configuration, recorded in
/// the header so every file documents how it was produced.
pub fn render(command: &str, config: &[(&'static str, String)], table: &Table) -> String {
    let mut out = String::new();
    writeln!(out, "# aign {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(out, "# command = {command}").unwrap();
    for (key, value) in config {
        writeln!(out, "# {key} = {value}").unwrap();
    }
    let mut body = csv::Writer::from_writer(Vec::new());
    body.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        body.write_record(row.iter().map(Cell::render))
            .expect("in-memory write");
    }
    out.push_str(&String::from_utf8(body.into_inner().expect("in-memory flush")).expect("utf-8 cells"));
    for line in &table.footer {
        writeln!(out, "# {line}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values_switch_to_scientific() {
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(1e-4), "0.0001");
        assert_eq!(format_number(2.5e-5), "2.5e-5");
        assert_eq!(format_number(-3e-7), "-3e-7");
        assert_eq!(format_number(0.0), "0");
    }

    #[test]
    fn document_layout() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::Num(1.0), Cell::Blank]);
        t.push(vec![Cell::Int(2), Cell::Text("x,y".into())]);
        t.footer.push("done".into());
        let doc = render("demo", &[("seed", "1".into())], &t);
        let expected = format!(
            "# aign {}\n# command = demo\n# seed = 1\na,b\n1,\n2,\"x,y\"\n# done\n",
            env!("CARGO_PKG_VERSION")
        );
        assert_eq!(doc, expected);
        assert_eq!(t.column("a"), vec![Some(1.0), Some(2.0)]);
        assert_eq!(t.column("b"), vec![None, None]);
    }
}
