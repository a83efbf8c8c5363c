//! Column-typed raw tables and the CSV reader.
//!
//! A [`RawTable`] is the landing format for every input: named columns,
//! each either numeric or categorical, with explicit missing cells. CSV
//! columns are typed by inference over the whole column; a numeric column
//! polluted by a stray non-numeric entry is reported at that cell, while a
//! column mixing the two kinds more evenly is rejected as ambiguous.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Numeric,
    Categorical,
}

/// One cell of a raw table.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    Missing,
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub ty: ColumnType,
}

/// Selects a column by position or by header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

/// A parsed input table: typed columns and rows of cells.
#[derive(Debug, Clone)]
pub struct RawTable {
    columns: Vec<Column>,
    rows: Vec<Vec<Value>>,
}

impl RawTable {
    /// Validates shape and cell/column type agreement.
    pub fn new(columns: Vec<Column>, rows: Vec<Vec<Value>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyInput("table has no columns".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::DimensionMismatch {
                    expected: columns.len(),
                    got: row.len(),
                });
            }
            for (cell, col) in row.iter().zip(&columns) {
                let ok = match (cell, col.ty) {
                    (Value::Missing, _) => true,
                    (Value::Number(_), ColumnType::Numeric) => true,
                    (Value::Text(_), ColumnType::Categorical) => true,
                    _ => false,
                };
                if !ok {
                    return Err(Error::Parse {
                        line: i + 1,
                        column: col.name.clone(),
                        message: "cell kind disagrees with column type".into(),
                    });
                }
            }
        }
        Ok(Self { columns, rows })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Resolves a selector against the header.
    pub fn column_index(&self, sel: &ColumnSelector) -> Result<usize> {
        match sel {
            ColumnSelector::Index(i) => {
                if *i < self.columns.len() {
                    Ok(*i)
                } else {
                    Err(Error::InvalidParameter(format!(
                        "column index {i} out of range for {} columns",
                        self.columns.len()
                    )))
                }
            }
            ColumnSelector::Name(name) => self
                .columns
                .iter()
                .position(|c| c.name == *name)
                .ok_or_else(|| Error::InvalidParameter(format!("no column named '{name}'"))),
        }
    }
}

/// Input formats understood by [`load_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Arff,
}

/// Reads and parses one file into a [`RawTable`].
pub fn load_table(path: &Path, format: TableFormat) -> Result<RawTable> {
    let text = std::fs::read_to_string(path)?;
    match format {
        TableFormat::Csv => parse_csv(&text),
        TableFormat::Arff => super::arff::parse_arff(&text),
    }
}

/// A CSV cell is missing when empty or a lone question mark.
fn csv_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "?"
}

pub(crate) fn parse_csv(text: &str) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| csv_error(&e))?
        .iter()
        .map(str::to_string)
        .collect::<Vec<_>>();
    if header.is_empty() {
        return Err(Error::EmptyInput("CSV has no header".into()));
    }

    let mut records = Vec::new();
    for rec in reader.records() {
        records.push(rec.map_err(|e| csv_error(&e))?);
    }

    // Type each column over all its non-missing cells. All-parseable is
    // numeric and none-parseable is categorical; a lone stray in a column
    // that is otherwise numeric is a located error, an even mix is
    // ambiguous.
    let mut columns = Vec::with_capacity(header.len());
    for (c, name) in header.iter().enumerate() {
        let mut numeric = 0usize;
        let mut text_cells = 0usize;
        let mut first_text: Option<(usize, String)> = None;
        for rec in &records {
            let cell = rec.get(c).unwrap_or("");
            if csv_missing(cell) {
                continue;
            }
            if cell.parse::<f64>().is_ok() {
                numeric += 1;
            } else {
                text_cells += 1;
                if first_text.is_none() {
                    first_text = Some((record_line(rec), cell.to_string()));
                }
            }
        }
        let ty = if text_cells == 0 {
            ColumnType::Numeric
        } else if numeric == 0 {
            ColumnType::Categorical
        } else if numeric > text_cells {
            let (line, cell) = first_text.expect("a text cell was counted");
            return Err(Error::Parse {
                line,
                column: name.clone(),
                message: format!("non-numeric entry '{cell}' in a numeric column"),
            });
        } else {
            return Err(Error::AmbiguousColumnType {
                column: name.clone(),
                message: format!("{numeric} numeric and {text_cells} non-numeric entries"),
            });
        };
        columns.push(Column {
            name: name.clone(),
            ty,
        });
    }

    let mut rows = Vec::with_capacity(records.len());
    for rec in &records {
        let mut row = Vec::with_capacity(columns.len());
        for (c, col) in columns.iter().enumerate() {
            let cell = rec.get(c).unwrap_or("");
            let value = if csv_missing(cell) {
                Value::Missing
            } else {
                match col.ty {
                    ColumnType::Numeric => Value::Number(
                        cell.parse::<f64>().expect("column was inferred numeric"),
                    ),
                    ColumnType::Categorical => Value::Text(cell.to_string()),
                }
            };
            row.push(value);
        }
        rows.push(row);
    }
    RawTable::new(columns, rows)
}

fn record_line(rec: &csv::StringRecord) -> usize {
    rec.position().map(|p| p.line() as usize).unwrap_or(0)
}

fn csv_error(e: &csv::Error) -> Error {
    let line = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or_default();
    Error::Parse {
        line,
        column: String::new(),
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_infers_numeric_and_categorical_columns() {
        let table = parse_csv("age,color,flag\n30,red,1\n41,blue,0\n55,red,1\n").unwrap();
        assert_eq!(table.n_rows(), 3);
        assert_eq!(table.columns()[0].ty, ColumnType::Numeric);
        assert_eq!(table.columns()[1].ty, ColumnType::Categorical);
        assert_eq!(table.columns()[2].ty, ColumnType::Numeric);
        assert_eq!(table.rows()[0][0], Value::Number(30.0));
        assert_eq!(table.rows()[1][1], Value::Text("blue".into()));
    }

    #[test]
    fn csv_missing_cells() {
        let table = parse_csv("a,b\n1,x\n,y\n3,?\n").unwrap();
        assert!(table.rows()[1][0].is_missing());
        assert!(table.rows()[2][1].is_missing());
        assert_eq!(table.columns()[0].ty, ColumnType::Numeric);
        assert_eq!(table.columns()[1].ty, ColumnType::Categorical);
    }

    #[test]
    fn stray_text_in_a_numeric_column_is_located() {
        let err = parse_csv("a\n1\n2\noops\n4\n5\n").unwrap_err();
        match err {
            Error::Parse {
                line,
                column,
                message,
            } => {
                assert_eq!(line, 4);
                assert_eq!(column, "a");
                assert!(message.contains("oops"), "message: {message}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn even_mix_is_ambiguous() {
        let err = parse_csv("a\n1\nx\n2\ny\n").unwrap_err();
        assert!(matches!(err, Error::AmbiguousColumnType { ref column, .. } if column == "a"));
    }

    #[test]
    fn numeric_looking_categories_stay_text_only_when_nothing_parses() {
        let table = parse_csv("code\nA1\nB2\nA1\n").unwrap();
        assert_eq!(table.columns()[0].ty, ColumnType::Categorical);
    }

    #[test]
    fn ragged_rows_are_parse_errors() {
        assert!(matches!(
            parse_csv("a,b\n1,2\n3\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn column_lookup_by_name_and_index() {
        let table = parse_csv("a,b\n1,2\n").unwrap();
        assert_eq!(table.column_index(&ColumnSelector::Index(1)).unwrap(), 1);
        assert_eq!(
            table
                .column_index(&ColumnSelector::Name("b".into()))
                .unwrap(),
            1
        );
        assert!(table.column_index(&ColumnSelector::Index(2)).is_err());
        assert!(table
            .column_index(&ColumnSelector::Name("zz".into()))
            .is_err());
    }

    #[test]
    fn loads_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "x,y\n1,a\n2,b\n").unwrap();
        let table = load_table(&path, TableFormat::Csv).unwrap();
        assert_eq!(table.n_rows(), 2);
        assert!(load_table(&dir.path().join("absent.csv"), TableFormat::Csv).is_err());
    }

    #[test]
    fn table_constructor_validates_cells() {
        let cols = vec![Column {
            name: "a".into(),
            ty: ColumnType::Numeric,
        }];
        assert!(RawTable::new(cols.clone(), vec![vec![Value::Text("x".into())]]).is_err());
        assert!(RawTable::new(cols.clone(), vec![vec![]]).is_err());
        assert!(RawTable::new(cols, vec![vec![Value::Missing]]).is_ok());
        assert!(RawTable::new(vec![], vec![]).is_err());
    }
}
