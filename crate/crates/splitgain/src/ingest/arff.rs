//! ARFF reader: @relation/@attribute/@data with numeric and nominal
//! attributes. Keywords are case-insensitive, `%` starts a comment, `?`
//! is missing, and values may be quoted with single or double quotes.
//! Sparse rows (brace syntax) are rejected.

use crate::error::{Error, Result};

use super::table::{Column, ColumnType, RawTable, Value};

enum ArffType {
    Numeric,
    Nominal(Vec<String>),
}

pub(crate) fn parse_arff(text: &str) -> Result<RawTable> {
    let mut attrs: Vec<(String, ArffType)> = Vec::new();
    let mut rows: Vec<Vec<Value>> = Vec::new();
    let mut in_data = false;

    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = line.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                continue;
            }
            if lower.starts_with("@attribute") {
                attrs.push(parse_attribute(line, line_no)?);
                continue;
            }
            if lower == "@data" {
                if attrs.is_empty() {
                    return Err(located(line_no, "", "@data before any @attribute"));
                }
                in_data = true;
                continue;
            }
            return Err(located(
                line_no,
                "",
                &format!("unrecognized header line '{line}'"),
            ));
        }
        if line.starts_with('{') {
            return Err(located(line_no, "", "sparse rows are not supported"));
        }
        rows.push(parse_data_row(line, line_no, &attrs)?);
    }

    if !in_data {
        return Err(located(0, "", "no @data section"));
    }
    let columns = attrs
        .into_iter()
        .map(|(name, ty)| Column {
            name,
            ty: match ty {
                ArffType::Numeric => ColumnType::Numeric,
                ArffType::Nominal(_) => ColumnType::Categorical,
            },
        })
        .collect();
    RawTable::new(columns, rows)
}

fn located(line: usize, column: &str, message: &str) -> Error {
    Error::Parse {
        line,
        column: column.to_string(),
        message: message.to_string(),
    }
}

/// Strips one layer of matching single or double quotes.
fn unquote(token: &str) -> String {
    let t = token.trim();
    if t.len() >= 2 {
        let bytes = t.as_bytes();
        if (bytes[0] == b'\'' && bytes[t.len() - 1] == b'\'')
            || (bytes[0] == b'"' && bytes[t.len() - 1] == b'"')
        {
            return t[1..t.len() - 1].to_string();
        }
    }
    t.to_string()
}

/// Parses `@attribute <name> <type>`; the name may be quoted.
fn parse_attribute(line: &str, line_no: usize) -> Result<(String, ArffType)> {
    let rest = line["@attribute".len()..].trim_start();
    if rest.is_empty() {
        return Err(located(line_no, "", "@attribute without a name"));
    }

    // Split the name off, respecting quotes.
    let (raw_name, raw_type) = if rest.starts_with('\'') || rest.starts_with('"') {
        let quote = rest.chars().next().expect("nonempty");
        match rest[1..].find(quote) {
            Some(end) => (&rest[..end + 2], &rest[end + 2..]),
            None => return Err(located(line_no, "", "unterminated quoted attribute name")),
        }
    } else {
        match rest.find(char::is_whitespace) {
            Some(end) => (&rest[..end], &rest[end..]),
            None => return Err(located(line_no, "", "@attribute without a type")),
        }
    };
    let name = unquote(raw_name);
    let spec = raw_type.trim();
    if spec.is_empty() {
        return Err(located(line_no, &name, "@attribute without a type"));
    }

    if spec.starts_with('{') {
        if !spec.ends_with('}') {
            return Err(located(line_no, &name, "unterminated nominal value list"));
        }
        let values: Vec<String> = split_quoted(&spec[1..spec.len() - 1])
            .into_iter()
            .map(|v| unquote(&v))
            .filter(|v| !v.is_empty())
            .collect();
        if values.is_empty() {
            return Err(located(line_no, &name, "nominal attribute with no values"));
        }
        return Ok((name, ArffType::Nominal(values)));
    }
    match spec.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok((name, ArffType::Numeric)),
        other => Err(located(
            line_no,
            &name,
            &format!("unsupported attribute type '{other}'"),
        )),
    }
}

/// Splits a comma-separated list, honoring single and double quotes.
fn split_quoted(line: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut current = String::new();
    let mut quote: Option<char> = None;
    for ch in line.chars() {
        match quote {
            Some(q) => {
                current.push(ch);
                if ch == q {
                    quote = None;
                }
            }
            None => match ch {
                '\'' | '"' => {
                    current.push(ch);
                    quote = Some(ch);
                }
                ',' => {
                    parts.push(current.trim().to_string());
                    current = String::new();
                }
                _ => current.push(ch),
            },
        }
    }
    parts.push(current.trim().to_string());
    parts
}

fn parse_data_row(
    line: &str,
    line_no: usize,
    attrs: &[(String, ArffType)],
) -> Result<Vec<Value>> {
    let tokens = split_quoted(line);
    if tokens.len() != attrs.len() {
        return Err(located(
            line_no,
            "",
            &format!("expected {} values, found {}", attrs.len(), tokens.len()),
        ));
    }
    let mut row = Vec::with_capacity(tokens.len());
    for (token, (name, ty)) in tokens.iter().zip(attrs) {
        let cell = unquote(token);
        if cell == "?" {
            row.push(Value::Missing);
            continue;
        }
        match ty {
            ArffType::Numeric => match cell.parse::<f64>() {
                Ok(v) => row.push(Value::Number(v)),
                Err(_) => {
                    return Err(located(
                        line_no,
                        name,
                        &format!("'{cell}' is not numeric"),
                    ))
                }
            },
            ArffType::Nominal(values) => {
                if !values.iter().any(|v| v == &cell) {
                    return Err(located(
                        line_no,
                        name,
                        &format!("'{cell}' is not among the declared values"),
                    ));
                }
                row.push(Value::Text(cell));
            }
        }
    }
    Ok(row)
}
