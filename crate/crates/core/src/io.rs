//! Shared reader for the `# dim=n` headed CSV files (measures, polytopes).

use crate::error::{Error, Result};

/// `(line number, fields)`.
pub type Row = (usize, Vec<f64>);

/// Parse the `# dim=n` header and the numeric rows that follow.
/// Returns the dimension and every data row.
pub fn parse_dim_csv(text: &str) -> Result<(usize, Vec<Row>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .skip_while(|(_, l)| l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let n = header
        .trim()
        .strip_prefix('#')
        .and_then(|h| h.trim().strip_prefix("dim="))
        .and_then(|d| d.trim().parse::<usize>().ok())
        .ok_or_else(|| Error::Parse {
            line: hline + 1,
            msg: format!("expected header '# dim=n', found '{header}'"),
        })?;
    if n == 0 {
        return Err(Error::Parse {
            line: hline + 1,
            msg: "dimension must be positive".into(),
        });
    }
    let body_start = hline + 1;
    let body: String = text.lines().skip(body_start).collect::<Vec<_>>().join("\n");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(body.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize) + body_start,
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize) + body_start;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let fields = rec
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("'{f}' is not a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, fields));
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: body_start,
            msg: "no data rows".into(),
        });
    }
    Ok((n, rows))
}
