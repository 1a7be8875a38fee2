use std::path::Path;

use super::AdjacencyMatrix;
use crate::error::{Error, Result};

fn parse_err(path: &Path, line: u64, reason: impl Into<String>) -> Error {
    Error::Parse {
        file: path.display().to_string(),
        line: line as usize,
        reason: reason.into(),
    }
}

pub(crate) fn reader(path: &Path, headers: bool) -> Result<csv::Reader<std::fs::File>> {
    Ok(csv::ReaderBuilder::new()
        .has_headers(headers)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)?)
}

/// Reads every record as numbers, reporting the file and line on failure.
pub(crate) fn read_numeric_rows(path: &Path, headers: bool) -> Result<Vec<(u64, Vec<f64>)>> {
    let mut rdr = reader(path, headers)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let values = record
            .iter()
            .enumerate()
            .map(|(k, field)| {
                field
                    .parse::<f64>()
                    .map_err(|_| parse_err(path, line, format!("column {k}: `{field}` is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, values));
    }
    Ok(rows)
}

/// Writes an undirected network as `i,j,weight`, one row per edge.
pub fn write_edge_list(path: &Path, a: &AdjacencyMatrix) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["i", "j", "weight"])?;
    for (i, j, weight) in a.undirected_edges() {
        w.write_record([i.to_string(), j.to_string(), weight.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an `i,j,weight` edge list into a symmetric matrix. With `n` unset
/// the node count is one more than the largest index.
pub fn read_edge_list(path: &Path, n: Option<usize>) -> Result<AdjacencyMatrix> {
    let rows = read_numeric_rows(path, true)?;
    let mut edges = Vec::with_capacity(rows.len());
    for (line, values) in rows {
        if values.len() != 3 {
            return Err(parse_err(path, line, format!("expected 3 columns, got {}", values.len())));
        }
        let index = |x: f64| -> Result<usize> {
            if x >= 0.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(parse_err(path, line, format!("node index {x} is not a nonnegative integer")))
            }
        };
        let (i, j) = (index(values[0])?, index(values[1])?);
        if i == j {
            return Err(parse_err(path, line, "self-loop"));
        }
        if !(values[2] >= 0.0 && values[2].is_finite()) {
            return Err(parse_err(path, line, format!("weight {} is not nonnegative", values[2])));
        }
        edges.push((line, i, j, values[2]));
    }
    let inferred = edges.iter().map(|e| e.1.max(e.2) + 1).max().unwrap_or(0);
    let n = n.unwrap_or(inferred);
    let mut a = AdjacencyMatrix::zeros(n, n);
    for (line, i, j, w) in edges {
        if i >= n || j >= n {
            return Err(parse_err(path, line, format!("edge ({i}, {j}) outside {n} nodes")));
        }
        a.set_symmetric(i, j, w)?;
    }
    Ok(a)
}

/// Writes a dense matrix without headers, one row per line.
pub fn write_dense(path: &Path, a: &AdjacencyMatrix) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for i in 0..a.rows() {
        w.write_record(a.row(i).iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dense matrix written by [`write_dense`].
pub fn read_dense(path: &Path) -> Result<AdjacencyMatrix> {
    let rows = read_numeric_rows(path, false)?;
    let cols = rows.first().map(|r| r.1.len()).unwrap_or(0);
    let mut data = Vec::with_capacity(rows.len() * cols);
    for (line, values) in &rows {
        if values.len() != cols {
            return Err(parse_err(path, *line, format!("expected {cols} columns, got {}", values.len())));
        }
        if let Some(x) = values.iter().find(|x| !(**x >= 0.0)) {
            return Err(parse_err(path, *line, format!("entry {x} is negative")));
        }
        data.extend_from_slice(values);
    }
    AdjacencyMatrix::new(rows.len(), cols, data)
}

/// Reads `node,capacity` station rows (header required).
pub fn read_stations(path: &Path) -> Result<Vec<(usize, f64)>> {
    read_numeric_rows(path, true)?
        .into_iter()
        .map(|(line, v)| {
            if v.len() != 2 || v[0] < 0.0 || v[0].fract() != 0.0 {
                Err(parse_err(path, line, "expected `node,capacity` with an integer node"))
            } else {
                Ok((v[0] as usize, v[1]))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::random_graph;

    #[test]
    fn edge_list_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.csv");
        let a = random_graph(9, 0.5, (0.1, 1.0), 2).unwrap();
        write_edge_list(&path, &a).unwrap();
        assert_eq!(read_edge_list(&path, Some(9)).unwrap(), a);
    }

    #[test]
    fn dense_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let c = AdjacencyMatrix::new(2, 3, vec![0.1, 0.2, 0.3, 1.0, 0.5, 0.25]).unwrap();
        write_dense(&path, &c).unwrap();
        assert_eq!(read_dense(&path).unwrap(), c);
    }

    #[test]
    fn malformed_line_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "i,j,weight\n0,1,0.5\n1,2,abc\n").unwrap();
        match read_edge_list(&path, None).unwrap_err() {
            Error::Parse { file, line, .. } => {
                assert!(file.ends_with("bad.csv"));
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other}"),
        }
    }
}
