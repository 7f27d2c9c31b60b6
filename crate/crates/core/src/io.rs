//! CSV ingestion and export.
//!
//! Data files: the first row holds variable names, every later row one
//! observation. Correlation files: the same header row followed by the `p`
//! rows of the matrix. Lines starting with `#` are comments.

use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::ci::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::skeleton::SepsetMap;

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub names: Vec<String>,
    /// `n x p`.
    pub data: DMatrix<f64>,
}

fn read_numeric_rows<R: Read>(reader: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(Error::InvalidData("missing header row".into()));
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        if rec.len() != names.len() {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", names.len(), rec.len()),
            });
        }
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line,
                        msg: format!("`{f}` is not a finite number"),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((names, rows))
}

pub fn read_data_csv<R: Read>(reader: R) -> Result<Dataset> {
    let (names, rows) = read_numeric_rows(reader)?;
    let p = names.len();
    let data = DMatrix::from_row_iterator(rows.len(), p, rows.into_iter().flatten());
    Ok(Dataset { names, data })
}

pub fn read_correlation_csv<R: Read>(reader: R) -> Result<(Vec<String>, CorrelationMatrix)> {
    let (names, rows) = read_numeric_rows(reader)?;
    let p = names.len();
    if rows.len() != p {
        return Err(Error::InvalidData(format!(
            "correlation matrix has {p} columns but {} rows",
            rows.len()
        )));
    }
    let m = DMatrix::from_row_iterator(p, p, rows.into_iter().flatten());
    Ok((names, CorrelationMatrix::new(m)?))
}

pub fn write_data_csv<W: Write>(writer: W, names: &[String], data: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(names)?;
    for row in data.row_iter() {
        w.write_record(row.iter().map(|v| format!("{v:?}")))?;
    }
    w.flush()?;
    Ok(())
}

/// One line per deleted pair: `i j s1 s2 ...`.
pub fn sepsets_to_text(p: usize, sepsets: &SepsetMap) -> String {
    let mut s = format!("p={p}\n");
    for ((i, j), set) in sepsets.iter() {
        s.push_str(&format!("{i} {j}"));
        for v in set {
            s.push_str(&format!(" {v}"));
        }
        s.push('\n');
    }
    s
}

/// `X1, X2, ...` for unnamed variables.
pub fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|k| format!("X{k}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_data() {
        let d = read_data_csv("# schema=x/1\na,b\n1,2\n3,4.5\n".as_bytes()).unwrap();
        assert_eq!(d.names, vec!["a", "b"]);
        assert_eq!(d.data, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.5]));
    }

    #[test]
    fn rejects_malformed_data() {
        assert!(read_data_csv("a,b\n1,x\n".as_bytes()).is_err());
        assert!(read_data_csv("a,b\n1\n".as_bytes()).is_err());
        assert!(read_data_csv("a,b\n1,NaN\n".as_bytes()).is_err());
    }

    #[test]
    fn data_round_trip() {
        let m = DMatrix::from_row_slice(2, 2, &[0.1, -2.0, 1e-17, 3.25]);
        let mut buf = Vec::new();
        write_data_csv(&mut buf, &default_names(2), &m).unwrap();
        let d = read_data_csv(buf.as_slice()).unwrap();
        assert_eq!(d.data, m);
        assert_eq!(d.names, vec!["X1", "X2"]);
    }

    #[test]
    fn reads_correlation() {
        let (names, c) = read_correlation_csv("x,y\n1,0.5\n0.5,1\n".as_bytes()).unwrap();
        assert_eq!(names.len(), 2);
        assert_eq!(c.get(0, 1), 0.5);
        assert!(read_correlation_csv("x,y\n1,0.5\n".as_bytes()).is_err());
        assert!(read_correlation_csv("x,y\n1,0.5\n0.4,1\n".as_bytes()).is_err());
    }

    #[test]
    fn sepset_text() {
        let mut s = SepsetMap::new();
        s.insert(3, 0, &[2, 1]);
        s.insert(1, 2, &[]);
        assert_eq!(sepsets_to_text(4, &s), "p=4\n0 3 1 2\n1 2\n");
    }
}
