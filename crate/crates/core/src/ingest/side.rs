use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

use super::msn::csv_format;

/// Reads `year,<col>,<col>,...` with strictly consecutive years, one series
/// per non-year column, labelled by its header.
pub fn read_year_table(reader: impl Read) -> Result<Vec<TimeSeries<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_format(&e))?.clone();
    if header.get(0) != Some("year") || header.len() < 2 {
        return Err(Error::Format {
            line: 1,
            message: "header must be year,<column>,...".into(),
        });
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut start = None;
    let mut prev: Option<i32> = None;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for row in rdr.records() {
        let row = row.map_err(|e| csv_format(&e))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let year: i32 = row[0].parse().map_err(|_| Error::Parse {
            line,
            message: format!("year {:?} is not an integer", &row[0]),
        })?;
        if let Some(p) = prev {
            if year != p + 1 {
                return Err(Error::Format {
                    line,
                    message: format!("year {year} does not follow {p}"),
                });
            }
        }
        prev = Some(year);
        start.get_or_insert(year);
        for (col, cell) in columns.iter_mut().zip(row.iter().skip(1)) {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line,
                message: format!("{year}: {cell:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("{year}: value is not finite"),
                });
            }
            col.push(v);
        }
    }
    let start = start.ok_or_else(|| Error::Format {
        line: 2,
        message: "table has no rows".into(),
    })?;
    names
        .into_iter()
        .zip(columns)
        .map(|(name, values)| TimeSeries::new(start, values, name))
        .collect()
}

pub fn read_year_table_file(path: &Path) -> Result<Vec<TimeSeries<f64>>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_year_table(file)
}

/// Reads a `year,value` side file (population, precipitation, deflator...).
pub fn read_side_series(reader: impl Read, label: &str) -> Result<TimeSeries<f64>> {
    let mut cols = read_year_table(reader)?;
    if cols.len() != 1 || cols[0].label() != "value" {
        return Err(Error::Format {
            line: 1,
            message: "side file header must be year,value".into(),
        });
    }
    Ok(cols.remove(0).with_label(label))
}

pub fn read_side_file(path: &Path, label: &str) -> Result<TimeSeries<f64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_side_series(file, label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn side_file_round() {
        let s =
            read_side_series("year,value\n2000,1.5\n2001,2.5\n".as_bytes(), "population").unwrap();
        assert_eq!(s.start_year(), 2000);
        assert_eq!(s.values(), &[1.5, 2.5]);
        assert_eq!(s.label(), "population");
    }

    #[test]
    fn non_consecutive_years_rejected() {
        let err = read_side_series("year,value\n2000,1\n2002,2\n".as_bytes(), "x").unwrap_err();
        assert!(matches!(err, Error::Format { line: 3, .. }));
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(read_side_series("yr,value\n2000,1\n".as_bytes(), "x").is_err());
        assert!(read_side_series("year,val\n2000,1\n".as_bytes(), "x").is_err());
    }

    #[test]
    fn multi_column_table() {
        let cols = read_year_table("year,a,b\n2022,1,2\n2023,3,4\n".as_bytes()).unwrap();
        assert_eq!(cols.len(), 2);
        assert_eq!(cols[1].label(), "b");
        assert_eq!(cols[1].values(), &[2.0, 4.0]);
    }
}
