use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

use super::msn::csv_format;

const FIXED_COLUMNS: [&str; 3] = ["Data_Status", "State", "MSN"];

/// One row of a wide SEDS file. The series starts at the first non-empty
/// year cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SedsRecord {
    pub data_status: String,
    pub state: String,
    pub msn: String,
    pub series: TimeSeries<f64>,
}

fn parse_header(header: &csv::StringRecord) -> Result<Vec<i32>> {
    let fixed: Vec<&str> = header.iter().take(3).collect();
    if fixed != FIXED_COLUMNS {
        return Err(Error::Format {
            line: 1,
            message: format!(
                "header must start with {}, found {}",
                FIXED_COLUMNS.join(","),
                fixed.join(",")
            ),
        });
    }
    let years: Vec<i32> = header
        .iter()
        .skip(3)
        .map(|cell| {
            cell.trim().parse::<i32>().map_err(|_| Error::Format {
                line: 1,
                message: format!("year column {cell:?} is not an integer"),
            })
        })
        .collect::<Result<_>>()?;
    if years.is_empty() {
        return Err(Error::Format {
            line: 1,
            message: "header has no year columns".into(),
        });
    }
    if years.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::Format {
            line: 1,
            message: "year columns must be consecutive and increasing".into(),
        });
    }
    Ok(years)
}

/// Parses a wide SEDS CSV: `Data_Status,State,MSN,<year>,<year>,...`.
pub fn parse_seds_csv(reader: impl Read) -> Result<Vec<SedsRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = rdr.records();
    let header = match rows.next() {
        Some(h) => h.map_err(|e| csv_format(&e))?,
        None => {
            return Err(Error::Format {
                line: 1,
                message: "empty file".into(),
            })
        }
    };
    let years = parse_header(&header)?;

    let mut out = Vec::new();
    for row in rows {
        let row = row.map_err(|e| csv_format(&e))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let msn = row[2].to_string();
        let mut first = None;
        let mut values = Vec::new();
        for (i, cell) in row.iter().skip(3).enumerate() {
            let year = years[i];
            if cell.is_empty() {
                if first.is_some() {
                    return Err(Error::Gap { msn, year });
                }
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line,
                message: format!("{msn} {year}: {cell:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("{msn} {year}: value is not finite"),
                });
            }
            first.get_or_insert(year);
            values.push(v);
        }
        let start = first.ok_or_else(|| Error::Parse {
            line,
            message: format!("{msn} has no values"),
        })?;
        out.push(SedsRecord {
            data_status: row[0].to_string(),
            state: row[1].to_string(),
            series: TimeSeries::new(start, values, msn.clone())?,
            msn,
        });
    }
    Ok(out)
}

pub fn parse_seds_file(path: &Path) -> Result<Vec<SedsRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_seds_csv(file)
}

/// Shortest decimal text of `v` rounded to 12 significant digits.
pub fn format_sig12(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// Writes records in the wide layout over the union of their years.
pub fn write_seds_csv(records: &[SedsRecord], writer: impl Write) -> Result<()> {
    let first = records.iter().map(|r| r.series.start_year()).min();
    let last = records.iter().map(|r| r.series.end_year()).max();
    let (Some(first), Some(last)) = (first, last) else {
        return Err(Error::Argument("no records to write".into()));
    };
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((first..=last).map(|y| y.to_string()));
    w.write_record(&header).map_err(|e| csv_format(&e))?;
    for r in records {
        let mut row = vec![r.data_status.clone(), r.state.clone(), r.msn.clone()];
        row.extend((first..=last).map(|y| {
            r.series
                .value_at_year(y)
                .map_or(String::new(), |&v| format_sig12(v))
        }));
        w.write_record(&row).map_err(|e| csv_format(&e))?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_row() {
        let recs =
            parse_seds_csv("Data_Status,State,MSN,2020,2021\nX,CA,TETCB,100,110\n".as_bytes())
                .unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].series.values(), &[100.0, 110.0]);
        assert_eq!(recs[0].series.start_year(), 2020);
        assert_eq!(recs[0].state, "CA");
    }

    #[test]
    fn leading_blanks_trimmed() {
        let recs =
            parse_seds_csv("Data_Status,State,MSN,1960,1961,1962\nX,CA,SOTCB,,0,5\n".as_bytes())
                .unwrap();
        assert_eq!(recs[0].series.start_year(), 1961);
        assert_eq!(recs[0].series.values(), &[0.0, 5.0]);
    }

    #[test]
    fn internal_gap_is_fatal() {
        let err =
            parse_seds_csv("Data_Status,State,MSN,1960,1961,1962\nX,CA,TETCB,1,,3\n".as_bytes())
                .unwrap_err();
        match err {
            Error::Gap { msn, year } => assert_eq!((msn.as_str(), year), ("TETCB", 1961)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_header() {
        let err =
            parse_seds_csv("Data_Status,State,Code,2020\nX,CA,TETCB,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Format { line: 1, .. }));
        let err = parse_seds_csv("Data_Status,State,MSN,2020,2022\nX,CA,TETCB,1,2\n".as_bytes())
            .unwrap_err();
        assert!(matches!(err, Error::Format { line: 1, .. }));
    }

    #[test]
    fn non_numeric_cell() {
        let err =
            parse_seds_csv("Data_Status,State,MSN,2020\nX,CA,TETCB,abc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn ragged_row_is_format_error() {
        let err = parse_seds_csv("Data_Status,State,MSN,2020,2021\nX,CA,TETCB,1\n".as_bytes())
            .unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(100.0), "100");
        assert_eq!(format_sig12(0.1 + 0.2), "0.3");
        assert_eq!(format_sig12(7936.225), "7936.225");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
    }
}
