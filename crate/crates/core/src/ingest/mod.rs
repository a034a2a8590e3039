//! SEDS-style wide CSV ingestion, MSN decoding and panel assembly.
//!
//! Consumption and production series arrive in billion Btu and leave in
//! trillion Btu. Price series are optionally divided by a deflator read from
//! a `year,value` side file.

mod msn;
mod seds;
mod side;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

pub use msn::{decode_msn, is_valid_code, MsnKey, MsnTable, UnitKind};
pub use seds::{format_sig12, parse_seds_csv, parse_seds_file, write_seds_csv, SedsRecord};
pub use side::{read_side_file, read_side_series, read_year_table, read_year_table_file};

use crate::arimax::ExogMatrix;
use crate::error::{Error, Result};
use crate::series::{align_panel, TimeSeries};

pub const BTU_FACTOR: f64 = 1000.0;

/// Reference to a modelling series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesRef {
    /// One MSN, or the sum of several written `A+B`.
    Msn(Vec<String>),
    /// A named side series such as `population`.
    Side(String),
    /// `file:<path>[:<column>]`, a year table on disk.
    File {
        path: PathBuf,
        column: Option<String>,
    },
}

impl SeriesRef {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::Argument("empty series reference".into()));
        }
        if let Some(rest) = text.strip_prefix("file:") {
            return Ok(match rest.rsplit_once(':') {
                Some((path, col)) if !col.is_empty() && !col.contains(['/', '\\']) => {
                    SeriesRef::File {
                        path: PathBuf::from(path),
                        column: Some(col.to_string()),
                    }
                }
                _ => SeriesRef::File {
                    path: PathBuf::from(rest),
                    column: None,
                },
            });
        }
        let parts: Vec<&str> = text.split('+').map(str::trim).collect();
        if parts.iter().all(|p| is_valid_code(p)) {
            return Ok(SeriesRef::Msn(
                parts.into_iter().map(str::to_string).collect(),
            ));
        }
        if parts.len() > 1 {
            return Err(Error::Argument(format!(
                "{text:?}: only MSN codes can be summed"
            )));
        }
        Ok(SeriesRef::Side(text.to_string()))
    }
}

impl fmt::Display for SeriesRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesRef::Msn(codes) => write!(f, "{}", codes.join("+")),
            SeriesRef::Side(name) => write!(f, "{name}"),
            SeriesRef::File { path, column: None } => write!(f, "file:{}", path.display()),
            SeriesRef::File {
                path,
                column: Some(c),
            } => write!(f, "file:{}:{c}", path.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conversion {
    None,
    BillionToTrillionBtu,
    Deflated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSource {
    pub label: String,
    pub origin: String,
    pub conversion: Conversion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelMetadata {
    pub response: ColumnSource,
    pub exog: Vec<ColumnSource>,
    pub inflation_adjusted: bool,
    pub excluded_after: Option<i32>,
}

/// Response and exogenous columns over a common year range.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub response: TimeSeries<f64>,
    pub exog: ExogMatrix<f64>,
    pub metadata: PanelMetadata,
}

impl Panel {
    pub fn start_year(&self) -> i32 {
        self.response.start_year()
    }

    pub fn end_year(&self) -> i32 {
        self.response.end_year()
    }
}

/// Everything `build_panel` may resolve references against.
#[derive(Debug, Clone)]
pub struct PanelSources<'a> {
    pub records: &'a [SedsRecord],
    pub table: &'a MsnTable,
    pub side: BTreeMap<String, TimeSeries<f64>>,
    pub deflator: Option<TimeSeries<f64>>,
    pub inflation_adjust: bool,
    /// Required when the records hold more than one state.
    pub state: Option<String>,
}

impl<'a> PanelSources<'a> {
    pub fn new(records: &'a [SedsRecord], table: &'a MsnTable) -> Self {
        Self {
            records,
            table,
            side: BTreeMap::new(),
            deflator: None,
            inflation_adjust: false,
            state: None,
        }
    }

    fn record(&self, code: &str) -> Result<&'a SedsRecord> {
        let mut hits = self
            .records
            .iter()
            .filter(|r| r.msn == code && self.state.as_deref().is_none_or(|s| r.state == s));
        let first = hits
            .next()
            .ok_or_else(|| Error::MissingSeries(format!("{code} is not in the data file")))?;
        if hits.next().is_some() {
            return Err(Error::Argument(format!(
                "{code} appears for several states; choose one"
            )));
        }
        Ok(first)
    }

    fn deflate(&self, series: &TimeSeries<f64>) -> Result<TimeSeries<f64>> {
        let deflator = self.deflator.as_ref().ok_or_else(|| {
            Error::MissingSeries("inflation adjustment requested without a deflator".into())
        })?;
        if deflator.start_year() > series.start_year() || deflator.end_year() < series.end_year() {
            return Err(Error::Coverage(format!(
                "deflator covers {}..={} but {} spans {}..={}",
                deflator.start_year(),
                deflator.end_year(),
                series.label(),
                series.start_year(),
                series.end_year()
            )));
        }
        let values = (0..series.len())
            .map(|i| {
                let year = series.year_of(i);
                let d = *deflator.value_at_year(year).expect("coverage checked");
                if d == 0.0 {
                    return Err(Error::Degenerate(format!("deflator is zero in {year}")));
                }
                Ok(series.values()[i] / d)
            })
            .collect::<Result<Vec<_>>>()?;
        TimeSeries::new(series.start_year(), values, series.label())
    }

    fn resolve_msn(&self, code: &str) -> Result<(TimeSeries<f64>, Conversion)> {
        let key = self.table.decode(code)?;
        let raw = &self.record(code)?.series;
        match key.unit {
            UnitKind::BillionBtu => Ok((
                raw.map(|v| v / BTU_FACTOR)?,
                Conversion::BillionToTrillionBtu,
            )),
            UnitKind::DollarsPerMillionBtu if self.inflation_adjust => {
                Ok((self.deflate(raw)?, Conversion::Deflated))
            }
            _ => Ok((raw.clone(), Conversion::None)),
        }
    }

    /// Resolves a reference into a converted, labelled series.
    pub fn resolve(&self, reference: &SeriesRef) -> Result<(TimeSeries<f64>, ColumnSource)> {
        let label = reference.to_string();
        let (series, origin, conversion) = match reference {
            SeriesRef::Msn(codes) => {
                let parts = codes
                    .iter()
                    .map(|c| self.resolve_msn(c))
                    .collect::<Result<Vec<_>>>()?;
                let conversion = parts[0].1;
                let series = if parts.len() == 1 {
                    parts.into_iter().next().expect("one part").0
                } else {
                    if parts.iter().any(|p| p.1 != conversion) {
                        return Err(Error::Argument(format!(
                            "{label}: cannot sum series of different units"
                        )));
                    }
                    let aligned = align_panel(&parts.into_iter().map(|p| p.0).collect::<Vec<_>>())?;
                    let cols = aligned.series();
                    let sum = (0..aligned.len())
                        .map(|i| cols.iter().map(|c| c.values()[i]).sum())
                        .collect();
                    TimeSeries::new(aligned.start_year(), sum, label.clone())?
                };
                let state = self.records.first().map_or("", |r| r.state.as_str());
                let state = self.state.as_deref().unwrap_or(state);
                (series, format!("SEDS {state} {label}"), conversion)
            }
            SeriesRef::Side(name) => {
                let s = self
                    .side
                    .get(name)
                    .ok_or_else(|| Error::MissingSeries(format!("no side file provides {name}")))?;
                (s.clone(), format!("side file {name}"), Conversion::None)
            }
            SeriesRef::File { path, column } => {
                let cols = read_year_table_file(path)?;
                let wanted = column.as_deref().unwrap_or("value");
                let s = cols
                    .into_iter()
                    .find(|c| c.label() == wanted)
                    .ok_or_else(|| {
                        Error::MissingSeries(format!("{} has no column {wanted}", path.display()))
                    })?;
                (s, format!("file {}", path.display()), Conversion::None)
            }
        };
        let source = ColumnSource {
            label: label.clone(),
            origin,
            conversion,
        };
        Ok((series.with_label(label), source))
    }
}

/// Resolves, converts and aligns the response and exogenous columns.
pub fn build_panel(
    sources: &PanelSources<'_>,
    response: &SeriesRef,
    exog: &[SeriesRef],
) -> Result<Panel> {
    let (y, y_src) = sources.resolve(response)?;
    let mut all = vec![y];
    let mut exog_src = Vec::with_capacity(exog.len());
    for r in exog {
        let (s, src) = sources.resolve(r)?;
        all.push(s);
        exog_src.push(src);
    }
    let mut aligned = align_panel(&all)?.into_series();
    let response = aligned.remove(0);
    Ok(Panel {
        response,
        exog: ExogMatrix::new(aligned)?,
        metadata: PanelMetadata {
            response: y_src,
            exog: exog_src,
            inflation_adjusted: sources.inflation_adjust,
            excluded_after: None,
        },
    })
}

/// Drops every year after `cutoff_year`.
pub fn exclude_years(panel: &Panel, cutoff_year: i32) -> Result<Panel> {
    if cutoff_year < panel.start_year() {
        return Err(Error::Argument(format!(
            "cutoff {cutoff_year} precedes the panel start {}",
            panel.start_year()
        )));
    }
    let last = cutoff_year.min(panel.end_year());
    let mut metadata = panel.metadata.clone();
    metadata.excluded_after = Some(
        metadata
            .excluded_after
            .map_or(cutoff_year, |c| c.min(cutoff_year)),
    );
    Ok(Panel {
        response: panel.response.slice_years(panel.start_year(), last)?,
        exog: if panel.exog.is_empty() {
            ExogMatrix::empty()
        } else {
            panel.exog.slice_years(panel.start_year(), last)?
        },
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DATA: &str = "Data_Status,State,MSN,2018,2019,2020,2021\n\
        X,CA,TETCB,4000,4100,3900,4050\n\
        X,CA,PATCB,1000,1100,900,950\n\
        X,CA,NGTCB,2000,2010,1990,2005\n\
        X,CA,TETCD,10,12,11,13\n\
        X,CA,TEPRB,,2500,2600,2700\n";

    fn records() -> Vec<SedsRecord> {
        parse_seds_csv(DATA.as_bytes()).unwrap()
    }

    #[test]
    fn reference_parsing() {
        assert_eq!(
            SeriesRef::parse("TETCB").unwrap(),
            SeriesRef::Msn(vec!["TETCB".into()])
        );
        assert_eq!(
            SeriesRef::parse("PATCB+NGTCB").unwrap(),
            SeriesRef::Msn(vec!["PATCB".into(), "NGTCB".into()])
        );
        assert_eq!(
            SeriesRef::parse("population").unwrap(),
            SeriesRef::Side("population".into())
        );
        assert_eq!(
            SeriesRef::parse("file:data/x.csv:rain").unwrap(),
            SeriesRef::File {
                path: "data/x.csv".into(),
                column: Some("rain".into())
            }
        );
        assert_eq!(
            SeriesRef::parse("file:data/x.csv").unwrap().to_string(),
            "file:data/x.csv"
        );
    }

    #[test]
    fn billion_to_trillion() {
        let recs = records();
        let src = PanelSources::new(&recs, MsnTable::bundled());
        let p = build_panel(&src, &SeriesRef::parse("TETCB").unwrap(), &[]).unwrap();
        assert_eq!(p.response.values()[0], 4.0);
        assert_eq!(
            p.metadata.response.conversion,
            Conversion::BillionToTrillionBtu
        );
    }

    #[test]
    fn sums_and_alignment() {
        let recs = records();
        let src = PanelSources::new(&recs, MsnTable::bundled());
        let exog = [SeriesRef::parse("TEPRB").unwrap()];
        let p = build_panel(&src, &SeriesRef::parse("PATCB+NGTCB").unwrap(), &exog).unwrap();
        assert_eq!(p.start_year(), 2019);
        for (a, b) in p.response.values().iter().zip([3.11, 2.89, 2.955]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(p.exog.names(), vec!["TEPRB"]);
    }

    #[test]
    fn identity_deflator() {
        let recs = records();
        let mut src = PanelSources::new(&recs, MsnTable::bundled());
        src.inflation_adjust = true;
        src.deflator = Some(TimeSeries::new(2010, vec![1.0; 12], "deflator").unwrap());
        let p = build_panel(&src, &SeriesRef::parse("TETCD").unwrap(), &[]).unwrap();
        assert_eq!(p.response.values(), &[10.0, 12.0, 11.0, 13.0]);
        assert_eq!(p.metadata.response.conversion, Conversion::Deflated);

        src.deflator = Some(TimeSeries::new(2019, vec![1.0; 3], "deflator").unwrap());
        let err = build_panel(&src, &SeriesRef::parse("TETCD").unwrap(), &[]).unwrap_err();
        assert!(matches!(err, Error::Coverage(_)));
    }

    #[test]
    fn missing_references() {
        let recs = records();
        let src = PanelSources::new(&recs, MsnTable::bundled());
        let err = build_panel(
            &src,
            &SeriesRef::parse("TETCB").unwrap(),
            &[SeriesRef::parse("HYTCB").unwrap()],
        );
        assert!(matches!(err, Err(Error::MissingSeries(_))));
        let err = build_panel(
            &src,
            &SeriesRef::parse("TETCB").unwrap(),
            &[SeriesRef::parse("precipitation").unwrap()],
        );
        assert!(matches!(err, Err(Error::MissingSeries(_))));
        let err = build_panel(&src, &SeriesRef::parse("ZZZZZ").unwrap(), &[]);
        assert!(matches!(err, Err(Error::UnknownMsn { .. })));
    }

    #[test]
    fn exclusion_bounds() {
        let recs = records();
        let src = PanelSources::new(&recs, MsnTable::bundled());
        let p = build_panel(&src, &SeriesRef::parse("TETCB").unwrap(), &[]).unwrap();
        let cut = exclude_years(&p, 2019).unwrap();
        assert_eq!((cut.start_year(), cut.end_year()), (2018, 2019));
        assert_eq!(cut.metadata.excluded_after, Some(2019));
        assert_eq!(exclude_years(&p, 2021).unwrap().response, p.response);
        assert!(exclude_years(&p, 1900).is_err());
    }
}
