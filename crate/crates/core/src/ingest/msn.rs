use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../../data/msn_codes.csv");
const NEAREST_SHOWN: usize = 3;

/// Unit families that drive conversion at panel assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnitKind {
    BillionBtu,
    DollarsPerMillionBtu,
    Physical,
}

impl UnitKind {
    pub fn parse(tag: &str) -> Option<Self> {
        match tag.trim() {
            "billion Btu" => Some(Self::BillionBtu),
            "dollars per million Btu" => Some(Self::DollarsPerMillionBtu),
            "physical" => Some(Self::Physical),
            _ => None,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::BillionBtu => "billion Btu",
            Self::DollarsPerMillionBtu => "dollars per million Btu",
            Self::Physical => "physical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MsnKey {
    pub code: String,
    pub source: String,
    pub sector_or_type: String,
    pub unit: UnitKind,
}

/// `[A-Z0-9]{5}`
pub fn is_valid_code(code: &str) -> bool {
    code.len() == 5
        && code
            .bytes()
            .all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MsnTable {
    entries: BTreeMap<String, MsnKey>,
}

impl MsnTable {
    /// The table shipped with the crate.
    pub fn bundled() -> &'static MsnTable {
        static TABLE: OnceLock<MsnTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            MsnTable::from_reader(BUNDLED.as_bytes()).expect("bundled MSN table is valid")
        })
    }

    /// Reads `code,source,sector_or_type,unit` rows.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut table = Self::default();
        table.extend_from_reader(reader)?;
        Ok(table)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }

    /// Adds or replaces rows. Later rows win.
    pub fn extend_from_reader(&mut self, reader: impl Read) -> Result<()> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers().map_err(|e| csv_format(&e))?.clone();
        let expected = ["code", "source", "sector_or_type", "unit"];
        if header.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Format {
                line: 1,
                message: format!("MSN table header must be {}", expected.join(",")),
            });
        }
        for row in rdr.records() {
            let row = row.map_err(|e| csv_format(&e))?;
            let line = row.position().map_or(0, |p| p.line() as usize);
            let code = &row[0];
            if !is_valid_code(code) {
                return Err(Error::Format {
                    line,
                    message: format!("invalid MSN code {code:?}"),
                });
            }
            let unit = UnitKind::parse(&row[3]).ok_or_else(|| Error::Format {
                line,
                message: format!("unknown unit tag {:?}", &row[3]),
            })?;
            self.entries.insert(
                code.to_string(),
                MsnKey {
                    code: code.to_string(),
                    source: row[1].to_string(),
                    sector_or_type: row[2].to_string(),
                    unit,
                },
            );
        }
        Ok(())
    }

    pub fn extend_from_path(&mut self, path: &Path) -> Result<()> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        self.extend_from_reader(file)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn decode(&self, code: &str) -> Result<MsnKey> {
        self.entries
            .get(code)
            .cloned()
            .ok_or_else(|| Error::UnknownMsn {
                code: code.to_string(),
                nearest: self.nearest(code),
            })
    }

    /// Up to three codes by edit distance, ties broken alphabetically.
    pub fn nearest(&self, code: &str) -> Vec<String> {
        let mut scored: Vec<(usize, &String)> = self
            .entries
            .keys()
            .map(|k| (strsim::levenshtein(code, k), k))
            .collect();
        scored.sort();
        scored
            .into_iter()
            .take(NEAREST_SHOWN)
            .map(|(_, k)| k.clone())
            .collect()
    }
}

/// Decodes against the bundled table.
pub fn decode_msn(code: &str) -> Result<MsnKey> {
    MsnTable::bundled().decode(code)
}

pub(crate) fn csv_format(e: &csv::Error) -> Error {
    Error::Format {
        line: e.position().map_or(0, |p| p.line() as usize),
        message: e.to_string(),
    }
}
