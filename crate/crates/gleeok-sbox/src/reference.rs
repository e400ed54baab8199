use std::fmt;

use crate::asset::{parse_system, parse_table};
use crate::encoding::{verify_with_order_fallback, CharacterizationReport, EncodedSystem};
use crate::error::SboxError;
use crate::spec::{SboxName, SboxSpec};
use crate::table::{build_table, ConnTable, TableKind};

macro_rules! asset {
    ($dir:literal, $name:literal) => {
        (
            $name,
            include_str!(concat!("../assets/", $dir, "/", $name, ".txt")),
        )
    };
}

const TABLES: [(&str, &str); 9] = [
    asset!("tables", "ddt_s3"),
    asset!("tables", "ddt_s4"),
    asset!("tables", "ddt_s5"),
    asset!("tables", "lat_s3"),
    asset!("tables", "lat_s4"),
    asset!("tables", "lat_s5"),
    asset!("tables", "dlct_s3"),
    asset!("tables", "dlct_s4"),
    asset!("tables", "dlct_s5"),
];

/// In the order the systems are published.
const SYSTEMS: [(&str, &str); 12] = [
    asset!("systems", "ddt_s3"),
    asset!("systems", "lat_s3"),
    asset!("systems", "dlct_s3"),
    asset!("systems", "dlct_signed_s3"),
    asset!("systems", "ddt_s4"),
    asset!("systems", "lat_s4"),
    asset!("systems", "dlct_s4"),
    asset!("systems", "dlct_signed_s4"),
    asset!("systems", "ddt_s5"),
    asset!("systems", "lat_s5"),
    asset!("systems", "dlct_s5"),
    asset!("systems", "dlct_signed_s5"),
];

/// Raw text of every embedded asset as `(file stem, contents)`.
pub fn table_assets() -> &'static [(&'static str, &'static str)] {
    &TABLES
}

pub fn system_assets() -> &'static [(&'static str, &'static str)] {
    &SYSTEMS
}

/// The nine embedded reference tables.
pub fn reference_tables() -> Result<Vec<(String, SboxName, ConnTable)>, SboxError> {
    TABLES
        .iter()
        .map(|(name, text)| parse_table(text).map(|(sbox, table)| (name.to_string(), sbox, table)))
        .collect()
}

/// The twelve embedded inequality systems.
pub fn embedded_systems() -> Result<Vec<EncodedSystem>, SboxError> {
    SYSTEMS.iter().map(|(_, text)| parse_system(text)).collect()
}

/// The embedded system for `(sbox, kind)`.
pub fn embedded_system(sbox: SboxName, kind: TableKind) -> Result<EncodedSystem, SboxError> {
    embedded_systems()?
        .into_iter()
        .find(|s| s.encoding.sbox() == sbox && s.encoding.kind() == kind)
        .ok_or_else(|| SboxError::UnknownSbox(format!("{sbox}/{kind}")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableMismatch {
    pub table: String,
    pub row: usize,
    pub col: usize,
    pub expected: i32,
    pub actual: i32,
}

impl fmt::Display for TableMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{:x}][{:x}]: expected {}, got {}",
            self.table, self.row, self.col, self.expected, self.actual
        )
    }
}

/// Result of checking generated tables against the references.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableReport {
    pub tables_checked: usize,
    pub mismatches: Vec<TableMismatch>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Entrywise comparison of freshly generated tables with the references.
pub fn verify_reference_tables() -> Result<TableReport, SboxError> {
    verify_reference_tables_with(|name| name.spec())
}

/// As [`verify_reference_tables`] with caller-supplied Sbox truth tables.
pub fn verify_reference_tables_with(
    specs: impl Fn(SboxName) -> SboxSpec,
) -> Result<TableReport, SboxError> {
    let mut mismatches = Vec::new();
    let refs = reference_tables()?;
    for (name, sbox, reference) in &refs {
        let generated = build_table(&specs(*sbox), reference.kind());
        for row in 0..reference.size() {
            for col in 0..reference.size() {
                let (expected, actual) = (reference.get(row, col), generated.get(row, col));
                if expected != actual {
                    mismatches.push(TableMismatch {
                        table: name.clone(),
                        row,
                        col,
                        expected,
                        actual,
                    });
                }
            }
        }
    }
    Ok(TableReport {
        tables_checked: refs.len(),
        mismatches,
    })
}

/// Characterization reports for all twelve systems (declared order, plus
/// the opposite order where the declared one fails).
pub fn verify_all_systems(
) -> Result<Vec<(CharacterizationReport, Option<CharacterizationReport>)>, SboxError> {
    embedded_systems()?
        .iter()
        .map(verify_with_order_fallback)
        .collect()
}
