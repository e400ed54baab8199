//! Sbox connectivity tables (DDT, LAT, DLCT) and checks that the published
//! MILP inequality systems describe exactly the table entries they encode.
//!
//! Reference tables and inequality systems ship as text assets; see
//! [`asset`] for the grammar.

pub mod asset;
mod encoding;
mod error;
mod ineq;
mod reference;
mod spec;
mod table;

pub use encoding::{
    verify_characterization, verify_with_order_fallback, CharacterizationReport, EncodedSystem,
    PointEncoding, Transition,
};
pub use error::SboxError;
pub use ineq::{
    cutting_off_inequality, feasible_points, parse_linear, IneqSystem, Inequality,
    ENUMERATION_LIMIT,
};
pub use reference::{
    embedded_system, embedded_systems, reference_tables, system_assets, table_assets,
    verify_all_systems, verify_reference_tables, verify_reference_tables_with, TableMismatch,
    TableReport,
};
pub use spec::{SboxName, SboxSpec};
pub use table::{build_table, ConnTable, TableKind};
