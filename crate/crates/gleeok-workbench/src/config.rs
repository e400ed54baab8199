use std::path::PathBuf;

use gleeok_cipher::BitOrder;
use serde::Deserialize;

use crate::cli::{Format, GlobalArgs, OrderArg};
use crate::error::{usage, WorkbenchError};

/// Settings that may come from a TOML file; flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub keys: Option<usize>,
    pub samples_log2: Option<u32>,
    pub solver: Option<String>,
    pub order: Option<OrderArg>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

pub fn parse_config(text: &str) -> Result<FileConfig, WorkbenchError> {
    Ok(toml::from_str(text)?)
}

pub const DEFAULT_SEED: u64 = 0x91ee0c;

/// Effective global settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub seed: u64,
    pub threads: Option<usize>,
    pub keys: Option<usize>,
    pub samples_log2: Option<u32>,
    pub solver: Option<String>,
    pub order: BitOrder,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Settings {
    pub fn resolve(args: &GlobalArgs) -> Result<Self, WorkbenchError> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                parse_config(&text)?
            }
            None => FileConfig::default(),
        };
        Ok(Settings {
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            threads: args.threads.or(file.threads),
            keys: args.keys.or(file.keys),
            samples_log2: args.samples_log2.or(file.samples_log2),
            solver: args.solver.clone().or(file.solver),
            order: args.order.or(file.order).unwrap_or(OrderArg::Msb).into(),
            format: args.format.or(file.format).unwrap_or(Format::Text),
            output: args.output.clone().or(file.output),
        })
    }
}
