//! Catalog, configuration, runners and report formats on top of `ahgeo-core`.

pub mod catalog;
pub mod config;
pub mod error;
pub mod report;
pub mod runners;

pub use catalog::{catalog_get, catalog_list, CatalogEntry};
pub use config::{Config, Format};
pub use error::{CliError, CliResult};
pub use report::{emit, Report};
