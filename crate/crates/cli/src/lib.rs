//! File formats, reports and the command-line driver for `cow-core`.

pub mod app;
pub mod error;
pub mod ingest;
pub mod ledger_io;
pub mod prices;
pub mod report;

pub use app::{run, simulate};
pub use error::IngestError;
