//! Corpus ingestion, synthetic corpora, result files and the `aesu` command
//! line on top of [`aesu_core`].

pub mod analysis;
pub mod cli;
mod error;
pub mod evaluate;
pub mod formats;
pub mod record;
pub mod synth;

pub use error::{IngestError, LineError, Result};
pub use formats::{parse_ava_line, read_corpus, write_results, Corpus, InputFormat, OutputFormat};
pub use record::{ImageRecord, RecordMeta, ResultRow};
pub use synth::{generate_synthetic, SyntheticSpec};
