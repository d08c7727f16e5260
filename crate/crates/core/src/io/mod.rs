//! File formats: JSON network documents and TU benchmark collections.

mod network_file;
mod tu;

pub use network_file::{network_from_json, network_to_json, parse_network_file, write_network_file, NetworkFile};
pub use tu::{parse_tu_dataset, TuDataset};
