//! File formats: scenario configs, result CSV and SVG plots.

pub mod config;
pub mod csv;
pub mod svg;

pub use config::{parse_config, serialize_config, ParseError, RunConfig};
pub use csv::{format_sig9, write_csv, CSV_HEADER};
pub use svg::{render_svg, write_svg};
