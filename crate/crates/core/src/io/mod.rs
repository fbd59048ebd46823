//! Disk formats: the JSON instance document and the seeded instance
//! generator shared by the test suites and the `sip` command-line tool.

pub mod document;
pub mod generate;

pub use document::{
    parse_instance, serialize_instance, serialize_multislot, ParseError, ParsedDocument,
    SCHEMA_VERSION,
};
pub use generate::{generate_random_instance, GeneratorConfig, GeneratorError, PreferenceFamily};
