//! Shared inputs for the benchmarks.

use std::path::Path;

use uniseg::TextStream;

/// One of the fixture corpora shipped with the core crate's tests.
pub fn fixture(name: &str) -> TextStream {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name);
    TextStream::load(&path).expect("fixture corpus")
}
