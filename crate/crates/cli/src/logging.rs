//! Stderr logging as line-delimited key=value records.

use std::io::Write;

/// Installs the global logger at the given level. Safe to call more than
/// once; later calls are ignored.
pub fn init(level: &str) {
    let mut builder = env_logger::Builder::new();
    builder.parse_filters(level);
    builder.target(env_logger::Target::Stderr);
    builder.format(|buf, record| {
        writeln!(
            buf,
            "level={} {}",
            record.level().as_str().to_ascii_lowercase(),
            record.args()
        )
    });
    let _ = builder.try_init();
}
