//! One module per subcommand.

pub mod augment;
pub mod mix;
pub mod synth;
pub mod verify;
