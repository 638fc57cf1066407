//! Command implementations shared by the `lglu` binary and the FFI crate.

pub mod config;
pub mod eggbox;
pub mod report;
pub mod verify;

pub use config::{Caps, InstanceConfig};
pub use eggbox::{eggbox_dot, instance_eggbox, EggboxInput};
pub use report::{build_report, Report};
pub use verify::{cmd_verify, CheckRecord, Status, VerifyReport, CHECKS};
