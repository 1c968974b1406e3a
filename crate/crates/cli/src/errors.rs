//! Exit-code tagging for command errors.

use std::fmt;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CHANNEL: u8 = 3;
pub const EXIT_PLAN: u8 = 4;
pub const EXIT_DECODE: u8 = 5;

#[derive(Debug)]
pub struct Coded {
    pub code: u8,
    pub msg: String,
}

impl fmt::Display for Coded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl std::error::Error for Coded {}

/// An error that maps to a specific process exit code.
pub fn coded(code: u8, msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Coded {
        code,
        msg: msg.into(),
    })
}

/// Exit code for an error chain: tagged code if present, 1 otherwise.
pub fn exit_code_of(e: &anyhow::Error) -> u8 {
    e.downcast_ref::<Coded>().map_or(1, |c| c.code)
}
