//! Process-level failure classification.
//!
//! Exit codes: 0 on success, 1 for usage problems (bad flags, malformed
//! configs, empty ranges), 2 for runtime failures (integration
//! breakdown, escape, I/O).

use std::fmt;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Failure {
        Failure::Usage(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Failure {
        Failure::Runtime(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<quasihopf::Error> for Failure {
    fn from(e: quasihopf::Error) -> Failure {
        match e {
            // Bad arguments and malformed descriptions are the caller's
            // to fix; a solver breakdown is not.
            quasihopf::Error::Invalid(_) | quasihopf::Error::Config(_) => {
                Failure::Usage(e.to_string())
            }
            quasihopf::Error::Integration(_) => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Runtime(e.to_string())
    }
}

pub type CmdResult = Result<(), Failure>;
