//! Pipeline orchestration behind the `readease` binary.

pub mod commands;
pub mod config;
pub mod plot;
pub mod session;
pub mod table;

use std::fmt;

use clap::ValueEnum;

/// A problem with the configuration rather than the data. Exits with 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// 2 for configuration problems, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<readease_core::Error>() {
            return if e.is_config() { 2 } else { 1 };
        }
        if let Some(e) = cause.downcast_ref::<readease_annotate::Error>() {
            return if e.is_config() { 2 } else { 1 };
        }
    }
    1
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::Context;

    #[test]
    fn exit_codes_follow_the_error_kind() {
        let config: anyhow::Error = ConfigError("bad".into()).into();
        assert_eq!(exit_code(&config), 2);
        let unknown = Err::<(), _>(readease_core::Error::UnknownMeasure("XX".into()))
            .context("eval")
            .unwrap_err();
        assert_eq!(exit_code(&unknown), 2);
        let data: anyhow::Error = readease_core::Error::NoTrials("none".into()).into();
        assert_eq!(exit_code(&data), 1);
    }
}
