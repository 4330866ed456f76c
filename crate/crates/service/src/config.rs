use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("port must be in 1..=65535")]
    BadPort,
    #[error("dataset directory {0} does not exist")]
    MissingDataDir(PathBuf),
    #[error("static directory {0} does not exist")]
    MissingStaticDir(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub data_dir: PathBuf,
    /// Allow cross-origin requests from any origin.
    pub cors: bool,
    /// Number of memoized products.
    pub cache_size: NonZeroUsize,
    /// Optional directory with the browser viewer bundle, served under `/`.
    pub static_dir: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn new(listen: SocketAddr, data_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            listen,
            data_dir: data_dir.into(),
            cors: false,
            cache_size: NonZeroUsize::new(64).unwrap(),
            static_dir: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.listen.port() == 0 {
            return Err(ConfigError::BadPort);
        }
        if !self.data_dir.is_dir() {
            return Err(ConfigError::MissingDataDir(self.data_dir.clone()));
        }
        if let Some(dir) = &self.static_dir {
            if !dir.is_dir() {
                return Err(ConfigError::MissingStaticDir(dir.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let dir = std::env::temp_dir();
        let ok = ServiceConfig::new("127.0.0.1:8080".parse().unwrap(), &dir);
        assert_eq!(ok.validate(), Ok(()));
        let port0 = ServiceConfig::new("127.0.0.1:0".parse().unwrap(), &dir);
        assert_eq!(port0.validate(), Err(ConfigError::BadPort));
        let missing = ServiceConfig::new("127.0.0.1:1".parse().unwrap(), "/definitely/not/here");
        assert!(matches!(missing.validate(), Err(ConfigError::MissingDataDir(_))));
    }
}
