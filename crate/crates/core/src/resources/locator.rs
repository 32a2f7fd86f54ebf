use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocatorScheme {
    File,
}

/// Where to obtain a resource catalog from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogLocator {
    scheme: LocatorScheme,
    path: PathBuf,
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("catalog locator path is empty")]
    EmptyPath,
    #[error("unsupported catalog locator scheme `{0}`")]
    UnsupportedScheme(String),
    #[error("cannot read catalog `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CatalogLocator {
    pub fn file(path: impl Into<PathBuf>) -> Result<Self, FetchError> {
        let path = path.into();
        if path.as_os_str().is_empty() {
            return Err(FetchError::EmptyPath);
        }
        Ok(CatalogLocator {
            scheme: LocatorScheme::File,
            path,
        })
    }

    /// Accepts a bare path or a `file://` URL. Other URL schemes are rejected.
    pub fn parse(spec: &str) -> Result<Self, FetchError> {
        if let Some(rest) = spec.strip_prefix("file://") {
            return CatalogLocator::file(rest);
        }
        if let Some((scheme, _)) = spec.split_once("://") {
            return Err(FetchError::UnsupportedScheme(scheme.to_string()));
        }
        CatalogLocator::file(spec)
    }

    pub fn scheme(&self) -> LocatorScheme {
        self.scheme
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl fmt::Display for CatalogLocator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scheme {
            LocatorScheme::File => write!(f, "file://{}", self.path.display()),
        }
    }
}

/// Source of raw catalog bytes. Directory-service or HTTP sources would be
/// further implementations.
pub trait CatalogFetcher {
    fn fetch(&self, locator: &CatalogLocator) -> Result<Vec<u8>, FetchError>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct FileFetcher;

impl CatalogFetcher for FileFetcher {
    fn fetch(&self, locator: &CatalogLocator) -> Result<Vec<u8>, FetchError> {
        match locator.scheme {
            LocatorScheme::File => std::fs::read(&locator.path).map_err(|source| FetchError::Io {
                path: locator.path.clone(),
                source,
            }),
        }
    }
}

pub fn fetch_catalog(locator: &CatalogLocator) -> Result<Vec<u8>, FetchError> {
    FileFetcher.fetch(locator)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_path_is_rejected() {
        assert!(matches!(CatalogLocator::file(""), Err(FetchError::EmptyPath)));
        assert!(matches!(CatalogLocator::parse("file://"), Err(FetchError::EmptyPath)));
    }

    #[test]
    fn other_schemes_are_unsupported() {
        let err = CatalogLocator::parse("ldap://mds.example.org:2135").unwrap_err();
        assert!(matches!(err, FetchError::UnsupportedScheme(s) if s == "ldap"));
    }

    #[test]
    fn missing_file_names_the_path() {
        let locator = CatalogLocator::file("/nonexistent/catalog.json").unwrap();
        let err = fetch_catalog(&locator).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/catalog.json"));
    }

    #[test]
    fn reads_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, b"{}").unwrap();
        let locator = CatalogLocator::parse(&format!("file://{}", path.display())).unwrap();
        assert_eq!(fetch_catalog(&locator).unwrap(), b"{}");
    }
}
