//! Named datasets and where to download them.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataFormat {
    /// `t i j` records, aggregated into an undirected multigraph.
    ContactLog,
    /// `i j w` lines.
    WeightedEdgelist,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub name: String,
    #[serde(default)]
    pub url: Option<String>,
    pub format: DataFormat,
    /// Hex SHA-256 of the downloaded file, optionally prefixed by `sha256:`.
    #[serde(default)]
    pub checksum: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Registry {
    #[serde(default, rename = "dataset")]
    pub datasets: Vec<DatasetDescriptor>,
}

const SOCIOPATTERNS: &str = "http://www.sociopatterns.org/wp-content/uploads";

// (name, path under the upload root); an empty path means no known public URL.
const BUILTIN: [(&str, &str); 12] = [
    ("HS13", "/2015/07/High-School_data_2013.csv.gz"),
    ("SFHH", "/2018/12/tij_SFHH.dat_.gz"),
    ("HS12", "/2015/09/thiers_2012.csv.gz"),
    ("WP", "/2016/06/tij_InVS.dat_.gz"),
    ("WP15", "/2018/12/tij_InVS15.dat_.gz"),
    ("HS11", "/2015/09/thiers_2011.csv.gz"),
    ("Thiers11", "/2015/09/thiers_2011.csv.gz"),
    ("LyonSchool", "/2015/09/primaryschool.csv.gz"),
    ("HT09", "/2014/05/ht09_contact_list.dat.gz"),
    ("HO", "/2013/09/detailed_list_of_contacts_Hospital.dat_.gz"),
    ("KH", ""),
    ("BB", ""),
];

impl Registry {
    /// The twelve contact datasets shipped with the tool.
    pub fn builtin() -> Self {
        Self {
            datasets: BUILTIN
                .iter()
                .map(|&(name, path)| DatasetDescriptor {
                    name: name.to_owned(),
                    url: (!path.is_empty()).then(|| format!("{SOCIOPATTERNS}{path}")),
                    format: DataFormat::ContactLog,
                    checksum: None,
                })
                .collect(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let reg: Registry = toml::from_str(text).map_err(|e| CliError::Registry(e.to_string()))?;
        reg.validate()?;
        Ok(reg)
    }

    /// Built-in registry with the entries of `path` layered on top: same
    /// names replace built-in descriptors, new names are appended.
    pub fn with_overrides(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
        let extra = Self::from_toml(&text)?;
        let mut reg = Self::builtin();
        for d in extra.datasets {
            match reg.datasets.iter_mut().find(|x| x.name == d.name) {
                Some(slot) => *slot = d,
                None => reg.datasets.push(d),
            }
        }
        Ok(reg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::builtin()), Self::with_overrides)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for d in &self.datasets {
            if d.name.is_empty() {
                return Err(CliError::Registry("dataset with empty name".into()));
            }
            if !seen.insert(d.name.as_str()) {
                return Err(CliError::Registry(format!("duplicate dataset {}", d.name)));
            }
            if let Some(c) = &d.checksum {
                let hex = c.strip_prefix("sha256:").unwrap_or(c);
                if hex.len() != 64 || !hex.chars().all(|ch| ch.is_ascii_hexdigit()) {
                    return Err(CliError::Registry(format!("{}: checksum is not a SHA-256 hex digest", d.name)));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&DatasetDescriptor> {
        self.datasets
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| CliError::Usage(format!("unknown dataset {name:?}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}
