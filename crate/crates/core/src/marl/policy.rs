use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::LearnerConfig;
use super::table::LearnerTable;
use crate::acts::{ActionSpace, Role};
use crate::error::{Error, Result};

pub const POLICY_FORMAT_VERSION: u32 = 1;

/// A trained learner on disk, bound to the action space it was trained on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyFile {
    pub version: u32,
    pub role: Role,
    pub config: LearnerConfig,
    pub action_space_fingerprint: String,
    pub actions: Vec<String>,
    pub table: LearnerTable,
}

impl PolicyFile {
    pub fn new(space: &ActionSpace, config: LearnerConfig, table: LearnerTable) -> Self {
        PolicyFile {
            version: POLICY_FORMAT_VERSION,
            role: space.role,
            config,
            action_space_fingerprint: space.fingerprint(),
            actions: space.actions().iter().map(ToString::to_string).collect(),
            table,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    /// Reads a policy file without checking it against an action space.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Loads a policy, refusing files trained against a different action space.
    pub fn load(path: impl AsRef<Path>, expected: &ActionSpace) -> Result<Self> {
        let file = Self::read(path)?;
        file.check(expected)?;
        Ok(file)
    }

    pub fn check(&self, expected: &ActionSpace) -> Result<()> {
        if self.version != POLICY_FORMAT_VERSION {
            return Err(Error::Version {
                what: "policy file",
                expected: POLICY_FORMAT_VERSION,
                found: self.version,
            });
        }
        let fingerprint = expected.fingerprint();
        if self.action_space_fingerprint != fingerprint || self.role != expected.role {
            return Err(Error::FingerprintMismatch {
                expected: format!("{}:{fingerprint}", expected.role),
                found: format!("{}:{}", self.role, self.action_space_fingerprint),
            });
        }
        if self.table.n_actions() != expected.len() {
            return Err(Error::Schema {
                path: "policy".into(),
                message: format!(
                    "table has {} actions, action space has {}",
                    self.table.n_actions(),
                    expected.len()
                ),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acts::build_action_space;
    use crate::ontology::Domain;
    use crate::tracking::StateId;

    #[test]
    fn roundtrip_and_fingerprint_check() {
        let d = Domain::restaurants();
        let seeker = build_action_space(&d, Role::Seeker, Some(23)).unwrap();
        let provider = build_action_space(&d, Role::Provider, Some(23)).unwrap();
        let mut table = LearnerTable::new(23);
        table.entry_mut(StateId(3)).q[4] = 0.1 + 0.2;
        let file = PolicyFile::new(&seeker, LearnerConfig::default(), table);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("seeker.json");
        file.save(&path).unwrap();
        assert_eq!(PolicyFile::load(&path, &seeker).unwrap(), file);
        assert!(matches!(
            PolicyFile::load(&path, &provider),
            Err(Error::FingerprintMismatch { .. })
        ));
    }
}
