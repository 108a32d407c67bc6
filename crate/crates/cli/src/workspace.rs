// SPDX-License-Identifier: Apache-2.0

//! On-disk state: one directory holding params, board, keys, transcripts and
//! reports. Writes go through a temp file and a rename.

use std::fs::{self, File, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use xorpvss::encoding::to_canonical_json;
use xorpvss::{BulletinBoard, GroupElement, GroupParams, KeyPair, Scalar, SharePolynomial};

use crate::CliError;

const LOCK_FILE: &str = ".xorpvss.lock";

/// Private key file for a participant or the reconstructor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KeyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
    pub sk: Scalar,
    pub pk: GroupElement,
}

impl KeyFile {
    pub fn into_pair(self, params: &GroupParams) -> Result<KeyPair, CliError> {
        let sk = params.scalar(self.sk.into_value()).map_err(|e| CliError::Usage(format!("key file: {e}")))?;
        let pair = KeyPair::from_secret(params, sk).map_err(|e| CliError::Usage(format!("key file: {e}")))?;
        if pair.pk != self.pk {
            return Err(CliError::Usage("key file: pk does not match sk".into()));
        }
        Ok(pair)
    }
}

/// The dealer's private state: the polynomial behind the board.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DealerFile {
    pub polynomial: SharePolynomial,
}

pub struct Workspace {
    root: PathBuf,
    _lock: Lock,
}

struct Lock(PathBuf);

impl Drop for Lock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

impl Workspace {
    /// Creates the directory if needed and takes the lock.
    pub fn open(root: &Path) -> Result<Workspace, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::Io(format!("{}: {e}", root.display())))?;
        let lock = root.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
            }
            Err(e) if e.kind() == ErrorKind::AlreadyExists => return Err(CliError::Locked(lock)),
            Err(e) => return Err(CliError::Io(format!("{}: {e}", lock.display()))),
        }
        Ok(Workspace { root: root.to_path_buf(), _lock: Lock(lock) })
    }

    pub fn path(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.root.join(rel)
    }

    pub fn key_path(&self, index: u64) -> PathBuf {
        self.path(format!("keys/{index}.json"))
    }

    pub fn read<T: DeserializeOwned>(&self, path: &Path) -> Result<T, CliError> {
        let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_reader(std::io::BufReader::new(file))
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Pretty JSON with sorted keys, written to a temp file and renamed.
    pub fn write<T: Serialize>(&self, path: &Path, value: &T) -> Result<(), CliError> {
        let json = to_canonical_json(value).map_err(|e| CliError::Io(e.to_string()))?;
        write_atomic(path, format!("{json}\n").as_bytes())
    }

    pub fn params(&self) -> Result<GroupParams, CliError> {
        let params: GroupParams = self.read(&self.path("params.json"))?;
        params.validate().map_err(|v| CliError::Usage(format!("params.json: {v}")))?;
        Ok(params)
    }

    pub fn board(&self) -> Result<BulletinBoard, CliError> {
        self.read(&self.path("board.json"))
    }

    pub fn key(&self, index: u64, params: &GroupParams) -> Result<KeyPair, CliError> {
        self.read::<KeyFile>(&self.key_path(index))?.into_pair(params)
    }

    pub fn dealer(&self) -> Result<DealerFile, CliError> {
        self.read(&self.path("dealer.json"))
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
