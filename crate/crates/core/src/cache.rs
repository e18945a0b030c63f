//! On-disk element cache.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! 8 bytes   magic "CSEMI001"
//! 1 byte    family tag (p=0, cp=1, ocp=2, orcp=3, ct=4, oct=5)
//! 1 byte    chain size n
//! 8 bytes   count
//! 8*count   canonical ids, strictly increasing
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::family::{ElementSet, FamilyTag};

pub const MAGIC: &[u8; 8] = b"CSEMI001";
const HEADER_LEN: usize = 8 + 1 + 1 + 8;

pub fn encode(family: FamilyTag, n: u8, ids: &[u64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * ids.len());
    out.extend_from_slice(MAGIC);
    out.push(family.code());
    out.push(n);
    out.extend_from_slice(&(ids.len() as u64).to_le_bytes());
    for id in ids {
        out.extend_from_slice(&id.to_le_bytes());
    }
    out
}

/// Parses a cache image into `(family, n, ids)`.
pub fn decode(bytes: &[u8]) -> Result<(FamilyTag, u8, Vec<u64>)> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(Error::CacheFormat("missing CSEMI001 header".into()));
    }
    let family = FamilyTag::from_code(bytes[8])
        .ok_or_else(|| Error::CacheFormat(format!("unknown family tag {}", bytes[8])))?;
    let n = bytes[9];
    let count = u64::from_le_bytes(bytes[10..18].try_into().expect("8 bytes"));
    let body = &bytes[HEADER_LEN..];
    if body.len() as u64 != count.saturating_mul(8) {
        return Err(Error::CacheFormat(format!(
            "count {count} does not match {} payload bytes",
            body.len()
        )));
    }
    let ids = body
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((family, n, ids))
}

pub fn write_set(mut w: impl Write, set: &ElementSet) -> Result<()> {
    w.write_all(&encode(set.family(), set.n(), set.ids()))?;
    Ok(())
}

pub fn read_set(mut r: impl Read) -> Result<ElementSet> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let (family, n, ids) = decode(&bytes)?;
    ElementSet::from_ids(family, n, &ids)
}

/// A directory of cache files, one per `(family, n)`.
#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, family: FamilyTag, n: u8) -> PathBuf {
        self.dir.join(format!("{family}_{n}.csemi"))
    }

    /// Loads the cached set, or enumerates and stores it.
    pub fn load_or_enumerate(
        &self,
        family: FamilyTag,
        n: u8,
        budget: &Budget,
    ) -> Result<ElementSet> {
        budget.check_enumeration(n)?;
        let path = self.path(family, n);
        if path.exists() {
            let set = read_set(fs::File::open(&path)?)?;
            if set.family() != family || set.n() != n {
                return Err(Error::CacheFormat(format!(
                    "{} holds {}/{} instead of {family}/{n}",
                    path.display(),
                    set.family(),
                    set.n()
                )));
            }
            return Ok(set);
        }
        let set = ElementSet::enumerate_within(family, n, budget.max_enumeration_n)?;
        fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension("tmp");
        write_set(fs::File::create(&tmp)?, &set)?;
        fs::rename(&tmp, &path)?;
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let bytes = encode(FamilyTag::CP, 1, &[0, 1]);
        assert_eq!(&bytes[..8], b"CSEMI001");
        assert_eq!(bytes[8], 1);
        assert_eq!(bytes[9], 1);
        assert_eq!(&bytes[10..18], &2u64.to_le_bytes());
        assert_eq!(&bytes[18..26], &0u64.to_le_bytes());
        assert_eq!(&bytes[26..34], &1u64.to_le_bytes());
        assert_eq!(bytes.len(), 34);
    }

    #[test]
    fn rejects_corrupt_input() {
        assert!(decode(b"CSEMI00").is_err());
        assert!(decode(b"XXXXXXXX\x01\x01\0\0\0\0\0\0\0\0").is_err());
        let mut bytes = encode(FamilyTag::CP, 2, &[0, 1, 2]);
        bytes.pop();
        assert!(decode(&bytes).is_err());
        let mut bytes = encode(FamilyTag::CP, 2, &[0]);
        bytes[8] = 9;
        assert!(decode(&bytes).is_err());
    }
}
