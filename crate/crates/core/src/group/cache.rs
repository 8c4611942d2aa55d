//! On-disk integrity records for group tables.
//!
//! Layout (little-endian): magic `CGK1`, format version `u32`, then `p`, `d`,
//! `u`, `t` as `u64`, then the two digests `order` and `checksum` as `u64`.
//! Tables themselves are never stored; they are recomputed from parameters.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::params::GroupParams;
use super::table::{GeneratorSet, GroupTable};
use crate::arith::fnv1a64;
use crate::error::{Error, Result};

pub const CACHE_MAGIC: [u8; 4] = *b"CGK1";
pub const CACHE_VERSION: u32 = 1;
const RECORD_LEN: usize = 4 + 4 + 6 * 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CacheHeader {
    pub version: u32,
    pub p: u64,
    pub d: u64,
    pub u: u64,
    pub t: u64,
    pub order: u64,
    pub checksum: u64,
}

impl CacheHeader {
    /// Computes the digests for a table: its order and the FNV-1a hash of the
    /// sorted indices of all products `y_i · y_j` of generators.
    pub fn for_table(table: &GroupTable) -> Result<Self> {
        let params = table.params();
        let gens = GeneratorSet::new(*params, table.level())?;
        let mut products = Vec::with_capacity(gens.elements().len().pow(2));
        for a in gens.elements() {
            for b in gens.elements() {
                products.push(table.index(&params.mul(a, b)?));
            }
        }
        products.sort_unstable();
        let checksum = fnv1a64(products.iter().flat_map(|x| x.to_le_bytes()));
        Ok(Self {
            version: CACHE_VERSION,
            p: params.p(),
            d: params.d() as u64,
            u: params.u() as u64,
            t: table.level() as u64,
            order: table.order(),
            checksum,
        })
    }

    pub fn params(&self) -> Result<(GroupParams, u32)> {
        let params = GroupParams::new(self.p, self.d as usize, self.u as u32)?;
        Ok((params, self.t as u32))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(RECORD_LEN);
        out.extend_from_slice(&CACHE_MAGIC);
        out.extend_from_slice(&self.version.to_le_bytes());
        for x in [self.p, self.d, self.u, self.t, self.order, self.checksum] {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != RECORD_LEN {
            return Err(Error::Parse(format!(
                "cache record has {} bytes, expected {RECORD_LEN}",
                bytes.len()
            )));
        }
        if bytes[..4] != CACHE_MAGIC {
            return Err(Error::Parse("bad cache magic".into()));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
        if version != CACHE_VERSION {
            return Err(Error::Parse(format!("unsupported cache version {version}")));
        }
        let word = |k: usize| u64::from_le_bytes(bytes[8 + 8 * k..16 + 8 * k].try_into().expect("8 bytes"));
        Ok(Self {
            version,
            p: word(0),
            d: word(1),
            u: word(2),
            t: word(3),
            order: word(4),
            checksum: word(5),
        })
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(&self.to_bytes())?;
            f.sync_all()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

/// `CK_CACHE_DIR`, falling back to `./.ck-cache`.
pub fn cache_dir() -> PathBuf {
    std::env::var_os("CK_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".ck-cache"))
}

pub fn cache_file_name(params: &GroupParams, t: u32) -> String {
    format!("cgk1-p{}-d{}-u{}-t{}.bin", params.p(), params.d(), params.u(), t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip() {
        let params = GroupParams::new(2, 2, 2).unwrap();
        let table = GroupTable::build(params, 3).unwrap();
        let header = CacheHeader::for_table(&table).unwrap();
        let bytes = header.to_bytes();
        assert_eq!(&bytes[..4], b"CGK1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 2);
        assert_eq!(CacheHeader::from_bytes(&bytes).unwrap(), header);
        assert_eq!(header.order, 256);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(cache_file_name(&params, 3));
        header.write_to(&path).unwrap();
        assert_eq!(CacheHeader::read_from(&path).unwrap(), header);
    }

    #[test]
    fn corrupt_records_are_rejected() {
        let params = GroupParams::new(3, 1, 1).unwrap();
        let table = GroupTable::build(params, 2).unwrap();
        let mut bytes = CacheHeader::for_table(&table).unwrap().to_bytes();
        assert!(CacheHeader::from_bytes(&bytes[..10]).is_err());
        bytes[0] = b'X';
        assert!(CacheHeader::from_bytes(&bytes).is_err());
    }
}
