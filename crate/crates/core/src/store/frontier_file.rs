//! Binary frontier files.
//!
//! Layout, all integers little-endian:
//!
//! | bytes | field                         |
//! |-------|-------------------------------|
//! | 5     | magic `SLPF1`                 |
//! | 2     | format version (1)            |
//! | 2     | program length `k`            |
//! | 8     | program count                 |
//! | 2     | digest width in bytes (16)    |
//! | 3·k·n | packed `(a, b, op)` triples   |

use std::fs;
use std::io::Write;
use std::path::Path;

use super::StoreError;
use crate::enumerate::{Frontier, MAX_FRONTIER_LEN};

pub const MAGIC: &[u8; 5] = b"SLPF1";
pub const FORMAT_VERSION: u16 = 1;
pub const DIGEST_WIDTH: u16 = 16;
pub const HEADER_LEN: usize = 5 + 2 + 2 + 8 + 2;

pub fn encode_frontier(frontier: &Frontier) -> Result<Vec<u8>, StoreError> {
    let k = frontier.program_len();
    if k > MAX_FRONTIER_LEN {
        return Err(StoreError::IndexOverflow { len: k });
    }
    let mut out = Vec::with_capacity(HEADER_LEN + frontier.as_bytes().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(k as u16).to_le_bytes());
    out.extend_from_slice(&(frontier.len() as u64).to_le_bytes());
    out.extend_from_slice(&DIGEST_WIDTH.to_le_bytes());
    out.extend_from_slice(frontier.as_bytes());
    Ok(out)
}

pub fn decode_frontier(bytes: &[u8]) -> Result<Frontier, StoreError> {
    let corrupt = |msg: String| StoreError::CorruptFile(msg);
    if bytes.len() < HEADER_LEN {
        return Err(corrupt(format!("file holds {} bytes, shorter than the header", bytes.len())));
    }
    if &bytes[..5] != MAGIC {
        return Err(corrupt("bad magic".into()));
    }
    let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
    let version = u16_at(5);
    if version != FORMAT_VERSION {
        return Err(corrupt(format!("unsupported format version {version}")));
    }
    let k = u16_at(7) as usize;
    if k > MAX_FRONTIER_LEN {
        return Err(StoreError::IndexOverflow { len: k });
    }
    let count = u64::from_le_bytes(bytes[9..17].try_into().expect("8 bytes"));
    let width = u16_at(17);
    if width != DIGEST_WIDTH {
        return Err(corrupt(format!("unsupported digest width {width}")));
    }
    let body = &bytes[HEADER_LEN..];
    let expected = (count as u128) * (k as u128) * 3;
    if body.len() as u128 != expected {
        return Err(corrupt(format!(
            "body holds {} bytes, expected {expected} for {count} programs of length {k}",
            body.len()
        )));
    }
    Frontier::from_packed(k, count as usize, body.to_vec()).map_err(|e| corrupt(e.to_string()))
}

/// Writes through a temporary file and renames it into place.
pub fn write_frontier(frontier: &Frontier, path: &Path) -> Result<(), StoreError> {
    let bytes = encode_frontier(frontier)?;
    write_atomic(path, &bytes)
}

pub fn read_frontier(path: &Path) -> Result<Frontier, StoreError> {
    let bytes = fs::read(path).map_err(|e| StoreError::io(path, e))?;
    decode_frontier(&bytes).map_err(|e| match e {
        StoreError::CorruptFile(msg) => StoreError::CorruptFile(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let mut file = fs::File::create(&tmp).map_err(|e| StoreError::io(&tmp, e))?;
    file.write_all(bytes).map_err(|e| StoreError::io(&tmp, e))?;
    file.sync_all().map_err(|e| StoreError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| StoreError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{expand, DedupMode};

    fn level(k: usize) -> Frontier {
        let mut f = Frontier::seed();
        for _ in 0..k {
            f = expand::<u64>(&f, DedupMode::Digest).unwrap();
        }
        f
    }

    #[test]
    fn round_trip_level_one() {
        let f = level(1);
        let bytes = encode_frontier(&f).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 3);
        assert_eq!(&bytes[HEADER_LEN..], &[1, 1, 0]);
        assert_eq!(decode_frontier(&bytes).unwrap(), f);
    }

    #[test]
    fn level_two_is_byte_identical_across_runs() {
        let a = encode_frontier(&level(2)).unwrap();
        let b = encode_frontier(&level(2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(decode_frontier(&a).unwrap().len(), 2);
    }

    #[test]
    fn corruption_is_detected() {
        let bytes = encode_frontier(&level(3)).unwrap();
        for cut in [0, 4, HEADER_LEN - 1, bytes.len() - 1] {
            assert!(matches!(
                decode_frontier(&bytes[..cut]),
                Err(StoreError::CorruptFile(_))
            ));
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_frontier(&bad), Err(StoreError::CorruptFile(_))));
        let mut bad = bytes.clone();
        bad[5] = 9;
        assert!(matches!(decode_frontier(&bad), Err(StoreError::CorruptFile(_))));
        // Out-of-range index inside the body.
        let mut bad = bytes.clone();
        bad[HEADER_LEN] = 7;
        assert!(matches!(decode_frontier(&bad), Err(StoreError::CorruptFile(_))));
        // Two programs swapped breaks ascending order.
        let mut bad = bytes;
        let (x, y) = bad[HEADER_LEN..].split_at_mut(9);
        x.swap_with_slice(&mut y[..9]);
        assert!(matches!(decode_frontier(&bad), Err(StoreError::CorruptFile(_))));
    }

    #[test]
    fn oversized_length_is_rejected() {
        let mut bytes = encode_frontier(&Frontier::seed()).unwrap();
        bytes[7..9].copy_from_slice(&255u16.to_le_bytes());
        assert!(matches!(
            decode_frontier(&bytes),
            Err(StoreError::IndexOverflow { len: 255 })
        ));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.slpf");
        let f = level(4);
        write_frontier(&f, &path).unwrap();
        assert_eq!(read_frontier(&path).unwrap(), f);
        assert!(!dir.path().join("f.slpf.tmp").exists());
    }
}
