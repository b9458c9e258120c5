//! Episode shards.
//!
//! ```text
//! VLNSHARD 1
//! {"format_version":1,"config_digest":"…","seed":1,"scene_ids":[…],"split":"train","record_count":2}
//! {episode json}
//! {episode json}
//! END <hex sha256 of every preceding byte>
//! ```
//!
//! Readers verify the trailing digest before parsing anything.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{Episode, Split};

pub const SHARD_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "VLNSHARD";

#[derive(Debug, Error, PartialEq)]
pub enum ShardError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("version mismatch at byte {offset}: found {found:?}, expected {MAGIC} {SHARD_FORMAT_VERSION}")]
    VersionMismatch { offset: u64, found: String },
    #[error("digest mismatch at byte {offset}: footer says {expected}, content hashes to {actual}")]
    DigestMismatch { offset: u64, expected: String, actual: String },
    #[error("truncated shard: no valid footer at byte {offset}")]
    Truncated { offset: u64 },
    #[error("malformed record at byte {offset}: {message}")]
    Malformed { offset: u64, message: String },
    #[error("header declares {declared} records, found {found}")]
    CountMismatch { declared: u64, found: u64 },
}

impl From<io::Error> for ShardError {
    fn from(e: io::Error) -> Self {
        ShardError::Io(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShardHeader {
    pub format_version: u32,
    pub config_digest: String,
    pub seed: u64,
    pub scene_ids: Vec<String>,
    pub split: Split,
    pub record_count: u64,
}

/// Streams episodes into a shard. Records go to a side file while the count
/// is unknown; [`ShardWriter::finish`] assembles header, body and footer.
pub struct ShardWriter {
    path: PathBuf,
    body_path: PathBuf,
    body: BufWriter<File>,
    header: ShardHeader,
}

impl ShardWriter {
    pub fn create(
        path: impl Into<PathBuf>,
        config_digest: &str,
        seed: u64,
        scene_ids: Vec<String>,
        split: Split,
    ) -> Result<Self, ShardError> {
        let path = path.into();
        let mut body_path = path.clone().into_os_string();
        body_path.push(".part");
        let body_path = PathBuf::from(body_path);
        let body = BufWriter::new(File::create(&body_path)?);
        let header = ShardHeader {
            format_version: SHARD_FORMAT_VERSION,
            config_digest: config_digest.to_string(),
            seed,
            scene_ids,
            split,
            record_count: 0,
        };
        Ok(Self { path, body_path, body, header })
    }

    pub fn write(&mut self, episode: &Episode) -> Result<(), ShardError> {
        serde_json::to_writer(&mut self.body, episode).map_err(|e| ShardError::Io(e.to_string()))?;
        self.body.write_all(b"\n")?;
        self.header.record_count += 1;
        Ok(())
    }

    pub fn record_count(&self) -> u64 {
        self.header.record_count
    }

    pub fn finish(mut self) -> Result<ShardHeader, ShardError> {
        self.body.flush()?;
        drop(self.body);
        let mut out = HashingWriter { inner: BufWriter::new(File::create(&self.path)?), hasher: Sha256::new() };
        writeln!(out, "{MAGIC} {SHARD_FORMAT_VERSION}")?;
        serde_json::to_writer(&mut out, &self.header).map_err(|e| ShardError::Io(e.to_string()))?;
        out.write_all(b"\n")?;
        io::copy(&mut File::open(&self.body_path)?, &mut out)?;
        let digest = hex::encode(out.hasher.finalize_reset());
        writeln!(out.inner, "END {digest}")?;
        out.inner.flush()?;
        fs::remove_file(&self.body_path)?;
        Ok(self.header)
    }
}

struct HashingWriter<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Writes a complete shard in one call.
pub fn write_shard(
    path: &Path,
    episodes: &[Episode],
    config_digest: &str,
    seed: u64,
    scene_ids: Vec<String>,
    split: Split,
) -> Result<ShardHeader, ShardError> {
    let mut w = ShardWriter::create(path, config_digest, seed, scene_ids, split)?;
    for e in episodes {
        w.write(e)?;
    }
    w.finish()
}

pub fn read_shard(path: &Path) -> Result<(ShardHeader, Vec<Episode>), ShardError> {
    parse_shard(&fs::read(path)?)
}

/// Lines of `bytes` with the byte offset at which each starts.
fn lines_with_offsets(bytes: &[u8]) -> impl Iterator<Item = (u64, &[u8])> {
    let mut offset = 0u64;
    bytes.split_inclusive(|&b| b == b'\n').map(move |line| {
        let start = offset;
        offset += line.len() as u64;
        (start, line.strip_suffix(b"\n").unwrap_or(line))
    })
}

pub fn parse_shard(bytes: &[u8]) -> Result<(ShardHeader, Vec<Episode>), ShardError> {
    let len = bytes.len() as u64;
    let first_end = bytes.iter().position(|&b| b == b'\n').ok_or(ShardError::Truncated { offset: len })?;
    let first = String::from_utf8_lossy(&bytes[..first_end]);
    if first != format!("{MAGIC} {SHARD_FORMAT_VERSION}") {
        return Err(ShardError::VersionMismatch { offset: 0, found: first.into_owned() });
    }

    if bytes.last() != Some(&b'\n') {
        return Err(ShardError::Truncated { offset: len });
    }
    let footer_start = bytes[..bytes.len() - 1].iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
    let footer = &bytes[footer_start..bytes.len() - 1];
    let expected = footer
        .strip_prefix(b"END ")
        .filter(|h| h.len() == 64 && h.iter().all(u8::is_ascii_hexdigit))
        .ok_or(ShardError::Truncated { offset: len })?;
    let expected = String::from_utf8_lossy(expected).into_owned();
    let actual = hex::encode(Sha256::digest(&bytes[..footer_start]));
    if actual != expected {
        return Err(ShardError::DigestMismatch { offset: footer_start as u64, expected, actual });
    }

    let mut lines = lines_with_offsets(&bytes[..footer_start]).skip(1);
    let (offset, header_line) = lines.next().ok_or(ShardError::Truncated { offset: footer_start as u64 })?;
    let header: ShardHeader =
        serde_json::from_slice(header_line).map_err(|e| ShardError::Malformed { offset, message: e.to_string() })?;
    if header.format_version != SHARD_FORMAT_VERSION {
        return Err(ShardError::VersionMismatch { offset, found: header.format_version.to_string() });
    }
    let mut episodes = Vec::with_capacity(header.record_count as usize);
    for (offset, line) in lines {
        let e: Episode =
            serde_json::from_slice(line).map_err(|e| ShardError::Malformed { offset, message: e.to_string() })?;
        episodes.push(e);
    }
    if episodes.len() as u64 != header.record_count {
        return Err(ShardError::CountMismatch { declared: header.record_count, found: episodes.len() as u64 });
    }
    Ok((header, episodes))
}
