//! On-disk shard files and byte/symbol striping.
//!
//! A shard file is a 64-byte header followed by the payload. All integers
//! are little-endian.
//!
//! ```text
//! offset size field
//!      0    4 magic "CRCS"
//!      4    2 format version (1)
//!      6    1 variant tag: 0 stable, 1 code-a, 2 code-b
//!      7    1 field kind: 0 prime, 1 binary extension
//!      8    8 p, or the reduction polynomial of GF(2^m) with its x^m bit
//!     16    1 m (0 for prime fields)
//!     17    1 symbol width in bytes
//!     18    2 node id (1-based)
//!     20    2 n
//!     22    2 k
//!     24    2 d
//!     26    2 t
//!     28    2 alpha
//!     30    2 beta
//!     32    2 beta'
//!     34    2 reserved, zero
//!     36    4 B, file size in symbols per generation
//!     40    8 generation count
//!     48    8 payload length in bytes
//!     56    4 CRC32 of the payload
//!     60    4 CRC32 of bytes 0..60
//! ```
//!
//! The payload holds `generations * alpha` symbols, each `width` bytes,
//! generation-major: the `alpha` symbols of generation 0, then generation 1.
//!
//! Input bytes are framed as an 8-byte length followed by the data, read as
//! a bit stream (least significant bit of each byte first) and cut into
//! symbols of `bits_per_symbol` bits. The last generation is zero padded.

use std::path::Path;

use bitvec::prelude::*;
use serde::Serialize;

use coopstore::field::{Field, FieldSpec, FiniteField};
use coopstore::params::{CodeParams, NodeId};
use coopstore::stable::ShardVector;

use crate::config::Variant;
use crate::CliError;

pub const MAGIC: &[u8; 4] = b"CRCS";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShardHeader {
    pub variant: Variant,
    pub field: FieldSpec,
    pub params: CodeParams,
    pub node_id: NodeId,
    pub generations: u64,
}

impl ShardHeader {
    pub fn symbol_width(&self) -> Result<usize, CliError> {
        Ok(Field::new(self.field)?.symbol_width())
    }

    pub fn payload_len(&self) -> Result<usize, CliError> {
        Ok(self.generations as usize * self.params.alpha * self.symbol_width()?)
    }

    /// True when two shards belong to the same encoding.
    pub fn same_stripe(&self, other: &ShardHeader) -> bool {
        self.variant == other.variant
            && self.field == other.field
            && self.params == other.params
            && self.generations == other.generations
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardFile {
    pub header: ShardHeader,
    /// `symbols[g]` is this node's content in generation `g`.
    pub symbols: Vec<Vec<u64>>,
}

fn u16_of(v: usize, what: &str) -> Result<u16, CliError> {
    u16::try_from(v).map_err(|_| CliError::Config(format!("{what} = {v} does not fit the shard header")))
}

impl ShardFile {
    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let h = &self.header;
        let width = h.symbol_width()?;
        let mut payload = Vec::with_capacity(h.payload_len()?);
        for g in &self.symbols {
            if g.len() != h.params.alpha {
                return Err(CliError::Format(format!("generation holds {} symbols, expected {}", g.len(), h.params.alpha)));
            }
            for &s in g {
                payload.extend_from_slice(&s.to_le_bytes()[..width]);
            }
        }
        let (kind, value, m) = match h.field {
            FieldSpec::Prime { p } => (0u8, p, 0u8),
            FieldSpec::BinaryExtension { m, poly } => (1, poly, m as u8),
        };
        let p = &h.params;
        let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(h.variant.tag());
        out.push(kind);
        out.extend_from_slice(&value.to_le_bytes());
        out.push(m);
        out.push(width as u8);
        for (v, what) in [
            (h.node_id, "node id"),
            (p.n, "n"),
            (p.k, "k"),
            (p.d, "d"),
            (p.t, "t"),
            (p.alpha, "alpha"),
            (p.beta, "beta"),
            (p.beta_prime, "beta'"),
            (0, "reserved"),
        ] {
            out.extend_from_slice(&u16_of(v, what)?.to_le_bytes());
        }
        let file_size = u32::try_from(p.file_size).map_err(|_| CliError::Config("B does not fit the shard header".into()))?;
        out.extend_from_slice(&file_size.to_le_bytes());
        out.extend_from_slice(&h.generations.to_le_bytes());
        out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&crc32fast::hash(&payload).to_le_bytes());
        let header_crc = crc32fast::hash(&out);
        out.extend_from_slice(&header_crc.to_le_bytes());
        debug_assert_eq!(out.len(), HEADER_LEN);
        out.extend_from_slice(&payload);
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CliError> {
        let bad = |m: &str| CliError::Format(m.to_string());
        if bytes.len() < HEADER_LEN {
            return Err(bad("shorter than the 64-byte header"));
        }
        if &bytes[0..4] != MAGIC {
            return Err(bad("bad magic, not a shard file"));
        }
        let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]) as usize;
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        if crc32fast::hash(&bytes[..60]) != u32_at(60) {
            return Err(bad("header checksum mismatch"));
        }
        let version = u16_at(4) as u16;
        if version != VERSION {
            return Err(CliError::Format(format!("unsupported format version {version}")));
        }
        let variant = Variant::from_tag(bytes[6]).ok_or_else(|| bad("unknown variant tag"))?;
        let field = match bytes[7] {
            0 => FieldSpec::Prime { p: u64_at(8) },
            1 => FieldSpec::BinaryExtension { m: bytes[16] as u32, poly: u64_at(8) },
            _ => return Err(bad("unknown field kind")),
        };
        let f = Field::new(field)?;
        let width = bytes[17] as usize;
        if width != f.symbol_width() {
            return Err(bad("symbol width does not match the field"));
        }
        let params = CodeParams::mscr(u16_at(20), u16_at(22), u16_at(24), u16_at(26), u32_at(36) as usize, f.order())?;
        if (params.alpha, params.beta, params.beta_prime) != (u16_at(28), u16_at(30), u16_at(32)) {
            return Err(bad("stored alpha/beta disagree with n, k, d, t, B"));
        }
        let node_id = u16_at(18);
        if node_id == 0 || node_id > params.n {
            return Err(CliError::Format(format!("node id {node_id} outside 1..={}", params.n)));
        }
        let header = ShardHeader { variant, field, params, node_id, generations: u64_at(40) };
        let payload = &bytes[HEADER_LEN..];
        let declared = u64_at(48);
        if declared != payload.len() as u64 || header.payload_len()? != payload.len() {
            return Err(CliError::Format(format!(
                "payload is {} bytes, header declares {declared}, parameters need {}",
                payload.len(),
                header.payload_len()?
            )));
        }
        if crc32fast::hash(payload) != u32_at(56) {
            return Err(bad("payload checksum mismatch"));
        }
        let symbols = payload
            .chunks(width * params.alpha)
            .map(|g| {
                g.chunks(width)
                    .map(|c| {
                        let mut buf = [0u8; 8];
                        buf[..width].copy_from_slice(c);
                        let s = u64::from_le_bytes(buf);
                        f.element(s).map_err(CliError::from)
                    })
                    .collect::<Result<Vec<u64>, _>>()
            })
            .collect::<Result<_, _>>()?;
        Ok(ShardFile { header, symbols })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        Self::from_bytes(&bytes).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
    }

    /// This node's content in generation `g`.
    pub fn generation(&self, g: usize) -> ShardVector {
        ShardVector { node_id: self.header.node_id, symbols: self.symbols[g].clone() }
    }
}

pub fn shard_name(node: NodeId) -> String {
    format!("node-{node:03}.shard")
}

/// Frames `data` with its length and cuts it into symbols, zero padded to a
/// whole number of `file_size`-symbol generations.
pub fn bytes_to_symbols(data: &[u8], field: &Field, file_size: usize) -> Vec<u64> {
    let bits = field.bits_per_symbol() as usize;
    let mut framed = (data.len() as u64).to_le_bytes().to_vec();
    framed.extend_from_slice(data);
    let mut symbols: Vec<u64> = framed.view_bits::<Lsb0>().chunks(bits).map(|c| c.load_le::<u64>()).collect();
    let padded = symbols.len().div_ceil(file_size) * file_size;
    symbols.resize(padded, 0);
    symbols
}

/// Inverse of [`bytes_to_symbols`].
pub fn symbols_to_bytes(symbols: &[u64], field: &Field) -> Result<Vec<u8>, CliError> {
    let bits = field.bits_per_symbol() as usize;
    let mut stream: BitVec<u8, Lsb0> = BitVec::with_capacity(symbols.len() * bits);
    for &s in symbols {
        if bits < 64 && s >> bits != 0 {
            return Err(CliError::Format(format!("symbol {s} does not carry {bits}-bit data")));
        }
        stream.extend_from_bitslice(&s.view_bits::<Lsb0>()[..bits]);
    }
    let bytes = stream.into_vec();
    if bytes.len() < 8 {
        return Err(CliError::Format("stream shorter than its length prefix".into()));
    }
    let len = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if len > body.len() {
        return Err(CliError::Format(format!("length prefix {len} exceeds the {} decoded bytes", body.len())));
    }
    if body[len..].iter().any(|&b| b != 0) {
        return Err(CliError::Format("nonzero padding after the data".into()));
    }
    Ok(body[..len].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1_header(node: NodeId, generations: u64) -> ShardHeader {
        ShardHeader {
            variant: Variant::Stable,
            field: FieldSpec::prime(11),
            params: CodeParams::scalar_d_equals_k(6, 3, 2, 11).unwrap(),
            node_id: node,
            generations,
        }
    }

    #[test]
    fn header_is_64_bytes_and_round_trips() {
        let file = ShardFile { header: s1_header(4, 2), symbols: vec![vec![1, 10], vec![0, 7]] };
        let bytes = file.to_bytes().unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 4);
        assert_eq!(&bytes[..4], b"CRCS");
        assert_eq!(&bytes[HEADER_LEN..], &[1, 10, 0, 7]);
        assert_eq!(ShardFile::from_bytes(&bytes).unwrap(), file);
    }

    #[test]
    fn corruption_is_detected() {
        let file = ShardFile { header: s1_header(1, 1), symbols: vec![vec![3, 5]] };
        let bytes = file.to_bytes().unwrap();
        let mut payload = bytes.clone();
        payload[HEADER_LEN] ^= 1;
        assert!(matches!(ShardFile::from_bytes(&payload), Err(CliError::Format(m)) if m.contains("payload checksum")));
        let mut header = bytes.clone();
        header[18] = 2;
        assert!(matches!(ShardFile::from_bytes(&header), Err(CliError::Format(m)) if m.contains("header checksum")));
        assert!(ShardFile::from_bytes(&bytes[..HEADER_LEN + 1]).is_err());
    }

    #[test]
    fn binary_field_uses_two_byte_symbols() {
        let mut h = s1_header(2, 1);
        h.field = FieldSpec::binary(12);
        h.params = CodeParams::scalar_d_equals_k(6, 3, 2, 4096).unwrap();
        let file = ShardFile { header: h, symbols: vec![vec![0xabc, 0x001]] };
        let bytes = file.to_bytes().unwrap();
        assert_eq!(&bytes[HEADER_LEN..], &[0xbc, 0x0a, 0x01, 0x00]);
        assert_eq!(ShardFile::from_bytes(&bytes).unwrap(), file);
    }

    #[test]
    fn striping_round_trips() {
        let f = Field::prime(11).unwrap();
        for len in [1usize, 2, 3, 7, 100] {
            let data: Vec<u8> = (0..len).map(|i| (i * 37 + 5) as u8).collect();
            let symbols = bytes_to_symbols(&data, &f, 6);
            assert_eq!(symbols.len() % 6, 0);
            // 3 data bits per GF(11) symbol
            assert_eq!(symbols.len(), (8 * (len + 8)).div_ceil(3).div_ceil(6) * 6);
            assert!(symbols.iter().all(|&s| s < 8));
            assert_eq!(symbols_to_bytes(&symbols, &f).unwrap(), data);
        }
    }

    #[test]
    fn twelve_symbols_make_two_s1_generations() {
        let f = Field::binary(8).unwrap();
        // 8-byte length prefix + 4 data bytes = 12 byte-sized symbols
        let symbols = bytes_to_symbols(&[1, 2, 3, 4], &f, 6);
        assert_eq!(symbols.len(), 12);
        assert_eq!(symbols.len() / 6, 2);
    }
}
