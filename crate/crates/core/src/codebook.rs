//! Seeded registry of concept vectors.
//!
//! Node vectors `p_1..p_N`, hyperedge-id vectors `e_1..e_M`, the size marker
//! `s` and the attribute vocabulary each come from their own substream (see
//! [`crate::rng`]), so growing one role never disturbs another.
//!
//! Binary layout (all integers little-endian):
//!
//! ```text
//! magic "HDCB" | version u16 | fingerprint u64 | body
//! body = flags u16 | d u64 | seed u64 | nodes u64 | edge_ids u64 | attrs u64
//!        | attrs x (key_len u32, key utf-8)
//!        | f64 payload: nodes, edge ids, size, attributes in key order
//! ```
//!
//! The fingerprint is the first 8 bytes of SHA-256 over `body`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::{key_index, substream, Role};
use crate::vsa::HyperVector;

pub const MAGIC: &[u8; 4] = b"HDCB";
pub const FORMAT_VERSION: u16 = 1;
pub const DEFAULT_MAX_NODES: usize = 512;
pub const DEFAULT_MAX_EDGE_IDS: usize = 64;

const FLAG_UNITARY: u16 = 1;

/// Parameters that fully determine the generated part of a codebook.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodebookSpec {
    pub dimension: usize,
    pub seed: u64,
    pub max_nodes: usize,
    pub max_edge_ids: usize,
    /// Project generated vectors to unit spectral magnitude.
    pub unitary: bool,
}

impl CodebookSpec {
    pub fn new(dimension: usize, seed: u64) -> Self {
        Self {
            dimension,
            seed,
            max_nodes: DEFAULT_MAX_NODES,
            max_edge_ids: DEFAULT_MAX_EDGE_IDS,
            unitary: true,
        }
    }

    pub fn nodes(mut self, n: usize) -> Self {
        self.max_nodes = n;
        self
    }

    pub fn edge_ids(mut self, m: usize) -> Self {
        self.max_edge_ids = m;
        self
    }

    pub fn unitary(mut self, unitary: bool) -> Self {
        self.unitary = unitary;
        self
    }

    pub fn build(&self) -> Result<Codebook> {
        if self.dimension < 2 {
            return Err(Error::InvalidDimension(self.dimension));
        }
        if self.max_nodes < 1 {
            return Err(Error::invalid("a codebook needs at least one node vector"));
        }
        let draw = |role, idx| self.draw(role, idx);
        let nodes = (0..self.max_nodes as u64)
            .map(|i| draw(Role::Node, i))
            .collect::<Result<_>>()?;
        let edge_ids = (0..self.max_edge_ids as u64)
            .map(|i| draw(Role::EdgeId, i))
            .collect::<Result<_>>()?;
        let size = draw(Role::Size, 0)?;
        let mut cb = Codebook {
            dimension: self.dimension,
            seed: self.seed,
            unitary: self.unitary,
            nodes,
            edge_ids,
            size,
            attributes: BTreeMap::new(),
            fingerprint: 0,
        };
        cb.refresh_fingerprint();
        Ok(cb)
    }

    fn draw(&self, role: Role, index: u64) -> Result<HyperVector> {
        let v = HyperVector::random(self.dimension, &mut substream(self.seed, role, index))?;
        Ok(if self.unitary { v.to_unitary() } else { v })
    }
}

/// `build_codebook(d, seed, n_max_nodes, m_max_edges)` with default options.
pub fn build_codebook(
    d: usize,
    seed: u64,
    max_nodes: usize,
    max_edge_ids: usize,
) -> Result<Codebook> {
    CodebookSpec::new(d, seed)
        .nodes(max_nodes)
        .edge_ids(max_edge_ids)
        .build()
}

/// An immutable concept registry. The `with_*` methods return extended copies.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    dimension: usize,
    seed: u64,
    unitary: bool,
    nodes: Vec<HyperVector>,
    edge_ids: Vec<HyperVector>,
    size: HyperVector,
    attributes: BTreeMap<String, HyperVector>,
    fingerprint: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CodebookSummary {
    pub dimension: usize,
    pub seed: u64,
    pub unitary: bool,
    pub node_vectors: usize,
    pub edge_id_vectors: usize,
    pub attribute_vectors: usize,
    pub fingerprint: String,
}

impl Codebook {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn max_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn max_edge_ids(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Node vector `p_i`, 1-based.
    pub fn node(&self, i: usize) -> Result<&HyperVector> {
        lookup(&self.nodes, i, "node")
    }

    pub fn nodes(&self) -> &[HyperVector] {
        &self.nodes
    }

    /// Hyperedge-id vector `e_i`, 1-based.
    pub fn edge_id(&self, i: usize) -> Result<&HyperVector> {
        lookup(&self.edge_ids, i, "edge-id")
    }

    pub fn size_vector(&self) -> &HyperVector {
        &self.size
    }

    pub fn attribute(&self, key: &str) -> Result<&HyperVector> {
        self.attributes
            .get(key)
            .ok_or_else(|| Error::UnknownKey(key.to_owned()))
    }

    pub fn attribute_keys(&self) -> impl Iterator<Item = &str> {
        self.attributes.keys().map(String::as_str)
    }

    pub fn summary(&self) -> CodebookSummary {
        CodebookSummary {
            dimension: self.dimension,
            seed: self.seed,
            unitary: self.unitary,
            node_vectors: self.nodes.len(),
            edge_id_vectors: self.edge_ids.len(),
            attribute_vectors: self.attributes.len(),
            fingerprint: format!("{:016x}", self.fingerprint),
        }
    }

    /// Adds seeded random vectors for `keys`. Keys already present are kept
    /// as they are; each new key's vector depends only on (seed, key).
    pub fn with_generated_attributes<I, S>(mut self, keys: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for key in keys {
            let key = key.as_ref();
            if self.attributes.contains_key(key) {
                continue;
            }
            let spec = CodebookSpec::new(self.dimension, self.seed).unitary(self.unitary);
            let v = spec.draw(Role::Attribute, key_index(key))?;
            self.attributes.insert(key.to_owned(), v);
        }
        self.refresh_fingerprint();
        Ok(self)
    }

    /// Registers externally produced vectors as attributes.
    pub fn with_concepts(mut self, concepts: ConceptVectors) -> Result<Self> {
        if concepts.dimension != self.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: concepts.dimension,
            });
        }
        for (key, v) in concepts.entries {
            if self.attributes.contains_key(&key) {
                return Err(Error::DuplicateKey(key));
            }
            self.attributes.insert(key, v);
        }
        self.refresh_fingerprint();
        Ok(self)
    }

    /// Builds a codebook at the imported dimension and registers the concepts.
    pub fn from_concepts(concepts: ConceptVectors, spec: CodebookSpec) -> Result<Self> {
        CodebookSpec {
            dimension: concepts.dimension,
            ..spec
        }
        .build()?
        .with_concepts(concepts)
    }

    fn refresh_fingerprint(&mut self) {
        self.fingerprint = fingerprint_of(&self.body_bytes());
    }

    fn body_bytes(&self) -> Vec<u8> {
        let payload_len = (self.nodes.len() + self.edge_ids.len() + 1 + self.attributes.len())
            * self.dimension
            * 8;
        let mut out = Vec::with_capacity(42 + payload_len);
        let flags = if self.unitary { FLAG_UNITARY } else { 0 };
        out.extend_from_slice(&flags.to_le_bytes());
        for v in [
            self.dimension as u64,
            self.seed,
            self.nodes.len() as u64,
            self.edge_ids.len() as u64,
            self.attributes.len() as u64,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for key in self.attributes.keys() {
            out.extend_from_slice(&(key.len() as u32).to_le_bytes());
            out.extend_from_slice(key.as_bytes());
        }
        let vectors = self
            .nodes
            .iter()
            .chain(&self.edge_ids)
            .chain(std::iter::once(&self.size))
            .chain(self.attributes.values());
        for v in vectors {
            for x in v.as_slice() {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let body = self.body_bytes();
        let mut out = Vec::with_capacity(14 + body.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&self.fingerprint.to_le_bytes());
        out.extend_from_slice(&body);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        if r.take(4)? != MAGIC {
            return Err(Error::BadMagic);
        }
        let version = r.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::VersionMismatch(version));
        }
        let stored = r.u64()?;
        let body_start = r.pos;

        let flags = r.u16()?;
        let dimension = r.usize()?;
        let seed = r.u64()?;
        let n_nodes = r.usize()?;
        let n_edge_ids = r.usize()?;
        let n_attrs = r.usize()?;
        let mut raw_keys = Vec::with_capacity(n_attrs.min(1 << 16));
        for _ in 0..n_attrs {
            let len = r.u32()? as usize;
            raw_keys.push(r.take(len)?);
        }
        let n_vectors = n_nodes
            .checked_add(n_edge_ids)
            .and_then(|x| x.checked_add(1 + n_attrs))
            .ok_or_else(|| Error::invalid("vector count overflow"))?;
        let payload_len = n_vectors
            .checked_mul(dimension)
            .and_then(|x| x.checked_mul(8))
            .ok_or_else(|| Error::invalid("payload size overflow"))?;
        let payload = r.take(payload_len)?;
        if r.pos != bytes.len() {
            return Err(Error::Malformed {
                line: 0,
                reason: format!("{} trailing bytes", bytes.len() - r.pos),
            });
        }

        let computed = fingerprint_of(&bytes[body_start..]);
        if computed != stored {
            return Err(Error::FingerprintMismatch { stored, computed });
        }

        if dimension < 2 {
            return Err(Error::InvalidDimension(dimension));
        }
        let mut vectors = payload.chunks_exact(dimension * 8).map(|chunk| {
            HyperVector::new(
                chunk
                    .chunks_exact(8)
                    .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                    .collect(),
            )
        });
        let nodes = vectors.by_ref().take(n_nodes).collect::<Result<Vec<_>>>()?;
        let edge_ids = vectors
            .by_ref()
            .take(n_edge_ids)
            .collect::<Result<Vec<_>>>()?;
        let size = vectors.next().expect("size vector present")?;
        let mut attributes = BTreeMap::new();
        for (raw, v) in raw_keys.into_iter().zip(vectors) {
            let key = std::str::from_utf8(raw)
                .map_err(|e| Error::invalid(format!("attribute key is not UTF-8: {e}")))?;
            attributes.insert(key.to_owned(), v?);
        }
        Ok(Codebook {
            dimension,
            seed,
            unitary: flags & FLAG_UNITARY != 0,
            nodes,
            edge_ids,
            size,
            attributes,
            fingerprint: stored,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

fn lookup<'a>(list: &'a [HyperVector], i: usize, role: &'static str) -> Result<&'a HyperVector> {
    if i == 0 || i > list.len() {
        return Err(Error::CapacityExceeded {
            role,
            requested: i,
            available: list.len(),
        });
    }
    Ok(&list[i - 1])
}

pub(crate) fn fingerprint_of(bytes: &[u8]) -> u64 {
    let digest = Sha256::digest(bytes);
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pub(crate) pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let out = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(Error::Truncated {
                needed: self.pos.saturating_add(n),
                found: self.bytes.len(),
            }),
        }
    }

    pub(crate) fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::invalid("count exceeds address space"))
    }
}

/// Vectors read from a concept file, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptVectors {
    pub dimension: usize,
    pub entries: Vec<(String, HyperVector)>,
}

impl ConceptVectors {
    /// Parses `"<key_column>,dim=<d>"` followed by `key,x_1,..,x_d` rows.
    pub fn parse(text: &str, key_column: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Malformed {
            line: 1,
            reason: "missing header".into(),
        })?;
        let malformed = |line, reason: String| Error::Malformed { line, reason };
        let (col, dim) = header
            .split_once(',')
            .ok_or_else(|| malformed(hline, "header must be \"key,dim=<d>\"".into()))?;
        if col.trim() != key_column {
            return Err(malformed(
                hline,
                format!("key column is {:?}, expected {key_column:?}", col.trim()),
            ));
        }
        let dimension: usize = dim
            .trim()
            .strip_prefix("dim=")
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| malformed(hline, format!("bad dimension field {dim:?}")))?;
        if dimension < 2 {
            return Err(Error::InvalidDimension(dimension));
        }

        let mut seen = std::collections::HashSet::new();
        let mut entries = Vec::new();
        for (line, row) in lines {
            let mut fields = row.split(',');
            let key = fields.next().unwrap_or_default().trim().to_owned();
            if key.is_empty() {
                return Err(malformed(line, "empty key".into()));
            }
            let values = fields
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| malformed(line, e.to_string()))?;
            if values.len() != dimension {
                return Err(malformed(
                    line,
                    format!("expected {dimension} values, found {}", values.len()),
                ));
            }
            if !seen.insert(key.clone()) {
                return Err(Error::DuplicateKey(key));
            }
            let v = HyperVector::new(values).map_err(|e| malformed(line, e.to_string()))?;
            entries.push((key, v));
        }
        Ok(Self { dimension, entries })
    }
}

pub fn import_concept_vectors(path: impl AsRef<Path>, key_column: &str) -> Result<ConceptVectors> {
    let path = path.as_ref();
    let text = crate::error::read_text(path)?;
    ConceptVectors::parse(&text, key_column)
}
