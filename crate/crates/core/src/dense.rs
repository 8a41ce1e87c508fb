//! Exact inner-product passage search over encoder embeddings.

use std::io::{Read, Write};
use std::path::Path;

use crate::corpus::{Corpus, RankedList};
use crate::error::{Error, Result};

/// Text → fixed-dimension vector.
pub trait Encoder: Send + Sync {
    fn dim(&self) -> usize;
    fn encode(&self, text: &str) -> Vec<f64>;
}

/// Lowercased alphanumeric tokens.
pub fn word_tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).map(str::to_lowercase)
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Bag-of-words hashed into `dim` buckets, L2-normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashEncoder {
    pub dim: usize,
}

impl HashEncoder {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn bucket(&self, token: &str) -> usize {
        (fnv1a(token) % self.dim as u64) as usize
    }
}

impl Encoder for HashEncoder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for w in word_tokens(text) {
            v[self.bucket(&w)] += 1.0;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nonzero coordinates of a query vector.
pub fn nonzeros(q: &[f64]) -> Vec<(usize, f64)> {
    q.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i, *v)).collect()
}

/// Inner product restricted to the query's nonzero coordinates. Equal to
/// [`dot`] up to the sign of a zero result.
pub fn sparse_dot(q: &[(usize, f64)], row: &[f64]) -> f64 {
    q.iter().fold(0.0, |acc, &(i, v)| acc + v * row[i])
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot(a, b) / (na * nb)
    }
}

const MAGIC: &[u8; 4] = b"SRDX";
pub const INDEX_VERSION: u32 = 1;

/// Passage embeddings in a flat row-major buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseIndex {
    dim: usize,
    ids: Vec<String>,
    data: Vec<f64>,
}

impl DenseIndex {
    pub fn new(dim: usize) -> Self {
        Self { dim, ids: Vec::new(), data: Vec::new() }
    }

    pub fn build(corpus: &Corpus, encoder: &dyn Encoder) -> Result<Self> {
        let mut idx = Self::new(encoder.dim());
        for p in corpus.passages() {
            idx.push(&p.id, encoder.encode(&p.text))?;
        }
        Ok(idx)
    }

    pub fn push(&mut self, id: &str, emb: Vec<f64>) -> Result<()> {
        if emb.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: emb.len() });
        }
        if self.ids.iter().any(|i| i == id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        self.ids.push(id.to_string());
        self.data.extend(emb);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn embedding(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Exact top-K by inner product; ties go to the smaller passage id.
    pub fn search(&self, q: &[f64], k: usize) -> Result<RankedList> {
        if q.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: q.len() });
        }
        let nz = nonzeros(q);
        let scores: Vec<f64> = (0..self.len()).map(|i| sparse_dot(&nz, self.embedding(i))).collect();
        Ok(RankedList::top_k(&self.ids, &scores, k))
    }

    /// Layout: magic `SRDX`, version u32, dim u32, count u64, then per entry
    /// an id (u32 byte length + UTF-8) and `dim` f64 values. Little-endian.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&INDEX_VERSION.to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.ids.len() as u64).to_le_bytes())?;
        for (i, id) in self.ids.iter().enumerate() {
            w.write_all(&(id.len() as u32).to_le_bytes())?;
            w.write_all(id.as_bytes())?;
            for v in self.embedding(i) {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::InvalidArgument("not a dense index file".into()));
        }
        let version = read_u32(&mut r)?;
        if version != INDEX_VERSION {
            return Err(Error::VersionMismatch { expected: INDEX_VERSION, found: version });
        }
        let dim = read_u32(&mut r)? as usize;
        let mut count = [0u8; 8];
        r.read_exact(&mut count)?;
        let count = u64::from_le_bytes(count) as usize;
        let mut idx = Self::new(dim);
        for _ in 0..count {
            let n = read_u32(&mut r)? as usize;
            let mut id = vec![0u8; n];
            r.read_exact(&mut id)?;
            let id = String::from_utf8(id).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let mut emb = Vec::with_capacity(dim);
            let mut buf = [0u8; 8];
            for _ in 0..dim {
                r.read_exact(&mut buf)?;
                emb.push(f64::from_le_bytes(buf));
            }
            idx.push(&id, emb)?;
        }
        Ok(idx)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(f)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Passage;

    fn corpus() -> Corpus {
        Corpus::new(
            ["alpha beta", "gamma delta", "alpha gamma"]
                .iter()
                .enumerate()
                .map(|(i, t)| Passage { id: format!("p{}", i + 1), title: String::new(), text: t.to_string() })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn toy_vectors() {
        let mut idx = DenseIndex::new(2);
        idx.push("c1", vec![1.0, 0.0]).unwrap();
        idx.push("c2", vec![0.0, 1.0]).unwrap();
        idx.push("c3", vec![0.5, 0.5]).unwrap();
        let r = idx.search(&[1.0, 0.0], 2).unwrap();
        assert_eq!(r.entries, vec![("c1".to_string(), 1.0), ("c3".to_string(), 0.5)]);
        assert_eq!(idx.search(&[1.0, 0.0], 10).unwrap().len(), 3);
        assert!(matches!(idx.search(&[1.0], 1), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn ties_by_id() {
        let mut idx = DenseIndex::new(1);
        for id in ["b", "a", "c"] {
            idx.push(id, vec![1.0]).unwrap();
        }
        assert_eq!(idx.search(&[1.0], 3).unwrap().ids().collect::<Vec<_>>(), vec!["a", "b", "c"]);
    }

    #[test]
    fn hash_encoder_properties() {
        let e = HashEncoder::new(4096);
        assert_eq!(e.encode("The cat sat"), e.encode("The cat sat"));
        assert!((dot(&e.encode("the cat sat"), &e.encode("THE cat, sat")) - 1.0).abs() < 1e-12);
        let (a, b) = ("river castle", "orange motor");
        let buckets_a: Vec<usize> = word_tokens(a).map(|w| e.bucket(&w)).collect();
        assert!(word_tokens(b).all(|w| !buckets_a.contains(&e.bucket(&w))));
        assert_eq!(dot(&e.encode(a), &e.encode(b)), 0.0);
        assert!(e.encode("").iter().all(|v| *v == 0.0));
    }

    #[test]
    fn build_and_persist() {
        let e = HashEncoder::new(64);
        let idx = DenseIndex::build(&corpus(), &e).unwrap();
        assert_eq!(idx.len(), 3);
        assert_eq!(idx, DenseIndex::build(&corpus(), &e).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("idx/dense.bin");
        idx.save(&path).unwrap();
        assert_eq!(DenseIndex::load(&path).unwrap(), idx);
    }

    #[test]
    fn mixed_dims_rejected() {
        let mut idx = DenseIndex::new(3);
        assert!(matches!(idx.push("a", vec![0.0; 4]), Err(Error::DimMismatch { expected: 3, got: 4 })));
    }

    #[test]
    fn truncated_file_errors() {
        let mut idx = DenseIndex::new(2);
        idx.push("a", vec![1.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        idx.write_to(&mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(DenseIndex::read_from(&buf[..]).is_err());
    }
}
