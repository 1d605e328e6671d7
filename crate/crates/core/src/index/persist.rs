use std::collections::BTreeMap;
use std::path::Path;

use super::{EntityIndex, EntityRecord, IndexError, StopWords};

pub const INDEX_MAGIC: &[u8; 8] = b"MSRQIDX\0";
pub const INDEX_VERSION: u32 = 1;

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IndexError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| IndexError::Format(format!("truncated at byte {}", self.pos)))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u32(&mut self) -> Result<u32, IndexError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn f64(&mut self) -> Result<f64, IndexError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn str(&mut self) -> Result<String, IndexError> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|e| IndexError::Format(e.to_string()))
    }
}

pub fn index_to_bytes(index: &EntityIndex) -> Vec<u8> {
    let mut w = Writer(INDEX_MAGIC.to_vec());
    w.u32(INDEX_VERSION);
    let stop: Vec<&str> = index.stopwords.words().collect();
    w.u32(stop.len() as u32);
    for s in stop {
        w.str(s);
    }
    w.u32(index.records.len() as u32);
    for (r, &len) in index.records.iter().zip(&index.doc_len) {
        w.str(&r.id);
        w.str(&r.name);
        w.str(&r.kb_type);
        w.str(&r.city);
        w.f64(r.lat);
        w.f64(r.lon);
        w.f64(r.rating.unwrap_or(f64::NAN));
        w.str(&r.text);
        w.u32(len);
    }
    w.u32(index.postings.len() as u32);
    for (t, p) in &index.postings {
        w.str(t);
        w.u32(p.len() as u32);
        for &(d, tf) in p {
            w.u32(d);
            w.u32(tf);
        }
    }
    w.0
}

pub fn index_from_bytes(buf: &[u8]) -> Result<EntityIndex, IndexError> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(8).ok() != Some(&INDEX_MAGIC[..]) {
        return Err(IndexError::Format("not an index file".into()));
    }
    let version = r.u32()?;
    if version != INDEX_VERSION {
        return Err(IndexError::Version {
            found: version,
            expected: INDEX_VERSION,
        });
    }
    let n_stop = r.u32()?;
    let mut stop = String::new();
    for _ in 0..n_stop {
        stop.push_str(&r.str()?);
        stop.push('\n');
    }
    let n = r.u32()? as usize;
    let mut records = Vec::with_capacity(n.min(1 << 20));
    let mut doc_len = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let id = r.str()?;
        let name = r.str()?;
        let kb_type = r.str()?;
        let city = r.str()?;
        let lat = r.f64()?;
        let lon = r.f64()?;
        let rating = Some(r.f64()?).filter(|x| !x.is_nan());
        let text = r.str()?;
        doc_len.push(r.u32()?);
        records.push(EntityRecord {
            id,
            name,
            kb_type,
            city,
            lat,
            lon,
            rating,
            text,
        });
    }
    if records.windows(2).any(|w| w[0].id >= w[1].id) {
        return Err(IndexError::Format("records not sorted by id".into()));
    }
    let n_terms = r.u32()?;
    let mut postings = BTreeMap::new();
    for _ in 0..n_terms {
        let t = r.str()?;
        let m = r.u32()?;
        let mut p = Vec::with_capacity((m as usize).min(n));
        for _ in 0..m {
            let d = r.u32()?;
            let tf = r.u32()?;
            if d as usize >= n || p.last().is_some_and(|&(prev, _)| prev >= d) {
                return Err(IndexError::Format(format!("bad posting for `{t}`")));
            }
            p.push((d, tf));
        }
        postings.insert(t, p);
    }
    if r.pos != buf.len() {
        return Err(IndexError::Format("trailing bytes".into()));
    }
    Ok(EntityIndex::from_parts(
        records,
        StopWords::parse(&stop),
        postings,
        doc_len,
    ))
}

pub fn save_index(index: &EntityIndex, path: impl AsRef<Path>) -> Result<(), IndexError> {
    let path = path.as_ref();
    std::fs::write(path, index_to_bytes(index)).map_err(|source| IndexError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_index(path: impl AsRef<Path>) -> Result<EntityIndex, IndexError> {
    let path = path.as_ref();
    let buf = std::fs::read(path).map_err(|source| IndexError::Io {
        path: path.display().to_string(),
        source,
    })?;
    index_from_bytes(&buf)
}
