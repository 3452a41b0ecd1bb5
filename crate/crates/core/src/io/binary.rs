//! Binary store file.
//!
//! ```text
//! magic "ATTK2TRE" | u32 version | u32 section count
//! per section: u32 tag | u64 offset | u64 length
//! section payloads
//! ```
//!
//! Integers are little-endian. Bit sequences are a u64 bit length followed
//! by the packed u64 words; strings and arrays carry a u64 length prefix.

use std::path::Path;

use crate::attrstore::{AttributeStore, DenseMatrix, SparseAttribute};
use crate::bits::BitSequence;
use crate::error::{Error, Result};
use crate::graph::{AttK2Graph, IdMap};
use crate::k2::K2Tree;
use crate::multiedge::MultiEdgeK2Tree;
use crate::schema::TypeTable;

pub const MAGIC: &[u8; 8] = b"ATTK2TRE";
pub const VERSION: u32 = 1;

const TAG_NODE_SCHEMA: u32 = 1;
const TAG_EDGE_SCHEMA: u32 = 2;
const TAG_NODE_ATTRS: u32 = 3;
const TAG_EDGE_ATTRS: u32 = 4;
const TAG_RELATIONS: u32 = 5;
const TAG_ID_MAPS: u32 = 6;
const TAGS: [u32; 6] = [
    TAG_NODE_SCHEMA,
    TAG_EDGE_SCHEMA,
    TAG_NODE_ATTRS,
    TAG_EDGE_ATTRS,
    TAG_RELATIONS,
    TAG_ID_MAPS,
];
const HEADER_LEN: usize = 8 + 4 + 4 + TAGS.len() * 20;

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn len(&mut self, n: usize) {
        self.u64(n as u64);
    }

    fn str(&mut self, s: &str) {
        self.len(s.len());
        self.buf.extend_from_slice(s.as_bytes());
    }

    fn bits(&mut self, b: &BitSequence) {
        self.len(b.len());
        for &w in b.words() {
            self.u64(w);
        }
    }

    fn u64s(&mut self, v: &[u64]) {
        self.len(v.len());
        for &x in v {
            self.u64(x);
        }
    }

    fn k2(&mut self, t: &K2Tree) {
        self.u32(t.k());
        self.u64(t.n());
        self.u64(t.n_logical());
        self.bits(t.t());
        self.bits(t.l());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    what: &'static str,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8], what: &'static str) -> Self {
        Self { buf, pos: 0, what }
    }

    fn truncated(&self) -> Error {
        Error::Corrupt(format!("{} section truncated at byte {}", self.what, self.pos))
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| self.truncated())?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    /// A count of items each at least `unit` bytes long.
    fn len(&mut self, unit: usize) -> Result<usize> {
        let n = self.u64()?;
        let left = (self.buf.len() - self.pos) as u64;
        if n.saturating_mul(unit.max(1) as u64) > left && unit > 0 {
            return Err(self.truncated());
        }
        usize::try_from(n).map_err(|_| self.truncated())
    }

    fn str(&mut self) -> Result<String> {
        let n = self.len(1)?;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| Error::Corrupt(format!("{} section holds invalid UTF-8", self.what)))
    }

    fn bits(&mut self) -> Result<BitSequence> {
        let n = self.u64()?;
        let words = usize::try_from(n.div_ceil(64)).map_err(|_| self.truncated())?;
        if words.saturating_mul(8) > self.buf.len() - self.pos {
            return Err(self.truncated());
        }
        let mut v = Vec::with_capacity(words);
        for _ in 0..words {
            v.push(self.u64()?);
        }
        BitSequence::from_words(v, n as usize)
    }

    fn u64s(&mut self) -> Result<Vec<u64>> {
        let n = self.len(8)?;
        (0..n).map(|_| self.u64()).collect()
    }

    fn k2(&mut self) -> Result<K2Tree> {
        let k = self.u32()?;
        let n = self.u64()?;
        let n_logical = self.u64()?;
        let t = self.bits()?;
        let l = self.bits()?;
        K2Tree::from_parts(k, n, n_logical, t, l)
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Corrupt(format!(
                "{} section has {} trailing bytes",
                self.what,
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

fn write_schema(w: &mut Writer, s: &TypeTable) {
    w.len(s.labels().len());
    for (t, label) in s.labels().iter().enumerate() {
        w.str(label);
        w.u64(s.upper_limits()[t]);
        let attrs = s.attributes_at(t);
        w.len(attrs.len());
        for a in attrs {
            w.str(a);
        }
        w.bits(s.dense_flags_at(t));
    }
}

fn read_schema(r: &mut Reader) -> Result<TypeTable> {
    let n = r.len(8)?;
    let (mut labels, mut limits, mut attrs, mut dense) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for _ in 0..n {
        labels.push(r.str()?);
        limits.push(r.u64()?);
        let m = r.len(8)?;
        attrs.push((0..m).map(|_| r.str()).collect::<Result<Vec<_>>>()?);
        dense.push(r.bits()?);
    }
    TypeTable::from_parts(labels, limits, attrs, dense).map_err(as_corrupt)
}

fn write_attrs(w: &mut Writer, st: &AttributeStore) {
    let d = st.dense();
    w.k2(d.matrix());
    w.u64(d.rows());
    w.len(d.names().len());
    for ((name, &limit), values) in d.names().iter().zip(d.column_limits()).zip(d.column_values()) {
        w.str(name);
        w.u64(limit);
        w.len(values.len());
        for v in values {
            w.str(v);
        }
    }
    w.len(st.sparse().len());
    for per in st.sparse() {
        w.len(per.len());
        for a in per {
            match a {
                None => w.u8(1),
                Some(s) => {
                    w.u8(0);
                    w.len(s.len());
                    for v in s.values() {
                        match v {
                            None => w.u8(0),
                            Some(v) => {
                                w.u8(1);
                                w.str(v);
                            }
                        }
                    }
                    w.u64s(&s.lex_index());
                }
            }
        }
    }
}

fn read_attrs(r: &mut Reader, schema: &TypeTable) -> Result<AttributeStore> {
    let matrix = r.k2()?;
    let rows = r.u64()?;
    let n = r.len(8)?;
    let (mut names, mut limits, mut values) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..n {
        names.push(r.str()?);
        limits.push(r.u64()?);
        let m = r.len(8)?;
        values.push((0..m).map(|_| r.str()).collect::<Result<Vec<_>>>()?);
    }
    let dense = DenseMatrix::from_parts(matrix, rows, names, limits, values)?;
    let labels = r.len(8)?;
    let mut sparse = Vec::new();
    for _ in 0..labels {
        let m = r.len(1)?;
        let mut per = Vec::new();
        for _ in 0..m {
            per.push(match r.u8()? {
                1 => None,
                0 => {
                    let len = r.len(1)?;
                    let mut vals = Vec::with_capacity(len);
                    for _ in 0..len {
                        vals.push(match r.u8()? {
                            0 => None,
                            1 => Some(r.str()?),
                            t => return Err(Error::Corrupt(format!("bad value marker {t}"))),
                        });
                    }
                    Some(SparseAttribute::from_parts(vals, r.u64s()?)?)
                }
                t => return Err(Error::Corrupt(format!("bad attribute kind tag {t}"))),
            });
        }
        sparse.push(per);
    }
    AttributeStore::from_parts(schema, sparse, dense).map_err(as_corrupt)
}

fn write_relations(w: &mut Writer, m: &MultiEdgeK2Tree) {
    w.k2(m.base());
    w.bits(m.multi());
    w.u64s(&m.last());
    w.u64s(&m.more());
}

fn read_relations(r: &mut Reader) -> Result<MultiEdgeK2Tree> {
    let base = r.k2()?;
    let multi = r.bits()?;
    let last = r.u64s()?;
    let more = r.u64s()?;
    MultiEdgeK2Tree::from_parts(base, multi, last, more)
}

fn write_ids(w: &mut Writer, maps: [&IdMap; 2]) {
    for m in maps {
        w.len(m.len());
        for e in m.externals() {
            w.str(e);
        }
    }
}

fn read_id_map(r: &mut Reader) -> Result<IdMap> {
    let n = r.len(8)?;
    let ext = (0..n).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
    IdMap::new(ext).map_err(as_corrupt)
}

fn as_corrupt(e: Error) -> Error {
    match e {
        Error::Corrupt(_) => e,
        other => Error::Corrupt(other.to_string()),
    }
}

/// Serializes the store. Equal stores produce equal bytes.
pub fn to_bytes(g: &AttK2Graph) -> Vec<u8> {
    let mut sections: Vec<Vec<u8>> = Vec::with_capacity(TAGS.len());
    for tag in TAGS {
        let mut w = Writer::default();
        match tag {
            TAG_NODE_SCHEMA => write_schema(&mut w, &g.node_schema),
            TAG_EDGE_SCHEMA => write_schema(&mut w, &g.edge_schema),
            TAG_NODE_ATTRS => write_attrs(&mut w, &g.node_attrs),
            TAG_EDGE_ATTRS => write_attrs(&mut w, &g.edge_attrs),
            TAG_RELATIONS => write_relations(&mut w, &g.relations),
            _ => write_ids(&mut w, [&g.node_ids, &g.edge_ids]),
        }
        sections.push(w.buf);
    }
    let mut out = Writer::default();
    out.buf.extend_from_slice(MAGIC);
    out.u32(VERSION);
    out.u32(TAGS.len() as u32);
    let mut offset = HEADER_LEN as u64;
    for (tag, s) in TAGS.iter().zip(&sections) {
        out.u32(*tag);
        out.u64(offset);
        out.u64(s.len() as u64);
        offset += s.len() as u64;
    }
    for s in sections {
        out.buf.extend_from_slice(&s);
    }
    out.buf
}

/// Sizes of the six sections, in tag order.
pub fn section_lengths(bytes: &[u8]) -> Result<Vec<(u32, u64)>> {
    Ok(section_table(bytes)?.into_iter().map(|(t, _, l)| (t, l)).collect())
}

fn section_table(bytes: &[u8]) -> Result<Vec<(u32, u64, u64)>> {
    let mut r = Reader::new(bytes, "header");
    if r.take(8).ok() != Some(&MAGIC[..]) {
        return Err(Error::Corrupt("bad magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Corrupt(format!("unsupported version {version}")));
    }
    let count = r.u32()?;
    if count as usize != TAGS.len() {
        return Err(Error::Corrupt(format!("expected {} sections, found {count}", TAGS.len())));
    }
    let mut table = Vec::with_capacity(TAGS.len());
    for expected in TAGS {
        let (tag, off, len) = (r.u32()?, r.u64()?, r.u64()?);
        if tag != expected {
            return Err(Error::Corrupt(format!("section {tag} where {expected} was expected")));
        }
        match off.checked_add(len) {
            Some(end) if off >= HEADER_LEN as u64 && end <= bytes.len() as u64 => {}
            _ => return Err(Error::Corrupt(format!("section {tag} lies outside the file"))),
        }
        table.push((tag, off, len));
    }
    Ok(table)
}

/// Decodes a store. Every malformed input yields [`Error::Corrupt`].
pub fn from_bytes(bytes: &[u8]) -> Result<AttK2Graph> {
    decode(bytes).map_err(as_corrupt)
}

fn decode(bytes: &[u8]) -> Result<AttK2Graph> {
    let table = section_table(bytes)?;
    let section = |i: usize, what| {
        let (_, off, len) = table[i];
        Reader::new(&bytes[off as usize..(off + len) as usize], what)
    };

    let mut r = section(0, "node schema");
    let node_schema = read_schema(&mut r)?;
    r.finish()?;
    let mut r = section(1, "edge schema");
    let edge_schema = read_schema(&mut r)?;
    r.finish()?;
    let mut r = section(2, "node attributes");
    let node_attrs = read_attrs(&mut r, &node_schema)?;
    r.finish()?;
    let mut r = section(3, "edge attributes");
    let edge_attrs = read_attrs(&mut r, &edge_schema)?;
    r.finish()?;
    let mut r = section(4, "relations");
    let relations = read_relations(&mut r)?;
    r.finish()?;
    let mut r = section(5, "id maps");
    let node_ids = read_id_map(&mut r)?;
    let edge_ids = read_id_map(&mut r)?;
    r.finish()?;

    if node_ids.len() as u64 != node_schema.max_id()
        || edge_ids.len() as u64 != edge_schema.max_id()
        || relations.n_nodes() != node_schema.max_id()
        || relations.edge_count() as u64 != edge_schema.max_id()
    {
        return Err(Error::Corrupt("layer sizes disagree".into()));
    }
    let mut seen = vec![false; edge_ids.len()];
    for (e, _, _) in relations.triples() {
        match seen.get_mut((e as usize).wrapping_sub(1)) {
            Some(s) if !*s => *s = true,
            _ => return Err(Error::Corrupt(format!("edge id {e} misplaced in relations"))),
        }
    }

    Ok(AttK2Graph {
        node_schema,
        edge_schema,
        node_attrs,
        edge_attrs,
        relations,
        node_ids,
        edge_ids,
    })
}

pub fn save_db(g: &AttK2Graph, path: &Path) -> Result<()> {
    super::write_atomic(path, &to_bytes(g))
}

pub fn load_db(path: &Path) -> Result<AttK2Graph> {
    from_bytes(&std::fs::read(path)?)
}
