//! Text input bundles, binary store files and id-map output.
//!
//! A bundle directory holds three tab-separated UTF-8 files:
//!
//! ```text
//! schema.tsv  NODE<TAB>label<TAB>att:kind...   (kind is s or d)
//!             EDGE<TAB>label<TAB>att:kind...
//! nodes.tsv   ext_id<TAB>label<TAB>att=value...
//! edges.tsv   ext_id<TAB>label<TAB>source_ext<TAB>target_ext<TAB>att=value...
//! ```
//!
//! Within a field, `\t`, `\n`, `\r`, `\\` and `\=` stand for tab, newline,
//! carriage return, backslash and `=`. An attribute left out of a record
//! has no value; `att=` sets it to the empty string. Blank lines are ignored.

mod binary;

pub use binary::{from_bytes, load_db, save_db, section_lengths, to_bytes, MAGIC, VERSION};

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{AttK2Graph, Kind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeDecl {
    pub name: String,
    pub dense: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDecl {
    pub kind: Kind,
    pub label: String,
    pub attributes: Vec<AttributeDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeRecord {
    pub ext_id: String,
    pub label: String,
    pub attrs: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecord {
    pub ext_id: String,
    pub label: String,
    pub source: String,
    pub target: String,
    pub attrs: Vec<(String, String)>,
}

/// A whole graph as described by its input files.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InputBundle {
    pub types: Vec<TypeDecl>,
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Schema,
    Nodes,
    Edges,
}

impl Section {
    fn file(self) -> &'static str {
        match self {
            Section::Schema => "schema.tsv",
            Section::Nodes => "nodes.tsv",
            Section::Edges => "edges.tsv",
        }
    }
}

struct Violation {
    section: Section,
    index: usize,
    msg: String,
}

fn violation(section: Section, index: usize, msg: String) -> Violation {
    Violation { section, index, msg }
}

impl InputBundle {
    pub fn type_decl(&self, kind: Kind, label: &str) -> Option<&TypeDecl> {
        self.types.iter().find(|t| t.kind == kind && t.label == label)
    }

    /// Checks labels, attributes, external ids and edge endpoints.
    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|v| {
            Error::InvalidInput(format!("{} record {}: {}", v.section.file(), v.index + 1, v.msg))
        })
    }

    fn check(&self) -> std::result::Result<(), Violation> {
        let mut attrs_of: HashMap<(Kind, &str), HashMap<&str, bool>> = HashMap::new();
        let mut flags: BTreeMap<(Kind, &str), bool> = BTreeMap::new();
        for (i, t) in self.types.iter().enumerate() {
            let bad = |msg: String| violation(Section::Schema, i, msg);
            if t.label.is_empty() {
                return Err(bad("empty label".into()));
            }
            let mut names = HashMap::new();
            for a in &t.attributes {
                if a.name.is_empty() {
                    return Err(bad(format!("empty attribute name in {}", t.label)));
                }
                if names.insert(a.name.as_str(), a.dense).is_some() {
                    return Err(bad(format!("attribute {} repeated in {}", a.name, t.label)));
                }
                if let Some(&d) = flags.get(&(t.kind, a.name.as_str())) {
                    if d != a.dense {
                        return Err(bad(format!(
                            "attribute {} is dense in one {} type and sparse in another",
                            a.name, t.kind
                        )));
                    }
                }
                flags.insert((t.kind, a.name.as_str()), a.dense);
            }
            if attrs_of.insert((t.kind, t.label.as_str()), names).is_some() {
                return Err(bad(format!("{} type {} declared twice", t.kind, t.label)));
            }
        }

        let check_attrs = |section, i: usize, ext: &str, kind: Kind, label: &str, attrs: &[(String, String)]| {
            let declared = attrs_of
                .get(&(kind, label))
                .ok_or_else(|| violation(section, i, format!("{kind} {ext}: undeclared {kind} type {label}")))?;
            let mut seen = HashSet::new();
            for (a, v) in attrs {
                if !declared.contains_key(a.as_str()) {
                    return Err(violation(
                        section,
                        i,
                        format!("{kind} {ext}: ({ext}, {a}, {v}): {a} is not an attribute of {label}"),
                    ));
                }
                if !seen.insert(a.as_str()) {
                    return Err(violation(section, i, format!("{kind} {ext}: attribute {a} given twice")));
                }
            }
            Ok(())
        };

        let mut node_ids = HashSet::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            if !node_ids.insert(n.ext_id.as_str()) {
                return Err(violation(Section::Nodes, i, format!("duplicate node id {}", n.ext_id)));
            }
            check_attrs(Section::Nodes, i, &n.ext_id, Kind::Node, &n.label, &n.attrs)?;
        }
        let mut edge_ids = HashSet::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            if !edge_ids.insert(e.ext_id.as_str()) {
                return Err(violation(Section::Edges, i, format!("duplicate edge id {}", e.ext_id)));
            }
            check_attrs(Section::Edges, i, &e.ext_id, Kind::Edge, &e.label, &e.attrs)?;
            for end in [&e.source, &e.target] {
                if !node_ids.contains(end.as_str()) {
                    return Err(violation(
                        Section::Edges,
                        i,
                        format!("edge {}: dangling endpoint {end}", e.ext_id),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Escapes tab, newline, carriage return, backslash and `=`.
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\\' => out.push_str("\\\\"),
            '=' => out.push_str("\\="),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape(s: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some('=') => out.push('='),
            Some(o) => return Err(format!("unknown escape \\{o}")),
            None => return Err("dangling backslash".into()),
        }
    }
    Ok(out)
}

/// Splits `att=value` at the first unescaped `=`.
fn split_assignment(field: &str) -> std::result::Result<(String, String), String> {
    let bytes = field.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'=' => {
                let name = unescape(&field[..i])?;
                if name.is_empty() {
                    return Err(format!("missing attribute name in `{field}`"));
                }
                return Ok((name, unescape(&field[i + 1..])?));
            }
            _ => i += 1,
        }
    }
    Err(format!("expected att=value, got `{field}`"))
}

fn parse_lines<T>(
    file: &str,
    text: &str,
    mut f: impl FnMut(&[&str]) -> std::result::Result<T, String>,
) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let rec = f(&fields).map_err(|msg| Error::Parse {
            file: file.to_owned(),
            line: i + 1,
            msg,
        })?;
        out.push((i + 1, rec));
    }
    Ok(out)
}

fn field(fields: &[&str], i: usize, what: &str) -> std::result::Result<String, String> {
    let f = fields.get(i).ok_or_else(|| format!("missing {what}"))?;
    let v = unescape(f)?;
    if v.is_empty() {
        return Err(format!("empty {what}"));
    }
    Ok(v)
}

fn parse_attrs(fields: &[&str]) -> std::result::Result<Vec<(String, String)>, String> {
    fields.iter().map(|f| split_assignment(f)).collect()
}

fn parse_schema_line(fields: &[&str]) -> std::result::Result<TypeDecl, String> {
    let kind = match fields[0] {
        "NODE" => Kind::Node,
        "EDGE" => Kind::Edge,
        other => return Err(format!("expected NODE or EDGE, got `{other}`")),
    };
    let label = field(fields, 1, "label")?;
    let mut attributes = Vec::new();
    for f in &fields[2..] {
        let (name, kind) = f
            .rsplit_once(':')
            .ok_or_else(|| format!("expected att:kind, got `{f}`"))?;
        let dense = match kind {
            "s" => false,
            "d" => true,
            other => return Err(format!("attribute kind must be s or d, got `{other}`")),
        };
        let name = unescape(name)?;
        if name.is_empty() {
            return Err("empty attribute name".into());
        }
        attributes.push(AttributeDecl { name, dense });
    }
    Ok(TypeDecl {
        kind,
        label,
        attributes,
    })
}

fn read_file(dir: &Path, name: &str) -> Result<String> {
    fs::read_to_string(dir.join(name)).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", dir.join(name).display())))
    })
}

/// Parses and validates a bundle directory. The first problem found is
/// reported with its file and line number.
pub fn load_input(dir: &Path) -> Result<InputBundle> {
    let schema = parse_lines("schema.tsv", &read_file(dir, "schema.tsv")?, parse_schema_line)?;
    let nodes = parse_lines("nodes.tsv", &read_file(dir, "nodes.tsv")?, |f| {
        Ok(NodeRecord {
            ext_id: field(f, 0, "node id")?,
            label: field(f, 1, "label")?,
            attrs: parse_attrs(f.get(2..).unwrap_or(&[]))?,
        })
    })?;
    let edges = parse_lines("edges.tsv", &read_file(dir, "edges.tsv")?, |f| {
        Ok(EdgeRecord {
            ext_id: field(f, 0, "edge id")?,
            label: field(f, 1, "label")?,
            source: field(f, 2, "source node")?,
            target: field(f, 3, "target node")?,
            attrs: parse_attrs(f.get(4..).unwrap_or(&[]))?,
        })
    })?;
    let lines = |s: Section, i: usize| match s {
        Section::Schema => schema[i].0,
        Section::Nodes => nodes[i].0,
        Section::Edges => edges[i].0,
    };
    let bundle = InputBundle {
        types: schema.iter().map(|(_, t)| t.clone()).collect(),
        nodes: nodes.iter().map(|(_, n)| n.clone()).collect(),
        edges: edges.iter().map(|(_, e)| e.clone()).collect(),
    };
    bundle.check().map_err(|v| Error::Parse {
        file: v.section.file().to_owned(),
        line: lines(v.section, v.index),
        msg: v.msg,
    })?;
    Ok(bundle)
}

fn push_attrs(line: &mut String, attrs: &[(String, String)]) {
    for (a, v) in attrs {
        line.push('\t');
        line.push_str(&escape(a));
        line.push('=');
        line.push_str(&escape(v));
    }
}

/// Renders the three bundle files.
pub fn render_bundle(bundle: &InputBundle) -> (String, String, String) {
    let mut schema = String::new();
    for t in &bundle.types {
        schema.push_str(match t.kind {
            Kind::Node => "NODE",
            Kind::Edge => "EDGE",
        });
        schema.push('\t');
        schema.push_str(&escape(&t.label));
        for a in &t.attributes {
            schema.push('\t');
            schema.push_str(&escape(&a.name));
            schema.push_str(if a.dense { ":d" } else { ":s" });
        }
        schema.push('\n');
    }
    let mut nodes = String::new();
    for n in &bundle.nodes {
        nodes.push_str(&escape(&n.ext_id));
        nodes.push('\t');
        nodes.push_str(&escape(&n.label));
        push_attrs(&mut nodes, &n.attrs);
        nodes.push('\n');
    }
    let mut edges = String::new();
    for e in &bundle.edges {
        for (i, f) in [&e.ext_id, &e.label, &e.source, &e.target].into_iter().enumerate() {
            if i > 0 {
                edges.push('\t');
            }
            edges.push_str(&escape(f));
        }
        push_attrs(&mut edges, &e.attrs);
        edges.push('\n');
    }
    (schema, nodes, edges)
}

/// Writes `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    std::io::Write::write_all(&mut tmp, bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_bundle(dir: &Path, bundle: &InputBundle) -> Result<()> {
    fs::create_dir_all(dir)?;
    let (schema, nodes, edges) = render_bundle(bundle);
    write_atomic(&dir.join("schema.tsv"), schema.as_bytes())?;
    write_atomic(&dir.join("nodes.tsv"), nodes.as_bytes())?;
    write_atomic(&dir.join("edges.tsv"), edges.as_bytes())?;
    Ok(())
}

/// `kind<TAB>ext_id<TAB>internal_id` lines, nodes then edges.
pub fn render_ids(g: &AttK2Graph) -> String {
    let mut out = String::new();
    for kind in Kind::ALL {
        for (i, ext) in g.id_map(kind).externals().iter().enumerate() {
            out.push_str(&format!("{kind}\t{}\t{}\n", escape(ext), i + 1));
        }
    }
    out
}

pub fn write_ids(path: &Path, g: &AttK2Graph) -> Result<()> {
    write_atomic(path, render_ids(g).as_bytes())
}
