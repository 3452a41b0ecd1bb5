//! Static attributed graph: schema, data and relations layers for nodes and
//! edges, and the query operations over them.

use std::collections::HashMap;
use std::fmt;

use crate::attrstore::AttributeStore;
use crate::error::{out_of_bounds, Error, Result};
use crate::io::{AttributeDecl, EdgeRecord, InputBundle, NodeRecord, TypeDecl};
use crate::multiedge::MultiEdgeK2Tree;
use crate::schema::{TypeSpec, TypeTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Node,
    Edge,
}

impl Kind {
    pub const ALL: [Kind; 2] = [Kind::Node, Kind::Edge];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Node => "node",
            Kind::Edge => "edge",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of reading one attribute of one element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttrValue {
    Value(String),
    /// The attribute is valid for the element's type but has no value.
    Absent,
    /// The element's type does not declare the attribute.
    Undefined,
}

impl From<Option<&str>> for AttrValue {
    fn from(v: Option<&str>) -> Self {
        v.map_or(AttrValue::Absent, |s| AttrValue::Value(s.to_owned()))
    }
}

/// Result of a filter by type and attribute value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    Ids(Vec<u64>),
    /// The type does not declare the attribute.
    Undefined,
}

/// The query operations, identical for the static and dynamic stores.
/// Ids are internal, 1-based and per kind.
pub trait GraphQueries {
    /// Labels of the given kind, bytewise sorted.
    fn get_types(&self, kind: Kind) -> Vec<String>;
    /// Ids of `label`, ascending.
    fn scan(&self, kind: Kind, label: &str) -> Result<Vec<u64>>;
    fn get_type(&self, kind: Kind, id: u64) -> Result<&str>;
    fn get_attribute(&self, kind: Kind, id: u64, att: &str) -> Result<AttrValue>;
    fn select(&self, kind: Kind, label: &str, att: &str, value: &str) -> Result<Selection>;
    /// Targets of node `id` whose type is `node_label`, ascending.
    fn neighbors(&self, node_label: &str, id: u64) -> Result<Vec<u64>>;
    /// Targets of node `id` reached through an edge of type `edge_label`.
    fn related(&self, edge_label: &str, id: u64) -> Result<Vec<u64>>;
    /// Edge ids from `u` to `v`, ascending.
    fn edges_between(&self, u: u64, v: u64) -> Result<Vec<u64>>;
}

/// Correspondence between external ids (strings) and internal ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdMap {
    ext: Vec<String>,
    by_ext: HashMap<String, u64>,
}

impl IdMap {
    /// `ext[i]` is the external id of internal id `i + 1`.
    pub fn new(ext: Vec<String>) -> Result<Self> {
        let mut by_ext = HashMap::with_capacity(ext.len());
        for (i, e) in ext.iter().enumerate() {
            if by_ext.insert(e.clone(), i as u64 + 1).is_some() {
                return Err(Error::InvalidInput(format!("duplicate external id {e}")));
            }
        }
        Ok(Self { ext, by_ext })
    }

    pub fn len(&self) -> usize {
        self.ext.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ext.is_empty()
    }

    pub fn ext_of(&self, id: u64) -> Option<&str> {
        self.ext.get((id as usize).checked_sub(1)?).map(String::as_str)
    }

    pub fn id_of(&self, ext: &str) -> Option<u64> {
        self.by_ext.get(ext).copied()
    }

    /// Appends `ext` as the next internal id.
    pub fn push(&mut self, ext: String) -> Result<u64> {
        let id = self.ext.len() as u64 + 1;
        if self.by_ext.contains_key(&ext) {
            return Err(Error::AlreadyExists(format!("external id {ext}")));
        }
        self.by_ext.insert(ext.clone(), id);
        self.ext.push(ext);
        Ok(id)
    }

    pub fn externals(&self) -> &[String] {
        &self.ext
    }
}

/// Static attributed multigraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttK2Graph {
    pub(crate) node_schema: TypeTable,
    pub(crate) edge_schema: TypeTable,
    pub(crate) node_attrs: AttributeStore,
    pub(crate) edge_attrs: AttributeStore,
    pub(crate) relations: MultiEdgeK2Tree,
    pub(crate) node_ids: IdMap,
    pub(crate) edge_ids: IdMap,
}

/// Byte counts of the three layers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LayerSizes {
    pub schema: usize,
    pub data: usize,
    pub relations: usize,
}

impl LayerSizes {
    pub fn total(&self) -> usize {
        self.schema + self.data + self.relations
    }
}

impl AttK2Graph {
    /// Builds the store. Internal ids follow (label, external id) order,
    /// both compared bytewise.
    pub fn build(bundle: &InputBundle, k: u32) -> Result<Self> {
        bundle.validate()?;

        let mut node_order: Vec<usize> = (0..bundle.nodes.len()).collect();
        node_order.sort_by(|&a, &b| {
            let (x, y) = (&bundle.nodes[a], &bundle.nodes[b]);
            (&x.label, &x.ext_id).cmp(&(&y.label, &y.ext_id))
        });
        let mut edge_order: Vec<usize> = (0..bundle.edges.len()).collect();
        edge_order.sort_by(|&a, &b| {
            let (x, y) = (&bundle.edges[a], &bundle.edges[b]);
            (&x.label, &x.ext_id).cmp(&(&y.label, &y.ext_id))
        });

        let node_schema = TypeTable::build(type_specs(bundle, Kind::Node, |l| {
            bundle.nodes.iter().filter(|n| n.label == l).count()
        }))?;
        let edge_schema = TypeTable::build(type_specs(bundle, Kind::Edge, |l| {
            bundle.edges.iter().filter(|e| e.label == l).count()
        }))?;

        let node_ids = IdMap::new(node_order.iter().map(|&i| bundle.nodes[i].ext_id.clone()).collect())?;
        let edge_ids = IdMap::new(edge_order.iter().map(|&i| bundle.edges[i].ext_id.clone()).collect())?;

        let node_rows: Vec<_> = node_order.iter().map(|&i| bundle.nodes[i].attrs.clone()).collect();
        let edge_rows: Vec<_> = edge_order.iter().map(|&i| bundle.edges[i].attrs.clone()).collect();
        let node_attrs = AttributeStore::build(&node_schema, &node_rows, k)?;
        let edge_attrs = AttributeStore::build(&edge_schema, &edge_rows, k)?;

        let mut triples = Vec::with_capacity(bundle.edges.len());
        for (i, &e) in edge_order.iter().enumerate() {
            let rec = &bundle.edges[e];
            let endpoint = |ext: &str| {
                node_ids
                    .id_of(ext)
                    .ok_or_else(|| Error::InvalidInput(format!("edge {}: unknown node {ext}", rec.ext_id)))
            };
            triples.push((i as u64 + 1, endpoint(&rec.source)?, endpoint(&rec.target)?));
        }
        let relations = MultiEdgeK2Tree::build(node_ids.len() as u64, &triples, k)?;

        Ok(Self {
            node_schema,
            edge_schema,
            node_attrs,
            edge_attrs,
            relations,
            node_ids,
            edge_ids,
        })
    }

    pub fn schema(&self, kind: Kind) -> &TypeTable {
        match kind {
            Kind::Node => &self.node_schema,
            Kind::Edge => &self.edge_schema,
        }
    }

    pub fn attributes(&self, kind: Kind) -> &AttributeStore {
        match kind {
            Kind::Node => &self.node_attrs,
            Kind::Edge => &self.edge_attrs,
        }
    }

    pub fn relations(&self) -> &MultiEdgeK2Tree {
        &self.relations
    }

    pub fn id_map(&self, kind: Kind) -> &IdMap {
        match kind {
            Kind::Node => &self.node_ids,
            Kind::Edge => &self.edge_ids,
        }
    }

    pub fn node_count(&self) -> u64 {
        self.node_schema.max_id()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_schema.max_id()
    }

    /// Origin and target of every edge, indexed by edge id - 1.
    pub fn endpoints(&self) -> Vec<(u64, u64)> {
        let mut out = vec![(0, 0); self.edge_count() as usize];
        for (e, u, v) in self.relations.triples() {
            out[e as usize - 1] = (u, v);
        }
        out
    }

    /// In-memory size of each layer.
    pub fn layer_sizes(&self) -> LayerSizes {
        LayerSizes {
            schema: self.node_schema.heap_bytes() + self.edge_schema.heap_bytes(),
            data: self.node_attrs.heap_bytes() + self.edge_attrs.heap_bytes(),
            relations: self.relations.heap_bytes(),
        }
    }

    /// The store's contents as an input bundle, records in internal id order.
    pub fn export_bundle(&self) -> Result<InputBundle> {
        let mut bundle = InputBundle::default();
        for kind in Kind::ALL {
            let schema = self.schema(kind);
            for (t, label) in schema.labels().iter().enumerate() {
                let flags = schema.dense_flags_at(t);
                bundle.types.push(TypeDecl {
                    kind,
                    label: label.clone(),
                    attributes: schema
                        .attributes_at(t)
                        .iter()
                        .enumerate()
                        .map(|(i, name)| AttributeDecl {
                            name: name.clone(),
                            dense: flags.bit(i),
                        })
                        .collect(),
                });
            }
        }
        let attrs_of = |kind: Kind, id: u64| -> Result<Vec<(String, String)>> {
            let schema = self.schema(kind);
            let t = schema.type_index_of(id)?;
            let mut out = Vec::new();
            for a in schema.attributes_at(t) {
                if let AttrValue::Value(v) = self.get_attribute(kind, id, a)? {
                    out.push((a.clone(), v));
                }
            }
            Ok(out)
        };
        for id in 1..=self.node_count() {
            bundle.nodes.push(NodeRecord {
                ext_id: self.node_ids.ext_of(id).expect("mapped").to_owned(),
                label: self.node_schema.type_of(id)?.to_owned(),
                attrs: attrs_of(Kind::Node, id)?,
            });
        }
        for (i, (u, v)) in self.endpoints().into_iter().enumerate() {
            let id = i as u64 + 1;
            bundle.edges.push(EdgeRecord {
                ext_id: self.edge_ids.ext_of(id).expect("mapped").to_owned(),
                label: self.edge_schema.type_of(id)?.to_owned(),
                source: self.node_ids.ext_of(u).expect("mapped").to_owned(),
                target: self.node_ids.ext_of(v).expect("mapped").to_owned(),
                attrs: attrs_of(Kind::Edge, id)?,
            });
        }
        Ok(bundle)
    }

    fn check_node(&self, id: u64) -> Result<()> {
        if id == 0 || id > self.node_count() {
            Err(out_of_bounds(id, self.node_count()))
        } else {
            Ok(())
        }
    }
}

fn type_specs(bundle: &InputBundle, kind: Kind, count: impl Fn(&str) -> usize) -> Vec<TypeSpec> {
    bundle
        .types
        .iter()
        .filter(|t| t.kind == kind)
        .map(|t| TypeSpec {
            label: t.label.clone(),
            count: count(&t.label) as u64,
            attributes: t.attributes.iter().map(|a| (a.name.clone(), a.dense)).collect(),
        })
        .collect()
}

impl GraphQueries for AttK2Graph {
    fn get_types(&self, kind: Kind) -> Vec<String> {
        self.schema(kind).labels().to_vec()
    }

    fn scan(&self, kind: Kind, label: &str) -> Result<Vec<u64>> {
        Ok(self.schema(kind).ids_of(label)?.collect())
    }

    fn get_type(&self, kind: Kind, id: u64) -> Result<&str> {
        self.schema(kind).type_of(id)
    }

    fn get_attribute(&self, kind: Kind, id: u64, att: &str) -> Result<AttrValue> {
        self.attributes(kind).get(self.schema(kind), id, att)
    }

    fn select(&self, kind: Kind, label: &str, att: &str, value: &str) -> Result<Selection> {
        self.attributes(kind).select(self.schema(kind), label, att, value)
    }

    fn neighbors(&self, node_label: &str, id: u64) -> Result<Vec<u64>> {
        let range = self.node_schema.ids_of(node_label)?;
        self.check_node(id)?;
        let mut out = Vec::new();
        self.relations
            .for_each_neighbor(id, *range.start(), *range.end(), |v, _| out.push(v))?;
        Ok(out)
    }

    fn related(&self, edge_label: &str, id: u64) -> Result<Vec<u64>> {
        let range = self.edge_schema.ids_of(edge_label)?;
        self.check_node(id)?;
        let mut out = Vec::new();
        self.relations.for_each_neighbor(id, 1, self.node_count(), |v, edges| {
            if edges.iter().any(|e| range.contains(&e)) {
                out.push(v);
            }
        })?;
        Ok(out)
    }

    fn edges_between(&self, u: u64, v: u64) -> Result<Vec<u64>> {
        self.relations.edges_between(u, v)
    }
}
