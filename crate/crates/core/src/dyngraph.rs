//! Updatable attributed graph. Element types live in dynamic symbol
//! sequences, each dense attribute in its own dynamic k²-tree and the
//! relations in a dynamic k²-tree with per-leaf edge lists.
//!
//! Ids are handed out in insertion order and never reused. Removing an
//! element leaves a tombstone: its id stays allocated and queries on it
//! fail with `NotFound`.

use std::collections::HashMap;

use crate::attrstore::DynAttributeStore;
use crate::error::{out_of_bounds, Error, Result};
use crate::graph::{AttK2Graph, AttrValue, GraphQueries, Kind, Selection};
use crate::io::{AttributeDecl, EdgeRecord, InputBundle, NodeRecord, TypeDecl};
use crate::multiedge::DynMultiEdge;
use crate::schema::DynTypeTable;

/// One insertion when replaying a bundle: the record at this index of
/// `nodes` or `edges`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplayStep {
    Node(usize),
    Edge(usize),
}

#[derive(Clone, Debug, Default)]
struct Elements {
    live: Vec<bool>,
    ext: Vec<Option<String>>,
    by_ext: HashMap<String, u64>,
}

impl Elements {
    fn push(&mut self, ext: Option<&str>) -> Result<()> {
        if let Some(e) = ext {
            if self.by_ext.contains_key(e) {
                return Err(Error::AlreadyExists(format!("external id {e}")));
            }
        }
        let id = self.live.len() as u64 + 1;
        if let Some(e) = ext {
            self.by_ext.insert(e.to_owned(), id);
        }
        self.live.push(true);
        self.ext.push(ext.map(str::to_owned));
        Ok(())
    }

    fn is_live(&self, id: u64) -> bool {
        id >= 1 && self.live.get(id as usize - 1).copied().unwrap_or(false)
    }

    fn check(&self, kind: Kind, id: u64) -> Result<()> {
        if id == 0 || id > self.live.len() as u64 {
            return Err(out_of_bounds(id, self.live.len()));
        }
        if !self.live[id as usize - 1] {
            return Err(Error::NotFound(format!("{kind} {id} was removed")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct DynAttK2Graph {
    k: u32,
    node_schema: DynTypeTable,
    edge_schema: DynTypeTable,
    node_attrs: DynAttributeStore,
    edge_attrs: DynAttributeStore,
    relations: DynMultiEdge,
    nodes: Elements,
    edges: Elements,
    endpoints: Vec<(u64, u64)>,
}

impl DynAttK2Graph {
    pub fn new(k: u32) -> Result<Self> {
        Ok(Self {
            k,
            node_schema: DynTypeTable::new(),
            edge_schema: DynTypeTable::new(),
            node_attrs: DynAttributeStore::new(k),
            edge_attrs: DynAttributeStore::new(k),
            relations: DynMultiEdge::new(k, 1)?,
            nodes: Elements::default(),
            edges: Elements::default(),
            endpoints: Vec::new(),
        })
    }

    /// Replays `bundle` in file order: types, then nodes, then edges.
    pub fn from_bundle(bundle: &InputBundle, k: u32) -> Result<Self> {
        let steps: Vec<ReplayStep> = (0..bundle.nodes.len())
            .map(ReplayStep::Node)
            .chain((0..bundle.edges.len()).map(ReplayStep::Edge))
            .collect();
        Self::from_bundle_in_order(bundle, &steps, k)
    }

    /// Declares every type of `bundle`, then inserts its records in `steps`
    /// order. An edge must come after both of its endpoints.
    pub fn from_bundle_in_order(bundle: &InputBundle, steps: &[ReplayStep], k: u32) -> Result<Self> {
        bundle.validate()?;
        let mut g = Self::new(k)?;
        for t in &bundle.types {
            g.add_type(t.kind, &t.label)?;
            for a in &t.attributes {
                g.add_attribute(t.kind, &t.label, &a.name, a.dense)?;
            }
        }
        for &step in steps {
            match step {
                ReplayStep::Node(i) => {
                    let n = &bundle.nodes[i];
                    g.add_node_ext(&n.ext_id, &n.label, &n.attrs)?;
                }
                ReplayStep::Edge(i) => {
                    let e = &bundle.edges[i];
                    let end = |ext: &str| {
                        g.id_of_ext(Kind::Node, ext).ok_or_else(|| {
                            Error::InvalidInput(format!("edge {} replayed before node {ext}", e.ext_id))
                        })
                    };
                    let (u, v) = (end(&e.source)?, end(&e.target)?);
                    g.add_edge_ext(&e.ext_id, &e.label, u, v, &e.attrs)?;
                }
            }
        }
        Ok(g)
    }

    fn schema(&self, kind: Kind) -> &DynTypeTable {
        match kind {
            Kind::Node => &self.node_schema,
            Kind::Edge => &self.edge_schema,
        }
    }

    fn parts_mut(&mut self, kind: Kind) -> (&mut DynTypeTable, &mut DynAttributeStore, &mut Elements) {
        match kind {
            Kind::Node => (&mut self.node_schema, &mut self.node_attrs, &mut self.nodes),
            Kind::Edge => (&mut self.edge_schema, &mut self.edge_attrs, &mut self.edges),
        }
    }

    fn elements(&self, kind: Kind) -> &Elements {
        match kind {
            Kind::Node => &self.nodes,
            Kind::Edge => &self.edges,
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn attributes(&self, kind: Kind) -> &DynAttributeStore {
        match kind {
            Kind::Node => &self.node_attrs,
            Kind::Edge => &self.edge_attrs,
        }
    }

    pub fn relations(&self) -> &DynMultiEdge {
        &self.relations
    }

    /// Highest id handed out so far, removed ones included.
    pub fn max_id(&self, kind: Kind) -> u64 {
        self.elements(kind).live.len() as u64
    }

    pub fn is_live(&self, kind: Kind, id: u64) -> bool {
        self.elements(kind).is_live(id)
    }

    /// External id of `id`: the one given at insertion, or the id itself.
    pub fn ext_of(&self, kind: Kind, id: u64) -> Option<String> {
        let els = self.elements(kind);
        let slot = els.ext.get((id as usize).checked_sub(1)?)?;
        Some(slot.clone().unwrap_or_else(|| id.to_string()))
    }

    pub fn id_of_ext(&self, kind: Kind, ext: &str) -> Option<u64> {
        let els = self.elements(kind);
        if let Some(&id) = els.by_ext.get(ext) {
            return Some(id);
        }
        let id: u64 = ext.parse().ok()?;
        let slot = els.ext.get((id as usize).checked_sub(1)?)?;
        slot.is_none().then_some(id)
    }

    pub fn add_type(&mut self, kind: Kind, label: &str) -> Result<()> {
        self.parts_mut(kind).0.add_type(label).map(|_| ())
    }

    pub fn add_node_type(&mut self, label: &str) -> Result<()> {
        self.add_type(Kind::Node, label)
    }

    pub fn add_edge_type(&mut self, label: &str) -> Result<()> {
        self.add_type(Kind::Edge, label)
    }

    /// Declares `name` on `label`. Existing elements start without a value.
    pub fn add_attribute(&mut self, kind: Kind, label: &str, name: &str, dense: bool) -> Result<()> {
        self.parts_mut(kind).0.add_attribute(label, name, dense).map(|_| ())
    }

    fn check_attrs(&self, kind: Kind, label: &str, attrs: &[(String, String)]) -> Result<()> {
        let schema = self.schema(kind);
        let sym = schema.symbol(label)?;
        for (i, (a, v)) in attrs.iter().enumerate() {
            if schema.attribute_of_symbol(sym, a).is_none() {
                return Err(Error::InvalidInput(format!("({a}, {v}): {a} is not an attribute of {label}")));
            }
            if attrs[..i].iter().any(|(b, _)| b == a) {
                return Err(Error::InvalidInput(format!("attribute {a} given twice")));
            }
        }
        Ok(())
    }

    fn insert(&mut self, kind: Kind, ext: Option<&str>, label: &str, attrs: &[(String, String)]) -> Result<u64> {
        self.check_attrs(kind, label, attrs)?;
        if let Some(e) = ext {
            if self.elements(kind).by_ext.contains_key(e) {
                return Err(Error::AlreadyExists(format!("{kind} {e}")));
            }
        }
        let (schema, store, els) = self.parts_mut(kind);
        let id = schema.register_element(label)?;
        els.push(ext)?;
        for (a, v) in attrs {
            store.set(schema, id, a, v)?;
        }
        Ok(id)
    }

    pub fn add_node(&mut self, label: &str, attrs: &[(String, String)]) -> Result<u64> {
        self.add_node_inner(None, label, attrs)
    }

    pub fn add_node_ext(&mut self, ext: &str, label: &str, attrs: &[(String, String)]) -> Result<u64> {
        self.add_node_inner(Some(ext), label, attrs)
    }

    fn add_node_inner(&mut self, ext: Option<&str>, label: &str, attrs: &[(String, String)]) -> Result<u64> {
        let id = self.insert(Kind::Node, ext, label, attrs)?;
        self.relations.ensure_nodes(id);
        Ok(id)
    }

    pub fn add_edge(&mut self, label: &str, u: u64, v: u64, attrs: &[(String, String)]) -> Result<u64> {
        self.add_edge_inner(None, label, u, v, attrs)
    }

    pub fn add_edge_ext(&mut self, ext: &str, label: &str, u: u64, v: u64, attrs: &[(String, String)]) -> Result<u64> {
        self.add_edge_inner(Some(ext), label, u, v, attrs)
    }

    fn add_edge_inner(
        &mut self,
        ext: Option<&str>,
        label: &str,
        u: u64,
        v: u64,
        attrs: &[(String, String)],
    ) -> Result<u64> {
        self.nodes.check(Kind::Node, u)?;
        self.nodes.check(Kind::Node, v)?;
        let id = self.insert(Kind::Edge, ext, label, attrs)?;
        self.relations.add_edge(id, u, v)?;
        self.endpoints.push((u, v));
        Ok(id)
    }

    /// Overwrites (or sets) one attribute value of a live element.
    pub fn set_attribute(&mut self, kind: Kind, id: u64, att: &str, value: &str) -> Result<()> {
        self.elements(kind).check(kind, id)?;
        let (schema, store, _) = self.parts_mut(kind);
        store.set(schema, id, att, value)
    }

    pub fn remove_edge(&mut self, id: u64) -> Result<()> {
        self.edges.check(Kind::Edge, id)?;
        let (u, v) = self.endpoints[id as usize - 1];
        self.relations.remove_edge(id, u, v)?;
        self.edge_attrs.clear_all(&self.edge_schema, id)?;
        self.edges.live[id as usize - 1] = false;
        Ok(())
    }

    /// Tombstones a node. Its incident edges must already be gone.
    pub fn remove_node(&mut self, id: u64) -> Result<()> {
        self.nodes.check(Kind::Node, id)?;
        let n = self.relations.base().n();
        let mut incident = false;
        self.relations.for_each_neighbor(id, 1, n, |_, _| incident = true)?;
        self.relations.for_each_reverse(id, 1, n, |_, _| incident = true)?;
        if incident {
            return Err(Error::InvalidInput(format!("node {id} still has incident edges")));
        }
        self.node_attrs.clear_all(&self.node_schema, id)?;
        self.nodes.live[id as usize - 1] = false;
        Ok(())
    }

    /// Origin and target of a live edge.
    pub fn endpoints(&self, id: u64) -> Result<(u64, u64)> {
        self.edges.check(Kind::Edge, id)?;
        Ok(self.endpoints[id as usize - 1])
    }

    /// The live contents as an input bundle. Types without live elements
    /// are left out, since a static store cannot hold empty types.
    pub fn export_bundle(&self) -> Result<InputBundle> {
        let mut bundle = InputBundle::default();
        for kind in Kind::ALL {
            let schema = self.schema(kind);
            let els = self.elements(kind);
            let mut used = vec![false; schema.labels_by_symbol().len()];
            for id in 1..=els.live.len() as u64 {
                if els.is_live(id) {
                    used[schema.type_symbol_of(id)? as usize] = true;
                }
            }
            for label in schema.labels() {
                let sym = schema.symbol(&label)?;
                if !used[sym as usize] {
                    continue;
                }
                let attributes = schema
                    .attributes_of_symbol(sym)
                    .iter()
                    .zip(schema.dense_flags_of_symbol(sym))
                    .map(|(name, &dense)| AttributeDecl {
                        name: name.clone(),
                        dense,
                    })
                    .collect();
                bundle.types.push(TypeDecl {
                    kind,
                    label,
                    attributes,
                });
            }
        }
        let attrs_of = |kind: Kind, id: u64| -> Result<Vec<(String, String)>> {
            let schema = self.schema(kind);
            let sym = schema.type_symbol_of(id)?;
            let mut out = Vec::new();
            for a in schema.attributes_of_symbol(sym) {
                if let AttrValue::Value(v) = self.get_attribute(kind, id, a)? {
                    out.push((a.clone(), v));
                }
            }
            Ok(out)
        };
        for id in 1..=self.max_id(Kind::Node) {
            if self.nodes.is_live(id) {
                bundle.nodes.push(NodeRecord {
                    ext_id: self.ext_of(Kind::Node, id).expect("allocated"),
                    label: self.node_schema.type_of(id)?.to_owned(),
                    attrs: attrs_of(Kind::Node, id)?,
                });
            }
        }
        for id in 1..=self.max_id(Kind::Edge) {
            if self.edges.is_live(id) {
                let (u, v) = self.endpoints[id as usize - 1];
                bundle.edges.push(EdgeRecord {
                    ext_id: self.ext_of(Kind::Edge, id).expect("allocated"),
                    label: self.edge_schema.type_of(id)?.to_owned(),
                    source: self.ext_of(Kind::Node, u).expect("allocated"),
                    target: self.ext_of(Kind::Node, v).expect("allocated"),
                    attrs: attrs_of(Kind::Edge, id)?,
                });
            }
        }
        Ok(bundle)
    }

    /// Builds the equivalent static store (ids are reassigned).
    pub fn freeze(&self) -> Result<AttK2Graph> {
        AttK2Graph::build(&self.export_bundle()?, self.k)
    }

    pub fn heap_bytes(&self) -> usize {
        self.node_schema.heap_bytes()
            + self.edge_schema.heap_bytes()
            + self.node_attrs.heap_bytes()
            + self.edge_attrs.heap_bytes()
            + self.relations.heap_bytes()
            + self.endpoints.len() * 16
    }
}

impl GraphQueries for DynAttK2Graph {
    fn get_types(&self, kind: Kind) -> Vec<String> {
        self.schema(kind).labels()
    }

    fn scan(&self, kind: Kind, label: &str) -> Result<Vec<u64>> {
        let mut ids = self.schema(kind).ids_of(label)?;
        let els = self.elements(kind);
        ids.retain(|&id| els.is_live(id));
        Ok(ids)
    }

    fn get_type(&self, kind: Kind, id: u64) -> Result<&str> {
        self.elements(kind).check(kind, id)?;
        self.schema(kind).type_of(id)
    }

    fn get_attribute(&self, kind: Kind, id: u64, att: &str) -> Result<AttrValue> {
        self.elements(kind).check(kind, id)?;
        let store = match kind {
            Kind::Node => &self.node_attrs,
            Kind::Edge => &self.edge_attrs,
        };
        store.get(self.schema(kind), id, att)
    }

    fn select(&self, kind: Kind, label: &str, att: &str, value: &str) -> Result<Selection> {
        let store = match kind {
            Kind::Node => &self.node_attrs,
            Kind::Edge => &self.edge_attrs,
        };
        store.select(self.schema(kind), label, att, value)
    }

    fn neighbors(&self, node_label: &str, id: u64) -> Result<Vec<u64>> {
        let sym = self.node_schema.symbol(node_label)?;
        self.nodes.check(Kind::Node, id)?;
        let mut out = Vec::new();
        self.relations
            .for_each_neighbor(id, 1, self.relations.base().n(), |v, _| {
                if self.node_schema.type_symbol_of(v).ok() == Some(sym) {
                    out.push(v);
                }
            })?;
        Ok(out)
    }

    fn related(&self, edge_label: &str, id: u64) -> Result<Vec<u64>> {
        let sym = self.edge_schema.symbol(edge_label)?;
        self.nodes.check(Kind::Node, id)?;
        let mut out = Vec::new();
        self.relations
            .for_each_neighbor(id, 1, self.relations.base().n(), |v, edges| {
                if edges
                    .iter()
                    .any(|&e| self.edge_schema.type_symbol_of(e).ok() == Some(sym))
                {
                    out.push(v);
                }
            })?;
        Ok(out)
    }

    fn edges_between(&self, u: u64, v: u64) -> Result<Vec<u64>> {
        self.nodes.check(Kind::Node, u)?;
        self.nodes.check(Kind::Node, v)?;
        self.relations.edges_between(u, v)
    }
}
