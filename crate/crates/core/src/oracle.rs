//! Reference semantics by brute force, for tests only. Everything lives in
//! plain vectors and every query is a linear scan; nothing here touches the
//! succinct structures.

use crate::error::{Error, Result};
use crate::graph::{AttrValue, GraphQueries, Kind, Selection};
use crate::io::InputBundle;

#[derive(Clone, Debug)]
struct Type {
    kind: Kind,
    label: String,
    attributes: Vec<String>,
}

#[derive(Clone, Debug)]
struct Element {
    ext: Option<String>,
    label: String,
    attrs: Vec<(String, String)>,
    ends: (u64, u64),
    live: bool,
}

#[derive(Clone, Debug, Default)]
pub struct NaiveStore {
    types: Vec<Type>,
    nodes: Vec<Element>,
    edges: Vec<Element>,
}

impl NaiveStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Ids numbered by (label, external id) order, as in the static store.
    pub fn from_bundle_sorted(bundle: &InputBundle) -> Self {
        let mut s = Self::new();
        for t in &bundle.types {
            s.types.push(Type {
                kind: t.kind,
                label: t.label.clone(),
                attributes: t.attributes.iter().map(|a| a.name.clone()).collect(),
            });
        }
        let mut nodes = bundle.nodes.clone();
        nodes.sort_by(|a, b| (a.label.as_bytes(), a.ext_id.as_bytes()).cmp(&(b.label.as_bytes(), b.ext_id.as_bytes())));
        let mut edges = bundle.edges.clone();
        edges.sort_by(|a, b| (a.label.as_bytes(), a.ext_id.as_bytes()).cmp(&(b.label.as_bytes(), b.ext_id.as_bytes())));
        let node_id = |ext: &str| nodes.iter().position(|n| n.ext_id == ext).unwrap() as u64 + 1;
        for n in &nodes {
            s.nodes.push(Element {
                ext: Some(n.ext_id.clone()),
                label: n.label.clone(),
                attrs: n.attrs.clone(),
                ends: (0, 0),
                live: true,
            });
        }
        for e in &edges {
            s.edges.push(Element {
                ext: Some(e.ext_id.clone()),
                label: e.label.clone(),
                attrs: e.attrs.clone(),
                ends: (node_id(&e.source), node_id(&e.target)),
                live: true,
            });
        }
        s
    }

    fn list(&self, kind: Kind) -> &Vec<Element> {
        match kind {
            Kind::Node => &self.nodes,
            Kind::Edge => &self.edges,
        }
    }

    fn list_mut(&mut self, kind: Kind) -> &mut Vec<Element> {
        match kind {
            Kind::Node => &mut self.nodes,
            Kind::Edge => &mut self.edges,
        }
    }

    fn find_type(&self, kind: Kind, label: &str) -> Result<&Type> {
        self.types
            .iter()
            .find(|t| t.kind == kind && t.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    fn live(&self, kind: Kind, id: u64) -> Result<&Element> {
        match self.list(kind).get((id as usize).wrapping_sub(1)) {
            Some(e) if e.live => Ok(e),
            _ => Err(Error::NotFound(format!("{kind} {id}"))),
        }
    }

    pub fn add_type(&mut self, kind: Kind, label: &str) -> Result<()> {
        if self.find_type(kind, label).is_ok() {
            return Err(Error::AlreadyExists(label.to_owned()));
        }
        self.types.push(Type {
            kind,
            label: label.to_owned(),
            attributes: Vec::new(),
        });
        Ok(())
    }

    pub fn add_attribute(&mut self, kind: Kind, label: &str, name: &str) -> Result<()> {
        self.find_type(kind, label)?;
        let t = self
            .types
            .iter_mut()
            .find(|t| t.kind == kind && t.label == label)
            .unwrap();
        if t.attributes.iter().any(|a| a == name) {
            return Err(Error::AlreadyExists(name.to_owned()));
        }
        t.attributes.push(name.to_owned());
        Ok(())
    }

    fn check_attrs(&self, kind: Kind, label: &str, attrs: &[(String, String)]) -> Result<()> {
        let t = self.find_type(kind, label)?;
        for (a, _) in attrs {
            if !t.attributes.contains(a) {
                return Err(Error::InvalidInput(a.clone()));
            }
        }
        Ok(())
    }

    pub fn add_node(&mut self, label: &str, attrs: &[(String, String)]) -> Result<u64> {
        self.check_attrs(Kind::Node, label, attrs)?;
        self.nodes.push(Element {
            ext: None,
            label: label.to_owned(),
            attrs: attrs.to_vec(),
            ends: (0, 0),
            live: true,
        });
        Ok(self.nodes.len() as u64)
    }

    pub fn add_edge(&mut self, label: &str, u: u64, v: u64, attrs: &[(String, String)]) -> Result<u64> {
        self.live(Kind::Node, u)?;
        self.live(Kind::Node, v)?;
        self.check_attrs(Kind::Edge, label, attrs)?;
        self.edges.push(Element {
            ext: None,
            label: label.to_owned(),
            attrs: attrs.to_vec(),
            ends: (u, v),
            live: true,
        });
        Ok(self.edges.len() as u64)
    }

    pub fn add_node_ext(&mut self, ext: &str, label: &str, attrs: &[(String, String)]) -> Result<u64> {
        let id = self.add_node(label, attrs)?;
        self.nodes[id as usize - 1].ext = Some(ext.to_owned());
        Ok(id)
    }

    pub fn add_edge_ext(&mut self, ext: &str, label: &str, u: u64, v: u64, attrs: &[(String, String)]) -> Result<u64> {
        let id = self.add_edge(label, u, v, attrs)?;
        self.edges[id as usize - 1].ext = Some(ext.to_owned());
        Ok(id)
    }

    pub fn set_attribute(&mut self, kind: Kind, id: u64, att: &str, value: &str) -> Result<()> {
        let label = self.live(kind, id)?.label.clone();
        self.check_attrs(kind, &label, &[(att.to_owned(), value.to_owned())])?;
        let e = &mut self.list_mut(kind)[id as usize - 1];
        e.attrs.retain(|(a, _)| a != att);
        e.attrs.push((att.to_owned(), value.to_owned()));
        Ok(())
    }

    pub fn remove_edge(&mut self, id: u64) -> Result<()> {
        self.live(Kind::Edge, id)?;
        let e = &mut self.edges[id as usize - 1];
        e.live = false;
        e.attrs.clear();
        Ok(())
    }

    pub fn remove_node(&mut self, id: u64) -> Result<()> {
        self.live(Kind::Node, id)?;
        if self.edges.iter().any(|e| e.live && (e.ends.0 == id || e.ends.1 == id)) {
            return Err(Error::InvalidInput(format!("node {id} has edges")));
        }
        let n = &mut self.nodes[id as usize - 1];
        n.live = false;
        n.attrs.clear();
        Ok(())
    }

    /// Live edge ids, for picking mutation targets.
    pub fn live_ids(&self, kind: Kind) -> Vec<u64> {
        (1..=self.list(kind).len() as u64)
            .filter(|&i| self.list(kind)[i as usize - 1].live)
            .collect()
    }

    /// External id of a live element: the bundle's, or the id itself for
    /// elements added one by one.
    pub fn ext_of(&self, kind: Kind, id: u64) -> Option<String> {
        let e = self.live(kind, id).ok()?;
        Some(e.ext.clone().unwrap_or_else(|| id.to_string()))
    }

    pub fn id_of_ext(&self, kind: Kind, ext: &str) -> Option<u64> {
        let list = self.list(kind);
        (1..=list.len() as u64).find(|&id| {
            let e = &list[id as usize - 1];
            e.live && e.ext.clone().unwrap_or_else(|| id.to_string()) == ext
        })
    }

    pub fn endpoints(&self, id: u64) -> Option<(u64, u64)> {
        self.live(Kind::Edge, id).ok().map(|e| e.ends)
    }
}

impl GraphQueries for NaiveStore {
    fn get_types(&self, kind: Kind) -> Vec<String> {
        let mut v: Vec<String> = self
            .types
            .iter()
            .filter(|t| t.kind == kind)
            .map(|t| t.label.clone())
            .collect();
        v.sort();
        v
    }

    fn scan(&self, kind: Kind, label: &str) -> Result<Vec<u64>> {
        self.find_type(kind, label)?;
        Ok(self
            .list(kind)
            .iter()
            .enumerate()
            .filter(|(_, e)| e.live && e.label == label)
            .map(|(i, _)| i as u64 + 1)
            .collect())
    }

    fn get_type(&self, kind: Kind, id: u64) -> Result<&str> {
        Ok(&self.live(kind, id)?.label)
    }

    fn get_attribute(&self, kind: Kind, id: u64, att: &str) -> Result<AttrValue> {
        let e = self.live(kind, id)?;
        if !self.find_type(kind, &e.label)?.attributes.iter().any(|a| a == att) {
            return Ok(AttrValue::Undefined);
        }
        Ok(match e.attrs.iter().find(|(a, _)| a == att) {
            Some((_, v)) => AttrValue::Value(v.clone()),
            None => AttrValue::Absent,
        })
    }

    fn select(&self, kind: Kind, label: &str, att: &str, value: &str) -> Result<Selection> {
        if !self.find_type(kind, label)?.attributes.iter().any(|a| a == att) {
            return Ok(Selection::Undefined);
        }
        Ok(Selection::Ids(
            self.list(kind)
                .iter()
                .enumerate()
                .filter(|(_, e)| e.live && e.label == label && e.attrs.iter().any(|(a, v)| a == att && v == value))
                .map(|(i, _)| i as u64 + 1)
                .collect(),
        ))
    }

    fn neighbors(&self, node_label: &str, id: u64) -> Result<Vec<u64>> {
        self.find_type(Kind::Node, node_label)?;
        self.live(Kind::Node, id)?;
        let mut out: Vec<u64> = self
            .edges
            .iter()
            .filter(|e| e.live && e.ends.0 == id && self.nodes[e.ends.1 as usize - 1].label == node_label)
            .map(|e| e.ends.1)
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn related(&self, edge_label: &str, id: u64) -> Result<Vec<u64>> {
        self.find_type(Kind::Edge, edge_label)?;
        self.live(Kind::Node, id)?;
        let mut out: Vec<u64> = self
            .edges
            .iter()
            .filter(|e| e.live && e.ends.0 == id && e.label == edge_label)
            .map(|e| e.ends.1)
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn edges_between(&self, u: u64, v: u64) -> Result<Vec<u64>> {
        self.live(Kind::Node, u)?;
        self.live(Kind::Node, v)?;
        Ok(self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.live && e.ends == (u, v))
            .map(|(i, _)| i as u64 + 1)
            .collect())
    }
}
