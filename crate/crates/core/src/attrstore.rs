//! Data layer: attribute values of nodes or edges.
//!
//! A sparse attribute is a list of values indexed by position within its
//! label, plus a permutation of those positions sorted by value. Dense
//! attributes are columns of a boolean matrix whose rows are element ids and
//! whose columns are the distinct values; row `i` has a 1 in the column of
//! the value element `i` takes.
//!
//! The static store keeps a single matrix per kind with each attribute's
//! columns sorted by value. The dynamic store keeps one matrix per attribute
//! and appends a column whenever a new value shows up.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::bits::IntVector;
use crate::error::{out_of_bounds, Error, Result};
use crate::graph::{AttrValue, Selection};
use crate::k2::{DynK2Tree, K2Tree};
use crate::schema::{DynTypeTable, TypeTable};

/// Values of one sparse attribute over the elements of one label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseAttribute {
    values: Vec<Option<String>>,
    /// 0-based positions ordered by (value, position); absent values first.
    lex: IntVector,
}

impl SparseAttribute {
    pub fn new(values: Vec<Option<String>>) -> Self {
        let mut order: Vec<u64> = (0..values.len() as u64).collect();
        order.sort_by(|&a, &b| values[a as usize].cmp(&values[b as usize]).then(a.cmp(&b)));
        Self {
            lex: IntVector::from_slice(&order),
            values,
        }
    }

    pub fn from_parts(values: Vec<Option<String>>, lex: Vec<u64>) -> Result<Self> {
        if lex.len() != values.len() {
            return Err(Error::Corrupt("lexicographic index length differs from values".into()));
        }
        let mut seen = vec![false; values.len()];
        for &p in &lex {
            match seen.get_mut(p as usize) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::Corrupt("lexicographic index is not a permutation".into())),
            }
        }
        for w in lex.windows(2) {
            let (a, b) = (&values[w[0] as usize], &values[w[1] as usize]);
            if a > b || (a == b && w[0] > w[1]) {
                return Err(Error::Corrupt("lexicographic index out of order".into()));
            }
        }
        Ok(Self {
            values,
            lex: IntVector::from_slice(&lex),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<String>] {
        &self.values
    }

    pub fn lex_index(&self) -> Vec<u64> {
        self.lex.to_vec()
    }

    /// Value of element `id` of a label whose lowest id is `limit`.
    pub fn get(&self, id: u64, limit: u64) -> Result<Option<&str>> {
        let pos = id
            .checked_sub(limit)
            .filter(|&p| (p as usize) < self.values.len())
            .ok_or_else(|| out_of_bounds(id, limit + self.values.len() as u64 - 1))?;
        Ok(self.values[pos as usize].as_deref())
    }

    fn lex_value(&self, i: usize) -> Option<&str> {
        self.values[self.lex.get(i) as usize].as_deref()
    }

    /// Ids whose value equals `value`, ascending.
    pub fn select(&self, value: &str, limit: u64) -> Vec<u64> {
        let n = self.values.len();
        let key = Some(value);
        let from = partition_point(n, |i| self.lex_value(i) < key);
        let to = partition_point(n, |i| self.lex_value(i) <= key);
        (from..to).map(|i| self.lex.get(i) + limit).collect()
    }

    pub fn heap_bytes(&self) -> usize {
        self.values
            .iter()
            .map(|v| 24 + v.as_ref().map_or(0, |s| s.len()))
            .sum::<usize>()
            + self.lex.heap_bytes()
    }
}

fn partition_point(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Every dense attribute of one kind in a single matrix. Attribute `a` owns
/// columns `limits[a-1]+1 ..= limits[a]`, one per sorted distinct value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    matrix: K2Tree,
    rows: u64,
    names: Vec<String>,
    limits: Vec<u64>,
    values: Vec<Vec<String>>,
}

impl DenseMatrix {
    /// `attrs` holds, per attribute name, the `(id, value)` pairs set on it.
    pub fn build(rows: u64, mut attrs: Vec<(String, Vec<(u64, String)>)>, k: u32) -> Result<Self> {
        attrs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut names = Vec::with_capacity(attrs.len());
        let mut limits = Vec::with_capacity(attrs.len());
        let mut values = Vec::with_capacity(attrs.len());
        let mut cells = Vec::new();
        let mut offset = 0u64;
        for (name, pairs) in attrs {
            let distinct: BTreeSet<&str> = pairs.iter().map(|(_, v)| v.as_str()).collect();
            let cols: Vec<String> = distinct.into_iter().map(str::to_owned).collect();
            for (id, v) in &pairs {
                let j = cols.binary_search(v).expect("value collected above") as u64;
                cells.push((*id, offset + j + 1));
            }
            offset += cols.len() as u64;
            names.push(name);
            limits.push(offset);
            values.push(cols);
        }
        let matrix = K2Tree::build(rows.max(offset), &cells, k)?;
        Self::from_parts(matrix, rows, names, limits, values)
    }

    pub fn from_parts(
        matrix: K2Tree,
        rows: u64,
        names: Vec<String>,
        limits: Vec<u64>,
        values: Vec<Vec<String>>,
    ) -> Result<Self> {
        if names.len() != limits.len() || names.len() != values.len() {
            return Err(Error::Corrupt("dense attribute arrays differ in length".into()));
        }
        let mut prev = 0;
        for ((name, &lim), vals) in names.iter().zip(&limits).zip(&values) {
            if lim < prev || lim - prev != vals.len() as u64 {
                return Err(Error::Corrupt(format!("column block of {name} is inconsistent")));
            }
            if vals.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Corrupt(format!("columns of {name} are not sorted")));
            }
            prev = lim;
        }
        if names.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Corrupt("dense attribute names are not sorted".into()));
        }
        if matrix.n_logical() != rows.max(prev) {
            return Err(Error::Corrupt("dense matrix side does not match rows and columns".into()));
        }
        Ok(Self {
            matrix,
            rows,
            names,
            limits,
            values,
        })
    }

    pub fn matrix(&self) -> &K2Tree {
        &self.matrix
    }

    pub fn rows(&self) -> u64 {
        self.rows
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column_limits(&self) -> &[u64] {
        &self.limits
    }

    pub fn column_values(&self) -> &[Vec<String>] {
        &self.values
    }

    pub fn attr_index(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    /// First column of attribute `a`.
    fn first_col(&self, a: usize) -> u64 {
        if a == 0 {
            1
        } else {
            self.limits[a - 1] + 1
        }
    }

    /// Value of row `id` within attribute `a`'s column block.
    pub fn get(&self, id: u64, a: usize) -> Result<Option<&str>> {
        if id == 0 || id > self.rows {
            return Err(out_of_bounds(id, self.rows));
        }
        let (first, last) = (self.first_col(a), self.limits[a]);
        if first > last {
            return Ok(None);
        }
        let mut col = None;
        self.matrix.for_each_in_range(id, id, first, last, |_, c, _| col = Some(c))?;
        Ok(col.map(|c| self.values[a][(c - first) as usize].as_str()))
    }

    /// Rows in `lo..=hi` whose attribute `a` equals `value`, ascending.
    pub fn select(&self, a: usize, value: &str, lo: u64, hi: u64) -> Result<Vec<u64>> {
        let Ok(j) = self.values[a].binary_search_by(|v| v.as_str().cmp(value)) else {
            return Ok(Vec::new());
        };
        let col = self.first_col(a) + j as u64;
        let mut out = Vec::new();
        self.matrix.for_each_in_range(lo, hi, col, col, |r, _, _| out.push(r))?;
        Ok(out)
    }

    pub fn heap_bytes(&self) -> usize {
        self.matrix.heap_bytes()
            + self.limits.len() * 8
            + self
                .values
                .iter()
                .flatten()
                .chain(&self.names)
                .map(|v| v.len() + 24)
                .sum::<usize>()
    }
}

/// Static attribute storage of one kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeStore {
    /// `sparse[t][a]` for label index `t` and 0-based attribute position
    /// `a`; `None` where the attribute is dense.
    sparse: Vec<Vec<Option<SparseAttribute>>>,
    dense: DenseMatrix,
}

impl AttributeStore {
    /// `rows[id - 1]` lists the `(attribute, value)` pairs of element `id`.
    pub fn build(schema: &TypeTable, rows: &[Vec<(String, String)>], k: u32) -> Result<Self> {
        if rows.len() as u64 != schema.max_id() {
            return Err(Error::InvalidInput(format!(
                "{} attribute rows for {} elements",
                rows.len(),
                schema.max_id()
            )));
        }
        let mut sparse_vals: Vec<Vec<Option<Vec<Option<String>>>>> = Vec::new();
        for t in 0..schema.labels().len() {
            let size = schema.range_at(t).count();
            let flags = schema.dense_flags_at(t);
            sparse_vals.push(
                (0..flags.len())
                    .map(|a| (!flags.bit(a)).then(|| vec![None; size]))
                    .collect(),
            );
        }
        let mut dense: BTreeMap<String, Vec<(u64, String)>> = BTreeMap::new();
        for (name, d) in schema.registry() {
            if d {
                dense.insert(name.to_owned(), Vec::new());
            }
        }
        for (i, row) in rows.iter().enumerate() {
            let id = i as u64 + 1;
            let t = schema.type_index_of(id)?;
            let lower = *schema.range_at(t).start();
            let mut seen = Vec::with_capacity(row.len());
            for (name, value) in row {
                let info = schema.attribute_at(t, name).ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "({id}, {name}, {value}): {name} is not an attribute of {}",
                        schema.labels()[t]
                    ))
                })?;
                if seen.contains(&info.ordinal) {
                    return Err(Error::InvalidInput(format!("({id}, {name}, {value}): attribute set twice")));
                }
                seen.push(info.ordinal);
                if info.dense {
                    dense.get_mut(name).expect("registered").push((id, value.clone()));
                } else {
                    let list = sparse_vals[t][info.ordinal - 1].as_mut().expect("sparse slot");
                    list[(id - lower) as usize] = Some(value.clone());
                }
            }
        }
        let sparse = sparse_vals
            .into_iter()
            .map(|per| per.into_iter().map(|v| v.map(SparseAttribute::new)).collect())
            .collect();
        let dense = DenseMatrix::build(schema.max_id(), dense.into_iter().collect(), k)?;
        Ok(Self { sparse, dense })
    }

    pub fn from_parts(
        schema: &TypeTable,
        sparse: Vec<Vec<Option<SparseAttribute>>>,
        dense: DenseMatrix,
    ) -> Result<Self> {
        if sparse.len() != schema.labels().len() || dense.rows() != schema.max_id() {
            return Err(Error::Corrupt("attribute store does not match its schema".into()));
        }
        for (t, per) in sparse.iter().enumerate() {
            let flags = schema.dense_flags_at(t);
            let size = schema.range_at(t).count();
            if per.len() != flags.len() {
                return Err(Error::Corrupt("attribute count differs from schema".into()));
            }
            for (a, s) in per.iter().enumerate() {
                let ok = match s {
                    Some(s) => !flags.bit(a) && s.len() == size,
                    None => flags.bit(a) && dense.attr_index(&schema.attributes_at(t)[a]).is_some(),
                };
                if !ok {
                    return Err(Error::Corrupt(format!(
                        "attribute {} of {} does not match its schema",
                        schema.attributes_at(t)[a],
                        schema.labels()[t]
                    )));
                }
            }
        }
        Ok(Self { sparse, dense })
    }

    pub fn sparse(&self) -> &[Vec<Option<SparseAttribute>>] {
        &self.sparse
    }

    pub fn dense(&self) -> &DenseMatrix {
        &self.dense
    }

    pub fn get(&self, schema: &TypeTable, id: u64, name: &str) -> Result<AttrValue> {
        let t = schema.type_index_of(id)?;
        let Some(info) = schema.attribute_at(t, name) else {
            return Ok(AttrValue::Undefined);
        };
        let v = if info.dense {
            let a = self.dense.attr_index(name).expect("dense attribute present");
            self.dense.get(id, a)?
        } else {
            let s = self.sparse[t][info.ordinal - 1].as_ref().expect("sparse attribute present");
            s.get(id, *schema.range_at(t).start())?
        };
        Ok(AttrValue::from(v))
    }

    pub fn select(&self, schema: &TypeTable, label: &str, name: &str, value: &str) -> Result<Selection> {
        let t = schema
            .label_index(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))?;
        let Some(info) = schema.attribute_at(t, name) else {
            return Ok(Selection::Undefined);
        };
        let range = schema.range_at(t);
        let ids = if info.dense {
            let a = self.dense.attr_index(name).expect("dense attribute present");
            self.dense.select(a, value, *range.start(), *range.end())?
        } else {
            let s = self.sparse[t][info.ordinal - 1].as_ref().expect("sparse attribute present");
            s.select(value, *range.start())
        };
        Ok(Selection::Ids(ids))
    }

    pub fn heap_bytes(&self) -> usize {
        self.sparse
            .iter()
            .flatten()
            .flatten()
            .map(|s| s.heap_bytes())
            .sum::<usize>()
            + self.dense.heap_bytes()
    }
}

/// Sparse attribute values of one label, indexed by rank within the label.
#[derive(Clone, Debug, Default)]
pub struct DynSparseAttribute {
    values: Vec<Option<String>>,
    index: BTreeMap<String, BTreeSet<u64>>,
}

impl DynSparseAttribute {
    /// Records `value` for element `id`, which is the `rank`-th of its label.
    pub fn set(&mut self, rank: usize, id: u64, value: &str) {
        self.clear(rank, id);
        if self.values.len() < rank {
            self.values.resize(rank, None);
        }
        self.values[rank - 1] = Some(value.to_owned());
        self.index.entry(value.to_owned()).or_default().insert(id);
    }

    pub fn clear(&mut self, rank: usize, id: u64) {
        let Some(old) = self.values.get_mut(rank - 1).and_then(Option::take) else {
            return;
        };
        if let Some(ids) = self.index.get_mut(&old) {
            ids.remove(&id);
            if ids.is_empty() {
                self.index.remove(&old);
            }
        }
    }

    pub fn get(&self, rank: usize) -> Option<&str> {
        self.values.get(rank - 1)?.as_deref()
    }

    pub fn select(&self, value: &str) -> Vec<u64> {
        self.index
            .get(value)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    pub fn heap_bytes(&self) -> usize {
        self.values
            .iter()
            .map(|v| 24 + v.as_ref().map_or(0, |s| s.len()))
            .sum::<usize>()
            + self
                .index
                .iter()
                .map(|(k, v)| k.len() + 48 + v.len() * 16)
                .sum::<usize>()
    }
}

/// One dense attribute: rows are element ids, columns are values in the
/// order they first appeared.
#[derive(Clone, Debug)]
pub struct DynDenseAttribute {
    matrix: DynK2Tree,
    columns: Vec<String>,
    col_of: HashMap<String, u64>,
}

impl DynDenseAttribute {
    pub fn new(k: u32) -> Result<Self> {
        Ok(Self {
            matrix: DynK2Tree::new(k, 1)?,
            columns: Vec::new(),
            col_of: HashMap::new(),
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn matrix(&self) -> &DynK2Tree {
        &self.matrix
    }

    fn row_col(&self, id: u64) -> Option<u64> {
        if id > self.matrix.n() {
            return None;
        }
        let mut col = None;
        let n = self.matrix.n();
        self.matrix
            .for_each_in_range(id, id, 1, n, |_, c, _| col = Some(c))
            .ok()?;
        col
    }

    /// Sets the value of row `id`, replacing any previous one.
    pub fn set(&mut self, id: u64, value: &str) -> Result<()> {
        let col = match self.col_of.get(value) {
            Some(&c) => c,
            None => {
                self.columns.push(value.to_owned());
                let c = self.columns.len() as u64;
                self.col_of.insert(value.to_owned(), c);
                c
            }
        };
        if let Some(old) = self.row_col(id) {
            if old == col {
                return Ok(());
            }
            self.matrix.clear(id, old)?;
        }
        self.matrix.ensure_side(id.max(col));
        self.matrix.set(id, col)?;
        Ok(())
    }

    pub fn clear(&mut self, id: u64) -> Result<()> {
        if let Some(old) = self.row_col(id) {
            self.matrix.clear(id, old)?;
        }
        Ok(())
    }

    pub fn get(&self, id: u64) -> Option<&str> {
        self.row_col(id).map(|c| self.columns[c as usize - 1].as_str())
    }

    /// Every row holding `value`, ascending.
    pub fn select(&self, value: &str) -> Vec<u64> {
        match self.col_of.get(value) {
            Some(&c) => self.matrix.col_neighbors(c).unwrap_or_default(),
            None => Vec::new(),
        }
    }

    pub fn heap_bytes(&self) -> usize {
        self.matrix.heap_bytes() + self.columns.iter().map(|c| 2 * (c.len() + 24) + 8).sum::<usize>()
    }
}

/// Dynamic attribute storage of one kind.
#[derive(Clone, Debug)]
pub struct DynAttributeStore {
    k: u32,
    sparse: HashMap<(u32, String), DynSparseAttribute>,
    dense: BTreeMap<String, DynDenseAttribute>,
}

impl DynAttributeStore {
    pub fn new(k: u32) -> Self {
        Self {
            k,
            sparse: HashMap::new(),
            dense: BTreeMap::new(),
        }
    }

    pub fn dense_attributes(&self) -> &BTreeMap<String, DynDenseAttribute> {
        &self.dense
    }

    /// Checks that `name` is declared for the type of `id`.
    pub fn validate(schema: &DynTypeTable, id: u64, name: &str) -> Result<crate::schema::AttributeInfo> {
        let sym = schema.type_symbol_of(id)?;
        schema.attribute_of_symbol(sym, name).ok_or_else(|| {
            Error::InvalidInput(format!(
                "{name} is not an attribute of {}",
                schema.label_of_symbol(sym)
            ))
        })
    }

    pub fn set(&mut self, schema: &DynTypeTable, id: u64, name: &str, value: &str) -> Result<()> {
        let info = Self::validate(schema, id, name)?;
        if info.dense {
            if !self.dense.contains_key(name) {
                self.dense.insert(name.to_owned(), DynDenseAttribute::new(self.k)?);
            }
            self.dense.get_mut(name).expect("inserted").set(id, value)
        } else {
            let sym = schema.type_symbol_of(id)?;
            let rank = schema.rank_within(id)?;
            self.sparse
                .entry((sym, name.to_owned()))
                .or_default()
                .set(rank, id, value);
            Ok(())
        }
    }

    /// Drops every value of element `id`.
    pub fn clear_all(&mut self, schema: &DynTypeTable, id: u64) -> Result<()> {
        let sym = schema.type_symbol_of(id)?;
        let rank = schema.rank_within(id)?;
        let flags = schema.dense_flags_of_symbol(sym);
        for (name, &d) in schema.attributes_of_symbol(sym).iter().zip(flags) {
            if d {
                if let Some(m) = self.dense.get_mut(name) {
                    m.clear(id)?;
                }
            } else if let Some(s) = self.sparse.get_mut(&(sym, name.clone())) {
                s.clear(rank, id);
            }
        }
        Ok(())
    }

    pub fn get(&self, schema: &DynTypeTable, id: u64, name: &str) -> Result<AttrValue> {
        let sym = schema.type_symbol_of(id)?;
        let Some(info) = schema.attribute_of_symbol(sym, name) else {
            return Ok(AttrValue::Undefined);
        };
        let v = if info.dense {
            self.dense.get(name).and_then(|m| m.get(id))
        } else {
            let rank = schema.rank_within(id)?;
            self.sparse
                .get(&(sym, name.to_owned()))
                .and_then(|s| s.get(rank))
        };
        Ok(AttrValue::from(v))
    }

    pub fn select(&self, schema: &DynTypeTable, label: &str, name: &str, value: &str) -> Result<Selection> {
        let sym = schema.symbol(label)?;
        let Some(info) = schema.attribute_of_symbol(sym, name) else {
            return Ok(Selection::Undefined);
        };
        let ids = if info.dense {
            match self.dense.get(name) {
                Some(m) => {
                    let mut ids = m.select(value);
                    ids.retain(|&id| schema.type_symbol_of(id).ok() == Some(sym));
                    ids
                }
                None => Vec::new(),
            }
        } else {
            self.sparse
                .get(&(sym, name.to_owned()))
                .map(|s| s.select(value))
                .unwrap_or_default()
        };
        Ok(Selection::Ids(ids))
    }

    pub fn heap_bytes(&self) -> usize {
        self.sparse.values().map(|s| s.heap_bytes()).sum::<usize>()
            + self.dense.values().map(|d| d.heap_bytes()).sum::<usize>()
    }
}
