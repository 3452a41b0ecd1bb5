//! Schema layer: element types (labels) per kind, the id range or id
//! sequence each type owns, and each type's attribute list with dense flags.
//!
//! Attribute names are shared across labels: the same name in two labels is
//! one logical attribute and must carry the same dense flag everywhere.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use crate::bits::{BitSequence, DynSequence};
use crate::error::{out_of_bounds, Error, Result};

/// One type as handed to [`TypeTable::build`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeSpec {
    pub label: String,
    pub count: u64,
    /// `(name, dense)` in declaration order.
    pub attributes: Vec<(String, bool)>,
}

/// Where an attribute sits within a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AttributeInfo {
    /// 1-based position in the label's attribute list.
    pub ordinal: usize,
    pub dense: bool,
}

/// Adds `name` to the registry or checks it against the recorded flag.
fn register_flag(registry: &mut BTreeMap<String, bool>, label: &str, name: &str, dense: bool) -> Result<()> {
    match registry.get(name) {
        Some(&d) if d != dense => Err(Error::InvalidInput(format!(
            "attribute {name} declared {} in {label} but {} elsewhere",
            if dense { "dense" } else { "sparse" },
            if d { "dense" } else { "sparse" }
        ))),
        Some(_) => Ok(()),
        None => {
            registry.insert(name.to_owned(), dense);
            Ok(())
        }
    }
}

fn check_attribute_list(label: &str, attrs: &[String]) -> Result<()> {
    for (i, a) in attrs.iter().enumerate() {
        if a.is_empty() {
            return Err(Error::InvalidInput(format!("empty attribute name in {label}")));
        }
        if attrs[..i].contains(a) {
            return Err(Error::AlreadyExists(format!("attribute {a} in {label}")));
        }
    }
    Ok(())
}

/// Static label table. Ids `upper_limits[t-1]+1 ..= upper_limits[t]` belong
/// to `labels[t]`; labels are sorted bytewise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeTable {
    labels: Vec<String>,
    upper_limits: Vec<u64>,
    attributes: Vec<Vec<String>>,
    dense: Vec<BitSequence>,
}

impl TypeTable {
    /// Sorts `types` by label and assigns consecutive id ranges.
    pub fn build(mut types: Vec<TypeSpec>) -> Result<Self> {
        types.sort_by(|a, b| a.label.cmp(&b.label));
        let mut upper = 0u64;
        let mut upper_limits = Vec::with_capacity(types.len());
        let mut labels = Vec::with_capacity(types.len());
        let mut attributes = Vec::with_capacity(types.len());
        let mut dense = Vec::with_capacity(types.len());
        for t in types {
            if t.count == 0 {
                return Err(Error::InvalidInput(format!("type {} has no elements", t.label)));
            }
            upper += t.count;
            upper_limits.push(upper);
            let (names, flags): (Vec<String>, Vec<bool>) = t.attributes.into_iter().unzip();
            labels.push(t.label);
            attributes.push(names);
            dense.push(BitSequence::from_bits(flags));
        }
        Self::from_parts(labels, upper_limits, attributes, dense)
    }

    /// Reassembles a table, checking ordering, limits and flag consistency.
    pub fn from_parts(
        labels: Vec<String>,
        upper_limits: Vec<u64>,
        attributes: Vec<Vec<String>>,
        dense: Vec<BitSequence>,
    ) -> Result<Self> {
        let n = labels.len();
        if upper_limits.len() != n || attributes.len() != n || dense.len() != n {
            return Err(Error::Corrupt("label table arrays differ in length".into()));
        }
        for w in labels.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidInput(format!("duplicate or unsorted label {}", w[1])));
            }
        }
        let mut prev = 0;
        for (l, &u) in labels.iter().zip(&upper_limits) {
            if u <= prev {
                return Err(Error::InvalidInput(format!("type {l} has no elements")));
            }
            prev = u;
        }
        let mut registry = BTreeMap::new();
        for ((label, names), flags) in labels.iter().zip(&attributes).zip(&dense) {
            if flags.len() != names.len() {
                return Err(Error::Corrupt(format!("dense flags of {label} do not match its attributes")));
            }
            check_attribute_list(label, names)?;
            for (i, name) in names.iter().enumerate() {
                register_flag(&mut registry, label, name, flags.bit(i))?;
            }
        }
        Ok(Self {
            labels,
            upper_limits,
            attributes,
            dense,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn upper_limits(&self) -> &[u64] {
        &self.upper_limits
    }

    /// Highest id, which is also the element count.
    pub fn max_id(&self) -> u64 {
        self.upper_limits.last().copied().unwrap_or(0)
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    fn index_of(&self, label: &str) -> Result<usize> {
        self.label_index(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    /// Id range of the label at index `t`.
    pub fn range_at(&self, t: usize) -> RangeInclusive<u64> {
        let lower = if t == 0 { 0 } else { self.upper_limits[t - 1] };
        lower + 1..=self.upper_limits[t]
    }

    pub fn ids_of(&self, label: &str) -> Result<RangeInclusive<u64>> {
        Ok(self.range_at(self.index_of(label)?))
    }

    /// Label index owning `id`, by binary search over the upper limits.
    pub fn type_index_of(&self, id: u64) -> Result<usize> {
        if id == 0 || id > self.max_id() {
            return Err(out_of_bounds(id, self.max_id()));
        }
        Ok(self.upper_limits.partition_point(|&u| u < id))
    }

    pub fn type_of(&self, id: u64) -> Result<&str> {
        Ok(&self.labels[self.type_index_of(id)?])
    }

    pub fn attributes_at(&self, t: usize) -> &[String] {
        &self.attributes[t]
    }

    pub fn dense_flags_at(&self, t: usize) -> &BitSequence {
        &self.dense[t]
    }

    /// Ordinal and flag of `name` in the label at index `t`, or `None`
    /// when the label does not declare it.
    pub fn attribute_at(&self, t: usize, name: &str) -> Option<AttributeInfo> {
        let ordinal = self.attributes[t].iter().position(|a| a == name)? + 1;
        Some(AttributeInfo {
            ordinal,
            dense: self.dense[t].bit(ordinal - 1),
        })
    }

    /// `Ok(None)` is the undefined-attribute signal.
    pub fn attribute_info(&self, label: &str, name: &str) -> Result<Option<AttributeInfo>> {
        Ok(self.attribute_at(self.index_of(label)?, name))
    }

    /// Every logical attribute with its dense flag, sorted by name.
    pub fn registry(&self) -> BTreeMap<&str, bool> {
        let mut out = BTreeMap::new();
        for (names, flags) in self.attributes.iter().zip(&self.dense) {
            for (i, n) in names.iter().enumerate() {
                out.insert(n.as_str(), flags.bit(i));
            }
        }
        out
    }

    pub fn heap_bytes(&self) -> usize {
        self.labels.iter().map(|l| l.len() + 24).sum::<usize>()
            + self.upper_limits.len() * 8
            + self
                .attributes
                .iter()
                .flatten()
                .map(|a| a.len() + 24)
                .sum::<usize>()
            + self.dense.iter().map(|d| d.heap_bytes()).sum::<usize>()
    }
}

/// Growable label table. Each label gets a stable symbol at creation; the
/// type of every element, in id order, lives in a [`DynSequence`] of symbols.
#[derive(Clone, Debug, Default)]
pub struct DynTypeTable {
    symbols: Vec<String>,
    by_label: BTreeMap<String, u32>,
    attributes: Vec<Vec<String>>,
    dense: Vec<Vec<bool>>,
    registry: BTreeMap<String, bool>,
    types: DynSequence,
}

impl DynTypeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_type(&mut self, label: &str) -> Result<u32> {
        if label.is_empty() {
            return Err(Error::InvalidInput("empty label".into()));
        }
        if self.by_label.contains_key(label) {
            return Err(Error::AlreadyExists(format!("type {label}")));
        }
        let sym = self.symbols.len() as u32;
        self.symbols.push(label.to_owned());
        self.by_label.insert(label.to_owned(), sym);
        self.attributes.push(Vec::new());
        self.dense.push(Vec::new());
        Ok(sym)
    }

    /// Appends `name` to the label's attribute list; returns its ordinal.
    pub fn add_attribute(&mut self, label: &str, name: &str, dense: bool) -> Result<usize> {
        let sym = self.symbol(label)? as usize;
        if name.is_empty() {
            return Err(Error::InvalidInput(format!("empty attribute name in {label}")));
        }
        if self.attributes[sym].iter().any(|a| a == name) {
            return Err(Error::AlreadyExists(format!("attribute {name} in {label}")));
        }
        register_flag(&mut self.registry, label, name, dense)?;
        self.attributes[sym].push(name.to_owned());
        self.dense[sym].push(dense);
        Ok(self.attributes[sym].len())
    }

    /// Appends an element of `label` and returns its id.
    pub fn register_element(&mut self, label: &str) -> Result<u64> {
        let sym = self.symbol(label)?;
        self.types.push(sym);
        Ok(self.types.len() as u64)
    }

    /// Number of registered elements, which is also the highest id.
    pub fn len(&self) -> u64 {
        self.types.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn symbol(&self, label: &str) -> Result<u32> {
        self.by_label
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    pub fn label_of_symbol(&self, sym: u32) -> &str {
        &self.symbols[sym as usize]
    }

    /// Labels in bytewise order.
    pub fn labels(&self) -> Vec<String> {
        self.by_label.keys().cloned().collect()
    }

    /// Labels in creation (symbol) order.
    pub fn labels_by_symbol(&self) -> &[String] {
        &self.symbols
    }

    pub fn type_symbol_of(&self, id: u64) -> Result<u32> {
        if id == 0 || id > self.len() {
            return Err(out_of_bounds(id, self.len()));
        }
        self.types.access(id as usize)
    }

    pub fn type_of(&self, id: u64) -> Result<&str> {
        Ok(self.label_of_symbol(self.type_symbol_of(id)?))
    }

    pub fn count_of_symbol(&self, sym: u32) -> usize {
        self.types.rank(sym, self.types.len()).unwrap_or(0)
    }

    /// Ids of `label`, ascending, by select over the type sequence.
    pub fn ids_of(&self, label: &str) -> Result<Vec<u64>> {
        let sym = self.symbol(label)?;
        (1..=self.count_of_symbol(sym))
            .map(|j| self.types.select(sym, j).map(|p| p as u64))
            .collect()
    }

    /// 1-based position of `id` among the elements of its own type.
    pub fn rank_within(&self, id: u64) -> Result<usize> {
        let sym = self.type_symbol_of(id)?;
        self.types.rank(sym, id as usize)
    }

    pub fn attributes_of_symbol(&self, sym: u32) -> &[String] {
        &self.attributes[sym as usize]
    }

    pub fn dense_flags_of_symbol(&self, sym: u32) -> &[bool] {
        &self.dense[sym as usize]
    }

    pub fn attribute_of_symbol(&self, sym: u32, name: &str) -> Option<AttributeInfo> {
        let i = self.attributes[sym as usize].iter().position(|a| a == name)?;
        Some(AttributeInfo {
            ordinal: i + 1,
            dense: self.dense[sym as usize][i],
        })
    }

    /// `Ok(None)` is the undefined-attribute signal.
    pub fn attribute_info(&self, label: &str, name: &str) -> Result<Option<AttributeInfo>> {
        Ok(self.attribute_of_symbol(self.symbol(label)?, name))
    }

    /// Dense flag of a logical attribute, if any label declares it.
    pub fn registered(&self, name: &str) -> Option<bool> {
        self.registry.get(name).copied()
    }

    pub fn heap_bytes(&self) -> usize {
        self.symbols.iter().map(|l| 2 * (l.len() + 24) + 4).sum::<usize>()
            + self
                .attributes
                .iter()
                .flatten()
                .map(|a| a.len() + 25)
                .sum::<usize>()
            + self.types.heap_bytes()
    }
}
