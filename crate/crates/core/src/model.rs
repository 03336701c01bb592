//! Variables, frames, configurations and sets of configurations.
//!
//! A [`Domain`] is a set of variables together with their frame sizes. A
//! configuration of a domain is stored as a mixed-radix index into the
//! Cartesian product of the frames, with the first declared variable as the
//! most significant digit, so sorting indices sorts configurations
//! lexicographically in declaration order.

use std::fmt;

use crate::error::{Error, Result};

/// Largest frame (number of configurations) a single domain may have.
pub const FRAME_LIMIT: u128 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Decision,
    Random,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Decision => f.write_str("decision"),
            VarKind::Random => f.write_str("random"),
        }
    }
}

/// A named decision or random variable with an ordered frame of labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    name: String,
    kind: VarKind,
    frame: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, kind: VarKind, frame: Vec<String>) -> Result<Self> {
        let name = name.into();
        if frame.is_empty() {
            return Err(Error::InvalidFrame {
                var: name,
                reason: "frame is empty".into(),
            });
        }
        for (i, label) in frame.iter().enumerate() {
            if frame[..i].contains(label) {
                return Err(Error::InvalidFrame {
                    var: name,
                    reason: format!("label '{label}' appears twice"),
                });
            }
        }
        Ok(Variable { name, kind, frame })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    pub fn frame(&self) -> &[String] {
        &self.frame
    }

    pub fn size(&self) -> usize {
        self.frame.len()
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.frame.iter().position(|l| l == label)
    }
}

/// Registry of declared variables. Ids follow declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Variables {
    vars: Vec<Variable>,
}

impl Variables {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, var: Variable) -> Result<VarId> {
        if self.find(var.name()).is_some() {
            return Err(Error::Duplicate(format!("variable '{}'", var.name())));
        }
        self.vars.push(var);
        Ok(VarId(self.vars.len() - 1))
    }

    pub fn get(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn find(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn lookup(&self, name: &str) -> Result<VarId> {
        self.find(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &Variable)> {
        self.vars.iter().enumerate().map(|(i, v)| (VarId(i), v))
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len()).map(VarId)
    }

    pub fn of_kind(&self, kind: VarKind) -> impl Iterator<Item = VarId> + '_ {
        self.iter().filter(move |(_, v)| v.kind == kind).map(|(id, _)| id)
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.vars[id.0].name
    }

    pub fn kind(&self, id: VarId) -> VarKind {
        self.vars[id.0].kind
    }

    pub fn domain<I: IntoIterator<Item = VarId>>(&self, ids: I) -> Result<Domain> {
        Domain::new(ids.into_iter().map(|id| (id, self.get(id).size())))
    }

    /// Domain of every declared variable.
    pub fn universe(&self) -> Result<Domain> {
        self.domain(self.ids())
    }

    pub fn domain_by_names(&self, names: &[&str]) -> Result<Domain> {
        let ids = names
            .iter()
            .map(|n| self.lookup(n))
            .collect::<Result<Vec<_>>>()?;
        self.domain(ids)
    }

    pub fn value(&self, var: VarId, label: &str) -> Result<usize> {
        let v = self.get(var);
        v.value_index(label).ok_or_else(|| Error::UnknownValue {
            var: v.name.clone(),
            value: label.to_string(),
        })
    }

    /// Build a configuration from `(variable, label)` pairs given in any order.
    pub fn config(&self, pairs: &[(&str, &str)]) -> Result<Configuration> {
        let mut ids = Vec::with_capacity(pairs.len());
        for (name, _) in pairs {
            let id = self.lookup(name)?;
            if ids.contains(&id) {
                return Err(Error::Duplicate(format!("variable '{name}' in configuration")));
            }
            ids.push(id);
        }
        let domain = self.domain(ids.iter().copied())?;
        let mut values = vec![0; domain.len()];
        for (id, (_, label)) in ids.iter().zip(pairs) {
            values[domain.position(*id).unwrap()] = self.value(*id, label)?;
        }
        Configuration::new(domain, values)
    }

    /// Build a set of configurations over `vars`; each row lists one label
    /// per variable, in the order of `vars`.
    pub fn config_set(&self, vars: &[&str], rows: &[&[&str]]) -> Result<ConfigSet> {
        let domain = self.domain_by_names(vars)?;
        let mut members = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != vars.len() {
                return Err(Error::DomainMismatch(format!(
                    "row has {} labels for {} variables",
                    row.len(),
                    vars.len()
                )));
            }
            let pairs: Vec<(&str, &str)> = vars.iter().copied().zip(row.iter().copied()).collect();
            members.push(self.config(&pairs)?.index());
        }
        ConfigSet::new(domain, members)
    }

    pub fn format_domain(&self, domain: &Domain) -> String {
        let names: Vec<&str> = domain.vars().iter().map(|&v| self.name(v)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Labels of a configuration in declaration order, space separated.
    /// The empty configuration prints as `♦`.
    pub fn format_index(&self, domain: &Domain, index: usize) -> String {
        if domain.is_empty() {
            return "♦".to_string();
        }
        domain
            .decode(index)
            .iter()
            .zip(domain.vars())
            .map(|(&value, &var)| self.get(var).frame[value].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn format_config(&self, config: &Configuration) -> String {
        self.format_index(config.domain(), config.index())
    }

    pub fn format_set(&self, set: &ConfigSet) -> String {
        let rows: Vec<String> = set
            .indices()
            .iter()
            .map(|&i| self.format_index(set.domain(), i))
            .collect();
        format!("{{{}}}", rows.join(", "))
    }
}

/// A set of variables together with their frame sizes, sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Domain {
    vars: Vec<VarId>,
    sizes: Vec<usize>,
    strides: Vec<usize>,
    frame_size: usize,
}

impl Domain {
    pub fn new<I: IntoIterator<Item = (VarId, usize)>>(pairs: I) -> Result<Self> {
        let mut pairs: Vec<(VarId, usize)> = pairs.into_iter().collect();
        pairs.sort();
        pairs.dedup();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DomainMismatch(format!(
                    "variable #{} given with two frame sizes",
                    w[0].0 .0
                )));
            }
        }
        let mut total: u128 = 1;
        for &(_, size) in &pairs {
            if size == 0 {
                return Err(Error::DomainMismatch("zero-sized frame".into()));
            }
            total *= size as u128;
            if total > FRAME_LIMIT {
                return Err(Error::TooLarge(total, FRAME_LIMIT));
            }
        }
        let vars: Vec<VarId> = pairs.iter().map(|p| p.0).collect();
        let sizes: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let mut strides = vec![1; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        Ok(Domain {
            vars,
            sizes,
            strides,
            frame_size: total as usize,
        })
    }

    pub fn empty() -> Self {
        Domain {
            vars: Vec::new(),
            sizes: Vec::new(),
            strides: Vec::new(),
            frame_size: 1,
        }
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of variables.
    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    /// Number of configurations of the domain.
    pub fn frame_size(&self) -> usize {
        self.frame_size
    }

    pub fn position(&self, var: VarId) -> Option<usize> {
        self.vars.binary_search(&var).ok()
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.position(var).is_some()
    }

    pub fn size_of(&self, var: VarId) -> Option<usize> {
        self.position(var).map(|p| self.sizes[p])
    }

    pub fn is_subset_of(&self, other: &Domain) -> bool {
        self.vars.iter().all(|&v| other.contains(v))
    }

    pub fn union(&self, other: &Domain) -> Result<Domain> {
        Domain::new(self.pairs().chain(other.pairs()))
    }

    pub fn intersection(&self, other: &Domain) -> Domain {
        let pairs: Vec<_> = self.pairs().filter(|(v, _)| other.contains(*v)).collect();
        Domain::new(pairs).expect("subdomain of a valid domain")
    }

    pub fn without(&self, var: VarId) -> Domain {
        let pairs: Vec<_> = self.pairs().filter(|(v, _)| *v != var).collect();
        Domain::new(pairs).expect("subdomain of a valid domain")
    }

    fn pairs(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.vars.iter().copied().zip(self.sizes.iter().copied())
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.sizes)
            .map(|(&stride, &size)| (index / stride) % size)
            .collect()
    }

    pub fn encode(&self, values: &[usize]) -> usize {
        values.iter().zip(&self.strides).map(|(v, s)| v * s).sum()
    }

    /// Value of `var` within the configuration with the given index.
    pub fn value_at(&self, index: usize, var: VarId) -> Option<usize> {
        self.position(var)
            .map(|p| (index / self.strides[p]) % self.sizes[p])
    }
}

/// Maps configuration indices of one domain onto a subdomain.
#[derive(Clone, Debug)]
pub struct Projector {
    digits: Vec<(usize, usize, usize)>,
}

impl Projector {
    pub fn new(from: &Domain, to: &Domain) -> Result<Self> {
        let mut digits = Vec::with_capacity(to.len());
        for (i, &var) in to.vars.iter().enumerate() {
            let p = from.position(var).ok_or_else(|| {
                Error::DomainMismatch(format!("variable #{} is not in the source domain", var.0))
            })?;
            if from.sizes[p] != to.sizes[i] {
                return Err(Error::DomainMismatch(format!(
                    "variable #{} has inconsistent frame sizes",
                    var.0
                )));
            }
            digits.push((from.strides[p], from.sizes[p], to.strides[i]));
        }
        Ok(Projector { digits })
    }

    /// Place the digits of `vars` (all in `from`) at their positions in the
    /// larger domain `into`, leaving every other digit zero.
    pub fn embedding(from: &Domain, into: &Domain, vars: &[VarId]) -> Result<Self> {
        let mut digits = Vec::with_capacity(vars.len());
        for &var in vars {
            let (Some(p), Some(q)) = (from.position(var), into.position(var)) else {
                return Err(Error::DomainMismatch(format!(
                    "variable #{} missing from an embedding domain",
                    var.0
                )));
            };
            digits.push((from.strides[p], from.sizes[p], into.strides[q]));
        }
        Ok(Projector { digits })
    }

    pub fn apply(&self, index: usize) -> usize {
        self.digits
            .iter()
            .map(|&(from_stride, size, to_stride)| ((index / from_stride) % size) * to_stride)
            .sum()
    }
}

/// One value per variable of a domain. The configuration of the empty
/// domain is the unique configuration ♦.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    domain: Domain,
    values: Vec<usize>,
}

impl Configuration {
    pub fn new(domain: Domain, values: Vec<usize>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::DomainMismatch(format!(
                "{} values for {} variables",
                values.len(),
                domain.len()
            )));
        }
        if let Some(i) = (0..values.len()).find(|&i| values[i] >= domain.sizes[i]) {
            return Err(Error::DomainMismatch(format!(
                "value {} out of range for variable #{}",
                values[i], domain.vars[i].0
            )));
        }
        Ok(Configuration { domain, values })
    }

    /// The configuration ♦ of the empty domain.
    pub fn empty() -> Self {
        Configuration {
            domain: Domain::empty(),
            values: Vec::new(),
        }
    }

    pub fn from_index(domain: Domain, index: usize) -> Result<Self> {
        if index >= domain.frame_size() {
            return Err(Error::DomainMismatch(format!("configuration index {index} out of range")));
        }
        let values = domain.decode(index);
        Ok(Configuration { domain, values })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value(&self, var: VarId) -> Option<usize> {
        self.domain.position(var).map(|p| self.values[p])
    }

    pub fn index(&self) -> usize {
        self.domain.encode(&self.values)
    }

    /// Drop the coordinates outside `h`.
    pub fn project(&self, h: &Domain) -> Result<Configuration> {
        let projector = Projector::new(&self.domain, h)?;
        Configuration::from_index(h.clone(), projector.apply(self.index()))
    }

    /// Join two configurations of disjoint domains.
    pub fn concat(&self, other: &Configuration) -> Result<Configuration> {
        if let Some(v) = self.domain.vars.iter().find(|v| other.domain.contains(**v)) {
            return Err(Error::DomainMismatch(format!(
                "variable #{} appears in both configurations",
                v.0
            )));
        }
        let domain = self.domain.union(&other.domain)?;
        let values = domain
            .vars
            .iter()
            .map(|&v| self.value(v).or_else(|| other.value(v)).unwrap())
            .collect();
        Ok(Configuration { domain, values })
    }
}

/// A nonempty set of configurations over one domain, stored as sorted
/// configuration indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigSet {
    domain: Domain,
    members: Vec<usize>,
}

impl ConfigSet {
    pub fn new<I: IntoIterator<Item = usize>>(domain: Domain, members: I) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::EmptyFocal);
        }
        if members.last().is_some_and(|&m| m >= domain.frame_size()) {
            return Err(Error::DomainMismatch("configuration index out of range".into()));
        }
        Ok(ConfigSet { domain, members })
    }

    /// Build from indices already sorted, deduplicated and nonempty.
    pub(crate) fn from_sorted(domain: Domain, members: Vec<usize>) -> Self {
        debug_assert!(!members.is_empty());
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        ConfigSet { domain, members }
    }

    pub fn full(domain: Domain) -> Self {
        let members = (0..domain.frame_size()).collect();
        ConfigSet { domain, members }
    }

    pub fn singleton(config: &Configuration) -> Self {
        ConfigSet {
            domain: config.domain.clone(),
            members: vec![config.index()],
        }
    }

    pub fn from_configs<'a, I>(domain: Domain, configs: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Configuration>,
    {
        let mut members = Vec::new();
        for c in configs {
            if c.domain != domain {
                return Err(Error::DomainMismatch(
                    "configuration over a different domain".into(),
                ));
            }
            members.push(c.index());
        }
        ConfigSet::new(domain, members)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn indices(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.domain.frame_size()
    }

    pub fn position(&self, index: usize) -> Option<usize> {
        self.members.binary_search(&index).ok()
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.position(index).is_some()
    }

    pub fn contains(&self, config: &Configuration) -> bool {
        config.domain == self.domain && self.contains_index(config.index())
    }

    pub fn configs(&self) -> impl Iterator<Item = Configuration> + '_ {
        self.members.iter().map(move |&i| Configuration {
            domain: self.domain.clone(),
            values: self.domain.decode(i),
        })
    }

    /// Subset test; sets over different domains are never subsets.
    pub fn is_subset_of(&self, other: &ConfigSet) -> bool {
        self.domain == other.domain && self.members.iter().all(|&m| other.contains_index(m))
    }

    /// Intersection of two sets over the same domain; `None` when empty.
    pub fn intersect(&self, other: &ConfigSet) -> Result<Option<ConfigSet>> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch("intersection across domains".into()));
        }
        let members: Vec<usize> = self
            .members
            .iter()
            .copied()
            .filter(|&m| other.contains_index(m))
            .collect();
        Ok((!members.is_empty()).then(|| ConfigSet::from_sorted(self.domain.clone(), members)))
    }

    /// Set image of configuration projection onto `h`.
    pub fn project(&self, h: &Domain) -> Result<ConfigSet> {
        let projector = Projector::new(&self.domain, h)?;
        ConfigSet::new(h.clone(), self.members.iter().map(|&m| projector.apply(m)))
    }

    /// Cylinder extension: the product of this set with the frame of `g - h`.
    pub fn extend(&self, g: &Domain) -> Result<ConfigSet> {
        let projector = Projector::new(g, &self.domain)?;
        let members: Vec<usize> = (0..g.frame_size())
            .filter(|&i| self.contains_index(projector.apply(i)))
            .collect();
        Ok(ConfigSet::from_sorted(g.clone(), members))
    }
}
