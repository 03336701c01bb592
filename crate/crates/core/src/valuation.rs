//! Valuations in extended-focal-element form.
//!
//! Every valuation is a set of pairs `(α, μ)`: a nonempty set of
//! configurations α and a real value for each configuration in it. A
//! basic probability assignment stores its mass as the constant value of
//! each focal; a utility is a single pair over the whole frame.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::calculus::marginalize_belief;
use crate::error::{Error, Result};
use crate::model::{ConfigSet, Configuration, Domain, VarId};

/// Absolute tolerance on the sum of masses of a bpa.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Upper bound on the number of focal elements a ballooning extension may produce.
pub const BALLOON_LIMIT: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValuationKind {
    Belief,
    Utility,
    General,
}

impl ValuationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ValuationKind::Belief => "belief",
            ValuationKind::Utility => "utility",
            ValuationKind::General => "general",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedFocal {
    support: ConfigSet,
    values: Vec<f64>,
}

impl ExtendedFocal {
    pub fn new(support: ConfigSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != support.len() {
            return Err(Error::IncompleteTable(format!(
                "{} values for {} configurations",
                values.len(),
                support.len()
            )));
        }
        Ok(ExtendedFocal { support, values })
    }

    pub fn support(&self) -> &ConfigSet {
        &self.support
    }

    /// Values aligned with `support().indices()`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, index: usize) -> Option<f64> {
        self.support.position(index).map(|p| self.values[p])
    }

    pub fn value(&self, config: &Configuration) -> Option<f64> {
        if config.domain() != self.support.domain() {
            return None;
        }
        self.value_at(config.index())
    }

    /// Mass of a belief focal (all of its values are equal).
    pub fn mass(&self) -> f64 {
        self.values[0]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.indices().iter().copied().zip(self.values.iter().copied())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Valuation {
    domain: Domain,
    kind: ValuationKind,
    focals: Vec<ExtendedFocal>,
}

impl Valuation {
    /// Canonical form: focals with equal supports are merged by summing
    /// their values pointwise, zero-mass belief focals are dropped and
    /// focals are sorted by support. Non-belief valuations consisting of a
    /// single focal over the whole frame are classified as utilities.
    pub(crate) fn from_parts<I>(domain: Domain, belief: bool, parts: I) -> Valuation
    where
        I: IntoIterator<Item = (Vec<usize>, Vec<f64>)>,
    {
        let mut merged: BTreeMap<Vec<usize>, Vec<f64>> = BTreeMap::new();
        for (members, values) in parts {
            debug_assert_eq!(members.len(), values.len());
            match merged.get_mut(&members) {
                Some(acc) => acc.iter_mut().zip(&values).for_each(|(a, v)| *a += v),
                None => {
                    merged.insert(members, values);
                }
            }
        }
        let focals: Vec<ExtendedFocal> = merged
            .into_iter()
            .filter(|(_, values)| !belief || values[0] != 0.0)
            .map(|(members, values)| ExtendedFocal {
                support: ConfigSet::from_sorted(domain.clone(), members),
                values,
            })
            .collect();
        let kind = if belief {
            ValuationKind::Belief
        } else if focals.len() == 1 && focals[0].support.is_full() {
            ValuationKind::Utility
        } else {
            ValuationKind::General
        };
        Valuation {
            domain,
            kind,
            focals,
        }
    }

    /// A non-belief valuation from arbitrary extended focal elements.
    pub fn general(domain: Domain, focals: Vec<ExtendedFocal>) -> Result<Valuation> {
        if let Some(f) = focals.iter().find(|f| f.support.domain() != &domain) {
            return Err(Error::DomainMismatch(format!(
                "focal over {:?}, valuation over {:?}",
                f.support.domain().vars(),
                domain.vars()
            )));
        }
        Ok(Valuation::from_parts(
            domain,
            false,
            focals
                .into_iter()
                .map(|f| (f.support.indices().to_vec(), f.values)),
        ))
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn kind(&self) -> ValuationKind {
        self.kind
    }

    pub fn is_belief(&self) -> bool {
        self.kind == ValuationKind::Belief
    }

    pub fn focals(&self) -> &[ExtendedFocal] {
        &self.focals
    }

    /// Mass assigned to exactly the set `a` (zero if `a` is not focal).
    pub fn mass_of(&self, a: &ConfigSet) -> f64 {
        self.focals
            .iter()
            .find(|f| &f.support == a)
            .map_or(0.0, |f| f.mass())
    }

    pub fn total_mass(&self) -> f64 {
        self.focals.iter().map(ExtendedFocal::mass).sum()
    }

    /// Value of a single-focal valuation at a configuration index.
    pub fn utility_at(&self, index: usize) -> Option<f64> {
        match self.focals.as_slice() {
            [only] => only.value_at(index),
            _ => None,
        }
    }

    /// The value attached to ♦ by a valuation over the empty domain. Several
    /// focals over ∅ all have support {♦} and are merged, so at most one exists.
    pub fn empty_value(&self) -> Option<f64> {
        if !self.domain.is_empty() {
            return None;
        }
        Some(self.focals.first().map_or(0.0, |f| f.values[0]))
    }

    /// Total order used to canonicalize operand order.
    pub fn canonical_cmp(&self, other: &Valuation) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then_with(|| self.domain.cmp(&other.domain))
            .then_with(|| self.focals.len().cmp(&other.focals.len()))
            .then_with(|| {
                for (a, b) in self.focals.iter().zip(&other.focals) {
                    let o = a.support.cmp(&b.support).then_with(|| {
                        a.values
                            .iter()
                            .zip(&b.values)
                            .map(|(x, y)| x.total_cmp(y))
                            .find(|o| o.is_ne())
                            .unwrap_or(Ordering::Equal)
                    });
                    if o.is_ne() {
                        return o;
                    }
                }
                Ordering::Equal
            })
    }
}

/// Build a basic probability assignment on `domain`. Duplicate sets are
/// merged by summing their masses and zero masses are dropped.
pub fn make_bpa<I>(domain: &Domain, assignments: I) -> Result<Valuation>
where
    I: IntoIterator<Item = (ConfigSet, f64)>,
{
    let mut parts = Vec::new();
    let mut sum = 0.0;
    for (set, mass) in assignments {
        if set.domain() != domain {
            return Err(Error::DomainMismatch(
                "focal set is not over the bpa's domain".into(),
            ));
        }
        if mass.is_nan() || mass < 0.0 {
            return Err(Error::NegativeMass(mass));
        }
        sum += mass;
        parts.push((set.indices().to_vec(), vec![mass; set.len()]));
    }
    if (sum - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::MassSum { sum });
    }
    Ok(Valuation::from_parts(domain.clone(), true, parts))
}

/// Bel(a): total mass of the focal elements contained in `a`.
pub fn belief_of(v: &Valuation, a: &ConfigSet) -> Result<f64> {
    if !v.is_belief() {
        return Err(Error::KindMismatch { expected: "belief" });
    }
    if a.domain() != v.domain() {
        return Err(Error::DomainMismatch("set is not over the bpa's domain".into()));
    }
    Ok(v.focals
        .iter()
        .filter(|f| f.support.is_subset_of(a))
        .map(ExtendedFocal::mass)
        .sum())
}

/// A utility valuation given one value per configuration of `domain`.
pub fn make_utility<I>(domain: &Domain, table: I) -> Result<Valuation>
where
    I: IntoIterator<Item = (Configuration, f64)>,
{
    let mut values: Vec<Option<f64>> = vec![None; domain.frame_size()];
    for (config, value) in table {
        if config.domain() != domain {
            return Err(Error::IncompleteTable(
                "entry is not a configuration of the utility's domain".into(),
            ));
        }
        let slot = &mut values[config.index()];
        if slot.is_some() {
            return Err(Error::IncompleteTable(format!(
                "configuration #{} given twice",
                config.index()
            )));
        }
        *slot = Some(value);
    }
    let missing = values.iter().filter(|v| v.is_none()).count();
    if missing > 0 {
        return Err(Error::IncompleteTable(format!(
            "{missing} configurations have no utility"
        )));
    }
    utility_from_values(domain, values.into_iter().map(Option::unwrap).collect())
}

/// A utility valuation from values listed in configuration-index order.
pub fn utility_from_values(domain: &Domain, values: Vec<f64>) -> Result<Valuation> {
    if values.len() != domain.frame_size() {
        return Err(Error::IncompleteTable(format!(
            "{} values for {} configurations",
            values.len(),
            domain.frame_size()
        )));
    }
    let members = (0..domain.frame_size()).collect();
    Ok(Valuation::from_parts(domain.clone(), false, [(members, values)]))
}

/// The vacuous belief function: mass 1 on the whole frame.
pub fn vacuous(domain: &Domain) -> Result<Valuation> {
    if domain.is_empty() {
        return Err(Error::Precondition(
            "the vacuous belief function needs a nonempty domain".into(),
        ));
    }
    let members: Vec<usize> = (0..domain.frame_size()).collect();
    let n = members.len();
    Ok(Valuation::from_parts(domain.clone(), true, [(members, vec![1.0; n])]))
}

/// Ballooning extension of one conditional bpa per parent configuration.
///
/// Each focal element of the result picks one focal of every per-parent
/// table; its support is the union of the chosen slices `{p} × α_p` and its
/// mass is the product of the chosen masses.
pub fn balloon(head: VarId, parents: &Domain, tables: &[Valuation]) -> Result<Valuation> {
    if parents.contains(head) {
        return Err(Error::DomainMismatch("head variable listed among its parents".into()));
    }
    if tables.len() != parents.frame_size() {
        return Err(Error::IncompleteTable(format!(
            "{} conditional tables for {} parent configurations",
            tables.len(),
            parents.frame_size()
        )));
    }
    let head_domain = &tables[0].domain;
    if head_domain.vars() != [head] {
        return Err(Error::DomainMismatch("conditional table is not over the head variable".into()));
    }
    for t in tables {
        if !t.is_belief() {
            return Err(Error::KindMismatch { expected: "belief" });
        }
        if &t.domain != head_domain {
            return Err(Error::DomainMismatch("conditional tables over different frames".into()));
        }
    }
    let count: u128 = tables.iter().map(|t| t.focals.len() as u128).product();
    if count > BALLOON_LIMIT {
        return Err(Error::TooLarge(count, BALLOON_LIMIT));
    }

    let domain = parents.union(head_domain)?;
    let head_stride = {
        let pos = domain.position(head).unwrap();
        let mut v = vec![0; domain.len()];
        v[pos] = 1;
        domain.encode(&v)
    };
    // index of (p, head = first label) in the joint domain
    let bases: Vec<usize> = (0..parents.frame_size())
        .map(|p| {
            let config = Configuration::from_index(parents.clone(), p).unwrap();
            let head0 = Configuration::new(head_domain.clone(), vec![0]).unwrap();
            config.concat(&head0).unwrap().index()
        })
        .collect();

    let mut parts = Vec::with_capacity(count as usize);
    let mut choice = vec![0usize; tables.len()];
    loop {
        let mut members = Vec::new();
        let mut mass = 1.0;
        for (p, (&c, table)) in choice.iter().zip(tables).enumerate() {
            let focal = &table.focals[c];
            mass *= focal.mass();
            members.extend(focal.support.indices().iter().map(|&r| bases[p] + r * head_stride));
        }
        members.sort_unstable();
        let n = members.len();
        parts.push((members, vec![mass; n]));

        // odometer over per-parent focal choices
        let mut i = tables.len();
        loop {
            if i == 0 {
                return Ok(Valuation::from_parts(domain, true, parts));
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < tables[i].focals.len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

/// Whether the Eq-2.8 marginal of `v` onto its domain without `head` is vacuous.
pub fn is_conditional(v: &Valuation, head: VarId) -> Result<bool> {
    if !v.is_belief() {
        return Err(Error::KindMismatch { expected: "belief" });
    }
    if !v.domain.contains(head) {
        return Err(Error::DomainMismatch(format!(
            "variable #{} is not in the valuation's domain",
            head.0
        )));
    }
    let marginal = marginalize_belief(v, head)?;
    Ok(match marginal.focals.as_slice() {
        [only] => only.support.is_full() && (only.mass() - 1.0).abs() <= MASS_TOLERANCE,
        _ => false,
    })
}

/// A conditional belief function for a random variable given its parents,
/// kept both as per-parent tables and as its ballooning extension.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalPotential {
    label: String,
    head: VarId,
    parents: Domain,
    tables: Vec<Valuation>,
    ballooned: Valuation,
}

impl ConditionalPotential {
    /// `tables[p]` is the bpa over the head's frame for the parent
    /// configuration with index `p`.
    pub fn new(
        label: impl Into<String>,
        head: VarId,
        parents: Domain,
        tables: Vec<Valuation>,
    ) -> Result<Self> {
        let ballooned = balloon(head, &parents, &tables)?;
        Ok(ConditionalPotential {
            label: label.into(),
            head,
            parents,
            tables,
            ballooned,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn head(&self) -> VarId {
        self.head
    }

    pub fn parents(&self) -> &Domain {
        &self.parents
    }

    pub fn tables(&self) -> &[Valuation] {
        &self.tables
    }

    pub fn table(&self, parent: &Configuration) -> Option<&Valuation> {
        (parent.domain() == &self.parents).then(|| &self.tables[parent.index()])
    }

    pub fn ballooned(&self) -> &Valuation {
        &self.ballooned
    }

    pub fn domain(&self) -> &Domain {
        self.ballooned.domain()
    }

    /// True when every per-parent table is a probability distribution.
    pub fn is_probabilistic(&self) -> bool {
        self.tables
            .iter()
            .all(|t| t.focals.iter().all(|f| f.support.len() == 1))
    }
}
