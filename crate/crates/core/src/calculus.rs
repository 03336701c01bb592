//! Combination and marginalization of valuations.
//!
//! Combination pairs every focal element of one operand with every focal
//! element of the other and intersects their cylinder extensions. Values on
//! the intersection are multiplied and renormalized when both operands are
//! belief functions (Dempster's rule), added when neither is, and
//! multiplied without renormalization otherwise.
//!
//! Marginalization removes one variable. Within each focal element the
//! values of the extensions of a configuration are aggregated by MAX for a
//! decision variable and by `λ·MAX + (1 − λ)·MIN` for a random variable;
//! the aggregates of focal elements with equal projections are summed.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{ConfigSet, Configuration, Domain, Projector, VarId, VarKind};
use crate::valuation::Valuation;

/// Remaining mass at or below which belief functions are in total conflict.
pub const CONFLICT_TOLERANCE: f64 = 1e-12;

/// Weighting factor between the optimistic (MAX) and pessimistic (MIN)
/// aggregate when a random variable is eliminated.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Lambda(f64);

impl Lambda {
    pub const PESSIMISTIC: Lambda = Lambda(0.0);
    pub const OPTIMISTIC: Lambda = Lambda(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Lambda(value))
        } else {
            Err(Error::InvalidLambda(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    fn blend(self, max: f64, min: f64) -> f64 {
        if self.0 == 1.0 {
            max
        } else if self.0 == 0.0 {
            min
        } else {
            self.0 * max + (1.0 - self.0) * min
        }
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<f64> for Lambda {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Lambda::new(value)
    }
}

/// The acts chosen for a decision variable when it was eliminated, as a
/// function of the configurations of the remaining variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionTable {
    decision: VarId,
    context: Domain,
    choices: BTreeMap<usize, usize>,
    conflicts: Vec<usize>,
}

impl SolutionTable {
    pub fn decision(&self) -> VarId {
        self.decision
    }

    pub fn context(&self) -> &Domain {
        &self.context
    }

    /// Act index chosen for the context configuration with the given index.
    pub fn choice_at(&self, context_index: usize) -> Option<usize> {
        self.choices.get(&context_index).copied()
    }

    pub fn choice(&self, context: &Configuration) -> Option<usize> {
        if context.domain() != &self.context {
            return None;
        }
        self.choice_at(context.index())
    }

    /// `(context index, act index)` in context order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.choices.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    /// Context configurations where different focal elements preferred
    /// different acts.
    pub fn conflicts(&self) -> &[usize] {
        &self.conflicts
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rule {
    Dempster,
    Sum,
    Product,
}

/// Combine two valuations.
///
/// Operands are put in a canonical order first so that the result does not
/// depend on argument order, down to the last bit.
pub fn combine(a: &Valuation, b: &Valuation) -> Result<Valuation> {
    let (a, b) = if a.canonical_cmp(b) == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    };
    let rule = match (a.is_belief(), b.is_belief()) {
        (true, true) => Rule::Dempster,
        (false, false) => Rule::Sum,
        _ => Rule::Product,
    };
    let g = a.domain();
    let h = b.domain();
    let joint = g.union(h)?;
    let shared = g.intersection(h);
    let only_h: Vec<VarId> = h.vars().iter().copied().filter(|v| !g.contains(*v)).collect();
    let embed_a = Projector::embedding(g, &joint, g.vars())?;
    let embed_b = Projector::embedding(h, &joint, &only_h)?;
    let key_a = Projector::new(g, &shared)?;
    let key_b = Projector::new(h, &shared)?;

    let buckets: Vec<HashMap<usize, Vec<(usize, f64)>>> = b
        .focals()
        .iter()
        .map(|focal| {
            let mut map: HashMap<usize, Vec<(usize, f64)>> = HashMap::new();
            for (j, value) in focal.iter() {
                map.entry(key_b.apply(j)).or_default().push((embed_b.apply(j), value));
            }
            map
        })
        .collect();

    let mut parts = Vec::new();
    let mut conflict = 0.0;
    for alpha in a.focals() {
        for (beta, bucket) in b.focals().iter().zip(&buckets) {
            let mut cells: Vec<(usize, f64)> = Vec::new();
            for (i, vi) in alpha.iter() {
                let Some(matches) = bucket.get(&key_a.apply(i)) else {
                    continue;
                };
                let base = embed_a.apply(i);
                for &(offset, vj) in matches {
                    let value = match rule {
                        Rule::Sum => vi + vj,
                        Rule::Dempster | Rule::Product => vi * vj,
                    };
                    cells.push((base + offset, value));
                }
            }
            if cells.is_empty() {
                if rule == Rule::Dempster {
                    conflict += alpha.mass() * beta.mass();
                }
                continue;
            }
            cells.sort_unstable_by_key(|c| c.0);
            parts.push(cells.into_iter().unzip());
        }
    }

    if rule == Rule::Dempster {
        let k = 1.0 - conflict;
        if k <= CONFLICT_TOLERANCE {
            return Err(Error::TotalConflict);
        }
        for (_, values) in parts.iter_mut() {
            let values: &mut Vec<f64> = values;
            values.iter_mut().for_each(|v| *v /= k);
        }
    }
    Ok(Valuation::from_parts(joint, rule == Rule::Dempster, parts))
}

/// Combine utilities before belief functions: `(⊗ utilities) ⊗ (⊗ beliefs)`.
pub fn combine_all(utilities: &[Valuation], beliefs: &[Valuation]) -> Result<Valuation> {
    let fold = |group: &[Valuation]| -> Result<Option<Valuation>> {
        let mut iter = group.iter();
        let Some(first) = iter.next() else {
            return Ok(None);
        };
        let mut acc = first.clone();
        for v in iter {
            acc = combine(&acc, v)?;
        }
        Ok(Some(acc))
    };
    match (fold(utilities)?, fold(beliefs)?) {
        (Some(u), Some(b)) => combine(&u, &b),
        (Some(v), None) | (None, Some(v)) => Ok(v),
        (None, None) => Err(Error::Precondition("nothing to combine".into())),
    }
}

/// [`combine_all`] over a mixed collection, split by kind.
pub fn combine_pool<'a, I>(valuations: I) -> Result<Valuation>
where
    I: IntoIterator<Item = &'a Valuation>,
{
    let (beliefs, others): (Vec<Valuation>, Vec<Valuation>) =
        valuations.into_iter().cloned().partition(Valuation::is_belief);
    combine_all(&others, &beliefs)
}

/// The aggregate one focal element contributes to the marginal.
#[derive(Clone, Debug, PartialEq)]
pub struct FocalContribution {
    /// Index of the focal element in the marginalized valuation.
    pub source: usize,
    /// Projection of the focal element's support.
    pub projected: ConfigSet,
    /// Aggregated value per member of `projected`.
    pub values: Vec<f64>,
    /// Maximizing act per member of `projected` (decision variables only).
    pub argmax: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Marginal {
    pub valuation: Valuation,
    pub solution: Option<SolutionTable>,
}

fn check_elimination(v: &Valuation, var: VarId, kind: VarKind, lambda: Option<Lambda>) -> Result<()> {
    if !v.domain().contains(var) {
        return Err(Error::DomainMismatch(format!(
            "variable #{} is not in the valuation's domain",
            var.0
        )));
    }
    if kind == VarKind::Random && lambda.is_none() && !v.is_belief() {
        return Err(Error::LambdaRequired(format!("#{}", var.0)));
    }
    Ok(())
}

/// Per-focal aggregates for eliminating `var`, before focal elements with
/// equal projections are summed.
pub fn focal_contributions(
    v: &Valuation,
    var: VarId,
    kind: VarKind,
    lambda: Option<Lambda>,
) -> Result<Vec<FocalContribution>> {
    check_elimination(v, var, kind, lambda)?;
    let domain = v.domain();
    let target = domain.without(var);
    let projector = Projector::new(domain, &target)?;

    let mut out = Vec::with_capacity(v.focals().len());
    for (source, focal) in v.focals().iter().enumerate() {
        // x -> (max, min, first maximizing act)
        let mut acc: BTreeMap<usize, (f64, f64, usize)> = BTreeMap::new();
        for (y, value) in focal.iter() {
            let act = domain.value_at(y, var).unwrap();
            acc.entry(projector.apply(y))
                .and_modify(|(max, min, arg)| {
                    if value > *max {
                        *max = value;
                        *arg = act;
                    }
                    if value < *min {
                        *min = value;
                    }
                })
                .or_insert((value, value, act));
        }
        let members: Vec<usize> = acc.keys().copied().collect();
        let values = acc
            .values()
            .map(|&(max, min, _)| match (kind, v.is_belief(), lambda) {
                (VarKind::Decision, _, _) | (_, true, _) => max,
                (VarKind::Random, false, Some(l)) => l.blend(max, min),
                (VarKind::Random, false, None) => unreachable!("checked above"),
            })
            .collect();
        let argmax = (kind == VarKind::Decision).then(|| acc.values().map(|a| a.2).collect());
        out.push(FocalContribution {
            source,
            projected: ConfigSet::from_sorted(target.clone(), members),
            values,
            argmax,
        });
    }
    Ok(out)
}

/// Eliminate `var` from `v`.
///
/// Belief functions are marginalized by summing the masses of focal
/// elements with equal projections, whatever the kind of `var`. When `var`
/// is a decision variable the maximizing acts are returned as a
/// [`SolutionTable`]; ties go to the act declared first.
pub fn marginalize(v: &Valuation, var: VarId, kind: VarKind, lambda: Option<Lambda>) -> Result<Marginal> {
    let contributions = focal_contributions(v, var, kind, lambda)?;
    let target = v.domain().without(var);
    let solution = (kind == VarKind::Decision).then(|| solution_table(v, var, &target, &contributions));
    let valuation = Valuation::from_parts(
        target,
        v.is_belief(),
        contributions
            .into_iter()
            .map(|c| (c.projected.indices().to_vec(), c.values)),
    );
    Ok(Marginal { valuation, solution })
}

fn solution_table(
    v: &Valuation,
    var: VarId,
    target: &Domain,
    contributions: &[FocalContribution],
) -> SolutionTable {
    let domain = v.domain();
    let projector = Projector::new(domain, target).expect("target is a subdomain");
    let acts = domain.size_of(var).unwrap();

    let mut preferred: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for c in contributions {
        let argmax = c.argmax.as_ref().expect("decision contributions carry argmax");
        for (&x, &act) in c.projected.indices().iter().zip(argmax) {
            preferred.entry(x).or_default().push(act);
        }
    }

    let mut choices = BTreeMap::new();
    let mut conflicts = Vec::new();
    let mut sums: Option<BTreeMap<usize, Vec<Option<f64>>>> = None;
    for (&x, prefs) in &preferred {
        if prefs.iter().all(|&a| a == prefs[0]) {
            choices.insert(x, prefs[0]);
            continue;
        }
        conflicts.push(x);
        let sums = sums.get_or_insert_with(|| {
            let mut sums: BTreeMap<usize, Vec<Option<f64>>> = BTreeMap::new();
            for focal in v.focals() {
                for (y, value) in focal.iter() {
                    let act = domain.value_at(y, var).unwrap();
                    let slot = &mut sums.entry(projector.apply(y)).or_insert_with(|| vec![None; acts])[act];
                    *slot = Some(slot.unwrap_or(0.0) + value);
                }
            }
            sums
        });
        let mut best: Option<(usize, f64)> = None;
        for (act, total) in sums[&x].iter().enumerate() {
            if let Some(total) = *total {
                if best.is_none_or(|(_, b)| total > b) {
                    best = Some((act, total));
                }
            }
        }
        choices.insert(x, best.unwrap().0);
    }
    SolutionTable {
        decision: var,
        context: target.clone(),
        choices,
        conflicts,
    }
}

/// Marginalize a belief function by summing the masses of focal elements
/// with equal projections.
pub fn marginalize_belief(v: &Valuation, var: VarId) -> Result<Valuation> {
    if !v.is_belief() {
        return Err(Error::KindMismatch { expected: "belief" });
    }
    if !v.domain().contains(var) {
        return Err(Error::DomainMismatch(format!(
            "variable #{} is not in the valuation's domain",
            var.0
        )));
    }
    let target = v.domain().without(var);
    let projected = v
        .focals()
        .iter()
        .map(|f| {
            let set = f.support().project(&target)?;
            let n = set.len();
            Ok((set.indices().to_vec(), vec![f.mass(); n]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Valuation::from_parts(target, true, projected))
}
