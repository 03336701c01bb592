//! Decision networks: variables, utility valuations, conditional belief
//! potentials and precedence arcs, with well-definedness checks and the
//! elimination order used by the fusion algorithm.

use std::collections::VecDeque;
use std::fmt;

use crate::calculus::{combine, marginalize_belief};
use crate::error::{Error, Result};
use crate::model::{VarId, VarKind, Variables};
use crate::valuation::{is_conditional, ConditionalPotential, Valuation, ValuationKind, MASS_TOLERANCE};

#[derive(Clone, Debug, PartialEq)]
pub struct Utility {
    label: String,
    valuation: Valuation,
}

impl Utility {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Network {
    variables: Variables,
    utilities: Vec<Utility>,
    potentials: Vec<ConditionalPotential>,
    arcs: Vec<(VarId, VarId)>,
}

impl Network {
    pub fn new(variables: Variables) -> Self {
        Network {
            variables,
            ..Default::default()
        }
    }

    pub fn variables(&self) -> &Variables {
        &self.variables
    }

    pub fn utilities(&self) -> &[Utility] {
        &self.utilities
    }

    pub fn potentials(&self) -> &[ConditionalPotential] {
        &self.potentials
    }

    pub fn arcs(&self) -> &[(VarId, VarId)] {
        &self.arcs
    }

    pub fn decisions(&self) -> Vec<VarId> {
        self.variables.of_kind(VarKind::Decision).collect()
    }

    pub fn randoms(&self) -> Vec<VarId> {
        self.variables.of_kind(VarKind::Random).collect()
    }

    fn check_var(&self, id: VarId) -> Result<()> {
        if id.0 >= self.variables.len() {
            return Err(Error::UnknownVariable(format!("#{}", id.0)));
        }
        Ok(())
    }

    fn check_domain(&self, v: &Valuation) -> Result<()> {
        for (&id, &size) in v.domain().vars().iter().zip(v.domain().sizes()) {
            self.check_var(id)?;
            if self.variables.get(id).size() != size {
                return Err(Error::DomainMismatch(format!(
                    "frame size of '{}' differs from its declaration",
                    self.variables.name(id)
                )));
            }
        }
        Ok(())
    }

    fn label_taken(&self, label: &str) -> bool {
        self.utilities.iter().any(|u| u.label == label)
            || self.potentials.iter().any(|p| p.label() == label)
    }

    /// Add a precedence arc `from → to` (`from` comes first in time).
    pub fn add_arc(&mut self, from: VarId, to: VarId) -> Result<()> {
        self.check_var(from)?;
        self.check_var(to)?;
        if self.arcs.contains(&(from, to)) {
            return Err(Error::Duplicate(format!(
                "arc {} -> {}",
                self.variables.name(from),
                self.variables.name(to)
            )));
        }
        self.arcs.push((from, to));
        Ok(())
    }

    pub fn remove_arc(&mut self, from: VarId, to: VarId) -> bool {
        let before = self.arcs.len();
        self.arcs.retain(|&a| a != (from, to));
        self.arcs.len() != before
    }

    pub fn add_utility(&mut self, label: impl Into<String>, valuation: Valuation) -> Result<()> {
        let label = label.into();
        if valuation.kind() != ValuationKind::Utility {
            return Err(Error::KindMismatch { expected: "utility" });
        }
        self.check_domain(&valuation)?;
        if self.label_taken(&label) {
            return Err(Error::Duplicate(format!("valuation label '{label}'")));
        }
        self.utilities.push(Utility { label, valuation });
        Ok(())
    }

    pub fn add_potential(&mut self, potential: ConditionalPotential) -> Result<()> {
        self.check_domain(potential.ballooned())?;
        if self.label_taken(potential.label()) {
            return Err(Error::Duplicate(format!("valuation label '{}'", potential.label())));
        }
        self.potentials.push(potential);
        Ok(())
    }

    pub fn potential_for(&self, head: VarId) -> Option<&ConditionalPotential> {
        self.potentials.iter().find(|p| p.head() == head)
    }

    pub fn precedence(&self) -> Precedence {
        Precedence::new(self.variables.len(), &self.arcs)
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_with(ValidateOptions::default())
    }

    pub fn validate_with(&self, options: ValidateOptions) -> ValidationReport {
        let mut report = ValidationReport::default();
        let vars = &self.variables;
        let name = |id: VarId| vars.name(id).to_string();
        let prec = self.precedence();
        let decisions = self.decisions();
        let randoms = self.randoms();

        for &d in &decisions {
            if !self.utilities.iter().any(|u| u.valuation.domain().contains(d)) {
                report.push(Condition::A, format!("decision {} is not in any utility valuation", name(d)));
            }
        }
        for &r in &randoms {
            if !self.potentials.iter().any(|p| p.domain().contains(r)) {
                report.push(Condition::B, format!("random {} is not in any potential", name(r)));
            }
        }

        for id in vars.ids() {
            if prec.greater(id, id) {
                report.push(Condition::P1, format!("precedence cycle through {}", name(id)));
            }
        }

        for &d in &decisions {
            for &r in &randoms {
                if !prec.comparable(d, r) {
                    report.push(
                        Condition::P2,
                        format!("decision {} and random {} are not ordered", name(d), name(r)),
                    );
                }
            }
        }

        for p in &self.potentials {
            let head = p.head();
            for &v in p.parents().vars() {
                if vars.kind(v) == VarKind::Decision && !prec.greater(v, head) {
                    report.push(
                        Condition::P3,
                        format!(
                            "potential {} for {} depends on decision {} which does not precede it",
                            p.label(),
                            name(head),
                            name(v)
                        ),
                    );
                }
            }
            let domain = p.domain().vars();
            for &v in domain {
                if vars.kind(v) != VarKind::Decision {
                    continue;
                }
                let precedes_some = domain
                    .iter()
                    .any(|&r| vars.kind(r) == VarKind::Random && prec.greater(v, r));
                if !precedes_some {
                    report.push(
                        Condition::P4,
                        format!(
                            "decision {} in potential {} precedes no random variable of it",
                            name(v),
                            p.label()
                        ),
                    );
                }
            }
        }

        if !decisions.is_empty() {
            for (i, &r1) in randoms.iter().enumerate() {
                for &r2 in &randoms[i + 1..] {
                    let separated = decisions.iter().any(|&d| {
                        (prec.greater(r1, d) && prec.greater(d, r2))
                            || (prec.greater(r2, d) && prec.greater(d, r1))
                    });
                    if !separated {
                        report.push(
                            Condition::P5,
                            format!("no decision lies between random {} and random {}", name(r1), name(r2)),
                        );
                    }
                }
            }
        }

        for p in &self.potentials {
            if vars.kind(p.head()) != VarKind::Random {
                report.push(
                    Condition::Assumption1,
                    format!("potential {} is for decision {}", p.label(), name(p.head())),
                );
            }
            for &parent in p.parents().vars() {
                if !prec.greater(parent, p.head()) {
                    report.push(
                        Condition::Assumption1,
                        format!(
                            "parent {} of potential {} does not precede {}",
                            name(parent),
                            p.label(),
                            name(p.head())
                        ),
                    );
                }
            }
        }
        for &r in &randoms {
            let count = self.potentials.iter().filter(|p| p.head() == r).count();
            if count != 1 {
                report.push(
                    Condition::Assumption1,
                    format!("random {} has {count} conditional potentials, expected 1", name(r)),
                );
            }
        }

        for p in &self.potentials {
            if !matches!(is_conditional(p.ballooned(), p.head()), Ok(true)) {
                report.push(
                    Condition::D,
                    format!("potential {} is not vacuous on its parents", p.label()),
                );
            }
        }
        if options.joint_check {
            if let Err(message) = self.joint_vacuity() {
                report.push(Condition::D, message);
            }
        }
        report
    }

    /// Combine every potential and check that its marginal on the decision
    /// variables it mentions is vacuous.
    fn joint_vacuity(&self) -> std::result::Result<(), String> {
        let Some(first) = self.potentials.first() else {
            return Ok(());
        };
        let mut joint = first.ballooned().clone();
        for p in &self.potentials[1..] {
            joint = combine(&joint, p.ballooned()).map_err(|e| format!("joint potential: {e}"))?;
        }
        let others: Vec<VarId> = joint
            .domain()
            .vars()
            .iter()
            .copied()
            .filter(|&v| self.variables.kind(v) == VarKind::Random)
            .collect();
        if others.len() == joint.domain().len() {
            return Ok(());
        }
        for v in others {
            joint = marginalize_belief(&joint, v).map_err(|e| e.to_string())?;
        }
        match joint.focals() {
            [only] if only.support().is_full() && (only.mass() - 1.0).abs() <= MASS_TOLERANCE => Ok(()),
            _ => Err(format!(
                "joint potential is not vacuous on decisions {}",
                self.variables.format_domain(joint.domain())
            )),
        }
    }

    /// Variables in deletion order: each is minimal among those not yet
    /// deleted; ties go to the variable declared first.
    pub fn elimination_order(&self) -> Result<EliminationOrder> {
        let prec = self.precedence();
        let mut remaining: Vec<VarId> = self.variables.ids().collect();
        let mut sequence = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let pick = remaining
                .iter()
                .position(|&x| !remaining.iter().any(|&y| prec.greater(x, y)));
            match pick {
                Some(i) => sequence.push(remaining.remove(i)),
                None => return Err(Error::Cycle(self.variables.name(remaining[0]).to_string())),
            }
        }
        Ok(EliminationOrder { sequence })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ValidateOptions {
    /// Also materialize the joint potential for condition d.
    pub joint_check: bool,
}

/// Transitive closure `>` of the precedence arcs: `x > y` when there is a
/// path of arcs from `x` to `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Precedence {
    closure: Vec<Vec<bool>>,
}

impl Precedence {
    pub fn new(n: usize, arcs: &[(VarId, VarId)]) -> Self {
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in arcs {
            succ[a.0].push(b.0);
        }
        let mut closure = vec![vec![false; n]; n];
        for (start, row) in closure.iter_mut().enumerate() {
            let mut queue: VecDeque<usize> = succ[start].iter().copied().collect();
            while let Some(v) = queue.pop_front() {
                if !row[v] {
                    row[v] = true;
                    queue.extend(succ[v].iter().copied());
                }
            }
        }
        Precedence { closure }
    }

    pub fn greater(&self, x: VarId, y: VarId) -> bool {
        self.closure[x.0][y.0]
    }

    pub fn comparable(&self, x: VarId, y: VarId) -> bool {
        self.greater(x, y) || self.greater(y, x)
    }

    pub fn len(&self) -> usize {
        self.closure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closure.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationOrder {
    sequence: Vec<VarId>,
}

impl EliminationOrder {
    pub fn as_slice(&self) -> &[VarId] {
        &self.sequence
    }

    pub fn position(&self, var: VarId) -> Option<usize> {
        self.sequence.iter().position(|&v| v == var)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    A,
    B,
    P1,
    P2,
    P3,
    P4,
    P5,
    Assumption1,
    D,
}

impl Condition {
    pub fn id(&self) -> &'static str {
        match self {
            Condition::A => "a",
            Condition::B => "b",
            Condition::P1 => "p1",
            Condition::P2 => "p2",
            Condition::P3 => "p3",
            Condition::P4 => "p4",
            Condition::P5 => "p5",
            Condition::Assumption1 => "assumption1",
            Condition::D => "d",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub condition: Condition,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error {} {}", self.condition, self.message)
    }
}

/// Failed well-definedness conditions; empty means well-defined.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    findings: Vec<Finding>,
}

impl ValidationReport {
    fn push(&mut self, condition: Condition, message: String) {
        self.findings.push(Finding { condition, message });
    }

    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn findings(&self) -> &[Finding] {
        &self.findings
    }

    pub fn has(&self, condition: Condition) -> bool {
        self.findings.iter().any(|f| f.condition == condition)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            writeln!(f, "{finding}")?;
        }
        Ok(())
    }
}
