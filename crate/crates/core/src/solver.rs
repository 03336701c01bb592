//! The fusion algorithm and what is built around it: expected values,
//! solution tables and strategies, a joint-combination oracle, expected
//! utility intervals, λ sweeps and belief propagation.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::calculus::{
    combine, combine_all, combine_pool, focal_contributions, marginalize, FocalContribution, Lambda,
    SolutionTable,
};
use crate::error::{Error, Result};
use crate::model::{Configuration, Domain, Projector, VarId, VarKind, Variables};
use crate::network::{EliminationOrder, Network};
use crate::valuation::Valuation;

/// Joint frames larger than this are refused by the oracle.
pub const ORACLE_LIMIT: u128 = 1_000_000;

/// Relative tolerance for comparing expected values.
pub const VALUE_TOLERANCE: f64 = 1e-9;

/// A valuation in the fusion pool, with the expression that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Labeled {
    pub label: String,
    pub valuation: Valuation,
}

impl Labeled {
    pub fn new(label: impl Into<String>, valuation: Valuation) -> Self {
        Labeled {
            label: label.into(),
            valuation,
        }
    }
}

/// One variable deletion of the fusion algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionStep {
    pub variable: VarId,
    pub kind: VarKind,
    /// Valuations whose domain contains the variable, utilities first.
    pub consumed: Vec<Labeled>,
    pub combined: Labeled,
    pub contributions: Vec<FocalContribution>,
    pub result: Labeled,
    pub solution: Option<SolutionTable>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fused {
    pub pool: Vec<Labeled>,
    pub step: FusionStep,
}

fn wrap(label: &str) -> String {
    let mut depth = 0i32;
    let compound = label.chars().any(|c| {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        c == ' ' && depth == 0
    });
    if compound {
        format!("({label})")
    } else {
        label.to_string()
    }
}

/// Delete `var` from the pool: combine the valuations that mention it and
/// marginalize the combination. Untouched valuations pass through.
pub fn fuse(vars: &Variables, pool: Vec<Labeled>, var: VarId, lambda: Option<Lambda>) -> Result<Fused> {
    let (touched, mut rest): (Vec<Labeled>, Vec<Labeled>) =
        pool.into_iter().partition(|l| l.valuation.domain().contains(var));
    if touched.is_empty() {
        return Err(Error::Precondition(format!(
            "no valuation mentions '{}'",
            vars.name(var)
        )));
    }
    let (beliefs, utilities): (Vec<Labeled>, Vec<Labeled>) =
        touched.into_iter().partition(|l| l.valuation.is_belief());
    let consumed: Vec<Labeled> = utilities.into_iter().chain(beliefs).collect();

    let label = consumed
        .iter()
        .map(|l| wrap(&l.label))
        .collect::<Vec<_>>()
        .join(" ⊗ ");
    let combined = combine_pool(consumed.iter().map(|l| &l.valuation))?;
    let kind = vars.kind(var);
    let contributions = focal_contributions(&combined, var, kind, lambda)?;
    let marginal = marginalize(&combined, var, kind, lambda)?;
    let target = combined.domain().without(var);
    let result_label = if target.is_empty() {
        format!("{}↓∅", wrap(&label))
    } else {
        format!("{}↓{}", wrap(&label), vars.format_domain(&target))
    };
    let result = Labeled::new(result_label, marginal.valuation);
    rest.push(result.clone());
    Ok(Fused {
        pool: rest,
        step: FusionStep {
            variable: var,
            kind,
            consumed,
            combined: Labeled::new(label, combined),
            contributions,
            result,
            solution: marginal.solution,
        },
    })
}

/// How a decision variable is resolved as a function of random variables
/// that precede it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionRule {
    pub decision: VarId,
    /// Random variables the act depends on.
    pub domain: Domain,
    /// Act index per configuration index of `domain`.
    pub acts: BTreeMap<usize, usize>,
}

impl DecisionRule {
    pub fn act_at(&self, index: usize) -> Option<usize> {
        self.acts.get(&index).copied()
    }

    /// Act for any configuration whose domain contains the rule's domain.
    pub fn act_for(&self, config: &Configuration) -> Option<usize> {
        let projected = config.project(&self.domain).ok()?;
        self.act_at(projected.index())
    }
}

/// One decision rule per decision variable, earliest decision first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Strategy {
    rules: Vec<DecisionRule>,
}

impl Strategy {
    pub fn rules(&self) -> &[DecisionRule] {
        &self.rules
    }

    pub fn rule(&self, decision: VarId) -> Option<&DecisionRule> {
        self.rules.iter().find(|r| r.decision == decision)
    }
}

/// Turn solution tables into decision rules over random variables only.
///
/// A solution table's context may mention decisions deleted later; those
/// are replaced by their own rules, latest-deleted first.
pub fn assemble_strategy(vars: &Variables, solutions: &[SolutionTable]) -> Result<Strategy> {
    let mut rules: Vec<DecisionRule> = Vec::new();
    for table in solutions.iter().rev() {
        let context = table.context();
        let mut dom_vars: Vec<VarId> = Vec::new();
        for &v in context.vars() {
            match vars.kind(v) {
                VarKind::Random => dom_vars.push(v),
                VarKind::Decision => {
                    let rule = rules.iter().find(|r| r.decision == v).ok_or_else(|| {
                        Error::Precondition(format!(
                            "decision '{}' in the context of '{}' has no rule",
                            vars.name(v),
                            vars.name(table.decision())
                        ))
                    })?;
                    dom_vars.extend(rule.domain.vars().iter().copied());
                }
            }
        }
        let domain = vars.domain(dom_vars)?;
        let random_part: Vec<VarId> =
            context.vars().iter().copied().filter(|&v| vars.kind(v) == VarKind::Random).collect();
        let embed = Projector::embedding(&domain, context, &random_part)?;
        let inner: Vec<(Projector, Projector, &DecisionRule)> = context
            .vars()
            .iter()
            .filter(|&&v| vars.kind(v) == VarKind::Decision)
            .map(|&v| {
                let rule = rules.iter().find(|r| r.decision == v).unwrap();
                let to_rule = Projector::new(&domain, &rule.domain)?;
                let single = vars.domain([v])?;
                let place = Projector::embedding(&single, context, &[v])?;
                Ok((to_rule, place, rule))
            })
            .collect::<Result<_>>()?;

        // Configurations the earlier rules never reach fall back to the
        // first context entry that agrees on the random variables.
        let mut fallback: BTreeMap<usize, usize> = BTreeMap::new();
        let to_random = Projector::new(context, &vars.domain(random_part.iter().copied())?)?;
        let from_random = Projector::new(&domain, &vars.domain(random_part.iter().copied())?)?;
        for (x, act) in table.iter() {
            fallback.entry(to_random.apply(x)).or_insert(act);
        }
        let mut acts = BTreeMap::new();
        for s in 0..domain.frame_size() {
            let mut ctx = Some(embed.apply(s));
            for (to_rule, place, rule) in &inner {
                ctx = match (ctx, rule.act_at(to_rule.apply(s))) {
                    (Some(c), Some(act)) => Some(c + place.apply(act)),
                    _ => None,
                };
            }
            let act = ctx
                .and_then(|c| table.choice_at(c))
                .or_else(|| fallback.get(&from_random.apply(s)).copied());
            if let Some(act) = act {
                acts.insert(s, act);
            }
        }
        rules.push(DecisionRule {
            decision: table.decision(),
            domain,
            acts,
        });
    }
    Ok(Strategy { rules })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub lambda: Lambda,
    pub expected_value: f64,
    /// Solution tables in deletion order.
    pub solutions: Vec<SolutionTable>,
    pub strategy: Strategy,
    pub order: EliminationOrder,
    pub trace: Option<Vec<FusionStep>>,
}

impl SolveResult {
    pub fn solution(&self, decision: VarId) -> Option<&SolutionTable> {
        self.solutions.iter().find(|s| s.decision() == decision)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    pub trace: bool,
}

fn require_well_defined(net: &Network) -> Result<()> {
    let report = net.validate();
    if report.is_empty() {
        return Ok(());
    }
    let first = &report.findings()[0];
    Err(Error::NotWellDefined(format!(
        "{} finding(s), first: {} {}",
        report.findings().len(),
        first.condition,
        first.message
    )))
}

fn initial_pool(net: &Network) -> Vec<Labeled> {
    net.utilities()
        .iter()
        .map(|u| Labeled::new(u.label(), u.valuation().clone()))
        .chain(
            net.potentials()
                .iter()
                .map(|p| Labeled::new(p.label(), p.ballooned().clone())),
        )
        .collect()
}

fn final_value(pool: &[Labeled]) -> Result<f64> {
    let combined = combine_pool(pool.iter().map(|l| &l.valuation))?;
    combined
        .empty_value()
        .ok_or_else(|| Error::Precondition("valuations left after deleting every variable".into()))
}

pub fn solve(net: &Network, lambda: Lambda) -> Result<SolveResult> {
    solve_with(net, lambda, SolveOptions::default())
}

/// Maximum expected value by successive fusion along the elimination order.
pub fn solve_with(net: &Network, lambda: Lambda, options: SolveOptions) -> Result<SolveResult> {
    require_well_defined(net)?;
    let order = net.elimination_order()?;
    let vars = net.variables();
    let mut pool = initial_pool(net);
    let mut solutions = Vec::new();
    let mut trace = options.trace.then(Vec::new);
    for &var in order.as_slice() {
        if !pool.iter().any(|l| l.valuation.domain().contains(var)) {
            continue;
        }
        let fused = fuse(vars, pool, var, Some(lambda))?;
        pool = fused.pool;
        if let Some(table) = &fused.step.solution {
            solutions.push(table.clone());
        }
        if let Some(trace) = trace.as_mut() {
            trace.push(fused.step);
        }
    }
    let expected_value = final_value(&pool)?;
    let strategy = assemble_strategy(vars, &solutions)?;
    Ok(SolveResult {
        lambda,
        expected_value,
        solutions,
        strategy,
        order,
        trace,
    })
}

fn joint_valuation(net: &Network) -> Result<Valuation> {
    let universe = net.variables().universe()?;
    if universe.frame_size() as u128 > ORACLE_LIMIT {
        return Err(Error::TooLarge(universe.frame_size() as u128, ORACLE_LIMIT));
    }
    let utilities: Vec<Valuation> = net.utilities().iter().map(|u| u.valuation().clone()).collect();
    let beliefs: Vec<Valuation> = net.potentials().iter().map(|p| p.ballooned().clone()).collect();
    combine_all(&utilities, &beliefs)
}

/// Combine every valuation into one joint valuation, then delete the
/// variables one at a time in the same order as [`solve`].
pub fn oracle_solve(net: &Network, lambda: Lambda) -> Result<SolveResult> {
    require_well_defined(net)?;
    let order = net.elimination_order()?;
    let vars = net.variables();
    let mut joint = joint_valuation(net)?;
    let mut solutions = Vec::new();
    for &var in order.as_slice() {
        if !joint.domain().contains(var) {
            continue;
        }
        let m = marginalize(&joint, var, vars.kind(var), Some(lambda))?;
        joint = m.valuation;
        solutions.extend(m.solution);
    }
    let expected_value = joint
        .empty_value()
        .ok_or_else(|| Error::Precondition("joint valuation not fully marginalized".into()))?;
    let strategy = assemble_strategy(vars, &solutions)?;
    Ok(SolveResult {
        lambda,
        expected_value,
        solutions,
        strategy,
        order,
        trace: None,
    })
}

/// Expected value of following `strategy`: the joint valuation is
/// marginalized as in [`oracle_solve`], except that each decision is fixed
/// to the act its rule prescribes instead of maximized.
pub fn evaluate_strategy(net: &Network, strategy: &Strategy, lambda: Lambda) -> Result<f64> {
    require_well_defined(net)?;
    let order = net.elimination_order()?;
    let vars = net.variables();
    let mut joint = joint_valuation(net)?;
    for &var in order.as_slice() {
        if !joint.domain().contains(var) {
            continue;
        }
        joint = match vars.kind(var) {
            VarKind::Random => marginalize(&joint, var, VarKind::Random, Some(lambda))?.valuation,
            VarKind::Decision => {
                let rule = strategy.rule(var).ok_or_else(|| {
                    Error::Precondition(format!("strategy has no rule for '{}'", vars.name(var)))
                })?;
                apply_rule(&joint, var, rule)?
            }
        };
    }
    joint
        .empty_value()
        .ok_or_else(|| Error::Precondition("joint valuation not fully marginalized".into()))
}

fn apply_rule(v: &Valuation, var: VarId, rule: &DecisionRule) -> Result<Valuation> {
    let domain = v.domain();
    let target = domain.without(var);
    let to_target = Projector::new(domain, &target)?;
    let to_rule = Projector::new(domain, &rule.domain)?;
    let mut parts = Vec::new();
    for focal in v.focals() {
        let mut kept = Vec::new();
        for (y, value) in focal.iter() {
            let act = rule.act_at(to_rule.apply(y)).ok_or_else(|| {
                Error::Precondition("strategy does not cover every configuration".into())
            })?;
            if domain.value_at(y, var) == Some(act) {
                kept.push((to_target.apply(y), value));
            }
        }
        if !kept.is_empty() {
            kept.sort_by_key(|&(x, _)| x);
            parts.push(kept.into_iter().unzip());
        }
    }
    Ok(Valuation::from_parts(target, v.is_belief(), parts))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActInterval {
    pub act: usize,
    pub lower: f64,
    pub upper: f64,
}

/// Lower and upper expected utility of each act of a canonical problem.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityInterval {
    pub decision: VarId,
    pub acts: Vec<ActInterval>,
}

/// Expected utility interval per act for a problem with one decision `D`,
/// one random `R`, one utility over `{D, R}` and one conditional potential
/// for `R`.
pub fn expected_interval(net: &Network) -> Result<UtilityInterval> {
    let decisions = net.decisions();
    let randoms = net.randoms();
    let (&[d], &[r]) = (decisions.as_slice(), randoms.as_slice()) else {
        return Err(Error::NotCanonical(
            "expected exactly one decision and one random variable".into(),
        ));
    };
    let [utility] = net.utilities() else {
        return Err(Error::NotCanonical("expected exactly one utility valuation".into()));
    };
    let [potential] = net.potentials() else {
        return Err(Error::NotCanonical("expected exactly one potential".into()));
    };
    if utility.valuation().domain().vars() != net.variables().domain([d, r])?.vars() {
        return Err(Error::NotCanonical("the utility must be over the decision and the random variable".into()));
    }
    if potential.head() != r || potential.parents().vars().iter().any(|&p| p != d) {
        return Err(Error::NotCanonical("the potential must be for the random variable given the decision".into()));
    }
    let combined = combine(utility.valuation(), potential.ballooned())?;
    let domain = combined.domain();
    let acts = domain.size_of(d).unwrap();
    let mut bounds: Vec<ActInterval> = (0..acts)
        .map(|act| ActInterval {
            act,
            lower: 0.0,
            upper: 0.0,
        })
        .collect();
    for focal in combined.focals() {
        let mut extremes: Vec<Option<(f64, f64)>> = vec![None; acts];
        for (y, value) in focal.iter() {
            let act = domain.value_at(y, d).unwrap();
            let e = extremes[act].get_or_insert((value, value));
            e.0 = e.0.min(value);
            e.1 = e.1.max(value);
        }
        for (b, e) in bounds.iter_mut().zip(extremes) {
            if let Some((min, max)) = e {
                b.lower += min;
                b.upper += max;
            }
        }
    }
    Ok(UtilityInterval { decision: d, acts: bounds })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub lambda: Lambda,
    pub expected_value: f64,
    pub strategy: Strategy,
}

pub fn values_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Solve once per λ. The grid is sorted and deduplicated; grid points are
/// solved in parallel. Fails if the expected value ever decreases with λ.
pub fn lambda_sweep(net: &Network, grid: &[Lambda]) -> Result<Vec<SweepPoint>> {
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| a.value().total_cmp(&b.value()));
    grid.dedup();
    let points = grid
        .par_iter()
        .map(|&lambda| {
            solve(net, lambda).map(|r| SweepPoint {
                lambda,
                expected_value: r.expected_value,
                strategy: r.strategy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for w in points.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        if hi.expected_value < lo.expected_value && !values_close(hi.expected_value, lo.expected_value, VALUE_TOLERANCE) {
            return Err(Error::NonMonotone {
                low: lo.lambda.value(),
                low_value: lo.expected_value,
                high: hi.lambda.value(),
                high_value: hi.expected_value,
            });
        }
    }
    Ok(points)
}

/// Solve a network whose potentials are all probabilities. The result must
/// not depend on λ; this is checked by also solving at λ = 0 and λ = 1.
pub fn bayesian_check(net: &Network, lambda: Lambda) -> Result<SolveResult> {
    if let Some(p) = net.potentials().iter().find(|p| !p.is_probabilistic()) {
        return Err(Error::Precondition(format!(
            "potential '{}' has a non-singleton focal element",
            p.label()
        )));
    }
    let result = solve(net, lambda)?;
    let low = solve(net, Lambda::PESSIMISTIC)?.expected_value;
    let high = solve(net, Lambda::OPTIMISTIC)?.expected_value;
    if !values_close(low, high, VALUE_TOLERANCE) {
        return Err(Error::Precondition(format!(
            "expected value depends on lambda ({low} at 0, {high} at 1)"
        )));
    }
    Ok(result)
}

/// Marginal belief function of `target` in a network without decisions
/// or utilities, by fusion with mass-summing marginalization.
pub fn propagate(net: &Network, target: VarId) -> Result<Valuation> {
    if !net.decisions().is_empty() || !net.utilities().is_empty() {
        return Err(Error::Precondition(
            "marginals need a network without decision variables or utilities".into(),
        ));
    }
    if target.0 >= net.variables().len() {
        return Err(Error::UnknownVariable(format!("#{}", target.0)));
    }
    require_well_defined(net)?;
    let vars = net.variables();
    let order = net.elimination_order()?;
    let mut pool = initial_pool(net);
    for &var in order.as_slice() {
        if var == target || !pool.iter().any(|l| l.valuation.domain().contains(var)) {
            continue;
        }
        pool = fuse(vars, pool, var, None)?.pool;
    }
    combine_pool(pool.iter().map(|l| &l.valuation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConfigSet, Variable};
    use crate::valuation::{make_bpa, utility_from_values, ConditionalPotential};

    fn frame(labels: &[&str]) -> Vec<String> {
        labels.iter().map(|s| s.to_string()).collect()
    }

    /// One decision with three acts and a utility on it.
    fn decision_only() -> Network {
        let mut vars = Variables::new();
        vars.declare(Variable::new("D", VarKind::Decision, frame(&["a", "b", "c"])).unwrap())
            .unwrap();
        let mut net = Network::new(vars);
        let dom = net.variables().domain([VarId(0)]).unwrap();
        net.add_utility("u", utility_from_values(&dom, vec![1.0, 7.0, 3.0]).unwrap()).unwrap();
        net
    }

    #[test]
    fn decision_only_network_maximizes() {
        let net = decision_only();
        let r = solve(&net, Lambda::new(0.5).unwrap()).unwrap();
        assert_eq!(r.expected_value, 7.0);
        assert_eq!(r.solutions[0].choice_at(0), Some(1));
        assert_eq!(r.strategy.rule(VarId(0)).unwrap().act_at(0), Some(1));
        let o = oracle_solve(&net, Lambda::new(0.5).unwrap()).unwrap();
        assert_eq!(o.expected_value, 7.0);
    }

    #[test]
    fn fuse_with_single_valuation_is_marginalization() {
        let net = decision_only();
        let pool = initial_pool(&net);
        let fused = fuse(net.variables(), pool, VarId(0), None).unwrap();
        assert_eq!(fused.pool.len(), 1);
        assert_eq!(fused.pool[0].valuation.empty_value(), Some(7.0));
        assert_eq!(fused.pool[0].label, "u↓∅");
        assert_eq!(fused.step.consumed.len(), 1);
    }

    /// D → R with a utility on {D, R}: the smallest canonical problem.
    fn canonical(masses: [(&[&str], f64); 2]) -> Network {
        let mut vars = Variables::new();
        let d = vars.declare(Variable::new("D", VarKind::Decision, frame(&["go", "stay"])).unwrap()).unwrap();
        let r = vars.declare(Variable::new("R", VarKind::Random, frame(&["lo", "hi"])).unwrap()).unwrap();
        let mut net = Network::new(vars.clone());
        net.add_arc(d, r).unwrap();
        let dr = vars.domain([d, r]).unwrap();
        net.add_utility("u", utility_from_values(&dr, vec![-10.0, 30.0, 0.0, 0.0]).unwrap()).unwrap();
        let hd = vars.domain([r]).unwrap();
        let table = make_bpa(
            &hd,
            masses.iter().map(|(labels, m)| {
                let rows: Vec<&[&str]> = labels.iter().map(std::slice::from_ref).collect();
                (vars.config_set(&["R"], &rows).unwrap(), *m)
            }),
        )
        .unwrap();
        let parents = vars.domain([d]).unwrap();
        net.add_potential(ConditionalPotential::new("p", r, parents, vec![table; 2]).unwrap())
            .unwrap();
        net
    }

    #[test]
    fn canonical_interval_matches_lambda_endpoints() {
        let net = canonical([(&["lo"], 0.25), (&["lo", "hi"], 0.75)]);
        let interval = expected_interval(&net).unwrap();
        // go: 0.25·(-10) + 0.75·[-10, 30]
        assert!((interval.acts[0].lower - (-10.0)).abs() < 1e-12);
        assert!((interval.acts[0].upper - 20.0).abs() < 1e-12);
        assert_eq!((interval.acts[1].lower, interval.acts[1].upper), (0.0, 0.0));
        let low = solve(&net, Lambda::PESSIMISTIC).unwrap().expected_value;
        let high = solve(&net, Lambda::OPTIMISTIC).unwrap().expected_value;
        assert!((low - 0.0).abs() < 1e-12);
        assert!((high - 20.0).abs() < 1e-12);
    }

    #[test]
    fn non_canonical_problem_is_rejected() {
        assert!(matches!(expected_interval(&decision_only()), Err(Error::NotCanonical(_))));
    }

    #[test]
    fn sweep_sorts_and_deduplicates() {
        let net = canonical([(&["lo"], 0.25), (&["lo", "hi"], 0.75)]);
        let grid: Vec<Lambda> = [1.0, 0.0, 0.5, 0.5].iter().map(|&l| Lambda::new(l).unwrap()).collect();
        let points = lambda_sweep(&net, &grid).unwrap();
        let lambdas: Vec<f64> = points.iter().map(|p| p.lambda.value()).collect();
        assert_eq!(lambdas, [0.0, 0.5, 1.0]);
        assert!((points[1].expected_value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn bayesian_check_needs_singletons() {
        let net = canonical([(&["lo"], 0.25), (&["lo", "hi"], 0.75)]);
        assert!(matches!(bayesian_check(&net, Lambda::OPTIMISTIC), Err(Error::Precondition(_))));
        let net = canonical([(&["lo"], 0.25), (&["hi"], 0.75)]);
        let r = bayesian_check(&net, Lambda::new(0.3).unwrap()).unwrap();
        assert!((r.expected_value - 20.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_probability_is_a_lookup() {
        let net = canonical([(&["hi"], 1.0), (&["lo"], 0.0)]);
        let r = bayesian_check(&net, Lambda::new(0.5).unwrap()).unwrap();
        assert_eq!(r.expected_value, 30.0);
    }

    #[test]
    fn strategy_evaluation_reproduces_value() {
        let net = canonical([(&["lo"], 0.25), (&["lo", "hi"], 0.75)]);
        let lambda = Lambda::new(0.7).unwrap();
        let r = solve(&net, lambda).unwrap();
        let v = evaluate_strategy(&net, &r.strategy, lambda).unwrap();
        assert!((v - r.expected_value).abs() < 1e-12);
    }

    #[test]
    fn invalid_network_is_not_solved() {
        let mut net = canonical([(&["lo"], 1.0), (&["hi"], 0.0)]);
        net.remove_arc(VarId(0), VarId(1));
        assert!(matches!(solve(&net, Lambda::OPTIMISTIC), Err(Error::NotWellDefined(_))));
    }

    #[test]
    fn propagation_needs_belief_only_network() {
        let net = canonical([(&["lo"], 1.0), (&["hi"], 0.0)]);
        assert!(matches!(propagate(&net, VarId(1)), Err(Error::Precondition(_))));

        let mut vars = Variables::new();
        let r = vars.declare(Variable::new("R", VarKind::Random, frame(&["x", "y"])).unwrap()).unwrap();
        let mut net = Network::new(vars.clone());
        let hd = vars.domain([r]).unwrap();
        let only_x = ConfigSet::new(hd.clone(), [0]).unwrap();
        let bpa = make_bpa(&hd, [(only_x.clone(), 0.4), (ConfigSet::full(hd.clone()), 0.6)]).unwrap();
        net.add_potential(ConditionalPotential::new("p", r, Domain::empty(), vec![bpa.clone()]).unwrap())
            .unwrap();
        assert_eq!(propagate(&net, r).unwrap(), bpa);
    }
}
