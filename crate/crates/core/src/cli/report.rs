//! Human-readable and machine-readable output.
//!
//! Human output rounds numbers to 6 significant digits. Machine output is
//! tab-separated with the header
//!
//! ```text
//! record	step	variable	focal	configuration	column	value
//! ```
//!
//! and full-precision numbers. Unused fields hold `-`.

use std::fmt::Write as _;

use crate::calculus::{Lambda, SolutionTable};
use crate::model::{Projector, VarKind, Variables};
use crate::solver::{FusionStep, SolveResult, Strategy, SweepPoint};
use crate::valuation::{Valuation, ValuationKind};

pub const MACHINE_HEADER: &str = "record\tstep\tvariable\tfocal\tconfiguration\tcolumn\tvalue";

/// A number rounded to 6 significant digits, without trailing zeros.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let scale = 10f64.powi(magnitude - 5);
    let rounded = if magnitude > 5 { (x / scale).round() * scale } else { x };
    let mut s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn human(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn machine(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    /// 1-based focal element group in display order.
    pub focal: usize,
    pub configuration: String,
    pub cells: Vec<Option<Cell>>,
}

/// One fusion step laid out as a table: a row per configuration of the
/// combined valuation, grouped by focal element.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceTable {
    pub step: usize,
    pub variable: String,
    pub kind: VarKind,
    pub domain: String,
    pub columns: Vec<String>,
    pub rows: Vec<TraceRow>,
}

/// Index of the focal element of `v` whose support equals the projection
/// of `support`, if there is one.
fn matching_focal(v: &Valuation, support: &crate::model::ConfigSet) -> Option<usize> {
    let projected = support.project(v.domain()).ok()?;
    v.focals().iter().position(|f| f.support() == &projected)
}

pub fn trace_table(vars: &Variables, index: usize, step: &FusionStep) -> TraceTable {
    let combined = &step.combined.valuation;
    let domain = combined.domain();
    let target = domain.without(step.variable);
    let to_target = Projector::new(domain, &target).expect("subdomain");
    let decision = step.kind == VarKind::Decision;

    let mut columns: Vec<String> = step.consumed.iter().map(|l| l.label.clone()).collect();
    // a lone valuation is its own combination
    let combined_col = (step.consumed.len() > 1).then(|| {
        columns.push(step.combined.label.clone());
        columns.len() - 1
    });
    let result_col = columns.len();
    columns.push(step.result.label.clone());
    if decision {
        columns.push(format!("Ψ_{}", vars.name(step.variable)));
    }
    let width = columns.len();

    // Present focal elements in the order of the consumed valuations' own
    // focal elements, so each group lines up with its source.
    let matches: Vec<Vec<Option<usize>>> = combined
        .focals()
        .iter()
        .map(|f| {
            step.consumed
                .iter()
                .map(|l| match l.valuation.kind() {
                    ValuationKind::Utility => Some(0),
                    _ => matching_focal(&l.valuation, f.support()),
                })
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..combined.focals().len()).collect();
    order.sort_by_key(|&i| {
        matches[i]
            .iter()
            .map(|m| m.unwrap_or(usize::MAX))
            .collect::<Vec<_>>()
    });

    let mut rows = Vec::new();
    for (group, &fi) in order.iter().enumerate() {
        let focal = &combined.focals()[fi];
        let contribution = &step.contributions[fi];
        let mut shown = vec![false; contribution.projected.len()];
        for (row_no, (y, value)) in focal.iter().enumerate() {
            let mut cells: Vec<Option<Cell>> = vec![None; width];
            for (c, (l, m)) in step.consumed.iter().zip(&matches[fi]).enumerate() {
                let v = &l.valuation;
                let Some(m) = *m else { continue };
                let f = &v.focals()[m];
                cells[c] = if v.is_belief() {
                    (row_no == 0).then(|| Cell::Num(f.mass()))
                } else {
                    let p = Projector::new(domain, v.domain()).expect("subdomain").apply(y);
                    f.value_at(p).map(Cell::Num)
                };
            }
            if let Some(c) = combined_col {
                cells[c] = Some(Cell::Num(value));
            }

            let x = to_target.apply(y);
            let slot = contribution.projected.position(x).expect("projection is a member");
            let here = match &contribution.argmax {
                Some(acts) if decision => domain.value_at(y, step.variable) == Some(acts[slot]),
                _ => true,
            };
            if here && !shown[slot] {
                shown[slot] = true;
                cells[result_col] = Some(Cell::Num(contribution.values[slot]));
                if let Some(table) = &step.solution {
                    cells[result_col + 1] = table
                        .choice_at(x)
                        .map(|a| Cell::Text(vars.get(step.variable).frame()[a].clone()));
                }
            }
            rows.push(TraceRow {
                focal: group + 1,
                configuration: vars.format_index(domain, y),
                cells,
            });
        }
    }
    TraceTable {
        step: index,
        variable: vars.name(step.variable).to_string(),
        kind: step.kind,
        domain: vars.format_domain(domain),
        columns,
        rows,
    }
}

fn render_grid(out: &mut String, header: &[String], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let numeric: Vec<bool> = (0..widths.len())
        .map(|i| rows.iter().all(|r| r[i].is_empty() || r[i].parse::<f64>().is_ok()))
        .collect();
    let line = |out: &mut String, cells: &[String]| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            let pad = w - c.chars().count();
            if i == 0 || !numeric[i] {
                s.push_str(c);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str(&" ".repeat(pad));
                s.push_str(c);
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(out, header);
    for r in rows {
        line(out, r);
    }
}

pub fn render_trace_human(out: &mut String, t: &TraceTable) {
    let _ = writeln!(out, "step {}: delete {} ({}) from {}", t.step, t.variable, t.kind, t.domain);
    let mut header = vec![format!("c ⊆ W{}", t.domain)];
    header.extend(t.columns.iter().cloned());
    let mut rows = Vec::new();
    let mut last = 0;
    for r in &t.rows {
        if r.focal != last && last != 0 {
            rows.push(vec![String::new(); header.len()]);
        }
        last = r.focal;
        let mut row = vec![r.configuration.clone()];
        row.extend(r.cells.iter().map(|c| c.as_ref().map_or(String::new(), Cell::human)));
        rows.push(row);
    }
    render_grid(out, &header, &rows);
}

pub fn render_trace_machine(out: &mut String, t: &TraceTable) {
    for r in &t.rows {
        for (col, cell) in t.columns.iter().zip(&r.cells) {
            if let Some(cell) = cell {
                let _ = writeln!(
                    out,
                    "trace\t{}\t{}\t{}\t{}\t{}\t{}",
                    t.step,
                    t.variable,
                    r.focal,
                    r.configuration,
                    col,
                    cell.machine()
                );
            }
        }
    }
}

fn act_label(vars: &Variables, table: &SolutionTable, act: usize) -> String {
    vars.get(table.decision()).frame()[act].clone()
}

/// `Ψ_D: re → ~d, ye → ~d`, or `Ψ_T: t` when the context is empty.
pub fn format_solution(vars: &Variables, table: &SolutionTable) -> String {
    let name = vars.name(table.decision());
    if table.context().is_empty() {
        let act = table.choice_at(0).map_or("-".into(), |a| act_label(vars, table, a));
        return format!("Ψ_{name}: {act}");
    }
    let entries: Vec<String> = table
        .iter()
        .map(|(x, a)| format!("{} → {}", vars.format_index(table.context(), x), act_label(vars, table, a)))
        .collect();
    format!("Ψ_{name}: {}", entries.join(", "))
}

pub fn format_strategy(vars: &Variables, strategy: &Strategy) -> Vec<String> {
    strategy
        .rules()
        .iter()
        .map(|rule| {
            let frame = vars.get(rule.decision).frame();
            let name = vars.name(rule.decision);
            if rule.domain.is_empty() {
                let act = rule.act_at(0).map_or("-", |a| frame[a].as_str());
                format!("{name}: {act}")
            } else {
                let entries: Vec<String> = rule
                    .acts
                    .iter()
                    .map(|(&x, &a)| format!("{} → {}", vars.format_index(&rule.domain, x), frame[a]))
                    .collect();
                format!("{name} given {}: {}", vars.format_domain(&rule.domain), entries.join(", "))
            }
        })
        .collect()
}

/// Compact one-line rendering of a strategy, for sweep rows.
pub fn strategy_fingerprint(vars: &Variables, strategy: &Strategy) -> String {
    strategy
        .rules()
        .iter()
        .map(|rule| {
            let frame = vars.get(rule.decision).frame();
            let name = vars.name(rule.decision);
            if rule.domain.is_empty() {
                format!("{name}={}", rule.act_at(0).map_or("-", |a| frame[a].as_str()))
            } else {
                let entries: Vec<String> = rule
                    .acts
                    .iter()
                    .map(|(&x, &a)| format!("{}={}", vars.format_index(&rule.domain, x).replace(' ', "/"), frame[a]))
                    .collect();
                format!("{name}[{}]", entries.join(" "))
            }
        })
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn render_solve(vars: &Variables, result: &SolveResult, machine: bool) -> String {
    let mut out = String::new();
    let traces: Vec<TraceTable> = result
        .trace
        .iter()
        .flatten()
        .enumerate()
        .map(|(i, s)| trace_table(vars, i + 1, s))
        .collect();
    if machine {
        let _ = writeln!(out, "{MACHINE_HEADER}");
        let _ = writeln!(out, "lambda\t-\t-\t-\t-\tvalue\t{}", result.lambda.value());
        let _ = writeln!(out, "expected_value\t-\t-\t-\t♦\tvalue\t{}", result.expected_value);
        for table in &result.solutions {
            let name = vars.name(table.decision());
            for (x, a) in table.iter() {
                let conflict = if table.conflicts().contains(&x) { "conflict" } else { "act" };
                let _ = writeln!(
                    out,
                    "psi\t-\t{name}\t-\t{}\t{conflict}\t{}",
                    vars.format_index(table.context(), x),
                    act_label(vars, table, a)
                );
            }
        }
        for rule in result.strategy.rules() {
            let name = vars.name(rule.decision);
            for (&x, &a) in &rule.acts {
                let _ = writeln!(
                    out,
                    "strategy\t-\t{name}\t-\t{}\tact\t{}",
                    vars.format_index(&rule.domain, x),
                    vars.get(rule.decision).frame()[a]
                );
            }
        }
        for t in &traces {
            render_trace_machine(&mut out, t);
        }
        return out;
    }

    for t in &traces {
        render_trace_human(&mut out, t);
        out.push('\n');
    }
    let _ = writeln!(out, "lambda {}", result.lambda);
    let _ = writeln!(out, "expected value {}", fmt_num(result.expected_value));
    for table in &result.solutions {
        let _ = writeln!(out, "{}", format_solution(vars, table));
        if !table.conflicts().is_empty() {
            let list: Vec<String> = table
                .conflicts()
                .iter()
                .map(|&x| vars.format_index(table.context(), x))
                .collect();
            let _ = writeln!(
                out,
                "  focal elements disagree on Ψ_{} at {}; resolved by summed value",
                vars.name(table.decision()),
                list.join(", ")
            );
        }
    }
    let _ = writeln!(out, "strategy");
    for line in format_strategy(vars, &result.strategy) {
        let _ = writeln!(out, "  {line}");
    }
    out
}

pub fn render_sweep(vars: &Variables, points: &[SweepPoint], machine: bool) -> String {
    let mut out = String::new();
    if machine {
        let _ = writeln!(out, "{MACHINE_HEADER}");
        for p in points {
            let _ = writeln!(out, "sweep\t-\t-\t-\t{}\tvalue\t{}", p.lambda.value(), p.expected_value);
            let _ = writeln!(
                out,
                "sweep\t-\t-\t-\t{}\tstrategy\t{}",
                p.lambda.value(),
                strategy_fingerprint(vars, &p.strategy)
            );
        }
        return out;
    }
    let header = vec!["lambda".to_string(), "expected value".into(), "strategy".into()];
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                Lambda::to_string(&p.lambda),
                fmt_num(p.expected_value),
                strategy_fingerprint(vars, &p.strategy),
            ]
        })
        .collect();
    render_grid(&mut out, &header, &rows);
    out
}

pub fn render_marginal(vars: &Variables, target: &str, v: &Valuation, machine: bool) -> String {
    let mut out = String::new();
    if machine {
        let _ = writeln!(out, "{MACHINE_HEADER}");
        for (i, f) in v.focals().iter().enumerate() {
            let _ = writeln!(
                out,
                "marginal\t-\t{target}\t{}\t{}\tmass\t{}",
                i + 1,
                vars.format_set(f.support()),
                f.mass()
            );
        }
        return out;
    }
    let _ = writeln!(out, "marginal of {target}");
    let header = vec!["focal element".to_string(), "mass".into()];
    let rows: Vec<Vec<String>> = v
        .focals()
        .iter()
        .map(|f| vec![vars.format_set(f.support()), fmt_num(f.mass())])
        .collect();
    render_grid(&mut out, &header, &rows);
    out
}
