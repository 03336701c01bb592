//! Random problem generators and independent reference computations.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dsdecide::model::{ConfigSet, Domain, VarId, VarKind, Variable, Variables};
use dsdecide::network::Network;
use dsdecide::valuation::{make_bpa, utility_from_values, ConditionalPotential, Valuation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WILDCATTER: &str = include_str!("../../examples/wildcatter.vbs");

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

#[derive(Clone, Copy, Debug)]
pub struct NetSpec {
    pub max_vars: usize,
    pub max_frame: usize,
    /// Every conditional table is a probability distribution.
    pub bayes: bool,
    /// Upper bound on parent configurations per potential.
    pub max_parent_configs: usize,
    pub max_focals: usize,
}

impl Default for NetSpec {
    fn default() -> Self {
        NetSpec {
            max_vars: 4,
            max_frame: 3,
            bayes: false,
            max_parent_configs: 6,
            max_focals: 2,
        }
    }
}

/// A generated network with its time slots, earliest first. Variables in
/// one slot are unordered decisions; every variable of a slot precedes
/// every variable of the next.
pub struct GenNet {
    pub net: Network,
    pub slots: Vec<Vec<VarId>>,
}

impl GenNet {
    pub fn time_order(&self) -> Vec<VarId> {
        self.slots.iter().flatten().copied().collect()
    }
}

/// Masses for `k` focal elements: positive weights normalized to 1.
fn masses(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

fn random_subset(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    loop {
        let s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// A bpa with up to `max_focals` distinct random focal elements.
pub fn random_bpa(rng: &mut impl Rng, domain: &Domain, max_focals: usize) -> Valuation {
    let n = domain.frame_size();
    let k = rng.gen_range(1..=max_focals);
    let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for _ in 0..k {
        sets.insert(random_subset(rng, n));
    }
    let m = masses(rng, sets.len());
    make_bpa(
        domain,
        sets.into_iter()
            .zip(m)
            .map(|(s, m)| (ConfigSet::new(domain.clone(), s).unwrap(), m)),
    )
    .unwrap()
}

/// A probability distribution over `domain`, as singleton focal elements.
pub fn random_distribution(rng: &mut impl Rng, domain: &Domain) -> Valuation {
    let n = domain.frame_size();
    let support: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.8)).collect();
    let support = if support.is_empty() { vec![rng.gen_range(0..n)] } else { support };
    let m = masses(rng, support.len());
    make_bpa(
        domain,
        support
            .into_iter()
            .zip(m)
            .map(|(x, m)| (ConfigSet::new(domain.clone(), [x]).unwrap(), m)),
    )
    .unwrap()
}

/// A random well-defined network.
pub fn random_network(rng: &mut impl Rng, spec: NetSpec) -> GenNet {
    let n = rng.gen_range(1..=spec.max_vars);
    // randoms must be separated by decisions
    let max_randoms = n.div_ceil(2);
    let randoms = rng.gen_range(0..=max_randoms.min(n));
    let decisions = n - randoms;
    let randoms = if decisions == 0 && randoms > 1 { 1 } else { randoms };
    let decisions = n - randoms;

    // gaps[i] holds the decision slots placed before random i (gap
    // `randoms` is after the last random)
    let mut gaps: Vec<Vec<Vec<usize>>> = vec![Vec::new(); randoms + 1];
    let mut next_decision = 0..decisions;
    for gap in gaps.iter_mut().take(randoms).skip(1) {
        gap.push(vec![next_decision.next().unwrap()]);
    }
    for d in next_decision {
        let gap = rng.gen_range(0..=randoms);
        match gaps[gap].last_mut() {
            Some(slot) if rng.gen_bool(0.4) => slot.push(d),
            _ => gaps[gap].push(vec![d]),
        }
    }
    // slots as (is_decision, local index)
    let mut slots_local: Vec<Vec<(bool, usize)>> = Vec::new();
    for (i, gap) in gaps.iter().enumerate() {
        for slot in gap {
            slots_local.push(slot.iter().map(|&d| (true, d)).collect());
        }
        if i < randoms {
            slots_local.push(vec![(false, i)]);
        }
    }

    // shuffled declaration order
    let mut decl: Vec<(bool, usize)> = (0..decisions)
        .map(|d| (true, d))
        .chain((0..randoms).map(|r| (false, r)))
        .collect();
    decl.shuffle(rng);
    let mut vars = Variables::new();
    let mut ids: BTreeMap<(bool, usize), VarId> = BTreeMap::new();
    for &(is_d, i) in &decl {
        let size = if rng.gen_bool(0.1) { 1 } else { rng.gen_range(2..=spec.max_frame.max(2)) };
        let size = size.min(spec.max_frame);
        let (name, kind, prefix) = if is_d {
            (format!("D{i}"), VarKind::Decision, "a")
        } else {
            (format!("R{i}"), VarKind::Random, "r")
        };
        let frame = (0..size).map(|k| format!("{prefix}{k}")).collect();
        ids.insert((is_d, i), vars.declare(Variable::new(name, kind, frame).unwrap()).unwrap());
    }
    let slots: Vec<Vec<VarId>> = slots_local
        .iter()
        .map(|s| s.iter().map(|k| ids[k]).collect())
        .collect();

    let mut net = Network::new(vars.clone());
    for w in slots.windows(2) {
        for &x in &w[0] {
            for &y in &w[1] {
                net.add_arc(x, y).unwrap();
            }
        }
    }

    for (s, slot) in slots.iter().enumerate() {
        for &r in slot {
            if vars.kind(r) != VarKind::Random {
                continue;
            }
            let mut earlier: Vec<VarId> = slots[..s].iter().flatten().copied().collect();
            earlier.shuffle(rng);
            // the file format only admits parentless bpas before any decision
            if let Some(i) = earlier.iter().position(|&v| vars.kind(v) == VarKind::Decision) {
                earlier.swap(0, i);
            }
            let mut parents: Vec<VarId> = Vec::new();
            let mut configs = 1;
            for v in earlier {
                let size = vars.get(v).size();
                let forced = parents.is_empty() && vars.kind(v) == VarKind::Decision;
                if (forced || rng.gen_bool(0.6)) && configs * size <= spec.max_parent_configs {
                    parents.push(v);
                    configs *= size;
                }
            }
            let parents = vars.domain(parents).unwrap();
            let head = vars.domain([r]).unwrap();
            let tables = (0..parents.frame_size())
                .map(|_| {
                    if spec.bayes {
                        random_distribution(rng, &head)
                    } else {
                        random_bpa(rng, &head, spec.max_focals)
                    }
                })
                .collect();
            let label = format!("p_{}", vars.name(r));
            net.add_potential(ConditionalPotential::new(label, r, parents, tables).unwrap())
                .unwrap();
        }
    }

    let all: Vec<VarId> = vars.ids().collect();
    let mut uncovered: Vec<VarId> = net.decisions();
    let count = rng.gen_range(1..=2);
    for u in 0..count {
        let mut dom: Vec<VarId> = all.iter().copied().filter(|_| rng.gen_bool(0.5)).take(3).collect();
        if u == count - 1 {
            for &d in &uncovered {
                if !dom.contains(&d) {
                    dom.push(d);
                }
            }
        }
        if dom.is_empty() {
            dom.push(*all.choose(rng).unwrap());
        }
        uncovered.retain(|d| !dom.contains(d));
        let domain = vars.domain(dom).unwrap();
        let values = (0..domain.frame_size())
            .map(|_| rng.gen_range(-100i32..=100) as f64)
            .collect();
        net.add_utility(format!("u{u}"), utility_from_values(&domain, values).unwrap())
            .unwrap();
    }

    let report = net.validate();
    assert!(report.is_empty(), "generator produced an invalid network:\n{report}");
    GenNet { net, slots }
}

/// A network with one decision `D`, one random `R` after it, a utility over
/// `{D, R}` and a potential for `R` given `D`.
pub fn random_canonical(rng: &mut impl Rng) -> Network {
    let mut vars = Variables::new();
    let acts = rng.gen_range(1..=3);
    let states = rng.gen_range(1..=4);
    let frame = |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    let d = vars.declare(Variable::new("D", VarKind::Decision, frame("a", acts)).unwrap()).unwrap();
    let r = vars.declare(Variable::new("R", VarKind::Random, frame("r", states)).unwrap()).unwrap();
    let mut net = Network::new(vars.clone());
    net.add_arc(d, r).unwrap();
    let dr = vars.domain([d, r]).unwrap();
    let values = (0..dr.frame_size()).map(|_| rng.gen_range(-1000.0..1000.0)).collect();
    net.add_utility("pi", utility_from_values(&dr, values).unwrap()).unwrap();
    let head = vars.domain([r]).unwrap();
    let parents = vars.domain([d]).unwrap();
    let tables = (0..acts).map(|_| random_bpa(rng, &head, 4)).collect();
    net.add_potential(ConditionalPotential::new("rho", r, parents, tables).unwrap())
        .unwrap();
    net
}

/// Lower and upper expected utility per act of a canonical problem,
/// computed from the conditional tables directly.
pub fn interval_oracle(net: &Network) -> Vec<(f64, f64)> {
    let u = net.utilities()[0].valuation();
    let p = &net.potentials()[0];
    let states = net.variables().get(p.head()).size();
    p.tables()
        .iter()
        .enumerate()
        .map(|(act, table)| {
            let mut lo = 0.0;
            let mut hi = 0.0;
            for f in table.focals() {
                let values: Vec<f64> = f
                    .support()
                    .indices()
                    .iter()
                    .map(|&r| u.utility_at(act * states + r).unwrap())
                    .collect();
                lo += f.mass() * values.iter().copied().fold(f64::INFINITY, f64::min);
                hi += f.mass() * values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            }
            (lo, hi)
        })
        .collect()
}

/// Backward induction over the time order of a network whose conditional
/// tables are probability distributions.
pub fn rollback(gen: &GenNet) -> f64 {
    let net = &gen.net;
    let order = gen.time_order();
    let mut values: Vec<usize> = vec![0; net.variables().len()];
    rollback_from(net, &order, 0, &mut values)
}

fn encode(domain: &Domain, values: &[usize]) -> usize {
    let digits: Vec<usize> = domain.vars().iter().map(|v| values[v.0]).collect();
    domain.encode(&digits)
}

fn rollback_from(net: &Network, order: &[VarId], i: usize, values: &mut Vec<usize>) -> f64 {
    let Some(&var) = order.get(i) else {
        return net
            .utilities()
            .iter()
            .map(|u| {
                let v = u.valuation();
                v.utility_at(encode(v.domain(), values)).unwrap()
            })
            .sum();
    };
    let size = net.variables().get(var).size();
    match net.variables().kind(var) {
        VarKind::Decision => (0..size)
            .map(|a| {
                values[var.0] = a;
                rollback_from(net, order, i + 1, values)
            })
            .fold(f64::NEG_INFINITY, f64::max),
        VarKind::Random => {
            let p = net.potential_for(var).unwrap();
            let table = &p.tables()[encode(p.parents(), values)];
            let mut total = 0.0;
            for f in table.focals() {
                let [x] = f.support().indices() else {
                    panic!("not a probability distribution")
                };
                values[var.0] = *x;
                total += f.mass() * rollback_from(net, order, i + 1, values);
            }
            total
        }
    }
}

/// Exhaustive maximization of the summed utilities, for networks without
/// random variables.
pub fn brute_force_max(net: &Network) -> f64 {
    let order: Vec<VarId> = net.variables().ids().collect();
    let mut values = vec![0; order.len()];
    rollback_from(net, &order, 0, &mut values)
}

pub type MassMap = BTreeMap<Vec<usize>, f64>;

pub fn mass_map(v: &Valuation) -> MassMap {
    v.focals()
        .iter()
        .map(|f| (f.support().indices().to_vec(), f.mass()))
        .collect()
}

/// Dempster's rule on two mass functions over the same frame, with focal
/// elements as sets of configuration indices.
pub fn dempster(a: &MassMap, b: &MassMap) -> Option<MassMap> {
    let mut out: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut conflict = 0.0;
    for (x, mx) in a {
        let xs: BTreeSet<usize> = x.iter().copied().collect();
        for (y, my) in b {
            let c: Vec<usize> = y.iter().copied().filter(|i| xs.contains(i)).collect();
            if c.is_empty() {
                conflict += mx * my;
            } else {
                *out.entry(c).or_default() += mx * my;
            }
        }
    }
    let k = 1.0 - conflict;
    if k <= 1e-12 {
        return None;
    }
    out.values_mut().for_each(|m| *m /= k);
    out.retain(|_, m| *m != 0.0);
    Some(out)
}

pub fn maps_close(a: &MassMap, b: &MassMap, tol: f64) -> bool {
    let keys: BTreeSet<&Vec<usize>> = a.keys().chain(b.keys()).collect();
    keys.into_iter().all(|k| {
        let x = a.get(k).copied().unwrap_or(0.0);
        let y = b.get(k).copied().unwrap_or(0.0);
        (x - y).abs() <= tol
    })
}

/// Ballooning extension of a conditional, computed as the explicit product
/// over parent configurations: each choice of one focal element per parent
/// configuration gives the union of `{p} × focal` with the product mass.
/// Configurations are indexed over the domain of the potential.
pub fn balloon_oracle(p: &ConditionalPotential) -> MassMap {
    let domain = p.domain();
    let head = p.head();
    let mut acc: MassMap = BTreeMap::from([(Vec::new(), 1.0)]);
    for (pi, table) in p.tables().iter().enumerate() {
        let parent_values = p.parents().decode(pi);
        let mut next: MassMap = BTreeMap::new();
        for (set, m) in &acc {
            for f in table.focals() {
                let mut s = set.clone();
                for &h in f.support().indices() {
                    let digits: Vec<usize> = domain
                        .vars()
                        .iter()
                        .map(|&v| {
                            if v == head {
                                h
                            } else {
                                parent_values[p.parents().position(v).unwrap()]
                            }
                        })
                        .collect();
                    s.push(domain.encode(&digits));
                }
                s.sort_unstable();
                *next.entry(s).or_default() += m * f.mass();
            }
        }
        acc = next;
    }
    acc
}

fn replace_block(text: &str, start: &str, with: &str) -> String {
    let i = text.find(start).expect("block present");
    let end = i + text[i..].find("\n}\n").expect("block closed") + 3;
    format!("{}{}{}", &text[..i], with, &text[end..])
}

/// The wildcatter problem with one seeded violation each, keyed by the
/// condition that must be reported.
pub fn wildcatter_mutations() -> Vec<(&'static str, String)> {
    let w = WILDCATTER;
    vec![
        (
            "a",
            replace_block(w, "utility pi", "utility pi on {O} {\n  dr = -70000; we = 50000; so = 200000;\n}\n"),
        ),
        ("b", replace_block(w, "bpa rho", "")),
        ("p1", format!("{w}\nprec O -> T\n")),
        ("p2", w.replace("prec D -> O\n", "")),
        (
            "p3",
            replace_block(
                w,
                "bpa mu",
                "bpa mu on {R | T, D} {\n  t d : {re} = 1; t ~d : {ye} = 1;\n  ~t d : {nr} = 1; ~t ~d : {nr} = 1;\n}\n",
            ),
        ),
        (
            "p4",
            replace_block(
                w,
                "bpa mu",
                "bpa mu on {R | D} {\n  d : {re} = 0.5; d : {ye, gr} = 0.5;\n  ~d : {nr} = 1;\n}\n",
            ),
        ),
        (
            "p5",
            format!(
                "{}\nrandom X {{ x1, x2 }}\nprec R -> X\nprec X -> D\n\
                 bpa chi on {{X | R}} {{ re : {{x1}} = 1; ye : {{x2}} = 1; gr : {{x1, x2}} = 1; nr : {{x1}} = 1 }}\n",
                w.replace("prec R -> D\n", "")
            ),
        ),
        (
            "assumption1",
            format!("{w}\nbpa rho2 on {{O | R}} {{ re : {{dr}} = 1; ye : {{we}} = 1; gr : {{so}} = 1; nr : {{dr, we, so}} = 1 }}\n"),
        ),
    ]
}

/// Every numeric cell of the four computation tables, keyed by step, focal
/// group, configuration and column.
pub fn golden_cells() -> Vec<(usize, usize, &'static str, &'static str, f64)> {
    let (pi, rho, comb, res) = ("pi", "rho", "pi ⊗ rho", "(pi ⊗ rho)↓{R,D}");
    let mut cells = Vec::new();
    let focal_rows: [(f64, &[(&str, f64, f64, Option<f64>)]); 3] = [
        (
            0.5,
            &[
                ("re d dr", -70000.0, -35000.0, Some(-35000.0)),
                ("re ~d dr", 0.0, 0.0, Some(0.0)),
                ("ye d dr", -70000.0, -35000.0, Some(-5000.0)),
                ("ye d we", 50000.0, 25000.0, None),
                ("ye ~d dr", 0.0, 0.0, Some(0.0)),
                ("ye ~d we", 0.0, 0.0, None),
                ("gr d we", 50000.0, 25000.0, Some(62500.0)),
                ("gr d so", 200000.0, 100000.0, None),
                ("gr ~d we", 0.0, 0.0, Some(0.0)),
                ("gr ~d so", 0.0, 0.0, None),
                ("nr d dr", -70000.0, -35000.0, Some(-35000.0)),
                ("nr ~d dr", 0.0, 0.0, Some(0.0)),
            ],
        ),
        (
            0.2,
            &[
                ("re d dr", -70000.0, -14000.0, Some(-14000.0)),
                ("re ~d dr", 0.0, 0.0, Some(0.0)),
                ("ye d dr", -70000.0, -14000.0, Some(-2000.0)),
                ("ye d we", 50000.0, 10000.0, None),
                ("ye ~d dr", 0.0, 0.0, Some(0.0)),
                ("ye ~d we", 0.0, 0.0, None),
                ("gr d we", 50000.0, 10000.0, Some(25000.0)),
                ("gr d so", 200000.0, 40000.0, None),
                ("gr ~d we", 0.0, 0.0, Some(0.0)),
                ("gr ~d so", 0.0, 0.0, None),
                ("nr d dr", -70000.0, -14000.0, Some(-2000.0)),
                ("nr d we", 50000.0, 10000.0, None),
                ("nr ~d dr", 0.0, 0.0, Some(0.0)),
                ("nr ~d we", 0.0, 0.0, None),
            ],
        ),
        (
            0.3,
            &[
                ("re d dr", -70000.0, -21000.0, Some(-21000.0)),
                ("re ~d dr", 0.0, 0.0, Some(0.0)),
                ("ye d dr", -70000.0, -21000.0, Some(-3000.0)),
                ("ye d we", 50000.0, 15000.0, None),
                ("ye ~d dr", 0.0, 0.0, Some(0.0)),
                ("ye ~d we", 0.0, 0.0, None),
                ("gr d we", 50000.0, 15000.0, Some(37500.0)),
                ("gr d so", 200000.0, 60000.0, None),
                ("gr ~d we", 0.0, 0.0, Some(0.0)),
                ("gr ~d so", 0.0, 0.0, None),
                ("nr d we", 50000.0, 15000.0, Some(37500.0)),
                ("nr d so", 200000.0, 60000.0, None),
                ("nr ~d we", 0.0, 0.0, Some(0.0)),
                ("nr ~d so", 0.0, 0.0, None),
            ],
        ),
    ];
    for (g, (mass, rows)) in focal_rows.iter().enumerate() {
        cells.push((1, g + 1, rows[0].0, rho, *mass));
        for &(config, u, c, m) in rows.iter() {
            cells.push((1, g + 1, config, pi, u));
            cells.push((1, g + 1, config, comb, c));
            if let Some(m) = m {
                cells.push((1, g + 1, config, res, m));
            }
        }
    }

    let tau = res;
    let tau_r = "(pi ⊗ rho)↓{R,D}↓{R}";
    for (config, v) in [
        ("re d", -70000.0),
        ("re ~d", 0.0),
        ("ye d", -10000.0),
        ("ye ~d", 0.0),
        ("gr d", 125000.0),
        ("gr ~d", 0.0),
        ("nr d", 500.0),
        ("nr ~d", 0.0),
    ] {
        cells.push((2, 1, config, tau, v));
    }
    for (config, v) in [("re ~d", 0.0), ("ye ~d", 0.0), ("gr d", 125000.0), ("nr d", 500.0)] {
        cells.push((2, 1, config, tau_r, v));
    }

    let comb3 = "(pi ⊗ rho)↓{R,D}↓{R} ⊗ mu";
    let res3 = "((pi ⊗ rho)↓{R,D}↓{R} ⊗ mu)↓{T}";
    for (g, mass, first, first_v, first_c, nr_c) in [
        (1, 0.5, "t re", 0.0, 0.0, 250.0),
        (2, 0.2, "t ye", 0.0, 0.0, 100.0),
        (3, 0.3, "t gr", 125000.0, 37500.0, 150.0),
    ] {
        cells.push((3, g, first, "mu", mass));
        cells.push((3, g, first, tau_r, first_v));
        cells.push((3, g, first, comb3, first_c));
        cells.push((3, g, first, res3, first_c));
        cells.push((3, g, "~t nr", tau_r, 500.0));
        cells.push((3, g, "~t nr", comb3, nr_c));
        cells.push((3, g, "~t nr", res3, nr_c));
    }

    let v = res3;
    let comb4 = "kappa ⊗ ((pi ⊗ rho)↓{R,D}↓{R} ⊗ mu)↓{T}";
    let res4 = "(kappa ⊗ ((pi ⊗ rho)↓{R,D}↓{R} ⊗ mu)↓{T})↓∅";
    cells.push((4, 1, "t", v, 37500.0));
    cells.push((4, 1, "t", "kappa", -10000.0));
    cells.push((4, 1, "t", comb4, 27500.0));
    cells.push((4, 1, "t", res4, 27500.0));
    cells.push((4, 1, "~t", v, 500.0));
    cells
}

/// Focal elements of the two ballooned wildcatter potentials, as listed
/// next to the conditional tables.
pub fn ballooned_golden() -> Vec<(&'static str, f64, Vec<&'static str>)> {
    vec![
        ("mu", 0.5, vec!["t re", "~t nr"]),
        ("mu", 0.2, vec!["t ye", "~t nr"]),
        ("mu", 0.3, vec!["t gr", "~t nr"]),
        ("rho", 0.5, vec!["re dr", "ye dr", "ye we", "gr we", "gr so", "nr dr"]),
        ("rho", 0.2, vec!["re dr", "ye dr", "ye we", "gr we", "gr so", "nr dr", "nr we"]),
        ("rho", 0.3, vec!["re dr", "ye dr", "ye we", "gr we", "gr so", "nr we", "nr so"]),
    ]
}

/// Compare the ballooned potentials of `net` with [`ballooned_golden`].
pub fn check_ballooned(net: &Network) -> Result<(), String> {
    let vars = net.variables();
    let golden = ballooned_golden();
    for p in net.potentials() {
        let got = p.ballooned();
        let want: Vec<_> = golden.iter().filter(|g| g.0 == p.label()).collect();
        if got.focals().len() != want.len() {
            return Err(format!("{}: {} focal elements, expected {}", p.label(), got.focals().len(), want.len()));
        }
        let names: Vec<&str> = got.domain().vars().iter().map(|&v| vars.name(v)).collect();
        for (_, mass, rows) in want {
            let configs = rows
                .iter()
                .map(|row| {
                    let pairs: Vec<(&str, &str)> = names.iter().copied().zip(row.split(' ')).collect();
                    vars.config(&pairs).map_err(|e| e.to_string())
                })
                .collect::<Result<Vec<_>, _>>()?;
            let set = ConfigSet::from_configs(got.domain().clone(), configs.iter()).map_err(|e| e.to_string())?;
            let m = got.mass_of(&set);
            if (m - mass).abs() > 1e-12 {
                return Err(format!("{}: mass {m} on {rows:?}, expected {mass}", p.label()));
            }
        }
    }
    Ok(())
}
