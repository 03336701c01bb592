//! The problem-file format.
//!
//! ```text
//! decision T { t, ~t }
//! random R { re, ye, gr, nr }
//! prec T -> R
//! utility kappa on {T} { t = -10000; ~t = 0; }
//! bpa mu on {R | T} { t : {re} = 0.5; t : {ye, gr} = 0.5; ~t : {nr} = 1; }
//! lambda = 0.5
//! ```
//!
//! `#` starts a comment that runs to the end of the line. Statements may
//! span lines.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};
use std::path::PathBuf;

use crate::calculus::Lambda;
use crate::model::{ConfigSet, Configuration, Domain, VarId, VarKind, Variable, Variables};
use crate::network::Network;
use crate::valuation::{make_bpa, utility_from_values, ConditionalPotential, MASS_TOLERANCE};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub path: Option<PathBuf>,
    pub network: Network,
    pub lambda: Option<Lambda>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Eq,
    Bar,
    Arrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "'{w}'"),
            Tok::LBrace => f.write_str("'{'"),
            Tok::RBrace => f.write_str("'}'"),
            Tok::Comma => f.write_str("','"),
            Tok::Semi => f.write_str("';'"),
            Tok::Colon => f.write_str("':'"),
            Tok::Eq => f.write_str("'='"),
            Tok::Bar => f.write_str("'|'"),
            Tok::Arrow => f.write_str("'->'"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn error(self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

fn tokenize(text: &str) -> Vec<(Tok, Pos)> {
    let mut out = Vec::new();
    for (l, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = Pos {
                line: l + 1,
                column: i + 1,
            };
            let punct = match c {
                '{' => Some(Tok::LBrace),
                '}' => Some(Tok::RBrace),
                ',' => Some(Tok::Comma),
                ';' => Some(Tok::Semi),
                ':' => Some(Tok::Colon),
                '=' => Some(Tok::Eq),
                '|' => Some(Tok::Bar),
                _ => None,
            };
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if let Some(t) = punct {
                out.push((t, pos));
                i += 1;
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push((Tok::Arrow, pos));
                i += 2;
            } else {
                let start = i;
                while i < chars.len() {
                    let c = chars[i];
                    if c.is_whitespace()
                        || "{},;:=|#".contains(c)
                        || (c == '-' && chars.get(i + 1) == Some(&'>'))
                    {
                        break;
                    }
                    i += 1;
                }
                out.push((Tok::Word(chars[start..i].iter().collect()), pos));
            }
        }
    }
    out
}

struct Parser {
    tokens: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.tokens.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn next(&mut self, what: &str) -> PResult<(Tok, Pos)> {
        let t = self
            .tokens
            .get(self.at)
            .cloned()
            .ok_or_else(|| self.end.error(format!("expected {what}, found end of file")))?;
        self.at += 1;
        Ok(t)
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        let (t, pos) = self.next(&tok.to_string())?;
        if t == tok {
            Ok(pos)
        } else {
            Err(pos.error(format!("expected {tok}, found {t}")))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self, what: &str) -> PResult<(String, Pos)> {
        match self.next(what)? {
            (Tok::Word(w), pos) => Ok((w, pos)),
            (t, pos) => Err(pos.error(format!("expected {what}, found {t}"))),
        }
    }

    fn number(&mut self) -> PResult<(f64, Pos)> {
        let (w, pos) = self.word("a number")?;
        match w.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok((x, pos)),
            _ => Err(pos.error(format!("'{w}' is not a finite number"))),
        }
    }

    /// Words up to (not including) the next non-word token.
    fn words(&mut self) -> Vec<(String, Pos)> {
        let mut out = Vec::new();
        while let Some(Tok::Word(w)) = self.peek() {
            out.push((w.clone(), self.pos()));
            self.at += 1;
        }
        out
    }

    /// `{ a, b, c }`, possibly empty.
    fn list(&mut self, what: &str) -> PResult<Vec<(String, Pos)>> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(out);
        }
        loop {
            out.push(self.word(what)?);
            match self.next("',' or '}'")? {
                (Tok::Comma, _) => {}
                (Tok::RBrace, _) => return Ok(out),
                (t, pos) => return Err(pos.error(format!("expected ',' or '}}', found {t}"))),
            }
        }
    }

    /// End of an entry inside a table block: `;`, or the closing brace.
    fn end_entry(&mut self) -> PResult<bool> {
        if self.eat(&Tok::Semi) {
            Ok(self.eat(&Tok::RBrace))
        } else if self.eat(&Tok::RBrace) {
            Ok(true)
        } else {
            let pos = self.pos();
            Err(pos.error(match self.peek() {
                Some(t) => format!("expected ';' or '}}', found {t}"),
                None => "expected ';' or '}', found end of file".into(),
            }))
        }
    }
}

struct Builder {
    vars: Variables,
    arcs: Vec<(VarId, VarId, Pos)>,
    utilities: Vec<(String, crate::valuation::Valuation)>,
    potentials: Vec<(ConditionalPotential, Pos)>,
    labels: HashSet<String>,
    lambda: Option<Lambda>,
}

impl Builder {
    fn var(&self, name: &str, pos: Pos) -> PResult<VarId> {
        self.vars
            .find(name)
            .ok_or_else(|| pos.error(format!("unknown variable '{name}'")))
    }

    fn value(&self, var: VarId, label: &str, pos: Pos) -> PResult<usize> {
        self.vars.get(var).value_index(label).ok_or_else(|| {
            pos.error(format!(
                "unknown value '{label}' for variable '{}'",
                self.vars.name(var)
            ))
        })
    }

    fn label(&mut self, label: &str, pos: Pos) -> PResult<()> {
        if !self.labels.insert(label.to_string()) {
            return Err(pos.error(format!("duplicate valuation label '{label}'")));
        }
        Ok(())
    }

    /// Distinct variables named in a header, in the order written.
    fn header_vars(&self, names: &[(String, Pos)]) -> PResult<Vec<VarId>> {
        let mut out: Vec<VarId> = Vec::new();
        for (name, pos) in names {
            let v = self.var(name, *pos)?;
            if out.contains(&v) {
                return Err(pos.error(format!("variable '{name}' listed twice")));
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Configuration of `domain` from labels given in `written` order.
    fn config(&self, domain: &Domain, written: &[VarId], labels: &[(String, Pos)], at: Pos) -> PResult<Configuration> {
        if labels.len() != written.len() {
            return Err(at.error(format!(
                "expected {} value(s) for {}, found {}",
                written.len(),
                self.vars.format_domain(domain),
                labels.len()
            )));
        }
        let mut values = vec![0; domain.len()];
        for (&v, (label, pos)) in written.iter().zip(labels) {
            values[domain.position(v).unwrap()] = self.value(v, label, *pos)?;
        }
        Configuration::new(domain.clone(), values).map_err(|e| at.error(e.to_string()))
    }
}

pub fn parse_problem(text: &str) -> PResult<ProblemFile> {
    let tokens = tokenize(text);
    let line_count = text.lines().count().max(1);
    let end = Pos {
        line: line_count,
        column: text.lines().last().map_or(0, |l| l.chars().count()) + 1,
    };
    let mut p = Parser { tokens, at: 0, end };
    let mut b = Builder {
        vars: Variables::new(),
        arcs: Vec::new(),
        utilities: Vec::new(),
        potentials: Vec::new(),
        labels: HashSet::new(),
        lambda: None,
    };

    while p.peek().is_some() {
        let (keyword, kpos) = p.word("a statement")?;
        match keyword.as_str() {
            "decision" | "random" => {
                let kind = if keyword == "decision" { VarKind::Decision } else { VarKind::Random };
                let (name, npos) = p.word("a variable name")?;
                let frame = p.list("a value")?;
                let mut seen = HashSet::new();
                for (v, vpos) in &frame {
                    if !seen.insert(v.as_str()) {
                        return Err(vpos.error(format!("duplicate value '{v}' in frame of '{name}'")));
                    }
                }
                let var = Variable::new(&name, kind, frame.into_iter().map(|(v, _)| v).collect())
                    .map_err(|e| npos.error(e.to_string()))?;
                if b.vars.find(&name).is_some() {
                    return Err(npos.error(format!("duplicate variable '{name}'")));
                }
                b.vars.declare(var).map_err(|e| npos.error(e.to_string()))?;
            }
            "prec" => {
                let (from, fpos) = p.word("a variable name")?;
                p.expect(Tok::Arrow)?;
                let (to, tpos) = p.word("a variable name")?;
                let (x, y) = (b.var(&from, fpos)?, b.var(&to, tpos)?);
                if b.arcs.iter().any(|&(a, c, _)| (a, c) == (x, y)) {
                    return Err(kpos.error(format!("duplicate arc {from} -> {to}")));
                }
                b.arcs.push((x, y, kpos));
            }
            "utility" => parse_utility(&mut p, &mut b)?,
            "bpa" => parse_bpa(&mut p, &mut b, kpos)?,
            "lambda" => {
                p.expect(Tok::Eq)?;
                let (x, pos) = p.number()?;
                if b.lambda.is_some() {
                    return Err(kpos.error("duplicate lambda"));
                }
                b.lambda = Some(Lambda::new(x).map_err(|e| pos.error(e.to_string()))?);
                p.eat(&Tok::Semi);
            }
            other => return Err(kpos.error(format!("unknown statement '{other}'"))),
        }
    }

    if b.vars.is_empty() {
        return Err(Pos { line: 1, column: 1 }.error("no variables declared"));
    }

    let mut network = Network::new(b.vars.clone());
    for &(x, y, _) in &b.arcs {
        network.add_arc(x, y).expect("duplicates rejected while parsing");
    }
    let precedence = network.precedence();
    for (label, v) in b.utilities {
        network.add_utility(label, v).expect("labels checked while parsing");
    }
    for (cp, pos) in b.potentials {
        if cp.parents().is_empty() {
            let head = cp.head();
            if let Some(d) = network.decisions().into_iter().find(|&d| precedence.greater(d, head)) {
                return Err(pos.error(format!(
                    "unconditional bpa '{}' for '{}', which is preceded by decision '{}'",
                    cp.label(),
                    b.vars.name(head),
                    b.vars.name(d)
                )));
            }
        }
        network.add_potential(cp).expect("labels checked while parsing");
    }
    Ok(ProblemFile {
        path: None,
        network,
        lambda: b.lambda,
    })
}

fn parse_utility(p: &mut Parser, b: &mut Builder) -> PResult<()> {
    let (label, lpos) = p.word("a label")?;
    b.label(&label, lpos)?;
    let on = p.word("'on'")?;
    if on.0 != "on" {
        return Err(on.1.error(format!("expected 'on', found '{}'", on.0)));
    }
    let written = b.header_vars(&p.list("a variable name")?)?;
    let domain = b.vars.domain(written.iter().copied()).map_err(|e| lpos.error(e.to_string()))?;

    let mut values: Vec<Option<f64>> = vec![None; domain.frame_size()];
    p.expect(Tok::LBrace)?;
    if !p.eat(&Tok::RBrace) {
        loop {
            let at = p.pos();
            let labels = p.words();
            p.expect(Tok::Eq)?;
            let (x, _) = p.number()?;
            let config = b.config(&domain, &written, &labels, at)?;
            let slot = &mut values[config.index()];
            if slot.is_some() {
                return Err(at.error(format!(
                    "duplicate entry for {} in utility '{label}'",
                    b.vars.format_config(&config)
                )));
            }
            *slot = Some(x);
            if p.end_entry()? {
                break;
            }
        }
    }
    if let Some(missing) = values.iter().position(Option::is_none) {
        return Err(lpos.error(format!(
            "utility '{label}' has no value for {}",
            b.vars.format_index(&domain, missing)
        )));
    }
    let v = utility_from_values(&domain, values.into_iter().map(Option::unwrap).collect())
        .map_err(|e| lpos.error(e.to_string()))?;
    b.utilities.push((label, v));
    Ok(())
}

fn parse_bpa(p: &mut Parser, b: &mut Builder, kpos: Pos) -> PResult<()> {
    let (label, lpos) = p.word("a label")?;
    b.label(&label, lpos)?;
    let on = p.word("'on'")?;
    if on.0 != "on" {
        return Err(on.1.error(format!("expected 'on', found '{}'", on.0)));
    }
    p.expect(Tok::LBrace)?;
    let (head_name, hpos) = p.word("a variable name")?;
    let head = b.var(&head_name, hpos)?;
    if b.vars.kind(head) != VarKind::Random {
        return Err(hpos.error(format!("bpa head '{head_name}' is not a random variable")));
    }
    let mut parent_names = Vec::new();
    if p.eat(&Tok::Bar) {
        loop {
            parent_names.push(p.word("a variable name")?);
            match p.next("',' or '}'")? {
                (Tok::Comma, _) => {}
                (Tok::RBrace, _) => break,
                (t, pos) => return Err(pos.error(format!("expected ',' or '}}', found {t}"))),
            }
        }
    } else {
        p.expect(Tok::RBrace)?;
    }
    let written = b.header_vars(&parent_names)?;
    if written.contains(&head) {
        return Err(hpos.error(format!("'{head_name}' is both head and parent")));
    }
    let parents = b.vars.domain(written.iter().copied()).map_err(|e| lpos.error(e.to_string()))?;
    let head_domain = b.vars.domain([head]).map_err(|e| lpos.error(e.to_string()))?;

    let mut rows: BTreeMap<usize, Vec<(ConfigSet, f64)>> = BTreeMap::new();
    p.expect(Tok::LBrace)?;
    if !p.eat(&Tok::RBrace) {
        loop {
            let at = p.pos();
            let labels = p.words();
            p.eat(&Tok::Colon);
            let focal = p.list("a value")?;
            p.expect(Tok::Eq)?;
            let (m, mpos) = p.number()?;
            if m < 0.0 {
                return Err(mpos.error(format!("negative mass {m}")));
            }
            let config = b.config(&parents, &written, &labels, at)?;
            let mut members = Vec::new();
            for (v, vpos) in &focal {
                members.push(b.value(head, v, *vpos)?);
            }
            let set = ConfigSet::new(head_domain.clone(), members).map_err(|e| at.error(e.to_string()))?;
            let row = rows.entry(config.index()).or_default();
            if row.iter().any(|(s, _)| s == &set) {
                return Err(at.error(format!(
                    "duplicate focal element {} in bpa '{label}'",
                    b.vars.format_set(&set)
                )));
            }
            row.push((set, m));
            if p.end_entry()? {
                break;
            }
        }
    }

    let given = |i: usize| {
        if parents.is_empty() {
            String::new()
        } else {
            format!(" given {}", b.vars.format_index(&parents, i))
        }
    };
    let mut tables = Vec::with_capacity(parents.frame_size());
    for i in 0..parents.frame_size() {
        let row = rows.remove(&i).unwrap_or_default();
        if row.is_empty() {
            return Err(lpos.error(format!("bpa '{label}' has no masses for {head_name}{}", given(i))));
        }
        let sum: f64 = row.iter().map(|(_, m)| m).sum();
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(lpos.error(format!(
                "masses of bpa '{label}' for {head_name}{} sum to {}, expected 1",
                given(i),
                super::report::fmt_num(sum)
            )));
        }
        tables.push(make_bpa(&head_domain, row).map_err(|e| lpos.error(e.to_string()))?);
    }
    let cp = ConditionalPotential::new(&label, head, parents, tables).map_err(|e| lpos.error(e.to_string()))?;
    b.potentials.push((cp, kpos));
    Ok(())
}

/// Write a network back out in the problem-file format. Numbers are printed
/// in shortest round-trip form, so parsing the output gives an equal network.
pub fn serialize_problem(net: &Network, lambda: Option<Lambda>) -> String {
    let vars = net.variables();
    let mut out = String::new();
    for (_, v) in vars.iter() {
        let _ = writeln!(out, "{} {} {{ {} }}", v.kind(), v.name(), v.frame().join(", "));
    }
    if !net.arcs().is_empty() {
        out.push('\n');
    }
    for &(x, y) in net.arcs() {
        let _ = writeln!(out, "prec {} -> {}", vars.name(x), vars.name(y));
    }
    for u in net.utilities() {
        let v = u.valuation();
        let names: Vec<&str> = v.domain().vars().iter().map(|&x| vars.name(x)).collect();
        let _ = writeln!(out, "\nutility {} on {{{}}} {{", u.label(), names.join(", "));
        for i in 0..v.domain().frame_size() {
            let _ = writeln!(
                out,
                "  {} = {};",
                vars.format_index(v.domain(), i).replace('♦', ""),
                v.utility_at(i).unwrap_or(0.0)
            );
        }
        out.push_str("}\n");
    }
    for cp in net.potentials() {
        let parents = cp.parents();
        let names: Vec<&str> = parents.vars().iter().map(|&x| vars.name(x)).collect();
        let header = if names.is_empty() {
            vars.name(cp.head()).to_string()
        } else {
            format!("{} | {}", vars.name(cp.head()), names.join(", "))
        };
        let _ = writeln!(out, "\nbpa {} on {{{header}}} {{", cp.label());
        for (i, table) in cp.tables().iter().enumerate() {
            let prefix = if parents.is_empty() {
                String::new()
            } else {
                format!("{} : ", vars.format_index(parents, i))
            };
            for f in table.focals() {
                let _ = writeln!(out, "  {prefix}{} = {};", vars.format_set(f.support()), f.mass());
            }
        }
        out.push_str("}\n");
    }
    if let Some(l) = lambda {
        let _ = writeln!(out, "\nlambda = {}", l.value());
    }
    out
}
