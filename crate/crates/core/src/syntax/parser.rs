//! Event and requirement parser.
//!
//! The event grammar overlaps boolean and arithmetic readings (an identifier
//! or a parenthesis can start either), so each rule returns every viable
//! parse from a position, one per end position, ordered by preference:
//! earlier alternatives first, and inside an operator loop, continuing
//! before stopping. The first parse that consumes all input wins, which
//! mirrors ordered-alternative resolution with unbounded lookahead.
//! Subtrees live in an arena and are shared between candidate parses.
//!
//! Binary operator loops fold to the left, including implication:
//! `a => b => c` is `(a => b) => c`.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::ast::*;
use super::diag::Diagnostic;
use super::lexer::{tokenize, Tok, Token};

/// Bound on nested rule invocations (roughly five per parenthesis level).
const MAX_NESTING: usize = 800;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Rule {
    BoolExpr,
    BoolTerm,
    BoolFactor,
    BoolEq,
    BoolBase,
    ArithExpr,
    ArithFactor,
    ArithBase,
}

type NodeId = usize;

#[derive(Debug, Clone)]
enum Nk {
    Leaf(ExprKind),
    Not(NodeId),
    Sign(UnOp, NodeId),
    Bin(BinOp, NodeId, NodeId),
    Abs(NodeId),
    Min(NodeId, NodeId),
    Max(NodeId, NodeId),
    Last(NodeId),
    LastN(NodeId, u32),
    Bit(NodeId, NodeId),
}

#[derive(Debug, Clone)]
struct Node {
    kind: Nk,
    span: Span,
}

/// Parses from one position: node and end position, best first.
type Parses = Rc<Vec<(NodeId, usize)>>;

/// Preference between two operator-loop choice sequences: lexicographic
/// on alternative indices, and a sequence that continues beats its prefix.
fn cmp_choices(a: &[u32], b: &[u32]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    b.len().cmp(&a.len())
}

fn dedup(v: Vec<(NodeId, usize)>) -> Vec<(NodeId, usize)> {
    let mut seen = BTreeSet::new();
    v.into_iter().filter(|(_, end)| seen.insert(*end)).collect()
}

struct Parser<'t> {
    toks: &'t [Token],
    end_offset: usize,
    nodes: Vec<Node>,
    memo: BTreeMap<(Rule, usize), Parses>,
    furthest: usize,
    expected: BTreeSet<&'static str>,
    depth: usize,
    too_deep: Option<usize>,
}

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token], end_offset: usize) -> Self {
        Parser {
            toks,
            end_offset,
            nodes: Vec::new(),
            memo: BTreeMap::new(),
            furthest: 0,
            expected: BTreeSet::new(),
            depth: 0,
            too_deep: None,
        }
    }

    fn peek(&self, pos: usize) -> Option<&Tok> {
        self.toks.get(pos).map(|t| &t.tok)
    }

    fn span(&self, from: usize, to: usize) -> Span {
        let start = self.toks.get(from).map_or(self.end_offset, |t| t.span.start);
        let end = if to == 0 { start } else { self.toks[to - 1].span.end };
        Span::new(start, end.max(start))
    }

    fn node(&mut self, kind: Nk, from: usize, to: usize) -> NodeId {
        let span = self.span(from, to);
        self.nodes.push(Node { kind, span });
        self.nodes.len() - 1
    }

    fn respan(&mut self, id: NodeId, from: usize, to: usize) -> NodeId {
        let kind = self.nodes[id].kind.clone();
        self.node(kind, from, to)
    }

    fn to_expr(&self, id: NodeId) -> Expr {
        let n = &self.nodes[id];
        let b = |c: NodeId| Box::new(self.to_expr(c));
        let kind = match &n.kind {
            Nk::Leaf(k) => k.clone(),
            Nk::Not(x) => ExprKind::Not(b(*x)),
            Nk::Sign(op, x) => ExprKind::Sign(*op, b(*x)),
            Nk::Bin(op, l, r) => ExprKind::Binary(*op, b(*l), b(*r)),
            Nk::Abs(x) => ExprKind::Abs(b(*x)),
            Nk::Min(x, y) => ExprKind::Min(b(*x), b(*y)),
            Nk::Max(x, y) => ExprKind::Max(b(*x), b(*y)),
            Nk::Last(x) => ExprKind::LastUnary(b(*x)),
            Nk::LastN(x, k) => ExprKind::LastN(b(*x), *k),
            Nk::Bit(i, v) => ExprKind::ExtractBit { index: b(*i), value: b(*v) },
        };
        Expr::new(kind, n.span)
    }

    fn miss(&mut self, pos: usize, what: &'static str) {
        if pos > self.furthest {
            self.furthest = pos;
            self.expected.clear();
        }
        if pos == self.furthest {
            self.expected.insert(what);
        }
    }

    fn eat(&mut self, pos: usize, want: &Tok) -> bool {
        if self.peek(pos) == Some(want) {
            true
        } else {
            self.miss(pos, want.describe());
            false
        }
    }

    fn rule(&mut self, r: Rule, pos: usize) -> Parses {
        if let Some(p) = self.memo.get(&(r, pos)) {
            return p.clone();
        }
        if self.depth >= MAX_NESTING {
            self.too_deep.get_or_insert(pos);
            return Rc::new(Vec::new());
        }
        self.depth += 1;
        let out = match r {
            Rule::BoolExpr => self.chain(pos, Rule::BoolTerm, |t| (t == &Tok::Implies).then_some(BinOp::Implies)),
            Rule::BoolTerm => self.chain(pos, Rule::BoolFactor, |t| (t == &Tok::Or).then_some(BinOp::Or)),
            Rule::BoolFactor => self.chain(pos, Rule::BoolEq, |t| (t == &Tok::And).then_some(BinOp::And)),
            Rule::BoolEq => self.chain(pos, Rule::BoolBase, |t| (t == &Tok::Eq).then_some(BinOp::Eq)),
            Rule::BoolBase => {
                let v = self.bool_base(pos);
                dedup(v)
            }
            Rule::ArithExpr => self.chain(pos, Rule::ArithFactor, |t| match t {
                Tok::Plus => Some(BinOp::Add),
                Tok::Minus => Some(BinOp::Sub),
                _ => None,
            }),
            Rule::ArithFactor => self.chain(pos, Rule::ArithBase, |t| match t {
                Tok::Times => Some(BinOp::Mul),
                Tok::Div => Some(BinOp::Div),
                _ => None,
            }),
            Rule::ArithBase => {
                let v = self.arith_base(pos);
                dedup(v)
            }
        };
        self.depth -= 1;
        let out = Rc::new(out);
        self.memo.insert((r, pos), out.clone());
        out
    }

    /// `sub (op sub)*`, folded to the left. Keeps the preferred parse for
    /// every end position; positions are settled in increasing order since
    /// every extension ends further right.
    fn chain(&mut self, pos: usize, sub: Rule, op_of: fn(&Tok) -> Option<BinOp>) -> Vec<(NodeId, usize)> {
        let mut best: BTreeMap<usize, (Vec<u32>, NodeId)> = BTreeMap::new();
        let offer = |best: &mut BTreeMap<usize, (Vec<u32>, NodeId)>, end: usize, key: Vec<u32>, n: NodeId| {
            let better = best.get(&end).is_none_or(|(old, _)| cmp_choices(&key, old) == Ordering::Less);
            if better {
                best.insert(end, (key, n));
            }
        };
        let firsts = self.rule(sub, pos);
        for (k, &(e, p)) in firsts.iter().enumerate() {
            offer(&mut best, p, alloc::vec![k as u32], e);
        }
        let mut cursor = pos;
        while let Some((p, (key, acc))) = best.range(cursor..).next().map(|(&p, v)| (p, v.clone())) {
            cursor = p + 1;
            let Some(op) = self.peek(p).and_then(op_of) else { continue };
            let rhs = self.rule(sub, p + 1);
            for (k, &(r, p2)) in rhs.iter().enumerate() {
                let n = self.node(Nk::Bin(op, acc, r), pos, p2);
                let mut key2 = key.clone();
                key2.push(k as u32);
                offer(&mut best, p2, key2, n);
            }
        }
        let mut out: Vec<(Vec<u32>, NodeId, usize)> = best.into_iter().map(|(p, (k, n))| (k, n, p)).collect();
        out.sort_by(|a, b| cmp_choices(&a.0, &b.0));
        out.into_iter().map(|(_, n, p)| (n, p)).collect()
    }

    fn leaf(&mut self, pos: usize, k: ExprKind) -> (NodeId, usize) {
        (self.node(Nk::Leaf(k), pos, pos + 1), pos + 1)
    }

    fn bool_base(&mut self, pos: usize) -> Vec<(NodeId, usize)> {
        let mut out = Vec::new();
        match self.peek(pos).cloned() {
            Some(Tok::True) => out.push(self.leaf(pos, ExprKind::Bool(true))),
            Some(Tok::False) => out.push(self.leaf(pos, ExprKind::Bool(false))),
            Some(Tok::Ident(name)) => out.push(self.leaf(pos, ExprKind::Var(name))),
            _ => self.miss(pos, "identifier"),
        }
        if self.peek(pos) == Some(&Tok::Not) {
            let inner = self.rule(Rule::BoolBase, pos + 1);
            for &(e, p) in inner.iter() {
                out.push((self.node(Nk::Not(e), pos, p), p));
            }
        } else {
            self.miss(pos, "'not'");
        }
        if self.eat(pos, &Tok::LPar) {
            let inner = self.rule(Rule::BoolExpr, pos + 1);
            for &(e, p) in inner.iter() {
                if self.eat(p, &Tok::RPar) {
                    out.push((self.respan(e, pos, p + 1), p + 1));
                }
            }
        }
        // relational expression
        let lhs = self.rule(Rule::ArithExpr, pos);
        for &(l, p) in lhs.iter() {
            let op = match self.peek(p) {
                Some(Tok::Eq) => BinOp::Eq,
                Some(Tok::Gt) => BinOp::Gt,
                Some(Tok::Ge) => BinOp::Ge,
                Some(Tok::Lt) => BinOp::Lt,
                Some(Tok::Le) => BinOp::Le,
                _ => {
                    self.miss(p, "relational operator");
                    continue;
                }
            };
            let rhs = self.rule(Rule::ArithExpr, p + 1);
            for &(r, p2) in rhs.iter() {
                out.push((self.node(Nk::Bin(op, l, r), pos, p2), p2));
            }
        }
        // bit extraction
        match self.peek(pos) {
            Some(Tok::Bit) => {
                let idx = self.rule(Rule::ArithExpr, pos + 1);
                for &(i, p) in idx.iter() {
                    if !self.eat(p, &Tok::Of) {
                        continue;
                    }
                    let vals = self.rule(Rule::ArithExpr, p + 1);
                    for &(v, p2) in vals.iter() {
                        out.push((self.node(Nk::Bit(i, v), pos, p2), p2));
                    }
                }
            }
            Some(Tok::ExtractBit) => {
                for (i, v, p) in self.call2(pos + 1) {
                    out.push((self.node(Nk::Bit(i, v), pos, p), p));
                }
            }
            _ => {}
        }
        out
    }

    /// `( arith , arith )` starting at `pos`.
    fn call2(&mut self, pos: usize) -> Vec<(NodeId, NodeId, usize)> {
        let mut out = Vec::new();
        if !self.eat(pos, &Tok::LPar) {
            return out;
        }
        let firsts = self.rule(Rule::ArithExpr, pos + 1);
        for &(a, p) in firsts.iter() {
            if !self.eat(p, &Tok::Comma) {
                continue;
            }
            let seconds = self.rule(Rule::ArithExpr, p + 1);
            for &(b, p2) in seconds.iter() {
                if self.eat(p2, &Tok::RPar) {
                    out.push((a, b, p2 + 1));
                }
            }
        }
        out
    }

    /// `( arith )` starting at `pos`.
    fn call1(&mut self, pos: usize) -> Vec<(NodeId, usize)> {
        let mut out = Vec::new();
        if !self.eat(pos, &Tok::LPar) {
            return out;
        }
        let args = self.rule(Rule::ArithExpr, pos + 1);
        for &(a, p) in args.iter() {
            if self.eat(p, &Tok::RPar) {
                out.push((a, p + 1));
            }
        }
        out
    }

    fn step_count(&mut self, pos: usize) -> Option<u32> {
        match self.peek(pos) {
            Some(Tok::Int(n)) if *n >= 1 && *n <= u32::MAX as i64 => Some(*n as u32),
            _ => {
                self.miss(pos, "positive integer step count");
                None
            }
        }
    }

    fn arith_base(&mut self, pos: usize) -> Vec<(NodeId, usize)> {
        let mut out = Vec::new();
        match self.peek(pos).cloned() {
            Some(Tok::Int(v)) => out.push(self.leaf(pos, ExprKind::Int(v))),
            Some(Tok::Float(v)) => out.push(self.leaf(pos, ExprKind::Float(v))),
            Some(Tok::Ident(n)) => out.push(self.leaf(pos, ExprKind::Var(n))),
            Some(Tok::LPar) => {
                let inner = self.rule(Rule::ArithExpr, pos + 1);
                for &(e, p) in inner.iter() {
                    if self.eat(p, &Tok::RPar) {
                        out.push((self.respan(e, pos, p + 1), p + 1));
                    }
                }
            }
            Some(t @ (Tok::Plus | Tok::Minus)) => {
                let sign = if t == Tok::Plus { UnOp::Plus } else { UnOp::Minus };
                let inner = self.rule(Rule::ArithBase, pos + 1);
                for &(e, p) in inner.iter() {
                    out.push((self.node(Nk::Sign(sign, e), pos, p), p));
                }
            }
            Some(Tok::AbsFn) => {
                for (a, p) in self.call1(pos + 1) {
                    out.push((self.node(Nk::Abs(a), pos, p), p));
                }
            }
            Some(Tok::AbsText) => {
                let args = self.rule(Rule::ArithExpr, pos + 1);
                for &(a, p) in args.iter() {
                    out.push((self.node(Nk::Abs(a), pos, p), p));
                }
            }
            Some(t @ (Tok::MinFn | Tok::MaxFn)) => {
                for (a, b, p) in self.call2(pos + 1) {
                    let k = if t == Tok::MinFn { Nk::Min(a, b) } else { Nk::Max(a, b) };
                    out.push((self.node(k, pos, p), p));
                }
            }
            Some(t @ (Tok::MinText | Tok::MaxText)) => {
                let firsts = self.rule(Rule::ArithExpr, pos + 1);
                for &(a, p) in firsts.iter() {
                    if !self.eat(p, &Tok::And) {
                        continue;
                    }
                    let seconds = self.rule(Rule::ArithExpr, p + 1);
                    for &(b, p2) in seconds.iter() {
                        let k = if t == Tok::MinText { Nk::Min(a, b) } else { Nk::Max(a, b) };
                        out.push((self.node(k, pos, p2), p2));
                    }
                }
            }
            Some(Tok::Last) => {
                if self.eat(pos + 1, &Tok::LPar) {
                    let args = self.rule(Rule::ArithExpr, pos + 2);
                    for &(a, p) in args.iter() {
                        match self.peek(p) {
                            Some(Tok::RPar) => out.push((self.node(Nk::Last(a), pos, p + 1), p + 1)),
                            Some(Tok::Comma) => {
                                if let Some(n) = self.step_count(p + 1) {
                                    if self.eat(p + 2, &Tok::RPar) {
                                        out.push((self.node(Nk::LastN(a, n), pos, p + 3), p + 3));
                                    }
                                }
                            }
                            _ => {
                                self.miss(p, "')'");
                                self.miss(p, "','");
                            }
                        }
                    }
                }
            }
            Some(Tok::PreviousValueOf) => {
                let args = self.rule(Rule::ArithExpr, pos + 1);
                for &(a, p) in args.iter() {
                    out.push((self.node(Nk::Last(a), pos, p), p));
                }
            }
            Some(Tok::ValueOf) => {
                let args = self.rule(Rule::ArithExpr, pos + 1);
                for &(a, p) in args.iter() {
                    if let Some(n) = self.step_count(p) {
                        if self.eat(p + 1, &Tok::StepsAgo) {
                            out.push((self.node(Nk::LastN(a, n), pos, p + 2), p + 2));
                        }
                    }
                }
            }
            _ => self.miss(pos, "arithmetic term"),
        }
        out
    }
}

fn token_text(src_base: usize, toks: &[Token], pos: usize, full: &str) -> String {
    match toks.get(pos) {
        Some(t) => full
            .get(t.span.start - src_base..t.span.end - src_base)
            .map(|s| alloc::format!("'{s}'"))
            .unwrap_or_else(|| t.tok.describe().to_string()),
        None => "end of event".to_string(),
    }
}

/// Parses an event embedded at byte offset `base` of `source`.
fn parse_event_at(source: &str, base: usize, text: &str) -> Result<Expr, Diagnostic> {
    let toks = tokenize(text, base).map_err(|e| Diagnostic::error(source, e.span, e.message))?;
    let end_offset = base + text.len();
    if toks.is_empty() {
        let mut d = Diagnostic::error(source, Span::new(end_offset, end_offset), "empty event");
        d.expected.push("event".into());
        return Err(d);
    }
    let mut p = Parser::new(&toks, end_offset);
    let parses = p.rule(Rule::BoolExpr, 0);
    if let Some(&(e, _)) = parses.iter().find(|(_, pos)| *pos == toks.len()) {
        return Ok(p.to_expr(e));
    }
    if let Some(at) = p.too_deep {
        let span = toks[at.min(toks.len() - 1)].span;
        return Err(Diagnostic::error(source, span, "expression nested too deeply"));
    }
    // the longest partial parse also counts as progress
    let best_end = parses.iter().map(|(_, q)| *q).max().unwrap_or(0);
    if best_end > p.furthest {
        p.furthest = best_end;
        p.expected.clear();
    }
    let pos = p.furthest;
    if pos == best_end && pos < toks.len() {
        for w in ["'and'", "'or'", "'implies'", "'is equal to'"] {
            p.expected.insert(w);
        }
    }
    let span = toks.get(pos).map_or(Span::new(end_offset, end_offset), |t| t.span);
    let found = token_text(base, &toks, pos, text);
    let mut d = Diagnostic::error(source, span, alloc::format!("syntax error: unexpected {found}"));
    d.expected = p.expected.iter().map(|s| s.to_string()).collect();
    Err(d)
}

/// Parses a stand-alone event.
pub fn parse_event(text: &str) -> Result<Expr, Vec<Diagnostic>> {
    parse_event_at(text, 0, text).map_err(|d| alloc::vec![d])
}

struct Cursor<'s> {
    src: &'s str,
    pos: usize,
}

impl<'s> Cursor<'s> {
    fn skip_ws(&mut self) {
        let b = self.src.as_bytes();
        while self.pos < b.len() && b[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn here(&self) -> Span {
        Span::new(self.pos, self.pos)
    }

    fn err(&self, expected: &str) -> Diagnostic {
        let rest = &self.src[self.pos..];
        let found = match rest.split_whitespace().next() {
            Some(w) => alloc::format!("'{}'", w.chars().take(24).collect::<String>()),
            None => "end of requirement".to_string(),
        };
        let mut d = Diagnostic::error(self.src, self.here(), alloc::format!("syntax error: unexpected {found}"));
        d.expected.push(alloc::format!("'{expected}'"));
        d
    }

    /// Matches whitespace-separated words and punctuation of `phrase`.
    fn try_phrase(&mut self, phrase: &str) -> bool {
        let save = self.pos;
        for piece in phrase.split(' ') {
            self.skip_ws();
            let rest = &self.src.as_bytes()[self.pos..];
            let p = piece.as_bytes();
            if !rest.starts_with(p) {
                self.pos = save;
                return false;
            }
            let last_alpha = p.last().is_some_and(|c| c.is_ascii_alphanumeric());
            if last_alpha && rest.get(p.len()).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
                self.pos = save;
                return false;
            }
            self.pos += p.len();
        }
        true
    }

    fn phrase(&mut self, phrase: &str) -> Result<(), Diagnostic> {
        if self.try_phrase(phrase) {
            Ok(())
        } else {
            Err(self.err(phrase))
        }
    }

    /// `[ ... ]`, returning the inner text and its offset.
    fn bracket(&mut self) -> Result<(&'s str, usize), Diagnostic> {
        self.skip_ws();
        if !self.src[self.pos..].starts_with('[') {
            return Err(self.err("["));
        }
        let open = self.pos;
        match self.src[open + 1..].find(']') {
            Some(rel) => {
                let inner = &self.src[open + 1..open + 1 + rel];
                self.pos = open + 2 + rel;
                Ok((inner, open + 1))
            }
            None => {
                let mut d = Diagnostic::error(self.src, Span::new(open, open + 1), "unterminated '['");
                d.expected.push("']'".into());
                Err(d)
            }
        }
    }
}

const UNITS: &[(&str, TimeUnit)] = &[
    ("simulation steps", TimeUnit::SimulationSteps),
    ("simulation step", TimeUnit::SimulationSteps),
    ("steps", TimeUnit::SimulationSteps),
    ("step", TimeUnit::SimulationSteps),
    ("milliseconds", TimeUnit::Milliseconds),
    ("millisecond", TimeUnit::Milliseconds),
    ("seconds", TimeUnit::Seconds),
    ("second", TimeUnit::Seconds),
    ("minutes", TimeUnit::Minutes),
    ("minute", TimeUnit::Minutes),
    ("hours", TimeUnit::Hours),
    ("hour", TimeUnit::Hours),
];

/// `uint unit`. A lone `0` is accepted here; `check` decides where it is legal.
fn parse_duration(source: &str, base: usize, text: &str) -> Result<Duration, Diagnostic> {
    let mut c = Cursor { src: text, pos: 0 };
    c.skip_ws();
    let start = c.pos;
    let digits = text[start..].bytes().take_while(u8::is_ascii_digit).count();
    let located = |d: Diagnostic, at: usize| {
        let mut d2 = Diagnostic::error(source, Span::new(base + at, base + at), d.message);
        d2.expected = d.expected;
        d2
    };
    if digits == 0 {
        let mut d = Diagnostic::error(source, Span::new(base + start, base + start), "expected a duration");
        d.expected.push("unsigned integer".into());
        return Err(d);
    }
    let lit = &text[start..start + digits];
    if digits > 1 && lit.starts_with('0') {
        return Err(Diagnostic::error(
            source,
            Span::new(base + start, base + start + digits),
            "duration has a leading zero",
        ));
    }
    let magnitude: u64 = lit.parse().map_err(|_| {
        Diagnostic::error(source, Span::new(base + start, base + start + digits), "duration out of range")
    })?;
    c.pos += digits;
    let unit = UNITS.iter().find(|(w, _)| c.try_phrase(w)).map(|(_, u)| *u);
    let Some(unit) = unit else {
        let mut d = located(Diagnostic::error(source, Span::default(), "expected a time unit"), c.pos);
        d.expected = UNITS.iter().step_by(2).map(|(w, _)| alloc::format!("'{w}'")).collect();
        return Err(d);
    };
    c.skip_ws();
    if c.pos != text.len() {
        return Err(located(Diagnostic::error(source, Span::default(), "unexpected text after duration"), c.pos));
    }
    Ok(Duration { magnitude, unit, span: Span::new(base + start, base + text.trim_end().len()) })
}

fn event_in(cur: &mut Cursor<'_>) -> Result<Expr, Diagnostic> {
    let (inner, off) = cur.bracket()?;
    parse_event_at(cur.src, off, inner)
}

fn duration_in(cur: &mut Cursor<'_>) -> Result<Duration, Diagnostic> {
    let (inner, off) = cur.bracket()?;
    parse_duration(cur.src, off, inner)
}

/// Parses `scope pattern`. The returned requirement has an empty id.
pub fn parse_requirement(text: &str) -> Result<Requirement, Vec<Diagnostic>> {
    parse_requirement_inner(text).map_err(|d| alloc::vec![d])
}

fn parse_requirement_inner(text: &str) -> Result<Requirement, Diagnostic> {
    let mut cur = Cursor { src: text, pos: 0 };
    let scope = if cur.try_phrase("At system start ,") {
        Scope::Initially
    } else if cur.try_phrase("At each time step") {
        cur.try_phrase(",");
        Scope::Globally
    } else {
        let mut d = cur.err("At system start,");
        d.expected.push("'At each time step,'".into());
        return Err(d);
    };
    cur.skip_ws();
    let pattern = if cur.try_phrase("if") {
        let trigger = event_in(&mut cur)?;
        cur.phrase("has been valid for")?;
        let trigger_duration = duration_in(&mut cur)?;
        cur.phrase(", then in response ,")?;
        cur.phrase("after a delay of")?;
        let delay = duration_in(&mut cur)?;
        cur.phrase(",")?;
        let response = event_in(&mut cur)?;
        cur.phrase("is valid for")?;
        let response_duration = duration_in(&mut cur)?;
        cur.phrase(".")?;
        Pattern::Response { trigger, trigger_duration, delay, response, response_duration }
    } else if cur.src[cur.pos..].starts_with('[') {
        let event = event_in(&mut cur)?;
        cur.phrase("holds .")?;
        Pattern::Invariant { event }
    } else {
        let mut d = cur.err("if [");
        d.expected.push("'['".into());
        return Err(d);
    };
    cur.skip_ws();
    if cur.pos != text.len() {
        return Err(Diagnostic::error(
            text,
            cur.here(),
            "unexpected text after the end of the requirement",
        ));
    }
    Ok(Requirement { id: String::new(), scope, pattern, source_text: text.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str) -> Expr {
        parse_event(s).unwrap_or_else(|d| panic!("{s}: {:?}", d))
    }

    fn v(n: &str) -> Expr {
        Expr::var(n)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            ev("a & b | c implies d"),
            Expr::implies(Expr::or(Expr::and(v("a"), v("b")), v("c")), v("d"))
        );
        assert_eq!(ev("a => b => c"), Expr::implies(Expr::implies(v("a"), v("b")), v("c")));
        assert_eq!(ev("a | b & c"), Expr::or(v("a"), Expr::and(v("b"), v("c"))));
        assert_eq!(ev("a = b & c"), Expr::and(Expr::eq(v("a"), v("b")), v("c")));
        assert_eq!(ev("not a = b"), Expr::eq(Expr::not(v("a")), v("b")));
    }

    #[test]
    fn arithmetic_inside_relations() {
        assert_eq!(
            ev("min(a, b) >= -c"),
            Expr::binary(BinOp::Ge, Expr::min(v("a"), v("b")), Expr::neg(v("c")))
        );
        assert_eq!(
            ev("x + 2 * y < 3 - z"),
            Expr::binary(
                BinOp::Lt,
                Expr::binary(BinOp::Add, v("x"), Expr::binary(BinOp::Mul, Expr::int(2), v("y"))),
                Expr::binary(BinOp::Sub, Expr::int(3), v("z"))
            )
        );
        assert_eq!(
            ev("(x + 1) > 2"),
            Expr::binary(BinOp::Gt, Expr::binary(BinOp::Add, v("x"), Expr::int(1)), Expr::int(2))
        );
    }

    #[test]
    fn functions_in_both_spellings() {
        assert_eq!(ev("bit 3 of status_word"), Expr::extract_bit(Expr::int(3), v("status_word")));
        assert_eq!(ev("extractBit(3, status_word)"), Expr::extract_bit(Expr::int(3), v("status_word")));
        assert_eq!(ev("the value of x 4 steps ago = 1"), Expr::eq(Expr::last_n(v("x"), 4), Expr::int(1)));
        assert_eq!(ev("last(x, 4) = 1"), Expr::eq(Expr::last_n(v("x"), 4), Expr::int(1)));
        assert_eq!(ev("last(x) = 1"), Expr::eq(Expr::last(v("x")), Expr::int(1)));
        assert_eq!(ev("the previous value of x = 1"), Expr::eq(Expr::last(v("x")), Expr::int(1)));
        assert_eq!(
            ev("the minimum of a and b is less than the maximum of c and d"),
            Expr::binary(BinOp::Lt, Expr::min(v("a"), v("b")), Expr::max(v("c"), v("d")))
        );
        assert_eq!(
            ev("the absolute value of x plus 1 > 2"),
            Expr::binary(BinOp::Gt, Expr::abs(Expr::binary(BinOp::Add, v("x"), Expr::int(1))), Expr::int(2))
        );
    }

    #[test]
    fn last_requires_literal_count() {
        let d = parse_event("last(x, y) = 1").unwrap_err();
        assert!(d[0].expected.iter().any(|e| e.contains("step count")), "{:?}", d);
        assert!(parse_event("last(x, 0) = 1").is_err());
    }

    #[test]
    fn syntax_errors_carry_locus_and_expectations() {
        let d = &parse_event("a and and b").unwrap_err()[0];
        assert_eq!((d.line, d.col), (1, 7));
        assert!(d.expected.iter().any(|e| e == "identifier"));
        let d = &parse_event("a and\n(b").unwrap_err()[0];
        assert_eq!(d.line, 2);
        assert!(d.expected.iter().any(|e| e == "')'"), "{:?}", d);
        assert!(parse_event("").is_err());
        assert!(parse_event("a b").is_err());
    }

    #[test]
    fn deep_nesting_is_a_diagnostic() {
        let s = alloc::format!("{}a{}", "(".repeat(2000), ")".repeat(2000));
        assert!(parse_event(&s).is_err());
    }

    #[test]
    fn requirement_forms() {
        let r = parse_requirement("At system start, [signal_A is equal to TRUE] holds.").unwrap();
        assert_eq!(r.scope, Scope::Initially);
        assert_eq!(
            r.pattern,
            Pattern::Invariant { event: Expr::eq(v("signal_A"), Expr::bool(true)) }
        );
        let r = parse_requirement(
            "At each time step if [a] has been valid for [2 seconds], then in response, \
             after a delay of [0 steps], [b] is valid for [1 step].",
        )
        .unwrap();
        assert_eq!(r.scope, Scope::Globally);
        let Pattern::Response { trigger_duration, delay, response_duration, .. } = r.pattern else {
            panic!()
        };
        assert_eq!(trigger_duration, Duration::new(2, TimeUnit::Seconds));
        assert_eq!(delay, Duration::steps(0));
        assert_eq!(response_duration, Duration::steps(1));
    }

    #[test]
    fn requirement_errors() {
        let d = &parse_requirement("At noon, [a] holds.").unwrap_err()[0];
        assert_eq!((d.line, d.col), (1, 1));
        let d = &parse_requirement("At each time step, [a] holds").unwrap_err()[0];
        assert!(d.expected.iter().any(|e| e.contains("holds")));
        let d = &parse_requirement("At each time step, [a & ] holds.").unwrap_err()[0];
        assert_eq!(d.col, 25);
        assert!(parse_requirement("At each time step, if [a] has been valid for [5 fortnights], then in response, after a delay of [0 steps], [b] is valid for [1 step].").is_err());
        assert!(parse_requirement("At each time step, [a] holds. extra").is_err());
    }
}
