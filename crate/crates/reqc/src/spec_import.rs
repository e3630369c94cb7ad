//! Reader for the SPEC XML documents written by the `spec-xml` exporter.
//! Used to check that exports carry the whole formula.

use reqc_core::exporters::{op_tag, SPEC_SCHEMA};
use reqc_core::syntax::{BinOp, Duration, Expr, ExprKind, Pattern, Requirement, Scope, Span, TimeUnit, UnOp};
use roxmltree::Node;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImportError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("not a {SPEC_SCHEMA} document")]
    Schema,
    #[error("missing element <{0}>")]
    Missing(&'static str),
    #[error("element <{tag}>: bad or missing attribute '{attr}'")]
    Attribute { tag: String, attr: &'static str },
    #[error("unknown element <{0}>")]
    Unknown(String),
    #[error("element <{0}> has the wrong number of operands")]
    Arity(String),
}

const BINARY: [BinOp; 12] = [
    BinOp::Implies,
    BinOp::Or,
    BinOp::And,
    BinOp::Eq,
    BinOp::Lt,
    BinOp::Le,
    BinOp::Gt,
    BinOp::Ge,
    BinOp::Add,
    BinOp::Sub,
    BinOp::Mul,
    BinOp::Div,
];

fn attr<'a, T: std::str::FromStr>(n: Node<'a, '_>, name: &'static str) -> Result<T, ImportError> {
    n.attribute(name)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| ImportError::Attribute { tag: n.tag_name().name().into(), attr: name })
}

fn elements<'a, 'i>(n: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    n.children().filter(|c| c.is_element())
}

fn event(n: Node) -> Result<Expr, ImportError> {
    let tag = n.tag_name().name();
    let kids = elements(n).map(event).collect::<Result<Vec<_>, _>>()?;
    let arity = |k: usize| if kids.len() == k { Ok(()) } else { Err(ImportError::Arity(tag.into())) };
    let leaf = |k: ExprKind| Ok(Expr::new(k, Span::default()));
    match tag {
        "var" => return leaf(ExprKind::Var(attr(n, "name")?)),
        "bool" => return leaf(ExprKind::Bool(attr(n, "value")?)),
        "int" => return leaf(ExprKind::Int(attr(n, "value")?)),
        "float" => return leaf(ExprKind::Float(attr(n, "value")?)),
        _ => {}
    }
    if let Some(op) = BINARY.into_iter().find(|op| op_tag(*op) == tag) {
        arity(2)?;
        let mut it = kids.into_iter();
        return Ok(Expr::binary(op, it.next().unwrap(), it.next().unwrap()));
    }
    let unary = matches!(tag, "not" | "neg" | "plus" | "abs" | "last");
    arity(if unary { 1 } else { 2 })?;
    let mut it = kids.into_iter().map(Box::new);
    let mut next = || it.next().unwrap();
    let kind = match tag {
        "not" => ExprKind::Not(next()),
        "neg" => ExprKind::Sign(UnOp::Minus, next()),
        "plus" => ExprKind::Sign(UnOp::Plus, next()),
        "abs" => ExprKind::Abs(next()),
        "last" => match n.attribute("steps") {
            Some(_) => ExprKind::LastN(next(), attr(n, "steps")?),
            None => ExprKind::LastUnary(next()),
        },
        "min" => ExprKind::Min(next(), next()),
        "max" => ExprKind::Max(next(), next()),
        "extract-bit" => ExprKind::ExtractBit { index: next(), value: next() },
        t => return Err(ImportError::Unknown(t.into())),
    };
    Ok(Expr::new(kind, Span::default()))
}

fn duration(n: Node) -> Result<Duration, ImportError> {
    let unit: String = attr(n, "unit")?;
    let unit = TimeUnit::parse(&unit).ok_or(ImportError::Attribute { tag: n.tag_name().name().into(), attr: "unit" })?;
    Ok(Duration::new(attr(n, "magnitude")?, unit))
}

fn only_event(n: Node) -> Result<Expr, ImportError> {
    let mut it = elements(n);
    match (it.next(), it.next()) {
        (Some(e), None) => event(e),
        _ => Err(ImportError::Arity(n.tag_name().name().into())),
    }
}

/// Rebuilds the requirement. Source spans are not preserved.
pub fn import_spec(xml: &str) -> Result<Requirement, ImportError> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| ImportError::Xml(e.to_string()))?;
    let root = doc.root_element();
    if root.attribute("schema") != Some(SPEC_SCHEMA) {
        return Err(ImportError::Schema);
    }
    let req = elements(root).find(|c| c.has_tag_name("requirement")).ok_or(ImportError::Missing("requirement"))?;
    let el = |name: &'static str| req.descendants().find(|c| c.has_tag_name(name)).ok_or(ImportError::Missing(name));
    let scope = el("scope")?;
    if scope.attribute("kind") != Some("globally") {
        return Err(ImportError::Attribute { tag: "scope".into(), attr: "kind" });
    }
    let pattern = el("pattern")?;
    let pattern = match pattern.attribute("kind") {
        Some("invariant") => Pattern::Invariant { event: only_event(el("event")?)? },
        Some("response") => Pattern::Response {
            trigger: only_event(el("trigger")?)?,
            trigger_duration: duration(el("trigger")?)?,
            delay: duration(el("delay")?)?,
            response: only_event(el("response")?)?,
            response_duration: duration(el("response")?)?,
        },
        _ => return Err(ImportError::Attribute { tag: "pattern".into(), attr: "kind" }),
    };
    let id: String = attr(req, "id")?;
    Ok(Requirement::new(&id, Scope::Globally, pattern))
}
