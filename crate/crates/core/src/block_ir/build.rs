use alloc::string::String;
use alloc::vec::Vec;

use super::{BlockGraph, BlockId, BlockKind, Retrigger, Role};
use crate::dictionary::{VarKind, VariableDictionary};
use crate::semantics::{normalize, MonitorForm, SemError, StepConfig};
use crate::syntax::{BinOp, Expr, ExprKind, Requirement, Scope, UnOp};
use crate::value::{Value, ValueType};

/// Compiles a checked requirement.
pub fn build_graph(req: &Requirement, dict: &VariableDictionary, cfg: StepConfig) -> Result<BlockGraph, SemError> {
    let form = normalize(req, cfg)?;
    Ok(build_monitor_graph(&req.id, &form, dict))
}

/// Compiles an already normalized requirement.
pub fn build_monitor_graph(id: &str, form: &MonitorForm, dict: &VariableDictionary) -> BlockGraph {
    let mut b = Builder {
        g: BlockGraph {
            requirement: id.into(),
            blocks: Vec::new(),
            entries: Vec::new(),
            proof_objectives: Vec::new(),
            test_objectives: Vec::new(),
            shift: form.shift(),
        },
        dict,
    };
    let pattern = match form {
        MonitorForm::Invariant { event, .. } => b.expr(event),
        MonitorForm::Response { nr, .. } => {
            let p = b.expr(&nr.trigger);
            let held = b.push(BlockKind::DurationCheck { n: nr.t_p }, alloc::vec![p], ValueType::Bool);
            let a = b.push(BlockKind::DelayLine { n: nr.t_d + nr.t_q }, alloc::vec![held], ValueType::Bool);
            let q = b.expr(&nr.response);
            let obliged = b.push(BlockKind::DurationCheck { n: nr.t_q }, alloc::vec![q], ValueType::Bool);
            b.push(BlockKind::Implies, alloc::vec![a, obliged], ValueType::Bool)
        }
    };
    let shift = form.shift();
    let scoped = match form.scope() {
        Scope::Globally => b.scope(BlockKind::ScopeGlobally { skip: shift }, alloc::vec![pattern]),
        Scope::Initially => {
            let zero = b.scope(BlockKind::Constant { value: Value::Int(0), name: None }, Vec::new());
            let start = b.scope(BlockKind::DelayN { n: 1, initial: Some(Value::Int(1)) }, alloc::vec![zero]);
            let active = b.scope(
                BlockKind::Detector { detect_n: 1, delay: shift - 1, out_dur: 1, retrigger: Retrigger::AfterPulse },
                alloc::vec![start],
            );
            b.scope(BlockKind::ScopeInitially, alloc::vec![active, pattern])
        }
    };
    b.scope(BlockKind::ProofObjective, alloc::vec![scoped]);
    b.g
}

struct Builder<'a> {
    g: BlockGraph,
    dict: &'a VariableDictionary,
}

impl Builder<'_> {
    fn push(&mut self, kind: BlockKind, inputs: Vec<BlockId>, ty: ValueType) -> BlockId {
        self.g.push(kind, inputs, ty, Role::Logic)
    }

    fn scope(&mut self, kind: BlockKind, inputs: Vec<BlockId>) -> BlockId {
        let ty = match kind {
            BlockKind::Constant { .. } | BlockKind::DelayN { .. } => ValueType::Int,
            _ => ValueType::Bool,
        };
        self.g.push(kind, inputs, ty, Role::Scope)
    }

    fn ty(&self, id: BlockId) -> ValueType {
        self.g.block(id).out_type
    }

    fn var(&mut self, name: &str) -> BlockId {
        if let Some((_, id)) = self.g.entries.iter().find(|(n, _)| n == name) {
            return *id;
        }
        let decl = self.dict.lookup(name);
        let ty = decl.map_or(ValueType::Float, |d| d.data_type);
        let kind = match decl.map(|d| (d.kind, d.value)) {
            Some((VarKind::Constant, Some(value))) => BlockKind::Constant { value, name: Some(name.into()) },
            Some((VarKind::Calibratable, _)) => BlockKind::Calibration { name: name.into() },
            _ => BlockKind::Inport { name: name.into() },
        };
        let id = self.push(kind, Vec::new(), ty);
        self.g.entries.push((String::from(name), id));
        id
    }

    fn expr(&mut self, e: &Expr) -> BlockId {
        let lit = |v: Value| (BlockKind::Constant { value: v, name: None }, v.value_type());
        let (kind, inputs, ty) = match &e.kind {
            ExprKind::Var(n) => return self.var(n),
            ExprKind::Sign(UnOp::Plus, x) => return self.expr(x),
            ExprKind::Bool(b) => {
                let (k, t) = lit(Value::Bool(*b));
                (k, Vec::new(), t)
            }
            ExprKind::Int(i) => {
                let (k, t) = lit(Value::Int(*i));
                (k, Vec::new(), t)
            }
            ExprKind::Float(x) => {
                let (k, t) = lit(Value::Float(*x));
                (k, Vec::new(), t)
            }
            ExprKind::Not(x) => (BlockKind::Not, alloc::vec![self.expr(x)], ValueType::Bool),
            ExprKind::Sign(UnOp::Minus, x) => {
                let x = self.expr(x);
                (BlockKind::Neg, alloc::vec![x], self.ty(x))
            }
            ExprKind::Abs(x) => {
                let x = self.expr(x);
                (BlockKind::Abs, alloc::vec![x], self.ty(x))
            }
            ExprKind::LastUnary(x) => {
                let x = self.expr(x);
                (BlockKind::DelayN { n: 1, initial: None }, alloc::vec![x], self.ty(x))
            }
            ExprKind::LastN(x, n) => {
                let x = self.expr(x);
                (BlockKind::DelayN { n: *n, initial: None }, alloc::vec![x], self.ty(x))
            }
            ExprKind::ExtractBit { index, value } => {
                let i = self.expr(index);
                let v = self.expr(value);
                (BlockKind::ExtractBit, alloc::vec![i, v], ValueType::Bool)
            }
            ExprKind::Min(a, b) | ExprKind::Max(a, b) => {
                let (a, b2) = (self.expr(a), self.expr(b));
                let k = if matches!(e.kind, ExprKind::Min(..)) { BlockKind::Min } else { BlockKind::Max };
                (k, alloc::vec![a, b2], self.ty(a).promote(self.ty(b2)))
            }
            ExprKind::Binary(op, l, r) => {
                let (l, r) = (self.expr(l), self.expr(r));
                let kind = match op {
                    BinOp::Implies => BlockKind::Implies,
                    BinOp::Or => BlockKind::Or,
                    BinOp::And => BlockKind::And,
                    BinOp::Eq => BlockKind::Eq,
                    BinOp::Lt => BlockKind::Lt,
                    BinOp::Le => BlockKind::Le,
                    BinOp::Gt => BlockKind::Gt,
                    BinOp::Ge => BlockKind::Ge,
                    BinOp::Add => BlockKind::Add,
                    BinOp::Sub => BlockKind::Sub,
                    BinOp::Mul => BlockKind::Mul,
                    BinOp::Div => BlockKind::Div,
                };
                let ty = if op.is_arithmetic() { self.ty(l).promote(self.ty(r)) } else { ValueType::Bool };
                (kind, alloc::vec![l, r], ty)
            }
        };
        self.push(kind, inputs, ty)
    }
}
