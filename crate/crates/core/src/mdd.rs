//! Multi-valued decision diagrams over a model's parameters, used to count
//! valid tests without enumerating them.
//!
//! Levels follow declaration order and are never skipped: every path from
//! the root fixes each parameter exactly once before reaching the `TRUE`
//! terminal. A node whose edges all lead to `FALSE` is replaced by `FALSE`,
//! and structurally identical nodes are shared.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::model::{Atom, BinOp, Expr, Ipm};

pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

const FALSE: u32 = 0;
const TRUE: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MddError {
    #[error("constraint {0} uses arithmetic, ordering or a parameter-to-parameter comparison")]
    Unsupported(usize),
    #[error("decision diagram exceeded {0} nodes")]
    NodeBudget(usize),
}

/// False iff some constraint has an arithmetic term, an ordering relation,
/// or compares two parameters.
pub fn supports_mdd(ipm: &Ipm) -> bool {
    unsupported_constraint(ipm).is_none()
}

fn unsupported_constraint(ipm: &Ipm) -> Option<usize> {
    ipm.constraints()
        .iter()
        .position(|c| c.atoms().iter().any(|a| a.is_numeric_or_between()))
}

#[derive(Debug, Clone)]
struct Node {
    level: usize,
    children: Arc<[u32]>,
}

#[derive(Debug, Clone)]
pub struct Mdd {
    cards: Vec<usize>,
    names: Vec<String>,
    nodes: Vec<Node>,
    root: u32,
}

struct Builder<'a> {
    ipm: &'a Ipm,
    cards: Vec<usize>,
    nodes: Vec<Node>,
    unique: Vec<HashMap<Arc<[u32]>, u32>>,
    true_chain: Vec<u32>,
    apply_memo: HashMap<(BinOp, u32, u32, usize), u32>,
    negate_memo: HashMap<(u32, usize), u32>,
    budget: usize,
}

impl Builder<'_> {
    fn mk(&mut self, level: usize, children: Vec<u32>) -> Result<u32, MddError> {
        if children.iter().all(|&c| c == FALSE) {
            return Ok(FALSE);
        }
        let children: Arc<[u32]> = children.into();
        if let Some(&id) = self.unique[level].get(&children) {
            return Ok(id);
        }
        if self.nodes.len() >= self.budget {
            return Err(MddError::NodeBudget(self.budget));
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            level,
            children: children.clone(),
        });
        self.unique[level].insert(children, id);
        Ok(id)
    }

    fn children(&self, id: u32, level: usize) -> Vec<u32> {
        if id == FALSE {
            vec![FALSE; self.cards[level]]
        } else {
            self.nodes[id as usize].children.to_vec()
        }
    }

    fn apply(&mut self, op: BinOp, a: u32, b: u32, level: usize) -> Result<u32, MddError> {
        let n = self.cards.len();
        if level == n {
            return Ok(op.apply(a == TRUE, b == TRUE) as u32);
        }
        match op {
            BinOp::And if a == FALSE || b == FALSE => return Ok(FALSE),
            BinOp::And | BinOp::Or if a == b => return Ok(a),
            BinOp::Or if a == FALSE => return Ok(b),
            BinOp::Or if b == FALSE => return Ok(a),
            BinOp::Implies if a == FALSE => return Ok(self.true_chain[level]),
            _ => {}
        }
        if let Some(&id) = self.apply_memo.get(&(op, a, b, level)) {
            return Ok(id);
        }
        let (ca, cb) = (self.children(a, level), self.children(b, level));
        let mut out = Vec::with_capacity(ca.len());
        for (x, y) in ca.into_iter().zip(cb) {
            out.push(self.apply(op, x, y, level + 1)?);
        }
        let id = self.mk(level, out)?;
        self.apply_memo.insert((op, a, b, level), id);
        Ok(id)
    }

    fn negate(&mut self, a: u32, level: usize) -> Result<u32, MddError> {
        if level == self.cards.len() {
            return Ok((a == FALSE) as u32);
        }
        if a == FALSE {
            return Ok(self.true_chain[level]);
        }
        if a == self.true_chain[level] {
            return Ok(FALSE);
        }
        if let Some(&id) = self.negate_memo.get(&(a, level)) {
            return Ok(id);
        }
        let mut out = Vec::new();
        for c in self.children(a, level) {
            out.push(self.negate(c, level + 1)?);
        }
        let id = self.mk(level, out)?;
        self.negate_memo.insert((a, level), id);
        Ok(id)
    }

    /// Root of the diagram of an atom over a single parameter: the parameter's
    /// level is expanded on each value, every other level passes through.
    fn atom(&mut self, atom: &Atom) -> Result<u32, MddError> {
        let expr = Expr::Atom(atom.clone());
        let params = expr.params();
        let Some(&p) = params.first() else {
            let holds = expr.eval_indices(self.ipm, &vec![0; self.cards.len()]);
            return Ok(if holds { self.true_chain[0] } else { FALSE });
        };
        let mut values = vec![0; self.cards.len()];
        let below = self.true_chain[p + 1];
        let children = (0..self.cards[p])
            .map(|v| {
                values[p] = v;
                if expr.eval_indices(self.ipm, &values) {
                    below
                } else {
                    FALSE
                }
            })
            .collect();
        let mut id = self.mk(p, children)?;
        for level in (0..p).rev() {
            id = self.mk(level, vec![id; self.cards[level]])?;
        }
        Ok(id)
    }

    fn compile(&mut self, e: &Expr) -> Result<u32, MddError> {
        match e {
            Expr::Not(inner) => {
                let a = self.compile(inner)?;
                self.negate(a, 0)
            }
            Expr::Binary(op, l, r) => {
                let a = self.compile(l)?;
                let b = self.compile(r)?;
                self.apply(*op, a, b, 0)
            }
            Expr::Atom(atom) => self.atom(atom),
        }
    }
}

impl Mdd {
    /// Diagram of all tests (`with_constraints = false`) or of the valid ones,
    /// conjoining the constraints one at a time.
    pub fn build(ipm: &Ipm, with_constraints: bool) -> Result<Mdd, MddError> {
        Self::build_with_budget(ipm, with_constraints, DEFAULT_NODE_BUDGET)
    }

    pub fn build_with_budget(
        ipm: &Ipm,
        with_constraints: bool,
        budget: usize,
    ) -> Result<Mdd, MddError> {
        if with_constraints {
            if let Some(i) = unsupported_constraint(ipm) {
                return Err(MddError::Unsupported(i));
            }
        }
        let cards: Vec<usize> = ipm.cardinalities().into_iter().map(|c| c as usize).collect();
        let n = cards.len();
        let mut b = Builder {
            ipm,
            cards: cards.clone(),
            nodes: vec![
                Node {
                    level: n,
                    children: Arc::from([]),
                },
                Node {
                    level: n,
                    children: Arc::from([]),
                },
            ],
            unique: vec![HashMap::new(); n],
            true_chain: vec![TRUE; n + 1],
            apply_memo: HashMap::new(),
            negate_memo: HashMap::new(),
            budget: budget.max(2),
        };
        for level in (0..n).rev() {
            b.true_chain[level] = b.mk(level, vec![b.true_chain[level + 1]; cards[level]])?;
        }
        let mut root = b.true_chain[0];
        if with_constraints {
            for c in ipm.constraints() {
                let d = b.compile(c)?;
                root = b.apply(BinOp::And, root, d, 0)?;
            }
        }
        Ok(Mdd {
            cards,
            names: ipm.parameters().iter().map(|p| p.name.clone()).collect(),
            nodes: b.nodes,
            root,
        })
    }

    /// Number of assignments whose path ends in `TRUE`.
    pub fn cardinality(&self) -> BigUint {
        self.count_with_visits().0
    }

    /// Cardinality plus the number of distinct nodes the memoized count
    /// visited.
    pub fn count_with_visits(&self) -> (BigUint, usize) {
        let mut memo: HashMap<u32, BigUint> = HashMap::new();
        let mut visits = 0;
        let total = self.count(self.root, &mut memo, &mut visits);
        (total, visits)
    }

    fn count(&self, id: u32, memo: &mut HashMap<u32, BigUint>, visits: &mut usize) -> BigUint {
        match id {
            FALSE => return BigUint::zero(),
            TRUE => return BigUint::one(),
            _ => {}
        }
        if let Some(c) = memo.get(&id) {
            return c.clone();
        }
        *visits += 1;
        let mut total = BigUint::zero();
        for &child in self.nodes[id as usize].children.iter() {
            total += self.count(child, memo, visits);
        }
        memo.insert(id, total.clone());
        total
    }

    /// Follows the path of a total assignment of value indices.
    pub fn evaluate(&self, values: &[usize]) -> bool {
        let mut id = self.root;
        while id > TRUE {
            let node = &self.nodes[id as usize];
            id = node.children[values[node.level]];
        }
        id == TRUE
    }

    /// Non-terminal nodes reachable from the root.
    pub fn node_count(&self) -> usize {
        self.reachable().len()
    }

    fn reachable(&self) -> Vec<u32> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        let mut out = Vec::new();
        while let Some(id) = stack.pop() {
            if id <= TRUE || seen[id as usize] {
                continue;
            }
            seen[id as usize] = true;
            out.push(id);
            stack.extend(self.nodes[id as usize].children.iter().copied());
        }
        out.sort_unstable();
        out
    }

    pub fn levels(&self) -> usize {
        self.cards.len()
    }

    /// Graphviz rendering; edges to `FALSE` are omitted.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph mdd {\n  T [shape=box];\n");
        for id in self.reachable() {
            let node = &self.nodes[id as usize];
            let _ = writeln!(out, "  n{id} [label=\"{}\"];", self.names[node.level]);
            for (v, &child) in node.children.iter().enumerate() {
                match child {
                    FALSE => {}
                    TRUE => {
                        let _ = writeln!(out, "  n{id} -> T [label=\"{v}\"];");
                    }
                    c => {
                        let _ = writeln!(out, "  n{id} -> n{c} [label=\"{v}\"];");
                    }
                }
            }
        }
        if self.root == TRUE {
            out.push_str("  root -> T;\n");
        }
        out.push_str("}\n");
        out
    }
}
