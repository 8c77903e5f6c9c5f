//! Backtracking search with support propagation over the integer encoding.

use std::cell::{Cell, OnceCell, RefCell};

use super::Encoding;
use crate::model::{ArithOp, Atom, BinOp, Domain, Expr, Ipm, ParamId, Relation, Term, Tuple};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Largest number of live combinations enumerated to find supports.
const SUPPORT_LIMIT: usize = 1024;

thread_local! {
    static QUERIES: Cell<u64> = const { Cell::new(0) };
}

/// Number of satisfiability queries issued on the current thread.
pub fn query_count() -> u64 {
    QUERIES.with(Cell::get)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatOutcome {
    /// A satisfying total assignment, as domain value indices.
    Sat(Vec<usize>),
    Unsat,
    /// The node budget ran out before the search finished.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("search budget of {0} nodes exhausted")]
pub struct BudgetExceeded(pub u64);

#[derive(Debug, Clone)]
enum CExpr {
    Const(bool),
    Not(Box<CExpr>),
    Bin(BinOp, Box<CExpr>, Box<CExpr>),
    Cmp(Relation, CTerm, CTerm),
}

#[derive(Debug, Clone)]
enum CTerm {
    Var(ParamId),
    /// Label identity of an enumerative variable's value, so that equal
    /// labels in different blocks compare equal.
    LabelOf(ParamId),
    Const(i128),
    Arith(ArithOp, Box<CTerm>, Box<CTerm>),
}

impl CTerm {
    /// Inclusive bounds of the term given the assigned variables. Unassigned
    /// variables range over their live values.
    fn bounds(&self, s: &Compiled, codes: &[Option<i64>], alive: &[Vec<bool>]) -> Option<(i128, i128)> {
        match self {
            CTerm::Var(p) => Some(match codes[*p] {
                Some(c) => (c as i128, c as i128),
                None => {
                    let live = &alive[*p];
                    let lo = live.iter().position(|&a| a)?;
                    let hi = live.iter().rposition(|&a| a)?;
                    let (a, b) = (s.enc.code(*p, lo) as i128, s.enc.code(*p, hi) as i128);
                    (a.min(b), a.max(b))
                }
            }),
            CTerm::LabelOf(p) => codes[*p].map(|c| {
                let l = s.label_of[*p][(c - s.enc.bounds(*p).0) as usize] as i128;
                (l, l)
            }),
            CTerm::Const(v) => Some((*v, *v)),
            CTerm::Arith(op, a, b) => {
                let (al, ah) = a.bounds(s, codes, alive)?;
                let (bl, bh) = b.bounds(s, codes, alive)?;
                Some(match op {
                    ArithOp::Add => (al + bl, ah + bh),
                    ArithOp::Sub => (al - bh, ah - bl),
                    ArithOp::Mul => {
                        let p = [al * bl, al * bh, ah * bl, ah * bh];
                        (*p.iter().min().unwrap(), *p.iter().max().unwrap())
                    }
                })
            }
        }
    }

    fn vars(&self, out: &mut Vec<ParamId>) {
        match self {
            CTerm::Var(p) | CTerm::LabelOf(p) => out.push(*p),
            CTerm::Const(_) => {}
            CTerm::Arith(_, a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

impl CExpr {
    fn eval(&self, s: &Compiled, codes: &[Option<i64>], alive: &[Vec<bool>]) -> Option<bool> {
        match self {
            CExpr::Const(b) => Some(*b),
            CExpr::Not(e) => e.eval(s, codes, alive).map(|b| !b),
            CExpr::Bin(op, l, r) => {
                let l = l.eval(s, codes, alive);
                match (op, l) {
                    (BinOp::And, Some(false)) => Some(false),
                    (BinOp::Or, Some(true)) | (BinOp::Implies, Some(false)) => Some(true),
                    _ => op.apply3(l, r.eval(s, codes, alive)),
                }
            }
            CExpr::Cmp(rel, a, b) => {
                let (al, ah) = a.bounds(s, codes, alive)?;
                let (bl, bh) = b.bounds(s, codes, alive)?;
                if al == ah && bl == bh {
                    return Some(rel.holds(al, bl));
                }
                // decided when every pair of values agrees
                let (always, never) = match rel {
                    Relation::Eq | Relation::Ne => (false, ah < bl || bh < al),
                    Relation::Lt => (ah < bl, al >= bh),
                    Relation::Le => (ah <= bl, al > bh),
                    Relation::Gt => (al > bh, ah <= bl),
                    Relation::Ge => (al >= bh, ah < bl),
                };
                match (rel, always, never) {
                    (Relation::Eq, _, true) => Some(false),
                    (Relation::Ne, _, true) => Some(true),
                    (Relation::Eq | Relation::Ne, _, _) => None,
                    (_, true, _) => Some(true),
                    (_, _, true) => Some(false),
                    _ => None,
                }
            }
        }
    }

    fn vars(&self, out: &mut Vec<ParamId>) {
        match self {
            CExpr::Const(_) => {}
            CExpr::Not(e) => e.vars(out),
            CExpr::Bin(_, l, r) => {
                l.vars(out);
                r.vars(out);
            }
            CExpr::Cmp(_, a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

struct Compiled {
    enc: Encoding,
    /// Per enumerative parameter: value index to interned label id.
    label_of: Vec<Vec<u32>>,
    constraints: Vec<CExpr>,
    /// Distinct variables of each constraint.
    scope: Vec<Vec<ParamId>>,
    /// Constraints mentioning each variable.
    watch: Vec<Vec<usize>>,
    cards: Vec<usize>,
}

/// A compiled satisfiability oracle for one model. Compilation happens once,
/// so repeated tuple queries against the same model are cheap to issue.
pub struct Solver {
    c: Compiled,
    budget: u64,
    /// Live values after propagating the constraints alone, `None` when
    /// that already fails. Shared by every query.
    root: OnceCell<Option<Vec<Vec<bool>>>>,
    components: Vec<Vec<ParamId>>,
    /// Constraint failure counts carried from one query to the next.
    weight: RefCell<Vec<u64>>,
}

impl Solver {
    pub fn new(ipm: &Ipm) -> Self {
        let enc = Encoding::new(ipm);
        let label_of = ipm
            .parameters()
            .iter()
            .enumerate()
            .map(|(p, param)| match &param.domain {
                Domain::Enumerative(values) => {
                    (0..values.len()).map(|i| ipm.label_id(p, i)).collect()
                }
                _ => Vec::new(),
            })
            .collect();
        let mut constraints = Vec::new();
        for e in ipm.constraints() {
            conjuncts(compile(ipm, &enc, e), &mut constraints);
        }
        let n = ipm.parameters().len();
        let mut watch = vec![Vec::new(); n];
        let scope: Vec<Vec<ParamId>> = constraints
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut vars = Vec::new();
                c.vars(&mut vars);
                vars.sort_unstable();
                vars.dedup();
                for &v in &vars {
                    watch[v].push(i);
                }
                vars
            })
            .collect();
        let m = constraints.len();
        let c = Compiled {
            enc,
            label_of,
            constraints,
            scope,
            watch,
            cards: ipm.cardinalities().into_iter().map(|c| c as usize).collect(),
        };
        Solver {
            components: components(&c),
            c,
            budget: DEFAULT_NODE_BUDGET,
            root: OnceCell::new(),
            weight: RefCell::new(vec![1; m]),
        }
    }

    pub fn with_budget(mut self, nodes: u64) -> Self {
        self.budget = nodes;
        self
    }

    /// Number of parameters of the compiled model.
    pub fn arity(&self) -> usize {
        self.c.cards.len()
    }

    pub fn encoding(&self) -> &Encoding {
        &self.c.enc
    }

    /// Searches for a total assignment that agrees with `fixed` wherever it
    /// is `Some` and satisfies every constraint.
    pub fn solve(&self, fixed: &[Option<usize>]) -> SatOutcome {
        QUERIES.with(|q| q.set(q.get() + 1));
        let c = &self.c;
        let n = c.cards.len();
        assert_eq!(fixed.len(), n, "partial assignment arity");
        let m = c.constraints.len();
        let Some(root) = self.root.get_or_init(|| {
            let mut st = State::new(c, c.cards.iter().map(|&k| vec![true; k]).collect());
            let mut queue: Vec<usize> = (0..m).rev().collect();
            st.propagate(c, &mut queue, &mut vec![true; m]).then_some(st.alive)
        }) else {
            return SatOutcome::Unsat;
        };
        let mut st = State::new(c, root.clone());
        let mut queue = Vec::new();
        let mut queued = vec![false; m];
        for (p, v) in fixed.iter().enumerate() {
            if let Some(v) = *v {
                assert!(v < c.cards[p], "fixed value outside the domain");
                if !st.alive[p][v] {
                    return SatOutcome::Unsat;
                }
                st.codes[p] = Some(c.enc.code(p, v));
                for &i in &c.watch[p] {
                    if !queued[i] {
                        queued[i] = true;
                        queue.push(i);
                    }
                }
            }
        }
        if !st.propagate(c, &mut queue, &mut queued) {
            return SatOutcome::Unsat;
        }
        // independent components are searched one after another
        st.weight = self.weight.take();
        let mut outcome = Some(true);
        for vars in &self.components {
            outcome = st.search(c, vars, self.budget, &mut queued);
            if outcome != Some(true) {
                break;
            }
        }
        self.weight.replace(st.weight);
        match outcome {
            Some(true) => SatOutcome::Sat(
                st.codes
                    .iter()
                    .enumerate()
                    .map(|(p, code)| c.enc.decode(p, code.expect("total")).expect("in domain"))
                    .collect(),
            ),
            Some(false) => SatOutcome::Unsat,
            None => SatOutcome::Unknown,
        }
    }

    pub fn is_solvable(&self) -> Result<bool, BudgetExceeded> {
        self.decide(&vec![None; self.c.cards.len()])
    }

    pub fn is_tuple_valid(&self, tuple: &Tuple) -> Result<bool, BudgetExceeded> {
        self.decide(&tuple.to_partial(self.c.cards.len()))
    }

    fn decide(&self, fixed: &[Option<usize>]) -> Result<bool, BudgetExceeded> {
        match self.solve(fixed) {
            SatOutcome::Sat(_) => Ok(true),
            SatOutcome::Unsat => Ok(false),
            SatOutcome::Unknown => Err(BudgetExceeded(self.budget)),
        }
    }
}

struct State {
    codes: Vec<Option<i64>>,
    alive: Vec<Vec<bool>>,
    size: Vec<usize>,
    /// Pruned `(variable, value index)` pairs, undone on backtrack.
    trail: Vec<(ParamId, usize)>,
    nodes: u64,
    /// Failure count of each constraint, steering the branching order.
    weight: Vec<u64>,
}

impl State {
    fn new(c: &Compiled, alive: Vec<Vec<bool>>) -> Self {
        State {
            codes: vec![None; c.cards.len()],
            size: alive.iter().map(|a| a.iter().filter(|&&x| x).count()).collect(),
            alive,
            trail: Vec::new(),
            nodes: 0,
            weight: vec![1; c.constraints.len()],
        }
    }

    /// Removes the values of the free variables of constraint `i` that have
    /// no support among the live values of the others. Scopes with too many
    /// live combinations are only checked by bounds. Pruned variables are
    /// appended to `changed`. False on a wipe-out.
    fn revise(&mut self, c: &Compiled, i: usize, changed: &mut Vec<ParamId>) -> bool {
        let free: Vec<ParamId> = c.scope[i]
            .iter()
            .copied()
            .filter(|&v| self.codes[v].is_none())
            .collect();
        let combos = free
            .iter()
            .try_fold(1usize, |acc, &v| acc.checked_mul(self.size[v]))
            .unwrap_or(usize::MAX);
        if free.is_empty() || combos > SUPPORT_LIMIT {
            return c.constraints[i].eval(c, &self.codes, &self.alive) != Some(false);
        }
        let live: Vec<Vec<usize>> = free
            .iter()
            .map(|&v| (0..c.cards[v]).filter(|&x| self.alive[v][x]).collect())
            .collect();
        let mut supported: Vec<Vec<bool>> = live.iter().map(|l| vec![false; l.len()]).collect();
        let mut pos = vec![0usize; free.len()];
        loop {
            for (j, &v) in free.iter().enumerate() {
                self.codes[v] = Some(c.enc.code(v, live[j][pos[j]]));
            }
            if c.constraints[i].eval(c, &self.codes, &self.alive) == Some(true) {
                for j in 0..free.len() {
                    supported[j][pos[j]] = true;
                }
            }
            // odometer step
            let mut j = 0;
            while j < free.len() {
                pos[j] += 1;
                if pos[j] < live[j].len() {
                    break;
                }
                pos[j] = 0;
                j += 1;
            }
            if j == free.len() {
                break;
            }
        }
        for &v in &free {
            self.codes[v] = None;
        }
        for (j, &v) in free.iter().enumerate() {
            let before = self.size[v];
            for (k, &x) in live[j].iter().enumerate() {
                if !supported[j][k] {
                    self.alive[v][x] = false;
                    self.size[v] -= 1;
                    self.trail.push((v, x));
                }
            }
            if self.size[v] == 0 {
                return false;
            }
            if self.size[v] < before {
                changed.push(v);
            }
        }
        true
    }

    /// Revises the queued constraints, and those watching pruned variables,
    /// until nothing changes. False on a wipe-out.
    fn propagate(&mut self, c: &Compiled, queue: &mut Vec<usize>, queued: &mut [bool]) -> bool {
        let mut changed = Vec::new();
        while let Some(i) = queue.pop() {
            queued[i] = false;
            if !self.revise(c, i, &mut changed) {
                self.weight[i] += 1;
                for j in queue.drain(..) {
                    queued[j] = false;
                }
                return false;
            }
            for v in changed.drain(..) {
                for &j in &c.watch[v] {
                    if !queued[j] {
                        queued[j] = true;
                        queue.push(j);
                    }
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, idx) = self.trail.pop().expect("non-empty trail");
            self.alive[v][idx] = true;
            self.size[v] += 1;
        }
    }

    /// `Some(true)` when a solution was found (left in `codes`), `None` when
    /// the budget ran out. Branches on the variable of `vars` with the fewest
    /// live values per unit of failure weight.
    fn search(&mut self, c: &Compiled, vars: &[ParamId], budget: u64, queued: &mut [bool]) -> Option<bool> {
        let Some(var) = vars
            .iter()
            .copied()
            .filter(|&v| self.codes[v].is_none())
            .min_by(|&a, &b| {
                let score = |v: ParamId| {
                    let w: u64 = c.watch[v].iter().map(|&i| self.weight[i]).sum();
                    self.size[v] as f64 / (w + 1) as f64
                };
                score(a).total_cmp(&score(b))
            })
        else {
            return Some(true);
        };
        for idx in 0..c.cards[var] {
            if !self.alive[var][idx] {
                continue;
            }
            self.nodes += 1;
            if self.nodes > budget {
                return None;
            }
            self.codes[var] = Some(c.enc.code(var, idx));
            let mark = self.trail.len();
            let mut queue = c.watch[var].clone();
            for &i in &queue {
                queued[i] = true;
            }
            if self.propagate(c, &mut queue, queued) {
                match self.search(c, vars, budget, queued) {
                    Some(false) => {}
                    other => return other,
                }
            }
            self.undo(mark);
            self.codes[var] = None;
        }
        Some(false)
    }
}

/// Variables grouped by shared constraints.
fn components(c: &Compiled) -> Vec<Vec<ParamId>> {
    let n = c.cards.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for scope in &c.scope {
        for w in scope.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut groups: Vec<Vec<ParamId>> = vec![Vec::new(); n];
    for v in 0..n {
        let r = find(&mut parent, v);
        groups[r].push(v);
    }
    groups.retain(|g| !g.is_empty());
    groups
}

/// Splits top-level conjunctions so each part is propagated on its own.
fn conjuncts(e: CExpr, out: &mut Vec<CExpr>) {
    match e {
        CExpr::Bin(BinOp::And, l, r) => {
            conjuncts(*l, out);
            conjuncts(*r, out);
        }
        CExpr::Not(inner) => match *inner {
            CExpr::Not(e) => conjuncts(*e, out),
            CExpr::Bin(BinOp::Or, l, r) => {
                conjuncts(CExpr::Not(l), out);
                conjuncts(CExpr::Not(r), out);
            }
            other => out.push(CExpr::Not(Box::new(other))),
        },
        other => out.push(other),
    }
}

fn compile(ipm: &Ipm, enc: &Encoding, e: &Expr) -> CExpr {
    match e {
        Expr::Not(inner) => CExpr::Not(Box::new(compile(ipm, enc, inner))),
        Expr::Binary(op, l, r) => CExpr::Bin(
            *op,
            Box::new(compile(ipm, enc, l)),
            Box::new(compile(ipm, enc, r)),
        ),
        Expr::Atom(Atom::Constant(b)) => CExpr::Const(*b),
        Expr::Atom(Atom::Literal(p)) => CExpr::Cmp(Relation::Eq, CTerm::Var(*p), CTerm::Const(1)),
        Expr::Atom(Atom::Compare { rel, lhs, rhs }) => {
            let enum_param = |t: &Term| {
                matches!(t, Term::Param(p) if matches!(ipm.parameter(*p).domain, Domain::Enumerative(_)))
            };
            let between_enums = enum_param(lhs) && enum_param(rhs);
            CExpr::Cmp(
                *rel,
                compile_term(enc, lhs, between_enums),
                compile_term(enc, rhs, between_enums),
            )
        }
    }
}

fn compile_term(enc: &Encoding, t: &Term, by_label: bool) -> CTerm {
    match t {
        Term::Param(p) if by_label => CTerm::LabelOf(*p),
        Term::Param(p) => CTerm::Var(*p),
        Term::Bool(b) => CTerm::Const(*b as i128),
        Term::Int(v) => CTerm::Const(*v as i128),
        Term::Label { param, index } => CTerm::Const(enc.code(*param, *index) as i128),
        Term::Arith(op, a, b) => CTerm::Arith(
            *op,
            Box::new(compile_term(enc, a, false)),
            Box::new(compile_term(enc, b, false)),
        ),
    }
}
