//! Reduced, ordered decision diagrams over a pluggable algebra.
//!
//! A [`Manager`] owns every node. Nodes are hash-consed through a unique
//! table, so two handles are equal iff they denote the same function
//! (for the manager's variable order). Binary and unary operations of the
//! manager's [`AlgebraDescriptor`] are lifted to diagrams by Shannon
//! expansion, memoized in an operation cache that lives as long as the
//! manager. There is no garbage collection.
//!
//! Variables are either plain Boolean variables ([`Manager::new_var`]) or
//! feature predicates `x[feature] <= threshold` ([`Manager::predicate_var`]).
//! The order is fixed by the variable keys, not by creation time: plain
//! variables first (in creation order), then predicates sorted by feature
//! index and ascending threshold. Registering a predicate later shifts the
//! levels of the ones after it, but never changes the relative order of
//! existing variables, so existing diagrams stay canonical.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use hashbrown::{HashMap, HashSet};

use crate::algebra::{AlgebraDescriptor, AlgebraError, AlgebraValue, BinaryFn, UnaryFn};

static NEXT_MANAGER_ID: AtomicU32 = AtomicU32::new(1);

const TERMINAL_LEVEL: u32 = u32::MAX;

/// Handle to a node. Only meaningful for the manager that issued it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct NodeRef {
    manager: u32,
    index: u32,
}

impl NodeRef {
    /// Position of the node in its manager's store.
    pub fn index(self) -> u32 {
        self.index
    }
}

/// Stable variable identity. Use [`Manager::level`] for its position in the
/// current order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn id(self) -> u32 {
        self.0
    }
}

/// `x[feature] <= threshold`; the true branch is taken when it holds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Predicate {
    pub feature: usize,
    pub threshold: f64,
}

impl Predicate {
    pub fn holds(&self, x: f64) -> bool {
        x <= self.threshold
    }
}

#[derive(Clone, Copy, Debug)]
enum VarKey {
    Plain(u32),
    Predicate(Predicate),
}

fn key_cmp(a: &VarKey, b: &VarKey) -> Ordering {
    match (a, b) {
        (VarKey::Plain(x), VarKey::Plain(y)) => x.cmp(y),
        (VarKey::Plain(_), VarKey::Predicate(_)) => Ordering::Less,
        (VarKey::Predicate(_), VarKey::Plain(_)) => Ordering::Greater,
        (VarKey::Predicate(p), VarKey::Predicate(q)) => p
            .feature
            .cmp(&q.feature)
            .then(p.threshold.total_cmp(&q.threshold)),
    }
}

fn threshold_bits(t: f64) -> u64 {
    if t == 0.0 {
        0
    } else {
        t.to_bits()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Terminal(AlgebraValue),
    /// `hi` is taken when the variable is true, `lo` when it is false.
    Inner { var: Var, hi: NodeRef, lo: NodeRef },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeCount {
    pub inner: usize,
    pub terminal: usize,
}

impl NodeCount {
    pub fn total(&self) -> usize {
        self.inner + self.terminal
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DdError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("algebra `{algebra}` has no {arity} operation `{op}`")]
    UnknownOp {
        algebra: String,
        op: String,
        arity: &'static str,
    },
    #[error("node handle belongs to a different manager")]
    ForeignNode,
    #[error("variable {0:?} is not registered in this manager")]
    UnknownVar(Var),
    #[error("variable order violated: level {level} is not above child level {child}")]
    OrderViolation { level: usize, child: usize },
    #[error("no truth value for the variable at level {0}")]
    MissingAssignment(usize),
    #[error("no value for feature {0}")]
    MissingFeature(usize),
    #[error("variable at level {0} is not a feature predicate")]
    NotAPredicate(usize),
    #[error("truth table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("predicate threshold must be finite")]
    NonFiniteThreshold,
    #[error("structural invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum CacheKey {
    Binary(u16, u32, u32),
    Unary(u16, u32),
    Select(Var, u32, u32),
}

/// The diagram universe: variable order, unique table and operation cache.
pub struct Manager {
    id: u32,
    algebra: AlgebraDescriptor,
    keys: Vec<VarKey>,
    levels: Vec<u32>,
    order: Vec<Var>,
    predicate_vars: HashMap<(usize, u64), Var>,
    plain_vars: u32,
    nodes: Vec<Node>,
    inner_table: HashMap<(Var, u32, u32), u32>,
    terminal_table: HashMap<AlgebraValue, u32>,
    cache: HashMap<CacheKey, u32>,
}

impl core::fmt::Debug for Manager {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Manager")
            .field("id", &self.id)
            .field("algebra", &self.algebra.name())
            .field("vars", &self.order.len())
            .field("nodes", &self.nodes.len())
            .field("cache", &self.cache.len())
            .finish()
    }
}

impl Manager {
    pub fn new(algebra: AlgebraDescriptor) -> Self {
        Manager {
            id: NEXT_MANAGER_ID.fetch_add(1, AtomicOrdering::Relaxed),
            algebra,
            keys: Vec::new(),
            levels: Vec::new(),
            order: Vec::new(),
            predicate_vars: HashMap::new(),
            plain_vars: 0,
            nodes: Vec::new(),
            inner_table: HashMap::new(),
            terminal_table: HashMap::new(),
            cache: HashMap::new(),
        }
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    // ---- variables ----

    fn insert_var(&mut self, key: VarKey) -> Var {
        let var = Var(self.keys.len() as u32);
        let pos = self
            .order
            .partition_point(|v| key_cmp(&self.keys[v.0 as usize], &key) == Ordering::Less);
        self.keys.push(key);
        self.levels.push(pos as u32);
        self.order.insert(pos, var);
        for (level, v) in self.order.iter().enumerate().skip(pos + 1) {
            self.levels[v.0 as usize] = level as u32;
        }
        var
    }

    /// A fresh plain Boolean variable, ordered after all earlier plain ones.
    pub fn new_var(&mut self) -> Var {
        let seq = self.plain_vars;
        self.plain_vars += 1;
        self.insert_var(VarKey::Plain(seq))
    }

    /// The variable for `x[feature] <= threshold`, registering it on first use.
    pub fn predicate_var(&mut self, feature: usize, threshold: f64) -> Result<Var, DdError> {
        if !threshold.is_finite() {
            return Err(DdError::NonFiniteThreshold);
        }
        let threshold = if threshold == 0.0 { 0.0 } else { threshold };
        let lookup = (feature, threshold_bits(threshold));
        if let Some(&v) = self.predicate_vars.get(&lookup) {
            return Ok(v);
        }
        let v = self.insert_var(VarKey::Predicate(Predicate { feature, threshold }));
        self.predicate_vars.insert(lookup, v);
        Ok(v)
    }

    pub fn var_count(&self) -> usize {
        self.order.len()
    }

    /// Current position of `var` in the order (0 = closest to the root).
    pub fn level(&self, var: Var) -> usize {
        self.levels[var.0 as usize] as usize
    }

    pub fn var_at_level(&self, level: usize) -> Option<Var> {
        self.order.get(level).copied()
    }

    /// Variables from top to bottom.
    pub fn vars_in_order(&self) -> &[Var] {
        &self.order
    }

    pub fn predicate(&self, var: Var) -> Option<Predicate> {
        match self.keys.get(var.0 as usize)? {
            VarKey::Predicate(p) => Some(*p),
            VarKey::Plain(_) => None,
        }
    }

    fn check_var(&self, var: Var) -> Result<(), DdError> {
        if (var.0 as usize) < self.keys.len() {
            Ok(())
        } else {
            Err(DdError::UnknownVar(var))
        }
    }

    // ---- nodes ----

    fn handle(&self, index: u32) -> NodeRef {
        NodeRef {
            manager: self.id,
            index,
        }
    }

    fn own(&self, f: NodeRef) -> Result<u32, DdError> {
        if f.manager == self.id && (f.index as usize) < self.nodes.len() {
            Ok(f.index)
        } else {
            Err(DdError::ForeignNode)
        }
    }

    /// True if `f` was issued by this manager.
    pub fn owns(&self, f: NodeRef) -> bool {
        self.own(f).is_ok()
    }

    /// The node behind `f`.
    ///
    /// Panics if `f` belongs to another manager; use [`Manager::owns`] first
    /// when the origin of a handle is uncertain.
    pub fn node(&self, f: NodeRef) -> &Node {
        let i = self.own(f).expect("node handle from a different manager");
        &self.nodes[i as usize]
    }

    /// Terminal value of `f`, or `None` for inner nodes.
    pub fn value(&self, f: NodeRef) -> Option<&AlgebraValue> {
        match self.node(f) {
            Node::Terminal(v) => Some(v),
            Node::Inner { .. } => None,
        }
    }

    pub fn is_terminal(&self, f: NodeRef) -> bool {
        matches!(self.node(f), Node::Terminal(_))
    }

    /// Level of the top variable of `f`, `None` for terminals.
    pub fn top_level(&self, f: NodeRef) -> Option<usize> {
        match self.raw_level(self.own(f).ok()?) {
            TERMINAL_LEVEL => None,
            l => Some(l as usize),
        }
    }

    /// Number of nodes held by the unique table (reachable or not).
    pub fn stored_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    /// Drops every memoized operation result. Node identity is unaffected.
    pub fn clear_cache(&mut self) {
        self.cache.clear();
    }

    #[inline]
    fn raw_level(&self, i: u32) -> u32 {
        match &self.nodes[i as usize] {
            Node::Terminal(_) => TERMINAL_LEVEL,
            Node::Inner { var, .. } => self.levels[var.0 as usize],
        }
    }

    #[inline]
    fn children(&self, i: u32) -> (u32, u32) {
        match &self.nodes[i as usize] {
            Node::Inner { hi, lo, .. } => (hi.index, lo.index),
            Node::Terminal(_) => (i, i),
        }
    }

    #[inline]
    fn cofactors(&self, i: u32, level: u32) -> (u32, u32) {
        if self.raw_level(i) == level {
            self.children(i)
        } else {
            (i, i)
        }
    }

    fn terminal_value(&self, i: u32) -> Option<&AlgebraValue> {
        match &self.nodes[i as usize] {
            Node::Terminal(v) => Some(v),
            Node::Inner { .. } => None,
        }
    }

    fn intern_terminal(&mut self, value: AlgebraValue) -> Result<u32, DdError> {
        self.algebra.carrier().check(&value)?;
        if let Some(&i) = self.terminal_table.get(&value) {
            return Ok(i);
        }
        let value = value.canonicalize();
        let i = self.nodes.len() as u32;
        self.nodes.push(Node::Terminal(value.clone()));
        self.terminal_table.insert(value, i);
        Ok(i)
    }

    /// Reduction rules without checks; callers guarantee ordering.
    fn intern_inner(&mut self, var: Var, hi: u32, lo: u32) -> u32 {
        if hi == lo {
            return hi;
        }
        if let Some(&i) = self.inner_table.get(&(var, hi, lo)) {
            return i;
        }
        let i = self.nodes.len() as u32;
        self.nodes.push(Node::Inner {
            var,
            hi: self.handle(hi),
            lo: self.handle(lo),
        });
        self.inner_table.insert((var, hi, lo), i);
        i
    }

    /// The canonical terminal for `value`.
    pub fn constant(&mut self, value: impl Into<AlgebraValue>) -> Result<NodeRef, DdError> {
        let i = self.intern_terminal(value.into())?;
        Ok(self.handle(i))
    }

    /// A distinguished element of the algebra (`"zero"`, `"one"`, ...).
    pub fn element(&mut self, name: &str) -> Result<NodeRef, DdError> {
        let v = self
            .algebra
            .element(name)
            .cloned()
            .ok_or_else(|| DdError::UnknownOp {
                algebra: self.algebra.name().to_string(),
                op: name.to_string(),
                arity: "nullary",
            })?;
        self.constant(v)
    }

    /// `one` where `var` holds, `zero` elsewhere.
    pub fn indicator(&mut self, var: Var) -> Result<NodeRef, DdError> {
        let one = self.element("one")?;
        let zero = self.element("zero")?;
        self.mk(var, one, zero)
    }

    /// Node with `var` on top; returns `hi` when both children coincide.
    /// `var` must lie strictly above the top variables of both children.
    pub fn mk(&mut self, var: Var, hi: NodeRef, lo: NodeRef) -> Result<NodeRef, DdError> {
        self.check_var(var)?;
        let (h, l) = (self.own(hi)?, self.own(lo)?);
        let level = self.levels[var.0 as usize];
        for c in [h, l] {
            let child = self.raw_level(c);
            if child <= level {
                return Err(DdError::OrderViolation {
                    level: level as usize,
                    child: child as usize,
                });
            }
        }
        let i = self.intern_inner(var, h, l);
        Ok(self.handle(i))
    }

    // ---- operations ----

    fn binary(&self, op: &str) -> Result<(u16, BinaryFn, bool), DdError> {
        self.algebra
            .binary_op(op)
            .map(|(i, o)| (i as u16, o.func, o.commutative))
            .ok_or_else(|| DdError::UnknownOp {
                algebra: self.algebra.name().to_string(),
                op: op.to_string(),
                arity: "binary",
            })
    }

    fn unary(&self, op: &str) -> Result<(u16, UnaryFn), DdError> {
        self.algebra
            .unary_op(op)
            .map(|(i, o)| (i as u16, o.func))
            .ok_or_else(|| DdError::UnknownOp {
                algebra: self.algebra.name().to_string(),
                op: op.to_string(),
                arity: "unary",
            })
    }

    /// Lifts the binary operation `op` to diagrams: the result maps every
    /// assignment `a` to `op(f(a), g(a))`.
    pub fn apply2(&mut self, op: &str, f: NodeRef, g: NodeRef) -> Result<NodeRef, DdError> {
        let (id, func, commutative) = self.binary(op)?;
        let (f, g) = (self.own(f)?, self.own(g)?);
        let r = self.apply2_rec(id, func, commutative, f, g)?;
        Ok(self.handle(r))
    }

    fn apply2_rec(
        &mut self,
        id: u16,
        func: BinaryFn,
        commutative: bool,
        f: u32,
        g: u32,
    ) -> Result<u32, DdError> {
        let key = if commutative && g < f {
            CacheKey::Binary(id, g, f)
        } else {
            CacheKey::Binary(id, f, g)
        };
        if let Some(&r) = self.cache.get(&key) {
            return Ok(r);
        }
        let (lf, lg) = (self.raw_level(f), self.raw_level(g));
        let r = if lf == TERMINAL_LEVEL && lg == TERMINAL_LEVEL {
            let v = {
                let a = self.terminal_value(f).expect("terminal");
                let b = self.terminal_value(g).expect("terminal");
                func(a, b)?
            };
            self.intern_terminal(v)?
        } else {
            let level = lf.min(lg);
            let (f1, f0) = self.cofactors(f, level);
            let (g1, g0) = self.cofactors(g, level);
            let hi = self.apply2_rec(id, func, commutative, f1, g1)?;
            let lo = self.apply2_rec(id, func, commutative, f0, g0)?;
            let var = self.order[level as usize];
            self.intern_inner(var, hi, lo)
        };
        self.cache.insert(key, r);
        Ok(r)
    }

    /// Maps every terminal through the unary operation `op`; terminals that
    /// become equal merge and redundant tests disappear.
    pub fn apply1(&mut self, op: &str, f: NodeRef) -> Result<NodeRef, DdError> {
        let (id, func) = self.unary(op)?;
        let f = self.own(f)?;
        let r = self.apply1_rec(id, func, f)?;
        Ok(self.handle(r))
    }

    fn apply1_rec(&mut self, id: u16, func: UnaryFn, f: u32) -> Result<u32, DdError> {
        let key = CacheKey::Unary(id, f);
        if let Some(&r) = self.cache.get(&key) {
            return Ok(r);
        }
        let r = match &self.nodes[f as usize] {
            Node::Terminal(v) => {
                let v = func(v)?;
                self.intern_terminal(v)?
            }
            &Node::Inner { var, hi, lo } => {
                let hi = self.apply1_rec(id, func, hi.index)?;
                let lo = self.apply1_rec(id, func, lo.index)?;
                self.intern_inner(var, hi, lo)
            }
        };
        self.cache.insert(key, r);
        Ok(r)
    }

    /// If-then-else on a single variable: `var ? hi : lo`, for children in
    /// any order relative to `var` (they may even test `var` themselves).
    pub fn select(&mut self, var: Var, hi: NodeRef, lo: NodeRef) -> Result<NodeRef, DdError> {
        self.check_var(var)?;
        let (h, l) = (self.own(hi)?, self.own(lo)?);
        let r = self.select_rec(var, h, l);
        Ok(self.handle(r))
    }

    fn select_rec(&mut self, var: Var, hi: u32, lo: u32) -> u32 {
        if hi == lo {
            return hi;
        }
        let lv = self.levels[var.0 as usize];
        let top = self.raw_level(hi).min(self.raw_level(lo));
        if lv < top {
            return self.intern_inner(var, hi, lo);
        }
        let key = CacheKey::Select(var, hi, lo);
        if let Some(&r) = self.cache.get(&key) {
            return r;
        }
        let r = if lv == top {
            let (h1, _) = self.cofactors(hi, lv);
            let (_, l0) = self.cofactors(lo, lv);
            self.intern_inner(var, h1, l0)
        } else {
            let (h1, h0) = self.cofactors(hi, top);
            let (l1, l0) = self.cofactors(lo, top);
            let r1 = self.select_rec(var, h1, l1);
            let r0 = self.select_rec(var, h0, l0);
            let split = self.order[top as usize];
            self.intern_inner(split, r1, r0)
        };
        self.cache.insert(key, r);
        r
    }

    // ---- evaluation ----

    /// Follows `hi` where `bits[level]` is true. `bits` is indexed by level.
    pub fn eval_assignment(&self, f: NodeRef, bits: &[bool]) -> Result<&AlgebraValue, DdError> {
        let mut i = self.own(f)?;
        loop {
            match &self.nodes[i as usize] {
                Node::Terminal(v) => return Ok(v),
                Node::Inner { var, hi, lo } => {
                    let level = self.level(*var);
                    let bit = *bits.get(level).ok_or(DdError::MissingAssignment(level))?;
                    i = if bit { hi.index } else { lo.index };
                }
            }
        }
    }

    /// Evaluates predicate variables against a feature vector indexed by
    /// feature number. NaN counts as a missing value.
    pub fn eval_features(&self, f: NodeRef, x: &[f64]) -> Result<&AlgebraValue, DdError> {
        let mut i = self.own(f)?;
        loop {
            match &self.nodes[i as usize] {
                Node::Terminal(v) => return Ok(v),
                Node::Inner { var, hi, lo } => {
                    let p = self
                        .predicate(*var)
                        .ok_or_else(|| DdError::NotAPredicate(self.level(*var)))?;
                    let xv = x
                        .get(p.feature)
                        .copied()
                        .filter(|v| !v.is_nan())
                        .ok_or(DdError::MissingFeature(p.feature))?;
                    i = if p.holds(xv) { hi.index } else { lo.index };
                }
            }
        }
    }

    // ---- structure ----

    /// Reachable nodes, parents before children: inner nodes by ascending
    /// level, terminals last; ties keep depth-first (hi before lo)
    /// discovery order, so the result is a pure function of the diagram.
    pub fn iter_nodes(&self, f: NodeRef) -> Vec<NodeRef> {
        let root = self.own(f).expect("node handle from a different manager");
        let mut seen = HashSet::new();
        let mut found = Vec::new();
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            if !seen.insert(i) {
                continue;
            }
            found.push(i);
            if let Node::Inner { hi, lo, .. } = &self.nodes[i as usize] {
                stack.push(lo.index);
                stack.push(hi.index);
            }
        }
        // stable sort keeps discovery order within a level
        found.sort_by_key(|&i| self.raw_level(i));
        found.into_iter().map(|i| self.handle(i)).collect()
    }

    pub fn node_count(&self, f: NodeRef) -> NodeCount {
        self.iter_nodes(f)
            .into_iter()
            .fold(NodeCount::default(), |mut c, n| {
                if self.is_terminal(n) {
                    c.terminal += 1;
                } else {
                    c.inner += 1;
                }
                c
            })
    }

    /// Reachable terminals in [`Manager::iter_nodes`] order.
    pub fn terminals(&self, f: NodeRef) -> Vec<NodeRef> {
        self.iter_nodes(f)
            .into_iter()
            .filter(|&n| self.is_terminal(n))
            .collect()
    }

    /// Scans everything reachable from `f` for the reduction and ordering
    /// invariants and for unique-table consistency.
    pub fn check_invariants(&self, f: NodeRef) -> Result<(), DdError> {
        self.own(f)?;
        for n in self.iter_nodes(f) {
            match self.node(n) {
                Node::Terminal(v) => {
                    if self.terminal_table.get(v) != Some(&n.index) {
                        return Err(DdError::Invariant("terminal not canonical".into()));
                    }
                }
                Node::Inner { var, hi, lo } => {
                    if hi == lo {
                        return Err(DdError::Invariant("redundant test".into()));
                    }
                    let level = self.levels[var.0 as usize];
                    if self.raw_level(hi.index) <= level || self.raw_level(lo.index) <= level {
                        return Err(DdError::Invariant("child not below parent".into()));
                    }
                    if self.inner_table.get(&(*var, hi.index, lo.index)) != Some(&n.index) {
                        return Err(DdError::Invariant("duplicate inner node".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds the diagram of a function given by its full value table over
    /// all registered variables. Bit `k` of the table index is the value of
    /// the variable at level `k`.
    pub fn build_from_table(&mut self, table: &[AlgebraValue]) -> Result<NodeRef, DdError> {
        let n = self.var_count();
        let expected = 1usize
            .checked_shl(n as u32)
            .filter(|_| n < usize::BITS as usize)
            .ok_or(DdError::TableLength {
                expected: usize::MAX,
                found: table.len(),
            })?;
        if table.len() != expected {
            return Err(DdError::TableLength {
                expected,
                found: table.len(),
            });
        }
        let r = self.table_rec(table, 0, 0)?;
        Ok(self.handle(r))
    }

    fn table_rec(&mut self, table: &[AlgebraValue], level: usize, base: usize) -> Result<u32, DdError> {
        if level == self.var_count() {
            return self.intern_terminal(table[base].clone());
        }
        let hi = self.table_rec(table, level + 1, base | (1 << level))?;
        let lo = self.table_rec(table, level + 1, base)?;
        Ok(self.intern_inner(self.order[level], hi, lo))
    }

    /// Removes tests whose outcome is implied by an earlier test on the same
    /// feature along the path (`x <= a` true forces `x <= b` true for
    /// `a <= b`; `x <= b` false forces `x <= a` false). The result agrees
    /// with `f` on every real feature vector.
    pub fn prune_infeasible(&mut self, f: NodeRef) -> Result<NodeRef, DdError> {
        let f = self.own(f)?;
        let mut memo = HashMap::new();
        let r = self.prune_rec(f, Bounds::default(), &mut memo);
        Ok(self.handle(r))
    }

    fn prune_rec(&mut self, f: u32, ctx: Bounds, memo: &mut HashMap<(u32, Bounds), u32>) -> u32 {
        let (var, hi, lo) = match &self.nodes[f as usize] {
            Node::Terminal(_) => return f,
            Node::Inner { var, hi, lo } => (*var, hi.index, lo.index),
        };
        let pred = self.predicate(var);
        let ctx = match pred {
            Some(p) if ctx.feature != Some(p.feature) => Bounds {
                feature: Some(p.feature),
                ..Bounds::default()
            },
            _ => ctx,
        };
        if let Some(&r) = memo.get(&(f, ctx)) {
            return r;
        }
        let r = match pred {
            None => {
                let h = self.prune_rec(hi, ctx, memo);
                let l = self.prune_rec(lo, ctx, memo);
                self.intern_inner(var, h, l)
            }
            Some(p) => {
                let t = p.threshold;
                if ctx.upper().is_some_and(|u| u <= t) {
                    self.prune_rec(hi, ctx, memo)
                } else if ctx.lower().is_some_and(|l| l >= t) {
                    self.prune_rec(lo, ctx, memo)
                } else {
                    let h = self.prune_rec(hi, ctx.with_upper(t), memo);
                    let l = self.prune_rec(lo, ctx.with_lower(t), memo);
                    self.intern_inner(var, h, l)
                }
            }
        };
        memo.insert((f, ctx), r);
        r
    }
}

/// Known interval `lower < x <= upper` for one feature along a path.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
struct Bounds {
    feature: Option<usize>,
    lower: Option<u64>,
    upper: Option<u64>,
}

impl Bounds {
    fn lower(&self) -> Option<f64> {
        self.lower.map(f64::from_bits)
    }

    fn upper(&self) -> Option<f64> {
        self.upper.map(f64::from_bits)
    }

    fn with_upper(self, t: f64) -> Self {
        let u = self.upper().map_or(t, |u| u.min(t));
        Bounds {
            upper: Some(u.to_bits()),
            ..self
        }
    }

    fn with_lower(self, t: f64) -> Self {
        let l = self.lower().map_or(t, |l| l.max(t));
        Bounds {
            lower: Some(l.to_bits()),
            ..self
        }
    }
}
