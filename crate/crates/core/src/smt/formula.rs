use std::collections::{BTreeSet, HashMap};

/// Index of a node in an [`Arena`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormulaId(u32);

impl FormulaId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Propositions over the request variables; attributes are numbered in
/// domain order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// The attribute is bound.
    Present(usize),
    /// A scalar attribute holds universe value `1`.
    Eq(usize, usize),
    /// A set attribute contains universe element `1`.
    Member(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    False,
    Atom(Atom),
    Not(FormulaId),
    And(Vec<FormulaId>),
    Or(Vec<FormulaId>),
}

/// A hash-consed DAG of boolean formulas. Constructors simplify constants,
/// flatten nested connectives, sort and deduplicate operands and detect
/// complementary pairs.
#[derive(Debug, Clone)]
pub struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, FormulaId>,
}

impl Default for Arena {
    fn default() -> Self {
        Self::new()
    }
}

impl Arena {
    pub const TRUE: FormulaId = FormulaId(0);
    pub const FALSE: FormulaId = FormulaId(1);

    pub fn new() -> Self {
        let mut arena = Arena { nodes: Vec::new(), index: HashMap::new() };
        arena.intern(Node::True);
        arena.intern(Node::False);
        arena
    }

    fn intern(&mut self, node: Node) -> FormulaId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = FormulaId(u32::try_from(self.nodes.len()).expect("arena overflow"));
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn node(&self, id: FormulaId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn constant(&self, b: bool) -> FormulaId {
        if b {
            Self::TRUE
        } else {
            Self::FALSE
        }
    }

    pub fn atom(&mut self, atom: Atom) -> FormulaId {
        self.intern(Node::Atom(atom))
    }

    pub fn not(&mut self, f: FormulaId) -> FormulaId {
        match self.node(f) {
            Node::True => Self::FALSE,
            Node::False => Self::TRUE,
            Node::Not(inner) => *inner,
            _ => self.intern(Node::Not(f)),
        }
    }

    pub fn and(&mut self, fs: impl IntoIterator<Item = FormulaId>) -> FormulaId {
        self.junction(fs, true)
    }

    pub fn or(&mut self, fs: impl IntoIterator<Item = FormulaId>) -> FormulaId {
        self.junction(fs, false)
    }

    pub fn and2(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.and([a, b])
    }

    pub fn or2(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.or([a, b])
    }

    /// `a <=> b`.
    pub fn iff(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        let both = self.and2(a, b);
        let (na, nb) = (self.not(a), self.not(b));
        let neither = self.and2(na, nb);
        self.or2(both, neither)
    }

    fn junction(&mut self, fs: impl IntoIterator<Item = FormulaId>, conj: bool) -> FormulaId {
        let (unit, zero) = if conj { (Self::TRUE, Self::FALSE) } else { (Self::FALSE, Self::TRUE) };
        let mut ops = BTreeSet::new();
        for f in fs {
            match self.node(f) {
                _ if f == unit => {}
                _ if f == zero => return zero,
                Node::And(inner) if conj => ops.extend(inner.iter().copied()),
                Node::Or(inner) if !conj => ops.extend(inner.iter().copied()),
                _ => {
                    ops.insert(f);
                }
            }
        }
        for &f in &ops {
            if let Node::Not(inner) = self.node(f) {
                if ops.contains(inner) {
                    return zero;
                }
            }
        }
        match ops.len() {
            0 => unit,
            1 => *ops.iter().next().expect("one operand"),
            _ => {
                let ops: Vec<FormulaId> = ops.into_iter().collect();
                self.intern(if conj { Node::And(ops) } else { Node::Or(ops) })
            }
        }
    }

    /// Evaluates `f` with `atom` giving the truth of each atom.
    pub fn eval(&self, f: FormulaId, atom: &dyn Fn(Atom) -> bool) -> bool {
        let mut memo: HashMap<FormulaId, bool> = HashMap::new();
        self.eval_memo(f, atom, &mut memo)
    }

    fn eval_memo(&self, f: FormulaId, atom: &dyn Fn(Atom) -> bool, memo: &mut HashMap<FormulaId, bool>) -> bool {
        if let Some(&b) = memo.get(&f) {
            return b;
        }
        let b = match self.node(f) {
            Node::True => true,
            Node::False => false,
            Node::Atom(a) => atom(*a),
            Node::Not(g) => !self.eval_memo(*g, atom, memo),
            Node::And(gs) => gs.iter().all(|&g| self.eval_memo(g, atom, memo)),
            Node::Or(gs) => gs.iter().any(|&g| self.eval_memo(g, atom, memo)),
        };
        memo.insert(f, b);
        b
    }

    /// Every node reachable from `roots`, in ascending id order.
    pub fn reachable(&self, roots: &[FormulaId]) -> Vec<FormulaId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<FormulaId> = roots.to_vec();
        while let Some(f) = stack.pop() {
            if !seen.insert(f) {
                continue;
            }
            match self.node(f) {
                Node::Not(g) => stack.push(*g),
                Node::And(gs) | Node::Or(gs) => stack.extend(gs.iter().copied()),
                _ => {}
            }
        }
        seen.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplification() {
        let mut a = Arena::new();
        let x = a.atom(Atom::Present(0));
        let y = a.atom(Atom::Present(1));
        let nx = a.not(x);
        assert_eq!(a.not(nx), x);
        assert_eq!(a.and([x, Arena::TRUE]), x);
        assert_eq!(a.and([x, Arena::FALSE]), Arena::FALSE);
        assert_eq!(a.or([x, nx]), Arena::TRUE);
        assert_eq!(a.and([x, nx]), Arena::FALSE);
        assert_eq!(a.and2(x, y), a.and2(y, x));
        let xy = a.and2(x, y);
        assert_eq!(a.and2(xy, x), xy);
        assert_eq!(a.or(Vec::new()), Arena::FALSE);
        assert_eq!(a.and(Vec::new()), Arena::TRUE);
    }

    #[test]
    fn evaluation() {
        let mut a = Arena::new();
        let x = a.atom(Atom::Eq(0, 1));
        let y = a.atom(Atom::Member(1, 0));
        let f = a.iff(x, y);
        let truth = |t: &[bool; 2]| {
            let t = *t;
            move |at: Atom| match at {
                Atom::Eq(..) => t[0],
                _ => t[1],
            }
        };
        assert!(a.eval(f, &truth(&[true, true])));
        assert!(!a.eval(f, &truth(&[true, false])));
        assert!(a.eval(f, &truth(&[false, false])));
    }
}
