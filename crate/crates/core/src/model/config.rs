use std::collections::{BTreeMap, BTreeSet};

use super::ModelError;

/// A finite partial order over level names, stored reflexive-transitively
/// closed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LevelOrder {
    carrier: BTreeSet<String>,
    leq: BTreeSet<(String, String)>,
}

impl LevelOrder {
    /// Closes `pairs` (each `a <= b`) over `names` plus every name in a pair.
    pub fn new<S: AsRef<str>>(
        names: impl IntoIterator<Item = S>,
        pairs: impl IntoIterator<Item = (S, S)>,
    ) -> Result<Self, ModelError> {
        let mut carrier: BTreeSet<String> = names.into_iter().map(|s| s.as_ref().to_owned()).collect();
        let pairs: Vec<(String, String)> = pairs
            .into_iter()
            .map(|(a, b)| (a.as_ref().to_owned(), b.as_ref().to_owned()))
            .collect();
        for (a, b) in &pairs {
            carrier.insert(a.clone());
            carrier.insert(b.clone());
        }
        let index: BTreeMap<&str, usize> =
            carrier.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let n = carrier.len();
        let mut m = vec![false; n * n];
        for i in 0..n {
            m[i * n + i] = true;
        }
        for (a, b) in &pairs {
            m[index[a.as_str()] * n + index[b.as_str()]] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if m[i * n + k] {
                    for j in 0..n {
                        if m[k * n + j] {
                            m[i * n + j] = true;
                        }
                    }
                }
            }
        }
        let names: Vec<&String> = carrier.iter().collect();
        for i in 0..n {
            for j in i + 1..n {
                if m[i * n + j] && m[j * n + i] {
                    return Err(ModelError::NotAntisymmetric(names[i].clone(), names[j].clone()));
                }
            }
        }
        let mut leq = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                if m[i * n + j] {
                    leq.insert((names[i].clone(), names[j].clone()));
                }
            }
        }
        Ok(LevelOrder { carrier, leq })
    }

    /// `None` when either name is not a declared level.
    pub fn leq(&self, a: &str, b: &str) -> Option<bool> {
        if !self.carrier.contains(a) || !self.carrier.contains(b) {
            return None;
        }
        Some(self.leq.contains(&(a.to_owned(), b.to_owned())))
    }

    pub fn contains(&self, level: &str) -> bool {
        self.carrier.contains(level)
    }

    pub fn levels(&self) -> impl Iterator<Item = &str> {
        self.carrier.iter().map(String::as_str)
    }

    /// The closed relation.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.leq.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }
}

/// An acyclic role hierarchy with edges from child to parent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoleHierarchy {
    /// Every role mapped to the roles it reaches, itself included.
    reach: BTreeMap<String, BTreeSet<String>>,
}

impl RoleHierarchy {
    pub fn new<S: AsRef<str>>(
        names: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = (S, S)>,
    ) -> Result<Self, ModelError> {
        let mut parents: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for n in names {
            parents.entry(n.as_ref().to_owned()).or_default();
        }
        for (child, parent) in edges {
            let (child, parent) = (child.as_ref().to_owned(), parent.as_ref().to_owned());
            parents.entry(parent.clone()).or_default();
            parents.entry(child).or_default().insert(parent);
        }
        let mut reach = BTreeMap::new();
        for role in parents.keys() {
            let mut seen = BTreeSet::from([role.clone()]);
            let mut stack: Vec<&String> = parents[role].iter().collect();
            while let Some(r) = stack.pop() {
                if r == role {
                    return Err(ModelError::RoleCycle(role.clone()));
                }
                if seen.insert(r.clone()) {
                    stack.extend(parents[r].iter());
                }
            }
            reach.insert(role.clone(), seen);
        }
        Ok(RoleHierarchy { reach })
    }

    /// Whether `role` is `target` or below it. `None` if either is unknown.
    pub fn is_sub_role(&self, role: &str, target: &str) -> Option<bool> {
        if !self.reach.contains_key(target) {
            return None;
        }
        self.reach.get(role).map(|r| r.contains(target))
    }

    pub fn contains(&self, role: &str) -> bool {
        self.reach.contains_key(role)
    }

    pub fn roles(&self) -> impl Iterator<Item = &str> {
        self.reach.keys().map(String::as_str)
    }
}

/// Interpretation of the extension functions `leq` and `sub-role`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EngineConfig {
    pub levels: LevelOrder,
    pub roles: RoleHierarchy,
}

impl EngineConfig {
    pub fn new(levels: LevelOrder, roles: RoleHierarchy) -> Self {
        EngineConfig { levels, roles }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_single_pair() {
        let order = LevelOrder::new(Vec::<&str>::new(), [("L1", "L2")]).unwrap();
        let pairs: Vec<_> = order.pairs().collect();
        assert_eq!(pairs, vec![("L1", "L1"), ("L1", "L2"), ("L2", "L2")]);
        assert_eq!(order.leq("L2", "L1"), Some(false));
        assert_eq!(order.leq("L1", "L9"), None);
    }

    #[test]
    fn transitive_and_incomparable() {
        let order = LevelOrder::new(["X"], [("L1", "L2"), ("L2", "L3")]).unwrap();
        assert_eq!(order.leq("L1", "L3"), Some(true));
        assert_eq!(order.leq("X", "L3"), Some(false));
        assert_eq!(order.leq("L3", "X"), Some(false));
    }

    #[test]
    fn antisymmetry_violation_rejected() {
        let err = LevelOrder::new(Vec::<&str>::new(), [("a", "b"), ("b", "c"), ("c", "a")]);
        assert!(matches!(err, Err(ModelError::NotAntisymmetric(..))));
    }

    #[test]
    fn role_reachability() {
        let roles = RoleHierarchy::new(["solo"], [("assistant", "clerk"), ("clerk", "staff")]).unwrap();
        assert_eq!(roles.is_sub_role("assistant", "clerk"), Some(true));
        assert_eq!(roles.is_sub_role("assistant", "staff"), Some(true));
        assert_eq!(roles.is_sub_role("clerk", "clerk"), Some(true));
        assert_eq!(roles.is_sub_role("staff", "clerk"), Some(false));
        assert_eq!(roles.is_sub_role("solo", "staff"), Some(false));
        assert_eq!(roles.is_sub_role("ghost", "staff"), None);
        assert_eq!(roles.is_sub_role("clerk", "ghost"), None);
    }

    #[test]
    fn role_cycle_rejected() {
        let err = RoleHierarchy::new(Vec::<&str>::new(), [("a", "b"), ("b", "a")]);
        assert!(matches!(err, Err(ModelError::RoleCycle(_))));
        let self_loop = RoleHierarchy::new(Vec::<&str>::new(), [("a", "a")]);
        assert!(self_loop.is_err());
    }
}
