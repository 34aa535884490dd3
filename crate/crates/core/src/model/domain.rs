use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{AttrName, Binding, Expr, ModelError, Value, ValueKind, ValueSet};

/// Declared kind of an attribute in a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttrKind {
    Boolean,
    Double,
    String,
    Date,
    /// Set-valued attribute ranging over non-empty subsets of a string universe.
    StringSet,
}

impl AttrKind {
    pub const ALL: [AttrKind; 5] = [
        AttrKind::Boolean,
        AttrKind::Double,
        AttrKind::String,
        AttrKind::Date,
        AttrKind::StringSet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttrKind::Boolean => "boolean",
            AttrKind::Double => "double",
            AttrKind::String => "string",
            AttrKind::Date => "date",
            AttrKind::StringSet => "set-of-string",
        }
    }

    pub fn from_name(s: &str) -> Option<AttrKind> {
        AttrKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Kind of the universe elements.
    pub fn element_kind(self) -> ValueKind {
        match self {
            AttrKind::Boolean => ValueKind::Boolean,
            AttrKind::Double => ValueKind::Double,
            AttrKind::String | AttrKind::StringSet => ValueKind::String,
            AttrKind::Date => ValueKind::Date,
        }
    }

    pub fn is_set(self) -> bool {
        self == AttrKind::StringSet
    }
}

impl fmt::Display for AttrKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The finite range of one attribute.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttrDomain {
    kind: AttrKind,
    universe: Vec<Value>,
    allow_absent: bool,
}

impl AttrDomain {
    pub fn new(kind: AttrKind, universe: Vec<Value>, allow_absent: bool) -> Result<Self, ModelError> {
        if universe.is_empty() {
            return Err(ModelError::EmptyUniverse);
        }
        let mut seen = BTreeSet::new();
        for v in &universe {
            if v.kind() != kind.element_kind() {
                return Err(ModelError::UniverseKind { expected: kind, found: v.kind() });
            }
            if !seen.insert(v) {
                return Err(ModelError::DuplicateValue(v.to_string()));
            }
        }
        Ok(AttrDomain { kind, universe, allow_absent })
    }

    pub fn kind(&self) -> AttrKind {
        self.kind
    }

    pub fn universe(&self) -> &[Value] {
        &self.universe
    }

    pub fn allow_absent(&self) -> bool {
        self.allow_absent
    }

    pub fn position(&self, value: &Value) -> Option<usize> {
        self.universe.iter().position(|v| v == value)
    }

    /// Number of distinct bindings (absence included), saturating.
    pub fn option_count(&self) -> u128 {
        let present = if self.kind.is_set() {
            let n = self.universe.len() as u32;
            if n >= 127 {
                u128::MAX
            } else {
                (1u128 << n) - 1
            }
        } else {
            self.universe.len() as u128
        };
        present.saturating_add(u128::from(self.allow_absent))
    }

    /// All bindings in enumeration order: universe order for scalars,
    /// subsets by size then position for sets, absence last.
    pub fn options(&self) -> Vec<Option<Binding>> {
        let mut out: Vec<Option<Binding>> = if self.kind.is_set() {
            let n = self.universe.len();
            (1..=n)
                .flat_map(|k| combinations(n, k))
                .map(|idx| {
                    let set = ValueSet::new(idx.into_iter().map(|i| self.universe[i].clone()))
                        .expect("non-empty uniform subset");
                    Some(Binding::Set(set))
                })
                .collect()
        } else {
            self.universe.iter().map(|v| Some(Binding::Value(v.clone()))).collect()
        };
        if self.allow_absent {
            out.push(None);
        }
        out
    }
}

/// Index combinations of size `k` from `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        let Some(i) = (0..k).rev().find(|&i| current[i] != i + n - k) else {
            return out;
        };
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// Finite value universes per attribute name: the enumerable request space.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DomainSpec {
    attrs: BTreeMap<AttrName, AttrDomain>,
}

impl DomainSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: AttrName, domain: AttrDomain) -> Result<(), ModelError> {
        if self.attrs.contains_key(&name) {
            return Err(ModelError::DuplicateDeclaration(name.to_string()));
        }
        self.attrs.insert(name, domain);
        Ok(())
    }

    pub fn get(&self, name: &AttrName) -> Option<&AttrDomain> {
        self.attrs.get(name)
    }

    /// Declarations in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&AttrName, &AttrDomain)> {
        self.attrs.iter()
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    /// Size of the enumerable request space, saturating.
    pub fn request_count(&self) -> u128 {
        self.attrs
            .values()
            .fold(1u128, |acc, d| acc.saturating_mul(d.option_count()))
    }
}

/// A set of requests: the members of a domain satisfying a predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestSetSpec {
    pub domain: DomainSpec,
    pub constraint: Expr,
}

impl RequestSetSpec {
    pub fn new(domain: DomainSpec, constraint: Expr) -> Self {
        RequestSetSpec { domain, constraint }
    }

    /// Every request of the domain.
    pub fn all(domain: DomainSpec) -> Self {
        RequestSetSpec { domain, constraint: Expr::lit(true) }
    }

    /// The same domain with the negated predicate.
    pub fn complement(&self) -> Self {
        RequestSetSpec {
            domain: self.domain.clone(),
            constraint: Expr::not(self.constraint.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(vals: &[&str]) -> Vec<Value> {
        vals.iter().map(|s| Value::str(*s)).collect()
    }

    #[test]
    fn counts_include_absence() {
        let d = AttrDomain::new(AttrKind::String, strings(&["read", "write"]), true).unwrap();
        assert_eq!(d.option_count(), 3);
        assert_eq!(d.options().len(), 3);
        let r = AttrDomain::new(AttrKind::String, strings(&["L1", "L2"]), false).unwrap();
        assert_eq!(r.option_count(), 2);
    }

    #[test]
    fn set_kind_enumerates_nonempty_subsets() {
        let d = AttrDomain::new(AttrKind::StringSet, strings(&["r1", "r2"]), true).unwrap();
        let opts = d.options();
        let set = |v: &[&str]| Some(Binding::Set(ValueSet::new(strings(v)).unwrap()));
        assert_eq!(opts, vec![set(&["r1"]), set(&["r2"]), set(&["r1", "r2"]), None]);
        let three = AttrDomain::new(AttrKind::StringSet, strings(&["a", "b", "c"]), false).unwrap();
        assert_eq!(three.options().len(), 7);
        assert_eq!(three.option_count(), 7);
    }

    #[test]
    fn universe_validation() {
        assert!(AttrDomain::new(AttrKind::String, vec![], true).is_err());
        assert!(AttrDomain::new(AttrKind::String, strings(&["a", "a"]), true).is_err());
        assert!(AttrDomain::new(AttrKind::Double, strings(&["a"]), true).is_err());
    }

    #[test]
    fn duplicate_declaration_rejected() {
        let mut spec = DomainSpec::new();
        let d = AttrDomain::new(AttrKind::Boolean, vec![Value::Bool(true)], true).unwrap();
        let n: AttrName = "a/b".parse().unwrap();
        spec.declare(n.clone(), d.clone()).unwrap();
        assert!(spec.declare(n, d).is_err());
    }
}
