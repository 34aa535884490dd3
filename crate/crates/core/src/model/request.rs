use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{ModelError, Value, ValueSet};

/// A structured attribute name, `category/attribute`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttrName {
    category: String,
    attribute: String,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

impl AttrName {
    pub fn new(category: impl Into<String>, attribute: impl Into<String>) -> Result<Self, ModelError> {
        let (category, attribute) = (category.into(), attribute.into());
        if !is_identifier(&category) || !is_identifier(&attribute) {
            return Err(ModelError::InvalidName(format!("{category}/{attribute}")));
        }
        Ok(AttrName { category, attribute })
    }

    pub fn category(&self) -> &str {
        &self.category
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }
}

impl FromStr for AttrName {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (cat, att) = s
            .split_once('/')
            .ok_or_else(|| ModelError::InvalidName(s.to_owned()))?;
        AttrName::new(cat, att)
    }
}

impl fmt::Display for AttrName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.category, self.attribute)
    }
}

/// What a request binds to a name: one value or a set of values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Binding {
    Value(Value),
    Set(ValueSet),
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Value(v) => write!(f, "{v}"),
            Binding::Set(s) => write!(f, "{s}"),
        }
    }
}

/// An access request in functional form: a total map from attribute names,
/// where every unbound name is absent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Request {
    bindings: BTreeMap<AttrName, Binding>,
}

impl Request {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a request from `(name, binding)` entries.
    ///
    /// A name with a single plain-value entry stays a plain value. Repeated
    /// entries, or any set entry, collapse into the set of distinct values.
    pub fn from_entries(
        entries: impl IntoIterator<Item = (AttrName, Binding)>,
    ) -> Result<Self, ModelError> {
        let mut grouped: BTreeMap<AttrName, Vec<Binding>> = BTreeMap::new();
        for (name, binding) in entries {
            grouped.entry(name).or_default().push(binding);
        }
        let mut bindings = BTreeMap::new();
        for (name, mut group) in grouped {
            let binding = if group.len() == 1 && matches!(group[0], Binding::Value(_)) {
                group.pop().expect("one element")
            } else {
                let values = group.into_iter().flat_map(|b| match b {
                    Binding::Value(v) => vec![v],
                    Binding::Set(s) => s.iter().cloned().collect(),
                });
                Binding::Set(ValueSet::new(values).map_err(|e| ModelError::InBinding {
                    name: name.to_string(),
                    source: Box::new(e),
                })?)
            };
            bindings.insert(name, binding);
        }
        Ok(Request { bindings })
    }

    /// Total lookup; `None` models the absent value.
    pub fn lookup(&self, name: &AttrName) -> Option<&Binding> {
        self.bindings.get(name)
    }

    /// Replaces whatever `name` was bound to.
    pub fn bind(&mut self, name: AttrName, binding: Binding) {
        self.bindings.insert(name, binding);
    }

    pub fn unbind(&mut self, name: &AttrName) {
        self.bindings.remove(name);
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AttrName, &Binding)> {
        self.bindings.iter()
    }
}

/// One `(name, value)` entry per line; sets use the `{...}` literal so the
/// text reads back as the same request.
impl fmt::Display for Request {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, binding) in &self.bindings {
            writeln!(f, "({name}, {binding})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name(s: &str) -> AttrName {
        s.parse().unwrap()
    }

    #[test]
    fn names_validate_both_parts() {
        assert!(AttrName::new("resource", "read.ids").is_ok());
        assert!(AttrName::new("", "id").is_err());
        assert!(AttrName::new("subject", "9id").is_err());
        assert!("subject".parse::<AttrName>().is_err());
    }

    #[test]
    fn unbound_lookup_is_absent() {
        let r = Request::new();
        assert_eq!(r.lookup(&name("subject/level")), None);
    }

    #[test]
    fn repeated_entries_collapse_to_set() {
        let r = Request::from_entries([
            (name("subject/role"), Binding::Value(Value::str("r1"))),
            (name("subject/role"), Binding::Value(Value::str("r2"))),
            (name("subject/id"), Binding::Value(Value::str("clerk1"))),
        ])
        .unwrap();
        let roles = ValueSet::new([Value::str("r1"), Value::str("r2")]).unwrap();
        assert_eq!(r.lookup(&name("subject/role")), Some(&Binding::Set(roles)));
        assert_eq!(
            r.lookup(&name("subject/id")),
            Some(&Binding::Value(Value::str("clerk1")))
        );
    }

    #[test]
    fn mixed_kind_entries_are_rejected() {
        let err = Request::from_entries([
            (name("a/b"), Binding::Value(Value::str("x"))),
            (name("a/b"), Binding::Value(Value::Double(1.0))),
        ]);
        assert!(err.is_err());
    }
}
