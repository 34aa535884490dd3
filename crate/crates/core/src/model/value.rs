use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use chrono::NaiveDate;

use super::ModelError;

/// A literal attribute value.
///
/// Doubles compare by bit pattern, so `Value` can be totally ordered and
/// used as a set element. Only finite doubles are admitted by the parsers.
#[derive(Debug, Clone)]
pub enum Value {
    Bool(bool),
    Double(f64),
    Str(String),
    Date(NaiveDate),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueKind {
    Boolean,
    Double,
    String,
    Date,
}

impl ValueKind {
    pub fn name(self) -> &'static str {
        match self {
            ValueKind::Boolean => "boolean",
            ValueKind::Double => "double",
            ValueKind::String => "string",
            ValueKind::Date => "date",
        }
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Value {
    pub fn str(s: impl Into<String>) -> Self {
        Value::Str(s.into())
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Bool(_) => ValueKind::Boolean,
            Value::Double(_) => ValueKind::Double,
            Value::Str(_) => ValueKind::String,
            Value::Date(_) => ValueKind::Date,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Bool(_) => 0,
            Value::Double(_) => 1,
            Value::Str(_) => 2,
            Value::Date(_) => 3,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Double(a), Value::Double(b)) => a.total_cmp(b),
            (Value::Str(a), Value::Str(b)) => a.cmp(b),
            (Value::Date(a), Value::Date(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Bool(b) => b.hash(state),
            Value::Double(d) => d.to_bits().hash(state),
            Value::Str(s) => s.hash(state),
            Value::Date(d) => d.hash(state),
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<f64> for Value {
    fn from(d: f64) -> Self {
        Value::Double(d)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_owned())
    }
}

impl From<NaiveDate> for Value {
    fn from(d: NaiveDate) -> Self {
        Value::Date(d)
    }
}

/// Canonical literal syntax, re-readable by the parser.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            // Debug keeps a decimal point or exponent and round-trips exactly.
            Value::Double(d) => write!(f, "{d:?}"),
            Value::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        '\r' => f.write_str("\\r")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Value::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
        }
    }
}

/// A non-empty set of values sharing one kind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueSet(BTreeSet<Value>);

impl ValueSet {
    pub fn new(values: impl IntoIterator<Item = Value>) -> Result<Self, ModelError> {
        let set: BTreeSet<Value> = values.into_iter().collect();
        let mut kinds = set.iter().map(Value::kind);
        let Some(first) = kinds.next() else {
            return Err(ModelError::EmptySet);
        };
        if let Some(other) = kinds.find(|k| *k != first) {
            return Err(ModelError::MixedKinds(first, other));
        }
        Ok(ValueSet(set))
    }

    pub fn singleton(value: Value) -> Self {
        ValueSet(BTreeSet::from([value]))
    }

    pub fn kind(&self) -> ValueKind {
        self.0.iter().next().map(Value::kind).expect("value sets are non-empty")
    }

    pub fn contains(&self, value: &Value) -> bool {
        self.0.contains(value)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = &Value> {
        self.0.iter()
    }
}

impl<'a> IntoIterator for &'a ValueSet {
    type Item = &'a Value;
    type IntoIter = std::collections::btree_set::Iter<'a, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubles_compare_bitwise() {
        assert_eq!(Value::Double(1.5), Value::Double(1.5));
        assert_ne!(Value::Double(0.0), Value::Double(-0.0));
    }

    #[test]
    fn set_rejects_mixed_kinds_and_empty() {
        assert!(matches!(ValueSet::new([]), Err(ModelError::EmptySet)));
        assert!(matches!(
            ValueSet::new([Value::str("a"), Value::Double(1.0)]),
            Err(ModelError::MixedKinds(..))
        ));
        let s = ValueSet::new([Value::str("b"), Value::str("a"), Value::str("a")]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_string(), "{\"a\", \"b\"}");
    }

    #[test]
    fn display_escapes_strings() {
        assert_eq!(Value::str("a\"b\\c").to_string(), r#""a\"b\\c""#);
        assert_eq!(Value::Double(2.0).to_string(), "2.0");
        let d = NaiveDate::from_ymd_opt(2015, 3, 7).unwrap();
        assert_eq!(Value::Date(d).to_string(), "2015-03-07");
    }
}
