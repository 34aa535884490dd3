use super::AnalysisError;
use crate::model::{AttrName, Binding, DomainSpec, Request};

/// The finite request space of a domain, with random access by index.
///
/// Attributes vary in name order, the first name slowest; each attribute
/// runs through [`AttrDomain::options`](crate::model::AttrDomain::options).
#[derive(Debug, Clone)]
pub struct RequestSpace {
    axes: Vec<(AttrName, Vec<Option<Binding>>)>,
    len: u64,
}

impl RequestSpace {
    /// Fails when the number of requests exceeds `cap`.
    pub fn new(domain: &DomainSpec, cap: u64) -> Result<Self, AnalysisError> {
        let counts: Vec<u128> = domain.iter().map(|(_, d)| d.option_count()).collect();
        let product = counts.iter().fold(1u128, |acc, &c| acc.saturating_mul(c));
        if product > u128::from(cap) {
            let factors: Vec<String> = counts.iter().map(u128::to_string).collect();
            let shown = if product == u128::MAX { "overflow".to_owned() } else { product.to_string() };
            return Err(AnalysisError::TooLarge {
                product: format!("{} = {shown}", factors.join(" x ")),
                cap,
            });
        }
        let axes = domain.iter().map(|(n, d)| (n.clone(), d.options())).collect();
        Ok(RequestSpace { axes, len: product as u64 })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The request at position `index` (`index < len`).
    pub fn get(&self, mut index: u64) -> Request {
        let mut request = Request::new();
        for (name, options) in self.axes.iter().rev() {
            let radix = options.len() as u64;
            if let Some(binding) = &options[(index % radix) as usize] {
                request.bind(name.clone(), binding.clone());
            }
            index /= radix;
        }
        request
    }

    pub fn iter(&self) -> impl Iterator<Item = Request> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

/// Every request of the domain in enumeration order.
pub fn enumerate_requests(
    domain: &DomainSpec,
    cap: u64,
) -> Result<impl Iterator<Item = Request>, AnalysisError> {
    let space = RequestSpace::new(domain, cap)?;
    Ok((0..space.len).map(move |i| space.get(i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AttrDomain, AttrKind, Value};

    fn domain(decls: &[(&str, AttrKind, &[&str], bool)]) -> DomainSpec {
        let mut d = DomainSpec::new();
        for (name, kind, values, absent) in decls {
            let universe = values.iter().map(|v| Value::str(*v)).collect();
            d.declare(name.parse().unwrap(), AttrDomain::new(*kind, universe, *absent).unwrap())
                .unwrap();
        }
        d
    }

    #[test]
    fn counts() {
        let one = domain(&[("action/id", AttrKind::String, &["read", "write"], true)]);
        assert_eq!(enumerate_requests(&one, 100).unwrap().count(), 3);
        let two = domain(&[
            ("a/x", AttrKind::String, &["p", "q"], false),
            ("a/y", AttrKind::String, &["p", "q"], false),
        ]);
        assert_eq!(enumerate_requests(&two, 100).unwrap().count(), 4);
        let set = domain(&[("subject/role", AttrKind::StringSet, &["r1", "r2"], true)]);
        let all: Vec<Request> = enumerate_requests(&set, 100).unwrap().collect();
        assert_eq!(all.len(), 4);
        assert!(all[3].is_empty());
        assert_eq!(enumerate_requests(&DomainSpec::new(), 1).unwrap().count(), 1);
    }

    #[test]
    fn first_attribute_varies_slowest() {
        let two = domain(&[
            ("a/x", AttrKind::String, &["p", "q"], false),
            ("a/y", AttrKind::String, &["p", "q"], false),
        ]);
        let space = RequestSpace::new(&two, 10).unwrap();
        let text: Vec<String> = space.iter().map(|r| r.to_string().replace('\n', " ")).collect();
        assert_eq!(
            text,
            [
                "(a/x, \"p\") (a/y, \"p\") ",
                "(a/x, \"p\") (a/y, \"q\") ",
                "(a/x, \"q\") (a/y, \"p\") ",
                "(a/x, \"q\") (a/y, \"q\") ",
            ]
        );
    }

    #[test]
    fn cap_names_the_product() {
        let d = domain(&[
            ("a/x", AttrKind::String, &["p", "q"], true),
            ("a/y", AttrKind::String, &["p", "q"], false),
        ]);
        match RequestSpace::new(&d, 5) {
            Err(AnalysisError::TooLarge { product, cap }) => {
                assert_eq!(product, "3 x 2 = 6");
                assert_eq!(cap, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
