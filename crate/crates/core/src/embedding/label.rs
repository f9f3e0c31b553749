use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A vertex label token such as `7`, `x` or `3'`.
///
/// Labels order naturally: a leading run of digits compares numerically, so
/// `2 < 10 < 10' < u < x`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(token: impl Into<String>) -> Result<Self> {
        let token = token.into();
        if token.is_empty()
            || token
                .chars()
                .any(|c| c.is_whitespace() || matches!(c, ':' | '#' | '[' | ']' | ','))
        {
            return Err(Error::BadLabel(token));
        }
        Ok(VertexId(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn split(&self) -> (Option<&str>, &str) {
        let digits = self.0.bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            (None, &self.0)
        } else {
            (Some(&self.0[..digits]), &self.0[digits..])
        }
    }
}

fn cmp_digits(a: &str, b: &str) -> Ordering {
    let a_trim = a.trim_start_matches('0');
    let b_trim = b.trim_start_matches('0');
    a_trim
        .len()
        .cmp(&b_trim.len())
        .then_with(|| a_trim.cmp(b_trim))
        .then_with(|| a.len().cmp(&b.len()))
}

impl Ord for VertexId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.split(), other.split()) {
            ((Some(a), ra), (Some(b), rb)) => cmp_digits(a, b).then_with(|| ra.cmp(rb)),
            ((Some(_), _), (None, _)) => Ordering::Less,
            ((None, _), (Some(_), _)) => Ordering::Greater,
            ((None, a), (None, b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for VertexId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl std::str::FromStr for VertexId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VertexId::new(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> VertexId {
        VertexId::new(s).unwrap()
    }

    #[test]
    fn natural_order() {
        let mut labels: Vec<_> = ["x", "10", "2", "u", "10'", "0", "y", "1'"]
            .iter()
            .map(|s| v(s))
            .collect();
        labels.sort();
        let got: Vec<_> = labels.iter().map(VertexId::as_str).collect();
        assert_eq!(got, ["0", "1'", "2", "10", "10'", "u", "x", "y"]);
    }

    #[test]
    fn rejects_reserved_characters() {
        for bad in ["", "a b", "a:", "a#2", "w[+1]"] {
            assert!(VertexId::new(bad).is_err(), "{bad:?}");
        }
    }
}
