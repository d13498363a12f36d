//! User sets as bitmasks over user indices, and the labelled ground set.

use crate::error::PspError;

/// A subset of users; bit `i` is user index `i`.
pub type Set = u64;

pub const MAX_USERS: usize = 64;

pub fn singleton(i: usize) -> Set {
    1u64 << i
}

pub fn full(n: usize) -> Set {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn len(s: Set) -> usize {
    s.count_ones() as usize
}

pub fn contains(s: Set, i: usize) -> bool {
    s >> i & 1 == 1
}

pub fn is_subset(a: Set, b: Set) -> bool {
    a & !b == 0
}

/// Indices of the members of `s`, ascending.
pub fn members(s: Set) -> impl Iterator<Item = usize> {
    let mut rest = s;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Set {
    it.into_iter().fold(0, |s, i| s | singleton(i))
}

/// Every subset of `s`, starting from the empty set.
pub fn subsets(s: Set) -> impl Iterator<Item = Set> {
    let mut cur = Some(0u64);
    std::iter::from_fn(move || {
        let x = cur?;
        cur = if x == s { None } else { Some((x.wrapping_sub(s)) & s) };
        Some(x)
    })
}

/// Ordered, distinct user labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
}

impl GroundSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<GroundSet, PspError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(PspError::Invalid("need at least two users".into()));
        }
        if labels.len() > MAX_USERS {
            return Err(PspError::TooLarge { what: "users", size: labels.len(), limit: MAX_USERS });
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(PspError::Invalid(format!("duplicate user label `{a}`")));
            }
        }
        Ok(GroundSet { labels })
    }

    /// Users labelled `1..=n`.
    pub fn numbered(n: usize) -> GroundSet {
        GroundSet::new((1..=n).map(|i| i.to_string())).expect("n >= 2")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index(&self, label: &str) -> Result<usize, PspError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| PspError::UnknownUser(label.to_string()))
    }

    pub fn set_of<S: AsRef<str>>(&self, labels: impl IntoIterator<Item = S>) -> Result<Set, PspError> {
        let mut s = 0;
        for l in labels {
            s |= singleton(self.index(l.as_ref())?);
        }
        Ok(s)
    }

    pub fn all(&self) -> Set {
        full(self.len())
    }

    pub fn names(&self, s: Set) -> Vec<&str> {
        members(s).map(|i| self.label(i)).collect()
    }

    /// An ordering given as labels, checked to be a permutation.
    pub fn ordering<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>, PspError> {
        let order: Vec<usize> = labels.iter().map(|l| self.index(l.as_ref())).collect::<Result<_, _>>()?;
        check_permutation(&order, self.len())?;
        Ok(order)
    }
}

pub fn check_permutation(order: &[usize], n: usize) -> Result<(), PspError> {
    let mut seen = 0u64;
    for &i in order {
        if i >= n || contains(seen, i) {
            return Err(PspError::Invalid("order is not a permutation of the users".into()));
        }
        seen |= singleton(i);
    }
    if order.len() != n {
        return Err(PspError::Invalid("order is not a permutation of the users".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_enumeration() {
        let s = from_indices([0, 2, 3]);
        let all: Vec<Set> = subsets(s).collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|&x| is_subset(x, s)));
        assert_eq!(subsets(0).count(), 1);
    }

    #[test]
    fn labels() {
        let g = GroundSet::new(["a", "b", "c"]).unwrap();
        assert_eq!(g.set_of(["c", "a"]).unwrap(), 0b101);
        assert!(g.set_of(["z"]).is_err());
        assert!(GroundSet::new(["a", "a"]).is_err());
        assert!(GroundSet::new(["a"]).is_err());
        assert_eq!(g.ordering(&["b", "c", "a"]).unwrap(), vec![1, 2, 0]);
        assert!(g.ordering(&["b", "b", "a"]).is_err());
    }
}
