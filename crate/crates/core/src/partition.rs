//! Partitions of a user set.

use std::fmt;

use crate::error::{PspError, Result};
use crate::set::{self, Set};

pub const ENUMERATION_LIMIT: usize = 12;

/// Disjoint nonempty blocks, kept sorted by lowest member.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Set>,
}

impl Partition {
    pub fn new(mut blocks: Vec<Set>) -> Result<Partition> {
        let mut seen = 0;
        for &b in &blocks {
            if b == 0 {
                return Err(PspError::Invalid("empty block".into()));
            }
            if b & seen != 0 {
                return Err(PspError::Invalid("blocks overlap".into()));
            }
            seen |= b;
        }
        blocks.sort_by_key(|b| b.trailing_zeros());
        Ok(Partition { blocks })
    }

    pub fn singletons(carrier: Set) -> Partition {
        Partition { blocks: set::members(carrier).map(set::singleton).collect() }
    }

    pub fn whole(carrier: Set) -> Partition {
        Partition { blocks: if carrier == 0 { vec![] } else { vec![carrier] } }
    }

    pub fn blocks(&self) -> &[Set] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn carrier(&self) -> Set {
        self.blocks.iter().fold(0, |a, b| a | b)
    }

    pub fn block_of(&self, i: usize) -> Option<Set> {
        self.blocks.iter().copied().find(|b| set::contains(*b, i))
    }

    /// Adds a block disjoint from the carrier.
    pub fn with_block(&self, b: Set) -> Partition {
        assert!(b != 0 && b & self.carrier() == 0);
        let mut blocks = self.blocks.clone();
        blocks.push(b);
        Partition::new(blocks).expect("disjoint")
    }

    /// Merges every block meeting `s` into one block.
    pub fn merge_meeting(&self, s: Set) -> Partition {
        let (hit, mut rest): (Vec<Set>, Vec<Set>) = self.blocks.iter().partition(|b| *b & s != 0);
        if hit.len() <= 1 {
            return self.clone();
        }
        rest.push(hit.iter().fold(0, |a, b| a | b));
        Partition::new(rest).expect("disjoint")
    }

    /// The blocks fully inside `s`, as a family.
    pub fn blocks_within(&self, s: Set) -> Vec<Set> {
        self.blocks.iter().copied().filter(|b| set::is_subset(*b, s)).collect()
    }

    /// Restriction to a subset of the carrier.
    pub fn restrict(&self, s: Set) -> Partition {
        Partition { blocks: self.blocks.iter().map(|b| b & s).filter(|b| *b != 0).collect() }
    }

    pub fn is_union_of_blocks(&self, s: Set) -> bool {
        self.blocks.iter().all(|b| b & s == 0 || set::is_subset(*b, s))
    }

    pub fn display_with<'a>(&'a self, labels: &'a [String]) -> impl fmt::Display + 'a {
        PartitionDisplay { p: self, labels }
    }
}

struct PartitionDisplay<'a> {
    p: &'a Partition,
    labels: &'a [String],
}

impl fmt::Display for PartitionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, b) in self.p.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            let names: Vec<&str> = set::members(*b).map(|i| self.labels[i].as_str()).collect();
            write!(f, "{{{}}}", names.join(","))?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = (0..64).map(|i| (i + 1).to_string()).collect();
        let shown = self.display_with(&labels).to_string();
        f.write_str(&shown)
    }
}

/// True iff every block of `p` lies inside a block of `q`.
pub fn refines(p: &Partition, q: &Partition) -> Result<bool> {
    if p.carrier() != q.carrier() {
        return Err(PspError::CarrierMismatch);
    }
    Ok(p.blocks.iter().all(|b| q.blocks.iter().any(|c| set::is_subset(*b, *c))))
}

/// `{x ∩ C : C ∈ p}` without empties.
pub fn decompose(x: Set, p: &Partition) -> Result<Vec<Set>> {
    if !set::is_subset(x, p.carrier()) {
        return Err(PspError::Invalid("set is not inside the partition carrier".into()));
    }
    Ok(p.blocks.iter().map(|b| b & x).filter(|b| *b != 0).collect())
}

/// Meet of two partitions of one carrier.
pub fn meet(p: &Partition, q: &Partition) -> Partition {
    let mut blocks = Vec::new();
    for a in &p.blocks {
        for b in &q.blocks {
            if a & b != 0 {
                blocks.push(a & b);
            }
        }
    }
    Partition::new(blocks).expect("disjoint")
}

/// Every partition of `carrier`, each exactly once (restricted growth strings).
pub fn enumerate_partitions(carrier: Set) -> Result<PartitionIter> {
    let elems: Vec<usize> = set::members(carrier).collect();
    if elems.len() > ENUMERATION_LIMIT {
        return Err(PspError::TooLarge { what: "partition carrier", size: elems.len(), limit: ENUMERATION_LIMIT });
    }
    let n = elems.len();
    Ok(PartitionIter { elems, rgs: vec![0; n], maxes: vec![0; n], done: false })
}

pub struct PartitionIter {
    elems: Vec<usize>,
    rgs: Vec<usize>,
    maxes: Vec<usize>,
    done: bool,
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let n = self.elems.len();
        let k = self.rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![0u64; k];
        for (j, &e) in self.elems.iter().enumerate() {
            blocks[self.rgs[j]] |= set::singleton(e);
        }
        let out = Partition::new(blocks).expect("valid");
        // advance the restricted growth string; maxes[j] = max(rgs[..j])
        let mut j = n;
        loop {
            if j <= 1 {
                self.done = true;
                break;
            }
            j -= 1;
            if self.rgs[j] <= self.maxes[j] {
                self.rgs[j] += 1;
                for t in j + 1..n {
                    self.rgs[t] = 0;
                    self.maxes[t] = self.maxes[t - 1].max(self.rgs[t - 1]);
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::from_indices;

    fn p(blocks: &[&[usize]]) -> Partition {
        Partition::new(blocks.iter().map(|b| from_indices(b.iter().map(|i| i - 1))).collect()).unwrap()
    }

    #[test]
    fn refinement_examples() {
        assert!(refines(&p(&[&[1], &[2], &[3]]), &p(&[&[1, 2], &[3]])).unwrap());
        assert!(!refines(&p(&[&[1, 2], &[3]]), &p(&[&[1, 3], &[2]])).unwrap());
        assert!(refines(&p(&[&[4, 5], &[1], &[2], &[3]]), &p(&[&[1, 4, 5], &[2], &[3]])).unwrap());
        assert_eq!(refines(&p(&[&[1], &[2]]), &p(&[&[1, 2, 3]])), Err(PspError::CarrierMismatch));
    }

    #[test]
    fn decompose_examples() {
        let x = from_indices([0, 1, 3]);
        let d = decompose(x, &p(&[&[1, 2, 3], &[4]])).unwrap();
        assert_eq!(d, vec![from_indices([0, 1]), from_indices([3])]);
        assert!(decompose(0, &p(&[&[1, 2]])).unwrap().is_empty());
        let d = decompose(from_indices([3, 4]), &p(&[&[4], &[5]])).unwrap();
        assert_eq!(d, vec![from_indices([3]), from_indices([4])]);
    }

    #[test]
    fn bell_numbers() {
        let bell = [1usize, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, b) in bell.iter().enumerate().skip(1) {
            let all: Vec<Partition> = enumerate_partitions(set::full(n)).unwrap().collect();
            assert_eq!(all.len(), *b, "n = {n}");
            let mut dedup = all.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), *b);
            assert!(all.iter().all(|q| q.carrier() == set::full(n)));
        }
        assert!(enumerate_partitions(set::full(13)).is_err());
    }

    #[test]
    fn refinement_is_a_partial_order() {
        for n in 1..=5 {
            let all: Vec<Partition> = enumerate_partitions(set::full(n)).unwrap().collect();
            for a in &all {
                assert!(refines(a, a).unwrap());
                for b in &all {
                    let ab = refines(a, b).unwrap();
                    if ab && refines(b, a).unwrap() {
                        assert_eq!(a, b);
                    }
                    if ab {
                        for c in &all {
                            if refines(b, c).unwrap() {
                                assert!(refines(a, c).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn merging() {
        let q = p(&[&[1], &[2], &[3], &[4]]).merge_meeting(from_indices([0, 2]));
        assert_eq!(q, p(&[&[1, 3], &[2], &[4]]));
        assert_eq!(meet(&p(&[&[1, 2], &[3, 4]]), &p(&[&[1, 3], &[2, 4]])), p(&[&[1], &[2], &[3], &[4]]));
    }
}
