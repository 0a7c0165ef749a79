use std::collections::BTreeSet;

use super::Bits;

/// The actual nodes of a branching recurrence: prefix-closed, and every
/// inner node has both children.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitTree {
    actual: BTreeSet<Bits>,
}

impl Default for BitTree {
    fn default() -> Self {
        BitTree::new()
    }
}

impl BitTree {
    pub fn new() -> BitTree {
        BitTree { actual: BTreeSet::from([Bits::empty()]) }
    }

    pub fn contains(&self, w: &Bits) -> bool {
        self.actual.contains(w)
    }

    pub fn is_leaf(&self, w: &Bits) -> bool {
        self.actual.contains(w) && !self.actual.contains(&w.child(0))
    }

    pub fn actual(&self) -> &BTreeSet<Bits> {
        &self.actual
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Bits> + '_ {
        self.actual.iter().filter(|w| self.is_leaf(w))
    }

    /// Leaves extending `w`, in order.
    pub fn leaves_under<'a>(&'a self, w: &'a Bits) -> impl Iterator<Item = &'a Bits> + 'a {
        self.actual.range(w.clone()..).take_while(move |v| w.is_prefix_of(v)).filter(|v| self.is_leaf(v))
    }

    /// The unique leaf that is a prefix of `x`, or a leaf extending `x`
    /// along zeros when `x` is shorter than the tree there.
    pub fn leaf_of(&self, x: &Bits) -> Option<Bits> {
        let mut w = Bits::empty();
        let mut bits = x.bits();
        loop {
            if !self.actual.contains(&w) {
                return None;
            }
            if self.is_leaf(&w) {
                return Some(w);
            }
            w = w.child(bits.next().unwrap_or(0));
        }
    }

    /// Split leaf `w` into `w0` and `w1`. Returns false if `w` is not a leaf.
    pub fn split(&mut self, w: &Bits) -> bool {
        if !self.is_leaf(w) {
            return false;
        }
        self.actual.insert(w.child(0));
        self.actual.insert(w.child(1));
        true
    }

    /// Prefix closure and the both-children rule.
    pub fn well_formed(&self) -> bool {
        self.actual.contains(&Bits::empty())
            && self.actual.iter().all(|w| {
                w.parent().is_none_or(|p| self.actual.contains(&p))
                    && self.actual.contains(&w.child(0)) == self.actual.contains(&w.child(1))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn two_splits() {
        let mut t = BitTree::new();
        assert_eq!(t.leaves().cloned().collect::<Vec<_>>(), vec![b("")]);
        assert!(t.split(&b("")));
        assert_eq!(t.actual().len(), 3);
        assert!(!t.split(&b("")));
        assert!(t.split(&b("1")));
        let leaves: Vec<_> = t.leaves().map(|w| w.as_str().to_string()).collect();
        assert_eq!(leaves, vec!["0", "10", "11"]);
        assert_eq!(t.leaves_under(&b("1")).count(), 2);
        assert_eq!(t.leaf_of(&b("0111")), Some(b("0")));
        assert_eq!(t.leaf_of(&b("1")), Some(b("10")));
    }

    proptest! {
        #[test]
        fn splits_keep_tree_well_formed(choices in prop::collection::vec(0usize..64, 0..12)) {
            let mut t = BitTree::new();
            for c in choices {
                let leaves: Vec<Bits> = t.leaves().cloned().collect();
                let w = leaves[c % leaves.len()].clone();
                prop_assert!(t.split(&w));
                prop_assert!(t.well_formed());
            }
            // every long string has exactly one leaf as a prefix
            for x in Bits::all_of_len(12) {
                let n = t.leaves().filter(|l| l.is_prefix_of(&x)).count();
                prop_assert_eq!(n, 1);
            }
        }
    }
}
