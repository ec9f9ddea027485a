//! Binary trie keyed by fixed-width bit vectors.
//!
//! A set over `width` members is a path of depth `width`: at depth `i` the
//! left child is taken when member `i` is present, the right child otherwise.
//! Lookup and insertion touch exactly `width` nodes.

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct SetTrie<V> {
    width: usize,
    /// `[left (bit set), right (bit clear)]` per internal node; leaves index
    /// into `values` through the same slot pair.
    nodes: Vec<[u32; 2]>,
    values: Vec<V>,
}

impl<V> SetTrie<V> {
    pub fn new(width: usize) -> SetTrie<V> {
        assert!(width <= 64);
        SetTrie {
            width,
            nodes: vec![[NONE, NONE]],
            values: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    fn branch(mask: u64, depth: usize) -> usize {
        if mask >> depth & 1 == 1 {
            0
        } else {
            1
        }
    }

    /// Exact-set membership: the stored value for `mask`, if any.
    pub fn get(&self, mask: u64) -> Option<&V> {
        self.position(mask).map(|i| &self.values[i])
    }

    pub fn get_mut(&mut self, mask: u64) -> Option<&mut V> {
        self.position(mask).map(move |i| &mut self.values[i])
    }

    /// Index into `values()` of the entry stored for `mask`.
    pub fn position(&self, mask: u64) -> Option<usize> {
        if self.width == 0 {
            return (!self.values.is_empty()).then_some(0);
        }
        let mut node = 0usize;
        for depth in 0..self.width {
            let next = self.nodes[node][Self::branch(mask, depth)];
            if next == NONE {
                return None;
            }
            if depth + 1 == self.width {
                return Some(next as usize);
            }
            node = next as usize;
        }
        unreachable!()
    }

    /// Inserts or replaces the value stored for `mask`; returns the previous one.
    pub fn insert(&mut self, mask: u64, value: V) -> Option<V> {
        if self.width == 0 {
            if self.values.is_empty() {
                self.values.push(value);
                return None;
            }
            return Some(std::mem::replace(&mut self.values[0], value));
        }
        let mut node = 0usize;
        for depth in 0..self.width {
            let b = Self::branch(mask, depth);
            let next = self.nodes[node][b];
            if depth + 1 == self.width {
                if next == NONE {
                    self.nodes[node][b] = self.values.len() as u32;
                    self.values.push(value);
                    return None;
                }
                return Some(std::mem::replace(&mut self.values[next as usize], value));
            }
            node = if next == NONE {
                self.nodes.push([NONE, NONE]);
                let id = self.nodes.len() - 1;
                self.nodes[node][b] = id as u32;
                id
            } else {
                next as usize
            };
        }
        unreachable!()
    }

    /// Stored values in insertion order.
    pub fn values(&self) -> &[V] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    #[test]
    fn insert_then_lookup() {
        let mut t = SetTrie::new(4);
        assert!(t.get(0).is_none());
        t.insert(0b0101, 3u32);
        assert_eq!(t.get(0b0101), Some(&3));
        assert!(t.get(0b0111).is_none());
        assert!(t.get(0b0100).is_none());
        assert_eq!(t.insert(0b0101, 2), Some(3));
        assert_eq!(t.get(0b0101), Some(&2));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn zero_width() {
        let mut t = SetTrie::new(0);
        assert!(t.get(0).is_none());
        t.insert(0, 'a');
        assert_eq!(t.get(0), Some(&'a'));
    }

    proptest! {
        #[test]
        fn behaves_like_a_map(width in 1usize..20, ops in prop::collection::vec((any::<u64>(), any::<u8>()), 0..200)) {
            let mut trie = SetTrie::new(width);
            let mut map = HashMap::new();
            let m = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
            for (k, v) in ops {
                let k = k & m;
                prop_assert_eq!(trie.insert(k, v), map.insert(k, v));
            }
            for (k, v) in &map {
                prop_assert_eq!(trie.get(*k), Some(v));
            }
            prop_assert_eq!(trie.len(), map.len());
        }
    }
}
