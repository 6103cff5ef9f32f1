//! Disjoint-set forest with union by rank and path halving.

use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            rank: alloc::vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grandparent = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grandparent;
            x = grandparent;
        }
        x
    }

    /// Merges the sets of `a` and `b`; returns false if already joined.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return false;
        }
        if self.rank[ra as usize] < self.rank[rb as usize] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        if self.rank[ra as usize] == self.rank[rb as usize] {
            self.rank[ra as usize] += 1;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn starts_as_singletons() {
        let mut uf = UnionFind::new(4);
        for i in 0..4 {
            assert_eq!(uf.find(i), i);
        }
    }

    #[test]
    fn union_is_transitive() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(1, 2));
        assert!(!uf.union(2, 0));
        assert_eq!(uf.find(0), uf.find(2));
        assert_ne!(uf.find(0), uf.find(3));
    }

    #[test]
    fn find_is_idempotent() {
        let mut uf = UnionFind::new(8);
        for i in 0..7 {
            uf.union(i, i + 1);
        }
        let root = uf.find(3);
        assert_eq!(uf.find(3), root);
        assert_eq!(uf.find(root), root);
    }

    proptest! {
        // The resulting partition does not depend on the order of unions.
        #[test]
        fn union_order_is_irrelevant(pairs in proptest::collection::vec((0u32..20, 0u32..20), 0..40)) {
            let mut forward = UnionFind::new(20);
            for &(a, b) in &pairs {
                forward.union(a, b);
            }
            let mut backward = UnionFind::new(20);
            for &(a, b) in pairs.iter().rev() {
                backward.union(b, a);
            }
            let canon = |uf: &mut UnionFind| {
                let roots: alloc::vec::Vec<u32> = (0..20).map(|i| uf.find(i)).collect();
                let mut ids = alloc::vec![u32::MAX; 20];
                let mut next = 0;
                roots
                    .iter()
                    .map(|&r| {
                        if ids[r as usize] == u32::MAX {
                            ids[r as usize] = next;
                            next += 1;
                        }
                        ids[r as usize]
                    })
                    .collect::<alloc::vec::Vec<u32>>()
            };
            prop_assert_eq!(canon(&mut forward), canon(&mut backward));
        }
    }
}
