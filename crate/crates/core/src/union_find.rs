use alloc::vec::Vec;

/// Disjoint sets over `0..len` with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        Self {
            parent: (0..len as u32).collect(),
            size: alloc::vec![1; len],
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
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Returns `true` if `a` and `b` were in different sets.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }

    /// Folds every union recorded in `other` into `self`.
    pub fn merge(&mut self, other: &mut UnionFind) {
        assert_eq!(self.len(), other.len());
        for x in 0..other.len() as u32 {
            let r = other.find(x);
            if r != x {
                self.union(x, r);
            }
        }
    }

    /// Dense labels numbered by smallest member: the set containing `0` is
    /// label 0, the next smallest unlabeled element opens label 1, and so on.
    pub fn labels(&mut self) -> (Vec<u32>, u32) {
        let len = self.len();
        let mut label_of_root = alloc::vec![u32::MAX; len];
        let mut labels = alloc::vec![0; len];
        let mut next = 0;
        for x in 0..len as u32 {
            let r = self.find(x) as usize;
            if label_of_root[r] == u32::MAX {
                label_of_root[r] = next;
                next += 1;
            }
            labels[x as usize] = label_of_root[r];
        }
        (labels, next)
    }
}
