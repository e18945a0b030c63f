//! Set partitions of element positions and a small union-find.

use std::collections::HashMap;
use std::hash::Hash;

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `true` if the two sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    /// Merges every class of `classes` into one set.
    pub fn union_classes(&mut self, classes: &[Vec<usize>]) {
        for class in classes {
            for w in class.windows(2) {
                self.union(w[0], w[1]);
            }
        }
    }

    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let roots: Vec<usize> = (0..self.parent.len()).map(|i| self.find(i)).collect();
        classes_by_key(&roots)
    }
}

/// Groups positions `0..keys.len()` by equal key. Each class is ascending and
/// classes are ordered by least member.
pub fn classes_by_key<K: Hash + Eq>(keys: &[K]) -> Vec<Vec<usize>> {
    let mut slot: HashMap<&K, usize> = HashMap::with_capacity(keys.len());
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, k) in keys.iter().enumerate() {
        let c = *slot.entry(k).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(i);
    }
    classes
}

/// Class index of every position.
pub fn class_of(classes: &[Vec<usize>], len: usize) -> Vec<usize> {
    let mut out = vec![usize::MAX; len];
    for (c, class) in classes.iter().enumerate() {
        for &i in class {
            out[i] = c;
        }
    }
    out
}

/// Relabels a sequence by order of first occurrence, so two sequences induce
/// the same partition of their index set iff their colorings are equal.
pub fn canonical_coloring<T: Copy + Hash + Eq>(values: impl IntoIterator<Item = T>) -> Vec<u32> {
    let mut labels: HashMap<T, u32> = HashMap::new();
    values
        .into_iter()
        .map(|v| {
            let next = labels.len() as u32;
            *labels.entry(v).or_insert(next)
        })
        .collect()
}

/// Whether every class of `fine` lies inside a class of `coarse`.
pub fn refines(fine: &[Vec<usize>], coarse: &[Vec<usize>], len: usize) -> bool {
    let owner = class_of(coarse, len);
    fine.iter()
        .all(|c| c.iter().all(|&i| owner[i] == owner[c[0]]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping_is_ordered() {
        let classes = classes_by_key(&["b", "a", "b", "c", "a"]);
        assert_eq!(classes, vec![vec![0, 2], vec![1, 4], vec![3]]);
    }

    #[test]
    fn union_find_join() {
        let mut uf = UnionFind::new(6);
        uf.union_classes(&[vec![0, 2], vec![1], vec![3, 4]]);
        uf.union(2, 4);
        assert_eq!(uf.classes(), vec![vec![0, 2, 3, 4], vec![1], vec![5]]);
        assert!(!uf.union(0, 3));
    }

    #[test]
    fn coloring() {
        assert_eq!(canonical_coloring([7, 3, 7, 9, 3]), vec![0, 1, 0, 2, 1]);
        assert_eq!(canonical_coloring([1, 5, 1, 2, 5]), vec![0, 1, 0, 2, 1]);
    }

    #[test]
    fn refinement() {
        let fine = vec![vec![0], vec![1, 2], vec![3]];
        let coarse = vec![vec![0, 3], vec![1, 2]];
        assert!(refines(&fine, &coarse, 4));
        assert!(!refines(&coarse, &fine, 4));
    }
}
