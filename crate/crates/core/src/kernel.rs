//! Kernel partitions: the tabular form `(A_1 … A_p / x_1 … x_p)` of a map.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::PartialMap;

/// The blocks of `ker α` on `dom α`, ordered by least element, with the
/// image of each block.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct KernelPartition {
    n: u8,
    blocks: Vec<Vec<u8>>,
    images: Vec<u8>,
}

impl KernelPartition {
    /// Builds a partition from explicit blocks and their images. Blocks are
    /// sorted internally and reordered by minimum element.
    pub fn new(n: u8, blocks: Vec<Vec<u8>>, images: Vec<u8>) -> Result<Self> {
        if blocks.len() != images.len() {
            return Err(Error::HypothesisNotMet(format!(
                "{} blocks but {} images",
                blocks.len(),
                images.len()
            )));
        }
        let mut seen = vec![false; n as usize + 1];
        let mut used = vec![false; n as usize + 1];
        let mut pairs = Vec::with_capacity(blocks.len());
        for (mut block, image) in blocks.into_iter().zip(images) {
            if block.is_empty() {
                return Err(Error::HypothesisNotMet("empty block".into()));
            }
            if image == 0 || image > n {
                return Err(Error::OutOfRange {
                    n,
                    value: image as u32,
                });
            }
            if std::mem::replace(&mut used[image as usize], true) {
                return Err(Error::HypothesisNotMet(format!("image {image} used twice")));
            }
            block.sort_unstable();
            for &p in &block {
                if p == 0 || p > n {
                    return Err(Error::OutOfRange { n, value: p as u32 });
                }
                if std::mem::replace(&mut seen[p as usize], true) {
                    return Err(Error::DuplicatePoint(p));
                }
            }
            pairs.push((block, image));
        }
        if pairs.is_empty() {
            return Err(Error::EmptyDomain);
        }
        pairs.sort_by_key(|(b, _)| b[0]);
        let (blocks, images) = pairs.into_iter().unzip();
        Ok(Self { n, blocks, images })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<u8>] {
        &self.blocks
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    /// Number of blocks, `p = h(α)`.
    pub fn height(&self) -> usize {
        self.blocks.len()
    }

    /// `dom α`, ascending.
    pub fn domain(&self) -> Vec<u8> {
        let mut d: Vec<u8> = self.blocks.iter().flatten().copied().collect();
        d.sort_unstable();
        d
    }

    pub fn block_of(&self, point: u8) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&point))
    }

    /// `A_1 < A_2 < … < A_p` elementwise.
    pub fn is_elementwise_ordered(&self) -> bool {
        self.blocks.windows(2).all(|w| w[0].last() < w[1].first())
    }

    /// The map with these blocks and images.
    pub fn to_map(&self) -> PartialMap {
        let pairs: Vec<(u8, u8)> = self
            .blocks
            .iter()
            .zip(&self.images)
            .flat_map(|(b, &x)| b.iter().map(move |&p| (p, x)))
            .collect();
        PartialMap::new(self.n, &pairs).expect("kernel partition holds a valid map")
    }
}

impl fmt::Debug for KernelPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, (b, x)) in self.blocks.iter().zip(&self.images).enumerate() {
            if k > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{b:?}->{x}")?;
        }
        f.write_str(")")
    }
}

impl PartialMap {
    /// The kernel blocks of the map restricted to its domain.
    pub fn kernel(&self) -> Result<KernelPartition> {
        let blocks = self.kernel_blocks();
        if blocks.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let images = blocks
            .iter()
            .map(|b| self.get(b[0]).expect("kernel block lies in the domain"))
            .collect();
        Ok(KernelPartition {
            n: self.n(),
            blocks,
            images,
        })
    }

    /// The kernel as a list of blocks ordered by least element; empty for
    /// the empty map. Two maps have the same kernel relation iff these agree.
    pub fn kernel_blocks(&self) -> Vec<Vec<u8>> {
        let mut by_value: Vec<Vec<u8>> = vec![Vec::new(); self.n() as usize + 1];
        let mut order = Vec::new();
        for (x, v) in self.pairs() {
            if by_value[v as usize].is_empty() {
                order.push(v);
            }
            by_value[v as usize].push(x);
        }
        // Points are visited in ascending order, so first-seen order is
        // ordering by least element.
        order
            .into_iter()
            .map(|v| std::mem::take(&mut by_value[v as usize]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_lemma_example() {
        let a = PartialMap::from_images(&[1, 2, 2, 3]).unwrap();
        let k = a.kernel().unwrap();
        assert_eq!(k.blocks(), &[vec![1], vec![2, 3], vec![4]]);
        assert_eq!(k.images(), &[1, 2, 3]);
        assert_eq!(k.height(), 3);
        assert!(k.is_elementwise_ordered());
        assert_eq!(k.to_map(), a);
    }

    #[test]
    fn identity_and_constant() {
        let k = PartialMap::identity(3).unwrap().kernel().unwrap();
        assert_eq!(k.blocks(), &[vec![1], vec![2], vec![3]]);

        let c = PartialMap::from_images(&[2, 2, 2])
            .unwrap()
            .kernel()
            .unwrap();
        assert_eq!(c.blocks(), &[vec![1, 2, 3]]);
        assert_eq!(c.images(), &[2]);
    }

    #[test]
    fn empty_map_has_no_kernel() {
        let e = PartialMap::empty(3).unwrap();
        assert!(matches!(e.kernel(), Err(Error::EmptyDomain)));
        assert!(e.kernel_blocks().is_empty());
    }

    #[test]
    fn unordered_blocks_sorted_by_minimum() {
        // {1,3} -> 2, {2} -> 1
        let a = PartialMap::from_images(&[2, 1, 2]).unwrap();
        let k = a.kernel().unwrap();
        assert_eq!(k.blocks(), &[vec![1, 3], vec![2]]);
        assert_eq!(k.images(), &[2, 1]);
        assert!(!k.is_elementwise_ordered());
    }

    #[test]
    fn explicit_construction() {
        let k = KernelPartition::new(4, vec![vec![4], vec![3, 2], vec![1]], vec![3, 2, 1]).unwrap();
        assert_eq!(k.blocks(), &[vec![1], vec![2, 3], vec![4]]);
        assert_eq!(k.images(), &[1, 2, 3]);
        assert!(KernelPartition::new(4, vec![vec![1], vec![1]], vec![1, 2]).is_err());
        assert!(KernelPartition::new(4, vec![vec![1], vec![2]], vec![1, 1]).is_err());
        assert!(KernelPartition::new(4, vec![], vec![]).is_err());
    }
}
