//! Transversals of kernel partitions and the convexity conditions on them.
//!
//! A transversal picks one point from every block. It is *convex* when the
//! chosen points form an integer interval, *relatively convex* when no domain
//! point between two chosen points is skipped, and *admissible* when sending
//! each block to its representative is a contraction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::KernelPartition;
use crate::map::PartialMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transversal<'k> {
    kernel: &'k KernelPartition,
    // reps[i] lies in block i.
    reps: Vec<u8>,
}

/// Whether the sorted `points` form an integer interval.
pub fn is_interval(points: &[u8]) -> bool {
    debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
    points.windows(2).all(|w| w[1] == w[0] + 1)
}

impl<'k> Transversal<'k> {
    /// Builds the transversal choosing `reps[i]` from block `i`.
    pub fn new(kernel: &'k KernelPartition, reps: Vec<u8>) -> Result<Self> {
        if reps.len() != kernel.height() {
            return Err(Error::HypothesisNotMet(format!(
                "{} representatives for {} blocks",
                reps.len(),
                kernel.height()
            )));
        }
        for (block, r) in kernel.blocks().iter().zip(&reps) {
            if !block.contains(r) {
                return Err(Error::HypothesisNotMet(format!(
                    "{r} is not in block {block:?}"
                )));
            }
        }
        Ok(Self { kernel, reps })
    }

    pub fn kernel(&self) -> &KernelPartition {
        self.kernel
    }

    /// Representative of each block, in block order.
    pub fn representatives(&self) -> &[u8] {
        &self.reps
    }

    /// The chosen points as a sorted set.
    pub fn points(&self) -> Vec<u8> {
        let mut p = self.reps.clone();
        p.sort_unstable();
        p
    }

    pub fn is_convex(&self) -> bool {
        is_interval(&self.points())
    }

    pub fn is_relatively_convex(&self) -> bool {
        self.skipped_domain_point().is_none()
    }

    /// A domain point lying between two chosen points but not chosen itself.
    pub fn skipped_domain_point(&self) -> Option<u8> {
        let points = self.points();
        let (lo, hi) = (points[0], *points.last().expect("nonempty"));
        self.kernel
            .domain()
            .into_iter()
            .find(|z| (lo..=hi).contains(z) && points.binary_search(z).is_err())
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility_violation().is_none()
    }

    /// A block pair `(i, j)` whose representatives are farther apart than
    /// the closest points of the two blocks.
    pub fn admissibility_violation(&self) -> Option<(usize, usize)> {
        let blocks = self.kernel.blocks();
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                let gap = blocks[i]
                    .iter()
                    .flat_map(|&x| blocks[j].iter().map(move |&y| x.abs_diff(y)))
                    .min()
                    .expect("blocks are nonempty");
                if self.reps[i].abs_diff(self.reps[j]) > gap {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Every transversal of `kernel`, in lexicographic order of the chosen points
/// (the last block varies fastest).
pub fn all_transversals(kernel: &KernelPartition) -> Vec<Transversal<'_>> {
    let blocks = kernel.blocks();
    let mut out = Vec::new();
    let mut cursor = vec![0usize; blocks.len()];
    loop {
        let reps = cursor.iter().zip(blocks).map(|(&c, b)| b[c]).collect();
        out.push(Transversal { kernel, reps });
        // odometer step
        let mut k = blocks.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cursor[k] += 1;
            if cursor[k] < blocks[k].len() {
                break;
            }
            cursor[k] = 0;
        }
    }
}

/// Least convex transversal, if any.
pub fn convex_transversal(kernel: &KernelPartition) -> Option<Transversal<'_>> {
    all_transversals(kernel)
        .into_iter()
        .find(Transversal::is_convex)
}

/// Which transversal statement to check.
#[derive(Debug, Clone, Copy)]
pub enum LemmaQuery<'a> {
    /// Elementwise-ordered blocks, `p >= 3`, some interior block of size at
    /// least 2: no transversal is relatively convex.
    RelativelyConvexNonexistence(&'a KernelPartition),
    /// Elementwise-ordered blocks, `p >= 3`, all interior blocks singletons:
    /// some transversal is admissible.
    AdmissibleExistence(&'a KernelPartition),
    /// A contraction sends an interval of its domain to an interval.
    ConvexImage {
        map: &'a PartialMap,
        subset: &'a [u8],
    },
}

/// One rejected candidate in an exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refutation {
    pub points: Vec<u8>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    /// Whether the statement's conclusion was confirmed.
    pub holds: bool,
    /// The transversal or image set supporting (or contradicting) the verdict.
    pub witness: Option<Vec<u8>>,
    /// Candidates examined and why each was rejected.
    pub refutations: Vec<Refutation>,
}

fn ordered_with_interior(kernel: &KernelPartition) -> Result<&[Vec<u8>]> {
    if !kernel.is_elementwise_ordered() {
        return Err(Error::HypothesisNotMet(
            "blocks are not elementwise ordered".into(),
        ));
    }
    if kernel.height() < 3 {
        return Err(Error::HypothesisNotMet(format!(
            "height {} < 3",
            kernel.height()
        )));
    }
    let blocks = kernel.blocks();
    Ok(&blocks[1..blocks.len() - 1])
}

/// Confirms a transversal statement by exhaustive search, never assuming it.
pub fn lemma_witness(query: LemmaQuery<'_>) -> Result<LemmaReport> {
    match query {
        LemmaQuery::RelativelyConvexNonexistence(kernel) => {
            let interior = ordered_with_interior(kernel)?;
            if interior.iter().all(|b| b.len() < 2) {
                return Err(Error::HypothesisNotMet(
                    "no interior block of size >= 2".into(),
                ));
            }
            let mut refutations = Vec::new();
            for t in all_transversals(kernel) {
                match t.skipped_domain_point() {
                    Some(z) => refutations.push(Refutation {
                        points: t.points(),
                        reason: format!("skips domain point {z}"),
                    }),
                    None => {
                        return Ok(LemmaReport {
                            holds: false,
                            witness: Some(t.points()),
                            refutations,
                        })
                    }
                }
            }
            Ok(LemmaReport {
                holds: true,
                witness: None,
                refutations,
            })
        }
        LemmaQuery::AdmissibleExistence(kernel) => {
            let interior = ordered_with_interior(kernel)?;
            if interior.iter().any(|b| b.len() != 1) {
                return Err(Error::HypothesisNotMet(
                    "an interior block is not a singleton".into(),
                ));
            }
            let mut refutations = Vec::new();
            for t in all_transversals(kernel) {
                match t.admissibility_violation() {
                    Some((i, j)) => refutations.push(Refutation {
                        points: t.points(),
                        reason: format!("blocks {} and {} too far apart", i + 1, j + 1),
                    }),
                    None => {
                        return Ok(LemmaReport {
                            holds: true,
                            witness: Some(t.points()),
                            refutations,
                        })
                    }
                }
            }
            Ok(LemmaReport {
                holds: false,
                witness: None,
                refutations,
            })
        }
        LemmaQuery::ConvexImage { map, subset } => {
            if !map.is_contraction() {
                return Err(Error::HypothesisNotMet(format!(
                    "{map} is not a contraction"
                )));
            }
            let mut a = subset.to_vec();
            a.sort_unstable();
            a.dedup();
            if a.is_empty() || !is_interval(&a) {
                return Err(Error::HypothesisNotMet(format!("{a:?} is not convex")));
            }
            let mut image = Vec::with_capacity(a.len());
            for &x in &a {
                match map.get(x) {
                    Some(v) => image.push(v),
                    None => {
                        return Err(Error::HypothesisNotMet(format!(
                            "{x} is outside the domain"
                        )))
                    }
                }
            }
            image.sort_unstable();
            image.dedup();
            let holds = is_interval(&image);
            let refutations = if holds {
                Vec::new()
            } else {
                vec![Refutation {
                    points: image.clone(),
                    reason: "image has a gap".into(),
                }]
            };
            Ok(LemmaReport {
                holds,
                witness: Some(image),
                refutations,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(images: &[u8]) -> KernelPartition {
        PartialMap::from_images(images).unwrap().kernel().unwrap()
    }

    fn points(ts: &[Transversal<'_>]) -> Vec<Vec<u8>> {
        ts.iter().map(Transversal::points).collect()
    }

    #[test]
    fn enumeration_examples() {
        let k = kernel(&[1, 2, 2, 3]);
        assert_eq!(
            points(&all_transversals(&k)),
            vec![vec![1, 2, 4], vec![1, 3, 4]]
        );

        let single = kernel(&[1, 1]);
        assert_eq!(points(&all_transversals(&single)), vec![vec![1], vec![2]]);

        // blocks {1,2}, {3}, {4,5,6}
        let k = KernelPartition::new(6, vec![vec![1, 2], vec![3], vec![4, 5, 6]], vec![1, 2, 3])
            .unwrap();
        assert_eq!(all_transversals(&k).len(), 6);
    }

    #[test]
    fn convexity_examples() {
        let k = kernel(&[1, 2, 2]);
        let t = Transversal::new(&k, vec![1, 2]).unwrap();
        assert!(t.is_convex() && t.is_relatively_convex() && t.is_admissible());

        let k = kernel(&[3, 0, 1]);
        let t = Transversal::new(&k, vec![1, 3]).unwrap();
        assert!(!t.is_convex());
        assert!(t.is_relatively_convex());

        let k = KernelPartition::new(5, vec![vec![5]], vec![1]).unwrap();
        assert!(Transversal::new(&k, vec![5]).unwrap().is_convex());
    }

    #[test]
    fn relative_convexity_and_admissibility_fail() {
        let k = kernel(&[1, 2, 2, 3]);
        let t = Transversal::new(&k, vec![1, 2, 4]).unwrap();
        assert!(!t.is_relatively_convex());
        assert_eq!(t.skipped_domain_point(), Some(3));
        assert!(!t.is_admissible());
        assert_eq!(t.admissibility_violation(), Some((1, 2)));
    }

    #[test]
    fn rejects_bad_representatives() {
        let k = kernel(&[1, 2, 2, 3]);
        assert!(Transversal::new(&k, vec![1, 4, 4]).is_err());
        assert!(Transversal::new(&k, vec![1, 2]).is_err());
    }

    #[test]
    fn lemma_checks() {
        let k = kernel(&[1, 2, 2, 3]);
        let r = lemma_witness(LemmaQuery::RelativelyConvexNonexistence(&k)).unwrap();
        assert!(r.holds);
        assert_eq!(r.refutations.len(), 2);

        let alpha = PartialMap::from_images(&[1, 2, 2, 3]).unwrap();
        let r = lemma_witness(LemmaQuery::ConvexImage {
            map: &alpha,
            subset: &[2, 3],
        })
        .unwrap();
        assert!(r.holds);
        assert_eq!(r.witness, Some(vec![2]));

        let k = kernel(&[1, 1, 2, 3, 3]);
        let r = lemma_witness(LemmaQuery::AdmissibleExistence(&k)).unwrap();
        assert!(r.holds);
        assert_eq!(r.witness, Some(vec![2, 3, 4]));
    }

    #[test]
    fn lemma_hypotheses() {
        let k = kernel(&[1, 2, 3]);
        assert!(matches!(
            lemma_witness(LemmaQuery::RelativelyConvexNonexistence(&k)),
            Err(Error::HypothesisNotMet(_))
        ));
        let unordered = kernel(&[2, 1, 2, 3]);
        assert!(matches!(
            lemma_witness(LemmaQuery::AdmissibleExistence(&unordered)),
            Err(Error::HypothesisNotMet(_))
        ));
        let alpha = PartialMap::from_images(&[1, 0, 2]).unwrap();
        assert!(lemma_witness(LemmaQuery::ConvexImage {
            map: &alpha,
            subset: &[1, 2]
        })
        .is_err());
        assert!(lemma_witness(LemmaQuery::ConvexImage {
            map: &alpha,
            subset: &[1, 3]
        })
        .is_err());
    }
}
