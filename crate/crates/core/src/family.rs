//! The semigroup families on `[n]` and their enumeration.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{id_bound, PartialMap};

/// Default largest chain size for enumeration.
pub const DEFAULT_MAX_ENUMERATION_N: u8 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    /// All partial maps.
    P,
    /// Partial contractions.
    CP,
    /// Order-preserving partial contractions.
    OCP,
    /// Order-preserving or order-reversing partial contractions.
    ORCP,
    /// Full contractions.
    CT,
    /// Order-preserving full contractions.
    OCT,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 6] = [
        FamilyTag::P,
        FamilyTag::CP,
        FamilyTag::OCP,
        FamilyTag::ORCP,
        FamilyTag::CT,
        FamilyTag::OCT,
    ];

    /// The three families the starred-relation characterizations cover.
    pub const CONTRACTIONS: [FamilyTag; 3] = [FamilyTag::CP, FamilyTag::OCP, FamilyTag::ORCP];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyTag::P => "p",
            FamilyTag::CP => "cp",
            FamilyTag::OCP => "ocp",
            FamilyTag::ORCP => "orcp",
            FamilyTag::CT => "ct",
            FamilyTag::OCT => "oct",
        }
    }

    /// Tag byte used in cache files.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<FamilyTag> {
        Self::ALL.get(code as usize).copied()
    }

    /// Families directly containing this one.
    pub fn parents(self) -> &'static [FamilyTag] {
        match self {
            FamilyTag::P => &[],
            FamilyTag::CP => &[FamilyTag::P],
            FamilyTag::ORCP => &[FamilyTag::CP],
            FamilyTag::OCP => &[FamilyTag::ORCP],
            FamilyTag::CT => &[FamilyTag::CP],
            FamilyTag::OCT => &[FamilyTag::CT, FamilyTag::OCP],
        }
    }

    pub fn requires_full_domain(self) -> bool {
        matches!(self, FamilyTag::CT | FamilyTag::OCT)
    }

    pub fn is_contraction_family(self) -> bool {
        Self::CONTRACTIONS.contains(&self)
    }

    /// Whether `alpha` satisfies the family's defining predicate.
    pub fn member(self, alpha: &PartialMap) -> bool {
        match self {
            FamilyTag::P => true,
            FamilyTag::CP => alpha.is_contraction(),
            FamilyTag::OCP => alpha.is_contraction() && alpha.is_order_preserving(),
            FamilyTag::ORCP => {
                alpha.is_contraction()
                    && (alpha.is_order_preserving() || alpha.is_order_reversing())
            }
            FamilyTag::CT => alpha.is_full() && alpha.is_contraction(),
            FamilyTag::OCT => {
                alpha.is_full() && alpha.is_contraction() && alpha.is_order_preserving()
            }
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown family '{s}' (expected p|cp|ocp|orcp|ct|oct)"))
    }
}

/// Sentinel in [`MulTable`] for products falling outside the set.
const OUTSIDE: u32 = u32::MAX;

/// Cayley table of an [`ElementSet`], indexed by positions.
pub struct MulTable {
    size: usize,
    data: Vec<u32>,
}

impl MulTable {
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> Option<usize> {
        match self.data[a * self.size + b] {
            OUTSIDE => None,
            v => Some(v as usize),
        }
    }

    /// Product of two positions in a set known to be closed.
    #[inline]
    pub fn mul_closed(&self, a: usize, b: usize) -> usize {
        let v = self.data[a * self.size + b];
        debug_assert_ne!(v, OUTSIDE);
        v as usize
    }

    pub fn row(&self, a: usize) -> &[u32] {
        &self.data[a * self.size..(a + 1) * self.size]
    }
}

/// An enumerated family on `[n]`, sorted by canonical id.
pub struct ElementSet {
    family: FamilyTag,
    n: u8,
    elements: Vec<PartialMap>,
    ids: Vec<u64>,
    index: HashMap<u64, usize>,
    table: OnceLock<MulTable>,
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ElementSet")
            .field("family", &self.family)
            .field("n", &self.n)
            .field("len", &self.elements.len())
            .finish()
    }
}

impl ElementSet {
    /// Enumerates the family within the default budget.
    pub fn enumerate(family: FamilyTag, n: u8) -> Result<Self> {
        Self::enumerate_within(family, n, DEFAULT_MAX_ENUMERATION_N)
    }

    /// Filters all `(n+1)^n` partial maps by the family predicate.
    pub fn enumerate_within(family: FamilyTag, n: u8, max_n: u8) -> Result<Self> {
        if n > max_n {
            return Err(Error::BudgetExceeded {
                what: "enumeration",
                n,
                max: max_n,
            });
        }
        PartialMap::empty(n)?;
        let elements: Vec<PartialMap> = (0..id_bound(n))
            .into_par_iter()
            .filter_map(|id| {
                let alpha = PartialMap::decode(n, id).expect("id below bound");
                family.member(&alpha).then_some(alpha)
            })
            .collect();
        Ok(Self::from_sorted(family, n, elements))
    }

    /// Rebuilds a set from stored ids, checking order and membership.
    pub fn from_ids(family: FamilyTag, n: u8, ids: &[u64]) -> Result<Self> {
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::CacheFormat("ids are not strictly increasing".into()));
        }
        let elements = ids
            .iter()
            .map(|&id| {
                let alpha = PartialMap::decode(n, id)?;
                if family.member(&alpha) {
                    Ok(alpha)
                } else {
                    Err(Error::CacheFormat(format!("id {id} is not in {family}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_sorted(family, n, elements))
    }

    fn from_sorted(family: FamilyTag, n: u8, elements: Vec<PartialMap>) -> Self {
        let ids: Vec<u64> = elements.iter().map(PartialMap::canonical_id).collect();
        let index = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        Self {
            family,
            n,
            elements,
            ids,
            index,
            table: OnceLock::new(),
        }
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PartialMap] {
        &self.elements
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn get(&self, pos: usize) -> &PartialMap {
        &self.elements[pos]
    }

    pub fn position_of_id(&self, id: u64) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn position(&self, alpha: &PartialMap) -> Option<usize> {
        if alpha.n() != self.n {
            return None;
        }
        self.position_of_id(alpha.canonical_id())
    }

    pub fn contains(&self, alpha: &PartialMap) -> bool {
        self.position(alpha).is_some()
    }

    pub fn identity_position(&self) -> Option<usize> {
        self.position(&PartialMap::identity(self.n).ok()?)
    }

    /// The Cayley table, built on first use.
    pub fn table(&self) -> &MulTable {
        self.table.get_or_init(|| {
            let size = self.len();
            let rows: Vec<Vec<u32>> = self
                .elements
                .par_iter()
                .map(|a| {
                    self.elements
                        .iter()
                        .map(|b| {
                            self.position(&a.compose_unchecked(b))
                                .map_or(OUTSIDE, |p| p as u32)
                        })
                        .collect()
                })
                .collect();
            MulTable {
                size,
                data: rows.concat(),
            }
        })
    }

    pub fn idempotents(&self) -> Vec<usize> {
        let t = self.table();
        (0..self.len())
            .filter(|&i| t.mul(i, i) == Some(i))
            .collect()
    }
}

/// Outcome of a closure check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureVerdict {
    pub closed: bool,
    pub counterexample: Option<(PartialMap, PartialMap)>,
}

/// Checks that every product of two family members is again a member,
/// by direct composition and predicate evaluation.
pub fn verify_closure(family: FamilyTag, n: u8, max_n: u8) -> Result<ClosureVerdict> {
    let set = ElementSet::enumerate_within(family, n, max_n)?;
    let counterexample = set.elements().par_iter().find_map_first(|a| {
        set.elements()
            .iter()
            .find(|b| !family.member(&a.compose_unchecked(b)))
            .map(|b| (a.clone(), b.clone()))
    });
    Ok(ClosureVerdict {
        closed: counterexample.is_none(),
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(images: &[u8]) -> PartialMap {
        PartialMap::from_images(images).unwrap()
    }

    #[test]
    fn member_examples() {
        assert!(FamilyTag::ORCP.member(&pm(&[3, 0, 1])));
        assert!(!FamilyTag::OCP.member(&pm(&[3, 0, 1])));
        assert!(!FamilyTag::CP.member(&pm(&[1, 3, 0])));
        assert!(FamilyTag::P.member(&pm(&[1, 3, 0])));
        assert!(!FamilyTag::CT.member(&pm(&[1, 2, 0])));
        assert!(FamilyTag::OCT.member(&pm(&[1, 2, 2])));
    }

    #[test]
    fn small_counts() {
        assert_eq!(ElementSet::enumerate(FamilyTag::P, 2).unwrap().len(), 9);
        let cp1 = ElementSet::enumerate(FamilyTag::CP, 1).unwrap();
        assert_eq!(cp1.ids(), &[0, 1]);
    }

    #[test]
    fn budget() {
        let err = ElementSet::enumerate_within(FamilyTag::P, 5, 4).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { n: 5, max: 4, .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn closure_examples() {
        assert!(verify_closure(FamilyTag::CP, 3, 6).unwrap().closed);
        assert!(verify_closure(FamilyTag::OCP, 4, 6).unwrap().closed);
        assert!(verify_closure(FamilyTag::ORCP, 4, 6).unwrap().closed);
    }

    #[test]
    fn table_and_lookup() {
        let s = ElementSet::enumerate(FamilyTag::CP, 3).unwrap();
        let id = s.identity_position().unwrap();
        let t = s.table();
        for i in 0..s.len() {
            assert_eq!(t.mul(id, i), Some(i));
            assert_eq!(t.mul(i, id), Some(i));
        }
        assert_eq!(s.position(&PartialMap::identity(4).unwrap()), None);
    }

    #[test]
    fn from_ids_rejects_bad_input() {
        assert!(ElementSet::from_ids(FamilyTag::CP, 2, &[3, 1]).is_err());
        let good = pm(&[1, 0, 3]).canonical_id();
        let bad = pm(&[1, 3, 0]).canonical_id();
        assert!(ElementSet::from_ids(FamilyTag::CP, 3, &[good]).is_ok());
        assert!(ElementSet::from_ids(FamilyTag::CP, 3, &[bad]).is_err());
    }

    #[test]
    fn tag_roundtrip() {
        for t in FamilyTag::ALL {
            assert_eq!(FamilyTag::from_code(t.code()), Some(t));
            assert_eq!(t.as_str().parse::<FamilyTag>().unwrap(), t);
        }
        assert!("xyz".parse::<FamilyTag>().is_err());
    }
}
