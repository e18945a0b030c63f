//! Partial self-maps of the chain `[n] = {1, …, n}`.
//!
//! A [`PartialMap`] is stored as one byte per point, `0` meaning "undefined".
//! Maps act on the right, so `a.compose(&b)` sends `x` to `(x a) b`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported chain size. `(n + 1)^n` must fit in a `u64`.
pub const MAX_CHAIN: u8 = 15;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialMap {
    // entries[i] is the image of point i + 1, or 0 when undefined.
    entries: Box<[u8]>,
}

/// The elementary predicates of a partial map, each evaluated over its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PropertySet {
    pub contraction: bool,
    pub order_preserving: bool,
    pub order_reversing: bool,
    pub isometry: bool,
    pub order_decreasing: bool,
    pub idempotent: bool,
    pub full: bool,
}

fn check_chain(n: usize) -> Result<u8> {
    if n == 0 || n > MAX_CHAIN as usize {
        return Err(Error::ChainSize(n as u32));
    }
    Ok(n as u8)
}

impl PartialMap {
    /// Builds the map on `[n]` with exactly the given `(point, value)` assignments.
    pub fn new(n: u8, pairs: &[(u8, u8)]) -> Result<Self> {
        check_chain(n as usize)?;
        let mut entries = vec![0u8; n as usize];
        for &(point, value) in pairs {
            for v in [point, value] {
                if v == 0 || v > n {
                    return Err(Error::OutOfRange { n, value: v as u32 });
                }
            }
            let slot = &mut entries[point as usize - 1];
            if *slot != 0 {
                return Err(Error::DuplicatePoint(point));
            }
            *slot = value;
        }
        Ok(Self {
            entries: entries.into_boxed_slice(),
        })
    }

    /// Builds a map from its image list, `images[i]` being the image of `i + 1`
    /// (`0` for undefined). The chain size is `images.len()`.
    pub fn from_images(images: &[u8]) -> Result<Self> {
        let n = check_chain(images.len())?;
        if let Some(&v) = images.iter().find(|&&v| v > n) {
            return Err(Error::OutOfRange { n, value: v as u32 });
        }
        Ok(Self {
            entries: images.into(),
        })
    }

    pub fn empty(n: u8) -> Result<Self> {
        check_chain(n as usize)?;
        Ok(Self {
            entries: vec![0; n as usize].into_boxed_slice(),
        })
    }

    pub fn identity(n: u8) -> Result<Self> {
        check_chain(n as usize)?;
        Ok(Self {
            entries: (1..=n).collect(),
        })
    }

    /// The identity restricted to `points`.
    pub fn partial_identity(n: u8, points: &[u8]) -> Result<Self> {
        let pairs: Vec<(u8, u8)> = points.iter().map(|&p| (p, p)).collect();
        Self::new(n, &pairs)
    }

    #[inline]
    pub fn n(&self) -> u8 {
        self.entries.len() as u8
    }

    /// Image of `point`, if defined.
    #[inline]
    pub fn get(&self, point: u8) -> Option<u8> {
        if point == 0 {
            return None;
        }
        match self.entries.get(point as usize - 1) {
            Some(&0) | None => None,
            Some(&v) => Some(v),
        }
    }

    /// Raw image list; `0` marks an undefined point.
    pub fn images(&self) -> &[u8] {
        &self.entries
    }

    /// Defined `(point, value)` pairs in increasing point order.
    pub fn pairs(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (i as u8 + 1, v))
    }

    pub fn domain(&self) -> Vec<u8> {
        self.pairs().map(|(x, _)| x).collect()
    }

    /// The image set, sorted ascending.
    pub fn image(&self) -> Vec<u8> {
        let mut seen = [false; MAX_CHAIN as usize + 1];
        for (_, v) in self.pairs() {
            seen[v as usize] = true;
        }
        (1..=self.n()).filter(|&v| seen[v as usize]).collect()
    }

    /// `h(α) = |im α|`.
    pub fn height(&self) -> usize {
        self.image().len()
    }

    pub fn fixed_points(&self) -> Vec<u8> {
        self.pairs()
            .filter(|(x, v)| x == v)
            .map(|(x, _)| x)
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    pub fn is_full(&self) -> bool {
        self.entries.iter().all(|&v| v != 0)
    }

    /// `x (self ∘ other) = (x self) other`.
    pub fn compose(&self, other: &PartialMap) -> Result<PartialMap> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    /// Composition for maps already known to share a chain size.
    pub(crate) fn compose_unchecked(&self, other: &PartialMap) -> PartialMap {
        let entries = self
            .entries
            .iter()
            .map(|&v| {
                if v == 0 {
                    0
                } else {
                    other.entries[v as usize - 1]
                }
            })
            .collect();
        PartialMap { entries }
    }

    /// Consecutive pairs of defined points, `(x, xα, y, yα)` with `x < y`.
    fn consecutive(&self) -> impl Iterator<Item = (i32, i32, i32, i32)> + '_ {
        let pairs: Vec<(u8, u8)> = self.pairs().collect();
        (1..pairs.len()).map(move |k| {
            let (x, a) = pairs[k - 1];
            let (y, b) = pairs[k];
            (x as i32, a as i32, y as i32, b as i32)
        })
    }

    // Contraction and monotonicity are transitive along the chain, so checking
    // neighbouring domain points is enough.

    pub fn is_contraction(&self) -> bool {
        self.consecutive()
            .all(|(x, a, y, b)| (a - b).abs() <= y - x)
    }

    pub fn is_order_preserving(&self) -> bool {
        self.consecutive().all(|(_, a, _, b)| a <= b)
    }

    pub fn is_order_reversing(&self) -> bool {
        self.consecutive().all(|(_, a, _, b)| a >= b)
    }

    /// Distance preserving. On a chain an isometry is monotone, so this is
    /// neighbour distances preserved plus monotonicity.
    pub fn is_isometry(&self) -> bool {
        self.consecutive()
            .all(|(x, a, y, b)| (a - b).abs() == y - x)
            && (self.is_order_preserving() || self.is_order_reversing())
    }

    pub fn is_order_decreasing(&self) -> bool {
        self.pairs().all(|(x, v)| v <= x)
    }

    /// `α² = α`, by composition.
    pub fn is_idempotent(&self) -> bool {
        self.compose_unchecked(self) == *self
    }

    /// `im α = F(α)`.
    pub fn is_idempotent_via_fixpoints(&self) -> bool {
        self.image() == self.fixed_points()
    }

    pub fn classify(&self) -> PropertySet {
        PropertySet {
            contraction: self.is_contraction(),
            order_preserving: self.is_order_preserving(),
            order_reversing: self.is_order_reversing(),
            isometry: self.is_isometry(),
            order_decreasing: self.is_order_decreasing(),
            idempotent: self.is_idempotent(),
            full: self.is_full(),
        }
    }

    /// Base-`(n+1)` encoding, point 1 as the least significant digit and
    /// digit 0 for "undefined".
    pub fn canonical_id(&self) -> u64 {
        let base = self.n() as u64 + 1;
        self.entries
            .iter()
            .rev()
            .fold(0u64, |acc, &v| acc * base + v as u64)
    }

    pub fn decode(n: u8, id: u64) -> Result<PartialMap> {
        check_chain(n as usize)?;
        if id >= id_bound(n) {
            return Err(Error::IdOutOfRange { n, id });
        }
        let base = n as u64 + 1;
        let mut rest = id;
        let entries = (0..n)
            .map(|_| {
                let digit = (rest % base) as u8;
                rest /= base;
                digit
            })
            .collect();
        Ok(PartialMap { entries })
    }
}

/// Number of partial maps on `[n]`, `(n + 1)^n`.
pub fn id_bound(n: u8) -> u64 {
    (n as u64 + 1).pow(n as u32)
}

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (x, v)) in self.pairs().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}->{v}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialMap[{}]{}", self.n(), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(images: &[u8]) -> PartialMap {
        PartialMap::from_images(images).unwrap()
    }

    #[test]
    fn make_examples() {
        let e = PartialMap::new(3, &[]).unwrap();
        assert!(e.is_empty());
        assert_eq!(e.n(), 3);

        let a = PartialMap::new(3, &[(1, 1), (3, 3)]).unwrap();
        assert_eq!(a, pm(&[1, 0, 3]));

        let b = PartialMap::new(4, &[(1, 1), (2, 2), (3, 2), (4, 3)]).unwrap();
        assert_eq!(b.images(), &[1, 2, 2, 3]);
    }

    #[test]
    fn make_errors() {
        assert!(matches!(
            PartialMap::new(3, &[(4, 1)]),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            PartialMap::new(3, &[(1, 4)]),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            PartialMap::new(3, &[(0, 1)]),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            PartialMap::new(3, &[(2, 1), (2, 3)]),
            Err(Error::DuplicatePoint(2))
        ));
        assert!(matches!(PartialMap::new(0, &[]), Err(Error::ChainSize(0))));
        assert!(matches!(
            PartialMap::from_images(&[1, 5, 0]),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        let id = PartialMap::identity(3).unwrap();
        let beta = pm(&[1, 2, 2]);
        assert_eq!(id.compose(&beta).unwrap(), beta);

        let alpha = pm(&[1, 0, 3]);
        assert_eq!(alpha.compose(&beta).unwrap(), pm(&[1, 0, 2]));

        let empty = PartialMap::empty(3).unwrap();
        assert!(empty.compose(&beta).unwrap().is_empty());

        let other = PartialMap::identity(4).unwrap();
        assert!(matches!(
            alpha.compose(&other),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let p = pm(&[1, 0, 2]).classify();
        assert!(p.contraction && p.order_preserving && !p.isometry);
        assert!(!p.idempotent);

        let e = PartialMap::empty(3).unwrap().classify();
        assert!(e.contraction && e.order_preserving && e.order_reversing);
        assert!(e.isometry && e.order_decreasing && e.idempotent);
        assert!(!e.full);

        let r = pm(&[3, 0, 1]).classify();
        assert!(r.contraction && r.order_reversing && r.isometry);
        assert!(!r.order_preserving);
    }

    #[test]
    fn idempotent_via_fixpoints_examples() {
        assert!(PartialMap::identity(4)
            .unwrap()
            .is_idempotent_via_fixpoints());
        assert!(pm(&[1, 2, 2]).is_idempotent_via_fixpoints());
        let a = pm(&[1, 0, 2]);
        assert!(!a.is_idempotent_via_fixpoints());
        assert_ne!(a.compose(&a).unwrap(), a);
    }

    #[test]
    fn canonical_id_examples() {
        assert_eq!(PartialMap::empty(3).unwrap().canonical_id(), 0);
        assert_eq!(PartialMap::identity(2).unwrap().canonical_id(), 7);
        assert_eq!(
            PartialMap::decode(2, 7).unwrap(),
            PartialMap::identity(2).unwrap()
        );
        assert!(matches!(
            PartialMap::decode(2, 9),
            Err(Error::IdOutOfRange { .. })
        ));
        assert_eq!(id_bound(MAX_CHAIN), 16u64.pow(15));
    }

    #[test]
    fn display() {
        assert_eq!(pm(&[1, 0, 2]).to_string(), "{1->1, 3->2}");
        assert_eq!(PartialMap::empty(2).unwrap().to_string(), "{}");
    }

    #[test]
    fn image_domain_height() {
        let a = pm(&[2, 2, 0, 4]);
        assert_eq!(a.domain(), vec![1, 2, 4]);
        assert_eq!(a.image(), vec![2, 4]);
        assert_eq!(a.height(), 2);
        assert_eq!(a.fixed_points(), vec![2, 4]);
        assert_eq!(a.get(3), None);
        assert_eq!(a.get(4), Some(4));
    }
}
