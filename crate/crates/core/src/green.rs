//! Green's relations and their starred versions on an enumerated family.
//!
//! The oracle computes `L*` and `R*` straight from the cancellation
//! conditions: `a L* b` iff `ax = ay ⇔ bx = by` for all `x, y ∈ S¹`. The
//! partition of `S` induced by `x ↦ ax` is stored as a canonical coloring
//! (a *fingerprint*), so two elements are `L*`-related exactly when their
//! fingerprints are equal. `R*` is the dual with `x ↦ xa`. `D*` is the join of
//! the two, closed with union-find. The characterizations group by image,
//! kernel and height instead, and the two are compared elsewhere.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::family::ElementSet;
use crate::partition::{canonical_coloring, class_of, classes_by_key, UnionFind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    L,
    R,
    H,
    D,
    Lstar,
    Rstar,
    Hstar,
    Dstar,
    Jstar,
}

impl Relation {
    pub const ALL: [Relation; 9] = [
        Relation::L,
        Relation::R,
        Relation::H,
        Relation::D,
        Relation::Lstar,
        Relation::Rstar,
        Relation::Hstar,
        Relation::Dstar,
        Relation::Jstar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::L => "l",
            Relation::R => "r",
            Relation::H => "h",
            Relation::D => "d",
            Relation::Lstar => "lstar",
            Relation::Rstar => "rstar",
            Relation::Hstar => "hstar",
            Relation::Dstar => "dstar",
            Relation::Jstar => "jstar",
        }
    }

    pub fn is_starred(self) -> bool {
        !matches!(self, Relation::L | Relation::R | Relation::H | Relation::D)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown relation '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Oracle,
    Characterization,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Oracle => "oracle",
            Method::Characterization => "characterization",
        })
    }
}

/// A partition of an element set's positions. Each class is ascending and
/// classes are ordered by least member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationClasses {
    pub relation: Relation,
    pub method: Method,
    pub classes: Vec<Vec<usize>>,
}

impl RelationClasses {
    /// Same partition, regardless of relation or method tags.
    pub fn same_partition(&self, other: &RelationClasses) -> bool {
        self.classes == other.classes
    }

    pub fn class_of(&self, len: usize) -> Vec<usize> {
        class_of(&self.classes, len)
    }

    pub fn class_containing(&self, pos: usize) -> Option<&[usize]> {
        self.classes
            .iter()
            .find(|c| c.binary_search(&pos).is_ok())
            .map(Vec::as_slice)
    }
}

/// The partition of `S` induced by left multiplication, `x ↦ a x`.
pub fn left_fingerprint(set: &ElementSet, a: usize) -> Vec<u32> {
    let t = set.table();
    canonical_coloring((0..set.len()).map(|x| t.mul(a, x)))
}

/// The partition of `S` induced by right multiplication, `x ↦ x a`.
pub fn right_fingerprint(set: &ElementSet, a: usize) -> Vec<u32> {
    let t = set.table();
    canonical_coloring((0..set.len()).map(|x| t.mul(x, a)))
}

fn require_identity(set: &ElementSet) -> Result<()> {
    // S¹ = S whenever S already contains the identity.
    if set.identity_position().is_none() {
        return Err(Error::HypothesisNotMet(format!(
            "{} has no identity",
            set.family()
        )));
    }
    Ok(())
}

fn join(len: usize, a: &[Vec<usize>], b: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(len);
    uf.union_classes(a);
    uf.union_classes(b);
    uf.classes()
}

fn intersect(a: &[Vec<usize>], b: &[Vec<usize>], len: usize) -> Vec<Vec<usize>> {
    let (ca, cb) = (class_of(a, len), class_of(b, len));
    let keys: Vec<(usize, usize)> = ca.into_iter().zip(cb).collect();
    classes_by_key(&keys)
}

/// Green's relations of the oversemigroup `P_n` restricted to `S`:
/// `L` is equal image, `R` equal kernel, `H` both and `D` their join in `S`.
pub fn classic_classes(set: &ElementSet, relation: Relation) -> Result<RelationClasses> {
    let len = set.len();
    let by_image = || classes_by_key(&set.elements().iter().map(|a| a.image()).collect::<Vec<_>>());
    let by_kernel = || {
        classes_by_key(
            &set.elements()
                .iter()
                .map(|a| a.kernel_blocks())
                .collect::<Vec<_>>(),
        )
    };
    let classes = match relation {
        Relation::L => by_image(),
        Relation::R => by_kernel(),
        Relation::H => intersect(&by_image(), &by_kernel(), len),
        Relation::D => join(len, &by_image(), &by_kernel()),
        other => return Err(Error::UnsupportedRelation(other.to_string())),
    };
    Ok(RelationClasses {
        relation,
        method: Method::Characterization,
        classes,
    })
}

/// Starred relations from the cancellation conditions on `S`.
pub fn star_classes_oracle(
    set: &ElementSet,
    relation: Relation,
    budget: &Budget,
) -> Result<RelationClasses> {
    budget.check_oracle(set.n())?;
    require_identity(set)?;
    let len = set.len();
    let left = || {
        let fp: Vec<Vec<u32>> = (0..len)
            .into_par_iter()
            .map(|a| left_fingerprint(set, a))
            .collect();
        classes_by_key(&fp)
    };
    let right = || {
        let fp: Vec<Vec<u32>> = (0..len)
            .into_par_iter()
            .map(|a| right_fingerprint(set, a))
            .collect();
        classes_by_key(&fp)
    };
    let classes = match relation {
        Relation::Lstar => left(),
        Relation::Rstar => right(),
        Relation::Hstar => intersect(&left(), &right(), len),
        Relation::Dstar => join(len, &left(), &right()),
        other => return Err(Error::UnsupportedRelation(other.to_string())),
    };
    Ok(RelationClasses {
        relation,
        method: Method::Oracle,
        classes,
    })
}

/// Starred relations by image, kernel and height. Only defined for the
/// partial contraction families.
pub fn star_classes_char(set: &ElementSet, relation: Relation) -> Result<RelationClasses> {
    if !set.family().is_contraction_family() {
        return Err(Error::FamilyUnsupported(set.family()));
    }
    let classes = match relation {
        Relation::Lstar => classic_classes(set, Relation::L)?.classes,
        Relation::Rstar => classic_classes(set, Relation::R)?.classes,
        Relation::Hstar => classic_classes(set, Relation::H)?.classes,
        Relation::Dstar => classes_by_key(
            &set.elements()
                .iter()
                .map(|a| a.height())
                .collect::<Vec<_>>(),
        ),
        other => return Err(Error::UnsupportedRelation(other.to_string())),
    };
    Ok(RelationClasses {
        relation,
        method: Method::Characterization,
        classes,
    })
}

/// Starred classes by the requested method.
pub fn star_classes(
    set: &ElementSet,
    relation: Relation,
    method: Method,
    budget: &Budget,
) -> Result<RelationClasses> {
    match (relation, method) {
        (Relation::Jstar, _) => Ok(jstar(set, budget)?.classes),
        (_, Method::Oracle) => star_classes_oracle(set, relation, budget),
        (_, Method::Characterization) => star_classes_char(set, relation),
    }
}

/// Principal *-ideals and the `J*` partition they induce.
#[derive(Debug, Clone)]
pub struct JStar {
    /// `ideals[a]` is `J*(a)` as ascending positions.
    pub ideals: Vec<Vec<usize>>,
    pub classes: RelationClasses,
}

/// `S¹ b S¹` as a membership vector.
fn two_sided_ideal(set: &ElementSet, b: usize) -> Vec<bool> {
    let t = set.table();
    let len = set.len();
    let mut left = vec![false; len];
    for x in 0..len {
        left[t.mul_closed(x, b)] = true;
    }
    let mut out = vec![false; len];
    for c in (0..len).filter(|&c| left[c]) {
        for &p in t.row(c) {
            out[p as usize] = true;
        }
    }
    out
}

/// `J*(a)` as the least fixpoint of `T ← T ∪ {c : c D* x b y, b ∈ T}`.
///
/// Once `T` meets a `D*`-class it contains all of it, so the fixpoint is the
/// union of the `D*`-classes reachable from the class of `a` in the graph
/// with an edge `C → class(x b y)` for every `b ∈ C`.
pub fn jstar(set: &ElementSet, budget: &Budget) -> Result<JStar> {
    budget.check_jstar(set.n())?;
    let dstar = star_classes_oracle(set, Relation::Dstar, budget)?;
    let len = set.len();
    let owner = dstar.class_of(len);
    let k = dstar.classes.len();

    let reached: Vec<Vec<bool>> = (0..len)
        .into_par_iter()
        .map(|b| {
            let mut r = vec![false; k];
            for (c, inside) in two_sided_ideal(set, b).into_iter().enumerate() {
                if inside {
                    r[owner[c]] = true;
                }
            }
            r
        })
        .collect();
    let mut succ = vec![vec![false; k]; k];
    for (b, r) in reached.iter().enumerate() {
        for (c, &hit) in r.iter().enumerate() {
            succ[owner[b]][c] |= hit;
        }
    }

    let closure_of_class: Vec<Vec<bool>> = (0..k)
        .map(|start| {
            let mut seen = vec![false; k];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(c) = stack.pop() {
                for d in 0..k {
                    if succ[c][d] && !seen[d] {
                        seen[d] = true;
                        stack.push(d);
                    }
                }
            }
            seen
        })
        .collect();

    let ideals: Vec<Vec<usize>> = (0..len)
        .map(|a| {
            let reach = &closure_of_class[owner[a]];
            (0..len).filter(|&c| reach[owner[c]]).collect()
        })
        .collect();
    let classes = RelationClasses {
        relation: Relation::Jstar,
        method: Method::Oracle,
        classes: classes_by_key(&ideals),
    };
    Ok(JStar { ideals, classes })
}

/// The least *-ideal containing `a`, computed by saturating under
/// `S¹ · S¹`, `L*`-classes and `R*`-classes directly. Independent of the
/// chain-based fixpoint in [`jstar`].
pub fn least_star_ideals(set: &ElementSet, budget: &Budget) -> Result<Vec<Vec<usize>>> {
    budget.check_jstar(set.n())?;
    let len = set.len();
    let lstar = star_classes_oracle(set, Relation::Lstar, budget)?;
    let rstar = star_classes_oracle(set, Relation::Rstar, budget)?;
    let (lof, rof) = (lstar.class_of(len), rstar.class_of(len));
    let principal: Vec<Vec<bool>> = (0..len)
        .into_par_iter()
        .map(|b| two_sided_ideal(set, b))
        .collect();

    Ok((0..len)
        .into_par_iter()
        .map(|a| {
            let mut inside = vec![false; len];
            let mut stack = vec![a];
            inside[a] = true;
            while let Some(b) = stack.pop() {
                let generated = principal[b]
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m)
                    .map(|(c, _)| c);
                let saturating = lstar.classes[lof[b]]
                    .iter()
                    .chain(&rstar.classes[rof[b]])
                    .copied();
                for c in generated.chain(saturating) {
                    if !inside[c] {
                        inside[c] = true;
                        stack.push(c);
                    }
                }
            }
            (0..len).filter(|&c| inside[c]).collect()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbundanceVerdict {
    pub side: Side,
    pub holds: bool,
    /// The idempotent-free class with the least-id member, when one exists.
    pub witness: Option<Vec<usize>>,
    pub failing_classes: usize,
}

/// Checks that every class contains an idempotent. The witness does not depend
/// on the order in which `classes` are listed.
pub fn abundance_from_classes(
    side: Side,
    classes: &[Vec<usize>],
    is_idempotent: impl Fn(usize) -> bool,
) -> AbundanceVerdict {
    let failing: Vec<&Vec<usize>> = classes
        .iter()
        .filter(|c| !c.iter().any(|&i| is_idempotent(i)))
        .collect();
    let witness = failing
        .iter()
        .min_by_key(|c| c.iter().min().copied())
        .map(|c| {
            let mut c = c.to_vec();
            c.sort_unstable();
            c
        });
    AbundanceVerdict {
        side,
        holds: failing.is_empty(),
        witness,
        failing_classes: failing.len(),
    }
}

/// Left abundance: every `L*`-class has an idempotent. Right: every `R*`-class.
pub fn abundance(
    set: &ElementSet,
    side: Side,
    method: Method,
    budget: &Budget,
) -> Result<AbundanceVerdict> {
    let relation = match side {
        Side::Left => Relation::Lstar,
        Side::Right => Relation::Rstar,
    };
    let classes = star_classes(set, relation, method, budget)?;
    let elements = set.elements();
    Ok(abundance_from_classes(side, &classes.classes, |i| {
        elements[i].is_idempotent()
    }))
}
