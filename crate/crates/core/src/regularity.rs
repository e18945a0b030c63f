//! Regular and strongly regular elements.
//!
//! An element `α` of `S` is regular when `αβα = α` for some `β ∈ S`. In the
//! order-preserving-or-reversing contractions a regular element is *strongly
//! regular* when its kernel has a convex transversal.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::family::{ElementSet, FamilyTag};
use crate::kernel::KernelPartition;
use crate::map::PartialMap;
use crate::transversal::{all_transversals, convex_transversal, is_interval};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularityVerdict {
    pub element: String,
    pub element_id: u64,
    /// The semigroup regularity was decided in.
    pub family: FamilyTag,
    pub regular: bool,
    /// Least-id `β` with `αβα = α`.
    pub inverse_witness: Option<u64>,
    pub strongly_regular: bool,
    pub convex_transversal: Option<Vec<u8>>,
}

/// Searches `set` for an inverse witness by direct composition.
pub fn is_regular(alpha: &PartialMap, set: &ElementSet) -> Result<RegularityVerdict> {
    if !set.contains(alpha) {
        return Err(Error::NotMember(set.family()));
    }
    let witness = set
        .elements()
        .iter()
        .find(|b| alpha.compose_unchecked(b).compose_unchecked(alpha) == *alpha);
    Ok(RegularityVerdict {
        element: alpha.to_string(),
        element_id: alpha.canonical_id(),
        family: set.family(),
        regular: witness.is_some(),
        inverse_witness: witness.map(PartialMap::canonical_id),
        strongly_regular: false,
        convex_transversal: None,
    })
}

/// Least inverse witness (as a position) for every element, from the Cayley table.
pub fn regular_witnesses(set: &ElementSet) -> Vec<Option<usize>> {
    let t = set.table();
    (0..set.len())
        .into_par_iter()
        .map(|a| (0..set.len()).find(|&b| t.mul(a, b).and_then(|ab| t.mul(ab, a)) == Some(a)))
        .collect()
}

/// How the order-reversing case of the regularity criterion locates interior blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReversingBranch {
    /// `max A_1 + x_1 = min A_p + x_p = c` and `A_i = {c − x_i}`: the map
    /// restricted to the transversal is a reflection.
    Reflection,
    /// `min A_p − x_1 = max A_1 − x_p = d` and `A_i = {x_{p−i+1} + d}`.
    /// Misses regular reversing isometries that are not symmetric about the
    /// middle, e.g. `{1->4, 2->3, 4->1}`; kept for comparison.
    IndexShift,
}

/// Regularity criterion in `ORCP_n` for height at least 3.
pub fn regular_char_orcp(alpha: &PartialMap) -> Result<bool> {
    regular_char_orcp_with(alpha, ReversingBranch::Reflection)
}

pub fn regular_char_orcp_with(alpha: &PartialMap, reversing: ReversingBranch) -> Result<bool> {
    if !FamilyTag::ORCP.member(alpha) {
        return Err(Error::NotMember(FamilyTag::ORCP));
    }
    let h = alpha.height();
    if h < 3 {
        return Err(Error::HeightTooSmall(h));
    }
    let k = alpha.kernel()?;
    let blocks = k.blocks();
    let x: Vec<i32> = k.images().iter().map(|&v| v as i32).collect();
    let p = blocks.len();
    let max_first = *blocks[0].last().expect("nonempty") as i32;
    let min_last = blocks[p - 1][0] as i32;
    let singleton = |i: usize, v: i32| blocks[i].len() == 1 && blocks[i][0] as i32 == v;
    let interior = 1..p - 1;

    // translation: every block sits at distance d above its image
    let d = min_last - x[p - 1];
    let translation = max_first - x[0] == d && interior.clone().all(|i| singleton(i, x[i] + d));

    let reversed = match reversing {
        ReversingBranch::Reflection => {
            let c = max_first + x[0];
            min_last + x[p - 1] == c && interior.clone().all(|i| singleton(i, c - x[i]))
        }
        ReversingBranch::IndexShift => {
            let d = min_last - x[0];
            max_first - x[p - 1] == d && interior.clone().all(|i| singleton(i, x[p - 1 - i] + d))
        }
    };
    Ok(translation || reversed)
}

fn require_orcp(set: &ElementSet) -> Result<()> {
    if set.family() != FamilyTag::ORCP {
        return Err(Error::FamilyUnsupported(set.family()));
    }
    Ok(())
}

/// Regularity in `ORCP_n` plus the convex-transversal condition.
pub fn is_strongly_regular(alpha: &PartialMap, set: &ElementSet) -> Result<RegularityVerdict> {
    require_orcp(set)?;
    let mut verdict = is_regular(alpha, set)?;
    let kernel = alpha.kernel()?;
    verdict.convex_transversal = convex_transversal(&kernel).map(|t| t.points());
    verdict.strongly_regular = verdict.regular && verdict.convex_transversal.is_some();
    Ok(verdict)
}

fn has_convex_transversal(alpha: &PartialMap) -> bool {
    alpha
        .kernel()
        .map(|k| convex_transversal(&k).is_some())
        .unwrap_or(false)
}

/// Positions of the strongly regular elements of `ORCP_n`. The empty map has no
/// kernel partition and is left out.
pub fn sreg(set: &ElementSet) -> Result<Vec<usize>> {
    require_orcp(set)?;
    let regular = regular_witnesses(set);
    Ok((0..set.len())
        .filter(|&i| regular[i].is_some() && has_convex_transversal(set.get(i)))
        .collect())
}

/// Which reading of the idempotent normal form to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdempotentForm {
    /// `max A_1 = a + 1`, `min A_p = a + p`.
    EndpointsInImage,
    /// `max A_1 = a`, `min A_p = a + p`.
    EndpointsBelowImage,
}

fn idempotent_form_holds(kernel: &KernelPartition, form: IdempotentForm) -> bool {
    let blocks = kernel.blocks();
    let x: Vec<i32> = kernel.images().iter().map(|&v| v as i32).collect();
    let p = blocks.len() as i32;
    let a = x[0] - 1;
    let images_consecutive = x.iter().enumerate().all(|(i, &v)| v == a + 1 + i as i32);
    let interior_fixed = (1..blocks.len() - 1)
        .all(|i| blocks[i].len() == 1 && blocks[i][0] as i32 == a + 1 + i as i32);
    let max_first = *blocks[0].last().expect("nonempty") as i32;
    let min_last = *blocks.last().expect("nonempty").first().expect("nonempty") as i32;
    let first_ok = match form {
        IdempotentForm::EndpointsInImage => max_first == a + 1,
        IdempotentForm::EndpointsBelowImage => max_first == a,
    };
    images_consecutive && interior_fixed && first_ok && min_last == a + p
}

/// Checks that a strongly regular idempotent of height `p >= 2` has blocks
/// `A_1, {a+2}, …, {a+p−1}, A_p` with images `a+1, …, a+p`,
/// `max A_1 = a+1` and `min A_p = a+p`.
pub fn verify_idempotent_form(epsilon: &PartialMap) -> Result<bool> {
    verify_idempotent_form_with(epsilon, IdempotentForm::EndpointsInImage)
}

pub fn verify_idempotent_form_with(epsilon: &PartialMap, form: IdempotentForm) -> Result<bool> {
    if !epsilon.is_idempotent() {
        return Err(Error::NotIdempotent);
    }
    if !FamilyTag::ORCP.member(epsilon) {
        return Err(Error::NotStronglyRegular);
    }
    let kernel = epsilon.kernel().map_err(|_| Error::NotStronglyRegular)?;
    if convex_transversal(&kernel).is_none() {
        return Err(Error::NotStronglyRegular);
    }
    if kernel.height() < 2 {
        return Err(Error::HypothesisNotMet("height below 2".into()));
    }
    Ok(idempotent_form_holds(&kernel, form))
}

/// All pairs of regular elements whose product is not regular, in id order.
pub fn product_of_regulars_counterexamples(set: &ElementSet) -> Vec<(usize, usize)> {
    let regular = regular_witnesses(set);
    let t = set.table();
    let len = set.len();
    (0..len)
        .into_par_iter()
        .filter(|&a| regular[a].is_some())
        .flat_map_iter(|a| {
            let regular = &regular;
            (0..len).filter_map(move |b| {
                let ab = t.mul(a, b)?;
                (regular[b].is_some() && regular[ab].is_none()).then_some((a, b))
            })
        })
        .collect()
}

/// The least pair of regular elements with a non-regular product.
pub fn product_of_regulars_counterexample(set: &ElementSet) -> Option<(PartialMap, PartialMap)> {
    product_of_regulars_counterexamples(set)
        .first()
        .map(|&(a, b)| (set.get(a).clone(), set.get(b).clone()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairFailure {
    pub left: u64,
    pub right: u64,
    pub product: u64,
}

/// Idempotent products inside the strongly regular elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdempotentProducts {
    pub pairs: usize,
    /// Products equal to the empty map.
    pub zero_products: usize,
    /// Of those, how many come from idempotents with disjoint fixed points.
    pub zero_with_disjoint_fixpoints: usize,
    /// Non-empty products that are not strongly regular.
    pub failures: Vec<PairFailure>,
}

/// The three equivalent conditions on idempotents and regular elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HallConditions {
    pub idempotent_products_regular: bool,
    pub regular_elements_form_regular_subsemigroup: bool,
    pub idempotent_generated_is_regular: bool,
    pub idempotent_generated_size: usize,
}

impl HallConditions {
    pub fn agree(&self) -> bool {
        self.idempotent_products_regular == self.regular_elements_form_regular_subsemigroup
            && self.regular_elements_form_regular_subsemigroup
                == self.idempotent_generated_is_regular
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsemigroupCheck {
    pub closed: bool,
    pub regular: bool,
    pub closure_failures: Vec<PairFailure>,
    pub nonregular: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SregClosureReport {
    pub n: u8,
    pub sreg_size: usize,
    pub idempotents: usize,
    pub idempotent_products: IdempotentProducts,
    pub hall: HallConditions,
    /// Checks on the strongly regular elements with the empty map adjoined.
    pub subsemigroup: SubsemigroupCheck,
}

/// Whether `a` has an inverse inside the subset marked by `inside`.
fn regular_within(set: &ElementSet, inside: &[bool], a: usize) -> bool {
    let t = set.table();
    (0..set.len())
        .filter(|&b| inside[b])
        .any(|b| t.mul(t.mul_closed(a, b), a) == Some(a))
}

fn subset_check(set: &ElementSet, inside: &[bool]) -> SubsemigroupCheck {
    let t = set.table();
    let members: Vec<usize> = (0..set.len()).filter(|&i| inside[i]).collect();
    let ids = set.ids();
    let closure_failures: Vec<PairFailure> = members
        .par_iter()
        .flat_map_iter(|&a| {
            members.iter().filter_map(move |&b| {
                let ab = t.mul_closed(a, b);
                (!inside[ab]).then(|| PairFailure {
                    left: ids[a],
                    right: ids[b],
                    product: ids[ab],
                })
            })
        })
        .collect();
    let nonregular: Vec<u64> = members
        .par_iter()
        .filter(|&&a| !regular_within(set, inside, a))
        .map(|&a| ids[a])
        .collect();
    SubsemigroupCheck {
        closed: closure_failures.is_empty(),
        regular: nonregular.is_empty(),
        closure_failures,
        nonregular,
    }
}

fn hall_conditions(set: &ElementSet, inside: &[bool]) -> HallConditions {
    let t = set.table();
    let len = set.len();
    let members: Vec<usize> = (0..len).filter(|&i| inside[i]).collect();
    let idempotents: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&e| t.mul_closed(e, e) == e)
        .collect();

    // (i) every product of two idempotents is regular in the subset
    let idempotent_products_regular = idempotents.par_iter().all(|&e| {
        idempotents.iter().all(|&f| {
            let ef = t.mul_closed(e, f);
            inside[ef] && regular_within(set, inside, ef)
        })
    });

    // (ii) the regular elements form a regular subsemigroup
    let reg: Vec<bool> = (0..len)
        .map(|a| inside[a] && regular_within(set, inside, a))
        .collect();
    let reg_check = subset_check(set, &reg);
    let regular_elements_form_regular_subsemigroup = reg_check.closed && reg_check.regular;

    // (iii) the subsemigroup generated by the idempotents is regular
    let mut generated = vec![false; len];
    let mut frontier = idempotents.clone();
    for &e in &idempotents {
        generated[e] = true;
    }
    while let Some(a) = frontier.pop() {
        for &e in &idempotents {
            for ab in [t.mul_closed(a, e), t.mul_closed(e, a)] {
                if !generated[ab] {
                    generated[ab] = true;
                    frontier.push(ab);
                }
            }
        }
    }
    let idempotent_generated_size = generated.iter().filter(|&&g| g).count();
    let idempotent_generated_is_regular = (0..len)
        .filter(|&a| generated[a])
        .all(|a| regular_within(set, &generated, a));

    HallConditions {
        idempotent_products_regular,
        regular_elements_form_regular_subsemigroup,
        idempotent_generated_is_regular,
        idempotent_generated_size,
    }
}

/// Closure properties of the strongly regular elements of `ORCP_n`.
///
/// Products of idempotents with disjoint fixed-point sets can be the empty
/// map, which has no transversal. The subsemigroup and Hall checks therefore
/// run on the strongly regular elements together with the empty map, and
/// empty products are counted separately rather than reported as failures.
pub fn verify_sreg_closure(n: u8, budget: &Budget) -> Result<SregClosureReport> {
    let set = ElementSet::enumerate_within(FamilyTag::ORCP, n, budget.max_enumeration_n)?;
    budget.check_table(n, set.len())?;
    let t = set.table();
    let ids = set.ids();
    let strong = sreg(&set)?;
    let mut in_sreg = vec![false; set.len()];
    for &i in &strong {
        in_sreg[i] = true;
    }
    let zero = set
        .position(&PartialMap::empty(n)?)
        .expect("empty map is in ORCP_n");

    let idempotents: Vec<usize> = strong
        .iter()
        .copied()
        .filter(|&e| t.mul_closed(e, e) == e)
        .collect();
    let mut products = IdempotentProducts {
        pairs: 0,
        zero_products: 0,
        zero_with_disjoint_fixpoints: 0,
        failures: Vec::new(),
    };
    for &e in &idempotents {
        for &f in &idempotents {
            products.pairs += 1;
            let ef = t.mul_closed(e, f);
            if ef == zero {
                products.zero_products += 1;
                let fe = set.get(e).fixed_points();
                if !set.get(f).fixed_points().iter().any(|x| fe.contains(x)) {
                    products.zero_with_disjoint_fixpoints += 1;
                }
            } else if !in_sreg[ef] {
                products.failures.push(PairFailure {
                    left: ids[e],
                    right: ids[f],
                    product: ids[ef],
                });
            }
        }
    }

    let mut with_zero = in_sreg.clone();
    with_zero[zero] = true;
    Ok(SregClosureReport {
        n,
        sreg_size: strong.len(),
        idempotents: idempotents.len(),
        idempotent_products: products,
        hall: hall_conditions(&set, &with_zero),
        subsemigroup: subset_check(&set, &with_zero),
    })
}

/// Transversals of `alpha`'s kernel that are convex, for reporting.
pub fn convex_transversals(alpha: &PartialMap) -> Vec<Vec<u8>> {
    match alpha.kernel() {
        Ok(k) => all_transversals(&k)
            .iter()
            .map(|t| t.points())
            .filter(|p| is_interval(p))
            .collect(),
        Err(_) => Vec::new(),
    }
}
