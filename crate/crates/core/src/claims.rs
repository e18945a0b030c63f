//! The claim registry and verification harness.
//!
//! Every claim is one row of [`REGISTRY`]: a key, a one-line statement and a
//! check function. A check runs against one `(family, n)` target and returns
//! an [`Outcome`]. Errors are mapped onto statuses: budget errors become
//! `skipped_budget`, unmet preconditions become `hypothesis_not_met`, and
//! anything else is a failure.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::Hash;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::cache::Cache;
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::family::{verify_closure, ElementSet, FamilyTag};
use crate::green::{
    abundance_from_classes, jstar, least_star_ideals, star_classes, JStar, Method, Relation,
    RelationClasses, Side,
};
use crate::map::PartialMap;
use crate::regularity::{
    regular_char_orcp_with, regular_witnesses, sreg, verify_idempotent_form_with,
    verify_sreg_closure, IdempotentForm, ReversingBranch, SregClosureReport,
};
use crate::transversal::{all_transversals, is_interval, lemma_witness, LemmaQuery};

pub const SCHEMA: &str = "chainsemi/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    SkippedBudget,
    HypothesisNotMet,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::SkippedBudget => "skipped_budget",
            Status::HypothesisNotMet => "hypothesis_not_met",
        }
    }
}

/// Which route(s) a claim may use for the starred relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    Oracle,
    Characterization,
    #[default]
    Both,
}

impl std::str::FromStr for MethodChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "oracle" => Ok(MethodChoice::Oracle),
            "characterization" => Ok(MethodChoice::Characterization),
            "both" => Ok(MethodChoice::Both),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: Status,
    pub method: String,
    pub witness: Option<Vec<u64>>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn new(status: Status, method: &str) -> Self {
        Self {
            status,
            method: method.to_string(),
            witness: None,
            notes: Vec::new(),
        }
    }

    fn pass(method: &str) -> Self {
        Self::new(Status::Pass, method)
    }

    fn fail(method: &str, witness: Vec<u64>) -> Self {
        Self {
            witness: Some(witness),
            ..Self::new(Status::Fail, method)
        }
    }

    fn verdict(ok: bool, method: &str, witness: Vec<u64>) -> Self {
        if ok {
            Self::pass(method)
        } else {
            Self::fail(method, witness)
        }
    }

    fn with_witness(mut self, witness: Vec<u64>) -> Self {
        self.witness = Some(witness);
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// One registry row.
pub struct ClaimSpec {
    pub id: &'static str,
    pub statement: &'static str,
    check: fn(&Context, &Target) -> Result<Outcome>,
}

impl std::fmt::Debug for ClaimSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClaimSpec").field("id", &self.id).finish()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Target {
    pub family: FamilyTag,
    pub n: u8,
    pub method: MethodChoice,
}

pub static REGISTRY: &[ClaimSpec] = &[
    ClaimSpec {
        id: "THM2.1.i",
        statement: "L* classes are the classes of equal image",
        check: |c, t| star_agreement(c, t, Relation::Lstar),
    },
    ClaimSpec {
        id: "THM2.1.ii",
        statement: "R* classes are the classes of equal kernel",
        check: |c, t| star_agreement(c, t, Relation::Rstar),
    },
    ClaimSpec {
        id: "THM2.1.iii",
        statement: "H* classes are the classes of equal image and kernel",
        check: |c, t| star_agreement(c, t, Relation::Hstar),
    },
    ClaimSpec {
        id: "THM2.1.iv",
        statement: "D* classes are the classes of equal height",
        check: |c, t| star_agreement(c, t, Relation::Dstar),
    },
    ClaimSpec {
        id: "L2.2",
        statement: "the chain fixpoint J*(a) is the least *-ideal containing a",
        check: check_least_ideal,
    },
    ClaimSpec {
        id: "L2.3",
        statement: "every element of J*(a) has height at most that of a",
        check: check_jstar_height,
    },
    ClaimSpec { id: "C2.4", statement: "J* coincides with D*", check: check_jstar_is_dstar },
    ClaimSpec {
        id: "L2.5",
        statement: "every L* class contains an idempotent",
        check: check_left_abundance,
    },
    ClaimSpec {
        id: "L2.6",
        statement: "for n >= 4 some R* class has no idempotent",
        check: check_right_abundance_fails,
    },
    ClaimSpec {
        id: "R2.7",
        statement: "for n <= 3 every R* class contains an idempotent",
        check: check_right_abundance_small,
    },
    ClaimSpec {
        id: "L1.1",
        statement: "ordered blocks with a non-singleton interior block admit no relatively convex transversal; convex transversals are relatively convex",
        check: check_no_relatively_convex,
    },
    ClaimSpec {
        id: "L1.2",
        statement: "an ORCP element with a non-singleton interior block has no relatively convex transversal",
        check: check_no_relatively_convex_orcp,
    },
    ClaimSpec {
        id: "L1.3",
        statement: "for contractions, ordered blocks with singleton interior blocks admit an admissible transversal; convex transversals are admissible",
        check: check_admissible_exists,
    },
    ClaimSpec {
        id: "L1.4",
        statement: "a contraction maps every interval of its domain onto an interval",
        check: check_convex_images,
    },
    ClaimSpec {
        id: "L1.5",
        statement: "regularity in ORCP for height >= 3 is decided by the kernel and image shape",
        check: check_regularity_criterion,
    },
    ClaimSpec {
        id: "nonregular",
        statement: "for n >= 3 the semigroup has a non-regular element",
        check: check_nonregular,
    },
    ClaimSpec {
        id: "R3.1",
        statement: "a product of two regular elements need not be regular",
        check: check_regular_products,
    },
    ClaimSpec {
        id: "P3.2",
        statement: "the three idempotent conditions agree on strongly regular elements",
        check: check_hall,
    },
    ClaimSpec {
        id: "L3.3",
        statement: "strongly regular idempotents of height >= 2 have the consecutive-image normal form",
        check: check_idempotent_form,
    },
    ClaimSpec {
        id: "L3.4",
        statement: "products of strongly regular idempotents are strongly regular",
        check: check_idempotent_products,
    },
    ClaimSpec {
        id: "T3.5",
        statement: "strongly regular elements form a regular subsemigroup",
        check: check_sreg_subsemigroup,
    },
    ClaimSpec {
        id: "closure",
        statement: "the family is closed under composition",
        check: check_closure,
    },
    ClaimSpec {
        id: "containment",
        statement: "the family lies inside each parent family",
        check: check_containment,
    },
];

pub fn registry_ids() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|c| c.id)
}

pub fn lookup(id: &str) -> Option<&'static ClaimSpec> {
    REGISTRY.iter().find(|c| c.id.eq_ignore_ascii_case(id))
}

type Memo<K, V> = Mutex<HashMap<K, Arc<V>>>;

fn memo<K: Hash + Eq + Copy, V>(
    map: &Memo<K, V>,
    key: K,
    compute: impl FnOnce() -> Result<V>,
) -> Result<Arc<V>> {
    if let Some(v) = map.lock().expect("memo lock").get(&key) {
        return Ok(Arc::clone(v));
    }
    let v = Arc::new(compute()?);
    Ok(Arc::clone(
        map.lock().expect("memo lock").entry(key).or_insert(v),
    ))
}

/// Shared, memoized inputs for a verification run.
#[derive(Debug, Default)]
pub struct Context {
    budget: Budget,
    cache: Option<Cache>,
    sets: Memo<(FamilyTag, u8), ElementSet>,
    classes: Memo<(FamilyTag, u8, Relation, Method), RelationClasses>,
    jstar: Memo<(FamilyTag, u8), JStar>,
    regular: Memo<(FamilyTag, u8), Vec<Option<usize>>>,
    sreg: Memo<u8, SregClosureReport>,
}

impl Context {
    pub fn new(budget: Budget, cache: Option<Cache>) -> Self {
        Self {
            budget,
            cache,
            ..Default::default()
        }
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn set(&self, family: FamilyTag, n: u8) -> Result<Arc<ElementSet>> {
        memo(&self.sets, (family, n), || match &self.cache {
            Some(cache) => cache.load_or_enumerate(family, n, &self.budget),
            None => ElementSet::enumerate_within(family, n, self.budget.max_enumeration_n),
        })
    }

    pub fn classes(
        &self,
        family: FamilyTag,
        n: u8,
        relation: Relation,
        method: Method,
    ) -> Result<Arc<RelationClasses>> {
        if method == Method::Oracle {
            self.budget.check_oracle(n)?;
        }
        let set = self.set(family, n)?;
        memo(&self.classes, (family, n, relation, method), || {
            star_classes(&set, relation, method, &self.budget)
        })
    }

    fn jstar(&self, family: FamilyTag, n: u8) -> Result<Arc<JStar>> {
        self.budget.check_jstar(n)?;
        let set = self.set(family, n)?;
        memo(&self.jstar, (family, n), || jstar(&set, &self.budget))
    }

    /// Least inverse witness per position, from the Cayley table.
    pub fn regular(&self, family: FamilyTag, n: u8) -> Result<Arc<Vec<Option<usize>>>> {
        let set = self.set(family, n)?;
        self.budget.check_table(n, set.len())?;
        memo(&self.regular, (family, n), || Ok(regular_witnesses(&set)))
    }

    fn sreg_report(&self, n: u8) -> Result<Arc<SregClosureReport>> {
        memo(&self.sreg, n, || verify_sreg_closure(n, &self.budget))
    }
}

fn need(cond: bool, why: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::HypothesisNotMet(why()))
    }
}

fn need_contraction(t: &Target) -> Result<()> {
    need(t.family.is_contraction_family(), || {
        format!(
            "stated for the partial contraction families, not {}",
            t.family
        )
    })
}

fn need_orcp(t: &Target) -> Result<()> {
    need(t.family == FamilyTag::ORCP, || {
        format!("stated for orcp, not {}", t.family)
    })
}

fn ids_of(set: &ElementSet, positions: &[usize]) -> Vec<u64> {
    positions.iter().map(|&p| set.ids()[p]).collect()
}

/// First element whose class differs between two partitions, plus an element
/// in the symmetric difference of its two classes.
fn partition_mismatch(a: &[Vec<usize>], b: &[Vec<usize>], len: usize) -> Option<(usize, usize)> {
    let (ca, cb) = (
        crate::partition::class_of(a, len),
        crate::partition::class_of(b, len),
    );
    (0..len).find_map(|x| {
        let (ka, kb) = (&a[ca[x]], &b[cb[x]]);
        (ka != kb).then(|| {
            let other = ka
                .iter()
                .find(|y| kb.binary_search(y).is_err())
                .or_else(|| kb.iter().find(|y| ka.binary_search(y).is_err()))
                .copied()
                .expect("distinct classes through x differ somewhere");
            (x, other)
        })
    })
}

fn star_agreement(ctx: &Context, t: &Target, relation: Relation) -> Result<Outcome> {
    need_contraction(t)?;
    let set = ctx.set(t.family, t.n)?;
    let oracle = ctx.classes(t.family, t.n, relation, Method::Oracle)?;
    let chr = ctx.classes(t.family, t.n, relation, Method::Characterization)?;
    let out = match partition_mismatch(&oracle.classes, &chr.classes, set.len()) {
        None => Outcome::pass("both"),
        Some((x, y)) => Outcome::fail("both", ids_of(&set, &[x, y]))
            .note("oracle and characterization disagree on this pair"),
    };
    Ok(out.note(format!(
        "{} classes over {} elements",
        oracle.classes.len(),
        set.len()
    )))
}

fn check_least_ideal(ctx: &Context, t: &Target) -> Result<Outcome> {
    let set = ctx.set(t.family, t.n)?;
    let j = ctx.jstar(t.family, t.n)?;
    let least = least_star_ideals(&set, ctx.budget())?;
    let bad = (0..set.len()).find(|&a| j.ideals[a] != least[a]);
    Ok(Outcome::verdict(
        bad.is_none(),
        "oracle",
        bad.map(|a| ids_of(&set, &[a])).unwrap_or_default(),
    ))
}

fn check_jstar_height(ctx: &Context, t: &Target) -> Result<Outcome> {
    need_contraction(t)?;
    let set = ctx.set(t.family, t.n)?;
    let j = ctx.jstar(t.family, t.n)?;
    let h = |p: usize| set.get(p).height();
    let bad =
        (0..set.len()).find_map(|a| j.ideals[a].iter().find(|&&c| h(c) > h(a)).map(|&c| (a, c)));
    Ok(Outcome::verdict(
        bad.is_none(),
        "oracle",
        bad.map(|(a, c)| ids_of(&set, &[a, c])).unwrap_or_default(),
    ))
}

fn check_jstar_is_dstar(ctx: &Context, t: &Target) -> Result<Outcome> {
    need_contraction(t)?;
    let set = ctx.set(t.family, t.n)?;
    let j = ctx.jstar(t.family, t.n)?;
    let d = ctx.classes(t.family, t.n, Relation::Dstar, Method::Oracle)?;
    let out = match partition_mismatch(&j.classes.classes, &d.classes, set.len()) {
        None => Outcome::pass("oracle"),
        Some((x, y)) => Outcome::fail("oracle", ids_of(&set, &[x, y])),
    };
    Ok(out.note(format!("{} J* classes", j.classes.classes.len())))
}

/// Starred classes for an abundance check, honoring the method choice. With
/// `Both`, the oracle is used when in budget and otherwise the characterization.
fn abundance_classes(
    ctx: &Context,
    t: &Target,
    relation: Relation,
) -> Result<(Arc<RelationClasses>, Vec<String>)> {
    let mut notes = Vec::new();
    let classes = match t.method {
        MethodChoice::Oracle => ctx.classes(t.family, t.n, relation, Method::Oracle)?,
        MethodChoice::Characterization => {
            ctx.classes(t.family, t.n, relation, Method::Characterization)?
        }
        MethodChoice::Both => match ctx.classes(t.family, t.n, relation, Method::Oracle) {
            Ok(c) => c,
            Err(Error::BudgetExceeded { .. }) => {
                notes.push("oracle over budget; characterization used".to_string());
                ctx.classes(t.family, t.n, relation, Method::Characterization)?
            }
            Err(e) => return Err(e),
        },
    };
    Ok((classes, notes))
}

fn abundance_outcome(
    ctx: &Context,
    t: &Target,
    side: Side,
) -> Result<(Outcome, Option<Vec<u64>>, usize)> {
    let relation = if side == Side::Left {
        Relation::Lstar
    } else {
        Relation::Rstar
    };
    let set = ctx.set(t.family, t.n)?;
    let (classes, notes) = abundance_classes(ctx, t, relation)?;
    let elements = set.elements();
    let verdict = abundance_from_classes(side, &classes.classes, |i| elements[i].is_idempotent());
    let mut out = Outcome::new(Status::Pass, &classes.method.to_string());
    out.notes = notes;
    out.notes.push(format!(
        "{} of {} classes without an idempotent",
        verdict.failing_classes,
        classes.classes.len()
    ));
    let witness = verdict.witness.map(|w| ids_of(&set, &w));
    Ok((out, witness, verdict.failing_classes))
}

fn check_left_abundance(ctx: &Context, t: &Target) -> Result<Outcome> {
    need_contraction(t)?;
    let (mut out, witness, failing) = abundance_outcome(ctx, t, Side::Left)?;
    if failing > 0 {
        out.status = Status::Fail;
        out.witness = witness;
    }
    Ok(out)
}

/// The idempotent-free `R*`-class at n = 4, restricted to `family`.
pub fn expected_rstar_witness(family: FamilyTag) -> Vec<u64> {
    let mut ids: Vec<u64> = [[1, 2, 2, 3], [3, 2, 2, 1], [2, 3, 3, 4], [4, 3, 3, 2]]
        .iter()
        .map(|im| PartialMap::from_images(im).expect("valid images"))
        .filter(|a| family.member(a))
        .map(|a| a.canonical_id())
        .collect();
    ids.sort_unstable();
    ids
}

fn check_right_abundance_fails(ctx: &Context, t: &Target) -> Result<Outcome> {
    need_contraction(t)?;
    need(t.n >= 4, || format!("needs n >= 4, got {}", t.n))?;
    let (mut out, witness, failing) = abundance_outcome(ctx, t, Side::Right)?;
    let Some(witness) = witness else {
        out.status = Status::Fail;
        out.witness = Some(Vec::new());
        return Ok(out.note("right abundance holds"));
    };
    if t.n == 4 {
        let expected = expected_rstar_witness(t.family);
        if witness != expected || failing != 1 {
            out.status = Status::Fail;
            out = out.note(format!("expected the class {expected:?}"));
        } else if expected.len() < 4 {
            out = out.note("only the order-preserving members of the four-element class lie here");
        }
    }
    Ok(out.with_witness(witness))
}

fn check_right_abundance_small(ctx: &Context, t: &Target) -> Result<Outcome> {
    need_contraction(t)?;
    need(t.n <= 3, || format!("needs n <= 3, got {}", t.n))?;
    let (mut out, witness, failing) = abundance_outcome(ctx, t, Side::Right)?;
    if failing > 0 {
        out.status = Status::Fail;
        out.witness = witness;
    }
    Ok(out)
}

/// Kernels of every non-empty element, paired with positions.
fn kernels(set: &ElementSet) -> Vec<(usize, crate::kernel::KernelPartition)> {
    set.elements()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| a.kernel().ok().map(|k| (i, k)))
        .collect()
}

#[derive(Default)]
struct LemmaTally {
    instances: usize,
    failure: Option<usize>,
}

fn tally(
    set: &ElementSet,
    filter: impl Fn(&PartialMap) -> bool + Sync,
    admissible: bool,
) -> Result<LemmaTally> {
    let query = |k| {
        if admissible {
            LemmaQuery::AdmissibleExistence(k)
        } else {
            LemmaQuery::RelativelyConvexNonexistence(k)
        }
    };
    let results: Vec<(usize, Option<bool>)> = kernels(set)
        .par_iter()
        .filter(|(i, _)| filter(set.get(*i)))
        .map(|(i, k)| match lemma_witness(query(k)) {
            Ok(r) => Ok((*i, Some(r.holds))),
            Err(Error::HypothesisNotMet(_)) => Ok((*i, None)),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut t = LemmaTally::default();
    for (i, holds) in results {
        match holds {
            Some(true) => t.instances += 1,
            Some(false) => {
                t.instances += 1;
                t.failure.get_or_insert(i);
            }
            None => {}
        }
    }
    Ok(t)
}

/// Scans every transversal: the first element whose convex transversal lacks
/// `implied`, and the first element with a transversal having `implied` but
/// not convexity.
fn convex_implication(
    set: &ElementSet,
    filter: impl Fn(&PartialMap) -> bool + Sync,
    implied: impl Fn(&crate::transversal::Transversal<'_>) -> bool + Sync,
) -> (Option<usize>, Option<(usize, Vec<u8>)>) {
    let ks: Vec<_> = kernels(set)
        .into_iter()
        .filter(|(i, _)| filter(set.get(*i)))
        .collect();
    let broken = ks.par_iter().find_map_first(|(i, k)| {
        all_transversals(k)
            .iter()
            .any(|t| t.is_convex() && !implied(t))
            .then_some(*i)
    });
    let converse = ks.par_iter().find_map_first(|(i, k)| {
        all_transversals(k)
            .iter()
            .find(|t| !t.is_convex() && implied(t))
            .map(|t| (*i, t.points()))
    });
    (broken, converse)
}

/// Result of [`convex_implication`] for one transversal property.
struct Implication<'a> {
    broken: Option<usize>,
    converse: Option<(usize, Vec<u8>)>,
    what: &'a str,
}

fn lemma_outcome(
    set: &ElementSet,
    lemma: LemmaTally,
    implication: Option<Implication<'_>>,
) -> Outcome {
    let mut notes = vec![format!("{} elements meet the hypothesis", lemma.instances)];
    let mut failure = lemma.failure;
    if let Some(Implication {
        broken,
        converse,
        what,
    }) = implication
    {
        if let Some(b) = broken {
            notes.push(format!("a convex transversal is not {what}"));
            failure.get_or_insert(b);
        }
        match converse {
            Some((i, pts)) => {
                notes.push(format!("{what} but not convex: {pts:?} for {}", set.get(i)))
            }
            None => notes.push(format!("no {what} non-convex transversal")),
        }
    }
    let mut out = match failure {
        Some(i) => Outcome::fail("exhaustive", ids_of(set, &[i])),
        None if lemma.instances == 0 => Outcome::new(Status::HypothesisNotMet, "exhaustive"),
        None => Outcome::pass("exhaustive"),
    };
    out.notes = notes;
    out
}

fn check_no_relatively_convex(ctx: &Context, t: &Target) -> Result<Outcome> {
    let set = ctx.set(t.family, t.n)?;
    let lemma = tally(&set, |_| true, false)?;
    let (broken, converse) = convex_implication(&set, |_| true, |t| t.is_relatively_convex());
    Ok(lemma_outcome(
        &set,
        lemma,
        Some(Implication {
            broken,
            converse,
            what: "relatively convex",
        }),
    ))
}

fn check_no_relatively_convex_orcp(ctx: &Context, t: &Target) -> Result<Outcome> {
    let set = ctx.set(t.family, t.n)?;
    let lemma = tally(&set, |a| FamilyTag::ORCP.member(a), false)?;
    Ok(lemma_outcome(&set, lemma, None))
}

fn check_admissible_exists(ctx: &Context, t: &Target) -> Result<Outcome> {
    let set = ctx.set(t.family, t.n)?;
    // admissibility compares domain gaps with image gaps, so only contractions qualify
    let lemma = tally(&set, PartialMap::is_contraction, true)?;
    let (broken, converse) =
        convex_implication(&set, PartialMap::is_contraction, |t| t.is_admissible());
    Ok(lemma_outcome(
        &set,
        lemma,
        Some(Implication {
            broken,
            converse,
            what: "admissible",
        }),
    ))
}

fn check_convex_images(ctx: &Context, t: &Target) -> Result<Outcome> {
    let set = ctx.set(t.family, t.n)?;
    let results: Vec<(usize, usize, bool)> = set
        .elements()
        .par_iter()
        .enumerate()
        .filter(|(_, a)| a.is_contraction())
        .map(|(i, a)| {
            let dom = a.domain();
            let mut checked = 0;
            for lo in 0..dom.len() {
                for hi in lo..dom.len() {
                    let sub = &dom[lo..=hi];
                    if !is_interval(sub) {
                        break;
                    }
                    checked += 1;
                    let q = LemmaQuery::ConvexImage {
                        map: a,
                        subset: sub,
                    };
                    if !lemma_witness(q)?.holds {
                        return Ok((i, checked, false));
                    }
                }
            }
            Ok((i, checked, true))
        })
        .collect::<Result<_>>()?;
    let subsets: usize = results.iter().map(|r| r.1).sum();
    let failure = results.iter().find(|r| !r.2).map(|r| r.0);
    let mut out = Outcome::verdict(
        failure.is_none(),
        "exhaustive",
        failure.map(|i| ids_of(&set, &[i])).unwrap_or_default(),
    );
    if subsets == 0 {
        out.status = Status::HypothesisNotMet;
    }
    Ok(out.note(format!("{subsets} interval subsets checked")))
}

fn check_regularity_criterion(ctx: &Context, t: &Target) -> Result<Outcome> {
    need_orcp(t)?;
    let set = ctx.set(t.family, t.n)?;
    let regular = ctx.regular(t.family, t.n)?;
    let tall: Vec<usize> = (0..set.len())
        .filter(|&i| set.get(i).height() >= 3)
        .collect();
    need(!tall.is_empty(), || "no element of height >= 3".to_string())?;
    let mismatches = |branch| -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for &i in &tall {
            if regular_char_orcp_with(set.get(i), branch)? != regular[i].is_some() {
                out.push(i);
            }
        }
        Ok(out)
    };
    let reflection = mismatches(ReversingBranch::Reflection)?;
    let shifted = mismatches(ReversingBranch::IndexShift)?;
    let mut out = Outcome::verdict(
        reflection.is_empty(),
        "exhaustive",
        reflection
            .first()
            .map(|&i| ids_of(&set, &[i]))
            .unwrap_or_default(),
    )
    .note(format!("{} elements of height >= 3", tall.len()));
    out = match shifted.first() {
        Some(&i) => out.note(format!(
            "index-shift reading of the reversing case misses {} elements, first {}",
            shifted.len(),
            set.get(i)
        )),
        None => out.note("index-shift reading of the reversing case agrees"),
    };
    Ok(out)
}

fn check_nonregular(ctx: &Context, t: &Target) -> Result<Outcome> {
    need_contraction(t)?;
    need(t.n >= 3, || format!("needs n >= 3, got {}", t.n))?;
    let set = ctx.set(t.family, t.n)?;
    let regular = ctx.regular(t.family, t.n)?;
    let nonregular: Vec<usize> = (0..set.len()).filter(|&i| regular[i].is_none()).collect();
    let out = match nonregular.first() {
        Some(&i) => Outcome::pass("exhaustive")
            .with_witness(ids_of(&set, &[i]))
            .note(format!(
                "{} non-regular elements, least {}",
                nonregular.len(),
                set.get(i)
            )),
        None => Outcome::fail("exhaustive", Vec::new()).note("every element is regular"),
    };
    Ok(out)
}

/// `α = {1->1, 3->3}` and `β = {1->1, 2->2, 3->2}` on `[3]`.
pub fn expected_regular_pair() -> (PartialMap, PartialMap) {
    (
        PartialMap::from_images(&[1, 0, 3]).expect("valid images"),
        PartialMap::from_images(&[1, 2, 2]).expect("valid images"),
    )
}

fn check_regular_products(ctx: &Context, t: &Target) -> Result<Outcome> {
    need_contraction(t)?;
    need(t.n >= 3, || format!("needs n >= 3, got {}", t.n))?;
    let set = ctx.set(t.family, t.n)?;
    let regular = ctx.regular(t.family, t.n)?;
    let table = set.table();
    let pairs: Vec<(usize, usize)> = (0..set.len())
        .into_par_iter()
        .filter(|&a| regular[a].is_some())
        .flat_map_iter(|a| {
            let regular = &regular;
            (0..set.len()).filter_map(move |b| {
                let ab = table.mul(a, b)?;
                (regular[b].is_some() && regular[ab].is_none()).then_some((a, b))
            })
        })
        .collect();
    let triple = |(a, b): (usize, usize)| ids_of(&set, &[a, b, table.mul_closed(a, b)]);
    let Some(&first) = pairs.first() else {
        return Ok(
            Outcome::fail("exhaustive", Vec::new()).note("all products of regulars are regular")
        );
    };
    let mut out = Outcome::pass("exhaustive").note(format!("{} pairs", pairs.len()));
    let mut witness = triple(first);
    if t.n == 3 {
        let (alpha, beta) = expected_regular_pair();
        if let (Some(a), Some(b)) = (set.position(&alpha), set.position(&beta)) {
            if pairs.contains(&(a, b)) {
                witness = triple((a, b));
                out = out.note(format!(
                    "{alpha} . {beta} = {} is not regular",
                    alpha.compose_unchecked(&beta)
                ));
            } else {
                out.status = Status::Fail;
                out = out.note(format!("({alpha}, {beta}) is not among the pairs"));
            }
        }
    }
    Ok(out.with_witness(witness))
}

fn sreg_failure_witness(r: &SregClosureReport) -> Vec<u64> {
    let s = &r.subsemigroup;
    s.closure_failures
        .first()
        .map(|f| vec![f.left, f.right, f.product])
        .or_else(|| s.nonregular.first().map(|&x| vec![x]))
        .unwrap_or_default()
}

fn check_hall(ctx: &Context, t: &Target) -> Result<Outcome> {
    need_orcp(t)?;
    let r = ctx.sreg_report(t.n)?;
    let h = &r.hall;
    Ok(Outcome::verdict(h.agree(), "exhaustive", sreg_failure_witness(&r)).note(format!(
        "idempotent products regular: {}; regular elements closed and regular: {}; idempotent-generated ({} elements) regular: {}",
        h.idempotent_products_regular,
        h.regular_elements_form_regular_subsemigroup,
        h.idempotent_generated_size,
        h.idempotent_generated_is_regular
    )))
}

fn check_idempotent_form(ctx: &Context, t: &Target) -> Result<Outcome> {
    need_orcp(t)?;
    let set = ctx.set(t.family, t.n)?;
    ctx.regular(t.family, t.n)?;
    let idempotents: Vec<usize> = sreg(&set)?
        .into_iter()
        .filter(|&i| set.get(i).is_idempotent())
        .collect();
    let (tall, short): (Vec<usize>, Vec<usize>) =
        idempotents.iter().partition(|&&i| set.get(i).height() >= 2);
    need(!tall.is_empty(), || {
        "no strongly regular idempotent of height >= 2".to_string()
    })?;
    let mut failure = None;
    let mut below = 0;
    for &i in &tall {
        let e = set.get(i);
        if !verify_idempotent_form_with(e, IdempotentForm::EndpointsInImage)? {
            failure.get_or_insert(i);
        }
        if verify_idempotent_form_with(e, IdempotentForm::EndpointsBelowImage)? {
            below += 1;
        }
    }
    Ok(Outcome::verdict(
        failure.is_none(),
        "exhaustive",
        failure.map(|i| ids_of(&set, &[i])).unwrap_or_default(),
    )
    .note(format!("{} idempotents of height >= 2 checked", tall.len()))
    .note(format!("{below} satisfy the max A_1 = a reading"))
    .note(format!("{} height-1 idempotents not covered", short.len())))
}

fn check_idempotent_products(ctx: &Context, t: &Target) -> Result<Outcome> {
    need_orcp(t)?;
    let r = ctx.sreg_report(t.n)?;
    let p = &r.idempotent_products;
    let ok = p.failures.is_empty() && p.zero_products == p.zero_with_disjoint_fixpoints;
    let witness = p
        .failures
        .first()
        .map(|f| vec![f.left, f.right, f.product])
        .unwrap_or_default();
    Ok(Outcome::verdict(ok, "exhaustive", witness).note(format!(
        "{} pairs; {} empty products, {} from disjoint fixed points",
        p.pairs, p.zero_products, p.zero_with_disjoint_fixpoints
    )))
}

fn check_sreg_subsemigroup(ctx: &Context, t: &Target) -> Result<Outcome> {
    need_orcp(t)?;
    let r = ctx.sreg_report(t.n)?;
    let s = &r.subsemigroup;
    Ok(Outcome::verdict(
        s.closed && s.regular,
        "exhaustive",
        sreg_failure_witness(&r),
    )
    .note(format!(
        "{} strongly regular elements, empty map adjoined",
        r.sreg_size
    )))
}

fn check_closure(ctx: &Context, t: &Target) -> Result<Outcome> {
    let set = ctx.set(t.family, t.n)?;
    ctx.budget().check_pairs(t.n, set.len())?;
    let v = verify_closure(t.family, t.n, ctx.budget().max_enumeration_n)?;
    let witness = v
        .counterexample
        .map(|(a, b)| {
            vec![
                a.canonical_id(),
                b.canonical_id(),
                a.compose_unchecked(&b).canonical_id(),
            ]
        })
        .unwrap_or_default();
    Ok(Outcome::verdict(v.closed, "exhaustive", witness))
}

fn ancestors(family: FamilyTag) -> Vec<FamilyTag> {
    let mut out: Vec<FamilyTag> = Vec::new();
    let mut stack = family.parents().to_vec();
    while let Some(f) = stack.pop() {
        if !out.contains(&f) {
            out.push(f);
            stack.extend_from_slice(f.parents());
        }
    }
    out.sort();
    out
}

fn check_containment(ctx: &Context, t: &Target) -> Result<Outcome> {
    let up = ancestors(t.family);
    need(!up.is_empty(), || {
        format!("{} has no parent family", t.family)
    })?;
    let set = ctx.set(t.family, t.n)?;
    let bad = set
        .elements()
        .iter()
        .position(|a| !up.iter().all(|f| f.member(a)));
    let names: Vec<&str> = up.iter().map(|f| f.as_str()).collect();
    Ok(Outcome::verdict(
        bad.is_none(),
        "exhaustive",
        bad.map(|i| ids_of(&set, &[i])).unwrap_or_default(),
    )
    .note(format!("inside {}", names.join(", "))))
}

/// Runs one claim, mapping errors onto statuses.
pub fn run_claim(ctx: &Context, spec: &ClaimSpec, target: &Target) -> Outcome {
    match (spec.check)(ctx, target) {
        Ok(o) => o,
        Err(Error::BudgetExceeded { what, n, max }) => Outcome::new(Status::SkippedBudget, "none")
            .note(format!("{what} budget is n <= {max}, requested {n}")),
        Err(Error::HypothesisNotMet(why)) => {
            Outcome::new(Status::HypothesisNotMet, "none").note(why)
        }
        Err(Error::FamilyUnsupported(f)) => {
            Outcome::new(Status::HypothesisNotMet, "none").note(format!("not defined for {f}"))
        }
        Err(e) => Outcome::fail("none", Vec::new()).note(format!("error: {e}")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimResult {
    pub claim_id: &'static str,
    pub statement: &'static str,
    pub family: FamilyTag,
    pub n: u8,
    pub method: String,
    pub status: Status,
    pub witness: Option<Vec<u64>>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped_budget: usize,
    pub hypothesis_not_met: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub summary: Summary,
    pub claims: Vec<ClaimResult>,
}

impl VerificationReport {
    pub fn any_failed(&self) -> bool {
        self.summary.fail > 0
    }

    /// Fixed-width table for terminals. Timings always appear here.
    pub fn table(&self, timings: &[u64]) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<11} {:<6} {:>2}  {:<16} {:<18} {:>8}  WITNESS",
            "CLAIM", "FAMILY", "N", "METHOD", "STATUS", "MS"
        );
        for (i, c) in self.claims.iter().enumerate() {
            let witness = match &c.witness {
                Some(w) => format!("{w:?}"),
                None => "-".to_string(),
            };
            let ms = timings
                .get(i)
                .or(c.runtime_ms.as_ref())
                .copied()
                .unwrap_or(0);
            let _ = writeln!(
                s,
                "{:<11} {:<6} {:>2}  {:<16} {:<18} {:>8}  {}",
                c.claim_id,
                c.family.as_str(),
                c.n,
                c.method,
                c.status.as_str(),
                ms,
                witness
            );
        }
        let m = &self.summary;
        let _ = writeln!(
            s,
            "pass {}, fail {}, skipped_budget {}, hypothesis_not_met {}",
            m.pass, m.fail, m.skipped_budget, m.hypothesis_not_met
        );
        s
    }
}

/// What to verify.
#[derive(Debug, Clone)]
pub struct VerifyRequest {
    pub claims: Vec<&'static ClaimSpec>,
    pub families: Vec<FamilyTag>,
    pub ns: Vec<u8>,
    pub method: MethodChoice,
    pub timings: bool,
}

/// Runs every `(claim, family, n)` combination in parallel and assembles the
/// report in registry order. Returns the report and per-row runtimes.
pub fn verify(ctx: &Context, req: &VerifyRequest) -> (VerificationReport, Vec<u64>) {
    let mut claims: Vec<&ClaimSpec> = req.claims.clone();
    claims.sort_by_key(|c| REGISTRY.iter().position(|r| r.id == c.id));
    claims.dedup_by_key(|c| c.id);
    let mut families = req.families.clone();
    families.sort();
    families.dedup();
    let mut ns = req.ns.clone();
    ns.sort_unstable();
    ns.dedup();

    // enumerate up front so parallel claims share one copy
    for &f in &families {
        for &n in &ns {
            let _ = ctx.set(f, n);
        }
    }

    let mut jobs: Vec<(&ClaimSpec, Target)> = Vec::new();
    for &c in &claims {
        for &family in &families {
            for &n in &ns {
                jobs.push((
                    c,
                    Target {
                        family,
                        n,
                        method: req.method,
                    },
                ));
            }
        }
    }
    let rows: Vec<(ClaimResult, u64)> = jobs
        .par_iter()
        .map(|(spec, target)| {
            let start = Instant::now();
            let o = run_claim(ctx, spec, target);
            let ms = start.elapsed().as_millis() as u64;
            let row = ClaimResult {
                claim_id: spec.id,
                statement: spec.statement,
                family: target.family,
                n: target.n,
                method: o.method,
                status: o.status,
                witness: o.witness,
                notes: o.notes,
                runtime_ms: req.timings.then_some(ms),
            };
            (row, ms)
        })
        .collect();

    let mut summary = Summary::default();
    for (r, _) in &rows {
        match r.status {
            Status::Pass => summary.pass += 1,
            Status::Fail => summary.fail += 1,
            Status::SkippedBudget => summary.skipped_budget += 1,
            Status::HypothesisNotMet => summary.hypothesis_not_met += 1,
        }
    }
    let (claims, times): (Vec<ClaimResult>, Vec<u64>) = rows.into_iter().unzip();
    (
        VerificationReport {
            schema: SCHEMA,
            summary,
            claims,
        },
        times,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(id: &str, family: FamilyTag, n: u8) -> Outcome {
        let ctx = Context::new(Budget::default(), None);
        let target = Target {
            family,
            n,
            method: MethodChoice::Both,
        };
        run_claim(&ctx, lookup(id).unwrap(), &target)
    }

    #[test]
    fn registry_keys_are_unique() {
        let mut ids: Vec<&str> = registry_ids().collect();
        let len = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), len);
        assert_eq!(len, 23);
    }

    #[test]
    fn right_abundance_witness_at_four() {
        let o = run("L2.6", FamilyTag::CP, 4);
        assert_eq!(o.status, Status::Pass, "{o:?}");
        assert_eq!(o.witness.unwrap().len(), 4);
        let o = run("L2.6", FamilyTag::OCP, 4);
        assert_eq!(o.status, Status::Pass, "{o:?}");
        assert_eq!(o.witness.unwrap(), expected_rstar_witness(FamilyTag::OCP));
    }

    #[test]
    fn statuses_for_out_of_scope_targets() {
        assert_eq!(
            run("L2.6", FamilyTag::CP, 3).status,
            Status::HypothesisNotMet
        );
        assert_eq!(
            run("THM2.1.i", FamilyTag::P, 2).status,
            Status::HypothesisNotMet
        );
        assert_eq!(
            run("THM2.1.i", FamilyTag::CP, 5).status,
            Status::SkippedBudget
        );
        assert_eq!(run("C2.4", FamilyTag::CP, 4).status, Status::SkippedBudget);
    }

    #[test]
    fn regular_pair_at_three() {
        let o = run("R3.1", FamilyTag::ORCP, 3);
        assert_eq!(o.status, Status::Pass, "{o:?}");
        let (a, b) = expected_regular_pair();
        let ab = PartialMap::new(3, &[(1, 1), (3, 2)]).unwrap();
        assert_eq!(a.compose(&b).unwrap(), ab);
        assert_eq!(
            o.witness.unwrap(),
            vec![a.canonical_id(), b.canonical_id(), ab.canonical_id()]
        );
    }

    #[test]
    fn small_sweep_has_no_failures() {
        let ctx = Context::new(Budget::default(), None);
        let req = VerifyRequest {
            claims: REGISTRY.iter().collect(),
            families: FamilyTag::ALL.to_vec(),
            ns: vec![1, 2, 3],
            method: MethodChoice::Both,
            timings: false,
        };
        let (report, times) = verify(&ctx, &req);
        assert_eq!(report.claims.len(), 23 * 6 * 3);
        assert_eq!(times.len(), report.claims.len());
        let failed: Vec<_> = report
            .claims
            .iter()
            .filter(|c| c.status == Status::Fail)
            .collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(report.claims.iter().all(|c| c.runtime_ms.is_none()));
    }
}
