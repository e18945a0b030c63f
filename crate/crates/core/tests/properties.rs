use proptest::prelude::*;

use chainsemi::regularity::{is_regular, regular_char_orcp};
use chainsemi::transversal::{is_interval, lemma_witness, LemmaQuery};
use chainsemi::{ElementSet, FamilyTag, PartialMap};

fn map_on(n: u8) -> impl Strategy<Value = PartialMap> {
    prop::collection::vec(0..=n, n as usize).prop_map(|v| PartialMap::from_images(&v).unwrap())
}

fn map() -> impl Strategy<Value = PartialMap> {
    (1u8..=7).prop_flat_map(map_on)
}

fn triple() -> impl Strategy<Value = (PartialMap, PartialMap, PartialMap)> {
    (1u8..=7).prop_flat_map(|n| (map_on(n), map_on(n), map_on(n)))
}

/// A member of `family` on `[n]`, found by rejection.
fn member(family: FamilyTag) -> impl Strategy<Value = PartialMap> {
    map().prop_filter("not a member", move |a| family.member(a))
}

proptest! {
    #[test]
    fn composition_is_associative((a, b, c) in triple()) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn families_are_closed((a, b, _) in triple()) {
        let ab = a.compose(&b).unwrap();
        for f in FamilyTag::ALL {
            if f.member(&a) && f.member(&b) {
                prop_assert!(f.member(&ab), "{} not closed: {} . {} = {}", f, a, b, ab);
            }
        }
    }

    #[test]
    fn families_sit_inside_parents(a in map()) {
        for f in FamilyTag::ALL {
            if f.member(&a) {
                for p in f.parents() {
                    prop_assert!(p.member(&a));
                }
            }
        }
    }

    #[test]
    fn idempotent_iff_identity_on_image(a in map()) {
        prop_assert_eq!(a.is_idempotent(), a.is_idempotent_via_fixpoints());
    }

    #[test]
    fn isometries_are_contractions(a in map()) {
        if a.is_isometry() {
            prop_assert!(a.is_contraction());
        }
    }

    #[test]
    fn canonical_id_round_trips(a in map()) {
        prop_assert_eq!(PartialMap::decode(a.n(), a.canonical_id()).unwrap(), a);
    }

    #[test]
    fn kernel_round_trips(a in map()) {
        match a.kernel() {
            Ok(k) => {
                prop_assert_eq!(k.height(), a.height());
                prop_assert_eq!(k.to_map(), a);
            }
            Err(_) => prop_assert!(a.is_empty()),
        }
    }

    #[test]
    fn contractions_send_intervals_to_intervals(a in member(FamilyTag::CP)) {
        let dom = a.domain();
        for lo in 0..dom.len() {
            for hi in lo..dom.len() {
                if !is_interval(&dom[lo..=hi]) {
                    break;
                }
                let r = lemma_witness(LemmaQuery::ConvexImage { map: &a, subset: &dom[lo..=hi] }).unwrap();
                prop_assert!(r.holds);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regularity_criterion_matches_search(
        a in (3u8..=5).prop_flat_map(map_on)
            .prop_filter("orcp, height >= 3", |a| FamilyTag::ORCP.member(a) && a.height() >= 3)
    ) {
        let set = ElementSet::enumerate(FamilyTag::ORCP, a.n()).unwrap();
        prop_assert_eq!(regular_char_orcp(&a).unwrap(), is_regular(&a, &set).unwrap().regular);
    }
}
