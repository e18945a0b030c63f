//! Family sizes and derived counts against frozen values and an independent
//! all-pairs membership oracle.

use std::collections::BTreeMap;

use serde::Deserialize;

use chainsemi::regularity::{regular_witnesses, sreg};
use chainsemi::{ElementSet, FamilyTag};

#[derive(Deserialize)]
struct Golden {
    family_sizes: BTreeMap<String, Vec<usize>>,
    sreg_sizes: Vec<usize>,
    sreg_idempotents: Vec<usize>,
    sreg_height_one_idempotents: Vec<usize>,
    nonregular: BTreeMap<String, Vec<usize>>,
}

fn golden() -> Golden {
    serde_json::from_str(include_str!("golden/counts.json")).unwrap()
}

/// Images of every partial map on `[n]`, decoded by hand from base `n + 1`.
fn all_maps(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let base = n + 1;
    (0..base.pow(n as u32)).map(move |mut id| {
        (0..n)
            .map(|_| {
                let d = id % base;
                id /= base;
                d
            })
            .collect()
    })
}

fn pairs(v: &[usize]) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for x in 0..v.len() {
        for y in 0..v.len() {
            if v[x] != 0 && v[y] != 0 {
                out.push((x + 1, y + 1, v[x], v[y]));
            }
        }
    }
    out
}

fn oracle_member(family: &str, v: &[usize]) -> bool {
    let p = pairs(v);
    let contraction = p.iter().all(|&(x, y, a, b)| a.abs_diff(b) <= x.abs_diff(y));
    let preserving = p.iter().all(|&(x, y, a, b)| x > y || a <= b);
    let reversing = p.iter().all(|&(x, y, a, b)| x > y || a >= b);
    let full = v.iter().all(|&a| a != 0);
    match family {
        "p" => true,
        "cp" => contraction,
        "ocp" => contraction && preserving,
        "orcp" => contraction && (preserving || reversing),
        "ct" => contraction && full,
        "oct" => contraction && preserving && full,
        other => panic!("unknown family {other}"),
    }
}

#[test]
fn family_sizes_match_golden_and_oracle() {
    let g = golden();
    for (name, sizes) in &g.family_sizes {
        let tag: FamilyTag = name.parse().unwrap();
        for (i, &expected) in sizes.iter().enumerate() {
            let n = i + 1;
            // the oracle is quadratic per map; P_6 is covered by the formula
            if n <= 5 || name != "p" {
                let oracle = all_maps(n).filter(|v| oracle_member(name, v)).count();
                assert_eq!(oracle, expected, "oracle {name}_{n}");
            }
            let set = ElementSet::enumerate(tag, n as u8).unwrap();
            assert_eq!(set.len(), expected, "{name}_{n}");
        }
    }
    assert_eq!(g.family_sizes["p"][5], 7usize.pow(6));
}

#[test]
fn enumerated_ids_are_the_oracle_members() {
    for name in ["cp", "ocp", "orcp", "ct", "oct"] {
        let set = ElementSet::enumerate(name.parse().unwrap(), 4).unwrap();
        let ids: Vec<u64> = all_maps(4)
            .enumerate()
            .filter(|(_, v)| oracle_member(name, v))
            .map(|(id, _)| id as u64)
            .collect();
        assert_eq!(set.ids(), ids.as_slice(), "{name}_4");
    }
}

#[test]
fn strongly_regular_counts() {
    let g = golden();
    for n in 1..=5u8 {
        let i = n as usize - 1;
        let set = ElementSet::enumerate(FamilyTag::ORCP, n).unwrap();
        let strong = sreg(&set).unwrap();
        assert_eq!(strong.len(), g.sreg_sizes[i], "|SReg| at n = {n}");
        let idem: Vec<usize> = strong
            .into_iter()
            .filter(|&p| set.get(p).is_idempotent())
            .collect();
        assert_eq!(idem.len(), g.sreg_idempotents[i]);
        let h1 = idem.iter().filter(|&&p| set.get(p).height() == 1).count();
        assert_eq!(h1, g.sreg_height_one_idempotents[i]);
    }
}

#[test]
fn nonregular_counts() {
    for (name, counts) in golden().nonregular {
        for (i, &expected) in counts.iter().enumerate() {
            let n = i as u8 + 3;
            let set = ElementSet::enumerate(name.parse().unwrap(), n).unwrap();
            let k = regular_witnesses(&set)
                .iter()
                .filter(|w| w.is_none())
                .count();
            assert_eq!(k, expected, "{name}_{n}");
        }
    }
}
