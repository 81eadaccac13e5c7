mod common;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{leibniz_det, leibniz_minors, permutations, random_matrix};
use signsym::classes::{is_member, verify_completion};
use signsym::digraphs::{bucket_sizes, canonical_form, enumerate_patterns, LoopMode};
use signsym::exact::rat;
use signsym::format::parse_partial;
use signsym::{ExactMatrix, MatrixClass, Pattern};

/// Burnside count of arc sets with `q` arcs up to relabelling: the average
/// over all permutations of the number of fixed arc sets of size `q`.
fn burnside_buckets(n: usize) -> Vec<u64> {
    let max_q = n * (n - 1);
    let perms = permutations(n);
    let mut total = vec![0u64; max_q + 1];
    for perm in &perms {
        let mut seen = vec![vec![false; n]; n];
        let mut fixed = vec![0u64; max_q + 1];
        fixed[0] = 1;
        for i in 0..n {
            for j in 0..n {
                if i == j || seen[i][j] {
                    continue;
                }
                let mut len = 0;
                let (mut a, mut b) = (i, j);
                while !seen[a][b] {
                    seen[a][b] = true;
                    len += 1;
                    a = perm[a];
                    b = perm[b];
                }
                for q in (len..=max_q).rev() {
                    fixed[q] += fixed[q - len];
                }
            }
        }
        for q in 0..=max_q {
            total[q] += fixed[q];
        }
    }
    let group = perms.len() as u64;
    total
        .into_iter()
        .map(|t| {
            assert_eq!(t % group, 0);
            t / group
        })
        .collect()
}

#[test]
fn bucket_sizes_match_burnside_counts() {
    for n in 1..=4 {
        let expected: Vec<usize> = burnside_buckets(n).into_iter().map(|v| v as usize).collect();
        for mode in [LoopMode::AllLoops, LoopMode::NoLoops] {
            let pats = enumerate_patterns(n, mode).unwrap();
            assert_eq!(bucket_sizes(&pats), expected, "order {n} {mode:?}");
        }
    }
}

#[test]
fn burnside_totals_match_known_values() {
    assert_eq!(burnside_buckets(3), vec![1, 1, 4, 4, 4, 1, 1]);
    assert_eq!(
        burnside_buckets(4),
        vec![1, 1, 5, 13, 27, 38, 48, 38, 27, 13, 5, 1, 1]
    );
    assert_eq!(burnside_buckets(4).iter().sum::<u64>(), 218);
}

fn brute_force_orbit_keys(n: usize) -> BTreeSet<u64> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let perms = permutations(n);
    let mut keys = BTreeSet::new();
    for mask in 0u64..1 << pairs.len() {
        let arcs: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &a)| a)
            .collect();
        let smallest = perms
            .iter()
            .map(|perm| {
                let mut image = 0u64;
                for &(i, j) in &arcs {
                    let k = pairs.iter().position(|&p| p == (perm[i], perm[j])).unwrap();
                    image |= 1 << k;
                }
                image
            })
            .min()
            .unwrap();
        keys.insert(smallest);
    }
    keys
}

#[test]
fn enumeration_matches_brute_force_orbits() {
    for n in 1..=3 {
        let orbits = brute_force_orbit_keys(n);
        let pats = enumerate_patterns(n, LoopMode::AllLoops).unwrap();
        assert_eq!(pats.len(), orbits.len());
        let codes: BTreeSet<_> = pats.iter().map(canonical_form).collect();
        assert_eq!(codes.len(), pats.len());
    }
}

#[test]
fn canonical_form_separates_exactly_the_orbits_of_order_three() {
    let perms = permutations(3);
    let pairs: Vec<(usize, usize)> = (0..3)
        .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let make = |mask: u32| {
        let arcs = pairs
            .iter()
            .enumerate()
            .filter(move |(k, _)| mask >> k & 1 == 1)
            .map(|(_, &a)| a);
        Pattern::new(3, 0..3, arcs).unwrap()
    };
    for a in 0u32..64 {
        for b in 0u32..64 {
            let (ga, gb) = (make(a), make(b));
            let iso = perms.iter().any(|p| ga.permuted(p) == gb);
            assert_eq!(canonical_form(&ga) == canonical_form(&gb), iso, "{a} {b}");
        }
    }
}

#[test]
fn fraction_free_and_cofactor_agree_with_leibniz() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..400 {
        let m = random_matrix(&mut rng, 1 + k % 5);
        let oracle = leibniz_det(&m);
        assert_eq!(m.det(), oracle);
        assert_eq!(m.cofactor_det(), oracle);
    }
}

#[test]
fn minor_profile_matches_leibniz_minors() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..100 {
        let n = 1 + k % 4;
        let m = random_matrix(&mut rng, n);
        let profile = m.minor_profile();
        assert_eq!(profile.total(), (1 << n) - 1);
        for (mask, v) in leibniz_minors(&m) {
            let found = profile
                .iter()
                .find(|(s, _)| s.elements().iter().map(|i| 1u32 << i).sum::<u32>() == mask)
                .map(|(_, v)| v.clone());
            assert_eq!(found, Some(v));
        }
    }
}

#[test]
fn searched_two_cycle_completion_has_the_expected_minors() {
    let p = parse_partial("3\n1 -1 ?\n-1 1 ?\n? ? 1\n").unwrap();
    let m = ExactMatrix::new(vec![
        vec![rat(1, 1), rat(-1, 1), rat(1, 2)],
        vec![rat(-1, 1), rat(1, 1), rat(-1, 4)],
        vec![rat(1, 2), rat(-4, 5), rat(1, 1)],
    ])
    .unwrap();
    let minors = leibniz_minors(&m);
    let order_two: BTreeSet<_> = minors
        .iter()
        .filter(|(mask, _)| mask.count_ones() == 2)
        .map(|(_, v)| v.clone())
        .collect();
    assert_eq!(order_two, [rat(0, 1), rat(3, 4), rat(4, 5)].into_iter().collect());
    assert_eq!(minors.last().unwrap().1, rat(3, 40));
    assert!(verify_completion(&p, &m, MatrixClass::Ssp01Plus).unwrap().member);
    assert!(!is_member(&m, MatrixClass::Ssp).member);
}
