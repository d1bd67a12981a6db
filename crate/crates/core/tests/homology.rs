mod support;

use fibercover::cover::CutData;
use fibercover::homology::low_index_subgroups;
use fibercover::perm::Perm;
use fibercover::presentation::{CosetAction, GroupPresentation};
use fibercover::word::FreeWord;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn smith_form_matches_minors() {
    assert_eq!(support::smith_against_minors(7, 1200), Ok(1200));
}

#[test]
fn nielsen_schreier_rank_law() {
    assert_eq!(support::nielsen_schreier(3, 300), Ok(300));
}

fn canonical(gens: &[Perm]) -> Vec<Vec<usize>> {
    // Relabel by breadth-first search from each start point; keep the least.
    let n = gens[0].degree();
    (0..n)
        .map(|start| {
            let mut label = vec![usize::MAX; n];
            let mut order = vec![start];
            label[start] = 0;
            let mut i = 0;
            while i < order.len() {
                let p = order[i];
                for g in gens {
                    let q = g.apply(p);
                    if label[q] == usize::MAX {
                        label[q] = order.len();
                        order.push(q);
                    }
                }
                i += 1;
            }
            gens.iter()
                .map(|g| order.iter().map(|&p| label[g.apply(p)]).collect())
                .collect::<Vec<Vec<usize>>>()
        })
        .min()
        .unwrap()
}

/// Transitive actions up to relabelling, by enumerating all of `S_n × S_n`.
fn brute_force_classes(p: &GroupPresentation, n: usize) -> usize {
    let all: Vec<Perm> = {
        let mut out = Vec::new();
        let mut v: Vec<usize> = (0..n).collect();
        permutations(&mut v, 0, &mut out);
        out
    };
    let mut seen = std::collections::BTreeSet::new();
    for a in &all {
        for b in &all {
            let action = CosetAction::new(vec![a.clone(), b.clone()], 0).unwrap();
            if action.is_transitive() && action.violated_relator(p).is_none() {
                seen.insert(canonical(&[a.clone(), b.clone()]));
            }
        }
    }
    seen.len()
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut Vec<Perm>) {
    if k == v.len() {
        out.push(Perm::from_images(v.clone()).unwrap());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

#[test]
fn low_index_agrees_with_brute_force() {
    let a = FreeWord::gen(1);
    let b = FreeWord::gen(2);
    let presentations = [
        GroupPresentation::free(2),
        GroupPresentation::new(vec!["a".into(), "b".into()], vec![a.pow(2), b.pow(3)]).unwrap(),
        GroupPresentation::new(vec!["a".into(), "b".into()], vec![a.pow(2), b.pow(3), (&a * &b).pow(5)]).unwrap(),
        GroupPresentation::new(
            vec!["a".into(), "b".into()],
            vec![&(&(&a * &b) * &a.inverse()) * &b.inverse()],
        )
        .unwrap(),
    ];
    for p in &presentations {
        let found = low_index_subgroups(p, 5);
        assert!(found.complete);
        for n in 1..=5 {
            let count = found.actions.iter().filter(|x| x.degree() == n).count();
            assert_eq!(count, brute_force_classes(p, n), "{p:?} index {n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fiber_covers_have_expected_euler_characteristic(
        width in 1usize..=5,
        rows in 1usize..=5,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma: Vec<Perm> = (0..rows).map(|_| support::random_perm(&mut rng, width)).collect();
        let c = CutData::new(width, sigma).unwrap();
        let degree = support::fiber_cover_invariants(&c).map_err(TestCaseError::fail)?;
        prop_assert!(degree.is_none_or(|d| d == width * rows));
    }
}
