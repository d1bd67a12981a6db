//! Finite permutation groups given by generators: orbits, restriction,
//! element enumeration, and actions on cosets.

use std::collections::HashMap;

use crate::perm::{orbits, Perm};

/// Restricts the generators to one orbit, relabelling its points in
/// increasing order.
pub fn restrict_to_orbit(gens: &[Perm], orbit: &[usize]) -> Vec<Perm> {
    let mut label = vec![usize::MAX; gens.first().map(Perm::degree).unwrap_or(0)];
    let mut pts = orbit.to_vec();
    pts.sort_unstable();
    for (k, &p) in pts.iter().enumerate() {
        label[p] = k;
    }
    gens.iter()
        .map(|g| Perm::from_images(pts.iter().map(|&p| label[g.apply(p)]).collect()).expect("an orbit is invariant"))
        .collect()
}

/// Orbits of the group generated by `gens`, smallest first, ties by least point.
pub fn sorted_orbits(gens: &[Perm]) -> Vec<Vec<usize>> {
    let n = gens.first().map(Perm::degree).unwrap_or(0);
    let refs: Vec<&Perm> = gens.iter().collect();
    let mut o = orbits(n, &refs);
    o.sort_by_key(|orb| (orb.len(), orb[0]));
    o
}

/// All elements of `⟨gens⟩`, identity first, or `None` beyond `cap` elements.
pub fn enumerate(gens: &[Perm], cap: usize) -> Option<Vec<Perm>> {
    let n = gens.first().map(Perm::degree).unwrap_or(1);
    let id = Perm::identity(n);
    let mut seen: HashMap<Perm, usize> = HashMap::new();
    seen.insert(id.clone(), 0);
    let mut elems = vec![id];
    let mut k = 0;
    while k < elems.len() {
        for g in gens {
            let e = elems[k].then(g);
            if !seen.contains_key(&e) {
                if elems.len() >= cap {
                    return None;
                }
                seen.insert(e.clone(), elems.len());
                elems.push(e);
            }
        }
        k += 1;
    }
    Some(elems)
}

/// The action of each generator on the right cosets `K h` of `K = ⟨k⟩`
/// inside the group with elements `elems` (as produced by [`enumerate`]).
pub fn coset_action(elems: &[Perm], gens: &[Perm], k: &Perm) -> Vec<Perm> {
    let index: HashMap<&Perm, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let ord = k.order() as i64;
    let powers: Vec<Perm> = (0..ord).map(|i| k.pow(i)).collect();
    let mut coset = vec![usize::MAX; elems.len()];
    let mut count = 0;
    for (i, h) in elems.iter().enumerate() {
        if coset[i] != usize::MAX {
            continue;
        }
        for p in &powers {
            coset[index[&p.then(h)]] = count;
        }
        count += 1;
    }
    let mut rep = vec![0; count];
    for (i, &c) in coset.iter().enumerate().rev() {
        rep[c] = i;
    }
    gens.iter()
        .map(|g| {
            let images = rep.iter().map(|&r| coset[index[&elems[r].then(g)]]).collect();
            Perm::from_images(images).expect("cosets are permuted")
        })
        .collect()
}

/// The right regular action of `⟨gens⟩` on its own elements.
pub fn regular_action(elems: &[Perm], gens: &[Perm]) -> Vec<Perm> {
    let n = elems.first().map(Perm::degree).unwrap_or(1);
    coset_action(elems, gens, &Perm::identity(n))
}
