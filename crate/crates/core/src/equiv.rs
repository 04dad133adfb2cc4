//! Equivalence of group actions and the "permutationally isomorphic to a
//! subgroup" search.
//!
//! A witness is a pair `(iso, bijection)` with
//! `bijection(d^h) = bijection(d)^iso(h)` for every point `d` and group
//! element `h`. Searches are deterministic: generator images are tried in
//! the canonical element order of the target, and the first complete
//! witness is returned.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Perm;

/// Default node budget for the backtracking searches.
pub const DEFAULT_SEARCH_BUDGET: usize = 2_000_000;

/// A verified equivalence of two actions: generator images of an
/// isomorphism plus the intertwining point bijection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionEquivalence {
    /// Image of each generator of the source group.
    pub iso_gen_images: Vec<Perm>,
    /// `bijection[d]` is the image of source point `d`.
    pub bijection: Vec<usize>,
}

impl ActionEquivalence {
    /// Check the equivariance identity over all (point, element) pairs.
    pub fn verify(&self, source: &PermGroup) -> Result<bool> {
        let table = match extend_monomorphism(source, &self.iso_gen_images) {
            Some(t) => t,
            None => return Ok(false),
        };
        let els = source.elements()?;
        for (hi, h) in els.list.iter().enumerate() {
            let img = &table[hi];
            for d in 0..source.degree() {
                if self.bijection[h.apply(d)] != img.apply(self.bijection[d]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The inverse witness, from the target back onto the source. `target`
    /// must be the group the equivalence maps onto.
    pub fn invert(&self, source: &PermGroup, target: &PermGroup) -> Result<ActionEquivalence> {
        let table = extend_monomorphism(source, &self.iso_gen_images).ok_or_else(|| {
            Error::InvalidArgument("iso does not extend to a monomorphism".into())
        })?;
        let src_els = source.elements()?;
        let mut backwards: HashMap<&Perm, usize> = HashMap::new();
        for (i, img) in table.iter().enumerate() {
            backwards.insert(img, i);
        }
        let mut iso_gen_images = Vec::new();
        for g in target.generators() {
            let &hi = backwards
                .get(g)
                .ok_or_else(|| Error::InvalidArgument("iso is not onto the target".into()))?;
            iso_gen_images.push(src_els.list[hi].clone());
        }
        let mut bijection = vec![0usize; target.degree()];
        for (d, &im) in self.bijection.iter().enumerate() {
            bijection[im] = d;
        }
        Ok(ActionEquivalence {
            iso_gen_images,
            bijection,
        })
    }
}

/// A subgroup witness for the degree-1 P-embedding relation: a subgroup of
/// the target (by generator images), an invariant subset, and the
/// equivalence onto the induced action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupWitness {
    pub subgroup_gens: Vec<Perm>,
    pub invariant_subset: Vec<usize>,
    pub equivalence: ActionEquivalence,
}

impl SubgroupWitness {
    /// The identity witness of a group into itself.
    pub fn identity(group: &PermGroup) -> SubgroupWitness {
        SubgroupWitness {
            subgroup_gens: group.generators().to_vec(),
            invariant_subset: (0..group.degree()).collect(),
            equivalence: ActionEquivalence {
                iso_gen_images: group.generators().to_vec(),
                bijection: (0..group.degree()).collect(),
            },
        }
    }

    /// Compose with a witness of the middle group into a third group.
    pub fn compose(&self, mid: &PermGroup, next: &SubgroupWitness) -> Result<SubgroupWitness> {
        let mid_table = extend_monomorphism(mid, &next.equivalence.iso_gen_images)
            .ok_or_else(|| Error::InvalidArgument("second witness does not extend".into()))?;
        let mid_els = mid.elements()?;
        let map_through = |p: &Perm| -> Result<Perm> {
            let &i = mid_els
                .index
                .get(p)
                .ok_or_else(|| Error::NotAMember(p.to_cycle_string()))?;
            Ok(mid_table[i].clone())
        };
        let iso_gen_images = self
            .equivalence
            .iso_gen_images
            .iter()
            .map(map_through)
            .collect::<Result<Vec<_>>>()?;
        let bijection: Vec<usize> = self
            .equivalence
            .bijection
            .iter()
            .map(|&d| next.equivalence.bijection[d])
            .collect();
        let mut invariant_subset: Vec<usize> = bijection.clone();
        invariant_subset.sort_unstable();
        Ok(SubgroupWitness {
            subgroup_gens: iso_gen_images.clone(),
            invariant_subset,
            equivalence: ActionEquivalence {
                iso_gen_images,
                bijection,
            },
        })
    }
}

/// Extend generator images to the full element table of `source`, checking
/// well-definedness (the relations of the BFS table) on the way. Returns
/// the image of every source element in canonical order, or `None` if the
/// assignment is not a homomorphism or not injective.
pub fn extend_monomorphism(source: &PermGroup, gen_images: &[Perm]) -> Option<Vec<Perm>> {
    let els = source.elements().ok()?;
    if gen_images.len() != source.generators().len() {
        return None;
    }
    let tdeg = gen_images
        .first()
        .map(|p| p.degree())
        .unwrap_or_else(|| source.degree());
    let mut table: Vec<Perm> = Vec::with_capacity(els.list.len());
    table.push(Perm::identity(tdeg));
    for i in 1..els.list.len() {
        let (p, g) = els.parent[i];
        table.push(table[p].then(&gen_images[g]));
    }
    // relation check: every edge of the Cayley closure must commute with
    // the assignment
    for (i, el) in els.list.iter().enumerate() {
        for (gi, g) in source.generators().iter().enumerate() {
            let j = els.index[&el.then(g)];
            if table[i].then(&gen_images[gi]) != table[j] {
                return None;
            }
        }
    }
    let distinct: HashSet<&Perm> = table.iter().collect();
    if distinct.len() != table.len() {
        return None;
    }
    Some(table)
}

/// Backtracking over generator images in the canonical element order of
/// the target, pruned by element order. Calls `found` on each extension
/// that is a genuine monomorphism; stops when `found` returns true.
///
/// Candidates are pruned by element order always, and by cycle type when
/// `same_degree_actions` holds (an equivalence of actions preserves cycle
/// types; a proper subgroup witness does not).
fn search_monomorphisms<F>(
    source: &PermGroup,
    target_elements: &[Perm],
    same_degree_actions: bool,
    budget: &mut usize,
    found: &mut F,
) -> Result<bool>
where
    F: FnMut(&[Perm], &[Perm]) -> Result<bool>,
{
    let gen_orders: Vec<u64> = source.generators().iter().map(|g| g.order()).collect();
    let gen_types: Vec<Option<Vec<usize>>> = source
        .generators()
        .iter()
        .map(|g| same_degree_actions.then(|| g.cycle_type()))
        .collect();
    #[allow(clippy::too_many_arguments)]
    fn rec<F>(
        source: &PermGroup,
        target_elements: &[Perm],
        gen_orders: &[u64],
        gen_types: &[Option<Vec<usize>>],
        chosen: &mut Vec<Perm>,
        budget: &mut usize,
        found: &mut F,
    ) -> Result<bool>
    where
        F: FnMut(&[Perm], &[Perm]) -> Result<bool>,
    {
        if chosen.len() == gen_orders.len() {
            if let Some(table) = extend_monomorphism(source, chosen) {
                return found(chosen, &table);
            }
            return Ok(false);
        }
        let k = chosen.len();
        for cand in target_elements {
            if *budget == 0 {
                return Err(Error::BudgetExceeded {
                    what: "monomorphism search".into(),
                });
            }
            *budget -= 1;
            if cand.order() != gen_orders[k] {
                continue;
            }
            if let Some(t) = &gen_types[k] {
                if &cand.cycle_type() != t {
                    continue;
                }
            }
            chosen.push(cand.clone());
            let hit = rec(
                source,
                target_elements,
                gen_orders,
                gen_types,
                chosen,
                budget,
                found,
            )?;
            chosen.pop();
            if hit {
                return Ok(true);
            }
        }
        Ok(false)
    }
    let mut chosen = Vec::new();
    rec(
        source,
        target_elements,
        &gen_orders,
        &gen_types,
        &mut chosen,
        budget,
        found,
    )
}

/// How candidate target orbits are enumerated when matching orbits.
#[derive(Clone, Copy, PartialEq, Eq)]
enum OrbitOrder {
    Ascending,
    /// Later orbits first; the tie-break used by the subgroup search.
    Descending,
}

/// Match the orbits of the source action to orbits of the image group and
/// build the intertwining bijection, trying anchors in canonical order.
fn match_orbits(
    source: &PermGroup,
    table: &[Perm],
    image_orbits: &[Vec<usize>],
    require_all: bool,
    order: OrbitOrder,
) -> Result<Option<Vec<usize>>> {
    let src_orbits = source.orbits();
    if require_all {
        let total: usize = image_orbits.iter().map(|o| o.len()).sum();
        if total != source.degree() {
            return Ok(None);
        }
    }
    let els = source.elements()?;
    let candidate_order: Vec<usize> = match order {
        OrbitOrder::Ascending => (0..image_orbits.len()).collect(),
        OrbitOrder::Descending => (0..image_orbits.len()).rev().collect(),
    };

    #[allow(clippy::too_many_arguments)]
    fn rec(
        els_list: &[Perm],
        table: &[Perm],
        src_orbits: &[Vec<usize>],
        image_orbits: &[Vec<usize>],
        candidate_order: &[usize],
        used: &mut Vec<bool>,
        bijection: &mut Vec<Option<usize>>,
        k: usize,
    ) -> bool {
        if k == src_orbits.len() {
            return true;
        }
        let orbit = &src_orbits[k];
        let base = orbit[0];
        // stabilizer of the base point, as element indices
        let stab: Vec<usize> = els_list
            .iter()
            .enumerate()
            .filter(|(_, h)| h.apply(base) == base)
            .map(|(i, _)| i)
            .collect();
        for &j in candidate_order {
            if used[j] || image_orbits[j].len() != orbit.len() {
                continue;
            }
            for &anchor in &image_orbits[j] {
                if stab.iter().any(|&hi| table[hi].apply(anchor) != anchor) {
                    continue;
                }
                // the orbit map base^h -> anchor^iso(h) is well defined
                let mut assigned: Vec<usize> = Vec::with_capacity(orbit.len());
                let mut ok = true;
                for (hi, h) in els_list.iter().enumerate() {
                    let d = h.apply(base);
                    let im = table[hi].apply(anchor);
                    match bijection[d] {
                        Some(prev) if prev != im => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            bijection[d] = Some(im);
                            assigned.push(d);
                        }
                    }
                }
                if ok {
                    let distinct: HashSet<usize> =
                        orbit.iter().map(|&d| bijection[d].unwrap()).collect();
                    if distinct.len() == orbit.len() {
                        used[j] = true;
                        if rec(
                            els_list,
                            table,
                            src_orbits,
                            image_orbits,
                            candidate_order,
                            used,
                            bijection,
                            k + 1,
                        ) {
                            return true;
                        }
                        used[j] = false;
                    }
                }
                for d in assigned {
                    bijection[d] = None;
                }
            }
        }
        false
    }

    let mut used = vec![false; image_orbits.len()];
    let mut bij: Vec<Option<usize>> = vec![None; source.degree()];
    let hit = rec(
        &els.list,
        table,
        &src_orbits,
        image_orbits,
        &candidate_order,
        &mut used,
        &mut bij,
        0,
    );
    Ok(hit.then(|| bij.into_iter().map(|o| o.unwrap()).collect()))
}

/// Decide whether the actions of `source` and `target` are equivalent, and
/// return the first witness in search order if so.
pub fn actions_equivalent(
    source: &PermGroup,
    target: &PermGroup,
) -> Result<Option<ActionEquivalence>> {
    actions_equivalent_budgeted(source, target, DEFAULT_SEARCH_BUDGET)
}

pub fn actions_equivalent_budgeted(
    source: &PermGroup,
    target: &PermGroup,
    budget: usize,
) -> Result<Option<ActionEquivalence>> {
    if source.degree() != target.degree() || source.order() != target.order() {
        return Ok(None);
    }
    let tgt_els = target.elements()?;
    let mut budget = budget;
    let mut witness = None;
    search_monomorphisms(
        source,
        &tgt_els.list,
        true,
        &mut budget,
        &mut |images, table| {
            // injectivity plus equal orders makes the image all of the target
            if let Some(bijection) =
                match_orbits(source, table, &target.orbits(), true, OrbitOrder::Ascending)?
            {
                witness = Some(ActionEquivalence {
                    iso_gen_images: images.to_vec(),
                    bijection,
                });
                return Ok(true);
            }
            Ok(false)
        },
    )?;
    Ok(witness)
}

/// Search for a subgroup of `target` together with an invariant subset on
/// which it acts like `source` does on its domain.
///
/// Generator images are tried in the canonical element order of the
/// target; candidate invariant subsets are assembled from image-group
/// orbits, later orbits first. Budget exhaustion is reported as an error,
/// distinct from a definite "absent".
pub fn perm_iso_to_subgroup(
    source: &PermGroup,
    target: &PermGroup,
) -> Result<Option<SubgroupWitness>> {
    perm_iso_to_subgroup_budgeted(source, target, DEFAULT_SEARCH_BUDGET)
}

pub fn perm_iso_to_subgroup_budgeted(
    source: &PermGroup,
    target: &PermGroup,
    budget: usize,
) -> Result<Option<SubgroupWitness>> {
    use num_integer::Integer;
    if source.degree() > target.degree() {
        return Ok(None);
    }
    if !target.order().is_multiple_of(&source.order()) {
        return Ok(None);
    }
    let tgt_els = target.elements()?;
    let mut budget = budget;
    let mut witness = None;
    search_monomorphisms(
        source,
        &tgt_els.list,
        false,
        &mut budget,
        &mut |images, table| {
            let image_group = PermGroup::from_generators(target.domain().clone(), images.to_vec())?;
            if let Some(bijection) = match_orbits(
                source,
                table,
                &image_group.orbits(),
                false,
                OrbitOrder::Descending,
            )? {
                let mut invariant_subset: Vec<usize> = bijection.clone();
                invariant_subset.sort_unstable();
                witness = Some(SubgroupWitness {
                    subgroup_gens: images.to_vec(),
                    invariant_subset,
                    equivalence: ActionEquivalence {
                        iso_gen_images: images.to_vec(),
                        bijection,
                    },
                });
                return Ok(true);
            }
            Ok(false)
        },
    )?;
    Ok(witness)
}

/// The induced action of a group on the r-element subsets of its domain.
pub struct RSubsetAction<'a> {
    group: &'a PermGroup,
    r: usize,
}

impl<'a> RSubsetAction<'a> {
    pub fn new(group: &'a PermGroup, r: usize) -> Result<Self> {
        if r == 0 || r > group.degree() {
            return Err(Error::InvalidArgument(format!(
                "r = {r} out of range 1..={}",
                group.degree()
            )));
        }
        Ok(RSubsetAction { group, r })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// The image set `{ p^g : p in set }`.
    pub fn apply(&self, g: &Perm, set: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        if set.len() != self.r {
            return Err(Error::InvalidArgument(format!(
                "subset has size {}, expected {}",
                set.len(),
                self.r
            )));
        }
        Ok(set.iter().map(|&p| g.apply(p)).collect())
    }

    /// Orbit of a subset under the whole group, in discovery order.
    pub fn orbit(&self, set: &BTreeSet<usize>) -> Result<Vec<BTreeSet<usize>>> {
        let mut orbit = vec![set.clone()];
        let mut seen: HashSet<BTreeSet<usize>> = HashSet::new();
        seen.insert(set.clone());
        let mut i = 0;
        while i < orbit.len() {
            for g in self.group.generators() {
                let img = self.apply(g, &orbit[i])?;
                if seen.insert(img.clone()) {
                    orbit.push(img);
                }
            }
            i += 1;
        }
        Ok(orbit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupspec::parse_group_spec;
    use crate::perm::Domain;

    fn group(degree: usize, gens: &[&str]) -> PermGroup {
        let gens = gens
            .iter()
            .map(|s| Perm::parse(s, degree).unwrap())
            .collect();
        PermGroup::from_generators(Domain::plain(degree), gens).unwrap()
    }

    #[test]
    fn relabelled_involutions_are_equivalent() {
        // K = ⟨(2 3)⟩ realized on a 2-point domain labelled {2,3}
        let h = group(2, &["(0 1)"]);
        let k = PermGroup::from_generators(
            Domain::with_labels(vec!["2".into(), "3".into()]).unwrap(),
            vec![Perm::parse("(0 1)", 2).unwrap()],
        )
        .unwrap();
        let w = actions_equivalent(&h, &k).unwrap().expect("witness");
        assert!(w.verify(&h).unwrap());
    }

    #[test]
    fn different_degrees_are_not_equivalent() {
        let h = group(2, &["(0 1)"]);
        let k = group(3, &["(0 1 2)"]);
        assert!(actions_equivalent(&h, &k).unwrap().is_none());
    }

    #[test]
    fn regular_cyclic_equals_cycle() {
        let h = parse_group_spec("C3:reg").unwrap();
        let k = group(3, &["(0 1 2)"]);
        let w = actions_equivalent(&h, &k).unwrap().expect("witness");
        assert!(w.verify(&h).unwrap());
        // symmetry: the inverse maps witness the other direction
        let back = w.invert(&h, &k).unwrap();
        assert!(back.verify(&k).unwrap());
    }

    #[test]
    fn paper_worked_example_picks_the_second_block() {
        // C2 into ⟨(0 1)(2 3)⟩: the returned invariant subset is {2,3},
        // the second block, matching the worked example's choice
        let h = group(2, &["(0 1)"]);
        let g = group(4, &["(0 1)(2 3)"]);
        let w = perm_iso_to_subgroup(&h, &g).unwrap().expect("witness");
        assert_eq!(w.invariant_subset, vec![2, 3]);
        assert_eq!(w.subgroup_gens, g.generators().to_vec());
        assert_eq!(w.equivalence.bijection, vec![2, 3]);
        assert!(w.equivalence.verify(&h).unwrap());
    }

    #[test]
    fn c3_does_not_embed_in_c2() {
        let h = parse_group_spec("C3:reg").unwrap();
        let g = group(2, &["(0 1)"]);
        assert!(perm_iso_to_subgroup(&h, &g).unwrap().is_none());
    }

    #[test]
    fn involution_into_sym3() {
        let h = group(2, &["(0 1)"]);
        let g = parse_group_spec("S3:nat").unwrap();
        let w = perm_iso_to_subgroup(&h, &g).unwrap().expect("witness");
        assert_eq!(w.subgroup_gens[0].to_cycle_string(), "(0 1)");
        assert_eq!(w.invariant_subset, vec![0, 1]);
    }

    #[test]
    fn witness_composition_is_transitive() {
        let h = group(2, &["(0 1)"]);
        let g = group(4, &["(0 1)(2 3)"]);
        let f = parse_group_spec("S4:nat").unwrap();
        let w1 = perm_iso_to_subgroup(&h, &g).unwrap().expect("w1");
        let w2 = perm_iso_to_subgroup(&g, &f).unwrap().expect("w2");
        let w = w1.compose(&g, &w2).unwrap();
        assert!(w.equivalence.verify(&h).unwrap());
        let img = PermGroup::from_generators(f.domain().clone(), w.subgroup_gens.clone()).unwrap();
        for &p in &w.invariant_subset {
            for gen in img.generators() {
                assert!(w.invariant_subset.contains(&gen.apply(p)));
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let h = group(2, &["(0 1)"]);
        let g = parse_group_spec("S4:nat").unwrap();
        match perm_iso_to_subgroup_budgeted(&h, &g, 1) {
            Err(Error::BudgetExceeded { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn r_subset_action_basics() {
        let g = group(3, &["(0 1 2)"]);
        let act = RSubsetAction::new(&g, 2).unwrap();
        let set: BTreeSet<usize> = [0, 1].into_iter().collect();
        let img = act.apply(&g.generators()[0], &set).unwrap();
        assert_eq!(img, [1, 2].into_iter().collect());

        // the full domain is fixed by everything
        let act3 = RSubsetAction::new(&g, 3).unwrap();
        let full: BTreeSet<usize> = [0, 1, 2].into_iter().collect();
        assert_eq!(act3.apply(&g.generators()[0], &full).unwrap(), full);

        let g2 = group(4, &["(0 1)(2 3)"]);
        let act2 = RSubsetAction::new(&g2, 2).unwrap();
        let orbit = act2.orbit(&[0, 2].into_iter().collect()).unwrap();
        assert_eq!(orbit.len(), 2);
        assert!(orbit.contains(&[1, 3].into_iter().collect()));

        assert!(RSubsetAction::new(&g, 0).is_err());
        assert!(RSubsetAction::new(&g, 4).is_err());
    }
}
