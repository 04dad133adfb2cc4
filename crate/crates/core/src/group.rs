//! Permutation groups given by generators.
//!
//! The canonical element order of a group is its breadth-first closure
//! order: the identity first, then products `x·g` in discovery order with
//! generators tried in list order. All deterministic tie-breaking in the
//! crate (transversal representatives, search orders, witness choices)
//! refers to this order.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::perm::{Domain, Perm};

/// Default cap on full element enumeration.
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;

/// A finite permutation group on a [`Domain`], given by generators.
///
/// Groups are immutable after construction; the order, element list and
/// transitivity flag are computed lazily and cached.
#[derive(Debug)]
pub struct PermGroup {
    domain: Domain,
    generators: Vec<Perm>,
    /// Order supplied by a structural formula (e.g. by a wreath-product
    /// constructor); trusted instead of enumeration when present.
    known_order: Option<BigUint>,
    order: OnceLock<BigUint>,
    elements: OnceLock<Option<Elements>>,
    transitive: OnceLock<bool>,
}

/// BFS element table: elements in canonical order, their index map, and
/// for every non-identity element the `(parent, generator)` backpointer of
/// its first discovery.
#[derive(Debug)]
pub struct Elements {
    pub list: Vec<Perm>,
    pub index: HashMap<Perm, usize>,
    pub parent: Vec<(usize, usize)>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        PermGroup {
            domain: self.domain.clone(),
            generators: self.generators.clone(),
            known_order: self.known_order.clone(),
            order: OnceLock::new(),
            elements: OnceLock::new(),
            transitive: OnceLock::new(),
        }
    }
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.generators == other.generators
    }
}
impl Eq for PermGroup {}

impl PermGroup {
    /// Build a group from generators living on `domain`.
    pub fn from_generators(domain: Domain, gens: Vec<Perm>) -> Result<Self> {
        for g in &gens {
            if g.degree() != domain.size() {
                return Err(Error::DomainMismatch {
                    expected: domain.size(),
                    got: g.degree(),
                });
            }
        }
        Ok(PermGroup {
            domain,
            generators: gens,
            known_order: None,
            order: OnceLock::new(),
            elements: OnceLock::new(),
            transitive: OnceLock::new(),
        })
    }

    /// As [`PermGroup::from_generators`], with the order already known
    /// from a structural formula.
    pub fn with_known_order(domain: Domain, gens: Vec<Perm>, order: BigUint) -> Result<Self> {
        let mut g = Self::from_generators(domain, gens)?;
        g.known_order = Some(order);
        Ok(g)
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::from_generators(Domain::plain(degree), Vec::new()).unwrap()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn degree(&self) -> usize {
        self.domain.size()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn identity(&self) -> Perm {
        Perm::identity(self.degree())
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.iter().all(|g| g.is_identity())
    }

    /// Exact group order. Breadth-first closure is used up to
    /// [`DEFAULT_ENUM_CAP`]; beyond that a stabilizer chain is built.
    pub fn order(&self) -> BigUint {
        self.order
            .get_or_init(|| {
                if let Some(o) = &self.known_order {
                    return o.clone();
                }
                match self.elements_cached() {
                    Some(els) => BigUint::from(els.list.len()),
                    None => self.order_via_stabilizer_chain(),
                }
            })
            .clone()
    }

    /// Order as `usize`, for groups known to be small.
    pub fn order_usize(&self) -> Result<usize> {
        usize::try_from(&self.order()).map_err(|_| Error::BudgetExceeded {
            what: format!("order {} does not fit in usize", self.order()),
        })
    }

    /// Order by breadth-first closure, ignoring any cached value. Errors
    /// out above `cap`.
    pub fn order_via_enumeration(&self, cap: usize) -> Result<BigUint> {
        match self.enumerate(cap) {
            Some(e) => Ok(BigUint::from(e.list.len())),
            None => Err(Error::BudgetExceeded {
                what: format!("enumeration exceeds cap {cap}"),
            }),
        }
    }

    /// Order by a deterministic Schreier-style stabilizer chain.
    pub fn order_via_stabilizer_chain(&self) -> BigUint {
        fn chain(gens: Vec<Perm>, degree: usize) -> BigUint {
            let gens: Vec<Perm> = {
                let mut seen = std::collections::HashSet::new();
                gens.into_iter()
                    .filter(|g| !g.is_identity() && seen.insert(g.clone()))
                    .collect()
            };
            let base = (0..degree).find(|&p| gens.iter().any(|g| g.apply(p) != p));
            let base = match base {
                Some(b) => b,
                None => return BigUint::one(),
            };
            // orbit of `base` with transversal representatives
            let mut reps: HashMap<usize, Perm> = HashMap::new();
            let mut orbit = vec![base];
            reps.insert(base, Perm::identity(degree));
            let mut i = 0;
            while i < orbit.len() {
                let p = orbit[i];
                let rp = reps[&p].clone();
                for g in &gens {
                    let q = g.apply(p);
                    if let std::collections::hash_map::Entry::Vacant(e) = reps.entry(q) {
                        e.insert(rp.then(g));
                        orbit.push(q);
                    }
                }
                i += 1;
            }
            // Schreier generators for the stabilizer of `base`
            let mut stab = std::collections::HashSet::new();
            for p in &orbit {
                let rp = &reps[p];
                for g in &gens {
                    let q = g.apply(*p);
                    let s = rp.then(g).then(&reps[&q].inverse());
                    if !s.is_identity() {
                        stab.insert(s);
                    }
                }
            }
            let mut stab: Vec<Perm> = stab.into_iter().collect();
            stab.sort();
            BigUint::from(orbit.len()) * chain(stab, degree)
        }
        chain(self.generators.clone(), self.degree())
    }

    /// The cached element table, or `None` when the group exceeds
    /// [`DEFAULT_ENUM_CAP`].
    pub fn elements_cached(&self) -> Option<&Elements> {
        self.elements
            .get_or_init(|| self.enumerate(DEFAULT_ENUM_CAP))
            .as_ref()
    }

    /// Element table under the default cap; errors if the group is too big.
    pub fn elements(&self) -> Result<&Elements> {
        self.elements_cached().ok_or_else(|| Error::BudgetExceeded {
            what: format!(
                "group of order {} exceeds the enumeration cap",
                self.order()
            ),
        })
    }

    fn enumerate(&self, cap: usize) -> Option<Elements> {
        if let Some(o) = &self.known_order {
            if o > &BigUint::from(cap) {
                return None;
            }
        }
        let id = self.identity();
        let mut list = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0usize);
        let mut parent = vec![(0usize, usize::MAX)];
        let mut i = 0;
        while i < list.len() {
            let x = list[i].clone();
            for (gi, g) in self.generators.iter().enumerate() {
                let y = x.then(g);
                if !index.contains_key(&y) {
                    if list.len() >= cap {
                        return None;
                    }
                    index.insert(y.clone(), list.len());
                    parent.push((i, gi));
                    list.push(y);
                }
            }
            i += 1;
        }
        Some(Elements {
            list,
            index,
            parent,
        })
    }

    /// The generator word of element `idx` in the BFS table, as generator
    /// indices applied left to right.
    pub fn word_of(&self, els: &Elements, idx: usize) -> Vec<usize> {
        let mut word = Vec::new();
        let mut i = idx;
        while i != 0 {
            let (p, g) = els.parent[i];
            word.push(g);
            i = p;
        }
        word.reverse();
        word
    }

    pub fn contains(&self, p: &Perm) -> Result<bool> {
        if p.degree() != self.degree() {
            return Ok(false);
        }
        Ok(self.elements()?.index.contains_key(p))
    }

    /// Orbit of a point, in discovery order.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut orbit = vec![point];
        let mut seen = vec![false; self.degree()];
        seen[point] = true;
        let mut i = 0;
        while i < orbit.len() {
            for g in &self.generators {
                let q = g.apply(orbit[i]);
                if !seen[q] {
                    seen[q] = true;
                    orbit.push(q);
                }
            }
            i += 1;
        }
        orbit
    }

    /// All orbits, ordered by smallest point, each sorted.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut orbits = Vec::new();
        for p in 0..self.degree() {
            if seen[p] {
                continue;
            }
            let mut o = self.orbit(p);
            for &q in &o {
                seen[q] = true;
            }
            o.sort_unstable();
            orbits.push(o);
        }
        orbits
    }

    pub fn is_transitive(&self) -> bool {
        *self
            .transitive
            .get_or_init(|| self.degree() > 0 && self.orbit(0).len() == self.degree())
    }

    /// Induce the action on a G-invariant subset. Returns the induced
    /// group on the subset (labels carried over from the parent domain)
    /// together with the order of the kernel of the induction map.
    ///
    /// The restriction need not be faithful; callers that require
    /// faithfulness check `kernel_order == 1`.
    pub fn restrict_to_invariant_subset(&self, subset: &[usize]) -> Result<(PermGroup, BigUint)> {
        let mut subset: Vec<usize> = subset.to_vec();
        subset.sort_unstable();
        subset.dedup();
        for &p in &subset {
            if p >= self.degree() {
                return Err(Error::PointOutOfRange {
                    point: p,
                    size: self.degree(),
                });
            }
        }
        let pos: HashMap<usize, usize> = subset.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut gens = Vec::new();
        for (gi, g) in self.generators.iter().enumerate() {
            let mut images = vec![0; subset.len()];
            for (i, &p) in subset.iter().enumerate() {
                let q = g.apply(p);
                match pos.get(&q) {
                    Some(&j) => images[i] = j,
                    None => {
                        return Err(Error::SubsetNotInvariant {
                            generator: gi,
                            point: p,
                        })
                    }
                }
            }
            gens.push(Perm::from_images(images)?);
        }
        let labels: Vec<String> = subset.iter().map(|&p| self.domain.label(p)).collect();
        let induced = PermGroup::from_generators(Domain::with_labels(labels)?, gens)?;
        let kernel = self.order() / induced.order();
        Ok((induced, kernel))
    }

    /// Exact equality of the generated subgroups (element sets), for
    /// groups on the same domain within the enumeration cap.
    pub fn same_subgroup(&self, other: &PermGroup) -> Result<bool> {
        if self.degree() != other.degree() {
            return Ok(false);
        }
        if self.order() != other.order() {
            return Ok(false);
        }
        let mine = self.elements()?;
        for g in other.generators() {
            if !mine.index.contains_key(g) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// True when all generators commute pairwise.
pub fn is_abelian(g: &PermGroup) -> bool {
    let gens = g.generators();
    gens.iter()
        .enumerate()
        .all(|(i, a)| gens[i..].iter().all(|b| a.then(b) == b.then(a)))
}

/// Normal closure of an element, by iterated conjugation of a growing
/// generating set. Returns its order.
fn normal_closure_order(g: &PermGroup, x: &Perm) -> Result<usize> {
    let mut ngens = vec![x.clone()];
    loop {
        let h = PermGroup::from_generators(g.domain().clone(), ngens.clone())?;
        let els = h.elements()?;
        let mut added = false;
        for n in ngens.clone() {
            for gen in g.generators() {
                let c = gen.inverse().then(&n).then(gen);
                if !els.index.contains_key(&c) {
                    ngens.push(c);
                    added = true;
                }
            }
        }
        if !added {
            return Ok(els.list.len());
        }
    }
}

/// Brute-force simplicity: the normal closure of every non-identity
/// element is the whole group.
pub fn is_simple_bruteforce(g: &PermGroup) -> Result<bool> {
    let n = g.elements()?.list.len();
    if n == 1 {
        return Ok(false);
    }
    for x in g.elements()?.list.clone().iter().skip(1) {
        if normal_closure_order(g, x)? != n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Brute-force solubility, by the derived series over full element sets.
pub fn is_soluble_bruteforce(g: &PermGroup) -> Result<bool> {
    let mut current: Vec<Perm> = g.elements()?.list.clone();
    loop {
        if current.len() == 1 {
            return Ok(true);
        }
        let mut commutators: std::collections::HashSet<Perm> = std::collections::HashSet::new();
        for a in &current {
            let a_inv = a.inverse();
            for b in &current {
                commutators.insert(a_inv.then(&b.inverse()).then(a).then(b));
            }
        }
        let mut gens: Vec<Perm> = commutators.into_iter().collect();
        gens.sort();
        let derived = PermGroup::from_generators(g.domain().clone(), gens)?;
        let next = derived.elements()?.list.clone();
        if next.len() == current.len() {
            return Ok(false);
        }
        current = next;
    }
}

/// One representative per conjugacy class, in canonical order.
pub fn conjugacy_class_representatives(g: &PermGroup) -> Result<Vec<Perm>> {
    let els = g.elements()?;
    let mut seen = vec![false; els.list.len()];
    let mut reps = Vec::new();
    for (i, x) in els.list.iter().enumerate() {
        if seen[i] {
            continue;
        }
        reps.push(x.clone());
        // orbit of x under conjugation
        let mut orbit = vec![i];
        seen[i] = true;
        let mut k = 0;
        while k < orbit.len() {
            let y = &els.list[orbit[k]];
            for gen in g.generators() {
                let c = gen.inverse().then(y).then(gen);
                let j = els.index[&c];
                if !seen[j] {
                    seen[j] = true;
                    orbit.push(j);
                }
            }
            k += 1;
        }
    }
    Ok(reps)
}
