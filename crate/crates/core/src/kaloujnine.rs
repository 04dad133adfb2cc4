//! Embedding a finite group with a chosen composition series into the
//! iterated imprimitive wreath product of its composition factors.
//!
//! A subnormal chain `G = G_1 > G_2 > ... > G_{N+1} = 1` with simple
//! factors yields, via right-coset transversals, a faithful action of `G`
//! on the depth-N words of the coset tree, landing inside the tower
//! `F_N wr (... wr F_1)` of the (regularly realized) factors.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::embed::PEmbedding;
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{Domain, Perm};
use crate::wreath::{tower, Tower, TowerPoint, WreathKind, DEFAULT_MATERIALIZATION_CAP};

/// Brute-force simplicity checks stop at this factor order; larger
/// factors need the caller's attestation.
pub const SIMPLICITY_BUDGET: usize = 10_000;

/// A validated subnormal chain with simple factors. `terms` runs from the
/// whole group down to the trivial subgroup; `factors[n]` is the quotient
/// `G_{n+1}/G_{n+2}` realized as a regular permutation group on its coset
/// points, in discovery order of the cosets.
#[derive(Clone, Debug)]
pub struct CompositionSeries {
    terms: Vec<PermGroup>,
    factors: Vec<PermGroup>,
}

impl CompositionSeries {
    pub fn group(&self) -> &PermGroup {
        &self.terms[0]
    }

    pub fn terms(&self) -> &[PermGroup] {
        &self.terms
    }

    pub fn factors(&self) -> &[PermGroup] {
        &self.factors
    }

    /// Number of factors, the depth of the word tree.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// How the representative of each coset is picked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransversalRule {
    /// First element of the coset in canonical order (the default; the
    /// identity represents the identity coset).
    Minimal,
    /// Last element in canonical order, for cross-checking that the
    /// embedding class does not depend on the choice.
    Maximal,
}

/// Right-coset data of one chain step `G_{n+1} <= G_n`: a representative
/// per coset and the coset index of every element of `G_n`.
#[derive(Clone, Debug)]
pub struct TransversalLevel {
    reps: Vec<Perm>,
    coset_of: HashMap<Perm, usize>,
}

impl TransversalLevel {
    pub fn reps(&self) -> &[Perm] {
        &self.reps
    }

    pub fn coset_count(&self) -> usize {
        self.reps.len()
    }

    /// `[x]`: the chosen representative of the coset of `x`.
    pub fn representative(&self, x: &Perm, level: usize) -> Result<&Perm> {
        let idx = self
            .coset_of
            .get(x)
            .ok_or(Error::RepresentativeUndefined { level })?;
        Ok(&self.reps[*idx])
    }

    pub fn coset_index(&self, x: &Perm, level: usize) -> Result<usize> {
        self.coset_of
            .get(x)
            .copied()
            .ok_or(Error::RepresentativeUndefined { level })
    }
}

/// Transversals for every chain step; `levels[n-1]` belongs to level `n`.
#[derive(Clone, Debug)]
pub struct TransversalTable {
    levels: Vec<TransversalLevel>,
}

impl TransversalTable {
    pub fn levels(&self) -> &[TransversalLevel] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// A word `(t_1, .., t_N)` in the coset tree, letter `k` indexing the
/// level-(k+1) transversal. Extending a word appends deeper letters, so
/// the tree's prefix order is vector prefix order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeWord {
    pub letters: Vec<usize>,
}

impl TreeWord {
    pub fn depth(&self) -> usize {
        self.letters.len()
    }

    /// The root-coset word of a given depth (all letters index coset 0,
    /// the coset of the identity).
    pub fn identity(depth: usize) -> TreeWord {
        TreeWord {
            letters: vec![0; depth],
        }
    }
}

/// Which reading of the coset recursion to run.
///
/// `Corrected` carries the quotient of each step into the next subgroup:
/// `u_n = [t_n g_n]` and `g_{n+1} = t_n g_n u_n^{-1}`, which lands in
/// `G_{n+1}`. `PaperLiteral` instead takes `g_{n+1} = g_n u_n^{-1}`,
/// which in general leaves the subgroup chain and makes the next
/// representative lookup undefined; it is kept for experiments and fails
/// with `RepresentativeUndefined` where that happens.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecursionVariant {
    Corrected,
    PaperLiteral,
}

/// Coset structure of one chain step, with the given representative rule.
/// Cosets are discovered by scanning `G_n` in canonical order, so coset 0
/// is the subgroup itself.
fn coset_structure(
    gn: &PermGroup,
    gn1: &PermGroup,
    rule: TransversalRule,
) -> Result<TransversalLevel> {
    let els = gn.elements()?;
    let sub = gn1.elements()?;
    let mut coset_of: HashMap<Perm, usize> = HashMap::new();
    let mut reps: Vec<Perm> = Vec::new();
    for x in &els.list {
        if coset_of.contains_key(x) {
            continue;
        }
        let idx = reps.len();
        let mut members: Vec<&Perm> = Vec::with_capacity(sub.list.len());
        for u in &sub.list {
            let member = u.then(x);
            members.push(&els.list[els.index[&member]]);
            coset_of.insert(member, idx);
        }
        let rep = match rule {
            TransversalRule::Minimal => members
                .iter()
                .map(|m| els.index[*m])
                .min()
                .map(|i| els.list[i].clone())
                .expect("coset is non-empty"),
            TransversalRule::Maximal => members
                .iter()
                .map(|m| els.index[*m])
                .max()
                .map(|i| els.list[i].clone())
                .expect("coset is non-empty"),
        };
        reps.push(rep);
    }
    Ok(TransversalLevel { reps, coset_of })
}

/// The coset action of `G_n` on the right cosets of `G_{n+1}`, realized
/// as a permutation group on the coset indices. For a normal subgroup
/// this is the quotient acting regularly on itself.
fn coset_action(gn: &PermGroup, level: &TransversalLevel) -> Result<PermGroup> {
    let q = level.coset_count();
    let gens = gn
        .generators()
        .iter()
        .map(|g| {
            let images = (0..q)
                .map(|i| level.coset_of[&level.reps[i].then(g)])
                .collect();
            Perm::from_images(images)
        })
        .collect::<Result<Vec<_>>>()?;
    PermGroup::from_generators(Domain::plain(q), gens)
}

/// Validate a subnormal chain given by generator lists for
/// `G_2, .., G_{N+1}`; the final entry must generate the trivial group.
/// Checks normality in the predecessor, strict descent, triviality of the
/// tail, and brute-force simplicity of every factor (up to
/// [`SIMPLICITY_BUDGET`]; pass `attest_simple` to skip larger factors).
pub fn validate_series(group: &PermGroup, chain: &[Vec<Perm>]) -> Result<CompositionSeries> {
    validate_series_with(group, chain, false)
}

pub fn validate_series_with(
    group: &PermGroup,
    chain: &[Vec<Perm>],
    attest_simple: bool,
) -> Result<CompositionSeries> {
    let mut terms = vec![group.clone()];
    for gens in chain {
        for g in gens {
            if g.degree() != group.degree() {
                return Err(Error::DomainMismatch {
                    expected: group.degree(),
                    got: g.degree(),
                });
            }
        }
        terms.push(PermGroup::from_generators(
            group.domain().clone(),
            gens.clone(),
        )?);
    }
    if terms.len() < 2 {
        return Err(Error::InvalidArgument(
            "a composition series needs at least one proper step".into(),
        ));
    }
    if !terms.last().unwrap().is_trivial() {
        return Err(Error::NonTrivialTail);
    }
    for step in 0..terms.len() - 1 {
        let gn = &terms[step];
        let gn1 = &terms[step + 1];
        let gn_els = gn.elements()?;
        for h in gn1.generators() {
            if !gn_els.index.contains_key(h) {
                return Err(Error::NotAMember(format!(
                    "generator {h} of step {} lies outside its predecessor",
                    step + 1
                )));
            }
        }
        // normality: conjugates of subgroup generators stay inside
        let gn1_els = gn1.elements()?;
        for g in gn.generators() {
            for h in gn1.generators() {
                let conj = g.inverse().then(h).then(g);
                if !gn1_els.index.contains_key(&conj) {
                    return Err(Error::NonNormalStep { step: step + 1 });
                }
            }
        }
        if gn1.order() >= gn.order() {
            return Err(Error::NotStrictlyDecreasing { step: step + 1 });
        }
    }
    let mut factors = Vec::new();
    for step in 0..terms.len() - 1 {
        let level = coset_structure(&terms[step], &terms[step + 1], TransversalRule::Minimal)?;
        let factor = coset_action(&terms[step], &level)?;
        let q = level.coset_count();
        // normal subgroup: the coset action is the quotient acting
        // regularly, so its order is the index
        if factor.order() != BigUint::from(q) {
            return Err(Error::NonNormalStep { step: step + 1 });
        }
        if q <= SIMPLICITY_BUDGET {
            if !crate::group::is_simple_bruteforce(&factor)? {
                return Err(Error::NonSimpleFactor {
                    step: step + 1,
                    order: q,
                });
            }
        } else if !attest_simple {
            return Err(Error::BudgetExceeded {
                what: format!(
                    "factor of order {q} exceeds the simplicity budget; \
                     pass the attestation flag to accept it"
                ),
            });
        }
        factors.push(factor);
    }
    Ok(CompositionSeries { terms, factors })
}

/// Deterministic transversals for every chain step.
pub fn choose_transversals(series: &CompositionSeries) -> Result<TransversalTable> {
    choose_transversals_with(series, TransversalRule::Minimal)
}

pub fn choose_transversals_with(
    series: &CompositionSeries,
    rule: TransversalRule,
) -> Result<TransversalTable> {
    let mut levels = Vec::with_capacity(series.len());
    for step in 0..series.len() {
        levels.push(coset_structure(
            &series.terms[step],
            &series.terms[step + 1],
            rule,
        )?);
    }
    Ok(TransversalTable { levels })
}

/// Act on a tree word by right multiplication, via the coset recursion.
pub fn boundary_act(table: &TransversalTable, word: &TreeWord, g: &Perm) -> Result<TreeWord> {
    boundary_act_with(table, word, g, RecursionVariant::Corrected)
}

pub fn boundary_act_with(
    table: &TransversalTable,
    word: &TreeWord,
    g: &Perm,
    variant: RecursionVariant,
) -> Result<TreeWord> {
    if word.depth() > table.depth() {
        return Err(Error::InvalidArgument(format!(
            "word depth {} exceeds the series depth {}",
            word.depth(),
            table.depth()
        )));
    }
    let mut letters = Vec::with_capacity(word.depth());
    let mut carry = g.clone();
    for (n, &letter) in word.letters.iter().enumerate() {
        let level = &table.levels[n];
        if letter >= level.coset_count() {
            return Err(Error::InvalidArgument(format!(
                "letter {letter} out of range at level {}",
                n + 1
            )));
        }
        let t = &level.reps[letter];
        let moved = t.then(&carry);
        let u_idx = level.coset_index(&moved, n + 1)?;
        letters.push(u_idx);
        let u = &level.reps[u_idx];
        carry = match variant {
            RecursionVariant::Corrected => moved.then(&u.inverse()),
            RecursionVariant::PaperLiteral => carry.then(&u.inverse()),
        };
    }
    Ok(TreeWord { letters })
}

/// The depth-N word of a group element: its coset decomposition
/// `x = u_N ... u_1` along the chain.
pub fn word_of_element(table: &TransversalTable, x: &Perm) -> Result<TreeWord> {
    let mut letters = Vec::with_capacity(table.depth());
    let mut carry = x.clone();
    for (n, level) in table.levels.iter().enumerate() {
        let u_idx = level.coset_index(&carry, n + 1)?;
        letters.push(u_idx);
        carry = carry.then(&level.reps[u_idx].inverse());
    }
    Ok(TreeWord { letters })
}

/// The right regular realization of a group: one point per element in
/// canonical order, labelled by the element.
pub fn regular_realization(g: &PermGroup) -> Result<PermGroup> {
    let els = g.elements()?;
    let n = els.list.len();
    let gens = g
        .generators()
        .iter()
        .map(|gen| {
            let images = (0..n).map(|i| els.index[&els.list[i].then(gen)]).collect();
            Perm::from_images(images)
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = els.list.iter().map(|p| p.to_cycle_string()).collect();
    PermGroup::from_generators(Domain::with_labels(labels)?, gens)
}

/// A tree word as a point of the factor tower: letter `N` is the bottom
/// coordinate.
pub fn word_to_tower_point(word: &TreeWord) -> TowerPoint {
    let mut pt = TowerPoint::Point(word.letters[0] as u32);
    for &letter in &word.letters[1..] {
        pt = TowerPoint::Pair(letter as u32, Box::new(pt));
    }
    pt
}

pub fn tower_point_to_word(pt: &TowerPoint) -> Result<TreeWord> {
    let mut letters_rev = Vec::new();
    let mut cur = pt;
    loop {
        match cur {
            TowerPoint::Pair(w, rest) => {
                letters_rev.push(*w as usize);
                cur = rest;
            }
            TowerPoint::Point(x) => {
                letters_rev.push(*x as usize);
                break;
            }
            TowerPoint::Func(_) => {
                return Err(Error::InvalidArgument(
                    "function points do not encode tree words".into(),
                ))
            }
        }
    }
    letters_rev.reverse();
    Ok(TreeWord {
        letters: letters_rev,
    })
}

/// The degree-1 P-embedding of `G` (in its regular realization on depth-N
/// words) into the imprimitive tower of the composition factors. Every
/// image permutation is decomposed into a structured wreath element; a
/// decomposition failure would mean the image left the tower and is
/// reported as an error.
pub fn embed_via_series(
    series: &CompositionSeries,
    table: &TransversalTable,
) -> Result<PEmbedding> {
    let factor_tower = tower(WreathKind::Imprimitive, series.factors(), series.len())?;
    let degree = factor_tower.degree_usize()?;
    if degree > DEFAULT_MATERIALIZATION_CAP {
        return Err(Error::CapExceeded {
            what: "factor tower domain".into(),
            size: degree.to_string(),
            cap: DEFAULT_MATERIALIZATION_CAP,
        });
    }
    let g = series.group();
    let els = g.elements()?;
    let source = regular_realization(g)?;

    // words in tower-point order
    let words = (0..degree)
        .map(|i| tower_point_to_word(&factor_tower.point_from_index(i)?))
        .collect::<Result<Vec<_>>>()?;
    let word_index: HashMap<&TreeWord, usize> =
        words.iter().enumerate().map(|(i, w)| (w, i)).collect();

    let mut iota_gens = Vec::with_capacity(g.generators().len());
    for gen in g.generators() {
        let mut images = vec![0usize; degree];
        for (i, w) in words.iter().enumerate() {
            let moved = boundary_act(table, w, gen)?;
            images[i] = *word_index
                .get(&moved)
                .ok_or_else(|| Error::InvalidArgument("word action left the tree".into()))?;
        }
        let flat = Perm::from_images(images)?;
        iota_gens.push(factor_tower.decompose_flat(&flat)?);
    }

    let gamma = els
        .list
        .iter()
        .map(|x| {
            let w = word_of_element(table, x)?;
            Ok(vec![word_to_tower_point(&w)])
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PEmbedding {
        source: source.clone(),
        source_tower: Tower::Leaf(source),
        target: factor_tower,
        degree: 1,
        iota_gens,
        gamma,
    })
}

/// Multiset of factor orders, for the simple factor-multiset equality
/// check between two series of the same group.
pub fn factor_order_multiset(series: &CompositionSeries) -> Vec<BigUint> {
    let mut orders: Vec<BigUint> = series.factors().iter().map(|f| f.order()).collect();
    orders.sort();
    orders
}
