//! Co-Hopfian verdicts for eventually specified sequences of transitive
//! permutation groups, the minimal-simple catalog, and the universal
//! block sequence.
//!
//! A sequence is given by a finite prefix and a tail. A `cycle` tail
//! repeats its terms forever, so every tail term recurs and the
//! eventual-subgroup criterion always holds. A `distinct` tail declares
//! an infinite continuation of pairwise non-equivalent terms: the listed
//! entries are its first samples. For minimal non-abelian simple terms no
//! proper containment between non-equivalent terms is possible (all
//! proper subgroups are soluble), so a distinct minimal-simple tail
//! certifies the criterion false; without that hypothesis the
//! continuation is undecidable and the verdict stays unknown.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::equiv::{actions_equivalent, perm_iso_to_subgroup_budgeted, DEFAULT_SEARCH_BUDGET};
use crate::error::{Error, Result};
use crate::group::{
    conjugacy_class_representatives, is_abelian, is_simple_bruteforce, is_soluble_bruteforce,
    PermGroup,
};
use crate::groupspec::{canonical_spec, parse_group_spec};

/// Brute-force minimal-simplicity stops at this order; larger groups need
/// a catalog tag.
pub const MINIMAL_SIMPLE_BUDGET: usize = 10_000;

/// Families of the minimal finite non-abelian simple groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// PSL2(2^p), p prime
    Psl2TwoPower,
    /// PSL2(3^p), p an odd prime
    Psl2ThreePower,
    /// PSL2(p), p > 3 prime with 5 | p^2 + 1
    Psl2Prime,
    /// Sz(2^p), p an odd prime
    Suzuki,
    /// PSL3(3)
    Psl3Three,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Psl2TwoPower => "PSL2(2^p)",
            Family::Psl2ThreePower => "PSL2(3^p)",
            Family::Psl2Prime => "PSL2(p)",
            Family::Suzuki => "Sz(2^p)",
            Family::Psl3Three => "PSL3(3)",
        }
    }
}

/// One catalog entry: name, family, exact order, natural-action degree,
/// and whether the permutation group is materialized (degree <= 64 and a
/// realized construction exists) or kept as metadata.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub family: Family,
    pub order: u64,
    pub degree: u64,
    pub realized: bool,
    pub minimal_simple: bool,
}

/// The §-catalog at desk scale: the realized small members and the
/// metadata-only ones.
pub fn catalog() -> &'static [CatalogEntry] {
    use Family::*;
    const ENTRIES: &[CatalogEntry] = &[
        CatalogEntry {
            name: "PSL2_4",
            family: Psl2TwoPower,
            order: 60,
            degree: 5,
            realized: true,
            minimal_simple: true,
        },
        CatalogEntry {
            name: "PSL2_7",
            family: Psl2Prime,
            order: 168,
            degree: 8,
            realized: true,
            minimal_simple: true,
        },
        CatalogEntry {
            name: "PSL2_8",
            family: Psl2TwoPower,
            order: 504,
            degree: 9,
            realized: true,
            minimal_simple: true,
        },
        CatalogEntry {
            name: "PSL2_13",
            family: Psl2Prime,
            order: 1092,
            degree: 14,
            realized: true,
            minimal_simple: true,
        },
        CatalogEntry {
            name: "PSL2_27",
            family: Psl2ThreePower,
            order: 9828,
            degree: 28,
            realized: false,
            minimal_simple: true,
        },
        CatalogEntry {
            name: "Sz_8",
            family: Suzuki,
            order: 29120,
            degree: 65,
            realized: false,
            minimal_simple: true,
        },
        CatalogEntry {
            name: "PSL3_3",
            family: Psl3Three,
            order: 5616,
            degree: 13,
            realized: false,
            minimal_simple: true,
        },
    ];
    ENTRIES
}

pub fn catalog_lookup(name: &str) -> Option<&'static CatalogEntry> {
    let base = name.split(':').next().unwrap_or(name);
    catalog().iter().find(|e| e.name == base)
}

/// A resolved sequence term: its canonical spec, the realized group when
/// available, and the metadata needed for pre-filters.
#[derive(Clone, Debug)]
pub struct Term {
    pub spec: String,
    pub group: Option<PermGroup>,
    pub order: BigUint,
    pub degree: u64,
    pub transitive: bool,
    pub catalog: Option<&'static CatalogEntry>,
}

/// Resolve a spec string to a term: catalog names first, then the group
/// spec grammar.
pub fn resolve_term(spec: &str) -> Result<Term> {
    if let Some(entry) = catalog_lookup(spec) {
        let group = if entry.realized {
            Some(parse_group_spec(&format!("{}:proj", entry.name))?)
        } else {
            None
        };
        return Ok(Term {
            spec: entry.name.to_string(),
            group,
            order: BigUint::from(entry.order),
            degree: entry.degree,
            transitive: true,
            catalog: Some(entry),
        });
    }
    let group = parse_group_spec(spec)?;
    if group.is_trivial() {
        return Err(Error::TrivialGroup {
            context: "sequence term",
        });
    }
    Ok(Term {
        spec: canonical_spec(spec)?,
        order: group.order(),
        degree: group.degree() as u64,
        transitive: group.is_transitive(),
        catalog: None,
        group: Some(group),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    #[default]
    Cycle,
    Distinct,
}

/// Wire format of a sequence spec file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpecJson {
    #[serde(default)]
    pub prefix: Vec<String>,
    pub tail: Vec<String>,
    #[serde(default)]
    pub tail_mode: TailMode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n0: Option<usize>,
}

/// A resolved sequence: prefix terms, tail terms, and the tail semantics.
#[derive(Clone, Debug)]
pub struct SequenceSpec {
    pub prefix: Vec<Term>,
    pub tail: Vec<Term>,
    pub tail_mode: TailMode,
    pub n0: Option<usize>,
}

impl SequenceSpec {
    pub fn resolve(json: &SequenceSpecJson) -> Result<SequenceSpec> {
        if json.tail.is_empty() {
            return Err(Error::InvalidArgument(
                "the tail must name at least one term".into(),
            ));
        }
        let prefix = json
            .prefix
            .iter()
            .map(|s| resolve_term(s))
            .collect::<Result<Vec<_>>>()?;
        let tail = json
            .tail
            .iter()
            .map(|s| resolve_term(s))
            .collect::<Result<Vec<_>>>()?;
        if json.tail_mode == TailMode::Distinct {
            let all: Vec<&Term> = prefix.iter().chain(tail.iter()).collect();
            for i in 0..all.len() {
                for j in i + 1..all.len() {
                    let equivalent = if all[i].spec == all[j].spec {
                        true
                    } else if let (Some(a), Some(b)) = (&all[i].group, &all[j].group) {
                        actions_equivalent(a, b)?.is_some()
                    } else {
                        false
                    };
                    if equivalent {
                        return Err(Error::InvalidArgument(format!(
                            "distinct mode lists equivalent terms `{}` and `{}`",
                            all[i].spec, all[j].spec
                        )));
                    }
                }
            }
        }
        Ok(SequenceSpec {
            prefix,
            tail,
            tail_mode: json.tail_mode,
            n0: json.n0,
        })
    }

    /// Term at the 1-based index `k`, through the prefix and then the
    /// cyclic tail. Meaningful for `Cycle` tails at every index; for
    /// `Distinct` tails only listed indices exist.
    pub fn term_at(&self, k: usize) -> Option<&Term> {
        if k == 0 {
            return None;
        }
        if k <= self.prefix.len() {
            return Some(&self.prefix[k - 1]);
        }
        match self.tail_mode {
            TailMode::Cycle => Some(&self.tail[(k - self.prefix.len() - 1) % self.tail.len()]),
            TailMode::Distinct => self.tail.get(k - self.prefix.len() - 1),
        }
    }

    pub fn listed_len(&self) -> usize {
        self.prefix.len() + self.tail.len()
    }

    /// Materialize the first `n` terms as permutation groups (possible
    /// only for realized terms).
    pub fn realized_terms(&self, n: usize) -> Result<Vec<PermGroup>> {
        (1..=n)
            .map(|k| {
                let t = self.term_at(k).ok_or_else(|| {
                    Error::InvalidArgument(format!("term {k} is not defined by the spec"))
                })?;
                t.group
                    .clone()
                    .ok_or_else(|| Error::MetadataOnly(t.spec.clone()))
            })
            .collect()
    }
}

/// Can the first term be permutationally isomorphic to a subgroup of the
/// second? `Some(true/false)` when settled, `None` when out of budget or
/// undecidable at metadata level.
pub fn witness_between(a: &Term, b: &Term) -> Result<Option<bool>> {
    use num_integer::Integer;
    if a.spec == b.spec {
        return Ok(Some(true));
    }
    if !b.order.is_multiple_of(&a.order) || a.degree > b.degree {
        return Ok(Some(false));
    }
    // distinct minimal simple groups never contain one another: every
    // proper subgroup of the target is soluble
    if let (Some(ca), Some(cb)) = (a.catalog, b.catalog) {
        if ca.minimal_simple && cb.minimal_simple {
            return Ok(Some(false));
        }
    }
    match (&a.group, &b.group) {
        (Some(ga), Some(gb)) => {
            match perm_iso_to_subgroup_budgeted(ga, gb, DEFAULT_SEARCH_BUDGET) {
                Ok(w) => Ok(Some(w.is_some())),
                Err(Error::BudgetExceeded { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        }
        _ => Ok(None),
    }
}

/// Result of the eventual-subgroup criterion.
#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    /// `Some(true)` / `Some(false)` when settled, `None` when the spec
    /// leaves it undetermined (budget or an undecidable continuation).
    pub holds: Option<bool>,
    /// Threshold from which every term has a later target.
    pub n0: Option<usize>,
    /// For one tail period, `(j, m(j))`: the first later index hosting
    /// term `j`.
    pub witness_map: Vec<(usize, usize)>,
    /// An offending term index when the criterion fails.
    pub counterexample: Option<usize>,
    pub notes: Vec<String>,
}

/// Decide whether the terms are eventually permutationally isomorphic to
/// subgroups of later terms.
///
/// For a cyclic tail every term recurs, so one later occurrence always
/// exists; the work is finding the smallest threshold `n0` and the first
/// later target for each tail term. For a distinct tail the criterion is
/// certified false when every term is minimal non-abelian simple, and is
/// otherwise left undetermined.
pub fn eventually_subgroup_criterion(spec: &SequenceSpec) -> Result<CriterionOutcome> {
    let plen = spec.prefix.len();
    let mut notes = Vec::new();
    match spec.tail_mode {
        TailMode::Cycle => {
            let period = spec.tail.len();
            let mut witness_map = Vec::with_capacity(period);
            for p in 0..period {
                let j = plen + p + 1;
                let mut target = None;
                for k in j + 1..=j + period {
                    match witness_between(spec.term_at(j).unwrap(), spec.term_at(k).unwrap())? {
                        Some(true) => {
                            target = Some(k);
                            break;
                        }
                        Some(false) => {}
                        None => notes.push(format!(
                            "witness search {j} -> {k} exceeded its budget; skipped"
                        )),
                    }
                }
                // the same term recurs one period later, so a target exists
                let k = target.expect("cyclic tails recur");
                witness_map.push((j, k));
            }
            // smallest threshold: scan the prefix for terms with no later
            // target among the remaining prefix plus one full period
            let mut worst_bad = 0usize;
            for j in 1..=plen {
                let mut good = false;
                for k in j + 1..=plen + period {
                    if witness_between(spec.term_at(j).unwrap(), spec.term_at(k).unwrap())?
                        == Some(true)
                    {
                        good = true;
                        break;
                    }
                }
                if !good {
                    worst_bad = j;
                }
            }
            let n0 = (worst_bad + 1).max(1);
            if let Some(user) = spec.n0 {
                if user < n0 {
                    notes.push(format!(
                        "requested n0 = {user} is too small; the smallest valid threshold is {n0}"
                    ));
                }
            }
            Ok(CriterionOutcome {
                holds: Some(true),
                n0: Some(n0.max(spec.n0.unwrap_or(0))),
                witness_map,
                counterexample: None,
                notes,
            })
        }
        TailMode::Distinct => {
            let mut all_minimal = true;
            for (i, term) in spec.prefix.iter().chain(spec.tail.iter()).enumerate() {
                match minimal_simple_filter(term) {
                    Ok(true) => {}
                    Ok(false) => {
                        all_minimal = false;
                        notes.push(format!("term {} is not minimal simple", i + 1));
                    }
                    Err(e) => {
                        all_minimal = false;
                        notes.push(format!("term {} undecided: {e}", i + 1));
                    }
                }
            }
            if all_minimal {
                // pairwise non-equivalent minimal simple terms: no term is
                // ever a subgroup of a later one
                Ok(CriterionOutcome {
                    holds: Some(false),
                    n0: None,
                    witness_map: Vec::new(),
                    counterexample: Some(plen + 1),
                    notes,
                })
            } else {
                notes.push(
                    "distinct continuation is undecidable without the minimal-simple hypothesis"
                        .into(),
                );
                Ok(CriterionOutcome {
                    holds: None,
                    n0: None,
                    witness_map: Vec::new(),
                    counterexample: None,
                    notes,
                })
            }
        }
    }
}

/// Minimal non-abelian simplicity of a term: catalog tag when present,
/// otherwise brute force on the realized group up to the budget.
pub fn minimal_simple_filter(term: &Term) -> Result<bool> {
    if let Some(entry) = term.catalog {
        return Ok(entry.minimal_simple);
    }
    match &term.group {
        Some(g) => {
            if g.order() > BigUint::from(MINIMAL_SIMPLE_BUDGET) {
                return Err(Error::BudgetExceeded {
                    what: format!(
                        "minimal-simplicity of a realized group of order {}",
                        g.order()
                    ),
                });
            }
            minimal_simple_bruteforce(g)
        }
        None => Err(Error::BudgetExceeded {
            what: format!(
                "term {} has neither a catalog tag nor a realization",
                term.spec
            ),
        }),
    }
}

/// Brute force: non-abelian, simple, and every proper two-generated
/// subgroup soluble (two-generated subgroups detect insolubility, so this
/// decides solubility of every proper subgroup).
pub fn minimal_simple_bruteforce(g: &PermGroup) -> Result<bool> {
    if is_abelian(g) || !is_simple_bruteforce(g)? {
        return Ok(false);
    }
    let n = g.elements()?.list.len();
    let reps = conjugacy_class_representatives(g)?;
    let els = g.elements()?;
    let mut checked: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
    for a in reps.iter().filter(|a| !a.is_identity()) {
        for b in els.list.iter().skip(1) {
            let sub = PermGroup::from_generators(g.domain().clone(), vec![a.clone(), b.clone()])?;
            let sub_els = sub.elements()?;
            if sub_els.list.len() == n {
                continue;
            }
            let mut fingerprint: Vec<usize> = sub_els.list.iter().map(|x| els.index[x]).collect();
            fingerprint.sort_unstable();
            if !checked.insert(fingerprint) {
                continue;
            }
            if !is_soluble_bruteforce(&sub)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    NonCoHopfian,
    CoHopfian,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictWitnesses {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n0: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub m: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub offending_term: Option<String>,
}

/// The verdict: the criterion outcome mapped through the two theorems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Which statement justifies it: the self-embedding construction for
    /// non-co-Hopfian, the minimal-simple converse for co-Hopfian.
    pub theorem: Option<String>,
    pub witnesses: VerdictWitnesses,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn decided(&self) -> bool {
        self.outcome != Outcome::Unknown
    }
}

/// Decide co-Hopficity of the infinitely iterated product-action wreath
/// product of the sequence:
/// criterion true gives non-co-Hopfian (with self-embedding witnesses);
/// criterion false plus all terms minimal non-abelian simple gives
/// co-Hopfian; anything else is unknown.
pub fn cohopfian_verdict(spec: &SequenceSpec) -> Result<Verdict> {
    for (i, term) in spec.prefix.iter().chain(spec.tail.iter()).enumerate() {
        if !term.transitive {
            return Err(Error::NonTransitiveTerm { index: i + 1 });
        }
    }
    let criterion = eventually_subgroup_criterion(spec)?;
    match criterion.holds {
        Some(true) => Ok(Verdict {
            outcome: Outcome::NonCoHopfian,
            theorem: Some("C".into()),
            witnesses: VerdictWitnesses {
                n0: criterion.n0,
                m: criterion.witness_map,
                offending_term: None,
            },
            notes: criterion.notes,
        }),
        Some(false) => {
            let all_minimal = spec
                .prefix
                .iter()
                .chain(spec.tail.iter())
                .map(minimal_simple_filter)
                .collect::<Result<Vec<_>>>()
                .map(|v| v.into_iter().all(|b| b));
            match all_minimal {
                Ok(true) => Ok(Verdict {
                    outcome: Outcome::CoHopfian,
                    theorem: Some("D".into()),
                    witnesses: VerdictWitnesses {
                        n0: None,
                        m: Vec::new(),
                        offending_term: criterion
                            .counterexample
                            .and_then(|k| spec.term_at(k).map(|t| t.spec.clone())),
                    },
                    notes: criterion.notes,
                }),
                _ => Ok(Verdict {
                    outcome: Outcome::Unknown,
                    theorem: None,
                    witnesses: VerdictWitnesses {
                        n0: None,
                        m: Vec::new(),
                        offending_term: None,
                    },
                    notes: criterion.notes,
                }),
            }
        }
        None => Ok(Verdict {
            outcome: Outcome::Unknown,
            theorem: None,
            witnesses: VerdictWitnesses {
                n0: None,
                m: Vec::new(),
                offending_term: None,
            },
            notes: criterion.notes,
        }),
    }
}

/// "Almost all terms occur infinitely often", terms compared up to
/// equivalence of actions. With a cyclic tail every tail term recurs; a
/// distinct tail never repeats a term.
pub fn almost_all_terms_recur(spec: &SequenceSpec) -> Result<bool> {
    match spec.tail_mode {
        TailMode::Cycle => {
            for (i, t) in spec.tail.iter().enumerate() {
                let recurs = spec.tail.iter().any(|u| {
                    if t.spec == u.spec {
                        return true;
                    }
                    match (&t.group, &u.group) {
                        (Some(a), Some(b)) => matches!(actions_equivalent(a, b), Ok(Some(_))),
                        _ => false,
                    }
                });
                if !recurs {
                    // cannot happen: a term is equivalent to itself
                    return Err(Error::InvalidArgument(format!(
                        "tail term {} failed its own recurrence check",
                        i + 1
                    )));
                }
            }
            Ok(true)
        }
        TailMode::Distinct => Ok(false),
    }
}

/// Greedy index map over the realized terms of the spec, as used by the
/// self-embedding: `m(j)` is the smallest admissible later index.
pub fn greedy_map_for_spec(spec: &SequenceSpec, n: usize) -> Result<Vec<usize>> {
    let mut m = Vec::with_capacity(n);
    let mut prev = 0usize;
    let horizon = spec.prefix.len() + 2 * spec.tail.len() + n + 1;
    for j in 1..=n {
        let start = j.max(prev) + 1;
        let mut found = None;
        for k in start..=horizon {
            let (a, b) = match (spec.term_at(j), spec.term_at(k)) {
                (Some(a), Some(b)) => (a, b),
                _ => break,
            };
            if witness_between(a, b)? == Some(true) {
                found = Some(k);
                break;
            }
        }
        let k = found.ok_or(Error::MissingWitness { term: j, target: 0 })?;
        m.push(k);
        prev = k;
    }
    Ok(m)
}

/// The block sequence `X_1; X_1,X_2; X_1,X_2,X_3; ...` truncated to
/// `length` terms; for a finite class the block growth caps at the class
/// size, which keeps every word over the class a subsequence.
pub fn universal_sequence(reps: &[String], length: usize) -> Result<Vec<String>> {
    if reps.is_empty() {
        return Err(Error::InvalidArgument(
            "the representative list must be non-empty".into(),
        ));
    }
    let mut seen = std::collections::HashSet::new();
    for r in reps {
        if !seen.insert(r) {
            return Err(Error::InvalidArgument(format!(
                "representative `{r}` is listed twice"
            )));
        }
    }
    let mut out = Vec::with_capacity(length);
    let mut block_len = 1usize;
    while out.len() < length {
        for r in reps.iter().take(block_len) {
            if out.len() == length {
                break;
            }
            out.push(r.clone());
        }
        if block_len < reps.len() {
            block_len += 1;
        }
    }
    Ok(out)
}

/// True when `word` is a subsequence of `seq`.
pub fn is_subsequence(word: &[String], seq: &[String]) -> bool {
    let mut it = seq.iter();
    word.iter().all(|w| it.any(|s| s == w))
}
