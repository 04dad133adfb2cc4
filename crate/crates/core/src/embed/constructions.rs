//! The explicit embedding constructions between wreath products.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::equiv::perm_iso_to_subgroup;
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Perm;
use crate::wreath::{
    tower, wreath_imprimitive, wreath_product_action, Tower, TowerElement, TowerPoint, WreathKind,
    DEFAULT_MATERIALIZATION_CAP,
};

use super::{compose_degree_one, PEmbedding};

/// Cap on the total number of points materialized in a gamma table.
pub const GAMMA_CAP: usize = 1_000_000;

/// Mixed-radix counter over the given digit bases.
struct Odometer {
    digits: Vec<usize>,
    bases: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl Odometer {
    fn new(bases: Vec<usize>) -> Odometer {
        let done = bases.contains(&0);
        Odometer {
            digits: vec![0; bases.len()],
            bases,
            fresh: true,
            done,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(&self.digits);
        }
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.bases[i] {
                break;
            }
            self.digits[i] = 0;
        }
        Some(&self.digits)
    }
}

fn leaf_group(t: &Tower) -> Result<&PermGroup> {
    match t {
        Tower::Leaf(g) => Ok(g),
        Tower::Node(_) => Err(Error::InvalidArgument(
            "expected a plain permutation group, found a wreath tower".into(),
        )),
    }
}

/// Lift a P-embedding of degree `r >= 2` of `H` into `G` to a P-embedding
/// of the imprimitive product `S wr H` into the product-action wreath
/// product `S pwr G`.
///
/// The image degree is
/// `|Omega|^(|Sigma| - r|Delta|) * (|Omega|^r - |Omega|)^(|Delta| - 1)`;
/// the image of a point `(omega, eps)` is the set of functions constant
/// `omega` on `Gamma(eps)` and non-constant on every other `Gamma(delta)`.
pub fn pembed_wreath(e: &PEmbedding, s: &PermGroup) -> Result<PEmbedding> {
    if e.degree < 2 {
        return Err(Error::DegreeRejected {
            degree: e.degree.to_string(),
            reason: "the wreath lift needs an input embedding of degree at least 2".into(),
        });
    }
    if s.is_trivial() {
        return Err(Error::TrivialGroup {
            context: "wreath lift bottom group",
        });
    }
    if e.source.is_trivial() {
        return Err(Error::TrivialGroup {
            context: "wreath lift source",
        });
    }
    let sigma = e.target.degree_usize()?;
    let delta = e.source.degree();
    let r = e.degree as usize;
    if r * delta > sigma {
        return Err(Error::InvalidArgument(format!(
            "gamma needs {r}*{delta} points but the target domain has only {sigma}"
        )));
    }

    let v = wreath_imprimitive(s.clone(), e.source_tower.clone())?;
    let w = wreath_product_action(s.clone(), e.target.clone())?;
    let w_top_identity = e.target.identity();

    // gamma of the input as sorted target indices
    let mut gamma_idx: Vec<Vec<usize>> = Vec::with_capacity(delta);
    for set in &e.gamma {
        let mut idx = set
            .iter()
            .map(|p| e.target.point_index(p))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        gamma_idx.push(idx);
    }
    let mut covered = vec![false; sigma];
    for set in &gamma_idx {
        for &i in set {
            covered[i] = true;
        }
    }
    let free: Vec<usize> = (0..sigma).filter(|&i| !covered[i]).collect();

    // generator images, in the structural generator order of S wr H
    let omega = s.degree();
    let s_id = s.identity();
    let mut iota_gens = Vec::new();
    for sg in s.generators() {
        for eps in 0..delta {
            let mut base = vec![s_id.clone(); sigma];
            for &i in &gamma_idx[eps] {
                base[i] = sg.clone();
            }
            iota_gens.push(TowerElement::wreath(base, w_top_identity.clone()));
        }
    }
    for (j, _) in e.source_tower.generators()?.iter().enumerate() {
        iota_gens.push(TowerElement::wreath(
            vec![s_id.clone(); sigma],
            e.iota_gens[j].clone(),
        ));
    }

    // the lifted degree
    let big_omega = BigUint::from(omega);
    let nonconst_count = big_omega.pow(r as u32) - &big_omega;
    let r_hat_big = big_omega.pow(free.len() as u32) * nonconst_count.pow(delta as u32 - 1);
    let phi_count = omega * delta;
    let total = &r_hat_big * BigUint::from(phi_count);
    if total > BigUint::from(GAMMA_CAP) {
        return Err(Error::CapExceeded {
            what: "gamma materialization of the wreath lift".into(),
            size: total.to_string(),
            cap: GAMMA_CAP,
        });
    }
    let r_hat = r_hat_big.to_u64().expect("within cap");
    debug_assert!(r_hat >= 2);

    // all non-constant value tuples of length r over Omega, in lex order
    let mut nonconst: Vec<Vec<usize>> = Vec::new();
    let mut odo = Odometer::new(vec![omega; r]);
    while let Some(tuple) = odo.next() {
        if tuple.iter().any(|&x| x != tuple[0]) {
            nonconst.push(tuple.to_vec());
        }
    }

    let mut gamma: Vec<Vec<TowerPoint>> = Vec::with_capacity(phi_count);
    for phi in 0..phi_count {
        let om = phi / delta;
        let eps = phi % delta;
        let others: Vec<usize> = (0..delta).filter(|&d| d != eps).collect();
        let mut set = Vec::with_capacity(r_hat as usize);
        let mut bases = vec![nonconst.len(); others.len()];
        bases.extend(std::iter::repeat_n(omega, free.len()));
        let mut odo = Odometer::new(bases);
        while let Some(digits) = odo.next() {
            let mut vals = vec![0u32; sigma];
            for &i in &gamma_idx[eps] {
                vals[i] = om as u32;
            }
            for (k, &d) in others.iter().enumerate() {
                let tuple = &nonconst[digits[k]];
                for (t, &i) in gamma_idx[d].iter().enumerate() {
                    vals[i] = tuple[t] as u32;
                }
            }
            for (k, &i) in free.iter().enumerate() {
                vals[i] = digits[others.len() + k] as u32;
            }
            set.push(TowerPoint::Func(vals));
        }
        set.sort();
        gamma.push(set);
    }

    let source_tower = Tower::Node(Box::new(v));
    let source = source_tower.flatten(DEFAULT_MATERIALIZATION_CAP)?;
    Ok(PEmbedding {
        source,
        source_tower,
        target: Tower::Node(Box::new(w)),
        degree: r_hat,
        iota_gens,
        gamma,
    })
}

#[derive(Clone, Debug)]
pub struct LevelCompatibility {
    pub level: usize,
    pub checked_elements: usize,
    pub ok: bool,
}

/// The level-by-level embedding of the imprimitive tower over
/// `(S_1,..,S_n)` into the product-action tower over `(S_0,..,S_n)`,
/// together with the projection-compatibility witnesses between
/// consecutive levels.
#[derive(Clone, Debug)]
pub struct IaIntoPa {
    pub levels: Vec<PEmbedding>,
    pub compatibility: Vec<LevelCompatibility>,
}

impl IaIntoPa {
    pub fn top(&self) -> &PEmbedding {
        self.levels.last().expect("at least one level")
    }
}

/// Base case: `S_1` into `S_1 pwr S_0` via functions pinned at the first
/// point of `Omega_0`, of degree `|Omega_1|^(|Omega_0|-1)`.
fn ia_into_pa_base(s0: &PermGroup, s1: &PermGroup) -> Result<PEmbedding> {
    let m0 = s0.degree();
    let o1 = s1.degree();
    let target_node = wreath_product_action(s1.clone(), Tower::Leaf(s0.clone()))?;
    let target = Tower::Node(Box::new(target_node));
    let degree_big = BigUint::from(o1).pow(m0 as u32 - 1);
    let degree = degree_big.to_u64().ok_or_else(|| Error::CapExceeded {
        what: "base-case gamma".into(),
        size: degree_big.to_string(),
        cap: GAMMA_CAP,
    })?;
    if degree < 2 {
        return Err(Error::DegreeRejected {
            degree: degree.to_string(),
            reason: "base case of the tower embedding must have degree at least 2".into(),
        });
    }
    if (degree as usize).saturating_mul(o1) > GAMMA_CAP {
        return Err(Error::CapExceeded {
            what: "base-case gamma".into(),
            size: (degree as usize * o1).to_string(),
            cap: GAMMA_CAP,
        });
    }
    let iota_gens = s1
        .generators()
        .iter()
        .map(|g| TowerElement::wreath(vec![g.clone(); m0], TowerElement::Perm(s0.identity())))
        .collect();
    let mut gamma = Vec::with_capacity(o1);
    for omega in 0..o1 {
        let mut set = Vec::with_capacity(degree as usize);
        let mut odo = Odometer::new(vec![o1; m0 - 1]);
        while let Some(digits) = odo.next() {
            let mut vals = vec![omega as u32];
            vals.extend(digits.iter().map(|&d| d as u32));
            set.push(TowerPoint::Func(vals));
        }
        set.sort();
        gamma.push(set);
    }
    Ok(PEmbedding {
        source: s1.clone(),
        source_tower: Tower::Leaf(s1.clone()),
        target,
        degree,
        iota_gens,
        gamma,
    })
}

/// Check that the top-group projections intertwine a level embedding with
/// the one below it, on every source element.
fn projection_compatibility(
    upper: &PEmbedding,
    lower: &PEmbedding,
    level: usize,
) -> Result<LevelCompatibility> {
    let (upper_table, _) = upper.iota_table()?;
    let (lower_table, _) = lower.iota_table()?;
    let source_node = upper.source_tower.as_node()?;
    let target_node = upper.target.as_node()?;
    let lower_els = lower.source.elements()?;
    let els = upper.source.elements()?;
    let mut ok = true;
    for (i, flat) in els.list.iter().enumerate() {
        let lhs = target_node.project_to_top(&upper_table[i])?;
        let structured = upper.source_tower.decompose_flat(flat)?;
        let top_structured = source_node.project_to_top(&structured)?;
        let top_flat = Perm::from_images(
            source_node
                .top()
                .flat_images(&top_structured, DEFAULT_MATERIALIZATION_CAP)?,
        )?;
        let rhs = &lower_table[lower_els.index[&top_flat]];
        if &lhs != rhs {
            ok = false;
            break;
        }
    }
    Ok(LevelCompatibility {
        level,
        checked_elements: els.list.len(),
        ok,
    })
}

/// Iterate the wreath lift up a tower: embeds the imprimitive tower over
/// `(S_1,..,S_n)` into the product-action tower over `(S_0,..,S_n)`,
/// recording for each step the witness that projecting to the top groups
/// commutes with the embeddings.
pub fn ia_into_pa(seq: &[PermGroup], n: usize) -> Result<IaIntoPa> {
    if n == 0 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    if seq.len() < n + 1 {
        return Err(Error::LevelOutOfRange {
            level: n,
            len: seq.len().saturating_sub(1),
        });
    }
    for g in &seq[..=n] {
        if g.is_trivial() {
            return Err(Error::TrivialGroup {
                context: "tower term",
            });
        }
    }
    let mut levels = vec![ia_into_pa_base(&seq[0], &seq[1])?];
    let mut compatibility = Vec::new();
    for k in 2..=n {
        let next = pembed_wreath(levels.last().unwrap(), &seq[k])?;
        compatibility.push(projection_compatibility(&next, levels.last().unwrap(), k)?);
        levels.push(next);
    }
    Ok(IaIntoPa {
        levels,
        compatibility,
    })
}

/// Lift two degree-1 witnesses `H_1 -> G_1` (plain groups) and
/// `H_2 -> G_2` (towers allowed) to a degree-1 embedding of
/// `H_1 pwr H_2` into `G_1 pwr G_2`. Points off the image of the top
/// witness are padded with the first point of `Omega_1`.
pub fn perm_iso_wreath(w1: &PEmbedding, w2: &PEmbedding) -> Result<PEmbedding> {
    if w1.degree != 1 || w2.degree != 1 {
        return Err(Error::DegreeRejected {
            degree: format!("{}, {}", w1.degree, w2.degree),
            reason: "both input witnesses must have degree 1".into(),
        });
    }
    let h1 = leaf_group(&w1.source_tower)?;
    let g1 = leaf_group(&w1.target)?;
    for (g, ctx) in [
        (w1.source.is_trivial(), "bottom witness source"),
        (g1.is_trivial(), "bottom witness target"),
        (w2.source.is_trivial(), "top witness source"),
        (w2.target.is_trivial(), "top witness target"),
    ] {
        if g {
            return Err(Error::TrivialGroup { context: ctx });
        }
    }

    let v = wreath_product_action(h1.clone(), w2.source_tower.clone())?;
    let w = wreath_product_action(g1.clone(), w2.target.clone())?;

    let m2 = w2.source.degree();
    let o2 = w2.target.degree_usize()?;
    let gamma2_idx = w2
        .gamma
        .iter()
        .map(|set| w2.target.point_index(&set[0]))
        .collect::<Result<Vec<_>>>()?;
    let gamma1_pt: Vec<u32> = w1
        .gamma
        .iter()
        .map(|set| match &set[0] {
            TowerPoint::Point(x) => Ok(*x),
            _ => Err(Error::InvalidArgument(
                "bottom witness must map points to plain points".into(),
            )),
        })
        .collect::<Result<Vec<_>>>()?;
    let iota1: Vec<&Perm> = w1
        .iota_gens
        .iter()
        .map(|el| match el {
            TowerElement::Perm(p) => Ok(p),
            _ => Err(Error::InvalidArgument(
                "bottom witness images must be plain permutations".into(),
            )),
        })
        .collect::<Result<Vec<_>>>()?;

    let g1_id = g1.identity();
    let w_top_identity = w2.target.identity();
    let mut iota_gens = Vec::new();
    for (si, _) in h1.generators().iter().enumerate() {
        for i in 0..m2 {
            let mut base = vec![g1_id.clone(); o2];
            base[gamma2_idx[i]] = iota1[si].clone();
            iota_gens.push(TowerElement::wreath(base, w_top_identity.clone()));
        }
    }
    for (j, _) in w2.source_tower.generators()?.iter().enumerate() {
        iota_gens.push(TowerElement::wreath(
            vec![g1_id.clone(); o2],
            w2.iota_gens[j].clone(),
        ));
    }

    let source_tower = Tower::Node(Box::new(v));
    let source = source_tower.flatten(DEFAULT_MATERIALIZATION_CAP)?;
    let alpha = 0u32; // first point of Omega_1
    let mut gamma = Vec::with_capacity(source.degree());
    for idx in 0..source.degree() {
        let pt = source_tower.point_from_index(idx)?;
        let fvals = match &pt {
            TowerPoint::Func(vals) => vals,
            _ => unreachable!("product-action points are functions"),
        };
        let mut out = vec![alpha; o2];
        for i in 0..m2 {
            out[gamma2_idx[i]] = gamma1_pt[fvals[i] as usize];
        }
        gamma.push(vec![TowerPoint::Func(out)]);
    }

    Ok(PEmbedding {
        source,
        source_tower,
        target: Tower::Node(Box::new(w)),
        degree: 1,
        iota_gens,
        gamma,
    })
}

/// Insert a middle factor: a degree-1 embedding of `H pwr G` into
/// `H pwr (K pwr G)`, identifying the top groups. Internally `G` is
/// P-embedded into `K pwr G` with degree `|Psi| - 1` via the functions
/// that take the first point of `Psi` at one coordinate and a constant
/// other value elsewhere.
pub fn insert_middle(h: &PermGroup, k: &PermGroup, g: &Tower) -> Result<PEmbedding> {
    for (t, ctx) in [
        (h.is_trivial(), "middle-insertion bottom group"),
        (k.is_trivial(), "middle-insertion inserted group"),
        (g.is_trivial(), "middle-insertion top group"),
    ] {
        if t {
            return Err(Error::TrivialGroup { context: ctx });
        }
    }
    let v = wreath_product_action(h.clone(), g.clone())?;
    let u = wreath_product_action(k.clone(), g.clone())?;
    let u_tower = Tower::Node(Box::new(u));
    let w = wreath_product_action(h.clone(), u_tower.clone())?;

    let og = g.degree_usize()?;
    let psi = k.degree();
    let u_deg = u_tower.degree_usize()?;
    if u_deg > DEFAULT_MATERIALIZATION_CAP {
        return Err(Error::CapExceeded {
            what: "middle-insertion base group index".into(),
            size: u_deg.to_string(),
            cap: DEFAULT_MATERIALIZATION_CAP,
        });
    }

    // inner gamma: Gamma(omega) = { f : f(omega) = psi_0, f constant != psi_0 elsewhere }
    let mut inner: Vec<Vec<usize>> = Vec::with_capacity(og);
    for om in 0..og {
        let mut set = Vec::with_capacity(psi - 1);
        for c in 1..psi {
            let mut vals = vec![c as u32; og];
            vals[om] = 0;
            set.push(u_tower.point_index(&TowerPoint::Func(vals))?);
        }
        inner.push(set);
    }

    let h_id = h.identity();
    let k_id = k.identity();
    let mut iota_gens = Vec::new();
    for hg in h.generators() {
        for om in 0..og {
            let mut base = vec![h_id.clone(); u_deg];
            for &i in &inner[om] {
                base[i] = hg.clone();
            }
            iota_gens.push(TowerElement::wreath(base, u_tower.identity()));
        }
    }
    for t in g.generators()? {
        let u_el = TowerElement::wreath(vec![k_id.clone(); og], t);
        iota_gens.push(TowerElement::wreath(vec![h_id.clone(); u_deg], u_el));
    }

    let source_tower = Tower::Node(Box::new(v));
    let source = source_tower.flatten(DEFAULT_MATERIALIZATION_CAP)?;
    let alpha = 0u32; // first point of Delta
    let mut gamma = Vec::with_capacity(source.degree());
    for idx in 0..source.degree() {
        let pt = source_tower.point_from_index(idx)?;
        let fvals = match &pt {
            TowerPoint::Func(vals) => vals,
            _ => unreachable!("product-action points are functions"),
        };
        let mut out = vec![alpha; u_deg];
        for om in 0..og {
            for &i in &inner[om] {
                out[i] = fvals[om];
            }
        }
        gamma.push(vec![TowerPoint::Func(out)]);
    }

    Ok(PEmbedding {
        source,
        source_tower,
        target: Tower::Node(Box::new(w)),
        degree: 1,
        iota_gens,
        gamma,
    })
}

/// Diagonal embedding of the l-th term into the l-level product-action
/// tower, acting on constant functions. For `l = 1` this is the identity.
fn diagonal_into_tower(seq: &[PermGroup], l: usize) -> Result<PEmbedding> {
    let s = &seq[l - 1];
    if l == 1 {
        return Ok(PEmbedding::identity(s));
    }
    let below = tower(WreathKind::ProductAction, &seq[..l - 1], l - 1)?;
    let m = below.degree_usize()?;
    let node = wreath_product_action(s.clone(), below.clone())?;
    let target = Tower::Node(Box::new(node));
    let iota_gens = s
        .generators()
        .iter()
        .map(|g| TowerElement::wreath(vec![g.clone(); m], below.identity()))
        .collect();
    let gamma = (0..s.degree())
        .map(|omega| vec![TowerPoint::Func(vec![omega as u32; m])])
        .collect();
    Ok(PEmbedding {
        source: s.clone(),
        source_tower: Tower::Leaf(s.clone()),
        target,
        degree: 1,
        iota_gens,
        gamma,
    })
}

/// One induction step: lift the running embedding by the bottom witness,
/// then insert the skipped middle terms one at a time.
fn lift_step(
    seq: &[PermGroup],
    bottom_witness: &PEmbedding,
    e: PEmbedding,
    prev_m: usize,
    next_m: usize,
) -> Result<PEmbedding> {
    let mut out = perm_iso_wreath(bottom_witness, &e)?;
    let h = leaf_group(&bottom_witness.target)?;
    for l in prev_m + 1..next_m {
        let below = tower(WreathKind::ProductAction, &seq[..l - 1], l - 1)?;
        let step = insert_middle(h, &seq[l - 1], &below)?;
        out = compose_degree_one(&out, &step)?;
    }
    Ok(out)
}

fn validate_index_map(m: &[usize], n: usize, len: usize) -> Result<()> {
    if n == 0 || m.len() < n {
        return Err(Error::BadIndexMap(format!(
            "need {n} indices, got {}",
            m.len()
        )));
    }
    if m[0] < 1 {
        return Err(Error::BadIndexMap("indices are 1-based".into()));
    }
    for j in 1..n {
        if m[j] <= m[j - 1] {
            return Err(Error::BadIndexMap(format!(
                "m({}) = {} does not exceed m({}) = {}",
                j + 1,
                m[j],
                j,
                m[j - 1]
            )));
        }
    }
    if m[n - 1] > len {
        return Err(Error::BadIndexMap(format!(
            "m({n}) = {} exceeds the sequence length {len}",
            m[n - 1]
        )));
    }
    Ok(())
}

/// Embed the product-action tower over the subsequence
/// `(S_m(1),..,S_m(n))` into the tower over the full prefix
/// `(S_1,..,S_m(n))`, degree 1.
pub fn subsequence_embed(seq: &[PermGroup], m: &[usize], n: usize) -> Result<PEmbedding> {
    validate_index_map(m, n, seq.len())?;
    let mut e = diagonal_into_tower(seq, m[0])?;
    for j in 1..n {
        let bottom = PEmbedding::identity(&seq[m[j] - 1]);
        e = lift_step(seq, &bottom, e, m[j - 1], m[j])?;
    }
    Ok(e)
}

/// A finite-level self-embedding with its properness certificate.
#[derive(Clone, Debug)]
pub struct SelfEmbedding {
    pub embedding: PEmbedding,
    pub source_order: BigUint,
    pub target_order: BigUint,
    pub proper: bool,
    /// `target_order / source_order`, the index of the image.
    pub index: BigUint,
}

/// Embed the level-n product-action tower over `(S_1,..,S_n)` into the
/// level-m(n) tower over `(S_1,..,S_m(n))`, using for each `j` a degree-1
/// witness of `S_j` into `S_m(j)`. The index map must be strictly
/// increasing and exceed the identity somewhere.
///
/// Witnesses may be supplied; otherwise identity witnesses are used for
/// equal terms and a subgroup search is run for the rest.
pub fn self_embed(
    seq: &[PermGroup],
    n: usize,
    m: &[usize],
    witnesses: Option<Vec<PEmbedding>>,
) -> Result<SelfEmbedding> {
    validate_index_map(m, n, seq.len())?;
    if (0..n).all(|j| m[j] == j + 1) {
        return Err(Error::BadIndexMap(
            "the index map is the identity on the whole range".into(),
        ));
    }
    let witnesses = match witnesses {
        Some(ws) => {
            if ws.len() < n {
                return Err(Error::BadIndexMap(format!(
                    "need {n} witnesses, got {}",
                    ws.len()
                )));
            }
            ws
        }
        None => {
            let mut ws = Vec::with_capacity(n);
            for j in 0..n {
                ws.push(term_witness(seq, j + 1, m[j])?);
            }
            ws
        }
    };
    for (j, wj) in witnesses.iter().take(n).enumerate() {
        if wj.degree != 1 {
            return Err(Error::DegreeRejected {
                degree: wj.degree.to_string(),
                reason: format!("witness {} must have degree 1", j + 1),
            });
        }
        if wj.source != seq[j] || leaf_group(&wj.target)? != &seq[m[j] - 1] {
            return Err(Error::InvalidArgument(format!(
                "witness {} does not map term {} into term {}",
                j + 1,
                j + 1,
                m[j]
            )));
        }
    }

    let mut e = compose_degree_one(&witnesses[0], &diagonal_into_tower(seq, m[0])?)?;
    for j in 1..n {
        e = lift_step(seq, &witnesses[j], e, m[j - 1], m[j])?;
    }
    let source_order = e.source_tower.order();
    let target_order = e.target.order();
    let proper = source_order < target_order;
    let index = &target_order / &source_order;
    Ok(SelfEmbedding {
        embedding: e,
        source_order,
        target_order,
        proper,
        index,
    })
}

/// Witness for one term into a later one: the identity when the terms are
/// equal, otherwise the first subgroup witness found.
pub fn term_witness(seq: &[PermGroup], j: usize, target: usize) -> Result<PEmbedding> {
    let src = &seq[j - 1];
    let dst = &seq[target - 1];
    if src == dst {
        return Ok(PEmbedding::identity(src));
    }
    match perm_iso_to_subgroup(src, dst)? {
        Some(w) => Ok(PEmbedding::from_subgroup_witness(src, dst, &w)),
        None => Err(Error::MissingWitness { term: j, target }),
    }
}

/// Greedy index map: `m(j)` is the smallest index exceeding both `j` and
/// `m(j-1)` whose term admits a witness for term `j`.
pub fn greedy_index_map(seq: &[PermGroup], n: usize) -> Result<Vec<usize>> {
    let mut m = Vec::with_capacity(n);
    let mut prev = 0usize;
    for j in 1..=n {
        let start = j.max(prev) + 1;
        let mut found = None;
        for k in start..=seq.len() {
            if seq[j - 1] == seq[k - 1] || perm_iso_to_subgroup(&seq[j - 1], &seq[k - 1])?.is_some()
            {
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

/// The input instance of the wreath lift built from explicit data: a
/// degree-r embedding given by generator images and a point-to-subset
/// table over plain groups.
pub fn pembedding_from_parts(
    source: &PermGroup,
    target: &PermGroup,
    iota_images: Vec<Perm>,
    gamma_sets: Vec<Vec<usize>>,
    degree: u64,
) -> Result<PEmbedding> {
    if iota_images.len() != source.generators().len() {
        return Err(Error::InvalidArgument(format!(
            "{} generator images for {} generators",
            iota_images.len(),
            source.generators().len()
        )));
    }
    if gamma_sets.len() != source.degree() {
        return Err(Error::InvalidArgument(format!(
            "{} gamma entries for {} source points",
            gamma_sets.len(),
            source.degree()
        )));
    }
    let gamma = gamma_sets
        .into_iter()
        .map(|set| {
            let mut pts = set
                .into_iter()
                .map(|p| {
                    if p < target.degree() {
                        Ok(TowerPoint::Point(p as u32))
                    } else {
                        Err(Error::PointOutOfRange {
                            point: p,
                            size: target.degree(),
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            pts.sort();
            Ok(pts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PEmbedding {
        source: source.clone(),
        source_tower: Tower::Leaf(source.clone()),
        target: Tower::Leaf(target.clone()),
        degree,
        iota_gens: iota_images.into_iter().map(TowerElement::Perm).collect(),
        gamma,
    })
}
