//! Wreath products in imprimitive and product action, and their iterated
//! towers.
//!
//! Elements are stored structurally as (base function, top element) pairs,
//! never as flat permutations, so towers whose degree explodes stay
//! usable. Flattening to an explicit permutation group is an opt-in with a
//! materialization cap.
//!
//! Tower indexing follows the defining recursion: an `ia` tower over
//! `(S_1,..,S_n)` is `S_n wr (S_{n-1} wr (... S_1))` acting on
//! `Omega_n x ... x Omega_1`; a `pa` tower over `(S_0,..,S_{n-1})` is
//! `S_{n-1} pwr (... S_0)` acting on the function space built from the
//! right. Term lists are always given innermost-first, i.e. in type order
//! `(S_1,..,S_n)` resp. `(S_0,..,S_{n-1})`.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{Domain, Perm};

/// Default cap on materialized domains (flattening, point tables).
pub const DEFAULT_MATERIALIZATION_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WreathKind {
    Imprimitive,
    ProductAction,
}

impl WreathKind {
    pub fn short(&self) -> &'static str {
        match self {
            WreathKind::Imprimitive => "ia",
            WreathKind::ProductAction => "pa",
        }
    }

    pub fn parse(s: &str) -> Result<WreathKind> {
        match s {
            "ia" => Ok(WreathKind::Imprimitive),
            "pa" => Ok(WreathKind::ProductAction),
            _ => Err(Error::Parse(format!("unknown wreath kind `{s}`"))),
        }
    }
}

impl fmt::Display for WreathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

/// A point of a tower domain.
///
/// Imprimitive levels are pairs (bottom point, lower point); product
/// action levels are functions from the lower domain to the bottom
/// domain, stored as the value vector over the canonical order of the
/// lower domain.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TowerPoint {
    Point(u32),
    Pair(u32, Box<TowerPoint>),
    Func(Vec<u32>),
}

impl fmt::Debug for TowerPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerPoint::Point(p) => write!(f, "{p}"),
            TowerPoint::Pair(w, rest) => write!(f, "({w},{rest:?})"),
            TowerPoint::Func(vals) => {
                write!(f, "[")?;
                for (i, v) in vals.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// A structured element of a tower: a plain permutation at a leaf, or a
/// (base function, top element) pair at a wreath level. The base function
/// is total on the top group's domain, stored over its canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TowerElement {
    Perm(Perm),
    Wreath {
        base: Vec<Perm>,
        top: Box<TowerElement>,
    },
}

impl TowerElement {
    pub fn wreath(base: Vec<Perm>, top: TowerElement) -> TowerElement {
        TowerElement::Wreath {
            base,
            top: Box::new(top),
        }
    }

    /// The top component of a wreath-level element.
    pub fn top(&self) -> Result<&TowerElement> {
        match self {
            TowerElement::Wreath { top, .. } => Ok(top),
            TowerElement::Perm(_) => Err(Error::InvalidArgument(
                "leaf elements have no top component".into(),
            )),
        }
    }

    pub fn base(&self) -> Result<&[Perm]> {
        match self {
            TowerElement::Wreath { base, .. } => Ok(base),
            TowerElement::Perm(_) => Err(Error::InvalidArgument(
                "leaf elements have no base component".into(),
            )),
        }
    }
}

/// Materialized point table of a domain.
#[derive(Debug)]
pub struct PointTable {
    pub points: Vec<TowerPoint>,
    pub index: HashMap<TowerPoint, usize>,
}

/// A wreath product `bottom wr top` (imprimitive) or `bottom pwr top`
/// (product action), where the top may itself be a tower.
#[derive(Debug)]
pub struct WreathGroup {
    kind: WreathKind,
    bottom: PermGroup,
    top: Tower,
    level: usize,
    degree: BigUint,
    order: BigUint,
    top_table: OnceLock<Option<PointTable>>,
}

impl Clone for WreathGroup {
    fn clone(&self) -> Self {
        WreathGroup {
            kind: self.kind,
            bottom: self.bottom.clone(),
            top: self.top.clone(),
            level: self.level,
            degree: self.degree.clone(),
            order: self.order.clone(),
            top_table: OnceLock::new(),
        }
    }
}

impl PartialEq for WreathGroup {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.bottom == other.bottom && self.top == other.top
    }
}
impl Eq for WreathGroup {}

/// A tower: a plain permutation group at level 1, or a wreath product
/// whose top is the next level down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tower {
    Leaf(PermGroup),
    Node(Box<WreathGroup>),
}

/// The imprimitive wreath product `bottom wr top` on
/// `Omega x (top domain)`. Both factors must be non-trivial.
pub fn wreath_imprimitive(bottom: PermGroup, top: Tower) -> Result<WreathGroup> {
    WreathGroup::new(WreathKind::Imprimitive, bottom, top)
}

/// The product-action wreath product `bottom pwr top` on the function
/// space `Omega^(top domain)`. Both factors must be non-trivial.
pub fn wreath_product_action(bottom: PermGroup, top: Tower) -> Result<WreathGroup> {
    WreathGroup::new(WreathKind::ProductAction, bottom, top)
}

/// The n-th iterated wreath product over the first `n` terms of `seq`,
/// innermost-first: `ia` consumes `(S_1,..,S_n)`, `pa` consumes
/// `(S_0,..,S_{n-1})`.
pub fn tower(kind: WreathKind, seq: &[PermGroup], n: usize) -> Result<Tower> {
    if n == 0 || seq.is_empty() {
        return Err(Error::InvalidArgument(
            "tower needs at least one level".into(),
        ));
    }
    if n > seq.len() {
        return Err(Error::LevelOutOfRange {
            level: n,
            len: seq.len(),
        });
    }
    for g in &seq[..n] {
        if g.is_trivial() {
            return Err(Error::TrivialGroup {
                context: "tower term",
            });
        }
    }
    let mut t = Tower::Leaf(seq[0].clone());
    for term in &seq[1..n] {
        t = Tower::Node(Box::new(WreathGroup::new(kind, term.clone(), t)?));
    }
    Ok(t)
}

impl WreathGroup {
    fn new(kind: WreathKind, bottom: PermGroup, top: Tower) -> Result<WreathGroup> {
        if bottom.is_trivial() {
            return Err(Error::TrivialGroup {
                context: "wreath bottom group",
            });
        }
        if top.is_trivial() {
            return Err(Error::TrivialGroup {
                context: "wreath top group",
            });
        }
        let top_degree = top.degree();
        let exp = top_degree.to_u32().ok_or_else(|| Error::CapExceeded {
            what: "top domain size as an exponent".into(),
            size: top_degree.to_string(),
            cap: u32::MAX as usize,
        })?;
        let bdeg = BigUint::from(bottom.degree());
        let degree = match kind {
            WreathKind::Imprimitive => &bdeg * &top_degree,
            WreathKind::ProductAction => bdeg.pow(exp),
        };
        let order = bottom.order().pow(exp) * top.order();
        let level = top.level() + 1;
        Ok(WreathGroup {
            kind,
            bottom,
            top,
            level,
            degree,
            order,
            top_table: OnceLock::new(),
        })
    }

    pub fn kind(&self) -> WreathKind {
        self.kind
    }
    pub fn bottom(&self) -> &PermGroup {
        &self.bottom
    }
    pub fn top(&self) -> &Tower {
        &self.top
    }
    pub fn level(&self) -> usize {
        self.level
    }
    pub fn degree(&self) -> &BigUint {
        &self.degree
    }
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// Order of the base group, the kernel of the projection to the top.
    pub fn base_order(&self) -> BigUint {
        let exp = self.top.degree().to_u32().unwrap();
        self.bottom.order().pow(exp)
    }

    /// The materialized top domain, capped.
    pub fn top_table(&self) -> Result<&PointTable> {
        self.top_table
            .get_or_init(|| {
                let pts = self.top.points(DEFAULT_MATERIALIZATION_CAP).ok()?;
                let index = pts
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(i, p)| (p, i))
                    .collect();
                Some(PointTable { points: pts, index })
            })
            .as_ref()
            .ok_or_else(|| Error::CapExceeded {
                what: "top domain materialization".into(),
                size: self.top.degree().to_string(),
                cap: DEFAULT_MATERIALIZATION_CAP,
            })
    }

    /// Number of points of the top domain, as usize (cap-guarded).
    pub fn top_degree_usize(&self) -> Result<usize> {
        self.top
            .degree()
            .to_usize()
            .ok_or_else(|| Error::CapExceeded {
                what: "top domain size".into(),
                size: self.top.degree().to_string(),
                cap: usize::MAX,
            })
    }

    /// The quotient map killing the base group.
    pub fn project_to_top(&self, el: &TowerElement) -> Result<TowerElement> {
        match el {
            TowerElement::Wreath { top, .. } => Ok((**top).clone()),
            TowerElement::Perm(_) => Err(Error::InvalidArgument(
                "flat element does not belong to a wreath group".into(),
            )),
        }
    }
}

impl Tower {
    pub fn leaf(group: PermGroup) -> Tower {
        Tower::Leaf(group)
    }

    pub fn kind(&self) -> Option<WreathKind> {
        match self {
            Tower::Leaf(_) => None,
            Tower::Node(w) => Some(w.kind()),
        }
    }

    pub fn as_node(&self) -> Result<&WreathGroup> {
        match self {
            Tower::Node(w) => Ok(w),
            Tower::Leaf(_) => Err(Error::InvalidArgument(
                "tower has a single level, no wreath structure".into(),
            )),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            Tower::Leaf(g) => g.is_trivial(),
            Tower::Node(_) => false,
        }
    }

    pub fn level(&self) -> usize {
        match self {
            Tower::Leaf(_) => 1,
            Tower::Node(w) => w.level(),
        }
    }

    pub fn degree(&self) -> BigUint {
        match self {
            Tower::Leaf(g) => BigUint::from(g.degree()),
            Tower::Node(w) => w.degree().clone(),
        }
    }

    pub fn degree_usize(&self) -> Result<usize> {
        self.degree().to_usize().ok_or_else(|| Error::CapExceeded {
            what: "tower degree".into(),
            size: self.degree().to_string(),
            cap: usize::MAX,
        })
    }

    pub fn order(&self) -> BigUint {
        match self {
            Tower::Leaf(g) => g.order(),
            Tower::Node(w) => w.order().clone(),
        }
    }

    /// Transitivity from the structure: an ia product is transitive iff
    /// both factors are, a pa product iff the bottom is.
    pub fn is_transitive(&self) -> bool {
        match self {
            Tower::Leaf(g) => g.is_transitive(),
            Tower::Node(w) => match w.kind() {
                WreathKind::Imprimitive => w.bottom().is_transitive() && w.top().is_transitive(),
                WreathKind::ProductAction => w.bottom().is_transitive(),
            },
        }
    }

    pub fn identity(&self) -> TowerElement {
        match self {
            Tower::Leaf(g) => TowerElement::Perm(g.identity()),
            Tower::Node(w) => {
                let m = w
                    .top_degree_usize()
                    .expect("identity needs a top domain size");
                TowerElement::wreath(vec![w.bottom().identity(); m], w.top().identity())
            }
        }
    }

    /// Structural generators: for a wreath level, one generator per
    /// (bottom generator, top point) in the base, followed by the top
    /// group's generators lifted with identity base.
    pub fn generators(&self) -> Result<Vec<TowerElement>> {
        match self {
            Tower::Leaf(g) => Ok(g
                .generators()
                .iter()
                .cloned()
                .map(TowerElement::Perm)
                .collect()),
            Tower::Node(w) => {
                let m = w.top_degree_usize()?;
                let mut gens = Vec::new();
                for s in w.bottom().generators() {
                    for i in 0..m {
                        let mut base = vec![w.bottom().identity(); m];
                        base[i] = s.clone();
                        gens.push(TowerElement::wreath(base, w.top().identity()));
                    }
                }
                for t in w.top().generators()? {
                    gens.push(TowerElement::wreath(vec![w.bottom().identity(); m], t));
                }
                Ok(gens)
            }
        }
    }

    /// Image of a point under an element, evaluated recursively without
    /// materializing the ambient domain.
    pub fn act(&self, el: &TowerElement, pt: &TowerPoint) -> Result<TowerPoint> {
        match (self, el, pt) {
            (Tower::Leaf(_), TowerElement::Perm(p), TowerPoint::Point(x)) => {
                Ok(TowerPoint::Point(p.apply(*x as usize) as u32))
            }
            (Tower::Node(w), TowerElement::Wreath { base, top }, pt) => match (w.kind(), pt) {
                (WreathKind::Imprimitive, TowerPoint::Pair(omega, rest)) => {
                    let table = w.top_table()?;
                    let idx = *table.index.get(rest).ok_or_else(|| {
                        Error::InvalidArgument("point does not belong to the tower".into())
                    })?;
                    let new_omega = base[idx].apply(*omega as usize) as u32;
                    let new_rest = w.top().act(top, rest)?;
                    Ok(TowerPoint::Pair(new_omega, Box::new(new_rest)))
                }
                (WreathKind::ProductAction, TowerPoint::Func(vals)) => {
                    let m = w.top_degree_usize()?;
                    if vals.len() != m || base.len() != m {
                        return Err(Error::InvalidArgument(
                            "point/element shape does not match the tower".into(),
                        ));
                    }
                    // f'(tau) = f(tau^{g^-1})^{s_{tau^:g^-1}}
                    let tii = w.top_inverse_indices(top)?;
                    let new_vals = (0..m)
                        .map(|i| {
                            let j = tii[i];
                            base[j].apply(vals[j] as usize) as u32
                        })
                        .collect();
                    Ok(TowerPoint::Func(new_vals))
                }
                _ => Err(Error::InvalidArgument(
                    "point shape does not match the tower kind".into(),
                )),
            },
            _ => Err(Error::InvalidArgument(
                "element does not belong to this tower".into(),
            )),
        }
    }

    /// Compose two elements; `x^(a.b) = (x^a)^b`.
    pub fn compose(&self, a: &TowerElement, b: &TowerElement) -> Result<TowerElement> {
        match (self, a, b) {
            (Tower::Leaf(_), TowerElement::Perm(p), TowerElement::Perm(q)) => {
                Ok(TowerElement::Perm(p.then(q)))
            }
            (
                Tower::Node(w),
                TowerElement::Wreath { base: ab, top: at },
                TowerElement::Wreath { base: bb, top: bt },
            ) => {
                let table = w.top_table()?;
                let m = ab.len();
                let mut base = Vec::with_capacity(m);
                for i in 0..m {
                    let moved = w.top().act(at, &table.points[i])?;
                    let j = table.index[&moved];
                    base.push(ab[i].then(&bb[j]));
                }
                let top = w.top().compose(at, bt)?;
                Ok(TowerElement::wreath(base, top))
            }
            _ => Err(Error::InvalidArgument(
                "elements do not belong to this tower".into(),
            )),
        }
    }

    pub fn inverse(&self, a: &TowerElement) -> Result<TowerElement> {
        match (self, a) {
            (Tower::Leaf(_), TowerElement::Perm(p)) => Ok(TowerElement::Perm(p.inverse())),
            (Tower::Node(w), TowerElement::Wreath { base, top }) => {
                let tii = w.top_inverse_indices(top)?;
                let m = base.len();
                let inv_base = (0..m).map(|i| base[tii[i]].inverse()).collect();
                let inv_top = w.top().inverse(top)?;
                Ok(TowerElement::wreath(inv_base, inv_top))
            }
            _ => Err(Error::InvalidArgument(
                "element does not belong to this tower".into(),
            )),
        }
    }

    /// All points of the tower's own domain in canonical order:
    /// bottom-major pairs for ia levels, lexicographic value vectors for
    /// pa levels.
    pub fn points(&self, cap: usize) -> Result<Vec<TowerPoint>> {
        let degree = self
            .degree()
            .to_usize()
            .filter(|&d| d <= cap)
            .ok_or_else(|| Error::CapExceeded {
                what: "domain materialization".into(),
                size: self.degree().to_string(),
                cap,
            })?;
        Ok((0..degree)
            .map(|i| self.point_from_index(i).expect("index in range"))
            .collect())
    }

    /// The canonical point with a given index, computed by digit
    /// decomposition; no materialization needed.
    pub fn point_from_index(&self, idx: usize) -> Result<TowerPoint> {
        match self {
            Tower::Leaf(g) => {
                if idx >= g.degree() {
                    return Err(Error::PointOutOfRange {
                        point: idx,
                        size: g.degree(),
                    });
                }
                Ok(TowerPoint::Point(idx as u32))
            }
            Tower::Node(w) => {
                let m = w.top_degree_usize()?;
                let b = w.bottom().degree();
                match w.kind() {
                    WreathKind::Imprimitive => {
                        let omega = idx / m;
                        if omega >= b {
                            return Err(Error::PointOutOfRange {
                                point: idx,
                                size: b * m,
                            });
                        }
                        let rest = w.top().point_from_index(idx % m)?;
                        Ok(TowerPoint::Pair(omega as u32, Box::new(rest)))
                    }
                    WreathKind::ProductAction => {
                        let mut vals = vec![0u32; m];
                        let mut rem = idx;
                        for i in (0..m).rev() {
                            vals[i] = (rem % b) as u32;
                            rem /= b;
                        }
                        if rem != 0 {
                            return Err(Error::PointOutOfRange {
                                point: idx,
                                size: 0,
                            });
                        }
                        Ok(TowerPoint::Func(vals))
                    }
                }
            }
        }
    }

    /// Canonical index of a point (the inverse of `point_from_index`).
    pub fn point_index(&self, pt: &TowerPoint) -> Result<usize> {
        match (self, pt) {
            (Tower::Leaf(_), TowerPoint::Point(x)) => Ok(*x as usize),
            (Tower::Node(w), pt) => {
                let m = w.top_degree_usize()?;
                let b = w.bottom().degree();
                match (w.kind(), pt) {
                    (WreathKind::Imprimitive, TowerPoint::Pair(omega, rest)) => {
                        Ok(*omega as usize * m + w.top().point_index(rest)?)
                    }
                    (WreathKind::ProductAction, TowerPoint::Func(vals)) => {
                        let mut idx: usize = 0;
                        for &v in vals {
                            idx = idx
                                .checked_mul(b)
                                .and_then(|x| x.checked_add(v as usize))
                                .ok_or_else(|| Error::CapExceeded {
                                    what: "point index".into(),
                                    size: self.degree().to_string(),
                                    cap: usize::MAX,
                                })?;
                        }
                        Ok(idx)
                    }
                    _ => Err(Error::InvalidArgument(
                        "point shape does not match the tower kind".into(),
                    )),
                }
            }
            _ => Err(Error::InvalidArgument(
                "point does not belong to this tower".into(),
            )),
        }
    }

    /// Flat image list of an element over the canonical point order.
    pub fn flat_images(&self, el: &TowerElement, cap: usize) -> Result<Vec<usize>> {
        match (self, el) {
            (Tower::Leaf(_), TowerElement::Perm(p)) => Ok(p.images().to_vec()),
            (Tower::Node(w), TowerElement::Wreath { base, top }) => {
                let degree = self
                    .degree()
                    .to_usize()
                    .filter(|&d| d <= cap)
                    .ok_or_else(|| Error::CapExceeded {
                        what: "flattening".into(),
                        size: self.degree().to_string(),
                        cap,
                    })?;
                let m = w.top_degree_usize()?;
                let b = w.bottom().degree();
                match w.kind() {
                    WreathKind::Imprimitive => {
                        let top_flat = w.top().flat_images(top, cap)?;
                        let mut images = vec![0usize; degree];
                        for omega in 0..b {
                            for e in 0..m {
                                images[omega * m + e] = base[e].apply(omega) * m + top_flat[e];
                            }
                        }
                        Ok(images)
                    }
                    WreathKind::ProductAction => {
                        let tii = w.top_inverse_indices(top)?;
                        let mut images = vec![0usize; degree];
                        let mut digits = vec![0usize; m];
                        for (idx, image) in images.iter_mut().enumerate() {
                            let mut out: usize = 0;
                            for &j in &tii {
                                out = out * b + base[j].apply(digits[j]);
                            }
                            *image = out;
                            // increment the big-endian digit counter
                            if idx + 1 < degree {
                                let mut i = m;
                                loop {
                                    i -= 1;
                                    digits[i] += 1;
                                    if digits[i] < b {
                                        break;
                                    }
                                    digits[i] = 0;
                                }
                            }
                        }
                        Ok(images)
                    }
                }
            }
            _ => Err(Error::InvalidArgument(
                "element does not belong to this tower".into(),
            )),
        }
    }

    /// Flatten the tower to an explicit permutation group on the
    /// enumerated domain. The order is carried over from the structural
    /// formula.
    pub fn flatten(&self, cap: usize) -> Result<PermGroup> {
        match self {
            Tower::Leaf(g) => Ok(g.clone()),
            Tower::Node(_) => {
                let degree = self
                    .degree()
                    .to_usize()
                    .filter(|&d| d <= cap)
                    .ok_or_else(|| Error::CapExceeded {
                        what: "flattening".into(),
                        size: self.degree().to_string(),
                        cap,
                    })?;
                let mut gens = Vec::new();
                for el in self.generators()? {
                    gens.push(Perm::from_images(self.flat_images(&el, cap)?)?);
                }
                PermGroup::with_known_order(Domain::plain(degree), gens, self.order())
            }
        }
    }

    /// All structured elements, top-major, capped by total count.
    pub fn elements(&self, cap: usize) -> Result<Vec<TowerElement>> {
        match self {
            Tower::Leaf(g) => Ok(g
                .elements()?
                .list
                .iter()
                .cloned()
                .map(TowerElement::Perm)
                .collect()),
            Tower::Node(w) => {
                let total = self
                    .order()
                    .to_usize()
                    .filter(|&n| n <= cap)
                    .ok_or_else(|| Error::CapExceeded {
                        what: "element enumeration".into(),
                        size: self.order().to_string(),
                        cap,
                    })?;
                let m = w.top_degree_usize()?;
                let bottom_els = &w.bottom().elements()?.list;
                let bn = bottom_els.len();
                let top_els = w.top().elements(cap)?;
                let mut out = Vec::with_capacity(total);
                for top_el in &top_els {
                    let mut digits = vec![0usize; m];
                    loop {
                        let base: Vec<Perm> =
                            digits.iter().map(|&d| bottom_els[d].clone()).collect();
                        out.push(TowerElement::wreath(base, top_el.clone()));
                        let mut i = m;
                        loop {
                            if i == 0 {
                                digits.clear();
                                break;
                            }
                            i -= 1;
                            digits[i] += 1;
                            if digits[i] < bn {
                                break;
                            }
                            digits[i] = 0;
                        }
                        if digits.is_empty() {
                            break;
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Decompose a flat permutation of the tower domain into a structured
    /// element, for imprimitive towers. Fails with `NotAMember` when the
    /// permutation does not respect the wreath structure.
    pub fn decompose_flat(&self, perm: &Perm) -> Result<TowerElement> {
        match self {
            Tower::Leaf(g) => {
                if !g.contains(perm)? {
                    return Err(Error::NotAMember(perm.to_cycle_string()));
                }
                Ok(TowerElement::Perm(perm.clone()))
            }
            Tower::Node(w) => {
                if w.kind() != WreathKind::Imprimitive {
                    return Err(Error::InvalidArgument(
                        "decomposition is implemented for imprimitive towers".into(),
                    ));
                }
                let m = w.top_degree_usize()?;
                let b = w.bottom().degree();
                if perm.degree() != b * m {
                    return Err(Error::DomainMismatch {
                        expected: b * m,
                        got: perm.degree(),
                    });
                }
                let mut top_images = vec![0usize; m];
                let mut base = Vec::with_capacity(m);
                for e in 0..m {
                    let first = perm.apply(e);
                    top_images[e] = first % m;
                    let mut fibre = vec![0usize; b];
                    for (omega, slot) in fibre.iter_mut().enumerate() {
                        let img = perm.apply(omega * m + e);
                        if img % m != top_images[e] {
                            return Err(Error::NotAMember(format!(
                                "fibre over {e} is not mapped to a single fibre"
                            )));
                        }
                        *slot = img / m;
                    }
                    let fibre_perm = Perm::from_images(fibre)
                        .map_err(|_| Error::NotAMember("fibre map is not a bijection".into()))?;
                    if !w.bottom().contains(&fibre_perm)? {
                        return Err(Error::NotAMember(format!(
                            "fibre action {fibre_perm} lies outside the bottom group"
                        )));
                    }
                    base.push(fibre_perm);
                }
                let top_perm = Perm::from_images(top_images)
                    .map_err(|_| Error::NotAMember("top map is not a bijection".into()))?;
                let top = w.top().decompose_flat(&top_perm)?;
                Ok(TowerElement::wreath(base, top))
            }
        }
    }
}

impl WreathGroup {
    /// For each top point index `i`, the index of `point_i ^ (top^-1)`.
    fn top_inverse_indices(&self, top_el: &TowerElement) -> Result<Vec<usize>> {
        let table = self.top_table()?;
        let inv = self.top.inverse(top_el)?;
        let mut tii = Vec::with_capacity(table.points.len());
        for pt in &table.points {
            let moved = self.top.act(&inv, pt)?;
            tii.push(table.index[&moved]);
        }
        Ok(tii)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupspec::parse_group_spec;

    fn c2() -> PermGroup {
        parse_group_spec("C2:reg").unwrap()
    }
    fn c3() -> PermGroup {
        parse_group_spec("C3:reg").unwrap()
    }

    #[test]
    fn imprimitive_c3_by_c2() {
        let w = wreath_imprimitive(c3(), Tower::Leaf(c2())).unwrap();
        assert_eq!(w.degree(), &BigUint::from(6u32));
        assert_eq!(w.order(), &BigUint::from(18u32));
        let t = Tower::Node(Box::new(w));
        let flat = t.flatten(1000).unwrap();
        assert!(flat.is_transitive());
        // faithful: the flat group really has 18 elements
        assert_eq!(
            flat.order_via_enumeration(1000).unwrap(),
            BigUint::from(18u32)
        );
    }

    #[test]
    fn imprimitive_c2_by_c2_is_dihedral() {
        let w = wreath_imprimitive(c2(), Tower::Leaf(c2())).unwrap();
        assert_eq!(w.degree(), &BigUint::from(4u32));
        assert_eq!(w.order(), &BigUint::from(8u32));
        let flat = Tower::Node(Box::new(w)).flatten(1000).unwrap();
        assert_eq!(
            flat.order_via_enumeration(1000).unwrap(),
            BigUint::from(8u32)
        );
        // contains a 4-cycle, as the dihedral group of order 8 does
        let els = flat.elements().unwrap();
        assert!(els.list.iter().any(|p| p.order() == 4));
    }

    #[test]
    fn trivial_factor_is_rejected() {
        let triv = PermGroup::trivial(2);
        assert!(wreath_imprimitive(c2(), Tower::Leaf(triv.clone())).is_err());
        assert!(wreath_imprimitive(triv, Tower::Leaf(c2())).is_err());
    }

    #[test]
    fn product_action_c2_by_c2() {
        let w = wreath_product_action(c2(), Tower::Leaf(c2())).unwrap();
        assert_eq!(w.degree(), &BigUint::from(4u32));
        assert_eq!(w.order(), &BigUint::from(8u32));
        let t = Tower::Node(Box::new(w));
        assert!(t.is_transitive());
        let flat = t.flatten(1000).unwrap();
        assert_eq!(
            flat.order_via_enumeration(1000).unwrap(),
            BigUint::from(8u32)
        );
    }

    #[test]
    fn product_action_with_intransitive_top() {
        let g = PermGroup::from_generators(
            Domain::plain(4),
            vec![Perm::parse("(0 1)(2 3)", 4).unwrap()],
        )
        .unwrap();
        let w = wreath_product_action(c2(), Tower::Leaf(g)).unwrap();
        assert_eq!(w.degree(), &BigUint::from(16u32));
        assert_eq!(w.order(), &BigUint::from(32u32));
        let flat = Tower::Node(Box::new(w)).flatten(1000).unwrap();
        assert_eq!(
            flat.order_via_enumeration(1000).unwrap(),
            BigUint::from(32u32)
        );
    }

    #[test]
    fn pa_tower_of_three_c2() {
        let seq = vec![c2(), c2(), c2()];
        let t = tower(WreathKind::ProductAction, &seq, 3).unwrap();
        assert_eq!(t.degree(), BigUint::from(16u32));
        assert_eq!(t.order(), BigUint::from(128u32));
        assert_eq!(t.level(), 3);
        let flat = t.flatten(1000).unwrap();
        assert_eq!(
            flat.order_via_enumeration(1000).unwrap(),
            BigUint::from(128u32)
        );
    }

    #[test]
    fn ia_tower_of_three_c2() {
        let seq = vec![c2(), c2(), c2()];
        let t = tower(WreathKind::Imprimitive, &seq, 3).unwrap();
        assert_eq!(t.degree(), BigUint::from(8u32));
        assert_eq!(t.order(), BigUint::from(128u32));
    }

    #[test]
    fn pa_tower_mixed_terms() {
        let seq = vec![c2(), c3(), c2()];
        let t = tower(WreathKind::ProductAction, &seq, 3).unwrap();
        assert_eq!(t.degree(), BigUint::from(512u32));
        assert_eq!(t.order(), BigUint::from(9216u32));
        // spot-check the degree-512 action: a generator acts as a bijection
        let gens = t.generators().unwrap();
        let x = t.point_from_index(17).unwrap();
        let y = t.act(&gens[0], &x).unwrap();
        assert!(t.point_index(&y).unwrap() < 512);
    }

    #[test]
    fn identity_fixes_everything() {
        let t = tower(WreathKind::ProductAction, &[c2(), c2()], 2).unwrap();
        let id = t.identity();
        for pt in t.points(100).unwrap() {
            assert_eq!(t.act(&id, &pt).unwrap(), pt);
        }
    }

    #[test]
    fn base_and_top_action_formulas() {
        // pa with S = C2, G = C2: base (s_0=(0 1), s_1=id) sends (a,b) to (a+1, b)
        let t = tower(WreathKind::ProductAction, &[c2(), c2()], 2).unwrap();
        let s = Perm::parse("(0 1)", 2).unwrap();
        let id2 = Perm::identity(2);
        let base_el = TowerElement::wreath(
            vec![s.clone(), id2.clone()],
            TowerElement::Perm(id2.clone()),
        );
        for (a, b) in [(0u32, 0u32), (0, 1), (1, 0), (1, 1)] {
            let img = t.act(&base_el, &TowerPoint::Func(vec![a, b])).unwrap();
            assert_eq!(img, TowerPoint::Func(vec![(a + 1) % 2, b]));
        }
        // top element (0 1) swaps the two coordinates
        let top_el = TowerElement::wreath(vec![id2.clone(), id2.clone()], TowerElement::Perm(s));
        for (a, b) in [(0u32, 1u32), (1, 0), (1, 1)] {
            let img = t.act(&top_el, &TowerPoint::Func(vec![a, b])).unwrap();
            assert_eq!(img, TowerPoint::Func(vec![b, a]));
        }
    }

    #[test]
    fn composition_matches_action_exhaustively() {
        let t = tower(WreathKind::ProductAction, &[c2(), c2()], 2).unwrap();
        let els = t.elements(100).unwrap();
        assert_eq!(els.len(), 8);
        let pts = t.points(100).unwrap();
        for a in &els {
            for b in &els {
                let ab = t.compose(a, b).unwrap();
                for x in &pts {
                    let lhs = t.act(&ab, x).unwrap();
                    let rhs = t.act(b, &t.act(a, x).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
            let inv = t.inverse(a).unwrap();
            assert_eq!(t.compose(a, &inv).unwrap(), t.identity());
            assert_eq!(t.compose(&inv, a).unwrap(), t.identity());
        }
    }

    #[test]
    fn base_only_products_stay_base_only() {
        let t = tower(WreathKind::ProductAction, &[c2(), c2()], 2).unwrap();
        let s = Perm::parse("(0 1)", 2).unwrap();
        let id2 = Perm::identity(2);
        let a = TowerElement::wreath(
            vec![s.clone(), id2.clone()],
            TowerElement::Perm(id2.clone()),
        );
        let b = TowerElement::wreath(
            vec![id2.clone(), s.clone()],
            TowerElement::Perm(id2.clone()),
        );
        let ab = t.compose(&a, &b).unwrap();
        match &ab {
            TowerElement::Wreath { base, top } => {
                assert_eq!(base, &vec![s.clone(), s.clone()]);
                assert_eq!(**top, TowerElement::Perm(id2));
            }
            _ => panic!("expected wreath element"),
        }
    }

    #[test]
    fn projection_is_a_homomorphism_with_right_kernel() {
        let t = tower(WreathKind::ProductAction, &[c2(), c2(), c2()], 3).unwrap();
        let w = t.as_node().unwrap();
        let els = t.elements(200).unwrap();
        assert_eq!(els.len(), 128);
        // homomorphism on all pairs of generators
        let gens = t.generators().unwrap();
        for a in &gens {
            for b in &gens {
                let lhs = w.project_to_top(&t.compose(a, b).unwrap()).unwrap();
                let rhs = w
                    .top()
                    .compose(&w.project_to_top(a).unwrap(), &w.project_to_top(b).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        // kernel size: base-only elements, |S|^{top degree} = 2^4 = 16
        let ker = els
            .iter()
            .filter(|el| w.project_to_top(el).unwrap() == w.top().identity())
            .count();
        assert_eq!(ker, 16);
        assert_eq!(w.base_order(), BigUint::from(16u32));
        // base-only element projects to the identity, top part survives
        let some_top = w.top().generators().unwrap()[0].clone();
        let lifted = TowerElement::wreath(
            vec![w.bottom().identity(); w.top_degree_usize().unwrap()],
            some_top.clone(),
        );
        assert_eq!(w.project_to_top(&lifted).unwrap(), some_top);
    }

    #[test]
    fn flatten_respects_cap() {
        // degree 2^16 = 65536 is within the default cap
        let seq = vec![c2(), c2(), c2(), c2()];
        let t = tower(WreathKind::ProductAction, &seq, 4).unwrap();
        assert_eq!(t.degree(), BigUint::from(65536u32));
        let flat = t.flatten(DEFAULT_MATERIALIZATION_CAP).unwrap();
        assert_eq!(flat.degree(), 65536);
        assert_eq!(flat.order(), BigUint::from(1u32 << 23));

        // degree 3^16 is not
        let seq = vec![c2(), c2(), c2(), c3()];
        let t = tower(WreathKind::ProductAction, &seq, 4).unwrap();
        assert_eq!(t.degree(), BigUint::from(43046721u64));
        match t.flatten(DEFAULT_MATERIALIZATION_CAP) {
            Err(Error::CapExceeded { .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn decompose_round_trips() {
        let seq = vec![c2(), c3()];
        let t = tower(WreathKind::Imprimitive, &seq, 2).unwrap();
        let flat = t.flatten(1000).unwrap();
        for g in flat.generators() {
            let el = t.decompose_flat(g).unwrap();
            let back = Perm::from_images(t.flat_images(&el, 1000).unwrap()).unwrap();
            assert_eq!(&back, g);
        }
        // a permutation that breaks the block structure is rejected
        let bad = Perm::parse("(0 1)", 6).unwrap();
        assert!(t.decompose_flat(&bad).is_err());
    }

    #[test]
    fn diagonal_base_elements_preserve_constants() {
        // all base coordinates equal: constant functions map to constants
        let t = tower(WreathKind::ProductAction, &[c2(), c3()], 2).unwrap();
        let s = Perm::parse("(0 1 2)", 3).unwrap();
        let diag = TowerElement::wreath(
            vec![s.clone(), s.clone()],
            TowerElement::Perm(Perm::identity(2)),
        );
        for omega in 0..3u32 {
            let img = t.act(&diag, &TowerPoint::Func(vec![omega, omega])).unwrap();
            let expected = s.apply(omega as usize) as u32;
            assert_eq!(img, TowerPoint::Func(vec![expected, expected]));
        }
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let t = tower(WreathKind::ProductAction, &[c2(), c2()], 2).unwrap();
        let leaf_el = TowerElement::Perm(Perm::identity(4));
        let pt = TowerPoint::Func(vec![0, 0]);
        assert!(t.act(&leaf_el, &pt).is_err());
        let el = t.identity();
        assert!(t.act(&el, &TowerPoint::Point(0)).is_err());
        assert!(t.compose(&el, &leaf_el).is_err());
    }

    #[test]
    fn level_by_level_degrees_match_the_table() {
        let seq = vec![c2(), c2(), c2(), c2(), c2()];
        let mut degrees = Vec::new();
        let mut orders = Vec::new();
        for n in 1..=5 {
            let t = tower(WreathKind::ProductAction, &seq, n).unwrap();
            degrees.push(t.degree());
            orders.push(t.order());
        }
        assert_eq!(
            degrees,
            vec![
                BigUint::from(2u32),
                BigUint::from(4u32),
                BigUint::from(16u32),
                BigUint::from(65536u32),
                BigUint::from(2u32).pow(65536),
            ]
        );
        assert_eq!(
            orders[..4].to_vec(),
            vec![
                BigUint::from(2u32),
                BigUint::from(8u32),
                BigUint::from(128u32),
                BigUint::from(1u32 << 23),
            ]
        );
        assert_eq!(orders[4], BigUint::from(2u32).pow(65536 + 23));
    }
}
