//! Group-spec strings and the standard constructions behind them.
//!
//! Grammar: `C<n>:reg` (cyclic, regular), `S<n>:nat`, `A<n>:nat`,
//! `PSL2_<q>:proj` (projective line over GF(q), degree q+1). The `:reg` /
//! `:nat` / `:proj` suffix is part of the canonical form; bare `C<n>`,
//! `S<n>`, `A<n>`, `PSL2_<q>` are accepted on input.

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{Domain, Perm};

/// Parse a group-spec string into a permutation group.
pub fn parse_group_spec(spec: &str) -> Result<PermGroup> {
    let (name, action) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (spec.trim(), None),
    };
    if let Some(n) = name.strip_prefix("PSL2_") {
        if !matches!(action, None | Some("proj")) {
            return Err(Error::UnknownSpec(spec.to_string()));
        }
        let q: u32 = n
            .parse()
            .map_err(|_| Error::UnknownSpec(spec.to_string()))?;
        return psl2(q);
    }
    if name.len() < 2 || !name.is_char_boundary(1) {
        return Err(Error::UnknownSpec(spec.to_string()));
    }
    let (kind, n) = name.split_at(1);
    let n: usize = n
        .parse()
        .map_err(|_| Error::UnknownSpec(spec.to_string()))?;
    match (kind, action) {
        ("C", None | Some("reg")) => cyclic_regular(n),
        ("S", None | Some("nat")) => symmetric_natural(n),
        ("A", None | Some("nat")) => alternating_natural(n),
        _ => Err(Error::UnknownSpec(spec.to_string())),
    }
}

/// Canonical form of a spec string (adds the action suffix).
pub fn canonical_spec(spec: &str) -> Result<String> {
    let (name, _) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (spec.trim(), None),
    };
    parse_group_spec(spec)?;
    if name.starts_with("PSL2_") {
        Ok(format!("{name}:proj"))
    } else if name.starts_with('C') {
        Ok(format!("{name}:reg"))
    } else {
        Ok(format!("{name}:nat"))
    }
}

/// The cyclic group of order `n` in its right regular action.
pub fn cyclic_regular(n: usize) -> Result<PermGroup> {
    if n == 0 {
        return Err(Error::InvalidArgument("C0 is empty".into()));
    }
    let gen = Perm::from_images((0..n).map(|i| (i + 1) % n).collect())?;
    PermGroup::from_generators(Domain::plain(n), vec![gen])
}

/// `Sym(n)` in its natural action, generated by `(0 1)` and an n-cycle.
pub fn symmetric_natural(n: usize) -> Result<PermGroup> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("S{n} is trivial")));
    }
    let t = Perm::from_cycles(&[vec![0, 1]], n)?;
    let c = Perm::from_images((0..n).map(|i| (i + 1) % n).collect())?;
    let gens = if n == 2 { vec![t] } else { vec![t, c] };
    PermGroup::from_generators(Domain::plain(n), gens)
}

/// `Alt(n)` in its natural action.
pub fn alternating_natural(n: usize) -> Result<PermGroup> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("A{n} is trivial")));
    }
    let three = Perm::from_cycles(&[vec![0, 1, 2]], n)?;
    let gens = if n == 3 {
        vec![three]
    } else if n % 2 == 1 {
        let c = Perm::from_images((0..n).map(|i| (i + 1) % n).collect())?;
        vec![three, c]
    } else {
        // even n: the n-cycle is odd, rotate the last n-1 points instead
        let mut images: Vec<usize> = (0..n).collect();
        for i in 1..n {
            images[i] = if i == n - 1 { 1 } else { i + 1 };
        }
        vec![three, Perm::from_images(images)?]
    };
    PermGroup::from_generators(Domain::plain(n), gens)
}

/// Arithmetic in GF(q) for the small fields the catalog realizes.
/// Elements are indices `0..q`; for prime powers `p^f` the index encodes
/// the coefficient vector of a polynomial residue, least significant
/// digit first.
struct Gf {
    q: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
}

impl Gf {
    fn new(q: u32) -> Result<Gf> {
        let (p, f) = factor_prime_power(q)
            .ok_or_else(|| Error::InvalidArgument(format!("{q} is not a prime power")))?;
        let reduction: &[u32] = match (p, f) {
            (_, 1) => &[],
            (2, 2) => &[1, 1],    // x^2 = x + 1
            (2, 3) => &[1, 1, 0], // x^3 = x + 1
            (3, 2) => &[1, 0],    // x^2 = 1  ... not irreducible; fixed below
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "GF({q}) is outside the realized catalog range"
                )))
            }
        };
        // x^2 + 1 is irreducible over GF(3): x^2 = -1 = 2
        let reduction: Vec<u32> = if (p, f) == (3, 2) {
            vec![2, 0]
        } else {
            reduction.to_vec()
        };
        let digits = |mut x: u32| -> Vec<u32> {
            let mut d = vec![0u32; f as usize];
            for slot in d.iter_mut() {
                *slot = x % p;
                x /= p;
            }
            d
        };
        let undigits = |d: &[u32]| -> u32 { d.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let mut add = vec![0u32; (q * q) as usize];
        let mut mul = vec![0u32; (q * q) as usize];
        for a in 0..q {
            for b in 0..q {
                let da = digits(a);
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&sum);
                // schoolbook product, reduced by the defining polynomial
                let mut prod = vec![0u32; 2 * f as usize];
                for (i, &x) in da.iter().enumerate() {
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for k in (f as usize..2 * f as usize).rev() {
                    let c = prod[k];
                    if c != 0 {
                        prod[k] = 0;
                        for (i, &r) in reduction.iter().enumerate() {
                            prod[k - f as usize + i] = (prod[k - f as usize + i] + c * r) % p;
                        }
                    }
                }
                mul[(a * q + b) as usize] = undigits(&prod[..f as usize]);
            }
        }
        Ok(Gf { q, add, mul })
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize]
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }
    fn neg(&self, a: u32) -> u32 {
        (0..self.q).find(|&b| self.add(a, b) == 0).unwrap()
    }
    fn inv(&self, a: u32) -> u32 {
        (1..self.q).find(|&b| self.mul(a, b) == 1).unwrap()
    }
    fn mult_order(&self, a: u32) -> u32 {
        let mut x = a;
        let mut n = 1;
        while x != 1 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }
    fn primitive_element(&self) -> u32 {
        (2..self.q)
            .chain(std::iter::once(1).filter(|_| self.q == 2))
            .find(|&a| self.mult_order(a) == self.q - 1)
            .unwrap_or(1)
    }
}

fn factor_prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
    let mut rest = q;
    let mut f = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        f += 1;
    }
    (rest == 1).then_some((p, f))
}

/// PSL2(q) acting on the projective line over GF(q): points `0..q` are
/// the field elements, point `q` is infinity. Generated by x -> x+1,
/// x -> s·x for s a generating square, and x -> -1/x.
pub fn psl2(q: u32) -> Result<PermGroup> {
    let gf = Gf::new(q)?;
    let inf = q as usize;
    let degree = q as usize + 1;
    let translate = Perm::from_images(
        (0..degree)
            .map(|x| {
                if x == inf {
                    inf
                } else {
                    gf.add(x as u32, 1) as usize
                }
            })
            .collect(),
    )?;
    let g = gf.primitive_element();
    let s = if q.is_multiple_of(2) { g } else { gf.mul(g, g) };
    let scale = Perm::from_images(
        (0..degree)
            .map(|x| {
                if x == inf {
                    inf
                } else {
                    gf.mul(x as u32, s) as usize
                }
            })
            .collect(),
    )?;
    let invert = Perm::from_images(
        (0..degree)
            .map(|x| {
                if x == inf {
                    0
                } else if x == 0 {
                    inf
                } else {
                    gf.neg(gf.inv(x as u32)) as usize
                }
            })
            .collect(),
    )?;
    let mut labels: Vec<String> = (0..q).map(|x| x.to_string()).collect();
    labels.push("inf".into());
    PermGroup::from_generators(Domain::with_labels(labels)?, vec![translate, scale, invert])
}

/// |PSL2(q)| = q(q^2-1)/gcd(2, q-1).
pub fn psl2_order(q: u64) -> u64 {
    let raw = q * (q * q - 1);
    if q.is_multiple_of(2) {
        raw
    } else {
        raw / 2
    }
}
