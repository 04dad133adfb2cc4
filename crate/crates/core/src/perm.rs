//! Points, domains and single permutations.
//!
//! Points are `0`-indexed integers internally; a [`Domain`] can carry
//! user-facing labels (for instance the 1-indexed labels of a textbook
//! example) without affecting any arithmetic.

use std::fmt;

use crate::error::{Error, Result};

/// An ordered finite point set. The canonical order of the points is the
/// index order `0..size` and is fixed at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    size: usize,
    labels: Option<Vec<String>>,
}

impl Domain {
    /// A domain of `size` points labelled by their indices.
    pub fn plain(size: usize) -> Self {
        Domain { size, labels: None }
    }

    /// A domain with explicit labels; the labels must be pairwise distinct.
    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::InvalidArgument(format!("duplicate label `{l}`")));
            }
        }
        Ok(Domain {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn label(&self, point: usize) -> String {
        match &self.labels {
            Some(ls) => ls[point].clone(),
            None => point.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Index of a label, if the domain carries labels.
    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        match &self.labels {
            Some(ls) => ls.iter().position(|l| l == label),
            None => label.parse::<usize>().ok().filter(|&p| p < self.size),
        }
    }
}

/// A permutation of `0..degree`, stored by its image list.
///
/// Composition follows the right-action convention used throughout the
/// crate: `x^(a·b) = (x^a)^b`, so [`Perm::then`] applies `self` first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree).collect(),
        }
    }

    /// Build from an image list, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n {
                return Err(Error::PointOutOfRange { point: i, size: n });
            }
            if seen[i] {
                return Err(Error::NotABijection(images.clone()));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    /// Build from a list of cycles over `0..degree`.
    pub fn from_cycles(cycles: &[Vec<usize>], degree: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for &p in cycle {
                if p >= degree {
                    return Err(Error::PointOutOfRange {
                        point: p,
                        size: degree,
                    });
                }
                if touched[p] {
                    return Err(Error::Parse(format!("point {p} repeated across cycles")));
                }
                touched[p] = true;
            }
            for i in 0..cycle.len() {
                images[cycle[i]] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self` followed by `other`: `x^(self.then(other)) = (x^self)^other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Perm { images }
    }

    /// Order of the permutation (lcm of its cycle lengths).
    pub fn order(&self) -> u64 {
        let mut order: u64 = 1;
        for c in self.cycles() {
            order = num_integer::lcm(order, c.len() as u64);
        }
        order
    }

    /// Non-trivial cycles, each starting at its smallest point, sorted by
    /// that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.images[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.images[p];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Sorted cycle-length multiset, the cheap backtracking prune key.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        t.sort_unstable();
        t
    }

    /// Render in cycle notation, `()` for the identity.
    pub fn to_cycle_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        cycles
            .iter()
            .map(|c| {
                let body = c
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                format!("({body})")
            })
            .collect::<String>()
    }

    /// Render in one-line image notation `[1,0,3,2]`.
    pub fn to_oneline_string(&self) -> String {
        format!(
            "[{}]",
            self.images
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }

    /// Parse either cycle notation `(0 1)(2 3)` or one-line notation
    /// `[1,0,3,2]`. Cycle notation needs the ambient degree; one-line
    /// notation carries it and `degree` is checked against it.
    pub fn parse(text: &str, degree: usize) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('[') {
            let p = Self::parse_oneline(t)?;
            if p.degree() != degree {
                return Err(Error::DomainMismatch {
                    expected: degree,
                    got: p.degree(),
                });
            }
            Ok(p)
        } else {
            Self::parse_cycles(t, degree)
        }
    }

    pub fn parse_oneline(text: &str) -> Result<Self> {
        let t = text.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected `[..]`, got `{t}`")))?;
        let images = inner
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad point `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(images)
    }

    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() || t == "()" || t == "id" {
            return Ok(Perm::identity(degree));
        }
        let mut cycles = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            rest = rest.trim_start();
            if rest.is_empty() {
                break;
            }
            if !rest.starts_with('(') {
                return Err(Error::Parse(format!("expected `(` in `{text}`")));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced `(` in `{text}`")))?;
            let body = &rest[1..close];
            let cycle = body
                .split([' ', ','])
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad point `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = &rest[close + 1..];
        }
        Self::from_cycles(&cycles, degree)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cycle_string())
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cycle_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_cycles() {
        let p = Perm::parse("(0 1)(2 3)", 4).unwrap();
        assert_eq!(p.images(), &[1, 0, 3, 2]);
        assert_eq!(p.to_cycle_string(), "(0 1)(2 3)");
        assert_eq!(p.to_oneline_string(), "[1,0,3,2]");
        let q = Perm::parse("[1,0,3,2]", 4).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn identity_prints_as_unit() {
        let id = Perm::identity(3);
        assert_eq!(id.to_cycle_string(), "()");
        assert!(Perm::parse("()", 3).unwrap().is_identity());
    }

    #[test]
    fn compose_follows_right_action() {
        let a = Perm::parse("(0 1)", 3).unwrap();
        let b = Perm::parse("(0 1 2)", 3).unwrap();
        // x^(a·b) = (x^a)^b
        let ab = a.then(&b);
        for x in 0..3 {
            assert_eq!(ab.apply(x), b.apply(a.apply(x)));
        }
        assert_eq!(ab.to_cycle_string(), "(0 2)");
    }

    #[test]
    fn inverse_is_two_sided() {
        let p = Perm::parse("(0 1 2 3 4)", 5).unwrap();
        assert!(p.then(&p.inverse()).is_identity());
        assert!(p.inverse().then(&p).is_identity());
    }

    #[test]
    fn order_is_cycle_lcm() {
        let p = Perm::parse("(0 1)(2 3 4)", 5).unwrap();
        assert_eq!(p.order(), 6);
        assert_eq!(p.cycle_type(), vec![2, 3]);
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
        assert!(Perm::parse("(0 1)(1 2)", 3).is_err());
        assert!(Perm::parse("(0 5)", 3).is_err());
    }

    #[test]
    fn labelled_domain_lookup() {
        let d = Domain::with_labels(vec!["1".into(), "2".into(), "3".into(), "4".into()]).unwrap();
        assert_eq!(d.size(), 4);
        assert_eq!(d.label(2), "3");
        assert_eq!(d.index_of_label("4"), Some(3));
        assert!(Domain::with_labels(vec!["a".into(), "a".into()]).is_err());
    }
}
