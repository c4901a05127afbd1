use std::collections::HashSet;

use super::RingError;

/// Which family a coordinate belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordKind {
    Transverse,
    Leaf,
    Fiber,
}

/// Dimension data shared by every scalar and form built over one roster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    pub transverse: usize,
    pub leaf: usize,
    pub fiber: usize,
}

impl Shape {
    pub fn new(transverse: usize, leaf: usize, fiber: usize) -> Self {
        Shape { transverse, leaf, fiber }
    }

    pub fn torus(&self) -> usize {
        self.transverse + self.leaf
    }

    pub fn total(&self) -> usize {
        self.transverse + self.leaf + self.fiber
    }

    pub fn kind(&self, idx: usize) -> CoordKind {
        if idx < self.transverse {
            CoordKind::Transverse
        } else if idx < self.torus() {
            CoordKind::Leaf
        } else {
            CoordKind::Fiber
        }
    }

    pub fn transverse_range(&self) -> std::ops::Range<usize> {
        0..self.transverse
    }

    pub fn leaf_range(&self) -> std::ops::Range<usize> {
        self.transverse..self.torus()
    }

    pub fn fiber_range(&self) -> std::ops::Range<usize> {
        self.torus()..self.total()
    }

    pub fn base(&self) -> Shape {
        Shape { fiber: 0, ..*self }
    }

    pub fn thickened(&self) -> Shape {
        Shape { fiber: self.leaf, ..*self }
    }
}

/// Named coordinates `(y¹…y^{2k}, q¹…q^{n−k}, p₁…p_{n−k})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateRoster {
    transverse: Vec<String>,
    leaf: Vec<String>,
    fiber: Vec<String>,
}

impl CoordinateRoster {
    pub fn new(transverse: Vec<String>, leaf: Vec<String>, fiber: Vec<String>) -> Result<Self, RingError> {
        let mut seen = HashSet::new();
        for n in transverse.iter().chain(&leaf).chain(&fiber) {
            if !valid_name(n) {
                return Err(RingError::BadName(n.clone()));
            }
            if !seen.insert(n.clone()) {
                return Err(RingError::DuplicateName(n.clone()));
            }
        }
        if !fiber.is_empty() && fiber.len() != leaf.len() {
            return Err(RingError::FiberCount { leaf: leaf.len(), fiber: fiber.len() });
        }
        Ok(CoordinateRoster { transverse, leaf, fiber })
    }

    /// Roster with names `y1…`, `q1…` and optionally `p1…`.
    pub fn standard(transverse: usize, leaf: usize, with_fiber: bool) -> Self {
        let names = |p: &str, n: usize| (1..=n).map(|i| format!("{}{}", p, i)).collect::<Vec<_>>();
        let fiber = if with_fiber { names("p", leaf) } else { Vec::new() };
        CoordinateRoster { transverse: names("y", transverse), leaf: names("q", leaf), fiber }
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.transverse.len(), self.leaf.len(), self.fiber.len())
    }

    pub fn transverse(&self) -> &[String] {
        &self.transverse
    }

    pub fn leaf(&self) -> &[String] {
        &self.leaf
    }

    pub fn fiber(&self) -> &[String] {
        &self.fiber
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.transverse.iter().chain(&self.leaf).chain(&self.fiber)
    }

    pub fn name(&self, idx: usize) -> &str {
        self.names().nth(idx).map(String::as_str).unwrap_or("?")
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, RingError> {
        self.index_of(name).ok_or_else(|| RingError::UnknownCoordinate(name.to_string()))
    }

    /// Same transverse and leaf names, with fiber coordinates `p_<leaf>` appended
    /// (or `p1…` when the leaf names follow the `q<i>` pattern).
    pub fn thickened(&self) -> Self {
        let fiber = self
            .leaf
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let cand = match q.strip_prefix('q') {
                    Some(rest) if !rest.is_empty() => format!("p{}", rest),
                    _ => format!("p_{}", q),
                };
                if self.index_of(&cand).is_some() {
                    format!("p_fiber{}", i + 1)
                } else {
                    cand
                }
            })
            .collect();
        CoordinateRoster { transverse: self.transverse.clone(), leaf: self.leaf.clone(), fiber }
    }

    pub fn base(&self) -> Self {
        CoordinateRoster { transverse: self.transverse.clone(), leaf: self.leaf.clone(), fiber: Vec::new() }
    }
}

fn valid_name(n: &str) -> bool {
    let mut chars = n.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(n, "pi" | "sin" | "cos" | "I")
        && !n.starts_with('d')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_fiber() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert!(CoordinateRoster::new(s(&["y1", "y1"]), vec![], vec![]).is_err());
        assert!(CoordinateRoster::new(s(&["y1", "y2"]), s(&["q1"]), s(&["p1", "p2"])).is_err());
        assert!(CoordinateRoster::new(s(&["dy"]), vec![], vec![]).is_err());
        let r = CoordinateRoster::new(s(&["y1", "y2"]), s(&["q1"]), s(&["p1"])).unwrap();
        assert_eq!(r.index_of("p1"), Some(3));
        assert_eq!(r.shape().kind(2), CoordKind::Leaf);
    }

    #[test]
    fn thickening_names() {
        let r = CoordinateRoster::standard(2, 2, false).thickened();
        assert_eq!(r.fiber(), &["p1".to_string(), "p2".to_string()]);
    }
}
