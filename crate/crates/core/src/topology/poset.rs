//! Finite posets with the Alexandrov (up-set) topology.

use std::collections::BTreeSet;

use crate::Error;

pub type PointSet = BTreeSet<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    names: Vec<String>,
    /// `leq[x][y]` holds when `x ⊑ y`, reflexive-transitive.
    leq: Vec<Vec<bool>>,
}

impl Poset {
    pub fn new<S: AsRef<str>>(points: &[S], pairs: &[(S, S)]) -> Result<Poset, Error> {
        let names: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        if names.is_empty() {
            return Err(Error::Invalid("a poset needs at least one point".into()));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::Invalid(format!("duplicate point `{n}`")));
            }
        }
        let n = names.len();
        let index = |s: &str| {
            names
                .iter()
                .position(|m| m == s)
                .ok_or_else(|| Error::Unresolved(format!("point `{s}`")))
        };
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in pairs {
            leq[index(a.as_ref())?][index(b.as_ref())?] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::Invalid(format!(
                        "order has a cycle through `{}` and `{}`",
                        names[i], names[j]
                    )));
                }
            }
        }
        Ok(Poset { names, leq })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|m| m == name)
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    pub fn up(&self, x: usize) -> PointSet {
        (0..self.len()).filter(|&y| self.leq[x][y]).collect()
    }

    pub fn all(&self) -> PointSet {
        (0..self.len()).collect()
    }

    pub fn is_up_closed(&self, set: &PointSet) -> bool {
        set.iter().all(|&x| (0..self.len()).all(|y| !self.leq[x][y] || set.contains(&y)))
    }

    pub fn interior(&self, set: &PointSet) -> PointSet {
        set.iter()
            .copied()
            .filter(|&x| self.up(x).is_subset(set))
            .collect()
    }

    pub fn is_discrete(&self) -> bool {
        (0..self.len()).all(|x| (0..self.len()).all(|y| x == y || !self.leq[x][y]))
    }

    /// Connected components of the comparability graph on `set`.
    pub fn components(&self, set: &PointSet) -> Vec<PointSet> {
        let mut remaining: Vec<usize> = set.iter().copied().collect();
        let mut out = Vec::new();
        while let Some(start) = remaining.first().copied() {
            let mut comp = PointSet::new();
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                if !comp.insert(x) {
                    continue;
                }
                for &y in set {
                    if !comp.contains(&y) && (self.leq[x][y] || self.leq[y][x]) {
                        stack.push(y);
                    }
                }
            }
            remaining.retain(|x| !comp.contains(x));
            out.push(comp);
        }
        out
    }

    /// Every up-set, ordered by size and then lexicographically.
    pub fn up_sets(&self) -> Vec<PointSet> {
        let n = self.len();
        assert!(n <= 20, "open-set enumeration is limited to 20 points");
        let mut out: Vec<PointSet> = (0u32..(1u32 << n))
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect::<PointSet>())
            .filter(|s| self.is_up_closed(s))
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
        out
    }

    pub fn format(&self, set: &PointSet) -> String {
        if set.is_empty() {
            return "∅".into();
        }
        let inner: Vec<&str> = set.iter().map(|&x| self.names[x].as_str()).collect();
        format!("{{{}}}", inner.join(","))
    }
}
