//! Finite endofunctions: total self-maps of `{0, …, n-1}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EndoError {
    #[error("an endofunction needs at least one point")]
    Empty,
    #[error("map[{index}] = {value} is outside 0..{n}")]
    OutOfRange { index: usize, value: usize, n: usize },
    #[error("point {x} is outside 0..{n}")]
    PointOutOfRange { x: usize, n: usize },
    #[error("declared size {declared} but the table has {actual} entries")]
    SizeMismatch { declared: usize, actual: usize },
    #[error("{labels} labels supplied for {n} points")]
    LabelCount { labels: usize, n: usize },
}

/// A total map `f : {0..n} → {0..n}` stored as its value table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Endofunction {
    table: Vec<usize>,
}

impl Endofunction {
    pub fn new(table: Vec<usize>) -> Result<Self, EndoError> {
        let n = table.len();
        if n == 0 {
            return Err(EndoError::Empty);
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(EndoError::OutOfRange { index, value, n });
        }
        Ok(Endofunction { table })
    }

    pub fn identity(n: usize) -> Self {
        Endofunction { table: (0..n).collect() }
    }

    pub fn constant(n: usize, value: usize) -> Result<Self, EndoError> {
        Self::new(vec![value; n])
    }

    /// `i ↦ i + 1 mod n`.
    pub fn cycle(n: usize) -> Self {
        Endofunction { table: (0..n).map(|i| (i + 1) % n).collect() }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn into_table(self) -> Vec<usize> {
        self.table
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Endofunction) -> Endofunction {
        assert_eq!(self.len(), other.len(), "composing endofunctions of different sizes");
        Endofunction { table: other.table.iter().map(|&y| self.table[y]).collect() }
    }

    /// `self^k`, with `self^0` the identity. Uses repeated squaring.
    pub fn iterate(&self, mut k: u64) -> Endofunction {
        let mut result = Endofunction::identity(self.len());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = base.compose(&result);
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base);
            }
        }
        result
    }

    pub fn fiber(&self, x: usize) -> Result<FiberSet, EndoError> {
        self.check_point(x)?;
        Ok(FiberSet { elements: self.fiber_iter(x).collect() })
    }

    /// `{ y : f(f(y)) = x }`.
    pub fn fiber2(&self, x: usize) -> Result<FiberSet, EndoError> {
        self.check_point(x)?;
        Ok(FiberSet { elements: (0..self.len()).filter(|&y| self.table[self.table[y]] == x).collect() })
    }

    pub(crate) fn fiber_iter(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.table.iter().enumerate().filter(move |(_, &v)| v == x).map(|(i, _)| i)
    }

    /// `#f⁻¹(x)` for every `x`.
    pub fn fiber_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.len()];
        for &v in &self.table {
            counts[v] += 1;
        }
        counts
    }

    fn check_point(&self, x: usize) -> Result<(), EndoError> {
        if x < self.len() {
            Ok(())
        } else {
            Err(EndoError::PointOutOfRange { x, n: self.len() })
        }
    }

    /// Cycle/tree structure of the functional graph. Iterative, so it handles
    /// very large tables without recursion.
    pub fn decompose(&self) -> Decomposition {
        const UNSEEN: u8 = 0;
        const ON_PATH: u8 = 1;
        const DONE: u8 = 2;
        let n = self.len();
        let mut state = vec![UNSEEN; n];
        let mut depth = vec![0usize; n];
        let mut cycle_of = vec![usize::MAX; n];
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut path = Vec::new();

        for start in 0..n {
            if state[start] != UNSEEN {
                continue;
            }
            path.clear();
            let mut v = start;
            while state[v] == UNSEEN {
                state[v] = ON_PATH;
                path.push(v);
                v = self.table[v];
            }
            if state[v] == ON_PATH {
                // new cycle: the suffix of `path` starting at v
                let pos = path.iter().position(|&p| p == v).expect("v is on the current path");
                let members: Vec<usize> = path[pos..].to_vec();
                let id = cycles.len();
                for &m in &members {
                    state[m] = DONE;
                    depth[m] = 0;
                    cycle_of[m] = id;
                }
                cycles.push(members);
                path.truncate(pos);
            }
            // remaining path nodes hang off an already-classified node
            while let Some(u) = path.pop() {
                let next = self.table[u];
                depth[u] = depth[next] + 1;
                cycle_of[u] = cycle_of[next];
                state[u] = DONE;
            }
        }
        Decomposition { cycles, cycle_of, depth }
    }
}

/// Output of [`Endofunction::decompose`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Each cycle's members, in the order the map visits them.
    pub cycles: Vec<Vec<usize>>,
    /// Index into `cycles` of the cycle each node eventually reaches.
    pub cycle_of: Vec<usize>,
    /// Steps from each node to its cycle; zero for cycle nodes.
    pub depth: Vec<usize>,
}

impl Decomposition {
    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }

    pub fn is_cycle_node(&self, x: usize) -> bool {
        self.depth[x] == 0
    }
}

/// Sorted, duplicate-free set of points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiberSet {
    elements: Vec<usize>,
}

impl FiberSet {
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }
}

/// JSON form: `{"n": 3, "map": [1, 2, 0], "labels": ["a", "b", "c"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndoFile {
    pub n: usize,
    pub map: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// An endofunction with optional human-readable point names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledEndofunction {
    pub map: Endofunction,
    pub labels: Option<Vec<String>>,
}

impl LabeledEndofunction {
    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }
}

impl TryFrom<EndoFile> for LabeledEndofunction {
    type Error = EndoError;

    fn try_from(file: EndoFile) -> Result<Self, EndoError> {
        if file.map.len() != file.n {
            return Err(EndoError::SizeMismatch { declared: file.n, actual: file.map.len() });
        }
        if let Some(labels) = &file.labels {
            if labels.len() != file.n {
                return Err(EndoError::LabelCount { labels: labels.len(), n: file.n });
            }
        }
        Ok(LabeledEndofunction { map: Endofunction::new(file.map)?, labels: file.labels })
    }
}

impl From<&LabeledEndofunction> for EndoFile {
    fn from(l: &LabeledEndofunction) -> Self {
        EndoFile { n: l.map.len(), map: l.map.table().to_vec(), labels: l.labels.clone() }
    }
}

impl From<&Endofunction> for EndoFile {
    fn from(f: &Endofunction) -> Self {
        EndoFile { n: f.len(), map: f.table().to_vec(), labels: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(Endofunction::new(vec![]), Err(EndoError::Empty));
        assert_eq!(Endofunction::new(vec![0, 2]), Err(EndoError::OutOfRange { index: 1, value: 2, n: 2 }));
        let file = EndoFile { n: 3, map: vec![0, 1], labels: None };
        assert!(matches!(LabeledEndofunction::try_from(file), Err(EndoError::SizeMismatch { .. })));
        let file = EndoFile { n: 2, map: vec![0, 1], labels: Some(vec!["a".into()]) };
        assert!(matches!(LabeledEndofunction::try_from(file), Err(EndoError::LabelCount { .. })));
    }

    #[test]
    fn iterate_examples() {
        assert_eq!(Endofunction::identity(5).iterate(7), Endofunction::identity(5));
        assert_eq!(Endofunction::cycle(3).iterate(3), Endofunction::identity(3));
        assert_eq!(Endofunction::cycle(3).iterate(0), Endofunction::identity(3));
        assert_eq!(Endofunction::cycle(5).iterate(2).table(), &[2, 3, 4, 0, 1]);
    }

    #[test]
    fn fiber_examples() {
        let c = Endofunction::constant(9, 8).unwrap();
        assert_eq!(c.fiber(8).unwrap().elements(), &(0..9).collect::<Vec<_>>()[..]);
        assert_eq!(Endofunction::identity(5).fiber(3).unwrap().elements(), &[3]);
        assert_eq!(Endofunction::identity(5).fiber2(0).unwrap().elements(), &[0]);
        assert_eq!(c.fiber(9), Err(EndoError::PointOutOfRange { x: 9, n: 9 }));
        assert!(c.fiber2(10).is_err());
    }

    #[test]
    fn decompose_examples() {
        let d = Endofunction::identity(4).decompose();
        assert_eq!(d.cycle_lengths(), vec![1, 1, 1, 1]);
        assert!(d.depth.iter().all(|&x| x == 0));

        let d = Endofunction::cycle(3).decompose();
        assert_eq!(d.cycle_lengths(), vec![3]);

        let d = Endofunction::constant(9, 8).unwrap().decompose();
        assert_eq!(d.cycle_lengths(), vec![1]);
        assert_eq!(d.cycles[0], vec![8]);
        assert_eq!(d.depth.iter().filter(|&&x| x == 1).count(), 8);
    }

    #[test]
    fn decompose_handles_long_chains() {
        let n = 1_000_000;
        let table: Vec<usize> = (0..n).map(|i| if i == 0 { 0 } else { i - 1 }).collect();
        let d = Endofunction::new(table).unwrap().decompose();
        assert_eq!(d.depth[n - 1], n - 1);
        assert_eq!(d.cycles.len(), 1);
    }
}
