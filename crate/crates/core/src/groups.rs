//! Finite groups with a generating set, their Cayley graphs, and the word
//! metric.
//!
//! Generators act on the left: the distance from `a` to `b` is the least `d`
//! with `b = s₁s₂…s_d·a`, which equals the length of `b·a⁻¹`. Lengths come
//! from one breadth-first search out of the identity.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::frechet::{minimize_over_candidates_with, FrechetOptions, FrechetResult, MetricMatrix};
use crate::metric::Metric;

/// Largest order for which associativity is checked on every triple.
pub const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 200;
pub const SAMPLED_TRIPLES: usize = 100_000;
const ASSOCIATIVITY_SEED: u64 = 0x5eed_a55c;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic(usize),
    Product(Vec<usize>),
    Dihedral(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Validation {
    Exhaustive,
    Sampled { triples: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Operation {
    Table(Vec<usize>),
    /// Direct product of cyclic groups; element index is mixed-radix with
    /// the last factor varying fastest.
    Product(Vec<usize>),
    /// `aⁱbˢ` stored at index `s·n + i`.
    Dihedral(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    op: Operation,
    identity: usize,
    inverses: Vec<usize>,
    generators: Vec<usize>,
    lengths: Vec<u32>,
    validation: Validation,
    notices: Vec<String>,
}

pub fn make_group(kind: &GroupKind) -> Result<GroupSpec> {
    match kind {
        GroupKind::Cyclic(n) => GroupSpec::cyclic(*n),
        GroupKind::Product(orders) => GroupSpec::product(orders),
        GroupKind::Dihedral(n) => GroupSpec::dihedral(*n),
    }
}

fn digits(mut x: usize, orders: &[usize]) -> Vec<usize> {
    let mut out = vec![0; orders.len()];
    for (k, &m) in orders.iter().enumerate().rev() {
        out[k] = x % m;
        x /= m;
    }
    out
}

fn from_digits(ds: &[usize], orders: &[usize]) -> usize {
    ds.iter().zip(orders).fold(0, |acc, (&d, &m)| acc * m + d)
}

impl GroupSpec {
    /// `Z/n` under addition, generated by `{1, −1}`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroupParams("cyclic order must be at least 1".into()));
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        let gens = vec![1 % n, (n - 1) % n];
        Self::build(labels, Operation::Product(vec![n]), gens)
    }

    /// `C_{m₁} × … × C_{m_k}`, generated by the ±1 unit tuples of each factor.
    pub fn product(orders: &[usize]) -> Result<Self> {
        if orders.is_empty() || orders.contains(&0) {
            return Err(Error::InvalidGroupParams(
                "product needs one or more factor orders, each at least 1".into(),
            ));
        }
        let n = orders
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m))
            .ok_or_else(|| Error::InvalidGroupParams("group order overflows".into()))?;
        let labels = (0..n)
            .map(|x| {
                let ds: Vec<String> = digits(x, orders).iter().map(|d| d.to_string()).collect();
                format!("({})", ds.join(","))
            })
            .collect();
        let mut gens = Vec::new();
        for (k, &m) in orders.iter().enumerate() {
            for step in [1 % m, (m - 1) % m] {
                let mut ds = vec![0; orders.len()];
                ds[k] = step;
                gens.push(from_digits(&ds, orders));
            }
        }
        Self::build(labels, Operation::Product(orders.to_vec()), gens)
    }

    /// Symmetries of the regular n-gon, order 2n, generated by the rotation
    /// `a`, its inverse, and the reflection `b`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroupParams("dihedral n must be at least 1".into()));
        }
        let word = |i: usize, s: usize| -> String {
            let rot = match i {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            };
            match (rot.is_empty(), s) {
                (true, 0) => "e".to_string(),
                (_, 0) => rot,
                _ => format!("{rot}b"),
            }
        };
        let labels = (0..2 * n).map(|x| word(x % n, x / n)).collect();
        let gens = vec![1 % n, (n - 1) % n, n];
        Self::build(labels, Operation::Dihedral(n), gens)
    }

    /// A group from its multiplication table, `table[a][b] = a·b` by index.
    /// Generators default to every non-identity element; override with
    /// [`GroupSpec::with_generators`].
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyGroup);
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::NotClosed(format!("table must be {n}x{n}")));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (a, row) in table.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                if c >= n {
                    return Err(Error::NotClosed(format!(
                        "{}*{} is outside the element set",
                        labels[a], labels[b]
                    )));
                }
                flat.push(c);
            }
        }
        Self::build(labels, Operation::Table(flat), (0..n).collect())
    }

    fn build(labels: Vec<String>, op: Operation, generators: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let mut g = GroupSpec {
            labels,
            index,
            op,
            identity: 0,
            inverses: Vec::new(),
            generators: Vec::new(),
            lengths: Vec::new(),
            validation: Validation::Exhaustive,
            notices: Vec::new(),
        };
        g.identity = g.find_identity()?;
        g.inverses = g.find_inverses()?;
        g.validation = g.check_associativity()?;
        g.set_generators(generators, false)?;
        Ok(g)
    }

    fn find_identity(&self) -> Result<usize> {
        let n = self.order();
        let candidate = match self.op {
            Operation::Table(_) => (0..n).find(|&e| (0..n).all(|x| self.mul(e, x) == x && self.mul(x, e) == x)),
            _ => Some(0),
        };
        candidate.ok_or(Error::NoIdentity)
    }

    fn find_inverses(&self) -> Result<Vec<usize>> {
        let n = self.order();
        (0..n)
            .map(|a| match &self.op {
                Operation::Table(_) => (0..n)
                    .find(|&b| self.mul(a, b) == self.identity && self.mul(b, a) == self.identity)
                    .ok_or_else(|| Error::NoInverse(self.labels[a].clone())),
                Operation::Product(orders) => {
                    let ds: Vec<usize> = digits(a, orders)
                        .iter()
                        .zip(orders)
                        .map(|(&d, &m)| (m - d) % m)
                        .collect();
                    Ok(from_digits(&ds, orders))
                }
                // rotations invert, reflections are involutions
                Operation::Dihedral(m) => Ok(if a < *m { (m - a) % m } else { a }),
            })
            .collect()
    }

    fn check_associativity(&self) -> Result<Validation> {
        let n = self.order();
        let check = |a: usize, b: usize, c: usize| -> Result<()> {
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                return Err(Error::NotAssociative(
                    self.labels[a].clone(),
                    self.labels[b].clone(),
                    self.labels[c].clone(),
                ));
            }
            Ok(())
        };
        if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
            Ok(Validation::Exhaustive)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(ASSOCIATIVITY_SEED);
            for _ in 0..SAMPLED_TRIPLES {
                check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))?;
            }
            Ok(Validation::Sampled {
                triples: SAMPLED_TRIPLES,
            })
        }
    }

    fn set_generators(&mut self, requested: Vec<usize>, explicit: bool) -> Result<()> {
        let mut gens: Vec<usize> = Vec::with_capacity(requested.len() * 2);
        for s in requested {
            if s == self.identity {
                if explicit {
                    self.notices
                        .push(format!("dropped identity {} from generators", self.labels[s]));
                }
                continue;
            }
            if !gens.contains(&s) {
                gens.push(s);
            }
        }
        let mut added = Vec::new();
        for i in 0..gens.len() {
            let inv = self.inverses[gens[i]];
            if !gens.contains(&inv) {
                gens.push(inv);
                added.push(format!("{} (inverse of {})", self.labels[inv], self.labels[gens[i]]));
            }
        }
        if !added.is_empty() {
            self.notices
                .push(format!("generators completed under inverses: added {}", added.join(", ")));
        }
        self.generators = gens;
        let lengths = self.bfs_from(self.identity);
        if lengths.contains(&u32::MAX) {
            return Err(Error::GeneratorsDoNotGenerate);
        }
        self.lengths = lengths;
        Ok(())
    }

    /// Replaces the generating set. Inverses are added when missing and the
    /// identity is dropped; both are recorded in [`GroupSpec::notices`].
    pub fn with_generators<S: AsRef<str>>(mut self, labels: &[S]) -> Result<Self> {
        let idx = labels
            .iter()
            .map(|l| self.element(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.set_generators(idx, true)?;
        Ok(self)
    }

    /// Uses every non-identity element as a generator; the Cayley graph is
    /// then complete.
    pub fn with_complete_generators(mut self) -> Self {
        let all = (0..self.order()).collect();
        self.set_generators(all, false).expect("complete set generates");
        self
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn element(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.inverses[x]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn generator_labels(&self) -> Vec<&str> {
        self.generators.iter().map(|&s| self.label(s)).collect()
    }

    pub fn validation(&self) -> Validation {
        self.validation
    }

    pub fn notices(&self) -> &[String] {
        &self.notices
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.op {
            Operation::Table(t) => t[a * self.order() + b],
            Operation::Product(orders) => {
                if let [m] = orders.as_slice() {
                    return (a + b) % m;
                }
                let (da, db) = (digits(a, orders), digits(b, orders));
                let sum: Vec<usize> = da
                    .iter()
                    .zip(&db)
                    .zip(orders)
                    .map(|((x, y), m)| (x + y) % m)
                    .collect();
                from_digits(&sum, orders)
            }
            Operation::Dihedral(n) => {
                let (i, s) = (a % n, a / n);
                let (j, t) = (b % n, b / n);
                let rot = if s == 0 { (i + j) % n } else { (i + n - j) % n };
                (s ^ t) * n + rot
            }
        }
    }

    /// BFS distances from `start` along edges `g → s·g`; unreachable
    /// vertices get `u32::MAX`.
    pub fn bfs_from(&self, start: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.order()];
        let mut queue = VecDeque::from([start]);
        dist[start] = 0;
        while let Some(g) = queue.pop_front() {
            for &s in &self.generators {
                let h = self.mul(s, g);
                if dist[h] == u32::MAX {
                    dist[h] = dist[g] + 1;
                    queue.push_back(h);
                }
            }
        }
        dist
    }

    /// Word length of every element, indexed like [`GroupSpec::labels`].
    pub fn length_function(&self) -> &[u32] {
        &self.lengths
    }

    pub fn word_distance_idx(&self, a: usize, b: usize) -> u32 {
        self.lengths[self.mul(b, self.inverse(a))]
    }

    pub fn word_distance(&self, a: &str, b: &str) -> Result<u32> {
        Ok(self.word_distance_idx(self.element(a)?, self.element(b)?))
    }

    pub fn cayley_graph(&self) -> CayleyGraph {
        let adjacency = (0..self.order())
            .map(|g| self.generators.iter().map(|&s| self.mul(s, g)).collect())
            .collect();
        CayleyGraph { adjacency }
    }

    /// Full word-metric matrix over all elements, labelled.
    pub fn distance_matrix(&self) -> MetricMatrix<String> {
        self.distance_matrix_with(Exec::default())
    }

    pub fn distance_matrix_with(&self, exec: Exec) -> MetricMatrix<String> {
        let n = self.order();
        let rows: Vec<Vec<u64>> = exec.map_range(n, |a| {
            (0..n).map(|b| self.word_distance_idx(a, b) as u64).collect()
        });
        MetricMatrix::from_exact(self.labels.clone(), rows.concat())
    }
}

/// Vertices are group elements; `g` is joined to `s·g` for each generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyGraph {
    adjacency: Vec<Vec<usize>>,
}

impl CayleyGraph {
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, g: usize) -> &[usize] {
        &self.adjacency[g]
    }

    /// Distinct undirected edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `Some(d)` when every vertex has exactly `d` distinct neighbours.
    pub fn regular_degree(&self) -> Option<usize> {
        let degree = |ns: &Vec<usize>| {
            let mut ns = ns.clone();
            ns.sort_unstable();
            ns.dedup();
            ns.len()
        };
        let d = degree(self.adjacency.first()?);
        self.adjacency.iter().all(|ns| degree(ns) == d).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Edge list as `label<TAB>label` lines.
    pub fn to_edge_tsv(&self, labels: &[String]) -> String {
        self.edges()
            .into_iter()
            .map(|(u, v)| format!("{}\t{}\n", labels[u], labels[v]))
            .collect()
    }
}

/// The word metric on element indices of one group.
#[derive(Debug, Clone, Copy)]
pub struct WordMetric<'g>(pub &'g GroupSpec);

impl Metric<usize> for WordMetric<'_> {
    fn distance(&self, a: &usize, b: &usize) -> f64 {
        self.0.word_distance_idx(*a, *b) as f64
    }

    fn exact_distance(&self, a: &usize, b: &usize) -> Option<u64> {
        Some(self.0.word_distance_idx(*a, *b) as u64)
    }
}

/// Fréchet functional with every element as both sample and candidate.
pub fn group_variability(g: &GroupSpec, p: f64) -> Result<FrechetResult<String>> {
    group_variability_with(g, FrechetOptions::new(p))
}

pub fn group_variability_with(g: &GroupSpec, opts: FrechetOptions) -> Result<FrechetResult<String>> {
    let all: Vec<usize> = (0..g.order()).collect();
    let r = minimize_over_candidates_with(&all, &all, &WordMetric(g), opts)?;
    Ok(r.map_minimizers(|i| g.label(i).to_string()))
}

/// Parses a Cayley table from CSV: the first row holds column labels after
/// an ignored corner cell, each later row starts with its row label.
pub fn parse_cayley_csv(text: &str) -> Result<GroupSpec> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push(rec.iter().map(str::to_string).collect());
    }
    let Some((header, body)) = rows.split_first() else {
        return Err(Error::EmptyGroup);
    };
    let cols: Vec<String> = header[1..].to_vec();
    let n = cols.len();
    if n == 0 {
        return Err(Error::EmptyGroup);
    }
    let mut col_index = HashMap::new();
    for (j, l) in cols.iter().enumerate() {
        if col_index.insert(l.as_str(), j).is_some() {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    if body.len() != n {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected {n} table rows, found {}", body.len()),
        });
    }
    let mut table = vec![Vec::new(); n];
    let mut filled = vec![false; n];
    for (r, row) in body.iter().enumerate() {
        let line = r + 2;
        if row.len() != n + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", n + 1, row.len()),
            });
        }
        let a = *col_index.get(row[0].as_str()).ok_or_else(|| Error::Parse {
            line,
            msg: format!("row label {:?} is not a column label", row[0]),
        })?;
        if filled[a] {
            return Err(Error::DuplicateLabel(row[0].clone()));
        }
        filled[a] = true;
        table[a] = row[1..]
            .iter()
            .map(|c| {
                col_index
                    .get(c.as_str())
                    .copied()
                    .ok_or_else(|| Error::NotClosed(format!("{}*… gives unknown element {c:?}", row[0])))
            })
            .collect::<Result<_>>()?;
    }
    GroupSpec::from_table(cols, table)
}
