//! Poisson algebra of abstract monodromy entries.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::poly::{rat, Poly};
use crate::relations::{self, BracketRule, RelationError};
use crate::ring::{Mat, Ring};

/// `m^{(arc)}_{row,col}` with 1-based indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Entry {
    pub arc: u32,
    pub row: usize,
    pub col: usize,
}

impl Entry {
    pub fn new(arc: u32, row: usize, col: usize) -> Entry {
        Entry { arc, row, col }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}_{}{}", self.arc, self.row, self.col)
    }
}

pub type PPoly = Poly<Entry>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PoissonError {
    #[error("no bracket rule between matrices {0} and {1}")]
    UnknownPair(u32, u32),
    #[error("pair ({0}, {1}) given twice")]
    DuplicatePair(u32, u32),
    #[error("rule {rule} does not apply to pair ({a}, {b})")]
    RuleMismatch { rule: String, a: u32, b: u32 },
    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("point gives constrained entry {0} a nonzero value")]
    ConstraintViolated(Entry),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// `sign(x) + 1`, so the value at zero is 1.
pub fn step(x: i64) -> i64 {
    x.signum() + 1
}

fn delta(a: usize, b: usize) -> i64 {
    (a == b) as i64
}

fn diff(a: usize, b: usize) -> i64 {
    a as i64 - b as i64
}

/// Hand-entered generator brackets, one per arc configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrintedTable {
    /// Two closed arcs whose ends are nested.
    Nested,
    /// Two closed arcs, the first enclosing the second.
    Outer,
    /// Two closed arcs with interleaved ends. `extra_term` adds the summand
    /// `2 Σ_s a_is b_sl` that carries no index selector.
    Interleaved { extra_term: bool },
    /// A closed arc with itself.
    ClosedSelf,
    /// An arc between distinct cusps with itself.
    OpenSelf,
    /// A closed arc against an open arc leaving further right.
    ClosedOpen,
}

impl PrintedTable {
    pub const ALL: [PrintedTable; 7] = [
        PrintedTable::Nested,
        PrintedTable::Outer,
        PrintedTable::Interleaved { extra_term: true },
        PrintedTable::Interleaved { extra_term: false },
        PrintedTable::ClosedSelf,
        PrintedTable::OpenSelf,
        PrintedTable::ClosedOpen,
    ];

    /// Exchange-relation template with the same arc configuration.
    pub fn template(self) -> &'static str {
        match self {
            PrintedTable::Nested => "r2143",
            PrintedTable::Outer => "r3241",
            PrintedTable::Interleaved { .. } => "r3142",
            PrintedTable::ClosedSelf => "H",
            PrintedTable::OpenSelf => "basic2",
            PrintedTable::ClosedOpen => "r21-3x",
        }
    }

    pub fn same_arc(self) -> bool {
        matches!(self, PrintedTable::ClosedSelf | PrintedTable::OpenSelf)
    }

    pub fn id(self) -> &'static str {
        match self {
            PrintedTable::Nested => "nested",
            PrintedTable::Outer => "outer",
            PrintedTable::Interleaved { extra_term: true } => "interleaved",
            PrintedTable::Interleaved { extra_term: false } => "interleaved-no-extra",
            PrintedTable::ClosedSelf => "closed-self",
            PrintedTable::OpenSelf => "open-self",
            PrintedTable::ClosedOpen => "closed-open",
        }
    }

    /// `{a_{i,j}, b_{kk,l}}` for the matrices with ids `a` and `b`.
    #[allow(clippy::too_many_arguments)]
    pub fn entry(self, a: u32, b: u32, k: usize, i: usize, j: usize, kk: usize, l: usize) -> PPoly {
        let m = |arc: u32, r: usize, c: usize| PPoly::var(Entry::new(arc, r, c));
        let mut out = PPoly::zero();
        let mut push = |p: PPoly, c: i64| {
            if c != 0 {
                out = out.plus(&p.scale(&rat(c)));
            }
        };
        match self {
            PrintedTable::Nested => {
                for s in 1..=k {
                    push(m(a, i, s).times(&m(b, s, l)), delta(j, kk) * step(diff(j, s)));
                    push(m(a, s, j).times(&m(b, kk, s)), delta(i, l) * step(diff(s, i)));
                }
                push(m(a, i, l).times(&m(b, kk, j)), -step(diff(j, l)));
                push(m(a, kk, j).times(&m(b, i, l)), -step(diff(kk, i)));
            }
            PrintedTable::Outer => {
                for s in 1..=k {
                    push(m(a, i, s).times(&m(b, s, l)), -delta(j, kk) * step(diff(s, j)));
                    push(m(a, s, j).times(&m(b, kk, s)), delta(i, l) * step(diff(s, i)));
                }
                push(m(a, i, l).times(&m(b, kk, j)), step(diff(l, j)));
                push(m(a, kk, j).times(&m(b, i, l)), -step(diff(kk, i)));
            }
            PrintedTable::Interleaved { extra_term } => {
                for s in 1..=k {
                    push(m(a, i, s).times(&m(b, s, l)), -delta(j, kk) * step(diff(s, j)));
                    push(m(a, s, j).times(&m(b, kk, s)), delta(i, l) * step(diff(s, i)));
                    if extra_term {
                        push(m(a, i, s).times(&m(b, s, l)), 2);
                    }
                }
                push(m(a, i, l).times(&m(b, kk, j)), -step(diff(j, l)));
                push(m(a, kk, j).times(&m(b, i, l)), -step(diff(kk, i)));
            }
            PrintedTable::ClosedSelf => {
                for s in 1..=k {
                    push(m(a, i, s).times(&m(a, s, l)), -delta(j, kk) * step(diff(s, j)));
                    push(m(a, s, j).times(&m(a, kk, s)), delta(i, l) * step(diff(s, i)));
                }
                push(m(a, kk, j).times(&m(a, i, l)), step(diff(l, j)) - step(diff(kk, i)));
            }
            PrintedTable::OpenSelf => {
                push(m(a, i, j).times(&m(a, kk, l)), step(diff(i, kk)) - step(diff(j, l)));
            }
            PrintedTable::ClosedOpen => {
                // the second summand sits inside the sum over s
                for s in 1..=k {
                    push(m(a, s, j).times(&m(b, kk, s)), -delta(i, l) * step(diff(s, i)));
                    push(m(a, i, l).times(&m(b, kk, j)), -step(diff(j, l)));
                }
            }
        }
        out
    }
}

/// How the generators of an ordered pair of matrices bracket.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "id")]
pub enum Rule {
    Printed(PrintedTable),
    /// First-order expansion of the named exchange template.
    Derived(String),
    /// `{a_{i,j}, b_{r,k+1-r}} = a_{i,j} b_{r,k+1-r} δ_{i,k+1-r}`; only
    /// antidiagonal entries of `b` take part.
    AntidiagonalScaling,
    Commuting,
}

impl Rule {
    pub fn derived(template: &str) -> Rule {
        Rule::Derived(template.to_string())
    }

    fn same_arc(&self) -> Option<bool> {
        match self {
            Rule::Printed(t) => Some(t.same_arc()),
            Rule::Derived(id) => relations::template(id).ok().map(|t| t.same_arc),
            Rule::AntidiagonalScaling => Some(false),
            Rule::Commuting => None,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Printed(t) => write!(f, "printed:{}", t.id()),
            Rule::Derived(id) => write!(f, "derived:{id}"),
            Rule::AntidiagonalScaling => write!(f, "antidiagonal-scaling"),
            Rule::Commuting => write!(f, "commuting"),
        }
    }
}

/// Generator brackets for a family of `k x k` matrices, keyed by ordered
/// pairs of matrix ids. A pair registered as `(a, b)` also answers `(b, a)`
/// through antisymmetry; self pairs are filled for `x < y` only and mirrored.
#[derive(Clone, Debug)]
pub struct BracketTable {
    k: usize,
    rules: BTreeMap<(u32, u32), Rule>,
    values: HashMap<(Entry, Entry), PPoly>,
}

impl BracketTable {
    pub fn new(k: usize, rules: impl IntoIterator<Item = ((u32, u32), Rule)>) -> Result<BracketTable, PoissonError> {
        let mut table = BracketTable { k, rules: BTreeMap::new(), values: HashMap::new() };
        let mut derived: HashMap<String, BracketRule> = HashMap::new();
        for ((a, b), rule) in rules {
            if table.rules.contains_key(&(a, b)) || table.rules.contains_key(&(b, a)) {
                return Err(PoissonError::DuplicatePair(a, b));
            }
            if let Some(same) = rule.same_arc() {
                if same != (a == b) {
                    return Err(PoissonError::RuleMismatch { rule: rule.to_string(), a, b });
                }
            }
            if let Rule::Derived(id) = &rule {
                if !derived.contains_key(id) {
                    let t = relations::template(id)?;
                    derived.insert(id.clone(), relations::semiclassical_expand(&t, k));
                }
            }
            let idx = || (1..=k).flat_map(move |i| (1..=k).map(move |j| (i, j)));
            for (i, j) in idx() {
                for (kk, l) in idx() {
                    let x = Entry::new(a, i, j);
                    let y = Entry::new(b, kk, l);
                    if a == b && x >= y {
                        continue;
                    }
                    let v = match &rule {
                        Rule::Printed(t) => t.entry(a, b, k, i, j, kk, l),
                        Rule::Derived(id) => derived[id]
                            .get(i, j, kk, l)
                            .map_vars(|e| Entry::new(if e.arc == 0 { a } else { b }, e.row, e.col)),
                        Rule::AntidiagonalScaling => {
                            if l == k + 1 - kk && i == k + 1 - kk {
                                PPoly::var(x).times(&PPoly::var(y))
                            } else {
                                PPoly::zero()
                            }
                        }
                        Rule::Commuting => PPoly::zero(),
                    };
                    if !v.is_empty() {
                        table.values.insert((y, x), v.negate());
                        table.values.insert((x, y), v);
                    }
                }
            }
            table.rules.insert((a, b), rule);
        }
        Ok(table)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rules(&self) -> &BTreeMap<(u32, u32), Rule> {
        &self.rules
    }

    fn knows(&self, a: u32, b: u32) -> bool {
        self.rules.contains_key(&(a, b)) || self.rules.contains_key(&(b, a))
    }

    /// Bracket of two generators.
    pub fn generator(&self, x: &Entry, y: &Entry) -> Result<PPoly, PoissonError> {
        if !self.knows(x.arc, y.arc) {
            return Err(PoissonError::UnknownPair(x.arc, y.arc));
        }
        Ok(self.values.get(&(*x, *y)).cloned().unwrap_or_default())
    }

    /// Leibniz extension of the generator brackets.
    pub fn bracket(&self, a: &PPoly, b: &PPoly) -> Result<PPoly, PoissonError> {
        let db: Vec<(Entry, PPoly)> = b.variables().into_iter().map(|y| (y, b.derivative(&y))).collect();
        let mut out = PPoly::zero();
        for x in a.variables() {
            let da = a.derivative(&x);
            for (y, dy) in &db {
                if !self.knows(x.arc, y.arc) {
                    return Err(PoissonError::UnknownPair(x.arc, y.arc));
                }
                if let Some(g) = self.values.get(&(x, *y)) {
                    out = out.plus(&da.times(dy).times(g));
                }
            }
        }
        Ok(out)
    }
}

/// Exact rational values for entries; unlisted entries are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointAssignment {
    values: BTreeMap<Entry, BigRational>,
}

impl PointAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, e: Entry, v: BigRational) {
        if v.is_zero() {
            self.values.remove(&e);
        } else {
            self.values.insert(e, v);
        }
    }

    pub fn value(&self, e: &Entry) -> BigRational {
        self.values.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Entry, &BigRational)> {
        self.values.iter()
    }

    pub fn eval(&self, p: &PPoly) -> Option<BigRational> {
        p.eval(|e| Some(self.value(e)))
    }

    /// Multiply every nonzero value by a random nonzero rational drawn from a
    /// seeded stream.
    pub fn rescaled(&self, seed: u64) -> PointAssignment {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = PointAssignment::new();
        for (e, v) in &self.values {
            let mut num: i64 = rng.gen_range(1..=12);
            if rng.gen_bool(0.5) {
                num = -num;
            }
            let den: i64 = rng.gen_range(1..=12);
            out.set(*e, v * BigRational::new(num.into(), den.into()));
        }
        out
    }
}

/// A Casimir candidate `numerator / denominator`.
#[derive(Clone, Debug)]
pub struct Casimir {
    pub name: String,
    pub numerator: PPoly,
    pub denominator: Option<PPoly>,
}

/// Failing triple of a Jacobi check with its nonzero cyclic sum.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiWitness {
    pub triple: [Entry; 3],
    pub residue: PPoly,
}

impl fmt::Display for JacobiWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = &self.triple;
        write!(f, "({x}, {y}, {z}): {}", self.residue)
    }
}

/// Failing generator of a centrality or closure check.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketWitness {
    pub left: Option<Entry>,
    pub generator: Entry,
    pub residue: PPoly,
}

impl fmt::Display for BracketWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.left {
            Some(l) => write!(f, "{{{l}, {}}} = {}", self.generator, self.residue),
            None => write!(f, "against {}: {}", self.generator, self.residue),
        }
    }
}

fn is_in(set: &BTreeSet<Entry>) -> impl Fn(&Entry) -> bool + '_ {
    move |e| set.contains(e)
}

/// Cyclic sum `{{x,y},z} + {{y,z},x} + {{z,x},y}` over all triples of
/// distinct generators, reduced modulo the constrained entries. Returns the
/// first failing triple in generator order.
pub fn jacobi_check(
    table: &BracketTable,
    generators: &[Entry],
    constrained: &BTreeSet<Entry>,
) -> Result<Option<JacobiWitness>, PoissonError> {
    let n = generators.len();
    let mut pair = HashMap::new();
    for x in generators {
        for y in generators {
            pair.insert((*x, *y), table.generator(x, y)?);
        }
    }
    let var = |e: &Entry| PPoly::var(*e);
    let per_first: Vec<Result<Option<JacobiWitness>, PoissonError>> = (0..n)
        .into_par_iter()
        .map(|a| {
            for b in a + 1..n {
                for c in b + 1..n {
                    let (x, y, z) = (&generators[a], &generators[b], &generators[c]);
                    let sum = table
                        .bracket(&pair[&(*x, *y)], &var(z))?
                        .plus(&table.bracket(&pair[&(*y, *z)], &var(x))?)
                        .plus(&table.bracket(&pair[&(*z, *x)], &var(y))?)
                        .reduce_vanishing(is_in(constrained));
                    if !sum.is_empty() {
                        return Ok(Some(JacobiWitness { triple: [*x, *y, *z], residue: sum }));
                    }
                }
            }
            Ok(None)
        })
        .collect();
    for r in per_first {
        if let Some(w) = r? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Centrality of `c` against every generator, with a ratio tested as
/// `{num,g}·den − num·{den,g}` modulo the constrained entries.
pub fn casimir_check(
    c: &Casimir,
    table: &BracketTable,
    generators: &[Entry],
    constrained: &BTreeSet<Entry>,
) -> Result<Option<BracketWitness>, PoissonError> {
    let num = c.numerator.reduce_vanishing(is_in(constrained));
    let den = c.denominator.as_ref().map(|d| d.reduce_vanishing(is_in(constrained)));
    let results: Vec<Result<Option<BracketWitness>, PoissonError>> = generators
        .par_iter()
        .map(|g| {
            let gv = PPoly::var(*g);
            let v = match &den {
                None => table.bracket(&num, &gv)?,
                Some(d) => table.bracket(&num, &gv)?.times(d).minus(&num.times(&table.bracket(d, &gv)?)),
            };
            let v = v.reduce_vanishing(is_in(constrained));
            Ok((!v.is_empty()).then_some(BracketWitness { left: None, generator: *g, residue: v }))
        })
        .collect();
    for r in results {
        if let Some(w) = r? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Every bracket of a constrained entry with any entry (free or constrained)
/// must lie in the ideal generated by the constrained entries.
pub fn reduction_closure_check(
    table: &BracketTable,
    generators: &[Entry],
    constrained: &BTreeSet<Entry>,
) -> Result<Option<BracketWitness>, PoissonError> {
    for z in constrained {
        for g in generators.iter().chain(constrained.iter()) {
            let v = table.generator(z, g)?.reduce_vanishing(is_in(constrained));
            if !v.is_empty() {
                return Ok(Some(BracketWitness { left: Some(*z), generator: *g, residue: v }));
            }
        }
    }
    Ok(None)
}

/// Rank of the Poisson bivector `Π_{IJ} = {g_I, g_J}` at `point`.
pub fn bivector_rank(
    table: &BracketTable,
    generators: &[Entry],
    constrained: &BTreeSet<Entry>,
    point: &PointAssignment,
) -> Result<usize, PoissonError> {
    if let Some((e, _)) = point.support().find(|(e, _)| constrained.contains(e)) {
        return Err(PoissonError::ConstraintViolated(*e));
    }
    let n = generators.len();
    let mut rows = vec![vec![BigRational::zero(); n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let v = point.eval(&table.generator(&generators[a], &generators[b])?).unwrap_or_else(BigRational::zero);
            rows[b][a] = -v.clone();
            rows[a][b] = v;
        }
    }
    Ok(rational_rank(&rows))
}

/// Exact rank: rows are cleared of denominators, then reduced by
/// fraction-free (Bareiss) elimination.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    integer_rank(m)
}

pub fn integer_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for cc in c + 1..cols {
                let v = (&m[rank][c] * &m[r][cc] - &m[r][c] * &m[rank][cc]) / &prev;
                m[r][cc] = v;
            }
            m[r][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Surface configurations whose leaf dimensions and Casimirs are known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Case {
    #[serde(rename = "single-closed")]
    SingleClosed,
    #[serde(rename = "single-closed-restricted")]
    SingleClosedRestricted,
    #[serde(rename = "open")]
    Open,
    #[serde(rename = "open-restricted")]
    OpenRestricted,
    /// `s` closed arcs at the single cusp of a disc with `s` holes.
    #[serde(rename = "S0s1")]
    S0s1,
    /// As `S0s1` with the last matrix replaced by the restricted boundary loop.
    #[serde(rename = "S0s1-restricted")]
    S0s1Restricted,
    /// Annulus with two cusps on the outer boundary.
    #[serde(rename = "S022")]
    S022,
    /// Disc with three cusps.
    #[serde(rename = "S013")]
    S013,
}

impl Case {
    pub const ALL: [Case; 8] = [
        Case::SingleClosed,
        Case::SingleClosedRestricted,
        Case::Open,
        Case::OpenRestricted,
        Case::S0s1,
        Case::S0s1Restricted,
        Case::S022,
        Case::S013,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Case::SingleClosed => "single-closed",
            Case::SingleClosedRestricted => "single-closed-restricted",
            Case::Open => "open",
            Case::OpenRestricted => "open-restricted",
            Case::S0s1 => "S0s1",
            Case::S0s1Restricted => "S0s1-restricted",
            Case::S022 => "S022",
            Case::S013 => "S013",
        }
    }

    /// Whether the case depends on the number of holes `s`.
    pub fn uses_s(self) -> bool {
        matches!(self, Case::S0s1 | Case::S0s1Restricted)
    }

    /// Maximal leaf dimension, where a closed formula is known.
    pub fn expected_rank(self, k: usize, s: usize) -> Option<usize> {
        let kk = k * (k - 1);
        Some(match self {
            Case::SingleClosed => kk,
            Case::SingleClosedRestricted => kk / 2 - k / 2,
            Case::Open => return None,
            Case::OpenRestricted => k * (k + 1) / 2 - k.div_ceil(2),
            Case::S0s1 => s * kk,
            Case::S0s1Restricted => s * kk - kk / 2 - k / 2,
            Case::S022 => kk,
            Case::S013 => k * (k + 1) / 2 + k - k / 2,
        })
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Case {
    type Err = PoissonError;
    fn from_str(s: &str) -> Result<Case, PoissonError> {
        Case::ALL
            .into_iter()
            .find(|c| c.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| PoissonError::UnknownCase(s.to_string()))
    }
}

/// A bracket table with its generators, constraints and the special point at
/// which the leaf dimension is attained.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub case: Case,
    pub k: usize,
    pub s: usize,
    pub table: BracketTable,
    pub generators: Vec<Entry>,
    pub constrained: BTreeSet<Entry>,
    pub point: PointAssignment,
}

impl Configuration {
    pub fn rank(&self) -> Result<usize, PoissonError> {
        bivector_rank(&self.table, &self.generators, &self.constrained, &self.point)
    }

    pub fn rank_at(&self, point: &PointAssignment) -> Result<usize, PoissonError> {
        bivector_rank(&self.table, &self.generators, &self.constrained, point)
    }

    pub fn jacobi(&self) -> Result<Option<JacobiWitness>, PoissonError> {
        jacobi_check(&self.table, &self.generators, &self.constrained)
    }

    pub fn check(&self, c: &Casimir) -> Result<Option<BracketWitness>, PoissonError> {
        casimir_check(c, &self.table, &self.generators, &self.constrained)
    }
}

/// Entries strictly below the main antidiagonal.
pub fn below_antidiagonal(arc: u32, k: usize) -> impl Iterator<Item = Entry> {
    (1..=k).flat_map(move |i| (1..=k).filter(move |j| i + j >= k + 2).map(move |j| Entry::new(arc, i, j)))
}

fn all_entries(arc: u32, k: usize) -> impl Iterator<Item = Entry> {
    (1..=k).flat_map(move |i| (1..=k).map(move |j| Entry::new(arc, i, j)))
}

struct Primes(u64);

impl Iterator for Primes {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        loop {
            self.0 += 1;
            let n = self.0;
            if n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d)) {
                return Some(n);
            }
        }
    }
}

fn primes() -> Primes {
    Primes(1)
}

fn assign(point: &mut PointAssignment, e: Entry, v: u64) {
    point.set(e, rat(v as i64));
}

fn diagonal_point(point: &mut PointAssignment, arc: u32, k: usize, vals: &mut Primes) {
    for i in 1..=k {
        assign(point, Entry::new(arc, i, i), vals.next().unwrap());
    }
}

/// Nonzero antidiagonal and the upper half of the diagonal.
fn antidiagonal_point(point: &mut PointAssignment, arc: u32, k: usize, vals: &mut Primes) {
    for i in 1..=k {
        assign(point, Entry::new(arc, i, k + 1 - i), vals.next().unwrap());
    }
    for i in 1..=k / 2 {
        assign(point, Entry::new(arc, i, i), vals.next().unwrap());
    }
}

pub fn configuration(case: Case, k: usize, s: usize) -> Result<Configuration, PoissonError> {
    if k < 2 {
        return Err(PoissonError::Parameters(format!("k = {k}, need k >= 2")));
    }
    if case.uses_s() && s < 2 {
        return Err(PoissonError::Parameters(format!("s = {s}, need s >= 2")));
    }
    let d = Rule::derived;
    let mut rules: Vec<((u32, u32), Rule)> = Vec::new();
    let mut restricted: Vec<u32> = Vec::new();
    let mut point = PointAssignment::new();
    let mut vals = primes();
    let arcs: Vec<u32>;
    match case {
        Case::SingleClosed | Case::SingleClosedRestricted => {
            arcs = vec![1];
            rules.push(((1, 1), d("H")));
            if case == Case::SingleClosed {
                diagonal_point(&mut point, 1, k, &mut vals);
            } else {
                restricted.push(1);
                antidiagonal_point(&mut point, 1, k, &mut vals);
            }
        }
        Case::Open | Case::OpenRestricted => {
            arcs = vec![1];
            rules.push(((1, 1), d("basic2")));
            antidiagonal_point(&mut point, 1, k, &mut vals);
            if case == Case::OpenRestricted {
                restricted.push(1);
            }
        }
        Case::S0s1 => {
            arcs = (1..=s as u32).collect();
            for &a in &arcs {
                rules.push(((a, a), d("H")));
                diagonal_point(&mut point, a, k, &mut vals);
            }
            for (x, &a) in arcs.iter().enumerate() {
                for &b in &arcs[x + 1..] {
                    rules.push(((a, b), d("r2143")));
                }
            }
        }
        Case::S0s1Restricted => {
            arcs = (1..=s as u32).collect();
            let boundary = s as u32;
            for &a in &arcs {
                rules.push(((a, a), d("H")));
            }
            for (x, &a) in arcs[..s - 1].iter().enumerate() {
                for &b in &arcs[x + 1..s - 1] {
                    rules.push(((a, b), d("r2143")));
                }
                rules.push(((boundary, a), d("r3241")));
                diagonal_point(&mut point, a, k, &mut vals);
            }
            restricted.push(boundary);
            antidiagonal_point(&mut point, boundary, k, &mut vals);
        }
        Case::S022 => {
            arcs = vec![1, 2];
            rules.push(((1, 1), d("basic2")));
            rules.push(((2, 2), d("basic2")));
            rules.push(((1, 2), d("eye")));
            restricted = vec![1, 2];
            antidiagonal_point(&mut point, 1, k, &mut vals);
            antidiagonal_point(&mut point, 2, k, &mut vals);
        }
        Case::S013 => {
            arcs = vec![1, 2];
            rules.push(((1, 1), d("basic2")));
            rules.push(((1, 2), Rule::AntidiagonalScaling));
            rules.push(((2, 2), Rule::Commuting));
            restricted.push(1);
            for i in 1..=k.div_ceil(2) {
                assign(&mut point, Entry::new(1, i, i), vals.next().unwrap());
            }
            for i in 1..=k {
                assign(&mut point, Entry::new(1, i, k + 1 - i), vals.next().unwrap());
                assign(&mut point, Entry::new(2, i, k + 1 - i), vals.next().unwrap());
            }
        }
    }
    let table = BracketTable::new(k, rules)?;
    let constrained: BTreeSet<Entry> = restricted.iter().flat_map(|&a| below_antidiagonal(a, k)).collect();
    let generators: Vec<Entry> = arcs
        .iter()
        .flat_map(|&a| all_entries(a, k))
        .filter(|e| !constrained.contains(e))
        .filter(|e| case != Case::S013 || e.arc != 2 || e.row + e.col == k + 1)
        .collect();
    Ok(Configuration { case, k, s: if case.uses_s() { s } else { 0 }, table, generators, constrained, point })
}

/// Formal matrix of an arc with the listed entries set to zero.
pub fn formal_matrix(arc: u32, k: usize, zero: &BTreeSet<Entry>) -> Mat<PPoly> {
    Mat::from_fn(k, k, |i, j| {
        let e = Entry::new(arc, i + 1, j + 1);
        if zero.contains(&e) {
            PPoly::zero()
        } else {
            PPoly::var(e)
        }
    })
}

/// Determinant of the leading (`upper`) or trailing `d x d` block; one when
/// `d` is zero.
pub fn corner_minor(m: &Mat<PPoly>, d: usize, upper: bool) -> PPoly {
    if d == 0 {
        return PPoly::one();
    }
    if upper {
        m.upper_left(d).det()
    } else {
        m.lower_right(d).det()
    }
}

fn power_traces(m: &Mat<PPoly>, k: usize, label: &str) -> Vec<Casimir> {
    let mut p = m.clone();
    let mut out = Vec::new();
    for n in 1..=k {
        out.push(Casimir { name: format!("tr {label}^{n}"), numerator: p.trace(), denominator: None });
        p = p.mul(m);
    }
    out
}

fn entry(arc: u32, i: usize, j: usize) -> PPoly {
    PPoly::var(Entry::new(arc, i, j))
}

fn antidiagonal_ratios(arc: u32, k: usize, label: &str) -> Vec<Casimir> {
    (1..=k / 2)
        .map(|i| Casimir {
            name: format!("C{i}({label})"),
            numerator: entry(arc, i, k + 1 - i),
            denominator: Some(entry(arc, k + 1 - i, i)),
        })
        .collect()
}

fn product(items: impl IntoIterator<Item = PPoly>) -> PPoly {
    items.into_iter().fold(PPoly::one(), |acc, p| acc.times(&p))
}

/// Minor-ratio Casimir of a restricted open arc. With `upper_denominator`
/// false the denominator is the trailing minor instead of the leading one.
pub fn restricted_minor_ratio(k: usize, d: usize, upper_denominator: bool) -> Casimir {
    let zero: BTreeSet<Entry> = below_antidiagonal(1, k).collect();
    let m = formal_matrix(1, k, &zero);
    let anti = product((1..=d).map(|i| entry(1, i, k + 1 - i).times(&entry(1, k + 1 - i, i))));
    Casimir {
        name: format!("C^{d}{}", if upper_denominator { "" } else { " (trailing denominator)" }),
        numerator: corner_minor(&m, d, true).times(&anti),
        denominator: Some(corner_minor(&m, k - d, upper_denominator)),
    }
}

/// The Casimirs listed for a configuration, as explicit polynomials.
pub fn casimir_catalog(case: Case, k: usize, s: usize) -> Result<Vec<Casimir>, PoissonError> {
    let cfg = configuration(case, k, s)?;
    let zero = &cfg.constrained;
    let mut out = Vec::new();
    match case {
        Case::SingleClosed | Case::SingleClosedRestricted => {
            out.extend(power_traces(&formal_matrix(1, k, zero), k, "M"));
            if case == Case::SingleClosedRestricted {
                out.extend(antidiagonal_ratios(1, k, "M"));
            }
        }
        Case::Open => {
            let m = formal_matrix(1, k, zero);
            for d in 1..=k {
                out.push(Casimir {
                    name: format!("UL{d}/LR{}", k - d),
                    numerator: corner_minor(&m, d, true),
                    denominator: Some(corner_minor(&m, k - d, false)),
                });
            }
        }
        Case::OpenRestricted => {
            for d in 0..=(k - 1) / 2 {
                out.push(restricted_minor_ratio(k, d, true));
            }
        }
        Case::S0s1 => {
            for r in 1..=s as u32 {
                out.extend(power_traces(&formal_matrix(r, k, zero), k, &format!("M{r}")));
            }
        }
        Case::S0s1Restricted => {
            for r in 1..s as u32 {
                out.extend(power_traces(&formal_matrix(r, k, zero), k, &format!("M{r}")));
            }
            out.extend(antidiagonal_ratios(s as u32, k, "MB"));
        }
        Case::S022 => {
            let p = formal_matrix(1, k, zero).mul(&formal_matrix(2, k, zero));
            out.extend(power_traces(&p, k, "(M1 M2)"));
            for i in 1..=k {
                out.push(Casimir {
                    name: format!("m1_{i},{}/m2_{},{i}", k + 1 - i, k + 1 - i),
                    numerator: entry(1, i, k + 1 - i),
                    denominator: Some(entry(2, k + 1 - i, i)),
                });
            }
        }
        Case::S013 => {
            let m = formal_matrix(1, k, zero);
            for d in 1..=k / 2 {
                let numerator = product(
                    [corner_minor(&m, d, true), corner_minor(&m, k - d, true)]
                        .into_iter()
                        .chain((1..=d).map(|i| entry(2, k + 1 - i, i).pow(2))),
                );
                let denominator = product(
                    (1..=d)
                        .map(|i| entry(1, i, k + 1 - i).pow(2))
                        .chain((d + 1..=k - d).map(|i| entry(1, i, k + 1 - i)))
                        .chain((1..=d).map(|i| entry(2, i, k + 1 - i).pow(2))),
                );
                out.push(Casimir { name: format!("C{d}"), numerator, denominator: Some(denominator) });
            }
        }
    }
    Ok(out)
}

/// Index quadruple `(i, j, k, l)` with the two disagreeing values.
pub type RuleMismatch = ((usize, usize, usize, usize), PPoly, PPoly);

/// Entry-by-entry comparison of two rules on the pair `(a, b)`; returns the
/// first index quadruple where `left ≠ sign · right`.
pub fn compare_rules(
    k: usize,
    left: &Rule,
    right: &Rule,
    sign: i64,
) -> Result<Option<RuleMismatch>, PoissonError> {
    let same = left.same_arc().or(right.same_arc()).unwrap_or(false);
    let (a, b) = if same { (1, 1) } else { (1, 2) };
    let lt = BracketTable::new(k, [((a, b), left.clone())])?;
    let rt = BracketTable::new(k, [((a, b), right.clone())])?;
    let idx = || (1..=k).flat_map(move |i| (1..=k).map(move |j| (i, j)));
    for (i, j) in idx() {
        for (kk, l) in idx() {
            let x = Entry::new(a, i, j);
            let y = Entry::new(b, kk, l);
            let lv = lt.generator(&x, &y)?;
            let rv = rt.generator(&x, &y)?;
            if lv != rv.scale(&rat(sign)) {
                return Ok(Some(((i, j, kk, l), lv, rv)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_values() {
        assert_eq!((step(-3), step(0), step(5)), (0, 1, 2));
    }

    #[test]
    fn open_self_example() {
        let t = BracketTable::new(3, [((1, 1), Rule::Printed(PrintedTable::OpenSelf))]).unwrap();
        let v = t.generator(&Entry::new(1, 1, 1), &Entry::new(1, 1, 2)).unwrap();
        assert_eq!(v, entry(1, 1, 1).times(&entry(1, 1, 2)));
    }

    #[test]
    fn unknown_pair_is_an_error() {
        let t = BracketTable::new(2, [((1, 1), Rule::derived("H"))]).unwrap();
        let e = t.bracket(&entry(1, 1, 1), &entry(2, 1, 1)).unwrap_err();
        assert_eq!(e, PoissonError::UnknownPair(1, 2));
    }

    #[test]
    fn rule_arity_is_checked() {
        let e = BracketTable::new(2, [((1, 2), Rule::derived("H"))]).unwrap_err();
        assert!(matches!(e, PoissonError::RuleMismatch { .. }));
        let e = BracketTable::new(2, [((1, 2), Rule::derived("r2143")), ((2, 1), Rule::derived("r2143"))]).unwrap_err();
        assert_eq!(e, PoissonError::DuplicatePair(2, 1));
    }

    #[test]
    fn bareiss_matches_known_ranks() {
        let r = |v: &[&[i64]]| v.iter().map(|row| row.iter().map(|x| BigInt::from(*x)).collect()).collect();
        assert_eq!(integer_rank(r(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(integer_rank(r(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]])), 2);
        assert_eq!(integer_rank(r(&[&[2, 0, 1], &[0, 3, 0], &[4, 0, 2]])), 2);
        assert_eq!(integer_rank(Vec::new()), 0);
    }

    #[test]
    fn catalog_shapes() {
        assert_eq!(casimir_catalog(Case::SingleClosed, 3, 0).unwrap().len(), 3);
        let names: Vec<String> = casimir_catalog(Case::S022, 2, 0).unwrap().into_iter().map(|c| c.name).collect();
        assert_eq!(names, ["tr (M1 M2)^1", "tr (M1 M2)^2", "m1_1,2/m2_2,1", "m1_2,1/m2_1,2"]);
        assert_eq!(casimir_catalog(Case::S013, 2, 0).unwrap().len(), 1);
        assert!("s0s1".parse::<Case>().is_ok());
        assert!("torus".parse::<Case>().is_err());
    }
}
