//! Exchange-relation templates, their verification on concrete quantum
//! matrices and their first-order expansion into bracket rules.

use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use crate::poisson::{Entry, PPoly};
use crate::qtorus::{Algebra, QElement};
use crate::ring::{Mat, Ring};
use crate::rmatrix::{self, RMatrix, RMatrixError};
use crate::surface::{self, lift_scalar, EndpointConfig, FatGraph, SurfaceError, Walk};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RelationError {
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("matrices are {found}x{found} but the R-matrix acts on k = {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("matrices live over different algebras")]
    Context,
    #[error("configuration matches no relation: {0}")]
    Unclassified(String),
    #[error("unsupported exponent: {0}")]
    UnsupportedExponent(String),
    #[error(transparent)]
    RMatrix(#[from] RMatrixError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// A symbol in a two-slot tensor word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Factor {
    /// First matrix placed in slot 1.
    M1,
    /// Second matrix placed in slot 2.
    M2,
    R,
    /// `R^{-1}`
    Ri,
    /// `R^T`
    RT,
    /// `R^{-T}`
    RmT,
}

impl Factor {
    fn parse(s: &str) -> Factor {
        match s {
            "M1" => Factor::M1,
            "M2" => Factor::M2,
            "R" => Factor::R,
            "Ri" => Factor::Ri,
            "RT" => Factor::RT,
            "RmT" => Factor::RmT,
            _ => panic!("bad factor {s}"),
        }
    }

    fn is_r(self) -> bool {
        !matches!(self, Factor::M1 | Factor::M2)
    }
}

/// Which slots may carry integer powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Powers {
    None,
    First,
    Second,
    Both,
}

#[derive(Clone, Debug, Serialize)]
pub struct Template {
    pub id: &'static str,
    pub lhs: Vec<Factor>,
    pub rhs: Vec<Factor>,
    /// Both slots hold the same matrix.
    pub same_arc: bool,
    pub powers: Powers,
}

// id, lhs, rhs, same arc, powers
const CATALOG: &[(&str, &str, &str, bool, Powers)] = &[
    ("basic1", "M1 M2", "M2 M1 R", false, Powers::None),
    ("basic1dual", "M1 M2 RT", "M2 M1", false, Powers::None),
    ("basic2", "RT M1 M2", "M2 M1 R", true, Powers::None),
    ("relcomp1", "M1 M2", "R M2 M1 R", false, Powers::None),
    ("relcomp2", "M1 M2", "R M2 M1 RmT", false, Powers::None),
    ("relcomp3", "M1 M2", "RmT M2 M1 R", false, Powers::None),
    ("relcomp4", "M1 M2", "RmT M2 M1 RmT", false, Powers::None),
    ("r2143", "M1 R M2 Ri", "R M2 Ri M1", false, Powers::Both),
    ("r3241", "M1 RmT M2 RT", "R M2 Ri M1", false, Powers::Second),
    ("r3142", "M1 RmT M2 Ri", "R M2 Ri M1", false, Powers::None),
    ("H", "RT M1 RmT M2", "M2 Ri M1 R", true, Powers::First),
    ("H1", "M1 RmT M2 RT", "R M2 Ri M1", true, Powers::Second),
    ("r21-3x", "M1 M2", "M2 Ri M1 R", false, Powers::First),
    ("eye", "M1 RmT M2", "M2 Ri M1", false, Powers::None),
];

pub fn catalog() -> Vec<Template> {
    CATALOG
        .iter()
        .map(|(id, l, r, same, powers)| Template {
            id,
            lhs: l.split_whitespace().map(Factor::parse).collect(),
            rhs: r.split_whitespace().map(Factor::parse).collect(),
            same_arc: *same,
            powers: *powers,
        })
        .collect()
}

pub fn template(id: &str) -> Result<Template, RelationError> {
    catalog().into_iter().find(|t| t.id == id).ok_or_else(|| RelationError::UnknownTemplate(id.into()))
}

/// `R`, `R^{-1}`, `R^T`, `R^{-T}` for one R-matrix.
#[derive(Clone, Debug)]
pub struct RFamily {
    pub k: usize,
    pub r: RMatrix,
    pub r_inv: RMatrix,
    pub r_t: RMatrix,
    pub r_inv_t: RMatrix,
}

impl RFamily {
    pub fn new(r: RMatrix) -> Result<RFamily, RelationError> {
        let n = r.rows();
        let k = (1..=n).find(|k| k * k == n).filter(|_| r.is_square()).ok_or(RMatrixError::Shape(r.rows(), r.cols()))?;
        let r_inv = rmatrix::invert(&r)?;
        let r_t = r.transpose();
        let r_inv_t = r_inv.transpose();
        Ok(RFamily { k, r, r_inv, r_t, r_inv_t })
    }

    pub fn kulish_sklyanin(k: usize) -> Result<RFamily, RelationError> {
        RFamily::new(rmatrix::kulish_sklyanin(k)?)
    }

    pub fn get(&self, f: Factor) -> &RMatrix {
        match f {
            Factor::R => &self.r,
            Factor::Ri => &self.r_inv,
            Factor::RT => &self.r_t,
            Factor::RmT => &self.r_inv_t,
            Factor::M1 | Factor::M2 => unreachable!("not an R factor"),
        }
    }

    fn lifted(&self, alg: &Arc<Algebra>) -> [Mat<QElement>; 4] {
        [
            lift_scalar(alg, &self.r),
            lift_scalar(alg, &self.r_inv),
            lift_scalar(alg, &self.r_t),
            lift_scalar(alg, &self.r_inv_t),
        ]
    }
}

/// First differing entry of the two sides, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub row: usize,
    pub col: usize,
    pub difference: String,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "entry ({}, {}): lhs - rhs = {}", self.row, self.col, self.difference)
    }
}

fn evaluate(side: &[Factor], m1: &Mat<QElement>, m2: &Mat<QElement>, lifted: &[Mat<QElement>; 4]) -> Mat<QElement> {
    let mut acc: Option<Mat<QElement>> = None;
    for f in side {
        let x = match f {
            Factor::M1 => m1,
            Factor::M2 => m2,
            Factor::R => &lifted[0],
            Factor::Ri => &lifted[1],
            Factor::RT => &lifted[2],
            Factor::RmT => &lifted[3],
        };
        acc = Some(match acc {
            None => x.clone(),
            Some(a) => a.mul(x),
        });
    }
    acc.expect("nonempty side")
}

/// Expands both sides of `t` with `first` in slot 1 and `second` in slot 2.
pub fn verify(t: &Template, first: &Mat<QElement>, second: &Mat<QElement>, r: &RFamily) -> Result<Option<Witness>, RelationError> {
    for m in [first, second] {
        if m.rows() != r.k || !m.is_square() {
            return Err(RelationError::Dimension { expected: r.k, found: m.rows() });
        }
    }
    let alg = first.get(0, 0).algebra().clone();
    if first.entries().chain(second.entries()).any(|e| **e.algebra() != *alg) {
        return Err(RelationError::Context);
    }
    let lifted = r.lifted(&alg);
    let m1 = first.kron_left(r.k);
    let m2 = second.kron_right(r.k);
    let lhs = evaluate(&t.lhs, &m1, &m2, &lifted);
    let rhs = evaluate(&t.rhs, &m1, &m2, &lifted);
    Ok(lhs.first_mismatch(&rhs).map(|w| Witness { row: w.row, col: w.col, difference: w.left.minus(&w.right).to_string() }))
}

/// A matrix with its exact inverse, so that negative powers are available.
#[derive(Clone, Debug)]
pub struct Invertible {
    pub matrix: Mat<QElement>,
    pub inverse: Option<Mat<QElement>>,
}

impl Invertible {
    pub fn power(&self, p: i32) -> Result<Mat<QElement>, RelationError> {
        if p >= 0 {
            return Ok(self.matrix.pow(p as u32));
        }
        let inv = self
            .inverse
            .as_ref()
            .ok_or_else(|| RelationError::UnsupportedExponent(format!("{p} needs an inverse")))?;
        Ok(inv.pow(p.unsigned_abs()))
    }
}

/// Verifies `t` with `first^p` in slot 1 and `second^m` in slot 2.
pub fn verify_powered(
    t: &Template,
    first: &Invertible,
    p: i32,
    second: &Invertible,
    m: i32,
    r: &RFamily,
) -> Result<Option<Witness>, RelationError> {
    let allowed = match t.powers {
        Powers::None => p == 1 && m == 1,
        Powers::First => m == 1,
        Powers::Second => p == 1,
        Powers::Both => true,
    };
    if !allowed {
        return Err(RelationError::UnsupportedExponent(format!("template {} does not take powers ({p}, {m})", t.id)));
    }
    verify(t, &first.power(p)?, &second.power(m)?, r)
}

/// Chooses the relation for an ordered pair of arcs from their endpoint
/// threads. For a single arc pass the same configuration twice with `same_arc`.
pub fn classify_pair(a: &EndpointConfig, b: &EndpointConfig, same_arc: bool) -> Result<&'static str, RelationError> {
    let unclassified = || RelationError::Unclassified(format!("{a:?} / {b:?}"));
    if same_arc {
        return match a.target {
            Some(t) if t.cusp == a.source.cusp => {
                if a.source.thread > t.thread {
                    Ok("H")
                } else {
                    Err(unclassified())
                }
            }
            Some(_) => Ok("basic2"),
            None => Err(unclassified()),
        };
    }
    let (Some(at), Some(bt)) = (a.target, b.target) else {
        // partial words sharing their source
        if a.source.cusp == b.source.cusp {
            return Ok(if a.source.thread < b.source.thread { "basic1" } else { "basic1dual" });
        }
        return Err(unclassified());
    };
    let a_closed = at.cusp == a.source.cusp;
    let b_closed = bt.cusp == b.source.cusp;
    if a_closed && b_closed && a.source.cusp == b.source.cusp {
        let (i, j) = (a.source.thread, at.thread);
        let (k, l) = (b.source.thread, bt.thread);
        let (alo, ahi) = (i.min(j), i.max(j));
        let (blo, bhi) = (k.min(l), k.max(l));
        if ahi < blo {
            return Ok("r2143");
        }
        if i > j && alo < blo && bhi < ahi {
            return Ok("r3241");
        }
        if i > j && k > l && alo < blo && blo < ahi && ahi < bhi {
            return Ok("r3142");
        }
        return Err(unclassified());
    }
    if a_closed && !b_closed && b.source.cusp == a.source.cusp {
        if b.source.thread > a.source.thread.max(at.thread) {
            return Ok("r21-3x");
        }
        return Err(unclassified());
    }
    if !a_closed && !b_closed && a.source.cusp == bt.cusp && at.cusp == b.source.cusp && at.cusp != a.source.cusp {
        // opposite directions between the same two cusps
        if a.source.thread > bt.thread && at.thread < b.source.thread {
            return Ok("eye");
        }
        return Err(unclassified());
    }
    if !a_closed && !b_closed && a.source.cusp == b.source.cusp {
        if at.cusp == bt.cusp {
            let (i, j, k, l) = (a.source.thread, at.thread, b.source.thread, bt.thread);
            return Ok(match (i < k, j < l) {
                (true, true) => "relcomp1",
                (false, true) => "relcomp2",
                (true, false) => "relcomp3",
                (false, false) => "relcomp4",
            });
        }
        return Ok(if a.source.thread < b.source.thread { "basic1" } else { "basic1dual" });
    }
    Err(unclassified())
}

/// Template chosen for a pair of arcs and the verification outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub template: &'static str,
    pub witness: Option<Witness>,
}

/// Classifies `first` against `second` (or against itself when `second` is
/// `None`) and verifies the chosen template on the k = 2 monodromies.
pub fn check_arcs(g: &FatGraph, first: &Walk, second: Option<&Walk>, r: &RFamily) -> Result<PairCheck, RelationError> {
    let (template, witness) = match second {
        None => {
            let c = surface::endpoint_configs(g, &[first])?[0];
            let id = classify_pair(&c, &c, true)?;
            let m = surface::monodromy(g, first);
            (id, verify(&template(id)?, &m, &m, r)?)
        }
        Some(b) => {
            let c = surface::endpoint_configs(g, &[first, b])?;
            let id = classify_pair(&c[0], &c[1], false)?;
            (id, verify(&template(id)?, &surface::monodromy(g, first), &surface::monodromy(g, b), r)?)
        }
    };
    Ok(PairCheck { template, witness })
}

/// `{a_ij, b_kl}` for all index quadruples, as polynomials in the formal
/// entries of the slot-1 matrix (arc 0) and slot-2 matrix (arc 1, or arc 0
/// for single-arc templates).
#[derive(Clone, Debug)]
pub struct BracketRule {
    pub template: &'static str,
    pub k: usize,
    pub same_arc: bool,
    table: Vec<PPoly>,
}

impl BracketRule {
    /// `{a_{i,j}, b_{kk,l}}` with 1-based indices.
    pub fn get(&self, i: usize, j: usize, kk: usize, l: usize) -> &PPoly {
        let k = self.k;
        &self.table[(((i - 1) * k + (kk - 1)) * k + (j - 1)) * k + (l - 1)]
    }
}

fn formal(arc: u32, k: usize) -> Mat<PPoly> {
    Mat::from_fn(k, k, |i, j| PPoly::var(Entry::new(arc, i + 1, j + 1)))
}

fn first_order_word(word: &[Factor], m1: &Mat<PPoly>, m2: &Mat<PPoly>, r: &Mat<PPoly>) -> Mat<PPoly> {
    let n = m1.rows();
    let mut total = Mat::zeros(n, n, &PPoly::zero());
    for (p, f) in word.iter().enumerate() {
        if !f.is_r() {
            continue;
        }
        let sub = match f {
            Factor::R => r.clone(),
            Factor::Ri => r.neg(),
            Factor::RT => r.transpose(),
            Factor::RmT => r.transpose().neg(),
            _ => unreachable!(),
        };
        let mut prod = Mat::identity(n, &PPoly::zero());
        for (q, g) in word.iter().enumerate() {
            match g {
                Factor::M1 => prod = prod.mul(m1),
                Factor::M2 => prod = prod.mul(m2),
                _ if q == p => prod = prod.mul(&sub),
                _ => {}
            }
        }
        total = total.add(&prod);
    }
    total
}

/// First-order expansion of a template with `R = 1 + iπħ r`, giving the
/// bracket `{M1, M2} = FO(rhs) − FO(lhs)`.
pub fn semiclassical_expand(t: &Template, k: usize) -> BracketRule {
    let r: Mat<PPoly> = rmatrix::semiclassical_r(k).map(|c: &BigRational| PPoly::constant(c.clone()));
    let a = formal(0, k);
    let b = if t.same_arc { a.clone() } else { formal(1, k) };
    let m1 = a.kron_left(k);
    let m2 = b.kron_right(k);
    let bracket = first_order_word(&t.rhs, &m1, &m2, &r).sub(&first_order_word(&t.lhs, &m1, &m2, &r));
    let mut table = Vec::with_capacity(k * k * k * k);
    for row in 0..k * k {
        for col in 0..k * k {
            table.push(bracket.get(row, col).clone());
        }
    }
    BracketRule { template: t.id, k, same_arc: t.same_arc, table }
}
