//! Sparse exact operators on `(C^N)^{⊗m}` and the two Brauer actions.
//!
//! Multi-indices are encoded in base `N` with leg 1 most significant. Rows
//! correspond to the top row of a diagram, columns to the bottom row.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::brauer::{diagram_to_word, BrauerElement, Diagram, GenWord, Generator};
use crate::ring::{int, RatFunc, Rational, Ring, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("symplectic action needs even N, got {0}")]
    OddSymplectic(usize),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("leg index {leg} out of range for {legs} legs")]
    LegOutOfRange { leg: usize, legs: usize },
    #[error("operator shapes differ: (N={0}, m={1}) vs (N={2}, m={3})")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("tensor space too large: {0}^{1}")]
    TooLarge(usize, usize),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Brauer(#[from] crate::brauer::BrauerError),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "o")]
    Orthogonal,
    #[serde(rename = "sp")]
    Symplectic,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Orthogonal => "o",
            Family::Symplectic => "sp",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "o" | "orth" | "orthogonal" => Some(Family::Orthogonal),
            "sp" | "symp" | "symplectic" => Some(Family::Symplectic),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

/// Family and dimension of the defining representation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct ActionConfig {
    pub family: Family,
    #[serde(rename = "N")]
    pub dim: usize,
}

impl ActionConfig {
    pub fn new(family: Family, dim: usize) -> Result<Self, TensorError> {
        if dim == 0 {
            return Err(TensorError::ZeroDimension);
        }
        if family == Family::Symplectic && !dim.is_multiple_of(2) {
            return Err(TensorError::OddSymplectic(dim));
        }
        Ok(ActionConfig { family, dim })
    }

    pub fn orthogonal(dim: usize) -> Self {
        ActionConfig::new(Family::Orthogonal, dim).expect("valid orthogonal dimension")
    }

    pub fn symplectic(dim: usize) -> Self {
        ActionConfig::new(Family::Symplectic, dim).expect("valid symplectic dimension")
    }

    /// Rank `n = floor(N/2)`.
    pub fn rank(&self) -> usize {
        self.dim / 2
    }

    /// `i' = N - i + 1` (1-based).
    pub fn prime(&self, i: usize) -> usize {
        self.dim + 1 - i
    }

    /// `eps_i`: always 1 for the orthogonal family; `+1` for `i <= n` and
    /// `-1` otherwise for the symplectic one.
    pub fn sign(&self, i: usize) -> i64 {
        match self.family {
            Family::Orthogonal => 1,
            Family::Symplectic => {
                if i <= self.rank() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// `theta_ij` in `F_ij = E_ij - theta_ij E_j'i'`.
    pub fn theta(&self, i: usize, j: usize) -> i64 {
        self.sign(i) * self.sign(j)
    }

    /// Value of the Brauer parameter: `N` or `-N`.
    pub fn omega(&self) -> Rational {
        match self.family {
            Family::Orthogonal => int(self.dim as i64),
            Family::Symplectic => int(-(self.dim as i64)),
        }
    }

    /// Sign attached to each Brauer generator by the action.
    pub fn generator_sign(&self) -> i64 {
        match self.family {
            Family::Orthogonal => 1,
            Family::Symplectic => -1,
        }
    }

    /// `epsilon` of the rho-shift: 0 for `o_2n`, 1/2 for `o_2n+1`, 1 for `sp_2n`.
    pub fn rho_epsilon(&self) -> Rational {
        match self.family {
            Family::Symplectic => int(1),
            Family::Orthogonal if self.dim % 2 == 1 => crate::ring::rat(1, 2),
            Family::Orthogonal => int(0),
        }
    }

    pub fn lie_name(&self) -> String {
        format!("{}{}", self.family.tag(), self.dim)
    }
}

/// Upper bound on `N^m` accepted by the tensor code.
pub const MAX_TENSOR_SIZE: usize = 1 << 16;

pub fn space_size(dim: usize, legs: usize) -> Result<usize, TensorError> {
    let mut size = 1usize;
    for _ in 0..legs {
        size = size
            .checked_mul(dim)
            .filter(|&s| s <= MAX_TENSOR_SIZE)
            .ok_or(TensorError::TooLarge(dim, legs))?;
    }
    Ok(size)
}

/// 1-based multi-index of `code`.
pub fn decode(dim: usize, legs: usize, mut code: u32) -> Vec<usize> {
    let mut out = vec![0; legs];
    for slot in out.iter_mut().rev() {
        *slot = (code as usize % dim) + 1;
        code /= dim as u32;
    }
    out
}

pub fn encode(dim: usize, idx: &[usize]) -> u32 {
    idx.iter().fold(0u32, |acc, &i| acc * dim as u32 + (i - 1) as u32)
}

/// Sparse operator on `(C^N)^{⊗m}` with entries in `S`.
#[derive(Clone, PartialEq)]
pub struct TensorOp<S> {
    dim: usize,
    legs: usize,
    rows: BTreeMap<u32, BTreeMap<u32, S>>,
}

impl<S: Ring> TensorOp<S> {
    pub fn zero(dim: usize, legs: usize) -> Self {
        TensorOp {
            dim,
            legs,
            rows: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize, legs: usize) -> Result<Self, TensorError> {
        let size = space_size(dim, legs)?;
        let mut op = TensorOp::zero(dim, legs);
        for k in 0..size as u32 {
            op.set(k, k, S::one());
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn nnz(&self) -> usize {
        self.rows.values().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, row: u32, col: u32) -> S {
        self.rows
            .get(&row)
            .and_then(|r| r.get(&col))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    /// Entry at 1-based multi-indices.
    pub fn entry(&self, row: &[usize], col: &[usize]) -> S {
        self.get(encode(self.dim, row), encode(self.dim, col))
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, &S)> {
        self.rows
            .iter()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (*r, *c, v)))
    }

    pub fn set(&mut self, row: u32, col: u32, v: S) {
        if v.is_zero() {
            if let Some(r) = self.rows.get_mut(&row) {
                r.remove(&col);
                if r.is_empty() {
                    self.rows.remove(&row);
                }
            }
            return;
        }
        self.rows.entry(row).or_default().insert(col, v);
    }

    pub fn add_to(&mut self, row: u32, col: u32, v: &S) {
        if v.is_zero() {
            return;
        }
        let cur = self.get(row, col);
        self.set(row, col, cur.add_ref(v));
    }

    fn check_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.dim != other.dim || self.legs != other.legs {
            return Err(TensorError::ShapeMismatch(
                self.dim, self.legs, other.dim, other.legs,
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (r, c, v) in other.entries() {
            out.add_to(r, c, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.add(&other.scale(&S::one().neg_ref()))
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = TensorOp::zero(self.dim, self.legs);
        if s.is_zero() {
            return out;
        }
        for (r, c, v) in self.entries() {
            out.set(r, c, v.mul_ref(s));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_shape(other)?;
        let mut out = TensorOp::zero(self.dim, self.legs);
        for (r, row) in &self.rows {
            let mut acc: BTreeMap<u32, S> = BTreeMap::new();
            for (k, a) in row {
                if let Some(orow) = other.rows.get(k) {
                    for (c, b) in orow {
                        let t = a.mul_ref(b);
                        match acc.get_mut(c) {
                            Some(x) => x.add_assign_ref(&t),
                            None => {
                                acc.insert(*c, t);
                            }
                        }
                    }
                }
            }
            acc.retain(|_, v| !v.is_zero());
            if !acc.is_empty() {
                out.rows.insert(*r, acc);
            }
        }
        Ok(out)
    }

    /// Contract leg `leg` (1-based), giving an operator on `m - 1` legs.
    pub fn partial_trace(&self, leg: usize) -> Result<Self, TensorError> {
        if leg == 0 || leg > self.legs {
            return Err(TensorError::LegOutOfRange {
                leg,
                legs: self.legs,
            });
        }
        let mut out = TensorOp::zero(self.dim, self.legs - 1);
        for (r, c, v) in self.entries() {
            let mut ri = decode(self.dim, self.legs, r);
            let mut ci = decode(self.dim, self.legs, c);
            if ri[leg - 1] != ci[leg - 1] {
                continue;
            }
            ri.remove(leg - 1);
            ci.remove(leg - 1);
            out.add_to(encode(self.dim, &ri), encode(self.dim, &ci), v);
        }
        Ok(out)
    }

    pub fn full_trace(&self) -> S {
        let mut acc = S::zero();
        for (r, row) in &self.rows {
            if let Some(v) = row.get(r) {
                acc.add_assign_ref(v);
            }
        }
        acc
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> TensorOp<T> {
        let mut out = TensorOp::zero(self.dim, self.legs);
        for (r, c, v) in self.entries() {
            out.set(r, c, f(v));
        }
        out
    }

    pub fn try_map<T: Ring, E>(&self, f: impl Fn(&S) -> Result<T, E>) -> Result<TensorOp<T>, E> {
        let mut out = TensorOp::zero(self.dim, self.legs);
        for (r, c, v) in self.entries() {
            out.set(r, c, f(v)?);
        }
        Ok(out)
    }

    /// Is this `c * identity` for some scalar `c`? Returns `c`.
    pub fn as_scalar(&self) -> Option<S> {
        let size = space_size(self.dim, self.legs).ok()?;
        let c = self.get(0, 0);
        for k in 0..size as u32 {
            if self.get(k, k) != c {
                return None;
            }
        }
        (self.nnz() == if c.is_zero() { 0 } else { size }).then_some(c)
    }
}

impl TensorOp<RatFunc> {
    pub fn specialize(&self, omega: &Rational) -> Result<TensorOp<Rational>, RingError> {
        self.try_map(|v| v.eval(omega))
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for TensorOp<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TensorOp(N={}, m={}) {{", self.dim, self.legs)?;
        for (r, c, v) in self.entries() {
            writeln!(
                f,
                "  {:?} {:?}: {}",
                decode(self.dim, self.legs, r),
                decode(self.dim, self.legs, c),
                v
            )?;
        }
        write!(f, "}}")
    }
}

fn check_legs(m: usize, a: usize, b: usize) -> Result<(), TensorError> {
    if a == 0 || a > m {
        return Err(TensorError::LegOutOfRange { leg: a, legs: m });
    }
    if b == 0 || b > m || b <= a {
        return Err(TensorError::LegOutOfRange { leg: b, legs: m });
    }
    Ok(())
}

/// `P_ab`, swapping legs `a` and `b`.
pub fn op_p(cfg: &ActionConfig, m: usize, a: usize, b: usize) -> Result<TensorOp<Rational>, TensorError> {
    check_legs(m, a, b)?;
    let size = space_size(cfg.dim, m)?;
    let mut op = TensorOp::zero(cfg.dim, m);
    for col in 0..size as u32 {
        let mut idx = decode(cfg.dim, m, col);
        idx.swap(a - 1, b - 1);
        op.set(encode(cfg.dim, &idx), col, int(1));
    }
    Ok(op)
}

/// `Q_ab`: `sum e_ij ⊗ e_i'j'` (orthogonal) or `sum eps_i eps_j e_ij ⊗ e_i'j'`
/// (symplectic) on legs `a`, `b`.
pub fn op_q(cfg: &ActionConfig, m: usize, a: usize, b: usize) -> Result<TensorOp<Rational>, TensorError> {
    check_legs(m, a, b)?;
    let size = space_size(cfg.dim, m)?;
    let mut op = TensorOp::zero(cfg.dim, m);
    for col in 0..size as u32 {
        let idx = decode(cfg.dim, m, col);
        let j = idx[a - 1];
        if idx[b - 1] != cfg.prime(j) {
            continue;
        }
        for i in 1..=cfg.dim {
            let mut row = idx.clone();
            row[a - 1] = i;
            row[b - 1] = cfg.prime(i);
            op.set(encode(cfg.dim, &row), col, int(cfg.sign(i) * cfg.sign(j)));
        }
    }
    Ok(op)
}

/// Image of a generator: `±P_ab` or `±Q_ab`.
pub fn rep_generator(cfg: &ActionConfig, m: usize, g: &Generator) -> Result<TensorOp<Rational>, TensorError> {
    let (a, b) = g.legs();
    let op = match g {
        Generator::S(..) => op_p(cfg, m, a, b)?,
        Generator::Eps(..) => op_q(cfg, m, a, b)?,
    };
    Ok(op.scale(&int(cfg.generator_sign())))
}

/// Image of a word as the ordered product of generator images.
pub fn rep_word(cfg: &ActionConfig, m: usize, w: &GenWord) -> Result<TensorOp<Rational>, TensorError> {
    let mut acc = TensorOp::identity(cfg.dim, m)?;
    for g in w.generators() {
        acc = acc.mul(&rep_generator(cfg, m, g)?)?;
    }
    Ok(acc)
}

/// Apply a generator image to a sparse integer vector.
fn apply_generator(cfg: &ActionConfig, m: usize, g: &Generator, v: &HashMap<u32, i64>) -> HashMap<u32, i64> {
    let sign = cfg.generator_sign();
    let (a, b) = g.legs();
    let mut out: HashMap<u32, i64> = HashMap::with_capacity(v.len());
    for (&code, &x) in v {
        let mut idx = decode(cfg.dim, m, code);
        match g {
            Generator::S(..) => {
                idx.swap(a - 1, b - 1);
                *out.entry(encode(cfg.dim, &idx)).or_insert(0) += sign * x;
            }
            Generator::Eps(..) => {
                let j = idx[a - 1];
                if idx[b - 1] != cfg.prime(j) {
                    continue;
                }
                for i in 1..=cfg.dim {
                    idx[a - 1] = i;
                    idx[b - 1] = cfg.prime(i);
                    *out.entry(encode(cfg.dim, &idx)).or_insert(0) += sign * cfg.sign(i) * cfg.sign(j) * x;
                }
            }
        }
    }
    out.retain(|_, x| *x != 0);
    out
}

/// Entries `(row, col, value)` of the image of a diagram, computed column by
/// column from its generator word. Entries are small integers.
pub fn rep_diagram_entries(cfg: &ActionConfig, d: &Diagram) -> Result<Vec<(u32, u32, i64)>, TensorError> {
    let m = d.m();
    let size = space_size(cfg.dim, m)?;
    let word = diagram_to_word(d);
    let mut out = Vec::new();
    for col in 0..size as u32 {
        let mut v: HashMap<u32, i64> = HashMap::from([(col, 1)]);
        for g in word.generators().iter().rev() {
            v = apply_generator(cfg, m, g, &v);
            if v.is_empty() {
                break;
            }
        }
        let mut entries: Vec<(u32, i64)> = v.into_iter().collect();
        entries.sort_unstable();
        out.extend(entries.into_iter().map(|(r, x)| (r, col, x)));
    }
    out.sort_unstable();
    Ok(out)
}

pub fn rep_diagram(cfg: &ActionConfig, d: &Diagram) -> Result<TensorOp<Rational>, TensorError> {
    let mut op = TensorOp::zero(cfg.dim, d.m());
    for (r, c, x) in rep_diagram_entries(cfg, d)? {
        op.set(r, c, int(x));
    }
    Ok(op)
}

/// Image of a Brauer element with `omega` kept symbolic.
pub fn rep_element(cfg: &ActionConfig, x: &BrauerElement) -> Result<TensorOp<RatFunc>, TensorError> {
    let mut op = TensorOp::zero(cfg.dim, x.m());
    for (d, c) in x.terms() {
        for (r, col, v) in rep_diagram_entries(cfg, d)? {
            op.add_to(r, col, &c.scale_rational(&int(v)));
        }
    }
    Ok(op)
}

/// Image of a Brauer element after substituting `omega := ±N`; fails on a
/// pole of any coefficient.
pub fn rep_element_at(cfg: &ActionConfig, x: &BrauerElement) -> Result<TensorOp<Rational>, TensorError> {
    let omega = cfg.omega();
    let mut op = TensorOp::zero(cfg.dim, x.m());
    for (d, c) in x.terms() {
        let c = c.eval(&omega)?;
        for (r, col, v) in rep_diagram_entries(cfg, d)? {
            op.add_to(r, col, &(&c * int(v)));
        }
    }
    Ok(op)
}

/// `rep(x_b)` built directly from `P` and `Q` as `sum_{a<b} (P_ab - Q_ab)`,
/// multiplied by the generator sign of the family.
pub fn jucys_murphy_image(cfg: &ActionConfig, m: usize, b: usize) -> Result<TensorOp<Rational>, TensorError> {
    let mut acc = TensorOp::zero(cfg.dim, m);
    for a in 1..b {
        acc = acc.add(&op_p(cfg, m, a, b)?)?.sub(&op_q(cfg, m, a, b)?)?;
    }
    Ok(acc.scale(&int(cfg.generator_sign())))
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TensorEntryJson(pub Vec<usize>, pub Vec<usize>, pub String);

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TensorOpJson {
    #[serde(rename = "N")]
    pub dim: usize,
    pub m: usize,
    pub entries: Vec<TensorEntryJson>,
}

impl<S: Ring + fmt::Display> From<&TensorOp<S>> for TensorOpJson {
    fn from(op: &TensorOp<S>) -> Self {
        TensorOpJson {
            dim: op.dim,
            m: op.legs,
            entries: op
                .entries()
                .map(|(r, c, v)| {
                    TensorEntryJson(
                        decode(op.dim, op.legs, r),
                        decode(op.dim, op.legs, c),
                        v.to_string(),
                    )
                })
                .collect(),
        }
    }
}

impl TryFrom<&TensorOpJson> for TensorOp<Rational> {
    type Error = RingError;
    fn try_from(j: &TensorOpJson) -> Result<Self, RingError> {
        let mut op = TensorOp::zero(j.dim, j.m);
        for TensorEntryJson(r, c, v) in &j.entries {
            let v = crate::ring::parse_rational(v)?;
            if !v.is_zero() {
                op.set(encode(j.dim, r), encode(j.dim, c), v);
            }
        }
        Ok(op)
    }
}
