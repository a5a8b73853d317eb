//! `o_N` and `sp_2n` in the split realization `F_ij = E_ij - theta_ij E_j'i'`,
//! their enveloping algebras in PBW normal form, centrality and the
//! Harish-Chandra projection.
//!
//! Basis order (the PBW order): lowering generators (`i > j`), then Cartan
//! generators `F_11 .. F_nn`, then raising generators (`i < j`); each class
//! sorted lexicographically by `(i, j)`. A PBW monomial is a non-decreasing
//! list of basis indices.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::{int, MPoly, MPolyJson, Rational, Ring, ToMPoly, Var};
use crate::tensor::{ActionConfig, Family};

pub type Mono = Vec<u8>;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum GenClass {
    Lowering,
    Cartan,
    Raising,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GenInfo {
    pub i: usize,
    pub j: usize,
    pub class: GenClass,
}

impl fmt::Display for GenInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F[{},{}]", self.i, self.j)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("bracket of {0} and {1} leaves the span of the basis")]
    NotClosed(String, String),
    #[error("structure constant of {0} in [{1},{2}] is not an integer")]
    NonIntegral(String, String, String),
    #[error("element is not central: [z, {generator}] = {witness}")]
    NonCentral { generator: String, witness: String },
    #[error("unknown generator F[{0},{1}]")]
    UnknownGenerator(usize, usize),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
}

/// Sparse integer N×N matrix, 1-based `(row, col, value)` entries.
pub type SparseMat = Vec<(usize, usize, i64)>;

/// `[a][b]` holds the sparse expansion of `[F_a, F_b]`.
type StructureTable = Vec<Vec<Vec<(u8, i64)>>>;

#[derive(Clone, Debug)]
pub struct LieBasis {
    cfg: ActionConfig,
    gens: Vec<GenInfo>,
    defmat: Vec<SparseMat>,
    /// `fmat[i-1][j-1] = Some((index, sign))` when `F_ij = sign * x_index`.
    fmat: Vec<Vec<Option<(u8, i64)>>>,
    /// `[x_a, x_b] = sum c * x_c`.
    structure: StructureTable,
}

fn gl_defining(cfg: &ActionConfig, i: usize, j: usize) -> BTreeMap<(usize, usize), i64> {
    let mut m = BTreeMap::new();
    *m.entry((i, j)).or_insert(0) += 1;
    *m.entry((cfg.prime(j), cfg.prime(i))).or_insert(0) -= cfg.theta(i, j);
    m.retain(|_, v| *v != 0);
    m
}

fn dense(dim: usize, m: &SparseMat) -> Vec<Vec<i64>> {
    let mut d = vec![vec![0i64; dim]; dim];
    for &(r, c, v) in m {
        d[r - 1][c - 1] += v;
    }
    d
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

impl LieBasis {
    pub fn new(cfg: ActionConfig) -> Result<Self, LieError> {
        let dim = cfg.dim;
        let n = cfg.rank();
        let mut gens = Vec::new();
        for i in 1..=dim {
            for j in 1..=dim {
                let partner = (cfg.prime(j), cfg.prime(i));
                if (i, j) > partner {
                    continue;
                }
                if gl_defining(&cfg, i, j).is_empty() {
                    continue;
                }
                let class = match i.cmp(&j) {
                    std::cmp::Ordering::Greater => GenClass::Lowering,
                    std::cmp::Ordering::Less => GenClass::Raising,
                    std::cmp::Ordering::Equal => GenClass::Cartan,
                };
                if class == GenClass::Cartan {
                    debug_assert!(i <= n);
                }
                gens.push(GenInfo { i, j, class });
            }
        }
        gens.sort_by_key(|g| (g.class, g.i, g.j));
        let defmat: Vec<SparseMat> = gens
            .iter()
            .map(|g| {
                gl_defining(&cfg, g.i, g.j)
                    .into_iter()
                    .map(|((r, c), v)| (r, c, v))
                    .collect()
            })
            .collect();
        let mut fmat = vec![vec![None; dim]; dim];
        for i in 1..=dim {
            for j in 1..=dim {
                let m = gl_defining(&cfg, i, j);
                if m.is_empty() {
                    continue;
                }
                let found = gens.iter().enumerate().find_map(|(idx, g)| {
                    let gm = gl_defining(&cfg, g.i, g.j);
                    if gm == m {
                        Some((idx as u8, 1))
                    } else if gm.iter().all(|(k, v)| m.get(k) == Some(&-v)) && gm.len() == m.len() {
                        Some((idx as u8, -1))
                    } else {
                        None
                    }
                });
                fmat[i - 1][j - 1] = Some(found.expect("every F_ij is ± a basis element"));
            }
        }
        let mut basis = LieBasis {
            cfg,
            gens,
            defmat,
            fmat,
            structure: Vec::new(),
        };
        basis.structure = basis.solve_structure()?;
        Ok(basis)
    }

    /// Express each bracket of defining matrices in the basis. Each basis
    /// element has a pivot entry `(i, j)` that no other basis element
    /// touches, which makes the solve a lookup followed by a closure check.
    fn solve_structure(&self) -> Result<StructureTable, LieError> {
        let dim = self.cfg.dim;
        let mats: Vec<Vec<Vec<i64>>> = self.defmat.iter().map(|m| dense(dim, m)).collect();
        let d = self.gens.len();
        let mut out = vec![vec![Vec::new(); d]; d];
        for a in 0..d {
            for b in 0..d {
                let ab = matmul(&mats[a], &mats[b]);
                let ba = matmul(&mats[b], &mats[a]);
                let comm: Vec<Vec<i64>> = ab
                    .iter()
                    .zip(&ba)
                    .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect())
                    .collect();
                let mut recon = vec![vec![0i64; dim]; dim];
                let mut coeffs = Vec::new();
                for (c, g) in self.gens.iter().enumerate() {
                    let pivot = mats[c][g.i - 1][g.j - 1];
                    let v = comm[g.i - 1][g.j - 1];
                    if v == 0 {
                        continue;
                    }
                    if v % pivot != 0 {
                        return Err(LieError::NonIntegral(
                            g.to_string(),
                            self.gens[a].to_string(),
                            self.gens[b].to_string(),
                        ));
                    }
                    let k = v / pivot;
                    coeffs.push((c as u8, k));
                    for &(r, col, x) in &self.defmat[c] {
                        recon[r - 1][col - 1] += k * x;
                    }
                }
                if recon != comm {
                    return Err(LieError::NotClosed(
                        self.gens[a].to_string(),
                        self.gens[b].to_string(),
                    ));
                }
                out[a][b] = coeffs;
            }
        }
        Ok(out)
    }

    pub fn cfg(&self) -> &ActionConfig {
        &self.cfg
    }

    pub fn rank(&self) -> usize {
        self.cfg.rank()
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn gens(&self) -> &[GenInfo] {
        &self.gens
    }

    pub fn gen(&self, idx: usize) -> &GenInfo {
        &self.gens[idx]
    }

    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        self.gens.iter().position(|g| g.i == i && g.j == j)
    }

    pub fn defining_matrix(&self, idx: usize) -> &SparseMat {
        &self.defmat[idx]
    }

    /// `F_ij` as `(basis index, sign)`, or `None` when it vanishes.
    pub fn f(&self, i: usize, j: usize) -> Option<(u8, i64)> {
        self.fmat[i - 1][j - 1]
    }

    pub fn bracket(&self, a: usize, b: usize) -> &[(u8, i64)] {
        &self.structure[a][b]
    }

    /// Index of the highest-weight coordinate for a Cartan generator.
    pub fn cartan_slot(&self, idx: usize) -> Option<usize> {
        let g = &self.gens[idx];
        (g.class == GenClass::Cartan).then_some(g.i)
    }

    pub fn antisymmetric(&self) -> bool {
        let d = self.dim();
        (0..d).all(|a| {
            (0..d).all(|b| {
                let mut x: BTreeMap<u8, i64> = self.structure[a][b].iter().copied().collect();
                for &(c, v) in &self.structure[b][a] {
                    *x.entry(c).or_insert(0) += v;
                }
                x.values().all(|v| *v == 0)
            })
        })
    }

    fn bracket_vec(&self, x: &BTreeMap<u8, i64>, b: usize) -> BTreeMap<u8, i64> {
        let mut out = BTreeMap::new();
        for (&a, &c) in x {
            for &(k, v) in &self.structure[a as usize][b] {
                *out.entry(k).or_insert(0) += c * v;
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    /// Jacobi identity on every triple of basis elements.
    pub fn jacobi_holds(&self) -> bool {
        let d = self.dim();
        let single = |a: usize| BTreeMap::from([(a as u8, 1i64)]);
        for a in 0..d {
            for b in 0..d {
                let ab: BTreeMap<u8, i64> = self.structure[a][b].iter().copied().collect();
                for c in 0..d {
                    let bc: BTreeMap<u8, i64> = self.structure[b][c].iter().copied().collect();
                    let ca: BTreeMap<u8, i64> = self.structure[c][a].iter().copied().collect();
                    // [[a,b],c] + [[b,c],a] + [[c,a],b]
                    let mut total = self.bracket_vec(&ab, c);
                    for (k, v) in self.bracket_vec(&bc, a) {
                        *total.entry(k).or_insert(0) += v;
                    }
                    for (k, v) in self.bracket_vec(&ca, b) {
                        *total.entry(k).or_insert(0) += v;
                    }
                    if total.values().any(|v| *v != 0) {
                        return false;
                    }
                    let _ = single;
                }
            }
        }
        true
    }

    /// Copy with one structure constant deliberately altered (negative
    /// control for the relation checks).
    pub fn with_corrupted_constant(&self, a: usize, b: usize) -> LieBasis {
        let mut out = self.clone();
        let entry = &mut out.structure[a][b];
        if let Some(first) = entry.first_mut() {
            first.1 += 1;
        } else {
            entry.push((0, 1));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Enveloping algebra

/// Element of `U(g)` in PBW normal form with coefficients in `R`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Uea<R> {
    terms: BTreeMap<Mono, R>,
}

impl<R: Ring> Uea<R> {
    pub fn zero() -> Self {
        Uea {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Uea::scalar(R::one())
    }

    pub fn scalar(c: R) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Uea { terms }
    }

    pub fn generator(idx: usize) -> Self {
        Uea {
            terms: BTreeMap::from([(vec![idx as u8], R::one())]),
        }
    }

    /// Build from monomials that are already sorted.
    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, R)>) -> Self {
        let mut out = Uea::zero();
        for (mono, c) in terms {
            debug_assert!(mono.windows(2).all(|w| w[0] <= w[1]));
            out.add_term(mono, c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &R)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &[u8]) -> R {
        self.terms.get(mono).cloned().unwrap_or_else(R::zero)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, mono: Mono, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(v) => {
                v.add_assign_ref(&c);
                if v.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg_ref())
    }

    pub fn scale(&self, s: &R) -> Self {
        if s.is_zero() {
            return Uea::zero();
        }
        self.map(|c| c.mul_ref(s))
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&R) -> T) -> Uea<T> {
        let mut out = Uea::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn try_map<T: Ring, E>(&self, f: impl Fn(&R) -> Result<T, E>) -> Result<Uea<T>, E> {
        let mut out = Uea::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn render(&self, basis: &LieBasis) -> String
    where
        R: fmt::Display,
    {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let c = c.to_string();
            // plain integers print bare and carry their sign into the joiner
            let integer = c.strip_prefix('-').unwrap_or(&c);
            let plain = !integer.is_empty() && integer.bytes().all(|b| b.is_ascii_digit());
            let (negative, coeff) = match c.strip_prefix('-') {
                Some(rest) if plain => (true, rest.to_string()),
                _ if plain => (false, c.clone()),
                _ => (false, format!("({c})")),
            };
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let word: Vec<String> = m.iter().map(|&x| basis.gen(x as usize).to_string()).collect();
            if word.is_empty() {
                out.push_str(&coeff);
            } else if coeff == "1" {
                out.push_str(&word.join("*"));
            } else {
                out.push_str(&format!("{coeff}*{}", word.join("*")));
            }
        }
        out
    }
}

impl<R: Ring + fmt::Display> fmt::Debug for Uea<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c}){m:?}")).collect();
        write!(f, "{}", if parts.is_empty() { "0".into() } else { parts.join(" + ") })
    }
}

type Expansion = Arc<Vec<(Mono, i64)>>;

/// PBW rewriting engine over a fixed basis, with a shared memo of
/// `monomial * generator` products.
pub struct Enveloping {
    basis: Arc<LieBasis>,
    memo: RwLock<HashMap<(Mono, u8), Expansion>>,
}

impl Enveloping {
    pub fn new(basis: Arc<LieBasis>) -> Self {
        Enveloping {
            basis,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn for_config(cfg: ActionConfig) -> Result<Self, LieError> {
        Ok(Enveloping::new(Arc::new(LieBasis::new(cfg)?)))
    }

    pub fn basis(&self) -> &LieBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> Arc<LieBasis> {
        self.basis.clone()
    }

    /// Normal form of `mono * x_x`, with `mono` already normal.
    pub fn mul_mono_gen(&self, mono: &[u8], x: u8) -> Expansion {
        if mono.last().is_none_or(|&y| y <= x) {
            let mut m = mono.to_vec();
            m.push(x);
            return Arc::new(vec![(m, 1)]);
        }
        let key = (mono.to_vec(), x);
        if let Some(hit) = self.memo.read().expect("memo poisoned").get(&key) {
            return hit.clone();
        }
        // mono = a' y with y > x:  a' y x = (a' x) y + a' [y, x]
        let (&y, prefix) = mono.split_last().expect("nonempty");
        let mut acc: HashMap<Mono, i64> = HashMap::new();
        for (t, c) in self.mul_mono_gen(prefix, x).iter() {
            for (t2, c2) in self.mul_mono_gen(t, y).iter() {
                *acc.entry(t2.clone()).or_insert(0) += c * c2;
            }
        }
        for &(z, k) in self.basis.bracket(y as usize, x as usize) {
            for (t, c) in self.mul_mono_gen(prefix, z).iter() {
                *acc.entry(t.clone()).or_insert(0) += k * c;
            }
        }
        let mut v: Vec<(Mono, i64)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        v.sort_unstable();
        let v = Arc::new(v);
        self.memo
            .write()
            .expect("memo poisoned")
            .insert(key, v.clone());
        v
    }

    /// Normal form of `mono * word` for an arbitrary word of generators.
    pub fn mul_mono_word(&self, mono: &[u8], word: &[u8]) -> Vec<(Mono, i64)> {
        let mut cur: HashMap<Mono, i64> = HashMap::from([(mono.to_vec(), 1)]);
        for &x in word {
            let mut next: HashMap<Mono, i64> = HashMap::with_capacity(cur.len() * 2);
            for (m, c) in cur {
                for (t, k) in self.mul_mono_gen(&m, x).iter() {
                    *next.entry(t.clone()).or_insert(0) += c * k;
                }
            }
            next.retain(|_, c| *c != 0);
            cur = next;
        }
        let mut v: Vec<(Mono, i64)> = cur.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// PBW normal form of a word of basis indices.
    pub fn normal_form(&self, word: &[u8]) -> Uea<Rational> {
        Uea::from_terms(self.mul_mono_word(&[], word).into_iter().map(|(m, c)| (m, int(c))))
    }

    /// Normal form computed by an independent rewriting loop that picks a
    /// random adjacent inversion at each step: `x y -> y x + [x, y]`.
    pub fn normal_form_random(&self, word: &[u8], rng: &mut impl rand::Rng) -> Uea<Rational> {
        let mut pending: Vec<(Vec<u8>, i64)> = vec![(word.to_vec(), 1)];
        let mut done: BTreeMap<Mono, i64> = BTreeMap::new();
        while let Some(idx) = (!pending.is_empty()).then(|| rng.gen_range(0..pending.len())) {
            let (w, c) = pending.swap_remove(idx);
            let inversions: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&p| w[p] > w[p + 1]).collect();
            if inversions.is_empty() {
                *done.entry(w).or_insert(0) += c;
                continue;
            }
            let p = inversions[rng.gen_range(0..inversions.len())];
            let (x, y) = (w[p], w[p + 1]);
            let mut swapped = w.clone();
            swapped.swap(p, p + 1);
            pending.push((swapped, c));
            for &(z, k) in self.basis.bracket(x as usize, y as usize) {
                let mut shorter = w[..p].to_vec();
                shorter.push(z);
                shorter.extend_from_slice(&w[p + 2..]);
                pending.push((shorter, c * k));
            }
        }
        Uea::from_terms(done.into_iter().map(|(m, c)| (m, int(c))))
    }

    pub fn mul<R: Ring>(&self, a: &Uea<R>, b: &Uea<R>) -> Uea<R> {
        let mut out = Uea::zero();
        for (mb, cb) in &b.terms {
            for (ma, ca) in &a.terms {
                let coeff = ca.mul_ref(cb);
                for (m, k) in self.mul_mono_word(ma, mb) {
                    out.add_term(m, coeff.scale_rational(&int(k)));
                }
            }
        }
        out
    }

    pub fn commutator<R: Ring>(&self, a: &Uea<R>, b: &Uea<R>) -> Uea<R> {
        self.mul(a, b).sub(&self.mul(b, a))
    }

    /// `[z, x_g]` for a single generator.
    pub fn commutator_with_gen<R: Ring>(&self, z: &Uea<R>, g: usize) -> Uea<R> {
        let x = g as u8;
        let mut out = Uea::zero();
        for (m, c) in &z.terms {
            for (t, k) in self.mul_mono_gen(m, x).iter() {
                out.add_term(t.clone(), c.scale_rational(&int(*k)));
            }
            for (t, k) in self.mul_mono_word(&[x], m) {
                out.add_term(t, c.scale_rational(&int(-k)));
            }
        }
        out
    }

    /// `Ok(())` when `z` commutes with every generator; otherwise the first
    /// failing generator and the commutator.
    pub fn is_central<R: Ring + fmt::Display>(&self, z: &Uea<R>) -> Result<(), LieError> {
        for g in 0..self.basis.dim() {
            let c = self.commutator_with_gen(z, g);
            if !c.is_zero() {
                return Err(LieError::NonCentral {
                    generator: self.basis.gen(g).to_string(),
                    witness: c.render(&self.basis),
                });
            }
        }
        Ok(())
    }

    /// Keep the monomials made of Cartan generators only and substitute
    /// `F_ii -> lambda_i`. This is the highest-weight eigenvalue only for
    /// weight-zero central elements; see [`Enveloping::hc_image`].
    pub fn cartan_projection<R: Ring + ToMPoly>(&self, z: &Uea<R>) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &z.terms {
            let slots: Option<Vec<usize>> = m.iter().map(|&x| self.basis.cartan_slot(x as usize)).collect();
            let Some(slots) = slots else { continue };
            let mut term = c.to_mpoly();
            for s in slots {
                term = &term * &MPoly::var(Var::Lambda(s as u8));
            }
            out = &out + &term;
        }
        out
    }

    /// Harish-Chandra image, after certifying centrality.
    pub fn hc_image<R: Ring + ToMPoly + fmt::Display>(&self, z: &Uea<R>) -> Result<MPoly, LieError> {
        self.is_central(z)?;
        Ok(self.cartan_projection(z))
    }

    /// Integer matrix of a PBW monomial in the defining representation.
    pub fn monomial_matrix(&self, mono: &[u8]) -> Vec<Vec<i64>> {
        let n = self.basis.cfg.dim;
        let mut acc: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        for &x in mono {
            acc = matmul(&acc, &dense(n, self.basis.defining_matrix(x as usize)));
        }
        acc
    }

    /// Image of `z` under the defining representation `F_ij -> E_ij - theta E_j'i'`.
    pub fn eval_in_defining_rep<R: Ring>(&self, z: &Uea<R>) -> Vec<Vec<R>> {
        let n = self.basis.cfg.dim;
        let mut out = vec![vec![R::zero(); n]; n];
        for (m, c) in &z.terms {
            let mat = self.monomial_matrix(m);
            for (i, row) in mat.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if v != 0 {
                        out[i][j].add_assign_ref(&c.scale_rational(&int(v)));
                    }
                }
            }
        }
        out
    }

    /// Element `F_ij` of `U(g)` (zero when the generator vanishes).
    pub fn f_elem<R: Ring>(&self, i: usize, j: usize) -> Uea<R> {
        match self.basis.f(i, j) {
            None => Uea::zero(),
            Some((idx, s)) => Uea::generator(idx as usize).scale(&R::from_rational(&int(s))),
        }
    }
}

/// A failing entry of the matrix-form defining relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationWitness {
    pub relation: &'static str,
    pub row: (usize, usize),
    pub col: (usize, usize),
    pub detail: String,
}

/// Check `F_1 F_2 - F_2 F_1 = (P - Q) F_2 - F_2 (P - Q)` entrywise over
/// `U(g)`, together with `F + F' = 0`.
pub fn check_defining_relation(basis: &LieBasis) -> Result<(), RelationWitness> {
    let env = Enveloping::new(Arc::new(basis.clone()));
    let cfg = *basis.cfg();
    let n = cfg.dim;
    let f = |i: usize, j: usize| env.f_elem::<Rational>(i, j);
    // (P - Q)[(i,k),(j,l)] on two legs
    let pq = |i: usize, k: usize, j: usize, l: usize| -> i64 {
        let p = i64::from(i == l && k == j);
        let q = if k == cfg.prime(i) && l == cfg.prime(j) {
            cfg.sign(i) * cfg.sign(j)
        } else {
            0
        };
        p - q
    };
    for i in 1..=n {
        for k in 1..=n {
            for j in 1..=n {
                for l in 1..=n {
                    let lhs = env.commutator(&f(i, j), &f(k, l));
                    let mut rhs = Uea::<Rational>::zero();
                    for q in 1..=n {
                        let a = pq(i, k, j, q);
                        if a != 0 {
                            rhs = rhs.add(&f(q, l).scale(&int(a)));
                        }
                        let b = pq(i, q, j, l);
                        if b != 0 {
                            rhs = rhs.sub(&f(k, q).scale(&int(b)));
                        }
                    }
                    if lhs != rhs {
                        return Err(RelationWitness {
                            relation: "F1 F2 - F2 F1 = (P - Q) F2 - F2 (P - Q)",
                            row: (i, k),
                            col: (j, l),
                            detail: format!("{} != {}", lhs.render(basis), rhs.render(basis)),
                        });
                    }
                }
            }
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            let transposed = f(cfg.prime(j), cfg.prime(i)).scale(&int(cfg.theta(i, j)));
            let sum = f(i, j).add(&transposed);
            if !sum.is_zero() {
                return Err(RelationWitness {
                    relation: "F + F' = 0",
                    row: (i, j),
                    col: (i, j),
                    detail: sum.render(basis),
                });
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct UeaTermJson {
    pub powers: Vec<u32>,
    pub coeff: MPolyJson,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct UeaJson {
    pub family: Family,
    #[serde(rename = "N")]
    pub dim: usize,
    pub basis: Vec<[usize; 2]>,
    pub terms: Vec<UeaTermJson>,
}

pub fn uea_to_json<R: Ring + ToMPoly>(basis: &LieBasis, z: &Uea<R>) -> UeaJson {
    let d = basis.dim();
    UeaJson {
        family: basis.cfg().family,
        dim: basis.cfg().dim,
        basis: basis.gens().iter().map(|g| [g.i, g.j]).collect(),
        terms: z
            .terms()
            .map(|(m, c)| {
                let mut powers = vec![0u32; d];
                for &x in m {
                    powers[x as usize] += 1;
                }
                UeaTermJson {
                    powers,
                    coeff: (&c.to_mpoly()).into(),
                }
            })
            .collect(),
    }
}

/// Parse a JSON element against `basis`; the stored generator list must
/// match the basis exactly.
pub fn uea_from_json(basis: &LieBasis, j: &UeaJson) -> Result<Uea<MPoly>, LieError> {
    let expected: Vec<[usize; 2]> = basis.gens().iter().map(|g| [g.i, g.j]).collect();
    if j.basis != expected || j.family != basis.cfg().family || j.dim != basis.cfg().dim {
        return Err(LieError::BasisMismatch(format!(
            "element was written for {}{} with a different generator list",
            j.family.tag(),
            j.dim
        )));
    }
    let mut out = Uea::zero();
    for t in &j.terms {
        if t.powers.len() != basis.dim() {
            return Err(LieError::BasisMismatch("powers vector has wrong length".into()));
        }
        let mut mono = Vec::new();
        for (idx, &p) in t.powers.iter().enumerate() {
            mono.extend(std::iter::repeat_n(idx as u8, p as usize));
        }
        let c = MPoly::try_from(&t.coeff).map_err(|e| LieError::BasisMismatch(e.to_string()))?;
        out.add_term(mono, c);
    }
    Ok(out)
}

/// Integer value of a rational, if it is one.
pub fn as_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

pub fn is_zero_matrix<R: Ring>(m: &[Vec<R>]) -> bool {
    m.iter().all(|row| row.iter().all(|x| x.is_zero()))
}

/// `Some(c)` if the matrix is `c * I`.
pub fn scalar_of_matrix<R: Ring>(m: &[Vec<R>]) -> Option<R> {
    let c = m.first()?.first()?.clone();
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let expected = if i == j { &c } else { &R::zero() };
            if x != expected {
                return None;
            }
        }
    }
    Some(c)
}

pub fn rational_is_zero(r: &Rational) -> bool {
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn env(cfg: ActionConfig) -> Enveloping {
        Enveloping::for_config(cfg).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(LieBasis::new(ActionConfig::orthogonal(3)).unwrap().dim(), 3);
        assert_eq!(LieBasis::new(ActionConfig::orthogonal(4)).unwrap().dim(), 6);
        assert_eq!(LieBasis::new(ActionConfig::symplectic(4)).unwrap().dim(), 10);
        assert_eq!(LieBasis::new(ActionConfig::symplectic(2)).unwrap().dim(), 3);
    }

    #[test]
    fn orthogonal_f_1n_vanishes() {
        let b = LieBasis::new(ActionConfig::orthogonal(4)).unwrap();
        assert_eq!(b.f(1, 4), None);
        assert_eq!(b.index_of(1, 4), None);
    }

    #[test]
    fn symplectic_f_12_doubles() {
        let b = LieBasis::new(ActionConfig::symplectic(2)).unwrap();
        let idx = b.index_of(1, 2).unwrap();
        assert_eq!(b.defining_matrix(idx), &vec![(1, 2, 2)]);
    }

    #[test]
    fn structure_constants_sane() {
        for cfg in [ActionConfig::orthogonal(3), ActionConfig::orthogonal(4), ActionConfig::symplectic(4)] {
            let b = LieBasis::new(cfg).unwrap();
            assert!(b.antisymmetric());
            assert!(b.jacobi_holds());
        }
    }

    #[test]
    fn pbw_order_classes() {
        let b = LieBasis::new(ActionConfig::symplectic(4)).unwrap();
        let classes: Vec<GenClass> = b.gens().iter().map(|g| g.class).collect();
        let mut sorted = classes.clone();
        sorted.sort();
        assert_eq!(classes, sorted);
        assert_eq!(classes.iter().filter(|c| **c == GenClass::Cartan).count(), 2);
    }

    #[test]
    fn raising_times_lowering_o3() {
        let e = env(ActionConfig::orthogonal(3));
        let b = e.basis();
        let r = b.index_of(1, 2).unwrap() as u8;
        let l = b.index_of(2, 1).unwrap() as u8;
        let nf = e.normal_form(&[r, l]);
        let mut expected = Uea::from_terms([(vec![l, r], int(1))]);
        for &(z, k) in b.bracket(r as usize, l as usize) {
            expected.add_term(vec![z], int(k));
        }
        assert_eq!(nf, expected);
        let h = b.index_of(1, 1).unwrap() as u8;
        assert_eq!(e.normal_form(&[h, h]), Uea::from_terms([(vec![h, h], int(1))]));
        assert_eq!(e.normal_form(&[h]), Uea::generator(h as usize));
    }

    #[test]
    fn commutator_matches_structure() {
        let e = env(ActionConfig::orthogonal(5));
        let b = e.basis();
        let h = b.index_of(1, 1).unwrap();
        let x = b.index_of(1, 2).unwrap();
        let c = e.commutator(&Uea::<Rational>::generator(h), &Uea::generator(x));
        let expected = Uea::from_terms(b.bracket(h, x).iter().map(|&(z, k)| (vec![z], int(k))));
        assert_eq!(c, expected);
    }

    #[test]
    fn confluence_random_orders() {
        let e = env(ActionConfig::symplectic(4));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = e.basis().dim() as u8;
        for _ in 0..40 {
            let len = rng.gen_range(1..=4);
            let word: Vec<u8> = (0..len).map(|_| rng.gen_range(0..d)).collect();
            let a = e.normal_form(&word);
            let b = e.normal_form_random(&word, &mut rng);
            assert_eq!(a, b, "word {word:?}");
        }
    }

    #[test]
    fn central_and_not() {
        let e = env(ActionConfig::orthogonal(3));
        assert!(e.is_central(&Uea::<Rational>::one()).is_ok());
        // sum_{i,j} F_ij F_ji
        let mut c2 = Uea::<Rational>::zero();
        for i in 1..=3 {
            for j in 1..=3 {
                c2 = c2.add(&e.mul(&e.f_elem(i, j), &e.f_elem(j, i)));
            }
        }
        assert!(e.is_central(&c2).is_ok());
        let h = e.f_elem::<Rational>(1, 1);
        match e.is_central(&h) {
            Err(LieError::NonCentral { .. }) => {}
            other => panic!("expected witness, got {other:?}"),
        }
        let m = e.eval_in_defining_rep(&h);
        assert!(scalar_of_matrix(&m).is_none());
    }

    #[test]
    fn cartan_extraction() {
        let e = env(ActionConfig::orthogonal(3));
        let b = e.basis();
        let r = b.index_of(1, 2).unwrap() as u8;
        let l = b.index_of(2, 1).unwrap() as u8;
        let h = b.index_of(1, 1).unwrap() as u8;
        let z = Uea::from_terms([(vec![l, r], int(1)), (vec![h], int(1))]);
        assert_eq!(e.cartan_projection(&z), MPoly::var(Var::Lambda(1)));
        assert_eq!(e.hc_image(&Uea::<Rational>::one()).unwrap(), MPoly::one());
    }

    #[test]
    fn defining_rep_of_one() {
        let e = env(ActionConfig::symplectic(4));
        let m = e.eval_in_defining_rep(&Uea::<Rational>::one());
        assert_eq!(scalar_of_matrix(&m), Some(int(1)));
    }

    #[test]
    fn defining_relations_small() {
        for cfg in [ActionConfig::orthogonal(3), ActionConfig::symplectic(4)] {
            let b = LieBasis::new(cfg).unwrap();
            assert_eq!(check_defining_relation(&b), Ok(()));
        }
    }

    #[test]
    fn corrupted_constant_detected() {
        let b = LieBasis::new(ActionConfig::orthogonal(3)).unwrap();
        let x = b.index_of(1, 2).unwrap();
        let y = b.index_of(2, 1).unwrap();
        let bad = b.with_corrupted_constant(x, y);
        let w = check_defining_relation(&bad).unwrap_err();
        assert_eq!(w.relation, "F1 F2 - F2 F1 = (P - Q) F2 - F2 (P - Q)");
    }

    #[test]
    fn json_round_trip() {
        let e = env(ActionConfig::orthogonal(3));
        let z: Uea<MPoly> = e
            .normal_form(&[2, 0, 1])
            .map(|c| MPoly::from_rational(c.clone()))
            .scale(&MPoly::from_rational(rat(1, 3)));
        let j = uea_to_json(e.basis(), &z);
        let text = serde_json::to_string(&j).unwrap();
        let back: UeaJson = serde_json::from_str(&text).unwrap();
        assert_eq!(uea_from_json(e.basis(), &back).unwrap(), z);
    }
}
