//! The Brauer algebra `B_m(omega)`.
//!
//! An m-diagram is a perfect matching on `2m` dots. Dots are numbered
//! `0..m` for the top row (top `a` is dot `a-1`) and `m..2m` for the bottom
//! row. Multiplication places the left factor above the right one and
//! replaces each closed loop by a factor `omega`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;
use crate::ring::{factorial, int, Poly, RatFunc, RatFuncJson, Rational, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BrauerError {
    #[error("Brauer elements of different degree: {0} and {1}")]
    DegreeMismatch(usize, usize),
    #[error("index {index} out of range for m = {m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("symmetrizer formulas disagree at m = {0}")]
    SymmetrizerMismatch(usize),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A perfect matching on the `2m` dots, stored as the partner of each dot.
/// The partner array is a canonical form: two diagrams are equal iff their
/// matchings are equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagram {
    partner: Vec<u8>,
}

impl Diagram {
    pub fn from_partners(partner: Vec<u8>) -> Result<Self, BrauerError> {
        let n = partner.len();
        if n == 0 || !n.is_multiple_of(2) {
            return Err(BrauerError::InvalidDiagram(format!(
                "{n} dots cannot form an m-diagram"
            )));
        }
        for (i, &p) in partner.iter().enumerate() {
            let p = p as usize;
            if p >= n || p == i || partner[p] as usize != i {
                return Err(BrauerError::InvalidDiagram(format!(
                    "dot {i} is not matched consistently"
                )));
            }
        }
        Ok(Diagram { partner })
    }

    /// Build from edges given as pairs of dots.
    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Result<Self, BrauerError> {
        let mut partner = vec![u8::MAX; 2 * m];
        for &(x, y) in edges {
            if x >= 2 * m || y >= 2 * m || partner[x] != u8::MAX || partner[y] != u8::MAX {
                return Err(BrauerError::InvalidDiagram(format!("bad edge ({x},{y})")));
            }
            partner[x] = y as u8;
            partner[y] = x as u8;
        }
        Diagram::from_partners(partner)
    }

    pub fn identity(m: usize) -> Self {
        Diagram::from_permutation(&(0..m).collect::<Vec<_>>())
    }

    /// Permutation diagram joining top `i` to bottom `p[i]` (0-based).
    pub fn from_permutation(p: &[usize]) -> Self {
        let m = p.len();
        let mut partner = vec![0u8; 2 * m];
        for (i, &pi) in p.iter().enumerate() {
            partner[i] = (m + pi) as u8;
            partner[m + pi] = i as u8;
        }
        Diagram { partner }
    }

    /// The transposition `s_ab` (1-based, `a < b`).
    pub fn s(m: usize, a: usize, b: usize) -> Result<Self, BrauerError> {
        check_pair(m, a, b)?;
        let mut p: Vec<usize> = (0..m).collect();
        p.swap(a - 1, b - 1);
        Ok(Diagram::from_permutation(&p))
    }

    /// The contraction `eps_ab` (1-based, `a < b`).
    pub fn eps(m: usize, a: usize, b: usize) -> Result<Self, BrauerError> {
        check_pair(m, a, b)?;
        let mut edges = vec![(a - 1, b - 1), (m + a - 1, m + b - 1)];
        for c in 0..m {
            if c != a - 1 && c != b - 1 {
                edges.push((c, m + c));
            }
        }
        Diagram::from_edges(m, &edges)
    }

    pub fn m(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn partner(&self, dot: usize) -> usize {
        self.partner[dot] as usize
    }

    pub fn partners(&self) -> &[u8] {
        &self.partner
    }

    pub fn is_top(&self, dot: usize) -> bool {
        dot < self.m()
    }

    /// Edges as `(x, y)` with `x < y`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.partner.len())
            .filter(|&x| x < self.partner(x))
            .map(|x| (x, self.partner(x)))
            .collect()
    }

    /// Number of top arcs (equal to the number of bottom arcs).
    pub fn arc_count(&self) -> usize {
        let m = self.m();
        (0..m).filter(|&x| self.partner(x) < m).count() / 2
    }

    pub fn is_permutation(&self) -> bool {
        self.arc_count() == 0
    }

    /// For a permutation diagram, `p[i]` with top `i` joined to bottom `p[i]`.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        let m = self.m();
        self.is_permutation()
            .then(|| (0..m).map(|i| self.partner(i) - m).collect())
    }

    /// Product `self * other` (self placed above other): the resulting
    /// diagram and the number of closed loops.
    pub fn compose(&self, other: &Diagram) -> Result<(Diagram, usize), BrauerError> {
        let m = self.m();
        if other.m() != m {
            return Err(BrauerError::DegreeMismatch(m, other.m()));
        }
        Ok(self.compose_unchecked(other))
    }

    fn compose_unchecked(&self, other: &Diagram) -> (Diagram, usize) {
        let m = self.m();
        let mut partner = vec![u8::MAX; 2 * m];
        let mut middle_seen = vec![false; m];
        // outer dots of the result: top of self (0..m) and bottom of other (m..2m)
        for start in 0..2 * m {
            if partner[start] != u8::MAX {
                continue;
            }
            // walk: (in_upper, dot)
            let (mut upper, mut dot) = if start < m { (true, start) } else { (false, start) };
            let end = loop {
                if upper {
                    let p = self.partner(dot);
                    if p < m {
                        break p;
                    }
                    let k = p - m;
                    middle_seen[k] = true;
                    upper = false;
                    dot = k;
                } else {
                    let p = other.partner(dot);
                    if p >= m {
                        break p;
                    }
                    middle_seen[p] = true;
                    upper = true;
                    dot = m + p;
                }
            };
            partner[start] = end as u8;
            partner[end] = start as u8;
        }
        let mut loops = 0;
        for k in 0..m {
            if middle_seen[k] {
                continue;
            }
            loops += 1;
            // walk the closed cycle through the middle row
            let mut cur = k;
            loop {
                middle_seen[cur] = true;
                let down = other.partner(cur);
                debug_assert!(down < m);
                middle_seen[down] = true;
                let up = self.partner(m + down) - m;
                if up == k {
                    break;
                }
                cur = up;
            }
        }
        (Diagram { partner }, loops)
    }

    /// Close the legs flagged in `closed` (join top `a` to bottom `a`) and
    /// count the loops made entirely of closed legs.
    pub fn loops_after_closing(&self, closed: &[bool]) -> usize {
        let m = self.m();
        let mut seen = vec![false; 2 * m];
        let mut loops = 0;
        for a in 0..m {
            if !closed[a] || seen[a] {
                continue;
            }
            // follow from top a along its diagram edge, closing legs as we go
            let mut dot = a;
            let is_loop = loop {
                seen[dot] = true;
                let p = self.partner(dot);
                seen[p] = true;
                let leg = p % m;
                if !closed[leg] {
                    break false;
                }
                let across = if p < m { p + m } else { p - m };
                if across == a {
                    break true;
                }
                dot = across;
            };
            if !is_loop {
                // walk the other direction too so every dot of this path is marked
                let mut dot = a + m;
                loop {
                    seen[dot] = true;
                    let p = self.partner(dot);
                    seen[p] = true;
                    let leg = p % m;
                    if !closed[leg] {
                        break;
                    }
                    dot = if p < m { p + m } else { p - m };
                }
            } else {
                loops += 1;
            }
        }
        loops
    }

    /// Partial trace over the last leg: returns the (m-1)-diagram and
    /// whether a loop was closed.
    pub fn close_last(&self) -> Result<(Diagram, bool), BrauerError> {
        let m = self.m();
        if m < 2 {
            return Err(BrauerError::IndexOutOfRange { index: m, m });
        }
        let top = m - 1;
        let bot = 2 * m - 1;
        let relabel = |x: usize| if x < m { x } else { x - 1 };
        let mut edges = Vec::with_capacity(m - 1);
        let mut looped = false;
        for (x, y) in self.edges() {
            let ends = [x == top || x == bot, y == top || y == bot];
            if ends[0] && ends[1] {
                looped = true;
                continue;
            }
            if ends[0] || ends[1] {
                continue;
            }
            edges.push((relabel(x), relabel(y)));
        }
        if !looped {
            let x = self.partner(top);
            let y = self.partner(bot);
            edges.push((relabel(x), relabel(y)));
        }
        Ok((Diagram::from_edges(m - 1, &edges)?, looped))
    }

    pub fn label(&self, dot: usize) -> String {
        let m = self.m();
        if dot < m {
            format!("T{}", dot + 1)
        } else {
            format!("B{}", dot - m + 1)
        }
    }

    /// Parse the text form `{(T1,B2),(T2,B1)}`.
    pub fn parse(s: &str) -> Result<Self, BrauerError> {
        let body = s
            .trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| BrauerError::InvalidDiagram(format!("missing braces in {s:?}")))?;
        let mut pairs = Vec::new();
        for chunk in body.split(')').map(str::trim).filter(|c| !c.is_empty()) {
            let chunk = chunk.trim_start_matches(',').trim().trim_start_matches('(');
            let (x, y) = chunk
                .split_once(',')
                .ok_or_else(|| BrauerError::InvalidDiagram(format!("bad edge {chunk:?}")))?;
            pairs.push((parse_dot(x)?, parse_dot(y)?));
        }
        let m = pairs.len();
        let to_index = |(top, k): (bool, usize)| -> Result<usize, BrauerError> {
            if k == 0 || k > m {
                return Err(BrauerError::InvalidDiagram(format!("dot index {k} out of range")));
            }
            Ok(if top { k - 1 } else { m + k - 1 })
        };
        let edges = pairs
            .into_iter()
            .map(|(x, y)| Ok((to_index(x)?, to_index(y)?)))
            .collect::<Result<Vec<_>, BrauerError>>()?;
        Diagram::from_edges(m, &edges)
    }
}

fn parse_dot(s: &str) -> Result<(bool, usize), BrauerError> {
    let s = s.trim();
    let (top, rest) = if let Some(r) = s.strip_prefix('T') {
        (true, r)
    } else if let Some(r) = s.strip_prefix('B') {
        (false, r)
    } else {
        return Err(BrauerError::InvalidDiagram(format!("bad dot {s:?}")));
    };
    let k = rest
        .parse::<usize>()
        .map_err(|_| BrauerError::InvalidDiagram(format!("bad dot {s:?}")))?;
    Ok((top, k))
}

fn check_pair(m: usize, a: usize, b: usize) -> Result<(), BrauerError> {
    if a == 0 || a > m {
        return Err(BrauerError::IndexOutOfRange { index: a, m });
    }
    if b == 0 || b > m || a >= b {
        return Err(BrauerError::IndexOutOfRange { index: b, m });
    }
    Ok(())
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .edges()
            .into_iter()
            .map(|(x, y)| format!("({},{})", self.label(x), self.label(y)))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Every m-diagram, in canonical order.
pub fn all_diagrams(m: usize) -> Vec<Diagram> {
    fn rec(partner: &mut Vec<u8>, out: &mut Vec<Diagram>) {
        let Some(first) = partner.iter().position(|&p| p == u8::MAX) else {
            out.push(Diagram {
                partner: partner.clone(),
            });
            return;
        };
        for other in first + 1..partner.len() {
            if partner[other] != u8::MAX {
                continue;
            }
            partner[first] = other as u8;
            partner[other] = first as u8;
            rec(partner, out);
            partner[first] = u8::MAX;
            partner[other] = u8::MAX;
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![u8::MAX; 2 * m], &mut out);
    out.sort();
    out
}

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

pub fn permutation_sign(p: &[usize]) -> i64 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

// ---------------------------------------------------------------------------
// Elements

#[derive(Clone, PartialEq, Eq)]
pub struct BrauerElement {
    m: usize,
    terms: BTreeMap<Diagram, RatFunc>,
}

impl BrauerElement {
    pub fn zero(m: usize) -> Self {
        BrauerElement {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(m: usize) -> Self {
        BrauerElement::from_diagram(Diagram::identity(m))
    }

    pub fn from_diagram(d: Diagram) -> Self {
        BrauerElement::term(d, RatFunc::one())
    }

    pub fn term(d: Diagram, c: RatFunc) -> Self {
        let m = d.m();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(d, c);
        }
        BrauerElement { m, terms }
    }

    pub fn from_terms(
        m: usize,
        terms: impl IntoIterator<Item = (Diagram, RatFunc)>,
    ) -> Result<Self, BrauerError> {
        let mut out = BrauerElement::zero(m);
        for (d, c) in terms {
            if d.m() != m {
                return Err(BrauerError::DegreeMismatch(m, d.m()));
            }
            out.add_term(d, c);
        }
        Ok(out)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Diagram, &RatFunc)> {
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

    pub fn coeff(&self, d: &Diagram) -> RatFunc {
        self.terms.get(d).cloned().unwrap_or_else(RatFunc::zero)
    }

    fn add_term(&mut self, d: Diagram, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&d) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&d);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(d, c);
            }
        }
    }

    pub fn add(&self, other: &BrauerElement) -> Result<Self, BrauerError> {
        self.check(other)?;
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(d.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &BrauerElement) -> Result<Self, BrauerError> {
        self.add(&other.scale(&RatFunc::constant(int(-1))))
    }

    pub fn scale(&self, c: &RatFunc) -> Self {
        if c.is_zero() {
            return BrauerElement::zero(self.m);
        }
        BrauerElement {
            m: self.m,
            terms: self.terms.iter().map(|(d, a)| (d.clone(), a * c)).collect(),
        }
    }

    /// `self + c * 1`
    pub fn add_scalar(&self, c: &RatFunc) -> Self {
        let mut out = self.clone();
        out.add_term(Diagram::identity(self.m), c.clone());
        out
    }

    fn check(&self, other: &BrauerElement) -> Result<(), BrauerError> {
        if self.m != other.m {
            return Err(BrauerError::DegreeMismatch(self.m, other.m));
        }
        Ok(())
    }

    /// Product in `B_m(omega)`.
    pub fn mul(&self, other: &BrauerElement) -> Result<Self, BrauerError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(BrauerElement::zero(self.m));
        }
        if let (Some(a), Some(b)) = (IntForm::of(self), IntForm::of(other)) {
            if let Some(out) = IntForm::product(&a, &b, self.m) {
                return Ok(out);
            }
        }
        Ok(self.mul_generic(other))
    }

    fn mul_generic(&self, other: &BrauerElement) -> Self {
        let omega = RatFunc::omega();
        let mut out = BrauerElement::zero(self.m);
        for (d1, c1) in &self.terms {
            for (d2, c2) in &other.terms {
                let (d, loops) = d1.compose_unchecked(d2);
                let mut c = c1 * c2;
                for _ in 0..loops {
                    c = &c * &omega;
                }
                out.add_term(d, c);
            }
        }
        out
    }

    /// Partial trace over leg `m`, as an element of `B_{m-1}(omega)`.
    pub fn partial_trace_last(&self) -> Result<Self, BrauerError> {
        let mut out = BrauerElement::zero(self.m.saturating_sub(1));
        let omega = RatFunc::omega();
        for (d, c) in &self.terms {
            let (d2, looped) = d.close_last()?;
            let c2 = if looped { c * &omega } else { c.clone() };
            out.add_term(d2, c2);
        }
        Ok(out)
    }

    /// Substitute `omega := value` in every coefficient.
    pub fn specialize(&self, value: &Rational) -> Result<BTreeMap<Diagram, Rational>, RingError> {
        let mut out = BTreeMap::new();
        for (d, c) in &self.terms {
            let v = c.eval(value)?;
            if !v.is_zero() {
                out.insert(d.clone(), v);
            }
        }
        Ok(out)
    }

    /// Least common multiple of the coefficient denominators (monic).
    pub fn common_denominator(&self) -> Poly {
        let mut acc = Poly::one();
        for c in self.terms.values() {
            let d = c.denom();
            if d.is_one() {
                continue;
            }
            let g = Poly::gcd(&acc, d);
            acc = (&acc * d).div_rem(&g).0.monic();
        }
        acc
    }
}

impl fmt::Display for BrauerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(d, c)| format!("({c})*{d}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for BrauerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Integer-numerator form `sum_d num_d(omega) / den(omega) * d` used to make
/// large products cheap. `den` carries the integer content as well.
struct IntForm {
    den: Poly,
    terms: Vec<(Diagram, Vec<i128>)>,
}

impl IntForm {
    fn of(x: &BrauerElement) -> Option<IntForm> {
        let den = x.common_denominator();
        let mut rational_terms = Vec::with_capacity(x.terms.len());
        for (d, c) in &x.terms {
            let scaled = (c.numer() * &den.div_rem(c.denom()).0).coeffs().to_vec();
            rational_terms.push((d.clone(), scaled));
        }
        let lcm = crate::ring::denominator_lcm(rational_terms.iter().flat_map(|(_, v)| v.iter()));
        let scale = Rational::from_integer(lcm);
        let mut terms = Vec::with_capacity(rational_terms.len());
        for (d, coeffs) in rational_terms {
            let ints = coeffs
                .iter()
                .map(|c| (c * &scale).to_integer().to_i128())
                .collect::<Option<Vec<_>>>()?;
            terms.push((d, ints));
        }
        Some(IntForm {
            den: den.scale(&scale),
            terms,
        })
    }

    fn product(a: &IntForm, b: &IntForm, m: usize) -> Option<BrauerElement> {
        type Acc = Option<HashMap<Diagram, Vec<i128>>>;
        let chunk = a.terms.len().div_ceil(64).max(1);
        let chunks: Vec<&[(Diagram, Vec<i128>)]> = a.terms.chunks(chunk).collect();
        let acc: Acc = exec::map_reduce(
            &chunks,
            || Some(HashMap::new()),
            |part| {
                let mut map: HashMap<Diagram, Vec<i128>> = HashMap::new();
                for (d1, p1) in part.iter() {
                    for (d2, p2) in &b.terms {
                        let (d, loops) = d1.compose_unchecked(d2);
                        let slot = map.entry(d).or_default();
                        let need = p1.len() + p2.len() - 1 + loops;
                        if slot.len() < need {
                            slot.resize(need, 0);
                        }
                        for (i, x) in p1.iter().enumerate() {
                            if *x == 0 {
                                continue;
                            }
                            for (j, y) in p2.iter().enumerate() {
                                let t = x.checked_mul(*y)?;
                                let s = &mut slot[i + j + loops];
                                *s = s.checked_add(t)?;
                            }
                        }
                    }
                }
                Some(map)
            },
            |x, y| {
                let (mut x, y) = (x?, y?);
                for (d, p) in y {
                    let slot = x.entry(d).or_default();
                    if slot.len() < p.len() {
                        slot.resize(p.len(), 0);
                    }
                    for (i, v) in p.into_iter().enumerate() {
                        slot[i] = slot[i].checked_add(v)?;
                    }
                }
                Some(x)
            },
        );
        let acc = acc?;
        let den = &a.den * &b.den;
        let mut out = BrauerElement::zero(m);
        for (d, p) in acc {
            if p.iter().all(|&v| v == 0) {
                continue;
            }
            let num = Poly::from_coeffs(p.into_iter().map(|v| Rational::from_integer(v.into())).collect());
            let c = RatFunc::new(num, den.clone()).ok()?;
            if !c.is_zero() {
                out.terms.insert(d, c);
            }
        }
        Some(out)
    }
}

// ---------------------------------------------------------------------------
// Distinguished elements

pub fn s_elem(m: usize, a: usize, b: usize) -> Result<BrauerElement, BrauerError> {
    Ok(BrauerElement::from_diagram(Diagram::s(m, a, b)?))
}

pub fn eps_elem(m: usize, a: usize, b: usize) -> Result<BrauerElement, BrauerError> {
    Ok(BrauerElement::from_diagram(Diagram::eps(m, a, b)?))
}

/// Jucys–Murphy element `x_b = sum_{a<b} (s_ab - eps_ab)`, with `x_1 = 0`.
pub fn jucys_murphy(m: usize, b: usize) -> Result<BrauerElement, BrauerError> {
    if b == 0 || b > m {
        return Err(BrauerError::IndexOutOfRange { index: b, m });
    }
    let mut out = BrauerElement::zero(m);
    for a in 1..b {
        out.add_term(Diagram::s(m, a, b)?, RatFunc::one());
        out.add_term(Diagram::eps(m, a, b)?, RatFunc::constant(int(-1)));
    }
    Ok(out)
}

/// Symmetrizer through the Jucys–Murphy product
/// `prod_{r=2}^m (1 + x_r)(omega + r - 3 + x_r) / (r (omega + 2r - 4))`.
pub fn symmetrizer_jm(m: usize) -> Result<BrauerElement, BrauerError> {
    if m == 0 {
        return Err(BrauerError::IndexOutOfRange { index: 0, m });
    }
    let mut acc = BrauerElement::identity(m);
    for r in 2..=m {
        let x = jucys_murphy(m, r)?;
        let r_i = r as i64;
        let left = x.add_scalar(&RatFunc::one());
        let right = x.add_scalar(&RatFunc::from_poly(Poly::linear(int(r_i - 3))));
        let den = RatFunc::from_poly(Poly::linear(int(2 * r_i - 4)).scale(&int(r_i)));
        acc = acc.mul(&left)?.mul(&right)?.scale(&den.recip()?);
    }
    Ok(acc)
}

/// Symmetrizer through the ordered pairwise product
/// `1/m! prod_{a<b} (1 + s_ab/(b-a) - eps_ab/(omega/2 + b - a - 1))`, pairs in
/// lexicographic order.
pub fn symmetrizer_pairwise(m: usize) -> Result<BrauerElement, BrauerError> {
    if m == 0 {
        return Err(BrauerError::IndexOutOfRange { index: 0, m });
    }
    let mut acc = BrauerElement::identity(m);
    for a in 1..=m {
        for b in a + 1..=m {
            let gap = (b - a) as i64;
            let eps_den = RatFunc::from_poly(Poly::from_coeffs(vec![int(gap - 1), crate::ring::rat(1, 2)]));
            let factor = BrauerElement::from_terms(
                m,
                [
                    (Diagram::identity(m), RatFunc::one()),
                    (Diagram::s(m, a, b)?, RatFunc::constant(crate::ring::rat(1, gap))),
                    (Diagram::eps(m, a, b)?, -&eps_den.recip()?),
                ],
            )?;
            acc = acc.mul(&factor)?;
        }
    }
    let inv = Rational::from_integer(factorial(m as u64)).recip();
    Ok(acc.scale(&RatFunc::constant(inv)))
}

/// The symmetrizer `S^(m)`, computed by both formulas and cross-checked.
pub fn symmetrizer(m: usize) -> Result<BrauerElement, BrauerError> {
    let a = symmetrizer_jm(m)?;
    let b = symmetrizer_pairwise(m)?;
    if a != b {
        return Err(BrauerError::SymmetrizerMismatch(m));
    }
    Ok(a)
}

/// The anti-symmetrizer `A^(m) = 1/m! sum sgn(p) p`.
pub fn antisymmetrizer(m: usize) -> Result<BrauerElement, BrauerError> {
    if m == 0 {
        return Err(BrauerError::IndexOutOfRange { index: 0, m });
    }
    let inv = Rational::from_integer(factorial(m as u64)).recip();
    let mut out = BrauerElement::zero(m);
    for p in permutations(m) {
        let c = &inv * int(permutation_sign(&p));
        out.add_term(Diagram::from_permutation(&p), RatFunc::constant(c));
    }
    Ok(out)
}

static SYM_CACHE: OnceLock<Mutex<HashMap<usize, Arc<BrauerElement>>>> = OnceLock::new();

/// Memoized [`symmetrizer`].
pub fn symmetrizer_cached(m: usize) -> Result<Arc<BrauerElement>, BrauerError> {
    let cache = SYM_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().expect("cache poisoned").get(&m) {
        return Ok(s.clone());
    }
    let s = Arc::new(symmetrizer(m)?);
    cache
        .lock()
        .expect("cache poisoned")
        .insert(m, s.clone());
    Ok(s)
}

// ---------------------------------------------------------------------------
// Generator words

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Generator {
    S(u8, u8),
    Eps(u8, u8),
}

impl Generator {
    pub fn diagram(&self, m: usize) -> Result<Diagram, BrauerError> {
        match *self {
            Generator::S(a, b) => Diagram::s(m, a as usize, b as usize),
            Generator::Eps(a, b) => Diagram::eps(m, a as usize, b as usize),
        }
    }

    pub fn legs(&self) -> (usize, usize) {
        match *self {
            Generator::S(a, b) | Generator::Eps(a, b) => (a as usize, b as usize),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::S(a, b) => write!(f, "s({a},{b})"),
            Generator::Eps(a, b) => write!(f, "eps({a},{b})"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct GenWord(pub Vec<Generator>);

impl GenWord {
    pub fn generators(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product of the generators in `B_m(omega)`, left to right.
    pub fn eval(&self, m: usize) -> Result<BrauerElement, BrauerError> {
        let mut acc = BrauerElement::identity(m);
        for g in &self.0 {
            acc = acc.mul(&BrauerElement::from_diagram(g.diagram(m)?))?;
        }
        Ok(acc)
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Transposition word whose product is the permutation diagram of `p`.
fn permutation_word(p: &[usize]) -> Vec<Generator> {
    // right-multiply by transpositions until the identity is reached; the
    // product of the chosen transpositions, in order, is then p
    let mut h = p.to_vec();
    let mut word = Vec::new();
    for i in 0..h.len() {
        if h[i] == i {
            continue;
        }
        let j = h.iter().position(|&x| x == i).expect("permutation");
        h.swap(i, j);
        word.push(Generator::S((i + 1) as u8, (j + 1) as u8));
    }
    word
}

/// Factor `d` as `sigma * eps_12 eps_34 ... * tau` and spell both
/// permutations in transpositions. The product of the word is exactly `d`.
pub fn diagram_to_word(d: &Diagram) -> GenWord {
    let m = d.m();
    let top_arcs: Vec<(usize, usize)> = (0..m)
        .filter(|&x| d.partner(x) < m && x < d.partner(x))
        .map(|x| (x, d.partner(x)))
        .collect();
    let bottom_arcs: Vec<(usize, usize)> = (m..2 * m)
        .filter(|&x| d.partner(x) >= m && x < d.partner(x))
        .map(|x| (x - m, d.partner(x) - m))
        .collect();
    let mut through: Vec<(usize, usize)> = (0..m)
        .filter(|&x| d.partner(x) >= m)
        .map(|x| (x, d.partner(x) - m))
        .collect();
    through.sort_by_key(|&(_, b)| b);
    let r = top_arcs.len();
    let mut sigma = vec![0usize; m];
    let mut tau = vec![0usize; m];
    for (j, &(x, y)) in top_arcs.iter().enumerate() {
        sigma[x] = 2 * j;
        sigma[y] = 2 * j + 1;
    }
    for (j, &(x, y)) in bottom_arcs.iter().enumerate() {
        tau[2 * j] = x;
        tau[2 * j + 1] = y;
    }
    for (k, &(t, b)) in through.iter().enumerate() {
        sigma[t] = 2 * r + k;
        tau[2 * r + k] = b;
    }
    let mut word = permutation_word(&sigma);
    for j in 0..r {
        word.push(Generator::Eps((2 * j + 1) as u8, (2 * j + 2) as u8));
    }
    word.extend(permutation_word(&tau));
    GenWord(word)
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct BrauerTermJson {
    pub diagram: String,
    pub coeff: RatFuncJson,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct BrauerElementJson {
    pub m: usize,
    pub terms: Vec<BrauerTermJson>,
}

impl From<&BrauerElement> for BrauerElementJson {
    fn from(x: &BrauerElement) -> Self {
        BrauerElementJson {
            m: x.m,
            terms: x
                .terms
                .iter()
                .map(|(d, c)| BrauerTermJson {
                    diagram: d.to_string(),
                    coeff: c.into(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&BrauerElementJson> for BrauerElement {
    type Error = BrauerError;
    fn try_from(j: &BrauerElementJson) -> Result<Self, BrauerError> {
        let terms = j
            .terms
            .iter()
            .map(|t| Ok((Diagram::parse(&t.diagram)?, RatFunc::try_from(&t.coeff)?)))
            .collect::<Result<Vec<_>, BrauerError>>()?;
        BrauerElement::from_terms(j.m, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn c(r: Rational) -> RatFunc {
        RatFunc::constant(r)
    }

    #[test]
    fn transposition_is_involution() {
        let s = Diagram::s(2, 1, 2).unwrap();
        let (d, loops) = s.compose(&s).unwrap();
        assert_eq!(d, Diagram::identity(2));
        assert_eq!(loops, 0);
    }

    #[test]
    fn eps_squared_gives_one_loop() {
        let e = Diagram::eps(2, 1, 2).unwrap();
        let (d, loops) = e.compose(&e).unwrap();
        assert_eq!(d, e);
        assert_eq!(loops, 1);
    }

    #[test]
    fn s_absorbed_by_eps() {
        let s = Diagram::s(2, 1, 2).unwrap();
        let e = Diagram::eps(2, 1, 2).unwrap();
        assert_eq!(s.compose(&e).unwrap(), (e.clone(), 0));
        assert_eq!(e.compose(&s).unwrap(), (e, 0));
    }

    #[test]
    fn mismatched_degrees() {
        let a = Diagram::identity(2);
        let b = Diagram::identity(3);
        assert_eq!(a.compose(&b).unwrap_err(), BrauerError::DegreeMismatch(2, 3));
    }

    #[test]
    fn diagram_counts() {
        let counts: Vec<usize> = (1..=5).map(|m| all_diagrams(m).len()).collect();
        assert_eq!(counts, vec![1, 3, 15, 105, 945]);
    }

    #[test]
    fn text_form() {
        let s = Diagram::s(2, 1, 2).unwrap();
        assert_eq!(s.to_string(), "{(T1,B2),(T2,B1)}");
        assert_eq!(Diagram::parse("{(T1,B2),(T2,B1)}").unwrap(), s);
        let e = Diagram::eps(3, 1, 3).unwrap();
        assert_eq!(Diagram::parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn one_plus_s_times_one_minus_s() {
        let one = BrauerElement::identity(2);
        let s = s_elem(2, 1, 2).unwrap();
        let x = one.add(&s).unwrap().mul(&one.sub(&s).unwrap()).unwrap();
        assert!(x.is_zero());
    }

    #[test]
    fn eps_times_s_minus_one() {
        let e = eps_elem(2, 1, 2).unwrap();
        let s = s_elem(2, 1, 2).unwrap();
        let x = e.mul(&s.sub(&BrauerElement::identity(2)).unwrap()).unwrap();
        assert!(x.is_zero());
    }

    #[test]
    fn jucys_murphy_small() {
        assert!(jucys_murphy(3, 1).unwrap().is_zero());
        let x2 = jucys_murphy(2, 2).unwrap();
        let expected = s_elem(2, 1, 2)
            .unwrap()
            .sub(&eps_elem(2, 1, 2).unwrap())
            .unwrap();
        assert_eq!(x2, expected);
        let x3 = jucys_murphy(3, 3).unwrap();
        assert_eq!(x3.len(), 4);
        assert!(jucys_murphy(3, 4).is_err());
    }

    #[test]
    fn jucys_murphy_commute() {
        let x2 = jucys_murphy(3, 2).unwrap();
        let x3 = jucys_murphy(3, 3).unwrap();
        assert_eq!(x2.mul(&x3).unwrap(), x3.mul(&x2).unwrap());
    }

    #[test]
    fn symmetrizer_m1_m2() {
        assert_eq!(symmetrizer(1).unwrap(), BrauerElement::identity(1));
        // 1/2 + 1/2 s12 - (1/omega) eps12
        let s2 = symmetrizer(2).unwrap();
        let inv_omega = RatFunc::omega().recip().unwrap();
        let expected = BrauerElement::from_terms(
            2,
            [
                (Diagram::identity(2), c(rat(1, 2))),
                (Diagram::s(2, 1, 2).unwrap(), c(rat(1, 2))),
                (Diagram::eps(2, 1, 2).unwrap(), -&inv_omega),
            ],
        )
        .unwrap();
        assert_eq!(s2, expected);
    }

    #[test]
    fn symmetrizer_kills_eps() {
        let s3 = symmetrizer(3).unwrap();
        let e = eps_elem(3, 1, 2).unwrap();
        assert!(s3.mul(&e).unwrap().is_zero());
    }

    #[test]
    fn antisymmetrizer_small() {
        let a2 = antisymmetrizer(2).unwrap();
        let expected = BrauerElement::from_terms(
            2,
            [
                (Diagram::identity(2), c(rat(1, 2))),
                (Diagram::s(2, 1, 2).unwrap(), c(rat(-1, 2))),
            ],
        )
        .unwrap();
        assert_eq!(a2, expected);
        assert!(eps_elem(2, 1, 2).unwrap().mul(&a2).unwrap().is_zero());
        let a3 = antisymmetrizer(3).unwrap();
        assert_eq!(a3.mul(&a3).unwrap(), a3);
    }

    #[test]
    fn words_round_trip() {
        for m in 1..=4 {
            for d in all_diagrams(m) {
                let w = diagram_to_word(&d);
                assert_eq!(w.eval(m).unwrap(), BrauerElement::from_diagram(d.clone()), "{d} via {w}");
            }
        }
        assert!(diagram_to_word(&Diagram::identity(3)).is_empty());
    }

    #[test]
    fn loops_after_closing_all_legs() {
        // closing every leg of the identity gives m loops; of eps_12 gives 1 + (m-2)
        assert_eq!(Diagram::identity(3).loops_after_closing(&[true; 3]), 3);
        assert_eq!(Diagram::eps(3, 1, 2).unwrap().loops_after_closing(&[true; 3]), 2);
        assert_eq!(Diagram::s(3, 1, 2).unwrap().loops_after_closing(&[true; 3]), 2);
        assert_eq!(Diagram::s(3, 1, 2).unwrap().loops_after_closing(&[true, false, true]), 1);
    }

    #[test]
    fn json_round_trip() {
        let s2 = symmetrizer(2).unwrap();
        let j = BrauerElementJson::from(&s2);
        let text = serde_json::to_string(&j).unwrap();
        let back: BrauerElementJson = serde_json::from_str(&text).unwrap();
        assert_eq!(BrauerElement::try_from(&back).unwrap(), s2);
    }

    #[test]
    fn generic_and_integer_products_agree() {
        let s3 = symmetrizer_jm(3).unwrap();
        let x = jucys_murphy(3, 3).unwrap();
        assert_eq!(s3.mul(&x).unwrap(), s3.mul_generic(&x));
        assert_eq!(s3.mul(&s3).unwrap(), s3.mul_generic(&s3));
    }
}
