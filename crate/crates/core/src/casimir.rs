//! Trace-form Casimir elements `tr C (F_1 + u_1) ... (F_m + u_m)` with `C`
//! the symmetrizer or anti-symmetrizer, and the verification of their
//! Harish-Chandra images.
//!
//! The entries of the ordered product factor leg by leg, so the trace is a
//! sum over nonzero entries `(I, J)` of `rep(d)` and over the set of legs
//! that carry a generator (the mask); the remaining legs carry the shift and
//! force `I_a = J_a`. The coefficients of `C` stay rational functions of
//! `omega` until a single final evaluation, which resolves removable
//! singularities.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::brauer::{antisymmetrizer, symmetrizer_cached, BrauerElement, BrauerError, Diagram};
use crate::exec;
use crate::liealg::{scalar_of_matrix, Enveloping, LieError, Mono, Uea};
use crate::ring::{int, rat, MPoly, MPolyJson, Poly, RatFunc, Rational, Ring, RingError, Var};
use crate::symfun::{at_weight, defining_weight, negate_u, recurrence_factor, shift_u, target_chi, theorem_target};
use crate::tensor::{decode, rep_diagram_entries, rep_element_at, space_size, ActionConfig, Family, TensorError};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projector {
    Sym,
    Asym,
}

impl Projector {
    pub fn tag(&self) -> &'static str {
        match self {
            Projector::Sym => "sym",
            Projector::Asym => "asym",
        }
    }

    pub fn parse(s: &str) -> Option<Projector> {
        match s {
            "sym" | "S" => Some(Projector::Sym),
            "asym" | "A" => Some(Projector::Asym),
            _ => None,
        }
    }

    pub fn element(&self, m: usize) -> Result<Arc<BrauerElement>, BrauerError> {
        match self {
            Projector::Sym => symmetrizer_cached(m),
            Projector::Asym => Ok(Arc::new(antisymmetrizer(m)?)),
        }
    }
}

impl fmt::Display for Projector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// How `omega` is tied to `N` before the final evaluation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaMode {
    /// Each loop closed by the trace contributes `±omega` instead of `N`,
    /// so the whole trace is a rational function of `omega` that agrees
    /// with the fixed-`N` value wherever that is defined.
    Coupled,
    /// `omega` appears only in the coefficients of `C`; loops count `N`.
    FixedDimension,
    /// Coefficients are evaluated at `omega = ±N` first; poles are errors.
    Direct,
}

/// Shifts `u_1, ..., u_m`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Shifts {
    Explicit(Vec<Rational>),
    /// `u_a = u + (m + 1 - 2a)/2`.
    Symbolic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CasimirSpec {
    pub cfg: ActionConfig,
    pub projector: Projector,
    pub m: usize,
    pub shifts: Shifts,
    pub mode: OmegaMode,
    /// Multiply by `(omega + m - 2)/(omega + 2m - 2)` for the symplectic
    /// symmetrizer; ignored otherwise.
    pub normalize: bool,
    /// Leg carried by the `p`-th factor (0-based).
    pub leg_order: Vec<usize>,
    /// Shift index carried by the `p`-th factor (0-based).
    pub shift_order: Vec<usize>,
}

impl CasimirSpec {
    pub fn new(cfg: ActionConfig, projector: Projector, m: usize, shifts: Shifts) -> Self {
        CasimirSpec {
            cfg,
            projector,
            m,
            shifts,
            mode: OmegaMode::Coupled,
            normalize: true,
            leg_order: (0..m).collect(),
            shift_order: (0..m).collect(),
        }
    }

    /// Degree-`2k` element of the theorems.
    pub fn theorem(cfg: ActionConfig, projector: Projector, k: usize) -> Self {
        let k_i = k as i64;
        let shifts = (1..=2 * k as i64)
            .map(|a| match (cfg.family, projector) {
                (Family::Orthogonal, Projector::Sym) | (Family::Symplectic, Projector::Asym) => int(k_i - a),
                (Family::Orthogonal, Projector::Asym) | (Family::Symplectic, Projector::Sym) => int(a - k_i),
            })
            .collect();
        CasimirSpec::new(cfg, projector, 2 * k, Shifts::Explicit(shifts))
    }

    /// `D_m(u)` (symmetrizer) or `C_m(u)` (anti-symmetrizer).
    pub fn corollary(cfg: ActionConfig, projector: Projector, m: usize) -> Self {
        CasimirSpec::new(cfg, projector, m, Shifts::Symbolic)
    }

    pub fn with_mode(mut self, mode: OmegaMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_orders(mut self, leg_order: Vec<usize>, shift_order: Vec<usize>) -> Self {
        self.leg_order = leg_order;
        self.shift_order = shift_order;
        self
    }

    /// `u_a` as a polynomial in `u` (0-based `a`).
    pub fn shift_poly(&self, a: usize) -> Poly {
        match &self.shifts {
            Shifts::Explicit(v) => Poly::constant(v[a].clone()),
            Shifts::Symbolic => Poly::linear(rat(self.m as i64 - 1 - 2 * a as i64, 2)),
        }
    }

    /// Normalization factor as a function of `omega`.
    pub fn normalization(&self) -> RatFunc {
        if self.normalize && self.cfg.family == Family::Symplectic && self.projector == Projector::Sym {
            let m = self.m as i64;
            RatFunc::new(Poly::linear(int(m - 2)), Poly::linear(int(2 * m - 2))).expect("nonzero denominator")
        } else {
            RatFunc::one()
        }
    }

    pub fn validate(&self) -> Result<(), CasimirError> {
        let m = self.m;
        if m == 0 || m > 8 {
            return Err(CasimirError::Invalid(format!("degree m = {m} outside 1..=8")));
        }
        let is_perm = |v: &[usize]| {
            let mut s = v.to_vec();
            s.sort_unstable();
            s == (0..m).collect::<Vec<_>>()
        };
        if !is_perm(&self.leg_order) || !is_perm(&self.shift_order) {
            return Err(CasimirError::Invalid("leg and shift orders must be permutations".into()));
        }
        if let Shifts::Explicit(v) = &self.shifts {
            if v.len() != m {
                return Err(CasimirError::Invalid(format!("expected {m} shifts, got {}", v.len())));
            }
        }
        space_size(self.cfg.dim, m)?;
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!("{} {} m={}", self.cfg.lie_name(), self.projector, self.m)
    }
}

#[derive(Debug, Error)]
pub enum CasimirError {
    #[error("{statement}: {source}")]
    Pole {
        statement: String,
        #[source]
        source: RingError,
    },
    #[error(transparent)]
    Brauer(#[from] BrauerError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("invalid specification: {0}")]
    Invalid(String),
    #[error("integer overflow while contracting {0}")]
    Overflow(String),
}

impl CasimirError {
    pub fn is_pole(&self) -> bool {
        matches!(
            self,
            CasimirError::Pole { .. }
                | CasimirError::Ring(RingError::Pole { .. })
                | CasimirError::Tensor(TensorError::Ring(RingError::Pole { .. }))
        )
    }

    pub fn is_non_central(&self) -> bool {
        matches!(self, CasimirError::Lie(LieError::NonCentral { .. }))
    }
}

// ---------------------------------------------------------------------------
// Integer polynomials in omega

type IPoly = Vec<i128>;

fn ipoly_mul(a: &[i128], b: &[i128]) -> Option<IPoly> {
    if a.is_empty() || b.is_empty() {
        return Some(Vec::new());
    }
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].checked_add(x.checked_mul(*y)?)?;
        }
    }
    Some(out)
}

fn ipoly_add_scaled(acc: &mut IPoly, p: &[i128], k: i128) -> Option<()> {
    if acc.len() < p.len() {
        acc.resize(p.len(), 0);
    }
    for (a, x) in acc.iter_mut().zip(p) {
        *a = a.checked_add(x.checked_mul(k)?)?;
    }
    Some(())
}

fn ipoly_to_poly(p: &[i128]) -> Poly {
    Poly::from_coeffs(p.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
}

fn to_i128(r: &Rational) -> Option<i128> {
    if r.is_integer() {
        r.to_integer().to_i128()
    } else {
        None
    }
}

fn poly_lcm(a: &Poly, b: &Poly) -> Poly {
    let g = Poly::gcd(a, b);
    let (q, _) = (a * b).div_rem(&g);
    q.monic()
}

/// The projector with integer-polynomial numerators over a common
/// denominator: `c_d = numer_d / denom`.
struct Prepared {
    terms: Vec<(Diagram, IPoly)>,
    denom: Poly,
}

fn prepare(spec: &CasimirSpec) -> Result<Prepared, CasimirError> {
    let c = spec.projector.element(spec.m)?;
    let omega0 = spec.cfg.omega();
    if spec.mode == OmegaMode::Direct {
        let mut vals = Vec::new();
        for (d, coeff) in c.terms() {
            let v = coeff.eval(&omega0).map_err(|e| CasimirError::Pole {
                statement: spec.describe(),
                source: e,
            })?;
            vals.push((d.clone(), v));
        }
        let lcm = crate::ring::denominator_lcm(vals.iter().map(|(_, v)| v));
        let l = Rational::from_integer(lcm.clone());
        let terms = vals
            .into_iter()
            .map(|(d, v)| {
                let x = to_i128(&(v * &l)).ok_or_else(|| CasimirError::Overflow(spec.describe()))?;
                Ok((d, vec![x]))
            })
            .collect::<Result<Vec<_>, CasimirError>>()?;
        return Ok(Prepared {
            terms,
            denom: Poly::constant(l),
        });
    }
    let mut den = Poly::one();
    for (_, coeff) in c.terms() {
        den = poly_lcm(&den, coeff.denom());
    }
    let mut numers = Vec::new();
    for (d, coeff) in c.terms() {
        let (q, r) = den.div_rem(coeff.denom());
        debug_assert!(r.is_zero());
        numers.push((d.clone(), coeff.numer() * &q));
    }
    let lcm = crate::ring::denominator_lcm(numers.iter().flat_map(|(_, p)| p.coeffs().iter()));
    let l = Rational::from_integer(lcm);
    let mut terms = Vec::new();
    for (d, p) in numers {
        let v: Option<IPoly> = p.coeffs().iter().map(|x| to_i128(&(x * &l))).collect();
        terms.push((d, v.ok_or_else(|| CasimirError::Overflow(spec.describe()))?));
    }
    Ok(Prepared {
        terms,
        denom: den.scale(&l),
    })
}

/// `(mask, word)` → integer polynomial in `omega`.
type Contraction = HashMap<(u16, Vec<u8>), IPoly>;

fn merge_contractions(mut a: Contraction, b: Contraction) -> Option<Contraction> {
    if a.len() < b.len() {
        return merge_contractions(b, a);
    }
    for (k, v) in b {
        let slot = a.entry(k).or_default();
        ipoly_add_scaled(slot, &v, 1)?;
    }
    Some(a)
}

/// Loop weight `(±omega)^L N^(m-L)` per mask, as an integer polynomial.
fn loop_weights(spec: &CasimirSpec, d: &Diagram) -> Vec<IPoly> {
    let m = spec.m;
    let dim = spec.cfg.dim as i128;
    let s: i128 = match spec.cfg.family {
        Family::Orthogonal => 1,
        Family::Symplectic => -1,
    };
    (0..1u16 << m)
        .map(|mask| match spec.mode {
            OmegaMode::Coupled => {
                let mut closed = vec![false; m];
                for p in 0..m {
                    if mask & (1 << p) == 0 {
                        closed[spec.leg_order[p]] = true;
                    }
                }
                let l = d.loops_after_closing(&closed);
                let mut w = vec![0i128; l + 1];
                w[l] = s.pow(l as u32) * dim.pow((m - l) as u32);
                w
            }
            OmegaMode::FixedDimension | OmegaMode::Direct => vec![dim.pow(m as u32)],
        })
        .collect()
}

fn contract_diagram(
    spec: &CasimirSpec,
    env: &Enveloping,
    codes: &[Vec<u8>],
    d: &Diagram,
    numer: &IPoly,
) -> Result<Contraction, CasimirError> {
    let m = spec.m;
    let basis = env.basis();
    let mut counts: HashMap<(u16, Vec<u8>), i64> = HashMap::new();
    let mut fpos: Vec<Option<(u8, i64)>> = vec![None; m];
    'entries: for (r, c, v) in rep_diagram_entries(&spec.cfg, d)? {
        let (row, col) = (&codes[r as usize], &codes[c as usize]);
        let mut neq = 0u16;
        let mut free = 0u16;
        for (p, &leg) in spec.leg_order.iter().enumerate() {
            // X[J, I] carries F_{J_a I_a} with I the row and J the column of C
            let (j, i) = (col[leg] as usize, row[leg] as usize);
            fpos[p] = basis.f(j, i);
            if i != j {
                if fpos[p].is_none() {
                    continue 'entries;
                }
                neq |= 1 << p;
            } else {
                free |= 1 << p;
            }
        }
        let mut sub = free;
        loop {
            let mask = neq | sub;
            let mut word = Vec::with_capacity(mask.count_ones() as usize);
            let mut sign = v;
            let mut ok = true;
            for (p, f) in fpos.iter().enumerate() {
                if mask & (1 << p) != 0 {
                    match f {
                        Some((idx, s)) => {
                            word.push(*idx);
                            sign *= s;
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            if ok {
                *counts.entry((mask, word)).or_insert(0) += sign;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
    }
    let weights = loop_weights(spec, d);
    let scaled: Vec<IPoly> = weights
        .iter()
        .map(|w| ipoly_mul(numer, w))
        .collect::<Option<_>>()
        .ok_or_else(|| CasimirError::Overflow(spec.describe()))?;
    let mut out = Contraction::with_capacity(counts.len());
    for ((mask, word), k) in counts {
        if k == 0 {
            continue;
        }
        let mut p = Vec::new();
        ipoly_add_scaled(&mut p, &scaled[mask as usize], k as i128)
            .ok_or_else(|| CasimirError::Overflow(spec.describe()))?;
        out.insert((mask, word), p);
    }
    Ok(out)
}

/// Build the element described by `spec` in PBW normal form. Coefficients
/// are polynomials in `u` (constants for explicit shifts).
pub fn build_casimir(spec: &CasimirSpec, env: &Enveloping) -> Result<Uea<MPoly>, CasimirError> {
    spec.validate()?;
    if env.basis().cfg() != &spec.cfg {
        return Err(CasimirError::Lie(LieError::BasisMismatch(format!(
            "enveloping algebra of {} used for {}",
            env.basis().cfg().lie_name(),
            spec.cfg.lie_name()
        ))));
    }
    let m = spec.m;
    let dim = spec.cfg.dim;
    let size = space_size(dim, m)?;
    let codes: Vec<Vec<u8>> = (0..size as u32)
        .map(|c| decode(dim, m, c).into_iter().map(|x| x as u8).collect())
        .collect();
    let prepared = prepare(spec)?;

    let contraction = exec::map_reduce(
        &prepared.terms,
        || Ok(Contraction::new()),
        |(d, numer)| contract_diagram(spec, env, &codes, d, numer),
        |a, b| {
            let (a, b) = (a?, b?);
            merge_contractions(a, b).ok_or_else(|| CasimirError::Overflow(spec.describe()))
        },
    )?;

    // normal-order each distinct word once
    let mut words: Vec<Vec<u8>> = contraction.keys().map(|(_, w)| w.clone()).collect();
    words.sort_unstable();
    words.dedup();
    let forms = exec::map(&words, |w| env.mul_mono_word(&[], w));
    let nf: HashMap<&Vec<u8>, &Vec<(Mono, i64)>> = words.iter().zip(forms.iter()).collect();

    let mut by_mono: HashMap<Mono, BTreeMap<u16, IPoly>> = HashMap::new();
    let mut keys: Vec<&(u16, Vec<u8>)> = contraction.keys().collect();
    keys.sort_unstable();
    for key in keys {
        let poly = &contraction[key];
        for (mono, k) in nf[&key.1].iter() {
            let slot = by_mono.entry(mono.clone()).or_default().entry(key.0).or_default();
            ipoly_add_scaled(slot, poly, *k as i128).ok_or_else(|| CasimirError::Overflow(spec.describe()))?;
        }
    }

    // shift factor per mask: product over unmasked factors of u_{tau(p)}
    let mask_coeffs: Vec<Poly> = (0..1u16 << m)
        .map(|mask| {
            (0..m)
                .filter(|p| mask & (1 << p) == 0)
                .fold(Poly::one(), |acc, p| &acc * &spec.shift_poly(spec.shift_order[p]))
        })
        .collect();

    let omega0 = spec.cfg.omega();
    let nu = match spec.mode {
        OmegaMode::Direct => {
            let v = spec.normalization().eval(&omega0).map_err(|e| CasimirError::Pole {
                statement: spec.describe(),
                source: e,
            })?;
            RatFunc::constant(v)
        }
        _ => spec.normalization(),
    };
    let total_den = prepared.denom.scale(&Rational::from_integer(BigInt::from(dim).pow(m as u32)));

    let mut monos: Vec<(Mono, BTreeMap<u16, IPoly>)> = by_mono.into_iter().collect();
    monos.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let finished = exec::map(&monos, |(mono, per_mask)| -> Result<(Mono, MPoly), CasimirError> {
        let mut by_power: BTreeMap<usize, Poly> = BTreeMap::new();
        for (mask, poly) in per_mask {
            let p = ipoly_to_poly(poly);
            for (e, c) in mask_coeffs[*mask as usize].coeffs().iter().enumerate() {
                if !c.is_zero() {
                    by_power.entry(e).or_insert_with(Poly::zero).add_scaled_assign(&p, c);
                }
            }
        }
        let mut coeff = MPoly::zero();
        for (e, p) in by_power {
            if p.is_zero() {
                continue;
            }
            let f = RatFunc::new(nu.numer() * &p, nu.denom() * &total_den)?;
            let v = f.eval(&omega0).map_err(|err| CasimirError::Pole {
                statement: spec.describe(),
                source: err,
            })?;
            if !v.is_zero() {
                coeff = &coeff + &MPoly::var(Var::U).pow(e as u32).scale(&RatFunc::constant(v));
            }
        }
        Ok((mono.clone(), coeff))
    });
    let mut out = Uea::zero();
    for item in finished {
        let (mono, c) = item?;
        out.add_term(mono, c);
    }
    Ok(out)
}

/// Whether evaluating the projector and normalization at `omega = ±N`
/// before contracting would hit a pole.
pub fn needs_omega_limit(spec: &CasimirSpec) -> Result<bool, CasimirError> {
    let omega0 = spec.cfg.omega();
    let c = spec.projector.element(spec.m)?;
    let pole = c.terms().any(|(_, coeff)| coeff.eval(&omega0).is_err());
    Ok(pole || spec.normalization().eval(&omega0).is_err())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TraceSide {
    Left,
    Right,
}

/// Entry-by-entry reference computation with `C` evaluated at `omega = ±N`:
/// `sum C[I,J] X[J,I]` (`C` on the left) or `sum X[I,K] C[K,I]` (`C` on the
/// right), each entry of `X` multiplied out in `U(g)`.
pub fn build_casimir_naive(spec: &CasimirSpec, env: &Enveloping, side: TraceSide) -> Result<Uea<MPoly>, CasimirError> {
    spec.validate()?;
    let cfg = spec.cfg;
    let m = spec.m;
    let c = spec.projector.element(m)?;
    let op = rep_element_at(&cfg, &c)?;
    let nu = spec.normalization().eval(&cfg.omega()).map_err(|e| CasimirError::Pole {
        statement: spec.describe(),
        source: e,
    })?;
    let shift = |a: usize| -> MPoly {
        let p = spec.shift_poly(a);
        let mut out = MPoly::zero();
        for (e, x) in p.coeffs().iter().enumerate() {
            out = &out + &MPoly::var(Var::U).pow(e as u32).scale(&RatFunc::constant(x.clone()));
        }
        out
    };
    // X[row, col] = prod_p (F_{row_leg, col_leg} + u delta)
    let x_entry = |row: &[usize], col: &[usize]| -> Uea<MPoly> {
        let mut acc = Uea::<MPoly>::one();
        for p in 0..m {
            let leg = spec.leg_order[p];
            let mut factor: Uea<MPoly> = env.f_elem(row[leg], col[leg]);
            if row[leg] == col[leg] {
                factor = factor.add(&Uea::scalar(shift(spec.shift_order[p])));
            }
            acc = env.mul(&acc, &factor);
            if acc.is_zero() {
                break;
            }
        }
        acc
    };
    let scalar = |v: &Rational| MPoly::from_rational(v * &nu);
    let mut out = Uea::zero();
    match side {
        TraceSide::Left => {
            for (r, col, v) in op.entries() {
                let i = decode(cfg.dim, m, r);
                let j = decode(cfg.dim, m, col);
                let term = x_entry(&j, &i);
                out = out.add(&term.map(|t| scalar(v).mul_ref(t)));
            }
        }
        TraceSide::Right => {
            let mut by_col: BTreeMap<u32, Vec<(u32, Rational)>> = BTreeMap::new();
            for (r, col, v) in op.entries() {
                by_col.entry(col).or_default().push((r, v.clone()));
            }
            for (i_code, column) in by_col {
                let i = decode(cfg.dim, m, i_code);
                for (k_code, v) in column {
                    let k = decode(cfg.dim, m, k_code);
                    let term = x_entry(&i, &k);
                    out = out.add(&term.map(|t| t.mul_ref(&scalar(&v))));
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Element cache

type CacheKey = (Family, usize, Projector, usize, OmegaMode);

static COROLLARY_CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Uea<MPoly>>>>> = OnceLock::new();

/// Memoized `D_m(u)` / `C_m(u)` for the standard factor order.
pub fn corollary_element(
    cfg: ActionConfig,
    projector: Projector,
    m: usize,
    mode: OmegaMode,
    env: &Enveloping,
) -> Result<Arc<Uea<MPoly>>, CasimirError> {
    let key = (cfg.family, cfg.dim, projector, m, mode);
    let cache = COROLLARY_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(z) = cache.lock().expect("cache poisoned").get(&key) {
        return Ok(z.clone());
    }
    let z = if m == 0 {
        Arc::new(Uea::one())
    } else {
        Arc::new(build_casimir(&CasimirSpec::corollary(cfg, projector, m).with_mode(mode), env)?)
    };
    cache.lock().expect("cache poisoned").insert(key, z.clone());
    Ok(z)
}

// ---------------------------------------------------------------------------
// Verification

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub statement: String,
    pub family: Family,
    #[serde(rename = "N")]
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<usize>,
    pub pass: bool,
    pub chi: Option<MPolyJson>,
    pub target: Option<MPolyJson>,
    pub millis: u128,
    pub checks: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl VerificationReport {
    fn new(statement: String, cfg: &ActionConfig) -> Self {
        VerificationReport {
            statement,
            family: cfg.family,
            dim: cfg.dim,
            k: None,
            m: None,
            pass: false,
            chi: None,
            target: None,
            millis: 0,
            checks: BTreeMap::new(),
            flags: Vec::new(),
            error: None,
        }
    }

    fn finish(mut self, start: Instant) -> Self {
        self.millis = start.elapsed().as_millis();
        self.pass = self.error.is_none() && !self.checks.is_empty() && self.checks.values().all(|v| *v);
        self
    }

    pub fn summary(&self) -> String {
        self.render(true)
    }

    /// Like [`summary`](Self::summary) without the timing, so the text is
    /// reproducible.
    pub fn summary_untimed(&self) -> String {
        self.render(false)
    }

    fn render(&self, timed: bool) -> String {
        let param = match (self.k, self.m) {
            (Some(k), _) => format!("k={k}"),
            (_, Some(m)) => format!("m={m}"),
            _ => String::new(),
        };
        let failed: Vec<&str> = self.checks.iter().filter(|(_, v)| !**v).map(|(k, _)| k.as_str()).collect();
        let mut s = format!(
            "{} {}{} {} {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.family.tag(),
            self.dim,
            self.statement,
            param
        );
        if timed {
            s.push_str(&format!(" ({} ms)", self.millis));
        }
        if !self.flags.is_empty() {
            s.push_str(&format!(" [{}]", self.flags.join(", ")));
        }
        if !failed.is_empty() {
            s.push_str(&format!(" failed: {}", failed.join(", ")));
        }
        if let Some(e) = &self.error {
            s.push_str(&format!(" error: {e}"));
        }
        s
    }
}

fn family_word(cfg: &ActionConfig) -> &'static str {
    match cfg.family {
        Family::Orthogonal => "orth",
        Family::Symplectic => "symp",
    }
}

pub fn theorem_id(cfg: &ActionConfig, projector: Projector) -> String {
    format!("{}-{}-theorem", family_word(cfg), projector)
}

pub fn corollary_id(cfg: &ActionConfig, projector: Projector) -> String {
    format!("{}-{}-corollary", family_word(cfg), projector)
}

/// Checks shared by the theorem and corollary verifications: centrality,
/// the Harish-Chandra image against `target`, and the defining-
/// representation oracle. Returns the image.
fn check_central_element(
    z: &Uea<MPoly>,
    target: &MPoly,
    env: &Enveloping,
    report: &mut VerificationReport,
) -> Option<MPoly> {
    let central = env.is_central(z);
    report.checks.insert("central".into(), central.is_ok());
    if let Err(e) = central {
        report.error = Some(e.to_string());
        return None;
    }
    let chi = env.cartan_projection(z);
    report.checks.insert("hc-equals-target".into(), &chi == target);
    let n = env.basis().rank();
    let expected = at_weight(&chi, &defining_weight(n));
    let mat = env.eval_in_defining_rep(z);
    report
        .checks
        .insert("defining-rep-scalar".into(), scalar_of_matrix(&mat).as_ref() == Some(&expected));
    report.chi = Some((&chi).into());
    report.target = Some(target.into());
    Some(chi)
}

/// Theorem instance: the degree-`2k` element against its predicted image.
pub fn verify_theorem(
    cfg: ActionConfig,
    projector: Projector,
    k: usize,
    mode: OmegaMode,
    env: &Enveloping,
) -> VerificationReport {
    let start = Instant::now();
    let mut report = VerificationReport::new(theorem_id(&cfg, projector), &cfg);
    report.k = Some(k);
    let spec = CasimirSpec::theorem(cfg, projector, k).with_mode(mode);
    if let Ok(true) = needs_omega_limit(&spec) {
        report.flags.push("omega-limit".into());
    }
    let n = cfg.rank();
    if cfg.family == Family::Symplectic && projector == Projector::Sym && n + 1 == 2 * k {
        report.flags.push("literal-factor-undefined".into());
    }
    let target = theorem_target(&cfg, projector, k);
    match build_casimir(&spec, env) {
        Ok(z) => {
            check_central_element(&z, &target, env, &mut report);
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    report.finish(start)
}

/// Corollary instance: `D_m(u)` or `C_m(u)` against its predicted image,
/// plus element-level parity and the recurrence in `u`.
pub fn verify_corollary(
    cfg: ActionConfig,
    projector: Projector,
    m: usize,
    mode: OmegaMode,
    env: &Enveloping,
) -> VerificationReport {
    let start = Instant::now();
    let mut report = VerificationReport::new(corollary_id(&cfg, projector), &cfg);
    report.m = Some(m);
    let spec = CasimirSpec::corollary(cfg, projector, m).with_mode(mode);
    if let Ok(true) = needs_omega_limit(&spec) {
        report.flags.push("omega-limit".into());
    }
    let target = target_chi(&cfg, projector, m);
    let outcome = (|| -> Result<(), CasimirError> {
        let z = corollary_element(cfg, projector, m, mode, env)?;
        if check_central_element(&z, &target, env, &mut report).is_none() {
            return Ok(());
        }
        let sign = if m.is_multiple_of(2) { int(1) } else { int(-1) };
        let parity = z.map(negate_u) == z.scale(&MPoly::from_rational(sign));
        report.checks.insert("parity".into(), parity);
        let prev = corollary_element(cfg, projector, m - 1, mode, env)?;
        let diff = z.map(|c| shift_u(c, &rat(1, 2))).sub(&z.map(|c| shift_u(c, &rat(-1, 2))));
        let factor = MPoly::from_rational(recurrence_factor(&cfg, projector, m));
        report.checks.insert("recurrence".into(), diff == prev.scale(&factor));
        Ok(())
    })();
    if let Err(e) = outcome {
        report.error = Some(e.to_string());
    }
    report.finish(start)
}

/// Compare the element with factors permuted by `sigma` (legs) and `tau`
/// (shifts) against the standard order.
pub fn verify_trace_permutation(
    cfg: ActionConfig,
    projector: Projector,
    sigma: &[usize],
    tau: &[usize],
    shifts: &[Rational],
    env: &Enveloping,
) -> Result<bool, CasimirError> {
    let m = shifts.len();
    let base = CasimirSpec::new(cfg, projector, m, Shifts::Explicit(shifts.to_vec()));
    let permuted = base.clone().with_orders(sigma.to_vec(), tau.to_vec());
    Ok(build_casimir(&base, env)? == build_casimir(&permuted, env)?)
}

/// Harish-Chandra image rendered for humans: in `lambda` (as `x1, x2, ...`)
/// and in the shifted labels `l_i = lambda_i + rho_i`.
pub fn render_image(cfg: &ActionConfig, chi: &MPoly) -> (String, String) {
    let shift = crate::symfun::ShiftConfig::new(*cfg);
    (
        crate::symfun::render_lambda(chi),
        crate::symfun::to_shifted_labels(chi, &shift).render(),
    )
}

/// Identity check used by tests: `z` with all coefficients constant.
pub fn constant_coefficients(z: &Uea<MPoly>) -> Option<Uea<Rational>> {
    let mut out = Uea::zero();
    for (m, c) in z.terms() {
        let v = if c.is_zero() {
            Rational::zero()
        } else {
            c.constant_value()?.as_constant()?
        };
        out.add_term(m.clone(), v);
    }
    Some(out)
}

pub fn one_element() -> Uea<MPoly> {
    Uea::scalar(MPoly::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Var;
    use crate::symfun::ShiftConfig;

    fn env(cfg: ActionConfig) -> Enveloping {
        Enveloping::for_config(cfg).unwrap()
    }

    #[test]
    fn o3_k1_image() {
        let cfg = ActionConfig::orthogonal(3);
        let e = env(cfg);
        let z = build_casimir(&CasimirSpec::theorem(cfg, Projector::Sym, 1), &e).unwrap();
        let chi = e.hc_image(&z).unwrap();
        let l1 = MPoly::var(Var::Lambda(1));
        assert_eq!(chi, (&l1.pow(2) + &l1).scale(&RatFunc::constant(rat(5, 3))));
        let m = e.eval_in_defining_rep(&z);
        assert_eq!(scalar_of_matrix(&m), Some(MPoly::from_rational(rat(10, 3))));
        let (lam, shifted) = render_image(&cfg, &chi);
        assert_eq!(shifted, "(5/3)*l1^2 - 5/12");
        assert_eq!(lam, "(5/3)*x1^2 + (5/3)*x1");
    }

    #[test]
    fn sp4_k1_image() {
        let cfg = ActionConfig::symplectic(4);
        let e = env(cfg);
        let z = build_casimir(&CasimirSpec::theorem(cfg, Projector::Sym, 1), &e).unwrap();
        let chi = e.hc_image(&z).unwrap();
        let l = |i: u8, c: i64| &MPoly::var(Var::Lambda(i)) + &MPoly::from_rational(int(c));
        let e1 = &(&l(1, 2).pow(2) - &MPoly::from_rational(int(1))) + &(&l(2, 1).pow(2) - &MPoly::from_rational(int(4)));
        assert_eq!(chi, -&e1);
    }

    #[test]
    fn o4_asym_and_sp4_asym() {
        let cfg = ActionConfig::orthogonal(4);
        let e = env(cfg);
        let z = build_casimir(&CasimirSpec::theorem(cfg, Projector::Asym, 1), &e).unwrap();
        let l1 = &MPoly::var(Var::Lambda(1)) + &MPoly::one();
        let l2 = MPoly::var(Var::Lambda(2));
        let expected = -&(&l1.pow(2) + &(&l2.pow(2) - &MPoly::one()));
        assert_eq!(e.hc_image(&z).unwrap(), expected);

        let cfg = ActionConfig::symplectic(4);
        let e = env(cfg);
        let z = build_casimir(&CasimirSpec::theorem(cfg, Projector::Asym, 1), &e).unwrap();
        assert_eq!(e.hc_image(&z).unwrap(), theorem_target(&cfg, Projector::Asym, 1));
    }

    #[test]
    fn trace_of_f_vanishes() {
        for cfg in [ActionConfig::orthogonal(3), ActionConfig::symplectic(4)] {
            let e = env(cfg);
            let spec = CasimirSpec::new(cfg, Projector::Sym, 1, Shifts::Explicit(vec![int(0)]));
            assert!(build_casimir(&spec, &e).unwrap().is_zero());
        }
    }

    #[test]
    fn d1_is_n_u() {
        let cfg = ActionConfig::orthogonal(5);
        let e = env(cfg);
        let z = build_casimir(&CasimirSpec::corollary(cfg, Projector::Sym, 1), &e).unwrap();
        let expected = Uea::scalar(MPoly::var(Var::U).scale(&RatFunc::constant(int(5))));
        assert_eq!(z, expected);
    }

    #[test]
    fn modes_agree_in_regular_region() {
        let cfg = ActionConfig::orthogonal(3);
        let e = env(cfg);
        for proj in [Projector::Sym, Projector::Asym] {
            let spec = CasimirSpec::corollary(cfg, proj, 3);
            let a = build_casimir(&spec, &e).unwrap();
            let b = build_casimir(&spec.clone().with_mode(OmegaMode::FixedDimension), &e).unwrap();
            let c = build_casimir(&spec.clone().with_mode(OmegaMode::Direct), &e).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    #[test]
    fn naive_route_and_both_trace_sides_agree() {
        let cfg = ActionConfig::orthogonal(3);
        let e = env(cfg);
        let spec = CasimirSpec::new(cfg, Projector::Sym, 2, Shifts::Explicit(vec![int(0), int(-1)]));
        let fast = build_casimir(&spec, &e).unwrap();
        assert_eq!(build_casimir_naive(&spec, &e, TraceSide::Left).unwrap(), fast);
        assert_eq!(build_casimir_naive(&spec, &e, TraceSide::Right).unwrap(), fast);
        let cfg = ActionConfig::symplectic(4);
        let e = env(cfg);
        let spec = CasimirSpec::corollary(cfg, Projector::Asym, 2);
        assert_eq!(build_casimir_naive(&spec, &e, TraceSide::Right).unwrap(), build_casimir(&spec, &e).unwrap());
    }

    #[test]
    fn direct_mode_reports_pole() {
        let cfg = ActionConfig::symplectic(4);
        let e = env(cfg);
        let spec = CasimirSpec::theorem(cfg, Projector::Sym, 2).with_mode(OmegaMode::Direct);
        let err = build_casimir(&spec, &e).unwrap_err();
        assert!(err.is_pole(), "{err}");
        assert!(needs_omega_limit(&spec).unwrap());
    }

    #[test]
    fn sp4_k2_through_limit() {
        let cfg = ActionConfig::symplectic(4);
        let e = env(cfg);
        let r = verify_theorem(cfg, Projector::Sym, 2, OmegaMode::Coupled, &e);
        assert!(r.pass, "{}", r.summary());
        assert!(r.flags.contains(&"omega-limit".to_string()));
    }

    #[test]
    fn sp2_fixed_dimension_differs() {
        // the literal fixed-N route gives a different u^2 coefficient in the pole region
        let cfg = ActionConfig::symplectic(2);
        let e = env(cfg);
        let spec = CasimirSpec::corollary(cfg, Projector::Sym, 2);
        let coupled = build_casimir(&spec, &e).unwrap();
        let fixed = build_casimir(&spec.clone().with_mode(OmegaMode::FixedDimension), &e).unwrap();
        let u2 = |z: &Uea<MPoly>| z.coeff(&[]).coeff(&[(Var::U, 2)]);
        assert_eq!(u2(&coupled), RatFunc::constant(int(3)));
        assert_ne!(u2(&fixed), u2(&coupled));
        assert_eq!(e.hc_image(&coupled).unwrap(), target_chi(&cfg, Projector::Sym, 2));
    }

    #[test]
    fn corollary_small() {
        let cfg = ActionConfig::orthogonal(3);
        let e = env(cfg);
        for proj in [Projector::Sym, Projector::Asym] {
            for m in 1..=2 {
                let r = verify_corollary(cfg, proj, m, OmegaMode::Coupled, &e);
                assert!(r.pass, "{}", r.summary());
            }
        }
    }

    #[test]
    fn odd_antisymmetric_vanishes_at_zero() {
        let cfg = ActionConfig::orthogonal(4);
        let e = env(cfg);
        let z = build_casimir(&CasimirSpec::corollary(cfg, Projector::Asym, 3), &e).unwrap();
        assert!(z.map(|c| c.eval_var(Var::U, &int(0))).is_zero());
    }

    #[test]
    fn trace_permutation_small() {
        let cfg = ActionConfig::orthogonal(3);
        let e = env(cfg);
        let shifts = [int(0), int(-1)];
        assert!(verify_trace_permutation(cfg, Projector::Sym, &[1, 0], &[0, 1], &shifts, &e).unwrap());
        assert!(verify_trace_permutation(cfg, Projector::Asym, &[0, 1], &[1, 0], &shifts, &e).unwrap());
    }

    #[test]
    fn shift_config_used_for_render() {
        let s = ShiftConfig::new(ActionConfig::orthogonal(3));
        assert_eq!(s.rho(1), rat(1, 2));
    }
}
