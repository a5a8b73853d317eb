//! Verification suites shared by the command-line tool and the acceptance
//! tests. Each runner returns one [`CriterionOutcome`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::brauer::{
    all_diagrams, antisymmetrizer, eps_elem, jucys_murphy, s_elem, symmetrizer, symmetrizer_cached, BrauerElement,
};
use crate::casimir::{verify_corollary, verify_theorem, verify_trace_permutation, OmegaMode, Projector, VerificationReport};
use crate::exec;
use crate::liealg::{check_defining_relation, Enveloping, LieBasis};
use crate::ring::{int, rat, Poly, RatFunc, Rational};
use crate::symfun::{classical_brute_force, factorial_e, factorial_h, vanishing_check, z_vars, Kind, ShiftConfig};
use crate::tensor::{rep_diagram, rep_element_at, ActionConfig, Family};

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub millis: u128,
    pub reports: Vec<VerificationReport>,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {} {}: {} ({} ms) {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.millis,
            self.detail
        )
    }

    pub fn line_untimed(&self) -> String {
        format!(
            "criterion {} {}: {} {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

struct Tally {
    checked: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn outcome(self, id: u8, name: &'static str, start: Instant) -> CriterionOutcome {
        let detail = if self.failures.is_empty() {
            format!("{} checks", self.checked)
        } else {
            format!(
                "{} of {} checks failed; first: {}",
                self.failures.len(),
                self.checked,
                self.failures[0]
            )
        };
        CriterionOutcome {
            id,
            name,
            pass: self.failures.is_empty(),
            detail,
            millis: start.elapsed().as_millis(),
            reports: Vec::new(),
        }
    }
}

static ENVS: OnceLock<Mutex<HashMap<ActionConfig, Arc<Enveloping>>>> = OnceLock::new();

/// Process-wide enveloping algebra per configuration, so normal-form memos
/// are shared between instances.
pub fn shared_env(cfg: ActionConfig) -> Arc<Enveloping> {
    let envs = ENVS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = envs.lock().expect("env cache poisoned");
    guard
        .entry(cfg)
        .or_insert_with(|| Arc::new(Enveloping::for_config(cfg).expect("structure constants close")))
        .clone()
}

fn double_factorial_odd(m: usize) -> usize {
    (1..=m).map(|i| 2 * i - 1).product()
}

/// Diagram counts, idempotency, agreement of the two symmetrizer formulas
/// and absorption of `s_ab`, `eps_ab`.
pub fn brauer_structure(max_m: usize) -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    for m in 1..=max_m {
        let count = all_diagrams(m).len();
        t.check(count == double_factorial_odd(m), || format!("m={m}: {count} diagrams"));
        let s = symmetrizer(m);
        t.check(s.is_ok(), || format!("m={m}: symmetrizer formulas disagree"));
        let Ok(s) = s else { continue };
        let a = antisymmetrizer(m).expect("m >= 1");
        t.check(s.mul(&s).ok().as_ref() == Some(&s), || format!("S^({m}) not idempotent"));
        t.check(a.mul(&a).ok().as_ref() == Some(&a), || format!("A^({m}) not idempotent"));
        let zero = BrauerElement::zero(m);
        let minus_a = a.scale(&RatFunc::constant(int(-1)));
        for x in 1..=m {
            for y in x + 1..=m {
                let sx = s_elem(m, x, y).expect("valid pair");
                let ex = eps_elem(m, x, y).expect("valid pair");
                t.check(sx.mul(&s).ok().as_ref() == Some(&s), || format!("s_{x}{y} S^({m}) != S"));
                t.check(s.mul(&sx).ok().as_ref() == Some(&s), || format!("S^({m}) s_{x}{y} != S"));
                t.check(ex.mul(&s).ok().as_ref() == Some(&zero), || format!("eps_{x}{y} S^({m}) != 0"));
                t.check(s.mul(&ex).ok().as_ref() == Some(&zero), || format!("S^({m}) eps_{x}{y} != 0"));
                t.check(sx.mul(&a).ok().as_ref() == Some(&minus_a), || format!("s_{x}{y} A^({m}) != -A"));
                t.check(a.mul(&sx).ok().as_ref() == Some(&minus_a), || format!("A^({m}) s_{x}{y} != -A"));
                t.check(ex.mul(&a).ok().as_ref() == Some(&zero), || format!("eps_{x}{y} A^({m}) != 0"));
                t.check(a.mul(&ex).ok().as_ref() == Some(&zero), || format!("A^({m}) eps_{x}{y} != 0"));
            }
        }
    }
    t.outcome(1, "brauer-structure", start)
}

/// Commutation of Jucys–Murphy elements and their eigenvalues on the two
/// projectors.
pub fn jucys_murphy_suite(max_commute_m: usize, max_m: usize) -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    for m in 2..=max_commute_m {
        for a in 1..=m {
            for b in a + 1..=m {
                let xa = jucys_murphy(m, a).expect("valid");
                let xb = jucys_murphy(m, b).expect("valid");
                t.check(xa.mul(&xb).ok() == xb.mul(&xa).ok(), || format!("x_{a} x_{b} != x_{b} x_{a} (m={m})"));
            }
        }
    }
    for m in 1..=max_m {
        let s = symmetrizer_cached(m).expect("valid");
        let a = antisymmetrizer(m).expect("valid");
        for r in 1..=m {
            let x = jucys_murphy(m, r).expect("valid");
            let c = RatFunc::constant(int(r as i64 - 1));
            t.check(x.mul(&s).ok() == Some(s.scale(&c)), || format!("x_{r} S^({m}) != {} S", r - 1));
            t.check(x.mul(&a).ok() == Some(a.scale(&-&c)), || format!("x_{r} A^({m}) != -{} A", r - 1));
        }
    }
    t.outcome(2, "jucys-murphy", start)
}

/// `rep(d1) rep(d2) = omega^loops rep(d1 d2)` on random pairs.
pub fn representation_suite(seed: u64, pairs: usize) -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    let cfgs = [
        ActionConfig::orthogonal(3),
        ActionConfig::orthogonal(4),
        ActionConfig::orthogonal(5),
        ActionConfig::symplectic(4),
        ActionConfig::symplectic(6),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for cfg in cfgs {
        for m in 1..=3 {
            let diagrams = all_diagrams(m);
            let picks: Vec<_> = (0..pairs)
                .map(|_| {
                    (
                        diagrams.choose(&mut rng).expect("nonempty").clone(),
                        diagrams.choose(&mut rng).expect("nonempty").clone(),
                    )
                })
                .collect();
            let results = exec::map(&picks, |(d1, d2)| {
                let (prod, loops) = d1.compose(d2).expect("same degree");
                let lhs = rep_diagram(&cfg, d1).and_then(|a| a.mul(&rep_diagram(&cfg, d2)?));
                let rhs = rep_diagram(&cfg, &prod).map(|r| {
                    let mut w = Rational::from_integer(1.into());
                    for _ in 0..loops {
                        w *= cfg.omega();
                    }
                    r.scale(&w)
                });
                matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b)
            });
            for (ok, (d1, d2)) in results.into_iter().zip(&picks) {
                t.check(ok, || format!("{}: rep({d1}) rep({d2}) != rep(product)", cfg.lie_name()));
            }
        }
    }
    t.outcome(3, "representation", start)
}

/// Partial-trace scalar on the tensor side: `tr_m rep(C^(m)) = c rep(C^(m-1))`.
pub fn partial_trace_scalar(cfg: &ActionConfig, projector: Projector, m: usize) -> Rational {
    let dim = cfg.dim as i64;
    let n = cfg.rank() as i64;
    let mi = m as i64;
    match (cfg.family, projector) {
        (Family::Orthogonal, Projector::Sym) => rat((dim + mi - 3) * (dim + 2 * mi - 2), mi * (dim + 2 * mi - 4)),
        (Family::Orthogonal, Projector::Asym) => rat(dim - mi + 1, mi),
        (Family::Symplectic, Projector::Sym) => rat((2 * n - mi + 3) * (n - mi + 1), mi * (n - mi + 2)),
        (Family::Symplectic, Projector::Asym) => rat(2 * n + mi - 1, mi),
    }
}

/// Brauer-side partial trace scalar as a function of `omega`.
pub fn brauer_partial_trace_scalar(projector: Projector, m: usize) -> RatFunc {
    let mi = m as i64;
    match projector {
        Projector::Sym => {
            let num = &Poly::linear(int(mi - 3)) * &Poly::linear(int(2 * mi - 2));
            let den = Poly::linear(int(2 * mi - 4)).scale(&int(mi));
            RatFunc::new(num, den).expect("nonzero")
        }
        Projector::Asym => RatFunc::new(Poly::linear(int(1 - mi)), Poly::constant(int(mi))).expect("nonzero"),
    }
}

/// Partial traces of the projectors, on the tensor side where the
/// symmetrizer is regular at `omega = ±N` and symbolically in the Brauer
/// algebra for every `m`.
pub fn partial_trace_suite() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    for m in 2..=4 {
        for projector in [Projector::Sym, Projector::Asym] {
            let c = projector.element(m).expect("valid");
            let prev = projector.element(m - 1).expect("valid");
            let traced = c.partial_trace_last().expect("m >= 2");
            let expected = prev.scale(&brauer_partial_trace_scalar(projector, m));
            t.check(traced == expected, || format!("Brauer-side tr_{m} {projector}"));
        }
    }
    let cfgs = [
        ActionConfig::orthogonal(3),
        ActionConfig::orthogonal(4),
        ActionConfig::orthogonal(5),
        ActionConfig::orthogonal(6),
        ActionConfig::symplectic(4),
        ActionConfig::symplectic(6),
    ];
    let mut jobs = Vec::new();
    for cfg in cfgs {
        for m in 2..=4 {
            for projector in [Projector::Sym, Projector::Asym] {
                jobs.push((cfg, m, projector));
            }
        }
    }
    let results = exec::map(&jobs, |&(cfg, m, projector)| -> Option<bool> {
        let c = projector.element(m).ok()?;
        let prev = projector.element(m - 1).ok()?;
        // the symplectic symmetrizer has a pole at omega = -N once m >= n + 2
        let big = rep_element_at(&cfg, &c).ok()?;
        let small = rep_element_at(&cfg, &prev).ok()?;
        let traced = big.partial_trace(m).ok()?;
        Some(traced == small.scale(&partial_trace_scalar(&cfg, projector, m)))
    });
    for (res, (cfg, m, projector)) in results.into_iter().zip(&jobs) {
        match res {
            Some(ok) => t.check(ok, || format!("{}: tr_{m} rep({projector})", cfg.lie_name())),
            None => {
                let regular = !(cfg.family == Family::Symplectic && *projector == Projector::Sym && *m > cfg.rank() + 1);
                t.check(!regular, || format!("{}: rep({projector}^({m})) undefined", cfg.lie_name()));
            }
        }
    }
    t.outcome(4, "partial-traces", start)
}

pub fn defining_relations_suite() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    let cfgs = [
        ActionConfig::orthogonal(3),
        ActionConfig::orthogonal(4),
        ActionConfig::orthogonal(5),
        ActionConfig::orthogonal(6),
        ActionConfig::symplectic(4),
        ActionConfig::symplectic(6),
    ];
    let results = exec::map(&cfgs, |cfg| {
        let basis = LieBasis::new(*cfg).map_err(|e| e.to_string())?;
        if !basis.jacobi_holds() || !basis.antisymmetric() {
            return Err("structure constants fail Jacobi or antisymmetry".to_string());
        }
        check_defining_relation(&basis).map_err(|w| format!("{} at {:?},{:?}: {}", w.relation, w.row, w.col, w.detail))
    });
    for (res, cfg) in results.into_iter().zip(&cfgs) {
        t.check(res.is_ok(), || format!("{}: {}", cfg.lie_name(), res.unwrap_err()));
    }
    t.outcome(5, "defining-relations", start)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Instance {
    pub cfg: ActionConfig,
    pub projector: Projector,
    /// `k` for theorems, `m` for corollaries.
    pub degree: usize,
}

/// The theorem grid, plus the symplectic instance at `n = 2k - 1` where the
/// literal normalization factor is undefined.
pub fn theorem_grid() -> Vec<Instance> {
    let mut out = Vec::new();
    let inst = |cfg, projector, degree| Instance { cfg, projector, degree };
    for dim in 3..=6 {
        let cfg = ActionConfig::orthogonal(dim);
        for k in 1..=2 {
            out.push(inst(cfg, Projector::Sym, k));
            if k <= cfg.rank() {
                out.push(inst(cfg, Projector::Asym, k));
            }
        }
    }
    for (dim, k) in [(4, 1), (6, 1), (8, 1), (8, 2), (4, 2), (6, 2)] {
        out.push(inst(ActionConfig::symplectic(dim), Projector::Sym, k));
    }
    for dim in [4, 6] {
        for k in 1..=2 {
            out.push(inst(ActionConfig::symplectic(dim), Projector::Asym, k));
        }
    }
    out
}

pub fn corollary_grid() -> Vec<Instance> {
    let mut out = Vec::new();
    let cfgs = [
        ActionConfig::orthogonal(3),
        ActionConfig::orthogonal(4),
        ActionConfig::orthogonal(5),
        ActionConfig::symplectic(4),
        ActionConfig::symplectic(6),
    ];
    for cfg in cfgs {
        for projector in [Projector::Sym, Projector::Asym] {
            for m in 1..=4 {
                if cfg.family == Family::Symplectic && projector == Projector::Sym && m > cfg.dim {
                    continue;
                }
                out.push(Instance {
                    cfg,
                    projector,
                    degree: m,
                });
            }
        }
    }
    out
}

fn reports_outcome(id: u8, name: &'static str, reports: Vec<VerificationReport>, start: Instant) -> CriterionOutcome {
    let failed: Vec<&VerificationReport> = reports.iter().filter(|r| !r.pass).collect();
    let detail = if failed.is_empty() {
        format!("{} instances", reports.len())
    } else {
        format!("{} of {} instances failed; first: {}", failed.len(), reports.len(), failed[0].summary_untimed())
    };
    CriterionOutcome {
        id,
        name,
        pass: failed.is_empty() && !reports.is_empty(),
        detail,
        millis: start.elapsed().as_millis(),
        reports,
    }
}

pub fn theorem_suite(instances: &[Instance], mode: OmegaMode) -> CriterionOutcome {
    let start = Instant::now();
    let reports = exec::map(instances, |i| {
        verify_theorem(i.cfg, i.projector, i.degree, mode, &shared_env(i.cfg))
    });
    reports_outcome(6, "theorems", reports, start)
}

pub fn corollary_suite(instances: &[Instance], mode: OmegaMode) -> CriterionOutcome {
    let start = Instant::now();
    // lower degrees first so the recurrence finds D_{m-1} cached
    let mut sorted = instances.to_vec();
    sorted.sort_by_key(|i| i.degree);
    let mut reports = Vec::new();
    for degree in 1..=sorted.last().map_or(0, |i| i.degree) {
        let level: Vec<Instance> = sorted.iter().copied().filter(|i| i.degree == degree).collect();
        reports.extend(exec::map(&level, |i| {
            verify_corollary(i.cfg, i.projector, i.degree, mode, &shared_env(i.cfg))
        }));
    }
    reports_outcome(7, "corollaries", reports, start)
}

fn random_permutation(m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..m).collect();
    p.shuffle(rng);
    p
}

/// Trace invariance under simultaneous reordering of legs and shifts.
pub fn lemma_suite(seed: u64, per_case: usize) -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    for cfg in [ActionConfig::orthogonal(3), ActionConfig::symplectic(4)] {
        for projector in [Projector::Sym, Projector::Asym] {
            for m in 2..=3 {
                for _ in 0..per_case {
                    let sigma = random_permutation(m, &mut rng);
                    let tau = random_permutation(m, &mut rng);
                    let shifts: Vec<Rational> = (0..m).map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect();
                    jobs.push((cfg, projector, sigma, tau, shifts));
                }
            }
        }
    }
    let results = exec::map(&jobs, |(cfg, projector, sigma, tau, shifts)| {
        verify_trace_permutation(*cfg, *projector, sigma, tau, shifts, &shared_env(*cfg)).map_err(|e| e.to_string())
    });
    for (res, (cfg, projector, sigma, tau, _)) in results.into_iter().zip(&jobs) {
        let ok = matches!(res, Ok(true));
        t.check(ok, || {
            format!("{} {projector} sigma={sigma:?} tau={tau:?}: {res:?}", cfg.lie_name())
        });
    }
    t.outcome(8, "trace-permutation", start)
}

/// Vanishing properties and the classical limit of the factorial
/// polynomials.
pub fn symfun_suite() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut shifts = Vec::new();
    for n in 1..=3 {
        shifts.push(ShiftConfig::new(ActionConfig::orthogonal(2 * n)));
        shifts.push(ShiftConfig::new(ActionConfig::orthogonal(2 * n + 1)));
        shifts.push(ShiftConfig::new(ActionConfig::symplectic(2 * n)));
    }
    for shift in &shifts {
        for k in 1..=3 {
            for kind in [Kind::E, Kind::H] {
                let res = vanishing_check(kind, k, shift, 6);
                t.check(res.is_ok(), || {
                    format!("{:?}_{k} nonzero at a_lambda, lambda={:?} ({})", kind, res.clone().unwrap_err(), shift.cfg.lie_name())
                });
            }
        }
    }
    let zero = |_: usize| Rational::from_integer(0.into());
    for n in 1..=3 {
        let z = z_vars(n);
        for k in 0..=4 {
            t.check(factorial_e(k, &z, &zero) == classical_brute_force(Kind::E, k, n), || format!("e_{k}, n={n}"));
            t.check(factorial_h(k, &z, &zero) == classical_brute_force(Kind::H, k, n), || format!("h_{k}, n={n}"));
        }
    }
    t.outcome(9, "symmetric-functions", start)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Brauer,
    Tensor,
    Liealg,
    Symfun,
    Theorems,
    Corollaries,
    Lemma,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "brauer" => Suite::Brauer,
            "tensor" => Suite::Tensor,
            "liealg" => Suite::Liealg,
            "symfun" => Suite::Symfun,
            "theorems" => Suite::Theorems,
            "corollaries" => Suite::Corollaries,
            "lemma" => Suite::Lemma,
            "all" => Suite::All,
            _ => return None,
        })
    }
}
