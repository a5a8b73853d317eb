//! Factorial elementary and complete symmetric polynomials, the content
//! sequence `a_i = (eps + i - 1)^2`, shifted weights `l_i = lambda_i + rho_i`
//! and the closed-form Harish-Chandra targets.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::casimir::Projector;
use crate::ring::{binomial, int, rat, MPoly, RatFunc, Rational, Ring, Var};
use crate::tensor::{ActionConfig, Family};

/// Content sequence and rho-shift attached to a Lie algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftConfig {
    pub cfg: ActionConfig,
}

impl ShiftConfig {
    pub fn new(cfg: ActionConfig) -> Self {
        ShiftConfig { cfg }
    }

    pub fn n(&self) -> usize {
        self.cfg.rank()
    }

    pub fn eps(&self) -> Rational {
        self.cfg.rho_epsilon()
    }

    /// `a_i = (eps + i - 1)^2`, 1-based.
    pub fn a(&self, i: usize) -> Rational {
        let x = self.eps() + int(i as i64 - 1);
        &x * &x
    }

    /// `rho_i = n - i + eps`, 1-based.
    pub fn rho(&self, i: usize) -> Rational {
        int(self.n() as i64 - i as i64) + self.eps()
    }

    /// `l_i = lambda_i + rho_i` as a polynomial in `lambda`.
    pub fn l(&self, i: usize) -> MPoly {
        &MPoly::var(Var::Lambda(i as u8)) + &MPoly::from_rational(self.rho(i))
    }

    /// `(l_1^2, ..., l_n^2)`.
    pub fn l_squared(&self) -> Vec<MPoly> {
        (1..=self.n()).map(|i| self.l(i).pow(2)).collect()
    }
}

pub type Partition = Vec<u32>;

/// All partitions with at most `parts` parts and size at most `max_size`,
/// padded with zeros to length `parts`.
pub fn partitions(parts: usize, max_size: u32) -> Vec<Partition> {
    fn rec(parts: usize, remaining: u32, cap: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if prefix.len() == parts {
            out.push(prefix.clone());
            return;
        }
        for v in (0..=remaining.min(cap)).rev() {
            prefix.push(v);
            rec(parts, remaining - v, v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(parts, max_size, max_size, &mut Vec::new(), &mut out);
    out
}

pub fn partition_len(p: &[u32]) -> usize {
    p.iter().filter(|&&x| x > 0).count()
}

/// Factorial elementary polynomial `e_k(z | a)` with `a` given 1-based.
pub fn factorial_e<R: Ring>(k: usize, z: &[R], a: &dyn Fn(usize) -> Rational) -> R {
    fn rec<R: Ring>(z: &[R], a: &dyn Fn(usize) -> Rational, k: usize, r: usize, start: usize, acc: R, out: &mut R) {
        if r > k {
            out.add_assign_ref(&acc);
            return;
        }
        for p in start..=z.len() {
            let factor = z[p - 1].sub_ref(&R::from_rational(&a(p + 1 - r)));
            rec(z, a, k, r + 1, p + 1, acc.mul_ref(&factor), out);
        }
    }
    let mut out = R::zero();
    rec(z, a, k, 1, 1, R::one(), &mut out);
    out
}

/// Factorial complete polynomial `h_k(z | a)` with `a` given 1-based.
pub fn factorial_h<R: Ring>(k: usize, z: &[R], a: &dyn Fn(usize) -> Rational) -> R {
    fn rec<R: Ring>(z: &[R], a: &dyn Fn(usize) -> Rational, k: usize, r: usize, start: usize, acc: R, out: &mut R) {
        if r > k {
            out.add_assign_ref(&acc);
            return;
        }
        for p in start..=z.len() {
            let factor = z[p - 1].sub_ref(&R::from_rational(&a(p + r - 1)));
            rec(z, a, k, r + 1, p, acc.mul_ref(&factor), out);
        }
    }
    let mut out = R::zero();
    rec(z, a, k, 1, 1, R::one(), &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    E,
    H,
}

pub fn factorial<R: Ring>(kind: Kind, k: usize, z: &[R], a: &dyn Fn(usize) -> Rational) -> R {
    match kind {
        Kind::E => factorial_e(k, z, a),
        Kind::H => factorial_h(k, z, a),
    }
}

/// Classical `e_k` or `h_k` in `z_i = Lambda(i)`, by summing monomials over
/// exponent vectors.
pub fn classical_brute_force(kind: Kind, k: usize, n: usize) -> MPoly {
    fn exps(n: usize, k: u32, max_each: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            if k == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for e in 0..=k.min(max_each) {
            prefix.push(e);
            exps(n, k - e, max_each, prefix, out);
            prefix.pop();
        }
    }
    let max_each = match kind {
        Kind::E => 1,
        Kind::H => k as u32,
    };
    let mut all = Vec::new();
    exps(n, k as u32, max_each, &mut Vec::new(), &mut all);
    let mut out = MPoly::zero();
    for e in all {
        let mut term = MPoly::one();
        for (i, &p) in e.iter().enumerate() {
            term = &term * &MPoly::var(Var::Lambda(i as u8 + 1)).pow(p);
        }
        out = &out + &term;
    }
    out
}

pub fn z_vars(n: usize) -> Vec<MPoly> {
    (1..=n).map(|i| MPoly::var(Var::Lambda(i as u8))).collect()
}

/// `a_lambda = (a_{lambda_1 + n}, ..., a_{lambda_n + 1})`.
pub fn a_lambda(lambda: &[u32], shift: &ShiftConfig) -> Vec<Rational> {
    let n = shift.n();
    assert!(partition_len(lambda) <= n, "partition longer than the rank");
    (1..=n)
        .map(|i| {
            let li = lambda.get(i - 1).copied().unwrap_or(0) as usize;
            shift.a(li + n - i + 1)
        })
        .collect()
}

/// Evaluate the factorial polynomial at `a_lambda` for every partition in
/// the vanishing family (`l(lambda) < k` for `e`, `lambda_1 < k` for `h`)
/// with `|lambda| <= max_size`. Returns the first partition where the value
/// is nonzero.
pub fn vanishing_check(kind: Kind, k: usize, shift: &ShiftConfig, max_size: u32) -> Result<usize, Partition> {
    let a = |i: usize| shift.a(i);
    let mut checked = 0;
    for lambda in partitions(shift.n(), max_size) {
        let in_family = match kind {
            Kind::E => partition_len(&lambda) < k,
            Kind::H => (lambda[0] as usize) < k,
        };
        if !in_family {
            continue;
        }
        let z = a_lambda(&lambda, shift);
        if !factorial(kind, k, &z, &a).is_zero() {
            return Err(lambda);
        }
        checked += 1;
    }
    Ok(checked)
}

/// Value at `a_lambda` for a single partition.
pub fn evaluate_at_a_lambda(kind: Kind, k: usize, lambda: &[u32], shift: &ShiftConfig) -> Rational {
    let a = |i: usize| shift.a(i);
    factorial(kind, k, &a_lambda(lambda, shift), &a)
}

fn eval_at(f: &MPoly, point: &[Rational]) -> Rational {
    let mut g = f.clone();
    for (i, v) in point.iter().enumerate() {
        g = g.eval_var(Var::Lambda(i as u8 + 1), v);
    }
    g.constant_value()
        .and_then(|c| c.as_constant())
        .unwrap_or_else(|| panic!("not a scalar after substitution: {g}"))
}

/// Outcome of the characterization test for a candidate `f(z_1..z_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Characterization {
    /// `f` has the right degree, top component and vanishing, hence equals
    /// the factorial polynomial.
    Determined,
    DegreeTooHigh(u32),
    WrongTopComponent,
    NotVanishingAt(Partition),
}

/// Decide whether `f` (in `z_i = Lambda(i)`, symmetric) satisfies the
/// hypotheses that pin it down as `e_k(z | a)` or `h_k(z | a)`: degree at
/// most `k`, top component `e_k(z)` or `h_k(z)`, and `f(a_lambda) = 0` for
/// all `|lambda| < k`.
pub fn characterize(f: &MPoly, kind: Kind, k: usize, shift: &ShiftConfig) -> Characterization {
    let deg = f.total_degree();
    if deg as usize > k {
        return Characterization::DegreeTooHigh(deg);
    }
    if f.homogeneous_part(k as u32) != classical_brute_force(kind, k, shift.n()) {
        return Characterization::WrongTopComponent;
    }
    if k == 0 {
        return Characterization::Determined;
    }
    for lambda in partitions(shift.n(), k as u32 - 1) {
        if !eval_at(f, &a_lambda(&lambda, shift)).is_zero() {
            return Characterization::NotVanishingAt(lambda);
        }
    }
    Characterization::Determined
}

/// `e_k(l^2 | a)` or `h_k(l^2 | a)` as a polynomial in `lambda`.
pub fn factorial_in_l(kind: Kind, k: usize, shift: &ShiftConfig) -> MPoly {
    let a = |i: usize| shift.a(i);
    factorial(kind, k, &shift.l_squared(), &a)
}

/// `alpha_m = (N + 2m - 2) / (N + m - 2)`.
pub fn alpha(dim: usize, m: usize) -> Rational {
    let n = dim as i64;
    let m = m as i64;
    rat(n + 2 * m - 2, n + m - 2)
}

/// Harish-Chandra image predicted for the degree-`2k` theorem element.
pub fn theorem_target(cfg: &ActionConfig, projector: Projector, k: usize) -> MPoly {
    let shift = ShiftConfig::new(*cfg);
    let sign = if k.is_multiple_of(2) { int(1) } else { int(-1) };
    let scale = |p: MPoly, c: Rational| p.scale(&RatFunc::constant(c));
    match (cfg.family, projector) {
        (Family::Orthogonal, Projector::Sym) => scale(factorial_in_l(Kind::H, k, &shift), alpha(cfg.dim, 2 * k)),
        (Family::Orthogonal, Projector::Asym) | (Family::Symplectic, Projector::Sym) => {
            scale(factorial_in_l(Kind::E, k, &shift), sign)
        }
        (Family::Symplectic, Projector::Asym) => factorial_in_l(Kind::H, k, &shift),
    }
}

/// `prod_{i=0}^{len-1} (u - (m-1)/2 + r + i)`; the empty product is 1.
fn shifted_falling(m: usize, r: usize, len: usize) -> MPoly {
    let u = MPoly::var(Var::U);
    let base = int(r as i64) - rat(m as i64 - 1, 2);
    (0..len).fold(MPoly::one(), |acc, i| {
        &acc * &(&u + &MPoly::from_rational(base.clone() + int(i as i64)))
    })
}

/// Harish-Chandra image predicted for `D_m(u)` (symmetrizer) or `C_m(u)`
/// (anti-symmetrizer), expanded in `u` and `lambda`.
pub fn target_chi(cfg: &ActionConfig, projector: Projector, m: usize) -> MPoly {
    let shift = ShiftConfig::new(*cfg);
    let n = cfg.rank() as i64;
    let dim = cfg.dim as i64;
    let mut out = MPoly::zero();
    for r in 0..=m / 2 {
        let ri = r as i64;
        let mi = m as i64;
        let sign = if r % 2 == 0 { int(1) } else { int(-1) };
        let (coeff, kind) = match (cfg.family, projector) {
            (Family::Orthogonal, Projector::Sym) => (alpha(cfg.dim, m) * binomial(dim + mi - 2, mi - 2 * ri), Kind::H),
            (Family::Orthogonal, Projector::Asym) => (sign * binomial(dim - 2 * ri, mi - 2 * ri), Kind::E),
            (Family::Symplectic, Projector::Sym) => (sign * binomial(2 * n - 2 * ri + 1, mi - 2 * ri), Kind::E),
            (Family::Symplectic, Projector::Asym) => (binomial(2 * n + mi - 1, mi - 2 * ri), Kind::H),
        };
        if coeff.is_zero() {
            continue;
        }
        let term = &factorial_in_l(kind, r, &shift) * &shifted_falling(m, r, m - 2 * r);
        out = &out + &term.scale(&RatFunc::constant(coeff));
    }
    out
}

/// Scalar in `T_m(u + 1/2) - T_m(u - 1/2) = c * T_{m-1}(u)`.
pub fn recurrence_factor(cfg: &ActionConfig, projector: Projector, m: usize) -> Rational {
    let dim = cfg.dim as i64;
    let n = cfg.rank() as i64;
    let m = m as i64;
    match (cfg.family, projector) {
        (Family::Orthogonal, Projector::Sym) => rat((dim + m - 3) * (dim + 2 * m - 2), dim + 2 * m - 4),
        (Family::Orthogonal, Projector::Asym) => int(dim - m + 1),
        (Family::Symplectic, Projector::Sym) => int(2 * n - m + 2),
        (Family::Symplectic, Projector::Asym) => int(2 * n + m - 1),
    }
}

/// `f(u + c)` for a polynomial in `u`.
pub fn shift_u(f: &MPoly, c: &Rational) -> MPoly {
    f.substitute(Var::U, &(&MPoly::var(Var::U) + &MPoly::from_rational(c.clone())))
}

/// `f(-u)`.
pub fn negate_u(f: &MPoly) -> MPoly {
    f.substitute(Var::U, &-&MPoly::var(Var::U))
}

/// Rendering of a `lambda`-polynomial with `lambda_i` written as `x{i}`.
pub fn render_lambda(p: &MPoly) -> String {
    p.render_with(&|v| match v {
        Var::U => "u".into(),
        Var::Lambda(i) => format!("x{i}"),
    })
}

/// Re-express a polynomial in `lambda` in the shifted labels `l_i`, writing
/// `l_i` for `Lambda(i)` in the result.
pub fn to_shifted_labels(p: &MPoly, shift: &ShiftConfig) -> MPoly {
    let mut out = p.clone();
    for i in 1..=shift.n() {
        let back = &MPoly::var(Var::Lambda(i as u8)) - &MPoly::from_rational(shift.rho(i));
        out = out.substitute(Var::Lambda(i as u8), &back);
    }
    out
}

/// Value of `lambda` at the highest weight of the defining representation.
pub fn defining_weight(n: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    if n > 0 {
        v[0] = Rational::one();
    }
    v
}

/// Evaluate a polynomial in `lambda` (and possibly `u`) at a weight.
pub fn at_weight(p: &MPoly, weight: &[Rational]) -> MPoly {
    let mut g = p.clone();
    for (i, v) in weight.iter().enumerate() {
        g = g.eval_var(Var::Lambda(i as u8 + 1), v);
    }
    g
}

/// Table of `e_k`/`h_k` values at `a_lambda` for the CLI.
pub fn value_table(kind: Kind, k: usize, shift: &ShiftConfig, max_size: u32) -> BTreeMap<Partition, Rational> {
    partitions(shift.n(), max_size)
        .into_iter()
        .map(|lambda| {
            let v = evaluate_at_a_lambda(kind, k, &lambda, shift);
            (lambda, v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_seq(_: usize) -> Rational {
        Rational::zero()
    }

    #[test]
    fn e1_and_h1() {
        let shift = ShiftConfig::new(ActionConfig::symplectic(6));
        let a = |i: usize| shift.a(i);
        let z = z_vars(3);
        let mut expected = MPoly::zero();
        for i in 1..=3 {
            expected = &expected + &(&z[i - 1] - &MPoly::from_rational(shift.a(i)));
        }
        assert_eq!(factorial_e(1, &z, &a), expected);
        assert_eq!(factorial_h(1, &z, &a), expected);
    }

    #[test]
    fn e_beyond_rank_vanishes() {
        let z = z_vars(2);
        assert!(factorial_e(3, &z, &|i| int(i as i64)).is_zero());
    }

    #[test]
    fn h2_single_variable() {
        let z = z_vars(1);
        let a = |i: usize| int(10 * i as i64);
        let expected = &(&z[0] - &MPoly::from_rational(int(10))) * &(&z[0] - &MPoly::from_rational(int(20)));
        assert_eq!(factorial_h(2, &z, &a), expected);
    }

    #[test]
    fn classical_limit() {
        for n in 1..=3 {
            for k in 0..=4 {
                let z = z_vars(n);
                assert_eq!(factorial_e(k, &z, &zero_seq), classical_brute_force(Kind::E, k, n));
                assert_eq!(factorial_h(k, &z, &zero_seq), classical_brute_force(Kind::H, k, n));
            }
        }
    }

    #[test]
    fn a_lambda_examples() {
        let o5 = ShiftConfig::new(ActionConfig::orthogonal(5));
        assert_eq!(a_lambda(&[0, 0], &o5), vec![rat(9, 4), rat(1, 4)]);
        let sp4 = ShiftConfig::new(ActionConfig::symplectic(4));
        assert_eq!(a_lambda(&[1, 0], &sp4), vec![int(9), int(1)]);
    }

    #[test]
    fn vanishing_examples() {
        let sp4 = ShiftConfig::new(ActionConfig::symplectic(4));
        assert!(evaluate_at_a_lambda(Kind::E, 2, &[3, 0], &sp4).is_zero());
        assert!(evaluate_at_a_lambda(Kind::H, 2, &[1, 1], &sp4).is_zero());
        assert!(!evaluate_at_a_lambda(Kind::H, 1, &[1, 0], &sp4).is_zero());
        assert!(vanishing_check(Kind::E, 2, &sp4, 6).is_ok());
    }

    #[test]
    fn characterization_accepts_factorial_and_rejects_shifted() {
        let shift = ShiftConfig::new(ActionConfig::orthogonal(5));
        let a = |i: usize| shift.a(i);
        let z = z_vars(2);
        for k in 1..=3 {
            for kind in [Kind::E, Kind::H] {
                let f = factorial(kind, k, &z, &a);
                assert_eq!(characterize(&f, kind, k, &shift), Characterization::Determined);
                let g = &f + &MPoly::one();
                assert!(matches!(characterize(&g, kind, k, &shift), Characterization::NotVanishingAt(_)));
            }
        }
    }

    #[test]
    fn orthogonal_sym_m1() {
        let cfg = ActionConfig::orthogonal(5);
        assert_eq!(
            target_chi(&cfg, Projector::Sym, 1),
            MPoly::var(Var::U).scale(&RatFunc::constant(int(5)))
        );
    }

    #[test]
    fn corollary_at_half_matches_theorem() {
        for cfg in [ActionConfig::orthogonal(3), ActionConfig::orthogonal(4), ActionConfig::symplectic(4), ActionConfig::symplectic(6)] {
            for proj in [Projector::Sym, Projector::Asym] {
                for k in 1..=2 {
                    let t = target_chi(&cfg, proj, 2 * k);
                    let half = t.eval_var(Var::U, &rat(1, 2));
                    assert_eq!(half, theorem_target(&cfg, proj, k), "{cfg:?} {proj:?} k={k}");
                    assert_eq!(t.eval_var(Var::U, &rat(-1, 2)), half);
                }
            }
        }
    }

    #[test]
    fn target_recurrence_and_parity() {
        for cfg in [ActionConfig::orthogonal(3), ActionConfig::orthogonal(5), ActionConfig::symplectic(4)] {
            for proj in [Projector::Sym, Projector::Asym] {
                for m in 1..=4 {
                    let t = target_chi(&cfg, proj, m);
                    let prev = if m == 1 { MPoly::one() } else { target_chi(&cfg, proj, m - 1) };
                    let diff = &shift_u(&t, &rat(1, 2)) - &shift_u(&t, &rat(-1, 2));
                    let c = recurrence_factor(&cfg, proj, m);
                    assert_eq!(diff, prev.scale(&RatFunc::constant(c)), "{cfg:?} {proj:?} m={m}");
                    let sign = if m % 2 == 0 { int(1) } else { int(-1) };
                    assert_eq!(negate_u(&t), t.scale(&RatFunc::constant(sign)));
                }
            }
        }
    }

    #[test]
    fn o3_theorem_target() {
        let cfg = ActionConfig::orthogonal(3);
        let l1 = MPoly::var(Var::Lambda(1));
        let expected = (&l1.pow(2) + &l1).scale(&RatFunc::constant(rat(5, 3)));
        assert_eq!(theorem_target(&cfg, Projector::Sym, 1), expected);
        let shifted = to_shifted_labels(&expected, &ShiftConfig::new(cfg));
        assert_eq!(shifted.render(), "(5/3)*l1^2 - 5/12");
        assert_eq!(render_lambda(&expected), "(5/3)*x1^2 + (5/3)*x1");
    }
}
