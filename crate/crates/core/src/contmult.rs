//! The continuous multinomial coefficient and its identities, plus the
//! quadrature Fourier transforms that turn it into continuum propagator
//! profiles.
//!
//! Two independent routes compute the coefficient: the Smirnov-word series
//! (adjacency-avoiding word counts weighted by root factors) and a Taylor
//! table whose coefficients are filled by the alternating recurrence that
//! the Smirnov generating function satisfies. For two letters the explicit
//! Cano-Diaz series is a third route. The routes share no counting code and
//! are tested against each other.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact;
use crate::propagators::Amplitude;

/// Degree at which series evaluation gives up.
const DEGREE_CAP: u32 = 160;

/// Relative tolerance for successive quadrature refinements.
const QUAD_REL_TOL: f64 = 1e-6;

/// Hard ceiling on quadrature points.
const QUAD_MAX_POINTS: usize = 1 << 14;

// ---------------------------------------------------------------------------
// Smirnov word counts (route one).

/// Number of words over `nu.len()` letters with letter multiplicities `nu`
/// and no two equal adjacent letters. Dynamic programming over
/// (remaining counts, last letter).
pub fn smirnov_frequency_count(nu: &[u64]) -> BigUint {
    let mut memo = Memo::new();
    let counts: Vec<u64> = nu.iter().copied().filter(|&c| c > 0).collect();
    if counts.is_empty() {
        return BigUint::one();
    }
    let mut total = BigUint::zero();
    for i in 0..counts.len() {
        let mut rest = counts.clone();
        let own = rest.remove(i);
        total += ending_with(own, &mut rest, &mut memo);
    }
    total
}

type Memo = HashMap<(u64, Vec<u64>), BigUint>;

/// Words that end with a distinguished letter appearing `own` times, the
/// other letters appearing `rest` times (all entries positive).
#[allow(clippy::ptr_arg)] // the recursion grows and shrinks the vector
fn ending_with(own: u64, rest: &mut Vec<u64>, memo: &mut Memo) -> BigUint {
    if own == 0 {
        return BigUint::zero();
    }
    if rest.is_empty() {
        return if own == 1 { BigUint::one() } else { BigUint::zero() };
    }
    rest.sort_unstable();
    let key = (own, rest.clone());
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let mut total = BigUint::zero();
    for i in 0..rest.len() {
        if i > 0 && rest[i] == rest[i - 1] {
            continue; // identical letter counts contribute identically
        }
        let multiplicity = rest.iter().filter(|&&c| c == rest[i]).count() as u64;
        let mut next = rest.clone();
        let next_own = next.remove(i);
        if own > 1 {
            next.push(own - 1);
        }
        total += ending_with(next_own, &mut next, memo) * multiplicity;
    }
    memo.insert(key, total.clone());
    total
}

thread_local! {
    // f64 Smirnov counts shared across series evaluations; keyed by the
    // sorted frequency vector (the count is symmetric).
    static SMIRNOV_F64: RefCell<HashMap<(u32, Vec<u32>), f64>> = RefCell::new(HashMap::new());
}

thread_local! {
    static SMIRNOV_TOTAL_F64: RefCell<HashMap<Vec<u32>, f64>> = RefCell::new(HashMap::new());
}

fn smirnov_f64(nu: &[u32]) -> f64 {
    let mut counts: Vec<u32> = nu.iter().copied().filter(|&c| c > 0).collect();
    if counts.is_empty() {
        return 1.0;
    }
    counts.sort_unstable();
    if let Some(hit) = SMIRNOV_TOTAL_F64.with(|c| c.borrow().get(&counts).copied()) {
        return hit;
    }
    let mut total = 0.0;
    for i in 0..counts.len() {
        if i > 0 && counts[i] == counts[i - 1] {
            continue;
        }
        let multiplicity = counts.iter().filter(|&&c| c == counts[i]).count() as f64;
        let mut rest = counts.clone();
        let own = rest.remove(i);
        total += multiplicity * ending_with_f64(own, &mut rest);
    }
    SMIRNOV_TOTAL_F64.with(|c| c.borrow_mut().insert(counts, total));
    total
}

#[allow(clippy::ptr_arg)]
fn ending_with_f64(own: u32, rest: &mut Vec<u32>) -> f64 {
    if own == 0 {
        return 0.0;
    }
    if rest.is_empty() {
        return if own == 1 { 1.0 } else { 0.0 };
    }
    rest.sort_unstable();
    let key = (own, rest.clone());
    if let Some(hit) = SMIRNOV_F64.with(|c| c.borrow().get(&key).copied()) {
        return hit;
    }
    let mut total = 0.0;
    for i in 0..rest.len() {
        if i > 0 && rest[i] == rest[i - 1] {
            continue;
        }
        let multiplicity = rest.iter().filter(|&&c| c == rest[i]).count() as f64;
        let mut next = rest.clone();
        let next_own = next.remove(i);
        if own > 1 {
            next.push(own - 1);
        }
        total += ending_with_f64(next_own, &mut next) * multiplicity;
    }
    SMIRNOV_F64.with(|c| c.borrow_mut().insert(key, total));
    total
}

// ---------------------------------------------------------------------------
// The Smirnov series (route one evaluation).

fn factorial_f64(n: u32) -> f64 {
    debug_assert!(n <= 170);
    (1..=n as u64).map(|k| k as f64).product()
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n as u64).map(|k| (k as f64).ln()).sum()
}

thread_local! {
    // Smirnov counts per degree shell, flattened in composition-enumeration
    // order so the series loop reads them without hashing.
    static SHELL_TABLES: RefCell<ShellTables> = RefCell::new(HashMap::new());
}

type ShellTables = HashMap<(usize, u32), std::rc::Rc<Vec<f64>>>;

fn shell_counts(l: usize, degree: u32) -> std::rc::Rc<Vec<f64>> {
    if let Some(hit) = SHELL_TABLES.with(|c| c.borrow().get(&(l, degree)).cloned()) {
        return hit;
    }
    let mut counts = Vec::new();
    for_each_composition(degree, l, &mut |nu| counts.push(smirnov_f64(nu)));
    let rc = std::rc::Rc::new(counts);
    SHELL_TABLES.with(|c| c.borrow_mut().insert((l, degree), rc.clone()));
    rc
}

/// Number of compositions of `total` into `slots` parts, all `>= 1`.
fn composition_count(total: u32, slots: usize) -> usize {
    // C(total - 1, slots - 1), small enough to stay exact in f64 here.
    let mut acc = 1.0f64;
    for i in 0..(slots as u32 - 1) {
        acc = acc * (total - 1 - i) as f64 / (i + 1) as f64;
    }
    acc.round() as usize
}

/// Sum one degree shell: compositions are walked in the same order the
/// count table was built in, carrying the partial product of per-axis
/// factors `sqrt(v) x_k^v / v!` and its twin with an extra `1/v!`, which
/// bounds the word count via `f_nu <= degree! / prod nu_k!`. Subtrees whose
/// bound falls under `floor` are skipped wholesale; `bound_max[k]`
/// majorizes the bounding product over the remaining axes.
#[allow(clippy::too_many_arguments)]
fn shell_sum(
    tabs: &[Vec<f64>],
    bound_tabs: &[Vec<f64>],
    counts: &[f64],
    bound_dp: &[Vec<f64>],
    floor: f64,
    remaining: u32,
    axis: usize,
    partial: f64,
    bound_partial: f64,
    idx: &mut usize,
) -> f64 {
    let slots_left = tabs.len() - axis;
    if slots_left == 1 {
        let term = counts[*idx] * partial * tabs[axis][remaining as usize];
        *idx += 1;
        return term;
    }
    if bound_partial * bound_dp[axis][remaining as usize] <= floor {
        *idx += composition_count(remaining, slots_left);
        return 0.0;
    }
    let mut acc = 0.0;
    for v in 1..=(remaining - (slots_left as u32 - 1)) {
        acc += shell_sum(
            tabs,
            bound_tabs,
            counts,
            bound_dp,
            floor,
            remaining - v,
            axis + 1,
            partial * tabs[axis][v as usize],
            bound_partial * bound_tabs[axis][v as usize],
            idx,
        );
    }
    acc
}

/// Continuous multinomial of `args` via the Smirnov series
/// `sum_nu f_nu prod sqrt(nu_k) x_k^{nu_k} / nu_k!`, truncated once a full
/// degree shell falls below `tol` and the tail majorant confirms it.
///
/// Exactly zero whenever any argument is zero.
pub fn cont_multinomial(args: &[f64], tol: f64) -> Result<f64> {
    assert!(args.len() >= 2, "need at least two arguments");
    assert!(args.iter().all(|&x| x >= 0.0), "arguments must be nonnegative");
    assert!(tol > 0.0, "tolerance must be positive");
    if args.contains(&0.0) {
        return Ok(0.0);
    }
    let l = args.len();
    // Sorting makes the value exactly permutation invariant.
    let mut xs = args.to_vec();
    xs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let total: f64 = xs.iter().sum();

    // Per-axis factor tables tabs[k][v] = sqrt(v) x_k^v / v! and the
    // bounding twin with one more 1/v!, grown shell by shell.
    let mut tabs: Vec<Vec<f64>> = vec![vec![0.0]; l];
    let mut bound_tabs: Vec<Vec<f64>> = vec![vec![0.0]; l];
    let grow = |tabs: &mut Vec<Vec<f64>>, bound_tabs: &mut Vec<Vec<f64>>, v: u32| {
        for k in 0..l {
            let base = (v as f64).sqrt() * xs[k].powi(v as i32) / factorial_f64(v);
            tabs[k].push(base);
            bound_tabs[k].push(base / factorial_f64(v));
        }
    };
    let mut acc: f64 = 0.0;
    let mut quiet_shells = 0;
    let mut degree = l as u32;
    for v in 1..degree {
        grow(&mut tabs, &mut bound_tabs, v);
    }
    while degree <= DEGREE_CAP {
        grow(&mut tabs, &mut bound_tabs, degree);
        // bound_dp[k][r]: max over compositions of r into axes k.. of the
        // bounding product; lets whole subtrees (and whole shells) prune.
        let d = degree as usize;
        let mut bound_dp: Vec<Vec<f64>> = vec![vec![0.0; d + 1]; l];
        for r in 1..=d {
            bound_dp[l - 1][r] = bound_tabs[l - 1][r];
        }
        for k in (0..l - 1).rev() {
            for r in 1..=d {
                let mut best = 0.0f64;
                for v in 1..r {
                    best = best.max(bound_tabs[k][v] * bound_dp[k + 1][r - v]);
                }
                bound_dp[k][r] = best;
            }
        }
        // Skipped subtrees are bounded via f_nu <= degree! / prod nu_k!.
        let floor = 1e-6 * tol * acc.abs().max(1.0) / ln_factorial(degree).exp();
        let shell = if bound_dp[0][d] <= floor {
            0.0 // the whole shell is below the floor; skip building it
        } else {
            let counts = shell_counts(l, degree);
            let mut idx = 0;
            let shell = shell_sum(
                &tabs,
                &bound_tabs,
                &counts,
                &bound_dp,
                floor,
                degree,
                0,
                1.0,
                1.0,
                &mut idx,
            );
            debug_assert_eq!(idx, counts.len());
            shell
        };
        acc += shell;
        let scale = acc.abs().max(1.0);
        let majorant = tail_majorant(l, total, degree + 1);
        if shell.abs() <= tol * scale && majorant <= tol * scale {
            quiet_shells += 1;
            if quiet_shells >= 2 {
                return Ok(acc);
            }
        } else {
            quiet_shells = 0;
        }
        degree += 1;
    }
    Err(Error::Truncation {
        achieved: tail_majorant(l, total, DEGREE_CAP),
        requested: tol,
    })
}

/// Upper bound on everything at degree `d` and beyond:
/// `f_nu <= l^d`, `prod sqrt(nu) <= d^{l/2}`, and the multinomial theorem
/// collapses the composition sum to `S^d / d!`.
fn tail_majorant(l: usize, total: f64, d: u32) -> f64 {
    let ln_shell = |deg: u32| -> f64 {
        let deg_f = deg as f64;
        deg_f * (l as f64).ln() + deg_f * total.ln() + 0.5 * (l as f64) * deg_f.ln()
            - (1..=deg as u64).map(|k| (k as f64).ln()).sum::<f64>()
    };
    let head = ln_shell(d).exp();
    // Shells shrink at least geometrically once d dominates; double covers it.
    if (l as f64) * total / (d as f64) < 0.5 {
        2.0 * head
    } else {
        // Not yet in the decaying regime: report something large.
        f64::INFINITY.min(head * (d as f64))
    }
}

/// Visit every composition of `degree` into `l` parts, all `>= 1`.
fn for_each_composition(degree: u32, l: usize, f: &mut impl FnMut(&[u32])) {
    fn rec(remaining: u32, slot: usize, nu: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        let slots_left = nu.capacity() - slot;
        if slots_left == 1 {
            nu.push(remaining);
            f(nu);
            nu.pop();
            return;
        }
        for v in 1..=(remaining - (slots_left as u32 - 1)) {
            nu.push(v);
            rec(remaining - v, slot + 1, nu, f);
            nu.pop();
        }
    }
    if degree < l as u32 {
        return;
    }
    let mut nu = Vec::with_capacity(l);
    rec(degree, 0, &mut nu, f);
}

// ---------------------------------------------------------------------------
// The Cano-Diaz binomial (route three, two letters).

/// Continuous binomial with top `x` and lower argument `s` via the explicit
/// series, truncated once the running term drops below `1e-12`.
pub fn cont_binomial(x: f64, s: f64) -> f64 {
    assert!((0.0..=x).contains(&s), "need 0 <= s <= x");
    let a = s;
    let b = x - s;
    let mut acc = 0.0;
    let mut quiet = 0;
    for n in 0..DEGREE_CAP {
        let nf = n as f64;
        let root = (nf * (nf + 1.0)).sqrt();
        let denom = factorial_f64(n) * factorial_f64(n + 1);
        let term = (root * a.powi(n as i32 + 1) * b.powi(n as i32)
            + root * a.powi(n as i32) * b.powi(n as i32 + 1)
            + (2.0 * nf + 2.0) * nf * a.powi(n as i32) * b.powi(n as i32))
            / denom;
        acc += term;
        if term.abs() < 1e-12 * acc.abs().max(1.0) {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Taylor table (route two).

/// Taylor coefficients of the root-free Smirnov generating function,
/// indexed by sorted multi-indices. The weighted evaluation multiplies each
/// coefficient by `prod sqrt(i_k)`, which kills every index with a zero.
#[derive(Debug, Clone)]
pub struct TaylorTable {
    pub l: usize,
    pub max_degree: u32,
    coeffs: HashMap<Vec<u32>, f64>,
}

/// Fill the table by the alternating recurrence
/// `f_nu = sum_k sum_{j>=1} (-1)^{j-1} f_{nu - j e_k}` with `f_0 = 1`,
/// which is the coefficient identity of `F = 1 + F sum_k x_k/(1+x_k)`.
/// Exact big-integer arithmetic throughout; division by the factorials
/// happens only on the way out.
pub fn taylor_table(l: usize, max_degree: u32) -> Result<TaylorTable> {
    assert!(l >= 3, "the recurrence is for three or more letters");
    if max_degree > DEGREE_CAP {
        return Err(Error::Truncation {
            achieved: max_degree as f64,
            requested: DEGREE_CAP as f64,
        });
    }
    let mut exact_coeffs: HashMap<Vec<u32>, BigInt> = HashMap::new();
    exact_coeffs.insert(vec![0; l], BigInt::one());
    // Degree-ascending fill over sorted (descending) index vectors.
    let mut frontier: Vec<Vec<u32>> = vec![vec![0; l]];
    for _degree in 1..=max_degree {
        let mut next_frontier: Vec<Vec<u32>> = Vec::new();
        let mut seen: HashMap<Vec<u32>, ()> = HashMap::new();
        for base in &frontier {
            for k in 0..l {
                let mut nu = base.clone();
                nu[k] += 1;
                nu.sort_unstable_by(|a, b| b.cmp(a));
                if seen.insert(nu.clone(), ()).is_none() {
                    next_frontier.push(nu);
                }
            }
        }
        for nu in &next_frontier {
            let mut value = BigInt::zero();
            for k in 0..l {
                if nu[k] == 0 {
                    continue;
                }
                let mut sign = BigInt::one();
                let mut lower = nu.clone();
                for _j in 1..=nu[k] {
                    lower[k] -= 1;
                    let mut key = lower.clone();
                    key.sort_unstable_by(|a, b| b.cmp(a));
                    if let Some(f) = exact_coeffs.get(&key) {
                        value += &sign * f;
                    }
                    sign = -sign;
                }
            }
            debug_assert!(!value.is_negative(), "Smirnov counts are nonnegative");
            exact_coeffs.insert(nu.clone(), value);
        }
        frontier = next_frontier;
    }
    let coeffs = exact_coeffs
        .into_iter()
        .map(|(nu, f)| {
            let denom: f64 = nu.iter().map(|&n| factorial_f64(n)).product();
            (nu, f.to_f64().unwrap_or(f64::INFINITY) / denom)
        })
        .collect();
    Ok(TaylorTable {
        l,
        max_degree,
        coeffs,
    })
}

impl TaylorTable {
    /// Coefficient at a multi-index (order irrelevant by symmetry).
    pub fn coeff(&self, index: &[u32]) -> Option<f64> {
        let mut key = index.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        self.coeffs.get(&key).copied()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Vec<u32>, &f64)> {
        self.coeffs.iter()
    }

    /// Weighted evaluation `sum (prod sqrt(i_k)) a_i prod x^{i_k}` over the
    /// interior indices of the table.
    pub fn eval_weighted(&self, args: &[f64]) -> f64 {
        assert_eq!(args.len(), self.l);
        let mut xs = args.to_vec();
        xs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut acc = 0.0;
        for degree in self.l as u32..=self.max_degree {
            for_each_composition(degree, self.l, &mut |nu| {
                let mut key = nu.to_vec();
                key.sort_unstable_by(|a, b| b.cmp(a));
                if let Some(a) = self.coeffs.get(&key) {
                    let mut term = *a;
                    for (k, &n) in nu.iter().enumerate() {
                        term *= (n as f64).sqrt() * xs[k].powi(n as i32);
                    }
                    acc += term;
                }
            });
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Gaussian asymptotic.

/// Large-argument approximations of the multinomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAsymptotic {
    /// `l^{S + l/2} / sqrt(2 pi S)^{l-1} * exp(-(l/2S) sum (x_i - S/l)^2)`.
    pub value: f64,
    /// Entropy form `exp(-sum x_i ln(x_i / S))`.
    pub entropy_form: f64,
}

pub fn gaussian_asymptotic(args: &[f64]) -> GaussianAsymptotic {
    assert!(args.iter().all(|&x| x > 0.0), "arguments must be positive");
    let l = args.len() as f64;
    let s: f64 = args.iter().sum();
    let spread: f64 = args.iter().map(|&x| (x - s / l) * (x - s / l)).sum();
    let value = l.powf(s + l / 2.0) / (2.0 * std::f64::consts::PI * s).sqrt().powf(l - 1.0)
        * (-(l / (2.0 * s)) * spread).exp();
    let entropy_form = (-args.iter().map(|&x| x * (x / s).ln()).sum::<f64>()).exp();
    GaussianAsymptotic {
        value,
        entropy_form,
    }
}

// ---------------------------------------------------------------------------
// Discrete-to-continuous comparison.

/// Decompose the discrete multinomial by maximal runs and weight each run
/// word by the Euclidean volume of its length polytope and the continuum
/// operator factor: `sum_r f_r prod [sqrt(r_k) C(nu_k - 1, r_k - 1)] m^{-|r|}`.
/// The run-count binomials are exact; the scaling happens in log space.
fn run_weighted_sum(nu: &[u64], scale_m: u64) -> f64 {
    let l = nu.len();
    let ln_m = (scale_m as f64).ln();
    let ln_l = (l as f64).ln();
    // Per-axis table g_k[r-1] = ln [sqrt(r) C(nu_k - 1, r - 1)] - r ln m,
    // truncated once the axis (allowing f_r <= l^{|r|}) falls 80 nats under
    // its own peak.
    let mut tables: Vec<Vec<f64>> = Vec::with_capacity(l);
    for &n in nu {
        debug_assert!(n >= 1);
        let mut row = Vec::new();
        let mut c = BigUint::one();
        let mut best = f64::MIN;
        let mut r = 1u64;
        loop {
            let g = exact::ln(&c) + 0.5 * (r as f64).ln() - r as f64 * ln_m;
            let allowance = g + r as f64 * ln_l;
            best = best.max(allowance);
            row.push(g);
            if r >= n || (row.len() >= 4 && allowance < best - 80.0) {
                break;
            }
            c = c * (n - r) / r;
            r += 1;
        }
        tables.push(row);
    }
    let dims: Vec<usize> = tables.iter().map(|t| t.len()).collect();
    let mut r = vec![1usize; l];
    let mut total = 0.0;
    loop {
        let ln_c: f64 = (0..l).map(|k| tables[k][r[k] - 1]).sum();
        let rv: Vec<u32> = r.iter().map(|&v| v as u32).collect();
        let f = smirnov_f64(&rv);
        if f > 0.0 {
            total += (ln_c + f.ln()).exp();
        }
        let mut k = 0;
        loop {
            if k == l {
                return total;
            }
            r[k] += 1;
            if r[k] <= dims[k] {
                break;
            }
            r[k] = 1;
            k += 1;
        }
    }
}

/// Deviation between the discrete multinomial ratio at scale `m` (run-count
/// decomposition with the continuum operator weights, centered denominator)
/// and the corresponding ratio of continuous multinomials.
pub fn disc_to_cont_check(args: &[f64], scale_m: u64) -> Result<f64> {
    assert!(args.len() >= 2 && scale_m >= 1);
    let l = args.len();
    let nu: Vec<u64> = args.iter().map(|&x| (x * scale_m as f64).round() as u64).collect();
    let total: u64 = nu.iter().sum();
    // Centered denominator: distribute the remainder deterministically.
    let base = total / l as u64;
    let rem = (total % l as u64) as usize;
    let centered: Vec<u64> = (0..l).map(|k| base + if k < rem { 1 } else { 0 }).collect();

    let lhs = run_weighted_sum(&nu, scale_m) / run_weighted_sum(&centered, scale_m);

    let s: f64 = args.iter().sum();
    let rhs_num = cont_multinomial(args, 1e-10)?;
    let rhs_den = cont_multinomial(&vec![s / l as f64; l], 1e-10)?;
    Ok((lhs - rhs_num / rhs_den).abs())
}

// ---------------------------------------------------------------------------
// Quadrature.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub points: usize,
}

/// Composite Simpson over `n` panels (n even).
fn simpson(f: &impl Fn(f64) -> Complex64, a: f64, b: f64, n: usize) -> Complex64 {
    debug_assert!(n.is_multiple_of(2) && n >= 2);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Double the panel count until two successive composite-Simpson values
/// agree to `QUAD_REL_TOL`, starting from `start_points` panels.
pub fn refine_simpson(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    start_points: usize,
) -> Result<QuadratureResult> {
    if b <= a {
        return Ok(QuadratureResult {
            value: Complex64::zero(),
            points: 0,
        });
    }
    let mut n = start_points.max(64);
    let mut prev = simpson(&f, a, b, n);
    loop {
        if !prev.norm().is_finite() {
            return Err(Error::QuadratureDiverged {
                last_delta: f64::INFINITY,
            });
        }
        n *= 2;
        let next = simpson(&f, a, b, n);
        let delta = (next - prev).norm();
        if delta <= QUAD_REL_TOL * next.norm().max(1e-300) {
            return Ok(QuadratureResult {
                value: next,
                points: n,
            });
        }
        if n >= QUAD_MAX_POINTS || !delta.is_finite() {
            return Err(Error::QuadratureDiverged { last_delta: delta });
        }
        prev = next;
    }
}

// ---------------------------------------------------------------------------
// Continuum propagator profiles.

/// The trinomial integrand of the d=1 continuum profile at time `t`,
/// position `x`, integration variable `i`.
pub fn k1_cont_integrand(t: f64, x: f64, i: f64) -> f64 {
    let args = [(i - x.abs()) / 2.0, (i + x.abs()) / 2.0, t - i];
    if args.iter().any(|&a| a <= 0.0) {
        return 0.0;
    }
    cont_multinomial(&args, 1e-10).unwrap_or(0.0)
}

/// Quadrature Fourier transform of the continuum trinomial against
/// `e^{imI}` for each grid position, normalized by the zero-mode integral
/// at `x = 0`.
pub fn k1_cont_profile(
    t: f64,
    xs: &[f64],
    mass: f64,
    quad_points: usize,
) -> Result<Vec<Amplitude>> {
    assert!(t > 0.0);
    let quad_points = quad_points.max(64);
    let norm = refine_simpson(
        |i| Complex64::new(k1_cont_integrand(t, 0.0, i), 0.0),
        0.0,
        t,
        quad_points,
    )?
    .value
    .re;
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        if x.abs() >= t {
            out.push(Complex64::zero());
            continue;
        }
        let transform = refine_simpson(
            |i| {
                let phase = mass * i;
                k1_cont_integrand(t, x, i) * Complex64::new(phase.cos(), phase.sin())
            },
            x.abs(),
            t,
            quad_points,
        )?;
        out.push(transform.value / norm);
    }
    Ok(out)
}

/// Integration bounds of the higher-dimensional profile: `B_i = |x_i|` and
/// `T_i = (I + |x|_l1)/2 - sum_{j<i} |x_j|`.
pub fn highd_bounds(x: &[f64], i_total: f64, axis: usize) -> (f64, f64) {
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    let prior: f64 = x[..axis].iter().map(|v| v.abs()).sum();
    (x[axis].abs(), (i_total + l1) / 2.0 - prior)
}

fn highd_integrand(t: f64, x: &[f64], i_total: f64, inner: &[f64]) -> f64 {
    let d = x.len();
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    let mut u = inner.to_vec();
    let pinned = (i_total + l1) / 2.0 - inner.iter().sum::<f64>();
    u.push(pinned);
    let mut args = Vec::with_capacity(2 * d + 1);
    args.extend_from_slice(&u);
    for k in 0..d {
        args.push(u[k] - x[k].abs());
    }
    args.push(t - i_total);
    if args.iter().any(|&a| a <= 0.0) {
        return 0.0;
    }
    cont_multinomial(&args, 1e-8).unwrap_or(0.0)
}

fn nested_inner(t: f64, x: &[f64], i_total: f64, axis: usize, fixed: &mut Vec<f64>, panels: usize) -> f64 {
    if axis == x.len() - 1 {
        return highd_integrand(t, x, i_total, fixed);
    }
    let (lo, hi) = highd_bounds(x, i_total, axis);
    if hi <= lo {
        return 0.0;
    }
    let h = (hi - lo) / panels as f64;
    let mut acc = 0.0;
    for i in 0..=panels {
        let w = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        fixed.push(lo + i as f64 * h);
        acc += w * nested_inner(t, x, i_total, axis + 1, fixed, panels);
        fixed.pop();
    }
    acc * h / 3.0
}

/// Continuum profile value in d = 2 or 3: nested quadrature over the inner
/// variables, then a Fourier refinement over the total interval variable.
pub fn k1_cont_highd(t: f64, x: &[f64], mass: f64, quad_points: usize) -> Result<Amplitude> {
    let d = x.len();
    assert!((2..=3).contains(&d), "supported for d = 2 or 3");
    let inner_panels = 32;
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    if l1 >= t {
        return Ok(Complex64::zero());
    }
    let transform = refine_simpson(
        |i_total| {
            let mut fixed = Vec::with_capacity(d);
            let inner = nested_inner(t, x, i_total, 0, &mut fixed, inner_panels);
            let phase = mass * i_total;
            inner * Complex64::new(phase.cos(), phase.sin())
        },
        l1,
        t,
        quad_points.max(64),
    )?;
    Ok(transform.value)
}

/// Continuum de-Sitter profile: the multinomial of the displacement over
/// the equal-argument maximum.
pub fn desitter_cont(dx: &[f64], dt: f64) -> Result<f64> {
    assert!(dx.len() >= 2, "defined for d >= 2");
    assert!(dt > 0.0);
    let abs: Vec<f64> = dx.iter().map(|v| v.abs()).collect();
    if abs.contains(&0.0) {
        return Ok(0.0);
    }
    let num = cont_multinomial(&abs, 1e-10)?;
    let den = cont_multinomial(&vec![dt / dx.len() as f64; dx.len()], 1e-10)?;
    Ok(num / den)
}

/// Residual of the printed splitting identity: the multinomial against the
/// quadrature of `M(x_1..x_{l-2}, I) * M(x_{l-1}, x_l, I - x_{l-1} - x_l)`
/// over the support `I >= x_{l-1} + x_l`.
///
/// The support is unbounded and both factors are entire functions of order
/// one half, so the window is expanded until the integral either stabilizes
/// or is detected as divergent and reported as a quadrature failure.
pub fn splitting_check(args: &[f64], quad_points: usize) -> Result<f64> {
    assert!(args.len() >= 3, "splitting needs at least three letters");
    let l = args.len();
    let lhs = cont_multinomial(args, 1e-10)?;
    let head = &args[..l - 2];
    let (a, b) = (args[l - 2], args[l - 1]);
    if a == 0.0 || b == 0.0 {
        // Both sides vanish by the zero law.
        return Ok(lhs.abs());
    }
    let integrand = |i: f64| {
        let mut left = head.to_vec();
        left.push(i);
        let lfac = cont_multinomial(&left, 1e-9).unwrap_or(f64::NAN);
        let rfac = if i - a - b <= 0.0 {
            0.0
        } else {
            cont_multinomial(&[a, b, i - a - b], 1e-9).unwrap_or(f64::NAN)
        };
        Complex64::new(lfac * rfac, 0.0)
    };
    let lo = a + b;
    let s: f64 = args.iter().sum();
    let mut window = 2.0 * s + 4.0;
    let mut prev: Option<f64> = None;
    for _ in 0..3 {
        let rhs = refine_simpson(integrand, lo, lo + window, quad_points.max(64))?
            .value
            .re;
        if !rhs.is_finite() {
            return Err(Error::QuadratureDiverged {
                last_delta: f64::INFINITY,
            });
        }
        if let Some(p) = prev {
            let delta = (rhs - p).abs();
            if delta <= QUAD_REL_TOL * rhs.abs().max(1e-300) {
                return Ok((lhs - rhs).abs());
            }
        }
        prev = Some(rhs);
        window *= 2.0;
    }
    Err(Error::QuadratureDiverged {
        last_delta: prev.unwrap_or(f64::INFINITY),
    })
}
