//! Discrete propagators: the taxicab propagator `K_1` in any dimension, the
//! polygonal propagators `K_n` and their Feynman variants in one spatial
//! dimension, quotient-space and tropical de-Sitter propagators, the
//! brute-force oracle, the normalization `G_p`, and the Cauchy convergence
//! diagnostic.
//!
//! Everything is assembled as an exact phase histogram first. The histogram
//! maps a path's proper time to the number of paths carrying it, so one
//! histogram serves every mass value, the mass-spectrum scan, and the exact
//! oracle-equality tests.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact;
use crate::lattice::{LatticePoint, SpaceSpec};
use crate::metrics::{rational_to_f64, AxesOfSymmetry};
use crate::paths;

/// Complex value of a propagator at a fixed mass.
pub type Amplitude = Complex64;

/// Which phase rule a propagator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Each path contributes `e^{i m rho}` with `rho` its proper time.
    Standard,
    /// Every non-null step independently carries `+-` its length.
    Feynman,
}

/// Exact map from proper-time values to path counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhaseHistogram {
    bins: BTreeMap<Rational64, BigUint>,
}

impl PhaseHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Zero-phase histogram holding `count` paths.
    pub fn from_count(count: BigUint) -> Self {
        let mut h = PhaseHistogram::new();
        h.add(Rational64::zero(), count);
        h
    }

    pub fn add(&mut self, rho: Rational64, count: BigUint) {
        if count.is_zero() {
            return;
        }
        *self.bins.entry(rho).or_insert_with(BigUint::zero) += count;
    }

    pub fn merge(&mut self, other: &PhaseHistogram) {
        for (rho, count) in &other.bins {
            self.add(*rho, count.clone());
        }
    }

    pub fn bins(&self) -> impl Iterator<Item = (&Rational64, &BigUint)> {
        self.bins.iter()
    }

    pub fn bin(&self, rho: Rational64) -> BigUint {
        self.bins.get(&rho).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Total number of paths (or signed-path assignments) tallied.
    pub fn total(&self) -> BigUint {
        self.bins.values().sum()
    }

    /// Collapse to a complex amplitude at mass `m`: `sum count * e^{i m rho}`.
    pub fn amplitude(&self, mass: f64) -> Amplitude {
        let mut acc = Complex64::zero();
        for (rho, count) in &self.bins {
            let phase = mass * rational_to_f64(*rho);
            acc += exact::to_f64(count) * Complex64::new(phase.cos(), phase.sin());
        }
        acc
    }

    /// Rescale every proper-time key by `1/denom` (refinement to physical units).
    pub fn scale_keys(&self, denom: i64) -> PhaseHistogram {
        let mut out = PhaseHistogram::new();
        for (rho, count) in &self.bins {
            out.add(rho / Rational64::from_integer(denom), count.clone());
        }
        out
    }
}

impl FromIterator<(Rational64, BigUint)> for PhaseHistogram {
    fn from_iter<T: IntoIterator<Item = (Rational64, BigUint)>>(iter: T) -> Self {
        let mut h = PhaseHistogram::new();
        for (rho, count) in iter {
            h.add(rho, count);
        }
        h
    }
}

fn rho_int(v: i64) -> Rational64 {
    Rational64::from_integer(v)
}

/// Exact histogram of the free taxicab propagator `K_1` in any dimension.
///
/// Groups paths by the number `I` of null steps: with `u_i` steps along
/// `+e_i` and `u_i - |dx_i|` along `-e_i`, the bin at `rho = dt - I` holds
/// `sum_u dt! / (prod u_i! (u_i - |dx_i|)! (dt - I)!)`. Empty outside the
/// light cone; the zero displacement contributes the single empty path.
pub fn k1_free_histogram(dx: &[i64], dt: i64) -> PhaseHistogram {
    let mut hist = PhaseHistogram::new();
    if dt < 0 {
        return hist;
    }
    let abs: Vec<i64> = dx.iter().map(|x| x.abs()).collect();
    let l1: i64 = abs.iter().sum();
    if l1 > dt {
        return hist;
    }
    let mut i = l1;
    while i <= dt {
        // u-vectors with u_k >= |dx_k| and sum u_k = (i + l1) / 2.
        let budget = (i + l1) / 2;
        let mut parts: Vec<u64> = Vec::with_capacity(2 * abs.len() + 1);
        parts.push((dt - i) as u64);
        let mut total = BigUint::zero();
        sum_over_u(&abs, 0, budget, &mut parts, dt as u64, &mut total);
        hist.add(rho_int(dt - i), total);
        i += 2;
    }
    hist
}

fn sum_over_u(abs: &[i64], axis: usize, budget: i64, parts: &mut Vec<u64>, dt: u64, total: &mut BigUint) {
    if axis == abs.len() {
        if budget == 0 {
            debug_assert_eq!(
                parts.iter().sum::<u64>(),
                dt,
                "tally must account for every time step"
            );
            *total += exact::multinomial(parts);
        }
        return;
    }
    if axis == abs.len() - 1 {
        // Last u is pinned by the budget.
        let u = budget;
        if u >= abs[axis] {
            parts.push(u as u64);
            parts.push((u - abs[axis]) as u64);
            sum_over_u(abs, axis + 1, 0, parts, dt, total);
            parts.pop();
            parts.pop();
        }
        return;
    }
    let tail_min: i64 = abs[axis + 1..].iter().sum();
    let mut u = abs[axis];
    while budget - u >= tail_min {
        parts.push(u as u64);
        parts.push((u - abs[axis]) as u64);
        sum_over_u(abs, axis + 1, budget - u, parts, dt, total);
        parts.pop();
        parts.pop();
        u += 1;
    }
}

/// Free taxicab propagator amplitude at mass `m`.
pub fn k1_free(dx: &[i64], dt: i64, mass: f64) -> Amplitude {
    k1_free_histogram(dx, dt).amplitude(mass)
}

/// Tally enumeration shared by `K_n` and its Feynman variant: every count
/// vector over the triple-derived steps, with the null and center counts
/// solved from the displacement, weighted by the exact multinomial.
fn kn_tallies(
    axes: &AxesOfSymmetry,
    dx: i64,
    dt: i64,
    mut visit: impl FnMut(&[(usize, u64)], u64, u64, u64, Rational64, BigUint),
) {
    // Steps other than (+-1, 1) and (0, 1).
    let triple_steps: Vec<usize> = (0..axes.len())
        .filter(|&i| {
            let s = axes.step(i);
            !(s.dt == 1 && s.dx1().abs() <= 1)
        })
        .collect();
    let mut tally: Vec<(usize, u64)> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        axes: &AxesOfSymmetry,
        triple_steps: &[usize],
        k: usize,
        dx_rem: i64,
        dt_rem: i64,
        rho_triples: Rational64,
        tally: &mut Vec<(usize, u64)>,
        visit: &mut impl FnMut(&[(usize, u64)], u64, u64, u64, Rational64, BigUint),
    ) {
        if k == triple_steps.len() {
            // Solve for the center and null counts.
            for center in 0..=dt_rem {
                let t_null = dt_rem - center;
                if (t_null - dx_rem.abs()) % 2 != 0 || t_null < dx_rem.abs() {
                    continue;
                }
                let plus = (t_null + dx_rem) / 2;
                let minus = (t_null - dx_rem) / 2;
                let mut parts: Vec<u64> = tally.iter().map(|(_, n)| *n).collect();
                parts.extend([center as u64, plus as u64, minus as u64]);
                let weight = exact::multinomial(&parts);
                let rho = rho_triples + Rational64::from_integer(center);
                visit(tally, center as u64, plus as u64, minus as u64, rho, weight);
            }
            return;
        }
        let step = axes.step(triple_steps[k]);
        let mut n = 0i64;
        loop {
            let t_used = n * step.dt;
            if t_used > dt_rem {
                break;
            }
            if n > 0 {
                tally.push((triple_steps[k], n as u64));
            }
            recurse(
                axes,
                triple_steps,
                k + 1,
                dx_rem - n * step.dx1(),
                dt_rem - t_used,
                rho_triples + step.length * Rational64::from_integer(n),
                tally,
                visit,
            );
            if n > 0 {
                tally.pop();
            }
            n += 1;
        }
    }

    recurse(
        axes,
        &triple_steps,
        0,
        dx,
        dt,
        Rational64::zero(),
        &mut tally,
        &mut visit,
    );
}

/// Exact histogram of the polygonal propagator `K_n` in one spatial
/// dimension. Tallies with negative or non-integer solved counts contribute
/// nothing.
pub fn kn_free_histogram(n: u32, dx: i64, dt: i64) -> Result<PhaseHistogram> {
    let axes = crate::metrics::axes_of_symmetry(n, 1)?;
    let mut hist = PhaseHistogram::new();
    if dt < 0 {
        return Ok(hist);
    }
    kn_tallies(&axes, dx, dt, |_, _, _, _, rho, weight| {
        hist.add(rho, weight);
    });
    Ok(hist)
}

pub fn kn_free(n: u32, dx: i64, dt: i64, mass: f64) -> Result<Amplitude> {
    Ok(kn_free_histogram(n, dx, dt)?.amplitude(mass))
}

/// Histogram of the Feynman variant: every non-null step independently
/// carries a sign on its length, expanded by binomial splitting per
/// direction within each tally.
pub fn kn_feynman_histogram(n: u32, dx: i64, dt: i64) -> Result<PhaseHistogram> {
    let axes = crate::metrics::axes_of_symmetry(n, 1)?;
    let mut hist = PhaseHistogram::new();
    if dt < 0 {
        return Ok(hist);
    }
    kn_tallies(&axes, dx, dt, |tally, center, _, _, _, weight| {
        // Sign-expand each non-null direction: the triple steps plus (0,1).
        let mut expansion: BTreeMap<Rational64, BigUint> = BTreeMap::new();
        expansion.insert(Rational64::zero(), BigUint::one());
        let mut lengths: Vec<(Rational64, u64)> = tally
            .iter()
            .map(|&(idx, count)| (axes.step(idx).length, count))
            .collect();
        lengths.push((Rational64::from_integer(1), center));
        for (len, count) in lengths {
            if count == 0 || len.is_zero() {
                continue;
            }
            let mut next: BTreeMap<Rational64, BigUint> = BTreeMap::new();
            for (rho, mult) in &expansion {
                for j in 0..=count {
                    let signed = Rational64::from_integer(count as i64 - 2 * j as i64) * len;
                    let ways = exact::binomial(count, j);
                    *next.entry(rho + signed).or_insert_with(BigUint::zero) += mult * ways;
                }
            }
            expansion = next;
        }
        for (rho, mult) in expansion {
            hist.add(rho, &weight * mult);
        }
    });
    Ok(hist)
}

pub fn kn_feynman(n: u32, dx: i64, dt: i64, mass: f64) -> Result<Amplitude> {
    Ok(kn_feynman_histogram(n, dx, dt)?.amplitude(mass))
}

/// Ground-truth oracle: the literal phase sum over enumerated paths, with
/// sign expansion per path for the Feynman variant.
pub fn k_oracle_histogram(
    space: &SpaceSpec,
    x: &LatticePoint,
    y: &LatticePoint,
    axes: &AxesOfSymmetry,
    variant: Variant,
) -> Result<PhaseHistogram> {
    let mut hist = PhaseHistogram::new();
    for path in paths::enumerate_paths(space, x, y, axes)? {
        match variant {
            Variant::Standard => {
                hist.add(paths::proper_time(&path, axes), BigUint::one());
            }
            Variant::Feynman => {
                let lengths: Vec<Rational64> = path
                    .steps
                    .iter()
                    .map(|&i| axes.step(i).length)
                    .filter(|l| !l.is_zero())
                    .collect();
                expand_signs(&lengths, 0, Rational64::zero(), &mut hist);
            }
        }
    }
    Ok(hist)
}

fn expand_signs(lengths: &[Rational64], k: usize, acc: Rational64, hist: &mut PhaseHistogram) {
    if k == lengths.len() {
        hist.add(acc, BigUint::one());
        return;
    }
    expand_signs(lengths, k + 1, acc + lengths[k], hist);
    expand_signs(lengths, k + 1, acc - lengths[k], hist);
}

pub fn k_oracle(
    space: &SpaceSpec,
    x: &LatticePoint,
    y: &LatticePoint,
    axes: &AxesOfSymmetry,
    mass: f64,
    variant: Variant,
) -> Result<Amplitude> {
    Ok(k_oracle_histogram(space, x, y, axes, variant)?.amplitude(mass))
}

/// Torus propagator: the free histogram summed over causal images of the
/// endpoint.
pub fn k1_torus_histogram(
    space: &SpaceSpec,
    x: &LatticePoint,
    y: &LatticePoint,
) -> Result<PhaseHistogram> {
    match space {
        SpaceSpec::Torus { .. } => quotient_histogram(space, x, y),
        _ => Err(Error::UnsupportedSpace("k1_torus expects a torus space")),
    }
}

/// Klein-bottle propagator over the wrap-and-reflect image set.
pub fn k1_klein_histogram(
    space: &SpaceSpec,
    x: &LatticePoint,
    y: &LatticePoint,
) -> Result<PhaseHistogram> {
    match space {
        SpaceSpec::Klein { .. } => quotient_histogram(space, x, y),
        _ => Err(Error::UnsupportedSpace("k1_klein expects a Klein space")),
    }
}

fn quotient_histogram(
    space: &SpaceSpec,
    x: &LatticePoint,
    y: &LatticePoint,
) -> Result<PhaseHistogram> {
    let mut hist = PhaseHistogram::new();
    for image in space.causal_images(x, y)? {
        let (dx, dt) = x.displacement_to(&image);
        hist.merge(&k1_free_histogram(&dx, dt));
    }
    Ok(hist)
}

pub fn k1_torus(space: &SpaceSpec, x: &LatticePoint, y: &LatticePoint, mass: f64) -> Result<Amplitude> {
    Ok(k1_torus_histogram(space, x, y)?.amplitude(mass))
}

pub fn k1_klein(space: &SpaceSpec, x: &LatticePoint, y: &LatticePoint, mass: f64) -> Result<Amplitude> {
    Ok(k1_klein_histogram(space, x, y)?.amplitude(mass))
}

/// Tropical de-Sitter propagator: a pure multinomial count, since every path
/// on the zero set is null and the phase vanishes identically.
pub fn k1_desitter(space: &SpaceSpec, x: &LatticePoint, y: &LatticePoint) -> Result<BigUint> {
    let (d, _c) = match space {
        SpaceSpec::TropicalDeSitter { d, c } => (*d, *c),
        _ => {
            return Err(Error::UnsupportedSpace(
                "k1_desitter expects a tropical de-Sitter space",
            ))
        }
    };
    if x.d() != d || y.d() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.d().max(y.d()),
        });
    }
    if !(space.contains(x)? && space.contains(y)?) {
        return Err(Error::Membership);
    }
    let (dx, dt) = x.displacement_to(y);
    if dt < 0 {
        return Err(Error::ReversedTime(dt));
    }
    let l1: i64 = dx.iter().map(|v| v.abs()).sum();
    if l1 != dt {
        return Ok(BigUint::zero());
    }
    let parts: Vec<u64> = dx.iter().map(|v| v.unsigned_abs()).collect();
    Ok(exact::multinomial(&parts))
}

/// Normalization `G_p(t)`: `(t / t_avg)^{|A_p| / 4 pi}` times the largest
/// path count over endpoints at time `t`, found by a DP scan.
pub fn normalization_gp(n: u32, t: i64) -> Result<f64> {
    if t <= 0 {
        return Err(Error::ReversedTime(t));
    }
    let axes = crate::metrics::axes_of_symmetry(n, 1)?;
    let free = SpaceSpec::Free { d: 1, extents: None };
    let profile = paths::path_count_profile(&free, &LatticePoint::origin(1), t, &axes)?;
    let max_count = profile
        .iter()
        .map(|(_, c)| c)
        .max()
        .cloned()
        .unwrap_or_else(BigUint::zero);
    let t_avg = rational_to_f64(axes.t_avg());
    let exponent = axes.len() as f64 / (4.0 * std::f64::consts::PI);
    Ok((t as f64 / t_avg).powf(exponent) * exact::to_f64(&max_count))
}

/// Sup over the grid of `|K_p/G_p - K_q/G_q|` at matched lattice points.
///
/// The normalization is taken at the horizon-effective order `min(n, t)`:
/// axis steps longer than the whole time span generate no paths, so they
/// cannot renormalize the comparison at desk scale.
pub fn cauchy_diagnostic(p: u32, q: u32, t: i64, grid: &[i64], mass: f64) -> Result<f64> {
    if p >= q {
        return Err(Error::UnsupportedSpace("cauchy_diagnostic expects p < q"));
    }
    let effective = |n: u32| -> u32 { n.min(t.max(1) as u32) };
    let gp = normalization_gp(effective(p), t)?;
    let gq = normalization_gp(effective(q), t)?;
    let mut sup: f64 = 0.0;
    for &x in grid {
        let kp = kn_free(p, x, t, mass)?;
        let kq = kn_free(q, x, t, mass)?;
        sup = sup.max((kp / gp - kq / gq).norm());
    }
    Ok(sup)
}
