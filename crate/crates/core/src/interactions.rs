//! Static 1-d Coulomb potential added to the path phase, and the
//! mass-spectrum probe.
//!
//! Positions are physical: a lattice at refinement `n` puts `n` sites per
//! unit length, the proper time of a path scales as `rho / n`, and the
//! accumulated potential as `1 / n^2` in lattice units. Both contributions
//! land in the same `1/(8 n^2)` phase quantum, so a single histogram key
//! serves every mass.


use num_bigint::BigUint;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::propagators::{Amplitude, PhaseHistogram};

/// A static point charge on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    /// Charge position in physical units (lattice coordinate / refinement).
    pub charge_position: f64,
    /// Coupling strength; sign selects attraction or repulsion.
    pub coupling: f64,
}

/// `coupling * (-|x - x_q|)`, the 1-d Coulomb potential.
pub fn coulomb_potential(x: f64, spec: &PotentialSpec) -> f64 {
    spec.coupling * (-(x - spec.charge_position).abs())
}

/// Time-span guard for the interacting DP; 3^80 is the largest path total
/// the u128 counters can hold.
pub const INTERACTING_CAP: i64 = 80;

/// Phase quantum denominator: accumulated potential is quantized to
/// `1/(8 n^2)` steps.
const BUCKETS_PER_UNIT: f64 = 8.0;

fn bucket_increment(v: i64, refinement: i64, spec: &PotentialSpec) -> i64 {
    // Per-vertex potential in bucket units: 8 * coupling * |v - n x_q|.
    let dist = (v as f64 - refinement as f64 * spec.charge_position).abs();
    (BUCKETS_PER_UNIT * spec.coupling * dist).round() as i64
}

/// Phase histograms of the interacting propagator from the origin to every
/// endpoint at time `dt`, on the free d=1 lattice refined by `refinement`.
///
/// Keys are effective proper times in physical units: each unit time step
/// contributes `1/n` and each visited vertex adds its (bucketed) potential,
/// so `amplitude(m)` reproduces the phase rule `m rho - m sum V`.
pub fn k_interacting_profile(
    refinement: i64,
    dt: i64,
    spec: &PotentialSpec,
) -> Result<Vec<(i64, PhaseHistogram)>> {
    assert!(refinement >= 1, "refinement must be >= 1");
    if dt < 0 {
        return Err(Error::ReversedTime(dt));
    }
    if dt > INTERACTING_CAP {
        return Err(Error::Capacity {
            limit: INTERACTING_CAP,
            requested: dt,
        });
    }
    let width = (2 * dt + 1) as usize;
    let offset = dt;
    // Per-position potential increments, in 1/(8 n^2) phase-quantum units.
    let incs: Vec<i64> = (0..width)
        .map(|ix| bucket_increment(ix as i64 - offset, refinement, spec))
        .collect();
    let tick = 8 * refinement;
    let inc_lo = incs.iter().min().copied().unwrap_or(0).min(0) * dt;
    let inc_hi = (incs.iter().max().copied().unwrap_or(0) + tick).max(0) * dt;
    let span = (inc_hi - inc_lo + 1) as usize;
    // The dense key table must stay modest.
    if span as u128 * width as u128 * 16 > 2_000_000_000 {
        return Err(Error::Resolution {
            suggested: 1.0 / BUCKETS_PER_UNIT,
        });
    }

    // Dense DP over (position, combined bucket key); the key packs
    // 8 n I_0 + bucketed potential, both in 1/(8 n^2) phase units.
    struct Cell {
        lo: usize,
        hi: usize,
        counts: Vec<u128>,
    }
    let fresh = |span: usize| Cell {
        lo: usize::MAX,
        hi: 0,
        counts: vec![0; span],
    };
    let origin_key = (-inc_lo) as usize;
    let mut current: Vec<Option<Cell>> = (0..width).map(|_| None).collect();
    current[offset as usize] = Some(Cell {
        lo: origin_key,
        hi: origin_key,
        counts: {
            let mut v = vec![0; span];
            v[origin_key] = 1;
            v
        },
    });
    for _tau in 0..dt {
        let mut next: Vec<Option<Cell>> = (0..width).map(|_| None).collect();
        for (ix, slot) in current.iter().enumerate() {
            let Some(cell) = slot else { continue };
            if cell.lo > cell.hi {
                continue;
            }
            let x = ix as i64 - offset;
            for (step_dx, is_tick) in [(-1i64, false), (0, true), (1, false)] {
                let nx = x + step_dx;
                if nx.abs() > dt {
                    continue;
                }
                let nix = (nx + offset) as usize;
                let shift = incs[nix] + if is_tick { tick } else { 0 };
                let target = next[nix].get_or_insert_with(|| fresh(span));
                let t_lo = (cell.lo as i64 + shift) as usize;
                let t_hi = (cell.hi as i64 + shift) as usize;
                for key in cell.lo..=cell.hi {
                    let c = cell.counts[key];
                    if c != 0 {
                        target.counts[(key as i64 + shift) as usize] += c;
                    }
                }
                target.lo = target.lo.min(t_lo);
                target.hi = target.hi.max(t_hi);
            }
        }
        current = next;
    }

    let denom = 8 * refinement * refinement;
    let mut out = Vec::new();
    for (ix, cell) in current.iter().enumerate() {
        let Some(cell) = cell else { continue };
        let mut hist = PhaseHistogram::new();
        for key in cell.lo..=cell.hi {
            let c = cell.counts[key];
            if c != 0 {
                hist.add(
                    Rational64::new(key as i64 + inc_lo, denom),
                    BigUint::from(c),
                );
            }
        }
        if !hist.is_empty() {
            out.push((ix as i64 - offset, hist));
        }
    }
    Ok(out)
}

/// Interacting propagator histogram for a single displacement.
pub fn k_interacting_histogram(
    refinement: i64,
    dx: i64,
    dt: i64,
    spec: &PotentialSpec,
) -> Result<PhaseHistogram> {
    let profile = k_interacting_profile(refinement, dt, spec)?;
    Ok(profile
        .into_iter()
        .find(|(x, _)| *x == dx)
        .map(|(_, h)| h)
        .unwrap_or_default())
}

pub fn k_interacting(
    refinement: i64,
    dx: i64,
    dt: i64,
    spec: &PotentialSpec,
    mass: f64,
) -> Result<Amplitude> {
    Ok(k_interacting_histogram(refinement, dx, dt, spec)?.amplitude(mass))
}

/// Evaluate a propagator histogram's magnitude over a mass grid. Spike
/// detection is left to the caller.
pub fn mass_spectrum_scan(hist: &PhaseHistogram, m_grid: &[f64]) -> Vec<(f64, f64)> {
    m_grid
        .iter()
        .map(|&m| (m, hist.amplitude(m).norm()))
        .collect()
}

/// Magnitude-weighted mean endpoint position of a profile, in physical
/// units, at mass `m`.
pub fn magnitude_weighted_mean(
    profile: &[(i64, PhaseHistogram)],
    refinement: i64,
    mass: f64,
) -> f64 {
    let mut weight = 0.0;
    let mut moment = 0.0;
    for (x, hist) in profile {
        let mag = hist.amplitude(mass).norm();
        weight += mag;
        moment += mag * (*x as f64) / refinement as f64;
    }
    moment / weight
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticePoint, SpaceSpec};
    use crate::metrics::axes_of_symmetry;
    use crate::paths::enumerate_paths;
    use crate::propagators::k1_free_histogram;
    use num_complex::Complex64;
    use num_traits::Zero;

    #[test]
    fn potential_examples() {
        let spec = PotentialSpec { charge_position: 1.0, coupling: 1.0 };
        assert_eq!(coulomb_potential(1.0, &spec), 0.0);
        assert_eq!(coulomb_potential(3.0, &spec), -2.0);
        let flipped = PotentialSpec { coupling: -1.0, ..spec };
        assert_eq!(coulomb_potential(3.0, &flipped), 2.0);
    }

    #[test]
    fn zero_coupling_reduces_to_free() {
        let spec = PotentialSpec { charge_position: 1.0, coupling: 0.0 };
        let n = 3;
        for dt in 0..=6i64 {
            for dx in -dt..=dt {
                let interacting = k_interacting_histogram(n, dx, dt, &spec).unwrap();
                let free = k1_free_histogram(&[dx], dt).scale_keys(n);
                assert_eq!(interacting, free, "dx={} dt={}", dx, dt);
            }
        }
    }

    #[test]
    fn zero_mass_counts_paths() {
        let spec = PotentialSpec { charge_position: 0.5, coupling: 2.0 };
        let h = k_interacting_histogram(2, 1, 5, &spec).unwrap();
        assert_eq!(h.total(), k1_free_histogram(&[1], 5).total());
    }

    #[test]
    fn dp_matches_exact_enumeration() {
        // n * x_q integral and 8 * coupling integral make bucketing exact.
        let n = 2i64;
        let spec = PotentialSpec { charge_position: 0.5, coupling: 1.0 };
        let axes = axes_of_symmetry(1, 1).unwrap();
        let space = SpaceSpec::Free { d: 1, extents: None };
        let mass = 0.9;
        for dt in 0..=6i64 {
            for dx in -dt..=dt {
                let paths = enumerate_paths(
                    &space,
                    &LatticePoint::origin(1),
                    &LatticePoint::new(vec![dx], dt),
                    &axes,
                )
                .unwrap();
                let mut exact_amp = Complex64::zero();
                for path in &paths {
                    let rho = crate::paths::proper_time(path, &axes);
                    let mut phase = mass * crate::metrics::rational_to_f64(rho) / n as f64;
                    for v in &path.vertices(&axes)[1..] {
                        phase -= mass * coulomb_potential(v.spatial[0] as f64 / n as f64, &spec)
                            / n as f64;
                    }
                    exact_amp += Complex64::new(phase.cos(), phase.sin());
                }
                let dp_amp = k_interacting(n, dx, dt, &spec, mass).unwrap();
                assert!(
                    (exact_amp - dp_amp).norm() < 1e-9,
                    "dx={} dt={} exact={} dp={}",
                    dx,
                    dt,
                    exact_amp,
                    dp_amp
                );
            }
        }
    }

    #[test]
    fn reflection_covariance() {
        let n = 4;
        let dt = 8;
        let spec = PotentialSpec { charge_position: 0.75, coupling: 1.0 };
        let mirrored = PotentialSpec { charge_position: -0.75, coupling: 1.0 };
        let left = k_interacting_profile(n, dt, &spec).unwrap();
        let right = k_interacting_profile(n, dt, &mirrored).unwrap();
        for (x, hist) in &left {
            let twin = right.iter().find(|(rx, _)| rx == &-x).unwrap();
            assert_eq!(hist, &twin.1, "x={}", x);
        }
    }

    #[test]
    fn scan_reuses_histogram() {
        let h = k1_free_histogram(&[0], 6);
        let scan = mass_spectrum_scan(&h, &[0.0, 0.5, 1.0]);
        assert_eq!(scan.len(), 3);
        assert_eq!(scan[0].1, crate::exact::to_f64(&h.total()));
    }
}
