//! Achronal local paths: enumeration, canonical difference sequences, proper
//! times, and dynamic-programming path counts.
//!
//! Paths are stored as sequences of indices into an [`AxesOfSymmetry`] step
//! list, never as vertex lists, so the canonical-representative property is
//! structural. On quotient spaces enumeration runs on the universal cover
//! against the causal image set of the endpoint.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact;
use crate::lattice::{LatticePoint, SpaceSpec};
use crate::metrics::AxesOfSymmetry;

/// Enumeration guard: beyond this time span use [`path_count`] or the
/// analytic propagators.
pub fn enumeration_cap(d: usize) -> i64 {
    match d {
        1 => 12,
        2 => 8,
        _ => 6,
    }
}

/// A canonical achronal path: an origin and axis-step indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub origin: LatticePoint,
    pub steps: Vec<usize>,
}

impl Path {
    pub fn endpoint(&self, axes: &AxesOfSymmetry) -> LatticePoint {
        let mut spatial = self.origin.spatial.clone();
        let mut time = self.origin.time;
        for &idx in &self.steps {
            let s = axes.step(idx);
            for (c, d) in spatial.iter_mut().zip(&s.dx) {
                *c += d;
            }
            time += s.dt;
        }
        LatticePoint::new(spatial, time)
    }

    /// The full vertex sequence the path visits, origin included.
    pub fn vertices(&self, axes: &AxesOfSymmetry) -> Vec<LatticePoint> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut cur = self.origin.clone();
        out.push(cur.clone());
        for &idx in &self.steps {
            let s = axes.step(idx);
            for (c, d) in cur.spatial.iter_mut().zip(&s.dx) {
                *c += d;
            }
            cur.time += s.dt;
            out.push(cur.clone());
        }
        out
    }
}

/// Per-direction step counts `I_a` of a path.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StepTally {
    pub counts: std::collections::BTreeMap<usize, u64>,
}

impl StepTally {
    pub fn from_path(p: &Path) -> Self {
        let mut counts = std::collections::BTreeMap::new();
        for &idx in &p.steps {
            *counts.entry(idx).or_insert(0) += 1;
        }
        StepTally { counts }
    }

    /// Total displacement realized by the tally.
    pub fn displacement(&self, axes: &AxesOfSymmetry) -> (Vec<i64>, i64) {
        let mut dx = vec![0i64; axes.d];
        let mut dt = 0i64;
        for (&idx, &n) in &self.counts {
            let s = axes.step(idx);
            for (c, d) in dx.iter_mut().zip(&s.dx) {
                *c += d * n as i64;
            }
            dt += s.dt * n as i64;
        }
        (dx, dt)
    }

    pub fn proper_time(&self, axes: &AxesOfSymmetry) -> Rational64 {
        self.counts
            .iter()
            .map(|(&idx, &n)| axes.step(idx).length * Rational64::from_integer(n as i64))
            .sum()
    }

    /// Number of distinct step orderings with these counts.
    pub fn multiplicity(&self) -> BigUint {
        let parts: Vec<u64> = self.counts.values().copied().collect();
        exact::multinomial(&parts)
    }
}

/// Sum of per-step polygonal lengths, exact.
pub fn proper_time(p: &Path, axes: &AxesOfSymmetry) -> Rational64 {
    p.steps.iter().map(|&idx| axes.step(idx).length).sum()
}

/// Sum of per-step Minkowski lengths. Agrees exactly with [`proper_time`]
/// on axis steps.
pub fn proper_time_minkowski(p: &Path, axes: &AxesOfSymmetry) -> f64 {
    p.steps
        .iter()
        .map(|&idx| {
            let s = axes.step(idx);
            let radicand = s.dt * s.dt - s.dx.iter().map(|x| x * x).sum::<i64>();
            (radicand as f64).sqrt()
        })
        .sum()
}

fn check_dims(space: &SpaceSpec, x: &LatticePoint, y: &LatticePoint, axes: &AxesOfSymmetry) -> Result<()> {
    for p in [x, y] {
        if p.d() != space.d() {
            return Err(Error::DimensionMismatch {
                expected: space.d(),
                got: p.d(),
            });
        }
    }
    if axes.d != space.d() {
        return Err(Error::DimensionMismatch {
            expected: space.d(),
            got: axes.d,
        });
    }
    Ok(())
}

fn vertex_allowed(space: &SpaceSpec, p: &LatticePoint) -> bool {
    match space {
        SpaceSpec::Free { extents: None, .. } => true,
        SpaceSpec::Free { .. } | SpaceSpec::TropicalDeSitter { .. } => {
            space.contains(p).unwrap_or(false)
        }
        // Quotient enumeration runs on the cover, which is unbounded.
        SpaceSpec::Torus { .. } | SpaceSpec::Klein { .. } => true,
    }
}

/// Every canonical representative of the achronal local paths from `x` to
/// `y` whose vertices all lie in the space, in lexicographic step order.
pub fn enumerate_paths(
    space: &SpaceSpec,
    x: &LatticePoint,
    y: &LatticePoint,
    axes: &AxesOfSymmetry,
) -> Result<Vec<Path>> {
    check_dims(space, x, y, axes)?;
    let dt = y.time - x.time;
    if dt < 0 {
        return Err(Error::ReversedTime(dt));
    }
    let cap = enumeration_cap(space.d());
    if dt > cap {
        return Err(Error::Capacity {
            limit: cap,
            requested: dt,
        });
    }
    let targets: Vec<LatticePoint> = match space {
        SpaceSpec::Torus { .. } | SpaceSpec::Klein { .. } => space.causal_images(x, y)?,
        _ => vec![y.clone()],
    };
    let mut out = Vec::new();
    if !vertex_allowed(space, x) {
        return Ok(out);
    }
    for target in &targets {
        let mut current = Path {
            origin: x.clone(),
            steps: Vec::new(),
        };
        let mut pos = x.clone();
        dfs(space, axes, target, &mut pos, &mut current, &mut out);
    }
    Ok(out)
}

fn dfs(
    space: &SpaceSpec,
    axes: &AxesOfSymmetry,
    target: &LatticePoint,
    pos: &mut LatticePoint,
    current: &mut Path,
    out: &mut Vec<Path>,
) {
    let remaining = target.time - pos.time;
    let dist: i64 = pos
        .spatial
        .iter()
        .zip(&target.spatial)
        .map(|(a, b)| (a - b).abs())
        .sum();
    if dist > remaining {
        return;
    }
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    for idx in 0..axes.len() {
        let s = axes.step(idx);
        if s.dt > remaining {
            continue;
        }
        for (c, d) in pos.spatial.iter_mut().zip(&s.dx) {
            *c += d;
        }
        pos.time += s.dt;
        if vertex_allowed(space, pos) {
            current.steps.push(idx);
            dfs(space, axes, target, pos, current, out);
            current.steps.pop();
        }
        for (c, d) in pos.spatial.iter_mut().zip(&s.dx) {
            *c -= d;
        }
        pos.time -= s.dt;
    }
}

/// The unique axis difference sequence tracing the same piecewise-linear
/// curve as the given vertex list.
pub fn canonicalize(raw: &[LatticePoint], axes: &AxesOfSymmetry) -> Result<Path> {
    let origin = raw.first().ok_or(Error::NonGenerable)?.clone();
    let mut steps = Vec::new();
    for w in raw.windows(2) {
        let (dx, dt) = w[0].displacement_to(&w[1]);
        if dt < 0 {
            return Err(Error::ReversedTime(dt));
        }
        if dt == 0 {
            if dx.iter().all(|c| *c == 0) {
                continue;
            }
            return Err(Error::NonGenerable);
        }
        let idx = (0..axes.len())
            .find(|&i| {
                let s = axes.step(i);
                dt % s.dt == 0 && {
                    let k = dt / s.dt;
                    k >= 1 && s.dx.iter().zip(&dx).all(|(a, b)| a * k == *b)
                }
            })
            .ok_or(Error::NonGenerable)?;
        let k = dt / axes.step(idx).dt;
        steps.extend(std::iter::repeat_n(idx, k as usize));
    }
    Ok(Path { origin, steps })
}

/// `|enumerate_paths|` computed by dynamic programming over (position, time),
/// without materializing paths and without the enumeration cap.
pub fn path_count(
    space: &SpaceSpec,
    x: &LatticePoint,
    y: &LatticePoint,
    axes: &AxesOfSymmetry,
) -> Result<BigUint> {
    check_dims(space, x, y, axes)?;
    let dt = y.time - x.time;
    if dt < 0 {
        return Err(Error::ReversedTime(dt));
    }
    match space {
        SpaceSpec::Torus { .. } | SpaceSpec::Klein { .. } => {
            let free = SpaceSpec::Free {
                d: space.d(),
                extents: None,
            };
            let mut total = BigUint::zero();
            for image in space.causal_images(x, y)? {
                total += path_count(&free, x, &image, axes)?;
            }
            Ok(total)
        }
        _ => {
            if !vertex_allowed(space, x) || !vertex_allowed(space, y) {
                return Ok(BigUint::zero());
            }
            Ok(count_dp(space, x, y, axes, dt))
        }
    }
}

fn count_dp(
    space: &SpaceSpec,
    x: &LatticePoint,
    y: &LatticePoint,
    axes: &AxesOfSymmetry,
    dt: i64,
) -> BigUint {
    let mut slices: Vec<HashMap<Vec<i64>, BigUint>> = vec![HashMap::new(); dt as usize + 1];
    slices[0].insert(x.spatial.clone(), BigUint::one());
    for tau in 0..dt {
        if slices[tau as usize].is_empty() {
            continue;
        }
        let frontier = std::mem::take(&mut slices[tau as usize]);
        for (pos, count) in frontier {
            for idx in 0..axes.len() {
                let s = axes.step(idx);
                if s.dt > dt - tau {
                    continue;
                }
                let next: Vec<i64> = pos.iter().zip(&s.dx).map(|(a, b)| a + b).collect();
                let remaining = dt - tau - s.dt;
                let dist: i64 = next
                    .iter()
                    .zip(&y.spatial)
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                if dist > remaining {
                    continue;
                }
                let vertex = LatticePoint::new(next.clone(), x.time + tau + s.dt);
                if !vertex_allowed(space, &vertex) {
                    continue;
                }
                *slices[(tau + s.dt) as usize]
                    .entry(next)
                    .or_insert_with(BigUint::zero) += &count;
            }
        }
    }
    slices[dt as usize]
        .get(&y.spatial)
        .cloned()
        .unwrap_or_else(BigUint::zero)
}

/// Path counts from `x` to every reachable endpoint at time offset `dt`.
/// Used for normalization scans and endpoint profiles.
pub fn path_count_profile(
    space: &SpaceSpec,
    x: &LatticePoint,
    dt: i64,
    axes: &AxesOfSymmetry,
) -> Result<Vec<(Vec<i64>, BigUint)>> {
    if x.d() != space.d() || axes.d != space.d() {
        return Err(Error::DimensionMismatch {
            expected: space.d(),
            got: x.d(),
        });
    }
    if dt < 0 {
        return Err(Error::ReversedTime(dt));
    }
    if !vertex_allowed(space, x) {
        return Ok(Vec::new());
    }
    let mut slices: Vec<HashMap<Vec<i64>, BigUint>> = vec![HashMap::new(); dt as usize + 1];
    slices[0].insert(x.spatial.clone(), BigUint::one());
    for tau in 0..dt {
        let frontier = std::mem::take(&mut slices[tau as usize]);
        for (pos, count) in frontier {
            for idx in 0..axes.len() {
                let s = axes.step(idx);
                if s.dt > dt - tau {
                    continue;
                }
                let next: Vec<i64> = pos.iter().zip(&s.dx).map(|(a, b)| a + b).collect();
                let vertex = LatticePoint::new(next.clone(), x.time + tau + s.dt);
                if !vertex_allowed(space, &vertex) {
                    continue;
                }
                *slices[(tau + s.dt) as usize]
                    .entry(next)
                    .or_insert_with(BigUint::zero) += &count;
            }
        }
    }
    let mut profile: Vec<(Vec<i64>, BigUint)> = slices[dt as usize].drain().collect();
    profile.sort();
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::axes_of_symmetry;

    fn p(spatial: &[i64], t: i64) -> LatticePoint {
        LatticePoint::new(spatial.to_vec(), t)
    }

    fn free(d: usize) -> SpaceSpec {
        SpaceSpec::Free { d, extents: None }
    }

    #[test]
    fn enumerate_free_d1_basics() {
        let axes = axes_of_symmetry(1, 1).unwrap();
        let paths = enumerate_paths(&free(1), &p(&[0], 0), &p(&[0], 2), &axes).unwrap();
        assert_eq!(paths.len(), 3);
        for path in &paths {
            assert_eq!(path.endpoint(&axes), p(&[0], 2));
        }
        let none = enumerate_paths(&free(1), &p(&[0], 0), &p(&[3], 2), &axes).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn enumerate_respects_cap_and_time_direction() {
        let axes = axes_of_symmetry(1, 1).unwrap();
        assert!(matches!(
            enumerate_paths(&free(1), &p(&[0], 0), &p(&[0], 13), &axes),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(
            enumerate_paths(&free(1), &p(&[0], 2), &p(&[0], 0), &axes),
            Err(Error::ReversedTime(-2))
        ));
    }

    #[test]
    fn desitter_paths_use_only_null_steps() {
        let axes = axes_of_symmetry(1, 1).unwrap();
        let ds = SpaceSpec::TropicalDeSitter { d: 1, c: 2 };
        let paths = enumerate_paths(&ds, &p(&[2], 0), &p(&[5], 3), &axes).unwrap();
        assert_eq!(paths.len(), 1);
        let center = axes.center_index();
        for path in &paths {
            assert!(path.steps.iter().all(|&i| i != center));
        }
    }

    #[test]
    fn proper_time_examples() {
        let a1 = axes_of_symmetry(1, 1).unwrap();
        let two_ticks = Path { origin: p(&[0], 0), steps: vec![1, 1] };
        assert_eq!(proper_time(&two_ticks, &a1), Rational64::from_integer(2));
        assert_eq!(proper_time_minkowski(&two_ticks, &a1), 2.0);
        let null = Path { origin: p(&[0], 0), steps: vec![2, 0] };
        assert_eq!(proper_time(&null, &a1), Rational64::from_integer(0));

        let a5 = axes_of_symmetry(5, 1).unwrap();
        let idx35 = (0..a5.len()).find(|&i| a5.step(i).dx1() == 3).unwrap();
        let one_hop = Path { origin: p(&[0], 0), steps: vec![idx35] };
        assert_eq!(proper_time(&one_hop, &a5), Rational64::from_integer(4));
        assert_eq!(proper_time_minkowski(&one_hop, &a5), 4.0);
    }

    #[test]
    fn canonicalize_examples() {
        let a1 = axes_of_symmetry(1, 1).unwrap();
        let path = canonicalize(&[p(&[0], 0), p(&[0], 1), p(&[0], 2)], &a1).unwrap();
        assert_eq!(path.steps, vec![a1.center_index(), a1.center_index()]);

        let a5 = axes_of_symmetry(5, 1).unwrap();
        let idx35 = (0..a5.len()).find(|&i| a5.step(i).dx1() == 3 && a5.step(i).dt == 5).unwrap();
        let single = canonicalize(&[p(&[0], 0), p(&[3], 5)], &a5).unwrap();
        assert_eq!(single.steps, vec![idx35]);
        let double = canonicalize(&[p(&[0], 0), p(&[6], 10)], &a5).unwrap();
        assert_eq!(double.steps, vec![idx35, idx35]);

        assert!(matches!(
            canonicalize(&[p(&[0], 0), p(&[1], 2)], &a5),
            Err(Error::NonGenerable)
        ));
    }

    #[test]
    fn canonicalize_round_trips_enumerated_paths() {
        let axes = axes_of_symmetry(5, 1).unwrap();
        let paths = enumerate_paths(&free(1), &p(&[0], 0), &p(&[1], 5), &axes).unwrap();
        assert!(!paths.is_empty());
        for path in &paths {
            let verts = path.vertices(&axes);
            let rebuilt = canonicalize(&verts, &axes).unwrap();
            assert_eq!(&rebuilt, path);
        }
    }

    #[test]
    fn counts_match_enumeration() {
        let spaces = [
            free(1),
            SpaceSpec::TropicalDeSitter { d: 1, c: 1 },
            SpaceSpec::Torus { extents: vec![1] },
        ];
        let axes = axes_of_symmetry(5, 1).unwrap();
        for space in &spaces {
            let start = match space {
                SpaceSpec::TropicalDeSitter { .. } => p(&[1], 0),
                _ => p(&[0], 0),
            };
            for t in 0..=6i64 {
                for x in -t..=t {
                    let end = p(&[x], t);
                    let n = enumerate_paths(space, &start, &end, &axes).unwrap().len();
                    let c = path_count(space, &start, &end, &axes).unwrap();
                    assert_eq!(BigUint::from(n), c, "space {:?} endpoint {:?}", space, end);
                }
            }
        }
    }

    #[test]
    fn counts_match_enumeration_d2() {
        let axes = axes_of_symmetry(1, 2).unwrap();
        let space = free(2);
        let start = LatticePoint::origin(2);
        for t in 0..=4i64 {
            for x1 in -t..=t {
                for x2 in -(t - x1.abs())..=(t - x1.abs()) {
                    let end = p(&[x1, x2], t);
                    let n = enumerate_paths(&space, &start, &end, &axes).unwrap().len();
                    let c = path_count(&space, &start, &end, &axes).unwrap();
                    assert_eq!(BigUint::from(n), c);
                }
            }
        }
    }

    #[test]
    fn tropical_enumeration_equals_null_step_axes() {
        // On the zero set the unit time step never survives, so enumerating
        // with the full A_1 equals enumerating with the null steps alone.
        let ds = SpaceSpec::TropicalDeSitter { d: 2, c: 0 };
        let full = axes_of_symmetry(1, 2).unwrap();
        let nulls = crate::metrics::null_step_axes(2);
        let tip = p(&[0, 0], 0);
        for t in 1..=4i64 {
            for x1 in -t..=t {
                let x2 = t - x1.abs();
                for end in [p(&[x1, x2], t), p(&[x1, -x2], t)] {
                    let a = path_count(&ds, &tip, &end, &full).unwrap();
                    let b = path_count(&ds, &tip, &end, &nulls).unwrap();
                    assert_eq!(a, b, "endpoint {:?}", end);
                }
            }
        }
    }

    #[test]
    fn conservation_totals() {
        let a1 = axes_of_symmetry(1, 1).unwrap();
        for t in 0..=8i64 {
            let profile = path_count_profile(&free(1), &p(&[0], 0), t, &a1).unwrap();
            let total: BigUint = profile.into_iter().map(|(_, c)| c).sum();
            assert_eq!(total, BigUint::from(3u32).pow(t as u32));
        }
    }

    #[test]
    fn tally_conditions_hold() {
        let axes = axes_of_symmetry(5, 1).unwrap();
        let paths = enumerate_paths(&free(1), &p(&[0], 0), &p(&[3], 5), &axes).unwrap();
        for path in &paths {
            let tally = StepTally::from_path(path);
            let (dx, dt) = tally.displacement(&axes);
            assert_eq!((dx, dt), (vec![3], 5));
            assert_eq!(tally.proper_time(&axes), proper_time(path, &axes));
        }
    }
}
