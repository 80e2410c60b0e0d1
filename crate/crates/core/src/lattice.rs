//! Lattice spaces and point arithmetic.
//!
//! A space is a set of integer points `(x_1..x_d, t)` together with an
//! identification rule: the free (optionally bounded) box, the torus and
//! Klein-bottle quotients, and the tropical de-Sitter zero set
//! `sum_i |x_i| - |t| = c`.

use crate::error::{Error, Result};

/// A point of a lattice space: integer spatial coordinates plus integer time.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub spatial: Vec<i64>,
    pub time: i64,
}

impl LatticePoint {
    pub fn new(spatial: Vec<i64>, time: i64) -> Self {
        LatticePoint { spatial, time }
    }

    /// Origin of a `d`-dimensional space.
    pub fn origin(d: usize) -> Self {
        LatticePoint::new(vec![0; d], 0)
    }

    pub fn d(&self) -> usize {
        self.spatial.len()
    }

    /// Taxicab norm of the spatial part.
    pub fn spatial_l1(&self) -> i64 {
        self.spatial.iter().map(|x| x.abs()).sum()
    }

    /// Componentwise difference `other - self` as (spatial, time).
    pub fn displacement_to(&self, other: &LatticePoint) -> (Vec<i64>, i64) {
        let dx = other
            .spatial
            .iter()
            .zip(&self.spatial)
            .map(|(a, b)| a - b)
            .collect();
        (dx, other.time - self.time)
    }
}

/// Which lattice geometry, plus its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceSpec {
    /// `Z^d x Z`, optionally bounded to `|x_i| <= L_i`.
    Free { d: usize, extents: Option<Vec<i64>> },
    /// Quotient of `Z^d x Z` by `x_i ~ x_i + 2 L_i`.
    Torus { extents: Vec<i64> },
    /// d = 2 quotient where each wrap in `x_1` flips the sign of `x_2`.
    Klein { l1: i64, l2: i64 },
    /// Zero set of `sum_i |x_i| - |t| - c`.
    TropicalDeSitter { d: usize, c: i64 },
}

impl SpaceSpec {
    pub fn d(&self) -> usize {
        match self {
            SpaceSpec::Free { d, .. } => *d,
            SpaceSpec::Torus { extents } => extents.len(),
            SpaceSpec::Klein { .. } => 2,
            SpaceSpec::TropicalDeSitter { d, .. } => *d,
        }
    }

    fn check_dim(&self, p: &LatticePoint) -> Result<()> {
        if p.d() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: p.d(),
            });
        }
        Ok(())
    }

    /// Membership test. Quotient spaces contain every integer point of the
    /// right dimension; bounded boxes and the tropical zero set restrict.
    pub fn contains(&self, p: &LatticePoint) -> Result<bool> {
        self.check_dim(p)?;
        Ok(match self {
            SpaceSpec::Free { extents: None, .. } => true,
            SpaceSpec::Free {
                extents: Some(ls), ..
            } => p.spatial.iter().zip(ls).all(|(x, l)| x.abs() <= *l),
            SpaceSpec::Torus { .. } | SpaceSpec::Klein { .. } => true,
            SpaceSpec::TropicalDeSitter { c, .. } => p.spatial_l1() - p.time.abs() == *c,
        })
    }

    /// Unique representative of `p` in the fundamental domain of a quotient
    /// space. Each coordinate is reduced into `(-L, L]`; on the Klein bottle
    /// an odd number of `x_1` wraps flips the sign of `x_2`.
    pub fn canonical_rep(&self, p: &LatticePoint) -> Result<LatticePoint> {
        self.check_dim(p)?;
        match self {
            SpaceSpec::Torus { extents } => {
                let spatial = p
                    .spatial
                    .iter()
                    .zip(extents)
                    .map(|(x, l)| reduce_half_open(*x, *l).0)
                    .collect();
                Ok(LatticePoint::new(spatial, p.time))
            }
            SpaceSpec::Klein { l1, l2 } => {
                let (r1, wraps) = reduce_half_open(p.spatial[0], *l1);
                let x2 = if wraps.rem_euclid(2) != 0 {
                    -p.spatial[1]
                } else {
                    p.spatial[1]
                };
                let (r2, _) = reduce_half_open(x2, *l2);
                Ok(LatticePoint::new(vec![r1, r2], p.time))
            }
            _ => Err(Error::UnsupportedSpace(
                "canonical_rep is defined on torus and Klein spaces",
            )),
        }
    }

    /// All lifts of `dst` to the universal cover that lie inside the causal
    /// cone of `src`. Finite, exhaustive, sorted, and duplicate-free.
    pub fn causal_images(
        &self,
        src: &LatticePoint,
        dst: &LatticePoint,
    ) -> Result<Vec<LatticePoint>> {
        self.check_dim(src)?;
        self.check_dim(dst)?;
        let dt = dst.time - src.time;
        if dt < 0 {
            return Err(Error::ReversedTime(dt));
        }
        let keep = |spatial: &[i64]| -> bool {
            let l1: i64 = spatial
                .iter()
                .zip(&src.spatial)
                .map(|(a, b)| (a - b).abs())
                .sum();
            l1 <= dt
        };
        let mut images = Vec::new();
        match self {
            SpaceSpec::Torus { extents } => {
                let windows: Vec<i64> = extents.iter().map(|l| window(dt, *l)).collect();
                let mut shift = vec![0i64; extents.len()];
                enumerate_shifts(&windows, 0, &mut shift, &mut |s| {
                    let spatial: Vec<i64> = dst
                        .spatial
                        .iter()
                        .zip(s.iter().zip(extents))
                        .map(|(x, (m, l))| x + 2 * m * l)
                        .collect();
                    if keep(&spatial) {
                        images.push(LatticePoint::new(spatial, dst.time));
                    }
                });
            }
            SpaceSpec::Klein { l1, l2 } => {
                let w1 = window(dt, *l1);
                let w2 = window(dt, *l2);
                for m1 in -w1..=w1 {
                    let x2_base = if m1.rem_euclid(2) != 0 {
                        -dst.spatial[1]
                    } else {
                        dst.spatial[1]
                    };
                    for m2 in -w2..=w2 {
                        let spatial = vec![dst.spatial[0] + 2 * m1 * l1, x2_base + 2 * m2 * l2];
                        if keep(&spatial) {
                            images.push(LatticePoint::new(spatial, dst.time));
                        }
                    }
                }
            }
            _ => {
                return Err(Error::UnsupportedSpace(
                    "causal_images is defined on torus and Klein spaces",
                ))
            }
        }
        images.sort();
        images.dedup();
        Ok(images)
    }
}

/// Reduce `x` into `(-l, l]` modulo `2l`; returns the representative and the
/// number of wraps applied (`x = rep + 2*wraps*l`).
fn reduce_half_open(x: i64, l: i64) -> (i64, i64) {
    let period = 2 * l;
    let mut r = x.rem_euclid(period); // in [0, 2l)
    if r > l {
        r -= period; // in (-l, l]
    }
    ((r), (x - r) / period)
}

fn window(dt: i64, l: i64) -> i64 {
    // |m| beyond ceil(dt / 2L) + 1 cannot re-enter the causal cone.
    dt.div_euclid(2 * l) + 2
}

fn enumerate_shifts(
    windows: &[i64],
    axis: usize,
    shift: &mut Vec<i64>,
    f: &mut impl FnMut(&[i64]),
) {
    if axis == windows.len() {
        f(shift);
        return;
    }
    for m in -windows[axis]..=windows[axis] {
        shift[axis] = m;
        enumerate_shifts(windows, axis + 1, shift, f);
    }
}

/// A space together with a refinement factor `m >= 1`: extents scale to
/// `m * L_i`, the tropical constant does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinedSpace {
    pub base: SpaceSpec,
    pub refinement: i64,
}

impl RefinedSpace {
    pub fn new(base: SpaceSpec, refinement: i64) -> Self {
        assert!(refinement >= 1, "refinement must be >= 1");
        RefinedSpace { base, refinement }
    }

    /// Componentwise nearest lattice point, rounding halves away from zero
    /// and clamping to the refined extents where those are finite.
    pub fn closest_point(&self, spatial: &[f64], time: f64) -> Result<LatticePoint> {
        if spatial.len() != self.base.d() {
            return Err(Error::DimensionMismatch {
                expected: self.base.d(),
                got: spatial.len(),
            });
        }
        let clamp_to = |i: usize| -> Option<i64> {
            match &self.base {
                SpaceSpec::Free {
                    extents: Some(ls), ..
                } => Some(ls[i] * self.refinement),
                SpaceSpec::Torus { extents } => Some(extents[i] * self.refinement),
                SpaceSpec::Klein { l1, l2 } => {
                    Some(if i == 0 { *l1 } else { *l2 } * self.refinement)
                }
                _ => None,
            }
        };
        let spatial = spatial
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let r = round_half_away(*v);
                match clamp_to(i) {
                    Some(l) => r.clamp(-l, l),
                    None => r,
                }
            })
            .collect();
        Ok(LatticePoint::new(spatial, round_half_away(time)))
    }
}

fn round_half_away(v: f64) -> i64 {
    // f64::round ties away from zero, which is the tie-break we document.
    v.round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(spatial: &[i64], t: i64) -> LatticePoint {
        LatticePoint::new(spatial.to_vec(), t)
    }

    #[test]
    fn contains_tropical_zero_set() {
        let ds = SpaceSpec::TropicalDeSitter { d: 2, c: 5 };
        assert!(ds.contains(&p(&[3, 2], 0)).unwrap());
        assert!(!ds.contains(&p(&[3, 2], 1)).unwrap());
        let free = SpaceSpec::Free { d: 1, extents: None };
        assert!(free.contains(&p(&[7], -3)).unwrap());
    }

    #[test]
    fn contains_dimension_error() {
        let ds = SpaceSpec::TropicalDeSitter { d: 2, c: 5 };
        assert!(matches!(
            ds.contains(&p(&[3], 0)),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn closest_point_rounds_and_clamps() {
        let free = RefinedSpace::new(SpaceSpec::Free { d: 1, extents: None }, 1);
        assert_eq!(free.closest_point(&[2.4], 0.6).unwrap(), p(&[2], 1));
        assert_eq!(free.closest_point(&[2.5], 0.5).unwrap(), p(&[3], 1));
        assert_eq!(free.closest_point(&[-2.5], 0.0).unwrap(), p(&[-3], 0));
        let bounded = RefinedSpace::new(
            SpaceSpec::Free {
                d: 1,
                extents: Some(vec![5]),
            },
            1,
        );
        assert_eq!(bounded.closest_point(&[9.7], 0.0).unwrap(), p(&[5], 0));
    }

    #[test]
    fn canonical_rep_torus() {
        let t1 = SpaceSpec::Torus { extents: vec![2] };
        assert_eq!(t1.canonical_rep(&p(&[5], 0)).unwrap(), p(&[1], 0));
        let t2 = SpaceSpec::Torus { extents: vec![2, 2] };
        assert_eq!(t2.canonical_rep(&p(&[5, 0], 1)).unwrap(), p(&[1, 0], 1));
        // -L and L are identified; the representative is L.
        assert_eq!(t1.canonical_rep(&p(&[-2], 0)).unwrap(), p(&[2], 0));
    }

    #[test]
    fn canonical_rep_klein_flips_x2_per_x1_wrap() {
        let k = SpaceSpec::Klein { l1: 2, l2: 2 };
        assert_eq!(k.canonical_rep(&p(&[5, 1], 0)).unwrap(), p(&[1, -1], 0));
        // Two wraps restore the sign.
        assert_eq!(k.canonical_rep(&p(&[9, 1], 0)).unwrap(), p(&[1, 1], 0));
    }

    #[test]
    fn canonical_rep_unsupported_space() {
        let free = SpaceSpec::Free { d: 1, extents: None };
        assert!(matches!(
            free.canonical_rep(&p(&[0], 0)),
            Err(Error::UnsupportedSpace(_))
        ));
    }

    #[test]
    fn causal_images_examples() {
        let t = SpaceSpec::Torus { extents: vec![2] };
        let images = t.causal_images(&p(&[0], 0), &p(&[0], 1)).unwrap();
        assert_eq!(images, vec![p(&[0], 1)]);

        let t1 = SpaceSpec::Torus { extents: vec![1] };
        let images = t1.causal_images(&p(&[0], 0), &p(&[0], 2)).unwrap();
        assert_eq!(images, vec![p(&[-2], 2), p(&[0], 2), p(&[2], 2)]);
    }

    #[test]
    fn causal_images_reversed_time() {
        let t = SpaceSpec::Torus { extents: vec![1] };
        assert!(matches!(
            t.causal_images(&p(&[0], 1), &p(&[0], 0)),
            Err(Error::ReversedTime(-1))
        ));
    }

    #[test]
    fn causal_images_window_is_exhaustive() {
        // Enlarging the shift window beyond the built-in one adds nothing.
        let spaces = [
            SpaceSpec::Torus { extents: vec![1, 2] },
            SpaceSpec::Klein { l1: 1, l2: 1 },
        ];
        for space in &spaces {
            for dt in 0..=8i64 {
                let src = p(&[0, 0], 0);
                let dst = p(&[1, 1], dt);
                let images = space.causal_images(&src, &dst).unwrap();
                let mut brute = Vec::new();
                let wide = 2 * (dt + 2);
                for m1 in -wide..=wide {
                    for m2 in -wide..=wide {
                        let spatial = match space {
                            SpaceSpec::Torus { extents } => {
                                vec![1 + 2 * m1 * extents[0], 1 + 2 * m2 * extents[1]]
                            }
                            SpaceSpec::Klein { l1, l2 } => {
                                let flip = if m1.rem_euclid(2) != 0 { -1 } else { 1 };
                                vec![1 + 2 * m1 * l1, flip + 2 * m2 * l2]
                            }
                            _ => unreachable!(),
                        };
                        if spatial.iter().map(|v| v.abs()).sum::<i64>() <= dt {
                            brute.push(LatticePoint::new(spatial, dt));
                        }
                    }
                }
                brute.sort();
                brute.dedup();
                assert_eq!(images, brute, "space {:?} dt {}", space, dt);
            }
        }
    }

    #[test]
    fn causal_images_map_back_to_canonical_dst() {
        let k = SpaceSpec::Klein { l1: 1, l2: 1 };
        let src = p(&[0, 0], 0);
        let dst = p(&[0, 0], 2);
        let images = k.causal_images(&src, &dst).unwrap();
        assert!(!images.is_empty());
        let canon = k.canonical_rep(&dst).unwrap();
        for im in &images {
            assert_eq!(k.canonical_rep(im).unwrap(), canon);
        }
        // No duplicates by construction of the test.
        let mut sorted = images.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), images.len());
    }
}
