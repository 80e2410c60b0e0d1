//! Euclidean, Minkowski, taxicab, and polygonal interval functions, primitive
//! Pythagorean triples, and the axes of symmetry they generate.
//!
//! The polygonal interval `d_n` is the piecewise-linear approximation of the
//! Minkowski interval whose unit sphere is the polygon through the scaled
//! triple directions. Its lengths are exact rationals; floating point enters
//! only when a phase is evaluated.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;

/// Interval value of a displacement: a nonnegative length for causal
/// separations, `Acausal` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CausalInterval {
    Causal(f64),
    Acausal,
}

impl CausalInterval {
    pub fn value(&self) -> Option<f64> {
        match self {
            CausalInterval::Causal(v) => Some(*v),
            CausalInterval::Acausal => None,
        }
    }

    fn from_radicand(r: f64) -> Self {
        if r >= 0.0 {
            CausalInterval::Causal(r.sqrt())
        } else {
            CausalInterval::Acausal
        }
    }
}

/// `sqrt(dt^2 - sum dx_i^2)` when real, else `Acausal`.
pub fn minkowski_interval(a: &LatticePoint, b: &LatticePoint) -> CausalInterval {
    let (dx, dt) = a.displacement_to(b);
    let radicand = dt * dt - dx.iter().map(|x| x * x).sum::<i64>();
    CausalInterval::from_radicand(radicand as f64)
}

/// `|dt| - sum |dx_i|` when nonnegative, else `Acausal`.
pub fn taxicab_interval(a: &LatticePoint, b: &LatticePoint) -> CausalInterval {
    let (dx, dt) = a.displacement_to(b);
    let v = dt.abs() - dx.iter().map(|x| x.abs()).sum::<i64>();
    if v >= 0 {
        CausalInterval::Causal(v as f64)
    } else {
        CausalInterval::Acausal
    }
}

/// A primitive Pythagorean triple with `leg_x < leg_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrimitiveTriple {
    pub leg_x: i64,
    pub leg_i: i64,
    pub hyp: i64,
}

/// Exactly the primitive triples with hypotenuse `<= n`, sorted by
/// hypotenuse then smaller leg. Generated by the coprime, opposite-parity
/// parametrization `(m^2 - k^2, 2mk, m^2 + k^2)`.
pub fn primitive_triples(n: i64) -> Vec<PrimitiveTriple> {
    let mut triples = Vec::new();
    let mut m = 2i64;
    while m * m < n {
        for k in 1..m {
            if (m - k) % 2 == 1 && m.gcd(&k) == 1 {
                let hyp = m * m + k * k;
                if hyp > n {
                    continue;
                }
                let a = m * m - k * k;
                let b = 2 * m * k;
                triples.push(PrimitiveTriple {
                    leg_x: a.min(b),
                    leg_i: a.max(b),
                    hyp,
                });
            }
        }
        m += 1;
    }
    triples.sort_by_key(|t| (t.hyp, t.leg_x));
    triples
}

/// One generator step: an integer causal vector and its exact proper length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisStep {
    pub dx: Vec<i64>,
    pub dt: i64,
    pub length: Rational64,
}

impl AxisStep {
    fn d1(dx: i64, dt: i64, length: i64) -> Self {
        AxisStep {
            dx: vec![dx],
            dt,
            length: Rational64::from_integer(length),
        }
    }

    /// Spatial component in one dimension.
    pub fn dx1(&self) -> i64 {
        self.dx[0]
    }

    pub fn is_null(&self) -> bool {
        self.length.is_zero()
    }
}

/// A chord of the unit-hyperbola polygon, with the Eq-of-motion denominators
/// precomputed. Evaluating `(adx*|dt| - adt*|dx|) / denom` over all chords
/// and taking the minimum gives the polygonal interval.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Chord {
    adx: Rational64,
    adt: Rational64,
    denom: Rational64,
}

/// The finite step set `A_n`: null steps, the unit time step, and both
/// orientations of every primitive triple with hypotenuse `<= n`.
///
/// Index convention (d = 1): steps are ordered by slope `dx/dt`, so `(-1,1)`
/// is first, `(0,1)` sits at the center index `(|A_n|-1)/2`, and `(1,1)` is
/// last. For d >= 2 only n = 1 is defined and the null steps surround the
/// center symmetrically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxesOfSymmetry {
    pub order: u32,
    pub d: usize,
    pub steps: Vec<AxisStep>,
    chords: Vec<Chord>,
    null_denom: Rational64,
}

impl AxesOfSymmetry {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Index of the `(0, 1)` step.
    pub fn center_index(&self) -> usize {
        (self.steps.len() - 1) / 2
    }

    pub fn step(&self, idx: usize) -> &AxisStep {
        &self.steps[idx]
    }

    /// Mean time component over the step list.
    pub fn t_avg(&self) -> Rational64 {
        let total: i64 = self.steps.iter().map(|s| s.dt).sum();
        Rational64::new(total, self.steps.len() as i64)
    }
}

/// Build `A_n` for `d` spatial dimensions. `n >= 2` is only defined for
/// d = 1; n = 1 works in any dimension.
pub fn axes_of_symmetry(n: u32, d: usize) -> Result<AxesOfSymmetry> {
    if n >= 2 && d >= 2 {
        return Err(Error::UnsupportedAxes { n, d });
    }
    assert!(d >= 1, "spatial dimension must be >= 1");
    if d >= 2 {
        // (-e_1, .., -e_d, (0,1), e_d, .., e_1): mirror-symmetric, center at d.
        let mut steps = Vec::with_capacity(2 * d + 1);
        for i in 0..d {
            let mut dx = vec![0; d];
            dx[i] = -1;
            steps.push(AxisStep {
                dx,
                dt: 1,
                length: Rational64::zero(),
            });
        }
        let mut center = AxisStep {
            dx: vec![0; d],
            dt: 1,
            length: Rational64::from_integer(1),
        };
        center.dx = vec![0; d];
        steps.push(center);
        for i in (0..d).rev() {
            let mut dx = vec![0; d];
            dx[i] = 1;
            steps.push(AxisStep {
                dx,
                dt: 1,
                length: Rational64::zero(),
            });
        }
        return Ok(AxesOfSymmetry {
            order: n,
            d,
            steps,
            chords: Vec::new(),
            null_denom: Rational64::from_integer(1),
        });
    }

    // d = 1: null steps, the unit time step, and both orientations of each
    // primitive triple. Sorting by slope realizes the index convention.
    let mut steps = vec![
        AxisStep::d1(-1, 1, 0),
        AxisStep::d1(0, 1, 1),
        AxisStep::d1(1, 1, 0),
    ];
    for t in primitive_triples(n as i64) {
        steps.push(AxisStep::d1(t.leg_x, t.hyp, t.leg_i));
        steps.push(AxisStep::d1(-t.leg_x, t.hyp, t.leg_i));
        steps.push(AxisStep::d1(t.leg_i, t.hyp, t.leg_x));
        steps.push(AxisStep::d1(-t.leg_i, t.hyp, t.leg_x));
    }
    steps.sort_by_key(|s| Rational64::new(s.dx1(), s.dt));
    steps.dedup_by_key(|s| Rational64::new(s.dx1(), s.dt));

    // Unit-hyperbola vertices (dx/len, dt/len) for the non-null steps,
    // ordered by x. Chord denominators are fixed once here.
    let mut vertices: Vec<(Rational64, Rational64)> = steps
        .iter()
        .filter(|s| !s.is_null())
        .map(|s| {
            (
                Rational64::new(s.dx1(), 1) / s.length,
                Rational64::new(s.dt, 1) / s.length,
            )
        })
        .collect();
    vertices.sort();
    let chords = vertices
        .windows(2)
        .map(|w| {
            let (x0, t0) = w[0];
            let (x1, t1) = w[1];
            let adx = (x1 - x0).abs();
            let adt = (t1 - t0).abs();
            let denom = adx * t0.abs() - adt * x0.abs();
            debug_assert!(denom.is_positive());
            Chord { adx, adt, denom }
        })
        .collect();
    let (x0, t0) = vertices[0];
    let null_denom = t0.abs() - x0.abs();

    Ok(AxesOfSymmetry {
        order: n,
        d: 1,
        steps,
        chords,
        null_denom,
    })
}

/// The de-Sitter generating set: the null steps `(+-e_i, 1)` only. On the
/// tropical zero set the unit time step never preserves membership, so this
/// is what survives of `A_1` there.
pub fn null_step_axes(d: usize) -> AxesOfSymmetry {
    let mut axes = axes_of_symmetry(1, d).expect("n = 1 exists in any dimension");
    let center = axes.center_index();
    axes.steps.remove(center);
    axes
}

/// Exact polygonal interval of a displacement, or `None` when acausal.
/// For n = 1 (any d) this is the taxicab value.
pub fn polygonal_interval_exact(axes: &AxesOfSymmetry, dx: &[i64], dt: i64) -> Option<Rational64> {
    if axes.d >= 2 || axes.chords.is_empty() {
        let v = dt.abs() - dx.iter().map(|x| x.abs()).sum::<i64>();
        return (v >= 0).then(|| Rational64::from_integer(v));
    }
    let adx = Rational64::from_integer(dx[0].abs());
    let adt = Rational64::from_integer(dt.abs());
    let mut best = (adt - adx) / axes.null_denom;
    for chord in &axes.chords {
        let value = (chord.adx * adt - chord.adt * adx) / chord.denom;
        if value < best {
            best = value;
        }
    }
    (!best.is_negative()).then_some(best)
}

/// Polygonal Minkowski interval `d_n(a, b)`.
pub fn polygonal_interval(axes: &AxesOfSymmetry, a: &LatticePoint, b: &LatticePoint) -> CausalInterval {
    let (dx, dt) = a.displacement_to(b);
    match polygonal_interval_exact(axes, &dx, dt) {
        Some(v) => CausalInterval::Causal(rational_to_f64(v)),
        None => CausalInterval::Acausal,
    }
}

pub fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(spatial: &[i64], t: i64) -> LatticePoint {
        LatticePoint::new(spatial.to_vec(), t)
    }

    #[test]
    fn minkowski_examples() {
        let o = LatticePoint::origin(1);
        assert_eq!(minkowski_interval(&o, &p(&[3], 5)).value(), Some(4.0));
        assert_eq!(minkowski_interval(&o, &p(&[2], 1)), CausalInterval::Acausal);
        assert_eq!(minkowski_interval(&o, &p(&[0], 7)).value(), Some(7.0));
    }

    #[test]
    fn taxicab_examples() {
        let o1 = LatticePoint::origin(1);
        assert_eq!(taxicab_interval(&o1, &p(&[2], 3)).value(), Some(1.0));
        let o2 = LatticePoint::origin(2);
        assert_eq!(taxicab_interval(&o2, &p(&[1, 1], 2)).value(), Some(0.0));
        assert_eq!(taxicab_interval(&o1, &p(&[3], 2)), CausalInterval::Acausal);
    }

    #[test]
    fn triples_small_n() {
        assert!(primitive_triples(4).is_empty());
        assert_eq!(
            primitive_triples(5),
            vec![PrimitiveTriple { leg_x: 3, leg_i: 4, hyp: 5 }]
        );
        let t25 = primitive_triples(25);
        assert_eq!(
            t25,
            vec![
                PrimitiveTriple { leg_x: 3, leg_i: 4, hyp: 5 },
                PrimitiveTriple { leg_x: 5, leg_i: 12, hyp: 13 },
                PrimitiveTriple { leg_x: 8, leg_i: 15, hyp: 17 },
                PrimitiveTriple { leg_x: 7, leg_i: 24, hyp: 25 },
            ]
        );
    }

    #[test]
    fn triples_match_exhaustive_search() {
        let limit = 150;
        let mut brute = Vec::new();
        for a in 1..=limit {
            for b in a..=limit {
                let h2 = a * a + b * b;
                let h = (h2 as f64).sqrt() as i64;
                let h = if h * h < h2 { h + 1 } else { h };
                if h * h == h2 && h <= limit && a.gcd(&b).gcd(&h) == 1 {
                    brute.push(PrimitiveTriple { leg_x: a, leg_i: b, hyp: h });
                }
            }
        }
        brute.sort_by_key(|t| (t.hyp, t.leg_x));
        assert_eq!(primitive_triples(limit), brute);
    }

    #[test]
    fn axes_layout_d1() {
        let a5 = axes_of_symmetry(5, 1).unwrap();
        assert_eq!(a5.len(), 7);
        assert_eq!(a5.step(0).dx1(), -1);
        assert_eq!(a5.step(a5.center_index()).dx1(), 0);
        assert_eq!(a5.step(a5.center_index()).length, Rational64::from_integer(1));
        assert_eq!(a5.step(a5.len() - 1).dx1(), 1);
        let lengths: Vec<i64> = a5.steps.iter().map(|s| *s.length.numer()).collect();
        assert_eq!(lengths, vec![0, 3, 4, 1, 4, 3, 0]);

        let a4 = axes_of_symmetry(4, 1).unwrap();
        assert_eq!(a4.len(), 3);
    }

    #[test]
    fn axes_layout_high_d() {
        let a = axes_of_symmetry(1, 2).unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(a.step(a.center_index()).dx, vec![0, 0]);
        assert!(a.step(0).is_null());
        assert!(axes_of_symmetry(2, 2).is_err());
    }

    #[test]
    fn axes_steps_satisfy_pythagoras() {
        let a = axes_of_symmetry(50, 1).unwrap();
        for s in &a.steps {
            let len = *s.length.numer();
            assert_eq!(s.length.denom(), &1);
            assert_eq!(s.dt * s.dt - s.dx1() * s.dx1(), len * len);
        }
    }

    #[test]
    fn polygonal_agrees_with_minkowski_on_axes() {
        for n in [1u32, 2, 5, 13, 25, 50] {
            let axes = axes_of_symmetry(n, 1).unwrap();
            for s in &axes.steps {
                let exact = polygonal_interval_exact(&axes, &s.dx, s.dt).unwrap();
                assert_eq!(exact, s.length, "axis {:?} under d_{}", s, n);
            }
        }
    }

    #[test]
    fn polygonal_examples() {
        let a5 = axes_of_symmetry(5, 1).unwrap();
        let o = LatticePoint::origin(1);
        assert_eq!(polygonal_interval(&a5, &o, &p(&[3], 5)).value(), Some(4.0));
        let a1 = axes_of_symmetry(1, 1).unwrap();
        assert_eq!(polygonal_interval(&a1, &o, &p(&[2], 3)).value(), Some(1.0));
        for n in [1, 5, 13] {
            let axes = axes_of_symmetry(n, 1).unwrap();
            assert_eq!(polygonal_interval(&axes, &o, &p(&[4], 4)).value(), Some(0.0));
        }
        assert_eq!(polygonal_interval(&a5, &o, &p(&[3], 1)), CausalInterval::Acausal);
    }

    #[test]
    fn dominance_and_monotonicity_spotcheck() {
        let orders = [1u32, 2, 5, 13];
        let axes: Vec<_> = orders.iter().map(|n| axes_of_symmetry(*n, 1).unwrap()).collect();
        for dt in 0..=20i64 {
            for dx in -dt..=dt {
                let radicand = dt * dt - dx * dx;
                let mut prev: Option<Rational64> = None;
                for a in &axes {
                    let v = polygonal_interval_exact(a, &[dx], dt).expect("causal grid");
                    // d_n^2 <= dt^2 - dx^2, exactly.
                    assert!(v * v <= Rational64::from_integer(radicand));
                    if let Some(p) = prev {
                        assert!(p <= v);
                    }
                    prev = Some(v);
                }
            }
        }
    }
}
