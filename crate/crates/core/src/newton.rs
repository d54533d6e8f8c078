//! Newton polygons of polynomials over Q at a prime p.

use num_rational::Ratio;
use num_traits::Signed;
use serde::Serialize;

use crate::qp::{ExactScalar, PContext};

pub type Slope = Ratio<i64>;

/// Root valuations of a polynomial read off its lower convex hull.
///
/// `slopes` holds (root valuation, multiplicity) pairs sorted by valuation;
/// these are the negated hull slopes. Zero roots are counted separately in
/// `infinite`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    #[serde(serialize_with = "ser_slopes")]
    pub slopes: Vec<(Slope, usize)>,
    pub infinite: usize,
}

fn ser_slopes<S: serde::Serializer>(
    slopes: &[(Slope, usize)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(slopes.len()))?;
    for (v, m) in slopes {
        seq.serialize_element(&(v.to_string(), m))?;
    }
    seq.end()
}

impl NewtonPolygon {
    /// Finite root valuations with multiplicity, non-decreasing.
    pub fn root_valuations(&self) -> Vec<Slope> {
        self.slopes
            .iter()
            .flat_map(|(v, m)| std::iter::repeat(*v).take(*m))
            .collect()
    }

    pub fn degree(&self) -> usize {
        self.infinite + self.slopes.iter().map(|(_, m)| m).sum::<usize>()
    }

    /// Sum of root valuations (finite part).
    pub fn valuation_sum(&self) -> Slope {
        self.slopes.iter().map(|(v, m)| *v * Slope::from(*m as i64)).sum()
    }

    /// All roots nonzero with valuation 0.
    pub fn is_flat(&self) -> bool {
        self.infinite == 0 && self.slopes.iter().all(|(v, _)| *v == Slope::from(0))
    }

    /// Sum of -v over the negative root valuations; always an integer.
    pub fn expansion_exponent(&self) -> i64 {
        let s: Slope = self
            .slopes
            .iter()
            .filter(|(v, _)| *v < Slope::from(0))
            .map(|(v, m)| -*v * Slope::from(*m as i64))
            .sum();
        debug_assert!(s.is_integer(), "negative part of the polygon ends at a lattice point");
        s.to_integer()
    }

    /// Largest |root valuation|, rounded up.
    pub fn max_excursion(&self) -> i64 {
        self.slopes.iter().map(|(v, _)| v.abs().ceil().to_integer()).max().unwrap_or(0)
    }
}

/// Lower convex hull of the points (i, v_p(c_i)); coefficients low degree first.
pub fn newton_polygon(coeffs: &[ExactScalar], ctx: &PContext) -> NewtonPolygon {
    let p = ctx.p();
    let points: Vec<(i64, i64)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.vp(p).finite().map(|v| (i as i64, v)))
        .collect();
    let infinite = points.first().map_or(0, |&(i, _)| i as usize);

    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(points.len());
    for &pt in &points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly below the chord
            let cross = (x2 - x1) as i128 * (pt.1 - y1) as i128 - (y2 - y1) as i128 * (pt.0 - x1) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let mut slopes: Vec<(Slope, usize)> = hull
        .windows(2)
        .map(|w| {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            (-Slope::new(dy, dx), dx as usize)
        })
        .collect();
    slopes.reverse();
    NewtonPolygon { slopes, infinite }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::QMatrix;

    fn s(x: &str) -> ExactScalar {
        x.parse().unwrap()
    }

    #[test]
    fn linear() {
        for p in [2, 3, 7] {
            let ctx = PContext::new(p, 4).unwrap();
            let np = newton_polygon(&[s("-1"), s("1")], &ctx);
            assert_eq!(np.slopes, vec![(Slope::from(0), 1)]);
        }
    }

    #[test]
    fn eisenstein_quadratic() {
        let ctx = PContext::new(3, 4).unwrap();
        let np = newton_polygon(&[s("-3"), s("0"), s("1")], &ctx);
        assert_eq!(np.slopes, vec![(Slope::new(1, 2), 2)]);
    }

    #[test]
    fn split_quadratic() {
        let ctx = PContext::new(3, 4).unwrap();
        // x^2 - (1 + 1/3) x + 1/3 with roots 1/3 and 1
        let np = newton_polygon(&[s("1/3"), s("-4/3"), s("1")], &ctx);
        assert_eq!(np.slopes, vec![(Slope::from(-1), 1), (Slope::from(0), 1)]);
        assert_eq!(np.expansion_exponent(), 1);
    }

    #[test]
    fn zero_roots_are_separate() {
        let ctx = PContext::new(5, 4).unwrap();
        // x^2 (x - 5)
        let np = newton_polygon(&[s("0"), s("0"), s("-5"), s("1")], &ctx);
        assert_eq!(np.infinite, 2);
        assert_eq!(np.slopes, vec![(Slope::from(1), 1)]);
        assert_eq!(np.degree(), 3);
        assert!(!np.is_flat());
    }

    #[test]
    fn collinear_points_merge() {
        let ctx = PContext::new(2, 4).unwrap();
        // (x-2)(x-4)(x-8): valuations 1,2,3 each simple
        let a = QMatrix::diagonal(&[s("2"), s("4"), s("8")]);
        let np = newton_polygon(&a.char_poly(), &ctx);
        assert_eq!(np.root_valuations(), vec![Slope::from(1), Slope::from(2), Slope::from(3)]);
        // (x-2)^3 collapses to a single segment of length 3
        let b = QMatrix::diagonal(&[s("2"), s("2"), s("2")]);
        let np = newton_polygon(&b.char_poly(), &ctx);
        assert_eq!(np.slopes, vec![(Slope::from(1), 3)]);
    }
}
