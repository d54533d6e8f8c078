//! The scale of a linear automorphism of Q_p^n.
//!
//! `scale_newton` reads the scale off the Newton polygon of the characteristic
//! polynomial: s(α) is the product of |λ|_p over eigenvalues with |λ|_p > 1.
//! `scale_tidy` computes it procedurally by shrinking a lattice to
//! L_k = L_0 ∩ α(L_0) ∩ … ∩ α^k(L_0) until the displacement index
//! [α(L_k) : α(L_k) ∩ L_k] reaches the Newton value. The two must agree.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeFile};
use crate::matrix::QMatrix;
use crate::newton::{newton_polygon, NewtonPolygon};
use crate::qp::PContext;

#[derive(Debug, Clone)]
pub struct ScaleReport {
    /// s(α) = p^scale_exponent.
    pub scale_exponent: i64,
    pub minimizing_lattice: Lattice,
    /// (k, displacement exponent of L_k).
    pub iteration_trace: Vec<(usize, i64)>,
    pub method_agreement: bool,
}

impl ScaleReport {
    pub fn iterations(&self) -> usize {
        self.iteration_trace.len().saturating_sub(1)
    }
}

#[derive(Serialize)]
struct ScaleReportJson<'a> {
    scale_exponent: i64,
    minimizing_lattice: LatticeFile,
    iteration_trace: &'a [(usize, i64)],
    method_agreement: bool,
}

impl Serialize for ScaleReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScaleReportJson {
            scale_exponent: self.scale_exponent,
            minimizing_lattice: LatticeFile::from(&self.minimizing_lattice),
            iteration_trace: &self.iteration_trace,
            method_agreement: self.method_agreement,
        }
        .serialize(s)
    }
}

fn check_invertible(a: &QMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("scale of a non-square matrix".into()));
    }
    if a.det().is_zero() {
        return Err(Error::Singular);
    }
    Ok(())
}

pub fn polygon_of(a: &QMatrix, ctx: &PContext) -> NewtonPolygon {
    newton_polygon(&a.char_poly(), ctx)
}

/// Exponent m with s(α) = p^m, from the Newton polygon of det(xI - A).
pub fn scale_newton(a: &QMatrix, ctx: &PContext) -> Result<i64> {
    check_invertible(a)?;
    Ok(polygon_of(a, ctx).expansion_exponent())
}

/// Iteration bound for the tidying loop.
pub fn default_cap(a: &QMatrix, ctx: &PContext) -> Result<usize> {
    check_invertible(a)?;
    let p = ctx.p();
    let excursion = polygon_of(a, ctx).max_excursion();
    // the standard lattice can sit far from the eigen-decomposition when the
    // entries carry large powers of p, so widen the bound by their spread
    let inv = a.inverse()?;
    let spread = a
        .entries()
        .iter()
        .chain(inv.entries())
        .filter_map(|x| x.vp(p).finite())
        .map(i64::abs)
        .max()
        .unwrap_or(0);
    Ok(a.n() * (1 + excursion as usize + spread as usize) * 4)
}

/// [α(L) : α(L) ∩ L] as a p-exponent.
pub fn displacement(a: &QMatrix, l: &Lattice) -> Result<i64> {
    let image = l.apply(a)?;
    let meet = image.intersect(l)?;
    image.index(&meet)
}

pub fn scale_tidy(a: &QMatrix, ctx: &PContext, l0: &Lattice, cap: usize) -> Result<ScaleReport> {
    let target = scale_newton(a, ctx)?;
    if l0.n() != a.n() {
        return Err(Error::DimensionMismatch("initial lattice dimension".into()));
    }
    let mut l = l0.clone();
    let mut trace = Vec::new();
    for k in 0..=cap {
        let e = displacement(a, &l)?;
        trace.push((k, e));
        if e < target {
            return Err(Error::InvariantViolation(format!(
                "displacement p^{e} below the Newton scale p^{target}"
            )));
        }
        if e == target {
            return Ok(ScaleReport {
                scale_exponent: target,
                minimizing_lattice: l,
                iteration_trace: trace,
                method_agreement: true,
            });
        }
        l = l.intersect(&l.apply(a)?)?;
    }
    Err(Error::CapExceeded { cap, trace })
}

/// `scale_tidy` from the standard lattice with the default cap.
pub fn scale_tidy_default(a: &QMatrix, ctx: &PContext) -> Result<ScaleReport> {
    let cap = default_cap(a, ctx)?;
    scale_tidy(a, ctx, &Lattice::standard(ctx, a.n()), cap)
}

/// An α-invariant lattice, when s(α) = s(α^{-1}) = 1.
///
/// Saturates the standard lattice under α and α^{-1}; this terminates
/// because every eigenvalue is a p-adic unit.
pub fn invariant_lattice(a: &QMatrix, ctx: &PContext) -> Result<Option<Lattice>> {
    let inv = {
        check_invertible(a)?;
        a.inverse()?
    };
    if scale_newton(a, ctx)? != 0 || scale_newton(&inv, ctx)? != 0 {
        return Ok(None);
    }
    let cap = default_cap(a, ctx)? * 4;
    let mut l = Lattice::standard(ctx, a.n());
    for _ in 0..=cap {
        let next = l.sum(&l.apply(a)?)?.sum(&l.apply(&inv)?)?;
        if next == l {
            return Ok(Some(l));
        }
        l = next;
    }
    Err(Error::InvariantViolation(format!(
        "saturation of a unit-eigenvalue matrix did not stabilize within {cap} rounds"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[&str]]) -> QMatrix {
        QMatrix::parse_rows(rows)
    }

    fn ctx(p: u64) -> PContext {
        PContext::new(p, 8).unwrap()
    }

    #[test]
    fn newton_examples() {
        let c = ctx(3);
        assert_eq!(scale_newton(&QMatrix::identity(2), &c).unwrap(), 0);
        assert_eq!(scale_newton(&m(&[&["1/3", "0"], &["0", "1"]]), &c).unwrap(), 1);
        let a = m(&[&["0", "3"], &["1", "0"]]);
        assert_eq!(scale_newton(&a.inverse().unwrap(), &c).unwrap(), 1);
        assert_eq!(scale_newton(&a, &c).unwrap(), 0);
        assert_eq!(scale_newton(&m(&[&["1", "1"], &["1", "1"]]), &c), Err(Error::Singular));
    }

    #[test]
    fn tidy_examples() {
        let c = ctx(3);
        let z = Lattice::standard(&c, 2);
        let r = scale_tidy(&QMatrix::identity(2), &c, &z, 8).unwrap();
        assert_eq!((r.scale_exponent, r.iterations()), (0, 0));
        assert_eq!(r.minimizing_lattice, z);

        let r = scale_tidy(&m(&[&["1/3", "0"], &["0", "1"]]), &c, &z, 8).unwrap();
        assert_eq!((r.scale_exponent, r.iterations()), (1, 0));

        let a = m(&[&["0", "3"], &["1", "0"]]).inverse().unwrap();
        assert_eq!(z.apply(&a).unwrap(), Lattice::diagonal(&c, &[0, -1]));
        let r = scale_tidy(&a, &c, &z, 8).unwrap();
        assert_eq!(r.iteration_trace, vec![(0, 1)]);
    }

    #[test]
    fn tidy_needs_iterations_for_sheared_start() {
        let c = ctx(3);
        let a = m(&[&["1", "1/3"], &["0", "1"]]);
        let r = scale_tidy_default(&a, &c).unwrap();
        assert_eq!(r.iteration_trace, vec![(0, 1), (1, 0)]);
        assert_eq!(r.minimizing_lattice, Lattice::diagonal(&c, &[0, 1]));
    }

    #[test]
    fn cap_exceeded_reports_trace() {
        let c = ctx(3);
        let a = m(&[&["1", "1/27"], &["0", "1"]]);
        match scale_tidy(&a, &c, &Lattice::standard(&c, 2), 0) {
            Err(Error::CapExceeded { cap: 0, trace }) => assert_eq!(trace, vec![(0, 3)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invariant_lattice_examples() {
        let c = ctx(3);
        let unip = m(&[&["1", "1"], &["0", "1"]]);
        assert_eq!(invariant_lattice(&unip, &c).unwrap(), Some(Lattice::standard(&c, 2)));
        assert_eq!(invariant_lattice(&m(&[&["1/3", "0"], &["0", "1"]]), &c).unwrap(), None);
        let shear = m(&[&["1", "1/3"], &["0", "1"]]);
        let l = invariant_lattice(&shear, &c).unwrap().unwrap();
        assert_eq!(l, Lattice::diagonal(&c, &[-1, 0]));
        assert_eq!(l.apply(&shear).unwrap(), l);
    }
}
