//! Type-R tests, bounded orbits and flags with bounded quotient actions for
//! finitely generated subgroups of GL(n, Q_p).

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{adapted_basis, Lattice, LatticeFile};
use crate::matrix::QMatrix;
use crate::qp::PContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub rounds: usize,
    pub divisor_threshold: i64,
    pub word_len: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { rounds: 64, divisor_threshold: 32, word_len: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    ctx: PContext,
    n: usize,
    gens: Vec<QMatrix>,
    inverses: Vec<QMatrix>,
}

impl GeneratorSet {
    pub fn new(ctx: &PContext, gens: Vec<QMatrix>) -> Result<Self> {
        let n = gens.first().ok_or_else(|| Error::Input("empty generator list".into()))?.rows();
        let mut inverses = Vec::with_capacity(gens.len());
        for g in &gens {
            if !g.is_square() || g.rows() != n {
                return Err(Error::DimensionMismatch(format!("generators must all be {n}x{n}")));
            }
            inverses.push(g.inverse()?);
        }
        Ok(GeneratorSet { ctx: *ctx, n, gens, inverses })
    }

    pub fn ctx(&self) -> &PContext {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[QMatrix] {
        &self.gens
    }

    pub fn inverses(&self) -> &[QMatrix] {
        &self.inverses
    }

    /// Generators followed by their inverses.
    fn both(&self) -> impl Iterator<Item = &QMatrix> {
        self.gens.iter().chain(&self.inverses)
    }

    /// Letter ±(i+1) stands for g_i^{±1}.
    pub fn letter(&self, l: i64) -> &QMatrix {
        let i = (l.unsigned_abs() - 1) as usize;
        if l > 0 {
            &self.gens[i]
        } else {
            &self.inverses[i]
        }
    }

    pub fn evaluate(&self, word: &[i64]) -> QMatrix {
        word.iter().fold(QMatrix::identity(self.n), |acc, &l| acc.mul(self.letter(l)))
    }

    /// The induced action on span(basis[.., range]) modulo span(basis[.., ..range.start]),
    /// given a basis whose leading columns span an invariant subspace.
    fn conjugated(&self, basis: &QMatrix) -> Result<Vec<QMatrix>> {
        let inv = basis.inverse()?;
        Ok(self.gens.iter().map(|g| inv.mul(g).mul(basis)).collect())
    }
}

/// All eigenvalues are p-adic units: the characteristic polynomial is
/// p-integral with unit constant term.
pub fn type_r_matrix(a: &QMatrix, ctx: &PContext) -> Result<bool> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("type R test of a non-square matrix".into()));
    }
    let det = a.det();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let p = ctx.p();
    Ok(det.vp(p).finite() == Some(0) && a.char_poly().iter().all(|c| c.is_p_integral(p)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TypeRSample {
    Ok { words_checked: usize },
    Witness(Vec<i64>),
}

/// Checks every reduced word of length 1..=word_len, shortest first and in
/// alphabet order g_1, g_1^{-1}, g_2, …; returns the first non-type-R word.
pub fn type_r_witness_search(g: &GeneratorSet, word_len: usize) -> Result<TypeRSample> {
    let alphabet: Vec<i64> = (1..=g.gens.len() as i64).flat_map(|i| [i, -i]).collect();
    let mut queue: VecDeque<(Vec<i64>, QMatrix)> = VecDeque::from([(Vec::new(), QMatrix::identity(g.n))]);
    let mut checked = 0;
    while let Some((word, value)) = queue.pop_front() {
        if word.len() == word_len {
            continue;
        }
        for &l in &alphabet {
            if word.last() == Some(&-l) {
                continue;
            }
            let next = value.mul(g.letter(l));
            let mut w = word.clone();
            w.push(l);
            checked += 1;
            if !type_r_matrix(&next, &g.ctx)? {
                return Ok(TypeRSample::Witness(w));
            }
            queue.push_back((w, next));
        }
    }
    Ok(TypeRSample::Ok { words_checked: checked })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundednessResult {
    /// Every generator maps the lattice onto itself.
    Bounded { lattice: Lattice, rounds: usize },
    /// Evidence only: the smallest elementary divisor of the saturation
    /// against Z_p^n, per round.
    Unbounded { divisor_trace: Vec<i64>, rounds: usize },
    Inconclusive { rounds: usize, divisor_threshold: i64, divisor_trace: Vec<i64> },
}

impl BoundednessResult {
    pub fn lattice(&self) -> Option<&Lattice> {
        match self {
            BoundednessResult::Bounded { lattice, .. } => Some(lattice),
            _ => None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.lattice().is_some()
    }
}

impl Serialize for BoundednessResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(tag = "verdict")]
        enum Repr<'a> {
            Bounded { lattice: LatticeFile, rounds: usize },
            Unbounded { divisor_trace: &'a [i64], rounds: usize, evidence_only: bool },
            Inconclusive { rounds: usize, divisor_threshold: i64, divisor_trace: &'a [i64] },
        }
        match self {
            BoundednessResult::Bounded { lattice, rounds } => {
                Repr::Bounded { lattice: lattice.into(), rounds: *rounds }
            }
            BoundednessResult::Unbounded { divisor_trace, rounds } => {
                Repr::Unbounded { divisor_trace, rounds: *rounds, evidence_only: true }
            }
            BoundednessResult::Inconclusive { rounds, divisor_threshold, divisor_trace } => Repr::Inconclusive {
                rounds: *rounds,
                divisor_threshold: *divisor_threshold,
                divisor_trace,
            },
        }
        .serialize(s)
    }
}

fn is_invariant(g: &GeneratorSet, l: &Lattice) -> Result<bool> {
    for a in g.both() {
        if l.apply(a)? != *l {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Increasing saturation L_{k+1} = L_k + Σ g(L_k) + Σ g^{-1}(L_k) from Z_p^n.
pub fn bounded_group(g: &GeneratorSet, caps: &Caps) -> Result<BoundednessResult> {
    let l0 = Lattice::standard(&g.ctx, g.n);
    let mut l = l0.clone();
    let mut trace = Vec::new();
    for round in 0..caps.rounds {
        let mut next = l.clone();
        for a in g.both() {
            next = next.sum(&l.apply(a)?)?;
        }
        if next == l {
            if !is_invariant(g, &l)? {
                return Err(Error::InvariantViolation("stationary saturation is not invariant".into()));
            }
            return Ok(BoundednessResult::Bounded { lattice: l, rounds: round });
        }
        l = next;
        let least = l.elementary_divisors(&l0)?[0];
        trace.push(least);
        let t = trace.len();
        if least < -caps.divisor_threshold && t >= 4 && (t - 3..t).all(|i| trace[i] < trace[i - 1]) {
            return Ok(BoundednessResult::Unbounded { divisor_trace: trace, rounds: round + 1 });
        }
    }
    Ok(BoundednessResult::Inconclusive {
        rounds: caps.rounds,
        divisor_threshold: caps.divisor_threshold,
        divisor_trace: trace,
    })
}

/// Conjugated generators, one per input generator, in flag coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlagCertificate {
    pub conjugated: Vec<QMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagDecomposition {
    /// Columns d_{i-1}..d_i span a complement of V_{i-1} in V_i.
    pub flag_basis: QMatrix,
    pub dims: Vec<usize>,
    /// Invariant lattice of the i-th quotient, in flag coordinates.
    pub quotient_lattices: Vec<Lattice>,
    pub certificate: FlagCertificate,
}

impl FlagDecomposition {
    pub fn steps(&self) -> usize {
        self.dims.len() - 1
    }

    /// V_i as a column basis.
    pub fn subspace(&self, i: usize) -> QMatrix {
        self.flag_basis.block(0..self.flag_basis.rows(), 0..self.dims[i])
    }

    /// Re-checks block triangularity and quotient lattice invariance exactly.
    pub fn verify(&self, g: &GeneratorSet) -> Result<()> {
        let fail = |msg: String| Err(Error::InvariantViolation(msg));
        let n = g.n;
        if self.dims.first() != Some(&0) || self.dims.last() != Some(&n) || self.dims.windows(2).any(|w| w[0] >= w[1]) {
            return fail(format!("bad flag dimensions {:?}", self.dims));
        }
        if self.quotient_lattices.len() != self.steps() {
            return fail("one lattice per quotient expected".into());
        }
        let conj = g.conjugated(&self.flag_basis)?;
        if conj != self.certificate.conjugated {
            return fail("certificate does not match the generators".into());
        }
        for (gi, c) in conj.iter().enumerate() {
            for (bi, w) in self.dims.windows(2).enumerate() {
                if !c.block(w[1]..n, w[0]..w[1]).is_zero() {
                    return fail(format!("generator {gi} is not block upper triangular at cut {}", w[1]));
                }
                let d = c.block(w[0]..w[1], w[0]..w[1]);
                let l = &self.quotient_lattices[bi];
                if l.apply(&d)? != *l {
                    return fail(format!("generator {gi} moves the lattice of quotient {bi}"));
                }
            }
        }
        Ok(())
    }
}

impl Serialize for FlagDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            flag_basis: &'a QMatrix,
            dims: &'a [usize],
            quotient_lattices: Vec<LatticeFile>,
            certificate: &'a FlagCertificate,
        }
        Repr {
            flag_basis: &self.flag_basis,
            dims: &self.dims,
            quotient_lattices: self.quotient_lattices.iter().map(LatticeFile::from).collect(),
            certificate: &self.certificate,
        }
        .serialize(s)
    }
}

/// A flag 0 = V_0 ⊂ … ⊂ V_m = Q_p^n of G-invariant subspaces on whose
/// successive quotients G acts with bounded orbits.
///
/// Candidates for V_1 come from the stable directions of the decreasing
/// saturation ∩_w w(Z_p^n) and from the common fixed space; a candidate is
/// accepted only after exact invariance and boundedness checks, and the
/// whole flag is verified before it is returned.
pub fn ku_flag(g: &GeneratorSet, caps: &Caps) -> Result<FlagDecomposition> {
    if let TypeRSample::Witness(word) = type_r_witness_search(g, caps.word_len)? {
        return Err(Error::NotTypeR { word });
    }
    let (basis, dims, lattices) = flag_rec(g, caps)?;
    let flag = FlagDecomposition {
        certificate: FlagCertificate { conjugated: g.conjugated(&basis)? },
        flag_basis: basis,
        dims,
        quotient_lattices: lattices,
    };
    flag.verify(g)?;
    Ok(flag)
}

fn flag_rec(g: &GeneratorSet, caps: &Caps) -> Result<(QMatrix, Vec<usize>, Vec<Lattice>)> {
    let n = g.n;
    if let BoundednessResult::Bounded { lattice, .. } = bounded_group(g, caps)? {
        return Ok((QMatrix::identity(n), vec![0, n], vec![lattice]));
    }
    for cand in v1_candidates(g, caps)? {
        let d = cand.cols();
        let basis = cand.complete_basis();
        let conj = g.conjugated(&basis)?;
        if conj.iter().any(|c| !c.block(d..n, 0..d).is_zero()) {
            continue;
        }
        let sub = GeneratorSet::new(&g.ctx, conj.iter().map(|c| c.block(0..d, 0..d)).collect())?;
        let Some(l1) = bounded_group(&sub, caps)?.lattice().cloned() else {
            continue;
        };
        let quot = GeneratorSet::new(&g.ctx, conj.iter().map(|c| c.block(d..n, d..n)).collect())?;
        let (qb, qdims, qlats) = flag_rec(&quot, caps)?;
        let lift = embed_block(n, d, &qb);
        let mut dims = vec![0];
        dims.extend(qdims.iter().map(|&x| x + d));
        let mut lattices = vec![l1];
        lattices.extend(qlats);
        return Ok((basis.mul(&lift), dims, lattices));
    }
    Err(Error::Inconclusive(format!(
        "no bounded invariant subspace found in dimension {n} within {} rounds",
        caps.rounds
    )))
}

/// I_n with `b` placed on the diagonal at `offset`.
fn embed_block(n: usize, offset: usize, b: &QMatrix) -> QMatrix {
    let mut out = QMatrix::identity(n);
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            out[(offset + i, offset + j)] = b[(i, j)].clone();
        }
    }
    out
}

/// Splits every quotient of `flag` along common fixed vectors of its
/// diagonal block, as long as the pieces stay bounded. The result is still a
/// certified flag, usually with more steps; a bounded group can come back
/// from `ku_flag` as a single block and be refined here.
pub fn refine_flag(g: &GeneratorSet, flag: &FlagDecomposition, caps: &Caps) -> Result<FlagDecomposition> {
    let n = g.n;
    let mut basis = flag.flag_basis.clone();
    let mut dims = vec![0];
    let mut lattices = Vec::new();
    for (i, w) in flag.dims.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        let block = GeneratorSet::new(
            &g.ctx,
            flag.certificate.conjugated.iter().map(|c| c.block(lo..hi, lo..hi)).collect(),
        )?;
        match split_fixed(&block, caps)? {
            Some((b, bdims, blats)) => {
                basis = basis.mul(&embed_block(n, lo, &b));
                dims.extend(bdims[1..].iter().map(|&x| x + lo));
                lattices.extend(blats);
            }
            None => {
                dims.push(hi);
                lattices.push(flag.quotient_lattices[i].clone());
            }
        }
    }
    let refined = FlagDecomposition {
        certificate: FlagCertificate { conjugated: g.conjugated(&basis)? },
        flag_basis: basis,
        dims,
        quotient_lattices: lattices,
    };
    refined.verify(g)?;
    Ok(refined)
}

/// Fixed vectors first, then the rest recursively; None when the fixed
/// space is 0 or everything.
fn split_fixed(g: &GeneratorSet, caps: &Caps) -> Result<Option<(QMatrix, Vec<usize>, Vec<Lattice>)>> {
    let n = g.n;
    let fixed = common_fixed_space(g);
    let d = fixed.cols();
    if d == 0 || d == n {
        return Ok(None);
    }
    let basis = fixed.complete_basis();
    let conj = g.conjugated(&basis)?;
    let quot = GeneratorSet::new(&g.ctx, conj.iter().map(|c| c.block(d..n, d..n)).collect())?;
    let (qb, qdims, qlats) = match split_fixed(&quot, caps)? {
        Some(split) => split,
        None => match bounded_group(&quot, caps)? {
            BoundednessResult::Bounded { lattice, .. } => (QMatrix::identity(n - d), vec![0, n - d], vec![lattice]),
            _ => return Ok(None),
        },
    };
    let mut dims = vec![0];
    dims.extend(qdims.iter().map(|&x| x + d));
    let mut lattices = vec![Lattice::standard(&g.ctx, d)];
    lattices.extend(qlats);
    Ok(Some((basis.mul(&embed_block(n, d, &qb)), dims, lattices)))
}

/// Smallest subspace containing the columns of `w` and stable under G.
fn invariant_closure(g: &GeneratorSet, w: &QMatrix) -> QMatrix {
    let mut cur = w.column_space();
    loop {
        let mut stack = cur.clone();
        for a in g.both() {
            stack = stack.hcat(&a.mul(&cur));
        }
        let next = stack.column_space();
        if next.cols() == cur.cols() {
            return cur;
        }
        cur = next;
    }
}

fn v1_candidates(g: &GeneratorSet, caps: &Caps) -> Result<Vec<QMatrix>> {
    let n = g.n;
    let l0 = Lattice::standard(&g.ctx, n);
    let mut l = l0.clone();
    let mut history: Vec<Vec<i64>> = Vec::new();
    let mut directions = QMatrix::identity(n);
    for _ in 0..caps.rounds {
        let mut next = l.clone();
        for a in g.both() {
            next = next.intersect(&l.apply(a)?)?;
        }
        let (exps, basis) = adapted_basis(&l0, &next)?;
        directions = basis;
        history.push(exps);
        if next == l || *history.last().unwrap().last().unwrap() > caps.divisor_threshold {
            break;
        }
        l = next;
    }
    let stable = match (history.last(), history.get(history.len().saturating_sub(4))) {
        (Some(last), Some(earlier)) => last.iter().zip(earlier).take_while(|(a, b)| a == b).count(),
        _ => 0,
    };

    let mut prefixes: Vec<usize> = Vec::new();
    if (1..n).contains(&stable) {
        prefixes.push(stable);
    }
    prefixes.extend((1..n).filter(|&s| s != stable));

    let mut out: Vec<QMatrix> = Vec::new();
    let mut push = |c: QMatrix| {
        if (1..n).contains(&c.cols()) && !out.iter().any(|o| same_span(o, &c)) {
            out.push(c);
        }
    };
    if let Some(&s) = prefixes.first() {
        push(invariant_closure(g, &directions.block(0..n, 0..s)));
    }
    let fixed = common_fixed_space(g);
    if fixed.cols() > 0 {
        push(fixed);
    }
    for &s in prefixes.iter().skip(1) {
        push(invariant_closure(g, &directions.block(0..n, 0..s)));
    }
    Ok(out)
}

/// ∩_g ker(g - I) as a column basis.
fn common_fixed_space(g: &GeneratorSet) -> QMatrix {
    let id = QMatrix::identity(g.n);
    let stack = g.gens.iter().fold(QMatrix::zeros(g.n, 0), |acc, a| acc.hcat(&a.sub(&id).transpose()));
    stack.transpose().null_space()
}

fn same_span(a: &QMatrix, b: &QMatrix) -> bool {
    a.cols() == b.cols() && a.hcat(b).rank() == a.cols()
}

pub fn parse_gens(ctx: &PContext, gens: &[&[&[&str]]]) -> Result<GeneratorSet> {
    GeneratorSet::new(ctx, gens.iter().map(|g| QMatrix::parse_rows(g)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PContext {
        PContext::new(p, 8).unwrap()
    }

    fn m(rows: &[&[&str]]) -> QMatrix {
        QMatrix::parse_rows(rows)
    }

    use crate::qp::ExactScalar;

    #[test]
    fn type_r_examples() {
        let c = ctx(3);
        assert!(type_r_matrix(&m(&[&["1", "1"], &["0", "1"]]), &c).unwrap());
        assert!(!type_r_matrix(&m(&[&["1/3", "0"], &["0", "1"]]), &c).unwrap());
        assert!(type_r_matrix(&m(&[&["0", "-1"], &["1", "0"]]), &c).unwrap());
        assert_eq!(type_r_matrix(&m(&[&["1", "2"], &["2", "4"]]), &c), Err(Error::Singular));
    }

    #[test]
    fn witness_search_examples() {
        let c = ctx(3);
        let u = parse_gens(&c, &[&[&["1", "1"], &["0", "1"]]]).unwrap();
        assert!(matches!(type_r_witness_search(&u, 3).unwrap(), TypeRSample::Ok { .. }));
        let g = parse_gens(&c, &[&[&["1", "1"], &["0", "1"]], &[&["1", "0"], &["1/3", "1"]]]).unwrap();
        assert_eq!(type_r_witness_search(&g, 2).unwrap(), TypeRSample::Witness(vec![1, 2]));
        let id = GeneratorSet::new(&c, vec![QMatrix::identity(2)]).unwrap();
        assert!(matches!(type_r_witness_search(&id, 5).unwrap(), TypeRSample::Ok { .. }));
    }

    #[test]
    fn bounded_examples() {
        let c = ctx(3);
        let caps = Caps::default();
        let g = parse_gens(&c, &[&[&["1", "1"], &["0", "1"]], &[&["0", "-1"], &["1", "0"]]]).unwrap();
        assert_eq!(bounded_group(&g, &caps).unwrap().lattice(), Some(&Lattice::standard(&c, 2)));
        let id = GeneratorSet::new(&c, vec![QMatrix::identity(2)]).unwrap();
        assert_eq!(bounded_group(&id, &caps).unwrap().lattice(), Some(&Lattice::standard(&c, 2)));

        // 1 and 1/3 generate the bounded group 3^{-1}Z inside Q_3
        let g = parse_gens(&c, &[&[&["1", "1"], &["0", "1"]], &[&["1", "1/3"], &["0", "1"]]]).unwrap();
        assert_eq!(bounded_group(&g, &caps).unwrap().lattice(), Some(&Lattice::diagonal(&c, &[-1, 0])));

        let g = parse_gens(&c, &[&[&["1/3", "0"], &["0", "1"]]]).unwrap();
        match bounded_group(&g, &caps).unwrap() {
            BoundednessResult::Unbounded { divisor_trace, .. } => {
                let want: Vec<i64> = (1..=divisor_trace.len() as i64).map(|k| -k).collect();
                assert_eq!(divisor_trace, want);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flag_worked_example() {
        let c = ctx(3);
        let g = parse_gens(&c, &[&[&["1", "1"], &["0", "1"]], &[&["1", "1/3"], &["0", "1"]]]).unwrap();
        let caps = Caps::default();
        let coarse = ku_flag(&g, &caps).unwrap();
        assert_eq!(coarse.dims, vec![0, 2]);
        let f = refine_flag(&g, &coarse, &caps).unwrap();
        assert_eq!(f.dims, vec![0, 1, 2]);
        assert_eq!(f.subspace(1).rank(), 1);
        assert_eq!(f.subspace(1)[(1, 0)], ExactScalar::zero());
        assert!(f.quotient_lattices.iter().all(|l| l.n() == 1));
        assert_eq!(f.quotient_lattices, vec![Lattice::standard(&c, 1); 2]);
        for m in &f.certificate.conjugated {
            assert!(m[(0, 0)].is_one() && m[(1, 1)].is_one());
        }
    }

    #[test]
    fn flag_from_decreasing_saturation() {
        // one round is too few to see the group is bounded, so the flag has
        // to come from the candidate search
        let c = ctx(3);
        let g = parse_gens(&c, &[&[&["1", "1"], &["0", "1"]], &[&["1", "1/3"], &["0", "1"]]]).unwrap();
        let caps = Caps { rounds: 1, ..Caps::default() };
        assert!(matches!(bounded_group(&g, &caps).unwrap(), BoundednessResult::Inconclusive { .. }));
        let f = ku_flag(&g, &caps).unwrap();
        assert_eq!(f.dims, vec![0, 1, 2]);
        assert_eq!(f.subspace(1)[(1, 0)], ExactScalar::zero());

        let caps = Caps { rounds: 0, ..Caps::default() };
        assert!(matches!(ku_flag(&g, &caps), Err(Error::Inconclusive(_))));
    }

    #[test]
    fn flag_bounded_inputs() {
        let c = ctx(3);
        let g = parse_gens(&c, &[&[&["2", "0"], &["0", "1/2"]]]).unwrap();
        let f = ku_flag(&g, &Caps::default()).unwrap();
        assert_eq!(f.dims, vec![0, 2]);
        let g = parse_gens(&c, &[&[&["1", "0"], &["0", "1/3"]]]).unwrap();
        assert!(matches!(ku_flag(&g, &Caps::default()), Err(Error::NotTypeR { .. })));
    }
}
