//! Constructive k-th roots.
//!
//! Unipotent rational matrices have exact unique unipotent roots through the
//! nilpotent logarithm. In compact groups roots are computed at residue
//! precision by lifting through the congruence filtration: the kernel of
//! GL(n, Z/p^{j+1}) → GL(n, Z/p^j) is elementary abelian, and with
//! X' = X (I + p^j Y) one has
//!
//! ```text
//! X'^k ≡ X^k (I + p^j Σ_{i<k} Ad(X^{-1})^i (Y))   (mod p^{j+1}),
//! ```
//!
//! so each level is a linear problem over F_p.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::modular::{solve_fp, PadicApproxMatrix};
use crate::qp::{
    add_mod, inv_mod, mul_mod, pow_mod, residue_modulus, residue_vp, ExactScalar, PContext,
    ResidueScalar,
};

/// Outcome of a root search. `Found` values have been re-verified by powering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RootResult<T> {
    Found(T),
    Obstructed(String),
    NoRoot { level: u32 },
}

impl<T> RootResult<T> {
    pub fn found(self) -> Option<T> {
        match self {
            RootResult::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, RootResult::Found(_))
    }
}

fn check_k(k: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::Input("k must be a positive integer".into()));
    }
    Ok(())
}

/// log(u) = Σ_{j=1}^{n-1} (-1)^{j+1} (u - I)^j / j for unipotent u.
pub fn nilpotent_log(u: &QMatrix) -> Result<QMatrix> {
    if !u.is_unipotent() {
        return Err(Error::NotUnipotent);
    }
    let n = u.n();
    let nil = u.sub(&QMatrix::identity(n));
    let mut out = QMatrix::zeros(n, n);
    let mut power = nil.clone();
    for j in 1..n.max(1) {
        let sign = if j % 2 == 1 { 1 } else { -1 };
        out = out.add(&power.scale(&ExactScalar::new(sign, j as i64)));
        power = power.mul(&nil);
    }
    Ok(out)
}

/// exp(N) = Σ_{j<n} N^j / j! for nilpotent N.
pub fn nilpotent_exp(nil: &QMatrix) -> QMatrix {
    let n = nil.n();
    let mut out = QMatrix::identity(n);
    let mut term = QMatrix::identity(n);
    for j in 1..n {
        term = term.mul(nil).scale(&ExactScalar::new(1, j as i64));
        out = out.add(&term);
    }
    debug_assert!(term.mul(nil).is_zero() || n == 0);
    out
}

/// The unique unipotent k-th root exp(log(u)/k).
pub fn unipotent_root(u: &QMatrix, k: u64) -> Result<RootResult<QMatrix>> {
    check_k(k)?;
    let log = nilpotent_log(u)?;
    let root = nilpotent_exp(&log.scale(&ExactScalar::new(1, k as i64)));
    if root.pow(k as i64)? != *u {
        return Err(Error::InvariantViolation(format!("unipotent root of {u} fails to power back")));
    }
    Ok(RootResult::Found(root))
}

/// Σ_{i<k} Ad(X^{-1})^i as an n²×n² matrix over F_p acting on row-major Y.
fn lifting_operator(x_inv_mod_p: &[Vec<u64>], x_mod_p: &[Vec<u64>], k: u64, p: u64) -> Vec<Vec<u64>> {
    let n = x_mod_p.len();
    let dim = n * n;
    // ad[(a,b)][(c,d)] = coefficient of Y_cd in (X^{-1} Y X)_ab = Xinv[a][c] X[d][b]
    let mut ad = vec![vec![0u64; dim]; dim];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    ad[a * n + b][c * n + d] = mul_mod(x_inv_mod_p[a][c], x_mod_p[d][b], p);
                }
            }
        }
    }
    let mut total = vec![vec![0u64; dim]; dim];
    let mut power: Vec<Vec<u64>> = (0..dim).map(|i| (0..dim).map(|j| u64::from(i == j)).collect()).collect();
    // Ad(X^{-1}) has finite order dividing |GL(n², F_p)|; the sum is periodic
    for _ in 0..k {
        for i in 0..dim {
            for j in 0..dim {
                total[i][j] = add_mod(total[i][j], power[i][j], p);
            }
        }
        let mut next = vec![vec![0u64; dim]; dim];
        for i in 0..dim {
            for l in 0..dim {
                if power[i][l] == 0 {
                    continue;
                }
                for j in 0..dim {
                    next[i][j] = add_mod(next[i][j], mul_mod(power[i][l], ad[l][j], p), p);
                }
            }
        }
        power = next;
    }
    total
}

/// Defect E with X^{-k} A ≡ I + p^j E (mod p^{j+1}), as a row-major vector mod p.
/// Requires X^k ≡ A (mod p^j).
fn defect(x: &PadicApproxMatrix, a: &PadicApproxMatrix, k: u64, j: u32) -> Result<Vec<u64>> {
    let p = x.p();
    let d = x.pow(k).inverse().ok_or(Error::Singular)?.mul(a);
    let pj = p.pow(j);
    let n = x.n();
    let mut e = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let entry = d.get(r, c);
            let diff = (entry as i128 - i128::from(r == c)).rem_euclid(d.modulus() as i128) as u64;
            if diff % pj != 0 {
                return Err(Error::InvariantViolation(format!(
                    "lifting invariant X^k ≡ A mod p^{j} lost"
                )));
            }
            e.push((diff / pj) % p);
        }
    }
    Ok(e)
}

/// X (I + p^j Y) at the working level of X.
fn apply_lift(x: &PadicApproxMatrix, y: &[u64], j: u32) -> PadicApproxMatrix {
    let n = x.n();
    let pj = x.p().pow(j);
    let mut step = PadicApproxMatrix::identity(x.p(), x.level(), n).expect("level fits");
    let data: Vec<u64> = step
        .data()
        .iter()
        .zip(y)
        .map(|(&s, &yv)| add_mod(s, mul_mod(yv, pj, x.modulus()), x.modulus()))
        .collect();
    step = PadicApproxMatrix::new(x.p(), x.level(), n, data).expect("same shape");
    x.mul(&step)
}

fn mod_p_rows(x: &PadicApproxMatrix) -> Vec<Vec<u64>> {
    x.to_rows().into_iter().map(|r| r.into_iter().map(|v| v % x.p()).collect()).collect()
}

/// k-th root in the congruence subgroup 1 + pM (1 + 4M for p = 2), gcd(k, p) = 1.
pub fn congruence_root(a: &PadicApproxMatrix, k: u64) -> Result<RootResult<PadicApproxMatrix>> {
    check_k(k)?;
    let p = a.p();
    if k % p == 0 {
        return Err(Error::PDividesK);
    }
    let start = if p == 2 { 2 } else { 1 };
    if !a.is_congruent_to_identity(start) || a.level() < start {
        return Err(Error::BadDomain(format!("expected A ≡ I mod {}", p.pow(start))));
    }
    let kinv = inv_mod(k % p, p).expect("k coprime to p");
    let mut x = PadicApproxMatrix::identity(p, a.level(), a.n())?;
    for j in start..a.level() {
        let e = defect(&x, a, k, j)?;
        // X ≡ I mod p, so the lifting operator is k·Id
        let y: Vec<u64> = e.iter().map(|&v| mul_mod(v, kinv, p)).collect();
        x = apply_lift(&x, &y, j);
    }
    if x.pow(k) != *a {
        return Err(Error::InvariantViolation("congruence root fails to power back".into()));
    }
    Ok(RootResult::Found(x))
}

/// All X in GL(n, F_p), in lexicographic row-major order, with X^k ≡ A (mod p).
fn roots_mod_p(a: &PadicApproxMatrix, k: u64) -> Result<Vec<PadicApproxMatrix>> {
    let p = a.p();
    let n = a.n();
    let target = a.reduce(1)?;
    let total = p
        .checked_pow((n * n) as u32)
        .ok_or_else(|| Error::Input("mod-p search space too large".into()))?;
    let mut out = Vec::new();
    let mut digits = vec![0u64; n * n];
    for idx in 0..total {
        let mut t = idx;
        for d in digits.iter_mut().rev() {
            *d = t % p;
            t /= p;
        }
        let x = PadicApproxMatrix::new(p, 1, n, digits.clone())?;
        if x.is_invertible() && x.pow(k) == target {
            out.push(x);
        }
    }
    Ok(out)
}

/// Node budget for the branch search.
const BRANCH_BUDGET: usize = 1 << 20;

struct BranchSearch<'a> {
    a: &'a PadicApproxMatrix,
    k: u64,
    collect_all: bool,
    found: Vec<PadicApproxMatrix>,
    deepest: u32,
    nodes: usize,
}

impl BranchSearch<'_> {
    /// x is a root mod p^j (stored at the full level); returns true to stop.
    fn descend(&mut self, x: PadicApproxMatrix, j: u32) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > BRANCH_BUDGET {
            return Ok(true);
        }
        self.deepest = self.deepest.max(j);
        let m = self.a.level();
        if j == m {
            self.found.push(x);
            return Ok(!self.collect_all);
        }
        let p = self.a.p();
        let x_p = mod_p_rows(&x);
        let xinv_p = mod_p_rows(&x.inverse().ok_or(Error::Singular)?);
        let op = lifting_operator(&xinv_p, &x_p, self.k, p);
        let e = defect(&x, self.a, self.k, j)?;
        let Some((y0, kernel)) = solve_fp(&op, &e, p) else {
            return Ok(false);
        };
        let count = p.checked_pow(kernel.len() as u32).unwrap_or(u64::MAX);
        for idx in 0..count {
            let mut y = y0.clone();
            let mut t = idx;
            for kv in kernel.iter().rev() {
                let c = t % p;
                t /= p;
                for (yi, ki) in y.iter_mut().zip(kv) {
                    *yi = add_mod(*yi, mul_mod(c, *ki, p), p);
                }
            }
            if self.descend(apply_lift(&x, &y, j), j + 1)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn branch_search(a: &PadicApproxMatrix, k: u64, collect_all: bool) -> Result<(Vec<PadicApproxMatrix>, u32, bool)> {
    check_k(k)?;
    if !a.is_invertible() {
        return Err(Error::BadDomain("matrix is not invertible mod p".into()));
    }
    let mut search = BranchSearch { a, k, collect_all, found: Vec::new(), deepest: 0, nodes: 0 };
    for x in roots_mod_p(a, k)? {
        let x = x.lift(a.level())?;
        if search.descend(x, 1)? {
            break;
        }
    }
    let exhausted = search.nodes > BRANCH_BUDGET;
    for r in &search.found {
        if r.pow(k) != *a {
            return Err(Error::InvariantViolation("finite root fails to power back".into()));
        }
    }
    Ok((search.found, search.deepest, exhausted))
}

/// A k-th root of A in GL(n, Z/p^m), searching every mod-p root and every
/// lifting branch before giving up.
pub fn finite_root(a: &PadicApproxMatrix, k: u64) -> Result<RootResult<PadicApproxMatrix>> {
    let (mut found, deepest, exhausted) = branch_search(a, k, false)?;
    if let Some(x) = found.pop() {
        return Ok(RootResult::Found(x));
    }
    if exhausted {
        return Ok(RootResult::Obstructed("branch search budget exhausted".into()));
    }
    // every branch died while lifting from `deepest` to `deepest + 1`
    Ok(RootResult::NoRoot { level: deepest + 1 })
}

/// Every k-th root of A in GL(n, Z/p^m), lexicographic by branch.
pub fn finite_roots_all(a: &PadicApproxMatrix, k: u64) -> Result<Vec<PadicApproxMatrix>> {
    let (found, _, exhausted) = branch_search(a, k, true)?;
    if exhausted {
        return Err(Error::PrecisionExhausted("branch search budget exhausted".into()));
    }
    Ok(found)
}

/// An element x ↦ a x + b of the affine group Z_p^* ⋉ Z_p, mod p^level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AffineElement {
    pub a: ResidueScalar,
    pub b: ResidueScalar,
}

impl AffineElement {
    pub fn new(a: u64, b: u64, p: u64, level: u32) -> Result<Self> {
        Ok(AffineElement { a: ResidueScalar::new(a, p, level)?, b: ResidueScalar::new(b, p, level)? })
    }

    /// (a1, b1)(a2, b2) = (a1 a2, a1 b2 + b1).
    pub fn compose(&self, rhs: &AffineElement) -> AffineElement {
        AffineElement { a: self.a.mul(rhs.a), b: self.a.mul(rhs.b).add(self.b) }
    }

    pub fn pow(&self, k: u64) -> AffineElement {
        let id = AffineElement {
            a: ResidueScalar { value: 1 % self.a.modulus, ..self.a },
            b: ResidueScalar { value: 0, ..self.b },
        };
        (0..k).fold(id, |acc, _| acc.compose(self))
    }

    pub fn reduce(&self, p: u64, level: u32) -> Result<AffineElement> {
        AffineElement::new(self.a.value, self.b.value, p, level)
    }
}

impl fmt::Display for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x ↦ {} x + {} (mod {})", self.a.value, self.b.value, self.a.modulus)
    }
}

/// k-th root of (a, b) in Z_p^* ⋉ Z_p using (α, β)^k = (α^k, (Σ_{i<k} α^i) β).
pub fn axb_root(elem: &AffineElement, k: u64, ctx: &PContext) -> Result<RootResult<AffineElement>> {
    check_k(k)?;
    let p = ctx.p();
    let level = elem.a.level;
    if elem.a.value % p == 0 {
        return Err(Error::BadDomain("a must be a unit".into()));
    }
    let a_mat = PadicApproxMatrix::new(p, level, 1, vec![elem.a.value])?;
    let alphas = match finite_roots_all(&a_mat, k)? {
        v if v.is_empty() => {
            return match finite_root(&a_mat, k)? {
                RootResult::NoRoot { level } => Ok(RootResult::NoRoot { level }),
                other => Err(Error::InvariantViolation(format!("inconsistent root search: {other:?}"))),
            }
        }
        v => v,
    };
    let modulus = residue_modulus(p, level)?;
    let vb = residue_vp(elem.b.value, p, level);
    let mut undecidable = false;
    for alpha in alphas {
        let alpha = alpha.get(0, 0);
        let geometric = (0..k).fold(0u64, |s, i| add_mod(s, pow_mod(alpha, i, modulus), modulus));
        let t = residue_vp(geometric, p, level);
        if vb < t {
            // β would need valuation v(b) - t < 0
            continue;
        }
        if t == level && vb < level {
            undecidable = true;
            continue;
        }
        let (beta, out_level) = if t == level {
            // b ≡ 0 as well: β = 0 works at full precision
            (0, level)
        } else {
            let out_level = level - t;
            let out_mod = residue_modulus(p, out_level)?;
            let pt = p.pow(t);
            let unit = (geometric / pt) % out_mod;
            let b_red = (elem.b.value / pt) % out_mod;
            (mul_mod(b_red, inv_mod(unit, out_mod).expect("unit part"), out_mod), out_level)
        };
        let root = AffineElement::new(alpha, beta, p, out_level)?;
        if root.pow(k) != elem.reduce(p, out_level)? {
            return Err(Error::InvariantViolation("affine root fails to power back".into()));
        }
        return Ok(RootResult::Found(root));
    }
    if undecidable {
        return Err(Error::PrecisionExhausted(
            "Σ α^i vanishes to working precision; raise the precision and retry".into(),
        ));
    }
    Ok(RootResult::Obstructed(format!(
        "every k-th root α of a has v_p(Σ_(i<{k}) α^i) > v_p(b) = {vb}: the translation part has no \
         root in Z_p (one exists in Q_p)"
    )))
}
