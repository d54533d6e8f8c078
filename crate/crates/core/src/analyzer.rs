//! Density and surjectivity verdicts for power maps x ↦ x^k.
//!
//! For the F-points of a linear algebraic group over Q_p, P_k is dense iff it
//! is surjective iff the quotient by the split unipotent radical is compact
//! and P_k is surjective there; on a compact (profinite) group that last
//! condition is coprimality of k with the pro-order. Catalog groups carry
//! these structural facts; finitely generated groups only get necessary
//! conditions checked.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{ku_flag, refine_flag, type_r_witness_search, Caps, FlagDecomposition, GeneratorSet, TypeRSample};
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::modular::PadicApproxMatrix;
use crate::oracle::{self, FiniteGroupTable};
use crate::qp::{ExactScalar, PContext};
use crate::roots::{axb_root, finite_root, unipotent_root, AffineElement, RootResult};
use crate::steinitz::{coprime, ord_catalog, CatalogGroup, Supernatural};

/// Criterion names used in justifications and the "citations" array.
pub mod criteria {
    pub const TRIVIAL_POWER: &str = "trivial_power";
    pub const DENSE_IFF_SURJECTIVE: &str = "dense_iff_surjective";
    pub const NONCOMPACT_QUOTIENT: &str = "noncompact_reductive_quotient";
    pub const SPLIT_TORUS: &str = "split_torus_obstruction";
    pub const PROFINITE_COPRIME: &str = "profinite_coprime_order";
    pub const LIFT_THROUGH_RADICAL: &str = "lift_through_unipotent_radical";
    pub const UNIPOTENT_DIVISIBLE: &str = "unipotent_divisible";
    pub const NORMAL_COMPOSITE: &str = "normal_subgroup_and_quotient";
    pub const TYPE_R_NECESSARY: &str = "type_r_necessary";
    pub const KU_FLAG: &str = "bounded_flag_decomposition";
    pub const SPOT_ROOTS: &str = "spot_root_extraction";
    pub const FINITE_ORACLE: &str = "finite_quotient_oracle";
    pub const ALGEBRAIC_INHERITANCE: &str = "algebraic_subgroup_inheritance";
    pub const PROFINITE_INHERITANCE: &str = "profinite_subgroup_inheritance";
    pub const NON_ALGEBRAIC_SUBGROUP: &str = "non_algebraic_subgroup";
}

use criteria as c;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    AdditiveQp(usize),
    AdditiveZp,
    UnitsZp,
    GlZp(usize),
    GlQp(usize),
    UpperUnipotentQp(usize),
    BorelQp(usize),
    /// x ↦ ax + b with a ∈ Z_p^*, b ∈ Q_p.
    AxbZpUnits,
    FinitelyGenerated(GeneratorSet),
}

impl GroupKind {
    /// Name as accepted by `from_str`.
    pub fn name(&self) -> String {
        match self {
            GroupKind::AdditiveQp(n) => format!("AdditiveQp({n})"),
            GroupKind::AdditiveZp => "AdditiveZp".into(),
            GroupKind::UnitsZp => "UnitsZp".into(),
            GroupKind::GlZp(n) => format!("GL_Zp({n})"),
            GroupKind::GlQp(n) => format!("GL_Qp({n})"),
            GroupKind::UpperUnipotentQp(n) => format!("UpperUnipotent_Qp({n})"),
            GroupKind::BorelQp(n) => format!("Borel_Qp({n})"),
            GroupKind::AxbZpUnits => "AxB_ZpUnits".into(),
            GroupKind::FinitelyGenerated(g) => format!("FinitelyGenerated({} generators)", g.gens().len()),
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Parses catalog names such as "GL_Zp(2)", "AdditiveQp", "AxB_ZpUnits".
impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownCatalogEntry(s.to_string());
        let s = s.trim();
        let (name, dim) = match s.split_once('(') {
            Some((name, rest)) => {
                let d: usize = rest.strip_suffix(')').and_then(|d| d.trim().parse().ok()).ok_or_else(unknown)?;
                if d == 0 {
                    return Err(unknown());
                }
                (name, Some(d))
            }
            None => (s, None),
        };
        let n = dim.unwrap_or(1);
        Ok(match (name, dim) {
            ("AdditiveQp", _) => GroupKind::AdditiveQp(n),
            ("AdditiveZp", None) => GroupKind::AdditiveZp,
            ("UnitsZp", None) => GroupKind::UnitsZp,
            ("GL_Zp" | "GLn_Zp", _) => GroupKind::GlZp(n),
            ("GL_Qp" | "GLn_Qp", _) => GroupKind::GlQp(n),
            ("UpperUnipotent_Qp", _) => GroupKind::UpperUnipotentQp(n),
            ("Borel_Qp", _) => GroupKind::BorelQp(n),
            ("AxB_ZpUnits" | "AxB", None) => GroupKind::AxbZpUnits,
            _ => return Err(unknown()),
        })
    }
}

/// Hardcoded structure of a catalog group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogFacts {
    /// F-points of a linear algebraic group over Q_p.
    pub algebraic: bool,
    pub compact: bool,
    pub split_unipotent_radical: &'static str,
    /// Compactness of G modulo its split unipotent radical.
    pub quotient_compact: bool,
    /// Pro-order of the compact quotient, when it is compact.
    pub quotient_order: Option<Supernatural>,
    pub has_split_torus: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub ctx: PContext,
    pub kind: GroupKind,
}

impl GroupSpec {
    pub fn new(ctx: &PContext, kind: GroupKind) -> Self {
        GroupSpec { ctx: *ctx, kind }
    }

    pub fn parse(ctx: &PContext, name: &str) -> Result<Self> {
        Ok(GroupSpec::new(ctx, name.parse()?))
    }

    /// None for finitely generated groups.
    pub fn facts(&self) -> Result<Option<CatalogFacts>> {
        let p = self.ctx.p();
        let facts = |algebraic, compact, radical, order: Option<Supernatural>, torus| CatalogFacts {
            algebraic,
            compact,
            split_unipotent_radical: radical,
            quotient_compact: order.is_some(),
            quotient_order: order,
            has_split_torus: torus,
        };
        Ok(Some(match &self.kind {
            GroupKind::AdditiveQp(_) => facts(true, false, "whole group", Some(Supernatural::one()), false),
            GroupKind::UpperUnipotentQp(_) => facts(true, false, "whole group", Some(Supernatural::one()), false),
            GroupKind::AdditiveZp => {
                facts(false, true, "trivial", Some(ord_catalog(CatalogGroup::AdditiveZp, 1, p)?), false)
            }
            GroupKind::UnitsZp => facts(false, true, "trivial", Some(ord_catalog(CatalogGroup::UnitsZp, 1, p)?), false),
            GroupKind::GlZp(n) => {
                facts(false, true, "trivial", Some(ord_catalog(CatalogGroup::GlnZp, *n as u32, p)?), false)
            }
            GroupKind::GlQp(_) => facts(true, false, "trivial", None, true),
            GroupKind::BorelQp(_) => facts(true, false, "strictly upper triangular unipotents", None, true),
            GroupKind::AxbZpUnits => facts(
                false,
                false,
                "translations x ↦ x + b (Q_p)",
                Some(ord_catalog(CatalogGroup::UnitsZp, 1, p)?),
                false,
            ),
            GroupKind::FinitelyGenerated(_) => return Ok(None),
        }))
    }

    /// P_k is surjective for every k exactly when the quotient is trivial.
    pub fn is_split_unipotent(&self) -> bool {
        matches!(self.kind, GroupKind::AdditiveQp(_) | GroupKind::UpperUnipotentQp(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Conclusion {
    SurjectiveAndDense,
    NotDense,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub criterion: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpotCheck {
    pub level: u32,
    pub attempted: usize,
    pub found: usize,
    pub seed: u64,
}

impl SpotCheck {
    pub fn all_found(&self) -> bool {
        self.found == self.attempted
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleLevel {
    pub level: u32,
    pub order: u64,
    pub image_size: u64,
    pub surjective: bool,
    pub f1_agree: bool,
    /// The finite quotient involves exactly the primes of the pro-order, so
    /// its verdict must match the profinite one.
    pub same_primes: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Certificate {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient_order: Option<Supernatural>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spot_roots: Option<SpotCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub oracle: Vec<OracleLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_type_r_word: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<FlagDecomposition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerVerdict {
    pub group: String,
    pub k: u64,
    pub conclusion: Conclusion,
    pub justification: Vec<Step>,
    pub certificate: Certificate,
}

impl PowerVerdict {
    fn new(spec: &GroupSpec, k: u64) -> Self {
        PowerVerdict {
            group: spec.kind.name(),
            k,
            conclusion: Conclusion::Inconclusive,
            justification: Vec::new(),
            certificate: Certificate::default(),
        }
    }

    fn cite(&mut self, criterion: &'static str, detail: impl Into<String>) {
        self.justification.push(Step { criterion, detail: detail.into() });
    }

    pub fn is_surjective(&self) -> bool {
        self.conclusion == Conclusion::SurjectiveAndDense
    }

    /// Distinct criteria in order of first use.
    pub fn citations(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = Vec::new();
        for s in &self.justification {
            if !out.contains(&s.criterion) {
                out.push(s.criterion);
            }
        }
        out
    }
}

impl Serialize for PowerVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            group: &'a str,
            k: u64,
            conclusion: Conclusion,
            justification: &'a [Step],
            citations: Vec<&'static str>,
            certificate: &'a Certificate,
        }
        Repr {
            group: &self.group,
            k: self.k,
            conclusion: self.conclusion,
            justification: &self.justification,
            citations: self.citations(),
            certificate: &self.certificate,
        }
        .serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub seed: u64,
    /// Random elements rooted when a positive verdict is reached.
    pub spot_checks: usize,
    /// Finite quotients up to this level are enumerated when small enough.
    pub oracle_level: u32,
    /// Largest finite quotient the oracle will enumerate.
    pub oracle_cap: u64,
    /// 0 for Q_p; anything else is refused.
    pub characteristic: u64,
    pub caps: Caps,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            seed: 0x5eed,
            spot_checks: 50,
            oracle_level: 2,
            oracle_cap: 20_000,
            characteristic: 0,
            caps: Caps::default(),
        }
    }
}

pub fn analyze(spec: &GroupSpec, k: u64, opts: &AnalyzeOptions) -> Result<PowerVerdict> {
    if k == 0 {
        return Err(Error::Input("k must be a positive integer".into()));
    }
    if opts.characteristic != 0 {
        return Err(Error::UnsupportedCharacteristic(opts.characteristic));
    }
    let mut v = PowerVerdict::new(spec, k);
    v.cite(c::DENSE_IFF_SURJECTIVE, "for the groups considered, P_k has dense image iff it is onto");
    if k == 1 {
        v.cite(c::TRIVIAL_POWER, "P_1 is the identity map");
        v.conclusion = Conclusion::SurjectiveAndDense;
        return Ok(v);
    }
    let Some(facts) = spec.facts()? else {
        let GroupKind::FinitelyGenerated(g) = &spec.kind else { unreachable!() };
        return analyze_generated(v, g, opts);
    };
    let p = spec.ctx.p();

    if spec.is_split_unipotent() {
        v.cite(c::UNIPOTENT_DIVISIBLE, "split unipotent over a field of characteristic 0: uniquely divisible");
        v.conclusion = Conclusion::SurjectiveAndDense;
        v.certificate.spot_roots = Some(spot_check(spec, k, opts)?);
        return Ok(v);
    }

    let Some(order) = facts.quotient_order.clone() else {
        v.cite(
            c::NONCOMPACT_QUOTIENT,
            format!("modulo its split unipotent radical ({}) the group is not compact", facts.split_unipotent_radical),
        );
        if facts.has_split_torus {
            v.cite(
                c::SPLIT_TORUS,
                format!("a split torus Q_p^* is present and valuations of {k}-th powers lie in {k}Z"),
            );
        }
        v.conclusion = Conclusion::NotDense;
        return Ok(v);
    };

    let surjective = coprime(k, &order);
    v.certificate.quotient_order = Some(order.clone());
    let part = if facts.compact { "the group" } else { "the compact quotient" };
    v.cite(
        c::PROFINITE_COPRIME,
        format!(
            "{part} has pro-order {order}; gcd({k}, {order}) {} 1",
            if surjective { "=" } else { "≠" }
        ),
    );
    if !facts.compact {
        v.cite(
            c::NORMAL_COMPOSITE,
            format!(
                "normal subgroup {} is split unipotent (P_k onto for every k); quotient verdict decides the whole group",
                facts.split_unipotent_radical
            ),
        );
        if surjective {
            v.cite(c::LIFT_THROUGH_RADICAL, "roots in the quotient lift through the unipotent radical");
        }
    }
    v.conclusion = if surjective { Conclusion::SurjectiveAndDense } else { Conclusion::NotDense };

    v.certificate.oracle = oracle_levels(spec, k, opts)?;
    if !v.certificate.oracle.is_empty() {
        let levels: Vec<String> = v
            .certificate
            .oracle
            .iter()
            .map(|o| format!("level {}: |G| = {}, image {}", o.level, o.order, o.image_size))
            .collect();
        v.cite(c::FINITE_ORACLE, levels.join("; "));
        for o in &v.certificate.oracle {
            if !o.f1_agree || (o.same_primes && o.surjective != surjective) {
                return Err(Error::InvariantViolation(format!(
                    "finite quotient mod {p}^{} disagrees with the coprimality verdict",
                    o.level
                )));
            }
        }
    }
    if surjective {
        let spot = spot_check(spec, k, opts)?;
        v.cite(c::SPOT_ROOTS, format!("{}/{} random elements rooted mod {p}^{}", spot.found, spot.attempted, spot.level));
        if !spot.all_found() {
            return Err(Error::InvariantViolation("spot root extraction failed under a positive verdict".into()));
        }
        v.certificate.spot_roots = Some(spot);
    }
    Ok(v)
}

fn analyze_generated(mut v: PowerVerdict, g: &GeneratorSet, opts: &AnalyzeOptions) -> Result<PowerVerdict> {
    match type_r_witness_search(g, opts.caps.word_len)? {
        TypeRSample::Witness(word) => {
            v.cite(
                c::TYPE_R_NECESSARY,
                format!("word {word:?} has an eigenvalue of absolute value ≠ 1, so the group contains a split torus"),
            );
            v.cite(c::SPLIT_TORUS, "dense power images force every element to have unit eigenvalues");
            v.certificate.non_type_r_word = Some(word);
            v.conclusion = Conclusion::NotDense;
        }
        TypeRSample::Ok { words_checked } => {
            v.cite(
                c::TYPE_R_NECESSARY,
                format!(
                    "{words_checked} words up to length {} have unit eigenvalues (a necessary condition only)",
                    opts.caps.word_len
                ),
            );
            match ku_flag(g, &opts.caps).and_then(|f| refine_flag(g, &f, &opts.caps)) {
                Ok(flag) => {
                    v.cite(c::KU_FLAG, format!("certified flag with dimensions {:?}", flag.dims));
                    v.certificate.flag = Some(flag);
                }
                Err(Error::Inconclusive(why)) => v.cite(c::KU_FLAG, why),
                Err(e) => return Err(e),
            }
            v.conclusion = Conclusion::Inconclusive;
        }
    }
    Ok(v)
}

/// Catalog subgroup relation, with the embedding that witnesses it.
pub fn embedding(parent: &GroupKind, sub: &GroupKind) -> Option<&'static str> {
    use GroupKind::*;
    if parent == sub {
        return Some("identity");
    }
    Some(match (parent, sub) {
        (AdditiveQp(n), AdditiveQp(m)) if m <= n => "first coordinates",
        (AdditiveQp(_), AdditiveZp) => "Z_p in the first coordinate",
        (GlQp(n), GlZp(m)) if m == n => "integral matrices",
        (GlQp(n), BorelQp(m)) | (GlQp(n), UpperUnipotentQp(m)) if m == n => "upper triangular matrices",
        (GlQp(n), UnitsZp) | (GlZp(n), UnitsZp) | (BorelQp(n), UnitsZp) if *n >= 1 => "diag(u, 1, …, 1)",
        (GlQp(n), AdditiveQp(1)) | (BorelQp(n), AdditiveQp(1)) | (UpperUnipotentQp(n), AdditiveQp(1)) if *n >= 2 => {
            "I + b E_12"
        }
        (GlQp(n), AdditiveZp) | (GlZp(n), AdditiveZp) | (BorelQp(n), AdditiveZp) | (UpperUnipotentQp(n), AdditiveZp)
            if *n >= 2 =>
        {
            "I + b E_12, b ∈ Z_p"
        }
        (BorelQp(n), UpperUnipotentQp(m)) if m == n => "unipotent radical",
        (GlQp(n), AxbZpUnits) | (BorelQp(n), AxbZpUnits) if *n >= 2 => "[[a, b], [0, 1]] in the top corner",
        (AxbZpUnits, AdditiveQp(1)) => "translations",
        (AxbZpUnits, AdditiveZp) => "integral translations",
        (AxbZpUnits, UnitsZp) => "x ↦ ax",
        _ => return None,
    })
}

/// Verdicts for a parent group and a catalog subgroup.
pub fn analyze_subgroup(
    spec: &GroupSpec,
    sub: &GroupSpec,
    k: u64,
    opts: &AnalyzeOptions,
) -> Result<(PowerVerdict, PowerVerdict)> {
    let how = embedding(&spec.kind, &sub.kind).ok_or_else(|| Error::NotASubgroup {
        parent: spec.kind.name(),
        sub: sub.kind.name(),
    })?;
    let parent = analyze(spec, k, opts)?;
    let mut child = analyze(sub, k, opts)?;
    let sub_facts = sub.facts()?;
    let parent_facts = spec.facts()?;
    if parent.is_surjective() {
        let algebraic = sub_facts.as_ref().is_some_and(|f| f.algebraic);
        let profinite = parent_facts.as_ref().is_some_and(|f| f.compact) && sub_facts.as_ref().is_some_and(|f| f.compact);
        if algebraic {
            child.cite(c::ALGEBRAIC_INHERITANCE, format!("algebraic subgroup of {} via {how}", parent.group));
        } else if profinite {
            child.cite(c::PROFINITE_INHERITANCE, format!("closed subgroup of the profinite group {} via {how}", parent.group));
        } else {
            child.cite(
                c::NON_ALGEBRAIC_SUBGROUP,
                format!("embedded via {how} but not algebraic: surjectivity on {} is not inherited", parent.group),
            );
        }
        if (algebraic || profinite) && !child.is_surjective() {
            return Err(Error::InvariantViolation(format!(
                "{} should inherit surjectivity of P_{k} from {}",
                child.group, parent.group
            )));
        }
    }
    Ok((parent, child))
}

/// Exhaustive power maps on the finite quotients G mod p^m, m ≤ oracle_level.
fn oracle_levels(spec: &GroupSpec, k: u64, opts: &AnalyzeOptions) -> Result<Vec<OracleLevel>> {
    let p = spec.ctx.p();
    let Some(order) = spec.facts()?.and_then(|f| f.quotient_order) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for level in 1..=opts.oracle_level {
        let Some(table) = finite_quotient(&spec.kind, p, level, opts.oracle_cap)? else {
            continue;
        };
        let img = oracle::power_surjective(&table, k);
        let finite_primes = Supernatural::from_integer(table.order())?.primes();
        out.push(OracleLevel {
            level,
            order: table.order(),
            image_size: img.image_size,
            surjective: img.surjective,
            f1_agree: oracle::validate_f1(&table, k).agrees(),
            same_primes: finite_primes == order.primes(),
        });
    }
    Ok(out)
}

fn finite_quotient(kind: &GroupKind, p: u64, level: u32, cap: u64) -> Result<Option<FiniteGroupTable>> {
    let size = |x: u128| -> bool { x <= cap as u128 };
    let m = p as u128;
    let pm = m.pow(level);
    Ok(match kind {
        GroupKind::UnitsZp if size(pm - pm / m) => Some(oracle::units_table(p, level)?),
        GroupKind::AdditiveZp if size(pm) => {
            let shift = PadicApproxMatrix::from_rows(p, level, &[vec![1, 1], vec![0, 1]])?;
            Some(oracle::enumerate(&[shift], cap as usize)?)
        }
        // the quotient by the translations is Z_p^*
        GroupKind::AxbZpUnits if size(pm - pm / m) => Some(oracle::units_table(p, level)?),
        GroupKind::GlZp(n) => {
            let total = oracle::gl_order(*n, p, level)?;
            if total <= num_bigint::BigUint::from(cap) {
                Some(oracle::gl_table(*n, p, level)?)
            } else {
                None
            }
        }
        _ => None,
    })
}

/// Roots of random elements, verified by powering back.
fn spot_check(spec: &GroupSpec, k: u64, opts: &AnalyzeOptions) -> Result<SpotCheck> {
    let p = spec.ctx.p();
    let level = spec.ctx.precision();
    let modulus = spec.ctx.modulus(level)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ k.rotate_left(32));
    let unit = |rng: &mut ChaCha8Rng| loop {
        let u = rng.gen_range(1..modulus);
        if u % p != 0 {
            return u;
        }
    };
    let mut found = 0;
    for _ in 0..opts.spot_checks {
        let ok = match &spec.kind {
            GroupKind::AdditiveQp(n) => {
                let x: Vec<ExactScalar> = (0..*n).map(|_| random_rational(&mut rng)).collect();
                let kk = ExactScalar::from(k);
                let root: Vec<ExactScalar> = x.iter().map(|xi| xi / &kk).collect();
                root.iter().zip(&x).all(|(r, xi)| &(r * &kk) == xi)
            }
            GroupKind::UpperUnipotentQp(n) => {
                let mut u = QMatrix::identity(*n);
                for i in 0..*n {
                    for j in i + 1..*n {
                        u[(i, j)] = random_rational(&mut rng);
                    }
                }
                matches!(unipotent_root(&u, k)?, RootResult::Found(r) if r.pow(k as i64)? == u)
            }
            GroupKind::AdditiveZp => {
                let b = rng.gen_range(0..modulus);
                let kinv = crate::qp::inv_mod(k % modulus, modulus).ok_or(Error::PDividesK)?;
                let root = crate::qp::mul_mod(b, kinv, modulus);
                crate::qp::mul_mod(root, k % modulus, modulus) == b
            }
            GroupKind::UnitsZp => {
                let a = PadicApproxMatrix::new(p, level, 1, vec![unit(&mut rng)])?;
                finite_root(&a, k)?.is_found()
            }
            GroupKind::AxbZpUnits => {
                let elem = AffineElement::new(unit(&mut rng), rng.gen_range(0..modulus), p, level)?;
                axb_root(&elem, k, &spec.ctx)?.is_found()
            }
            GroupKind::GlZp(n) => {
                let a = loop {
                    let data = (0..n * n).map(|_| rng.gen_range(0..modulus)).collect();
                    let a = PadicApproxMatrix::new(p, level, *n, data)?;
                    if a.is_invertible() {
                        break a;
                    }
                };
                finite_root(&a, k)?.is_found()
            }
            _ => false,
        };
        found += ok as usize;
    }
    Ok(SpotCheck { level, attempted: opts.spot_checks, found, seed: opts.seed })
}

fn random_rational(rng: &mut ChaCha8Rng) -> ExactScalar {
    ExactScalar::from((rng.gen_range(-50..=50), rng.gen_range(1..=50)))
}
