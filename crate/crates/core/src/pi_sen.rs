//! The differential module `D_{pi-Sen}` with its derivations `nabla0` (Sen
//! operator, cyclotomic direction) and `nabla_pi` (Kummer direction).
//!
//! Two constructions are provided. [`build_from_phin`] executes the twisted
//! basis change in the period sandbox and reads off the generator actions on
//! the `h`-basis after `theta`. [`build_from_cocycle`] starts from the matrices
//! of two generators directly. Both finish with
//! `nabla0 = log(gamma0) / log(chi0)` and `nabla_pi = log(beta0) / c0`.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{find_conjugator, LinalgError, PadicMatrix, WeightDecomposition};
use crate::padic::{Padic, PadicContext, PadicError};
use crate::phin::{validate, PhiNData, RationalGrid, ValidationIssue, ValidationReport};
use crate::sandbox::{GroupElement, PeriodElement, PoleError};

/// Digits below working precision tolerated by equality checks.
pub const DEFAULT_SLACK: i64 = 6;
/// Eigenvalues of `nabla0` are searched in `[-WEIGHT_RANGE, WEIGHT_RANGE]`.
pub const DEFAULT_WEIGHT_RANGE: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PiSenError {
    #[error("input fails validation: {}", .0.issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(ValidationReport),
    #[error("{generator} image of h{} is not defined: {source}", .index + 1)]
    Pole { generator: &'static str, index: usize, source: PoleError },
    #[error("gamma0 beta0 gamma0^-1 differs from beta0^chi0 at ({row}, {col}) with valuation {valuation}, needs >= {required}")]
    Relation { row: usize, col: usize, valuation: i64, required: i64 },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

pub type Result<T, E = PiSenError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub slack: i64,
    pub weight_range: i64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { slack: DEFAULT_SLACK, weight_range: DEFAULT_WEIGHT_RANGE }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Phin,
    Cocycle,
    Direct,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Phin => "phin",
            Route::Cocycle => "cocycle",
            Route::Direct => "direct",
        }
    }
}

/// Matrices of a cyclotomic generator `gamma0` and a Kummer generator `beta0`
/// on the `h`-basis, with their character values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generators {
    pub gamma0: PadicMatrix,
    pub beta0: PadicMatrix,
    pub chi0: Padic,
    pub c0: Padic,
}

impl Generators {
    /// Valuation and position of the worst entry of
    /// `gamma0 beta0 gamma0^-1 - beta0^chi0`.
    pub fn relation_defect(&self) -> Result<(usize, usize, i64)> {
        let lhs = self.gamma0.mul(&self.beta0)?.mul(&self.gamma0.inverse()?)?;
        let rhs = self.beta0.pow_zp(&self.chi0)?;
        let diff = lhs.sub(&rhs)?;
        Ok(diff.worst_entry().map_or((0, 0, i64::MAX), |(i, j, x)| (i, j, x.valuation())))
    }

    fn check_relation(&self, floor: i64) -> Result<()> {
        let (row, col, valuation) = self.relation_defect()?;
        if valuation < floor {
            return Err(PiSenError::Relation { row, col, valuation, required: floor });
        }
        Ok(())
    }
}

/// `chi(gamma0) = 1 + p` (`1 + 4` for `p = 2`) and `c(beta0) = 1`.
pub fn default_characters(ctx: PadicContext) -> (Padic, Padic) {
    let p = ctx.p() as i64;
    let chi = if p == 2 { ctx.int(5) } else { ctx.int(1 + p) };
    (chi, ctx.one())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiSenModule {
    ctx: PadicContext,
    labels: Vec<Vec<String>>,
    nabla0: PadicMatrix,
    nabla_pi: PadicMatrix,
    weights: std::result::Result<WeightDecomposition, LinalgError>,
    route: Route,
    generators: Option<Generators>,
    monodromy: Option<RationalGrid>,
}

fn h_labels(groups: &[usize]) -> Vec<Vec<String>> {
    let mut next = 0;
    groups
        .iter()
        .map(|&len| {
            let g = (next..next + len).map(|j| format!("h{}", j + 1)).collect();
            next += len;
            g
        })
        .collect()
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// Generator matrices on one chain of the `h`-basis.
///
/// With `H_j = t^(m_j) F_j = sum_k u^k t^(m_j - k - m_(j+k)) / k! f_(j+k)` and the
/// inverse `f_j = sum_k (-1)^k u^k t^(m_j - k - m_(j+k)) / k! H_(j+k)`, column `j`
/// of each matrix is `theta(g H_j)` written in the `H`-coordinates.
fn chain_actions(
    ctx: PadicContext,
    weights: &[i64],
    twists: &[i64],
    offset: usize,
    generators: &[(&'static str, &GroupElement)],
) -> Result<Vec<PadicMatrix>> {
    let len = weights.len();
    let expansion = |j: usize, sign: bool| -> Result<PeriodElement> {
        let mut x = PeriodElement::zero(ctx, weights);
        for k in 0..len - j {
            let mut coeff = ctx.one().div_int(factorial(k))?;
            if sign && k % 2 == 1 {
                coeff = -coeff;
            }
            let t_exp = twists[j] - k as i64 - twists[j + k];
            x = &x + &PeriodElement::monomial(ctx, weights, coeff, t_exp, k as u32, j + k);
        }
        Ok(x)
    };
    let big_h: Vec<PeriodElement> = (0..len).map(|j| expansion(j, false)).collect::<Result<_>>()?;
    let f_in_h: Vec<PeriodElement> = (0..len).map(|j| expansion(j, true)).collect::<Result<_>>()?;
    generators
        .iter()
        .map(|(name, g)| {
            let columns = big_h
                .iter()
                .enumerate()
                .map(|(j, hj)| {
                    hj.act(g)?.substitute(&f_in_h).theta().map_err(|source| PiSenError::Pole {
                        generator: name,
                        index: offset + j,
                        source,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(PadicMatrix::from_columns(ctx, len, &columns))
        })
        .collect()
}

/// Builds the module from `(phi, N)`-data through the period sandbox.
///
/// Only chain form and nilpotency are required up front; inconsistent weights
/// or rising twists surface as [`PiSenError::Pole`] from `theta`.
pub fn build_from_phin(data: &PhiNData, ctx: PadicContext, opts: BuildOptions) -> Result<PiSenModule> {
    let structural: Vec<ValidationIssue> = validate(data, ctx.p())
        .issues
        .into_iter()
        .filter(|i| matches!(i, ValidationIssue::ChainForm { .. } | ValidationIssue::Nilpotent { .. }))
        .collect();
    if !structural.is_empty() {
        return Err(PiSenError::Invalid(ValidationReport { issues: structural }));
    }
    let (chi0, c0) = default_characters(ctx);
    let gamma = GroupElement::gamma(chi0.clone())?;
    let beta = GroupElement::beta(ctx, c0.clone())?;
    let chains = data.chains();
    let mut gamma_blocks = Vec::new();
    let mut beta_blocks = Vec::new();
    for chain in &chains {
        let w = &data.weights()[chain.clone()];
        let m = &data.twists()[chain.clone()];
        let mut actions = chain_actions(ctx, w, m, chain.start, &[("gamma0", &gamma), ("beta0", &beta)])?;
        beta_blocks.push(actions.pop().expect("two generators"));
        gamma_blocks.push(actions.pop().expect("two generators"));
    }
    let generators = Generators {
        gamma0: PadicMatrix::direct_sum(ctx, &gamma_blocks),
        beta0: PadicMatrix::direct_sum(ctx, &beta_blocks),
        chi0,
        c0,
    };
    generators.check_relation(ctx.precision() - opts.slack)?;
    let groups: Vec<usize> = chains.iter().map(|c| c.len()).collect();
    let mut module = from_generators(ctx, generators, Route::Phin, h_labels(&groups), opts)?;
    module.monodromy = Some(data.n().clone());
    Ok(module)
}

fn from_generators(
    ctx: PadicContext,
    generators: Generators,
    route: Route,
    labels: Vec<Vec<String>>,
    opts: BuildOptions,
) -> Result<PiSenModule> {
    let nabla0 = generators.gamma0.log()?.div_scalar(&generators.chi0.log()?)?;
    let nabla_pi = generators.beta0.log()?.div_scalar(&generators.c0)?;
    Ok(PiSenModule::assemble(ctx, labels, nabla0, nabla_pi, route, Some(generators), opts))
}

fn check_characters(chi0: &Padic, c0: &Padic) -> Result<()> {
    GroupElement::new(chi0.clone(), c0.clone())?;
    let one = Padic::one(chi0.p(), chi0.precision());
    if (chi0 - &one).is_zero() {
        return Err(PadicError::Domain { op: "build_from_cocycle", reason: "chi0 equals 1".into() }.into());
    }
    if c0.is_zero() {
        return Err(PadicError::Domain { op: "build_from_cocycle", reason: "c0 is zero".into() }.into());
    }
    Ok(())
}

/// Builds the module from generator matrices, after checking
/// `gamma0 beta0 gamma0^-1 = beta0^chi0` to precision `M - slack`.
pub fn build_from_cocycle(generators: Generators, ctx: PadicContext, opts: BuildOptions) -> Result<PiSenModule> {
    check_characters(&generators.chi0, &generators.c0)?;
    generators.check_relation(ctx.precision() - opts.slack)?;
    build_from_cocycle_unchecked(generators, ctx, opts)
}

/// [`build_from_cocycle`] without the relation check, so that a report can
/// still be produced for inconsistent generators.
pub fn build_from_cocycle_unchecked(
    generators: Generators,
    ctx: PadicContext,
    opts: BuildOptions,
) -> Result<PiSenModule> {
    check_characters(&generators.chi0, &generators.c0)?;
    let d = generators.gamma0.rows();
    if generators.beta0.rows() != d || !generators.gamma0.is_square() || !generators.beta0.is_square() {
        return Err(PiSenError::Shape("gamma0 and beta0 must be square of the same size".into()));
    }
    from_generators(ctx, generators, Route::Cocycle, h_labels(&[d]), opts)
}

/// Wraps given operator matrices. Missing generators are recovered as
/// `exp(log(chi0) nabla0)` and `exp(c0 nabla_pi)` when those series converge.
pub fn build_direct(
    nabla0: PadicMatrix,
    nabla_pi: PadicMatrix,
    generators: Option<Generators>,
    monodromy: Option<RationalGrid>,
    ctx: PadicContext,
    opts: BuildOptions,
) -> Result<PiSenModule> {
    let d = nabla0.rows();
    if !nabla0.is_square() || nabla_pi.rows() != d || !nabla_pi.is_square() {
        return Err(PiSenError::Shape("nabla0 and nabla_pi must be square of the same size".into()));
    }
    let generators = generators.or_else(|| {
        let (chi0, c0) = default_characters(ctx);
        let gamma0 = nabla0.scale(&chi0.log().ok()?).exp().ok()?;
        let beta0 = nabla_pi.scale(&c0).exp().ok()?;
        Some(Generators { gamma0, beta0, chi0, c0 })
    });
    let mut module = PiSenModule::assemble(ctx, h_labels(&[d]), nabla0, nabla_pi, Route::Direct, generators, opts);
    module.monodromy = monodromy;
    Ok(module)
}

impl PiSenModule {
    fn assemble(
        ctx: PadicContext,
        labels: Vec<Vec<String>>,
        nabla0: PadicMatrix,
        nabla_pi: PadicMatrix,
        route: Route,
        generators: Option<Generators>,
        opts: BuildOptions,
    ) -> PiSenModule {
        let weights = nabla0.weight_decomposition(-opts.weight_range, opts.weight_range);
        PiSenModule { ctx, labels, nabla0, nabla_pi, weights, route, generators, monodromy: None }
    }

    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn dim(&self) -> usize {
        self.nabla0.rows()
    }

    /// Basis labels `h1, h2, ...` grouped by chain.
    pub fn labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn nabla0(&self) -> &PadicMatrix {
        &self.nabla0
    }

    pub fn nabla_pi(&self) -> &PadicMatrix {
        &self.nabla_pi
    }

    /// Eigenspace decomposition of `nabla0`, or the reason it does not exist.
    pub fn weights(&self) -> std::result::Result<&WeightDecomposition, &LinalgError> {
        self.weights.as_ref()
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn generators(&self) -> Option<&Generators> {
        self.generators.as_ref()
    }

    /// The monodromy operator of the source data, when known.
    pub fn monodromy(&self) -> Option<&RationalGrid> {
        self.monodromy.as_ref()
    }

    /// Total degree and weight shift used for the bigrading: an explicit `m`
    /// keeps the weights if they lie in `[0, m]` and otherwise shifts the
    /// smallest to 0; without `m`, the weight spread is used. `None` when the
    /// weights do not fit.
    pub fn grading(&self, total_degree: Option<i64>) -> Option<(i64, i64)> {
        let wd = self.weights.as_ref().ok()?;
        let (lo, hi) = (wd.min_weight()?, wd.max_weight()?);
        match total_degree {
            None => Some((hi - lo, -lo)),
            Some(m) if lo >= 0 && hi <= m => Some((m, 0)),
            Some(m) if hi - lo <= m => Some((m, -lo)),
            Some(_) => None,
        }
    }

    /// `h^(m-t, t)` = multiplicity of `t - shift` as an eigenvalue of `nabla0`.
    pub fn bigraded_dims(&self, m: i64, shift: i64) -> std::result::Result<BigradedDims, LinalgError> {
        let wd = self.weights.clone()?;
        let shifted: Vec<i64> = wd.weights().iter().map(|w| w + shift).collect();
        Ok(BigradedDims::from_weights(m, shift, &shifted))
    }

    /// An invertible `P` with `P^-1 A P = B` for both operators, where `A`
    /// belongs to `self` and `B` to `other`.
    pub fn conjugator_to(&self, other: &PiSenModule) -> Result<Option<PadicMatrix>> {
        Ok(find_conjugator(&[(&self.nabla0, &other.nabla0), (&self.nabla_pi, &other.nabla_pi)])?)
    }

    /// Checks `P^-1 A P = B` for both operators to precision `floor`.
    pub fn conjugate_via(&self, other: &PiSenModule, p: &PadicMatrix, floor: i64) -> Result<bool> {
        let pinv = p.inverse()?;
        for (a, b) in [(&self.nabla0, &other.nabla0), (&self.nabla_pi, &other.nabla_pi)] {
            if !pinv.mul(a)?.mul(p)?.sub(b)?.vanishes_to(floor) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BigradedEntry {
    pub s: i64,
    pub t: i64,
    pub dim: usize,
}

/// Dimensions `h^(s,t)`, `s + t = m`, listed by increasing `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BigradedDims {
    pub m: i64,
    pub shift: i64,
    pub table: Vec<BigradedEntry>,
}

impl BigradedDims {
    /// Table over `t` from `min(0, min weight)` to `max(m, max weight)`.
    pub fn from_weights(m: i64, shift: i64, weights: &[i64]) -> BigradedDims {
        let lo = weights.iter().copied().min().unwrap_or(0).min(0);
        let hi = weights.iter().copied().max().unwrap_or(0).max(m);
        let table = (lo..=hi)
            .map(|t| BigradedEntry { s: m - t, t, dim: weights.iter().filter(|&&w| w == t).count() })
            .collect();
        BigradedDims { m, shift, table }
    }

    pub fn get(&self, s: i64, t: i64) -> usize {
        self.table.iter().find(|e| e.s == s && e.t == t).map_or(0, |e| e.dim)
    }

    pub fn total(&self) -> usize {
        self.table.iter().map(|e| e.dim).sum()
    }
}

/// Longest run `[a, b]` of consecutive indices with `h^(i, m-i) != 0`, as `b - a`.
pub fn monodromy_gap(dims: &BigradedDims) -> i64 {
    let mut best = 0;
    let mut run_start: Option<i64> = None;
    for e in &dims.table {
        if e.dim == 0 {
            run_start = None;
            continue;
        }
        let start = *run_start.get_or_insert(e.t);
        best = best.max(e.t - start);
    }
    best
}
