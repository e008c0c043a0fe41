//! Truncation-free symbolic model of the period ring: finite sums
//! `a * t^i u^k (x) f_j` with Laurent `t`, polynomial `u` and p-adic coefficients,
//! together with the action of the group `Gamma_K x| Gamma_BK`.
//!
//! `gamma` acts by `t -> chi t`, `u -> u`, `f_j -> chi^(n_j) f_j`;
//! `beta` acts by `t -> t`, `u -> u + c t`, `f_j -> f_j`.
//! Both `t` and `u` have filtration degree 1, so `theta` kills every term of
//! positive total degree `i + k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

use crate::padic::{log_threshold, Padic, PadicContext, PadicError};

/// A term of negative filtration degree, or the degree-0 symbol `(u/t)^k`,
/// reached `theta` with a nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("theta is undefined on {coefficient} * t^{t_exp} u^{u_exp} {label}")]
pub struct PoleError {
    pub label: usize,
    pub t_exp: i64,
    pub u_exp: u32,
    pub coefficient: String,
}

type Key = (i64, u32, usize);

/// Element of `Q_p[t, 1/t, u] (x) span{f_0, ..., f_(d-1)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodElement {
    ctx: PadicContext,
    weights: Vec<i64>,
    terms: BTreeMap<Key, Padic>,
}

impl PeriodElement {
    /// The zero element over labels with the given weight tags.
    pub fn zero(ctx: PadicContext, weights: &[i64]) -> PeriodElement {
        PeriodElement { ctx, weights: weights.to_vec(), terms: BTreeMap::new() }
    }

    /// The pure symbol `f_label`.
    pub fn symbol(ctx: PadicContext, weights: &[i64], label: usize) -> PeriodElement {
        PeriodElement::monomial(ctx, weights, ctx.one(), 0, 0, label)
    }

    /// `coefficient * t^t_exp * u^u_exp * f_label`.
    pub fn monomial(
        ctx: PadicContext,
        weights: &[i64],
        coefficient: Padic,
        t_exp: i64,
        u_exp: u32,
        label: usize,
    ) -> PeriodElement {
        assert!(label < weights.len(), "label {label} out of range for dimension {}", weights.len());
        let mut x = PeriodElement::zero(ctx, weights);
        x.push((t_exp, u_exp, label), coefficient);
        x
    }

    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Nonzero terms as `((t_exp, u_exp, label), coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (Key, &Padic)> {
        self.terms.iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (*k, c))
    }

    pub fn coefficient(&self, t_exp: i64, u_exp: u32, label: usize) -> Padic {
        self.terms
            .get(&(t_exp, u_exp, label))
            .cloned()
            .unwrap_or_else(|| Padic::exact_zero(self.ctx.p()))
    }

    /// True when every coefficient vanishes to its known precision.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(Padic::is_zero)
    }

    fn push(&mut self, key: Key, c: Padic) {
        if c.is_exact_zero() {
            return;
        }
        let next = match self.terms.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !next.is_exact_zero() {
            self.terms.insert(key, next);
        }
    }

    fn check_compatible(&self, other: &PeriodElement) {
        assert_eq!(self.weights, other.weights, "period elements over different label sets");
    }

    pub fn scale(&self, s: &Padic) -> PeriodElement {
        let mut out = PeriodElement::zero(self.ctx, &self.weights);
        for (k, c) in &self.terms {
            out.push(*k, c * s);
        }
        out
    }

    /// Multiplication by `t^i u^k`.
    pub fn shift(&self, t_exp: i64, u_exp: u32) -> PeriodElement {
        let mut out = PeriodElement::zero(self.ctx, &self.weights);
        for ((i, k, j), c) in &self.terms {
            out.push((i + t_exp, k + u_exp, *j), c.clone());
        }
        out
    }

    /// `g(x)` for `g = beta_c gamma_chi`: first `gamma`, then `beta`.
    pub fn act(&self, g: &GroupElement) -> Result<PeriodElement, PadicError> {
        let mut out = PeriodElement::zero(self.ctx, &self.weights);
        let c_pows = powers(self.ctx, &g.c, self.max_u_exp());
        for ((i, k, j), coeff) in &self.terms {
            let scaled = coeff * &g.chi.pow_int(i + self.weights[*j])?;
            // (u + c t)^k = sum_r binom(k, r) c^r t^r u^(k-r)
            let mut binom: i64 = 1;
            for r in 0..=*k {
                let term = (&scaled * &c_pows[r as usize]).mul_int(binom);
                out.push((i + r as i64, k - r, *j), term);
                binom = binom * (*k - r) as i64 / (r as i64 + 1);
            }
        }
        Ok(out)
    }

    fn max_u_exp(&self) -> u32 {
        self.terms.keys().map(|(_, k, _)| *k).max().unwrap_or(0)
    }

    /// Replaces each `f_j` by `images[j]`, an element over a new label set.
    pub fn substitute(&self, images: &[PeriodElement]) -> PeriodElement {
        assert_eq!(images.len(), self.dim(), "one image per label");
        let target = images.first().map_or_else(|| self.weights.clone(), |x| x.weights.clone());
        let mut out = PeriodElement::zero(self.ctx, &target);
        for ((i, k, j), c) in &self.terms {
            let image = &images[*j];
            image.check_compatible(&out);
            for ((ii, kk, jj), cc) in &image.terms {
                out.push((i + ii, k + kk, *jj), c * cc);
            }
        }
        out
    }

    /// The `(t^0, u^0)` coefficient of each label, after checking that no
    /// nonzero term has negative filtration degree or is a power of `u/t`.
    pub fn theta(&self) -> Result<Vec<Padic>, PoleError> {
        for ((i, k, j), c) in self.terms() {
            let degree = i + k as i64;
            if degree < 0 || (degree == 0 && k > 0) {
                return Err(PoleError {
                    label: j,
                    t_exp: i,
                    u_exp: k,
                    coefficient: c.to_rational_string(),
                });
            }
        }
        Ok((0..self.dim()).map(|j| self.coefficient(0, 0, j)).collect())
    }

    /// Every coefficient of `self - other` has valuation at least `floor`.
    pub fn agrees_to(&self, other: &PeriodElement, floor: i64) -> bool {
        (self - other).terms.values().all(|c| c.valuation() >= floor)
    }
}

fn powers(ctx: PadicContext, x: &Padic, n: u32) -> Vec<Padic> {
    let mut out = vec![ctx.one()];
    for _ in 0..n {
        let next = out.last().expect("nonempty") * x;
        out.push(next);
    }
    out
}

impl Add for &PeriodElement {
    type Output = PeriodElement;
    fn add(self, rhs: &PeriodElement) -> PeriodElement {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.push(*k, c.clone());
        }
        out
    }
}

impl Sub for &PeriodElement {
    type Output = PeriodElement;
    fn sub(self, rhs: &PeriodElement) -> PeriodElement {
        self + &(-rhs)
    }
}

impl Neg for &PeriodElement {
    type Output = PeriodElement;
    fn neg(self) -> PeriodElement {
        self.scale(&-self.ctx.one())
    }
}

impl fmt::Display for PeriodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms()
            .map(|((i, k, j), c)| {
                let mut s = format!("({})", c.to_rational_string());
                if i != 0 {
                    s.push_str(&format!(" t^{i}"));
                }
                if k != 0 {
                    s.push_str(&format!(" u^{k}"));
                }
                s.push_str(&format!(" f{}", j + 1));
                s
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// An element `beta_c gamma_chi` of `Gamma_K x| Gamma_BK`, recorded by its
/// cyclotomic value `chi` and Kummer value `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub chi: Padic,
    pub c: Padic,
}

impl GroupElement {
    /// Checks that `chi` is a 1-unit in the log domain and `c` is integral.
    pub fn new(chi: Padic, c: Padic) -> Result<GroupElement, PadicError> {
        let t = log_threshold(chi.p());
        let shifted = &chi - &Padic::one(chi.p(), chi.precision());
        if shifted.valuation() < t {
            return Err(PadicError::Domain {
                op: "GroupElement::new",
                reason: format!("chi - 1 has valuation {}, needs >= {t}", shifted.valuation()),
            });
        }
        if c.valuation() < 0 {
            return Err(PadicError::Domain {
                op: "GroupElement::new",
                reason: format!("c has valuation {}", c.valuation()),
            });
        }
        Ok(GroupElement { chi, c })
    }

    pub fn identity(ctx: PadicContext) -> GroupElement {
        GroupElement { chi: ctx.one(), c: Padic::exact_zero(ctx.p()) }
    }

    pub fn gamma(chi: Padic) -> Result<GroupElement, PadicError> {
        let p = chi.p();
        GroupElement::new(chi, Padic::exact_zero(p))
    }

    pub fn beta(ctx: PadicContext, c: Padic) -> Result<GroupElement, PadicError> {
        GroupElement::new(ctx.one(), c)
    }

    /// `self * other`, using `gamma_chi beta_c = beta_(chi c) gamma_chi`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement { chi: &self.chi * &other.chi, c: &self.c + &(&self.chi * &other.c) }
    }

    /// `self^a` for a p-adic integer `a`:
    /// `(beta_c gamma_chi)^a = beta_(c (chi^a - 1)/(chi - 1)) gamma_(chi^a)`.
    pub fn pow_zp(&self, a: &Padic) -> Result<GroupElement, PadicError> {
        let chi_a = self.chi.pow_zp(a)?;
        let one = Padic::one(self.chi.p(), self.chi.precision());
        let denom = &self.chi - &one;
        let c = if denom.is_zero() {
            &self.c * a
        } else {
            (&self.c * &(&chi_a - &one)).div(&denom)?
        };
        Ok(GroupElement { chi: chi_a, c })
    }

    /// Both components agree to absolute precision `floor`.
    pub fn agrees_to(&self, other: &GroupElement, floor: i64) -> bool {
        self.chi.agrees_to(&other.chi, floor) && self.c.agrees_to(&other.c, floor)
    }
}
