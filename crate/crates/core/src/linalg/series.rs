//! Matrix logarithm and exponential by truncated power series.

use super::{LinalgError, PadicMatrix, Result};
use crate::padic::{log_threshold, Padic, EXACT};

/// Valuation data for the powers `X, X^2, ..., X^d`: `w = minval(X^d)` and
/// `mu = min(0, minval(X^r), r < d)`, so that `v(X^k) >= floor(k/d) * w + mu`.
struct PowerBounds {
    powers: Vec<PadicMatrix>,
    w: i64,
    mu: i64,
}

fn power_bounds(x: &PadicMatrix) -> Result<PowerBounds> {
    let d = x.rows().max(1);
    let mut powers = vec![x.clone()];
    for _ in 1..d {
        let next = powers.last().expect("nonempty").mul(x)?;
        powers.push(next);
    }
    let w = powers[d - 1].min_valuation();
    let mu = powers[..d - 1].iter().map(PadicMatrix::min_valuation).fold(0, i64::min);
    Ok(PowerBounds { powers, w, mu })
}

fn first_violation(x: &PadicMatrix, required: i64, op: &'static str) -> LinalgError {
    let (row, col, v) = x
        .entries()
        .find(|(_, _, e)| e.valuation() < required)
        .map(|(i, j, e)| (i, j, e.valuation()))
        .or_else(|| x.worst_entry().map(|(i, j, e)| (i, j, e.valuation())))
        .unwrap_or((0, 0, EXACT));
    LinalgError::Domain { op, row, col, valuation: v, required }
}

/// First `K >= start` with `(K/d - 1) w + mu - loss(K) >= target`, where `loss` is
/// the real-valued division loss; the bound is increasing past `start`.
fn cutoff(d: usize, w: i64, mu: i64, target: i64, start: usize, loss: impl Fn(f64) -> f64) -> usize {
    if w == EXACT {
        return d.max(1);
    }
    let d = d.max(1) as f64;
    let mut k = start.max(1);
    loop {
        let kf = k as f64;
        let bound = (kf / d - 1.0) * w as f64 + mu as f64 - loss(kf);
        if bound >= target as f64 + 1e-9 {
            return k;
        }
        k += 1;
    }
}

impl PadicMatrix {
    /// `log(A) = -sum_{k>=1} (I - A)^k / k`.
    ///
    /// Converges when `(A - I)^d` has all entries of valuation at least 1
    /// (2 for p = 2); this covers `A - I` entrywise small and `A` unipotent.
    pub fn log(&self) -> Result<PadicMatrix> {
        let d = self.require_square("log")?;
        let ctx = self.ctx();
        let p = ctx.p();
        let e = self.sub(&PadicMatrix::identity(ctx, d))?;
        let t = log_threshold(p);
        let bounds = power_bounds(&e)?;
        if bounds.w < t {
            return Err(first_violation(&e, t, "log"));
        }
        let target = self.min_precision().min(ctx.precision());
        let ln_p = (p as f64).ln();
        let start = 2 * d;
        let k_max = cutoff(d, bounds.w, bounds.mu, target, start, |k| k.ln() / ln_p);
        let mut sum = PadicMatrix::zeros(ctx, d, d);
        let mut power = e.clone();
        for k in 1..k_max {
            if k > 1 {
                power = if k <= d { bounds.powers[k - 1].clone() } else { power.mul(&e)? };
            }
            let term = power.try_map(|x| x.div_int(k as i64))?;
            sum = if k % 2 == 1 { sum.add(&term)? } else { sum.sub(&term)? };
        }
        Ok(sum.map(|x| x.reduce_to(target)))
    }

    /// `exp(L) = sum L^k / k!`, convergent when `minval(L^d) * (p - 1) > d`
    /// (in particular for nilpotent `L`).
    pub fn exp(&self) -> Result<PadicMatrix> {
        let d = self.require_square("exp")?;
        let ctx = self.ctx();
        let p = ctx.p();
        let bounds = power_bounds(self)?;
        let q = (p - 1) as i64;
        if bounds.w != EXACT && bounds.w.saturating_mul(q) <= d as i64 {
            let required = (d as i64) / q + 1;
            return Err(first_violation(self, log_threshold(p).max(1), "exp").with_required(required));
        }
        let target = self.min_precision().min(ctx.precision());
        let k_max = cutoff(d, bounds.w, bounds.mu, target, 1, |k| (k - 1.0) / q as f64);
        let mut sum = PadicMatrix::identity(ctx, d);
        let mut term = PadicMatrix::identity(ctx, d);
        for k in 1..k_max {
            term = term.mul(self)?.try_map(|x| x.div_int(k as i64))?;
            sum = sum.add(&term)?;
        }
        Ok(sum.map(|x| x.reduce_to(target)))
    }

    /// `A^a = exp(a log A)` for a p-adic integer `a`.
    pub fn pow_zp(&self, a: &Padic) -> Result<PadicMatrix> {
        if a.valuation() < 0 {
            return Err(LinalgError::Padic(crate::padic::PadicError::Domain {
                op: "pow_zp",
                reason: format!("exponent has valuation {}", a.valuation()),
            }));
        }
        self.log()?.scale(a).exp()
    }
}

impl LinalgError {
    fn with_required(self, required: i64) -> LinalgError {
        match self {
            LinalgError::Domain { op, row, col, valuation, .. } => {
                LinalgError::Domain { op, row, col, valuation, required }
            }
            other => other,
        }
    }
}
