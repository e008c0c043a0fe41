//! Structural checks on a built [`PiSenModule`], collected into a report.
//!
//! An equality holds when every entry of the difference has valuation at
//! least `M - slack`.

use serde::Serialize;

use crate::linalg::{LinalgError, PadicMatrix};
use crate::padic::Padic;
use crate::pi_sen::{monodromy_gap, PiSenModule, DEFAULT_SLACK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Evidence attached to a failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// An entry of `matrix` that should vanish to the floor.
    Entry { matrix: String, row: usize, col: usize, value: String, valuation: i64 },
    /// A scalar that should vanish to the floor.
    Scalar { name: String, value: String, valuation: i64 },
    /// An eigenvector of `nabla0` whose image breaks the weight rule.
    Vector { weight: i64, source: Vec<String>, image: Vec<String>, defect_valuation: i64 },
    /// Eigenspaces of `nabla0` that fail to span the module.
    Spectrum { found: usize, dim: usize, lo: i64, hi: i64 },
    /// A component of the image of `D^(s,t)` outside `D^(s-1,t+1)`.
    Bigrading { source: (i64, i64), target: (i64, i64), value: String, valuation: i64 },
    /// Error valuations of the difference quotients for `n = 1, 2, 3`.
    Limits { generator: String, valuations: Vec<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub id: &'static str,
    pub statement: &'static str,
    pub status: Status,
    /// Digits to which the checked identity was observed to hold.
    pub precision: Option<i64>,
    pub detail: String,
    pub witness: Option<Witness>,
}

impl CheckRecord {
    fn new(id: &'static str, statement: &'static str) -> CheckRecord {
        CheckRecord { id, statement, status: Status::Pass, precision: None, detail: String::new(), witness: None }
    }

    fn skip(mut self, why: impl Into<String>) -> CheckRecord {
        self.status = Status::Skipped;
        self.detail = why.into();
        self
    }

    fn fail(mut self, witness: Witness) -> CheckRecord {
        self.status = Status::Fail;
        self.witness = Some(witness);
        self
    }

    fn error(self, err: LinalgError) -> CheckRecord {
        let text = err.to_string();
        let mut rec = self.fail(Witness::Scalar { name: "error".into(), value: text.clone(), valuation: 0 });
        rec.detail = text;
        rec
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub slack: i64,
    pub total_degree: Option<i64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { slack: DEFAULT_SLACK, total_degree: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub p: u64,
    pub precision: i64,
    pub slack: i64,
    pub route: &'static str,
    pub input_digest: Option<String>,
    pub total_degree: Option<i64>,
    pub weight_shift: Option<i64>,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failed_ids(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.id).collect()
    }

    pub fn with_digest(mut self, digest: String) -> VerificationReport {
        self.input_digest = Some(digest);
        self
    }
}

/// Check identifiers in report order.
pub const CHECK_IDS: [&str; 9] = [
    "decomposition",
    "bracket",
    "nilpotent",
    "weight_shift",
    "transversality",
    "crystalline",
    "local_monodromy",
    "limits",
    "semidirect_relation",
];

fn floor(module: &PiSenModule, slack: i64) -> i64 {
    module.ctx().precision() - slack
}

/// Observed precision of a vanishing difference, capped at the working precision.
fn achieved(module: &PiSenModule, diff: &PadicMatrix) -> i64 {
    diff.min_valuation().min(module.ctx().precision())
}

fn entry_witness(name: &str, m: &PadicMatrix) -> Witness {
    let (row, col, x) = m.worst_entry().expect("nonempty matrix");
    Witness::Entry {
        matrix: name.to_string(),
        row,
        col,
        value: x.to_rational_string(),
        valuation: x.valuation(),
    }
}

fn strings(v: &[Padic]) -> Vec<String> {
    v.iter().map(Padic::to_rational_string).collect()
}

/// Eigenvalues of `nabla0` are integers and the eigenspaces span the module.
pub fn check_decomposition(module: &PiSenModule, slack: i64) -> CheckRecord {
    let rec = CheckRecord::new("decomposition", "nabla0 is diagonalizable with integer eigenvalues");
    let wd = match module.weights() {
        Ok(wd) => wd,
        Err(LinalgError::SpectrumNotInteger { found, dim, lo, hi }) => {
            let mut rec = rec.fail(Witness::Spectrum { found: *found, dim: *dim, lo: *lo, hi: *hi });
            rec.detail = format!("eigenspaces span {found} of {dim} dimensions");
            return rec;
        }
        Err(e) => return rec.error(e.clone()),
    };
    let ctx = module.ctx();
    let inner = || -> Result<PadicMatrix, LinalgError> {
        let p = wd.change_of_basis(ctx);
        let diag = PadicMatrix::diagonal(ctx, &wd.weights().iter().map(|&w| ctx.int(w)).collect::<Vec<_>>());
        p.inverse()?.mul(module.nabla0())?.mul(&p)?.sub(&diag)
    };
    let diff = match inner() {
        Ok(d) => d,
        Err(e) => return rec.error(e),
    };
    let mut rec = rec;
    rec.detail = format!("weights {:?}", wd.weights());
    rec.precision = Some(achieved(module, &diff));
    if !diff.vanishes_to(floor(module, slack)) {
        return rec.fail(entry_witness("P^-1 nabla0 P - diag(weights)", &diff));
    }
    rec
}

/// `[nabla0, nabla_pi] = nabla_pi`.
pub fn check_bracket(module: &PiSenModule, slack: i64) -> CheckRecord {
    let mut rec = CheckRecord::new("bracket", "[nabla0, nabla_pi] = nabla_pi");
    let diff = match module.nabla0().commutator(module.nabla_pi()).and_then(|c| c.sub(module.nabla_pi())) {
        Ok(d) => d,
        Err(e) => return rec.error(e),
    };
    rec.precision = Some(achieved(module, &diff));
    if !diff.vanishes_to(floor(module, slack)) {
        return rec.fail(entry_witness("[nabla0, nabla_pi] - nabla_pi", &diff));
    }
    rec
}

/// `nabla_pi^d = 0` and `trace(nabla_pi^r) = 0` for `r = 1..d`.
pub fn check_nilpotent(module: &PiSenModule, slack: i64) -> CheckRecord {
    let mut rec = CheckRecord::new("nilpotent", "nabla_pi is nilpotent and tr(nabla_pi^r) = 0 for r = 1..d");
    let f = floor(module, slack);
    let d = module.dim();
    let pi = module.nabla_pi();
    let mut power = pi.clone();
    let mut worst = module.ctx().precision();
    for r in 1..=d {
        if r > 1 {
            power = match power.mul(pi) {
                Ok(x) => x,
                Err(e) => return rec.error(e),
            };
        }
        let tr = power.trace().expect("square");
        worst = worst.min(tr.valuation());
        if tr.valuation() < f {
            return rec.fail(Witness::Scalar {
                name: format!("tr(nabla_pi^{r})"),
                value: tr.to_rational_string(),
                valuation: tr.valuation(),
            });
        }
    }
    rec.precision = Some(worst.min(achieved(module, &power)));
    if !power.vanishes_to(f) {
        return rec.fail(entry_witness(&format!("nabla_pi^{d}"), &power));
    }
    if let Ok(index) = pi.nilpotency_index_to(f) {
        rec.detail = format!("minimal nilpotency index {index}");
    }
    rec
}

/// For each weight-`n` eigenvector `v`, `nabla_pi v` is zero or has weight `n + 1`.
pub fn check_weight_shift(module: &PiSenModule, slack: i64) -> CheckRecord {
    let mut rec = CheckRecord::new("weight_shift", "nabla_pi raises the weight of each eigenvector by 1");
    let Ok(wd) = module.weights() else {
        return rec.skip("nabla0 has no integer weight decomposition");
    };
    let f = floor(module, slack);
    let ctx = module.ctx();
    let mut worst = ctx.precision();
    for space in &wd.spaces {
        for v in &space.basis {
            let inner = || -> Result<(Vec<Padic>, Vec<Padic>), LinalgError> {
                let w = module.nabla_pi().mul_vec(v)?;
                let nw = module.nabla0().mul_vec(&w)?;
                let shift = ctx.int(space.weight + 1);
                Ok((w.clone(), nw.iter().zip(&w).map(|(a, b)| a - &(&shift * b)).collect()))
            };
            let (image, defect) = match inner() {
                Ok(x) => x,
                Err(e) => return rec.error(e),
            };
            if image.iter().all(|x| x.valuation() >= f) {
                continue;
            }
            let v_defect = defect.iter().map(Padic::valuation).min().unwrap_or(i64::MAX);
            worst = worst.min(v_defect);
            if v_defect < f {
                return rec.fail(Witness::Vector {
                    weight: space.weight,
                    source: strings(v),
                    image: strings(&image),
                    defect_valuation: v_defect,
                });
            }
        }
    }
    rec.precision = Some(worst);
    rec
}

/// `nabla_pi(D^(s,t))` lies in `D^(s-1,t+1)`, read off in eigenvector coordinates.
pub fn check_transversality(module: &PiSenModule, opts: VerifyOptions) -> CheckRecord {
    let mut rec = CheckRecord::new("transversality", "nabla_pi maps D^(s,t) into D^(s-1,t+1)");
    let Ok(wd) = module.weights() else {
        return rec.skip("nabla0 has no integer weight decomposition");
    };
    let (m, shift) = module.grading(opts.total_degree).or_else(|| module.grading(None)).expect("weights exist");
    let ctx = module.ctx();
    let p = wd.change_of_basis(ctx);
    let local = match p.inverse().and_then(|pinv| pinv.mul(module.nabla_pi())?.mul(&p)) {
        Ok(x) => x,
        Err(e) => return rec.error(e),
    };
    let weights = wd.weights();
    let f = floor(module, opts.slack);
    let mut worst = ctx.precision();
    for (b, &tb) in weights.iter().enumerate() {
        for (a, &ta) in weights.iter().enumerate() {
            if ta == tb + 1 {
                continue;
            }
            let x = local.get(a, b);
            worst = worst.min(x.valuation());
            if x.valuation() < f {
                let (t0, t1) = (tb + shift, ta + shift);
                return rec.fail(Witness::Bigrading {
                    source: (m - t0, t0),
                    target: (m - t1, t1),
                    value: x.to_rational_string(),
                    valuation: x.valuation(),
                });
            }
        }
    }
    rec.precision = Some(worst);
    rec.detail = format!("total degree {m}, weight shift {shift}");
    rec
}

/// `nabla_pi` vanishes to full precision when the source monodromy is zero.
pub fn check_crystalline(module: &PiSenModule) -> CheckRecord {
    let rec = CheckRecord::new("crystalline", "N = 0 forces nabla_pi = 0 exactly");
    let Some(n) = module.monodromy() else {
        return rec.skip("source monodromy unknown");
    };
    if n.iter().flatten().any(|x| !num_traits::Zero::is_zero(x)) {
        return rec.skip("source monodromy is nonzero");
    }
    let m = module.ctx().precision();
    let bad = module.nabla_pi().entries().find(|(_, _, x)| !x.is_zero() || x.valuation() < m);
    if let Some((row, col, x)) = bad {
        return rec.fail(Witness::Entry {
            matrix: "nabla_pi".into(),
            row,
            col,
            value: x.to_rational_string(),
            valuation: x.valuation(),
        });
    }
    let mut rec = rec;
    rec.precision = Some(m);
    rec
}

/// `nabla_pi^(m+1) = 0` and `nabla_pi^(h_m+1) = 0` for weights in `[0, m]`.
pub fn check_local_monodromy(module: &PiSenModule, opts: VerifyOptions) -> CheckRecord {
    let mut rec = CheckRecord::new(
        "local_monodromy",
        "nabla_pi^(m+1) = 0 and nabla_pi^(h_m+1) = 0 with h_m the longest run of nonzero h^(s,t)",
    );
    let Some((m, shift)) = module.grading(opts.total_degree) else {
        return rec.skip("weights do not fit in [0, m]");
    };
    let dims = match module.bigraded_dims(m, shift) {
        Ok(d) => d,
        Err(e) => return rec.error(e),
    };
    let h_m = monodromy_gap(&dims);
    let f = floor(module, opts.slack);
    let pi = module.nabla_pi();
    let mut worst = module.ctx().precision();
    for k in [m + 1, h_m + 1] {
        let power = match pi.pow(k as u64) {
            Ok(x) => x,
            Err(e) => return rec.error(e),
        };
        worst = worst.min(achieved(module, &power));
        if !power.vanishes_to(f) {
            rec.detail = format!("m = {m}, h_m = {h_m}");
            return rec.fail(entry_witness(&format!("nabla_pi^{k}"), &power));
        }
    }
    let index = pi.nilpotency_index_to(f).map(|i| i.to_string()).unwrap_or_else(|_| "none".into());
    rec.precision = Some(worst);
    rec.detail = format!("m = {m}, h_m = {h_m}, minimal nilpotency index {index}");
    rec
}

/// Error valuations of `(A^(p^n) - I) / (x^(p^n) - 1) - target` for `n = 1, 2, 3`,
/// with `None` when the error vanishes to its known precision.
fn quotient_errors(
    a: &PadicMatrix,
    denominators: &[Padic],
    target: &PadicMatrix,
) -> Result<(Vec<Option<i64>>, PadicMatrix), LinalgError> {
    let ctx = a.ctx();
    let id = PadicMatrix::identity(ctx, a.rows());
    let mut out = Vec::new();
    let mut last = None;
    let mut power = a.clone();
    for denom in denominators {
        power = power.pow(ctx.p())?;
        let err = power.sub(&id)?.div_scalar(denom)?.sub(target)?;
        out.push(if err.is_zero() { None } else { Some(err.min_valuation()) });
        last = Some(err);
    }
    Ok((out, last.expect("three steps")))
}

/// Difference quotients at `gamma0^(p^n)`, `beta0^(p^n)` approach the operators,
/// the error gaining at least one digit per step over the `n = 1` baseline.
pub fn check_limits(module: &PiSenModule) -> CheckRecord {
    let mut rec = CheckRecord::new(
        "limits",
        "(g^(p^n) - 1)/(char(g^(p^n)) - char(1)) converges to the operator for g = gamma0, beta0",
    );
    let Some(g) = module.generators() else {
        return rec.skip("no generator matrices available");
    };
    let ctx = module.ctx();
    let p = ctx.p() as i64;
    let one = ctx.one();
    let mut gamma_dens = Vec::new();
    let mut beta_dens = Vec::new();
    let mut q = 1i64;
    for _ in 1..=3 {
        q *= p;
        let chi_q = match g.chi0.pow_int(q) {
            Ok(x) => x,
            Err(e) => return rec.error(e.into()),
        };
        gamma_dens.push(&chi_q - &one);
        beta_dens.push(g.c0.mul_int(q));
    }
    let mut precision = ctx.precision();
    let mut details = Vec::new();
    for (name, a, dens, target) in [
        ("gamma0", &g.gamma0, &gamma_dens, module.nabla0()),
        ("beta0", &g.beta0, &beta_dens, module.nabla_pi()),
    ] {
        let (errs, last) = match quotient_errors(a, dens, target) {
            Ok(x) => x,
            Err(e) => return rec.error(e),
        };
        let converges = match errs[0] {
            None => errs.iter().all(Option::is_none),
            Some(base) => errs
                .iter()
                .enumerate()
                .skip(1)
                .all(|(i, e)| e.is_none_or(|v| v >= base + i as i64)),
        };
        let shown: Vec<String> =
            errs.iter().map(|e| e.map_or_else(|| "exact".to_string(), |v| v.to_string())).collect();
        details.push(format!("{name}: [{}]", shown.join(", ")));
        if !converges {
            let valuations = errs.iter().map(|e| e.unwrap_or(i64::MAX)).collect();
            rec.detail = details.join("; ");
            return rec.fail(Witness::Limits { generator: name.into(), valuations });
        }
        precision = precision.min(last.min_valuation());
    }
    rec.precision = Some(precision);
    rec.detail = details.join("; ");
    rec
}

/// `gamma0 beta0 gamma0^-1 = beta0^chi0` for the module's generators.
pub fn check_semidirect_relation(module: &PiSenModule, slack: i64) -> CheckRecord {
    let mut rec = CheckRecord::new("semidirect_relation", "gamma0 beta0 gamma0^-1 = beta0^chi0");
    let Some(g) = module.generators() else {
        return rec.skip("no generator matrices available");
    };
    match g.relation_defect() {
        Ok((row, col, valuation)) => {
            rec.precision = Some(valuation.min(module.ctx().precision()));
            if valuation < floor(module, slack) {
                let lhs = g.gamma0.mul(&g.beta0).and_then(|x| x.mul(&g.gamma0.inverse()?));
                let rhs = g.beta0.pow_zp(&g.chi0);
                let value = match (lhs, rhs) {
                    (Ok(l), Ok(r)) => (l.get(row, col) - r.get(row, col)).to_rational_string(),
                    _ => "?".into(),
                };
                return rec.fail(Witness::Entry {
                    matrix: "gamma0 beta0 gamma0^-1 - beta0^chi0".into(),
                    row,
                    col,
                    value,
                    valuation,
                });
            }
            rec
        }
        Err(e) => {
            let text = e.to_string();
            let mut rec = rec.fail(Witness::Scalar { name: "error".into(), value: text.clone(), valuation: 0 });
            rec.detail = text;
            rec
        }
    }
}

/// Runs every check in [`CHECK_IDS`] order.
pub fn full_report(module: &PiSenModule, opts: VerifyOptions) -> VerificationReport {
    let ctx = module.ctx();
    let checks = vec![
        check_decomposition(module, opts.slack),
        check_bracket(module, opts.slack),
        check_nilpotent(module, opts.slack),
        check_weight_shift(module, opts.slack),
        check_transversality(module, opts),
        check_crystalline(module),
        check_local_monodromy(module, opts),
        check_limits(module),
        check_semidirect_relation(module, opts.slack),
    ];
    let grading = module.grading(opts.total_degree);
    VerificationReport {
        p: ctx.p(),
        precision: ctx.precision(),
        slack: opts.slack,
        route: module.route().as_str(),
        input_digest: None,
        total_degree: grading.map(|g| g.0),
        weight_shift: grading.map(|g| g.1),
        checks,
    }
}
