//! `(phi, N)`-data describing a semi-stable module, and its validation.
//!
//! The basis is expected in chain form: `N` maps `g_j` to `g_(j+1)` inside a
//! chain and to zero at its end, so `N` is zero apart from 0/1 entries on the
//! subdiagonal. Each basis index carries a weight `n_j` and a twist `m_j`.

use std::ops::Range;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhiNError {
    #[error("{field}: expected {expected}, found {found}")]
    Shape { field: &'static str, expected: String, found: String },
    #[error("dimension must be positive")]
    EmptyModule,
}

pub type RationalGrid = Vec<Vec<BigRational>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiNData {
    n: RationalGrid,
    phi: Option<RationalGrid>,
    weights: Vec<i64>,
    twists: Vec<i64>,
}

fn check_square(field: &'static str, grid: &RationalGrid, d: usize) -> Result<(), PhiNError> {
    let ok = grid.len() == d && grid.iter().all(|r| r.len() == d);
    if ok {
        return Ok(());
    }
    let found = format!("{} rows with lengths {:?}", grid.len(), grid.iter().map(Vec::len).collect::<Vec<_>>());
    Err(PhiNError::Shape { field, expected: format!("{d}x{d} matrix"), found })
}

impl PhiNData {
    /// Builds the data, completing missing twists with [`default_twists`].
    pub fn new(
        n: RationalGrid,
        phi: Option<RationalGrid>,
        weights: Vec<i64>,
        twists: Option<Vec<i64>>,
    ) -> Result<PhiNData, PhiNError> {
        let d = weights.len();
        if d == 0 {
            return Err(PhiNError::EmptyModule);
        }
        check_square("N", &n, d)?;
        if let Some(phi) = &phi {
            check_square("phi", phi, d)?;
        }
        let twists = match twists {
            Some(m) if m.len() != d => {
                return Err(PhiNError::Shape {
                    field: "twists",
                    expected: format!("{d} entries"),
                    found: format!("{} entries", m.len()),
                })
            }
            Some(m) => m,
            None => default_twists(&n, &weights),
        };
        Ok(PhiNData { n, phi, weights, twists })
    }

    /// A single chain `g_1 -> ... -> g_d -> 0` (or `N = 0` when `chain` is false).
    pub fn shift(weights: Vec<i64>, twists: Option<Vec<i64>>, chain: bool) -> PhiNData {
        let d = weights.len();
        let n = chain_form_matrix(&[d], chain);
        PhiNData::new(n, None, weights, twists).expect("shapes agree")
    }

    pub fn with_phi(mut self, phi: RationalGrid) -> Result<PhiNData, PhiNError> {
        check_square("phi", &phi, self.dim())?;
        self.phi = Some(phi);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn n(&self) -> &RationalGrid {
        &self.n
    }

    pub fn phi(&self) -> Option<&RationalGrid> {
        self.phi.as_ref()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn twists(&self) -> &[i64] {
        &self.twists
    }

    pub fn is_crystalline(&self) -> bool {
        self.n.iter().flatten().all(Zero::is_zero)
    }

    /// Maximal index ranges linked by `N[j+1][j] != 0`.
    pub fn chains(&self) -> Vec<Range<usize>> {
        chains_of(&self.n)
    }
}

/// Block-diagonal chain-form matrix with the given block sizes.
pub fn chain_form_matrix(blocks: &[usize], linked: bool) -> RationalGrid {
    let d: usize = blocks.iter().sum();
    let mut n = vec![vec![BigRational::zero(); d]; d];
    if linked {
        let mut start = 0;
        for &len in blocks {
            for j in start..start + len.saturating_sub(1) {
                n[j + 1][j] = BigRational::one();
            }
            start += len;
        }
    }
    n
}

fn chains_of(n: &RationalGrid) -> Vec<Range<usize>> {
    let d = n.len();
    let mut out = Vec::new();
    let mut start = 0;
    for j in 0..d {
        let linked = j + 1 < d && !n[j + 1][j].is_zero();
        if !linked {
            out.push(start..j + 1);
            start = j + 1;
        }
    }
    out
}

/// Twists making every chain consistent: the twist stays put across a weight
/// step of `+1` and drops by one across any other step.
pub fn default_twists(n: &RationalGrid, weights: &[i64]) -> Vec<i64> {
    let mut twists = vec![0; weights.len()];
    for chain in chains_of(n) {
        for j in chain.start + 1..chain.end {
            let step_ok = weights[j] == weights[j - 1] + 1;
            twists[j] = if step_ok { twists[j - 1] } else { twists[j - 1] - 1 };
        }
    }
    twists
}

/// One failed condition with the indices (0-based) that witness it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum ValidationIssue {
    /// `N^d` has the nonzero entry `value` at `(row, col)`.
    Nilpotent { power: usize, row: usize, col: usize, value: String },
    /// `N phi - p phi N` has the nonzero entry `value` at `(row, col)`.
    PhiRelation { row: usize, col: usize, value: String },
    /// `N` is not zero outside 0/1 subdiagonal entries.
    ChainForm { row: usize, col: usize, value: String },
    /// Equal twists at `index` and `index + k` but weights not `k` apart.
    ChainConsistency { index: usize, k: usize, expected_weight: i64, found_weight: i64 },
    /// The twist rises from `index` to `index + 1` inside a chain.
    TwistMonotonicity { index: usize, from: i64, to: i64 },
}

impl ValidationIssue {
    pub fn check_id(&self) -> &'static str {
        match self {
            ValidationIssue::Nilpotent { .. } => "nilpotent",
            ValidationIssue::PhiRelation { .. } => "phi_relation",
            ValidationIssue::ChainForm { .. } => "chain_form",
            ValidationIssue::ChainConsistency { .. } => "chain_consistency",
            ValidationIssue::TwistMonotonicity { .. } => "twist_monotonicity",
        }
    }
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidationIssue::Nilpotent { power, row, col, value } => {
                write!(f, "N^{power} has entry {value} at ({row}, {col})")
            }
            ValidationIssue::PhiRelation { row, col, value } => {
                write!(f, "N phi - p phi N has entry {value} at ({row}, {col})")
            }
            ValidationIssue::ChainForm { row, col, value } => {
                write!(f, "N has entry {value} at ({row}, {col}) outside chain form")
            }
            ValidationIssue::ChainConsistency { index, k, expected_weight, found_weight } => write!(
                f,
                "twists at {index} and {} agree, so weight {expected_weight} is required there, found {found_weight}",
                index + k
            ),
            ValidationIssue::TwistMonotonicity { index, from, to } => {
                write!(f, "twist rises from {from} at {index} to {to} at {}", index + 1)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

fn mat_mul(a: &RationalGrid, b: &RationalGrid) -> RationalGrid {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).fold(BigRational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn first_nonzero(m: &RationalGrid) -> Option<(usize, usize, String)> {
    m.iter().enumerate().find_map(|(i, row)| {
        row.iter().enumerate().find(|(_, x)| !x.is_zero()).map(|(j, x)| (i, j, x.to_string()))
    })
}

/// Runs the checks in order: nilpotency, the `phi` relation, chain form, chain
/// consistency of weights, and monotonicity of twists.
pub fn validate(data: &PhiNData, p: u64) -> ValidationReport {
    let d = data.dim();
    let mut issues = Vec::new();

    let mut power = data.n.clone();
    for _ in 1..d {
        power = mat_mul(&power, &data.n);
    }
    if let Some((row, col, value)) = first_nonzero(&power) {
        issues.push(ValidationIssue::Nilpotent { power: d, row, col, value });
    }

    if let Some(phi) = &data.phi {
        let p = BigRational::from_integer(p.into());
        let lhs = mat_mul(&data.n, phi);
        let rhs = mat_mul(phi, &data.n);
        let diff: RationalGrid = lhs
            .iter()
            .zip(&rhs)
            .map(|(l, r)| l.iter().zip(r).map(|(a, b)| a - &p * b).collect())
            .collect();
        if let Some((row, col, value)) = first_nonzero(&diff) {
            issues.push(ValidationIssue::PhiRelation { row, col, value });
        }
    }

    let chain_form_violation = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).find(|&(i, j)| {
        let x = &data.n[i][j];
        let allowed = i == j + 1 && (x.is_zero() || x.is_one());
        !allowed && !x.is_zero()
    });
    if let Some((row, col)) = chain_form_violation {
        issues.push(ValidationIssue::ChainForm { row, col, value: data.n[row][col].to_string() });
        return ValidationReport { issues };
    }

    let (n, m) = (&data.weights, &data.twists);
    for chain in data.chains() {
        for j in chain.clone() {
            for k in 1..chain.end - j {
                if m[j + k] == m[j] && n[j + k] != n[j] + k as i64 {
                    issues.push(ValidationIssue::ChainConsistency {
                        index: j,
                        k,
                        expected_weight: n[j] + k as i64,
                        found_weight: n[j + k],
                    });
                }
            }
        }
        for j in chain.start..chain.end.saturating_sub(1) {
            if m[j + 1] > m[j] {
                issues.push(ValidationIssue::TwistMonotonicity { index: j, from: m[j], to: m[j + 1] });
            }
        }
    }
    ValidationReport { issues }
}
